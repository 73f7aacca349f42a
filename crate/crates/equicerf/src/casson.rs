//! Moduli datasets, gauge-corrected index assembly, and the weighted Casson-type sum.
//!
//! A record on stratum `σ` carries its equivariant spectral flow `Sf` and the
//! Chern–Simons fractions of its rank ≥ 2 factors. Its index class is
//! `[H_σ, Sf − ker − Σ csᵢ·τᵢ]`, where `ker` is the adjoint representation of `H_σ`
//! and the `τᵢ` come from the dataset's table.
//!
//! ```
//! use equicerf::bifgroup::{BaseWeights, Projector};
//! use equicerf::casson::{lambda_w, ModuliDataset, OrbitRecord};
//! use equicerf::repcat::RepElement;
//! use equicerf::ringcore::{int, CycSum};
//! use equicerf::strata::Stratum;
//!
//! let a = Stratum::of(&[(4, 1)]);
//! let mut ds = ModuliDataset::with_sample_tau(4);
//! ds.orbits.push(OrbitRecord::new(RepElement::triv(&a, int(2)), vec![int(0)]));
//! let w = lambda_w(&ds, &BaseWeights::default(), &Projector::builtin()).unwrap();
//! assert_eq!(w, CycSum::one());
//! ```

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bifgroup::{sphere_index, weight, BaseWeights, Fallback, Projector};
use crate::error::{Error, Result};
use crate::repcat::{kernel_rep, Branching, IndexClass, RepElement, TotalIndex};
use crate::ringcore::{int, rat, rational_str, CycSum, Rational};
use crate::strata::{enumerate_strata, Embedding, IrrepLabel, Mode, Stratum};

/// One critical orbit of the perturbed flat moduli space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub stratum: Stratum,
    /// Equivariant spectral flow; integer coefficients.
    pub sf: RepElement,
    /// `CS(B̂ᵢ)/(4π²nᵢ)` for each factor with `nᵢ ≥ 2`, in factor order.
    #[serde(with = "rational_str::vec", default)]
    pub cs: Vec<Rational>,
    /// Optional declared total `CS(B̂)/(4π²n)`, checked against `Σ csᵢ·mᵢ`.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub cs_total: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => rational_str::serialize(r, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "rational_str")] Rational);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

impl OrbitRecord {
    pub fn new(sf: RepElement, cs: Vec<Rational>) -> Self {
        OrbitRecord {
            stratum: sf.stratum().clone(),
            sf,
            cs,
            cs_total: None,
            label: None,
        }
    }

    pub fn labeled(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    /// Factor indices with rank ≥ 2, matching `cs` positionally.
    pub fn cs_factors(s: &Stratum) -> Vec<usize> {
        (0..s.len()).filter(|&i| s.factor(i).rank >= 2).collect()
    }

    /// `Σ csᵢ·mᵢ`.
    pub fn cs_scalar(&self) -> Rational {
        Self::cs_factors(&self.stratum)
            .iter()
            .zip(&self.cs)
            .map(|(&i, c)| *c * int(self.stratum.factor(i).mult as i64))
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        let name = self.label.clone().unwrap_or_else(|| self.stratum.to_string());
        if self.sf.stratum() != &self.stratum {
            return Err(Error::Dataset(format!("record {name}: sf group differs from stratum")));
        }
        if !self.sf.is_integral() {
            return Err(Error::Dataset(format!("record {name}: spectral flow must be integral")));
        }
        let want = Self::cs_factors(&self.stratum).len();
        if self.cs.len() != want {
            return Err(Error::Dataset(format!(
                "record {name}: {} CS fractions for {want} factors of rank ≥ 2",
                self.cs.len()
            )));
        }
        if let Some(total) = self.cs_total {
            if total != self.cs_scalar() {
                return Err(Error::Dataset(format!(
                    "record {name}: CS total {total} differs from Σ csᵢ·mᵢ = {}",
                    self.cs_scalar()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct TauEntry {
    factor: usize,
    rep: RepElement,
}

/// Records plus the excision table `(σ, i) ↦ τᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliDataset {
    pub n: u32,
    pub tau: BTreeMap<(Stratum, usize), RepElement>,
    pub orbits: Vec<OrbitRecord>,
}

#[derive(Serialize, Deserialize)]
struct DatasetJson {
    n: u32,
    #[serde(default)]
    tau: Vec<TauEntry>,
    #[serde(default)]
    orbits: Vec<OrbitRecord>,
}

impl ModuliDataset {
    pub fn new(n: u32) -> Self {
        ModuliDataset {
            n,
            tau: BTreeMap::new(),
            orbits: Vec::new(),
        }
    }

    /// Sample table `τᵢ = n·mᵢ·Triv` on every stratum of `Σ_n`.
    ///
    /// Tables of the form `a·mᵢ·Triv` are the ones under which the index data of new
    /// records created by bifurcations stay integral.
    pub fn with_sample_tau(n: u32) -> Self {
        let mut ds = Self::new(n);
        for s in enumerate_strata(n, Mode::Raw) {
            for i in OrbitRecord::cs_factors(&s) {
                let c = int((n * s.factor(i).mult) as i64);
                ds.tau.insert((s.clone(), i), RepElement::triv(&s, c));
            }
        }
        ds
    }

    pub fn validate(&self) -> Result<()> {
        for ((s, i), r) in &self.tau {
            if r.stratum() != s || *i >= s.len() {
                return Err(Error::Dataset(format!(
                    "τ entry for factor {} of {s} is malformed",
                    i + 1
                )));
            }
        }
        for r in &self.orbits {
            if r.stratum.n() != self.n {
                return Err(Error::Dataset(format!(
                    "record on {} in a dataset with n = {}",
                    r.stratum, self.n
                )));
            }
            r.validate()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DatasetJson = serde_json::from_str(text)?;
        let mut ds = ModuliDataset::new(raw.n);
        for t in raw.tau {
            if t.factor == 0 {
                return Err(Error::Schema {
                    field: "tau[].factor".into(),
                    msg: "factor indices start at 1".into(),
                });
            }
            ds.tau.insert((t.rep.stratum().clone(), t.factor - 1), t.rep);
        }
        ds.orbits = raw.orbits;
        for r in &ds.orbits {
            if r.sf.stratum() != &r.stratum {
                return Err(Error::Schema {
                    field: "orbits[].sf.group".into(),
                    msg: format!("{} does not match stratum {}", r.sf.stratum(), r.stratum),
                });
            }
        }
        ds.validate()?;
        Ok(ds)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = DatasetJson {
            n: self.n,
            tau: self
                .tau
                .iter()
                .map(|((_, i), r)| TauEntry {
                    factor: i + 1,
                    rep: r.clone(),
                })
                .collect(),
            orbits: self.orbits.clone(),
        };
        serde_json::to_value(raw).expect("serializable")
    }

    fn tau_of(&self, s: &Stratum, i: usize) -> Result<&RepElement> {
        self.tau
            .get(&(s.clone(), i))
            .ok_or_else(|| Error::Dataset(format!("missing τ for factor {} of {s}", i + 1)))
    }

    /// `Σ csᵢ·τᵢ` for a record.
    fn cs_correction(&self, rec: &OrbitRecord) -> Result<RepElement> {
        let mut acc = RepElement::zero(&rec.stratum);
        for (&i, c) in OrbitRecord::cs_factors(&rec.stratum).iter().zip(&rec.cs) {
            acc = acc.add(&self.tau_of(&rec.stratum, i)?.scale(*c))?;
        }
        Ok(acc)
    }
}

/// `Sf − ker − Σ csᵢ·τᵢ` in the record's own factor order.
pub fn assemble_rep(rec: &OrbitRecord, ds: &ModuliDataset) -> Result<RepElement> {
    rec.sf.sub(&kernel_rep(&rec.stratum))?.sub(&ds.cs_correction(rec)?)
}

pub fn assemble_index(rec: &OrbitRecord, ds: &ModuliDataset) -> Result<IndexClass> {
    Ok(IndexClass::new(assemble_rep(rec, ds)?))
}

/// Total index of the whole dataset.
pub fn dataset_index(ds: &ModuliDataset) -> Result<TotalIndex> {
    let mut out = TotalIndex::zero();
    for r in &ds.orbits {
        out.add_term(assemble_index(r, ds)?, 1);
    }
    Ok(out)
}

/// `λ_w = Σ w(ind B)` over records.
pub fn lambda_w(ds: &ModuliDataset, base: &BaseWeights, p: &Projector) -> Result<CycSum> {
    ds.validate()?;
    weight(&dataset_index(ds)?, base, p)
}

/// The five admissible SU(4) strata in the order the closed formula lists them.
pub fn su4_strata() -> [Stratum; 5] {
    [
        Stratum::of(&[(4, 1)]),
        Stratum::of(&[(1, 1), (3, 1)]),
        Stratum::of(&[(2, 1), (2, 1)]),
        Stratum::of(&[(2, 2)]),
        Stratum::of(&[(1, 2), (2, 1)]),
    ]
}

fn sign(e: &Rational) -> Result<Rational> {
    if !e.is_integer() {
        return Err(Error::Dataset(format!("exponent {e} is not an integer")));
    }
    Ok(if e.to_integer().rem_euclid(2) == 0 {
        int(1)
    } else {
        int(-1)
    })
}

/// The SU(4) closed formula, one line per stratum, evaluated exactly as printed.
///
/// Exponents use the trivial part of `Sf`; the other factors use dimensions of the
/// non-trivial isotypic parts of the assembled index. Chern–Simons phases do not enter.
pub fn su4_formula(ds: &ModuliDataset) -> Result<CycSum> {
    if ds.n != 4 {
        return Err(Error::Dataset(format!("the SU(4) formula needs n = 4, got {}", ds.n)));
    }
    ds.validate()?;
    let [a, b, c, d, e] = su4_strata();
    let mut total = Rational::zero();
    for rec in &ds.orbits {
        let ind = assemble_rep(rec, ds)?;
        let s = rec.sf.coeff(IrrepLabel::Triv);
        let perp_dim = |l: IrrepLabel| ind.coeff(l) * int(rec.stratum.real_dim(l) as i64);
        let line = if rec.stratum == a {
            sign(&s)?
        } else if rec.stratum == b || rec.stratum == c {
            sign(&(s - int(1)))? * rat(1, 2) * perp_dim(IrrepLabel::Std(0, 1))
        } else if rec.stratum == d {
            let k = perp_dim(IrrepLabel::Adj(0)) / int(3);
            rat(1, 2) * sign(&s)? * k * (k + int(1))
        } else if rec.stratum == e {
            let k = perp_dim(IrrepLabel::Std(0, 1)) / int(4);
            rat(1, 2) * sign(&(s - int(1)))? * k * (k + int(1))
        } else {
            return Err(Error::Dataset(format!(
                "{} is not an admissible SU(4) stratum",
                rec.stratum
            )));
        };
        total += line;
    }
    Ok(CycSum::constant(total))
}

/// Base weights read off the closed formula: `[σ, 0]` gets the formula's value on a
/// record whose assembled index is exactly `[σ, 0]`; other reducible classes get 0.
pub fn su4_preset() -> Result<BaseWeights> {
    let mut base = BaseWeights::with_fallback(Fallback::Zero);
    let ds0 = ModuliDataset::with_sample_tau(4);
    for s in su4_strata().iter().filter(|s| !s.is_irreducible()) {
        let mut ds = ds0.clone();
        let cs = vec![int(0); OrbitRecord::cs_factors(s).len()];
        ds.orbits.push(OrbitRecord::new(kernel_rep(s), cs));
        base.set(IndexClass::zero_rep(s), su4_formula(&ds)?);
    }
    Ok(base)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Crossing from `ξ⁻` to `ξ⁺` (an orbit sheds new orbits), or a birth.
    Create,
    /// The inverse crossing, or a death.
    Annihilate,
}

/// A bifurcation applied to a dataset. Record indices are 0-based positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetMove {
    Xi {
        record: usize,
        irrep: IrrepLabel,
        direction: Direction,
    },
    BirthDeath {
        direction: Direction,
        /// For a birth: the lower record of the pair.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        template: Option<OrbitRecord>,
        /// For a death: the two records to remove.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pair: Option<(usize, usize)>,
    },
}

/// CS fractions on the target of an embedding: split blocks copy, merged blocks add.
fn propagate_cs(e: &Embedding, src_cs: &[Rational]) -> Vec<Rational> {
    let src_idx = OrbitRecord::cs_factors(&e.source);
    let mut per_factor = vec![Rational::zero(); e.source.len()];
    for (&i, c) in src_idx.iter().zip(src_cs) {
        per_factor[i] = *c;
    }
    let mut tgt = vec![Rational::zero(); e.target.len()];
    for (i, blocks) in e.blocks.iter().enumerate() {
        let mut seen = std::collections::BTreeSet::new();
        for &j in blocks {
            if seen.insert(j) {
                tgt[j] += per_factor[i];
            }
        }
    }
    OrbitRecord::cs_factors(&e.target).iter().map(|&j| tgt[j]).collect()
}

/// The records an `Xi` crossing creates from `rec` (whose index has lost one `V₁`).
fn shed_records(rec: &OrbitRecord, v1: IrrepLabel, ds: &ModuliDataset, p: &Projector) -> Result<Vec<OrbitRecord>> {
    let s = &rec.stratum;
    let datum = sphere_index(s, v1, p.sphere_data())?;
    let br: &Branching = p.branching();
    let v_prime = assemble_rep(rec, ds)?.with_added(v1, int(-1));
    let mut out = Vec::new();
    for t in &datum.terms {
        if t.coeff != 1 {
            return Err(Error::Unsupported(format!(
                "sphere datum term with coefficient {} cannot be realized as a record",
                t.coeff
            )));
        }
        let k = &t.embedding.target;
        let index = t
            .rep
            .with_added(IrrepLabel::Triv, int(1))
            .add(&br.restrict(&v_prime, &t.embedding)?)?;
        let cs = propagate_cs(&t.embedding, &rec.cs);
        let mut new = OrbitRecord::new(RepElement::zero(k), cs);
        let sf = index.add(&kernel_rep(k))?.add(&ds.cs_correction(&new)?)?;
        if !sf.is_integral() {
            return Err(Error::Dataset(format!(
                "τ table is incompatible with the move {s} → {k}: the new spectral flow {sf} is not integral"
            )));
        }
        new.sf = sf;
        new.label = rec.label.as_ref().map(|l| format!("{l}/{k}"));
        out.push(new);
    }
    Ok(out)
}

fn same_orbit(a: &OrbitRecord, b: &OrbitRecord, ds: &ModuliDataset) -> Result<bool> {
    if a.stratum != b.stratum {
        return Ok(false);
    }
    let mut ca = a.cs.clone();
    let mut cb = b.cs.clone();
    ca.sort();
    cb.sort();
    Ok(ca == cb && assemble_index(a, ds)? == assemble_index(b, ds)?)
}

/// Applies one move, returning the new dataset.
pub fn apply_bifurcation(ds: &ModuliDataset, mv: &DatasetMove, p: &Projector) -> Result<ModuliDataset> {
    ds.validate()?;
    let mut out = ds.clone();
    match mv {
        DatasetMove::Xi {
            record,
            irrep,
            direction,
        } => {
            let rec = ds
                .orbits
                .get(*record)
                .ok_or_else(|| Error::MismatchedMove(format!("no record {record}")))?;
            rec.stratum.check_label(*irrep)?;
            if irrep.is_trivial() {
                return Err(Error::MismatchedMove("bifurcations need a nontrivial irrep".into()));
            }
            match direction {
                Direction::Create => {
                    let ind = assemble_rep(rec, ds)?;
                    if ind.coeff(*irrep) < int(1) {
                        return Err(Error::MismatchedMove(format!(
                            "index {ind} has no whole unit of {irrep} to shed"
                        )));
                    }
                    let born = shed_records(rec, *irrep, ds, p)?;
                    out.orbits[*record].sf = rec.sf.with_added(*irrep, int(-1));
                    out.orbits.extend(born);
                }
                Direction::Annihilate => {
                    let born = shed_records(&with_unit(rec, *irrep), *irrep, ds, p)?;
                    let mut taken = vec![false; ds.orbits.len()];
                    taken[*record] = true;
                    for b in &born {
                        let hit = ds
                            .orbits
                            .iter()
                            .enumerate()
                            .position(|(i, r)| !taken[i] && same_orbit(r, b, ds).unwrap_or(false));
                        match hit {
                            Some(i) => taken[i] = true,
                            None => {
                                return Err(Error::MismatchedMove(format!(
                                    "no record with index {} to absorb into {}",
                                    assemble_index(b, ds)?,
                                    rec.stratum
                                )))
                            }
                        }
                    }
                    out.orbits[*record].sf = rec.sf.with_added(*irrep, int(1));
                    let mut i = 0;
                    out.orbits.retain(|_| {
                        let keep = i == *record || !taken[i];
                        i += 1;
                        keep
                    });
                }
            }
        }
        DatasetMove::BirthDeath {
            direction,
            template,
            pair,
        } => match direction {
            Direction::Create => {
                let t = template
                    .as_ref()
                    .ok_or_else(|| Error::MismatchedMove("a birth needs a template record".into()))?;
                t.validate()?;
                let mut upper = t.clone();
                upper.sf = t.sf.with_added(IrrepLabel::Triv, int(1));
                out.orbits.push(t.clone());
                out.orbits.push(upper);
            }
            Direction::Annihilate => {
                let (i, j) = pair.ok_or_else(|| Error::MismatchedMove("a death needs a record pair".into()))?;
                let (a, b) = match (ds.orbits.get(i), ds.orbits.get(j)) {
                    (Some(a), Some(b)) if i != j => (a, b),
                    _ => return Err(Error::MismatchedMove(format!("bad record pair ({i}, {j})"))),
                };
                let diff = if a.stratum == b.stratum && a.cs == b.cs {
                    Some(b.sf.sub(&a.sf)?)
                } else {
                    None
                };
                let one = RepElement::triv(&a.stratum, int(1));
                let ok = diff.as_ref().is_some_and(|d| *d == one || *d == one.scale(int(-1)));
                if !ok {
                    return Err(Error::MismatchedMove(
                        "a death pair must share stratum and CS data and differ by one trivial unit".into(),
                    ));
                }
                let (hi, lo) = (i.max(j), i.min(j));
                out.orbits.remove(hi);
                out.orbits.remove(lo);
            }
        },
    }
    Ok(out)
}

fn with_unit(rec: &OrbitRecord, v1: IrrepLabel) -> OrbitRecord {
    let mut r = rec.clone();
    r.sf = rec.sf.with_added(v1, int(1));
    r
}

/// Every `Xi` create move currently available, in record order.
pub fn available_creates(ds: &ModuliDataset, p: &Projector) -> Vec<DatasetMove> {
    let mut out = Vec::new();
    for (i, r) in ds.orbits.iter().enumerate() {
        let Ok(ind) = assemble_rep(r, ds) else { continue };
        for l in r.stratum.catalog() {
            if l.is_trivial() || ind.coeff(l) < int(1) {
                continue;
            }
            if sphere_index(&r.stratum, l, p.sphere_data()).is_ok() {
                out.push(DatasetMove::Xi {
                    record: i,
                    irrep: l,
                    direction: Direction::Create,
                });
            }
        }
    }
    out
}

/// Every `Xi` annihilate move currently available.
pub fn available_annihilates(ds: &ModuliDataset, p: &Projector) -> Vec<DatasetMove> {
    let mut out = Vec::new();
    for (i, r) in ds.orbits.iter().enumerate() {
        for l in r.stratum.catalog() {
            if l.is_trivial() {
                continue;
            }
            let mv = DatasetMove::Xi {
                record: i,
                irrep: l,
                direction: Direction::Annihilate,
            };
            if apply_bifurcation(ds, &mv, p).is_ok() {
                out.push(mv);
            }
        }
    }
    out
}

/// Whether two CycSums agree exactly, or numerically when reductions differ.
pub fn weights_agree(a: &CycSum, b: &CycSum) -> bool {
    a == b || a.approx_eq(b, 1e-12)
}

/// `|Σ|` bound used in reports.
pub fn abs_bound(x: &CycSum) -> Rational {
    x.terms().map(|(_, c)| c.abs()).sum()
}
