//! Bifurcation generators, the projection onto normal-form classes, and weights.
//!
//! An irreducible bifurcation along a nontrivial irrep `V₁` of `H` trades the class
//! `[H, V₁ ⊕ V′]` for `[H, V′] + Σ [K, ρ_K ⊕ ℝ ⊕ V′|_K]`, the sum running over the
//! critical orbits of an invariant Morse function `g` on the unit sphere of `V₁`.
//! A birth-death trades nothing for `[H, W] + [H, W ⊕ ℝ]`. [`Projector`] rewrites a
//! total index modulo these relations until every coefficient lies in `[0,1)`.
//!
//! ```
//! use equicerf::bifgroup::{su4_generators, Projector};
//!
//! let p = Projector::builtin();
//! for g in su4_generators(p.branching()).unwrap() {
//!     assert!(p.project(&g.value).unwrap().is_zero());
//! }
//! ```

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::repcat::{Branching, IndexClass, RepElement, TotalIndex};
use crate::ringcore::{floor_int, int, phase_weight, CycSum, Rational};
use crate::strata::{Embedding, IrrepLabel, Move, Stratum};

pub use crate::strata::m_less;

/// One critical orbit of `g` on the unit sphere: stabilizer inclusion and index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatumTerm {
    pub embedding: Embedding,
    /// Equivariant index, in the factor order of `embedding.target`.
    pub rep: RepElement,
    pub coeff: i64,
}

/// Total index of an `H`-Morse function on the unit sphere of `V₁`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereMorseDatum {
    pub stratum: Stratum,
    pub v1: IrrepLabel,
    pub terms: Vec<DatumTerm>,
}

impl SphereMorseDatum {
    pub fn new(stratum: &Stratum, v1: IrrepLabel, terms: Vec<DatumTerm>) -> Result<Self> {
        stratum.check_label(v1)?;
        if v1.is_trivial() {
            return Err(Error::Incompatible("sphere data need a nontrivial irrep".into()));
        }
        let h = stratum.group();
        for t in &terms {
            if &t.embedding.source != stratum || t.rep.stratum() != &t.embedding.target {
                return Err(Error::Incompatible(format!(
                    "datum term {} does not sit below {stratum}",
                    t.rep
                )));
            }
            if !m_less(&t.embedding.target.group(), &h) {
                return Err(Error::Incompatible(format!(
                    "datum class on {} does not have smaller m than {stratum}",
                    t.embedding.target
                )));
            }
        }
        Ok(SphereMorseDatum {
            stratum: stratum.clone(),
            v1,
            terms,
        })
    }

    /// `ind g` as a total index.
    pub fn index(&self) -> TotalIndex {
        self.terms
            .iter()
            .map(|t| (IndexClass::new(t.rep.clone()), t.coeff))
            .collect()
    }
}

/// Whether `H_σ` is transitive on the unit sphere of `V₁`: `Adj(p)` with `m_p = 2`
/// (`U(2)` on `S²`) or `Std(p,q)` with `min(m_p,m_q) = 1` (`U(m)` on `S^{2m−1}`).
pub fn transitive_move(s: &Stratum, v1: IrrepLabel) -> Option<Move> {
    match v1 {
        IrrepLabel::Adj(p) if s.factor(p).mult == 2 => Some(Move::Adjoint { p, parts: vec![1, 1] }),
        IrrepLabel::Std(p, q) if s.factor(p).mult.min(s.factor(q).mult) == 1 => Some(Move::OffDiag {
            p,
            q,
            sv_parts: vec![1],
            zero: 0,
        }),
        _ => None,
    }
}

/// Registry of sphere data for non-transitive cases.
#[derive(Clone, Debug, Default)]
pub struct SphereData {
    entries: BTreeMap<(Stratum, IrrepLabel), SphereMorseDatum>,
}

#[derive(Serialize, Deserialize)]
struct DatumTermJson {
    class: RepElement,
    coeff: i64,
    #[serde(default, rename = "move")]
    mv: Option<Move>,
}

#[derive(Serialize, Deserialize)]
struct DatumJson {
    group: Stratum,
    irrep: IrrepLabel,
    index: Vec<DatumTermJson>,
}

impl SphereData {
    pub fn insert(&mut self, d: SphereMorseDatum) {
        self.entries.insert((d.stratum.clone(), d.v1), d);
    }

    pub fn get(&self, s: &Stratum, v1: IrrepLabel) -> Option<&SphereMorseDatum> {
        self.entries.get(&(s.clone(), v1))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `[{group, irrep, index: [{class, coeff, move?}]}]`. Without an explicit
    /// move, the unique move on `irrep` whose stabilizer is the class's group is used.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<DatumJson> = serde_json::from_str(text)?;
        let mut out = SphereData::default();
        for (i, d) in raw.into_iter().enumerate() {
            let mut terms = Vec::new();
            for (j, t) in d.index.into_iter().enumerate() {
                let field = format!("[{i}].index[{j}]");
                let mv = match t.mv {
                    Some(mv) => mv,
                    None => {
                        let cands: Vec<Move> = crate::strata::all_moves(&d.group)
                            .into_iter()
                            .filter(|m| m.label() == d.irrep)
                            .filter(|m| Embedding::from_move(&d.group, m).is_ok_and(|e| &e.target == t.class.stratum()))
                            .collect();
                        match cands.as_slice() {
                            [one] => one.clone(),
                            [] => {
                                return Err(Error::Schema {
                                    field,
                                    msg: format!(
                                        "no stabilizer of {} on {} is {}",
                                        d.irrep,
                                        d.group,
                                        t.class.stratum()
                                    ),
                                })
                            }
                            _ => {
                                return Err(Error::Schema {
                                    field,
                                    msg: "several moves give this stabilizer; add a \"move\" field".into(),
                                })
                            }
                        }
                    }
                };
                if mv.label() != d.irrep {
                    return Err(Error::Schema {
                        field,
                        msg: format!("move {mv} is not on {}", d.irrep),
                    });
                }
                let embedding = Embedding::from_move(&d.group, &mv)?;
                terms.push(DatumTerm {
                    embedding,
                    rep: t.class,
                    coeff: t.coeff,
                });
            }
            out.insert(SphereMorseDatum::new(&d.group, d.irrep, terms)?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw: Vec<DatumJson> = self
            .entries
            .values()
            .map(|d| DatumJson {
                group: d.stratum.clone(),
                irrep: d.v1,
                index: d
                    .terms
                    .iter()
                    .map(|t| DatumTermJson {
                        class: t.rep.clone(),
                        coeff: t.coeff,
                        mv: t.embedding.moves.first().cloned(),
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_value(raw).expect("serializable")
    }
}

/// Sphere datum for `(H_σ, V₁)`: built in when transitive, else looked up in `data`.
pub fn sphere_index(s: &Stratum, v1: IrrepLabel, data: &SphereData) -> Result<SphereMorseDatum> {
    s.check_label(v1)?;
    if v1.is_trivial() {
        return Err(Error::Incompatible("sphere data need a nontrivial irrep".into()));
    }
    if let Some(d) = data.get(s, v1) {
        return Ok(d.clone());
    }
    match transitive_move(s, v1) {
        Some(mv) => {
            let e = Embedding::from_move(s, &mv)?;
            let rep = RepElement::zero(&e.target);
            SphereMorseDatum::new(
                s,
                v1,
                vec![DatumTerm {
                    embedding: e,
                    rep,
                    coeff: 1,
                }],
            )
        }
        None => Err(Error::SphereDatumRequired {
            stratum: s.to_string(),
            label: v1.to_string(),
        }),
    }
}

/// The two sides of a bifurcation: `ξ⁻` before (`t<0`), `ξ⁺` after (`t>0`).
pub fn xi_sides(
    s: &Stratum,
    v1: IrrepLabel,
    v_prime: &RepElement,
    datum: &SphereMorseDatum,
    br: &Branching,
) -> Result<(TotalIndex, TotalIndex)> {
    if datum.stratum != *s || datum.v1 != v1 {
        return Err(Error::Incompatible(format!(
            "datum for {} on {} used with {v1} on {s}",
            datum.v1, datum.stratum
        )));
    }
    if v_prime.stratum() != s {
        return Err(Error::Incompatible(format!(
            "V′ is a representation of {}",
            v_prime.stratum()
        )));
    }
    let minus = TotalIndex::basis(IndexClass::new(v_prime.with_added(v1, int(1))));
    let mut plus = TotalIndex::basis(IndexClass::new(v_prime.clone()));
    for t in &datum.terms {
        let r = t
            .rep
            .with_added(IrrepLabel::Triv, int(1))
            .add(&br.restrict(v_prime, &t.embedding)?)?;
        plus.add_term(IndexClass::new(r), t.coeff);
    }
    Ok((minus, plus))
}

/// `ξ_H(V₁, V′, g) = ξ⁻ − ξ⁺`.
pub fn xi(
    s: &Stratum,
    v1: IrrepLabel,
    v_prime: &RepElement,
    datum: &SphereMorseDatum,
    br: &Branching,
) -> Result<TotalIndex> {
    let (m, p) = xi_sides(s, v1, v_prime, datum, br)?;
    Ok(&m - &p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Xi {
        stratum: Stratum,
        v1: IrrepLabel,
        v_prime: RepElement,
        datum: SphereMorseDatum,
    },
    BirthDeath {
        class: RepElement,
    },
}

/// An element of the bifurcation subgroup together with how it arose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub value: TotalIndex,
}

impl Generator {
    pub fn xi(
        s: &Stratum,
        v1: IrrepLabel,
        v_prime: &RepElement,
        datum: &SphereMorseDatum,
        br: &Branching,
    ) -> Result<Self> {
        Ok(Generator {
            value: xi(s, v1, v_prime, datum, br)?,
            kind: GeneratorKind::Xi {
                stratum: s.clone(),
                v1,
                v_prime: v_prime.clone(),
                datum: datum.clone(),
            },
        })
    }

    /// `[H, W] + [H, W ⊕ ℝ]`.
    pub fn birth_death(class: &RepElement) -> Self {
        let mut value = TotalIndex::basis(IndexClass::new(class.clone()));
        value.add_term(IndexClass::new(class.with_added(IrrepLabel::Triv, int(1))), 1);
        Generator {
            kind: GeneratorKind::BirthDeath { class: class.clone() },
            value,
        }
    }
}

/// The SU(4) generators with `V′ = 0`, in the order
/// `((1,1),(3,1))`, `((2,1),(2,1))`, `((2,2))`, `((1,2),(2,1))`.
pub fn su4_generators(br: &Branching) -> Result<Vec<Generator>> {
    let cases = [
        (Stratum::of(&[(1, 1), (3, 1)]), IrrepLabel::Std(0, 1)),
        (Stratum::of(&[(2, 1), (2, 1)]), IrrepLabel::Std(0, 1)),
        (Stratum::of(&[(2, 2)]), IrrepLabel::Adj(0)),
        (Stratum::of(&[(1, 2), (2, 1)]), IrrepLabel::Std(0, 1)),
    ];
    let none = SphereData::default();
    cases
        .iter()
        .map(|(s, v)| {
            let d = sphere_index(s, *v, &none)?;
            Generator::xi(s, *v, &RepElement::zero(s), &d, br)
        })
        .collect()
}

/// Which nontrivial irrep the projection strips first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    /// Smallest label first.
    First,
    /// Pseudo-random choice keyed by the class and a seed.
    Shuffled(u64),
}

/// Memoized projection onto normal-form classes.
pub struct Projector {
    br: Arc<Branching>,
    data: SphereData,
    selection: Selection,
    pub depth_limit: usize,
    memo: Mutex<HashMap<IndexClass, TotalIndex>>,
}

impl Projector {
    pub fn new(br: Arc<Branching>, data: SphereData) -> Self {
        Projector {
            br,
            data,
            selection: Selection::First,
            depth_limit: 512,
            memo: Mutex::new(HashMap::new()),
        }
    }

    /// Transitive sphere data only, default branching.
    pub fn builtin() -> Self {
        Self::new(Branching::shared(), SphereData::default())
    }

    pub fn with_selection(mut self, selection: Selection) -> Self {
        self.selection = selection;
        self
    }

    pub fn branching(&self) -> &Branching {
        &self.br
    }

    pub fn branching_arc(&self) -> Arc<Branching> {
        self.br.clone()
    }

    pub fn sphere_data(&self) -> &SphereData {
        &self.data
    }

    pub fn project(&self, x: &TotalIndex) -> Result<TotalIndex> {
        let mut out = TotalIndex::zero();
        for (c, k) in x.iter() {
            out.add_scaled(&self.project_class(c, 0)?, *k);
        }
        Ok(out)
    }

    pub fn project_rep(&self, rep: &RepElement) -> Result<TotalIndex> {
        self.project_class(&IndexClass::new(rep.clone()), 0)
    }

    fn project_class(&self, c: &IndexClass, depth: usize) -> Result<TotalIndex> {
        if depth > self.depth_limit {
            return Err(Error::DepthExceeded(c.to_string()));
        }
        if let Some(v) = self.memo.lock().expect("memo lock").get(c) {
            return Ok(v.clone());
        }
        let out = self.reduce(c, depth)?;
        self.memo.lock().expect("memo lock").insert(c.clone(), out.clone());
        Ok(out)
    }

    fn reduce(&self, c: &IndexClass, depth: usize) -> Result<TotalIndex> {
        if c.is_normal_form() {
            return Ok(TotalIndex::basis(c.clone()));
        }
        let rep = c.rep();
        let s = c.stratum();
        let outside = |a: &Rational| *a < Rational::zero() || *a >= int(1);
        let candidates: Vec<IrrepLabel> = rep
            .terms()
            .filter(|(l, a)| !l.is_trivial() && outside(a))
            .map(|(l, _)| l)
            .collect();
        let rec = |r: RepElement| self.project_class(&IndexClass::new(r), depth + 1);
        if candidates.is_empty() {
            // only the trivial coefficient is out of range: each whole unit flips the sign
            let k = floor_int(&rep.coeff(IrrepLabel::Triv));
            let rest = rep.with_added(IrrepLabel::Triv, int(-k));
            let sign = if k % 2 == 0 { 1 } else { -1 };
            return Ok(rec(rest)?.scale(sign));
        }
        let v = match self.selection {
            Selection::First => candidates[0],
            Selection::Shuffled(seed) => {
                let h = fnv_mix(seed, &c.to_string());
                candidates[(h % candidates.len() as u64) as usize]
            }
        };
        let datum = sphere_index(s, v, &self.data)?;
        let a = rep.coeff(v);
        // p([H, V′ ⊕ V]) = p([H, V′]) + Σ p([K, ρ_K ⊕ ℝ ⊕ V′|_K])
        let (v_prime, sign) = if a >= int(1) {
            (rep.with_added(v, int(-1)), 1)
        } else {
            (rep.clone(), -1)
        };
        let mut out = if sign == 1 {
            rec(v_prime.clone())?
        } else {
            rec(rep.with_added(v, int(1)))?
        };
        for t in &datum.terms {
            let r = t
                .rep
                .with_added(IrrepLabel::Triv, int(1))
                .add(&self.br.restrict(&v_prime, &t.embedding)?)?;
            out.add_scaled(&rec(r)?, sign * t.coeff);
        }
        Ok(out)
    }
}

fn fnv_mix(seed: u64, s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325 ^ seed;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h ^ (h >> 29)
}

/// What to do for a normal-form class missing from the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    Error,
    Zero,
}

/// Base weights on normal-form classes. Classes on irreducible strata `((n,1))`
/// default to `e^{iπa}`, `a` the trivial coefficient, unless the table overrides them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseWeights {
    pub table: BTreeMap<IndexClass, CycSum>,
    pub fallback: Fallback,
}

#[derive(Serialize, Deserialize)]
struct WeightEntryJson {
    class: IndexClass,
    weight: CycSum,
}

impl Default for BaseWeights {
    fn default() -> Self {
        BaseWeights {
            table: BTreeMap::new(),
            fallback: Fallback::Error,
        }
    }
}

impl BaseWeights {
    pub fn with_fallback(fallback: Fallback) -> Self {
        BaseWeights {
            table: BTreeMap::new(),
            fallback,
        }
    }

    pub fn set(&mut self, class: IndexClass, w: CycSum) {
        self.table.insert(class, w);
    }

    pub fn get(&self, c: &IndexClass) -> Result<CycSum> {
        if let Some(w) = self.table.get(c) {
            return Ok(w.clone());
        }
        if c.stratum().is_irreducible() {
            return Ok(phase_weight(c.rep().coeff(IrrepLabel::Triv)));
        }
        match self.fallback {
            Fallback::Zero => Ok(CycSum::zero()),
            Fallback::Error => Err(Error::MissingWeight(c.to_string())),
        }
    }

    /// Parses `[{class, weight}]`; missing classes are an error.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<WeightEntryJson> = serde_json::from_str(text)?;
        let mut out = BaseWeights::default();
        for e in raw {
            if !e.class.is_normal_form() {
                return Err(Error::Schema {
                    field: "class".into(),
                    msg: format!("{} is not a normal-form class", e.class),
                });
            }
            out.set(e.class, e.weight);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw: Vec<WeightEntryJson> = self
            .table
            .iter()
            .map(|(c, w)| WeightEntryJson {
                class: c.clone(),
                weight: w.clone(),
            })
            .collect();
        serde_json::to_value(raw).expect("serializable")
    }
}

/// `w(x) = Σ coeff·base(class)` over `project(x)`.
pub fn weight(x: &TotalIndex, base: &BaseWeights, p: &Projector) -> Result<CycSum> {
    let mut out = CycSum::zero();
    for (c, k) in p.project(x)?.iter() {
        out += &base.get(c)?.scale(int(*k));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ringcore::rat;

    fn small() -> Projector {
        Projector::new(Arc::new(Branching::new(20_000, 9)), SphereData::default())
    }

    #[test]
    fn transitive_data() {
        let none = SphereData::default();
        let c = Stratum::of(&[(2, 1), (2, 1)]);
        let d = sphere_index(&c, IrrepLabel::Std(0, 1), &none).unwrap();
        assert_eq!(
            d.index(),
            TotalIndex::basis(IndexClass::zero_rep(&Stratum::of(&[(4, 1)])))
        );
        let dd = sphere_index(&Stratum::of(&[(2, 2)]), IrrepLabel::Adj(0), &none).unwrap();
        assert_eq!(dd.index(), TotalIndex::basis(IndexClass::zero_rep(&c)));
        let s5 = Stratum::of(&[(1, 2), (1, 3)]);
        assert!(matches!(
            sphere_index(&s5, IrrepLabel::Std(0, 1), &none),
            Err(Error::SphereDatumRequired { .. })
        ));
    }

    #[test]
    fn trivial_units_flip_sign() {
        let p = small();
        let a = Stratum::of(&[(4, 1)]);
        let got = p.project_rep(&RepElement::triv(&a, rat(3, 2))).unwrap();
        let want = TotalIndex::single(IndexClass::new(RepElement::triv(&a, rat(1, 2))), -1);
        assert_eq!(got, want);
    }

    #[test]
    fn one_adjoint_unit() {
        let p = small();
        let d = Stratum::of(&[(2, 2)]);
        let c = Stratum::of(&[(2, 1), (2, 1)]);
        let got = p
            .project_rep(&RepElement::single(&d, IrrepLabel::Adj(0), int(1)).unwrap())
            .unwrap();
        let mut want = TotalIndex::basis(IndexClass::zero_rep(&d));
        want.add_term(IndexClass::zero_rep(&c), -1);
        assert_eq!(got, want);
    }

    #[test]
    fn weights_default_on_irreducible() {
        let base = BaseWeights::default();
        let a = IndexClass::new(RepElement::triv(&Stratum::of(&[(3, 1)]), rat(1, 3)));
        assert_eq!(base.get(&a).unwrap(), phase_weight(rat(1, 3)));
        let c = IndexClass::zero_rep(&Stratum::of(&[(2, 2)]));
        assert!(matches!(base.get(&c), Err(Error::MissingWeight(_))));
    }
}
