//! Formal representation algebra of the stabilizers: rational combinations of catalog
//! irreducibles, index classes up to conjugacy, and restriction along embeddings.
//!
//! Restriction multiplicities come from Monte-Carlo character inner products over
//! Haar samples of the subgroup, rounded to integers and cached per embedding.
//!
//! ```
//! use equicerf::repcat::{Branching, RepElement};
//! use equicerf::strata::{Embedding, IrrepLabel, Move, Stratum};
//! use equicerf::ringcore::int;
//!
//! let d = Stratum::of(&[(2, 2)]);
//! let w = Embedding::from_move(&d, &Move::Adjoint { p: 0, parts: vec![1, 1] }).unwrap();
//! let adj = RepElement::single(&d, IrrepLabel::Adj(0), int(1)).unwrap();
//! let r = Branching::default().restrict(&adj, &w).unwrap();
//! assert_eq!(r.dim(), int(3));
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{as_sun, character, character_norm, embed, sample_element, CMat, Element};
use crate::ringcore::{format_rational, int, parse_rational, FreeAbelian, Rational};
use crate::strata::{perp_decomposition, Embedding, GroupDescriptor, IrrepLabel, Stratum};

/// Embedding witness `H_σ′ ↪ H_σ` produced by a chain of stabilizer moves.
pub type EmbeddingWitness = Embedding;

/// Element of `R(H_σ) ⊗ ℚ` in the catalog basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepElement {
    stratum: Stratum,
    coeffs: BTreeMap<IrrepLabel, Rational>,
}

impl RepElement {
    pub fn zero(s: &Stratum) -> Self {
        RepElement {
            stratum: s.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn new(s: &Stratum, terms: impl IntoIterator<Item = (IrrepLabel, Rational)>) -> Result<Self> {
        let mut out = Self::zero(s);
        for (l, c) in terms {
            s.check_label(l)?;
            out.add_term(l, c);
        }
        Ok(out)
    }

    pub fn single(s: &Stratum, l: IrrepLabel, c: Rational) -> Result<Self> {
        Self::new(s, [(l, c)])
    }

    pub fn triv(s: &Stratum, c: Rational) -> Self {
        Self::new(s, [(IrrepLabel::Triv, c)]).expect("triv is always in the catalog")
    }

    pub fn stratum(&self) -> &Stratum {
        &self.stratum
    }

    pub fn group(&self) -> GroupDescriptor {
        self.stratum.group()
    }

    fn add_term(&mut self, l: IrrepLabel, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(l).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&l);
        }
    }

    pub fn with_added(&self, l: IrrepLabel, c: Rational) -> Self {
        let mut out = self.clone();
        out.add_term(l, c);
        out
    }

    pub fn coeff(&self, l: IrrepLabel) -> Rational {
        self.coeffs.get(&l).copied().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (IrrepLabel, Rational)> + '_ {
        self.coeffs.iter().map(|(l, c)| (*l, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn scale(&self, c: Rational) -> Self {
        let mut out = Self::zero(&self.stratum);
        for (l, v) in &self.coeffs {
            out.add_term(*l, *v * c);
        }
        out
    }

    pub fn add(&self, other: &RepElement) -> Result<Self> {
        self.same_group(other)?;
        let mut out = self.clone();
        for (l, v) in &other.coeffs {
            out.add_term(*l, *v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &RepElement) -> Result<Self> {
        self.add(&other.scale(int(-1)))
    }

    fn same_group(&self, other: &RepElement) -> Result<()> {
        if self.stratum != other.stratum {
            return Err(Error::Incompatible(format!(
                "representations of {} and {}",
                self.stratum, other.stratum
            )));
        }
        Ok(())
    }

    /// Formal real dimension `Σ coeff·real_dim`.
    pub fn dim(&self) -> Rational {
        self.coeffs
            .iter()
            .map(|(l, c)| *c * int(self.stratum.real_dim(*l) as i64))
            .sum()
    }

    /// Relabels factors by `perm` (a symmetry of the stratum).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(&self.stratum);
        for (l, c) in &self.coeffs {
            let l2 = match *l {
                IrrepLabel::Triv => IrrepLabel::Triv,
                IrrepLabel::Adj(p) => IrrepLabel::Adj(perm[p]),
                IrrepLabel::Std(p, q) => {
                    let (a, b) = (perm[p], perm[q]);
                    IrrepLabel::Std(a.min(b), a.max(b))
                }
            };
            out.add_term(l2, *c);
        }
        out
    }
}

/// Formal dimension of a representation element.
pub fn dim_of(x: &RepElement) -> Rational {
    x.dim()
}

impl fmt::Display for RepElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, ", self.stratum)?;
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (l, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·{}", format_rational(c), l)?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for RepElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct RepJson {
    group: Stratum,
    #[serde(default)]
    coeffs: BTreeMap<String, RationalJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RationalJson {
    Str(String),
    Int(i64),
}

impl Serialize for RepElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RepJson {
            group: self.stratum.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(l, c)| (l.to_string(), RationalJson::Str(format_rational(c))))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RepElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RepJson::deserialize(d)?;
        let mut out = RepElement::zero(&raw.group);
        for (k, v) in raw.coeffs {
            let l: IrrepLabel = k.parse().map_err(D::Error::custom)?;
            raw.group.check_label(l).map_err(D::Error::custom)?;
            let c = match v {
                RationalJson::Str(s) => parse_rational(&s).map_err(D::Error::custom)?,
                RationalJson::Int(i) => int(i),
            };
            out.add_term(l, c);
        }
        Ok(out)
    }
}

/// A point of the quotient: a representation element up to SU(n)-conjugacy.
///
/// Conjugacy is resolved by taking the least relabeling under permutations of
/// identical `(rank, mult)` factors, which are realized by SU(n) elements normalizing `H_σ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct IndexClass {
    rep: RepElement,
}

impl IndexClass {
    pub fn new(rep: RepElement) -> Self {
        let perms = rep.stratum.symmetries();
        let rep = if perms.len() == 1 {
            rep
        } else {
            perms.iter().map(|p| rep.permuted(p)).min().expect("identity present")
        };
        IndexClass { rep }
    }

    /// `[H_σ, 0]`.
    pub fn zero_rep(s: &Stratum) -> Self {
        IndexClass::new(RepElement::zero(s))
    }

    pub fn rep(&self) -> &RepElement {
        &self.rep
    }

    pub fn stratum(&self) -> &Stratum {
        &self.rep.stratum
    }

    pub fn group(&self) -> GroupDescriptor {
        self.rep.group()
    }

    /// All coefficients in `[0,1)`.
    pub fn is_normal_form(&self) -> bool {
        self.rep.coeffs.values().all(|c| *c >= Rational::zero() && *c < int(1))
    }
}

impl<'de> Deserialize<'de> for IndexClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(IndexClass::new(RepElement::deserialize(d)?))
    }
}

impl fmt::Display for IndexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.rep, f)
    }
}

impl fmt::Debug for IndexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.rep, f)
    }
}

/// Integer combination of index classes.
pub type TotalIndex = FreeAbelian<IndexClass, i64>;

pub fn class_of(rep: RepElement) -> TotalIndex {
    TotalIndex::basis(IndexClass::new(rep))
}

pub fn format_total(x: &TotalIndex) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (k, c)) in x.iter().enumerate() {
        if i > 0 {
            s.push_str(if *c < 0 { " - " } else { " + " });
        } else if *c < 0 {
            s.push('-');
        }
        let a = c.abs();
        if a != 1 {
            s.push_str(&format!("{a}·"));
        }
        s.push_str(&k.to_string());
    }
    s
}

#[derive(Serialize, Deserialize)]
struct TotalTerm {
    class: IndexClass,
    coeff: i64,
}

pub fn total_to_json(x: &TotalIndex) -> serde_json::Value {
    let terms: Vec<TotalTerm> = x
        .iter()
        .map(|(k, c)| TotalTerm {
            class: k.clone(),
            coeff: *c,
        })
        .collect();
    serde_json::to_value(terms).expect("serializable")
}

pub fn total_from_json(v: &serde_json::Value) -> Result<TotalIndex> {
    let terms: Vec<TotalTerm> = serde_json::from_value(v.clone())?;
    Ok(terms.into_iter().map(|t| (t.class, t.coeff)).collect())
}

/// Restriction rows of every catalog irrep of the source along one embedding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchRows {
    pub rows: BTreeMap<IrrepLabel, BTreeMap<IrrepLabel, u32>>,
    /// Largest distance of a raw estimate from its rounded value.
    pub residual: OrderedF64,
    pub samples: usize,
}

/// `f64` wrapper so reports can derive `Eq`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct OrderedF64(pub f64);
impl Eq for OrderedF64 {}

/// Numeric branching oracle with an exact cache.
pub struct Branching {
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_doublings: u32,
    cache: Mutex<HashMap<Embedding, Arc<BranchRows>>>,
}

impl Default for Branching {
    /// 20000 samples unless `EQUICERF_SAMPLES` says otherwise; fixed seed.
    fn default() -> Self {
        let samples = std::env::var("EQUICERF_SAMPLES")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(20_000);
        Branching::new(samples, 0x5eed)
    }
}

impl Branching {
    pub fn new(samples: usize, seed: u64) -> Self {
        Branching {
            samples: samples.max(100),
            seed,
            tolerance: 0.05,
            max_doublings: 4,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn shared() -> Arc<Branching> {
        Arc::new(Branching::default())
    }

    /// Restriction rows for `e`, computed once.
    pub fn rows(&self, e: &Embedding) -> Result<Arc<BranchRows>> {
        if let Some(r) = self.cache.lock().expect("cache lock").get(e) {
            return Ok(r.clone());
        }
        let rows = Arc::new(self.compute_rows(e)?);
        self.cache
            .lock()
            .expect("cache lock")
            .entry(e.clone())
            .or_insert(rows.clone());
        Ok(rows)
    }

    fn compute_rows(&self, e: &Embedding) -> Result<BranchRows> {
        let src = e.source.catalog();
        let tgt = e.target.catalog();
        let key = fnv(&format!("{e:?}"));
        let mut n = self.samples;
        for attempt in 0..=self.max_doublings {
            let sums = pair_sums(&e.target, n, self.seed ^ key ^ attempt as u64, |h| {
                let g = embed(e, h);
                let a: Vec<f64> = src.iter().map(|l| character(*l, &g)).collect();
                let b: Vec<f64> = tgt.iter().map(|l| character(*l, h)).collect();
                (a, b)
            });
            let mut residual: f64 = 0.0;
            let mut rows = BTreeMap::new();
            for (i, v) in src.iter().enumerate() {
                let mut row = BTreeMap::new();
                for (j, w) in tgt.iter().enumerate() {
                    let est = sums[(i, j)] / n as f64 / character_norm(*w);
                    let r = est.round();
                    residual = residual.max((est - r).abs());
                    if r < -0.5 {
                        residual = f64::INFINITY;
                    }
                    if r >= 0.5 {
                        row.insert(*w, r as u32);
                    }
                }
                rows.insert(*v, row);
            }
            if residual < self.tolerance {
                for (v, row) in &rows {
                    let d: u32 = row.iter().map(|(w, m)| m * e.target.real_dim(*w)).sum();
                    if d != e.source.real_dim(*v) {
                        return Err(Error::Oracle(format!(
                            "restriction of {v} along {} ← {} has dimension {d}, expected {}; the catalog is not closed here",
                            e.source,
                            e.target,
                            e.source.real_dim(*v)
                        )));
                    }
                }
                return Ok(BranchRows {
                    rows,
                    residual: OrderedF64(residual),
                    samples: n,
                });
            }
            if attempt == self.max_doublings {
                return Err(Error::Oracle(format!(
                    "branching {} ← {} residual {residual:.3} after {n} samples",
                    e.source, e.target
                )));
            }
            n *= 2;
        }
        unreachable!()
    }

    /// Restriction of `x` along `e`, extended linearly.
    pub fn restrict(&self, x: &RepElement, e: &Embedding) -> Result<RepElement> {
        if x.stratum != e.source {
            return Err(Error::Incompatible(format!(
                "restricting a representation of {} along an embedding from {}",
                x.stratum, e.source
            )));
        }
        if e.is_identity() {
            return Ok(x.clone());
        }
        let mut out = RepElement::zero(&e.target);
        if x.terms().all(|(l, _)| l.is_trivial()) {
            out.add_term(IrrepLabel::Triv, x.coeff(IrrepLabel::Triv));
            return Ok(out);
        }
        let rows = self.rows(e)?;
        for (l, c) in x.terms() {
            for (w, m) in &rows.rows[&l] {
                out.add_term(*w, c * int(*m as i64));
            }
        }
        Ok(out)
    }

    pub fn cached_embeddings(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

/// `c ⊕ v`: adds the restriction of `v` to the class representative `c`.
///
/// `c` is read in the target frame of `w` (factor order of `w.target`), so callers
/// pass the frame-consistent representative, not a conjugacy-reduced one.
pub fn oplus(c: &RepElement, v: &RepElement, w: &Embedding, br: &Branching) -> Result<RepElement> {
    if c.stratum != w.target {
        return Err(Error::Incompatible(format!(
            "class on {} but witness targets {}",
            c.stratum, w.target
        )));
    }
    c.add(&br.restrict(v, w)?)
}

fn fnv(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Sums of products `a_i(h)·b_j(h)` over Haar samples of `H_σ`, split into
/// fixed-size chunks with independent ChaCha streams.
fn pair_sums<F>(s: &Stratum, n: usize, seed: u64, f: F) -> DMatrix<f64>
where
    F: Fn(&Element) -> (Vec<f64>, Vec<f64>) + Sync,
{
    const CHUNK: usize = 1000;
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<DMatrix<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(n - c * CHUNK);
            let mut acc: Option<DMatrix<f64>> = None;
            for _ in 0..count {
                let h = sample_element(s, &mut rng);
                let (a, b) = f(&h);
                let m = acc.get_or_insert_with(|| DMatrix::zeros(a.len(), b.len()));
                for (i, ai) in a.iter().enumerate() {
                    for (j, bj) in b.iter().enumerate() {
                        m[(i, j)] += ai * bj;
                    }
                }
            }
            acc.unwrap_or_else(|| DMatrix::zeros(0, 0))
        })
        .collect();
    let mut total = partial[0].clone();
    for p in &partial[1..] {
        total += p;
    }
    total
}

/// Estimated Gram matrix of the catalog characters of `H_σ`, normalized so the
/// ideal answer is the identity.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub labels: Vec<IrrepLabel>,
    pub gram: DMatrix<f64>,
    pub residual: f64,
}

pub fn haar_characters(s: &Stratum, samples: usize, seed: u64) -> Result<CharacterTable> {
    if s.n() > 6 {
        return Err(Error::Unsupported(format!(
            "character tables are limited to n ≤ 6, got {}",
            s.n()
        )));
    }
    let labels = s.catalog();
    let sums = pair_sums(s, samples, seed ^ fnv(&s.to_string()), |h| {
        let a: Vec<f64> = labels.iter().map(|l| character(*l, h)).collect();
        (a.clone(), a)
    });
    let k = labels.len();
    let mut gram = DMatrix::zeros(k, k);
    let mut residual: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let norm = (character_norm(labels[i]) * character_norm(labels[j])).sqrt();
            gram[(i, j)] = sums[(i, j)] / samples as f64 / norm;
            let want = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((gram[(i, j)] - want).abs());
        }
    }
    if residual > 0.05 {
        return Err(Error::Oracle(format!(
            "character orthonormality residual {residual:.3} on {s}"
        )));
    }
    Ok(CharacterTable { labels, gram, residual })
}

/// Haar estimate of the dimension of the `H_σ`-fixed subspace of `su(n)`.
///
/// Averages `g ⊗ ḡ` (the action on `gl_n(ℂ)`), whose mean is the projector onto the
/// commutant; its squared Frobenius norm is the commutant's complex dimension, which
/// equals the real dimension of the fixed part of `u(n)`.
#[derive(Clone, Copy, Debug)]
pub struct FixedDimEstimate {
    pub raw: f64,
    pub rounded: u32,
    pub residual: f64,
}

pub fn haar_fixed_dimension(s: &Stratum, samples: usize, seed: u64) -> FixedDimEstimate {
    const CHUNK: usize = 500;
    let n = s.n() as usize;
    let chunks = samples.div_ceil(CHUNK);
    let seed = seed ^ fnv(&format!("fixed{s}"));
    let sum = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let mut acc = CMat::zeros(n * n, n * n);
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let g = as_sun(s, &sample_element(s, &mut rng));
                acc += g.kronecker(&g.map(|z| z.conj()));
            }
            acc
        })
        .reduce(|| CMat::zeros(n * n, n * n), |a, b| a + b);
    let p = sum / Complex64::new(samples as f64, 0.0);
    let raw = p.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0;
    let rounded = raw.round().max(0.0) as u32;
    FixedDimEstimate {
        raw,
        rounded,
        residual: (raw - rounded as f64).abs(),
    }
}

/// `(n²−1) − Σ real_dim·count` over the perpendicular decomposition.
pub fn predicted_fixed_dimension(s: &Stratum) -> u32 {
    let n = s.n();
    let perp: u32 = perp_decomposition(s).iter().map(|(l, c)| s.real_dim(*l) * c).sum();
    n * n - 1 - perp
}

/// `(r−1)·Triv + Σ_{m_p≥2} Adj(p)`: the adjoint representation of `H_σ` on its Lie algebra.
pub fn kernel_rep(s: &Stratum) -> RepElement {
    let mut terms = vec![(IrrepLabel::Triv, int(s.len() as i64 - 1))];
    for (p, f) in s.factors().iter().enumerate() {
        if f.mult >= 2 {
            terms.push((IrrepLabel::Adj(p), int(1)));
        }
    }
    RepElement::new(s, terms).expect("catalog labels")
}

/// Converts a rational to `f64`, for reports.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
