//! Finite-dimensional equivariant Morse engine on representation balls.
//!
//! Critical points are found by multi-start damped Newton in ambient coordinates, with
//! each step confined to the normal complement of the orbit. Each critical point is
//! identified by its orbit invariants, its stabilizer is read off a normal form, and the
//! negative eigenspace of the Hessian normal to the orbit is decomposed into catalog
//! irreps of the stabilizer by fitting characters on sampled stabilizer elements.
//!
//! ```
//! use equicerf::morse::{bifurcation_family, finite_total_index, ModelSpace, SearchOptions};
//!
//! let space = ModelSpace::z2_line(1.0);
//! let before = bifurcation_family(&space, 0, &[], None, -0.5).unwrap();
//! let after = bifurcation_family(&space, 0, &[], None, 0.5).unwrap();
//! let opts = SearchOptions::default();
//! assert_eq!(finite_total_index(&space, before.as_ref(), &opts).unwrap().len(), 1);
//! assert_eq!(finite_total_index(&space, after.as_ref(), &opts).unwrap().len(), 2);
//! ```

pub mod functions;
pub mod space;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::bifgroup::{DatumTerm, SphereMorseDatum};
use crate::error::{Error, Result};
use crate::group::{character, sample_element};
use crate::repcat::{IndexClass, RepElement, TotalIndex};
use crate::ringcore::{int, FreeAbelian};
use crate::strata::{Embedding, IrrepLabel, Stratum};

pub use functions::{
    bump, BifurcationFamily, Constant, FunctionHandle, InvariantFunction, LinearPath, PolyOf, Radial, SphereLift,
    TracePower,
};
pub use space::{finite_stabilizer, lie_stabilizer, Carrier, LieStabilizer, ModelSpace};

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub seed: u64,
    /// Uniform random starts in the ball.
    pub random_starts: usize,
    /// Random rays scanned for sign changes of the radial derivative.
    pub rays: usize,
    pub ray_samples: usize,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub dedup_tol: f64,
    /// Critical points with `|x|` below this are ignored (sphere mode).
    pub min_norm: f64,
    /// Relative threshold for a Hessian eigenvalue to count as zero.
    pub zero_eig: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            seed: 0x5eed,
            random_starts: 48,
            rays: 12,
            ray_samples: 400,
            max_iter: 200,
            grad_tol: 1e-10,
            dedup_tol: 1e-7,
            min_norm: 0.0,
            zero_eig: 1e-7,
        }
    }
}

/// Stabilizer of a critical point.
#[derive(Clone, Debug)]
pub enum OrbitStabilizer {
    Lie(LieStabilizer),
    /// Indices into the finite group's element list.
    Finite(Vec<usize>),
}

/// Equivariant index of a nondegenerate orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitIndex {
    Rep(RepElement),
    /// Character of the negative eigenspace on the stabilizer elements.
    Character(Vec<i64>),
}

#[derive(Clone, Debug)]
pub struct CriticalOrbit {
    pub point: DVector<f64>,
    pub invariants: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub stabilizer: OrbitStabilizer,
    /// Hessian eigenvalues normal to the orbit.
    pub normal_eigenvalues: Vec<f64>,
    pub nondegenerate: bool,
    pub index: Option<OrbitIndex>,
    /// Residual of the character fit behind `index`.
    pub fit_residual: f64,
}

impl CriticalOrbit {
    pub fn morse_index(&self) -> usize {
        self.normal_eigenvalues.iter().filter(|&&l| l < 0.0).count()
    }

    /// `max|λ| / min|λ|` over the normal Hessian.
    pub fn condition(&self) -> f64 {
        let (lo, hi) = self
            .normal_eigenvalues
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), l| {
                (lo.min(l.abs()), hi.max(l.abs()))
            });
        if self.normal_eigenvalues.is_empty() {
            1.0
        } else {
            hi / lo
        }
    }

    pub fn stabilizer_label(&self) -> String {
        match &self.stabilizer {
            OrbitStabilizer::Lie(s) => s.embedding.target.to_string(),
            OrbitStabilizer::Finite(els) => format!("order {}", els.len()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let index = match &self.index {
            Some(OrbitIndex::Rep(r)) => serde_json::to_value(r).unwrap_or_default(),
            Some(OrbitIndex::Character(c)) => json!({ "character": c }),
            None => serde_json::Value::Null,
        };
        json!({
            "point": self.point.as_slice(),
            "invariants": self.invariants,
            "value": self.value,
            "stabilizer": self.stabilizer_label(),
            "nondegenerate": self.nondegenerate,
            "morse_index": self.morse_index(),
            "condition": self.condition(),
            "index": index,
        })
    }
}

/// Rounds values that would print as `-0.000000`.
fn clean(v: f64) -> f64 {
    if v.abs() < 5e-7 {
        0.0
    } else {
        v
    }
}

impl fmt::Display for CriticalOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inv: Vec<String> = self.invariants.iter().map(|v| format!("{:.6}", clean(*v))).collect();
        write!(
            f,
            "orbit [{}] f={:.6} stab {}",
            inv.join(", "),
            clean(self.value),
            self.stabilizer_label()
        )?;
        match &self.index {
            Some(OrbitIndex::Rep(r)) => write!(f, " index {r}"),
            Some(OrbitIndex::Character(c)) => write!(f, " index χ={c:?}"),
            None => write!(f, " degenerate"),
        }
    }
}

/// Checks `f(g·x) = f(x)` on random samples.
pub fn check_invariance(space: &ModelSpace, f: &dyn InvariantFunction, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1a7);
    for _ in 0..8 {
        let x = random_point(space, &mut rng, 0.0);
        let g = space.sample_action(&mut rng);
        let (a, b) = (f.value(&x), f.value(&(&g * &x)));
        if (a - b).abs() > 1e-8 * (1.0 + a.abs()) {
            return Err(Error::NotInvariant(format!(
                "{}: f(x) = {a} but f(g·x) = {b}",
                f.describe()
            )));
        }
    }
    Ok(())
}

fn random_point<R: Rng + ?Sized>(space: &ModelSpace, rng: &mut R, min_norm: f64) -> DVector<f64> {
    let n = space.dim();
    let dir = random_direction(n, rng);
    let lo = (min_norm / space.radius).powi(n as i32);
    let r = space.radius * (lo + (1.0 - lo) * rng.random::<f64>()).powf(1.0 / n as f64);
    dir * r.max(min_norm * 1.01)
}

fn random_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let nrm = v.norm();
        if nrm > 1e-6 {
            return v / nrm;
        }
    }
}

/// Damped Newton on `∇f = 0` with a pseudo-inverse step, kept inside the ball.
///
/// Converged means a small gradient and a negligible Newton step; near a degenerate zero
/// the gradient is tiny long before the step is, and iteration continues toward it.
///
/// Steps are confined to the normal space of the orbit through the current point, where
/// the Hessian has no structural kernel.
fn newton(
    space: &ModelSpace,
    f: &dyn InvariantFunction,
    x0: DVector<f64>,
    opts: &SearchOptions,
) -> Option<DVector<f64>> {
    let radius = space.radius;
    let mut x = x0;
    let mut g = f.gradient(&x);
    for _ in 0..opts.max_iter {
        let gn = g.norm();
        let (_, normal) = complement(&space.orbit_directions(&x), x.len());
        let eig = SymmetricEigen::new(normal.transpose() * f.hessian(&x) * &normal);
        let gt = normal.transpose() * &g;
        let rho = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let mut step = DVector::zeros(x.len());
        for (i, l) in eig.eigenvalues.iter().enumerate() {
            if l.abs() > 1e-12 * rho.max(1e-300) {
                let v = &normal * eig.eigenvectors.column(i);
                step -= &v * (eig.eigenvectors.column(i).dot(&gt) / l);
            }
        }
        if step.norm() == 0.0 {
            step = -&g;
        }
        let small_step = step.norm() < 1e-8 * (1.0 + x.norm());
        if gn < opts.grad_tol && small_step {
            return Some(x);
        }
        let mut accepted = false;
        let mut alpha = 1.0;
        for _ in 0..30 {
            let xn = &x + &step * alpha;
            let nrm = xn.norm();
            if nrm < radius && nrm > opts.min_norm {
                let gn_new = f.gradient(&xn);
                if gn_new.norm() < (1.0 - 1e-4 * alpha) * gn {
                    x = xn;
                    g = gn_new;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            // stalled at the floating-point floor of the gradient
            return (gn < 1e3 * opts.grad_tol && small_step).then_some(x);
        }
    }
    None
}

fn seeds(space: &ModelSpace, f: &dyn InvariantFunction, opts: &SearchOptions) -> Vec<DVector<f64>> {
    let n = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    if opts.min_norm == 0.0 {
        out.push(DVector::zeros(n));
    }
    for _ in 0..opts.rays {
        let d = random_direction(n, &mut rng);
        let lo = opts.min_norm.max(1e-4 * space.radius);
        let hi = space.radius * (1.0 - 1e-6);
        let rs: Vec<f64> = (0..opts.ray_samples)
            .map(|i| lo + (hi - lo) * i as f64 / (opts.ray_samples - 1) as f64)
            .collect();
        let dd: Vec<f64> = rs.iter().map(|&r| d.dot(&f.gradient(&(&d * r)))).collect();
        for i in 1..rs.len() {
            if dd[i - 1].signum() != dd[i].signum() {
                let w = dd[i - 1] / (dd[i - 1] - dd[i]);
                out.push(&d * (rs[i - 1] + w * (rs[i] - rs[i - 1])));
            }
        }
    }
    for _ in 0..opts.random_starts {
        out.push(random_point(space, &mut rng, opts.min_norm));
    }
    out
}

fn same_orbit(space: &ModelSpace, a: &CriticalOrbit, b: &DVector<f64>, inv_b: &[f64], tol: f64) -> bool {
    match space.finite_elements() {
        Some(els) => els.iter().any(|g| (g * &a.point - b).norm() < tol.max(1e-6)),
        None => a
            .invariants
            .iter()
            .zip(inv_b)
            .all(|(x, y)| (x - y).abs() < tol.max(1e-6) * (1.0 + x.abs())),
    }
}

/// All critical orbits found by the multi-start search, each classified.
pub fn find_critical_orbits(
    space: &ModelSpace,
    f: &dyn InvariantFunction,
    opts: &SearchOptions,
) -> Result<Vec<CriticalOrbit>> {
    check_invariance(space, f, opts.seed)?;
    let starts = seeds(space, f, opts);
    let found: Vec<Option<DVector<f64>>> = starts.into_par_iter().map(|x0| newton(space, f, x0, opts)).collect();
    let mut reps: Vec<(DVector<f64>, Vec<f64>)> = Vec::new();
    for x in found.into_iter().flatten() {
        let inv = space.invariants(&x);
        let dup = reps.iter().any(|(p, q)| match space.finite_elements() {
            Some(els) => els.iter().any(|g| (g * p - &x).norm() < opts.dedup_tol.max(1e-6)),
            None => q
                .iter()
                .zip(&inv)
                .all(|(a, b)| (a - b).abs() < opts.dedup_tol.max(1e-6) * (1.0 + a.abs())),
        });
        if !dup {
            reps.push((x, inv));
        }
    }
    let mut orbits: Vec<CriticalOrbit> = reps
        .into_par_iter()
        .map(|(x, inv)| classify(space, f, x, inv, opts))
        .collect::<Result<_>>()?;
    orbits.sort_by(|a, b| {
        a.value.total_cmp(&b.value).then_with(|| {
            a.invariants
                .partial_cmp(&b.invariants)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    // a second pass catches near-duplicates that differ only through classification
    let mut out: Vec<CriticalOrbit> = Vec::new();
    for o in orbits {
        if !out
            .iter()
            .any(|p| same_orbit(space, p, &o.point, &o.invariants, opts.dedup_tol))
        {
            out.push(o);
        }
    }
    Ok(out)
}

/// Orthonormal basis of the complement of the column span of `a` (rank by `tol`).
fn complement(a: &DMatrix<f64>, n: usize) -> (usize, DMatrix<f64>) {
    if a.ncols() == 0 {
        return (0, DMatrix::identity(n, n));
    }
    let gram = a * a.transpose();
    let eig = SymmetricEigen::new(gram);
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(*l));
    let keep: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i] <= 1e-12 * top.max(1e-300))
        .collect();
    let cols: Vec<_> = keep.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    let basis = if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    };
    (n - keep.len(), basis)
}

fn classify(
    space: &ModelSpace,
    f: &dyn InvariantFunction,
    x: DVector<f64>,
    invariants: Vec<f64>,
    opts: &SearchOptions,
) -> Result<CriticalOrbit> {
    let n = space.dim();
    let hess = f.hessian(&x);
    let (orbit_dim, normal) = complement(&space.orbit_directions(&x), n);
    let hn = normal.transpose() * &hess * &normal;
    let eig = SymmetricEigen::new(hn.clone());
    let rho = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let thr = (opts.zero_eig * rho).max(1e-9);
    let nondegenerate = eig.eigenvalues.iter().all(|l| l.abs() > thr);
    let neg: Vec<_> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] < 0.0)
        .map(|i| &normal * eig.eigenvectors.column(i))
        .collect();
    let q = if neg.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&neg)
    };
    let mut normal_eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    normal_eigenvalues.sort_by(|a, b| a.total_cmp(b));
    let (stabilizer, index, fit_residual) = match &space.carrier {
        Carrier::Rep { stratum, .. } => {
            let st = lie_stabilizer(space, &x)?;
            let k = &st.embedding.target;
            let expected = stratum.group().dim as usize - k.group().dim as usize;
            if expected != orbit_dim {
                return Err(Error::Unsupported(format!(
                    "orbit through {invariants:?} has dimension {orbit_dim}, stabilizer {k} predicts {expected}"
                )));
            }
            let (idx, res) = if nondegenerate {
                let (r, res) = lie_index(space, &x, &st, &q, opts.seed)?;
                (Some(OrbitIndex::Rep(r)), res)
            } else {
                (None, 0.0)
            };
            (OrbitStabilizer::Lie(st), idx, res)
        }
        Carrier::Finite { elements, .. } => {
            let stab = finite_stabilizer(space, &x)?;
            let idx = if nondegenerate {
                let mut chi = Vec::new();
                for &i in &stab {
                    let t = (q.transpose() * &elements[i] * &q).trace();
                    if (t - t.round()).abs() > 1e-6 {
                        return Err(Error::Unsupported(format!("non-integral character value {t}")));
                    }
                    chi.push(t.round() as i64);
                }
                Some(OrbitIndex::Character(chi))
            } else {
                None
            };
            (OrbitStabilizer::Finite(stab), idx, 0.0)
        }
    };
    Ok(CriticalOrbit {
        value: f.value(&x),
        gradient_norm: f.gradient(&x).norm(),
        point: x,
        invariants,
        stabilizer,
        normal_eigenvalues,
        nondegenerate,
        index,
        fit_residual,
    })
}

/// Multiplicities of catalog irreps of the stabilizer in the span of `q`.
///
/// The character of the span is an exact integer combination of catalog characters, so a
/// least-squares fit on sampled stabilizer elements recovers it up to rounding error.
fn lie_index(
    space: &ModelSpace,
    x: &DVector<f64>,
    st: &LieStabilizer,
    q: &DMatrix<f64>,
    seed: u64,
) -> Result<(RepElement, f64)> {
    let k = &st.embedding.target;
    if q.ncols() == 0 {
        return Ok((RepElement::zero(k), 0.0));
    }
    let labels = k.catalog();
    let samples = 24 + 12 * labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1de5);
    let mut a = DMatrix::zeros(samples, labels.len());
    let mut b = DVector::zeros(samples);
    for i in 0..samples {
        let kel = sample_element(k, &mut rng);
        let rho = space.action(&st.realize(&kel));
        if (&rho * x - x).norm() > 1e-7 * (1.0 + x.norm()) {
            return Err(Error::Unsupported(
                "normal-form stabilizer does not fix the point".into(),
            ));
        }
        let r = q.transpose() * &rho * q;
        if (&rho * q - q * &r).norm() > 1e-6 * (1.0 + r.norm()) {
            return Err(Error::Oracle("negative eigenspace is not stabilizer-invariant".into()));
        }
        b[i] = r.trace();
        for (j, &l) in labels.iter().enumerate() {
            a[(i, j)] = character(l, &kel);
        }
    }
    let svd = a.clone().svd(true, true);
    let sol = svd
        .solve(&b, 1e-10)
        .map_err(|e| Error::Oracle(format!("character fit failed: {e}")))?;
    let residual = (&a * &sol - &b).norm() / (1.0 + b.norm());
    let mut terms = Vec::new();
    let mut dim = 0i64;
    for (j, &l) in labels.iter().enumerate() {
        let v = sol[j];
        if (v - v.round()).abs() > 0.05 || residual > 1e-6 {
            return Err(Error::Oracle(format!(
                "isotypic fit on {k}: {l} multiplicity {v:.4}, residual {residual:.2e}"
            )));
        }
        let c = v.round() as i64;
        dim += c * k.real_dim(l) as i64;
        if c != 0 {
            terms.push((l, int(c)));
        }
    }
    if dim != q.ncols() as i64 {
        return Err(Error::Oracle(format!(
            "isotypic dimensions sum to {dim}, negative eigenspace has {}",
            q.ncols()
        )));
    }
    Ok((RepElement::new(k, terms)?, residual))
}

pub fn equivariant_index(orbit: &CriticalOrbit) -> Result<RepElement> {
    match &orbit.index {
        Some(OrbitIndex::Rep(r)) => Ok(r.clone()),
        Some(OrbitIndex::Character(_)) => Err(Error::Incompatible(
            "finite-group orbits carry characters, see finite_total_index".into(),
        )),
        None => Err(Error::NotMorse(format!("degenerate critical {orbit}"))),
    }
}

fn require_morse(orbits: &[CriticalOrbit]) -> Result<()> {
    if let Some(o) = orbits.iter().find(|o| !o.nondegenerate) {
        return Err(Error::NotMorse(format!(
            "degenerate critical {o} (normal eigenvalues {:?})",
            o.normal_eigenvalues
        )));
    }
    Ok(())
}

/// `Σ [Stab, ind]` over critical orbits of a `Rep` ball.
pub fn total_index(space: &ModelSpace, f: &dyn InvariantFunction, opts: &SearchOptions) -> Result<TotalIndex> {
    let orbits = find_critical_orbits(space, f, opts)?;
    total_of(&orbits)
}

pub fn total_of(orbits: &[CriticalOrbit]) -> Result<TotalIndex> {
    require_morse(orbits)?;
    let mut out = TotalIndex::zero();
    for o in orbits {
        out.add_term(IndexClass::new(equivariant_index(o)?), 1);
    }
    Ok(out)
}

/// Index class for a finite group: a stabilizer subgroup and a character on it, up to
/// conjugation in the ambient group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteClass {
    /// Sorted element indices of the stabilizer.
    pub subgroup: Vec<usize>,
    /// Character values aligned with `subgroup`.
    pub character: Vec<i64>,
}

impl FiniteClass {
    pub fn order(&self) -> usize {
        self.subgroup.len()
    }

    /// Multiplicity of the trivial character.
    pub fn trivial_part(&self) -> i64 {
        self.character.iter().sum::<i64>() / self.order() as i64
    }

    pub fn dim(&self) -> i64 {
        self.character[0]
    }
}

impl fmt::Display for FiniteClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[order {}, χ={:?}]", self.order(), self.character)
    }
}

pub type FiniteTotalIndex = FreeAbelian<FiniteClass, i64>;

fn canonical_finite(els: &[DMatrix<f64>], subgroup: &[usize], chi: &[i64]) -> FiniteClass {
    let find = |m: &DMatrix<f64>| els.iter().position(|e| (e - m).norm() < 1e-8).expect("closed group");
    let mut best: Option<FiniteClass> = None;
    for g in els {
        let gi = g.transpose();
        let mut pairs: Vec<(usize, i64)> = subgroup
            .iter()
            .zip(chi)
            .map(|(&s, &c)| (find(&(g * &els[s] * &gi)), c))
            .collect();
        pairs.sort();
        let cand = FiniteClass {
            subgroup: pairs.iter().map(|p| p.0).collect(),
            character: pairs.iter().map(|p| p.1).collect(),
        };
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.expect("nonempty group")
}

/// Total index on a finite-action ball.
pub fn finite_total_index(
    space: &ModelSpace,
    f: &dyn InvariantFunction,
    opts: &SearchOptions,
) -> Result<FiniteTotalIndex> {
    if space.finite_elements().is_none() {
        return Err(Error::Incompatible("not a finite-action ball".into()));
    }
    finite_total_of(space, &find_critical_orbits(space, f, opts)?)
}

/// Finite total index of already classified orbits.
pub fn finite_total_of(space: &ModelSpace, orbits: &[CriticalOrbit]) -> Result<FiniteTotalIndex> {
    let els = space
        .finite_elements()
        .ok_or_else(|| Error::Incompatible("not a finite-action ball".into()))?;
    require_morse(orbits)?;
    let mut out = FiniteTotalIndex::zero();
    for o in orbits {
        let (OrbitStabilizer::Finite(sub), Some(OrbitIndex::Character(chi))) = (&o.stabilizer, &o.index) else {
            unreachable!("finite carrier")
        };
        out.add_term(canonical_finite(els, sub, chi), 1);
    }
    Ok(out)
}

/// `F_{V⊕V′}(t,·)` on `space`: summand `v` carries the quartic model, each summand in
/// `v_prime` gets `s·|y|²`. `g` acts on unit vectors of `v` (constant 0 when absent).
pub fn bifurcation_family(
    space: &ModelSpace,
    v: usize,
    v_prime: &[(usize, f64)],
    g: Option<FunctionHandle>,
    t: f64,
) -> Result<FunctionHandle> {
    let nsum = match &space.carrier {
        Carrier::Rep { labels, .. } => labels.len(),
        Carrier::Finite { .. } => 1,
    };
    if v >= nsum || v_prime.iter().any(|(k, _)| *k >= nsum || *k == v) {
        return Err(Error::Usage("bifurcation family summand out of range".into()));
    }
    if v_prime.iter().any(|(_, s)| *s == 0.0) {
        return Err(Error::Usage("h must be nondegenerate".into()));
    }
    Ok(Arc::new(BifurcationFamily {
        t,
        v: space.range(v),
        v_prime: v_prime.iter().map(|&(k, s)| (space.range(k), s)).collect(),
        g: g.unwrap_or_else(|| Arc::new(Constant(0.0))),
    }))
}

/// `ind g` of an invariant function on the unit sphere of `V₁`, computed numerically.
pub fn sphere_datum_numeric(
    s: &Stratum,
    v1: IrrepLabel,
    g: FunctionHandle,
    opts: &SearchOptions,
) -> Result<SphereMorseDatum> {
    let space = ModelSpace::rep_ball(s, &[v1], 2.0)?;
    let lifted = SphereLift { g };
    let mut o = opts.clone();
    o.min_norm = o.min_norm.max(0.25);
    let orbits = find_critical_orbits(&space, &lifted, &o)?;
    require_morse(&orbits)?;
    let mut terms = Vec::new();
    for orb in &orbits {
        let OrbitStabilizer::Lie(st) = &orb.stabilizer else {
            unreachable!("Lie carrier")
        };
        terms.push(DatumTerm {
            embedding: st.embedding.clone(),
            rep: equivariant_index(orb)?,
            coeff: 1,
        });
    }
    SphereMorseDatum::new(s, v1, terms)
}

/// The embedding of the stabilizer of a unit vector of a transitive `V₁`.
pub fn transitive_embedding(s: &Stratum, v1: IrrepLabel) -> Option<Embedding> {
    crate::bifgroup::transitive_move(s, v1).and_then(|mv| Embedding::from_move(s, &mv).ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_census() {
        let space = ModelSpace::z2_line(1.0);
        let opts = SearchOptions::default();
        let f = bifurcation_family(&space, 0, &[], None, -0.5).unwrap();
        let orbits = find_critical_orbits(&space, f.as_ref(), &opts).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].stabilizer_label(), "order 2");
        let f = bifurcation_family(&space, 0, &[], None, 0.5).unwrap();
        let orbits = find_critical_orbits(&space, f.as_ref(), &opts).unwrap();
        assert_eq!(orbits.len(), 2);
        let sides: Vec<_> = orbits
            .iter()
            .map(|o| (o.stabilizer_label(), o.invariants[0].abs()))
            .collect();
        assert!(sides.iter().any(|(l, x)| l == "order 2" && *x < 1e-9));
        assert!(sides.iter().any(|(l, x)| l == "order 1" && (*x - 0.5).abs() < 1e-9));
    }

    #[test]
    fn radial_on_su2() {
        let space = ModelSpace::rep_ball(&Stratum::of(&[(2, 2)]), &[IrrepLabel::Adj(0)], 1.0).unwrap();
        let f = Radial::from_derivative_roots(&[0.3], 1.0);
        let orbits = find_critical_orbits(&space, &f, &SearchOptions::default()).unwrap();
        assert_eq!(orbits.len(), 2);
        let total = total_of(&orbits).unwrap();
        let d = Stratum::of(&[(2, 2)]);
        let c = Stratum::of(&[(2, 1), (2, 1)]);
        // φ′(0) > 0: minimum at 0; the sphere |x|² = 0.3 is a radial maximum
        let want: TotalIndex = [
            (IndexClass::zero_rep(&d), 1),
            (IndexClass::new(RepElement::triv(&c, int(1))), 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(total, want);
    }

    #[test]
    fn degenerate_orbit_is_refused() {
        let space = ModelSpace::z2_line(1.0);
        let f = Radial::new(vec![0.0, 0.0, -1.0]);
        let err = finite_total_index(&space, &f, &SearchOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotMorse(_)));
    }

    #[test]
    fn non_invariant_function_is_refused() {
        struct Odd;
        impl InvariantFunction for Odd {
            fn value(&self, x: &DVector<f64>) -> f64 {
                x[0]
            }
            fn describe(&self) -> String {
                "odd".into()
            }
        }
        let space = ModelSpace::z2_line(1.0);
        assert!(matches!(
            find_critical_orbits(&space, &Odd, &SearchOptions::default()),
            Err(Error::NotInvariant(_))
        ));
    }
}
