//! Spectral flow of continuous paths of symmetric matrices.
//!
//! In finite dimensions the signed count of zero crossings equals
//! `n⁻(A(0)) − n⁻(A(1))`. Zero eigenvalues count as positive, which is the same as
//! computing the flow from `A(0)+ε` to `A(1)+ε`.
//!
//! ```
//! use equicerf::specflow::{spectral_flow, SymmetricPath};
//! use nalgebra::DMatrix;
//!
//! let p = SymmetricPath::new(1, |t| DMatrix::from_element(1, 1, 2.0 * t - 1.0));
//! assert_eq!(spectral_flow(&p).unwrap(), 1);
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::repcat::{Branching, RepElement};
use crate::ringcore::int;
use crate::strata::{Embedding, IrrepLabel, Stratum};

type PathFn = dyn Fn(f64) -> DMatrix<f64> + Send + Sync;

/// A path `t ∈ [0,1] ↦ A(t)` of symmetric `d×d` matrices.
#[derive(Clone)]
pub struct SymmetricPath {
    dim: usize,
    f: Arc<PathFn>,
}

impl SymmetricPath {
    pub fn new(dim: usize, f: impl Fn(f64) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        SymmetricPath { dim, f: Arc::new(f) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `A(t)`, symmetrized; fails if the raw matrix is not symmetric to 1e−10 (relative).
    pub fn eval(&self, t: f64) -> Result<DMatrix<f64>> {
        let a = (self.f)(t);
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return Err(Error::SpectralFlow(format!(
                "path returned a {}×{} matrix at t={t}, expected {}×{}",
                a.nrows(),
                a.ncols(),
                self.dim,
                self.dim
            )));
        }
        let asym = (&a - a.transpose()).amax();
        if asym > 1e-10 * (1.0 + a.amax()) {
            return Err(Error::SpectralFlow(format!(
                "matrix at t={t} is not symmetric (residual {asym:.2e})"
            )));
        }
        Ok((&a + a.transpose()) * 0.5)
    }

    /// `(1−t)·A + t·B`.
    pub fn linear(a: DMatrix<f64>, b: DMatrix<f64>) -> Self {
        let d = a.nrows();
        SymmetricPath::new(d, move |t| &a * (1.0 - t) + &b * t)
    }

    /// Piecewise-linear interpolation of samples at increasing times covering `[0,1]`.
    pub fn from_samples(ts: Vec<f64>, mats: Vec<DMatrix<f64>>) -> Result<Self> {
        if ts.len() < 2 || ts.len() != mats.len() {
            return Err(Error::SpectralFlow("need at least two samples".into()));
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::SpectralFlow("sample times must increase".into()));
        }
        if ts[0] != 0.0 || *ts.last().expect("nonempty") != 1.0 {
            return Err(Error::SpectralFlow("samples must start at t=0 and end at t=1".into()));
        }
        let d = mats[0].nrows();
        if mats.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::SpectralFlow("samples have different sizes".into()));
        }
        Ok(SymmetricPath::new(d, move |t| {
            let t = t.clamp(0.0, 1.0);
            let k = match ts.iter().position(|&s| s >= t) {
                Some(0) => 1,
                Some(k) => k,
                None => ts.len() - 1,
            };
            let s = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
            &mats[k - 1] * (1.0 - s) + &mats[k] * s
        }))
    }

    /// Rows `t, a₁₁, a₁₂, …, a_dd` (full row-major matrices); `#` lines and a header are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut ts = Vec::new();
        let mut mats = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let nums: std::result::Result<Vec<f64>, _> = cells.iter().map(|c| c.parse::<f64>()).collect();
            let nums = match nums {
                Ok(v) => v,
                Err(_) if ts.is_empty() && mats.is_empty() && lineno == 0 => continue,
                Err(_) => {
                    return Err(Error::Schema {
                        field: format!("line {}", lineno + 1),
                        msg: "non-numeric cell".into(),
                    })
                }
            };
            let k = nums.len() - 1;
            let d = (k as f64).sqrt().round() as usize;
            if d * d != k || d == 0 {
                return Err(Error::Schema {
                    field: format!("line {}", lineno + 1),
                    msg: format!("{k} matrix entries is not a square count"),
                });
            }
            ts.push(nums[0]);
            mats.push(DMatrix::from_row_slice(d, d, &nums[1..]));
        }
        SymmetricPath::from_samples(ts, mats)
    }

    pub fn reversed(&self) -> Self {
        let f = self.f.clone();
        SymmetricPath::new(self.dim, move |t| f(1.0 - t))
    }

    /// Runs `self` on `[0,½]` and `next` on `[½,1]`.
    pub fn concat(&self, next: &SymmetricPath) -> Self {
        let (f, g) = (self.f.clone(), next.f.clone());
        SymmetricPath::new(self.dim, move |t| if t <= 0.5 { f(2.0 * t) } else { g(2.0 * t - 1.0) })
    }

    /// `t ↦ Bᵀ A(t) B`.
    pub fn compress(&self, b: DMatrix<f64>) -> Self {
        let f = self.f.clone();
        let k = b.ncols();
        SymmetricPath::new(k, move |t| {
            let a = f(t);
            let c = b.transpose() * a * &b;
            (&c + c.transpose()) * 0.5
        })
    }
}

/// Continuity check parameters.
#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    pub max_depth: u32,
    pub floor: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            max_depth: 48,
            floor: 1e-9,
        }
    }
}

pub fn sorted_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(|x, y| x.total_cmp(y));
    e
}

/// Number of eigenvalues below `−tol`, `tol = 1e−12·(1+‖A‖)`.
pub fn negative_count(a: &DMatrix<f64>) -> usize {
    let tol = 1e-12 * (1.0 + a.amax());
    sorted_eigenvalues(a).iter().filter(|&&x| x < -tol).count()
}

/// Refines until each step moves the sorted spectrum by less than a quarter of its
/// distance from zero (or below the floor). Returns the number of evaluations.
pub fn check_continuity(path: &SymmetricPath, opts: FlowOptions) -> Result<usize> {
    let e0 = sorted_eigenvalues(&path.eval(0.0)?);
    let e1 = sorted_eigenvalues(&path.eval(1.0)?);
    let scale = 1.0 + e0.iter().chain(&e1).fold(0.0f64, |m, x| m.max(x.abs()));
    let mut evals = 2;
    let mut stack = vec![(0.0, 1.0, e0, e1, 0u32)];
    while let Some((a, b, ea, eb, depth)) = stack.pop() {
        let moved = ea.iter().zip(&eb).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let gap = ea.iter().chain(&eb).fold(f64::INFINITY, |m, x| m.min(x.abs()));
        if moved < (gap / 4.0).max(opts.floor * scale) {
            continue;
        }
        if depth >= opts.max_depth {
            return Err(Error::SpectralFlow(format!(
                "refinement bound exceeded near t={a:.6}; the path looks discontinuous"
            )));
        }
        let m = 0.5 * (a + b);
        let em = sorted_eigenvalues(&path.eval(m)?);
        evals += 1;
        stack.push((a, m, ea, em.clone(), depth + 1));
        stack.push((m, b, em, eb, depth + 1));
    }
    Ok(evals)
}

/// `n⁻(A(0)) − n⁻(A(1))` after a continuity check.
pub fn spectral_flow(path: &SymmetricPath) -> Result<i64> {
    spectral_flow_with(path, FlowOptions::default())
}

pub fn spectral_flow_with(path: &SymmetricPath, opts: FlowOptions) -> Result<i64> {
    check_continuity(path, opts)?;
    let a0 = path.eval(0.0)?;
    let a1 = path.eval(1.0)?;
    Ok(negative_count(&a0) as i64 - negative_count(&a1) as i64)
}

/// One isotypic component: a label, its real dimension and an orthogonal projector.
#[derive(Clone, Debug)]
pub struct IsotypicComponent<L> {
    pub label: L,
    pub real_dim: usize,
    pub projector: DMatrix<f64>,
}

/// Decomposition of the ambient space into isotypic components of a symmetry group.
#[derive(Clone, Debug)]
pub struct IsotypicAction<L> {
    pub components: Vec<IsotypicComponent<L>>,
}

/// A label read from a projector file.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NamedIrrep {
    pub name: String,
    pub real_dim: usize,
}

#[derive(Serialize, Deserialize)]
struct ProjectorJson {
    name: String,
    real_dim: usize,
    matrix: Vec<Vec<f64>>,
}

impl IsotypicAction<NamedIrrep> {
    /// Parses `[{name, real_dim, matrix}]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<ProjectorJson> = serde_json::from_str(text)?;
        let mut components = Vec::new();
        for (i, p) in raw.into_iter().enumerate() {
            let d = p.matrix.len();
            if p.matrix.iter().any(|r| r.len() != d) {
                return Err(Error::Schema {
                    field: format!("[{i}].matrix"),
                    msg: "projector must be square".into(),
                });
            }
            if p.real_dim == 0 {
                return Err(Error::Schema {
                    field: format!("[{i}].real_dim"),
                    msg: "must be positive".into(),
                });
            }
            let flat: Vec<f64> = p.matrix.into_iter().flatten().collect();
            components.push(IsotypicComponent {
                label: NamedIrrep {
                    name: p.name,
                    real_dim: p.real_dim,
                },
                real_dim: p.real_dim,
                projector: DMatrix::from_row_slice(d, d, &flat),
            });
        }
        Ok(IsotypicAction { components })
    }
}

impl<L: Clone> IsotypicAction<L> {
    /// Idempotent, symmetric, mutually orthogonal, summing to the identity (1e−8).
    pub fn validate(&self, dim: usize) -> Result<()> {
        let tol = 1e-8;
        let mut sum = DMatrix::zeros(dim, dim);
        for (i, c) in self.components.iter().enumerate() {
            let p = &c.projector;
            if p.nrows() != dim || p.ncols() != dim {
                return Err(Error::SpectralFlow(format!("projector {i} has the wrong size")));
            }
            if (p - p.transpose()).amax() > tol || (p * p - p).amax() > tol {
                return Err(Error::SpectralFlow(format!(
                    "projector {i} is not an orthogonal projector"
                )));
            }
            for (j, d) in self.components.iter().enumerate().skip(i + 1) {
                if (p * &d.projector).amax() > tol {
                    return Err(Error::SpectralFlow(format!(
                        "projectors {i} and {j} are not orthogonal"
                    )));
                }
            }
            sum += p;
        }
        if (sum - DMatrix::identity(dim, dim)).amax() > tol {
            return Err(Error::SpectralFlow("projectors do not sum to the identity".into()));
        }
        Ok(())
    }
}

/// `Σ n_W·[W]` where `n_W` is the flow on `range(Π_W)` divided by `dim W`.
pub fn equivariant_spectral_flow<L: Clone>(path: &SymmetricPath, action: &IsotypicAction<L>) -> Result<Vec<(L, i64)>> {
    let d = path.dim();
    action.validate(d)?;
    for k in 0..=10 {
        let t = k as f64 / 10.0;
        let a = path.eval(t)?;
        for c in &action.components {
            let comm = (&c.projector * &a - &a * &c.projector).amax();
            if comm > 1e-6 * (1.0 + a.amax()) {
                return Err(Error::SpectralFlow(format!(
                    "action does not commute with the path at t={t}"
                )));
            }
        }
    }
    let mut out = Vec::new();
    for c in &action.components {
        let eig = SymmetricEigen::new(c.projector.clone());
        let cols: Vec<_> = (0..d)
            .filter(|&i| eig.eigenvalues[i] > 0.5)
            .map(|i| eig.eigenvectors.column(i).into_owned())
            .collect();
        if cols.is_empty() {
            out.push((c.label.clone(), 0));
            continue;
        }
        let b = DMatrix::from_columns(&cols);
        let sf = spectral_flow(&path.compress(b))?;
        if sf % c.real_dim as i64 != 0 {
            return Err(Error::SpectralFlow(format!(
                "flow {sf} on a component of real dimension {} is not a whole number of copies",
                c.real_dim
            )));
        }
        out.push((c.label.clone(), sf / c.real_dim as i64));
    }
    Ok(out)
}

/// Equivariant flow for catalog labels of `H_σ`, as a representation element.
pub fn equivariant_flow_rep(
    path: &SymmetricPath,
    s: &Stratum,
    projectors: Vec<(IrrepLabel, DMatrix<f64>)>,
) -> Result<RepElement> {
    let components = projectors
        .into_iter()
        .map(|(l, p)| {
            s.check_label(l)?;
            Ok(IsotypicComponent {
                label: l,
                real_dim: s.real_dim(l) as usize,
                projector: p,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let flows = equivariant_spectral_flow(path, &IsotypicAction { components })?;
    let mut acc: BTreeMap<IrrepLabel, i64> = BTreeMap::new();
    for (l, n) in flows {
        *acc.entry(l).or_default() += n;
    }
    RepElement::new(s, acc.into_iter().map(|(l, n)| (l, int(n))))
}

/// Restriction of an equivariant flow to a subgroup.
pub fn restrict_flow(x: &RepElement, w: &Embedding, br: &Branching) -> Result<RepElement> {
    br.restrict(x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_and_constant_paths() {
        let p = SymmetricPath::new(1, |t| DMatrix::from_element(1, 1, 2.0 * t - 1.0));
        assert_eq!(spectral_flow(&p).unwrap(), 1);
        assert_eq!(spectral_flow(&p.reversed()).unwrap(), -1);
        let c = SymmetricPath::new(2, |_| DMatrix::from_diagonal(&nalgebra::dvector![1.0, -3.0]));
        assert_eq!(spectral_flow(&c).unwrap(), 0);
    }

    #[test]
    fn zero_counts_as_positive() {
        let p = SymmetricPath::new(1, |t| DMatrix::from_element(1, 1, t - 1.0));
        assert_eq!(spectral_flow(&p).unwrap(), 1);
    }

    #[test]
    fn discontinuity_is_reported() {
        let p = SymmetricPath::new(1, |t| DMatrix::from_element(1, 1, if t < 0.3 { -1.0 } else { 1.0 }));
        assert!(matches!(spectral_flow(&p), Err(Error::SpectralFlow(_))));
    }

    fn z2_action() -> IsotypicAction<&'static str> {
        IsotypicAction {
            components: vec![
                IsotypicComponent {
                    label: "triv",
                    real_dim: 1,
                    projector: DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
                },
                IsotypicComponent {
                    label: "sign",
                    real_dim: 1,
                    projector: DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]),
                },
            ],
        }
    }

    #[test]
    fn z2_examples() {
        let p1 = SymmetricPath::new(2, |t| DMatrix::from_diagonal(&nalgebra::dvector![2.0 * t - 1.0, 3.0]));
        assert_eq!(
            equivariant_spectral_flow(&p1, &z2_action()).unwrap(),
            vec![("triv", 1), ("sign", 0)]
        );
        let p2 = SymmetricPath::new(2, |t| DMatrix::from_diagonal(&nalgebra::dvector![1.0, 2.0 * t - 1.0]));
        assert_eq!(
            equivariant_spectral_flow(&p2, &z2_action()).unwrap(),
            vec![("triv", 0), ("sign", 1)]
        );
    }

    #[test]
    fn non_commuting_action_rejected() {
        let p = SymmetricPath::new(2, |t| DMatrix::from_row_slice(2, 2, &[t, 1.0, 1.0, -t]));
        assert!(equivariant_spectral_flow(&p, &z2_action()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let text = "t,a11,a12,a21,a22\n0,-1,0,0,2\n0.5,0,0,0,2\n1,1,0,0,2\n";
        let p = SymmetricPath::from_csv(text).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(spectral_flow(&p).unwrap(), 1);
        assert!(SymmetricPath::from_csv("0,1,2,3\n1,1,2,3\n").is_err());
    }
}
