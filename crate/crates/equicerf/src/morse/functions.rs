//! Invariant function handles: a value, a gradient and a Hessian on real coordinates.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::group::{CMat, Summand};

pub trait InvariantFunction: Send + Sync {
    fn value(&self, x: &DVector<f64>) -> f64;

    /// Central differences unless overridden.
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let h = 1e-6;
        let mut g = DVector::zeros(x.len());
        let mut y = x.clone();
        for i in 0..x.len() {
            y[i] = x[i] + h;
            let a = self.value(&y);
            y[i] = x[i] - h;
            let b = self.value(&y);
            y[i] = x[i];
            g[i] = (a - b) / (2.0 * h);
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        fd_hessian(self, x)
    }

    fn describe(&self) -> String;
}

pub type FunctionHandle = Arc<dyn InvariantFunction>;

impl fmt::Debug for dyn InvariantFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Symmetrized central differences of the gradient.
pub fn fd_hessian<F: InvariantFunction + ?Sized>(f: &F, x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    let h = 1e-5;
    let mut out = DMatrix::zeros(n, n);
    let mut y = x.clone();
    for j in 0..n {
        y[j] = x[j] + h;
        let a = f.gradient(&y);
        y[j] = x[j] - h;
        let b = f.gradient(&y);
        y[j] = x[j];
        out.set_column(j, &((a - b) / (2.0 * h)));
    }
    (&out + out.transpose()) * 0.5
}

/// `φ(|x|²)` for a polynomial `φ(u) = Σ cₖ uᵏ`.
#[derive(Clone, Debug)]
pub struct Radial {
    pub coeffs: Vec<f64>,
}

impl Radial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Radial { coeffs }
    }

    /// `φ` with `φ(0) = 0` and `φ′(u) = −scale·Π(u − rᵢ)`; for `scale > 0`, `φ′ < 0` past the largest root.
    pub fn from_derivative_roots(roots: &[f64], scale: f64) -> Self {
        let mut d = vec![-scale];
        for &r in roots {
            let mut next = vec![0.0; d.len() + 1];
            for (k, c) in d.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            d = next;
        }
        let mut coeffs = vec![0.0];
        coeffs.extend(d.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
        Radial { coeffs }
    }

    /// `φ⁽ᵏ⁾(u)`.
    pub fn derivative(&self, u: f64, order: usize) -> f64 {
        poly_derivative(&self.coeffs, u, order)
    }
}

fn poly_derivative(coeffs: &[f64], u: f64, order: usize) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(order)
        .map(|(k, c)| {
            let falling: f64 = (0..order).map(|j| (k - j) as f64).product();
            c * falling * u.powi((k - order) as i32)
        })
        .sum()
}

impl InvariantFunction for Radial {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.derivative(x.norm_squared(), 0)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        x * (2.0 * self.derivative(x.norm_squared(), 1))
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let u = x.norm_squared();
        let n = x.len();
        DMatrix::identity(n, n) * (2.0 * self.derivative(u, 1)) + x * x.transpose() * (4.0 * self.derivative(u, 2))
    }

    fn describe(&self) -> String {
        format!("radial{:?}", self.coeffs)
    }
}

/// `tr((−iX)ᵏ)` on an adjoint summand occupying `range`.
#[derive(Clone, Debug)]
pub struct TracePower {
    pub summand: Summand,
    pub range: Range<usize>,
    pub k: u32,
}

impl TracePower {
    fn hermitian(&self, x: &DVector<f64>) -> CMat {
        let c: Vec<f64> = x.as_slice()[self.range.clone()].to_vec();
        self.summand.to_matrix(&c) * Complex64::new(0.0, -1.0)
    }
}

impl InvariantFunction for TracePower {
    fn value(&self, x: &DVector<f64>) -> f64 {
        let a = self.hermitian(x);
        let mut p = CMat::identity(a.nrows(), a.nrows());
        for _ in 0..self.k {
            p = &p * &a;
        }
        p.trace().re
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let a = self.hermitian(x);
        let mut p = CMat::identity(a.nrows(), a.nrows());
        for _ in 1..self.k {
            p = &p * &a;
        }
        let c = self.summand.to_coords(&(p * Complex64::new(0.0, self.k as f64)));
        let mut g = DVector::zeros(x.len());
        for (i, v) in self.range.clone().zip(c) {
            g[i] = v;
        }
        g
    }

    fn describe(&self) -> String {
        format!("trace{}", self.k)
    }
}

/// `P(f(x))` for a polynomial `P`.
#[derive(Clone)]
pub struct PolyOf {
    pub inner: FunctionHandle,
    pub coeffs: Vec<f64>,
}

impl PolyOf {
    fn eval(&self, y: f64, order: usize) -> f64 {
        poly_derivative(&self.coeffs, y, order)
    }
}

impl InvariantFunction for PolyOf {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.eval(self.inner.value(x), 0)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.inner.gradient(x) * self.eval(self.inner.value(x), 1)
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let y = self.inner.value(x);
        let g = self.inner.gradient(x);
        self.inner.hessian(x) * self.eval(y, 1) + &g * g.transpose() * self.eval(y, 2)
    }

    fn describe(&self) -> String {
        format!("poly{:?}({})", self.coeffs, self.inner.describe())
    }
}

/// `(1−s)·f₀ + s·f₁`.
#[derive(Clone)]
pub struct LinearPath {
    pub f0: FunctionHandle,
    pub f1: FunctionHandle,
    pub s: f64,
}

impl InvariantFunction for LinearPath {
    fn value(&self, x: &DVector<f64>) -> f64 {
        (1.0 - self.s) * self.f0.value(x) + self.s * self.f1.value(x)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.f0.gradient(x) * (1.0 - self.s) + self.f1.gradient(x) * self.s
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.f0.hessian(x) * (1.0 - self.s) + self.f1.hessian(x) * self.s
    }

    fn describe(&self) -> String {
        format!("path({}, {}; s={})", self.f0.describe(), self.f1.describe(), self.s)
    }
}

/// A constant function, the only invariant one on a transitive sphere.
#[derive(Clone, Debug)]
pub struct Constant(pub f64);

impl InvariantFunction for Constant {
    fn value(&self, _: &DVector<f64>) -> f64 {
        self.0
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(x.len())
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(x.len(), x.len())
    }

    fn describe(&self) -> String {
        format!("const({})", self.0)
    }
}

/// Bump on `[1/2, 2]` with `χ(1) = 1`, `χ′(1) = 0`: quintic smootherstep on each side.
pub fn bump(s: f64) -> (f64, f64) {
    let step = |u: f64| {
        (
            u * u * u * (10.0 - 15.0 * u + 6.0 * u * u),
            30.0 * u * u * (1.0 - u) * (1.0 - u),
        )
    };
    if s <= 0.5 || s >= 2.0 {
        (0.0, 0.0)
    } else if s <= 1.0 {
        let (v, d) = step(2.0 * (s - 0.5));
        (v, 2.0 * d)
    } else {
        let (v, d) = step(s - 1.0);
        (1.0 - v, -d)
    }
}

/// `g(x/|x|) + (|x|² − 1)²`: its critical orbits away from 0 are those of `g` on the
/// unit sphere, with one extra positive radial direction.
#[derive(Clone)]
pub struct SphereLift {
    pub g: FunctionHandle,
}

impl InvariantFunction for SphereLift {
    fn value(&self, x: &DVector<f64>) -> f64 {
        let r2 = x.norm_squared();
        self.g.value(&(x / r2.sqrt())) + (r2 - 1.0).powi(2)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let r = x.norm();
        let u = x / r;
        let gg = self.g.gradient(&u);
        let tang = &gg - &u * u.dot(&gg);
        tang / r + x * (4.0 * (r * r - 1.0))
    }

    fn describe(&self) -> String {
        format!("sphere({})", self.g.describe())
    }
}

/// `F(t,x,y) = t|x|² − |x|⁴ + e^{−1/t}·χ(2|x|²/t)·g(x/|x|) + Σ sₖ|yₖ|²`.
///
/// `x` lives in `v`, each `yₖ` in `v_prime[k].0` with sign `v_prime[k].1`. The graft is
/// present only for `t > 0`.
#[derive(Clone)]
pub struct BifurcationFamily {
    pub t: f64,
    pub v: Range<usize>,
    pub v_prime: Vec<(Range<usize>, f64)>,
    pub g: FunctionHandle,
}

impl BifurcationFamily {
    fn graft_scale(&self) -> f64 {
        if self.t > 0.0 {
            (-1.0 / self.t).exp()
        } else {
            0.0
        }
    }

    fn split(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_column_slice(&x.as_slice()[self.v.clone()])
    }
}

impl InvariantFunction for BifurcationFamily {
    fn value(&self, x: &DVector<f64>) -> f64 {
        let xv = self.split(x);
        let r2 = xv.norm_squared();
        let mut f = self.t * r2 - r2 * r2;
        let e = self.graft_scale();
        if e > 0.0 {
            let (chi, _) = bump(2.0 * r2 / self.t);
            if chi != 0.0 {
                f += e * chi * self.g.value(&(&xv / r2.sqrt()));
            }
        }
        for (r, s) in &self.v_prime {
            f += s * x.as_slice()[r.clone()].iter().map(|y| y * y).sum::<f64>();
        }
        f
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let xv = self.split(x);
        let r2 = xv.norm_squared();
        let mut gv = &xv * (2.0 * self.t - 4.0 * r2);
        let e = self.graft_scale();
        if e > 0.0 {
            let (chi, dchi) = bump(2.0 * r2 / self.t);
            if chi != 0.0 || dchi != 0.0 {
                let r = r2.sqrt();
                let u = &xv / r;
                let gval = self.g.value(&u);
                let gg = self.g.gradient(&u);
                let tang = &gg - &u * u.dot(&gg);
                gv += &xv * (e * dchi * 4.0 / self.t * gval) + tang * (e * chi / r);
            }
        }
        let mut out = DVector::zeros(x.len());
        for (i, v) in self.v.clone().zip(gv.iter()) {
            out[i] = *v;
        }
        for (r, s) in &self.v_prime {
            for i in r.clone() {
                out[i] = 2.0 * s * x[i];
            }
        }
        out
    }

    fn describe(&self) -> String {
        format!("family(t={}, g={})", self.t, self.g.describe())
    }
}
