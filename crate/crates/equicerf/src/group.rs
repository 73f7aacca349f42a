//! Concrete matrix realization of `H_σ`: Haar sampling, catalog characters and the
//! action on catalog summands.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::strata::{Embedding, IrrepLabel, Stratum};

pub type CMat = DMatrix<Complex64>;

/// Haar-random element of `U(m)`: QR of a complex Gaussian matrix with phases fixed.
pub fn haar_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMat {
    let z = CMat::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..m {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// An element `(u₁,…,u_r)` of `H_σ`.
#[derive(Clone, Debug)]
pub struct Element {
    pub blocks: Vec<CMat>,
}

/// Haar sample on `H_σ`.
///
/// Draws Haar `uᵢ ∈ U(mᵢ)` independently, then multiplies `u₁` by a uniformly chosen
/// root `ζ` of `ζ^{m₁n₁} = D⁻¹`, `D = ∏det(uᵢ)^{nᵢ}`. The correction is equivariant under
/// left multiplication by the kernel, so the result is Haar on the kernel.
pub fn sample_element<R: Rng + ?Sized>(s: &Stratum, rng: &mut R) -> Element {
    let mut blocks: Vec<CMat> = s.factors().iter().map(|f| haar_unitary(f.mult as usize, rng)).collect();
    let mut d = Complex64::new(1.0, 0.0);
    for (u, f) in blocks.iter().zip(s.factors()) {
        d *= u.determinant().powu(f.rank);
    }
    let f0 = s.factor(0);
    let k = (f0.mult * f0.rank) as f64;
    let branch = rng.random_range(0..(f0.mult * f0.rank)) as f64;
    let theta = (-d.arg() + 2.0 * std::f64::consts::PI * branch) / k;
    let zeta = Complex64::from_polar(1.0, theta);
    blocks[0] *= zeta;
    Element { blocks }
}

/// `∏ det(uᵢ)^{nᵢ}`, which is 1 on `H_σ`.
pub fn det_condition(s: &Stratum, g: &Element) -> Complex64 {
    let mut d = Complex64::new(1.0, 0.0);
    for (u, f) in g.blocks.iter().zip(s.factors()) {
        d *= u.determinant().powu(f.rank);
    }
    d
}

pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(b);
        off += k;
    }
    out
}

/// Pushes `h ∈ H_target` forward to `H_source`.
pub fn embed(e: &Embedding, h: &Element) -> Element {
    let blocks = e
        .blocks
        .iter()
        .map(|b| {
            let parts: Vec<&CMat> = b.iter().map(|&j| &h.blocks[j]).collect();
            block_diag(&parts)
        })
        .collect();
    Element { blocks }
}

/// The element as an `n×n` matrix `⊕ uᵢ ⊗ I_{nᵢ}`.
pub fn as_sun(s: &Stratum, g: &Element) -> CMat {
    let mats: Vec<CMat> = g
        .blocks
        .iter()
        .zip(s.factors())
        .map(|(u, f)| u.kronecker(&CMat::identity(f.rank as usize, f.rank as usize)))
        .collect();
    let refs: Vec<&CMat> = mats.iter().collect();
    block_diag(&refs)
}

/// Real character of a catalog irrep.
pub fn character(l: IrrepLabel, g: &Element) -> f64 {
    match l {
        IrrepLabel::Triv => 1.0,
        IrrepLabel::Adj(p) => g.blocks[p].trace().norm_sqr() - 1.0,
        IrrepLabel::Std(p, q) => 2.0 * (g.blocks[p].trace() * g.blocks[q].trace().conj()).re,
    }
}

/// `⟨χ,χ⟩` of a catalog irrep: 1 for real type, 2 for complex type.
pub fn character_norm(l: IrrepLabel) -> f64 {
    match l {
        IrrepLabel::Std(..) => 2.0,
        _ => 1.0,
    }
}

/// Orthonormal real basis of `su(m)` under `⟨X,Y⟩ = Re tr(X*Y)`.
pub fn su_basis(m: usize) -> Vec<CMat> {
    let i = Complex64::new(0.0, 1.0);
    let mut out = Vec::new();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..m {
        for b in a + 1..m {
            let mut x = CMat::zeros(m, m);
            x[(a, b)] = Complex64::new(s, 0.0);
            x[(b, a)] = Complex64::new(-s, 0.0);
            out.push(x);
            let mut y = CMat::zeros(m, m);
            y[(a, b)] = i * s;
            y[(b, a)] = i * s;
            out.push(y);
        }
    }
    for k in 1..m {
        // i·diag(1,…,1,−k,0,…)/√(k(k+1))
        let norm = ((k * (k + 1)) as f64).sqrt();
        let mut h = CMat::zeros(m, m);
        for a in 0..k {
            h[(a, a)] = i / norm;
        }
        h[(k, k)] = i * (-(k as f64) / norm);
        out.push(h);
    }
    out
}

/// Coordinates of a matrix against an orthonormal real basis.
pub fn coords(x: &CMat, basis: &[CMat]) -> Vec<f64> {
    basis.iter().map(|b| (b.adjoint() * x).trace().re).collect()
}

pub fn from_coords(c: &[f64], basis: &[CMat]) -> CMat {
    let (r, k) = basis[0].shape();
    let mut x = CMat::zeros(r, k);
    for (ci, b) in c.iter().zip(basis) {
        x += b * Complex64::new(*ci, 0.0);
    }
    x
}

/// Basis of `Mat_{a×b}(ℂ)` as a real space: real units then imaginary units.
pub fn mat_basis(a: usize, b: usize) -> Vec<CMat> {
    let mut out = Vec::new();
    for unit in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
        for r in 0..a {
            for c in 0..b {
                let mut x = CMat::zeros(a, b);
                x[(r, c)] = unit;
                out.push(x);
            }
        }
    }
    out
}

/// Orthonormal basis of the Lie algebra of `H_σ` as tuples `(ξ₁,…,ξ_r)`, `ξᵢ ∈ u(mᵢ)`,
/// with `Σ nᵢ tr ξᵢ = 0`.
pub fn lie_algebra_basis(s: &Stratum) -> Vec<Vec<CMat>> {
    let zero: Vec<CMat> = s
        .factors()
        .iter()
        .map(|f| CMat::zeros(f.mult as usize, f.mult as usize))
        .collect();
    let mut out = Vec::new();
    for (i, f) in s.factors().iter().enumerate() {
        for b in su_basis(f.mult as usize) {
            let mut v = zero.clone();
            v[i] = b;
            out.push(v);
        }
    }
    // central part: i·cᵢ·I_{mᵢ} with Σ nᵢ mᵢ cᵢ = 0
    let r = s.len();
    if r > 1 {
        let w: Vec<f64> = s.factors().iter().map(|f| (f.rank * f.mult) as f64).collect();
        let mut rows: Vec<DVector<f64>> = Vec::new();
        for j in 1..r {
            let mut c = DVector::zeros(r);
            c[0] = 1.0 / w[0];
            c[j] = -1.0 / w[j];
            rows.push(c);
        }
        let m = DMatrix::from_columns(&rows);
        let q = m.qr().q();
        for j in 0..q.ncols() {
            let mut v = zero.clone();
            for (i, f) in s.factors().iter().enumerate() {
                let mi = f.mult as usize;
                v[i] = CMat::identity(mi, mi) * Complex64::new(0.0, q[(i, j)] / (mi as f64).sqrt());
            }
            out.push(v);
        }
    }
    out
}

/// A catalog summand realized concretely: `Triv = ℝ`, `Adj(p) = su(m_p)`, `Std(p,q) = Mat_{m_p×m_q}(ℂ)`.
#[derive(Clone, Debug)]
pub struct Summand {
    pub label: IrrepLabel,
    basis: Vec<CMat>,
}

impl Summand {
    pub fn new(s: &Stratum, label: IrrepLabel) -> Self {
        let basis = match label {
            IrrepLabel::Triv => Vec::new(),
            IrrepLabel::Adj(p) => su_basis(s.factor(p).mult as usize),
            IrrepLabel::Std(p, q) => mat_basis(s.factor(p).mult as usize, s.factor(q).mult as usize),
        };
        Summand { label, basis }
    }

    pub fn dim(&self) -> usize {
        if self.label.is_trivial() {
            1
        } else {
            self.basis.len()
        }
    }

    pub fn to_matrix(&self, c: &[f64]) -> CMat {
        from_coords(c, &self.basis)
    }

    pub fn to_coords(&self, x: &CMat) -> Vec<f64> {
        coords(x, &self.basis)
    }

    /// Action matrix of `g` in this summand's real coordinates.
    pub fn action(&self, g: &Element) -> DMatrix<f64> {
        match self.label {
            IrrepLabel::Triv => DMatrix::identity(1, 1),
            IrrepLabel::Adj(p) => {
                let u = &g.blocks[p];
                self.linear(|x| u * x * u.adjoint())
            }
            IrrepLabel::Std(p, q) => {
                let (a, b) = (&g.blocks[p], &g.blocks[q]);
                self.linear(|x| a * x * b.adjoint())
            }
        }
    }

    /// Infinitesimal action of a Lie algebra element.
    pub fn infinitesimal(&self, xi: &[CMat]) -> DMatrix<f64> {
        match self.label {
            IrrepLabel::Triv => DMatrix::zeros(1, 1),
            IrrepLabel::Adj(p) => {
                let a = &xi[p];
                self.linear(|x| a * x - x * a)
            }
            IrrepLabel::Std(p, q) => {
                let (a, b) = (&xi[p], &xi[q]);
                self.linear(|x| a * x - x * b)
            }
        }
    }

    fn linear(&self, f: impl Fn(&CMat) -> CMat) -> DMatrix<f64> {
        let d = self.basis.len();
        let mut out = DMatrix::zeros(d, d);
        for (j, b) in self.basis.iter().enumerate() {
            let img = coords(&f(b), &self.basis);
            for i in 0..d {
                out[(i, j)] = img[i];
            }
        }
        out
    }
}
