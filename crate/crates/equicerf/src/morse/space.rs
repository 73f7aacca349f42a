//! Representation balls: the carrier, its group action, and stabilizers of points.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{embed, lie_algebra_basis, sample_element, CMat, Element, Summand};
use crate::strata::{Embedding, IrrepLabel, Move, Stratum};

/// What acts on the ball.
#[derive(Clone, Debug)]
pub enum Carrier {
    /// `H_σ` acting on a direct sum of catalog summands.
    Rep { stratum: Stratum, labels: Vec<IrrepLabel> },
    /// A finite group of orthogonal matrices, stored as its full element list with the
    /// identity first.
    Finite { dim: usize, elements: Vec<DMatrix<f64>> },
}

#[derive(Clone, Debug)]
pub struct ModelSpace {
    pub carrier: Carrier,
    pub radius: f64,
    summands: Vec<Summand>,
    offsets: Vec<usize>,
}

impl ModelSpace {
    pub fn rep_ball(stratum: &Stratum, labels: &[IrrepLabel], radius: f64) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Usage("a model space needs at least one summand".into()));
        }
        let mut summands = Vec::new();
        let mut offsets = vec![0];
        for &l in labels {
            stratum.check_label(l)?;
            let s = Summand::new(stratum, l);
            offsets.push(offsets.last().unwrap() + s.dim());
            summands.push(s);
        }
        Ok(ModelSpace {
            carrier: Carrier::Rep {
                stratum: stratum.clone(),
                labels: labels.to_vec(),
            },
            radius,
            summands,
            offsets,
        })
    }

    /// `SU(m)` on `su(m)`.
    pub fn adjoint_ball(m: u32, radius: f64) -> Result<Self> {
        Self::rep_ball(&Stratum::of(&[(1, m)]), &[IrrepLabel::Adj(0)], radius)
    }

    /// `S(U(a)×U(b))` on `Mat_{a×b}(ℂ)` (up to transposition when `a > b`).
    pub fn matrix_ball(a: u32, b: u32, radius: f64) -> Result<Self> {
        Self::rep_ball(
            &Stratum::of(&[(1, a.min(b)), (1, a.max(b))]),
            &[IrrepLabel::Std(0, 1)],
            radius,
        )
    }

    /// Direct sum of balls over the same group.
    pub fn product(parts: &[ModelSpace], radius: f64) -> Result<Self> {
        let mut labels = Vec::new();
        let mut stratum = None;
        for p in parts {
            match &p.carrier {
                Carrier::Rep { stratum: s, labels: l } => {
                    if stratum.get_or_insert_with(|| s.clone()) != s {
                        return Err(Error::Incompatible("product of balls over different groups".into()));
                    }
                    labels.extend(l.iter().copied());
                }
                Carrier::Finite { .. } => {
                    return Err(Error::Unsupported("products of finite-action balls".into()));
                }
            }
        }
        let s = stratum.ok_or_else(|| Error::Usage("empty product".into()))?;
        Self::rep_ball(&s, &labels, radius)
    }

    /// Closes the generators under multiplication; they must be orthogonal.
    pub fn finite_ball(dim: usize, generators: &[DMatrix<f64>], radius: f64) -> Result<Self> {
        for g in generators {
            if g.nrows() != dim || g.ncols() != dim {
                return Err(Error::Usage(format!("generator is not {dim}×{dim}")));
            }
            if (g.transpose() * g - DMatrix::identity(dim, dim)).norm() > 1e-10 {
                return Err(Error::Incompatible("finite generators must be orthogonal".into()));
            }
        }
        let mut elements = vec![DMatrix::identity(dim, dim)];
        let mut frontier = elements.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for a in &frontier {
                for g in generators {
                    let p = g * a;
                    if !elements.iter().any(|e| (e - &p).norm() < 1e-9) {
                        elements.push(p.clone());
                        next.push(p);
                    }
                }
            }
            if elements.len() > 10_000 {
                return Err(Error::Unsupported("finite group closure exceeds 10000 elements".into()));
            }
            frontier = next;
        }
        Ok(ModelSpace {
            carrier: Carrier::Finite { dim, elements },
            radius,
            summands: Vec::new(),
            offsets: vec![0, dim],
        })
    }

    /// `ℤ/2` acting on `ℝ` by sign.
    pub fn z2_line(radius: f64) -> Self {
        Self::finite_ball(1, &[DMatrix::from_element(1, 1, -1.0)], radius).expect("valid")
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn stratum(&self) -> Option<&Stratum> {
        match &self.carrier {
            Carrier::Rep { stratum, .. } => Some(stratum),
            Carrier::Finite { .. } => None,
        }
    }

    pub fn labels(&self) -> &[IrrepLabel] {
        match &self.carrier {
            Carrier::Rep { labels, .. } => labels,
            Carrier::Finite { .. } => &[],
        }
    }

    pub fn range(&self, k: usize) -> Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn summand(&self, k: usize) -> &Summand {
        &self.summands[k]
    }

    pub fn finite_elements(&self) -> Option<&[DMatrix<f64>]> {
        match &self.carrier {
            Carrier::Finite { elements, .. } => Some(elements),
            Carrier::Rep { .. } => None,
        }
    }

    /// Action matrix of a group element given by its blocks.
    pub fn action(&self, g: &Element) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (k, s) in self.summands.iter().enumerate() {
            let r = self.range(k);
            out.view_mut((r.start, r.start), (r.len(), r.len()))
                .copy_from(&s.action(g));
        }
        out
    }

    /// A random group element acting on the ball.
    pub fn sample_action<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        match &self.carrier {
            Carrier::Rep { stratum, .. } => self.action(&sample_element(stratum, rng)),
            Carrier::Finite { elements, .. } => elements[rng.random_range(0..elements.len())].clone(),
        }
    }

    /// Columns spanning the infinitesimal action at `x` (unnormalized).
    pub fn orbit_directions(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let Carrier::Rep { stratum, .. } = &self.carrier else {
            return DMatrix::zeros(n, 0);
        };
        let basis = lie_algebra_basis(stratum);
        let mut out = DMatrix::zeros(n, basis.len());
        for (j, xi) in basis.iter().enumerate() {
            for (k, s) in self.summands.iter().enumerate() {
                let r = self.range(k);
                let v = s.infinitesimal(xi) * x.rows(r.start, r.len());
                out.view_mut((r.start, j), (r.len(), 1)).copy_from(&v);
            }
        }
        out
    }

    pub fn summand_matrix(&self, x: &DVector<f64>, k: usize) -> CMat {
        self.summands[k].to_matrix(&x.as_slice()[self.range(k)])
    }

    /// Orbit invariants used to identify critical orbits: Triv coordinates, sorted
    /// eigenvalues of `−iX` for adjoint summands, sorted singular values otherwise.
    ///
    /// On finite balls: the lexicographically largest point of the orbit.
    pub fn invariants(&self, x: &DVector<f64>) -> Vec<f64> {
        if let Carrier::Finite { elements, .. } = &self.carrier {
            return elements
                .iter()
                .map(|g| (g * x).as_slice().to_vec())
                .max_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap_or_default();
        }
        let mut out = Vec::new();
        for (k, s) in self.summands.iter().enumerate() {
            match s.label {
                IrrepLabel::Triv => out.push(x[self.range(k).start]),
                IrrepLabel::Adj(_) => {
                    let a = self.summand_matrix(x, k) * Complex64::new(0.0, -1.0);
                    let mut ev: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
                    ev.sort_by(|a, b| b.total_cmp(a));
                    out.extend(ev);
                }
                IrrepLabel::Std(..) => {
                    let mut sv: Vec<f64> = self.summand_matrix(x, k).singular_values().iter().copied().collect();
                    sv.sort_by(|a, b| b.total_cmp(a));
                    out.extend(sv);
                }
            }
        }
        out
    }
}

/// Stabilizer of a point of a `Rep` ball: `Stab(x) = C·ι(H_K)·C⁻¹` with `ι` the
/// embedding of the normal-form stabilizer and `C` blockwise unitary.
#[derive(Clone, Debug)]
pub struct LieStabilizer {
    pub embedding: Embedding,
    pub conjugator: Vec<CMat>,
}

impl LieStabilizer {
    /// `C·ι(k)·C⁻¹` for `k ∈ H_K`.
    pub fn realize(&self, k: &Element) -> Element {
        let e = embed(&self.embedding, k);
        Element {
            blocks: e
                .blocks
                .iter()
                .zip(&self.conjugator)
                .map(|(b, c)| c * b * c.adjoint())
                .collect(),
        }
    }
}

/// Extends orthonormal columns to a unitary matrix.
fn complete_unitary(q: &CMat, m: usize) -> CMat {
    let mut cols: Vec<nalgebra::DVector<Complex64>> = q.column_iter().map(|c| c.into_owned()).collect();
    for i in 0..m {
        if cols.len() == m {
            break;
        }
        let mut v = nalgebra::DVector::<Complex64>::zeros(m);
        v[i] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let nrm = v.norm();
        if nrm > 0.5 {
            cols.push(v / Complex64::new(nrm, 0.0));
        }
    }
    CMat::from_columns(&cols)
}

/// Sizes of runs of values (sorted descending) that agree within `tol`.
fn clusters(vals: &[f64], tol: f64) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        if i > 0 && (vals[i - 1] - v).abs() <= tol {
            *out.last_mut().unwrap() += 1;
        } else {
            out.push(1);
        }
    }
    out
}

/// Normal form and stabilizer of `x`. At most one nontrivial summand may be nonzero.
pub fn lie_stabilizer(space: &ModelSpace, x: &DVector<f64>) -> Result<LieStabilizer> {
    let Carrier::Rep { stratum, labels } = &space.carrier else {
        return Err(Error::Incompatible("finite balls have no Lie stabilizer".into()));
    };
    let mut conjugator: Vec<CMat> = stratum
        .factors()
        .iter()
        .map(|f| CMat::identity(f.mult as usize, f.mult as usize))
        .collect();
    let zero_tol = 1e-7;
    let active: Vec<usize> = (0..labels.len())
        .filter(|&k| !labels[k].is_trivial() && x.rows(space.range(k).start, space.range(k).len()).norm() > zero_tol)
        .collect();
    if active.len() > 1 {
        return Err(Error::Unsupported(format!(
            "point with {} nonzero nontrivial summands; stabilizers are computed for one",
            active.len()
        )));
    }
    let Some(&k) = active.first() else {
        return Ok(LieStabilizer {
            embedding: Embedding::identity(stratum),
            conjugator,
        });
    };
    let xm = space.summand_matrix(x, k);
    let mv = match labels[k] {
        IrrepLabel::Adj(p) => {
            let eig = (&xm * Complex64::new(0.0, -1.0)).symmetric_eigen();
            let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
            let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let parts = clusters(&vals, 1e-6 * scale.max(1e-3));
            let cols: Vec<_> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
            conjugator[p] = CMat::from_columns(&cols);
            Move::Adjoint { p, parts }
        }
        IrrepLabel::Std(p, q) => {
            let svd = xm.clone().svd(true, true);
            let u = svd.u.expect("requested");
            let v = svd.v_t.expect("requested").adjoint();
            let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
            order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
            let vals: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
            let scale = vals[0];
            let zero = vals.iter().filter(|&&s| s <= 1e-6 * scale).count() as u32;
            let nonzero = &vals[..vals.len() - zero as usize];
            let sv_parts = clusters(nonzero, 1e-6 * scale);
            let uc: Vec<_> = order.iter().map(|&i| u.column(i).into_owned()).collect();
            let vc: Vec<_> = order.iter().map(|&i| v.column(i).into_owned()).collect();
            conjugator[p] = complete_unitary(&CMat::from_columns(&uc), xm.nrows());
            conjugator[q] = complete_unitary(&CMat::from_columns(&vc), xm.ncols());
            Move::OffDiag { p, q, sv_parts, zero }
        }
        IrrepLabel::Triv => unreachable!("filtered above"),
    };
    let embedding = Embedding::from_move(stratum, &mv)?;
    Ok(LieStabilizer { embedding, conjugator })
}

/// Indices of the finite group elements fixing `x`.
pub fn finite_stabilizer(space: &ModelSpace, x: &DVector<f64>) -> Result<Vec<usize>> {
    let els = space
        .finite_elements()
        .ok_or_else(|| Error::Incompatible("not a finite-action ball".into()))?;
    let tol = 1e-7 * (1.0 + x.norm());
    Ok((0..els.len()).filter(|&i| (&els[i] * x - x).norm() < tol).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_fixes(space: &ModelSpace, x: &DVector<f64>, st: &LieStabilizer) {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let k = sample_element(&st.embedding.target, &mut rng);
            let h = st.realize(&k);
            assert!((space.action(&h) * x - x).norm() < 1e-9);
        }
    }

    #[test]
    fn adjoint_stabilizer_of_su3_points() {
        let sp = ModelSpace::adjoint_ball(3, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // diag(a, a, -2a) conjugated by a random element
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.0, 0.3),
            Complex64::new(0.0, 0.3),
            Complex64::new(0.0, -0.6),
        ]));
        let g = sample_element(sp.stratum().unwrap(), &mut rng);
        let xm = &g.blocks[0] * d * g.blocks[0].adjoint();
        let x = DVector::from_vec(sp.summand(0).to_coords(&xm));
        let st = lie_stabilizer(&sp, &x).unwrap();
        assert_eq!(st.embedding.target, Stratum::of(&[(1, 1), (1, 2)]));
        check_fixes(&sp, &x, &st);
    }

    #[test]
    fn offdiag_stabilizer_with_zero_singular_values() {
        let s = Stratum::of(&[(1, 2), (1, 3)]);
        let sp = ModelSpace::rep_ball(&s, &[IrrepLabel::Std(0, 1)], 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut xm = CMat::zeros(2, 3);
        xm[(0, 0)] = Complex64::new(0.5, 0.0);
        let g = sample_element(&s, &mut rng);
        let xm = &g.blocks[0] * xm * g.blocks[1].adjoint();
        let x = DVector::from_vec(sp.summand(0).to_coords(&xm));
        let st = lie_stabilizer(&sp, &x).unwrap();
        assert_eq!(
            st.embedding.moves[0],
            Move::OffDiag {
                p: 0,
                q: 1,
                sv_parts: vec![1],
                zero: 1
            }
        );
        check_fixes(&sp, &x, &st);
    }

    #[test]
    fn z2_closure() {
        let sp = ModelSpace::z2_line(1.0);
        assert_eq!(sp.finite_elements().unwrap().len(), 2);
        let x = DVector::from_vec(vec![0.0]);
        assert_eq!(finite_stabilizer(&sp, &x).unwrap(), vec![0, 1]);
        let x = DVector::from_vec(vec![0.5]);
        assert_eq!(finite_stabilizer(&sp, &x).unwrap(), vec![0]);
    }
}
