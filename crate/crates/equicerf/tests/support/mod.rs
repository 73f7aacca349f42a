//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::IndexedRandom;
use rand::Rng;

use equicerf::bifgroup::{BaseWeights, Fallback, Projector};
use equicerf::casson::{
    apply_bifurcation, available_annihilates, available_creates, su4_strata, DatasetMove, Direction, ModuliDataset,
    OrbitRecord,
};
use equicerf::repcat::{IndexClass, RepElement, TotalIndex};
use equicerf::ringcore::{int, rat, CycSum, Rational};
use equicerf::strata::{is_admissible, Embedding, IrrepLabel, Stratum};

/// All multisets of `(rank, mult)` with `Σ rank·mult = n`, as sorted pair lists.
pub fn brute_strata(n: u32) -> BTreeSet<Vec<(u32, u32)>> {
    let pairs: Vec<(u32, u32)> = (1..=n)
        .flat_map(|r| (1..=n).map(move |m| (r, m)))
        .filter(|(r, m)| r * m <= n)
        .collect();
    let mut out = BTreeSet::new();
    fn go(
        pairs: &[(u32, u32)],
        start: usize,
        left: u32,
        cur: &mut Vec<(u32, u32)>,
        out: &mut BTreeSet<Vec<(u32, u32)>>,
    ) {
        if left == 0 {
            out.insert(cur.clone());
            return;
        }
        for i in start..pairs.len() {
            let (r, m) = pairs[i];
            if r * m <= left {
                cur.push((r, m));
                go(pairs, i, left - r * m, cur, out);
                cur.pop();
            }
        }
    }
    go(&pairs, 0, n, &mut Vec::new(), &mut out);
    out
}

/// Homology-sphere admissibility: at most one abelian (rank 1) summand, and not trivial.
pub fn brute_admissible(s: &[(u32, u32)], n: u32) -> bool {
    let rank_one = s.iter().filter(|(r, _)| *r == 1).count();
    rank_one <= 1 && s != [(1, n)]
}

/// Exact restriction along a block-diagonal inclusion, read from the embedding's blocks.
pub fn exact_restrict(label: IrrepLabel, e: &Embedding) -> BTreeMap<IrrepLabel, u32> {
    let t = &e.target;
    let mut out = BTreeMap::new();
    let mut add = |l: IrrepLabel, c: u32| {
        if c > 0 {
            *out.entry(l).or_insert(0) += c;
        }
    };
    let std = |a: usize, b: usize| IrrepLabel::Std(a.min(b), a.max(b));
    match label {
        IrrepLabel::Triv => add(IrrepLabel::Triv, 1),
        IrrepLabel::Adj(i) => {
            let b = &e.blocks[i];
            for &j in b {
                if t.factor(j).mult >= 2 {
                    add(IrrepLabel::Adj(j), 1);
                }
            }
            add(IrrepLabel::Triv, b.len() as u32 - 1);
            for x in 0..b.len() {
                for y in x + 1..b.len() {
                    add(std(b[x], b[y]), 1);
                }
            }
        }
        IrrepLabel::Std(i, k) => {
            for &a in &e.blocks[i] {
                for &b in &e.blocks[k] {
                    if a == b {
                        if t.factor(a).mult >= 2 {
                            add(IrrepLabel::Adj(a), 2);
                        }
                        add(IrrepLabel::Triv, 2);
                    } else {
                        add(std(a, b), 1);
                    }
                }
            }
        }
    }
    out
}

/// Spectral flow by following eigenvalue branches (matched by eigenvector overlap) over a
/// fine grid and counting sign changes of each branch of `A + ε`.
pub fn crossing_flow(f: &dyn Fn(f64) -> DMatrix<f64>, steps: usize, eps: f64) -> i64 {
    let d = f(0.0).nrows();
    let eig = |t: f64| {
        let e = SymmetricEigen::new(f(t) + DMatrix::identity(d, d) * eps);
        let mut idx: Vec<usize> = (0..d).collect();
        idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
        let vals: Vec<f64> = idx.iter().map(|&i| e.eigenvalues[i]).collect();
        let vecs = DMatrix::from_columns(
            &idx.iter()
                .map(|&i| e.eigenvectors.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        (vals, vecs)
    };
    let (mut vals, mut vecs) = eig(0.0);
    let mut count = 0i64;
    for k in 1..=steps {
        let (nv, nvec) = eig(k as f64 / steps as f64);
        // greedy matching of branches by largest overlap
        let overlap = vecs.transpose() * &nvec;
        let mut used = vec![false; d];
        let mut matched = vec![0usize; d];
        let mut order: Vec<(usize, usize)> = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).collect();
        order.sort_by(|a, b| overlap[*b].abs().total_cmp(&overlap[*a].abs()));
        let mut done = vec![false; d];
        for (i, j) in order {
            if !done[i] && !used[j] {
                done[i] = true;
                used[j] = true;
                matched[i] = j;
            }
        }
        for i in 0..d {
            let (a, b) = (vals[i], nv[matched[i]]);
            if a < 0.0 && b >= 0.0 {
                count += 1;
            } else if a >= 0.0 && b < 0.0 {
                count -= 1;
            }
        }
        vals = nv;
        vecs = nvec;
    }
    count
}

pub fn random_symmetric<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let q = rng.random_range(1..=6);
    rat(rng.random_range(-q..=q), q)
}

/// Random record on one of the five SU(4) strata with nonnegative nontrivial flow.
pub fn random_record<R: Rng>(rng: &mut R) -> OrbitRecord {
    let strata = su4_strata();
    let s = strata.choose(rng).unwrap().clone();
    let mut terms = vec![(IrrepLabel::Triv, int(rng.random_range(-3..=3)))];
    for l in s.catalog().into_iter().filter(|l| !l.is_trivial()) {
        terms.push((l, int(rng.random_range(0..=3))));
    }
    let sf = RepElement::new(&s, terms).unwrap();
    let cs = (0..OrbitRecord::cs_factors(&s).len())
        .map(|_| random_rational(rng))
        .collect();
    OrbitRecord::new(sf, cs)
}

pub fn random_dataset<R: Rng>(rng: &mut R, records: usize) -> ModuliDataset {
    let mut ds = ModuliDataset::with_sample_tau(4);
    for _ in 0..records {
        ds.orbits.push(random_record(rng));
    }
    ds
}

/// Death pairs currently present.
pub fn available_deaths(ds: &ModuliDataset) -> Vec<DatasetMove> {
    let mut out = Vec::new();
    for i in 0..ds.orbits.len() {
        for j in i + 1..ds.orbits.len() {
            let (a, b) = (&ds.orbits[i], &ds.orbits[j]);
            if a.stratum == b.stratum && a.cs == b.cs {
                let d = b.sf.sub(&a.sf).unwrap();
                let one = RepElement::triv(&a.stratum, int(1));
                if d == one || d == one.scale(int(-1)) {
                    out.push(DatasetMove::BirthDeath {
                        direction: Direction::Annihilate,
                        template: None,
                        pair: Some((i, j)),
                    });
                }
            }
        }
    }
    out
}

/// Creations whose shed records stay on homology-sphere strata.
pub fn admissible_creates(ds: &ModuliDataset, p: &Projector) -> Vec<DatasetMove> {
    available_creates(ds, p)
        .into_iter()
        .filter(|mv| {
            apply_bifurcation(ds, mv, p).is_ok_and(|next| next.orbits.iter().all(|r| is_admissible(&r.stratum)))
        })
        .collect()
}

/// A random applicable move, preferring annihilations and deaths when present.
pub fn random_move<R: Rng>(ds: &ModuliDataset, p: &Projector, rng: &mut R) -> DatasetMove {
    let roll = rng.random_range(0..4);
    let pick = |v: Vec<DatasetMove>, rng: &mut R| v.choose(rng).cloned();
    let candidate = match roll {
        0 => pick(admissible_creates(ds, p), rng),
        1 => pick(available_annihilates(ds, p), rng),
        2 => pick(available_deaths(ds), rng),
        _ => None,
    };
    candidate.unwrap_or_else(|| DatasetMove::BirthDeath {
        direction: Direction::Create,
        template: Some(random_record(rng)),
        pair: None,
    })
}

pub fn random_moves<R: Rng>(ds: &ModuliDataset, p: &Projector, rng: &mut R, count: usize) -> ModuliDataset {
    let mut cur = ds.clone();
    for _ in 0..count {
        let mv = random_move(&cur, p, rng);
        cur = apply_bifurcation(&cur, &mv, p).expect("generated moves apply");
    }
    cur
}

/// Random cyclotomic weights on `[σ, 0]` for the reducible SU(4) strata.
pub fn random_base<R: Rng>(rng: &mut R) -> BaseWeights {
    let mut b = BaseWeights::with_fallback(Fallback::Zero);
    for s in su4_strata().iter().filter(|s| !s.is_irreducible()) {
        let w = CycSum::term(random_rational(rng), random_rational(rng)) + CycSum::constant(random_rational(rng));
        b.set(IndexClass::zero_rep(s), w);
    }
    b
}

/// Random total index on the SU(4) strata with small integer coefficients.
pub fn random_total<R: Rng>(rng: &mut R, terms: usize) -> TotalIndex {
    let mut out = TotalIndex::zero();
    for _ in 0..terms {
        let s = su4_strata().choose(rng).unwrap().clone();
        let rep = random_rep(&s, rng);
        out.add_term(IndexClass::new(rep), rng.random_range(-2..=2));
    }
    out
}

pub fn random_rep<R: Rng>(s: &Stratum, rng: &mut R) -> RepElement {
    let terms: Vec<_> = s
        .catalog()
        .into_iter()
        .map(|l| {
            let c = if l.is_trivial() {
                rat(rng.random_range(-8..=8), rng.random_range(1..=3))
            } else {
                int(rng.random_range(-2..=3))
            };
            (l, c)
        })
        .collect();
    RepElement::new(s, terms).unwrap()
}

/// Real dimension and orthogonal projector of each isotypic piece.
pub type Projectors = Vec<(usize, DMatrix<f64>)>;

/// A random path on `ℝ⁶ = ℝ ⊗ ℝ² ⊕ ℂ ⊗ ℂ²` commuting with `U(1)` acting on the second summand,
/// expressed in a random orthonormal frame. Returns the path and the projectors with
/// their real irrep dimensions `1` and `2`.
pub fn random_equivariant_path<R: Rng>(
    rng: &mut R,
) -> (impl Fn(f64) -> DMatrix<f64> + Clone + Send + Sync + 'static, Projectors) {
    let q = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0)).qr().q();
    let block = |rng: &mut R, shift: f64| {
        let mut m = DMatrix::zeros(6, 6);
        let r = random_symmetric(2, rng);
        m.view_mut((0, 0), (2, 2)).copy_from(&r);
        let s = random_symmetric(2, rng);
        let k0: f64 = rng.random_range(-1.0..1.0);
        let k = DMatrix::from_row_slice(2, 2, &[0.0, -k0, k0, 0.0]);
        m.view_mut((2, 2), (2, 2)).copy_from(&s);
        m.view_mut((4, 4), (2, 2)).copy_from(&s);
        m.view_mut((2, 4), (2, 2)).copy_from(&(-&k));
        m.view_mut((4, 2), (2, 2)).copy_from(&k);
        m + DMatrix::identity(6, 6) * shift
    };
    let a0 = block(rng, -0.6);
    let a1 = block(rng, 0.6);
    let a2 = block(rng, 0.0) * 2.0;
    let (qa0, qa1, qa2) = (
        &q * a0 * q.transpose(),
        &q * a1 * q.transpose(),
        &q * a2 * q.transpose(),
    );
    let path = move |t: f64| &qa0 * (1.0 - t) + &qa1 * t + &qa2 * (std::f64::consts::PI * t).sin();
    let mut p1 = DMatrix::zeros(6, 6);
    p1.view_mut((0, 0), (2, 2)).fill_with_identity();
    let p2 = DMatrix::identity(6, 6) - &p1;
    let projectors = vec![(1, &q * p1 * q.transpose()), (2, &q * p2 * q.transpose())];
    (path, projectors)
}

/// A radial function on a ball of radius 1 whose `φ′` has 0–3 simple roots in `(0.05, 0.95)`
/// and is negative at `u = 1`.
pub fn random_radial<R: Rng>(rng: &mut R) -> equicerf::morse::Radial {
    let k = rng.random_range(0..=3);
    let mut roots: Vec<f64> = Vec::new();
    while roots.len() < k {
        let r = rng.random_range(0.05..0.95);
        if roots.iter().all(|q| (q - r).abs() > 0.08) {
            roots.push(r);
        }
    }
    equicerf::morse::Radial::from_derivative_roots(&roots, rng.random_range(0.5..2.0))
}

/// Analytic total index of a radial function on an `su(2)` ball under `H_((2,2))`:
/// the origin carries `Adj` when it is a maximum, each critical sphere `|x|² = r` carries
/// one trivial unit when it is a radial maximum.
pub fn radial_total_oracle(f: &equicerf::morse::Radial, roots: &[f64]) -> TotalIndex {
    let d = Stratum::of(&[(2, 2)]);
    let c = Stratum::of(&[(2, 1), (2, 1)]);
    let mut out = TotalIndex::zero();
    let origin = if f.derivative(0.0, 1) < 0.0 {
        RepElement::single(&d, IrrepLabel::Adj(0), int(1)).unwrap()
    } else {
        RepElement::zero(&d)
    };
    out.add_term(IndexClass::new(origin), 1);
    for &r in roots {
        let unit = if f.derivative(r, 2) < 0.0 { 1 } else { 0 };
        out.add_term(IndexClass::new(RepElement::triv(&c, int(unit))), 1);
    }
    out
}

/// Random weights on `[((2,2)), 0]` and `[((2,1),(2,1)), 0]`.
pub fn random_su2_base<R: Rng>(rng: &mut R) -> BaseWeights {
    let mut b = BaseWeights::with_fallback(Fallback::Error);
    for s in [Stratum::of(&[(2, 2)]), Stratum::of(&[(2, 1), (2, 1)])] {
        b.set(
            IndexClass::zero_rep(&s),
            CycSum::term(random_rational(rng), random_rational(rng)),
        );
    }
    b
}

/// Real dimension of symmetric maps on `ℝ^{r·k}` commuting with the given structure maps.
pub fn commutant_sym_dim(r: usize, structure: &[DMatrix<f64>]) -> usize {
    let d = structure.first().map_or(r, |j| j.nrows());
    let basis: Vec<DMatrix<f64>> = (0..d)
        .flat_map(|i| (i..d).map(move |j| (i, j)))
        .map(|(i, j)| {
            let mut m = DMatrix::zeros(d, d);
            m[(i, j)] = 1.0;
            m[(j, i)] = 1.0;
            m
        })
        .collect();
    if structure.is_empty() {
        return basis.len();
    }
    let rows = structure.len() * d * d;
    let mut sys = DMatrix::zeros(rows, basis.len());
    for (c, b) in basis.iter().enumerate() {
        let mut off = 0;
        for j in structure {
            let comm = b * j - j * b;
            for (k, v) in comm.iter().enumerate() {
                sys[(off + k, c)] = *v;
            }
            off += d * d;
        }
    }
    let sv = sys.svd(false, false).singular_values;
    basis.len() - sv.iter().filter(|s| **s > 1e-9).count()
}

pub fn complex_structure(r: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * r, 2 * r);
    for a in 0..r {
        j[(2 * a + 1, 2 * a)] = 1.0;
        j[(2 * a, 2 * a + 1)] = -1.0;
    }
    j
}

/// Right multiplication by `i` and `j` on `ℍ^r ≅ ℝ^{4r}`.
pub fn quaternion_structure(r: usize) -> Vec<DMatrix<f64>> {
    let ri = [[0., -1., 0., 0.], [1., 0., 0., 0.], [0., 0., 0., 1.], [0., 0., -1., 0.]];
    let rj = [[0., 0., -1., 0.], [0., 0., 0., -1.], [1., 0., 0., 0.], [0., 1., 0., 0.]];
    [ri, rj]
        .iter()
        .map(|m| {
            let mut out = DMatrix::zeros(4 * r, 4 * r);
            for a in 0..r {
                for x in 0..4 {
                    for y in 0..4 {
                        out[(4 * a + x, 4 * a + y)] = m[x][y];
                    }
                }
            }
            out
        })
        .collect()
}
