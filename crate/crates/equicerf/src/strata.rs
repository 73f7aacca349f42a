//! Reducibility strata of SU(n), their stabilizer groups, and bifurcation moves.
//!
//! A stratum `((n₁,m₁),…,(n_r,m_r))` records an SU(n)-connection splitting into
//! irreducible pieces of rank `nᵢ` appearing `mᵢ` times. Its stabilizer is
//! `H_σ = S(U(m₁)^{n₁} × … × U(m_r)^{n_r})`, realized as tuples `(u₁,…,u_r)`,
//! `uᵢ ∈ U(mᵢ)`, with `∏ det(uᵢ)^{nᵢ} = 1`.
//!
//! ```
//! use equicerf::strata::{enumerate_strata, Mode};
//!
//! let zhs = enumerate_strata(4, Mode::HomologySphere);
//! assert_eq!(zhs.len(), 5);
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ringcore::gcd_all;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Factor {
    pub rank: u32,
    pub mult: u32,
}

impl Factor {
    pub fn new(rank: u32, mult: u32) -> Self {
        Factor { rank, mult }
    }
}

/// Canonical tuple of `(rank, mult)` pairs, sorted by rank then mult.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Stratum {
    n: u32,
    factors: Vec<Factor>,
}

#[derive(Deserialize)]
struct RawStratum {
    n: Option<u32>,
    factors: Vec<Factor>,
}

impl<'de> Deserialize<'de> for Stratum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawStratum::deserialize(d)?;
        let s = Stratum::new(raw.factors).map_err(serde::de::Error::custom)?;
        if let Some(n) = raw.n {
            if n != s.n {
                return Err(serde::de::Error::custom(format!(
                    "field n = {n} but factors have total rank {}",
                    s.n
                )));
            }
        }
        Ok(s)
    }
}

impl Stratum {
    /// Canonicalizes `factors`, dropping zero multiplicities.
    pub fn new(factors: impl IntoIterator<Item = Factor>) -> Result<Self> {
        let (s, _) = Self::canonical(factors.into_iter().collect())?;
        Ok(s)
    }

    /// Shorthand for tests and examples: `Stratum::of(&[(1,1),(3,1)])`.
    pub fn of(pairs: &[(u32, u32)]) -> Self {
        Self::new(pairs.iter().map(|&(r, m)| Factor::new(r, m))).expect("valid stratum")
    }

    /// Returns the canonical stratum and, for each input position, its canonical index
    /// (`None` for dropped zero-multiplicity entries).
    pub fn canonical(factors: Vec<Factor>) -> Result<(Self, Vec<Option<usize>>)> {
        if factors.iter().any(|f| f.rank == 0) {
            return Err(Error::InvalidStratum("rank 0 factor".into()));
        }
        let mut order: Vec<usize> = (0..factors.len()).filter(|&i| factors[i].mult > 0).collect();
        if order.is_empty() {
            return Err(Error::InvalidStratum("no factors".into()));
        }
        order.sort_by_key(|&i| (factors[i], i));
        let mut perm = vec![None; factors.len()];
        for (pos, &i) in order.iter().enumerate() {
            perm[i] = Some(pos);
        }
        let sorted: Vec<Factor> = order.iter().map(|&i| factors[i]).collect();
        let n = sorted.iter().map(|f| f.rank * f.mult).sum();
        Ok((Stratum { n, factors: sorted }, perm))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> Factor {
        self.factors[i]
    }

    /// Number of factors `r`.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `((n,1))`: irreducible connection, stabilizer the center.
    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].mult == 1
    }

    pub fn group(&self) -> GroupDescriptor {
        group_of(self)
    }

    pub fn catalog(&self) -> Vec<IrrepLabel> {
        let mut out = vec![IrrepLabel::Triv];
        for (p, f) in self.factors.iter().enumerate() {
            if f.mult >= 2 {
                out.push(IrrepLabel::Adj(p));
            }
        }
        for p in 0..self.len() {
            for q in p + 1..self.len() {
                out.push(IrrepLabel::Std(p, q));
            }
        }
        out
    }

    pub fn has_label(&self, l: IrrepLabel) -> bool {
        match l {
            IrrepLabel::Triv => true,
            IrrepLabel::Adj(p) => p < self.len() && self.factors[p].mult >= 2,
            IrrepLabel::Std(p, q) => p < q && q < self.len(),
        }
    }

    pub fn check_label(&self, l: IrrepLabel) -> Result<()> {
        if self.has_label(l) {
            Ok(())
        } else {
            Err(Error::UnknownLabel {
                label: l.to_string(),
                stratum: self.to_string(),
            })
        }
    }

    pub fn real_dim(&self, l: IrrepLabel) -> u32 {
        match l {
            IrrepLabel::Triv => 1,
            IrrepLabel::Adj(p) => {
                let m = self.factors[p].mult;
                m * m - 1
            }
            IrrepLabel::Std(p, q) => 2 * self.factors[p].mult * self.factors[q].mult,
        }
    }

    pub fn division_type(&self, l: IrrepLabel) -> DivisionType {
        match l {
            IrrepLabel::Std(..) => DivisionType::Complex,
            _ => DivisionType::Real,
        }
    }

    /// Permutations of factor indices that fix the factor list (swaps of equal `(rank, mult)`).
    pub fn symmetries(&self) -> Vec<Vec<usize>> {
        let mut groups: BTreeMap<Factor, Vec<usize>> = BTreeMap::new();
        for (i, f) in self.factors.iter().enumerate() {
            groups.entry(*f).or_default().push(i);
        }
        let mut perms = vec![(0..self.len()).collect::<Vec<_>>()];
        for idx in groups.values().filter(|g| g.len() > 1) {
            let mut next = Vec::new();
            for base in &perms {
                for arrangement in permutations(idx) {
                    let mut p = base.clone();
                    for (a, b) in idx.iter().zip(&arrangement) {
                        p[*a] = *b;
                    }
                    next.push(p);
                }
            }
            perms = next;
        }
        perms
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({},{})", x.rank, x.mult)?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Stratum {
    type Err = Error;

    /// Accepts `((1,1),(3,1))`, `(1,1),(3,1)` or `(4,1)`.
    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u32> = s
            .split(|c: char| !c.is_ascii_digit())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| Error::InvalidStratum(s.into())))
            .collect::<Result<_>>()?;
        if digits.is_empty() || !digits.len().is_multiple_of(2) {
            return Err(Error::InvalidStratum(s.into()));
        }
        Stratum::new(digits.chunks(2).map(|c| Factor::new(c[0], c[1])))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Raw,
    HomologySphere,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Mode::Raw),
            "zhs" | "homology_sphere" => Ok(Mode::HomologySphere),
            _ => Err(Error::Usage(format!("unknown mode {s:?}; expected raw or zhs"))),
        }
    }
}

/// Strata that can carry perturbed-flat connections over an integer homology sphere:
/// at most one rank-1 factor, and not `((1,n))`.
pub fn is_admissible(s: &Stratum) -> bool {
    let rank_one = s.factors.iter().filter(|f| f.rank == 1).count();
    rank_one <= 1 && !(s.len() == 1 && s.factors[0].rank == 1)
}

fn mode_allows(s: &Stratum, mode: Mode) -> bool {
    mode == Mode::Raw || is_admissible(s)
}

pub fn enumerate_strata(n: u32, mode: Mode) -> Vec<Stratum> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    extend_strata(n, Factor::new(1, 1), &mut cur, &mut out);
    out.retain(|s| mode_allows(s, mode));
    out.sort();
    out
}

fn extend_strata(rest: u32, min: Factor, cur: &mut Vec<Factor>, out: &mut Vec<Stratum>) {
    if rest == 0 {
        if !cur.is_empty() {
            out.push(Stratum::new(cur.clone()).expect("nonempty"));
        }
        return;
    }
    for rank in min.rank..=rest {
        let start = if rank == min.rank { min.mult } else { 1 };
        for mult in start..=rest / rank {
            let f = Factor::new(rank, mult);
            cur.push(f);
            extend_strata(rest - rank * mult, f, cur, out);
            cur.pop();
        }
    }
}

/// `H_σ` summarized by `m(H) = (dim H, #π₀(H))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupDescriptor {
    pub stratum: Stratum,
    pub dim: u32,
    pub pi0: u32,
}

impl GroupDescriptor {
    pub fn m(&self) -> (u32, u32) {
        (self.dim, self.pi0)
    }
}

/// `dim = Σ mᵢ² − 1`, `π₀ = gcd(nᵢ)`: the determinant map `∏U(mᵢ) → U(1)` acts on π₁
/// by `(kᵢ) ↦ Σ nᵢkᵢ`, whose cokernel has order `gcd(nᵢ)`.
pub fn group_of(s: &Stratum) -> GroupDescriptor {
    let dim = s.factors.iter().map(|f| f.mult * f.mult).sum::<u32>() - 1;
    let ranks: Vec<u32> = s.factors.iter().map(|f| f.rank).collect();
    GroupDescriptor {
        stratum: s.clone(),
        dim,
        pi0: gcd_all(&ranks),
    }
}

/// Lexicographic comparison of `m(H)`.
pub fn m_less(a: &GroupDescriptor, b: &GroupDescriptor) -> bool {
    a.m() < b.m()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DivisionType {
    Real,
    Complex,
    Quaternionic,
}

/// Real dimension of self-adjoint `K`-linear maps of `K^r`.
pub fn d_k(ty: DivisionType, r: u64) -> u64 {
    match ty {
        DivisionType::Real => r * (r + 1) / 2,
        DivisionType::Complex => r * r,
        DivisionType::Quaternionic => 2 * r * r - r,
    }
}

/// `d(V) = Σ d_{Kᵢ}(aᵢ)` over isotypic components with multiplicities `aᵢ`.
pub fn d_of(rep: &[(DivisionType, u64)]) -> u64 {
    rep.iter().map(|&(t, a)| d_k(t, a)).sum()
}

/// Catalog irreducible of `H_σ`; indices are 0-based factor positions, printed 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrrepLabel {
    Triv,
    /// `su(m_p)` under conjugation by `u_p`.
    Adj(usize),
    /// `Mat_{m_p×m_q}(ℂ)` under `X ↦ u_p X u_q*`, `p < q`.
    Std(usize, usize),
}

impl IrrepLabel {
    pub fn is_trivial(&self) -> bool {
        matches!(self, IrrepLabel::Triv)
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::Triv => write!(f, "triv"),
            IrrepLabel::Adj(p) => write!(f, "adj:{}", p + 1),
            IrrepLabel::Std(p, q) => write!(f, "std:{}:{}", p + 1, q + 1),
        }
    }
}

impl fmt::Debug for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for IrrepLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Schema {
            field: "coeffs".into(),
            msg: format!("bad irrep label {s:?}"),
        };
        let parts: Vec<&str> = s.split(':').collect();
        let idx = |t: &str| -> Result<usize> {
            let v: usize = t.parse().map_err(|_| bad())?;
            v.checked_sub(1).ok_or_else(bad)
        };
        match parts.as_slice() {
            ["triv"] => Ok(IrrepLabel::Triv),
            ["adj", p] => Ok(IrrepLabel::Adj(idx(p)?)),
            ["std", p, q] => {
                let (p, q) = (idx(p)?, idx(q)?);
                if p >= q {
                    return Err(bad());
                }
                Ok(IrrepLabel::Std(p, q))
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for IrrepLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IrrepLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Isotypic decomposition of `su(n) ⊖ (fixed part)` under `H_σ`.
pub fn perp_decomposition(s: &Stratum) -> Vec<(IrrepLabel, u32)> {
    let mut out = Vec::new();
    for (p, f) in s.factors.iter().enumerate() {
        if f.mult >= 2 {
            out.push((IrrepLabel::Adj(p), f.rank * f.rank));
        }
    }
    for p in 0..s.len() {
        for q in p + 1..s.len() {
            out.push((IrrepLabel::Std(p, q), s.factors[p].rank * s.factors[q].rank));
        }
    }
    out
}

/// A symmetry-breaking direction: an adjoint element of one block, or an off-diagonal matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Move {
    /// Element of `su(m_p)` with eigenvalue multiplicities `parts`.
    Adjoint { p: usize, parts: Vec<u32> },
    /// Element of `Mat_{m_p×m_q}` with nonzero singular value multiplicities `sv_parts`
    /// and `zero` zero singular values on the smaller side.
    OffDiag {
        p: usize,
        q: usize,
        sv_parts: Vec<u32>,
        zero: u32,
    },
}

impl Move {
    /// The irrep whose unit sphere this move lives on.
    pub fn label(&self) -> IrrepLabel {
        match self {
            Move::Adjoint { p, .. } => IrrepLabel::Adj(*p),
            Move::OffDiag { p, q, .. } => IrrepLabel::Std(*p, *q),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Adjoint { p, parts } => write!(f, "adj:{} eig {:?}", p + 1, parts),
            Move::OffDiag { p, q, sv_parts, zero } => {
                write!(f, "std:{}:{} sv {:?} zero {}", p + 1, q + 1, sv_parts, zero)
            }
        }
    }
}

/// Subgroup inclusion `H_target ↪ H_source` by block-diagonal placement.
///
/// `blocks[i]` lists target factor indices whose unitaries, placed diagonally in order,
/// form the source factor `uᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Embedding {
    pub source: Stratum,
    pub target: Stratum,
    pub blocks: Vec<Vec<usize>>,
    pub moves: Vec<Move>,
}

impl Embedding {
    pub fn identity(s: &Stratum) -> Self {
        Embedding {
            source: s.clone(),
            target: s.clone(),
            blocks: (0..s.len()).map(|i| vec![i]).collect(),
            moves: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.blocks.iter().enumerate().all(|(i, b)| b == &[i])
    }

    /// Builds the stabilizer inclusion for `mv` at `source`.
    pub fn from_move(source: &Stratum, mv: &Move) -> Result<Self> {
        let fs = source.factors();
        let bad = |msg: String| Error::InvalidMove {
            stratum: source.to_string(),
            msg,
        };
        // pre-canonical target list and, per source factor, indices into it
        let mut pre: Vec<Factor> = Vec::new();
        let mut pre_blocks: Vec<Vec<usize>> = Vec::new();
        fn push(pre: &mut Vec<Factor>, f: Factor) -> usize {
            pre.push(f);
            pre.len() - 1
        }
        match mv {
            Move::Adjoint { p, parts } => {
                let p = *p;
                if p >= fs.len() {
                    return Err(bad(format!("factor {} out of range", p + 1)));
                }
                if parts.len() < 2 || parts.contains(&0) {
                    return Err(bad("adjoint element must have at least two distinct eigenvalues".into()));
                }
                if parts.iter().sum::<u32>() != fs[p].mult {
                    return Err(bad(format!("eigenvalue multiplicities must sum to {}", fs[p].mult)));
                }
                for (i, f) in fs.iter().enumerate() {
                    if i == p {
                        let idx = parts.iter().map(|&m| push(&mut pre, Factor::new(f.rank, m))).collect();
                        pre_blocks.push(idx);
                    } else {
                        let j = push(&mut pre, *f);
                        pre_blocks.push(vec![j]);
                    }
                }
            }
            Move::OffDiag { p, q, sv_parts, zero } => {
                let (p, q) = (*p, *q);
                if p >= q || q >= fs.len() {
                    return Err(bad("off-diagonal move needs factor indices p < q".into()));
                }
                let (s, l) = if fs[p].mult <= fs[q].mult { (p, q) } else { (q, p) };
                let (fsm, flg) = (fs[s], fs[l]);
                if sv_parts.is_empty() || sv_parts.contains(&0) {
                    return Err(bad("the zero matrix is not symmetry-breaking".into()));
                }
                if sv_parts.iter().sum::<u32>() + zero != fsm.mult {
                    return Err(bad(format!("singular value multiplicities must sum to {}", fsm.mult)));
                }
                let merged: Vec<usize> = sv_parts
                    .iter()
                    .map(|&m| push(&mut pre, Factor::new(fsm.rank + flg.rank, m)))
                    .collect();
                let rest_small = (*zero > 0).then(|| push(&mut pre, Factor::new(fsm.rank, *zero)));
                let rest_large_mult = flg.mult - fsm.mult + zero;
                let rest_large = (rest_large_mult > 0).then(|| push(&mut pre, Factor::new(flg.rank, rest_large_mult)));
                for (i, f) in fs.iter().enumerate() {
                    if i == s {
                        let mut b = merged.clone();
                        b.extend(rest_small);
                        pre_blocks.push(b);
                    } else if i == l {
                        let mut b = merged.clone();
                        b.extend(rest_large);
                        pre_blocks.push(b);
                    } else {
                        let j = push(&mut pre, *f);
                        pre_blocks.push(vec![j]);
                    }
                }
            }
        }
        let (target, perm) = Stratum::canonical(pre)?;
        if target.n() != source.n() {
            return Err(bad("rank not preserved".into()));
        }
        let blocks = pre_blocks
            .into_iter()
            .map(|b| b.into_iter().map(|j| perm[j].expect("positive mult")).collect())
            .collect();
        Ok(Embedding {
            source: source.clone(),
            target,
            blocks,
            moves: vec![mv.clone()],
        })
    }

    /// `self: A ← B` then `next: B ← C` gives `A ← C`.
    pub fn compose(&self, next: &Embedding) -> Result<Embedding> {
        if self.target != next.source {
            return Err(Error::Incompatible(format!(
                "cannot compose {} ← {} with {} ← {}",
                self.source, self.target, next.source, next.target
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().flat_map(|&j| next.blocks[j].iter().copied()).collect())
            .collect();
        let mut moves = self.moves.clone();
        moves.extend(next.moves.iter().cloned());
        Ok(Embedding {
            source: self.source.clone(),
            target: next.target.clone(),
            blocks,
            moves,
        })
    }

    /// Re-derives the target from the recorded moves.
    pub fn verify(&self) -> Result<()> {
        let mut e = Embedding::identity(&self.source);
        for mv in &self.moves {
            let target = e.target.clone();
            e = e.compose(&Embedding::from_move(&target, mv)?)?;
        }
        if self.moves.is_empty() && self.source == self.target {
            return Ok(());
        }
        if e.target != self.target || e.blocks != self.blocks {
            return Err(Error::Incompatible(format!(
                "embedding {} ← {} does not match its moves",
                self.source, self.target
            )));
        }
        Ok(())
    }
}

/// Partitions of `m` as non-increasing part lists.
pub fn partitions(m: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=rest.min(max)).rev() {
            cur.push(k);
            go(rest - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, m, &mut Vec::new(), &mut out);
    out
}

/// Every symmetry-breaking move from `σ`, one per orbit type.
pub fn all_moves(s: &Stratum) -> Vec<Move> {
    let mut out = Vec::new();
    for (p, f) in s.factors().iter().enumerate() {
        if f.mult >= 2 {
            for parts in partitions(f.mult).into_iter().filter(|v| v.len() >= 2) {
                out.push(Move::Adjoint { p, parts });
            }
        }
    }
    for p in 0..s.len() {
        for q in p + 1..s.len() {
            let small = s.factor(p).mult.min(s.factor(q).mult);
            for zero in 0..small {
                for sv_parts in partitions(small - zero) {
                    out.push(Move::OffDiag { p, q, sv_parts, zero });
                }
            }
        }
    }
    out
}

pub fn adjoint_stabilizer(s: &Stratum, p: usize, parts: &[u32]) -> Result<Stratum> {
    Ok(Embedding::from_move(
        s,
        &Move::Adjoint {
            p,
            parts: parts.to_vec(),
        },
    )?
    .target)
}

pub fn offdiag_stabilizer(s: &Stratum, p: usize, q: usize, sv_parts: &[u32], zero: u32) -> Result<Stratum> {
    Ok(Embedding::from_move(
        s,
        &Move::OffDiag {
            p,
            q,
            sv_parts: sv_parts.to_vec(),
            zero,
        },
    )?
    .target)
}

pub fn bifurcation_targets(s: &Stratum, mode: Mode) -> BTreeSet<Stratum> {
    if !mode_allows(s, mode) {
        return BTreeSet::new();
    }
    all_moves(s)
        .iter()
        .filter_map(|mv| Embedding::from_move(s, mv).ok())
        .map(|e| e.target)
        .filter(|t| mode_allows(t, mode))
        .collect()
}

/// All arrows `σ → σ′` over `Σ_n`, sorted.
pub fn bifurcation_arrows(n: u32, mode: Mode) -> Vec<(Stratum, Stratum)> {
    enumerate_strata(n, mode)
        .into_iter()
        .flat_map(|s| bifurcation_targets(&s, mode).into_iter().map(move |t| (s.clone(), t)))
        .collect()
}

/// Transitive closure of the bifurcation arrows. This is reachability, not stratum closure.
#[derive(Clone, Debug)]
pub struct Reachability {
    pub nodes: Vec<Stratum>,
    pub arrows: Vec<(Stratum, Stratum)>,
    reach: BTreeMap<Stratum, BTreeSet<Stratum>>,
}

impl Reachability {
    pub fn reaches(&self, a: &Stratum, b: &Stratum) -> bool {
        self.reach.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn successors(&self, a: &Stratum) -> BTreeSet<Stratum> {
        self.reach.get(a).cloned().unwrap_or_default()
    }

    /// Graphviz text of the direct arrows.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph strata {\n");
        for v in &self.nodes {
            let g = v.group();
            s.push_str(&format!("  \"{v}\" [label=\"{v}\\nm=({},{})\"];\n", g.dim, g.pi0));
        }
        for (a, b) in &self.arrows {
            s.push_str(&format!("  \"{a}\" -> \"{b}\";\n"));
        }
        s.push_str("}\n");
        s
    }
}

pub fn reachability_order(n: u32, mode: Mode) -> Reachability {
    let nodes = enumerate_strata(n, mode);
    let arrows = bifurcation_arrows(n, mode);
    let mut direct: BTreeMap<Stratum, BTreeSet<Stratum>> = BTreeMap::new();
    for (a, b) in &arrows {
        direct.entry(a.clone()).or_default().insert(b.clone());
    }
    // m(H) strictly decreases along arrows, so processing in increasing m is a topological order
    let mut order = nodes.clone();
    order.sort_by_key(|s| s.group().m());
    let mut reach: BTreeMap<Stratum, BTreeSet<Stratum>> = BTreeMap::new();
    for s in &order {
        let mut set = BTreeSet::new();
        for t in direct.get(s).into_iter().flatten() {
            set.insert(t.clone());
            set.extend(reach.get(t).cloned().unwrap_or_default());
        }
        reach.insert(s.clone(), set);
    }
    Reachability { nodes, arrows, reach }
}
