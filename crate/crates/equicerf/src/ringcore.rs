//! Exact arithmetic: rationals, cyclotomic phase sums and free abelian groups.
//!
//! ```
//! use equicerf::ringcore::{phase_weight, rat};
//!
//! let i = phase_weight(rat(1, 2));
//! assert_eq!(&i * &i, phase_weight(rat(1, 1)));
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = Ratio<i64>;

pub fn rat(p: i64, q: i64) -> Rational {
    Ratio::new(p, q)
}

pub fn int(p: i64) -> Rational {
    Ratio::from_integer(p)
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: i64 = p.parse().map_err(|_| format!("bad rational {s:?}"))?;
    let q: i64 = q.parse().map_err(|_| format!("bad rational {s:?}"))?;
    if q == 0 {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Ratio::new(p, q))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter for rationals stored as `"p/q"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = RawRational::deserialize(d)?;
        raw.into_rational().map_err(serde::de::Error::custom)
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum RawRational {
        Str(String),
        Int(i64),
    }

    impl RawRational {
        fn into_rational(self) -> Result<Rational, String> {
            match self {
                RawRational::Str(s) => parse_rational(&s),
                RawRational::Int(i) => Ok(int(i)),
            }
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let strs: Vec<String> = v.iter().map(format_rational).collect();
            strs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<RawRational>::deserialize(d)?;
            raw.into_iter()
                .map(|r| r.into_rational().map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

/// Floor of a rational as an integer.
pub fn floor_int(r: &Rational) -> i64 {
    r.floor().to_integer()
}

/// Exact complex number `Σ c·e^{iπq}`.
///
/// Stored phases lie in `[0,1)`; `e^{iπ(q+1)} = −e^{iπq}` is applied on insert.
/// No further cyclotomic relations are reduced, so two sums can be equal as
/// complex numbers while differing here; [`CycSum::approx_eq`] compares values.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycSum {
    terms: BTreeMap<Rational, Rational>,
}

impl CycSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(int(1))
    }

    pub fn constant(c: Rational) -> Self {
        let mut s = Self::zero();
        s.add_term(int(0), c);
        s
    }

    /// `c·e^{iπq}`.
    pub fn term(phase: Rational, coeff: Rational) -> Self {
        let mut s = Self::zero();
        s.add_term(phase, coeff);
        s
    }

    pub fn add_term(&mut self, phase: Rational, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let (q, sign) = canonical_phase(phase);
        let c = if sign { -coeff } else { coeff };
        let entry = self.terms.entry(q).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&q);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: Rational) -> Self {
        let mut out = Self::zero();
        for (q, k) in &self.terms {
            out.add_term(*q, *k * c);
        }
        out
    }

    pub fn eval(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(q, c)| {
                let theta = std::f64::consts::PI * q.to_f64().unwrap_or(0.0);
                Complex64::from_polar(c.to_f64().unwrap_or(0.0), theta)
            })
            .sum()
    }

    /// Equality of complex values to `tol`, catching vanishing root-of-unity sums.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.eval() - other.eval()).norm() <= tol
    }
}

/// Reduces `q` mod 2 into `[0,2)` and then into `[0,1)`; the flag says a sign flip happened.
fn canonical_phase(q: Rational) -> (Rational, bool) {
    let two = int(2);
    let mut r = q - two * (q / two).floor();
    let mut flip = false;
    if r >= int(1) {
        r -= int(1);
        flip = true;
    }
    (r, flip)
}

/// Returns the canonical form of `x`; every constructor already normalizes, so this is a copy.
pub fn cyc_normalize(x: &CycSum) -> CycSum {
    let mut out = CycSum::zero();
    for (q, c) in x.terms() {
        out.add_term(*q, *c);
    }
    out
}

/// `e^{iπa}`.
pub fn phase_weight(a: Rational) -> CycSum {
    CycSum::term(a, int(1))
}

impl fmt::Debug for CycSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for CycSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (q, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = format_rational(&c.abs());
            if q.is_zero() {
                write!(f, "{a}")?;
            } else if c.abs().is_one() {
                write!(f, "e^(iπ·{})", format_rational(q))?;
            } else {
                write!(f, "{a}·e^(iπ·{})", format_rational(q))?;
            }
        }
        Ok(())
    }
}

impl Add for &CycSum {
    type Output = CycSum;
    fn add(self, rhs: &CycSum) -> CycSum {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for CycSum {
    type Output = CycSum;
    fn add(self, rhs: CycSum) -> CycSum {
        &self + &rhs
    }
}

impl AddAssign<&CycSum> for CycSum {
    fn add_assign(&mut self, rhs: &CycSum) {
        for (q, c) in &rhs.terms {
            self.add_term(*q, *c);
        }
    }
}

impl Neg for &CycSum {
    type Output = CycSum;
    fn neg(self) -> CycSum {
        self.scale(int(-1))
    }
}

impl Neg for CycSum {
    type Output = CycSum;
    fn neg(self) -> CycSum {
        -&self
    }
}

impl Sub for &CycSum {
    type Output = CycSum;
    fn sub(self, rhs: &CycSum) -> CycSum {
        self + &(-rhs)
    }
}

impl Sub for CycSum {
    type Output = CycSum;
    fn sub(self, rhs: CycSum) -> CycSum {
        &self - &rhs
    }
}

impl Mul for &CycSum {
    type Output = CycSum;
    fn mul(self, rhs: &CycSum) -> CycSum {
        let mut out = CycSum::zero();
        for (q1, c1) in &self.terms {
            for (q2, c2) in &rhs.terms {
                out.add_term(*q1 + *q2, *c1 * *c2);
            }
        }
        out
    }
}

impl Mul for CycSum {
    type Output = CycSum;
    fn mul(self, rhs: CycSum) -> CycSum {
        &self * &rhs
    }
}

#[derive(Serialize, Deserialize)]
struct CycTerm {
    #[serde(with = "rational_str")]
    phase: Rational,
    #[serde(with = "rational_str")]
    coeff: Rational,
}

impl Serialize for CycSum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<CycTerm> = self
            .terms
            .iter()
            .map(|(q, c)| CycTerm { phase: *q, coeff: *c })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<CycTerm>::deserialize(d)?;
        let mut out = CycSum::zero();
        for t in terms {
            out.add_term(t.phase, t.coeff);
        }
        Ok(out)
    }
}

/// Finitely supported map `K → C` with no zero entries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeAbelian<K: Ord, C = i64> {
    coeffs: BTreeMap<K, C>,
}

impl<K: Ord, C> Default for FreeAbelian<K, C> {
    fn default() -> Self {
        Self {
            coeffs: BTreeMap::new(),
        }
    }
}

impl<K, C> FreeAbelian<K, C>
where
    K: Ord + Clone,
    C: Clone + Zero + Neg<Output = C> + Add<Output = C> + Mul<Output = C>,
{
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(key: K) -> Self
    where
        C: One,
    {
        Self::single(key, C::one())
    }

    pub fn single(key: K, coeff: C) -> Self {
        let mut out = Self::zero();
        out.add_term(key, coeff);
        out
    }

    pub fn add_term(&mut self, key: K, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&key) {
            Some(c) => {
                let next = c.clone() + coeff;
                if next.is_zero() {
                    self.coeffs.remove(&key);
                } else {
                    *c = next;
                }
            }
            None => {
                self.coeffs.insert(key, coeff);
            }
        }
    }

    pub fn coeff(&self, key: &K) -> C {
        self.coeffs.get(key).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &C)> {
        self.coeffs.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.coeffs.keys()
    }

    pub fn scale(&self, c: C) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.coeffs {
            out.add_term(k.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Self, c: C) {
        for (k, v) in &other.coeffs {
            self.add_term(k.clone(), v.clone() * c.clone());
        }
    }

    /// Applies `f` to every key, merging collisions.
    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> FreeAbelian<K2, C> {
        let mut out = FreeAbelian::zero();
        for (k, v) in &self.coeffs {
            out.add_term(f(k), v.clone());
        }
        out
    }
}

impl<K, C> FromIterator<(K, C)> for FreeAbelian<K, C>
where
    K: Ord + Clone,
    C: Clone + Zero + Neg<Output = C> + Add<Output = C> + Mul<Output = C>,
{
    fn from_iter<I: IntoIterator<Item = (K, C)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}

impl<K, C> Add for &FreeAbelian<K, C>
where
    K: Ord + Clone,
    C: Clone + Zero + Neg<Output = C> + Add<Output = C> + Mul<Output = C>,
{
    type Output = FreeAbelian<K, C>;
    fn add(self, rhs: Self) -> FreeAbelian<K, C> {
        let mut out = self.clone();
        for (k, v) in &rhs.coeffs {
            out.add_term(k.clone(), v.clone());
        }
        out
    }
}

impl<K, C> Add for FreeAbelian<K, C>
where
    K: Ord + Clone,
    C: Clone + Zero + Neg<Output = C> + Add<Output = C> + Mul<Output = C>,
{
    type Output = FreeAbelian<K, C>;
    fn add(self, rhs: Self) -> FreeAbelian<K, C> {
        &self + &rhs
    }
}

impl<K, C> Neg for &FreeAbelian<K, C>
where
    K: Ord + Clone,
    C: Clone + Zero + Neg<Output = C> + Add<Output = C> + Mul<Output = C>,
{
    type Output = FreeAbelian<K, C>;
    fn neg(self) -> FreeAbelian<K, C> {
        let mut out = FreeAbelian::zero();
        for (k, v) in &self.coeffs {
            out.add_term(k.clone(), -v.clone());
        }
        out
    }
}

impl<K, C> Neg for FreeAbelian<K, C>
where
    K: Ord + Clone,
    C: Clone + Zero + Neg<Output = C> + Add<Output = C> + Mul<Output = C>,
{
    type Output = FreeAbelian<K, C>;
    fn neg(self) -> FreeAbelian<K, C> {
        -&self
    }
}

impl<K, C> Sub for &FreeAbelian<K, C>
where
    K: Ord + Clone,
    C: Clone + Zero + Neg<Output = C> + Add<Output = C> + Mul<Output = C>,
{
    type Output = FreeAbelian<K, C>;
    fn sub(self, rhs: Self) -> FreeAbelian<K, C> {
        self + &(-rhs)
    }
}

impl<K, C> Sub for FreeAbelian<K, C>
where
    K: Ord + Clone,
    C: Clone + Zero + Neg<Output = C> + Add<Output = C> + Mul<Output = C>,
{
    type Output = FreeAbelian<K, C>;
    fn sub(self, rhs: Self) -> FreeAbelian<K, C> {
        &self - &rhs
    }
}

impl<K: Ord + fmt::Debug, C: fmt::Debug> fmt::Debug for FreeAbelian<K, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coeffs.iter()).finish()
    }
}

/// gcd of a slice, `0` for an empty slice.
pub fn gcd_all(xs: &[u32]) -> u32 {
    xs.iter().fold(0u32, |a, b| a.gcd(b))
}
