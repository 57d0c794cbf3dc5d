//! Integer Laurent polynomials in `q`, exact interpolation from per-`q`
//! samples, and parity quasi-polynomial detection.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("the zero polynomial has no (q-1)-factorization")]
    ZeroPolynomial,
    #[error("polynomial has negative exponents")]
    NegativeExponents,
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterpError {
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("sample q values must be distinct")]
    DuplicateSample,
    #[error("interpolated coefficients are not integers")]
    NonIntegral,
    #[error("fit disagrees with held-out sample at q = {q}")]
    ValidationMismatch { q: u64 },
}

/// A polynomial in `q` with integer coefficients and possibly negative
/// exponents. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i64, coeff: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff.into());
        p
    }

    /// `q^exp`.
    pub fn q_pow(exp: i64) -> Self {
        Self::monomial(exp, 1)
    }

    /// `q - 1`.
    pub fn q_minus_one() -> Self {
        Self::from_coeffs(&[-1, 1])
    }

    /// Builds `c_0 + c_1 q + c_2 q^2 + ...`.
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        let mut p = Self::zero();
        for (e, &c) in coeffs.iter().enumerate() {
            p.add_term(e as i64, BigInt::from(c));
        }
        p
    }

    /// The q-integer `[m]_q = 1 + q + ... + q^(m-1)`; zero when `m <= 0`.
    pub fn q_int(m: i64) -> Self {
        let mut p = Self::zero();
        for e in 0..m.max(0) {
            p.add_term(e, BigInt::one());
        }
        p
    }

    /// `[n]_q! = [1]_q [2]_q ... [n]_q`.
    pub fn q_factorial(n: u32) -> Self {
        (1..=n as i64).fold(Self::one(), |acc, i| &acc * &Self::q_int(i))
    }

    fn add_term(&mut self, exp: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_polynomial(&self) -> bool {
        self.min_exp().is_none_or(|e| e >= 0)
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Coefficient-wise `self <= other`.
    pub fn coeffwise_le(&self, other: &Self) -> bool {
        (other - self).has_nonnegative_coeffs()
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Substitutes `q -> q^-1`.
    pub fn invert_variable(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Evaluates at a rational point.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&e, c) in &self.terms {
            let xp = if e >= 0 {
                num_traits::pow(x.clone(), e as usize)
            } else {
                num_traits::pow(x.recip(), (-e) as usize)
            };
            acc += xp * BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Evaluates at an integer; `None` if the value is not an integer
    /// (possible only when negative exponents are present).
    pub fn eval(&self, x: &BigInt) -> Option<BigInt> {
        if self.is_polynomial() {
            // Horner from the top exponent down.
            let Some(top) = self.max_exp() else {
                return Some(BigInt::zero());
            };
            let mut acc = BigInt::zero();
            for e in (0..=top).rev() {
                acc = acc * x + self.coeff(e);
            }
            return Some(acc);
        }
        if x.is_zero() {
            return None;
        }
        let v = self.eval_rational(&BigRational::from_integer(x.clone()));
        v.is_integer().then(|| v.to_integer())
    }

    pub fn eval_u64(&self, x: u64) -> Option<BigInt> {
        self.eval(&BigInt::from(x))
    }

    /// Exact division by `q - 1`, if it divides.
    pub fn div_q_minus_one(&self) -> Option<Self> {
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else {
            return Some(Self::zero());
        };
        // Synthetic division of sum c_e q^e by (q - 1), top down.
        let mut quotient = Self::zero();
        let mut carry = BigInt::zero();
        for e in (lo + 1..=hi).rev() {
            carry += self.coeff(e);
            quotient.add_term(e - 1, carry.clone());
        }
        let remainder = carry + self.coeff(lo);
        remainder.is_zero().then_some(quotient)
    }

    /// Writes `p = (q-1)^e * quotient` with `quotient(1) != 0`.
    pub fn factor_q_minus_one(&self) -> Result<(u32, Self), PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut e = 0;
        let mut cur = self.clone();
        while let Some(next) = cur.div_q_minus_one() {
            cur = next;
            e += 1;
        }
        Ok((e, cur))
    }

    /// Writes `p = q^k * rest` where `rest` has a nonzero constant term.
    pub fn split_q_power(&self) -> (i64, Self) {
        match self.min_exp() {
            Some(k) => (k, self.shift(-k)),
            None => (0, Self::zero()),
        }
    }

    /// Coefficients in the basis `t = q - 1`, lowest degree first.
    pub fn in_t_basis(&self) -> Result<Vec<BigInt>, PolyError> {
        if !self.is_polynomial() {
            return Err(PolyError::NegativeExponents);
        }
        let Some(top) = self.max_exp() else {
            return Ok(Vec::new());
        };
        // Horner with q = t + 1.
        let mut acc: Vec<BigInt> = Vec::new();
        for e in (0..=top).rev() {
            let mut next = vec![BigInt::zero(); acc.len() + 1];
            for (i, c) in acc.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c;
            }
            next[0] += self.coeff(e);
            acc = next;
        }
        while acc.last().is_some_and(|c| c.is_zero()) {
            acc.pop();
        }
        Ok(acc)
    }

    /// Inverse of [`LaurentPoly::in_t_basis`].
    pub fn from_t_basis(coeffs: &[BigInt]) -> Self {
        let t = Self::q_minus_one();
        let mut acc = Self::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * &t) + &Self::constant(c.clone());
        }
        acc
    }

    /// Pretty form `(q-1)^e * q^k * (rest)`, omitting trivial factors.
    pub fn factored_string(&self) -> String {
        let Ok((e, rest)) = self.factor_q_minus_one() else {
            return "0".to_string();
        };
        let (k, rest) = rest.split_q_power();
        let mut parts = Vec::new();
        match e {
            0 => {}
            1 => parts.push("(q-1)".to_string()),
            e => parts.push(format!("(q-1)^{e}")),
        }
        match k {
            0 => {}
            1 => parts.push("q".to_string()),
            k => parts.push(format!("q^{k}")),
        }
        if rest != Self::one() || parts.is_empty() {
            if parts.is_empty() || rest.terms.len() == 1 {
                parts.push(rest.to_string());
            } else {
                parts.push(format!("({rest})"));
            }
        }
        parts.join(" * ")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if neg {
                write!(f, "-")?;
            } else if i > 0 {
                write!(f, "+")?;
            }
            let var = match e {
                0 => String::new(),
                1 => "q".to_string(),
                e => format!("q^{e}"),
            };
            if var.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = PolyError;

    /// Parses sums of terms like `q^7`, `2*q^6`, `4q^9`, `-q^-2`, `13`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(PolyError::Parse(s));
        }
        let bad = || PolyError::Parse(s.clone());
        let mut poly = Self::zero();
        let bytes = s.as_bytes();
        let mut start = 0;
        let mut terms = Vec::new();
        for i in 1..bytes.len() {
            // a sign starts a new term unless it belongs to an exponent
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        for term in terms {
            let (sign, body) = match term.as_bytes().first() {
                Some(b'-') => (-1, &term[1..]),
                Some(b'+') => (1, &term[1..]),
                _ => (1, term),
            };
            if body.is_empty() {
                return Err(bad());
            }
            let (coeff, exp) = match body.find('q') {
                None => (body.parse::<BigInt>().map_err(|_| bad())?, 0),
                Some(pos) => {
                    let head = body[..pos].trim_end_matches('*');
                    let coeff = if head.is_empty() {
                        BigInt::one()
                    } else {
                        head.parse::<BigInt>().map_err(|_| bad())?
                    };
                    let tail = &body[pos + 1..];
                    let exp = if tail.is_empty() {
                        1
                    } else {
                        tail.strip_prefix('^')
                            .ok_or_else(bad)?
                            .parse::<i64>()
                            .map_err(|_| bad())?
                    };
                    (coeff, exp)
                }
            };
            poly.add_term(exp, coeff * sign);
        }
        Ok(poly)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> = self.terms.iter().map(|(e, c)| (e.to_string(), c.to_string())).collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, String>::deserialize(deserializer)?;
        let mut poly = LaurentPoly::zero();
        for (e, c) in map {
            let e: i64 = e.parse().map_err(serde::de::Error::custom)?;
            let c: BigInt = c.parse().map_err(serde::de::Error::custom)?;
            poly.add_term(e, c);
        }
        Ok(poly)
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (&e, c) in &rhs.terms {
            self.add_term(e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (&e, c) in &rhs.terms {
            self.add_term(e, -c.clone());
        }
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self -= &rhs;
        self
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&a, ca) in &self.terms {
            for (&b, cb) in &rhs.terms {
                out.add_term(a + b, ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

/// Exact per-`q` values of some counting function.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleTable {
    pub rows: Vec<(u64, BigInt)>,
}

impl SampleTable {
    pub fn new(rows: Vec<(u64, BigInt)>) -> Self {
        SampleTable { rows }
    }

    pub fn from_fn(qs: &[u64], f: impl Fn(u64) -> BigInt) -> Self {
        SampleTable {
            rows: qs.iter().map(|&q| (q, f(q))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Newton divided differences through `points`, returned in the power basis.
fn newton_fit(points: &[(u64, BigInt)]) -> Result<LaurentPoly, InterpError> {
    let xs: Vec<BigRational> = points
        .iter()
        .map(|(q, _)| BigRational::from_integer(BigInt::from(*q)))
        .collect();
    let mut table: Vec<BigRational> = points
        .iter()
        .map(|(_, v)| BigRational::from_integer(v.clone()))
        .collect();
    let n = points.len();
    for level in 1..n {
        for i in (level..n).rev() {
            let denom = &xs[i] - &xs[i - level];
            table[i] = (&table[i] - &table[i - 1]) / denom;
        }
    }
    // Expand sum table[i] * prod_{j<i} (q - x_j) in the power basis.
    let mut coeffs = vec![BigRational::zero(); n];
    let mut basis = vec![BigRational::one()];
    for i in 0..n {
        for (d, b) in basis.iter().enumerate() {
            coeffs[d] += &table[i] * b;
        }
        let mut next = vec![BigRational::zero(); basis.len() + 1];
        for (d, b) in basis.iter().enumerate() {
            next[d + 1] += b;
            next[d] -= b * &xs[i];
        }
        basis = next;
    }
    let mut poly = LaurentPoly::zero();
    for (e, c) in coeffs.into_iter().enumerate() {
        if !c.is_integer() {
            return Err(InterpError::NonIntegral);
        }
        poly.add_term(e as i64, c.to_integer());
    }
    Ok(poly)
}

/// Fits a polynomial of degree at most `degree_bound` through the first
/// `degree_bound + 1` samples and checks it against every remaining sample.
pub fn interpolate(samples: &SampleTable, degree_bound: usize) -> Result<LaurentPoly, InterpError> {
    let needed = degree_bound + 2;
    if samples.len() < needed {
        return Err(InterpError::InsufficientSamples {
            needed,
            got: samples.len(),
        });
    }
    let mut seen: Vec<u64> = samples.rows.iter().map(|(q, _)| *q).collect();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != samples.len() {
        return Err(InterpError::DuplicateSample);
    }
    let (fit_rows, held_out) = samples.rows.split_at(degree_bound + 1);
    let poly = newton_fit(fit_rows)?;
    for (q, v) in held_out {
        if poly.eval_u64(*q).as_ref() != Some(v) {
            return Err(InterpError::ValidationMismatch { q: *q });
        }
    }
    Ok(poly)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(q: u64) -> Self {
        if q.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Result of fitting one polynomial per parity class of `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiFit {
    pub class_polys: BTreeMap<Parity, LaurentPoly>,
    /// Both classes fitted and validated on held-out samples.
    pub consistent: bool,
}

impl QuasiFit {
    /// True when both classes were fitted to the same polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.consistent && self.class_polys.get(&Parity::Even) == self.class_polys.get(&Parity::Odd)
    }
}

/// Splits samples by the parity of `q` and interpolates each class.
pub fn detect_quasi(samples: &SampleTable, degree_bound: usize) -> Result<QuasiFit, InterpError> {
    let needed = degree_bound + 2;
    let mut classes: BTreeMap<Parity, SampleTable> = BTreeMap::new();
    for row in &samples.rows {
        classes.entry(Parity::of(row.0)).or_default().rows.push(row.clone());
    }
    for parity in [Parity::Even, Parity::Odd] {
        let got = classes.get(&parity).map_or(0, SampleTable::len);
        if got < needed {
            return Err(InterpError::InsufficientSamples { needed, got });
        }
    }
    let mut class_polys = BTreeMap::new();
    let mut consistent = true;
    for (parity, table) in &classes {
        match interpolate(table, degree_bound) {
            Ok(p) => {
                class_polys.insert(*parity, p);
            }
            Err(_) => consistent = false,
        }
    }
    Ok(QuasiFit {
        class_polys,
        consistent,
    })
}
