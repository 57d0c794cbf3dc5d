//! Arithmetic in small finite fields GF(p^k).
//!
//! Elements are stored as base-p digit vectors (coefficients of a polynomial
//! in `x` reduced modulo a fixed irreducible polynomial). Each element also
//! has a dense integer index `sum(d_i * p^i)`; the counting oracle works on
//! indices and uses precomputed tables when the field is small.

use std::fmt;

use thiserror::Error;

/// Largest field order accepted by [`FieldSpec::new`].
pub const MAX_ORDER: u64 = 1 << 20;

/// Fields up to this order get full addition and multiplication tables.
const TABLE_LIMIT: u64 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the supported maximum of 2^20")]
    TooLarge { p: u64, k: u32 },
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("element {0:?} does not belong to this field")]
    ForeignElement(Vec<u32>),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
}

/// An element of GF(p^k) as its digit vector, least significant first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    digits: Vec<u32>,
}

impl FieldElement {
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .digits
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &d)| d != 0)
            .map(|(i, &d)| match (i, d) {
                (0, d) => d.to_string(),
                (1, 1) => "x".to_string(),
                (1, d) => format!("{d}*x"),
                (i, 1) => format!("x^{i}"),
                (i, d) => format!("{d}*x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

#[derive(Clone, Debug)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
}

/// The field GF(p^k) with a deterministic modulus.
///
/// The modulus is the least monic irreducible polynomial of degree `k`,
/// ordering candidates by their non-leading coefficients read from
/// `x^(k-1)` down to the constant term.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    order: u32,
    /// Coefficients of the modulus, constant term first, length `k + 1`.
    modulus: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    /// `exp[i] = g^i` and `log[g^i] = i` for a fixed primitive `g`.
    exp: Vec<u32>,
    log: Vec<u32>,
    tables: Option<Tables>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k` with `p` prime, if possible.
pub fn prime_power_parts(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&d| q.is_multiple_of(d))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Prime powers in increasing order: 2, 3, 4, 5, 7, 8, 9, 11, 13, 16, ...
pub fn prime_powers() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&q| prime_power_parts(q).is_some())
}

// Polynomial helpers over Z_p on coefficient vectors (constant term first).

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let b = poly_trim(b.to_vec());
    let mut r = poly_trim(a.to_vec());
    let lead_inv = pow_mod(*b.last().expect("nonzero divisor"), p - 2, p);
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let factor = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &bc) in b.iter().enumerate() {
            let sub = (factor as u64 * bc as u64 % p as u64) as u32;
            r[i + shift] = (r[i + shift] + p - sub) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn pow_mod(base: u32, mut exp: u32, p: u32) -> u32 {
    if p == 2 {
        return base % 2;
    }
    let mut acc = 1u64;
    let mut b = base as u64 % p as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        exp >>= 1;
    }
    acc as u32
}

fn monic_from_index(idx: u64, deg: u32, p: u32) -> Vec<u32> {
    let mut coeffs = Vec::with_capacity(deg as usize + 1);
    let mut rest = idx;
    for _ in 0..deg {
        coeffs.push((rest % p as u64) as u32);
        rest /= p as u64;
    }
    coeffs.push(1);
    coeffs
}

fn poly_mul_mod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &u) in a.iter().enumerate() {
        if u == 0 {
            continue;
        }
        for (j, &v) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + u as u64 * v as u64) % p as u64) as u32;
        }
    }
    poly_rem(&prod, f, p)
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let (mut a, mut b) = (poly_trim(a.to_vec()), poly_trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or test: `f` of degree `k` is irreducible iff
/// `gcd(x^(p^i) - x, f) = 1` for every `i <= k/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    let x = poly_rem(&[0, 1], f, p);
    let mut h = x.clone();
    for _ in 0..deg / 2 {
        // h <- h^p mod f
        let mut acc = vec![1];
        let mut base = h.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mul_mod(&acc, &base, f, p);
            }
            base = poly_mul_mod(&base, &base, f, p);
            e >>= 1;
        }
        h = acc;
        let mut diff = h.clone();
        diff.resize(deg.max(2), 0);
        for (i, &c) in x.iter().enumerate() {
            diff[i] = (diff[i] + p - c) % p;
        }
        if poly_gcd(f, &diff, p).len() != 1 {
            return false;
        }
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldSpec {
    pub fn new(p: u64, k: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k < 1 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (p as u128).checked_pow(k).filter(|&o| o <= MAX_ORDER as u128);
        let Some(order) = order else {
            return Err(FieldError::TooLarge { p, k });
        };
        let p32 = p as u32;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            // Base-p index order puts x^(k-1) in the most significant digit.
            (0..p.pow(k))
                .map(|idx| monic_from_index(idx, k, p32))
                .find(|f| f[0] != 0 && is_irreducible(f, p32))
                .expect("an irreducible polynomial exists for every degree")
        };
        let mut field = FieldSpec {
            p: p32,
            k,
            order: order as u32,
            modulus,
            neg: Vec::new(),
            inv: Vec::new(),
            exp: Vec::new(),
            log: Vec::new(),
            tables: None,
        };
        field.neg = (0..field.order).map(|a| field.slow_neg(a)).collect();
        field.build_log_tables();
        let group = field.order - 1;
        field.inv = (0..field.order)
            .map(|a| match a {
                0 => 0,
                a => field.exp[((group - field.log[a as usize]) % group) as usize],
            })
            .collect();
        if (field.order as u64) <= TABLE_LIMIT {
            let q = field.order;
            let mut add = Vec::with_capacity((q * q) as usize);
            let mut mul = Vec::with_capacity((q * q) as usize);
            for a in 0..q {
                for b in 0..q {
                    add.push(field.slow_add(a, b));
                    mul.push(field.slow_mul(a, b));
                }
            }
            field.tables = Some(Tables { add, mul });
        }
        Ok(field)
    }

    /// Builds GF(q) for a prime power `q`.
    pub fn of_order(q: u64) -> Result<Self, FieldError> {
        let (p, k) = prime_power_parts(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, k)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Modulus coefficients, constant term first (monic, length `k + 1`).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn to_digits(&self, mut idx: u32) -> Vec<u32> {
        let mut d = vec![0; self.k as usize];
        for slot in d.iter_mut() {
            *slot = idx % self.p;
            idx /= self.p;
        }
        d
    }

    fn index_from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    pub fn element(&self, digits: &[u32]) -> Result<FieldElement, FieldError> {
        if digits.len() != self.k as usize || digits.iter().any(|&d| d >= self.p) {
            return Err(FieldError::ForeignElement(digits.to_vec()));
        }
        Ok(FieldElement {
            digits: digits.to_vec(),
        })
    }

    pub fn zero(&self) -> FieldElement {
        self.element_at(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element_at(1)
    }

    /// The element with dense index `idx` (`0 <= idx < q`).
    pub fn element_at(&self, idx: u32) -> FieldElement {
        assert!(idx < self.order, "index {idx} out of range");
        FieldElement {
            digits: self.to_digits(idx),
        }
    }

    pub fn index_of(&self, a: &FieldElement) -> Result<u32, FieldError> {
        self.check(a)?;
        Ok(self.index_from_digits(&a.digits))
    }

    fn check(&self, a: &FieldElement) -> Result<(), FieldError> {
        if a.digits.len() != self.k as usize || a.digits.iter().any(|&d| d >= self.p) {
            return Err(FieldError::ForeignElement(a.digits.clone()));
        }
        Ok(())
    }

    /// All elements in index order: zero first, then one.
    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.order).map(|i| self.element_at(i)).collect()
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        let (x, y) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.element_at(self.add_idx(x, y)))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        let (x, y) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.element_at(self.mul_idx(x, y)))
    }

    pub fn neg(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        let x = self.index_of(a)?;
        Ok(self.element_at(self.neg_idx(x)))
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        let x = self.index_of(a)?;
        Ok(self.element_at(self.inv_idx(x)?))
    }

    pub fn pow(&self, a: &FieldElement, exp: u64) -> Result<FieldElement, FieldError> {
        let x = self.index_of(a)?;
        Ok(self.element_at(self.pow_idx(x, exp)))
    }

    // Index-level arithmetic used by the counting oracle.

    #[inline]
    pub fn add_idx(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.add[(a * self.order + b) as usize],
            None => self.slow_add(a, b),
        }
    }

    #[inline]
    pub fn sub_idx(&self, a: u32, b: u32) -> u32 {
        self.add_idx(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul_idx(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.mul[(a * self.order + b) as usize],
            None if a == 0 || b == 0 => 0,
            None => {
                let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
                self.exp[(s % (self.order as u64 - 1)) as usize]
            }
        }
    }

    #[inline]
    pub fn neg_idx(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    pub fn inv_idx(&self, a: u32) -> Result<u32, FieldError> {
        if a == 0 {
            return Err(FieldError::InverseOfZero);
        }
        Ok(self.inv[a as usize])
    }

    pub fn pow_idx(&self, a: u32, mut exp: u64) -> u32 {
        let mut acc = 1;
        let mut base = a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_idx(acc, base);
            }
            base = self.mul_idx(base, base);
            exp >>= 1;
        }
        acc
    }

    fn slow_add(&self, mut a: u32, mut b: u32) -> u32 {
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn slow_neg(&self, a: u32) -> u32 {
        let s: Vec<u32> = self.to_digits(a).iter().map(|&u| (self.p - u) % self.p).collect();
        self.index_from_digits(&s)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.to_digits(a), self.to_digits(b));
        let p = self.p as u64;
        let mut prod = vec![0u32; 2 * self.k as usize];
        for (i, &u) in x.iter().enumerate() {
            if u == 0 {
                continue;
            }
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + u as u64 * v as u64) % p) as u32;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.k as usize, 0);
        self.index_from_digits(&r)
    }

    /// Fills discrete log and antilog tables from the least primitive element.
    fn build_log_tables(&mut self) {
        let group = (self.order - 1) as u64;
        let factors = prime_factors(group);
        let slow_pow = |f: &Self, a: u32, mut e: u64| {
            let (mut acc, mut base) = (1, a);
            while e > 0 {
                if e & 1 == 1 {
                    acc = f.slow_mul(acc, base);
                }
                base = f.slow_mul(base, base);
                e >>= 1;
            }
            acc
        };
        let g = (1..self.order)
            .find(|&g| factors.iter().all(|&r| slow_pow(self, g, group / r) != 1))
            .expect("the multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(group as usize);
        let mut log = vec![0u32; self.order as usize];
        let mut cur = 1;
        for i in 0..group as u32 {
            exp.push(cur);
            log[cur as usize] = i;
            cur = self.slow_mul(cur, g);
        }
        self.exp = exp;
        self.log = log;
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order)
    }
}
