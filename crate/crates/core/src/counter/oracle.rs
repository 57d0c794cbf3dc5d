//! Exact per-`q` counting.
//!
//! The main oracle builds the matrix one row at a time and tracks the row
//! space in reduced echelon form. If the current space is `V` and the next
//! row may use the columns in `A`, then `k = dim(V ∩ F^A)` vectors keep the
//! space fixed (`q^k` choices) and every line of `(V + F^A) / V` yields one
//! larger space reached by `q^k (q - 1)` vectors.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::CountError;
use crate::diagram::Board;
use crate::fields::FieldSpec;

/// Default cap on the estimated number of echelon states in one layer.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Largest number of free entries the naive enumerator accepts.
pub const NAIVE_MAX_FREE: usize = 12;

/// A subspace of `F_q^n` in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    /// Basis rows, pivots increasing, entries are field indices.
    rows: Vec<Vec<u32>>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { n, rows: Vec::new() }
    }

    /// Span of arbitrary vectors, put in canonical form.
    pub fn span(field: &FieldSpec, n: usize, vectors: &[Vec<u32>]) -> Self {
        let mut s = Subspace::zero(n);
        for v in vectors {
            let mut v = v.clone();
            s.reduce(field, &mut v);
            if let Some(p) = v.iter().position(|&x| x != 0) {
                let inv = field.inv_idx(v[p]).expect("nonzero");
                scale(field, &mut v, inv);
                s.insert_reduced(field, v);
            }
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("nonzero row"))
            .collect()
    }

    /// Clears the pivot coordinates of `v` using the basis.
    pub fn reduce(&self, field: &FieldSpec, v: &mut [u32]) {
        for row in &self.rows {
            let p = row.iter().position(|&x| x != 0).expect("nonzero row");
            let c = v[p];
            if c != 0 {
                axpy(field, v, field.neg_idx(c), row);
            }
        }
    }

    pub fn contains(&self, field: &FieldSpec, v: &[u32]) -> bool {
        let mut v = v.to_vec();
        self.reduce(field, &mut v);
        v.iter().all(|&x| x == 0)
    }

    /// Adds a vector that is already reduced and has leading entry 1.
    fn insert_reduced(&mut self, field: &FieldSpec, u: Vec<u32>) {
        let p = u.iter().position(|&x| x != 0).expect("nonzero vector");
        for row in &mut self.rows {
            let c = row[p];
            if c != 0 {
                axpy(field, row, field.neg_idx(c), &u);
            }
        }
        let at = self
            .rows
            .iter()
            .position(|r| r.iter().position(|&x| x != 0).expect("nonzero") > p)
            .unwrap_or(self.rows.len());
        self.rows.insert(at, u);
    }

    fn encode(&self, wide: bool) -> Box<[u8]> {
        let mut out = Vec::with_capacity(self.rows.len() * self.n * if wide { 4 } else { 1 });
        for row in &self.rows {
            for &x in row {
                if wide {
                    out.extend_from_slice(&x.to_le_bytes());
                } else {
                    out.push(x as u8);
                }
            }
        }
        out.into_boxed_slice()
    }

    fn decode(n: usize, key: &[u8], wide: bool) -> Self {
        let width = if wide { 4 } else { 1 };
        let rows = key
            .chunks(n * width)
            .map(|chunk| {
                if wide {
                    chunk
                        .chunks(4)
                        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
                        .collect()
                } else {
                    chunk.iter().map(|&b| b as u32).collect()
                }
            })
            .collect();
        Subspace { n, rows }
    }
}

/// `v += c * w`.
fn axpy(field: &FieldSpec, v: &mut [u32], c: u32, w: &[u32]) {
    for (x, &y) in v.iter_mut().zip(w) {
        if y != 0 {
            *x = field.add_idx(*x, field.mul_idx(c, y));
        }
    }
}

fn scale(field: &FieldSpec, v: &mut [u32], c: u32) {
    for x in v.iter_mut() {
        *x = field.mul_idx(*x, c);
    }
}

/// Gaussian binomial `[n choose d]_q` as a float (for estimates only).
fn gaussian_binomial(n: usize, d: usize, q: f64) -> f64 {
    if d > n {
        return 0.0;
    }
    (0..d)
        .map(|i| (q.powi((n - i) as i32) - 1.0) / (q.powi(i as i32 + 1) - 1.0))
        .product()
}

/// Orientation used by the oracle: at least as many rows as columns.
fn oriented(board: &Board) -> Board {
    if board.m() < board.n() {
        board.transpose()
    } else {
        board.clone()
    }
}

fn free_cols(b: &Board, i: usize) -> Vec<usize> {
    let mask = b.row_mask(i);
    (0..b.n()).filter(|&j| mask & (1 << j) == 0).collect()
}

/// Allowed dimensions after `i` of `m` rows for target rank `r`.
fn dim_window(i: usize, m: usize, n: usize, r: usize) -> (usize, usize) {
    (r.saturating_sub(m - i), r.min(i).min(n))
}

/// Upper estimate of the largest DP layer for this query at this `q`.
pub fn estimate_states(board: &Board, r: usize, q: u64) -> f64 {
    let b = oriented(board);
    let (m, n) = (b.m(), b.n());
    let qf = q as f64;
    // e[d] bounds the states of dimension d reachable so far
    let mut e = vec![0.0f64; n + 1];
    e[0] = 1.0;
    let mut worst: f64 = 1.0;
    for i in 1..=m {
        let a = free_cols(&b, i).len();
        let lines = (qf.powi(a as i32) - 1.0) / (qf - 1.0);
        for d in (1..=n).rev() {
            e[d] += e[d - 1] * lines;
        }
        let (lo, hi) = dim_window(i, m, n, r);
        if lo > hi {
            return 0.0;
        }
        let layer: f64 = (lo..=hi).map(|d| e[d].min(gaussian_binomial(n, d, qf))).sum();
        worst = worst.max(layer);
    }
    worst
}

pub fn check_budget(board: &Board, r: usize, q: u64, budget: u64) -> Result<(), CountError> {
    let est = estimate_states(board, r, q);
    if est > budget as f64 {
        return Err(CountError::BudgetExceeded {
            q,
            estimate: est,
            budget,
        });
    }
    Ok(())
}

/// Accumulator used by the DP: `u128` when the total cannot overflow.
trait Tally: Clone + Send + Sync {
    fn nil() -> Self;
    fn unit() -> Self;
    fn weight(q: u64, k: usize, times_q_minus_one: bool) -> Self;
    fn add_mul(&mut self, x: &Self, w: &Self);
    fn merge(&mut self, x: Self);
    fn into_big(self) -> BigUint;
}

impl Tally for u128 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn weight(q: u64, k: usize, t: bool) -> Self {
        let p = (q as u128).pow(k as u32);
        if t {
            p * (q as u128 - 1)
        } else {
            p
        }
    }
    fn add_mul(&mut self, x: &Self, w: &Self) {
        *self += x * w;
    }
    fn merge(&mut self, x: Self) {
        *self += x;
    }
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Tally for BigUint {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn weight(q: u64, k: usize, t: bool) -> Self {
        let p = BigUint::from(q).pow(k as u32);
        if t {
            p * (q - 1)
        } else {
            p
        }
    }
    fn add_mul(&mut self, x: &Self, w: &Self) {
        *self += x * w;
    }
    fn merge(&mut self, x: Self) {
        *self += x;
    }
    fn into_big(self) -> BigUint {
        self
    }
}

type Layer<T> = HashMap<Box<[u8]>, T>;

/// Transitions of one state through one row.
fn step_state<T: Tally>(
    field: &FieldSpec,
    n: usize,
    wide: bool,
    cols: &[usize],
    window: (usize, usize),
    key: &[u8],
    count: &T,
    weights: &[(T, T)],
    out: &mut Layer<T>,
) {
    let v = Subspace::decode(n, key, wide);
    let d = v.dim();
    // W_A reduced modulo V, then put in echelon form
    let reduced: Vec<Vec<u32>> = cols
        .iter()
        .map(|&j| {
            let mut e = vec![0u32; n];
            e[j] = 1;
            v.reduce(field, &mut e);
            e
        })
        .collect();
    let ext = Subspace::span(field, n, &reduced);
    let e = ext.dim();
    let k = cols.len() - e;
    let (stay_w, grow_w) = &weights[k];
    if d >= window.0 && d <= window.1 {
        out.entry(key.into()).or_insert_with(T::nil).add_mul(count, stay_w);
    }
    if e == 0 || d + 1 < window.0 || d + 1 > window.1 {
        return;
    }
    // one representative per line: leading coefficient 1 on basis vector t
    let q = field.order();
    let basis = ext.basis();
    for t in 0..e {
        let tail = e - t - 1;
        let total = (q as u64).pow(tail as u32);
        for idx in 0..total {
            let mut u = basis[t].clone();
            let mut rest = idx;
            for s in t + 1..e {
                let c = (rest % q as u64) as u32;
                rest /= q as u64;
                if c != 0 {
                    axpy(field, &mut u, c, &basis[s]);
                }
            }
            let mut next = v.clone();
            next.insert_reduced(field, u);
            out.entry(next.encode(wide))
                .or_insert_with(T::nil)
                .add_mul(count, grow_w);
        }
    }
}

fn run_dp<T: Tally>(b: &Board, r: usize, field: &FieldSpec) -> BigUint {
    let (m, n) = (b.m(), b.n());
    let q = field.order() as u64;
    let wide = field.order() > 256;
    let weights: Vec<(T, T)> = (0..=n)
        .map(|k| (T::weight(q, k, false), T::weight(q, k, true)))
        .collect();
    let mut layer: Layer<T> = HashMap::new();
    layer.insert(Subspace::zero(n).encode(wide), T::unit());
    for i in 1..=m {
        let cols = free_cols(b, i);
        let window = dim_window(i, m, n, r);
        let entries: Vec<(Box<[u8]>, T)> = layer.into_iter().collect();
        layer = if entries.len() < 2048 {
            let mut out = HashMap::new();
            for (key, count) in &entries {
                step_state(field, n, wide, &cols, window, key, count, &weights, &mut out);
            }
            out
        } else {
            entries
                .par_iter()
                .fold(HashMap::new, |mut out, (key, count)| {
                    step_state(field, n, wide, &cols, window, key, count, &weights, &mut out);
                    out
                })
                .reduce(HashMap::new, |mut a, b| {
                    let (mut big, small) = if a.len() >= b.len() {
                        (a, b)
                    } else {
                        (b, std::mem::take(&mut a))
                    };
                    for (key, c) in small {
                        big.entry(key).or_insert_with(T::nil).merge(c);
                    }
                    big
                })
        };
    }
    layer.into_values().fold(BigUint::zero(), |acc, c| acc + c.into_big())
}

/// Number of matrices over `field` with rank `r` whose support avoids the
/// board, by the echelon-state DP. Refuses when the estimated layer size
/// exceeds `budget`.
pub fn count_at_q(board: &Board, r: usize, field: &FieldSpec, budget: u64) -> Result<BigUint, CountError> {
    let b = oriented(board);
    if r > b.n() {
        return Ok(BigUint::zero());
    }
    if b.n() == 0 {
        return Ok(BigUint::one());
    }
    let q = field.order() as u64;
    check_budget(&b, r, q, budget)?;
    let free = b.m() * b.n() - b.len();
    // q^free bounds every partial sum
    let fits = (free as f64) * (q as f64).log2() < 126.0;
    Ok(if fits {
        run_dp::<u128>(&b, r, field)
    } else {
        run_dp::<BigUint>(&b, r, field)
    })
}

/// Rank of a dense matrix over the field.
pub fn rank(field: &FieldSpec, rows: &[Vec<u32>]) -> usize {
    let n = rows.first().map_or(0, Vec::len);
    Subspace::span(field, n, rows).dim()
}

/// Counts for every rank `0..=min(m,n)` by listing all matrices. Only for
/// boards with at most [`NAIVE_MAX_FREE`] free entries.
pub fn naive_counts(board: &Board, field: &FieldSpec) -> Result<Vec<BigUint>, CountError> {
    let free: Vec<(usize, usize)> = board.complement().cells().collect();
    if free.len() > NAIVE_MAX_FREE {
        return Err(CountError::TooManyFreeEntries {
            free: free.len(),
            max: NAIVE_MAX_FREE,
        });
    }
    let (m, n) = (board.m(), board.n());
    let q = field.order() as u64;
    let total =
        q.checked_pow(free.len() as u32)
            .filter(|&t| t <= 50_000_000)
            .ok_or(CountError::TooManyFreeEntries {
                free: free.len(),
                max: NAIVE_MAX_FREE,
            })?;
    let mut counts = vec![0u64; m.min(n) + 1];
    let mut mat = vec![vec![0u32; n]; m];
    for idx in 0..total {
        let mut rest = idx;
        for &(i, j) in &free {
            mat[i - 1][j - 1] = (rest % q) as u32;
            rest /= q;
        }
        counts[rank(field, &mat)] += 1;
    }
    Ok(counts.into_iter().map(BigUint::from).collect())
}

pub fn count_naive(board: &Board, r: usize, field: &FieldSpec) -> Result<BigUint, CountError> {
    let counts = naive_counts(board, field)?;
    Ok(counts.get(r).cloned().unwrap_or_default())
}

/// Convenience for tests and reports: oracle value as `u128`.
pub fn count_at_q_u128(board: &Board, r: usize, field: &FieldSpec, budget: u64) -> Result<u128, CountError> {
    count_at_q(board, r, field, budget).map(|c| c.to_u128().expect("fits"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::of_order(q).unwrap()
    }

    #[test]
    fn subspace_basics() {
        let f = gf(3);
        let s = Subspace::span(&f, 3, &[vec![1, 1, 0], vec![2, 2, 0], vec![0, 1, 1]]);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.basis(), &[vec![1, 0, 2], vec![0, 1, 1]]);
        assert_eq!(s.pivots(), vec![0, 1]);
        assert!(s.contains(&f, &[1, 2, 1]));
        assert!(!s.contains(&f, &[0, 0, 1]));
    }

    #[test]
    fn oracle_examples() {
        let diag = Board::diagonal(3).unwrap();
        assert_eq!(
            count_at_q(&diag, 3, &gf(2), DEFAULT_BUDGET).unwrap(),
            BigUint::from(14u32)
        );
        let empty = Board::new(2, 2).unwrap();
        assert_eq!(
            count_at_q(&empty, 2, &gf(3), DEFAULT_BUDGET).unwrap(),
            BigUint::from(48u32)
        );
        let empty3 = Board::new(3, 3).unwrap();
        assert_eq!(
            count_at_q(&empty3, 3, &gf(2), DEFAULT_BUDGET).unwrap(),
            BigUint::from(168u32)
        );
        let skew = crate::diagram::ShapeSpec::new(vec![4, 4, 3, 2], vec![3, 1])
            .unwrap()
            .board(4, 4)
            .unwrap();
        assert_eq!(
            count_at_q(&skew.complement(), 3, &gf(2), DEFAULT_BUDGET).unwrap(),
            BigUint::from(252u32)
        );
    }

    #[test]
    fn rectangular_and_degenerate() {
        let f = gf(2);
        let wide = Board::new(1, 3).unwrap();
        assert_eq!(count_at_q(&wide, 1, &f, DEFAULT_BUDGET).unwrap(), BigUint::from(7u32));
        let none = Board::new(0, 3).unwrap();
        assert_eq!(count_at_q(&none, 0, &f, DEFAULT_BUDGET).unwrap(), BigUint::one());
        assert_eq!(count_at_q(&none, 1, &f, DEFAULT_BUDGET).unwrap(), BigUint::zero());
        let full = Board::full(2, 2).unwrap();
        assert_eq!(count_at_q(&full, 0, &f, DEFAULT_BUDGET).unwrap(), BigUint::one());
    }

    #[test]
    fn naive_agrees_on_small_boards() {
        for q in [2, 3] {
            let f = gf(q);
            for mask in 0u64..512 {
                let rows = vec![mask & 7, (mask >> 3) & 7, (mask >> 6) & 7];
                let b = Board::from_row_masks(3, rows).unwrap();
                let naive = naive_counts(&b, &f).unwrap();
                for (r, expected) in naive.iter().enumerate() {
                    assert_eq!(&count_at_q(&b, r, &f, DEFAULT_BUDGET).unwrap(), expected, "{b:?} r={r}");
                }
            }
        }
    }

    #[test]
    fn large_field_uses_wide_keys() {
        let f = gf(289);
        let empty = Board::new(2, 2).unwrap();
        let q = BigUint::from(289u32);
        let expected = (&q * &q - 1u32) * (&q * &q - &q);
        assert_eq!(count_at_q(&empty, 2, &f, DEFAULT_BUDGET).unwrap(), expected);
    }

    #[test]
    fn budget_refuses_large_queries() {
        let b = Board::new(8, 8).unwrap();
        assert!(matches!(
            count_at_q(&b, 4, &gf(5), DEFAULT_BUDGET),
            Err(CountError::BudgetExceeded { .. })
        ));
        assert!(estimate_states(&Board::new(2, 2).unwrap(), 2, 2) < 10.0);
    }

    #[test]
    fn naive_limit() {
        let b = Board::new(4, 4).unwrap();
        assert!(matches!(
            naive_counts(&b, &gf(2)),
            Err(CountError::TooManyFreeEntries { .. })
        ));
    }
}
