//! Boards: cell subsets of an `m x n` grid, 1-indexed as `(row, col)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Widest supported board; each row is a `u64` bitmask.
pub const MAX_COLS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("cell ({i},{j}) outside {m}x{n} grid")]
    CellOutOfRange { i: usize, j: usize, m: usize, n: usize },
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("boards wider than {MAX_COLS} columns are not supported")]
    TooWide,
    #[error("not a partition: {0:?}")]
    MalformedPartition(Vec<usize>),
    #[error("inner shape {mu:?} is not contained in {lambda:?}")]
    NotContained { lambda: Vec<usize>, mu: Vec<usize> },
    #[error("shape {shape:?} does not fit in {m}x{n}")]
    ShapeDoesNotFit { shape: Vec<usize>, m: usize, n: usize },
    #[error("permutation of length {got} where {expected} was needed")]
    BadPermutation { expected: usize, got: usize },
    #[error("board does not match the given shape")]
    ShapeMismatch,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "BoardRepr", try_from = "BoardRepr")]
pub struct Board {
    m: usize,
    n: usize,
    rows: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct BoardRepr {
    m: usize,
    n: usize,
    cells: Vec<(usize, usize)>,
}

impl From<Board> for BoardRepr {
    fn from(b: Board) -> Self {
        BoardRepr {
            m: b.m,
            n: b.n,
            cells: b.cells().collect(),
        }
    }
}

impl TryFrom<BoardRepr> for Board {
    type Error = DiagramError;
    fn try_from(r: BoardRepr) -> Result<Self, Self::Error> {
        Board::from_cells(r.m, r.n, r.cells)
    }
}

fn col_bit(j: usize) -> u64 {
    1u64 << (j - 1)
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Row and column tallies of a board and of its complement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profiles {
    pub row_cells: Vec<usize>,
    pub col_cells: Vec<usize>,
    pub row_free: Vec<usize>,
    pub col_free: Vec<usize>,
}

impl Board {
    /// Empty `m x n` board.
    pub fn new(m: usize, n: usize) -> Result<Self, DiagramError> {
        if n > MAX_COLS {
            return Err(DiagramError::TooWide);
        }
        Ok(Board { m, n, rows: vec![0; m] })
    }

    pub fn full(m: usize, n: usize) -> Result<Self, DiagramError> {
        Ok(Self::new(m, n)?.complement())
    }

    pub fn from_cells(
        m: usize,
        n: usize,
        cells: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, DiagramError> {
        let mut b = Self::new(m, n)?;
        for (i, j) in cells {
            b.insert(i, j)?;
        }
        Ok(b)
    }

    /// Builds from 1-indexed row bitmasks (bit `j-1` is column `j`).
    pub fn from_row_masks(n: usize, rows: Vec<u64>) -> Result<Self, DiagramError> {
        if n > MAX_COLS {
            return Err(DiagramError::TooWide);
        }
        let mask = full_mask(n);
        for (i, &r) in rows.iter().enumerate() {
            if r & !mask != 0 {
                let j = 64 - (r & !mask).leading_zeros() as usize;
                return Err(DiagramError::CellOutOfRange {
                    i: i + 1,
                    j,
                    m: rows.len(),
                    n,
                });
            }
        }
        Ok(Board { m: rows.len(), n, rows })
    }

    /// Diagonal board `{(i,i)}` in `n x n`.
    pub fn diagonal(n: usize) -> Result<Self, DiagramError> {
        Self::from_cells(n, n, (1..=n).map(|i| (i, i)))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Bitmask of row `i` (1-indexed).
    pub fn row_mask(&self, i: usize) -> u64 {
        self.rows[i - 1]
    }

    pub fn row_masks(&self) -> &[u64] {
        &self.rows
    }

    pub fn col_mask(&self, j: usize) -> u64 {
        let bit = col_bit(j);
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| *r & bit != 0)
            .fold(0, |acc, (i, _)| acc | (1u64 << i))
    }

    fn check_cell(&self, i: usize, j: usize) -> Result<(), DiagramError> {
        if i == 0 || j == 0 || i > self.m || j > self.n {
            return Err(DiagramError::CellOutOfRange {
                i,
                j,
                m: self.m,
                n: self.n,
            });
        }
        Ok(())
    }

    pub fn insert(&mut self, i: usize, j: usize) -> Result<(), DiagramError> {
        self.check_cell(i, j)?;
        self.rows[i - 1] |= col_bit(j);
        Ok(())
    }

    pub fn remove(&mut self, i: usize, j: usize) -> Result<(), DiagramError> {
        self.check_cell(i, j)?;
        self.rows[i - 1] &= !col_bit(j);
        Ok(())
    }

    /// Membership test; out-of-range cells are simply absent.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.check_cell(i, j).is_ok() && self.rows[i - 1] & col_bit(j) != 0
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(move |(i, &r)| {
            (1..=self.n)
                .filter(move |&j| r & col_bit(j) != 0)
                .map(move |j| (i + 1, j))
        })
    }

    pub fn complement(&self) -> Board {
        let mask = full_mask(self.n);
        Board {
            m: self.m,
            n: self.n,
            rows: self.rows.iter().map(|r| !r & mask).collect(),
        }
    }

    pub fn transpose(&self) -> Board {
        assert!(self.m <= MAX_COLS, "transpose would exceed {MAX_COLS} columns");
        let mut rows = vec![0u64; self.n];
        for (i, j) in self.cells() {
            rows[j - 1] |= col_bit(i);
        }
        Board {
            m: self.n,
            n: self.m,
            rows,
        }
    }

    /// Sends cell `(i, j)` to `(row_perm[i-1], col_perm[j-1])`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Board, DiagramError> {
        check_perm(row_perm, self.m)?;
        check_perm(col_perm, self.n)?;
        let mut out = Board::new(self.m, self.n)?;
        for (i, j) in self.cells() {
            out.rows[row_perm[i - 1] - 1] |= col_bit(col_perm[j - 1]);
        }
        Ok(out)
    }

    /// Reorders rows so that new row `t` is old row `order[t-1]`.
    pub fn reorder_rows(&self, order: &[usize]) -> Result<Board, DiagramError> {
        check_perm(order, self.m)?;
        Ok(Board {
            m: self.m,
            n: self.n,
            rows: order.iter().map(|&i| self.rows[i - 1]).collect(),
        })
    }

    /// Reorders columns so that new column `t` is old column `order[t-1]`.
    pub fn reorder_cols(&self, order: &[usize]) -> Result<Board, DiagramError> {
        check_perm(order, self.n)?;
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                order
                    .iter()
                    .enumerate()
                    .filter(|(_, &j)| r & col_bit(j) != 0)
                    .fold(0, |acc, (t, _)| acc | (1u64 << t))
            })
            .collect();
        Ok(Board {
            m: self.m,
            n: self.n,
            rows,
        })
    }

    pub fn delete_row(&self, i: usize) -> Result<Board, DiagramError> {
        if i == 0 || i > self.m {
            return Err(DiagramError::IndexOutOfRange { index: i, len: self.m });
        }
        let mut rows = self.rows.clone();
        rows.remove(i - 1);
        Ok(Board {
            m: self.m - 1,
            n: self.n,
            rows,
        })
    }

    pub fn delete_col(&self, j: usize) -> Result<Board, DiagramError> {
        if j == 0 || j > self.n {
            return Err(DiagramError::IndexOutOfRange { index: j, len: self.n });
        }
        let low = col_bit(j) - 1;
        let rows = self.rows.iter().map(|&r| (r & low) | ((r >> 1) & !low)).collect();
        Ok(Board {
            m: self.m,
            n: self.n - 1,
            rows,
        })
    }

    /// The part of the board inside the top-left `a x b` corner.
    pub fn restrict(&self, a: usize, b: usize) -> Board {
        let (a, b) = (a.min(self.m), b.min(self.n));
        let mask = full_mask(b);
        Board {
            m: a,
            n: b,
            rows: self.rows[..a].iter().map(|r| r & mask).collect(),
        }
    }

    /// Rotation by 180 degrees: `(i, j) -> (m+1-i, n+1-j)`.
    pub fn rot180(&self) -> Board {
        let mut out = Board::new(self.m, self.n).expect("same width");
        for (i, j) in self.cells() {
            out.rows[self.m - i] |= col_bit(self.n + 1 - j);
        }
        out
    }

    pub fn profiles(&self) -> Profiles {
        let row_cells: Vec<usize> = self.rows.iter().map(|r| r.count_ones() as usize).collect();
        let col_cells: Vec<usize> = (1..=self.n)
            .map(|j| self.rows.iter().filter(|&&r| r & col_bit(j) != 0).count())
            .collect();
        Profiles {
            row_free: row_cells.iter().map(|c| self.n - c).collect(),
            col_free: col_cells.iter().map(|c| self.m - c).collect(),
            row_cells,
            col_cells,
        }
    }

    /// NE property: `(i,j), (i',j), (i,j')` in the board with `i' < i`,
    /// `j < j'` force `(i',j')`.
    pub fn is_ne(&self) -> bool {
        for i in 2..=self.m {
            let lower = self.rows[i - 1];
            for ip in 1..i {
                let upper = self.rows[ip - 1];
                // some j in lower & upper, and some j' > j in lower but not upper
                let shared = lower & upper;
                if shared == 0 {
                    continue;
                }
                let j = shared.trailing_zeros() as usize + 1;
                let above_j = !(col_bit(j) | (col_bit(j) - 1));
                if lower & !upper & above_j != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Le property: `(i,j), (k,l)` in the board with `i > k`, `j < l` force `(k,j)`.
    pub fn is_le(&self) -> bool {
        for i in 2..=self.m {
            let lower = self.rows[i - 1];
            for k in 1..i {
                let upper = self.rows[k - 1];
                if upper == 0 {
                    continue;
                }
                // every j in lower left of the rightmost cell of upper must be in upper
                let right = 64 - upper.leading_zeros() as usize;
                let left_of_right = col_bit(right) - 1;
                if lower & left_of_right & !upper != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// True iff row sets are pairwise nested, i.e. rows and columns can be
    /// rearranged into a Young diagram.
    pub fn is_straight_up_to_perm(&self) -> bool {
        let mut rows = self.rows.clone();
        rows.sort_by_key(|r| std::cmp::Reverse(r.count_ones()));
        rows.windows(2).all(|w| w[1] & !w[0] == 0)
    }

    /// If the board is exactly some `S_{lambda/mu}` in place, returns it.
    /// Rows must be intervals with weakly decreasing endpoints.
    pub fn as_skew_shape(&self) -> Option<ShapeSpec> {
        let mut lambda = vec![0usize; self.m];
        let mut mu = vec![0usize; self.m];
        let mut empty = vec![false; self.m];
        for (idx, &r) in self.rows.iter().enumerate() {
            if r == 0 {
                empty[idx] = true;
                continue;
            }
            let lo = r.trailing_zeros() as usize;
            let hi = 64 - r.leading_zeros() as usize;
            if r != full_mask(hi) & !(col_bit(lo + 1) - 1) {
                return None;
            }
            lambda[idx] = hi;
            mu[idx] = lo;
        }
        // An empty row sits at the level of the next nonempty row's lambda.
        let mut next_lambda = 0;
        for idx in (0..self.m).rev() {
            if empty[idx] {
                lambda[idx] = next_lambda;
                mu[idx] = next_lambda;
            } else {
                next_lambda = lambda[idx];
            }
        }
        let dec = |v: &[usize]| v.windows(2).all(|w| w[0] >= w[1]);
        if !dec(&lambda) || !dec(&mu) {
            return None;
        }
        let spec = ShapeSpec::new(trim(lambda), trim(mu)).ok()?;
        (spec.board(self.m, self.n).ok()? == *self).then_some(spec)
    }

    pub fn is_skew_shape(&self) -> bool {
        self.as_skew_shape().is_some()
    }

    /// No row or column meets both `S_mu` and the outside of `S_lambda`.
    pub fn is_nonoverlapping_skew(&self, spec: &ShapeSpec) -> Result<bool, DiagramError> {
        if spec.board(self.m, self.n)? != *self {
            return Err(DiagramError::ShapeMismatch);
        }
        let inner = spec.inner().board(self.m, self.n)?;
        let outside = spec.outer().board(self.m, self.n)?.complement();
        for i in 1..=self.m {
            if inner.row_mask(i) != 0 && outside.row_mask(i) != 0 {
                return Ok(false);
            }
        }
        for j in 1..=self.n {
            if inner.col_mask(j) != 0 && outside.col_mask(j) != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Row key with column 1 as the most significant position.
    fn row_key(r: u64) -> u64 {
        r.reverse_bits()
    }

    /// Deterministic representative under row and column sorting: rows,
    /// then columns, sorted by characteristic vector (descending) until
    /// nothing moves. Counting functions are invariant under the result.
    pub fn normalize(&self) -> Board {
        let mut cur = self.clone();
        for _ in 0..64 {
            let mut order: Vec<usize> = (1..=cur.m).collect();
            order.sort_by_key(|&i| std::cmp::Reverse(Self::row_key(cur.rows[i - 1])));
            let rows_sorted = cur.reorder_rows(&order).expect("valid order");
            let t = rows_sorted.transpose_wide();
            let mut corder: Vec<usize> = (1..=t.len()).collect();
            corder.sort_by_key(|&j| std::cmp::Reverse(t[j - 1].clone()));
            let next = rows_sorted.reorder_cols(&corder).expect("valid order");
            if next == cur {
                break;
            }
            cur = next;
        }
        cur
    }

    /// Column characteristic vectors, row 1 first, for any height.
    fn transpose_wide(&self) -> Vec<Vec<bool>> {
        (1..=self.n)
            .map(|j| self.rows.iter().map(|r| r & col_bit(j) != 0).collect())
            .collect()
    }

    /// ASCII picture: `0` for board cells (forced zeros), `*` elsewhere.
    pub fn ascii(&self) -> String {
        let mut s = String::new();
        for &r in &self.rows {
            for j in 1..=self.n {
                s.push(if r & col_bit(j) != 0 { '0' } else { '*' });
            }
            s.push('\n');
        }
        s
    }

    /// Spec-string form `coords:m,n:(i,j);...` that re-parses to this board.
    pub fn to_coords_spec(&self) -> String {
        let cells: Vec<String> = self.cells().map(|(i, j)| format!("({i},{j})")).collect();
        format!("coords:{},{}:{}", self.m, self.n, cells.join(";"))
    }
}

fn check_perm(p: &[usize], len: usize) -> Result<(), DiagramError> {
    if p.len() != len {
        return Err(DiagramError::BadPermutation {
            expected: len,
            got: p.len(),
        });
    }
    let mut seen = vec![false; len];
    for &x in p {
        if x == 0 || x > len || seen[x - 1] {
            return Err(DiagramError::BadPermutation {
                expected: len,
                got: p.len(),
            });
        }
        seen[x - 1] = true;
    }
    Ok(())
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Board({}x{}", self.m, self.n)?;
        for &r in &self.rows {
            write!(f, " ")?;
            for j in 1..=self.n {
                write!(f, "{}", if r & col_bit(j) != 0 { '0' } else { '.' })?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ascii())
    }
}

fn trim(mut v: Vec<usize>) -> Vec<usize> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// A straight shape `lambda` or a skew shape `lambda/mu`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeSpec {
    lambda: Vec<usize>,
    mu: Vec<usize>,
}

impl ShapeSpec {
    /// Trailing zeros are dropped; `mu` may be empty.
    pub fn new(lambda: Vec<usize>, mu: Vec<usize>) -> Result<Self, DiagramError> {
        let (lambda, mu) = (trim(lambda), trim(mu));
        for part in [&lambda, &mu] {
            if part.windows(2).any(|w| w[0] < w[1]) {
                return Err(DiagramError::MalformedPartition(part.clone()));
            }
        }
        if mu.len() > lambda.len() || mu.iter().zip(&lambda).any(|(a, b)| a > b) {
            return Err(DiagramError::NotContained { lambda, mu });
        }
        Ok(ShapeSpec { lambda, mu })
    }

    pub fn straight(lambda: Vec<usize>) -> Result<Self, DiagramError> {
        Self::new(lambda, Vec::new())
    }

    pub fn lambda(&self) -> &[usize] {
        &self.lambda
    }

    pub fn mu(&self) -> &[usize] {
        &self.mu
    }

    pub fn is_straight(&self) -> bool {
        self.mu.is_empty()
    }

    /// `lambda_i`, zero past the last part.
    pub fn lambda_at(&self, i: usize) -> usize {
        self.lambda.get(i - 1).copied().unwrap_or(0)
    }

    pub fn mu_at(&self, i: usize) -> usize {
        self.mu.get(i - 1).copied().unwrap_or(0)
    }

    /// `|lambda| - |mu|`, the number of cells.
    pub fn size(&self) -> usize {
        self.lambda.iter().sum::<usize>() - self.mu_size()
    }

    pub fn mu_size(&self) -> usize {
        self.mu.iter().sum()
    }

    pub fn outer(&self) -> ShapeSpec {
        ShapeSpec {
            lambda: self.lambda.clone(),
            mu: Vec::new(),
        }
    }

    pub fn inner(&self) -> ShapeSpec {
        ShapeSpec {
            lambda: self.mu.clone(),
            mu: Vec::new(),
        }
    }

    /// Cells `(i, j)` with `mu_i < j <= lambda_i` in an `m x n` grid.
    pub fn board(&self, m: usize, n: usize) -> Result<Board, DiagramError> {
        if self.lambda.len() > m || self.lambda.first().is_some_and(|&l| l > n) {
            return Err(DiagramError::ShapeDoesNotFit {
                shape: self.lambda.clone(),
                m,
                n,
            });
        }
        let mut b = Board::new(m, n)?;
        for (idx, &l) in self.lambda.iter().enumerate() {
            let lo = self.mu.get(idx).copied().unwrap_or(0);
            b.rows[idx] = full_mask(l) & !full_mask(lo);
        }
        Ok(b)
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}", join(&self.lambda))?;
        if !self.mu.is_empty() {
            write!(f, "/{}", join(&self.mu))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shape(l: &[usize], mu: &[usize]) -> ShapeSpec {
        ShapeSpec::new(l.to_vec(), mu.to_vec()).unwrap()
    }

    #[test]
    fn straight_shape_picture() {
        let b = shape(&[4, 3, 2], &[]).board(5, 5).unwrap();
        assert_eq!(b.len(), 9);
        assert_eq!(b.ascii(), "0000*\n000**\n00***\n*****\n*****\n");
    }

    #[test]
    fn skew_shape_picture() {
        let b = shape(&[5, 5, 4, 3, 1], &[2, 2, 1]).board(5, 5).unwrap();
        assert_eq!(b.len(), 13);
        assert_eq!(b.ascii(), "**000\n**000\n*000*\n000**\n0****\n");
        assert!(shape(&[], &[]).board(5, 5).unwrap().is_empty());
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            ShapeSpec::new(vec![1, 2], vec![]),
            Err(DiagramError::MalformedPartition(_))
        ));
        assert!(matches!(
            ShapeSpec::new(vec![2, 1], vec![2, 2]),
            Err(DiagramError::NotContained { .. })
        ));
        assert!(matches!(
            shape(&[6], &[]).board(5, 5),
            Err(DiagramError::ShapeDoesNotFit { .. })
        ));
        assert!(matches!(
            Board::from_cells(2, 2, [(3, 1)]),
            Err(DiagramError::CellOutOfRange { .. })
        ));
    }

    #[test]
    fn set_operations() {
        let b = shape(&[2, 1], &[]).board(3, 3).unwrap();
        assert_eq!(b.transpose(), b);
        assert_eq!(b.complement().complement(), b);
        assert_eq!(b.len() + b.complement().len(), 9);
        assert_eq!(b.rot180().cells().collect::<Vec<_>>(), vec![(2, 3), (3, 2), (3, 3)]);
        let d = b.delete_row(1).unwrap();
        assert_eq!(d.cells().collect::<Vec<_>>(), vec![(1, 1)]);
        let d = b.delete_col(1).unwrap();
        assert_eq!((d.m(), d.n()), (3, 2));
        assert_eq!(d.cells().collect::<Vec<_>>(), vec![(1, 1)]);
        assert!(b.delete_row(4).is_err());
        assert_eq!(b.restrict(1, 1).len(), 1);
    }

    #[test]
    fn permuting_block_board() {
        // two diagonal blocks; swapping the row halves moves them off-diagonal
        let b = Board::from_cells(4, 4, [(1, 1), (1, 2), (2, 1), (2, 2), (3, 3), (4, 4)]).unwrap();
        let p = b.permute(&[3, 4, 1, 2], &[1, 2, 3, 4]).unwrap();
        assert_eq!(
            p.cells().collect::<Vec<_>>(),
            vec![(1, 3), (2, 4), (3, 1), (3, 2), (4, 1), (4, 2)]
        );
        assert!(b.permute(&[1, 1, 2, 3], &[1, 2, 3, 4]).is_err());
    }

    #[test]
    fn ne_examples() {
        let skew = shape(&[4, 4, 3, 2], &[3, 1]).board(4, 4).unwrap();
        assert!(skew.is_ne());
        assert!(!skew.complement().is_ne());
        let mut b = Board::full(4, 4).unwrap();
        for (i, j) in [(1, 1), (3, 4), (4, 1), (4, 3), (4, 4)] {
            b.remove(i, j).unwrap();
        }
        assert!(b.is_ne());
        assert_eq!(b.len(), 11);
    }

    #[test]
    fn le_examples() {
        assert!(!Board::from_cells(2, 2, [(1, 2), (2, 1)]).unwrap().is_le());
        assert!(Board::new(3, 3).unwrap().is_le());
        assert!(Board::from_cells(2, 2, [(1, 1), (1, 2), (2, 1)]).unwrap().is_le());
    }

    #[test]
    fn straight_up_to_perm() {
        let r2143 = Board::from_cells(4, 4, [(1, 1), (3, 3)]).unwrap();
        assert!(!r2143.is_straight_up_to_perm());
        let b = shape(&[3, 2, 2], &[]).board(4, 4).unwrap();
        let shuffled = b.permute(&[4, 1, 3, 2], &[2, 3, 1, 4]).unwrap();
        assert!(shuffled.is_straight_up_to_perm());
    }

    #[test]
    fn skew_shape_recognition() {
        let spec = shape(&[5, 5, 4, 3, 1], &[2, 2, 1]);
        assert_eq!(spec.board(5, 5).unwrap().as_skew_shape(), Some(spec));
        let gap = shape(&[3, 1, 1], &[1, 1]);
        let b = gap.board(3, 3).unwrap();
        assert_eq!(b.as_skew_shape().unwrap().board(3, 3).unwrap(), b);
        assert!(Board::from_cells(1, 3, [(1, 1), (1, 3)])
            .unwrap()
            .as_skew_shape()
            .is_none());
        assert!(Board::from_cells(2, 2, [(1, 1), (2, 2)])
            .unwrap()
            .as_skew_shape()
            .is_none());
        assert!(Board::from_cells(2, 2, [(2, 1), (2, 2)]).unwrap().is_skew_shape());
    }

    #[test]
    fn nonoverlapping() {
        let s = shape(&[5, 5, 5, 5, 3], &[1]);
        assert!(s.board(5, 5).unwrap().is_nonoverlapping_skew(&s).unwrap());
        let s = shape(&[2, 2], &[1]);
        assert!(s.board(2, 2).unwrap().is_nonoverlapping_skew(&s).unwrap());
        let s = shape(&[2, 2, 1], &[1]);
        assert!(!s.board(3, 3).unwrap().is_nonoverlapping_skew(&s).unwrap());
        let other = shape(&[1], &[]);
        assert_eq!(
            s.board(3, 3).unwrap().is_nonoverlapping_skew(&other),
            Err(DiagramError::ShapeMismatch)
        );
    }

    #[test]
    fn json_form() {
        let b = Board::from_cells(2, 3, [(1, 2), (2, 3)]).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, r#"{"m":2,"n":3,"cells":[[1,2],[2,3]]}"#);
        assert_eq!(serde_json::from_str::<Board>(&json).unwrap(), b);
        assert!(serde_json::from_str::<Board>(r#"{"m":1,"n":1,"cells":[[2,1]]}"#).is_err());
    }

    #[test]
    fn profile_examples() {
        let p = Board::new(2, 3).unwrap().profiles();
        assert_eq!(p.row_cells, vec![0, 0]);
        assert_eq!(p.row_free, vec![3, 3]);
        let p = Board::full(2, 3).unwrap().profiles();
        assert_eq!(p.col_cells, vec![2, 2, 2]);
        assert_eq!(p.col_free, vec![0, 0, 0]);
    }

    #[test]
    fn normalize_examples() {
        let s = shape(&[4, 3, 1], &[]).board(4, 4).unwrap();
        assert_eq!(s.normalize(), s);
        let shuffled = s.reorder_rows(&[3, 1, 4, 2]).unwrap();
        assert_eq!(shuffled.normalize(), s);
    }

    fn arb_partition(n: usize) -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0..=n, n).prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            v
        })
    }

    fn arb_board(max: usize) -> impl Strategy<Value = Board> {
        (1..=max, 1..=max).prop_flat_map(|(m, n)| {
            prop::collection::vec(0..(1u64 << n), m).prop_map(move |rows| Board::from_row_masks(n, rows).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn shapes_have_ne(n in 1usize..=8, l in arb_partition(8), m in arb_partition(8)) {
            let lam: Vec<usize> = l.iter().take(n).map(|&x| x.min(n)).collect();
            let mu: Vec<usize> = m.iter().zip(&lam).map(|(&a, &b)| a.min(b)).collect();
            let straight = ShapeSpec::straight(lam.clone()).unwrap().board(n, n).unwrap();
            let skew = ShapeSpec::new(lam, mu).unwrap().board(n, n).unwrap();
            prop_assert!(straight.is_ne());
            prop_assert!(skew.is_ne());
            prop_assert!(straight.complement().is_ne());
            prop_assert!(skew.is_skew_shape());
        }

        #[test]
        fn normalize_is_idempotent(b in arb_board(6)) {
            let nb = b.normalize();
            prop_assert_eq!(nb.normalize(), nb.clone());
            let sorted = |mut v: Vec<usize>| { v.sort_unstable(); v };
            let (p, q) = (b.profiles(), nb.profiles());
            prop_assert_eq!(sorted(p.row_cells), sorted(q.row_cells));
            prop_assert_eq!(sorted(p.col_cells), sorted(q.col_cells));
        }

        #[test]
        fn cell_bookkeeping(b in arb_board(6), seed in any::<u64>()) {
            let total = b.m() * b.n();
            prop_assert_eq!(b.len() + b.complement().len(), total);
            prop_assert_eq!(b.transpose().len(), b.len());
            prop_assert_eq!(b.transpose().transpose(), b.clone());
            let mut rp: Vec<usize> = (1..=b.m()).collect();
            let mut cp: Vec<usize> = (1..=b.n()).collect();
            rp.rotate_left(seed as usize % b.m());
            cp.reverse();
            prop_assert_eq!(b.permute(&rp, &cp).unwrap().len(), b.len());
        }
    }
}
