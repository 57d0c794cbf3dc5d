//! Non-attacking rook placements and the SE / NE q-rook numbers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Board, ShapeSpec};
use crate::qpoly::LaurentPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RookError {
    #[error("cannot place {r} rooks on a {m}x{n} board")]
    TooManyRooks { r: usize, m: usize, n: usize },
    #[error("rooks at {0:?} attack each other or leave the board")]
    InvalidPlacement(Vec<(usize, usize)>),
    #[error("unknown convention {0:?} (expected SE or NE)")]
    UnknownConvention(String),
    #[error("shape {shape:?} needs at most {n} parts, each at most {n}")]
    ShapeTooLarge { shape: Vec<usize>, n: usize },
}

/// Which rooks shadow a cell when counting inversions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    /// A rook cancels the cells below it in its column and right of it in its row.
    SE,
    /// A rook cancels the cells above it in its column and right of it in its row.
    NE,
}

impl FromStr for Convention {
    type Err = RookError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SE" => Ok(Convention::SE),
            "NE" => Ok(Convention::NE),
            _ => Err(RookError::UnknownConvention(s.to_string())),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::SE => "SE",
            Convention::NE => "NE",
        })
    }
}

/// Rook cells sorted by row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RookPlacement {
    pub cells: Vec<(usize, usize)>,
}

impl RookPlacement {
    pub fn new(mut cells: Vec<(usize, usize)>) -> Self {
        cells.sort_unstable();
        RookPlacement { cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_valid_on(&self, b: &Board) -> bool {
        let mut rows = 0u64;
        let mut cols = 0u64;
        for &(i, j) in &self.cells {
            if !b.contains(i, j) || rows & (1 << (i - 1)) != 0 || cols & (1 << (j - 1)) != 0 {
                return false;
            }
            rows |= 1 << (i - 1);
            cols |= 1 << (j - 1);
        }
        true
    }
}

/// Streaming enumeration of `r`-rook placements, rows top to bottom, each
/// row trying its columns in increasing order before leaving it empty.
pub struct Placements<'a> {
    board: &'a Board,
    r: usize,
    /// One entry per decided row: 0 = empty, otherwise the column.
    choices: Vec<usize>,
    used_cols: u64,
    placed: usize,
    started: bool,
    done: bool,
}

impl<'a> Placements<'a> {
    fn option_after(&self, row: usize, after: Option<usize>) -> Option<usize> {
        let start = match after {
            None => 1,
            Some(0) => return None,
            Some(c) => c + 1,
        };
        let avail = self.board.row_mask(row + 1) & !self.used_cols;
        for j in start..=self.board.n() {
            if avail & (1 << (j - 1)) != 0 {
                return Some(j);
            }
        }
        let rows_left = self.board.m() - row - 1;
        (self.placed + rows_left >= self.r).then_some(0)
    }

    fn apply(&mut self, choice: usize) {
        if choice != 0 {
            self.used_cols |= 1 << (choice - 1);
            self.placed += 1;
        }
        self.choices.push(choice);
    }

    fn advance(&mut self, mut backtrack: bool) -> bool {
        loop {
            if backtrack {
                let Some(c) = self.choices.pop() else {
                    return false;
                };
                if c != 0 {
                    self.used_cols &= !(1 << (c - 1));
                    self.placed -= 1;
                }
                let row = self.choices.len();
                if let Some(o) = self.option_after(row, Some(c)) {
                    self.apply(o);
                    backtrack = false;
                }
            } else {
                if self.placed == self.r {
                    return true;
                }
                let row = self.choices.len();
                if row == self.board.m() {
                    backtrack = true;
                    continue;
                }
                match self.option_after(row, None) {
                    Some(o) => self.apply(o),
                    None => backtrack = true,
                }
            }
        }
    }
}

impl Iterator for Placements<'_> {
    type Item = RookPlacement;

    fn next(&mut self) -> Option<RookPlacement> {
        if self.done {
            return None;
        }
        let found = self.advance(self.started);
        self.started = true;
        if !found {
            self.done = true;
            return None;
        }
        let cells = self
            .choices
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i + 1, c))
            .collect();
        Some(RookPlacement { cells })
    }
}

pub fn placements(b: &Board, r: usize) -> Result<Placements<'_>, RookError> {
    if r > b.m().min(b.n()) {
        return Err(RookError::TooManyRooks { r, m: b.m(), n: b.n() });
    }
    Ok(Placements {
        board: b,
        r,
        choices: Vec::with_capacity(b.m()),
        used_cols: 0,
        placed: 0,
        started: false,
        done: false,
    })
}

/// Number of `r`-rook placements (`R_r(B, 1)`).
pub fn rook_count(b: &Board, r: usize) -> Result<u64, RookError> {
    Ok(placements(b, r)?.count() as u64)
}

fn inversions_unchecked(c: &RookPlacement, b: &Board, conv: Convention) -> usize {
    let m = b.m();
    let mut rook_col = vec![0usize; m + 1];
    for &(i, j) in &c.cells {
        rook_col[i] = j;
    }
    // columns holding a rook strictly above (SE) or strictly below (NE)
    let mut shadow_cols = 0u64;
    let rows: Vec<usize> = match conv {
        Convention::SE => (1..=m).collect(),
        Convention::NE => (1..=m).rev().collect(),
    };
    let mut total = 0;
    for i in rows {
        let mut live = b.row_mask(i) & !shadow_cols;
        if rook_col[i] != 0 {
            let j = rook_col[i];
            // the rook's cell and everything east of it
            live &= (1u64 << (j - 1)) - 1;
            shadow_cols |= 1 << (j - 1);
        }
        total += live.count_ones() as usize;
    }
    total
}

/// Board cells that hold no rook and are not shadowed by one: SE shadows
/// cells south of a rook in its column, NE shadows cells north of it; both
/// shadow cells east of a rook in its row.
pub fn inversions(c: &RookPlacement, b: &Board, conv: Convention) -> Result<usize, RookError> {
    if !c.is_valid_on(b) {
        return Err(RookError::InvalidPlacement(c.cells.clone()));
    }
    Ok(inversions_unchecked(c, b, conv))
}

/// `R_r(B, q) = sum over r-rook placements of q^inv`.
pub fn qrook(b: &Board, r: usize, conv: Convention) -> Result<LaurentPoly, RookError> {
    let mut hist: Vec<u64> = vec![0; b.len() + 1];
    for c in placements(b, r)? {
        hist[inversions_unchecked(&c, b, conv)] += 1;
    }
    let mut poly = LaurentPoly::zero();
    for (e, &count) in hist.iter().enumerate() {
        if count != 0 {
            poly += &LaurentPoly::monomial(e as i64, count);
        }
    }
    Ok(poly)
}

/// The product `prod_{i=1}^{n} [lambda_{n-i+1} - i + 1]_q`, with
/// `[m]_q = 0` for `m <= 0`.
pub fn garsia_remmel(lambda: &ShapeSpec, n: usize) -> Result<LaurentPoly, RookError> {
    let parts = lambda.lambda();
    if parts.len() > n || parts.first().is_some_and(|&l| l > n) {
        return Err(RookError::ShapeTooLarge {
            shape: parts.to_vec(),
            n,
        });
    }
    let mut acc = LaurentPoly::one();
    for i in 1..=n {
        let m = lambda.lambda_at(n - i + 1) as i64 - i as i64 + 1;
        acc = &acc * &LaurentPoly::q_int(m);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    fn ex_ne_board() -> Board {
        let mut b = Board::full(4, 4).unwrap();
        for (i, j) in [(1, 1), (3, 4), (4, 1), (4, 3), (4, 4)] {
            b.remove(i, j).unwrap();
        }
        b
    }

    #[test]
    fn ex_ne_placements() {
        let b = ex_ne_board();
        let all: Vec<_> = placements(&b, 4).unwrap().collect();
        assert_eq!(all.len(), 3);
        let mut invs: Vec<usize> = all.iter().map(|c| inversions(c, &b, Convention::NE).unwrap()).collect();
        invs.sort_unstable();
        assert_eq!(invs, vec![0, 1, 1]);
    }

    #[test]
    fn basic_counts() {
        let full = Board::full(4, 4).unwrap();
        assert_eq!(rook_count(&full, 4).unwrap(), 24);
        assert_eq!(rook_count(&full, 2).unwrap(), 72);
        assert_eq!(rook_count(&full, 0).unwrap(), 1);
        assert!(placements(&full, 5).is_err());
        let wide = Board::full(2, 5).unwrap();
        assert_eq!(rook_count(&wide, 2).unwrap(), 20);
        let empty = Board::new(3, 3).unwrap();
        assert_eq!(rook_count(&empty, 1).unwrap(), 0);
        assert_eq!(rook_count(&empty, 0).unwrap(), 1);
    }

    #[test]
    fn placements_are_distinct_and_valid() {
        let b = ShapeSpec::new(vec![4, 4, 3, 2], vec![3, 1])
            .unwrap()
            .board(4, 4)
            .unwrap();
        for r in 0..=4 {
            let all: Vec<_> = placements(&b, r).unwrap().collect();
            let mut dedup = all.clone();
            dedup.sort_by(|a, b| a.cells.cmp(&b.cells));
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
            assert!(all.iter().all(|c| c.len() == r && c.is_valid_on(&b)));
        }
    }

    #[test]
    fn empty_placement_counts_every_cell() {
        let b = ex_ne_board();
        let none = RookPlacement::new(vec![]);
        assert_eq!(inversions(&none, &b, Convention::SE).unwrap(), 11);
        assert_eq!(qrook(&b, 0, Convention::NE).unwrap(), LaurentPoly::q_pow(11));
        let bad = RookPlacement::new(vec![(1, 1)]);
        assert!(inversions(&bad, &b, Convention::SE).is_err());
    }

    #[test]
    fn skew_4432_31() {
        let b = ShapeSpec::new(vec![4, 4, 3, 2], vec![3, 1])
            .unwrap()
            .board(4, 4)
            .unwrap();
        assert_eq!(
            qrook(&b, 3, Convention::SE).unwrap(),
            p("1+6*q^2+5*q^3+3*q^4+2*q^5+q^6")
        );
        assert_eq!(qrook(&b, 3, Convention::NE).unwrap(), p("2*q+8*q^2+7*q^3+q^4"));
    }

    #[test]
    fn garsia_remmel_examples() {
        let square = ShapeSpec::straight(vec![4; 4]).unwrap();
        assert_eq!(garsia_remmel(&square, 4).unwrap(), LaurentPoly::q_factorial(4));
        let one = ShapeSpec::straight(vec![1]).unwrap();
        assert!(garsia_remmel(&one, 2).unwrap().is_zero());
        let hook = ShapeSpec::straight(vec![2, 1]).unwrap();
        assert_eq!(garsia_remmel(&hook, 2).unwrap(), LaurentPoly::one());
    }

    #[test]
    fn straight_shape_orientation() {
        // The product matches NE on the English diagram and SE on its
        // 180-degree rotation; SE on the English diagram differs.
        let hook = ShapeSpec::straight(vec![2, 1]).unwrap();
        let english = hook.board(2, 2).unwrap();
        assert_eq!(rook_count(&english, 2).unwrap(), 1);
        assert_eq!(qrook(&english, 2, Convention::NE).unwrap(), LaurentPoly::one());
        assert_eq!(qrook(&english, 2, Convention::SE).unwrap(), LaurentPoly::q());
        let rotated = english.rot180();
        assert_eq!(qrook(&rotated, 2, Convention::SE).unwrap(), LaurentPoly::one());
        assert_eq!(qrook(&rotated, 2, Convention::NE).unwrap(), LaurentPoly::one());
    }

    #[test]
    fn convention_parsing() {
        assert_eq!("se".parse::<Convention>().unwrap(), Convention::SE);
        assert_eq!("NE".parse::<Convention>().unwrap(), Convention::NE);
        assert!("SW".parse::<Convention>().is_err());
    }
}
