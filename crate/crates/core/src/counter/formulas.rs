//! Closed forms that need no recursion.

use num_bigint::BigInt;

use super::CountError;
use crate::diagram::Board;
use crate::qpoly::LaurentPoly;
use crate::rooks::{qrook, Convention};

/// Largest side the rank-1 subset sum accepts.
pub const RANK1_MAX_ROWS: usize = 20;

/// Rank-1 count: sum over nonempty row sets `T` of
/// `(q^a(T) - 1)(q - 1)^(|T|-1)`, where `a(T)` is the number of columns with
/// no board cell in any row of `T`.
pub fn count_rank1(board: &Board) -> Result<LaurentPoly, CountError> {
    let b = if board.m() > board.n() {
        board.transpose()
    } else {
        board.clone()
    };
    let m = b.m();
    if m > RANK1_MAX_ROWS {
        return Err(CountError::TooManyRows {
            rows: m,
            max: RANK1_MAX_ROWS,
        });
    }
    // tally[size][a] = number of row sets of that size with that a(T)
    let n = b.n();
    let mut tally = vec![vec![0u64; n + 1]; m + 1];
    let masks = b.row_masks();
    let mut union = vec![0u64; 1 << m];
    for t in 1usize..(1 << m) {
        let low = t.trailing_zeros() as usize;
        union[t] = union[t & (t - 1)] | masks[low];
        let a = n - union[t].count_ones() as usize;
        tally[t.count_ones() as usize][a] += 1;
    }
    let mut total = LaurentPoly::zero();
    let qm1 = LaurentPoly::q_minus_one();
    for (size, row) in tally.iter().enumerate().skip(1) {
        let mut inner = LaurentPoly::zero();
        for (a, &cnt) in row.iter().enumerate() {
            if cnt > 0 && a > 0 {
                let term = LaurentPoly::q_pow(a as i64) - LaurentPoly::one();
                inner += &(&term * &LaurentPoly::constant(cnt));
            }
        }
        total += &(&inner * &qm1.pow(size as u32 - 1));
    }
    Ok(total)
}

/// `((2q-1)^n - 2q^n + 1) / (q-1)`: rank-1 matrices with zero diagonal.
pub fn count_diag_rank1(n: usize) -> LaurentPoly {
    let two_q_minus_one = LaurentPoly::from_coeffs(&[-1, 2]);
    let num = &(&two_q_minus_one.pow(n as u32) - &LaurentPoly::monomial(n as i64, 2)) + &LaurentPoly::one();
    num.div_q_minus_one().expect("q = 1 is a root")
}

/// `(q^n - 1)(q^n - q)...(q^n - q^(n-1))`.
pub fn count_invertible(n: usize) -> LaurentPoly {
    (0..n).fold(LaurentPoly::one(), |acc, i| {
        &acc * &(LaurentPoly::q_pow(n as i64) - LaurentPoly::q_pow(i as i64))
    })
}

/// Matrices of rank `r` supported inside an NE board `b`:
/// `(q-1)^r q^(#b-r) R_r^NE(b, 1/q)`.
pub fn count_support_in_ne(b: &Board, r: usize) -> Result<LaurentPoly, CountError> {
    if !b.is_ne() {
        return Err(CountError::NotNe);
    }
    let rook = qrook(b, r, Convention::NE)?;
    let shifted = rook.invert_variable().shift(b.len() as i64 - r as i64);
    Ok(&LaurentPoly::q_minus_one().pow(r as u32) * &shifted)
}

/// Same count for a board whose complement `b` is NE up to transposition.
pub fn ne_support_board(free: &Board) -> Option<Board> {
    if free.is_ne() {
        Some(free.clone())
    } else {
        let t = free.transpose();
        t.is_ne().then_some(t)
    }
}

pub(crate) fn q_pow_minus(a: i64, b: i64) -> LaurentPoly {
    LaurentPoly::q_pow(a) - LaurentPoly::q_pow(b)
}

pub(crate) fn scalar(c: i64) -> LaurentPoly {
    LaurentPoly::constant(BigInt::from(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::ShapeSpec;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn rank1_examples() {
        let diag = Board::diagonal(4).unwrap();
        let expected = &LaurentPoly::q_minus_one() * &p("14*q^2-4*q+2");
        assert_eq!(count_rank1(&diag).unwrap(), expected);
        assert_eq!(count_diag_rank1(4), expected);
        let one = Board::from_cells(2, 2, [(1, 1)]).unwrap();
        assert_eq!(count_rank1(&one).unwrap(), &LaurentPoly::q_minus_one() * &p("2*q+1"));
        assert!(count_rank1(&Board::full(3, 2).unwrap()).unwrap().is_zero());
        assert!(count_diag_rank1(1).is_zero());
        assert_eq!(count_diag_rank1(2), p("2*q-2"));
    }

    #[test]
    fn rank1_is_transpose_invariant() {
        let b = Board::from_cells(2, 5, [(1, 1), (1, 4), (2, 2)]).unwrap();
        assert_eq!(count_rank1(&b).unwrap(), count_rank1(&b.transpose()).unwrap());
    }

    #[test]
    fn invertible() {
        assert_eq!(count_invertible(1), p("q-1"));
        assert_eq!(count_invertible(2), p("q^4-q^3-q^2+q"));
        assert_eq!(count_invertible(3).eval_u64(2).unwrap(), BigInt::from(168));
    }

    #[test]
    fn ne_examples() {
        let ex = Board::from_cells(4, 4, [(1, 1), (3, 4), (4, 1), (4, 3), (4, 4)])
            .unwrap()
            .complement();
        assert!(ex.is_ne());
        let got = count_support_in_ne(&ex, 4).unwrap();
        assert_eq!(got, &LaurentPoly::q_minus_one().pow(4) * &p("q^7+2*q^6"));
        assert_eq!(count_support_in_ne(&ex, 0).unwrap(), LaurentPoly::one());
        let full = Board::full(3, 3).unwrap();
        assert_eq!(count_support_in_ne(&full, 3).unwrap(), count_invertible(3));
        let skew = ShapeSpec::new(vec![4, 4, 3, 2], vec![3, 1])
            .unwrap()
            .board(4, 4)
            .unwrap();
        let expected = &(&LaurentPoly::q_minus_one().pow(3) * &p("q^3+q^2")) * &p("2*q^2+6*q+1");
        assert_eq!(count_support_in_ne(&skew, 3).unwrap(), expected);
        let bad = Board::from_cells(2, 2, [(1, 1), (2, 1), (2, 2)]).unwrap();
        assert!(matches!(count_support_in_ne(&bad, 1), Err(CountError::NotNe)));
    }
}
