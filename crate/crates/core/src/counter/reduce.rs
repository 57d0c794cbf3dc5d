//! Row-deletion recursions.
//!
//! A row (or, after transposing, a column) with at most two board cells is a
//! *sparse* target; one with at most two free cells is a *dense* target.
//! Either way the target is moved to the bottom, its special cells to the
//! right, and the count is written as a combination of counts on boards with
//! one row fewer.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::formulas::{q_pow_minus, scalar};
use crate::diagram::Board;
use crate::qpoly::LaurentPoly;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CountQuery {
    pub board: Board,
    pub r: usize,
}

impl CountQuery {
    pub fn new(board: Board, r: usize) -> Self {
        CountQuery { board, r }
    }

    pub fn size(&self) -> usize {
        self.board.m() * self.board.n()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionKind {
    /// Target has at most two free cells.
    Dense,
    /// Target has at most two board cells.
    Sparse,
}

/// A row of the board or of its transpose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub kind: ReductionKind,
    pub transposed: bool,
    /// 1-based row index in the (possibly transposed) board.
    pub index: usize,
    /// Number of special cells in the target.
    pub cells: usize,
}

/// Intermediate boards and counts named in the recursions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedBoards {
    /// Sparse case with two cells: the next-to-last column removed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s1: Option<Board>,
    /// Sparse case with two cells: last two columns merged (union).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s2: Option<Board>,
    /// Dense cases: the board without its last row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_prime: Option<Board>,
    /// Dense case with two cells: last two columns merged (intersection).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_double_prime: Option<Board>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: LaurentPoly,
    pub query: CountQuery,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub parent: CountQuery,
    pub target: Target,
    /// The parent board after moving the target row last and its special
    /// cells to the last columns.
    pub arranged: Board,
    pub terms: Vec<Term>,
    pub derived: DerivedBoards,
}

impl ReductionTrace {
    /// `sum coeff * value(subquery)` for any valuation of the subqueries.
    pub fn combine<E>(&self, mut value: impl FnMut(&CountQuery) -> Result<LaurentPoly, E>) -> Result<LaurentPoly, E> {
        let mut total = LaurentPoly::zero();
        for t in &self.terms {
            total += &(&t.coeff * &value(&t.query)?);
        }
        Ok(total)
    }

    /// The combination evaluated at an integer `q`.
    pub fn eval_at<E>(&self, q: u64, mut value: impl FnMut(&CountQuery) -> Result<BigInt, E>) -> Result<BigInt, E> {
        let mut total = BigInt::from(0);
        for t in &self.terms {
            let c = t.coeff.eval_u64(q).expect("coefficients are polynomials");
            total += c * value(&t.query)?;
        }
        Ok(total)
    }
}

/// Every row or column that qualifies as a target, in selection order.
pub fn targets(board: &Board) -> Vec<Target> {
    let mut out = Vec::new();
    if board.m() == 0 || board.n() == 0 {
        return out;
    }
    for transposed in [false, true] {
        let b = if transposed { board.transpose() } else { board.clone() };
        for i in 1..=b.m() {
            let cells = b.row_mask(i).count_ones() as usize;
            let free = b.n() - cells;
            if free <= 2 {
                out.push(Target {
                    kind: ReductionKind::Dense,
                    transposed,
                    index: i,
                    cells: free,
                });
            }
            if cells <= 2 {
                out.push(Target {
                    kind: ReductionKind::Sparse,
                    transposed,
                    index: i,
                    cells,
                });
            }
        }
    }
    out.sort_by_key(|t| (t.cells, t.kind, t.transposed, t.index));
    out
}

/// Preferred target: fewest special cells, then dense before sparse, rows
/// before columns, lowest index.
pub fn select_target(board: &Board) -> Option<Target> {
    targets(board).into_iter().next()
}

pub fn reduce_sparse(query: &CountQuery) -> Option<ReductionTrace> {
    targets(&query.board)
        .into_iter()
        .find(|t| t.kind == ReductionKind::Sparse)
        .map(|t| apply(query, t))
}

pub fn reduce_dense(query: &CountQuery) -> Option<ReductionTrace> {
    targets(&query.board)
        .into_iter()
        .find(|t| t.kind == ReductionKind::Dense)
        .map(|t| apply(query, t))
}

/// Reduction at the preferred target of either kind.
pub fn reduce(query: &CountQuery) -> Option<ReductionTrace> {
    select_target(&query.board).map(|t| apply(query, t))
}

/// Expands the query at a given target.
pub fn apply(query: &CountQuery, target: Target) -> ReductionTrace {
    let b = if target.transposed {
        query.board.transpose()
    } else {
        query.board.clone()
    };
    let arranged = arrange(&b, target);
    let (terms, derived) = match target.kind {
        ReductionKind::Sparse => sparse_terms(&arranged, query.r, target.cells),
        ReductionKind::Dense => dense_terms(&arranged, query.r, target.cells),
    };
    ReductionTrace {
        parent: query.clone(),
        target,
        arranged,
        terms: merge_terms(terms),
        derived,
    }
}

fn arrange(b: &Board, target: Target) -> Board {
    let (m, n) = (b.m(), b.n());
    let mut rows: Vec<usize> = (1..=m).filter(|&i| i != target.index).collect();
    rows.push(target.index);
    let special = |j: usize| match target.kind {
        ReductionKind::Sparse => b.contains(target.index, j),
        ReductionKind::Dense => !b.contains(target.index, j),
    };
    let mut cols: Vec<usize> = (1..=n).filter(|&j| !special(j)).collect();
    cols.extend((1..=n).filter(|&j| special(j)));
    b.reorder_rows(&rows)
        .and_then(|x| x.reorder_cols(&cols))
        .expect("valid permutations")
}

/// Replaces the last two columns by one; its cells are the union or the
/// intersection of theirs.
fn merge_last_two(b: &Board, union: bool) -> Board {
    let n = b.n();
    let rows = b
        .row_masks()
        .iter()
        .map(|&r| {
            let x = r >> (n - 2) & 1;
            let y = r >> (n - 1) & 1;
            let merged = if union { x | y } else { x & y };
            (r & ((1u64 << (n - 2)) - 1)) | (merged << (n - 2))
        })
        .collect();
    Board::from_row_masks(n - 1, rows).expect("narrower board")
}

fn free_in_col(b: &Board, rows: usize, j: usize) -> usize {
    (1..=rows).filter(|&i| !b.contains(i, j)).count()
}

fn fits(board: &Board, r: usize) -> bool {
    r <= board.m().min(board.n())
}

fn push(terms: &mut Vec<Term>, coeff: LaurentPoly, board: &Board, r: usize) {
    if fits(board, r) && !coeff.is_zero() {
        terms.push(Term {
            coeff,
            query: CountQuery::new(board.clone(), r),
        });
    }
}

fn sparse_terms(arr: &Board, r: usize, k: usize) -> (Vec<Term>, DerivedBoards) {
    let (m, n) = (arr.m(), arr.n());
    let top = arr.delete_row(m).expect("m >= 1");
    let mut derived = DerivedBoards::default();
    // classes[rho]: signed combination counting matrices whose last k
    // columns have rank rho
    let one = LaurentPoly::one;
    let classes: Vec<Vec<(LaurentPoly, Board)>> = match k {
        0 => vec![vec![(one(), top.clone())]],
        1 => {
            let a = top.restrict(m - 1, n - 1);
            vec![vec![(one(), a.clone())], vec![(one(), top.clone()), (scalar(-1), a)]]
        }
        _ => {
            let z = top.restrict(m - 1, n - 2);
            let mx = top.restrict(m - 1, n - 1);
            let my = top.delete_col(n - 1).expect("n >= 2");
            let mp = merge_last_two(&top, true);
            let qm1 = LaurentPoly::q_minus_one();
            let qp1 = LaurentPoly::from_coeffs(&[1, 1]);
            derived.s1 = Some(my.clone());
            derived.s2 = Some(mp.clone());
            vec![
                vec![(one(), z.clone())],
                vec![
                    (one(), mx.clone()),
                    (one(), my.clone()),
                    (qm1.clone(), mp.clone()),
                    (-qp1, z.clone()),
                ],
                vec![
                    (one(), top.clone()),
                    (scalar(-1), mx),
                    (scalar(-1), my),
                    (-qm1, mp),
                    (LaurentPoly::q(), z),
                ],
            ]
        }
    };
    let mut terms = Vec::new();
    let ri = r as i64;
    for s in [Some(r), r.checked_sub(1)].into_iter().flatten() {
        for (rho, class) in classes.iter().enumerate().take(k.min(s) + 1) {
            let rho = rho as i64;
            let w = if s == r {
                LaurentPoly::q_pow(ri - rho)
            } else {
                q_pow_minus((n - k) as i64, ri - 1 - rho)
            };
            for (c, board) in class {
                push(&mut terms, &w * c, board, s);
            }
        }
    }
    (terms, derived)
}

fn dense_terms(arr: &Board, r: usize, f: usize) -> (Vec<Term>, DerivedBoards) {
    let (m, n) = (arr.m(), arr.n());
    let sp = arr.delete_row(m).expect("m >= 1");
    let mut derived = DerivedBoards {
        s_prime: Some(sp.clone()),
        ..Default::default()
    };
    let mut terms = Vec::new();
    push(&mut terms, LaurentPoly::one(), &sp, r);
    let Some(r1) = r.checked_sub(1) else {
        return (terms, derived);
    };
    let qm1 = LaurentPoly::q_minus_one();
    match f {
        0 => {}
        1 => {
            let a = free_in_col(arr, m - 1, n);
            derived.a = Some(a);
            let w = &qm1 * &LaurentPoly::q_pow(a as i64);
            push(&mut terms, w, &sp.delete_col(n).expect("n >= 1"), r1);
        }
        _ => {
            let b = free_in_col(arr, m - 1, n);
            let c = free_in_col(arr, m - 1, n - 1);
            let d = (1..m)
                .filter(|&i| !arr.contains(i, n - 1) && !arr.contains(i, n))
                .count();
            let spp = merge_last_two(&sp, false);
            derived.b = Some(b);
            derived.c = Some(c);
            derived.d = Some(d);
            derived.s_double_prime = Some(spp.clone());
            push(
                &mut terms,
                &qm1 * &LaurentPoly::q_pow(b as i64),
                &sp.delete_col(n).expect("n >= 2"),
                r1,
            );
            push(
                &mut terms,
                &qm1 * &LaurentPoly::q_pow(c as i64),
                &sp.delete_col(n - 1).expect("n >= 2"),
                r1,
            );
            push(&mut terms, &qm1.pow(2) * &LaurentPoly::q_pow(d as i64), &spp, r1);
        }
    }
    (terms, derived)
}

/// Sums coefficients of repeated subqueries and drops zero terms, keeping
/// first-appearance order.
fn merge_terms(terms: Vec<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for t in terms {
        match out.iter_mut().find(|o| o.query == t.query) {
            Some(o) => o.coeff += &t.coeff,
            None => out.push(t),
        }
    }
    out.retain(|t| !t.coeff.is_zero());
    out
}
