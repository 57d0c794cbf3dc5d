//! Counting matrices of rank `r` whose support avoids a board.
//!
//! [`Counter::count_auto`] tries, in order: trivial cases, the rank-1 sum,
//! the NE formula on the complement, the row-deletion recursions (memoized),
//! and finally sampling the exact oracle at many prime powers followed by
//! interpolation.

pub mod cache;
pub mod formulas;
pub mod oracle;
pub mod reduce;

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::{CacheRecord, LoadReport, PolyCache};
pub use formulas::{count_diag_rank1, count_invertible, count_rank1, count_support_in_ne};
pub use oracle::{count_at_q, count_naive, estimate_states, naive_counts, Subspace, DEFAULT_BUDGET};
pub use reduce::{
    apply, reduce, reduce_dense, reduce_sparse, select_target, targets, CountQuery, DerivedBoards, ReductionKind,
    ReductionTrace, Target, Term,
};

use crate::diagram::{Board, DiagramError};
use crate::fields::{prime_powers, FieldError, FieldSpec};
use crate::perms::PermError;
use crate::qpoly::{detect_quasi, interpolate, LaurentPoly, PolyError, QuasiFit, SampleTable};
use crate::rooks::{rook_count, RookError};

#[derive(Debug, Error)]
pub enum CountError {
    #[error("oracle budget exceeded at q={q}: about {estimate:.3e} states, budget {budget}")]
    BudgetExceeded { q: u64, estimate: f64, budget: u64 },
    #[error("naive enumeration needs at most {max} free entries, board has {free}")]
    TooManyFreeEntries { free: usize, max: usize },
    #[error("rank-1 sum needs at most {max} rows on the short side, got {rows}")]
    TooManyRows { rows: usize, max: usize },
    #[error("board does not have the NE property")]
    NotNe,
    #[error("polynomial {poly} disagrees with the oracle at q={q}: {poly_value} vs {oracle}")]
    ValidationMismatch {
        q: u64,
        poly: String,
        poly_value: String,
        oracle: String,
    },
    #[error("(q-1)^{r} does not divide the count {count} at q={q}")]
    NotDivisible { q: u64, r: usize, count: String },
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Rook(#[from] RookError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// How a polynomial answer was obtained. Ordered from most to least direct;
/// a combined answer reports its weakest ingredient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "formula")]
    Formula,
    #[serde(rename = "reduction")]
    Reduction,
    #[serde(rename = "oracle+interpolation")]
    OracleInterpolation,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Formula => "formula",
            Provenance::Reduction => "reduction",
            Provenance::OracleInterpolation => "oracle+interpolation",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultKind {
    Polynomial,
    Samples,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub kind: ResultKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<LaurentPoly>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quasi: Option<QuasiFit>,
    /// Top-level expansion, when a recursion was used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<ReductionTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    /// Prime power at which a polynomial answer was checked against the
    /// oracle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validated_at: Option<u64>,
}

impl CountResult {
    pub fn polynomial(&self) -> Option<&LaurentPoly> {
        self.poly.as_ref()
    }
}

#[derive(Clone, Debug)]
pub struct CounterConfig {
    /// Cap on estimated oracle states per DP layer.
    pub budget: u64,
    /// Prime powers to sample instead of the default sequence.
    pub sample_qs: Option<Vec<u64>>,
    /// Check top-level polynomials against the oracle.
    pub validate: bool,
}

impl Default for CounterConfig {
    fn default() -> Self {
        CounterConfig {
            budget: DEFAULT_BUDGET,
            sample_qs: None,
            validate: true,
        }
    }
}

type MemoKey = (Board, usize);

/// Memoizing front end. Safe to share between threads.
pub struct Counter {
    config: CounterConfig,
    memo: RwLock<HashMap<MemoKey, (LaurentPoly, Provenance)>>,
    /// Samples of queries that interpolation could not settle.
    unsolved: RwLock<HashMap<MemoKey, SampleTable>>,
    fields: RwLock<HashMap<u64, Arc<FieldSpec>>>,
    cache: Option<Mutex<PolyCache>>,
}

impl Default for Counter {
    fn default() -> Self {
        Counter::new(CounterConfig::default())
    }
}

/// Largest free-entry count for which a cached record is rechecked on load.
const CACHE_CHECK_BUDGET: u64 = 100_000;

impl Counter {
    pub fn new(config: CounterConfig) -> Self {
        Counter {
            config,
            memo: RwLock::new(HashMap::new()),
            unsolved: RwLock::new(HashMap::new()),
            fields: RwLock::new(HashMap::new()),
            cache: None,
        }
    }

    /// Counter backed by a JSON-lines file. Stored polynomials are checked
    /// at `q = 2` when that is cheap; failing records are ignored.
    pub fn with_cache(config: CounterConfig, path: impl AsRef<Path>) -> Result<(Self, LoadReport), CountError> {
        let mut counter = Counter::new(config);
        let (cache, report) = PolyCache::open(path, |rec| counter.recheck(&rec.board, rec.r, &rec.poly))?;
        {
            let mut memo = counter.memo.write().expect("memo lock");
            for rec in &report.accepted {
                memo.insert(memo_key(&rec.board, rec.r), (rec.poly.clone(), Provenance::Reduction));
            }
        }
        counter.cache = Some(Mutex::new(cache));
        Ok((counter, report))
    }

    pub fn config(&self) -> &CounterConfig {
        &self.config
    }

    fn recheck(&self, board: &Board, r: usize, poly: &LaurentPoly) -> bool {
        if estimate_states(board, r, 2) > CACHE_CHECK_BUDGET as f64 {
            return true;
        }
        match self.count_at(board, r, 2) {
            Ok(v) => poly.eval_u64(2) == Some(BigInt::from(v)),
            Err(_) => false,
        }
    }

    pub fn field(&self, q: u64) -> Result<Arc<FieldSpec>, CountError> {
        if let Some(f) = self.fields.read().expect("field lock").get(&q) {
            return Ok(f.clone());
        }
        let f = Arc::new(FieldSpec::of_order(q)?);
        self.fields.write().expect("field lock").insert(q, f.clone());
        Ok(f)
    }

    /// Oracle value at one prime power.
    pub fn count_at(&self, board: &Board, r: usize, q: u64) -> Result<BigUint, CountError> {
        count_at_q(board, r, &*self.field(q)?, self.config.budget)
    }

    /// Polynomial if one of the exact methods applies, else samples.
    pub fn count_auto(&self, query: &CountQuery) -> Result<CountResult, CountError> {
        let (board, r) = (&query.board, query.r);
        let trace = if direct(board, r)?.is_none() {
            reduce(query)
        } else {
            None
        };
        match self.solve(board, r)? {
            Some((poly, prov)) => {
                let validated_at = if self.config.validate {
                    self.validate(board, r, &poly)?
                } else {
                    None
                };
                Ok(CountResult {
                    kind: ResultKind::Polynomial,
                    poly: Some(poly),
                    samples: None,
                    quasi: None,
                    trace,
                    provenance: Some(prov),
                    validated_at,
                })
            }
            None => {
                let stored = self
                    .unsolved
                    .read()
                    .expect("memo lock")
                    .get(&memo_key(board, r))
                    .cloned();
                let samples = match stored {
                    Some(s) => s,
                    None => self.samples(board, r)?,
                };
                let quasi = detect_quasi(&samples, degree_bound(board)).ok();
                Ok(CountResult {
                    kind: ResultKind::Samples,
                    poly: None,
                    samples: Some(samples),
                    quasi,
                    trace: None,
                    provenance: None,
                    validated_at: None,
                })
            }
        }
    }

    /// Checks at `q = 3` (or 2 when 3 is over budget). Returns the `q` used.
    fn validate(&self, board: &Board, r: usize, poly: &LaurentPoly) -> Result<Option<u64>, CountError> {
        for q in [3, 2] {
            if estimate_states(board, r, q) > self.config.budget as f64 {
                continue;
            }
            let oracle = BigInt::from(self.count_at(board, r, q)?);
            let value = poly.eval_u64(q).expect("polynomial");
            if value != oracle {
                return Err(CountError::ValidationMismatch {
                    q,
                    poly: poly.to_string(),
                    poly_value: value.to_string(),
                    oracle: oracle.to_string(),
                });
            }
            return Ok(Some(q));
        }
        Ok(None)
    }

    /// Exact polynomial, or `None` when interpolation could not produce one.
    pub fn solve(&self, board: &Board, r: usize) -> Result<Option<(LaurentPoly, Provenance)>, CountError> {
        if let Some(poly) = direct(board, r)? {
            return Ok(Some((poly, Provenance::Formula)));
        }
        let key = memo_key(board, r);
        if let Some(hit) = self.memo.read().expect("memo lock").get(&key) {
            return Ok(Some(hit.clone()));
        }
        let query = CountQuery::new(board.clone(), r);
        let found = match reduce(&query) {
            Some(trace) => {
                let parts: Vec<Option<(LaurentPoly, Provenance)>> = trace
                    .terms
                    .par_iter()
                    .map(|t| self.solve(&t.query.board, t.query.r))
                    .collect::<Result<_, _>>()?;
                if parts.iter().all(Option::is_some) {
                    let parts: Vec<_> = parts.into_iter().flatten().collect();
                    let mut total = LaurentPoly::zero();
                    let mut prov = Provenance::Reduction;
                    for (t, (p, pv)) in trace.terms.iter().zip(&parts) {
                        total += &(&t.coeff * p);
                        prov = prov.max(*pv);
                    }
                    Some((total, prov))
                } else {
                    None
                }
            }
            None => {
                let samples = self.samples(board, r)?;
                let fit = interpolate(&samples, degree_bound(board)).ok();
                if fit.is_none() {
                    self.unsolved.write().expect("memo lock").insert(key.clone(), samples);
                }
                fit.map(|p| (p, Provenance::OracleInterpolation))
            }
        };
        if let Some(entry) = &found {
            let fresh = self
                .memo
                .write()
                .expect("memo lock")
                .insert(key.clone(), entry.clone())
                .is_none();
            if fresh {
                if let Some(cache) = &self.cache {
                    let rec = CacheRecord::new(key.0, key.1, entry.0.clone());
                    cache.lock().expect("cache lock").append(&rec)?;
                }
            }
        }
        Ok(found)
    }

    /// Oracle values at the default sample points (or the configured
    /// override), stopping at the first prime power over budget.
    pub fn samples(&self, board: &Board, r: usize) -> Result<SampleTable, CountError> {
        let wanted = degree_bound(board) + 2;
        let qs: Vec<u64> = match &self.config.sample_qs {
            Some(list) => list.clone(),
            None => prime_powers()
                .take_while(|&q| estimate_states(board, r, q) <= self.config.budget as f64)
                .take(wanted)
                .collect(),
        };
        let rows = qs
            .par_iter()
            .map(|&q| self.count_at(board, r, q).map(|v| (q, BigInt::from(v))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SampleTable::new(rows))
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }
}

/// Degree bound for interpolation: the count is at most `q^free`.
pub fn degree_bound(board: &Board) -> usize {
    board.m() * board.n() - board.len()
}

/// Closed-form answers that need no recursion.
fn direct(board: &Board, r: usize) -> Result<Option<LaurentPoly>, CountError> {
    let (m, n) = (board.m(), board.n());
    if r == 0 {
        return Ok(Some(LaurentPoly::one()));
    }
    if r > m.min(n) || board.len() == m * n {
        return Ok(Some(LaurentPoly::zero()));
    }
    if r == 1 && m.min(n) <= formulas::RANK1_MAX_ROWS {
        return count_rank1(board).map(Some);
    }
    if let Some(free) = formulas::ne_support_board(&board.complement()) {
        return count_support_in_ne(&free, r).map(Some);
    }
    Ok(None)
}

/// Memo key: the lesser normal form of the board and its transpose.
fn memo_key(board: &Board, r: usize) -> MemoKey {
    let a = board.normalize();
    let b = board.transpose().normalize();
    (a.min(b), r)
}

/// Checks that `count/(q-1)^r` agrees with the number of `r`-rook
/// placements on the complement, modulo `q - 1`.
pub fn congruence_check(query: &CountQuery, field: &FieldSpec, budget: u64) -> Result<bool, CountError> {
    let q = field.order() as u64;
    let count = count_at_q(&query.board, query.r, field, budget)?;
    let unit = BigUint::from(q - 1).pow(query.r as u32);
    if !(&count % &unit).is_zero() {
        return Err(CountError::NotDivisible {
            q,
            r: query.r,
            count: count.to_string(),
        });
    }
    let quotient = count / unit;
    let rooks = BigUint::from(rook_count(&query.board.complement(), query.r)?);
    let modulus = BigUint::from(q - 1);
    if modulus.is_one() {
        return Ok(true);
    }
    Ok(quotient % &modulus == rooks % &modulus)
}

/// Complement of the point-line incidence matrix of the Fano plane.
pub fn fano_board() -> Board {
    const ZEROS: [[usize; 4]; 7] = [
        [3, 4, 5, 6],
        [2, 4, 5, 7],
        [2, 3, 6, 7],
        [1, 4, 6, 7],
        [1, 3, 5, 7],
        [1, 2, 5, 6],
        [1, 2, 3, 4],
    ];
    let cells = ZEROS
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().map(move |&j| (i + 1, j)));
    Board::from_cells(7, 7, cells).expect("fits")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perms::Permutation;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    fn rothe(w: &str) -> Board {
        w.parse::<Permutation>().unwrap().rothe()
    }

    fn poly_of(b: &Board, r: usize) -> LaurentPoly {
        let res = Counter::default().count_auto(&CountQuery::new(b.clone(), r)).unwrap();
        assert_eq!(res.kind, ResultKind::Polynomial);
        assert!(res.validated_at.is_some());
        res.poly.unwrap()
    }

    #[test]
    fn zero_diagonal() {
        let got = poly_of(&Board::diagonal(3).unwrap(), 3);
        assert_eq!(got, &LaurentPoly::q_minus_one().pow(3) * &p("q^3+2*q^2-q"));
    }

    #[test]
    fn rothe_examples() {
        let qm1 = LaurentPoly::q_minus_one().pow(5);
        let a = poly_of(&rothe("21534"), 5);
        assert_eq!(a, &qm1 * &p("q^17+4*q^16+9*q^15+14*q^14+15*q^13+11*q^12+5*q^11+q^10"));
        let b = poly_of(&rothe("31524"), 5);
        assert_eq!(b, &qm1 * &p("q^16+4*q^15+9*q^14+12*q^13+10*q^12+5*q^11+q^10"));
    }

    #[test]
    fn trivial_dispatch() {
        let c = Counter::default();
        let empty = Board::new(3, 3).unwrap();
        let res = c.count_auto(&CountQuery::new(empty.clone(), 3)).unwrap();
        assert_eq!(res.poly.unwrap(), count_invertible(3));
        assert_eq!(res.provenance, Some(Provenance::Formula));
        assert_eq!(poly_of(&empty, 0), LaurentPoly::one());
        assert!(poly_of(&empty, 4).is_zero());
        assert!(poly_of(&Board::full(2, 3).unwrap(), 1).is_zero());
    }

    #[test]
    fn reduction_provenance_and_trace() {
        let c = Counter::default();
        let res = c.count_auto(&CountQuery::new(Board::diagonal(4).unwrap(), 3)).unwrap();
        assert_eq!(res.provenance, Some(Provenance::Reduction));
        assert!(res.trace.is_some());
        assert!(c.memo_len() > 0);
    }

    #[test]
    fn fallback_interpolates() {
        // no recursion available: every line needs the oracle
        let config = CounterConfig {
            budget: DEFAULT_BUDGET,
            sample_qs: None,
            validate: true,
        };
        let c = Counter::new(config);
        let b = Board::from_cells(2, 2, [(1, 1)]).unwrap();
        let samples = c.samples(&b, 2).unwrap();
        assert_eq!(samples.len(), 5);
        let poly = interpolate(&samples, degree_bound(&b)).unwrap();
        assert_eq!(poly, poly_of(&b, 2));
    }

    #[test]
    fn fano_has_only_samples() {
        let c = Counter::new(CounterConfig {
            budget: 2_000_000,
            ..Default::default()
        });
        let fano = fano_board();
        let res = c.count_auto(&CountQuery::new(fano, 7)).unwrap();
        assert_eq!(res.kind, ResultKind::Samples);
        let s = res.samples.unwrap();
        assert_eq!(s.rows.iter().map(|r| r.0).collect::<Vec<_>>(), vec![2, 3, 4]);
        assert!(res.quasi.is_none());
    }

    #[test]
    fn congruence_examples() {
        let f3 = FieldSpec::of_order(3).unwrap();
        let q = CountQuery::new(Board::diagonal(3).unwrap(), 3);
        assert!(congruence_check(&q, &f3, DEFAULT_BUDGET).unwrap());
        let empty = CountQuery::new(Board::new(3, 3).unwrap(), 3);
        let f4 = FieldSpec::of_order(4).unwrap();
        assert!(congruence_check(&empty, &f4, DEFAULT_BUDGET).unwrap());
        assert!(congruence_check(&CountQuery::new(Board::diagonal(3).unwrap(), 0), &f3, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("qmatrank-cache-{}", std::process::id()));
        let _ = std::fs::remove_file(&dir);
        let q = CountQuery::new(Board::diagonal(4).unwrap(), 3);
        let (c, report) = Counter::with_cache(CounterConfig::default(), &dir).unwrap();
        assert!(report.accepted.is_empty());
        let first = c.count_auto(&q).unwrap().poly.unwrap();
        drop(c);
        // a corrupted line is rejected, the rest reloads
        let mut text = std::fs::read_to_string(&dir).unwrap();
        text.push_str("{\"hash\":\"00\"}\n");
        std::fs::write(&dir, text).unwrap();
        let (c, report) = Counter::with_cache(CounterConfig::default(), &dir).unwrap();
        assert!(!report.accepted.is_empty());
        assert_eq!(report.rejected, 1);
        assert_eq!(c.count_auto(&q).unwrap().poly.unwrap(), first);
        std::fs::remove_file(&dir).unwrap();
    }
}
