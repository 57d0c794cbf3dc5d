//! Sweeps that test conjectured and proven statements over all
//! permutations (or boards) of small size and collect counterexamples.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counter::{CountError, CountQuery, Counter, ReductionTrace};
use crate::diagram::Board;
use crate::perms::{all, Permutation, HULL_PATTERNS};
use crate::qpoly::LaurentPoly;
use crate::rooks::rook_count;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub witness: String,
    pub expected: String,
    pub actual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<ReductionTrace>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub n_min: usize,
    pub n_max: usize,
    pub instances: u64,
    /// Permutations not checked directly because an equivalent one under
    /// inverse / reverse-complement was.
    pub orbit_skipped: u64,
    pub failures: Vec<Failure>,
    /// Not serialized, so reports stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn new(claim: &str, n_min: usize, n_max: usize) -> Self {
        VerificationReport {
            claim: claim.to_string(),
            n_min,
            n_max,
            instances: 0,
            orbit_skipped: 0,
            failures: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Adds the counts and failures of `other`, in order.
    pub fn merge(mut self, other: VerificationReport) -> Self {
        self.instances += other.instances;
        self.orbit_skipped += other.orbit_skipped;
        self.failures.extend(other.failures);
        self.elapsed += other.elapsed;
        self
    }

    fn fail(&mut self, witness: String, expected: impl ToString, actual: impl ToString, trace: Option<ReductionTrace>) {
        self.failures.push(Failure {
            witness,
            expected: expected.to_string(),
            actual: actual.to_string(),
            trace,
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

pub const CLAIMS: [&str; 6] = [
    "rothe",
    "poinrothe",
    "rookrothe",
    "rook-equinumerosity",
    "rank1-t",
    "numzeroes",
];

/// The orbit of `w` under inverse and reverse-complement.
pub fn orbit(w: &Permutation) -> Vec<Permutation> {
    let rc = w.reverse_complement();
    let mut out = vec![w.clone(), w.inverse(), rc.inverse(), rc];
    out.sort_by(|a, b| a.word().cmp(b.word()));
    out.dedup();
    out
}

/// Lexicographically least member of the orbit.
pub fn orbit_rep(w: &Permutation) -> Permutation {
    orbit(w).swap_remove(0)
}

/// Runs `check` on each orbit representative of `S_n` for `n` in range and
/// asserts, at `q = 2` and every rank, that the skipped members agree with
/// their representative.
fn sweep_orbits(
    claim: &str,
    n_min: usize,
    n_max: usize,
    counter: &Counter,
    check: impl Fn(&Permutation, &mut VerificationReport) -> Result<(), CountError> + Sync,
) -> Result<VerificationReport, CountError> {
    let start = Instant::now();
    let mut report = VerificationReport::new(claim, n_min, n_max);
    for n in n_min..=n_max {
        let perms: Vec<Permutation> = all(n).collect();
        let parts = perms
            .par_iter()
            .map(|w| {
                let mut part = VerificationReport::new(claim, n, n);
                let rep = orbit_rep(w);
                if &rep == w {
                    check(w, &mut part)?;
                } else {
                    part.orbit_skipped += 1;
                    for r in 0..=n {
                        let a = counter.count_at(&w.rothe(), r, 2)?;
                        let b = counter.count_at(&rep.rothe(), r, 2)?;
                        if a != b {
                            part.fail(format!("symmetry {w} ~ {rep}, r={r}, q=2"), b, a, None);
                        }
                    }
                }
                Ok(part)
            })
            .collect::<Result<Vec<_>, CountError>>()?;
        report = parts.into_iter().fold(report, VerificationReport::merge);
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Divides by `(q-1)^r`, or `None` when that leaves a remainder.
fn div_q_minus_one_pow(p: &LaurentPoly, r: usize) -> Option<LaurentPoly> {
    (0..r).try_fold(p.clone(), |acc, _| acc.div_q_minus_one())
}

/// `count(board, n) / (q-1)^n`, with the top-level trace for failure dumps.
fn full_rank_quotient(
    counter: &Counter,
    board: &Board,
    n: usize,
) -> Result<(Option<LaurentPoly>, Option<ReductionTrace>), CountError> {
    let res = counter.count_auto(&CountQuery::new(board.clone(), n))?;
    let quotient = res.poly.as_ref().and_then(|p| div_q_minus_one_pow(p, n));
    Ok((quotient, res.trace))
}

/// Every `count(R_w, r)` is a polynomial divisible by `(q-1)^r` with a
/// nonnegative quotient.
pub fn verify_conj_rothe(counter: &Counter, n_max: usize) -> Result<VerificationReport, CountError> {
    sweep_orbits("rothe", 1, n_max, counter, |w, rep| {
        let board = w.rothe();
        for r in 0..=w.len() {
            rep.instances += 1;
            let res = counter.count_auto(&CountQuery::new(board.clone(), r))?;
            let witness = format!("w={w} r={r}");
            match &res.poly {
                None => rep.fail(witness, "polynomial", "samples only", res.trace),
                Some(p) => match div_q_minus_one_pow(p, r) {
                    None => rep.fail(witness, format!("divisible by (q-1)^{r}"), p, res.trace),
                    Some(quot) if !quot.has_nonnegative_coeffs() => {
                        rep.fail(witness, "nonnegative quotient", quot, res.trace)
                    }
                    Some(_) => {}
                },
            }
        }
        Ok(())
    })
}

fn binom2(n: usize) -> i64 {
    (n * n.saturating_sub(1) / 2) as i64
}

/// `count(R_w, n)/(q-1)^n <= q^(C(n,2) - inv w) P_w(q)` coefficientwise, with
/// equality exactly for the four-pattern avoiders.
pub fn verify_conj_poinrothe(counter: &Counter, n_max: usize) -> Result<VerificationReport, CountError> {
    sweep_orbits("poinrothe", 1, n_max, counter, |w, rep| {
        rep.instances += 1;
        let n = w.len();
        let (lhs, trace) = full_rank_quotient(counter, &w.rothe(), n)?;
        let rhs = w.poincare()?.shift(binom2(n) - w.inversions() as i64);
        compare(rep, format!("w={w}"), lhs, &rhs, w.avoids_all(&HULL_PATTERNS), trace);
        Ok(())
    })
}

fn compare(
    rep: &mut VerificationReport,
    witness: String,
    lhs: Option<LaurentPoly>,
    rhs: &LaurentPoly,
    avoids: bool,
    trace: Option<ReductionTrace>,
) {
    let Some(lhs) = lhs else {
        rep.fail(witness, rhs, "no polynomial quotient", trace);
        return;
    };
    if !lhs.coeffwise_le(rhs) {
        rep.fail(witness, format!("<= {rhs}"), lhs, trace);
    } else if (lhs == *rhs) != avoids {
        let expected = if avoids {
            "equality (avoids the four patterns)"
        } else {
            "strict (contains a pattern)"
        };
        rep.fail(witness, expected, lhs, trace);
    }
}

/// Left-hull comparison at full rank, plus the rank-1 counterexample.
pub fn verify_conj_rookrothe(counter: &Counter, n_max: usize) -> Result<VerificationReport, CountError> {
    let mut report = sweep_orbits("rookrothe", 1, n_max, counter, |w, rep| {
        rep.instances += 1;
        let n = w.len();
        let hull = w.left_hull();
        let (lhs, trace) = full_rank_quotient(counter, &w.rothe(), n)?;
        let (rhs, _) = full_rank_quotient(counter, &hull.complement(), n)?;
        let a_w = (n * n) as i64 - hull.len() as i64 - w.inversions() as i64;
        match rhs {
            Some(rhs) => compare(
                rep,
                format!("w={w}"),
                lhs,
                &rhs.shift(a_w),
                w.avoids_all(&HULL_PATTERNS),
                trace,
            ),
            None => rep.fail(format!("w={w} hull side"), "polynomial quotient", "none", None),
        }
        Ok(())
    })?;
    if n_max >= 2 {
        report.instances += 1;
        let w: Permutation = "21".parse().expect("valid");
        let rank1 = |b: Board| -> Result<Option<LaurentPoly>, CountError> {
            let res = counter.count_auto(&CountQuery::new(b, 1))?;
            Ok(res.poly.and_then(|p| p.div_q_minus_one()))
        };
        let rothe = rank1(w.rothe())?;
        let hull = rank1(w.left_hull().complement())?;
        let want_rothe: LaurentPoly = "2*q+1".parse().expect("valid");
        let want_hull = LaurentPoly::constant(2);
        if rothe.as_ref() != Some(&want_rothe) || hull.as_ref() != Some(&want_hull) {
            report.fail(
                "w=21 r=1 counterexample".into(),
                format!("{want_rothe} vs {want_hull}"),
                format!("{rothe:?} vs {hull:?}"),
                None,
            );
        }
    }
    Ok(report)
}

/// `n`-rook counts of the complement of `R_w` and of `H_L(w)` agree exactly
/// when `w` avoids the four patterns.
pub fn verify_rook_equinumerosity(n_max: usize) -> Result<VerificationReport, CountError> {
    let start = Instant::now();
    let mut report = VerificationReport::new("rook-equinumerosity", 1, n_max);
    for n in 1..=n_max {
        let perms: Vec<Permutation> = all(n).collect();
        let parts = perms
            .par_iter()
            .map(|w| {
                let mut part = VerificationReport::new("rook-equinumerosity", n, n);
                part.instances += 1;
                let a = rook_count(&w.rothe().complement(), n)?;
                let b = rook_count(&w.left_hull(), n)?;
                let avoids = w.avoids_all(&HULL_PATTERNS);
                if (a == b) != avoids {
                    let expected = if avoids { "equal counts" } else { "different counts" };
                    part.fail(format!("w={w}"), expected, format!("{a} vs {b}"), None);
                }
                Ok(part)
            })
            .collect::<Result<Vec<_>, CountError>>()?;
        report = parts.into_iter().fold(report, VerificationReport::merge);
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Boards to test for rank-1 positivity in `t = q - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rank1Sample {
    /// Every board of this square size is checked.
    pub exhaustive_side: usize,
    /// Random boards of this square size are checked...
    pub random_side: usize,
    /// ...this many of them...
    pub random_count: usize,
    /// ...drawn from this seed.
    pub seed: u64,
}

impl Default for Rank1Sample {
    fn default() -> Self {
        Rank1Sample {
            exhaustive_side: 4,
            random_side: 6,
            random_count: 2000,
            seed: 1,
        }
    }
}

fn check_rank1_t(board: &Board, part: &mut VerificationReport) -> Result<(), CountError> {
    part.instances += 1;
    let p = crate::counter::count_rank1(board)?;
    let t = p.in_t_basis()?;
    if t.iter().any(|c| c < &BigInt::from(0)) {
        part.fail(
            board.to_coords_spec(),
            "nonnegative t-coefficients",
            format!("{t:?}"),
            None,
        );
    }
    Ok(())
}

pub fn verify_rank1_t_positivity(spec: &Rank1Sample) -> Result<VerificationReport, CountError> {
    let start = Instant::now();
    let side = spec.exhaustive_side;
    let mut report = VerificationReport::new("rank1-t", side, spec.random_side);
    let cells = side * side;
    let parts = (0u64..1 << cells)
        .into_par_iter()
        .map(|mask| {
            let rows = (0..side).map(|i| (mask >> (side * i)) & ((1 << side) - 1)).collect();
            let b = Board::from_row_masks(side, rows)?;
            let mut part = VerificationReport::new("rank1-t", side, side);
            check_rank1_t(&b, &mut part)?;
            Ok(part)
        })
        .collect::<Result<Vec<_>, CountError>>()?;
    report = parts.into_iter().fold(report, VerificationReport::merge);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = spec.random_side;
    for _ in 0..spec.random_count {
        let rows = (0..k).map(|_| rng.gen_range(0..1u64 << k)).collect();
        let b = Board::from_row_masks(k, rows)?;
        check_rank1_t(&b, &mut report)?;
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// For 1324-avoiding `w`: the hull complement has at least `inv(w)` cells.
pub fn verify_numzeroes(n_max: usize) -> Result<VerificationReport, CountError> {
    let start = Instant::now();
    let mut report = VerificationReport::new("numzeroes", 1, n_max);
    for n in 1..=n_max {
        for w in all(n).filter(|w| !w.contains(&[1, 3, 2, 4])) {
            report.instances += 1;
            let zeros = w.left_hull().complement().len();
            if zeros < w.inversions() {
                report.fail(format!("w={w}"), format!(">= {}", w.inversions()), zeros, None);
            }
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Dispatches by claim id (see [`CLAIMS`]).
pub fn run_claim(counter: &Counter, claim: &str, n_max: usize) -> Result<Option<VerificationReport>, CountError> {
    Ok(Some(match claim {
        "rothe" => verify_conj_rothe(counter, n_max)?,
        "poinrothe" => verify_conj_poinrothe(counter, n_max)?,
        "rookrothe" => verify_conj_rookrothe(counter, n_max)?,
        "rook-equinumerosity" => verify_rook_equinumerosity(n_max)?,
        "rank1-t" => verify_rank1_t_positivity(&Rank1Sample::default())?,
        "numzeroes" => verify_numzeroes(n_max)?,
        _ => return Ok(None),
    }))
}
