//! Permutations as one-line words: patterns, Rothe diagrams, left hulls,
//! skew-vexillary decompositions and the strong Bruhat order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Board, ShapeSpec};
use crate::qpoly::LaurentPoly;

/// Largest `n` for which Poincare polynomials are computed by scanning `S_n`.
pub const POINCARE_MAX_N: usize = 8;

/// Patterns whose avoidance characterizes skew-vexillary permutations.
pub const SV_PATTERNS: [&[usize]; 9] = [
    &[2, 4, 1, 5, 3],
    &[2, 5, 1, 4, 3],
    &[3, 1, 5, 2, 4],
    &[3, 1, 5, 4, 2],
    &[3, 2, 5, 1, 4],
    &[3, 2, 5, 4, 1],
    &[4, 2, 1, 5, 3],
    &[5, 2, 1, 4, 3],
    &[2, 1, 4, 3, 6, 5],
];

/// Patterns governing when the hull and Poincare identities are equalities.
pub const HULL_PATTERNS: [&[usize]; 4] = [&[1, 3, 2, 4], &[2, 4, 1, 5, 3], &[3, 1, 5, 2, 4], &[4, 2, 6, 1, 5, 3]];

pub const VEXILLARY_PATTERN: &[usize] = &[2, 1, 4, 3];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("not a permutation of 1..n: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("cannot parse permutation {0:?}")]
    Parse(String),
    #[error("permutations of different lengths {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("n = {n} exceeds the limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("{0} is not skew-vexillary")]
    NotSkewVexillary(Permutation),
    #[error("{0} contains 1324")]
    Contains1324(Permutation),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    word: Vec<usize>,
}

/// `w = a (+) b` with both blocks 2143-avoiding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SvDecomposition {
    pub k: usize,
    /// The first `k` letters, standardized.
    pub prefix: Permutation,
    /// The remaining letters, standardized.
    pub suffix: Permutation,
}

impl Permutation {
    pub fn new(word: Vec<usize>) -> Result<Self, PermError> {
        let n = word.len();
        let mut seen = vec![false; n];
        for &x in &word {
            if x == 0 || x > n || seen[x - 1] {
                return Err(PermError::NotAPermutation(word));
            }
            seen[x - 1] = true;
        }
        Ok(Permutation { word })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            word: (1..=n).collect(),
        }
    }

    /// The longest element `n n-1 ... 1`.
    pub fn longest(n: usize) -> Self {
        Permutation {
            word: (1..=n).rev().collect(),
        }
    }

    /// Order-isomorphic standardization of distinct values.
    pub fn standardize(values: &[usize]) -> Self {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by_key(|&i| values[i]);
        let mut word = vec![0; values.len()];
        for (rank, &i) in idx.iter().enumerate() {
            word[i] = rank + 1;
        }
        Permutation { word }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    /// `w_i` for 1-indexed `i`.
    pub fn at(&self, i: usize) -> usize {
        self.word[i - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.word.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { word: inv }
    }

    pub fn reverse(&self) -> Self {
        Permutation {
            word: self.word.iter().rev().copied().collect(),
        }
    }

    pub fn complement(&self) -> Self {
        let n = self.len();
        Permutation {
            word: self.word.iter().map(|&v| n + 1 - v).collect(),
        }
    }

    /// `v_i = n + 1 - w_{n+1-i}`.
    pub fn reverse_complement(&self) -> Self {
        self.reverse().complement()
    }

    pub fn inversions(&self) -> usize {
        let w = &self.word;
        (0..w.len())
            .map(|i| w[i + 1..].iter().filter(|&&b| b < w[i]).count())
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// Positions `i` with `w_i` larger than every earlier letter.
    pub fn left_to_right_maxima(&self) -> Vec<usize> {
        let mut best = 0;
        let mut out = Vec::new();
        for (i, &v) in self.word.iter().enumerate() {
            if v > best {
                best = v;
                out.push(i + 1);
            }
        }
        out
    }

    /// Some subsequence is order-isomorphic to `pattern`.
    pub fn contains(&self, pattern: &[usize]) -> bool {
        fn extend(w: &[usize], p: &[usize], chosen: &mut Vec<usize>, start: usize) -> bool {
            let t = chosen.len();
            if t == p.len() {
                return true;
            }
            if w.len() - start < p.len() - t {
                return false;
            }
            for pos in start..w.len() {
                let ok = chosen
                    .iter()
                    .enumerate()
                    .all(|(s, &c)| (w[c] < w[pos]) == (p[s] < p[t]));
                if ok {
                    chosen.push(pos);
                    if extend(w, p, chosen, pos + 1) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        if pattern.len() > self.len() {
            return false;
        }
        extend(&self.word, pattern, &mut Vec::with_capacity(pattern.len()), 0)
    }

    pub fn avoids_all(&self, patterns: &[&[usize]]) -> bool {
        patterns.iter().all(|p| !self.contains(p))
    }

    pub fn is_vexillary(&self) -> bool {
        !self.contains(VEXILLARY_PATTERN)
    }

    /// `R_w = {(i,j) : w_i > j, w^{-1}_j > i}`.
    pub fn rothe(&self) -> Board {
        let n = self.len();
        let inv = self.inverse();
        let cells = (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j)));
        let cells: Vec<_> = cells.filter(|&(i, j)| self.at(i) > j && inv.at(j) > i).collect();
        Board::from_cells(n, n, cells).expect("cells lie in the n x n grid")
    }

    /// Some proper prefix is a set `{1..k}`.
    pub fn is_decomposable(&self) -> bool {
        let mut max = 0;
        for (i, &v) in self.word.iter().enumerate().take(self.len().saturating_sub(1)) {
            max = max.max(v);
            if max == i + 1 {
                return true;
            }
        }
        false
    }

    /// Direct sum `self (+) other`.
    pub fn direct_sum(&self, other: &Permutation) -> Permutation {
        let k = self.len();
        let mut word = self.word.clone();
        word.extend(other.word.iter().map(|v| v + k));
        Permutation { word }
    }

    /// Smallest `k` with `w = a (+) b`, `a` of length `k`, both 2143-avoiding.
    pub fn sv_decompose(&self) -> Option<SvDecomposition> {
        let n = self.len();
        let mut max = 0;
        for k in 0..=n {
            if k > 0 {
                max = max.max(self.word[k - 1]);
            }
            if max != k {
                continue;
            }
            let prefix = Permutation::standardize(&self.word[..k]);
            let suffix = Permutation::standardize(&self.word[k..]);
            if prefix.is_vexillary() && suffix.is_vexillary() {
                return Some(SvDecomposition { k, prefix, suffix });
            }
        }
        None
    }

    pub fn is_skew_vexillary_patterns(&self) -> bool {
        self.avoids_all(&SV_PATTERNS)
    }

    /// Union over non-inversions `i < j` of the rectangles with rows
    /// `i..=j` and columns `w_i..=w_j`, together with the cells `(i, w_i)`.
    pub fn left_hull(&self) -> Board {
        let n = self.len();
        let mut b = Board::new(n, n).expect("n x n grid");
        for i in 1..=n {
            b.insert(i, self.at(i)).expect("in range");
            for j in i + 1..=n {
                if self.at(i) < self.at(j) {
                    for row in i..=j {
                        for col in self.at(i)..=self.at(j) {
                            b.insert(row, col).expect("in range");
                        }
                    }
                }
            }
        }
        b
    }

    /// The hull as `S_{lambda/mu}`; hull rows are never empty so this is unique.
    pub fn hull_shape(&self) -> ShapeSpec {
        self.left_hull().as_skew_shape().expect("the left hull is a skew shape")
    }

    /// `self * t_ij`: swap the letters in positions `i` and `j`.
    pub fn swap_positions(&self, i: usize, j: usize) -> Permutation {
        let mut word = self.word.clone();
        word.swap(i - 1, j - 1);
        Permutation { word }
    }

    /// Elements covering `self` in the strong Bruhat order.
    pub fn bruhat_up_covers(&self) -> Vec<Permutation> {
        let n = self.len();
        let base = self.inversions();
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                if self.at(i) < self.at(j) {
                    let u = self.swap_positions(i, j);
                    if u.inversions() == base + 1 {
                        out.push(u);
                    }
                }
            }
        }
        out
    }

    /// `self <= other` in the strong Bruhat order, by comparing
    /// `#{a <= i : w_a >= j}` for all `i, j`.
    pub fn bruhat_leq(&self, other: &Permutation) -> Result<bool, PermError> {
        if self.len() != other.len() {
            return Err(PermError::SizeMismatch(self.len(), other.len()));
        }
        let n = self.len();
        let mut cu = vec![0usize; n + 2];
        let mut cw = vec![0usize; n + 2];
        for i in 0..n {
            for j in 1..=self.word[i] {
                cu[j] += 1;
            }
            for j in 1..=other.word[i] {
                cw[j] += 1;
            }
            if (1..=n).any(|j| cu[j] > cw[j]) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `P_w(q) = sum over u >= w of q^inv(u)`.
    pub fn poincare(&self) -> Result<LaurentPoly, PermError> {
        let n = self.len();
        if n > POINCARE_MAX_N {
            return Err(PermError::TooLarge { n, max: POINCARE_MAX_N });
        }
        let mut hist = vec![0u64; n * n.saturating_sub(1) / 2 + 1];
        for u in all(n) {
            if self.bruhat_leq(&u)? {
                hist[u.inversions()] += 1;
            }
        }
        let mut poly = LaurentPoly::zero();
        for (e, &c) in hist.iter().enumerate() {
            poly += &LaurentPoly::monomial(e as i64, c);
        }
        Ok(poly)
    }

    /// The skew shape `lambda/mu` whose complement is `R_w` up to row and
    /// column permutations. Convention: the smallest SV split `w = a (+) b`;
    /// `R_a` is rearranged into the straight shape `mu` at the top left and
    /// `R_b` into a rotated straight shape `nu` at the bottom right, so
    /// `lambda_i = n - nu_{n+1-i}`.
    pub fn lambda_mu(&self) -> Option<ShapeSpec> {
        let d = self.sv_decompose()?;
        let n = self.len();
        let sorted_rows = |p: &Permutation| {
            let mut rows: Vec<usize> = p.rothe().profiles().row_cells.into_iter().filter(|&c| c > 0).collect();
            rows.sort_unstable_by(|a, b| b.cmp(a));
            rows
        };
        let mu = sorted_rows(&d.prefix);
        let nu = sorted_rows(&d.suffix);
        let nu_at = |i: usize| nu.get(i - 1).copied().unwrap_or(0);
        let lambda: Vec<usize> = (1..=n).map(|i| n - nu_at(n + 1 - i)).collect();
        Some(ShapeSpec::new(lambda, mu).expect("a valid skew shape"))
    }

    /// The permutation `v` with `H_L(v) = S_{lambda/mu(w)}`:
    /// `v_i = min(([n] \ [mu_i]) \ {v_1..v_{i-1}})` for `i <= k` and
    /// `v_{n+1-j} = max([lambda_{n+1-j}] \ {v_{n+2-j}..v_n})` for `j <= n-k`.
    pub fn construct_v(&self) -> Result<Permutation, PermError> {
        let d = self
            .sv_decompose()
            .ok_or_else(|| PermError::NotSkewVexillary(self.clone()))?;
        let shape = self.lambda_mu().expect("decomposition exists");
        let n = self.len();
        let mut v = vec![0usize; n + 1];
        let mut used = vec![false; n + 1];
        for i in 1..=d.k {
            let pick = (shape.mu_at(i) + 1..=n)
                .find(|&x| !used[x])
                .ok_or_else(|| PermError::NotSkewVexillary(self.clone()))?;
            v[i] = pick;
            used[pick] = true;
        }
        for j in 1..=n - d.k {
            let pos = n + 1 - j;
            let pick = (1..=shape.lambda_at(pos))
                .rev()
                .find(|&x| !used[x])
                .ok_or_else(|| PermError::NotSkewVexillary(self.clone()))?;
            v[pos] = pick;
            used[pick] = true;
        }
        Permutation::new(v[1..].to_vec())
    }

    /// Injection from `R_w` into the complement of `H_L(w)` for 1324-avoiding
    /// `w`: cells with no rook strictly north-west stay put, the rest go to
    /// `(w^{-1}_j, w_i)`.
    pub fn phi_map(&self) -> Result<CellMap, PermError> {
        if self.contains(&[1, 3, 2, 4]) {
            return Err(PermError::Contains1324(self.clone()));
        }
        let inv = self.inverse();
        Ok(self
            .rothe()
            .cells()
            .map(|(i, j)| {
                let nw = (1..i).any(|a| self.at(a) < j);
                let image = if nw { (inv.at(j), self.at(i)) } else { (i, j) };
                ((i, j), image)
            })
            .collect())
    }
}

/// All of `S_n` in lexicographic order.
/// Pairs `(from, to)` of board cells.
pub type CellMap = Vec<((usize, usize), (usize, usize))>;

pub fn all(n: usize) -> AllPerms {
    AllPerms {
        next: Some((1..=n).collect()),
    }
}

pub struct AllPerms {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPerms {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.next.take()?;
        let mut w = cur.clone();
        // standard next-permutation step
        if let Some(i) = (0..w.len().saturating_sub(1)).rev().find(|&i| w[i] < w[i + 1]) {
            let j = (i + 1..w.len()).rev().find(|&j| w[j] > w[i]).expect("exists");
            w.swap(i, j);
            w[i + 1..].reverse();
            self.next = Some(w);
        }
        Some(Permutation { word: cur })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for v in &self.word {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.word.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    /// One-line digits (`41523`) or comma-separated letters for `n > 9`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let word: Option<Vec<usize>> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
        };
        let word = word.ok_or_else(|| PermError::Parse(s.to_string()))?;
        Permutation::new(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn w(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    fn cells(b: &Board) -> Vec<(usize, usize)> {
        b.cells().collect()
    }

    #[test]
    fn parsing() {
        assert_eq!(w("41523").word(), &[4, 1, 5, 2, 3]);
        let long: Permutation = "10,3,1,2,4,5,6,7,8,9".parse().unwrap();
        assert_eq!(long.at(1), 10);
        assert_eq!(long.to_string(), "10,3,1,2,4,5,6,7,8,9");
        assert!("112".parse::<Permutation>().is_err());
        assert!("1a".parse::<Permutation>().is_err());
    }

    #[test]
    fn basics() {
        assert_eq!(w("41523").inversions(), 5);
        assert_eq!(w("12345").reverse_complement(), w("12345"));
        assert_eq!(w("41523").reverse_complement(), w("34152"));
        assert_eq!(w("41523").inverse(), w("24513"));
        assert_eq!(w("31524").left_to_right_maxima(), vec![1, 3]);
    }

    #[test]
    fn left_to_right_maxima_are_full_columns() {
        for n in 1..=6 {
            for u in all(n) {
                let comp = u.rothe().complement();
                let full: Vec<usize> = (1..=n)
                    .filter(|&j| comp.col_mask(j).count_ones() as usize == n)
                    .collect();
                // column w_k is full exactly when k is a left-to-right maximum
                let mut expected: Vec<usize> = u.left_to_right_maxima().iter().map(|&k| u.at(k)).collect();
                expected.sort_unstable();
                assert_eq!(full, expected, "{u}");
            }
        }
    }

    #[test]
    fn rothe_examples() {
        assert_eq!(cells(&w("41523").rothe()), vec![(1, 1), (1, 2), (1, 3), (3, 2), (3, 3)]);
        assert!(w("123").rothe().is_empty());
        assert_eq!(cells(&w("4132").rothe()), vec![(1, 1), (1, 2), (1, 3), (3, 2)]);
    }

    #[test]
    fn rothe_properties() {
        for n in 1..=6 {
            for u in all(n) {
                let r = u.rothe();
                assert!(r.is_le());
                assert_eq!(r.len(), u.inversions());
                assert_eq!(u.inverse().rothe(), r.transpose());
                assert_eq!(r.is_straight_up_to_perm(), u.is_vexillary(), "{u}");
            }
        }
    }

    #[test]
    fn containment() {
        assert!(w("2143").contains(&[2, 1, 4, 3]));
        assert!(!w("41523").contains(&[2, 1, 4, 3]));
        assert!(w("214365").contains(&[2, 1, 4, 3]));
        assert!(!w("21").contains(&[1, 2, 3]));
    }

    #[test]
    fn sv_examples() {
        let d = w("21534").sv_decompose().unwrap();
        assert_eq!(d.k, 2);
        assert_eq!(d.prefix, w("21"));
        assert_eq!(d.suffix, w("312"));
        assert!(w("31524").sv_decompose().is_none());
        assert_eq!(w("123").sv_decompose().unwrap().k, 0);
        assert!(w("21534").is_skew_vexillary_patterns());
        assert!(!w("31524").is_skew_vexillary_patterns());
        assert!(all(4).all(|u| u.is_skew_vexillary_patterns()));
    }

    #[test]
    fn sv_decomposition_matches_patterns() {
        for n in 0..=7 {
            for u in all(n) {
                assert_eq!(u.sv_decompose().is_some(), u.is_skew_vexillary_patterns(), "{u}");
            }
        }
    }

    #[test]
    fn hull_examples() {
        let hull = w("35142").left_hull();
        assert_eq!(hull.len(), 16);
        assert_eq!(
            cells(&hull.complement()),
            vec![(1, 1), (1, 2), (2, 1), (2, 2), (3, 5), (4, 5), (5, 3), (5, 4), (5, 5)]
        );
        let anti = Permutation::longest(4).left_hull();
        assert_eq!(cells(&anti), vec![(1, 4), (2, 3), (3, 2), (4, 1)]);
        assert_eq!(Permutation::identity(4).left_hull(), Board::full(4, 4).unwrap());
        assert_eq!(
            w("35142").hull_shape(),
            ShapeSpec::new(vec![5, 5, 4, 4, 2], vec![2, 2]).unwrap()
        );
    }

    #[test]
    fn hulls_are_skew_shapes() {
        for n in 1..=6 {
            for u in all(n) {
                assert!(u.left_hull().is_skew_shape(), "{u}");
            }
        }
    }

    #[test]
    fn bruhat_examples() {
        let u = w("3412");
        let above: Vec<Permutation> = all(4).filter(|x| u.bruhat_leq(x).unwrap()).collect();
        assert_eq!(above, vec![w("3412"), w("3421"), w("4312"), w("4321")]);
        assert!(all(4).all(|x| Permutation::identity(4).bruhat_leq(&x).unwrap()));
        assert!(all(4).all(|x| x.bruhat_leq(&x).unwrap()));
        assert!(w("12").bruhat_leq(&w("123")).is_err());
    }

    #[test]
    fn bruhat_matches_cover_closure() {
        for n in 1..=4 {
            let perms: Vec<Permutation> = all(n).collect();
            for u in &perms {
                let mut reach: HashSet<Permutation> = HashSet::from([u.clone()]);
                let mut frontier = vec![u.clone()];
                while let Some(x) = frontier.pop() {
                    for y in x.bruhat_up_covers() {
                        if reach.insert(y.clone()) {
                            frontier.push(y);
                        }
                    }
                }
                for v in &perms {
                    assert_eq!(u.bruhat_leq(v).unwrap(), reach.contains(v), "{u} {v}");
                }
            }
        }
    }

    #[test]
    fn poincare_examples() {
        assert_eq!(w("3412").poincare().unwrap(), p("q^6+2*q^5+q^4"));
        assert_eq!(
            Permutation::identity(4).poincare().unwrap(),
            LaurentPoly::q_factorial(4)
        );
        assert_eq!(Permutation::longest(4).poincare().unwrap(), LaurentPoly::q_pow(6));
        assert_eq!(w("1324").poincare().unwrap(), p("q^6+3*q^5+5*q^4+6*q^3+4*q^2+q"));
        assert_eq!(
            w("24153").poincare().unwrap(),
            p("q^10+4*q^9+9*q^8+13*q^7+11*q^6+5*q^5+q^4")
        );
        assert!(Permutation::identity(9).poincare().is_err());
    }

    #[test]
    fn lambda_mu_and_v() {
        assert_eq!(
            w("21534").lambda_mu().unwrap(),
            ShapeSpec::new(vec![5, 5, 5, 5, 3], vec![1]).unwrap()
        );
        let v = w("21534").construct_v().unwrap();
        assert_eq!(v, w("21453"));
        assert_eq!(v.left_hull(), w("21534").lambda_mu().unwrap().board(5, 5).unwrap());
        assert!(matches!(w("31524").construct_v(), Err(PermError::NotSkewVexillary(_))));
        // the identity has an empty Rothe diagram, so the shape is the full square
        let id = Permutation::identity(4);
        assert_eq!(id.construct_v().unwrap(), id);
    }

    #[test]
    fn constructed_v_properties() {
        use crate::rooks::{placements, qrook, Convention};
        for n in 1..=6 {
            let c2 = (n * (n - 1) / 2) as i64;
            for u in all(n).filter(|u| u.is_skew_vexillary_patterns()) {
                let shape = u.lambda_mu().unwrap();
                let board = shape.board(n, n).unwrap();
                assert_eq!(u.rothe().len(), n * n - shape.size(), "{u}");
                let v = u.construct_v().unwrap();
                assert!(v.avoids_all(&HULL_PATTERNS), "{u} -> {v}");
                // the hull of v sits inside the shape and carries the same
                // full rook placements
                let hull = v.left_hull();
                assert!(hull.cells().all(|(i, j)| board.contains(i, j)), "{u} -> {v}");
                let on_shape: HashSet<_> = placements(&board, n).unwrap().collect();
                let on_hull: HashSet<_> = placements(&hull, n).unwrap().collect();
                assert_eq!(on_shape, on_hull, "{u} -> {v}");
                // q^{|shape| - n} R_n^NE(shape, 1/q) = q^{C(n,2) - inv(u)} P_v(q)
                let ne = qrook(&board, n, Convention::NE).unwrap().invert_variable();
                let lhs = ne.shift(shape.size() as i64 - n as i64);
                let rhs = v.poincare().unwrap().shift(c2 - u.inversions() as i64);
                assert_eq!(lhs, rhs, "{u} -> {v}");
            }
        }
    }

    #[test]
    fn phi_examples() {
        let map = w("4132").phi_map().unwrap();
        assert_eq!(
            map,
            vec![((1, 1), (1, 1)), ((1, 2), (1, 2)), ((1, 3), (1, 3)), ((3, 2), (4, 3))]
        );
        assert!(Permutation::identity(3).phi_map().unwrap().is_empty());
        assert!(matches!(w("1324").phi_map(), Err(PermError::Contains1324(_))));
    }

    #[test]
    fn phi_is_an_injection_into_hull_complement() {
        for n in 1..=7 {
            for u in all(n).filter(|u| !u.contains(&[1, 3, 2, 4])) {
                let outside = u.left_hull().complement();
                let map = u.phi_map().unwrap();
                let images: HashSet<_> = map.iter().map(|(_, t)| *t).collect();
                assert_eq!(images.len(), map.len(), "{u}");
                assert!(images.iter().all(|&(i, j)| outside.contains(i, j)), "{u}");
            }
        }
    }

    #[test]
    fn enumeration() {
        assert_eq!(all(0).count(), 1);
        assert_eq!(all(5).count(), 120);
        let v: Vec<String> = all(3).map(|u| u.to_string()).collect();
        assert_eq!(v, ["123", "132", "213", "231", "312", "321"]);
    }

    #[test]
    fn decomposability() {
        assert!(w("2134").is_decomposable());
        assert!(!w("3412").is_decomposable());
        assert!(!w("1").is_decomposable());
        assert_eq!(w("21").direct_sum(&w("12")), w("2134"));
    }
}
