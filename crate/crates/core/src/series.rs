//! Generating series for vexillary (2143-avoiding) and skew-vexillary
//! permutations, as truncated coefficient lists.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perms::{all, Permutation, SV_PATTERNS, VEXILLARY_PATTERN};

/// Largest `n` accepted by the exhaustive scans.
pub const MAX_SCAN_N: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("exhaustive scan limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
}

/// Coefficients `c_0, c_1, ..., c_N` of a power series in `x`, all higher
/// terms unknown.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesPrefix {
    pub coeffs: Vec<BigInt>,
}

impl SeriesPrefix {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        SeriesPrefix { coeffs }
    }

    pub fn from_u64(values: &[u64]) -> Self {
        SeriesPrefix::new(values.iter().map(|&v| BigInt::from(v)).collect())
    }

    /// `1 + x + x^2 + ...` up to `x^len-1`.
    pub fn geometric(len: usize) -> Self {
        SeriesPrefix::new(vec![BigInt::one(); len])
    }

    /// A polynomial, padded or cut to `len` terms.
    pub fn poly(coeffs: &[i64], len: usize) -> Self {
        let mut c: Vec<BigInt> = coeffs.iter().map(|&v| BigInt::from(v)).collect();
        c.resize(len, BigInt::zero());
        SeriesPrefix::new(c)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<&BigInt> {
        self.coeffs.get(n)
    }

    pub fn truncate(&self, len: usize) -> Self {
        SeriesPrefix::new(self.coeffs.iter().take(len).cloned().collect())
    }
}

impl Add<&SeriesPrefix> for &SeriesPrefix {
    type Output = SeriesPrefix;

    fn add(self, rhs: &SeriesPrefix) -> SeriesPrefix {
        let len = self.len().min(rhs.len());
        SeriesPrefix::new((0..len).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect())
    }
}

impl Sub<&SeriesPrefix> for &SeriesPrefix {
    type Output = SeriesPrefix;

    fn sub(self, rhs: &SeriesPrefix) -> SeriesPrefix {
        let len = self.len().min(rhs.len());
        SeriesPrefix::new((0..len).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect())
    }
}

/// Product truncated to the shorter known length.
impl Mul<&SeriesPrefix> for &SeriesPrefix {
    type Output = SeriesPrefix;

    fn mul(self, rhs: &SeriesPrefix) -> SeriesPrefix {
        let len = self.len().min(rhs.len());
        let coeffs = (0..len)
            .map(|n| (0..=n).map(|i| &self.coeffs[i] * &rhs.coeffs[n - i]).sum())
            .collect();
        SeriesPrefix::new(coeffs)
    }
}

impl fmt::Display for SeriesPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn check_n(n: usize) -> Result<(), SeriesError> {
    if n > MAX_SCAN_N {
        return Err(SeriesError::TooLarge { n, max: MAX_SCAN_N });
    }
    Ok(())
}

/// Number of permutations of length `n` satisfying `keep`, by exhaustive scan.
pub fn count_where(n: usize, keep: impl Fn(&Permutation) -> bool + Sync) -> Result<u64, SeriesError> {
    check_n(n)?;
    Ok(all(n).par_bridge().filter(|w| keep(w)).count() as u64)
}

pub fn count_avoiders(patterns: &[&[usize]], n: usize) -> Result<u64, SeriesError> {
    count_where(n, |w| w.avoids_all(patterns))
}

/// `V`: 2143-avoiders for `n = 0..=n_max`.
pub fn vexillary_prefix(n_max: usize) -> Result<SeriesPrefix, SeriesError> {
    let counts = (0..=n_max)
        .map(|n| count_avoiders(&[VEXILLARY_PATTERN], n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SeriesPrefix::from_u64(&counts))
}

/// Skew-vexillary counts by the nine-pattern test.
pub fn sv_pattern_prefix(n_max: usize) -> Result<SeriesPrefix, SeriesError> {
    let counts = (0..=n_max)
        .map(|n| count_avoiders(&SV_PATTERNS, n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SeriesPrefix::from_u64(&counts))
}

/// Skew-vexillary counts by the decomposition test.
pub fn sv_decomposition_prefix(n_max: usize) -> Result<SeriesPrefix, SeriesError> {
    let counts = (0..=n_max)
        .map(|n| count_where(n, |w| w.sv_decompose().is_some()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SeriesPrefix::from_u64(&counts))
}

/// Indecomposable 2143-avoiders of length at least 2, counted directly.
pub fn indecomposable_vexillary_prefix(n_max: usize) -> Result<SeriesPrefix, SeriesError> {
    let counts = (0..=n_max)
        .map(|n| count_where(n, |w| w.len() >= 2 && !w.is_decomposable() && w.is_vexillary()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SeriesPrefix::from_u64(&counts))
}

/// `I = (1 - x)^2 V + x - 1`.
pub fn i_from_v(v: &SeriesPrefix) -> SeriesPrefix {
    let len = v.len();
    let one_minus_x_sq = SeriesPrefix::poly(&[1, -2, 1], len);
    &(&one_minus_x_sq * v) + &SeriesPrefix::poly(&[-1, 1], len)
}

/// `SV = (1 - x) V^2 - V + 1/(1 - x)`.
pub fn sv_from_v(v: &SeriesPrefix) -> SeriesPrefix {
    let len = v.len();
    let one_minus_x = SeriesPrefix::poly(&[1, -1], len);
    &(&(&one_minus_x * &(v * v)) - v) + &SeriesPrefix::geometric(len)
}

/// Splits `w = id_i (+) u (+) id_k` with `u` empty or indecomposable with no
/// fixed leading or trailing block. Returns `(i, u, k)`.
pub fn strip_identity_ends(w: &Permutation) -> (usize, Permutation, usize) {
    let word = w.word();
    let n = word.len();
    let i = word.iter().enumerate().take_while(|&(t, &x)| x == t + 1).count();
    if i == n {
        return (n, Permutation::identity(0), 0);
    }
    let k = word.iter().rev().enumerate().take_while(|&(t, &x)| x == n - t).count();
    let u = Permutation::standardize(&word[i..n - k]);
    (i, u, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixes_from_known_values() {
        let v = SeriesPrefix::from_u64(&[1, 1, 2, 6, 23]);
        assert_eq!(i_from_v(&v), SeriesPrefix::from_u64(&[0, 0, 1, 3, 13]));
        assert_eq!(sv_from_v(&v), SeriesPrefix::from_u64(&[1, 1, 2, 6, 24]));
    }

    #[test]
    fn scans() {
        assert_eq!(vexillary_prefix(4).unwrap(), SeriesPrefix::from_u64(&[1, 1, 2, 6, 23]));
        assert_eq!(count_avoiders(&SV_PATTERNS, 4).unwrap(), 24);
        assert_eq!(count_avoiders(&SV_PATTERNS, 5).unwrap(), 112);
        assert!(matches!(
            count_avoiders(&SV_PATTERNS, 10),
            Err(SeriesError::TooLarge { .. })
        ));
    }

    #[test]
    fn three_way_agreement() {
        let v = vexillary_prefix(7).unwrap();
        let sv = sv_from_v(&v);
        assert_eq!(sv.coeffs[5], BigInt::from(112));
        assert_eq!(sv, sv_pattern_prefix(7).unwrap());
        assert_eq!(sv, sv_decomposition_prefix(7).unwrap());
        assert_eq!(i_from_v(&v), indecomposable_vexillary_prefix(7).unwrap());
    }

    #[test]
    fn vexillary_structure() {
        for n in 0..=7 {
            for w in all(n).filter(Permutation::is_vexillary) {
                let (i, u, k) = strip_identity_ends(&w);
                let rebuilt = Permutation::identity(i)
                    .direct_sum(&u)
                    .direct_sum(&Permutation::identity(k));
                assert_eq!(rebuilt, w);
                assert!(u.is_empty() || !u.is_decomposable(), "{w}");
            }
        }
    }

    #[test]
    fn truncated_products() {
        let a = SeriesPrefix::from_u64(&[1, 2, 3]);
        let b = SeriesPrefix::from_u64(&[1, 1]);
        assert_eq!(&a * &b, SeriesPrefix::from_u64(&[1, 3]));
        assert_eq!(a.to_string(), "1,2,3");
    }
}
