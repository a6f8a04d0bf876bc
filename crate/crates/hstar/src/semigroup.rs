//! Numerical semigroups: the grading monoid of everything downstream.
//!
//! A numerical semigroup is a cofinite submonoid of the non-negative
//! integers. It is described completely by its finite list of gaps; every
//! integer at or above the conductor is a member.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemigroupError {
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("gcd of generators is {0}, not 1")]
    GcdNotOne(u64),
    #[error("generators must be positive")]
    NonPositiveGenerator,
}

/// A numerical semigroup, fully materialized on construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericalSemigroup {
    /// Sorted, deduplicated positive generators with gcd 1.
    pub generators: Vec<u64>,
    /// Sorted positive integers not in the semigroup.
    pub gaps: Vec<u64>,
    /// Largest gap, or -1 when the semigroup is all of ℕ0.
    pub frobenius: i64,
    /// frobenius + 1; every integer at or above it is a member.
    pub conductor: u64,
    /// Least positive member.
    pub multiplicity: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

impl NumericalSemigroup {
    /// Builds the semigroup generated by `generators`.
    ///
    /// Gaps are found by a representability sieve over `[0, B]` where `B` is
    /// the product of the two smallest generators, a safe overshoot of the
    /// Frobenius number.
    pub fn new(generators: &[u64]) -> Result<Self, SemigroupError> {
        if generators.is_empty() {
            return Err(SemigroupError::EmptyGenerators);
        }
        if generators.contains(&0) {
            return Err(SemigroupError::NonPositiveGenerator);
        }
        let mut gens: Vec<u64> = generators.to_vec();
        gens.sort_unstable();
        gens.dedup();
        let g = gens.iter().fold(0u64, |a, &b| gcd(a, b));
        if g != 1 {
            return Err(SemigroupError::GcdNotOne(g));
        }
        let bound = if gens.len() >= 2 {
            (gens[0] * gens[1]) as usize
        } else {
            // single generator with gcd 1 is [1]: the full monoid
            1
        };
        let mut reachable = vec![false; bound + 1];
        reachable[0] = true;
        for &gen in &gens {
            for i in gen as usize..=bound {
                if reachable[i - gen as usize] {
                    reachable[i] = true;
                }
            }
        }
        let gaps: Vec<u64> = (1..=bound as u64)
            .filter(|&n| !reachable[n as usize])
            .collect();
        let frobenius = gaps.last().map_or(-1, |&g| g as i64);
        Ok(NumericalSemigroup {
            multiplicity: gens[0],
            generators: gens,
            frobenius,
            conductor: (frobenius + 1) as u64,
            gaps,
        })
    }

    /// Membership test: negatives are out, everything at or above the
    /// conductor is in, the window in between is decided by the gap list.
    pub fn contains(&self, n: i64) -> bool {
        if n < 0 {
            return false;
        }
        if n as u64 >= self.conductor {
            return true;
        }
        self.gaps.binary_search(&(n as u64)).is_err()
    }

    /// The semigroup as the full monoid ℕ0.
    pub fn is_trivial(&self) -> bool {
        self.gaps.is_empty()
    }

    /// JSON form `{"gens":[...],"gaps":[...],"frobenius":n}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "gens": self.generators,
            "gaps": self.gaps,
            "frobenius": self.frobenius,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force representability oracle, independent of the sieve.
    pub(crate) fn representable(gens: &[u64], n: i64) -> bool {
        if n < 0 {
            return false;
        }
        if n == 0 {
            return true;
        }
        gens.iter()
            .any(|&g| n >= g as i64 && representable(gens, n - g as i64))
    }

    #[test]
    fn trivial_semigroup() {
        let s = NumericalSemigroup::new(&[1]).unwrap();
        assert!(s.gaps.is_empty());
        assert_eq!(s.frobenius, -1);
        assert_eq!(s.conductor, 0);
        assert!(s.contains(0));
        assert!(!s.contains(-1));
    }

    #[test]
    fn gaps_of_357() {
        let s = NumericalSemigroup::new(&[3, 5, 7]).unwrap();
        assert_eq!(s.gaps, vec![1, 2, 4]);
        assert_eq!(s.frobenius, 4);
        assert_eq!(s.conductor, 5);
        assert_eq!(s.multiplicity, 3);
        assert!(!s.contains(4));
        assert!(s.contains(0));
        assert!(s.contains(7));
    }

    #[test]
    fn gaps_of_23() {
        let s = NumericalSemigroup::new(&[2, 3]).unwrap();
        assert_eq!(s.gaps, vec![1]);
        assert_eq!(s.frobenius, 1);
        assert!(s.contains(7));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            NumericalSemigroup::new(&[]).unwrap_err(),
            SemigroupError::EmptyGenerators
        );
        assert_eq!(
            NumericalSemigroup::new(&[4, 6]).unwrap_err(),
            SemigroupError::GcdNotOne(2)
        );
        assert_eq!(
            NumericalSemigroup::new(&[0, 3]).unwrap_err(),
            SemigroupError::NonPositiveGenerator
        );
    }

    #[test]
    fn contains_matches_representability_oracle() {
        for gens in [
            vec![1],
            vec![2, 3],
            vec![3, 4],
            vec![3, 5, 7],
            vec![4, 5, 6],
            vec![5, 7, 9, 11, 13],
        ] {
            let s = NumericalSemigroup::new(&gens).unwrap();
            for n in 0..=(4 * s.conductor.max(1)) as i64 {
                assert_eq!(
                    s.contains(n),
                    representable(&gens, n),
                    "mismatch at {n} for {gens:?}"
                );
            }
        }
    }

    #[test]
    fn closure_under_addition() {
        let s = NumericalSemigroup::new(&[3, 5, 7]).unwrap();
        let bound = (3 * s.conductor) as i64;
        for a in 0..=bound {
            for b in 0..=bound {
                if s.contains(a) && s.contains(b) {
                    assert!(s.contains(a + b));
                }
            }
        }
    }

    #[test]
    fn gap_count_at_least_half_frobenius() {
        // |gaps| >= frobenius/2, equality exactly for symmetric semigroups
        for gens in [vec![2, 3], vec![3, 4], vec![3, 5, 7], vec![4, 5, 6]] {
            let s = NumericalSemigroup::new(&gens).unwrap();
            assert!(2 * s.gaps.len() as i64 >= s.frobenius);
        }
        // <2,3> is symmetric: one gap, frobenius 1... 2*1 >= 1 with
        // symmetry meaning 2|gaps| = frobenius + 1
        let s = NumericalSemigroup::new(&[2, 3]).unwrap();
        assert_eq!(2 * s.gaps.len() as i64, s.frobenius + 1);
    }

    #[test]
    fn json_shape() {
        let s = NumericalSemigroup::new(&[3, 5, 7]).unwrap();
        assert_eq!(
            s.to_json().to_string(),
            r#"{"frobenius":4,"gaps":[1,2,4],"gens":[3,5,7]}"#
        );
    }
}
