//! Exact arithmetic of fractional ideals of a numerical semigroup.
//!
//! A fractional ideal is a set E of integers, bounded below, with
//! E + S ⊆ E. Since E contains its minimum o, it contains o + S, hence
//! every integer from o + conductor on. The normal form is therefore the
//! offset o plus a bit window of length conductor + 1; the tail is
//! implicit. All operations are exact on this representation.

use crate::semigroup::NumericalSemigroup;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdealError {
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("standard poset too large: {0} gaps (cap is 24)")]
    PosetTooLarge(usize),
}

/// A fractional ideal of S in normal form.
///
/// `window[i]` holds iff `offset + i` is a member, for `i` in
/// `0..=conductor`; every integer at or above `offset + conductor` is a
/// member. `window[0]` is always set (the offset is the true minimum) and
/// so is `window[conductor]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FracIdeal {
    offset: i64,
    window: Vec<bool>,
}

impl FracIdeal {
    /// The ideal generated by `gens`: the union of the translates g + S.
    pub fn normalize(sg: &NumericalSemigroup, gens: &[i64]) -> Result<Self, IdealError> {
        if gens.is_empty() {
            return Err(IdealError::EmptyGenerators);
        }
        let lb = *gens.iter().min().unwrap();
        Ok(Self::from_predicate(sg, lb, |n| {
            gens.iter().any(|&g| sg.contains(n - g))
        }))
    }

    /// S itself as an ideal.
    pub fn semigroup(sg: &NumericalSemigroup) -> Self {
        Self::normalize(sg, &[0]).unwrap()
    }

    /// The maximal ideal M = S \ {0}.
    pub fn maximal_ideal(sg: &NumericalSemigroup) -> Self {
        if sg.is_trivial() {
            Self::normalize(sg, &[1]).unwrap()
        } else {
            let gens: Vec<i64> = sg.generators.iter().map(|&g| g as i64).collect();
            Self::normalize(sg, &gens).unwrap()
        }
    }

    /// Builds the normal form of the ideal `{ n : pred(n) }`.
    ///
    /// `pred` must describe a genuine fractional ideal whose minimum is at
    /// least `lower_bound`; the minimum must occur within one conductor
    /// length of any member, which holds for every ideal.
    fn from_predicate(
        sg: &NumericalSemigroup,
        lower_bound: i64,
        pred: impl Fn(i64) -> bool,
    ) -> Self {
        let c = sg.conductor as i64;
        let mut min = lower_bound;
        // every fractional ideal contains min + conductor onward, so the
        // true minimum is found within [lower_bound, lower_bound + ...]
        let cap = lower_bound + 8 * (c + 1) + 8;
        while !pred(min) {
            min += 1;
            assert!(min <= cap, "no ideal member found above lower bound");
        }
        let window: Vec<bool> = (0..=c).map(|i| pred(min + i)).collect();
        debug_assert!(window[0]);
        debug_assert!(*window.last().unwrap());
        FracIdeal { offset: min, window }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn member(&self, sg: &NumericalSemigroup, n: i64) -> bool {
        let c = sg.conductor as i64;
        if n < self.offset {
            false
        } else if n >= self.offset + c {
            true
        } else {
            self.window[(n - self.offset) as usize]
        }
    }

    /// Members within the explicit window `[offset, offset + conductor]`.
    pub fn small_members(&self) -> impl Iterator<Item = i64> + '_ {
        let o = self.offset;
        self.window
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| o + i as i64)
    }

    pub fn shift(&self, k: i64) -> Self {
        FracIdeal {
            offset: self.offset + k,
            window: self.window.clone(),
        }
    }

    /// Translate so the minimum becomes 0.
    pub fn translate_to_zero(&self) -> Self {
        self.shift(-self.offset)
    }

    pub fn subset_of(&self, sg: &NumericalSemigroup, other: &Self) -> bool {
        let c = sg.conductor as i64;
        let lo = self.offset.min(other.offset);
        let hi = (self.offset + c).max(other.offset + c);
        (lo..=hi).all(|n| !self.member(sg, n) || other.member(sg, n))
    }

    /// Module sum: set union.
    pub fn sum(&self, sg: &NumericalSemigroup, other: &Self) -> Self {
        let lb = self.offset.min(other.offset);
        Self::from_predicate(sg, lb, |n| self.member(sg, n) || other.member(sg, n))
    }

    /// Ideal product: Minkowski sum of the two sets.
    pub fn product(&self, sg: &NumericalSemigroup, other: &Self) -> Self {
        let c = sg.conductor as i64;
        let o = self.offset + other.offset;
        // pairs with the first factor beyond its window force the second
        // below its offset, so scanning one window suffices
        Self::from_predicate(sg, o, |n| {
            (0..=c.min(n - o)).any(|i| {
                self.member(sg, self.offset + i) && other.member(sg, n - self.offset - i)
            })
        })
    }

    /// `self` raised to the `k`-th power; the 0-th power is S.
    pub fn power(&self, sg: &NumericalSemigroup, k: u32) -> Self {
        let mut acc = Self::semigroup(sg);
        for _ in 0..k {
            acc = acc.product(sg, self);
        }
        acc
    }

    /// Colon ideal (self : other) = { z : z + other ⊆ self }.
    pub fn colon(&self, sg: &NumericalSemigroup, other: &Self) -> Self {
        let c = sg.conductor as i64;
        let lb = self.offset - other.offset;
        // members of `other` past its window land in the tail of `self`
        // whenever z >= lb, so only the window of `other` constrains z
        Self::from_predicate(sg, lb, |z| {
            (0..=c).all(|i| {
                !other.member(sg, other.offset + i) || self.member(sg, z + other.offset + i)
            })
        })
    }

    pub fn intersect(&self, sg: &NumericalSemigroup, other: &Self) -> Self {
        let lb = self.offset.max(other.offset);
        Self::from_predicate(sg, lb, |n| self.member(sg, n) && other.member(sg, n))
    }

    /// Divisorial closure E^v = S − (S − E).
    pub fn dual_v(&self, sg: &NumericalSemigroup) -> Self {
        let s = Self::semigroup(sg);
        s.colon(sg, &s.colon(sg, self))
    }

    /// Exhaustive check of E + S ⊆ E on the window; true for every value
    /// built through this module, used by tests and validators.
    pub fn is_closed_under_s(&self, sg: &NumericalSemigroup) -> bool {
        let c = sg.conductor as i64;
        self.small_members().all(|m| {
            sg.generators
                .iter()
                .all(|&g| m + g as i64 > self.offset + c || self.member(sg, m + g as i64))
        })
    }

    /// For an ideal with offset 0 lying between S and ℕ0: the set of gaps
    /// of S it contains, as a bitmask over the gap list.
    pub fn gap_mask(&self, sg: &NumericalSemigroup) -> u32 {
        debug_assert_eq!(self.offset, 0);
        let mut mask = 0u32;
        for (k, &g) in sg.gaps.iter().enumerate() {
            if self.member(sg, g as i64) {
                mask |= 1 << k;
            }
        }
        mask
    }

    /// JSON form `{"offset":o,"small":[...],"conductor_from":o+conductor}`.
    pub fn to_json(&self, sg: &NumericalSemigroup) -> serde_json::Value {
        let small: Vec<i64> = self.small_members().collect();
        serde_json::json!({
            "offset": self.offset,
            "small": small,
            "conductor_from": self.offset + sg.conductor as i64,
        })
    }

    pub fn from_json(
        sg: &NumericalSemigroup,
        v: &serde_json::Value,
    ) -> Result<Self, IdealError> {
        let small = v
            .get("small")
            .and_then(|s| s.as_array())
            .ok_or(IdealError::EmptyGenerators)?;
        let gens: Vec<i64> = small.iter().filter_map(|x| x.as_i64()).collect();
        Self::normalize(sg, &gens)
    }
}

/// Serializable mirror of the JSON wire form.
#[derive(Debug, Serialize, Deserialize)]
pub struct FracIdealJson {
    pub offset: i64,
    pub small: Vec<i64>,
    pub conductor_from: i64,
}

/// The standard poset I0(S): all ideals E with S ⊆ E ⊆ ℕ0 and offset 0.
///
/// Every fractional ideal of S translates (minimum to 0) to exactly one
/// member, so closure tables on this poset describe star operations on
/// all fractional ideals.
#[derive(Debug, Clone)]
pub struct StdPoset {
    pub members: Vec<FracIdeal>,
    /// gap-subset bitmask of each member, parallel to `members`.
    pub masks: Vec<u32>,
    /// inclusion_matrix[i][j] = members[i] ⊆ members[j]
    pub inclusion: Vec<Vec<bool>>,
}

impl StdPoset {
    pub fn new(sg: &NumericalSemigroup) -> Result<Self, IdealError> {
        let k = sg.gaps.len();
        if k > 24 {
            return Err(IdealError::PosetTooLarge(k));
        }
        let mut entries: Vec<(u32, u32)> = Vec::new(); // (popcount, mask)
        'mask: for mask in 0u32..(1 << k) {
            let in_set = |n: i64| -> bool {
                if sg.contains(n) {
                    return true;
                }
                if n < 0 {
                    return false;
                }
                sg.gaps
                    .iter()
                    .position(|&g| g as i64 == n)
                    .is_some_and(|idx| mask & (1 << idx) != 0)
            };
            for (idx, &g) in sg.gaps.iter().enumerate() {
                if mask & (1 << idx) != 0 {
                    for &gen in &sg.generators {
                        if !in_set(g as i64 + gen as i64) {
                            continue 'mask;
                        }
                    }
                }
            }
            entries.push((mask.count_ones(), mask));
        }
        // popcount-major order is inclusion-compatible: S first, ℕ0 last
        entries.sort_unstable();
        let members: Vec<FracIdeal> = entries
            .iter()
            .map(|&(_, mask)| {
                FracIdeal::from_predicate(sg, 0, |n| {
                    sg.contains(n)
                        || (n >= 0
                            && sg
                                .gaps
                                .iter()
                                .position(|&g| g as i64 == n)
                                .is_some_and(|idx| mask & (1 << idx) != 0))
                })
            })
            .collect();
        let masks: Vec<u32> = entries.iter().map(|&(_, m)| m).collect();
        let n = members.len();
        let mut inclusion = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                inclusion[i][j] = masks[i] & !masks[j] == 0;
            }
        }
        Ok(StdPoset {
            members,
            masks,
            inclusion,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the poset member with the given gap mask.
    pub fn index_of_mask(&self, mask: u32) -> Option<usize> {
        self.masks.iter().position(|&m| m == mask)
    }

    /// Index of a normalized offset-0 ideal.
    pub fn index_of(&self, sg: &NumericalSemigroup, e: &FracIdeal) -> Option<usize> {
        if e.offset() != 0 {
            return None;
        }
        self.index_of_mask(e.gap_mask(sg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s357() -> NumericalSemigroup {
        NumericalSemigroup::new(&[3, 5, 7]).unwrap()
    }

    fn ideal(sg: &NumericalSemigroup, gens: &[i64]) -> FracIdeal {
        FracIdeal::normalize(sg, gens).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let sg = s357();
        // gens {3,5,7} -> M = S \ {0}
        let m = ideal(&sg, &[3, 5, 7]);
        assert_eq!(m.offset(), 3);
        assert!(m.member(&sg, 3) && m.member(&sg, 5) && m.member(&sg, 6));
        assert!(!m.member(&sg, 4) && !m.member(&sg, 0));
        assert_eq!(m, FracIdeal::maximal_ideal(&sg));
        // gens {0} -> S
        assert_eq!(ideal(&sg, &[0]), FracIdeal::semigroup(&sg));
        // gens {3,5}: 7 is absent (7-3 = 4 and 7-5 = 2 are gaps)
        let e = ideal(&sg, &[3, 5]);
        assert!(e.member(&sg, 3) && e.member(&sg, 5) && e.member(&sg, 6));
        assert!(!e.member(&sg, 7));
        assert!(e.member(&sg, 8));
    }

    #[test]
    fn normal_form_is_canonical() {
        let sg = s357();
        // two generator lists of the same ideal
        assert_eq!(ideal(&sg, &[3, 5, 7]), ideal(&sg, &[3, 5, 7, 10, 12]));
    }

    #[test]
    fn sum_examples() {
        let sg = s357();
        let e2 = ideal(&sg, &[0, 2]);
        let e4 = ideal(&sg, &[0, 4]);
        let e24 = ideal(&sg, &[0, 2, 4]);
        assert_eq!(e2.sum(&sg, &e4), e24);
        assert_eq!(e2.sum(&sg, &e2), e2);
        let s = FracIdeal::semigroup(&sg);
        let m = FracIdeal::maximal_ideal(&sg);
        assert_eq!(s.sum(&sg, &m), s);
    }

    #[test]
    fn product_examples() {
        let sg = s357();
        let m = FracIdeal::maximal_ideal(&sg);
        let mm = m.product(&sg, &m);
        assert_eq!(mm, ideal(&sg, &[6, 8, 10, 12, 14]));
        assert!(!mm.member(&sg, 7));
        assert!(mm.member(&sg, 9));
        let s = FracIdeal::semigroup(&sg);
        let e = ideal(&sg, &[0, 2]);
        assert_eq!(e.product(&sg, &s), e);
        // translation equivariance
        let f = ideal(&sg, &[0, 4]);
        assert_eq!(
            e.shift(2).product(&sg, &f.shift(-3)),
            e.product(&sg, &f).shift(-1)
        );
    }

    #[test]
    fn colon_examples() {
        let sg = s357();
        let s = FracIdeal::semigroup(&sg);
        let m = FracIdeal::maximal_ideal(&sg);
        // (S : M) = S ∪ {2,4}
        assert_eq!(s.colon(&sg, &m), ideal(&sg, &[0, 2, 4]));
        let e = ideal(&sg, &[0, 2]);
        assert_eq!(e.colon(&sg, &s), e);
        // (S : S∪{4}) = M
        let e4 = ideal(&sg, &[0, 4]);
        assert_eq!(s.colon(&sg, &e4), m);
    }

    #[test]
    fn intersect_examples() {
        let sg = s357();
        let e2 = ideal(&sg, &[0, 2]);
        let e4 = ideal(&sg, &[0, 4]);
        let s = FracIdeal::semigroup(&sg);
        assert_eq!(e2.intersect(&sg, &e4), s);
        assert_eq!(e2.intersect(&sg, &e2), e2);
        // (1 + S) ∩ S by window oracle
        let shifted = s.shift(1);
        let got = shifted.intersect(&sg, &s);
        for n in -2..30 {
            assert_eq!(
                got.member(&sg, n),
                s.member(&sg, n - 1) && s.member(&sg, n),
                "at {n}"
            );
        }
    }

    #[test]
    fn dual_v_examples() {
        let sg = s357();
        let e4 = ideal(&sg, &[0, 4]);
        assert_eq!(e4.dual_v(&sg), ideal(&sg, &[0, 2, 4]));
        let s = FracIdeal::semigroup(&sg);
        assert_eq!(s.dual_v(&sg), s);
        let n0 = ideal(&sg, &[0, 1, 2, 4]);
        assert_eq!(n0.dual_v(&sg), n0);
    }

    #[test]
    fn dual_v_is_closure_operator() {
        let sg = s357();
        let poset = StdPoset::new(&sg).unwrap();
        let c = sg.conductor as i64;
        for e in &poset.members {
            for x in -c..=c {
                let ex = e.shift(x);
                let v = ex.dual_v(&sg);
                assert!(ex.subset_of(&sg, &v), "extensive");
                assert_eq!(v.dual_v(&sg), v, "idempotent");
            }
        }
        for a in &poset.members {
            for b in &poset.members {
                if a.subset_of(&sg, b) {
                    assert!(a.dual_v(&sg).subset_of(&sg, &b.dual_v(&sg)), "monotone");
                }
            }
        }
    }

    #[test]
    fn v_triple_identity() {
        // (S : (S : (S : E))) = (S : E)
        let sg = s357();
        let s = FracIdeal::semigroup(&sg);
        let poset = StdPoset::new(&sg).unwrap();
        for e in &poset.members {
            let inv = s.colon(&sg, e);
            let invvv = s.colon(&sg, &s.colon(&sg, &inv));
            assert_eq!(inv, invvv);
        }
    }

    #[test]
    fn colon_adjunction() {
        let sg = s357();
        let c = sg.conductor as i64;
        let poset = StdPoset::new(&sg).unwrap();
        for e in &poset.members {
            for f in &poset.members {
                for x in -c..=c {
                    let fx = f.shift(x);
                    let q = e.colon(&sg, &fx);
                    assert!(q.product(&sg, &fx).subset_of(&sg, e));
                }
            }
        }
    }

    #[test]
    fn standard_poset_shapes() {
        let n0 = NumericalSemigroup::new(&[1]).unwrap();
        assert_eq!(StdPoset::new(&n0).unwrap().len(), 1);

        let s23 = NumericalSemigroup::new(&[2, 3]).unwrap();
        assert_eq!(StdPoset::new(&s23).unwrap().len(), 2);

        let sg = s357();
        let poset = StdPoset::new(&sg).unwrap();
        assert_eq!(poset.len(), 6);
        // {S, S∪{2}, S∪{4}, S∪{2,4}, S∪{1,4}, ℕ0}
        let expect: Vec<FracIdeal> = [
            vec![0],
            vec![0, 2],
            vec![0, 4],
            vec![0, 2, 4],
            vec![0, 1, 4],
            vec![0, 1, 2, 4],
        ]
        .iter()
        .map(|g| ideal(&sg, g))
        .collect();
        for e in &expect {
            assert!(poset.members.contains(e), "missing {e:?}");
        }
        assert_eq!(poset.members[0], expect[0]);
        assert_eq!(poset.members[5], expect[5]);
    }

    #[test]
    fn poset_members_are_ideals_between_s_and_n0() {
        for gens in [vec![3, 4], vec![4, 5, 6], vec![5, 7, 9, 11, 13]] {
            let sg = NumericalSemigroup::new(&gens).unwrap();
            let poset = StdPoset::new(&sg).unwrap();
            let s = FracIdeal::semigroup(&sg);
            let n0 = FracIdeal::from_predicate(&sg, 0, |n| n >= 0);
            for e in &poset.members {
                assert!(e.is_closed_under_s(&sg));
                assert!(s.subset_of(&sg, e));
                assert!(e.subset_of(&sg, &n0));
            }
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let sg = s357();
        let e = ideal(&sg, &[-2, 3]);
        let j = e.to_json(&sg);
        let back = FracIdeal::from_json(&sg, &j).unwrap();
        assert_eq!(e, back);
        assert_eq!(j.to_string(), back.to_json(&sg).to_string());
    }

    proptest! {
        #[test]
        fn unary_ops_are_translation_equivariant(
            gens in proptest::collection::vec(-10i64..20, 1..5),
            a in -7i64..7,
        ) {
            let sg = s357();
            let e = ideal(&sg, &gens);
            prop_assert_eq!(e.shift(a).dual_v(&sg), e.dual_v(&sg).shift(a));
            let s = FracIdeal::semigroup(&sg);
            prop_assert_eq!(s.colon(&sg, &e.shift(a)), s.colon(&sg, &e).shift(-a));
        }

        #[test]
        fn normalize_round_trips_through_json(
            gens in proptest::collection::vec(-15i64..25, 1..6),
        ) {
            let sg = NumericalSemigroup::new(&[4, 5, 6]).unwrap();
            let e = ideal(&sg, &gens);
            let back = FracIdeal::from_json(&sg, &e.to_json(&sg)).unwrap();
            prop_assert_eq!(e, back);
        }
    }
}
