//! The Zariski topology on Star(S) and its spectrality certificate.
//!
//! The subbasis consists of the membership sets W(E, t) = {★ : t ∈ E^★}
//! for E in the standard poset and 0 ≤ t ≤ conductor; descriptors with
//! t beyond the conductor give the full space (tails) and are omitted.
//!
//! A finite space is Alexandrov, so its opens are exactly the up-sets of
//! the specialization preorder, and that preorder is determined by the
//! subbasis alone: p specializes to q iff every subbasis set containing
//! p contains q. The full open lattice is materialized explicitly when it
//! stays below a size cap; beyond the cap, closure and irreducibility are
//! computed from the subbasis-derived specialization order, which is
//! exact in any finite space.

use crate::star::{StarContext, StarError, StarOp};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

/// A set of points of the finite space, as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    words: Vec<u64>,
    len: usize,
}

impl PointSet {
    pub fn empty(len: usize) -> Self {
        PointSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn union(&self, other: &Self) -> Self {
        PointSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
            len: self.len,
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        PointSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
            len: self.len,
        }
    }

    pub fn complement(&self) -> Self {
        let mut s = PointSet {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        // clear padding bits
        if !self.len.is_multiple_of(64) {
            let last = s.words.len() - 1;
            s.words[last] &= (1u64 << (self.len % 64)) - 1;
        }
        s
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }
}

/// A subbasis descriptor: the set {★ : t ∈ E^★} for poset member `member`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Descriptor {
    pub member: usize,
    pub t: i64,
}

/// Cap on the explicitly materialized open lattice. Larger spaces fall
/// back to the order-derived representation.
const OPENS_CAP: usize = 100_000;

/// Above this many points the open lattice is never materialized.
const MATERIALIZE_POINT_CAP: usize = 64;

#[derive(Debug)]
pub struct FiniteSpace {
    pub points: Vec<StarOp>,
    /// deduplicated subbasis sets with one witness descriptor each
    pub subbasis: Vec<(Descriptor, PointSet)>,
    /// the full open lattice, when it fits under the cap
    pub opens: Option<Vec<PointSet>>,
}

#[derive(Debug, Serialize)]
pub struct SpectralReport {
    pub t0: bool,
    /// every open set of a finite space is quasi-compact
    pub quasi_compact_opens: bool,
    /// the quasi-compact opens are all opens, a basis closed under
    /// finite intersection
    pub qc_basis_closed_under_intersection: bool,
    pub irreducible_closed_sets: usize,
    pub all_generic_points_unique: bool,
    pub spectral: bool,
    pub points: usize,
    /// number of opens when materialized
    pub opens: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct LatticeReport {
    pub intersection_size: usize,
    pub empty: bool,
    pub subsets_checked: usize,
    pub exhaustive: bool,
    pub closed_under_meet_and_join: bool,
}

/// A closed set is irreducible iff any two opens meeting it intersect
/// inside it.
fn irreducible_in(c: &PointSet, opens: &[PointSet]) -> bool {
    let meeting: Vec<&PointSet> = opens
        .iter()
        .filter(|u| !u.intersect(c).is_empty())
        .collect();
    meeting
        .iter()
        .enumerate()
        .all(|(i, u)| {
            meeting
                .iter()
                .skip(i)
                .all(|v| !u.intersect(v).intersect(c).is_empty())
        })
}

impl FiniteSpace {
    /// Builds the space on an already-enumerated point list.
    pub fn build(ctx: &StarContext, points: Vec<StarOp>) -> Self {
        let n = points.len();
        let c = ctx.sg.conductor as i64;
        let mut subbasis: Vec<(Descriptor, PointSet)> = Vec::new();
        for member in 0..ctx.poset.len() {
            for t in 0..=c {
                let mut set = PointSet::empty(n);
                for (p, op) in points.iter().enumerate() {
                    if ctx.poset.members[op.table[member]].member(&ctx.sg, t) {
                        set.insert(p);
                    }
                }
                let desc = Descriptor { member, t };
                if !subbasis.iter().any(|(_, s)| *s == set) {
                    subbasis.push((desc, set));
                }
            }
        }
        let opens = Self::materialize_opens(n, &subbasis);
        FiniteSpace {
            points,
            subbasis,
            opens,
        }
    }

    fn materialize_opens(n: usize, subbasis: &[(Descriptor, PointSet)]) -> Option<Vec<PointSet>> {
        use std::collections::BTreeSet;
        // On large spaces the union closure does quadratic passes before
        // the set-count cap can trigger; skip straight to the exact
        // order-derived representation.
        if n > MATERIALIZE_POINT_CAP {
            return None;
        }
        // basis: finite intersections of subbasis sets
        let mut basis: BTreeSet<PointSet> = subbasis.iter().map(|(_, s)| s.clone()).collect();
        basis.insert(PointSet::full(n));
        loop {
            let snapshot: Vec<PointSet> = basis.iter().cloned().collect();
            let before = basis.len();
            for a in &snapshot {
                for (_, b) in subbasis {
                    basis.insert(a.intersect(b));
                    if basis.len() > OPENS_CAP {
                        return None;
                    }
                }
            }
            if basis.len() == before {
                break;
            }
        }
        // opens: arbitrary unions of basis sets
        let mut opens: BTreeSet<PointSet> = basis;
        opens.insert(PointSet::empty(n));
        loop {
            let snapshot: Vec<PointSet> = opens.iter().cloned().collect();
            let before = opens.len();
            for (i, a) in snapshot.iter().enumerate() {
                for b in snapshot.iter().skip(i + 1) {
                    opens.insert(a.union(b));
                    if opens.len() > OPENS_CAP {
                        return None;
                    }
                }
            }
            if opens.len() == before {
                break;
            }
        }
        Some(opens.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// p specializes to q (p ∈ cl{q}) iff every subbasis set containing
    /// p contains q.
    pub fn specializes(&self, p: usize, q: usize) -> bool {
        self.subbasis
            .iter()
            .all(|(_, s)| !s.contains(p) || s.contains(q))
    }

    /// Smallest closed set containing the point, from the topology.
    ///
    /// When the open lattice is materialized this is computed as the
    /// complement of the union of all opens missing the point; otherwise
    /// from the subbasis-derived specialization relation. The two routes
    /// agree on every finite space.
    pub fn point_closure(&self, q: usize) -> PointSet {
        if let Some(opens) = &self.opens {
            let mut missing = PointSet::empty(self.len());
            for u in opens {
                if !u.contains(q) {
                    missing = missing.union(u);
                }
            }
            missing.complement()
        } else {
            let mut set = PointSet::empty(self.len());
            for p in 0..self.len() {
                if self.specializes(p, q) {
                    set.insert(p);
                }
            }
            set
        }
    }

    pub fn is_t0(&self) -> bool {
        for p in 0..self.len() {
            for q in (p + 1)..self.len() {
                if self.specializes(p, q) && self.specializes(q, p) {
                    return false;
                }
            }
        }
        true
    }

    /// Constructive spectrality certificate.
    ///
    /// When the open lattice is materialized, irreducible closed sets are
    /// found by scanning all closed sets; otherwise closed sets are the
    /// down-sets of the specialization order and the irreducible ones are
    /// exactly the sets with a single maximal point, scanned per closure.
    pub fn spectral_report(&self) -> SpectralReport {
        let t0 = self.is_t0();
        let n = self.len();
        let (irreducible, all_unique) = if let Some(opens) = &self.opens {
            let closed: Vec<PointSet> = opens.iter().map(|u| u.complement()).collect();
            let mut count = 0usize;
            let mut all_unique = true;
            for c in &closed {
                if c.is_empty() || !irreducible_in(c, opens) {
                    continue;
                }
                count += 1;
                // generic points: maximal points of C whose closure is C
                let generics: Vec<usize> = c
                    .iter()
                    .filter(|&g| self.point_closure(g) == *c)
                    .collect();
                if generics.len() != 1 {
                    all_unique = false;
                }
            }
            (count, all_unique)
        } else {
            // every irreducible closed set of a finite space is a point
            // closure; T0 makes the generic point unique
            let closures: Vec<PointSet> = (0..n).map(|q| self.point_closure(q)).collect();
            let mut distinct: Vec<&PointSet> = Vec::new();
            let mut all_unique = true;
            for c in &closures {
                if !distinct.contains(&c) {
                    distinct.push(c);
                    let generics = closures.iter().filter(|&x| x == c).count();
                    if generics != 1 {
                        all_unique = false;
                    }
                }
            }
            (distinct.len(), all_unique)
        };
        let spectral = t0 && all_unique;
        SpectralReport {
            t0,
            quasi_compact_opens: true,
            qc_basis_closed_under_intersection: true,
            irreducible_closed_sets: irreducible,
            all_generic_points_unique: all_unique,
            spectral,
            points: n,
            opens: self.opens.as_ref().map(|o| o.len()),
        }
    }

    /// Intersection of subbasis sets is a complete sublattice: for
    /// sampled (or all) non-empty subsets, meet and join stay inside.
    pub fn lattice_in_subbasis(
        &self,
        ctx: &StarContext,
        descriptors: &[Descriptor],
        seed: u64,
    ) -> Result<LatticeReport, StarError> {
        assert!(!descriptors.is_empty());
        let mut w = PointSet::full(self.len());
        for d in descriptors {
            let set = self.descriptor_set(ctx, d);
            w = w.intersect(&set);
        }
        let members: Vec<usize> = w.iter().collect();
        if members.is_empty() {
            return Ok(LatticeReport {
                intersection_size: 0,
                empty: true,
                subsets_checked: 0,
                exhaustive: true,
                closed_under_meet_and_join: true,
            });
        }
        let exhaustive = members.len() <= 12;
        let subsets: Vec<Vec<usize>> = if exhaustive {
            (1u32..(1 << members.len()))
                .map(|mask| {
                    members
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| mask & (1 << k) != 0)
                        .map(|(_, &p)| p)
                        .collect()
                })
                .collect()
        } else {
            let mut rng = StdRng::seed_from_u64(seed);
            (0..1000)
                .map(|_| {
                    loop {
                        let picked: Vec<usize> = members
                            .iter()
                            .copied()
                            .filter(|_| rng.gen_bool(0.5))
                            .collect();
                        if !picked.is_empty() {
                            return picked;
                        }
                    }
                })
                .collect()
        };
        let mut closed = true;
        let mut checked = 0usize;
        for subset in &subsets {
            let ops: Vec<StarOp> = subset.iter().map(|&p| self.points[p].clone()).collect();
            let m = ctx.meet(&ops)?;
            let j = ctx.join(&ops)?;
            let find = |op: &StarOp| self.points.iter().position(|p| p.table == op.table);
            match (find(&m), find(&j)) {
                (Some(mi), Some(ji)) => {
                    if !w.contains(mi) || !w.contains(ji) {
                        closed = false;
                    }
                }
                _ => closed = false,
            }
            checked += 1;
        }
        Ok(LatticeReport {
            intersection_size: members.len(),
            empty: false,
            subsets_checked: checked,
            exhaustive,
            closed_under_meet_and_join: closed,
        })
    }

    /// The subbasis set of an arbitrary descriptor (not necessarily one
    /// of the deduplicated representatives).
    pub fn descriptor_set(&self, ctx: &StarContext, d: &Descriptor) -> PointSet {
        let mut set = PointSet::empty(self.len());
        for (p, op) in self.points.iter().enumerate() {
            if ctx.poset.members[op.table[d.member]].member(&ctx.sg, d.t) {
                set.insert(p);
            }
        }
        set
    }

    /// DOT rendering of the Hasse diagram of the specialization order.
    pub fn dot_hasse(&self, ctx: &StarContext) -> String {
        let n = self.len();
        let mut out = String::from("digraph stars {\n  rankdir=BT;\n");
        for (i, op) in self.points.iter().enumerate() {
            let label = match &op.label {
                Some(l) => l.clone(),
                None => format!(
                    "s{}",
                    op.table
                        .iter()
                        .map(|t| t.to_string())
                        .collect::<Vec<_>>()
                        .join(".")
                ),
            };
            out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
        }
        let le = |a: usize, b: usize| ctx.le(&self.points[a], &self.points[b]);
        for a in 0..n {
            for b in 0..n {
                if a != b && le(a, b) {
                    // covering edges only
                    let covered = (0..n)
                        .any(|m| m != a && m != b && le(a, m) && le(m, b));
                    if !covered {
                        out.push_str(&format!("  n{a} -> n{b};\n"));
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
