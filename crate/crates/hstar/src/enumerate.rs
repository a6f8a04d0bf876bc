//! Exhaustive enumeration of Star(S) by constraint-propagating search
//! over closure tables, plus a JSON result cache.

use crate::star::{sort_canonical, StarContext, StarError, StarOp};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error("search too large: {0} gaps (cap is 20)")]
    SearchTooLarge(usize),
    #[error(transparent)]
    Star(#[from] StarError),
}

/// All distinct star operations on S, canonically sorted by table.
///
/// Each entry choice for E is confined to the interval [E, E^v] in the
/// poset; the search assigns entries most-constrained first, forces
/// fixpoints for idempotence, and prunes on every shifted-inclusion
/// constraint between assigned entries. Every result is re-validated.
pub fn enumerate_stars(ctx: &StarContext) -> Result<Vec<StarOp>, EnumerateError> {
    if ctx.sg.gaps.len() > 20 {
        return Err(EnumerateError::SearchTooLarge(ctx.sg.gaps.len()));
    }
    let n = ctx.poset.len();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| ctx.included(i, j) && ctx.included(j, ctx.v_index[i]))
                .collect()
        })
        .collect();
    // most-constrained first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| candidates[i].len());

    let shifts = ctx.sg.conductor as usize + 2;
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut out: Vec<StarOp> = Vec::new();
    dfs(
        ctx,
        &candidates,
        &order,
        shifts,
        &mut assignment,
        0,
        &mut out,
    )?;
    sort_canonical(&mut out);
    out.dedup_by(|a, b| a.table == b.table);
    // attach builtin labels where tables coincide
    let d = ctx.builtin_d();
    let v = ctx.builtin_v();
    for op in &mut out {
        if op.table == d.table {
            op.label = Some("d".into());
        } else if op.table == v.table {
            op.label = Some("v".into());
        }
    }
    Ok(out)
}

fn consistent(
    ctx: &StarContext,
    assignment: &[Option<usize>],
    shifts: usize,
    i: usize,
    j: usize,
) -> bool {
    for (k, slot) in assignment.iter().enumerate() {
        let Some(tk) = *slot else { continue };
        for x in 0..shifts {
            if ctx.included_shift(x, i, k) && !ctx.included_shift(x, j, tk) {
                return false;
            }
            if ctx.included_shift(x, k, i) && !ctx.included_shift(x, tk, j) {
                return false;
            }
        }
    }
    true
}

fn dfs(
    ctx: &StarContext,
    candidates: &[Vec<usize>],
    order: &[usize],
    shifts: usize,
    assignment: &mut Vec<Option<usize>>,
    depth: usize,
    out: &mut Vec<StarOp>,
) -> Result<(), EnumerateError> {
    // skip already-forced variables
    let mut depth = depth;
    while depth < order.len() && assignment[order[depth]].is_some() {
        depth += 1;
    }
    if depth == order.len() {
        let table: Vec<usize> = assignment.iter().map(|a| a.unwrap()).collect();
        if let Ok(op) = ctx.validate(&table, None) {
            out.push(op);
        }
        return Ok(());
    }
    let i = order[depth];
    for &j in &candidates[i] {
        // idempotence: the image must be a fixpoint
        match assignment[j] {
            Some(tj) if tj != j => continue,
            _ => {}
        }
        if !consistent(ctx, assignment, shifts, i, j) {
            continue;
        }
        assignment[i] = Some(j);
        let forced = if assignment[j].is_none() && j != i {
            if !consistent(ctx, assignment, shifts, j, j) {
                assignment[i] = None;
                continue;
            }
            assignment[j] = Some(j);
            true
        } else {
            false
        };
        dfs(ctx, candidates, order, shifts, assignment, depth + 1, out)?;
        if forced {
            assignment[j] = None;
        }
        assignment[i] = None;
    }
    Ok(())
}

pub fn star_count(ctx: &StarContext) -> Result<usize, EnumerateError> {
    Ok(enumerate_stars(ctx)?.len())
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    gens: Vec<u64>,
    stars: Vec<StarOp>,
}

/// Cache directory: `SGP_CACHE` if set, otherwise a per-user directory
/// under the system temp dir.
pub fn default_cache_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("SGP_CACHE") {
        return PathBuf::from(dir);
    }
    std::env::temp_dir().join("hstar-cache")
}

fn cache_path(dir: &Path, gens: &[u64]) -> PathBuf {
    let key: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    dir.join(format!("stars-{}.json", key.join("-")))
}

/// Enumeration with a read-through cache. Cache hits are re-validated
/// (table axioms only); anything stale or invalid is recomputed.
pub fn enumerate_stars_cached(
    ctx: &StarContext,
    dir: &Path,
) -> Result<Vec<StarOp>, EnumerateError> {
    let path = cache_path(dir, &ctx.sg.generators);
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(file) = serde_json::from_str::<CacheFile>(&text) {
            if file.version == CACHE_FORMAT_VERSION
                && file.gens == ctx.sg.generators
                && file
                    .stars
                    .iter()
                    .all(|op| ctx.validate(&op.table, op.label.clone()).is_ok())
            {
                return Ok(file.stars);
            }
        }
    }
    let stars = enumerate_stars(ctx)?;
    let file = CacheFile {
        version: CACHE_FORMAT_VERSION,
        gens: ctx.sg.generators.clone(),
        stars: stars.clone(),
    };
    if std::fs::create_dir_all(dir).is_ok() {
        // failure to persist is not an error; the result is still correct
        let _ = std::fs::write(&path, serde_json::to_string(&file).unwrap());
    }
    Ok(stars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::NumericalSemigroup;

    fn ctx(gens: &[u64]) -> StarContext {
        StarContext::new(&NumericalSemigroup::new(gens).unwrap()).unwrap()
    }

    /// Unpruned oracle: every extensive map, filtered by the validator.
    pub(crate) fn brute_force_stars(c: &StarContext) -> Vec<StarOp> {
        let n = c.poset.len();
        let ups: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| c.included(i, j)).collect())
            .collect();
        let mut out = Vec::new();
        let mut stack = vec![Vec::<usize>::new()];
        while let Some(partial) = stack.pop() {
            if partial.len() == n {
                if let Ok(op) = c.validate(&partial, None) {
                    out.push(op);
                }
                continue;
            }
            for &j in &ups[partial.len()] {
                let mut next = partial.clone();
                next.push(j);
                stack.push(next);
            }
        }
        sort_canonical(&mut out);
        out
    }

    #[test]
    fn counts_on_small_semigroups() {
        assert_eq!(star_count(&ctx(&[1])).unwrap(), 1);
        assert_eq!(star_count(&ctx(&[2, 3])).unwrap(), 1);
        assert_eq!(star_count(&ctx(&[3, 4])).unwrap(), 1);
        assert!(star_count(&ctx(&[3, 5, 7])).unwrap() >= 2);
    }

    #[test]
    fn all_poset_members_divisorial_on_34() {
        let c = ctx(&[3, 4]);
        for i in 0..c.poset.len() {
            assert_eq!(c.v_index[i], i);
        }
    }

    #[test]
    fn matches_unpruned_oracle() {
        for gens in [vec![1], vec![2, 3], vec![3, 4], vec![3, 5, 7]] {
            let c = ctx(&gens);
            assert!(c.poset.len() <= 8);
            let fast: Vec<Vec<usize>> = enumerate_stars(&c)
                .unwrap()
                .into_iter()
                .map(|op| op.table)
                .collect();
            let slow: Vec<Vec<usize>> = brute_force_stars(&c)
                .into_iter()
                .map(|op| op.table)
                .collect();
            assert_eq!(fast, slow, "on {gens:?}");
        }
    }

    #[test]
    fn d_and_v_present_and_bound_everything() {
        for gens in [vec![3, 5, 7], vec![4, 5, 6], vec![5, 7, 9, 11, 13]] {
            let c = ctx(&gens);
            let stars = enumerate_stars(&c).unwrap();
            let d = c.builtin_d();
            let v = c.builtin_v();
            assert!(stars.iter().any(|s| s.table == d.table));
            assert!(stars.iter().any(|s| s.table == v.table));
            for s in &stars {
                assert!(c.le(&d, s) && c.le(s, &v));
            }
        }
    }

    #[test]
    fn lattice_is_meet_and_join_closed() {
        let c = ctx(&[3, 5, 7]);
        let stars = enumerate_stars(&c).unwrap();
        for a in &stars {
            for b in &stars {
                let m = c.meet(&[a.clone(), b.clone()]).unwrap();
                let j = c.join(&[a.clone(), b.clone()]).unwrap();
                assert!(stars.iter().any(|s| s.table == m.table));
                assert!(stars.iter().any(|s| s.table == j.table));
            }
        }
    }

    #[test]
    fn deterministic_output() {
        let c = ctx(&[4, 5, 6]);
        let a = enumerate_stars(&c).unwrap();
        let b = enumerate_stars(&c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = ctx(&[3, 5, 7]);
        let fresh = enumerate_stars_cached(&c, dir.path()).unwrap();
        let cached = enumerate_stars_cached(&c, dir.path()).unwrap();
        assert_eq!(fresh, cached);
        assert_eq!(fresh, enumerate_stars(&c).unwrap());
        // corrupt cache falls back to recomputation
        let path = dir.path().read_dir().unwrap().next().unwrap().unwrap().path();
        std::fs::write(&path, "{broken").unwrap();
        assert_eq!(enumerate_stars_cached(&c, dir.path()).unwrap(), fresh);
    }
}
