//! Acceptance gate: twelve end-to-end criteria over the test corpus
//!   S ∈ { N0, <2,3>, <3,4>, <3,5,7>, <4,5,6>, <5,7,9,11,13> }.
//!
//! Each test prints one `criterion NN <name>: PASS|FAIL` line (visible
//! with `--nocapture`) and fails the build on FAIL.

use std::sync::OnceLock;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hstar::content::{
    content, content_of_ideal, dm_exponent, default_dm_cap, extension_membership, parse_poly,
    poly_in_ideal, sampled_upper_bound, tilde_witness_check, Field, SparsePoly, Verdict,
};
use hstar::enumerate::enumerate_stars;
use hstar::star::{sort_canonical, StarOp};
use hstar::topology::FiniteSpace;
use hstar::verify;
use hstar::{FracIdeal, NumericalSemigroup, StarContext};

const CORPUS: [&[u64]; 6] = [
    &[1],
    &[2, 3],
    &[3, 4],
    &[3, 5, 7],
    &[4, 5, 6],
    &[5, 7, 9, 11, 13],
];

struct Fixture {
    gens: &'static [u64],
    ctx: StarContext,
    stars: Vec<StarOp>,
}

fn corpus() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        CORPUS
            .iter()
            .map(|&gens| {
                let sg = NumericalSemigroup::new(gens).expect("corpus generators are valid");
                let ctx = StarContext::new(&sg).expect("corpus posets fit the cap");
                let stars = enumerate_stars(&ctx).expect("corpus searches fit the cap");
                Fixture { gens, ctx, stars }
            })
            .collect()
    })
}

fn spaces() -> &'static [FiniteSpace] {
    static CELL: OnceLock<Vec<FiniteSpace>> = OnceLock::new();
    CELL.get_or_init(|| {
        corpus()
            .iter()
            .map(|fx| FiniteSpace::build(&fx.ctx, fx.stars.clone()))
            .collect()
    })
}

fn report(n: u32, name: &str, pass: bool, witness: &str) {
    println!(
        "criterion {n:02} {name}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed: {witness}");
}

#[test]
fn criterion_01_axioms() {
    let mut witness = String::new();
    for fx in corpus() {
        let ctx = &fx.ctx;
        for op in [ctx.builtin_d(), ctx.builtin_v()] {
            if let Err(e) = ctx.validate(&op.table, op.label.clone()) {
                witness = format!("{:?}: builtin {:?} invalid: {e}", fx.gens, op.label);
            }
        }
        // Overring families that intersect back to S: the trivial family
        // and S paired with each one-gap extension.
        let mut families = vec![vec![ctx.sg.clone()]];
        for &g in &ctx.sg.gaps {
            let mut gens = fx.gens.to_vec();
            gens.push(g);
            let t = NumericalSemigroup::new(&gens).expect("extension generators are valid");
            families.push(vec![ctx.sg.clone(), t]);
        }
        let mut constructed = 0;
        for fam in &families {
            if let Ok(op) = ctx.from_overrings(fam) {
                constructed += 1;
                if let Err(e) = ctx.validate(&op.table, None) {
                    witness = format!("{:?}: overring-induced map invalid: {e}", fx.gens);
                }
            }
        }
        if constructed == 0 {
            witness = format!("{:?}: no overring family was accepted", fx.gens);
        }
    }
    // The integral closure alone induces a star operation only on the
    // integrally closed (trivial) semigroup.
    let fx = &corpus()[3];
    let n0 = NumericalSemigroup::new(&[1]).unwrap();
    if fx.ctx.from_overrings(&[n0]).is_ok() {
        witness = "integral-closure family accepted on a non-trivial semigroup".into();
    }
    report(1, "star axioms", witness.is_empty(), &witness);
}

/// All extensive tables filtered through the validator — no pruning.
fn oracle_star_tables(ctx: &StarContext) -> Vec<Vec<usize>> {
    let n = ctx.poset.len();
    let ups: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| ctx.included(i, j)).collect())
        .collect();
    let mut found = Vec::new();
    let mut odometer = vec![0usize; n];
    loop {
        let table: Vec<usize> = (0..n).map(|i| ups[i][odometer[i]]).collect();
        if ctx.validate(&table, None).is_ok() {
            found.push(table);
        }
        // advance
        let mut i = 0;
        loop {
            if i == n {
                found.sort();
                return found;
            }
            odometer[i] += 1;
            if odometer[i] < ups[i].len() {
                break;
            }
            odometer[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn criterion_02_enumeration_counts() {
    let mut witness = String::new();
    let expected_exact = [(0usize, 1usize), (1, 1), (2, 1)];
    for (idx, count) in expected_exact {
        let fx = &corpus()[idx];
        if fx.stars.len() != count {
            witness = format!("{:?}: {} operations, expected {count}", fx.gens, fx.stars.len());
        }
    }
    if corpus()[3].stars.len() < 2 {
        witness = "expected at least two operations on <3,5,7>".into();
    }
    for fx in corpus() {
        if fx.ctx.poset.len() > 8 {
            continue;
        }
        let oracle = oracle_star_tables(&fx.ctx);
        let mut got: Vec<Vec<usize>> = fx.stars.iter().map(|s| s.table.clone()).collect();
        got.sort();
        if got != oracle {
            witness = format!(
                "{:?}: enumeration found {} tables, oracle found {}",
                fx.gens,
                got.len(),
                oracle.len()
            );
        }
    }
    report(2, "enumeration counts vs oracle", witness.is_empty(), &witness);
}

#[test]
fn criterion_03_order_bounds() {
    let mut witness = String::new();
    for fx in corpus() {
        let (d, v) = (fx.ctx.builtin_d(), fx.ctx.builtin_v());
        for star in &fx.stars {
            if !fx.ctx.le(&d, star) || !fx.ctx.le(star, &v) {
                witness = format!("{:?}: {:?} escapes [d, v]", fx.gens, star.table);
            }
        }
    }
    report(3, "d <= star <= v", witness.is_empty(), &witness);
}

#[test]
fn criterion_04_closures_are_down_sets() {
    let mut witness = String::new();
    for (fx, space) in corpus().iter().zip(spaces()) {
        for q in 0..space.len() {
            let closure = space.point_closure(q);
            for p in 0..space.len() {
                if closure.contains(p) != fx.ctx.le(&space.points[p], &space.points[q]) {
                    witness = format!("{:?}: closure({q}) disagrees at {p}", fx.gens);
                }
            }
        }
    }
    report(4, "point closures equal order down-sets", witness.is_empty(), &witness);
}

#[test]
fn criterion_05_spectral() {
    let mut witness = String::new();
    for (fx, space) in corpus().iter().zip(spaces()) {
        let r = space.spectral_report();
        if !r.spectral || !r.all_generic_points_unique || !r.t0 {
            witness = format!("{:?}: {r:?}", fx.gens);
        }
    }
    report(5, "spectral spaces with unique generic points", witness.is_empty(), &witness);
}

#[test]
fn criterion_06_joins() {
    let mut witness = String::new();
    let mut rng = StdRng::seed_from_u64(0xD1CE);
    for fx in corpus() {
        let n = fx.stars.len();
        for _ in 0..100 {
            let size = rng.gen_range(1..=4.min(n));
            let subset: Vec<StarOp> = (0..size)
                .map(|_| fx.stars[rng.gen_range(0..n)].clone())
                .collect();
            let join = fx.ctx.join(&subset).expect("join of valid operations");
            let ubs: Vec<&StarOp> = fx
                .stars
                .iter()
                .filter(|s| subset.iter().all(|y| fx.ctx.le(y, s)))
                .collect();
            let lub = ubs.iter().find(|u| ubs.iter().all(|w| fx.ctx.le(u, w)));
            if lub.map(|l| &l.table) != Some(&join.table) {
                witness = format!("{:?}: fixpoint join disagrees with lattice scan", fx.gens);
            }
        }
    }
    report(6, "fixpoint joins equal least upper bounds", witness.is_empty(), &witness);
}

#[test]
fn criterion_07_stable_closure() {
    let mut witness = String::new();
    for fx in corpus() {
        for check in verify::suite_stable(&fx.ctx, &fx.stars) {
            if !check.pass {
                witness = format!("{:?}: {}: {:?}", fx.gens, check.name, check.witness);
            }
        }
    }
    report(7, "stable closure properties", witness.is_empty(), &witness);
}

#[test]
fn criterion_08_extension_claim() {
    let mut witness = String::new();
    for fx in corpus() {
        let ctx = &fx.ctx;
        let sg = &ctx.sg;
        let c = sg.conductor as i64;

        // Exact agreement on every homogeneous ideal, operation, and shift.
        'homog: for e in &ctx.poset.members {
            let gens: Vec<SparsePoly> = e
                .small_members()
                .map(|n| SparsePoly::monomial(Field::Q, n + c))
                .collect();
            for star in &fx.stars {
                for x in -c..=c {
                    let expected = ctx.apply(star, &e.shift(x)).member(sg, 0);
                    let got = extension_membership(ctx, star, &gens, x - c)
                        .expect("monomial generators are in the ring");
                    if (got == Verdict::Yes) != expected {
                        witness = format!(
                            "{:?}: homogeneous disagreement at mask {}, shift {x}",
                            fx.gens,
                            e.gap_mask(sg)
                        );
                        break 'homog;
                    }
                }
            }
        }

        // 50 non-homogeneous ideals containing a monomial: the exact
        // branch equals the content-closure answer, and the sampling
        // branch never certifies "no" against a "yes".
        let mut rng = StdRng::seed_from_u64(0xA11CE);
        let v = ctx.builtin_v();
        for _ in 0..50 {
            let mono = loop {
                let e = rng.gen_range(0..=2 * c.max(1));
                if sg.contains(e) {
                    break e;
                }
            };
            let mut gens = vec![SparsePoly::monomial(Field::Q, mono)];
            for _ in 0..rng.gen_range(1..=2) {
                let terms: Vec<(i64, i64)> = (0..rng.gen_range(2..=3))
                    .map(|_| loop {
                        let e = rng.gen_range(0..=3 * c.max(1));
                        if sg.contains(e) {
                            break (e, rng.gen_range(1..=3));
                        }
                    })
                    .collect();
                let p = SparsePoly::from_integer_terms(Field::Q, &terms);
                if p.term_count() >= 2 {
                    gens.push(p);
                }
            }
            let scale = -rng.gen_range(0..=2 * c.max(1));
            let verdict = extension_membership(ctx, &v, &gens, scale)
                .expect("generators have support in S");
            let expected = ctx
                .apply(&v, &content_of_ideal(sg, &gens).unwrap().shift(scale))
                .member(sg, 0);
            if (verdict == Verdict::Yes) != expected {
                witness = format!("{:?}: exact branch disagrees with content closure", fx.gens);
            }
            if verdict == Verdict::Yes
                && sampled_upper_bound(ctx, &v, &gens, scale).unwrap() == Verdict::No
            {
                witness = format!("{:?}: sampled certificate contradicts a yes", fx.gens);
            }
        }
    }
    report(8, "extension membership via contents", witness.is_empty(), &witness);
}

fn random_poly(rng: &mut StdRng, field: Field, max_exp: i64) -> SparsePoly {
    loop {
        let terms: Vec<(i64, i64)> = (0..rng.gen_range(1..=8))
            .map(|_| (rng.gen_range(0..=max_exp), rng.gen_range(1..=6)))
            .collect();
        let p = SparsePoly::from_integer_terms(field, &terms);
        if !p.is_zero() {
            return p;
        }
    }
}

#[test]
fn criterion_09_content_identity() {
    let mut witness = String::new();
    let mut rng = StdRng::seed_from_u64(0xDEADBEE);
    for fx in corpus() {
        let sg = &fx.ctx.sg;
        let max_exp = 3 * sg.conductor.max(1) as i64;
        for field in [Field::Fp(2), Field::Fp(3), Field::Q] {
            for _ in 0..200 {
                let f = random_poly(&mut rng, field, max_exp);
                let g = random_poly(&mut rng, field, max_exp);
                let cap = default_dm_cap(&g).max(16);
                match dm_exponent(sg, &f, &g, cap) {
                    Ok(m) if m >= 2 => {
                        // Independent re-check of the returned identity.
                        let cg = content(sg, &g).unwrap();
                        let lhs = cg.power(sg, m).product(sg, &content(sg, &f).unwrap());
                        let rhs = cg
                            .power(sg, m - 1)
                            .product(sg, &content(sg, &f.mul(&g).unwrap()).unwrap());
                        if lhs != rhs {
                            witness = format!("{:?}: identity false at m={m}", fx.gens);
                        }
                    }
                    other => witness = format!("{:?}: f={f}, g={g}: {other:?}", fx.gens),
                }
            }
        }
    }
    // Frozen worked case: squaring t^3 + t^5 over F2 in k[<3,5,7>].
    let sg = NumericalSemigroup::new(&[3, 5, 7]).unwrap();
    let f = parse_poly("t^3 + t^5 @F2").unwrap();
    if dm_exponent(&sg, &f, &f, default_dm_cap(&f)) != Ok(2) {
        witness = "worked F2 case did not yield exponent 2".into();
    }
    report(9, "content identity exponents", witness.is_empty(), &witness);
}

#[test]
fn criterion_10_witness_construction() {
    let mut witness = String::new();
    let mut rng = StdRng::seed_from_u64(0xF00D);
    for fx in corpus() {
        let ctx = &fx.ctx;
        let sg = &ctx.sg;
        for i in 0..25 {
            let star = &fx.stars[rng.gen_range(0..fx.stars.len())];
            // E: a poset member pushed inside S so it is integral.
            let e = ctx.poset.members[rng.gen_range(0..ctx.poset.len())]
                .shift(rng.gen_range(0..=sg.conductor as i64));
            // gs: ring elements whose contents sum to S (0 in support,
            // the rest in S).
            let mut gs = vec![SparsePoly::one(Field::Q)];
            if !sg.is_trivial() {
                let s = loop {
                    let s = rng.gen_range(1..=3 * sg.conductor as i64);
                    if sg.contains(s) {
                        break s;
                    }
                };
                gs.push(SparsePoly::from_integer_terms(Field::Q, &[(0, 1), (s, 1)]));
            }
            // f: supported in ∩ᵢ (E : C(gᵢ)), which forces f·gᵢ ∈ E.
            let mut dom = e.clone();
            for g in &gs {
                dom = dom.intersect(sg, &e.colon(sg, &content(sg, g).unwrap()));
            }
            let supp: Vec<i64> = dom.small_members().collect();
            let f_terms: Vec<(i64, i64)> = (0..rng.gen_range(1..=3))
                .map(|_| (supp[rng.gen_range(0..supp.len())], 1))
                .collect();
            let f = SparsePoly::from_integer_terms(Field::Q, &f_terms);
            match tilde_witness_check(ctx, star, &f, &gs, &e, None) {
                Ok(r) if r.pass() => {}
                other => {
                    witness = format!("{:?} instance {i}: {other:?}", fx.gens);
                }
            }
        }
    }
    // Worked cancellation instance over F2.
    let fx = &corpus()[3];
    let e = FracIdeal::normalize(&fx.ctx.sg, &[3, 5]).unwrap();
    let f = parse_poly("t^3 + t^5 @F2").unwrap();
    let g = parse_poly("1 + t^3 @F2").unwrap();
    assert!(poly_in_ideal(&fx.ctx.sg, &f.mul(&g).unwrap(), &e));
    match tilde_witness_check(&fx.ctx, &fx.ctx.builtin_v(), &f, &[g], &e, None) {
        Ok(r) if r.pass() => {}
        other => witness = format!("worked F2 instance: {other:?}"),
    }
    report(10, "witness ideal construction", witness.is_empty(), &witness);
}

#[test]
fn criterion_11_maximal_ideals() {
    let mut witness = String::new();
    for fx in corpus() {
        let ctx = &fx.ctx;
        let sg = &ctx.sg;
        let m = FracIdeal::maximal_ideal(sg);
        let s = FracIdeal::semigroup(sg);
        let c = sg.conductor as i64;
        for star in &fx.stars {
            if ctx.apply(star, &m) != m {
                witness = format!("{:?}: {:?} moves M", fx.gens, star.table);
                continue;
            }
            let maxes = ctx.max_star_ideals(star).expect("M is closed");
            let maxes_w = ctx
                .max_star_ideals(&ctx.stable_closure(star))
                .expect("M is closed under the stable closure");
            if maxes != vec![m.clone()] || maxes_w != vec![m.clone()] {
                witness = format!("{:?}: maximal closed ideals differ from {{M}}", fx.gens);
            }
            // Brute force: every star-closed proper integral ideal with
            // minimum up to 2c sits below M.
            for (i, e) in ctx.poset.members.iter().enumerate() {
                if star.table[i] != i {
                    continue;
                }
                for x in 0..=2 * c {
                    let cand = e.shift(x);
                    if cand.subset_of(sg, &s) && cand != s && !cand.subset_of(sg, &m) {
                        witness = format!("{:?}: closed ideal above M found", fx.gens);
                    }
                }
            }
        }
    }
    report(11, "the maximal ideal is the unique maximal closed ideal", witness.is_empty(), &witness);
}

fn run_cli(cache: &std::path::Path, args: &[&str]) -> (i32, Vec<u8>) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_hstar"))
        .args(args)
        .env("SGP_CACHE", cache)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn random_expr(rng: &mut StdRng, depth: u32) -> String {
    let atom = depth == 0 || rng.gen_bool(0.4);
    if atom {
        match rng.gen_range(0..3) {
            0 => "S".to_string(),
            1 => "N".to_string(),
            _ => {
                let gens: Vec<String> = (0..rng.gen_range(1..=3))
                    .map(|_| rng.gen_range(-6..=12i64).to_string())
                    .collect();
                format!("{{{}}}", gens.join(","))
            }
        }
    } else {
        match rng.gen_range(0..7) {
            0 => format!("(shift {} {})", random_expr(rng, depth - 1), rng.gen_range(-5..=5)),
            1 => format!(
                "(sum {} {})",
                random_expr(rng, depth - 1),
                random_expr(rng, depth - 1)
            ),
            2 => format!(
                "(prod {} {})",
                random_expr(rng, depth - 1),
                random_expr(rng, depth - 1)
            ),
            3 => format!(
                "(colon {} {})",
                random_expr(rng, depth - 1),
                random_expr(rng, depth - 1)
            ),
            4 => format!(
                "(cap {} {})",
                random_expr(rng, depth - 1),
                random_expr(rng, depth - 1)
            ),
            5 => format!("(v {})", random_expr(rng, depth - 1)),
            _ => {
                let name = if rng.gen_bool(0.5) { "d" } else { "v" };
                format!("(star {name} {})", random_expr(rng, depth - 1))
            }
        }
    }
}

#[test]
fn criterion_12_cli_contract() {
    let mut witness = String::new();

    // Library-level determinism backing the byte-identity claim.
    for fx in corpus() {
        let again = enumerate_stars(&fx.ctx).expect("corpus searches fit the cap");
        let mut sorted = again.clone();
        sort_canonical(&mut sorted);
        if again != sorted || again != fx.stars {
            witness = format!("{:?}: enumeration is not canonically deterministic", fx.gens);
        }
    }

    let cache = tempfile::tempdir().expect("temp cache dir");
    let cache = cache.path();

    // Byte-identical repeated runs, cold cache then warm cache.
    for args in [
        &["info", "--gens", "3,5,7"][..],
        &["star", "enum", "--gens", "3,5,7"],
        &["star", "lattice", "--gens", "3,5,7"],
        &["topology", "--gens", "2,3"],
        &["ideal", "--gens", "3,5,7", "--expr", "(v {4})"],
    ] {
        let (c1, o1) = run_cli(cache, args);
        let (c2, o2) = run_cli(cache, args);
        if c1 != 0 || c2 != 0 || o1 != o2 {
            witness = format!("{args:?}: outputs differ or nonzero exit ({c1}, {c2})");
        }
    }

    // 100 random expressions: CLI output equals the direct module call.
    let fx = &corpus()[3];
    let mut rng = StdRng::seed_from_u64(0xE4A);
    for _ in 0..100 {
        let expr = random_expr(&mut rng, 3);
        let expected = hstar::expr::eval_str(&fx.ctx, &expr).expect("generated exprs are valid");
        let (code, out) = run_cli(cache, &["ideal", "--gens", "3,5,7", "--expr", &expr]);
        let shown = String::from_utf8_lossy(&out);
        let expected_json = expected.to_json(&fx.ctx.sg).to_string();
        if code != 0 || shown.trim() != expected_json {
            witness = format!("expr {expr:?}: exit {code}, output {shown:?}");
        }
    }

    // Exit-code contract: clean pass, input error, resource cap.
    let checks = [
        (&["verify", "--gens", "2,3", "--suite", "lattice"][..], 0),
        (&["info", "--gens", "4,6"], 2),
        (&["ideal", "--gens", "3,5,7", "--expr", "(v"], 2),
        (&["verify", "--gens", "3,5,7", "--suite", "bogus"], 2),
        (&["info", "--gens", "25,26"], 3),
    ];
    for (args, want) in checks {
        let (code, _) = run_cli(cache, args);
        if code != want {
            witness = format!("{args:?}: exit {code}, expected {want}");
        }
    }

    report(12, "CLI determinism and exit codes", witness.is_empty(), &witness);
}
