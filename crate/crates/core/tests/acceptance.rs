//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.
//!
//! Run with `cargo test -p graphprod --test acceptance`.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use common::*;
use graphprod::amalgam::{decompose_at_vertex, invariance_check, NormalForms, Side, SyllableType};
use graphprod::classify::{cartan_report, classify, replay, Rule, Status, Verdict};
use graphprod::graphs::Graph;
use graphprod::groups::{Conventions, FactName, Facts, GroupSpec, Order};
use graphprod::tree::{build_ball, dynamics_experiment, DynamicsConfig};
use graphprod::truth::Truth;
use graphprod::words::{GraphProduct, IntersectionVerifier, Word};

type Outcome = Result<String, String>;
type Case = (&'static str, Graph, Vec<GroupSpec>, Status, Option<Rule>);
type Criterion = (&'static str, fn() -> Outcome, u64);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn graph(names: &[&str], edges: &[(&str, &str)]) -> Graph {
    Graph::from_names(names, edges).unwrap()
}

fn cycle(n: usize) -> Graph {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::new(names, &edges).unwrap()
}

fn path(n: usize) -> Graph {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::new(names, &edges).unwrap()
}

fn infinite(pp: Truth, amenable: Truth, wa: Truth) -> GroupSpec {
    GroupSpec::abstract_group(
        Order::Infinite,
        Facts { properly_proximal: pp, amenable, weakly_amenable_cstar1: wa },
    )
}

fn z(n: u32, count: usize) -> Vec<GroupSpec> {
    vec![GroupSpec::cyclic(n); count]
}

fn top_rule(v: &Verdict) -> Option<Rule> {
    v.trace.first().map(|r| r.rule)
}

fn classifier_instances() -> Outcome {
    let conv = Conventions::default();
    let mut cases: Vec<Case> = vec![
        ("edgeless Z2,Z2", graph(&["a", "b"], &[]), z(2, 2), Status::NotProperlyProximal, None),
        (
            "edgeless Z2,Z3",
            graph(&["a", "b"], &[]),
            vec![GroupSpec::cyclic(2), GroupSpec::cyclic(3)],
            Status::ProperlyProximal,
            None,
        ),
        ("C4 all Z2", cycle(4), z(2, 4), Status::NotProperlyProximal, Some(Rule::Rule2)),
        ("C5 all Z2", cycle(5), z(2, 5), Status::ProperlyProximal, Some(Rule::Rule1)),
        ("P4 all Z2", path(4), z(2, 4), Status::ProperlyProximal, Some(Rule::Rule1)),
    ];
    let mut star = z(2, 4);
    star[0] = infinite(Truth::Unknown, Truth::True, Truth::Unknown);
    cases.push((
        "K13 amenable center",
        graph(&["c", "x", "y", "z"], &[("c", "x"), ("c", "y"), ("c", "z")]),
        star,
        Status::NotProperlyProximal,
        Some(Rule::Rule3),
    ));
    let mut slowest = Duration::ZERO;
    for (name, g, groups, status, rule) in &cases {
        let start = Instant::now();
        let v = classify(g, groups, &conv).map_err(|e| format!("{name}: {e}"))?;
        slowest = slowest.max(start.elapsed());
        ensure!(v.status == *status, "{name}: got {}, expected {status}", v.status);
        if rule.is_some() {
            ensure!(top_rule(&v) == *rule, "{name}: decided by {:?}, expected {rule:?}", top_rule(&v));
        }
        ensure!(v.needed_facts.is_empty(), "{name}: decided verdict lists needed facts");
    }
    if let Some(i) = cases.iter().position(|c| c.0 == "C4 all Z2") {
        let v = classify(&cases[i].1, &cases[i].2, &conv).unwrap();
        let splits = v.trace.iter().filter(|r| r.rule == Rule::Rule2).count();
        ensure!(splits == 2, "C4 uses {splits} dominating-pair splits, expected 2");
    }
    let single = graph(&["x"], &[]);
    let unknown = vec![infinite(Truth::Unknown, Truth::Unknown, Truth::Unknown)];
    let v = classify(&single, &unknown, &conv).unwrap();
    ensure!(v.status == Status::Unknown, "unknown vertex gave {}", v.status);
    ensure!(
        v.needed_facts.len() == 1 && v.needed_facts[0].fact == FactName::ProperlyProximal,
        "unknown vertex lists {:?}",
        v.needed_facts
    );
    ensure!(slowest < Duration::from_secs(1), "slowest instance took {slowest:?}");
    Ok(format!("{} instances, slowest {slowest:?}", cases.len() + 1))
}

fn exhaustive_consistency() -> Outcome {
    let pool = classifier_pool();
    let conv = Conventions::default();
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let mut draws = 0usize;
    let mut graphs = 0usize;
    let check = |g: &Graph, groups: &[GroupSpec]| -> Result<(), String> {
        let v = classify(g, groups, &conv).map_err(|e| e.to_string())?;
        let all = all_verdicts(g, groups, g.vertices());
        ensure!(all.len() == 1, "witness choices disagree on edges {:?}: {all:?}", g.edges());
        ensure!(
            Truth::from(v.status) == *all.iter().next().unwrap(),
            "classifier {} vs oracle {all:?} on edges {:?}",
            v.status,
            g.edges()
        );
        replay(g, groups, &conv, &v).map_err(|e| format!("replay: {e}"))?;
        Ok(())
    };
    let pp = pool[3].clone();
    for n in 0..=6 {
        for g in graphs_up_to_iso(n) {
            graphs += 1;
            let all_pp = classify(&g, &vec![pp.clone(); n], &conv).unwrap();
            ensure!(
                n == 0 || all_pp.status == Status::ProperlyProximal,
                "all-PP assignment on edges {:?} gave {}",
                g.edges(),
                all_pp.status
            );
            if n <= 5 {
                let k = pool.len();
                for mut code in 0..k.pow(n as u32) {
                    let groups: Vec<GroupSpec> = (0..n)
                        .map(|_| {
                            let x = pool[code % k].clone();
                            code /= k;
                            x
                        })
                        .collect();
                    check(&g, &groups)?;
                    draws += 1;
                }
            } else {
                for _ in 0..100 {
                    let groups: Vec<GroupSpec> = (0..n).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
                    check(&g, &groups)?;
                    draws += 1;
                }
            }
        }
    }
    ensure!(graphs == 1 + 1 + 2 + 4 + 11 + 34 + 156, "enumerated {graphs} graphs up to isomorphism");
    ensure!(draws >= 10_000, "only {draws} assignment draws");
    Ok(format!("{graphs} graphs, {draws} assignments"))
}

fn word_engine() -> Outcome {
    let s3 = GroupSpec::symmetric(3);
    for (names, groups, orders) in [
        (vec!["a", "b"], vec![GroupSpec::cyclic(2), GroupSpec::cyclic(3)], vec![2u64, 3]),
        (vec!["a", "b", "c"], vec![GroupSpec::cyclic(2), GroupSpec::cyclic(3), s3.clone()], vec![2, 3, 6]),
        (vec!["a", "b", "c", "d"], vec![s3.clone(), s3.clone(), GroupSpec::cyclic(2), GroupSpec::cyclic(4)], vec![6, 6, 2, 4]),
    ] {
        let n = names.len();
        let edges: Vec<(&str, &str)> =
            (0..n).flat_map(|i| (i + 1..n).map(|j| (names[i], names[j])).collect::<Vec<_>>()).collect();
        let ctx = GraphProduct::new(graph(&names, &edges), groups).unwrap();
        let count = ctx.enumerate_ball(n).unwrap().len() as u64;
        let product: u64 = orders.iter().product();
        ensure!(count == product, "direct product of orders {orders:?}: {count} elements, expected {product}");
        for len in 0..n {
            let c = ctx.enumerate_ball(len).unwrap().len() as u64;
            ensure!(c == direct_product_count(&orders, len), "direct product {orders:?} at L={len}: {c}");
        }
    }
    let z3z3 = GraphProduct::uniform(graph(&["u", "w"], &[]), GroupSpec::cyclic(3)).unwrap();
    for (len, want) in [1u64, 5, 13, 29].into_iter().enumerate() {
        let got = z3z3.enumerate_ball(len).unwrap().len() as u64;
        ensure!(got == want && got == free_product_count(&[3, 3], len), "Z3*Z3 at L={len}: {got}");
    }
    let z2z2 = GraphProduct::uniform(graph(&["a", "b"], &[]), GroupSpec::cyclic(2)).unwrap();
    for k in 0..=10 {
        let got = z2z2.enumerate_ball(k).unwrap().len();
        ensure!(got == 2 * k + 1, "Z2*Z2 at L={k}: {got}");
    }

    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let cases = 10_000;
    for case in 0..cases {
        let ctx = random_product(&mut rng, 5);
        let len = rng.gen_range(0..10);
        let w = random_word(&mut rng, &ctx, len);
        let c = ctx.canonical(&w).unwrap();
        let fail = |what: &str| Err(format!("case {case}: {what} changed the canonical form of {}", ctx.display(&w)));
        if ctx.canonical(&insert_cancelling_pair(&mut rng, &ctx, &w)).unwrap() != c {
            return fail("cancelling-pair insertion");
        }
        if ctx.canonical(&random_shuffle(&mut rng, &ctx, &w, 12)).unwrap() != c {
            return fail("legal shuffle");
        }
        if ctx.canonical(&split_letter(&mut rng, &ctx, &w)).unwrap() != c {
            return fail("letter splitting");
        }
        let x = random_word(&mut rng, &ctx, 3);
        let padded = insert_cancelling_pair(&mut rng, &ctx, &w);
        let w2 = random_shuffle(&mut rng, &ctx, &padded, 8);
        ensure!(
            ctx.equals(&w.concat(&x), &w2.concat(&x)).unwrap() && ctx.equals(&x.concat(&w), &x.concat(&w2)).unwrap(),
            "case {case}: equality is not a congruence"
        );
        let r = ctx.reduce(&w).unwrap();
        ensure!(ctx.reduce(&r).unwrap() == r, "case {case}: reduce is not idempotent");
        ensure!(ctx.canonical(&c).unwrap() == c, "case {case}: canonical is not idempotent");
        ensure!(r.len() == naive_reduce(&ctx, &w).len(), "case {case}: reduced length differs from the naive merge");
    }
    Ok(format!("ball oracles exact, {cases} random cases clean"))
}

fn intersection_lemma() -> Outcome {
    let mut checked = 0usize;
    for (name, g) in [("P3", path(3)), ("C4", cycle(4))] {
        let ctx = GraphProduct::uniform(g, GroupSpec::cyclic(2)).unwrap();
        let verifier = IntersectionVerifier::new(&ctx, 6).unwrap();
        let short = ctx.enumerate_ball(2).unwrap();
        for gw in &short {
            for hw in &short {
                let failures = verifier.check_all_subsets(gw, hw).unwrap();
                if let Some(f) = failures.first() {
                    return Err(format!(
                        "{name}: T1={:?} T2={:?} g={} h={}: counterexample",
                        ctx.graph().set_names(f.t1),
                        ctx.graph().set_names(f.t2),
                        ctx.display(gw),
                        ctx.display(hw)
                    ));
                }
                checked += 1 << (2 * ctx.graph().len());
            }
        }
    }
    Ok(format!("{checked} (T1, T2, g, h) combinations, zero counterexamples"))
}

fn amalgam_normal_words() -> Outcome {
    let ctx = GraphProduct::uniform(path(3), GroupSpec::cyclic(2)).unwrap();
    let dec = decompose_at_vertex(&ctx, 0).unwrap();
    let forms = NormalForms::new(&ctx, dec, 4).unwrap();
    let ball = ctx.enumerate_ball(4).unwrap();
    let mut seen = HashMap::new();
    let mut types: HashMap<SyllableType, usize> = HashMap::new();
    for g in &ball {
        let nw = forms.normal_word(g).map_err(|e| format!("{}: {e}", ctx.display(g)))?;
        ensure!(ctx.equals(&nw.expand(), g).unwrap(), "reconstruction fails for {}", ctx.display(g));
        let t = nw.syllable_type();
        let expected = match nw.syllables.first() {
            None => SyllableType::Hpart,
            Some((Side::One, _)) => SyllableType::One,
            Some((Side::Two, _)) => SyllableType::Two,
        };
        ensure!(t == expected, "inconsistent type for {}", ctx.display(g));
        ensure!(
            (t == SyllableType::Hpart) == g.vertices().is_subset(dec.amalgamated),
            "{} misclassified as {t:?}",
            ctx.display(g)
        );
        *types.entry(t).or_default() += 1;
        if let Some(other) = seen.insert(nw, g.clone()) {
            return Err(format!("{} and {} share a normal word", ctx.display(&other), ctx.display(g)));
        }
    }
    ensure!(seen.len() == ball.len(), "{} normal words for {} elements", seen.len(), ball.len());
    ensure!(types.values().sum::<usize>() == ball.len(), "syllable types do not cover the ball");
    Ok(format!(
        "{} elements, types One/Two/Hpart = {}/{}/{}",
        ball.len(),
        types.get(&SyllableType::One).unwrap_or(&0),
        types.get(&SyllableType::Two).unwrap_or(&0),
        types.get(&SyllableType::Hpart).unwrap_or(&0)
    ))
}

fn uw_powers(ctx: &GraphProduct, n: usize) -> Vec<Word> {
    (1..=n).map(|k| ctx.parse_word(&"u:1 w:1 ".repeat(k)).unwrap()).collect()
}

fn invariance() -> Outcome {
    let ctx = GraphProduct::uniform(graph(&["u", "w"], &[]), GroupSpec::cyclic(3)).unwrap();
    let dec = decompose_at_vertex(&ctx, 0).unwrap();
    let forms = NormalForms::new(&ctx, dec, 3).unwrap();
    let seq = uw_powers(&ctx, 6);
    for g in ["u:1", "w:1", "u:1 w:2"] {
        let gw = ctx.parse_word(g).unwrap();
        let r = invariance_check(&forms, &seq, &gw, 3).unwrap();
        ensure!(r.escape.certified, "escape not certified at L=3 (g = {g})");
        for n in 2..=6 {
            ensure!(
                r.types[n - 1] == r.shifted_types[n - 1],
                "n = {n}, g = {g}: {:?} vs {:?}",
                r.types[n - 1],
                r.shifted_types[n - 1]
            );
        }
    }
    Ok("types agree for n >= 2, escape certified at L=3".into())
}

fn tree_simulator() -> Outcome {
    let ctx = GraphProduct::uniform(graph(&["u", "w"], &[]), GroupSpec::cyclic(3)).unwrap();
    let dec = decompose_at_vertex(&ctx, 0).unwrap();
    let ball = build_ball(&ctx, &dec, 4, 10).map_err(|e| e.to_string())?;
    ensure!(ball.depth_counts() == vec![1, 3, 6, 12, 24], "depth counts {:?}", ball.depth_counts());
    for x in 0..ball.len() {
        if ball.vertices[x].depth < 4 {
            ensure!(ball.degree(x) == 3, "vertex {x} has degree {}", ball.degree(x));
        }
    }
    ensure!(ball.edges.len() + 1 == ball.len(), "not a tree");
    let seq = uw_powers(&ctx, 6);
    let (_, report) = dynamics_experiment(&ctx, &dec, &seq, 3, DynamicsConfig::default()).map_err(|e| e.to_string())?;
    let outside: Vec<_> = report.tracked.iter().filter(|t| !t.in_repeller_half).collect();
    for t in &outside {
        match t.converged_from {
            Some(i) if i <= 4 => {}
            other => return Err(format!("tracked vertex {} converges from {other:?}", t.vertex)),
        }
    }
    Ok(format!(
        "{} tracked, {} outside the repeller half-tree, all settled by n = 5",
        report.tracked.len(),
        outside.len()
    ))
}

fn cartan() -> Outcome {
    let conv = Conventions::default();
    let c5 = cycle(5);
    for (label, groups) in [
        ("Z2", z(2, 5)),
        ("infinite PP", vec![infinite(Truth::True, Truth::False, Truth::True); 5]),
    ] {
        let r = cartan_report(&c5, &groups, &conv).unwrap();
        ensure!(
            r.applicable == Truth::True && r.no_cartan == Some(true) && r.c_rigid == Some(true),
            "C5 with {label} vertex groups: {r:?}"
        );
    }
    let r = cartan_report(&cycle(4), &z(2, 4), &conv).unwrap();
    ensure!(r.applicable == Truth::False && r.reason.is_some(), "C4: {r:?}");
    let mut groups = vec![infinite(Truth::True, Truth::False, Truth::True); 5];
    groups[2] = infinite(Truth::True, Truth::False, Truth::Unknown);
    let r = cartan_report(&c5, &groups, &conv).unwrap();
    ensure!(r.applicable == Truth::Unknown, "unknown flag gave {:?}", r.applicable);
    ensure!(
        r.needed_facts.iter().any(|f| f.vertex == "v2" && f.fact == FactName::WeaklyAmenableCstar1),
        "needed facts {:?}",
        r.needed_facts
    );
    Ok("C5 no_cartan/c_rigid, C4 inapplicable, unknown flag reported".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("classifier instances", classifier_instances, 10),
        ("exhaustive consistency", exhaustive_consistency, 120),
        ("word engine oracles", word_engine, 60),
        ("intersection verifier", intersection_lemma, 120),
        ("amalgam normal words", amalgam_normal_words, 60),
        ("invariance check", invariance, 60),
        ("tree simulator", tree_simulator, 30),
        ("cartan report", cartan, 10),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("took {elapsed:.2?}, limit {limit}s"))
            }
            other => other,
        };
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} ({elapsed:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
