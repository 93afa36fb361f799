mod common;

use std::collections::{HashMap, HashSet};

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;
use graphprod::amalgam::{decompose_at_vertex, escape_certificate, NormalForms, Side, SyllableType};
use graphprod::graphs::Graph;
use graphprod::groups::GroupSpec;
use graphprod::tree::build_ball;
use graphprod::words::{GraphProduct, Word};

fn p3() -> GraphProduct {
    let g = Graph::from_names(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
    GraphProduct::uniform(g, GroupSpec::cyclic(2)).unwrap()
}

fn z3z3() -> GraphProduct {
    GraphProduct::uniform(Graph::from_names(&["u", "w"], &[]).unwrap(), GroupSpec::cyclic(3)).unwrap()
}

#[test]
fn normal_words_are_a_bijection_on_path_ball() {
    let ctx = p3();
    for v in 0..3 {
        let dec = decompose_at_vertex(&ctx, v).unwrap();
        let forms = NormalForms::new(&ctx, dec, 4).unwrap();
        let ball = ctx.enumerate_ball(4).unwrap();
        let mut seen = HashMap::new();
        for g in &ball {
            let nw = forms.normal_word(g).unwrap();
            assert!(ctx.equals(&nw.expand(), g).unwrap());
            assert!(nw.h.vertices().is_subset(dec.amalgamated));
            for pair in nw.syllables.windows(2) {
                assert_ne!(pair[0].0, pair[1].0, "syllables must alternate");
            }
            for (side, t) in &nw.syllables {
                assert!(forms.transversal(*side).reps.contains(t) && !t.is_empty());
            }
            assert!(seen.insert(nw, g.clone()).is_none());
        }
        assert_eq!(seen.len(), ball.len());
    }
}

#[test]
fn syllable_types_partition_the_ball() {
    let ctx = p3();
    let dec = decompose_at_vertex(&ctx, 0).unwrap();
    let forms = NormalForms::new(&ctx, dec, 4).unwrap();
    let mut counts = HashMap::new();
    for g in ctx.enumerate_ball(4).unwrap() {
        let t = forms.syllable_type(&g).unwrap();
        let in_h = g.vertices().is_subset(dec.amalgamated);
        assert_eq!(t == SyllableType::Hpart, in_h);
        *counts.entry(t).or_insert(0) += 1;
    }
    assert_eq!(counts.values().sum::<usize>(), ctx.enumerate_ball(4).unwrap().len());
    assert_eq!(counts[&SyllableType::Hpart], 2);
}

#[test]
fn escape_certificate_sees_trapped_tail() {
    let ctx = z3z3();
    let dec = decompose_at_vertex(&ctx, 0).unwrap();
    let u = ctx.parse_word("u:1").unwrap();
    let stuck = vec![u.clone(), ctx.parse_word("u:2").unwrap()];
    assert!(!escape_certificate(&ctx, &dec, &stuck, 2).unwrap().certified);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// Left multiplication is an action by tree automorphisms.
    #[test]
    fn tree_action_respects_products_and_edges(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let ctx = z3z3();
        let dec = decompose_at_vertex(&ctx, rng.gen_range(0..2)).unwrap();
        let ball = build_ball(&ctx, &dec, 9, 20).unwrap();
        let (lg, lh) = (rng.gen_range(0..3), rng.gen_range(0..3));
        let g = random_word(&mut rng, &ctx, lg);
        let h = random_word(&mut rng, &ctx, lh);
        let gh = ctx.multiply(&g, &h).unwrap();
        let inner: Vec<usize> = (0..ball.len()).filter(|&x| ball.vertices[x].depth <= 3).collect();
        for &x in &inner {
            let hx = ball.act(&h, x).unwrap();
            prop_assert_eq!(ball.act(&g, hx).unwrap(), ball.act(&gh, x).unwrap());
            prop_assert_eq!(ball.act(&Word::identity(), x).unwrap(), x);
            if let Some(p) = ball.vertices[x].parent {
                let (a, b) = (ball.act(&g, x).unwrap(), ball.act(&g, p).unwrap());
                prop_assert_eq!(ball.distance(a, b).unwrap(), 1);
            }
        }
        let images: HashSet<usize> = inner.iter().map(|&x| ball.act(&g, x).unwrap()).collect();
        prop_assert_eq!(images.len(), inner.len());
    }
}

#[test]
fn trees_of_both_sides_have_the_expected_degrees() {
    let ctx = p3();
    for v in 0..3 {
        let dec = decompose_at_vertex(&ctx, v).unwrap();
        if dec.degenerate {
            continue;
        }
        let ball = build_ball(&ctx, &dec, 3, 8).unwrap();
        for x in 0..ball.len() {
            if ball.vertices[x].depth < 3 {
                assert_eq!(ball.degree(x), ball.index(ball.vertices[x].side));
            }
        }
        assert!(ball.index(Side::One) >= 2);
    }
}
