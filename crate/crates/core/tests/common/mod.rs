//! Independent oracles and generators shared by the integration tests and the
//! acceptance harness. Nothing here calls the word-reduction or classifier code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use graphprod::graphs::{Graph, VertexSet};
use graphprod::groups::{Facts, GroupSpec, Order};
use graphprod::truth::Truth;
use graphprod::words::{GraphProduct, Letter, Word};

pub fn small_pool() -> Vec<GroupSpec> {
    vec![GroupSpec::cyclic(2), GroupSpec::cyclic(3), GroupSpec::symmetric(3)]
}

pub fn random_graph(rng: &mut StdRng, n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                edges.push((i, j));
            }
        }
    }
    Graph::new((0..n).map(|i| format!("v{i}")).collect(), &edges).unwrap()
}

pub fn random_product(rng: &mut StdRng, max_n: usize) -> GraphProduct {
    let n = rng.gen_range(1..=max_n);
    let pool = small_pool();
    let groups = (0..n).map(|_| pool.choose(rng).unwrap().clone()).collect();
    GraphProduct::new(random_graph(rng, n), groups).unwrap()
}

pub fn random_letter(rng: &mut StdRng, ctx: &GraphProduct) -> Letter {
    let v = rng.gen_range(0..ctx.graph().len());
    let e = *ctx.group(v).non_identity().unwrap().choose(rng).unwrap();
    Letter { vertex: v, element: e }
}

pub fn random_word(rng: &mut StdRng, ctx: &GraphProduct, len: usize) -> Word {
    Word((0..len).map(|_| random_letter(rng, ctx)).collect())
}

/// Reduction by repeated search for a mergeable pair, straight from the
/// definition: two letters at one vertex merge when every letter between them
/// sits at a vertex adjacent to it.
pub fn naive_reduce(ctx: &GraphProduct, w: &Word) -> Vec<Letter> {
    let g = ctx.graph();
    let mut letters = w.0.clone();
    'outer: loop {
        for i in 0..letters.len() {
            for j in i + 1..letters.len() {
                let u = letters[i].vertex;
                if letters[j].vertex != u {
                    if !g.adjacent(u, letters[j].vertex) {
                        break;
                    }
                    continue;
                }
                let group = ctx.group(u);
                let prod = group.compose(letters[i].element, letters[j].element).unwrap();
                letters.remove(j);
                if group.is_identity(prod).unwrap() {
                    letters.remove(i);
                } else {
                    letters[i].element = prod;
                }
                continue 'outer;
            }
        }
        return letters;
    }
}

/// Applies `count` random swaps of adjacent letters at distinct adjacent vertices.
pub fn random_shuffle(rng: &mut StdRng, ctx: &GraphProduct, w: &Word, count: usize) -> Word {
    let mut letters = w.0.clone();
    if letters.len() < 2 {
        return Word(letters);
    }
    for _ in 0..count {
        let i = rng.gen_range(0..letters.len() - 1);
        let (a, b) = (letters[i].vertex, letters[i + 1].vertex);
        if a != b && ctx.graph().adjacent(a, b) {
            letters.swap(i, i + 1);
        }
    }
    Word(letters)
}

/// Inserts `l l⁻¹` at a random position.
pub fn insert_cancelling_pair(rng: &mut StdRng, ctx: &GraphProduct, w: &Word) -> Word {
    let l = random_letter(rng, ctx);
    let inv = Letter { vertex: l.vertex, element: ctx.group(l.vertex).inverse(l.element).unwrap() };
    let at = rng.gen_range(0..=w.len());
    let mut letters = w.0.clone();
    letters.splice(at..at, [l, inv]);
    Word(letters)
}

/// Replaces a letter `(u, g)` by `(u, g1)(u, g2)` with `g1 g2 = g`, both non-trivial.
pub fn split_letter(rng: &mut StdRng, ctx: &GraphProduct, w: &Word) -> Word {
    let mut letters = w.0.clone();
    if letters.is_empty() {
        return w.clone();
    }
    let i = rng.gen_range(0..letters.len());
    let Letter { vertex, element } = letters[i];
    let group = ctx.group(vertex);
    let choices: Vec<_> = group.non_identity().unwrap().into_iter().filter(|&x| x != element).collect();
    let Some(&g1) = choices.choose(rng) else { return w.clone() };
    let g2 = group.compose(group.inverse(g1).unwrap(), element).unwrap();
    letters[i] = Letter { vertex, element: g1 };
    letters.insert(i + 1, Letter { vertex, element: g2 });
    Word(letters)
}

/// Number of elements of syllable length at most `max_len` in the free product of
/// groups with the given orders, by listing alternating tuples of non-trivial elements.
pub fn free_product_count(orders: &[u64], max_len: usize) -> u64 {
    // Tuples ending at vertex v of length l.
    let mut ending: Vec<u64> = orders.iter().map(|&o| o - 1).collect();
    let mut total = 1 + ending.iter().sum::<u64>();
    if max_len == 0 {
        return 1;
    }
    for _ in 2..=max_len {
        let sum: u64 = ending.iter().sum();
        ending = orders.iter().zip(&ending).map(|(&o, &e)| (o - 1) * (sum - e)).collect();
        total += ending.iter().sum::<u64>();
    }
    total
}

/// Elements of syllable length at most `max_len` in a direct product.
pub fn direct_product_count(orders: &[u64], max_len: usize) -> u64 {
    let n = orders.len();
    (0u64..1 << n)
        .filter(|m| m.count_ones() as usize <= max_len)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| orders[i] - 1).product::<u64>())
        .sum()
}

/// All graphs on `n` vertices, one per isomorphism class.
pub fn graphs_up_to_iso(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let canon = perms
            .iter()
            .map(|p| {
                let mut m = 0u64;
                for (bit, &(i, j)) in pairs.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        let (a, b) = (p[i].min(p[j]), p[i].max(p[j]));
                        m |= 1 << pairs.iter().position(|&q| q == (a, b)).unwrap();
                    }
                }
                m
            })
            .min()
            .unwrap_or(0);
        if seen.insert(canon) {
            out.push(Graph::from_edge_mask(n, canon));
        }
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

/// The four vertex-group types used by the classifier sweeps.
pub fn classifier_pool() -> Vec<GroupSpec> {
    let inf = |pp, amenable| {
        GroupSpec::abstract_group(
            Order::Infinite,
            Facts { properly_proximal: pp, amenable, weakly_amenable_cstar1: Truth::Unknown },
        )
    };
    vec![
        GroupSpec::cyclic(2),
        GroupSpec::cyclic(3),
        inf(Truth::False, Truth::True),
        inf(Truth::True, Truth::False),
    ]
}

/// Proper proximality of a vertex group as the oracle sees it: finite groups
/// count as properly proximal, infinite amenable ones do not.
pub fn vertex_pp(g: &GroupSpec) -> Truth {
    match g.order() {
        Order::Finite(_) => Truth::True,
        Order::Infinite if g.facts.amenable == Truth::True => Truth::False,
        Order::Infinite => g.facts.properly_proximal,
    }
}

/// Every verdict reachable on `set` by some admissible sequence of choices:
/// any center, or any non-adjacent dominating pair, at every step.
pub fn all_verdicts(graph: &Graph, groups: &[GroupSpec], set: VertexSet) -> BTreeSet<Truth> {
    let vs: Vec<usize> = set.iter().collect();
    let mut out = BTreeSet::new();
    match vs.len() {
        0 => {
            out.insert(Truth::False);
            return out;
        }
        1 => {
            out.insert(vertex_pp(&groups[vs[0]]));
            return out;
        }
        _ => {}
    }
    let adj = |a: usize, b: usize| graph.adjacent(a, b);
    let joined_to_rest = |v: usize, skip: usize| vs.iter().all(|&u| u == v || u == skip || adj(v, u));
    let mut any_rule = false;
    for &v in &vs {
        if joined_to_rest(v, v) {
            any_rule = true;
            for r in all_verdicts(graph, groups, set.without(v)) {
                out.insert(vertex_pp(&groups[v]).and(r));
            }
        }
    }
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            if !adj(a, b) && joined_to_rest(a, b) && joined_to_rest(b, a) {
                any_rule = true;
                let big = |v: usize| groups[v].order().at_least(3);
                let factor = Truth::from(big(a) || big(b));
                let rest = set.without(a).without(b);
                let rests = if rest.is_empty() { BTreeSet::from([Truth::True]) } else { all_verdicts(graph, groups, rest) };
                for r in rests {
                    out.insert(factor.and(r));
                }
            }
        }
    }
    if !any_rule {
        out.insert(Truth::True);
    }
    out
}
