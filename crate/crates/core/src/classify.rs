//! Recursive decision procedure for proper proximality of graph products.
//!
//! Rules, tried in this order on the current induced subgraph `S`:
//!
//! * `Base0`: `S` is empty; the trivial group is not properly proximal.
//! * `Base1`: `S = {v}`; the answer is the vertex group's own flag.
//! * `Rule3`: `S` has a center `v` (adjacent to all others). The group splits as
//!   `G_v × Γ_{S∖v}`; both factors must be properly proximal.
//! * `Rule2`: no center but a dominating pair `{v1, v2}`. The group splits as
//!   `(G_v1 ∗ G_v2) × Γ_{S∖{v1,v2}}`; the free factor is properly proximal iff one
//!   of the two groups has order at least 3 (`FreeProductBase`), and an empty
//!   remainder is neutral.
//! * `Rule1`: otherwise (radius at least 2, no dominating pair); properly proximal.
//!
//! Centers and pairs are chosen least-first in declaration order. Missing facts
//! propagate as `Unknown` through Kleene conjunction.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{Graph, VertexSet};
use crate::groups::{derive_facts, Conventions, FactName, GroupSpec, Order};
use crate::truth::Truth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    ProperlyProximal,
    NotProperlyProximal,
    Unknown,
}

impl From<Truth> for Status {
    fn from(t: Truth) -> Self {
        match t {
            Truth::True => Status::ProperlyProximal,
            Truth::False => Status::NotProperlyProximal,
            Truth::Unknown => Status::Unknown,
        }
    }
}

impl From<Status> for Truth {
    fn from(s: Status) -> Self {
        match s {
            Status::ProperlyProximal => Truth::True,
            Status::NotProperlyProximal => Truth::False,
            Status::Unknown => Truth::Unknown,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::ProperlyProximal => "ProperlyProximal",
            Status::NotProperlyProximal => "NotProperlyProximal",
            Status::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    Base0,
    Base1,
    Rule1,
    Rule2,
    Rule3,
    FreeProductBase,
}

/// One step of the recursion. Records appear in pre-order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleApplication {
    pub rule: Rule,
    /// The center (`Rule3`), the pair (`Rule2`, `FreeProductBase`) or the single
    /// vertex (`Base1`); empty otherwise.
    pub witness: Vec<String>,
    /// The vertex set the rule was applied to.
    pub subgraph: Vec<String>,
    pub local_result: Truth,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NeededFact {
    pub vertex: String,
    pub fact: FactName,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub trace: Vec<RuleApplication>,
    /// Non-empty iff `status` is `Unknown`.
    pub needed_facts: Vec<NeededFact>,
}

/// Validates the vertex groups and closes their facts.
fn prepare(graph: &Graph, groups: &[GroupSpec], config: &Conventions) -> Result<Vec<GroupSpec>> {
    if graph.len() != groups.len() {
        return Err(Error::input(format!(
            "{} vertices but {} vertex groups",
            graph.len(),
            groups.len()
        )));
    }
    groups
        .iter()
        .enumerate()
        .map(|(v, g)| {
            if g.order() == Order::Finite(1) {
                return Err(Error::input(format!(
                    "vertex group at `{}` is trivial; graph products need non-trivial groups",
                    graph.name(v)
                )));
            }
            derive_facts(g, config)
        })
        .collect()
}

struct Classifier<'a> {
    graph: &'a Graph,
    groups: &'a [GroupSpec],
    trace: Vec<RuleApplication>,
    unknown: BTreeSet<usize>,
}

impl Classifier<'_> {
    fn record(&mut self, rule: Rule, witness: &[usize], set: VertexSet) -> usize {
        self.trace.push(RuleApplication {
            rule,
            witness: witness.iter().map(|&v| self.graph.name(v).to_string()).collect(),
            subgraph: self.graph.set_names(set),
            local_result: Truth::Unknown,
        });
        self.trace.len() - 1
    }

    fn vertex_flag(&mut self, v: usize) -> Truth {
        let at = self.record(Rule::Base1, &[v], VertexSet::singleton(v));
        let flag = self.groups[v].facts.properly_proximal;
        if flag == Truth::Unknown {
            self.unknown.insert(v);
        }
        self.trace[at].local_result = flag;
        flag
    }

    fn eval(&mut self, set: VertexSet) -> Truth {
        let view = self.graph.view(set).expect("subset of the graph");
        match set.len() {
            0 => {
                let at = self.record(Rule::Base0, &[], set);
                self.trace[at].local_result = Truth::False;
                return Truth::False;
            }
            1 => return self.vertex_flag(set.first().expect("one vertex")),
            _ => {}
        }
        if let Some(&v) = view.centers().first() {
            let at = self.record(Rule::Rule3, &[v], set);
            let own = self.vertex_flag(v);
            let rest = self.eval(set.without(v));
            let result = own & rest;
            self.trace[at].local_result = result;
            return result;
        }
        if let Some(pair) = view.dominating_pairs().first().copied() {
            let (a, b) = (pair.first, pair.second);
            let at = self.record(Rule::Rule2, &[a, b], set);
            let free_at = self.record(Rule::FreeProductBase, &[a, b], VertexSet::from_iter([a, b]));
            let free = Truth::from(self.groups[a].order().at_least(3) || self.groups[b].order().at_least(3));
            self.trace[free_at].local_result = free;
            let rest_set = set.without(a).without(b);
            let rest = if rest_set.is_empty() { Truth::True } else { self.eval(rest_set) };
            let result = free & rest;
            self.trace[at].local_result = result;
            return result;
        }
        let at = self.record(Rule::Rule1, &[], set);
        self.trace[at].local_result = Truth::True;
        Truth::True
    }
}

/// Decides whether the graph product of `groups` over `graph` is properly proximal.
pub fn classify(graph: &Graph, groups: &[GroupSpec], config: &Conventions) -> Result<Verdict> {
    let closed = prepare(graph, groups, config)?;
    let mut c = Classifier { graph, groups: &closed, trace: Vec::new(), unknown: BTreeSet::new() };
    let result = c.eval(graph.vertices());
    let needed_facts = if result == Truth::Unknown {
        c.unknown
            .iter()
            .map(|&v| NeededFact { vertex: graph.name(v).to_string(), fact: FactName::ProperlyProximal })
            .collect()
    } else {
        Vec::new()
    };
    Ok(Verdict { status: result.into(), trace: c.trace, needed_facts })
}

/// Checks a verdict against the graph and groups it claims to describe: every
/// witness satisfies its rule's precondition on the recorded subgraph, the
/// records nest as the recursion dictates, and every local result follows
/// from its children.
pub fn replay(graph: &Graph, groups: &[GroupSpec], config: &Conventions, verdict: &Verdict) -> Result<()> {
    let closed = prepare(graph, groups, config)?;
    let mut cursor = 0;
    let top = replay_node(graph, &closed, &verdict.trace, &mut cursor, graph.vertices())?;
    if cursor != verdict.trace.len() {
        return Err(Error::input("trace has trailing records"));
    }
    if Status::from(top) != verdict.status {
        return Err(Error::input("trace result disagrees with the status"));
    }
    if verdict.needed_facts.is_empty() != (verdict.status != Status::Unknown) {
        return Err(Error::input("needed facts must be listed exactly when the status is Unknown"));
    }
    Ok(())
}

fn replay_node(
    graph: &Graph,
    groups: &[GroupSpec],
    trace: &[RuleApplication],
    cursor: &mut usize,
    expected: VertexSet,
) -> Result<Truth> {
    let bad = |msg: &str| Error::input(format!("trace record {}: {msg}", *cursor));
    let rec = trace.get(*cursor).ok_or_else(|| bad("missing"))?;
    let set: VertexSet = rec.subgraph.iter().map(|n| graph.vertex(n)).collect::<Result<_>>()?;
    let witness: Vec<usize> = rec.witness.iter().map(|n| graph.vertex(n)).collect::<Result<_>>()?;
    if set != expected {
        return Err(bad("unexpected subgraph"));
    }
    let view = graph.view(set)?;
    let at = *cursor;
    *cursor += 1;
    let result = match rec.rule {
        Rule::Base0 => {
            if !set.is_empty() {
                return Err(Error::input(format!("trace record {at}: Base0 on a non-empty set")));
            }
            Truth::False
        }
        Rule::Base1 => {
            if set.len() != 1 || witness != [set.first().expect("one vertex")] {
                return Err(Error::input(format!("trace record {at}: Base1 needs a single vertex")));
            }
            groups[witness[0]].facts.properly_proximal
        }
        Rule::Rule3 => {
            let [v] = witness[..] else {
                return Err(Error::input(format!("trace record {at}: Rule3 needs one center")));
            };
            if set.len() < 2 || !view.centers().contains(&v) {
                return Err(Error::input(format!("trace record {at}: witness is not a center")));
            }
            let own = replay_node(graph, groups, trace, cursor, VertexSet::singleton(v))?;
            let rest = replay_node(graph, groups, trace, cursor, set.without(v))?;
            own & rest
        }
        Rule::Rule2 => {
            let [a, b] = witness[..] else {
                return Err(Error::input(format!("trace record {at}: Rule2 needs a pair")));
            };
            let is_pair = view.dominating_pairs().iter().any(|p| (p.first, p.second) == (a.min(b), a.max(b)));
            if set.len() < 2 || !is_pair {
                return Err(Error::input(format!("trace record {at}: witness is not a dominating pair")));
            }
            let free = replay_node(graph, groups, trace, cursor, VertexSet::from_iter([a, b]))?;
            let rest_set = set.without(a).without(b);
            let rest = if rest_set.is_empty() {
                Truth::True
            } else {
                replay_node(graph, groups, trace, cursor, rest_set)?
            };
            free & rest
        }
        Rule::FreeProductBase => {
            let [a, b] = witness[..] else {
                return Err(Error::input(format!("trace record {at}: FreeProductBase needs a pair")));
            };
            if set != VertexSet::from_iter([a, b]) || a == b {
                return Err(Error::input(format!("trace record {at}: pair does not match subgraph")));
            }
            Truth::from(groups[a].order().at_least(3) || groups[b].order().at_least(3))
        }
        Rule::Rule1 => {
            if set.len() < 2 || !view.centers().is_empty() || !view.dominating_pairs().is_empty() {
                return Err(Error::input(format!("trace record {at}: Rule1 precondition fails")));
            }
            Truth::True
        }
    };
    if result != trace[at].local_result {
        return Err(Error::input(format!("trace record {at}: recorded result does not replay")));
    }
    Ok(result)
}

/// Outcome of evaluating the hypotheses for absence of Cartan subalgebras.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanReport {
    /// `true` when the hypotheses hold, `false` when one fails, `unknown` otherwise.
    pub applicable: Truth,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub no_cartan: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c_rigid: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub needed_facts: Vec<NeededFact>,
    pub verdict: Status,
}

/// The group von Neumann algebra has no Cartan subalgebra (and the group is
/// C-rigid) when the graph product is properly proximal and every vertex group
/// is weakly amenable with Cowling-Haagerup constant 1.
pub fn cartan_report(graph: &Graph, groups: &[GroupSpec], config: &Conventions) -> Result<CartanReport> {
    let verdict = classify(graph, groups, config)?;
    let wa: Vec<(usize, Truth)> = groups
        .iter()
        .enumerate()
        .map(|(v, g)| (v, g.facts.weakly_amenable_cstar1))
        .collect();
    let base = CartanReport {
        applicable: Truth::Unknown,
        no_cartan: None,
        c_rigid: None,
        reason: None,
        needed_facts: Vec::new(),
        verdict: verdict.status,
    };
    if verdict.status == Status::NotProperlyProximal {
        return Ok(CartanReport {
            applicable: Truth::False,
            reason: Some("the graph product is not properly proximal".into()),
            ..base
        });
    }
    if let Some(&(v, _)) = wa.iter().find(|(_, t)| t.is_false()) {
        return Ok(CartanReport {
            applicable: Truth::False,
            reason: Some(format!(
                "vertex group at `{}` is not weakly amenable with constant 1",
                graph.name(v)
            )),
            ..base
        });
    }
    let mut needed: Vec<NeededFact> = verdict.needed_facts.clone();
    needed.extend(wa.iter().filter(|(_, t)| *t == Truth::Unknown).map(|&(v, _)| NeededFact {
        vertex: graph.name(v).to_string(),
        fact: FactName::WeaklyAmenableCstar1,
    }));
    if !needed.is_empty() {
        return Ok(CartanReport { applicable: Truth::Unknown, needed_facts: needed, ..base });
    }
    Ok(CartanReport { applicable: Truth::True, no_cartan: Some(true), c_rigid: Some(true), ..base })
}
