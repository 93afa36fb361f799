//! Serializable views of library results. Words use the `vertex:element`
//! grammar and vertex sets are lists of names, so every view is plain data.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use graphprod::amalgam::{
    AmalgamDecomposition, EscapeReport, InvarianceReport, MalnormalityReport, NormalWord, Side,
    SyllableType, Transversal,
};
use graphprod::classify::{CartanReport, Verdict};
use graphprod::tree::{DynamicsReport, OrbitPattern, TreeBall};
use graphprod::words::{GraphProduct, IntersectionOutcome, IntersectionReport, Word};

fn w(ctx: &GraphProduct, word: &Word) -> String {
    ctx.format_word(word)
}

fn shown(word: &str) -> &str {
    if word.is_empty() {
        "e"
    } else {
        word
    }
}

fn set(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

/// Rendering shared by all views.
pub trait Render: Serialize {
    fn text(&self) -> String;
}

impl Render for Verdict {
    fn text(&self) -> String {
        let mut out = format!("status: {}\n", self.status);
        for f in &self.needed_facts {
            let _ = writeln!(out, "needed: {} {}", f.vertex, f.fact);
        }
        out
    }
}

/// A verdict with its derivation spelled out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TracedVerdict(pub Verdict);

impl Render for TracedVerdict {
    fn text(&self) -> String {
        let mut out = self.0.text();
        for step in &self.0.trace {
            let rule = serde_json::to_value(step.rule).expect("plain enum");
            let _ = writeln!(
                out,
                "  {:<15} witness {:<9} on {} -> {}",
                rule.as_str().unwrap_or_default(),
                set(&step.witness),
                set(&step.subgraph),
                step.local_result
            );
        }
        out
    }
}

impl Render for CartanReport {
    fn text(&self) -> String {
        let mut out = format!("applicable: {}\nverdict: {}\n", self.applicable, self.verdict);
        if let Some(b) = self.no_cartan {
            let _ = writeln!(out, "no_cartan: {b}");
        }
        if let Some(b) = self.c_rigid {
            let _ = writeln!(out, "c_rigid: {b}");
        }
        if let Some(r) = &self.reason {
            let _ = writeln!(out, "reason: {r}");
        }
        for f in &self.needed_facts {
            let _ = writeln!(out, "needed: {} {}", f.vertex, f.fact);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordView {
    pub word: String,
    pub length: usize,
}

impl WordView {
    pub fn new(ctx: &GraphProduct, word: &Word) -> Self {
        WordView { word: w(ctx, word), length: word.len() }
    }
}

impl Render for WordView {
    fn text(&self) -> String {
        format!("{}\n", shown(&self.word))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualityView {
    pub equal: bool,
}

impl Render for EqualityView {
    fn text(&self) -> String {
        format!("{}\n", self.equal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallView {
    #[serde(rename = "L")]
    pub max_len: usize,
    pub within: Vec<String>,
    pub count: usize,
    pub elements: Vec<String>,
}

impl Render for BallView {
    fn text(&self) -> String {
        let mut out = format!("count: {}\n", self.count);
        for e in &self.elements {
            let _ = writeln!(out, "{}", shown(e));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalView {
    pub side: u8,
    #[serde(rename = "L")]
    pub max_len: usize,
    pub complete: bool,
    pub reps: Vec<String>,
}

impl TransversalView {
    pub fn new(ctx: &GraphProduct, t: &Transversal) -> Self {
        TransversalView {
            side: t.side.number(),
            max_len: t.max_len,
            complete: t.complete,
            reps: t.reps.iter().map(|r| w(ctx, r)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionView {
    pub vertex: String,
    pub side1: Vec<String>,
    pub side2: Vec<String>,
    pub amalgamated: Vec<String>,
    pub degenerate: bool,
    pub transversals: Vec<TransversalView>,
}

impl DecompositionView {
    pub fn new(ctx: &GraphProduct, dec: &AmalgamDecomposition, transversals: &[Transversal]) -> Self {
        let g = ctx.graph();
        DecompositionView {
            vertex: g.name(dec.vertex).to_string(),
            side1: g.set_names(dec.side1),
            side2: g.set_names(dec.side2),
            amalgamated: g.set_names(dec.amalgamated),
            degenerate: dec.degenerate,
            transversals: transversals.iter().map(|t| TransversalView::new(ctx, t)).collect(),
        }
    }
}

impl Render for DecompositionView {
    fn text(&self) -> String {
        let mut out = format!(
            "vertex: {}\nG1: {}\nG2: {}\nH: {}\n",
            self.vertex,
            set(&self.side1),
            set(&self.side2),
            set(&self.amalgamated)
        );
        if self.degenerate {
            out.push_str("degenerate: G2 = H\n");
        }
        for t in &self.transversals {
            let reps: Vec<&str> = t.reps.iter().map(|r| shown(r)).collect();
            let _ = writeln!(
                out,
                "H\\G{} ({}, L={}): {}",
                t.side,
                if t.complete { "complete" } else { "partial" },
                t.max_len,
                reps.join(" | ")
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyllableView {
    pub side: u8,
    pub word: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalWordView {
    pub word: String,
    pub h: String,
    pub syllables: Vec<SyllableView>,
    pub syllable_type: SyllableType,
}

impl NormalWordView {
    pub fn new(ctx: &GraphProduct, word: &Word, nw: &NormalWord) -> Self {
        NormalWordView {
            word: w(ctx, word),
            h: w(ctx, &nw.h),
            syllables: nw
                .syllables
                .iter()
                .map(|(side, t)| SyllableView { side: side.number(), word: w(ctx, t) })
                .collect(),
            syllable_type: nw.syllable_type(),
        }
    }
}

impl Render for NormalWordView {
    fn text(&self) -> String {
        let mut parts = vec![format!("[{}]", shown(&self.h))];
        parts.extend(self.syllables.iter().map(|s| format!("({})_{}", s.word, s.side)));
        let ty = serde_json::to_value(self.syllable_type).expect("plain enum");
        format!("{}\ntype: {}\n", parts.join(" "), ty.as_str().unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionView {
    pub t1: Vec<String>,
    pub t2: Vec<String>,
    pub g: String,
    pub h: String,
    #[serde(rename = "L")]
    pub max_len: usize,
    pub family_size: usize,
    pub checked: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<CounterexampleView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleView {
    pub x: String,
    pub w: String,
}

impl IntersectionView {
    pub fn new(ctx: &GraphProduct, g: &Word, h: &Word, r: &IntersectionReport) -> Self {
        let graph = ctx.graph();
        let counterexample = match &r.outcome {
            IntersectionOutcome::Pass => None,
            IntersectionOutcome::Counterexample { x, w: cw } => {
                Some(CounterexampleView { x: w(ctx, x), w: w(ctx, cw) })
            }
        };
        IntersectionView {
            t1: graph.set_names(r.t1),
            t2: graph.set_names(r.t2),
            g: w(ctx, g),
            h: w(ctx, h),
            max_len: r.max_len,
            family_size: r.family_size,
            checked: r.checked,
            pass: counterexample.is_none(),
            counterexample,
        }
    }
}

impl Render for IntersectionView {
    fn text(&self) -> String {
        match &self.counterexample {
            None => "pass\n".to_string(),
            Some(c) => format!("fail\nx: {}\nw: {}\n", shown(&c.x), shown(&c.w)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MalnormalityView {
    pub vertex: String,
    #[serde(rename = "L_g")]
    pub lg: usize,
    #[serde(rename = "L_h")]
    pub lh: usize,
    pub scanned: usize,
    pub max_count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

impl MalnormalityView {
    pub fn new(ctx: &GraphProduct, vertex: usize, r: &MalnormalityReport) -> Self {
        MalnormalityView {
            vertex: ctx.graph().name(vertex).to_string(),
            lg: r.lg,
            lh: r.lh,
            scanned: r.scanned,
            max_count: r.max_count,
            witness: r.witness.as_ref().map(|g| w(ctx, g)),
        }
    }
}

impl Render for MalnormalityView {
    fn text(&self) -> String {
        let mut out = format!(
            "scanned: {} (L_g={}, L_h={})\nmax overlap |gHg^-1 & H|: {}\n",
            self.scanned, self.lg, self.lh, self.max_count
        );
        if let Some(g) = &self.witness {
            let _ = writeln!(out, "witness: {g}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapView {
    pub index: usize,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeView {
    #[serde(rename = "L")]
    pub max_len: usize,
    pub certified: bool,
    pub escape_index: usize,
    pub traps: Vec<TrapView>,
}

impl EscapeView {
    pub fn new(ctx: &GraphProduct, r: &EscapeReport) -> Self {
        EscapeView {
            max_len: r.max_len,
            certified: r.certified,
            escape_index: r.escape_index,
            traps: r
                .traps
                .iter()
                .flatten()
                .map(|t| TrapView { index: t.index, left: w(ctx, &t.left), right: w(ctx, &t.right) })
                .collect(),
        }
    }

    fn text(&self) -> String {
        let mut out = format!(
            "escape (L={}): {} from index {}\n",
            self.max_len,
            if self.certified { "certified" } else { "not certified" },
            self.escape_index
        );
        for t in &self.traps {
            let _ = writeln!(out, "  trapped {}: {} H {}", t.index, shown(&t.left), shown(&t.right));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceView {
    pub escape: EscapeView,
    pub types: Vec<SyllableType>,
    pub shifted_types: Vec<SyllableType>,
    pub agree_from: Option<usize>,
}

impl InvarianceView {
    pub fn new(ctx: &GraphProduct, r: &InvarianceReport) -> Self {
        InvarianceView {
            escape: EscapeView::new(ctx, &r.escape),
            types: r.types.clone(),
            shifted_types: r.shifted_types.clone(),
            agree_from: r.agree_from,
        }
    }
}

impl Render for InvarianceView {
    fn text(&self) -> String {
        let mut out = self.escape.text();
        for (i, (a, b)) in self.types.iter().zip(&self.shifted_types).enumerate() {
            let _ = writeln!(out, "{i}: {a:?} {b:?}{}", if a == b { "" } else { "  differ" });
        }
        match self.agree_from {
            Some(n) => {
                let _ = writeln!(out, "agree from index {n}");
            }
            None => out.push_str("no agreeing tail\n"),
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeVertexView {
    pub id: usize,
    pub coset: String,
    pub side: u8,
    pub depth: usize,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdgeView {
    pub coset: String,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeView {
    pub vertex: String,
    pub radius: usize,
    #[serde(rename = "L")]
    pub max_len: usize,
    pub index: [usize; 2],
    pub depth_counts: Vec<usize>,
    pub vertices: Vec<TreeVertexView>,
    pub edges: Vec<TreeEdgeView>,
}

impl TreeView {
    pub fn new(ball: &TreeBall<'_>) -> Self {
        let ctx = ball.context();
        TreeView {
            vertex: ctx.graph().name(ball.decomposition().vertex).to_string(),
            radius: ball.radius,
            max_len: ball.max_len,
            index: [ball.index(Side::One), ball.index(Side::Two)],
            depth_counts: ball.depth_counts(),
            vertices: ball
                .vertices
                .iter()
                .enumerate()
                .map(|(id, v)| TreeVertexView {
                    id,
                    coset: w(ctx, &v.rep),
                    side: v.side.number(),
                    depth: v.depth,
                    parent: v.parent,
                })
                .collect(),
            edges: ball
                .edges
                .iter()
                .map(|e| TreeEdgeView { coset: w(ctx, &e.rep), from: e.endpoints.0, to: e.endpoints.1 })
                .collect(),
        }
    }
}

impl Render for TreeView {
    fn text(&self) -> String {
        let counts: Vec<String> = self.depth_counts.iter().map(|c| c.to_string()).collect();
        format!(
            "indices: [G1:H]={} [G2:H]={}\nvertices: {} edges: {}\nper depth: {}\n",
            self.index[0],
            self.index[1],
            self.vertices.len(),
            self.edges.len(),
            counts.join(" ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsView {
    pub radius: usize,
    pub ball_radius: usize,
    pub escape: EscapeView,
    pub pattern: String,
    pub attractor: String,
    pub repeller: String,
    pub neighbourhood: Vec<String>,
    pub tracked: usize,
    pub converged_fraction: f64,
    pub converged_outside_repeller: f64,
    /// Tracked vertices outside the repeller half-tree that never settle.
    pub exceptions: Vec<String>,
}

impl DynamicsView {
    pub fn new(ball: &TreeBall<'_>, r: &DynamicsReport) -> Self {
        let ctx = ball.context();
        let coset = |x: usize| {
            let v = &ball.vertices[x];
            format!("{} G{}", shown(&w(ctx, &v.rep)), v.side.number())
        };
        DynamicsView {
            radius: r.tracked_radius,
            ball_radius: r.ball_radius,
            escape: EscapeView::new(ctx, &r.escape),
            pattern: match r.pattern {
                OrbitPattern::AxisTranslation => "axis_translation".into(),
                OrbitPattern::BoundedOrbit => "bounded_orbit".into(),
            },
            attractor: coset(r.attractor),
            repeller: coset(r.repeller),
            neighbourhood: r
                .neighbourhood
                .iter()
                .map(|&e| format!("{} H", shown(&w(ctx, &ball.edges[e].rep))))
                .collect(),
            tracked: r.tracked.len(),
            converged_fraction: r.converged_fraction,
            converged_outside_repeller: r.converged_outside_repeller,
            exceptions: r.exceptions().filter(|t| !t.in_repeller_half).map(|t| coset(t.vertex)).collect(),
        }
    }
}

impl Render for DynamicsView {
    fn text(&self) -> String {
        let mut out = self.escape.text();
        let _ = writeln!(
            out,
            "pattern: {}\nattractor: {}\nrepeller: {}\nneighbourhood: U(a, {{{}}})",
            self.pattern,
            self.attractor,
            self.repeller,
            self.neighbourhood.join(", ")
        );
        let _ = writeln!(
            out,
            "tracked: {} (ball radius {})\nconverged: {:.3} overall, {:.3} outside the repeller half-tree",
            self.tracked, self.ball_radius, self.converged_fraction, self.converged_outside_repeller
        );
        for e in &self.exceptions {
            let _ = writeln!(out, "  no convergence: {e}");
        }
        out
    }
}
