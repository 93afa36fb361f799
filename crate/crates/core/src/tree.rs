//! Finite balls in the Bass-Serre tree of an amalgam decomposition, the action
//! of the group on them, and a bounded north-south dynamics experiment.
//!
//! Vertices are the left cosets `gG1` and `gG2`, edges the cosets `gH`; `gG_i`
//! and `gG_j` are joined by `gH` when `i != j`. Every coset is stored by its
//! shortest representative, so coset equality is word equality.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::amalgam::{escape_certificate, AmalgamDecomposition, EscapeReport, Side};
use crate::error::{Error, Result};
use crate::graphs::VertexSet;
use crate::words::{CanonicalWord, GraphProduct, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeVertex {
    /// Shortest element of the coset.
    pub rep: CanonicalWord,
    pub side: Side,
    pub depth: usize,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeEdge {
    /// Shortest element of the `H`-coset labelling the edge.
    pub rep: CanonicalWord,
    /// `(parent, child)`.
    pub endpoints: (usize, usize),
}

/// A point of the ball, or the ends of the tree lying beyond a vertex on the
/// boundary sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Point {
    Vertex(usize),
    End(usize),
}

/// The ball of radius `radius` around the base vertex `G1`.
#[derive(Debug, Clone)]
pub struct TreeBall<'a> {
    ctx: &'a GraphProduct,
    dec: AmalgamDecomposition,
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<TreeEdge>,
    pub base: usize,
    pub radius: usize,
    pub max_len: usize,
    /// Left-coset representatives of `H` in each side, identity first.
    pub left_transversals: [Vec<CanonicalWord>; 2],
    index: HashMap<(Side, CanonicalWord), usize>,
    /// Edge index ending at each non-base vertex.
    parent_edge: Vec<Option<usize>>,
}

fn side_set(dec: &AmalgamDecomposition, side: Side) -> VertexSet {
    dec.side(side)
}

/// Left-coset representatives of `H` inside one side, or a resource-bound
/// error when the enumeration at `max_len` may have missed cosets.
fn left_transversal(
    ctx: &GraphProduct,
    dec: &AmalgamDecomposition,
    side: Side,
    max_len: usize,
) -> Result<Vec<CanonicalWord>> {
    let set = side_set(dec, side);
    // `[G_side : H]` is finite iff every vertex outside H is joined to the rest
    // of the side; shortest representatives then use each such vertex once.
    let outside = set.difference(dec.amalgamated);
    let graph = ctx.graph();
    let finite = outside.iter().all(|c| set.without(c).iter().all(|u| graph.adjacent(c, u)));
    if !finite || max_len < outside.len() {
        return Err(Error::resource(format!(
            "index of H in side {} is not known to be finite at word length {max_len}; \
             the tree has vertices of unbounded degree",
            side.number()
        )));
    }
    let elements = ctx.enumerate_ball_in(set, max_len.min(set.len()))?;
    let mut reps: Vec<CanonicalWord> = Vec::new();
    for x in &elements {
        let r = ctx.left_rep(x, dec.amalgamated);
        if !reps.contains(&r) {
            reps.push(r);
        }
    }
    reps.sort();
    Ok(reps)
}

/// Builds the ball of radius `radius` around `G1` by breadth-first search.
/// Coset representatives longer than `max_len` syllables are a resource-bound error.
pub fn build_ball<'a>(
    ctx: &'a GraphProduct,
    dec: &AmalgamDecomposition,
    radius: usize,
    max_len: usize,
) -> Result<TreeBall<'a>> {
    let transversal_len = max_len.max(ctx.graph().len());
    let left_transversals = [
        left_transversal(ctx, dec, Side::One, transversal_len)?,
        left_transversal(ctx, dec, Side::Two, transversal_len)?,
    ];
    let mut ball = TreeBall {
        ctx,
        dec: *dec,
        vertices: vec![TreeVertex { rep: CanonicalWord::identity(), side: Side::One, depth: 0, parent: None }],
        edges: Vec::new(),
        base: 0,
        radius,
        max_len,
        left_transversals,
        index: HashMap::new(),
        parent_edge: vec![None],
    };
    ball.index.insert((Side::One, CanonicalWord::identity()), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let TreeVertex { rep, side, depth, parent } = ball.vertices[x].clone();
        if depth == radius {
            continue;
        }
        let other = side.other();
        for t in ball.left_transversals[side as usize].clone() {
            let gt = ctx.mul(&rep, &t);
            let key = ctx.left_rep(&gt, side_set(dec, other));
            if let Some(&y) = ball.index.get(&(other, key.clone())) {
                if Some(y) == parent {
                    continue;
                }
                return Err(Error::Internal(format!(
                    "cycle in the coset graph at {}",
                    ctx.display(&key)
                )));
            }
            if key.len() > max_len {
                return Err(Error::resource(format!(
                    "coset representative {} exceeds the word-length budget {max_len}; increase it",
                    ctx.display(&key)
                )));
            }
            let y = ball.vertices.len();
            ball.vertices.push(TreeVertex { rep: key.clone(), side: other, depth: depth + 1, parent: Some(x) });
            ball.index.insert((other, key), y);
            ball.edges.push(TreeEdge { rep: ctx.left_rep(&gt, dec.amalgamated), endpoints: (x, y) });
            ball.parent_edge.push(Some(ball.edges.len() - 1));
            queue.push_back(y);
        }
    }
    ball.check_invariants()?;
    Ok(ball)
}

impl<'a> TreeBall<'a> {
    pub fn context(&self) -> &'a GraphProduct {
        self.ctx
    }

    pub fn decomposition(&self) -> &AmalgamDecomposition {
        &self.dec
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `[G_i : H]`, the degree of every side-`i` vertex of the full tree.
    pub fn index(&self, side: Side) -> usize {
        self.left_transversals[side as usize].len()
    }

    pub fn degree(&self, x: usize) -> usize {
        let children = self.edges.iter().filter(|e| e.endpoints.0 == x).count();
        children + usize::from(self.vertices[x].parent.is_some())
    }

    pub fn depth_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.radius + 1];
        for v in &self.vertices {
            counts[v.depth] += 1;
        }
        counts
    }

    fn check_invariants(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.edges.len() + 1 != n {
            return Err(Error::Internal("ball is not a tree: |E| != |V| - 1".into()));
        }
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            let p = v.parent.ok_or_else(|| Error::Internal("non-base vertex without parent".into()))?;
            let e = self.parent_edge[i].ok_or_else(|| Error::Internal("missing parent edge".into()))?;
            if self.edges[e].endpoints != (p, i) || self.vertices[p].depth + 1 != v.depth {
                return Err(Error::Internal("parent edge does not match depths".into()));
            }
            if self.vertices[p].side == v.side {
                return Err(Error::Internal("edge joins two vertices of one side".into()));
            }
        }
        if self.index.len() != n {
            return Err(Error::Internal("two vertices share a coset".into()));
        }
        Ok(())
    }

    fn check_vertex(&self, x: usize) -> Result<()> {
        if x < self.vertices.len() {
            Ok(())
        } else {
            Err(Error::OutOfBall(format!("vertex index {x}")))
        }
    }

    /// Looks up the vertex of the coset `g·G_side`.
    pub fn find(&self, g: &Word, side: Side) -> Result<Option<usize>> {
        let key = self.ctx.left_coset_rep(g, side_set(&self.dec, side))?;
        Ok(self.index.get(&(side, key)).copied())
    }

    /// The image of vertex `x` under left multiplication by `g`.
    pub fn act(&self, g: &Word, x: usize) -> Result<usize> {
        self.check_vertex(x)?;
        let v = &self.vertices[x];
        let image = self.ctx.multiply(g, &v.rep)?;
        self.find(&image, v.side)?.ok_or_else(|| {
            Error::OutOfBall(format!(
                "{}·G{} is beyond radius {}",
                self.ctx.display(&image),
                v.side.number(),
                self.radius
            ))
        })
    }

    fn ancestors(&self, mut x: usize) -> Vec<usize> {
        let mut out = vec![x];
        while let Some(p) = self.vertices[x].parent {
            out.push(p);
            x = p;
        }
        out
    }

    fn meet(&self, mut x: usize, mut y: usize) -> usize {
        while self.vertices[x].depth > self.vertices[y].depth {
            x = self.vertices[x].parent.expect("deeper than base");
        }
        while self.vertices[y].depth > self.vertices[x].depth {
            y = self.vertices[y].parent.expect("deeper than base");
        }
        while x != y {
            x = self.vertices[x].parent.expect("below the meet");
            y = self.vertices[y].parent.expect("below the meet");
        }
        x
    }

    pub fn distance(&self, x: usize, y: usize) -> Result<usize> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        let m = self.meet(x, y);
        Ok(self.vertices[x].depth + self.vertices[y].depth - 2 * self.vertices[m].depth)
    }

    /// Vertices of the geodesic from `x` to `y`, both included.
    pub fn geodesic(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        let m = self.meet(x, y);
        let up: Vec<usize> = self.ancestors(x).into_iter().take_while(|&v| v != m).collect();
        let mut down: Vec<usize> = self.ancestors(y).into_iter().take_while(|&v| v != m).collect();
        down.reverse();
        let mut path = up;
        path.push(m);
        path.extend(down);
        Ok(path)
    }

    /// Edge indices on the geodesic from `x` to `y`.
    pub fn geodesic_edges(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        let path = self.geodesic(x, y)?;
        Ok(path
            .windows(2)
            .map(|w| {
                let child = if self.vertices[w[0]].parent == Some(w[1]) { w[0] } else { w[1] };
                self.parent_edge[child].expect("non-base vertex")
            })
            .collect())
    }

    /// Distance from `o` to the center of the tripod spanned by `x`, `y`, `o`.
    pub fn gromov_product(&self, x: usize, y: usize, o: usize) -> Result<usize> {
        let (dx, dy, dxy) = (self.distance(o, x)?, self.distance(o, y)?, self.distance(x, y)?);
        Ok((dx + dy - dxy) / 2)
    }

    fn point_vertex(&self, p: Point) -> Result<usize> {
        match p {
            Point::Vertex(x) => {
                self.check_vertex(x)?;
                Ok(x)
            }
            Point::End(x) => {
                self.check_vertex(x)?;
                if self.vertices[x].depth != self.radius {
                    return Err(Error::input(format!(
                        "end proxy {x} is at depth {}, not on the boundary sphere of radius {}",
                        self.vertices[x].depth, self.radius
                    )));
                }
                Ok(x)
            }
        }
    }

    /// Whether `y` lies in the basic open set `U(x, F)`: `y = x`, or the
    /// geodesic from `x` to `y` avoids every edge in `forbidden`.
    ///
    /// Geodesics to an end leave the ball through its proxy vertex and cross no
    /// ball edge afterwards.
    pub fn u_membership(&self, x: Point, forbidden: &[usize], y: Point) -> Result<bool> {
        if let Some(&e) = forbidden.iter().find(|&&e| e >= self.edges.len()) {
            return Err(Error::OutOfBall(format!("edge index {e}")));
        }
        let (vx, vy) = (self.point_vertex(x)?, self.point_vertex(y)?);
        if x == y {
            return Ok(true);
        }
        let path = self.geodesic_edges(vx, vy)?;
        Ok(!path.iter().any(|e| forbidden.contains(e)))
    }

    /// Graphviz rendering: side-1 vertices as circles, side-2 as boxes, edges
    /// labelled by their `H`-coset representative.
    pub fn to_dot(&self) -> String {
        let ctx = self.ctx;
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| {
            let (va, vb) = (&self.vertices[a], &self.vertices[b]);
            (va.depth, va.side, &va.rep).cmp(&(vb.depth, vb.side, &vb.rep))
        });
        let mut out = String::from("graph bass_serre {\n");
        for &i in &order {
            let v = &self.vertices[i];
            let shape = match v.side {
                Side::One => "circle",
                Side::Two => "box",
            };
            let _ = writeln!(
                out,
                "  n{i} [label=\"{} G{}\", shape={shape}];",
                ctx.display(&v.rep),
                v.side.number()
            );
        }
        for &i in order.iter().skip(1) {
            let e = &self.edges[self.parent_edge[i].expect("non-base")];
            let _ = writeln!(
                out,
                "  n{} -- n{} [label=\"{} H\"];",
                e.endpoints.0,
                e.endpoints.1,
                ctx.display(&e.rep)
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Which geodesic from the base carries the edge `F` of `U(a, F)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSide {
    /// `F` lies towards the repeller: `U(a, F)` is everything but a repeller-side half-tree.
    Repeller,
    /// `F` lies towards the attractor: `U(a, F)` is the half-tree beyond it.
    Attractor,
}

/// Tunables for [`dynamics_experiment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DynamicsConfig {
    /// Scale of the escape certificate.
    pub escape_len: usize,
    /// Depth of the far endpoint of the edge `F`.
    pub neighbourhood_depth: usize,
    pub cut: CutSide,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig { escape_len: 2, neighbourhood_depth: 2, cut: CutSide::Repeller }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitPattern {
    /// `seq[n]·base` moves off to the boundary along a ray.
    AxisTranslation,
    /// `seq[n]·base` stays within bounded distance of the base.
    BoundedOrbit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackedPoint {
    pub vertex: usize,
    pub in_repeller_half: bool,
    /// Least sequence index from which every image lies in `U(a, F)`.
    pub converged_from: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct DynamicsReport {
    pub tracked_radius: usize,
    pub ball_radius: usize,
    pub escape: EscapeReport,
    pub pattern: OrbitPattern,
    pub attractor: usize,
    pub repeller: usize,
    /// The edge set `F` of the attractor neighbourhood `U(a, F)`.
    pub neighbourhood: Vec<usize>,
    pub tracked: Vec<TrackedPoint>,
    pub converged_fraction: f64,
    /// Fraction converging among tracked points outside the repeller half-tree.
    pub converged_outside_repeller: f64,
}

impl DynamicsReport {
    /// Tracked points that never settle in `U(a, F)` within the data.
    pub fn exceptions(&self) -> impl Iterator<Item = &TrackedPoint> {
        self.tracked.iter().filter(|t| t.converged_from.is_none())
    }
}

/// Deepest vertex shared by the geodesics from the base to all `targets`.
fn common_prefix(ball: &TreeBall<'_>, targets: &[usize]) -> usize {
    let mut it = targets.iter();
    let Some(&first) = it.next() else { return ball.base };
    it.fold(first, |acc, &t| ball.meet(acc, t))
}

/// Tracks the vertices of the ball of radius `radius` under `seq` and reports
/// whether their images settle near an attractor, away from the repeller side.
///
/// The sequence must pass the escape certificate relative to the amalgamated
/// subgroup at scale `config.escape_len`.
pub fn dynamics_experiment<'a>(
    ctx: &'a GraphProduct,
    dec: &AmalgamDecomposition,
    seq: &[Word],
    radius: usize,
    config: DynamicsConfig,
) -> Result<(TreeBall<'a>, DynamicsReport)> {
    if seq.is_empty() {
        return Err(Error::input("empty sequence"));
    }
    let escape = escape_certificate(ctx, dec, seq, config.escape_len)?;
    if !escape.certified {
        let detail = escape.traps.iter().rev().flatten().next().map(|t| {
            format!(
                "; element {} lies in {}·H·{}",
                t.index,
                ctx.display(&t.left),
                ctx.display(&t.right)
            )
        });
        return Err(Error::input(format!(
            "sequence is not certified to escape the edge stabilisers at scale {}{}",
            config.escape_len,
            detail.unwrap_or_default()
        )));
    }
    // Moving the base costs two steps per side-2 block of the element.
    let mut reach = 0;
    for s in seq {
        for w in [ctx.canonical(s)?, ctx.invert(s)?] {
            let steps = 2 * dec.blocks(&w).iter().filter(|(side, _)| *side == Side::Two).count();
            reach = reach.max(steps);
        }
    }
    let ball_radius = radius + reach;
    let longest = seq.iter().map(Word::len).max().unwrap_or(0);
    let ball = build_ball(ctx, dec, ball_radius, ball_radius + longest + ctx.graph().len())?;

    let forward: Vec<usize> = seq.iter().map(|s| ball.act(s, ball.base)).collect::<Result<_>>()?;
    let backward: Vec<usize> = seq
        .iter()
        .map(|s| ball.act(ctx.invert(s)?.word(), ball.base))
        .collect::<Result<_>>()?;
    let late = seq.len() / 2;
    let attractor = common_prefix(&ball, &forward[late..]);
    let repeller = common_prefix(&ball, &backward[late..]);

    let early_max = forward[..late].iter().map(|&x| ball.vertices[x].depth).max().unwrap_or(0);
    let late_max = forward[late..].iter().map(|&x| ball.vertices[x].depth).max().unwrap_or(0);
    let pattern = if late_max > early_max { OrbitPattern::AxisTranslation } else { OrbitPattern::BoundedOrbit };

    let path = ball.geodesic(
        ball.base,
        match config.cut {
            CutSide::Repeller => repeller,
            CutSide::Attractor => attractor,
        },
    )?;
    let cut = config.neighbourhood_depth.min(path.len() - 1);
    let neighbourhood: Vec<usize> = if cut == 0 {
        Vec::new()
    } else {
        vec![ball.parent_edge[path[cut]].expect("non-base vertex")]
    };
    let repeller_root = ball.geodesic(ball.base, repeller)?.get(1).copied();

    let mut tracked = Vec::new();
    for (x, v) in ball.vertices.iter().enumerate() {
        if v.depth > radius {
            continue;
        }
        let mut converged_from = Some(0);
        for (n, s) in seq.iter().enumerate() {
            let image = ball.act(s, x)?;
            if !ball.u_membership(Point::Vertex(attractor), &neighbourhood, Point::Vertex(image))? {
                converged_from = (n + 1 < seq.len()).then_some(n + 1);
            }
        }
        let in_repeller_half = repeller_root.is_some_and(|r| ball.ancestors(x).contains(&r));
        tracked.push(TrackedPoint { vertex: x, in_repeller_half, converged_from });
    }
    let fraction = |pts: Vec<&TrackedPoint>| {
        if pts.is_empty() {
            1.0
        } else {
            pts.iter().filter(|t| t.converged_from.is_some()).count() as f64 / pts.len() as f64
        }
    };
    let converged_fraction = fraction(tracked.iter().collect());
    let converged_outside_repeller = fraction(tracked.iter().filter(|t| !t.in_repeller_half).collect());
    let report = DynamicsReport {
        tracked_radius: radius,
        ball_radius,
        escape,
        pattern,
        attractor,
        repeller,
        neighbourhood,
        tracked,
        converged_fraction,
        converged_outside_repeller,
    };
    Ok((ball, report))
}
