//! Splitting a graph product as an amalgamated free product at a vertex.
//!
//! At a vertex `v`, `Γ(G) = Γ_{star(v)} ∗_{Γ_link(v)} Γ_{V∖v}`. This module
//! computes the decomposition, right-coset transversals of the amalgamated
//! subgroup in each side, normal words `h·t1···tk`, the type of the first
//! syllable, and two bounded scans: escape/invariance along a sequence and
//! almost-malnormality of the amalgamated subgroup.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::VertexSet;
use crate::words::{CanonicalWord, GraphProduct, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Side::One => 1,
            Side::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<Side> {
        match n {
            1 => Ok(Side::One),
            2 => Ok(Side::Two),
            _ => Err(Error::input(format!("side must be 1 or 2, got {n}"))),
        }
    }
}

/// `G1 = Γ_{S_v ∪ {v}}`, `G2 = Γ_{V∖{v}}`, `H = Γ_{S_v}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmalgamDecomposition {
    pub vertex: usize,
    pub side1: VertexSet,
    pub side2: VertexSet,
    pub amalgamated: VertexSet,
    /// Set when `v` is adjacent to every other vertex, so that `G2 = H`.
    pub degenerate: bool,
}

impl AmalgamDecomposition {
    pub fn side(&self, side: Side) -> VertexSet {
        match side {
            Side::One => self.side1,
            Side::Two => self.side2,
        }
    }

    /// Splits the reduced form of `g` into maximal blocks lying in one side,
    /// alternating sides, each outside `H`. Letters of `H` stay with the block
    /// they sit in (leading ones join the first block).
    pub fn blocks(&self, g: &CanonicalWord) -> Vec<(Side, Vec<Letter>)> {
        let mut blocks: Vec<(Side, Vec<Letter>)> = Vec::new();
        let mut pending: Vec<Letter> = Vec::new();
        for &l in g.letters() {
            let side = if l.vertex == self.vertex {
                Some(Side::One)
            } else if self.amalgamated.contains(l.vertex) {
                None
            } else {
                Some(Side::Two)
            };
            match (side, blocks.last_mut()) {
                (None, Some((_, letters))) => letters.push(l),
                (None, None) => pending.push(l),
                (Some(s), Some((cur, letters))) if *cur == s => letters.push(l),
                (Some(s), _) => {
                    let mut letters = std::mem::take(&mut pending);
                    letters.push(l);
                    blocks.push((s, letters));
                }
            }
        }
        blocks
    }
}

pub fn decompose_at_vertex(ctx: &GraphProduct, vertex: usize) -> Result<AmalgamDecomposition> {
    let graph = ctx.graph();
    let link = graph.link(vertex)?;
    if graph.len() < 2 {
        return Err(Error::input("decomposition needs at least two vertices"));
    }
    let side2 = graph.vertices().without(vertex);
    Ok(AmalgamDecomposition {
        vertex,
        side1: link.with(vertex),
        side2,
        amalgamated: link,
        degenerate: side2 == link,
    })
}

/// Representatives of the right cosets `Hx` of the amalgamated subgroup in one
/// side, each the least canonical word of its coset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transversal {
    pub side: Side,
    pub max_len: usize,
    /// Sorted; the first entry is the identity.
    pub reps: Vec<CanonicalWord>,
    /// Whether the side subgroup is finite and was enumerated in full.
    pub complete: bool,
}

impl Transversal {
    /// Index of the coset `Hx` among the representatives.
    fn position(&self, ctx: &GraphProduct, dec: &AmalgamDecomposition, x: &Word) -> Option<usize> {
        self.reps
            .iter()
            .position(|t| ctx.mul(x, &ctx.inv(t)).vertices().is_subset(dec.amalgamated))
    }

    /// The representative of `Hx`, or a resource-bound error when the
    /// enumeration did not reach it.
    pub fn representative(
        &self,
        ctx: &GraphProduct,
        dec: &AmalgamDecomposition,
        x: &Word,
    ) -> Result<&CanonicalWord> {
        match self.position(ctx, dec, x) {
            Some(i) => Ok(&self.reps[i]),
            None if self.complete => Err(Error::Internal(format!(
                "coset H·{} missing from a complete transversal",
                ctx.display(x)
            ))),
            None => Err(Error::resource(format!(
                "coset H·{} of side {} lies beyond the transversal enumerated to length {}",
                ctx.display(x),
                self.side.number(),
                self.max_len
            ))),
        }
    }
}

pub fn coset_transversal(
    ctx: &GraphProduct,
    dec: &AmalgamDecomposition,
    side: Side,
    max_len: usize,
) -> Result<Transversal> {
    let set = dec.side(side);
    let elements = ctx.enumerate_ball_in(set, max_len)?;
    let mut t = Transversal { side, max_len, reps: Vec::new(), complete: false };
    for x in elements {
        if t.position(ctx, dec, &x).is_none() {
            t.reps.push(x);
        }
    }
    // A parabolic subgroup of finite vertex groups is finite iff its graph is
    // complete; its longest element then has one syllable per vertex.
    let view = ctx.graph().view(set)?;
    let finite = view.centers().len() == set.len();
    t.complete = finite && max_len >= set.len();
    Ok(t)
}

/// `h·t1···tk` with `h` in the amalgamated subgroup and the `t_j` alternating
/// non-trivial transversal representatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalWord {
    pub h: CanonicalWord,
    pub syllables: Vec<(Side, CanonicalWord)>,
}

impl NormalWord {
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// The product `h·t1···tk` as a plain word.
    pub fn expand(&self) -> Word {
        let mut w = self.h.word().clone();
        for (_, t) in &self.syllables {
            w = w.concat(t);
        }
        w
    }

    pub fn syllable_type(&self) -> SyllableType {
        match self.syllables.first() {
            None => SyllableType::Hpart,
            Some((Side::One, _)) => SyllableType::One,
            Some((Side::Two, _)) => SyllableType::Two,
        }
    }
}

/// Which side the first syllable of the normal word comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SyllableType {
    One,
    Two,
    Hpart,
}

/// Normal-word computation for one decomposition, with both transversals.
#[derive(Debug, Clone)]
pub struct NormalForms<'a> {
    ctx: &'a GraphProduct,
    dec: AmalgamDecomposition,
    transversals: [Transversal; 2],
}

impl<'a> NormalForms<'a> {
    pub fn new(ctx: &'a GraphProduct, dec: AmalgamDecomposition, max_len: usize) -> Result<Self> {
        let t1 = coset_transversal(ctx, &dec, Side::One, max_len)?;
        let t2 = coset_transversal(ctx, &dec, Side::Two, max_len)?;
        Ok(NormalForms { ctx, dec, transversals: [t1, t2] })
    }

    pub fn context(&self) -> &'a GraphProduct {
        self.ctx
    }

    pub fn decomposition(&self) -> &AmalgamDecomposition {
        &self.dec
    }

    pub fn transversal(&self, side: Side) -> &Transversal {
        &self.transversals[side as usize]
    }

    /// The normal word of `g`, computed right to left: each block absorbs the
    /// `H`-part carried from its right, is split as `h'·t`, and hands `h'` on.
    pub fn normal_word(&self, g: &Word) -> Result<NormalWord> {
        let ctx = self.ctx;
        let g = ctx.canonical(g)?;
        let blocks = self.dec.blocks(&g);
        let mut carry = if blocks.is_empty() { g.clone() } else { CanonicalWord::identity() };
        let mut syllables = Vec::with_capacity(blocks.len());
        for (side, letters) in blocks.into_iter().rev() {
            let x = ctx.mul(&Word(letters), &carry);
            let t = self.transversal(side).representative(ctx, &self.dec, &x)?.clone();
            if t.is_empty() {
                return Err(Error::Internal(format!("block {} lies in H", ctx.display(&x))));
            }
            carry = ctx.mul(&x, &ctx.inv(&t));
            if !carry.vertices().is_subset(self.dec.amalgamated) {
                return Err(Error::Internal("coset split left the amalgamated subgroup".into()));
            }
            syllables.push((side, t));
        }
        syllables.reverse();
        let nw = NormalWord { h: carry, syllables };
        if ctx.canon(&nw.expand()) != g {
            return Err(Error::Internal(format!("normal word of {} does not reconstruct", ctx.display(&g))));
        }
        Ok(nw)
    }

    pub fn syllable_type(&self, g: &Word) -> Result<SyllableType> {
        Ok(self.normal_word(g)?.syllable_type())
    }
}

/// A double coset `t1·Γ_H·t2` that traps a sequence element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trap {
    pub index: usize,
    pub left: CanonicalWord,
    pub right: CanonicalWord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscapeReport {
    pub max_len: usize,
    /// For each sequence index, the least trapping double coset if any.
    pub traps: Vec<Option<Trap>>,
    /// Least index from which no element is trapped; `len` if the last one is.
    pub escape_index: usize,
    /// The tail from `escape_index` on is non-empty.
    pub certified: bool,
}

/// Checks which sequence elements lie in a double coset `t1·Γ_H·t2` with
/// `t1, t2` of syllable length at most `max_len`.
pub fn escape_certificate(
    ctx: &GraphProduct,
    dec: &AmalgamDecomposition,
    seq: &[Word],
    max_len: usize,
) -> Result<EscapeReport> {
    let ball = ctx.enumerate_ball(max_len)?;
    let inverses: Vec<CanonicalWord> = ball.iter().map(|t| ctx.inv(t)).collect();
    let mut traps = Vec::with_capacity(seq.len());
    for (index, s) in seq.iter().enumerate() {
        let s = ctx.canonical(s)?;
        let mut found = None;
        'search: for (i, li) in inverses.iter().enumerate() {
            let left = ctx.mul(li, &s);
            for (j, rj) in inverses.iter().enumerate() {
                if ctx.mul(&left, rj).vertices().is_subset(dec.amalgamated) {
                    found = Some(Trap { index, left: ball[i].clone(), right: ball[j].clone() });
                    break 'search;
                }
            }
        }
        traps.push(found);
    }
    let escape_index = traps.iter().rposition(Option::is_some).map_or(0, |i| i + 1);
    Ok(EscapeReport { max_len, certified: escape_index < seq.len(), traps, escape_index })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceReport {
    pub escape: EscapeReport,
    pub types: Vec<SyllableType>,
    pub shifted_types: Vec<SyllableType>,
    /// `types[n] == shifted_types[n]`.
    pub agree: Vec<bool>,
    /// Least index from which the types agree to the end of the data.
    pub agree_from: Option<usize>,
}

/// Compares the first-syllable type of `seq[n]` and `seq[n]·g` along a
/// sequence, together with the escape certificate at scale `max_len`.
pub fn invariance_check(
    forms: &NormalForms<'_>,
    seq: &[Word],
    g: &Word,
    max_len: usize,
) -> Result<InvarianceReport> {
    let ctx = forms.context();
    let mut distinct = HashSet::new();
    for s in seq {
        if !distinct.insert(ctx.canonical(s)?) {
            return Err(Error::input(format!("sequence repeats the element {}", ctx.display(s))));
        }
    }
    let escape = escape_certificate(ctx, forms.decomposition(), seq, max_len)?;
    let mut types = Vec::with_capacity(seq.len());
    let mut shifted_types = Vec::with_capacity(seq.len());
    for s in seq {
        types.push(forms.syllable_type(s)?);
        shifted_types.push(forms.syllable_type(ctx.multiply(s, g)?.word())?);
    }
    let agree: Vec<bool> = types.iter().zip(&shifted_types).map(|(a, b)| a == b).collect();
    let agree_from = match agree.iter().rposition(|a| !a) {
        None => Some(0),
        Some(i) if i + 1 < agree.len() => Some(i + 1),
        Some(_) => None,
    };
    Ok(InvarianceReport { escape, types, shifted_types, agree, agree_from })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalnormalityReport {
    pub lg: usize,
    pub lh: usize,
    /// Number of `g` outside `H` that were scanned.
    pub scanned: usize,
    /// Largest `|{h ∈ H-ball : g h g⁻¹ ∈ H}|` seen.
    pub max_count: usize,
    /// Least `g` attaining `max_count`.
    pub witness: Option<CanonicalWord>,
}

/// Bounded almost-malnormality scan of the amalgamated subgroup.
pub fn malnormality_scan(
    ctx: &GraphProduct,
    dec: &AmalgamDecomposition,
    lg: usize,
    lh: usize,
) -> Result<MalnormalityReport> {
    if dec.degenerate {
        return Err(Error::input(
            "degenerate decomposition: the vertex is adjacent to every other vertex, so G2 = H",
        ));
    }
    let h_ball = ctx.enumerate_ball_in(dec.amalgamated, lh)?;
    let mut report = MalnormalityReport { lg, lh, scanned: 0, max_count: 0, witness: None };
    for g in ctx.enumerate_ball(lg)? {
        if g.vertices().is_subset(dec.amalgamated) {
            continue;
        }
        report.scanned += 1;
        let gi = ctx.inv(&g);
        let count = h_ball
            .iter()
            .filter(|h| ctx.mul3(&g, h, &gi).vertices().is_subset(dec.amalgamated))
            .count();
        if count > report.max_count {
            report.max_count = count;
            report.witness = Some(g);
        }
    }
    Ok(report)
}
