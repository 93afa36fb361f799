//! The word engine for graph products.
//!
//! A [`GraphProduct`] couples a graph with one vertex group per vertex. Words
//! are sequences of syllables `(vertex, element)`; [`GraphProduct::reduce`]
//! brings a word into reduced form (no two syllables of one vertex can meet
//! after commuting moves) and [`GraphProduct::canonical`] picks the unique
//! lexicographically least representative of its shuffle class. Two words
//! define the same group element iff their canonical forms coincide.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::graphs::{Graph, VertexSet};
use crate::groups::{Element, GroupSpec, Order};

/// One syllable: a non-identity element of the vertex group at `vertex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub vertex: usize,
    pub element: Element,
}

impl Letter {
    pub fn new(vertex: usize, element: u32) -> Self {
        Letter { vertex, element: Element(element) }
    }
}

/// A finite sequence of letters; the empty word is the identity.
///
/// Words are ordered shortlex: shorter first, then letter by letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Vertices occurring in the word (as written, not reduced).
    pub fn vertices(&self) -> VertexSet {
        self.0.iter().map(|l| l.vertex).collect()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A reduced word in lexicographic normal form: the unique representative of
/// its group element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CanonicalWord(Word);

impl CanonicalWord {
    pub fn identity() -> Self {
        CanonicalWord(Word::identity())
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }
}

impl Deref for CanonicalWord {
    type Target = Word;
    fn deref(&self) -> &Word {
        &self.0
    }
}

impl From<CanonicalWord> for Word {
    fn from(c: CanonicalWord) -> Word {
        c.0
    }
}

/// A graph product of vertex groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphProduct {
    graph: Graph,
    groups: Vec<GroupSpec>,
}

impl GraphProduct {
    /// Pairs a graph with its vertex groups; every vertex group must be non-trivial.
    pub fn new(graph: Graph, groups: Vec<GroupSpec>) -> Result<Self> {
        if graph.len() != groups.len() {
            return Err(Error::input(format!(
                "{} vertices but {} vertex groups",
                graph.len(),
                groups.len()
            )));
        }
        for (v, g) in groups.iter().enumerate() {
            if g.order() == Order::Finite(1) {
                return Err(Error::input(format!(
                    "vertex group at `{}` is trivial; graph products need non-trivial groups",
                    graph.name(v)
                )));
            }
        }
        Ok(GraphProduct { graph, groups })
    }

    /// Every vertex carries the same group.
    pub fn uniform(graph: Graph, group: GroupSpec) -> Result<Self> {
        let groups = vec![group; graph.len()];
        GraphProduct::new(graph, groups)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn groups(&self) -> &[GroupSpec] {
        &self.groups
    }

    pub fn group(&self, v: usize) -> &GroupSpec {
        &self.groups[v]
    }

    /// Fails unless every vertex group in `set` is concrete.
    pub fn require_concrete(&self, set: VertexSet) -> Result<()> {
        for v in set.iter() {
            if !self.groups[v].is_concrete() {
                return Err(Error::unsupported(format!(
                    "vertex `{}` carries {}; enumeration needs concrete finite vertex groups",
                    self.graph.name(v),
                    self.groups[v].describe()
                )));
            }
        }
        Ok(())
    }

    /// Checks that every letter names a vertex and an element of its group.
    pub fn validate(&self, w: &Word) -> Result<()> {
        for l in &w.0 {
            if l.vertex >= self.graph.len() {
                return Err(Error::UnknownVertex(format!("#{}", l.vertex)));
            }
            self.groups[l.vertex].check(l.element).map_err(|e| match e {
                Error::InvalidInput(m) => {
                    Error::input(format!("at vertex `{}`: {m}", self.graph.name(l.vertex)))
                }
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn letter(&self, vertex: &str, element: &str) -> Result<Letter> {
        let v = self.graph.vertex(vertex)?;
        let e = self.groups[v].parse_element(element)?;
        Ok(Letter { vertex: v, element: e })
    }

    fn is_identity_letter(&self, l: Letter) -> bool {
        self.groups[l.vertex].identity().map(|e| e == l.element).unwrap_or(false)
    }

    /// Appends `l` to a reduced word, keeping it reduced.
    ///
    /// Scans back across letters whose vertices commute with `l.vertex`; a
    /// letter of the same vertex absorbs `l`.
    fn push_reduced(&self, out: &mut Vec<Letter>, l: Letter) {
        if self.is_identity_letter(l) {
            return;
        }
        let link = self.graph.link(l.vertex).expect("validated vertex");
        for i in (0..out.len()).rev() {
            let u = out[i].vertex;
            if u == l.vertex {
                let group = &self.groups[u];
                let merged = group.compose_unchecked(out[i].element, l.element);
                if self.is_identity_letter(Letter { vertex: u, element: merged }) {
                    out.remove(i);
                } else {
                    out[i].element = merged;
                }
                return;
            }
            if !link.contains(u) {
                break;
            }
        }
        out.push(l);
    }

    fn reduce_unchecked(&self, letters: &[Letter]) -> Vec<Letter> {
        let mut out = Vec::with_capacity(letters.len());
        for &l in letters {
            self.push_reduced(&mut out, l);
        }
        out
    }

    /// Lexicographic normal form of an already reduced letter sequence: repeatedly
    /// take, among the letters that can be commuted to the front, the one at the
    /// least vertex.
    fn sort_reduced(&self, mut rest: Vec<Letter>) -> Vec<Letter> {
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut before = VertexSet::EMPTY;
            let mut best: Option<usize> = None;
            for (j, l) in rest.iter().enumerate() {
                let link = self.graph.link(l.vertex).expect("validated vertex");
                if before.is_subset(link) && best.is_none_or(|b| l.vertex < rest[b].vertex) {
                    best = Some(j);
                }
                before.insert(l.vertex);
            }
            let j = best.expect("the first letter is always frontable");
            out.push(rest.remove(j));
        }
        out
    }

    fn canonical_unchecked(&self, letters: &[Letter]) -> CanonicalWord {
        CanonicalWord(Word(self.sort_reduced(self.reduce_unchecked(letters))))
    }

    fn check_concrete_word(&self, w: &Word) -> Result<()> {
        self.validate(w)?;
        self.require_concrete(w.vertices())
    }

    /// A reduced word for the same element. Never longer than `w`.
    pub fn reduce(&self, w: &Word) -> Result<Word> {
        self.check_concrete_word(w)?;
        Ok(Word(self.reduce_unchecked(&w.0)))
    }

    /// The canonical representative of the element `w` defines.
    pub fn canonical(&self, w: &Word) -> Result<CanonicalWord> {
        self.check_concrete_word(w)?;
        Ok(self.canonical_unchecked(&w.0))
    }

    pub fn multiply(&self, a: &Word, b: &Word) -> Result<CanonicalWord> {
        self.check_concrete_word(a)?;
        self.check_concrete_word(b)?;
        Ok(self.mul(a, b))
    }

    pub fn invert(&self, w: &Word) -> Result<CanonicalWord> {
        self.check_concrete_word(w)?;
        Ok(self.inv(w))
    }

    /// Decides whether `a` and `b` define the same element.
    pub fn equals(&self, a: &Word, b: &Word) -> Result<bool> {
        Ok(self.canonical(a)? == self.canonical(b)?)
    }

    /// Vertices occurring in a reduced form of `w`; independent of the reduced
    /// form chosen.
    pub fn support(&self, w: &Word) -> Result<VertexSet> {
        self.check_concrete_word(w)?;
        Ok(self.supp(w))
    }

    /// Whether `w` lies in the parabolic subgroup generated by the vertex groups in `set`.
    pub fn in_parabolic(&self, w: &Word, set: VertexSet) -> Result<bool> {
        if !set.is_subset(self.graph.vertices()) {
            return Err(Error::input("vertex set is not contained in the graph"));
        }
        Ok(self.support(w)?.is_subset(set))
    }

    // Unchecked arithmetic for words already known to be valid.

    pub(crate) fn mul(&self, a: &Word, b: &Word) -> CanonicalWord {
        let mut out = self.reduce_unchecked(&a.0);
        for &l in &b.0 {
            self.push_reduced(&mut out, l);
        }
        CanonicalWord(Word(self.sort_reduced(out)))
    }

    pub(crate) fn mul3(&self, a: &Word, b: &Word, c: &Word) -> CanonicalWord {
        let mut out = self.reduce_unchecked(&a.0);
        for &l in b.0.iter().chain(&c.0) {
            self.push_reduced(&mut out, l);
        }
        CanonicalWord(Word(self.sort_reduced(out)))
    }

    pub(crate) fn inv(&self, w: &Word) -> CanonicalWord {
        let rev: Vec<Letter> = w
            .0
            .iter()
            .rev()
            .map(|l| Letter {
                vertex: l.vertex,
                element: self.groups[l.vertex].inverse_unchecked(l.element),
            })
            .collect();
        self.canonical_unchecked(&rev)
    }

    pub(crate) fn canon(&self, w: &Word) -> CanonicalWord {
        self.canonical_unchecked(&w.0)
    }

    pub(crate) fn supp(&self, w: &Word) -> VertexSet {
        self.reduce_unchecked(&w.0).iter().map(|l| l.vertex).collect()
    }

    /// The shortest element of the left coset `g·Γ_set`: letters of `set` that
    /// can be commuted to the end of the reduced word are stripped until none
    /// remain. Two elements define the same left coset iff their
    /// representatives coincide.
    pub fn left_coset_rep(&self, g: &Word, set: VertexSet) -> Result<CanonicalWord> {
        self.check_concrete_word(g)?;
        Ok(self.left_rep(g, set))
    }

    pub(crate) fn left_rep(&self, g: &Word, set: VertexSet) -> CanonicalWord {
        let mut letters = self.reduce_unchecked(&g.0);
        loop {
            let mut after = VertexSet::EMPTY;
            let mut strip = None;
            for j in (0..letters.len()).rev() {
                let v = letters[j].vertex;
                if set.contains(v) && after.is_subset(self.graph.link(v).expect("valid vertex")) {
                    strip = Some(j);
                    break;
                }
                after.insert(v);
            }
            match strip {
                Some(j) => {
                    letters.remove(j);
                }
                None => break,
            }
        }
        CanonicalWord(Word(self.sort_reduced(letters)))
    }

    /// Canonical words of all elements of reduced length at most `max_len`, sorted.
    pub fn enumerate_ball(&self, max_len: usize) -> Result<Vec<CanonicalWord>> {
        self.enumerate_ball_in(self.graph.vertices(), max_len)
    }

    /// Like [`enumerate_ball`](Self::enumerate_ball), restricted to the
    /// parabolic subgroup on `set`.
    pub fn enumerate_ball_in(&self, set: VertexSet, max_len: usize) -> Result<Vec<CanonicalWord>> {
        if !set.is_subset(self.graph.vertices()) {
            return Err(Error::input("vertex set is not contained in the graph"));
        }
        self.require_concrete(set)?;
        let generators: Vec<Letter> = set
            .iter()
            .flat_map(|v| {
                let elems = self.groups[v].non_identity().expect("concrete group");
                elems.into_iter().map(move |e| Letter { vertex: v, element: e })
            })
            .collect();
        let mut seen: HashSet<CanonicalWord> = HashSet::new();
        let mut frontier = vec![CanonicalWord::identity()];
        seen.insert(CanonicalWord::identity());
        for len in 1..=max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for &l in &generators {
                    let mut letters = w.0 .0.clone();
                    self.push_reduced(&mut letters, l);
                    if letters.len() != len {
                        continue;
                    }
                    let c = CanonicalWord(Word(self.sort_reduced(letters)));
                    if seen.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        let mut all: Vec<CanonicalWord> = seen.into_iter().collect();
        all.sort();
        Ok(all)
    }

    /// Parses a word written as whitespace-separated `vertex:element` tokens.
    ///
    /// The empty string and the lone token `e` denote the identity. Dihedral
    /// names of the form `r^a s` may be written with the space.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut raw: Vec<(String, String)> = Vec::new();
        for token in text.split_whitespace() {
            match token.split_once(':') {
                Some((v, e)) => raw.push((v.to_string(), e.to_string())),
                None if token == "s" && !raw.is_empty() => {
                    raw.last_mut().expect("non-empty").1.push_str(" s");
                }
                None if token == "e" => {}
                None => return Err(Error::input(format!("malformed letter `{token}`; expected vertex:element"))),
            }
        }
        let letters = raw
            .iter()
            .map(|(v, e)| self.letter(v, e))
            .collect::<Result<Vec<_>>>()?;
        Ok(Word(letters))
    }

    /// Writes `w` in the `vertex:element` grammar; the identity is the empty string.
    pub fn format_word(&self, w: &Word) -> String {
        w.0.iter()
            .map(|l| format!("{}:{}", self.graph.name(l.vertex), self.groups[l.vertex].format_element(l.element)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn display<'a>(&'a self, w: &'a Word) -> DisplayWord<'a> {
        DisplayWord { ctx: self, word: w }
    }
}

/// Formats a word with `e` for the identity.
pub struct DisplayWord<'a> {
    ctx: &'a GraphProduct,
    word: &'a Word,
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            f.write_str("e")
        } else {
            f.write_str(&self.ctx.format_word(self.word))
        }
    }
}

/// Whether `w` satisfies the reducedness condition: no identity letters, and no
/// two letters of one vertex with only commuting letters between them.
pub fn is_reduced(ctx: &GraphProduct, w: &Word) -> bool {
    let letters = &w.0;
    for (i, a) in letters.iter().enumerate() {
        if ctx.is_identity_letter(*a) {
            return false;
        }
        for b in &letters[i + 1..] {
            if b.vertex == a.vertex {
                return false;
            }
            if !ctx.graph.adjacent(a.vertex, b.vertex) {
                break;
            }
        }
    }
    true
}

/// Outcome of the intersection check for one pair of vertex sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntersectionOutcome {
    Pass,
    /// `w = g x h` lies in the `t1` parabolic but in no `c (t1 ∩ t2) d`.
    Counterexample { x: CanonicalWord, w: CanonicalWord },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionReport {
    pub t1: VertexSet,
    pub t2: VertexSet,
    pub max_len: usize,
    /// Number of `(c, d)` pairs in the finite family.
    pub family_size: usize,
    /// Number of elements of the `t1` parabolic met in `g Γ_t2 h`.
    pub checked: usize,
    pub outcome: IntersectionOutcome,
}

/// Brute-force checker for the claim that `Γ_T1 ∩ g Γ_T2 h` is covered by finitely
/// many translates `c Γ_{T1∩T2} d`, where `c` ranges over products of
/// subsequences of the letters of `g` and `d` likewise for `h`.
pub struct IntersectionVerifier<'a> {
    ctx: &'a GraphProduct,
    ball: Vec<CanonicalWord>,
    max_len: usize,
}

/// A precomputed `g, h` pair with its covering family.
struct Family {
    g: Word,
    h: Word,
    /// Inverses of the `(c, d)` pairs.
    inverse_pairs: Vec<(Word, Word)>,
}

impl<'a> IntersectionVerifier<'a> {
    pub fn new(ctx: &'a GraphProduct, max_len: usize) -> Result<Self> {
        let ball = ctx.enumerate_ball(max_len)?;
        Ok(IntersectionVerifier { ctx, ball, max_len })
    }

    pub fn ball(&self) -> &[CanonicalWord] {
        &self.ball
    }

    fn subsequence_products(&self, w: &Word) -> Vec<CanonicalWord> {
        let letters = &w.0;
        let mut out: HashSet<CanonicalWord> = HashSet::new();
        for mask in 0u64..1 << letters.len() {
            let picked: Vec<Letter> = letters
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, l)| *l)
                .collect();
            out.insert(self.ctx.canonical_unchecked(&picked));
        }
        let mut out: Vec<_> = out.into_iter().collect();
        out.sort();
        out
    }

    fn family(&self, g: &Word, h: &Word) -> Result<Family> {
        self.ctx.check_concrete_word(g)?;
        self.ctx.check_concrete_word(h)?;
        if g.len() > 20 || h.len() > 20 {
            return Err(Error::resource("g and h must have at most 20 letters each"));
        }
        let g = self.ctx.canon(g).into_word();
        let h = self.ctx.canon(h).into_word();
        let cs = self.subsequence_products(&g);
        let ds = self.subsequence_products(&h);
        let mut inverse_pairs = Vec::with_capacity(cs.len() * ds.len());
        for c in &cs {
            for d in &ds {
                inverse_pairs.push((self.ctx.inv(c).into_word(), self.ctx.inv(d).into_word()));
            }
        }
        Ok(Family { g, h, inverse_pairs })
    }

    /// Runs the check for one pair of vertex sets.
    pub fn check(&self, t1: VertexSet, t2: VertexSet, g: &Word, h: &Word) -> Result<IntersectionReport> {
        let all = self.ctx.graph.vertices();
        if !t1.is_subset(all) || !t2.is_subset(all) {
            return Err(Error::input("vertex set is not contained in the graph"));
        }
        let fam = self.family(g, h)?;
        Ok(self.check_family(&fam, t1, t2))
    }

    fn check_family(&self, fam: &Family, t1: VertexSet, t2: VertexSet) -> IntersectionReport {
        let meet = t1.intersection(t2);
        let mut checked = 0;
        for x in self.ball.iter().filter(|x| x.vertices().is_subset(t2)) {
            let w = self.ctx.mul3(&fam.g, x, &fam.h);
            if !w.vertices().is_subset(t1) {
                continue;
            }
            checked += 1;
            let covered = fam
                .inverse_pairs
                .iter()
                .any(|(ci, di)| self.ctx.mul3(ci, &w, di).vertices().is_subset(meet));
            if !covered {
                return IntersectionReport {
                    t1,
                    t2,
                    max_len: self.max_len,
                    family_size: fam.inverse_pairs.len(),
                    checked,
                    outcome: IntersectionOutcome::Counterexample { x: x.clone(), w },
                };
            }
        }
        IntersectionReport {
            t1,
            t2,
            max_len: self.max_len,
            family_size: fam.inverse_pairs.len(),
            checked,
            outcome: IntersectionOutcome::Pass,
        }
    }

    /// Runs the check for every pair `(T1, T2)` of vertex subsets at once and
    /// returns the failing pairs with a witness each.
    pub fn check_all_subsets(&self, g: &Word, h: &Word) -> Result<Vec<IntersectionReport>> {
        let fam = self.family(g, h)?;
        let all = self.ctx.graph.vertices();
        let mut failures = Vec::new();
        for t2 in all.subsets() {
            let mut reported: HashSet<VertexSet> = HashSet::new();
            for x in self.ball.iter().filter(|x| x.vertices().is_subset(t2)) {
                let w = self.ctx.mul3(&fam.g, x, &fam.h);
                let ws = w.vertices();
                let covers: Vec<VertexSet> = fam
                    .inverse_pairs
                    .iter()
                    .map(|(ci, di)| self.ctx.mul3(ci, &w, di).vertices())
                    .collect();
                for t1 in all.subsets().filter(|t1| ws.is_subset(*t1)) {
                    let meet = t1.intersection(t2);
                    if !covers.iter().any(|s| s.is_subset(meet)) && reported.insert(t1) {
                        failures.push(IntersectionReport {
                            t1,
                            t2,
                            max_len: self.max_len,
                            family_size: fam.inverse_pairs.len(),
                            checked: 0,
                            outcome: IntersectionOutcome::Counterexample { x: x.clone(), w: w.clone() },
                        });
                    }
                }
            }
        }
        Ok(failures)
    }
}

/// One-shot form of [`IntersectionVerifier::check`].
pub fn verify_intersection_lemma(
    ctx: &GraphProduct,
    t1: VertexSet,
    t2: VertexSet,
    g: &Word,
    h: &Word,
    max_len: usize,
) -> Result<IntersectionReport> {
    IntersectionVerifier::new(ctx, max_len)?.check(t1, t2, g, h)
}
