//! Vertex groups: concrete finite groups with realised multiplication, and
//! abstract descriptors that only carry facts.
//!
//! Elements of a concrete group are encoded as indices `0..order`. The encoding
//! depends on the kind:
//!
//! * `cyclic(n)`: the residue `k`, named `"k"`.
//! * `dihedral(n)`: `r^a s^b` is `a + n*b`, named `"r^a"` or `"r^a s"`.
//! * `symmetric(n)`: the rank of the one-line notation in lexicographic order,
//!   named by the one-line string, e.g. `"231"`.
//! * `table`: the position of the declared name.

use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::truth::Truth;

/// Groups up to this order get a precomputed Cayley table.
const CAYLEY_LIMIT: u64 = 256;
/// Tables up to this order are checked for associativity exhaustively.
const EXHAUSTIVE_ASSOCIATIVITY: usize = 64;
const SAMPLED_TRIPLES: usize = 20_000;
const MAX_SYMMETRIC_DEGREE: u32 = 9;

/// An element of a concrete group, as an index in `0..order`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }

    /// Whether the order is at least `k` (infinite counts).
    pub fn at_least(self, k: u64) -> bool {
        match self {
            Order::Finite(n) => n >= k,
            Order::Infinite => true,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("infinite"),
        }
    }
}

/// The three facts the classifier and the Cartan report consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Facts {
    pub properly_proximal: Truth,
    pub amenable: Truth,
    pub weakly_amenable_cstar1: Truth,
}

/// Name of a fact, as reported in missing-fact lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactName {
    ProperlyProximal,
    Amenable,
    WeaklyAmenableCstar1,
}

impl FactName {
    pub fn as_str(self) -> &'static str {
        match self {
            FactName::ProperlyProximal => "properly_proximal",
            FactName::Amenable => "amenable",
            FactName::WeaklyAmenableCstar1 => "weakly_amenable_cstar1",
        }
    }
}

impl fmt::Display for FactName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Global conventions that the literature leaves open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Conventions {
    /// Whether finite groups count as properly proximal.
    pub finite_groups_pp: bool,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions { finite_groups_pp: true }
    }
}

/// What kind of group a [`GroupSpec`] describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic(u32),
    Dihedral(u32),
    Symmetric(u32),
    Table { names: Vec<String>, table: Vec<Vec<u32>>, identity: u32 },
    Abstract,
}

/// Descriptor used to request a group from [`build_group`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupDescriptor {
    Cyclic(u32),
    Dihedral(u32),
    Symmetric(u32),
    Table { names: Vec<String>, table: Vec<Vec<u32>> },
    Abstract { order: Order, facts: Facts },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cayley {
    product: Vec<u32>,
    inverse: Vec<u32>,
}

/// A vertex group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    kind: GroupKind,
    order: Order,
    pub facts: Facts,
    cayley: Option<Cayley>,
}

/// Builds and validates a group.
pub fn build_group(descriptor: GroupDescriptor) -> Result<GroupSpec> {
    let concrete_facts = Facts {
        properly_proximal: Truth::Unknown,
        amenable: Truth::True,
        weakly_amenable_cstar1: Truth::True,
    };
    let (kind, order) = match descriptor {
        GroupDescriptor::Cyclic(n) => {
            if n == 0 {
                return Err(Error::input("cyclic(0) is not a group"));
            }
            (GroupKind::Cyclic(n), n as u64)
        }
        GroupDescriptor::Dihedral(n) => {
            if n == 0 {
                return Err(Error::input("dihedral(0) is not a group"));
            }
            (GroupKind::Dihedral(n), 2 * n as u64)
        }
        GroupDescriptor::Symmetric(n) => {
            if n == 0 || n > MAX_SYMMETRIC_DEGREE {
                return Err(Error::input(format!(
                    "symmetric({n}) unsupported; degree must be in 1..={MAX_SYMMETRIC_DEGREE}"
                )));
            }
            (GroupKind::Symmetric(n), (1..=n as u64).product())
        }
        GroupDescriptor::Table { names, table } => {
            let identity = validate_table(&names, &table)?;
            let order = names.len() as u64;
            (GroupKind::Table { names, table, identity }, order)
        }
        GroupDescriptor::Abstract { order, facts } => {
            if order == Order::Finite(0) {
                return Err(Error::input("a group has order at least 1"));
            }
            return Ok(GroupSpec { kind: GroupKind::Abstract, order, facts, cayley: None });
        }
    };
    let mut spec = GroupSpec {
        kind,
        order: Order::Finite(order),
        facts: concrete_facts,
        cayley: None,
    };
    if order <= CAYLEY_LIMIT {
        spec.cayley = Some(spec.tabulate());
    }
    Ok(spec)
}

/// Checks that `table` is a group law on `names`; returns the identity index.
fn validate_table(names: &[String], table: &[Vec<u32>]) -> Result<u32> {
    let n = names.len();
    if n == 0 {
        return Err(Error::input("table group needs at least one element"));
    }
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() || name.chars().any(char::is_whitespace) || names[..i].contains(name) {
            return Err(Error::input(format!("invalid or duplicate element name {name:?}")));
        }
    }
    if table.len() != n || table.iter().any(|row| row.len() != n) {
        return Err(Error::input(format!("multiplication table must be {n}x{n}")));
    }
    if let Some(bad) = table.iter().flatten().find(|&&x| x as usize >= n) {
        return Err(Error::input(format!("table entry {bad} is out of range")));
    }
    let mul = |x: usize, y: usize| table[x][y] as usize;
    let identity = (0..n)
        .find(|&e| (0..n).all(|x| mul(e, x) == x && mul(x, e) == x))
        .ok_or_else(|| Error::GroupAxiom {
            axiom: "identity",
            witness: "no two-sided identity element".into(),
        })?;
    for (x, name) in names.iter().enumerate() {
        if !(0..n).any(|y| mul(x, y) == identity && mul(y, x) == identity) {
            return Err(Error::GroupAxiom {
                axiom: "inverse",
                witness: format!("({name})"),
            });
        }
    }
    let assoc_fails = |x: usize, y: usize, z: usize| mul(mul(x, y), z) != mul(x, mul(y, z));
    let witness = |x: usize, y: usize, z: usize| Error::GroupAxiom {
        axiom: "associativity",
        witness: format!("({}, {}, {})", names[x], names[y], names[z]),
    };
    if n <= EXHAUSTIVE_ASSOCIATIVITY {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if assoc_fails(x, y, z) {
                        return Err(witness(x, y, z));
                    }
                }
            }
        }
    } else {
        let mut rng = StdRng::seed_from_u64(0x5eed_7ab1e);
        for _ in 0..SAMPLED_TRIPLES {
            let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if assoc_fails(x, y, z) {
                return Err(witness(x, y, z));
            }
        }
    }
    Ok(identity as u32)
}

fn factorial(n: u32) -> u32 {
    (1..=n).product()
}

/// One-line permutation of `0..n` from its lexicographic rank.
fn perm_unrank(n: u32, mut rank: u32) -> Vec<u8> {
    let mut pool: Vec<u8> = (0..n as u8).collect();
    let mut out = Vec::with_capacity(n as usize);
    for i in (0..n).rev() {
        let f = factorial(i);
        let idx = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(idx));
    }
    out
}

fn perm_rank(perm: &[u8]) -> u32 {
    let n = perm.len() as u32;
    let mut rank = 0;
    for (i, &p) in perm.iter().enumerate() {
        let smaller = perm[i + 1..].iter().filter(|&&q| q < p).count() as u32;
        rank += smaller * factorial(n - 1 - i as u32);
    }
    rank
}

impl GroupSpec {
    pub fn cyclic(n: u32) -> Self {
        build_group(GroupDescriptor::Cyclic(n)).expect("valid cyclic group")
    }

    pub fn dihedral(n: u32) -> Self {
        build_group(GroupDescriptor::Dihedral(n)).expect("valid dihedral group")
    }

    pub fn symmetric(n: u32) -> Self {
        build_group(GroupDescriptor::Symmetric(n)).expect("valid symmetric group")
    }

    /// An abstract group known only through its order and facts.
    pub fn abstract_group(order: Order, facts: Facts) -> Self {
        GroupSpec { kind: GroupKind::Abstract, order, facts, cayley: None }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn is_concrete(&self) -> bool {
        !matches!(self.kind, GroupKind::Abstract)
    }

    /// Short human-readable description, e.g. `cyclic(3)`.
    pub fn describe(&self) -> String {
        match &self.kind {
            GroupKind::Cyclic(n) => format!("cyclic({n})"),
            GroupKind::Dihedral(n) => format!("dihedral({n})"),
            GroupKind::Symmetric(n) => format!("symmetric({n})"),
            GroupKind::Table { names, .. } => format!("table({})", names.len()),
            GroupKind::Abstract => format!("abstract(order {})", self.order),
        }
    }

    fn concrete_order(&self) -> Result<u32> {
        match (&self.kind, self.order) {
            (GroupKind::Abstract, _) => Err(Error::unsupported(format!(
                "{} has no realised multiplication",
                self.describe()
            ))),
            (_, Order::Finite(n)) => Ok(n as u32),
            (_, Order::Infinite) => Err(Error::Internal("concrete group of infinite order".into())),
        }
    }

    pub fn identity(&self) -> Result<Element> {
        self.concrete_order()?;
        Ok(match &self.kind {
            GroupKind::Table { identity, .. } => Element(*identity),
            _ => Element(0),
        })
    }

    pub fn is_identity(&self, a: Element) -> Result<bool> {
        self.check(a)?;
        Ok(a == self.identity()?)
    }

    /// Checks that `a` encodes an element of this group.
    pub fn check(&self, a: Element) -> Result<()> {
        let n = self.concrete_order()?;
        if a.0 < n {
            Ok(())
        } else {
            Err(Error::input(format!("element #{} does not belong to {}", a.0, self.describe())))
        }
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> Result<impl Iterator<Item = Element>> {
        Ok((0..self.concrete_order()?).map(Element))
    }

    /// All non-identity elements in encoding order.
    pub fn non_identity(&self) -> Result<Vec<Element>> {
        let e = self.identity()?;
        Ok(self.elements()?.filter(|&x| x != e).collect())
    }

    /// The product `a * b` (for permutations, `b` acts first).
    pub fn compose(&self, a: Element, b: Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.compose_unchecked(a, b))
    }

    pub fn inverse(&self, a: Element) -> Result<Element> {
        self.check(a)?;
        Ok(self.inverse_unchecked(a))
    }

    /// Multiplication without membership checks; callers guarantee validity.
    pub(crate) fn compose_unchecked(&self, a: Element, b: Element) -> Element {
        if let Some(c) = &self.cayley {
            let n = c.inverse.len();
            return Element(c.product[a.0 as usize * n + b.0 as usize]);
        }
        self.compute_product(a, b)
    }

    pub(crate) fn inverse_unchecked(&self, a: Element) -> Element {
        if let Some(c) = &self.cayley {
            return Element(c.inverse[a.0 as usize]);
        }
        self.compute_inverse(a)
    }

    fn compute_product(&self, a: Element, b: Element) -> Element {
        match &self.kind {
            GroupKind::Cyclic(n) => Element(((a.0 as u64 + b.0 as u64) % *n as u64) as u32),
            GroupKind::Dihedral(n) => {
                let n = *n;
                let (ra, sa) = (a.0 % n, a.0 / n);
                let (rb, sb) = (b.0 % n, b.0 / n);
                // r^ra s^sa r^rb s^sb = r^(ra ± rb) s^(sa + sb)
                let rot = if sa == 0 { (ra + rb) % n } else { (ra + n - rb) % n };
                Element(rot + n * ((sa + sb) % 2))
            }
            GroupKind::Symmetric(n) => {
                let p = perm_unrank(*n, a.0);
                let q = perm_unrank(*n, b.0);
                let r: Vec<u8> = q.iter().map(|&i| p[i as usize]).collect();
                Element(perm_rank(&r))
            }
            GroupKind::Table { table, .. } => Element(table[a.0 as usize][b.0 as usize]),
            GroupKind::Abstract => unreachable!("abstract groups have no multiplication"),
        }
    }

    fn compute_inverse(&self, a: Element) -> Element {
        match &self.kind {
            GroupKind::Cyclic(n) => Element((n - a.0) % n),
            GroupKind::Dihedral(n) => {
                if a.0 < *n {
                    Element((n - a.0) % n)
                } else {
                    a
                }
            }
            GroupKind::Symmetric(n) => {
                let p = perm_unrank(*n, a.0);
                let mut inv = vec![0u8; p.len()];
                for (i, &pi) in p.iter().enumerate() {
                    inv[pi as usize] = i as u8;
                }
                Element(perm_rank(&inv))
            }
            GroupKind::Table { table, identity, .. } => {
                let row = &table[a.0 as usize];
                Element(row.iter().position(|&x| x == *identity).expect("validated table") as u32)
            }
            GroupKind::Abstract => unreachable!("abstract groups have no inverses"),
        }
    }

    fn tabulate(&self) -> Cayley {
        let n = self.order.finite().expect("finite") as u32;
        let mut product = Vec::with_capacity((n * n) as usize);
        for a in 0..n {
            for b in 0..n {
                product.push(self.compute_product(Element(a), Element(b)).0);
            }
        }
        let inverse = (0..n).map(|a| self.compute_inverse(Element(a)).0).collect();
        Cayley { product, inverse }
    }

    /// Parses an element name in this group's naming scheme.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let bad = || Error::input(format!("`{text}` is not an element of {}", self.describe()));
        let text = text.trim();
        let e = match &self.kind {
            GroupKind::Cyclic(_) => Element(text.parse::<u32>().map_err(|_| bad())?),
            GroupKind::Dihedral(n) => {
                let (rot, refl) = match text.strip_suffix('s') {
                    Some(head) => (head.trim_end(), 1),
                    None => (text, 0),
                };
                let a: u32 = rot
                    .strip_prefix("r^")
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(bad)?;
                if a >= *n {
                    return Err(bad());
                }
                Element(a + n * refl)
            }
            GroupKind::Symmetric(n) => {
                let digits: Vec<u8> = text
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as u8))
                    .collect::<Option<_>>()
                    .ok_or_else(bad)?;
                let n = *n as usize;
                let mut seen = vec![false; n];
                if digits.len() != n {
                    return Err(bad());
                }
                for &d in &digits {
                    if d == 0 || d as usize > n || seen[d as usize - 1] {
                        return Err(bad());
                    }
                    seen[d as usize - 1] = true;
                }
                let zero_based: Vec<u8> = digits.iter().map(|d| d - 1).collect();
                Element(perm_rank(&zero_based))
            }
            GroupKind::Table { names, .. } => {
                Element(names.iter().position(|s| s == text).ok_or_else(bad)? as u32)
            }
            GroupKind::Abstract => return Err(self.concrete_order().unwrap_err()),
        };
        self.check(e).map_err(|_| bad())?;
        Ok(e)
    }

    /// The name of `a` in this group's naming scheme.
    pub fn format_element(&self, a: Element) -> String {
        match &self.kind {
            GroupKind::Cyclic(_) => a.0.to_string(),
            GroupKind::Dihedral(n) => {
                if a.0 < *n {
                    format!("r^{}", a.0)
                } else {
                    format!("r^{} s", a.0 - n)
                }
            }
            GroupKind::Symmetric(n) => perm_unrank(*n, a.0).iter().map(|d| (b'1' + d) as char).collect(),
            GroupKind::Table { names, .. } => names[a.0 as usize].clone(),
            GroupKind::Abstract => format!("#{}", a.0),
        }
    }
}

/// Closes the fact record of `spec` under the standing rules: finite groups take
/// the configured proper-proximality value and infinite amenable groups are not
/// properly proximal. Idempotent; never turns a known flag into `Unknown`.
pub fn derive_facts(spec: &GroupSpec, config: &Conventions) -> Result<GroupSpec> {
    let mut out = spec.clone();
    let set = |current: &mut Truth, value: Truth, why: &str| -> Result<()> {
        if current.is_known() && *current != value {
            return Err(Error::FactConsistency {
                group: spec.describe(),
                detail: format!("properly_proximal is {current} but {why} forces {value}"),
            });
        }
        *current = value;
        Ok(())
    };
    match spec.order {
        Order::Finite(_) => {
            set(
                &mut out.facts.properly_proximal,
                Truth::from(config.finite_groups_pp),
                "the finite-group convention",
            )?;
        }
        Order::Infinite => {
            if spec.facts.amenable.is_true() {
                set(&mut out.facts.properly_proximal, Truth::False, "infinite amenability")?;
            }
        }
    }
    Ok(out)
}
