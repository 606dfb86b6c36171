//! Rooted `k`-level `d`-regular trees and their level-preserving partial
//! automorphisms defined on root-containing connected subtrees.
//!
//! Vertices are words over the alphabet `{0, ..., d-1}` (shown 1-based,
//! dot-separated, root `ε`). The parent of `w·i` is `w`, so a vertex set is
//! connected through the root exactly when it is closed under taking parents.
//!
//! Every map here fixes the root. The map defined on the root alone is the
//! zero of the semigroup and corresponds to the wreath element whose top
//! partial permutation is empty.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::partial_perm::PartialPerm;
use crate::wreath::WreathElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeShape {
    degree: usize,
    levels: usize,
}

impl TreeShape {
    pub fn new(degree: usize, levels: usize) -> Result<Self> {
        if degree == 0 || levels == 0 {
            return Err(Error::InvalidTree(format!(
                "tree needs degree >= 1 and levels >= 1, got d={degree} k={levels}"
            )));
        }
        Ok(Self { degree, levels })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `(d^{k+1} - 1)/(d - 1)`, or `k + 1` for `d = 1`.
    pub fn vertex_count(&self) -> BigUint {
        let d = BigUint::from(self.degree);
        let mut level_size = BigUint::one();
        let mut total = BigUint::one();
        for _ in 0..self.levels {
            level_size *= &d;
            total += &level_size;
        }
        total
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        v.depth() <= self.levels && v.0.iter().all(|&c| (c as usize) < self.degree)
    }

    /// All vertices, ordered by depth then lexicographically.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out = vec![Vertex::root()];
        let mut frontier = vec![Vertex::root()];
        for _ in 0..self.levels {
            frontier = frontier
                .iter()
                .flat_map(|v| (0..self.degree).map(move |i| v.child(i)))
                .collect();
            out.extend(frontier.iter().cloned());
        }
        out
    }

    fn below(&self) -> Option<TreeShape> {
        (self.levels > 1).then(|| TreeShape {
            degree: self.degree,
            levels: self.levels - 1,
        })
    }
}

/// A vertex of a regular rooted tree as its word of 0-based child indices.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Vertex(Vec<u8>);

impl Vertex {
    pub fn root() -> Self {
        Self(Vec::new())
    }

    pub fn from_letters(letters: &[usize]) -> Self {
        Self(letters.iter().map(|&c| c as u8).collect())
    }

    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&c| c as usize)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Vertex {
        let mut w = self.0.clone();
        w.push(i as u8);
        Vertex(w)
    }

    pub fn parent(&self) -> Option<Vertex> {
        (!self.is_root()).then(|| Vertex(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().map(|&c| c as usize)
    }

    /// The word with its first letter removed (re-rooting at a level-1 vertex).
    pub fn strip_first(&self) -> Vertex {
        Vertex(self.0.get(1..).unwrap_or_default().to_vec())
    }

    pub fn prepend(&self, i: usize) -> Vertex {
        let mut w = Vec::with_capacity(self.0.len() + 1);
        w.push(i as u8);
        w.extend_from_slice(&self.0);
        Vertex(w)
    }
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            return f.write_str("ε");
        }
        for (n, c) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}", *c as usize + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "ε" || s.is_empty() {
            return Ok(Vertex::root());
        }
        s.split('.')
            .map(|t| match t.parse::<usize>() {
                Ok(c) if (1..=256).contains(&c) => Ok((c - 1) as u8),
                _ => Err(Error::Parse(format!("bad vertex letter {t:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Vertex)
    }
}

/// A connected, root-containing vertex set of a tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedSubtree {
    shape: TreeShape,
    vertices: BTreeSet<Vertex>,
}

impl RootedSubtree {
    pub fn new(shape: TreeShape, vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        if !vertices.contains(&Vertex::root()) {
            return Err(Error::InvalidTree(
                "subtree does not contain the root".into(),
            ));
        }
        for v in &vertices {
            if !shape.contains(v) {
                return Err(Error::InvalidTree(format!("vertex {v} is not in the tree")));
            }
            if let Some(p) = v.parent() {
                if !vertices.contains(&p) {
                    return Err(Error::InvalidTree(format!(
                        "vertex {v} is present but its parent {p} is not"
                    )));
                }
            }
        }
        Ok(Self { shape, vertices })
    }

    pub fn root_only(shape: TreeShape) -> Self {
        Self {
            shape,
            vertices: BTreeSet::from([Vertex::root()]),
        }
    }

    pub fn full(shape: TreeShape) -> Self {
        Self {
            shape,
            vertices: shape.vertices().into_iter().collect(),
        }
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.vertices.contains(v)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Every root-containing connected subtree of the shape, in a fixed order.
    pub fn enumerate(shape: TreeShape) -> Vec<RootedSubtree> {
        fn below(d: usize, levels: usize) -> Vec<Vec<Vertex>> {
            if levels == 0 {
                return vec![vec![Vertex::root()]];
            }
            let inner = below(d, levels - 1);
            let mut out: Vec<Vec<Vertex>> = vec![vec![Vertex::root()]];
            for i in 0..d {
                let mut next = Vec::with_capacity(out.len() * (inner.len() + 1));
                for partial in &out {
                    next.push(partial.clone());
                    for sub in &inner {
                        let mut v = partial.clone();
                        v.extend(sub.iter().map(|w| w.prepend(i)));
                        next.push(v);
                    }
                }
                out = next;
            }
            out
        }
        below(shape.degree, shape.levels)
            .into_iter()
            .map(|vs| RootedSubtree {
                shape,
                vertices: vs.into_iter().collect(),
            })
            .collect()
    }
}

/// A level-preserving partial automorphism of `T_k` whose domain and range
/// are root-containing connected subtrees.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialTreeAut {
    shape: TreeShape,
    mapping: BTreeMap<Vertex, Vertex>,
}

impl PartialTreeAut {
    pub fn new(shape: TreeShape, mapping: BTreeMap<Vertex, Vertex>) -> Result<Self> {
        let s = Self { shape, mapping };
        s.check_invariants()?;
        Ok(s)
    }

    pub fn identity(shape: TreeShape) -> Self {
        Self {
            shape,
            mapping: shape
                .vertices()
                .into_iter()
                .map(|v| (v.clone(), v))
                .collect(),
        }
    }

    /// The map defined on the root only: the zero.
    pub fn root_only(shape: TreeShape) -> Self {
        Self {
            shape,
            mapping: BTreeMap::from([(Vertex::root(), Vertex::root())]),
        }
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn mapping(&self) -> &BTreeMap<Vertex, Vertex> {
        &self.mapping
    }

    pub fn apply(&self, v: &Vertex) -> Option<&Vertex> {
        self.mapping.get(v)
    }

    /// Checks injectivity, level and parent preservation, and that domain
    /// and range are root-containing connected subtrees.
    pub fn check_invariants(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (v, w) in &self.mapping {
            if !self.shape.contains(v) || !self.shape.contains(w) {
                return Err(Error::InvalidTree(format!("{v} -> {w} leaves the tree")));
            }
            if v.depth() != w.depth() {
                return Err(Error::InvalidTree(format!("{v} -> {w} changes level")));
            }
            if !seen.insert(w) {
                return Err(Error::InvalidTree(format!("{w} has two preimages")));
            }
            if let Some(p) = v.parent() {
                match self.mapping.get(&p) {
                    Some(pw) if Some(pw) == w.parent().as_ref() => {}
                    _ => {
                        return Err(Error::InvalidTree(format!(
                            "{v} -> {w} does not respect the parent of {v}"
                        )))
                    }
                }
            }
        }
        // parent-closed domain with matching parents makes the range parent-closed
        if self.mapping.get(&Vertex::root()) != Some(&Vertex::root()) {
            return Err(Error::InvalidTree(
                "map must send the root to the root".into(),
            ));
        }
        Ok(())
    }

    /// Left-to-right product `v ↦ other(self(v))`.
    pub fn compose(&self, other: &PartialTreeAut) -> Result<PartialTreeAut> {
        if self.shape != other.shape {
            return Err(Error::InvalidTree(format!(
                "shape mismatch: (d={}, k={}) vs (d={}, k={})",
                self.shape.degree, self.shape.levels, other.shape.degree, other.shape.levels
            )));
        }
        let mapping = self
            .mapping
            .iter()
            .filter_map(|(v, w)| other.mapping.get(w).map(|u| (v.clone(), u.clone())))
            .collect();
        Ok(PartialTreeAut {
            shape: self.shape,
            mapping,
        })
    }

    pub fn inverse(&self) -> PartialTreeAut {
        PartialTreeAut {
            shape: self.shape,
            mapping: self
                .mapping
                .iter()
                .map(|(v, w)| (w.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn domain_subtree(&self) -> RootedSubtree {
        RootedSubtree {
            shape: self.shape,
            vertices: self.mapping.keys().cloned().collect(),
        }
    }

    pub fn range_subtree(&self) -> RootedSubtree {
        RootedSubtree {
            shape: self.shape,
            vertices: self.mapping.values().cloned().collect(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.mapping.iter().all(|(v, w)| v == w)
    }

    fn top(&self) -> PartialPerm {
        let mut images = vec![None; self.shape.degree];
        for (v, w) in &self.mapping {
            if v.depth() == 1 {
                images[v.first().unwrap()] = w.first();
            }
        }
        PartialPerm::new(&images).expect("injective on level 1")
    }

    /// Restriction to the subtree hanging at level-1 vertex `i`, re-rooted.
    fn restrict(&self, i: usize, shape: TreeShape) -> PartialTreeAut {
        let mapping = self
            .mapping
            .iter()
            .filter(|(v, _)| v.first() == Some(i))
            .map(|(v, w)| (v.strip_first(), w.strip_first()))
            .chain(std::iter::once((Vertex::root(), Vertex::root())))
            .collect();
        PartialTreeAut { shape, mapping }
    }

    /// The wreath element `(φ|_{T_{k-1}}, φ|_{V_1})`.
    pub fn to_wreath(&self) -> WreathElement {
        let top = self.top();
        match self.shape.below() {
            None => WreathElement::base(top),
            Some(below) => {
                let children = top
                    .domain()
                    .map(|i| self.restrict(i, below).to_wreath())
                    .collect();
                WreathElement::from_parts(self.shape.levels, top, children)
                    .expect("restrictions have matching degree and level")
            }
        }
    }

    pub fn from_wreath(x: &WreathElement, shape: TreeShape) -> Result<PartialTreeAut> {
        if x.degree() != shape.degree {
            return Err(Error::DegreeMismatch {
                left: x.degree(),
                right: shape.degree,
            });
        }
        if x.level() != shape.levels {
            return Err(Error::LevelMismatch {
                left: x.level(),
                right: shape.levels,
            });
        }
        let mut mapping = BTreeMap::new();
        fill_from_wreath(x, &Vertex::root(), &Vertex::root(), &mut mapping);
        Ok(PartialTreeAut { shape, mapping })
    }
}

fn fill_from_wreath(
    x: &WreathElement,
    src: &Vertex,
    dst: &Vertex,
    mapping: &mut BTreeMap<Vertex, Vertex>,
) {
    mapping.insert(src.clone(), dst.clone());
    for (n, i) in x.top().domain().enumerate() {
        let j = x.top().image(i).unwrap();
        match x.children().get(n) {
            Some(child) => fill_from_wreath(child, &src.child(i), &dst.child(j), mapping),
            None => {
                mapping.insert(src.child(i), dst.child(j));
            }
        }
    }
}

impl fmt::Display for PartialTreeAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, (v, w)) in self.mapping.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{v} -> {w}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PartialTreeAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.mapping.iter()).finish()
    }
}

impl PartialTreeAut {
    /// JSON object mapping each domain vertex to its image, both in text form.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.mapping
                .iter()
                .map(|(v, w)| (v.to_string(), serde_json::Value::String(w.to_string())))
                .collect(),
        )
    }

    /// Parses the line form `v -> w` (one pair per line).
    pub fn parse(shape: TreeShape, text: &str) -> Result<Self> {
        let mut mapping = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (v, w) = line
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("expected `v -> w`, got {line:?}")))?;
            if mapping.insert(v.parse()?, w.parse()?).is_some() {
                return Err(Error::Parse(format!("vertex {} mapped twice", v.trim())));
            }
        }
        Self::new(shape, mapping)
    }
}
