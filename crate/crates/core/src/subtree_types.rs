//! Isomorphism types of root-containing subtrees.
//!
//! A type is the multiset of its children's types. It is stored with the
//! children sorted by the byte order of their bracket encodings, so the
//! encoding `[` + children + `]` is a canonical string: two subtrees are
//! isomorphic exactly when their encodings agree. The leaf type is `[]`.
//!
//! Separately, [`type_order`] ranks types the way the graph-representative
//! tables number them: a larger root degree ranks higher, and types with the
//! same degree compare their children (listed from highest to lowest)
//! lexicographically. Index 0 of [`enumerate_types`] is the highest type, the
//! full tree.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::Serialize;

use crate::counting;
use crate::error::{check_cap, Error, Result};
use crate::tree_paut::{RootedSubtree, Vertex};

#[derive(Clone)]
pub struct SubtreeType {
    children: Vec<SubtreeType>,
    code: String,
}

impl SubtreeType {
    pub fn leaf() -> Self {
        Self {
            children: Vec::new(),
            code: "[]".to_owned(),
        }
    }

    /// Builds a type from its children in any order.
    pub fn new(mut children: Vec<SubtreeType>) -> Self {
        children.sort_by(|a, b| a.code.cmp(&b.code));
        let mut code =
            String::with_capacity(2 + children.iter().map(|c| c.code.len()).sum::<usize>());
        code.push('[');
        for c in &children {
            code.push_str(&c.code);
        }
        code.push(']');
        Self { children, code }
    }

    /// The type of the complete `k`-level `d`-regular tree.
    pub fn full(degree: usize, levels: usize) -> Self {
        (0..levels).fold(Self::leaf(), |t, _| Self::new(vec![t; degree]))
    }

    /// Children in canonical (encoding) order.
    pub fn children(&self) -> &[SubtreeType] {
        &self.children
    }

    /// Root degree `l`.
    pub fn degree(&self) -> usize {
        self.children.len()
    }

    pub fn depth(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn max_branching(&self) -> usize {
        self.children
            .iter()
            .map(SubtreeType::max_branching)
            .fold(self.degree(), usize::max)
    }

    pub fn vertex_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(SubtreeType::vertex_count)
            .sum::<usize>()
    }

    pub fn encoding(&self) -> &str {
        &self.code
    }

    /// Groups equal children with their multiplicities, highest type first.
    pub fn decomposition(&self) -> TypeDecomposition {
        let mut pairs: Vec<(SubtreeType, usize)> = Vec::new();
        for c in &self.children {
            match pairs.last_mut() {
                Some((t, n)) if t == c => *n += 1,
                _ => pairs.push((c.clone(), 1)),
            }
        }
        pairs.sort_by(|a, b| type_order(&b.0, &a.0));
        TypeDecomposition { pairs }
    }

    fn children_highest_first(&self) -> Vec<&SubtreeType> {
        let mut cs: Vec<&SubtreeType> = self.children.iter().collect();
        cs.sort_by(|a, b| type_order(b, a));
        cs
    }
}

impl PartialEq for SubtreeType {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for SubtreeType {}

impl Hash for SubtreeType {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.code.hash(state);
    }
}

/// Orders by [`type_order`].
impl Ord for SubtreeType {
    fn cmp(&self, other: &Self) -> Ordering {
        type_order(self, other)
    }
}

impl PartialOrd for SubtreeType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubtreeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

impl fmt::Debug for SubtreeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

impl FromStr for SubtreeType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        fn parse(bytes: &[u8], pos: &mut usize) -> Result<SubtreeType> {
            if bytes.get(*pos) != Some(&b'[') {
                return Err(Error::Parse(format!("expected `[` at offset {pos}")));
            }
            *pos += 1;
            let mut children = Vec::new();
            loop {
                match bytes.get(*pos) {
                    Some(b']') => {
                        *pos += 1;
                        return Ok(SubtreeType::new(children));
                    }
                    Some(b'[') => children.push(parse(bytes, pos)?),
                    _ => return Err(Error::Parse(format!("unbalanced bracket at offset {pos}"))),
                }
            }
        }
        let bytes = s.trim().as_bytes();
        let mut pos = 0;
        let t = parse(bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(Error::Parse(format!("trailing input after offset {pos}")));
        }
        Ok(t)
    }
}

/// `{(Γ_1, α_1), ..., (Γ_i, α_i)}`: distinct child types with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecomposition {
    pairs: Vec<(SubtreeType, usize)>,
}

impl TypeDecomposition {
    pub fn pairs(&self) -> &[(SubtreeType, usize)] {
        &self.pairs
    }

    /// `Σ α_j`, the root degree.
    pub fn root_degree(&self) -> usize {
        self.pairs.iter().map(|(_, a)| a).sum()
    }
}

pub fn type_decomposition(t: &SubtreeType) -> TypeDecomposition {
    t.decomposition()
}

/// `Greater` when `a` ranks above `b` (has a smaller table index).
pub fn type_order(a: &SubtreeType, b: &SubtreeType) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    a.degree().cmp(&b.degree()).then_with(|| {
        a.children_highest_first()
            .into_iter()
            .zip(b.children_highest_first())
            .map(|(x, y)| type_order(x, y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Canonical type of a root-containing subtree.
pub fn canonical_type(sub: &RootedSubtree) -> SubtreeType {
    fn at(sub: &RootedSubtree, v: &Vertex) -> SubtreeType {
        SubtreeType::new(
            (0..sub.shape().degree())
                .map(|i| v.child(i))
                .filter(|c| sub.contains(c))
                .map(|c| at(sub, &c))
                .collect(),
        )
    }
    at(sub, &Vertex::root())
}

/// All types of root-containing subtrees of `T_k`, highest first.
///
/// Level `m` is built from the level-`(m-1)` list: for each root degree `l`
/// from `d` down to 0, every non-decreasing index sequence of length `l`
/// in lexicographic order.
pub fn enumerate_types(degree: usize, levels: usize, cap: u64) -> Result<Vec<SubtreeType>> {
    if degree == 0 || levels == 0 {
        return Err(Error::InvalidType(format!(
            "need degree >= 1 and levels >= 1, got d={degree} k={levels}"
        )));
    }
    check_cap(
        format!("types of T_{levels} (d={degree})"),
        &counting::dclass_count(degree, levels),
        cap,
    )?;
    let mut prev = vec![SubtreeType::leaf()];
    for _ in 0..levels {
        let mut next = Vec::new();
        for l in (0..=degree).rev() {
            let mut seq = vec![0usize; l];
            loop {
                next.push(SubtreeType::new(
                    seq.iter().map(|&i| prev[i].clone()).collect(),
                ));
                // next non-decreasing sequence
                let Some(pos) = (0..l).rev().find(|&p| seq[p] + 1 < prev.len()) else {
                    break;
                };
                let v = seq[pos] + 1;
                seq[pos..].iter_mut().for_each(|s| *s = v);
            }
        }
        prev = next;
    }
    Ok(prev)
}

/// The ordered type list of one `(d, k)` universe with an index lookup.
#[derive(Debug, Clone)]
pub struct TypeTable {
    degree: usize,
    levels: usize,
    types: Vec<SubtreeType>,
    index: HashMap<SubtreeType, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeRecord {
    #[serde(rename = "type")]
    pub encoding: String,
    pub index: usize,
    pub level: usize,
}

impl TypeTable {
    pub fn new(degree: usize, levels: usize, cap: u64) -> Result<Self> {
        let types = enumerate_types(degree, levels, cap)?;
        let index = types
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        Ok(Self {
            degree,
            levels,
            types,
            index,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn types(&self) -> &[SubtreeType] {
        &self.types
    }

    pub fn index_of(&self, t: &SubtreeType) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn record(&self, index: usize) -> Option<TypeRecord> {
        self.types.get(index).map(|t| TypeRecord {
            encoding: t.to_string(),
            index,
            level: self.levels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_paut::TreeShape;

    fn ty(s: &str) -> SubtreeType {
        s.parse().unwrap()
    }

    fn sub(d: usize, k: usize, vs: &[&str]) -> RootedSubtree {
        RootedSubtree::new(
            TreeShape::new(d, k).unwrap(),
            vs.iter().map(|v| v.parse().unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_type(&sub(2, 2, &["ε"])), SubtreeType::leaf());
        assert_eq!(
            canonical_type(&sub(2, 1, &["ε", "1", "2"])).to_string(),
            "[[][]]"
        );
        let a = canonical_type(&sub(2, 2, &["ε", "1", "2", "1.1"]));
        let b = canonical_type(&sub(2, 2, &["ε", "1", "2", "2.1"]));
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "[[[]][]]");
    }

    #[test]
    fn encoding_round_trip_and_canonicity() {
        assert_eq!(ty("[[][[]]]"), ty("[[[]][]]"));
        assert_eq!(ty("[[][[]]]").to_string(), "[[[]][]]");
        assert!("[".parse::<SubtreeType>().is_err());
        assert!("[]]".parse::<SubtreeType>().is_err());
        assert!("[][]".parse::<SubtreeType>().is_err());
        assert!("[x]".parse::<SubtreeType>().is_err());
        assert_eq!(SubtreeType::full(2, 2).to_string(), "[[[][]][[][]]]");
    }

    #[test]
    fn enumeration_examples() {
        let t21: Vec<String> = enumerate_types(2, 1, 100)
            .unwrap()
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert_eq!(t21, ["[[][]]", "[[]]", "[]"]);
        assert_eq!(enumerate_types(2, 2, 100).unwrap().len(), 10);
        let paths: Vec<String> = enumerate_types(1, 3, 100)
            .unwrap()
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert_eq!(paths, ["[[[[]]]]", "[[[]]]", "[[]]", "[]"]);
        assert!(matches!(
            enumerate_types(2, 3, 65),
            Err(Error::EnumerationLimit { .. })
        ));
        assert_eq!(enumerate_types(2, 3, 66).unwrap().len(), 66);
    }

    #[test]
    fn enumeration_is_strictly_decreasing() {
        for (d, k) in [(2, 2), (3, 2), (2, 3)] {
            let ts = enumerate_types(d, k, 1000).unwrap();
            for w in ts.windows(2) {
                assert_eq!(
                    type_order(&w[0], &w[1]),
                    Ordering::Greater,
                    "{} vs {}",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        assert!(SubtreeType::leaf().decomposition().pairs().is_empty());
        assert_eq!(
            ty("[[][]]").decomposition().pairs(),
            &[(SubtreeType::leaf(), 2)]
        );
        let a = ty("[[]]");
        let b = SubtreeType::leaf();
        let t = SubtreeType::new(vec![a.clone(), b.clone(), a.clone()]);
        let dec = type_decomposition(&t);
        assert_eq!(dec.pairs(), &[(a, 2), (b, 1)]);
        assert_eq!(dec.root_degree(), 3);
    }

    #[test]
    fn order_examples() {
        assert_eq!(type_order(&ty("[[][][]]"), &ty("[]")), Ordering::Greater);
        // GRep_1 for d = 3 is numbered 0..3 by decreasing root degree
        let t31 = enumerate_types(3, 1, 100).unwrap();
        assert_eq!(
            t31.iter().map(SubtreeType::degree).collect::<Vec<_>>(),
            [3, 2, 1, 0]
        );
        // sequence (0,0,0) ranks above (0,0,1)
        let g = &t31;
        let s000 = SubtreeType::new(vec![g[0].clone(), g[0].clone(), g[0].clone()]);
        let s001 = SubtreeType::new(vec![g[0].clone(), g[0].clone(), g[1].clone()]);
        assert_eq!(type_order(&s000, &s001), Ordering::Greater);
        assert_eq!(type_order(&s001, &s001), Ordering::Equal);
    }

    #[test]
    fn table_records() {
        let table = TypeTable::new(2, 2, 100).unwrap();
        assert_eq!(table.index_of(&SubtreeType::full(2, 2)), Some(0));
        assert_eq!(table.index_of(&SubtreeType::leaf()), Some(9));
        let rec = serde_json::to_value(table.record(9).unwrap()).unwrap();
        assert_eq!(
            rec,
            serde_json::json!({"type": "[]", "index": 9, "level": 2})
        );
    }
}
