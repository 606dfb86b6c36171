//! Green's relations on `wr_p^k IS_d`.
//!
//! The structural predicates work on the pair form `(f, a)`:
//!
//! * L: `ran(a) = ran(b)` and `f(z a⁻¹) L g(z b⁻¹)` for every `z ∈ ran(a)`;
//! * R: `dom(a) = dom(b)` and `f(z) R g(z)` for every `z ∈ dom(a)`;
//! * H: L and R;
//! * D: the domains of the tree maps are isomorphic.
//!
//! At level 1 the conditions reduce to equal ranges and equal domains.
//! [`GreenOracle`] recomputes every relation from the definitions by brute
//! force over a Cayley table, with an identity adjoined.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;

use crate::counting::DClassStats;
use crate::error::{check_cap, Error, Result};
use crate::subtree_types::{canonical_type, SubtreeType, TypeTable};
use crate::tree_paut::{PartialTreeAut, RootedSubtree, TreeShape};
use crate::wreath::{enumerate_wreath, WreathElement};

fn same_semigroup(x: &WreathElement, y: &WreathElement) -> bool {
    x.degree() == y.degree() && x.level() == y.level()
}

/// Elements of different `(d, k)` are never related.
pub fn l_related(x: &WreathElement, y: &WreathElement) -> bool {
    if !same_semigroup(x, y) || x.top().range() != y.top().range() {
        return false;
    }
    x.top().range().into_iter().all(|z| {
        match (
            x.child(x.top().preimage(z).unwrap()),
            y.child(y.top().preimage(z).unwrap()),
        ) {
            (Some(f), Some(g)) => l_related(f, g),
            _ => true,
        }
    })
}

pub fn r_related(x: &WreathElement, y: &WreathElement) -> bool {
    if !same_semigroup(x, y) || !x.top().domain().eq(y.top().domain()) {
        return false;
    }
    x.children()
        .iter()
        .zip(y.children())
        .all(|(f, g)| r_related(f, g))
}

pub fn h_related(x: &WreathElement, y: &WreathElement) -> bool {
    l_related(x, y) && r_related(x, y)
}

fn tree_map(x: &WreathElement) -> PartialTreeAut {
    let shape = TreeShape::new(x.degree(), x.level()).expect("valid element");
    PartialTreeAut::from_wreath(x, shape).expect("shape built from the element")
}

/// Isomorphism type of the domain of the tree map of `x`.
pub fn domain_type(x: &WreathElement) -> SubtreeType {
    canonical_type(&tree_map(x).domain_subtree())
}

pub fn d_related_by_type(x: &WreathElement, y: &WreathElement) -> bool {
    same_semigroup(x, y) && domain_type(x) == domain_type(y)
}

/// Default node budget for [`d_related_by_bijection`].
pub const DEFAULT_BIJECTION_BUDGET: u64 = 1_000_000;

/// Searches for a bijection `dom(b) → dom(a)` pairing recursively D-related
/// children. `budget` bounds the number of candidate pairings tried.
pub fn d_related_by_bijection(x: &WreathElement, y: &WreathElement, budget: u64) -> Result<bool> {
    if !same_semigroup(x, y) {
        return Ok(false);
    }
    let mut left = budget;
    bijection_search(x, y, &mut left).map_err(|()| {
        Error::SearchLimit(format!(
            "bijection search over {x} and {y} exceeded {budget} steps"
        ))
    })
}

fn bijection_search(
    x: &WreathElement,
    y: &WreathElement,
    budget: &mut u64,
) -> std::result::Result<bool, ()> {
    if x.top().rank() != y.top().rank() {
        return Ok(false);
    }
    if x.level() == 1 {
        return Ok(true);
    }

    fn assign(
        xs: &[WreathElement],
        ys: &[WreathElement],
        pos: usize,
        used: &mut [bool],
        budget: &mut u64,
    ) -> std::result::Result<bool, ()> {
        if pos == ys.len() {
            return Ok(true);
        }
        for i in 0..xs.len() {
            if used[i] {
                continue;
            }
            if *budget == 0 {
                return Err(());
            }
            *budget -= 1;
            if bijection_search(&xs[i], &ys[pos], budget)? {
                used[i] = true;
                if assign(xs, ys, pos + 1, used, budget)? {
                    return Ok(true);
                }
                used[i] = false;
            }
        }
        Ok(false)
    }

    let mut used = vec![false; x.children().len()];
    assign(x.children(), y.children(), 0, &mut used, budget)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GreenRelation {
    L,
    R,
    H,
    D,
    J,
}

impl GreenRelation {
    pub const ALL: [GreenRelation; 5] = [Self::L, Self::R, Self::H, Self::D, Self::J];
}

/// Default universe bound for [`GreenOracle::build`].
pub const DEFAULT_ORACLE_CAP: u64 = 2000;

/// Green's relations of a finite semigroup computed from principal ideals.
///
/// `x L y` iff `S¹x = S¹y`, `x R y` iff `xS¹ = yS¹`, `x J y` iff
/// `S¹xS¹ = S¹yS¹`, and `x D y` iff some `z` has `x L z` and `z R y`.
#[derive(Debug, Clone)]
pub struct GreenOracle {
    elements: Vec<WreathElement>,
    index: HashMap<WreathElement, usize>,
    table: Vec<u32>,
    l_class: Vec<usize>,
    r_class: Vec<usize>,
    j_class: Vec<usize>,
    lr_pairs: HashSet<(usize, usize)>,
}

fn class_ids(ideals: &[FixedBitSet]) -> Vec<usize> {
    let mut ids: HashMap<&FixedBitSet, usize> = HashMap::new();
    ideals
        .iter()
        .map(|s| {
            let next = ids.len();
            *ids.entry(s).or_insert(next)
        })
        .collect()
}

impl GreenOracle {
    /// Builds the oracle for a universe that must be closed under products.
    pub fn build(universe: &[WreathElement], cap: u64) -> Result<Self> {
        let n = universe.len();
        check_cap("Green oracle universe", &BigUint::from(n), cap)?;
        let index: HashMap<WreathElement, usize> = universe
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        if index.len() != n {
            return Err(Error::Inconsistent("universe contains duplicates".into()));
        }
        let mut table = vec![0u32; n * n];
        for (i, x) in universe.iter().enumerate() {
            for (j, y) in universe.iter().enumerate() {
                let p = x.compose(y)?;
                let k = *index.get(&p).ok_or_else(|| {
                    Error::Inconsistent(format!("universe is not closed: {x} · {y} = {p}"))
                })?;
                table[i * n + j] = k as u32;
            }
        }

        let mut left = vec![FixedBitSet::with_capacity(n); n];
        let mut right = vec![FixedBitSet::with_capacity(n); n];
        for y in 0..n {
            left[y].insert(y);
            right[y].insert(y);
            for u in 0..n {
                left[y].insert(table[u * n + y] as usize);
                right[y].insert(table[y * n + u] as usize);
            }
        }
        let two_sided: Vec<FixedBitSet> = (0..n)
            .map(|y| {
                let mut s = left[y].clone();
                for w in left[y].ones() {
                    s.union_with(&right[w]);
                }
                s
            })
            .collect();

        let l_class = class_ids(&left);
        let r_class = class_ids(&right);
        let j_class = class_ids(&two_sided);
        let lr_pairs = (0..n).map(|z| (l_class[z], r_class[z])).collect();
        Ok(Self {
            elements: universe.to_vec(),
            index,
            table,
            l_class,
            r_class,
            j_class,
            lr_pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[WreathElement] {
        &self.elements
    }

    pub fn index_of(&self, x: &WreathElement) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn product(&self, i: usize, j: usize) -> usize {
        self.table[i * self.len() + j] as usize
    }

    pub fn is_idempotent(&self, i: usize) -> bool {
        self.product(i, i) == i
    }

    pub fn related(&self, rel: GreenRelation, i: usize, j: usize) -> bool {
        match rel {
            GreenRelation::L => self.l_class[i] == self.l_class[j],
            GreenRelation::R => self.r_class[i] == self.r_class[j],
            GreenRelation::H => {
                self.l_class[i] == self.l_class[j] && self.r_class[i] == self.r_class[j]
            }
            GreenRelation::D => self.lr_pairs.contains(&(self.l_class[i], self.r_class[j])),
            GreenRelation::J => self.j_class[i] == self.j_class[j],
        }
    }

    /// The relation as an explicit set of index pairs.
    pub fn pairs(&self, rel: GreenRelation) -> BTreeSet<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.related(rel, i, j))
            .collect()
    }

    /// Equivalence classes (each sorted, ordered by smallest member).
    pub fn classes(&self, rel: GreenRelation) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut assigned = vec![false; self.len()];
        for i in 0..self.len() {
            if assigned[i] {
                continue;
            }
            let class: Vec<usize> = (i..self.len())
                .filter(|&j| self.related(rel, i, j))
                .collect();
            for &j in &class {
                assigned[j] = true;
            }
            out.push(class);
        }
        out
    }

    /// The egg-box of every D-class: rows are R-classes, columns L-classes.
    pub fn egg_boxes(&self) -> Vec<EggBox> {
        self.classes(GreenRelation::D)
            .into_iter()
            .map(|members| {
                let mut rows: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                let mut cols: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for &m in &members {
                    rows.entry(self.r_class[m]).or_default().push(m);
                    cols.entry(self.l_class[m]).or_default().push(m);
                }
                let cells = rows
                    .keys()
                    .map(|r| {
                        cols.keys()
                            .map(|l| {
                                members
                                    .iter()
                                    .filter(|&&m| self.r_class[m] == *r && self.l_class[m] == *l)
                                    .count()
                            })
                            .collect()
                    })
                    .collect();
                let idem =
                    |class: &Vec<usize>| class.iter().filter(|&&m| self.is_idempotent(m)).count();
                EggBox {
                    idempotents_per_row: rows.values().map(idem).collect(),
                    idempotents_per_column: cols.values().map(idem).collect(),
                    members,
                    cells,
                }
            })
            .collect()
    }
}

/// A D-class laid out as an R × L grid of H-class sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EggBox {
    pub members: Vec<usize>,
    pub cells: Vec<Vec<usize>>,
    pub idempotents_per_row: Vec<usize>,
    pub idempotents_per_column: Vec<usize>,
}

impl EggBox {
    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn columns(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    /// The common size of all H-classes, if the grid is uniform and full.
    pub fn uniform_cell_size(&self) -> Option<usize> {
        let first = *self.cells.first()?.first()?;
        (first > 0 && self.cells.iter().flatten().all(|&c| c == first)).then_some(first)
    }
}

/// Statistics of one D-class as observed by enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedDClass {
    pub index: usize,
    pub stats: DClassStats,
    /// Distinct H-class sizes seen in the class; a single value when uniform.
    pub h_class_sizes: BTreeSet<usize>,
    /// Idempotents seen per R-class and per L-class.
    pub idempotents_per_r_class: BTreeSet<usize>,
    pub idempotents_per_l_class: BTreeSet<usize>,
}

/// Partitions `wr_p^k IS_d` into D-classes by domain type and measures each
/// class. R- and L-classes are identified by the domain and range of the
/// tree maps, H-classes by both. Rows follow the type table order.
pub fn classify(degree: usize, levels: usize, cap: u64) -> Result<Vec<ObservedDClass>> {
    #[derive(Default)]
    struct Acc {
        size: u64,
        idempotents: u64,
        r: BTreeMap<RootedSubtree, usize>,
        l: BTreeMap<RootedSubtree, usize>,
        h: HashMap<(RootedSubtree, RootedSubtree), usize>,
    }

    let elements = enumerate_wreath(degree, levels, cap)?;
    let table = TypeTable::new(degree, levels, cap)?;
    let shape = TreeShape::new(degree, levels)?;
    let mut classes: HashMap<SubtreeType, Acc> = HashMap::new();
    for x in elements {
        let map = PartialTreeAut::from_wreath(&x, shape)?;
        let dom = map.domain_subtree();
        let ran = map.range_subtree();
        let acc = classes.entry(canonical_type(&dom)).or_default();
        let idem = x.is_idempotent_structural() as usize;
        acc.size += 1;
        acc.idempotents += idem as u64;
        *acc.r.entry(dom.clone()).or_default() += idem;
        *acc.l.entry(ran.clone()).or_default() += idem;
        *acc.h.entry((dom, ran)).or_default() += 1;
    }

    let mut rows: Vec<ObservedDClass> = classes
        .into_iter()
        .map(|(t, acc)| {
            let index = table.index_of(&t).ok_or_else(|| {
                Error::Inconsistent(format!("domain type {t} missing from the type table"))
            })?;
            let h_class_sizes: BTreeSet<usize> = acc.h.values().copied().collect();
            let h = *h_class_sizes.iter().next().unwrap();
            Ok(ObservedDClass {
                index,
                stats: DClassStats {
                    subtree_type: t,
                    num_idempotents: BigUint::from(acc.idempotents),
                    num_r_classes: BigUint::from(acc.r.len()),
                    num_l_classes: BigUint::from(acc.l.len()),
                    h_class_size: BigUint::from(h),
                    d_class_size: BigUint::from(acc.size),
                },
                h_class_sizes,
                idempotents_per_r_class: acc.r.values().copied().collect(),
                idempotents_per_l_class: acc.l.values().copied().collect(),
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| r.index);
    Ok(rows)
}
