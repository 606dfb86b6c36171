//! Self-verification: every closed-form count and every structural
//! predicate is compared with brute-force enumeration at one `(d, k)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::counting::{self, DClassStats};
use crate::error::{check_cap, Result};
use crate::green::{self, GreenOracle, GreenRelation};
use crate::subtree_types::{canonical_type, enumerate_types, SubtreeType};
use crate::tree_paut::{PartialTreeAut, RootedSubtree, TreeShape};
use crate::wreath::{enumerate_wreath, WreathElement};

/// Universes up to this size get exhaustive associativity checks.
const EXHAUSTIVE_TRIPLES: usize = 40;
/// Universes up to this size get exhaustive pairwise checks.
const EXHAUSTIVE_PAIRS: usize = 200;
const MAX_REPORTED: usize = 20;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub degree: usize,
    pub levels: usize,
    pub max_elements: u64,
    pub oracle_cap: u64,
    /// Random pairs/triples for universes too large for exhaustive checks.
    pub samples: usize,
    pub seed: u64,
}

impl VerifyConfig {
    pub fn new(degree: usize, levels: usize) -> Self {
        Self {
            degree,
            levels,
            max_elements: 100_000,
            oracle_cap: green::DEFAULT_ORACLE_CAP,
            samples: 100_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub relation: String,
    pub pair: String,
    pub expected: String,
    pub observed: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} expected {} observed {}",
            self.relation, self.pair, self.expected, self.observed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub mismatches: Vec<Mismatch>,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Recorder<'a> {
    name: &'a str,
    mismatches: Vec<Mismatch>,
    count: usize,
}

impl<'a> Recorder<'a> {
    fn new(name: &'a str) -> Self {
        Self {
            name,
            mismatches: Vec::new(),
            count: 0,
        }
    }

    fn expect(
        &mut self,
        ok: bool,
        pair: impl FnOnce() -> String,
        expected: impl fmt::Display,
        observed: impl fmt::Display,
    ) {
        if ok {
            return;
        }
        self.count += 1;
        if self.mismatches.len() < MAX_REPORTED {
            self.mismatches.push(Mismatch {
                relation: self.name.to_owned(),
                pair: pair(),
                expected: expected.to_string(),
                observed: observed.to_string(),
            });
        }
    }

    fn eq<T: PartialEq + fmt::Display>(&mut self, what: &str, expected: T, observed: T) {
        let ok = expected == observed;
        self.expect(ok, || what.to_owned(), expected, observed);
    }

    fn finish(self, detail: impl Into<String>) -> Check {
        let detail = detail.into();
        Check {
            name: self.name.to_owned(),
            passed: self.count == 0,
            detail: if self.count == 0 {
                detail
            } else {
                format!("{detail}; {} mismatches", self.count)
            },
            mismatches: self.mismatches,
        }
    }
}

/// Index pairs to check: all of them for small universes, otherwise a
/// seeded sample.
fn pair_indices(
    n: usize,
    limit: usize,
    samples: usize,
    rng: &mut StdRng,
) -> (Vec<(usize, usize)>, bool) {
    if n * n <= limit {
        (
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
            true,
        )
    } else {
        (
            (0..samples)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect(),
            false,
        )
    }
}

fn scope(exhaustive: bool, count: usize) -> String {
    if exhaustive {
        format!("{count} cases, exhaustive")
    } else {
        format!("{count} cases, sampled")
    }
}

/// Runs the whole invariant suite at `(d, k)`. Fails with
/// [`crate::Error::EnumerationLimit`] when `S^k(1)` exceeds the element cap.
pub fn verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let (d, k) = (cfg.degree, cfg.levels);
    let shape = TreeShape::new(d, k)?;
    let predicted = counting::order_formula(d, k);
    check_cap(format!("wr^{k} IS_{d}"), &predicted, cfg.max_elements)?;

    let elements: Vec<WreathElement> = enumerate_wreath(d, k, cfg.max_elements)?.collect();
    let n = elements.len();
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut report = VerifyReport::default();

    // order
    let mut rec = Recorder::new("order");
    rec.eq(
        "|enumerate_wreath| vs S^k(1)",
        predicted.clone(),
        BigUint::from(n),
    );
    let distinct: std::collections::HashSet<Vec<u8>> =
        elements.iter().map(WreathElement::canonical_key).collect();
    rec.eq("distinct canonical keys", n, distinct.len());
    report.checks.push(rec.finish(format!("{n} elements")));

    // idempotents
    let mut rec = Recorder::new("idempotents");
    let mut idempotents = Vec::new();
    for (i, x) in elements.iter().enumerate() {
        let by_square = x.mul(x) == *x;
        rec.expect(
            by_square == x.is_idempotent_structural(),
            || x.to_string(),
            format!("x·x = x is {by_square}"),
            format!("structural test {}", x.is_idempotent_structural()),
        );
        if by_square {
            idempotents.push(i);
        }
    }
    rec.eq(
        "F^k(1)",
        counting::idempotent_count(d, k),
        BigUint::from(idempotents.len()),
    );
    report
        .checks
        .push(rec.finish(format!("{} idempotents", idempotents.len())));

    // associativity
    let mut rec = Recorder::new("associativity");
    let triples: Vec<(usize, usize, usize)> = if n <= EXHAUSTIVE_TRIPLES {
        (0..n)
            .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
            .collect()
    } else {
        (0..cfg.samples)
            .map(|_| {
                (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                )
            })
            .collect()
    };
    for &(a, b, c) in &triples {
        let (x, y, z) = (&elements[a], &elements[b], &elements[c]);
        let left = x.mul(y).mul(z);
        let right = x.mul(&y.mul(z));
        rec.expect(left == right, || format!("({x}, {y}, {z})"), &left, &right);
    }
    report
        .checks
        .push(rec.finish(scope(n <= EXHAUSTIVE_TRIPLES, triples.len())));

    // inverse semigroup axioms
    let mut rec = Recorder::new("inverse");
    for x in &elements {
        let inv = x.inverse();
        let xix = x.mul(&inv).mul(x);
        rec.expect(xix == *x, || x.to_string(), x, &xix);
        let ixi = inv.mul(x).mul(&inv);
        rec.expect(ixi == inv, || x.to_string(), &inv, &ixi);
        rec.expect(inv.inverse() == *x, || x.to_string(), x, inv.inverse());
    }
    let m = idempotents.len();
    let (pairs, exhaustive) = pair_indices(
        m,
        EXHAUSTIVE_PAIRS * EXHAUSTIVE_PAIRS,
        cfg.samples,
        &mut rng,
    );
    for &(i, j) in &pairs {
        let (e, f) = (&elements[idempotents[i]], &elements[idempotents[j]]);
        let (ef, fe) = (e.mul(f), f.mul(e));
        rec.expect(
            ef == fe,
            || format!("idempotents ({e}, {f}) commute"),
            &ef,
            &fe,
        );
    }
    report
        .checks
        .push(rec.finish(format!("{n} inverses, {}", scope(exhaustive, pairs.len()))));

    // isomorphism with partial tree automorphisms
    let mut rec = Recorder::new("tree isomorphism");
    let maps: Vec<PartialTreeAut> = elements
        .iter()
        .map(|x| PartialTreeAut::from_wreath(x, shape))
        .collect::<Result<_>>()?;
    for (x, s) in elements.iter().zip(&maps) {
        if let Err(e) = s.check_invariants() {
            rec.expect(false, || x.to_string(), "valid tree map", e);
        }
        let back = s.to_wreath();
        rec.expect(back == *x, || x.to_string(), x, &back);
    }
    let distinct_maps: std::collections::HashSet<&PartialTreeAut> = maps.iter().collect();
    rec.eq("distinct tree maps", n, distinct_maps.len());
    let (pairs, exhaustive) = pair_indices(
        n,
        EXHAUSTIVE_PAIRS * EXHAUSTIVE_PAIRS,
        cfg.samples,
        &mut rng,
    );
    for &(i, j) in &pairs {
        let st = maps[i].compose(&maps[j])?;
        if let Err(e) = st.check_invariants() {
            rec.expect(
                false,
                || format!("({}, {})", elements[i], elements[j]),
                "valid composite",
                e,
            );
        }
        let via_tree = st.to_wreath();
        let via_wreath = elements[i].mul(&elements[j]);
        rec.expect(
            via_tree == via_wreath,
            || format!("({}, {})", elements[i], elements[j]),
            &via_wreath,
            &via_tree,
        );
    }
    report.checks.push(rec.finish(format!(
        "{n} round trips, {}",
        scope(exhaustive, pairs.len())
    )));

    // subtree types and the D-class count
    let types = enumerate_types(d, k, cfg.max_elements)?;
    let mut rec = Recorder::new("dclass count");
    rec.eq(
        "P^k(1) vs |types|",
        counting::dclass_count(d, k),
        BigUint::from(types.len()),
    );
    let domain_types: Vec<SubtreeType> = maps
        .iter()
        .map(|s| canonical_type(&s.domain_subtree()))
        .collect();
    let observed_types: std::collections::HashSet<&SubtreeType> = domain_types.iter().collect();
    rec.eq("distinct domain types", types.len(), observed_types.len());
    report
        .checks
        .push(rec.finish(format!("{} types", types.len())));

    // formulas per D-class vs observed classification
    let mut rec = Recorder::new("dclass stats");
    let formula: Vec<DClassStats> = types
        .iter()
        .map(|t| counting::dclass_stats(t, d, k))
        .collect::<Result<_>>()?;
    let observed = green::classify(d, k, cfg.max_elements)?;
    let observed_by_type: HashMap<&SubtreeType, &green::ObservedDClass> = observed
        .iter()
        .map(|o| (&o.stats.subtree_type, o))
        .collect();
    for f in &formula {
        let t = &f.subtree_type;
        match observed_by_type.get(t) {
            None => rec.expect(false, || t.to_string(), "a non-empty class", "no elements"),
            Some(o) => {
                rec.expect(
                    o.stats == *f,
                    || t.to_string(),
                    stats_line(f),
                    stats_line(&o.stats),
                );
                rec.expect(
                    o.h_class_sizes.len() == 1,
                    || t.to_string(),
                    "uniform H-classes",
                    format!("{:?}", o.h_class_sizes),
                );
                let one = std::collections::BTreeSet::from([1usize]);
                rec.expect(
                    o.idempotents_per_r_class == one,
                    || t.to_string(),
                    "one idempotent per R-class",
                    format!("{:?}", o.idempotents_per_r_class),
                );
                rec.expect(
                    o.idempotents_per_l_class == one,
                    || t.to_string(),
                    "one idempotent per L-class",
                    format!("{:?}", o.idempotents_per_l_class),
                );
            }
        }
    }
    let total: BigUint = formula.iter().map(|f| &f.d_class_size).sum();
    rec.eq("Σ|D| vs S^k(1)", predicted.clone(), total);
    let total_e: BigUint = formula.iter().map(|f| &f.num_idempotents).sum();
    rec.eq(
        "Σ|E(D)| vs F^k(1)",
        counting::idempotent_count(d, k),
        total_e,
    );
    report
        .checks
        .push(rec.finish(format!("{} classes", formula.len())));

    // orbit-stabilizer over all subtrees, and stabilizers/fixators over Aut T_k
    let subtree_count = counting::idempotent_count(d, k);
    if subtree_count <= BigUint::from(cfg.max_elements) {
        let mut rec = Recorder::new("orbit stabilizer");
        let full = counting::full_tree_aut_order(d, k);
        let mut orbit_sizes: BTreeMap<SubtreeType, u64> = BTreeMap::new();
        let subtrees = RootedSubtree::enumerate(shape);
        let mut representative: HashMap<SubtreeType, RootedSubtree> = HashMap::new();
        for s in &subtrees {
            let t = canonical_type(s);
            *orbit_sizes.entry(t.clone()).or_default() += 1;
            representative.entry(t).or_insert_with(|| s.clone());
        }
        for t in &types {
            let stab = counting::stabilizer_order(t, d, k)?;
            let orbit = BigUint::from(orbit_sizes.get(t).copied().unwrap_or(0));
            rec.expect(
                &full / &stab == orbit && (&full % &stab) == BigUint::from(0u8),
                || t.to_string(),
                format!("|Aut T_k|/|St| = {}/{}", full, stab),
                orbit,
            );
            let aut = counting::aut_order(t);
            rec.expect(
                aut <= stab && stab <= full,
                || t.to_string(),
                "|Aut Γ| <= |St| <= |Aut T_k|",
                format!("{aut}, {stab}, {full}"),
            );
        }
        let automorphisms: Vec<&PartialTreeAut> = maps
            .iter()
            .zip(&domain_types)
            .filter(|(_, t)| t.vertex_count() == shape.vertices().len())
            .map(|(s, _)| s)
            .collect();
        rec.eq(
            "|units| vs |Aut T_k|",
            full.clone(),
            BigUint::from(automorphisms.len()),
        );
        for t in &types {
            let rep = &representative[t];
            let (mut stab, mut fix) = (0u64, 0u64);
            for g in &automorphisms {
                let image: Vec<_> = rep.vertices().iter().map(|v| g.apply(v).unwrap()).collect();
                if image.iter().all(|w| rep.contains(w)) {
                    stab += 1;
                    if image.iter().zip(rep.vertices()).all(|(w, v)| *w == v) {
                        fix += 1;
                    }
                }
            }
            rec.eq(
                &format!("St({t}) by brute force"),
                counting::stabilizer_order(t, d, k)?,
                BigUint::from(stab),
            );
            rec.eq(
                &format!("Fix({t}) by brute force"),
                counting::fixator_order(t, d, k)?,
                BigUint::from(fix),
            );
        }
        report.checks.push(rec.finish(format!(
            "{} subtrees, {} automorphisms",
            subtrees.len(),
            automorphisms.len()
        )));
    }

    // Green's relations against the brute-force oracle
    if (n as u64) <= cfg.oracle_cap {
        let oracle = GreenOracle::build(&elements, cfg.oracle_cap)?;
        let mut rec = Recorder::new("green");
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (&elements[i], &elements[j]);
                let structural = [
                    (GreenRelation::L, green::l_related(x, y)),
                    (GreenRelation::R, green::r_related(x, y)),
                    (GreenRelation::H, green::h_related(x, y)),
                    (GreenRelation::D, domain_types[i] == domain_types[j]),
                ];
                for (rel, value) in structural {
                    let truth = oracle.related(rel, i, j);
                    rec.expect(
                        truth == value,
                        || format!("{rel:?} ({x}, {y})"),
                        truth,
                        value,
                    );
                }
                let dj = oracle.related(GreenRelation::D, i, j)
                    == oracle.related(GreenRelation::J, i, j);
                rec.expect(dj, || format!("D = J at ({x}, {y})"), true, false);
                let by_bijection =
                    green::d_related_by_bijection(x, y, green::DEFAULT_BIJECTION_BUDGET)?;
                rec.expect(
                    by_bijection == (domain_types[i] == domain_types[j]),
                    || format!("D bijection vs type ({x}, {y})"),
                    domain_types[i] == domain_types[j],
                    by_bijection,
                );
            }
        }
        report.checks.push(rec.finish(format!("{} pairs", n * n)));

        let mut rec = Recorder::new("egg box");
        for egg in oracle.egg_boxes() {
            let rep = egg.members[0];
            let t = &domain_types[rep];
            let stats = counting::dclass_stats(t, d, k)?;
            rec.eq(
                &format!("rows of {t}"),
                stats.num_r_classes.clone(),
                BigUint::from(egg.rows()),
            );
            rec.eq(
                &format!("columns of {t}"),
                stats.num_l_classes.clone(),
                BigUint::from(egg.columns()),
            );
            rec.expect(
                egg.uniform_cell_size().map(BigUint::from) == Some(stats.h_class_size.clone()),
                || t.to_string(),
                format!("uniform H-classes of size {}", stats.h_class_size),
                format!("{:?}", egg.cells),
            );
            rec.expect(
                egg.idempotents_per_row
                    .iter()
                    .chain(&egg.idempotents_per_column)
                    .all(|&c| c == 1),
                || t.to_string(),
                "one idempotent per R- and L-class",
                format!(
                    "{:?} / {:?}",
                    egg.idempotents_per_row, egg.idempotents_per_column
                ),
            );
        }
        report.checks.push(rec.finish(format!(
            "{} D-classes",
            oracle.classes(GreenRelation::D).len()
        )));
    }

    Ok(report)
}

fn stats_line(s: &DClassStats) -> String {
    format!(
        "E={} R={} L={} H={} D={}",
        s.num_idempotents, s.num_r_classes, s.num_l_classes, s.h_class_size, s.d_class_size
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    #[test]
    fn small_grid_passes() {
        for (d, k) in [(1, 1), (1, 2), (2, 1), (3, 1), (2, 2)] {
            let report = verify(&VerifyConfig::new(d, k)).unwrap();
            if let Some(c) = report.failures().next() {
                panic!("({d},{k}) {}: {} {:?}", c.name, c.detail, c.mismatches);
            }
            assert!(report.check("green").is_some());
        }
    }

    #[test]
    fn cap_is_reported() {
        let mut cfg = VerifyConfig::new(2, 3);
        cfg.max_elements = 1000;
        assert!(matches!(verify(&cfg), Err(Error::EnumerationLimit { .. })));
    }
}
