#![allow(dead_code)]

use std::collections::BTreeSet;

use ispwr_core::tree_paut::{RootedSubtree, Vertex};
use ispwr_core::{PartialPerm, WreathElement};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random partial permutation; the density is itself random so that every
/// rank shows up.
pub fn random_pp<R: Rng>(rng: &mut R, degree: usize) -> PartialPerm {
    let mut perm: Vec<usize> = (0..degree).collect();
    perm.shuffle(rng);
    let p: f64 = rng.gen();
    let images: Vec<Option<usize>> = perm
        .into_iter()
        .map(|y| rng.gen_bool(p).then_some(y))
        .collect();
    PartialPerm::new(&images).unwrap()
}

pub fn random_element<R: Rng>(rng: &mut R, degree: usize, level: usize) -> WreathElement {
    let top = random_pp(rng, degree);
    if level == 1 {
        return WreathElement::base(top);
    }
    let children = (0..top.rank())
        .map(|_| random_element(rng, degree, level - 1))
        .collect();
    WreathElement::from_parts(level, top, children).unwrap()
}

fn children_of(vs: &BTreeSet<Vertex>, v: &Vertex, degree: usize) -> Vec<Vertex> {
    (0..degree)
        .map(|i| v.child(i))
        .filter(|c| vs.contains(c))
        .collect()
}

fn iso_at(
    a: &BTreeSet<Vertex>,
    u: &Vertex,
    b: &BTreeSet<Vertex>,
    v: &Vertex,
    degree: usize,
) -> bool {
    let cu = children_of(a, u, degree);
    let cv = children_of(b, v, degree);
    if cu.len() != cv.len() {
        return false;
    }
    // try every matching of the children by backtracking
    fn assign(
        a: &BTreeSet<Vertex>,
        b: &BTreeSet<Vertex>,
        cu: &[Vertex],
        cv: &[Vertex],
        used: &mut Vec<bool>,
        i: usize,
        degree: usize,
    ) -> bool {
        if i == cu.len() {
            return true;
        }
        for j in 0..cv.len() {
            if !used[j] && iso_at(a, &cu[i], b, &cv[j], degree) {
                used[j] = true;
                if assign(a, b, cu, cv, used, i + 1, degree) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    assign(a, b, &cu, &cv, &mut vec![false; cv.len()], 0, degree)
}

/// Brute-force rooted-tree isomorphism, independent of any canonical form.
pub fn isomorphic(a: &RootedSubtree, b: &RootedSubtree) -> bool {
    a.len() == b.len()
        && iso_at(
            a.vertices(),
            &Vertex::root(),
            b.vertices(),
            &Vertex::root(),
            a.shape().degree(),
        )
}

/// Number of isomorphism classes among the subtrees, by pairwise search.
pub fn count_iso_classes(subtrees: &[RootedSubtree]) -> usize {
    let mut reps: Vec<&RootedSubtree> = Vec::new();
    for s in subtrees {
        if !reps.iter().any(|r| isomorphic(r, s)) {
            reps.push(s);
        }
    }
    reps.len()
}
