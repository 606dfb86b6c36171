//! Exact evaluators for the counting formulas of the partial wreath power.
//!
//! Every count is an arbitrary-precision integer. Iterated polynomials are
//! evaluated level by level starting from 1:
//!
//! * order: `S(x) = Σ_{i=0}^{d} C(d,i)² i! x^i`
//! * idempotents: `F(x) = (x + 1)^d`
//! * D-classes: `P(x) = C(x + d, d)`

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::subtree_types::SubtreeType;

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `C(n, k)` for a big `n` and small `k`.
pub fn binomial(n: &BigUint, k: usize) -> BigUint {
    if BigUint::from(k) > *n {
        return BigUint::zero();
    }
    // each prefix product is itself a binomial coefficient, so the division is exact
    let mut acc = BigUint::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

fn iterate(levels: usize, step: impl Fn(&BigUint) -> BigUint) -> BigUint {
    (0..levels).fold(BigUint::one(), |x, _| step(&x))
}

/// One step of the order recursion: `S(x)`.
pub fn order_step(degree: usize, x: &BigUint) -> BigUint {
    let d = BigUint::from(degree);
    let mut sum = BigUint::zero();
    let mut x_pow = BigUint::one();
    for i in 0..=degree {
        let c = binomial(&d, i);
        sum += &c * &c * factorial(i) * &x_pow;
        x_pow *= x;
    }
    sum
}

/// `|wr_p^k IS_d| = S^k(1)`.
pub fn order_formula(degree: usize, levels: usize) -> BigUint {
    iterate(levels, |x| order_step(degree, x))
}

/// `|E(wr_p^k IS_d)| = F^k(1)`.
pub fn idempotent_count(degree: usize, levels: usize) -> BigUint {
    iterate(levels, |x| num_traits::pow(x + 1u32, degree))
}

/// Number of D-classes, `P^k(1)`.
pub fn dclass_count(degree: usize, levels: usize) -> BigUint {
    iterate(levels, |x| binomial(&(x + degree), degree))
}

/// `|Aut T_k| = (d!)^{(d^k - 1)/(d - 1)}`, evaluated through
/// `|Aut T_k| = d! · |Aut T_{k-1}|^d` (exponent `k` when `d = 1`).
pub fn full_tree_aut_order(degree: usize, levels: usize) -> BigUint {
    let df = factorial(degree);
    iterate(levels, |x| &df * num_traits::pow(x.clone(), degree))
}

/// `|Aut Γ| = Π α_j! |Aut Γ_j|^{α_j}`.
pub fn aut_order(t: &SubtreeType) -> BigUint {
    t.decomposition()
        .pairs()
        .iter()
        .map(|(child, alpha)| factorial(*alpha) * num_traits::pow(aut_order(child), *alpha))
        .product()
}

fn check_fits(t: &SubtreeType, degree: usize, levels: usize) -> Result<()> {
    if t.depth() > levels {
        return Err(Error::InvalidType(format!(
            "type {t} has depth {} > {levels} levels",
            t.depth()
        )));
    }
    if t.max_branching() > degree {
        return Err(Error::InvalidType(format!(
            "type {t} branches more than degree {degree}"
        )));
    }
    Ok(())
}

fn orbit_recursion(
    t: &SubtreeType,
    degree: usize,
    levels: usize,
    with_multiplicities: bool,
) -> BigUint {
    if levels == 0 {
        return BigUint::one();
    }
    let l = t.degree();
    let outside = factorial(degree - l)
        * num_traits::pow(full_tree_aut_order(degree, levels - 1), degree - l);
    t.decomposition()
        .pairs()
        .iter()
        .fold(outside, |acc, (child, alpha)| {
            let inner = num_traits::pow(
                orbit_recursion(child, degree, levels - 1, with_multiplicities),
                *alpha,
            );
            if with_multiplicities {
                acc * factorial(*alpha) * inner
            } else {
                acc * inner
            }
        })
}

/// Order of the setwise stabilizer of a subtree of type `t` in `Aut T_k`.
pub fn stabilizer_order(t: &SubtreeType, degree: usize, levels: usize) -> Result<BigUint> {
    check_fits(t, degree, levels)?;
    Ok(orbit_recursion(t, degree, levels, true))
}

/// Order of the pointwise stabilizer (fixator) of a subtree of type `t` in `Aut T_k`.
pub fn fixator_order(t: &SubtreeType, degree: usize, levels: usize) -> Result<BigUint> {
    check_fits(t, degree, levels)?;
    Ok(orbit_recursion(t, degree, levels, false))
}

/// Sizes attached to the D-class of elements whose domain has type
/// `subtree_type`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DClassStats {
    #[serde(rename = "type", serialize_with = "ser_display")]
    pub subtree_type: SubtreeType,
    #[serde(serialize_with = "ser_display")]
    pub num_idempotents: BigUint,
    #[serde(serialize_with = "ser_display")]
    pub num_r_classes: BigUint,
    #[serde(serialize_with = "ser_display")]
    pub num_l_classes: BigUint,
    #[serde(serialize_with = "ser_display")]
    pub h_class_size: BigUint,
    #[serde(serialize_with = "ser_display")]
    pub d_class_size: BigUint,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Formula values for the D-class `D_Γ`: `|E| = |Aut T_k| / |St(Γ)|`,
/// one R- and one L-class per idempotent, H-classes of size `|Aut Γ|`.
pub fn dclass_stats(t: &SubtreeType, degree: usize, levels: usize) -> Result<DClassStats> {
    let stab = stabilizer_order(t, degree, levels)?;
    let full = full_tree_aut_order(degree, levels);
    let (idempotents, rem) = full.div_rem(&stab);
    if !rem.is_zero() {
        return Err(Error::Inconsistent(format!(
            "|St({t})| = {stab} does not divide |Aut T_{levels}| = {full}"
        )));
    }
    let h = aut_order(t);
    Ok(DClassStats {
        subtree_type: t.clone(),
        d_class_size: &idempotents * &idempotents * &h,
        num_r_classes: idempotents.clone(),
        num_l_classes: idempotents.clone(),
        num_idempotents: idempotents,
        h_class_size: h,
    })
}
