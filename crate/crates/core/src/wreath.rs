//! The partial wreath power `wr_p^k IS_d`.
//!
//! A level-`k` element is a pair `(f, a)`: `a` is a partial permutation of
//! degree `d` and `f` assigns a level-`(k-1)` element to every point of
//! `dom(a)`. Level 1 is `IS_d` itself. Products follow
//! `(f, a)(g, b) = (f g^a, ab)` with `g^a(x) = g(xa)`.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::Value;

use crate::counting;
use crate::error::{check_cap, Error, Result};
use crate::partial_perm::{enumerate_is, PartialPerm};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WreathElement {
    level: usize,
    top: PartialPerm,
    /// One child per domain point of `top`, in increasing point order.
    children: Vec<WreathElement>,
}

impl WreathElement {
    /// A level-1 element.
    pub fn base(top: PartialPerm) -> Self {
        Self {
            level: 1,
            top,
            children: Vec::new(),
        }
    }

    /// Builds an element from its top and the children listed in increasing
    /// order of the domain points of `top`.
    pub fn from_parts(
        level: usize,
        top: PartialPerm,
        children: Vec<WreathElement>,
    ) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidElement("level must be at least 1".into()));
        }
        let expected = if level == 1 { 0 } else { top.rank() };
        if children.len() != expected {
            return Err(Error::InvalidElement(format!(
                "level {level} element with top of rank {} needs {expected} children, got {}",
                top.rank(),
                children.len()
            )));
        }
        for c in &children {
            if c.degree() != top.degree() {
                return Err(Error::DegreeMismatch {
                    left: top.degree(),
                    right: c.degree(),
                });
            }
            if c.level + 1 != level {
                return Err(Error::LevelMismatch {
                    left: level - 1,
                    right: c.level,
                });
            }
        }
        Ok(Self {
            level,
            top,
            children,
        })
    }

    /// Builds an element from an explicit assignment `point ↦ child`
    /// (0-based points); the assignment must cover exactly `dom(top)`.
    pub fn new(
        level: usize,
        top: PartialPerm,
        children: BTreeMap<usize, WreathElement>,
    ) -> Result<Self> {
        let points: Vec<usize> = children.keys().copied().collect();
        if level > 1 && points != top.domain().collect::<Vec<_>>() {
            return Err(Error::InvalidElement(
                "children must be defined exactly on the domain of the top".into(),
            ));
        }
        Self::from_parts(level, top, children.into_values().collect())
    }

    /// The zero: empty top, no children.
    pub fn zero(degree: usize, level: usize) -> Self {
        assert!(level >= 1);
        Self {
            level,
            top: PartialPerm::empty(degree),
            children: Vec::new(),
        }
    }

    pub fn identity(degree: usize, level: usize) -> Self {
        assert!(level >= 1);
        let children = if level == 1 {
            Vec::new()
        } else {
            vec![Self::identity(degree, level - 1); degree]
        };
        Self {
            level,
            top: PartialPerm::identity(degree),
            children,
        }
    }

    pub fn degree(&self) -> usize {
        self.top.degree()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn top(&self) -> &PartialPerm {
        &self.top
    }

    pub fn children(&self) -> &[WreathElement] {
        &self.children
    }

    /// `f(point)` for a 0-based point of `dom(top)`; `None` at level 1.
    pub fn child(&self, point: usize) -> Option<&WreathElement> {
        self.top
            .domain_index(point)
            .and_then(|n| self.children.get(n))
    }

    fn check_compatible(&self, other: &WreathElement) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        if self.level != other.level {
            return Err(Error::LevelMismatch {
                left: self.level,
                right: other.level,
            });
        }
        Ok(())
    }

    pub fn compose(&self, other: &WreathElement) -> Result<WreathElement> {
        self.check_compatible(other)?;
        Ok(self.mul(other))
    }

    pub(crate) fn mul(&self, other: &WreathElement) -> WreathElement {
        let top = self.top.compose_unchecked(&other.top);
        let children = if self.level == 1 {
            Vec::new()
        } else {
            top.domain()
                .map(|c| {
                    let f = self.child(c).expect("c in dom(a)");
                    let g = other
                        .child(self.top.image(c).unwrap())
                        .expect("ca in dom(b)");
                    f.mul(g)
                })
                .collect()
        };
        WreathElement {
            level: self.level,
            top,
            children,
        }
    }

    /// The inverse `(h, a⁻¹)` with `h(z) = f(z a⁻¹)⁻¹` for `z ∈ ran(a)`.
    pub fn inverse(&self) -> WreathElement {
        let top = self.top.inverse();
        let children = if self.level == 1 {
            Vec::new()
        } else {
            top.domain()
                .map(|z| self.child(top.image(z).unwrap()).unwrap().inverse())
                .collect()
        };
        WreathElement {
            level: self.level,
            top,
            children,
        }
    }

    /// `a` idempotent and every child idempotent, recursively.
    pub fn is_idempotent_structural(&self) -> bool {
        self.top.is_idempotent() && self.children.iter().all(Self::is_idempotent_structural)
    }

    /// Deterministic byte encoding; equal keys exactly for equal elements.
    ///
    /// Layout: degree (1 byte), level (4 bytes little-endian), then the body.
    /// A body is the `d` images of the top (`0xFF` for undefined, otherwise the
    /// 0-based image) followed by the children's bodies in increasing order of
    /// their points. The zero of `(d, k) = (2, 2)` is
    /// `02 02 00 00 00 FF FF`.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(5 + self.degree() * 4);
        out.push(self.degree() as u8);
        out.extend_from_slice(&(self.level as u32).to_le_bytes());
        self.write_body(&mut out);
        out
    }

    fn write_body(&self, out: &mut Vec<u8>) {
        out.extend((0..self.degree()).map(|x| self.top.image(x).map_or(0xFF, |y| y as u8)));
        for c in &self.children {
            c.write_body(out);
        }
    }

    /// JSON form: level-1 elements are the bare partial-permutation text,
    /// higher levels are `{"top": ..., "children": {"<point>": ...}}`.
    pub fn to_json(&self) -> Value {
        if self.level == 1 {
            return Value::String(self.top.to_string());
        }
        let children = self
            .top
            .domain()
            .zip(&self.children)
            .map(|(p, c)| ((p + 1).to_string(), c.to_json()))
            .collect();
        serde_json::json!({ "top": self.top.to_string(), "children": Value::Object(children) })
    }

    /// Inverse of [`WreathElement::to_json`]; the level is not recoverable
    /// from the zero's encoding, so it is supplied by the caller.
    pub fn from_json(value: &Value, level: usize) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidElement("level must be at least 1".into()));
        }
        if level == 1 {
            let text = value
                .as_str()
                .ok_or_else(|| Error::Parse("level-1 element must be a string".into()))?;
            return Ok(Self::base(text.parse()?));
        }
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("expected an object with `top` and `children`".into()))?;
        let top: PartialPerm = obj
            .get("top")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("missing `top`".into()))?
            .parse()?;
        let raw = obj
            .get("children")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("missing `children`".into()))?;
        let mut children = BTreeMap::new();
        for (k, v) in raw {
            let point: usize = k
                .parse()
                .ok()
                .filter(|&p| p >= 1)
                .ok_or_else(|| Error::Parse(format!("bad child point {k:?}")))?;
            children.insert(point - 1, Self::from_json(v, level - 1)?);
        }
        Self::new(level, top, children)
    }
}

/// Text form: the top, followed at levels above 1 by `{point:child,...}`.
impl fmt::Display for WreathElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.top)?;
        if self.level > 1 {
            f.write_str("{")?;
            for (n, (p, c)) in self.top.domain().zip(&self.children).enumerate() {
                if n > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}:{}", p + 1, c)?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for WreathElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Lazily enumerates `wr_p^k IS_d`.
///
/// The outer loop runs over the tops in `IS_d` order (by rank, then image
/// table); the inner loop is a mixed-radix counter over the children, the
/// smallest domain point being the most significant digit.
#[derive(Debug)]
pub struct WreathEnumerator {
    level: usize,
    tops: Vec<PartialPerm>,
    inner: Vec<WreathElement>,
    top_idx: usize,
    digits: Vec<usize>,
    remaining: usize,
}

impl Iterator for WreathEnumerator {
    type Item = WreathElement;

    fn next(&mut self) -> Option<WreathElement> {
        let top = self.tops.get(self.top_idx)?;
        let out = if self.level == 1 {
            WreathElement::base(top.clone())
        } else {
            WreathElement {
                level: self.level,
                top: top.clone(),
                children: self.digits.iter().map(|&i| self.inner[i].clone()).collect(),
            }
        };
        // advance the mixed-radix counter; carry out of the top digit moves to the next `a`
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.top_idx += 1;
                let rank = self.tops.get(self.top_idx).map_or(0, PartialPerm::rank);
                self.digits = vec![0; if self.level == 1 { 0 } else { rank }];
                break;
            }
            pos -= 1;
            self.digits[pos] += 1;
            if self.digits[pos] < self.inner.len() {
                break;
            }
            self.digits[pos] = 0;
        }
        self.remaining -= 1;
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for WreathEnumerator {}

/// Enumerates every element of `wr_p^k IS_d` exactly once, refusing when
/// `S^k(1)` exceeds `cap`.
pub fn enumerate_wreath(degree: usize, level: usize, cap: u64) -> Result<WreathEnumerator> {
    if level == 0 {
        return Err(Error::InvalidElement("level must be at least 1".into()));
    }
    let predicted = counting::order_formula(degree, level);
    check_cap(format!("wr^{level} IS_{degree}"), &predicted, cap)?;
    let tops: Vec<PartialPerm> = enumerate_is(degree, cap)?.collect();
    let inner: Vec<WreathElement> = if level == 1 {
        Vec::new()
    } else {
        enumerate_wreath(degree, level - 1, cap)?.collect()
    };
    let first_rank = if level == 1 { 0 } else { tops[0].rank() };
    Ok(WreathEnumerator {
        level,
        digits: vec![0; first_rank],
        tops,
        inner,
        top_idx: 0,
        remaining: usize::try_from(predicted).expect("bounded by cap"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(d: usize, pairs: &[(usize, usize)]) -> PartialPerm {
        PartialPerm::from_pairs(d, pairs).unwrap()
    }

    fn base(d: usize, pairs: &[(usize, usize)]) -> WreathElement {
        WreathElement::base(pp(d, pairs))
    }

    fn two_level(top: PartialPerm, children: Vec<WreathElement>) -> WreathElement {
        WreathElement::from_parts(2, top, children).unwrap()
    }

    #[test]
    fn construction_checks_domain() {
        let top = pp(2, &[(1, 1)]);
        assert!(WreathElement::from_parts(2, top.clone(), vec![]).is_err());
        assert!(WreathElement::from_parts(2, top.clone(), vec![base(3, &[])]).is_err());
        assert!(WreathElement::from_parts(3, top.clone(), vec![base(2, &[])]).is_err());
        assert!(WreathElement::new(2, top.clone(), BTreeMap::from([(1, base(2, &[]))])).is_err());
        assert!(WreathElement::new(2, top, BTreeMap::from([(0, base(2, &[]))])).is_ok());
    }

    #[test]
    fn compose_examples() {
        let x = two_level(pp(2, &[(1, 1)]), vec![WreathElement::identity(2, 1)]);
        assert_eq!(x.compose(&x).unwrap(), x);

        let p = base(2, &[(1, 2), (2, 1)]);
        let q = base(2, &[(1, 1)]);
        let x = two_level(pp(2, &[(1, 2)]), vec![p.clone()]);
        let y = two_level(pp(2, &[(2, 1)]), vec![q.clone()]);
        let xy = x.compose(&y).unwrap();
        assert_eq!(xy.top(), &pp(2, &[(1, 1)]));
        assert_eq!(xy.child(0), Some(&p.compose(&q).unwrap()));

        let zero = WreathElement::zero(2, 2);
        for e in enumerate_wreath(2, 2, 200).unwrap() {
            assert_eq!(e.compose(&zero).unwrap(), zero);
            assert_eq!(zero.compose(&e).unwrap(), zero);
        }
    }

    #[test]
    fn compose_rejects_mismatch() {
        let a = WreathElement::identity(2, 2);
        assert!(matches!(
            a.compose(&WreathElement::identity(2, 1)),
            Err(Error::LevelMismatch { .. })
        ));
        assert!(matches!(
            a.compose(&WreathElement::identity(3, 2)),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        let sigma = base(2, &[(1, 2), (2, 1)]);
        let x = two_level(pp(2, &[(1, 2)]), vec![sigma.clone()]);
        let expected = two_level(pp(2, &[(2, 1)]), vec![sigma]);
        assert_eq!(x.inverse(), expected);
        assert_eq!(x.compose(&x.inverse()).unwrap().compose(&x).unwrap(), x);

        let e = two_level(pp(2, &[(2, 2)]), vec![base(2, &[(1, 1)])]);
        assert_eq!(e.inverse(), e);
        let p = base(3, &[(1, 3), (2, 1)]);
        assert_eq!(p.inverse(), WreathElement::base(p.top().inverse()));
    }

    #[test]
    fn structural_idempotents() {
        assert!(WreathElement::zero(2, 2).is_idempotent_structural());
        assert!(WreathElement::identity(2, 2).is_idempotent_structural());
        let x = two_level(pp(2, &[(1, 1)]), vec![base(2, &[(1, 2)])]);
        assert!(!x.is_idempotent_structural());
        assert_ne!(x.compose(&x).unwrap(), x);
    }

    #[test]
    fn enumeration_counts() {
        for (d, k, n) in [
            (1, 1, 2),
            (1, 2, 3),
            (1, 3, 4),
            (2, 1, 7),
            (2, 2, 127),
            (3, 1, 34),
        ] {
            let it = enumerate_wreath(d, k, 1000).unwrap();
            assert_eq!(it.len(), n);
            let keys: std::collections::HashSet<_> = it.map(|e| e.canonical_key()).collect();
            assert_eq!(keys.len(), n, "duplicates for ({d},{k})");
        }
        let err = enumerate_wreath(2, 3, 1000).unwrap_err();
        assert!(err.to_string().contains("32767"));
    }

    #[test]
    fn enumeration_order_is_fixed() {
        let first: Vec<String> = enumerate_wreath(1, 2, 10)
            .unwrap()
            .map(|e| e.to_string())
            .collect();
        assert_eq!(first, ["[-]{}", "[1]{1:[-]}", "[1]{1:[1]}"]);
    }

    #[test]
    fn canonical_key_layout() {
        assert_eq!(
            WreathElement::zero(2, 2).canonical_key(),
            vec![2, 2, 0, 0, 0, 0xFF, 0xFF]
        );
        assert_ne!(
            WreathElement::zero(2, 2).canonical_key(),
            WreathElement::zero(2, 1).canonical_key()
        );
    }

    #[test]
    fn json_form() {
        let x = two_level(pp(2, &[(1, 2)]), vec![base(2, &[(1, 2), (2, 1)])]);
        let v = x.to_json();
        assert_eq!(
            v,
            serde_json::json!({"top": "[2,-]", "children": {"1": "[2,1]"}})
        );
        assert_eq!(WreathElement::from_json(&v, 2).unwrap(), x);
        assert_eq!(base(2, &[(1, 2)]).to_json(), serde_json::json!("[2,-]"));
        for e in enumerate_wreath(2, 2, 200).unwrap() {
            assert_eq!(WreathElement::from_json(&e.to_json(), 2).unwrap(), e);
        }
        assert!(
            WreathElement::from_json(&serde_json::json!({"top": "[1,-]", "children": {}}), 2)
                .is_err()
        );
    }
}
