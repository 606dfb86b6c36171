//! The symmetric inverse semigroup `IS_d`: partial injective maps of `{1, ..., d}`.
//!
//! Points are 0-based inside the crate and 1-based in every textual form.
//! Composition acts on the right: `x·(pq) = (x·p)·q`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::counting;
use crate::error::{check_cap, Error, Result};

/// Largest supported degree; points are stored as `u8`.
pub const MAX_DEGREE: usize = 255;

/// A partial injective self-map of `{0, ..., d-1}`.
///
/// The degree is the length of the image table, so it travels with every
/// element and mixed-degree products are rejected instead of coerced.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialPerm {
    images: Box<[Option<u8>]>,
}

impl PartialPerm {
    /// Builds a partial permutation from 0-based images.
    pub fn new(images: &[Option<usize>]) -> Result<Self> {
        let degree = images.len();
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::InvalidPartialPerm(format!(
                "degree must be in 1..={MAX_DEGREE}, got {degree}"
            )));
        }
        let mut seen = vec![false; degree];
        for (x, img) in images.iter().enumerate() {
            if let Some(y) = *img {
                if y >= degree {
                    return Err(Error::InvalidPartialPerm(format!(
                        "image {} of point {} outside 1..={degree}",
                        y + 1,
                        x + 1
                    )));
                }
                if std::mem::replace(&mut seen[y], true) {
                    return Err(Error::InvalidPartialPerm(format!(
                        "point {} is the image of two points",
                        y + 1
                    )));
                }
            }
        }
        Ok(Self::from_raw(
            images.iter().map(|i| i.map(|y| y as u8)).collect(),
        ))
    }

    /// Builds a partial permutation from 1-based `(point, image)` pairs.
    pub fn from_pairs(degree: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut images = vec![None; degree];
        for &(x, y) in pairs {
            if x == 0 || x > degree || y == 0 {
                return Err(Error::InvalidPartialPerm(format!(
                    "pair {x}->{y} outside 1..={degree}"
                )));
            }
            if images[x - 1].replace(y - 1).is_some() {
                return Err(Error::InvalidPartialPerm(format!("point {x} mapped twice")));
            }
        }
        Self::new(&images)
    }

    pub(crate) fn from_raw(images: Box<[Option<u8>]>) -> Self {
        Self { images }
    }

    /// The empty map: the zero of `IS_d`.
    pub fn empty(degree: usize) -> Self {
        Self::new(&vec![None; degree]).expect("valid degree")
    }

    pub fn identity(degree: usize) -> Self {
        Self::new(&(0..degree).map(Some).collect::<Vec<_>>()).expect("valid degree")
    }

    /// The identity restricted to the given 0-based points.
    pub fn partial_identity(
        degree: usize,
        points: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut images = vec![None; degree];
        for x in points {
            if x >= degree {
                return Err(Error::InvalidPartialPerm(format!(
                    "point {} outside 1..={degree}",
                    x + 1
                )));
            }
            images[x] = Some(x);
        }
        Self::new(&images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 0-based point `x`, if defined.
    pub fn image(&self, x: usize) -> Option<usize> {
        self.images.get(x).copied().flatten().map(usize::from)
    }

    /// Preimage of the 0-based point `y`, if `y` is in the range.
    pub fn preimage(&self, y: usize) -> Option<usize> {
        self.images.iter().position(|&i| i == Some(y as u8))
    }

    pub fn rank(&self) -> usize {
        self.images.iter().filter(|i| i.is_some()).count()
    }

    /// Domain points in increasing order.
    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter_map(|(x, i)| i.map(|_| x))
    }

    /// Range points in increasing order.
    pub fn range(&self) -> Vec<usize> {
        let mut ran: Vec<usize> = self
            .images
            .iter()
            .filter_map(|i| i.map(usize::from))
            .collect();
        ran.sort_unstable();
        ran
    }

    pub fn in_domain(&self, x: usize) -> bool {
        self.image(x).is_some()
    }

    /// Position of `x` among the domain points, i.e. the number of domain
    /// points smaller than `x`.
    pub(crate) fn domain_index(&self, x: usize) -> Option<usize> {
        self.in_domain(x)
            .then(|| self.images[..x].iter().filter(|i| i.is_some()).count())
    }

    /// Left-to-right product: `x ↦ other(self(x))`.
    pub fn compose(&self, other: &PartialPerm) -> Result<PartialPerm> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &PartialPerm) -> PartialPerm {
        Self::from_raw(
            self.images
                .iter()
                .map(|i| i.and_then(|y| other.images[y as usize]))
                .collect(),
        )
    }

    pub fn inverse(&self) -> PartialPerm {
        let mut images = vec![None; self.degree()];
        for (x, i) in self.images.iter().enumerate() {
            if let Some(y) = *i {
                images[y as usize] = Some(x as u8);
            }
        }
        Self::from_raw(images.into_boxed_slice())
    }

    /// Idempotents of `IS_d` are exactly the partial identities.
    pub fn is_idempotent(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(x, i)| i.is_none_or(|y| y as usize == x))
    }
}

/// Enumerates `IS_d` ordered by rank, then lexicographically by image table
/// (an undefined image sorts before any defined one).
pub fn enumerate_is(degree: usize, cap: u64) -> Result<std::vec::IntoIter<PartialPerm>> {
    if degree == 0 || degree > MAX_DEGREE {
        return Err(Error::InvalidPartialPerm(format!(
            "degree must be in 1..={MAX_DEGREE}, got {degree}"
        )));
    }
    check_cap(
        format!("IS_{degree}"),
        &counting::order_formula(degree, 1),
        cap,
    )?;

    fn fill(
        pos: usize,
        images: &mut Vec<Option<u8>>,
        used: &mut [bool],
        out: &mut Vec<PartialPerm>,
    ) {
        if pos == images.len() {
            out.push(PartialPerm::from_raw(images.clone().into_boxed_slice()));
            return;
        }
        images[pos] = None;
        fill(pos + 1, images, used, out);
        for y in 0..used.len() {
            if !used[y] {
                used[y] = true;
                images[pos] = Some(y as u8);
                fill(pos + 1, images, used, out);
                used[y] = false;
            }
        }
        images[pos] = None;
    }

    let mut out = Vec::new();
    fill(
        0,
        &mut vec![None; degree],
        &mut vec![false; degree],
        &mut out,
    );
    out.sort_by(|a, b| {
        a.rank()
            .cmp(&b.rank())
            .then_with(|| a.images.cmp(&b.images))
    });
    Ok(out.into_iter())
}

impl fmt::Display for PartialPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (x, i) in self.images.iter().enumerate() {
            if x > 0 {
                f.write_str(",")?;
            }
            match i {
                Some(y) => write!(f, "{}", *y as usize + 1)?,
                None => f.write_str("-")?,
            }
        }
        f.write_str("]")
    }
}

impl fmt::Debug for PartialPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PartialPerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected `[...]`, got {s:?}")))?;
        let images = inner
            .split(',')
            .map(|tok| match tok.trim() {
                "-" => Ok(None),
                t => match t.parse::<usize>() {
                    Ok(y) if y >= 1 => Ok(Some(y - 1)),
                    _ => Err(Error::Parse(format!("bad image {t:?} in {s:?}"))),
                },
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&images)
    }
}

impl Serialize for PartialPerm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PartialPerm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(s: &str) -> PartialPerm {
        s.parse().unwrap()
    }

    #[test]
    fn compose_examples() {
        let p = PartialPerm::from_pairs(3, &[(1, 2), (2, 3)]).unwrap();
        let q = PartialPerm::from_pairs(3, &[(2, 2), (3, 1)]).unwrap();
        assert_eq!(
            p.compose(&q).unwrap(),
            PartialPerm::from_pairs(3, &[(1, 2), (2, 1)]).unwrap()
        );

        for q in enumerate_is(3, 100).unwrap() {
            assert_eq!(PartialPerm::identity(3).compose(&q).unwrap(), q);
            assert_eq!(
                PartialPerm::empty(3).compose(&q).unwrap(),
                PartialPerm::empty(3)
            );
        }
    }

    #[test]
    fn compose_rejects_mixed_degrees() {
        let err = PartialPerm::identity(2)
            .compose(&PartialPerm::identity(3))
            .unwrap_err();
        assert_eq!(err, Error::DegreeMismatch { left: 2, right: 3 });
    }

    #[test]
    fn inverse_examples() {
        let p = PartialPerm::from_pairs(3, &[(1, 3), (2, 1)]).unwrap();
        assert_eq!(
            p.inverse(),
            PartialPerm::from_pairs(3, &[(3, 1), (1, 2)]).unwrap()
        );
        assert_eq!(PartialPerm::empty(4).inverse(), PartialPerm::empty(4));
        assert_eq!(PartialPerm::identity(4).inverse(), PartialPerm::identity(4));
    }

    #[test]
    fn idempotent_examples() {
        assert!(PartialPerm::partial_identity(3, [0, 2])
            .unwrap()
            .is_idempotent());
        let swap = PartialPerm::from_pairs(2, &[(1, 2), (2, 1)]).unwrap();
        assert!(!swap.is_idempotent());
        assert_eq!(swap.compose(&swap).unwrap(), PartialPerm::identity(2));
        assert!(PartialPerm::empty(3).is_idempotent());
    }

    #[test]
    fn accessors() {
        assert_eq!(PartialPerm::empty(3).rank(), 0);
        assert_eq!(PartialPerm::identity(5).rank(), 5);
        let p = PartialPerm::from_pairs(3, &[(1, 3)]).unwrap();
        assert_eq!(p.domain().collect::<Vec<_>>(), vec![0]);
        assert_eq!(p.range(), vec![2]);
        assert_eq!(p.preimage(2), Some(0));
        assert_eq!(p.domain_index(0), Some(0));
        assert_eq!(p.domain_index(1), None);
    }

    #[test]
    fn enumeration_counts_and_order() {
        let counts: Vec<usize> = (1..=4)
            .map(|d| enumerate_is(d, 1000).unwrap().count())
            .collect();
        assert_eq!(counts, vec![2, 7, 34, 209]);
        let is1: Vec<_> = enumerate_is(1, 10).unwrap().collect();
        assert_eq!(is1, vec![PartialPerm::empty(1), PartialPerm::identity(1)]);
        let is2: Vec<String> = enumerate_is(2, 10)
            .unwrap()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(
            is2,
            ["[-,-]", "[-,1]", "[-,2]", "[1,-]", "[2,-]", "[1,2]", "[2,1]"]
        );
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(
            enumerate_is(4, 208),
            Err(Error::EnumerationLimit { .. })
        ));
        assert!(enumerate_is(4, 209).is_ok());
    }

    #[test]
    fn text_form() {
        let p = PartialPerm::from_pairs(3, &[(1, 2), (2, 3)]).unwrap();
        assert_eq!(p.to_string(), "[2,3,-]");
        assert_eq!(pp("[2,3,-]"), p);
        assert!("[1,1]".parse::<PartialPerm>().is_err());
        assert!("[0,-]".parse::<PartialPerm>().is_err());
        assert!("[3,-]".parse::<PartialPerm>().is_err());
        assert!("1,2".parse::<PartialPerm>().is_err());
        assert_eq!(serde_json::to_string(&p).unwrap(), "\"[2,3,-]\"");
    }
}
