//! Lattice points and the small amount of vector geometry the lab needs.
//!
//! Sites live in at most two dimensions; one-dimensional experiments use
//! `y = 0` throughout (serialized keys are always `"x,y"`).

use serde::{Deserialize, Serialize};
use std::fmt;

/// A lattice point (or displacement) in `Z^2`. `Ord` is lexicographic on
/// `(x, y)`, which is the deterministic tie-break order used everywhere.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Site { x, y }
    }

    /// A point on the one-dimensional lattice.
    pub const fn line(x: i64) -> Self {
        Site { x, y: 0 }
    }

    #[inline(always)]
    pub fn offset(self, d: Site) -> Site {
        Site {
            x: self.x + d.x,
            y: self.y + d.y,
        }
    }

    /// Squared Euclidean norm.
    #[inline(always)]
    pub fn norm2(self) -> i64 {
        self.x * self.x + self.y * self.y
    }

    /// Inner product with a real vector.
    #[inline(always)]
    pub fn dot(self, v: [f64; 2]) -> f64 {
        self.x as f64 * v[0] + self.y as f64 * v[1]
    }

    /// Key used in JSON maps.
    pub fn key(self) -> String {
        format!("{},{}", self.x, self.y)
    }

    /// Parses a `"x,y"` key.
    pub fn parse_key(s: &str) -> Option<Site> {
        let (x, y) = s.split_once(',')?;
        Some(Site {
            x: x.trim().parse().ok()?,
            y: y.trim().parse().ok()?,
        })
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Axis-aligned bounding box over a set of sites, used by the dense
/// stabilization scratch space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundingBox {
    pub min: Site,
    pub max: Site,
}

impl BoundingBox {
    pub fn of(points: impl IntoIterator<Item = Site>) -> Option<BoundingBox> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut bb = BoundingBox {
            min: first,
            max: first,
        };
        for p in it {
            bb.include(p);
        }
        Some(bb)
    }

    pub fn include(&mut self, p: Site) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn merge(mut self, other: BoundingBox) -> BoundingBox {
        self.include(other.min);
        self.include(other.max);
        self
    }

    #[inline(always)]
    pub fn contains(&self, p: Site) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn width(&self) -> i64 {
        self.max.x - self.min.x + 1
    }

    pub fn height(&self) -> i64 {
        self.max.y - self.min.y + 1
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    /// Dense index of a contained point.
    #[inline(always)]
    pub fn index(&self, p: Site) -> usize {
        debug_assert!(self.contains(p));
        ((p.y - self.min.y) * self.width() + (p.x - self.min.x)) as usize
    }

    /// Inverse of [`BoundingBox::index`].
    #[inline(always)]
    pub fn site_at(&self, index: usize) -> Site {
        let w = self.width();
        Site {
            x: self.min.x + (index as i64 % w),
            y: self.min.y + (index as i64 / w),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_lexicographic() {
        let mut v = vec![
            Site::new(1, 0),
            Site::new(0, 5),
            Site::new(0, -1),
            Site::new(-2, 9),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                Site::new(-2, 9),
                Site::new(0, -1),
                Site::new(0, 5),
                Site::new(1, 0)
            ]
        );
    }

    #[test]
    fn key_round_trip() {
        let s = Site::new(-17, 4);
        assert_eq!(Site::parse_key(&s.key()), Some(s));
    }

    #[test]
    fn bbox_indexing_round_trip() {
        let bb = BoundingBox {
            min: Site::new(-2, -3),
            max: Site::new(4, 1),
        };
        for y in -3..=1 {
            for x in -2..=4 {
                let s = Site::new(x, y);
                assert_eq!(bb.site_at(bb.index(s)), s);
            }
        }
        assert_eq!(bb.area(), 7 * 5);
    }
}
