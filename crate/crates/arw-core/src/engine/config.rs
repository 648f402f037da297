//! Sparse particle configurations and odometers.
//!
//! Configurations are finite maps from sites to occupancy; anything absent is
//! empty. Sparse maps keep the engine geometry-agnostic: regions may be
//! intervals, boxes, or trapezoids, and particles are free to come to rest
//! outside them.

use super::SiteState;
use crate::lattice::{BoundingBox, Site};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    cells: BTreeMap<Site, SiteState>,
    dimension: u8,
}

impl Configuration {
    pub fn new(dimension: u8) -> Self {
        assert!(dimension == 1 || dimension == 2, "dimension must be 1 or 2");
        Configuration {
            cells: BTreeMap::new(),
            dimension,
        }
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    #[inline]
    pub fn get(&self, site: Site) -> SiteState {
        self.cells.get(&site).copied().unwrap_or(SiteState::Empty)
    }

    /// Sets a site's state; empty entries are dropped so the map stays
    /// canonical and equality is structural.
    pub fn set(&mut self, site: Site, state: SiteState) {
        if state == SiteState::Empty {
            self.cells.remove(&site);
        } else {
            self.cells.insert(site, state);
        }
    }

    pub fn add_particle_at(&mut self, site: Site) {
        self.set(site, self.get(site).add_particle());
    }

    /// Occupied sites in lexicographic order.
    pub fn occupied(&self) -> impl Iterator<Item = (Site, SiteState)> + '_ {
        self.cells.iter().map(|(&s, &st)| (s, st))
    }

    pub fn total_particles(&self) -> u64 {
        self.cells.values().map(|s| s.particles()).sum()
    }

    pub fn unstable_sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.cells
            .iter()
            .filter(|(_, st)| st.is_unstable())
            .map(|(&s, _)| s)
    }

    pub fn is_stable_in<'a>(&self, region: impl IntoIterator<Item = &'a Site>) -> bool {
        region.into_iter().all(|&s| !self.get(s).is_unstable())
    }

    /// Pointwise order on configurations.
    pub fn pointwise_leq(&self, other: &Configuration) -> bool {
        self.cells.iter().all(|(&s, &st)| st <= other.get(s))
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        BoundingBox::of(self.cells.keys().copied())
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

impl Serialize for Configuration {
    /// `{"x,y": n}` with `n = -1` for a sleeping particle and `n >= 1` for
    /// `n` active particles; empty sites are omitted. Keys come out sorted,
    /// so serialization is byte-stable. The map holds nothing but site keys;
    /// on deserialization the dimension is inferred (2 when any `y` is
    /// nonzero, else 1).
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.cells.len()))?;
        for (&site, &state) in &self.cells {
            map.serialize_entry(&site.key(), &state.to_cell())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Configuration;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from \"x,y\" keys to occupancy integers")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut cells = BTreeMap::new();
                while let Some((key, value)) = access.next_entry::<String, i64>()? {
                    let site = Site::parse_key(&key)
                        .ok_or_else(|| serde::de::Error::custom(format!("bad site key {key}")))?;
                    if value == 0 {
                        continue;
                    }
                    if value < -1 {
                        return Err(serde::de::Error::custom(format!(
                            "bad occupancy {value} at {key}"
                        )));
                    }
                    cells.insert(site, SiteState::from_cell(value));
                }
                let dimension = if cells.keys().any(|s| s.y != 0) { 2 } else { 1 };
                Ok(Configuration { cells, dimension })
            }
        }
        deserializer.deserialize_map(V)
    }
}

/// Per-site count of used instructions; the output of stabilization.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Odometer {
    counts: BTreeMap<Site, u64>,
}

impl Odometer {
    pub fn new() -> Self {
        Odometer::default()
    }

    #[inline]
    pub fn get(&self, site: Site) -> u64 {
        self.counts.get(&site).copied().unwrap_or(0)
    }

    #[inline]
    pub fn increment(&mut self, site: Site) {
        *self.counts.entry(site).or_insert(0) += 1;
    }

    pub fn set(&mut self, site: Site, count: u64) {
        if count == 0 {
            self.counts.remove(&site);
        } else {
            self.counts.insert(site, count);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, u64)> + '_ {
        self.counts.iter().map(|(&s, &c)| (s, c))
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn pointwise_leq(&self, other: &Odometer) -> bool {
        self.counts.iter().all(|(&s, &c)| c <= other.get(s))
    }

    pub fn is_zero(&self) -> bool {
        self.counts.is_empty()
    }
}

impl Serialize for Odometer {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.counts.len()))?;
        for (&site, &count) in &self.counts {
            map.serialize_entry(&site.key(), &count)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Odometer {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Odometer;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from \"x,y\" keys to counts")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut counts = BTreeMap::new();
                while let Some((key, value)) = access.next_entry::<String, u64>()? {
                    let site = Site::parse_key(&key)
                        .ok_or_else(|| serde::de::Error::custom(format!("bad site key {key}")))?;
                    if value > 0 {
                        counts.insert(site, value);
                    }
                }
                Ok(Odometer { counts })
            }
        }
        deserializer.deserialize_map(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sites_are_not_stored() {
        let mut c = Configuration::new(1);
        c.set(Site::line(3), SiteState::Active(2));
        c.set(Site::line(3), SiteState::Empty);
        assert!(c.is_empty());
        assert_eq!(c.get(Site::line(3)), SiteState::Empty);
    }

    #[test]
    fn particle_conservation_bookkeeping() {
        let mut c = Configuration::new(1);
        c.add_particle_at(Site::line(0));
        c.add_particle_at(Site::line(0));
        c.set(Site::line(1), SiteState::Sleeping);
        assert_eq!(c.total_particles(), 3);
    }

    #[test]
    fn pointwise_order() {
        let mut small = Configuration::new(1);
        small.set(Site::line(0), SiteState::Sleeping);
        let mut big = small.clone();
        big.add_particle_at(Site::line(0));
        big.add_particle_at(Site::line(4));
        assert!(small.pointwise_leq(&big));
        assert!(!big.pointwise_leq(&small));
    }

    #[test]
    fn json_round_trip() {
        let mut c = Configuration::new(2);
        c.set(Site::new(-1, 2), SiteState::Sleeping);
        c.set(Site::new(0, 0), SiteState::Active(3));
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"-1,2":-1,"0,0":3}"#);
        let back: Configuration = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.dimension(), 2);

        let mut m = Odometer::new();
        m.set(Site::new(2, -7), 5);
        m.increment(Site::new(0, 0));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"0,0":1,"2,-7":5}"#);
        let back: Odometer = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
