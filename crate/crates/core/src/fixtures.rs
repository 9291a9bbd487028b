//! Deterministic configurations in which the rare events used by the
//! construction hold by fiat: nice vertices at subcube centers, closed
//! keystone corners, and no occupied vertices anywhere.

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Configuration, Region, SiteState, Storage};
use crate::error::{Error, Result};
use crate::lattice::{Cuboid, Vertex};
use crate::sampler::{plus_shape, PlantedField};
use crate::shell::{compute_a_and_s, default_cap, AllBlack};
use crate::stego::{all_keystone_corners, keystone_corners, subcube_center, subcube_signs, Model, ScaleParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureId {
    /// Every box of the all-black shell of radius n is good (swell for pairs).
    AllBlackShell,
    /// One box with a nice vertex (or plus shape) at each subcube center.
    NicePlacement,
    /// The eight corners of one keystone.
    Keystone,
    /// All-black shell boxes plus the 48 keystone corners.
    FullStego,
    /// One obstacle plus shape per subcube of one box.
    ObstacleCenters,
}

impl FixtureId {
    pub fn name(self) -> &'static str {
        match self {
            FixtureId::AllBlackShell => "all-black-shell",
            FixtureId::NicePlacement => "nice-placement",
            FixtureId::Keystone => "keystone",
            FixtureId::FullStego => "full",
            FixtureId::ObstacleCenters => "obstacles",
        }
    }
}

impl std::str::FromStr for FixtureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all-black-shell" | "shell" => FixtureId::AllBlackShell,
            "nice-placement" | "nice" => FixtureId::NicePlacement,
            "keystone" => FixtureId::Keystone,
            "full" | "full-stego" => FixtureId::FullStego,
            "obstacles" => FixtureId::ObstacleCenters,
            _ => return Err(Error::InvalidParams(format!("unknown fixture {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureGeometry {
    /// Shell radius.
    pub n: i64,
    pub l: i64,
    pub model: Model,
    /// Renormalized site for single-box fixtures, keystone center otherwise.
    pub site: Vertex,
}

impl FixtureGeometry {
    pub fn new(n: i64, l: i64, model: Model) -> Self {
        FixtureGeometry { n, l, model, site: Vertex::ORIGIN }
    }

    pub fn at(mut self, site: Vertex) -> Self {
        self.site = site;
        self
    }

    fn scale(&self) -> Result<ScaleParams> {
        ScaleParams::new(self.l, 1, self.model)
    }
}

/// Closed vertices planted in one box.
fn plant_box(x: Vertex, p: &ScaleParams, plus: bool, out: &mut FxHashSet<Vertex>) -> Result<()> {
    if plus && p.l < 3 {
        return Err(Error::InvalidParams(format!("a plus shape needs L >= 3 to fit in a subcube (L={})", p.l)));
    }
    for s in subcube_signs() {
        let c = subcube_center(x, s, p);
        if plus {
            out.extend(plus_shape(c));
        } else {
            out.insert(c);
        }
    }
    Ok(())
}

/// The closed set of a fixture.
pub fn planted_closed(id: FixtureId, g: &FixtureGeometry) -> Result<PlantedField> {
    let p = g.scale()?;
    let pairs = g.model == Model::StandardPairs;
    let mut closed = FxHashSet::default();
    match id {
        FixtureId::NicePlacement => plant_box(g.site, &p, pairs, &mut closed)?,
        FixtureId::ObstacleCenters => plant_box(g.site, &p, true, &mut closed)?,
        FixtureId::Keystone => closed.extend(keystone_corners(g.site, &p)),
        FixtureId::AllBlackShell | FixtureId::FullStego => {
            if g.n < 1 {
                return Err(Error::InvalidParams(format!("shell radius must be positive (n={})", g.n)));
            }
            let shell = compute_a_and_s(g.n, &AllBlack, default_cap(g.n))?;
            for x in shell.sorted_sites() {
                plant_box(x, &p, pairs, &mut closed)?;
            }
            if id == FixtureId::FullStego {
                closed.extend(all_keystone_corners(g.n, &p).into_iter().map(|c| c.vertex));
            }
        }
    }
    Ok(PlantedField { closed })
}

/// A fixture as a sparse configuration on the bounding box of its closed set.
pub fn plant_fixture(id: FixtureId, g: &FixtureGeometry) -> Result<Configuration> {
    let field = planted_closed(id, g)?;
    let bounds = field
        .closed
        .iter()
        .map(|&v| Cuboid::point(v))
        .reduce(|a, b| a.hull(&b))
        .ok_or_else(|| Error::InvalidParams("empty fixture".into()))?;
    let mut c = Configuration::with_storage(Region::Box(bounds), SiteState::Empty, Storage::Sparse);
    for v in field.closed {
        c.set(v, SiteState::Closed);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::SiteField;
    use crate::stego::{is_good_box, is_nice, is_swell_box};

    #[test]
    fn keystone_fixture_corners() {
        let g = FixtureGeometry::new(1, 5, Model::Modified);
        let f = planted_closed(FixtureId::Keystone, &g).unwrap();
        let mut got: Vec<Vertex> = f.closed.into_iter().collect();
        got.sort();
        let mut want: Vec<Vertex> = subcube_signs().iter().map(|&s| 50 * s).collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn nice_placement_one_per_subcube() {
        let p = ScaleParams::new(4, 3, Model::Modified).unwrap();
        let x = Vertex::new(2, -1, 0);
        let g = FixtureGeometry::new(1, 4, Model::Modified).at(x);
        let f = planted_closed(FixtureId::NicePlacement, &g).unwrap();
        assert_eq!(f.closed.len(), 8);
        let r = is_good_box(x, &f, &p);
        assert!(r.good);
        for (s, w) in subcube_signs().iter().zip(&r.witnesses) {
            assert_eq!(*w, Some(subcube_center(x, *s, &p)));
        }
        assert!(!is_swell_box(x, &f, &p).swell);
    }

    #[test]
    fn obstacle_centers_make_a_swell_box() {
        for l in [3, 4, 5, 8] {
            let p = ScaleParams::new(l, 2, Model::StandardPairs).unwrap();
            let x = Vertex::new(-1, 3, 2);
            let f = planted_closed(FixtureId::ObstacleCenters, &FixtureGeometry::new(1, l, p.model).at(x)).unwrap();
            assert_eq!(f.closed.len(), 56);
            assert!(is_swell_box(x, &f, &p).swell, "L={l}");
        }
        let g = FixtureGeometry::new(1, 2, Model::StandardPairs);
        assert!(planted_closed(FixtureId::ObstacleCenters, &g).is_err());
    }

    #[test]
    fn full_fixture_has_no_occupied_and_is_nice() {
        let g = FixtureGeometry::new(12, 5, Model::Modified);
        let c = plant_fixture(FixtureId::FullStego, &g).unwrap();
        assert_eq!(c.count(SiteState::Occupied), 0);
        let p = ScaleParams::new(5, 2, Model::Modified).unwrap();
        let closed = c.closed();
        assert!(closed.iter().all(|&v| is_nice(v, &c, &p)));
        assert_eq!(c.active_vertices(), Some(vec![]));
    }
}
