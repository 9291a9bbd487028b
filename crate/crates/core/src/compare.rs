//! Comparison of threshold-3 growth with the rest of space occupied against
//! threshold-2 growth with the rest of space closed.
//!
//! Inside a set Z whose exposed vertices are closed (or far from occupied
//! vertices), the first dynamics can never get ahead of the second.

use serde::{Deserialize, Serialize};

use crate::dynamics::{clusters_of, evolve, Configuration, EvolutionResult, Region, Rule, SiteState, Variant};
use crate::lattice::{Cuboid, Membership, Vertex};
use crate::sampler::SiteField;

/// Exposure of x in z: coordinates with an outside neighbor for the
/// modified rule, outside neighbors for the standard rule.
pub fn exposure(z: &impl Membership, x: Vertex, variant: Variant) -> u8 {
    let n = x.neighbors();
    match variant {
        Variant::Modified => (0..3).filter(|&i| !z.contains(n[2 * i]) || !z.contains(n[2 * i + 1])).count() as u8,
        Variant::Standard => n.iter().filter(|&&w| !z.contains(w)).count() as u8,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// Vertices with exposure >= 3 that are not closed.
    pub exposed_not_closed: Vec<Vertex>,
    /// (vertex with exposure >= 2, initially occupied vertex within distance m).
    pub occupied_near_exposed: Vec<(Vertex, Vertex)>,
    /// Largest l-infinity diameter of an occupied cluster in the second dynamics.
    pub cluster_diameter_max: i64,
    /// Whether every such cluster has diameter at most m/2.
    pub clusters_small: bool,
}

impl HypothesisReport {
    pub fn holds(&self) -> bool {
        self.exposed_not_closed.is_empty() && self.occupied_near_exposed.is_empty() && self.clusters_small
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DominationReport {
    pub holds: bool,
    /// Earliest vertex (and round) occupied by the first dynamics before the second.
    pub first_violation: Option<(Vertex, u32)>,
    pub hypotheses: HypothesisReport,
    pub cluster_diameter_max: i64,
    pub occupied_first: usize,
    pub occupied_second: usize,
}

fn config_on(z: &Region, field: &dyn SiteField, exterior: SiteState) -> Configuration {
    let mut c = Configuration::new(z.clone(), exterior);
    for v in z.vertices() {
        let s = field.state(v);
        if s != SiteState::Empty {
            c.set(v, s);
        }
    }
    c
}

/// Checks the three hypotheses given the second dynamics' outcome.
pub fn check_hypotheses(
    z: &Region,
    field: &dyn SiteField,
    variant: Variant,
    m: i64,
    second: &EvolutionResult,
) -> HypothesisReport {
    let mut r = HypothesisReport::default();
    let occupied: Vec<Vertex> = z.vertices().into_iter().filter(|&v| field.state(v) == SiteState::Occupied).collect();
    let occ_set: rustc_hash::FxHashSet<Vertex> = occupied.iter().copied().collect();
    for x in z.vertices() {
        let e = exposure(z, x, variant);
        if e >= 3 && field.state(x) != SiteState::Closed {
            r.exposed_not_closed.push(x);
        }
        if e >= 2 {
            let ball = Cuboid::centered(x, m);
            if (ball.volume() as usize) < occupied.len() {
                if let Some(o) = ball.iter().find(|o| occ_set.contains(o)) {
                    r.occupied_near_exposed.push((x, o));
                }
            } else if let Some(&o) = occupied.iter().find(|&&o| o.linf_dist(x) <= m) {
                r.occupied_near_exposed.push((x, o));
            }
        }
    }
    r.cluster_diameter_max = clusters_of(second.occupation_time.keys().copied())
        .iter()
        .map(|c| c.linf_diameter())
        .max()
        .unwrap_or(0);
    r.clusters_small = 2 * r.cluster_diameter_max <= m;
    r
}

/// Runs both dynamics on z from the field's states and compares occupation
/// times round by round.
pub fn check_domination(z: &Region, field: &dyn SiteField, variant: Variant, m: i64) -> DominationReport {
    let first = evolve(&config_on(z, field, SiteState::Occupied), Rule { variant, threshold: 3 });
    let second = evolve(&config_on(z, field, SiteState::Closed), Rule { variant, threshold: 2 });
    let hypotheses = check_hypotheses(z, field, variant, m, &second);
    let first_violation = first
        .occupation_time
        .iter()
        .filter(|(v, &t)| second.occupation_time.get(v).is_none_or(|&s| s > t))
        .map(|(&v, &t)| (v, t))
        .min_by_key(|&(v, t)| (t, v));
    DominationReport {
        holds: first_violation.is_none(),
        first_violation,
        cluster_diameter_max: hypotheses.cluster_diameter_max,
        hypotheses,
        occupied_first: first.occupation_time.len(),
        occupied_second: second.occupation_time.len(),
    }
}
