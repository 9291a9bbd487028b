//! Random initial configurations.
//!
//! Every sampler is a lazy field over all of Z^3: a vertex's state is a pure
//! function of the seed, the mode and the vertex, computed with
//! [`crate::rng::vertex_uniform`]. Restricting a field to a region never
//! changes the state of a vertex.

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Configuration, Region, SiteState};
use crate::error::{Error, Result};
use crate::lattice::Vertex;
use crate::rng::{stream, vertex_uniform};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    Iid,
    TwoStage,
    BigObstacles,
}

impl SampleMode {
    pub fn name(self) -> &'static str {
        match self {
            SampleMode::Iid => "iid",
            SampleMode::TwoStage => "two-stage",
            SampleMode::BigObstacles => "big-obstacles",
        }
    }
}

impl std::str::FromStr for SampleMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iid" => Ok(SampleMode::Iid),
            "two-stage" => Ok(SampleMode::TwoStage),
            "big-obstacles" => Ok(SampleMode::BigObstacles),
            _ => Err(Error::InvalidParams(format!("unknown sample mode `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct SampleParams {
    pub p: f64,
    pub q: f64,
    pub mode: SampleMode,
    pub seed: u64,
}

impl SampleParams {
    pub fn new(p: f64, q: f64, mode: SampleMode, seed: u64) -> Result<Self> {
        let s = SampleParams { p, q, mode, seed };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.p) || !unit(self.q) {
            return Err(Error::InvalidProbability(format!("p={} q={} must lie in [0,1]", self.p, self.q)));
        }
        match self.mode {
            SampleMode::Iid | SampleMode::TwoStage if self.p + self.q > 1.0 => {
                Err(Error::InvalidProbability(format!("p+q={} exceeds 1", self.p + self.q)))
            }
            SampleMode::TwoStage if self.q >= 1.0 => Err(Error::InvalidProbability("two-stage needs q < 1".into())),
            _ => Ok(()),
        }
    }

    pub fn field(&self) -> Result<Box<dyn SiteField>> {
        self.validate()?;
        Ok(match self.mode {
            SampleMode::Iid => Box::new(IidField { p: self.p, q: self.q, seed: self.seed }),
            SampleMode::TwoStage => Box::new(TwoStageField::new(self.p, self.q, self.seed)),
            SampleMode::BigObstacles => Box::new(BigObstacleField { p: self.p, q: self.q, seed: self.seed }),
        })
    }
}

/// A state for every vertex of Z^3.
pub trait SiteField: Sync {
    fn state(&self, v: Vertex) -> SiteState;

    /// Vertices that could become occupied from the initial randomness alone.
    /// Defaults to the occupied ones.
    fn is_active(&self, v: Vertex) -> bool {
        self.state(v) == SiteState::Occupied
    }

    /// Every active vertex, when the field has finitely many.
    fn active_vertices(&self) -> Option<Vec<Vertex>> {
        None
    }
}

impl<F: SiteField + ?Sized> SiteField for &F {
    fn state(&self, v: Vertex) -> SiteState {
        (**self).state(v)
    }
    fn is_active(&self, v: Vertex) -> bool {
        (**self).is_active(v)
    }
    fn active_vertices(&self) -> Option<Vec<Vertex>> {
        (**self).active_vertices()
    }
}

impl<F: SiteField + ?Sized> SiteField for Box<F> {
    fn state(&self, v: Vertex) -> SiteState {
        (**self).state(v)
    }
    fn is_active(&self, v: Vertex) -> bool {
        (**self).is_active(v)
    }
    fn active_vertices(&self) -> Option<Vec<Vertex>> {
        (**self).active_vertices()
    }
}

impl SiteField for Configuration {
    fn state(&self, v: Vertex) -> SiteState {
        self.get(v)
    }

    fn active_vertices(&self) -> Option<Vec<Vertex>> {
        (self.exterior() != SiteState::Occupied).then(|| self.occupied())
    }
}

/// One uniform per vertex: occupied below p, closed at or above 1-q.
/// Raising q only adds closed vertices and raising p only adds occupied ones,
/// so runs at different densities with one seed are coupled monotonically.
#[derive(Clone, Copy, Debug)]
pub struct IidField {
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

impl SiteField for IidField {
    #[inline]
    fn state(&self, v: Vertex) -> SiteState {
        let u = vertex_uniform(self.seed, stream::IID_STATE, v);
        if u < self.p {
            SiteState::Occupied
        } else if u >= 1.0 - self.q {
            SiteState::Closed
        } else {
            SiteState::Empty
        }
    }
}

/// Closed with probability q, independently active with probability p/(1-q);
/// occupied means active and not closed.
#[derive(Clone, Copy, Debug)]
pub struct TwoStageField {
    pub q: f64,
    pub active_prob: f64,
    pub seed: u64,
}

impl TwoStageField {
    pub fn new(p: f64, q: f64, seed: u64) -> Self {
        TwoStageField { q, active_prob: if q < 1.0 { (p / (1.0 - q)).min(1.0) } else { 0.0 }, seed }
    }

    #[inline]
    pub fn is_closed(&self, v: Vertex) -> bool {
        vertex_uniform(self.seed, stream::CLOSED, v) < self.q
    }
}

impl SiteField for TwoStageField {
    #[inline]
    fn state(&self, v: Vertex) -> SiteState {
        if self.is_closed(v) {
            SiteState::Closed
        } else if self.is_active(v) {
            SiteState::Occupied
        } else {
            SiteState::Empty
        }
    }

    #[inline]
    fn is_active(&self, v: Vertex) -> bool {
        vertex_uniform(self.seed, stream::ACTIVE, v) < self.active_prob
    }
}

/// Centers with probability q; each center closes itself and its six
/// neighbors; open vertices are occupied with probability p.
#[derive(Clone, Copy, Debug)]
pub struct BigObstacleField {
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

impl BigObstacleField {
    #[inline]
    pub fn is_center(&self, v: Vertex) -> bool {
        vertex_uniform(self.seed, stream::OBSTACLE_CENTER, v) < self.q
    }
}

impl SiteField for BigObstacleField {
    fn state(&self, v: Vertex) -> SiteState {
        if self.is_center(v) || v.neighbors().iter().any(|&w| self.is_center(w)) {
            SiteState::Closed
        } else if vertex_uniform(self.seed, stream::OBSTACLE_OCCUPIED, v) < self.p {
            SiteState::Occupied
        } else {
            SiteState::Empty
        }
    }
}

/// A center and its six neighbors.
pub fn plus_shape(center: Vertex) -> [Vertex; 7] {
    let n = center.neighbors();
    [center, n[0], n[1], n[2], n[3], n[4], n[5]]
}

/// Only the listed vertices are closed; nothing is occupied or active.
#[derive(Clone, Debug, Default)]
pub struct PlantedField {
    pub closed: FxHashSet<Vertex>,
}

impl SiteField for PlantedField {
    fn state(&self, v: Vertex) -> SiteState {
        if self.closed.contains(&v) {
            SiteState::Closed
        } else {
            SiteState::Empty
        }
    }

    fn is_active(&self, _: Vertex) -> bool {
        false
    }

    fn active_vertices(&self) -> Option<Vec<Vertex>> {
        Some(Vec::new())
    }
}

/// Restricts a field to a region.
pub fn realize(field: &dyn SiteField, region: Region, exterior: SiteState) -> Configuration {
    let mut c = Configuration::new(region, exterior);
    for v in c.region().vertices() {
        let s = field.state(v);
        if s != SiteState::Empty {
            c.set(v, s);
        }
    }
    c
}

pub fn sample_iid(params: &SampleParams, region: Region) -> Result<Configuration> {
    if params.mode != SampleMode::Iid {
        return Err(Error::InvalidParams("sample_iid needs mode iid".into()));
    }
    Ok(realize(&*params.field()?, region, SiteState::Empty))
}

/// A two-stage sample together with its active set.
#[derive(Clone, Debug)]
pub struct TwoStageSample {
    pub config: Configuration,
    pub active: FxHashSet<Vertex>,
}

impl SiteField for TwoStageSample {
    fn state(&self, v: Vertex) -> SiteState {
        self.config.get(v)
    }
    fn is_active(&self, v: Vertex) -> bool {
        self.active.contains(&v)
    }

    fn active_vertices(&self) -> Option<Vec<Vertex>> {
        let mut v: Vec<_> = self.active.iter().copied().collect();
        v.sort_unstable();
        Some(v)
    }
}

pub fn sample_two_stage(params: &SampleParams, region: Region) -> Result<TwoStageSample> {
    if params.mode != SampleMode::TwoStage {
        return Err(Error::InvalidParams("sample_two_stage needs mode two-stage".into()));
    }
    params.validate()?;
    let f = TwoStageField::new(params.p, params.q, params.seed);
    let active = region.vertices().into_iter().filter(|&v| f.is_active(v)).collect();
    Ok(TwoStageSample { config: realize(&f, region, SiteState::Empty), active })
}

pub fn sample_big_obstacles(params: &SampleParams, region: Region) -> Result<Configuration> {
    if params.mode != SampleMode::BigObstacles {
        return Err(Error::InvalidParams("sample_big_obstacles needs mode big-obstacles".into()));
    }
    Ok(realize(&*params.field()?, region, SiteState::Empty))
}

/// Dispatches on the mode.
pub fn sample(params: &SampleParams, region: Region, exterior: SiteState) -> Result<Configuration> {
    Ok(realize(&*params.field()?, region, exterior))
}
