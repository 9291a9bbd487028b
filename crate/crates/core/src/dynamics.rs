//! Synchronous bootstrap dynamics on a finite region with a uniform exterior.
//!
//! Two engines share one contract: a dense engine working on a byte grid over
//! the region's bounding box, and a sparse engine over hash maps for regions
//! whose bounding box is too large to allocate. Both are frontier driven:
//! after the first round only the empty neighbors of newly occupied vertices
//! are re-examined.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Cuboid, Membership, Vertex};

/// Bounding-box volume at or below which dense storage and the dense engine
/// are used.
pub const DEFAULT_DENSE_LIMIT: u64 = 1 << 27;

#[repr(u8)]
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize)]
pub enum SiteState {
    #[default]
    Empty = 0,
    Occupied = 1,
    Closed = 2,
}

impl SiteState {
    pub fn symbol(self) -> char {
        match self {
            SiteState::Empty => 'E',
            SiteState::Occupied => 'O',
            SiteState::Closed => 'C',
        }
    }

    pub fn from_symbol(c: &str) -> Option<Self> {
        match c {
            "E" => Some(SiteState::Empty),
            "O" => Some(SiteState::Occupied),
            "C" => Some(SiteState::Closed),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Count occupied neighbors.
    Standard,
    /// Count coordinates with an occupied neighbor.
    Modified,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Modified => "modified",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Rule {
    pub variant: Variant,
    pub threshold: u8,
}

impl Rule {
    pub fn new(variant: Variant, threshold: u8) -> Result<Self> {
        if !(1..=3).contains(&threshold) {
            return Err(Error::InvalidParams(format!("threshold must be in 1..=3, got {threshold}")));
        }
        Ok(Rule { variant, threshold })
    }

    pub fn modified(threshold: u8) -> Self {
        Self::new(Variant::Modified, threshold).expect("threshold in 1..=3")
    }

    pub fn standard(threshold: u8) -> Self {
        Self::new(Variant::Standard, threshold).expect("threshold in 1..=3")
    }

    /// Decision from occupancy of the six neighbors in the order
    /// -e1, +e1, -e2, +e2, -e3, +e3.
    #[inline]
    pub fn fires_on(&self, occ: [bool; 6]) -> bool {
        let count = match self.variant {
            Variant::Standard => occ.iter().filter(|&&b| b).count(),
            Variant::Modified => (0..3).filter(|&i| occ[2 * i] || occ[2 * i + 1]).count(),
        };
        count >= self.threshold as usize
    }
}

/// Whether an empty vertex `v` becomes occupied given the current occupied set.
pub fn rule_fires(rule: Rule, v: Vertex, occupied: impl Fn(Vertex) -> bool) -> bool {
    rule.fires_on(v.neighbors().map(occupied))
}

/// Dense bitset over a bounding box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxMask {
    bounds: Cuboid,
    bits: Vec<u64>,
}

impl BoxMask {
    pub fn new(bounds: Cuboid) -> Self {
        let n = bounds.volume() as usize;
        BoxMask { bounds, bits: vec![0; n.div_ceil(64)] }
    }

    pub fn bounds(&self) -> Cuboid {
        self.bounds
    }

    #[inline]
    fn index(&self, v: Vertex) -> Option<usize> {
        self.bounds.contains(v).then(|| grid_index(&self.bounds, v))
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        match self.index(v) {
            Some(i) => {
                self.bits[i / 64] |= 1 << (i % 64);
                true
            }
            None => false,
        }
    }

    pub fn remove(&mut self, v: Vertex) {
        if let Some(i) = self.index(v) {
            self.bits[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Inserts every vertex of `c` that lies inside the mask's bounds.
    pub fn insert_cuboid(&mut self, c: &Cuboid) {
        let Some(c) = c.intersection(&self.bounds) else { return };
        for x in c.lo()[0]..=c.hi()[0] {
            for y in c.lo()[1]..=c.hi()[1] {
                let start = grid_index(&self.bounds, Vertex::new(x, y, c.lo()[2]));
                for i in start..start + c.side(2) as usize {
                    self.bits[i / 64] |= 1 << (i % 64);
                }
            }
        }
    }

    #[inline]
    pub fn get_index(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.bounds.iter().enumerate().filter(|(i, _)| self.get_index(*i)).map(|(_, v)| v)
    }
}

impl Membership for BoxMask {
    #[inline]
    fn contains(&self, v: Vertex) -> bool {
        self.index(v).is_some_and(|i| self.get_index(i))
    }
}

#[inline]
pub(crate) fn grid_index(b: &Cuboid, v: Vertex) -> usize {
    let [_, ny, nz] = b.sides();
    let d = v - b.lo();
    ((d[0] * ny + d[1]) * nz + d[2]) as usize
}

#[inline]
pub(crate) fn grid_vertex(b: &Cuboid, i: usize) -> Vertex {
    let [_, ny, nz] = b.sides();
    let i = i as i64;
    b.lo() + Vertex::new(i / (ny * nz), (i / nz) % ny, i % nz)
}

/// The finite set of vertices on which dynamics run.
#[derive(Clone, Debug)]
pub enum Region {
    Box(Cuboid),
    Mask(BoxMask),
    Set(FxHashSet<Vertex>),
}

impl Region {
    pub fn from_vertices(vs: impl IntoIterator<Item = Vertex>) -> Self {
        Region::Set(vs.into_iter().collect())
    }

    /// Bounding box; `None` for an empty set.
    pub fn bounds(&self) -> Option<Cuboid> {
        match self {
            Region::Box(c) => Some(*c),
            Region::Mask(m) => Some(m.bounds()),
            Region::Set(s) => {
                let mut it = s.iter();
                let first = *it.next()?;
                Some(it.fold(Cuboid::point(first), |acc, &v| acc.hull(&Cuboid::point(v))))
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Region::Box(c) => c.volume() as usize,
            Region::Mask(m) => m.len(),
            Region::Set(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All members, sorted.
    pub fn vertices(&self) -> Vec<Vertex> {
        match self {
            Region::Box(c) => c.iter().collect(),
            Region::Mask(m) => m.iter().collect(),
            Region::Set(s) => {
                let mut v: Vec<_> = s.iter().copied().collect();
                v.sort_unstable();
                v
            }
        }
    }
}

impl Membership for Region {
    #[inline]
    fn contains(&self, v: Vertex) -> bool {
        match self {
            Region::Box(c) => c.contains(v),
            Region::Mask(m) => m.contains(v),
            Region::Set(s) => s.contains(&v),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Storage {
    /// Dense when the bounding box volume is at most [`DEFAULT_DENSE_LIMIT`]
    /// and the region is not an explicit hash set.
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Clone, Debug)]
enum Store {
    /// One state per cell of the region's bounding box.
    Dense(Vec<SiteState>),
    /// Non-empty vertices only.
    Sparse(FxHashMap<Vertex, SiteState>),
}

/// States on a finite region, with every vertex outside the region carrying
/// the exterior state.
#[derive(Clone, Debug)]
pub struct Configuration {
    region: Region,
    exterior: SiteState,
    store: Store,
}

impl Configuration {
    /// All-empty configuration.
    pub fn new(region: Region, exterior: SiteState) -> Self {
        Self::with_storage(region, exterior, Storage::Auto)
    }

    pub fn new_box(b: Cuboid, exterior: SiteState) -> Self {
        Self::new(Region::Box(b), exterior)
    }

    pub fn with_storage(region: Region, exterior: SiteState, storage: Storage) -> Self {
        let volume = region.bounds().map_or(0, |b| b.volume());
        let dense = match storage {
            Storage::Dense => true,
            Storage::Sparse => false,
            Storage::Auto => !matches!(region, Region::Set(_)) && volume <= DEFAULT_DENSE_LIMIT,
        };
        let store = if dense && volume > 0 {
            Store::Dense(vec![SiteState::Empty; volume as usize])
        } else {
            Store::Sparse(FxHashMap::default())
        };
        Configuration { region, exterior, store }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn exterior(&self) -> SiteState {
        self.exterior
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.store, Store::Dense(_))
    }

    /// Same region and states, different exterior.
    pub fn with_exterior(&self, exterior: SiteState) -> Self {
        Configuration { exterior, ..self.clone() }
    }

    /// Same states restricted to a new region; vertices of `region` outside
    /// the old region get the old exterior state unless it is `Occupied`,
    /// in which case they are empty.
    pub fn restricted_to(&self, region: Region, exterior: SiteState) -> Self {
        let mut out = Configuration::new(region, exterior);
        for (v, s) in self.non_empty() {
            if out.region.contains(v) {
                out.set(v, s);
            }
        }
        out
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> SiteState {
        if !self.region.contains(v) {
            return self.exterior;
        }
        match &self.store {
            Store::Dense(cells) => {
                let b = self.region.bounds().expect("dense store implies nonempty region");
                cells[grid_index(&b, v)]
            }
            Store::Sparse(m) => m.get(&v).copied().unwrap_or_default(),
        }
    }

    pub fn try_set(&mut self, v: Vertex, s: SiteState) -> Result<()> {
        if !self.region.contains(v) {
            return Err(Error::Contract(format!("vertex {v} is outside the configuration region")));
        }
        match &mut self.store {
            Store::Dense(cells) => {
                let b = self.region.bounds().expect("nonempty");
                cells[grid_index(&b, v)] = s;
            }
            Store::Sparse(m) => {
                if s == SiteState::Empty {
                    m.remove(&v);
                } else {
                    m.insert(v, s);
                }
            }
        }
        Ok(())
    }

    /// Panics if `v` lies outside the region.
    pub fn set(&mut self, v: Vertex, s: SiteState) {
        self.try_set(v, s).unwrap_or_else(|e| panic!("{e}"))
    }

    /// Non-empty region vertices in lexicographic order.
    pub fn non_empty(&self) -> Vec<(Vertex, SiteState)> {
        match &self.store {
            Store::Dense(cells) => {
                let b = self.region.bounds().expect("nonempty");
                cells
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| s != SiteState::Empty)
                    .map(|(i, &s)| (grid_vertex(&b, i), s))
                    .filter(|(v, _)| self.region.contains(*v))
                    .collect()
            }
            Store::Sparse(m) => {
                let mut out: Vec<_> = m.iter().map(|(&v, &s)| (v, s)).collect();
                out.sort_unstable();
                out
            }
        }
    }

    pub fn vertices_in_state(&self, state: SiteState) -> Vec<Vertex> {
        self.non_empty().into_iter().filter(|&(_, s)| s == state).map(|(v, _)| v).collect()
    }

    pub fn occupied(&self) -> Vec<Vertex> {
        self.vertices_in_state(SiteState::Occupied)
    }

    pub fn closed(&self) -> Vec<Vertex> {
        self.vertices_in_state(SiteState::Closed)
    }

    pub fn count(&self, state: SiteState) -> usize {
        match (&self.store, state) {
            (Store::Dense(cells), s) if s != SiteState::Empty => {
                if let Region::Box(_) = self.region {
                    cells.iter().filter(|&&c| c == s).count()
                } else {
                    self.vertices_in_state(s).len()
                }
            }
            (_, SiteState::Empty) => {
                self.region.len() - self.count(SiteState::Occupied) - self.count(SiteState::Closed)
            }
            _ => self.vertices_in_state(state).len(),
        }
    }
}

/// Outcome of running the dynamics to fixpoint.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub final_config: Configuration,
    /// Round at which each eventually occupied region vertex became occupied;
    /// 0 for initially occupied vertices.
    pub occupation_time: FxHashMap<Vertex, u32>,
    /// Last round in which some vertex became occupied (0 if none did).
    pub rounds: u32,
}

impl EvolutionResult {
    pub fn is_occupied(&self, v: Vertex) -> bool {
        self.final_config.get(v) == SiteState::Occupied
    }

    /// Whether `v` is occupied at the end of round `t`.
    pub fn occupied_by(&self, v: Vertex, t: u32) -> bool {
        self.occupation_time.get(&v).is_some_and(|&s| s <= t)
    }

    /// Eventually occupied region vertices, sorted.
    pub fn occupied_vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<_> = self.occupation_time.keys().copied().collect();
        v.sort_unstable();
        v
    }
}

/// Runs `rule` from `initial` to fixpoint. Exterior vertices never change.
pub fn evolve(initial: &Configuration, rule: Rule) -> EvolutionResult {
    let volume = initial.region.bounds().map_or(0, |b| b.volume());
    if volume > 0 && volume <= DEFAULT_DENSE_LIMIT {
        dense::evolve(initial, rule)
    } else {
        sparse::evolve(initial, rule)
    }
}

/// Like [`evolve`] but forcing the sparse engine.
pub fn evolve_sparse(initial: &Configuration, rule: Rule) -> EvolutionResult {
    sparse::evolve(initial, rule)
}

/// Dynamics restricted to `set`: everything outside is empty forever.
pub fn evolve_internal(set: Region, states: impl Fn(Vertex) -> SiteState, rule: Rule) -> EvolutionResult {
    let mut c = Configuration::new(set, SiteState::Empty);
    for v in c.region.vertices() {
        let s = states(v);
        if s != SiteState::Empty {
            c.set(v, s);
        }
    }
    evolve(&c, rule)
}

mod dense {
    use super::*;

    const EMPTY: u8 = SiteState::Empty as u8;
    const OCC: u8 = SiteState::Occupied as u8;
    const OUTSIDE: u8 = 3;
    const QUEUED: u8 = 0x80;

    struct Grid {
        bounds: Cuboid,
        ny: usize,
        nz: usize,
        cells: Vec<u8>,
        exterior_occupied: bool,
    }

    impl Grid {
        /// Neighbor indices in the order -e1, +e1, -e2, +e2, -e3, +e3;
        /// `None` when out of bounds.
        #[inline]
        fn neighbors(&self, i: usize) -> [Option<usize>; 6] {
            let [nx, ny, nz] = self.bounds.sides().map(|s| s as usize);
            let (x, y, z) = (i / (ny * nz), (i / nz) % ny, i % nz);
            let sx = ny * nz;
            [
                (x > 0).then(|| i - sx),
                (x + 1 < nx).then(|| i + sx),
                (y > 0).then(|| i - nz),
                (y + 1 < ny).then(|| i + nz),
                (z > 0).then(|| i - 1),
                (z + 1 < nz).then(|| i + 1),
            ]
        }

        #[inline]
        fn occupied(&self, n: Option<usize>) -> bool {
            match n {
                None => self.exterior_occupied,
                Some(j) => match self.cells[j] & !QUEUED {
                    OCC => true,
                    OUTSIDE => self.exterior_occupied,
                    _ => false,
                },
            }
        }

        #[inline]
        fn fires(&self, rule: &Rule, i: usize) -> bool {
            rule.fires_on(self.neighbors(i).map(|n| self.occupied(n)))
        }
    }

    pub(super) fn evolve(initial: &Configuration, rule: Rule) -> EvolutionResult {
        let bounds = initial.region.bounds().expect("dense engine needs a nonempty region");
        let volume = bounds.volume() as usize;
        let mut cells = vec![OUTSIDE; volume];
        let mut occupation_time = FxHashMap::default();
        // Fill region cells.
        let fill = |cells: &mut Vec<u8>, v: Vertex, s: SiteState| cells[grid_index(&bounds, v)] = s as u8;
        match &initial.region {
            Region::Box(_) => cells.iter_mut().for_each(|c| *c = EMPTY),
            Region::Mask(m) => {
                for (i, c) in cells.iter_mut().enumerate() {
                    if m.get_index(i) {
                        *c = EMPTY;
                    }
                }
            }
            Region::Set(s) => {
                for &v in s {
                    fill(&mut cells, v, SiteState::Empty);
                }
            }
        }
        for (v, s) in initial.non_empty() {
            fill(&mut cells, v, s);
            if s == SiteState::Occupied {
                occupation_time.insert(v, 0);
            }
        }
        let [_, ny, nz] = bounds.sides().map(|s| s as usize);
        let mut g = Grid { bounds, ny, nz, cells, exterior_occupied: initial.exterior == SiteState::Occupied };
        let _ = (g.ny, g.nz);

        let mut frontier: Vec<usize> = Vec::new();
        for i in 0..volume {
            if g.cells[i] == EMPTY && g.neighbors(i).iter().any(|&n| g.occupied(n)) {
                g.cells[i] |= QUEUED;
                frontier.push(i);
            }
        }

        let mut rounds = 0;
        let mut t = 0u32;
        let mut fired = Vec::new();
        while !frontier.is_empty() {
            t += 1;
            fired.clear();
            for &i in &frontier {
                if g.fires(&rule, i) {
                    fired.push(i);
                }
            }
            for &i in &frontier {
                g.cells[i] &= !QUEUED;
            }
            frontier.clear();
            if fired.is_empty() {
                break;
            }
            rounds = t;
            for &i in &fired {
                g.cells[i] = OCC;
                occupation_time.insert(grid_vertex(&bounds, i), t);
            }
            for &i in &fired {
                for j in g.neighbors(i).into_iter().flatten() {
                    if g.cells[j] == EMPTY {
                        g.cells[j] |= QUEUED;
                        frontier.push(j);
                    }
                }
            }
        }

        let states = g
            .cells
            .iter()
            .map(|&c| match c & !QUEUED {
                OCC => SiteState::Occupied,
                x if x == SiteState::Closed as u8 => SiteState::Closed,
                _ => SiteState::Empty,
            })
            .collect();
        let final_config =
            Configuration { region: initial.region.clone(), exterior: initial.exterior, store: Store::Dense(states) };
        EvolutionResult { final_config, occupation_time, rounds }
    }
}

mod sparse {
    use super::*;

    pub(super) fn evolve(initial: &Configuration, rule: Rule) -> EvolutionResult {
        let region = &initial.region;
        let exterior_occupied = initial.exterior == SiteState::Occupied;
        let mut states: FxHashMap<Vertex, SiteState> = initial.non_empty().into_iter().collect();
        let mut occupation_time: FxHashMap<Vertex, u32> =
            states.iter().filter(|(_, &s)| s == SiteState::Occupied).map(|(&v, _)| (v, 0)).collect();

        let occupied = |states: &FxHashMap<Vertex, SiteState>, v: Vertex| {
            if region.contains(v) {
                states.get(&v) == Some(&SiteState::Occupied)
            } else {
                exterior_occupied
            }
        };
        let is_empty = |states: &FxHashMap<Vertex, SiteState>, v: Vertex| region.contains(v) && !states.contains_key(&v);

        let mut frontier: FxHashSet<Vertex> = FxHashSet::default();
        for &v in occupation_time.keys() {
            frontier.extend(v.neighbors().into_iter().filter(|&w| is_empty(&states, w)));
        }
        if exterior_occupied {
            let boundary: Vec<Vertex> = match region {
                Region::Box(c) => c.iter().filter(|&v| c.exposed_coordinates(v) > 0).collect(),
                _ => region.vertices(),
            };
            for v in boundary {
                if is_empty(&states, v) && v.neighbors().iter().any(|&w| !region.contains(w)) {
                    frontier.insert(v);
                }
            }
        }

        let mut rounds = 0;
        let mut t = 0u32;
        while !frontier.is_empty() {
            t += 1;
            let mut fired: Vec<Vertex> =
                frontier.iter().copied().filter(|&v| rule_fires(rule, v, |w| occupied(&states, w))).collect();
            if fired.is_empty() {
                break;
            }
            fired.sort_unstable();
            rounds = t;
            for &v in &fired {
                states.insert(v, SiteState::Occupied);
                occupation_time.insert(v, t);
            }
            frontier.clear();
            for &v in &fired {
                frontier.extend(v.neighbors().into_iter().filter(|&w| is_empty(&states, w)));
            }
        }

        let mut final_config = Configuration::with_storage(region.clone(), initial.exterior, Storage::Sparse);
        final_config.store = Store::Sparse(states);
        EvolutionResult { final_config, occupation_time, rounds }
    }
}

/// A maximal nearest-neighbor-connected set of occupied vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    /// Sorted members.
    pub vertices: Vec<Vertex>,
    pub bounds: Cuboid,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True when the cluster fills its bounding box.
    pub fn is_cuboid(&self) -> bool {
        self.vertices.len() as u64 == self.bounds.volume()
    }

    pub fn linf_diameter(&self) -> i64 {
        self.bounds.linf_diameter()
    }
}

/// Connected components of a vertex set, ordered by their smallest member.
pub fn clusters_of(vertices: impl IntoIterator<Item = Vertex>) -> Vec<Cluster> {
    let mut remaining: FxHashSet<Vertex> = vertices.into_iter().collect();
    let mut seeds: Vec<Vertex> = remaining.iter().copied().collect();
    seeds.sort_unstable();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        if !remaining.remove(&s) {
            continue;
        }
        let mut members = vec![s];
        let mut bounds = Cuboid::point(s);
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for w in v.neighbors() {
                if remaining.remove(&w) {
                    members.push(w);
                    bounds = bounds.hull(&Cuboid::point(w));
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        out.push(Cluster { vertices: members, bounds });
    }
    out
}

/// Clusters of the final occupied set within the region.
pub fn final_clusters(result: &EvolutionResult) -> Vec<Cluster> {
    clusters_of(result.occupation_time.keys().copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(vs: &[[i64; 3]]) -> impl Fn(Vertex) -> bool + '_ {
        move |v| vs.iter().any(|&c| Vertex(c) == v)
    }

    #[test]
    fn rule_fires_examples() {
        let occ = [[1, 0, 0], [-1, 0, 0], [0, 1, 0]];
        assert!(!rule_fires(Rule::modified(3), Vertex::ORIGIN, set(&occ)));
        assert!(rule_fires(Rule::standard(3), Vertex::ORIGIN, set(&occ)));
        assert!(rule_fires(Rule::modified(2), Vertex::ORIGIN, set(&[[1, 0, 0], [0, 0, -1]])));
    }

    #[test]
    fn threshold_is_validated() {
        assert!(Rule::new(Variant::Modified, 0).is_err());
        assert!(Rule::new(Variant::Standard, 4).is_err());
    }

    fn cube(r: i64) -> Cuboid {
        Cuboid::centered(Vertex::ORIGIN, r)
    }

    #[test]
    fn occupied_exterior_invades_empty_box() {
        let c = Configuration::new_box(cube(2), SiteState::Occupied);
        for res in [evolve(&c, Rule::modified(3)), evolve_sparse(&c, Rule::modified(3))] {
            assert_eq!(res.occupation_time.len(), 125);
            assert_eq!(res.occupation_time[&Vertex::new(2, 2, 2)], 1);
            assert_eq!(res.occupation_time[&Vertex::new(-2, 2, -2)], 1);
            // Face distances d give time 1 + d1 + d2 + d3.
            assert_eq!(res.occupation_time[&Vertex::ORIGIN], 7);
            assert_eq!(res.occupation_time[&Vertex::new(2, 2, 1)], 2);
        }
    }

    #[test]
    fn no_seeds_no_growth() {
        let c = Configuration::new_box(cube(2), SiteState::Empty);
        for rule in [Rule::modified(1), Rule::standard(1), Rule::modified(3)] {
            let res = evolve(&c, rule);
            assert!(res.occupation_time.is_empty());
            assert_eq!(res.rounds, 0);
        }
    }

    #[test]
    fn single_seed_standard_r3_is_stuck() {
        let mut c = Configuration::new_box(cube(5), SiteState::Empty);
        c.set(Vertex::ORIGIN, SiteState::Occupied);
        let res = evolve(&c, Rule::standard(3));
        assert_eq!(res.occupied_vertices(), vec![Vertex::ORIGIN]);
        assert_eq!(res.rounds, 0);
    }

    #[test]
    fn internal_examples() {
        let plate = Cuboid::new(Vertex::ORIGIN, Vertex::new(1, 1, 0));
        let res = evolve_internal(Region::Box(plate), |_| SiteState::Occupied, Rule::modified(2));
        assert_eq!(res.occupation_time.len(), 4);
        assert_eq!(res.rounds, 0);

        let flat = Cuboid::new(Vertex::ORIGIN, Vertex::new(3, 3, 0));
        let seeds = [Vertex::new(0, 0, 0), Vertex::new(3, 3, 0)];
        let res = evolve_internal(
            Region::Box(flat),
            |v| if seeds.contains(&v) { SiteState::Occupied } else { SiteState::Empty },
            Rule::modified(2),
        );
        assert_eq!(res.occupied_vertices(), seeds.to_vec());

        let cube01 = Cuboid::new(Vertex::ORIGIN, Vertex::splat(1));
        let seeds = [Vertex::new(0, 0, 0), Vertex::new(1, 1, 1)];
        let res = evolve_internal(
            Region::Box(cube01),
            |v| if seeds.contains(&v) { SiteState::Occupied } else { SiteState::Empty },
            Rule::modified(2),
        );
        // Every other vertex touches one seed only, so one coordinate is covered.
        assert_eq!(res.occupied_vertices(), seeds.to_vec());
    }

    #[test]
    fn clusters_examples() {
        assert!(clusters_of(vec![]).is_empty());
        let two = clusters_of(vec![Vertex::new(0, 0, 0), Vertex::new(1, 1, 0)]);
        assert_eq!(two.len(), 2);
        let b = Cuboid::new(Vertex::ORIGIN, Vertex::new(2, 1, 1));
        let one = clusters_of(b.iter());
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].len(), 12);
        assert!(one[0].is_cuboid());
    }

    #[test]
    fn mask_region_and_set_region_agree() {
        let b = Cuboid::centered(Vertex::ORIGIN, 3);
        let members: Vec<Vertex> = b.iter().filter(|v| v.l1() <= 4).collect();
        let mut mask = BoxMask::new(b);
        members.iter().for_each(|&v| {
            mask.insert(v);
        });
        let a = Configuration::new(Region::Mask(mask), SiteState::Occupied);
        let s = Configuration::new(Region::from_vertices(members.clone()), SiteState::Occupied);
        assert!(a.is_dense());
        assert!(!s.is_dense());
        let ra = evolve(&a, Rule::modified(3));
        let rs = evolve(&s, Rule::modified(3));
        assert_eq!(ra.occupation_time, rs.occupation_time);
        assert_eq!(ra.occupation_time.len(), members.len());
    }

    #[test]
    fn mask_insert_cuboid_matches_pointwise() {
        let b = Cuboid::centered(Vertex::ORIGIN, 4);
        let c = Cuboid::new(Vertex::new(-2, 0, 1), Vertex::new(6, 3, 2));
        let mut m = BoxMask::new(b);
        m.insert_cuboid(&c);
        for v in b.iter() {
            assert_eq!(m.contains(v), c.contains(v), "{v}");
        }
        assert_eq!(m.len() as u64, c.intersection(&b).unwrap().volume());
    }

    #[test]
    fn configuration_storage_roundtrip() {
        for storage in [Storage::Dense, Storage::Sparse] {
            let mut c = Configuration::with_storage(Region::Box(cube(1)), SiteState::Closed, storage);
            c.set(Vertex::new(1, 0, -1), SiteState::Occupied);
            c.set(Vertex::new(0, 0, 0), SiteState::Closed);
            assert_eq!(c.get(Vertex::new(5, 5, 5)), SiteState::Closed);
            assert_eq!(c.get(Vertex::new(1, 1, 1)), SiteState::Empty);
            assert_eq!(
                c.non_empty(),
                vec![(Vertex::new(0, 0, 0), SiteState::Closed), (Vertex::new(1, 0, -1), SiteState::Occupied)]
            );
            assert_eq!(c.count(SiteState::Empty), 25);
            assert!(c.try_set(Vertex::new(2, 0, 0), SiteState::Occupied).is_err());
        }
    }
}
