//! The blocking set Z built from a shell of good boxes.
//!
//! Shell sites live on a renormalized lattice: site x stands for the box
//! `Q_x = (2L+1)x + [-L, L]^3`, split into eight subcubes by sign pattern.
//! Nice vertices selected in those subcubes span cuboids towards the
//! coordinate planes, and Z is the union of the cuboids together with the
//! cuboids of six keystones around the axis tips.

use std::collections::BTreeMap;
use std::sync::Mutex;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::dynamics::{grid_index, BoxMask, Region, SiteState};
use crate::error::{Error, Result};
use crate::lattice::{Cuboid, Membership, Vertex};
use crate::sampler::SiteField;
use crate::shell::{
    self, compute_a_and_s, direction_key, protection_vectors, protectors, verify_shell, Coloring, ShellReport,
    ShellStatus,
};

/// Keystone half-width in units of L.
pub const KEYSTONE_HALF_WIDTH: i64 = 10;
/// Smallest L for which the keystone argument is guaranteed to close.
pub const KEYSTONE_MIN_L: i64 = 13;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Single nice vertices and unit-thickness plates on the spine.
    Modified,
    /// Collinear pairs of nice vertices and slabs on the spine.
    StandardPairs,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ScaleParams {
    pub l: i64,
    pub m: i64,
    pub model: Model,
}

impl ScaleParams {
    pub fn new(l: i64, m: i64, model: Model) -> Result<Self> {
        if l < 1 || m < 1 {
            return Err(Error::InvalidParams(format!("L and m must be positive (L={l}, m={m})")));
        }
        Ok(ScaleParams { l, m, model })
    }

    /// Radius of the J segments, 36L.
    pub fn big_m(&self) -> i64 {
        36 * self.l
    }

    pub fn period(&self) -> i64 {
        2 * self.l + 1
    }

    pub fn keystone_half(&self) -> i64 {
        KEYSTONE_HALF_WIDTH * self.l
    }

    pub fn meets_keystone_bound(&self) -> bool {
        self.l >= KEYSTONE_MIN_L
    }
}

/// u + J: three axis segments of radius `big_m` through u, sorted.
pub fn j_set(u: Vertex, big_m: i64) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = (0..3)
        .flat_map(|i| (-big_m..=big_m).map(move |t| u + t * Vertex::unit(i)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// l-infinity distance from w to u + J.
pub fn linf_dist_to_j(w: Vertex, u: Vertex, big_m: i64) -> i64 {
    let d = (w - u).map(i64::abs);
    (0..3)
        .map(|i| {
            let along = (d[i] - big_m).max(0);
            (0..3).filter(|&j| j != i).map(|j| d[j]).fold(along, i64::max)
        })
        .min()
        .unwrap()
}

pub fn in_j(w: Vertex, u: Vertex, big_m: i64) -> bool {
    linf_dist_to_j(w, u, big_m) == 0
}

/// No active vertex within l-infinity distance m of u + J.
pub fn is_viable(u: Vertex, field: &dyn SiteField, p: &ScaleParams) -> bool {
    viable_among(u, field.active_vertices().as_deref(), field, p)
}

/// [`is_viable`] with the field's active list computed once by the caller.
fn viable_among(u: Vertex, active: Option<&[Vertex]>, field: &dyn SiteField, p: &ScaleParams) -> bool {
    let (m, big_m) = (p.m, p.big_m());
    if let Some(active) = active {
        return active.iter().all(|&a| linf_dist_to_j(a, u, big_m) > m);
    }
    for i in 0..3 {
        let mut lo = u - Vertex::splat(m);
        let mut hi = u + Vertex::splat(m);
        lo[i] -= big_m;
        hi[i] += big_m;
        if Cuboid::new(lo, hi).iter().any(|v| field.is_active(v)) {
            return false;
        }
    }
    true
}

pub fn is_nice(u: Vertex, field: &dyn SiteField, p: &ScaleParams) -> bool {
    field.state(u) == SiteState::Closed && is_viable(u, field, p)
}

/// The eight subcube sign patterns, in the order of
/// [`shell::diagonal_directions`].
pub fn subcube_signs() -> [Vertex; 8] {
    shell::diagonal_directions()
}

pub fn subcube_index(signs: Vertex) -> usize {
    subcube_signs().iter().position(|&s| s == signs).expect("sign pattern")
}

pub fn box_center(x: Vertex, p: &ScaleParams) -> Vertex {
    p.period() * x
}

/// Q_x as a cuboid.
pub fn renormalized_box(x: Vertex, p: &ScaleParams) -> Cuboid {
    Cuboid::centered(box_center(x, p), p.l)
}

/// (2L+1)x + (0, s1 L] x (0, s2 L] x (0, s3 L].
pub fn subcube(x: Vertex, signs: Vertex, p: &ScaleParams) -> Cuboid {
    let c = box_center(x, p);
    let a = c + signs;
    let b = c + p.l * signs;
    Cuboid::new(a, b)
}

pub fn subcube_center(x: Vertex, signs: Vertex, p: &ScaleParams) -> Vertex {
    box_center(x, p) + ((p.l + 1) / 2) * signs
}

/// Nice vertices of a subcube in lexicographic order.
pub fn nice_in_subcube(x: Vertex, signs: Vertex, field: &dyn SiteField, p: &ScaleParams) -> Vec<Vertex> {
    subcube(x, signs, p).iter().filter(|&v| is_nice(v, field, p)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodBoxReport {
    pub good: bool,
    /// Smallest nice vertex per subcube, in [`subcube_signs`] order.
    pub witnesses: Vec<Option<Vertex>>,
}

impl GoodBoxReport {
    pub fn failing_subcubes(&self) -> Vec<String> {
        subcube_signs()
            .iter()
            .zip(&self.witnesses)
            .filter(|(_, w)| w.is_none())
            .map(|(s, _)| direction_key(*s))
            .collect()
    }
}

pub fn is_good_box(x: Vertex, field: &dyn SiteField, p: &ScaleParams) -> GoodBoxReport {
    let witnesses: Vec<Option<Vertex>> = subcube_signs()
        .iter()
        .map(|&s| subcube(x, s, p).iter().find(|&v| is_nice(v, field, p)))
        .collect();
    GoodBoxReport { good: witnesses.iter().all(Option::is_some), witnesses }
}

/// Per subcube, per direction, the first pair of nice vertices on a common
/// line in that direction.
pub type PairWitnesses = Vec<[Option<(Vertex, Vertex)>; 3]>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwellBoxReport {
    pub swell: bool,
    pub pairs: PairWitnesses,
}

/// Lexicographically first line with two nice vertices, and its two
/// smallest members.
pub fn collinear_pair(nice: &[Vertex], dir: usize) -> Option<(Vertex, Vertex)> {
    let mut lines: BTreeMap<(i64, i64), Vec<Vertex>> = BTreeMap::new();
    for &v in nice {
        let key = match dir {
            0 => (v[1], v[2]),
            1 => (v[0], v[2]),
            _ => (v[0], v[1]),
        };
        lines.entry(key).or_default().push(v);
    }
    lines.into_values().find(|l| l.len() >= 2).map(|mut l| {
        l.sort_unstable();
        (l[0], l[1])
    })
}

pub fn is_swell_box(x: Vertex, field: &dyn SiteField, p: &ScaleParams) -> SwellBoxReport {
    let pairs: PairWitnesses = subcube_signs()
        .iter()
        .map(|&s| {
            let nice = nice_in_subcube(x, s, field, p);
            std::array::from_fn(|d| collinear_pair(&nice, d))
        })
        .collect();
    let swell = pairs.iter().all(|ps| ps.iter().all(Option::is_some));
    SwellBoxReport { swell, pairs }
}

/// Witnesses of one renormalized box.
#[derive(Clone, Debug)]
pub struct BoxWitnesses {
    pub good: GoodBoxReport,
    pub swell: Option<SwellBoxReport>,
}

/// Colors a renormalized site black when its box is good (or swell for the
/// paired model), caching witnesses.
pub struct BoxOracle<'a> {
    field: &'a dyn SiteField,
    params: ScaleParams,
    cache: Mutex<FxHashMap<Vertex, BoxWitnesses>>,
}

impl<'a> BoxOracle<'a> {
    pub fn new(field: &'a dyn SiteField, params: ScaleParams) -> Self {
        BoxOracle { field, params, cache: Mutex::new(FxHashMap::default()) }
    }

    pub fn witnesses(&self, x: Vertex) -> BoxWitnesses {
        if let Some(w) = self.cache.lock().unwrap().get(&x) {
            return w.clone();
        }
        let good = is_good_box(x, self.field, &self.params);
        let swell = (self.params.model == Model::StandardPairs).then(|| is_swell_box(x, self.field, &self.params));
        let w = BoxWitnesses { good, swell };
        self.cache.lock().unwrap().insert(x, w.clone());
        w
    }
}

impl Coloring for BoxOracle<'_> {
    fn is_black(&self, x: Vertex) -> bool {
        let w = self.witnesses(x);
        match &w.swell {
            Some(s) => s.swell,
            None => w.good.good,
        }
    }
}

/// How a shell site contributes to U.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SiteRole {
    /// No zero coordinate and at least two coordinates of size >= 4.
    Octant,
    /// Zero in the given coordinate, the other two of size >= 4.
    Spine(usize),
    /// Contributes nothing.
    Skip,
}

pub fn site_role(x: Vertex) -> SiteRole {
    let big = (0..3).filter(|&i| x[i].abs() >= 4).count();
    match (x.zero_count(), big) {
        (_, b) if b < 2 => SiteRole::Skip,
        (0, _) => SiteRole::Octant,
        (1, _) => SiteRole::Spine((0..3).find(|&i| x[i] == 0).unwrap()),
        _ => SiteRole::Skip,
    }
}

fn sign(c: i64) -> i64 {
    if c < 0 {
        -1
    } else {
        1
    }
}

/// Subcube sign patterns from which a site selects nice vertices.
pub fn selection_subcubes(x: Vertex) -> Vec<Vertex> {
    match site_role(x) {
        SiteRole::Octant => vec![x.map(|c| -sign(c))],
        SiteRole::Spine(i) => [1, -1]
            .into_iter()
            .map(|s| {
                let mut v = x.map(sign);
                v[i] = s;
                v
            })
            .collect(),
        SiteRole::Skip => vec![],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UEntry {
    pub vertex: Vertex,
    /// Generating shell site.
    pub site: Vertex,
    /// Sign pattern of the subcube, e.g. "+-+".
    pub subcube: String,
    /// The other member of a collinear pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<Vertex>,
}

/// Chooses U from the shell sites (sorted) using the box witnesses.
pub fn select_u(sites: &[Vertex], oracle: &BoxOracle<'_>, p: &ScaleParams) -> Result<Vec<UEntry>> {
    let mut out = Vec::new();
    for &x in sites {
        let role = site_role(x);
        let subs = selection_subcubes(x);
        if subs.is_empty() {
            continue;
        }
        let w = oracle.witnesses(x);
        for s in subs {
            let k = subcube_index(s);
            let tag = direction_key(s);
            match (role, p.model) {
                (SiteRole::Spine(i), Model::StandardPairs) => {
                    let pair = w.swell.as_ref().and_then(|sw| sw.pairs[k][i]).ok_or_else(|| {
                        Error::Structural(format!("site {x}: no collinear nice pair in subcube {tag} along axis {i}"))
                    })?;
                    out.push(UEntry { vertex: pair.0, site: x, subcube: tag.clone(), partner: Some(pair.1) });
                    out.push(UEntry { vertex: pair.1, site: x, subcube: tag, partner: Some(pair.0) });
                }
                _ => {
                    let u = w.good.witnesses[k]
                        .ok_or_else(|| Error::Structural(format!("site {x}: no nice vertex in subcube {tag}")))?;
                    out.push(UEntry { vertex: u, site: x, subcube: tag, partner: None });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtectorChoice {
    pub site: Vertex,
    pub a: Vertex,
    pub protector: Vertex,
    pub spine: bool,
}

/// One protector per vector, preferring sites off the coordinate planes and
/// then the lexicographically smallest.
pub fn choose_protectors(x: Vertex, s: &FxHashSet<Vertex>) -> Result<Vec<ProtectorChoice>> {
    protection_vectors(x)?
        .into_iter()
        .map(|a| {
            let y = protectors(x, a, |y| s.contains(&y))
                .into_iter()
                .min_by_key(|y| (y.zero_count() > 0, *y))
                .ok_or_else(|| Error::Structural(format!("site {x}: no {a}-protector in the shell")))?;
            Ok(ProtectorChoice { site: x, a, protector: y, spine: y.zero_count() > 0 })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// B[0,u].
    Bulk,
    /// B[w,u] reaching across the coordinate plane of a spine protector.
    Crossing,
    /// Unit-thickness spine plate.
    Plate,
    /// Spine slab spanned by a collinear pair.
    Slab,
    /// Keystone corner box B[0,u].
    Keystone,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub kind: GeneratorKind,
    /// The nice vertices at the box's outer corner(s).
    pub nice: Vec<Vertex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<Vertex>,
    pub cuboid: Cuboid,
    /// The spine nice vertex fixing a crossing box's far face.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vertex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeystoneCorner {
    pub center: Vertex,
    pub vertex: Vertex,
}

pub fn keystone_centers(n: i64, p: &ScaleParams) -> Vec<Vertex> {
    let r = n * p.period();
    (0..3).flat_map(|i| [r, -r].map(|s| s * Vertex::unit(i))).collect()
}

pub fn keystone_corners(center: Vertex, p: &ScaleParams) -> Vec<Vertex> {
    let h = p.keystone_half();
    subcube_signs().iter().map(|&s| center + h * s).collect()
}

pub fn all_keystone_corners(n: i64, p: &ScaleParams) -> Vec<KeystoneCorner> {
    keystone_centers(n, p)
        .into_iter()
        .flat_map(|c| keystone_corners(c, p).into_iter().map(move |v| KeystoneCorner { center: c, vertex: v }))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StegoStructure {
    pub params: ScaleParams,
    pub n: i64,
    pub u: Vec<UEntry>,
    pub k: Vec<KeystoneCorner>,
    pub generators: Vec<Generator>,
    pub protector_choices: Vec<ProtectorChoice>,
    /// Bounding box of Z.
    pub bounds: Cuboid,
}

impl StegoStructure {
    pub fn z_mask(&self) -> BoxMask {
        let mut m = BoxMask::new(self.bounds);
        for g in &self.generators {
            m.insert_cuboid(&g.cuboid);
        }
        m
    }

    pub fn z_region(&self) -> Region {
        Region::Mask(self.z_mask())
    }

    /// Vertices lying in some U box without being a corner or on an edge of it.
    pub fn deep_mask(&self) -> BoxMask {
        let mut m = BoxMask::new(self.bounds);
        for g in self.generators.iter().filter(|g| g.kind != GeneratorKind::Keystone) {
            let (lo, hi) = (g.cuboid.lo(), g.cuboid.hi());
            for i in 0..3 {
                let (mut a, mut b) = (lo, hi);
                if (0..3).filter(|&j| j != i).any(|j| hi[j] - lo[j] < 2) {
                    continue;
                }
                for j in (0..3).filter(|&j| j != i) {
                    a[j] += 1;
                    b[j] -= 1;
                }
                m.insert_cuboid(&Cuboid::new(a, b));
            }
        }
        m
    }

    /// The U vertex generated by site `k*phi` for each diagonal direction.
    pub fn diagonal_vertices(&self, report: &ShellReport) -> Vec<Option<Vertex>> {
        report
            .k_values()
            .into_iter()
            .map(|(phi, k)| k.and_then(|k| self.u.iter().find(|e| e.site == k * phi).map(|e| e.vertex)))
            .collect()
    }

    /// Largest N with [-N, N]^3 inside the boxes of the diagonal U vertices.
    pub fn inner_box_radius(&self, report: &ShellReport) -> Option<i64> {
        let vs = self.diagonal_vertices(report);
        vs.iter().map(|v| v.map(|v| v.0.iter().map(|c| c.abs()).min().unwrap())).collect::<Option<Vec<_>>>()?.into_iter().min()
    }
}

/// Assembles the boxes of Z from the shell sites, U and K.
pub fn build_z(
    sites: &FxHashSet<Vertex>,
    u: &[UEntry],
    k: &[KeystoneCorner],
    n: i64,
    p: &ScaleParams,
) -> Result<StegoStructure> {
    let mut by_site: FxHashMap<Vertex, Vec<&UEntry>> = FxHashMap::default();
    for e in u {
        by_site.entry(e.site).or_default().push(e);
    }
    let mut generators = Vec::new();
    let mut choices = Vec::new();
    let mut seen_pairs: FxHashSet<(Vertex, Vertex)> = FxHashSet::default();

    for e in u {
        let x = e.site;
        match site_role(x) {
            SiteRole::Octant => {
                let chosen = choose_protectors(x, sites)?;
                let spine: Vec<&ProtectorChoice> = chosen.iter().filter(|c| c.spine).collect();
                let g = match spine.as_slice() {
                    [] => Generator {
                        kind: GeneratorKind::Bulk,
                        nice: vec![e.vertex],
                        site: Some(x),
                        cuboid: Cuboid::new(Vertex::ORIGIN, e.vertex),
                        anchor: None,
                    },
                    [c] => {
                        let y = c.protector;
                        let i = (0..3).find(|&i| y[i] == 0).unwrap();
                        if c.a[i] * x[i] >= 0 {
                            return Err(Error::Structural(format!(
                                "site {x}: spine protector {y} for {} lies on the wrong plane",
                                c.a
                            )));
                        }
                        let mut signs = y.map(sign);
                        signs[i] = sign(c.a[i]);
                        let tag = direction_key(signs);
                        let v = by_site
                            .get(&y)
                            .and_then(|es| {
                                es.iter().filter(|f| f.subcube == tag).map(|f| f.vertex).max_by_key(|v| v[i].abs())
                            })
                            .ok_or_else(|| {
                                Error::Structural(format!("site {x}: spine protector {y} has no U vertex in {tag}"))
                            })?;
                        let mut w = Vertex::ORIGIN;
                        w[i] = v[i];
                        Generator {
                            kind: GeneratorKind::Crossing,
                            nice: vec![e.vertex],
                            site: Some(x),
                            cuboid: Cuboid::new(w, e.vertex),
                            anchor: Some(v),
                        }
                    }
                    _ => {
                        return Err(Error::Structural(format!(
                            "site {x}: {} chosen protectors lie on coordinate planes",
                            spine.len()
                        )))
                    }
                };
                choices.extend(chosen);
                generators.push(g);
            }
            SiteRole::Spine(i) => {
                let mut w = Vertex::ORIGIN;
                w[i] = e.vertex[i];
                match e.partner {
                    None => generators.push(Generator {
                        kind: GeneratorKind::Plate,
                        nice: vec![e.vertex],
                        site: Some(x),
                        cuboid: Cuboid::new(w, e.vertex),
                        anchor: None,
                    }),
                    Some(other) => {
                        let key = (e.vertex.min(other), e.vertex.max(other));
                        if seen_pairs.insert(key) {
                            generators.push(Generator {
                                kind: GeneratorKind::Slab,
                                nice: vec![key.0, key.1],
                                site: Some(x),
                                cuboid: Cuboid::new(w, other),
                                anchor: None,
                            });
                        }
                    }
                }
            }
            SiteRole::Skip => return Err(Error::Structural(format!("site {x} should not generate U vertices"))),
        }
    }
    for c in k {
        generators.push(Generator {
            kind: GeneratorKind::Keystone,
            nice: vec![c.vertex],
            site: None,
            cuboid: Cuboid::new(Vertex::ORIGIN, c.vertex),
            anchor: None,
        });
    }
    let bounds = generators
        .iter()
        .map(|g| g.cuboid)
        .reduce(|a, b| a.hull(&b))
        .ok_or_else(|| Error::Structural("no boxes".into()))?;
    Ok(StegoStructure { params: *p, n, u: u.to_vec(), k: k.to_vec(), generators, protector_choices: choices, bounds })
}

/// Everything produced by one construction attempt.
#[derive(Clone, Debug)]
pub struct Construction {
    pub structure: StegoStructure,
    pub shell: ShellReport,
}

/// Shell of good (or swell) boxes, keystones, U and Z for radius `n`.
pub fn construct(field: &dyn SiteField, n: i64, p: &ScaleParams, cap: i64) -> Result<Construction> {
    let oracle = BoxOracle::new(field, *p);
    let cand = compute_a_and_s(n, &oracle, cap)?;
    if cand.status != ShellStatus::Complete {
        return Err(Error::Structural(format!("reachable set escaped the cap {cap}")));
    }
    let report = verify_shell(&cand)?;
    if !report.all_hold() {
        return Err(Error::Structural(format!(
            "not a shell: S1 {} S2 {} S3 {} S4 {}",
            report.s1, report.s2, report.s3, report.s4
        )));
    }
    let k = all_keystone_corners(n, p);
    let missing: Vec<Vertex> = k.iter().map(|c| c.vertex).filter(|&v| !is_nice(v, field, p)).collect();
    if !missing.is_empty() {
        return Err(Error::Structural(format!("keystone corners not nice: {missing:?}")));
    }
    let u = select_u(&cand.sorted_sites(), &oracle, p)?;
    let structure = build_z(&cand.sites, &u, &k, n, p)?;
    Ok(Construction { structure, shell: report })
}

/// Number of coordinates in which x has a neighbor outside z.
pub fn eta(z: &impl Membership, x: Vertex) -> Result<u8> {
    if !z.contains(x) {
        return Err(Error::Contract(format!("{x} is not in Z")));
    }
    let n = x.neighbors();
    Ok((0..3).filter(|&i| !z.contains(n[2 * i]) || !z.contains(n[2 * i + 1])).count() as u8)
}

/// Number of neighbors of x outside z.
pub fn eta_prime(z: &impl Membership, x: Vertex) -> Result<u8> {
    if !z.contains(x) {
        return Err(Error::Contract(format!("{x} is not in Z")));
    }
    Ok(x.neighbors().iter().filter(|&&w| !z.contains(w)).count() as u8)
}

/// Condition (i): near two coordinate planes, where the keystones cover Z.
pub fn near_axis(w: Vertex, n: i64, p: &ScaleParams) -> bool {
    let t = p.keystone_half();
    let a = w.map(i64::abs);
    let below = (0..3).filter(|&i| a[i] < t).count();
    let at = (0..3).filter(|&i| a[i] == t).count();
    below >= 2 || (below >= 1 && at >= 1 && w.linf() < n * p.period() + t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerViolation {
    /// Index into `generators`.
    pub generator: usize,
    pub nice: Vec<Vertex>,
    pub w: Vertex,
    pub corner: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StructureReport {
    pub z_size: usize,
    pub corner_edge_checked: usize,
    /// Corner or edge vertices satisfying none of the five conditions.
    pub violations: Vec<CornerViolation>,
    /// Vertices whose exposure count reaches 3 but are not closed.
    pub exposed_not_closed: Vec<Vertex>,
    /// (exposed vertex, occupied vertex within distance m).
    pub occupied_near_exposed: Vec<(Vertex, Vertex)>,
    /// U and K vertices that are not nice.
    pub not_nice: Vec<Vertex>,
    /// Z vertices by exposure count (coordinates for the modified rule,
    /// neighbors for the standard rule).
    pub exposure_histogram: Vec<usize>,
}

impl StructureReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
            && self.exposed_not_closed.is_empty()
            && self.occupied_near_exposed.is_empty()
            && self.not_nice.is_empty()
    }

    pub fn violation_count(&self) -> usize {
        self.violations.len() + self.exposed_not_closed.len() + self.occupied_near_exposed.len() + self.not_nice.len()
    }
}

/// Exposure count of every vertex of a mask: coordinates with an outside
/// neighbor (`by_neighbors = false`) or outside neighbors (`true`).
pub fn exposure_map(z: &BoxMask, by_neighbors: bool) -> Vec<(Vertex, u8)> {
    let b = z.bounds();
    let [nx, ny, nz] = b.sides().map(|s| s as usize);
    let mut out = Vec::new();
    let inside = |x: isize, y: isize, w: isize| {
        x >= 0
            && y >= 0
            && w >= 0
            && (x as usize) < nx
            && (y as usize) < ny
            && (w as usize) < nz
            && z.get_index((x as usize * ny + y as usize) * nz + w as usize)
    };
    let mut idx = 0usize;
    for x in 0..nx as isize {
        for y in 0..ny as isize {
            for w in 0..nz as isize {
                if z.get_index(idx) {
                    let out_pairs = [
                        (!inside(x - 1, y, w), !inside(x + 1, y, w)),
                        (!inside(x, y - 1, w), !inside(x, y + 1, w)),
                        (!inside(x, y, w - 1), !inside(x, y, w + 1)),
                    ];
                    let e = if by_neighbors {
                        out_pairs.iter().map(|&(a, c)| a as u8 + c as u8).sum()
                    } else {
                        out_pairs.iter().filter(|&&(a, c)| a || c).count() as u8
                    };
                    if e > 0 {
                        out.push((b.lo() + Vertex::new(x as i64, y as i64, w as i64), e));
                    }
                }
                idx += 1;
            }
        }
    }
    out
}

/// Checks the five corner/edge conditions for every box and, directly on Z,
/// the hypotheses needed for the comparison: exposure 3 implies closed, and
/// exposure 2 implies no occupied vertex within distance m.
pub fn verify_structure(st: &StegoStructure, field: &dyn SiteField) -> StructureReport {
    let p = &st.params;
    let big_m = p.big_m();
    let z = st.z_mask();
    let deep = st.deep_mask();
    let mut report = StructureReport { z_size: z.len(), ..Default::default() };

    for (gi, g) in st.generators.iter().enumerate() {
        let (corners, edges) = g.cuboid.corners_and_edges();
        let keystone = g.kind == GeneratorKind::Keystone;
        for (w, corner) in corners.iter().map(|&w| (w, true)).chain(edges.iter().map(|&w| (w, false))) {
            report.corner_edge_checked += 1;
            let in_j_of_nice = || g.nice.iter().any(|&u| in_j(w, u, big_m));
            let ok = near_axis(w, st.n, p)
                || g.nice.contains(&w)
                || (!keystone && !corner && in_j_of_nice())
                || (keystone && in_j_of_nice())
                || deep.contains(w);
            if !ok {
                report.violations.push(CornerViolation { generator: gi, nice: g.nice.clone(), w, corner });
            }
        }
    }

    let standard = p.model == Model::StandardPairs;
    let exposure = exposure_map(&z, standard);
    let mut hist = vec![0usize; if standard { 7 } else { 4 }];
    hist[0] = report.z_size - exposure.len();
    for &(_, e) in &exposure {
        hist[e as usize] += 1;
    }
    report.exposure_histogram = hist;
    let mut exposed2: FxHashSet<Vertex> = FxHashSet::default();
    for &(w, e) in &exposure {
        if e >= 3 && field.state(w) != SiteState::Closed {
            report.exposed_not_closed.push(w);
        }
        if e >= 2 {
            exposed2.insert(w);
        }
    }
    let m = p.m;
    let active = field.active_vertices();
    match &active {
        Some(active) => {
            for &o in active.iter().filter(|&&o| field.state(o) == SiteState::Occupied) {
                for w in Cuboid::centered(o, m).iter() {
                    if exposed2.contains(&w) {
                        report.occupied_near_exposed.push((w, o));
                    }
                }
            }
        }
        None => {
            let mut ws: Vec<Vertex> = exposed2.iter().copied().collect();
            ws.sort_unstable();
            for w in ws {
                if let Some(o) = Cuboid::centered(w, m).iter().find(|&o| field.state(o) == SiteState::Occupied) {
                    report.occupied_near_exposed.push((w, o));
                }
            }
        }
    }
    report.occupied_near_exposed.sort_unstable();

    let mut nice_needed: Vec<Vertex> = st.u.iter().map(|e| e.vertex).chain(st.k.iter().map(|c| c.vertex)).collect();
    nice_needed.sort_unstable();
    nice_needed.dedup();
    report.not_nice = nice_needed
        .into_iter()
        .filter(|&v| field.state(v) != SiteState::Closed || !viable_among(v, active.as_deref(), field, p))
        .collect();
    report
}

/// Sanity helper for tests: index of `v` in a mask's grid.
#[doc(hidden)]
pub fn mask_index(m: &BoxMask, v: Vertex) -> usize {
    grid_index(&m.bounds(), v)
}
