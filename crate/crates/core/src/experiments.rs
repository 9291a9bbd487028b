//! Monte Carlo studies and finite-scale checks of the deterministic lemmas.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::dynamics::{clusters_of, evolve, Configuration, Region, Rule, SiteState};
use crate::error::{Error, Result};
use crate::lattice::{Cuboid, Vertex};
use crate::rng::trial_seed;
use crate::sampler::{realize, IidField, SampleMode, SampleParams, SiteField};
use crate::shell::{compute_a_and_s, default_cap, min_cap, verify_shell, ShellStatus};
use crate::stego::{all_keystone_corners, construct, is_nice, Construction, ScaleParams};

/// Lower-case state name used in outputs.
pub fn state_name(s: SiteState) -> &'static str {
    match s {
        SiteState::Empty => "empty",
        SiteState::Occupied => "occupied",
        SiteState::Closed => "closed",
    }
}

/// The box of side `side` around the origin; even sides extend one further
/// on the negative side.
pub fn centered_box(side: i64) -> Cuboid {
    let lo = -(side / 2);
    Cuboid::new(Vertex::splat(lo), Vertex::splat(lo + side - 1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub p_grid: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub rule: Rule,
    pub box_side: i64,
    pub exterior: SiteState,
    pub trials: u64,
    pub seed: u64,
    pub mode: SampleMode,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        if self.p_grid.is_empty() || self.q_grid.is_empty() {
            return Err(Error::InvalidParams("empty p or q grid".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        if self.box_side < 1 {
            return Err(Error::InvalidParams(format!("box side must be positive (got {})", self.box_side)));
        }
        for &p in &self.p_grid {
            for &q in &self.q_grid {
                SampleParams::new(p, q, self.mode, self.seed)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub p: f64,
    pub q: f64,
    /// Fraction of trials in which the origin ended up occupied.
    pub estimate: f64,
    /// Half-width of the normal-approximation 95% interval.
    pub ci95: f64,
    pub trials: u64,
    pub successes: u64,
}

/// 1.96 * sqrt(e(1-e)/n).
pub fn normal_ci95(successes: u64, trials: u64) -> f64 {
    let n = trials as f64;
    let e = successes as f64 / n;
    1.96 * (e * (1.0 - e) / n).sqrt()
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    let z = 1.96f64;
    let n = trials as f64;
    let e = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (e + z * z / (2.0 * n)) / denom;
    let half = z * (e * (1.0 - e) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Final occupied set of one trial. Trials share seeds across grid points,
/// so runs at different (p, q) are coupled.
pub fn run_trial(spec: &ScanSpec, p: f64, q: f64, trial: u64) -> Result<crate::dynamics::EvolutionResult> {
    let params = SampleParams::new(p, q, spec.mode, trial_seed(spec.seed, trial))?;
    let field = params.field()?;
    let config = realize(&*field, Region::Box(centered_box(spec.box_side)), spec.exterior);
    Ok(evolve(&config, spec.rule))
}

/// One estimate per grid point, p-major. Trials run in parallel; results do
/// not depend on the thread count.
pub fn estimate_final_density(spec: &ScanSpec) -> Result<Vec<DensityEstimate>> {
    spec.validate()?;
    let mut out = Vec::new();
    for &p in &spec.p_grid {
        for &q in &spec.q_grid {
            let hits: Vec<bool> = (0..spec.trials)
                .into_par_iter()
                .map(|t| run_trial(spec, p, q, t).map(|r| r.is_occupied(Vertex::ORIGIN)))
                .collect::<Result<_>>()?;
            let successes = hits.iter().filter(|&&h| h).count() as u64;
            out.push(DensityEstimate {
                p,
                q,
                estimate: successes as f64 / spec.trials as f64,
                ci95: normal_ci95(successes, spec.trials),
                trials: spec.trials,
                successes,
            });
        }
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "p,q,rule,variant,box_side,exterior,trials,estimate,ci95,seed";

/// CSV with a comment line carrying the tool version and the full spec.
pub fn density_csv(spec: &ScanSpec, estimates: &[DensityEstimate], version: &str) -> Result<String> {
    let mut s = String::new();
    writeln!(s, "# pbp {version} config={}", serde_json::to_string(spec)?).unwrap();
    writeln!(s, "{CSV_HEADER}").unwrap();
    for e in estimates {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            e.p,
            e.q,
            spec.rule.threshold,
            spec.rule.variant.name(),
            spec.box_side,
            state_name(spec.exterior),
            e.trials,
            e.estimate,
            e.ci95,
            spec.seed
        )
        .unwrap();
    }
    Ok(s)
}

/// The block N x + [0, N)^3.
pub fn block(x: Vertex, n: i64) -> Cuboid {
    let lo = n * x;
    Cuboid::new(lo, lo + Vertex::splat(n - 1))
}

/// No closed vertex in the block and every axis line through it meets an
/// occupied vertex.
pub fn is_n_open(x: Vertex, field: &dyn SiteField, n: i64) -> bool {
    let b = block(x, n);
    if b.iter().any(|v| field.state(v) == SiteState::Closed) {
        return false;
    }
    let lo = b.lo();
    (0..3).all(|d| {
        let (j, k) = ((d + 1) % 3, (d + 2) % 3);
        (0..n).all(|a| {
            (0..n).all(|c| {
                let mut v = lo;
                v[j] += a;
                v[k] += c;
                (0..n).any(|t| {
                    let mut w = v;
                    w[d] += t;
                    field.state(w) == SiteState::Occupied
                })
            })
        })
    })
}

pub fn is_n_occupied(x: Vertex, occupied: impl Fn(Vertex) -> bool, n: i64) -> bool {
    block(x, n).iter().all(occupied)
}

/// Number of disjoint axis lines of length `n` with no occupied vertex at
/// density p.
pub fn line_vacancy_count(p: f64, n: i64, lines: u64, seed: u64) -> u64 {
    let field = IidField { p, q: 0.0, seed };
    (0..lines as i64)
        .into_par_iter()
        .filter(|&j| {
            let base = Vertex::new(j % 1000, j / 1000, 0);
            (0..n).all(|t| field.state(base + t * Vertex::unit(2)) != SiteState::Occupied)
        })
        .count() as u64
}

/// Runs modified threshold-3 growth on the blocks of x, y1 and y2 (nothing
/// else occupied) with y1 and y2 fully occupied, and reports whether the
/// block of x fills.
pub fn check_renormalized_growth(n: i64, x: Vertex, y1: Vertex, y2: Vertex, field: &dyn SiteField) -> Result<bool> {
    let d1 = y1 - x;
    let d2 = y2 - x;
    if d1.l1() != 1 || d2.l1() != 1 || (y1 - y2).linf() != 1 {
        return Err(Error::Contract(format!("{y1} and {y2} must be neighbors of {x} in different coordinates")));
    }
    if !is_n_open(x, field, n) {
        return Err(Error::Contract(format!("{x} is not {n}-open")));
    }
    let bx = block(x, n);
    let region = Region::from_vertices(bx.iter().chain(block(y1, n).iter()).chain(block(y2, n).iter()));
    let mut c = Configuration::new(region, SiteState::Empty);
    for v in bx.iter() {
        let s = field.state(v);
        if s != SiteState::Empty {
            c.set(v, s);
        }
    }
    for v in block(y1, n).iter().chain(block(y2, n).iter()) {
        c.set(v, SiteState::Occupied);
    }
    let r = evolve(&c, Rule::modified(3));
    Ok(is_n_occupied(x, |v| r.is_occupied(v), n))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub trials: u64,
    pub clusters: u64,
    /// Largest cluster side length, per trial.
    pub max_side_lengths: Vec<i64>,
    /// Clusters that differ from their bounding cuboid.
    pub cuboid_violations: u64,
}

/// Modified threshold-2 growth from i.i.d. occupied vertices (q = 0) with
/// nothing occupied outside the box.
pub fn r2_cluster_statistics(p: f64, box_side: i64, trials: u64, seed: u64) -> Result<ClusterSummary> {
    let per_trial: Vec<(u64, i64, u64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let params = SampleParams::new(p, 0.0, SampleMode::Iid, trial_seed(seed, t))?;
            let config = realize(&*params.field()?, Region::Box(centered_box(box_side)), SiteState::Empty);
            let r = evolve(&config, Rule::modified(2));
            let clusters = clusters_of(r.occupation_time.keys().copied());
            let violations = clusters.iter().filter(|c| !c.is_cuboid()).count() as u64;
            let max_side = clusters.iter().map(|c| c.bounds.sides().into_iter().max().unwrap()).max().unwrap_or(0);
            Ok((clusters.len() as u64, max_side, violations))
        })
        .collect::<Result<_>>()?;
    Ok(ClusterSummary {
        trials,
        clusters: per_trial.iter().map(|t| t.0).sum(),
        max_side_lengths: per_trial.iter().map(|t| t.1).collect(),
        cuboid_violations: per_trial.iter().map(|t| t.2).sum(),
    })
}

/// Radius of the vertex neighborhood that decides whether a renormalized
/// box is good, in units of L.
pub const DEPENDENCY_RADIUS: i64 = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttemptSchedule {
    /// Shell radii, strictly increasing.
    pub radii: Vec<i64>,
    /// Required gap between the smallest cap of one attempt and the next
    /// radius; `None` skips the spacing check.
    pub gap: Option<i64>,
    /// Reject schedules whose dependency annuli overlap.
    pub check_independence: bool,
}

/// l1 range of vertices that attempt with radius n can depend on.
pub fn dependency_annulus(n: i64, p: &ScaleParams) -> (i64, i64) {
    let reach = 3 * DEPENDENCY_RADIUS * p.l;
    (p.period() * n - reach, p.period() * default_cap(n) + reach)
}

impl AttemptSchedule {
    pub fn validate(&self, p: &ScaleParams) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::InvalidParams("empty attempt schedule".into()));
        }
        for w in self.radii.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParams(format!("radii must increase ({} then {})", w[0], w[1])));
            }
            if let Some(gap) = self.gap {
                if w[1] - min_cap(w[0]) < gap {
                    return Err(Error::InvalidParams(format!(
                        "radius {} is closer than {gap} to the cap {} of radius {}",
                        w[1],
                        min_cap(w[0]),
                        w[0]
                    )));
                }
            }
            if self.check_independence {
                let (a, b) = (dependency_annulus(w[0], p), dependency_annulus(w[1], p));
                if a.1 >= b.0 {
                    return Err(Error::InvalidParams(format!(
                        "dependency annuli of radii {} and {} overlap ({:?} and {:?})",
                        w[0], w[1], a, b
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub n: i64,
    pub shell_status: String,
    pub shell_ok: bool,
    pub keystones_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug)]
pub struct ScheduleOutcome {
    pub records: Vec<AttemptRecord>,
    /// Index of the first successful attempt and its construction.
    pub success: Option<(usize, Construction)>,
}

/// Tries the radii in order until a shell of good boxes and all keystones
/// are found, then builds Z.
pub fn run_attempt_schedule(
    schedule: &AttemptSchedule,
    field: &dyn SiteField,
    p: &ScaleParams,
) -> Result<ScheduleOutcome> {
    schedule.validate(p)?;
    let mut records = Vec::new();
    for (k, &n) in schedule.radii.iter().enumerate() {
        let oracle = crate::stego::BoxOracle::new(field, *p);
        let cand = compute_a_and_s(n, &oracle, default_cap(n))?;
        let shell_ok = cand.status == ShellStatus::Complete && verify_shell(&cand)?.all_hold();
        let keystones_ok = all_keystone_corners(n, p).iter().all(|c| is_nice(c.vertex, field, p));
        let mut rec = AttemptRecord { n, shell_status: cand.status.name().into(), shell_ok, keystones_ok, error: None };
        if shell_ok && keystones_ok {
            match construct(field, n, p, default_cap(n)) {
                Ok(c) => {
                    records.push(rec);
                    return Ok(ScheduleOutcome { records, success: Some((k, c)) });
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
        }
        records.push(rec);
    }
    Ok(ScheduleOutcome { records, success: None })
}

/// Whether some nearest-neighbor path of occupied vertices joins `inner` to
/// the complement of `outer`.
pub fn occupied_path_exists(occupied: impl Fn(Vertex) -> bool, inner: Cuboid, outer: Cuboid) -> bool {
    let mut seen: FxHashSet<Vertex> = FxHashSet::default();
    let mut queue: VecDeque<Vertex> = inner.iter().filter(|&v| occupied(v)).collect();
    seen.extend(queue.iter().copied());
    while let Some(v) = queue.pop_front() {
        if !outer.contains(v) {
            return true;
        }
        for w in v.neighbors() {
            if !seen.contains(&w) && occupied(w) {
                seen.insert(w);
                queue.push_back(w);
            }
        }
    }
    false
}

/// The blocking claim for one N-closed site: no occupied path from
/// `center + [-N, N]^3` to the outside of `center + [-22 N0, 22 N0]^3`.
pub fn check_no_percolation_coupling(
    center: Vertex,
    n: i64,
    n0: i64,
    occupied: impl Fn(Vertex) -> bool,
) -> Result<bool> {
    if n != n0 / 2 {
        return Err(Error::Contract(format!("N must be floor(N0/2) (N={n}, N0={n0})")));
    }
    Ok(!occupied_path_exists(occupied, Cuboid::centered(center, n), Cuboid::centered(center, 22 * n0)))
}
