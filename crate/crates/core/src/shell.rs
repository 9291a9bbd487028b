//! Shells on a colored lattice: taxed and free steps, the reachable set A,
//! the surface S of sites one taxed step outside A, and checks of the four
//! shell properties.
//!
//! A is computed as a reachability closure. Permissible paths are required to
//! visit distinct sites, but any walk can be shortcut to such a path, so the
//! closure reaches exactly the same sites.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::sync::OnceLock;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{SignedInterval, Vertex};
use crate::rng::{stream, vertex_uniform};

/// Site coloring of the (renormalized) lattice.
pub trait Coloring: Sync {
    fn is_black(&self, x: Vertex) -> bool;
}

impl<F: Fn(Vertex) -> bool + Sync> Coloring for F {
    fn is_black(&self, x: Vertex) -> bool {
        self(x)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AllBlack;

impl Coloring for AllBlack {
    fn is_black(&self, _: Vertex) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AllWhite;

impl Coloring for AllWhite {
    fn is_black(&self, _: Vertex) -> bool {
        false
    }
}

/// Each site black independently with probability `b`.
#[derive(Clone, Copy, Debug)]
pub struct RandomColoring {
    pub b: f64,
    pub seed: u64,
}

impl Coloring for RandomColoring {
    fn is_black(&self, x: Vertex) -> bool {
        vertex_uniform(self.seed, stream::COLORING, x) < self.b
    }
}

pub fn is_taxed_step(x: Vertex, y: Vertex) -> bool {
    x != y
        && (0..3).all(|i| {
            let (a, b) = (x[i], y[i]);
            if a == 0 {
                b.abs() <= 1
            } else {
                b == a + a.signum()
            }
        })
}

/// All y with (x, y) a taxed step, in lexicographic order.
pub fn taxed_successors(x: Vertex) -> Vec<Vertex> {
    let choices = |c: i64| -> Vec<i64> {
        if c == 0 {
            vec![-1, 0, 1]
        } else {
            vec![c + c.signum()]
        }
    };
    let mut out = Vec::with_capacity(27);
    for a in choices(x[0]) {
        for b in choices(x[1]) {
            for c in choices(x[2]) {
                let y = Vertex::new(a, b, c);
                if y != x {
                    out.push(y);
                }
            }
        }
    }
    out
}

/// The 38 free-step displacements, sorted.
pub fn free_step_set() -> &'static [Vertex] {
    static F: OnceLock<Vec<Vertex>> = OnceLock::new();
    F.get_or_init(|| {
        let mut out = Vec::new();
        for g in [[1, 0, 0], [1, 1, 1], [3, 1, 1]] {
            for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                for signs in 0..8 {
                    let v = Vertex(std::array::from_fn(|i| {
                        let s = if signs >> i & 1 == 1 { -1 } else { 1 };
                        s * g[perm[i]]
                    }));
                    out.push(v);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    })
}

pub fn is_free_step(x: Vertex, y: Vertex) -> bool {
    y.l1() < x.l1() && free_step_set().binary_search(&(y - x)).is_ok()
}

pub fn free_successors(x: Vertex) -> impl Iterator<Item = Vertex> {
    let n = x.l1();
    free_step_set().iter().map(move |&f| x + f).filter(move |y| y.l1() < n)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ShellStatus {
    Complete,
    AEscaped,
    /// Complete, but the shell properties do not all hold.
    Failed,
}

impl ShellStatus {
    pub fn name(self) -> &'static str {
        match self {
            ShellStatus::Complete => "Complete",
            ShellStatus::AEscaped => "AEscaped",
            ShellStatus::Failed => "Failed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShellCandidate {
    pub n: i64,
    pub sites: FxHashSet<Vertex>,
    /// The reachable set (partial when escaped).
    pub a: FxHashSet<Vertex>,
    pub status: ShellStatus,
}

impl ShellCandidate {
    /// Sites in lexicographic order.
    pub fn sorted_sites(&self) -> Vec<Vertex> {
        let mut v: Vec<_> = self.sites.iter().copied().collect();
        v.sort_unstable();
        v
    }

    /// A candidate built directly from a site set, for checking arbitrary sets.
    pub fn from_sites(n: i64, sites: impl IntoIterator<Item = Vertex>) -> Self {
        ShellCandidate { n, sites: sites.into_iter().collect(), a: FxHashSet::default(), status: ShellStatus::Complete }
    }
}

pub fn default_cap(n: i64) -> i64 {
    n + 6 * (n as f64).sqrt().ceil() as i64
}

/// Smallest admissible exploration cap.
pub fn min_cap(n: i64) -> i64 {
    n + (3.0 * (n as f64).sqrt()).ceil() as i64
}

/// Builds A from the open ball of radius `n` and then S. Exploration stops
/// with `AEscaped` as soon as a reached site exceeds `cap` in either norm.
pub fn compute_a_and_s(n: i64, coloring: &dyn Coloring, cap: i64) -> Result<ShellCandidate> {
    if n < 1 {
        return Err(Error::InvalidParams(format!("shell radius must be positive, got {n}")));
    }
    if cap < min_cap(n) {
        return Err(Error::Contract(format!("cap {cap} is below n + ceil(3 sqrt n) = {}", min_cap(n))));
    }
    let mut a: FxHashSet<Vertex> = FxHashSet::default();
    let mut queue = VecDeque::new();
    for x in -(n - 1)..n {
        let rx = n - 1 - x.abs();
        for y in -rx..=rx {
            let rz = rx - y.abs();
            for z in -rz..=rz {
                let v = Vertex::new(x, y, z);
                a.insert(v);
                queue.push_back(v);
            }
        }
    }
    let escaped = |v: Vertex| v.l1() > cap || v.linf() > cap;
    while let Some(x) = queue.pop_front() {
        let next = free_successors(x).chain(taxed_successors(x).into_iter().filter(|&y| !coloring.is_black(y)));
        for y in next {
            if a.insert(y) {
                if escaped(y) {
                    return Ok(ShellCandidate { n, sites: FxHashSet::default(), a, status: ShellStatus::AEscaped });
                }
                queue.push_back(y);
            }
        }
    }
    let mut sites = FxHashSet::default();
    for &x in &a {
        for y in taxed_successors(x) {
            if !a.contains(&y) {
                sites.insert(y);
            }
        }
    }
    Ok(ShellCandidate { n, sites, a, status: ShellStatus::Complete })
}

/// Whether x is a-protected by y; `a` must have no zero coordinate.
pub fn a_protected(x: Vertex, y: Vertex, a: Vertex) -> bool {
    debug_assert!((0..3).all(|i| a[i] != 0));
    let d = y - x;
    let half = |i: usize| SignedInterval::half_open(a[i]).is_ok_and(|s| s.contains(d[i]));
    let closed = |i: usize| SignedInterval::closed(a[i]).contains(d[i]);
    if (0..3).all(half) {
        return true;
    }
    (0..3).any(|i| y[i] == 0 && half(i) && (0..3).filter(|&j| j != i).all(closed))
}

/// The protection vectors required at x, sign-adjusted to x's octant.
/// Errors unless x has at least two nonzero coordinates.
pub fn protection_vectors(x: Vertex) -> Result<Vec<Vertex>> {
    let sign = |i: usize| if x[i] < 0 { -1 } else { 1 };
    let flip = |a: [i64; 3]| Vertex(std::array::from_fn(|i| a[i] * sign(i)));
    match x.zero_count() {
        0 => Ok([[-3, 3, 3], [3, -3, 3], [3, 3, -3]].into_iter().map(flip).collect()),
        1 => {
            let z = (0..3).find(|&i| x[i] == 0).unwrap();
            let (i, j) = match z {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let mut out = Vec::with_capacity(4);
            for (ai, aj) in [(-3, 3), (3, -3)] {
                for az in [3, -3] {
                    let mut a = [0; 3];
                    a[i] = ai;
                    a[j] = aj;
                    a[z] = az;
                    out.push(flip(a));
                }
            }
            Ok(out)
        }
        _ => Err(Error::Contract(format!("protection is undefined for {x} (fewer than two nonzero coordinates)"))),
    }
}

/// Every y that a-protects x, in lexicographic order, among those accepted
/// by `member`.
pub fn protectors(x: Vertex, a: Vertex, member: impl Fn(Vertex) -> bool) -> Vec<Vertex> {
    let range = |i: usize| {
        let (lo, hi) = SignedInterval::closed(a[i]).bounds();
        lo..=hi
    };
    let mut out = Vec::new();
    for d0 in range(0) {
        for d1 in range(1) {
            for d2 in range(2) {
                let y = x + Vertex::new(d0, d1, d2);
                if a_protected(x, y, a) && member(y) {
                    out.push(y);
                }
            }
        }
    }
    out
}

pub fn is_protected(x: Vertex, e: &FxHashSet<Vertex>) -> Result<bool> {
    Ok(protection_vectors(x)?.into_iter().all(|a| !protectors(x, a, |y| e.contains(&y)).is_empty()))
}

/// Sites of S on a coordinate plane.
pub fn spine(s: &FxHashSet<Vertex>) -> FxHashSet<Vertex> {
    s.iter().copied().filter(|v| v.zero_count() > 0).collect()
}

/// The eight diagonal directions in a fixed order.
pub fn diagonal_directions() -> [Vertex; 8] {
    std::array::from_fn(|k| Vertex(std::array::from_fn(|i| if k >> (2 - i) & 1 == 1 { 1 } else { -1 })))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellReport {
    pub n: i64,
    pub s1: bool,
    /// Required sites missing from S.
    pub s1_missing: Vec<Vertex>,
    pub s2: bool,
    pub s2_violations: Vec<Vertex>,
    pub s3: bool,
    /// Sites that should be protected but are not.
    pub s3_witnesses: Vec<Vertex>,
    pub s4: bool,
    /// Smallest k >= n/3 with k*phi in S, per direction of [`diagonal_directions`].
    pub k: BTreeMap<String, Option<i64>>,
}

impl ShellReport {
    pub fn all_hold(&self) -> bool {
        self.s1 && self.s2 && self.s3 && self.s4
    }

    pub fn k_values(&self) -> Vec<(Vertex, Option<i64>)> {
        diagonal_directions().into_iter().map(|phi| (phi, self.k[&direction_key(phi)])).collect()
    }
}

pub fn direction_key(phi: Vertex) -> String {
    phi.0.iter().map(|&c| if c > 0 { '+' } else { '-' }).collect()
}

/// All sites with |x| = n and max-norm at least n - 12.
pub fn s1_required_sites(n: i64) -> Vec<Vertex> {
    let mut out = Vec::new();
    for x in -n..=n {
        let rx = n - x.abs();
        for y in -rx..=rx {
            let rz = rx - y.abs();
            let zs = if rz == 0 { vec![0] } else { vec![-rz, rz] };
            for z in zs {
                let v = Vertex::new(x, y, z);
                if v.linf() >= n - 12 {
                    out.push(v);
                }
            }
        }
    }
    out
}

pub fn verify_shell(c: &ShellCandidate) -> Result<ShellReport> {
    if c.status != ShellStatus::Complete {
        return Err(Error::Contract(format!("cannot verify a shell with status {}", c.status.name())));
    }
    let n = c.n;
    let s1_missing: Vec<Vertex> = s1_required_sites(n).into_iter().filter(|v| !c.sites.contains(v)).collect();

    let sorted = c.sorted_sites();
    let bound = n as f64 + 3.0 * (n as f64).sqrt();
    let s2_violations: Vec<Vertex> = sorted
        .iter()
        .copied()
        .filter(|v| v.l1() < n || v.l1() as f64 > bound || v.linf() > n)
        .collect();

    let s3_witnesses: Vec<Vertex> = sorted
        .iter()
        .copied()
        .filter(|v| (0..3).filter(|&i| v[i].abs() < 4).count() <= 1)
        .filter(|&v| !is_protected(v, &c.sites).expect("two coordinates of size at least 4"))
        .collect();

    let kmin = (n + 2) / 3;
    let kmax = sorted.iter().map(|v| v.linf()).max().unwrap_or(0);
    let mut k = BTreeMap::new();
    for phi in diagonal_directions() {
        let found = (kmin..=kmax).find(|&j| c.sites.contains(&(j * phi)));
        k.insert(direction_key(phi), found);
    }
    let s4 = k.values().all(Option::is_some);
    Ok(ShellReport {
        n,
        s1: s1_missing.is_empty(),
        s1_missing,
        s2: s2_violations.is_empty(),
        s2_violations,
        s3: s3_witnesses.is_empty(),
        s3_witnesses,
        s4,
        k,
    })
}

/// `shell n=<n> status=<status>` followed by one `x y z` line per site.
/// Readers skip leading `#` comment lines.
pub fn write_shell_dump(c: &ShellCandidate) -> String {
    let mut out = format!("shell n={} status={}\n", c.n, c.status.name());
    for v in c.sorted_sites() {
        writeln!(out, "{} {} {}", v[0], v[1], v[2]).unwrap();
    }
    out
}

pub fn parse_shell_dump(text: &str) -> Result<ShellCandidate> {
    let mut lines = text.lines().enumerate().skip_while(|(_, l)| l.starts_with('#'));
    let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let (h, header) = lines.next().ok_or_else(|| perr(1, "empty shell dump"))?;
    let f: Vec<&str> = header.split_whitespace().collect();
    if f.len() != 3 || f[0] != "shell" {
        return Err(perr(h + 1, "expected `shell n=<n> status=<status>`"));
    }
    let n: i64 = f[1].strip_prefix("n=").and_then(|s| s.parse().ok()).ok_or_else(|| perr(h + 1, "bad n"))?;
    let status = match f[2].strip_prefix("status=") {
        Some("Complete") => ShellStatus::Complete,
        Some("AEscaped") => ShellStatus::AEscaped,
        Some("Failed") => ShellStatus::Failed,
        _ => return Err(perr(h + 1, "bad status")),
    };
    let mut sites = FxHashSet::default();
    for (i, l) in lines {
        let c: Vec<i64> = l
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| perr(i + 1, "bad integer")))
            .collect::<Result<_>>()?;
        if c.len() != 3 {
            return Err(perr(i + 1, "expected `x y z`"));
        }
        sites.insert(Vertex::new(c[0], c[1], c[2]));
    }
    Ok(ShellCandidate { n, sites, a: FxHashSet::default(), status })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64, z: i64) -> Vertex {
        Vertex::new(x, y, z)
    }

    #[test]
    fn taxed_examples() {
        assert!(is_taxed_step(v(0, -2, 1), v(0, -3, 2)));
        assert!(is_taxed_step(v(1, 1, 1), v(2, 2, 2)));
        assert!(!is_taxed_step(v(2, 0, 0), v(3, 2, 0)));
        assert!(!is_taxed_step(v(0, 0, 0), v(0, 0, 0)));
    }

    #[test]
    fn free_examples() {
        assert_eq!(free_step_set().len(), 38);
        assert!(free_step_set().contains(&v(-1, 3, 1)));
        assert!(!free_step_set().contains(&v(2, 1, 1)));
        assert!(is_free_step(v(5, 0, 0), v(4, 0, 0)));
        assert!(is_free_step(v(0, 0, 5), v(1, 1, 2)));
        assert!(!is_free_step(v(4, 0, 0), v(5, 0, 0)));
    }

    #[test]
    fn protection_examples() {
        assert!(a_protected(v(5, 5, 5), v(4, 6, 6), v(-3, 3, 3)));
        assert!(!a_protected(v(5, 5, 0), v(6, 4, 0), v(3, -3, 3)));
        assert!(a_protected(v(5, 5, 1), v(6, 4, 0), v(3, -3, -3)));
        let e: FxHashSet<Vertex> = [v(4, 6, 6), v(6, 4, 6), v(6, 6, 4)].into_iter().collect();
        assert!(is_protected(v(5, 5, 5), &e).unwrap());
        let e: FxHashSet<Vertex> = [v(4, 6, 6), v(6, 4, 6)].into_iter().collect();
        assert!(!is_protected(v(5, 5, 5), &e).unwrap());
        assert!(is_protected(v(5, 0, 0), &e).is_err());
    }

    #[test]
    fn protection_vector_sets() {
        let mut z3 = protection_vectors(v(4, 7, 0)).unwrap();
        z3.sort();
        let mut want = vec![v(-3, 3, 3), v(-3, 3, -3), v(3, -3, 3), v(3, -3, -3)];
        want.sort();
        assert_eq!(z3, want);
        let mut neg = protection_vectors(v(-4, 5, 6)).unwrap();
        neg.sort();
        let mut want = vec![v(3, 3, 3), v(-3, -3, 3), v(-3, 3, -3)];
        want.sort();
        assert_eq!(neg, want);
        for x in [v(5, 5, 5), v(-4, 0, 9), v(0, -6, -6)] {
            for a in protection_vectors(x).unwrap() {
                assert!((0..3).all(|i| a[i].abs() == 3));
            }
        }
    }

    #[test]
    fn spine_examples() {
        let s: FxHashSet<Vertex> = [v(0, 3, 3), v(1, 3, 3)].into_iter().collect();
        assert_eq!(spine(&s).into_iter().collect::<Vec<_>>(), vec![v(0, 3, 3)]);
        let s: FxHashSet<Vertex> = [v(1, 3, 3)].into_iter().collect();
        assert!(spine(&s).is_empty());
    }

    #[test]
    fn all_white_escapes() {
        let c = compute_a_and_s(5, &AllWhite, 20).unwrap();
        assert_eq!(c.status, ShellStatus::AEscaped);
        assert!(verify_shell(&c).is_err());
    }

    #[test]
    fn cap_precondition() {
        assert!(compute_a_and_s(16, &AllBlack, 27).is_err());
        assert!(compute_a_and_s(16, &AllBlack, 28).is_ok());
    }

    #[test]
    fn dump_roundtrip() {
        let c = compute_a_and_s(4, &AllBlack, default_cap(4)).unwrap();
        let text = write_shell_dump(&c);
        assert!(text.starts_with("shell n=4 status=Complete\n"));
        let back = parse_shell_dump(&text).unwrap();
        assert_eq!(back.sites, c.sites);
        assert_eq!(write_shell_dump(&back), text);
    }

    #[test]
    fn directions_are_distinct() {
        let d = diagonal_directions();
        let set: FxHashSet<Vertex> = d.into_iter().collect();
        assert_eq!(set.len(), 8);
        assert_eq!(direction_key(v(1, -1, 1)), "+-+");
    }
}
