//! Geometric primitives on the cubic lattice: vertices, norms, axis-aligned
//! cuboids and the signed-interval convention used by the protection
//! predicates.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of Z^3.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(pub [i64; 3]);

impl Vertex {
    pub const ORIGIN: Vertex = Vertex([0, 0, 0]);

    pub const fn new(x1: i64, x2: i64, x3: i64) -> Self {
        Vertex([x1, x2, x3])
    }

    /// Unit vector e_i (0-based coordinate index).
    pub fn unit(i: usize) -> Self {
        let mut c = [0; 3];
        c[i] = 1;
        Vertex(c)
    }

    pub fn splat(v: i64) -> Self {
        Vertex([v, v, v])
    }

    /// |x_1| + |x_2| + |x_3|
    pub fn l1(self) -> i64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    /// max_i |x_i|
    pub fn linf(self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn coords(self) -> [i64; 3] {
        self.0
    }

    /// Componentwise signum.
    pub fn signum(self) -> [i64; 3] {
        self.0.map(i64::signum)
    }

    pub fn zero_count(self) -> usize {
        self.0.iter().filter(|&&c| c == 0).count()
    }

    pub fn map(self, f: impl Fn(i64) -> i64) -> Self {
        Vertex(self.0.map(f))
    }

    pub fn zip_with(self, other: Vertex, f: impl Fn(i64, i64) -> i64) -> Self {
        Vertex([f(self.0[0], other.0[0]), f(self.0[1], other.0[1]), f(self.0[2], other.0[2])])
    }

    /// The six nearest neighbors, ordered -e1, +e1, -e2, +e2, -e3, +e3.
    pub fn neighbors(self) -> [Vertex; 6] {
        let [x, y, z] = self.0;
        [
            Vertex([x - 1, y, z]),
            Vertex([x + 1, y, z]),
            Vertex([x, y - 1, z]),
            Vertex([x, y + 1, z]),
            Vertex([x, y, z - 1]),
            Vertex([x, y, z + 1]),
        ]
    }

    pub fn linf_dist(self, other: Vertex) -> i64 {
        (self - other).linf()
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Index<usize> for Vertex {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vertex {
    fn index_mut(&mut self, i: usize) -> &mut i64 {
        &mut self.0[i]
    }
}

impl Add for Vertex {
    type Output = Vertex;
    fn add(self, o: Vertex) -> Vertex {
        self.zip_with(o, |a, b| a + b)
    }
}

impl Sub for Vertex {
    type Output = Vertex;
    fn sub(self, o: Vertex) -> Vertex {
        self.zip_with(o, |a, b| a - b)
    }
}

impl Neg for Vertex {
    type Output = Vertex;
    fn neg(self) -> Vertex {
        self.map(|c| -c)
    }
}

impl Mul<Vertex> for i64 {
    type Output = Vertex;
    fn mul(self, v: Vertex) -> Vertex {
        v.map(|c| self * c)
    }
}

impl From<[i64; 3]> for Vertex {
    fn from(c: [i64; 3]) -> Self {
        Vertex(c)
    }
}

pub fn l1_norm(v: Vertex) -> i64 {
    v.l1()
}

pub fn linf_norm(v: Vertex) -> i64 {
    v.linf()
}

/// Membership oracle for sets of vertices.
pub trait Membership {
    fn contains(&self, v: Vertex) -> bool;
}

impl Membership for rustc_hash::FxHashSet<Vertex> {
    fn contains(&self, v: Vertex) -> bool {
        rustc_hash::FxHashSet::contains(self, &v)
    }
}

impl Membership for std::collections::HashSet<Vertex> {
    fn contains(&self, v: Vertex) -> bool {
        std::collections::HashSet::contains(self, &v)
    }
}

impl Membership for BTreeSet<Vertex> {
    fn contains(&self, v: Vertex) -> bool {
        BTreeSet::contains(self, &v)
    }
}

impl<T: Membership + ?Sized> Membership for &T {
    fn contains(&self, v: Vertex) -> bool {
        (**self).contains(v)
    }
}

/// Axis-aligned box `B[u, v]`, stored normalized so that `lo <= hi`
/// componentwise.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Cuboid {
    lo: Vertex,
    hi: Vertex,
}

impl Cuboid {
    /// Box spanned by two opposite corners given in any order.
    pub fn new(u: Vertex, v: Vertex) -> Self {
        Cuboid { lo: u.zip_with(v, i64::min), hi: u.zip_with(v, i64::max) }
    }

    pub fn point(v: Vertex) -> Self {
        Cuboid { lo: v, hi: v }
    }

    /// `[-r, r]^3`
    pub fn centered(center: Vertex, r: i64) -> Self {
        Cuboid::new(center - Vertex::splat(r), center + Vertex::splat(r))
    }

    pub fn lo(&self) -> Vertex {
        self.lo
    }

    pub fn hi(&self) -> Vertex {
        self.hi
    }

    pub fn side(&self, i: usize) -> i64 {
        self.hi[i] - self.lo[i] + 1
    }

    pub fn sides(&self) -> [i64; 3] {
        [self.side(0), self.side(1), self.side(2)]
    }

    pub fn volume(&self) -> u64 {
        self.sides().iter().map(|&s| s as u64).product()
    }

    /// The ℓ∞ diameter, i.e. the longest side minus one.
    pub fn linf_diameter(&self) -> i64 {
        (0..3).map(|i| self.hi[i] - self.lo[i]).max().unwrap_or(0)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (0..3).all(|i| self.lo[i] <= v[i] && v[i] <= self.hi[i])
    }

    pub fn contains_cuboid(&self, other: &Cuboid) -> bool {
        self.contains(other.lo) && self.contains(other.hi)
    }

    pub fn intersection(&self, other: &Cuboid) -> Option<Cuboid> {
        let lo = self.lo.zip_with(other.lo, i64::max);
        let hi = self.hi.zip_with(other.hi, i64::min);
        (0..3).all(|i| lo[i] <= hi[i]).then_some(Cuboid { lo, hi })
    }

    /// Smallest box containing both.
    pub fn hull(&self, other: &Cuboid) -> Cuboid {
        Cuboid { lo: self.lo.zip_with(other.lo, i64::min), hi: self.hi.zip_with(other.hi, i64::max) }
    }

    pub fn expand(&self, r: i64) -> Cuboid {
        Cuboid::new(self.lo - Vertex::splat(r), self.hi + Vertex::splat(r))
    }

    pub fn translate(&self, d: Vertex) -> Cuboid {
        Cuboid { lo: self.lo + d, hi: self.hi + d }
    }

    /// Number of coordinates in which `v` has a lattice neighbor outside the
    /// box. Only meaningful for `v` inside the box.
    pub fn exposed_coordinates(&self, v: Vertex) -> usize {
        (0..3).filter(|&i| v[i] == self.lo[i] || v[i] == self.hi[i]).count()
    }

    /// Lexicographic iteration over all members.
    pub fn iter(&self) -> CuboidIter {
        CuboidIter { b: *self, next: Some(self.lo) }
    }

    /// Corner vertices (outside neighbors in all three coordinates) and edge
    /// vertices (exactly two), both sorted.
    pub fn corners_and_edges(&self) -> (Vec<Vertex>, Vec<Vertex>) {
        let extremes = |i: usize| -> Vec<i64> {
            if self.lo[i] == self.hi[i] {
                vec![self.lo[i]]
            } else {
                vec![self.lo[i], self.hi[i]]
            }
        };
        let mut candidates = BTreeSet::new();
        for free in 0..3 {
            let (a, b) = ((free + 1) % 3, (free + 2) % 3);
            for &ea in &extremes(a) {
                for &eb in &extremes(b) {
                    for t in self.lo[free]..=self.hi[free] {
                        let mut c = [0; 3];
                        c[free] = t;
                        c[a] = ea;
                        c[b] = eb;
                        candidates.insert(Vertex(c));
                    }
                }
            }
        }
        let mut corners = Vec::new();
        let mut edges = Vec::new();
        for v in candidates {
            match self.exposed_coordinates(v) {
                3 => corners.push(v),
                2 => edges.push(v),
                _ => {}
            }
        }
        (corners, edges)
    }
}

impl Membership for Cuboid {
    fn contains(&self, v: Vertex) -> bool {
        Cuboid::contains(self, v)
    }
}

pub fn cuboid_corner_and_edge_vertices(b: &Cuboid) -> (Vec<Vertex>, Vec<Vertex>) {
    b.corners_and_edges()
}

pub struct CuboidIter {
    b: Cuboid,
    next: Option<Vertex>,
}

impl Iterator for CuboidIter {
    type Item = Vertex;

    fn next(&mut self) -> Option<Vertex> {
        let cur = self.next?;
        let mut n = cur;
        let mut i = 2;
        loop {
            if n[i] < self.b.hi[i] {
                n[i] += 1;
                self.next = Some(n);
                break;
            }
            n[i] = self.b.lo[i];
            if i == 0 {
                self.next = None;
                break;
            }
            i -= 1;
        }
        Some(cur)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum IntervalKind {
    /// `(0, a]`: excludes zero.
    HalfOpenFromZero,
    /// `[0, a]`: includes zero.
    ClosedWithZero,
}

/// An integer interval with one endpoint at zero, using the reversed
/// convention `(0, a] = [a, 0)` for negative `a`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SignedInterval {
    end: i64,
    kind: IntervalKind,
}

impl SignedInterval {
    pub fn new(end: i64, kind: IntervalKind) -> Result<Self> {
        if end == 0 && kind == IntervalKind::HalfOpenFromZero {
            return Err(Error::Contract("half-open interval (0, 0] is undefined".into()));
        }
        Ok(SignedInterval { end, kind })
    }

    pub fn half_open(end: i64) -> Result<Self> {
        Self::new(end, IntervalKind::HalfOpenFromZero)
    }

    pub fn closed(end: i64) -> Self {
        SignedInterval { end, kind: IntervalKind::ClosedWithZero }
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn kind(&self) -> IntervalKind {
        self.kind
    }

    pub fn contains(&self, d: i64) -> bool {
        let (lo, hi) = self.bounds();
        lo <= d && d <= hi
    }

    /// Inclusive bounds.
    pub fn bounds(&self) -> (i64, i64) {
        let zero_end = match self.kind {
            IntervalKind::ClosedWithZero => 0,
            IntervalKind::HalfOpenFromZero => self.end.signum(),
        };
        (zero_end.min(self.end), zero_end.max(self.end))
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        let (lo, hi) = self.bounds();
        lo..=hi
    }
}
