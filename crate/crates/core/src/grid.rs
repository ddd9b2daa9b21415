//! The subgroup lattice of `C_{p^m q^n}` as the grid `[m] x [n]`, and the
//! general divisor lattice of an integer `k`.
//!
//! Both lattices index their elements by a linear extension of the order
//! (lexicographic `(i, j)` for the grid, ascending divisors for `k`), so a
//! comparable pair `a <= b` always has `index(a) <= index(b)`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::{set_bit, words_for};
use crate::error::{Error, Result};

/// Bounds `(m, n)` of the grid `[m] x [n]` = `Sub(C_{p^m q^n})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridShape {
    pub m: usize,
    pub n: usize,
}

/// The subgroup `C_{p^i q^j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct GridPoint {
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A cover relation of the grid.
///
/// Column `i` (`1 <= i <= m`) holds the horizontal edges `(i-1, j) -> (i, j)`;
/// row `j` (`1 <= j <= n`) holds the vertical edges `(i, j-1) -> (i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(GridPoint, GridPoint)", into = "(GridPoint, GridPoint)")]
pub struct GridEdge {
    pub source: GridPoint,
    pub target: GridPoint,
    pub orientation: Orientation,
}

impl GridShape {
    pub const fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    /// Number of lattice points, `(m+1)(n+1)`.
    pub fn len(&self) -> usize {
        (self.m + 1) * (self.n + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        p.i <= self.m && p.j <= self.n
    }

    pub fn check(&self, p: GridPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutOfShape { point: p, shape: *self })
        }
    }

    pub fn bottom(&self) -> GridPoint {
        GridPoint::new(0, 0)
    }

    pub fn top(&self) -> GridPoint {
        GridPoint::new(self.m, self.n)
    }

    /// Points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = GridPoint> {
        let (m, n) = (self.m, self.n);
        (0..=m).flat_map(move |i| (0..=n).map(move |j| GridPoint::new(i, j)))
    }

    pub fn index_of(&self, p: GridPoint) -> usize {
        debug_assert!(self.contains(p));
        p.i * (self.n + 1) + p.j
    }

    pub fn point_at(&self, idx: usize) -> GridPoint {
        GridPoint::new(idx / (self.n + 1), idx % (self.n + 1))
    }

    pub fn horizontal_edge_count(&self) -> usize {
        self.m * (self.n + 1)
    }

    pub fn vertical_edge_count(&self) -> usize {
        self.n * (self.m + 1)
    }

    /// All `m(n+1)` horizontal and `n(m+1)` vertical edges, sorted.
    pub fn cover_edges(&self) -> Vec<GridEdge> {
        let mut edges = Vec::with_capacity(self.horizontal_edge_count() + self.vertical_edge_count());
        for p in self.points() {
            if p.i < self.m {
                edges.push(GridEdge::horizontal(p));
            }
            if p.j < self.n {
                edges.push(GridEdge::vertical(p));
            }
        }
        edges.sort();
        edges
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]x[{}]", self.m, self.n)
    }
}

impl GridPoint {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    pub fn leq(self, other: GridPoint) -> bool {
        leq(self, other)
    }

    pub fn meet(self, other: GridPoint) -> GridPoint {
        meet(self, other)
    }
}

impl From<(usize, usize)> for GridPoint {
    fn from((i, j): (usize, usize)) -> Self {
        Self { i, j }
    }
}

impl From<GridPoint> for (usize, usize) {
    fn from(p: GridPoint) -> Self {
        (p.i, p.j)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// Componentwise order: `C_{p^i q^j} <= C_{p^i' q^j'}`.
pub fn leq(x: GridPoint, y: GridPoint) -> bool {
    x.i <= y.i && x.j <= y.j
}

/// Subgroup intersection, the componentwise minimum.
pub fn meet(x: GridPoint, y: GridPoint) -> GridPoint {
    GridPoint::new(x.i.min(y.i), x.j.min(y.j))
}

/// Whether `x < y` with nothing strictly in between.
pub fn is_cover_pair(x: GridPoint, y: GridPoint) -> bool {
    leq(x, y) && (y.i - x.i) + (y.j - x.j) == 1
}

impl GridEdge {
    pub fn horizontal(source: GridPoint) -> Self {
        Self {
            source,
            target: GridPoint::new(source.i + 1, source.j),
            orientation: Orientation::Horizontal,
        }
    }

    pub fn vertical(source: GridPoint) -> Self {
        Self {
            source,
            target: GridPoint::new(source.i, source.j + 1),
            orientation: Orientation::Vertical,
        }
    }

    pub fn from_pair(source: GridPoint, target: GridPoint) -> Option<Self> {
        if !is_cover_pair(source, target) {
            None
        } else if target.i == source.i + 1 {
            Some(Self::horizontal(source))
        } else {
            Some(Self::vertical(source))
        }
    }

    /// Column index `i` of a horizontal edge `(i-1, j) -> (i, j)`.
    pub fn column(&self) -> Option<usize> {
        (self.orientation == Orientation::Horizontal).then_some(self.target.i)
    }

    /// Row index `j` of a vertical edge `(i, j-1) -> (i, j)`.
    pub fn row(&self) -> Option<usize> {
        (self.orientation == Orientation::Vertical).then_some(self.target.j)
    }
}

impl TryFrom<(GridPoint, GridPoint)> for GridEdge {
    type Error = String;

    fn try_from((s, t): (GridPoint, GridPoint)) -> std::result::Result<Self, String> {
        GridEdge::from_pair(s, t).ok_or_else(|| format!("{s} -> {t} is not a grid edge"))
    }
}

impl From<GridEdge> for (GridPoint, GridPoint) {
    fn from(e: GridEdge) -> Self {
        (e.source, e.target)
    }
}

impl fmt::Display for GridEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.source, self.target)
    }
}

/// Lattice of divisors of `k` under divisibility.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorLattice {
    modulus: u64,
    divisors: Vec<u64>,
}

impl DivisorLattice {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidGroup("modulus must be positive".into()));
        }
        Ok(Self {
            modulus,
            divisors: crate::arith::divisors(modulus),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Divisors in ascending order.
    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn index_of(&self, d: u64) -> Option<usize> {
        self.divisors.binary_search(&d).ok()
    }

    /// Cover pairs `d | e` with `e / d` prime, as index pairs.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, &d) in self.divisors.iter().enumerate() {
            for (b, &e) in self.divisors.iter().enumerate().skip(a + 1) {
                if e % d == 0 && crate::arith::is_prime(e / d) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// When `k = p^m q^n`, the grid shape `(m, n)`.
    pub fn grid_shape(&self, p: u64, q: u64) -> Option<GridShape> {
        let (m, rest) = crate::arith::strip_power(self.modulus, p);
        let (n, rest) = crate::arith::strip_power(rest, q);
        (rest == 1).then_some(GridShape::new(m as usize, n as usize))
    }
}

/// Identity of a lattice for table caching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeKey {
    Grid(usize, usize),
    Divisors(u64),
}

/// Precomputed order data shared by every relation on one lattice.
#[derive(Debug)]
pub struct LatticeTables {
    pub(crate) size: usize,
    pub(crate) words: usize,
    /// `down[b]`: bit set of `{a : a <= b}`.
    pub(crate) down: Vec<u64>,
    /// `up[a]`: bit set of `{b : a <= b}`.
    pub(crate) up: Vec<u64>,
    pub(crate) meet: Vec<u32>,
    /// Strict comparable pairs `(a, b)`, `a < b`, sorted.
    pub(crate) strict_pairs: Vec<(usize, usize)>,
}

impl LatticeTables {
    fn build<L: FiniteLattice>(lattice: &L) -> Self {
        let size = lattice.size();
        let words = words_for(size);
        let mut down = vec![0u64; size * words];
        let mut up = vec![0u64; size * words];
        let mut meet = vec![0u32; size * size];
        let mut strict_pairs = Vec::new();
        for a in 0..size {
            for b in 0..size {
                if lattice.leq_at(a, b) {
                    set_bit(&mut down[b * words..(b + 1) * words], a);
                    set_bit(&mut up[a * words..(a + 1) * words], b);
                    if a != b {
                        strict_pairs.push((a, b));
                    }
                }
                meet[a * size + b] = lattice.meet_at(a, b) as u32;
            }
        }
        strict_pairs.sort_unstable();
        Self {
            size,
            words,
            down,
            up,
            meet,
            strict_pairs,
        }
    }

    #[inline]
    pub(crate) fn down(&self, b: usize) -> &[u64] {
        &self.down[b * self.words..(b + 1) * self.words]
    }

    #[inline]
    pub(crate) fn up(&self, a: usize) -> &[u64] {
        &self.up[a * self.words..(a + 1) * self.words]
    }

    #[inline]
    pub(crate) fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b] as usize
    }

    #[inline]
    pub(crate) fn leq(&self, a: usize, b: usize) -> bool {
        crate::bits::get_bit(self.down(b), a)
    }
}

/// A finite lattice whose elements are indexed `0..size()` along a linear
/// extension of the order.
pub trait FiniteLattice: Clone + fmt::Debug + PartialEq + Eq + Hash {
    type Element: Copy + Ord + fmt::Debug + fmt::Display;

    fn size(&self) -> usize;
    fn element(&self, idx: usize) -> Self::Element;
    fn index(&self, e: Self::Element) -> Option<usize>;
    fn leq_at(&self, a: usize, b: usize) -> bool;
    fn meet_at(&self, a: usize, b: usize) -> usize;
    fn key(&self) -> LatticeKey;

    fn tables(&self) -> Arc<LatticeTables> {
        thread_local! {
            static CACHE: RefCell<HashMap<LatticeKey, Arc<LatticeTables>>> = RefCell::new(HashMap::new());
        }
        CACHE.with(|cache| {
            cache
                .borrow_mut()
                .entry(self.key())
                .or_insert_with(|| Arc::new(LatticeTables::build(self)))
                .clone()
        })
    }
}

impl FiniteLattice for GridShape {
    type Element = GridPoint;

    fn size(&self) -> usize {
        self.len()
    }

    fn element(&self, idx: usize) -> GridPoint {
        self.point_at(idx)
    }

    fn index(&self, e: GridPoint) -> Option<usize> {
        self.contains(e).then(|| self.index_of(e))
    }

    fn leq_at(&self, a: usize, b: usize) -> bool {
        leq(self.point_at(a), self.point_at(b))
    }

    fn meet_at(&self, a: usize, b: usize) -> usize {
        self.index_of(meet(self.point_at(a), self.point_at(b)))
    }

    fn key(&self) -> LatticeKey {
        LatticeKey::Grid(self.m, self.n)
    }
}

impl FiniteLattice for DivisorLattice {
    type Element = u64;

    fn size(&self) -> usize {
        self.divisors.len()
    }

    fn element(&self, idx: usize) -> u64 {
        self.divisors[idx]
    }

    fn index(&self, e: u64) -> Option<usize> {
        self.index_of(e)
    }

    fn leq_at(&self, a: usize, b: usize) -> bool {
        self.divisors[b] % self.divisors[a] == 0
    }

    fn meet_at(&self, a: usize, b: usize) -> usize {
        let g = num_integer::gcd(self.divisors[a], self.divisors[b]);
        self.index_of(g).expect("gcd of divisors is a divisor")
    }

    fn key(&self) -> LatticeKey {
        LatticeKey::Divisors(self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: usize, j: usize) -> GridPoint {
        GridPoint::new(i, j)
    }

    #[test]
    fn leq_examples() {
        assert!(leq(p(0, 0), p(1, 1)));
        assert!(!leq(p(1, 0), p(0, 1)));
        assert!(leq(p(2, 1), p(2, 1)));
    }

    #[test]
    fn meet_examples() {
        assert_eq!(meet(p(1, 0), p(0, 1)), p(0, 0));
        assert_eq!(meet(p(2, 1), p(1, 3)), p(1, 1));
        assert_eq!(meet(p(3, 2), p(3, 2)), p(3, 2));
    }

    #[test]
    fn cover_edge_counts() {
        assert_eq!(GridShape::new(1, 1).cover_edges().len(), 4);
        assert_eq!(GridShape::new(3, 2).cover_edges().len(), 17);
        assert_eq!(GridShape::new(0, 0).cover_edges().len(), 0);
    }

    #[test]
    fn order_axioms_exhaustive() {
        for m in 0..=4 {
            for n in 0..=4 {
                let shape = GridShape::new(m, n);
                let pts: Vec<_> = shape.points().collect();
                for &x in &pts {
                    assert!(leq(x, x));
                    for &y in &pts {
                        if leq(x, y) && leq(y, x) {
                            assert_eq!(x, y);
                        }
                        let g = meet(x, y);
                        assert!(leq(g, x) && leq(g, y));
                        for &z in &pts {
                            if leq(x, y) && leq(y, z) {
                                assert!(leq(x, z));
                            }
                            if leq(z, x) && leq(z, y) {
                                assert!(leq(z, g), "meet is not greatest");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cover_pairs_are_the_edges() {
        for m in 0..=4 {
            for n in 0..=4 {
                let shape = GridShape::new(m, n);
                let pts: Vec<_> = shape.points().collect();
                let mut covers = Vec::new();
                for &x in &pts {
                    for &y in &pts {
                        let strictly_between = pts
                            .iter()
                            .any(|&z| z != x && z != y && leq(x, z) && leq(z, y));
                        if leq(x, y) && x != y && !strictly_between {
                            assert!(is_cover_pair(x, y));
                            covers.push(GridEdge::from_pair(x, y).unwrap());
                        } else {
                            assert!(!is_cover_pair(x, y));
                        }
                    }
                }
                covers.sort();
                assert_eq!(covers, shape.cover_edges());
            }
        }
    }

    #[test]
    fn lexicographic_index_is_linear_extension() {
        let shape = GridShape::new(3, 2);
        for (idx, pt) in shape.points().enumerate() {
            assert_eq!(shape.index_of(pt), idx);
            assert_eq!(shape.point_at(idx), pt);
        }
        for a in 0..shape.len() {
            for b in 0..shape.len() {
                if shape.leq_at(a, b) {
                    assert!(a <= b);
                }
            }
        }
    }

    #[test]
    fn edge_rows_and_columns() {
        let h = GridEdge::horizontal(p(2, 1));
        assert_eq!(h.column(), Some(3));
        assert_eq!(h.row(), None);
        let v = GridEdge::vertical(p(2, 1));
        assert_eq!(v.row(), Some(2));
        assert!(GridEdge::from_pair(p(0, 0), p(1, 1)).is_none());
    }

    #[test]
    fn serde_shapes() {
        assert_eq!(serde_json::to_string(&p(2, 1)).unwrap(), "[2,1]");
        let e: GridEdge = serde_json::from_str("[[0,1],[0,2]]").unwrap();
        assert_eq!(e, GridEdge::vertical(p(0, 1)));
        assert!(serde_json::from_str::<GridEdge>("[[0,0],[1,1]]").is_err());
    }

    #[test]
    fn divisor_lattice_basics() {
        let l = DivisorLattice::new(60).unwrap();
        assert_eq!(l.divisors(), &[1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60]);
        let i4 = l.index_of(4).unwrap();
        let i6 = l.index_of(6).unwrap();
        assert_eq!(l.element(l.meet_at(i4, i6)), 2);
        assert!(l.leq_at(l.index_of(3).unwrap(), l.index_of(15).unwrap()));
        assert!(!l.leq_at(i4, i6));
        assert!(l.cover_pairs().contains(&(l.index_of(2).unwrap(), i4)));
        assert!(!l.cover_pairs().contains(&(0, i4)));
        assert_eq!(DivisorLattice::new(5 * 49).unwrap().grid_shape(5, 7), Some(GridShape::new(1, 2)));
        assert_eq!(DivisorLattice::new(30).unwrap().grid_shape(5, 7), None);
    }
}
