//! Saturated covers: the grid edges of a saturated transfer system.
//!
//! A set of edges is a saturated cover iff
//!
//! 1. a horizontal edge at height `j` in a column forces the ones below it,
//! 2. a vertical edge at depth `i` in a row forces the ones to its left,
//! 3. no unit square has exactly three of its four edges.
//!
//! Edges are kept as one bit mask per column (bit `j` = height `j`) and one
//! per row (bit `i` = depth `i`), so (1) and (2) say every mask is a prefix
//! `0..len`, and the per-column/per-row counts are the horizontal and
//! vertical codes.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridEdge, GridShape, Orientation};
use crate::transfer::{generate, Relation, TransferSystem};

/// Largest `m` or `n` a cover can have (one `u64` mask per column and row).
pub const MAX_SIDE: usize = 63;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SaturatedCover {
    shape: GridShape,
    /// `horizontal[i-1]` bit `j`: edge `(i-1, j) -> (i, j)`.
    horizontal: Vec<u64>,
    /// `vertical[j-1]` bit `i`: edge `(i, j-1) -> (i, j)`.
    vertical: Vec<u64>,
}

/// Horizontal code `a` (length `m`) and vertical code `b` (length `n`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CodePair {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

/// The value `c(S)` of the classification map: a subset of `{0, ..., m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel {
    m: usize,
    mask: u64,
}

/// Status of the three cover conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverConditions {
    pub horizontal_prefix: bool,
    pub vertical_prefix: bool,
    pub three_of_four: bool,
}

impl CoverConditions {
    pub fn all(&self) -> bool {
        self.horizontal_prefix && self.vertical_prefix && self.three_of_four
    }
}

fn check_side(shape: GridShape) -> Result<()> {
    if shape.m > MAX_SIDE || shape.n > MAX_SIDE {
        return Err(Error::ShapeTooLarge {
            shape,
            limit: format!("m, n <= {MAX_SIDE}"),
        });
    }
    Ok(())
}

#[inline]
fn prefix(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

#[inline]
fn is_prefix(mask: u64) -> bool {
    mask & mask.wrapping_add(1) == 0
}

#[inline]
fn bit(mask: u64, i: usize) -> bool {
    mask >> i & 1 == 1
}

fn masks_from_edges(shape: GridShape, edges: &[GridEdge]) -> Result<(Vec<u64>, Vec<u64>)> {
    check_side(shape)?;
    let mut horizontal = vec![0u64; shape.m];
    let mut vertical = vec![0u64; shape.n];
    for e in edges {
        shape.check(e.target)?;
        match e.orientation {
            Orientation::Horizontal => horizontal[e.source.i] |= 1 << e.source.j,
            Orientation::Vertical => vertical[e.source.j] |= 1 << e.source.i,
        }
    }
    Ok((horizontal, vertical))
}

fn conditions(shape: GridShape, horizontal: &[u64], vertical: &[u64]) -> CoverConditions {
    let three_of_four = (0..shape.m).all(|i| {
        (0..shape.n).all(|j| {
            let count = bit(horizontal[i], j) as u8
                + bit(horizontal[i], j + 1) as u8
                + bit(vertical[j], i) as u8
                + bit(vertical[j], i + 1) as u8;
            count != 3
        })
    });
    CoverConditions {
        horizontal_prefix: horizontal.iter().all(|&h| is_prefix(h)),
        vertical_prefix: vertical.iter().all(|&v| is_prefix(v)),
        three_of_four,
    }
}

/// Evaluates the three conditions on an arbitrary edge set of `shape`.
pub fn cover_conditions(shape: GridShape, edges: &[GridEdge]) -> Result<CoverConditions> {
    let (h, v) = masks_from_edges(shape, edges)?;
    Ok(conditions(shape, &h, &v))
}

pub fn is_saturated_cover(edges: &[GridEdge], shape: GridShape) -> bool {
    cover_conditions(shape, edges).is_ok_and(|c| c.all())
}

impl SaturatedCover {
    pub fn from_edges(shape: GridShape, edges: &[GridEdge]) -> Result<Self> {
        let (horizontal, vertical) = masks_from_edges(shape, edges)?;
        let c = conditions(shape, &horizontal, &vertical);
        if !c.all() {
            return Err(Error::InvalidCover(format!("{c:?}")));
        }
        Ok(Self { shape, horizontal, vertical })
    }

    fn from_masks(shape: GridShape, horizontal: Vec<u64>, vertical: Vec<u64>) -> Result<Self> {
        let c = conditions(shape, &horizontal, &vertical);
        if !c.all() {
            return Err(Error::InvalidCover(format!("{c:?}")));
        }
        Ok(Self { shape, horizontal, vertical })
    }

    pub fn empty(shape: GridShape) -> Result<Self> {
        check_side(shape)?;
        Ok(Self {
            shape,
            horizontal: vec![0; shape.m],
            vertical: vec![0; shape.n],
        })
    }

    pub fn full(shape: GridShape) -> Result<Self> {
        check_side(shape)?;
        Ok(Self {
            shape,
            horizontal: vec![prefix(shape.n + 1); shape.m],
            vertical: vec![prefix(shape.m + 1); shape.n],
        })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    /// Whether the horizontal edge in column `column` (1-based) at `height` is present.
    pub fn has_horizontal(&self, column: usize, height: usize) -> bool {
        (1..=self.shape.m).contains(&column) && bit(self.horizontal[column - 1], height)
    }

    /// Whether the vertical edge in row `row` (1-based) at `depth` is present.
    pub fn has_vertical(&self, row: usize, depth: usize) -> bool {
        (1..=self.shape.n).contains(&row) && bit(self.vertical[row - 1], depth)
    }

    pub fn contains(&self, e: GridEdge) -> bool {
        match e.orientation {
            Orientation::Horizontal => self.has_horizontal(e.target.i, e.source.j),
            Orientation::Vertical => self.has_vertical(e.target.j, e.source.i),
        }
    }

    /// Member edges, sorted.
    pub fn edges(&self) -> Vec<GridEdge> {
        self.shape.cover_edges().into_iter().filter(|&e| self.contains(e)).collect()
    }

    pub fn horizontal_edges(&self) -> Vec<GridEdge> {
        self.edges()
            .into_iter()
            .filter(|e| e.orientation == Orientation::Horizontal)
            .collect()
    }

    pub fn vertical_edges(&self) -> Vec<GridEdge> {
        self.edges()
            .into_iter()
            .filter(|e| e.orientation == Orientation::Vertical)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.horizontal.iter().chain(&self.vertical).map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `a_i` = number of horizontal edges in column `i`, `b_j` = number of
    /// vertical edges in row `j`.
    pub fn codes(&self) -> CodePair {
        CodePair {
            a: self.horizontal.iter().map(|h| h.count_ones() as usize).collect(),
            b: self.vertical.iter().map(|v| v.count_ones() as usize).collect(),
        }
    }

    pub fn from_codes(codes: &CodePair) -> Result<Self> {
        codes.validate()?;
        Ok(Self::from_codes_unchecked(codes))
    }

    fn from_codes_unchecked(codes: &CodePair) -> Self {
        Self {
            shape: codes.shape(),
            horizontal: codes.a.iter().map(|&a| prefix(a)).collect(),
            vertical: codes.b.iter().map(|&b| prefix(b)).collect(),
        }
    }

    /// The saturated transfer system generated by the edges.
    pub fn to_system(&self) -> TransferSystem {
        let r = Relation::from_edges(self.shape, self.edges()).expect("edges lie in the shape");
        generate(&r)
    }

    /// The cover relations of a saturated transfer system.
    pub fn from_system(t: &TransferSystem) -> Result<Self> {
        if !t.is_saturated() {
            return Err(Error::NotSaturated);
        }
        Self::from_edges(t.shape(), &t.cover_relations())
    }

    /// The classification label `c(S)`. Needs a top row, so `n >= 1`.
    ///
    /// With `k` the depth of the rightmost vertical edge of the top row
    /// (`k = -1` when there is none), the label is `{0, ..., k}` together with
    /// every `i > k + 1` whose top-row horizontal edge into `(i, n)` is absent.
    pub fn classify(&self) -> Result<ClassLabel> {
        let GridShape { m, n } = self.shape;
        if n == 0 {
            return Err(Error::NoTopRow);
        }
        let top = self.vertical[n - 1];
        // prefix mask: k + 1 vertical edges
        let k_plus_1 = top.count_ones() as usize;
        let mut mask = prefix(k_plus_1);
        for i in (k_plus_1 + 1)..=m {
            if !bit(self.horizontal[i - 1], n) {
                mask |= 1 << i;
            }
        }
        Ok(ClassLabel { m, mask })
    }

    /// Removes the top row and, for a proper label, collapses the columns
    /// `i > k + 1` outside the label. The result lives on
    /// `[|A|] x [n-1]` for a proper label `A` and on `[m] x [n-1]` for the
    /// full one.
    pub fn collapse(&self) -> Result<SaturatedCover> {
        let label = self.classify()?;
        let GridShape { m, n } = self.shape;
        let rows = n - 1;
        let low = prefix(n);
        let horizontal: Vec<u64> = self.horizontal.iter().map(|h| h & low).collect();
        let vertical: Vec<u64> = self.vertical[..rows].to_vec();
        if label.is_full() {
            return SaturatedCover::from_masks(GridShape::new(m, rows), horizontal, vertical);
        }
        let collapsed = label.collapsed_columns();
        for &i in &collapsed {
            if !bit(self.horizontal[i - 1], n) {
                return Err(Error::FiberMismatch(format!("column {i} lacks its top edge")));
            }
            for (j, v) in vertical.iter().enumerate() {
                if bit(*v, i - 1) != bit(*v, i) {
                    return Err(Error::FiberMismatch(format!(
                        "column {i} has different vertical boundaries in row {}",
                        j + 1
                    )));
                }
            }
        }
        let kept = label.kept_points();
        let new_shape = GridShape::new(kept.len() - 1, rows);
        let new_h: Vec<u64> = kept[1..].iter().map(|&i| horizontal[i - 1]).collect();
        let new_v: Vec<u64> = vertical
            .iter()
            .map(|&v| {
                kept.iter()
                    .enumerate()
                    .fold(0u64, |acc, (new_i, &old_i)| acc | ((v >> old_i & 1) << new_i))
            })
            .collect();
        SaturatedCover::from_masks(new_shape, new_h, new_v)
    }

    /// Inverse of [`collapse`](Self::collapse) on the fiber of `label` over
    /// `shape = (m, n)`.
    pub fn expand(t: &SaturatedCover, label: &ClassLabel, shape: GridShape) -> Result<SaturatedCover> {
        check_side(shape)?;
        let GridShape { m, n } = shape;
        if n == 0 {
            return Err(Error::NoTopRow);
        }
        if label.m != m {
            return Err(Error::InvalidLabel(format!("label is over [{}], shape has m = {m}", label.m)));
        }
        let expected = if label.is_full() {
            GridShape::new(m, n - 1)
        } else {
            GridShape::new(label.len(), n - 1)
        };
        if t.shape != expected {
            return Err(Error::ShapeMismatch { expected, found: t.shape });
        }
        let rows = n - 1;
        if label.is_full() {
            let horizontal = t
                .horizontal
                .iter()
                .map(|&h| h | (bit_at(h, rows) << n))
                .collect::<Vec<_>>();
            let mut vertical = t.vertical.clone();
            vertical.push(prefix(m + 1));
            return SaturatedCover::from_masks(shape, horizontal, vertical);
        }
        let k_plus_1 = label.first_missing();
        let kept = label.kept_points();
        let mut horizontal = vec![0u64; m];
        let mut new_index = vec![0usize; m + 1];
        let mut cursor = 0;
        for (i, slot) in new_index.iter_mut().enumerate() {
            if kept.get(cursor + 1) == Some(&i) {
                cursor += 1;
            }
            *slot = cursor;
        }
        for i in 1..=m {
            if kept.contains(&i) {
                let col = t.horizontal[new_index[i] - 1];
                let top = if i <= k_plus_1.saturating_sub(1) { bit_at(col, rows) << n } else { 0 };
                horizontal[i - 1] = col | top;
            } else {
                horizontal[i - 1] = prefix(n + 1);
            }
        }
        let mut vertical: Vec<u64> = t
            .vertical
            .iter()
            .map(|&v| (0..=m).fold(0u64, |acc, i| acc | ((v >> new_index[i] & 1) << i)))
            .collect();
        vertical.push(prefix(k_plus_1));
        SaturatedCover::from_masks(shape, horizontal, vertical)
    }

    /// Graphviz rendering of the grid; member edges solid, the rest dotted.
    pub fn to_dot(&self) -> String {
        let GridShape { m, n } = self.shape;
        let mut s = String::new();
        let _ = writeln!(s, "graph cover_{m}x{n} {{");
        let _ = writeln!(s, "  node [shape=point];");
        for p in self.shape.points() {
            let _ = writeln!(s, "  \"{},{}\" [pos=\"{},{}!\"];", p.i, p.j, p.i, p.j);
        }
        for e in self.shape.cover_edges() {
            let style = if self.contains(e) { "solid" } else { "dotted" };
            let _ = writeln!(
                s,
                "  \"{},{}\" -- \"{},{}\" [style={style}];",
                e.source.i, e.source.j, e.target.i, e.target.j
            );
        }
        s.push_str("}\n");
        s
    }
}

#[inline]
fn bit_at(mask: u64, i: usize) -> u64 {
    mask >> i & 1
}

impl fmt::Debug for SaturatedCover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes = self.codes();
        f.debug_struct("SaturatedCover")
            .field("shape", &self.shape)
            .field("a", &codes.a)
            .field("b", &codes.b)
            .finish()
    }
}

impl CodePair {
    pub fn new(a: Vec<usize>, b: Vec<usize>) -> Self {
        Self { a, b }
    }

    pub fn shape(&self) -> GridShape {
        GridShape::new(self.a.len(), self.b.len())
    }

    fn in_range(&self) -> bool {
        let GridShape { m, n } = self.shape();
        self.a.iter().all(|&a| a <= n + 1) && self.b.iter().all(|&b| b <= m + 1)
    }

    /// `b[a_i] <= i` and `a[b_j] <= j` whenever the index is in range.
    pub fn is_compatible(&self) -> bool {
        let GridShape { m, n } = self.shape();
        self.in_range()
            && self.a.iter().enumerate().all(|(i0, &ai)| !(1..=n).contains(&ai) || self.b[ai - 1] <= i0 + 1)
            && self.b.iter().enumerate().all(|(j0, &bj)| !(1..=m).contains(&bj) || self.a[bj - 1] <= j0 + 1)
    }

    fn validate(&self) -> Result<()> {
        check_side(self.shape())?;
        if !self.in_range() {
            return Err(Error::InvalidCodes(format!("{self} has an entry out of range")));
        }
        if !self.is_compatible() {
            return Err(Error::InvalidCodes(format!("{self} is not compatible")));
        }
        Ok(())
    }
}

impl fmt::Display for CodePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "[{}] [{}]", join(&self.a), join(&self.b))
    }
}

pub fn is_compatible(codes: &CodePair, shape: GridShape) -> bool {
    codes.shape() == shape && codes.is_compatible()
}

impl ClassLabel {
    pub fn new(m: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        if m > MAX_SIDE {
            return Err(Error::InvalidLabel(format!("m = {m} exceeds {MAX_SIDE}")));
        }
        let mut mask = 0u64;
        for i in members {
            if i > m {
                return Err(Error::InvalidLabel(format!("{i} is not in [0, {m}]")));
            }
            mask |= 1 << i;
        }
        Ok(Self { m, mask })
    }

    pub fn full(m: usize) -> Result<Self> {
        Self::new(m, 0..=m)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn contains(&self, i: usize) -> bool {
        i <= self.m && bit(self.mask, i)
    }

    pub fn members(&self) -> BTreeSet<usize> {
        (0..=self.m).filter(|&i| self.contains(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        self.mask == prefix(self.m + 1)
    }

    /// `k + 1`: the smallest element of `{0..m}` outside the label.
    fn first_missing(&self) -> usize {
        (!self.mask).trailing_zeros() as usize
    }

    /// Columns `i > k + 1` not in the label.
    fn collapsed_columns(&self) -> Vec<usize> {
        let start = self.first_missing() + 1;
        (start..=self.m).filter(|&i| !self.contains(i)).collect()
    }

    /// Points surviving the collapse, ascending; point `i - 1` absorbs `i`.
    fn kept_points(&self) -> Vec<usize> {
        let gone = self.collapsed_columns();
        (0..=self.m).filter(|i| !gone.contains(i)).collect()
    }

    /// Every subset of `{0, ..., m}`.
    pub fn all(m: usize) -> impl Iterator<Item = ClassLabel> {
        assert!(m < MAX_SIDE, "label universe too large");
        (0..(1u64 << (m + 1))).map(move |mask| ClassLabel { m, mask })
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.members().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Compatible code pairs of a shape in lexicographic order (`a` first, then `b`).
pub struct CodePairs {
    shape: GridShape,
    a: Vec<usize>,
    /// Allowed values of each `b_j` given the current `a`.
    allowed: Vec<Vec<usize>>,
    b_pos: Vec<usize>,
    done: bool,
}

impl CodePairs {
    pub fn new(shape: GridShape) -> Result<Self> {
        check_side(shape)?;
        let mut it = Self {
            shape,
            a: vec![0; shape.m],
            allowed: Vec::new(),
            b_pos: vec![0; shape.n],
            done: false,
        };
        it.refresh_allowed();
        Ok(it)
    }

    fn refresh_allowed(&mut self) {
        self.allowed = allowed_b_values(self.shape, &self.a);
        self.b_pos.iter_mut().for_each(|p| *p = 0);
    }

    fn advance_a(&mut self) -> bool {
        let top = self.shape.n + 1;
        for i in (0..self.shape.m).rev() {
            if self.a[i] < top {
                self.a[i] += 1;
                for x in &mut self.a[i + 1..] {
                    *x = 0;
                }
                return true;
            }
        }
        false
    }

    fn advance_b(&mut self) -> bool {
        for j in (0..self.shape.n).rev() {
            if self.b_pos[j] + 1 < self.allowed[j].len() {
                self.b_pos[j] += 1;
                for x in &mut self.b_pos[j + 1..] {
                    *x = 0;
                }
                return true;
            }
        }
        false
    }
}

/// For a horizontal code `a`, the values each `b_j` may take: `v <= i`
/// whenever `a_i = j`, and `a_v <= j` whenever `1 <= v <= m`.
fn allowed_b_values(shape: GridShape, a: &[usize]) -> Vec<Vec<usize>> {
    let GridShape { m, n } = shape;
    (1..=n)
        .map(|j| {
            let cap = a
                .iter()
                .enumerate()
                .filter(|&(_, &ai)| ai == j)
                .map(|(i0, _)| i0 + 1)
                .min()
                .unwrap_or(m + 1);
            (0..=cap).filter(|&v| v == 0 || v == m + 1 || a[v - 1] <= j).collect()
        })
        .collect()
}

impl Iterator for CodePairs {
    type Item = CodePair;

    fn next(&mut self) -> Option<CodePair> {
        if self.done {
            return None;
        }
        let item = CodePair {
            a: self.a.clone(),
            b: self.b_pos.iter().zip(&self.allowed).map(|(&p, vals)| vals[p]).collect(),
        };
        if !self.advance_b() {
            if self.advance_a() {
                self.refresh_allowed();
            } else {
                self.done = true;
            }
        }
        Some(item)
    }
}

/// Every saturated cover of the shape, in lexicographic code order.
pub fn saturated_covers(shape: GridShape) -> Result<impl Iterator<Item = SaturatedCover>> {
    Ok(CodePairs::new(shape)?.map(|c| SaturatedCover::from_codes_unchecked(&c)))
}

/// Number of compatible code pairs: for each `a`, the `b_j` choices are
/// independent, so the count is a sum of products.
pub fn count_code_pairs(shape: GridShape) -> Result<u128> {
    check_side(shape)?;
    let GridShape { m, n } = shape;
    let mut a = vec![0usize; m];
    let mut total: u128 = 0;
    loop {
        total += allowed_b_values(shape, &a).iter().map(|v| v.len() as u128).product::<u128>();
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(total);
            }
            i -= 1;
            if a[i] < n + 1 {
                a[i] += 1;
                for x in &mut a[i + 1..] {
                    *x = 0;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridPoint;
    use std::collections::BTreeSet;

    fn p(i: usize, j: usize) -> GridPoint {
        GridPoint::new(i, j)
    }

    /// The saturated cover on `[3] x [2]` with codes `(3,1,1)` / `(2,3)`.
    fn example_edges() -> Vec<GridEdge> {
        vec![
            GridEdge::vertical(p(0, 0)),
            GridEdge::horizontal(p(0, 2)),
            GridEdge::horizontal(p(0, 1)),
            GridEdge::horizontal(p(0, 0)),
            GridEdge::vertical(p(1, 0)),
            GridEdge::horizontal(p(1, 0)),
            GridEdge::vertical(p(2, 1)),
            GridEdge::vertical(p(1, 1)),
            GridEdge::vertical(p(0, 1)),
            GridEdge::horizontal(p(2, 0)),
        ]
    }

    fn codes(a: &[usize], b: &[usize]) -> CodePair {
        CodePair::new(a.to_vec(), b.to_vec())
    }

    #[test]
    fn worked_example() {
        let shape = GridShape::new(3, 2);
        assert!(is_saturated_cover(&example_edges(), shape));
        let s = SaturatedCover::from_edges(shape, &example_edges()).unwrap();
        assert_eq!(s.codes(), codes(&[3, 1, 1], &[2, 3]));
        assert_eq!(SaturatedCover::from_codes(&codes(&[3, 1, 1], &[2, 3])).unwrap(), s);
        let t = s.to_system();
        assert!(t.is_saturated());
        assert_eq!(t.cover_relations().len(), 10);
        assert_eq!(t.cover_relations(), s.edges());
        assert_eq!(SaturatedCover::from_system(&t).unwrap(), s);
    }

    #[test]
    fn condition_witnesses() {
        let shape = GridShape::new(1, 1);
        // top horizontal without the one below it
        let c = cover_conditions(shape, &[GridEdge::horizontal(p(0, 1))]).unwrap();
        assert!(!c.horizontal_prefix && c.vertical_prefix);
        // right vertical without the left one
        let c = cover_conditions(shape, &[GridEdge::vertical(p(1, 0))]).unwrap();
        assert!(!c.vertical_prefix);
        // three edges of the square
        let three = [GridEdge::horizontal(p(0, 0)), GridEdge::vertical(p(0, 0)), GridEdge::vertical(p(1, 0))];
        assert!(!cover_conditions(shape, &three).unwrap().three_of_four);
        assert!(is_saturated_cover(&[], GridShape::new(3, 2)));
        assert!(is_saturated_cover(&GridShape::new(3, 2).cover_edges(), GridShape::new(3, 2)));
    }

    #[test]
    fn boundary_systems() {
        let shape = GridShape::new(2, 3);
        let empty = SaturatedCover::empty(shape).unwrap();
        let full = SaturatedCover::full(shape).unwrap();
        assert!(empty.to_system().is_trivial());
        assert!(full.to_system().is_complete());
        assert_eq!(empty.codes(), codes(&[0, 0], &[0, 0, 0]));
        assert_eq!(full.codes(), codes(&[4, 4], &[3, 3, 3]));
        assert_eq!(SaturatedCover::from_codes(&full.codes()).unwrap(), full);
        assert!(SaturatedCover::from_system(&crate::transfer::generate(&{
            let mut r = Relation::new(GridShape::new(1, 1));
            r.insert(p(0, 0), p(1, 1)).unwrap();
            r
        }))
        .is_err());
    }

    #[test]
    fn compatibility_examples() {
        assert!(is_compatible(&codes(&[3, 1, 1], &[2, 3]), GridShape::new(3, 2)));
        assert!(!is_compatible(&codes(&[1], &[2]), GridShape::new(1, 1)));
        assert!(is_compatible(&codes(&[2], &[2]), GridShape::new(1, 1)));
        assert!(!codes(&[4], &[0]).is_compatible());
        assert!(matches!(SaturatedCover::from_codes(&codes(&[1], &[2])), Err(Error::InvalidCodes(_))));
    }

    /// Oracle: scan every edge subset of small shapes.
    fn subset_scan(shape: GridShape) -> BTreeSet<Vec<GridEdge>> {
        let edges = shape.cover_edges();
        (0u32..1 << edges.len())
            .map(|mask| {
                edges
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, e)| *e)
                    .collect::<Vec<_>>()
            })
            .filter(|set| is_saturated_cover(set, shape))
            .collect()
    }

    #[test]
    fn code_enumeration_matches_subset_scan() {
        for m in 0..=3 {
            for n in 0..=3 {
                let shape = GridShape::new(m, n);
                if shape.cover_edges().len() > 20 {
                    continue;
                }
                let expected = subset_scan(shape);
                let got: Vec<_> = saturated_covers(shape).unwrap().map(|s| s.edges()).collect();
                assert_eq!(got.len(), expected.len(), "{shape}");
                assert_eq!(got.iter().cloned().collect::<BTreeSet<_>>(), expected);
                assert_eq!(count_code_pairs(shape).unwrap(), expected.len() as u128);
            }
        }
        assert_eq!(saturated_covers(GridShape::new(1, 1)).unwrap().count(), 7);
    }

    #[test]
    fn code_order_is_lexicographic() {
        let all: Vec<_> = CodePairs::new(GridShape::new(2, 2)).unwrap().collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert!(all.iter().all(|c| c.is_compatible()));
    }

    /// The cover on `[4] x [1]` with label `{0, 1, 4}`, bottom row all present.
    fn label_example() -> SaturatedCover {
        let h = |i: usize, j: usize| GridEdge::horizontal(p(i, j));
        let v = |i: usize| GridEdge::vertical(p(i, 0));
        let edges = vec![v(0), v(1), h(0, 0), h(0, 1), h(1, 0), h(2, 0), h(2, 1), h(3, 0)];
        SaturatedCover::from_edges(GridShape::new(4, 1), &edges).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(label_example().classify().unwrap(), ClassLabel::new(4, [0, 1, 4]).unwrap());
        let shape = GridShape::new(3, 2);
        assert!(SaturatedCover::full(shape).unwrap().classify().unwrap().is_full());
        assert_eq!(
            SaturatedCover::empty(shape).unwrap().classify().unwrap().members(),
            BTreeSet::from([1, 2, 3])
        );
        assert!(matches!(
            SaturatedCover::empty(GridShape::new(3, 0)).unwrap().classify(),
            Err(Error::NoTopRow)
        ));
    }

    #[test]
    fn collapse_examples() {
        let full = SaturatedCover::full(GridShape::new(1, 1)).unwrap();
        assert_eq!(full.collapse().unwrap(), SaturatedCover::full(GridShape::new(1, 0)).unwrap());

        let collapsed = label_example().collapse().unwrap();
        assert_eq!(collapsed.shape(), GridShape::new(3, 0));
        assert_eq!(collapsed.codes(), codes(&[1, 1, 1], &[]));
        let label = ClassLabel::new(4, [0, 1, 4]).unwrap();
        assert_eq!(SaturatedCover::expand(&collapsed, &label, GridShape::new(4, 1)).unwrap(), label_example());

        for n in 1..=3 {
            let shape = GridShape::new(1, n);
            for s in saturated_covers(shape).unwrap() {
                if s.classify().unwrap().is_empty() {
                    assert_eq!(s.collapse().unwrap().shape(), GridShape::new(0, n - 1));
                }
            }
        }
    }

    #[test]
    fn expand_rejects_bad_input() {
        let t = SaturatedCover::empty(GridShape::new(2, 0)).unwrap();
        let label = ClassLabel::new(2, [0]).unwrap();
        assert!(matches!(
            SaturatedCover::expand(&t, &label, GridShape::new(2, 1)),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(SaturatedCover::expand(&t, &label, GridShape::new(3, 1)).is_err());
        assert!(ClassLabel::new(2, [3]).is_err());
    }

    #[test]
    fn fibers_are_inverse_bijections() {
        for m in 0..=3 {
            for n in 1..=3 {
                let shape = GridShape::new(m, n);
                let mut by_label: std::collections::BTreeMap<ClassLabel, Vec<SaturatedCover>> = Default::default();
                for s in saturated_covers(shape).unwrap() {
                    let label = s.classify().unwrap();
                    let t = s.collapse().unwrap();
                    assert_eq!(SaturatedCover::expand(&t, &label, shape).unwrap(), s);
                    by_label.entry(label).or_default().push(s);
                }
                for label in ClassLabel::all(m) {
                    let base = if label.is_full() {
                        GridShape::new(m, n - 1)
                    } else {
                        GridShape::new(label.len(), n - 1)
                    };
                    let fiber = by_label.get(&label).map_or(0, Vec::len);
                    let mut images = 0;
                    for t in saturated_covers(base).unwrap() {
                        let s = SaturatedCover::expand(&t, &label, shape).unwrap();
                        assert_eq!(s.classify().unwrap(), label);
                        assert_eq!(s.collapse().unwrap(), t);
                        images += 1;
                    }
                    assert_eq!(fiber, images, "label {label} on {shape}");
                }
            }
        }
    }

    #[test]
    fn dot_output() {
        let s = SaturatedCover::full(GridShape::new(1, 1)).unwrap();
        let dot = s.to_dot();
        assert!(dot.starts_with("graph cover_1x1 {"));
        assert_eq!(dot.matches("style=solid").count(), 4);
        let e = SaturatedCover::empty(GridShape::new(1, 1)).unwrap();
        assert_eq!(e.to_dot().matches("style=dotted").count(), 4);
    }
}
