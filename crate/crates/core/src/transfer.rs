//! Transfer systems: relations on a finite lattice that refine the order and
//! are reflexive, transitive and closed under restriction. Conjugation is
//! trivial for the cyclic groups modelled here.
//!
//! Relations are stored as a dense bit matrix over lattice indices; only
//! comparable pairs can ever be set.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::bits::{get_bit, iter_ones, BitMatrix};
use crate::error::{Error, Result};
use crate::grid::{DivisorLattice, FiniteLattice, GridEdge, GridPoint, GridShape, LatticeTables};

/// A binary relation refining the order of a finite lattice.
#[derive(Clone)]
pub struct Relation<L: FiniteLattice> {
    lattice: L,
    tables: Arc<LatticeTables>,
    bits: BitMatrix,
}

/// A relation satisfying the transfer-system axioms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct System<L: FiniteLattice> {
    rel: Relation<L>,
}

pub type TransferSystem = System<GridShape>;
pub type DivisorSystem = System<DivisorLattice>;

type Pair<L> = (<L as FiniteLattice>::Element, <L as FiniteLattice>::Element);

impl<L: FiniteLattice> PartialEq for Relation<L> {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.bits == other.bits
    }
}

impl<L: FiniteLattice> Eq for Relation<L> {}

impl<L: FiniteLattice> Hash for Relation<L> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.lattice.hash(state);
        self.bits.hash(state);
    }
}

impl<L: FiniteLattice> Relation<L> {
    /// The empty relation (not even reflexive).
    pub fn new(lattice: L) -> Self {
        let tables = lattice.tables();
        let bits = BitMatrix::new(lattice.size());
        Self { lattice, tables, bits }
    }

    /// The identity relation.
    pub fn reflexive(lattice: L) -> Self {
        let mut r = Self::new(lattice);
        r.add_reflexive();
        r
    }

    /// The full order relation.
    pub fn full(lattice: L) -> Self {
        let mut r = Self::reflexive(lattice);
        for &(a, b) in r.tables.clone().strict_pairs.iter() {
            r.bits.set(a, b);
        }
        r
    }

    pub fn lattice(&self) -> &L {
        &self.lattice
    }

    pub fn size(&self) -> usize {
        self.bits.size()
    }

    pub fn contains_at(&self, a: usize, b: usize) -> bool {
        self.bits.get(a, b)
    }

    pub fn contains(&self, lower: L::Element, upper: L::Element) -> bool {
        match (self.lattice.index(lower), self.lattice.index(upper)) {
            (Some(a), Some(b)) => self.bits.get(a, b),
            _ => false,
        }
    }

    pub fn insert_at(&mut self, a: usize, b: usize) -> Result<()> {
        let n = self.size();
        if a >= n {
            return Err(Error::OutOfRange(a));
        }
        if b >= n {
            return Err(Error::OutOfRange(b));
        }
        if !self.tables.leq(a, b) {
            return Err(Error::NotComparable(
                self.lattice.element(a).to_string(),
                self.lattice.element(b).to_string(),
            ));
        }
        self.bits.set(a, b);
        Ok(())
    }

    pub fn insert(&mut self, lower: L::Element, upper: L::Element) -> Result<()> {
        let a = self
            .lattice
            .index(lower)
            .ok_or_else(|| Error::NotComparable(lower.to_string(), upper.to_string()))?;
        let b = self
            .lattice
            .index(upper)
            .ok_or_else(|| Error::NotComparable(lower.to_string(), upper.to_string()))?;
        self.insert_at(a, b)
    }

    pub fn remove_at(&mut self, a: usize, b: usize) {
        self.bits.clear(a, b);
    }

    pub fn add_reflexive(&mut self) {
        for a in 0..self.size() {
            self.bits.set(a, a);
        }
    }

    /// Number of pairs, reflexive ones included.
    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All pairs as index pairs, sorted.
    pub fn index_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size()).flat_map(move |a| self.bits.ones_in_row(a).map(move |b| (a, b)))
    }

    /// All pairs sorted by lattice index (lexicographic for grids).
    pub fn pairs(&self) -> impl Iterator<Item = (L::Element, L::Element)> + '_ {
        self.index_pairs()
            .map(|(a, b)| (self.lattice.element(a), self.lattice.element(b)))
    }

    /// Non-reflexive pairs, sorted.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (L::Element, L::Element)> + '_ {
        self.index_pairs()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (self.lattice.element(a), self.lattice.element(b)))
    }

    pub fn is_subset(&self, other: &Relation<L>) -> bool {
        self.lattice == other.lattice && self.bits.is_subset(&other.bits)
    }

    /// Per-axiom status.
    pub fn check_axioms(&self) -> AxiomReport {
        AxiomReport {
            refines_order: self.index_pairs().all(|(a, b)| self.tables.leq(a, b)),
            reflexive: (0..self.size()).all(|a| self.bits.get(a, a)),
            transitive: self.first_transitivity_failure().is_none(),
            restriction_closed: self.first_restriction_failure().is_none(),
        }
    }

    /// `(L, K, H)` with `L -> K`, `K -> H` but not `L -> H`.
    fn first_transitivity_failure(&self) -> Option<(usize, usize, usize)> {
        let w = self.bits.words();
        for (l, k) in self.index_pairs() {
            let row_k = self.bits.row(k);
            let row_l = self.bits.row(l);
            for i in 0..w {
                let missing = row_k[i] & !row_l[i];
                if missing != 0 {
                    return Some((l, k, i * 64 + missing.trailing_zeros() as usize));
                }
            }
        }
        None
    }

    /// `(K, H, M)` with `K -> H`, `M <= H`, but not `K meet M -> M`.
    fn first_restriction_failure(&self) -> Option<(usize, usize, usize)> {
        for (k, h) in self.index_pairs() {
            for m in iter_ones(self.tables.down(h)) {
                if !self.bits.get(self.tables.meet(k, m), m) {
                    return Some((k, h, m));
                }
            }
        }
        None
    }

    /// One pass of restriction closure; returns whether anything was added.
    fn close_restriction(&mut self) -> bool {
        let pairs: Vec<_> = self.index_pairs().collect();
        let mut changed = false;
        for (k, h) in pairs {
            for m in iter_ones(self.tables.down(h)) {
                changed |= self.bits.set(self.tables.meet(k, m), m);
            }
        }
        changed
    }

    /// Warshall transitive closure; indices follow a linear extension.
    fn close_transitivity(&mut self) -> bool {
        let mut changed = false;
        for k in 0..self.size() {
            for i in 0..self.size() {
                if i != k && self.bits.get(i, k) {
                    changed |= self.bits.or_row_into(k, i);
                }
            }
        }
        changed
    }

    /// Two-out-of-three in the form `L <= K <= H`, `L -> H` implies `K -> H`.
    fn saturation_holds(&self) -> bool {
        let n = self.size();
        let w = self.bits.words();
        // into[h] = { l : l -> h }
        let mut into = vec![0u64; n * w];
        for (a, b) in self.index_pairs() {
            into[b * w + a / 64] |= 1 << (a % 64);
        }
        for (l, h) in self.index_pairs() {
            let up = self.tables.up(l);
            let down = self.tables.down(h);
            let col = &into[h * w..(h + 1) * w];
            for i in 0..w {
                if up[i] & down[i] & !col[i] != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Restricts to a down-set given by `parent[i]`, the parent index of the
    /// sub-lattice element `i`.
    fn restricted<S: FiniteLattice>(&self, sub: S, parent: &[usize]) -> Relation<S> {
        let mut out = Relation::new(sub);
        for (a, &pa) in parent.iter().enumerate() {
            for (b, &pb) in parent.iter().enumerate() {
                if self.bits.get(pa, pb) {
                    out.bits.set(a, b);
                }
            }
        }
        out
    }
}

impl<L: FiniteLattice> fmt::Debug for Relation<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Relation")
            .field("lattice", &self.lattice)
            .field("strict_pairs", &self.strict_pairs().collect::<Vec<_>>())
            .finish()
    }
}

/// Axiom-by-axiom verdict for a relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub refines_order: bool,
    pub reflexive: bool,
    pub transitive: bool,
    pub restriction_closed: bool,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        self.refines_order && self.reflexive && self.transitive && self.restriction_closed
    }
}

pub fn is_transfer_system<L: FiniteLattice>(r: &Relation<L>) -> bool {
    r.check_axioms().all()
}

/// The smallest transfer system containing `r`: reflexive pairs are added,
/// then restriction and transitive closure alternate until neither changes
/// anything.
pub fn generate<L: FiniteLattice>(r: &Relation<L>) -> System<L> {
    let mut rel = r.clone();
    rel.add_reflexive();
    loop {
        let a = rel.close_restriction();
        let b = rel.close_transitivity();
        if !a && !b {
            break;
        }
    }
    System { rel }
}

pub fn is_saturated<L: FiniteLattice>(t: &System<L>) -> bool {
    t.rel.saturation_holds()
}

impl<L: FiniteLattice> System<L> {
    pub fn trivial(lattice: L) -> Self {
        Self {
            rel: Relation::reflexive(lattice),
        }
    }

    pub fn complete(lattice: L) -> Self {
        Self {
            rel: Relation::full(lattice),
        }
    }

    /// Validates the axioms.
    pub fn try_from_relation(rel: Relation<L>) -> Result<Self> {
        let report = rel.check_axioms();
        if report.all() {
            Ok(Self { rel })
        } else {
            Err(Error::NotTransferSystem(format!("{report:?}")))
        }
    }

    /// The caller guarantees the axioms; checked in debug builds.
    pub(crate) fn from_relation_unchecked(rel: Relation<L>) -> Self {
        debug_assert!(is_transfer_system(&rel));
        Self { rel }
    }

    pub fn relation(&self) -> &Relation<L> {
        &self.rel
    }

    pub fn into_relation(self) -> Relation<L> {
        self.rel
    }

    pub fn lattice(&self) -> &L {
        &self.rel.lattice
    }

    pub fn contains(&self, lower: L::Element, upper: L::Element) -> bool {
        self.rel.contains(lower, upper)
    }

    pub fn contains_at(&self, a: usize, b: usize) -> bool {
        self.rel.contains_at(a, b)
    }

    pub fn is_saturated(&self) -> bool {
        is_saturated(self)
    }

    pub fn is_trivial(&self) -> bool {
        self.rel.len() == self.rel.size()
    }

    pub fn is_complete(&self) -> bool {
        self.rel.len() == self.rel.size() + self.rel.tables.strict_pairs.len()
    }

    pub fn strict_pairs(&self) -> impl Iterator<Item = (L::Element, L::Element)> + '_ {
        self.rel.strict_pairs()
    }

    /// Pairs present in exactly one of the two systems: `(only_self, only_other)`.
    pub fn diff(&self, other: &Self) -> (Vec<Pair<L>>, Vec<Pair<L>>) {
        let mine: Vec<_> = self.rel.pairs().filter(|&(a, b)| !other.contains(a, b)).collect();
        let theirs: Vec<_> = other.rel.pairs().filter(|&(a, b)| !self.contains(a, b)).collect();
        (mine, theirs)
    }
}

impl<L: FiniteLattice> fmt::Debug for System<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("System")
            .field("lattice", &self.rel.lattice)
            .field("strict_pairs", &self.rel.strict_pairs().collect::<Vec<_>>())
            .finish()
    }
}

impl Relation<GridShape> {
    pub fn shape(&self) -> GridShape {
        self.lattice
    }

    /// Relation consisting of the given grid edges.
    pub fn from_edges(shape: GridShape, edges: impl IntoIterator<Item = GridEdge>) -> Result<Self> {
        let mut r = Self::new(shape);
        for e in edges {
            shape.check(e.target)?;
            r.insert(e.source, e.target)?;
        }
        Ok(r)
    }
}

impl TransferSystem {
    pub fn shape(&self) -> GridShape {
        self.rel.lattice
    }

    /// Restriction to the subgroup `top`: the system on `[top.i] x [top.j]`
    /// keeping the pairs below `top`.
    pub fn restrict(&self, top: GridPoint) -> Result<TransferSystem> {
        let shape = self.shape();
        shape.check(top)?;
        let sub = GridShape::new(top.i, top.j);
        let parent: Vec<usize> = sub.points().map(|p| shape.index_of(p)).collect();
        Ok(System::from_relation_unchecked(self.rel.restricted(sub, &parent)))
    }

    /// The pairs of the system that are grid edges, sorted.
    pub fn cover_relations(&self) -> Vec<GridEdge> {
        self.shape()
            .cover_edges()
            .into_iter()
            .filter(|e| self.contains(e.source, e.target))
            .collect()
    }

    /// The same system on the divisor lattice of `p^m q^n`.
    pub fn to_divisor_system(&self, p: u64, q: u64) -> Result<DivisorSystem> {
        let shape = self.shape();
        let k = p.pow(shape.m as u32) * q.pow(shape.n as u32);
        let lattice = DivisorLattice::new(k)?;
        let idx = |pt: GridPoint| {
            lattice
                .index_of(p.pow(pt.i as u32) * q.pow(pt.j as u32))
                .expect("grid point is a divisor")
        };
        let mut rel = Relation::new(lattice.clone());
        for (a, b) in self.rel.pairs() {
            rel.bits.set(idx(a), idx(b));
        }
        Ok(System::from_relation_unchecked(rel))
    }
}

impl DivisorSystem {
    pub fn modulus(&self) -> u64 {
        self.rel.lattice.modulus()
    }

    /// Restriction to the subgroup `C_l` for `l | k`.
    pub fn restrict(&self, l: u64) -> Result<DivisorSystem> {
        let k = self.modulus();
        if l == 0 || k % l != 0 {
            return Err(Error::NotADivisor { divisor: l, modulus: k });
        }
        let sub = DivisorLattice::new(l)?;
        let parent: Vec<usize> = sub
            .divisors()
            .iter()
            .map(|&d| self.rel.lattice.index_of(d).expect("divisor of a divisor"))
            .collect();
        Ok(System::from_relation_unchecked(self.rel.restricted(sub, &parent)))
    }

    /// Cover pairs `d -> e` (with `e / d` prime) in the system.
    pub fn cover_relations(&self) -> Vec<(u64, u64)> {
        let l = &self.rel.lattice;
        l.cover_pairs()
            .into_iter()
            .filter(|&(a, b)| self.contains_at(a, b))
            .map(|(a, b)| (l.element(a), l.element(b)))
            .collect()
    }

    /// Reads the system on the grid when `k = p^m q^n`.
    pub fn to_grid(&self, p: u64, q: u64) -> Result<TransferSystem> {
        let lattice = &self.rel.lattice;
        let shape = lattice.grid_shape(p, q).ok_or_else(|| {
            Error::Unsupported(format!("{} is not of the form {p}^m {q}^n", lattice.modulus()))
        })?;
        let coords = |d: u64| {
            let (i, rest) = crate::arith::strip_power(d, p);
            let (j, _) = crate::arith::strip_power(rest, q);
            GridPoint::new(i as usize, j as usize)
        };
        let mut rel = Relation::new(shape);
        for (a, b) in self.rel.pairs() {
            rel.insert(coords(a), coords(b))?;
        }
        Ok(System::from_relation_unchecked(rel))
    }
}

/// Clause of the pruned subset search: if every premise pair is present the
/// conclusion pair must be too.
#[derive(Clone, Debug)]
struct Clause {
    premises: [usize; 2],
    premise_count: usize,
    conclusion: usize,
}

/// Default node budget of the brute-force enumerator.
pub const DEFAULT_SEARCH_BUDGET: u64 = 200_000_000;

/// Visits every transfer system on `lattice` exactly once.
///
/// The search decides the strict comparable pairs one at a time (absent
/// before present) and checks each axiom instance as soon as all its pairs
/// are decided. Returns the number of systems visited, or
/// [`Error::BudgetExceeded`] once more than `budget` search nodes were expanded.
pub fn for_each_transfer_system<L: FiniteLattice>(
    lattice: &L,
    budget: u64,
    mut visit: impl FnMut(System<L>),
) -> Result<u64> {
    let tables = lattice.tables();
    let pairs = &tables.strict_pairs;
    let np = pairs.len();
    let n = tables.size;
    let mut pair_id = vec![usize::MAX; n * n];
    for (id, &(a, b)) in pairs.iter().enumerate() {
        pair_id[a * n + b] = id;
    }
    let strict = |a: usize, b: usize| -> Option<usize> { (a != b).then(|| pair_id[a * n + b]) };

    // Clauses are attached to the largest pair id they mention.
    let mut clauses: Vec<Vec<Clause>> = vec![Vec::new(); np];
    let attach = |clauses: &mut Vec<Vec<Clause>>, c: Clause| {
        let last = c.premises[..c.premise_count]
            .iter()
            .copied()
            .chain(std::iter::once(c.conclusion))
            .max()
            .unwrap();
        clauses[last].push(c);
    };
    for (id, &(k, h)) in pairs.iter().enumerate() {
        // restriction: K -> H, M <= H gives (K meet M) -> M
        for m in iter_ones(tables.down(h)) {
            if let Some(concl) = strict(tables.meet(k, m), m) {
                if concl != id {
                    attach(&mut clauses, Clause { premises: [id, 0], premise_count: 1, conclusion: concl });
                }
            }
        }
        // transitivity: L -> K, K -> H gives L -> H
        for l in 0..k {
            if let (Some(first), true) = (strict(l, k), tables.leq(l, k)) {
                let concl = strict(l, h).expect("l < h");
                attach(&mut clauses, Clause { premises: [first, id], premise_count: 2, conclusion: concl });
            }
        }
    }

    let mut state = vec![false; np];
    let mut nodes: u64 = 0;
    let mut found: u64 = 0;
    let mut depth = 0usize;
    // choice[d]: 0 = untried, 1 = tried absent, 2 = tried present
    let mut choice = vec![0u8; np + 1];
    let consistent = |state: &[bool], d: usize| {
        clauses[d].iter().all(|c| {
            let fired = c.premises[..c.premise_count].iter().all(|&p| state[p]);
            !fired || state[c.conclusion]
        })
    };
    loop {
        if depth == np {
            let mut rel = Relation::reflexive(lattice.clone());
            for (id, &(a, b)) in pairs.iter().enumerate() {
                if state[id] {
                    rel.bits.set(a, b);
                }
            }
            visit(System::from_relation_unchecked(rel));
            found += 1;
            if depth == 0 {
                return Ok(found);
            }
            depth -= 1;
            continue;
        }
        match choice[depth] {
            0 | 1 => {
                state[depth] = choice[depth] == 1;
                choice[depth] += 1;
                nodes += 1;
                if nodes > budget {
                    return Err(Error::BudgetExceeded {
                        task: "enumerating transfer systems".into(),
                        budget,
                    });
                }
                if consistent(&state, depth) {
                    depth += 1;
                    choice[depth] = 0;
                }
            }
            _ => {
                state[depth] = false;
                if depth == 0 {
                    return Ok(found);
                }
                depth -= 1;
            }
        }
    }
}

/// Every transfer system on the grid, in search order.
pub fn enumerate_transfer_systems(shape: GridShape, budget: u64) -> Result<Vec<TransferSystem>> {
    let mut out = Vec::new();
    for_each_transfer_system(&shape, budget, |t| out.push(t))?;
    Ok(out)
}

/// Every saturated transfer system on the grid, found by filtering the
/// brute-force enumeration.
pub fn enumerate_saturated_bruteforce(shape: GridShape, budget: u64) -> Result<Vec<TransferSystem>> {
    let mut out = Vec::new();
    for_each_transfer_system(&shape, budget, |t| {
        if t.is_saturated() {
            out.push(t)
        }
    })?;
    Ok(out)
}

/// Whether the relation bits `a -> b` hold for a raw index pair; exposed for
/// the modular module, which fills relations directly.
pub(crate) fn set_pair<L: FiniteLattice>(r: &mut Relation<L>, a: usize, b: usize) {
    debug_assert!(get_bit(r.tables.down(b), a));
    r.bits.set(a, b);
}
