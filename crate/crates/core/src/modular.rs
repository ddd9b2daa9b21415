//! Index sets, the transfer systems they induce, and the realization of every
//! saturated transfer system on `C_{p q^n}` by an index set.
//!
//! For an index set `I ⊆ Z/kZ` the relation `C_d -> C_e` (`d | e | k`) holds
//! iff `I mod e` is invariant under translation by `d` in `Z/eZ`.

use std::fmt;

use num_integer::Integer;

use crate::arith::{crt_pair, extended_gcd, is_prime, rem};
use crate::bits::{get_bit, set_bit, words_for};
use crate::cover::SaturatedCover;
use crate::error::{Error, Result};
use crate::grid::{DivisorLattice, GridPoint, GridShape};
use crate::transfer::{set_pair, DivisorSystem, Relation, System, TransferSystem};

/// Largest modulus for which an index set keeps a membership bitmask.
pub const MASK_LIMIT: u64 = 4096;

/// Default cap on the number of negation orbits the exhaustive search visits.
pub const DEFAULT_ORBIT_BUDGET: u32 = 22;

/// Largest modulus the exhaustive search handles after coset reduction.
pub const SEARCH_MODULUS_LIMIT: u64 = 128;

/// A subset of `Z/kZ` containing 0 and closed under negation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    modulus: u64,
    members: Vec<u64>,
    mask: Option<Vec<u64>>,
}

impl IndexSet {
    /// Validates `members` (residues in `[0, k)`) as an index set.
    pub fn new(modulus: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidIndexSet("modulus must be positive".into()));
        }
        let mut members: Vec<u64> = members.into_iter().collect();
        if let Some(&x) = members.iter().find(|&&x| x >= modulus) {
            return Err(Error::InvalidIndexSet(format!("{x} is not a residue mod {modulus}")));
        }
        members.sort_unstable();
        members.dedup();
        if members.first() != Some(&0) {
            return Err(Error::InvalidIndexSet("0 is missing".into()));
        }
        for &x in &members {
            let neg = (modulus - x) % modulus;
            if members.binary_search(&neg).is_err() {
                return Err(Error::InvalidIndexSet(format!(
                    "{x} is present but its negative {neg} is not (mod {modulus})"
                )));
            }
        }
        Ok(Self::from_sorted(modulus, members))
    }

    /// The smallest index set containing the given residues (reduced mod `k`).
    pub fn closure(modulus: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidIndexSet("modulus must be positive".into()));
        }
        let mut out = vec![0];
        for x in members {
            let x = x % modulus;
            out.push(x);
            out.push((modulus - x) % modulus);
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self::from_sorted(modulus, out))
    }

    fn from_sorted(modulus: u64, members: Vec<u64>) -> Self {
        let mask = (modulus <= MASK_LIMIT).then(|| {
            let mut words = vec![0u64; words_for(modulus as usize)];
            for &x in &members {
                set_bit(&mut words, x as usize);
            }
            words
        });
        Self { modulus, members, mask }
    }

    /// `{0}`: induces the trivial system.
    pub fn zero(modulus: u64) -> Result<Self> {
        Self::new(modulus, [0])
    }

    /// All of `Z/kZ`: induces the complete system.
    pub fn full(modulus: u64) -> Result<Self> {
        Self::new(modulus, 0..modulus)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Members in ascending order.
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Never true: 0 is always a member.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        let x = x % self.modulus;
        match &self.mask {
            Some(words) => get_bit(words, x as usize),
            None => self.members.binary_search(&x).is_ok(),
        }
    }

    /// `I mod l` as an index set of `Z/lZ`.
    pub fn reduce(&self, l: u64) -> Result<IndexSet> {
        if l == 0 || self.modulus % l != 0 {
            return Err(Error::NotADivisor { divisor: l, modulus: self.modulus });
        }
        let mut out: Vec<u64> = self.members.iter().map(|x| x % l).collect();
        out.sort_unstable();
        out.dedup();
        Ok(Self::from_sorted(l, out))
    }

    /// Whether `(I mod e) + d = (I mod e)` in `Z/eZ`.
    pub fn invariant_mod(&self, e: u64, d: u64) -> Result<bool> {
        let r = self.reduce(e)?;
        Ok(translation_invariant(&r, d))
    }
}

fn translation_invariant(set: &IndexSet, d: u64) -> bool {
    let e = set.modulus;
    let d = d % e;
    // translation is injective, so invariance is containment of the image
    d == 0 || set.members.iter().all(|&x| set.contains(x + d))
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSet(mod {}; {:?})", self.modulus, self.members)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(u64::to_string).collect();
        write!(f, "{{{}}} mod {}", parts.join(","), self.modulus)
    }
}

/// `J mod l`, an index set for `C_l`.
pub fn restrict_index(j: &IndexSet, l: u64) -> Result<IndexSet> {
    j.reduce(l)
}

/// The `I`-modular transfer system on the divisor lattice of the modulus.
pub fn modular_divisor_system(index: &IndexSet) -> Result<DivisorSystem> {
    let lattice = DivisorLattice::new(index.modulus)?;
    let divs = lattice.divisors().to_vec();
    let mut rel = Relation::new(lattice);
    for (b, &e) in divs.iter().enumerate() {
        let reduced = index.reduce(e)?;
        for (a, &d) in divs.iter().enumerate().take(b + 1) {
            if e % d == 0 && translation_invariant(&reduced, d) {
                set_pair(&mut rel, a, b);
            }
        }
    }
    Ok(System::from_relation_unchecked(rel))
}

/// The `I`-modular transfer system on the grid, for `k = p^m q^n`.
pub fn modular_transfer_system(index: &IndexSet, p: u64, q: u64) -> Result<TransferSystem> {
    modular_divisor_system(index)?.to_grid(p, q)
}

/// The group `C_{p q^n}` with primes `p, q > 3`, `p != q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    pub p: u64,
    pub q: u64,
    pub n: usize,
}

impl GroupSpec {
    pub fn new(p: u64, q: u64, n: usize) -> Result<Self> {
        for x in [p, q] {
            if !is_prime(x) || x <= 3 {
                return Err(Error::InvalidGroup(format!("{x} is not a prime greater than 3")));
            }
        }
        if p == q {
            return Err(Error::InvalidGroup(format!("p and q must differ (both are {p})")));
        }
        let spec = Self { p, q, n };
        spec.checked_modulus()
            .ok_or_else(|| Error::InvalidGroup(format!("{p}*{q}^{n} overflows")))?;
        Ok(spec)
    }

    fn checked_modulus(&self) -> Option<u64> {
        self.q.checked_pow(self.n as u32)?.checked_mul(self.p)
    }

    /// `p q^n`.
    pub fn modulus(&self) -> u64 {
        self.checked_modulus().expect("validated")
    }

    /// `q^n`.
    pub fn q_power(&self) -> u64 {
        self.q.pow(self.n as u32)
    }

    pub fn shape(&self) -> GridShape {
        GridShape::new(1, self.n)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C_{{{}*{}^{}}}", self.p, self.q, self.n)
    }
}

/// Shape of the top row of a saturated cover on `[1] x [n+1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TopRowType {
    /// No verticals, top horizontal present.
    I,
    /// Both verticals.
    II,
    /// Left vertical only.
    III,
    /// Nothing in the top row.
    IV,
}

impl fmt::Display for TopRowType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopRowType::I => "I",
            TopRowType::II => "II",
            TopRowType::III => "III",
            TopRowType::IV => "IV",
        })
    }
}

pub fn classify_type(s: &SaturatedCover) -> Result<TopRowType> {
    let shape = s.shape();
    if shape.m != 1 || shape.n == 0 {
        return Err(Error::Unsupported(format!("top-row types need a [1]x[n] grid with n >= 1, got {shape}")));
    }
    let top = shape.n;
    let left = s.has_vertical(top, 0);
    let right = s.has_vertical(top, 1);
    let horizontal = s.has_horizontal(1, top);
    Ok(match (left, right) {
        (true, true) => TopRowType::II,
        (true, false) => TopRowType::III,
        (false, false) if horizontal => TopRowType::I,
        (false, false) => TopRowType::IV,
        (false, true) => return Err(Error::InvalidCover("right vertical without left vertical".into())),
    })
}

/// `0 <= α < q` with `(α p q^n + i) mod q^{n+1}` in `[0, q^n)`, for `0 < i < p q^n`.
pub fn lemma_alpha(i: u64, p: u64, q: u64, n: usize) -> u64 {
    let qn = q.pow(n as u32);
    assert!(0 < i && i < p * qn, "need 0 < i < p q^n");
    let (k, r) = (i / qn, i % qn);
    let (_, c, _) = extended_gcd(p as i128, q as i128);
    let beta = -c * k as i128;
    let alpha = rem(beta, q);
    let residue = ((alpha as u128 * p as u128 * qn as u128 + i as u128) % (qn as u128 * q as u128)) as u64;
    assert_eq!(residue, r, "lemma_alpha post-condition");
    alpha
}

/// The unique `0 < c < pq` with `q | c` and `c ≡ a (mod p)`, for `0 < a < p`.
pub fn sunzi_c(a: u64, p: u64, q: u64) -> u64 {
    assert!(0 < a && a < p, "need 0 < a < p");
    let c = crt_pair(0, q, a, p).expect("p and q are coprime");
    debug_assert!(c > 0 && c % q == 0 && c % p == a);
    c
}

/// The chain construction alone, before verification: lift `I'` by
/// `q^{n-1}`-translates when the top chain edge is present, otherwise keep
/// `{0} ∪ {i, q^n - i : i ∈ I' \ {0}}`.
pub fn chain_index_set(t: &TransferSystem, q: u64) -> Result<IndexSet> {
    let shape = t.shape();
    if shape.m != 0 {
        return Err(Error::ShapeMismatch { expected: GridShape::new(0, shape.n), found: shape });
    }
    let mut set = IndexSet::zero(1)?;
    for j in 1..=shape.n {
        let prev = q.pow(j as u32 - 1);
        let modulus = prev * q;
        let members: Vec<u64> = if t.contains(GridPoint::new(0, j - 1), GridPoint::new(0, j)) {
            (0..q).flat_map(|alpha| set.members().iter().map(move |&i| alpha * prev + i)).collect()
        } else {
            std::iter::once(0)
                .chain(set.members().iter().filter(|&&i| i != 0).flat_map(|&i| [i, modulus - i]))
                .collect()
        };
        set = IndexSet::new(modulus, members)?;
    }
    Ok(set)
}

/// An index set on `Z/q^nZ` inducing the saturated system `t` on `[0] x [n]`.
/// The chain construction is verified; if it ever fails, an exhaustive
/// search takes over.
pub fn realize_chain(t: &TransferSystem, q: u64) -> Result<IndexSet> {
    if !t.is_saturated() {
        return Err(Error::NotSaturated);
    }
    let set = chain_index_set(t, q)?;
    let target = t.to_divisor_system(1, q)?;
    if modular_divisor_system(&set)? == target {
        return Ok(set);
    }
    match find_index_set_bruteforce(&target, DEFAULT_ORBIT_BUDGET)? {
        Some(found) => Ok(found),
        None => Err(Error::VerificationFailed {
            shape: t.shape(),
            target: Box::new(t.clone()),
            produced: Box::new(modular_divisor_system(&set)?.to_grid(q + 1, q)?),
        }),
    }
}

/// A verified index set for a saturated system on `C_{p q^n}` together with
/// the nonzero multiple of `q^n` it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizationCertificate {
    pub spec: GroupSpec,
    pub target: TransferSystem,
    pub index_set: IndexSet,
    pub witness_multiple: u64,
}

impl RealizationCertificate {
    /// Re-checks both invariants from scratch.
    pub fn verify(&self) -> Result<()> {
        let produced = modular_transfer_system(&self.index_set, self.spec.p, self.spec.q)?;
        if produced != self.target {
            return Err(Error::VerificationFailed {
                shape: self.target.shape(),
                target: Box::new(self.target.clone()),
                produced: Box::new(produced),
            });
        }
        let w = self.witness_multiple;
        if w == 0 || w % self.spec.q_power() != 0 || !self.index_set.contains(w) {
            return Err(Error::InvalidIndexSet(format!(
                "witness {w} is not a nonzero multiple of {} in the index set",
                self.spec.q_power()
            )));
        }
        Ok(())
    }

    /// `a` with `witness = a q^n`.
    pub fn witness_factor(&self) -> u64 {
        self.witness_multiple / self.spec.q_power()
    }
}

/// Realizes a saturated system on `[1] x [n]` by an index set on `Z/pq^nZ`.
pub fn realize(t: &TransferSystem, spec: GroupSpec) -> Result<RealizationCertificate> {
    if t.shape() != spec.shape() {
        return Err(Error::ShapeMismatch { expected: spec.shape(), found: t.shape() });
    }
    if !t.is_saturated() {
        return Err(Error::NotSaturated);
    }
    let (index_set, a) = realize_level(t, spec.p, spec.q)?;
    let cert = RealizationCertificate {
        spec,
        target: t.clone(),
        index_set,
        witness_multiple: a * spec.q_power(),
    };
    cert.verify()?;
    Ok(cert)
}

/// Smallest `0 < a < p` with `a q^n ∈ J`.
fn smallest_witness(j: &IndexSet, p: u64, qn: u64) -> Option<u64> {
    (1..p).find(|&a| j.contains(a * qn))
}

fn realize_level(t: &TransferSystem, p: u64, q: u64) -> Result<(IndexSet, u64)> {
    let n = t.shape().n;
    let qn = q.pow(n as u32);
    let j = if n == 0 {
        if t.is_complete() {
            IndexSet::full(p)?
        } else {
            IndexSet::new(p, [0, 1, p - 1])?
        }
    } else {
        let cover = SaturatedCover::from_system(t)?;
        match classify_type(&cover)? {
            TopRowType::I => {
                let chain = t.restrict(GridPoint::new(0, n))?;
                let i = realize_chain(&chain, q)?;
                IndexSet::new(p * qn, (0..p).flat_map(|alpha| i.members().iter().map(move |&x| alpha * qn + x)))?
            }
            kind => {
                let below = t.restrict(GridPoint::new(1, n - 1))?;
                let (i, a) = realize_level(&below, p, q)?;
                lift(kind, &i, a, p, q, n - 1)?
            }
        }
    };
    let produced = modular_transfer_system(&j, p, q)?;
    if &produced != t {
        return Err(Error::VerificationFailed {
            shape: t.shape(),
            target: Box::new(t.clone()),
            produced: Box::new(produced),
        });
    }
    let a = smallest_witness(&j, p, qn).ok_or_else(|| {
        Error::InvalidIndexSet(format!("{j} contains no nonzero multiple of {qn}"))
    })?;
    Ok((j, a))
}

/// Builds `J ⊆ Z/pq^{n+1}Z` from the level-`n` set `I ∋ a q^n`.
fn lift(kind: TopRowType, i: &IndexSet, a: u64, p: u64, q: u64, n: usize) -> Result<IndexSet> {
    let qn = q.pow(n as u32);
    let k = p * qn * q;
    let pqn = p * qn;
    let layered = || (0..q).flat_map(move |alpha| i.members().iter().map(move |&x| alpha * pqn + x));
    match kind {
        TopRowType::II => IndexSet::new(k, layered()),
        TopRowType::III => {
            let drop = if a % q == 0 { a * qn + pqn } else { a * qn };
            let drop = [drop % k, (k - drop % k) % k];
            IndexSet::new(k, layered().filter(|x| !drop.contains(x)))
        }
        TopRowType::IV => {
            let j = type_iv_literal(i, a, p, q, n)?;
            if !j.invariant_mod(k, qn * q)? {
                return Ok(j);
            }
            // J + q^{n+1} = J happens, e.g. when I = Z/pZ at n = 0. Add one more
            // pair over some i, lifted two q^n-steps away from J mod q^{n+1}:
            // J mod pq^n is unchanged and q^n is still missing from J mod q^{n+1}.
            let aq = a * qn;
            let shift = (2 * crate::arith::mod_inverse(p % q, q).expect("coprime")) % q;
            for &x in i.members() {
                if x == 0 || x == aq || x == pqn - aq {
                    continue;
                }
                let y = ((lemma_alpha(x, p, q, n) + shift) % q) * pqn + x;
                let mut members = j.members().to_vec();
                members.extend([y, k - y]);
                let candidate = IndexSet::new(k, members)?;
                if !candidate.invariant_mod(k, qn * q)? {
                    return Ok(candidate);
                }
            }
            Ok(j)
        }
        TopRowType::I => unreachable!("type I is built directly"),
    }
}

/// The type IV set exactly as in the inductive step: `{0, ±c q^n}` together
/// with `±(α_i p q^n + i)` for `i ∈ I \ {0, ±a q^n}`.
pub fn type_iv_literal(i: &IndexSet, a: u64, p: u64, q: u64, n: usize) -> Result<IndexSet> {
    let qn = q.pow(n as u32);
    let pqn = p * qn;
    let k = pqn * q;
    let c = sunzi_c(a, p, q);
    let aq = a * qn;
    let mut members = vec![0, c * qn, k - c * qn];
    for &x in i.members() {
        if x == 0 || x == aq || x == pqn - aq {
            continue;
        }
        let y = lemma_alpha(x, p, q, n) * pqn + x;
        members.push(y);
        members.push(k - y);
    }
    IndexSet::new(k, members)
}

/// Exhaustive search for an index set inducing `t`, over unions of negation
/// orbits. Invariance of `I` under every `d` with `C_d -> C_k` forces `I` to
/// be a union of cosets of `gZ/kZ` (`g` the gcd of those `d`), so the search
/// runs over index sets of `Z/gZ`, one bit per orbit. Returns `None` when no
/// index set induces `t`.
pub fn find_index_set_bruteforce(t: &DivisorSystem, budget_bits: u32) -> Result<Option<IndexSet>> {
    search_index_set(t, budget_bits, true)
}

/// As [`find_index_set_bruteforce`] but over all of `Z/kZ`, without the
/// coset reduction.
pub fn find_index_set_unreduced(t: &DivisorSystem, budget_bits: u32) -> Result<Option<IndexSet>> {
    search_index_set(t, budget_bits, false)
}

struct Constraint {
    slot: usize,
    shift: u32,
    expected: bool,
}

fn rotate(mask: u128, shift: u32, width: u32) -> u128 {
    let full = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
    if shift == 0 {
        return mask;
    }
    ((mask << shift) | (mask >> (width - shift))) & full
}

fn search_index_set(t: &DivisorSystem, budget_bits: u32, reduce: bool) -> Result<Option<IndexSet>> {
    let lattice = t.lattice().clone();
    let k = lattice.modulus();
    let divs = lattice.divisors().to_vec();
    let top = divs.len() - 1;
    let g = if reduce {
        divs.iter()
            .enumerate()
            .filter(|&(a, _)| t.contains_at(a, top))
            .fold(k, |g, (_, &d)| g.gcd(&d))
    } else {
        k
    };
    if g > SEARCH_MODULUS_LIMIT {
        return Err(Error::Unsupported(format!(
            "exhaustive index-set search over Z/{g}Z exceeds the modulus limit {SEARCH_MODULUS_LIMIT}"
        )));
    }
    let orbits = (g / 2) as u32;
    if orbits > budget_bits {
        return Err(Error::BudgetExceeded {
            task: format!("searching index sets of Z/{k}Z ({orbits} orbits)"),
            budget: budget_bits as u64,
        });
    }

    // every pair d | e becomes a rotation test on the set mod gcd(g, e)
    let mut widths: Vec<u64> = Vec::new();
    let mut constraints: Vec<Constraint> = Vec::new();
    for (b, &e) in divs.iter().enumerate() {
        let h = g.gcd(&e);
        for (a, &d) in divs.iter().enumerate().take(b) {
            if e % d != 0 {
                continue;
            }
            let expected = t.contains_at(a, b);
            let shift = (d % h) as u32;
            if shift == 0 {
                if expected {
                    continue;
                }
                return Ok(None);
            }
            let slot = match widths.iter().position(|&w| w == h) {
                Some(s) => s,
                None => {
                    widths.push(h);
                    widths.len() - 1
                }
            };
            match constraints.iter().find(|c| c.slot == slot && c.shift == shift) {
                Some(c) if c.expected != expected => return Ok(None),
                Some(_) => {}
                None => constraints.push(Constraint { slot, shift, expected }),
            }
        }
    }

    let mut counts: Vec<Vec<u32>> = widths.iter().map(|&h| vec![0; h as usize]).collect();
    let mut masks: Vec<u128> = vec![1; widths.len()];
    for c in counts.iter_mut() {
        c[0] = 1;
    }
    let satisfied = |masks: &[u128]| {
        constraints.iter().all(|c| {
            let m = masks[c.slot];
            (rotate(m, c.shift, widths[c.slot] as u32) == m) == c.expected
        })
    };

    let mut state: u64 = 0;
    let mut found = satisfied(&masks).then_some(0u64);
    let total: u64 = 1 << orbits;
    let mut step: u64 = 1;
    while found.is_none() && step < total {
        let bit = step.trailing_zeros();
        let x = bit as u64 + 1;
        let on = state & (1 << bit) == 0;
        state ^= 1 << bit;
        let elems = if 2 * x == g { [x, x] } else { [x, g - x] };
        let distinct = if elems[0] == elems[1] { 1 } else { 2 };
        for (s, &h) in widths.iter().enumerate() {
            for &y in &elems[..distinct] {
                let r = (y % h) as usize;
                if on {
                    counts[s][r] += 1;
                    if counts[s][r] == 1 {
                        masks[s] |= 1 << r;
                    }
                } else {
                    counts[s][r] -= 1;
                    if counts[s][r] == 0 {
                        masks[s] &= !(1 << r);
                    }
                }
            }
        }
        if satisfied(&masks) {
            found = Some(state);
        }
        step += 1;
    }

    let Some(state) = found else { return Ok(None) };
    let mut residues = vec![0u64];
    for bit in 0..orbits {
        if state & (1 << bit) != 0 {
            let x = bit as u64 + 1;
            residues.extend([x, g - x]);
        }
    }
    let members: Vec<u64> = (0..k).filter(|y| residues.contains(&(y % g))).collect();
    let set = IndexSet::new(k, members)?;
    debug_assert!(modular_divisor_system(&set)? == *t);
    Ok(Some(set))
}

/// Negation orbits of `Z/kZ \ {0}`.
pub fn orbit_count(k: u64) -> u64 {
    k / 2
}

/// The index set whose orbit `{x, k-x}` is present iff bit `x-1` of `bits` is set.
pub fn index_set_from_orbits(k: u64, bits: &[bool]) -> Result<IndexSet> {
    if bits.len() as u64 != orbit_count(k) {
        return Err(Error::InvalidIndexSet(format!(
            "expected {} orbit bits for modulus {k}, got {}",
            orbit_count(k),
            bits.len()
        )));
    }
    IndexSet::closure(k, bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64 + 1))
}
