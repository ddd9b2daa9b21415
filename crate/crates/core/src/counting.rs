//! Exact counts `s(m, n)` of saturated transfer systems on `C_{p^m q^n}`.
//!
//! Three independent routes are provided: the recurrence
//! `s(m, n+1) = s(m, n) + sum_{k=0}^{m} C(m+1, k) s(k, n)` from `s(m, 0) = 2^m`,
//! the closed formula
//! `s(m, n) = sum_{j=2}^{m+2} (-1)^{m-j} S(m+1, j-1) (j!/2) j^n`, and the
//! coefficients of `e^{2x+2y} / (e^x + e^y - e^{x+y})^3`.

use std::io::{BufRead, Write};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::series::{factorials, RationalSeries2};

pub type BigCount = BigUint;

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Memoized Stirling numbers of the second kind, grown on demand.
#[derive(Clone, Debug, Default)]
pub struct StirlingTable {
    /// `rows[l][k] = S(l, k)` for `k <= l`.
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    pub fn new() -> Self {
        Self { rows: vec![vec![BigUint::one()]] }
    }

    fn grow(&mut self, l: usize) {
        if self.rows.is_empty() {
            self.rows.push(vec![BigUint::one()]);
        }
        while self.rows.len() <= l {
            let prev = self.rows.last().unwrap();
            let len = prev.len() + 1;
            let mut row = vec![BigUint::zero(); len];
            for k in 1..len {
                // S(l+1, k) = k S(l, k) + S(l, k-1)
                let stay = prev.get(k).map(|s| s * BigUint::from(k)).unwrap_or_default();
                row[k] = stay + &prev[k - 1];
            }
            self.rows.push(row);
        }
    }

    pub fn get(&mut self, l: usize, k: usize) -> BigUint {
        if k > l {
            return BigUint::zero();
        }
        self.grow(l);
        self.rows[l][k].clone()
    }

    /// Rows `0..=max_l` as CSV: row `l`, column `k`.
    pub fn write_csv<W: Write>(&mut self, max_l: usize, out: W) -> Result<()> {
        self.grow(max_l);
        let rows: Vec<Vec<BigUint>> = (0..=max_l)
            .map(|l| (0..=max_l).map(|k| self.get(l, k)).collect())
            .collect();
        write_table_csv(out, "l/k", &rows)
    }
}

pub fn stirling2(l: usize, k: usize) -> BigUint {
    StirlingTable::new().get(l, k)
}

/// `S(l, k) = (1/k!) sum_{i=0}^{k} (-1)^{k-i} C(k, i) i^l`.
pub fn stirling2_closed(l: usize, k: usize) -> BigUint {
    let mut acc = BigInt::zero();
    for i in 0..=k {
        let term = BigInt::from(binomial(k, i)) * BigInt::from(i).pow(l as u32);
        if (k - i) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    let q = acc / &factorials(k)[k];
    q.to_biguint().expect("Stirling numbers are non-negative")
}

/// Memo table of `s(m, n)` filled by the recurrence.
#[derive(Clone, Debug, Default)]
pub struct RecurrenceTable {
    /// `rows[n][m]`.
    rows: Vec<Vec<BigUint>>,
    width: usize,
}

impl RecurrenceTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn ensure(&mut self, m: usize, n: usize) {
        let width = (m + 1).max(self.width);
        if width > self.width {
            self.rows.clear();
            self.width = width;
        }
        if self.rows.is_empty() {
            self.rows.push((0..width).map(|k| BigUint::one() << k).collect());
        }
        let binom: Vec<Vec<BigUint>> = (0..=width).map(|a| (0..=a).map(|b| binomial(a, b)).collect()).collect();
        while self.rows.len() <= n {
            let prev = self.rows.last().unwrap();
            let next: Vec<BigUint> = (0..width)
                .map(|mm| {
                    let mut acc = prev[mm].clone();
                    for k in 0..=mm {
                        acc += &binom[mm + 1][k] * &prev[k];
                    }
                    acc
                })
                .collect();
            self.rows.push(next);
        }
    }

    pub fn get(&mut self, m: usize, n: usize) -> BigUint {
        self.ensure(m, n);
        self.rows[n][m].clone()
    }

    /// Table rows `m = 0..=max_m`, columns `n = 0..=max_n`.
    pub fn table(&mut self, max_m: usize, max_n: usize) -> Vec<Vec<BigUint>> {
        self.ensure(max_m, max_n);
        (0..=max_m)
            .map(|m| (0..=max_n).map(|n| self.rows[n][m].clone()).collect())
            .collect()
    }

    pub fn write_csv<W: Write>(&mut self, max_m: usize, max_n: usize, out: W) -> Result<()> {
        let rows = self.table(max_m, max_n);
        write_table_csv(out, "m/n", &rows)
    }

    /// Loads a table previously written by [`write_csv`](Self::write_csv),
    /// checking every entry against the recurrence.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let rows = read_table_csv(input)?;
        let max_m = rows.len().saturating_sub(1);
        let max_n = rows.first().map_or(0, |r| r.len().saturating_sub(1));
        let mut table = Self::new();
        table.ensure(max_m, max_n);
        for (m, row) in rows.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                if &table.rows[n][m] != v {
                    return Err(Error::Parse(format!("entry ({m}, {n}) = {v} disagrees with the recurrence")));
                }
            }
        }
        Ok(table)
    }
}

/// `s(m, n)` by the recurrence.
pub fn s_recurrence(m: usize, n: usize) -> BigUint {
    RecurrenceTable::new().get(m, n)
}

/// `s(m, n)` by the closed formula, summed with signed integers.
pub fn s_closed(m: usize, n: usize) -> BigUint {
    s_closed_with(&mut StirlingTable::new(), m, n)
}

pub fn s_closed_with(stirling: &mut StirlingTable, m: usize, n: usize) -> BigUint {
    let fact = factorials(m + 2);
    let mut acc = BigInt::zero();
    for (j, fj) in fact.iter().enumerate().skip(2) {
        let term = BigInt::from(stirling.get(m + 1, j - 1)) * (fj / 2) * BigInt::from(j).pow(n as u32);
        // (-1)^(m-j) depends only on the parity of m + j
        if (m + j) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc.to_biguint().expect("closed formula must be non-negative")
}

/// `f(x, y) = e^{2x+2y} / (e^x + e^y - e^{x+y})^3` truncated at `order`.
pub fn egf_series(order: usize) -> RationalSeries2 {
    let ex = RationalSeries2::exp_linear(order, 1, 0);
    let ey = RationalSeries2::exp_linear(order, 0, 1);
    let exy = RationalSeries2::exp_linear(order, 1, 1);
    let denom = &(&ex + &ey) - &exy;
    let inv = denom.reciprocal().expect("denominator has constant term 1");
    &RationalSeries2::exp_linear(order, 2, 2) * &inv.pow(3)
}

/// `m! n! [x^m y^n] f` from a series truncated at `order`.
pub fn egf_coefficient(m: usize, n: usize, order: usize) -> Result<BigUint> {
    if m + n > order {
        return Err(Error::InsufficientOrder { m, n, order });
    }
    let v = egf_series(order).egf_count(m, n)?;
    Ok(v.to_biguint().expect("checked non-negative"))
}

/// `m! n! [x^m y^n] f` with integer arithmetic on the box `[0, m] x [0, n]`.
///
/// Works on EGF-normalized coefficients `a_{ij} = i! j! [x^i y^j]`, where a
/// product becomes the binomial convolution
/// `c_{ij} = sum C(i, u) C(j, v) a_{uv} b_{i-u, j-v}`. The denominator
/// `e^x + e^y - e^{x+y}` has normalized coefficients `1` at the origin, `-1`
/// where both indices are positive and `0` elsewhere, so its inverse stays
/// integral.
pub fn egf_count(m: usize, n: usize) -> BigUint {
    let binom: Vec<Vec<BigInt>> = (0..=m.max(n))
        .map(|a| (0..=a).map(|b| BigInt::from(binomial(a, b))).collect())
        .collect();
    let conv_at = |a: &[Vec<BigInt>], b: &[Vec<BigInt>], i: usize, j: usize| {
        let mut acc = BigInt::zero();
        for u in 0..=i {
            for v in 0..=j {
                let x = &a[u][v];
                let y = &b[i - u][j - v];
                if !x.is_zero() && !y.is_zero() {
                    acc += &binom[i][u] * &binom[j][v] * x * y;
                }
            }
        }
        acc
    };
    let mut r = vec![vec![BigInt::zero(); n + 1]; m + 1];
    r[0][0] = BigInt::one();
    for i in 0..=m {
        for j in 0..=n {
            if i == 0 || j == 0 {
                if i + j > 0 {
                    r[i][j] = BigInt::zero();
                }
                continue;
            }
            let mut acc = BigInt::zero();
            for u in 1..=i {
                for v in 1..=j {
                    acc += &binom[i][u] * &binom[j][v] * &r[i - u][j - v];
                }
            }
            r[i][j] = acc;
        }
    }
    let full = |a: &[Vec<BigInt>], b: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
        (0..=m).map(|i| (0..=n).map(|j| conv_at(a, b, i, j)).collect()).collect()
    };
    let r2 = full(&r, &r);
    let r3 = full(&r2, &r);
    let e: Vec<Vec<BigInt>> = (0..=m)
        .map(|i| (0..=n).map(|j| BigInt::from(2u8).pow((i + j) as u32)).collect())
        .collect();
    conv_at(&e, &r3, m, n)
        .to_biguint()
        .expect("counts are non-negative")
}

/// Whether `df/dy = (e^x + 1) f + (e^x - 1) df/dx` holds for every
/// coefficient of total degree below `f.order()`.
pub fn pde_holds(f: &RationalSeries2) -> bool {
    let order = f.order();
    if order == 0 {
        return true;
    }
    let ex = RationalSeries2::exp_linear(order, 1, 0);
    let one = RationalSeries2::one(order);
    let lhs = f.d_dy();
    let rhs = &(&(&ex + &one) * f) + &(&(&ex - &one) * &f.d_dx());
    let rhs = rhs.truncate(order - 1);
    lhs == rhs
}

/// The PDE check on the generating function truncated at `order`, comparing
/// coefficients up to total degree `order - 1`.
pub fn pde_check(order: usize) -> bool {
    pde_holds(&egf_series(order))
}

/// Both sides of `(l - r) S(l, r) = sum_{t=1}^{l-r} (-1)^{t+1} C(l, t+1) S(l-t, r)`
/// and, for `l <= 10`, the number of marked partitions counted directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedPartitionReport {
    pub l: usize,
    pub r: usize,
    pub lhs: BigInt,
    pub rhs: BigInt,
    pub direct: Option<u64>,
}

impl MarkedPartitionReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs && self.direct.is_none_or(|d| BigInt::from(d) == self.lhs)
    }
}

/// Largest `l` for which marked partitions are enumerated directly.
pub const DIRECT_MARKED_LIMIT: usize = 10;

pub fn marked_partition_check(l: usize, r: usize) -> MarkedPartitionReport {
    marked_partition_check_with(&mut StirlingTable::new(), l, r)
}

pub fn marked_partition_check_with(stirling: &mut StirlingTable, l: usize, r: usize) -> MarkedPartitionReport {
    assert!(r <= l, "need 0 <= r <= l");
    let lhs = BigInt::from(l - r) * BigInt::from(stirling.get(l, r));
    let mut rhs = BigInt::zero();
    for t in 1..=(l - r) {
        let term = BigInt::from(binomial(l, t + 1)) * BigInt::from(stirling.get(l - t, r));
        if t % 2 == 1 {
            rhs += term;
        } else {
            rhs -= term;
        }
    }
    let direct = (l <= DIRECT_MARKED_LIMIT).then(|| count_marked_partitions(l, r));
    MarkedPartitionReport { l, r, lhs, rhs, direct }
}

/// Pairs (partition of `{1..l}` into `r` blocks, element that is not the
/// minimum of its block), by walking restricted growth strings.
pub fn count_marked_partitions(l: usize, r: usize) -> u64 {
    fn walk(pos: usize, l: usize, r: usize, blocks: usize, marked_here: u64, total: &mut u64) {
        if blocks + (l - pos) < r {
            return;
        }
        if pos == l {
            if blocks == r {
                *total += marked_here;
            }
            return;
        }
        // join an existing block: this element is not its block's minimum
        for _ in 0..blocks {
            walk(pos + 1, l, r, blocks, marked_here + 1, total);
        }
        if blocks < r {
            walk(pos + 1, l, r, blocks + 1, marked_here, total);
        }
    }
    let mut total = 0;
    walk(0, l, r, 0, 0, &mut total);
    total
}

fn write_table_csv<W: Write>(out: W, corner: &str, rows: &[Vec<BigUint>]) -> Result<()> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(out);
    let header = std::iter::once(corner.to_string()).chain((0..cols).map(|c| c.to_string()));
    w.write_record(header).map_err(csv_error)?;
    for (r, row) in rows.iter().enumerate() {
        let record = std::iter::once(r.to_string()).chain(row.iter().map(|v| v.to_string()));
        w.write_record(record).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn read_table_csv<R: BufRead>(input: R) -> Result<Vec<Vec<BigUint>>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let mut fields = record.iter();
        let label = fields.next().unwrap_or_default();
        if label.trim().parse::<usize>().ok() != Some(rows.len()) {
            return Err(Error::Parse(format!("line {line}: unexpected row label {label:?}")));
        }
        let row = fields
            .map(|f| {
                f.trim()
                    .parse::<BigUint>()
                    .map_err(|e| Error::Parse(format!("line {line}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Renders a count table (rows `m`, columns `n`) as CSV.
pub fn table_csv(rows: &[Vec<BigUint>]) -> String {
    let mut buf = Vec::new();
    write_table_csv(&mut buf, "m/n", rows).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn stirling_examples() {
        assert_eq!(stirling2(3, 2), big(3));
        assert_eq!(stirling2(0, 0), big(1));
        assert_eq!(stirling2(4, 0), big(0));
        assert_eq!(stirling2(0, 3), big(0));
        for l in 0..15 {
            assert_eq!(stirling2(l, l), big(1));
            if l >= 1 {
                assert_eq!(stirling2(l, 1), big(1));
            }
        }
    }

    /// Oracle: count set partitions into `k` blocks by enumerating block labels.
    #[test]
    fn stirling_matches_partition_enumeration() {
        fn count(l: usize, k: usize) -> u64 {
            if l == 0 {
                return (k == 0) as u64;
            }
            // assignments of l elements to k labelled blocks, all used, divided by k!
            let total = (k as u64).pow(l as u32);
            let mut surj = 0;
            for code in 0..total {
                let mut used = 0u32;
                let mut c = code;
                for _ in 0..l {
                    used |= 1 << (c % k as u64);
                    c /= k as u64;
                }
                if used.count_ones() as usize == k {
                    surj += 1;
                }
            }
            surj / (1..=k as u64).product::<u64>()
        }
        for l in 0..=7 {
            for k in 0..=l {
                assert_eq!(stirling2(l, k), big(count(l, k)), "S({l},{k})");
            }
        }
    }

    #[test]
    fn stirling_recurrence_matches_closed_sum() {
        let mut table = StirlingTable::new();
        for l in 0..=20 {
            for k in 0..=l {
                assert_eq!(table.get(l, k), stirling2_closed(l, k));
            }
        }
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(s_recurrence(1, 1), big(7));
        assert_eq!(s_recurrence(2, 1), big(23));
        assert_eq!(s_recurrence(2, 2), big(115));
        assert_eq!(s_recurrence(0, 0), big(1));
    }

    #[test]
    fn closed_examples() {
        assert_eq!(s_closed(1, 1), big(7));
        for k in 0..=20 {
            assert_eq!(s_closed(k, 0), BigUint::one() << k);
            assert_eq!(s_closed(0, k), BigUint::one() << k);
        }
    }

    #[test]
    fn egf_examples() {
        for m in 0..=6 {
            assert_eq!(egf_coefficient(m, 0, 6).unwrap(), BigUint::one() << m);
        }
        assert_eq!(egf_coefficient(1, 1, 2).unwrap(), big(7));
        assert_eq!(egf_coefficient(2, 2, 4).unwrap(), big(115));
        assert!(matches!(egf_coefficient(2, 2, 3), Err(Error::InsufficientOrder { .. })));
    }

    #[test]
    fn integer_egf_matches_rational_series() {
        let f = egf_series(12);
        for m in 0..=6 {
            for n in 0..=6 {
                let rational = f.egf_count(m, n).unwrap().to_biguint().unwrap();
                assert_eq!(egf_count(m, n), rational, "({m}, {n})");
            }
        }
        assert_eq!(egf_count(20, 17), s_closed(20, 17));
    }

    #[test]
    fn pde_examples() {
        assert!(pde_check(2));
        assert!(pde_check(4));
        let mut f = egf_series(4);
        let c = f.coeff(1, 1);
        f.set_coeff(1, 1, c + num_rational::BigRational::from_integer(1.into()));
        assert!(!pde_holds(&f));
    }

    #[test]
    fn marked_partition_examples() {
        let r = marked_partition_check(3, 2);
        assert_eq!(r.lhs, 3.into());
        assert_eq!(r.rhs, 3.into());
        assert!(r.holds());
        let r = marked_partition_check(5, 5);
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (0.into(), 0.into()));
        let r = marked_partition_check(5, 2);
        assert_eq!(r.lhs, 45.into());
        assert!(r.holds());
        assert_eq!(r.direct, Some(45));
        assert_eq!(marked_partition_check(11, 3).direct, None);
    }

    #[test]
    fn csv_roundtrip() {
        let mut t = RecurrenceTable::new();
        let mut buf = Vec::new();
        t.write_csv(3, 2, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("m/n,0,1,2\n0,1,2,4\n1,2,7,23\n"));
        let mut loaded = RecurrenceTable::read_csv(&buf[..]).unwrap();
        assert_eq!(loaded.get(3, 2), big(533));
        let bad = text.replace("23", "24");
        assert!(RecurrenceTable::read_csv(bad.as_bytes()).is_err());
    }

    #[test]
    fn growing_table_stays_consistent() {
        let mut t = RecurrenceTable::new();
        assert_eq!(t.get(1, 3), big(73));
        assert_eq!(t.get(4, 1), big(227));
        assert_eq!(t.get(1, 3), big(73));
    }
}
