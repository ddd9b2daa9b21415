//! Truncated bivariate power series over exact rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// `sum c_{ij} x^i y^j` over `i + j <= order`; higher terms are discarded.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalSeries2 {
    order: usize,
    /// Dense `(order+1) x (order+1)`; entries with `i + j > order` stay zero.
    coeffs: Vec<BigRational>,
}

impl RationalSeries2 {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            coeffs: vec![BigRational::zero(); (order + 1) * (order + 1)],
        }
    }

    pub fn constant(order: usize, c: BigRational) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, BigRational::one())
    }

    /// `exp(a x + b y) = sum a^i b^j / (i! j!) x^i y^j`.
    pub fn exp_linear(order: usize, a: i64, b: i64) -> Self {
        let mut s = Self::zero(order);
        let fact = factorials(order);
        for i in 0..=order {
            for j in 0..=order - i {
                let num = BigInt::from(a).pow(i as u32) * BigInt::from(b).pow(j as u32);
                let den = &fact[i] * &fact[j];
                s.coeffs[i * (order + 1) + j] = BigRational::new(num, den);
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.order + 1) + j
    }

    /// Coefficient of `x^i y^j`; zero beyond the truncation order.
    pub fn coeff(&self, i: usize, j: usize) -> BigRational {
        if i + j <= self.order {
            self.coeffs[self.idx(i, j)].clone()
        } else {
            BigRational::zero()
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, c: BigRational) {
        assert!(i + j <= self.order, "({i}, {j}) beyond order {}", self.order);
        let k = self.idx(i, j);
        self.coeffs[k] = c;
    }

    /// Index pairs `(i, j)` with `i + j <= order`, by total degree.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize)> {
        let order = self.order;
        (0..=order).flat_map(move |d| (0..=d).map(move |i| (i, d - i)))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let mut s = Self::zero(order);
        for (i, j) in s.support().collect::<Vec<_>>() {
            s.set_coeff(i, j, self.coeff(i, j));
        }
        s
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplicative inverse by coefficient recursion in total degree.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeff(0, 0);
        if c0.is_zero() {
            return Err(Error::Unsupported("series with zero constant term has no inverse".into()));
        }
        let inv0 = c0.recip();
        let mut g = Self::zero(self.order);
        g.set_coeff(0, 0, inv0.clone());
        for (i, j) in self.support().skip(1).collect::<Vec<_>>() {
            let mut acc = BigRational::zero();
            for u in 0..=i {
                for v in 0..=j {
                    if u + v == 0 {
                        continue;
                    }
                    let f = &self.coeffs[self.idx(u, v)];
                    if !f.is_zero() {
                        acc += f * &g.coeffs[g.idx(i - u, j - v)];
                    }
                }
            }
            g.set_coeff(i, j, -(acc * &inv0));
        }
        Ok(g)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.order);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Partial derivative in `x`; the result has order `order - 1`.
    pub fn d_dx(&self) -> Self {
        let order = self.order.saturating_sub(1);
        let mut s = Self::zero(order);
        if self.order == 0 {
            return s;
        }
        for (i, j) in s.support().collect::<Vec<_>>() {
            s.set_coeff(i, j, self.coeff(i + 1, j) * BigInt::from(i + 1));
        }
        s
    }

    /// Partial derivative in `y`; the result has order `order - 1`.
    pub fn d_dy(&self) -> Self {
        let order = self.order.saturating_sub(1);
        let mut s = Self::zero(order);
        if self.order == 0 {
            return s;
        }
        for (i, j) in s.support().collect::<Vec<_>>() {
            s.set_coeff(i, j, self.coeff(i, j + 1) * BigInt::from(j + 1));
        }
        s
    }

    /// `m! n! [x^m y^n]`, required to be a non-negative integer.
    pub fn egf_count(&self, m: usize, n: usize) -> Result<BigInt> {
        if m + n > self.order {
            return Err(Error::InsufficientOrder { m, n, order: self.order });
        }
        let fact = factorials(m.max(n));
        let value = self.coeff(m, n) * BigRational::from_integer(&fact[m] * &fact[n]);
        if !value.is_integer() || value.is_negative() {
            return Err(Error::NonIntegralCoefficient { m, n, value: value.to_string() });
        }
        Ok(value.to_integer())
    }
}

pub(crate) fn factorials(n: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigInt::one());
    for k in 1..=n {
        let next = &out[k - 1] * BigInt::from(k);
        out.push(next);
    }
    out
}

impl Add for &RationalSeries2 {
    type Output = RationalSeries2;

    fn add(self, rhs: &RationalSeries2) -> RationalSeries2 {
        let order = self.order.min(rhs.order);
        let mut s = RationalSeries2::zero(order);
        for (i, j) in s.support().collect::<Vec<_>>() {
            s.set_coeff(i, j, self.coeff(i, j) + rhs.coeff(i, j));
        }
        s
    }
}

impl Sub for &RationalSeries2 {
    type Output = RationalSeries2;

    fn sub(self, rhs: &RationalSeries2) -> RationalSeries2 {
        self + &(-rhs)
    }
}

impl Neg for &RationalSeries2 {
    type Output = RationalSeries2;

    fn neg(self) -> RationalSeries2 {
        RationalSeries2 {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &RationalSeries2 {
    type Output = RationalSeries2;

    fn mul(self, rhs: &RationalSeries2) -> RationalSeries2 {
        let order = self.order.min(rhs.order);
        let mut s = RationalSeries2::zero(order);
        for (i1, j1) in self.support().filter(|(i, j)| i + j <= order) {
            let a = &self.coeffs[self.idx(i1, j1)];
            if a.is_zero() {
                continue;
            }
            let rest = order - i1 - j1;
            for i2 in 0..=rest {
                for j2 in 0..=rest - i2 {
                    let b = &rhs.coeffs[rhs.idx(i2, j2)];
                    if !b.is_zero() {
                        let k = s.idx(i1 + i2, j1 + j2);
                        s.coeffs[k] += a * b;
                    }
                }
            }
        }
        s
    }
}

impl fmt::Debug for RationalSeries2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .support()
            .filter(|&(i, j)| !self.coeff(i, j).is_zero())
            .map(|(i, j)| format!("{}*x^{i}y^{j}", self.coeff(i, j)))
            .collect();
        write!(f, "{} + O(deg {})", terms.join(" + "), self.order + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exp_products_add_exponents() {
        let a = RationalSeries2::exp_linear(6, 1, 0);
        let b = RationalSeries2::exp_linear(6, 0, 1);
        assert_eq!(&a * &b, RationalSeries2::exp_linear(6, 1, 1));
        assert_eq!(a.pow(2), RationalSeries2::exp_linear(6, 2, 0));
    }

    #[test]
    fn reciprocal_is_inverse() {
        let d = &(&RationalSeries2::exp_linear(5, 1, 0) + &RationalSeries2::exp_linear(5, 0, 1))
            - &RationalSeries2::exp_linear(5, 1, 1);
        let inv = d.reciprocal().unwrap();
        assert_eq!(&d * &inv, RationalSeries2::one(5));
        assert_eq!(
            RationalSeries2::exp_linear(5, 3, -1).reciprocal().unwrap(),
            RationalSeries2::exp_linear(5, -3, 1)
        );
        assert!(RationalSeries2::zero(3).reciprocal().is_err());
    }

    #[test]
    fn derivatives() {
        let e = RationalSeries2::exp_linear(5, 2, 3);
        assert_eq!(e.d_dx(), RationalSeries2::exp_linear(4, 2, 3).scale(&q(2, 1)));
        assert_eq!(e.d_dy(), RationalSeries2::exp_linear(4, 2, 3).scale(&q(3, 1)));
    }

    #[test]
    fn coefficient_extraction() {
        let e = RationalSeries2::exp_linear(4, 2, 0);
        for m in 0..=4 {
            assert_eq!(e.egf_count(m, 0).unwrap(), BigInt::from(1u64 << m));
        }
        assert!(matches!(e.egf_count(3, 2), Err(Error::InsufficientOrder { .. })));
        let mut half = RationalSeries2::zero(2);
        half.set_coeff(1, 0, q(1, 2));
        assert!(matches!(half.egf_count(1, 0), Err(Error::NonIntegralCoefficient { .. })));
    }
}
