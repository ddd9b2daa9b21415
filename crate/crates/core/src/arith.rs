//! Integer helpers: divisors, primality, Bezout coefficients and the Chinese
//! remainder step.

/// Divisors of `k > 0` in ascending order.
pub fn divisors(k: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= k {
        if k % d == 0 {
            small.push(d);
            if d * d != k {
                large.push(k / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x % 2 == 0 {
        return x == 2;
    }
    let mut d = 3u64;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits `k = base^e * rest` with `base` not dividing `rest`.
pub fn strip_power(mut k: u64, base: u64) -> (u32, u64) {
    let mut e = 0;
    if base < 2 {
        return (0, k);
    }
    while k % base == 0 && k > 0 {
        k /= base;
        e += 1;
    }
    (e, k)
}

/// Returns `(g, x, y)` with `a x + b y = g = gcd(a, b)`.
pub fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
        (old_t, t) = (t, old_t - quot * t);
    }
    (old_r, old_s, old_t)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = extended_gcd(a as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

/// The residue of `x` in `[0, m)`.
pub fn rem(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// Unique `x` mod `m1 m2` with `x = r1 (mod m1)` and `x = r2 (mod m2)`, for
/// coprime moduli.
pub fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<u64> {
    let inv = mod_inverse(m1 % m2, m2)?;
    // x = r1 + m1 * t with t = (r2 - r1) / m1 mod m2
    let t = (rem(r2 as i128 - r1 as i128, m2) as u128 * inv as u128 % m2 as u128) as u64;
    Some(((r1 as u128 + m1 as u128 * t as u128) % (m1 as u128 * m2 as u128)) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(36), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
        for k in 1..300u64 {
            let brute: Vec<u64> = (1..=k).filter(|d| k % d == 0).collect();
            assert_eq!(divisors(k), brute);
        }
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..40).filter(|&x| is_prime(x)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(9_999_991));
        assert!(!is_prime(9_999_993));
    }

    #[test]
    fn bezout_and_crt() {
        let (g, x, y) = extended_gcd(5, 7);
        assert_eq!(g, 1);
        assert_eq!(5 * x + 7 * y, 1);
        assert_eq!(mod_inverse(5, 7), Some(3));
        assert_eq!(mod_inverse(6, 9), None);
        for r1 in 0..5 {
            for r2 in 0..7 {
                let x = crt_pair(r1, 5, r2, 7).unwrap();
                assert!(x < 35 && x % 5 == r1 && x % 7 == r2);
            }
        }
    }

    #[test]
    fn strip() {
        assert_eq!(strip_power(5 * 49, 7), (2, 5));
        assert_eq!(strip_power(11, 7), (0, 11));
    }
}
