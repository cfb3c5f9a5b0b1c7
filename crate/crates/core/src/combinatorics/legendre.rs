use crate::scalar::Scalar;

/// `P_n(x)` from `P_0 = 1`, `P_1 = x` and
/// `(n+1) P_{n+1}(x) = (2n+1) x P_n(x) - n P_{n-1}(x)`.
///
/// Exact when `T` is a rational type.
pub fn legendre<T: Scalar>(n: usize, x: &T) -> T {
    if n == 0 {
        return T::one();
    }
    let mut prev = T::one();
    let mut cur = x.clone();
    for m in 1..n as i64 {
        let next = (T::from_i64(2 * m + 1) * x.clone() * cur.clone() - T::from_i64(m) * prev)
            / T::from_i64(m + 1);
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};
    use num_bigint::BigInt;
    use num_traits::One;

    fn pochhammer_half(n: u64) -> Rational {
        (0..n).fold(Rational::one(), |acc, i| acc * rational(2 * i as i64 + 1, 2))
    }

    fn factorial(n: u64) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
    }

    #[test]
    fn low_orders() {
        let x = rational(2, 7);
        assert_eq!(legendre(0, &x), rational(1, 1));
        assert_eq!(legendre(1, &x), x);
        let expected = (rational(3, 1) * x.clone() * x.clone() - rational(1, 1)) / rational(2, 1);
        assert_eq!(legendre(2, &x), expected);
    }

    #[test]
    fn value_at_origin() {
        for n in 0..=10u64 {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let expected = rational(sign, 1) * pochhammer_half(n) / Rational::from_integer(factorial(n));
            assert_eq!(legendre(2 * n as usize, &rational(0, 1)), expected, "n = {n}");
            assert_eq!(legendre(2 * n as usize + 1, &rational(0, 1)), rational(0, 1));
        }
    }

    #[test]
    fn endpoint_values() {
        for n in 0..=20 {
            assert_eq!(legendre(n, &rational(1, 1)), rational(1, 1));
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(legendre(n, &rational(-1, 1)), rational(sign, 1));
        }
    }

    #[test]
    fn float_matches_exact() {
        let x = rational(-3, 11);
        for n in 0..15 {
            let exact = legendre(n, &x).to_f64();
            let float = legendre(n, &(-3.0 / 11.0));
            assert!((exact - float).abs() < 1e-14, "n = {n}");
        }
    }
}
