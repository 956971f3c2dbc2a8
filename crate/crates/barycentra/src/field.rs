//! Field contexts: the exact scalar domains the rest of the crate computes in.
//!
//! Everything downstream works over exactly two fields — arbitrary-precision
//! rationals and prime fields GF(p) with a *runtime* modulus. Because a
//! runtime-modulus element cannot produce its own zero or one out of thin
//! air, the shared linear algebra is generic over a small field-*context*
//! trait rather than over the element type alone: the context value knows the
//! modulus (or knows it is Q) and hands out constants and operations.
//! [`Rationals`] delegates to the `num-traits` implementations on
//! [`BigRational`]; [`PrimeField`] does modular arithmetic on `u64` residues.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::Rat;

/// An exact field, presented as a context object whose elements are plain data.
pub trait Field {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` exactly for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|i| self.mul(a, &i))
    }
}

/// The field of rationals; elements are [`BigRational`](crate::Rat).
#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rat;

    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a
    }
    fn inv(&self, a: &Rat) -> Option<Rat> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &Rat) -> bool {
        Zero::is_zero(a)
    }
}

/// The prime field GF(p); elements are residues in `0..p` stored as `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    modulus: u64,
}

impl PrimeField {
    /// Builds GF(p). Errors if `p` is not prime.
    pub fn new(modulus: u64) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::NotPrime(modulus));
        }
        Ok(PrimeField { modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Reduces an arbitrary signed integer into `0..p`.
    pub fn elem_from_i64(&self, value: i64) -> u64 {
        let p = self.modulus as i64;
        (value.rem_euclid(p)) as u64
    }

    /// Reduces an arbitrary unsigned integer into `0..p`.
    pub fn elem_from_u64(&self, value: u64) -> u64 {
        value % self.modulus
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.modulus
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.modulus - b % self.modulus) % self.modulus
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.modulus - a % self.modulus) % self.modulus
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        let a = a % self.modulus;
        if a == 0 {
            return None;
        }
        // Fermat: a^(p-2) mod p.
        let mut base = a as u128;
        let mut exp = self.modulus - 2;
        let p = self.modulus as u128;
        let mut acc: u128 = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        Some(acc as u64)
    }
    fn is_zero(&self, a: &u64) -> bool {
        a % self.modulus == 0
    }
}

/// Deterministic trial-division primality test; fine at desk scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// The weighted mean `(1-w)*x + w*y`, componentwise. Callers check lengths.
pub fn mean_vec<F: Field>(f: &F, w: &F::Elem, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
    debug_assert_eq!(x.len(), y.len());
    let cw = f.sub(&f.one(), w);
    x.iter()
        .zip(y)
        .map(|(a, b)| f.add(&f.mul(&cw, a), &f.mul(w, b)))
        .collect()
}

/// The parallelogram completion `u - v + w`, componentwise.
pub fn parallelogram_vec<F: Field>(
    f: &F,
    u: &[F::Elem],
    v: &[F::Elem],
    w: &[F::Elem],
) -> Vec<F::Elem> {
    debug_assert_eq!(u.len(), v.len());
    debug_assert_eq!(u.len(), w.len());
    u.iter()
        .zip(v)
        .zip(w)
        .map(|((a, b), c)| f.add(&f.sub(a, b), c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn primality_small_cases() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(7919));
        assert!(!is_prime(7917));
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.add(&3, &4), 2);
        assert_eq!(f.sub(&1, &3), 3);
        assert_eq!(f.mul(&3, &4), 2);
        assert_eq!(f.neg(&2), 3);
        assert_eq!(f.inv(&2), Some(3)); // 2*3 = 6 = 1 mod 5
        assert_eq!(f.inv(&0), None);
        assert_eq!(f.elem_from_i64(-1), 4);
        assert!(PrimeField::new(6).is_err());
        assert!(PrimeField::new(1).is_err());
    }

    #[test]
    fn prime_field_inverses_are_total_on_nonzero() {
        for p in [2u64, 3, 5, 7, 11, 101] {
            let f = PrimeField::new(p).unwrap();
            for a in 1..p {
                let i = f.inv(&a).unwrap();
                assert_eq!(f.mul(&a, &i), 1, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn rational_context_matches_num_traits() {
        let f = Rationals;
        let a = rat(1, 2);
        let b = rat(1, 3);
        assert_eq!(f.add(&a, &b), rat(5, 6));
        assert_eq!(f.sub(&a, &b), rat(1, 6));
        assert_eq!(f.mul(&a, &b), rat(1, 6));
        assert_eq!(f.neg(&a), rat(-1, 2));
        assert_eq!(f.inv(&a), Some(rat(2, 1)));
        assert_eq!(f.inv(&rat(0, 1)), None);
    }

    #[test]
    fn mean_vec_interpolates_in_both_fields() {
        // Over Q: (1-1/3)*(0,0) + (1/3)*(1,1) = (1/3,1/3).
        let q = Rationals;
        let m = mean_vec(&q, &rat(1, 3), &[rat(0, 1), rat(0, 1)], &[rat(1, 1), rat(1, 1)]);
        assert_eq!(m, vec![rat(1, 3), rat(1, 3)]);

        // Over GF(5) with k=2: -1*(1,2) + 2*(3,3) = (0,4).
        let f = PrimeField::new(5).unwrap();
        let m = mean_vec(&f, &2, &[1, 2], &[3, 3]);
        assert_eq!(m, vec![0, 4]);
    }

    #[test]
    fn parallelogram_vec_is_translation() {
        let f = PrimeField::new(3).unwrap();
        // u - v + w over GF(3): (1,2) - (0,1) + (2,2) = (0,0).
        assert_eq!(parallelogram_vec(&f, &[1, 2], &[0, 1], &[2, 2]), vec![0, 0]);
        let q = Rationals;
        assert_eq!(
            parallelogram_vec(&q, &[rat(1, 2)], &[rat(1, 3)], &[rat(1, 6)]),
            vec![rat(1, 3)]
        );
    }
}
