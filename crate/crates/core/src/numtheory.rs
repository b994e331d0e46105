//! Exact integer arithmetic behind dealing, reconstruction and the coalition
//! attack: extended Euclid, modular inverse and a CRT that tolerates
//! non-coprime moduli.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A single congruence `x ≡ residue (mod modulus)` with the residue kept
/// in canonical form `0 ≤ residue < modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Congruence {
    residue: BigUint,
    modulus: BigUint,
}

impl Congruence {
    /// Builds a congruence from an already reduced residue.
    pub fn new(residue: impl Into<BigUint>, modulus: impl Into<BigUint>) -> Result<Self> {
        let residue = residue.into();
        let modulus = modulus.into();
        if modulus.is_zero() {
            return Err(Error::ZeroModulus);
        }
        if residue >= modulus {
            return Err(Error::ResidueOutOfRange { residue, modulus });
        }
        Ok(Congruence { residue, modulus })
    }

    /// Builds `value mod modulus`, reducing the value first.
    pub fn reduce(value: &BigUint, modulus: impl Into<BigUint>) -> Result<Self> {
        let modulus = modulus.into();
        if modulus.is_zero() {
            return Err(Error::ZeroModulus);
        }
        Ok(Congruence {
            residue: value % &modulus,
            modulus,
        })
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// True if `value` satisfies this congruence.
    pub fn admits(&self, value: &BigUint) -> bool {
        value % &self.modulus == self.residue
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// `(g, x, y)` with `a·x + b·y = g = gcd(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BezoutTriple {
    pub g: BigUint,
    pub x: BigInt,
    pub y: BigInt,
}

impl BezoutTriple {
    /// Checks the Bézout identity against the inputs that produced it.
    pub fn holds_for(&self, a: &BigUint, b: &BigUint) -> bool {
        let lhs = BigInt::from(a.clone()) * &self.x + BigInt::from(b.clone()) * &self.y;
        lhs == BigInt::from(self.g.clone())
    }
}

/// Extended Euclidean algorithm.
pub fn egcd(a: &BigUint, b: &BigUint) -> Result<BezoutTriple> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::BothZero);
    }
    let (mut old_r, mut r) = (BigInt::from(a.clone()), BigInt::from(b.clone()));
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    // Remainders of nonnegative inputs stay nonnegative.
    debug_assert!(!old_r.is_negative());
    Ok(BezoutTriple {
        g: old_r.magnitude().clone(),
        x: old_s,
        y: old_t,
    })
}

/// Inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inv(a: &BigUint, m: &BigUint) -> Result<BigUint> {
    if *m < BigUint::from(2u32) {
        return Err(Error::ModulusTooSmall(m.clone()));
    }
    let bz = egcd(&(a % m), m)?;
    if !bz.g.is_one() {
        return Err(Error::NotCoprime {
            a: a.clone(),
            m: m.clone(),
        });
    }
    Ok(floor_mod(&bz.x, m))
}

/// Solves the pair of congruences with the general CRT; the moduli need not
/// be coprime. The result lives modulo `lcm(m1, m2)`.
pub fn crt_pair(c1: &Congruence, c2: &Congruence) -> Result<Congruence> {
    let (m1, m2) = (&c1.modulus, &c2.modulus);
    let bz = egcd(m1, m2)?;
    let g = &bz.g;

    let r1 = BigInt::from(c1.residue.clone());
    let r2 = BigInt::from(c2.residue.clone());
    let diff = &r2 - &r1;
    let g_int = BigInt::from(g.clone());
    if !diff.is_multiple_of(&g_int) {
        return Err(Error::Inconsistent {
            first: c1.clone(),
            second: c2.clone(),
        });
    }

    // r = r1 + m1·k with k ≡ (diff/g)·x (mod m2/g).
    let m2_over_g = m2 / g;
    let k = floor_mod(&((diff / &g_int) * &bz.x), &m2_over_g);
    let lcm = m1 / g * m2;
    let r = (&c1.residue + m1 * k) % &lcm;
    Ok(Congruence {
        residue: r,
        modulus: lcm,
    })
}

/// Left fold of [`crt_pair`] over a nonempty list.
pub fn crt_combine(cs: &[Congruence]) -> Result<Congruence> {
    let (first, rest) = cs.split_first().ok_or(Error::EmptySystem)?;
    rest.iter()
        .try_fold(first.clone(), |acc, c| crt_pair(&acc, c))
}

/// Least common multiple of a list of moduli.
pub fn lcm_all<'a>(moduli: impl IntoIterator<Item = &'a BigUint>) -> BigUint {
    moduli
        .into_iter()
        .fold(BigUint::one(), |acc, m| acc.lcm(m))
}

pub(crate) fn floor_mod(v: &BigInt, m: &BigUint) -> BigUint {
    // mod_floor with a positive modulus is never negative
    v.mod_floor(&BigInt::from(m.clone())).magnitude().clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn cg(r: u64, m: u64) -> Congruence {
        Congruence::new(big(r), big(m)).unwrap()
    }

    #[test]
    fn egcd_examples() {
        for (a, b, g) in [(7u64, 9u64, 1u64), (0, 5, 5), (12, 18, 6), (5, 0, 5)] {
            let bz = egcd(&big(a), &big(b)).unwrap();
            assert_eq!(bz.g, big(g));
            assert!(bz.holds_for(&big(a), &big(b)), "{a} {b} -> {bz:?}");
        }
        let bz = egcd(&big(0), &big(5)).unwrap();
        assert_eq!((bz.x, bz.y), (BigInt::zero(), BigInt::one()));
    }

    #[test]
    fn egcd_both_zero() {
        assert_eq!(egcd(&big(0), &big(0)), Err(Error::BothZero));
    }

    #[test]
    fn mod_inv_examples() {
        assert_eq!(mod_inv(&big(9), &big(11)).unwrap(), big(5));
        assert_eq!(mod_inv(&big(1), &big(2)).unwrap(), big(1));
        assert_eq!(mod_inv(&big(1), &big(97)).unwrap(), big(1));
        assert!(matches!(
            mod_inv(&big(6), &big(9)),
            Err(Error::NotCoprime { .. })
        ));
        assert!(matches!(
            mod_inv(&big(1), &big(1)),
            Err(Error::ModulusTooSmall(_))
        ));
    }

    #[test]
    fn crt_pair_examples() {
        assert_eq!(crt_pair(&cg(6, 9), &cg(0, 11)).unwrap(), cg(33, 99));
        assert_eq!(crt_pair(&cg(5, 13), &cg(5, 13)).unwrap(), cg(5, 13));
        assert_eq!(crt_pair(&cg(1, 4), &cg(3, 6)).unwrap(), cg(9, 12));
        assert!(matches!(
            crt_pair(&cg(0, 4), &cg(1, 6)),
            Err(Error::Inconsistent { .. })
        ));
    }

    #[test]
    fn crt_combine_examples() {
        let three = [cg(6, 9), cg(0, 11), cg(7, 17)];
        assert_eq!(crt_combine(&three).unwrap(), cg(330, 1683));
        assert_eq!(crt_combine(&[cg(4, 10)]).unwrap(), cg(4, 10));
        let lax = [cg(2, 7), cg(0, 9), cg(10, 11), cg(8, 13), cg(0, 15)];
        assert_eq!(crt_combine(&lax).unwrap(), cg(450, 45045));
        assert_eq!(crt_combine(&[]), Err(Error::EmptySystem));
    }

    #[test]
    fn congruence_rejects_bad_input() {
        assert_eq!(Congruence::new(big(0), big(0)), Err(Error::ZeroModulus));
        assert!(Congruence::new(big(9), big(9)).is_err());
        assert_eq!(Congruence::reduce(&big(450), big(7)).unwrap(), cg(2, 7));
    }

    #[test]
    fn modulus_one_is_the_trivial_constraint() {
        assert_eq!(crt_pair(&cg(0, 1), &cg(4, 7)).unwrap(), cg(4, 7));
    }
}
