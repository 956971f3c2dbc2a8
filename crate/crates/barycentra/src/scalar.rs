//! Exact scalars: canonical rationals, weights in the open unit interval, and
//! prime-field elements, plus the weighted-mean operations built from them.
//!
//! Rationals are always held in canonical form (reduced, positive
//! denominator) — `num-rational` maintains that invariant for us. A
//! [`Weight`] is a rational strictly between 0 and 1: the index of one binary
//! operation `p(x,y) = (1-p)x + py`. Over a prime field the index ranges over
//! the whole field instead; that is [`GfElem`].

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{mean_vec, Field, PrimeField, Rationals};
use crate::Rat;

// ===== Rationals =====

/// Convenience constructor for exact rationals in tests and fixtures.
///
/// Panics on a zero denominator; use [`parse_rat`] for untrusted input.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(numer.into(), denom.into())
}

/// The integer `n` as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Parses `a` or `a/b` into a canonical rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::ParseRational(s.to_string()));
    }
    // num-rational accepts `a/b`; reject a zero denominator explicitly so the
    // message names the input rather than panicking inside Ratio::new.
    if let Some((_, d)) = t.split_once('/') {
        match d.trim().parse::<num_bigint::BigInt>() {
            Ok(d) if d.is_zero() => return Err(Error::ParseRational(s.to_string())),
            _ => {}
        }
    }
    Rat::from_str(t).map_err(|_| Error::ParseRational(s.to_string()))
}

/// Formats a rational canonically: `a/b`, or just `a` when b = 1.
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

/// Formats a point as `(a, b, ...)`.
pub fn format_point(p: &[Rat]) -> String {
    let coords: Vec<String> = p.iter().map(format_rat).collect();
    format!("({})", coords.join(", "))
}

// ===== Serde helpers: rationals as canonical strings =====

/// Serializes a `Rat` as `"a/b"` and back.
pub mod rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rat(&raw).map_err(serde::de::Error::custom)
    }
}

/// Serializes a `Vec<Rat>` as `["a/b", ...]` and back.
pub mod rat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(format_rat).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rat>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serializes a `Vec<Vec<Rat>>` as `[["a/b", ...], ...]` and back.
pub mod rat_mat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Rat>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<Vec<String>> = m
            .iter()
            .map(|row| row.iter().map(format_rat).collect())
            .collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<Rat>>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

// ===== Weights =====

/// A rational strictly between 0 and 1; the index of a binary operation over Q.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(Rat);

impl Weight {
    /// Wraps a rational, rejecting anything outside the open interval (0,1).
    pub fn new(value: Rat) -> Result<Self> {
        if value.is_positive() && value < Rat::one() {
            Ok(Weight(value))
        } else {
            Err(Error::WeightOutOfRange(format_rat(&value)))
        }
    }

    /// Parses `a/b` into a weight.
    pub fn parse(s: &str) -> Result<Self> {
        Weight::new(parse_rat(s)?)
    }

    pub fn value(&self) -> &Rat {
        &self.0
    }

    pub fn into_rat(self) -> Rat {
        self.0
    }

    /// The complementary weight `1 - p`.
    pub fn complement(&self) -> Weight {
        Weight(Rat::one() - &self.0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rat(&self.0))
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        Weight::parse(&raw).map_err(serde::de::Error::custom)
    }
}

/// The dual product `r * p = r + p - r*p`, the weight that surfaces when two
/// nested operations are reassociated. Stays inside (0,1): it equals
/// `1 - (1-r)(1-p)`.
pub fn dual_product(r: &Weight, p: &Weight) -> Weight {
    let v = r.value() + p.value() - r.value() * p.value();
    Weight(v)
}

/// The inner weight `p / (r * p)` used when reassociating
/// `p(r(x,y), z)` into an operation applied to `(y, z)`.
pub fn skew_assoc_inner_weight(r: &Weight, p: &Weight) -> Weight {
    let dual = dual_product(r, p);
    Weight(p.value() / dual.value())
}

/// The weighted mean `(1-p)x + py` of two rational vectors.
pub fn weighted_mean(p: &Weight, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(mean_vec(&Rationals, p.value(), x, y))
}

// ===== Prime-field elements =====

/// An element of GF(p), carrying its (prime) modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GfElem {
    residue: u64,
    modulus: u64,
}

impl GfElem {
    /// Reduces `value` into GF(`modulus`). Errors if the modulus is not prime.
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        let field = PrimeField::new(modulus)?;
        Ok(GfElem {
            residue: field.elem_from_i64(value),
            modulus,
        })
    }

    /// Wraps a residue known to live in an already-validated field.
    pub fn from_field(field: &PrimeField, residue: u64) -> Self {
        GfElem {
            residue: field.elem_from_u64(residue),
            modulus: field.modulus(),
        }
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn field(&self) -> PrimeField {
        // The modulus was validated at construction.
        PrimeField::new(self.modulus).expect("modulus validated at construction")
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    pub fn is_one(&self) -> bool {
        self.residue == 1 % self.modulus
    }

    fn same_field(&self, other: &GfElem) -> Result<PrimeField> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self.field())
    }

    pub fn add(&self, other: &GfElem) -> Result<GfElem> {
        let f = self.same_field(other)?;
        Ok(GfElem::from_field(&f, f.add(&self.residue, &other.residue)))
    }

    pub fn sub(&self, other: &GfElem) -> Result<GfElem> {
        let f = self.same_field(other)?;
        Ok(GfElem::from_field(&f, f.sub(&self.residue, &other.residue)))
    }

    pub fn mul(&self, other: &GfElem) -> Result<GfElem> {
        let f = self.same_field(other)?;
        Ok(GfElem::from_field(&f, f.mul(&self.residue, &other.residue)))
    }

    pub fn inv(&self) -> Result<GfElem> {
        let f = self.field();
        f.inv(&self.residue)
            .map(|r| GfElem::from_field(&f, r))
            .ok_or_else(|| Error::DivisionByZero {
                modulus: self.modulus,
                context: "inverting a field element".to_string(),
            })
    }
}

impl fmt::Display for GfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

/// The weighted mean `(1-k)u + kv` of two GF(p) vectors, for any field
/// element `k` (including 0 and 1, which project onto `u` resp. `v`).
pub fn field_mean(k: &GfElem, u: &[GfElem], v: &[GfElem]) -> Result<Vec<GfElem>> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let field = k.field();
    for e in u.iter().chain(v) {
        if e.modulus() != k.modulus() {
            return Err(Error::ModulusMismatch(k.modulus(), e.modulus()));
        }
    }
    let ur: Vec<u64> = u.iter().map(|e| e.residue()).collect();
    let vr: Vec<u64> = v.iter().map(|e| e.residue()).collect();
    let m = mean_vec(&field, &k.residue(), &ur, &vr);
    Ok(m.into_iter().map(|r| GfElem::from_field(&field, r)).collect())
}
