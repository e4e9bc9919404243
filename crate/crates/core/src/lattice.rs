//! The algebraic Mukai lattice of a polarized abelian surface.
//!
//! A surface enters only through the single numerical invariant `H^2` (a
//! positive even integer); characters live in the rank-3 lattice of triples
//! `(r, c, chi) = (ch0, ch1/H, ch2)`. On an abelian surface the Todd class is
//! trivial, so `ch2` coincides with the Euler characteristic; we write the
//! third coordinate as `chi` throughout.
//!
//! The Mukai pairing of `(v0, v1, v2)` and `(w0, w1, w2)` is
//! `v1*w1 - v0*w2 - v2*w0`, where the degree term carries the intersection
//! form: since `c` stores the integer multiple of `H`, the pairing evaluates
//! to `v.c * w.c * H^2 - v.r * w.chi - v.chi * w.r`. It has signature (2, 1).
//!
//! Everything here is exact: coordinates are arbitrary-precision integers,
//! twisted characters are arbitrary-precision rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::Value;

use crate::jsonnum;
use crate::{Error, Result};

/// A polarized abelian surface, reduced to its numerical invariant `H^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surface {
    h_squared: BigInt,
}

impl Surface {
    /// `H^2` must be even and at least 2.
    pub fn new(h_squared: impl Into<BigInt>) -> Result<Self> {
        let h_squared = h_squared.into();
        if h_squared < BigInt::from(2) || !(&h_squared % 2u8).is_zero() {
            return Err(Error::InvalidSurface(h_squared));
        }
        Ok(Surface { h_squared })
    }

    /// A surface carrying curves of arithmetic genus `g` in the primitive
    /// linear system, i.e. with `H^2 = 2g - 2`.
    pub fn with_genus(g: impl Into<BigInt>) -> Result<Self> {
        let g = g.into();
        Surface::new(2 * g - 2)
    }

    pub fn h_squared(&self) -> &BigInt {
        &self.h_squared
    }

    /// Arithmetic genus of curves in `|H|`: `g = H^2/2 + 1`.
    pub fn genus(&self) -> BigInt {
        &self.h_squared / 2 + 1
    }

    /// JSON form `{"h_squared": n}`.
    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("h_squared".into(), jsonnum::bigint_value(&self.h_squared));
        Value::Object(map)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v
            .get("h_squared")
            .and_then(jsonnum::parse_bigint)
            .ok_or_else(|| Error::InvalidInput("surface JSON must be {\"h_squared\": n}".into()))?;
        Surface::new(n)
    }
}

/// An integral character `(r, c, chi)` in the rank-3 lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    pub r: BigInt,
    pub c: BigInt,
    pub chi: BigInt,
}

impl Character {
    pub fn new(r: impl Into<BigInt>, c: impl Into<BigInt>, chi: impl Into<BigInt>) -> Self {
        Character {
            r: r.into(),
            c: c.into(),
            chi: chi.into(),
        }
    }

    pub fn zero() -> Self {
        Character::new(0, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.c.is_zero() && self.chi.is_zero()
    }

    /// Mukai pairing `<v, w> = v.c*w.c*H^2 - v.r*w.chi - v.chi*w.r`.
    pub fn mukai_pairing(&self, other: &Character, surface: &Surface) -> BigInt {
        &self.c * &other.c * surface.h_squared() - &self.r * &other.chi - &self.chi * &other.r
    }

    /// Self-pairing `<v, v>`; always even for integral `v`.
    pub fn square(&self, surface: &Surface) -> BigInt {
        self.mukai_pairing(self, surface)
    }

    /// The beta-twisted character `e^{-beta H} . v`, with rational entries:
    /// `(r, c - beta r, chi - beta c H^2 + beta^2/2 H^2 r)`.
    pub fn twisted(&self, beta: &BigRational, surface: &Surface) -> TwistedCharacter {
        let h2 = BigRational::from(surface.h_squared().clone());
        let r = BigRational::from(self.r.clone());
        let c = BigRational::from(self.c.clone());
        let chi = BigRational::from(self.chi.clone());
        TwistedCharacter {
            r: r.clone(),
            c: &c - beta * &r,
            chi: chi - beta * &c * &h2 + beta * beta * &h2 * &r / BigRational::from(BigInt::from(2)),
        }
    }

    /// True when the two characters span the same line in the lattice (the
    /// zero character is proportional to everything).
    pub fn is_proportional_to(&self, other: &Character) -> bool {
        (&self.r * &other.c - &other.r * &self.c).is_zero()
            && (&self.r * &other.chi - &other.r * &self.chi).is_zero()
            && (&self.c * &other.chi - &other.c * &self.chi).is_zero()
    }

    /// JSON form `[r, c, chi]`.
    pub fn to_json(&self) -> Value {
        Value::Array(vec![
            jsonnum::bigint_value(&self.r),
            jsonnum::bigint_value(&self.c),
            jsonnum::bigint_value(&self.chi),
        ])
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| Error::InvalidInput("character JSON must be [r, c, chi]".into()))?;
        let mut parts = arr.iter().map(jsonnum::parse_bigint);
        let mut next = || {
            parts
                .next()
                .flatten()
                .ok_or_else(|| Error::InvalidInput("character entries must be integers".into()))
        };
        Ok(Character {
            r: next()?,
            c: next()?,
            chi: next()?,
        })
    }

    /// Sort key used when picking a canonical destabilizer: smallest absolute
    /// coordinates first, then the coordinates themselves.
    pub(crate) fn canonical_key(&self) -> (BigInt, BigInt, BigInt, BigInt, BigInt, BigInt) {
        (
            self.r.abs(),
            self.c.abs(),
            self.chi.abs(),
            self.r.clone(),
            self.c.clone(),
            self.chi.clone(),
        )
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.r, self.c, self.chi)
    }
}

impl Add for &Character {
    type Output = Character;
    fn add(self, rhs: &Character) -> Character {
        Character {
            r: &self.r + &rhs.r,
            c: &self.c + &rhs.c,
            chi: &self.chi + &rhs.chi,
        }
    }
}

impl Sub for &Character {
    type Output = Character;
    fn sub(self, rhs: &Character) -> Character {
        Character {
            r: &self.r - &rhs.r,
            c: &self.c - &rhs.c,
            chi: &self.chi - &rhs.chi,
        }
    }
}

impl Neg for &Character {
    type Output = Character;
    fn neg(self) -> Character {
        Character {
            r: -&self.r,
            c: -&self.c,
            chi: -&self.chi,
        }
    }
}

impl Mul<&Character> for &BigInt {
    type Output = Character;
    fn mul(self, rhs: &Character) -> Character {
        Character {
            r: self * &rhs.r,
            c: self * &rhs.c,
            chi: self * &rhs.chi,
        }
    }
}

/// A character with rational entries, as produced by the beta-twist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedCharacter {
    pub r: BigRational,
    pub c: BigRational,
    pub chi: BigRational,
}

impl TwistedCharacter {
    /// The Mukai pairing extends to rational characters by the same formula.
    /// The twist is an isometry, so pairings of twisted characters agree with
    /// the untwisted values.
    pub fn mukai_pairing(&self, other: &TwistedCharacter, surface: &Surface) -> BigRational {
        let h2 = BigRational::from(surface.h_squared().clone());
        &self.c * &other.c * h2 - &self.r * &other.chi - &self.chi * &other.r
    }
}
