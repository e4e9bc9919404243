//! JSON helpers for arbitrary-precision values.
//!
//! Integers are emitted as plain JSON numbers whenever they fit in an `i64`
//! and as decimal strings otherwise; rationals are always emitted as
//! canonical `"numer/denom"` strings (or a bare integer string when the
//! denominator is one). Both forms parse back exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::Value;

pub fn bigint_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(i) => Value::from(i),
        None => Value::String(n.to_string()),
    }
}

pub fn rational_value(q: &BigRational) -> Value {
    if q.denom().is_one() {
        Value::String(q.numer().to_string())
    } else {
        Value::String(format!("{}/{}", q.numer(), q.denom()))
    }
}

pub fn parse_bigint(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let n = BigInt::from(-81);
        assert_eq!(parse_bigint(&bigint_value(&n)), Some(n));
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(parse_bigint(&bigint_value(&big)), Some(big));
        let q = BigRational::new(BigInt::from(-1), BigInt::from(18));
        assert_eq!(rational_value(&q), Value::String("-1/18".into()));
    }
}
