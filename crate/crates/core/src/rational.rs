//! Exact rationals and their `"p/q"` string form.

use crate::{Error, Result};
use num_rational::Ratio;
use num_traits::{One, Zero};

pub type Rational = Ratio<i64>;

/// Parses `"p/q"` or an integer string.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::MalformedRational(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => t.parse::<i64>().map(Rational::from_integer).map_err(|_| bad()),
    }
}

/// Always `"p/q"`, reduced, with the sign on `p` (`"1/1"` for one).
pub fn format_fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Integers as `"3"`, everything else as `"p/q"`.
pub fn format_entry(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_fraction(r)
    }
}

/// True iff `r` is one of -1, 0, 1.
pub fn is_unit_or_zero(r: &Rational) -> bool {
    r.is_zero() || r.is_one() || *r == -Rational::one()
}

pub mod serde_fraction {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_fraction(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("15/32").unwrap(), Rational::new(15, 32));
        assert_eq!(parse_rational("-2").unwrap(), Rational::from_integer(-2));
        assert_eq!(parse_rational(" 2/4 ").unwrap(), Rational::new(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formatting() {
        assert_eq!(format_fraction(&Rational::new(10, 16)), "5/8");
        assert_eq!(format_fraction(&Rational::from_integer(1)), "1/1");
        assert_eq!(format_entry(&Rational::from_integer(-1)), "-1");
        assert_eq!(format_entry(&Rational::new(-1, 2)), "-1/2");
    }
}
