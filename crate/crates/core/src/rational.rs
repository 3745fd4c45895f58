//! Exact rationals for density-dependent bounds.

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;

/// Parses `"p/q"` or a bare integer.
pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::ParseRational(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: i64 = n.parse().map_err(|_| bad())?;
    let d: i64 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

pub fn format_q(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Checks `0 < d < 1`.
pub fn check_density(d: &Q) -> Result<()> {
    if *d <= Q::zero() || *d >= Q::one() {
        return Err(Error::Density(format_q(d)));
    }
    Ok(())
}

/// The quasi-isometry constant `1/(1-4d)`; `None` when `d >= 1/4`.
pub fn lambda(d: &Q) -> Option<Q> {
    let den = Q::one() - Q::from_integer(4) * d;
    if den <= Q::zero() {
        None
    } else {
        Some(den.recip())
    }
}

/// Smallest integer `>= q`.
pub fn ceil_q(q: &Q) -> i64 {
    q.ceil().to_integer()
}

pub(crate) mod serde_q {
    use super::{format_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_values() {
        assert_eq!(lambda(&Q::new(3, 14)), Some(Q::from_integer(7)));
        assert_eq!(lambda(&Q::new(1, 5)), Some(Q::from_integer(5)));
        assert_eq!(lambda(&Q::new(1, 4)), None);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/14").unwrap(), Q::new(3, 14));
        assert_eq!(parse_q(" 6 / 4 ").unwrap(), Q::new(3, 2));
        assert_eq!(parse_q("2").unwrap(), Q::from_integer(2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(format_q(&Q::new(2, 4)), "1/2");
    }

    #[test]
    fn density_range() {
        assert!(check_density(&Q::new(3, 14)).is_ok());
        assert!(check_density(&Q::from_integer(1)).is_err());
        assert!(check_density(&Q::from_integer(0)).is_err());
    }
}
