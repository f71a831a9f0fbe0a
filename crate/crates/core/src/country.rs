//! ISO 3166-1 alpha-3 country identifiers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An ISO 3166-1 alpha-3 code, e.g. `DEU` or `USA`.
///
/// Stored as three uppercase ASCII letters; ordering is lexicographic, which
/// gives every collection keyed by country a canonical iteration order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryCode([u8; 3]);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid country code {0:?}: expected three ASCII letters")]
pub struct InvalidCountryCode(pub String);

impl CountryCode {
    pub fn new(code: &str) -> Result<Self, InvalidCountryCode> {
        let bytes = code.as_bytes();
        if bytes.len() != 3 || !bytes.iter().all(|b| b.is_ascii_alphabetic()) {
            return Err(InvalidCountryCode(code.to_string()));
        }
        Ok(CountryCode([
            bytes[0].to_ascii_uppercase(),
            bytes[1].to_ascii_uppercase(),
            bytes[2].to_ascii_uppercase(),
        ]))
    }

    pub fn as_str(&self) -> &str {
        // invariant: constructed from ASCII letters only
        std::str::from_utf8(&self.0).expect("country code is ASCII")
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CountryCode {
    type Err = InvalidCountryCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CountryCode::new(s)
    }
}

impl Serialize for CountryCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CountryCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        CountryCode::new(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_uppercases() {
        let c = CountryCode::new("deu").unwrap();
        assert_eq!(c.as_str(), "DEU");
        assert_eq!(c, CountryCode::new("DEU").unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CountryCode::new("DE").is_err());
        assert!(CountryCode::new("DEUX").is_err());
        assert!(CountryCode::new("D1U").is_err());
    }

    #[test]
    fn orders_lexicographically() {
        let a = CountryCode::new("AUS").unwrap();
        let b = CountryCode::new("AUT").unwrap();
        assert!(a < b);
    }
}
