//! Cultural dimension profiles and the Euclidean cultural distance.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::country::CountryCode;

/// Theoretical upper bound of the cultural distance: all six dimensions
/// differing by the full 0..100 range, i.e. `100 * sqrt(6)`.
pub const MAX_DISTANCE: f64 = 244.94897427831782;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CultureError {
    #[error("{country}: {dimension} score {value} outside [0, 100]")]
    ScoreOutOfRange {
        country: CountryCode,
        dimension: Dimension,
        value: f64,
    },
    #[error("override refers to unknown country {0}")]
    UnknownOverrideCountry(CountryCode),
}

/// The six national-culture dimensions, each scaled 0-100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Pdi,
    Idv,
    Mas,
    Uai,
    Ltowvs,
    Ivr,
}

impl Dimension {
    pub const ALL: [Dimension; 6] = [
        Dimension::Pdi,
        Dimension::Idv,
        Dimension::Mas,
        Dimension::Uai,
        Dimension::Ltowvs,
        Dimension::Ivr,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Dimension::Pdi => "pdi",
            Dimension::Idv => "idv",
            Dimension::Mas => "mas",
            Dimension::Uai => "uai",
            Dimension::Ltowvs => "ltowvs",
            Dimension::Ivr => "ivr",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pdi" => Ok(Dimension::Pdi),
            "idv" => Ok(Dimension::Idv),
            "mas" => Ok(Dimension::Mas),
            "uai" => Ok(Dimension::Uai),
            "ltowvs" => Ok(Dimension::Ltowvs),
            "ivr" => Ok(Dimension::Ivr),
            other => Err(format!("unknown dimension {other:?}")),
        }
    }
}

/// One country's complete set of six dimension scores.
///
/// Partial profiles cannot be constructed; rows with missing dimensions are
/// rejected at ingest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CultureProfile {
    pub country: CountryCode,
    pub pdi: f64,
    pub idv: f64,
    pub mas: f64,
    pub uai: f64,
    pub ltowvs: f64,
    pub ivr: f64,
}

impl CultureProfile {
    pub fn new(country: CountryCode, scores: [f64; 6]) -> Result<Self, CultureError> {
        for (dimension, value) in Dimension::ALL.into_iter().zip(scores) {
            if !(0.0..=100.0).contains(&value) {
                return Err(CultureError::ScoreOutOfRange {
                    country,
                    dimension,
                    value,
                });
            }
        }
        let [pdi, idv, mas, uai, ltowvs, ivr] = scores;
        Ok(CultureProfile {
            country,
            pdi,
            idv,
            mas,
            uai,
            ltowvs,
            ivr,
        })
    }

    pub fn scores(&self) -> [f64; 6] {
        [self.pdi, self.idv, self.mas, self.uai, self.ltowvs, self.ivr]
    }

    pub fn score(&self, dimension: Dimension) -> f64 {
        match dimension {
            Dimension::Pdi => self.pdi,
            Dimension::Idv => self.idv,
            Dimension::Mas => self.mas,
            Dimension::Uai => self.uai,
            Dimension::Ltowvs => self.ltowvs,
            Dimension::Ivr => self.ivr,
        }
    }

    fn set_score(&mut self, dimension: Dimension, value: f64) {
        match dimension {
            Dimension::Pdi => self.pdi = value,
            Dimension::Idv => self.idv = value,
            Dimension::Mas => self.mas = value,
            Dimension::Uai => self.uai = value,
            Dimension::Ltowvs => self.ltowvs = value,
            Dimension::Ivr => self.ivr = value,
        }
    }
}

/// Signed componentwise difference between two profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CulturalDelta {
    pub d_pdi: f64,
    pub d_idv: f64,
    pub d_mas: f64,
    pub d_uai: f64,
    pub d_ltowvs: f64,
    pub d_ivr: f64,
}

impl CulturalDelta {
    pub fn components(&self) -> [f64; 6] {
        [
            self.d_pdi,
            self.d_idv,
            self.d_mas,
            self.d_uai,
            self.d_ltowvs,
            self.d_ivr,
        ]
    }
}

/// Componentwise `a - b`.
pub fn cultural_delta(a: &CultureProfile, b: &CultureProfile) -> CulturalDelta {
    CulturalDelta {
        d_pdi: a.pdi - b.pdi,
        d_idv: a.idv - b.idv,
        d_mas: a.mas - b.mas,
        d_uai: a.uai - b.uai,
        d_ltowvs: a.ltowvs - b.ltowvs,
        d_ivr: a.ivr - b.ivr,
    }
}

/// Euclidean norm of the six dimension differences.
pub fn cultural_distance(a: &CultureProfile, b: &CultureProfile) -> f64 {
    cultural_delta(a, b)
        .components()
        .iter()
        .map(|d| d * d)
        .sum::<f64>()
        .sqrt()
}

/// A single-dimension replacement applied after loading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileOverride {
    pub country: CountryCode,
    pub dimension: Dimension,
    pub score: f64,
}

/// The bundled default correction: Slovakia's published pdi and mas of 100
/// replaced by 80 and 60.
pub fn default_overrides() -> Vec<ProfileOverride> {
    let svk = CountryCode::new("SVK").expect("static code");
    vec![
        ProfileOverride {
            country: svk,
            dimension: Dimension::Pdi,
            score: 80.0,
        },
        ProfileOverride {
            country: svk,
            dimension: Dimension::Mas,
            score: 60.0,
        },
    ]
}

/// Applies overrides in place. Every override must name a country present in
/// the profile set and carry a score in [0, 100].
pub fn apply_overrides(
    profiles: &mut BTreeMap<CountryCode, CultureProfile>,
    overrides: &[ProfileOverride],
) -> Result<(), CultureError> {
    for ovr in overrides {
        if !(0.0..=100.0).contains(&ovr.score) {
            return Err(CultureError::ScoreOutOfRange {
                country: ovr.country,
                dimension: ovr.dimension,
                value: ovr.score,
            });
        }
        let profile = profiles
            .get_mut(&ovr.country)
            .ok_or(CultureError::UnknownOverrideCountry(ovr.country))?;
        profile.set_score(ovr.dimension, ovr.score);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn profile(code: &str, scores: [f64; 6]) -> CultureProfile {
        CultureProfile::new(CountryCode::new(code).unwrap(), scores).unwrap()
    }

    #[test]
    fn identical_profiles_have_zero_delta_and_distance() {
        let a = profile("AAA", [50.0, 60.0, 70.0, 10.0, 20.0, 30.0]);
        let d = cultural_delta(&a, &a);
        assert_eq!(d.components(), [0.0; 6]);
        assert_eq!(cultural_distance(&a, &a), 0.0);
    }

    #[test]
    fn single_component_difference() {
        let a = profile("AAA", [80.0, 50.0, 50.0, 50.0, 50.0, 50.0]);
        let b = profile("BBB", [30.0, 50.0, 50.0, 50.0, 50.0, 50.0]);
        let d = cultural_delta(&a, &b);
        assert_eq!(d.d_pdi, 50.0);
        assert_eq!(
            [d.d_idv, d.d_mas, d.d_uai, d.d_ltowvs, d.d_ivr],
            [0.0; 5]
        );
        assert_eq!(cultural_distance(&a, &b), 50.0);
    }

    #[test]
    fn delta_is_antisymmetric() {
        let a = profile("AAA", [80.0, 30.0, 10.0, 95.0, 42.0, 67.0]);
        let b = profile("BBB", [20.0, 90.0, 55.0, 5.0, 88.0, 12.0]);
        let ab = cultural_delta(&a, &b).components();
        let ba = cultural_delta(&b, &a).components();
        for (x, y) in ab.iter().zip(ba) {
            assert_eq!(*x, -y);
        }
    }

    #[test]
    fn full_range_single_axis_gives_one_hundred() {
        let a = profile("AAA", [100.0, 50.0, 50.0, 50.0, 50.0, 50.0]);
        let b = profile("BBB", [0.0, 50.0, 50.0, 50.0, 50.0, 50.0]);
        assert_eq!(cultural_distance(&a, &b), 100.0);
    }

    #[test]
    fn distance_equals_norm_of_delta() {
        let a = profile("AAA", [80.0, 30.0, 10.0, 95.0, 42.0, 67.0]);
        let b = profile("BBB", [20.0, 90.0, 55.0, 5.0, 88.0, 12.0]);
        let norm = cultural_delta(&a, &b)
            .components()
            .iter()
            .map(|d| d * d)
            .sum::<f64>()
            .sqrt();
        assert_abs_diff_eq!(cultural_distance(&a, &b), norm);
    }

    #[test]
    fn rejects_out_of_range_scores() {
        let err = CultureProfile::new(
            CountryCode::new("AAA").unwrap(),
            [120.0, 50.0, 50.0, 50.0, 50.0, 50.0],
        )
        .unwrap_err();
        assert!(matches!(err, CultureError::ScoreOutOfRange { .. }));
    }

    #[test]
    fn default_overrides_fix_slovakia() {
        let svk = CountryCode::new("SVK").unwrap();
        let mut profiles = BTreeMap::new();
        profiles.insert(
            svk,
            CultureProfile::new(svk, [100.0, 52.0, 100.0, 51.0, 77.0, 28.0]).unwrap(),
        );
        apply_overrides(&mut profiles, &default_overrides()).unwrap();
        let p = profiles[&svk];
        assert_eq!(p.pdi, 80.0);
        assert_eq!(p.mas, 60.0);
        assert_eq!(p.idv, 52.0);
    }

    #[test]
    fn empty_override_list_is_identity() {
        let svk = CountryCode::new("SVK").unwrap();
        let mut profiles = BTreeMap::new();
        profiles.insert(
            svk,
            CultureProfile::new(svk, [100.0, 52.0, 100.0, 51.0, 77.0, 28.0]).unwrap(),
        );
        let before = profiles.clone();
        apply_overrides(&mut profiles, &[]).unwrap();
        assert_eq!(profiles, before);
    }

    #[test]
    fn override_for_absent_country_errors() {
        let mut profiles = BTreeMap::new();
        let err = apply_overrides(&mut profiles, &default_overrides()).unwrap_err();
        assert!(matches!(err, CultureError::UnknownOverrideCountry(_)));
    }
}
