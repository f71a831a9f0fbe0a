//! Average annual migration flows derived from five-wave migrant stocks,
//! normalised per million inhabitants of the host or origin country.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::country::CountryCode;
use crate::ingest::{Corpus, PopulationSeries};

/// The census waves covered by the stock data.
pub const WAVE_YEARS: [u16; 5] = [1995, 2000, 2005, 2010, 2015];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("population series for {0} is empty")]
    EmptyPopulation(CountryCode),
}

/// Stock-to-flow rule. The bilateral source data carries stocks, not flows;
/// the estimator turns wave-to-wave changes into an average annual flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowEstimator {
    /// Sum of positive consecutive-wave differences over the spanned years.
    /// Stock declines are treated as attrition or return migration, not as
    /// negative inflow.
    PositiveDiff,
    /// Sum of signed consecutive-wave differences (telescopes to last minus
    /// first), floored at zero to keep flows non-negative.
    SignedDiff,
}

impl FromStr for FlowEstimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive-diff" | "positive_diff" => Ok(FlowEstimator::PositiveDiff),
            "signed-diff" | "signed_diff" => Ok(FlowEstimator::SignedDiff),
            other => Err(format!("unknown flow estimator {other:?}")),
        }
    }
}

/// Estimated average annual migration for one ordered (origin, destination)
/// pair, raw and normalised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowRecord {
    pub origin: CountryCode,
    pub destination: CountryCode,
    /// Persons per year.
    pub avg_annual_flow: f64,
    /// Persons per year per million inhabitants of the destination.
    pub per_million_host: f64,
    /// Persons per year per million inhabitants of the origin.
    pub per_million_origin: f64,
    /// False when fewer than two stock waves were available and the flow is
    /// carried as zero.
    pub defined: bool,
}

/// Average annual flow from the available waves of one pair's stock series.
///
/// Consecutive available wave differences are accumulated per the estimator
/// and divided by the total spanned years (20 when all five waves are
/// present). Returns `None` when fewer than two waves are available.
pub fn estimate_annual_flow(
    stocks: &BTreeMap<u16, f64>,
    estimator: FlowEstimator,
) -> Option<f64> {
    let years: Vec<u16> = WAVE_YEARS
        .iter()
        .copied()
        .filter(|y| stocks.contains_key(y))
        .collect();
    if years.len() < 2 {
        return None;
    }
    let mut total = 0.0;
    for pair in years.windows(2) {
        let diff = stocks[&pair[1]] - stocks[&pair[0]];
        total += match estimator {
            FlowEstimator::PositiveDiff => diff.max(0.0),
            FlowEstimator::SignedDiff => diff,
        };
    }
    let span = f64::from(years[years.len() - 1] - years[0]);
    Some(total.max(0.0) / span)
}

/// Flow per million inhabitants, using the arithmetic mean of the country's
/// annual populations over 1995-2015.
pub fn normalize_flow(flow: f64, population: &PopulationSeries) -> Result<f64, FlowError> {
    let mean = population
        .mean()
        .ok_or(FlowError::EmptyPopulation(population.country))?;
    Ok(flow / mean * 1e6)
}

/// One record per (origin, OECD destination) ordered pair over the corpus,
/// origin != destination, in canonical (origin, destination) order. Pairs
/// without enough stock data become zero-flow records with `defined: false`.
pub fn build_flow_matrix(
    corpus: &Corpus,
    estimator: FlowEstimator,
) -> Result<Vec<FlowRecord>, FlowError> {
    let mut out = Vec::new();
    for origin in corpus.profiles.keys() {
        for destination in &corpus.oecd_members {
            if origin == destination {
                continue;
            }
            let stocks = corpus.stock_series(*origin, *destination);
            let (flow, defined) = match estimate_annual_flow(&stocks, estimator) {
                Some(f) => (f, true),
                None => (0.0, false),
            };
            out.push(FlowRecord {
                origin: *origin,
                destination: *destination,
                avg_annual_flow: flow,
                per_million_host: normalize_flow(flow, &corpus.populations[destination])?,
                per_million_origin: normalize_flow(flow, &corpus.populations[origin])?,
                defined,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn series(pairs: &[(u16, f64)]) -> BTreeMap<u16, f64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn positive_diff_rule_worked_example() {
        let stocks = series(&[
            (1995, 100.0),
            (2000, 150.0),
            (2005, 150.0),
            (2010, 130.0),
            (2015, 190.0),
        ]);
        // (50 + 0 + 0 + 60) / 20
        let flow = estimate_annual_flow(&stocks, FlowEstimator::PositiveDiff).unwrap();
        assert_abs_diff_eq!(flow, 5.5);
    }

    #[test]
    fn constant_stock_gives_zero_flow() {
        let stocks = series(&[(1995, 80.0), (2000, 80.0), (2005, 80.0), (2015, 80.0)]);
        assert_eq!(
            estimate_annual_flow(&stocks, FlowEstimator::PositiveDiff),
            Some(0.0)
        );
    }

    #[test]
    fn two_waves_span_their_gap() {
        let stocks = series(&[(1995, 0.0), (2015, 2000.0)]);
        assert_eq!(
            estimate_annual_flow(&stocks, FlowEstimator::PositiveDiff),
            Some(100.0)
        );
    }

    #[test]
    fn single_wave_is_undefined() {
        let stocks = series(&[(2010, 500.0)]);
        assert_eq!(
            estimate_annual_flow(&stocks, FlowEstimator::PositiveDiff),
            None
        );
        assert_eq!(estimate_annual_flow(&BTreeMap::new(), FlowEstimator::PositiveDiff), None);
    }

    #[test]
    fn off_wave_years_are_ignored() {
        let stocks = series(&[(1995, 100.0), (2003, 1e9), (2015, 300.0)]);
        assert_eq!(
            estimate_annual_flow(&stocks, FlowEstimator::PositiveDiff),
            Some(10.0)
        );
    }

    #[test]
    fn signed_diff_telescopes_and_floors() {
        let stocks = series(&[
            (1995, 100.0),
            (2000, 150.0),
            (2005, 150.0),
            (2010, 130.0),
            (2015, 190.0),
        ]);
        // (190 - 100) / 20
        let flow = estimate_annual_flow(&stocks, FlowEstimator::SignedDiff).unwrap();
        assert_abs_diff_eq!(flow, 4.5);

        let declining = series(&[(1995, 500.0), (2015, 100.0)]);
        assert_eq!(
            estimate_annual_flow(&declining, FlowEstimator::SignedDiff),
            Some(0.0)
        );
    }

    #[test]
    fn normalization_worked_example() {
        let mut by_year = BTreeMap::new();
        for y in 1995..=2015 {
            by_year.insert(y, 2_750_000.0);
        }
        let pop = PopulationSeries {
            country: CountryCode::new("AAA").unwrap(),
            by_year,
        };
        assert_abs_diff_eq!(normalize_flow(5.5, &pop).unwrap(), 2.0);
        assert_eq!(normalize_flow(0.0, &pop).unwrap(), 0.0);
    }

    #[test]
    fn empty_population_errors() {
        let pop = PopulationSeries {
            country: CountryCode::new("AAA").unwrap(),
            by_year: BTreeMap::new(),
        };
        assert!(normalize_flow(1.0, &pop).is_err());
    }
}
