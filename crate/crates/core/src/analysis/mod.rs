//! Cultural-proximity stratification of country pairs and the per-country
//! hypothesis batteries, plus assembly of the report datasets.

pub mod report;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::country::CountryCode;
use crate::culture::cultural_distance;
use crate::flows::{build_flow_matrix, FlowError, FlowEstimator, FlowRecord};
use crate::geodesy::{GeodesyError, WGS84};
use crate::ingest::{validate_corpus, Corpus, CorpusStats, IngestError};
use crate::npstat::{
    mann_whitney_u, quantile, robust_summary, wilcoxon_signed_rank, Alternative, NpStatError,
    RobustSummary, TestResult,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("pair sample has {found} entries, expected {expected}")]
    WrongCorpusSize { expected: usize, found: usize },
    #[error("degenerate stratification: both quartiles equal {0}")]
    DegenerateThresholds(f64),
    #[error("invalid thresholds: close_max {close_max} must be below distant_min {distant_min}")]
    InvalidThresholds { close_max: f64, distant_min: f64 },
    #[error(transparent)]
    Stats(#[from] NpStatError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Geodesy(#[from] GeodesyError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

/// Cultural-distance cutoffs: at or below `close_max` a pair is culturally
/// close, above `distant_min` it is culturally distant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProximityThresholds {
    pub close_max: f64,
    pub distant_min: f64,
}

impl ProximityThresholds {
    pub fn new(close_max: f64, distant_min: f64) -> Result<Self, AnalysisError> {
        if !(close_max > 0.0) || !(close_max < distant_min) {
            return Err(AnalysisError::InvalidThresholds {
                close_max,
                distant_min,
            });
        }
        Ok(ProximityThresholds {
            close_max,
            distant_min,
        })
    }
}

/// Published cutoffs for strict replication runs.
pub const PAPER_THRESHOLDS: ProximityThresholds = ProximityThresholds {
    close_max: 61.6,
    distant_min: 93.4,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Quartiles of the corpus's pairwise cultural distances.
    Recompute,
    /// The published 61.6 / 93.4 cutoffs.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProximityClass {
    Close,
    MidDistant,
    Distant,
}

impl ProximityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProximityClass::Close => "close",
            ProximityClass::MidDistant => "mid_distant",
            ProximityClass::Distant => "distant",
        }
    }
}

/// Close is closed at the threshold (`cd <= close_max`), distant open from
/// below (`cd > distant_min`).
pub fn classify_proximity(cd: f64, thresholds: &ProximityThresholds) -> ProximityClass {
    if cd <= thresholds.close_max {
        ProximityClass::Close
    } else if cd > thresholds.distant_min {
        ProximityClass::Distant
    } else {
        ProximityClass::MidDistant
    }
}

/// Quartile thresholds from the pairwise cultural-distance sample. The
/// sample is every unordered pair involving at least one OECD member; the
/// expected size is checked so a truncated corpus is caught early.
pub fn stratification_thresholds(
    pair_cds: &[f64],
    expected_len: usize,
) -> Result<ProximityThresholds, AnalysisError> {
    if pair_cds.len() != expected_len {
        return Err(AnalysisError::WrongCorpusSize {
            expected: expected_len,
            found: pair_cds.len(),
        });
    }
    let close_max = quantile(pair_cds, 0.25)?;
    let distant_min = quantile(pair_cds, 0.75)?;
    if close_max == distant_min {
        return Err(AnalysisError::DegenerateThresholds(close_max));
    }
    ProximityThresholds::new(close_max, distant_min)
}

/// Cultural and geodesic distance plus proximity class for one unordered
/// country pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountryPairMetrics {
    pub country_a: CountryCode,
    pub country_b: CountryCode,
    pub cd: f64,
    pub gd_km: f64,
    pub proximity: ProximityClass,
}

/// All pairwise distances over the corpus with the active thresholds.
#[derive(Debug, Clone)]
pub struct PairMatrix {
    cd: BTreeMap<(CountryCode, CountryCode), f64>,
    gd_km: BTreeMap<(CountryCode, CountryCode), f64>,
    pub thresholds: ProximityThresholds,
}

fn ordered(a: CountryCode, b: CountryCode) -> (CountryCode, CountryCode) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl PairMatrix {
    /// Computes every pairwise cultural and geodesic distance and fixes the
    /// thresholds per `mode`.
    pub fn compute(corpus: &Corpus, mode: ThresholdMode) -> Result<Self, AnalysisError> {
        let codes: Vec<CountryCode> = corpus.countries().collect();
        let solver = WGS84.solver();
        let mut cd = BTreeMap::new();
        let mut gd_km = BTreeMap::new();
        for (i, &a) in codes.iter().enumerate() {
            for &b in &codes[i + 1..] {
                cd.insert((a, b), cultural_distance(&corpus.profiles[&a], &corpus.profiles[&b]));
                gd_km.insert((a, b), corpus.capitals.capital_distance_km(&solver, a, b)?);
            }
        }
        let oecd = &corpus.oecd_members;
        let universe: Vec<f64> = cd
            .iter()
            .filter(|((a, b), _)| oecd.contains(a) || oecd.contains(b))
            .map(|(_, v)| *v)
            .collect();
        let n = codes.len();
        let n_oecd = oecd.len();
        let expected = n_oecd * (n - n_oecd) + n_oecd * (n_oecd - 1) / 2;
        let thresholds = match mode {
            ThresholdMode::Recompute => stratification_thresholds(&universe, expected)?,
            ThresholdMode::Paper => PAPER_THRESHOLDS,
        };
        Ok(PairMatrix {
            cd,
            gd_km,
            thresholds,
        })
    }

    pub fn cd(&self, a: CountryCode, b: CountryCode) -> f64 {
        self.cd[&ordered(a, b)]
    }

    pub fn gd_km(&self, a: CountryCode, b: CountryCode) -> f64 {
        self.gd_km[&ordered(a, b)]
    }

    pub fn class(&self, a: CountryCode, b: CountryCode) -> ProximityClass {
        classify_proximity(self.cd(a, b), &self.thresholds)
    }

    pub fn metrics(&self, a: CountryCode, b: CountryCode) -> CountryPairMetrics {
        let (a, b) = ordered(a, b);
        CountryPairMetrics {
            country_a: a,
            country_b: b,
            cd: self.cd(a, b),
            gd_km: self.gd_km(a, b),
            proximity: self.class(a, b),
        }
    }

    /// Unordered pairs involving at least one OECD member, the universe for
    /// the distance summaries and closest/most-distant tables.
    pub fn oecd_universe<'a>(
        &'a self,
        corpus: &'a Corpus,
    ) -> impl Iterator<Item = ((CountryCode, CountryCode), f64, f64)> + 'a {
        self.cd.iter().filter_map(move |(&(a, b), &cd)| {
            if corpus.oecd_members.contains(&a) || corpus.oecd_members.contains(&b) {
                Some(((a, b), cd, self.gd_km[&(a, b)]))
            } else {
                None
            }
        })
    }
}

/// Which extreme absorbed the mid-distant group under the sparse rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SparseMerge {
    MidIntoClose,
    MidIntoDistant,
}

/// A focal country's counterpart values split by proximity class.
#[derive(Debug, Clone, PartialEq)]
pub struct Groups {
    pub close: Vec<f64>,
    pub mid: Vec<f64>,
    pub distant: Vec<f64>,
    /// Medians of the original, pre-merge groups.
    pub medians: GroupMedians,
    pub sparse_applied: Option<SparseMerge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupMedians {
    pub close: Option<f64>,
    pub mid: Option<f64>,
    pub distant: Option<f64>,
}

fn median_of(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(quantile(values, 0.5).expect("non-empty finite sample"))
    }
}

/// Partitions counterpart values by the focal country's proximity classes.
/// When the close or distant extreme has three or fewer observations and the
/// sparse rule is enabled, the mid-distant sample is merged into that
/// extreme (distant checked first).
pub fn group_by_proximity(
    focal: CountryCode,
    counterparts: &[(CountryCode, f64)],
    pairs: &PairMatrix,
    sparse_rule: bool,
) -> Groups {
    let mut close = Vec::new();
    let mut mid = Vec::new();
    let mut distant = Vec::new();
    for &(other, value) in counterparts {
        match pairs.class(focal, other) {
            ProximityClass::Close => close.push(value),
            ProximityClass::MidDistant => mid.push(value),
            ProximityClass::Distant => distant.push(value),
        }
    }
    let medians = GroupMedians {
        close: median_of(&close),
        mid: median_of(&mid),
        distant: median_of(&distant),
    };
    let mut sparse_applied = None;
    if sparse_rule {
        if distant.len() <= 3 {
            distant.append(&mut mid);
            sparse_applied = Some(SparseMerge::MidIntoDistant);
        } else if close.len() <= 3 {
            close.append(&mut mid);
            sparse_applied = Some(SparseMerge::MidIntoClose);
        }
    }
    Groups {
        close,
        mid,
        distant,
        medians,
        sparse_applied,
    }
}

/// Which group's values were significantly larger, if either.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    TowardClose,
    TowardDistant,
    None,
    /// An extreme group was empty even after the sparse rule; no test ran.
    NoTest,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::TowardClose => "toward_close",
            Direction::TowardDistant => "toward_distant",
            Direction::None => "none",
            Direction::NoTest => "no_test",
        }
    }
}

/// Outcome of one close-vs-distant battery for a focal country.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionalResult {
    pub focal: CountryCode,
    pub medians: GroupMedians,
    pub test: Option<TestResult>,
    pub direction: Direction,
    pub sparse_rule_applied: Option<SparseMerge>,
}

/// Runs both one-sided alternatives on (close, distant) and keeps the side
/// with the smaller p, labelling it a direction only below the 0.1 coding
/// level.
fn directional_test(
    focal: CountryCode,
    groups: &Groups,
) -> Result<DirectionalResult, AnalysisError> {
    if groups.close.is_empty() || groups.distant.is_empty() {
        return Ok(DirectionalResult {
            focal,
            medians: groups.medians,
            test: None,
            direction: Direction::NoTest,
            sparse_rule_applied: groups.sparse_applied,
        });
    }
    let greater = mann_whitney_u(&groups.close, &groups.distant, Alternative::Greater)?;
    let less = mann_whitney_u(&groups.close, &groups.distant, Alternative::Less)?;
    let (test, toward) = if greater.p_value <= less.p_value {
        (greater, Direction::TowardClose)
    } else {
        (less, Direction::TowardDistant)
    };
    let direction = if test.p_value < 0.1 { toward } else { Direction::None };
    Ok(DirectionalResult {
        focal,
        medians: groups.medians,
        test: Some(test),
        direction,
        sparse_rule_applied: groups.sparse_applied,
    })
}

/// Wilcoxon screen of a country's normalized flows against zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MigrationSignificance {
    pub country: CountryCode,
    pub test: Option<TestResult>,
    /// True when the one-sided signed-rank p is below the 0.1 coding level;
    /// an all-zero sample is not significant by construction.
    pub significant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowSide {
    Inflow,
    Outflow,
}

/// Runtime configuration for an analysis pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub estimator: FlowEstimator,
    pub threshold_mode: ThresholdMode,
    pub sparse_rule: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            estimator: FlowEstimator::PositiveDiff,
            threshold_mode: ThresholdMode::Recompute,
            sparse_rule: true,
        }
    }
}

/// A fully computed analysis over one corpus: distances, thresholds, flows,
/// and accessors for the per-country batteries.
pub struct Analysis<'c> {
    pub corpus: &'c Corpus,
    pub pairs: PairMatrix,
    pub flows: Vec<FlowRecord>,
    flow_index: BTreeMap<(CountryCode, CountryCode), usize>,
    pub config: AnalysisConfig,
    pub stats: CorpusStats,
}

impl<'c> Analysis<'c> {
    pub fn run(corpus: &'c Corpus, config: AnalysisConfig) -> Result<Self, AnalysisError> {
        let stats = validate_corpus(corpus, false)?;
        let pairs = PairMatrix::compute(corpus, config.threshold_mode)?;
        let flows = build_flow_matrix(corpus, config.estimator)?;
        let flow_index = flows
            .iter()
            .enumerate()
            .map(|(i, f)| ((f.origin, f.destination), i))
            .collect();
        Ok(Analysis {
            corpus,
            pairs,
            flows,
            flow_index,
            config,
            stats,
        })
    }

    pub fn flow(&self, origin: CountryCode, destination: CountryCode) -> Option<&FlowRecord> {
        self.flow_index
            .get(&(origin, destination))
            .map(|&i| &self.flows[i])
    }

    fn host_counterparts(&self, host: CountryCode) -> Vec<CountryCode> {
        self.corpus.countries().filter(|c| *c != host).collect()
    }

    /// Mann-Whitney comparison of the geodesic distances of a host's
    /// culturally close and distant counterparts. `TowardClose` means the
    /// close group is geodesically farther (a decreasing trend of distance
    /// in cultural similarity); `TowardDistant` the usual increasing trend.
    pub fn geodesic_trend_test(
        &self,
        host: CountryCode,
    ) -> Result<DirectionalResult, AnalysisError> {
        let counterparts: Vec<(CountryCode, f64)> = self
            .host_counterparts(host)
            .into_iter()
            .map(|c| (c, self.pairs.gd_km(host, c)))
            .collect();
        let groups =
            group_by_proximity(host, &counterparts, &self.pairs, self.config.sparse_rule);
        directional_test(host, &groups)
    }

    /// Bias of a host's normalized inflows toward culturally close or
    /// distant origins.
    pub fn immigration_bias_test(
        &self,
        host: CountryCode,
    ) -> Result<DirectionalResult, AnalysisError> {
        let counterparts: Vec<(CountryCode, f64)> = self
            .host_counterparts(host)
            .into_iter()
            .map(|c| {
                let flow = self.flow(c, host).map(|f| f.per_million_host).unwrap_or(0.0);
                (c, flow)
            })
            .collect();
        let groups =
            group_by_proximity(host, &counterparts, &self.pairs, self.config.sparse_rule);
        directional_test(host, &groups)
    }

    /// Bias of an origin's normalized outflows toward culturally close or
    /// distant OECD destinations.
    pub fn emigration_bias_test(
        &self,
        origin: CountryCode,
    ) -> Result<DirectionalResult, AnalysisError> {
        let counterparts: Vec<(CountryCode, f64)> = self
            .corpus
            .oecd_members
            .iter()
            .filter(|h| **h != origin)
            .map(|&h| {
                let flow = self
                    .flow(origin, h)
                    .map(|f| f.per_million_origin)
                    .unwrap_or(0.0);
                (h, flow)
            })
            .collect();
        let groups =
            group_by_proximity(origin, &counterparts, &self.pairs, self.config.sparse_rule);
        directional_test(origin, &groups)
    }

    /// One-sided signed-rank screen of a country's normalized flows against
    /// zero (alternative: greater).
    pub fn migration_significance_test(
        &self,
        country: CountryCode,
        side: FlowSide,
    ) -> Result<MigrationSignificance, AnalysisError> {
        let values: Vec<f64> = match side {
            FlowSide::Inflow => self
                .host_counterparts(country)
                .into_iter()
                .map(|o| self.flow(o, country).map(|f| f.per_million_host).unwrap_or(0.0))
                .collect(),
            FlowSide::Outflow => self
                .corpus
                .oecd_members
                .iter()
                .filter(|h| **h != country)
                .map(|&h| {
                    self.flow(country, h)
                        .map(|f| f.per_million_origin)
                        .unwrap_or(0.0)
                })
                .collect(),
        };
        match wilcoxon_signed_rank(&values, 0.0, Alternative::Greater) {
            Ok(test) => Ok(MigrationSignificance {
                country,
                significant: test.p_value < 0.1,
                test: Some(test),
            }),
            Err(NpStatError::DegenerateSample) => Ok(MigrationSignificance {
                country,
                test: None,
                significant: false,
            }),
            Err(e) => Err(e.into()),
        }
    }
}

/// One row of the closest / most-distant pair tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairTableRow {
    pub country_a: CountryCode,
    pub country_b: CountryCode,
    pub gd_km: f64,
    pub cd: f64,
}

/// Distance summaries over the analysis pair universe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceSummary {
    pub cultural: RobustSummary,
    pub geodesic_km: RobustSummary,
}

/// Builds the distance summary plus the 12 closest (ascending) and 12 most
/// distant (descending) pairs over the OECD-involving pair universe.
pub fn build_tables(
    analysis: &Analysis,
) -> Result<(DistanceSummary, Vec<PairTableRow>, Vec<PairTableRow>), AnalysisError> {
    let mut rows: Vec<PairTableRow> = analysis
        .pairs
        .oecd_universe(analysis.corpus)
        .map(|((a, b), cd, gd)| PairTableRow {
            country_a: a,
            country_b: b,
            gd_km: gd,
            cd,
        })
        .collect();
    let cds: Vec<f64> = rows.iter().map(|r| r.cd).collect();
    let gds: Vec<f64> = rows.iter().map(|r| r.gd_km).collect();
    let summary = DistanceSummary {
        cultural: robust_summary(&cds)?,
        geodesic_km: robust_summary(&gds)?,
    };
    rows.sort_by(|x, y| {
        x.cd.partial_cmp(&y.cd)
            .expect("finite distances")
            .then_with(|| (x.country_a, x.country_b).cmp(&(y.country_a, y.country_b)))
    });
    let closest: Vec<PairTableRow> = rows.iter().take(12).copied().collect();
    let most_distant: Vec<PairTableRow> = rows.iter().rev().take(12).copied().collect();
    Ok((summary, closest, most_distant))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_boundaries() {
        let t = ProximityThresholds::new(61.58, 93.38).unwrap();
        assert_eq!(classify_proximity(8.06, &t), ProximityClass::Close);
        assert_eq!(classify_proximity(61.58, &t), ProximityClass::Close);
        assert_eq!(classify_proximity(61.59, &t), ProximityClass::MidDistant);
        assert_eq!(classify_proximity(93.38, &t), ProximityClass::MidDistant);
        assert_eq!(classify_proximity(93.39, &t), ProximityClass::Distant);
        assert_eq!(classify_proximity(139.20, &t), ProximityClass::Distant);
    }

    #[test]
    fn threshold_monotonicity() {
        // raising close_max can only move pairs toward Close, never away
        let lo = ProximityThresholds::new(50.0, 95.0).unwrap();
        let hi = ProximityThresholds::new(60.0, 95.0).unwrap();
        for cd in [10.0, 49.9, 50.0, 55.0, 60.0, 61.0, 94.0, 96.0] {
            let before = classify_proximity(cd, &lo);
            let after = classify_proximity(cd, &hi);
            if before == ProximityClass::Close {
                assert_eq!(after, ProximityClass::Close);
            }
        }
    }

    #[test]
    fn stratification_checks_sample_size() {
        let err = stratification_thresholds(&[1.0, 2.0], 3).unwrap_err();
        assert!(matches!(err, AnalysisError::WrongCorpusSize { .. }));
    }

    #[test]
    fn stratification_rejects_degenerate_sample() {
        let sample = vec![50.0; 10];
        let err = stratification_thresholds(&sample, 10).unwrap_err();
        assert!(matches!(err, AnalysisError::DegenerateThresholds(_)));
    }

    #[test]
    fn stratification_is_order_independent() {
        let mut sample: Vec<f64> = (0..100).map(f64::from).collect();
        let a = stratification_thresholds(&sample, 100).unwrap();
        sample.reverse();
        sample.swap(3, 77);
        let b = stratification_thresholds(&sample, 100).unwrap();
        assert_eq!(a, b);
    }
}
