//! Battery behaviour on constructed corpora: sparse-rule application,
//! partition totality, and direction-median consistency.

use std::collections::{BTreeMap, BTreeSet};

use cultmig::analysis::{
    group_by_proximity, Analysis, AnalysisConfig, Direction, PairMatrix, ProximityClass,
    SparseMerge, ThresholdMode,
};
use cultmig::country::CountryCode;
use cultmig::culture::CultureProfile;
use cultmig::geodesy::{CapitalRegistry, GeoPoint};
use cultmig::ingest::{Corpus, PopulationSeries, StockRecord};

fn code(s: &str) -> CountryCode {
    CountryCode::new(s).unwrap()
}

/// A small synthetic world: three cultural blocs (varying pdi and uai
/// together) giving clean close / mid / distant splits from the focal
/// country `AAA` under the published thresholds: within-bloc distances are
/// tiny, bloc gaps are sqrt(2) times the pdi gap.
fn bloc_corpus() -> Corpus {
    let spec: &[(&str, f64, bool)] = &[
        ("AAA", 10.0, true), // focal host
        ("ABB", 12.0, true),
        ("ABC", 14.0, true),
        ("ABD", 16.0, false),
        ("ABE", 18.0, false),
        ("BAA", 55.0, true),
        ("BAB", 57.0, false),
        ("BAC", 59.0, false),
        ("BAD", 61.0, false),
        ("CAA", 62.0, true),
        ("CAB", 94.0, false),
        ("CAC", 96.0, false),
        ("CAD", 98.0, false),
    ];
    let mut profiles = BTreeMap::new();
    let mut capitals = CapitalRegistry::new();
    let mut populations = BTreeMap::new();
    let mut oecd = BTreeSet::new();
    for (i, &(name, pdi, is_oecd)) in spec.iter().enumerate() {
        let c = code(name);
        profiles.insert(
            c,
            CultureProfile::new(c, [pdi, 50.0, 50.0, pdi, 50.0, 50.0]).unwrap(),
        );
        capitals.insert(
            c,
            name.to_string(),
            GeoPoint::new(5.0 * i as f64 - 30.0, 10.0 * i as f64 - 60.0).unwrap(),
        );
        populations.insert(
            c,
            PopulationSeries {
                country: c,
                by_year: (1995..=2015).map(|y| (y, 1.0e6)).collect(),
            },
        );
        if is_oecd {
            oecd.insert(c);
        }
    }
    // inflows into AAA: close origins big and growing, distant zero
    let mut stocks = Vec::new();
    for &(name, pdi, _) in spec.iter().skip(1) {
        let origin = code(name);
        let base = if pdi < 30.0 {
            50_000.0
        } else if pdi < 70.0 {
            5_000.0
        } else {
            0.0
        };
        for (i, year) in [1995u16, 2000, 2005, 2010, 2015].iter().enumerate() {
            stocks.push(StockRecord {
                origin,
                destination: code("AAA"),
                year: *year,
                stock: base * (1.0 + i as f64 * 0.25),
            });
        }
    }
    stocks.sort_by_key(|r| (r.origin, r.destination, r.year));
    Corpus {
        profiles,
        capitals,
        stocks,
        populations,
        oecd_members: oecd,
    }
}

#[test]
fn partition_totality_and_constructed_direction() {
    let corpus = bloc_corpus();
    let analysis = Analysis::run(
        &corpus,
        AnalysisConfig {
            threshold_mode: ThresholdMode::Paper,
            ..AnalysisConfig::default()
        },
    )
    .unwrap();

    // every counterpart of the focal country lands in exactly one group
    let focal = code("AAA");
    let counterparts: Vec<(CountryCode, f64)> = corpus
        .countries()
        .filter(|c| *c != focal)
        .map(|c| (c, 1.0))
        .collect();
    let groups = group_by_proximity(focal, &counterparts, &analysis.pairs, false);
    assert_eq!(
        groups.close.len() + groups.mid.len() + groups.distant.len(),
        counterparts.len()
    );

    // close origins send everything, distant origins nothing: the
    // immigration battery must point toward close with agreeing medians
    let result = analysis.immigration_bias_test(focal).unwrap();
    assert_eq!(result.direction, Direction::TowardClose);
    let med = result.medians;
    assert!(med.close.unwrap() > med.distant.unwrap());
}

#[test]
fn sparse_rule_merges_mid_into_thin_extreme() {
    let corpus = bloc_corpus();
    let pairs = PairMatrix::compute(&corpus, ThresholdMode::Paper).unwrap();
    // under the published thresholds the focal country sees exactly 3
    // distant counterparts (the pdi >= 94 bloc), triggering the merge
    let focal = code("AAA");
    let counterparts: Vec<(CountryCode, f64)> = corpus
        .countries()
        .filter(|c| *c != focal)
        .map(|c| (c, 1.0))
        .collect();
    let with_rule = group_by_proximity(focal, &counterparts, &pairs, true);
    assert_eq!(with_rule.sparse_applied, Some(SparseMerge::MidIntoDistant));
    assert!(with_rule.mid.is_empty());
    let without_rule = group_by_proximity(focal, &counterparts, &pairs, false);
    assert_eq!(without_rule.sparse_applied, None);
    assert_eq!(
        with_rule.distant.len(),
        without_rule.distant.len() + without_rule.mid.len()
    );
    // pre-merge medians are preserved for reporting either way
    assert_eq!(with_rule.medians, without_rule.medians);
}

#[test]
fn pinned_thresholds_echo_the_published_cutoffs() {
    let corpus = bloc_corpus();
    let pairs = PairMatrix::compute(&corpus, ThresholdMode::Paper).unwrap();
    assert_eq!(pairs.thresholds.close_max, 61.6);
    assert_eq!(pairs.thresholds.distant_min, 93.4);
}

#[test]
fn proximity_classes_follow_pdi_blocs() {
    let corpus = bloc_corpus();
    let pairs = PairMatrix::compute(&corpus, ThresholdMode::Paper).unwrap();
    assert_eq!(pairs.class(code("AAA"), code("ABB")), ProximityClass::Close);
    assert_eq!(
        pairs.class(code("AAA"), code("BAC")),
        ProximityClass::MidDistant
    );
    assert_eq!(pairs.class(code("AAA"), code("CAD")), ProximityClass::Distant);
}

#[test]
fn all_zero_inflow_is_not_significant_by_construction() {
    let mut corpus = bloc_corpus();
    corpus.stocks.clear(); // no migration anywhere
    let analysis = Analysis::run(&corpus, AnalysisConfig::default()).unwrap();
    let sig = analysis
        .migration_significance_test(code("AAA"), cultmig::analysis::FlowSide::Inflow)
        .unwrap();
    assert!(!sig.significant);
    assert!(sig.test.is_none());
}

#[test]
fn undefined_flows_are_flagged_zero_records() {
    let mut corpus = bloc_corpus();
    corpus.stocks.clear();
    let analysis = Analysis::run(&corpus, AnalysisConfig::default()).unwrap();
    assert!(analysis.flows.iter().all(|f| !f.defined));
    assert!(analysis.flows.iter().all(|f| f.avg_annual_flow == 0.0));
    // 5 OECD hosts x 12 counterpart origins... minus OECD self-pairs:
    // origins = all 13 countries except the host itself
    let hosts = corpus.oecd_members.len();
    let expected = hosts * (corpus.profiles.len() - 1);
    assert_eq!(analysis.flows.len(), expected);
}
