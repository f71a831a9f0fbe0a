//! Loading and validation of the four input tables: culture scores,
//! capitals, bilateral migrant stocks, and population series.
//!
//! All files are plain CSV with headers; see the repository `data/`
//! directory for the bundled datasets. Loaders are deterministic and
//! independent of input row order: everything is keyed by country code.

pub mod worldbank;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::country::CountryCode;
use crate::culture::{apply_overrides, CultureError, CultureProfile, ProfileOverride};
use crate::flows::WAVE_YEARS;
use crate::geodesy::{CapitalRegistry, GeoPoint, GeodesyError};

/// Environment variable overriding the default data directory.
pub const DATA_DIR_ENV: &str = "CULTMIG_DATA_DIR";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}: duplicate entry for {country}")]
    Duplicate { path: PathBuf, country: CountryCode },
    #[error(transparent)]
    Culture(#[from] CultureError),
    #[error(transparent)]
    Geodesy(#[from] GeodesyError),
    #[error("capitals file missing analysed countries: {0:?}")]
    MissingCapitals(Vec<CountryCode>),
    #[error("corpus validation failed: {0:?}")]
    CorpusInvalid(Vec<String>),
}

impl IngestError {
    fn parse(path: &Path, line: u64, message: impl Into<String>) -> Self {
        IngestError::Parse {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }
}

/// Resolves the data directory: explicit argument, then `CULTMIG_DATA_DIR`,
/// then `./data`.
pub fn resolve_data_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Ok(env) = std::env::var(DATA_DIR_ENV) {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    PathBuf::from("data")
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, IngestError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => IngestError::Io {
                path: path.to_path_buf(),
                source,
            },
            other => IngestError::parse(path, 0, format!("{other:?}")),
        })
}

/// Result of loading the culture table: complete profiles plus the rows that
/// were rejected for missing dimensions (e.g. a country with a blank cell).
#[derive(Debug, Clone)]
pub struct HofstedeTable {
    pub profiles: BTreeMap<CountryCode, CultureProfile>,
    pub excluded: Vec<(CountryCode, String)>,
}

#[derive(Debug, Deserialize)]
struct HofstedeRow {
    country_code: String,
    pdi: Option<f64>,
    idv: Option<f64>,
    mas: Option<f64>,
    uai: Option<f64>,
    ltowvs: Option<f64>,
    ivr: Option<f64>,
}

/// Loads `hofstede.csv` (`country_code,pdi,idv,mas,uai,ltowvs,ivr`; blank
/// cells mark missing scores). Rows with any missing dimension are excluded
/// with a named diagnostic; out-of-range scores and duplicate countries are
/// hard errors.
pub fn load_hofstede(path: &Path) -> Result<HofstedeTable, IngestError> {
    let mut reader = open_reader(path)?;
    let mut profiles = BTreeMap::new();
    let mut excluded = Vec::new();
    for (idx, row) in reader.deserialize::<HofstedeRow>().enumerate() {
        let line = idx as u64 + 2;
        let row = row.map_err(|e| IngestError::parse(path, line, e.to_string()))?;
        let country = row
            .country_code
            .parse::<CountryCode>()
            .map_err(|e| IngestError::parse(path, line, e.to_string()))?;
        let cells = [row.pdi, row.idv, row.mas, row.uai, row.ltowvs, row.ivr];
        if cells.iter().any(|c| c.is_none()) {
            let missing: Vec<&str> = ["pdi", "idv", "mas", "uai", "ltowvs", "ivr"]
                .iter()
                .zip(&cells)
                .filter(|(_, c)| c.is_none())
                .map(|(n, _)| *n)
                .collect();
            excluded.push((country, format!("missing {}", missing.join(", "))));
            continue;
        }
        let scores = cells.map(|c| c.expect("checked above"));
        let profile = CultureProfile::new(country, scores)?;
        if profiles.insert(country, profile).is_some() {
            return Err(IngestError::Duplicate {
                path: path.to_path_buf(),
                country,
            });
        }
    }
    Ok(HofstedeTable { profiles, excluded })
}

#[derive(Debug, Deserialize)]
struct CapitalRow {
    country_code: String,
    capital_name: String,
    lat_deg: f64,
    lon_deg: f64,
}

/// Loads `capitals.csv` and checks it covers every country in `expected`.
pub fn load_capitals(
    path: &Path,
    expected: &BTreeSet<CountryCode>,
) -> Result<CapitalRegistry, IngestError> {
    let mut reader = open_reader(path)?;
    let mut registry = CapitalRegistry::new();
    for (idx, row) in reader.deserialize::<CapitalRow>().enumerate() {
        let line = idx as u64 + 2;
        let row = row.map_err(|e| IngestError::parse(path, line, e.to_string()))?;
        let country = row
            .country_code
            .parse::<CountryCode>()
            .map_err(|e| IngestError::parse(path, line, e.to_string()))?;
        if registry.get(country).is_some() {
            return Err(IngestError::Duplicate {
                path: path.to_path_buf(),
                country,
            });
        }
        let point = GeoPoint::new(row.lat_deg, row.lon_deg)?;
        registry.insert(country, row.capital_name, point);
    }
    let missing: Vec<CountryCode> = expected
        .iter()
        .filter(|c| registry.get(**c).is_none())
        .copied()
        .collect();
    if !missing.is_empty() {
        return Err(IngestError::MissingCapitals(missing));
    }
    Ok(registry)
}

/// One bilateral migrant-stock observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StockRecord {
    pub origin: CountryCode,
    pub destination: CountryCode,
    pub year: u16,
    pub stock: f64,
}

#[derive(Debug, Clone)]
pub struct StockTable {
    pub records: Vec<StockRecord>,
    /// Rows referencing countries outside the analysed set (the source
    /// matrix covers far more territories than the analysis).
    pub dropped_unknown: usize,
}

#[derive(Debug, Deserialize)]
struct StockRow {
    origin_code: String,
    dest_code: String,
    year: u16,
    stock: f64,
}

/// Loads `un_stock.csv`, keeping records for known countries and the five
/// census waves. Unknown countries are dropped (counted); self-pairs,
/// off-wave years and negative stocks are errors.
pub fn load_migrant_stock(
    path: &Path,
    known: &BTreeSet<CountryCode>,
) -> Result<StockTable, IngestError> {
    let mut reader = open_reader(path)?;
    let mut records = Vec::new();
    let mut dropped = 0usize;
    for (idx, row) in reader.deserialize::<StockRow>().enumerate() {
        let line = idx as u64 + 2;
        let row = row.map_err(|e| IngestError::parse(path, line, e.to_string()))?;
        let origin = row
            .origin_code
            .parse::<CountryCode>()
            .map_err(|e| IngestError::parse(path, line, e.to_string()))?;
        let destination = row
            .dest_code
            .parse::<CountryCode>()
            .map_err(|e| IngestError::parse(path, line, e.to_string()))?;
        if !WAVE_YEARS.contains(&row.year) {
            return Err(IngestError::parse(
                path,
                line,
                format!("year {} outside the census waves {WAVE_YEARS:?}", row.year),
            ));
        }
        if origin == destination {
            return Err(IngestError::parse(
                path,
                line,
                format!("self-pair {origin} -> {destination}"),
            ));
        }
        if !(row.stock >= 0.0) || !row.stock.is_finite() {
            return Err(IngestError::parse(
                path,
                line,
                format!("negative or non-finite stock {}", row.stock),
            ));
        }
        if !known.contains(&origin) || !known.contains(&destination) {
            dropped += 1;
            continue;
        }
        records.push(StockRecord {
            origin,
            destination,
            year: row.year,
            stock: row.stock,
        });
    }
    records.sort_by_key(|r| (r.origin, r.destination, r.year));
    Ok(StockTable {
        records,
        dropped_unknown: dropped,
    })
}

/// Annual population of one country over 1995-2015.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationSeries {
    pub country: CountryCode,
    pub by_year: BTreeMap<u16, f64>,
}

impl PopulationSeries {
    /// Arithmetic mean of the available annual values; missing years are
    /// skipped, not interpolated.
    pub fn mean(&self) -> Option<f64> {
        if self.by_year.is_empty() {
            return None;
        }
        Some(self.by_year.values().sum::<f64>() / self.by_year.len() as f64)
    }
}

#[derive(Debug, Clone)]
pub struct PopulationTable {
    pub series: BTreeMap<CountryCode, PopulationSeries>,
    pub dropped_unknown: usize,
}

#[derive(Debug, Deserialize)]
struct PopulationRow {
    country_code: String,
    year: u16,
    population: f64,
}

/// Loads `population.csv` (`country_code,year,population`); zero or negative
/// populations are errors, countries outside the analysed set are dropped
/// with a count.
pub fn load_population(
    path: &Path,
    known: &BTreeSet<CountryCode>,
) -> Result<PopulationTable, IngestError> {
    let mut reader = open_reader(path)?;
    let mut series: BTreeMap<CountryCode, PopulationSeries> = BTreeMap::new();
    let mut dropped = 0usize;
    for (idx, row) in reader.deserialize::<PopulationRow>().enumerate() {
        let line = idx as u64 + 2;
        let row = row.map_err(|e| IngestError::parse(path, line, e.to_string()))?;
        let country = row
            .country_code
            .parse::<CountryCode>()
            .map_err(|e| IngestError::parse(path, line, e.to_string()))?;
        if !(row.population > 0.0) || !row.population.is_finite() {
            return Err(IngestError::parse(
                path,
                line,
                format!("population {} must be positive", row.population),
            ));
        }
        if !(1995..=2015).contains(&row.year) {
            return Err(IngestError::parse(
                path,
                line,
                format!("year {} outside 1995-2015", row.year),
            ));
        }
        if !known.contains(&country) {
            dropped += 1;
            continue;
        }
        series
            .entry(country)
            .or_insert_with(|| PopulationSeries {
                country,
                by_year: BTreeMap::new(),
            })
            .by_year
            .insert(row.year, row.population);
    }
    Ok(PopulationTable {
        series,
        dropped_unknown: dropped,
    })
}

/// Loads `oecd.txt` (one country code per line).
pub fn load_oecd(path: &Path) -> Result<BTreeSet<CountryCode>, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let code = line
            .parse::<CountryCode>()
            .map_err(|e| IngestError::parse(path, idx as u64 + 1, e.to_string()))?;
        out.insert(code);
    }
    Ok(out)
}

/// The validated analysis inputs.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub profiles: BTreeMap<CountryCode, CultureProfile>,
    pub capitals: CapitalRegistry,
    /// Sorted by (origin, destination, year); `stock_series` relies on it.
    pub stocks: Vec<StockRecord>,
    pub populations: BTreeMap<CountryCode, PopulationSeries>,
    pub oecd_members: BTreeSet<CountryCode>,
}

/// Diagnostics accumulated while loading a corpus.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LoadDiagnostics {
    pub excluded_profiles: Vec<String>,
    pub dropped_stock_rows: usize,
    pub dropped_population_rows: usize,
}

impl Corpus {
    /// Loads all input files from `dir` and applies the profile overrides.
    pub fn load(
        dir: &Path,
        overrides: &[ProfileOverride],
    ) -> Result<(Corpus, LoadDiagnostics), IngestError> {
        let table = load_hofstede(&dir.join("hofstede.csv"))?;
        let mut profiles = table.profiles;
        apply_overrides(&mut profiles, overrides)?;
        let countries: BTreeSet<CountryCode> = profiles.keys().copied().collect();

        let capitals = load_capitals(&dir.join("capitals.csv"), &countries)?;
        let stocks = load_migrant_stock(&dir.join("un_stock.csv"), &countries)?;
        let populations = load_population(&dir.join("population.csv"), &countries)?;
        let oecd_members = load_oecd(&dir.join("oecd.txt"))?;

        let diagnostics = LoadDiagnostics {
            excluded_profiles: table
                .excluded
                .iter()
                .map(|(c, why)| format!("{c}: {why}"))
                .collect(),
            dropped_stock_rows: stocks.dropped_unknown,
            dropped_population_rows: populations.dropped_unknown,
        };
        Ok((
            Corpus {
                profiles,
                capitals,
                stocks: stocks.records,
                populations: populations.series,
                oecd_members,
            },
            diagnostics,
        ))
    }

    pub fn countries(&self) -> impl Iterator<Item = CountryCode> + '_ {
        self.profiles.keys().copied()
    }

    pub fn non_oecd(&self) -> impl Iterator<Item = CountryCode> + '_ {
        self.profiles
            .keys()
            .copied()
            .filter(move |c| !self.oecd_members.contains(c))
    }

    /// The stock series for one ordered pair, keyed by wave year.
    pub fn stock_series(&self, origin: CountryCode, destination: CountryCode) -> BTreeMap<u16, f64> {
        let lo = self
            .stocks
            .partition_point(|r| (r.origin, r.destination) < (origin, destination));
        self.stocks[lo..]
            .iter()
            .take_while(|r| r.origin == origin && r.destination == destination)
            .map(|r| (r.year, r.stock))
            .collect()
    }
}

/// Counts reported by corpus validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub countries: usize,
    pub oecd_members: usize,
    pub non_oecd: usize,
    /// Directed non-OECD -> OECD pairs.
    pub non_oecd_to_oecd_pairs: usize,
    /// Directed OECD -> OECD pairs.
    pub oecd_to_oecd_pairs: usize,
    /// Total directed flow observations.
    pub total_flow_pairs: usize,
    /// Unordered country pairs involving at least one OECD member (the
    /// distance-summary universe).
    pub analysis_pair_universe: usize,
}

/// Checks the structural invariants: OECD membership and stock/population
/// references resolve against the profile set, every country has a capital
/// and a population series. With `strict_paper_shape`, additionally requires
/// the 93-country / 36-OECD shape of the study corpus.
pub fn validate_corpus(corpus: &Corpus, strict_paper_shape: bool) -> Result<CorpusStats, IngestError> {
    let mut problems = Vec::new();
    for code in corpus.profiles.keys() {
        if corpus.capitals.get(*code).is_none() {
            problems.push(format!("{code}: no capital"));
        }
        match corpus.populations.get(code) {
            None => problems.push(format!("{code}: no population series")),
            Some(series) if series.by_year.is_empty() => {
                problems.push(format!("{code}: empty population series"))
            }
            _ => {}
        }
    }
    for code in &corpus.oecd_members {
        if !corpus.profiles.contains_key(code) {
            problems.push(format!("{code}: OECD member without a profile"));
        }
    }
    for record in &corpus.stocks {
        if !corpus.profiles.contains_key(&record.origin)
            || !corpus.profiles.contains_key(&record.destination)
        {
            problems.push(format!(
                "stock record {} -> {} references unknown country",
                record.origin, record.destination
            ));
            break;
        }
    }

    let countries = corpus.profiles.len();
    let oecd = corpus.oecd_members.len();
    let non_oecd = countries - oecd;
    if strict_paper_shape {
        if countries != 93 {
            problems.push(format!("expected 93 countries, found {countries}"));
        }
        if oecd != 36 {
            problems.push(format!("expected 36 OECD members, found {oecd}"));
        }
    }
    if !problems.is_empty() {
        return Err(IngestError::CorpusInvalid(problems));
    }
    Ok(CorpusStats {
        countries,
        oecd_members: oecd,
        non_oecd,
        non_oecd_to_oecd_pairs: non_oecd * oecd,
        oecd_to_oecd_pairs: oecd * (oecd - 1),
        total_flow_pairs: non_oecd * oecd + oecd * (oecd - 1),
        analysis_pair_universe: non_oecd * oecd + oecd * (oecd - 1) / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn hofstede_loads_and_excludes_partial_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(
            dir.path(),
            "hofstede.csv",
            "country_code,pdi,idv,mas,uai,ltowvs,ivr\n\
             AAA,50,50,50,50,50,50\n\
             ISR,13,54,47,81,38,\n\
             BBB,10,20,30,40,50,60\n",
        );
        let table = load_hofstede(&path).unwrap();
        assert_eq!(table.profiles.len(), 2);
        assert_eq!(table.excluded.len(), 1);
        assert_eq!(table.excluded[0].0.as_str(), "ISR");
        assert!(table.excluded[0].1.contains("ivr"));
    }

    #[test]
    fn hofstede_range_violation_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(
            dir.path(),
            "hofstede.csv",
            "country_code,pdi,idv,mas,uai,ltowvs,ivr\nAAA,120,50,50,50,50,50\n",
        );
        assert!(matches!(
            load_hofstede(&path),
            Err(IngestError::Culture(CultureError::ScoreOutOfRange { .. }))
        ));
    }

    #[test]
    fn hofstede_duplicate_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(
            dir.path(),
            "hofstede.csv",
            "country_code,pdi,idv,mas,uai,ltowvs,ivr\n\
             AAA,50,50,50,50,50,50\nAAA,1,2,3,4,5,6\n",
        );
        assert!(matches!(
            load_hofstede(&path),
            Err(IngestError::Duplicate { .. })
        ));
    }

    #[test]
    fn capitals_range_and_coverage_checks() {
        let dir = tempfile::tempdir().unwrap();
        let expected: BTreeSet<CountryCode> =
            [CountryCode::new("AAA").unwrap(), CountryCode::new("BBB").unwrap()]
                .into_iter()
                .collect();

        let bad = write_file(
            dir.path(),
            "capitals_bad.csv",
            "country_code,capital_name,lat_deg,lon_deg\nXYZ,Nowhere,91.0,10.0\n",
        );
        assert!(matches!(
            load_capitals(&bad, &BTreeSet::new()),
            Err(IngestError::Geodesy(GeodesyError::InvalidCoordinate { .. }))
        ));

        let incomplete = write_file(
            dir.path(),
            "capitals_incomplete.csv",
            "country_code,capital_name,lat_deg,lon_deg\nAAA,Alpha,10.0,20.0\n",
        );
        assert!(matches!(
            load_capitals(&incomplete, &expected),
            Err(IngestError::MissingCapitals(_))
        ));

        let ok = write_file(
            dir.path(),
            "capitals_ok.csv",
            "country_code,capital_name,lat_deg,lon_deg\n\
             AAA,Alpha,10.0,20.0\nBBB,Beta,-5.0,30.0\n",
        );
        let registry = load_capitals(&ok, &expected).unwrap();
        assert_eq!(registry.len(), 2);
    }

    #[test]
    fn stock_filters_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let known: BTreeSet<CountryCode> =
            [CountryCode::new("MEX").unwrap(), CountryCode::new("USA").unwrap()]
                .into_iter()
                .collect();
        let ok = write_file(
            dir.path(),
            "stock.csv",
            "origin_code,dest_code,year,stock\n\
             MEX,USA,2010,11711103\n\
             ZZZ,USA,2010,5\n",
        );
        let table = load_migrant_stock(&ok, &known).unwrap();
        assert_eq!(table.records.len(), 1);
        assert_eq!(table.dropped_unknown, 1);
        assert_eq!(table.records[0].stock, 11_711_103.0);

        let off_wave = write_file(
            dir.path(),
            "stock_badyear.csv",
            "origin_code,dest_code,year,stock\nMEX,USA,2003,10\n",
        );
        assert!(load_migrant_stock(&off_wave, &known).is_err());

        let self_pair = write_file(
            dir.path(),
            "stock_self.csv",
            "origin_code,dest_code,year,stock\nUSA,USA,2010,10\n",
        );
        assert!(load_migrant_stock(&self_pair, &known).is_err());

        let negative = write_file(
            dir.path(),
            "stock_neg.csv",
            "origin_code,dest_code,year,stock\nMEX,USA,2010,-1\n",
        );
        assert!(load_migrant_stock(&negative, &known).is_err());
    }

    #[test]
    fn stock_loading_is_row_order_independent() {
        let dir = tempfile::tempdir().unwrap();
        let known: BTreeSet<CountryCode> =
            [CountryCode::new("MEX").unwrap(), CountryCode::new("USA").unwrap()]
                .into_iter()
                .collect();
        let a = write_file(
            dir.path(),
            "a.csv",
            "origin_code,dest_code,year,stock\n\
             MEX,USA,2010,100\nMEX,USA,1995,50\nUSA,MEX,2000,7\n",
        );
        let b = write_file(
            dir.path(),
            "b.csv",
            "origin_code,dest_code,year,stock\n\
             USA,MEX,2000,7\nMEX,USA,1995,50\nMEX,USA,2010,100\n",
        );
        let ta = load_migrant_stock(&a, &known).unwrap();
        let tb = load_migrant_stock(&b, &known).unwrap();
        assert_eq!(ta.records, tb.records);
    }

    #[test]
    fn population_validation() {
        let dir = tempfile::tempdir().unwrap();
        let known: BTreeSet<CountryCode> =
            [CountryCode::new("AAA").unwrap()].into_iter().collect();
        let ok = write_file(
            dir.path(),
            "pop.csv",
            "country_code,year,population\nAAA,1995,1000\nAAA,1996,1010\nZZZ,1995,5\n",
        );
        let table = load_population(&ok, &known).unwrap();
        assert_eq!(table.series.len(), 1);
        assert_eq!(table.dropped_unknown, 1);

        let zero = write_file(
            dir.path(),
            "pop_zero.csv",
            "country_code,year,population\nAAA,1995,0\n",
        );
        assert!(load_population(&zero, &known).is_err());
    }

    #[test]
    fn data_dir_resolution_prefers_explicit() {
        let explicit = PathBuf::from("/tmp/explicit");
        assert_eq!(resolve_data_dir(Some(&explicit)), explicit);
    }
}
