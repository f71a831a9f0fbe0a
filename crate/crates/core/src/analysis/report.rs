//! Report datasets (tables, figure data, grand medians) and the
//! deterministic file writers.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::analysis::{
    build_tables, Analysis, AnalysisConfig, AnalysisError, Direction, DistanceSummary, FlowSide,
    PairTableRow, ProximityClass, ProximityThresholds, SparseMerge,
};
use crate::country::CountryCode;
use crate::ingest::CorpusStats;
use crate::npstat::quantile;

/// One cell of the host x counterpart proximity matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProximityCell {
    pub host: CountryCode,
    pub counterpart: CountryCode,
    pub cd: f64,
    pub class: ProximityClass,
}

/// Per-host medians of counterpart geodesic distances by proximity group,
/// with the close-vs-distant trend test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeoTrendRow {
    pub host: CountryCode,
    pub median_close_km: Option<f64>,
    pub median_mid_km: Option<f64>,
    pub median_distant_km: Option<f64>,
    pub direction: Direction,
    pub p_value: Option<f64>,
    pub significance: Option<String>,
    pub sparse_rule_applied: Option<SparseMerge>,
}

/// Per-country medians of normalized flows by proximity group, with the
/// bias test and the flow-significance screen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasRow {
    pub country: CountryCode,
    pub median_close: Option<f64>,
    pub median_mid: Option<f64>,
    pub median_distant: Option<f64>,
    pub direction: Direction,
    pub p_value: Option<f64>,
    pub significance: Option<String>,
    pub sparse_rule_applied: Option<SparseMerge>,
    pub migration_significant: bool,
    pub migration_p: Option<f64>,
}

/// Pooled medians referenced as horizontal lines in the figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrandMedians {
    pub geodesic_close_km: f64,
    pub geodesic_mid_km: f64,
    pub geodesic_distant_km: f64,
    pub geodesic_grand_km: f64,
    pub inflow_close: f64,
    pub inflow_mid: f64,
    pub inflow_distant: f64,
    pub inflow_grand: f64,
    pub outflow_close: f64,
    pub outflow_mid: f64,
    pub outflow_distant: f64,
    pub outflow_grand: f64,
}

/// Everything the reproduction run emits.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub config_echo: AnalysisConfig,
    pub thresholds: ProximityThresholds,
    pub counts: CorpusStats,
    pub table1: DistanceSummary,
    pub table2: Vec<PairTableRow>,
    pub table3: Vec<PairTableRow>,
    pub grand_medians: GrandMedians,
    pub fig1: Vec<ProximityCell>,
    pub fig2: Vec<ProximityCell>,
    pub fig3: Vec<GeoTrendRow>,
    pub fig4: Vec<BiasRow>,
    pub fig5a: Vec<BiasRow>,
    pub fig5b: Vec<BiasRow>,
}

fn med(values: &[f64]) -> f64 {
    quantile(values, 0.5).expect("non-empty sample")
}

fn grand_medians(analysis: &Analysis) -> GrandMedians {
    let corpus = analysis.corpus;
    let mut geo: BTreeMap<ProximityClass, Vec<f64>> = BTreeMap::new();
    let mut geo_all = Vec::new();
    for ((a, b), _, gd) in analysis.pairs.oecd_universe(corpus) {
        geo.entry(analysis.pairs.class(a, b)).or_default().push(gd);
        geo_all.push(gd);
    }
    let mut inflow: BTreeMap<ProximityClass, Vec<f64>> = BTreeMap::new();
    let mut inflow_all = Vec::new();
    let mut outflow: BTreeMap<ProximityClass, Vec<f64>> = BTreeMap::new();
    let mut outflow_all = Vec::new();
    for f in &analysis.flows {
        let class = analysis.pairs.class(f.origin, f.destination);
        inflow.entry(class).or_default().push(f.per_million_host);
        inflow_all.push(f.per_million_host);
        // the outflow summary covers migrants leaving OECD countries
        if corpus.oecd_members.contains(&f.origin) {
            outflow.entry(class).or_default().push(f.per_million_origin);
            outflow_all.push(f.per_million_origin);
        }
    }
    let get = |m: &BTreeMap<ProximityClass, Vec<f64>>, k: ProximityClass| med(&m[&k]);
    GrandMedians {
        geodesic_close_km: get(&geo, ProximityClass::Close),
        geodesic_mid_km: get(&geo, ProximityClass::MidDistant),
        geodesic_distant_km: get(&geo, ProximityClass::Distant),
        geodesic_grand_km: med(&geo_all),
        inflow_close: get(&inflow, ProximityClass::Close),
        inflow_mid: get(&inflow, ProximityClass::MidDistant),
        inflow_distant: get(&inflow, ProximityClass::Distant),
        inflow_grand: med(&inflow_all),
        outflow_close: get(&outflow, ProximityClass::Close),
        outflow_mid: get(&outflow, ProximityClass::MidDistant),
        outflow_distant: get(&outflow, ProximityClass::Distant),
        outflow_grand: med(&outflow_all),
    }
}

fn sort_key(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::INFINITY)
}

/// Assembles the full report: tables, figure datasets and grand medians.
pub fn build_report(analysis: &Analysis) -> Result<AnalysisReport, AnalysisError> {
    let corpus = analysis.corpus;
    let hosts: Vec<CountryCode> = corpus.oecd_members.iter().copied().collect();
    let non_oecd: Vec<CountryCode> = corpus.non_oecd().collect();

    let (table1, table2, table3) = build_tables(analysis)?;

    let mut fig1 = Vec::new();
    for &h in &hosts {
        for &o in &non_oecd {
            fig1.push(ProximityCell {
                host: h,
                counterpart: o,
                cd: analysis.pairs.cd(h, o),
                class: analysis.pairs.class(h, o),
            });
        }
    }
    let mut fig2 = Vec::new();
    for &h in &hosts {
        for &o in &hosts {
            if h == o {
                continue;
            }
            fig2.push(ProximityCell {
                host: h,
                counterpart: o,
                cd: analysis.pairs.cd(h, o),
                class: analysis.pairs.class(h, o),
            });
        }
    }

    let mut fig3 = Vec::new();
    for &h in &hosts {
        let r = analysis.geodesic_trend_test(h)?;
        fig3.push(GeoTrendRow {
            host: h,
            median_close_km: r.medians.close,
            median_mid_km: r.medians.mid,
            median_distant_km: r.medians.distant,
            direction: r.direction,
            p_value: r.test.map(|t| t.p_value),
            significance: r.test.map(|t| t.significance.as_str().to_string()),
            sparse_rule_applied: r.sparse_rule_applied,
        });
    }
    // hosts ordered by their median geodesic distance from culturally close
    // countries
    fig3.sort_by(|a, b| {
        sort_key(a.median_close_km)
            .partial_cmp(&sort_key(b.median_close_km))
            .expect("finite medians")
            .then_with(|| a.host.cmp(&b.host))
    });

    let bias_row = |r: crate::analysis::DirectionalResult,
                    sig: crate::analysis::MigrationSignificance| BiasRow {
        country: r.focal,
        median_close: r.medians.close,
        median_mid: r.medians.mid,
        median_distant: r.medians.distant,
        direction: r.direction,
        p_value: r.test.map(|t| t.p_value),
        significance: r.test.map(|t| t.significance.as_str().to_string()),
        sparse_rule_applied: r.sparse_rule_applied,
        migration_significant: sig.significant,
        migration_p: sig.test.map(|t| t.p_value),
    };
    // countries ordered by the difference in medians of average migration
    // with respect to cultural distance (close minus distant, descending)
    let bias_order = |a: &BiasRow, b: &BiasRow| {
        let ka = a.median_close.unwrap_or(0.0) - a.median_distant.unwrap_or(0.0);
        let kb = b.median_close.unwrap_or(0.0) - b.median_distant.unwrap_or(0.0);
        kb.partial_cmp(&ka)
            .expect("finite medians")
            .then_with(|| a.country.cmp(&b.country))
    };

    let mut fig4 = Vec::new();
    for &h in &hosts {
        let r = analysis.immigration_bias_test(h)?;
        let sig = analysis.migration_significance_test(h, FlowSide::Inflow)?;
        fig4.push(bias_row(r, sig));
    }
    fig4.sort_by(bias_order);

    let mut fig5a = Vec::new();
    for &o in &hosts {
        let r = analysis.emigration_bias_test(o)?;
        let sig = analysis.migration_significance_test(o, FlowSide::Outflow)?;
        fig5a.push(bias_row(r, sig));
    }
    fig5a.sort_by(bias_order);

    let mut fig5b = Vec::new();
    for &o in &non_oecd {
        let r = analysis.emigration_bias_test(o)?;
        let sig = analysis.migration_significance_test(o, FlowSide::Outflow)?;
        fig5b.push(bias_row(r, sig));
    }
    fig5b.sort_by(bias_order);

    Ok(AnalysisReport {
        config_echo: analysis.config,
        thresholds: analysis.pairs.thresholds,
        counts: analysis.stats,
        table1,
        table2,
        table3,
        grand_medians: grand_medians(analysis),
        fig1,
        fig2,
        fig3,
        fig4,
        fig5a,
        fig5b,
    })
}

/// Renders a p-value with four significant digits.
pub fn format_p(p: f64) -> String {
    if p == 0.0 {
        return "0".to_string();
    }
    let exponent = p.abs().log10().floor() as i32;
    if (-4..4).contains(&exponent) {
        let decimals = (3 - exponent).max(0) as usize;
        format!("{p:.decimals$}")
    } else {
        format!("{p:.3e}")
    }
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map(|x| format!("{x:.decimals$}")).unwrap_or_default()
}

fn fmt_opt_p(v: Option<f64>) -> String {
    v.map(format_p).unwrap_or_default()
}

fn sparse_str(s: Option<SparseMerge>) -> &'static str {
    match s {
        Some(SparseMerge::MidIntoClose) => "mid_into_close",
        Some(SparseMerge::MidIntoDistant) => "mid_into_distant",
        None => "",
    }
}

fn create(dir: &Path, name: &str) -> std::io::Result<std::io::BufWriter<std::fs::File>> {
    Ok(std::io::BufWriter::new(std::fs::File::create(
        dir.join(name),
    )?))
}

fn write_pair_table(
    dir: &Path,
    name: &str,
    rows: &[PairTableRow],
) -> std::io::Result<()> {
    let mut out = create(dir, name)?;
    writeln!(out, "country_a,country_b,gd_km,cd")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.0},{:.2}",
            r.country_a, r.country_b, r.gd_km, r.cd
        )?;
    }
    Ok(())
}

fn write_proximity_csv(
    dir: &Path,
    name: &str,
    cells: &[ProximityCell],
) -> std::io::Result<()> {
    let mut out = create(dir, name)?;
    writeln!(out, "host,counterpart,cd,class")?;
    for c in cells {
        writeln!(
            out,
            "{},{},{:.2},{}",
            c.host,
            c.counterpart,
            c.cd,
            c.class.as_str()
        )?;
    }
    Ok(())
}

fn write_bias_csv(dir: &Path, name: &str, rows: &[BiasRow]) -> std::io::Result<()> {
    let mut out = create(dir, name)?;
    writeln!(
        out,
        "country,median_close,median_mid,median_distant,direction,p_value,significance,\
         sparse_rule,migration_significant,migration_p"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.country,
            fmt_opt(r.median_close, 2),
            fmt_opt(r.median_mid, 2),
            fmt_opt(r.median_distant, 2),
            r.direction.as_str(),
            fmt_opt_p(r.p_value),
            r.significance.clone().unwrap_or_default(),
            sparse_str(r.sparse_rule_applied),
            r.migration_significant,
            fmt_opt_p(r.migration_p),
        )?;
    }
    Ok(())
}

/// Writes `report.json`, the table and figure CSVs, the flow matrix export,
/// and a `run_info.json` sidecar. All payloads are deterministic: identical
/// inputs and configuration produce byte-identical files.
pub fn write_report(
    dir: &Path,
    report: &AnalysisReport,
    flows: &[crate::flows::FlowRecord],
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;

    let json = serde_json::to_vec_pretty(report).expect("report serializes");
    std::fs::write(dir.join("report.json"), json)?;

    let mut t1 = create(dir, "table1.csv")?;
    writeln!(t1, "metric,min,lower_quartile,median,mean,upper_quartile,max,mad")?;
    let c = &report.table1.cultural;
    writeln!(
        t1,
        "cultural_distance,{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2}",
        c.min, c.lower_quartile, c.median, c.mean, c.upper_quartile, c.max, c.mad
    )?;
    let g = &report.table1.geodesic_km;
    writeln!(
        t1,
        "geodesic_distance_km,{:.0},{:.0},{:.0},{:.0},{:.0},{:.0},{:.0}",
        g.min, g.lower_quartile, g.median, g.mean, g.upper_quartile, g.max, g.mad
    )?;
    drop(t1);

    write_pair_table(dir, "table2.csv", &report.table2)?;
    write_pair_table(dir, "table3.csv", &report.table3)?;
    write_proximity_csv(dir, "fig1.csv", &report.fig1)?;
    write_proximity_csv(dir, "fig2.csv", &report.fig2)?;

    let mut f3 = create(dir, "fig3.csv")?;
    writeln!(
        f3,
        "host,median_close_km,median_mid_km,median_distant_km,direction,p_value,significance,sparse_rule"
    )?;
    for r in &report.fig3 {
        writeln!(
            f3,
            "{},{},{},{},{},{},{},{}",
            r.host,
            fmt_opt(r.median_close_km, 0),
            fmt_opt(r.median_mid_km, 0),
            fmt_opt(r.median_distant_km, 0),
            r.direction.as_str(),
            fmt_opt_p(r.p_value),
            r.significance.clone().unwrap_or_default(),
            sparse_str(r.sparse_rule_applied),
        )?;
    }
    drop(f3);

    write_bias_csv(dir, "fig4.csv", &report.fig4)?;
    write_bias_csv(dir, "fig5a.csv", &report.fig5a)?;
    write_bias_csv(dir, "fig5b.csv", &report.fig5b)?;

    let mut fl = create(dir, "flows.csv")?;
    writeln!(
        fl,
        "origin_code,dest_code,avg_annual_flow,per_million_host,per_million_origin,defined_flag"
    )?;
    for f in flows {
        writeln!(
            fl,
            "{},{},{:.2},{:.2},{:.2},{}",
            f.origin, f.destination, f.avg_annual_flow, f.per_million_host, f.per_million_origin,
            f.defined
        )?;
    }
    drop(fl);

    let sidecar = serde_json::json!({
        "tool": "cultmig",
        "version": env!("CARGO_PKG_VERSION"),
        "config": report.config_echo,
        "counts": report.counts,
    });
    std::fs::write(
        dir.join("run_info.json"),
        serde_json::to_vec_pretty(&sidecar).expect("sidecar serializes"),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_value_formatting_four_significant_digits() {
        assert_eq!(format_p(0.05), "0.05000");
        assert_eq!(format_p(0.0503), "0.05030");
        assert_eq!(format_p(0.5), "0.5000");
        assert_eq!(format_p(1.0), "1.000");
        assert_eq!(format_p(0.00012345), "0.0001234");
        assert_eq!(format_p(0.000012345), "1.234e-5");
    }
}
