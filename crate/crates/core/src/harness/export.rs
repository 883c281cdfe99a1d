use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::engine::Fault;
use crate::error::Result;
use crate::metrics::{aggregate, AggregateRow, Metric, MetricRecord};
use crate::scenario::OutageCase;
use crate::valuation::Context;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RECORDS_FILE: &str = "records.csv";
pub const FAULTS_FILE: &str = "faults.csv";
pub const AGGREGATES_FILE: &str = "aggregates.csv";
pub const PLOT_DIR: &str = "plots";
pub const SCATTER_FILE: &str = "tu_vs_fu.csv";

pub fn write_records(records: &[MetricRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<MetricRecord>> {
    let mut rd = csv::Reader::from_path(path)?;
    let records = rd.deserialize().collect::<Result<Vec<MetricRecord>, _>>()?;
    Ok(records)
}

pub(super) fn write_faults(faults: &[Fault], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["scenario_seed", "case", "context", "algorithm", "message"])?;
    for f in faults {
        w.write_record([
            f.scenario_seed.to_string(),
            f.case.to_string(),
            f.context.map(|c| c.to_string()).unwrap_or_default(),
            f.algorithm.map(|a| a.to_string()).unwrap_or_default(),
            f.message.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregates(rows: &[AggregateRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "case",
        "context",
        "algorithm",
        "metric",
        "n",
        "mean",
        "median",
        "q1",
        "q3",
        "whisker_lo",
        "whisker_hi",
        "n_outliers",
    ])?;
    for r in rows {
        let s = &r.summary;
        w.write_record([
            r.key.case.to_string(),
            r.key.context.to_string(),
            r.key.algorithm.to_string(),
            r.metric.to_string(),
            s.n.to_string(),
            s.mean.to_string(),
            s.median.to_string(),
            s.q1.to_string(),
            s.q3.to_string(),
            s.whisker_lo.to_string(),
            s.whisker_hi.to_string(),
            s.outliers.len().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Box-plot tables, one file per (metric, case, context), plus the mean TU
/// against mean F_U scatter. Returns the paths written.
pub fn export_plot_data(rows: &[AggregateRow], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut by_figure: BTreeMap<(Metric, OutageCase, Context), Vec<&AggregateRow>> =
        BTreeMap::new();
    for r in rows {
        by_figure
            .entry((r.metric, r.key.case, r.key.context))
            .or_default()
            .push(r);
    }
    let mut written = Vec::new();
    for ((metric, case, ctx), group) in by_figure {
        let path = dir.join(format!("{metric}_{case}_{ctx}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record([
            "algorithm",
            "median",
            "q1",
            "q3",
            "whisker_lo",
            "whisker_hi",
            "outliers",
        ])?;
        for r in group {
            let s = &r.summary;
            let outliers: Vec<String> = s.outliers.iter().map(f64::to_string).collect();
            w.write_record([
                r.key.algorithm.to_string(),
                s.median.to_string(),
                s.q1.to_string(),
                s.q3.to_string(),
                s.whisker_lo.to_string(),
                s.whisker_hi.to_string(),
                outliers.join(";"),
            ])?;
        }
        w.flush()?;
        written.push(path);
    }

    let mut scatter: BTreeMap<_, (Option<f64>, Option<f64>)> = BTreeMap::new();
    for r in rows {
        let e = scatter.entry(r.key).or_default();
        match r.metric {
            Metric::Tu => e.0 = Some(r.summary.mean),
            Metric::Fu => e.1 = Some(r.summary.mean),
            _ => {}
        }
    }
    let path = dir.join(SCATTER_FILE);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["case", "context", "algorithm", "mean_tu", "mean_f_u"])?;
    for (key, (tu, fu)) in scatter {
        if let (Some(tu), Some(fu)) = (tu, fu) {
            w.write_record([
                key.case.to_string(),
                key.context.to_string(),
                key.algorithm.to_string(),
                tu.to_string(),
                fu.to_string(),
            ])?;
        }
    }
    w.flush()?;
    written.push(path);
    Ok(written)
}

/// Re-aggregates the records of a run directory, rewriting the aggregate
/// table and the plot data.
pub fn aggregate_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let records = read_records(&dir.join(RECORDS_FILE))?;
    let rows = aggregate(&records)?;
    write_aggregates(&rows, &dir.join(AGGREGATES_FILE))?;
    export_plot_data(&rows, &dir.join(PLOT_DIR))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alloc::Algorithm;
    use crate::harness::{run, RunConfig};
    use crate::metrics::summarize;

    fn config() -> RunConfig {
        RunConfig {
            n_scenarios: 4,
            base_seed: 5,
            cases: vec![OutageCase::I, OutageCase::III],
            contexts: vec![Context::Utility],
            algorithms: vec![Algorithm::SR1, Algorithm::GS],
            record_timing: false,
            ..Default::default()
        }
    }

    #[test]
    fn run_writes_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&config(), dir.path()).unwrap();
        assert_eq!(summary.records, 16);
        assert_eq!(summary.faults, 0);
        // 9 metrics x 2 cases x 1 context, plus the scatter
        assert_eq!(summary.plot_files.len(), 19);
        for f in [MANIFEST_FILE, RECORDS_FILE, FAULTS_FILE, AGGREGATES_FILE] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let header = fs::read_to_string(dir.path().join(RECORDS_FILE)).unwrap();
        assert_eq!(
            header.lines().next().unwrap(),
            "scenario_seed,case,context,algorithm,tc_mbps,tu,f_c,f_u,mc_mbps,mu,n_outage,overcapacity_mbps,wall_time_s"
        );
        let manifest: crate::harness::RunManifest =
            serde_json::from_str(&fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap())
                .unwrap();
        assert!(manifest.finished);
        assert_eq!(manifest.group_counts.len(), 4);
        assert!(manifest.group_counts.values().all(|&n| n == 4));
    }

    #[test]
    fn rerun_from_manifest_is_byte_identical() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run(&config(), a.path()).unwrap();
        let again = RunConfig::from_path(&a.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(again, config());
        run(&again, b.path()).unwrap();
        let read = |d: &Path| fs::read(d.join(RECORDS_FILE)).unwrap();
        assert_eq!(read(a.path()), read(b.path()));
    }

    #[test]
    fn records_round_trip_and_plot_values_match_aggregates() {
        let dir = tempfile::tempdir().unwrap();
        run(&config(), dir.path()).unwrap();
        let records = read_records(&dir.path().join(RECORDS_FILE)).unwrap();
        let copy = dir.path().join("copy.csv");
        write_records(&records, &copy).unwrap();
        assert_eq!(read_records(&copy).unwrap(), records);

        let mut rd =
            csv::Reader::from_path(dir.path().join(PLOT_DIR).join("tu_III_utility.csv")).unwrap();
        assert_eq!(
            rd.headers().unwrap(),
            vec![
                "algorithm",
                "median",
                "q1",
                "q3",
                "whisker_lo",
                "whisker_hi",
                "outliers"
            ]
        );
        let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 2);
        let gs: Vec<f64> = records
            .iter()
            .filter(|r| r.case == OutageCase::III && r.algorithm == Algorithm::GS)
            .map(|r| r.tu)
            .collect();
        let s = summarize(&gs).unwrap();
        let row = rows.iter().find(|r| &r[0] == "GS").unwrap();
        assert_eq!(row[1].parse::<f64>().unwrap(), s.median);
        assert_eq!(row[2].parse::<f64>().unwrap(), s.q1);
        assert_eq!(row[5].parse::<f64>().unwrap(), s.whisker_hi);
    }

    #[test]
    fn outliers_are_semicolon_joined() {
        let mut records = Vec::new();
        for (i, tc) in [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 50.0, 60.0]
            .into_iter()
            .enumerate()
        {
            let mut r = crate::metrics::Metrics::default().into_record(
                i as u64,
                OutageCase::I,
                Context::Capacity,
                Algorithm::R,
                0.0,
            );
            r.tc_mbps = tc;
            records.push(r);
        }
        let dir = tempfile::tempdir().unwrap();
        export_plot_data(&aggregate(&records).unwrap(), dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("tc_mbps_I_capacity.csv")).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",50;60"), "{text}");
    }

    #[test]
    fn fault_file_has_one_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(FAULTS_FILE);
        let f = Fault {
            scenario_seed: 3,
            case: OutageCase::II,
            context: None,
            algorithm: Some(Algorithm::CA),
            message: "boom, again".into(),
        };
        write_faults(&[f], &path).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "scenario_seed,case,context,algorithm,message\n3,II,,CA,\"boom, again\"\n"
        );
        write_faults(&[], &path).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "scenario_seed,case,context,algorithm,message\n"
        );
    }
}
