//! Solution dumps (JSON) and sweep tables (CSV).
//!
//! Floats are written with Rust's shortest round-trip formatting, so an
//! export followed by an import reproduces every value bit for bit and a
//! fixed input always yields the same bytes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clustering::ClusterCatalog;
use crate::error::{Error, Result};
use crate::problem::{linear_to_db, PrecoderSolution};
use crate::sweep::SweepTable;

/// Per-user catalog summary carried along with a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogSummary {
    pub user: usize,
    pub clusters: usize,
    /// `(satellite, beams)` for every cluster in catalog order.
    pub members: Vec<(usize, Vec<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub total_power_dbw: f64,
    pub solution: PrecoderSolution,
    pub catalog: Vec<CatalogSummary>,
}

impl SolutionFile {
    pub fn new(solution: PrecoderSolution, catalog: &ClusterCatalog) -> Self {
        let catalog = (0..catalog.num_users())
            .map(|m| CatalogSummary {
                user: m,
                clusters: catalog.clusters(m).len(),
                members: catalog
                    .clusters(m)
                    .iter()
                    .map(|c| (c.satellite, c.beams.clone()))
                    .collect(),
            })
            .collect();
        Self {
            total_power_dbw: linear_to_db(solution.total_power_w),
            solution,
            catalog,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn export_solution(file: &SolutionFile, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, file.to_json()?)?;
    Ok(())
}

pub fn import_solution(path: impl AsRef<Path>) -> Result<SolutionFile> {
    SolutionFile::from_json(&std::fs::read_to_string(path)?)
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV text of a sweep table, header first.
pub fn table_to_csv(table: &SweepTable) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(table.header().split(',')).map_err(csv_err)?;
    for r in &table.rows {
        let mut rec = vec![
            r.parameter.as_str().to_string(),
            r.value.to_string(),
            r.seed.to_string(),
            r.algorithm.as_str().to_string(),
            r.status.as_str().to_string(),
            opt(r.total_power_w),
            opt(r.total_power_dbw()),
            opt(r.mean_user_power_w),
            opt(r.iterations),
        ];
        if table.timings {
            rec.push(opt(r.wall_time_s));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn export_table(table: &SweepTable, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, table_to_csv(table)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{solve_dual, SolverOptions};
    use crate::problem::Algorithm;
    use crate::scenario::Scenario;
    use crate::sweep::{RowStatus, SweepParameter, SweepRow, TABLE_HEADER};

    #[test]
    fn solution_round_trip_is_bit_exact() {
        let p = Scenario::reference(4, 2).prepare().unwrap();
        let sol = solve_dual(&p.instance, &SolverOptions::default()).unwrap();
        let file = SolutionFile::new(sol, &p.instance.catalog);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol.json");
        export_solution(&file, &path).unwrap();
        let back = import_solution(&path).unwrap();
        assert_eq!(
            back.solution.total_power_w.to_bits(),
            file.solution.total_power_w.to_bits()
        );
        assert_eq!(back, file);
        assert_eq!(back.to_json().unwrap(), file.to_json().unwrap());
    }

    #[test]
    fn csv_header_matches_schema() {
        let row = SweepRow {
            parameter: SweepParameter::ClusterSize,
            value: 2.0,
            seed: 7,
            algorithm: Algorithm::Dual,
            status: RowStatus::Infeasible,
            total_power_w: None,
            mean_user_power_w: None,
            iterations: None,
            wall_time_s: None,
        };
        let table = SweepTable {
            rows: vec![row],
            timings: false,
        };
        let text = table_to_csv(&table).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "parameter,value,seed,algorithm,status,total_power_w,total_power_dbw,mean_user_power_w,iterations"
        );
        assert_eq!(
            lines.next().unwrap(),
            "cluster_size,2,7,dual,infeasible,,,,"
        );
        assert_eq!(TABLE_HEADER.split(',').count(), 9);
    }

    #[test]
    fn missing_file_surfaces_io_error() {
        assert!(matches!(
            import_solution("/nonexistent/x.json"),
            Err(Error::Io(_))
        ));
    }
}
