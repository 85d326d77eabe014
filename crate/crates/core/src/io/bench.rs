//! Benchmark harness: generate instances, run solvers, check that every
//! optimal answer verifies and that all solvers agree, and write CSV.

use super::generate::{generate, Family, GenSpec, InvalidSpec};
use crate::error::McfError;
use crate::network::Network;
use crate::solver::{run, Algorithm, Status};
use crate::verify::verify_optimality;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("bad config: {0}")]
    Config(String),
    #[error(transparent)]
    Spec(#[from] InvalidSpec),
    #[error("{solver} on {instance}: {source}")]
    Solver { instance: String, solver: String, source: McfError },
    #[error("{solver} on {instance} returned a flow that does not verify")]
    Unverified { instance: String, solver: String },
    #[error("solvers disagree on {instance}: {}", render(.results))]
    SolverDisagreement { instance: String, results: Vec<(String, String)> },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn render(results: &[(String, String)]) -> String {
    results.iter().map(|(s, r)| format!("{s}={r}")).collect::<Vec<_>>().join(", ")
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub families: Vec<String>,
    pub sizes: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub solvers: Vec<String>,
    /// Overrides each family's default outdegree.
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default)]
    pub timeout_secs: Option<f64>,
}

type Plan = (Vec<Family>, Vec<Algorithm>, Option<Duration>);

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }

    fn parsed(&self) -> Result<Plan, BenchError> {
        let families = self.families.iter().map(|f| f.parse()).collect::<Result<Vec<Family>, _>>()?;
        let solvers = self
            .solvers
            .iter()
            .map(|s| s.parse().map_err(|e: McfError| BenchError::Config(e.to_string())))
            .collect::<Result<Vec<Algorithm>, _>>()?;
        if families.is_empty() || solvers.is_empty() || self.sizes.is_empty() || self.seeds.is_empty() {
            return Err(BenchError::Config("families, sizes, seeds and solvers must be non-empty".into()));
        }
        let timeout = match self.timeout_secs {
            Some(t) if !(t.is_finite() && t > 0.0) => {
                return Err(BenchError::Config(format!("timeout must be positive, got {t}")))
            }
            t => t.map(Duration::from_secs_f64),
        };
        Ok((families, solvers, timeout))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub solver: String,
    pub status: String,
    /// `-` unless the status is optimal.
    pub objective: String,
    pub time_ms: f64,
    pub iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub family: String,
    pub n: usize,
    pub solver: String,
    pub runs: usize,
    pub timeouts: usize,
    /// Mean over seeds; `-` if any seed timed out.
    pub mean_time_ms: String,
}

#[derive(Debug, Clone, Default)]
pub struct BenchOutcome {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<SummaryRow>,
}

/// Runs every (instance, solver) pair in order. `on_row` sees each row as it
/// is produced.
pub fn run_bench(config: &BenchConfig, on_row: &mut dyn FnMut(&BenchRow)) -> Result<BenchOutcome, BenchError> {
    let (families, solvers, timeout) = config.parsed()?;
    let mut rows = Vec::new();
    for &family in &families {
        for &n in &config.sizes {
            for &seed in &config.seeds {
                let mut spec = GenSpec::new(family, n, seed);
                if let Some(d) = config.degree {
                    spec = spec.degree(d);
                }
                let network = generate(&spec)?;
                let instance = format!("{family}/n={n}/seed={seed}");
                let mut results = Vec::new();
                for alg in &solvers {
                    let row = run_one(&network, alg, timeout, &instance, family, n, seed)?;
                    on_row(&row);
                    results.push((row.solver.clone(), row.status.clone(), row.objective.clone()));
                    rows.push(row);
                }
                check_agreement(&instance, &results)?;
            }
        }
    }
    let summary = summarize(&rows);
    Ok(BenchOutcome { rows, summary })
}

fn run_one(
    network: &Network,
    alg: &Algorithm,
    timeout: Option<Duration>,
    instance: &str,
    family: Family,
    n: usize,
    seed: u64,
) -> Result<BenchRow, BenchError> {
    let solver = alg.to_string();
    let (report, flow) = run(network, alg, timeout)
        .map_err(|source| BenchError::Solver { instance: instance.into(), solver: solver.clone(), source })?;
    if let Some(flow) = &flow {
        let ok = verify_optimality(network, flow).map(|v| v.feasible && v.optimal).unwrap_or(false);
        if !ok {
            return Err(BenchError::Unverified { instance: instance.into(), solver });
        }
    }
    let objective = match (report.status, report.objective) {
        (Status::Optimal, Some(z)) => z.to_string(),
        _ => "-".into(),
    };
    Ok(BenchRow {
        family: family.to_string(),
        n,
        m: network.arc_count(),
        seed,
        solver,
        status: report.status.to_string(),
        objective,
        time_ms: report.wall_time.as_secs_f64() * 1e3,
        iterations: report.iterations,
    })
}

/// Optimal objectives must match, and no solver may call a solved instance
/// infeasible. Timeouts say nothing either way.
fn check_agreement(instance: &str, results: &[(String, String, String)]) -> Result<(), BenchError> {
    let decided: Vec<_> = results.iter().filter(|r| r.1 != Status::Timeout.to_string()).collect();
    let first = match decided.first() {
        Some(r) => (&r.1, &r.2),
        None => return Ok(()),
    };
    if decided.iter().all(|r| (&r.1, &r.2) == first) {
        return Ok(());
    }
    Err(BenchError::SolverDisagreement {
        instance: instance.into(),
        results: decided.iter().map(|r| (r.0.clone(), format!("{}:{}", r.1, r.2))).collect(),
    })
}

fn summarize(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, usize, String), Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.family.clone(), r.n, r.solver.clone())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((family, n, solver), rs)| {
            let timeouts = rs.iter().filter(|r| r.status == Status::Timeout.to_string()).count();
            let mean = rs.iter().map(|r| r.time_ms).sum::<f64>() / rs.len() as f64;
            SummaryRow {
                family,
                n,
                solver,
                runs: rs.len(),
                timeouts,
                mean_time_ms: if timeouts > 0 { "-".into() } else { format!("{mean:.3}") },
            }
        })
        .collect()
}

/// Writes rows as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(solvers: &[&str]) -> BenchConfig {
        BenchConfig {
            families: vec!["random-sparse".into()],
            sizes: vec![32],
            seeds: vec![1],
            solvers: solvers.iter().map(|s| s.to_string()).collect(),
            degree: None,
            timeout_secs: None,
        }
    }

    #[test]
    fn two_solvers_one_instance() {
        let out = run_bench(&config(&["ssp", "ns-bs"]), &mut |_| {}).unwrap();
        assert_eq!(out.rows.len(), 2);
        assert_eq!(out.rows[0].objective, out.rows[1].objective);
        assert_eq!(out.summary.len(), 2);
    }

    #[test]
    fn csv_header_and_columns() {
        let out = run_bench(&config(&["cos-par"]), &mut |_| {}).unwrap();
        let mut buf = Vec::new();
        write_csv(&out.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("family,n,m,seed,solver,status,objective,time_ms,iterations\n"));
        assert!(text.lines().nth(1).unwrap().starts_with("random-sparse,32,256,1,cos-par,optimal,"));
    }

    #[test]
    fn parses_toml() {
        let c = BenchConfig::from_toml("families = [\"grid-torus\"]\nsizes = [16]\nsolvers = [\"ns\"]\ntimeout_secs = 2.5\n").unwrap();
        assert_eq!(c.seeds, vec![1, 2, 3]);
        assert_eq!(c.timeout_secs, Some(2.5));
        assert!(BenchConfig::from_toml("families = []\nsizes = [1]\nsolvers = []\nbogus = 1\n").is_err());
        assert!(run_bench(&config(&["nope"]), &mut |_| {}).is_err());
    }

    #[test]
    fn summary_averages_seeds() {
        let mut c = config(&["ssp"]);
        c.seeds = vec![1, 2, 3];
        let out = run_bench(&c, &mut |_| {}).unwrap();
        assert_eq!(out.summary.len(), 1);
        assert_eq!(out.summary[0].runs, 3);
        let mean: f64 = out.rows.iter().map(|r| r.time_ms).sum::<f64>() / 3.0;
        assert_eq!(out.summary[0].mean_time_ms, format!("{mean:.3}"));
    }

    #[test]
    fn disagreement_is_fatal() {
        let results = vec![
            ("a".to_string(), "optimal".to_string(), "5".to_string()),
            ("b".to_string(), "optimal".to_string(), "6".to_string()),
            ("c".to_string(), "timeout".to_string(), "-".to_string()),
        ];
        assert!(matches!(check_agreement("x", &results), Err(BenchError::SolverDisagreement { .. })));
        assert!(check_agreement("x", &results[..1]).is_ok());
        assert!(check_agreement("x", &results[2..]).is_ok());
    }
}
