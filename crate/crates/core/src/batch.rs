//! Batch benchmarking over seeded random inputs.
//!
//! Every sample is a pure function of `(seed, index)`, results are collected in
//! index order and reduced sequentially, so the report does not depend on how
//! the samples were scheduled.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::time::{Duration, Instant};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{export_text, import_text};
use crate::error::Error;
use crate::random::haar_orthogonal;
use crate::synth2::SynthOptions;
use crate::toolkit::{synthesize, verify};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// `f(0), …, f(n−1)` in index order.
pub fn map_indexed<T, F>(n: u64, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRecord {
    pub index: u64,
    pub cnot: usize,
    pub one_qubit: usize,
    pub raw_cnot: usize,
    pub raw_one_qubit: usize,
    pub error: f64,
    pub verify_distance: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub mode: &'static str,
    pub samples: u64,
    pub seed: u64,
    pub max_error: f64,
    pub mean_error: f64,
    pub count_histogram: BTreeMap<(usize, usize), u64>,
    /// Component-wise maximum over the samples.
    pub worst_case_counts: (usize, usize),
    pub elapsed: Duration,
    pub records: Vec<SampleRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleFailure {
    Synthesis(Error),
    Verification { distance: f64, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchError {
    pub index: u64,
    pub seed: u64,
    pub failure: SampleFailure,
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sample {} (seed {}, stream {}) failed: ", self.index, self.seed, self.index)?;
        match &self.failure {
            SampleFailure::Synthesis(e) => write!(f, "{e}"),
            SampleFailure::Verification { distance, threshold } => {
                write!(f, "verification distance {distance:.3e} exceeds {threshold:.1e}")
            }
        }
    }
}

impl std::error::Error for BenchError {}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match &self.failure {
            SampleFailure::Synthesis(e) => e.exit_code(),
            SampleFailure::Verification { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub qubits: usize,
    pub samples: u64,
    pub seed: u64,
    pub det: i8,
    pub threshold: f64,
    pub opts: SynthOptions,
}

impl BenchConfig {
    pub fn new(qubits: usize, samples: u64, seed: u64) -> Self {
        BenchConfig {
            qubits,
            samples,
            seed,
            det: 1,
            threshold: 1e-8,
            opts: SynthOptions::default(),
        }
    }

    pub fn mode(&self) -> Result<&'static str, Error> {
        match (self.qubits, self.det) {
            (2, 1) => Ok("so4"),
            (2, -1) => Ok("o4"),
            (3, 1) => Ok("so8"),
            (q, d) => Err(Error::UnsupportedMode(format!(
                "{q} qubits with determinant {d:+}"
            ))),
        }
    }
}

fn run_sample(cfg: &BenchConfig, index: u64) -> Result<SampleRecord, BenchError> {
    let fail = |failure| BenchError {
        index,
        seed: cfg.seed,
        failure,
    };
    let x = haar_orthogonal(1 << cfg.qubits, cfg.seed, index, cfg.det);
    let s = synthesize(&x, &cfg.opts).map_err(|e| fail(SampleFailure::Synthesis(e)))?;
    // Verify through the text format, as the command-line round trip would.
    let circuit = import_text(&export_text(&s.circuit))
        .map_err(|e| fail(SampleFailure::Synthesis(e)))?;
    let v = verify(&circuit, &x, cfg.threshold).map_err(|e| fail(SampleFailure::Synthesis(e)))?;
    if !v.passed {
        return Err(fail(SampleFailure::Verification {
            distance: v.phase_aligned,
            threshold: cfg.threshold,
        }));
    }
    Ok(SampleRecord {
        index,
        cnot: s.counts.cnot,
        one_qubit: s.counts.one_qubit,
        raw_cnot: s.raw_counts.cnot,
        raw_one_qubit: s.raw_counts.one_qubit,
        error: s.error,
        verify_distance: v.phase_aligned,
    })
}

/// Runs random → synthesize → verify for every sample. The first failing
/// sample by index is reported.
pub fn run_bench(cfg: &BenchConfig, exec: Execution) -> Result<BenchReport, BenchError> {
    let mode = cfg.mode().map_err(|e| BenchError {
        index: 0,
        seed: cfg.seed,
        failure: SampleFailure::Synthesis(e),
    })?;
    if cfg.samples == 0 {
        return Err(BenchError {
            index: 0,
            seed: cfg.seed,
            failure: SampleFailure::Synthesis(Error::UnsupportedMode("samples must be at least 1".into())),
        });
    }
    let start = Instant::now();
    let results = map_indexed(cfg.samples, exec, |i| run_sample(cfg, i));
    let elapsed = start.elapsed();
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut count_histogram = BTreeMap::new();
    let (mut max_error, mut sum) = (0.0f64, 0.0f64);
    let mut worst = (0, 0);
    for r in &records {
        *count_histogram.entry((r.cnot, r.one_qubit)).or_insert(0) += 1;
        max_error = max_error.max(r.error);
        sum += r.error;
        worst = (worst.0.max(r.cnot), worst.1.max(r.one_qubit));
    }
    Ok(BenchReport {
        mode,
        samples: cfg.samples,
        seed: cfg.seed,
        max_error,
        mean_error: sum / cfg.samples as f64,
        count_histogram,
        worst_case_counts: worst,
        elapsed,
        records,
    })
}

impl BenchReport {
    /// Same aggregates, ignoring wall time.
    pub fn same_results(&self, other: &BenchReport) -> bool {
        self.mode == other.mode
            && self.samples == other.samples
            && self.seed == other.seed
            && self.max_error.to_bits() == other.max_error.to_bits()
            && self.mean_error.to_bits() == other.mean_error.to_bits()
            && self.count_histogram == other.count_histogram
            && self.worst_case_counts == other.worst_case_counts
            && self.records == other.records
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let rows = [
            ("mode", self.mode.to_string()),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
            ("max error", format!("{:.3e}", self.max_error)),
            ("mean error", format!("{:.3e}", self.mean_error)),
            (
                "worst counts",
                format!("({}, {})", self.worst_case_counts.0, self.worst_case_counts.1),
            ),
            ("elapsed", format!("{:.3} s", self.elapsed.as_secs_f64())),
        ];
        for (k, v) in rows {
            out.push_str(&format!("{k:<14}{v}\n"));
        }
        out.push_str(&format!("\n{:>6} {:>10} {:>10}\n", "cnot", "one-qubit", "frequency"));
        for ((c, o), f) in &self.count_histogram {
            out.push_str(&format!("{c:>6} {o:>10} {f:>10}\n"));
        }
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for r in &self.records {
            wtr.serialize(r)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sample_has_one_bucket() {
        let r = run_bench(&BenchConfig::new(2, 1, 99), Execution::Sequential).unwrap();
        assert_eq!(r.count_histogram.len(), 1);
        assert_eq!(r.records.len(), 1);
    }

    #[test]
    fn execution_modes_agree() {
        let cfg = BenchConfig::new(2, 40, 5);
        let a = run_bench(&cfg, Execution::Sequential).unwrap();
        let b = run_bench(&cfg, Execution::Parallel).unwrap();
        assert!(a.same_results(&b));
    }

    #[test]
    fn rejects_three_qubit_reflections() {
        let mut cfg = BenchConfig::new(3, 1, 0);
        cfg.det = -1;
        let e = run_bench(&cfg, Execution::Sequential).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let r = run_bench(&BenchConfig::new(2, 3, 1), Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,cnot,one_qubit"));
        assert_eq!(text.lines().count(), 4);
    }
}
