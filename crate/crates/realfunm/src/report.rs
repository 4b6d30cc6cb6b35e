//! `key=value` reports.

use std::fmt::Write as _;
use std::time::Instant;

use realfunm_core::funm::{Clock, FunmReport};
use realfunm_core::harness::ErrorMetrics;

/// Nanoseconds since construction.
#[derive(Clone, Copy, Debug)]
pub struct StdClock(Instant);

impl Default for StdClock {
    fn default() -> Self {
        StdClock(Instant::now())
    }
}

impl Clock for StdClock {
    fn now_ns(&self) -> u64 {
        self.0.elapsed().as_nanos() as u64
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pairs: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.pairs.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn add_metrics(&mut self, prefix: &str, m: &ErrorMetrics) -> &mut Self {
        for (k, v) in m.fields() {
            self.push(format!("{prefix}{k}"), format!("{v:e}"));
        }
        self
    }

    pub fn add_funm(&mut self, r: &FunmReport) -> &mut Self {
        let sizes: Vec<String> = r.block_sizes.iter().map(usize::to_string).collect();
        self.push("n", r.n)
            .push("blocks", r.block_sizes.len())
            .push("block_sizes", sizes.join(","))
            .push("mul_count", r.mul_count)
            .push("schur_residual", format!("{:e}", r.schur_residual))
            .push("schur_swaps", r.schur_swaps)
            .push("taylor_blocks", r.taylor_blocks)
            .push("max_digits", r.max_digits)
            .push("time_schur_ns", r.times.schur)
            .push("time_partition_ns", r.times.partition)
            .push("time_diagonal_ns", r.times.diagonal)
            .push("time_superdiagonal_ns", r.times.superdiagonal)
            .push("time_fill_ns", r.times.fill)
            .push("time_back_transform_ns", r.times.back_transform);
        if let Some(m) = &r.metrics {
            self.add_metrics("", m);
        }
        self
    }

    /// Parses the output of `Display`.
    pub fn parse(text: &str) -> Option<Report> {
        let mut r = Report::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line.split_once('=')?;
            r.push(k.trim(), v.trim());
        }
        Some(r)
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        for (k, v) in &self.pairs {
            let _ = writeln!(s, "{k}={v}");
        }
        f.write_str(&s)
    }
}
