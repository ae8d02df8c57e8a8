//! Closed-form convergence of the classical bound to the quantum value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GHZ_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub q: u64,
    pub classical_bound: u64,
    pub quantum_value: u64,
    /// `(q+2)/(q+4)`
    pub ratio: f64,
    /// `2/(q+4)`, i.e. `1 − ratio`
    pub gap: f64,
    /// `(1−2ε)^q`, the GHZ gap with imperfect instruments
    pub ghz_comparator: f64,
}

impl ConvergenceRow {
    pub fn new(q: u64, epsilon: f64) -> ConvergenceRow {
        let (c, v) = (q + 2, q + 4);
        ConvergenceRow {
            q,
            classical_bound: c,
            quantum_value: v,
            ratio: c as f64 / v as f64,
            gap: 2.0 / v as f64,
            ghz_comparator: ghz_comparator(q, epsilon),
        }
    }

    /// The KS gap is the larger of the two.
    pub fn ks_gap_dominates(&self) -> bool {
        self.gap > self.ghz_comparator
    }
}

pub fn ghz_comparator(q: u64, epsilon: f64) -> f64 {
    (1.0 - 2.0 * epsilon).powf(q as f64)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidProbability(format!("epsilon = {epsilon} not in (0, 1/2)")));
    }
    Ok(())
}

pub fn converge_table(q_max: u64, epsilon: f64) -> Result<Vec<ConvergenceRow>> {
    if q_max < 2 {
        return Err(Error::InvalidSize(format!("max q = {q_max}: need >= 2")));
    }
    check_epsilon(epsilon)?;
    Ok((2..=q_max).map(|q| ConvergenceRow::new(q, epsilon)).collect())
}

/// First `q >= 2` where `2/(q+4)` exceeds `(1−2ε)^q`, on the order of
/// `1/ε` up to a logarithmic factor.
pub fn crossover_q(epsilon: f64) -> Result<u64> {
    check_epsilon(epsilon)?;
    let mut q = 2;
    while !ConvergenceRow::new(q, epsilon).ks_gap_dominates() {
        q += 1;
    }
    Ok(q)
}

/// Smallest `q >= 2` with `2/(q+4) < threshold`. The gap is strictly
/// decreasing, so the scan starts just below the closed-form root.
pub fn first_q_with_gap_below(threshold: f64) -> Result<u64> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidInput(format!("threshold {threshold} not in (0, 1)")));
    }
    let mut q = ((2.0 / threshold - 6.0).max(2.0)) as u64;
    while 2.0 / (q + 4) as f64 >= threshold {
        q += 1;
    }
    Ok(q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub epsilon: f64,
    /// First `q` at which the KS gap exceeds the GHZ comparator.
    pub crossover_q: u64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn new(q_max: u64, epsilon: f64) -> Result<ConvergenceTable> {
        Ok(ConvergenceTable { epsilon, crossover_q: crossover_q(epsilon)?, rows: converge_table(q_max, epsilon)? })
    }

    /// Header `q,classical_bound,quantum_value,ratio,gap,ghz_comparator`,
    /// LF line endings.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
        w.write_record(["q", "classical_bound", "quantum_value", "ratio", "gap", "ghz_comparator"]).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.q.to_string(),
                r.classical_bound.to_string(),
                r.quantum_value.to_string(),
                format!("{:.12}", r.ratio),
                format!("{:.12e}", r.gap),
                format!("{:.12e}", r.ghz_comparator),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }
}
