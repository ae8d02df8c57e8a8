//! Noncontextual ±1 assignments and exhaustive classical maxima.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::MagicArray;
use crate::error::{Error, Result};
use crate::observable::{Observable, XksForm};

pub const DEFAULT_MAX_BRUTE_QUBITS: usize = 8;
pub const MAX_BRUTE_QUBITS_ENV: &str = "KSMAGIC_MAX_BRUTE_QUBITS";
// 3(q+1) cells must fit one u64 mask
const HARD_MAX_QUBITS: usize = 20;

/// A ±1 value for every cell, row-major over the 3×(q+1) grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    q: usize,
    values: Vec<i8>,
}

impl Assignment {
    pub fn new(q: usize, values: Vec<i8>) -> Result<Assignment> {
        let cells = 3 * (q + 1);
        if values.len() != cells {
            return Err(Error::AssignmentShape(format!("{} values for {cells} cells (q = {q})", values.len())));
        }
        if let Some(v) = values.iter().find(|v| **v != 1 && **v != -1) {
            return Err(Error::AssignmentShape(format!("value {v} is not ±1")));
        }
        Ok(Assignment { q, values })
    }

    pub fn constant(q: usize, value: i8) -> Result<Assignment> {
        Assignment::new(q, vec![value; 3 * (q + 1)])
    }

    /// Decodes the enumeration index: cell `i` is −1 iff bit `n−1−i` is set,
    /// so integer order is lexicographic order with +1 < −1.
    pub fn from_index(q: usize, index: u64) -> Assignment {
        let n = 3 * (q + 1);
        let values = (0..n).map(|i| if index >> (n - 1 - i) & 1 == 1 { -1 } else { 1 }).collect();
        Assignment { q, values }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// 1-based cell value.
    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.values[(row - 1) * (self.q + 1) + (col - 1)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: i8) -> Result<()> {
        if value != 1 && value != -1 {
            return Err(Error::AssignmentShape(format!("value {value} is not ±1")));
        }
        if !(1..=3).contains(&row) || col == 0 || col > self.q + 1 {
            return Err(Error::IndexOutOfRange(format!("cell ({row}, {col})")));
        }
        self.values[(row - 1) * (self.q + 1) + (col - 1)] = value;
        Ok(())
    }

    fn check_q(&self, q: usize) -> Result<()> {
        if self.q != q {
            return Err(Error::AssignmentShape(format!("assignment for q = {}, array has q = {q}", self.q)));
        }
        Ok(())
    }

    fn product(&self, cells: &[(usize, usize)]) -> i64 {
        cells.iter().map(|&(r, c)| self.get(r, c) as i64).product()
    }
}

/// Classical value of an observable under one assignment.
pub fn evaluate(observable: &Observable, assignment: &Assignment) -> i64 {
    let cols = assignment.q + 1;
    observable.constant
        + observable.terms.iter().map(|t| t.coefficient * assignment.product(&t.context.cells(cols))).sum::<i64>()
}

/// `R1 + R2 + R3 + C1 + C2 − C3` on the 3×3 grid.
pub fn eval_xks2(assignment: &Assignment) -> Result<i64> {
    assignment.check_q(2)?;
    Ok(evaluate(&Observable::new(2, XksForm::TwoQubit)?, assignment))
}

/// `1 + R1 + R2 + Σ Cj − R3·C_{q+1}`, with the corner cell of the last term
/// counted twice (so it cancels).
pub fn eval_xksq(array: &MagicArray, assignment: &Assignment) -> Result<i64> {
    assignment.check_q(array.q())?;
    Ok(evaluate(&Observable::new(array.q(), XksForm::General)?, assignment))
}

/// Product of every row value and every column value. Each cell enters
/// exactly twice, so this is +1 for any assignment.
pub fn verify_parity_identity(array: &MagicArray, assignment: &Assignment) -> Result<i8> {
    assignment.check_q(array.q())?;
    let cols = array.num_cols();
    let rows: i64 = (1..=3).map(|r| assignment.product(&(1..=cols).map(|c| (r, c)).collect::<Vec<_>>())).product();
    let columns: i64 = (1..=cols).map(|c| assignment.product(&[(1, c), (2, c), (3, c)])).product();
    Ok((rows * columns) as i8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_qubits: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_qubits: DEFAULT_MAX_BRUTE_QUBITS }
    }
}

impl Budget {
    /// Reads `KSMAGIC_MAX_BRUTE_QUBITS`, falling back to the default.
    pub fn from_env() -> Result<Budget> {
        match std::env::var(MAX_BRUTE_QUBITS_ENV) {
            Ok(v) => {
                let max_qubits = v
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("{MAX_BRUTE_QUBITS_ENV}={v:?} is not an integer")))?;
                Ok(Budget { max_qubits })
            }
            Err(_) => Ok(Budget::default()),
        }
    }

    fn check(&self, q: usize) -> Result<()> {
        let cap = self.max_qubits.min(HARD_MAX_QUBITS);
        if q > cap {
            return Err(Error::BudgetExceeded { q, cells: 3 * (q + 1), max_qubits: cap });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundResult {
    pub q: usize,
    pub classical_max: i64,
    pub quantum_value: i64,
    pub argmax: Vec<i8>,
    pub search_space_size: u64,
}

impl BoundResult {
    pub fn argmax_assignment(&self) -> Assignment {
        Assignment { q: self.q, values: self.argmax.clone() }
    }
}

const CHUNK_BITS: u32 = 14;

/// Exhaustive maximum of the chosen form over all `2^{3(q+1)}` assignments.
/// Ties go to the lexicographically smallest assignment (row-major,
/// +1 before −1).
pub fn brute_max(array: &MagicArray, form: XksForm, budget: Budget) -> Result<BoundResult> {
    let q = array.q();
    budget.check(q)?;
    let observable = Observable::new(q, form)?;
    let quantum_value = observable.symbolic_value(array)?;

    let n = 3 * (q + 1);
    let cols = q + 1;
    let bit = |(r, c): (usize, usize)| 1u64 << (n - 1 - ((r - 1) * cols + (c - 1)));
    let masks: Vec<(i64, u64)> = observable
        .terms
        .iter()
        .map(|t| (t.coefficient, t.context.cells(cols).into_iter().map(bit).fold(0, |a, b| a | b)))
        .collect();
    let constant = observable.constant;
    let value = |a: u64| -> i64 {
        constant
            + masks.iter().map(|&(coef, mask)| if (a & mask).count_ones() & 1 == 0 { coef } else { -coef }).sum::<i64>()
    };

    let total = 1u64 << n;
    let chunk = 1u64 << CHUNK_BITS.min(n as u32);
    let (best, index) = (0..total / chunk)
        .into_par_iter()
        .map(|k| {
            let start = k * chunk;
            let mut best = (i64::MIN, start);
            for a in start..start + chunk {
                let v = value(a);
                if v > best.0 {
                    best = (v, a);
                }
            }
            best
        })
        .reduce(|| (i64::MIN, u64::MAX), |x, y| if x.0 > y.0 || (x.0 == y.0 && x.1 < y.1) { x } else { y });

    Ok(BoundResult {
        q,
        classical_max: best,
        quantum_value,
        argmax: Assignment::from_index(q, index).values,
        search_space_size: total,
    })
}
