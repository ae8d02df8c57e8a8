//! The X_KS expressions as weighted sums of context terms.
//!
//! The same term list drives the classical evaluation (product of assigned
//! cell values) and the quantum one (expectation of the operator product).

use serde::{Deserialize, Serialize};

use crate::array::MagicArray;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XksForm {
    /// `R1 + R2 + R3 + C1 + C2 − C3`, the two-qubit square only.
    TwoQubit,
    /// `1 + R1 + R2 + Σ_{j≤q} Cj − R3·C_{q+1}`.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Context {
    Row(usize),
    Col(usize),
    /// Row product times column product, measured as one operator.
    RowTimesCol(usize, usize),
}

impl Context {
    pub fn label(&self) -> String {
        match *self {
            Context::Row(r) => format!("R{r}"),
            Context::Col(c) => format!("C{c}"),
            Context::RowTimesCol(r, c) => format!("R{r}*C{c}"),
        }
    }

    /// Cells whose assigned values multiply to the classical context value.
    /// A cell shared by the row and column of `RowTimesCol` cancels.
    pub fn cells(&self, cols: usize) -> Vec<(usize, usize)> {
        match *self {
            Context::Row(r) => (1..=cols).map(|c| (r, c)).collect(),
            Context::Col(c) => (1..=3).map(|r| (r, c)).collect(),
            Context::RowTimesCol(r, c) => {
                let mut v: Vec<_> = (1..=cols).filter(|&j| j != c).map(|j| (r, j)).collect();
                v.extend((1..=3).filter(|&i| i != r).map(|i| (i, c)));
                v
            }
        }
    }

    pub fn operator(&self, array: &MagicArray) -> Result<PauliString> {
        match *self {
            Context::Row(r) => array.row_product(r),
            Context::Col(c) => array.col_product(c),
            Context::RowTimesCol(r, c) => array.row_product(r)?.mul(&array.col_product(c)?),
        }
    }

    /// Operators measured in sequence when sampling this context.
    pub fn measured_operators(&self, array: &MagicArray) -> Result<Vec<PauliString>> {
        match *self {
            Context::Row(r) => Ok(array.row(r)?.to_vec()),
            Context::Col(c) => Ok(array.column(c)?.into_iter().cloned().collect()),
            Context::RowTimesCol(..) => Ok(vec![self.operator(array)?]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub coefficient: i64,
    pub context: Context,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observable {
    pub form: XksForm,
    pub constant: i64,
    pub terms: Vec<Term>,
}

impl Observable {
    pub fn new(q: usize, form: XksForm) -> Result<Observable> {
        let plus = |context| Term { coefficient: 1, context };
        let minus = |context| Term { coefficient: -1, context };
        match form {
            XksForm::TwoQubit => {
                if q != 2 {
                    return Err(Error::InvalidInput(format!("two-qubit form needs q = 2, got q = {q}")));
                }
                Ok(Observable {
                    form,
                    constant: 0,
                    terms: vec![
                        plus(Context::Row(1)),
                        plus(Context::Row(2)),
                        plus(Context::Row(3)),
                        plus(Context::Col(1)),
                        plus(Context::Col(2)),
                        minus(Context::Col(3)),
                    ],
                })
            }
            XksForm::General => {
                if q < 2 {
                    return Err(Error::InvalidSize(format!("q = {q}: need q >= 2")));
                }
                let mut terms = vec![plus(Context::Row(1)), plus(Context::Row(2))];
                terms.extend((1..=q).map(|j| plus(Context::Col(j))));
                terms.push(minus(Context::RowTimesCol(3, q + 1)));
                Ok(Observable { form, constant: 1, terms })
            }
        }
    }

    /// Value when every context takes its quantum prediction. Each term's
    /// operator must reduce to a real scalar, which makes the value state
    /// independent.
    pub fn symbolic_value(&self, array: &MagicArray) -> Result<i64> {
        self.check_array(array)?;
        let mut total = self.constant;
        for t in &self.terms {
            let op = t.context.operator(array)?;
            let sign = op
                .scalar_value()
                .and_then(|p| p.as_sign())
                .ok_or_else(|| Error::Internal(format!("{} is not a real scalar: {op}", t.context.label())))?;
            total += t.coefficient * sign as i64;
        }
        Ok(total)
    }

    pub(crate) fn check_array(&self, array: &MagicArray) -> Result<()> {
        let needed = match self.form {
            XksForm::TwoQubit => 2,
            XksForm::General => self.terms.len() - 3,
        };
        if array.q() != needed {
            return Err(Error::InvalidInput(format!("observable built for q = {needed}, array has q = {}", array.q())));
        }
        Ok(())
    }
}
