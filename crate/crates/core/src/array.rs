//! The generalized 3×(q+1) magic array.
//!
//! Row 1 holds `Z_j`, row 2 holds `X_{π(j)}` and row 3 holds their product for
//! columns `j = 1..q`; column `q+1` holds `Z^{⊗q}`, `X^{⊗q}` and `Y^{⊗q}`.
//! Rows and columns are 1-based throughout this module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString, Phase};

/// Bijection of `{1..q}` with no fixed point; `π(j)` is the qubit of the `X`
/// placed in column `j` of row 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Permutation> {
        let q = images.len();
        if q < 2 {
            return Err(Error::InvalidSize(format!("no fixed-point-free permutation of {q} element(s)")));
        }
        let mut seen = vec![false; q + 1];
        for (j, &image) in images.iter().enumerate() {
            if image == 0 || image > q {
                return Err(Error::InvalidPermutation(format!("image {image} outside 1..={q}")));
            }
            if std::mem::replace(&mut seen[image], true) {
                return Err(Error::InvalidPermutation(format!("{image} appears twice")));
            }
            if image == j + 1 {
                return Err(Error::InvalidPermutation(format!("fixed point at {image}")));
            }
        }
        Ok(Permutation(images))
    }

    /// `(2, 3, …, q, 1)`.
    pub fn cyclic_shift(q: usize) -> Result<Permutation> {
        Permutation::new((2..=q).chain(std::iter::once(1)).collect())
    }

    /// `(q, q-1, …, 1)`; has a fixed point for odd `q`.
    pub fn reversal(q: usize) -> Result<Permutation> {
        Permutation::new((1..=q).rev().collect())
    }

    /// Parses `"2,3,1"`.
    pub fn parse(text: &str) -> Result<Permutation> {
        let images = text
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::InvalidPermutation(format!("cannot parse {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `π(j)` for 1-based `j`.
    pub fn image(&self, j: usize) -> usize {
        self.0[j - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_involution(&self) -> bool {
        (1..=self.len()).all(|j| self.image(self.image(j)) == j)
    }

    /// Number of qubits whose `Z` precedes its `X` when row 3 is read left to
    /// right: `#{j : π(j) < j}`.
    pub fn m(&self) -> usize {
        (1..=self.len()).filter(|&j| self.image(j) < j).count()
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.0
    }
}

impl std::fmt::Display for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

pub fn m_of(perm: &Permutation) -> usize {
    perm.m()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagicArray {
    q: usize,
    perm: Permutation,
    grid: Vec<Vec<PauliString>>,
}

/// JSON form `{"q": int, "perm": [int...], "grid": [[string...]...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayDocument {
    pub q: usize,
    pub perm: Vec<usize>,
    pub grid: Vec<Vec<PauliString>>,
}

impl MagicArray {
    pub fn build(q: usize, perm: &Permutation) -> Result<MagicArray> {
        if q < 2 {
            return Err(Error::InvalidSize(format!(
                "the array needs q >= 2 (no fixed-point-free permutation of {q} element(s))"
            )));
        }
        if perm.len() != q {
            return Err(Error::InvalidPermutation(format!("permutation has {} entries, expected {q}", perm.len())));
        }
        let mut grid = vec![Vec::with_capacity(q + 1), Vec::with_capacity(q + 1), Vec::with_capacity(q + 1)];
        for j in 1..=q {
            let z = PauliString::embed(Letter::Z, j, q)?;
            let x = PauliString::embed(Letter::X, perm.image(j), q)?;
            let zx = z.mul(&x)?;
            grid[0].push(z);
            grid[1].push(x);
            grid[2].push(zx);
        }
        grid[0].push(PauliString::uniform(Letter::Z, q)?);
        grid[1].push(PauliString::uniform(Letter::X, q)?);
        grid[2].push(PauliString::uniform(Letter::Y, q)?);
        Ok(MagicArray { q, perm: perm.clone(), grid })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn num_cols(&self) -> usize {
        self.q + 1
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn m(&self) -> usize {
        self.perm.m()
    }

    pub fn cell(&self, row: usize, col: usize) -> Result<&PauliString> {
        self.check_row(row)?;
        self.check_col(col)?;
        Ok(&self.grid[row - 1][col - 1])
    }

    pub fn rows(&self) -> &[Vec<PauliString>] {
        &self.grid
    }

    pub fn row(&self, row: usize) -> Result<&[PauliString]> {
        self.check_row(row)?;
        Ok(&self.grid[row - 1])
    }

    pub fn column(&self, col: usize) -> Result<Vec<&PauliString>> {
        self.check_col(col)?;
        Ok(self.grid.iter().map(|r| &r[col - 1]).collect())
    }

    fn check_row(&self, row: usize) -> Result<()> {
        if !(1..=3).contains(&row) {
            return Err(Error::IndexOutOfRange(format!("row {row} not in 1..=3")));
        }
        Ok(())
    }

    fn check_col(&self, col: usize) -> Result<()> {
        if col == 0 || col > self.num_cols() {
            return Err(Error::IndexOutOfRange(format!("column {col} not in 1..={}", self.num_cols())));
        }
        Ok(())
    }

    pub fn row_product(&self, row: usize) -> Result<PauliString> {
        PauliString::product(self.row(row)?)
    }

    pub fn col_product(&self, col: usize) -> Result<PauliString> {
        PauliString::product(self.column(col)?)
    }

    /// Product of every row product and every column product, rows first.
    /// Classically this is +1; −1 witnesses the contradiction.
    pub fn grand_product(&self) -> Result<Phase> {
        let mut acc = PauliString::identity(self.q)?;
        for r in 1..=3 {
            acc = acc.mul(&self.row_product(r)?)?;
        }
        for c in 1..=self.num_cols() {
            acc = acc.mul(&self.col_product(c)?)?;
        }
        match acc.scalar_value() {
            Some(phase) if phase.is_real() => Ok(phase),
            Some(phase) => Err(Error::Internal(format!("grand product is imaginary ({phase})"))),
            None => Err(Error::Internal(format!("grand product is not scalar: {acc}"))),
        }
    }

    pub fn is_contradiction(&self) -> Result<bool> {
        Ok(self.grand_product()? == Phase::MINUS_ONE)
    }

    pub fn commutation_report(&self) -> CommutationReport {
        let mut rows = Vec::with_capacity(3);
        for r in 1..=3 {
            let cells: Vec<(usize, usize)> = (1..=self.num_cols()).map(|c| (r, c)).collect();
            rows.push(self.context_report(format!("R{r}"), &cells));
        }
        let mut columns = Vec::with_capacity(self.num_cols());
        for c in 1..=self.num_cols() {
            let cells: Vec<(usize, usize)> = (1..=3).map(|r| (r, c)).collect();
            columns.push(self.context_report(format!("C{c}"), &cells));
        }
        CommutationReport { rows, columns }
    }

    fn context_report(&self, label: String, cells: &[(usize, usize)]) -> ContextCommutation {
        let mut violations = Vec::new();
        for (a, &ca) in cells.iter().enumerate() {
            for &cb in &cells[a + 1..] {
                let pa = &self.grid[ca.0 - 1][ca.1 - 1];
                let pb = &self.grid[cb.0 - 1][cb.1 - 1];
                // same q by construction
                if !pa.commutes(pb).expect("cells share q") {
                    violations.push((ca, cb));
                }
            }
        }
        ContextCommutation { label, mutually_commuting: violations.is_empty(), violations }
    }

    pub fn to_document(&self) -> ArrayDocument {
        ArrayDocument { q: self.q, perm: self.perm.images().to_vec(), grid: self.grid.clone() }
    }

    /// Rebuilds from `doc.q` and `doc.perm`, then requires the stored grid to
    /// match the rebuilt one cell for cell.
    pub fn from_document(doc: &ArrayDocument) -> Result<MagicArray> {
        let perm = Permutation::new(doc.perm.clone())?;
        let array = MagicArray::build(doc.q, &perm)?;
        if doc.grid != array.grid {
            return Err(Error::InvalidInput("array grid does not match the grid built from q and perm".into()));
        }
        Ok(array)
    }

    /// Plain-text grid, one row per line, cells tab-separated.
    pub fn to_text(&self) -> String {
        let mut out = format!("q = {}, perm = ({}), m = {}\n", self.q, self.perm, self.m());
        for row in &self.grid {
            let cells: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContextCommutation {
    pub label: String,
    pub mutually_commuting: bool,
    /// Anticommuting cell pairs as `((row, col), (row, col))`.
    pub violations: Vec<((usize, usize), (usize, usize))>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutationReport {
    pub rows: Vec<ContextCommutation>,
    pub columns: Vec<ContextCommutation>,
}

impl CommutationReport {
    pub fn all_commuting(&self) -> bool {
        self.rows.iter().chain(&self.columns).all(|c| c.mutually_commuting)
    }

    pub fn row(&self, r: usize) -> &ContextCommutation {
        &self.rows[r - 1]
    }

    pub fn column(&self, c: usize) -> &ContextCommutation {
        &self.columns[c - 1]
    }
}

/// Largest `q` for which the commuting-context search enumerates every
/// derangement.
pub const EXHAUSTIVE_SEARCH_MAX_Q: usize = 8;

/// Lexicographically smallest derangement whose array has grand product −1.
///
/// With `require_commuting_contexts`, every row and column must also be a
/// mutually commuting set. For `q <= 8` that search is exhaustive. Beyond it
/// the candidates are narrowed structurally and the returned witness is
/// checked directly:
/// odd `q` makes `Z^{⊗q}` and `X^{⊗q}` anticommute in column `q+1`, and a
/// commuting row 3 forces `π` to be an involution, whose `m` is `q/2`.
pub fn find_contradiction_perm(q: usize, require_commuting_contexts: bool) -> Result<Option<Permutation>> {
    if q < 2 {
        return Err(Error::InvalidSize(format!("q = {q}: need q >= 2")));
    }
    if !require_commuting_contexts {
        return Ok(first_derangement(q, &mut |p| p.m() % 2 == 1));
    }
    if q <= EXHAUSTIVE_SEARCH_MAX_Q {
        let mut failure = None;
        let found = first_derangement(q, &mut |p| {
            if p.m() % 2 == 0 {
                return false;
            }
            match MagicArray::build(q, p) {
                Ok(a) => a.commutation_report().all_commuting(),
                Err(e) => {
                    failure.get_or_insert(e);
                    false
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        return Ok(found);
    }
    if q % 2 == 1 || (q / 2).is_multiple_of(2) {
        return Ok(None);
    }
    // lexicographically first fixed-point-free involution
    let images: Vec<usize> = (1..=q).map(|j| if j % 2 == 1 { j + 1 } else { j - 1 }).collect();
    let perm = Permutation::new(images)?;
    let array = MagicArray::build(q, &perm)?;
    if !array.commutation_report().all_commuting() || !array.is_contradiction()? {
        return Err(Error::Internal(format!("involution witness failed its check at q = {q}")));
    }
    Ok(Some(perm))
}

/// Depth-first walk over derangements of `{1..q}` in lexicographic order,
/// returning the first one accepted.
fn first_derangement(q: usize, accept: &mut dyn FnMut(&Permutation) -> bool) -> Option<Permutation> {
    fn walk(
        j: usize,
        q: usize,
        images: &mut Vec<usize>,
        used: &mut [bool],
        accept: &mut dyn FnMut(&Permutation) -> bool,
    ) -> Option<Permutation> {
        if j > q {
            let p = Permutation(images.clone());
            return accept(&p).then_some(p);
        }
        for v in 1..=q {
            if v == j || used[v] {
                continue;
            }
            // the last slot must not be left with only its own index
            if j == q - 1 && !used[q] && v != q {
                continue;
            }
            used[v] = true;
            images.push(v);
            if let Some(p) = walk(j + 1, q, images, used, accept) {
                return Some(p);
            }
            images.pop();
            used[v] = false;
        }
        None
    }
    let mut images = Vec::with_capacity(q);
    let mut used = vec![false; q + 1];
    walk(1, q, &mut images, &mut used, accept)
}

/// Every derangement of `{1..q}` in lexicographic order.
pub fn derangements(q: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    if q >= 2 {
        first_derangement(q, &mut |p| {
            out.push(p.clone());
            false
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn cells(a: &MagicArray) -> Vec<Vec<String>> {
        a.rows().iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect()
    }

    #[test]
    fn permutation_validation() {
        assert!(matches!(Permutation::new(vec![1]), Err(Error::InvalidSize(_))));
        assert!(matches!(Permutation::new(vec![1, 2]), Err(Error::InvalidPermutation(_))));
        assert!(matches!(Permutation::new(vec![2, 2]), Err(Error::InvalidPermutation(_))));
        assert!(matches!(Permutation::new(vec![2, 3]), Err(Error::InvalidPermutation(_))));
        assert!(Permutation::parse("2, 3,1").is_ok());
        assert!(Permutation::parse("2,x").is_err());
        assert!(Permutation::reversal(3).is_err());
    }

    #[test]
    fn two_qubit_array_matches_mermin_peres() {
        let a = MagicArray::build(2, &perm(&[2, 1])).unwrap();
        // Z1X2 and X1Z2 are products of commuting factors, so no phase
        let expected = [["+ZI", "+IZ", "+ZZ"], ["+IX", "+XI", "+XX"], ["+ZX", "+XZ", "+YY"]];
        assert_eq!(cells(&a), expected.map(|r| r.map(String::from).to_vec()).to_vec());
        assert_eq!(a.col_product(3).unwrap().scalar_value(), Some(Phase::MINUS_ONE));
        assert_eq!(a.row_product(3).unwrap().scalar_value(), Some(Phase::ONE));
        assert_eq!(a.grand_product().unwrap(), Phase::MINUS_ONE);
        assert!(a.commutation_report().all_commuting());
    }

    #[test]
    fn build_errors() {
        assert!(MagicArray::build(1, &perm(&[2, 1])).is_err());
        assert!(MagicArray::build(3, &perm(&[2, 1])).is_err());
        let a = MagicArray::build(2, &perm(&[2, 1])).unwrap();
        assert!(a.row_product(4).is_err());
        assert!(a.col_product(0).is_err());
        assert!(a.col_product(4).is_err());
    }

    #[test]
    fn m_values() {
        assert_eq!(m_of(&perm(&[2, 1])), 1);
        assert_eq!(m_of(&perm(&[4, 3, 2, 1])), 2);
        assert_eq!(m_of(&perm(&[2, 3, 4, 1])), 1);
    }

    #[test]
    fn four_qubit_worked_example() {
        let a = MagicArray::build(4, &perm(&[4, 3, 2, 1])).unwrap();
        assert_eq!(a.col_product(5).unwrap().scalar_value(), Some(Phase::ONE));
        assert_eq!(a.grand_product().unwrap(), Phase::ONE);
        let b = MagicArray::build(4, &perm(&[2, 3, 4, 1])).unwrap();
        assert_eq!(b.grand_product().unwrap(), Phase::MINUS_ONE);
    }

    #[test]
    fn contradiction_search() {
        assert_eq!(find_contradiction_perm(2, false).unwrap(), Some(perm(&[2, 1])));
        assert_eq!(find_contradiction_perm(3, false).unwrap(), Some(perm(&[2, 3, 1])));
        assert_eq!(find_contradiction_perm(4, false).unwrap(), Some(perm(&[2, 3, 4, 1])));
        assert!(find_contradiction_perm(1, false).is_err());
        assert_eq!(find_contradiction_perm(3, true).unwrap(), None);
        assert_eq!(find_contradiction_perm(4, true).unwrap(), None);
        assert_eq!(find_contradiction_perm(6, true).unwrap(), Some(perm(&[2, 1, 4, 3, 6, 5])));
        assert_eq!(find_contradiction_perm(10, true).unwrap().map(|p| p.m()), Some(5));
        assert_eq!(find_contradiction_perm(12, true).unwrap(), None);
        let big = find_contradiction_perm(300, false).unwrap().unwrap();
        assert_eq!(big.m() % 2, 1);
        assert_eq!(MagicArray::build(300, &big).unwrap().grand_product().unwrap(), Phase::MINUS_ONE);
    }

    #[test]
    fn derangement_counts() {
        let counts: Vec<usize> = (2..=7).map(|q| derangements(q).len()).collect();
        assert_eq!(counts, vec![1, 2, 9, 44, 265, 1854]);
        let d = derangements(4);
        assert!(d.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn document_round_trip() {
        let a = MagicArray::build(3, &perm(&[3, 1, 2])).unwrap();
        let json = serde_json::to_string(&a.to_document()).unwrap();
        let doc: ArrayDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(MagicArray::from_document(&doc).unwrap(), a);
        let mut tampered = doc.clone();
        tampered.grid[0][0] = PauliString::parse("-ZII").unwrap();
        assert!(MagicArray::from_document(&tampered).is_err());
    }
}
