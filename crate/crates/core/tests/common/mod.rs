//! Test oracles that share no code path with the library's symplectic
//! algebra: dense matrices built from the 2×2 Pauli matrices, and direct
//! enumeration helpers.
#![allow(dead_code)]

use ksmagic::{MagicArray, PauliString, Permutation};
use num_complex::Complex64;
use rand::Rng;

pub type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_2x2(letter: char) -> Matrix {
    match letter {
        'I' => vec![vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(1., 0.)]],
        'X' => vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]],
        'Y' => vec![vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]],
        'Z' => vec![vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(-1., 0.)]],
        _ => panic!("bad letter {letter}"),
    }
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0., 0.); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![c(0., 0.); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0., 0.) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn adjoint(a: &Matrix) -> Matrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

pub fn approx_eq(a: &Matrix, b: &Matrix) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < 1e-12)
}

/// Dense matrix from the text form: prefix phase times ⊗ of letters, qubit 1
/// as the leftmost tensor factor.
pub fn dense(p: &PauliString) -> Matrix {
    let text = p.to_string();
    let (phase, body) = if let Some(r) = text.strip_prefix("-i") {
        (c(0., -1.), r)
    } else if let Some(r) = text.strip_prefix('-') {
        (c(-1., 0.), r)
    } else if let Some(r) = text.strip_prefix('i') {
        (c(0., 1.), r)
    } else {
        (c(1., 0.), text.strip_prefix('+').unwrap())
    };
    let mut m = vec![vec![c(1., 0.)]];
    for ch in body.chars() {
        m = kron(&m, &pauli_2x2(ch));
    }
    m.iter().map(|row| row.iter().map(|x| x * phase).collect()).collect()
}

pub fn dense_apply(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn random_pauli<R: Rng>(rng: &mut R, q: usize) -> PauliString {
    let prefixes = ["+", "-", "i", "-i"];
    let letters = ['I', 'X', 'Y', 'Z'];
    let mut s = prefixes[rng.random_range(0..4)].to_string();
    for _ in 0..q {
        s.push(letters[rng.random_range(0..4)]);
    }
    PauliString::parse(&s).unwrap()
}

/// All permutations of 1..=q in lexicographic order, by plain recursion.
pub fn all_permutations(q: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, q: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == q {
            out.push(prefix.clone());
            return;
        }
        for v in 1..=q {
            if !prefix.contains(&v) {
                prefix.push(v);
                rec(prefix, q, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), q, &mut out);
    out
}

pub fn all_derangements(q: usize) -> Vec<Permutation> {
    all_permutations(q)
        .into_iter()
        .filter(|p| p.iter().enumerate().all(|(j, &v)| v != j + 1))
        .map(|p| Permutation::new(p).unwrap())
        .collect()
}

/// m by reading row 3 left to right and recording, for each qubit, whether
/// its Z appears before its X. Cell j of row 3 is written `Z_j · X_{π(j)}`.
pub fn m_by_collection(array: &MagicArray) -> usize {
    let q = array.q();
    let mut sequence: Vec<Vec<char>> = vec![Vec::new(); q + 1];
    for j in 1..=q {
        let cell = array.cell(3, j).unwrap();
        // the cell is the product of row 1 and row 2 cells in this column
        let z_qubit = (1..=q).find(|&k| array.cell(1, j).unwrap().z_bit(k)).unwrap();
        let x_qubit = (1..=q).find(|&k| array.cell(2, j).unwrap().x_bit(k)).unwrap();
        assert!(cell.z_bit(z_qubit) && cell.x_bit(x_qubit));
        sequence[z_qubit].push('Z');
        sequence[x_qubit].push('X');
    }
    (1..=q).filter(|&k| sequence[k] == ['Z', 'X']).count()
}
