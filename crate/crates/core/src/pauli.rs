//! Phase-tracked Pauli strings in symplectic form.
//!
//! A [`PauliString`] on `q` qubits stores the operator
//! `i^s · X^{x_1} Z^{z_1} ⊗ … ⊗ X^{x_q} Z^{z_q}` as two bit vectors and an
//! exponent `s` mod 4. Every reordering sign produced by multiplication is
//! pushed into `s`, so equality of the fields is equality of operators.
//!
//! Qubits are numbered from 1 in the public API and in the text format, with
//! qubit 1 printed leftmost.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A scalar `i^k`, `k` mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `Some(±1)` for real phases.
    pub fn as_sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn pow(self, n: u64) -> Phase {
        Phase(((self.0 as u64 * (n % 4)) % 4) as u8)
    }

    /// Text prefix used by [`PauliString`]'s format: `+`, `i`, `-`, `-i`.
    pub fn prefix(self) -> &'static str {
        match self.0 {
            0 => "+",
            1 => "i",
            2 => "-",
            _ => "-i",
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        self * Phase::MINUS_ONE
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        };
        f.write_str(s)
    }
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        // (x, z)
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Z => (false, true),
            Letter::Y => (true, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (false, true) => Letter::Z,
            (true, true) => Letter::Y,
        }
    }

    fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_qubits: usize,
    phase_exp: u8,
    x: Vec<u64>,
    z: Vec<u64>,
}

fn words(num_qubits: usize) -> usize {
    num_qubits.div_ceil(WORD)
}

fn and_popcount(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(l, r)| (l & r).count_ones()).sum()
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Result<PauliString> {
        if num_qubits == 0 {
            return Err(Error::InvalidSize("a Pauli string needs at least one qubit".into()));
        }
        Ok(PauliString { num_qubits, phase_exp: 0, x: vec![0; words(num_qubits)], z: vec![0; words(num_qubits)] })
    }

    /// `letter` on qubit `qubit` (1-based), identity elsewhere, phase +1.
    pub fn embed(letter: Letter, qubit: usize, num_qubits: usize) -> Result<PauliString> {
        let mut p = PauliString::identity(num_qubits)?;
        if qubit == 0 || qubit > num_qubits {
            return Err(Error::QubitOutOfRange { index: qubit, num_qubits });
        }
        p.set_letter(qubit, letter);
        Ok(p)
    }

    /// The same letter on every qubit, phase +1.
    pub fn uniform(letter: Letter, num_qubits: usize) -> Result<PauliString> {
        let mut p = PauliString::identity(num_qubits)?;
        for k in 1..=num_qubits {
            p.set_letter(k, letter);
        }
        Ok(p)
    }

    /// Builds a string from a display phase and letters (qubit 1 first).
    pub fn from_letters(phase: Phase, letters: &[Letter]) -> Result<PauliString> {
        let mut p = PauliString::identity(letters.len())?;
        for (k, &l) in letters.iter().enumerate() {
            p.set_letter(k + 1, l);
        }
        p.phase_exp = (p.phase_exp + phase.exponent()) % 4;
        Ok(p)
    }

    // Overwrites qubit `k` with `letter` so that the display phase is unchanged.
    fn set_letter(&mut self, k: usize, letter: Letter) {
        let was_y = self.letter(k) == Letter::Y;
        let (xb, zb) = letter.bits();
        let (w, b) = ((k - 1) / WORD, (k - 1) % WORD);
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
        // Y = i·XZ
        let delta = (letter == Letter::Y) as u8 + 3 * was_y as u8;
        self.phase_exp = (self.phase_exp + delta) % 4;
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// The stored exponent `s` of `i^s · ⊗ X^x Z^z`.
    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    pub fn x_bit(&self, qubit: usize) -> bool {
        let k = qubit - 1;
        self.x[k / WORD] >> (k % WORD) & 1 == 1
    }

    pub fn z_bit(&self, qubit: usize) -> bool {
        let k = qubit - 1;
        self.z[k / WORD] >> (k % WORD) & 1 == 1
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        Letter::from_bits(self.x_bit(qubit), self.z_bit(qubit))
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (1..=self.num_qubits).map(|k| self.letter(k))
    }

    fn y_count(&self) -> u32 {
        and_popcount(&self.x, &self.z)
    }

    /// Phase in front of the letter form, `p = phase · ⊗ letters`.
    pub fn display_phase(&self) -> Phase {
        Phase::from_exponent(self.phase_exp as i64 - self.y_count() as i64)
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn weight(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones()).sum()
    }

    /// The phase if this string is a multiple of the identity.
    pub fn scalar_value(&self) -> Option<Phase> {
        self.is_identity_up_to_phase().then_some(Phase(self.phase_exp))
    }

    /// `P† = P` iff `s ≡ |x ∧ z| (mod 2)`; see the dense-oracle tests.
    pub fn is_hermitian(&self) -> bool {
        (self.phase_exp as u32 + self.y_count()).is_multiple_of(2)
    }

    fn check_same(&self, other: &PauliString) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::QubitMismatch { left: self.num_qubits, right: other.num_qubits });
        }
        Ok(())
    }

    /// Matrix product `self × other`.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        self.check_same(other)?;
        // Z^a X^b = (-1)^{a·b} X^b Z^a
        let swaps = and_popcount(&self.z, &other.x);
        let phase_exp = ((self.phase_exp as u32 + other.phase_exp as u32 + 2 * swaps) % 4) as u8;
        Ok(PauliString {
            num_qubits: self.num_qubits,
            phase_exp,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        })
    }

    /// Left-to-right product of a non-empty sequence.
    pub fn product<'a, I>(items: I) -> Result<PauliString>
    where
        I: IntoIterator<Item = &'a PauliString>,
    {
        let mut it = items.into_iter();
        let first = it.next().ok_or_else(|| Error::InvalidSize("product of an empty sequence".into()))?.clone();
        it.try_fold(first, |acc, p| acc.mul(p))
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_same(other)?;
        let pairing = and_popcount(&self.x, &other.z) + and_popcount(&self.z, &other.x);
        Ok(pairing.is_multiple_of(2))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> PauliString {
        // (X^x Z^z)† = Z^z X^x = (-1)^{|x∧z|} X^x Z^z
        let s = (4 - self.phase_exp as u32 + 2 * self.y_count()) % 4;
        PauliString { phase_exp: s as u8, ..self.clone() }
    }

    pub fn with_phase(&self, phase: Phase) -> PauliString {
        PauliString { phase_exp: (self.phase_exp + phase.exponent()) % 4, ..self.clone() }
    }

    pub fn parse(text: &str) -> Result<PauliString> {
        let err = |reason: &str| Error::Parse { text: text.to_string(), reason: reason.to_string() };
        let (phase, body) = if let Some(rest) = text.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = text.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = text.strip_prefix('+') {
            (Phase::ONE, rest)
        } else if let Some(rest) = text.strip_prefix('i') {
            (Phase::I, rest)
        } else {
            (Phase::ONE, text)
        };
        if body.is_empty() {
            return Err(err("empty body"));
        }
        let letters = body
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| err(&format!("illegal letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        PauliString::from_letters(phase, &letters)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_phase().prefix())?;
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PauliString::parse(s)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        PauliString::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    #[test]
    fn identity_and_errors() {
        assert_eq!(PauliString::identity(2).unwrap().to_string(), "+II");
        assert!(matches!(PauliString::identity(0), Err(Error::InvalidSize(_))));
        assert_eq!(PauliString::embed(Letter::X, 3, 2), Err(Error::QubitOutOfRange { index: 3, num_qubits: 2 }));
        assert!(PauliString::embed(Letter::X, 0, 2).is_err());
    }

    #[test]
    fn embed_positions() {
        assert_eq!(PauliString::embed(Letter::Z, 1, 2).unwrap().to_string(), "+ZI");
        let y = PauliString::embed(Letter::Y, 2, 2).unwrap();
        assert_eq!(y.to_string(), "+IY");
        assert!(y.x_bit(2) && y.z_bit(2));
        assert_eq!(y.phase_exp(), 1);
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(p("X").mul(&p("Z")).unwrap().to_string(), "-iY");
        let zxy = p("Z").mul(&p("X").mul(&p("Y")).unwrap()).unwrap();
        assert_eq!(zxy.scalar_value(), Some(Phase::I));
        for l in ["X", "Y", "Z"] {
            assert_eq!(p(l).mul(&p(l)).unwrap(), p("I"));
        }
        assert_eq!(p("+XI").mul(&p("+ZI")).unwrap().to_string(), "-iYI");
    }

    #[test]
    fn mismatched_sizes() {
        assert!(matches!(p("X").mul(&p("XX")), Err(Error::QubitMismatch { .. })));
        assert!(p("X").commutes(&p("XX")).is_err());
    }

    #[test]
    fn commutation() {
        let z1 = PauliString::embed(Letter::Z, 1, 2).unwrap();
        let x2 = PauliString::embed(Letter::X, 2, 2).unwrap();
        assert!(z1.commutes(&x2).unwrap());
        assert!(!p("Z").commutes(&p("X")).unwrap());
        assert!(!p("ZZZ").commutes(&p("XXX")).unwrap());
        assert!(p("ZZ").commutes(&p("XX")).unwrap());
    }

    #[test]
    fn scalar_values() {
        assert_eq!(p("iII").scalar_value(), Some(Phase::I));
        assert_eq!(p("+ZI").scalar_value(), None);
    }

    #[test]
    fn parse_forms() {
        let a = p("-iZX");
        assert_eq!(a.phase_exp(), 3);
        assert_eq!(a.letter(1), Letter::Z);
        assert_eq!(a.letter(2), Letter::X);
        assert_eq!(p("XY").to_string(), "+XY");
        assert_eq!(p("iY").to_string(), "iY");
        for bad in ["Q", "", "+", "-i", "i-X", "+XQ", "xz"] {
            assert!(PauliString::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn hermiticity() {
        assert!(p("Y").is_hermitian());
        assert!(p("-XYZ").is_hermitian());
        assert!(!p("iZ").is_hermitian());
        assert!(!p("X").mul(&p("Z")).unwrap().is_hermitian());
    }

    #[test]
    fn wide_strings_cross_word_boundary() {
        let q = 130;
        let a = PauliString::embed(Letter::Z, 100, q).unwrap();
        let b = PauliString::embed(Letter::X, 100, q).unwrap();
        assert!(!a.commutes(&b).unwrap());
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.letter(100), Letter::Y);
        assert_eq!(ab.display_phase(), Phase::I);
        let zs = PauliString::uniform(Letter::Z, q).unwrap();
        let xs = PauliString::uniform(Letter::X, q).unwrap();
        let ys = PauliString::uniform(Letter::Y, q).unwrap();
        let c = PauliString::product([&zs, &xs, &ys]).unwrap();
        assert_eq!(c.scalar_value(), Some(Phase::I.pow(q as u64)));
    }

    #[test]
    fn adjoint_inverts() {
        for s in ["iXZ", "-Y", "ZYX", "-iIY"] {
            let a = p(s);
            assert_eq!(a.mul(&a.adjoint()).unwrap().scalar_value(), Some(Phase::ONE));
        }
    }
}
