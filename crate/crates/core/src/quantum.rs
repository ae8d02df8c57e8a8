//! Dense statevector predictions: expectations, projective measurement and
//! noisy sampling of the X_KS contexts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::array::MagicArray;
use crate::error::{Error, Result};
use crate::observable::{Observable, XksForm};
use crate::pauli::PauliString;

pub const MAX_STATE_QUBITS: usize = 20;
pub const MAX_SAMPLING_QUBITS: usize = 12;
pub const NORM_TOLERANCE: f64 = 1e-12;
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Basis(u64),
    /// Haar-random state from the given seed.
    Random(u64),
    Ghz,
}

impl StateKind {
    /// `basis:I`, `random:SEED` or `ghz`.
    pub fn parse(text: &str) -> Result<StateKind> {
        let bad = || Error::InvalidInput(format!("state {text:?}: expected basis:I, random:SEED or ghz"));
        match text.split_once(':') {
            None if text == "ghz" => Ok(StateKind::Ghz),
            Some(("basis", i)) => i.parse().map(StateKind::Basis).map_err(|_| bad()),
            Some(("random", s)) => s.parse().map(StateKind::Random).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for StateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateKind::Basis(i) => write!(f, "basis:{i}"),
            StateKind::Random(s) => write!(f, "random:{s}"),
            StateKind::Ghz => f.write_str("ghz"),
        }
    }
}

/// Amplitudes over the computational basis; qubit 1 is the most significant
/// bit of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn new(kind: StateKind, num_qubits: usize) -> Result<Statevector> {
        if num_qubits == 0 || num_qubits > MAX_STATE_QUBITS {
            return Err(Error::InvalidSize(format!(
                "statevector needs 1..={MAX_STATE_QUBITS} qubits, got {num_qubits}"
            )));
        }
        let dim = 1usize << num_qubits;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        match kind {
            StateKind::Basis(i) => {
                if i >= dim as u64 {
                    return Err(Error::IndexOutOfRange(format!("basis index {i} >= 2^{num_qubits}")));
                }
                amplitudes[i as usize] = Complex64::new(1.0, 0.0);
            }
            StateKind::Ghz => {
                let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                amplitudes[0] = a;
                amplitudes[dim - 1] = a;
            }
            StateKind::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for a in amplitudes.iter_mut() {
                    *a = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                }
                normalize(&mut amplitudes);
            }
        }
        Ok(Statevector { num_qubits, amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Statevector> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() || dim > 1 << MAX_STATE_QUBITS {
            return Err(Error::InvalidSize(format!("{dim} amplitudes is not 2^q for 1 <= q <= {MAX_STATE_QUBITS}")));
        }
        let sv = Statevector { num_qubits: dim.trailing_zeros() as usize, amplitudes };
        if (sv.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidInput(format!("state is not normalized (|ψ|² = {})", sv.norm_sqr())));
        }
        Ok(sv)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check(&self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { operator: p.num_qubits(), state: self.num_qubits });
        }
        Ok(())
    }

    /// `P|ψ⟩`.
    pub fn apply(&self, p: &PauliString) -> Result<Statevector> {
        self.check(p)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        IndexMasks::new(p).apply(&self.amplitudes, &mut out);
        Ok(Statevector { num_qubits: self.num_qubits, amplitudes: out })
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, p: &PauliString) -> Result<Complex64> {
        self.check(p)?;
        Ok(IndexMasks::new(p).expectation(&self.amplitudes))
    }

    /// Projective measurement of a Hermitian Pauli string with projectors
    /// `(I ± P)/2`; collapses in place and returns the ±1 outcome.
    pub fn measure_in_place<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<i8> {
        self.check(p)?;
        if !p.is_hermitian() {
            return Err(Error::NotHermitian { operator: p.to_string(), phase: p.display_phase().to_string() });
        }
        let masks = IndexMasks::new(p);
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        Ok(masks.measure(&mut self.amplitudes, &mut scratch, rng))
    }
}

fn normalize(amplitudes: &mut [Complex64]) {
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amplitudes.iter_mut() {
        *a /= norm;
    }
}

pub fn make_state(kind: StateKind, num_qubits: usize) -> Result<Statevector> {
    Statevector::new(kind, num_qubits)
}

pub fn expectation(p: &PauliString, psi: &Statevector) -> Result<Complex64> {
    psi.expectation(p)
}

pub fn measure<R: Rng + ?Sized>(p: &PauliString, psi: &Statevector, rng: &mut R) -> Result<(i8, Statevector)> {
    let mut post = psi.clone();
    let outcome = post.measure_in_place(p, rng)?;
    Ok((outcome, post))
}

// A Pauli string as basis-index masks: P|b⟩ = i^s (−1)^{|z∧b|} |b ⊕ x⟩.
#[derive(Debug, Clone)]
struct IndexMasks {
    x: usize,
    z: usize,
    phase: Complex64,
}

impl IndexMasks {
    fn new(p: &PauliString) -> IndexMasks {
        let q = p.num_qubits();
        let (mut x, mut z) = (0usize, 0usize);
        for k in 1..=q {
            x |= (p.x_bit(k) as usize) << (q - k);
            z |= (p.z_bit(k) as usize) << (q - k);
        }
        let phase = match p.phase_exp() {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        IndexMasks { x, z, phase }
    }

    #[inline]
    fn coeff(&self, b: usize) -> Complex64 {
        if (self.z & b).count_ones() & 1 == 1 {
            -self.phase
        } else {
            self.phase
        }
    }

    fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        for (b, a) in psi.iter().enumerate() {
            out[b ^ self.x] = self.coeff(b) * a;
        }
    }

    fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        psi.iter().enumerate().map(|(b, a)| psi[b ^ self.x].conj() * self.coeff(b) * a).sum()
    }

    fn measure<R: Rng + ?Sized>(&self, psi: &mut [Complex64], scratch: &mut [Complex64], rng: &mut R) -> i8 {
        self.apply(psi, scratch);
        let p_plus: f64 = psi.iter().zip(scratch.iter()).map(|(a, pa)| ((a + pa) * 0.5).norm_sqr()).sum();
        let outcome: i8 = if rng.random::<f64>() < p_plus { 1 } else { -1 };
        let sign = outcome as f64;
        for (a, pa) in psi.iter_mut().zip(scratch.iter()) {
            *a = (*a + pa * sign) * 0.5;
        }
        normalize(psi);
        outcome
    }
}

/// `Σ coef·⟨op⟩` for the chosen form; imaginary parts must cancel.
pub fn exact_xks_form(array: &MagicArray, form: XksForm, psi: &Statevector) -> Result<f64> {
    let observable = Observable::new(array.q(), form)?;
    observable.check_array(array)?;
    let mut total = Complex64::new(observable.constant as f64, 0.0);
    for t in &observable.terms {
        total += psi.expectation(&t.context.operator(array)?)? * t.coefficient as f64;
    }
    if total.im.abs() > IMAGINARY_TOLERANCE {
        return Err(Error::Internal(format!("X_KS has imaginary part {}", total.im)));
    }
    Ok(total.re)
}

/// `1 + ⟨R1⟩ + ⟨R2⟩ + Σ⟨Cj⟩ − ⟨R3·C_{q+1}⟩`.
pub fn exact_xks(array: &MagicArray, psi: &Statevector) -> Result<f64> {
    exact_xks_form(array, XksForm::General, psi)
}

/// One sequential measurement of a context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub context: String,
    pub outcomes: Vec<i8>,
    pub product: i8,
    pub flips: usize,
    /// Some pair of cells in the context anticommutes.
    pub order_dependent: bool,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::InvalidProbability(format!("epsilon = {epsilon} not in [0, 1/2]")));
    }
    Ok(())
}

/// A context ready to be sampled repeatedly.
#[derive(Debug, Clone)]
pub struct PreparedContext {
    label: String,
    num_qubits: usize,
    cells: Vec<IndexMasks>,
    order_dependent: bool,
}

impl PreparedContext {
    pub fn new(label: impl Into<String>, cells: &[PauliString], num_qubits: usize) -> Result<PreparedContext> {
        if cells.is_empty() {
            return Err(Error::InvalidInput("empty context".into()));
        }
        if num_qubits > MAX_SAMPLING_QUBITS {
            return Err(Error::InvalidSize(format!("sampling needs q <= {MAX_SAMPLING_QUBITS}, got {num_qubits}")));
        }
        let mut order_dependent = false;
        for (i, c) in cells.iter().enumerate() {
            if c.num_qubits() != num_qubits {
                return Err(Error::DimensionMismatch { operator: c.num_qubits(), state: num_qubits });
            }
            if !c.is_hermitian() {
                return Err(Error::NotHermitian { operator: c.to_string(), phase: c.display_phase().to_string() });
            }
            for d in &cells[i + 1..] {
                order_dependent |= !c.commutes(d)?;
            }
        }
        Ok(PreparedContext {
            label: label.into(),
            num_qubits,
            cells: cells.iter().map(IndexMasks::new).collect(),
            order_dependent,
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn order_dependent(&self) -> bool {
        self.order_dependent
    }

    /// Measures every cell in order on a fresh copy of `psi`, then flips each
    /// outcome independently with probability `epsilon`.
    pub fn shot<R: Rng + ?Sized>(&self, psi: &Statevector, epsilon: f64, rng: &mut R) -> Result<ShotRecord> {
        check_epsilon(epsilon)?;
        if psi.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch { operator: self.num_qubits, state: psi.num_qubits });
        }
        let mut state = psi.amplitudes.clone();
        let mut scratch = vec![Complex64::new(0.0, 0.0); state.len()];
        let mut outcomes = Vec::with_capacity(self.cells.len());
        let mut flips = 0;
        for cell in &self.cells {
            let mut o = cell.measure(&mut state, &mut scratch, rng);
            if epsilon > 0.0 && rng.random_bool(epsilon) {
                o = -o;
                flips += 1;
            }
            outcomes.push(o);
        }
        let product = outcomes.iter().product();
        Ok(ShotRecord { context: self.label.clone(), outcomes, product, flips, order_dependent: self.order_dependent })
    }
}

pub fn run_context<R: Rng + ?Sized>(
    cells: &[PauliString],
    psi: &Statevector,
    epsilon: f64,
    rng: &mut R,
) -> Result<ShotRecord> {
    check_epsilon(epsilon)?;
    PreparedContext::new("context", cells, psi.num_qubits())?.shot(psi, epsilon, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextEstimate {
    pub context: String,
    pub coefficient: i64,
    pub num_cells: usize,
    pub mean: f64,
    pub standard_error: f64,
    /// Noise-free prediction `⟨ψ|op|ψ⟩` for this context.
    pub exact: f64,
    pub order_dependent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XksEstimate {
    pub q: usize,
    pub form: XksForm,
    pub shots: u64,
    pub epsilon: f64,
    pub value: f64,
    pub standard_error: f64,
    /// Noise-free value for the same state.
    pub exact: f64,
    pub contexts: Vec<ContextEstimate>,
}

pub fn estimate_xks<R: Rng + ?Sized>(
    array: &MagicArray,
    psi: &Statevector,
    shots: u64,
    epsilon: f64,
    rng: &mut R,
) -> Result<XksEstimate> {
    estimate_xks_with(array, XksForm::General, psi, shots, epsilon, rng, &mut |_| Ok(()))
}

/// Monte-Carlo estimate: `shots` runs of every context, with each shot
/// passed to `on_shot` in the order sampled. The product term of the general
/// form is measured as one operator.
pub fn estimate_xks_with<R: Rng + ?Sized>(
    array: &MagicArray,
    form: XksForm,
    psi: &Statevector,
    shots: u64,
    epsilon: f64,
    rng: &mut R,
    on_shot: &mut dyn FnMut(&ShotRecord) -> Result<()>,
) -> Result<XksEstimate> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be >= 1".into()));
    }
    check_epsilon(epsilon)?;
    let observable = Observable::new(array.q(), form)?;
    observable.check_array(array)?;
    if psi.num_qubits() != array.q() {
        return Err(Error::DimensionMismatch { operator: array.q(), state: psi.num_qubits() });
    }

    let mut contexts = Vec::with_capacity(observable.terms.len());
    let mut value = observable.constant as f64;
    let mut variance = 0.0;
    let mut exact_total = Complex64::new(observable.constant as f64, 0.0);
    for t in &observable.terms {
        let ops = t.context.measured_operators(array)?;
        let prepared = PreparedContext::new(t.context.label(), &ops, array.q())?;
        let exact = psi.expectation(&t.context.operator(array)?)?;
        exact_total += exact * t.coefficient as f64;

        let mut sum = 0i64;
        for _ in 0..shots {
            let record = prepared.shot(psi, epsilon, rng)?;
            sum += record.product as i64;
            on_shot(&record)?;
        }
        let n = shots as f64;
        let mean = sum as f64 / n;
        let sample_var = if shots > 1 { (1.0 - mean * mean) * n / (n - 1.0) } else { 0.0 };
        let se = (sample_var.max(0.0) / n).sqrt();
        let coef = t.coefficient as f64;
        value += coef * mean;
        variance += coef * coef * se * se;
        contexts.push(ContextEstimate {
            context: t.context.label(),
            coefficient: t.coefficient,
            num_cells: prepared.len(),
            mean,
            standard_error: se,
            exact: exact.re,
            order_dependent: prepared.order_dependent(),
        });
    }
    if exact_total.im.abs() > IMAGINARY_TOLERANCE {
        return Err(Error::Internal(format!("X_KS has imaginary part {}", exact_total.im)));
    }
    Ok(XksEstimate {
        q: array.q(),
        form,
        shots,
        epsilon,
        value,
        standard_error: variance.sqrt(),
        exact: exact_total.re,
        contexts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Letter;

    fn p(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    #[test]
    fn states() {
        let b = make_state(StateKind::Basis(0), 2).unwrap();
        assert_eq!(b.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(make_state(StateKind::Basis(4), 2).is_err());
        let g = make_state(StateKind::Ghz, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(g.amplitudes().iter().map(|a| a.re).collect::<Vec<_>>(), vec![h, 0.0, 0.0, h]);
        for seed in 0..20 {
            let r = make_state(StateKind::Random(seed), 5).unwrap();
            assert!((r.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
        }
        assert_eq!(make_state(StateKind::Random(3), 3), make_state(StateKind::Random(3), 3));
        assert!(make_state(StateKind::Ghz, 0).is_err());
    }

    #[test]
    fn state_kind_parsing() {
        assert_eq!(StateKind::parse("basis:3").unwrap(), StateKind::Basis(3));
        assert_eq!(StateKind::parse("random:17").unwrap(), StateKind::Random(17));
        assert_eq!(StateKind::parse("ghz").unwrap(), StateKind::Ghz);
        for bad in ["basis", "random:x", "foo:1", ""] {
            assert!(StateKind::parse(bad).is_err());
        }
    }

    #[test]
    fn simple_expectations() {
        let zero = make_state(StateKind::Basis(0), 1).unwrap();
        assert_eq!(expectation(&p("Z"), &zero).unwrap(), Complex64::new(1.0, 0.0));
        let one = make_state(StateKind::Basis(1), 1).unwrap();
        assert_eq!(expectation(&p("Z"), &one).unwrap(), Complex64::new(-1.0, 0.0));
        let ghz = make_state(StateKind::Ghz, 2).unwrap();
        assert!((expectation(&p("YY"), &ghz).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((expectation(&p("XX"), &ghz).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // qubit 1 is the most significant index bit
        let ten = make_state(StateKind::Basis(2), 2).unwrap();
        assert_eq!(expectation(&p("ZI"), &ten).unwrap().re, -1.0);
        assert_eq!(expectation(&p("IZ"), &ten).unwrap().re, 1.0);
        assert!(expectation(&p("ZZZ"), &ten).is_err());
    }

    #[test]
    fn measurement_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zero = make_state(StateKind::Basis(0), 1).unwrap();
        for _ in 0..100 {
            let (o, post) = measure(&p("Z"), &zero, &mut rng).unwrap();
            assert_eq!(o, 1);
            assert_eq!(post, zero);
        }
        let err = measure(&p("iZ"), &zero, &mut rng).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { ref phase, .. } if phase == "+i"));
    }

    #[test]
    fn repeated_measurement_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for seed in 0..50 {
            let psi = make_state(StateKind::Random(seed), 3).unwrap();
            let op = p("-XYZ");
            let (first, post) = measure(&op, &psi, &mut rng).unwrap();
            assert!((post.norm_sqr() - 1.0).abs() < 1e-10);
            let (second, _) = measure(&op, &post, &mut rng).unwrap();
            assert_eq!(first, second);
        }
    }

    #[test]
    fn context_flags_and_errors() {
        let psi = make_state(StateKind::Random(4), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = run_context(&[p("ZI"), p("IX"), p("ZX")], &psi, 0.0, &mut rng).unwrap();
        assert_eq!(r.product, 1);
        assert!(!r.order_dependent);
        let r = run_context(&[p("ZI"), p("XI")], &psi, 0.0, &mut rng).unwrap();
        assert!(r.order_dependent);
        assert!(run_context(&[p("ZI")], &psi, 0.6, &mut rng).is_err());
        assert!(run_context(&[p("ZI")], &psi, -0.1, &mut rng).is_err());
        assert!(run_context(&[p("iZI")], &psi, 0.0, &mut rng).is_err());
        let big = make_state(StateKind::Basis(0), 13).unwrap();
        let z = PauliString::embed(Letter::Z, 1, 13).unwrap();
        assert!(run_context(&[z], &big, 0.0, &mut rng).is_err());
    }

    #[test]
    fn seeded_shots_are_reproducible() {
        let psi = make_state(StateKind::Random(8), 2).unwrap();
        let cells = [p("ZI"), p("IX"), p("ZX")];
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| run_context(&cells, &psi, 0.1, &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
    }
}
