//! Dense state-vector simulation.
//!
//! Qubit `k` is bit `k` of the amplitude index (little-endian), matching the
//! bitmask layout of [`PauliString`]. `|0…01⟩` written in the usual binary
//! order is therefore index 1, i.e. qubit 0 flipped.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::pools::{Generator, GeneratorClass, Pool};

/// Largest register handled by the library.
pub const MAX_SIMULATED_QUBITS: usize = 24;
/// Largest Hamiltonian accepted by [`exact_ground_state`].
pub const DEFAULT_DENSE_LIMIT: usize = 12;
/// Above this size the ground state is found by Lanczos iteration instead of
/// a full dense eigendecomposition.
const FULL_EIGEN_LIMIT: usize = 8;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::InvalidQubitCount(0));
    }
    if n_qubits > MAX_SIMULATED_QUBITS {
        return Err(Error::RegisterTooLarge { n_qubits, limit: MAX_SIMULATED_QUBITS });
    }
    Ok(())
}

/// Phase of `P|i⟩ = phase · |i ⊕ x⟩` for `P = i^{|x∧z|} X^x Z^z`.
#[inline]
fn string_phase(y_power: u32, z: u64, index: usize) -> Complex64 {
    let k = (y_power + 2 * ((index as u64 & z).count_ones() & 1)) % 4;
    match k {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: u64) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index as usize >= dim {
            return Err(Error::IndexOutOfRange { index: index as usize, n_qubits });
        }
        let mut amps = vec![Complex64::default(); dim];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// `|−⟩^⊗n`, the ground state of `Σ X_p`.
    pub fn uniform_minus(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = (dim as f64).sqrt().recip();
        let amps = (0..dim)
            .map(|i| if i.count_ones() % 2 == 0 { Complex64::new(a, 0.0) } else { Complex64::new(-a, 0.0) })
            .collect();
        Ok(Self { n_qubits, amps })
    }

    /// `|+⟩^⊗n`.
    pub fn uniform_plus(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = (dim as f64).sqrt().recip();
        Ok(Self { n_qubits, amps: vec![Complex64::new(a, 0.0); dim] })
    }

    /// Wraps raw amplitudes, which must be unit-normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let v = Self::from_amplitudes_unnormalized(amps)?;
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(v)
    }

    pub fn from_amplitudes_unnormalized(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidCount(format!("amplitude count {dim} is not a power of two")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_register(n_qubits)?;
        Ok(Self { n_qubits, amps })
    }

    /// Random state with Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        let normal = rand_distr::StandardNormal;
        let amps: Vec<Complex64> =
            (0..dim).map(|_| Complex64::new(rng.sample::<f64, _>(normal), rng.sample::<f64, _>(normal))).collect();
        Ok(Self { n_qubits, amps }.normalized())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
        self
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_same(&self, n: usize) -> Result<()> {
        if self.n_qubits != n {
            return Err(Error::SizeMismatch { left: self.n_qubits, right: n });
        }
        Ok(())
    }

    /// `P|ψ⟩` for a single Pauli string.
    pub fn apply_pauli_string(&self, s: &PauliString) -> Result<StateVector> {
        self.check_same(s.n_qubits())?;
        let x = s.x_mask() as usize;
        let z = s.z_mask();
        let y = s.y_count();
        let mut out = vec![Complex64::default(); self.dim()];
        for (i, a) in self.amps.iter().enumerate() {
            out[i ^ x] = string_phase(y, z, i) * a;
        }
        Ok(StateVector { n_qubits: self.n_qubits, amps: out })
    }

    /// `p|ψ⟩`, not normalized.
    pub fn apply_pauli_sum(&self, p: &PauliSum) -> Result<StateVector> {
        self.check_same(p.n_qubits())?;
        let mut out = vec![Complex64::default(); self.dim()];
        for (s, c) in p.iter() {
            let x = s.x_mask() as usize;
            let z = s.z_mask();
            let y = s.y_count();
            for (i, a) in self.amps.iter().enumerate() {
                out[i ^ x] += c * string_phase(y, z, i) * a;
            }
        }
        Ok(StateVector { n_qubits: self.n_qubits, amps: out })
    }

    /// `exp(−iθB)|ψ⟩` through the closed form of the generator's class:
    /// `cosθ·I − i·sinθ·B` when `B² = I`, and
    /// `I + (cosθ − 1)·B² − i·sinθ·B` when `B³ = B`.
    pub fn apply_exp_generator(&self, g: &Generator, theta: f64) -> Result<StateVector> {
        self.check_same(g.body().n_qubits())?;
        let (s, c) = theta.sin_cos();
        let b_psi = self.apply_pauli_sum(g.body())?;
        let minus_i_sin = Complex64::new(0.0, -s);
        let amps = match g.class() {
            GeneratorClass::Involutory => {
                self.amps.iter().zip(&b_psi.amps).map(|(a, b)| a * c + b * minus_i_sin).collect()
            }
            GeneratorClass::Tripotent => {
                let b2_psi = b_psi.apply_pauli_sum(g.body())?;
                self.amps
                    .iter()
                    .zip(&b_psi.amps)
                    .zip(&b2_psi.amps)
                    .map(|((a, b), b2)| a + b2 * (c - 1.0) + b * minus_i_sin)
                    .collect()
            }
        };
        Ok(StateVector { n_qubits: self.n_qubits, amps })
    }

    /// `⟨ψ|P|ψ⟩` for one Pauli string; always real.
    pub fn expectation_string(&self, s: &PauliString) -> Result<f64> {
        self.check_same(s.n_qubits())?;
        let x = s.x_mask() as usize;
        let z = s.z_mask();
        let y = s.y_count();
        let mut acc = Complex64::default();
        for (i, a) in self.amps.iter().enumerate() {
            acc += self.amps[i ^ x].conj() * string_phase(y, z, i) * a;
        }
        Ok(acc.re)
    }

    /// `⟨ψ|h|ψ⟩` for Hermitian `h`. Terms are summed sequentially in
    /// canonical order.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        self.check_same(h.n_qubits())?;
        let terms = h.real_terms(1e-12)?;
        let mut acc = 0.0;
        for (s, c) in &terms {
            acc += c * self.expectation_string(s)?;
        }
        Ok(acc)
    }

    /// `⟨self|other⟩`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same(other.n_qubits)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Hadamard on one qubit, in place.
    pub fn apply_hadamard(&mut self, qubit: usize) {
        let bit = 1usize << qubit;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = (a + b) * r;
                self.amps[i | bit] = (a - b) * r;
            }
        }
    }

    /// `S† = diag(1, −i)` on one qubit, in place.
    pub fn apply_s_dagger(&mut self, qubit: usize) {
        let bit = 1usize << qubit;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a *= Complex64::new(0.0, -1.0);
            }
        }
    }

    /// Pauli X on every qubit of `mask`, in place.
    pub fn apply_x_mask(&mut self, mask: u64) {
        let m = mask as usize;
        if m == 0 {
            return;
        }
        for i in 0..self.amps.len() {
            let j = i ^ m;
            if i < j {
                self.amps.swap(i, j);
            }
        }
    }

    /// Reflection `I − 2ww†/‖w‖²` with `w = α|0⟩ − v`, `α = v₀/|v₀|`; maps
    /// `|0⟩` to `v` up to a global phase and is its own inverse.
    pub(crate) fn apply_householder_to(&mut self, target: &StateVector) {
        let v0 = target.amps[0];
        let alpha = if v0.norm() > 0.0 { v0 / v0.norm() } else { Complex64::new(1.0, 0.0) };
        let mut w: Vec<Complex64> = target.amps.iter().map(|a| -a).collect();
        w[0] += alpha;
        let wn: f64 = w.iter().map(|a| a.norm_sqr()).sum();
        if wn < 1e-28 {
            return;
        }
        let proj: Complex64 = w.iter().zip(&self.amps).map(|(a, b)| a.conj() * b).sum();
        let k = proj * (2.0 / wn);
        for (a, wi) in self.amps.iter_mut().zip(&w) {
            *a -= wi * k;
        }
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)|{}⟩", a.re, a.im, basis_label(self.n_qubits, i as u64))?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Occupation string with qubit 0 first, e.g. `1111111100` for the index with
/// the eight lowest bits set on ten qubits.
pub fn basis_label(n_qubits: usize, index: u64) -> String {
    (0..n_qubits).map(|q| if index >> q & 1 == 1 { '1' } else { '0' }).collect()
}

/// Inverse of [`basis_label`].
pub fn parse_basis_label(label: &str) -> Result<(usize, u64)> {
    let n = label.len();
    check_register(n)?;
    let mut index = 0u64;
    for (q, c) in label.chars().enumerate() {
        match c {
            '0' => {}
            '1' => index |= 1 << q,
            _ => return Err(Error::Parse { line: 1, message: format!("invalid basis label `{label}`") }),
        }
    }
    Ok((n, index))
}

/// Lowest eigenvalue and a unit eigenvector of the Hermitian `h`.
///
/// Registers up to eight qubits use a full dense eigendecomposition; larger
/// ones (up to `DEFAULT_DENSE_LIMIT`) use Lanczos with full
/// reorthogonalization, converged to a residual below 1e-10. The returned
/// vector's largest amplitude is made real and positive.
pub fn exact_ground_state(h: &PauliSum) -> Result<(f64, StateVector)> {
    exact_ground_state_with_limit(h, DEFAULT_DENSE_LIMIT)
}

pub fn exact_ground_state_with_limit(h: &PauliSum, limit: usize) -> Result<(f64, StateVector)> {
    let n = h.n_qubits();
    if n > limit {
        return Err(Error::RegisterTooLarge { n_qubits: n, limit });
    }
    h.real_terms(1e-12)?;
    let (energy, vec) = if n <= FULL_EIGEN_LIMIT { dense_ground_state(h)? } else { lanczos_ground_state(h)? };
    Ok((energy, fix_global_phase(vec)))
}

fn fix_global_phase(mut v: StateVector) -> StateVector {
    let (mut best, mut mag) = (0, -1.0);
    for (i, a) in v.amps.iter().enumerate() {
        // strict comparison with a margin keeps the choice stable under dust
        if a.norm() > mag + 1e-12 {
            best = i;
            mag = a.norm();
        }
    }
    let a = v.amps[best];
    if a.norm() > 0.0 {
        let phase = a.conj() / a.norm();
        for x in &mut v.amps {
            *x *= phase;
        }
    }
    v
}

/// Dense matrix of `h`, column `j` being `h|j⟩`.
pub fn dense_matrix(h: &PauliSum) -> Result<DMatrix<Complex64>> {
    let n = h.n_qubits();
    check_register(n)?;
    let dim = 1usize << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..dim {
        let col = StateVector::basis(n, j as u64)?.apply_pauli_sum(h)?;
        for (i, a) in col.amps.iter().enumerate() {
            m[(i, j)] = *a;
        }
    }
    Ok(m)
}

fn dense_ground_state(h: &PauliSum) -> Result<(f64, StateVector)> {
    let m = dense_matrix(h)?;
    let eig = SymmetricEigen::new(m);
    let (k, e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let amps: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
    Ok((e, StateVector::from_amplitudes_unnormalized(amps)?.normalized()))
}

fn lanczos_ground_state(h: &PauliSum) -> Result<(f64, StateVector)> {
    let n = h.n_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a2c_205f_0001);
    let mut start = StateVector::random(n, &mut rng)?;
    let dim = start.dim();
    let krylov = dim.min(160);
    let mut best = (f64::INFINITY, start.clone());
    for _restart in 0..50 {
        let mut basis: Vec<StateVector> = vec![start.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        for j in 0..krylov {
            let mut w = basis[j].apply_pauli_sum(h)?;
            let alpha = basis[j].inner_product(&w)?.re;
            alphas.push(alpha);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for v in &basis {
                    let c = v.inner_product(&w)?;
                    for (wi, vi) in w.amps.iter_mut().zip(&v.amps) {
                        *wi -= vi * c;
                    }
                }
            }
            let beta = w.norm();
            if beta < 1e-12 || j + 1 == krylov {
                break;
            }
            betas.push(beta);
            basis.push(w.normalized());
        }
        let k = alphas.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (idx, e) =
            eig.eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let mut amps = vec![Complex64::default(); dim];
        for (coef, v) in eig.eigenvectors.column(idx).iter().zip(&basis) {
            for (a, b) in amps.iter_mut().zip(&v.amps) {
                *a += b * *coef;
            }
        }
        let ritz = StateVector { n_qubits: n, amps }.normalized();
        let hx = ritz.apply_pauli_sum(h)?;
        let residual: f64 = hx.amps.iter().zip(&ritz.amps).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
        best = (e, ritz.clone());
        if residual < 1e-10 {
            break;
        }
        start = ritz;
    }
    Ok(best)
}

/// How an ansatz register is initialized before its steps are applied.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Computational basis state; bit `k` of `index` is qubit `k`.
    Basis { index: u64 },
    /// `|−⟩^⊗n`.
    UniformMinus,
    /// Arbitrary unit vector.
    Custom(Vec<Complex64>),
}

impl InitialState {
    pub fn prepare(&self, n_qubits: usize) -> Result<StateVector> {
        match self {
            InitialState::Basis { index } => StateVector::basis(n_qubits, *index),
            InitialState::UniformMinus => StateVector::uniform_minus(n_qubits),
            InitialState::Custom(amps) => {
                let v = StateVector::from_amplitudes(amps.clone())?;
                v.check_same(n_qubits)?;
                Ok(v)
            }
        }
    }

    /// Applies the inverse of the preparation unitary `U` (with `U|0…0⟩`
    /// equal to the prepared state up to phase).
    pub fn unprepare(&self, state: &mut StateVector) -> Result<()> {
        match self {
            InitialState::Basis { index } => state.apply_x_mask(*index),
            InitialState::UniformMinus => {
                // U = ⊗(H·X), so U† = ⊗(X·H)
                for q in 0..state.n_qubits {
                    state.apply_hadamard(q);
                }
                state.apply_x_mask((1u64 << state.n_qubits) - 1);
            }
            InitialState::Custom(amps) => {
                let target = StateVector::from_amplitudes(amps.clone())?;
                state.check_same(target.n_qubits)?;
                state.apply_householder_to(&target);
            }
        }
        Ok(())
    }
}

/// One exponentiated generator of an ansatz.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzStep {
    pub generator: usize,
    pub label: String,
    pub angle: f64,
}

/// `Π_k exp(−iθ_k B_k)` applied to an initial state, first step first.
#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    pub n_qubits: usize,
    pub initial: InitialState,
    pub steps: Vec<AnsatzStep>,
}

/// Maps an angle into `[−π, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::PI;
    if (-PI..PI).contains(&theta) {
        return theta;
    }
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t >= PI {
        -PI
    } else {
        t
    }
}

impl Ansatz {
    pub fn new(n_qubits: usize, initial: InitialState) -> Self {
        Self { n_qubits, initial, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, g: &Generator, angle: f64) {
        self.steps.push(AnsatzStep { generator: g.id(), label: g.label().to_string(), angle: wrap_angle(angle) });
    }

    pub fn with_step(mut self, g: &Generator, angle: f64) -> Self {
        self.push(g, angle);
        self
    }

    /// Applies every step to `state` in order.
    pub fn apply_steps(&self, pool: &Pool, state: &StateVector) -> Result<StateVector> {
        let mut psi = state.clone();
        for step in &self.steps {
            psi = psi.apply_exp_generator(pool.get(step.generator)?, step.angle)?;
        }
        Ok(psi)
    }

    pub fn prepare(&self, pool: &Pool) -> Result<StateVector> {
        self.apply_steps(pool, &self.initial.prepare(self.n_qubits)?)
    }

    /// Applies `U†` of the whole ansatz: steps reversed with negated angles,
    /// then the inverse initial preparation.
    pub fn apply_inverse(&self, pool: &Pool, state: &StateVector) -> Result<StateVector> {
        let mut psi = state.clone();
        for step in self.steps.iter().rev() {
            psi = psi.apply_exp_generator(pool.get(step.generator)?, -step.angle)?;
        }
        self.initial.unprepare(&mut psi)?;
        Ok(psi)
    }

    /// Text form: a header naming the initial state, then one line per step
    /// with the angle at 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# ansatz\n");
        out.push_str(&format!("qubits {}\n", self.n_qubits));
        match &self.initial {
            InitialState::Basis { index } => {
                out.push_str(&format!("initial basis {}\n", basis_label(self.n_qubits, *index)))
            }
            InitialState::UniformMinus => out.push_str("initial minus\n"),
            InitialState::Custom(amps) => {
                out.push_str("initial custom\n");
                for a in amps {
                    out.push_str(&format!("amp {:.16e} {:.16e}\n", a.re, a.im));
                }
            }
        }
        for s in &self.steps {
            out.push_str(&format!("step {} {:.16e} {}\n", s.generator, s.angle, s.label));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Ansatz> {
        let mut n_qubits = None;
        let mut initial = None;
        let mut custom: Option<Vec<Complex64>> = None;
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| Error::Parse { line: line_no, message: message.to_string() };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let num = |k: usize| -> Result<f64> {
                tokens.get(k).and_then(|t| t.parse::<f64>().ok()).ok_or_else(|| err("invalid number"))
            };
            match tokens[0] {
                "qubits" => {
                    n_qubits =
                        Some(tokens.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| err("invalid qubit count"))?)
                }
                "initial" => match tokens.get(1).copied() {
                    Some("minus") => initial = Some(InitialState::UniformMinus),
                    Some("basis") => {
                        let label = tokens.get(2).ok_or_else(|| err("missing basis label"))?;
                        let (n, index) = parse_basis_label(label).map_err(|_| err("invalid basis label"))?;
                        if let Some(m) = n_qubits {
                            if m != n {
                                return Err(err("basis label length differs from qubit count"));
                            }
                        }
                        n_qubits.get_or_insert(n);
                        initial = Some(InitialState::Basis { index });
                    }
                    Some("custom") => custom = Some(Vec::new()),
                    _ => return Err(err("unknown initial state")),
                },
                "amp" => {
                    let amps = custom.as_mut().ok_or_else(|| err("amplitude outside custom block"))?;
                    amps.push(Complex64::new(num(1)?, num(2)?));
                }
                "step" => {
                    let generator =
                        tokens.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| err("invalid generator id"))?;
                    let angle = num(2)?;
                    let label = tokens[3.min(tokens.len())..].join(" ");
                    steps.push(AnsatzStep { generator, label, angle });
                }
                _ => return Err(err("unknown directive")),
            }
        }
        if let Some(amps) = custom {
            initial = Some(InitialState::Custom(amps));
        }
        let initial = initial.ok_or(Error::Parse { line: 0, message: "missing initial state".into() })?;
        let n_qubits = match (&initial, n_qubits) {
            (_, Some(n)) => n,
            (InitialState::Custom(a), None) => a.len().trailing_zeros() as usize,
            _ => return Err(Error::Parse { line: 0, message: "missing qubit count".into() }),
        };
        if let InitialState::Custom(a) = &initial {
            if a.len() != 1usize << n_qubits {
                return Err(Error::Parse { line: 0, message: "custom amplitude count mismatch".into() });
            }
        }
        Ok(Ansatz { n_qubits, initial, steps })
    }
}
