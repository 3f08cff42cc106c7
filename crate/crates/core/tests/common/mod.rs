//! Dense-matrix oracles built independently of the library's bitmask code.
#![allow(dead_code)]

use ggavqe_core::pauli::{Pauli, PauliString, PauliSum};
use ggavqe_core::simulator::StateVector;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn letter_matrix(p: Pauli) -> DMatrix<C> {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

/// Kronecker product with the highest qubit leftmost, so qubit 0 is the
/// least significant bit of the basis index.
pub fn dense_string(s: &PauliString) -> DMatrix<C> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in (0..s.n_qubits()).rev() {
        m = m.kronecker(&letter_matrix(s.letter(q)));
    }
    m
}

pub fn dense_sum(h: &PauliSum) -> DMatrix<C> {
    let d = 1usize << h.n_qubits();
    let mut m = DMatrix::zeros(d, d);
    for (s, coeff) in h.iter() {
        m += dense_string(s) * *coeff;
    }
    m
}

pub fn max_abs_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn vector(psi: &StateVector) -> DVector<C> {
    DVector::from_column_slice(psi.amplitudes())
}

pub fn dense_expectation(m: &DMatrix<C>, psi: &DVector<C>) -> f64 {
    (psi.adjoint() * m * psi)[(0, 0)].re
}

pub fn random_letter<R: Rng>(rng: &mut R) -> Pauli {
    [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)]
}

pub fn random_string<R: Rng>(rng: &mut R, n: usize) -> PauliString {
    let letters: Vec<(usize, Pauli)> = (0..n).map(|q| (q, random_letter(rng))).collect();
    PauliString::from_letters(n, &letters).unwrap()
}

/// Hermitian sum of `terms` random strings with real coefficients in [-1, 1].
pub fn random_hamiltonian<R: Rng>(rng: &mut R, n: usize, terms: usize) -> PauliSum {
    let mut h = PauliSum::new(n).unwrap();
    for _ in 0..terms {
        let s = random_string(rng, n);
        h.add_term(c(rng.random_range(-1.0..1.0), 0.0), s).unwrap();
    }
    h.simplify();
    h
}

/// `V, λ` with `m = V·diag(λ)·V†` for Hermitian `m`.
pub fn hermitian_eigen(m: &DMatrix<C>) -> (DMatrix<C>, Vec<f64>) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    (eig.eigenvectors, eig.eigenvalues.iter().copied().collect())
}

/// `θ ↦ ⟨ψ|exp(iθB) H exp(−iθB)|ψ⟩` evaluated in the eigenbasis of `B`.
pub struct DirectLandscape {
    h_rot: DMatrix<C>,
    phi: DVector<C>,
    lambda: Vec<f64>,
}

impl DirectLandscape {
    pub fn new(h: &PauliSum, b: &PauliSum, psi: &StateVector) -> Self {
        let (v, lambda) = hermitian_eigen(&dense_sum(b));
        let h_rot = v.adjoint() * dense_sum(h) * &v;
        let phi = v.adjoint() * vector(psi);
        Self { h_rot, phi, lambda }
    }

    pub fn at(&self, theta: f64) -> f64 {
        let w = DVector::from_iterator(
            self.phi.len(),
            self.phi.iter().zip(&self.lambda).map(|(p, l)| p * C::from_polar(1.0, -theta * l)),
        );
        dense_expectation(&self.h_rot, &w)
    }
}

/// `exp(−iθ·m)` for a Hermitian `m`.
pub fn dense_unitary(m: &DMatrix<C>, theta: f64) -> DMatrix<C> {
    (m * c(0.0, -theta)).exp()
}

pub mod tables;
