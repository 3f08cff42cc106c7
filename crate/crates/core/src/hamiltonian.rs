//! Model Hamiltonians, the Jordan-Wigner mapping and file I/O.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::simulator::StateVector;

/// `h·Σ X_p + J·Σ Z_p Z_{p+1}` on an open chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingSpec {
    pub n_qubits: usize,
    pub h: f64,
    pub j: f64,
}

/// Open chain with per-site fields along X and Z and per-bond XX, YY, ZZ
/// couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralSpinChainSpec {
    pub n_qubits: usize,
    pub hx: Vec<f64>,
    pub hz: Vec<f64>,
    pub jx: Vec<f64>,
    pub jy: Vec<f64>,
    pub jz: Vec<f64>,
}

impl GeneralSpinChainSpec {
    /// The transverse-field Ising model written as a general chain.
    pub fn from_ising(spec: &IsingSpec) -> Self {
        let n = spec.n_qubits;
        let bonds = n.saturating_sub(1);
        Self {
            n_qubits: n,
            hx: vec![spec.h; n],
            hz: vec![0.0; n],
            jx: vec![0.0; bonds],
            jy: vec![0.0; bonds],
            jz: vec![spec.j; bonds],
        }
    }
}

fn check_chain(n: usize) -> Result<()> {
    if !(2..=crate::pauli::MAX_QUBITS).contains(&n) {
        return Err(Error::InvalidQubitCount(n));
    }
    Ok(())
}

fn add(h: &mut PauliSum, c: f64, letters: &[(usize, Pauli)]) -> Result<()> {
    if c != 0.0 {
        h.add_term(Complex64::new(c, 0.0), PauliString::from_letters(h.n_qubits(), letters)?)?;
    }
    Ok(())
}

pub fn build_ising(spec: &IsingSpec) -> Result<PauliSum> {
    let n = spec.n_qubits;
    check_chain(n)?;
    let mut h = PauliSum::new(n)?;
    for p in 0..n {
        add(&mut h, spec.h, &[(p, Pauli::X)])?;
    }
    for p in 0..n - 1 {
        add(&mut h, spec.j, &[(p, Pauli::Z), (p + 1, Pauli::Z)])?;
    }
    Ok(h)
}

pub fn build_general_chain(spec: &GeneralSpinChainSpec) -> Result<PauliSum> {
    let n = spec.n_qubits;
    check_chain(n)?;
    for (name, len, want) in [
        ("hx", spec.hx.len(), n),
        ("hz", spec.hz.len(), n),
        ("jx", spec.jx.len(), n - 1),
        ("jy", spec.jy.len(), n - 1),
        ("jz", spec.jz.len(), n - 1),
    ] {
        if len != want {
            return Err(Error::InvalidCount(format!("{name} has {len} entries, expected {want}")));
        }
    }
    let mut h = PauliSum::new(n)?;
    for k in 0..n {
        add(&mut h, spec.hx[k], &[(k, Pauli::X)])?;
        add(&mut h, spec.hz[k], &[(k, Pauli::Z)])?;
    }
    for k in 0..n - 1 {
        add(&mut h, spec.jx[k], &[(k, Pauli::X), (k + 1, Pauli::X)])?;
        add(&mut h, spec.jy[k], &[(k, Pauli::Y), (k + 1, Pauli::Y)])?;
        add(&mut h, spec.jz[k], &[(k, Pauli::Z), (k + 1, Pauli::Z)])?;
    }
    Ok(h)
}

/// `a_p = Z_0…Z_{p−1}·(X_p + iY_p)/2`, or its adjoint when `dagger` is set.
pub fn jordan_wigner(n_qubits: usize, p: usize, dagger: bool) -> Result<PauliSum> {
    if p >= n_qubits {
        return Err(Error::IndexOutOfRange { index: p, n_qubits });
    }
    let z_mask = (1u64 << p) - 1;
    let x_string = PauliString::from_masks(n_qubits, 1 << p, z_mask)?;
    let y_string = PauliString::from_masks(n_qubits, 1 << p, z_mask | 1 << p)?;
    let sign = if dagger { -0.5 } else { 0.5 };
    PauliSum::from_terms(n_qubits, [(Complex64::new(0.5, 0.0), x_string), (Complex64::new(0.0, sign), y_string)])
}

/// One- and two-body integrals of a second-quantized Hamiltonian
/// `Σ h_pq a†_p a_q + Σ h_pqrs a†_p a†_q a_r a_s`, consumed exactly in that
/// operator order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermionIntegrals {
    pub n_spin_orbitals: usize,
    pub n_electrons: usize,
    pub one_body: Vec<((usize, usize), f64)>,
    pub two_body: Vec<((usize, usize, usize, usize), f64)>,
}

impl FermionIntegrals {
    /// Reads the `norb` / `nelec` / `PQ` / `PQRS` text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut norb = None;
        let mut nelec = None;
        let mut one_body = Vec::new();
        let mut two_body = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| Error::Parse { line: line_no, message: m.to_string() };
            let tok: Vec<&str> = line.split_whitespace().collect();
            let idx = |k: usize| -> Result<usize> {
                tok.get(k).and_then(|t| t.parse().ok()).ok_or_else(|| err("invalid index"))
            };
            let val = |k: usize| -> Result<f64> {
                tok.get(k).and_then(|t| t.parse().ok()).ok_or_else(|| err("invalid value"))
            };
            let expect_len = |n: usize| if tok.len() == n { Ok(()) } else { Err(err("wrong number of fields")) };
            match tok[0] {
                "norb" => {
                    expect_len(2)?;
                    norb = Some(idx(1)?)
                }
                "nelec" => {
                    expect_len(2)?;
                    nelec = Some(idx(1)?)
                }
                "PQ" => {
                    expect_len(4)?;
                    one_body.push(((idx(1)?, idx(2)?), val(3)?))
                }
                "PQRS" => {
                    expect_len(6)?;
                    two_body.push(((idx(1)?, idx(2)?, idx(3)?, idx(4)?), val(5)?))
                }
                other => return Err(err(&format!("unknown record `{other}`"))),
            }
        }
        let n_spin_orbitals = norb.ok_or(Error::Parse { line: 0, message: "missing `norb`".into() })?;
        let ints = Self {
            n_spin_orbitals,
            n_electrons: nelec.ok_or(Error::Parse { line: 0, message: "missing `nelec`".into() })?,
            one_body,
            two_body,
        };
        ints.validate()?;
        Ok(ints)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("norb {}\nnelec {}\n", self.n_spin_orbitals, self.n_electrons);
        for ((p, q), v) in &self.one_body {
            out.push_str(&format!("PQ {p} {q} {v:?}\n"));
        }
        for ((p, q, r, s), v) in &self.two_body {
            out.push_str(&format!("PQRS {p} {q} {r} {s} {v:?}\n"));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_spin_orbitals;
        if n == 0 || n > crate::pauli::MAX_QUBITS {
            return Err(Error::InvalidQubitCount(n));
        }
        if self.n_electrons > n {
            return Err(Error::InvalidCount(format!("{} electrons in {n} spin orbitals", self.n_electrons)));
        }
        let indices = self
            .one_body
            .iter()
            .flat_map(|((p, q), _)| [*p, *q])
            .chain(self.two_body.iter().flat_map(|((p, q, r, s), _)| [*p, *q, *r, *s]));
        for index in indices {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n_qubits: n });
            }
        }
        Ok(())
    }
}

/// Maps the integrals through Jordan-Wigner. Fails with `NonHermitian` when
/// the integrals lack the symmetry that makes the operator Hermitian.
pub fn map_molecular_hamiltonian(ints: &FermionIntegrals) -> Result<PauliSum> {
    ints.validate()?;
    let n = ints.n_spin_orbitals;
    let create: Vec<PauliSum> = (0..n).map(|p| jordan_wigner(n, p, true)).collect::<Result<_>>()?;
    let annihilate: Vec<PauliSum> = (0..n).map(|p| jordan_wigner(n, p, false)).collect::<Result<_>>()?;
    let mut h = PauliSum::new(n)?;
    for &((p, q), v) in &ints.one_body {
        if v != 0.0 {
            h = h.add(&create[p].mul(&annihilate[q])?.scale(Complex64::new(v, 0.0)))?;
        }
    }
    for &((p, q, r, s), v) in &ints.two_body {
        if v != 0.0 {
            let term = create[p].mul(&create[q])?.mul(&annihilate[r])?.mul(&annihilate[s])?;
            h = h.add(&term.scale(Complex64::new(v, 0.0)))?;
        }
    }
    h.simplify();
    let terms = h.real_terms(1e-10)?;
    PauliSum::from_terms(n, terms.into_iter().map(|(s, c)| (Complex64::new(c, 0.0), s)))
}

/// Basis index with the lowest `n_electrons` qubits occupied.
pub fn hartree_fock_index(n_electrons: usize, n_qubits: usize) -> Result<u64> {
    if n_electrons > n_qubits {
        return Err(Error::InvalidCount(format!("{n_electrons} electrons on {n_qubits} qubits")));
    }
    Ok(if n_electrons == 64 { u64::MAX } else { (1u64 << n_electrons) - 1 })
}

/// `|1…10…0⟩` with the first `n_electrons` qubits occupied.
pub fn hartree_fock_state(n_electrons: usize, n_qubits: usize) -> Result<StateVector> {
    StateVector::basis(n_qubits, hartree_fock_index(n_electrons, n_qubits)?)
}

pub fn load_pauli_sum(path: impl AsRef<Path>, n_qubits: Option<usize>) -> Result<PauliSum> {
    PauliSum::parse(&std::fs::read_to_string(path)?, n_qubits)
}

pub fn save_pauli_sum(path: impl AsRef<Path>, h: &PauliSum) -> Result<()> {
    std::fs::write(path, h.to_text())?;
    Ok(())
}

pub fn load_integrals(path: impl AsRef<Path>) -> Result<FermionIntegrals> {
    FermionIntegrals::parse(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ising_two_sites() {
        let h = build_ising(&IsingSpec { n_qubits: 2, h: 0.5, j: 0.2 }).unwrap();
        let expected = PauliSum::parse("0.5 X0\n0.5 X1\n0.2 Z0 Z1\n", Some(2)).unwrap();
        assert_eq!(h, expected);
        let zz = build_ising(&IsingSpec { n_qubits: 2, h: 0.0, j: 1.0 }).unwrap();
        assert_eq!(zz, PauliSum::parse("1 Z0 Z1\n", Some(2)).unwrap());
        let xs = build_ising(&IsingSpec { n_qubits: 3, h: 1.0, j: 0.0 }).unwrap();
        assert_eq!(xs, PauliSum::parse("1 X0\n1 X1\n1 X2\n", Some(3)).unwrap());
    }

    #[test]
    fn ising_term_count() {
        for n in 2..10 {
            let h = build_ising(&IsingSpec { n_qubits: n, h: 0.5, j: 0.2 }).unwrap();
            assert_eq!(h.len(), 2 * n - 1);
            assert!(h.is_hermitian());
        }
        assert!(build_ising(&IsingSpec { n_qubits: 1, h: 0.5, j: 0.2 }).is_err());
    }

    #[test]
    fn general_chain_reduces_to_ising() {
        let spec = IsingSpec { n_qubits: 5, h: 0.5, j: 0.2 };
        let a = build_general_chain(&GeneralSpinChainSpec::from_ising(&spec)).unwrap();
        assert_eq!(a, build_ising(&spec).unwrap());
    }

    #[test]
    fn general_chain_yy_only() {
        let spec = GeneralSpinChainSpec {
            n_qubits: 2,
            hx: vec![0.0; 2],
            hz: vec![0.0; 2],
            jx: vec![0.0],
            jy: vec![1.0],
            jz: vec![0.0],
        };
        assert_eq!(build_general_chain(&spec).unwrap(), PauliSum::parse("1 Y0 Y1\n", Some(2)).unwrap());
        let bad = GeneralSpinChainSpec { jy: vec![], ..spec };
        assert!(matches!(build_general_chain(&bad), Err(Error::InvalidCount(_))));
    }

    #[test]
    fn jordan_wigner_low_modes() {
        let a0 = jordan_wigner(2, 0, false).unwrap();
        assert_eq!(a0, PauliSum::parse("0.5 X0\n0 0.5 Y0\n", Some(2)).unwrap());
        let a1 = jordan_wigner(2, 1, false).unwrap();
        assert_eq!(a1, PauliSum::parse("0.5 Z0 X1\n0 0.5 Z0 Y1\n", Some(2)).unwrap());
        assert!(jordan_wigner(2, 2, false).is_err());
    }

    #[test]
    fn single_orbital_number_operator() {
        let eps = 0.7;
        let ints =
            FermionIntegrals { n_spin_orbitals: 1, n_electrons: 1, one_body: vec![((0, 0), eps)], two_body: vec![] };
        let h = map_molecular_hamiltonian(&ints).unwrap();
        assert_eq!(h, PauliSum::parse("0.35 I\n-0.35 Z0\n", Some(1)).unwrap());
        let empty = FermionIntegrals { n_spin_orbitals: 3, n_electrons: 0, one_body: vec![], two_body: vec![] };
        assert!(map_molecular_hamiltonian(&empty).unwrap().is_empty());
    }

    #[test]
    fn non_hermitian_integrals_rejected() {
        let ints =
            FermionIntegrals { n_spin_orbitals: 2, n_electrons: 1, one_body: vec![((0, 1), 0.3)], two_body: vec![] };
        assert!(matches!(map_molecular_hamiltonian(&ints), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn hartree_fock_states() {
        let hf = hartree_fock_state(8, 10).unwrap();
        assert_eq!(hf, StateVector::basis(10, 0b11111111).unwrap());
        assert_eq!(crate::simulator::basis_label(10, 0xff), "1111111100");
        assert_eq!(hartree_fock_state(0, 3).unwrap(), StateVector::zero(3).unwrap());
        assert!(hartree_fock_state(4, 3).is_err());
    }

    #[test]
    fn integral_text_round_trip() {
        let ints = FermionIntegrals {
            n_spin_orbitals: 4,
            n_electrons: 2,
            one_body: vec![((0, 0), -1.25), ((1, 2), 0.1)],
            two_body: vec![((0, 1, 1, 0), 0.3)],
        };
        assert_eq!(FermionIntegrals::parse(&ints.to_text()).unwrap(), ints);
        let err = FermionIntegrals::parse("norb 2\nnelec 1\nPQ 0 x 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(FermionIntegrals::parse("norb 2\nnelec 1\nPQ 0 5 1.0\n").is_err());
    }
}
