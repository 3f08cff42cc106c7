mod common;

use common::*;
use ggavqe_core::pauli::{Pauli, PauliString, PauliSum};
use ggavqe_core::pools::*;
use ggavqe_core::simulator::StateVector;
use ggavqe_core::Error;
use nalgebra::DMatrix;

fn identity(n: usize) -> DMatrix<C> {
    DMatrix::identity(1 << n, 1 << n)
}

#[test]
fn hardware_efficient_generators_are_involutions() {
    for n in 2..=4 {
        for pool in [qubit_hardware_efficient_pool(n).unwrap(), minimal_hardware_efficient_pool(n).unwrap()] {
            for g in pool.generators() {
                assert_eq!(g.class(), GeneratorClass::Involutory);
                let b = g.body();
                assert!(common::tables::distance(&b.mul(b).unwrap(), &PauliSum::identity(n).unwrap()) < 1e-12);
                let m = dense_sum(b);
                assert!(max_abs_diff(&(&m * &m), &identity(n)) < 1e-12, "{}", g.label());
            }
        }
    }
}

#[test]
fn qeb_generators_are_tripotent() {
    for n in 2..=4 {
        for g in qeb_pool(n, None).unwrap().generators() {
            assert_eq!(g.class(), GeneratorClass::Tripotent);
            let b = g.body();
            let cube = b.mul(b).unwrap().mul(b).unwrap();
            assert!(common::tables::distance(&cube, b) < 1e-12);
            let m = dense_sum(b);
            assert!(max_abs_diff(&(&m * &m * &m), &m) < 1e-12, "{}", g.label());
            assert!(max_abs_diff(&(&m * &m), &identity(n)) > 0.5);
        }
    }
}

fn index(bits: &[(usize, bool)]) -> usize {
    bits.iter().filter(|(_, b)| *b).map(|(q, _)| 1 << q).sum()
}

#[test]
fn qeb_double_swaps_pairs_with_phase_i() {
    let n = 4;
    for (p, q, r, s) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
        let m = dense_sum(&qeb_double(n, p, q, r, s).unwrap());
        let pq = index(&[(p, true), (q, true)]);
        let rs = index(&[(r, true), (s, true)]);
        for j in 0..16 {
            let col: Vec<C> = m.column(j).iter().copied().collect();
            let mut want = vec![c(0.0, 0.0); 16];
            if j == pq {
                want[rs] = c(0.0, 1.0);
            } else if j == rs {
                want[pq] = c(0.0, -1.0);
            }
            let err = col.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "({p},{q},{r},{s}) column {j}");
        }
    }
}

#[test]
fn qeb_single_swaps_one_excitation() {
    let m = dense_sum(&qeb_single(2, 0, 1).unwrap());
    // qubit 0 occupied -> qubit 1 occupied
    assert!((m[(0b10, 0b01)] - c(0.0, -1.0)).norm() < 1e-15);
    assert!((m[(0b01, 0b10)] - c(0.0, 1.0)).norm() < 1e-15);
    assert!(m[(0b11, 0b11)].norm() < 1e-15 && m[(0, 0)].norm() < 1e-15);
}

#[test]
fn pool_sizes() {
    let c4 = |n: usize| if n < 4 { 0 } else { n * (n - 1) * (n - 2) * (n - 3) / 24 };
    for n in 2..=7 {
        let singles = n * (n - 1) / 2;
        assert_eq!(qeb_pool(n, None).unwrap().len(), singles + 3 * c4(n));
        assert_eq!(qubit_hardware_efficient_pool(n).unwrap().len(), 2 * singles + 9 * c4(n));
        assert_eq!(minimal_hardware_efficient_pool(n).unwrap().len(), 2 * n - 2);
    }
    let two = qubit_hardware_efficient_pool(2).unwrap();
    let labels: Vec<&str> = two.generators().iter().map(|g| g.label()).collect();
    assert_eq!(labels, ["Y0X1", "X0Y1"]);
    assert!(matches!(qeb_pool(1, None), Err(Error::InvalidQubitCount(1))));
}

#[test]
fn minimal_pool_layout() {
    let pool = minimal_hardware_efficient_pool(4).unwrap();
    let labels: Vec<&str> = pool.generators().iter().map(|g| g.label()).collect();
    assert_eq!(labels, ["Y0", "Y1", "Y2", "Z0Y1", "Z1Y2", "Z2Y3"]);
    for (k, g) in pool.generators().iter().enumerate() {
        assert_eq!(g.id(), k);
        assert_eq!(g.angle_scale(), 1.0);
    }
}

#[test]
fn spin_filter_keeps_conserving_excitations() {
    let filter = |e: &Excitation| e.conserves_spin();
    let pool = qeb_pool(4, Some(&filter)).unwrap();
    let labels: Vec<&str> = pool.generators().iter().map(|g| g.label()).collect();
    assert_eq!(labels, ["A(0,2)", "A(1,3)", "A(0,1,2,3)", "A(0,3,1,2)"]);
}

#[test]
fn pool_text_round_trip() {
    for pool in [
        qeb_pool(4, None).unwrap(),
        qubit_hardware_efficient_pool(4).unwrap(),
        minimal_hardware_efficient_pool(5).unwrap(),
    ] {
        let back = Pool::parse(&pool.to_text(), pool.n_qubits()).unwrap();
        assert_eq!(back.len(), pool.len());
        for (a, b) in back.generators().iter().zip(pool.generators()) {
            assert_eq!(a.label(), b.label());
            assert_eq!(a.body(), b.body());
            assert_eq!(a.class(), b.class());
            assert_eq!(a.angle_scale(), b.angle_scale());
        }
    }
}

#[test]
fn unclassifiable_and_non_hermitian_bodies_are_rejected() {
    let x0 = PauliString::single(2, 0, Pauli::X).unwrap();
    let z1 = PauliString::single(2, 1, Pauli::Z).unwrap();
    let sum = PauliSum::from_terms(2, [(c(1.0, 0.0), x0), (c(1.0, 0.0), z1)]).unwrap();
    assert!(matches!(Generator::new(0, "X0+Z1", sum, 1.0), Err(Error::Unclassified(_))));
    let imag = PauliSum::from_string(x0, c(0.0, 1.0));
    assert!(matches!(Generator::new(0, "iX0", imag, 1.0), Err(Error::NonHermitian(_))));
}

#[test]
fn tripotent_exponential_leaves_kernel_fixed() {
    let pool = qeb_pool(4, None).unwrap();
    let g = &pool.generators()[6];
    let psi = StateVector::basis(4, 0b0101).unwrap();
    let out = psi.apply_exp_generator(g, 0.7).unwrap();
    assert!((vector(&out) - vector(&psi)).norm() < 1e-14, "{}", g.label());
}
