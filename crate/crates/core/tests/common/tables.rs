//! Closed forms for commutators and conjugations of the minimal-pool
//! generators `Y_i` and `Z_i Y_{i+1}` with single-site fields and
//! nearest-neighbour couplings on an open chain.

use ggavqe_core::pauli::{Pauli, PauliString, PauliSum};

use super::{c, C};
use Pauli::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    X,
    Y,
    Z,
    XX,
    YY,
    ZZ,
}

pub const FIELDS: [Field; 6] = [Field::X, Field::Y, Field::Z, Field::XX, Field::YY, Field::ZZ];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gen {
    /// `Y_i`
    Single,
    /// `Z_i Y_{i+1}`
    Pair,
}

/// A chain with one field coefficient per site and one coupling per bond.
pub struct Chain {
    pub n: usize,
    pub h: Vec<f64>,
    pub j: Vec<f64>,
}

impl Chain {
    fn h(&self, k: isize) -> Option<f64> {
        (k >= 0 && (k as usize) < self.n).then(|| self.h[k as usize])
    }

    fn j(&self, k: isize) -> Option<f64> {
        (k >= 0 && (k as usize) + 1 < self.n).then(|| self.j[k as usize])
    }

    pub fn field(&self, f: Field) -> PauliSum {
        let mut out = PauliSum::new(self.n).unwrap();
        let (letter, bond) = match f {
            Field::X => (X, false),
            Field::Y => (Y, false),
            Field::Z => (Z, false),
            Field::XX => (X, true),
            Field::YY => (Y, true),
            Field::ZZ => (Z, true),
        };
        for k in 0..self.n as isize {
            if bond {
                if let Some(j) = self.j(k) {
                    out.add_term(c(j, 0.0), string(self.n, &[(k, letter), (k + 1, letter)]).unwrap()).unwrap();
                }
            } else {
                out.add_term(c(self.h[k as usize], 0.0), string(self.n, &[(k, letter)]).unwrap()).unwrap();
            }
        }
        out
    }

    pub fn generator(&self, g: Gen, i: usize) -> PauliSum {
        let s = match g {
            Gen::Single => string(self.n, &[(i as isize, Y)]),
            Gen::Pair => string(self.n, &[(i as isize, Z), (i as isize + 1, Y)]),
        };
        PauliSum::from_string(s.unwrap(), c(1.0, 0.0))
    }
}

fn string(n: usize, letters: &[(isize, Pauli)]) -> Option<PauliString> {
    if letters.iter().any(|&(q, _)| q < 0 || q as usize >= n) {
        return None;
    }
    let l: Vec<(usize, Pauli)> = letters.iter().map(|&(q, p)| (q as usize, p)).collect();
    Some(PauliString::from_letters(n, &l).unwrap())
}

struct Acc<'a> {
    chain: &'a Chain,
    sum: PauliSum,
}

impl Acc<'_> {
    /// Adds `factor · coeff · letters`, dropping the term when the
    /// coefficient or any site lies outside the chain.
    fn add(&mut self, factor: C, coeff: Option<f64>, letters: &[(isize, Pauli)]) {
        if let (Some(k), Some(s)) = (coeff, string(self.chain.n, letters)) {
            self.sum.add_term(factor * k, s).unwrap();
        }
    }
}

/// Expected `[G, F]` from the corrected tables.
pub fn commutator(chain: &Chain, g: Gen, f: Field, i: usize) -> PauliSum {
    let mut a = Acc { chain, sum: PauliSum::new(chain.n).unwrap() };
    let i = i as isize;
    let (p2i, m2i) = (c(0.0, 2.0), c(0.0, -2.0));
    match (g, f) {
        (Gen::Single, Field::X) => a.add(m2i, chain.h(i), &[(i, Z)]),
        (Gen::Single, Field::Y) | (Gen::Single, Field::YY) => {}
        (Gen::Single, Field::Z) => a.add(p2i, chain.h(i), &[(i, X)]),
        (Gen::Single, Field::XX) => {
            a.add(m2i, chain.j(i), &[(i, Z), (i + 1, X)]);
            a.add(m2i, chain.j(i - 1), &[(i - 1, X), (i, Z)]);
        }
        (Gen::Single, Field::ZZ) => {
            a.add(p2i, chain.j(i), &[(i, X), (i + 1, Z)]);
            a.add(p2i, chain.j(i - 1), &[(i - 1, Z), (i, X)]);
        }
        (Gen::Pair, Field::X) => {
            a.add(p2i, chain.h(i), &[(i, Y), (i + 1, Y)]);
            a.add(m2i, chain.h(i + 1), &[(i, Z), (i + 1, Z)]);
        }
        (Gen::Pair, Field::Y) => a.add(m2i, chain.h(i), &[(i, X), (i + 1, Y)]),
        (Gen::Pair, Field::Z) => a.add(p2i, chain.h(i + 1), &[(i, Z), (i + 1, X)]),
        (Gen::Pair, Field::XX) => {
            a.add(m2i, chain.j(i + 1), &[(i, Z), (i + 1, Z), (i + 2, X)]);
            a.add(p2i, chain.j(i - 1), &[(i - 1, X), (i, Y), (i + 1, Y)]);
        }
        (Gen::Pair, Field::YY) => {
            a.add(m2i, chain.j(i), &[(i, X)]);
            a.add(m2i, chain.j(i - 1), &[(i - 1, Y), (i, X), (i + 1, Y)]);
        }
        (Gen::Pair, Field::ZZ) => {
            a.add(p2i, chain.j(i), &[(i + 1, X)]);
            a.add(p2i, chain.j(i + 1), &[(i, Z), (i + 1, X), (i + 2, Z)]);
        }
    }
    a.sum.simplify();
    a.sum
}

/// Expected `G F G` from the corrected tables: `F` minus twice the terms
/// that anticommute with `G`.
pub fn conjugation(chain: &Chain, g: Gen, f: Field, i: usize) -> PauliSum {
    let mut a = Acc { chain, sum: chain.field(f) };
    let i = i as isize;
    let m2 = c(-2.0, 0.0);
    match (g, f) {
        (Gen::Single, Field::X) => a.add(m2, chain.h(i), &[(i, X)]),
        (Gen::Single, Field::Y) | (Gen::Single, Field::YY) => {}
        (Gen::Single, Field::Z) => a.add(m2, chain.h(i), &[(i, Z)]),
        (Gen::Single, Field::XX) => {
            a.add(m2, chain.j(i), &[(i, X), (i + 1, X)]);
            a.add(m2, chain.j(i - 1), &[(i - 1, X), (i, X)]);
        }
        (Gen::Single, Field::ZZ) => {
            a.add(m2, chain.j(i), &[(i, Z), (i + 1, Z)]);
            a.add(m2, chain.j(i - 1), &[(i - 1, Z), (i, Z)]);
        }
        (Gen::Pair, Field::X) => {
            a.add(m2, chain.h(i), &[(i, X)]);
            a.add(m2, chain.h(i + 1), &[(i + 1, X)]);
        }
        (Gen::Pair, Field::Y) => a.add(m2, chain.h(i), &[(i, Y)]),
        (Gen::Pair, Field::Z) => a.add(m2, chain.h(i + 1), &[(i + 1, Z)]),
        (Gen::Pair, Field::XX) => {
            a.add(m2, chain.j(i - 1), &[(i - 1, X), (i, X)]);
            a.add(m2, chain.j(i + 1), &[(i + 1, X), (i + 2, X)]);
        }
        (Gen::Pair, Field::YY) => {
            a.add(m2, chain.j(i), &[(i, Y), (i + 1, Y)]);
            a.add(m2, chain.j(i - 1), &[(i - 1, Y), (i, Y)]);
        }
        (Gen::Pair, Field::ZZ) => {
            a.add(m2, chain.j(i + 1), &[(i + 1, Z), (i + 2, Z)]);
            a.add(m2, chain.j(i), &[(i, Z), (i + 1, Z)]);
        }
    }
    a.sum.simplify();
    a.sum
}

/// Positions at which each generator family exists on an `n`-site chain.
pub fn positions(g: Gen, n: usize) -> std::ops::Range<usize> {
    match g {
        Gen::Single => 0..n,
        Gen::Pair => 0..n - 1,
    }
}

/// Largest coefficient difference between two sums.
pub fn distance(a: &PauliSum, b: &PauliSum) -> f64 {
    let d = a.sub(b).unwrap();
    d.iter().map(|(_, z)| z.norm()).fold(0.0, f64::max)
}
