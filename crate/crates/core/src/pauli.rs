//! Phase-free Pauli strings and complex-weighted Pauli sums.
//!
//! A [`PauliString`] on `n` qubits is stored as an x-mask and a z-mask, with
//! qubit `k` mapped to bit `k`. The letter on qubit `k` is `I` (00), `X` (x),
//! `Z` (z) or `Y` (both). Strings carry no phase: `Y` is the Hermitian Pauli
//! matrix and every phase produced by a product lives in the coefficient of a
//! [`PauliSum`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default magnitude below which coefficients are pruned by [`PauliSum::simplify`].
pub const DEFAULT_DROP_TOL: f64 = 1e-14;

pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A power of the imaginary unit, `i^k` for `k` in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Phase-free tensor product of single-qubit Pauli letters.
///
/// Field order gives the canonical ordering: by qubit count, then z-mask,
/// then x-mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: u8,
    z: u64,
    x: u64,
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::InvalidQubitCount(n_qubits));
    }
    Ok(())
}

fn mask_for(n_qubits: usize) -> u64 {
    if n_qubits >= 64 {
        u64::MAX
    } else {
        (1u64 << n_qubits) - 1
    }
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self { n_qubits: n_qubits as u8, z: 0, x: 0 })
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mask = mask_for(n_qubits);
        if (x | z) & !mask != 0 {
            let index = 63 - ((x | z) & !mask).leading_zeros() as usize;
            return Err(Error::IndexOutOfRange { index, n_qubits });
        }
        Ok(Self { n_qubits: n_qubits as u8, z, x })
    }

    /// Builds a string from `(qubit, letter)` pairs; later entries on the same
    /// qubit overwrite earlier ones.
    pub fn from_letters(n_qubits: usize, letters: &[(usize, Pauli)]) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut s = Self::identity(n_qubits)?;
        for &(q, p) in letters {
            s.set(q, p)?;
        }
        Ok(s)
    }

    pub fn single(n_qubits: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        Self::from_letters(n_qubits, &[(qubit, letter)])
    }

    pub fn set(&mut self, qubit: usize, letter: Pauli) -> Result<()> {
        if qubit >= self.n_qubits() {
            return Err(Error::IndexOutOfRange { index: qubit, n_qubits: self.n_qubits() });
        }
        let bit = 1u64 << qubit;
        let (x, z) = letter.bits();
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits as usize
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        let bit = 1u64 << qubit;
        Pauli::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    /// Number of `Y` letters.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Non-identity letters in ascending qubit order.
    pub fn letters(&self) -> Vec<(usize, Pauli)> {
        let mut out = Vec::with_capacity(self.weight() as usize);
        let mut s = self.support();
        while s != 0 {
            let q = s.trailing_zeros() as usize;
            out.push((q, self.letter(q)));
            s &= s - 1;
        }
        out
    }

    fn check_same(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch { left: self.n_qubits(), right: other.n_qubits() });
        }
        Ok(())
    }

    /// Operator product `self · other = phase · product`.
    ///
    /// With `P = i^{|x∧z|} X^x Z^z`, moving `Z^{z1}` past `X^{x2}` contributes
    /// `(-1)^{|z1∧x2|}`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        self.check_same(other)?;
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let a1 = (self.x & self.z).count_ones();
        let a2 = (other.x & other.z).count_ones();
        let a3 = (x & z).count_ones();
        let swaps = (self.z & other.x).count_ones();
        let k = a1 + a2 + 2 * swaps + 4 * 64 - a3;
        Ok((Phase::from_power(k), PauliString { n_qubits: self.n_qubits, z, x }))
    }

    /// True when the two strings commute as operators.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// True when on every qubit the letters agree or one of them is `I`.
    pub fn qubitwise_commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_same(other)?;
        let both = self.support() & other.support();
        Ok((self.x ^ other.x) & both == 0 && (self.z ^ other.z) & both == 0)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for (q, p) in self.letters() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}{}", p.as_char(), q)?;
            first = false;
        }
        Ok(())
    }
}

/// Parses a whitespace-separated letter list such as `Z0 X1` (or `I`).
fn parse_letters(tokens: &[&str]) -> std::result::Result<Vec<(usize, Pauli)>, String> {
    let mut letters = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let mut chars = tok.chars();
        let c = chars.next().ok_or_else(|| "empty token".to_string())?;
        let p = Pauli::from_char(c).ok_or_else(|| format!("invalid Pauli letter in `{tok}`"))?;
        let rest = chars.as_str();
        if rest.is_empty() {
            if p == Pauli::I {
                continue;
            }
            return Err(format!("missing qubit index in `{tok}`"));
        }
        let q: usize = rest.parse().map_err(|_| format!("invalid qubit index in `{tok}`"))?;
        if q >= MAX_QUBITS {
            return Err(format!("qubit index {q} exceeds {}", MAX_QUBITS - 1));
        }
        if letters.iter().any(|&(r, _)| r == q) {
            return Err(format!("qubit {q} appears twice"));
        }
        letters.push((q, p));
    }
    Ok(letters)
}

/// Linear combination of Pauli strings on a fixed number of qubits.
///
/// Terms are kept in canonical order (z-mask, then x-mask) and every
/// arithmetic result is simplified with [`DEFAULT_DROP_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self { n_qubits, terms: BTreeMap::new() })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Ok(Self::from_string(PauliString::identity(n_qubits)?, Complex64::new(1.0, 0.0)))
    }

    pub fn from_string(s: PauliString, coeff: Complex64) -> Self {
        let mut sum = Self { n_qubits: s.n_qubits(), terms: BTreeMap::new() };
        sum.terms.insert(s, coeff);
        sum.simplify();
        sum
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, PauliString)>,
    {
        let mut sum = Self::new(n_qubits)?;
        for (c, s) in terms {
            sum.add_term(c, s)?;
        }
        sum.simplify();
        Ok(sum)
    }

    /// Real-weighted sum built from letter lists, e.g. `[(0.5, &[(0, X)])]`.
    pub fn from_real_terms(n_qubits: usize, terms: &[(f64, &[(usize, Pauli)])]) -> Result<Self> {
        let mut sum = Self::new(n_qubits)?;
        for (c, letters) in terms {
            sum.add_term(Complex64::new(*c, 0.0), PauliString::from_letters(n_qubits, letters)?)?;
        }
        sum.simplify();
        Ok(sum)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn strings(&self) -> impl Iterator<Item = &PauliString> {
        self.terms.keys()
    }

    pub fn coeff(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    /// Accumulates `coeff · s` without pruning.
    pub fn add_term(&mut self, coeff: Complex64, s: PauliString) -> Result<()> {
        if s.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { left: self.n_qubits, right: s.n_qubits() });
        }
        *self.terms.entry(s).or_default() += coeff;
        Ok(())
    }

    pub fn simplify(&mut self) {
        self.simplify_with(DEFAULT_DROP_TOL);
    }

    pub fn simplify_with(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    fn check_same(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(())
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Pauli strings are Hermitian, so the sum is Hermitian iff every
    /// coefficient is real.
    pub fn is_hermitian(&self) -> bool {
        self.is_hermitian_within(1e-12)
    }

    pub fn is_hermitian_within(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    /// Coefficients as reals, failing if any imaginary part exceeds `tol`.
    pub fn real_terms(&self, tol: f64) -> Result<Vec<(PauliString, f64)>> {
        let im = self.max_imag();
        if im > tol {
            return Err(Error::NonHermitian(im));
        }
        Ok(self.terms.iter().map(|(s, c)| (*s, c.re)).collect())
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.simplify();
        out
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            *out.terms.entry(*s).or_default() += c;
        }
        out.simplify();
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut out = PauliSum { n_qubits: self.n_qubits, terms: BTreeMap::new() };
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (phase, s) = a.multiply(b)?;
                *out.terms.entry(s).or_default() += ca * cb * phase.to_complex();
            }
        }
        out.simplify();
        Ok(out)
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `{self, other} = self·other + other·self`.
    pub fn anticommutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    /// `b · self · b`.
    pub fn conjugate_by(&self, b: &PauliSum) -> Result<PauliSum> {
        b.mul(self)?.mul(b)
    }

    /// Hermitian adjoint: Pauli strings are self-adjoint, so only the
    /// coefficients are conjugated.
    pub fn adjoint(&self) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.conj();
        }
        out
    }

    /// Serializes in the repo-wide text format, one term per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits {}\n", self.n_qubits);
        for (s, c) in &self.terms {
            if c.im == 0.0 {
                out.push_str(&format!("{} {}\n", c.re, s));
            } else {
                out.push_str(&format!("{} {} {}\n", c.re, c.im, s));
            }
        }
        out
    }

    /// Parses the text format.
    ///
    /// The qubit count is taken from `n_qubits`, else from a `# qubits <n>`
    /// header, else from the largest index that appears.
    pub fn parse(text: &str, n_qubits: Option<usize>) -> Result<PauliSum> {
        let mut header_n = None;
        let mut parsed: Vec<(Complex64, Vec<(usize, Pauli)>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let mut it = comment.split_whitespace();
                if it.next() == Some("qubits") {
                    if let Some(Ok(n)) = it.next().map(str::parse::<usize>) {
                        header_n = Some(n);
                    }
                }
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let err = |message: String| Error::Parse { line: line_no, message };
            let re: f64 = tokens[0].parse().map_err(|_| err(format!("invalid coefficient `{}`", tokens[0])))?;
            let (im, rest) = match tokens.get(1).map(|t| t.parse::<f64>()) {
                Some(Ok(im)) => (im, &tokens[2..]),
                _ => (0.0, &tokens[1..]),
            };
            if rest.is_empty() {
                return Err(err("missing Pauli word (use `I` for identity)".into()));
            }
            let letters = parse_letters(rest).map_err(err)?;
            parsed.push((Complex64::new(re, im), letters));
        }
        let max_index = parsed.iter().flat_map(|(_, l)| l.iter().map(|&(q, _)| q)).max();
        let n = n_qubits.or(header_n).unwrap_or_else(|| max_index.map_or(1, |q| q + 1));
        if let Some(q) = max_index {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, n_qubits: n });
            }
        }
        let mut sum = PauliSum::new(n)?;
        for (c, letters) in parsed {
            sum.add_term(c, PauliString::from_letters(n, &letters)?)?;
        }
        sum.simplify();
        Ok(sum)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}·{}", c.re, s)?;
            } else {
                write!(f, "({}{:+}i)·{}", c.re, c.im, s)?;
            }
            first = false;
        }
        Ok(())
    }
}

impl FromStr for PauliSum {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PauliSum::parse(s, None)
    }
}

/// Parses a compact label such as `Z0 Y1` into a string on `n_qubits`.
pub fn parse_string(n_qubits: usize, word: &str) -> Result<PauliString> {
    let tokens: Vec<&str> = word.split_whitespace().collect();
    let letters = parse_letters(&tokens).map_err(|message| Error::Parse { line: 1, message })?;
    PauliString::from_letters(n_qubits, &letters)
}
