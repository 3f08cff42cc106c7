//! Operator pools: generators, their algebraic class, and deterministic
//! enumeration.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

const CLASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorClass {
    /// `B² = I`.
    Involutory,
    /// `B³ = B`.
    Tripotent,
}

impl fmt::Display for GeneratorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorClass::Involutory => "involutory",
            GeneratorClass::Tripotent => "tripotent",
        })
    }
}

/// A Hermitian pool element with a verified algebraic class.
///
/// Angles elsewhere in the crate always multiply the body directly, i.e. the
/// unitary is `exp(−iθ·body)`. `angle_scale` records the prefactor a
/// generator carries in its textbook form (½ for hardware-efficient singles,
/// ⅛ for doubles), so that `θ / angle_scale` is the angle in that convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    id: usize,
    label: String,
    body: PauliSum,
    class: GeneratorClass,
    angle_scale: f64,
}

impl Generator {
    /// Builds a generator, checking hermiticity and classifying the body.
    pub fn new(id: usize, label: impl Into<String>, body: PauliSum, angle_scale: f64) -> Result<Self> {
        let label = label.into();
        let class = classify(&label, &body)?;
        let mut body = body;
        body.simplify();
        Ok(Self { id, label, body, class, angle_scale })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn body(&self) -> &PauliSum {
        &self.body
    }

    pub fn class(&self) -> GeneratorClass {
        self.class
    }

    pub fn angle_scale(&self) -> f64 {
        self.angle_scale
    }

    pub fn n_qubits(&self) -> usize {
        self.body.n_qubits()
    }

    /// The body as a single Pauli string, when it is one with unit weight.
    pub fn as_pauli_string(&self) -> Option<PauliString> {
        if self.body.len() != 1 {
            return None;
        }
        let (s, c) = self.body.iter().next()?;
        ((c - Complex64::new(1.0, 0.0)).norm() < CLASS_TOL).then_some(*s)
    }

    fn with_id(mut self, id: usize) -> Self {
        self.id = id;
        self
    }
}

/// Determines whether `body` squares to the identity or cubes to itself.
pub fn classify(label: &str, body: &PauliSum) -> Result<GeneratorClass> {
    let max_imag = body.max_imag();
    if max_imag > CLASS_TOL {
        return Err(Error::NonHermitian(max_imag));
    }
    if body.is_empty() {
        return Err(Error::Unclassified(label.to_string()));
    }
    let b2 = body.mul(body)?;
    let mut diff = b2.sub(&PauliSum::identity(body.n_qubits())?)?;
    diff.simplify_with(CLASS_TOL);
    if diff.is_empty() {
        return Ok(GeneratorClass::Involutory);
    }
    let mut diff = b2.mul(body)?.sub(body)?;
    diff.simplify_with(CLASS_TOL);
    if diff.is_empty() {
        return Ok(GeneratorClass::Tripotent);
    }
    Err(Error::Unclassified(label.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolKind {
    Qeb,
    QubitHardwareEfficient,
    MinimalHardwareEfficient,
    Custom,
}

impl PoolKind {
    pub fn name(self) -> &'static str {
        match self {
            PoolKind::Qeb => "qeb",
            PoolKind::QubitHardwareEfficient => "qubit_hardware_efficient",
            PoolKind::MinimalHardwareEfficient => "minimal_hardware_efficient",
            PoolKind::Custom => "custom",
        }
    }
}

/// Index pattern of a qubit excitation, passed to QEB symmetry filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Excitation {
    Single { p: usize, q: usize },
    Double { p: usize, q: usize, r: usize, s: usize },
}

impl Excitation {
    /// True when the excitation preserves the spin projection under the
    /// convention that even qubits carry spin up and odd qubits spin down.
    pub fn conserves_spin(&self) -> bool {
        match *self {
            Excitation::Single { p, q } => p % 2 == q % 2,
            Excitation::Double { p, q, r, s } => (p % 2 + q % 2) == (r % 2 + s % 2),
        }
    }
}

/// An ordered list of generators with ids `0..M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pool {
    kind: PoolKind,
    n_qubits: usize,
    generators: Vec<Generator>,
}

impl Pool {
    /// Assembles a pool, renumbering generators in the given order.
    pub fn from_generators(kind: PoolKind, n_qubits: usize, generators: Vec<Generator>) -> Result<Self> {
        let mut out = Vec::with_capacity(generators.len());
        for (id, g) in generators.into_iter().enumerate() {
            if g.n_qubits() != n_qubits {
                return Err(Error::SizeMismatch { left: n_qubits, right: g.n_qubits() });
            }
            out.push(g.with_id(id));
        }
        Ok(Self { kind, n_qubits, generators: out })
    }

    pub fn kind(&self) -> PoolKind {
        self.kind
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn get(&self, id: usize) -> Result<&Generator> {
        self.generators.get(id).ok_or(Error::UnknownGenerator(id))
    }

    pub fn find(&self, label: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.label == label)
    }

    pub fn all_involutory(&self) -> bool {
        self.generators.iter().all(|g| g.class == GeneratorClass::Involutory)
    }

    /// One line per generator: id, label, class, term count.
    pub fn describe(&self) -> String {
        let mut out = format!("# pool {} on {} qubits, {} generators\n", self.kind.name(), self.n_qubits, self.len());
        for g in &self.generators {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", g.id, g.label, g.class, g.body.len()));
        }
        out
    }

    /// Serializes as `generator <label>` blocks readable by [`Pool::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits {}\n", self.n_qubits);
        for g in &self.generators {
            out.push_str(&format!("generator {}\n", g.label));
            if g.angle_scale != 1.0 {
                out.push_str(&format!("scale {:?}\n", g.angle_scale));
            }
            for line in g.body.to_text().lines().filter(|l| !l.starts_with('#')) {
                out.push_str(line);
                out.push('\n');
            }
            out.push_str("end\n");
        }
        out
    }

    /// Parses a custom pool: blocks of `generator <label>`, an optional
    /// `scale <s>` line, Pauli-sum lines, `end`. Each body is classified on
    /// load.
    pub fn parse(text: &str, n_qubits: usize) -> Result<Pool> {
        let mut generators = Vec::new();
        let mut current: Option<(String, usize, String, f64)> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("generator") {
                if current.is_some() {
                    return Err(Error::Parse { line: line_no, message: "missing `end` before generator".into() });
                }
                let label = rest.trim();
                if label.is_empty() {
                    return Err(Error::Parse { line: line_no, message: "generator needs a label".into() });
                }
                current = Some((label.to_string(), line_no, String::new(), 1.0));
            } else if line == "end" {
                let (label, start, body, scale) =
                    current.take().ok_or(Error::Parse { line: line_no, message: "`end` without generator".into() })?;
                let sum = PauliSum::parse(&body, Some(n_qubits)).map_err(|e| match e {
                    Error::Parse { line, message } => Error::Parse { line: start + line, message },
                    other => other,
                })?;
                let g = Generator::new(generators.len(), label, sum, scale)
                    .map_err(|e| Error::Parse { line: start, message: e.to_string() })?;
                generators.push(g);
            } else if let Some(rest) = line.strip_prefix("scale ") {
                let (_, _, _, scale) = current
                    .as_mut()
                    .ok_or(Error::Parse { line: line_no, message: "`scale` outside generator block".into() })?;
                *scale = rest
                    .trim()
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite() && *v != 0.0)
                    .ok_or(Error::Parse { line: line_no, message: format!("invalid scale `{}`", rest.trim()) })?;
            } else {
                let (_, _, body, _) = current
                    .as_mut()
                    .ok_or(Error::Parse { line: line_no, message: "term outside generator block".into() })?;
                body.push_str(line);
                body.push('\n');
            }
        }
        if let Some((_, start, _, _)) = current {
            return Err(Error::Parse { line: start, message: "unterminated generator block".into() });
        }
        Pool::from_generators(PoolKind::Custom, n_qubits, generators)
    }
}

fn string_label(s: &PauliString) -> String {
    s.letters().iter().map(|(q, p)| format!("{}{}", p.as_char(), q)).collect()
}

fn string_generator(s: PauliString, angle_scale: f64) -> Result<Generator> {
    Generator::new(0, string_label(&s), PauliSum::from_string(s, Complex64::new(1.0, 0.0)), angle_scale)
}

fn check_pool_size(n_qubits: usize, min: usize) -> Result<()> {
    if n_qubits < min || n_qubits > crate::pauli::MAX_QUBITS {
        return Err(Error::InvalidQubitCount(n_qubits));
    }
    Ok(())
}

/// `½(X_q Y_p − Y_q X_p)` for `p < q`.
pub fn qeb_single(n_qubits: usize, p: usize, q: usize) -> Result<PauliSum> {
    PauliSum::from_real_terms(
        n_qubits,
        &[(0.5, &[(q, Pauli::X), (p, Pauli::Y)]), (-0.5, &[(q, Pauli::Y), (p, Pauli::X)])],
    )
}

/// The eight-term double qubit excitation between pairs `(p, q)` and `(r, s)`.
pub fn qeb_double(n_qubits: usize, p: usize, q: usize, r: usize, s: usize) -> Result<PauliSum> {
    use Pauli::{X, Y};
    let t = |a: Pauli, b: Pauli, c: Pauli, d: Pauli| [(r, a), (s, b), (p, c), (q, d)];
    let e = 0.125;
    PauliSum::from_real_terms(
        n_qubits,
        &[
            (e, &t(X, Y, X, X)),
            (e, &t(Y, X, X, X)),
            (e, &t(Y, Y, Y, X)),
            (e, &t(Y, Y, X, Y)),
            (-e, &t(X, X, Y, X)),
            (-e, &t(X, X, X, Y)),
            (-e, &t(Y, X, Y, Y)),
            (-e, &t(X, Y, Y, Y)),
        ],
    )
}

/// Disjoint index pairs `(p<q)`, `(r<s)` with `(p,q) < (r,s)`, in
/// lexicographic order.
fn pair_pairs(n: usize) -> Vec<(usize, usize, usize, usize)> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).collect();
    let mut out = Vec::new();
    for (i, &(p, q)) in pairs.iter().enumerate() {
        for &(r, s) in &pairs[i + 1..] {
            if r != p && r != q && s != p && s != q {
                out.push((p, q, r, s));
            }
        }
    }
    out
}

/// Qubit-excitation-based pool: singles then doubles, optionally filtered.
pub fn qeb_pool(n_qubits: usize, filter: Option<&dyn Fn(&Excitation) -> bool>) -> Result<Pool> {
    check_pool_size(n_qubits, 2)?;
    let keep = |e: &Excitation| filter.is_none_or(|f| f(e));
    let mut gens = Vec::new();
    for p in 0..n_qubits {
        for q in p + 1..n_qubits {
            if keep(&Excitation::Single { p, q }) {
                gens.push(Generator::new(0, format!("A({p},{q})"), qeb_single(n_qubits, p, q)?, 1.0)?);
            }
        }
    }
    for (p, q, r, s) in pair_pairs(n_qubits) {
        if keep(&Excitation::Double { p, q, r, s }) {
            gens.push(Generator::new(0, format!("A({p},{q},{r},{s})"), qeb_double(n_qubits, p, q, r, s)?, 1.0)?);
        }
    }
    Pool::from_generators(PoolKind::Qeb, n_qubits, gens)
}

/// Qubit hardware-efficient pool: for each pair `p<q` the strings `X_qY_p`
/// and `X_pY_q`, then for each double index pattern the three
/// representatives `X_rY_sX_pX_q`, `Y_rY_sY_pX_q`, `X_rX_sY_pX_q`.
pub fn qubit_hardware_efficient_pool(n_qubits: usize) -> Result<Pool> {
    use Pauli::{X, Y};
    check_pool_size(n_qubits, 2)?;
    let mut gens = Vec::new();
    for p in 0..n_qubits {
        for q in p + 1..n_qubits {
            for (a, b) in [(q, p), (p, q)] {
                gens.push(string_generator(PauliString::from_letters(n_qubits, &[(a, X), (b, Y)])?, 0.5)?);
            }
        }
    }
    for (p, q, r, s) in pair_pairs(n_qubits) {
        for [lr, ls, lp, lq] in [[X, Y, X, X], [Y, Y, Y, X], [X, X, Y, X]] {
            let st = PauliString::from_letters(n_qubits, &[(r, lr), (s, ls), (p, lp), (q, lq)])?;
            gens.push(string_generator(st, 0.125)?);
        }
    }
    Pool::from_generators(PoolKind::QubitHardwareEfficient, n_qubits, gens)
}

/// `{Y_p}` then `{Z_p Y_{p+1}}` for `p = 0..N−2`.
pub fn minimal_hardware_efficient_pool(n_qubits: usize) -> Result<Pool> {
    check_pool_size(n_qubits, 2)?;
    let mut gens = Vec::with_capacity(2 * n_qubits - 2);
    for p in 0..n_qubits - 1 {
        gens.push(string_generator(PauliString::single(n_qubits, p, Pauli::Y)?, 1.0)?);
    }
    for p in 0..n_qubits - 1 {
        gens.push(string_generator(PauliString::from_letters(n_qubits, &[(p, Pauli::Z), (p + 1, Pauli::Y)])?, 1.0)?);
    }
    Pool::from_generators(PoolKind::MinimalHardwareEfficient, n_qubits, gens)
}

/// Hardware-efficient single excitations `X_a Y_b` over an explicit list of
/// `(a, b)` qubit pairs.
pub fn pair_excitation_pool(n_qubits: usize, pairs: &[(usize, usize)]) -> Result<Pool> {
    check_pool_size(n_qubits, 2)?;
    let mut gens = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        if a == b {
            return Err(Error::InvalidCount(format!("pair ({a},{b}) repeats a qubit")));
        }
        let s = PauliString::from_letters(n_qubits, &[(a, Pauli::X), (b, Pauli::Y)])?;
        gens.push(string_generator(s, 0.5)?);
    }
    Pool::from_generators(PoolKind::Custom, n_qubits, gens)
}
