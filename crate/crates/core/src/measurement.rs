//! Expectation backends, qubit-wise commuting measurement plans, and
//! overlap estimators.

use std::collections::BTreeMap;
use std::ops::Sub;
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::pools::Pool;
use crate::simulator::{Ansatz, InitialState, StateVector, MAX_SIMULATED_QUBITS};

/// Shots per measured group used when none is configured.
pub const DEFAULT_SHOTS: u64 = 2500;

/// Identifies an independent random stream: typically
/// `[iteration, generator, sample, purpose]`.
pub type StreamKey = [u64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BackendMode {
    Exact,
    /// `shots` computational-basis samples per measured group.
    Sampled {
        shots: u64,
        seed: u64,
    },
}

/// Monotone usage counters.
///
/// `evaluations` counts circuit-equivalent objective evaluations: one per
/// prepared state whose objective is estimated, or one per measured group
/// when a screening plan estimates many observables from a single state.
/// `circuits` counts distinct measured circuits (state × basis setting).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accounting {
    pub evaluations: u64,
    pub circuits: u64,
    pub shots: u64,
    pub clamped: u64,
}

impl Sub for Accounting {
    type Output = Accounting;

    fn sub(self, rhs: Accounting) -> Accounting {
        Accounting {
            evaluations: self.evaluations - rhs.evaluations,
            circuits: self.circuits - rhs.circuits,
            shots: self.shots - rhs.shots,
            clamped: self.clamped - rhs.clamped,
        }
    }
}

#[derive(Debug)]
pub struct Backend {
    mode: BackendMode,
    evaluations: AtomicU64,
    circuits: AtomicU64,
    shots: AtomicU64,
    clamped: AtomicU64,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl Backend {
    pub fn exact() -> Self {
        Self::with_mode(BackendMode::Exact)
    }

    pub fn sampled(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidCount("shots must be positive".into()));
        }
        Ok(Self::with_mode(BackendMode::Sampled { shots, seed }))
    }

    pub fn with_mode(mode: BackendMode) -> Self {
        Self {
            mode,
            evaluations: AtomicU64::new(0),
            circuits: AtomicU64::new(0),
            shots: AtomicU64::new(0),
            clamped: AtomicU64::new(0),
        }
    }

    pub fn mode(&self) -> BackendMode {
        self.mode
    }

    pub fn is_exact(&self) -> bool {
        self.mode == BackendMode::Exact
    }

    pub fn accounting(&self) -> Accounting {
        Accounting {
            evaluations: self.evaluations.load(Ordering::SeqCst),
            circuits: self.circuits.load(Ordering::SeqCst),
            shots: self.shots.load(Ordering::SeqCst),
            clamped: self.clamped.load(Ordering::SeqCst),
        }
    }

    pub fn record_evaluations(&self, n: u64) {
        self.evaluations.fetch_add(n, Ordering::SeqCst);
    }

    /// Counts `n` measured circuits and, in sampled mode, their shots.
    pub fn record_circuits(&self, n: u64) {
        self.circuits.fetch_add(n, Ordering::SeqCst);
        if let BackendMode::Sampled { shots, .. } = self.mode {
            self.shots.fetch_add(n * shots, Ordering::SeqCst);
        }
    }

    fn rng(&self, key: StreamKey, sub: u64) -> ChaCha8Rng {
        let seed = match self.mode {
            BackendMode::Sampled { seed, .. } => seed,
            BackendMode::Exact => 0,
        };
        let mut h = splitmix(seed);
        for k in key.iter().chain(std::iter::once(&sub)) {
            h = splitmix(h ^ k);
        }
        ChaCha8Rng::seed_from_u64(h)
    }

    /// Estimates every member of every group of `plan` on `state`. Exact mode
    /// uses the exact outcome distribution after each group's basis change;
    /// sampled mode draws `shots` outcomes per group from stream
    /// `(key, group index)`. Records one evaluation and one circuit per
    /// group.
    pub fn estimate_strings(
        &self,
        state: &StateVector,
        plan: &MeasurementPlan,
        key: StreamKey,
    ) -> Result<BTreeMap<PauliString, f64>> {
        if plan.n_qubits != state.n_qubits() {
            return Err(Error::SizeMismatch { left: plan.n_qubits, right: state.n_qubits() });
        }
        let mut out = BTreeMap::new();
        for (gi, group) in plan.groups.iter().enumerate() {
            let dist = self.outcome_distribution(state, &group.pattern, key, gi as u64)?;
            for s in &group.members {
                let support = s.support() as usize;
                let value: f64 = dist
                    .iter()
                    .enumerate()
                    .map(|(i, p)| if (i & support).count_ones().is_multiple_of(2) { *p } else { -*p })
                    .sum();
                out.insert(*s, value);
            }
        }
        let n = plan.groups.len() as u64;
        self.record_evaluations(n);
        self.record_circuits(n);
        Ok(out)
    }

    /// Exact probabilities, or empirical frequencies, of computational-basis
    /// outcomes after rotating each qubit into the basis named by `pattern`.
    fn outcome_distribution(
        &self,
        state: &StateVector,
        pattern: &PauliString,
        key: StreamKey,
        sub: u64,
    ) -> Result<Vec<f64>> {
        let rotated = rotate_to_pattern(state, pattern);
        let probs = rotated.probabilities();
        match self.mode {
            BackendMode::Exact => Ok(probs),
            BackendMode::Sampled { shots, .. } => {
                let mut rng = self.rng(key, sub);
                let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidCount(e.to_string()))?;
                let mut counts = vec![0u64; probs.len()];
                for _ in 0..shots {
                    counts[dist.sample(&mut rng)] += 1;
                }
                Ok(counts.into_iter().map(|c| c as f64 / shots as f64).collect())
            }
        }
    }

    /// `⟨state|h|state⟩`. Exact mode calls the simulator directly; sampled
    /// mode measures the groups of `plan` (a greedy grouping of `h` when
    /// none is given). Records one evaluation and one circuit per group.
    pub fn measure_expectation(
        &self,
        state: &StateVector,
        h: &PauliSum,
        plan: Option<&MeasurementPlan>,
        key: StreamKey,
    ) -> Result<f64> {
        let owned;
        let plan = match plan {
            Some(p) => {
                p.check_covers(h.strings())?;
                p
            }
            None => {
                owned = MeasurementPlan::greedy(h.n_qubits(), h.strings())?;
                &owned
            }
        };
        self.expectation_with_plan(state, h, plan, key)
    }

    pub(crate) fn expectation_with_plan(
        &self,
        state: &StateVector,
        h: &PauliSum,
        plan: &MeasurementPlan,
        key: StreamKey,
    ) -> Result<f64> {
        let terms = h.real_terms(1e-12)?;
        self.record_evaluations(1);
        self.record_circuits(plan.groups.len() as u64);
        if self.is_exact() {
            return state.expectation(h);
        }
        let mut acc = 0.0;
        let mut cache: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (s, c) in &terms {
            if s.is_identity() {
                acc += c;
                continue;
            }
            let gi = plan.group_of(s).ok_or_else(|| Error::PlanCoverage(s.to_string()))?;
            if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(gi) {
                let dist = self.outcome_distribution(state, &plan.groups[gi].pattern, key, gi as u64)?;
                e.insert(dist);
            }
            let support = s.support() as usize;
            let v: f64 = cache[&gi]
                .iter()
                .enumerate()
                .map(|(i, p)| if (i & support).count_ones().is_multiple_of(2) { *p } else { -*p })
                .sum();
            acc += c * v;
        }
        Ok(acc)
    }

    /// Turns an exact outcome probability into an estimate: itself in exact
    /// mode, a binomial frequency over `shots` in sampled mode.
    fn estimate_probability(&self, p: f64, key: StreamKey, sub: u64) -> Result<f64> {
        let p = p.clamp(0.0, 1.0);
        match self.mode {
            BackendMode::Exact => Ok(p),
            BackendMode::Sampled { shots, .. } => {
                let mut rng = self.rng(key, sub);
                let b = Binomial::new(shots, p).map_err(|e| Error::InvalidCount(e.to_string()))?;
                Ok(b.sample(&mut rng) as f64 / shots as f64)
            }
        }
    }

    /// Probability of the all-zeros outcome of `U_a† U_b |0⟩`.
    pub fn overlap_compute_uncompute(
        &self,
        pool_a: &Pool,
        a: &Ansatz,
        pool_b: &Pool,
        b: &Ansatz,
        key: StreamKey,
    ) -> Result<f64> {
        if a.n_qubits != b.n_qubits {
            return Err(Error::SizeMismatch { left: a.n_qubits, right: b.n_qubits });
        }
        let psi = b.prepare(pool_b)?;
        self.compute_uncompute_state(pool_a, a, &psi, key)
    }

    /// Compute-uncompute against an already prepared state `U_b|0⟩`.
    pub fn compute_uncompute_state(&self, pool_a: &Pool, a: &Ansatz, psi: &StateVector, key: StreamKey) -> Result<f64> {
        let back = a.apply_inverse(pool_a, psi)?;
        self.record_evaluations(1);
        self.record_circuits(1);
        self.estimate_probability(back.amplitude(0).norm_sqr(), key, 0)
    }

    /// SWAP-test estimate `2·p(0) − 1` of `|⟨a|b⟩|²`, clamped to `[0, 1]`.
    pub fn overlap_swap_test(
        &self,
        pool_a: &Pool,
        a: &Ansatz,
        pool_b: &Pool,
        b: &Ansatz,
        key: StreamKey,
    ) -> Result<f64> {
        let phi = a.prepare(pool_a)?;
        let psi = b.prepare(pool_b)?;
        self.swap_test_states(&phi, &psi, key)
    }

    pub fn swap_test_states(&self, phi: &StateVector, psi: &StateVector, key: StreamKey) -> Result<f64> {
        let p0 = swap_test_p0(phi, psi)?;
        self.record_evaluations(1);
        self.record_circuits(1);
        let est = self.estimate_probability(p0, key, 0)?;
        let overlap = 2.0 * est - 1.0;
        let clamped = overlap.clamp(0.0, 1.0);
        if !self.is_exact() && clamped != overlap {
            self.clamped.fetch_add(1, Ordering::SeqCst);
        }
        Ok(clamped)
    }
}

/// Applies H for X and S† then H for Y on every qubit of `pattern`.
pub fn rotate_to_pattern(state: &StateVector, pattern: &PauliString) -> StateVector {
    let mut rotated = state.clone();
    for (q, letter) in pattern.letters() {
        match letter {
            Pauli::X => rotated.apply_hadamard(q),
            Pauli::Y => {
                rotated.apply_s_dagger(q);
                rotated.apply_hadamard(q);
            }
            Pauli::Z | Pauli::I => {}
        }
    }
    rotated
}

/// Exact ancilla-zero probability of the SWAP test on `|0⟩⊗|φ⟩⊗|ψ⟩`.
///
/// Register layout: qubits `0..N` hold φ, `N..2N` hold ψ and qubit `2N` is
/// the ancilla. The `N` controlled swaps of qubit `k` with `N+k` act together
/// as an exchange of the two halves of the index on the ancilla-one branch.
pub fn swap_test_p0(phi: &StateVector, psi: &StateVector) -> Result<f64> {
    let n = phi.n_qubits();
    if psi.n_qubits() != n {
        return Err(Error::SizeMismatch { left: n, right: psi.n_qubits() });
    }
    let total = 2 * n + 1;
    if total > MAX_SIMULATED_QUBITS {
        return Err(Error::RegisterTooLarge { n_qubits: total, limit: MAX_SIMULATED_QUBITS });
    }
    let dim = 1usize << n;
    let mut amps = vec![Complex64::default(); 1usize << total];
    for (j, b) in psi.amplitudes().iter().enumerate() {
        for (i, a) in phi.amplitudes().iter().enumerate() {
            amps[i | j << n] = a * b;
        }
    }
    let mut reg = StateVector::from_amplitudes_unnormalized(amps)?;
    let anc = 2 * n;
    reg.apply_hadamard(anc);
    let mut amps = reg.into_amplitudes();
    let half = 1usize << anc;
    for i in 0..dim {
        for j in 0..i {
            amps.swap(half | i | j << n, half | j | i << n);
        }
    }
    let mut reg = StateVector::from_amplitudes_unnormalized(amps)?;
    reg.apply_hadamard(anc);
    Ok(reg.amplitudes()[..half].iter().map(|a| a.norm_sqr()).sum())
}

/// Strings measured together after one per-qubit basis change.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementGroup {
    /// Measured letter per qubit (`I` where nothing is measured).
    pub pattern: PauliString,
    pub members: Vec<PauliString>,
}

impl MeasurementGroup {
    fn accepts(pattern: &PauliString, s: &PauliString) -> bool {
        let support = s.support();
        (pattern.x_mask() & support) == s.x_mask() && (pattern.z_mask() & support) == s.z_mask()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    pub name: String,
    pub n_qubits: usize,
    pub groups: Vec<MeasurementGroup>,
    index: BTreeMap<PauliString, usize>,
}

impl MeasurementPlan {
    /// Validates that each member matches its group's pattern and that no
    /// string appears twice. Identity strings are dropped.
    pub fn new(name: impl Into<String>, n_qubits: usize, groups: Vec<MeasurementGroup>) -> Result<Self> {
        let mut index = BTreeMap::new();
        let mut cleaned = Vec::with_capacity(groups.len());
        for (gi, mut g) in groups.into_iter().enumerate() {
            g.members.retain(|s| !s.is_identity());
            for s in &g.members {
                if s.n_qubits() != n_qubits {
                    return Err(Error::SizeMismatch { left: n_qubits, right: s.n_qubits() });
                }
                if !MeasurementGroup::accepts(&g.pattern, s) {
                    return Err(Error::PlanCoverage(format!("{s} does not match group pattern {}", g.pattern)));
                }
                if index.insert(*s, gi).is_some() {
                    return Err(Error::PlanCoverage(format!("{s} appears in two groups")));
                }
            }
            cleaned.push(g);
        }
        Ok(Self { name: name.into(), n_qubits, groups: cleaned, index })
    }

    /// First-fit grouping of `strings` in canonical order.
    pub fn greedy<'a>(n_qubits: usize, strings: impl IntoIterator<Item = &'a PauliString>) -> Result<Self> {
        let mut sorted: Vec<PauliString> = strings.into_iter().filter(|s| !s.is_identity()).copied().collect();
        sorted.sort();
        sorted.dedup();
        let mut groups: Vec<MeasurementGroup> = Vec::new();
        for s in sorted {
            let slot = groups.iter_mut().find(|g| g.pattern.qubitwise_commutes(&s).unwrap_or(false));
            match slot {
                Some(g) => {
                    g.pattern = PauliString::from_masks(
                        n_qubits,
                        g.pattern.x_mask() | s.x_mask(),
                        g.pattern.z_mask() | s.z_mask(),
                    )?;
                    g.members.push(s);
                }
                None => groups.push(MeasurementGroup { pattern: s, members: vec![s] }),
            }
        }
        Self::new("greedy", n_qubits, groups)
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group_of(&self, s: &PauliString) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn covers(&self, s: &PauliString) -> bool {
        s.is_identity() || self.index.contains_key(s)
    }

    pub fn check_covers<'a>(&self, strings: impl IntoIterator<Item = &'a PauliString>) -> Result<()> {
        for s in strings {
            if !self.covers(s) {
                return Err(Error::PlanCoverage(s.to_string()));
            }
        }
        Ok(())
    }

    /// Restricts the plan to `strings`, dropping groups left empty.
    pub fn restricted_to<'a>(&self, strings: impl IntoIterator<Item = &'a PauliString>) -> Result<Self> {
        let wanted: std::collections::BTreeSet<PauliString> = strings.into_iter().copied().collect();
        let groups = self
            .groups
            .iter()
            .map(|g| MeasurementGroup {
                pattern: g.pattern,
                members: g.members.iter().filter(|s| wanted.contains(s)).copied().collect(),
            })
            .filter(|g| !g.members.is_empty())
            .collect();
        Self::new(self.name.clone(), self.n_qubits, groups)
    }
}

fn pattern_from(n: usize, letter_at: impl Fn(usize) -> Pauli) -> Result<PauliString> {
    let letters: Vec<(usize, Pauli)> = (0..n).map(|q| (q, letter_at(q))).collect();
    PauliString::from_letters(n, &letters)
}

fn check_plan_size(n: usize) -> Result<()> {
    if !(2..=crate::pauli::MAX_QUBITS).contains(&n) {
        return Err(Error::InvalidQubitCount(n));
    }
    Ok(())
}

/// The five-group plan for transverse-field Ising screening with the
/// minimal pool: all-Z, all-X, all-Y, and the two alternating X/Z
/// patterns with X on even or on odd sites.
pub fn plan_ising_screening(n_qubits: usize) -> Result<MeasurementPlan> {
    use Pauli::{X, Y, Z};
    check_plan_size(n_qubits)?;
    let n = n_qubits;
    let s = |letters: &[(usize, Pauli)]| PauliString::from_letters(n, letters);
    let mut z_members = Vec::new();
    let mut x_members = Vec::new();
    let mut y_members = Vec::new();
    for p in 0..n {
        z_members.push(s(&[(p, Z)])?);
        x_members.push(s(&[(p, X)])?);
    }
    for p in 0..n - 1 {
        z_members.push(s(&[(p, Z), (p + 1, Z)])?);
        y_members.push(s(&[(p, Y), (p + 1, Y)])?);
    }
    let mut groups = vec![
        MeasurementGroup { pattern: pattern_from(n, |_| Z)?, members: z_members },
        MeasurementGroup { pattern: pattern_from(n, |_| X)?, members: x_members },
        MeasurementGroup { pattern: pattern_from(n, |_| Y)?, members: y_members },
    ];
    for parity in 0..2 {
        let mut members = Vec::new();
        for p in (parity..n).step_by(2) {
            if p + 1 < n {
                members.push(s(&[(p, X), (p + 1, Z)])?);
            }
            if p >= 1 {
                members.push(s(&[(p - 1, Z), (p, X)])?);
            }
            if p >= 1 && p + 1 < n {
                members.push(s(&[(p - 1, Z), (p, X), (p + 1, Z)])?);
            }
        }
        let pattern = pattern_from(n, |q| if q % 2 == parity { X } else { Z })?;
        groups.push(MeasurementGroup { pattern, members });
    }
    MeasurementPlan::new("ising", n, groups)
}

/// Plan for general XX/YY/ZZ chains with X and Z fields screened with the
/// minimal pool: all-Z, all-X, all-Y, then three period-three patterns with
/// one X followed by two Z, and three with one X followed by two Y. Each
/// string needed by the screening is placed in the first group that accepts
/// it, so the plan has at most nine groups.
pub fn plan_general_chain_screening(n_qubits: usize) -> Result<MeasurementPlan> {
    use Pauli::{X, Y, Z};
    check_plan_size(n_qubits)?;
    let n = n_qubits;
    let mut patterns = vec![pattern_from(n, |_| Z)?, pattern_from(n, |_| X)?, pattern_from(n, |_| Y)?];
    for other in [Z, Y] {
        for shift in 0..3 {
            patterns.push(pattern_from(n, |q| if q % 3 == shift { X } else { other })?);
        }
    }
    let required = general_chain_required_strings(n)?;
    let mut groups: Vec<MeasurementGroup> =
        patterns.iter().map(|p| MeasurementGroup { pattern: *p, members: Vec::new() }).collect();
    for s in &required {
        let g = groups
            .iter_mut()
            .find(|g| MeasurementGroup::accepts(&g.pattern, s))
            .ok_or_else(|| Error::PlanCoverage(s.to_string()))?;
        g.members.push(*s);
    }
    groups.retain(|g| !g.members.is_empty());
    MeasurementPlan::new("general_chain", n, groups)
}

/// Every string of `H`, `i[B,H]` and `BHB` for the generic chain with all
/// couplings present and each minimal-pool generator `B`.
fn general_chain_required_strings(n: usize) -> Result<Vec<PauliString>> {
    let spec = crate::hamiltonian::GeneralSpinChainSpec {
        n_qubits: n,
        hx: vec![1.0; n],
        hz: vec![1.0; n],
        jx: vec![1.0; n - 1],
        jy: vec![1.0; n - 1],
        jz: vec![1.0; n - 1],
    };
    let h = crate::hamiltonian::build_general_chain(&spec)?;
    let pool = crate::pools::minimal_hardware_efficient_pool(n)?;
    Ok(screening_strings(&h, &pool)?.into_iter().collect())
}

/// Symbolic observables needed to screen `pool` against `h` from a single
/// state: `H` itself and, per generator, `i[B,H]` and `BHB`.
pub fn screening_observables(h: &PauliSum, pool: &Pool) -> Result<Vec<(PauliSum, PauliSum)>> {
    pool.generators()
        .iter()
        .map(|g| {
            let mut grad = g.body().commutator(h)?.scale(Complex64::new(0.0, 1.0));
            grad.simplify();
            let mut conj = h.conjugate_by(g.body())?;
            conj.simplify();
            Ok((grad, conj))
        })
        .collect()
}

/// The union of strings in `h` and in all screening observables.
pub fn screening_strings(h: &PauliSum, pool: &Pool) -> Result<std::collections::BTreeSet<PauliString>> {
    let mut set: std::collections::BTreeSet<PauliString> = h.strings().copied().collect();
    for (grad, conj) in screening_observables(h, pool)? {
        set.extend(grad.strings().copied());
        set.extend(conj.strings().copied());
    }
    set.retain(|s| !s.is_identity());
    Ok(set)
}

/// Picks a structured screening plan that covers every observable needed
/// for `h` and `pool`: the five-group Ising plan when it suffices, then the
/// general-chain plan. `None` when neither covers or the pool is not
/// involutory.
pub fn auto_screening_plan(h: &PauliSum, pool: &Pool) -> Result<Option<MeasurementPlan>> {
    let n = h.n_qubits();
    if n < 2 || !pool.all_involutory() {
        return Ok(None);
    }
    let needed = screening_strings(h, pool)?;
    for plan in [plan_ising_screening(n)?, plan_general_chain_screening(n)?] {
        if needed.iter().all(|s| plan.covers(s)) {
            return Ok(Some(plan));
        }
    }
    Ok(None)
}

/// How candidate overlaps are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMethod {
    /// Direct `|⟨target|ψ⟩|²` from the simulator.
    Exact,
    ComputeUncompute,
    SwapTest,
}

/// Quantity estimated on a candidate state during screening.
pub trait Objective: Sync {
    fn n_qubits(&self) -> usize;
    fn backend(&self) -> &Backend;
    /// Estimate through the backend, drawing randomness from `key`.
    fn evaluate(&self, state: &StateVector, key: StreamKey) -> Result<f64>;
    /// Noise-free value, used for recorded replay values.
    fn exact(&self, state: &StateVector) -> Result<f64>;
}

/// `⟨ψ|H|ψ⟩`, measured in sampled mode with a greedy grouping of `H`.
pub struct EnergyObjective<'a> {
    backend: &'a Backend,
    h: &'a PauliSum,
    plan: MeasurementPlan,
}

impl<'a> EnergyObjective<'a> {
    pub fn new(backend: &'a Backend, h: &'a PauliSum) -> Result<Self> {
        h.real_terms(1e-12)?;
        Ok(Self { backend, h, plan: MeasurementPlan::greedy(h.n_qubits(), h.strings())? })
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        self.h
    }

    pub fn plan(&self) -> &MeasurementPlan {
        &self.plan
    }
}

impl Objective for EnergyObjective<'_> {
    fn n_qubits(&self) -> usize {
        self.h.n_qubits()
    }

    fn backend(&self) -> &Backend {
        self.backend
    }

    fn evaluate(&self, state: &StateVector, key: StreamKey) -> Result<f64> {
        self.backend.expectation_with_plan(state, self.h, &self.plan, key)
    }

    fn exact(&self, state: &StateVector) -> Result<f64> {
        state.expectation(self.h)
    }
}

/// `|⟨target|ψ⟩|²`, the landscape of the projector onto the target.
pub struct OverlapObjective<'a> {
    backend: &'a Backend,
    method: OverlapMethod,
    target_pool: &'a Pool,
    target: Ansatz,
    target_state: StateVector,
}

impl<'a> OverlapObjective<'a> {
    /// Target prepared by an ansatz over `target_pool`.
    pub fn new(backend: &'a Backend, method: OverlapMethod, target_pool: &'a Pool, target: Ansatz) -> Result<Self> {
        let target_state = target.prepare(target_pool)?;
        if method == OverlapMethod::SwapTest && 2 * target.n_qubits + 1 > MAX_SIMULATED_QUBITS {
            return Err(Error::RegisterTooLarge { n_qubits: 2 * target.n_qubits + 1, limit: MAX_SIMULATED_QUBITS });
        }
        Ok(Self { backend, method, target_pool, target, target_state })
    }

    /// Target given as a state vector; compute-uncompute then undoes it with
    /// a Householder reflection.
    pub fn from_state(
        backend: &'a Backend,
        method: OverlapMethod,
        pool: &'a Pool,
        target: &StateVector,
    ) -> Result<Self> {
        let ansatz = Ansatz::new(target.n_qubits(), InitialState::Custom(target.amplitudes().to_vec()));
        Self::new(backend, method, pool, ansatz)
    }

    pub fn target_state(&self) -> &StateVector {
        &self.target_state
    }

    pub fn method(&self) -> OverlapMethod {
        self.method
    }
}

impl Objective for OverlapObjective<'_> {
    fn n_qubits(&self) -> usize {
        self.target.n_qubits
    }

    fn backend(&self) -> &Backend {
        self.backend
    }

    fn evaluate(&self, state: &StateVector, key: StreamKey) -> Result<f64> {
        match self.method {
            OverlapMethod::Exact => {
                self.backend.record_evaluations(1);
                self.backend.record_circuits(1);
                self.target_state.fidelity(state)
            }
            OverlapMethod::ComputeUncompute => {
                self.backend.compute_uncompute_state(self.target_pool, &self.target, state, key)
            }
            OverlapMethod::SwapTest => self.backend.swap_test_states(&self.target_state, state, key),
        }
    }

    fn exact(&self, state: &StateVector) -> Result<f64> {
        self.target_state.fidelity(state)
    }
}
