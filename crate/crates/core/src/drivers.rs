//! Adaptive ansatz construction loops.
//!
//! Every driver screens the whole pool at each iteration by reconstructing
//! each generator's landscape from a few objective evaluations on the current
//! state. The greedy drivers then append the best `(generator, angle)` pair
//! and never revisit earlier angles; the ADAPT baseline selects by gradient
//! and reoptimizes all angles with coordinate sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{sample_angles, LandscapeModel, LandscapeModel2D, Optimum, NODES_2D, TIE_TOL};
use crate::measurement::{
    auto_screening_plan, screening_observables, Accounting, Backend, BackendMode, EnergyObjective, MeasurementPlan,
    Objective, StreamKey,
};
use crate::pauli::{PauliString, PauliSum};
use crate::pools::{Generator, Pool};
use crate::simulator::{Ansatz, InitialState, StateVector};

/// Predicted improvements below this are treated as zero.
pub const EXHAUSTED_TOL: f64 = 1e-12;
pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_MAX_SWEEPS: usize = 50;
pub const DEFAULT_SWEEP_TOL: f64 = 1e-10;

const SHARED: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_operators: Option<usize>,
    pub gradient_epsilon: Option<f64>,
    pub min_energy_decrease: Option<f64>,
}

impl StopRule {
    pub fn max_operators(n: usize) -> Self {
        Self { max_operators: Some(n), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_operators.is_none() && self.gradient_epsilon.is_none() && self.min_energy_decrease.is_none() {
            return Err(Error::EmptyStopRule);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxOperators,
    GradientBelowEpsilon,
    DecreaseBelowThreshold,
    GainBelowThreshold,
    PoolExhausted,
}

/// How landscapes are sampled during screening.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreeningMode {
    /// A structured plan when one covers the problem, otherwise sampling.
    #[default]
    Auto,
    /// Evaluate the objective on rotated states at the pinned angles.
    Sampling,
    /// Estimate all needed Pauli strings once per iteration from the
    /// current state with a grouped measurement plan.
    Plan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverOptions {
    pub stop: StopRule,
    pub screening: ScreeningMode,
    /// Overlap mode stops once the best predicted gain falls below this.
    pub overlap_threshold: f64,
    pub max_sweeps: usize,
    pub sweep_tol: f64,
}

impl DriverOptions {
    pub fn new(stop: StopRule) -> Self {
        Self {
            stop,
            screening: ScreeningMode::Auto,
            overlap_threshold: DEFAULT_OVERLAP_THRESHOLD,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            sweep_tol: DEFAULT_SWEEP_TOL,
        }
    }

    pub fn with_screening(mut self, screening: ScreeningMode) -> Self {
        self.screening = screening;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriverKind {
    Gga,
    Adapt,
    Overlap,
    Gga2d,
}

/// Predicted outcome of appending one generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenEntry {
    pub id: usize,
    pub label: String,
    pub theta: f64,
    pub value: f64,
    /// Predicted improvement over the current value (drop for energies,
    /// rise for overlaps).
    pub gain: f64,
    pub gradient: f64,
    pub model: LandscapeModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedStep {
    pub id: usize,
    pub label: String,
    pub angle: f64,
    /// Angle in the generator's textbook convention, `angle / angle_scale`.
    pub scaled_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub selected: Vec<SelectedStep>,
    /// Estimated objective of the state entering this iteration.
    pub reference_value: f64,
    /// Value predicted by the landscape model(s) after the update.
    pub predicted_value: f64,
    /// Noise-free objective of the state after the update.
    pub exact_value: f64,
    pub screening: Vec<ScreenEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub landscape_2d: Option<LandscapeModel2D>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<usize>,
    pub accounting: Accounting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub driver: DriverKind,
    pub n_qubits: usize,
    pub pool: String,
    pub pool_size: usize,
    pub backend: BackendMode,
    /// Shots are allocated per measured group.
    pub shot_allocation: String,
    /// `sampling` or the name of the measurement plan.
    pub screening: String,
    pub initial_value: f64,
    pub iterations: Vec<IterationRecord>,
    pub stop_reason: StopReason,
    /// Screening of the final state when it triggered the stop.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_screening: Option<Vec<ScreenEntry>>,
    pub final_value: f64,
    pub final_ansatz: String,
    pub accounting: Accounting,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl RunTrace {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// Iteration, selected labels, and exact value per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,operators,angles,predicted,exact,evaluations,circuits,shots\n");
        out.push_str(&format!("0,,,{},{},0,0,0\n", self.initial_value, self.initial_value));
        for r in &self.iterations {
            let labels: Vec<&str> = r.selected.iter().map(|s| s.label.as_str()).collect();
            let angles: Vec<String> = r.selected.iter().map(|s| s.angle.to_string()).collect();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.iteration,
                labels.join(" "),
                angles.join(" "),
                r.predicted_value,
                r.exact_value,
                r.accounting.evaluations,
                r.accounting.circuits,
                r.accounting.shots
            ));
        }
        out
    }
}

/// Final products of a run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub trace: RunTrace,
    pub ansatz: Ansatz,
    pub state: StateVector,
}

type RealTerms = Vec<(PauliString, f64)>;

/// Precomputed symbolic observables for plan-based screening.
struct PlanScreening {
    plan: MeasurementPlan,
    h_terms: RealTerms,
    observables: Vec<(RealTerms, RealTerms)>,
}

impl PlanScreening {
    fn new(h: &PauliSum, pool: &Pool, plan: MeasurementPlan) -> Result<Self> {
        let h_terms = h.real_terms(1e-12)?;
        let observables = screening_observables(h, pool)?
            .into_iter()
            .map(|(grad, conj)| Ok((grad.real_terms(1e-12)?, conj.real_terms(1e-12)?)))
            .collect::<Result<Vec<_>>>()?;
        let needed = h_terms.iter().chain(observables.iter().flat_map(|(a, b)| a.iter().chain(b.iter())));
        plan.check_covers(needed.map(|(s, _)| s))?;
        Ok(Self { plan, h_terms, observables })
    }

    fn screen(&self, backend: &Backend, psi: &StateVector, iteration: u64) -> Result<(f64, Vec<LandscapeModel>)> {
        let est = backend.estimate_strings(psi, &self.plan, [iteration, SHARED, 0, 1])?;
        let value = |terms: &[(PauliString, f64)]| -> f64 {
            terms.iter().map(|(s, c)| c * if s.is_identity() { 1.0 } else { est[s] }).sum()
        };
        let e0 = value(&self.h_terms);
        let models =
            self.observables.iter().map(|(g, b)| LandscapeModel::Involutory { e0, g: value(g), b: value(b) }).collect();
        Ok((e0, models))
    }
}

enum Screener<'a> {
    Sampling(&'a dyn Objective),
    Plan(&'a dyn Objective, PlanScreening),
}

impl Screener<'_> {
    fn name(&self) -> String {
        match self {
            Screener::Sampling(_) => "sampling".into(),
            Screener::Plan(_, p) => format!("plan:{}", p.plan.name),
        }
    }

    fn objective(&self) -> &dyn Objective {
        match self {
            Screener::Sampling(o) | Screener::Plan(o, _) => *o,
        }
    }

    fn screen(&self, pool: &Pool, psi: &StateVector, iteration: u64) -> Result<(f64, Vec<LandscapeModel>)> {
        match self {
            Screener::Sampling(obj) => screen_by_sampling(*obj, pool, psi, iteration),
            Screener::Plan(obj, p) => p.screen(obj.backend(), psi, iteration),
        }
    }
}

/// Landscape models of every pool generator on `psi`: one shared evaluation
/// at `θ = 0` plus two (involutory) or four (tripotent) per generator.
pub fn screen_by_sampling(
    obj: &dyn Objective,
    pool: &Pool,
    psi: &StateVector,
    iteration: u64,
) -> Result<(f64, Vec<LandscapeModel>)> {
    let e0 = obj.evaluate(psi, [iteration, SHARED, 0, 0])?;
    let models =
        pool.generators().par_iter().map(|g| reconstruct(obj, g, psi, e0, iteration)).collect::<Result<Vec<_>>>()?;
    Ok((e0, models))
}

/// Landscape of `g` on `psi` from its pinned sample angles, given the
/// already estimated value `e0` at `θ = 0`.
pub fn reconstruct(
    obj: &dyn Objective,
    g: &Generator,
    psi: &StateVector,
    e0: f64,
    iteration: u64,
) -> Result<LandscapeModel> {
    let samples = sample_angles(g.class())
        .iter()
        .enumerate()
        .map(|(k, &theta)| obj.evaluate(&psi.apply_exp_generator(g, theta)?, [iteration, g.id() as u64, k as u64, 0]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(LandscapeModel::from_samples(g.class(), e0, &samples))
}

fn build_screener<'a>(
    obj: &'a EnergyObjective<'a>,
    h: &PauliSum,
    pool: &Pool,
    mode: ScreeningMode,
) -> Result<Screener<'a>> {
    match mode {
        ScreeningMode::Sampling => Ok(Screener::Sampling(obj)),
        ScreeningMode::Auto => match auto_screening_plan(h, pool)? {
            Some(plan) => Ok(Screener::Plan(obj, PlanScreening::new(h, pool, plan)?)),
            None => Ok(Screener::Sampling(obj)),
        },
        ScreeningMode::Plan => {
            if !pool.all_involutory() {
                return Err(Error::PlanCoverage("plan screening needs an involutory pool".into()));
            }
            let plan = auto_screening_plan(h, pool)?
                .ok_or_else(|| Error::PlanCoverage("no structured plan covers this Hamiltonian and pool".into()))?;
            Ok(Screener::Plan(obj, PlanScreening::new(h, pool, plan)?))
        }
    }
}

fn entries(pool: &Pool, models: &[LandscapeModel], maximize: bool) -> Vec<ScreenEntry> {
    pool.generators()
        .iter()
        .zip(models)
        .map(|(g, m)| {
            let Optimum { theta, value } = if maximize { m.maximize() } else { m.minimize() };
            let gain = if maximize { value - m.e0() } else { m.e0() - value };
            ScreenEntry {
                id: g.id(),
                label: g.label().to_string(),
                theta,
                value,
                gain,
                gradient: m.gradient(),
                model: *m,
            }
        })
        .collect()
}

/// Largest gain; among gains within [`TIE_TOL`], the smallest id.
fn best_by<F: Fn(&ScreenEntry) -> f64>(entries: &[ScreenEntry], key: F) -> Option<&ScreenEntry> {
    let mut best: Option<&ScreenEntry> = None;
    for e in entries {
        match best {
            Some(b) if key(e) <= key(b) + TIE_TOL => {}
            _ => best = Some(e),
        }
    }
    best
}

fn step_record(g: &Generator, angle: f64) -> SelectedStep {
    SelectedStep { id: g.id(), label: g.label().to_string(), angle, scaled_angle: angle / g.angle_scale() }
}

fn check_problem(pool: &Pool, n_qubits: usize, options: &DriverOptions) -> Result<()> {
    options.stop.validate()?;
    if pool.is_empty() {
        return Err(Error::PoolTooSmall { size: 0, needed: 1 });
    }
    if pool.n_qubits() != n_qubits {
        return Err(Error::SizeMismatch { left: pool.n_qubits(), right: n_qubits });
    }
    Ok(())
}

struct Trace<'a> {
    driver: DriverKind,
    pool: &'a Pool,
    backend: &'a Backend,
    screening: String,
    initial_value: f64,
    iterations: Vec<IterationRecord>,
    start: Accounting,
}

impl Trace<'_> {
    fn finish(
        self,
        ansatz: Ansatz,
        state: StateVector,
        final_value: f64,
        stop_reason: StopReason,
        final_screening: Option<Vec<ScreenEntry>>,
    ) -> RunResult {
        let trace = RunTrace {
            driver: self.driver,
            n_qubits: self.pool.n_qubits(),
            pool: self.pool.kind().name().to_string(),
            pool_size: self.pool.len(),
            backend: self.backend.mode(),
            shot_allocation: "per_group".to_string(),
            screening: self.screening,
            initial_value: self.initial_value,
            iterations: self.iterations,
            stop_reason,
            final_screening,
            final_value,
            final_ansatz: ansatz.to_text(),
            accounting: self.backend.accounting() - self.start,
            config: None,
        };
        RunResult { trace, ansatz, state }
    }
}

/// Greedy loop shared by the energy and overlap drivers.
fn greedy_loop(
    screener: &Screener<'_>,
    pool: &Pool,
    initial: &InitialState,
    options: &DriverOptions,
    driver: DriverKind,
) -> Result<RunResult> {
    let obj = screener.objective();
    let backend = obj.backend();
    let maximize = driver == DriverKind::Overlap;
    let n = obj.n_qubits();
    check_problem(pool, n, options)?;
    let mut ansatz = Ansatz::new(n, initial.clone());
    let mut psi = initial.prepare(n)?;
    let mut trace = Trace {
        driver,
        pool,
        backend,
        screening: screener.name(),
        initial_value: obj.exact(&psi)?,
        iterations: Vec::new(),
        start: backend.accounting(),
    };
    let mut value = trace.initial_value;
    let mut final_screening = None;
    let stop = options.stop;
    let reason = loop {
        if stop.max_operators.is_some_and(|m| ansatz.len() >= m) {
            break StopReason::MaxOperators;
        }
        let iteration = trace.iterations.len() + 1;
        let before = backend.accounting();
        let (e0, models) = screener.screen(pool, &psi, iteration as u64)?;
        let screening = entries(pool, &models, maximize);
        let best = best_by(&screening, |e| e.gain).expect("pool is nonempty").clone();
        let max_gradient = screening.iter().map(|e| e.gradient.abs()).fold(0.0, f64::max);
        let halt = if best.gain < EXHAUSTED_TOL {
            Some(StopReason::PoolExhausted)
        } else if maximize && best.gain < options.overlap_threshold {
            Some(StopReason::GainBelowThreshold)
        } else if stop.gradient_epsilon.is_some_and(|eps| max_gradient < eps) {
            Some(StopReason::GradientBelowEpsilon)
        } else if stop.min_energy_decrease.is_some_and(|d| best.gain < d) {
            Some(StopReason::DecreaseBelowThreshold)
        } else {
            None
        };
        if let Some(reason) = halt {
            final_screening = Some(screening);
            break reason;
        }
        let g = pool.get(best.id)?;
        ansatz.push(g, best.theta);
        psi = psi.apply_exp_generator(g, best.theta)?;
        value = obj.exact(&psi)?;
        trace.iterations.push(IterationRecord {
            iteration,
            selected: vec![step_record(g, best.theta)],
            reference_value: e0,
            predicted_value: best.value,
            exact_value: value,
            screening,
            landscape_2d: None,
            sweeps: None,
            accounting: backend.accounting() - before,
        });
    };
    Ok(trace.finish(ansatz, psi, value, reason, final_screening))
}

/// Greedy gradient-free adaptive VQE: at each iteration append the
/// generator and angle with the lowest predicted energy, without
/// reoptimizing earlier angles.
pub fn gga_vqe(
    h: &PauliSum,
    pool: &Pool,
    initial: &InitialState,
    backend: &Backend,
    options: &DriverOptions,
) -> Result<RunResult> {
    let obj = EnergyObjective::new(backend, h)?;
    let screener = build_screener(&obj, h, pool, options.screening)?;
    greedy_loop(&screener, pool, initial, options, DriverKind::Gga)
}

/// Greedy overlap maximization against a target with frozen earlier angles.
pub fn overlap_gga_vqe(
    objective: &crate::measurement::OverlapObjective<'_>,
    pool: &Pool,
    initial: &InitialState,
    options: &DriverOptions,
) -> Result<RunResult> {
    greedy_loop(&Screener::Sampling(objective), pool, initial, options, DriverKind::Overlap)
}

/// Energy of `ansatz` with step `k`'s angle replaced.
fn energy_with_angle(
    obj: &dyn Objective,
    pool: &Pool,
    ansatz: &Ansatz,
    k: usize,
    angle: f64,
    key: StreamKey,
) -> Result<f64> {
    let mut trial = ansatz.clone();
    trial.steps[k].angle = angle;
    obj.evaluate(&trial.prepare(pool)?, key)
}

/// One coordinate update of step `k`: reconstruct the landscape in the
/// angle offset and move to its minimizer. Returns the predicted drop.
fn coordinate_update(obj: &dyn Objective, pool: &Pool, ansatz: &mut Ansatz, k: usize, key: [u64; 3]) -> Result<f64> {
    let g = pool.get(ansatz.steps[k].generator)?;
    let current = ansatz.steps[k].angle;
    let e0 = energy_with_angle(obj, pool, ansatz, k, current, [key[0], key[1], key[2], SHARED])?;
    let samples = sample_angles(g.class())
        .iter()
        .enumerate()
        .map(|(j, &d)| energy_with_angle(obj, pool, ansatz, k, current + d, [key[0], key[1], key[2], j as u64]))
        .collect::<Result<Vec<_>>>()?;
    let model = LandscapeModel::from_samples(g.class(), e0, &samples);
    let opt = model.minimize();
    ansatz.steps[k].angle = crate::simulator::wrap_angle(current + opt.theta);
    Ok(e0 - opt.value)
}

/// ADAPT-VQE baseline: select the generator with the largest energy
/// gradient, append it at angle zero, then reoptimize every angle with
/// forward and backward analytic coordinate sweeps.
pub fn adapt_vqe(
    h: &PauliSum,
    pool: &Pool,
    initial: &InitialState,
    backend: &Backend,
    options: &DriverOptions,
) -> Result<RunResult> {
    let obj = EnergyObjective::new(backend, h)?;
    let screener = build_screener(&obj, h, pool, options.screening)?;
    let n = h.n_qubits();
    check_problem(pool, n, options)?;
    let mut ansatz = Ansatz::new(n, initial.clone());
    let mut psi = initial.prepare(n)?;
    let mut trace = Trace {
        driver: DriverKind::Adapt,
        pool,
        backend,
        screening: screener.name(),
        initial_value: obj.exact(&psi)?,
        iterations: Vec::new(),
        start: backend.accounting(),
    };
    let mut value = trace.initial_value;
    let mut final_screening = None;
    let stop = options.stop;
    let reason = loop {
        if stop.max_operators.is_some_and(|m| ansatz.len() >= m) {
            break StopReason::MaxOperators;
        }
        let iteration = trace.iterations.len() + 1;
        let before = backend.accounting();
        let (e0, models) = screener.screen(pool, &psi, iteration as u64)?;
        let screening = entries(pool, &models, false);
        let best = best_by(&screening, |e| e.gradient.abs()).expect("pool is nonempty").clone();
        let halt = if best.gradient.abs() < EXHAUSTED_TOL {
            Some(StopReason::PoolExhausted)
        } else if stop.gradient_epsilon.is_some_and(|eps| best.gradient.abs() < eps) {
            Some(StopReason::GradientBelowEpsilon)
        } else {
            None
        };
        if let Some(reason) = halt {
            final_screening = Some(screening);
            break reason;
        }
        let g = pool.get(best.id)?;
        ansatz.push(g, 0.0);
        let mut sweeps = 0;
        let mut predicted = e0;
        while sweeps < options.max_sweeps {
            sweeps += 1;
            let len = ansatz.len();
            let order: Vec<usize> = (0..len).chain((0..len).rev()).collect();
            let mut gain = 0.0;
            for (pos, &k) in order.iter().enumerate() {
                let key = [iteration as u64, sweeps as u64, pos as u64];
                gain += coordinate_update(&obj, pool, &mut ansatz, k, key)?;
            }
            predicted -= gain;
            if gain < options.sweep_tol {
                break;
            }
        }
        psi = ansatz.prepare(pool)?;
        value = obj.exact(&psi)?;
        let selected = ansatz
            .steps
            .iter()
            .map(|s| -> Result<SelectedStep> { Ok(step_record(pool.get(s.generator)?, s.angle)) })
            .collect::<Result<Vec<_>>>()?;
        trace.iterations.push(IterationRecord {
            iteration,
            selected,
            reference_value: e0,
            predicted_value: predicted,
            exact_value: value,
            screening,
            landscape_2d: None,
            sweeps: Some(sweeps),
            accounting: backend.accounting() - before,
        });
        if stop.min_energy_decrease.is_some_and(|d| e0 - predicted < d) {
            break StopReason::DecreaseBelowThreshold;
        }
    };
    Ok(trace.finish(ansatz, psi, value, reason, final_screening))
}

/// Samples the 2-D surface of `(g1, g2)` on the tensor grid, reusing the
/// 1-D models for the axis nodes so only the four diagonal nodes cost new
/// evaluations.
pub fn reconstruct_2d(
    obj: &dyn Objective,
    g1: &Generator,
    m1: &LandscapeModel,
    g2: &Generator,
    m2: &LandscapeModel,
    psi: &StateVector,
    iteration: u64,
) -> Result<LandscapeModel2D> {
    for g in [g1, g2] {
        if g.class() != crate::pools::GeneratorClass::Involutory {
            return Err(Error::NotInvolutory { label: g.label().to_string() });
        }
    }
    let mut values = [[0.0; 3]; 3];
    values[0][0] = m1.e0();
    for a in 1..3 {
        values[a][0] = m1.evaluate(NODES_2D[a]);
        values[0][a] = m2.evaluate(NODES_2D[a]);
    }
    for a in 1..3 {
        let first = psi.apply_exp_generator(g1, NODES_2D[a])?;
        for b in 1..3 {
            let state = first.apply_exp_generator(g2, NODES_2D[b])?;
            let key = [iteration, g1.id() as u64, g2.id() as u64, (100 + 3 * a + b) as u64];
            values[a][b] = obj.evaluate(&state, key)?;
        }
    }
    Ok(LandscapeModel2D::from_grid(values))
}

/// Two-generator greedy variant: rank generators by their 1-D optimum,
/// optimize the top two jointly on their 2-D landscape, append both.
pub fn gga_vqe_2d(
    h: &PauliSum,
    pool: &Pool,
    initial: &InitialState,
    backend: &Backend,
    options: &DriverOptions,
) -> Result<RunResult> {
    if pool.len() < 2 {
        return Err(Error::PoolTooSmall { size: pool.len(), needed: 2 });
    }
    if let Some(g) = pool.generators().iter().find(|g| g.class() != crate::pools::GeneratorClass::Involutory) {
        return Err(Error::NotInvolutory { label: g.label().to_string() });
    }
    let obj = EnergyObjective::new(backend, h)?;
    let screener = build_screener(&obj, h, pool, options.screening)?;
    let n = h.n_qubits();
    check_problem(pool, n, options)?;
    let mut ansatz = Ansatz::new(n, initial.clone());
    let mut psi = initial.prepare(n)?;
    let mut trace = Trace {
        driver: DriverKind::Gga2d,
        pool,
        backend,
        screening: screener.name(),
        initial_value: obj.exact(&psi)?,
        iterations: Vec::new(),
        start: backend.accounting(),
    };
    let mut value = trace.initial_value;
    let mut final_screening = None;
    let stop = options.stop;
    let reason = loop {
        let room = stop.max_operators.map(|m| m.saturating_sub(ansatz.len()));
        if room == Some(0) {
            break StopReason::MaxOperators;
        }
        let iteration = trace.iterations.len() + 1;
        let before = backend.accounting();
        let (e0, models) = screener.screen(pool, &psi, iteration as u64)?;
        let screening = entries(pool, &models, false);
        let mut ranked: Vec<&ScreenEntry> = screening.iter().collect();
        // stable sort keeps id order among equal values
        ranked.sort_by(|a, b| a.value.total_cmp(&b.value));
        let (first, second) = (ranked[0].clone(), ranked[1].clone());
        let max_gradient = screening.iter().map(|e| e.gradient.abs()).fold(0.0, f64::max);
        let halt = if first.gain < EXHAUSTED_TOL {
            Some(StopReason::PoolExhausted)
        } else if stop.gradient_epsilon.is_some_and(|eps| max_gradient < eps) {
            Some(StopReason::GradientBelowEpsilon)
        } else if stop.min_energy_decrease.is_some_and(|d| first.gain < d) {
            Some(StopReason::DecreaseBelowThreshold)
        } else {
            None
        };
        if let Some(reason) = halt {
            final_screening = Some(screening);
            break reason;
        }
        let g1 = pool.get(first.id)?;
        let g2 = pool.get(second.id)?;
        let (selected, predicted, surface) = if room == Some(1) {
            psi = psi.apply_exp_generator(g1, first.theta)?;
            ansatz.push(g1, first.theta);
            (vec![step_record(g1, first.theta)], first.value, None)
        } else {
            let surface = reconstruct_2d(
                screener.objective(),
                g1,
                &models[g1.id()],
                g2,
                &models[g2.id()],
                &psi,
                iteration as u64,
            )?;
            let opt = surface.minimize();
            psi = psi.apply_exp_generator(g1, opt.theta1)?.apply_exp_generator(g2, opt.theta2)?;
            ansatz.push(g1, opt.theta1);
            ansatz.push(g2, opt.theta2);
            (vec![step_record(g1, opt.theta1), step_record(g2, opt.theta2)], opt.value, Some(surface))
        };
        value = obj.exact(&psi)?;
        trace.iterations.push(IterationRecord {
            iteration,
            selected,
            reference_value: e0,
            predicted_value: predicted,
            exact_value: value,
            screening,
            landscape_2d: surface,
            sweeps: None,
            accounting: backend.accounting() - before,
        });
    };
    Ok(trace.finish(ansatz, psi, value, reason, final_screening))
}
