//! Run configuration: a TOML file with one table per concern, every value
//! overridable from the command line.

use std::fmt;
use std::path::{Path, PathBuf};

use ggavqe_core::drivers::{
    DriverOptions, ScreeningMode, StopRule, DEFAULT_MAX_SWEEPS, DEFAULT_OVERLAP_THRESHOLD, DEFAULT_SWEEP_TOL,
};
use ggavqe_core::hamiltonian::{
    build_general_chain, build_ising, hartree_fock_index, load_integrals, load_pauli_sum, map_molecular_hamiltonian,
    GeneralSpinChainSpec, IsingSpec,
};
use ggavqe_core::measurement::{Backend, OverlapMethod, DEFAULT_SHOTS};
use ggavqe_core::pauli::PauliSum;
use ggavqe_core::pools::{
    minimal_hardware_efficient_pool, pair_excitation_pool, qeb_pool, qubit_hardware_efficient_pool, Excitation, Pool,
};
use ggavqe_core::simulator::{parse_basis_label, Ansatz, InitialState};
use serde::{Deserialize, Serialize};

/// A configuration problem, reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

type CResult<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub pool: PoolConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub driver: DriverConfig,
    #[serde(default)]
    pub backend: BackendConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<OverlapConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// `ising`, `general_chain`, `pauli_file`, `integrals` or `none`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hx: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hz: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jx: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jy: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jz: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolConfig {
    /// `qeb`, `hardware_efficient`, `minimal`, `pairs` or `file`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_filter: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    /// `minus`, `zero`, `basis` or `hartree_fock`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_electrons: Option<usize>,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self { kind: "minus".into(), label: None, n_electrons: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriverConfig {
    /// `gga`, `adapt`, `overlap` or `gga2d`.
    pub kind: String,
    pub screening: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_operators: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_energy_decrease: Option<f64>,
    pub overlap_threshold: f64,
    pub max_sweeps: usize,
    pub sweep_tol: f64,
}

impl Default for DriverConfig {
    fn default() -> Self {
        Self {
            kind: "gga".into(),
            screening: "auto".into(),
            max_operators: None,
            gradient_epsilon: None,
            min_energy_decrease: None,
            overlap_threshold: DEFAULT_OVERLAP_THRESHOLD,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            sweep_tol: DEFAULT_SWEEP_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackendConfig {
    /// `exact` or `sampled`.
    pub mode: String,
    pub shots: u64,
    pub seed: u64,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self { mode: "exact".into(), shots: DEFAULT_SHOTS, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapConfig {
    /// `exact`, `compute_uncompute` or `swap_test`.
    pub method: String,
    /// Ansatz text file, or a previous run's trace JSON whose final ansatz
    /// becomes the target.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<PathBuf>,
    /// Target built from the configured initial state and these steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_steps: Option<Vec<TargetStep>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetStep {
    pub generator: String,
    pub angle: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

/// Applies a `section.key=value` override to a parsed TOML document. The
/// value is read as a TOML value when it parses as one, else as a string.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> CResult<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::new("--set", format!("expected section.key=value, got `{assignment}`")))?;
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, sections) = parts.split_last().expect("split yields one part");
    let mut table = doc;
    for s in sections {
        table = table
            .entry(s.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| ConfigError::new(key, format!("`{s}` is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

impl RunConfig {
    /// Reads `path`, applies overrides, and resolves relative file paths
    /// against the config's directory.
    pub fn load(path: &Path, overrides: &[String]) -> CResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        let mut doc: toml::Table =
            text.parse().map_err(|e| ConfigError::new("", format!("{}: {e}", path.display())))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let mut cfg: RunConfig = toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::new("", e.message().to_string()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        resolve(&mut cfg.problem.path);
        resolve(&mut cfg.pool.path);
        if let Some(o) = cfg.overlap.as_mut() {
            resolve(&mut o.target);
        }
        Ok(cfg)
    }
}

/// Everything a run needs, built and validated from a [`RunConfig`].
pub struct Problem {
    pub n_qubits: usize,
    /// `None` for target-only overlap problems.
    pub hamiltonian: Option<PauliSum>,
    pub pool: Pool,
    pub initial: InitialState,
    pub options: DriverOptions,
    pub backend: Backend,
    pub overlap: Option<(OverlapMethod, Ansatz)>,
}

fn need<T: Clone>(v: &Option<T>, field: &str) -> CResult<T> {
    v.clone().ok_or_else(|| ConfigError::new(field, "required"))
}

fn core_err(field: &str) -> impl Fn(ggavqe_core::Error) -> ConfigError + '_ {
    move |e| ConfigError::new(field, e.to_string())
}

fn build_hamiltonian(p: &ProblemConfig) -> CResult<(usize, Option<PauliSum>, Option<usize>)> {
    match p.kind.as_str() {
        "ising" => {
            let spec = IsingSpec {
                n_qubits: need(&p.n_qubits, "problem.n_qubits")?,
                h: need(&p.h, "problem.h")?,
                j: need(&p.j, "problem.j")?,
            };
            let h = build_ising(&spec).map_err(core_err("problem.n_qubits"))?;
            Ok((spec.n_qubits, Some(h), None))
        }
        "general_chain" => {
            let n = need(&p.n_qubits, "problem.n_qubits")?;
            let bonds = n.saturating_sub(1);
            let field = |v: &Option<Vec<f64>>, len: usize| v.clone().unwrap_or_else(|| vec![0.0; len]);
            let spec = GeneralSpinChainSpec {
                n_qubits: n,
                hx: field(&p.hx, n),
                hz: field(&p.hz, n),
                jx: field(&p.jx, bonds),
                jy: field(&p.jy, bonds),
                jz: field(&p.jz, bonds),
            };
            let h = build_general_chain(&spec).map_err(core_err("problem"))?;
            Ok((n, Some(h), None))
        }
        "pauli_file" => {
            let path = need(&p.path, "problem.path")?;
            let h = load_pauli_sum(&path, p.n_qubits).map_err(core_err("problem.path"))?;
            Ok((h.n_qubits(), Some(h), None))
        }
        "integrals" => {
            let path = need(&p.path, "problem.path")?;
            let ints = load_integrals(&path).map_err(core_err("problem.path"))?;
            let h = map_molecular_hamiltonian(&ints).map_err(core_err("problem.path"))?;
            Ok((ints.n_spin_orbitals, Some(h), Some(ints.n_electrons)))
        }
        "none" => Ok((need(&p.n_qubits, "problem.n_qubits")?, None, None)),
        other => Err(ConfigError::new(
            "problem.kind",
            format!("unknown problem `{other}` (expected ising, general_chain, pauli_file, integrals or none)"),
        )),
    }
}

pub fn build_pool(p: &PoolConfig, n: usize) -> CResult<Pool> {
    let err = core_err("pool");
    match p.kind.as_str() {
        "qeb" => {
            if p.spin_filter == Some(true) {
                let f = |e: &Excitation| e.conserves_spin();
                qeb_pool(n, Some(&f)).map_err(err)
            } else {
                qeb_pool(n, None).map_err(err)
            }
        }
        "hardware_efficient" => qubit_hardware_efficient_pool(n).map_err(err),
        "minimal" => minimal_hardware_efficient_pool(n).map_err(err),
        "pairs" => {
            let pairs: Vec<(usize, usize)> = need(&p.pairs, "pool.pairs")?.iter().map(|[a, b]| (*a, *b)).collect();
            pair_excitation_pool(n, &pairs).map_err(core_err("pool.pairs"))
        }
        "file" => {
            let path = need(&p.path, "pool.path")?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| ConfigError::new("pool.path", format!("cannot read {}: {e}", path.display())))?;
            Pool::parse(&text, n).map_err(core_err("pool.path"))
        }
        other => Err(ConfigError::new(
            "pool.kind",
            format!("unknown pool `{other}` (expected qeb, hardware_efficient, minimal, pairs or file)"),
        )),
    }
}

fn build_initial(c: &InitialConfig, n: usize, n_electrons: Option<usize>) -> CResult<InitialState> {
    match c.kind.as_str() {
        "minus" => Ok(InitialState::UniformMinus),
        "zero" => Ok(InitialState::Basis { index: 0 }),
        "basis" => {
            let label = need(&c.label, "initial.label")?;
            let (m, index) = parse_basis_label(&label).map_err(core_err("initial.label"))?;
            if m != n {
                return Err(ConfigError::new("initial.label", format!("{m} qubits, problem has {n}")));
            }
            Ok(InitialState::Basis { index })
        }
        "hartree_fock" => {
            let ne =
                c.n_electrons.or(n_electrons).ok_or_else(|| ConfigError::new("initial.n_electrons", "required"))?;
            Ok(InitialState::Basis { index: hartree_fock_index(ne, n).map_err(core_err("initial.n_electrons"))? })
        }
        other => Err(ConfigError::new(
            "initial.kind",
            format!("unknown initial state `{other}` (expected minus, zero, basis or hartree_fock)"),
        )),
    }
}

fn build_options(d: &DriverConfig) -> CResult<DriverOptions> {
    let screening = match d.screening.as_str() {
        "auto" => ScreeningMode::Auto,
        "sampling" => ScreeningMode::Sampling,
        "plan" => ScreeningMode::Plan,
        other => {
            return Err(ConfigError::new(
                "driver.screening",
                format!("unknown mode `{other}` (expected auto, sampling or plan)"),
            ))
        }
    };
    let stop = StopRule {
        max_operators: d.max_operators,
        gradient_epsilon: d.gradient_epsilon,
        min_energy_decrease: d.min_energy_decrease,
    };
    stop.validate().map_err(|_| {
        ConfigError::new("driver", "set at least one of max_operators, gradient_epsilon, min_energy_decrease")
    })?;
    if d.overlap_threshold.is_nan() || d.overlap_threshold < 0.0 {
        return Err(ConfigError::new("driver.overlap_threshold", "must be nonnegative"));
    }
    let mut options = DriverOptions::new(stop).with_screening(screening);
    options.overlap_threshold = d.overlap_threshold;
    options.max_sweeps = d.max_sweeps;
    options.sweep_tol = d.sweep_tol;
    Ok(options)
}

pub fn build_backend(b: &BackendConfig) -> CResult<Backend> {
    match b.mode.as_str() {
        "exact" => Ok(Backend::exact()),
        "sampled" => Backend::sampled(b.shots, b.seed).map_err(core_err("backend.shots")),
        other => {
            Err(ConfigError::new("backend.mode", format!("unknown backend `{other}` (expected exact or sampled)")))
        }
    }
}

fn load_target(o: &OverlapConfig, pool: &Pool, n: usize, initial: &InitialState) -> CResult<Ansatz> {
    let ansatz = match (&o.target, &o.target_steps) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("overlap.target", format!("cannot read {}: {e}", path.display())))?;
            let text = if path.extension().is_some_and(|e| e == "json") {
                let v: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| ConfigError::new("overlap.target", e.to_string()))?;
                v["final_ansatz"]
                    .as_str()
                    .ok_or_else(|| ConfigError::new("overlap.target", "trace has no final_ansatz"))?
                    .to_string()
            } else {
                text
            };
            Ansatz::parse(&text).map_err(core_err("overlap.target"))?
        }
        (None, Some(steps)) => {
            let mut a = Ansatz::new(n, initial.clone());
            for (k, s) in steps.iter().enumerate() {
                let g = pool.find(&s.generator).ok_or_else(|| {
                    ConfigError::new(
                        format!("overlap.target_steps[{k}].generator"),
                        format!("no generator `{}` in the pool", s.generator),
                    )
                })?;
                a.push(g, s.angle);
            }
            a
        }
        _ => return Err(ConfigError::new("overlap", "give exactly one of target, target_steps")),
    };
    if ansatz.n_qubits != n {
        return Err(ConfigError::new("overlap.target", format!("{} qubits, problem has {n}", ansatz.n_qubits)));
    }
    for s in &ansatz.steps {
        pool.get(s.generator).map_err(core_err("overlap.target"))?;
    }
    Ok(ansatz)
}

impl Problem {
    pub fn build(cfg: &RunConfig) -> CResult<Self> {
        let (n_qubits, hamiltonian, n_electrons) = build_hamiltonian(&cfg.problem)?;
        let pool = build_pool(&cfg.pool, n_qubits)?;
        let initial = build_initial(&cfg.initial, n_qubits, n_electrons)?;
        let options = build_options(&cfg.driver)?;
        let backend = build_backend(&cfg.backend)?;
        let overlap = match (cfg.driver.kind.as_str(), &cfg.overlap) {
            ("overlap", Some(o)) => {
                let method = match o.method.as_str() {
                    "exact" => OverlapMethod::Exact,
                    "compute_uncompute" => OverlapMethod::ComputeUncompute,
                    "swap_test" => OverlapMethod::SwapTest,
                    other => {
                        return Err(ConfigError::new(
                            "overlap.method",
                            format!("unknown method `{other}` (expected exact, compute_uncompute or swap_test)"),
                        ))
                    }
                };
                Some((method, load_target(o, &pool, n_qubits, &initial)?))
            }
            ("overlap", None) => return Err(ConfigError::new("overlap", "required by the overlap driver")),
            ("gga" | "adapt" | "gga2d", _) => {
                if hamiltonian.is_none() {
                    return Err(ConfigError::new("problem.kind", "energy drivers need a Hamiltonian"));
                }
                None
            }
            (other, _) => {
                return Err(ConfigError::new(
                    "driver.kind",
                    format!("unknown driver `{other}` (expected gga, adapt, overlap or gga2d)"),
                ))
            }
        };
        Ok(Self { n_qubits, hamiltonian, pool, initial, options, backend, overlap })
    }
}
