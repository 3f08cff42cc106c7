use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ggavqe_core::drivers::{adapt_vqe, gga_vqe, gga_vqe_2d, overlap_gga_vqe, reconstruct, RunResult};
use ggavqe_core::hamiltonian::{build_ising, load_integrals, map_molecular_hamiltonian, IsingSpec};
use ggavqe_core::measurement::{EnergyObjective, Objective, OverlapObjective};
use ggavqe_core::pauli::PauliSum;
use ggavqe_core::simulator::{exact_ground_state, Ansatz, StateVector, DEFAULT_DENSE_LIMIT};
use serde_json::json;

use crate::config::{Problem, RunConfig};

pub const OUTPUT_ENV: &str = "GGAVQE_OUTPUT_DIR";
const DEFAULT_OUTPUT: &str = "ggavqe-out";

/// Output directory: `output.dir` from the config (or `--output`), then the
/// environment, then `./ggavqe-out`.
pub fn output_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output
        .dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Writes to `path`, or to stdout when none is given.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn execute(problem: &Problem, kind: &str) -> Result<RunResult> {
    let p = problem;
    let result = match (kind, &p.hamiltonian, &p.overlap) {
        ("gga", Some(h), _) => gga_vqe(h, &p.pool, &p.initial, &p.backend, &p.options)?,
        ("adapt", Some(h), _) => adapt_vqe(h, &p.pool, &p.initial, &p.backend, &p.options)?,
        ("gga2d", Some(h), _) => gga_vqe_2d(h, &p.pool, &p.initial, &p.backend, &p.options)?,
        ("overlap", _, Some((method, target))) => {
            let obj = OverlapObjective::new(&p.backend, *method, &p.pool, target.clone())?;
            overlap_gga_vqe(&obj, &p.pool, &p.initial, &p.options)?
        }
        _ => unreachable!("validated by Problem::build"),
    };
    Ok(result)
}

/// Exact ground energy and state, when the register is small enough.
fn ground_state(h: &PauliSum) -> Result<Option<(f64, StateVector)>> {
    if h.n_qubits() > DEFAULT_DENSE_LIMIT {
        return Ok(None);
    }
    Ok(Some(exact_ground_state(h)?))
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    let problem = Problem::build(cfg)?;
    let result = execute(&problem, &cfg.driver.kind)?;
    let mut trace = result.trace;
    trace.config = Some(serde_json::to_value(cfg)?);

    let dir = output_dir(cfg);
    write(&dir.join("trace.json"), &trace.to_json()?)?;
    write(&dir.join("trace.csv"), &trace.to_csv())?;
    write(&dir.join("ansatz.txt"), &trace.final_ansatz)?;

    println!("driver      {}", cfg.driver.kind);
    println!("operators   {}", result.ansatz.len());
    println!("stop        {:?}", trace.stop_reason);
    println!("final value {:.12}", trace.final_value);
    if let Some(h) = &problem.hamiltonian {
        if let Some((e, gs)) = ground_state(h)? {
            println!("exact       {e:.12}");
            println!("fidelity    {:.6}", result.state.fidelity(&gs)?);
        }
    }
    println!("wrote {}", dir.display());
    Ok(())
}

/// The state the landscape or ground-truth commands look at: the configured
/// initial state, or a saved ansatz over the configured pool.
fn load_ansatz(path: &Path, problem: &Problem) -> Result<Ansatz> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let a = Ansatz::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    if a.n_qubits != problem.n_qubits {
        bail!("{}: ansatz has {} qubits, problem has {}", path.display(), a.n_qubits, problem.n_qubits);
    }
    Ok(a)
}

pub fn landscape(
    cfg: &RunConfig,
    generator: &str,
    points: usize,
    ansatz: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    if points < 2 {
        bail!("--points must be at least 2");
    }
    let problem = Problem::build(cfg)?;
    let g = match generator.parse::<usize>() {
        Ok(id) => problem.pool.get(id)?,
        Err(_) => problem.pool.find(generator).with_context(|| format!("no generator `{generator}` in the pool"))?,
    };
    let psi = match ansatz {
        Some(p) => load_ansatz(p, &problem)?.prepare(&problem.pool)?,
        None => problem.initial.prepare(problem.n_qubits)?,
    };

    let energy;
    let overlap;
    let obj: &dyn Objective = match (&problem.hamiltonian, &problem.overlap) {
        (_, Some((method, target))) if cfg.driver.kind == "overlap" => {
            overlap = OverlapObjective::new(&problem.backend, *method, &problem.pool, target.clone())?;
            &overlap
        }
        (Some(h), _) => {
            energy = EnergyObjective::new(&problem.backend, h)?;
            &energy
        }
        _ => bail!("no objective: configure a Hamiltonian or an overlap target"),
    };
    let e0 = obj.evaluate(&psi, [0, u64::MAX, 0, 0])?;
    let model = reconstruct(obj, g, &psi, e0, 0)?;

    use std::f64::consts::PI;
    let mut csv = String::from("theta,reconstructed,exact\n");
    for k in 0..points {
        let theta = -PI + 2.0 * PI * k as f64 / (points - 1) as f64;
        let exact = obj.exact(&psi.apply_exp_generator(g, theta)?)?;
        csv.push_str(&format!("{theta},{},{exact}\n", model.evaluate(theta)));
    }
    emit(out, &csv)
}

pub fn ground_truth(cfg: &RunConfig, ansatz: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let problem = Problem::build(cfg)?;
    let h = problem.hamiltonian.as_ref().context("ground-truth needs a Hamiltonian")?;
    let (energy, gs) = exact_ground_state(h)?;
    let mut report = json!({ "n_qubits": problem.n_qubits, "exact_energy": energy });
    if let Some(path) = ansatz {
        let psi = load_ansatz(path, &problem)?.prepare(&problem.pool)?;
        report["ansatz_energy"] = json!(psi.expectation(h)?);
        report["fidelity"] = json!(psi.fidelity(&gs)?);
    }
    emit(out, &(serde_json::to_string_pretty(&report)? + "\n"))
}

pub fn ising_text(n_qubits: usize, h: f64, j: f64) -> Result<String> {
    Ok(build_ising(&IsingSpec { n_qubits, h, j })?.to_text())
}

pub fn jw_text(path: &Path) -> Result<String> {
    let ints = load_integrals(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(map_molecular_hamiltonian(&ints)?.to_text())
}
