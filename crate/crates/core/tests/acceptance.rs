//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::f64::consts::{FRAC_PI_4, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::tables::{self, Chain, Gen, FIELDS};
use common::*;
use ggavqe_core::drivers::*;
use ggavqe_core::hamiltonian::{build_general_chain, build_ising, hartree_fock_index, GeneralSpinChainSpec, IsingSpec};
use ggavqe_core::measurement::*;
use ggavqe_core::pauli::PauliSum;
use ggavqe_core::pools::*;
use ggavqe_core::simulator::{Ansatz, InitialState, StateVector};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ising(n: usize) -> PauliSum {
    build_ising(&IsingSpec { n_qubits: n, h: 0.5, j: 0.2 }).unwrap()
}

fn opts(max: usize) -> DriverOptions {
    DriverOptions::new(StopRule::max_operators(max))
}

fn model(obj: &dyn Objective, g: &Generator, psi: &StateVector) -> ggavqe_core::landscape::LandscapeModel {
    let e0 = obj.evaluate(psi, [0; 4]).unwrap();
    reconstruct(obj, g, psi, e0, 0).unwrap()
}

fn landscape_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let backend = Backend::exact();
    let mut worst: f64 = 0.0;
    let mut generators = 0;
    for k in 0..20 {
        let n = 2 + k % 5;
        let h = random_hamiltonian(&mut rng, n, 3 * n);
        let obj = EnergyObjective::new(&backend, &h).unwrap();
        let psi = StateVector::random(n, &mut rng).unwrap();
        for pool in [
            qeb_pool(n, None).unwrap(),
            qubit_hardware_efficient_pool(n).unwrap(),
            minimal_hardware_efficient_pool(n).unwrap(),
        ] {
            for g in pool.generators() {
                let m = model(&obj, g, &psi);
                let direct = DirectLandscape::new(&h, g.body(), &psi);
                for j in 0..128 {
                    let theta = -PI + 2.0 * PI * j as f64 / 128.0;
                    worst = worst.max((m.evaluate(theta) - direct.at(theta)).abs());
                }
                generators += 1;
            }
        }
    }
    ensure(worst < 1e-9, || format!("max error {worst:.2e}"))?;
    Ok(format!("20 instances, {generators} generators x 128 angles, max error {worst:.1e}"))
}

fn algebraic_classes() -> Check {
    let mut checked = 0;
    for n in 2..=4 {
        let id = DMatrix::<C>::identity(1 << n, 1 << n);
        for pool in [qubit_hardware_efficient_pool(n).unwrap(), minimal_hardware_efficient_pool(n).unwrap()] {
            for g in pool.generators() {
                let b = g.body();
                let sym = tables::distance(&b.mul(b).unwrap(), &PauliSum::identity(n).unwrap());
                let m = dense_sum(b);
                let dense = max_abs_diff(&(&m * &m), &id);
                ensure(sym < 1e-12 && dense < 1e-12, || format!("{} B^2 != I", g.label()))?;
                checked += 1;
            }
        }
        for g in qeb_pool(n, None).unwrap().generators() {
            let b = g.body();
            let sym = tables::distance(&b.mul(b).unwrap().mul(b).unwrap(), b);
            let m = dense_sum(b);
            let dense = max_abs_diff(&(&m * &m * &m), &m);
            ensure(sym < 1e-12 && dense < 1e-12, || format!("{} B^3 != B", g.label()))?;
            checked += 1;
        }
    }
    for (p, q, r, s) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
        let m = dense_sum(&qeb_double(4, p, q, r, s).unwrap());
        let (pq, rs) = ((1 << p) | (1 << q), (1 << r) | (1 << s));
        ensure((m[(rs, pq)] - c(0.0, 1.0)).norm() < 1e-12, || format!("A|1100> phase for ({p},{q},{r},{s})"))?;
        ensure((m[(pq, rs)] - c(0.0, -1.0)).norm() < 1e-12, || format!("A|0011> phase for ({p},{q},{r},{s})"))?;
        let others = (0..16).filter(|&j| j != pq && j != rs).all(|j| m.column(j).iter().all(|z| z.norm() < 1e-12));
        ensure(others, || "double excitation leaks outside its subspace".into())?;
    }
    Ok(format!("{checked} generators symbolically and densely; double excitations swap |1100>,|0011> with phase +-i"))
}

fn appendix_tables() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut cases = 0;
    for n in [2, 3, 4, 5, 6] {
        let chain = Chain {
            n,
            h: (0..n).map(|_| rng.random_range(0.1..1.0)).collect(),
            j: (0..n - 1).map(|_| rng.random_range(0.1..1.0)).collect(),
        };
        for g in [Gen::Single, Gen::Pair] {
            for i in tables::positions(g, n) {
                let b = chain.generator(g, i);
                for f in FIELDS {
                    let field = chain.field(f);
                    let comm = b.commutator(&field).unwrap();
                    ensure(tables::distance(&comm, &tables::commutator(&chain, g, f, i)) < 1e-14, || {
                        format!("[{g:?}_{i}, {f:?}] on {n} sites")
                    })?;
                    let conj = field.conjugate_by(&b).unwrap();
                    ensure(tables::distance(&conj, &tables::conjugation(&chain, g, f, i)) < 1e-14, || {
                        format!("{g:?}_{i} {f:?} {g:?}_{i} on {n} sites")
                    })?;
                    cases += 2;
                }
            }
        }
    }
    Ok(format!("24 entries, {cases} instances across chain positions and ends"))
}

fn plan_audit(plan: &MeasurementPlan, h: &PauliSum, pool: &Pool, psi: &StateVector) -> std::result::Result<(), String> {
    let needed = screening_strings(h, pool).unwrap();
    plan.check_covers(needed.iter()).map_err(|e| e.to_string())?;
    let est = Backend::exact().estimate_strings(psi, plan, [0; 4]).unwrap();
    for s in &needed {
        let direct = psi.expectation_string(s).unwrap();
        ensure((est[s] - direct).abs() < 1e-12, || format!("{s}: grouped {} vs {direct}", est[s]))?;
    }
    Ok(())
}

fn ising_plan() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut general_sizes = Vec::new();
    for n in [4, 8, 12] {
        let pool = minimal_hardware_efficient_pool(n).unwrap();
        let psi = StateVector::random(n, &mut rng).unwrap();
        let plan = plan_ising_screening(n).unwrap();
        ensure(plan.len() == 5, || format!("n={n}: {} groups", plan.len()))?;
        plan_audit(&plan, &ising(n), &pool, &psi)?;
        let mut v = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let spec = GeneralSpinChainSpec { n_qubits: n, hx: v(n), hz: v(n), jx: v(n - 1), jy: v(n - 1), jz: v(n - 1) };
        let general = plan_general_chain_screening(n).unwrap();
        ensure(general.len() <= 10, || format!("general plan has {} groups", general.len()))?;
        plan_audit(&general, &build_general_chain(&spec).unwrap(), &pool, &psi)?;
        general_sizes.push(general.len());
    }
    Ok(format!(
        "Ising plan 5 groups for N=4,8,12; general plan {general_sizes:?} groups; coverage and 1e-12 grouped values"
    ))
}

fn dense_ground(h: &PauliSum) -> StateVector {
    let (v, lambda) = hermitian_eigen(&dense_sum(h));
    let k = (0..lambda.len()).min_by(|&a, &b| lambda[a].total_cmp(&lambda[b])).unwrap();
    StateVector::from_amplitudes_unnormalized(v.column(k).iter().copied().collect()).unwrap().normalized()
}

fn gga_convergence() -> Check {
    let mut summary = Vec::new();
    for n in [4, 6, 8, 10] {
        let h = ising(n);
        let ground = dense_ground(&h);
        let pool = minimal_hardware_efficient_pool(n).unwrap();
        let r = gga_vqe(&h, &pool, &InitialState::UniformMinus, &Backend::exact(), &opts(2 * n - 2)).unwrap();
        let mut prev = r.trace.initial_value;
        for it in &r.trace.iterations {
            ensure(it.exact_value <= prev + 1e-12, || format!("n={n}: energy rose at iteration {}", it.iteration))?;
            prev = it.exact_value;
        }
        ensure(r.trace.iterations.len() <= 2 * n - 2, || "too many iterations".into())?;
        let f = r.state.fidelity(&ground).unwrap();
        ensure(f >= 0.98, || format!("n={n}: fidelity {f:.4}"))?;
        summary.push(format!("N={n}: {f:.4}"));
    }
    Ok(format!("final fidelities {}", summary.join(", ")))
}

fn shot_noise() -> Check {
    let n = 6;
    let h = ising(n);
    let ground = dense_ground(&h);
    let pool = minimal_hardware_efficient_pool(n).unwrap();
    let mut fids = Vec::new();
    for seed in 0..10 {
        let backend = Backend::sampled(DEFAULT_SHOTS, seed).unwrap();
        let r = gga_vqe(&h, &pool, &InitialState::UniformMinus, &backend, &opts(2 * n - 2)).unwrap();
        let replay = Ansatz::parse(&r.trace.final_ansatz).unwrap().prepare(&pool).unwrap();
        fids.push(replay.fidelity(&ground).unwrap());
    }
    let good = fids.iter().filter(|&&f| f >= 0.95).count();
    ensure(good >= 8, || format!("{good}/10 seeds reach 0.95: {fids:.3?}"))?;
    let lo = fids.iter().copied().fold(1.0, f64::min);
    Ok(format!("{good}/10 seeds >= 0.95 (minimum {lo:.4}), 2500 shots per group"))
}

fn accounting() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let n = 4;
    let h = random_hamiltonian(&mut rng, n, 10);
    let backend = Backend::sampled(100, 7).unwrap();
    let init = InitialState::Basis { index: 0b0101 };
    let sampling = opts(3).with_screening(ScreeningMode::Sampling);
    let evals = |t: &RunTrace| -> Vec<u64> { t.iterations.iter().map(|r| r.accounting.evaluations).collect() };

    let he = qubit_hardware_efficient_pool(n).unwrap();
    let r = gga_vqe(&h, &he, &init, &backend, &sampling).unwrap();
    let m = he.len() as u64;
    ensure(!r.trace.iterations.is_empty() && evals(&r.trace).iter().all(|&e| e == 2 * m + 1), || {
        format!("involutory {:?}", evals(&r.trace))
    })?;

    let qeb = qeb_pool(n, None).unwrap();
    let r = gga_vqe(&h, &qeb, &init, &backend, &sampling).unwrap();
    let mq = qeb.len() as u64;
    ensure(!r.trace.iterations.is_empty() && evals(&r.trace).iter().all(|&e| e == 4 * mq + 1), || {
        format!("tripotent {:?}", evals(&r.trace))
    })?;

    let minimal = minimal_hardware_efficient_pool(6).unwrap();
    let r = gga_vqe(&ising(6), &minimal, &InitialState::UniformMinus, &backend, &opts(4)).unwrap();
    ensure(r.trace.screening == "plan:ising" && evals(&r.trace) == [5, 5, 5, 5], || {
        format!("ising plan {:?}", evals(&r.trace))
    })?;

    let r = gga_vqe_2d(&h, &he, &init, &backend, &sampling).unwrap();
    let two = evals(&r.trace);
    ensure(!two.is_empty() && two.iter().all(|&e| e <= 9 * m), || format!("2-D {two:?} vs 9M = {}", 9 * m))?;
    Ok(format!(
        "involutory 2M+1={}, tripotent 4M+1={}, Ising plan 5, 2-D {} <= 9M={}",
        2 * m + 1,
        4 * mq + 1,
        two[0],
        9 * m
    ))
}

const HF_PAIRS: [(usize, usize); 7] = [(4, 0), (8, 0), (5, 1), (9, 1), (5, 0), (7, 0), (7, 1)];

fn overlap_toy() -> Check {
    let n = 10;
    let pool = pair_excitation_pool(n, &HF_PAIRS).unwrap();
    let init = InitialState::Basis { index: hartree_fock_index(8, n).unwrap() };
    let on_50 = pool.generators().iter().find(|g| g.label() == "Y0X5").unwrap();
    let target = Ansatz::new(n, init.clone()).with_step(on_50, 0.9);
    let methods = [OverlapMethod::Exact, OverlapMethod::ComputeUncompute, OverlapMethod::SwapTest];
    let mut finals = Vec::new();
    for method in methods {
        let backend = Backend::exact();
        let obj = OverlapObjective::new(&backend, method, &pool, target.clone()).unwrap();
        let r = overlap_gga_vqe(&obj, &pool, &init, &opts(4)).unwrap();
        let t = &r.trace;
        ensure(t.iterations.len() == 1, || format!("{method:?}: {} iterations", t.iterations.len()))?;
        let first = &t.iterations[0];
        ensure(first.selected[0].label == "Y0X5", || format!("{method:?} chose {}", first.selected[0].label))?;
        let dominant = first.screening.iter().max_by(|a, b| a.gain.total_cmp(&b.gain)).unwrap();
        ensure(dominant.label == "Y0X5", || "pair (5,0) not dominant".into())?;
        ensure(t.final_value >= 0.99, || format!("{method:?}: fidelity {}", t.final_value))?;
        let last = t.final_screening.as_ref().ok_or("no final screening")?;
        ensure(last.iter().all(|e| e.gain < DEFAULT_OVERLAP_THRESHOLD), || {
            format!("{method:?}: iteration-2 gain above threshold")
        })?;
        finals.push((t.final_value, first.predicted_value, first.selected[0].angle));
    }
    for w in finals.windows(2) {
        let d = (w[0].0 - w[1].0).abs().max((w[0].1 - w[1].1).abs()).max((w[0].2 - w[1].2).abs());
        ensure(d < 1e-12, || format!("exact-mode methods differ by {d:.1e}"))?;
    }
    let shots = DEFAULT_SHOTS;
    let mut sampled = Vec::new();
    for method in [OverlapMethod::ComputeUncompute, OverlapMethod::SwapTest] {
        let backend = Backend::sampled(shots, 8).unwrap();
        let obj = OverlapObjective::new(&backend, method, &pool, target.clone()).unwrap();
        let r = overlap_gga_vqe(&obj, &pool, &init, &opts(1)).unwrap();
        let f = r.trace.final_value;
        ensure(r.trace.iterations[0].selected[0].label == "Y0X5" && f >= 0.99, || {
            format!("sampled {method:?}: fidelity {f}")
        })?;
        let est = obj.evaluate(&r.state, [99, 0, 0, 0]).unwrap();
        let sigma = match method {
            OverlapMethod::SwapTest => {
                let p0 = (1.0 + f) / 2.0;
                2.0 * (p0 * (1.0 - p0) / shots as f64).sqrt()
            }
            _ => (f * (1.0 - f) / shots as f64).sqrt(),
        }
        .max(1.0 / shots as f64);
        ensure((est - f).abs() <= 3.0 * sigma, || format!("sampled {method:?}: {est} vs {f} (sigma {sigma:.1e})"))?;
        sampled.push(format!("{method:?} {f:.4}"));
    }
    Ok(format!(
        "1 iteration, fidelity {:.6} for all methods (agree to 1e-12); sampled: {}",
        finals[0].0,
        sampled.join(", ")
    ))
}

fn overlap_identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let backend = Backend::exact();
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let n = 1 + k % 5;
        let n = n.max(2);
        let pool = if k % 2 == 0 { qubit_hardware_efficient_pool(n).unwrap() } else { qeb_pool(n, None).unwrap() };
        let mut make = || {
            let mut a = Ansatz::new(n, InitialState::Basis { index: rng.random_range(0..1u64 << n) });
            for _ in 0..rng.random_range(1..6) {
                let g = &pool.generators()[rng.random_range(0..pool.len())];
                a.push(g, rng.random_range(-PI..PI));
            }
            a
        };
        let (a, b) = (make(), make());
        let (pa, pb) = (a.prepare(&pool).unwrap(), b.prepare(&pool).unwrap());
        let direct = (vector(&pa).adjoint() * vector(&pb))[(0, 0)].norm_sqr();
        let cu = backend.overlap_compute_uncompute(&pool, &a, &pool, &b, [0; 4]).unwrap();
        let sw = backend.overlap_swap_test(&pool, &a, &pool, &b, [0; 4]).unwrap();
        let p0 = swap_test_p0(&pa, &pb).unwrap();
        worst = worst.max((cu - direct).abs()).max((sw - direct).abs()).max((p0 - (1.0 + direct) / 2.0).abs());
    }
    ensure(worst < 1e-12, || format!("max deviation {worst:.1e}"))?;
    Ok(format!("50 pairs, compute-uncompute = SWAP test = |<a|b>|^2 and p(0) = (1+F)/2 within {worst:.1e}"))
}

fn dense_rotation(b: &DMatrix<C>, theta: f64) -> DMatrix<C> {
    let d = b.nrows();
    DMatrix::<C>::identity(d, d) * c(theta.cos(), 0.0) - b * c(0.0, theta.sin())
}

fn two_dimensional() -> Check {
    // the seven-node design leaves two of the nine surface coefficients free
    let f = |t: f64| [1.0, (2.0 * t).cos(), (2.0 * t).sin()];
    let nodes = [
        (0.0, 0.0),
        (FRAC_PI_4, 0.0),
        (-FRAC_PI_4, 0.0),
        (0.0, FRAC_PI_4),
        (0.0, -FRAC_PI_4),
        (FRAC_PI_4, FRAC_PI_4),
        (FRAC_PI_4, -FRAC_PI_4),
    ];
    let rows: Vec<f64> = nodes.iter().flat_map(|&(a, b)| (0..9).map(move |k| f(a)[k / 3] * f(b)[k % 3])).collect();
    let rank7 = DMatrix::from_row_slice(7, 9, &rows).rank(1e-10);

    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let backend = Backend::exact();
    let mut worst: f64 = 0.0;
    let mut slice: f64 = 0.0;
    for _ in 0..10 {
        let n = rng.random_range(2..=4);
        let h = random_hamiltonian(&mut rng, n, 2 * n);
        let obj = EnergyObjective::new(&backend, &h).unwrap();
        let psi = StateVector::random(n, &mut rng).unwrap();
        let pool = qubit_hardware_efficient_pool(n).unwrap();
        let i = rng.random_range(0..pool.len());
        let j = (i + 1 + rng.random_range(0..pool.len() - 1)) % pool.len();
        let (g1, g2) = (&pool.generators()[i], &pool.generators()[j]);
        let (m1, m2) = (model(&obj, g1, &psi), model(&obj, g2, &psi));
        let surface = reconstruct_2d(&obj, g1, &m1, g2, &m2, &psi, 0).unwrap();
        let (b1, b2, hm, v) = (dense_sum(g1.body()), dense_sum(g2.body()), dense_sum(&h), vector(&psi));
        for a in 0..64 {
            let t1 = -PI + 2.0 * PI * a as f64 / 64.0;
            let first = dense_rotation(&b1, t1) * &v;
            for b in 0..64 {
                let t2 = -PI + 2.0 * PI * b as f64 / 64.0;
                let want = dense_expectation(&hm, &(dense_rotation(&b2, t2) * &first));
                worst = worst.max((surface.evaluate(t1, t2) - want).abs());
            }
            slice = slice.max((surface.slice_first().evaluate(t1) - m1.evaluate(t1)).abs());
        }
    }
    ensure(worst < 1e-9 && slice < 1e-12, || format!("surface error {worst:.1e}, slice error {slice:.1e}"))?;
    ensure(rank7 < 9, || "seven-node design unexpectedly full rank".into())?;
    Ok(format!(
        "deviation: 9-node grid (5 nodes from the 1-D screens + 4 new); 7-node design has rank {rank7}/9. \
         64x64 scans max error {worst:.1e}, slices {slice:.1e}"
    ))
}

type Replay<'a> = Box<dyn Fn() -> String + 'a>;

fn determinism() -> Check {
    let n = 5;
    let h = ising(n);
    let minimal = minimal_hardware_efficient_pool(n).unwrap();
    let he = qubit_hardware_efficient_pool(n).unwrap();
    let init = InitialState::UniformMinus;
    let runs: Vec<(&str, Replay)> = vec![
        (
            "gga",
            Box::new(|| {
                gga_vqe(&h, &minimal, &init, &Backend::sampled(2500, 7).unwrap(), &opts(8))
                    .unwrap()
                    .trace
                    .to_json()
                    .unwrap()
            }),
        ),
        (
            "gga sampling",
            Box::new(|| {
                gga_vqe(
                    &h,
                    &he,
                    &init,
                    &Backend::sampled(500, 7).unwrap(),
                    &opts(3).with_screening(ScreeningMode::Sampling),
                )
                .unwrap()
                .trace
                .to_json()
                .unwrap()
            }),
        ),
        (
            "adapt",
            Box::new(|| {
                adapt_vqe(&h, &minimal, &init, &Backend::sampled(500, 7).unwrap(), &opts(3))
                    .unwrap()
                    .trace
                    .to_json()
                    .unwrap()
            }),
        ),
        (
            "gga2d",
            Box::new(|| {
                gga_vqe_2d(&h, &minimal, &init, &Backend::sampled(500, 7).unwrap(), &opts(4))
                    .unwrap()
                    .trace
                    .to_json()
                    .unwrap()
            }),
        ),
        (
            "overlap",
            Box::new(|| {
                let backend = Backend::sampled(500, 7).unwrap();
                let target = Ansatz::new(n, init.clone()).with_step(&minimal.generators()[2], 0.8);
                let obj = OverlapObjective::new(&backend, OverlapMethod::SwapTest, &minimal, target).unwrap();
                overlap_gga_vqe(&obj, &minimal, &init, &opts(2)).unwrap().trace.to_json().unwrap()
            }),
        ),
    ];
    for (name, run) in &runs {
        ensure(run() == run(), || format!("{name} traces differ"))?;
    }
    Ok(format!("{} drivers, repeated sampled runs byte-identical", runs.len()))
}

type Criterion = (&'static str, Option<u64>, fn() -> Check);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("landscape equivalence", Some(60), landscape_equivalence),
        ("algebraic classes", Some(10), algebraic_classes),
        ("appendix tables", Some(5), appendix_tables),
        ("five-group Ising plan", None, ising_plan),
        ("GGA-VQE convergence", Some(120), gga_convergence),
        ("shot-noise robustness", Some(300), shot_noise),
        ("measurement accounting", None, accounting),
        ("overlap mode toy", None, overlap_toy),
        ("overlap estimator identities", None, overlap_identities),
        ("2-D landscape", None, two_dimensional),
        ("determinism", None, determinism),
    ];
    let mut failed = 0;
    for (k, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > Duration::from_secs(b) => Err(format!("took {elapsed:.1?}, budget {b} s")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({elapsed:.2?})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail} ({elapsed:.2?})", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
