//! Acceptance suite. Runs each criterion in turn, prints one PASS/FAIL line
//! per criterion with its runtime against the budget, and exits nonzero if
//! any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::Rng;

use qmeas::RayonExecutor;
use qmeas_core::collectives::{
    generate_iid, generate_proper_mixture_with, homogeneity_test, RuleVerdict, SelectionRule,
};
use qmeas_core::epr::{conditionally_prepared_state, contextual_state};
use qmeas_core::joint_nonideal::{verify_martens, BivariatePOVM};
use qmeas_core::linalg::{pauli, tensor_product};
use qmeas_core::observables::{compile_povm, probabilities, uncertainty_product};
use qmeas_core::random::{
    random_density_matrix, random_hermitian, random_state_vector, random_unitary, stream, unit_vector3, QRng,
};
use qmeas_core::states::{density_from_pure, schmidt_decompose};
use qmeas_core::subquantum::{
    chsh_value, hv_correlation_table_with, joint_distribution_exists, quantum_correlation_table, spin_direction,
    spin_settings, trajectory_correlation_with, ChshSettings, ContextualSphereModel, DiscreteHVModel,
    JointDistributionOracle, SphereModel, SphereObservable,
};
use qmeas_core::{Complex64, ComplexMatrix, DensityOperator, DiscretePVM, MeasurementModel, StateVector};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, u64, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(criterion: u64) -> QRng {
    stream(20_240_000 + criterion, "acceptance", 0)
}

/// PVM from the columns of a random unitary, grouped into `blocks`
/// contiguous blocks.
fn random_pvm(rng: &mut QRng, d: usize, blocks: usize) -> DiscretePVM {
    let u = random_unitary(rng, d);
    let mut cuts: Vec<usize> = (1..d).collect();
    while cuts.len() + 1 > blocks {
        let k = rng.gen_range(0..cuts.len());
        cuts.remove(k);
    }
    cuts.push(d);
    let mut projectors = Vec::new();
    let mut start = 0;
    for end in cuts {
        let mut p = ComplexMatrix::zeros(d, d);
        for k in start..end {
            p = &p + &ComplexMatrix::projector(&u.column(k));
        }
        projectors.push(p);
        start = end;
    }
    let labels = (0..projectors.len()).map(|i| i.to_string()).collect();
    DiscretePVM::new(labels, projectors).expect("orthonormal columns")
}

fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn c1_schmidt_preparation() -> Check {
    let mut rng = rng(1);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for trial in 0..100 {
        let (d1, d2) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
        let amps = if trial % 5 == 0 {
            // Schmidt rank one: a product state.
            let a = random_state_vector(&mut rng, d1);
            let b = random_state_vector(&mut rng, d2);
            StateVector::product(&StateVector::new(a).unwrap(), &StateVector::new(b).unwrap())
                .amplitudes()
                .to_vec()
        } else {
            random_state_vector(&mut rng, d1 * d2)
        };
        let psi = StateVector::new(amps).map_err(|e| e.to_string())?;
        let form = schmidt_decompose(&psi, (d1, d2)).map_err(|e| e.to_string())?;
        let pvm = form.left_pvm();
        for (i, alpha) in form.left_basis.iter().enumerate() {
            // Partner vector by direct contraction: βᵢ ∝ Σⱼₖ conj(αᵢⱼ) ψⱼₖ |k⟩.
            let mut beta = vec![Complex64::new(0.0, 0.0); d2];
            for j in 0..d1 {
                for (k, b) in beta.iter_mut().enumerate() {
                    *b += alpha.amplitudes()[j].conj() * psi.amplitudes()[j * d2 + k];
                }
            }
            let norm: f64 = beta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            ensure((norm - form.coefficients[i]).abs() < 1e-10, || {
                format!("partner norm {norm} differs from coefficient {}", form.coefficients[i])
            })?;
            beta.iter_mut().for_each(|z| *z /= norm);
            let expected = ComplexMatrix::projector(&beta);
            let got = conditionally_prepared_state(&psi, &pvm, i).map_err(|e| e.to_string())?;
            let schmidt_partner = ComplexMatrix::projector(form.right_basis[i].amplitudes());
            worst = worst
                .max(max_abs_diff(got.matrix(), &expected))
                .max(max_abs_diff(got.matrix(), &schmidt_partner));
            checked += 1;
        }
    }
    ensure(worst <= 1e-10, || format!("max deviation {worst:e} > 1e-10"))?;
    Ok(format!("{checked} conditional states, max deviation {worst:.1e}"))
}

fn c2_contextual_probabilities() -> Check {
    let mut rng = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let d = rng.gen_range(2..=6);
        let rho = DensityOperator::new(random_density_matrix(&mut rng, d)).map_err(|e| e.to_string())?;
        let blocks = rng.gen_range(2..=d);
        let pvm = random_pvm(&mut rng, d, blocks);
        let ctx = contextual_state(&rho, &pvm).map_err(|e| e.to_string())?;
        for p in pvm.projectors() {
            // Tr(XY) = Σᵢⱼ Xᵢⱼ Yⱼᵢ
            let tr = |x: &ComplexMatrix| -> f64 {
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..d {
                    for j in 0..d {
                        s += x[(i, j)] * p[(j, i)];
                    }
                }
                s.re
            };
            worst = worst.max((tr(ctx.matrix()) - tr(rho.matrix())).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e} > 1e-12"))?;
    Ok(format!("1000 pairs, max deviation {worst:.1e}"))
}

/// `¼(I + v·σ)` scaled by `w`, plus `s·I`.
fn qubit_effect(w: f64, v: [f64; 3], s: f64) -> ComplexMatrix {
    let m = (&pauli::identity2() + &pauli::dot_sigma(v)).scale_real(0.25 * w);
    &m + &pauli::identity2().scale_real(s)
}

fn binary_entropy_nats(p: f64) -> f64 {
    [p, 1.0 - p].iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

fn c3_martens() -> Check {
    let mut rng = rng(3);
    let ln2 = 2f64.ln();
    let mut worst_margin = f64::INFINITY;
    let mut resampled = 0;
    for _ in 0..1000 {
        // Orthonormal a, b give mutually unbiased spin bases.
        let frame = random_unitary(&mut rng, 2);
        let rot = |m: &ComplexMatrix| &(&frame * m) * &frame.adjoint();
        let bloch = |m: &ComplexMatrix| -> [f64; 3] {
            [
                m.trace_product(&pauli::x()).re / 2.0,
                m.trace_product(&pauli::y()).re / 2.0,
                m.trace_product(&pauli::z()).re / 2.0,
            ]
        };
        let a = bloch(&rot(&pauli::z()));
        let b = bloch(&rot(&pauli::x()));
        let grid = loop {
            let (g1, g2, delta) = (rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>() * 0.5);
            let c = unit_vector3(&mut rng);
            let w: f64 = rng.gen_range(0.3..=1.0);
            let t: Vec<f64> = {
                let raw: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
                let s: f64 = raw.iter().sum();
                raw.iter().map(|x| x / s).collect()
            };
            let mut ok = true;
            let mut rows = Vec::new();
            for (mi, m) in [1.0, -1.0].into_iter().enumerate() {
                let mut row = Vec::new();
                for (ni, n) in [1.0, -1.0].into_iter().enumerate() {
                    let v: [f64; 3] = std::array::from_fn(|k| m * g1 * a[k] + n * g2 * b[k] + m * n * delta * c[k]);
                    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let s = (1.0 - w) * t[2 * mi + ni];
                    ok &= 0.25 * w * (1.0 - len) + s >= 0.0;
                    row.push(qubit_effect(w, v, s));
                }
                rows.push(row);
            }
            if ok {
                break rows;
            }
            resampled += 1;
        };
        let r = BivariatePOVM::from_effects(grid).map_err(|e| e.to_string())?;
        let p = DiscretePVM::spin(a);
        let q = DiscretePVM::spin(b);
        let report = verify_martens(&r, &p, &q).map_err(|e| e.to_string())?;
        worst_margin = worst_margin.min(report.j_sum() - ln2);
        ensure(report.j_sum() >= ln2 - 1e-9, || {
            format!("J_lambda + J_mu = {} < ln 2", report.j_sum())
        })?;
    }

    // Reference grid: each marginal is the sharp spin smeared by 1/√2, so
    // λ_{m m'} = Tr(R_m P_{m'}) for the rank-one target projectors.
    let g = std::f64::consts::FRAC_1_SQRT_2;
    let grid: Vec<Vec<ComplexMatrix>> = [1.0, -1.0]
        .iter()
        .map(|&m| [1.0, -1.0].iter().map(|&n| qubit_effect(1.0, [n * g, 0.0, m * g], 0.0)).collect())
        .collect();
    let (pz, px) = (DiscretePVM::spin([0.0, 0.0, 1.0]), DiscretePVM::spin([1.0, 0.0, 0.0]));
    let direct_entropy = |marginal: &[ComplexMatrix], target: &DiscretePVM| -> f64 {
        let mut h = 0.0;
        for rm in marginal {
            for pk in target.projectors() {
                let l = rm.trace_product(pk).re;
                if l > 0.0 {
                    h -= l * l.ln();
                }
            }
        }
        h / target.len() as f64
    };
    let row_marginal: Vec<ComplexMatrix> = grid.iter().map(|row| &row[0] + &row[1]).collect();
    let col_marginal: Vec<ComplexMatrix> = (0..2).map(|n| &grid[0][n] + &grid[1][n]).collect();
    let oracle = direct_entropy(&row_marginal, &pz) + direct_entropy(&col_marginal, &px);
    let closed_form = 2.0 * binary_entropy_nats((1.0 + g) / 2.0);
    let report = verify_martens(&BivariatePOVM::from_effects(grid).map_err(|e| e.to_string())?, &pz, &px)
        .map_err(|e| e.to_string())?;
    let dev = (report.j_sum() - oracle).abs();
    ensure(dev <= 1e-9, || format!("reference grid: J sum {} vs direct {oracle}", report.j_sum()))?;
    ensure((oracle - closed_form).abs() < 1e-12, || "oracle disagrees with binary entropy".into())?;
    Ok(format!(
        "1000 grids ({resampled} resampled), min J-sum − ln 2 = {worst_margin:.3e}; reference J sum {:.12} (dev {dev:.1e})",
        report.j_sum()
    ))
}

fn c4_local_models(exec: &RayonExecutor) -> Check {
    let mut rng = rng(4);
    let labels = ChshSettings::default_labels();
    let oracle = JointDistributionOracle::new();
    let mut worst_exact = f64::NEG_INFINITY;
    let mut worst_sigma = f64::NEG_INFINITY;
    let mut sampled = 0;
    for m in 0..200 {
        let hidden_states = rng.gen_range(1..=8);
        let model = DiscreteHVModel::random_chsh(&mut rng, hidden_states);
        let table = model.exact_correlation_table(&labels).map_err(|e| e.to_string())?;
        let s = table.chsh_variants().iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x.abs()));
        worst_exact = worst_exact.max(s - 2.0);
        ensure(s <= 2.0 + 1e-12, || format!("model {m}: exact S = {s}"))?;
        ensure(oracle.decide(&table).is_feasible(), || format!("model {m}: exact table infeasible"))?;

        if m % 10 == 0 {
            // Sampled sphere model with random directions and noise.
            let obs: Vec<SphereObservable> = ["A1", "B1", "A2", "B2"]
                .iter()
                .map(|l| SphereObservable {
                    label: (*l).into(),
                    direction: unit_vector3(&mut rng),
                    wing_sign: if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                    sharpness: rng.gen_range(0.5..=1.0),
                })
                .collect();
            let sphere = if m == 0 {
                // Saturates S = 2 at these angles.
                SphereModel::local_singlet(&ChshSettings::optimal_angles().map(|&t| spin_direction(t)))
            } else {
                SphereModel::new(obs).map_err(|e| e.to_string())?
            };
            let t = hv_correlation_table_with(exec, &sphere, &labels, 1_000_000, m).map_err(|e| e.to_string())?;
            let sigma = t.chsh_std_error();
            for v in t.chsh_variants() {
                worst_sigma = worst_sigma.max((v.abs() - 2.0) / sigma);
                ensure(v.abs() <= 2.0 + 5.0 * sigma, || format!("sphere model {m}: S = {v}, σ = {sigma}"))?;
            }
            ensure(oracle.decide(&t).is_feasible(), || format!("sphere model {m}: sampled table infeasible"))?;
            sampled += 1;
        }
    }
    Ok(format!(
        "200 exact models (max S − 2 = {worst_exact:.1e}), {sampled} sampled at 10^6 (max (|S|−2)/σ = {worst_sigma:.2})"
    ))
}

fn c5_quantum_violation() -> Check {
    let table = quantum_correlation_table(&StateVector::singlet(), &spin_settings(&ChshSettings::optimal_angles()))
        .map_err(|e| e.to_string())?;
    let s = chsh_value(&table);
    let target = 2.0 * 2f64.sqrt();
    ensure((s - target).abs() <= 1e-12, || format!("S = {s}"))?;
    let jd = joint_distribution_exists(&table);
    ensure(!jd.is_feasible(), || "joint distribution reported feasible".into())?;
    Ok(format!("S = {s} (dev {:.1e}), joint distribution infeasible", (s - target).abs()))
}

fn c6_contextual_escape(exec: &RayonExecutor) -> Check {
    let angles = ChshSettings::optimal_angles();
    let model = ContextualSphereModel::new(&angles.map(|&t| spin_direction(t)));
    let table = trajectory_correlation_with(exec, &model, &ChshSettings::default_labels(), 1_000_000, 6)
        .map_err(|e| e.to_string())?;
    let errs = table.std_errors.ok_or("missing standard errors")?;
    let mut worst = 0.0f64;
    for (p, (a, b)) in angles.pairs().into_iter().enumerate() {
        let expected = -(a - b).cos();
        let dev = (table.correlation(p) - expected).abs() / errs[p];
        worst = worst.max(dev);
        ensure(dev <= 4.0, || format!("pair {p}: E = {}, expected {expected}", table.correlation(p)))?;
    }
    let s = chsh_value(&table);
    ensure(s > 2.7, || format!("S = {s}"))?;
    Ok(format!("S = {s:.4}, max |E − (−cos θ)|/σ = {worst:.2}"))
}

fn c7_povm_compilation() -> Check {
    let mut rng = rng(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (dobj, dapp) = (rng.gen_range(1..=4), rng.gen_range(2..=4));
        let apparatus = DensityOperator::new(random_density_matrix(&mut rng, dapp)).map_err(|e| e.to_string())?;
        let u = random_unitary(&mut rng, dobj * dapp);
        let blocks = rng.gen_range(2..=dapp);
        let pointer = random_pvm(&mut rng, dapp, blocks);
        let model = MeasurementModel::new(apparatus.clone(), u.clone(), pointer.clone()).map_err(|e| e.to_string())?;
        let povm = compile_povm(&model, dobj).map_err(|e| e.to_string())?;
        let rho = DensityOperator::new(random_density_matrix(&mut rng, dobj)).map_err(|e| e.to_string())?;
        let compiled = probabilities(&rho, &povm).map_err(|e| e.to_string())?;

        // Pointer statistics after the interaction: Tr[(I ⊗ Eₖ) U (ρ ⊗ ρ_A) U†].
        let joint = tensor_product(rho.matrix(), apparatus.matrix()).unwrap();
        let evolved = &(&u * &joint) * &u.adjoint();
        for (k, e) in pointer.projectors().iter().enumerate() {
            let lifted = tensor_product(&ComplexMatrix::identity(dobj), e).unwrap();
            let direct = (&lifted * &evolved).trace().re;
            worst = worst.max((direct - compiled[k]).abs());
        }
    }
    ensure(worst <= 1e-10, || format!("max deviation {worst:e} > 1e-10"))?;
    Ok(format!("100 models, max deviation {worst:.1e}"))
}

fn c8_homogeneity(exec: &RayonExecutor) -> Check {
    let mut rng = rng(8);
    let z = DiscretePVM::spin([0.0, 0.0, 1.0]).to_povm();
    let up = density_from_pure(&StateVector::basis(2, 0));
    let down = density_from_pure(&StateVector::basis(2, 1));
    let runs = 200;
    let mut flagged = 0;
    for r in 0..runs {
        let w = rng.gen_range(0.2..0.8);
        let seq = generate_proper_mixture_with(exec, &[(w, up.clone()), (1.0 - w, down.clone())], &z, 100_000, r)
            .map_err(|e| e.to_string())?;
        let report = homogeneity_test(&seq, &[SelectionRule::label_is(0)], 0.01).map_err(|e| e.to_string())?;
        flagged += usize::from(report.rules[0].verdict == RuleVerdict::Inhomogeneous);
    }
    let power = flagged as f64 / runs as f64;
    ensure(power > 0.99, || format!("power {power}"))?;

    let alpha = 0.01;
    let trials = 1000;
    let mut false_positives = 0;
    for r in 0..trials {
        let p: f64 = rng.gen_range(0.2..0.8);
        let seq = generate_iid(&[p, 1.0 - p], 10_000, 1_000 + r);
        let rule = match r % 3 {
            0 => SelectionRule::every(2, 0),
            1 => SelectionRule::every(3, 1),
            _ => SelectionRule::previous_value_is(0),
        };
        let report = homogeneity_test(&seq, &[rule], alpha).map_err(|e| e.to_string())?;
        false_positives += usize::from(report.rules[0].verdict == RuleVerdict::Inhomogeneous);
    }
    let expected = alpha * trials as f64;
    let sigma = (trials as f64 * alpha * (1.0 - alpha)).sqrt();
    ensure((false_positives as f64 - expected).abs() <= 4.0 * sigma, || {
        format!("{false_positives} false positives, expected {expected} ± {:.1}", 4.0 * sigma)
    })?;
    Ok(format!(
        "power {power} over {runs} runs; {false_positives}/{trials} i.i.d. false positives (expected {expected} ± {:.1})",
        4.0 * sigma
    ))
}

fn c9_robertson() -> Check {
    let mut rng = rng(9);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let d = rng.gen_range(2..=4);
        let rho_m = random_density_matrix(&mut rng, d);
        let rho = DensityOperator::new(rho_m.clone()).map_err(|e| e.to_string())?;
        let (a, b) = (random_hermitian(&mut rng, d), random_hermitian(&mut rng, d));
        let u = uncertainty_product(&rho, &a, &b).map_err(|e| e.to_string())?;

        let mean = |x: &ComplexMatrix| (&rho_m * x).trace();
        let var = |x: &ComplexMatrix| (mean(&(x * x)) - mean(x) * mean(x)).re.max(0.0);
        let comm = &(&a * &b) - &(&b * &a);
        let (da, db, bound) = (var(&a).sqrt(), var(&b).sqrt(), mean(&comm).norm() / 2.0);
        ensure(
            (u.delta_a - da).abs() < 1e-10 && (u.delta_b - db).abs() < 1e-10 && (u.bound - bound).abs() < 1e-10,
            || "library uncertainty differs from direct evaluation".into(),
        )?;
        worst = worst.min(da * db - bound);
        ensure(da * db >= bound - 1e-10 && u.holds(), || format!("ΔA·ΔB = {} < {bound}", da * db))?;
    }
    Ok(format!("10^4 triples, min ΔA·ΔB − bound = {worst:.2e}"))
}

const CONFIGS: [(&str, &str); 5] = [
    ("epr", r#"{"inputs": {"state": "singlet", "first": "z", "second": {"spin_angle": 1.0}}}"#),
    ("martens", r#"{"inputs": {"grid": {"unsharp_spin": {"gamma_z": 0.6, "gamma_x": 0.7}}, "p": "z", "q": "x"}}"#),
    ("chsh", r#"{"inputs": {}}"#),
    ("subquantum", r#"{"samples": 200000, "inputs": {"model": "contextual"}}"#),
    (
        "collective",
        r#"{"samples": 50000, "inputs": {"scenario": {"kind": "epr", "state": "singlet", "first": "x", "second": "z"},
            "rules": [{"every": 2}, {"previous_values": [0, 1]}, {"label": 1}]}}"#,
    ),
];

fn run_cli(dir: &Path, experiment: &str, out: &str, threads: &str) -> Result<Vec<u8>, String> {
    let config = dir.join(format!("{experiment}.json"));
    let status = Command::new(env!("CARGO_BIN_EXE_qmeas"))
        .args([experiment, "--config", config.to_str().unwrap(), "--seed", "17", "--out", out])
        .env("QMEAS_THREADS", threads)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || {
        format!("{experiment}: exit {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr))
    })?;
    std::fs::read(dir.join(out)).map_err(|e| e.to_string())
}

fn c10_reproducibility() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (experiment, config) in CONFIGS {
        std::fs::write(dir.path().join(format!("{experiment}.json")), config).map_err(|e| e.to_string())?;
        let first = run_cli(dir.path(), experiment, &format!("{experiment}-a.out"), "1")?;
        let second = run_cli(dir.path(), experiment, &format!("{experiment}-b.out"), "4")?;
        ensure(!first.is_empty() && first == second, || format!("{experiment}: outputs differ"))?;
    }
    Ok("5 experiments, byte-identical across runs with 1 and 4 threads".into())
}

fn main() -> ExitCode {
    let exec = RayonExecutor::from_env().expect("worker pool");
    let criteria: Vec<Criterion> = vec![
        ("Schmidt conditional preparation", 5, Box::new(c1_schmidt_preparation)),
        ("contextual-state probabilities", 5, Box::new(c2_contextual_probabilities)),
        ("Martens inequality", 30, Box::new(c3_martens)),
        ("local models obey CHSH", 120, Box::new(|| c4_local_models(&exec))),
        ("singlet CHSH violation", 1, Box::new(c5_quantum_violation)),
        ("contextual model escapes CHSH", 60, Box::new(|| c6_contextual_escape(&exec))),
        ("POVM compilation", 10, Box::new(c7_povm_compilation)),
        ("homogeneity verdicts", 120, Box::new(|| c8_homogeneity(&exec))),
        ("Robertson bound", 10, Box::new(c9_robertson)),
        ("CLI reproducibility", 60, Box::new(c10_reproducibility)),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over runtime budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {:>2} {status}: {name} [{:.2}s / {budget}s] {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
