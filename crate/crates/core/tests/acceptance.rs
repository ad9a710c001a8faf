//! Acceptance criteria, one test per criterion. Each prints a single
//! `criterion N: PASS|FAIL` line before asserting.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use bssp::gf2::FunctionMode;
use bssp::oracle::{build_shadow, oracle_unitary, sample_hidden_sets, HiddenChain, OracleUnitary, SlotValue};
use bssp::schemes::{bssp_layout, bssp_qc_spec, run_bssp_with, sample_instance, BsspOptions, Verdict};
use bssp::seed::{rng_from, SeedSpec, Stream};
use bssp::sim::{
    apply_basis_permutation, outcome_distribution, total_variation, Amplitude, DenseState, Gate, GateLayer,
    QuantumState, SparseState,
};
use bssp::verify::{check_bfp, estimate_o2h_expectation, shadow_indistinguishability_experiment, Distinguisher, QueryFamily};
use rand::Rng;

fn verdict(criterion: usize, ok: bool, detail: &str) {
    println!("criterion {criterion}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_upper_bound_reproduction() {
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for n in 1..=3 {
        for d in 1..=3 {
            let start = Instant::now();
            let mut options = BsspOptions::search(n, d);
            options.keep_transcripts = true;
            let master = SeedSpec::new(1000 + 10 * n as u64 + d as u64);
            let mut successes = 0;
            let mut calls = BTreeSet::new();
            let mut gates = BTreeSet::new();
            for t in 0..200 {
                let seeds = master.fork(Stream::Trial, t);
                let fb = sample_instance(n, d, FunctionMode::Simon, &seeds).unwrap();
                let u = oracle_unitary(&fb).unwrap();
                let r = run_bssp_with(&u, &options, seeds.derive(Stream::Measurement, 0)).unwrap();
                if r.period.is_some() && r.period == fb.function().period() {
                    successes += 1;
                }
                for tr in &r.transcripts {
                    calls.insert(tr.oracle_calls);
                    gates.extend(tr.gate_set());
                }
            }
            let rate = successes as f64 / 200.0;
            let secs = start.elapsed().as_secs_f64();
            let allowed: BTreeSet<String> = ["H", "CNOT"].into_iter().map(String::from).collect();
            let ok = rate >= 0.9 && calls == BTreeSet::from([d + 1]) && gates.is_subset(&allowed) && secs < 60.0;
            lines.push(format!("(n={n},d={d}) rate={rate:.3} calls={calls:?} gates={gates:?} {secs:.2}s"));
            if !ok {
                failures.push(lines.last().unwrap().clone());
            }
        }
    }
    for l in &lines {
        println!("  {l}");
    }
    verdict(1, failures.is_empty(), &format!("9 cells, failing: {failures:?}"));
}

#[test]
fn criterion_2_equation_correctness() {
    let mut checked = 0usize;
    let mut wrong = 0usize;
    for n in 1..=4 {
        for d in 1..=3 {
            if bssp_layout(n, d, false).unwrap().width() > 24 {
                continue;
            }
            let mut options = BsspOptions::decision(n, d);
            options.max_samples = 5 * n;
            let master = SeedSpec::new(2000 + 10 * n as u64 + d as u64);
            for t in 0..100 {
                let seeds = master.fork(Stream::Trial, t);
                let fb = sample_instance(n, d, FunctionMode::Simon, &seeds).unwrap();
                let s = fb.function().period().unwrap();
                let u = oracle_unitary(&fb).unwrap();
                let r = run_bssp_with(&u, &options, seeds.derive(Stream::Measurement, 0)).unwrap();
                for e in &r.equations {
                    checked += 1;
                    if !e.is_satisfied_by(s).unwrap() {
                        wrong += 1;
                    }
                }
            }
        }
    }
    verdict(2, wrong == 0 && checked > 0, &format!("{checked} pairs, {wrong} with s·j != b"));
}

#[test]
fn criterion_3_decision_advantage() {
    let mut worst = f64::INFINITY;
    let mut lines = Vec::new();
    for n in 2..=3 {
        for d in 1..=2 {
            let options = BsspOptions::decision(n, d);
            let master = SeedSpec::new(3000 + 10 * n as u64 + d as u64);
            let mut says = [0usize; 2];
            for (arm, mode) in [FunctionMode::Simon, FunctionMode::Injective].into_iter().enumerate() {
                for t in 0..200 {
                    let seeds = master.fork(Stream::Trial, (2 * t + arm) as u64);
                    let fb = sample_instance(n, d, mode, &seeds).unwrap();
                    let u = oracle_unitary(&fb).unwrap();
                    let r = run_bssp_with(&u, &options, seeds.derive(Stream::Measurement, 0)).unwrap();
                    if r.verdict == Some(Verdict::Simon) {
                        says[arm] += 1;
                    }
                }
            }
            let adv = (says[0] as f64 - says[1] as f64).abs() / 200.0;
            worst = worst.min(adv);
            lines.push(format!("(n={n},d={d}) simon={} injective={} adv={adv:.3}", says[0], says[1]));
        }
    }
    for l in &lines {
        println!("  {l}");
    }
    verdict(3, worst >= 0.8, &format!("minimum advantage {worst:.3}"));
}

#[test]
fn criterion_4_o2h() {
    let mut problems = Vec::new();
    let mut total = 0;
    for n in 1..=2 {
        for d in 1..=2 {
            for level in 1..=d {
                let r = estimate_o2h_expectation(n, d, level, Distinguisher::XiFlag, 1000, 4000 + 10 * n as u64 + d as u64, None)
                    .unwrap();
                total += r.trials;
                println!(
                    "  (n={n},d={d},l={level}) violations={} max|B²-2P|={:.2e} min slack={:.2e}",
                    r.violations, r.max_equality_gap, r.min_slack
                );
                if r.violations > 0 || r.equality_failures > 0 {
                    problems.push((n, d, level, r.violations, r.equality_failures));
                }
            }
        }
    }
    verdict(4, problems.is_empty(), &format!("{total} tuples, problems: {problems:?}"));
}

#[test]
fn criterion_5_finding_probability_bound() {
    let mut problems = Vec::new();
    for (n, d) in [(2, 1), (2, 2), (3, 2)] {
        for q in 1..=3 {
            for family in [QueryFamily::Points { q }, QueryFamily::Superposition { q, k: 2 }] {
                let r = check_bfp(family, n, d, 1, 1000, 5000 + q as u64, None).unwrap();
                println!(
                    "  (n={n},d={d}) {family:?} estimate={:.4} ± {:.4} bound={:.4}",
                    r.estimate, r.stderr, r.bound
                );
                if !(r.trials >= 1000 && r.estimate <= r.bound + 3.0 * r.stderr + 1e-12) {
                    problems.push(format!("(n={n},d={d},{family:?})"));
                }
            }
        }
    }
    verdict(5, problems.is_empty(), &format!("failing: {problems:?}"));
}

fn check_table(bits: usize, table: &[u32]) -> bool {
    if table.len() != 1 << bits {
        return false;
    }
    let mut seen = vec![false; table.len()];
    table.iter().all(|&y| (y as usize) < seen.len() && !std::mem::replace(&mut seen[y as usize], true))
}

fn tables_are_bijections(u: &OracleUnitary) -> bool {
    let standard_ok = u.standard_table().len() == 1 << u.value_bits();
    let blocks_ok = (1..=u.d()).all(|t| u.block(t).is_some_and(|(bits, table)| check_table(bits, table)));
    let full_ok = u.composite_width() > 20 || check_table(u.composite_width(), &u.full_table().unwrap());
    standard_ok && blocks_ok && full_ok
}

fn end_to_end_ok(u: &OracleUnitary, f: &bssp::gf2::SimonsInstance) -> bool {
    let n = u.n();
    let mut etas = vec![0u8; 1 << n];
    for x in 0..1u64 << n {
        let mut slot = u.map_slot(SlotValue::query(0, x)).unwrap();
        let mut value = slot.out;
        for tag in 1..=u.d() {
            slot = u.map_slot(SlotValue::query(tag as u64, value)).unwrap();
            if slot.xi != 0 || (tag < u.d() && (slot.zeta != 0 || slot.eta != 0)) {
                return false;
            }
            value = slot.value;
        }
        if value != u64::from(f.eval(x as u32)) || slot.zeta != 1 {
            return false;
        }
        etas[x as usize] = slot.eta;
    }
    match f.period() {
        Some(s) => (0..1usize << n).all(|x| etas[x] ^ etas[x ^ s.value() as usize] == 1),
        None => true,
    }
}

#[test]
fn criterion_6_oracle_integrity() {
    let mut cells = 0;
    let mut problems = Vec::new();
    for n in 1..=5usize {
        for d in 1..=15usize {
            if (d + 2) * n + 3 > 20 {
                continue;
            }
            for mode in [FunctionMode::Simon, FunctionMode::Injective] {
                let seeds = SeedSpec::new(6000 + 100 * n as u64 + d as u64);
                let fb = sample_instance(n, d, mode, &seeds).unwrap();
                let u = oracle_unitary(&fb).unwrap();
                cells += 1;
                if !tables_are_bijections(&u) || !end_to_end_ok(&u, fb.function()) {
                    problems.push(format!("real (n={n},d={d},{mode:?})"));
                }
                if (d + 2) * n + 3 <= 16 {
                    let hidden = sample_hidden_sets(&fb, &HiddenChain::new(), 1, seeds.derive(Stream::HiddenSets, 0)).unwrap();
                    for c in [0, 1] {
                        let g = oracle_unitary(&build_shadow(&fb, &hidden, c).unwrap()).unwrap();
                        if !tables_are_bijections(&g) {
                            problems.push(format!("shadow c={c} (n={n},d={d},{mode:?})"));
                        }
                    }
                }
            }
        }
    }
    verdict(6, problems.is_empty(), &format!("{cells} oracles checked, failing: {problems:?}"));
}

#[test]
fn criterion_7_shadow_opacity() {
    let r = shadow_indistinguishability_experiment(2, 2, 600, 7000, None).unwrap();
    for row in &r.rows {
        println!("  {} rate={:.3} [{:.3}, {:.3}]", row.oracle, row.rate, row.ci_low, row.ci_high);
    }
    let real = r.row("real").unwrap();
    let c0 = r.row("shadow_c0").unwrap();
    let c1 = r.row("shadow_c1").unwrap();
    let ok = real.rate >= 0.9 && c0.near_baseline && c1.near_baseline;
    verdict(
        7,
        ok,
        &format!(
            "baseline {:.3}±{:.3}, shadow {:.3}/{:.3}, real {:.3}",
            r.baseline, r.baseline_sigma, c0.rate, c1.rate, real.rate
        ),
    );
}

fn random_layer<R: Rng>(width: usize, rng: &mut R) -> GateLayer {
    let mut gates = Vec::new();
    let mut q = 0;
    while q < width {
        if q + 1 < width && rng.random_bool(0.25) {
            gates.push(Gate::Cnot { control: q, target: q + 1 });
            q += 2;
            continue;
        }
        if rng.random_bool(0.6) {
            let (a, b, c) = (rng.random::<f64>() * PI, rng.random::<f64>() * 2.0 * PI, rng.random::<f64>() * 2.0 * PI);
            let alpha = Amplitude::from_polar(a.cos(), b);
            let beta = Amplitude::from_polar(a.sin(), c);
            gates.push(Gate::Single {
                qubit: q,
                matrix: [[alpha, -beta.conj()], [beta, alpha.conj()]],
            });
        }
        q += 1;
    }
    GateLayer::new(gates).unwrap()
}

#[test]
fn criterion_8_engine_equivalence() {
    let shapes: Vec<(usize, usize)> = (1..=3)
        .flat_map(|n| (1..=9).map(move |d| (n, d)))
        .filter(|&(n, d)| bssp_layout(n, d, false).unwrap().width() <= 14)
        .collect();
    let mut rng = rng_from(8000);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let (n, d) = shapes[i % shapes.len()];
        let mode = if rng.random_bool(0.5) { FunctionMode::Simon } else { FunctionMode::Injective };
        let fb = sample_instance(n, d, mode, &SeedSpec::new(8000 + i as u64)).unwrap();
        let u = oracle_unitary(&fb).unwrap();
        let layout = bssp_layout(n, d, false).unwrap();
        let calls = rng.random_range(1..=d + 1);
        let spec = bssp_qc_spec(&layout, calls, false).unwrap();
        let width = layout.width();
        let mut dense = DenseState::zero(width).unwrap();
        let mut sparse = SparseState::zero(width).unwrap();
        for stage in &spec.stages {
            let mut layers = stage.layers.clone();
            layers.push(random_layer(width, &mut rng));
            for layer in &layers {
                dense.apply_layer(layer).unwrap();
                sparse.apply_layer(layer).unwrap();
            }
            if let Some(call) = &stage.oracle {
                apply_basis_permutation(&mut dense, &u, &call.slots).unwrap();
                apply_basis_permutation(&mut sparse, &u, &call.slots).unwrap();
            }
        }
        let qubits: Vec<usize> = (0..width).collect();
        let tv = total_variation(&outcome_distribution(&dense, &qubits), &outcome_distribution(&sparse, &qubits));
        worst = worst.max(tv);
    }
    verdict(8, worst < 1e-9, &format!("50 instances, max total variation {worst:.2e}"));
}

fn bssp_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bssp")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 6] = [
        &["solve", "--n", "2", "--d", "2", "--trials", "40", "--seed", "9"],
        &["solve", "--n", "2", "--d", "1", "--mode", "decision", "--trials", "40", "--scheme", "cq"],
        &["o2h", "--n", "1", "--d", "2", "--trials", "200", "--seed", "9"],
        &["bfp", "--n", "2", "--d", "2", "--q", "2", "--trials", "200"],
        &["sweep", "--n", "2", "--d", "2", "--trials", "40"],
        &["sample-oracle", "--n", "2", "--d", "3", "--mode", "injective", "--seed", "9"],
    ];
    let mut problems = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let out = out.to_str().unwrap();
        let mut full = vec!["--out", out, "--threads", "3"];
        full.extend_from_slice(args);
        let (code, _) = bssp_cli(&full);
        if code != 0 {
            problems.push(format!("{} exited {code}", args[0]));
            continue;
        }
        let manifest = format!("{out}/manifest.json");
        for threads in ["1", "4"] {
            let (code, stdout) = bssp_cli(&["--threads", threads, "replay", &manifest]);
            if code != 0 {
                problems.push(format!("replay of {} with {threads} threads: {stdout}", args[0]));
            }
        }
    }
    verdict(9, problems.is_empty(), &format!("{} manifests replayed, problems: {problems:?}", runs.len()));
}
