//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test --test acceptance` prints the report. Set
//! `FLOCKBENCH_ACCEPTANCE_STRICT=1` to turn any FAIL into a nonzero exit.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use flockbench::controllers::{olfati_saber_accel, OlfatiSaberParams};
use flockbench::harness::{run_comparison, run_noise_sweep, ExecMode, ExperimentConfig, ModelTag, Summary};
use flockbench::metrics::{connected_components, irregularity};
use flockbench::mpc::{lattice_deviation_centralized, MpcModel};
use flockbench::proximity::{is_quasi_alpha_lattice, proximity_net};
use flockbench::vecmath;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("{} {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn gradient_oracle(rep: &mut Report) {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    let mut rng = common::rng(1);
    for model in MpcModel::ALL {
        for _ in 0..100 {
            worst = worst.max(common::gradient_instance(model, &mut rng));
        }
    }
    let secs = started.elapsed().as_secs_f64();
    rep.line(
        "1",
        "gradient oracle",
        worst < 1e-4 && secs < 60.0,
        format!("max relative error {worst:.2e} over 4x100 instances in {secs:.1} s (< 1e-4, < 60 s)"),
    );
}

fn graph_oracle(rep: &mut Report) {
    let mut rng = common::rng(2);
    let mut mismatches = 0;
    for k in 0..1000 {
        let n = 1 + k % 20;
        let config = common::random_config(&mut rng, n, 12.0, 1.0);
        let net = proximity_net(&config, 8.4).unwrap();
        let adj = common::brute_adjacency(&config, 8.4);
        let edges_ok = (0..n).all(|i| (0..n).all(|j| net.has_edge(i, j) == adj[i][j]));
        let comps_ok = connected_components(&net) == common::brute_components(&config, 8.4);
        if !(edges_ok && comps_ok) {
            mismatches += 1;
        }
    }
    rep.line(
        "2",
        "graph oracle",
        mismatches == 0,
        format!("{mismatches} mismatches over 1000 configurations"),
    );
}

fn lattice_fixtures(rep: &mut Report) {
    let config = common::hex_patch(7.0, [0.5, -0.25]);
    let net = proximity_net(&config, 8.4).unwrap();
    let comps = connected_components(&net);
    let deviation = lattice_deviation_centralized(&config, 8.4, 7.0);
    let irr = irregularity(&config, &comps);
    let exact = is_quasi_alpha_lattice(&config, 8.4, 7.0, 0.0);
    let params = OlfatiSaberParams::default();
    let accel = (0..config.n())
        .map(|i| vecmath::norm(&olfati_saber_accel(i, &config, &params)))
        .fold(0.0, f64::max);
    rep.line(
        "3",
        "exact alpha-lattice fixtures",
        deviation <= 1e-9 && irr <= 1e-9 && exact && accel <= 1e-9,
        format!(
            "{} agents, {} edges: deviation {deviation:.1e}, irregularity {irr:.1e}, exact lattice {exact}, max |accel| {accel:.1e}",
            config.n(),
            net.edge_count()
        ),
    );
}

fn two_agent_equilibrium(rep: &mut Report) {
    let omega = 50.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for (tag, k) in [(ModelTag::DfDistributed, 1.0), (ModelTag::DfCentralized, 2.0)] {
        let target = common::df_equilibrium(k, omega);
        let got = common::two_agent_final_distance(tag, 100);
        let rel = (got - target).abs() / target;
        pass &= rel < 0.05;
        parts.push(format!("{tag} {got:.4} vs {target:.4} ({:.2}%)", 100.0 * rel));
    }
    rep.line("4", "two-agent DF equilibrium", pass, parts.join(", "));
}

fn determinism(rep: &mut Report) {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut outputs = Vec::new();
    for dir in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_flockbench"))
            .args(["compare", "--runs", "3", "--seed", "7", "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        let runs = std::fs::read(dir.path().join("runs.csv")).unwrap();
        let summary = std::fs::read(dir.path().join("summary.csv")).unwrap();
        outputs.push((runs, summary));
    }
    rep.line(
        "5",
        "determinism",
        outputs[0] == outputs[1],
        format!(
            "runs.csv {} bytes, summary.csv {} bytes, identical: {}",
            outputs[0].0.len(),
            outputs[0].1.len(),
            outputs[0] == outputs[1]
        ),
    );
}

fn final_mean(s: &Summary, m: ModelTag, f: impl Fn(&flockbench::harness::MeanMetrics) -> f64) -> f64 {
    f(&s.last(m).expect("model in summary").means)
}

fn comparison(rep: &mut Report) {
    let cfg = ExperimentConfig {
        runs: 20,
        ..Default::default()
    };
    let started = Instant::now();
    let cmp = run_comparison(&cfg, &ModelTag::ALL, ExecMode::Parallel).unwrap();
    let s = &cmp.summary;
    let secs = started.elapsed().as_secs_f64();
    let cc = |m| final_mean(s, m, |x| x.num_components);
    let irr = |m| final_mean(s, m, |x| x.irregularity);

    let bounds = [
        (ModelTag::DfCentralized, "<=", 1.2),
        (ModelTag::DfDistributed, "<=", 1.6),
        (ModelTag::Reynolds, "<=", 1.6),
        (ModelTag::LatticeCentralized, ">=", 3.0),
        (ModelTag::OlfatiSaber, ">=", 5.0),
        (ModelTag::LatticeDistributed, ">=", 1.8),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, op, b) in bounds {
        let v = cc(m);
        let ok = if op == "<=" { v <= b } else { v >= b };
        pass &= ok;
        parts.push(format!("{m} {v:.2}{}{op}{b}", if ok { "" } else { " !" }));
    }
    rep.line("6", "final |CC| (20 runs)", pass, format!("{} [{secs:.0} s]", parts.join(", ")));

    let regular = [ModelTag::LatticeCentralized, ModelTag::LatticeDistributed, ModelTag::OlfatiSaber];
    let irregular = [ModelTag::DfCentralized, ModelTag::Reynolds];
    let ordering = regular
        .iter()
        .all(|&a| irregular.iter().all(|&b| irr(a) < irr(b)));
    let lattice_mean = (irr(ModelTag::LatticeCentralized) + irr(ModelTag::LatticeDistributed)) / 2.0;
    let near = irr(ModelTag::DfDistributed) <= 2.0 * lattice_mean;
    let values: Vec<String> = ModelTag::ALL.iter().map(|&m| format!("{m} {:.3}", irr(m))).collect();
    rep.line(
        "7",
        "final irregularity ordering",
        ordering && near,
        format!(
            "ordering {ordering}, df_distributed within 2x of lattice-model mean {lattice_mean:.3}: {near}; {}",
            values.join(", ")
        ),
    );

    // lowest per-step mean at or before step 100, and the step-100 value
    let vc: Vec<(ModelTag, f64, f64)> = ModelTag::ALL
        .iter()
        .map(|&m| {
            let best = s
                .series(m)
                .filter(|r| r.x <= 100)
                .map(|r| r.means.velocity_convergence)
                .fold(f64::INFINITY, f64::min);
            (m, best, final_mean(s, m, |x| x.velocity_convergence))
        })
        .collect();
    let pass = vc.iter().all(|(_, best, _)| *best < 0.1);
    let values: Vec<String> = vc
        .iter()
        .map(|(m, best, last)| format!("{m} {best:.3}{} (step 100: {last:.3})", if *best < 0.1 { "" } else { " !" }))
        .collect();
    rep.line("8", "velocity convergence reached by step 100 (< 0.1)", pass, values.join(", "));
}

fn noise_sweep(rep: &mut Report) {
    let cfg = ExperimentConfig {
        runs: 20,
        ..Default::default()
    };
    let models = [ModelTag::OlfatiSaber, ModelTag::DfDistributed, ModelTag::Reynolds];
    let levels: Vec<u32> = (1..=10).collect();
    let started = Instant::now();
    let sweep = run_noise_sweep(&cfg, &models, &levels, ExecMode::Parallel).unwrap();
    let secs = started.elapsed().as_secs_f64();
    let s = &sweep.summary;
    let at = |m, l: u32| &s.at(m, l as u64).expect("level in summary").means;

    let os10 = at(ModelTag::OlfatiSaber, 10).num_components;
    let os_ok = os10 >= 0.8 * cfg.n as f64;
    let mut worst = Vec::new();
    let mut single_ok = true;
    for m in [ModelTag::DfDistributed, ModelTag::Reynolds] {
        let (level, cc) = levels
            .iter()
            .map(|&l| (l, at(m, l).num_components))
            .fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        single_ok &= cc <= 1.5;
        worst.push(format!("{m} max {cc:.2} at level {level}"));
    }
    let d_df = at(ModelTag::DfDistributed, 10).max_diameter;
    let d_rey = at(ModelTag::Reynolds, 10).max_diameter;
    let diam_ok = matches!((d_df, d_rey), (Some(a), Some(b)) if a <= b);
    rep.line(
        "9",
        "noise sweep (20 runs, levels 1..10)",
        os_ok && single_ok && diam_ok,
        format!(
            "olfati_saber |CC| at 10 = {os10:.2} (>= {:.0}) {os_ok}; {} (<= 1.5) {single_ok}; level-10 diameter df_distributed {} vs reynolds {} {diam_ok} [{secs:.0} s]",
            0.8 * cfg.n as f64,
            worst.join(", "),
            d_df.map_or("none".into(), |d| format!("{d:.2}")),
            d_rey.map_or("none".into(), |d| format!("{d:.2}")),
        ),
    );
}

fn main() -> ExitCode {
    let mut rep = Report { failures: 0 };
    gradient_oracle(&mut rep);
    graph_oracle(&mut rep);
    lattice_fixtures(&mut rep);
    two_agent_equilibrium(&mut rep);
    determinism(&mut rep);
    comparison(&mut rep);
    noise_sweep(&mut rep);
    println!("acceptance: {} of 9 criteria passed", 9 - rep.failures);
    let strict = std::env::var_os("FLOCKBENCH_ACCEPTANCE_STRICT").is_some_and(|v| v != "0");
    if strict && rep.failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
