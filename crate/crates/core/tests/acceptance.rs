//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::{Duration, Instant};

use dunkl_core::build_structure;
use dunkl_core::schatten::{fit_slope, gamma_eps, predicted_slope, ratio_curve, threshold};
use dunkl_core::suites::{Suite, SuiteContext};

const GRID: [f64; 7] = [0.90, 0.93, 0.96, 0.98, 0.99, 0.995, 0.999];

struct Gate {
    failed: usize,
}

impl Gate {
    fn report(&mut self, name: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn run_suites(kappa: &[f64], suites: &[Suite]) -> (bool, String) {
    let s = build_structure(kappa.len(), kappa).unwrap();
    let ctx = SuiteContext::new(&s, 20).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for &suite in suites {
        let o = ctx.run(suite);
        ok &= o.passed;
        parts.push(format!("{}={:.1e}", suite.name(), o.max_residual));
        if let Some(f) = o.first_failure {
            parts.push(format!("[{f}]"));
        }
    }
    (ok, parts.join(" "))
}

fn criterion_identities(g: &mut Gate) {
    let suites = [
        Suite::Kernel,
        Suite::Gaussian,
        Suite::Generating,
        Suite::Mehler,
        Suite::Chaotic,
        Suite::Eigen,
        Suite::Structure,
        Suite::Relation,
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    let start = Instant::now();
    for k in [0.0, 0.25, 1.0] {
        let (pass, d) = run_suites(&[k], &suites);
        ok &= pass;
        lines.push(format!("n=1 k={k}: {d}"));
    }
    let t1 = start.elapsed();
    let start = Instant::now();
    let (pass, d) = run_suites(&[0.5, 1.0], &suites);
    ok &= pass;
    lines.push(format!("n=2 k=(0.5,1): {d}"));
    let t2 = start.elapsed();
    let in_time = t1 < Duration::from_secs(120) && t2 < Duration::from_secs(600);
    g.report(
        "1 identity suite",
        ok && in_time,
        format!("{} | time n=1 {:.1?}, n=2 {:.1?}", lines.join(" | "), t1, t2),
    );
}

fn criterion_spectral(g: &mut Gate) {
    let mut worst: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut ok = true;
    for kappa in [vec![0.25], vec![0.5, 1.0]] {
        let s = build_structure(kappa.len(), &kappa).unwrap();
        for eps in [0.1, 0.5, 0.9, 0.99, 0.999] {
            let op = gamma_eps(&s, eps).unwrap();
            for r in [1.0, 1.5, 2.0, 4.0] {
                let e = (op.schatten_norm(r).unwrap() / op.schatten_closed(r) - 1.0).abs();
                worst = worst.max(e);
            }
            match op.mixed_norm(1.0, 1.0) {
                Ok(m) => worst_trace = worst_trace.max((m.lp_integral / op.trace() - 1.0).abs()),
                Err(_) => ok = false,
            }
        }
    }
    g.report(
        "2 spectral exactness",
        ok && worst <= 1e-10 && worst_trace <= 1e-7,
        format!("schatten {worst:.2e} (<= 1e-10), trace {worst_trace:.2e} (<= 1e-7)"),
    );
}

fn criterion_density(g: &mut Gate) {
    let mut ok = true;
    let mut parts = Vec::new();
    for kappa in [vec![0.25], vec![1.0], vec![0.5, 1.0]] {
        let (pass, d) = run_suites(&kappa, &[Suite::Density]);
        ok &= pass;
        parts.push(format!("k={kappa:?}: {d}"));
    }
    g.report("3 density consistency", ok, parts.join(" | "));
}

fn slope(kappa: f64, q: f64, r: f64) -> f64 {
    let s = build_structure(1, &[kappa]).unwrap();
    let c = ratio_curve(&s, 2.0, q, r, &GRID);
    assert!(c.failures.is_empty(), "{:?}", c.failures);
    fit_slope(&c.rows).unwrap().0
}

fn criterion_blow_up(g: &mut Gate) {
    let start = Instant::now();
    let r_star = threshold(2.0, 1, 0.0, None, None).unwrap().r_star.unwrap();
    let (a12, a43, a2) = (slope(0.0, 4.0, 1.2), slope(0.0, 4.0, 4.0 / 3.0), slope(0.0, 4.0, 2.0));
    let ok = (r_star - 4.0 / 3.0).abs() < 1e-15 && a12 < 0.0 && a43.abs() <= 0.04 && (a2 - 0.25).abs() <= 0.15 * 0.25;
    g.report(
        "4A classical blow-up",
        ok && start.elapsed() < Duration::from_secs(300),
        format!("r*={r_star:.6}, slopes r=1.2: {a12:.4}, r=4/3: {a43:.2e}, r=2: {a2:.4} (target 0.25 +-15%)"),
    );

    let start = Instant::now();
    let q = 8.0 / 3.0;
    let r_star = threshold(2.0, 1, 0.25, None, None).unwrap().r_star.unwrap();
    let (b15, b17, b2) = (slope(0.25, q, 1.5), slope(0.25, q, 1.7), slope(0.25, q, 2.0));
    let ok = (r_star - 1.6).abs() < 1e-12 && b15 < 0.0 && b17 > 0.0 && (b2 - 0.125).abs() <= 0.2 * 0.125;
    g.report(
        "4B Dunkl blow-up",
        ok && start.elapsed() < Duration::from_secs(300),
        format!(
            "r*={r_star:.6}, slope r=1.5: {b15:.4}, r=1.7: {b17:.4} (sign flip bracketed), r=2: {b2:.4} (target 0.125 +-20%)"
        ),
    );

    let start = Instant::now();
    let th = threshold(2.0, 1, 1.0, None, Some(8.0)).unwrap();
    let c8 = slope(1.0, 4.0 / 3.0, 8.0);
    let pred = predicted_slope(2.0, 1, 1.0, 8.0);
    let ok = c8 >= pred - 0.02 && !th.flags.sharp_regime && (pred - 0.125).abs() < 1e-15;
    g.report(
        "4C regime guard",
        ok && start.elapsed() < Duration::from_secs(300),
        format!("slope r=8: {c8:.4} >= {pred} - 0.02, sharp_regime={}", th.flags.sharp_regime),
    );
}

fn criterion_threshold(g: &mut Gate) {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for p in [1.1, 1.5, 2.0, 3.0] {
        let th = threshold(p, 1, 0.0, None, None).unwrap();
        ok &= th.r_star == Some(2.0 * p / (p + 1.0));
        for n in 1..=3usize {
            for gamma in [0.0, 0.25, 0.5, 1.0] {
                let t = threshold(p, n, gamma, None, None).unwrap();
                let Some(q) = t.scaling_q else { continue };
                let t = threshold(p, n, gamma, Some(q), None).unwrap();
                ok &= t.flags.on_scaling_line == Some(true);
                let nf = n as f64;
                let lhs = ((p + 1.0) * nf - (p - 1.0) * 2.0 * gamma) / (2.0 * p * nf);
                worst = worst.max((lhs - (1.0 - 1.0 / (nf * q))).abs());
            }
        }
    }
    g.report(
        "5 threshold arithmetic",
        ok && worst <= 1e-12,
        format!("r* exact at gamma=0: {ok}, scaling identity residual {worst:.1e}"),
    );
}

fn main() {
    let mut g = Gate { failed: 0 };
    criterion_identities(&mut g);
    criterion_spectral(&mut g);
    criterion_density(&mut g);
    criterion_blow_up(&mut g);
    criterion_threshold(&mut g);
    if g.failed > 0 {
        println!("{} criteria failed", g.failed);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
