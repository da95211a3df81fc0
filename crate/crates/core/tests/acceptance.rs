//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use common::{interior_samples, rel_close, wirtinger_fd};
use higgs_hodge::certify::{certify, CertifyOptions, Status, NON_ADMISSIBLE_SKIP};
use higgs_hodge::error::Error;
use higgs_hodge::fixtures::{catalog, fixture};
use higgs_hodge::harness::{run_nilpotent_harness, shift_block_report};
use higgs_hodge::higgs::{flatness_residual, HiggsBundleChart};
use higgs_hodge::hodge::{
    base_curvature_direct, base_curvature_flat_formula, base_curvature_subbundle, bisectional_form,
    hodge_metric, hodge_metric_jet, holomorphic_sectional_curvature, kahler_residual,
    scalar_trace_check, sectional_bound,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn bundle(name: &str) -> HiggsBundleChart {
    fixture(name).unwrap().bundle()
}

fn flat_admissible() -> Vec<(&'static str, HiggsBundleChart)> {
    catalog()
        .into_iter()
        .filter(|f| f.expected.flat && f.expected.admissible)
        .map(|f| (f.name, f.bundle()))
        .collect()
}

fn samples(b: &HiggsBundleChart, n: usize, seed: u64) -> Vec<higgs_hodge::domain::BasePoint> {
    b.domain.sample(n, seed)
}

fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn flatness() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for name in ["uniformizing", "sym2", "product"] {
        let b = bundle(name);
        for t in samples(&b, 100, 1) {
            worst = worst.max(
                flatness_residual(&b, &t)
                    .map_err(|e| e.to_string())?
                    .total(),
            );
        }
    }
    let b = bundle("nonflat-control");
    let mut control_err = 0.0f64;
    for t in samples(&b, 100, 1) {
        let r = flatness_residual(&b, &t)
            .map_err(|e| e.to_string())?
            .total();
        control_err = control_err.max((r - 2f64.sqrt()).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst < 1e-9 && control_err <= 1e-9 && secs < 10.0,
        format!("max residual {worst:.2e}, control |r - sqrt2| {control_err:.2e}, {secs:.2}s"),
    )
}

fn kahler() -> Outcome {
    let b = bundle("product");
    let mut worst = 0.0f64;
    for t in samples(&b, 50, 2) {
        worst = worst.max(kahler_residual(&b, &t).map_err(|e| e.to_string())?);
    }
    let mut one_dim = true;
    for f in catalog().into_iter().filter(|f| f.expected.base_dim == 1) {
        let b = f.bundle();
        for t in samples(&b, 50, 2) {
            one_dim &= kahler_residual(&b, &t).map_err(|e| e.to_string())? == 0.0;
        }
    }
    ensure(
        worst < 1e-9 && one_dim,
        format!("product residual {worst:.2e}, one-dimensional bases exactly zero: {one_dim}"),
    )
}

fn bisectional() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut trace = f64::NEG_INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, b) in flat_admissible() {
        let m = b.base_dim();
        for t in samples(&b, 20, 3) {
            let s = base_curvature_direct(&b, &t).map_err(|e| format!("{name}: {e}"))?;
            trace = trace.max(scalar_trace_check(&s));
            for _ in 0..1000 {
                let xi = random_vector(&mut rng, m);
                let v = random_vector(&mut rng, m);
                worst = worst.max(bisectional_form(&s, &xi, &v));
            }
        }
    }
    ensure(
        worst <= 1e-10 && trace <= 1e-10,
        format!("max bisectional {worst:.2e}, max scalar trace {trace:.2e}"),
    )
}

fn hsc_bound() -> Outcome {
    // (fixture, nilpotency, rank, measured along d/dt1, published bound)
    let cases = [
        ("uniformizing", 1, 2, -2.0, -0.5),
        ("sym2", 2, 3, -0.5, -1.0 / 12.0),
        ("product", 1, 4, -2.0, -0.25),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, k, r, want, bound) in cases {
        let b = bundle(name);
        let mut dir = vec![Complex64::new(0.0, 0.0); b.base_dim()];
        dir[0] = Complex64::new(1.0, 0.0);
        let mut err = 0.0f64;
        let mut max_hsc = f64::NEG_INFINITY;
        for t in samples(&b, 50, 4) {
            let hsc = holomorphic_sectional_curvature(&b, &t, &dir).map_err(|e| e.to_string())?;
            err = err.max((hsc - want).abs());
            max_hsc = max_hsc.max(hsc);
        }
        let fits =
            err <= 1e-6 && (sectional_bound(k, r) - bound).abs() <= 1e-15 && max_hsc <= bound;
        ok &= fits;
        parts.push(format!("{name} {max_hsc:.9} <= {bound:.6} (err {err:.1e})"));
    }
    ensure(ok, parts.join("; "))
}

fn three_routes() -> Outcome {
    let mut worst = 0.0f64;
    let mut ok = true;
    for (name, b) in flat_admissible() {
        for t in samples(&b, 50, 5) {
            let direct = base_curvature_direct(&b, &t).map_err(|e| format!("{name}: {e}"))?;
            let sub = base_curvature_subbundle(&b, &t).map_err(|e| format!("{name}: {e}"))?;
            let flat = base_curvature_flat_formula(&b, &t).map_err(|e| format!("{name}: {e}"))?;
            for a in [
                direct.compare(&sub),
                direct.compare(&flat),
                sub.compare(&flat),
            ] {
                ok &= a.within(1e-6, 1e-9);
                worst = worst.max(a.relative());
            }
        }
    }
    ensure(ok, format!("max relative disagreement {worst:.2e}"))
}

fn derivatives() -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for f in catalog() {
        let b = f.bundle();
        let m = b.base_dim();
        for t in interior_samples(&b, 50) {
            for (a, c, e) in b.h.entries() {
                let eval = |p: &[Complex64]| e.eval(p).unwrap();
                for j in 0..m {
                    let (fd, fdbar) = wirtinger_fd(&eval, &t, j);
                    for (exact, approx) in [(e.d(j).eval(&t), fd), (e.dbar(j).eval(&t), fdbar)] {
                        let exact = exact.map_err(|e| e.to_string())?;
                        checked += 1;
                        worst = worst.max(
                            (exact - approx).norm() / exact.norm().max(approx.norm()).max(1.0),
                        );
                        if !rel_close(exact, approx, 1e-6) {
                            return Err(format!(
                                "{} h[{a}][{c}] along t{}: {exact} vs {approx}",
                                f.name,
                                j + 1
                            ));
                        }
                    }
                }
            }
            let jet = hodge_metric_jet(&b, &t).map_err(|e| e.to_string())?;
            for p in 0..m {
                for q in 0..m {
                    let entry = |s: &[Complex64]| hodge_metric(&b, s).unwrap().g[(p, q)];
                    for j in 0..m {
                        let (fd, fdbar) = wirtinger_fd(&entry, &t, j);
                        for (exact, approx) in
                            [(jet.d[j][(p, q)], fd), (jet.dbar[j][(p, q)], fdbar)]
                        {
                            checked += 1;
                            worst = worst.max(
                                (exact - approx).norm() / exact.norm().max(approx.norm()).max(1.0),
                            );
                            if !rel_close(exact, approx, 1e-6) {
                                return Err(format!(
                                    "{} G[{p}][{q}] along t{}: {exact} vs {approx}",
                                    f.name,
                                    j + 1
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    ensure(
        true,
        format!("{checked} derivatives, max relative error {worst:.2e}"),
    )
}

fn trace_chain() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for rank in 2..=6 {
        let rep = run_nilpotent_harness(rank, 1000, 7).map_err(|e| e.to_string())?;
        let g = &rep.graded;
        ok &= rep.pass
            && g.instances == 1000
            && g.failures == 0
            && g.min_margin >= -1e-9
            && g.max_trace_sum_error <= 1e-9;
        parts.push(format!(
            "r={rank} margin {:.1e} sum err {:.1e}",
            g.min_margin, g.max_trace_sum_error
        ));
    }
    let shift = shift_block_report();
    let root2 = 2f64.sqrt();
    let equal = (shift.lhs - root2).abs() <= 1e-9 && (shift.m1 - root2).abs() <= 1e-9;
    ok &= equal;
    parts.push(format!(
        "shift block LHS {:.12} M1 {:.12}",
        shift.lhs, shift.m1
    ));
    ensure(ok, parts.join("; "))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_higgs-hodge"))
}

fn emit(name: &str, dir: &std::path::Path) -> Result<String, String> {
    let p = dir.join(format!("{name}.json"));
    higgs_hodge::fixtures::emit(name, &p).map_err(|e| e.to_string())?;
    Ok(p.to_string_lossy().into_owned())
}

fn negative_controls() -> Outcome {
    let b = bundle("nonadmissible-control");
    let t = &samples(&b, 1, 8)[0];
    let degenerate = matches!(
        base_curvature_direct(&b, t),
        Err(Error::DegenerateGram { .. })
    );
    let rep = certify(&b, &CertifyOptions::default());
    let skipped = [
        "curvature_agreement",
        "bisectional",
        "scalar_trace",
        "hsc_coordinate",
        "hsc_random",
    ]
    .iter()
    .all(|n| {
        rep.check(n).is_some_and(|c| {
            c.status == Status::Skipped && c.note.as_deref() == Some(NON_ADMISSIBLE_SKIP)
        })
    });

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut codes = Vec::new();
    for name in ["uniformizing", "nonflat-control"] {
        let p = emit(name, dir.path())?;
        codes.push(
            bin()
                .args(["check", &p])
                .output()
                .map_err(|e| e.to_string())?
                .status
                .code(),
        );
    }
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").map_err(|e| e.to_string())?;
    codes.push(
        bin()
            .arg("check")
            .arg(&bad)
            .output()
            .map_err(|e| e.to_string())?
            .status
            .code(),
    );
    let contract = codes == [Some(0), Some(1), Some(2)];
    ensure(
        degenerate && skipped && contract,
        format!("DegenerateGram {degenerate}, skipped with reason {skipped}, exit codes {codes:?}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = emit("product", dir.path())?;
    let run = || {
        bin()
            .args([
                "check",
                &p,
                "--report",
                "json",
                "--seed",
                "11",
                "--samples",
                "40",
            ])
            .output()
            .map(|o| o.stdout)
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(
        !a.is_empty() && a == b,
        format!("{} bytes, identical: {}", a.len(), a == b),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("flatness certification", flatness),
        ("Kahler residual", kahler),
        ("semi-negative bisectional curvature", bisectional),
        ("holomorphic sectional curvature bound", hsc_bound),
        ("three curvature routes agree", three_routes),
        ("derivatives match finite differences", derivatives),
        ("nilpotent trace chain", trace_chain),
        ("negative controls and exit codes", negative_controls),
        ("deterministic JSON reports", determinism),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(msg) => println!("criterion {}: PASS {title}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {title}: {msg}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
