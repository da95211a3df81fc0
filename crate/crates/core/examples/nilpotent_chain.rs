//! Grade a nilpotent endomorphism and evaluate the trace-chain inequalities.

use higgs_hodge::linalg::{CMat, HermitianForm};
use higgs_hodge::nilpotent::{
    commutator_chain_check, hsc_bound_from_traces, jordan_grading, orthogonal_strict_grading,
    trace_profile,
};
use num_complex::Complex64;

fn main() -> Result<(), higgs_hodge::error::Error> {
    let c = |x: f64| Complex64::new(x, 0.0);
    // A 3x3 shift with unequal weights.
    let mut a = CMat::zeros(3, 3);
    a[(0, 1)] = c(1.0);
    a[(1, 2)] = c(2.0);
    let h = HermitianForm::identity(3);

    let g = orthogonal_strict_grading(&a, &h)?;
    println!("levels {:?}, k = {}", g.level_dims(), g.k());
    let traces = trace_profile(&g);
    println!("traces {:?}, sum {}", traces.a, traces.sum());
    let rep = commutator_chain_check(&g);
    println!(
        "LHS {:.6} >= M1 {:.6} >= M2 {:.6} >= M3 {:.6}  (holds: {})",
        rep.lhs, rep.m1, rep.m2, rep.m3, rep.holds
    );
    println!(
        "curvature bound from traces: {:.6}",
        hsc_bound_from_traces(&g)
    );

    // Under a non-diagonal metric the Jordan chains are no longer orthogonal.
    let mut skew = CMat::identity(3, 3);
    skew[(0, 2)] = Complex64::new(0.4, 0.3);
    skew[(2, 0)] = Complex64::new(0.4, -0.3);
    let h2 = HermitianForm::new(skew)?;
    let j = jordan_grading(&a, &h2)?;
    println!(
        "jordan grading under skew metric: strict {}, orthogonal {}",
        j.is_strictly_graded, j.is_h_orthogonal
    );
    match orthogonal_strict_grading(&a, &h2) {
        Ok(o) => println!(
            "orthogonal grading found, min margin {:.2e}",
            commutator_chain_check(&o).min_margin()
        ),
        Err(e) => println!("no orthogonal grading: {e}"),
    }
    Ok(())
}
