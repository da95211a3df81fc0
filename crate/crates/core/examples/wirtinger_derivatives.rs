//! Parse expressions in the chart coordinates and take Wirtinger derivatives.

use higgs_hodge::parse::parse_expr;
use num_complex::Complex64;

fn main() -> Result<(), higgs_hodge::error::Error> {
    let t = [Complex64::new(0.3, 1.2), Complex64::new(-0.5, 0.4)];
    println!("evaluating at t1 = {}, t2 = {}\n", t[0], t[1]);
    for text in [
        "t1^2*t2",
        "t1*conj(t1)",
        "((t1 - conj(t1))/(2*i))^-1",
        "log_free(t1)",
    ] {
        let e = match parse_expr(text) {
            Ok(e) => e,
            Err(err) => {
                println!("{text:32} rejected: {err}");
                continue;
            }
        };
        println!(
            "{text:32} holomorphic={:<5} d/dt1 = {:<40} dbar/dt1 = {}",
            e.is_holomorphic(),
            e.d(0).to_string(),
            e.dbar(0)
        );
        println!(
            "{:32} value {:.6}, d/dt1 {:.6}, d dbar {:.6}",
            "",
            e.eval(&t)?,
            e.d(0).eval(&t)?,
            e.d(0).dbar(0).eval(&t)?
        );
    }
    Ok(())
}
