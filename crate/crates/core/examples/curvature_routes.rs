//! Base curvature three ways: from the jet of the Hodge metric, from the
//! subbundle formula, and from the flat-bundle formula.

use higgs_hodge::fixtures::fixture;
use higgs_hodge::hodge::{
    base_curvature_direct, base_curvature_flat_formula, base_curvature_subbundle, hodge_metric,
    sectional_from_sample,
};
use num_complex::Complex64;

fn main() -> Result<(), higgs_hodge::error::Error> {
    for name in ["uniformizing", "sym2", "product", "nonkahler-control"] {
        let b = fixture(name)?.bundle();
        let t = &b.domain.sample(1, 42)[0];
        let g = hodge_metric(&b, t)?;
        let direct = base_curvature_direct(&b, t)?;
        let sub = base_curvature_subbundle(&b, t)?;
        println!("{name} at {:?}", t.0);
        println!("  G = {:.6}", g.g);
        println!(
            "  direct vs subbundle: {:.2e}",
            direct.compare(&sub).relative()
        );
        match base_curvature_flat_formula(&b, t) {
            Ok(flat) => println!(
                "  direct vs flat:      {:.2e}",
                direct.compare(&flat).relative()
            ),
            Err(e) => println!("  flat formula refused: {e}"),
        }
        let mut v = vec![Complex64::new(0.0, 0.0); b.base_dim()];
        v[0] = Complex64::new(1.0, 0.0);
        println!(
            "  sectional curvature along d/dt1: {:.9}",
            sectional_from_sample(&direct, &v)
        );
    }

    let b = fixture("nonadmissible-control")?.bundle();
    let t = &b.domain.sample(1, 42)[0];
    if let Err(e) = base_curvature_direct(&b, t) {
        println!("nonadmissible-control: {e}");
    }
    Ok(())
}
