//! Random trials of the trace-chain inequalities across ranks.

use higgs_hodge::harness::run_nilpotent_harness;

fn main() -> Result<(), higgs_hodge::error::Error> {
    for rank in 2..=5 {
        let rep = run_nilpotent_harness(rank, 300, 1)?;
        println!(
            "rank {rank}: graded min margin {:+.2e}, trace-sum error {:.1e}; general: {} of {} admit an orthogonal grading",
            rep.graded.min_margin,
            rep.graded.max_trace_sum_error,
            rep.general.orthogonal_found,
            rep.general.instances
        );
    }
    let rep = run_nilpotent_harness(3, 50, 2)?;
    print!("\n{}", rep.to_text());
    Ok(())
}
