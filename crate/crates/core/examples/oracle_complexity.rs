//! Oracle calls needed to reach each accuracy, for both methods.

use dynbatch::harness::fit::complexity_slope;
use dynbatch::harness::verify::{shipped_config, SMOOTH_COMPLEXITY_CONFIG, STRONG_COMPLEXITY_CONFIG};
use dynbatch::harness::{complexity_curve, run_experiment};

fn main() -> dynbatch::error::Result<()> {
    for (text, eps) in [(STRONG_COMPLEXITY_CONFIG, &[1e-1, 1e-2, 1e-3, 1e-4][..]), (SMOOTH_COMPLEXITY_CONFIG, &[1e-1, 1e-2, 1e-3][..])] {
        let mut cfg = shipped_config(text, 1)?;
        cfg.override_reps(10);
        let result = run_experiment(&cfg)?;
        let rows = complexity_curve(&result, eps);
        println!("{} ({})", result.name, result.algorithm.name());
        for r in &rows {
            match (r.t_hit, r.cum_calls) {
                (Some(t), Some(c)) => println!("  eps {:.0e}: T = {t:>4}, calls = {c}", r.eps),
                _ => println!("  eps {:.0e}: not reached", r.eps),
            }
        }
        println!("  slope of log calls vs log(1/eps): {:.3}", complexity_slope(&rows).unwrap_or(f64::NAN));
    }
    Ok(())
}
