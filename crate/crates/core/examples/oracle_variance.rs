//! Mini-batch error of the two noise models against the `(sigma* + sigma_L |x - x*|) / sqrt(N)` bound.

use dynbatch::harness::verify::minibatch_rms_error;
use dynbatch::numeric::rng::RngStream;
use dynbatch::numeric::vector;
use dynbatch::oracle::{variance_decay_bound, BatchSampling, OracleModel};
use dynbatch::problems::{make_random_quadratic, QuadraticSpec, SpectrumSpec};

fn main() -> dynbatch::error::Result<()> {
    let models = [
        ("additive", OracleModel::additive(0.5)),
        ("random_matrix", OracleModel::random_matrix(0.3, 0.1).with_sampling(BatchSampling::Explicit)),
    ];
    for (name, model) in models {
        let p = make_random_quadratic(&QuadraticSpec::new(5, SpectrumSpec::Conditioned { c: 0.1, l: 1.0 }, model.clone()))?;
        let x = vector::add(&p.x_star, &[1.0, 0.0, -1.0, 0.5, 0.0]);
        let dist = p.dist_sq_to_star(&x).sqrt();
        println!("{name}: sigma* = {:.4}, sigma_L = {:.4}, |x - x*| = {dist:.4}", p.sigma_star, p.sigma_l);
        println!("{:>6} {:>12} {:>12}", "N", "rms error", "bound");
        for n in [1, 4, 16, 64, 256] {
            let e = minibatch_rms_error(&model, &p, &x, n, 4000, &RngStream::new(n))?;
            println!("{n:>6} {e:>12.5} {:>12.5}", variance_decay_bound(p.sigma_star, p.sigma_l, dist, n)?);
        }
    }
    Ok(())
}
