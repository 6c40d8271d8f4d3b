use dynbatch::numeric::rng::{fill_standard_normal, RngStream, StreamRng};
use dynbatch::numeric::vector;
use dynbatch::oracle::OracleModel;
use dynbatch::problems::{make_random_quadratic, ProblemInstance, QuadraticSpec, SpectrumSpec};
use dynbatch::prox::{prox_step, ConstraintSpec, RegularizerSpec};

fn gaussian(rng: &mut StreamRng, d: usize, scale: f64) -> Vec<f64> {
    let mut v = vec![0.0; d];
    fill_standard_normal(rng, &mut v);
    vector::scale(&v, scale)
}

fn strongly_convex() -> ProblemInstance {
    let mut spec = QuadraticSpec::new(6, SpectrumSpec::Conditioned { c: 0.1, l: 2.0 }, OracleModel::noiseless());
    spec.rotate = true;
    spec.seed = 17;
    make_random_quadratic(&spec).unwrap()
}

fn close_le(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn descent_sandwich() {
    let p = strongly_convex();
    let mut rng = RngStream::new(1).rng();
    for _ in 0..10_000 {
        let x = gaussian(&mut rng, p.dim, 3.0);
        let y = gaussian(&mut rng, p.dim, 3.0);
        let lin = p.smooth_value(&y) + vector::dot(&p.true_gradient(&y).unwrap(), &vector::sub(&x, &y));
        let d2 = vector::dist_sq(&x, &y);
        let fx = p.smooth_value(&x);
        assert!(close_le(lin + 0.5 * p.c * d2, fx));
        assert!(close_le(fx, lin + 0.5 * p.l * d2));
    }
}

#[test]
fn quadratic_growth_and_gradient_domination() {
    let p = strongly_convex();
    let mut rng = RngStream::new(2).rng();
    for _ in 0..10_000 {
        let x = vector::add(&p.x_star, &gaussian(&mut rng, p.dim, 2.0));
        let gap = p.gap(&x).unwrap();
        let g = p.true_gradient(&x).unwrap();
        assert!(close_le(0.5 * p.c * p.dist_sq_to_star(&x), gap));
        assert!(close_le(gap, vector::norm_sq(&g) / (2.0 * p.c)));
    }
}

#[test]
fn gradient_lipschitz_constant_is_tight() {
    let p = strongly_convex();
    let mut rng = RngStream::new(3).rng();
    for _ in 0..10_000 {
        let x = gaussian(&mut rng, p.dim, 3.0);
        let y = gaussian(&mut rng, p.dim, 3.0);
        let dg = vector::dist_sq(&p.true_gradient(&x).unwrap(), &p.true_gradient(&y).unwrap()).sqrt();
        assert!(close_le(dg, p.l * vector::dist_sq(&x, &y).sqrt()));
    }
    let top = p.matrix.eigenvalues().iter().position(|v| *v == p.l).unwrap();
    let mut e = vec![0.0; p.dim];
    e[top] = 1.0;
    let dir = p.matrix.from_eigen(&e);
    let dg = vector::norm(&vector::sub(&p.true_gradient(&dir).unwrap(), &p.true_gradient(&vec![0.0; p.dim]).unwrap()));
    assert!((dg / p.l - 1.0).abs() < 0.01);
}

#[test]
fn gap_is_midpoint_convex() {
    let mut spec = QuadraticSpec::new(5, SpectrumSpec::RankDeficient { l: 1.0, floor: 1e-3 }, OracleModel::noiseless());
    spec.regularizer = RegularizerSpec::ElasticNet { lambda: 0.1, gamma: 0.2 };
    spec.constraint = ConstraintSpec::uniform_box(5, -1.0, 1.0);
    spec.seed = 4;
    let p = make_random_quadratic(&spec).unwrap();
    let mut rng = RngStream::new(4).rng();
    for _ in 0..10_000 {
        let x = p.constraint.project(&gaussian(&mut rng, p.dim, 1.0));
        let y = p.constraint.project(&gaussian(&mut rng, p.dim, 1.0));
        let mid = vector::scale(&vector::add(&x, &y), 0.5);
        let (gx, gy, gm) = (p.gap(&x).unwrap(), p.gap(&y).unwrap(), p.gap(&mid).unwrap());
        assert!(gm <= 0.5 * (gx + gy) + 1e-9);
        assert!(gx >= -1e-12 && gy >= -1e-12);
    }
}

#[test]
fn minimizer_is_a_prox_fixed_point() {
    let combos = [
        (RegularizerSpec::Zero, ConstraintSpec::AllSpace, false),
        (RegularizerSpec::L1 { lambda: 0.05 }, ConstraintSpec::AllSpace, true),
        (RegularizerSpec::SquaredL2 { lambda: 0.2 }, ConstraintSpec::uniform_box(8, -0.3, 0.3), false),
        (RegularizerSpec::ElasticNet { lambda: 0.1, gamma: 0.1 }, ConstraintSpec::uniform_box(8, -0.5, 0.2), true),
        (RegularizerSpec::Zero, ConstraintSpec::centered_ball(8, 0.5), true),
    ];
    for (k, (reg, cons, rotate)) in combos.into_iter().enumerate() {
        for spectrum in [SpectrumSpec::Conditioned { c: 0.05, l: 1.0 }, SpectrumSpec::RankDeficient { l: 1.0, floor: 1e-4 }] {
            let mut spec = QuadraticSpec::new(8, spectrum, OracleModel::noiseless());
            spec.regularizer = reg.clone();
            spec.constraint = cons.clone();
            spec.rotate = rotate;
            spec.seed = 40 + k as u64;
            let p = make_random_quadratic(&spec).unwrap();
            let g = p.true_gradient(&p.x_star).unwrap();
            for alpha in [0.1, 1.0] {
                let z = prox_step(&p.regularizer, &p.constraint, &p.x_star, &g, alpha).unwrap();
                assert!(vector::dist_sq(&z, &p.x_star).sqrt() <= 1e-9, "combo {k} alpha {alpha}");
            }
            assert!(p.constraint.contains(&p.x_star, 1e-9));
        }
    }
}
