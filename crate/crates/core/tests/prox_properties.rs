use dynbatch::harness::verify::{grid_oracle_error, three_point_violations};
use dynbatch::numeric::rng::RngStream;
use dynbatch::numeric::vector;
use dynbatch::prox::{prox_step, ConstraintSpec, RegularizerSpec};
use rand::Rng;

#[test]
fn prox_is_nonexpansive() {
    let d = 4;
    let setups = [
        (RegularizerSpec::ElasticNet { lambda: 0.3, gamma: 0.5 }, ConstraintSpec::uniform_box(d, -1.0, 0.5)),
        (RegularizerSpec::L1 { lambda: 1.0 }, ConstraintSpec::AllSpace),
        (RegularizerSpec::Zero, ConstraintSpec::Ball { center: vec![0.5, 0.0, -0.5, 1.0], radius: 0.7 }),
    ];
    let mut rng = RngStream::new(6).rng();
    for (reg, cons) in &setups {
        let alpha = 0.8;
        for _ in 0..100_000 {
            let mut v = || (0..d).map(|_| rng.random_range(-3.0..3.0)).collect::<Vec<f64>>();
            let (y, u, y2, u2) = (v(), v(), v(), v());
            let a = prox_step(reg, cons, &y, &u, alpha).unwrap();
            let b = prox_step(reg, cons, &y2, &u2, alpha).unwrap();
            let lhs = vector::dist_sq(&a, &b).sqrt();
            let rhs = vector::dist_sq(&vector::sub(&y, &vector::scale(&u, alpha)), &vector::sub(&y2, &vector::scale(&u2, alpha))).sqrt();
            assert!(lhs <= rhs + 1e-12);
            assert!(cons.contains(&a, 1e-9));
        }
    }
}

#[test]
fn three_point_inequality_holds() {
    let (bad, worst) = three_point_violations(200_000, &RngStream::new(12)).unwrap();
    assert_eq!(bad, 0, "worst slack {worst}");
}

#[test]
fn scalar_prox_matches_grid_search() {
    assert!(grid_oracle_error(2, &RngStream::new(13)).unwrap() <= 1e-6);
}
