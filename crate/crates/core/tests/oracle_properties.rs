use dynbatch::numeric::rng::{fill_standard_normal, RngStream};
use dynbatch::numeric::vector;
use dynbatch::oracle::{self, BatchSampling, OracleCounter, OracleModel};
use dynbatch::problems::{make_random_quadratic, ProblemInstance, QuadraticSpec, SpectrumSpec};

fn instance(model: OracleModel) -> ProblemInstance {
    let mut spec = QuadraticSpec::new(4, SpectrumSpec::Conditioned { c: 0.25, l: 1.0 }, model);
    spec.rotate = true;
    spec.seed = 5;
    make_random_quadratic(&spec).unwrap()
}

fn test_points(problem: &ProblemInstance, n: u32, stream: &RngStream) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let mut v = vec![0.0; problem.dim];
            fill_standard_normal(&mut stream.child(k).rng(), &mut v);
            vector::add(&problem.x_star, &v)
        })
        .collect()
}

#[test]
fn sample_mean_is_unbiased() {
    let models = [OracleModel::additive(0.7), OracleModel::random_matrix(0.4, 0.2)];
    let m = 100_000u32;
    for (mi, model) in models.iter().enumerate() {
        let problem = instance(model.clone());
        let root = RngStream::new(3).child(mi as u32);
        for (k, x) in test_points(&problem, 100, &root.child(0)).iter().enumerate() {
            let g = problem.true_gradient(x).unwrap();
            let stream = root.child(1).child(k as u32);
            let mut sum = vec![0.0; problem.dim];
            let mut sq = 0.0;
            for j in 0..m {
                let s = oracle::sample_gradient(model, &problem, x, &stream.child(j)).unwrap();
                sq += vector::dist_sq(&s, &g);
                vector::axpy(1.0, &s, &mut sum);
            }
            let mean = vector::scale(&sum, 1.0 / f64::from(m));
            let sigma_hat = (sq / f64::from(m)).sqrt();
            let err = vector::dist_sq(&mean, &g).sqrt();
            assert!(err <= 5.0 * sigma_hat / f64::from(m).sqrt(), "model {mi} point {k}: {err} vs sigma {sigma_hat}");
        }
    }
}

#[test]
fn random_matrix_variance_matches_closed_form() {
    let model = OracleModel::random_matrix(0.3, 0.0);
    let problem = instance(model.clone());
    let lambda = problem.noise_matrix_eigenvalue();
    let root = RngStream::new(8);
    for (k, x) in test_points(&problem, 10, &root.child(0)).iter().enumerate() {
        let est = oracle::estimate_pointwise_sigma(&model, &problem, x, 100_000, &root.child(1).child(k as u32)).unwrap();
        let exact = lambda * vector::norm_sq(x);
        assert!((est * est / exact - 1.0).abs() < 0.05, "point {k}: {} vs {exact}", est * est);
        assert!(est * est >= 0.9 * lambda * vector::norm_sq(x));
    }
}

#[test]
fn batch_accounting_is_exact_for_every_sampling_mode() {
    for sampling in [BatchSampling::Explicit, BatchSampling::Aggregated, BatchSampling::Auto] {
        let model = OracleModel::random_matrix(0.2, 0.1).with_sampling(sampling);
        let problem = instance(model.clone());
        let mut counter = OracleCounter::new();
        let mut expected = 0;
        for (k, n) in [1u64, 7, 64, 65, 1000].into_iter().enumerate() {
            let b = oracle::minibatch_gradient(&model, &problem, &problem.x_star, n, &RngStream::new(k as u64), &mut counter).unwrap();
            expected += n;
            assert_eq!(b.count, n);
            assert_eq!(counter.calls(), expected);
        }
    }
}

#[test]
fn aggregated_and_explicit_batches_share_second_moments() {
    let x = vec![1.0, -2.0, 0.5, 3.0];
    let base = OracleModel::random_matrix(0.3, 0.2);
    let problem = instance(base.clone());
    let mut rms = Vec::new();
    for sampling in [BatchSampling::Explicit, BatchSampling::Aggregated] {
        let model = base.clone().with_sampling(sampling);
        let e = dynbatch::harness::verify::minibatch_rms_error(&model, &problem, &x, 16, 20_000, &RngStream::new(2)).unwrap();
        rms.push(e);
    }
    assert!((rms[0] / rms[1] - 1.0).abs() < 0.03, "{rms:?}");
    let exact = base.pointwise_sigma(&x) / 4.0;
    assert!((rms[1] / exact - 1.0).abs() < 0.03);
}

#[test]
fn random_lipschitz_is_within_twice_l() {
    let model = OracleModel::random_matrix(0.1, 0.0);
    let problem = instance(model.clone());
    let est = oracle::estimate_random_lipschitz(&model, &problem, 2_000, &RngStream::new(4)).unwrap();
    assert!(est >= problem.l * 0.99 && est <= 2.0 * problem.l, "{est}");
}
