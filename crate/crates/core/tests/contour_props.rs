use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tuq_core::contour::{
    banana_contour, coverage, gaussian_ellipse, projected_moments, projected_moments_from_tensors, whiten, ContourKind,
    Point, ProjectedMoments, SliceSpec,
};
use tuq_core::uq::{cut4_points, weighted_central_moments, GaussianBelief, WeightedEnsemble};
use tuq_core::{Error, Matrix};

fn spd2() -> impl Strategy<Value = Matrix> {
    (0.1..3.0f64, 0.1..3.0f64, 0.0..PI).prop_map(|(l1, l2, th)| {
        let (s, c) = th.sin_cos();
        let r = Matrix::from_rows(&[&[c, -s], &[s, c]]);
        r.congruence(&Matrix::from_diagonal(&[l1, l2])).unwrap().symmetrized()
    })
}

fn normals(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| [rng.sample(StandardNormal), rng.sample(StandardNormal)]).collect()
}

/// Parabolic cloud: a Gaussian bent by `y += b x²`.
fn banana_cloud(n: usize, bend: f64, seed: u64) -> Vec<Vec<f64>> {
    normals(n, seed).into_iter().map(|[x, y]| vec![2.0 * x, 0.3 * y + bend * x * x]).collect()
}

fn mean_cov(states: &[Vec<f64>]) -> (Point, Matrix, ProjectedMoments) {
    let ens = WeightedEnsemble::uniform(states.to_vec()).unwrap();
    let m = weighted_central_moments(&ens, 2).unwrap();
    let mu = [m.mean[0], m.mean[1]];
    let frame = whiten(mu, &m.cov).unwrap();
    let pm = projected_moments(&ens, &frame).unwrap();
    (mu, m.cov, pm)
}

fn point_set_distance(a: &[Point], b: &[Point]) -> f64 {
    a.iter()
        .map(|p| b.iter().map(|q| (p[0] - q[0]).hypot(p[1] - q[1])).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

#[test]
fn cut4_of_a_gaussian_has_gaussian_projected_moments() {
    let cov = Matrix::from_rows(&[&[2.0, 0.4, 0.1], &[0.4, 1.0, -0.2], &[0.1, -0.2, 0.5]]);
    let b = GaussianBelief::new(vec![1.0, -2.0, 0.5], cov).unwrap();
    let ens = cut4_points(&b).unwrap();
    let slice = SliceSpec::new(0, 1, 3.0).unwrap();
    let m = weighted_central_moments(&ens, 4).unwrap();
    let (mu, sigma) = slice.mean_covariance(&m).unwrap();
    let frame = whiten(mu, &sigma).unwrap();
    let pm = projected_moments(&slice.restrict(&ens).unwrap(), &frame).unwrap();
    assert!(pm.m_uuu.abs() < 1e-12 && pm.m_uuv.abs() < 1e-12 && (pm.m_uuuu - 3.0).abs() < 1e-12, "{pm:?}");
}

#[test]
fn tensor_contraction_matches_direct_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let states: Vec<Vec<f64>> = (0..50)
        .map(|_| {
            let z: [f64; 3] = [rng.random(), rng.random(), rng.random()];
            vec![z[0] * z[0], z[1] + z[0] * z[2], z[2].exp()]
        })
        .collect();
    let ens = WeightedEnsemble::uniform(states).unwrap();
    let m = weighted_central_moments(&ens, 4).unwrap();
    let slice = SliceSpec::new(2, 0, 3.0).unwrap();
    let (mu, sigma) = slice.mean_covariance(&m).unwrap();
    let frame = whiten(mu, &sigma).unwrap();
    let direct = projected_moments(&slice.restrict(&ens).unwrap(), &frame).unwrap();
    let tensor =
        projected_moments_from_tensors(m.third.as_ref().unwrap(), m.fourth.as_ref().unwrap(), &slice, &frame).unwrap();
    assert!((direct.m_uuu - tensor.m_uuu).abs() < 1e-12);
    assert!((direct.m_uuv - tensor.m_uuv).abs() < 1e-12);
    assert!((direct.m_uuuu - tensor.m_uuuu).abs() < 1e-12);
}

#[test]
fn k_one_has_no_long_axis_correction() {
    let pm = ProjectedMoments { m_uuu: 0.7, m_uuv: 0.0, m_uuuu: 3.0 };
    assert_eq!(pm.cornish_fisher(1.0), 0.0);
    let sigma = Matrix::from_diagonal(&[4.0, 1.0]);
    let banana = banana_contour([0.0; 2], &sigma, &pm, 1.0, 360).unwrap();
    let ellipse = gaussian_ellipse([0.0; 2], &sigma, 1.0, 360).unwrap();
    for (p, q) in banana.points().iter().zip(ellipse.points()) {
        assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
    }
}

#[test]
fn unit_circle_coverage_of_uniform_square() {
    let circle = gaussian_ellipse([0.0; 2], &Matrix::identity(2), 1.0, 2000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<Point> = (0..100_000).map(|_| [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)]).collect();
    let c = coverage(&circle, &samples).unwrap();
    assert!((c - PI / 64.0).abs() < 0.005, "{c}");
    let square: Vec<Point> = samples.iter().map(|p| [p[0] / 4.0, p[1] / 4.0]).collect();
    let c = coverage(&circle, &square).unwrap();
    assert!((c - PI / 4.0).abs() < 0.005, "{c}");
}

#[test]
fn three_sigma_ellipse_covers_gaussian_samples() {
    let ellipse = gaussian_ellipse([0.0; 2], &Matrix::identity(2), 3.0, 720).unwrap();
    let c = coverage(&ellipse, &normals(4000, 21)).unwrap();
    let expected = 1.0 - (-4.5f64).exp();
    assert!((c - expected).abs() < 0.006, "{c} vs {expected}");
}

#[test]
fn coverage_rejects_bad_inputs() {
    let ellipse = gaussian_ellipse([0.0; 2], &Matrix::identity(2), 3.0, 64).unwrap();
    assert_eq!(coverage(&ellipse, &[]).unwrap_err(), Error::EmptyEnsemble);
    assert!(gaussian_ellipse([0.0; 2], &Matrix::identity(2), 0.0, 64).is_err());
    assert!(gaussian_ellipse([0.0; 2], &Matrix::identity(2), 1.0, 2).is_err());
}

#[test]
fn banana_follows_a_bent_cloud() {
    let states = banana_cloud(4000, 0.4, 3);
    let (mu, cov, pm) = mean_cov(&states);
    assert!(pm.m_uuv.abs() > 0.3, "{pm:?}");
    let pts: Vec<Point> = states.iter().map(|s| [s[0], s[1]]).collect();
    let ellipse = gaussian_ellipse(mu, &cov, 3.0, 720).unwrap();
    let banana = banana_contour(mu, &cov, &pm, 3.0, 720).unwrap();
    assert_eq!(banana.kind(), ContourKind::Banana);
    let (ce, cb) = (coverage(&ellipse, &pts).unwrap(), coverage(&banana, &pts).unwrap());
    assert!(cb > ce, "banana {cb} ellipse {ce}");
}

#[test]
fn symmetric_two_point_ensemble() {
    let ens = WeightedEnsemble::uniform(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
    let frame = whiten([0.0; 2], &Matrix::from_diagonal(&[1.0, 0.25])).unwrap();
    let pm = projected_moments(&ens, &frame).unwrap();
    assert_eq!(pm, ProjectedMoments { m_uuu: 0.0, m_uuv: 0.0, m_uuuu: 1.0 });
    assert!(pm.bend().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn whitening_inverts_the_covariance(sigma in spd2(), mx in -5.0..5.0f64, my in -5.0..5.0f64) {
        let f = whiten([mx, my], &sigma).unwrap();
        let wsw = f.whitening().congruence(&sigma).unwrap();
        prop_assert!(wsw.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-12);
        let [l1, l2] = f.eigenvalues();
        prop_assert!(l1 >= l2 && l2 > 0.0);
        let back = f.from_principal(0.0, 0.0);
        prop_assert_eq!(back, [mx, my]);
    }

    #[test]
    fn gaussian_moments_reduce_banana_to_ellipse(sigma in spd2(), k in 0.5..4.0f64) {
        let banana = banana_contour([0.3, -0.1], &sigma, &ProjectedMoments::GAUSSIAN, k, 256).unwrap();
        let ellipse = gaussian_ellipse([0.3, -0.1], &sigma, k, 256).unwrap();
        prop_assert!(!banana.fallback);
        for (p, q) in banana.points().iter().zip(ellipse.points()) {
            prop_assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn banana_deforms_continuously(sigma in spd2(), uuu in -1.0..1.0f64, uuv in -1.0..1.0f64, eps in 1e-6..1e-3f64) {
        let k = 3.0;
        let ellipse = gaussian_ellipse([0.0; 2], &sigma, k, 128).unwrap();
        let pm = ProjectedMoments { m_uuu: eps * uuu, m_uuv: eps * uuv, m_uuuu: 3.0 };
        let banana = banana_contour([0.0; 2], &sigma, &pm, k, 128).unwrap();
        let bound = eps * (uuu.abs() * (k * k - 1.0) / 6.0 + uuv.abs() / 2.0 * (k * k + 1.0)) * sigma.max_abs().sqrt() * 1.5;
        for (p, q) in banana.points().iter().zip(ellipse.points()) {
            prop_assert!((p[0] - q[0]).hypot(p[1] - q[1]) <= bound);
        }
    }

    #[test]
    fn contours_are_frame_equivariant(theta in 0.0..2.0 * PI, sx in -3.0..3.0f64, sy in -3.0..3.0f64, seed in 0u64..1000) {
        let states = banana_cloud(200, 0.3, seed);
        let (s, c) = theta.sin_cos();
        let moved: Vec<Vec<f64>> = states.iter().map(|p| vec![c * p[0] - s * p[1] + sx, s * p[0] + c * p[1] + sy]).collect();
        let (mu, cov, pm) = mean_cov(&states);
        let (mu2, cov2, pm2) = mean_cov(&moved);
        for make in [0, 1] {
            let (a, b) = if make == 0 {
                (gaussian_ellipse(mu, &cov, 3.0, 360).unwrap(), gaussian_ellipse(mu2, &cov2, 3.0, 360).unwrap())
            } else {
                (banana_contour(mu, &cov, &pm, 3.0, 360).unwrap(), banana_contour(mu2, &cov2, &pm2, 3.0, 360).unwrap())
            };
            let mapped: Vec<Point> = a.points().iter().map(|p| [c * p[0] - s * p[1] + sx, s * p[0] + c * p[1] + sy]).collect();
            prop_assert!(point_set_distance(&mapped, b.points()) < 1e-9);
            prop_assert!(point_set_distance(b.points(), &mapped) < 1e-9);
        }
    }

    #[test]
    fn coverage_grows_with_k(sigma in spd2(), seed in 0u64..1000) {
        let f = whiten([0.0; 2], &sigma).unwrap();
        let pts: Vec<Point> = normals(500, seed).into_iter().map(|[u, v]| {
            let [l1, l2] = f.eigenvalues();
            f.from_principal(u * l1.sqrt(), v * l2.sqrt())
        }).collect();
        let mut last = 0.0;
        for k in [0.5, 1.0, 2.0, 3.0, 4.0] {
            let c = coverage(&gaussian_ellipse([0.0; 2], &sigma, k, 360).unwrap(), &pts).unwrap();
            prop_assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn ellipse_area_matches_closed_form(sigma in spd2(), k in 0.5..4.0f64) {
        let e = gaussian_ellipse([1.0, 1.0], &sigma, k, 720).unwrap();
        let exact = PI * k * k * sigma.determinant().unwrap().sqrt();
        prop_assert!((e.area().abs() - exact).abs() < 1e-3 * exact);
    }
}
