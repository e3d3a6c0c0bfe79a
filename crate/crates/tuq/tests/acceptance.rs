//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are reported as `FAIL (known)` and do not
//! change the exit status; any other failure does.

use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tuq::config::ScenarioConfig;
use tuq::core::contour::{banana_contour, coverage, gaussian_ellipse, ContourKind, Point, ProjectedMoments};
use tuq::core::dynamics::{integrate_fixed, stm_propagate, Cr3bpSystem, System};
use tuq::core::flowmap::{build_da_map, build_dda_map, stretching_direction, DirectionFrame};
use tuq::core::poly::monomial_count;
use tuq::core::uq::{
    cut4_points, gmm_split, lincov, pce_fit, pce_moments, ut_run, GaussianBelief, LinearPropagator, UtParams,
};
use tuq::core::{Matrix, PolyContext, TruncatedPolynomial};
use tuq::study::{cr3bp_scenario, run_scenario, run_study, Scenario, StudyReport};

const KNOWN_RED: &[usize] = &[7];

struct Outcome {
    id: usize,
    pass: bool,
    title: &'static str,
    detail: String,
    seconds: f64,
}

fn scenario(name: &str) -> ScenarioConfig {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    ScenarioConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn gaussian_moment(exponents: &[u8]) -> f64 {
    exponents
        .iter()
        .map(|&e| if e % 2 == 1 { 0.0 } else { (1..e).step_by(2).map(f64::from).product::<f64>() })
        .product()
}

fn c1_monomial_counts(halo: &Scenario<Cr3bpSystem>) -> (bool, String) {
    let count = monomial_count(6, 3);
    let step = halo.system.default_fixed_step();
    let (_, stm) = stm_propagate(&halo.system, &halo.start, 0.0, halo.horizon, step).unwrap();
    let frame = DirectionFrame::new(&stretching_direction(&stm).unwrap()).unwrap();
    let dda = build_dda_map(&halo.system, &halo.start, 0.0, halo.horizon, 3, &frame, step).unwrap();
    let terms = dda.max_nonconstant_terms();
    (count == 83 && terms <= 8, format!("K(6,3)={count}, DDA terms per component={terms}"))
}

fn c2_cut4_exactness() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut n6 = 0;
    for n in 3..=6 {
        let b = GaussianBelief::new(vec![0.0; n], Matrix::identity(n)).unwrap();
        let ens = cut4_points(&b).unwrap();
        if n == 6 {
            n6 = ens.len();
        }
        let ctx = PolyContext::new(n, 5).unwrap();
        for alpha in ctx.monomials() {
            let e = alpha.exponents();
            let m: f64 = ens
                .weights()
                .iter()
                .zip(ens.states())
                .map(|(w, x)| w * x.iter().zip(e).map(|(v, &k)| v.powi(k as i32)).product::<f64>())
                .sum();
            worst = worst.max((m - gaussian_moment(e)).abs());
        }
    }
    (worst <= 1e-12 && n6 == 76, format!("max moment error {worst:.2e} (order <= 5, N=3..6), N=6 points={n6}"))
}

fn c3_halo(r: &StudyReport) -> (bool, String) {
    let t = r.diagnostic("period").unwrap();
    let c = r.diagnostic("jacobi_constant").unwrap();
    (
        within(t, 3.136654204, 1e-6) && within(c, 3.0612627924, 1e-6),
        format!("T={t:.10}, C={c:.10}"),
    )
}

fn c4_convergence(halo: &Scenario<Cr3bpSystem>) -> (bool, String) {
    let step = halo.system.default_fixed_step();
    let da = build_da_map(&halo.system, &halo.start, 0.0, halo.horizon, 3, step).unwrap();
    let gamma = stretching_direction(&da.stm()).unwrap();
    let (xs, ys): (Vec<f64>, Vec<f64>) = (0..9)
        .map(|i| {
            let d = 10f64.powf(-4.0 + 0.25 * i as f64);
            let dx: Vec<f64> = gamma.iter().map(|g| d * g).collect();
            let x0: Vec<f64> = halo.start.iter().zip(&dx).map(|(a, b)| a + b).collect();
            let truth = integrate_fixed(&halo.system, x0, 0.0, halo.horizon, step).unwrap();
            let err = da.eval(&dx).unwrap().iter().zip(&truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            (d.ln(), err.ln())
        })
        .unzip();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    (within(slope, 4.0, 0.3), format!("log-log slope {slope:.3} over delta in [1e-4, 1e-2]"))
}

fn c5_error_ordering(r: &StudyReport) -> (bool, String) {
    let e = |l: &str| r.method(l).and_then(|m| m.errors).unwrap();
    let (da, dda, lc) = (e("ut-da"), e("ut-dda"), e("lincov-direct"));
    let ordered = da.mean < dda.mean && dda.mean < lc.mean && da.covariance < dda.covariance && dda.covariance < lc.covariance;
    let pass = ordered && da.mean < 1e-6 && (3e-3..=3e-2).contains(&lc.covariance);
    (
        pass,
        format!(
            "mean DA {:.3e} < DDA {:.3e} < LC {:.3e}; cov DA {:.3e} < DDA {:.3e} < LC {:.3e}",
            da.mean, dda.mean, lc.mean, da.covariance, dda.covariance, lc.covariance
        ),
    )
}

fn c6_nominal(r: &StudyReport) -> (bool, String) {
    let d = |n: &str| r.diagnostic(n).unwrap();
    let (tf, ef, ha, ei) = (d("flight_time"), d("exit_eccentricity"), d("apoapsis_altitude"), d("inbound_eccentricity"));
    (
        within(tf, 239.7, 1.0) && within(ef, 0.3698, 1e-3) && within(ha, 7.60e3, 50.0) && within(ei, 1.1009, 1e-3),
        format!("flight {tf:.2} s, e_exit {ef:.5}, apoapsis alt {ha:.1} km, e_in {ei:.5}"),
    )
}

fn c7_coverage(reports: &[StudyReport]) -> (bool, String) {
    let expected = [(3, [87.4, 98.0, 99.3]), (4, [88.4, 98.0, 99.4]), (5, [88.8, 98.0, 99.6])];
    let triple = |r: &StudyReport| {
        [
            r.coverage_of("lincov-direct", ContourKind::Ellipse).unwrap(),
            r.coverage_of("cut4-direct", ContourKind::Ellipse).unwrap(),
            r.coverage_of("cut4-direct", ContourKind::Banana).unwrap(),
        ]
        .map(|c| 100.0 * c)
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for (case, want) in expected {
        let got = triple(&reports[case - 1]);
        let ok = got.iter().zip(want).all(|(g, w)| within(*g, w, 2.0));
        pass &= ok;
        parts.push(format!(
            "case {case} {:.2}/{:.2}/{:.2} vs {}/{}/{}{}",
            got[0],
            got[1],
            got[2],
            want[0],
            want[1],
            want[2],
            if ok { "" } else { " [off]" }
        ));
    }
    let banana_wins = reports.iter().all(|r| {
        let t = triple(r);
        t[2] > t[0]
    });
    pass &= banana_wins;
    parts.push(format!("banana > LinCov in all 7 cases: {banana_wins}"));
    (pass, parts.join("; "))
}

fn c8_gaussian_ellipse() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pts: Vec<Point> = (0..100_000).map(|_| [rng.sample(StandardNormal), rng.sample(StandardNormal)]).collect();
    let curve = gaussian_ellipse([0.0, 0.0], &Matrix::identity(2), 3.0, 720).unwrap();
    let c = 100.0 * coverage(&curve, &pts).unwrap();
    (within(c, 98.89, 0.3), format!("k=3 coverage {c:.3}% of 1e5 samples"))
}

fn c9_speedup(r: &StudyReport) -> (bool, String) {
    let secs = |l: &str| r.method(l).unwrap().eval_seconds;
    let n = r.method("mc-direct").unwrap().evaluations as f64;
    let build = |l: &str| r.construction.iter().find(|t| t.label == l).unwrap().seconds;
    let (direct, da, dda) = (secs("mc-direct"), secs("mc-da"), secs("mc-dda"));
    let break_even = |eval: f64, b: f64| b / ((direct - eval) / n);
    let (be_da, be_dda) = (break_even(da, build("da")), break_even(dda, build("dda")));
    let pass = n >= 1e4
        && direct >= 10.0 * da
        && direct >= 10.0 * dda
        && dda < da
        && (0.0..=1e4).contains(&be_da)
        && (0.0..=1e4).contains(&be_dda);
    (
        pass,
        format!(
            "{n:.0} samples: direct/DA {:.1}x, direct/DDA {:.1}x, DDA {:.2e} s < DA {:.2e} s; break-even DA {be_da:.0}, DDA {be_dda:.0}",
            direct / da,
            direct / dda,
            dda,
            da
        ),
    )
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let a = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    a.matmul(&a.transpose()).unwrap().add(&Matrix::identity(n).scale(0.1)).unwrap()
}

fn random_poly(rng: &mut ChaCha8Rng, ctx: &PolyContext) -> TruncatedPolynomial {
    let terms: Vec<_> = ctx.monomials().iter().map(|m| (m.clone(), rng.random_range(-2.0..2.0))).collect();
    TruncatedPolynomial::from_terms(ctx, terms).unwrap()
}

fn max_diff(a: &TruncatedPolynomial, b: &TruncatedPolynomial) -> f64 {
    a.coefficients().iter().zip(b.coefficients()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn rel(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).unwrap().max_abs() / b.max_abs()
}

fn vec_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn c10_properties() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut ring, mut sigma, mut split_m, mut split_p, mut banana, mut pce) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let ctx = PolyContext::new(3, 4).unwrap();
    for _ in 0..32 {
        let (a, b, c) = (random_poly(&mut rng, &ctx), random_poly(&mut rng, &ctx), random_poly(&mut rng, &ctx));
        ring = ring
            .max(max_diff(&(&a * &b), &(&b * &a)))
            .max(max_diff(&(&(&a * &b) * &c), &(&a * &(&b * &c))) / 1e2)
            .max(max_diff(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))) / 1e2)
            .max(max_diff(&(&a * &ctx.constant(1.0)), &a))
            .max(max_diff(&(&(&a + &b) + &c), &(&a + &(&b + &c))));
    }
    for _ in 0..32 {
        let n = rng.random_range(2..=6);
        let mean: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = GaussianBelief::new(mean.clone(), random_spd(&mut rng, n)).unwrap();
        let id = LinearPropagator::identity(n);
        let (_, m) = ut_run(&id, &b, &UtParams::classic(n)).unwrap();
        sigma = sigma.max(vec_diff(&m.mean, &mean)).max(rel(&m.cov, b.covariance()));

        let mix = gmm_split(&b, 4, 0.5).unwrap().moments();
        split_m = split_m.max(vec_diff(&mix.mean, &mean));
        split_p = split_p.max(rel(&mix.cov, b.covariance()));

        let a = Matrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
        let xf: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lin = LinearPropagator::new(xf.clone(), a.clone()).unwrap();
        let lc = lincov(&xf, &a, &b).unwrap();
        let p = pce_moments(&pce_fit(&lin, &b, 2, 2.0, 7).unwrap(), 2, 7).unwrap();
        let scale = lc.cov.max_abs().max(1e-3);
        pce = pce.max(vec_diff(&p.mean, &lc.mean)).max(p.cov.sub(&lc.cov).unwrap().max_abs() / scale);
    }
    for _ in 0..32 {
        let s = random_spd(&mut rng, 2);
        let mu = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let k = rng.random_range(0.5..4.0);
        let e = gaussian_ellipse(mu, &s, k, 360).unwrap();
        let bc = banana_contour(mu, &s, &ProjectedMoments::GAUSSIAN, k, 360).unwrap();
        let scale = s.max_abs().sqrt() * k;
        let d = e.points().iter().zip(bc.points()).map(|(p, q)| (p[0] - q[0]).abs().max((p[1] - q[1]).abs())).fold(0.0, f64::max);
        banana = banana.max(d / scale);
    }
    let pass = ring < 1e-12 && sigma < 1e-12 && split_m < 1e-14 && split_p < 1e-12 && banana < 1e-12 && pce < 1e-10;
    (
        pass,
        format!(
            "ring {ring:.1e}, sigma {sigma:.1e}, GMM split mean {split_m:.1e} cov {split_p:.1e}, banana->ellipse {banana:.1e}, PCE linear {pce:.1e}"
        ),
    )
}

fn main() {
    let mut out: Vec<Outcome> = Vec::new();
    let mut record = |id: usize, title: &'static str, start: Instant, (pass, detail): (bool, String)| {
        let o = Outcome { id, pass, title, detail, seconds: start.elapsed().as_secs_f64() };
        let status = match (o.pass, KNOWN_RED.contains(&o.id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {:>2} {status}: {} | {} [{:.1} s]", o.id, o.title, o.detail, o.seconds);
        out.push(o);
    };

    let halo_cfg = scenario("halo_l2.toml");
    let t = Instant::now();
    let halo = cr3bp_scenario(&halo_cfg).expect("halo reference");
    let halo_setup = t.elapsed().as_secs_f64();

    let t = Instant::now();
    record(1, "monomial counts", t, c1_monomial_counts(&halo));
    let t = Instant::now();
    record(2, "CUT4 exactness", t, c2_cut4_exactness());

    let t = Instant::now();
    let halo_report = run_study(&halo_cfg, halo.clone()).expect("halo study");
    let study_seconds = t.elapsed().as_secs_f64();
    record(3, "halo reconstruction", Instant::now(), c3_halo(&halo_report));
    let t = Instant::now();
    record(4, "flow-map convergence", t, c4_convergence(&halo));
    record(5, "UT error ordering", Instant::now(), c5_error_ordering(&halo_report));

    let t = Instant::now();
    let cases: Vec<StudyReport> = (1..=7)
        .map(|i| run_scenario(&scenario(&format!("aerocapture_case{i}.toml"))).expect("aerocapture study"))
        .collect();
    let cases_seconds = t.elapsed().as_secs_f64();
    record(6, "aerocapture nominal", Instant::now(), c6_nominal(&cases[0]));
    record(7, "aerocapture contour coverage", Instant::now(), c7_coverage(&cases));

    let t = Instant::now();
    record(8, "Gaussian ellipse coverage", t, c8_gaussian_ellipse());
    record(9, "mapped Monte Carlo speedup", Instant::now(), c9_speedup(&halo_report));
    let t = Instant::now();
    record(10, "property suites", t, c10_properties());

    let passed = out.iter().filter(|o| o.pass).count();
    let known: Vec<usize> = out.iter().filter(|o| !o.pass && KNOWN_RED.contains(&o.id)).map(|o| o.id).collect();
    let unexpected: Vec<usize> = out.iter().filter(|o| !o.pass && !KNOWN_RED.contains(&o.id)).map(|o| o.id).collect();
    println!(
        "acceptance: {passed}/{} passed; known failures {known:?}; unexpected failures {unexpected:?} (halo setup {halo_setup:.1} s, halo study {study_seconds:.1} s, aerocapture cases {cases_seconds:.1} s)",
        out.len()
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
