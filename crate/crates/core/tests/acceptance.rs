//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p roy-detect --test acceptance`. The Monte Carlo
//! criteria at m = 200 take several minutes on one core.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use roy_detect::asymptotic::{asymptotic_power, edge_params, spike_params, tw2_cdf, HighDimParams};
use roy_detect::detector::{pd, roc_closed_form_nm, roc_curve, threshold_for_pfa, DetectorConfig};
use roy_detect::fdist::{central_lmax_cdf, noncentral_lmax_cdf, ModelDims};
use roy_detect::montecarlo::{detection_experiment, empirical_cdf, highdim_experiment, RngSpec, Statistic};
use roy_detect::specfun::{
    gauss_legendre, hyp1f1, hyp2f1_terminating, hyp2f2, jacobi_p, ln_factorial, pochhammer, q_function,
};
use roy_detect::SeriesControl;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn dims(m: usize, n: usize, p: usize) -> ModelDims {
    ModelDims::new(m, n, p).expect("valid dimensions")
}

const MC_TRIALS: usize = 20_000;
const KS_LIMIT: f64 = 0.015;
const TRIPLES: [(usize, usize, usize); 3] = [(4, 8, 6), (2, 4, 8), (6, 8, 4)];

fn ks_case(d: &ModelDims, theta: f64, seed: u64) -> (f64, Duration) {
    let start = Instant::now();
    let e = empirical_cdf(d, theta, MC_TRIALS, &RngSpec::new(seed, 0), Statistic::Raw).expect("sampling");
    let ctl = SeriesControl::default();
    let ks = e
        .try_ks_distance(|t| {
            if theta == 0.0 {
                central_lmax_cdf(d, t)
            } else {
                noncentral_lmax_cdf(d, theta, t, &ctl)
            }
        })
        .expect("analytic CDF");
    (ks, start.elapsed())
}

fn criterion_1() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, &(m, n, p)) in TRIPLES.iter().enumerate() {
        let (ks, took) = ks_case(&dims(m, n, p), 0.0, 100 + k as u64);
        ok &= ks <= KS_LIMIT && took <= Duration::from_secs(120);
        parts.push(format!("({m},{n},{p}) KS={ks:.4} in {:.1}s", took.as_secs_f64()));
    }
    outcome(ok, format!("central CDF vs MC, limit {KS_LIMIT}: {}", parts.join("; ")))
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, &(m, n, p)) in TRIPLES.iter().enumerate() {
        for (j, &theta) in [1.0, 10.0, 50.0].iter().enumerate() {
            let (ks, _) = ks_case(&dims(m, n, p), theta, 200 + 10 * k as u64 + j as u64);
            ok &= ks <= KS_LIMIT;
            parts.push(format!("({m},{n},{p}) θ={theta} KS={ks:.4}"));
        }
    }
    outcome(ok, format!("non-central CDF vs MC, limit {KS_LIMIT}: {}", parts.join("; ")))
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 2..=4usize {
        for p in [m, m + 2] {
            let d = dims(m, m, p);
            for k in 0..100 {
                let t = 10f64.powf(-2.0 + 4.0 * k as f64 / 99.0);
                let want = (t / (1.0 + t)).powi((m * p) as i32);
                let got = central_lmax_cdf(&d, t).expect("central CDF");
                worst = worst.max(((got - want) / want).abs());
            }
        }
    }
    outcome(worst <= 1e-12, format!("n = m reduction, max relative error {worst:.2e} (limit 1e-12)"))
}

fn criterion_4() -> Outcome {
    let ctl = SeriesControl::default();
    let pf: Vec<f64> = (1..=19).map(|k| 0.05 * k as f64).collect();
    let mut worst: f64 = 0.0;
    for m in [1usize, 2, 4] {
        for p in [m, m + 4] {
            for gamma in [5.0, 20.0] {
                let cfg = DetectorConfig::new(dims(m, m, p), gamma).expect("config");
                for pt in roc_curve(&cfg, &pf).expect("pipeline ROC") {
                    let closed = roc_closed_form_nm(m, p, gamma, pt.pf, &ctl).expect("closed form");
                    worst = worst.max((closed - pt.pd).abs());
                }
            }
        }
    }
    outcome(worst <= 1e-8, format!("closed-form vs pipeline P_D, max abs diff {worst:.2e} (limit 1e-8)"))
}

fn criterion_5() -> Outcome {
    let mut analytic = Vec::new();
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, m) in [4usize, 8, 12].into_iter().enumerate() {
        let cfg = DetectorConfig::new(dims(m, 12, 10), 20.0).expect("config");
        let xi = threshold_for_pfa(&cfg.dims, 0.1).expect("threshold");
        let p_d = pd(&cfg, xi).expect("pd");
        let mc = detection_experiment(&cfg, xi, MC_TRIALS, &RngSpec::new(500 + k as u64, 0)).expect("MC");
        ok &= (mc.pd_hat - p_d).abs() <= 0.015 && (mc.pf_hat - 0.1).abs() <= 0.015;
        parts.push(format!("m={m}: P_D={p_d:.4}, MC P_D={:.4}, MC P_F={:.4}", mc.pd_hat, mc.pf_hat));
        analytic.push(p_d);
    }
    let decreasing = analytic.windows(2).all(|w| w[1] < w[0]);
    outcome(
        ok && decreasing,
        format!("n=12, p=10, γ=20, P_F=0.1, decreasing={decreasing}: {}", parts.join("; ")),
    )
}

fn criterion_6() -> Outcome {
    let d = dims(4, 8, 6);
    let ctl = SeriesControl::default();
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let t = 10f64.powf(-3.0 + 6.0 * k as f64 / 199.0);
        let a = noncentral_lmax_cdf(&d, 1e-4, t, &ctl).expect("non-central");
        let b = central_lmax_cdf(&d, t).expect("central");
        worst = worst.max((a - b).abs());
    }
    outcome(worst <= 1e-3, format!("sup |F(θ=1e-4) − F_central| = {worst:.2e} (limit 1e-3)"))
}

const HD_M: usize = 200;
const HD_H0_TRIALS: usize = 5000;

fn criteria_7_and_8() -> (Outcome, Outcome) {
    let start = Instant::now();
    let h = HighDimParams::new(0.25, 0.5, 0.0).expect("params");
    let e = edge_params(&h).expect("edge");
    let run = highdim_experiment(&h, HD_M, HD_H0_TRIALS, 0.05, &RngSpec::new(700, 0)).expect("high-dim run");
    let took = start.elapsed();
    let mean = run.lambda_hat.mean();
    let sd = run.lambda_hat.std_dev();
    let sd_pred = e.sigma0 * 0.9018 * (HD_M as f64).powf(-2.0 / 3.0);
    let mean_rel = (mean - e.mu) / e.mu;
    let sd_rel = (sd - sd_pred) / sd_pred;
    let c7 = outcome(
        mean_rel.abs() <= 0.02 && sd_rel.abs() <= 0.25 && took <= Duration::from_secs(600),
        format!(
            "m={HD_M} (n={}, p={}), {HD_H0_TRIALS} H0 trials in {:.0}s: mean {mean:.4} vs μ={:.4} ({:+.2}%, limit ±2%); sd {sd:.4} vs σ₀·0.9018·m^(-2/3)={sd_pred:.4} ({:+.1}%, limit ±25%)",
            run.dims.n,
            run.dims.p,
            took.as_secs_f64(),
            e.mu,
            100.0 * mean_rel,
            100.0 * sd_rel
        ),
    );
    let ks = run.t_samples.ks_distance(tw2_cdf);
    let c8 = outcome(
        ks <= 0.05,
        format!(
            "KS(standardized H0 statistic, TW2) = {ks:.4} (limit 0.05); mean t = {:.3} vs TW2 mean -1.771",
            run.t_samples.mean()
        ),
    );
    (c7, c8)
}

fn criterion_9() -> Outcome {
    let h = HighDimParams::new(0.25, 0.5, 5.0).expect("params");
    let s = spike_params(&h).expect("spike");
    let nu = s.nu().expect("supercritical");
    let run = highdim_experiment(&h, HD_M, 2000, 0.05, &RngSpec::new(900, 0)).expect("high-dim run");
    let mean = run.lambda_hat.mean();
    let rel = (mean - nu) / nu;
    let asym = asymptotic_power(&h, HD_M, 0.05).expect("power");
    let powers: Vec<f64> = [50, 100, 200, 400]
        .iter()
        .map(|&m| asymptotic_power(&h, m, 0.05).expect("power"))
        .collect();
    let monotone = powers.windows(2).all(|w| w[1] > w[0]);
    let ok = rel.abs() <= 0.02 && (run.empirical_power - asym).abs() <= 0.03 && monotone;
    outcome(
        ok,
        format!(
            "γ̄=5, m={HD_M}, 2000 trials: mean {mean:.4} vs ν={nu} ({:+.2}%), power MC {:.4} vs asymptotic {asym:.4}; P_D over m=50,100,200,400: {:?} (strictly increasing={monotone})",
            100.0 * rel,
            run.empirical_power,
            powers.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>()
        ),
    )
}

fn criterion_10() -> Outcome {
    let h = HighDimParams::new(0.25, 0.5, 1.0).expect("params");
    let run = highdim_experiment(&h, HD_M, 2000, 0.05, &RngSpec::new(1000, 0)).expect("high-dim run");
    let rate = run.empirical_power;
    outcome(
        (rate - 0.05).abs() <= 0.02,
        format!("γ̄=1 < γ̄_p, m={HD_M}, 2000 trials: rejection rate {rate:.4} (target 0.05 ± 0.02)"),
    )
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn to_f64(r: &BigRational) -> f64 {
    // Scale so that numerator and denominator both convert without overflow.
    let (n, d) = (r.numer(), r.denom());
    let shift = (n.bits() as i64).max(d.bits() as i64) - 900;
    if shift > 0 {
        let s = shift as usize;
        (n >> s).to_f64().unwrap() / (d >> s).to_f64().unwrap()
    } else {
        r.to_f64().unwrap()
    }
}

/// Worst error per specfun operation, each over 100 random points.
fn criterion_11() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(1111);
    let ctl = SeriesControl::default();
    let mut report: Vec<(&str, f64, f64)> = Vec::new();

    // ln k! against exact big-integer factorials.
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k: u64 = rng.random_range(0..3000);
        let mut f = num_bigint::BigUint::one();
        for j in 2..=k {
            f *= j;
        }
        let bits = f.bits();
        let exact = if bits <= 60 {
            f.to_f64().unwrap().ln()
        } else {
            let s = bits - 60;
            (&f >> s).to_f64().unwrap().ln() + s as f64 * std::f64::consts::LN_2
        };
        worst = worst.max((ln_factorial(k) - exact).abs() / exact.max(1.0));
    }
    report.push(("ln_factorial", worst, 1e-13));

    // (a)_k against exact rational products, a = num/2.
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let num: i64 = rng.random_range(1..40);
        let k: u64 = rng.random_range(0..30);
        let mut exact = BigRational::one();
        for i in 0..k {
            exact *= rat(num + 2 * i as i64, 2);
        }
        let want = to_f64(&exact);
        worst = worst.max(((pochhammer(num as f64 / 2.0, k).to_f64() - want) / want).abs());
    }
    report.push(("pochhammer", worst, 1e-13));

    // ₁F₁ against its Euler integral.
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a: f64 = rng.random_range(1.0..4.0);
        let b = a + rng.random_range(1.0..4.0);
        let x: f64 = rng.random_range(-10.0..10.0);
        let pre = (libm::lgamma(b) - libm::lgamma(a) - libm::lgamma(b - a)).exp();
        // Tanh-sinh quadrature: the endpoint powers are fractional, which Gauss-Legendre resolves poorly.
        let h = 1.0 / 64.0;
        let oracle = pre
            * (-320..=320)
                .map(|k| {
                    let u = k as f64 * h;
                    let s = std::f64::consts::PI * u.sinh();
                    let (t, one_minus_t) = (1.0 / (1.0 + (-s).exp()), 1.0 / (1.0 + s.exp()));
                    let weight = h * std::f64::consts::PI * u.cosh() * t * one_minus_t;
                    weight * (x * t).exp() * t.powf(a - 1.0) * one_minus_t.powf(b - a - 1.0)
                })
                .sum::<f64>();
        let got = hyp1f1(a, b, x, &ctl).unwrap().to_f64();
        worst = worst.max(((got - oracle) / oracle).abs());
    }
    report.push(("hyp1f1", worst, 1e-10));

    // ₂F₂(a, s; b, s+1; x) = s ∫₀¹ t^{s−1} ₁F₁(a; b; xt) dt.
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a: f64 = rng.random_range(1.0..10.0);
        let b: f64 = rng.random_range(1.0..6.0);
        let s = rng.random_range(1..8) as f64;
        let x: f64 = rng.random_range(0.0..30.0);
        let f = |t: f64| t.powf(s - 1.0) * hyp1f1(a, b, x * t, &ctl).unwrap().to_f64();
        let oracle = s * (gauss_legendre(f, 0.0, 0.5, 100) + gauss_legendre(f, 0.5, 1.0, 100));
        let got = hyp2f2(a, s, b, s + 1.0, x, &ctl).unwrap().to_f64();
        worst = worst.max(((got - oracle) / oracle).abs());
    }
    report.push(("hyp2f2", worst, 1e-10));

    // Terminating ₂F₁ against exact rational sums, and its degree.
    let mut worst: f64 = 0.0;
    let mut worst_degree: f64 = 0.0;
    for _ in 0..100 {
        let alpha: u32 = rng.random_range(0..20);
        let bn: i64 = rng.random_range(1..60);
        let cn = bn + rng.random_range(1..20);
        let xn: i64 = rng.random_range(-99..100);
        let (b, c, x) = (rat(bn, 2), rat(cn, 2), rat(xn, 100));
        let mut term = BigRational::one();
        let mut sum = BigRational::zero();
        let mut abs_sum = BigRational::zero();
        for k in 0..=alpha as i64 {
            sum += &term;
            abs_sum += if term < BigRational::zero() { -term.clone() } else { term.clone() };
            term = term * rat(k - alpha as i64, 1) * (&b + rat(k, 1)) / ((&c + rat(k, 1)) * rat(k + 1, 1)) * &x;
        }
        let got = hyp2f1_terminating(alpha, bn as f64 / 2.0, cn as f64 / 2.0, xn as f64 / 100.0).unwrap();
        worst = worst.max((got - to_f64(&sum)).abs() / to_f64(&abs_sum));
        // A polynomial of degree α has vanishing (α+1)-th differences.
        let h = 0.05;
        let vals: Vec<f64> = (0..=alpha + 1)
            .map(|j| hyp2f1_terminating(alpha, bn as f64 / 2.0, cn as f64 / 2.0, -0.5 + h * j as f64).unwrap())
            .collect();
        let mut diff = vals.clone();
        for _ in 0..=alpha {
            diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
        }
        let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max) * 2f64.powi(alpha as i32 + 1);
        worst_degree = worst_degree.max(diff[0].abs() / scale);
    }
    report.push(("hyp2f1_terminating", worst, 1e-12));
    report.push(("hyp2f1_terminating degree", worst_degree, 1e-12));

    // Jacobi polynomials against the explicit binomial sum.
    let binom = |r: &BigRational, j: i64| -> BigRational {
        let mut acc = BigRational::one();
        for i in 0..j {
            acc = acc * (r - rat(i, 1)) / rat(i + 1, 1);
        }
        acc
    };
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n: i64 = rng.random_range(0..25);
        let (an, bn) = (rng.random_range(-1..12), rng.random_range(-1..12));
        let zn: i64 = rng.random_range(-64..=64);
        let (a, b, z) = (rat(an, 2), rat(bn, 2), rat(zn, 64));
        let (zm, zp) = ((&z - rat(1, 1)) / rat(2, 1), (&z + rat(1, 1)) / rat(2, 1));
        let mut sum = BigRational::zero();
        for k in 0..=n {
            let mut t = binom(&(&a + rat(n, 1)), n - k) * binom(&(&b + rat(n, 1)), k);
            for _ in 0..k {
                t *= &zm;
            }
            for _ in 0..n - k {
                t *= &zp;
            }
            sum += t;
        }
        let want = to_f64(&sum);
        let got = jacobi_p(n as u32, an as f64 / 2.0, bn as f64 / 2.0, zn as f64 / 64.0).to_f64();
        worst = worst.max((got - want).abs() / want.abs().max(1.0));
    }
    report.push(("jacobi_p", worst, 1e-11));

    // Q(x) against quadrature of the normal density.
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x: f64 = rng.random_range(-5.0..8.0);
        let phi = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let oracle: f64 = (0..8).map(|k| gauss_legendre(phi, x + 1.5 * k as f64, x + 1.5 * (k + 1) as f64, 40)).sum();
        worst = worst.max(((q_function(x) - oracle) / oracle).abs());
    }
    report.push(("q_function", worst, 1e-12));

    // Gauss–Legendre is exact for degree ≤ 2n−1.
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let nodes: usize = rng.random_range(2..40);
        let coef: Vec<f64> = (0..2 * nodes).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (lo, hi): (f64, f64) = (rng.random_range(-2.0..0.0), rng.random_range(0.5..2.0));
        let poly = |x: f64| coef.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let exact: f64 = coef
            .iter()
            .enumerate()
            .map(|(k, c)| c * (hi.powi(k as i32 + 1) - lo.powi(k as i32 + 1)) / (k + 1) as f64)
            .sum();
        let scale: f64 = coef.iter().map(|c| c.abs()).sum::<f64>() * 2f64.powi(2 * nodes as i32) * (hi - lo);
        worst = worst.max((gauss_legendre(poly, lo, hi, nodes) - exact).abs() / scale);
    }
    report.push(("gauss_legendre", worst, 1e-13));

    let ok = report.iter().all(|(_, err, tol)| err <= tol);
    let parts: Vec<String> = report
        .iter()
        .map(|(name, err, tol)| format!("{name} {err:.1e}/{tol:.0e}"))
        .collect();
    outcome(ok, format!("100 random points per op, worst error/limit: {}", parts.join(", ")))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = roy_detect::cli::run(std::iter::once("roy-detect").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let base = ["simulate", "--m", "4", "--n", "8", "--p", "6", "--theta", "10", "--trials", "20000", "--seed", "42", "--ks-against", "analytic"];
    let mut codes = Vec::new();
    let mut files = Vec::new();
    for (name, threads) in [("a.csv", None), ("b.csv", None), ("c.csv", Some("1")), ("d.csv", Some("4"))] {
        let p = path(name);
        let mut args: Vec<&str> = Vec::new();
        if let Some(t) = threads {
            args.extend(["--threads", t]);
        }
        args.extend(base);
        args.extend(["--out", p.as_str()]);
        codes.push(run_cli(&args).0);
        files.push(std::fs::read(&p).unwrap_or_default());
    }
    let identical = files.windows(2).all(|w| w[0] == w[1]) && !files[0].is_empty();
    let ok = codes.iter().all(|&c| c == 0) && identical;
    outcome(
        ok,
        format!(
            "simulate twice, then with 1 and 4 threads: exit codes {codes:?}, {} bytes each, byte-identical={identical}",
            files[0].len()
        ),
    )
}

fn main() {
    // ROY_ACCEPT_ONLY=3,11 restricts the run to the listed criteria.
    let only: Option<Vec<usize>> = std::env::var("ROY_ACCEPT_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let wanted = |n: usize| only.as_ref().map_or(true, |o| o.contains(&n));
    let mut lines: Vec<(usize, Outcome, Duration)> = Vec::new();
    let timed = |n: usize, f: &dyn Fn() -> Outcome, lines: &mut Vec<(usize, Outcome, Duration)>| {
        if !wanted(n) {
            return;
        }
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        println!("criterion {n:>2}: {} ({:.1}s) {}", if o.passed { "PASS" } else { "FAIL" }, took.as_secs_f64(), o.detail);
        lines.push((n, o, took));
    };
    timed(1, &criterion_1, &mut lines);
    timed(2, &criterion_2, &mut lines);
    timed(3, &criterion_3, &mut lines);
    timed(4, &criterion_4, &mut lines);
    timed(5, &criterion_5, &mut lines);
    timed(6, &criterion_6, &mut lines);
    if wanted(7) || wanted(8) {
        let start = Instant::now();
        let (c7, c8) = criteria_7_and_8();
        let took = start.elapsed();
        for (n, o) in [(7, c7), (8, c8)] {
            println!("criterion {n:>2}: {} ({:.1}s, shared H0 run) {}", if o.passed { "PASS" } else { "FAIL" }, took.as_secs_f64(), o.detail);
            lines.push((n, o, took));
        }
    }
    timed(9, &criterion_9, &mut lines);
    timed(10, &criterion_10, &mut lines);
    timed(11, &criterion_11, &mut lines);
    timed(12, &criterion_12, &mut lines);
    let failed: Vec<usize> = lines.iter().filter(|(_, o, _)| !o.passed).map(|(n, _, _)| *n).collect();
    println!("acceptance: {} of {} criteria passed; failed: {:?}", lines.len() - failed.len(), lines.len(), failed);
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
