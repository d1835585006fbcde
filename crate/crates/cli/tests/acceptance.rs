//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs with `harness = false` so the lines always reach stdout.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use superfid::eigendensities::{
    c_bures_quadrature, c_g_exact, c_g_jensen_bound, c_g_monte_carlo, c_g_quadrature, c_g_series,
    cdf_g2, density_g_unnormalized, density_grid_qutrit, inverse_mixedness_mean_hs,
    purity_mean_hs, purity_variance_hs, MomentSource, SeriesTail,
};
use superfid::qstate::{purity, spectrum};
use superfid::samplers::{
    audit_envelope, rejection_constant_c, sample_batch, sample_bures, sample_g_qubit, sample_hs,
    sup_density_ratio_unnormalized,
};
use superfid::similarity::{
    dist_g, dist_g_sq, fd_line_element, fidelity, line_element_bprime, line_element_g,
    superfidelity,
};
use superfid::statlab::{chi_square_simplex3, ks_test, ks_two_sample, mc_mean, mc_variance};
use superfid::{DensityMatrix, MeasureKind, Result, RngStream, TangentDirection};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn hs_states(dim: usize, n: usize, rng: &mut RngStream) -> Result<Vec<DensityMatrix>> {
    (0..n).map(|_| sample_hs(dim, rng)).collect()
}

fn qubit_fidelity_equals_superfidelity() -> Result<Outcome> {
    let mut rng = RngStream::new(101, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = hs_states(2, 2, &mut rng)?;
        worst = worst.max((fidelity(&s[0], &s[1])? - superfidelity(&s[0], &s[1])?).abs());
    }
    outcome(worst <= 1e-9, format!("1000 pairs, max |F-G| = {worst:.3e} (tol 1e-9)"))
}

fn fidelity_bounded_by_superfidelity() -> Result<Outcome> {
    let mut rng = RngStream::new(102, 0);
    let mut excess = f64::NEG_INFINITY;
    for n in 3..=5 {
        for _ in 0..1000 {
            let s = hs_states(n, 2, &mut rng)?;
            excess = excess.max(fidelity(&s[0], &s[1])? - superfidelity(&s[0], &s[1])?);
        }
    }
    outcome(excess <= 1e-9, format!("N=3..5, 1000 pairs each, max F-G = {excess:.3e} (tol 1e-9)"))
}

fn g_distance_is_metric() -> Result<Outcome> {
    let mut rng = RngStream::new(103, 0);
    let mut slack = f64::NEG_INFINITY;
    let mut self_dist: f64 = 0.0;
    for n in 2..=4 {
        for _ in 0..10_000 {
            let s = hs_states(n, 3, &mut rng)?;
            let (ab, bc, ac) = (dist_g(&s[0], &s[1])?, dist_g(&s[1], &s[2])?, dist_g(&s[0], &s[2])?);
            slack = slack.max(ac - ab - bc).max(ab - ac - bc).max(bc - ab - ac);
            self_dist = self_dist.max(dist_g(&s[0], &s[0])?);
        }
    }
    outcome(
        slack <= 1e-12 && self_dist <= 1e-10,
        format!("N=2..4, 1e4 triples each, max violation = {slack:.3e} (tol 1e-12), max d(r,r) = {self_dist:.3e} (tol 1e-10)"),
    )
}

fn line_elements() -> Result<Outcome> {
    let mut rng = RngStream::new(104, 0);
    let mut worst: f64 = 0.0;
    let mut coincide: f64 = 0.0;
    let (mut err_h, mut err_2h) = (0.0, 0.0);
    for n in 2..=3 {
        for _ in 0..100 {
            // Pull the state off the boundary so that rho ± 2h·drho stays positive.
            let raw = sample_hs(n, &mut rng)?;
            let rho = raw.mixture(&DensityMatrix::maximally_mixed(n)?, 0.9)?;
            let d = TangentDirection::random(n, &mut rng)?.scaled(0.1);
            let exact = line_element_g(&rho, &d)?.value();
            let e1 = (fd_line_element(dist_g_sq, &rho, &d, 1e-3)? - exact).abs();
            let e2 = (fd_line_element(dist_g_sq, &rho, &d, 2e-3)? - exact).abs();
            worst = worst.max(e1);
            err_h += e1;
            err_2h += e2;
            if n == 2 {
                coincide = coincide.max((exact - line_element_bprime(&rho, &d)?.value()).abs());
            }
        }
    }
    let ratio = err_2h / err_h;
    outcome(
        worst <= 1e-4 && (3.5..=4.5).contains(&ratio) && coincide <= 1e-8,
        format!(
            "max |FD-exact| = {worst:.3e} at h=1e-3 (tol 1e-4), error ratio h=2e-3/1e-3 = {ratio:.3} (expect ~4), qubit |G-B'| = {coincide:.3e} (tol 1e-8)"
        ),
    )
}

fn quadrature_constants() -> Result<Outcome> {
    let inv2 = 1.0 / c_g_quadrature(2)?.value;
    let d2 = (inv2 - PI / (2.0 * SQRT_2)).abs();
    let q3 = c_g_quadrature(3)?.value;
    let vs_quoted = ((1.0 / q3) - 1.0 / 1030.67).abs() * 1030.67;
    let vs_closed = (q3 - c_g_exact(3)?.value).abs() / c_g_exact(3)?.value;
    outcome(
        d2 <= 1e-6 && vs_quoted <= 1e-3 && vs_closed <= 1e-3,
        format!(
            "|1/C2 - pi/(2 sqrt2)| = {d2:.3e} (tol 1e-6); C3 = {q3:.10}, rel. diff vs 1030.67 = {vs_quoted:.3e}, vs closed form = {vs_closed:.3e} (tol 1e-3)"
        ),
    )
}

fn monte_carlo_inverse_mixedness() -> Result<Outcome> {
    let e = inverse_mixedness_mean_hs(2, 1_000_000, &RngStream::new(106, 0))?;
    let target = 3.0 * PI / (2.0 * SQRT_2);
    let dev = (e.mean - target).abs();
    outcome(
        dev <= 3.0 * e.std_error,
        format!("mean = {:.6}, target = {target:.6}, |diff| = {dev:.3e}, 3 SE = {:.3e}, discarded = {}", e.mean, 3.0 * e.std_error, e.discarded),
    )
}

fn jensen_bound_holds() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = vec![];
    for n in 2..=3 {
        let (c, b) = (c_g_quadrature(n)?.value, c_g_jensen_bound(n)?.value);
        ok &= c <= b;
        parts.push(format!("N={n}: {c:.6} <= {b:.6}"));
    }
    for n in 4..=5 {
        let est = c_g_monte_carlo(n, 1_000_000, &RngStream::new(107, n as u64))?;
        let se = est.std_error.unwrap_or(f64::INFINITY);
        let b = c_g_jensen_bound(n)?.value;
        ok &= est.value <= b + 3.0 * se;
        parts.push(format!("N={n}: {:.6e} (SE {se:.2e}) <= {b:.6e}", est.value));
    }
    outcome(ok, parts.join("; "))
}

fn purity_moments() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = vec![];
    for n in 2..=3 {
        let mut rng = RngStream::new(108, n as u64);
        let p: Vec<f64> = (0..1_000_000).map(|_| sample_hs(n, &mut rng).map(|r| purity(&r))).collect::<Result<_>>()?;
        let (m, se) = mc_mean(&p)?;
        let (v, vse) = mc_variance(&p)?;
        let (em, ev) = (purity_mean_hs(n)?, purity_variance_hs(n)?);
        let (zm, zv) = ((m - em) / se, (v - ev) / vse);
        ok &= zm.abs() <= 3.0 && zv.abs() <= 3.0;
        parts.push(format!("N={n}: mean {m:.6} vs {em:.6} (z={zm:.2}), var {v:.3e} vs {ev:.3e} (z={zv:.2})"));
    }
    outcome(ok, parts.join("; "))
}

fn series_estimate() -> Result<Outcome> {
    let rng = RngStream::new(109, 0);
    let s = c_g_series(2, 20, MomentSource::MonteCarlo { samples: 1_000_000, rng: &rng }, SeriesTail::PowerLaw)?;
    let c = s.estimate.value;
    let rel = (c - 0.900316).abs() / 0.900316;
    let monotone = s.partial_sums.windows(2).all(|w| w[1] >= w[0]);
    let raw = 1.0 / s.partial_sums[20];
    outcome(
        rel <= 0.01 && monotone,
        format!(
            "C2 = {c:.6} (rel. err {rel:.3e}, tol 1e-2), partial sums of 1/C monotone = {monotone}, uncorrected C = {raw:.6}, tail = {:.3e}",
            s.tail
        ),
    )
}

fn qubit_sampler() -> Result<Outcome> {
    let n = 100_000;
    let mut rng = RngStream::new(110, 0);
    let mut g = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for _ in 0..n {
        g.push(spectrum(&sample_g_qubit(&mut rng)?)?.as_slice()[0]);
    }
    for _ in 0..n {
        b.push(spectrum(&sample_bures(2, &mut rng)?)?.as_slice()[0]);
    }
    // Largest eigenvalue has CDF 2F(x) − 1 on [1/2, 1].
    let ks = ks_test(&g, |x| if x <= 0.5 { 0.0 } else { 2.0 * cdf_g2(x.min(1.0)).unwrap_or(1.0) - 1.0 })?;
    let two = ks_two_sample(&g, &b)?;
    let mid = cdf_g2(0.5)?;
    outcome(
        ks.p_value > 0.01 && two.p_value > 0.01 && mid == 0.5,
        format!("KS vs CDF p = {:.4}, two-sample KS vs Bures p = {:.4}, F(1/2) = {mid}", ks.p_value, two.p_value),
    )
}

fn qutrit_rejection_sampler() -> Result<Outcome> {
    let audit = audit_envelope(3, 100_000, &mut RngStream::new(111, 0))?;
    let audit_ok = audit.max_ratio <= audit.bound + 1e-9;
    let batch = sample_batch(MeasureKind::SuperfidelityG, 3, 100_000, 111, 8, None)?;
    let spectra: Vec<Vec<f64>> = batch.states.iter().map(|r| spectrum(r).map(|s| s.into_vec())).collect::<Result<_>>()?;
    let c3 = c_g_exact(3)?.value;
    let chi = chi_square_simplex3(&spectra, |l| c3 * density_g_unnormalized(l).unwrap_or(0.0), 10)?;
    let p: Vec<f64> = batch.states.iter().map(purity).collect();
    let (m, se) = mc_mean(&p)?;
    let z = (m - 0.6) / se;
    let rate = batch.report.map(|r| r.empirical_rate).unwrap_or(f64::NAN);
    outcome(
        audit_ok && chi.p_value > 0.01 && z > 5.0,
        format!(
            "audit max ratio = {:.10} vs bound {:.10}; chi2 p = {:.4}; mean purity = {m:.5} (z vs 0.6 = {z:.1}); acceptance = {rate:.4}",
            audit.max_ratio, audit.bound, chi.p_value
        ),
    )
}

fn rejection_constant() -> Result<Outcome> {
    let c3 = rejection_constant_c(3)?;
    let direct = c_g_jensen_bound(3)?.value / c_bures_quadrature(3)?.value * sup_density_ratio_unnormalized(3)?;
    let rel = (c3 - direct).abs() / direct;
    let cs: Vec<f64> = (3..=8).map(rejection_constant_c).collect::<Result<_>>()?;
    let increasing = cs.windows(2).all(|w| w[1] > w[0]);
    let shown: Vec<String> = cs.iter().map(|c| format!("{c:.4e}")).collect();
    outcome(
        rel <= 1e-6 && increasing,
        format!("c(3) = {c3:.9} (rel. diff {rel:.2e}, tol 1e-6); c(3..8) = [{}] increasing = {increasing}", shown.join(", ")),
    )
}

fn qutrit_grids() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = vec![];
    for m in [MeasureKind::SuperfidelityG, MeasureKind::Bures] {
        let g = density_grid_qutrit(400, m)?;
        let integral = g.integrate()?;
        let asym = g.max_permutation_asymmetry();
        ok &= (integral - 1.0).abs() <= 0.02 && asym <= 1e-12;
        parts.push(format!("{m}: integral = {integral:.5}, asymmetry = {asym:.1e}"));
    }
    outcome(ok, parts.join("; "))
}

fn run_cli(args: &[&str], dir: &Path, tag: &str) -> std::result::Result<(Vec<u8>, Vec<u8>), String> {
    let out_path = dir.join(format!("{tag}.out"));
    let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let flag = if args[0] == "verify" { "--report" } else { "--out" };
    full.push(flag.into());
    full.push(out_path.display().to_string());
    let out = Command::new(env!("CARGO_BIN_EXE_superfid"))
        .args(&full)
        .env_remove("SUPERFID_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("`superfid {}` exited with {}", args.join(" "), out.status));
    }
    let file = std::fs::read(&out_path).map_err(|e| e.to_string())?;
    Ok((out.stdout, file))
}

fn cli_deterministic() -> Result<Outcome> {
    let dir = tempfile::tempdir().map_err(|e| superfid::Error::InvalidArgument(e.to_string()))?;
    let commands: &[&[&str]] = &[
        &["sample", "--measure", "hs", "--dim", "3", "--count", "500", "--seed", "5", "--workers", "3", "--full-matrix"],
        &["sample", "--measure", "bures", "--dim", "4", "--count", "500", "--seed", "5", "--workers", "2", "--format", "json"],
        &["sample", "--measure", "g", "--dim", "2", "--count", "500", "--seed", "5", "--workers", "4"],
        &["sample", "--measure", "g", "--dim", "3", "--count", "500", "--seed", "5", "--workers", "4", "--format", "json"],
        &["estimate", "--dim", "3", "--method", "mc", "--samples", "200000", "--seed", "5", "--workers", "4"],
        &["estimate", "--dim", "2", "--method", "series", "--samples", "200000", "--seed", "5", "--workers", "3"],
        &["estimate", "--dim", "3", "--method", "quadrature"],
        &["grid", "--dim", "3", "--measure", "bures", "--resolution", "60"],
        &["verify", "metric", "--seed", "5"],
    ];
    let mut differing = vec![];
    let mut errors = vec![];
    for (i, args) in commands.iter().enumerate() {
        let first = run_cli(args, dir.path(), &format!("{i}a"));
        let second = run_cli(args, dir.path(), &format!("{i}b"));
        match (first, second) {
            (Ok(a), Ok(b)) => {
                if a != b {
                    differing.push(args.join(" "));
                }
            }
            (Err(e), _) | (_, Err(e)) => errors.push(e),
        }
    }
    outcome(
        differing.is_empty() && errors.is_empty(),
        format!(
            "{} commands run twice; differing = {:?}; errors = {:?}",
            commands.len(),
            differing,
            errors
        ),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);

fn main() {
    let criteria: [Criterion; 14] = [
        ("qubit fidelity equals superfidelity", qubit_fidelity_equals_superfidelity, Duration::from_secs(5)),
        ("fidelity bounded by superfidelity", fidelity_bounded_by_superfidelity, Duration::from_secs(10)),
        ("superfidelity distance is a metric", g_distance_is_metric, Duration::from_secs(30)),
        ("line elements", line_elements, Duration::from_secs(10)),
        ("normalization by quadrature", quadrature_constants, Duration::from_secs(30)),
        ("Monte-Carlo inverse mixedness", monte_carlo_inverse_mixedness, Duration::from_secs(30)),
        ("Jensen upper bound", jensen_bound_holds, Duration::from_secs(60)),
        ("HS purity mean and variance", purity_moments, Duration::from_secs(60)),
        ("series for the qubit constant", series_estimate, Duration::from_secs(30)),
        ("qubit inverse-CDF sampler", qubit_sampler, Duration::from_secs(30)),
        ("qutrit rejection sampler", qutrit_rejection_sampler, Duration::from_secs(600)),
        ("rejection constant", rejection_constant, Duration::from_secs(30)),
        ("qutrit density grids", qutrit_grids, Duration::from_secs(30)),
        ("CLI determinism", cli_deterministic, Duration::from_secs(60)),
    ];
    let mut failures = 0;
    for (k, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.2} s, budget {} s]",
            if passed { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
