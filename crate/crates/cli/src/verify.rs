//! Verification suites behind `superfid verify`.

use serde::Serialize;
use serde_json::json;
use superfid::eigendensities::{
    c_g_exact, c_g_jensen_bound, c_g_quadrature, c_hs, cdf_g2, density_g_unnormalized,
    density_grid_qutrit, purity_mean_hs, purity_variance_hs,
};
use superfid::qstate::{purity, spectrum};
use superfid::samplers::{
    hs_purity, sample_bures, sample_g_qubit, sample_hs, GRejectionSampler,
};
use superfid::similarity::{
    dist_g, dist_g_sq, fd_line_element, fidelity, line_element_bprime, line_element_g,
    superfidelity,
};
use superfid::statlab::{chi_square_simplex3, ks_test, ks_two_sample, mc_mean, mc_variance};
use superfid::{DensityMatrix, MeasureKind, Result, RngStream, TangentDirection};

use crate::commands::{emit, SCHEMA_VERSION};
use crate::{CliError, Suite, VerifyArgs};

#[derive(Debug, Serialize)]
struct Check {
    suite: &'static str,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(suite: &'static str, name: &'static str, passed: bool, detail: String) -> Check {
    Check { suite, name, passed, detail }
}

fn states(dim: usize, n: usize, rng: &mut RngStream) -> Result<Vec<DensityMatrix>> {
    (0..n).map(|_| sample_hs(dim, rng)).collect()
}

fn metric(seed: u64) -> Result<Vec<Check>> {
    let mut out = vec![];
    let mut rng = RngStream::new(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (a, b) = (sample_hs(2, &mut rng)?, sample_hs(2, &mut rng)?);
        worst = worst.max((fidelity(&a, &b)? - superfidelity(&a, &b)?).abs());
    }
    out.push(check("metric", "qubit_fidelity_equals_superfidelity", worst <= 1e-9, format!("max |F-G| = {worst:e}")));

    let mut excess = f64::NEG_INFINITY;
    for n in 3..=5 {
        for _ in 0..300 {
            let (a, b) = (sample_hs(n, &mut rng)?, sample_hs(n, &mut rng)?);
            excess = excess.max(fidelity(&a, &b)? - superfidelity(&a, &b)?);
        }
    }
    out.push(check("metric", "fidelity_below_superfidelity", excess <= 1e-9, format!("max F-G = {excess:e}")));

    let mut slack = f64::NEG_INFINITY;
    let mut self_dist: f64 = 0.0;
    for n in 2..=4 {
        for _ in 0..2000 {
            let s = states(n, 3, &mut rng)?;
            let (ab, bc, ac) = (dist_g(&s[0], &s[1])?, dist_g(&s[1], &s[2])?, dist_g(&s[0], &s[2])?);
            slack = slack.max(ac - ab - bc);
            self_dist = self_dist.max(dist_g(&s[0], &s[0])?);
        }
    }
    out.push(check("metric", "triangle_inequality", slack <= 1e-12, format!("max violation = {slack:e}")));
    out.push(check("metric", "zero_self_distance", self_dist <= 1e-10, format!("max d(rho,rho) = {self_dist:e}")));

    let mut fd_err: f64 = 0.0;
    let mut coincide: f64 = 0.0;
    for n in 2..=3 {
        for _ in 0..50 {
            let rho = sample_hs(n, &mut rng)?;
            let d = TangentDirection::random(n, &mut rng)?.scaled(0.1);
            let exact = line_element_g(&rho, &d)?.value();
            let fd = fd_line_element(dist_g_sq, &rho, &d, 1e-3)?;
            fd_err = fd_err.max((fd - exact).abs());
            if n == 2 {
                coincide = coincide.max((exact - line_element_bprime(&rho, &d)?.value()).abs());
            }
        }
    }
    out.push(check("metric", "line_element_finite_difference", fd_err <= 1e-4, format!("max error = {fd_err:e}")));
    out.push(check("metric", "qubit_line_elements_coincide", coincide <= 1e-8, format!("max difference = {coincide:e}")));
    Ok(out)
}

fn density() -> Result<Vec<Check>> {
    let mut out = vec![];
    let q2 = c_g_quadrature(2)?.value;
    let e2 = c_g_exact(2)?.value;
    out.push(check(
        "density",
        "qubit_constant_quadrature",
        (1.0 / q2 - 1.0 / e2).abs() <= 1e-6,
        format!("1/C = {} vs {}", 1.0 / q2, 1.0 / e2),
    ));
    let q3 = c_g_quadrature(3)?.value;
    let e3 = c_g_exact(3)?.value;
    let rel = (q3 - e3).abs() / e3;
    out.push(check("density", "qutrit_constant_quadrature", rel <= 1e-3, format!("C = {q3} vs {e3} (rel {rel:e})")));
    let mut ok = true;
    for n in 2..=8 {
        let b = c_g_jensen_bound(n)?.value;
        ok &= b < c_hs(n)?.value;
        if n <= 3 {
            ok &= c_g_exact(n)?.value <= b;
        }
    }
    out.push(check("density", "jensen_bound_consistent", ok, "N = 2..8".into()));
    let mid = cdf_g2(0.5)?;
    out.push(check("density", "qubit_cdf_midpoint", mid == 0.5, format!("F(1/2) = {mid}")));
    for m in [MeasureKind::SuperfidelityG, MeasureKind::Bures] {
        let g = density_grid_qutrit(200, m)?;
        let integral = g.integrate()?;
        let asym = g.max_permutation_asymmetry();
        out.push(check(
            "density",
            if m == MeasureKind::Bures { "bures_grid" } else { "g_grid" },
            (integral - 1.0).abs() <= 0.02 && asym <= 1e-12,
            format!("integral = {integral}, asymmetry = {asym:e}"),
        ));
    }
    Ok(out)
}

fn sampler(seed: u64) -> Result<Vec<Check>> {
    let mut out = vec![];
    let n = 20_000;
    let mut rng = RngStream::new(seed, 0);
    let mut g = Vec::with_capacity(n);
    for _ in 0..n {
        g.push(spectrum(&sample_g_qubit(&mut rng)?)?.as_slice()[0]);
    }
    let ks = ks_test(&g, |x| if x < 0.5 { 0.0 } else { 2.0 * cdf_g2(x.min(1.0)).unwrap_or(1.0) - 1.0 })?;
    out.push(check("sampler", "qubit_inverse_cdf", ks.p_value > 0.01, format!("KS p = {:.4}", ks.p_value)));
    let mut b = Vec::with_capacity(n);
    for _ in 0..n {
        b.push(spectrum(&sample_bures(2, &mut rng)?)?.as_slice()[0]);
    }
    let two = ks_two_sample(&g, &b)?;
    out.push(check("sampler", "qubit_g_equals_bures", two.p_value > 0.01, format!("KS p = {:.4}", two.p_value)));

    let rej = GRejectionSampler::new(3)?;
    let a = rej.audit();
    out.push(check(
        "sampler",
        "envelope_audit",
        a.max_ratio <= a.bound * (1.0 + 1e-9),
        format!("max ratio = {}, bound = {}", a.max_ratio, a.bound),
    ));
    let mut spectra = vec![];
    for _ in 0..10_000 {
        let (rho, _) = rej.sample(&mut rng, 10_000)?;
        spectra.push(spectrum(&rho)?.into_vec());
    }
    let c3 = c_g_exact(3)?.value;
    let chi = chi_square_simplex3(&spectra, |l| c3 * density_g_unnormalized(l).unwrap_or(0.0), 10)?;
    out.push(check("sampler", "qutrit_rejection_law", chi.p_value > 0.01, format!("chi2 p = {:.4}", chi.p_value)));
    Ok(out)
}

fn purity_suite(seed: u64, dim: usize) -> Result<Vec<Check>> {
    let rng = RngStream::new(seed, 0);
    let n = 200_000;
    let mut p = Vec::with_capacity(n);
    let mut r = rng.fork(0);
    for _ in 0..n {
        p.push(hs_purity(dim, &mut r)?);
    }
    let (m, se) = mc_mean(&p)?;
    let (v, vse) = mc_variance(&p)?;
    let (em, ev) = (purity_mean_hs(dim)?, purity_variance_hs(dim)?);
    let mut s = RngStream::new(seed, 1);
    let direct: Vec<f64> = (0..1000).map(|_| sample_hs(dim, &mut s).map(|x| purity(&x))).collect::<Result<_>>()?;
    let in_range = direct.iter().all(|x| *x >= 1.0 / dim as f64 - 1e-12 && *x <= 1.0 + 1e-12);
    Ok(vec![
        check("purity", "hs_mean", (m - em).abs() <= 3.0 * se, format!("mean = {m} +/- {:.2e} (expected {em})", 3.0 * se)),
        check("purity", "hs_variance", (v - ev).abs() <= 3.0 * vse, format!("variance = {v} +/- {:.2e} (expected {ev})", 3.0 * vse)),
        check("purity", "purity_range", in_range, format!("1000 states in [1/{dim}, 1]")),
    ])
}

pub fn run(a: &VerifyArgs) -> std::result::Result<(), CliError> {
    let mut checks = vec![];
    let want = |s: Suite| a.suite == s || a.suite == Suite::All;
    if want(Suite::Metric) {
        checks.extend(metric(a.seed)?);
    }
    if want(Suite::Density) {
        checks.extend(density()?);
    }
    if want(Suite::Sampler) {
        checks.extend(sampler(a.seed)?);
    }
    if want(Suite::Purity) {
        checks.extend(purity_suite(a.seed, a.dim as usize)?);
    }
    for c in &checks {
        println!("{} {}/{}: {}", if c.passed { "PASS" } else { "FAIL" }, c.suite, c.name, c.detail);
    }
    let failed: Vec<String> =
        checks.iter().filter(|c| !c.passed).map(|c| format!("{}/{}", c.suite, c.name)).collect();
    if let Some(path) = &a.report {
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "seed": a.seed,
            "passed": failed.is_empty(),
            "checks": checks,
        });
        let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.to_string()))?;
        emit(Some(path), &(text + "\n"))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed))
    }
}
