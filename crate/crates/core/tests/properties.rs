use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use warpres::phase::{psi, rho, rho_prime};
use warpres::special::{
    airy_ai, bessel_i, bessel_i_neg, bessel_i_series, bessel_i_uniform, bessel_k, log_gamma,
};
use warpres::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn reflection_matches_the_direct_series(re in 0.0..20.0f64, im in 0.0..22.0f64, z in 0.1..30.0f64) {
        let nu = c(re, im);
        prop_assume!(nu.norm() <= 30.0);
        let direct = bessel_i_series(-nu, z);
        prop_assume!(direct.is_ok());
        let direct = direct.unwrap();
        let reflected = bessel_i_neg(nu, z).unwrap().value;
        let i = bessel_i(nu, z).unwrap().value;
        let k = bessel_k(nu, z).unwrap().value;
        let sin = (nu * PI).sin();
        let scale = i.norm().max((k * sin).norm());
        prop_assert!((reflected - direct).norm() < 1e-8 * scale, "ν = {nu}, z = {z}");
    }

    #[test]
    fn airy_connection(r in 0.0..8.0f64, arg in -PI..PI) {
        let w = Complex64::from_polar(r, arg);
        let a = airy_ai(w).unwrap().value;
        let b = airy_ai(w * Complex64::from_polar(1.0, -2.0 * PI / 3.0)).unwrap().value;
        let d = airy_ai(w * Complex64::from_polar(1.0, -4.0 * PI / 3.0)).unwrap().value;
        let t1 = Complex64::from_polar(1.0, PI / 3.0) * b;
        let t2 = Complex64::from_polar(1.0, -PI / 3.0) * d;
        let scale = a.norm().max(t1.norm()).max(t2.norm());
        prop_assert!((a - t1 - t2).norm() < 1e-10 * scale, "w = {w}");
    }

    #[test]
    fn psi_is_scaled_rho(re in 0.0..40.0f64, im in 0.0..40.0f64, lambda in 0.5..50.0f64, x in 0.1..1.0f64) {
        let nu = c(re, im);
        prop_assume!((nu / lambda - c(0.0, x)).norm() > 1e-6);
        let p = psi(nu, lambda, x).unwrap();
        let r = rho(nu / lambda, x).unwrap().rho;
        prop_assert_eq!(p, r * lambda);
    }

    #[test]
    fn rho_prime_matches_central_differences(r in 0.05..3.0f64, arg in 0.0..FRAC_PI_2) {
        let a = Complex64::from_polar(r, arg);
        prop_assume!((a - c(0.0, 1.0)).norm() > 0.05);
        let h = 1e-5;
        let f = |z: Complex64| rho(z, 1.0).unwrap().rho;
        // Stay inside the closed quadrant.
        let fd = if a.re > 2.0 * h && a.im > 2.0 * h {
            (f(a + h) - f(a - h)) / (2.0 * h)
        } else {
            // Second-order one-sided difference along 1 + i.
            let e = c(h, h);
            (f(a + e) * 4.0 - f(a + 2.0 * e) - f(a) * 3.0) / (2.0 * e)
        };
        let d = rho_prime(a).unwrap();
        prop_assert!((d - fd).norm() < 1e-7 * d.norm().max(1.0), "α = {a}: {d} vs {fd}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn re_psi_increases_in_x(re in 0.0..30.0f64, im in 0.0..30.0f64, lambda in 0.5..30.0f64) {
        let nu = c(re, im);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=90 {
            let x = 0.1 + 0.01 * k as f64;
            if (nu / lambda - c(0.0, x)).norm() < 1e-9 {
                continue;
            }
            let v = psi(nu, lambda, x).unwrap().re;
            prop_assert!(v > prev, "ν = {nu}, λ = {lambda}, x = {x}");
            prev = v;
        }
    }
}

#[test]
fn bessel_i_has_no_zeros_in_the_right_half_plane() {
    for z in [0.05, 0.5, 2.0, 9.0, 40.0, 150.0] {
        for i in 0..=20 {
            for j in 0..=20 {
                let nu = c(3.0 * i as f64, 4.0 * j as f64);
                let v = bessel_i(nu, z).unwrap().value;
                assert!(v.norm() > 0.0 && v.norm().is_finite(), "ν = {nu}, z = {z}");
            }
        }
    }
}

#[test]
fn regimes_agree_on_the_overlap_band() {
    let mut checked = 0;
    for z in [20.0, 40.0, 60.0, 80.0, 100.0] {
        for i in 0..=8 {
            for j in 0..=8 {
                let alpha = Complex64::from_polar(0.2 + 0.16 * i as f64, FRAC_PI_2 * j as f64 / 8.0);
                let nu = alpha * z;
                if nu.norm() > 150.0 {
                    continue;
                }
                let s = bessel_i_series(nu, z).unwrap();
                let u = bessel_i_uniform(nu, z).unwrap();
                let series_est = bessel_i(nu, z).unwrap().est_rel_error;
                assert!(rel(u.value, s) <= u.est_rel_error.max(series_est), "ν = {nu}, z = {z}");
                checked += 1;
            }
        }
    }
    assert!(checked > 300);
}

#[test]
fn uniform_error_halves_when_lambda_doubles() {
    for alpha in [c(0.5, 0.0), c(1.0, 0.5), c(0.3, 1.4), c(1.2, 1.2)] {
        let err = |z: f64| rel(bessel_i_uniform(alpha * z, z).unwrap().value, bessel_i_series(alpha * z, z).unwrap());
        for z in [12.0, 24.0] {
            let factor = err(z) / err(2.0 * z);
            assert!((1.5..=3.0).contains(&factor), "α = {alpha}, λ = {z}: factor {factor}");
        }
    }
}

#[test]
fn log_gamma_ratio_asymptotics() {
    // log Γ(ν)/Γ(-ν) - [2ν log ν - (2 + iπ)ν] stays bounded along rays in the quadrant.
    for arg in [0.3, 0.8, 1.2, 1.5] {
        let mut rems = Vec::new();
        for r in [20.5, 40.5, 80.5, 160.5] {
            let nu = Complex64::from_polar(r, arg);
            let lhs = log_gamma(nu).unwrap() - log_gamma(-nu).unwrap();
            let lead = 2.0 * nu * nu.ln() - c(2.0, PI) * nu;
            // Compare modulo 2πi, the branch of log Γ(-ν).
            let d = lhs - lead;
            let d = c(d.re, d.im - 2.0 * PI * (d.im / (2.0 * PI)).round());
            rems.push(d.norm());
        }
        let max = rems.iter().cloned().fold(0.0, f64::max);
        assert!(max < 10.0, "arg = {arg}: {rems:?}");
    }
}
