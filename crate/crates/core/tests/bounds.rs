mod common;

use common::rng;
use proxyhss_core::bounds::*;
use proxyhss_core::kernels::*;
use proxyhss_core::numerics::two_norm;
use proxyhss_core::proxy::*;
use proxyhss_core::C64;
use rand::Rng;

fn range(a: usize, b: usize) -> Vec<f64> {
    (a..=b).map(|i| i as f64).collect()
}

/// Constants written in terms of the two radii rather than their ratio.
fn alpha_radii(big_r: f64, r: f64) -> f64 {
    2.0 * (big_r / r).powf(0.25) / ((big_r / r).powf(0.25) - 1.0)
}

fn beta_radii(big_r: f64, r: f64) -> f64 {
    2.0 * (big_r / r).powf(0.75) * (1.0 + (r / big_r).powi(2)) / (1.0 - (r / big_r).powf(0.25)).powi(2)
}

#[test]
fn constants_match_closed_forms() {
    for rho in [1.5, 2.0, 4.0, 9.0] {
        let r = 3.0;
        assert!((alpha(rho) - alpha_radii(rho * r, r)).abs() <= 1e-14 * alpha(rho));
        assert!((beta(rho) - beta_radii(rho * r, r)).abs() <= 1e-14 * beta(rho));
    }
    // 2·2^{1/4}/(2^{1/4} - 1) and 2·2^{3/4}·(5/4)/(1 - 2^{-1/4})², evaluated by hand.
    assert!((alpha(2.0) - 12.570_427_015_766_5).abs() < 1e-9);
    assert!(alpha(2.0) < 14.0);
    assert!((beta(2.0) - 166.093_476_659).abs() < 1e-6, "{}", beta(2.0));
}

#[test]
fn termwise_denominator() {
    let spec = ToeplitzSpec::symmetric(GeneratingFunction::new(Builtin::CosOverN, 64), 0.0).unwrap();
    let s = ProxyScheme::new(C64::new(10.5, 0.0), 4.0, 8.0, 28).unwrap();
    let b = termwise_bound(&spec, &[30.0], &s, 512).unwrap();
    let expected = b.alpha.unwrap() * b.f_max_on_boundary.unwrap() / 127.0;
    assert!((b.value - expected).abs() <= 1e-14 * expected);
    assert_eq!(b.rho, Some(2.0));
    assert_eq!(b.kind, BoundKind::Termwise);
}

#[test]
fn matrix_abs_scales_with_block_size() {
    let spec = ToeplitzSpec::skew(GeneratingFunction::new(Builtin::CauchyScaled, 64), 0.0).unwrap();
    let x = [9.0];
    let y = [40.0];
    let s = make_scheme(&x, &y, 16).unwrap();
    let t = termwise_bound(&spec, &y, &s, 512).unwrap();
    let m = matrix_bound_abs(&spec, &x, &y, &s, 512).unwrap();
    assert_eq!(t.value, m.value);
    let m2 = matrix_bound_abs(&spec, &x, &[40.0, 40.0], &s, 512).unwrap();
    assert_eq!(m2.value, 2.0 * m.value);
}

#[test]
fn matrix_rel_arithmetic() {
    let b = matrix_bound_rel(2, 4, 2.0, 28).unwrap();
    let expected = 8.0 * alpha(2.0) * (1.0 + beta(2.0)) / 127.0;
    assert!((b.value - expected).abs() <= 1e-14 * expected);
    assert!(b.beta.is_some());
    let mut last = f64::INFINITY;
    for p in 4..200 {
        let v = matrix_bound_rel(2, 1, 2.0, p).unwrap().value;
        assert!(v < last);
        last = v;
    }
    assert!(last < 1e-10);
    assert!(matrix_bound_rel(1, 4, 2.0, 28).is_err());
    assert!(matrix_bound_rel(2, 4, 1.0, 28).is_err());
}

#[test]
fn growth_examples() {
    let sq = GeneratingFunction::new(Builtin::ShiftedSquare, 64);
    assert_eq!(growth_bound(&sq, 64).unwrap().value, 0.0);
    let c = GeneratingFunction::new(Builtin::CauchyScaled, 8);
    assert!((growth_bound(&c, 8).unwrap().value - 34.0).abs() < 1e-13);
    let n = 1024;
    let cs = GeneratingFunction::new(Builtin::CosOverN, n);
    let v = growth_bound(&cs, n).unwrap().value;
    let expected = core::f64::consts::PI * (n * n) as f64 / 8.0;
    assert!((v - expected).abs() <= 1e-12 * expected);
}

#[test]
fn growth_dominates_boundary_samples() {
    for n in [64usize, 512, 2048] {
        for b in [Builtin::CosOverN, Builtin::CauchyScaled] {
            let f = GeneratingFunction::new(b, n);
            let bound = growth_bound(&f, n).unwrap().value;
            let c = (n as f64 + 1.0) / 2.0;
            let rad = n as f64 / 2.0 - 1.0;
            for m in 0..512 {
                let t = core::f64::consts::TAU * m as f64 / 512.0;
                let z = C64::new(c + rad * t.cos(), rad * t.sin());
                assert!(f.eval(z).norm() <= bound, "{b} n={n}");
            }
        }
    }
}

#[test]
fn hss_block_arithmetic() {
    let n = 2048usize;
    let f = GeneratingFunction::new(Builtin::CauchyScaled, n);
    let v = hss_block_bound(&f, n, 28).unwrap().value;
    let nf = n as f64;
    let expected = 7.0 * nf * nf / 254.0 * (nf * nf / 2.0 + 2.0);
    assert!((v - expected).abs() <= 1e-13 * expected);
    let v32 = hss_block_bound(&f, n, 32).unwrap().value;
    assert!((v / v32 - 2.0).abs() < 0.02);
    // f'(n/2) = -4/n, so the growth factor is ~n²/2 and the bound ~n⁴.
    let g = GeneratingFunction::new(Builtin::CauchyScaled, 2 * n);
    let ratio = hss_block_bound(&g, 2 * n, 28).unwrap().value / v;
    assert!((ratio / 16.0 - 1.0).abs() < 1e-5);
}

#[test]
fn level_bound_denominator_and_validation() {
    let f = GeneratingFunction::new(Builtin::CauchyScaled, 256);
    let b = level_termwise_bound(&f, 256, 2, 28, 64).unwrap();
    assert!((b.value * 127.0 / 14.0 - b.f_max_on_boundary.unwrap()).abs() <= 1e-12 * b.value);
    assert!(level_termwise_bound(&f, 256, 6, 28, 64).is_err());
    let zero = GeneratingFunction::new(Builtin::CosQuarter, 256).scaled(0.0);
    assert_eq!(level_termwise_bound(&zero, 256, 1, 28, 64).unwrap().value, 0.0);
}

fn max_entry_error(exact: &proxyhss_core::numerics::RealMatrix, approx: &proxyhss_core::numerics::RealMatrix) -> f64 {
    exact.sub(approx).unwrap().max_abs()
}

/// The level bound against the proxy step at the first, a middle and the
/// last node of every height.
#[test]
fn level_bound_dominates_proxy_step() {
    let n = 2048usize;
    let f = GeneratingFunction::new(Builtin::CauchyScaled, n);
    let spec = ToeplitzSpec::skew(f, 0.0).unwrap();
    for height in 0..=8usize {
        let size = 4usize << height;
        for p in [16usize, 32] {
            let bound = level_termwise_bound(&f, n, height, p, 256).unwrap().value;
            for node in [0usize, n / size / 2, n / size - 1] {
                let start = node * size + 1;
                let x = range(start + size / 4, start + 3 * size / 4 - 1);
                let y: Vec<f64> = (1..=n).filter(|&i| i < start || i >= start + size).map(|i| i as f64).collect();
                let c = C64::new(start as f64 + (size as f64 - 1.0) / 2.0, 0.0);
                let base = level_scheme(height, p).unwrap();
                let s = ProxyScheme::new(c, base.inner_radius(), base.outer_radius(), p).unwrap();
                let fac = factors(&spec, &x, &y, &s).unwrap();
                let err = max_entry_error(&spec.dense(&x, &y).unwrap(), &fac.real_product());
                assert!(err <= bound, "height {height} node {node} p {p}: {err} > {bound}");
            }
        }
    }
}

#[test]
fn termwise_and_matrix_bounds_dominate() {
    let mut r = rng(31);
    let mut checked = 0;
    for b in Builtin::ALL {
        for &n in &[64usize, 256] {
            let f = GeneratingFunction::new(b, n);
            let spec = ToeplitzSpec::symmetric(f, 0.0).unwrap();
            for _ in 0..6 {
                let size = (16usize << r.gen_range(0..3)).min(n / 2);
                let start = r.gen_range(0..n / size) * size + 1;
                let x = range(start + size / 4, start + 3 * size / 4 - 1);
                let y: Vec<f64> = (1..=n).filter(|&i| i < start || i >= start + size).map(|i| i as f64).collect();
                let p = r.gen_range(6..40);
                let s = make_scheme(&x, &y, p).unwrap();
                let t = termwise_bound(&spec, &y, &s, 512).unwrap().value;
                let m = matrix_bound_abs(&spec, &x, &y, &s, 512).unwrap().value;
                let fac = factors(&spec, &x, &y, &s).unwrap();
                let exact = spec.dense(&x, &y).unwrap();
                let approx = fac.real_product();
                for _ in 0..100 {
                    let a = r.gen_range(0..x.len());
                    let c = r.gen_range(0..y.len());
                    assert!((exact[(a, c)] - approx[(a, c)]).abs() <= t, "{b}");
                }
                assert!(two_norm(&exact.sub(&approx).unwrap()).unwrap() <= m, "{b}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 60);
}

#[test]
fn bounds_decrease_in_p() {
    let spec = ToeplitzSpec::skew(GeneratingFunction::new(Builtin::CauchyScaled, 128), 0.0).unwrap();
    let x = range(17, 48);
    let y = range(65, 128);
    let mut last = f64::INFINITY;
    for p in 4..60 {
        let s = make_scheme(&x, &y, p).unwrap();
        let v = matrix_bound_abs(&spec, &x, &y, &s, 128).unwrap().value;
        assert!(v <= last);
        last = v;
    }
}
