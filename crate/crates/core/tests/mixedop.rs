mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::{fractional_laplacian_1d, random_field, rng, smooth_bump};
use fklab::gridcore::{build_grid_domain, GridDomain, ScalarField, ShapeSpec};
use fklab::mixedop::*;
use fklab::Error;
use proptest::prelude::*;

fn disk(r: f64) -> ShapeSpec {
    ShapeSpec::Disk {
        center: [0.0; 2],
        radius: r,
    }
}

fn dom(spec: &ShapeSpec, h: f64) -> Arc<GridDomain> {
    Arc::new(build_grid_domain(spec, h).unwrap())
}

fn max_rel(a: &ScalarField, b: &ScalarField) -> f64 {
    let scale = a.values().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    a.values()
        .iter()
        .zip(b.values())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        / scale
}

#[test]
fn closed_form_weights_and_tails() {
    assert!((cell_weight_1d(0.25, 1.0, 2.0) - (1.0 - 2f64.powf(-0.5)) / 0.5).abs() < 1e-15);
    assert!((cell_weight_1d(0.25, 1.0, 2.0) - 0.585_786_437_626_905).abs() < 1e-12);
    assert!((tail_integral(0.25, 1, 1.0) - 4.0).abs() < 1e-14);
    assert!((tail_integral(0.25, 2, 2.0) - 8.885_765_876_316_732).abs() < 1e-12);
}

#[test]
fn kernel_invariants() {
    for (spec, h) in [(ShapeSpec::Interval { a: 0.0, b: 1.0 }, 1.0 / 32.0), (disk(1.0), 1.0 / 8.0)] {
        let d = dom(&spec, h);
        for s in [0.1, 0.25, 0.6] {
            let k = build_kernel(s, &d).unwrap();
            let m = k.half_width() as i64;
            assert_eq!(k.weight(0, 0), 0.0);
            let jy_max = if k.dim() == 1 { 0 } else { m };
            for jy in -jy_max..=jy_max {
                for jx in -m..=m {
                    let w = k.weight(jx, jy);
                    assert!(w >= 0.0);
                    assert_eq!(w, k.weight(-jx, -jy));
                }
            }
            let tau = tail_integral(s, k.dim(), k.tail_radius());
            assert!((k.tail_coeff() - tau).abs() <= 1e-12 * tau);
            assert!((k.tail_radius() - (m as f64 + 0.5) * h).abs() < 1e-15);
        }
    }
}

#[test]
fn one_dimensional_weights_are_exact() {
    let h = 1.0 / 16.0;
    let d = dom(&ShapeSpec::Interval { a: 0.0, b: 1.0 }, h);
    let k = build_kernel(0.3, &d).unwrap();
    for j in 1..=k.half_width() as i64 {
        let jf = j as f64;
        let exact = cell_weight_1d(0.3, (jf - 0.5) * h, (jf + 0.5) * h);
        assert!((k.weight(j, 0) - exact).abs() <= 1e-13 * exact);
    }
}

/// Composite Simpson on a square cell, away from the singularity.
fn cell_integral_2d(s: f64, cx: f64, cy: f64, n: usize) -> f64 {
    let f = |x: f64, y: f64| (x * x + y * y).powf(-1.0 - s);
    let step = 1.0 / n as f64;
    let sw = |i: usize| if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
    let mut acc = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            acc += sw(i) * sw(j) * f(cx - 0.5 + i as f64 * step, cy - 0.5 + j as f64 * step);
        }
    }
    acc * step * step / 9.0
}

#[test]
fn near_cells_match_fine_quadrature() {
    let h = 1.0 / 8.0;
    let d = dom(&disk(1.0), h);
    for s in [0.1, 0.25, 0.45] {
        let k = build_kernel(s, &d).unwrap();
        let scale = h.powf(-2.0 * s);
        for (jx, jy) in [(1, 0), (1, 1), (0, -1)] {
            let oracle = scale * cell_integral_2d(s, jx as f64, jy as f64, 400);
            let w = k.weight(jx, jy);
            assert!((w - oracle).abs() <= 1e-7 * oracle, "s={s} ({jx},{jy}): {w} vs {oracle}");
        }
        // Far cells carry the midpoint value.
        let far = scale * (25.0f64 + 9.0).powf(-1.0 - s);
        assert!((k.weight(5, 3) - far).abs() <= 1e-13 * far);
    }
}

#[test]
fn kernel_mass_beyond_unit_distance_decreases_in_s() {
    // Cells [j-1/2, j+1/2] with j ≥ 2 lie in |y| ≥ 1 at h = 2/3 (j=2 gives
    // [1, 5/3]); their mass plus the tail is ∫_{|y|≥1} |y|^{-1-2s} = 1/s.
    let h = 2.0 / 3.0;
    let mut prev = f64::INFINITY;
    for s in [0.05, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 0.95] {
        let mut total = 0.0;
        let m = 40;
        for j in 2..=m {
            let jf = j as f64;
            total += 2.0 * cell_weight_1d(s, (jf - 0.5) * h, (jf + 0.5) * h);
        }
        total += tail_integral(s, 1, (m as f64 + 0.5) * h);
        assert!((total - 1.0 / s).abs() < 1e-10 / s);
        assert!(total < prev);
        prev = total;
    }
}

#[test]
fn invalid_kernels_rejected() {
    let d = dom(&disk(1.0), 0.25);
    for s in [0.0, 1.0, -0.2, f64::NAN] {
        assert!(matches!(build_kernel(s, &d), Err(Error::InvalidExponent(_))));
    }
    let need = required_half_width(&d);
    assert!(matches!(
        build_kernel_with_support(0.3, &d, need - 1),
        Err(Error::KernelSupport { .. })
    ));
    assert!(build_kernel_with_support(0.3, &d, need + 3).is_ok());
}

#[test]
fn local_examples() {
    let h = 1.0 / 256.0;
    let d = dom(&ShapeSpec::Interval { a: 0.0, b: 1.0 }, h);
    let op = MixedOperator::laplacian(d.clone()).unwrap();
    let zero = ScalarField::zeros(d.clone());
    assert_eq!(op.apply_local(&zero).unwrap().values(), zero.values());

    let u = ScalarField::from_fn(d.clone(), |p| (PI * p[0]).sin()).unwrap();
    let lu = op.apply_local(&u).unwrap();
    let mut worst = 0.0f64;
    for &i in d.interior() {
        let x = d.center(i)[0];
        if (0.05..0.95).contains(&x) {
            let want = PI * PI * u.values()[i];
            worst = worst.max((lu.values()[i] - want).abs() / want);
        }
    }
    assert!(worst <= 1e-3, "{worst}");

    let sq = dom(&ShapeSpec::Rectangle { w: 4.0, ht: 4.0, center: [0.0; 2] }, 0.125);
    let op = MixedOperator::laplacian(sq.clone()).unwrap();
    let one = ScalarField::masked(sq.clone(), vec![1.0; sq.len()]).unwrap();
    let l1 = op.apply_local(&one).unwrap();
    let (nx, ny) = sq.shape();
    assert_eq!(l1.values()[sq.index(nx / 2, ny / 2)], 0.0);
}

#[test]
fn nonlocal_examples() {
    let d = dom(&disk(1.0), 1.0 / 16.0);
    let op = MixedOperator::mixed(d.clone(), 0.25).unwrap();
    let zero = ScalarField::zeros(d.clone());
    assert!(op.apply_nonlocal(&zero).unwrap().values().iter().all(|&v| v == 0.0));
    assert!(op.apply_nonlocal_fast(&zero).unwrap().values().iter().all(|&v| v == 0.0));

    let cell = d.interior()[d.interior_count() / 2];
    let mut v = vec![0.0; d.len()];
    v[cell] = 1.0;
    let e = ScalarField::new(d.clone(), v).unwrap();
    let k = op.kernel().unwrap();
    let want = k.weight_sum() + k.tail_coeff();
    let got = op.apply_nonlocal(&e).unwrap().values()[cell];
    assert!((got - want).abs() <= 1e-12 * want);
    assert!((op.nonlocal_diagonal() - want).abs() <= 1e-12 * want);
}

#[test]
fn nonlocal_matches_quadrature_oracle_1d() {
    let s = 0.25;
    let h = 1.0 / 256.0;
    let d = dom(&ShapeSpec::Interval { a: -1.0, b: 1.0 }, h);
    let op = MixedOperator::mixed(d.clone(), s).unwrap();
    let u = ScalarField::from_fn(d.clone(), |p| smooth_bump(p[0])).unwrap();
    let lu = op.apply_nonlocal(&u).unwrap();
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for k in 0..10 {
        let x = -0.72 + 0.16 * k as f64;
        let i = d.index(((x - d.origin()[0]) / h) as usize, 0);
        let xc = d.center(i)[0];
        let exact = fractional_laplacian_1d(&smooth_bump, xc, s, -1.0, 1.0);
        err = err.max((lu.values()[i] - exact).abs());
        scale = scale.max(exact.abs());
    }
    assert!(err / scale <= 1e-3, "{}", err / scale);
}

#[test]
fn fast_path_matches_direct_on_the_disk() {
    let d = dom(&disk(1.0), 1.0 / 128.0);
    let op = MixedOperator::mixed(d.clone(), 0.25).unwrap();
    let mut r = rng(11);
    for _ in 0..2 {
        let u = random_field(&d, &mut r);
        let a = op.apply_nonlocal(&u).unwrap();
        let b = op.apply_nonlocal_fast(&u).unwrap();
        assert!(max_rel(&a, &b) <= 1e-10);
    }
}

#[test]
fn scales_and_linearity() {
    let d = dom(&ShapeSpec::Ellipse { a: 1.0, b: 0.6, center: [0.0; 2] }, 1.0 / 16.0);
    let mut r = rng(3);
    let (u, v) = (random_field(&d, &mut r), random_field(&d, &mut r));
    let op = MixedOperator::mixed(d.clone(), 0.3).unwrap();
    let local = op.with_scales(1.0, 0.0).unwrap();
    let frac = op.with_scales(0.0, 1.0).unwrap();
    assert!(max_rel(&op.apply_local(&u).unwrap(), &local.apply_mixed(&u).unwrap()) < 1e-14);
    assert!(max_rel(&op.apply_nonlocal(&u).unwrap(), &frac.apply_mixed(&u).unwrap()) < 1e-12);

    let (alpha, beta) = (0.7, -1.9);
    let w = ScalarField::new(
        d.clone(),
        u.values().iter().zip(v.values()).map(|(a, b)| alpha * a + beta * b).collect(),
    )
    .unwrap();
    let lw = op.apply_mixed(&w).unwrap();
    let (lu, lv) = (op.apply_mixed(&u).unwrap(), op.apply_mixed(&v).unwrap());
    let combo = ScalarField::new(
        d.clone(),
        lu.values().iter().zip(lv.values()).map(|(a, b)| alpha * a + beta * b).collect(),
    )
    .unwrap();
    assert!(max_rel(&combo, &lw) < 1e-12);
}

#[test]
fn mismatched_domains_rejected() {
    let a = dom(&disk(1.0), 0.125);
    let b = dom(&disk(1.1), 0.125);
    let op = MixedOperator::mixed(a, 0.25).unwrap();
    let u = ScalarField::zeros(b);
    assert!(matches!(op.apply_mixed(&u), Err(Error::DomainMismatch)));
}

#[test]
fn energy_examples() {
    let d = dom(&ShapeSpec::Stadium { len: 0.8, radius: 0.5, center: [0.0; 2] }, 1.0 / 16.0);
    let op = MixedOperator::mixed(d.clone(), 0.25).unwrap();
    let zero = ScalarField::zeros(d.clone());
    let e0 = energy_forms(&op, &zero, &zero).unwrap();
    assert_eq!((e0.local, e0.nonlocal, e0.total), (0.0, 0.0, 0.0));

    let mut r = rng(5);
    let (u, v) = (random_field(&d, &mut r), random_field(&d, &mut r));
    let uv = energy_forms(&op, &u, &v).unwrap();
    let vu = energy_forms(&op, &v, &u).unwrap();
    assert!((uv.total - vu.total).abs() <= 1e-12 * uv.total.abs().max(1.0));
    assert!((uv.local - vu.local).abs() <= 1e-12 * uv.local.abs().max(1.0));

    let uu = energy_forms(&op, &u, &u).unwrap();
    let au = op.apply_mixed(&u).unwrap().dot(&u).unwrap();
    assert!((uu.total - au).abs() <= 1e-12 * au);
    assert!((uu.local + uu.nonlocal - uu.total).abs() <= 1e-12 * uu.total);
}

#[test]
fn operator_is_symmetric() {
    let d = dom(&ShapeSpec::Ellipse { a: 1.2, b: 0.7, center: [0.0; 2] }, 1.0 / 24.0);
    let op = MixedOperator::mixed(d.clone(), 0.4).unwrap();
    let mut r = rng(8);
    for _ in 0..3 {
        let (u, v) = (random_field(&d, &mut r), random_field(&d, &mut r));
        let a = op.apply_mixed(&u).unwrap().dot(&v).unwrap();
        let b = u.dot(&op.apply_mixed(&v).unwrap()).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
    }
}

#[test]
fn rayleigh_examples() {
    let h = 1.0 / 256.0;
    let d = dom(&ShapeSpec::Interval { a: 0.0, b: 1.0 }, h);
    let op = MixedOperator::laplacian(d.clone()).unwrap();
    let u = ScalarField::from_fn(d.clone(), |p| (PI * p[0]).sin()).unwrap();
    let q = rayleigh_quotient(&op, &u).unwrap();
    assert!((q - PI * PI).abs() / (PI * PI) <= 1e-3);

    let mixed = MixedOperator::mixed(d.clone(), 0.25).unwrap();
    let q1 = rayleigh_quotient(&mixed, &u).unwrap();
    let u2 = ScalarField::new(d.clone(), u.values().iter().map(|v| 2.0 * v).collect()).unwrap();
    let q2 = rayleigh_quotient(&mixed, &u2).unwrap();
    assert!((q1 - q2).abs() <= 1e-13 * q1);
    assert!(rayleigh_quotient(&mixed, &ScalarField::zeros(d)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn forms_are_positive_and_dominate(seed in 0u64..1000, s in 0.05f64..0.95, a in 0.4f64..1.2) {
        let d = dom(&ShapeSpec::Ellipse { a, b: 0.5, center: [0.0; 2] }, 1.0 / 12.0);
        let op = MixedOperator::mixed(d.clone(), s).unwrap();
        let u = random_field(&d, &mut rng(seed));
        let e = energy_forms(&op, &u, &u).unwrap();
        prop_assert!(e.nonlocal >= 0.0);
        prop_assert!(e.local >= 0.0);
        prop_assert!(e.total >= e.local);
    }

    #[test]
    fn fast_and_direct_agree(seed in 0u64..1000, s in 0.05f64..0.95, n in 4usize..20) {
        let h = 1.0 / n as f64;
        let shape = if seed % 2 == 0 {
            ShapeSpec::Interval { a: 0.0, b: 1.3 }
        } else {
            ShapeSpec::Stadium { len: 0.5, radius: 0.4, center: [0.0; 2] }
        };
        let d = dom(&shape, h);
        let op = MixedOperator::mixed(d.clone(), s).unwrap();
        let u = random_field(&d, &mut rng(seed));
        let a = op.apply_nonlocal(&u).unwrap();
        let b = op.apply_nonlocal_fast(&u).unwrap();
        prop_assert!(max_rel(&a, &b) <= 1e-10);
    }
}
