use nalgebra::{Matrix2, Vector2};
use projsurf::connections::*;
use projsurf::fields::*;
use projsurf::models::random::{random_plane_metric, random_plane_one_form, seeded};
use projsurf::models::round_metric;

fn sample_points() -> Vec<ChartPoint> {
    SampleGrid::square(0.8, 7).points()
}

fn sphere_christoffel(p: ChartPoint) -> Tensor3 {
    // g = e^{2σ} I with σ = ln 2 − ln(1 + ρ²)
    let d = 1.0 + p.u * p.u + p.v * p.v;
    let s = Vector2::new(-2.0 * p.u / d, -2.0 * p.v / d);
    let kd = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    Tensor3::from_fn(|i, j, k| kd(i, j) * s[k] + kd(i, k) * s[j] - kd(j, k) * s[i])
}

#[test]
fn sphere_levi_civita_matches_analytic_symbols() {
    let lc = levi_civita(&round_metric(1.0), DEFAULT_STEP);
    for p in [ChartPoint::new(0.5, 0.2), ChartPoint::new(-1.1, 0.7)] {
        assert!((lc.at(p).unwrap() - sphere_christoffel(p)).sup_norm() < 1e-6);
    }
}

#[test]
fn conformal_connection_gauge_invariance() {
    let mut rng = seeded(5);
    let g = random_plane_metric(&mut rng, 0.3);
    let beta = random_plane_one_form(&mut rng, 0.5);
    let u: ScalarField =
        Field::new(|p: ChartPoint| 0.4 * (p.u - 0.7 * p.v).sin() + 0.2 * p.u * p.v);
    let du = d_scalar_field(&u, 1e-4);
    let h = 1e-4;
    let a = conformal_connection(&g, &beta, h);
    let b = conformal_connection(&rescaled_metric(&g, &u), &beta.zip(&du, |x, y| x + y), h);
    for p in sample_points() {
        assert!((a.at(p).unwrap() - b.at(p).unwrap()).sup_norm() < 1e-6);
    }
}

#[test]
fn conformal_connection_with_zero_beta_is_levi_civita() {
    let g = random_plane_metric(&mut seeded(9), 0.3);
    let a = conformal_connection(&g, &Field::constant(Vector2::zeros()), DEFAULT_STEP);
    let b = levi_civita(&g, DEFAULT_STEP);
    for p in sample_points() {
        assert_eq!(a.at(p).unwrap(), b.at(p).unwrap());
    }
}

/// Connection assembled with step `h`, checked against fine-step derivatives
/// of `g` (with equal steps the check is algebraically exact).
fn max_weyl_residual(g: &MetricField, beta: &OneFormField, h: f64) -> f64 {
    let conn = conformal_connection(g, beta, h);
    let r = weyl_compatibility_residual(&conn, g, beta, 1e-5);
    sample_points()
        .into_iter()
        .map(|p| r.at(p).unwrap())
        .fold(0.0, f64::max)
}

#[test]
fn weyl_compatibility_converges_at_second_order() {
    let mut rng = seeded(21);
    let g = random_plane_metric(&mut rng, 0.3);
    let beta = random_plane_one_form(&mut rng, 0.5);
    let coarse = max_weyl_residual(&g, &beta, 4e-3);
    let fine = max_weyl_residual(&g, &beta, 2e-3);
    let order = (coarse / fine).log2();
    assert!(order >= 1.9, "order {order}");
    assert!(max_weyl_residual(&g, &beta, 1e-4) < 1e-6);
}

#[test]
fn levi_civita_is_not_weyl_compatible_with_nonzero_beta() {
    let mut rng = seeded(3);
    let g = random_plane_metric(&mut rng, 0.3);
    let beta = random_plane_one_form(&mut rng, 0.5);
    let lc = levi_civita(&g, DEFAULT_STEP);
    let grid = SampleGrid::square(0.8, 7);
    let r = weyl_compatibility_residual(&lc, &g, &beta, DEFAULT_STEP)
        .sup_abs(&grid)
        .unwrap();
    let sup_beta = grid
        .points()
        .iter()
        .map(|&p| beta.at(p).unwrap().amax())
        .fold(0.0, f64::max);
    assert!(r > 0.1 * sup_beta);
    let flat = weyl_compatibility_residual(
        &flat_connection(),
        &euclidean_metric(),
        &Field::constant(Vector2::zeros()),
        DEFAULT_STEP,
    );
    assert_eq!(flat.sup_abs(&grid).unwrap(), 0.0);
}

#[test]
fn ricci_of_flat_and_sphere() {
    let flat = ricci(&flat_connection(), CURVATURE_STEP);
    let r = flat.at(ChartPoint::new(0.2, 0.1)).unwrap();
    assert_eq!(r.full(), Matrix2::zeros());

    let g = round_metric(1.0);
    let ric = ricci(&levi_civita(&g, CURVATURE_STEP), CURVATURE_STEP);
    for p in sample_points() {
        let r = ric.at(p).unwrap();
        assert!((r.sym - g.at(p).unwrap()).amax() < 1e-5);
        assert!(r.skew.abs() < 1e-5);
    }
}

#[test]
fn conformal_ricci_formula() {
    for seed in 0..3 {
        let mut rng = seeded(100 + seed);
        let g = random_plane_metric(&mut rng, 0.3);
        let beta = random_plane_one_form(&mut rng, 0.5);
        let h = 1e-3;
        let ric = ricci(&conformal_connection(&g, &beta, h), h);
        let k = gauss_curvature(&g, h);
        let delta = codifferential(&beta, &g, Orientation::Positive, h);
        let dbeta = d_oneform_field(&beta, h);
        for p in sample_points() {
            let r = ric.at(p).unwrap();
            let scalar = k.at(p).unwrap() - delta.at(p).unwrap();
            let gp = g.at(p).unwrap();
            assert!((r.sym - gp * scalar).amax() < 1e-5, "sym at {p:?}");
            // −2dβ with dβ = density·½(du⊗dv − dv⊗du)
            assert!(
                (r.skew + dbeta.at(p).unwrap()).abs() < 1e-5,
                "skew at {p:?}"
            );
        }
    }
}

#[test]
fn schouten_of_sphere_flat_and_conformal() {
    let g = round_metric(1.0);
    let s = schouten(&levi_civita(&g, 1e-3), &orthonormal_coframe(&g), 1e-3);
    for p in sample_points() {
        assert!((s.at(p).unwrap() - Matrix2::identity()).amax() < 1e-5);
    }
    let s0 = schouten(
        &flat_connection(),
        &orthonormal_coframe(&euclidean_metric()),
        CURVATURE_STEP,
    );
    assert_eq!(s0.at(ChartPoint::new(0.3, 0.3)).unwrap(), Matrix2::zeros());

    let mut rng = seeded(77);
    let g = random_plane_metric(&mut rng, 0.3);
    let beta = random_plane_one_form(&mut rng, 0.5);
    let h = 1e-3;
    let s = schouten(
        &conformal_connection(&g, &beta, h),
        &orthonormal_coframe(&g),
        h,
    );
    let k = gauss_curvature(&g, h);
    let delta = codifferential(&beta, &g, Orientation::Positive, h);
    let sd = star_d(&beta, &g, h);
    for p in sample_points() {
        let m = s.at(p).unwrap();
        let diag = k.at(p).unwrap() - delta.at(p).unwrap();
        assert!((m[(0, 0)] - diag).abs() < 1e-5 && (m[(1, 1)] - diag).abs() < 1e-5);
        assert!((m[(0, 1)] - sd.at(p).unwrap() / 3.0).abs() < 1e-5);
        assert!((m[(1, 0)] + sd.at(p).unwrap() / 3.0).abs() < 1e-5);
    }
}

#[test]
fn gauss_curvature_of_models() {
    let k = gauss_curvature(&round_metric(1.0), CURVATURE_STEP);
    for chart in [0, 1] {
        for p in SampleGrid::square(1.9, 9).in_chart(chart).points() {
            assert!((k.at(p).unwrap() - 1.0).abs() < 1e-5);
        }
    }
    let k2 = gauss_curvature(&round_metric(2.0), CURVATURE_STEP);
    assert!((k2.at(ChartPoint::new(0.7, -1.3)).unwrap() - 0.25).abs() < 1e-5);
    let torus = Field::constant(Matrix2::new(2.0, 0.3, 0.3, 1.0));
    let kt = gauss_curvature(&torus, CURVATURE_STEP);
    assert!(kt.at(ChartPoint::new(0.5, 0.5)).unwrap().abs() < 1e-8);
    assert_eq!(
        gauss_curvature(&euclidean_metric(), CURVATURE_STEP)
            .at(ChartPoint::new(0.1, 0.2))
            .unwrap(),
        0.0
    );
}

#[test]
fn rescaling_law_for_levi_civita_on_sphere() {
    // ᵉ²ᵘᵍ∇ = ᵍ∇ − g⊗∇u + ι(du) relative to the flat connection
    let g = round_metric(1.0);
    let lc = levi_civita(&g, 1e-4);
    let sigma: ScalarField = Field::new(|p: ChartPoint| (2.0 / (1.0 + p.u * p.u + p.v * p.v)).ln());
    let ds = d_scalar_field(&sigma, 1e-5);
    for p in sample_points() {
        let s = ds.at(p).unwrap();
        let expected = iota(&s) - metric_times_vector(&Matrix2::identity(), &s);
        assert!((lc.at(p).unwrap() - expected).sup_norm() < 1e-6);
    }
}

#[test]
fn projective_equivalence_cases() {
    let g = round_metric(1.0);
    let sphere = levi_civita(&g, DEFAULT_STEP);
    let alpha = random_plane_one_form(&mut seeded(8), 0.3);
    let shifted = sphere.zip(&iota_embed(&alpha), |a, b| a + b);
    let a = projectively_equivalent(&sphere, &shifted, &ProjectiveTest::default()).unwrap();
    assert!(a.equivalent && a.residual < 1e-12);
    let b =
        projectively_equivalent(&flat_connection(), &sphere, &ProjectiveTest::default()).unwrap();
    assert!(!b.equivalent);
}

#[test]
fn shifted_connection_is_not_conformal() {
    let mut rng = seeded(31);
    let g = random_plane_metric(&mut rng, 0.3);
    let beta = random_plane_one_form(&mut rng, 0.5);
    let conn = conformal_connection(&g, &beta, 1e-4);
    for k in 0..10 {
        let alpha =
            Vector2::new((k as f64 * 0.7).cos(), (k as f64 * 1.3).sin()) * (0.1 + 0.05 * k as f64);
        let shifted = conn.map(move |t| t + iota(&alpha));
        for p in [ChartPoint::new(0.1, -0.4), ChartPoint::new(-0.6, 0.5)] {
            let (_, resid) = conformal_fit(&shifted, &g, p, 1e-4).unwrap();
            assert!(
                resid > 0.5 * alpha.amax(),
                "resid {resid} for α = {alpha:?}"
            );
        }
    }
}

#[test]
fn conformality_kernel_is_trivial() {
    let mut rng = seeded(1);
    for _ in 0..100 {
        let g = random_plane_metric(&mut rng, 0.4)
            .at(ChartPoint::new(0.3, 0.2))
            .unwrap();
        let sv = conformality_kernel_matrix(&g).singular_values();
        assert!(sv.min() > 1e-3 * sv.max());
    }
}

#[test]
fn connection_form_is_torsion_free() {
    let mut rng = seeded(44);
    let g = random_plane_metric(&mut rng, 0.3);
    let beta = random_plane_one_form(&mut rng, 0.5);
    let h = 1e-4;
    let conn = conformal_connection(&g, &beta, h);
    let coframe = orthonormal_coframe(&g);
    let zeta = connection_form(&conn, &coframe, h);
    for p in sample_points() {
        let e = coframe.at(p).unwrap();
        let (eu, ev) = coframe.partials(p, h).unwrap();
        let d_eta = [eu[(0, 1)] - ev[(0, 0)], eu[(1, 1)] - ev[(1, 0)]];
        assert!(torsion_residual(&zeta.at(p).unwrap(), &e, d_eta) < 1e-6);
        // ζ = (−β, ⋆β − φ; φ − ⋆β, −β) up to the metric part: diagonal is −β
        let z = zeta.at(p).unwrap();
        let b = beta.at(p).unwrap();
        assert!((z[0][0] + b).amax() < 1e-6 && (z[1][1] + b).amax() < 1e-6);
    }
}
