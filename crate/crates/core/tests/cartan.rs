use nalgebra::{Matrix2, RowVector2, Vector2};
use projsurf::cartan::*;
use projsurf::connections::{conformal_connection, connection_form, schouten};
use projsurf::fields::*;
use projsurf::models::random::{
    random_plane_metric, random_plane_one_form, seeded, TrigPolynomial,
};
use projsurf::models::round_metric;
use rand::Rng;

const H: f64 = 1e-3;

fn interior() -> SampleGrid {
    SampleGrid::square(0.6, 21)
}

fn corpus(seed: u64) -> (MetricField, OneFormField) {
    let mut rng = seeded(seed);
    (
        random_plane_metric(&mut rng, 0.3),
        random_plane_one_form(&mut rng, 0.5),
    )
}

fn zero_form() -> OneFormField {
    Field::constant(Vector2::zeros())
}

#[test]
fn weyl_gauge_is_trace_free() {
    let (g, beta) = corpus(1);
    let theta = weyl_gauge(&g, &beta, H);
    for p in SampleGrid::square(0.8, 5).points() {
        assert!(theta.trace_defect(p).unwrap() < 1e-10);
    }
}

#[test]
fn sphere_weyl_gauge_top_row() {
    let g = round_metric(1.0);
    let theta = weyl_gauge(&g, &zero_form(), 1e-4);
    let coframe = orthonormal_coframe(&g);
    for p in SampleGrid::square(1.5, 5).points() {
        let m = theta.at(p).unwrap();
        let e = coframe.at(p).unwrap();
        assert!((m.get(0, 1) + e.row(0).transpose()).amax() < 1e-5);
        assert!((m.get(0, 2) + e.row(1).transpose()).amax() < 1e-5);
    }
}

#[test]
fn weyl_block_matches_connection_form() {
    let (g, beta) = corpus(2);
    let h = 1e-5;
    let theta = weyl_gauge(&g, &beta, h);
    let zeta = connection_form(
        &conformal_connection(&g, &beta, h),
        &orthonormal_coframe(&g),
        h,
    );
    for p in SampleGrid::square(0.6, 5).points() {
        let m = theta.at(p).unwrap();
        let z = zeta.at(p).unwrap();
        let b = beta.at(p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let shift = if i == j {
                    b * (2.0 / 3.0)
                } else {
                    Vector2::zeros()
                };
                assert!(
                    (m.get(i + 1, j + 1) - shift - z[i][j]).amax() < 1e-8,
                    "({i},{j}) at {p:?}"
                );
            }
        }
    }
}

#[test]
fn theta_general_reduces_to_weyl_gauge() {
    let (g, beta) = corpus(3);
    let weyl = weyl_gauge(&g, &beta, H);
    let general = theta_general(
        &weyl_connection_form(&g, &beta, H),
        &weyl_schouten(&g, &beta, H),
        &zero_form(),
        &orthonormal_coframe(&g),
        H,
    );
    for p in SampleGrid::square(0.6, 5).points() {
        assert!((weyl.at(p).unwrap() - general.at(p).unwrap()).sup_norm() < 1e-14);
    }
}

#[test]
fn theta_general_constant_xi_flat_data() {
    let xi = Vector2::new(0.3, -0.7);
    let flat_zeta: Field<[[Vector2<f64>; 2]; 2]> = Field::constant([[Vector2::zeros(); 2]; 2]);
    let theta = theta_general(
        &flat_zeta,
        &Field::constant(Matrix2::zeros()),
        &Field::constant(xi),
        &orthonormal_coframe(&euclidean_metric()),
        H,
    );
    let m = theta.at(ChartPoint::new(0.1, 0.2)).unwrap();
    // ξη = 0.3du − 0.7dv; top row = −(ξη)ξ_j
    let xi_eta = Vector2::new(0.3, -0.7);
    assert_eq!(m.get(0, 0), -xi_eta);
    assert!((m.get(0, 1) + xi_eta * 0.3).amax() < 1e-15);
    assert!((m.get(0, 2) - xi_eta * 0.7).amax() < 1e-15);
    assert_eq!(m.get(1, 2), Vector2::new(-0.7, 0.0));
    assert!(m.trace().amax() < 1e-15);
}

#[test]
fn flat_and_sphere_structure_residuals() {
    let res = structure_residual(&weyl_gauge(&euclidean_metric(), &zero_form(), H), H);
    for p in SampleGrid::square(0.8, 5).points() {
        assert!(res.omega.at(p).unwrap().amax() < 1e-12);
    }
    let res = structure_residual(&weyl_gauge(&round_metric(1.0), &zero_form(), H), H);
    let grid = SampleGrid::square(1.5, 11);
    assert!(res.shape_defect(&grid).unwrap() < 1e-4);
    for chart in [0, 1] {
        for p in SampleGrid::square(1.5, 11).in_chart(chart).points() {
            assert!(res.w_at(p).unwrap().amax() < 1e-4);
        }
    }
}

fn relative_sup(a: &Field<Vector2<f64>>, b: &Field<Vector2<f64>>, grid: &SampleGrid) -> f64 {
    let (mut diff, mut scale) = (0.0_f64, 0.0_f64);
    for p in grid.points() {
        let (x, y) = (a.at(p).unwrap(), b.at(p).unwrap());
        diff = diff.max((x - y).amax());
        scale = scale.max(y.amax());
    }
    diff / scale
}

#[test]
fn w_pipelines_agree() {
    for seed in 10..13 {
        let (g, beta) = corpus(seed);
        let res = structure_residual(&weyl_gauge(&g, &beta, H), H);
        let w = res.w1.zip(&res.w2, Vector2::new);
        let closed = w_closed_form(&g, &beta, H);
        let rel = relative_sup(&w, &closed, &interior());
        assert!(rel < 1e-3, "seed {seed}: relative {rel}");
    }
}

#[test]
fn w_closed_form_reductions() {
    let w = w_closed_form(&round_metric(1.0), &zero_form(), H);
    assert!(w.at(ChartPoint::new(0.4, -0.3)).unwrap().amax() < 1e-5);
    // β = 0: Ŵ = −⋆dK
    let (g, _) = corpus(4);
    let w = w_closed_form(&g, &zero_form(), H);
    let k = projsurf::connections::gauss_curvature(&g, H);
    let dk = Field::try_new({
        let k = k.clone();
        move |p| k.partials(p, H).map(|(a, b)| Vector2::new(a, b))
    });
    let star = hodge_star(&dk, &g, Orientation::Positive);
    let coframe = orthonormal_coframe(&g);
    for p in SampleGrid::square(0.6, 5).points() {
        let expected =
            -coframe.at(p).unwrap().transpose().try_inverse().unwrap() * star.at(p).unwrap();
        assert!((w.at(p).unwrap() - expected).amax() < 1e-10);
    }
}

#[test]
fn w_is_invariant_under_weyl_rescaling() {
    let (g, beta) = corpus(5);
    let u: ScalarField = Field::new(|p: ChartPoint| 0.3 * (1.3 * p.u + 0.4 * p.v).sin());
    let du: OneFormField = Field::new(|p: ChartPoint| {
        let c = 0.3 * (1.3 * p.u + 0.4 * p.v).cos();
        Vector2::new(1.3 * c, 0.4 * c)
    });
    let g2 = rescaled_metric(&g, &u);
    let beta2 = beta.zip(&du, |a, b| a + b);
    // The two Weyl gauges differ by the constant-free gauge change a = e^{−u/3} I
    // (so η' = e^u η); under b⋊a the 1-form Ŵ_i η^i picks up (det a)³ = e^{−2u}.
    let to_coords = |w: Field<Vector2<f64>>, g: &MetricField| {
        let c = orthonormal_coframe(g);
        w.zip(&c, |w, e| e.transpose() * w)
    };
    let a = to_coords(w_closed_form(&g, &beta, H), &g);
    let b = to_coords(w_closed_form(&g2, &beta2, H), &g2).zip(&u, |w, u| w * (2.0 * u).exp());
    let grid = interior();
    let rel = relative_sup(&b, &a, &grid);
    assert!(rel < 1e-3, "relative {rel}");
}

fn shape_defect(g: &MetricField, beta: &OneFormField, xi: &Field<Vector2<f64>>, h: f64) -> f64 {
    let coframe = orthonormal_coframe(g);
    let conn = conformal_connection(g, beta, h);
    let theta = theta_general(
        &connection_form(&conn, &coframe, h),
        &schouten(&conn, &coframe, h),
        xi,
        &coframe,
        h,
    );
    structure_residual(&theta, h)
        .shape_defect(&SampleGrid::square(0.6, 7))
        .unwrap()
}

fn random_xi(seed: u64) -> Field<Vector2<f64>> {
    let mut rng = seeded(seed);
    let a = TrigPolynomial::random(&mut rng, 2, 1.5, 0.4);
    let b = TrigPolynomial::random(&mut rng, 2, 1.5, 0.4);
    Field::new(move |p: ChartPoint| Vector2::new(a.eval(p.u, p.v), b.eval(p.u, p.v)))
}

#[test]
fn shape_defect_converges_for_general_sections() {
    let (g, beta) = corpus(6);
    let xi = random_xi(60);
    let coarse = shape_defect(&g, &beta, &xi, 4e-3);
    let fine = shape_defect(&g, &beta, &xi, 2e-3);
    let order = (coarse / fine).log2();
    assert!(order >= 1.9, "order {order} ({coarse:e} → {fine:e})");
    assert!(shape_defect(&g, &beta, &xi, 1e-3) < 1e-5);
}

#[test]
fn complex_structure_equations() {
    let (g, beta) = corpus(7);
    let theta = weyl_gauge(&g, &beta, H);
    let c = complexify(&theta, H);
    for p in SampleGrid::square(0.6, 7).points() {
        let f = c.frame.at(p).unwrap();
        assert_eq!(f.omega2, [Cx::new(0.0, 0.0); 2]);
        assert!(c.max_residual_at(p).unwrap() < 1e-4);
        let (r, e) = (c.residuals.at(p).unwrap(), c.from_real.at(p).unwrap());
        for k in 0..4 {
            assert!(
                (r[k] - e[k]).norm() < 1e-10,
                "equation {k}: {} vs {}",
                r[k],
                e[k]
            );
        }
    }
    let sphere = complexify(&weyl_gauge(&round_metric(1.0), &zero_form(), H), H);
    for p in SampleGrid::square(1.5, 7).points() {
        assert!(sphere.max_residual_at(p).unwrap() < 1e-4);
    }
}

#[test]
fn complex_equations_for_general_section() {
    let (g, beta) = corpus(8);
    let h = 2e-3;
    let coframe = orthonormal_coframe(&g);
    let conn = conformal_connection(&g, &beta, h);
    let theta = theta_general(
        &connection_form(&conn, &coframe, h),
        &schouten(&conn, &coframe, h),
        &random_xi(80),
        &coframe,
        h,
    );
    let c = complexify(&theta, h);
    for p in SampleGrid::square(0.6, 5).points() {
        let (r, e) = (c.residuals.at(p).unwrap(), c.from_real.at(p).unwrap());
        for k in 0..4 {
            assert!(
                (r[k] - e[k]).norm() < 1e-10,
                "equation {k}: {} vs {}",
                r[k],
                e[k]
            );
        }
        assert!(c.max_residual_at(p).unwrap() < 1e-4);
    }
}

fn cmul(z: Cx, f: &ComplexForm) -> ComplexForm {
    [z * f[0], z * f[1]]
}

#[test]
fn constant_gauge_transformations() {
    let (g, beta) = corpus(9);
    let theta = weyl_gauge(&g, &beta, H);
    let id = gauge_transform(&theta, &Field::constant(GroupElement::identity()), H);
    let p = ChartPoint::new(0.2, -0.3);
    assert!((id.at(p).unwrap() - theta.at(p).unwrap()).sup_norm() < 1e-15);

    let mut rng = seeded(99);
    for _ in 0..10 {
        let z = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let r = rng.random_range(0.5..2.0);
        let phi = rng.random_range(-3.0..3.0);
        let h = GroupElement::complex(z, r, phi).unwrap();
        let moved = gauge_transform(&theta, &Field::constant(h), H);
        let before = ComplexFrame::from_theta(&theta.at(p).unwrap());
        let after = ComplexFrame::from_theta(&moved.at(p).unwrap());
        let e = Cx::from_polar(1.0, phi);
        let expected1 = cmul(e / r.powi(3), &before.omega1);
        let zc = Cx::new(z.0, z.1);
        let o2 = cmul(zc / r * e, &before.omega1);
        let o2b = cmul(e * e, &before.omega2);
        let expected2 = [o2[0] + o2b[0], o2[1] + o2b[1]];
        for k in 0..2 {
            assert!((after.omega1[k] - expected1[k]).norm() < 1e-8);
            assert!(
                (after.omega2[k] - expected2[k]).norm() < 1e-8,
                "{} vs {}",
                after.omega2[k],
                expected2[k]
            );
        }
    }
}

#[test]
fn w_rotates_as_a_one_form() {
    let (g, beta) = corpus(12);
    let theta = weyl_gauge(&g, &beta, H);
    let w = structure_residual(&theta, H);
    for phi in [0.3, 1.7, -2.2] {
        let h = GroupElement::complex((0.0, 0.0), 1.0, phi).unwrap();
        let moved = structure_residual(&gauge_transform(&theta, &Field::constant(h), H), H);
        for p in SampleGrid::square(0.5, 4).points() {
            let a = *h.a();
            let expected = (w.w_at(p).unwrap().transpose() * a).transpose();
            assert!((moved.w_at(p).unwrap() - expected).amax() < 1e-6);
        }
    }
}

#[test]
fn varying_gauge_preserves_structure_shape() {
    let (g, beta) = corpus(13);
    let theta = weyl_gauge(&g, &beta, H);
    let field: Field<GroupElement> = Field::try_new(|p: ChartPoint| {
        GroupElement::new(
            Matrix2::new(
                1.0 + 0.2 * p.u.sin(),
                0.1 * p.v,
                -0.1 * p.u * p.v,
                1.0 + 0.1 * p.v.cos(),
            ),
            RowVector2::new(0.3 * p.v, -0.2 * p.u.cos()),
        )
    });
    let moved = gauge_transform(&theta, &field, H);
    let res = structure_residual(&moved, H);
    assert!(res.shape_defect(&SampleGrid::square(0.5, 5)).unwrap() < 1e-5);
    let csv = res.w_csv(&SampleGrid::square(0.5, 3)).unwrap();
    assert!(csv.starts_with("chart_id,u,v,w1,w2\n"));
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn jet_homomorphism_random_pairs() {
    let mut rng = seeded(2024);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let mut draw = || {
            let a = Matrix2::from_fn(
                |i, j| if i == j { 1.0 } else { 0.0 } + rng.random_range(-0.4..0.4),
            );
            let b = RowVector2::new(rng.random_range(-0.35..0.35), rng.random_range(-0.35..0.35));
            GroupElement::new(a, b).unwrap()
        };
        let (g1, g2) = (draw(), draw());
        worst = worst.max(jet_homomorphism_check(&g1, &g2).unwrap());
    }
    assert!(worst < 1e-9, "worst {worst}");
}
