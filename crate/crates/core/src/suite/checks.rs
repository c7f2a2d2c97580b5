use nalgebra::{Matrix2, RowVector2, Vector2};
use rand::Rng;

use super::{Bound, Recorder};
use crate::cartan::*;
use crate::connections::*;
use crate::error::Result;
use crate::fields::*;
use crate::geodesics::*;
use crate::models::random::*;
use crate::models::*;

const CORPUS: usize = 5;
const SHIFTS: usize = 50;
const FAMILY_BASES: usize = 10;
const JET_PAIRS: usize = 100;
const SHARING_TOL: f64 = 1e-3;
const PLANARITY_TOL: f64 = 1e-6;
/// Fixed grid for the convergence-order estimates; the nested pipelines are
/// expensive and the order does not depend on the sample count.
const ORDER_GRID: usize = 7;

use Bound::{Max, Min};

fn zero_form() -> OneFormField {
    Field::constant(Vector2::zeros())
}

fn sup(
    points: impl IntoIterator<Item = ChartPoint>,
    f: impl Fn(ChartPoint) -> Result<f64>,
) -> Result<f64> {
    let mut m = 0.0_f64;
    for p in points {
        m = m.max(f(p)?);
    }
    Ok(m)
}

fn corpus(rng: &mut CorpusRng) -> (MetricField, OneFormField) {
    (
        random_plane_metric(rng, 0.3),
        random_plane_one_form(rng, 0.5),
    )
}

fn random_xi(rng: &mut CorpusRng) -> Field<Vector2<f64>> {
    let a = TrigPolynomial::random(rng, 2, 1.5, 0.4);
    let b = TrigPolynomial::random(rng, 2, 1.5, 0.4);
    Field::new(move |p: ChartPoint| Vector2::new(a.eval(p.u, p.v), b.eval(p.u, p.v)))
}

fn relative_sup(
    a: &Field<Vector2<f64>>,
    b: &Field<Vector2<f64>>,
    grid: &SampleGrid,
) -> Result<f64> {
    let (mut diff, mut scale) = (0.0_f64, 0.0_f64);
    for p in grid.points() {
        let (x, y) = (a.at(p)?, b.at(p)?);
        diff = diff.max((x - y).amax());
        scale = scale.max(y.amax());
    }
    Ok(diff / scale)
}

fn w_field(res: &CurvatureResidual) -> Field<Vector2<f64>> {
    res.w1.zip(&res.w2, Vector2::new)
}

fn general_theta(
    g: &MetricField,
    beta: &OneFormField,
    xi: &Field<Vector2<f64>>,
    h: f64,
) -> CartanGauge {
    let coframe = orthonormal_coframe(g);
    let conn = conformal_connection(g, beta, h);
    theta_general(
        &connection_form(&conn, &coframe, h),
        &schouten(&conn, &coframe, h),
        xi,
        &coframe,
        h,
    )
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

pub(super) fn structure(rec: &mut Recorder, model: &SurfaceModel) {
    let cfg = rec.config().clone();
    let (h, n) = (cfg.h, cfg.grid);
    match model.kind {
        ModelKind::Plane => {
            let theta = weyl_gauge(&euclidean_metric(), &zero_form(), h);
            let grid = SampleGrid::square(0.8, n);
            rec.check("flat_omega_max", Max, 1e-8, || {
                let res = structure_residual(&theta, h);
                sup(grid.points(), |p| Ok(res.omega.at(p)?.amax()))
            });
            rec.check("flat_complex_residual_max", Max, 1e-8, || {
                let c = complexify(&theta, h);
                sup(grid.points(), |p| c.max_residual_at(p))
            });
            rec.check("flat_trace_defect_max", Max, 1e-8, || {
                sup(grid.points(), |p| theta.trace_defect(p))
            });
        }
        ModelKind::Sphere { radius } => {
            let theta = weyl_gauge(&round_metric(radius), &zero_form(), h);
            let grids = [0, 1].map(|c| SampleGrid::square(1.5 * radius, n).in_chart(c));
            let points = || grids.iter().flat_map(|g| g.points());
            let res = structure_residual(&theta, h);
            rec.check("sphere_w_max", Max, 1e-4, || {
                sup(points(), |p| Ok(res.w_at(p)?.amax()))
            });
            rec.check("sphere_shape_defect_max", Max, 1e-4, || {
                Ok(res
                    .shape_defect(&grids[0])?
                    .max(res.shape_defect(&grids[1])?))
            });
            rec.check("sphere_complex_residual_max", Max, 1e-4, || {
                let c = complexify(&theta, h);
                sup(points(), |p| c.max_residual_at(p))
            });
            corpus_structure(rec);
        }
        ModelKind::Torus => {
            let (_, g2) = flat_torus_pair();
            let theta = weyl_gauge(&g2, &zero_form(), h);
            let grid = SampleGrid::new((0.0, 1.0), (0.0, 1.0), n);
            rec.check("torus_omega_max", Max, 1e-8, || {
                let res = structure_residual(&theta, h);
                sup(grid.points(), |p| Ok(res.omega.at(p)?.amax()))
            });
            corpus_structure(rec);
        }
    }
}

fn cmul(z: Cx, f: &ComplexForm) -> ComplexForm {
    [z * f[0], z * f[1]]
}

/// Checks on random `(g, β)` pairs and random sections `ξ` in a plane chart.
fn corpus_structure(rec: &mut Recorder) {
    let cfg = rec.config().clone();
    let (h, n) = (cfg.h, cfg.grid);
    let mut rng = seeded(cfg.seed);
    let pairs: Vec<_> = (0..CORPUS).map(|_| corpus(&mut rng)).collect();
    let xis: Vec<_> = (0..CORPUS).map(|_| random_xi(&mut rng)).collect();
    let order_grid = SampleGrid::square(0.6, ORDER_GRID);
    let interior = SampleGrid::square(0.6, n);

    rec.batch(
        || {
            let (mut worst_order, mut worst_defect) = (f64::INFINITY, 0.0_f64);
            for ((g, beta), xi) in pairs.iter().zip(&xis) {
                let defect = |step: f64| {
                    structure_residual(&general_theta(g, beta, xi, step), step)
                        .shape_defect(&order_grid)
                };
                let (coarse, fine) = (defect(4.0 * h)?, defect(2.0 * h)?);
                worst_order = worst_order.min(order(coarse, fine));
                worst_defect = worst_defect.max(defect(h)?);
            }
            Ok((worst_order, worst_defect))
        },
        &[
            ("shape_defect_order_min", Min, 1.9, &|r: &(f64, f64)| r.0),
            ("shape_defect_max", Max, 1e-5, &|r: &(f64, f64)| r.1),
        ],
    );

    rec.check("w_pipeline_relative_max", Max, 1e-3, || {
        let mut worst = 0.0_f64;
        for (g, beta) in &pairs {
            let res = structure_residual(&weyl_gauge(g, beta, h), h);
            worst = worst.max(relative_sup(
                &w_field(&res),
                &w_closed_form(g, beta, h),
                &interior,
            )?);
        }
        Ok(worst)
    });

    rec.check("trace_defect_max", Max, 1e-10, || {
        let mut worst = 0.0_f64;
        for ((g, beta), xi) in pairs.iter().zip(&xis) {
            for theta in [weyl_gauge(g, beta, h), general_theta(g, beta, xi, h)] {
                worst = worst.max(sup(order_grid.points(), |p| theta.trace_defect(p))?);
            }
        }
        Ok(worst)
    });

    // (complex residual, complex vs real consistency, ω₂ in the Weyl gauge)
    rec.batch(
        || {
            let (mut resid, mut consistency, mut omega2) = (0.0_f64, 0.0_f64, 0.0_f64);
            for ((g, beta), xi) in pairs.iter().zip(&xis) {
                for (weyl, theta) in [
                    (true, weyl_gauge(g, beta, h)),
                    (false, general_theta(g, beta, xi, 2.0 * h)),
                ] {
                    let step = if weyl { h } else { 2.0 * h };
                    let c = complexify(&theta, step);
                    for p in order_grid.points() {
                        resid = resid.max(c.max_residual_at(p)?);
                        let (r, e) = (c.residuals.at(p)?, c.from_real.at(p)?);
                        for k in 0..4 {
                            consistency = consistency.max((r[k] - e[k]).norm());
                        }
                        if weyl {
                            let f = c.frame.at(p)?;
                            omega2 = omega2.max(f.omega2[0].norm().max(f.omega2[1].norm()));
                        }
                    }
                }
            }
            Ok((resid, consistency, omega2))
        },
        &[
            ("complex_residual_max", Max, 1e-4, &|r: &(f64, f64, f64)| {
                r.0
            }),
            ("complex_real_consistency_max", Max, 1e-10, &|r: &(
                f64,
                f64,
                f64,
            )| {
                r.1
            }),
            ("omega2_weyl_gauge_max", Max, 0.0, &|r: &(f64, f64, f64)| {
                r.2
            }),
        ],
    );

    // Constant gauge changes by H: ω₁ ↦ r⁻³e^{iφ}ω₁, ω₂ ↦ (z/r)e^{iφ}ω₁ + e^{2iφ}ω₂.
    let elements: Vec<_> = (0..10)
        .map(|_| {
            let z = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (z, rng.random_range(0.5..2.0), rng.random_range(-3.0..3.0))
        })
        .collect();
    rec.batch(
        || {
            let (g, beta) = &pairs[0];
            let theta = weyl_gauge(g, beta, h);
            let (mut w1, mut w2) = (0.0_f64, 0.0_f64);
            for &(z, r, phi) in &elements {
                let moved = gauge_transform(
                    &theta,
                    &Field::constant(GroupElement::complex(z, r, phi)?),
                    h,
                );
                for p in SampleGrid::square(0.5, 3).points() {
                    let before = ComplexFrame::from_theta(&theta.at(p)?);
                    let after = ComplexFrame::from_theta(&moved.at(p)?);
                    let e = Cx::from_polar(1.0, phi);
                    let expected1 = cmul(e / r.powi(3), &before.omega1);
                    let o2 = cmul(Cx::new(z.0, z.1) / r * e, &before.omega1);
                    let o2b = cmul(e * e, &before.omega2);
                    for k in 0..2 {
                        w1 = w1.max((after.omega1[k] - expected1[k]).norm());
                        w2 = w2.max((after.omega2[k] - o2[k] - o2b[k]).norm());
                    }
                }
            }
            Ok((w1, w2))
        },
        &[
            ("gauge_omega1_law_max", Max, 1e-8, &|r: &(f64, f64)| r.0),
            ("gauge_omega2_law_max", Max, 1e-8, &|r: &(f64, f64)| r.1),
        ],
    );

    rec.check("w_rotation_max", Max, 1e-6, || {
        let (g, beta) = &pairs[1 % CORPUS];
        let theta = weyl_gauge(g, beta, h);
        let w = structure_residual(&theta, h);
        let mut worst = 0.0_f64;
        for phi in [0.3, 1.7, -2.2] {
            let el = GroupElement::complex((0.0, 0.0), 1.0, phi)?;
            let moved = structure_residual(&gauge_transform(&theta, &Field::constant(el), h), h);
            for p in SampleGrid::square(0.5, 4).points() {
                let expected = (w.w_at(p)?.transpose() * el.a()).transpose();
                worst = worst.max((moved.w_at(p)? - expected).amax());
            }
        }
        Ok(worst)
    });

    // Rescaling (g, β) ↦ (e^{2u}g, β + du) changes the Weyl gauge by
    // a = e^{−u/3}I, under which the coordinate 1-form of W scales by e^{−2u}.
    rec.check("w_rescaling_relative", Max, 1e-3, || {
        let (g, beta) = &pairs[2 % CORPUS];
        let u: ScalarField = Field::new(|p: ChartPoint| 0.3 * (1.3 * p.u + 0.4 * p.v).sin());
        let du: OneFormField = Field::new(|p: ChartPoint| {
            let c = 0.3 * (1.3 * p.u + 0.4 * p.v).cos();
            Vector2::new(1.3 * c, 0.4 * c)
        });
        let g2 = rescaled_metric(g, &u);
        let beta2 = beta.zip(&du, |a, b| a + b);
        let to_coords = |w: Field<Vector2<f64>>, g: &MetricField| {
            w.zip(&orthonormal_coframe(g), |w, e| e.transpose() * w)
        };
        let a = to_coords(w_closed_form(g, beta, h), g);
        let b = to_coords(w_closed_form(&g2, &beta2, h), &g2).zip(&u, |w, u| w * (2.0 * u).exp());
        relative_sup(&b, &a, &interior)
    });
}

struct ProjectiveSetup {
    base: ChristoffelField,
    shifts: Vec<OneFormField>,
    negative: ChristoffelField,
    atlas: Box<dyn Atlas>,
    charts: Vec<usize>,
    grids: Vec<SampleGrid>,
}

fn projective_setup(
    model: &SurfaceModel,
    rng: &mut CorpusRng,
    n: usize,
) -> Result<ProjectiveSetup> {
    Ok(match model.kind {
        ModelKind::Sphere { radius } => {
            let g = round_metric(radius);
            let sigma: ScalarField = Field::new(move |p: ChartPoint| {
                let x = stereo_embed(&p, radius) / radius;
                0.2 * x[0] * x[2]
            });
            ProjectiveSetup {
                base: levi_civita(&g, DEFAULT_STEP),
                shifts: (0..SHIFTS)
                    .map(|_| random_sphere_one_form(rng, 0.3, radius))
                    .collect(),
                negative: levi_civita(&rescaled_metric(&g, &sigma), DEFAULT_STEP),
                atlas: Box::new(model.clone()),
                charts: vec![0, 1],
                grids: [0, 1]
                    .map(|c| SampleGrid::square(radius, n).in_chart(c))
                    .to_vec(),
            }
        }
        ModelKind::Plane => ProjectiveSetup {
            base: flat_connection(),
            shifts: (0..SHIFTS)
                .map(|_| random_plane_one_form(rng, 0.3))
                .collect(),
            negative: levi_civita(&round_metric(1.0), DEFAULT_STEP),
            atlas: Box::new(PlaneAtlas::default()),
            charts: vec![0],
            grids: vec![SampleGrid::square(1.0, n)],
        },
        ModelKind::Torus => {
            let shifts = (0..SHIFTS)
                .map(|_| random_torus_one_form(rng, 0.3))
                .collect();
            let sigma = TrigPolynomial::random_periodic(rng, 3, 2, 0.3).field();
            ProjectiveSetup {
                base: flat_connection(),
                shifts,
                negative: levi_civita(&conformally_flat(sigma), DEFAULT_STEP),
                atlas: Box::new(model.clone()),
                charts: vec![0],
                grids: vec![SampleGrid::new((0.0, 1.0), (0.0, 1.0), n)],
            }
        }
    })
}

pub(super) fn projective(rec: &mut Recorder, model: &SurfaceModel) {
    let cfg = rec.config().clone();
    let options = IntegrationOptions::new(cfg.steps, cfg.dt);
    let mut rng = seeded(cfg.seed);
    let setup = match projective_setup(model, &mut rng, cfg.grid) {
        Ok(s) => s,
        Err(e) => return rec.record("setup", Max, 0.0, Err(e), 0.0),
    };
    let shifted: Vec<ChristoffelField> = setup
        .shifts
        .iter()
        .map(|a| setup.base.zip(&iota_embed(a), |x, y| x + y))
        .collect();
    let ics = random_initial_conditions(&mut rng, SHIFTS, 1.0, &setup.charts);
    let controls = random_initial_conditions(&mut rng, 4, 1.0, &setup.charts);

    rec.check("iota_shift_weyl_residual_max", Max, 1e-12, || {
        let mut worst = 0.0_f64;
        for conn in &shifted {
            for grid in &setup.grids {
                let test = ProjectiveTest {
                    grid: *grid,
                    ..ProjectiveTest::default()
                };
                worst = worst.max(projectively_equivalent(&setup.base, conn, &test)?.residual);
            }
        }
        Ok(worst)
    });
    rec.batch(
        || {
            let (mut worst, mut truncated) = (0.0_f64, 0usize);
            for (conn, ic) in shifted.iter().zip(&ics) {
                let r = shares_geodesics_from(
                    &setup.base,
                    conn,
                    setup.atlas.as_ref(),
                    std::slice::from_ref(ic),
                    SHARING_TOL,
                    &options,
                )?;
                worst = worst.max(r.max_distance);
                truncated += r.truncated;
            }
            Ok((worst, truncated as f64))
        },
        &[
            (
                "iota_shift_trace_distance_max",
                Max,
                SHARING_TOL,
                &|r: &(f64, f64)| r.0,
            ),
            ("iota_shift_truncated_paths", Max, 0.0, &|r: &(f64, f64)| {
                r.1
            }),
        ],
    );
    rec.check(
        "negative_control_weyl_residual",
        Min,
        PROJECTIVE_TOL,
        || {
            let mut worst = 0.0_f64;
            for grid in &setup.grids {
                let test = ProjectiveTest {
                    grid: *grid,
                    ..ProjectiveTest::default()
                };
                worst = worst
                    .max(projectively_equivalent(&setup.base, &setup.negative, &test)?.residual);
            }
            Ok(worst)
        },
    );
    rec.check("negative_control_trace_distance", Min, SHARING_TOL, || {
        Ok(shares_geodesics_from(
            &setup.base,
            &setup.negative,
            setup.atlas.as_ref(),
            &controls,
            SHARING_TOL,
            &options,
        )?
        .max_distance)
    });
}

struct PlanarityStats {
    max_defect: f64,
    failures: usize,
    truncated: usize,
}

pub(super) fn beltrami(rec: &mut Recorder, model: &SurfaceModel) {
    let cfg = rec.config().clone();
    let options = IntegrationOptions::new(cfg.steps, cfg.dt);
    let mut rng = seeded(cfg.seed);
    let psis: Vec<SL3Matrix> = (0..cfg.samples)
        .map(|_| random_sl3(&mut rng, 0.5, 5.0))
        .collect();
    let conns: Vec<ChristoffelField> = psis
        .iter()
        .map(|psi| levi_civita(&beltrami_metric(psi).metric, DEFAULT_STEP))
        .collect();
    let ics: Vec<Vec<InitialCondition>> = (0..psis.len())
        .map(|_| random_initial_conditions(&mut rng, cfg.paths, 1.0, &[0, 1]))
        .collect();
    let bases: Vec<SL3Matrix> = (0..FAMILY_BASES)
        .map(|_| random_sl3(&mut rng, 0.5, 5.0))
        .collect();

    rec.batch(
        || {
            let mut s = PlanarityStats {
                max_defect: 0.0,
                failures: 0,
                truncated: 0,
            };
            for (conn, ics) in conns.iter().zip(&ics) {
                for ic in ics {
                    let path = integrate_geodesic(conn, ic, model, &options)?;
                    let p = planarity_defect(&path)?;
                    s.max_defect = s.max_defect.max(p.defect);
                    s.truncated += usize::from(path.truncated);
                    s.failures +=
                        usize::from(path.truncated || p.degenerate || !(p.defect < PLANARITY_TOL));
                }
            }
            Ok(s)
        },
        &[
            (
                "planarity_defect_max",
                Max,
                PLANARITY_TOL,
                &|s: &PlanarityStats| s.max_defect,
            ),
            ("planarity_failures", Max, 0.0, &|s: &PlanarityStats| {
                s.failures as f64
            }),
            ("truncated_paths", Max, 0.0, &|s: &PlanarityStats| {
                s.truncated as f64
            }),
        ],
    );

    let round = levi_civita(&round_metric(1.0), DEFAULT_STEP);
    let tests: Vec<ProjectiveTest> = [0, 1]
        .map(|c| ProjectiveTest {
            grid: SampleGrid::square(1.0, cfg.grid).in_chart(c),
            ..ProjectiveTest::default()
        })
        .to_vec();
    rec.batch(
        || {
            let (mut worst, mut disagreements) = (0.0_f64, 0usize);
            for (conn, ics) in conns.iter().zip(&ics) {
                let mut residual = 0.0_f64;
                for t in &tests {
                    residual = residual.max(projectively_equivalent(&round, conn, t)?.residual);
                }
                worst = worst.max(residual);
                let shared = shares_geodesics_from(
                    &round,
                    conn,
                    model,
                    &ics[..ics.len().min(2)],
                    SHARING_TOL,
                    &options,
                )?
                .shared;
                disagreements += usize::from((residual < PROJECTIVE_TOL) != shared);
            }
            Ok((worst, disagreements as f64))
        },
        &[
            ("weyl_residual_max", Max, PROJECTIVE_TOL, &|r: &(
                f64,
                f64,
            )| {
                r.0
            }),
            ("weyl_geodesic_disagreements", Max, 0.0, &|r: &(
                f64,
                f64,
            )| r.1),
        ],
    );

    rec.batch(
        || {
            let (mut mismatches, mut gap) = (0usize, f64::INFINITY);
            for base in &bases {
                let r = family_rank(base, 1e-5)?;
                mismatches += usize::from(r.rank != 5 || r.inconclusive);
                gap = gap.min(r.gap_ratio);
            }
            Ok((mismatches as f64, gap))
        },
        &[
            ("family_rank_mismatches", Max, 0.0, &|r: &(f64, f64)| r.0),
            ("family_rank_gap_min", Min, 1e3, &|r: &(f64, f64)| r.1),
        ],
    );
}

pub(super) fn degree(rec: &mut Recorder, model: &SurfaceModel) {
    let cfg = rec.config().clone();
    let mut rng = seeded(cfg.seed);
    let expected = 2.0 * f64::from(model.euler_characteristic);
    let (metrics, betas, tol): (Vec<MetricField>, Vec<OneFormField>, f64) = match model.kind {
        ModelKind::Sphere { radius } => {
            let betas = (0..10)
                .map(|_| random_sphere_one_form(&mut rng, 1.0, radius))
                .collect();
            (vec![round_metric(radius)], betas, 1e-3)
        }
        _ => {
            let (g1, g2) = flat_torus_pair();
            let betas = (0..10)
                .map(|_| random_torus_one_form(&mut rng, 0.5))
                .collect();
            (vec![g1, g2], betas, 1e-6)
        }
    };
    rec.check("degree_error", Max, tol, || {
        Ok(
            (degree_normal_bundle(model, &metrics[0], &zero_form(), cfg.mesh)?.raw - expected)
                .abs(),
        )
    });
    rec.batch(
        || {
            let mut raws = Vec::with_capacity(betas.len());
            for (k, beta) in betas.iter().enumerate() {
                raws.push(
                    degree_normal_bundle(model, &metrics[k % metrics.len()], beta, cfg.mesh)?.raw,
                );
            }
            let error = raws
                .iter()
                .map(|r| (r - expected).abs())
                .fold(0.0, f64::max);
            let lo = raws.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = raws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok((error, hi - lo))
        },
        &[
            ("random_beta_error_max", Max, tol, &|r: &(f64, f64)| r.0),
            ("random_beta_spread", Max, 2e-3, &|r: &(f64, f64)| r.1),
        ],
    );
}

pub(super) fn uniqueness(rec: &mut Recorder) {
    let cfg = rec.config().clone();
    let (h, n) = (cfg.h, cfg.grid);
    let mut rng = seeded(cfg.seed);
    let pairs: Vec<_> = (0..3).map(|_| corpus(&mut rng)).collect();
    let points = SampleGrid::square(0.8, n).points();

    rec.check("conformal_gauge_invariance", Max, 1e-6, || {
        let (g, beta) = &pairs[0];
        let u: ScalarField =
            Field::new(|p: ChartPoint| 0.4 * (p.u - 0.7 * p.v).sin() + 0.2 * p.u * p.v);
        let du = d_scalar_field(&u, 1e-4);
        let a = conformal_connection(g, beta, 1e-4);
        let b = conformal_connection(&rescaled_metric(g, &u), &beta.zip(&du, |x, y| x + y), 1e-4);
        sup(points.iter().copied(), |p| {
            Ok((a.at(p)? - b.at(p)?).sup_norm())
        })
    });

    // Assembled at step s, checked with fine-step derivatives of g.
    let weyl_residual = |g: &MetricField, beta: &OneFormField, s: f64| {
        let r = weyl_compatibility_residual(&conformal_connection(g, beta, s), g, beta, 1e-5);
        sup(SampleGrid::square(0.8, ORDER_GRID).points(), |p| r.at(p))
    };
    rec.check("weyl_compatibility_order", Min, 1.9, || {
        let (g, beta) = &pairs[1];
        Ok(order(
            weyl_residual(g, beta, 4.0 * h)?,
            weyl_residual(g, beta, 2.0 * h)?,
        ))
    });
    rec.check("weyl_compatibility_max", Max, 1e-6, || {
        weyl_residual(&pairs[1].0, &pairs[1].1, 1e-4)
    });

    rec.batch(
        || {
            let (mut sym, mut skew, mut diag, mut off) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
            for (g, beta) in &pairs {
                let conn = conformal_connection(g, beta, h);
                let ric = ricci(&conn, h);
                let s = schouten(&conn, &orthonormal_coframe(g), h);
                let k = gauss_curvature(g, h);
                let delta = codifferential(beta, g, Orientation::Positive, h);
                let dbeta = d_oneform_field(beta, h);
                let sd = star_d(beta, g, h);
                for &p in &points {
                    let r = ric.at(p)?;
                    let scalar = k.at(p)? - delta.at(p)?;
                    sym = sym.max((r.sym - g.at(p)? * scalar).amax());
                    skew = skew.max((r.skew + dbeta.at(p)?).abs());
                    let m = s.at(p)?;
                    diag = diag
                        .max((m[(0, 0)] - scalar).abs())
                        .max((m[(1, 1)] - scalar).abs());
                    let third = sd.at(p)? / 3.0;
                    off = off
                        .max((m[(0, 1)] - third).abs())
                        .max((m[(1, 0)] + third).abs());
                }
            }
            Ok([sym, skew, diag, off])
        },
        &[
            ("ricci_symmetric_max", Max, 1e-5, &|r: &[f64; 4]| r[0]),
            ("ricci_skew_max", Max, 1e-5, &|r: &[f64; 4]| r[1]),
            ("schouten_diagonal_max", Max, 1e-5, &|r: &[f64; 4]| r[2]),
            ("schouten_offdiagonal_max", Max, 1e-5, &|r: &[f64; 4]| r[3]),
        ],
    );

    // ∇ + ι(α) is not conformal for α ≠ 0: the fit residual stays of the size of α.
    rec.check("shifted_fit_margin_min", Min, 0.5, || {
        let (g, beta) = &pairs[2];
        let conn = conformal_connection(g, beta, 1e-4);
        let mut worst = f64::INFINITY;
        for k in 0..10 {
            let alpha = Vector2::new((k as f64 * 0.7).cos(), (k as f64 * 1.3).sin())
                * (0.1 + 0.05 * k as f64);
            let shifted = conn.map(move |t| t + iota(&alpha));
            for p in [ChartPoint::new(0.1, -0.4), ChartPoint::new(-0.6, 0.5)] {
                let (_, resid) = conformal_fit(&shifted, g, p, 1e-4)?;
                worst = worst.min(resid / alpha.amax());
            }
        }
        Ok(worst)
    });
    rec.check("kernel_singular_ratio_min", Min, 1e-3, || {
        let mut worst = f64::INFINITY;
        for _ in 0..100 {
            let g = random_plane_metric(&mut rng, 0.4).at(ChartPoint::new(0.3, 0.2))?;
            let sv = conformality_kernel_matrix(&g).singular_values();
            worst = worst.min(sv.min() / sv.max());
        }
        Ok(worst)
    });

    let (g1, g2) = flat_torus_pair();
    let torus_grid = SampleGrid::new((0.05, 0.95), (0.05, 0.95), 9);
    rec.batch(
        || f_invariant(&g1, &g2, &zero_form(), &zero_form(), &torus_grid, 1e-6),
        &[
            ("flat_torus_f_error", Max, 1e-12, &|r: &FInvariant| {
                r.f.at(ChartPoint::new(0.5, 0.5))
                    .map_or(f64::NAN, |f| (f - 1.36).abs())
            }),
            (
                "flat_torus_identity_residual",
                Max,
                1e-10,
                &|r: &FInvariant| r.identity_residual,
            ),
        ],
    );

    let (g, beta) = pairs[0].clone();
    let grid = SampleGrid::square(0.7, 7);
    rec.batch(
        || {
            let u: ScalarField = Field::new(|p: ChartPoint| 0.3 * (p.u + 2.0 * p.v).sin());
            let du: OneFormField =
                Field::new(|p: ChartPoint| Vector2::new(0.3, 0.6) * (p.u + 2.0 * p.v).cos());
            let r = f_invariant(
                &g,
                &rescaled_metric(&g, &u),
                &beta,
                &beta.zip(&du, |a, b| a + b),
                &grid,
                1e-6,
            )?;
            let f_max = sup(grid.points(), |p| Ok(r.f.at(p)?.abs()))?;
            Ok((f_max, r))
        },
        &[
            ("conformal_pair_f_max", Max, 1e-12, &|r: &(
                f64,
                FInvariant,
            )| r.0),
            (
                "conformal_pair_identity_residual",
                Max,
                1e-10,
                &|r: &(f64, FInvariant)| r.1.identity_residual,
            ),
            (
                "conformal_pair_precondition_residual",
                Max,
                1e-6,
                &|r: &(f64, FInvariant)| r.1.precondition_residual,
            ),
        ],
    );
    rec.check("beltrami_precondition_residual", Min, 1e-2, || {
        let h = beltrami_metric(&SL3Matrix::diag(2.0, 1.0, 0.5)?).metric;
        let r = f_invariant(
            &round_metric(1.0),
            &h,
            &zero_form(),
            &zero_form(),
            &SampleGrid::square(0.8, 5),
            1e-6,
        )?;
        Ok(r.precondition_residual)
    });
}

fn random_element(rng: &mut CorpusRng) -> Result<GroupElement> {
    let a = Matrix2::from_fn(|i, j| if i == j { 1.0 } else { 0.0 } + rng.random_range(-0.4..0.4));
    let b = RowVector2::new(rng.random_range(-0.35..0.35), rng.random_range(-0.35..0.35));
    GroupElement::new(a, b)
}

/// Largest deviation of the exact 2-jet of `f_{a,b}` from central differences.
fn jet_fd_error(g: &GroupElement) -> f64 {
    let jet = two_jet_of_fab(g);
    let h = 1e-4;
    let f = |x: Vector2<f64>| fab(g, &x);
    let e = [Vector2::new(h, 0.0), Vector2::new(0.0, h)];
    let mut worst = f(Vector2::zeros()).amax();
    for j in 0..2 {
        let col = (f(e[j]) - f(-e[j])) / (2.0 * h);
        worst = worst.max((col - jet.jacobian.column(j)).amax());
        for k in 0..2 {
            let (s, t) = (e[j] + e[k], e[j] - e[k]);
            let mixed = (f(s) - f(t) - f(-t) + f(-s)) / (4.0 * h * h);
            for i in 0..2 {
                worst = worst.max((mixed[i] - jet.hessian.get(i, j, k)).abs());
            }
        }
    }
    worst
}

pub(super) fn jets(rec: &mut Recorder) {
    let mut rng = seeded(rec.config().seed);
    let pairs: Result<Vec<_>> = (0..JET_PAIRS)
        .map(|_| Ok((random_element(&mut rng)?, random_element(&mut rng)?)))
        .collect();
    rec.check("jet_homomorphism_max", Max, 1e-9, || {
        let mut worst = 0.0_f64;
        for (g1, g2) in pairs.as_ref().map_err(Clone::clone)? {
            worst = worst.max(jet_homomorphism_check(g1, g2)?);
        }
        Ok(worst)
    });
    rec.check("group_law_max", Max, 1e-12, || {
        let mut worst = 0.0_f64;
        for (g1, g2) in pairs.as_ref().map_err(Clone::clone)? {
            worst = worst.max((group_mul(g1, g2)?.matrix() - g1.matrix() * g2.matrix()).amax());
        }
        Ok(worst)
    });
    rec.check("jet_fd_max", Max, 1e-6, || {
        let pairs = pairs.as_ref().map_err(Clone::clone)?;
        Ok(pairs
            .iter()
            .take(10)
            .map(|(g, _)| jet_fd_error(g))
            .fold(0.0, f64::max))
    });
}
