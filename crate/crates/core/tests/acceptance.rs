//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so the lines always reach the console; exits non-zero on failure.

use std::process::ExitCode;

use nalgebra::Vector2;
use projsurf::fields::{ChartPoint, Field, SampleGrid};
use projsurf::models::{f_invariant, flat_torus_pair};
use projsurf::suite::{run_suite, CheckRecord, SuiteConfig, SuiteReport};

struct Criterion {
    passed: bool,
    details: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Self {
            passed: true,
            details: Vec::new(),
        }
    }

    fn require<'a>(&mut self, report: &'a SuiteReport, name: &str) -> &'a CheckRecord {
        let c = report
            .check(name)
            .unwrap_or_else(|| panic!("{} report has no check {name}", report.suite));
        self.passed &= c.passed;
        let op = if c.bound == projsurf::suite::Bound::Max {
            "<="
        } else {
            ">="
        };
        let value = c.residual.map_or("n/a".into(), |r| format!("{r:.3e}"));
        self.details.push(format!(
            "{}[{}]/{name} {value} {op} {:e}",
            report.suite, report.config.model, c.tolerance
        ));
        c
    }

    fn runtime_below(&mut self, c: &CheckRecord, label: &str, limit_ms: f64) {
        let ms = c.runtime_ms.unwrap_or(f64::INFINITY);
        self.passed &= ms < limit_ms;
        self.details.push(format!(
            "{label} {:.2} s < {:.0} s",
            ms / 1e3,
            limit_ms / 1e3
        ));
    }

    fn assert(&mut self, ok: bool, detail: String) {
        self.passed &= ok;
        self.details.push(detail);
    }
}

fn run(suite: &str, model: &str) -> SuiteReport {
    let config = SuiteConfig {
        model: model.into(),
        ..SuiteConfig::default()
    };
    run_suite(suite, &config).unwrap_or_else(|e| panic!("{suite} on {model}: {e}"))
}

fn main() -> ExitCode {
    let sphere_degree = run("degree", "sphere");
    let torus_degree = run("degree", "torus");
    let beltrami = run("beltrami", "sphere");
    let sphere_projective = run("projective", "sphere");
    let flat_projective = run("projective", "flat");
    let structure = run("structure", "sphere");
    let uniqueness = run("uniqueness", "sphere");
    let jets = run("jets", "sphere");

    let mut criteria: Vec<(&str, Criterion)> = Vec::new();

    let mut c = Criterion::new();
    let r = c.require(&sphere_degree, "degree_error").clone();
    c.runtime_below(&r, "sphere 400x200", 5e3);
    let r = c.require(&torus_degree, "degree_error").clone();
    c.runtime_below(&r, "torus", 1e3);
    c.require(&torus_degree, "random_beta_error_max");
    c.require(&sphere_degree, "random_beta_error_max");
    c.require(&sphere_degree, "random_beta_spread");
    criteria.push(("degree identity", c));

    let mut c = Criterion::new();
    let r = c.require(&beltrami, "planarity_defect_max").clone();
    c.require(&beltrami, "planarity_failures");
    c.require(&beltrami, "truncated_paths");
    let cfg = &beltrami.config;
    c.assert(
        cfg.seed == 42 && cfg.samples * cfg.paths == 1000,
        format!(
            "{} psi x {} paths, seed {}",
            cfg.samples, cfg.paths, cfg.seed
        ),
    );
    c.runtime_below(&r, "1000 paths", 60e3);
    criteria.push(("Beltrami great circles", c));

    let mut c = Criterion::new();
    c.require(&beltrami, "weyl_residual_max");
    c.require(&beltrami, "weyl_geodesic_disagreements");
    for report in [&sphere_projective, &flat_projective] {
        c.require(report, "iota_shift_weyl_residual_max");
        c.require(report, "iota_shift_trace_distance_max");
        c.require(report, "negative_control_weyl_residual");
        c.require(report, "negative_control_trace_distance");
    }
    criteria.push(("Weyl criterion and geodesic sharing", c));

    let mut c = Criterion::new();
    c.require(&structure, "shape_defect_order_min");
    c.require(&structure, "w_pipeline_relative_max");
    c.require(&structure, "sphere_w_max");
    criteria.push(("structure equations", c));

    let mut c = Criterion::new();
    let r = c.require(&structure, "omega2_weyl_gauge_max").clone();
    c.assert(r.residual == Some(0.0), "omega2 identically zero".into());
    c.require(&structure, "complex_residual_max");
    c.require(&structure, "sphere_complex_residual_max");
    c.require(&structure, "gauge_omega1_law_max");
    criteria.push(("complexification", c));

    let mut c = Criterion::new();
    c.require(&uniqueness, "conformal_gauge_invariance");
    c.require(&uniqueness, "weyl_compatibility_order");
    c.require(&uniqueness, "ricci_symmetric_max");
    c.require(&uniqueness, "ricci_skew_max");
    c.require(&uniqueness, "schouten_diagonal_max");
    criteria.push(("conformal-connection algebra", c));

    let mut c = Criterion::new();
    c.require(&uniqueness, "flat_torus_f_error");
    c.require(&uniqueness, "flat_torus_identity_residual");
    c.require(&uniqueness, "conformal_pair_f_max");
    c.require(&uniqueness, "kernel_singular_ratio_min");
    let (g1, g2) = flat_torus_pair();
    let zero = Field::constant(Vector2::zeros());
    let grid = SampleGrid::new((0.05, 0.95), (0.05, 0.95), 9);
    let f = f_invariant(&g1, &g2, &zero, &zero, &grid, 1e-6)
        .and_then(|r| r.f.at(ChartPoint::new(0.3, 0.7)))
        .unwrap_or(f64::NAN);
    c.assert((f - 1.36).abs() <= 2.0 * f64::EPSILON, format!("f = {f:?}"));
    criteria.push(("uniqueness machinery", c));

    let mut c = Criterion::new();
    c.require(&jets, "jet_homomorphism_max");
    criteria.push(("group and jet realization", c));

    let mut c = Criterion::new();
    c.require(&beltrami, "family_rank_mismatches");
    c.require(&beltrami, "family_rank_gap_min");
    criteria.push(("family dimension", c));

    let mut failed = 0;
    for (k, (name, c)) in criteria.iter().enumerate() {
        failed += usize::from(!c.passed);
        println!(
            "criterion {} ({name}): {} [{}]",
            k + 1,
            if c.passed { "PASS" } else { "FAIL" },
            c.details.join("; ")
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
