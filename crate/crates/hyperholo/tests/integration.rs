//! End-to-end use of the public API: build models, run checks from every
//! module, and render a combined report, the way an external caller would.

use num_complex::Complex64;

use hyperholo::cocycles::{flat_cocycle_identity, flat_g_uv, monopole_newton_check};
use hyperholo::contact::{eh_quotient_coords, moment_section_value, PairedVector};
use hyperholo::models::{HyperkahlerModel, IdentityId, MODEL_IDS};
use hyperholo::report::CheckReport;
use hyperholo::special::{jacobi_theta, ModularPoint};
use hyperholo::symlaurent::dlog;

#[test]
fn combined_report_over_all_models() {
    let mut report = CheckReport::new("integration", None, 11, 1e-9);
    for id in MODEL_IDS {
        let model = HyperkahlerModel::by_id(id).unwrap();
        let points = model.sample_points(16, 11);
        let mut worst: f64 = 0.0;
        for identity in IdentityId::ALL {
            if identity.requires_dim4() && model.dim() != 4 {
                continue;
            }
            for p in &points {
                worst = worst.max(model.identity_defect(identity, p).unwrap());
            }
        }
        report.push(id, points.len(), worst, 1e-9);
    }
    assert!(report.pass, "{}", report.to_text());
    assert!(report.to_json().contains("\"semiflat1\""));
}

#[test]
fn symbolic_and_numeric_layers_compose() {
    // The symbolic transition function evaluates numerically and its dlog
    // matches the cocycle check's right-hand side structurally.
    let g = flat_g_uv(1);
    let v = Complex64::new(0.4, -0.2);
    let xi = Complex64::new(-0.7, 0.3);
    let zeta = Complex64::new(1.1, 0.6);
    let expect = (-v * xi / (2.0 * zeta)).exp();
    assert!((g.eval(&[v, xi, zeta]) - expect).norm() < 1e-14);

    let check = flat_cocycle_identity(1).unwrap();
    assert!(check.pass);
    assert!((&check.rhs - &dlog(&g).unwrap()).is_zero());
}

#[test]
fn cross_module_smoke() {
    // Quotient coordinates feed the moment section; the monopole and theta
    // layers run from the same crate without extra setup.
    let p = PairedVector::new(
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    );
    let q = eh_quotient_coords(&p).unwrap();
    assert!(moment_section_value(&q).norm() < 1e-14);

    let roots = [
        Complex64::new(1.0, 0.5),
        Complex64::new(-0.5, 0.25),
        Complex64::new(0.0, -1.0),
    ];
    assert!(monopole_newton_check(&roots).unwrap() < 1e-12);

    let m = ModularPoint::new(Complex64::new(0.0, 1.0)).unwrap();
    assert!(jacobi_theta(Complex64::new(0.0, 0.0), &m).norm() == 0.0);
}
