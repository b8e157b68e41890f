//! Check runners behind the `hyperholo` binary: each subcommand assembles
//! a seeded, deterministic batch of library checks into a CheckReport.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hyperholo::cocycles::{
    cross_kernel_defect, elliptic_laurent_identity, feix_flat_reduction, flat_cocycle_identity,
    flat_connection_check, flat_fibre_curvature_defect, flat_hermitian_curvature_defect,
    flat_hermitian_defect, legendre_flat_reduction, legendre_proof_defect, monopole_newton_check,
    monopole_quadrupole_relation, quartic_rotation_defect, semiflat_prepotential_transition,
    taubnut_cocycle_identity, CocycleCheck, Quartic,
};
use hyperholo::contact::{
    contact_nondegeneracy, eh_constraint_check, eh_quotient_coords, flat_iya_check,
    moment_section_value, sample_proj_points, sample_quadric_points, PairedVector,
};
use hyperholo::error::{Error, Result};
use hyperholo::models::{HyperkahlerModel, IdentityId, MODEL_IDS};
use hyperholo::report::CheckReport;
use hyperholo::special::{
    dedekind_eta, eta_pentagonal_oracle, jacobi_theta, ray_singer_det, ray_singer_det_raw,
    theta_series_oracle, FlatCharacter, ModularPoint,
};
use hyperholo::symlaurent::{GaussRat, LaurentPoly, VarSet};

/// Shared run parameters: sample count, RNG seed, numeric tolerance.
#[derive(Clone, Copy, Debug)]
pub struct RunCfg {
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
}

pub const COCYCLE_IDS: [&str; 11] = [
    "connection-forms",
    "cross-kernel",
    "elliptic",
    "feix",
    "flat-cocycle",
    "hermitian",
    "legendre",
    "monopole-newton",
    "quadrupole",
    "quartic-rotation",
    "taub-nut",
];

pub const CONTACT_IDS: [&str; 5] = [
    "contact",
    "eh-constraint",
    "eh-quotient",
    "iYA",
    "moment-quadric",
];

pub const SPECIAL_IDS: [&str; 3] = ["eta", "ray-singer", "theta"];

/// Check ids the verify subcommand emits for a given model: structural
/// validation, the applicable pointwise identities, and the ζ-family
/// checks (the holomorphic-section identity only where a global frame
/// makes it meaningful).
pub fn verify_ids(model: &HyperkahlerModel) -> Vec<&'static str> {
    let mut ids = vec![
        "compatibility",
        "metric-positive",
        "omega-closed",
        "quaternion-relations",
        "phi-curvature",
    ];
    for id in IdentityId::ALL {
        if !(id.requires_dim4() && model.dim() != 4) {
            ids.push(id.id());
        }
    }
    if model.global_frame() {
        ids.push("phi-moment");
    }
    ids.sort_unstable();
    ids
}

/// Every check id the `all` subcommand must emit, verify ids qualified by
/// model. The CLI tests cross-check the actual `all` output against this.
pub fn registered_ids() -> Vec<String> {
    let mut ids = Vec::new();
    for model_id in MODEL_IDS {
        let model = HyperkahlerModel::by_id(model_id).expect("shipped id");
        for id in verify_ids(&model) {
            ids.push(format!("{model_id}:{id}"));
        }
    }
    ids.extend(COCYCLE_IDS.iter().map(|s| s.to_string()));
    ids.extend(CONTACT_IDS.iter().map(|s| s.to_string()));
    ids.extend(SPECIAL_IDS.iter().map(|s| s.to_string()));
    ids.sort_unstable();
    ids
}

fn rng_for(cfg: &RunCfg, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        cfg.seed
            .wrapping_add(stream.wrapping_mul(0x9e3779b97f4a7c15)),
    )
}

fn cplx(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

/// ζ with 0.05 ≤ |ζ| ≤ 2, away from both the puncture and infinity.
fn zeta_annulus(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = cplx(rng, 2.0);
        if (0.05..=2.0).contains(&z.norm()) {
            return z;
        }
    }
}

/// Symbolic checks report the number of surviving defect terms, so 0 means
/// the identity closed exactly.
fn symbolic_residual(check: &CocycleCheck) -> f64 {
    if check.pass {
        0.0
    } else {
        check.defect.coeffs().len().max(1) as f64
    }
}

/// Identity suite for one model: structure validation plus every
/// applicable pointwise identity at seeded sample points.
pub fn run_verify(model_id: &str, cfg: &RunCfg) -> Result<CheckReport> {
    let model = HyperkahlerModel::by_id(model_id)?;
    let mut report = CheckReport::new("verify", Some(model_id.to_string()), cfg.seed, cfg.tol);
    report.absorb(model.validate(cfg.points, cfg.seed, cfg.tol));

    let points = model.sample_points(cfg.points.max(1), cfg.seed);
    for id in IdentityId::ALL {
        if id.requires_dim4() && model.dim() != 4 {
            continue;
        }
        let max = points
            .iter()
            .map(|p| model.identity_defect(id, p).expect("identity applicable"))
            .fold(0.0, f64::max);
        report.push(id.id(), points.len(), max, cfg.tol);
    }

    let mut rng = rng_for(cfg, 1);
    let mut phi_curv: f64 = 0.0;
    let mut phi_mom: f64 = 0.0;
    for p in &points {
        let zeta = zeta_annulus(&mut rng);
        phi_curv = phi_curv.max(model.phi_curvature_defect(zeta, p));
        if model.global_frame() {
            phi_mom = phi_mom.max(model.phi_moment_defect(zeta, p).expect("flat chart, ζ≠0"));
        }
    }
    report.push("phi-curvature", points.len(), phi_curv, cfg.tol);
    if model.global_frame() {
        report.push("phi-moment", points.len(), phi_mom, cfg.tol);
    }
    Ok(report)
}

/// Verify across every shipped model, ids qualified as `<model>:<check>`.
pub fn run_verify_all(cfg: &RunCfg) -> CheckReport {
    let mut report = CheckReport::new("verify", None, cfg.seed, cfg.tol);
    for model_id in MODEL_IDS {
        let sub = run_verify(model_id, cfg).expect("shipped id");
        for line in sub.checks {
            report.push(
                &format!("{model_id}:{}", line.id),
                line.points,
                line.max_defect,
                line.tol,
            );
        }
    }
    report
}

fn random_real_quartic(rng: &mut ChaCha8Rng) -> Quartic {
    Quartic::real_from(cplx(rng, 2.0), cplx(rng, 2.0), rng.gen_range(-2.0..2.0))
}

fn run_cocycle_id(id: &str, cfg: &RunCfg, report: &mut CheckReport) {
    match id {
        "flat-cocycle" => {
            let mut worst: f64 = 0.0;
            for k in 1..=3 {
                worst = worst.max(symbolic_residual(
                    &flat_cocycle_identity(k).expect("k >= 1"),
                ));
            }
            report.push(id, 3, worst, 0.0);
        }
        "connection-forms" => {
            let mut worst: f64 = 0.0;
            for k in 1..=3 {
                worst = worst.max(symbolic_residual(
                    &flat_connection_check(k).expect("k >= 1"),
                ));
                let fibre = flat_fibre_curvature_defect(k).expect("k >= 1");
                if !fibre.is_zero() {
                    worst = worst.max(fibre.coeffs().len() as f64);
                }
            }
            report.push(id, 3, worst, 0.0);
        }
        "taub-nut" => {
            report.push(id, 1, symbolic_residual(&taubnut_cocycle_identity()), 0.0);
        }
        "legendre" => {
            // Random Euler-degree-1 generating functions plus the two
            // worked reductions.
            let vars = VarSet::new(["eta1", "eta2", "zeta"]);
            let mut rng = rng_for(cfg, 2);
            let mut failures: f64 = 0.0;
            let n = cfg.points.max(1);
            for _ in 0..n {
                let mut h = LaurentPoly::zero(&vars);
                for _ in 0..rng.gen_range(1..=5) {
                    let a = rng.gen_range(-3i32..=3);
                    let b = rng.gen_range(-3i32..=3);
                    let c = GaussRat::ratio(rng.gen_range(-6i64..=6), rng.gen_range(1i64..=3));
                    h = &h + &LaurentPoly::monomial(&vars, vec![a, b, 1 - a - b], c);
                }
                if !legendre_proof_defect(&h)
                    .expect("homogeneous by construction")
                    .is_zero()
                {
                    failures += 1.0;
                }
            }
            failures += symbolic_residual(&legendre_flat_reduction());
            failures += symbolic_residual(&semiflat_prepotential_transition());
            report.push(id, n, failures, 0.0);
        }
        "feix" => {
            let mut worst: f64 = 0.0;
            for k in 1..=2 {
                worst = worst.max(symbolic_residual(&feix_flat_reduction(k).expect("k >= 1")));
            }
            report.push(id, 2, worst, 0.0);
        }
        "elliptic" => {
            report.push(id, 1, symbolic_residual(&elliptic_laurent_identity()), 0.0);
        }
        "hermitian" => {
            let mut rng = rng_for(cfg, 3);
            let mut worst: f64 = 0.0;
            let n = cfg.points.max(1);
            for j in 0..n {
                let k = 1 + j % 2;
                let z: Vec<Complex64> = (0..k).map(|_| cplx(&mut rng, 1.0)).collect();
                let w: Vec<Complex64> = (0..k).map(|_| cplx(&mut rng, 1.0)).collect();
                let zeta = zeta_annulus(&mut rng);
                worst = worst.max(flat_hermitian_defect(&z, &w, zeta).expect("ζ≠0"));
                if j < 8 {
                    worst = worst.max(flat_hermitian_curvature_defect(&z, &w, zeta));
                }
            }
            report.push(id, n, worst, cfg.tol);
        }
        "monopole-newton" => {
            let mut rng = rng_for(cfg, 4);
            let mut worst: f64 = 0.0;
            let n = cfg.points.max(1);
            for j in 0..n {
                let k = 2 + j % 5;
                let roots: Vec<Complex64> = (0..k).map(|_| cplx(&mut rng, 2.0)).collect();
                worst = worst.max(monopole_newton_check(&roots).expect("k >= 2"));
            }
            report.push(id, n, worst, cfg.tol);
        }
        "quartic-rotation" => {
            let mut rng = rng_for(cfg, 5);
            let mut worst: f64 = 0.0;
            let n = cfg.points.max(1);
            for _ in 0..n {
                let q = random_real_quartic(&mut rng);
                let theta = rng.gen_range(-3.0..3.0);
                worst = worst.max(quartic_rotation_defect(&q, theta).expect("real quartic"));
            }
            report.push(id, n, worst, cfg.tol);
        }
        "quadrupole" => {
            let mut rng = rng_for(cfg, 6);
            let mut worst: f64 = 0.0;
            let n = cfg.points.max(1);
            for _ in 0..n {
                let q = random_real_quartic(&mut rng);
                worst = worst.max(monopole_quadrupole_relation(&q).expect("real quartic"));
            }
            report.push(id, n, worst, cfg.tol);
        }
        "cross-kernel" => {
            let n = cfg.points.max(1);
            let mut worst: f64 = 0.0;
            for k in 1..=2 {
                worst = worst.max(cross_kernel_defect(k, n, cfg.seed).expect("k >= 1"));
            }
            report.push(id, n, worst, cfg.tol);
        }
        other => unreachable!("unregistered cocycle id {other}"),
    }
}

fn filter_ids<'a>(requested: Option<&str>, registry: &[&'a str]) -> Result<Vec<&'a str>> {
    match requested {
        None => Ok(registry.to_vec()),
        Some(id) => registry
            .iter()
            .find(|r| **r == id)
            .map(|r| vec![*r])
            .ok_or_else(|| Error::UnknownId(id.to_string(), registry.join(", "))),
    }
}

/// Transition-function, generating-function, and coefficient checks.
pub fn run_cocycle(example: Option<&str>, cfg: &RunCfg) -> Result<CheckReport> {
    let ids = filter_ids(example, &COCYCLE_IDS)?;
    let mut report = CheckReport::new("cocycle", None, cfg.seed, cfg.tol);
    for id in ids {
        run_cocycle_id(id, cfg, &mut report);
    }
    Ok(report)
}

fn random_pair(rng: &mut ChaCha8Rng) -> PairedVector {
    PairedVector::new(
        [cplx(rng, 1.0), cplx(rng, 1.0)],
        [cplx(rng, 1.0), cplx(rng, 1.0)],
    )
}

fn run_contact_id(id: &str, cfg: &RunCfg, report: &mut CheckReport) {
    match id {
        "eh-constraint" => {
            let mut rng = rng_for(cfg, 7);
            let mut worst: f64 = 0.0;
            let n = cfg.points.max(1);
            for _ in 0..n {
                let p = random_pair(&mut rng);
                let nu = zeta_annulus(&mut rng);
                for weight in -5..=5 {
                    worst =
                        worst.max(eh_constraint_check(&p, p.pairing(), nu, weight).expect("ν≠0"));
                }
            }
            report.push(id, n, worst, 0.0);
        }
        "eh-quotient" => {
            let mut rng = rng_for(cfg, 8);
            let mut worst: f64 = 0.0;
            let n = cfg.points.max(1);
            for _ in 0..n {
                let p = random_pair(&mut rng);
                let q = match eh_quotient_coords(&p) {
                    Ok(q) => q,
                    Err(_) => continue,
                };
                let lambda = Complex64::from_polar(
                    rng.gen_range(0.5..2.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
                let scaled = PairedVector::new(p.v.map(|x| lambda * x), p.xi.map(|x| lambda * x));
                worst = worst.max(q.distance(&eh_quotient_coords(&scaled).expect("nonzero")));
            }
            report.push(id, n, worst, cfg.tol);
        }
        "contact" => {
            // Nondegeneracy floor: report the clamped shortfall below 1e−6.
            let n = cfg.points.max(1);
            let mut worst: f64 = 0.0;
            let mut samples = sample_proj_points(n, cfg.seed);
            samples.extend(sample_quadric_points(32, cfg.seed.wrapping_add(1)));
            let total = samples.len();
            for p in &samples {
                worst = worst.max((1e-6 - contact_nondegeneracy(p)).max(0.0));
            }
            report.push(id, total, worst, 0.0);
        }
        "moment-quadric" => {
            let n = cfg.points.max(1);
            let mut worst: f64 = 0.0;
            for p in sample_quadric_points(n, cfg.seed.wrapping_add(2)) {
                worst = worst.max(moment_section_value(&p).norm());
            }
            report.push(id, n, worst, cfg.tol);
        }
        "iYA" => {
            let mut worst: f64 = 0.0;
            for k in 1..=2 {
                worst = worst.max(symbolic_residual(&flat_iya_check(k).expect("k >= 1")));
            }
            report.push(id, 2, worst, 0.0);
        }
        other => unreachable!("unregistered contact id {other}"),
    }
}

/// Projective contact-geometry checks.
pub fn run_contact(example: Option<&str>, cfg: &RunCfg) -> Result<CheckReport> {
    let ids = filter_ids(example, &CONTACT_IDS)?;
    let mut report = CheckReport::new("contact", None, cfg.seed, cfg.tol);
    for id in ids {
        run_contact_id(id, cfg, &mut report);
    }
    Ok(report)
}

fn random_modulus(rng: &mut ChaCha8Rng) -> ModularPoint {
    ModularPoint::new(Complex64::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(0.5..2.0),
    ))
    .expect("upper half-plane by construction")
}

fn run_special_id(id: &str, cfg: &RunCfg, report: &mut CheckReport) {
    let n = cfg.points.max(1);
    match id {
        "theta" => {
            let mut rng = rng_for(cfg, 9);
            let mut worst: f64 = 0.0;
            for _ in 0..n {
                let m = random_modulus(&mut rng);
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
                let series = theta_series_oracle(z, &m, 64);
                worst = worst.max((jacobi_theta(z, &m) - series).norm());
            }
            report.push(id, n, worst, cfg.tol);
        }
        "eta" => {
            let mut rng = rng_for(cfg, 10);
            let i = ModularPoint::new(Complex64::new(0.0, 1.0)).expect("upper half-plane");
            let mut worst = (dedekind_eta(&i) - Complex64::new(0.7682254223260566, 0.0)).norm();
            for _ in 0..n {
                let m = random_modulus(&mut rng);
                worst = worst.max((dedekind_eta(&m) - eta_pentagonal_oracle(&m, 64)).norm());
            }
            report.push(id, n, worst, cfg.tol);
        }
        "ray-singer" => {
            let mut rng = rng_for(cfg, 11);
            let mut worst: f64 = 0.0;
            for _ in 0..n {
                let m = random_modulus(&mut rng);
                let (a, b) = (rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99));
                let base = ray_singer_det_raw(a, b, &m);
                worst = worst.max((ray_singer_det_raw(a + 1.0, b, &m) - base).abs());
                worst = worst.max((ray_singer_det_raw(a, b + 1.0, &m) - base).abs());
                let conj = ray_singer_det(&FlatCharacter::new(1.0 - a, 1.0 - b), &m);
                worst = worst.max((conj - base).abs());
                worst = worst.max(ray_singer_det(&FlatCharacter::new(0.0, 0.0), &m));
            }
            report.push(id, n, worst, cfg.tol);
        }
        other => unreachable!("unregistered special id {other}"),
    }
}

/// Theta, eta, and flat-bundle determinant checks.
pub fn run_special(example: Option<&str>, cfg: &RunCfg) -> Result<CheckReport> {
    let ids = filter_ids(example, &SPECIAL_IDS)?;
    let mut report = CheckReport::new("special", None, cfg.seed, cfg.tol);
    for id in ids {
        run_special_id(id, cfg, &mut report);
    }
    Ok(report)
}

/// Every registered check: verify over all models plus the full cocycle,
/// contact, and special batteries.
pub fn run_all(cfg: &RunCfg) -> CheckReport {
    let mut report = CheckReport::new("all", None, cfg.seed, cfg.tol);
    let verify = run_verify_all(cfg);
    for line in verify.checks {
        report.push(&line.id, line.points, line.max_defect, line.tol);
    }
    for sub in [
        run_cocycle(None, cfg).expect("no filter"),
        run_contact(None, cfg).expect("no filter"),
        run_special(None, cfg).expect("no filter"),
    ] {
        report.absorb(sub);
    }
    report
}
