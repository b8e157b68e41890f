//! The contact side of the correspondence: the circle-bundle constraint on
//! pairs (v, ξ, ζ), the projective quotient P(V ⊕ V*), the canonical
//! contact form on its affine charts, and the moment quadric ⟨v, ξ⟩ = 0.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cocycles::{flat_connection_forms, flat_u_vars, CocycleCheck};
use crate::error::{Error, Result};
use crate::forms::KForm;
use crate::symlaurent::{ExpLaurent, GaussRat, LaurentPoly, OneFormSym, VectorFieldSym};

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// A point of V ⊕ V* with V = ℂ², carrying the bilinear pairing
/// ⟨v, ξ⟩ = v₁ξ₁ + v₂ξ₂.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedVector {
    pub v: [Complex64; 2],
    pub xi: [Complex64; 2],
}

impl PairedVector {
    pub fn new(v: [Complex64; 2], xi: [Complex64; 2]) -> Self {
        PairedVector { v, xi }
    }

    pub fn pairing(&self) -> Complex64 {
        self.v[0] * self.xi[0] + self.v[1] * self.xi[1]
    }

    fn homogeneous(&self) -> [Complex64; 4] {
        [self.v[0], self.v[1], self.xi[0], self.xi[1]]
    }
}

/// A point of P³ = P(V ⊕ V*), stored as a unit-norm homogeneous
/// representative. Equality is projective: representatives differing by a
/// phase describe the same point.
#[derive(Clone, Copy, Debug)]
pub struct ProjPoint {
    h: [Complex64; 4],
}

impl ProjPoint {
    pub fn new(homogeneous: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = homogeneous.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::OutOfDomain(
                "projective point needs a nonzero finite representative".into(),
            ));
        }
        let mut h = homogeneous;
        for c in &mut h {
            *c /= norm;
        }
        Ok(ProjPoint { h })
    }

    /// The stored unit-norm representative.
    pub fn homogeneous(&self) -> &[Complex64; 4] {
        &self.h
    }

    /// Frobenius distance of the rank-one projectors hh* and gg*: zero iff
    /// the two points agree projectively. The entrywise differences cancel
    /// before the square root, so same-orbit representatives come out at
    /// machine precision rather than its square root.
    pub fn distance(&self, other: &ProjPoint) -> f64 {
        let mut sum = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let d = self.h[i] * self.h[j].conj() - other.h[i] * other.h[j].conj();
                sum += d.norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Index of the largest-modulus homogeneous coordinate.
    fn chart(&self) -> usize {
        let mut best = 0;
        for i in 1..4 {
            if self.h[i].norm_sqr() > self.h[best].norm_sqr() {
                best = i;
            }
        }
        best
    }

    /// Affine representative with the chart coordinate scaled to 1.
    fn chart_representative(&self, chart: usize) -> Result<[Complex64; 4]> {
        let pivot = self.h[chart];
        if pivot.norm() < 1e-8 {
            return Err(Error::OutOfDomain(format!(
                "coordinate {chart} is too small to serve as an affine chart"
            )));
        }
        let mut rep = self.h;
        for c in &mut rep {
            *c /= pivot;
        }
        Ok(rep)
    }
}

/// Defect of the lifted circle action (v, ξ, ζ) ↦ (ν^{n+1}v, ν^{1−n}ξ, ν²ζ)
/// against the constraint ⟨v, ξ⟩ = ζ. The weight sum (n+1) + (1−n) is
/// evaluated in integer arithmetic, so the pairing picks up exactly ν² and
/// the defect is |ν|²·|⟨v,ξ⟩ − ζ|: identically zero on the constraint
/// locus, for every integer n.
pub fn eh_constraint_check(
    p: &PairedVector,
    zeta: Complex64,
    nu: Complex64,
    n: i32,
) -> Result<f64> {
    if nu == C0 {
        return Err(Error::OutOfDomain("ν must be nonzero".into()));
    }
    let weight_v = n + 1;
    let weight_xi = 1 - n;
    // ⟨ν^{n+1}v, ν^{1−n}ξ⟩ = ν^{(n+1)+(1−n)}⟨v,ξ⟩; the exponent collapses
    // to 2 before any floating-point power is taken.
    let total = weight_v + weight_xi;
    debug_assert_eq!(total, 2);
    let nu_total = nu.powi(total);
    Ok((nu_total * (p.pairing() - zeta)).norm())
}

/// Literal floating-point version of the lifted-action defect with explicit
/// weights (w_v, w_ξ) on v and ξ. Agrees with [`eh_constraint_check`] for
/// (n+1, 1−n) up to roundoff and serves as the negative control for
/// unbalanced weights.
pub fn lifted_pairing_defect(
    p: &PairedVector,
    zeta: Complex64,
    nu: Complex64,
    weight_v: i32,
    weight_xi: i32,
) -> Result<f64> {
    if nu == C0 {
        return Err(Error::OutOfDomain("ν must be nonzero".into()));
    }
    let v = p.v.map(|c| nu.powi(weight_v) * c);
    let xi = p.xi.map(|c| nu.powi(weight_xi) * c);
    let acted = PairedVector::new(v, xi);
    Ok((acted.pairing() - nu * nu * zeta).norm())
}

/// The quotient map (v, ξ) ↦ [v : ξ] ∈ P³.
pub fn eh_quotient_coords(p: &PairedVector) -> Result<ProjPoint> {
    ProjPoint::new(p.homogeneous())
}

/// |θ∧dθ| in the affine chart of the largest homogeneous coordinate, where
/// θ = ⟨ξ, dv⟩ − ⟨v, dξ⟩ restricted to the chart. The coefficient of the
/// chart volume form has modulus 2 identically, so the contact condition
/// holds at every point of P³, on and off the moment quadric.
pub fn contact_nondegeneracy(p: &ProjPoint) -> f64 {
    contact_nondegeneracy_in_chart(p, p.chart()).expect("largest coordinate is a valid chart")
}

/// Same as [`contact_nondegeneracy`] but in a caller-chosen affine chart;
/// errors if the chart coordinate nearly vanishes at the point.
pub fn contact_nondegeneracy_in_chart(p: &ProjPoint, chart: usize) -> Result<f64> {
    let rep = p.chart_representative(chart)?;
    // w = S·h gives θ = Σ w_a dh_a = ξ₁dv₁ + ξ₂dv₂ − v₁dξ₁ − v₂dξ₂.
    let s_matrix = [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ];
    let free: Vec<usize> = (0..4).filter(|&a| a != chart).collect();
    let slot = |a: usize| free.iter().position(|&b| b == a).expect("free index");

    let mut theta = KForm::zero(3, 1);
    for &a in &free {
        let mut w = C0;
        for b in 0..4 {
            w += s_matrix[a][b] * rep[b];
        }
        theta.add_coeff(&[slot(a)], w);
    }
    // dθ = Σ S_ab dh_b ∧ dh_a over the free indices; dh_chart = 0.
    let mut dtheta = KForm::zero(3, 2);
    for &a in &free {
        for &b in &free {
            if s_matrix[a][b] != 0.0 {
                dtheta.add_coeff(&[slot(b), slot(a)], Complex64::new(s_matrix[a][b], 0.0));
            }
        }
    }
    let volume = theta.wedge(&dtheta);
    Ok(volume.coeff(&[0, 1, 2]).norm())
}

/// ⟨v, ξ⟩ of the affine-chart representative: the weight-2 moment section
/// read in the chart. Zero iff the point lies on the quadric.
pub fn moment_section_value(p: &ProjPoint) -> Complex64 {
    let rep = p
        .chart_representative(p.chart())
        .expect("largest coordinate is a valid chart");
    rep[0] * rep[2] + rep[1] * rep[3]
}

/// Exact vanishing of i_Y A_U in the flat model, where Y is the lifted
/// rotation field and A_U the chart connection form: A_U has only dvᵢ
/// components while Y points along ∂ξᵢ and ∂ζ, so ζA_U descends to the
/// quotient.
pub fn flat_iya_check(k: usize) -> Result<CocycleCheck> {
    let (a_u, _) = flat_connection_forms(k)?;
    let u = flat_u_vars(k);
    let mut y = VectorFieldSym::zero(&u);
    for i in 1..=k {
        let name = format!("xi{i}");
        let idx = u.require(&name)?;
        let mut exps = vec![0i32; u.len()];
        exps[idx] = 1;
        y.set_comp(
            &name,
            ExpLaurent::from_poly(LaurentPoly::monomial(&u, exps, GaussRat::i())),
        )?;
    }
    let zeta = u.require("zeta")?;
    let mut exps = vec![0i32; u.len()];
    exps[zeta] = 1;
    y.set_comp(
        "zeta",
        ExpLaurent::from_poly(LaurentPoly::monomial(&u, exps, GaussRat::i())),
    )?;

    // The contraction is a scalar; report it on a dζ slot so the check
    // shares the one-form defect format.
    let scalar = a_u.contract(&y);
    let mut lhs = OneFormSym::zero(&u);
    lhs.set_coeff(zeta, scalar);
    let rhs = OneFormSym::zero(&u);
    Ok(CocycleCheck::from_sides(
        &format!("iya-k{k}"),
        lhs,
        rhs,
        vec!["the scalar i_Y A_U is carried on a dζ slot for reporting".into()],
    ))
}

/// Seeded sample of projective points, coordinates uniform in the unit box
/// before normalization.
pub fn sample_proj_points(n_points: usize, seed: u64) -> Vec<ProjPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_points);
    while out.len() < n_points {
        let mut h = [C0; 4];
        for c in &mut h {
            *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        if let Ok(p) = ProjPoint::new(h) {
            out.push(p);
        }
    }
    out
}

/// Seeded sample of points on the moment quadric ⟨v, ξ⟩ = 0, using the
/// parameterization ξ = t(−v₂, v₁).
pub fn sample_quadric_points(n_points: usize, seed: u64) -> Vec<ProjPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_points);
    while out.len() < n_points {
        let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let v = [c(), c()];
        let t = c();
        let p = PairedVector::new(v, [-t * v[1], t * v[0]]);
        debug_assert!(p.pairing().norm() < 1e-12);
        if let Ok(q) = eh_quotient_coords(&p) {
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_pair(rng: &mut ChaCha8Rng) -> PairedVector {
        let mut cx = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        PairedVector::new([cx(), cx()], [cx(), cx()])
    }

    #[test]
    fn constraint_defect_vanishes_for_all_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in -5..=5 {
            let p = random_pair(&mut rng);
            let zeta = p.pairing();
            let d = eh_constraint_check(&p, zeta, c(2.0, 1.0), n).unwrap();
            assert_eq!(d, 0.0, "n={n}");
            // Literal power evaluation agrees to roundoff.
            let lit = lifted_pairing_defect(&p, zeta, c(2.0, 1.0), n + 1, 1 - n).unwrap();
            assert!(lit <= 1e-12, "n={n}: {lit}");
        }
    }

    #[test]
    fn constraint_detects_off_locus_and_bad_weights() {
        let p = PairedVector::new([c(1.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]);
        // Off the constraint locus the defect scales by |ν|².
        let d = eh_constraint_check(&p, c(0.5, 0.0), c(2.0, 0.0), 0).unwrap();
        assert!((d - 4.0 * 0.5).abs() < 1e-14);
        // Unbalanced weights (n+1, −n) fail for |ν| ≠ 1.
        let bad = lifted_pairing_defect(&p, p.pairing(), c(2.0, 0.0), 4, -3).unwrap();
        assert!(bad > 1e-2);
        assert!(eh_constraint_check(&p, C0, C0, 0).is_err());
        assert!(lifted_pairing_defect(&p, C0, C0, 1, 1).is_err());
    }

    #[test]
    fn quotient_is_scale_invariant() {
        let p = PairedVector::new([c(0.3, -0.2), c(0.8, 0.1)], [c(-0.4, 0.6), c(0.2, 0.9)]);
        let q1 = eh_quotient_coords(&p).unwrap();
        let doubled = PairedVector::new(p.v.map(|x| 2.0 * x), p.xi.map(|x| 2.0 * x));
        let q2 = eh_quotient_coords(&doubled).unwrap();
        assert!(q1.distance(&q2) <= 1e-10);

        // Orbit of the n = 0 action through eight phases.
        for j in 0..8 {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
            let nu = Complex64::from_polar(1.0, theta);
            let acted = PairedVector::new(p.v.map(|x| nu * x), p.xi.map(|x| nu * x));
            assert!(q1.distance(&eh_quotient_coords(&acted).unwrap()) <= 1e-10);
        }

        let zero = PairedVector::new([C0; 2], [C0; 2]);
        assert!(eh_quotient_coords(&zero).is_err());
    }

    #[test]
    fn pairing_transforms_with_weight_two() {
        let p = PairedVector::new([c(0.3, -0.2), c(0.8, 0.1)], [c(-0.4, 0.6), c(0.2, 0.9)]);
        let nu = c(1.3, -0.7);
        let acted = PairedVector::new(p.v.map(|x| nu * x), p.xi.map(|x| nu * x));
        assert!((acted.pairing() - nu * nu * p.pairing()).norm() <= 1e-14);
    }

    #[test]
    fn contact_volume_coefficient_is_two_everywhere() {
        for p in sample_proj_points(256, 7) {
            let val = contact_nondegeneracy(&p);
            assert!(val > 1e-6);
            assert!((val - 2.0).abs() <= 1e-12, "value {val}");
        }
        for p in sample_quadric_points(32, 8) {
            assert!(contact_nondegeneracy(&p) > 1e-6);
        }
    }

    #[test]
    fn contact_verdict_is_chart_independent() {
        for p in sample_proj_points(16, 21) {
            for chart in 0..4 {
                if p.homogeneous()[chart].norm() > 0.1 {
                    let val = contact_nondegeneracy_in_chart(&p, chart).unwrap();
                    assert!((val - 2.0).abs() <= 1e-10, "chart {chart}: {val}");
                }
            }
        }
        let p = ProjPoint::new([c(1.0, 0.0), C0, C0, C0]).unwrap();
        assert!(contact_nondegeneracy_in_chart(&p, 1).is_err());
    }

    #[test]
    fn exact_one_form_has_zero_volume() {
        // θ = df for linear f has constant coefficients and dθ = 0.
        let mut theta = KForm::zero(3, 1);
        theta.add_coeff(&[0], c(0.7, -0.3));
        theta.add_coeff(&[1], c(-1.2, 0.4));
        theta.add_coeff(&[2], c(0.1, 2.0));
        let dtheta = KForm::zero(3, 2);
        let vol = theta.wedge(&dtheta);
        assert_eq!(vol.coeff(&[0, 1, 2]), C0);
    }

    #[test]
    fn moment_section_examples() {
        let on =
            eh_quotient_coords(&PairedVector::new([c(1.0, 0.0), C0], [C0, c(1.0, 0.0)])).unwrap();
        assert!(moment_section_value(&on).norm() <= 1e-14);

        let off =
            eh_quotient_coords(&PairedVector::new([c(1.0, 0.0), C0], [c(1.0, 0.0), C0])).unwrap();
        assert!((moment_section_value(&off) - c(1.0, 0.0)).norm() <= 1e-14);

        // The zero set survives representative rescaling and the lifted
        // action for every weight.
        let quad = PairedVector::new([c(0.4, 0.1), c(-0.3, 0.7)], [C0, C0]);
        let base = PairedVector::new(
            quad.v,
            [-c(0.9, -0.2) * quad.v[1], c(0.9, -0.2) * quad.v[0]],
        );
        assert!(base.pairing().norm() <= 1e-15);
        for n in -5..=5 {
            let nu = c(0.8, 0.5);
            let acted = PairedVector::new(
                base.v.map(|x| nu.powi(n + 1) * x),
                base.xi.map(|x| nu.powi(1 - n) * x),
            );
            let q = eh_quotient_coords(&acted).unwrap();
            assert!(moment_section_value(&q).norm() <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn iya_vanishes_in_flat_model() {
        for k in [1, 2] {
            let check = flat_iya_check(k).unwrap();
            assert!(check.pass, "k={k}");
        }

        // Adding a dξ₁ component breaks the contraction.
        let (mut a_u, _) = flat_connection_forms(1).unwrap();
        let u = flat_u_vars(1);
        let xi1 = u.require("xi1").unwrap();
        a_u.set_coeff(xi1, ExpLaurent::one(&u));
        let mut y = VectorFieldSym::zero(&u);
        let mut exps = vec![0i32; u.len()];
        exps[xi1] = 1;
        y.set_comp(
            "xi1",
            ExpLaurent::from_poly(LaurentPoly::monomial(&u, exps, GaussRat::i())),
        )
        .unwrap();
        assert!(!a_u.contract(&y).is_zero());
    }
}
