use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::forms::{hodge_star_2form_4d, lambda_trace, lie_derivative, proj_11, FormJet, KForm};
use crate::jet::{Jet, JetMat, JetVec};
use crate::report::CheckReport;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

pub type ScalarFn = Rc<dyn Fn(&[f64]) -> Jet>;
pub type VectorFn = Rc<dyn Fn(&[f64]) -> JetVec>;
pub type MatrixFn = Rc<dyn Fn(&[f64]) -> JetMat>;
pub type FormFn = Rc<dyn Fn(&[f64]) -> FormJet>;

/// The identities checked pointwise on every model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityId {
    Lie1,
    Lie2,
    Lie3,
    Moment,
    Ddc2,
    Ddc3,
    Lefschetz,
    F11I,
    F11J,
    F11K,
    Asd4,
    Ixf,
}

impl IdentityId {
    pub const ALL: [IdentityId; 12] = [
        IdentityId::Lie1,
        IdentityId::Lie2,
        IdentityId::Lie3,
        IdentityId::Moment,
        IdentityId::Ddc2,
        IdentityId::Ddc3,
        IdentityId::Lefschetz,
        IdentityId::F11I,
        IdentityId::F11J,
        IdentityId::F11K,
        IdentityId::Asd4,
        IdentityId::Ixf,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            IdentityId::Lie1 => "lie1",
            IdentityId::Lie2 => "lie2",
            IdentityId::Lie3 => "lie3",
            IdentityId::Moment => "moment",
            IdentityId::Ddc2 => "ddc2",
            IdentityId::Ddc3 => "ddc3",
            IdentityId::Lefschetz => "lefschetz",
            IdentityId::F11I => "f11-i",
            IdentityId::F11J => "f11-j",
            IdentityId::F11K => "f11-k",
            IdentityId::Asd4 => "asd4",
            IdentityId::Ixf => "ixf",
        }
    }

    /// Anti-self-duality only makes sense on 4-dimensional charts.
    pub fn requires_dim4(&self) -> bool {
        matches!(self, IdentityId::Asd4)
    }
}

/// A chart model of a hyperkähler manifold with an isometric circle action:
/// the triple of Kähler forms, the metric, the complex structures, the
/// action field X and its moment map μ, all as jet-valued fields.
pub struct HyperkahlerModel {
    id: String,
    dim: usize,
    k: usize,
    global_frame: bool,
    omega: [FormFn; 3],
    metric: MatrixFn,
    cplx: [MatrixFn; 3],
    x: VectorFn,
    mu: ScalarFn,
}

pub const MODEL_IDS: [&str; 3] = ["flat1", "flat2", "semiflat1"];

impl std::fmt::Debug for HyperkahlerModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HyperkahlerModel")
            .field("id", &self.id)
            .field("dim", &self.dim)
            .field("k", &self.k)
            .finish_non_exhaustive()
    }
}

impl HyperkahlerModel {
    /// k copies of the standard quaternionic plane. Per copy, real
    /// coordinates (x, y, u, v) with z = x+iy, w = u+iv:
    /// ω₁ = dx∧dy + du∧dv, ω₂ = dx∧du − dy∧dv, ω₃ = dx∧dv + dy∧du,
    /// X = −v∂u + u∂v, μ = −(u² + v²)/2.
    pub fn flat(k: usize) -> Self {
        assert!(k >= 1);
        let dim = 4 * k;

        let mut w1 = KForm::zero(dim, 2);
        let mut w2 = KForm::zero(dim, 2);
        let mut w3 = KForm::zero(dim, 2);
        for j in 0..k {
            let (x, y, u, v) = (4 * j, 4 * j + 1, 4 * j + 2, 4 * j + 3);
            w1.add_coeff(&[x, y], C1);
            w1.add_coeff(&[u, v], C1);
            w2.add_coeff(&[x, u], C1);
            w2.add_coeff(&[y, v], -C1);
            w3.add_coeff(&[x, v], C1);
            w3.add_coeff(&[y, u], C1);
        }

        let mut mi = DMatrix::from_element(dim, dim, C0);
        let mut mj = DMatrix::from_element(dim, dim, C0);
        let mut mk = DMatrix::from_element(dim, dim, C0);
        for j in 0..k {
            let (x, y, u, v) = (4 * j, 4 * j + 1, 4 * j + 2, 4 * j + 3);
            // Columns are images of the basis vectors.
            mi[(y, x)] = C1;
            mi[(x, y)] = -C1;
            mi[(v, u)] = C1;
            mi[(u, v)] = -C1;

            mj[(u, x)] = C1;
            mj[(v, y)] = -C1;
            mj[(x, u)] = -C1;
            mj[(y, v)] = C1;

            mk[(v, x)] = C1;
            mk[(u, y)] = C1;
            mk[(y, u)] = -C1;
            mk[(x, v)] = -C1;
        }
        let g = DMatrix::from_diagonal_element(dim, dim, C1);

        let x_field: VectorFn = Rc::new(move |p: &[f64]| {
            let mut comps = vec![Jet::constant(p.len(), C0); p.len()];
            for j in 0..p.len() / 4 {
                let (u, v) = (4 * j + 2, 4 * j + 3);
                comps[u] = -&Jet::coordinate(p, v);
                comps[v] = Jet::coordinate(p, u);
            }
            JetVec { comps }
        });

        let mu: ScalarFn = Rc::new(move |p: &[f64]| {
            let mut acc = Jet::constant(p.len(), C0);
            for j in 0..p.len() / 4 {
                let u = Jet::coordinate(p, 4 * j + 2);
                let v = Jet::coordinate(p, 4 * j + 3);
                acc = &acc + &(&(&u * &u) + &(&v * &v));
            }
            acc.scale(Complex64::new(-0.5, 0.0))
        });

        HyperkahlerModel {
            id: format!("flat{k}"),
            dim,
            k,
            global_frame: true,
            omega: [const_form(w1), const_form(w2), const_form(w3)],
            metric: const_mat(g),
            cplx: [const_mat(mi), const_mat(mj), const_mat(mk)],
            x: x_field,
            mu,
        }
    }

    /// Semi-flat torus-fibration chart over a linear base: coordinates
    /// (x₁..x_m, y₁..y_m) with a constant antisymmetric coupling W and a
    /// constant positive potential Hessian Q,
    /// ω₁ + iω₂ = Σ_{j<k} W_jk d(x_j+iy_j)∧d(x_k+iy_k),
    /// ω₃ = Σ Q_jk dx_j∧dy_k, g = Q⊕Q.
    ///
    /// Rejected unless Q is symmetric positive, W antisymmetric, and
    /// (Q⁻¹W)² = −1 (without the last, the triple is not hyperkähler).
    pub fn semiflat(w: DMatrix<f64>, q: DMatrix<f64>) -> Result<Self> {
        let m = w.nrows();
        if w.ncols() != m || q.nrows() != m || q.ncols() != m {
            return Err(Error::InvalidModel(
                "W and Q must be square of equal size".into(),
            ));
        }
        if !m.is_multiple_of(2) || m == 0 {
            return Err(Error::InvalidModel(
                "coupling size must be even and positive".into(),
            ));
        }
        if (&q - q.transpose()).amax() > 1e-12 {
            return Err(Error::InvalidModel("Q must be symmetric".into()));
        }
        if (&w + w.transpose()).amax() > 1e-12 {
            return Err(Error::InvalidModel("W must be antisymmetric".into()));
        }
        if q.clone().cholesky().is_none() {
            return Err(Error::InvalidModel("Q must be positive definite".into()));
        }
        let q_inv = q
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidModel("Q must be invertible".into()))?;
        let b = &q_inv * &w;
        let b2 = &b * &b;
        if (&b2 + DMatrix::<f64>::identity(m, m)).amax() > 1e-10 {
            return Err(Error::InvalidModel(
                "(Q⁻¹W)² = −1 fails: the pair (W, Q) is not hyperkähler".into(),
            ));
        }

        let dim = 2 * m;
        let cplx = |mat: DMatrix<f64>| mat.map(|t| Complex64::new(t, 0.0));

        // 2-form matrices M with M[a,b] = ω(e_a, e_b), in x-then-y blocks.
        let block = |xx: &DMatrix<f64>, xy: &DMatrix<f64>, yx: &DMatrix<f64>, yy: &DMatrix<f64>| {
            let mut out = DMatrix::<f64>::zeros(dim, dim);
            out.view_mut((0, 0), (m, m)).copy_from(xx);
            out.view_mut((0, m), (m, m)).copy_from(xy);
            out.view_mut((m, 0), (m, m)).copy_from(yx);
            out.view_mut((m, m), (m, m)).copy_from(yy);
            out
        };
        let zero = DMatrix::<f64>::zeros(m, m);
        let m1 = block(&w, &zero, &zero, &(-&w));
        let m2 = block(&zero, &w, &w, &zero);
        let m3 = block(&zero, &q, &(-&q), &zero);
        let g = block(&q, &zero, &zero, &q);

        let w1 = KForm::from_matrix(&cplx(m1.clone()));
        let w2 = KForm::from_matrix(&cplx(m2.clone()));
        let w3 = KForm::from_matrix(&cplx(m3.clone()));

        // Iᵢ = −G⁻¹Mᵢ (columns are images).
        let g_inv = g.clone().try_inverse().expect("block metric invertible");
        let i1 = cplx(-(&g_inv * &m1));
        let i2 = cplx(-(&g_inv * &m2));
        let i3 = cplx(-(&g_inv * &m3));

        // The circle action rotates the base: X = −Bx on the x-block.
        let minus_b = -&b;
        let x_field: VectorFn = Rc::new(move |p: &[f64]| {
            let n = p.len();
            let m = n / 2;
            let mut comps = vec![Jet::constant(n, C0); n];
            for (r, comp) in comps.iter_mut().enumerate().take(m) {
                let mut acc = Jet::constant(n, C0);
                for s in 0..m {
                    let c = minus_b[(r, s)];
                    if c != 0.0 {
                        acc = &acc + &Jet::coordinate(p, s).scale(Complex64::new(c, 0.0));
                    }
                }
                *comp = acc;
            }
            JetVec { comps }
        });

        // μ = −½ xᵀQx.
        let q_mu = q.clone();
        let mu: ScalarFn = Rc::new(move |p: &[f64]| {
            let n = p.len();
            let m = n / 2;
            let mut acc = Jet::constant(n, C0);
            for r in 0..m {
                for s in 0..m {
                    let c = q_mu[(r, s)];
                    if c != 0.0 {
                        let t = &Jet::coordinate(p, r) * &Jet::coordinate(p, s);
                        acc = &acc + &t.scale(Complex64::new(c, 0.0));
                    }
                }
            }
            acc.scale(Complex64::new(-0.5, 0.0))
        });

        Ok(HyperkahlerModel {
            id: "semiflat".into(),
            dim,
            k: m / 2,
            global_frame: false,
            omega: [const_form(w1), const_form(w2), const_form(w3)],
            metric: const_mat(cplx(g)),
            cplx: [const_mat(i1), const_mat(i2), const_mat(i3)],
            x: x_field,
            mu,
        })
    }

    pub fn by_id(id: &str) -> Result<Self> {
        match id {
            "flat1" => Ok(HyperkahlerModel::flat(1)),
            "flat2" => Ok(HyperkahlerModel::flat(2)),
            "semiflat1" => {
                let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
                let q = DMatrix::identity(2, 2);
                let mut m = HyperkahlerModel::semiflat(w, q)?;
                m.id = "semiflat1".into();
                Ok(m)
            }
            _ => Err(Error::UnknownId(id.into(), MODEL_IDS.join(", "))),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// True when the chart carries a single global constant frame in which
    /// componentwise derivatives of vector fields are covariant.
    pub fn global_frame(&self) -> bool {
        self.global_frame
    }

    /// Seeded uniform samples from the chart box [−1,1]^dim.
    pub fn sample_points(&self, n_points: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n_points)
            .map(|_| (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect()
    }

    pub fn omega_at(&self, i: usize, p: &[f64]) -> FormJet {
        (self.omega[i])(p)
    }

    pub fn metric_at(&self, p: &[f64]) -> JetMat {
        (self.metric)(p)
    }

    pub fn cplx_at(&self, i: usize, p: &[f64]) -> JetMat {
        (self.cplx[i])(p)
    }

    pub fn x_at(&self, p: &[f64]) -> JetVec {
        (self.x)(p)
    }

    pub fn mu_at(&self, p: &[f64]) -> Jet {
        (self.mu)(p)
    }

    /// dᵢᶜμ with the fixed sign convention (dᵢᶜf)(Y) = −df(IᵢY): the
    /// coefficient on dx_a is −Σ_b ∂_bμ · (Iᵢ)_{b,a}. Coefficients keep
    /// one derivative layer, so d(dᵢᶜμ) is available downstream.
    pub fn dc_mu_jet(&self, i: usize, p: &[f64]) -> FormJet {
        assert!((1..=3).contains(&i));
        let mu = self.mu_at(p);
        let imat = self.cplx_at(i - 1, p);
        let mut out = FormJet::zero(self.dim, 1);
        for a in 0..self.dim {
            let mut acc = Jet::constant(self.dim, C0);
            for b in 0..self.dim {
                acc = &acc + &(&mu.partial(b) * imat.elem(b, a));
            }
            out.set_coeff(&[a], -&acc);
        }
        out
    }

    pub fn dc_mu(&self, i: usize, p: &[f64]) -> KForm {
        self.dc_mu_jet(i, p).value()
    }

    /// F = ω₁ + d(d₁ᶜμ), the curvature of the canonical circle-invariant
    /// line-bundle connection.
    pub fn curvature_f(&self, p: &[f64]) -> KForm {
        self.omega_at(0, p)
            .value()
            .add(&self.dc_mu_jet(1, p).d().value())
    }

    /// Complex structure of the twistor family at parameter ζ (ζ = ∞ lives
    /// on the conjugate chart):
    /// I_ζ = [(1−|ζ|²)I + 2Im(ζ)J − 2Re(ζ)K] / (1+|ζ|²).
    ///
    /// The stereographic weights are fixed by requiring dz + ζdw̄ to be
    /// (1,0) in the flat model.
    pub fn complex_structure_at_zeta(&self, zeta: Complex64, p: &[f64]) -> DMatrix<Complex64> {
        let n2 = zeta.norm_sqr();
        let s = 1.0 / (1.0 + n2);
        let c1 = Complex64::new((1.0 - n2) * s, 0.0);
        let c2 = Complex64::new(2.0 * zeta.im * s, 0.0);
        let c3 = Complex64::new(-2.0 * zeta.re * s, 0.0);
        let i1 = self.cplx_at(0, p).values();
        let i2 = self.cplx_at(1, p).values();
        let i3 = self.cplx_at(2, p).values();
        i1 * c1 + i2 * c2 + i3 * c3
    }

    /// The twistor-fibre (1,0)-form family
    /// φ_ζ = 2iζ·d₁ᶜμ + (1+ζ²)·d₂ᶜμ + i(1−ζ²)·d₃ᶜμ.
    pub fn phi_zeta_jet(&self, zeta: Complex64, p: &[f64]) -> FormJet {
        let a = self.dc_mu_jet(1, p).scale(2.0 * CI * zeta);
        let b = self.dc_mu_jet(2, p).scale(C1 + zeta * zeta);
        let c = self.dc_mu_jet(3, p).scale(CI * (C1 - zeta * zeta));
        a.add(&b).add(&c)
    }

    pub fn phi_zeta(&self, zeta: Complex64, p: &[f64]) -> KForm {
        self.phi_zeta_jet(zeta, p).value()
    }

    /// Residual of (dφ_ζ)^{(1,1) for I_ζ} = 2iζ·F in the chart directions.
    pub fn phi_curvature_defect(&self, zeta: Complex64, p: &[f64]) -> f64 {
        let dphi = self.phi_zeta_jet(zeta, p).d().value();
        let iz = self.complex_structure_at_zeta(zeta, p);
        let lhs = proj_11(&dphi, &iz);
        let rhs = self.curvature_f(p).scale(2.0 * CI * zeta);
        lhs.sub(&rhs).max_norm()
    }

    /// Residual of the base-direction pairing 2∂̄μ = (iζ)⁻¹ φ(∂̄X^{1,0}),
    /// where X^{1,0} = ½(X − iI_ζX) and ∂̄ acts componentwise in the global
    /// constant frame.
    pub fn phi_moment_defect(&self, zeta: Complex64, p: &[f64]) -> Result<f64> {
        if !self.global_frame {
            return Err(Error::OutOfDomain(
                "componentwise ∂̄ of X needs a global constant frame".into(),
            ));
        }
        if zeta.norm() == 0.0 {
            return Err(Error::OutOfDomain("ζ = 0 divides by ζ".into()));
        }
        let iz = self.complex_structure_at_zeta(zeta, p);
        let x = self.x_at(p);
        let dx = x.jacobian();

        // D = Jacobian of X^{1,0} = ½(DX − i·I_ζ·DX); I_ζ is constant on
        // these charts, so it commutes with the componentwise derivative.
        let half = Complex64::new(0.5, 0.0);
        let d10 = (&dx - &iz * &dx * CI) * half;

        // P^{0,1} acting on tangent vectors: Y ↦ ½(Y + iI_ζY).
        let p01 = (DMatrix::from_diagonal_element(self.dim, self.dim, C1) + &iz * CI) * half;

        let phi = self.phi_zeta(zeta, p);
        let phi_row = DVector::from_fn(self.dim, |a, _| phi.coeff(&[a])).transpose();
        let lhs = (&phi_row * &d10 * &p01) * (C1 / (CI * zeta));

        let mu = self.mu_at(p);
        let dmu_row = mu.grad().transpose();
        let rhs = (dmu_row * &p01) * Complex64::new(2.0, 0.0);

        Ok(cmax(&(lhs - rhs)))
    }

    /// Pointwise residual of one structure identity.
    pub fn identity_defect(&self, id: IdentityId, p: &[f64]) -> Result<f64> {
        if id.requires_dim4() && self.dim != 4 {
            return Err(Error::OutOfDomain(format!(
                "{} needs a 4-dimensional chart, model is {}-dimensional",
                id.id(),
                self.dim
            )));
        }
        let x = self.x_at(p);
        let defect = match id {
            IdentityId::Lie1 => lie_derivative(&self.omega_at(0, p), &x).max_norm(),
            IdentityId::Lie2 => {
                let l = lie_derivative(&self.omega_at(1, p), &x);
                l.add(&self.omega_at(2, p).value()).max_norm()
            }
            IdentityId::Lie3 => {
                let l = lie_derivative(&self.omega_at(2, p), &x);
                l.sub(&self.omega_at(1, p).value()).max_norm()
            }
            IdentityId::Moment => {
                let ix = self.omega_at(0, p).contract(&self.x_at(p)).value();
                let mu = self.mu_at(p);
                let mut dmu = KForm::zero(self.dim, 1);
                for a in 0..self.dim {
                    dmu.add_coeff(&[a], mu.grad()[a]);
                }
                ix.sub(&dmu).max_norm()
            }
            IdentityId::Ddc2 => {
                let ddc = self.dc_mu_jet(2, p).d().value();
                ddc.add(&self.omega_at(1, p).value()).max_norm()
            }
            IdentityId::Ddc3 => {
                let ddc = self.dc_mu_jet(3, p).d().value();
                ddc.add(&self.omega_at(2, p).value()).max_norm()
            }
            IdentityId::Lefschetz => {
                // 2k = Λ₁ω₁ = Λ₂ω₂ = −Λ₂dd₂ᶜμ = Δμ with Δμ = −Λ₁dd₁ᶜμ.
                let two_k = Complex64::new(2.0 * self.k as f64, 0.0);
                let w1 = self.omega_at(0, p).value();
                let w2 = self.omega_at(1, p).value();
                let vals = [
                    lambda_trace(&w1, &w1),
                    lambda_trace(&w2, &w2),
                    -lambda_trace(&w2, &self.dc_mu_jet(2, p).d().value()),
                    -lambda_trace(&w1, &self.dc_mu_jet(1, p).d().value()),
                ];
                vals.iter().map(|v| (v - two_k).norm()).fold(0.0, f64::max)
            }
            IdentityId::F11I | IdentityId::F11J | IdentityId::F11K => {
                let i = match id {
                    IdentityId::F11I => 0,
                    IdentityId::F11J => 1,
                    _ => 2,
                };
                let f = self.curvature_f(p);
                let imat = self.cplx_at(i, p).values();
                f.pullback_linear(&imat).sub(&f).max_norm()
            }
            IdentityId::Asd4 => {
                let f = self.curvature_f(p);
                let g = self.metric_at(p).values().map(|z| z.re);
                let orient = self.orientation_sign(p);
                let star = hodge_star_2form_4d(&f, &g, orient);
                f.add(&star).scale(Complex64::new(0.5, 0.0)).max_norm()
            }
            IdentityId::Ixf => {
                let f = FormJet::from_kform_constant(&self.curvature_f(p));
                let ixf = f.contract(&x).value();
                // lift = μ + g(X,X)
                let g = self.metric_at(p);
                let gx = g.mul_vec(&x);
                let mut gxx = Jet::constant(self.dim, C0);
                for a in 0..self.dim {
                    gxx = &gxx + &(&x.comps[a] * &gx.comps[a]);
                }
                let lift = &self.mu_at(p) + &gxx;
                let mut dlift = KForm::zero(self.dim, 1);
                for a in 0..self.dim {
                    dlift.add_coeff(&[a], lift.grad()[a]);
                }
                ixf.sub(&dlift).max_norm()
            }
        };
        Ok(defect)
    }

    /// Orientation of the chart relative to the coordinate volume, read off
    /// from ω₁∧ω₁ (dimension 4 only).
    pub fn orientation_sign(&self, p: &[f64]) -> f64 {
        assert_eq!(self.dim, 4);
        let w1 = self.omega_at(0, p).value();
        let vol = w1.wedge(&w1).coeff(&[0, 1, 2, 3]);
        if vol.re >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Load-time structure checks: quaternion relations, closedness,
    /// g–ω–I compatibility, metric positivity.
    pub fn validate(&self, n_points: usize, seed: u64, tol: f64) -> CheckReport {
        let mut report = CheckReport::new("validate", Some(self.id.clone()), seed, tol);
        let points = self.sample_points(n_points.max(1), seed);
        let n = points.len();

        let mut quat: f64 = 0.0;
        let mut closed: f64 = 0.0;
        let mut compat: f64 = 0.0;
        let mut posdef: f64 = 0.0;
        for p in &points {
            let i = self.cplx_at(0, p).values();
            let j = self.cplx_at(1, p).values();
            let kq = self.cplx_at(2, p).values();
            let id = DMatrix::from_diagonal_element(self.dim, self.dim, C1);
            for r in [
                cmax(&(&i * &i + &id)),
                cmax(&(&j * &j + &id)),
                cmax(&(&kq * &kq + &id)),
                cmax(&(&i * &j - &kq)),
            ] {
                quat = quat.max(r);
            }

            let g = self.metric_at(p).values();
            for w in 0..3 {
                let omega = self.omega_at(w, p);
                closed = closed.max(omega.d().value().max_norm());
                // ωᵢ(·,·) = g(Iᵢ·,·) ⇔ Mᵢ = IᵢᵀG.
                let m = omega.value().as_matrix();
                let imat = self.cplx_at(w, p).values();
                compat = compat.max(cmax(&(&m - imat.transpose() * &g)));
            }

            let g_re = g.map(|z| z.re);
            let g_im_max = g.map(|z| z.im).amax();
            let eig = g_re.symmetric_eigen();
            let min_eig = eig
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            posdef = posdef.max(g_im_max).max((-min_eig).max(0.0));
        }

        report.push("quaternion-relations", n, quat, tol);
        report.push("omega-closed", n, closed, tol);
        report.push("compatibility", n, compat, tol);
        report.push("metric-positive", n, posdef, tol);
        report
    }
}

fn const_form(f: KForm) -> FormFn {
    Rc::new(move |p: &[f64]| {
        assert_eq!(f.dim(), p.len());
        FormJet::from_kform_constant(&f)
    })
}

fn const_mat(m: DMatrix<Complex64>) -> MatrixFn {
    Rc::new(move |p: &[f64]| JetMat::from_constant(p.len(), &m))
}

/// Entrywise sup of moduli; nalgebra's amax is real-only.
pub(crate) fn cmax<R, C, S>(m: &nalgebra::Matrix<Complex64, R, C, S>) -> f64
where
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S: nalgebra::Storage<Complex64, R, C>,
{
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::proj_01_row;
    use crate::jet::fd_jet;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn pt1() -> Vec<f64> {
        vec![0.3, -0.7, 0.5, 0.9]
    }

    #[test]
    fn flat_dc1_mu_is_v_du_minus_u_dv() {
        let m = HyperkahlerModel::flat(1);
        let p = pt1();
        let (u, v) = (p[2], p[3]);
        let dc = m.dc_mu(1, &p);
        assert!((dc.coeff(&[2]) - c(v)).norm() < 1e-14);
        assert!((dc.coeff(&[3]) - c(-u)).norm() < 1e-14);
        assert!(dc.coeff(&[0]).norm() < 1e-14);
        assert!(dc.coeff(&[1]).norm() < 1e-14);
    }

    #[test]
    fn flat_ddc1_mu_is_minus_2_du_dv() {
        // equivalently −i dw∧dw̄
        let m = HyperkahlerModel::flat(1);
        let p = pt1();
        let ddc = m.dc_mu_jet(1, &p).d().value();
        assert!((ddc.coeff(&[2, 3]) - c(-2.0)).norm() < 1e-14);
        assert!(ddc.coeff(&[0, 1]).norm() < 1e-14);
        assert!(ddc.coeff(&[0, 2]).norm() < 1e-14);
    }

    #[test]
    fn flat_curvature_matches_closed_form() {
        // F = (i/2)(dz∧dz̄ − dw∧dw̄) = dx∧dy − du∧dv.
        let m = HyperkahlerModel::flat(1);
        let p = pt1();
        let f = m.curvature_f(&p);
        assert!((f.coeff(&[0, 1]) - c(1.0)).norm() < 1e-14);
        assert!((f.coeff(&[2, 3]) - c(-1.0)).norm() < 1e-14);
        assert!(f.coeff(&[0, 2]).norm() < 1e-14);
        assert!(f.coeff(&[1, 3]).norm() < 1e-14);
    }

    #[test]
    fn flat_lefschetz_values() {
        let m = HyperkahlerModel::flat(1);
        let p = pt1();
        let w1 = m.omega_at(0, &p).value();
        let ddc = m.dc_mu_jet(1, &p).d().value();
        assert!((lambda_trace(&w1, &w1) - c(2.0)).norm() < 1e-14);
        assert!((lambda_trace(&w1, &ddc) - c(-2.0)).norm() < 1e-14);
        let f = m.curvature_f(&p);
        assert!(lambda_trace(&w1, &f).norm() < 1e-14);
    }

    #[test]
    fn all_identities_hold_on_flat_models() {
        for k in [1usize, 2] {
            let m = HyperkahlerModel::flat(k);
            for p in m.sample_points(8, 7) {
                for id in IdentityId::ALL {
                    if id.requires_dim4() && m.dim() != 4 {
                        continue;
                    }
                    let d = m.identity_defect(id, &p).unwrap();
                    assert!(d <= 1e-9, "flat{k} {} defect {d}", id.id());
                }
            }
        }
    }

    #[test]
    fn all_identities_hold_on_semiflat_models() {
        // The shipped unit example and an anisotropic variant.
        let models = [
            HyperkahlerModel::by_id("semiflat1").unwrap(),
            HyperkahlerModel::semiflat(
                DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
                DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]),
            )
            .unwrap(),
        ];
        for m in &models {
            for p in m.sample_points(8, 11) {
                for id in IdentityId::ALL {
                    if id.requires_dim4() && m.dim() != 4 {
                        continue;
                    }
                    let d = m.identity_defect(id, &p).unwrap();
                    assert!(d <= 1e-9, "{} {} defect {d}", m.id(), id.id());
                }
            }
        }
    }

    #[test]
    fn semiflat_rejects_bad_input() {
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        // Non-symmetric Q.
        let q_bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.0, 1.0]);
        assert!(HyperkahlerModel::semiflat(w.clone(), q_bad).is_err());
        // Symmetric positive Q that fails (Q⁻¹W)² = −1.
        let q_scaled = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(HyperkahlerModel::semiflat(w.clone(), q_scaled).is_err());
        // Non-antisymmetric W.
        let w_bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(HyperkahlerModel::semiflat(w_bad, DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn semiflat_curvature_is_constant_in_both_blocks() {
        // F = −Σ_{j<k} W_jk (dx_j∧dx_k + dy_j∧dy_k). The variant with only
        // the y-block cannot be the curvature: it is not (1,1) for J.
        let m = HyperkahlerModel::by_id("semiflat1").unwrap();
        for p in m.sample_points(4, 3) {
            let f = m.curvature_f(&p);
            assert!((f.coeff(&[0, 1]) - c(-1.0)).norm() < 1e-12);
            assert!((f.coeff(&[2, 3]) - c(-1.0)).norm() < 1e-12);
            assert!(f.coeff(&[0, 2]).norm() < 1e-12);
            assert!(f.coeff(&[0, 3]).norm() < 1e-12);
            assert!(f.coeff(&[1, 2]).norm() < 1e-12);
            assert!(f.coeff(&[1, 3]).norm() < 1e-12);

            // y-block-only variant: J-pullback flips it into the x-block.
            let mut fy = KForm::zero(4, 2);
            fy.add_coeff(&[2, 3], c(-1.0));
            let jmat = m.cplx_at(1, &p).values();
            let defect = fy.pullback_linear(&jmat).sub(&fy).max_norm();
            assert!(defect > 0.5, "y-only form unexpectedly (1,1) for J");
        }
    }

    #[test]
    fn validate_passes_on_shipped_models() {
        for id in MODEL_IDS {
            let m = HyperkahlerModel::by_id(id).unwrap();
            let r = m.validate(16, 5, 1e-10);
            assert!(r.pass, "validate failed for {id}: {}", r.to_text());
        }
    }

    #[test]
    fn zeta_family_interpolates_the_triple() {
        let m = HyperkahlerModel::flat(1);
        let p = pt1();
        let i0 = m.complex_structure_at_zeta(Complex64::new(0.0, 0.0), &p);
        assert!(cmax(&(i0 - m.cplx_at(0, &p).values())) < 1e-14);
        // I_ζ² = −1 at random ζ.
        for zeta in [Complex64::new(0.7, -1.3), Complex64::new(-0.2, 0.05)] {
            let iz = m.complex_structure_at_zeta(zeta, &p);
            let id = DMatrix::from_diagonal_element(4, 4, c(1.0));
            assert!(cmax(&(&iz * &iz + id)) < 1e-13);
        }
    }

    #[test]
    fn dv_and_dxi_are_type_10_for_zeta() {
        // dv = dz + ζdw̄ → row (1, i, ζ, −iζ); dξ = dw − ζdz̄ → (−ζ, iζ, 1, i).
        // A (1,0)-form satisfies θ∘I_ζ = iθ.
        let m = HyperkahlerModel::flat(1);
        let p = pt1();
        let zeta = Complex64::new(0.4, 0.8);
        let iz = m.complex_structure_at_zeta(zeta, &p);
        let rows = [[C1, CI, zeta, -CI * zeta], [-zeta, CI * zeta, C1, CI]];
        for row in rows {
            for a in 0..4 {
                let mut ti = C0;
                for b in 0..4 {
                    ti += row[b] * iz[(b, a)];
                }
                assert!((ti - CI * row[a]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn phi_specializes_at_zeta_zero_and_contracts_x() {
        let m = HyperkahlerModel::flat(1);
        let p = pt1();
        let phi0 = m.phi_zeta(C0, &p);
        let expect = m.dc_mu(2, &p).add(&m.dc_mu(3, &p).scale(CI));
        assert!(phi0.sub(&expect).max_norm() < 1e-14);

        // i_Xφ = −2iζ·g(X,X)
        let zeta = Complex64::new(-0.9, 0.35);
        let phi = m.phi_zeta(zeta, &p);
        let x = m.x_at(&p).values();
        let ix = phi.contract(x.as_slice());
        let gxx = c(p[2] * p[2] + p[3] * p[3]);
        let got = ix.coeffs()[0];
        assert!((got - (-2.0 * CI * zeta * gxx)).norm() < 1e-13);

        // φ is (1,0): its (0,1)-projection vanishes.
        let iz = m.complex_structure_at_zeta(zeta, &p);
        let row: Vec<Complex64> = (0..4).map(|a| phi.coeff(&[a])).collect();
        let p01 = proj_01_row(&row, &iz);
        assert!(p01.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-13);
    }

    #[test]
    fn phi_identities_hold_at_random_zeta() {
        for model in ["flat1", "flat2"] {
            let m = HyperkahlerModel::by_id(model).unwrap();
            let points = m.sample_points(6, 19);
            let zetas = [
                Complex64::new(0.3, 0.4),
                Complex64::new(-1.7, 0.2),
                Complex64::new(0.0, -1.9),
            ];
            for p in &points {
                for &z in &zetas {
                    assert!(m.phi_curvature_defect(z, p) <= 1e-10);
                    assert!(m.phi_moment_defect(z, p).unwrap() <= 1e-10);
                }
            }
        }
        // Semi-flat charts satisfy the projected curvature identity too.
        let m = HyperkahlerModel::by_id("semiflat1").unwrap();
        for p in m.sample_points(4, 21) {
            assert!(m.phi_curvature_defect(Complex64::new(0.6, -0.3), &p) <= 1e-10);
        }
    }

    #[test]
    fn phi_moment_contract_violations() {
        let m = HyperkahlerModel::flat(1);
        let p = pt1();
        assert!(m.phi_moment_defect(C0, &p).is_err());
        let sf = HyperkahlerModel::by_id("semiflat1").unwrap();
        assert!(sf.phi_moment_defect(Complex64::new(0.5, 0.0), &p).is_err());
    }

    #[test]
    fn phi_moment_vanishes_at_the_fixed_locus() {
        // w = 0 is fixed by the circle action: both sides vanish.
        let m = HyperkahlerModel::flat(1);
        let p = vec![0.4, -0.2, 0.0, 0.0];
        let z = Complex64::new(0.8, 0.1);
        assert!(m.phi_moment_defect(z, &p).unwrap() < 1e-14);
        let phi = m.phi_zeta(z, &p);
        assert!(phi.max_norm() < 1e-14);
    }

    #[test]
    fn asd_contract_violation_outside_dim_4() {
        let m = HyperkahlerModel::flat(2);
        let p = m.sample_points(1, 1).pop().unwrap();
        assert!(m.identity_defect(IdentityId::Asd4, &p).is_err());
    }

    #[test]
    fn exact_jets_agree_with_finite_differences() {
        let m = HyperkahlerModel::by_id("semiflat1").unwrap();
        let p = pt1();
        let exact = m.mu_at(&p);
        let mu_val = {
            let mu = Rc::clone(&m.mu);
            move |q: &[f64]| (mu)(q).value()
        };
        let fd = fd_jet(&mu_val, &p, 1e-4);
        assert!((exact.value() - fd.value()).norm() < 1e-12);
        assert!(cmax(&(exact.grad() - fd.grad())) < 1e-8);
        assert!(cmax(&(exact.hess() - fd.hess())) < 1e-6);
    }

    #[test]
    fn unknown_model_id_lists_valid_ids() {
        let err = HyperkahlerModel::by_id("nosuch").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("flat1") && msg.contains("semiflat1"));
    }
}
