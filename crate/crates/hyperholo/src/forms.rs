use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::jet::{Jet, JetVec};

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Sorted k-element index subsets of 0..n in lexicographic order.
pub(crate) fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn combo_rank(list: &[Vec<usize>], combo: &[usize]) -> usize {
    list.binary_search_by(|c| c.as_slice().cmp(combo))
        .expect("combo out of range")
}

/// Sorts indices in place; returns the permutation sign, or None on repeats.
pub(crate) fn sort_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j] < idx[j - 1] {
            idx.swap(j, j - 1);
            sign = -sign;
            j -= 1;
        }
    }
    for w in idx.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some(sign)
}

/// Alternating k-form value at a point: dense coefficients over the sorted
/// index combinations in lexicographic order.
#[derive(Clone, Debug)]
pub struct KForm {
    dim: usize,
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl KForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        KForm {
            dim,
            degree,
            coeffs: vec![C0; combos(dim, degree).len()],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient on an arbitrary index tuple, with the sign of sorting it.
    pub fn coeff(&self, idx: &[usize]) -> Complex64 {
        assert_eq!(idx.len(), self.degree);
        let mut s = idx.to_vec();
        match sort_sign(&mut s) {
            None => C0,
            Some(sign) => {
                let list = combos(self.dim, self.degree);
                self.coeffs[combo_rank(&list, &s)] * sign
            }
        }
    }

    pub fn add_coeff(&mut self, idx: &[usize], v: Complex64) {
        assert_eq!(idx.len(), self.degree);
        let mut s = idx.to_vec();
        if let Some(sign) = sort_sign(&mut s) {
            let list = combos(self.dim, self.degree);
            self.coeffs[combo_rank(&list, &s)] += v * sign;
        }
    }

    pub fn add(&self, rhs: &KForm) -> KForm {
        assert_eq!((self.dim, self.degree), (rhs.dim, rhs.degree));
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        KForm {
            dim: self.dim,
            degree: self.degree,
            coeffs,
        }
    }

    pub fn sub(&self, rhs: &KForm) -> KForm {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> KForm {
        KForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn wedge(&self, rhs: &KForm) -> KForm {
        assert_eq!(self.dim, rhs.dim);
        let mut out = KForm::zero(self.dim, self.degree + rhs.degree);
        let la = combos(self.dim, self.degree);
        let lb = combos(self.dim, rhs.degree);
        for (ia, ca) in la.iter().zip(&self.coeffs) {
            if ca.norm() == 0.0 {
                continue;
            }
            for (ib, cb) in lb.iter().zip(&rhs.coeffs) {
                if cb.norm() == 0.0 {
                    continue;
                }
                let mut idx: Vec<usize> = ia.iter().chain(ib.iter()).copied().collect();
                idx_push(&mut out, &mut idx, ca * cb);
            }
        }
        out
    }

    /// Interior product with a tangent vector.
    pub fn contract(&self, x: &[Complex64]) -> KForm {
        assert_eq!(x.len(), self.dim);
        assert!(self.degree >= 1);
        let mut out = KForm::zero(self.dim, self.degree - 1);
        let list = combos(self.dim, self.degree);
        let out_list = combos(self.dim, self.degree - 1);
        for (c, v) in list.iter().zip(&self.coeffs) {
            if v.norm() == 0.0 {
                continue;
            }
            for (pos, &a) in c.iter().enumerate() {
                let rest: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != pos)
                    .map(|(_, &t)| t)
                    .collect();
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                out.coeffs[combo_rank(&out_list, &rest)] += v * x[a] * sign;
            }
        }
        out
    }

    /// Pullback under the linear map whose columns are the images of the
    /// basis vectors: (L*β)(v…) = β(Lv…).
    pub fn pullback_linear(&self, l: &DMatrix<Complex64>) -> KForm {
        assert_eq!(l.nrows(), self.dim);
        assert_eq!(l.ncols(), self.dim);
        let mut out = KForm::zero(self.dim, self.degree);
        let list = combos(self.dim, self.degree);
        for (i_out, target) in list.iter().enumerate() {
            let mut acc = C0;
            for (src, v) in list.iter().zip(&self.coeffs) {
                if v.norm() == 0.0 {
                    continue;
                }
                let k = self.degree;
                let minor = DMatrix::from_fn(k, k, |r, c| l[(src[r], target[c])]);
                acc += v * minor.determinant();
            }
            out.coeffs[i_out] = acc;
        }
        out
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// β as the antisymmetric matrix M with M[(a,b)] = β(eₐ, e_b).
    pub fn as_matrix(&self) -> DMatrix<Complex64> {
        assert_eq!(self.degree, 2);
        DMatrix::from_fn(self.dim, self.dim, |a, b| {
            if a == b {
                C0
            } else {
                self.coeff(&[a, b])
            }
        })
    }

    pub fn from_matrix(m: &DMatrix<Complex64>) -> KForm {
        assert_eq!(m.nrows(), m.ncols());
        let dim = m.nrows();
        let mut out = KForm::zero(dim, 2);
        let list = combos(dim, 2);
        for (i, c) in list.iter().enumerate() {
            out.coeffs[i] = (m[(c[0], c[1])] - m[(c[1], c[0])]) * Complex64::new(0.5, 0.0);
        }
        out
    }
}

fn idx_push(out: &mut KForm, idx: &mut [usize], v: Complex64) {
    if let Some(sign) = sort_sign(idx) {
        let list = combos(out.dim, out.degree);
        out.coeffs[combo_rank(&list, idx)] += v * sign;
    }
}

/// k-form whose coefficients are jets, so it can be differentiated as far as
/// the coefficient orders allow.
#[derive(Clone, Debug)]
pub struct FormJet {
    dim: usize,
    degree: usize,
    coeffs: Vec<Jet>,
}

impl FormJet {
    pub fn zero(dim: usize, degree: usize) -> Self {
        FormJet {
            dim,
            degree,
            coeffs: vec![Jet::constant(dim, C0); combos(dim, degree).len()],
        }
    }

    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<Jet>) -> Self {
        assert_eq!(coeffs.len(), combos(dim, degree).len());
        FormJet {
            dim,
            degree,
            coeffs,
        }
    }

    /// Constant-coefficient form, exact to order 2.
    pub fn from_kform_constant(f: &KForm) -> Self {
        FormJet {
            dim: f.dim,
            degree: f.degree,
            coeffs: f.coeffs.iter().map(|&c| Jet::constant(f.dim, c)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.coeffs.iter().map(Jet::order).min().unwrap_or(2)
    }

    pub fn coeff_jet(&self, idx: &[usize]) -> Jet {
        let mut s = idx.to_vec();
        match sort_sign(&mut s) {
            None => Jet::constant(self.dim, C0),
            Some(sign) => {
                let list = combos(self.dim, self.degree);
                self.coeffs[combo_rank(&list, &s)].scale(Complex64::new(sign, 0.0))
            }
        }
    }

    pub fn set_coeff(&mut self, idx: &[usize], jet: Jet) {
        let mut s = idx.to_vec();
        let sign = sort_sign(&mut s).expect("repeated index");
        let list = combos(self.dim, self.degree);
        let r = combo_rank(&list, &s);
        self.coeffs[r] = jet.scale(Complex64::new(sign, 0.0));
    }

    pub fn value(&self) -> KForm {
        KForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(Jet::value).collect(),
        }
    }

    pub fn add(&self, rhs: &FormJet) -> FormJet {
        assert_eq!((self.dim, self.degree), (rhs.dim, rhs.degree));
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        FormJet {
            dim: self.dim,
            degree: self.degree,
            coeffs,
        }
    }

    pub fn sub(&self, rhs: &FormJet) -> FormJet {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> FormJet {
        FormJet {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|j| j.scale(c)).collect(),
        }
    }

    /// Exterior derivative; coefficient order drops by one.
    pub fn d(&self) -> FormJet {
        let mut out = FormJet::zero(self.dim, self.degree + 1);
        let in_list = combos(self.dim, self.degree);
        let out_list = combos(self.dim, self.degree + 1);
        for (r, c_out) in out_list.iter().enumerate() {
            let mut acc: Option<Jet> = None;
            for (pos, &t) in c_out.iter().enumerate() {
                let rest: Vec<usize> = c_out
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != pos)
                    .map(|(_, &u)| u)
                    .collect();
                let base = &self.coeffs[combo_rank(&in_list, &rest)];
                let term = base.partial(t);
                let term = if pos % 2 == 0 { term } else { -&term };
                acc = Some(match acc {
                    None => term,
                    Some(a) => &a + &term,
                });
            }
            out.coeffs[r] = acc.unwrap();
        }
        out
    }

    /// Interior product with a vector field, keeping jets.
    pub fn contract(&self, x: &JetVec) -> FormJet {
        assert_eq!(x.dim(), self.dim);
        assert!(self.degree >= 1);
        let mut out = FormJet::zero(self.dim, self.degree - 1);
        let list = combos(self.dim, self.degree);
        let out_list = combos(self.dim, self.degree - 1);
        for (c, v) in list.iter().zip(&self.coeffs) {
            for (pos, &a) in c.iter().enumerate() {
                let rest: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != pos)
                    .map(|(_, &t)| t)
                    .collect();
                let term = v * &x.comps[a];
                let term = if pos % 2 == 0 { term } else { -&term };
                let r = combo_rank(&out_list, &rest);
                out.coeffs[r] = &out.coeffs[r] + &term;
            }
        }
        out
    }

    pub fn wedge(&self, rhs: &FormJet) -> FormJet {
        assert_eq!(self.dim, rhs.dim);
        let mut out = FormJet::zero(self.dim, self.degree + rhs.degree);
        let la = combos(self.dim, self.degree);
        let lb = combos(self.dim, rhs.degree);
        let out_list = combos(self.dim, out.degree);
        for (ia, ca) in la.iter().zip(&self.coeffs) {
            for (ib, cb) in lb.iter().zip(&rhs.coeffs) {
                let mut idx: Vec<usize> = ia.iter().chain(ib.iter()).copied().collect();
                if let Some(sign) = sort_sign(&mut idx) {
                    let r = combo_rank(&out_list, &idx);
                    let term = (ca * cb).scale(Complex64::new(sign, 0.0));
                    out.coeffs[r] = &out.coeffs[r] + &term;
                }
            }
        }
        out
    }
}

/// Cartan formula: ℒ_X ω = i_X dω + d(i_X ω), evaluated at the point.
pub fn lie_derivative(omega: &FormJet, x: &JetVec) -> KForm {
    let a = omega.d().contract(x);
    let b = omega.contract(x).d();
    a.add(&b).value()
}

/// Trace pairing ½·tr(M_ω⁻¹ M_F) of a nondegenerate 2-form against another.
pub fn lambda_trace(omega: &KForm, f: &KForm) -> Complex64 {
    let m_omega = omega.as_matrix();
    let m_f = f.as_matrix();
    let inv = m_omega
        .try_inverse()
        .expect("degenerate 2-form in trace pairing");
    (inv * m_f).trace() * Complex64::new(0.5, 0.0)
}

/// (1,1)-projection of a 2-form with respect to an almost complex structure:
/// ½(β + β(I·, I·)).
pub fn proj_11(beta: &KForm, i_mat: &DMatrix<Complex64>) -> KForm {
    beta.add(&beta.pullback_linear(i_mat))
        .scale(Complex64::new(0.5, 0.0))
}

/// (0,1)-projection of a one-form given as a coefficient row:
/// ½(θ + i·θ∘I).
pub fn proj_01_row(theta: &[Complex64], i_mat: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = theta.len();
    (0..n)
        .map(|a| {
            let mut ti = C0;
            for b in 0..n {
                ti += theta[b] * i_mat[(b, a)];
            }
            (theta[a] + Complex64::new(0.0, 1.0) * ti) * 0.5
        })
        .collect()
}

/// Hodge star of a 2-form in dimension 4 with real metric g and orientation
/// sign s relative to the coordinate 4-volume e⁰∧e¹∧e²∧e³.
pub fn hodge_star_2form_4d(f: &KForm, g: &DMatrix<f64>, orient: f64) -> KForm {
    assert_eq!(f.dim(), 4);
    assert_eq!(f.degree(), 2);
    let det = g.determinant();
    assert!(det > 0.0, "metric must be positive definite");
    let vol = orient * det.sqrt();
    let ginv = g.clone().try_inverse().expect("metric invertible");

    // Raise both indices.
    let mut up = DMatrix::from_element(4, 4, C0);
    for c in 0..4 {
        for d in 0..4 {
            let mut acc = C0;
            for cp in 0..4 {
                for dp in 0..4 {
                    let w = ginv[(c, cp)] * ginv[(d, dp)];
                    if w != 0.0 {
                        acc += f.coeff(&[cp, dp]) * w;
                    }
                }
            }
            up[(c, d)] = acc;
        }
    }

    let mut out = KForm::zero(4, 2);
    for a in 0..4 {
        for b in (a + 1)..4 {
            let mut acc = C0;
            for c in 0..4 {
                for d in 0..4 {
                    let mut idx = [a, b, c, d];
                    if let Some(sign) = sort_sign(&mut idx) {
                        acc += up[(c, d)] * sign;
                    }
                }
            }
            out.add_coeff(&[a, b], acc * 0.5 * vol);
        }
    }
    out
}
