use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// Value of a complex-valued function of real coordinates together with as
/// many derivative layers as are known to be valid.
///
/// `order` is the contract: 0 = value only, 1 = value and gradient,
/// 2 = value, gradient and Hessian. Arithmetic propagates the minimum order
/// of its inputs; `partial` lowers it by one. Accessors assert the layer they
/// read is covered, so consuming a derivative that was never computed is a
/// panic, not a silent zero.
#[derive(Clone, Debug)]
pub struct Jet {
    order: usize,
    v: Complex64,
    g: DVector<Complex64>,
    h: DMatrix<Complex64>,
}

const C0: Complex64 = Complex64::new(0.0, 0.0);

impl Jet {
    pub fn constant(dim: usize, v: Complex64) -> Self {
        Jet {
            order: 2,
            v,
            g: DVector::from_element(dim, C0),
            h: DMatrix::from_element(dim, dim, C0),
        }
    }

    /// The i-th real coordinate as an exact jet.
    pub fn coordinate(x: &[f64], i: usize) -> Self {
        let dim = x.len();
        let mut g = DVector::from_element(dim, C0);
        g[i] = Complex64::new(1.0, 0.0);
        Jet {
            order: 2,
            v: Complex64::new(x[i], 0.0),
            g,
            h: DMatrix::from_element(dim, dim, C0),
        }
    }

    pub fn from_parts(
        order: usize,
        v: Complex64,
        g: DVector<Complex64>,
        h: DMatrix<Complex64>,
    ) -> Self {
        assert!(order <= 2);
        assert_eq!(g.len(), h.nrows());
        assert_eq!(h.nrows(), h.ncols());
        Jet { order, v, g, h }
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> Complex64 {
        self.v
    }

    pub fn grad(&self) -> &DVector<Complex64> {
        assert!(self.order >= 1, "gradient requested from an order-0 jet");
        &self.g
    }

    pub fn hess(&self) -> &DMatrix<Complex64> {
        assert!(
            self.order >= 2,
            "Hessian requested from an order-{} jet",
            self.order
        );
        &self.h
    }

    /// Jet of ∂ᵢf, one order lower than self.
    pub fn partial(&self, i: usize) -> Jet {
        assert!(self.order >= 1, "partial of an order-0 jet");
        let dim = self.dim();
        let g = if self.order >= 2 {
            self.h.column(i).into_owned()
        } else {
            DVector::from_element(dim, C0)
        };
        Jet {
            order: self.order - 1,
            v: self.g[i],
            g,
            h: DMatrix::from_element(dim, dim, C0),
        }
    }

    pub fn scale(&self, c: Complex64) -> Jet {
        Jet {
            order: self.order,
            v: self.v * c,
            g: &self.g * c,
            h: &self.h * c,
        }
    }

    /// Complex conjugate. Coordinates are real, so conjugation commutes with
    /// every partial derivative.
    pub fn conj(&self) -> Jet {
        Jet {
            order: self.order,
            v: self.v.conj(),
            g: self.g.map(|z| z.conj()),
            h: self.h.map(|z| z.conj()),
        }
    }

    /// Multiplicative inverse: 1/u, −u′/u², −u″/u² + 2u′u′ᵀ/u³.
    pub fn recip(&self) -> Jet {
        assert!(self.v.norm() > 0.0, "reciprocal of a zero-valued jet");
        let inv = Complex64::new(1.0, 0.0) / self.v;
        let inv2 = inv * inv;
        let g = &self.g * (-inv2);
        let h = &self.h * (-inv2) + (&self.g * self.g.transpose()) * (2.0 * inv2 * inv);
        Jet {
            order: self.order,
            v: inv,
            g,
            h,
        }
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        assert_eq!(self.dim(), rhs.dim());
        Jet {
            order: self.order.min(rhs.order),
            v: self.v + rhs.v,
            g: &self.g + &rhs.g,
            h: &self.h + &rhs.h,
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self + &(-rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        assert_eq!(self.dim(), rhs.dim());
        let order = self.order.min(rhs.order);
        let v = self.v * rhs.v;
        let g = &self.g * rhs.v + &rhs.g * self.v;
        let h = if order >= 2 {
            &self.h * rhs.v
                + &rhs.h * self.v
                + &self.g * rhs.g.transpose()
                + &rhs.g * self.g.transpose()
        } else {
            DMatrix::from_element(self.dim(), self.dim(), C0)
        };
        Jet { order, v, g, h }
    }
}

/// Vector of jets: a vector field's components and their derivatives.
#[derive(Clone, Debug)]
pub struct JetVec {
    pub comps: Vec<Jet>,
}

impl JetVec {
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(Jet::order).min().unwrap_or(2)
    }

    pub fn values(&self) -> DVector<Complex64> {
        DVector::from_iterator(self.comps.len(), self.comps.iter().map(Jet::value))
    }

    /// Jacobian J with J[(b, a)] = ∂ₐ(component b): columns are directions.
    pub fn jacobian(&self) -> DMatrix<Complex64> {
        let n = self.comps.len();
        DMatrix::from_fn(n, n, |b, a| self.comps[b].grad()[a])
    }
}

/// Square matrix of jets, row-major.
#[derive(Clone, Debug)]
pub struct JetMat {
    pub n: usize,
    pub elems: Vec<Jet>,
}

impl JetMat {
    pub fn from_constant(dim: usize, m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let n = m.nrows();
        let elems = (0..n * n)
            .map(|k| Jet::constant(dim, m[(k / n, k % n)]))
            .collect();
        JetMat { n, elems }
    }

    pub fn elem(&self, r: usize, c: usize) -> &Jet {
        &self.elems[r * self.n + c]
    }

    pub fn values(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |r, c| self.elem(r, c).value())
    }

    /// Matrix-vector product with full jet propagation.
    pub fn mul_vec(&self, x: &JetVec) -> JetVec {
        assert_eq!(self.n, x.dim());
        let comps = (0..self.n)
            .map(|r| {
                let mut acc = Jet::constant(x.comps[0].dim(), C0);
                for c in 0..self.n {
                    acc = &acc + &(self.elem(r, c) * &x.comps[c]);
                }
                acc
            })
            .collect();
        JetVec { comps }
    }
}

/// Order-2 jet of an opaque function by central differences with one
/// Richardson extrapolation level. Used to cross-check exact jets.
pub fn fd_jet(f: &dyn Fn(&[f64]) -> Complex64, x: &[f64], h: f64) -> Jet {
    let n = x.len();
    let eval = |dx: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, d) in dx {
            y[i] += d;
        }
        f(&y)
    };

    let grad_at =
        |h: f64| DVector::from_fn(n, |i, _| (eval(&[(i, h)]) - eval(&[(i, -h)])) / (2.0 * h));
    let hess_at = |h: f64| {
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                (eval(&[(i, h)]) - 2.0 * eval(&[]) + eval(&[(i, -h)])) / (h * h)
            } else {
                (eval(&[(i, h), (j, h)]) - eval(&[(i, h), (j, -h)]) - eval(&[(i, -h), (j, h)])
                    + eval(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h)
            }
        })
    };

    // Central differences have O(h²) error, so (4·D(h/2) − D(h))/3 cancels
    // the leading term.
    let four = Complex64::new(4.0, 0.0);
    let third = Complex64::new(1.0 / 3.0, 0.0);
    let g = (grad_at(h / 2.0) * four - grad_at(h)) * third;
    let hm = (hess_at(h / 2.0) * four - hess_at(h)) * third;
    Jet::from_parts(2, eval(&[]), g, hm)
}
