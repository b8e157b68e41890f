use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::rc::Rc;

use crate::error::{Error, Result};

use super::poly::check_same_vars;
use super::{ExpLaurent, ExpMonomial, LaurentPoly, SubstTarget, Substitution, VarSet};

/// One-form `Σ cᵢ dxᵢ` with exponential-Laurent coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneFormSym {
    vars: Rc<VarSet>,
    coeffs: BTreeMap<usize, ExpLaurent>,
}

/// Two-form `Σ_{i<j} cᵢⱼ dxᵢ∧dxⱼ`, keyed by i < j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoFormSym {
    vars: Rc<VarSet>,
    coeffs: BTreeMap<(usize, usize), ExpLaurent>,
}

/// Vector field `Σ Yⁱ ∂ᵢ` with exponential-Laurent components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorFieldSym {
    vars: Rc<VarSet>,
    comps: BTreeMap<usize, ExpLaurent>,
}

impl OneFormSym {
    pub fn zero(vars: &Rc<VarSet>) -> Self {
        OneFormSym {
            vars: Rc::clone(vars),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn vars(&self) -> &Rc<VarSet> {
        &self.vars
    }

    pub fn coeff(&self, i: usize) -> ExpLaurent {
        self.coeffs
            .get(&i)
            .cloned()
            .unwrap_or_else(|| ExpLaurent::zero(&self.vars))
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, ExpLaurent> {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, i: usize, c: ExpLaurent) {
        assert!(i < self.vars.len());
        if c.is_zero() {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, c);
        }
    }

    pub(crate) fn add_coeff(&mut self, i: usize, c: &ExpLaurent) {
        let s = &self.coeff(i) + c;
        self.set_coeff(i, s);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, f: &ExpLaurent) -> Self {
        let mut out = OneFormSym::zero(&self.vars);
        for (&i, c) in &self.coeffs {
            out.set_coeff(i, c * f);
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> TwoFormSym {
        let mut out = TwoFormSym::zero(&self.vars);
        for (&j, c) in &self.coeffs {
            for i in 0..self.vars.len() {
                if i == j {
                    continue;
                }
                let dc = c.partial(i);
                if dc.is_zero() {
                    continue;
                }
                // d(c dxⱼ) picks up ∂ᵢc dxᵢ∧dxⱼ.
                if i < j {
                    out.add_coeff(i, j, &dc);
                } else {
                    out.add_coeff(j, i, &(-&dc));
                }
            }
        }
        out
    }

    /// Contraction i_Y θ.
    pub fn contract(&self, y: &VectorFieldSym) -> ExpLaurent {
        check_same_vars(&self.vars, &y.vars).expect("contract");
        let mut acc = ExpLaurent::zero(&self.vars);
        for (&i, c) in &self.coeffs {
            if let Some(yc) = y.comps.get(&i) {
                acc = &acc + &(c * yc);
            }
        }
        acc
    }

    pub fn wedge(&self, other: &OneFormSym) -> TwoFormSym {
        check_same_vars(&self.vars, &other.vars).expect("wedge");
        let mut out = TwoFormSym::zero(&self.vars);
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                if i < j {
                    out.add_coeff(i, j, &(a * b));
                } else if j < i {
                    out.add_coeff(j, i, &(-&(a * b)));
                }
            }
        }
        out
    }

    /// Pull back along a substitution: dx ↦ d(target of x).
    pub fn pullback(&self, s: &Substitution) -> Result<OneFormSym> {
        check_same_vars(&self.vars, s.from_vars())?;
        let mut out = OneFormSym::zero(s.to_vars());
        for (&i, c) in &self.coeffs {
            let c2 = c.substitute(s)?;
            let dt = d_of_target(s.target(i)?);
            for (&j, t) in &dt.coeffs {
                out.add_coeff(j, &(&c2 * t));
            }
        }
        Ok(out)
    }

    /// Dense coefficient vector at a numeric point.
    pub fn eval(&self, vals: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.vars.len()];
        for (&i, c) in &self.coeffs {
            out[i] = c.eval(vals);
        }
        out
    }
}

fn d_of_target(t: &SubstTarget) -> OneFormSym {
    match t {
        SubstTarget::Poly(p) => formal_d(&ExpLaurent::from_poly(p.clone())),
        SubstTarget::Exp(em) => em.dlog().scale(&em.to_exp_laurent()),
    }
}

/// d of a scalar.
pub fn formal_d(f: &ExpLaurent) -> OneFormSym {
    let mut out = OneFormSym::zero(f.vars());
    for i in 0..f.vars().len() {
        out.set_coeff(i, f.partial(i));
    }
    out
}

/// Logarithmic derivative d(log a) = da/a. Defined only for units of the
/// class, i.e. a = c·Πxᵢ^kᵢ · e^q with a single exponential term.
pub fn dlog(a: &ExpLaurent) -> Result<OneFormSym> {
    let mut terms = a.terms().iter();
    let unit_err = || {
        Error::Symbolic("dlog needs a unit: one exponential term with a monomial prefactor".into())
    };
    let (q, p) = terms.next().ok_or_else(unit_err)?;
    if terms.next().is_some() {
        return Err(unit_err());
    }
    let (exps, coeff) = p.try_monomial().ok_or_else(unit_err)?;
    let m = LaurentPoly::monomial(a.vars(), exps.clone(), coeff.clone());
    Ok(ExpMonomial::new(m, q.clone())?.dlog())
}

impl ExpMonomial {
    /// dlog(m·e^r) = Σ (kᵢ/xᵢ + ∂ᵢr) dxᵢ for m = c·Πxᵢ^kᵢ.
    pub fn dlog(&self) -> OneFormSym {
        let vars = self.vars();
        let (exps, _) = self
            .prefactor()
            .try_monomial()
            .expect("ExpMonomial invariant");
        let exps = exps.clone();
        let mut out = OneFormSym::zero(vars);
        for i in 0..vars.len() {
            let mut c = ExpLaurent::from_poly(self.exponent().partial(i));
            if exps[i] != 0 {
                let mut e = vec![0; vars.len()];
                e[i] = -1;
                let recip = LaurentPoly::monomial(vars, e, super::GaussRat::int(exps[i] as i64));
                c = &c + &ExpLaurent::from_poly(recip);
            }
            out.set_coeff(i, c);
        }
        out
    }
}

impl Add for &OneFormSym {
    type Output = OneFormSym;
    fn add(self, rhs: &OneFormSym) -> OneFormSym {
        check_same_vars(&self.vars, &rhs.vars).expect("OneFormSym add");
        let mut out = self.clone();
        for (&i, c) in &rhs.coeffs {
            out.add_coeff(i, c);
        }
        out
    }
}

impl Sub for &OneFormSym {
    type Output = OneFormSym;
    fn sub(self, rhs: &OneFormSym) -> OneFormSym {
        self + &(-rhs)
    }
}

impl Neg for &OneFormSym {
    type Output = OneFormSym;
    fn neg(self) -> OneFormSym {
        let mut out = OneFormSym::zero(&self.vars);
        for (&i, c) in &self.coeffs {
            out.set_coeff(i, -c);
        }
        out
    }
}

impl fmt::Display for OneFormSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&i, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c}) d{}", self.vars.name(i))?;
        }
        Ok(())
    }
}

impl TwoFormSym {
    pub fn zero(vars: &Rc<VarSet>) -> Self {
        TwoFormSym {
            vars: Rc::clone(vars),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn vars(&self) -> &Rc<VarSet> {
        &self.vars
    }

    pub fn coeff(&self, i: usize, j: usize) -> ExpLaurent {
        assert!(i < j, "two-form coefficients are keyed by i < j");
        self.coeffs
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| ExpLaurent::zero(&self.vars))
    }

    pub fn coeffs(&self) -> &BTreeMap<(usize, usize), ExpLaurent> {
        &self.coeffs
    }

    pub fn add_coeff(&mut self, i: usize, j: usize, c: &ExpLaurent) {
        assert!(i < j && j < self.vars.len());
        let s = &self.coeff(i, j) + c;
        if s.is_zero() {
            self.coeffs.remove(&(i, j));
        } else {
            self.coeffs.insert((i, j), s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, f: &ExpLaurent) -> Self {
        let mut out = TwoFormSym::zero(&self.vars);
        for (&(i, j), c) in &self.coeffs {
            out.add_coeff(i, j, &(c * f));
        }
        out
    }

    /// Contraction i_Y β = Σ_{i<j} βᵢⱼ (Yⁱ dxⱼ − Yʲ dxᵢ).
    pub fn contract(&self, y: &VectorFieldSym) -> OneFormSym {
        check_same_vars(&self.vars, &y.vars).expect("contract");
        let mut out = OneFormSym::zero(&self.vars);
        for (&(i, j), c) in &self.coeffs {
            if let Some(yi) = y.comps.get(&i) {
                out.add_coeff(j, &(c * yi));
            }
            if let Some(yj) = y.comps.get(&j) {
                out.add_coeff(i, &(-&(c * yj)));
            }
        }
        out
    }
}

impl Add for &TwoFormSym {
    type Output = TwoFormSym;
    fn add(self, rhs: &TwoFormSym) -> TwoFormSym {
        check_same_vars(&self.vars, &rhs.vars).expect("TwoFormSym add");
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.coeffs {
            out.add_coeff(i, j, c);
        }
        out
    }
}

impl Sub for &TwoFormSym {
    type Output = TwoFormSym;
    fn sub(self, rhs: &TwoFormSym) -> TwoFormSym {
        self + &(-rhs)
    }
}

impl Neg for &TwoFormSym {
    type Output = TwoFormSym;
    fn neg(self) -> TwoFormSym {
        let mut out = TwoFormSym::zero(&self.vars);
        for (&(i, j), c) in &self.coeffs {
            out.add_coeff(i, j, &(-c));
        }
        out
    }
}

impl fmt::Display for TwoFormSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c}) d{}∧d{}", self.vars.name(i), self.vars.name(j))?;
        }
        Ok(())
    }
}

impl VectorFieldSym {
    pub fn zero(vars: &Rc<VarSet>) -> Self {
        VectorFieldSym {
            vars: Rc::clone(vars),
            comps: BTreeMap::new(),
        }
    }

    pub fn vars(&self) -> &Rc<VarSet> {
        &self.vars
    }

    pub fn set_comp(&mut self, name: &str, c: ExpLaurent) -> Result<()> {
        let i = self.vars.require(name)?;
        if c.is_zero() {
            self.comps.remove(&i);
        } else {
            self.comps.insert(i, c);
        }
        Ok(())
    }

    pub fn comp(&self, i: usize) -> ExpLaurent {
        self.comps
            .get(&i)
            .cloned()
            .unwrap_or_else(|| ExpLaurent::zero(&self.vars))
    }
}

#[cfg(test)]
mod tests {
    use super::super::GaussRat;
    use super::*;

    #[test]
    fn d_squared_vanishes() {
        let v = VarSet::new(["x", "y", "z"]);
        let x = LaurentPoly::var(&v, "x").unwrap();
        let y = LaurentPoly::var(&v, "y").unwrap();
        let f = ExpLaurent::exp_of(&x * &y).mul_poly(&(&x + &y.pow(-2).unwrap()));
        assert!(formal_d(&f).d().is_zero());
    }

    #[test]
    fn wedge_is_antisymmetric() {
        let v = VarSet::new(["x", "y"]);
        let x = LaurentPoly::var(&v, "x").unwrap();
        let y = LaurentPoly::var(&v, "y").unwrap();
        let a = formal_d(&ExpLaurent::from_poly(&x * &x));
        let b = formal_d(&ExpLaurent::exp_of(y.clone()));
        let ab = a.wedge(&b);
        let ba = b.wedge(&a);
        assert_eq!(ab, -&ba);
        assert!(a.wedge(&a).is_zero());
    }

    #[test]
    fn contraction_of_two_form() {
        let v = VarSet::new(["x", "y"]);
        let x = LaurentPoly::var(&v, "x").unwrap();
        // β = x dx∧dy, Y = ∂x  ⇒  i_Y β = x dy
        let mut beta = TwoFormSym::zero(&v);
        beta.add_coeff(0, 1, &ExpLaurent::from_poly(x.clone()));
        let mut yf = VectorFieldSym::zero(&v);
        yf.set_comp("x", ExpLaurent::one(&v)).unwrap();
        let got = beta.contract(&yf);
        let mut expect = OneFormSym::zero(&v);
        expect.set_coeff(1, ExpLaurent::from_poly(x));
        assert_eq!(got, expect);
    }

    #[test]
    fn dlog_of_exponential_monomial() {
        let v = VarSet::new(["v", "xi", "zeta"]);
        let vv = LaurentPoly::var(&v, "v").unwrap();
        let xi = LaurentPoly::var(&v, "xi").unwrap();
        let zeta = LaurentPoly::var(&v, "zeta").unwrap();
        // m·e^r with m = v/ζ, r = vξ/ζ
        let m = LaurentPoly::monomial(&v, vec![1, 0, -1], GaussRat::one());
        let r = &(&vv * &xi) * &zeta.pow(-1).unwrap();
        let em = ExpMonomial::new(m, r.clone()).unwrap();
        let got = em.dlog();

        // dv/v − dζ/ζ + d(vξ/ζ)
        let mut expect = formal_d(&ExpLaurent::from_poly(r));
        expect.add_coeff(
            0,
            &ExpLaurent::from_poly(LaurentPoly::monomial(&v, vec![-1, 0, 0], GaussRat::one())),
        );
        expect.add_coeff(
            2,
            &ExpLaurent::from_poly(LaurentPoly::monomial(&v, vec![0, 0, -1], GaussRat::int(-1))),
        );
        assert_eq!(got, expect);

        // The free function agrees on the same unit, and rejects sums.
        let unit = em.to_exp_laurent();
        assert_eq!(dlog(&unit).unwrap(), expect);
        let sum = &unit + &ExpLaurent::one(&v);
        assert!(dlog(&sum).is_err());
        assert!(dlog(&ExpLaurent::zero(&v)).is_err());
    }

    #[test]
    fn pullback_commutes_with_d() {
        // θ = t dt on the line; under t ↦ v/z both routes give the same form.
        let from = VarSet::new(["t"]);
        let to = VarSet::new(["v", "z"]);
        let t = LaurentPoly::var(&from, "t").unwrap();
        let vz = LaurentPoly::monomial(&to, vec![1, -1], GaussRat::one());
        let s = Substitution::new(&from, &to).set_poly("t", vz).unwrap();

        let f = ExpLaurent::from_poly(&t * &t);
        let df = formal_d(&f);
        let route1 = df.pullback(&s).unwrap();
        let route2 = formal_d(&f.substitute(&s).unwrap());
        assert_eq!(route1, route2);
    }

    #[test]
    fn pullback_of_exponential_target() {
        // dt under t ↦ e^v gives e^v dv.
        let from = VarSet::new(["t"]);
        let to = VarSet::new(["v"]);
        let one = LaurentPoly::one(&to);
        let r = LaurentPoly::var(&to, "v").unwrap();
        let s = Substitution::new(&from, &to)
            .set_exp("t", one, r.clone())
            .unwrap();
        let t = LaurentPoly::var(&from, "t").unwrap();
        let dt = formal_d(&ExpLaurent::from_poly(t));
        let got = dt.pullback(&s).unwrap();
        let mut expect = OneFormSym::zero(&to);
        expect.set_coeff(0, ExpLaurent::exp_of(r));
        assert_eq!(got, expect);
    }
}
