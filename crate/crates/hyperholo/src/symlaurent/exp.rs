use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use crate::error::{Error, Result};

use super::poly::check_same_vars;
use super::{GaussRat, LaurentPoly, VarSet};

/// `m · e^r` with m a single invertible Laurent term and r a Laurent
/// polynomial. This is the class closed under the coordinate changes we use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpMonomial {
    m: LaurentPoly,
    r: LaurentPoly,
}

impl ExpMonomial {
    pub fn new(m: LaurentPoly, r: LaurentPoly) -> Result<Self> {
        check_same_vars(m.vars(), r.vars())?;
        let (_, c) = m
            .try_monomial()
            .ok_or_else(|| Error::Symbolic("ExpMonomial needs a single-term prefactor".into()))?;
        if c.is_zero() {
            return Err(Error::Symbolic(
                "ExpMonomial prefactor must be nonzero".into(),
            ));
        }
        Ok(ExpMonomial { m, r })
    }

    pub fn poly(m: LaurentPoly) -> Result<Self> {
        let z = LaurentPoly::zero(m.vars());
        ExpMonomial::new(m, z)
    }

    pub fn vars(&self) -> &Rc<VarSet> {
        self.m.vars()
    }

    pub fn prefactor(&self) -> &LaurentPoly {
        &self.m
    }

    pub fn exponent(&self) -> &LaurentPoly {
        &self.r
    }

    pub fn pow(&self, k: i32) -> Result<Self> {
        ExpMonomial::new(self.m.pow(k)?, self.r.scale(&GaussRat::int(k as i64)))
    }

    pub fn to_exp_laurent(&self) -> ExpLaurent {
        let mut out = ExpLaurent::zero(self.vars());
        out.add_term(self.r.clone(), self.m.clone());
        out
    }
}

/// Finite sum `Σ pⱼ · e^{qⱼ}` with Laurent-polynomial prefactors pⱼ and
/// pairwise distinct Laurent-polynomial exponents qⱼ.
///
/// Distinct exponents are linearly independent over the prefactor ring, so
/// keeping the map keyed by exponent and free of zero prefactors makes the
/// representation canonical: equality of values is equality of structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpLaurent {
    vars: Rc<VarSet>,
    terms: BTreeMap<LaurentPoly, LaurentPoly>,
}

impl ExpLaurent {
    pub fn zero(vars: &Rc<VarSet>) -> Self {
        ExpLaurent {
            vars: Rc::clone(vars),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Rc<VarSet>) -> Self {
        ExpLaurent::from_poly(LaurentPoly::one(vars))
    }

    pub fn constant(vars: &Rc<VarSet>, c: GaussRat) -> Self {
        ExpLaurent::from_poly(LaurentPoly::constant(vars, c))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        let mut out = ExpLaurent::zero(p.vars());
        out.add_term(LaurentPoly::zero(p.vars()), p);
        out
    }

    /// e^q
    pub fn exp_of(q: LaurentPoly) -> Self {
        let one = LaurentPoly::one(q.vars());
        let mut out = ExpLaurent::zero(q.vars());
        out.add_term(q, one);
        out
    }

    pub fn vars(&self) -> &Rc<VarSet> {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<LaurentPoly, LaurentPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Some(p) iff the value is the plain polynomial p (no exponential part).
    pub fn try_poly(&self) -> Option<LaurentPoly> {
        if self.terms.is_empty() {
            return Some(LaurentPoly::zero(&self.vars));
        }
        if self.terms.len() > 1 {
            return None;
        }
        let (q, p) = self.terms.iter().next().unwrap();
        if q.is_zero() {
            Some(p.clone())
        } else {
            None
        }
    }

    pub(crate) fn add_term(&mut self, q: LaurentPoly, p: LaurentPoly) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(q) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &p;
                if s.is_zero() {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        let mut out = ExpLaurent::zero(&self.vars);
        for (q, p) in &self.terms {
            out.add_term(q.clone(), p.scale(c));
        }
        out
    }

    pub fn mul_poly(&self, m: &LaurentPoly) -> Self {
        let mut out = ExpLaurent::zero(&self.vars);
        for (q, p) in &self.terms {
            out.add_term(q.clone(), p * m);
        }
        out
    }

    /// Multiply by e^r: shifts every exponent.
    pub fn mul_exp(&self, r: &LaurentPoly) -> Self {
        let mut out = ExpLaurent::zero(&self.vars);
        for (q, p) in &self.terms {
            out.add_term(q + r, p.clone());
        }
        out
    }

    pub fn mul_expmonomial(&self, em: &ExpMonomial) -> Self {
        self.mul_poly(em.prefactor()).mul_exp(em.exponent())
    }

    /// Formal partial derivative: d(p·e^q) = (∂p + p·∂q)·e^q.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = ExpLaurent::zero(&self.vars);
        for (q, p) in &self.terms {
            out.add_term(q.clone(), &p.partial(i) + &(p * &q.partial(i)));
        }
        out
    }

    pub fn partial_name(&self, name: &str) -> Result<Self> {
        Ok(self.partial(self.vars.require(name)?))
    }

    pub fn eval(&self, vals: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (q, p) in &self.terms {
            acc += p.eval(vals) * q.eval(vals).exp();
        }
        acc
    }

    pub fn substitute(&self, s: &Substitution) -> Result<ExpLaurent> {
        check_same_vars(&self.vars, &s.from)?;
        let mut out = ExpLaurent::zero(&s.to);
        for (q, p) in &self.terms {
            let q2 = s.apply_poly_strict(q)?;
            let p2 = s.apply_poly(p)?;
            out = &out + &p2.mul_exp(&q2);
        }
        Ok(out)
    }
}

impl Add for &ExpLaurent {
    type Output = ExpLaurent;
    fn add(self, rhs: &ExpLaurent) -> ExpLaurent {
        check_same_vars(&self.vars, &rhs.vars).expect("ExpLaurent add");
        let mut out = self.clone();
        for (q, p) in &rhs.terms {
            out.add_term(q.clone(), p.clone());
        }
        out
    }
}

impl Sub for &ExpLaurent {
    type Output = ExpLaurent;
    fn sub(self, rhs: &ExpLaurent) -> ExpLaurent {
        self + &(-rhs)
    }
}

impl Neg for &ExpLaurent {
    type Output = ExpLaurent;
    fn neg(self) -> ExpLaurent {
        let mut out = ExpLaurent::zero(&self.vars);
        for (q, p) in &self.terms {
            out.add_term(q.clone(), -p);
        }
        out
    }
}

impl Mul for &ExpLaurent {
    type Output = ExpLaurent;
    fn mul(self, rhs: &ExpLaurent) -> ExpLaurent {
        check_same_vars(&self.vars, &rhs.vars).expect("ExpLaurent mul");
        let mut out = ExpLaurent::zero(&self.vars);
        for (qa, pa) in &self.terms {
            for (qb, pb) in &rhs.terms {
                out.add_term(qa + qb, pa * pb);
            }
        }
        out
    }
}

impl fmt::Display for ExpLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (q, p) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if q.is_zero() {
                write!(f, "[{p}]")?;
            } else {
                write!(f, "[{p}]*exp({q})")?;
            }
        }
        Ok(())
    }
}

/// What a variable may be replaced by.
#[derive(Clone, Debug)]
pub enum SubstTarget {
    /// Arbitrary Laurent polynomial; usable wherever the variable occurs with
    /// nonnegative powers (negative powers additionally need it to be a
    /// monomial).
    Poly(LaurentPoly),
    /// `m·e^r`; usable anywhere in prefactors, but only with r = 0 inside
    /// exponents.
    Exp(ExpMonomial),
}

/// Total variable substitution from one VarSet into another. Variables whose
/// names occur in both sets default to themselves; everything else must be
/// given a target before use.
#[derive(Clone, Debug)]
pub struct Substitution {
    from: Rc<VarSet>,
    to: Rc<VarSet>,
    targets: Vec<Option<SubstTarget>>,
}

impl Substitution {
    pub fn new(from: &Rc<VarSet>, to: &Rc<VarSet>) -> Self {
        let targets = (0..from.len())
            .map(|i| {
                to.index(from.name(i)).map(|_| {
                    SubstTarget::Poly(LaurentPoly::var(to, from.name(i)).expect("shared name"))
                })
            })
            .collect();
        Substitution {
            from: Rc::clone(from),
            to: Rc::clone(to),
            targets,
        }
    }

    pub fn from_vars(&self) -> &Rc<VarSet> {
        &self.from
    }

    pub fn to_vars(&self) -> &Rc<VarSet> {
        &self.to
    }

    pub fn set(mut self, name: &str, target: SubstTarget) -> Result<Self> {
        let i = self.from.require(name)?;
        let tvars = match &target {
            SubstTarget::Poly(p) => p.vars(),
            SubstTarget::Exp(em) => em.vars(),
        };
        check_same_vars(tvars, &self.to)?;
        self.targets[i] = Some(target);
        Ok(self)
    }

    pub fn set_poly(self, name: &str, p: LaurentPoly) -> Result<Self> {
        self.set(name, SubstTarget::Poly(p))
    }

    /// name ↦ m·e^r
    pub fn set_exp(self, name: &str, m: LaurentPoly, r: LaurentPoly) -> Result<Self> {
        let em = ExpMonomial::new(m, r)?;
        self.set(name, SubstTarget::Exp(em))
    }

    pub fn target(&self, i: usize) -> Result<&SubstTarget> {
        self.targets[i].as_ref().ok_or_else(|| {
            Error::Symbolic(format!(
                "no substitution target for variable `{}`",
                self.from.name(i)
            ))
        })
    }

    /// Substitute into a Laurent polynomial; the result is exponential in
    /// general because targets may carry e^r factors.
    pub fn apply_poly(&self, p: &LaurentPoly) -> Result<ExpLaurent> {
        check_same_vars(p.vars(), &self.from)?;
        let mut out = ExpLaurent::zero(&self.to);
        for (exps, c) in p.terms() {
            let mut acc = ExpLaurent::constant(&self.to, c.clone());
            for (i, &k) in exps.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match self.target(i)? {
                    SubstTarget::Exp(em) => {
                        acc = acc.mul_expmonomial(&em.pow(k)?);
                    }
                    SubstTarget::Poly(t) => {
                        acc = &acc * &ExpLaurent::from_poly(t.pow(k)?);
                    }
                }
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// Substitute into an exponent: the result must stay a plain polynomial.
    pub fn apply_poly_strict(&self, q: &LaurentPoly) -> Result<LaurentPoly> {
        self.apply_poly(q)?.try_poly().ok_or_else(|| {
            Error::Symbolic("exponential substitution target used inside an exponent".into())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponentials_multiply_by_adding_exponents() {
        let v = VarSet::new(["a", "b"]);
        let a = LaurentPoly::var(&v, "a").unwrap();
        let b = LaurentPoly::var(&v, "b").unwrap();
        let ea = ExpLaurent::exp_of(a.clone());
        let eb = ExpLaurent::exp_of(b.clone());
        assert_eq!(&ea * &eb, ExpLaurent::exp_of(&a + &b));
        // e^a·e^{-a} = 1 collapses to the zero exponent.
        let eneg = ExpLaurent::exp_of(-&a);
        assert_eq!(&ea * &eneg, ExpLaurent::one(&v));
    }

    #[test]
    fn derivative_of_product_with_exponential() {
        let v = VarSet::new(["a"]);
        let a = LaurentPoly::var(&v, "a").unwrap();
        // d/da (a·e^{a²}) = (1 + 2a²)·e^{a²}
        let f = ExpLaurent::exp_of(&a * &a).mul_poly(&a);
        let df = f.partial(0);
        let expect = ExpLaurent::exp_of(&a * &a)
            .mul_poly(&(&LaurentPoly::one(&v) + &(&a * &a).scale(&GaussRat::int(2))));
        assert_eq!(df, expect);
    }

    #[test]
    fn substitutes_exponential_monomials_into_prefactors() {
        let from = VarSet::new(["t"]);
        let to = VarSet::new(["v", "z"]);
        // t ↦ (v/z)·e^v
        let m = LaurentPoly::monomial(&to, vec![1, -1], GaussRat::one());
        let r = LaurentPoly::var(&to, "v").unwrap();
        let s = Substitution::new(&from, &to).set_exp("t", m, r).unwrap();

        // t² + t⁻¹ ↦ v²z⁻²·e^{2v} + v⁻¹z·e^{-v}
        let t = LaurentPoly::var(&from, "t").unwrap();
        let f = ExpLaurent::from_poly(&(&t * &t) + &t.pow(-1).unwrap());
        let got = f.substitute(&s).unwrap();

        let vv = LaurentPoly::var(&to, "v").unwrap();
        let mut expect = ExpLaurent::zero(&to);
        expect =
            &expect
                + &ExpLaurent::exp_of(vv.scale(&GaussRat::int(2)))
                    .mul_poly(&LaurentPoly::monomial(&to, vec![2, -2], GaussRat::one()));
        expect =
            &expect
                + &ExpLaurent::exp_of(vv.scale(&GaussRat::int(-1)))
                    .mul_poly(&LaurentPoly::monomial(&to, vec![-1, 1], GaussRat::one()));
        assert_eq!(got, expect);
    }

    #[test]
    fn rejects_exponential_target_inside_exponent() {
        let from = VarSet::new(["t"]);
        let to = VarSet::new(["v"]);
        let m = LaurentPoly::var(&to, "v").unwrap();
        let r = LaurentPoly::var(&to, "v").unwrap();
        let s = Substitution::new(&from, &to).set_exp("t", m, r).unwrap();
        let t = LaurentPoly::var(&from, "t").unwrap();
        let f = ExpLaurent::exp_of(t);
        assert!(f.substitute(&s).is_err());
    }

    #[test]
    fn binomial_substitution_into_exponent() {
        // exponent η²/4ζ² under η = ζξ − v becomes ξ²/4 − vξ/2ζ + v²/4ζ².
        let from = VarSet::new(["eta", "zeta"]);
        let to = VarSet::new(["v", "xi", "zeta"]);
        let zeta = LaurentPoly::var(&to, "zeta").unwrap();
        let xi = LaurentPoly::var(&to, "xi").unwrap();
        let vv = LaurentPoly::var(&to, "v").unwrap();
        let s = Substitution::new(&from, &to)
            .set_poly("eta", &(&zeta * &xi) - &vv)
            .unwrap();

        let q = LaurentPoly::monomial(&from, vec![2, -2], GaussRat::ratio(1, 4));
        let got = ExpLaurent::exp_of(q).substitute(&s).unwrap();

        let mut expect = LaurentPoly::zero(&to);
        expect.add_term(vec![0, 2, 0], GaussRat::ratio(1, 4));
        expect.add_term(vec![1, 1, -1], GaussRat::ratio(-1, 2));
        expect.add_term(vec![2, 0, -2], GaussRat::ratio(1, 4));
        assert_eq!(got, ExpLaurent::exp_of(expect));
    }

    #[test]
    fn numeric_evaluation_agrees_with_closed_form() {
        let v = VarSet::new(["a"]);
        let a = LaurentPoly::var(&v, "a").unwrap();
        let f = ExpLaurent::exp_of(a.clone()).mul_poly(&a.pow(-1).unwrap());
        let z = Complex64::new(0.3, -0.7);
        let got = f.eval(&[z]);
        let expect = z.exp() / z;
        assert!((got - expect).norm() < 1e-14);
    }
}
