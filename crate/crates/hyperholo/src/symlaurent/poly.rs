use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use crate::error::{Error, Result};

use super::GaussRat;

/// Ordered list of variable names shared by every expression built over it.
#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct VarSet {
    names: Vec<String>,
}

impl VarSet {
    /// Panics on duplicate names: that is a construction bug, not an input.
    pub fn new<I, S>(names: I) -> Rc<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            assert!(
                !names[..i].contains(n),
                "duplicate variable name `{n}` in VarSet"
            );
        }
        Rc::new(VarSet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| Error::UnknownId(name.into(), self.names.join(", ")))
    }
}

pub(crate) fn check_same_vars(a: &Rc<VarSet>, b: &Rc<VarSet>) -> Result<()> {
    if Rc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::Symbolic(format!(
            "mixed variable sets: [{}] vs [{}]",
            a.names.join(", "),
            b.names.join(", ")
        )))
    }
}

/// Laurent polynomial over the Gaussian rationals: finitely many terms
/// `c · x₁^k₁ ⋯ xₙ^kₙ` with integer (possibly negative) exponents.
///
/// The term map never holds zero coefficients, so structural equality is
/// mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LaurentPoly {
    vars: Rc<VarSet>,
    terms: BTreeMap<Vec<i32>, GaussRat>,
}

impl LaurentPoly {
    pub fn zero(vars: &Rc<VarSet>) -> Self {
        LaurentPoly {
            vars: Rc::clone(vars),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Rc<VarSet>, c: GaussRat) -> Self {
        let mut p = LaurentPoly::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn one(vars: &Rc<VarSet>) -> Self {
        LaurentPoly::constant(vars, GaussRat::one())
    }

    pub fn var(vars: &Rc<VarSet>, name: &str) -> Result<Self> {
        let i = vars.require(name)?;
        let mut exps = vec![0; vars.len()];
        exps[i] = 1;
        Ok(LaurentPoly::monomial(vars, exps, GaussRat::one()))
    }

    /// Single term `c · x^exps`. Panics if exps has the wrong length.
    pub fn monomial(vars: &Rc<VarSet>, exps: Vec<i32>, c: GaussRat) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length mismatch");
        let mut p = LaurentPoly::zero(vars);
        p.add_term(exps, c);
        p
    }

    pub fn vars(&self) -> &Rc<VarSet> {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i32>, GaussRat> {
        &self.terms
    }

    pub(crate) fn add_term(&mut self, exps: Vec<i32>, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Some((exps, coeff)) iff the polynomial has exactly one term.
    pub fn try_monomial(&self) -> Option<(&Vec<i32>, &GaussRat)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Some(c) iff the polynomial is the constant c (zero included).
    pub fn as_constant(&self) -> Option<GaussRat> {
        if self.terms.is_empty() {
            return Some(GaussRat::zero());
        }
        let (exps, c) = self.try_monomial()?;
        if exps.iter().all(|&k| k == 0) {
            Some(c.clone())
        } else {
            None
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        let mut out = LaurentPoly::zero(&self.vars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    /// Formal partial derivative with respect to variable i.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = LaurentPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            let k = e[i];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * &GaussRat::int(k as i64));
        }
        out
    }

    pub fn partial_name(&self, name: &str) -> Result<Self> {
        Ok(self.partial(self.vars.require(name)?))
    }

    /// Integer power. Negative powers require a single invertible term.
    pub fn pow(&self, k: i32) -> Result<Self> {
        if k < 0 {
            let (exps, c) = self
                .try_monomial()
                .ok_or_else(|| Error::Symbolic("negative power of a non-monomial".into()))?;
            let inv_exps: Vec<i32> = exps.iter().map(|&e| -e).collect();
            let inv_c = c
                .inv()
                .ok_or_else(|| Error::Symbolic("negative power of zero".into()))?;
            return LaurentPoly::monomial(&self.vars, inv_exps, inv_c).pow(-k);
        }
        let mut acc = LaurentPoly::one(&self.vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        Ok(acc)
    }

    /// Weighted Euler defect `Σ wᵢ·xᵢ·∂ᵢp − d·p`, which vanishes exactly when
    /// every term has weighted degree d.
    pub fn euler_defect(&self, weights: &[i32], degree: i32) -> Self {
        assert_eq!(weights.len(), self.vars.len());
        let mut out = LaurentPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            let wd: i64 = e
                .iter()
                .zip(weights)
                .map(|(&k, &w)| k as i64 * w as i64)
                .sum();
            let f = GaussRat::int(wd - degree as i64);
            out.add_term(e.clone(), c * &f);
        }
        out
    }

    pub fn eval(&self, vals: &[Complex64]) -> Complex64 {
        assert_eq!(
            vals.len(),
            self.vars.len(),
            "evaluation point length mismatch"
        );
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = c.to_complex();
            for (v, &k) in vals.iter().zip(e) {
                if k != 0 {
                    t *= v.powi(k);
                }
            }
            acc += t;
        }
        acc
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        check_same_vars(&self.vars, &rhs.vars).expect("LaurentPoly add");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let mut out = LaurentPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    // Exponents add when monomials multiply.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        check_same_vars(&self.vars, &rhs.vars).expect("LaurentPoly mul");
        let mut out = LaurentPoly::zero(&self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<i32> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                if k == 1 {
                    write!(f, "*{}", self.vars.name(i))?;
                } else if k != 0 {
                    write!(f, "*{}^{}", self.vars.name(i), k)?;
                }
            }
        }
        Ok(())
    }
}
