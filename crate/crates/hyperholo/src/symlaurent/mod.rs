//! Exact algebra in the class `Σ pⱼ(x) e^{qⱼ(x)}` with Laurent-polynomial
//! pⱼ, qⱼ over the Gaussian rationals, plus one- and two-forms with such
//! coefficients.
//!
//! The class is closed under the operations the transition-function checks
//! need: products, formal d, contraction with polynomial vector fields, and
//! pullback along maps sending each coordinate to `monomial · e^{Laurent}`.
//! Representations are canonical, so an identity holds exactly iff the
//! difference normalizes to the empty sum.

mod diff;
mod exp;
mod gaussrat;
mod poly;

pub use diff::{dlog, formal_d, OneFormSym, TwoFormSym, VectorFieldSym};
pub use exp::{ExpLaurent, ExpMonomial, SubstTarget, Substitution};
pub use gaussrat::GaussRat;
pub use poly::{LaurentPoly, VarSet};

use crate::error::Result;

/// Additive split of a Laurent polynomial into parts regular on the two
/// standard charts of the twistor line and a chart-crossing core.
///
/// A term `v^a ξ^b ζ^c` (degrees totalled over the listed base and fibre
/// variables; any remaining variables are treated as constants) is regular
/// over ζ = 0 iff c ≥ 0, and regular over ζ = ∞ iff a + b + c ≤ 0, because
/// the opposite chart scales it by ζ^{-(a+b+c)}. Terms regular on both charts
/// land in `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeSplit {
    pub u: LaurentPoly,
    pub core: LaurentPoly,
    pub v: LaurentPoly,
}

pub fn split_gauge(
    p: &LaurentPoly,
    base_vars: &[&str],
    fibre_vars: &[&str],
    zeta_var: &str,
) -> Result<GaugeSplit> {
    let vars = p.vars();
    let base: Vec<usize> = base_vars
        .iter()
        .map(|n| vars.require(n))
        .collect::<Result<_>>()?;
    let fibre: Vec<usize> = fibre_vars
        .iter()
        .map(|n| vars.require(n))
        .collect::<Result<_>>()?;
    let zeta = vars.require(zeta_var)?;

    let mut u = LaurentPoly::zero(vars);
    let mut core = LaurentPoly::zero(vars);
    let mut v = LaurentPoly::zero(vars);
    for (exps, c) in p.terms() {
        let a: i64 = base.iter().map(|&i| exps[i] as i64).sum();
        let b: i64 = fibre.iter().map(|&i| exps[i] as i64).sum();
        let cz = exps[zeta] as i64;
        let u_regular = cz >= 0;
        let v_regular = a + b + cz <= 0;
        let target = if u_regular {
            &mut u
        } else if v_regular {
            &mut v
        } else {
            &mut core
        };
        target.add_term(exps.clone(), c.clone());
    }
    Ok(GaugeSplit { u, core, v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_the_quadratic_model_exponent() {
        // ξ²/4 − vξ/2ζ + v²/4ζ² splits into chart-regular ends around the
        // crossing term −vξ/2ζ.
        let vars = VarSet::new(["v", "xi", "zeta"]);
        let mut p = LaurentPoly::zero(&vars);
        p.add_term(vec![0, 2, 0], GaussRat::ratio(1, 4));
        p.add_term(vec![1, 1, -1], GaussRat::ratio(-1, 2));
        p.add_term(vec![2, 0, -2], GaussRat::ratio(1, 4));

        let g = split_gauge(&p, &["v"], &["xi"], "zeta").unwrap();
        assert_eq!(
            g.u,
            LaurentPoly::monomial(&vars, vec![0, 2, 0], GaussRat::ratio(1, 4))
        );
        assert_eq!(
            g.core,
            LaurentPoly::monomial(&vars, vec![1, 1, -1], GaussRat::ratio(-1, 2))
        );
        assert_eq!(
            g.v,
            LaurentPoly::monomial(&vars, vec![2, 0, -2], GaussRat::ratio(1, 4))
        );
        assert_eq!(&(&g.u + &g.core) + &g.v, p);
    }

    #[test]
    fn ignores_parameter_variables() {
        let vars = VarSet::new(["v", "xi", "zeta", "p"]);
        // v·ξ·p³/ζ is a core term no matter the parameter power.
        let t = LaurentPoly::monomial(&vars, vec![1, 1, -1, 3], GaussRat::one());
        let g = split_gauge(&t, &["v"], &["xi"], "zeta").unwrap();
        assert!(g.u.is_zero() && g.v.is_zero());
        assert_eq!(g.core, t);
    }

    #[test]
    fn terms_regular_on_both_charts_go_to_u() {
        let vars = VarSet::new(["v", "xi", "zeta"]);
        // Constant and v⁻¹ζ⁰-type terms are regular on both sides.
        let c = LaurentPoly::monomial(&vars, vec![-1, 0, 0], GaussRat::one());
        let g = split_gauge(&c, &["v"], &["xi"], "zeta").unwrap();
        assert_eq!(g.u, c);
        assert!(g.core.is_zero() && g.v.is_zero());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;
    use std::rc::Rc;

    fn coeffs() -> impl Strategy<Value = GaussRat> {
        ((-5i64..=5), (1i64..=3), (-5i64..=5), (1i64..=3))
            .prop_map(|(a, b, c, d)| &GaussRat::ratio(a, b) + &GaussRat::ratio_i(c, d))
    }

    fn polys(vars: Rc<VarSet>) -> impl Strategy<Value = LaurentPoly> {
        let n = vars.len();
        proptest::collection::vec((proptest::collection::vec(-3i32..=3, n), coeffs()), 0..4)
            .prop_map(move |terms| {
                let mut p = LaurentPoly::zero(&vars);
                for (e, c) in terms {
                    p.add_term(e, c);
                }
                p
            })
    }

    fn exps(vars: Rc<VarSet>) -> impl Strategy<Value = ExpLaurent> {
        let v2 = Rc::clone(&vars);
        proptest::collection::vec((polys(Rc::clone(&vars)), polys(v2)), 0..3).prop_map(
            move |terms| {
                let mut f = ExpLaurent::zero(&vars);
                for (q, p) in terms {
                    f = &f + &ExpLaurent::from_poly(p).mul_exp(&q);
                }
                f
            },
        )
    }

    fn vs() -> Rc<VarSet> {
        VarSet::new(["v", "xi", "zeta"])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn product_rule((f, g) in (exps(vs()), exps(vs()))) {
            let fg = &f * &g;
            for i in 0..3 {
                let lhs = fg.partial(i);
                let rhs = &(&f.partial(i) * &g) + &(&f * &g.partial(i));
                prop_assert_eq!(&lhs, &rhs);
            }
        }

        #[test]
        fn ring_laws((f, g, h) in (exps(vs()), exps(vs()), exps(vs()))) {
            prop_assert_eq!(&(&f + &g), &(&g + &f));
            prop_assert_eq!(&(&f * &(&g + &h)), &(&(&f * &g) + &(&f * &h)));
            prop_assert!((&(&f - &g) - &(&(-&g) + &f)).is_zero());
        }

        #[test]
        fn exp_addition_law((q1, q2) in (polys(vs()), polys(vs()))) {
            let lhs = &ExpLaurent::exp_of(q1.clone()) * &ExpLaurent::exp_of(q2.clone());
            let rhs = ExpLaurent::exp_of(&q1 + &q2);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn gauge_split_is_a_partition(p in polys(vs())) {
            let g = split_gauge(&p, &["v"], &["xi"], "zeta").unwrap();
            prop_assert_eq!(&(&(&g.u + &g.core) + &g.v), &p);
            // No term of the core is regular on either chart.
            for e in g.core.terms().keys() {
                let total: i64 = e.iter().map(|&k| k as i64).sum();
                prop_assert!(e[2] < 0 && total > 0);
            }
        }

        #[test]
        fn d_squared_is_zero(f in exps(vs())) {
            prop_assert!(formal_d(&f).d().is_zero());
        }

        #[test]
        fn numeric_eval_is_a_ring_hom((f, g) in (exps(vs()), exps(vs()))) {
            let pt = [
                num_complex::Complex64::new(0.4, 0.2),
                num_complex::Complex64::new(-0.3, 0.6),
                num_complex::Complex64::new(0.9, -0.1),
            ];
            let lhs = (&f * &g).eval(&pt);
            let rhs = f.eval(&pt) * g.eval(&pt);
            prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm() + rhs.norm()));
        }

        #[test]
        fn substitution_commutes_with_d_on_units(
            (me, q, t1, t2) in (
                proptest::collection::vec(-2i32..=2, 3),
                polys(vs()),
                (proptest::collection::vec(-2i32..=2, 3), (-3i64..=3).prop_filter("nonzero", |c| *c != 0)),
                (proptest::collection::vec(-2i32..=2, 3), (-3i64..=3).prop_filter("nonzero", |c| *c != 0)),
            )
        ) {
            // Unit a = Πxᵢ^kᵢ·e^q; σ sends v, ξ to monomials, ζ to itself.
            let vars = vs();
            let unit = ExpLaurent::from_poly(
                LaurentPoly::monomial(&vars, me, GaussRat::int(1)),
            ).mul_exp(&q);

            let mono = |t: (Vec<i32>, i64)| {
                LaurentPoly::monomial(&vars, t.0, GaussRat::int(t.1))
            };
            let sigma = Substitution::new(&vars, &vars)
                .set_poly("v", mono(t1)).unwrap()
                .set_poly("xi", mono(t2)).unwrap();

            let lhs = formal_d(&unit.substitute(&sigma).unwrap());
            let rhs = formal_d(&unit).pullback(&sigma).unwrap();
            prop_assert!((&lhs - &rhs).is_zero());
        }
    }
}
