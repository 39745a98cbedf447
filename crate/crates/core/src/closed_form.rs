//! Tabulated products of small objects in closed form, written in terms of
//! the bracket constants only. Used as an oracle for the general product.

use crate::brackets::Constant;
use crate::category::{Indec, Obj, Params};
use crate::error::Error;
use crate::hall::HallElement;
use crate::scalar::QScalar;

fn q_over_q_minus_one() -> QScalar {
    QScalar::ratio(crate::scalar::Poly::monomial(1, 1), crate::scalar::Poly::from_i64(&[-1, 1]))
}

fn split(a: Indec, b: Indec, c: QScalar) -> HallElement {
    HallElement::term(Obj::from_indecs(vec![a, b]), c)
}

/// Closed-form product `A · B` for the tabulated pairs of objects: two
/// width-zero X's, a width-zero X with an adjacent width-one X, and any pair
/// with a Z and a width-zero X or two Z's.
pub fn closed_form_product(p: &Params, a: &Obj, b: &Obj) -> Result<HallElement, Error> {
    let (Some(a), Some(b)) = (a.as_indec(), b.as_indec()) else {
        return Err(Error::NotTabulated);
    };
    let c = |name: Constant, i: i64, k, l| p.named_constant(name, i, k, l);
    let lam1 = || p.lambda(1, 1, 1);
    let unit_r1m1 = p.r == 1 && p.m == 1;
    match (a, b) {
        (Indec::X { k, i, j: i2 }, Indec::X { k: l, i: j, j: j2 }) if i == i2 && j == j2 => {
            let e = p.shift(k);
            let k1 = p.level_add(k, 1);
            if (l, j) == (k, i) {
                return Err(Error::NotTabulated);
            }
            if (l, j) == (k, i + 1) {
                let mut out = split(a, b, lam1());
                out.add_term(Obj::x(k, i, i + 1), &lam1());
                if unit_r1m1 {
                    out.add_term(Obj::zero(), &(&q_over_q_minus_one() * &lam1()));
                }
                return Ok(out);
            }
            if (l, j) == (k1, i + e) {
                let le = p.lambda(e, k, k1);
                let mut out = split(a, b, le.clone());
                out.add_term(Obj::zero(), &(&q_over_q_minus_one() * &le));
                return Ok(out);
            }
            Ok(split(a, b, p.lambda(j - i, k, l)))
        }
        (Indec::X { k, i, j }, Indec::X { k: l, i: s, j: t }) if k == l => {
            let l0 = p.lambda(0, 1, 1);
            let l1 = lam1();
            let lm1 = p.lambda(-1, 1, 1);
            let inv_q = QScalar::q_pow(-1);
            let lo_coeff = &(&inv_q * &l0) * &lm1;
            let hi_coeff = &l0 * &l1;
            let both = split(a, b, QScalar::one());
            let obj = both.iter().next().unwrap().0.clone();
            // Width-one interval on the right.
            if i == j && t == s + 1 {
                if i == s {
                    let mut out = HallElement::term(obj, hi_coeff);
                    if unit_r1m1 {
                        out.add_term(Obj::x(k, i, i), &inv_q);
                    }
                    return Ok(out);
                }
                if i == t {
                    return Ok(HallElement::term(obj, lo_coeff));
                }
            }
            // Width-one interval on the left.
            if s == t && j == i + 1 {
                if s == i {
                    return Ok(HallElement::term(obj, lo_coeff));
                }
                if s == j {
                    let mut out = HallElement::term(obj, hi_coeff);
                    if unit_r1m1 {
                        out.add_term(Obj::x(k, s, s), &inv_q);
                    }
                    return Ok(out);
                }
            }
            Err(Error::NotTabulated)
        }
        (Indec::Z { k, i }, Indec::Z { k: l, i: j }) => {
            let e = p.shift(k);
            let k1 = p.level_add(k, 1);
            if (l, j) == (k, i) {
                return Err(Error::NotTabulated);
            }
            let kap = c(Constant::Kappa, j - i, k, l);
            let mut out = split(a, b, kap);
            if l == k1 && j < i + e {
                out.add_term(Obj::x(k1, j, i + e - 1), &QScalar::one());
            }
            if l == k1 && j == i + e {
                // The only map into the zero object is zero, with cone `ΣZ_i`.
                let za = Obj::indec(a);
                let d = &QScalar::from_poly(crate::scalar::Poly::from_i64(&[-1, 1])) * &p.bracket_curly(&za, &za);
                out.add_term(Obj::zero(), &d.inv());
            }
            Ok(out)
        }
        (Indec::X { k: l, i: j, j: j2 }, Indec::Z { k, i }) if j == j2 => {
            if (l, j) == (k, i - 1) {
                let m1 = c(Constant::Mu, 1, k, k);
                let mut out = split(a, b, m1.clone());
                out.add_term(Obj::z(k, i - 1), &m1);
                return Ok(out);
            }
            Ok(split(a, b, c(Constant::Mu, i - j, l, k)))
        }
        (Indec::Z { k, i }, Indec::X { k: l, i: j, j: j2 }) if j == j2 => {
            let e = p.shift(k);
            if (l, j) == (p.level_add(k, 1), i + e) {
                let n1 = c(Constant::NuPrime, 1, k, k);
                let mut out = split(a, b, n1.clone());
                out.add_term(Obj::z(k, i + 1), &n1);
                return Ok(out);
            }
            Ok(split(a, b, c(Constant::Nu, j - i, k, l)))
        }
        _ => Err(Error::NotTabulated),
    }
}
