//! Exact rational functions in one variable `q` with integer coefficients.
//!
//! A [`QScalar`] is kept in a unique normal form: numerator and denominator
//! are coprime in `Z[q]`, share no integer content, and the denominator has a
//! positive leading coefficient (it is monic for every scalar the Hall engine
//! produces).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;

/// Dense polynomial in `q` over the integers, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    c: Vec<BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(v: impl Into<BigInt>) -> Self {
        let mut p = Poly { c: vec![v.into()] };
        p.trim();
        p
    }

    /// `coef * q^deg`.
    pub fn monomial(coef: impl Into<BigInt>, deg: usize) -> Self {
        let mut c = vec![BigInt::zero(); deg + 1];
        c[deg] = coef.into();
        let mut p = Poly { c };
        p.trim();
        p
    }

    pub fn from_coeffs(c: Vec<BigInt>) -> Self {
        let mut p = Poly { c };
        p.trim();
        p
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Poly::from_coeffs(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    fn trim(&mut self) {
        while self.c.last().is_some_and(|v| v.is_zero()) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.c.last().cloned().unwrap_or_default()
    }

    /// Lowest power of `q` with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.c.iter().position(|v| !v.is_zero())
    }

    fn nonzero_terms(&self) -> usize {
        self.c.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn neg(&self) -> Poly {
        Poly { c: self.c.iter().map(|v| -v).collect() }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.c.get(k);
            let b = o.c.get(k);
            c.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(c)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (a, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in o.c.iter().enumerate() {
                if !y.is_zero() {
                    c[a + b] += x * y;
                }
            }
        }
        Poly::from_coeffs(c)
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        Poly::from_coeffs(self.c.iter().map(|v| v * k).collect())
    }

    fn div_int(&self, k: &BigInt) -> Poly {
        Poly { c: self.c.iter().map(|v| v / k).collect() }
    }

    /// Multiply by `q^s`.
    pub fn shift(&self, s: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigInt::zero(); s];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    /// Divide by `q^s`; the caller guarantees exactness.
    fn unshift(&self, s: usize) -> Poly {
        Poly { c: self.c[s..].to_vec() }
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for v in &self.c {
            g = g.gcd(v);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let g = self.content();
        let mut p = if g.is_one() { self.clone() } else { self.div_int(&g) };
        if p.lc().is_negative() {
            p = p.neg();
        }
        p
    }

    /// Pseudo-remainder of `self` by `d`.
    fn prem(&self, d: &Poly) -> Poly {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.clone();
        let l = d.lc();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let k = r.lc();
            r = r.scale(&l).sub(&d.scale(&k).shift(rd - dd));
        }
        r
    }

    /// Exact quotient `self / d` over the integers; panics if not exact.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let dd = d.degree().expect("division by zero polynomial");
        if d.c.len() == 1 {
            let k = &d.c[0];
            for v in &self.c {
                assert!((v % k).is_zero(), "inexact polynomial division");
            }
            return self.div_int(k);
        }
        let mut r = self.clone();
        let mut qc: Vec<BigInt> = Vec::new();
        let l = d.lc();
        while let Some(rd) = r.degree() {
            assert!(rd >= dd, "inexact polynomial division");
            let (quo, rem) = r.lc().div_rem(&l);
            assert!(rem.is_zero(), "inexact polynomial division");
            let s = rd - dd;
            if qc.len() <= s {
                qc.resize(s + 1, BigInt::zero());
            }
            r = r.sub(&d.scale(&quo).shift(s));
            qc[s] = quo;
        }
        Poly::from_coeffs(qc)
    }

    /// Primitive greatest common divisor with positive leading coefficient.
    pub fn gcd(&self, o: &Poly) -> Poly {
        if self.is_zero() {
            return o.primitive();
        }
        if o.is_zero() {
            return self.primitive();
        }
        // Powers of q split off cheaply.
        let s = self.order().unwrap().min(o.order().unwrap());
        let mut a = self.unshift(self.order().unwrap()).primitive();
        let mut b = o.unshift(o.order().unwrap()).primitive();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.degree() == Some(0) {
                return Poly::monomial(1, s);
            }
            let r = a.prem(&b);
            a = b;
            b = r.primitive();
        }
        a.shift(s)
    }

    pub fn eval(&self, q: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for v in self.c.iter().rev() {
            acc = acc * q + BigRational::from_integer(v.clone());
        }
        acc
    }

    pub fn eval_int(&self, q: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for v in self.c.iter().rev() {
            acc = acc * q + v;
        }
        acc
    }

    /// `(q - 1)^n`.
    pub fn q_minus_one_pow(n: usize) -> Poly {
        let base = Poly::from_i64(&[-1, 1]);
        let mut p = Poly::one();
        for _ in 0..n {
            p = p.mul(&base);
        }
        p
    }

    fn write_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, v) in self.c.iter().enumerate().rev() {
            if v.is_zero() {
                continue;
            }
            let abs = v.abs();
            if first {
                if v.is_negative() {
                    write!(f, "-")?;
                }
            } else if v.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}*")?;
                    }
                    if d == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{d}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_terms(f)
    }
}

/// Exact element of `Q(q)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QScalar {
    num: Poly,
    den: Poly,
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        QScalar { num: Poly::one(), den: Poly::one() }
    }

    pub fn int(v: i64) -> Self {
        QScalar { num: Poly::constant(v), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        QScalar { num: p, den: Poly::one() }
    }

    /// The variable `q`.
    pub fn q() -> Self {
        QScalar::q_pow(1)
    }

    /// `q^e` for any integer `e`.
    pub fn q_pow(e: i64) -> Self {
        if e >= 0 {
            QScalar { num: Poly::monomial(1, e as usize), den: Poly::one() }
        } else {
            QScalar { num: Poly::one(), den: Poly::monomial(1, (-e) as usize) }
        }
    }

    /// Builds `num/den` and normalizes.
    pub fn ratio(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut s = QScalar { num, den };
        s.normalize();
        s
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        if !self.den.is_one() {
            let g = self.num.gcd(&self.den);
            if g.degree() != Some(0) {
                self.num = self.num.div_exact(&g);
                self.den = self.den.div_exact(&g);
            }
            let c = self.num.content().gcd(&self.den.content());
            if !c.is_one() {
                self.num = self.num.div_int(&c);
                self.den = self.den.div_int(&c);
            }
            if self.den.lc().is_negative() {
                self.num = self.num.neg();
                self.den = self.den.neg();
            }
        }
    }

    pub fn inv(&self) -> QScalar {
        assert!(!self.is_zero(), "inverse of zero");
        QScalar::ratio(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i64) -> QScalar {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = QScalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Evaluates at a rational point; `None` if the denominator vanishes.
    pub fn eval(&self, q: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(q);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(q) / d)
    }

    pub fn eval_int(&self, q: i64) -> Option<BigRational> {
        self.eval(&BigRational::from_integer(BigInt::from(q)))
    }

    /// If the scalar is `q^e`, returns `e`.
    pub fn as_q_power(&self) -> Option<i64> {
        let mono = |p: &Poly| (p.nonzero_terms() == 1 && p.lc().is_one()).then(|| p.degree().unwrap() as i64);
        Some(mono(&self.num)? - mono(&self.den)?)
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.nonzero_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        let simple_den = self.den.nonzero_terms() == 1 && (self.den.lc().is_one() || self.den.degree() == Some(0));
        if simple_den {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl PartialOrd for QScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural order, only used for deterministic sorting.
impl Ord for QScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num.c, &self.den.c).cmp(&(&other.num.c, &other.den.c))
    }
}

impl<'a> Add<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn add(self, o: &QScalar) -> QScalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return QScalar::ratio(self.num.add(&o.num), self.den.clone());
        }
        if o.den.is_one() {
            return QScalar::ratio(self.num.add(&o.num.mul(&self.den)), self.den.clone());
        }
        if self.den.is_one() {
            return QScalar::ratio(o.num.add(&self.num.mul(&o.den)), o.den.clone());
        }
        let g = self.den.gcd(&o.den);
        let a = self.den.div_exact(&g);
        let b = o.den.div_exact(&g);
        let num = self.num.mul(&b).add(&o.num.mul(&a));
        QScalar::ratio(num, a.mul(&o.den))
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

impl<'a> Sub<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn sub(self, o: &QScalar) -> QScalar {
        self + &(-o)
    }
}

impl<'a> Mul<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn mul(self, o: &QScalar) -> QScalar {
        if self.is_zero() || o.is_zero() {
            return QScalar::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return QScalar { num: self.num.mul(&o.num), den: Poly::one() };
        }
        // Cross-cancel first to keep intermediate sizes small.
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1);
        let d2 = o.den.div_exact(&g1);
        let n2 = o.num.div_exact(&g2);
        let d1 = self.den.div_exact(&g2);
        QScalar::ratio(n1.mul(&n2), d1.mul(&d2))
    }
}

impl<'a> Div<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn div(self, o: &QScalar) -> QScalar {
        self * &o.inv()
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<QScalar> for QScalar {
            type Output = QScalar;
            fn $f(self, o: QScalar) -> QScalar {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a QScalar> for QScalar {
            type Output = QScalar;
            fn $f(self, o: &QScalar) -> QScalar {
                (&self).$f(o)
            }
        }
        impl<'a> $tr<QScalar> for &'a QScalar {
            type Output = QScalar;
            fn $f(self, o: QScalar) -> QScalar {
                self.$f(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, o: &QScalar) {
        *self = &*self + o;
    }
}

impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, o: &QScalar) {
        *self = &*self - o;
    }
}

impl MulAssign<&QScalar> for QScalar {
    fn mul_assign(&mut self, o: &QScalar) {
        *self = &*self * o;
    }
}

impl From<i64> for QScalar {
    fn from(v: i64) -> Self {
        QScalar::int(v)
    }
}

impl From<Poly> for QScalar {
    fn from(p: Poly) -> Self {
        QScalar::from_poly(p)
    }
}

impl FromStr for QScalar {
    type Err = ParseError;

    /// Accepts integer arithmetic in `q` with `+ - * / ^` and parentheses;
    /// exponents may be negative.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut p = ScalarParser { s: s.as_bytes(), pos: 0 };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(v)
    }
}

struct ScalarParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ScalarParser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::new(msg, 1, self.pos + 1)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<QScalar, ParseError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<QScalar, ParseError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = acc * self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    acc = acc / d;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<QScalar, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer_signed()?;
            if base.is_zero() && e < 0 {
                return Err(self.err("division by zero"));
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer_signed(&mut self) -> Result<i64, ParseError> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer exponent"));
        }
        let v: i64 = std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("exponent out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<QScalar, ParseError> {
        match self.peek() {
            Some(b'q') => {
                self.pos += 1;
                Ok(QScalar::q())
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let v: BigInt = std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap();
                Ok(QScalar::from_poly(Poly::constant(v)))
            }
            _ => Err(self.err("expected number, 'q' or '('")),
        }
    }
}
