//! Hall numbers and multiplication in the derived Hall algebra.
//!
//! Products are computed by writing the right factor as a polynomial in the
//! generators `X_i^(k)`, `Z_0^(k)` and folding right multiplications by
//! generators, so the only maps ever enumerated start at a generator.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::category::{Indec, Level, Obj, Params};
use crate::error::{Error, ParseError};
use crate::scalar::{Poly, QScalar};

/// Algebra generator: `x(k,i)` is `X_i^(k)`, `z(k)` is `Z_0^(k)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Generator {
    X { k: Level, i: i64 },
    Z { k: Level },
}

impl Generator {
    pub fn indec(&self) -> Indec {
        match *self {
            Generator::X { k, i } => Indec::x(k, i, i),
            Generator::Z { k } => Indec::z(k, 0),
        }
    }

    pub fn level(&self) -> Level {
        match *self {
            Generator::X { k, .. } | Generator::Z { k } => k,
        }
    }

    pub fn is_z(&self) -> bool {
        matches!(self, Generator::Z { .. })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Generator::X { k, i } => write!(f, "x({k},{i})"),
            Generator::Z { k } => write!(f, "z({k})"),
        }
    }
}

pub type Word = Vec<Generator>;

pub fn word_to_string(w: &[Generator]) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    w.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ")
}

/// Parses `x(k,i)` / `z(k)` tokens separated by whitespace; `1` is the empty word.
pub fn parse_word(s: &str) -> Result<Word, ParseError> {
    let compact: String = s.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut out = Vec::new();
    let t = compact.trim();
    if t == "1" || t.is_empty() {
        return Ok(out);
    }
    let bytes: Vec<char> = t.chars().collect();
    let mut pos = 0;
    while pos < bytes.len() {
        while pos < bytes.len() && bytes[pos] == ' ' {
            pos += 1;
        }
        let start = pos;
        let err = |m: &str| ParseError::new(m, 1, start + 1);
        let kind = bytes[pos];
        if kind != 'x' && kind != 'z' {
            return Err(err("expected x(k,i) or z(k)"));
        }
        let close = bytes[pos..].iter().position(|&c| c == ')').ok_or_else(|| err("missing ')'"))?;
        let tok: String = bytes[pos..pos + close + 1].iter().collect();
        pos += close + 1;
        let inner =
            tok[1..].trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(|| err("expected '('"))?;
        let nums: Result<Vec<i64>, _> = inner.split(',').map(|v| v.trim().parse::<i64>()).collect();
        let nums = nums.map_err(|_| err("malformed integer"))?;
        let level = |v: i64| u32::try_from(v).ok().filter(|&k| k >= 1).ok_or_else(|| err("level must be >= 1"));
        match (kind, nums.as_slice()) {
            ('x', &[k, i]) => out.push(Generator::X { k: level(k)?, i }),
            ('z', &[k]) => out.push(Generator::Z { k: level(k)? }),
            _ => return Err(err("wrong number of indices")),
        }
    }
    Ok(out)
}

macro_rules! linear_combination {
    ($name:ident, $key:ty) => {
        impl $name {
            pub fn zero() -> Self {
                $name { terms: BTreeMap::new() }
            }

            pub fn term(key: $key, c: QScalar) -> Self {
                let mut e = Self::zero();
                e.add_term(key, &c);
                e
            }

            pub fn add_term(&mut self, key: $key, c: &QScalar) {
                if c.is_zero() {
                    return;
                }
                match self.terms.get_mut(&key) {
                    Some(v) => {
                        *v += c;
                        if v.is_zero() {
                            self.terms.remove(&key);
                        }
                    }
                    None => {
                        self.terms.insert(key, c.clone());
                    }
                }
            }

            pub fn add_scaled(&mut self, o: &Self, c: &QScalar) {
                if c.is_zero() {
                    return;
                }
                for (k, v) in &o.terms {
                    let t = if c.is_one() { v.clone() } else { v * c };
                    self.add_term(k.clone(), &t);
                }
            }

            pub fn plus(&self, o: &Self) -> Self {
                let mut e = self.clone();
                e.add_scaled(o, &QScalar::one());
                e
            }

            pub fn minus(&self, o: &Self) -> Self {
                let mut e = self.clone();
                e.add_scaled(o, &QScalar::int(-1));
                e
            }

            pub fn scaled(&self, c: &QScalar) -> Self {
                let mut e = Self::zero();
                e.add_scaled(self, c);
                e
            }

            pub fn coeff(&self, key: &$key) -> QScalar {
                self.terms.get(key).cloned().unwrap_or_default()
            }

            pub fn is_zero(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn len(&self) -> usize {
                self.terms.len()
            }

            pub fn is_empty(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn iter(&self) -> impl Iterator<Item = (&$key, &QScalar)> {
                self.terms.iter()
            }
        }
    };
}

/// Finite linear combination of isomorphism classes.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct HallElement {
    terms: BTreeMap<Obj, QScalar>,
}

linear_combination!(HallElement, Obj);

impl HallElement {
    /// The unit, the class of the zero object.
    pub fn unit() -> Self {
        HallElement::basis(Obj::zero())
    }

    pub fn basis(m: Obj) -> Self {
        HallElement::term(m, QScalar::one())
    }

    /// Evaluates all coefficients at an integer `q`, dropping those that vanish.
    pub fn eval_at(&self, q: i64) -> BTreeMap<Obj, num_rational::BigRational> {
        self.terms
            .iter()
            .map(|(k, v)| (k.clone(), v.eval_int(q).expect("coefficient pole at evaluation point")))
            .filter(|(_, v)| !num_traits::Zero::is_zero(v))
            .collect()
    }
}

impl fmt::Display for HallElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, v)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v})[{k}]")?;
        }
        Ok(())
    }
}

/// Element of the free algebra on the generators.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FreeElement {
    terms: BTreeMap<Word, QScalar>,
}

linear_combination!(FreeElement, Word);

impl FreeElement {
    pub fn one() -> Self {
        FreeElement::word(Vec::new())
    }

    pub fn word(w: Word) -> Self {
        FreeElement::term(w, QScalar::one())
    }

    pub fn gen(g: Generator) -> Self {
        FreeElement::word(vec![g])
    }

    pub fn mul(&self, o: &FreeElement) -> FreeElement {
        let mut e = FreeElement::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                e.add_term(w, &(x * y));
            }
        }
        e
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }
}

impl fmt::Display for FreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, v)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v}) {}", word_to_string(k))?;
        }
        Ok(())
    }
}

type Tally = Arc<BTreeMap<Obj, QScalar>>;

/// Derived Hall algebra of `C(r,m)` with memoized structure constants.
///
/// All caches hold values that are functions of their keys only, so filling
/// them concurrently is harmless.
pub struct HallAlgebra {
    pub params: Params,
    tallies: Mutex<HashMap<(Indec, Obj), Tally>>,
    right: Mutex<HashMap<(Obj, Indec), Arc<HallElement>>>,
    phi: Mutex<HashMap<Obj, Arc<FreeElement>>>,
    words: Mutex<HashMap<Word, Arc<HallElement>>>,
    weights: Mutex<HashMap<Obj, QScalar>>,
}

fn cached<K: std::hash::Hash + Eq + Clone, V: Clone>(m: &Mutex<HashMap<K, V>>, key: &K, f: impl FnOnce() -> V) -> V {
    if let Some(v) = m.lock().unwrap().get(key) {
        return v.clone();
    }
    let v = f();
    m.lock().unwrap().entry(key.clone()).or_insert(v).clone()
}

impl HallAlgebra {
    pub fn new(params: Params) -> Self {
        HallAlgebra {
            params,
            tallies: Mutex::default(),
            right: Mutex::default(),
            phi: Mutex::default(),
            words: Mutex::default(),
            weights: Mutex::default(),
        }
    }

    /// Whether maps out of `a` can be classified (a width-zero X or any Z).
    pub fn is_classifiable_source(a: &Indec) -> bool {
        match *a {
            Indec::X { i, j, .. } => i == j,
            Indec::Z { .. } => true,
        }
    }

    /// `N ↦ |Hom(G, T)_N|` for a classifiable source `G`.
    pub fn count_cones_from(&self, g: &Indec, t: &Obj) -> Tally {
        assert!(Self::is_classifiable_source(g), "cannot classify maps out of {g}");
        cached(&self.tallies, &(*g, t.clone()), || {
            let raw = self.params.cone_tally(g, t);
            Arc::new(raw.into_iter().map(|(k, v)| (k, QScalar::from_poly(v))).collect())
        })
    }

    /// `|Aut M| · {M,M}`.
    fn weight(&self, m: &Obj) -> QScalar {
        cached(&self.weights, m, || {
            let (_, aut) = self.params.end_aut_cards(m);
            &aut * &self.params.bracket_curly(m, m)
        })
    }

    /// `F^L_{G,N} = |Hom(G,L)_N| / |Aut G| · {G,L}/{G,G}` with `G` classifiable.
    pub fn hall_number_direct(&self, g: &Indec, n: &Obj, l: &Obj) -> QScalar {
        let gm = Obj::indec(*g);
        let cnt = self.count_cones_from(g, l).get(n).cloned().unwrap_or_default();
        if cnt.is_zero() {
            return cnt;
        }
        let p = &self.params;
        let e = p.bracket_curly_exp(&gm, l) - p.bracket_curly_exp(&gm, &gm);
        &(&cnt * &QScalar::q_pow(e)) / &self.params.end_aut_cards(&gm).1
    }

    /// `M · G` for a basis object `M` and classifiable `G`.
    ///
    /// Maps `h: G -> ΣM` with cone `ΣL` are the third maps of triangles
    /// `M -> L -> G -> ΣM`. Reading the same triangle from its rotation
    /// `G -> ΣM -> ΣL -> ΣG` gives
    /// `F^L_{M,G} = |Hom(G,ΣM)_{ΣL}| / |Aut G| · {G,ΣM}/{G,G} · |Aut L|{L,L} / (|Aut M|{M,M})`.
    pub fn mul_basis_indec(&self, m: &Obj, g: &Indec) -> Arc<HallElement> {
        cached(&self.right, &(m.clone(), *g), || {
            let p = &self.params;
            let gm = Obj::indec(*g);
            let sm = p.suspend(m, 1);
            let tally = self.count_cones_from(g, &sm);
            let e = p.bracket_curly_exp(&gm, &sm) - p.bracket_curly_exp(&gm, &gm);
            let base = &(&QScalar::q_pow(e) / &p.end_aut_cards(&gm).1) / &self.weight(m);
            let mut out = HallElement::zero();
            for (c, cnt) in tally.iter() {
                let l = p.suspend(c, -1);
                let coeff = &(cnt * &base) * &self.weight(&l);
                out.add_term(l, &coeff);
            }
            Arc::new(out)
        })
    }

    pub fn mul_right_indec(&self, e: &HallElement, g: &Indec) -> HallElement {
        let mut out = HallElement::zero();
        for (m, c) in e.iter() {
            out.add_scaled(&self.mul_basis_indec(m, g), c);
        }
        out
    }

    pub fn mul_right_generator(&self, e: &HallElement, g: Generator) -> HallElement {
        self.mul_right_indec(e, &g.indec())
    }

    /// `F^L_{M,N}` when `M` or `N` is a classifiable indecomposable.
    pub fn hall_number(&self, m: &Obj, n: &Obj, l: &Obj) -> Result<QScalar, Error> {
        if let Some(g) = m.as_indec().filter(Self::is_classifiable_source) {
            return Ok(self.hall_number_direct(&g, n, l));
        }
        if let Some(g) = n.as_indec().filter(Self::is_classifiable_source) {
            return Ok(self.mul_basis_indec(m, &g).coeff(l));
        }
        Err(Error::UnsupportedShape(format!("{m}; {n}; {l}")))
    }

    /// `ξ(w)`: the product of the generator classes in `w`.
    pub fn eval_word(&self, w: &[Generator]) -> Arc<HallElement> {
        if w.is_empty() {
            return Arc::new(HallElement::unit());
        }
        let key = w.to_vec();
        if let Some(v) = self.words.lock().unwrap().get(&key) {
            return v.clone();
        }
        let prefix = self.eval_word(&w[..w.len() - 1]);
        let v = Arc::new(self.mul_right_generator(&prefix, w[w.len() - 1]));
        self.words.lock().unwrap().entry(key).or_insert(v).clone()
    }

    /// `ξ(F)`.
    pub fn eval(&self, f: &FreeElement) -> HallElement {
        let mut out = HallElement::zero();
        for (w, c) in f.iter() {
            out.add_scaled(&self.eval_word(w), c);
        }
        out
    }

    /// `E · w` by folding right multiplications.
    pub fn mul_word(&self, e: &HallElement, w: &[Generator]) -> HallElement {
        let mut acc = e.clone();
        for g in w {
            acc = self.mul_right_generator(&acc, *g);
        }
        acc
    }

    pub fn mul_free(&self, e: &HallElement, f: &FreeElement) -> HallElement {
        let mut out = HallElement::zero();
        for (w, c) in f.iter() {
            out.add_scaled(&self.mul_word(e, w), c);
        }
        out
    }

    /// Full product `E1 · E2`.
    pub fn mul(&self, e1: &HallElement, e2: &HallElement) -> HallElement {
        let mut out = HallElement::zero();
        for (n, c) in e2.iter() {
            out.add_scaled(&self.mul_free(e1, &self.expand(n)), c);
        }
        out
    }

    pub fn mul_basis(&self, m: &Obj, n: &Obj) -> HallElement {
        self.mul(&HallElement::basis(m.clone()), &HallElement::basis(n.clone()))
    }

    fn measure(&self, m: &Obj) -> (i64, u32) {
        (self.params.ql(m), self.params.dim_end(m))
    }

    /// `Φ_M`: a polynomial in the generators with `ξ(Φ_M) = [M]`.
    pub fn expand(&self, m: &Obj) -> Arc<FreeElement> {
        if let Some(v) = self.phi.lock().unwrap().get(m) {
            return v.clone();
        }
        let v = Arc::new(self.expand_uncached(m));
        self.phi.lock().unwrap().entry(m.clone()).or_insert(v).clone()
    }

    fn expand_uncached(&self, m: &Obj) -> FreeElement {
        let p = &self.params;
        if m.is_zero() {
            return FreeElement::one();
        }
        let Some(a) = m.as_indec() else {
            // Decomposable: M1 · M2 = v_M M + (classes with smaller End).
            let first = m.summands()[0];
            let m1 = Obj::indec(first);
            let m2 = m.without(&first).unwrap();
            let prod = self.mul_basis(&m1, &m2);
            let v = prod.coeff(m);
            assert!(!v.is_zero(), "leading coefficient of {m} vanishes");
            let mut f = self.expand(&m1).mul(&self.expand(&m2));
            for (l, c) in prod.iter() {
                if l != m {
                    assert!(self.measure(l) < self.measure(m), "expansion of {m} does not descend at {l}");
                    f.add_scaled(&self.expand(l), &-c);
                }
            }
            return f.scaled(&v.inv());
        };
        let (left, right) = match a {
            Indec::X { k, i, j } if i == j => return FreeElement::gen(Generator::X { k, i }),
            Indec::Z { k, i: 0 } => return FreeElement::gen(Generator::Z { k }),
            Indec::X { k, i, j } => (Obj::x(k, i, i), Obj::x(k, i + 1, j)),
            Indec::Z { k, i } if i < 0 => (Obj::x(k, i, i), Obj::z(k, i + 1)),
            Indec::Z { k, i } => {
                let t = i - 1 + p.shift(k);
                (Obj::z(k, i - 1), Obj::x(p.level_add(k, 1), t, t))
            }
        };
        // Combine both orders so that the split class cancels.
        let split = left.plus(&right);
        let p1 = self.mul_basis(&left, &right);
        let p2 = self.mul_basis(&right, &left);
        let (a1, b1) = (p1.coeff(&split), p2.coeff(&split));
        let (am, bm) = (p1.coeff(m), p2.coeff(m));
        let det = &(&a1 * &bm) - &(&b1 * &am);
        assert!(!det.is_zero(), "cannot isolate {m} from products of {left} and {right}");
        // α a1 + β b1 = 0 and α am + β bm = 1.
        let alpha = &(-&b1) / &det;
        let beta = &a1 / &det;
        let el = self.expand(&left);
        let er = self.expand(&right);
        let mut f = el.mul(&er).scaled(&alpha);
        f.add_scaled(&er.mul(&el), &beta);
        let mut rest = p1.scaled(&alpha);
        rest.add_scaled(&p2, &beta);
        for (l, c) in rest.iter() {
            if l != m && *l != split {
                assert!(self.measure(l) < self.measure(m), "expansion of {m} does not descend at {l}");
                f.add_scaled(&self.expand(l), &-c);
            }
        }
        f
    }

    /// `M · N` computed from an alternative expansion of `N`, splitting off
    /// its last summand instead of its first. Used to confirm that products
    /// do not depend on the expansion.
    pub fn mul_basis_alt(&self, m: &Obj, n: &Obj) -> HallElement {
        if n.len() < 2 {
            return self.mul_basis(m, n);
        }
        let last = *n.summands().last().unwrap();
        let n1 = n.without(&last).unwrap();
        let n2 = Obj::indec(last);
        // N = (N1 · N2 - Σ_{L≠N} v_L L) / v_N.
        let prod = self.mul_basis(&n1, &n2);
        let v = prod.coeff(n);
        let mut acc = self.mul(&self.mul_basis(m, &n1), &HallElement::basis(n2));
        for (l, c) in prod.iter() {
            if l != n {
                acc.add_scaled(&self.mul_basis(m, l), &-c);
            }
        }
        acc.scaled(&v.inv())
    }
}

/// Polynomial in `q` as a scalar; convenience for callers building tallies.
pub fn poly_scalar(p: &Poly) -> QScalar {
    QScalar::from_poly(p.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(r: u32, m: i64) -> HallAlgebra {
        HallAlgebra::new(Params::new(r, m).unwrap())
    }

    fn o(s: &str) -> Obj {
        s.parse().unwrap()
    }

    #[test]
    fn unit_laws() {
        let h = alg(2, 1);
        let e = HallElement::basis(o("X(1,0,1) + Z(2,0)"));
        assert_eq!(h.mul(&HallElement::unit(), &e), e);
        assert_eq!(h.mul(&e, &HallElement::unit()), e);
        let g = Generator::Z { k: 2 };
        assert_eq!(h.mul_right_generator(&HallElement::unit(), g), HallElement::basis(o("Z(2,0)")));
    }

    #[test]
    fn adjacent_generators() {
        let h = alg(2, 2);
        let p = h.params;
        let prod = h.mul_right_generator(&HallElement::basis(o("X(1,0,0)")), Generator::X { k: 1, i: 1 });
        let l1 = p.lambda(1, 1, 1);
        let mut want = HallElement::term(o("X(1,0,0) + X(1,1,1)"), l1.clone());
        want.add_term(o("X(1,0,1)"), &l1);
        assert_eq!(prod, want);
    }

    #[test]
    fn word_syntax() {
        let w = parse_word("x(1,0)  x(2,-1) z(1)").unwrap();
        assert_eq!(word_to_string(&w), "x(1,0) x(2,-1) z(1)");
        assert!(parse_word("y(1)").is_err());
        assert!(parse_word("1").unwrap().is_empty());
    }

    #[test]
    fn expansion_of_short_interval() {
        let h = alg(1, 1);
        let p = h.params;
        let phi = h.expand(&o("X(1,0,1)"));
        let mut want = FreeElement::zero();
        let x0 = Generator::X { k: 1, i: 0 };
        let x1 = Generator::X { k: 1, i: 1 };
        want.add_term(vec![x0, x1], &p.lambda(1, 1, 1).inv());
        want.add_term(vec![x1, x0], &-p.lambda(-1, 1, 1).inv());
        want.add_term(vec![], &-"q/(q - 1)".parse::<QScalar>().unwrap());
        assert_eq!(*phi, want);
        assert_eq!(h.eval(&phi), HallElement::basis(o("X(1,0,1)")));
    }
}
