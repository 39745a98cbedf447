//! The algebras presented by generators `x(k,i)`, `z(k)` and relations,
//! the order on words, normal words, and normal forms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::category::{DimVector, Indec, Level, Obj, Params};
use crate::error::Error;
use crate::hall::{word_to_string, FreeElement, Generator, HallAlgebra, Word};
use crate::scalar::{Poly, QScalar};

/// Relation family, numbered as in the presentation: `1`, `1'`, `2`, `3`
/// involve only `x` letters; `4` to `12` involve `z`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Family {
    XX,
    XXShift,
    XXXLeft,
    XXXRight,
    ZZ,
    ZZAdjacent,
    XZ,
    XZZ,
    XZZShift,
    XXZ,
    XXZAdjacent,
    XXZMixed,
    XXZShiftAdjacent,
    XXZShift,
}

impl Family {
    pub const ALL: [Family; 14] = [
        Family::XX,
        Family::XXShift,
        Family::XXXLeft,
        Family::XXXRight,
        Family::ZZ,
        Family::ZZAdjacent,
        Family::XZ,
        Family::XZZ,
        Family::XZZShift,
        Family::XXZ,
        Family::XXZAdjacent,
        Family::XXZMixed,
        Family::XXZShiftAdjacent,
        Family::XXZShift,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Family::XX => "1",
            Family::XXShift => "1'",
            Family::XXXLeft => "2",
            Family::XXXRight => "3",
            Family::ZZ => "4",
            Family::ZZAdjacent => "4'",
            Family::XZ => "5",
            Family::XZZ => "6",
            Family::XZZShift => "7",
            Family::XXZ => "8",
            Family::XXZAdjacent => "9",
            Family::XXZMixed => "10",
            Family::XXZShiftAdjacent => "11",
            Family::XXZShift => "12",
        }
    }

    pub fn involves_z(self) -> bool {
        !matches!(self, Family::XX | Family::XXShift | Family::XXXLeft | Family::XXXRight)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which presentation: `x` generators only, or `x` and `z`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Presentation {
    XOnly,
    Full,
}

/// An instantiated relation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    pub family: Family,
    pub k: Level,
    pub l: Level,
    pub i: i64,
    pub j: i64,
    pub element: FreeElement,
}

fn xg(k: Level, i: i64) -> Generator {
    Generator::X { k, i }
}

fn zg(k: Level) -> Generator {
    Generator::Z { k }
}

fn build(terms: Vec<(QScalar, Word)>) -> FreeElement {
    let mut f = FreeElement::zero();
    for (c, w) in terms {
        f.add_term(w, &c);
    }
    f
}

fn q_over_q_minus_one() -> QScalar {
    QScalar::ratio(Poly::monomial(1, 1), Poly::from_i64(&[-1, 1]))
}

/// `x_{i,j}^(k) = x_i ... x_j`, the empty word when `j = i - 1`.
pub fn x_run(k: Level, i: i64, j: i64) -> Word {
    (i..=j).map(|s| xg(k, s)).collect()
}

/// The word `z_i^(k)`.
pub fn z_block(p: &Params, k: Level, i: i64) -> Word {
    let mut w: Word = match i.cmp(&0) {
        Ordering::Less => x_run(k, i, -1),
        Ordering::Equal => Vec::new(),
        Ordering::Greater => {
            let e = p.shift(k);
            let k1 = p.level_add(k, 1);
            (e..=i + e - 1).rev().map(|s| xg(k1, s)).collect()
        }
    };
    w.push(zg(k));
    w
}

impl HallAlgebra {
    /// Term standing for `X_{i,j}^(k)` in the relations involving `z`:
    /// `Φ` of the interval when it is nonempty; for an empty interval, the
    /// unit with coefficient `1/((q-1){Z,Z})`, which is the Hall number of
    /// `Z_0^(k-1) · Z_0^(k)` at the zero object.
    fn interval_term(&self, k: Level, i: i64, j: i64) -> FreeElement {
        if j >= i {
            return (*self.expand(&Obj::x(k, i, j))).clone();
        }
        let p = &self.params;
        let z = Obj::z(p.level_add(k, -1), 0);
        let d = &QScalar::from_poly(Poly::from_i64(&[-1, 1])) * &p.bracket_curly(&z, &z);
        FreeElement::term(Vec::new(), d.inv())
    }

    /// All relation instances whose free indices lie in `window`.
    pub fn relations(&self, pres: Presentation, window: RangeInclusive<i64>) -> Vec<Relation> {
        let p = self.params;
        let mut out = Vec::new();
        let one = QScalar::one;
        let inv = |c: QScalar| c.inv();
        let lam = |i, k, l| p.lambda(i, k, l);
        let rm1 = p.r == 1 && p.m == 1;
        let mut push = |family, k, l, i, j, element: FreeElement| {
            out.push(Relation { family, k, l, i, j, element });
        };
        let excluded_xx = |k: Level, i: i64, l: Level, j: i64| {
            let e = p.shift(k);
            let ek1 = p.shift(p.level_add(k, -1));
            (l, j) == (k, i)
                || (l, j) == (k, i + 1)
                || (l, j) == (k, i - 1)
                || (l, j) == (p.level_add(k, 1), i + e)
                || (l, j) == (p.level_add(k, -1), i - ek1)
        };
        for k in p.levels() {
            for i in window.clone() {
                for l in p.levels() {
                    for j in window.clone() {
                        if (k, i) < (l, j) && !excluded_xx(k, i, l, j) {
                            let f = build(vec![
                                (inv(lam(j - i, k, l)), vec![xg(k, i), xg(l, j)]),
                                (-inv(lam(i - j, l, k)), vec![xg(l, j), xg(k, i)]),
                            ]);
                            push(Family::XX, k, l, i, j, f);
                        }
                    }
                }
            }
        }
        if !rm1 {
            for k in p.levels() {
                let e = p.shift(k);
                let k1 = p.level_add(k, 1);
                for i in window.clone() {
                    let f = build(vec![
                        (inv(lam(e, k, k1)), vec![xg(k, i), xg(k1, i + e)]),
                        (-inv(lam(-e, k1, k)), vec![xg(k1, i + e), xg(k, i)]),
                        (-q_over_q_minus_one(), vec![]),
                    ]);
                    push(Family::XXShift, k, k1, i, i + e, f);
                }
            }
        }
        let l1 = lam(1, 1, 1);
        let lm1 = lam(-1, 1, 1);
        let q = QScalar::q();
        let q1 = &q + &one();
        let cubic_tail = if p.r * (p.m as u32) == 1 { &q * &q1 } else { QScalar::zero() };
        for k in p.levels() {
            for i in window.clone() {
                let (a, b) = (xg(k, i), xg(k, i + 1));
                let c1 = inv(&l1 * &l1);
                let c2 = -&(&q1 / &(&l1 * &lm1));
                let c3 = &q / &(&lm1 * &lm1);
                let f = build(vec![
                    (c1.clone(), vec![a, a, b]),
                    (c2.clone(), vec![a, b, a]),
                    (c3.clone(), vec![b, a, a]),
                    (-cubic_tail.clone(), vec![a]),
                ]);
                push(Family::XXXLeft, k, k, i, i + 1, f);
                let f = build(vec![
                    (c1, vec![a, b, b]),
                    (c2, vec![b, a, b]),
                    (c3, vec![b, b, a]),
                    (-cubic_tail.clone(), vec![b]),
                ]);
                push(Family::XXXRight, k, k, i, i + 1, f);
            }
        }
        if pres == Presentation::XOnly {
            return out;
        }
        let kap0 = |k, l| p.kappa(0, k, l);
        for k in p.levels() {
            for l in p.levels() {
                let adjacent = l == k || l == p.level_add(k, 1) || l == p.level_add(k, -1);
                if k < l && !adjacent {
                    let f = build(vec![(inv(kap0(k, l)), vec![zg(k), zg(l)]), (-inv(kap0(l, k)), vec![zg(l), zg(k)])]);
                    push(Family::ZZ, k, l, 0, 0, f);
                }
            }
        }
        if p.r >= 2 {
            for k in p.levels() {
                let k1 = p.level_add(k, 1);
                let mut f =
                    build(vec![(inv(kap0(k, k1)), vec![zg(k), zg(k1)]), (-inv(kap0(k1, k)), vec![zg(k1), zg(k)])]);
                f.add_scaled(&self.interval_term(k1, 0, p.shift(k) - 1), &-inv(kap0(k, k1)));
                if p.r == 2 {
                    f.add_scaled(&self.interval_term(k, 0, p.shift(k1) - 1), &inv(kap0(k1, k)));
                }
                push(Family::ZZAdjacent, k, k1, 0, 0, f);
            }
        }
        for k in p.levels() {
            let e = p.shift(k);
            let k1 = p.level_add(k, 1);
            for l in p.levels() {
                for j in window.clone() {
                    if (l, j) == (k, -1) || (l, j) == (k1, e) {
                        continue;
                    }
                    let f = build(vec![
                        (inv(p.mu(-j, l, k)), vec![xg(l, j), zg(k)]),
                        (-inv(p.nu(j, k, l)), vec![zg(k), xg(l, j)]),
                    ]);
                    push(Family::XZ, k, l, 0, j, f);
                }
            }
        }
        for k in p.levels() {
            let e = p.shift(k);
            let k1 = p.level_add(k, 1);
            let (z, xm, xe) = (zg(k), xg(k, -1), xg(k1, e));
            let mu = |i| p.mu(i, k, k);
            let nu = |i| p.nu(i, k, k);
            let ka = |i| p.kappa(i, k, k);
            let mup = |i| p.named_constant(crate::brackets::Constant::MuPrime, i, k, k);
            let nup = |i| p.named_constant(crate::brackets::Constant::NuPrime, i, k, k);
            let r1 = p.r == 1;

            let mut f = build(vec![
                (inv(&mu(1) * &ka(1)), vec![xm, z, z]),
                (-&(&inv(&nu(-1) * &ka(1)) + &inv(&mu(1) * &ka(-1))), vec![z, xm, z]),
                (inv(&nu(-1) * &ka(-1)), vec![z, z, xm]),
            ]);
            if r1 {
                f.add_scaled(&self.interval_term(k, 0, e - 2), &-inv(ka(1)));
                f.add_scaled(&self.interval_term(k, -1, e - 1), &inv(ka(-1)));
            }
            push(Family::XZZ, k, k, -1, 0, f);

            let mut f = build(vec![
                (inv(&mup(-1) * &ka(-1)), vec![xe, z, z]),
                (-&(&inv(&nup(1) * &ka(-1)) + &inv(&mup(-1) * &ka(1))), vec![z, xe, z]),
                (inv(&nup(1) * &ka(1)), vec![z, z, xe]),
            ]);
            if r1 {
                f.add_scaled(&self.interval_term(k, 1, e - 1), &-inv(ka(1)));
                f.add_scaled(&self.interval_term(k, 0, e), &inv(ka(-1)));
            }
            push(Family::XZZShift, k, k1, e, 0, f);

            let f = build(vec![
                (inv(&mu(0) * &mu(1)), vec![xm, xm, z]),
                (-&(&inv(&mu(0) * &nu(-1)) + &inv(&mu(1) * &nu(0))), vec![xm, z, xm]),
                (inv(&nu(-1) * &nu(0)), vec![z, xm, xm]),
            ]);
            push(Family::XXZ, k, k, -1, -1, f);

            let x0 = xg(k, 0);
            let f = build(vec![
                (inv(&mu(-1) * &mu(1)), vec![x0, xm, z]),
                (-inv(&mu(-1) * &nu(-1)), vec![x0, z, xm]),
                (-inv(&mu(1) * &nu(1)), vec![xm, z, x0]),
                (inv(&nu(-1) * &nu(1)), vec![z, xm, x0]),
                (QScalar::from(i64::from(rm1)), vec![z]),
            ]);
            push(Family::XXZAdjacent, k, k, 0, -1, f);

            let f = build(vec![
                (inv(&mup(-2) * &mu(1)), vec![xe, xm, z]),
                (-inv(&mup(-2) * &nu(-1)), vec![xe, z, xm]),
                (-inv(&mu(1) * &nup(2)), vec![xm, z, xe]),
                (inv(&nu(-1) * &nup(2)), vec![z, xm, xe]),
            ]);
            push(Family::XXZMixed, k1, k, e, -1, f);

            let xe1 = xg(k1, e - 1);
            let f = build(vec![
                (inv(&mup(-1) * &mup(1)), vec![xe1, xe, z]),
                (-inv(&mup(1) * &nup(1)), vec![xe1, z, xe]),
                (-inv(&mup(-1) * &nup(-1)), vec![xe, z, xe1]),
                (inv(&nup(-1) * &nup(1)), vec![z, xe, xe1]),
                (QScalar::from(i64::from(rm1)), vec![z]),
            ]);
            push(Family::XXZShiftAdjacent, k1, k1, e - 1, e, f);

            let f = build(vec![
                (inv(&mup(-1) * &mup(0)), vec![xe, xe, z]),
                (-&(&inv(&mup(0) * &nup(1)) + &inv(&mup(-1) * &nup(0))), vec![xe, z, xe]),
                (inv(&nup(0) * &nup(1)), vec![z, xe, xe]),
            ]);
            push(Family::XXZShift, k1, k1, e, e, f);
        }
        out
    }
}

/// Degree vector of a word.
pub fn bdeg(w: &[Generator]) -> DimVector {
    let mut v = DimVector::default();
    for g in w {
        match *g {
            Generator::X { k, i } => v.add_x(k, i, 1),
            Generator::Z { k } => v.add_z(k, 1),
        }
    }
    v
}

/// Degree vector of the highest-degree part and that part itself.
pub fn top_part(f: &FreeElement) -> Option<(DimVector, FreeElement)> {
    let mut best: Option<DimVector> = None;
    for (w, _) in f.iter() {
        let d = bdeg(w);
        best = match best {
            Some(b) if d.le(&b) => Some(b),
            Some(b) if b.le(&d) => Some(d),
            Some(b) => panic!("incomparable degrees {:?} and {:?} in one relation", b, d),
            None => Some(d),
        };
    }
    let d = best?;
    let mut top = FreeElement::zero();
    for (w, c) in f.iter() {
        if bdeg(w) == d {
            top.add_term(w.clone(), c);
        }
    }
    Some((d, top))
}

/// Which comparison of words to use.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrderMode {
    XOnly,
    Full,
}

fn x_key(g: &Generator) -> (Level, i64) {
    match *g {
        Generator::X { k, i } => (k, i),
        Generator::Z { k } => (k, i64::MIN),
    }
}

/// Compares `x`-only sequences: at the first difference, the larger letter
/// (by level, then index) makes the word smaller.
fn x_cmp(a: &[Generator], b: &[Generator]) -> Ordering {
    for (u, v) in a.iter().zip(b) {
        let (ku, kv) = (x_key(u), x_key(v));
        if ku != kv {
            return kv.cmp(&ku);
        }
    }
    Ordering::Equal
}

fn sorted_letters(w: &[Generator]) -> Vec<Generator> {
    let mut v = w.to_vec();
    v.sort();
    v
}

/// Total order on words of equal degree vector.
pub fn word_cmp(a: &[Generator], b: &[Generator], mode: OrderMode) -> Result<Ordering, Error> {
    if sorted_letters(a) != sorted_letters(b) {
        return Err(Error::UnequalDegree);
    }
    if mode == OrderMode::XOnly {
        if a.iter().any(Generator::is_z) {
            return Err(Error::InvalidWord(format!("z letter in x-only comparison: {}", word_to_string(a))));
        }
        return Ok(x_cmp(a, b));
    }
    Ok(full_cmp(a, b))
}

fn full_cmp(a: &[Generator], b: &[Generator]) -> Ordering {
    let zs = |w: &[Generator]| -> (Vec<Level>, Vec<usize>) {
        w.iter().enumerate().filter(|(_, g)| g.is_z()).map(|(n, g)| (g.level(), n)).unzip()
    };
    let (za, pa) = zs(a);
    let (zb, pb) = zs(b);
    for (u, v) in za.iter().zip(&zb) {
        if u != v {
            return v.cmp(u);
        }
    }
    for (u, v) in pa.iter().zip(&pb) {
        if u != v {
            return u.cmp(v);
        }
    }
    let xa: Vec<Generator> = a.iter().filter(|g| !g.is_z()).copied().collect();
    let xb: Vec<Generator> = b.iter().filter(|g| !g.is_z()).copied().collect();
    x_cmp(&xa, &xb)
}

pub fn word_less(a: &[Generator], b: &[Generator], mode: OrderMode) -> Result<bool, Error> {
    Ok(word_cmp(a, b, mode)? == Ordering::Less)
}

/// A normal word split into blocks: `z_i^(k)` blocks then `x_{s,t}^(l)` blocks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormalWord {
    pub z: Vec<(Level, i64)>,
    pub x: Vec<(Level, i64, i64)>,
}

impl NormalWord {
    pub fn word(&self, p: &Params) -> Word {
        let mut w = Vec::new();
        for &(k, i) in &self.z {
            w.extend(z_block(p, k, i));
        }
        for &(l, s, t) in &self.x {
            w.extend(x_run(l, s, t));
        }
        w
    }

    /// The object `⊕ Z_i^(k) ⊕ X_{s,t}^(l)` the word stands for.
    pub fn object(&self) -> Obj {
        let mut v: Vec<Indec> = self.z.iter().map(|&(k, i)| Indec::z(k, i)).collect();
        v.extend(self.x.iter().map(|&(l, s, t)| Indec::x(l, s, t)));
        Obj::from_indecs(v)
    }
}

/// Ordering keys: a word is normal when its blocks are weakly increasing.
fn z_key(k: Level, i: i64) -> (std::cmp::Reverse<Level>, i64, std::cmp::Reverse<i64>) {
    (std::cmp::Reverse(k), i.abs(), std::cmp::Reverse(i))
}

fn x_block_key(l: Level, s: i64, t: i64) -> (std::cmp::Reverse<Level>, std::cmp::Reverse<i64>, std::cmp::Reverse<i64>) {
    (std::cmp::Reverse(l), std::cmp::Reverse(s), std::cmp::Reverse(t))
}

/// Splits a word into blocks if it is normal.
pub fn parse_normal(p: &Params, w: &[Generator]) -> Option<NormalWord> {
    let last_z = w.iter().rposition(Generator::is_z);
    let (zpart, xpart) = match last_z {
        Some(n) => w.split_at(n + 1),
        None => w.split_at(0),
    };
    let mut z = Vec::new();
    let mut prefix: Vec<(Level, i64)> = Vec::new();
    for g in zpart {
        match *g {
            Generator::X { k, i } => prefix.push((k, i)),
            Generator::Z { k } => {
                z.push((k, z_index(p, k, &prefix)?));
                prefix.clear();
            }
        }
    }
    let mut x: Vec<(Level, i64, i64)> = Vec::new();
    for g in xpart {
        let Generator::X { k, i } = *g else { unreachable!() };
        match x.last_mut() {
            Some((l, _, t)) if *l == k && *t + 1 == i => *t = i,
            _ => x.push((k, i, i)),
        }
    }
    let zs_ok = z.windows(2).all(|v| z_key(v[0].0, v[0].1) <= z_key(v[1].0, v[1].1));
    let xs_ok = x.windows(2).all(|v| x_block_key(v[0].0, v[0].1, v[0].2) <= x_block_key(v[1].0, v[1].1, v[1].2));
    (zs_ok && xs_ok).then_some(NormalWord { z, x })
}

fn z_index(p: &Params, k: Level, prefix: &[(Level, i64)]) -> Option<i64> {
    let n = prefix.len() as i64;
    if n == 0 {
        return Some(0);
    }
    let below = prefix.iter().enumerate().all(|(t, &(l, i))| l == k && i == -n + t as i64);
    if below {
        return Some(-n);
    }
    let e = p.shift(k);
    let k1 = p.level_add(k, 1);
    let above = prefix.iter().enumerate().all(|(t, &(l, i))| l == k1 && i == e + n - 1 - t as i64);
    above.then_some(n)
}

pub fn is_normal(p: &Params, w: &[Generator]) -> bool {
    parse_normal(p, w).is_some()
}

/// Distinct rearrangements of a multiset of letters.
fn permutations(letters: &[Generator]) -> Vec<Word> {
    let mut counts: BTreeMap<Generator, usize> = BTreeMap::new();
    for g in letters {
        *counts.entry(*g).or_insert(0) += 1;
    }
    let mut items: Vec<(Generator, usize)> = counts.into_iter().collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(letters.len());
    fn rec(items: &mut Vec<(Generator, usize)>, cur: &mut Word, n: usize, out: &mut Vec<Word>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for t in 0..items.len() {
            if items[t].1 > 0 {
                items[t].1 -= 1;
                cur.push(items[t].0);
                rec(items, cur, n, out);
                cur.pop();
                items[t].1 += 1;
            }
        }
    }
    rec(&mut items, &mut cur, letters.len(), &mut out);
    out
}

/// Largest number of distinct words of one degree the normal-form engine
/// accepts.
pub const MAX_WORDS_PER_DEGREE: usize = 40_320;

/// Row-reduced relations of one degree: for every non-normal word, a
/// combination `w - (smaller words) - (lower-degree tail)` in the ideal.
struct DegreeReducer {
    pivots: HashMap<Word, (FreeElement, FreeElement)>,
}

/// Normal forms with respect to the full presentation.
pub struct NormalFormEngine<'a> {
    hall: &'a HallAlgebra,
    reducers: Mutex<HashMap<Vec<Generator>, Arc<DegreeReducer>>>,
    cache: Mutex<HashMap<Word, Arc<FreeElement>>>,
}

impl<'a> NormalFormEngine<'a> {
    pub fn new(hall: &'a HallAlgebra) -> Self {
        NormalFormEngine { hall, reducers: Mutex::default(), cache: Mutex::default() }
    }

    fn params(&self) -> &Params {
        &self.hall.params
    }

    fn reducer(&self, letters: &[Generator]) -> Result<Arc<DegreeReducer>, Error> {
        let key = sorted_letters(letters);
        if let Some(r) = self.reducers.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let r = Arc::new(self.build_reducer(&key)?);
        Ok(self.reducers.lock().unwrap().entry(key).or_insert(r).clone())
    }

    fn build_reducer(&self, letters: &[Generator]) -> Result<DegreeReducer, Error> {
        let p = *self.params();
        let words = permutations(letters);
        if words.len() > MAX_WORDS_PER_DEGREE {
            return Err(Error::Stalled(format!("degree of {} has {} words", word_to_string(letters), words.len())));
        }
        let mut todo: usize = words.iter().filter(|w| !is_normal(&p, w)).count();
        let mut pivots: HashMap<Word, (FreeElement, FreeElement)> = HashMap::new();
        if todo == 0 {
            return Ok(DegreeReducer { pivots });
        }
        let xs: Vec<i64> = letters
            .iter()
            .filter_map(|g| match g {
                Generator::X { i, .. } => Some(*i),
                _ => None,
            })
            .collect();
        let lo = xs.iter().copied().min().unwrap_or(0) - 1;
        let hi = xs.iter().copied().max().unwrap_or(0) + 1;
        let rels = self.hall.relations(Presentation::Full, lo..=hi);
        let total = bdeg(letters);
        let cmp = |a: &Word, b: &Word| full_cmp(a, b);
        for rel in &rels {
            let Some((d, top)) = top_part(&rel.element) else { continue };
            let mut tail = rel.element.clone();
            tail.add_scaled(&top, &-QScalar::one());
            let mut rest = letters.to_vec();
            let mut fits = true;
            let first = top.words().next().unwrap().clone();
            for g in &first {
                match rest.iter().position(|h| h == g) {
                    Some(n) => {
                        rest.remove(n);
                    }
                    None => {
                        fits = false;
                        break;
                    }
                }
            }
            if !fits {
                continue;
            }
            debug_assert!(d.le(&total));
            for perm in permutations(&rest) {
                for cut in 0..=perm.len() {
                    let u = FreeElement::word(perm[..cut].to_vec());
                    let v = FreeElement::word(perm[cut..].to_vec());
                    let mut row_top = u.mul(&top).mul(&v);
                    let mut row_tail = u.mul(&tail).mul(&v);
                    // Reduce by existing pivots, largest word first.
                    loop {
                        let lead = row_top.words().max_by(|a, b| cmp(a, b)).cloned();
                        let Some(lead) = lead else { break };
                        match pivots.get(&lead) {
                            Some((pt, pl)) => {
                                let c = -row_top.coeff(&lead);
                                row_top.add_scaled(pt, &c);
                                row_tail.add_scaled(pl, &c);
                            }
                            None => {
                                let c = row_top.coeff(&lead).inv();
                                let normal = is_normal(&p, &lead);
                                pivots.insert(lead, (row_top.scaled(&c), row_tail.scaled(&c)));
                                if !normal {
                                    todo -= 1;
                                }
                                break;
                            }
                        }
                    }
                    if todo == 0 {
                        return Ok(DegreeReducer { pivots });
                    }
                }
            }
        }
        Ok(DegreeReducer { pivots })
    }

    /// Normal form of a single word.
    pub fn normal_form_word(&self, w: &[Generator]) -> Result<Arc<FreeElement>, Error> {
        if let Some(v) = self.cache.lock().unwrap().get(w) {
            return Ok(v.clone());
        }
        let p = *self.params();
        let v = if is_normal(&p, w) {
            FreeElement::word(w.to_vec())
        } else {
            let red = self.reducer(w)?;
            let mut top = FreeElement::word(w.to_vec());
            let mut tail = FreeElement::zero();
            loop {
                let lead = top.words().filter(|u| !is_normal(&p, u)).max_by(|a, b| full_cmp(a, b)).cloned();
                let Some(lead) = lead else { break };
                let Some((pt, pl)) = red.pivots.get(&lead) else {
                    return Err(Error::Stalled(word_to_string(&lead)));
                };
                let c = -top.coeff(&lead);
                top.add_scaled(pt, &c);
                tail.add_scaled(pl, &c);
            }
            // `w = top + tail` modulo the ideal.
            let mut out = top;
            for (u, c) in tail.iter() {
                out.add_scaled(&*self.normal_form_word(u)?, c);
            }
            out
        };
        let v = Arc::new(v);
        Ok(self.cache.lock().unwrap().entry(w.to_vec()).or_insert(v).clone())
    }

    pub fn normal_form(&self, f: &FreeElement) -> Result<FreeElement, Error> {
        let mut out = FreeElement::zero();
        for (w, c) in f.iter() {
            out.add_scaled(&*self.normal_form_word(w)?, c);
        }
        Ok(out)
    }
}

/// Upper bound for a graded piece: total number of `z` letters and a
/// componentwise bound on the `x` degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedBound {
    pub d: usize,
    pub dx: BTreeMap<(Level, i64), i64>,
}

impl GradedBound {
    /// `dX <= c` on `[lo, hi]` at every level in `levels`.
    pub fn boxed(d: usize, levels: &[Level], lo: i64, hi: i64, c: i64) -> Self {
        let mut dx = BTreeMap::new();
        for &k in levels {
            for i in lo..=hi {
                dx.insert((k, i), c);
            }
        }
        GradedBound { d, dx }
    }

    fn admits(&self, v: &DimVector) -> bool {
        v.ql_z() == self.d as i64 && v.dx.iter().all(|(key, &n)| n <= *self.dx.get(key).unwrap_or(&0))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedReport {
    pub normal_count: usize,
    pub object_count: usize,
    pub equal: bool,
    pub rank_q2: usize,
    pub rank_q3: usize,
}

/// Normal words with exactly `bound.d` z letters and x degree within the bound.
pub fn normal_words_within(p: &Params, bound: &GradedBound) -> Vec<NormalWord> {
    let mut zblocks: Vec<(Level, i64)> = Vec::new();
    let reach = bound.dx.keys().map(|&(_, i)| i.abs()).max().unwrap_or(0) + p.m + 1;
    for k in p.levels() {
        for i in -reach..=reach {
            zblocks.push((k, i));
        }
    }
    zblocks.sort_by_key(|&(k, i)| z_key(k, i));
    let mut xblocks: Vec<(Level, i64, i64)> = Vec::new();
    for &(l, s) in bound.dx.keys() {
        let mut t = s;
        while bound.dx.contains_key(&(l, t)) {
            xblocks.push((l, s, t));
            t += 1;
        }
    }
    xblocks.sort_by_key(|&(l, s, t)| x_block_key(l, s, t));
    let block_deg_z = |&(k, i): &(Level, i64)| bdeg(&z_block(p, k, i));
    let block_deg_x = |&(l, s, t): &(Level, i64, i64)| bdeg(&x_run(l, s, t));
    let zdeg: Vec<DimVector> = zblocks.iter().map(block_deg_z).collect();
    let xdeg: Vec<DimVector> = xblocks.iter().map(block_deg_x).collect();
    let fits = |v: &DimVector| v.dx.iter().all(|(key, &n)| n <= *bound.dx.get(key).unwrap_or(&0));

    let mut zseqs: Vec<(Vec<(Level, i64)>, DimVector)> = Vec::new();
    fn zrec(
        start: usize,
        left: usize,
        cur: &mut Vec<usize>,
        acc: DimVector,
        degs: &[DimVector],
        fits: &dyn Fn(&DimVector) -> bool,
        out: &mut Vec<(Vec<usize>, DimVector)>,
    ) {
        if left == 0 {
            out.push((cur.clone(), acc));
            return;
        }
        for n in start..degs.len() {
            let next = acc.add(&degs[n]);
            if fits(&next) {
                cur.push(n);
                zrec(n, left - 1, cur, next, degs, fits, out);
                cur.pop();
            }
        }
    }
    let mut raw = Vec::new();
    zrec(0, bound.d, &mut Vec::new(), DimVector::default(), &zdeg, &fits, &mut raw);
    for (idx, v) in raw {
        zseqs.push((idx.iter().map(|&n| zblocks[n]).collect(), v));
    }
    let mut out = Vec::new();
    for (z, zv) in zseqs {
        let mut xs: Vec<(Vec<usize>, DimVector)> = Vec::new();
        fn xrec(
            start: usize,
            cur: &mut Vec<usize>,
            acc: DimVector,
            degs: &[DimVector],
            fits: &dyn Fn(&DimVector) -> bool,
            out: &mut Vec<(Vec<usize>, DimVector)>,
        ) {
            out.push((cur.clone(), acc.clone()));
            for n in start..degs.len() {
                let next = acc.add(&degs[n]);
                if fits(&next) {
                    cur.push(n);
                    xrec(n, cur, next, degs, fits, out);
                    cur.pop();
                }
            }
        }
        xrec(0, &mut Vec::new(), zv, &xdeg, &fits, &mut xs);
        for (idx, _) in xs {
            out.push(NormalWord { z: z.clone(), x: idx.iter().map(|&n| xblocks[n]).collect() });
        }
    }
    out
}

/// Objects with exactly `bound.d` Z summands and `bdim_X` within the bound.
pub fn objects_within(p: &Params, bound: &GradedBound) -> Vec<Obj> {
    let reach = bound.dx.keys().map(|&(_, i)| i.abs()).max().unwrap_or(0) + p.m + 1;
    let mut cands: Vec<Indec> = Vec::new();
    for k in p.levels() {
        for i in -reach..=reach {
            cands.push(Indec::z(k, i));
            for j in i..=reach {
                cands.push(Indec::x(k, i, j));
            }
        }
    }
    let cands: Vec<(Indec, DimVector)> = cands
        .into_iter()
        .map(|a| (a, p.bdim_indec(&a)))
        .filter(|(_, v)| v.dx.iter().all(|(key, &n)| n <= *bound.dx.get(key).unwrap_or(&0)))
        .collect();
    let mut out = Vec::new();
    fn rec(
        start: usize,
        cur: &mut Vec<Indec>,
        acc: DimVector,
        cands: &[(Indec, DimVector)],
        bound: &GradedBound,
        out: &mut Vec<Obj>,
    ) {
        if bound.admits(&acc) {
            out.push(Obj::from_indecs(cur.clone()));
        }
        for n in start..cands.len() {
            let next = acc.add(&cands[n].1);
            let ok =
                next.ql_z() <= bound.d as i64 && next.dx.iter().all(|(key, &c)| c <= *bound.dx.get(key).unwrap_or(&0));
            if ok {
                cur.push(cands[n].0);
                rec(n, cur, next, cands, bound, out);
                cur.pop();
            }
        }
    }
    rec(0, &mut Vec::new(), DimVector::default(), &cands, bound, &mut out);
    out
}

/// Exact rank of a rational matrix.
pub fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, piv);
        let inv = BigRational::one() / &rows[rank][c];
        let pivot: Vec<BigRational> = rows[rank].iter().map(|v| v * &inv).collect();
        for r in rank + 1..rows.len() {
            if !rows[r][c].is_zero() {
                let f = rows[r][c].clone();
                for (cc, pv) in pivot.iter().enumerate().skip(c) {
                    let t = &f * pv;
                    rows[r][cc] -= t;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

const RANK_PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % RANK_PRIME as u128) as u64
}

fn inv_mod(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, RANK_PRIME - 2, 1);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        e >>= 1;
    }
    acc
}

fn rational_mod(v: &BigRational) -> Option<u64> {
    let p = num_bigint::BigInt::from(RANK_PRIME);
    let reduce = |x: &num_bigint::BigInt| -> u64 {
        let r = ((x % &p) + &p) % &p;
        u64::try_from(r).unwrap()
    };
    let d = reduce(v.denom());
    (d != 0).then(|| mul_mod(reduce(v.numer()), inv_mod(d)))
}

/// Rank of a sparse matrix modulo a 61-bit prime, or `None` if an entry has
/// a denominator divisible by the prime. A lower bound for the rank over `Q`.
fn sparse_rank_mod(rows: &[Vec<(usize, BigRational)>]) -> Option<usize> {
    let mut pivots: HashMap<usize, BTreeMap<usize, u64>> = HashMap::new();
    for row in rows {
        let mut cur = BTreeMap::new();
        for (c, v) in row {
            let v = rational_mod(v)?;
            if v != 0 {
                cur.insert(*c, v);
            }
        }
        while let Some((&lead, &v)) = cur.iter().next() {
            let Some(piv) = pivots.get(&lead) else {
                let inv = inv_mod(v);
                cur.values_mut().for_each(|x| *x = mul_mod(*x, inv));
                pivots.insert(lead, cur);
                break;
            };
            for (&c, &pv) in piv {
                let e = cur.entry(c).or_insert(0);
                *e = (*e + RANK_PRIME - mul_mod(v, pv)) % RANK_PRIME;
                if *e == 0 {
                    cur.remove(&c);
                }
            }
        }
    }
    Some(pivots.len())
}

/// Rank over `Q`: modular elimination first, exact elimination only when the
/// modular rank is not already full.
fn rank_of_sparse(rows: &[Vec<(usize, BigRational)>], ncols: usize) -> usize {
    let full = rows.len().min(ncols);
    if sparse_rank_mod(rows) == Some(full) {
        return full;
    }
    let dense = rows
        .iter()
        .map(|r| {
            let mut v = vec![BigRational::zero(); ncols];
            for (c, x) in r {
                v[*c] = x.clone();
            }
            v
        })
        .collect();
    rank(dense)
}

impl HallAlgebra {
    /// Compares normal words with objects in one graded piece and checks
    /// that the images of the normal words are independent modulo objects
    /// with fewer Z summands.
    pub fn graded_check(&self, bound: &GradedBound) -> GradedReport {
        let p = self.params;
        let words = normal_words_within(&p, bound);
        let mut objects = objects_within(&p, bound);
        // Larger objects first, so leading terms tend to be distinct pivots.
        objects.sort_by_cached_key(|o| (std::cmp::Reverse(p.bdim(o).ql()), o.clone()));
        let index: HashMap<&Obj, usize> = objects.iter().enumerate().map(|(n, o)| (o, n)).collect();
        let mut rows_q2 = Vec::with_capacity(words.len());
        let mut rows_q3 = Vec::with_capacity(words.len());
        for w in &words {
            let image = self.eval_word(&w.word(&p));
            let (mut r2, mut r3) = (Vec::new(), Vec::new());
            for (o, c) in image.iter() {
                if p.bdim(o).ql_z() == bound.d as i64 {
                    let n = *index.get(o).expect("image outside the graded piece");
                    r2.push((n, c.eval_int(2).expect("pole at q = 2")));
                    r3.push((n, c.eval_int(3).expect("pole at q = 3")));
                }
            }
            rows_q2.push(r2);
            rows_q3.push(r3);
        }
        GradedReport {
            normal_count: words.len(),
            object_count: objects.len(),
            equal: words.len() == objects.len(),
            rank_q2: rank_of_sparse(&rows_q2, objects.len()),
            rank_q3: rank_of_sparse(&rows_q3, objects.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(k: Level, i: i64) -> Generator {
        Generator::X { k, i }
    }

    fn z(k: Level) -> Generator {
        Generator::Z { k }
    }

    #[test]
    fn higher_level_first_is_smaller() {
        let (a, b) = (vec![x(2, 0), x(1, 0)], vec![x(1, 0), x(2, 0)]);
        for m in [OrderMode::XOnly, OrderMode::Full] {
            assert!(word_less(&a, &b, m).unwrap());
            assert!(!word_less(&b, &a, m).unwrap());
            assert!(!word_less(&a, &a, m).unwrap());
        }
    }

    #[test]
    fn later_z_is_larger() {
        let early = vec![z(1), x(1, 0), x(1, 1)];
        let late = vec![x(1, 0), z(1), x(1, 1)];
        assert!(word_less(&early, &late, OrderMode::Full).unwrap());
    }

    #[test]
    fn decreasing_run_is_normal() {
        let p = Params::new(1, 2).unwrap();
        let w = vec![x(1, 1), x(1, 0)];
        assert!(is_normal(&p, &w));
        let h = HallAlgebra::new(p);
        let f = NormalFormEngine::new(&h).normal_form_word(&w).unwrap();
        assert_eq!(*f, FreeElement::word(w));
    }

    #[test]
    fn distant_letters_commute_up_to_a_scalar() {
        let p = Params::new(2, 3).unwrap();
        let h = HallAlgebra::new(p);
        let (w, swapped) = (vec![x(1, 0), x(2, 5)], vec![x(2, 5), x(1, 0)]);
        let f = NormalFormEngine::new(&h).normal_form_word(&w).unwrap();
        assert_eq!(f.len(), 1);
        let c = f.coeff(&swapped);
        assert!(!c.is_zero());
        assert_eq!(h.eval_word(&swapped).scaled(&c), *h.eval_word(&w));
    }

    #[test]
    fn unit_piece() {
        let h = HallAlgebra::new(Params::new(1, 1).unwrap());
        let rep = h.graded_check(&GradedBound { d: 0, dx: BTreeMap::new() });
        assert_eq!(rep, GradedReport { normal_count: 1, object_count: 1, equal: true, rank_q2: 1, rank_q3: 1 });
    }

    #[test]
    fn two_position_piece() {
        let p = Params::new(1, 1).unwrap();
        let bound = GradedBound::boxed(0, &[1], 0, 1, 1);
        let words: Vec<Word> = normal_words_within(&p, &bound).iter().map(|n| n.word(&p)).collect();
        assert_eq!(words.len(), 5);
        for w in [vec![], vec![x(1, 0)], vec![x(1, 1)], vec![x(1, 0), x(1, 1)], vec![x(1, 1), x(1, 0)]] {
            assert!(words.contains(&w), "{}", word_to_string(&w));
        }
        let rep = HallAlgebra::new(p).graded_check(&bound);
        assert_eq!(rep, GradedReport { normal_count: 5, object_count: 5, equal: true, rank_q2: 5, rank_q3: 5 });
    }
}
