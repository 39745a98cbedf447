//! Combinatorial model of the category `C(r,m)`: indecomposables, graded
//! arrows, composition, suspension and dimension vectors.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, ParseError};
use crate::scalar::{Poly, QScalar};

/// Level `k` is stored as its representative in `[1, r]`.
pub type Level = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Params {
    pub r: u32,
    pub m: i64,
}

impl Params {
    pub fn new(r: u32, m: i64) -> Result<Self, Error> {
        if r == 0 || m <= 0 {
            return Err(Error::Params(format!("need r >= 1 and m >= 1, got r={r}, m={m}")));
        }
        Ok(Params { r, m })
    }

    pub fn levels(&self) -> impl Iterator<Item = Level> {
        1..=self.r
    }

    /// `k + d` computed modulo `r` with representatives in `[1, r]`.
    pub fn level_add(&self, k: Level, d: i64) -> Level {
        let r = self.r as i64;
        ((k as i64 - 1 + d).rem_euclid(r) + 1) as Level
    }

    /// Index shift `δ_{k,r} m` picked up when suspending out of level `k`.
    pub fn shift(&self, k: Level) -> i64 {
        if k == self.r {
            self.m
        } else {
            0
        }
    }

    pub fn is_valid_level(&self, k: Level) -> bool {
        (1..=self.r).contains(&k)
    }
}

/// Indecomposable object `X(k,i,j)` (with `i <= j`) or `Z(k,i)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Indec {
    X { k: Level, i: i64, j: i64 },
    Z { k: Level, i: i64 },
}

impl Indec {
    pub fn x(k: Level, i: i64, j: i64) -> Indec {
        assert!(i <= j, "X({k},{i},{j}) needs i <= j");
        Indec::X { k, i, j }
    }

    pub fn z(k: Level, i: i64) -> Indec {
        Indec::Z { k, i }
    }

    pub fn level(&self) -> Level {
        match *self {
            Indec::X { k, .. } | Indec::Z { k, .. } => k,
        }
    }

    pub fn is_x(&self) -> bool {
        matches!(self, Indec::X { .. })
    }

    fn key(&self) -> (Level, u8, i64, i64) {
        match *self {
            Indec::X { k, i, j } => (k, 0, i, j),
            Indec::Z { k, i } => (k, 1, i, 0),
        }
    }

    /// Smallest index occurring in the object.
    pub fn lo(&self) -> i64 {
        match *self {
            Indec::X { i, .. } | Indec::Z { i, .. } => i,
        }
    }

    /// Largest index occurring in the object.
    pub fn hi(&self) -> i64 {
        match *self {
            Indec::X { j, .. } => j,
            Indec::Z { i, .. } => i,
        }
    }

    pub fn check(&self, p: &Params) -> Result<(), Error> {
        if !p.is_valid_level(self.level()) {
            return Err(Error::Params(format!("level of {self} outside [1,{}]", p.r)));
        }
        Ok(())
    }
}

impl Ord for Indec {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

impl PartialOrd for Indec {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Indec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Indec::X { k, i, j } => write!(f, "X({k},{i},{j})"),
            Indec::Z { k, i } => write!(f, "Z({k},{i})"),
        }
    }
}

/// Isomorphism class of an object: a sorted multiset of indecomposables.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Default)]
pub struct Obj(Vec<Indec>);

impl Obj {
    pub fn zero() -> Obj {
        Obj(Vec::new())
    }

    pub fn from_indecs(mut v: Vec<Indec>) -> Obj {
        v.sort();
        Obj(v)
    }

    pub fn indec(a: Indec) -> Obj {
        Obj(vec![a])
    }

    /// `X(k,i,j)`, where `X(k,i,i-1)` is the zero object.
    pub fn x(k: Level, i: i64, j: i64) -> Obj {
        if j == i - 1 {
            Obj::zero()
        } else {
            Obj::indec(Indec::x(k, i, j))
        }
    }

    pub fn z(k: Level, i: i64) -> Obj {
        Obj::indec(Indec::z(k, i))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn summands(&self) -> &[Indec] {
        &self.0
    }

    /// Number of indecomposable summands counted with multiplicity.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_indec(&self) -> Option<Indec> {
        (self.0.len() == 1).then(|| self.0[0])
    }

    pub fn plus(&self, o: &Obj) -> Obj {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Obj::from_indecs(v)
    }

    pub fn plus_indec(&self, a: Indec) -> Obj {
        let mut v = self.0.clone();
        let pos = v.binary_search(&a).unwrap_or_else(|p| p);
        v.insert(pos, a);
        Obj(v)
    }

    /// Removes one copy of `a`; `None` if `a` is not a summand.
    pub fn without(&self, a: &Indec) -> Option<Obj> {
        let pos = self.0.iter().position(|b| b == a)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(Obj(v))
    }

    /// Distinct summands with multiplicities.
    pub fn multiplicities(&self) -> Vec<(Indec, usize)> {
        let mut out: Vec<(Indec, usize)> = Vec::new();
        for a in &self.0 {
            match out.last_mut() {
                Some((b, n)) if b == a => *n += 1,
                _ => out.push((*a, 1)),
            }
        }
        out
    }

    pub fn check(&self, p: &Params) -> Result<(), Error> {
        self.0.iter().try_for_each(|a| a.check(p))
    }
}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (n, a) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Obj {
    type Err = ParseError;

    /// Parses `X(k,i,j)`, `Z(k,i)`, sums joined by `+`, and `0`.
    fn from_str(s: &str) -> Result<Obj, ParseError> {
        let compact: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        let text: String = compact.iter().map(|&(_, c)| c).collect();
        let col = |n: usize| compact.get(n).map_or(s.len(), |&(p, _)| p) + 1;
        if text.is_empty() {
            return Err(ParseError::new("empty object", 1, 1));
        }
        if text == "0" {
            return Ok(Obj::zero());
        }
        let mut out = Vec::new();
        let mut start = 0;
        for part in text.split('+') {
            let err = |m: &str| ParseError::new(m, 1, col(start));
            let (kind, rest) = part.split_at(part.len().min(1));
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| err("expected X(k,i,j) or Z(k,i)"))?;
            let nums: Result<Vec<i64>, _> = inner.split(',').map(str::parse::<i64>).collect();
            let nums = nums.map_err(|_| err("malformed integer"))?;
            let level = |v: i64| -> Result<Level, ParseError> {
                u32::try_from(v).ok().filter(|&k| k >= 1).ok_or_else(|| err("level must be >= 1"))
            };
            match (kind, nums.as_slice()) {
                ("X", &[k, i, j]) => {
                    if j < i - 1 {
                        return Err(err("X(k,i,j) needs i <= j"));
                    }
                    if j >= i {
                        out.push(Indec::x(level(k)?, i, j));
                    }
                }
                ("Z", &[k, i]) => out.push(Indec::z(level(k)?, i)),
                ("0", &[]) => {}
                _ => return Err(err("expected X(k,i,j) or Z(k,i)")),
            }
            start += part.len() + 1;
        }
        Ok(Obj::from_indecs(out))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum ArrowKind {
    /// Degree 0, `X -> X` on the same level.
    Alpha,
    /// Degree 1, `X -> Z` on the same level.
    Beta,
    /// Degree 2, `X -> X` on the next level.
    Gamma,
    /// Degree 0, `Z -> Z` on the same level.
    AlphaZ,
    /// Degree 1, `Z -> X` on the next level.
    BetaZ,
}

impl ArrowKind {
    pub fn degree(self) -> usize {
        match self {
            ArrowKind::Alpha | ArrowKind::AlphaZ => 0,
            ArrowKind::Beta | ArrowKind::BetaZ => 1,
            ArrowKind::Gamma => 2,
        }
    }
}

/// A basis morphism between indecomposables (one per nonzero degree).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Arrow {
    pub kind: ArrowKind,
    pub src: Indec,
    pub tgt: Indec,
}

impl Arrow {
    pub fn degree(&self) -> usize {
        self.kind.degree()
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.tgt && self.degree() == 0
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {} -> {}", self.kind, self.src, self.tgt)
    }
}

/// Dimension vector `(bdim_Z, bdim_X)` with finite support.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct DimVector {
    pub dz: BTreeMap<Level, i64>,
    pub dx: BTreeMap<(Level, i64), i64>,
}

impl DimVector {
    pub fn add_z(&mut self, k: Level, n: i64) {
        bump(&mut self.dz, k, n);
    }

    pub fn add_x(&mut self, k: Level, i: i64, n: i64) {
        bump(&mut self.dx, (k, i), n);
    }

    pub fn add(&self, o: &DimVector) -> DimVector {
        let mut v = self.clone();
        for (&k, &n) in &o.dz {
            v.add_z(k, n);
        }
        for (&(k, i), &n) in &o.dx {
            v.add_x(k, i, n);
        }
        v
    }

    pub fn ql_z(&self) -> i64 {
        self.dz.values().sum()
    }

    pub fn ql_x(&self) -> i64 {
        self.dx.values().sum()
    }

    pub fn ql(&self) -> i64 {
        self.ql_z() + self.ql_x()
    }

    pub fn is_zero(&self) -> bool {
        self.dz.is_empty() && self.dx.is_empty()
    }

    pub fn z_part(&self) -> DimVector {
        DimVector { dz: self.dz.clone(), dx: BTreeMap::new() }
    }

    /// The lexicographic-componentwise order: `dZ < dZ'` componentwise, or
    /// equal `dZ` and `dX <= dX'` componentwise.
    pub fn le(&self, o: &DimVector) -> bool {
        if self.dz == o.dz {
            return map_le(&self.dx, &o.dx);
        }
        map_le(&self.dz, &o.dz)
    }

    pub fn lt(&self, o: &DimVector) -> bool {
        self != o && self.le(o)
    }
}

fn bump<K: Ord + Copy>(m: &mut BTreeMap<K, i64>, k: K, n: i64) {
    let e = m.entry(k).or_insert(0);
    *e += n;
    if *e == 0 {
        m.remove(&k);
    }
}

fn map_le<K: Ord>(a: &BTreeMap<K, i64>, b: &BTreeMap<K, i64>) -> bool {
    a.iter().all(|(k, &v)| v <= *b.get(k).unwrap_or(&0)) && b.values().all(|&v| v >= 0)
}

impl Params {
    /// Dimensions of the degree 0, 1, 2 parts of `Hom(a, b)`.
    pub fn hom_dims(&self, a: &Indec, b: &Indec) -> [u8; 3] {
        let mut d = [0u8; 3];
        match (*a, *b) {
            (Indec::X { k, i, j }, Indec::X { k: l, i: s, j: t }) => {
                if l == k && i <= s && s <= j && t >= j {
                    d[0] = 1;
                }
                let e = self.shift(k);
                if l == self.level_add(k, 1) && s <= i + e - 1 && i + e - 1 <= t && t <= j + e - 1 {
                    d[2] = 1;
                }
            }
            (Indec::X { k, i, j }, Indec::Z { k: l, i: s }) => {
                if l == k && i <= s && s <= j {
                    d[1] = 1;
                }
            }
            (Indec::Z { k, i }, Indec::Z { k: l, i: s }) => {
                if l == k && s >= i {
                    d[0] = 1;
                }
            }
            (Indec::Z { k, i }, Indec::X { k: l, i: s, j: t }) => {
                let e = self.shift(k);
                if l == self.level_add(k, 1) && s <= i + e - 1 && i + e - 1 <= t {
                    d[1] = 1;
                }
            }
        }
        d
    }

    pub fn hom_dim(&self, a: &Indec, b: &Indec) -> u32 {
        self.hom_dims(a, b).iter().map(|&v| v as u32).sum()
    }

    /// The arrow `a -> b` of degree `deg`, if any.
    pub fn arrow(&self, a: &Indec, b: &Indec, deg: usize) -> Option<Arrow> {
        if deg > 2 || self.hom_dims(a, b)[deg] == 0 {
            return None;
        }
        let kind = match (a.is_x(), b.is_x(), deg) {
            (true, true, 0) => ArrowKind::Alpha,
            (true, false, 1) => ArrowKind::Beta,
            (true, true, 2) => ArrowKind::Gamma,
            (false, false, 0) => ArrowKind::AlphaZ,
            (false, true, 1) => ArrowKind::BetaZ,
            _ => unreachable!("hom_dims and arrow kinds disagree"),
        };
        Some(Arrow { kind, src: *a, tgt: *b })
    }

    pub fn arrows(&self, a: &Indec, b: &Indec) -> Vec<Arrow> {
        (0..3).filter_map(|d| self.arrow(a, b, d)).collect()
    }

    pub fn identity(&self, a: &Indec) -> Arrow {
        self.arrow(a, a, 0).expect("every object has an identity")
    }

    /// `second ∘ first`: the arrow of the summed degree if it exists, else zero.
    pub fn compose(&self, first: &Arrow, second: &Arrow) -> Result<Option<Arrow>, Error> {
        if first.tgt != second.src {
            return Err(Error::EndpointMismatch(format!("{first} then {second}")));
        }
        Ok(self.arrow(&first.src, &second.tgt, first.degree() + second.degree()))
    }

    pub fn suspend_indec(&self, a: &Indec, n: i64) -> Indec {
        let mut a = *a;
        for _ in 0..n.unsigned_abs() {
            a = if n > 0 { self.sigma(&a) } else { self.sigma_inv(&a) };
        }
        a
    }

    fn sigma(&self, a: &Indec) -> Indec {
        let e = self.shift(a.level());
        let k = self.level_add(a.level(), 1);
        match *a {
            Indec::X { i, j, .. } => Indec::X { k, i: i + e, j: j + e },
            Indec::Z { i, .. } => Indec::Z { k, i: i + e },
        }
    }

    fn sigma_inv(&self, a: &Indec) -> Indec {
        let k = self.level_add(a.level(), -1);
        let e = self.shift(k);
        match *a {
            Indec::X { i, j, .. } => Indec::X { k, i: i - e, j: j - e },
            Indec::Z { i, .. } => Indec::Z { k, i: i - e },
        }
    }

    /// `Σ^n M`, summand-wise.
    pub fn suspend(&self, m: &Obj, n: i64) -> Obj {
        Obj::from_indecs(m.summands().iter().map(|a| self.suspend_indec(a, n)).collect())
    }

    pub fn bdim_indec(&self, a: &Indec) -> DimVector {
        let mut v = DimVector::default();
        match *a {
            Indec::X { k, i, j } => {
                for s in i..=j {
                    v.add_x(k, s, 1);
                }
            }
            Indec::Z { k, i } => {
                v.add_z(k, 1);
                if i < 0 {
                    for s in i..0 {
                        v.add_x(k, s, 1);
                    }
                } else if i > 0 {
                    let k1 = self.level_add(k, 1);
                    let e = self.shift(k);
                    for s in e..i + e {
                        v.add_x(k1, s, 1);
                    }
                }
            }
        }
        v
    }

    pub fn bdim(&self, m: &Obj) -> DimVector {
        m.summands().iter().fold(DimVector::default(), |acc, a| acc.add(&self.bdim_indec(a)))
    }

    pub fn ql(&self, m: &Obj) -> i64 {
        self.bdim(m).ql()
    }

    /// `dim_F End(M)`.
    pub fn dim_end(&self, m: &Obj) -> u32 {
        self.dim_hom(m, m)
    }

    pub fn dim_hom(&self, a: &Obj, b: &Obj) -> u32 {
        let mut n = 0;
        for x in a.summands() {
            for y in b.summands() {
                n += self.hom_dim(x, y);
            }
        }
        n
    }

    /// `(|End M|, |Aut M|)`.
    pub fn end_aut_cards(&self, m: &Obj) -> (QScalar, QScalar) {
        let de = self.dim_end(m) as i64;
        let mults = m.multiplicities();
        let semisimple: i64 = mults.iter().map(|&(_, n)| (n * n) as i64).sum();
        let mut aut = QScalar::q_pow(de - semisimple);
        for &(_, n) in &mults {
            aut = &aut * &QScalar::from_poly(gl_order(n));
        }
        (QScalar::q_pow(de), aut)
    }
}

/// `|GL_n(q)| = ∏_{t<n} (q^n - q^t)`.
pub fn gl_order(n: usize) -> Poly {
    let mut p = Poly::one();
    for t in 0..n {
        let f = Poly::monomial(1, n).sub(&Poly::monomial(BigInt::from(1), t));
        p = p.mul(&f);
    }
    p
}
