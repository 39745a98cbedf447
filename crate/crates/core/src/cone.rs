//! Classification of maps out of `X_i^(k)` and `Z_i^(k)` up to mutual
//! factorization, and their cones.
//!
//! A map is described by a [`SupportPattern`]: which homogeneous components
//! are nonzero. Rescaling a component by a unit never changes the class, so
//! the pattern is all the classification needs.

use std::collections::BTreeMap;

use crate::category::{Arrow, Indec, Obj, Params};
use crate::error::Error;
use crate::scalar::Poly;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SupportPattern {
    pub source: Indec,
    pub slots: Vec<Indec>,
    /// `flags[n][d]`: the degree-`d` component into slot `n` is nonzero.
    pub flags: Vec<[bool; 3]>,
}

impl SupportPattern {
    pub fn zero(source: Indec, target: &Obj) -> Self {
        SupportPattern { source, slots: target.summands().to_vec(), flags: vec![[false; 3]; target.len()] }
    }

    /// All flags set wherever the Hom space is nonzero.
    pub fn full(p: &Params, source: Indec, target: &Obj) -> Self {
        let slots = target.summands().to_vec();
        let flags = slots.iter().map(|y| p.hom_dims(&source, y).map(|d| d == 1)).collect();
        SupportPattern { source, slots, flags }
    }

    pub fn target(&self) -> Obj {
        Obj::from_indecs(self.slots.clone())
    }

    fn residual_without(&self, used: &[usize]) -> Obj {
        Obj::from_indecs(self.slots.iter().enumerate().filter(|(n, _)| !used.contains(n)).map(|(_, y)| *y).collect())
    }
}

/// Class `[f]` of a map out of a generator, with the summands of the target
/// not used by its left-minimal representative.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum MapClass {
    Zero {
        source: Indec,
        target: Obj,
    },
    /// Represented by a single arrow out of `X_i^(k)`.
    X {
        arrow: Arrow,
        residual: Obj,
    },
    /// The map `Z_i^(k) -> ⊕_p X_{s_p,t_p}^(k+1) (⊕ Z_j^(k))` with
    /// `s` strictly decreasing and `t` strictly increasing.
    Z {
        source: Indec,
        s: Vec<i64>,
        t: Vec<i64>,
        j: Option<i64>,
        residual: Obj,
    },
}

impl MapClass {
    pub fn source(&self) -> Indec {
        match self {
            MapClass::Zero { source, .. } | MapClass::Z { source, .. } => *source,
            MapClass::X { arrow, .. } => arrow.src,
        }
    }

    pub fn residual(&self) -> &Obj {
        match self {
            MapClass::Zero { target, .. } => target,
            MapClass::X { residual, .. } | MapClass::Z { residual, .. } => residual,
        }
    }

    /// Arrow components of the left-minimal representative.
    pub fn components(&self, p: &Params) -> Vec<Arrow> {
        match self {
            MapClass::Zero { .. } => Vec::new(),
            MapClass::X { arrow, .. } => vec![*arrow],
            MapClass::Z { source, s, t, j, .. } => {
                let k1 = p.level_add(source.level(), 1);
                let mut out: Vec<Arrow> = s
                    .iter()
                    .zip(t)
                    .map(|(&a, &b)| p.arrow(source, &Indec::x(k1, a, b), 1).expect("β′ arrow"))
                    .collect();
                if let Some(j) = j {
                    out.push(p.arrow(source, &Indec::z(source.level(), *j), 0).expect("α′ arrow"));
                }
                out
            }
        }
    }
}

impl Params {
    /// `[c1] <= [c2]`: the representative of `c2` factors through that of `c1`.
    pub fn class_leq(&self, c1: &MapClass, c2: &MapClass) -> Result<bool, Error> {
        if c1.source() != c2.source() {
            return Err(Error::MixedSources);
        }
        let f1 = c1.components(self);
        let f2 = c2.components(self);
        if f1.is_empty() {
            return Ok(f2.is_empty());
        }
        Ok(f2.iter().all(|b| f1.iter().any(|a| self.factors_through(a, b))))
    }

    /// Whether `b = g ∘ a` for some map `g` between the targets.
    fn factors_through(&self, a: &Arrow, b: &Arrow) -> bool {
        b.degree() >= a.degree() && self.arrow(&a.tgt, &b.tgt, b.degree() - a.degree()).is_some()
    }

    pub fn classify(&self, pat: &SupportPattern) -> MapClass {
        match pat.source {
            Indec::X { .. } => self.classify_from_x(pat),
            Indec::Z { .. } => self.classify_from_z(pat),
        }
    }

    /// The least nonzero component class; ties keep the earliest slot.
    pub fn classify_from_x(&self, pat: &SupportPattern) -> MapClass {
        let src = pat.source;
        let mut best: Option<(usize, Arrow)> = None;
        for (n, y) in pat.slots.iter().enumerate() {
            let Some(d) = (0..3).find(|&d| pat.flags[n][d]) else { continue };
            let a = self.arrow(&src, y, d).expect("pattern flag without arrow");
            match best {
                Some((_, b)) if !self.factors_through(&a, &b) => {}
                Some((_, b)) if self.factors_through(&b, &a) => {}
                _ => best = Some((n, a)),
            }
        }
        match best {
            None => MapClass::Zero { source: src, target: pat.target() },
            Some((n, arrow)) => MapClass::X { arrow, residual: pat.residual_without(&[n]) },
        }
    }

    /// Removes dominated components until the canonical shape remains.
    pub fn classify_from_z(&self, pat: &SupportPattern) -> MapClass {
        let src = pat.source;
        let Indec::Z { k, .. } = src else { panic!("classify_from_z needs a Z source") };
        let e = self.shift(k);
        let mut zs: Vec<(i64, usize)> = Vec::new();
        let mut xs: Vec<(i64, i64, usize)> = Vec::new();
        for (n, y) in pat.slots.iter().enumerate() {
            match *y {
                Indec::Z { i, .. } if pat.flags[n][0] => zs.push((i, n)),
                Indec::X { i, j, .. } if pat.flags[n][1] => xs.push((i, j, n)),
                _ => {}
            }
        }
        let zmin = zs.iter().copied().min();
        // An X component is dropped when another one has both indices weakly
        // smaller (earlier slot wins among equals), or when the retained Z
        // component reaches it.
        let keep: Vec<(i64, i64, usize)> = xs
            .iter()
            .copied()
            .filter(|&(s, t, n)| {
                !xs.iter().any(|&(s2, t2, n2)| n2 != n && s2 <= s && t2 <= t && ((s2, t2) != (s, t) || n2 < n))
            })
            .filter(|&(_, t, _)| zmin.is_none_or(|(j, _)| t < j + e - 1))
            .collect();
        if keep.is_empty() && zmin.is_none() {
            return MapClass::Zero { source: src, target: pat.target() };
        }
        let mut keep = keep;
        keep.sort_by_key(|&(_, t, _)| t);
        let mut used: Vec<usize> = keep.iter().map(|&(_, _, n)| n).collect();
        if let Some((_, n)) = zmin {
            used.push(n);
        }
        MapClass::Z {
            source: src,
            s: keep.iter().map(|&(s, _, _)| s).collect(),
            t: keep.iter().map(|&(_, t, _)| t).collect(),
            j: zmin.map(|(j, _)| j),
            residual: pat.residual_without(&used),
        }
    }

    pub fn cone(&self, c: &MapClass) -> Obj {
        match c {
            MapClass::Zero { source, target } => target.plus_indec(self.suspend_indec(source, 1)),
            MapClass::X { arrow, residual } => {
                let Indec::X { k, i, .. } = arrow.src else { unreachable!() };
                let e = self.shift(k);
                let core = match arrow.tgt {
                    Indec::X { i: s, j: t, .. } if arrow.degree() == 0 => {
                        debug_assert_eq!(s, i);
                        Obj::x(k, i + 1, t)
                    }
                    Indec::Z { .. } => Obj::z(k, i + 1),
                    Indec::X { k: k1, i: s, .. } => Obj::x(k1, s, i + e),
                };
                core.plus(residual)
            }
            MapClass::Z { source, s, t, j, residual } => {
                let Indec::Z { k, i } = *source else { unreachable!() };
                let e = self.shift(k);
                let k1 = self.level_add(k, 1);
                let mut out = residual.clone();
                let mut prev = i + e;
                for (&sp, &tp) in s.iter().zip(t) {
                    out = out.plus(&Obj::x(k1, prev, tp));
                    prev = sp;
                }
                match j {
                    Some(j) => out.plus(&Obj::x(k1, prev, j + e - 1)),
                    None => out.plus_indec(Indec::z(k1, prev)),
                }
            }
        }
    }

    /// `N ↦ |Hom(G, T)_N|` as polynomials in `q`: every pattern contributes
    /// `(q-1)^{#nonzero components}` to the cone it produces.
    pub fn cone_tally(&self, source: &Indec, target: &Obj) -> BTreeMap<Obj, Poly> {
        let mut inert = Vec::new();
        let mut slots = Vec::new();
        for y in target.summands() {
            if self.hom_dim(source, y) == 0 {
                inert.push(*y);
            } else {
                slots.push(*y);
            }
        }
        let inert = Obj::from_indecs(inert);
        let live = Obj::from_indecs(slots);
        let mut positions = Vec::new();
        for (n, y) in live.summands().iter().enumerate() {
            for (d, &v) in self.hom_dims(source, y).iter().enumerate() {
                if v == 1 {
                    positions.push((n, d));
                }
            }
        }
        assert!(positions.len() < 24, "too many components to enumerate");
        let mut counts: BTreeMap<Obj, Vec<u64>> = BTreeMap::new();
        let mut pat = SupportPattern::zero(*source, &live);
        for mask in 0u32..(1 << positions.len()) {
            for (b, &(n, d)) in positions.iter().enumerate() {
                pat.flags[n][d] = mask & (1 << b) != 0;
            }
            let cone = self.cone(&self.classify(&pat)).plus(&inert);
            let v = counts.entry(cone).or_insert_with(|| vec![0; positions.len() + 1]);
            v[mask.count_ones() as usize] += 1;
        }
        counts
            .into_iter()
            .map(|(obj, v)| {
                let poly = v.iter().enumerate().fold(Poly::zero(), |acc, (n, &c)| {
                    if c == 0 {
                        acc
                    } else {
                        acc.add(&Poly::q_minus_one_pow(n).scale(&c.into()))
                    }
                });
                (obj, poly)
            })
            .collect()
    }
}
