//! Cones of explicit maps over a prime field, computed without the cone
//! classification.
//!
//! For a map `f: G -> T` with cone `C`, the long exact Hom sequence gives
//! `dim Hom(X, C) = dim coker(f_*: Hom(X,G) -> Hom(X,T)) + dim ker(f_*: Hom(Σ^{-1}X, G) -> Hom(Σ^{-1}X, T))`.
//! Over a window of candidate summands whose Hom-dimension columns are
//! linearly independent, this vector pins down `C`.

use std::collections::{BTreeMap, HashMap};

use derived_hall::{Arrow, Indec, Obj, Params};

const BIG: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % BIG as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(v: i64) -> u64 {
    v.rem_euclid(BIG as i64) as u64
}

fn from_mod(v: u64) -> i64 {
    if v > BIG / 2 {
        -((BIG - v) as i64)
    } else {
        v as i64
    }
}

/// Rank of a small matrix over `F_p`.
pub fn rank_mod(mut a: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] % p != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = (1..p).find(|&x| a[rank][c] * x % p == 1).unwrap();
        for v in a[rank].iter_mut() {
            *v = *v * inv % p;
        }
        for r in 0..rows {
            if r != rank && a[r][c] % p != 0 {
                let f = a[r][c];
                for cc in 0..cols {
                    a[r][cc] = (a[r][cc] + p * p - f * a[rank][cc] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Window of candidate cone summands plus the probes used to detect them.
pub struct ConeSolver {
    pub params: Params,
    probes: Vec<Indec>,
    basis: Vec<Indec>,
    /// `hom[x][y] = dim Hom(probes[x], basis[y])`.
    hom: Vec<Vec<i64>>,
    pivot_rows: Vec<usize>,
    inverse: Vec<Vec<u64>>,
}

fn indecs_in(p: &Params, lo: i64, hi: i64) -> Vec<Indec> {
    let mut out = Vec::new();
    for k in p.levels() {
        for i in lo..=hi {
            out.push(Indec::z(k, i));
            for j in i..=hi {
                out.push(Indec::x(k, i, j));
            }
        }
    }
    out
}

impl ConeSolver {
    /// Candidates have all indices in `[-w, w]`; probes reach `2w`.
    pub fn new(params: Params, w: i64) -> Self {
        let basis = indecs_in(&params, -w, w);
        let probes = indecs_in(&params, -2 * w, 2 * w);
        let hom: Vec<Vec<i64>> =
            probes.iter().map(|x| basis.iter().map(|y| params.hom_dim(x, y) as i64).collect()).collect();
        // Pick independent rows by elimination mod a large prime, then invert
        // the selected square block.
        let n = basis.len();
        let mut work: Vec<Vec<u64>> = hom.iter().map(|r| r.iter().map(|&v| to_mod(v)).collect()).collect();
        let mut pivot_rows = Vec::new();
        let mut used = vec![false; probes.len()];
        let mut reduced: Vec<(usize, usize)> = Vec::new();
        for c in 0..n {
            let Some(r) = (0..probes.len()).find(|&r| !used[r] && work[r][c] != 0) else {
                panic!("Hom dimensions do not separate {}", basis[c]);
            };
            used[r] = true;
            pivot_rows.push(r);
            let inv = powmod(work[r][c], BIG - 2);
            let pivot: Vec<u64> = work[r].iter().map(|&v| mulmod(v, inv)).collect();
            for (rr, row) in work.iter_mut().enumerate() {
                if rr != r && row[c] != 0 {
                    let f = row[c];
                    for cc in 0..n {
                        row[cc] = (row[cc] + BIG - mulmod(f, pivot[cc])) % BIG;
                    }
                }
            }
            work[r] = pivot;
            reduced.push((r, c));
        }
        let a: Vec<Vec<u64>> = pivot_rows.iter().map(|&r| hom[r].iter().map(|&v| to_mod(v)).collect()).collect();
        let inverse = invert(a);
        ConeSolver { params, probes, basis, hom, pivot_rows, inverse }
    }

    /// The unique object in the window with the given Hom-dimension vector.
    pub fn solve(&self, h: &[i64]) -> Option<Obj> {
        let rhs: Vec<u64> = self.pivot_rows.iter().map(|&r| to_mod(h[r])).collect();
        let mut mult = Vec::with_capacity(self.basis.len());
        for row in &self.inverse {
            let mut acc = 0u64;
            for (a, b) in row.iter().zip(&rhs) {
                acc = (acc + mulmod(*a, *b)) % BIG;
            }
            let v = from_mod(acc);
            if !(0..=64).contains(&v) {
                return None;
            }
            mult.push(v);
        }
        for (x, row) in self.hom.iter().enumerate() {
            let s: i64 = row.iter().zip(&mult).map(|(a, b)| a * b).sum();
            if s != h[x] {
                return None;
            }
        }
        let mut v = Vec::new();
        for (y, &n) in self.basis.iter().zip(&mult) {
            for _ in 0..n {
                v.push(*y);
            }
        }
        Some(Obj::from_indecs(v))
    }

    fn hom_vector(&self, t: &Obj) -> Vec<i64> {
        let p = &self.params;
        self.probes.iter().map(|x| t.summands().iter().map(|y| p.hom_dim(x, y) as i64).sum()).collect()
    }
}

fn invert(mut a: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut inv: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| a[r][c] != 0).expect("singular block");
        a.swap(c, piv);
        inv.swap(c, piv);
        let f = powmod(a[c][c], BIG - 2);
        for v in a[c].iter_mut() {
            *v = mulmod(*v, f);
        }
        for v in inv[c].iter_mut() {
            *v = mulmod(*v, f);
        }
        for r in 0..n {
            if r != c && a[r][c] != 0 {
                let g = a[r][c];
                for cc in 0..n {
                    a[r][cc] = (a[r][cc] + BIG - mulmod(g, a[c][cc])) % BIG;
                    inv[r][cc] = (inv[r][cc] + BIG - mulmod(g, inv[c][cc])) % BIG;
                }
            }
        }
    }
    inv
}

/// One explicit map `G -> T`: a coefficient in `F_p` per basis arrow.
pub struct ExplicitMap {
    pub components: Vec<(usize, Arrow, u64)>,
}

impl ExplicitMap {
    pub fn flags(&self, slots: usize) -> Vec<[bool; 3]> {
        let mut f = vec![[false; 3]; slots];
        for &(n, a, c) in &self.components {
            if c != 0 {
                f[n][a.degree()] = true;
            }
        }
        f
    }
}

/// All maps `G -> T` over `F_p`.
pub fn all_maps(p: &Params, g: &Indec, t: &Obj, prime: u64) -> Vec<ExplicitMap> {
    let mut basis = Vec::new();
    for (n, y) in t.summands().iter().enumerate() {
        for a in p.arrows(g, y) {
            basis.push((n, a));
        }
    }
    let total = prime.pow(basis.len() as u32);
    (0..total)
        .map(|mut code| {
            let components = basis
                .iter()
                .map(|&(n, a)| {
                    let c = code % prime;
                    code /= prime;
                    (n, a, c)
                })
                .collect();
            ExplicitMap { components }
        })
        .collect()
}

/// Rank of `u ↦ f ∘ u` on `Hom(X, G)`.
fn post_rank(p: &Params, x: &Indec, g: &Indec, t: &Obj, f: &ExplicitMap, prime: u64) -> usize {
    let us = p.arrows(x, g);
    if us.is_empty() {
        return 0;
    }
    let mut rows: HashMap<(usize, usize), usize> = HashMap::new();
    for (n, y) in t.summands().iter().enumerate() {
        for a in p.arrows(x, y) {
            let len = rows.len();
            rows.insert((n, a.degree()), len);
        }
    }
    let mut m = vec![vec![0u64; us.len()]; rows.len()];
    for (col, u) in us.iter().enumerate() {
        for &(n, a, c) in &f.components {
            if c == 0 {
                continue;
            }
            if let Some(v) = p.compose(u, &a).unwrap() {
                let row = rows[&(n, v.degree())];
                m[row][col] = (m[row][col] + c) % prime;
            }
        }
    }
    rank_mod(m, prime)
}

impl ConeSolver {
    /// Cone of an explicit map, or `None` if it leaves the window.
    pub fn cone(&self, g: &Indec, t: &Obj, f: &ExplicitMap, prime: u64, base: &[i64]) -> Option<Obj> {
        let p = &self.params;
        let mut h = base.to_vec();
        for (xi, x) in self.probes.iter().enumerate() {
            let d1 = p.hom_dim(x, g) as i64;
            let xm = p.suspend_indec(x, -1);
            let d2 = p.hom_dim(&xm, g) as i64;
            if d1 == 0 && d2 == 0 {
                continue;
            }
            let r1 = if d1 > 0 { post_rank(p, x, g, t, f, prime) as i64 } else { 0 };
            let r2 = if d2 > 0 { post_rank(p, &xm, g, t, f, prime) as i64 } else { 0 };
            h[xi] += -r1 + d2 - r2;
        }
        self.solve(&h)
    }

    /// `N ↦ #{f : cone f ≅ N}` by enumeration, together with each map's cone.
    pub fn tally(&self, g: &Indec, t: &Obj, prime: u64) -> Option<(BTreeMap<Obj, u64>, Vec<(ExplicitMap, Obj)>)> {
        let base = self.hom_vector(t);
        let mut tally = BTreeMap::new();
        let mut cones = Vec::new();
        for f in all_maps(&self.params, g, t, prime) {
            let c = self.cone(g, t, &f, prime, &base)?;
            *tally.entry(c.clone()).or_insert(0) += 1;
            cones.push((f, c));
        }
        Some((tally, cones))
    }
}
