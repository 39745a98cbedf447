#![allow(dead_code)]

pub mod field;

use derived_hall::{Indec, Obj, Params};

/// Indecomposables with all indices in `[lo, hi]` and `ql <= max_ql`.
pub fn small_indecs(p: &Params, lo: i64, hi: i64, max_ql: i64) -> Vec<Indec> {
    let mut out = Vec::new();
    for k in p.levels() {
        for i in lo..=hi {
            if 1 + i.abs() <= max_ql {
                out.push(Indec::z(k, i));
            }
            for j in i..=hi {
                if j - i < max_ql {
                    out.push(Indec::x(k, i, j));
                }
            }
        }
    }
    out
}

/// All objects (multisets of the given indecomposables) with `ql <= max_ql`.
pub fn small_objects(p: &Params, indecs: &[Indec], max_ql: i64) -> Vec<Obj> {
    let weights: Vec<i64> = indecs.iter().map(|a| p.ql(&Obj::indec(*a))).collect();
    let mut out = Vec::new();
    fn rec(start: usize, budget: i64, cur: &mut Vec<Indec>, indecs: &[Indec], weights: &[i64], out: &mut Vec<Obj>) {
        out.push(Obj::from_indecs(cur.clone()));
        for n in start..indecs.len() {
            if weights[n] <= budget {
                cur.push(indecs[n]);
                rec(n, budget - weights[n], cur, indecs, weights, out);
                cur.pop();
            }
        }
    }
    rec(0, max_ql, &mut Vec::new(), indecs, &weights, &mut out);
    out
}

pub const PARAMS: [(u32, i64); 6] = [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2)];
