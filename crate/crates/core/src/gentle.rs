//! Bound quivers given by paths of length two: parsing, the gentle axioms,
//! the one-cycle case and recognition of the quivers `Q(p,q)` with relations
//! `Λ(p,q,r)`.
//!
//! File format, one item per line, `#` starts a comment:
//!
//! ```text
//! vertex <name>
//! arrow <name>: <source> -> <target>
//! rel <a> <b>        # the path "a then b"; needs target(a) = source(b)
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use crate::error::ParseError;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArrowDecl {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BoundQuiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowDecl>,
    /// Pairs `(a, b)` of arrow indices: the path `a` then `b`.
    pub relations: BTreeSet<(usize, usize)>,
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '-' || c == '.')
}

/// Column (1-based, in characters) of `token` inside `line`.
fn col_of(line: &str, token: &str) -> usize {
    let off = token.as_ptr() as usize - line.as_ptr() as usize;
    line[..off].chars().count() + 1
}

impl BoundQuiver {
    pub fn parse(text: &str) -> Result<BoundQuiver, ParseError> {
        let mut bq = BoundQuiver::default();
        let mut vertex_ix: HashMap<String, usize> = HashMap::new();
        let mut arrow_ix: HashMap<String, usize> = HashMap::new();
        let mut pending_arrows = Vec::new();
        let mut pending_rels = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.split('#').next().unwrap();
            let toks: Vec<&str> = line.split_whitespace().collect();
            let Some(&head) = toks.first() else { continue };
            let err = |tok: &str, msg: &str| ParseError::new(msg, ln, col_of(raw, tok));
            match head {
                "vertex" => {
                    let [_, name] = toks[..] else {
                        return Err(err(head, "expected `vertex <name>`"));
                    };
                    if !is_name(name) {
                        return Err(err(name, "invalid vertex name"));
                    }
                    if vertex_ix.contains_key(name) {
                        return Err(err(name, "duplicate vertex"));
                    }
                    vertex_ix.insert(name.to_string(), bq.vertices.len());
                    bq.vertices.push(name.to_string());
                }
                "arrow" => {
                    let [_, name, src, "->", dst] = toks[..] else {
                        return Err(err(head, "expected `arrow <name>: <source> -> <target>`"));
                    };
                    let Some(name) = name.strip_suffix(':') else {
                        return Err(err(name, "expected ':' after arrow name"));
                    };
                    if !is_name(name) {
                        return Err(err(name, "invalid arrow name"));
                    }
                    if arrow_ix.contains_key(name) {
                        return Err(err(name, "duplicate arrow"));
                    }
                    arrow_ix.insert(name.to_string(), pending_arrows.len());
                    pending_arrows.push((name.to_string(), (src, col_of(raw, src)), (dst, col_of(raw, dst)), ln));
                }
                "rel" => {
                    let [_, a, b] = toks[..] else {
                        return Err(err(head, "expected `rel <arrow> <arrow>`"));
                    };
                    pending_rels.push(((a, col_of(raw, a)), (b, col_of(raw, b)), ln));
                }
                _ => return Err(err(head, "expected `vertex`, `arrow` or `rel`")),
            }
        }
        for (name, (src, sc), (dst, dc), ln) in pending_arrows {
            let look = |v: &str, c: usize| {
                vertex_ix.get(v).copied().ok_or_else(|| ParseError::new(format!("unknown vertex `{v}`"), ln, c))
            };
            let source = look(src, sc)?;
            let target = look(dst, dc)?;
            bq.arrows.push(ArrowDecl { name, source, target });
        }
        for ((a, ac), (b, bc), ln) in pending_rels {
            let look = |v: &str, c: usize| {
                arrow_ix.get(v).copied().ok_or_else(|| ParseError::new(format!("unknown arrow `{v}`"), ln, c))
            };
            let (ia, ib) = (look(a, ac)?, look(b, bc)?);
            if bq.arrows[ia].target != bq.arrows[ib].source {
                return Err(ParseError::new(format!("`{a}` then `{b}` is not a path"), ln, bc));
            }
            bq.relations.insert((ia, ib));
        }
        Ok(bq)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            writeln!(s, "vertex {v}").unwrap();
        }
        for a in &self.arrows {
            writeln!(s, "arrow {}: {} -> {}", a.name, self.vertices[a.source], self.vertices[a.target]).unwrap();
        }
        for &(a, b) in &self.relations {
            writeln!(s, "rel {} {}", self.arrows[a].name, self.arrows[b].name).unwrap();
        }
        s
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for a in &self.arrows {
            adj[a.source].push(a.target);
            adj[a.target].push(a.source);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Arrows of the unique cycle, in traversal order, each with `true`
    /// when traversed along its orientation; the starting point and sense are
    /// fixed by the smallest arrow index on the cycle.
    fn cycle(&self) -> Option<Vec<(usize, bool)>> {
        let n = self.vertices.len();
        let mut deg = vec![0usize; n];
        for a in &self.arrows {
            deg[a.source] += 1;
            deg[a.target] += 1;
        }
        let mut alive = vec![true; self.arrows.len()];
        let mut queue: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
        while let Some(v) = queue.pop() {
            for (ix, a) in self.arrows.iter().enumerate() {
                if alive[ix] && (a.source == v || a.target == v) {
                    alive[ix] = false;
                    for w in [a.source, a.target] {
                        deg[w] -= 1;
                        if deg[w] == 1 {
                            queue.push(w);
                        }
                    }
                }
            }
        }
        let on: Vec<usize> = (0..self.arrows.len()).filter(|&ix| alive[ix]).collect();
        let start = *on.first()?;
        let mut order = vec![(start, true)];
        let first = &self.arrows[start];
        let (origin, mut at) = (first.source, first.target);
        let mut used: BTreeSet<usize> = [start].into();
        while order.len() < on.len() {
            let (ix, fwd) = on.iter().find_map(|&ix| {
                let a = &self.arrows[ix];
                if used.contains(&ix) {
                    None
                } else if a.source == at {
                    Some((ix, true))
                } else if a.target == at {
                    Some((ix, false))
                } else {
                    None
                }
            })?;
            used.insert(ix);
            let a = &self.arrows[ix];
            at = if fwd { a.target } else { a.source };
            order.push((ix, fwd));
        }
        (at == origin).then_some(order)
    }
}

/// Result of checking the gentle and one-cycle conditions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GentleReport {
    /// At most two arrows start at each vertex.
    pub out_degree: bool,
    /// At most two arrows end at each vertex.
    pub in_degree: bool,
    /// At most one continuation (and one predecessor) outside the relations.
    pub unrelated_continuations: bool,
    /// At most one continuation (and one predecessor) inside the relations.
    pub related_continuations: bool,
    pub connected: bool,
    pub gentle: bool,
    pub one_cycle: bool,
    /// Relations on the cycle in each traversal sense, larger count first.
    pub cycle_relations: Option<(usize, usize)>,
    pub clock_condition: Option<bool>,
    pub canonical: Option<CanonicalParams>,
}

/// `(p, q, r)` of a quiver isomorphic to `Q(p,q)` with the relations of
/// `Λ(p,q,r)`, and the category parameters `(p, p+q)` when `r = p`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CanonicalParams {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub category: Option<(u32, i64)>,
}

pub fn check_gentle(bq: &BoundQuiver) -> GentleReport {
    let n = bq.vertices.len();
    let mut outs = vec![Vec::new(); n];
    let mut ins = vec![Vec::new(); n];
    for (ix, a) in bq.arrows.iter().enumerate() {
        outs[a.source].push(ix);
        ins[a.target].push(ix);
    }
    let out_degree = outs.iter().all(|v| v.len() <= 2);
    let in_degree = ins.iter().all(|v| v.len() <= 2);
    let count = |ix: usize, related: bool| -> bool {
        let a = &bq.arrows[ix];
        let after = outs[a.target].iter().filter(|&&b| bq.relations.contains(&(ix, b)) == related).count();
        let before = ins[a.source].iter().filter(|&&b| bq.relations.contains(&(b, ix)) == related).count();
        after <= 1 && before <= 1
    };
    let unrelated_continuations = (0..bq.arrows.len()).all(|ix| count(ix, false));
    let related_continuations = (0..bq.arrows.len()).all(|ix| count(ix, true));
    let connected = bq.is_connected();
    let gentle = out_degree && in_degree && unrelated_continuations && related_continuations && connected;
    let one_cycle = gentle && n == bq.arrows.len();
    let cycle = if one_cycle { bq.cycle() } else { None };
    let cycle_relations = cycle.as_ref().map(|c| relation_senses(bq, c));
    let clock_condition = cycle_relations.map(|(a, b)| a == b);
    let canonical = cycle.as_ref().and_then(|c| recognize(bq, c));
    GentleReport {
        out_degree,
        in_degree,
        unrelated_continuations,
        related_continuations,
        connected,
        gentle,
        one_cycle,
        cycle_relations,
        clock_condition,
        canonical,
    }
}

/// Relations formed by two consecutive cycle arrows, split by direction.
fn relation_senses(bq: &BoundQuiver, cycle: &[(usize, bool)]) -> (usize, usize) {
    let len = cycle.len();
    let (mut with, mut against) = (0, 0);
    for t in 0..len {
        let (a, fa) = cycle[t];
        let (b, fb) = cycle[(t + 1) % len];
        if fa && fb && bq.relations.contains(&(a, b)) {
            with += 1;
        }
        if !fa && !fb && bq.relations.contains(&(b, a)) {
            against += 1;
        }
    }
    (with.max(against), with.min(against))
}

fn recognize(bq: &BoundQuiver, cycle: &[(usize, bool)]) -> Option<CanonicalParams> {
    let p = cycle.len();
    // The traversal starts along an arrow, so an oriented cycle is all forward.
    if !cycle.iter().all(|&(_, f)| f) {
        return None;
    }
    let arrows: Vec<usize> = cycle.iter().map(|&(a, _)| a).collect();
    let verts: Vec<usize> = arrows.iter().map(|&a| bq.arrows[a].source).collect();
    let on_cycle: BTreeSet<usize> = arrows.iter().copied().collect();
    let arm: Vec<usize> = (0..bq.arrows.len()).filter(|ix| !on_cycle.contains(ix)).collect();
    let q = arm.len();
    // The arm is a directed path ending at one cycle vertex.
    let mut root = None;
    if q > 0 {
        let cycle_verts: BTreeSet<usize> = verts.iter().copied().collect();
        let mut at_cycle = arm.iter().filter(|&&a| cycle_verts.contains(&bq.arrows[a].target));
        let last = *at_cycle.next()?;
        if at_cycle.next().is_some() {
            return None;
        }
        let mut cur = last;
        for _ in 1..q {
            let s = bq.arrows[cur].source;
            let mut prev = arm.iter().filter(|&&a| bq.arrows[a].target == s);
            cur = *prev.next()?;
            if prev.next().is_some() {
                return None;
            }
        }
        root = verts.iter().position(|&v| v == bq.arrows[last].target);
        root?;
    }
    // Relations must be consecutive cycle arrows; record the middle vertex.
    let mut middles = BTreeSet::new();
    for &(a, b) in &bq.relations {
        let t = arrows.iter().position(|&x| x == a)?;
        if arrows[(t + 1) % p] != b {
            return None;
        }
        middles.insert((t + 1) % p);
    }
    let r = middles.len();
    if r == 0 {
        return None;
    }
    let block = |v0: usize| (0..r).all(|s| middles.contains(&((v0 + p - s) % p)));
    let ok = match root {
        Some(v0) => block(v0),
        None => (0..p).any(block),
    };
    if !ok {
        return None;
    }
    let category = (r == p).then_some((p as u32, (p + q) as i64));
    Some(CanonicalParams { p, q, r, category })
}

pub fn canonical_params(bq: &BoundQuiver) -> Option<CanonicalParams> {
    check_gentle(bq).canonical
}

/// The `.bq` text of `Q(p,q)` with the relations of `Λ(p,q,r)`: vertices
/// `v-q, ..., v0, ..., v(p-1)`, arm arrows `a-q, ..., a-1` and cycle arrows
/// `a0, ..., a(p-1)` with `a(i): v(i) -> v(i+1 mod p)`.
pub fn lambda_quiver(p: usize, q: usize, r: usize) -> String {
    assert!(p >= 1 && (1..=p).contains(&r), "need p >= 1 and 1 <= r <= p");
    let (p, q, r) = (p as i64, q as i64, r as i64);
    let mut s = String::new();
    writeln!(s, "# Q({p},{q}) bound by {r} relations").unwrap();
    for v in -q..p {
        writeln!(s, "vertex v{v}").unwrap();
    }
    for i in -q..0 {
        writeln!(s, "arrow a{i}: v{i} -> v{}", i + 1).unwrap();
    }
    for i in 0..p {
        writeln!(s, "arrow a{i}: v{i} -> v{}", (i + 1) % p).unwrap();
    }
    for s_ in 0..r {
        let second = (p - s_) % p;
        let first = (p - s_ - 1).rem_euclid(p);
        writeln!(s, "rel a{first} a{second}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_with_square_relation() {
        let bq = BoundQuiver::parse("vertex v\narrow a: v -> v\nrel a a\n").unwrap();
        assert_eq!((bq.vertices.len(), bq.arrows.len(), bq.relations.len()), (1, 1, 1));
        let rep = check_gentle(&bq);
        assert!(rep.gentle && rep.one_cycle);
        assert_eq!(rep.cycle_relations, Some((1, 0)));
        assert_eq!(rep.clock_condition, Some(false));
        let c = rep.canonical.unwrap();
        assert_eq!((c.p, c.q, c.r, c.category), (1, 0, 1, Some((1, 1))));
    }

    #[test]
    fn kronecker() {
        let bq = BoundQuiver::parse("vertex 1\nvertex 2\narrow a: 1 -> 2\narrow b: 1 -> 2\n").unwrap();
        let rep = check_gentle(&bq);
        assert!(rep.gentle && rep.one_cycle);
        assert_eq!(rep.cycle_relations, Some((0, 0)));
        assert_eq!(rep.clock_condition, Some(true));
        assert_eq!(rep.canonical, None);
    }

    #[test]
    fn two_cycle_with_both_relations() {
        let text = "vertex 0\nvertex 1\narrow a0: 0 -> 1\narrow a1: 1 -> 0\nrel a0 a1\nrel a1 a0\n";
        let bq = BoundQuiver::parse(text).unwrap();
        assert_eq!(bq.relations.len(), 2);
        let c = canonical_params(&bq).unwrap();
        assert_eq!((c.p, c.q, c.r), (2, 0, 2));
    }

    #[test]
    fn three_outgoing_arrows() {
        let text = "vertex c\nvertex a\nvertex b\nvertex d\narrow x: c -> a\narrow y: c -> b\narrow z: c -> d\n";
        let rep = check_gentle(&BoundQuiver::parse(text).unwrap());
        assert!(!rep.out_degree && !rep.gentle);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = BoundQuiver::parse("vertex v\narrow a: v -> v\nrel a b\n").unwrap_err();
        assert_eq!((e.line, e.col), (3, 7));
        let e = BoundQuiver::parse("vertex v\narrow a: v -> w\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 15));
        let e = BoundQuiver::parse("vertex u\nvertex v\narrow a: u -> v\nrel a a\n").unwrap_err();
        assert_eq!(e.line, 4);
        let e = BoundQuiver::parse("  edge u v\n").unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
    }

    #[test]
    fn lambda_family() {
        for p in 1..=4 {
            for q in 0..=3 {
                for r in 1..=p {
                    let bq = BoundQuiver::parse(&lambda_quiver(p, q, r)).unwrap();
                    let rep = check_gentle(&bq);
                    assert!(rep.gentle && rep.one_cycle, "Λ({p},{q},{r})");
                    let c = rep.canonical.unwrap();
                    assert_eq!((c.p, c.q, c.r), (p, q, r));
                    assert_eq!(c.category.is_some(), r == p);
                }
            }
        }
    }
}
