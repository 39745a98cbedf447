//! Property tests for the product, the presentation and the quiver front end.

mod common;

use std::cmp::Ordering;

use derived_hall::gentle::{check_gentle, lambda_quiver, BoundQuiver};
use derived_hall::presented::{is_normal, parse_normal, word_cmp, word_less, NormalFormEngine, NormalWord, OrderMode};
use derived_hall::{Error, FreeElement, Generator, HallAlgebra, HallElement, Indec, Obj, Params, QScalar};
use proptest::prelude::*;

use common::PARAMS;

fn params() -> impl Strategy<Value = Params> {
    (0..PARAMS.len()).prop_map(|n| Params::new(PARAMS[n].0, PARAMS[n].1).unwrap())
}

fn indec(p: Params, max_ql: i64) -> impl Strategy<Value = Indec> {
    let r = p.r;
    (1..=r, -2i64..=2, 0..max_ql, any::<bool>()).prop_map(move |(k, i, w, z)| {
        if z {
            Indec::z(k, i.signum() * i.abs().min(max_ql - 1))
        } else {
            Indec::x(k, i, i + w)
        }
    })
}

fn object(p: Params, max_ql: i64) -> impl Strategy<Value = Obj> {
    prop::collection::vec(indec(p, max_ql), 0..=2).prop_filter_map("too long", move |v| {
        let o = Obj::from_indecs(v);
        (p.ql(&o) <= max_ql).then_some(o)
    })
}

fn letter(p: Params) -> impl Strategy<Value = Generator> {
    let r = p.r;
    (1..=r, -2i64..=2, 0..4u8).prop_map(|(k, i, c)| if c == 0 { Generator::Z { k } } else { Generator::X { k, i } })
}

fn word(p: Params, max_len: usize) -> impl Strategy<Value = Vec<Generator>> {
    prop::collection::vec(letter(p), 0..=max_len)
}

fn with_objects(n: usize, max_ql: i64) -> impl Strategy<Value = (Params, Vec<Obj>)> {
    params().prop_flat_map(move |p| (Just(p), prop::collection::vec(object(p, max_ql), n)))
}

fn with_word(max_len: usize) -> impl Strategy<Value = (Params, Vec<Generator>)> {
    params().prop_flat_map(move |p| (Just(p), word(p, max_len)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unit_is_two_sided((p, objs) in with_objects(1, 4)) {
        let h = HallAlgebra::new(p);
        let m = &objs[0];
        prop_assert_eq!(h.mul_basis(&Obj::zero(), m), HallElement::basis(m.clone()));
        prop_assert_eq!(h.mul_basis(m, &Obj::zero()), HallElement::basis(m.clone()));
    }

    #[test]
    fn product_is_associative((p, objs) in with_objects(3, 2)) {
        let h = HallAlgebra::new(p);
        let (a, b, c) = (&objs[0], &objs[1], &objs[2]);
        let left = h.mul(&h.mul_basis(a, b), &HallElement::basis(c.clone()));
        let right = h.mul(&HallElement::basis(a.clone()), &h.mul_basis(b, c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn product_terms_are_subadditive((p, objs) in with_objects(2, 3)) {
        let h = HallAlgebra::new(p);
        let sum = p.bdim(&objs[0]).add(&p.bdim(&objs[1]));
        for (l, _) in h.mul_basis(&objs[0], &objs[1]).iter() {
            prop_assert!(p.bdim(l).le(&sum), "{} in product of {} and {}", l, objs[0], objs[1]);
        }
    }

    /// Counting maps by cone accounts for every map.
    #[test]
    fn cone_counts_sum_to_hom_card((p, objs) in with_objects(1, 3), k in 1u32..=3, i in -2i64..=2, z in any::<bool>()) {
        let k = 1 + (k - 1) % p.r;
        let g = if z { Indec::z(k, i) } else { Indec::x(k, i, i) };
        let h = HallAlgebra::new(p);
        let counts = h.count_cones_from(&g, &objs[0]);
        let mut total = QScalar::zero();
        for c in counts.values() {
            total += c;
        }
        prop_assert_eq!(total, p.hom_card(&Obj::indec(g), &objs[0]));
    }

    #[test]
    fn expansion_evaluates_to_the_object((p, objs) in with_objects(1, 4)) {
        let h = HallAlgebra::new(p);
        prop_assert_eq!(h.eval(&h.expand(&objs[0])), HallElement::basis(objs[0].clone()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn normal_form_preserves_value((p, w) in with_word(5)) {
        let h = HallAlgebra::new(p);
        let nf = NormalFormEngine::new(&h);
        let f = nf.normal_form_word(&w).unwrap();
        prop_assert!(f.words().all(|u| is_normal(&p, u)));
        prop_assert_eq!(h.eval(&f), (*h.eval_word(&w)).clone());
    }

    #[test]
    fn normal_form_is_a_projection((p, a) in with_word(4), b in prop::collection::vec(any::<u8>(), 0..3)) {
        let h = HallAlgebra::new(p);
        let nf = NormalFormEngine::new(&h);
        let mut f = FreeElement::word(a.clone());
        // A second word with the same letters, shuffled by `b`.
        let mut a2 = a.clone();
        for (n, s) in b.iter().enumerate() {
            if !a2.is_empty() {
                let len = a2.len();
                a2.swap(n % len, *s as usize % len);
            }
        }
        f.add_term(a2, &QScalar::q());
        let once = nf.normal_form(&f).unwrap();
        prop_assert_eq!(nf.normal_form(&once).unwrap(), once);
    }
}

fn shuffled_pair() -> impl Strategy<Value = (Vec<Generator>, Vec<Generator>, Vec<Generator>)> {
    params().prop_flat_map(|p| {
        word(p, 5).prop_flat_map(|w| {
            let a = Just(w.clone()).prop_shuffle();
            let b = Just(w.clone()).prop_shuffle();
            let c = Just(w).prop_shuffle();
            (a, b, c)
        })
    })
}

type Word4 = (Vec<Generator>, Vec<Generator>, Vec<Generator>, Vec<Generator>);

/// Two rearrangements of one word, and a prefix and suffix.
fn wrapped_pair() -> impl Strategy<Value = Word4> {
    params()
        .prop_flat_map(|p| (word(p, 5), word(p, 2), word(p, 2)))
        .prop_flat_map(|(w, u, v)| (Just(w.clone()).prop_shuffle(), Just(w).prop_shuffle(), Just(u), Just(v)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn word_order_is_a_strict_total_order((a, b, c) in shuffled_pair()) {
        let m = OrderMode::Full;
        let ab = word_cmp(&a, &b, m).unwrap();
        prop_assert_eq!(ab, word_cmp(&b, &a, m).unwrap().reverse());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        if word_less(&a, &b, m).unwrap() && word_less(&b, &c, m).unwrap() {
            prop_assert!(word_less(&a, &c, m).unwrap());
        }
    }

    #[test]
    fn word_order_is_multiplicative((a, b, u, v) in wrapped_pair()) {
        let wrap = |w: &[Generator]| [u.as_slice(), w, v.as_slice()].concat();
        let m = OrderMode::Full;
        prop_assert_eq!(word_cmp(&a, &b, m).unwrap(), word_cmp(&wrap(&a), &wrap(&b), m).unwrap());
    }

    #[test]
    fn x_only_order_rejects_z_and_unequal_degrees((p, w) in with_word(4)) {
        let _ = p;
        let has_z = w.iter().any(Generator::is_z);
        match word_cmp(&w, &w, OrderMode::XOnly) {
            Err(Error::InvalidWord(_)) => prop_assert!(has_z),
            Ok(o) => prop_assert!(!has_z && o == Ordering::Equal),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
        let mut longer = w.clone();
        longer.push(Generator::X { k: 1, i: 0 });
        prop_assert_eq!(word_cmp(&w, &longer, OrderMode::Full), Err(Error::UnequalDegree));
    }

    #[test]
    fn normal_words_round_trip((p, w) in with_word(6)) {
        if let Some(nw) = parse_normal(&p, &w) {
            prop_assert_eq!(nw.word(&p), w.clone());
            let again: NormalWord = parse_normal(&p, &nw.word(&p)).unwrap();
            prop_assert_eq!(again.object(), nw.object());
        }
    }
}

/// Renames vertices and arrows and reverses the declaration order.
fn relabel(bq: &BoundQuiver, salt: u32) -> BoundQuiver {
    let mut text = String::new();
    let v = |n: usize| format!("w{}_{salt}", bq.vertices.len() - n);
    let a = |n: usize| format!("b{}_{salt}", (n * 7 + salt as usize) % 1000 + 1000 * n);
    for n in (0..bq.vertices.len()).rev() {
        text.push_str(&format!("vertex {}\n", v(n)));
    }
    for (n, arr) in bq.arrows.iter().enumerate().rev() {
        text.push_str(&format!("arrow {}: {} -> {}\n", a(n), v(arr.source), v(arr.target)));
    }
    for &(x, y) in bq.relations.iter().rev() {
        text.push_str(&format!("rel {} {}\n", a(x), a(y)));
    }
    BoundQuiver::parse(&text).unwrap()
}

proptest! {
    #[test]
    fn gentle_reports_ignore_names(p in 1usize..=4, q in 0usize..=3, r in 1usize..=4, salt in 0u32..50) {
        let r = 1 + (r - 1) % p;
        let bq = BoundQuiver::parse(&lambda_quiver(p, q, r)).unwrap();
        let rep = check_gentle(&bq);
        prop_assert_eq!(check_gentle(&relabel(&bq, salt)), rep.clone());
        let c = rep.canonical.unwrap();
        prop_assert_eq!((c.p, c.q, c.r), (p, q, r));
        prop_assert_eq!(rep.clock_condition, Some(false));
    }

    #[test]
    fn quiver_text_round_trips(p in 1usize..=4, q in 0usize..=3) {
        let bq = BoundQuiver::parse(&lambda_quiver(p, q, p)).unwrap();
        prop_assert_eq!(BoundQuiver::parse(&bq.to_text()).unwrap(), bq);
    }
}
