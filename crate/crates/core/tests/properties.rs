use opcat::code::ObjCode;
use opcat::leinster::Leinster;
use opcat::sequences::{all_sequences, recheck, segal_inclusion, segal_restrict};
use opcat::Category;
use proptest::prelude::*;
use proptest::sample::Index;

fn category() -> impl Strategy<Value = Category> {
    let leaf = prop_oneof![Just(Category::Triv), Just(Category::Ord), Just(Category::Fin), Just(Category::Cyc)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), 0usize..6).prop_map(|(c, n)| Category::trunc(c, n)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Category::wreath(a, b)),
            inner.prop_map(Category::semidir),
        ]
    })
}

fn small() -> impl Strategy<Value = Category> {
    prop_oneof![
        Just(Category::Ord),
        Just(Category::Fin),
        Just(Category::Cyc),
        Just(Category::wreath(Category::Ord, Category::Fin)),
    ]
}

fn pick<T: Clone>(xs: &[T], i: Index) -> T {
    xs[i.index(xs.len())].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn selector_round_trip(c in category()) {
        let parsed: Category = c.to_string().parse().unwrap();
        prop_assert_eq!(parsed, c);
    }

    #[test]
    fn composition_is_associative_and_unital(c in small(), ix in proptest::array::uniform4(any::<Index>()), mx in proptest::array::uniform3(any::<Index>())) {
        let objs = c.objects(2);
        let [a, b, d, e] = ix.map(|i| pick(&objs, i));
        let (ab, bd, de) = (c.hom(&a, &b), c.hom(&b, &d), c.hom(&d, &e));
        prop_assume!(!ab.is_empty() && !bd.is_empty() && !de.is_empty());
        let (f, g, h) = (pick(&ab, mx[0]), pick(&bd, mx[1]), pick(&de, mx[2]));
        let left = c.compose(&h, &c.compose(&g, &f).unwrap()).unwrap();
        let right = c.compose(&c.compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(c.compose(&f, &c.identity(&a)).unwrap(), f.clone());
        prop_assert_eq!(c.compose(&c.identity(&b), &f).unwrap(), f);
    }

    #[test]
    fn kleisli_composition_is_associative(fin in any::<bool>(), ix in proptest::array::uniform4(any::<Index>()), mx in proptest::array::uniform3(any::<Index>())) {
        let l = Leinster::new(if fin { Category::Fin } else { Category::Ord }).unwrap();
        let objs = l.category().objects(2);
        let [a, b, d, e] = ix.map(|i| pick(&objs, i));
        let (ab, bd, de) = (l.khom(&a, &b), l.khom(&b, &d), l.khom(&d, &e));
        prop_assume!(!ab.is_empty() && !bd.is_empty() && !de.is_empty());
        let (f, g, h) = (pick(&ab, mx[0]), pick(&bd, mx[1]), pick(&de, mx[2]));
        let left = l.kcompose(&h, &l.kcompose(&g, &f).unwrap()).unwrap();
        let right = l.kcompose(&l.kcompose(&h, &g).unwrap(), &f).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(l.kcompose(&f, &l.kid(&a).unwrap()).unwrap(), f.clone());
        prop_assert_eq!(l.kcompose(&l.kid(&b).unwrap(), &f).unwrap(), f);
    }

    #[test]
    fn factorization_recomposes(fin in any::<bool>(), n in 0usize..5, m in 0usize..4, k in any::<Index>()) {
        let (c, src, tgt) = if fin {
            (Category::Fin, ObjCode::Fin(n), ObjCode::Fin(m))
        } else {
            (Category::Ord, ObjCode::Ord(n), ObjCode::Ord(m))
        };
        let l = Leinster::new(c).unwrap();
        let hom = l.khom(&src, &tgt);
        prop_assume!(!hom.is_empty());
        let phi = pick(&hom, k);
        let fact = l.factorize(&phi).unwrap();
        prop_assert!(l.is_inert(&fact.inert));
        prop_assert!(l.is_active(&fact.active));
        prop_assert_eq!(l.kcompose(&fact.active, &fact.inert).unwrap(), phi);
    }

    #[test]
    fn segal_fibers_partition_each_stage(k in any::<Index>(), len in 0usize..3) {
        let c = Category::Fin;
        let seqs = all_sequences(&c, &c.objects(2), len);
        let s = pick(&seqs, k);
        let pts = c.points(s.last());
        for stage in 0..=len {
            let total: usize = pts
                .iter()
                .map(|i| c.point_count(&segal_restrict(&c, &s, i).unwrap().objects[stage]))
                .sum();
            prop_assert_eq!(total, c.point_count(&s.objects[stage]));
        }
        for i in &pts {
            recheck(&c, &segal_inclusion(&c, &s, i).unwrap()).unwrap();
        }
    }
}
