use dinat::cli::document;
use dinat::dinat::{make_atomic, vcompose, Transformation};
use dinat::finset_oracle::*;
use dinat::petri::{fire_labelled, is_enabled, Label, LabelledMarking};
use dinat::signature::{CospanType, Signature, Variance};
use proptest::prelude::*;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn load(name: &str) -> document::Loaded {
    document::read(&std::path::Path::new(FIXTURES).join(name)).unwrap()
}

/// Expression trees with placeholder slots; slots get numbered in order of
/// occurrence and take the variance of where they sit.
fn shape() -> impl Strategy<Value = FunctorExpr> {
    let leaf = prop_oneof![
        3 => Just(FunctorExpr::arg(0, Variance::Co)),
        1 => (0usize..=2).prop_map(FunctorExpr::Const),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..=2).prop_map(FunctorExpr::Prod),
            (inner.clone(), inner).prop_map(|(a, b)| FunctorExpr::hom(a, b)),
        ]
    })
}

fn number(e: &FunctorExpr, polarity: Variance, next: &mut usize) -> FunctorExpr {
    match e {
        FunctorExpr::Arg { .. } => {
            *next += 1;
            FunctorExpr::arg(*next, polarity)
        }
        FunctorExpr::Const(k) => FunctorExpr::Const(*k),
        FunctorExpr::Prod(es) => FunctorExpr::Prod(es.iter().map(|x| number(x, polarity, next)).collect()),
        FunctorExpr::Hom(a, b) => {
            let a = number(a, polarity.flip(), next);
            FunctorExpr::hom(a, number(b, polarity, next))
        }
    }
}

fn expr() -> impl Strategy<Value = FunctorExpr> {
    shape().prop_map(|s| number(&s, Variance::Co, &mut 0))
}

/// A map `a → b` picked by `seed`, if one exists.
fn map_from(seed: u64, a: usize, b: usize) -> Option<FinSetMap> {
    if a > 0 && b == 0 {
        return None;
    }
    let mut x = seed;
    let table = (0..a)
        .map(|_| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 33) as usize % b
        })
        .collect();
    Some(FinSetMap::new(a, b, table).unwrap())
}

const SMALL: usize = 4096;

fn fits(e: &FunctorExpr, sizes: &[usize]) -> bool {
    matches!(eval_functor(e, sizes), Ok(k) if k <= SMALL)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn functors_preserve_identities(e in expr(), sizes in prop::collection::vec(0usize..=3, 8)) {
        let k = e.arity();
        let sizes = &sizes[..k.min(8)];
        prop_assume!(k <= 8 && fits(&e, sizes));
        let ids: Vec<FinSetMap> = sizes.iter().map(|&n| FinSetMap::identity(n)).collect();
        let m = functor_map(&e, &ids).unwrap();
        prop_assert_eq!(m, FinSetMap::identity(eval_functor(&e, sizes).unwrap()));
    }

    #[test]
    fn functors_preserve_composition(
        e in expr(),
        sizes in prop::collection::vec((1usize..=3, 1usize..=3, 1usize..=3), 8),
        seeds in prop::collection::vec((any::<u64>(), any::<u64>()), 8),
    ) {
        let vs = e.variances().unwrap();
        let k = vs.len();
        prop_assume!(k <= 8);
        // objects S, T, U per slot; p goes S to T and q goes T to U in the
        // slot's own direction
        let mut p = Vec::new();
        let mut q = Vec::new();
        let mut pq = Vec::new();
        for j in 0..k {
            let (s, t, u) = sizes[j];
            let (sp, sq) = seeds[j];
            let ok = match vs[j] {
                Variance::Co => map_from(sp, s, t).zip(map_from(sq, t, u)).map(|(a, b)| {
                    let c = a.then(&b).unwrap();
                    (a, b, c)
                }),
                Variance::Contra => map_from(sp, t, s).zip(map_from(sq, u, t)).map(|(a, b)| {
                    let c = b.then(&a).unwrap();
                    (a, b, c)
                }),
            };
            prop_assume!(ok.is_some());
            let (a, b, c) = ok.unwrap();
            p.push(a);
            q.push(b);
            pq.push(c);
        }
        let objs = |pick: fn(&(usize, usize, usize)) -> usize| sizes[..k].iter().map(pick).collect::<Vec<_>>();
        prop_assume!(fits(&e, &objs(|x| x.0)) && fits(&e, &objs(|x| x.1)) && fits(&e, &objs(|x| x.2)));
        let whole = functor_map(&e, &pq).unwrap();
        let steps = functor_map(&e, &p).unwrap().then(&functor_map(&e, &q).unwrap()).unwrap();
        prop_assert_eq!(whole, steps);
    }

    #[test]
    fn mixed_substitution_matches_two_plain_ones(
        a in prop::collection::vec(0u8..10, 1..=4),
        raw in prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 0..=6),
        i_raw in any::<prop::sample::Index>(),
    ) {
        let n = a.len();
        let i = i_raw.index(n) + 1;
        let sigma: Vec<usize> = raw.iter().map(|(x, _)| x.index(n) + 1).collect();
        let vs: Vec<Variance> = raw.iter().map(|(_, c)| if *c { Variance::Co } else { Variance::Contra }).collect();
        let got = substitute_mixed(&a, 100, 200, i, &sigma, &vs).unwrap();
        let with_x: Vec<u8> = substitute_tuple(&a, 100, i).unwrap();
        let with_y: Vec<u8> = substitute_tuple(&a, 200, i).unwrap();
        for (k, &s) in sigma.iter().enumerate() {
            let want = if vs[k] == Variance::Contra { with_x[s - 1] } else { with_y[s - 1] };
            prop_assert_eq!(got[k], want);
        }
    }

    #[test]
    fn labelled_firings_keep_the_morphism(seed in any::<u64>(), a in 0usize..=2, b in 0usize..=2, fseed in any::<u64>()) {
        let l = load("copy_eval.json");
        let t = &l.transformation;
        let chain = l.chain().unwrap().unwrap();
        let net = t.graph().cospan().net();
        prop_assume!(map_from(fseed, a, b).is_some());
        let f = map_from(fseed, a, b).unwrap();
        let mut lm = LabelledMarking::initial(net);
        let mut x = seed;
        let first = realize_marking(t, &chain, 1, &[0], &lm, &f).unwrap();
        loop {
            let ready: Vec<usize> = (0..net.num_transitions())
                .filter(|&tr| lm.labels[tr] == Label::B && is_enabled(net, &lm.marking, tr))
                .collect();
            if ready.is_empty() {
                break;
            }
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            lm = fire_labelled(net, &lm, ready[(x >> 33) as usize % ready.len()]).unwrap();
            prop_assert!(lm.is_valid(net));
            prop_assert_eq!(&realize_marking(t, &chain, 1, &[0], &lm, &f).unwrap(), &first);
        }
        prop_assert_eq!(lm, LabelledMarking::terminal(net));
    }
}

#[test]
fn builtins_pass_at_size_three() {
    let cases: Vec<(ConcreteTransformation, Vec<usize>)> = vec![
        (ConcreteTransformation::diagonal(), vec![1]),
        (ConcreteTransformation::eval(), vec![1, 2]),
        (ConcreteTransformation::church(0), vec![1]),
        (ConcreteTransformation::church(1), vec![1]),
        (ConcreteTransformation::church(2), vec![1]),
        (ConcreteTransformation::church(3), vec![1]),
    ];
    for (ct, vars) in cases {
        for i in vars {
            let r = check_dinaturality(&ct, i, 3).unwrap();
            assert!(r.passed(), "{} fails in variable {i}: {r:?}", ct.signature().name);
        }
    }
}

#[test]
fn church_numerals_add_under_composition() {
    // (c1 ; c2) ; c3 and c1 ; (c2 ; c3) both iterate 1 + 2 + 3 times
    let c = |n| ConcreteTransformation::church(n);
    let left = vcompose_concrete(&vcompose_concrete(&c(1), &c(2)).unwrap(), &c(3)).unwrap();
    let right = vcompose_concrete(&c(1), &vcompose_concrete(&c(2), &c(3)).unwrap()).unwrap();
    for k in 0..=3 {
        let want = c(6).component(&[k]).unwrap();
        assert_eq!(left.component(&[k]).unwrap(), want);
        assert_eq!(right.component(&[k]).unwrap(), want);
    }
}

#[test]
fn composite_tables_are_total_for_small_sets() {
    let l = load("copy_eval.json");
    let ct = l.semantics().unwrap().unwrap();
    for k in 0..=2 {
        let m = ct.component(&[k]).unwrap();
        m.validate().unwrap();
        // (a, h) goes to (a, h(a)) with |R| = 2
        assert_eq!(m.dom, k * 2usize.pow(k as u32));
        assert_eq!(m.cod, k * 2);
    }
    let r = check_prediction(&l.transformation, &ct, 2).unwrap();
    assert!(r.all_pass());
}

#[test]
fn initial_and_terminal_markings_are_the_hexagon_legs() {
    let l = load("copy_eval.json");
    let t = &l.transformation;
    let chain = l.chain().unwrap().unwrap();
    let ct = l.semantics().unwrap().unwrap();
    let net = t.graph().cospan().net();
    for a in 0..=2 {
        for b in 0..=2 {
            for f in all_maps(a, b).unwrap() {
                let (upper, lower) = hexagon_legs(&ct, 1, &[0], &f).unwrap();
                assert_eq!(realize_marking(t, &chain, 1, &[0], &LabelledMarking::initial(net), &f).unwrap(), lower);
                assert_eq!(realize_marking(t, &chain, 1, &[0], &LabelledMarking::terminal(net), &f).unwrap(), upper);
            }
        }
    }
}

#[test]
fn realize_marking_rejects_mismatched_chains() {
    let l = load("copy_eval.json");
    let t = &l.transformation;
    let net = t.graph().cospan().net();
    let f = FinSetMap::identity(1);
    let wrong = vec![ConcreteTransformation::church(2)];
    assert!(matches!(
        realize_marking(t, &wrong, 1, &[0], &LabelledMarking::initial(net), &f),
        Err(OracleError::ShapeMismatch(_))
    ));
}

#[test]
fn corrupted_fixture_gives_a_counterexample() {
    let l = load("church2_corrupted.json");
    let ct = l.semantics().unwrap().unwrap();
    match check_dinaturality(&ct, 1, 3).unwrap() {
        HexagonReport::Fail { f, upper, lower, .. } => {
            assert_ne!(upper, lower);
            assert_eq!(upper.dom, lower.dom);
            assert!(f.dom <= 3 && f.cod <= 3);
        }
        r => panic!("expected a failure, got {r:?}"),
    }
}

#[test]
fn cyclic_composites_claim_nothing() {
    let phi = make_atomic(sig(vec![P, M], vec![P, M], vec![1, 1], vec![1, 1], 1), vec![true]).unwrap();
    let chi = make_atomic(sig(vec![P, M], vec![], vec![1, 1], vec![], 1), vec![true]).unwrap();
    let c: Transformation = vcompose(&phi, &chi).unwrap();
    assert_eq!(c.delta(), &[false]);
    // concrete side: identity on Hom(A, 2) x A followed by evaluation
    let id = ConcreteTransformation::identity_on(FunctorExpr::Prod(vec![
        FunctorExpr::arg(1, P),
        FunctorExpr::hom(FunctorExpr::arg(2, M), FunctorExpr::Const(1)),
    ]))
    .unwrap();
    let ev = ConcreteTransformation::eval_const(1);
    let ct = vcompose_concrete(&id, &ev).unwrap();
    let r = check_prediction(&c, &ct, 2).unwrap();
    assert!(r.checked.is_empty());
    assert_eq!(r.no_guarantee, vec![1]);
}

#[test]
fn budget_and_missing_tables_are_errors() {
    assert!(matches!(
        check_dinaturality_with_budget(&ConcreteTransformation::church(2), 1, 3, 5),
        Err(OracleError::BudgetExceeded { .. })
    ));
    let s = Signature::new("t", vec![P], vec![P], CospanType::identity(1)).unwrap();
    let e = FunctorExpr::arg(1, P);
    let ct = ConcreteTransformation::from_tables(s, e.clone(), e, Default::default()).unwrap();
    assert_eq!(check_dinaturality(&ct, 1, 1), Err(OracleError::MissingTable(vec![0])));
}

use Variance::{Co as P, Contra as M};

fn sig(dom: Vec<Variance>, cod: Vec<Variance>, sigma: Vec<usize>, tau: Vec<usize>, n: usize) -> Signature {
    Signature::new("s", dom, cod, CospanType::new(sigma, tau, n).unwrap()).unwrap()
}
