//! Property tests: substitution laws, combining rules, the printer/parser pair,
//! sampling frequencies, Bayes-ball against d-separation, and the estimator.

use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use dcsharp::analysis::{GroundDag, NodeId};
use dcsharp::bayes_ball::{classify, dsep};
use dcsharp::distribution::{combine, CombiningRule, Distribution};
use dcsharp::estimator::{estimate_cslw, estimate_naive, Algorithm, WeightMatrix};
use dcsharp::parser::parse_program;
use dcsharp::state::WeightedRow;
use dcsharp::term::{match_term, unify, Subst, Term, Var};

fn constant() -> impl Strategy<Value = Term> {
    prop_oneof![prop::sample::select(&["a", "b", "c"][..]).prop_map(Term::atom), (0i64..3).prop_map(Term::Int)]
}

fn grow(leaf: impl Strategy<Value = Term> + 'static) -> impl Strategy<Value = Term> {
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::compound("f", vec![t])),
            (inner.clone(), inner).prop_map(|(x, y)| Term::compound("g", vec![x, y])),
        ]
    })
}

fn term(vars: &'static [&'static str]) -> impl Strategy<Value = Term> {
    grow(prop_oneof![prop::sample::select(vars).prop_map(Term::var), constant()])
}

fn ground_term() -> impl Strategy<Value = Term> {
    grow(constant())
}

/// Replace subterms of `t` by variables wherever `mask` says so (consumed in pre-order).
fn abstract_term(t: &Term, mask: &mut impl Iterator<Item = Option<&'static str>>) -> Term {
    if let Some(Some(v)) = mask.next() {
        return Term::var(v);
    }
    match t {
        Term::Compound(f, args) => Term::compound(f, args.iter().map(|a| abstract_term(a, mask)).collect()),
        other => other.clone(),
    }
}

fn subst(vars: &'static [&'static str], range: &'static [&'static str]) -> impl Strategy<Value = Subst> {
    prop::collection::vec(prop::option::of(term(range)), vars.len())
        .prop_map(move |ts| Subst::from_pairs(vars.iter().zip(ts).filter_map(|(v, t)| t.map(|t| (Var::new(v), t)))))
}

proptest! {
    #[test]
    fn mgu_unifies_and_is_idempotent(a in term(&["X", "Y", "Z"]), b in term(&["X", "Y", "Z"])) {
        if let Some(s) = unify(&a, &b) {
            let sa = s.apply(&a);
            prop_assert_eq!(&sa, &s.apply(&b));
            prop_assert_eq!(s.apply(&sa), sa);
        }
    }

    #[test]
    fn mgu_is_most_general(
        t in ground_term(),
        ma in prop::collection::vec(prop::option::weighted(0.3, prop::sample::select(&["X", "Y", "Z"][..])), 16),
        mb in prop::collection::vec(prop::option::weighted(0.3, prop::sample::select(&["U", "V", "W"][..])), 16),
    ) {
        let a = abstract_term(&t, &mut ma.into_iter());
        let b = abstract_term(&t, &mut mb.into_iter());
        let (Some(sa), Some(sb)) = (match_term(&a, &t), match_term(&b, &t)) else {
            return Err(TestCaseError::reject("abstraction not an instance"));
        };
        let sigma = Subst::from_pairs(sa.iter().chain(sb.iter()).map(|(v, t)| (v.clone(), t.clone())));
        let mgu = unify(&a, &b);
        prop_assert!(mgu.is_some(), "{a} and {b} share the instance {t}");
        let mgu = mgu.unwrap();
        for v in a.vars().into_iter().chain(b.vars()) {
            let x = Term::Var(v);
            prop_assert_eq!(sigma.apply(&mgu.apply(&x)), sigma.apply(&x));
        }
    }

    #[test]
    fn compose_matches_sequential_application(
        e in term(&["X", "Y", "Z", "P", "Q"]),
        theta in subst(&["X", "Y"], &["P", "Q", "Z"]),
        sigma in subst(&["P", "Z"], &["Q", "R"]),
    ) {
        let seq = sigma.apply(&theta.apply(&e));
        prop_assert_eq!(theta.compose(&sigma).apply(&e), seq);
    }

    #[test]
    fn noisy_or_ignores_order(ps in prop::collection::vec(0.001f64..0.999, 2..12).prop_shuffle(), rot in 0usize..12) {
        let mut qs = ps.clone();
        qs.rotate_left(rot % ps.len());
        qs.reverse();
        let build = |xs: &[f64]| {
            combine(CombiningRule::NoisyOr, xs.iter().map(|&p| Distribution::bernoulli(p).unwrap()).collect()).unwrap()
        };
        let (x, y) = (build(&ps), build(&qs));
        let t = Term::atom("t");
        let direct = 1.0 - ps.iter().map(|p| 1.0 - p).product::<f64>();
        prop_assert!((x.likelihood(&t).unwrap() - y.likelihood(&t).unwrap()).abs() < 1e-12);
        prop_assert!((x.likelihood(&t).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn printed_programs_reparse(clauses in prop::collection::vec(clause_text(), 1..6)) {
        let text = clauses.join("\n");
        let p = parse_program(&text).unwrap();
        let printed = p.to_string();
        let q = parse_program(&printed).unwrap();
        prop_assert_eq!(&q, &p, "{}", printed);
        prop_assert_eq!(q.to_string(), printed);
    }
}

fn clause_text() -> impl Strategy<Value = String> {
    let arg = prop::sample::select(&["X", "Y", "a", "'two words'", "3", "-2.5", "1.0e-3", "f(X,b)"][..]);
    let head = (prop::sample::select(&["p", "q", "r"][..]), prop::collection::vec(arg, 0..3)).prop_map(|(n, args)| {
        if args.is_empty() {
            n.to_string()
        } else {
            format!("{n}({})", args.join(","))
        }
    });
    let dist = prop::sample::select(
        &["val(X)", "bernoulli(0.25)", "discrete([0.2:a, 0.8:'B c'])", "gaussian(650,15.4)", "gaussian(X,1)"][..],
    );
    let literal = prop::sample::select(
        &[
            "s(X) ~= t",
            "\\+ s(a) ~= Y",
            "X < 3",
            "Y >= -1.5",
            "X =< Y",
            "cnt(Z,(s(Z) ~= t),N)",
            "\\+ max(V,(s(W) ~= V),M)",
            "linear([X,Y],[0.5,2,-1],Z)",
        ][..],
    );
    (head, dist, prop::collection::vec(literal, 0..4)).prop_map(|(h, d, body)| {
        if body.is_empty() {
            format!("{h} ~ {d}.")
        } else {
            format!("{h} ~ {d} <- {}.", body.join(", "))
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn discrete_frequencies_pass_chi_square(
        raw in prop::collection::vec(0.05f64..1.0, 2..6),
        seed in any::<u64>(),
    ) {
        let total: f64 = raw.iter().sum();
        let entries: Vec<(f64, Term)> =
            raw.iter().enumerate().map(|(i, w)| (w / total, Term::Int(i as i64))).collect();
        let d = Distribution::discrete(entries.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 20_000;
        let mut counts = vec![0usize; entries.len()];
        for _ in 0..n {
            let Term::Int(i) = d.draw(&mut rng) else { panic!("non-integer draw") };
            counts[i as usize] += 1;
        }
        let stat: f64 = entries
            .iter()
            .zip(&counts)
            .map(|((p, _), &c)| {
                let e = p * n as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let chi = ChiSquared::new((entries.len() - 1) as f64).unwrap();
        prop_assert!(chi.sf(stat) > 1e-6, "statistic {stat} for {counts:?}");
    }
}

/// A random DAG over `n` nodes: node `i` draws up to three parents among `0..i`.
fn random_dag() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
    (2usize..=10).prop_flat_map(|n| {
        let parents = (0..n)
            .map(|i| {
                if i == 0 {
                    Just(Vec::new()).boxed()
                } else {
                    prop::sample::subsequence((0..i).collect::<Vec<_>>(), 0..=i.min(3)).boxed()
                }
            })
            .collect::<Vec<_>>();
        (Just(n), parents)
    })
}

/// Nodes `0..n`, plus a fresh root parent `n + j` for every `j` when `with_handles` is set.
fn build(n: usize, parents: &[Vec<usize>], with_handles: bool) -> GroundDag {
    let name = |i: usize| Term::atom(&format!("n{i}"));
    let total = if with_handles { 2 * n } else { n };
    let mut edges = Vec::new();
    for (c, ps) in parents.iter().enumerate() {
        edges.extend(ps.iter().map(|&p| (name(p), name(c))));
        if with_handles {
            edges.push((name(n + c), name(c)));
        }
    }
    GroundDag::from_edges((0..total).map(name).collect(), &edges).unwrap()
}

proptest! {
    /// An observed node is diagnostic, and an unobserved one requisite, iff a fresh
    /// parent attached to it is d-connected to the query given the evidence. An
    /// observed node is visited iff it is d-connected to the query given the rest.
    #[test]
    fn bayes_ball_agrees_with_d_separation(
        (n, parents) in random_dag(),
        picks in prop::collection::vec(any::<bool>(), 10),
        q in any::<prop::sample::Index>(),
    ) {
        let g = build(n, &parents, false);
        let h = build(n, &parents, true);
        let id = |dag: &GroundDag, i: usize| dag.id(&Term::atom(&format!("n{i}"))).unwrap();
        let q = q.index(n);
        let ev: Vec<usize> = (0..n).filter(|&i| i != q && picks[i]).collect();
        let ev_g: HashSet<NodeId> = ev.iter().map(|&i| id(&g, i)).collect();
        let ev_h: Vec<NodeId> = ev.iter().map(|&i| id(&h, i)).collect();
        let c = classify(&g, &[id(&g, q)], &ev_g).unwrap();
        for j in 0..n {
            let top = !dsep(&h, &[id(&h, q)], &[id(&h, n + j)], &ev_h);
            let jg = id(&g, j);
            if ev.contains(&j) {
                prop_assert_eq!(c.diagnostic.contains(&jg), top, "diagnostic n{}", j);
                let rest: Vec<NodeId> = ev_h.iter().copied().filter(|&e| e != id(&h, j)).collect();
                let visited = !dsep(&h, &[id(&h, q)], &[id(&h, j)], &rest);
                prop_assert_eq!(c.diagnostic.contains(&jg) || c.predictive.contains(&jg), visited, "visited n{}", j);
            } else {
                prop_assert_eq!(c.requisite_unobserved.contains(&jg), top, "requisite n{}", j);
            }
        }
    }

    #[test]
    fn cslw_equals_naive_without_residuals(
        weights in prop::collection::vec((any::<bool>(), prop::collection::vec(-5.0f64..1.0, 3)), 1..200),
    ) {
        let rows: Vec<WeightedRow> = weights
            .into_iter()
            .map(|(f, ws)| WeightedRow { f, natural: ws.into_iter().enumerate().collect(), filled: Vec::new() })
            .collect();
        let naive = estimate_naive(&rows, Algorithm::Cslw).unwrap();
        let cs = estimate_cslw(&WeightMatrix::new(vec![0, 1, 2], rows).unwrap(), Algorithm::Cslw).unwrap();
        prop_assert_eq!(cs.value.to_bits(), naive.value.to_bits());
        prop_assert_eq!(cs.std_error.map(f64::to_bits), naive.std_error.map(f64::to_bits));
    }
}
