mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use refine_core::cli::exit_code_for;
use refine_core::eval::{erase_program, eval, Value};
use refine_core::logic::{translate_vc, LinearTerm, Predicate};
use refine_core::solver::oracle::{brute_force, eval_predicate_ground, refutes};
use refine_core::solver::sexp::{read_all, Sexp};
use refine_core::solver::{parse_model, Model, ModelValue, UnknownReason, Verdict};
use refine_core::span::Span;
use refine_core::surface::{
    expand_aliases, parse, ArithOp, CmpOp, LogicOp, Proof, SurfaceType, Term, TermKind, TypeKind,
};
use refine_core::typesys::{check_program, subtype, BaseType, RefinedType, TypingContext};

use common::{check_corpus, corpus_files, load, random_vc};

fn t(kind: TermKind) -> Term {
    Term::new(kind, Span::DUMMY)
}

fn b(e: Term) -> Box<Term> {
    Box::new(e)
}

fn arb_name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["a", "b", "x", "y", "n2", "k_1"]).prop_map(String::from)
}

fn arb_base() -> impl Strategy<Value = BaseType> {
    prop::sample::select(vec![BaseType::Nat, BaseType::Int, BaseType::Bool])
}

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        arb_name().prop_map(|x| t(TermKind::Var(x))),
        (0i64..1000).prop_map(|k| t(TermKind::NatLit(k))),
        (-1000i64..0).prop_map(|k| t(TermKind::IntLit(k))),
        any::<bool>().prop_map(|v| t(TermKind::BoolLit(v))),
    ];
    leaf.prop_recursive(4, 40, 3, |inner| {
        let cmp = prop::sample::select(vec![
            CmpOp::Eq,
            CmpOp::Ne,
            CmpOp::Lt,
            CmpOp::Le,
            CmpOp::Gt,
            CmpOp::Ge,
        ]);
        let logic = prop::sample::select(vec![LogicOp::And, LogicOp::Or, LogicOp::Implies]);
        let arith = prop::sample::select(vec![ArithOp::Add, ArithOp::Sub]);
        prop_oneof![
            (arith, inner.clone(), inner.clone()).prop_map(|(o, x, y)| t(TermKind::Arith(o, b(x), b(y)))),
            (2i64..6, inner.clone()).prop_map(|(k, x)| t(TermKind::Scale(k, b(x)))),
            (cmp, inner.clone(), inner.clone()).prop_map(|(o, x, y)| t(TermKind::Cmp(o, b(x), b(y)))),
            inner.clone().prop_map(|x| t(TermKind::Not(b(x)))),
            (logic, inner.clone(), inner.clone()).prop_map(|(o, x, y)| t(TermKind::Logic(o, b(x), b(y)))),
            (inner.clone(), inner.clone()).prop_map(|(f, x)| t(TermKind::App(b(f), b(x)))),
            (arb_name(), inner.clone()).prop_map(|(p, body)| t(TermKind::Lam {
                param: p,
                annotation: None,
                body: b(body),
            })),
            (arb_name(), inner.clone(), inner.clone()).prop_map(|(n, e, body)| t(TermKind::Let {
                name: n,
                bound: b(e),
                body: b(body),
            })),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(c, x, y)| t(TermKind::If {
                cond: b(c),
                then_branch: b(x),
                else_branch: b(y),
            })),
            (inner.clone(), inner.clone(), arb_name(), inner.clone()).prop_map(|(s, z, k, n)| t(
                TermKind::Match {
                    scrutinee: b(s),
                    zero_branch: b(z),
                    suc_binder: k,
                    suc_branch: b(n),
                }
            )),
            inner.clone().prop_map(|x| t(TermKind::Pair {
                value: b(x),
                proof: Proof::Auto,
            })),
            (inner.clone(), arb_base(), arb_name(), inner).prop_map(|(x, base, v, p)| t(TermKind::Annot(
                b(x),
                SurfaceType::new(
                    TypeKind::Refined {
                        binder: v,
                        base,
                        pred: b(p),
                    },
                    Span::DUMMY,
                ),
            ))),
        ]
    })
}

fn val_program(e: &Term) -> String {
    format!("val it : Nat = {e}")
}

fn ground_model(vc: &refine_core::typesys::VerificationCondition, vals: &[i64]) -> Model {
    vc.declarations
        .iter()
        .zip(vals)
        .map(|((n, _), &k)| (n.clone(), ModelValue::Int(k)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn print_then_parse_is_identity(e in arb_term()) {
        let src = val_program(&e);
        let p = parse(&src).map_err(|err| TestCaseError::fail(format!("{src}\n{err}")))?;
        let printed_again = p.to_string();
        let q = parse(&printed_again).unwrap();
        prop_assert_eq!(p.without_spans(), q.without_spans());
        let refine_core::surface::Item::Val(v) = &p.items[0] else { panic!() };
        prop_assert_eq!(v.body.to_string(), e.to_string());
    }

    #[test]
    fn alias_expansion_is_idempotent(e in arb_term(), arg in arb_term()) {
        let src = format!("type A(n) = {{x: Nat | x < n}}\nval it : A({arg}) = {e}");
        let p = parse(&src).unwrap();
        if let Ok(once) = expand_aliases(&p) {
            let twice = expand_aliases(&once).unwrap();
            prop_assert_eq!(once.without_spans(), twice.without_spans());
            for item in &once.items {
                if let refine_core::surface::Item::Val(v) = item {
                    prop_assert!(!v.ty.mentions_alias());
                }
            }
        }
    }

    #[test]
    fn linear_terms_agree_with_wide_arithmetic(
        a in -1000i64..1000, ca in -50i64..50,
        c in -1000i64..1000, cb in -50i64..50,
        k in -20i64..20, x in -1000i64..1000, y in -1000i64..1000,
    ) {
        let s = LinearTerm::var("x").scale(ca).unwrap().add_constant(a).unwrap();
        let u = LinearTerm::var("y").scale(cb).unwrap().add_constant(c).unwrap();
        let combined = s.add(&u).unwrap().sub(&u.scale(k).unwrap()).unwrap();
        let lookup = |n: &str| -> Result<i64, refine_core::logic::Overflow> { Ok(if n == "x" { x } else { y }) };
        let wide = |v: i128| v;
        let sv = i128::from(ca) * i128::from(x) + i128::from(a);
        let uv = i128::from(cb) * i128::from(y) + i128::from(c);
        let expected = wide(sv + uv - i128::from(k) * uv);
        prop_assert_eq!(i128::from(combined.eval(&lookup).unwrap()), expected);
        prop_assert!(combined.terms().iter().all(|(c, _)| *c != 0));
    }

    #[test]
    fn overflow_is_reported(k in 2i64..100) {
        let big = LinearTerm::constant(i64::MAX / 2 + 1);
        prop_assert!(big.scale(k).is_err());
        prop_assert!(big.add(&big).is_err());
    }

    #[test]
    fn oracle_matches_direct_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vc = random_vc(&mut rng, 3, 3);
        let bound = 3i64;
        let domains: Vec<Vec<i64>> = vc
            .declarations
            .iter()
            .map(|(_, b)| if *b == BaseType::Nat { (0..=bound).collect() } else { (-bound..=bound).collect() })
            .collect();
        // lexicographic product, first name slowest
        let mut assignments: Vec<Vec<i64>> = vec![vec![]];
        for d in &domains {
            assignments = assignments
                .into_iter()
                .flat_map(|pre| d.iter().map(move |&k| { let mut v = pre.clone(); v.push(k); v }))
                .collect();
        }
        let first = assignments
            .iter()
            .map(|vals| ground_model(&vc, vals))
            .find(|m| {
                vc.facts.iter().all(|f| eval_predicate_ground(f, m).unwrap())
                    && !eval_predicate_ground(&vc.goal, m).unwrap()
            });
        let verdict = brute_force(&vc, bound as u32).unwrap();
        match (first, verdict) {
            (None, Verdict::Valid { bounded }) => prop_assert_eq!(bounded, Some(bound as u32)),
            (Some(m), Verdict::Invalid(found)) => {
                prop_assert_eq!(&m, &found);
                prop_assert!(refutes(&vc, &found).unwrap());
            }
            (a, v) => prop_assert!(false, "{a:?} vs {v:?}"),
        }
    }

    #[test]
    fn scripts_are_well_formed(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vc = random_vc(&mut rng, 4, 5);
        let script = translate_vc(&vc).unwrap();
        let text = script.render();
        let forms = read_all(&text).unwrap();
        prop_assert_eq!(forms.first().map(ToString::to_string), Some("(set-logic QF_LIA)".into()));
        prop_assert_eq!(forms[forms.len() - 2].to_string(), "(check-sat)");
        prop_assert_eq!(forms[forms.len() - 1].to_string(), "(get-model)");
        let declares = forms.iter().filter(|f| matches!(f, Sexp::List(xs) if xs.first().and_then(Sexp::atom) == Some("declare-const"))).count();
        prop_assert_eq!(declares, vc.declarations.len());
        let nats = vc.declarations.iter().filter(|(_, b)| *b == BaseType::Nat).count();
        let asserts = forms.iter().filter(|f| matches!(f, Sexp::List(xs) if xs.first().and_then(Sexp::atom) == Some("assert"))).count();
        prop_assert_eq!(asserts, nats + vc.facts.len() + 1);
        prop_assert_eq!(script.negated_goal(), &Predicate::not(vc.goal.clone()));
        prop_assert_eq!(translate_vc(&vc).unwrap().render(), text);
    }

    #[test]
    fn models_survive_the_solver_format(
        ints in prop::collection::vec(any::<i64>(), 1..5),
        flags in prop::collection::vec(any::<bool>(), 0..3),
    ) {
        let mut text = String::from("(\n");
        let mut declared = Vec::new();
        let mut expected = Model::new();
        for (i, k) in ints.iter().enumerate() {
            let name = format!("x!{i}");
            let lit = if *k < 0 { format!("(- {})", k.unsigned_abs()) } else { k.to_string() };
            text.push_str(&format!("  (define-fun |{name}| () Int\n    {lit})\n"));
            declared.push((name.clone(), refine_core::logic::Sort::Int));
            expected.insert(name, ModelValue::Int(*k));
        }
        for (i, f) in flags.iter().enumerate() {
            let name = format!("b{i}");
            text.push_str(&format!("  (define-fun {name} () Bool {f})\n"));
            declared.push((name.clone(), refine_core::logic::Sort::Bool));
            expected.insert(name, ModelValue::Bool(*f));
        }
        text.push(')');
        let parsed = parse_model(&text, &declared).unwrap();
        for (n, v) in expected.iter() {
            prop_assert_eq!(parsed.get(n), Some(v));
        }
        prop_assert_eq!(parsed.len(), expected.len());
    }

    #[test]
    fn subtyping_is_reflexive(base in prop::sample::select(vec![BaseType::Nat, BaseType::Int]), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pred = common::random_atom(&mut rng, &["v"], 4);
        let ty = RefinedType::refined(base, "v", pred);
        let vcs = subtype(&TypingContext::default(), &ty, &ty).unwrap();
        for vc in vcs {
            vc.check_sorts().unwrap();
            prop_assert!(brute_force(&vc, 30).unwrap().is_valid(), "{vc}");
        }
    }

    #[test]
    fn exit_code_ignores_order(codes in prop::collection::vec(0u8..3, 0..12), seed in any::<u64>()) {
        let verdicts: Vec<Verdict> = codes
            .iter()
            .map(|c| match c {
                0 => Verdict::VALID,
                1 => Verdict::Invalid(Model::new()),
                _ => Verdict::Unknown(UnknownReason::Timeout),
            })
            .collect();
        let expected = if codes.contains(&1) { 1 } else if codes.contains(&2) { 2 } else { 0 };
        prop_assert_eq!(exit_code_for(&verdicts), expected);
        let mut shuffled = verdicts.clone();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(exit_code_for(&shuffled), expected);
    }

    #[test]
    fn pred_preserves_its_refinement(n in 1i64..500, m_frac in 0.0f64..1.0) {
        let m = ((n as f64) * m_frac) as i64;
        let p = erase_program(&load("pred.rfn"));
        let (v, _) = eval(&p, "pred", &[Value::Nat(n), Value::Nat(m)]).unwrap();
        let r = v.as_int().unwrap();
        prop_assert!((0..n).contains(&r));
        prop_assert_eq!(r, (m - 1).max(0));
    }

    #[test]
    fn inject_preserves_its_refinement(m in 1i64..300, i_frac in 0.0f64..1.0) {
        let i = ((m as f64) * i_frac) as i64;
        let p = erase_program(&load("inject.rfn"));
        let (v, _) = eval(&p, "inject1", &[Value::Nat(m), Value::Nat(i)]).unwrap();
        let r = v.as_int().unwrap();
        prop_assert!(r >= 0 && r < m + 1);
        prop_assert_eq!(r, i);
    }

    #[test]
    fn arith_functions_meet_their_specs(x in -10_000i64..10_000, hi in 0i64..10_000) {
        let p = erase_program(&load("arith.rfn"));
        let run = |f: &str, args: &[Value]| eval(&p, f, args).unwrap().0;
        let nat = x.abs();
        prop_assert_eq!(run("abs", &[Value::Int(x)]).as_int(), Some(x.abs()));
        prop_assert_eq!(run("double", &[Value::Nat(nat)]).as_int(), Some(2 * nat));
        let c = run("clamp", &[Value::Nat(hi), Value::Int(x)]).as_int().unwrap();
        prop_assert!(c >= 0 && c <= hi);
        prop_assert!(run("succPos", &[Value::Nat(nat)]).as_int().unwrap() > 0);
        prop_assert_eq!(run("isZero", &[Value::Nat(nat)]).as_bool(), Some(nat == 0));
        let lifted = run("lifted", &[Value::Nat(nat)]).as_int().unwrap();
        prop_assert!(lifted > nat);
    }
}

#[test]
fn checking_is_deterministic_and_well_sorted() {
    for file in corpus_files() {
        let name = file.file_name().unwrap().to_string_lossy().into_owned();
        let a = check_corpus(&name);
        let b = check_corpus(&name);
        let show = |c: &refine_core::typesys::ProgramCheck| {
            c.vcs.iter().map(ToString::to_string).collect::<Vec<_>>()
        };
        assert_eq!(show(&a), show(&b), "{name}");
        for vc in &a.vcs {
            vc.check_sorts().unwrap_or_else(|e| panic!("{name}: {vc}: {e}"));
            let script = translate_vc(vc).unwrap();
            assert_eq!(read_all(&script.render()).unwrap().len(), script.declarations.len() + script.assertions.len() + 3);
        }
    }
}

#[test]
fn generated_vcs_are_well_sorted() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        random_vc(&mut rng, 4, 5).check_sorts().unwrap();
    }
}

#[test]
fn checking_ignores_item_spans() {
    let p = load("paper_examples.rfn");
    let a: Vec<String> = check_program(&p).vcs.iter().map(|v| v.to_string()).collect();
    let b: Vec<String> = check_program(&p.without_spans()).vcs.iter().map(|v| v.to_string()).collect();
    assert_eq!(a, b);
}
