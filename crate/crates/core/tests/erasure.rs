//! Erasing proofs does not change what a program computes.

mod common;

use std::collections::HashMap;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use refine_core::eval::{erase_program, eval, Value};
use refine_core::surface::{
    ArithOp, CmpOp, Item, LogicOp, Proof, SurfaceProgram, Term, TermKind,
};

use common::load;

/// Values of the reference interpreter. Pairs keep their proof.
#[derive(Clone)]
enum RefValue {
    Num(i64),
    Bool(bool),
    Fun(Rc<dyn Fn(RefValue) -> RefValue>),
    Pair(Box<RefValue>, Proof),
}

impl RefValue {
    fn forget(&self) -> &RefValue {
        match self {
            RefValue::Pair(v, _) => v.forget(),
            v => v,
        }
    }

    fn num(&self) -> i64 {
        match self.forget() {
            RefValue::Num(k) => *k,
            _ => panic!("expected a number"),
        }
    }

    fn boolean(&self) -> bool {
        match self.forget() {
            RefValue::Bool(b) => *b,
            _ => panic!("expected a boolean"),
        }
    }
}

type Scope = HashMap<String, RefValue>;

struct Reference {
    program: SurfaceProgram,
}

impl Reference {
    fn global(self: &Rc<Self>, name: &str) -> RefValue {
        match self.program.find(name).expect("defined") {
            Item::Val(v) => self.eval(&v.body, &Scope::new()),
            Item::Fun(f) => {
                let params: Vec<String> = f.params.iter().map(|p| p.name.clone()).collect();
                self.curry(params, Scope::new(), Rc::new(f.body.clone()))
            }
            Item::Alias(_) => panic!("alias is not a value"),
        }
    }

    fn curry(self: &Rc<Self>, mut params: Vec<String>, scope: Scope, body: Rc<Term>) -> RefValue {
        if params.is_empty() {
            return self.eval(&body, &scope);
        }
        let first = params.remove(0);
        let me = Rc::clone(self);
        RefValue::Fun(Rc::new(move |arg| {
            let mut s = scope.clone();
            s.insert(first.clone(), arg);
            me.curry(params.clone(), s, Rc::clone(&body))
        }))
    }

    fn eval(self: &Rc<Self>, e: &Term, scope: &Scope) -> RefValue {
        use TermKind::*;
        match &e.kind {
            Var(x) => scope.get(x).cloned().unwrap_or_else(|| self.global(x)),
            NatLit(k) | IntLit(k) => RefValue::Num(*k),
            BoolLit(b) => RefValue::Bool(*b),
            Arith(op, a, b) => {
                let (a, b) = (self.eval(a, scope).num(), self.eval(b, scope).num());
                RefValue::Num(match op {
                    ArithOp::Add => a + b,
                    ArithOp::Sub => a - b,
                })
            }
            Scale(k, a) => RefValue::Num(k * self.eval(a, scope).num()),
            Cmp(op, a, b) => {
                let (x, y) = (self.eval(a, scope), self.eval(b, scope));
                RefValue::Bool(match (x.forget(), op) {
                    (RefValue::Bool(p), CmpOp::Eq) => *p == y.boolean(),
                    (RefValue::Bool(p), CmpOp::Ne) => *p != y.boolean(),
                    _ => {
                        let (a, b) = (x.num(), y.num());
                        match op {
                            CmpOp::Eq => a == b,
                            CmpOp::Ne => a != b,
                            CmpOp::Lt => a < b,
                            CmpOp::Le => a <= b,
                            CmpOp::Gt => a > b,
                            CmpOp::Ge => a >= b,
                        }
                    }
                })
            }
            Not(a) => RefValue::Bool(!self.eval(a, scope).boolean()),
            Logic(op, a, b) => {
                let a = self.eval(a, scope).boolean();
                RefValue::Bool(match op {
                    LogicOp::And => a && self.eval(b, scope).boolean(),
                    LogicOp::Or => a || self.eval(b, scope).boolean(),
                    LogicOp::Implies => !a || self.eval(b, scope).boolean(),
                })
            }
            App(f, a) => {
                let f = self.eval(f, scope);
                let a = self.eval(a, scope);
                match f.forget() {
                    RefValue::Fun(g) => g(a),
                    _ => panic!("applied a non-function"),
                }
            }
            Lam { param, body, .. } => {
                self.curry(vec![param.clone()], scope.clone(), Rc::new((**body).clone()))
            }
            Let { name, bound, body } => {
                let v = self.eval(bound, scope);
                let mut s = scope.clone();
                s.insert(name.clone(), v);
                self.eval(body, &s)
            }
            If {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.eval(cond, scope).boolean() {
                    self.eval(then_branch, scope)
                } else {
                    self.eval(else_branch, scope)
                }
            }
            Match {
                scrutinee,
                zero_branch,
                suc_binder,
                suc_branch,
            } => {
                let n = self.eval(scrutinee, scope).num();
                if n == 0 {
                    self.eval(zero_branch, scope)
                } else {
                    let mut s = scope.clone();
                    s.insert(suc_binder.clone(), RefValue::Num(n - 1));
                    self.eval(suc_branch, &s)
                }
            }
            Pair { value, proof } => RefValue::Pair(Box::new(self.eval(value, scope)), *proof),
            Annot(a, _) => self.eval(a, scope),
        }
    }
}

/// Calls `entry` in the reference interpreter on the unerased program.
fn reference_run(program: &SurfaceProgram, entry: &str, args: &[i64]) -> RefValue {
    let r = Rc::new(Reference {
        program: program.clone(),
    });
    let mut v = r.global(entry);
    for a in args {
        v = match v.forget() {
            RefValue::Fun(f) => f(RefValue::Num(*a)),
            _ => panic!("too many arguments"),
        };
    }
    v
}

fn same(reference: &RefValue, erased: &Value) -> bool {
    match (reference.forget(), erased.strip()) {
        (RefValue::Num(a), v) => v.as_int() == Some(*a),
        (RefValue::Bool(a), v) => v.as_bool() == Some(*a),
        (RefValue::Fun(_), Value::Closure(_)) => true,
        _ => false,
    }
}

fn nat_args(rng: &mut ChaCha8Rng, refined_last: bool, count: usize) -> Vec<i64> {
    let mut args: Vec<i64> = (0..count).map(|_| rng.gen_range(0..200)).collect();
    if refined_last && count >= 2 {
        // keep the last argument below the first, as `Fin(n)` demands
        args[0] = args[0].max(1);
        args[count - 1] = rng.gen_range(0..args[0]);
    }
    args
}

#[test]
fn reference_keeps_proofs() {
    let p = load("pred.rfn");
    let v = reference_run(&p, "pred", &[5, 3]);
    assert!(matches!(v, RefValue::Pair(_, Proof::Auto)));
    assert_eq!(v.num(), 2);
}

#[test]
fn erasure_preserves_results_on_the_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe2a5e);
    let cases: &[(&str, &str, usize, bool)] = &[
        ("pred.rfn", "pred", 2, true),
        ("paper_examples.rfn", "pred", 2, true),
        ("paper_examples.rfn", "two", 0, false),
        ("paper_examples.rfn", "small", 0, false),
        ("inject.rfn", "inject1", 2, true),
        ("arith.rfn", "double", 1, false),
        ("arith.rfn", "succPos", 1, false),
        ("arith.rfn", "clamp", 2, false),
        ("arith.rfn", "isZero", 1, false),
        ("arith.rfn", "three", 0, false),
        ("arith.rfn", "lifted", 1, false),
    ];
    for (file, entry, arity, refined) in cases {
        let program = load(file);
        let erased = erase_program(&program);
        for _ in 0..25 {
            let args = nat_args(&mut rng, *refined, *arity);
            let expected = reference_run(&program, entry, &args);
            let values: Vec<Value> = args.iter().map(|&k| Value::Nat(k)).collect();
            let (got, _) = eval(&erased, entry, &values)
                .unwrap_or_else(|e| panic!("{file} {entry}{args:?}: {e}"));
            assert!(same(&expected, &got), "{file} {entry}{args:?}: got {got}");
        }
    }
}

#[test]
fn integer_arguments_agree() {
    let program = load("arith.rfn");
    let erased = erase_program(&program);
    for x in -50..50 {
        let expected = reference_run(&program, "abs", &[x]);
        let (got, _) = eval(&erased, "abs", &[Value::Int(x)]).unwrap();
        assert!(same(&expected, &got), "abs({x})");
    }
}

#[test]
fn erased_program_has_no_live_proofs() {
    fn all_erased(e: &Term) -> bool {
        let here = match &e.kind {
            TermKind::Pair { proof, .. } => *proof == Proof::Erased,
            _ => true,
        };
        here && e.children().into_iter().all(all_erased)
    }
    for file in common::corpus_files() {
        let name = file.file_name().unwrap().to_string_lossy().into_owned();
        let p = load(&name);
        for item in erase_program(&p).items {
            match item {
                Item::Fun(f) => assert!(all_erased(&f.body)),
                Item::Val(v) => assert!(all_erased(&v.body)),
                Item::Alias(_) => {}
            }
        }
    }
}
