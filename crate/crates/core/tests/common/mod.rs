#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use refine_core::logic::{CmpOp, LinearTerm, Predicate};
use refine_core::span::Span;
use refine_core::surface::{expand_aliases, parse, SurfaceProgram};
use refine_core::typesys::{check_program, BaseType, Origin, ProgramCheck, VerificationCondition};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_file(name: &str) -> PathBuf {
    corpus_dir().join(name)
}

pub fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "rfn"))
        .collect();
    files.sort();
    files
}

pub fn load(name: &str) -> SurfaceProgram {
    let src = std::fs::read_to_string(corpus_file(name)).expect("corpus file");
    expand_aliases(&parse(&src).expect("parses")).expect("aliases expand")
}

pub fn check_corpus(name: &str) -> ProgramCheck {
    check_program(&load(name))
}

const NAMES: [&str; 4] = ["a", "b", "c", "d"];
const OPS: [CmpOp; 6] = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];

fn random_term(rng: &mut ChaCha8Rng, vars: &[&str], coeff: i64) -> LinearTerm {
    let mut t = LinearTerm::constant(rng.gen_range(-10..=10));
    for x in vars {
        if rng.gen_bool(0.6) {
            let c = rng.gen_range(-coeff..=coeff);
            t = t.add(&LinearTerm::var(*x).scale(c).unwrap()).unwrap();
        }
    }
    t
}

pub fn random_atom(rng: &mut ChaCha8Rng, vars: &[&str], coeff: i64) -> Predicate {
    let op = OPS[rng.gen_range(0..OPS.len())];
    let lhs = random_term(rng, vars, coeff);
    let rhs = random_term(rng, vars, coeff);
    Predicate::cmp(op, lhs, rhs)
}

/// A VC over up to `max_vars` Nat/Int variables with random linear atoms,
/// coefficients in `[-coeff, coeff]`.
pub fn random_vc(rng: &mut ChaCha8Rng, max_vars: usize, coeff: i64) -> VerificationCondition {
    let n = rng.gen_range(1..=max_vars.min(NAMES.len()));
    let vars = &NAMES[..n];
    let declarations = vars
        .iter()
        .map(|x| {
            let b = if rng.gen_bool(0.5) { BaseType::Nat } else { BaseType::Int };
            (x.to_string(), b)
        })
        .collect();
    let facts = (0..rng.gen_range(0..=3))
        .map(|_| random_atom(rng, vars, coeff))
        .collect();
    let goal = match rng.gen_range(0..10) {
        0 => Predicate::And(vec![random_atom(rng, vars, coeff), random_atom(rng, vars, coeff)]),
        1 => Predicate::Or(vec![random_atom(rng, vars, coeff), random_atom(rng, vars, coeff)]),
        2 => Predicate::implies(random_atom(rng, vars, coeff), random_atom(rng, vars, coeff)),
        _ => random_atom(rng, vars, coeff),
    };
    VerificationCondition {
        declarations,
        facts,
        goal,
        origin: Origin {
            span: Span::DUMMY,
            reason: "generated".into(),
        },
    }
}
