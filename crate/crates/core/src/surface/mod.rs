//! Lexing, parsing, printing and alias expansion of `.rfn` source files.
//!
//! ```text
//! type Fin(n) = {x: Nat | x < n}
//! fun pred (n : Nat) (m : Fin(n)) : Fin(n) =
//!   match m with
//!   | zero => (zero, auto)
//!   | suc x => (x, auto)
//! ```

pub mod alias;
pub mod ast;
pub mod lexer;
pub mod parser;
pub mod print;

pub use alias::{expand_aliases, AliasError};
pub use ast::*;
pub use parser::{parse, parse_term, parse_type, SyntaxError};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typesys::BaseType;

    fn roundtrip(src: &str) {
        let p = parse(src).unwrap_or_else(|e| panic!("{src}: {e}"));
        let printed = p.to_string();
        let q = parse(&printed).unwrap_or_else(|e| panic!("reparse of {printed:?}: {e}"));
        assert_eq!(p.without_spans(), q.without_spans(), "printed: {printed}");
    }

    #[test]
    fn parses_refinement_pair_binding() {
        let p = parse("val two : {x: Nat | x == 2} = (2, auto)").unwrap();
        assert_eq!(p.items.len(), 1);
        let Item::Val(v) = &p.items[0] else {
            panic!("expected val")
        };
        assert_eq!(v.name, "two");
        match &v.ty.kind {
            TypeKind::Refined { binder, base, pred } => {
                assert_eq!(binder, "x");
                assert_eq!(*base, BaseType::Nat);
                assert_eq!(pred.to_string(), "x == 2");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            v.body.kind,
            TermKind::Pair {
                proof: Proof::Auto,
                ..
            }
        ));
    }

    #[test]
    fn empty_source_is_empty_program() {
        assert_eq!(parse("").unwrap().items.len(), 0);
        assert_eq!(parse("  -- only a comment\n").unwrap().items.len(), 0);
    }

    #[test]
    fn unclosed_pair_fails_at_end_of_input() {
        let src = "val bad = (1,";
        let err = parse(src).unwrap_err();
        // `val bad =` is already missing its type; the first error is there
        assert_eq!(err.line, 1);
        let src = "val bad : Nat = (1,";
        let err = parse(src).unwrap_err();
        assert_eq!(err.span.start, src.len());
        assert!(err.message.contains("end of input"), "{}", err.message);
    }

    #[test]
    fn syntax_error_reports_expected_set() {
        let err = parse("val x : Nat 3").unwrap_err();
        assert_eq!((err.line, err.column), (1, 13));
        assert!(err.expected.contains(&"`=`".to_string()), "{:?}", err.expected);
        assert!(err.expected.contains(&"`->`".to_string()), "{:?}", err.expected);
    }

    #[test]
    fn auto_outside_pair_is_rejected() {
        assert!(parse("val x : Nat = auto").is_err());
        assert!(parse("val x : Nat = (auto, auto)").is_err());
        assert!(parse("val x : Nat = (1, 2)").is_err());
    }

    #[test]
    fn multiplication_needs_a_literal() {
        assert!(parse("val x : {v: Int | 2 * v > 0} = 1").is_ok());
        assert!(parse("val x : {v: Int | v * 3 > 0} = 1").is_ok());
        let err = parse("val x : {v: Int | v * v > 0} = 1").unwrap_err();
        assert!(err.message.contains("literal"));
    }

    #[test]
    fn suc_and_zero_desugar() {
        let t = parse_term("suc zero").unwrap();
        assert_eq!(t.to_string(), "0 + 1");
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = format!("val x : Nat = {}1{}", "(".repeat(5000), ")".repeat(5000));
        assert!(parse(&src).unwrap_err().message.contains("too deep"));
    }

    #[test]
    fn printer_roundtrips_corner_cases() {
        roundtrip("val a : Int = -3 + x - -2 * y");
        roundtrip("val a : Int = f (-3) (g x) (2 * 3)");
        roundtrip("val a : Bool = !(x < 1) && (p => q => r) || !!b");
        roundtrip("val a : Bool = (p => q) => r");
        roundtrip("val a : Nat = 3 * (2 * x) + x * 4");
        roundtrip("val a : Nat = match m with | suc k => k | zero => match k with | zero => 1 | suc j => j");
        roundtrip("val a : Nat = f (let x = 1 in x) (if b then 1 else 2) + (match m with | zero => 0 | suc k => k)");
        roundtrip("val a : (x : Nat) -> ((y : Nat) -> Nat) -> Fin(x + 1) = fn x => fn (g : Nat -> Nat) => (g x : Nat)");
        roundtrip("type T = {v: Int | (v == 0) == true}");
        roundtrip("val a : Nat = - x");
        roundtrip("val a : Nat = (1 : Nat) ; val b : Nat = (a, auto);");
    }

    #[test]
    fn spans_nest() {
        let src = "fun f (n : Nat) (m : {x: Nat | x < n}) : Nat = let y = m + 1 in if y < n then f n y else (y, auto)";
        let p = parse(src).unwrap();
        let Item::Fun(d) = &p.items[0] else { panic!() };
        fn check(t: &Term, len: usize) {
            assert!(t.span.end <= len);
            for c in t.children() {
                assert!(t.span.contains(&c.span), "{:?} !> {:?}", t.span, c.span);
                check(c, len);
            }
        }
        check(&d.body, src.len());
        assert!(d.span.contains(&d.body.span));
    }

    #[test]
    fn alias_expansion_substitutes_argument() {
        let p = parse("type Fin(n) = {x: Nat | x < n}\nval y : Fin(5) = 3").unwrap();
        let e = expand_aliases(&p).unwrap();
        let Item::Val(v) = &e.items[1] else { panic!() };
        assert_eq!(v.ty.to_string(), "{x: Nat | x < 5}");
    }

    #[test]
    fn alias_expansion_is_identity_without_aliases() {
        let p = parse("val y : {x: Nat | x < 5} = 3\nfun f (a : Nat) : Nat = a").unwrap();
        assert_eq!(expand_aliases(&p).unwrap(), p);
    }

    #[test]
    fn alias_cycles_and_unknowns() {
        let p = parse("type A = B; type B = A\nval x : A = 1").unwrap();
        assert!(matches!(
            expand_aliases(&p),
            Err(AliasError::CyclicAlias { .. })
        ));
        let p = parse("val x : Missing = 1").unwrap();
        assert!(matches!(
            expand_aliases(&p),
            Err(AliasError::UnknownAlias { name, .. }) if name == "Missing"
        ));
        let p = parse("type F(n) = Nat\nval x : F = 1").unwrap();
        assert!(matches!(
            expand_aliases(&p),
            Err(AliasError::AliasArity { .. })
        ));
    }

    #[test]
    fn alias_expansion_avoids_capture() {
        let p = parse("type Fin(n) = {x: Nat | x < n}\nfun f (x : Nat) (y : Fin(x + 1)) : Nat = y").unwrap();
        let e = expand_aliases(&p).unwrap();
        let Item::Fun(d) = &e.items[1] else { panic!() };
        assert_eq!(d.params[1].ty.to_string(), "{x1: Nat | x1 < x + 1}");
    }

    #[test]
    fn nested_aliases_expand() {
        let p = parse(
            "type Fin(n) = {x: Nat | x < n}\ntype Idx(m) = Fin(m + 1)\nval z : Idx(3) = 0",
        )
        .unwrap();
        let e = expand_aliases(&p).unwrap();
        let Item::Val(v) = &e.items[2] else { panic!() };
        assert_eq!(v.ty.to_string(), "{x: Nat | x < 3 + 1}");
        assert!(!v.ty.mentions_alias());
        assert_eq!(expand_aliases(&e).unwrap(), e);
    }
}
