use crate::surface::{Item, Proof, SurfaceProgram, Term, TermKind};

/// Replaces every proof component by the erased placeholder.
pub fn erase(e: &Term) -> Term {
    let mut out = e.clone();
    erase_in_place(&mut out);
    out
}

pub fn erase_program(p: &SurfaceProgram) -> SurfaceProgram {
    let mut out = p.clone();
    for item in &mut out.items {
        match item {
            Item::Fun(f) => erase_in_place(&mut f.body),
            Item::Val(v) => erase_in_place(&mut v.body),
            Item::Alias(_) => {}
        }
    }
    out
}

fn erase_in_place(e: &mut Term) {
    let mut stack = vec![e];
    while let Some(t) = stack.pop() {
        match &mut t.kind {
            TermKind::Pair { value, proof } => {
                *proof = Proof::Erased;
                stack.push(value);
            }
            TermKind::Var(_) | TermKind::NatLit(_) | TermKind::IntLit(_) | TermKind::BoolLit(_) => {}
            TermKind::Arith(_, a, b)
            | TermKind::Cmp(_, a, b)
            | TermKind::Logic(_, a, b)
            | TermKind::App(a, b) => {
                stack.push(a);
                stack.push(b);
            }
            TermKind::Scale(_, a) | TermKind::Not(a) | TermKind::Annot(a, _) => stack.push(a),
            TermKind::Lam { body, .. } => stack.push(body),
            TermKind::Let { bound, body, .. } => {
                stack.push(bound);
                stack.push(body);
            }
            TermKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                stack.push(cond);
                stack.push(then_branch);
                stack.push(else_branch);
            }
            TermKind::Match {
                scrutinee,
                zero_branch,
                suc_branch,
                ..
            } => {
                stack.push(scrutinee);
                stack.push(zero_branch);
                stack.push(suc_branch);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_term;

    #[test]
    fn pairs_lose_their_proofs() {
        let e = parse_term("(2, auto)").unwrap();
        assert_eq!(erase(&e).to_string(), "(2, erased)");
    }

    #[test]
    fn pair_free_terms_are_unchanged() {
        let e = parse_term("fn x => if x < 3 then x + 1 else x").unwrap();
        assert_eq!(erase(&e), e);
    }

    #[test]
    fn nested_positions_are_erased() {
        let e = parse_term("let y = (1, auto) in match y with | zero => (0, auto) | suc k => k").unwrap();
        let s = erase(&e).to_string();
        assert!(!s.contains("auto"), "{s}");
        assert_eq!(s.matches("erased").count(), 2);
    }
}
