//! Counterexample models returned by `(get-model)`.

use std::fmt::{self, Display, Formatter};

use thiserror::Error;

use crate::logic::Sort;

use super::sexp::{read_all, Sexp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelValue {
    Int(i64),
    Bool(bool),
}

impl ModelValue {
    pub fn sort(self) -> Sort {
        match self {
            ModelValue::Int(_) => Sort::Int,
            ModelValue::Bool(_) => Sort::Bool,
        }
    }

    pub fn default_of(sort: Sort) -> ModelValue {
        match sort {
            Sort::Int => ModelValue::Int(0),
            Sort::Bool => ModelValue::Bool(false),
        }
    }
}

impl Display for ModelValue {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ModelValue::Int(k) => write!(f, "{k}"),
            ModelValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Assignment of values to names, kept in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Model {
    entries: Vec<(String, ModelValue)>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `name`, replacing any earlier value.
    pub fn insert(&mut self, name: impl Into<String>, value: ModelValue) {
        let name = name.into();
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((name, value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<ModelValue> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn int(&self, name: &str) -> Option<i64> {
        match self.get(name)? {
            ModelValue::Int(k) => Some(k),
            ModelValue::Bool(_) => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, ModelValue)> {
        self.entries.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, ModelValue)> for Model {
    fn from_iter<I: IntoIterator<Item = (S, ModelValue)>>(iter: I) -> Self {
        let mut m = Model::new();
        for (n, v) in iter {
            m.insert(n, v);
        }
        m
    }
}

impl Display for Model {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for (i, (n, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n} = {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("cannot parse model: {detail} in `{fragment}`")]
pub struct ModelParseError {
    pub detail: String,
    pub fragment: String,
}

fn bad(detail: impl Into<String>, fragment: impl Display) -> ModelParseError {
    let mut fragment = fragment.to_string();
    if fragment.len() > 200 {
        let cut = (0..=200).rev().find(|&i| fragment.is_char_boundary(i)).unwrap_or(0);
        fragment.truncate(cut);
        fragment.push_str("...");
    }
    ModelParseError {
        detail: detail.into(),
        fragment,
    }
}

fn parse_value(e: &Sexp, sort: Sort) -> Result<ModelValue, ModelParseError> {
    match (sort, e) {
        (Sort::Bool, Sexp::Atom(a)) if a == "true" => Ok(ModelValue::Bool(true)),
        (Sort::Bool, Sexp::Atom(a)) if a == "false" => Ok(ModelValue::Bool(false)),
        (Sort::Int, Sexp::Atom(a)) => numeral(a, e).map(ModelValue::Int),
        (Sort::Int, Sexp::List(items)) => match items.as_slice() {
            [Sexp::Atom(minus), Sexp::Atom(a)] if minus == "-" => {
                let k = numeral(a, e)?;
                k.checked_neg()
                    .map(ModelValue::Int)
                    .ok_or_else(|| bad("integer out of range", e))
            }
            _ => Err(bad("unsupported integer value", e)),
        },
        _ => Err(bad(format!("expected a {sort} value"), e)),
    }
}

fn numeral(a: &str, e: &Sexp) -> Result<i64, ModelParseError> {
    if a.is_empty() || !a.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad("expected a numeral", e));
    }
    a.parse().map_err(|_| bad("integer out of range", e))
}

/// Extracts one value per declared name from a `get-model` response.
/// Definitions of other names are ignored.
pub fn parse_model(raw: &str, declared: &[(String, Sort)]) -> Result<Model, ModelParseError> {
    let forms = read_all(raw).map_err(|e| bad(e.to_string(), raw))?;
    let body: &[Sexp] = match forms.as_slice() {
        [Sexp::List(items)] => match items.first() {
            Some(Sexp::Atom(head)) if head == "model" => &items[1..],
            _ => items,
        },
        [] => &[],
        _ => return Err(bad("expected a single model list", raw)),
    };
    let mut found = Model::new();
    for def in body {
        let Some(parts) = def.list() else {
            return Err(bad("expected a definition", def));
        };
        let [Sexp::Atom(kw), Sexp::Atom(name), Sexp::List(args), Sexp::Atom(sort), value] = parts
        else {
            return Err(bad("expected `(define-fun name () Sort value)`", def));
        };
        if kw != "define-fun" {
            return Err(bad("expected `define-fun`", def));
        }
        if !args.is_empty() {
            return Err(bad("function definitions are not supported", def));
        }
        let Some((_, want)) = declared.iter().find(|(n, _)| n == name) else {
            continue;
        };
        if sort != &want.to_string() {
            return Err(bad(format!("`{name}` should have sort {want}"), def));
        }
        found.insert(name.clone(), parse_value(value, *want)?);
    }
    let mut out = Model::new();
    for (name, _) in declared {
        match found.get(name) {
            Some(v) => out.insert(name.clone(), v),
            None => return Err(bad(format!("no value for `{name}`"), raw)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decl(items: &[(&str, Sort)]) -> Vec<(String, Sort)> {
        items.iter().map(|(n, s)| (n.to_string(), *s)).collect()
    }

    #[test]
    fn parses_the_basic_shapes() {
        let m = parse_model("((define-fun x () Int 2))", &decl(&[("x", Sort::Int)])).unwrap();
        assert_eq!(m.get("x"), Some(ModelValue::Int(2)));
        let m = parse_model("((define-fun b () Bool true))", &decl(&[("b", Sort::Bool)])).unwrap();
        assert_eq!(m.get("b"), Some(ModelValue::Bool(true)));
        let m = parse_model("((define-fun x () Int (- 1)))", &decl(&[("x", Sort::Int)])).unwrap();
        assert_eq!(m.get("x"), Some(ModelValue::Int(-1)));
    }

    #[test]
    fn parses_multiline_output_with_quoted_names() {
        let raw = "(\n  (define-fun |n!1| () Int\n    0)\n  (define-fun y () Int\n    (- 4))\n)";
        let m = parse_model(raw, &decl(&[("y", Sort::Int), ("n!1", Sort::Int)])).unwrap();
        assert_eq!(m.to_string(), "y = -4, n!1 = 0");
    }

    #[test]
    fn accepts_model_keyword_wrapper() {
        let raw = "(model (define-fun x () Int 7))";
        let m = parse_model(raw, &decl(&[("x", Sort::Int)])).unwrap();
        assert_eq!(m.int("x"), Some(7));
    }

    #[test]
    fn reports_missing_and_malformed_values() {
        let d = decl(&[("x", Sort::Int)]);
        assert!(parse_model("()", &d).is_err());
        assert!(parse_model("((define-fun x () Int true))", &d).is_err());
        assert!(parse_model("((define-fun x () Bool 1))", &d).is_err());
        assert!(parse_model("((define-fun x () Int 99999999999999999999))", &d).is_err());
        assert!(parse_model("((define-fun x ((a Int)) Int a))", &d).is_err());
        assert!(parse_model("((define-fun x () Int (+ 1 2)))", &d).is_err());
    }
}
