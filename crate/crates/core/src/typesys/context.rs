use crate::logic::Predicate;

use super::types::{BaseType, RefinedType};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Bind { name: String, ty: RefinedType },
    Path(Predicate),
}

/// Ordered bindings and path conditions. Later entries may refer to earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingContext {
    entries: Vec<Entry>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, ty: RefinedType) {
        self.entries.push(Entry::Bind {
            name: name.into(),
            ty,
        });
    }

    pub fn assume(&mut self, p: Predicate) {
        self.entries.push(Entry::Path(p));
    }

    pub fn lookup(&self, name: &str) -> Option<&RefinedType> {
        self.entries.iter().rev().find_map(|e| match e {
            Entry::Bind { name: n, ty } if n == name => Some(ty),
            _ => None,
        })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&str, &RefinedType)> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Bind { name, ty } => Some((name.as_str(), ty)),
            Entry::Path(_) => None,
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.bindings().map(|(n, _)| n)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn truncate(&mut self, len: usize) {
        self.entries.truncate(len);
    }

    /// Declarations of every base-typed binding and, in context order, the
    /// refinements and path conditions they contribute.
    pub fn hypotheses(&self) -> (Vec<(String, BaseType)>, Vec<Predicate>) {
        let mut decls: Vec<(String, BaseType)> = Vec::new();
        let mut facts = Vec::new();
        for e in &self.entries {
            match e {
                Entry::Bind { name, ty } => {
                    let Some(base) = ty.base_type() else { continue };
                    if let Some(slot) = decls.iter_mut().find(|(n, _)| n == name) {
                        slot.1 = base;
                    } else {
                        decls.push((name.clone(), base));
                    }
                    let fact = ty.fact_about(name).expect("base type");
                    if !fact.is_true() {
                        facts.push(fact);
                    }
                }
                Entry::Path(p) => {
                    if !p.is_true() {
                        facts.push(p.clone());
                    }
                }
            }
        }
        (decls, facts)
    }
}
