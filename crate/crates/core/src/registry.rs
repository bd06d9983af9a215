//! Name-keyed registries for interchangeable strategies.
//!
//! Every family of variants in the crate (toy games, parametric generators,
//! operator constructors) sits behind a trait object or factory and is
//! registered under a stable name. The CLI resolves `--game`, `--generator`
//! and `--operator` flags through these tables.

use crate::error::{Error, Result};

/// Ordered table of named strategies.
pub struct Registry<T> {
    kind: &'static str,
    entries: Vec<(&'static str, T)>,
}

impl<T> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    pub fn register(&mut self, name: &'static str, entry: T) -> Result<&mut Self> {
        if self.entries.iter().any(|(n, _)| *n == name) {
            return Err(Error::DuplicateStrategy {
                kind: self.kind,
                name: name.to_string(),
            });
        }
        self.entries.push((name, entry));
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, e)| e)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &T)> {
        self.entries.iter().map(|(n, e)| (*n, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
