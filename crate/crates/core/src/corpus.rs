//! The bundled example files: small categories and monads on them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{CategorySpec, FinCategory, DEFAULT_MORPHISM_CAP};
use crate::monad::Monad;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Category,
    Monad,
}

#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub kind: Kind,
    pub summary: &'static str,
    pub text: &'static str,
}

macro_rules! entry {
    ($name:literal, $kind:ident, $summary:literal) => {
        Entry {
            name: $name,
            kind: Kind::$kind,
            summary: $summary,
            text: include_str!(concat!("../corpus/", $name, ".json")),
        }
    };
}

pub const ENTRIES: &[Entry] = &[
    entry!("chain2", Category, "the chain a < b"),
    entry!("chain3", Category, "the chain a < b < c"),
    entry!("diamond", Category, "the lattice bot < x, y < top"),
    entry!("discrete2", Category, "two objects, no arrows"),
    entry!(
        "bz2",
        Category,
        "the group of order two as a one-object category"
    ),
    entry!("identity-chain2", Monad, "identity monad on chain2"),
    entry!("identity-diamond", Monad, "identity monad on the diamond"),
    entry!("identity-bz2", Monad, "identity monad on BZ2"),
    entry!("chain-closure", Monad, "closure a -> b on chain3"),
    entry!(
        "diamond-closure",
        Monad,
        "closure y -> top on the diamond; does not preserve x ^ y"
    ),
    entry!(
        "chain4-closure",
        Monad,
        "closure a -> b, c -> d on a four-element chain"
    ),
    entry!(
        "grid6-closure",
        Monad,
        "projection (i,j) -> (1,j) on the grid [1]x[2]"
    ),
    entry!(
        "z2-twist",
        Monad,
        "identity functor on BZ2 with unit and multiplication g"
    ),
];

fn stem(name: &str) -> &str {
    let base = name.rsplit(['/', '\\']).next().unwrap_or(name);
    base.strip_suffix(".json").unwrap_or(base)
}

pub fn entry(name: &str) -> Option<&'static Entry> {
    let s = stem(name);
    ENTRIES.iter().find(|e| e.name == s)
}

/// The text of a bundled file, by name with or without `.json`.
pub fn get(name: &str) -> Option<&'static str> {
    entry(name).map(|e| e.text)
}

pub fn category(name: &str) -> Result<FinCategory> {
    let e = entry(name)
        .filter(|e| e.kind == Kind::Category)
        .ok_or_else(|| Error::Index(format!("no bundled category {name}")))?;
    let spec: CategorySpec =
        serde_json::from_str(e.text).map_err(|err| Error::Schema(err.to_string()))?;
    spec.build(DEFAULT_MORPHISM_CAP)
}

pub fn monad(name: &str) -> Result<Arc<Monad>> {
    let e = entry(name)
        .filter(|e| e.kind == Kind::Monad)
        .ok_or_else(|| Error::Index(format!("no bundled monad {name}")))?;
    Ok(Arc::new(Monad::from_json_str(
        e.text,
        None,
        DEFAULT_MORPHISM_CAP,
    )?))
}

pub fn monads() -> impl Iterator<Item = &'static Entry> {
    ENTRIES.iter().filter(|e| e.kind == Kind::Monad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn everything_loads() {
        for e in ENTRIES {
            match e.kind {
                Kind::Category => assert!(category(e.name).unwrap().validate().valid, "{}", e.name),
                Kind::Monad => assert!(monad(e.name).unwrap().check_laws().valid, "{}", e.name),
            }
        }
    }

    #[test]
    fn fixed_points() {
        for (name, n) in [
            ("chain-closure", 2),
            ("diamond-closure", 3),
            ("chain4-closure", 2),
            ("grid6-closure", 3),
            ("z2-twist", 1),
        ] {
            assert_eq!(
                monad(name)
                    .unwrap()
                    .em_category()
                    .unwrap()
                    .category
                    .object_count(),
                n,
                "{name}"
            );
        }
    }
}
