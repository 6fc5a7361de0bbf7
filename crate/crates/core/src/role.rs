//! The eight-role reaction scheme.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A reaction role. Declaration order is the canonical order used when
/// iterating roles, serializing reactions, and printing reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Product,
    Reactant,
    Catalyst,
    Solvent,
    Temperature,
    Time,
    ReactionType,
    Yield,
}

/// Which placeholder kind carries a role's argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlotKind {
    Chem,
    Num,
    /// Reaction types are words, not masked entities.
    Lexicon,
}

impl Role {
    pub const ALL: [Role; 8] = [
        Role::Product,
        Role::Reactant,
        Role::Catalyst,
        Role::Solvent,
        Role::Temperature,
        Role::Time,
        Role::ReactionType,
        Role::Yield,
    ];

    /// Roles covered by patent-derived supervision.
    pub const KNOWLEDGE: [Role; 4] = [Role::Product, Role::Reactant, Role::Catalyst, Role::Solvent];

    /// Default roles for pattern enrichment.
    pub const LINGUISTIC: [Role; 4] = [Role::Product, Role::Yield, Role::Temperature, Role::Time];

    pub const fn as_str(self) -> &'static str {
        match self {
            Role::Product => "product",
            Role::Reactant => "reactant",
            Role::Catalyst => "catalyst",
            Role::Solvent => "solvent",
            Role::Temperature => "temperature",
            Role::Time => "time",
            Role::ReactionType => "reaction_type",
            Role::Yield => "yield",
        }
    }

    /// Noun used inside the conditioned role question.
    pub const fn noun(self) -> &'static str {
        match self {
            Role::Product => "product",
            Role::Reactant => "reactant",
            Role::Catalyst => "catalyst",
            Role::Solvent => "solvent",
            Role::Temperature => "temperature",
            Role::Time => "time",
            Role::ReactionType => "reaction type",
            Role::Yield => "yield",
        }
    }

    pub const fn slot_kind(self) -> SlotKind {
        match self {
            Role::Product | Role::Reactant | Role::Catalyst | Role::Solvent => SlotKind::Chem,
            Role::Temperature | Role::Time | Role::Yield => SlotKind::Num,
            Role::ReactionType => SlotKind::Lexicon,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown reaction role `{0}`")]
pub struct UnknownRole(pub String);

impl FromStr for Role {
    type Err = UnknownRole;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        let role = match key.as_str() {
            "product" | "products" => Role::Product,
            "reactant" | "reactants" => Role::Reactant,
            "catalyst" | "catalysts" => Role::Catalyst,
            "solvent" | "solvents" => Role::Solvent,
            "temperature" => Role::Temperature,
            "time" => Role::Time,
            "reaction_type" => Role::ReactionType,
            "yield" => Role::Yield,
            _ => return Err(UnknownRole(s.to_string())),
        };
        Ok(role)
    }
}
