use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::frontend::{AtomicSyntax, PartyId};

/// A set of parties. Owner sets from source are never empty; an empty set only
/// arises as the intersection of observer sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OwnerSet(BTreeSet<PartyId>);

impl OwnerSet {
    pub fn new(parties: impl IntoIterator<Item = PartyId>) -> OwnerSet {
        OwnerSet(parties.into_iter().collect())
    }

    pub fn singleton(p: PartyId) -> OwnerSet {
        OwnerSet(BTreeSet::from([p]))
    }

    /// Parties `0..n`.
    pub fn range(n: u32) -> OwnerSet {
        OwnerSet((0..n).collect())
    }

    pub fn union(&self, other: &OwnerSet) -> OwnerSet {
        OwnerSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &OwnerSet) -> OwnerSet {
        OwnerSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &OwnerSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn contains(&self, p: PartyId) -> bool {
        self.0.contains(&p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = PartyId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_set(&self) -> &BTreeSet<PartyId> {
        &self.0
    }
}

impl From<BTreeSet<PartyId>> for OwnerSet {
    fn from(s: BTreeSet<PartyId>) -> OwnerSet {
        OwnerSet(s)
    }
}

impl fmt::Display for OwnerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", ids.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Atomic {
    Int,
    Bool,
}

impl From<AtomicSyntax> for Atomic {
    fn from(a: AtomicSyntax) -> Atomic {
        match a {
            AtomicSyntax::Int => Atomic::Int,
            AtomicSyntax::Bool => Atomic::Bool,
        }
    }
}

impl fmt::Display for Atomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Atomic::Int => "int",
            Atomic::Bool => "bool",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SecType {
    Plain(Atomic),
    Owned(Atomic, OwnerSet),
    /// Array of private ints.
    Arr(OwnerSet),
    /// Array of plaintext ints.
    PlainArr,
}

impl SecType {
    pub fn owners(&self) -> Option<&OwnerSet> {
        match self {
            SecType::Owned(_, o) | SecType::Arr(o) => Some(o),
            SecType::Plain(_) | SecType::PlainArr => None,
        }
    }

    pub fn is_plain(&self) -> bool {
        self.owners().is_none()
    }

    pub fn is_array(&self) -> bool {
        matches!(self, SecType::Arr(_) | SecType::PlainArr)
    }

    /// Element type of scalars; `None` for arrays.
    pub fn atomic(&self) -> Option<Atomic> {
        match self {
            SecType::Plain(a) | SecType::Owned(a, _) => Some(*a),
            _ => None,
        }
    }

    /// Same shape with the given owner set (`None` keeps it plaintext).
    pub fn with_owners(&self, owners: Option<OwnerSet>) -> SecType {
        match (self, owners) {
            (SecType::Plain(a) | SecType::Owned(a, _), None) => SecType::Plain(*a),
            (SecType::Plain(a) | SecType::Owned(a, _), Some(o)) => SecType::Owned(*a, o),
            (SecType::Arr(_) | SecType::PlainArr, None) => SecType::PlainArr,
            (SecType::Arr(_) | SecType::PlainArr, Some(o)) => SecType::Arr(o),
        }
    }
}

impl fmt::Display for SecType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SecType::Plain(a) => write!(f, "{a}"),
            SecType::Owned(a, o) => write!(f, "{a}@{o}"),
            SecType::Arr(o) => write!(f, "int[]@{o}"),
            SecType::PlainArr => f.write_str("int[]"),
        }
    }
}

/// Security scheme the program is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    Generic,
    Tfhe,
    /// n-out-of-n additive sharing among `n` players.
    AdditiveShare(u32),
}

/// May data owned by `o` be revealed to audience `o2`?
pub fn valid(o: &OwnerSet, o2: &OwnerSet, scheme: Scheme) -> bool {
    match scheme {
        Scheme::Generic | Scheme::AdditiveShare(_) => o.is_subset(o2),
        Scheme::Tfhe => o == o2 && o.len() == 1,
    }
}
