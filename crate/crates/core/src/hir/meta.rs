use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::typecheck::{OwnerSet, Scheme};

/// Ownership metadata carried by every node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Meta {
    /// A value encrypted under the provider's key.
    Enc {
        provider: OwnerSet,
    },
    /// A value secret-shared among `players`.
    Shared {
        provider: OwnerSet,
        players: OwnerSet,
        observers: OwnerSet,
        threshold: u32,
    },
    Plain,
}

impl Meta {
    pub fn provider(&self) -> Option<&OwnerSet> {
        match self {
            Meta::Enc { provider } | Meta::Shared { provider, .. } => Some(provider),
            Meta::Plain => None,
        }
    }

    pub fn is_plain(&self) -> bool {
        matches!(self, Meta::Plain)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShareMismatch {
    #[error("players differ: {0} vs {1}")]
    Players(OwnerSet, OwnerSet),
    #[error("thresholds differ: {0} vs {1}")]
    Threshold(u32, u32),
    #[error("additive sharing requires players.size == threshold ({0} players, threshold {1})")]
    NotFullThreshold(usize, u32),
    #[error("cannot combine {0} metadata with {1} metadata")]
    Incompatible(&'static str, &'static str),
}

fn variant(m: &Meta) -> &'static str {
    match m {
        Meta::Enc { .. } => "Enc",
        Meta::Shared { .. } => "Shared",
        Meta::Plain => "Plain",
    }
}

/// Metadata of a gate whose operands are both shared.
pub fn combine_share_meta(a: &Meta, b: &Meta, scheme: Scheme) -> Result<Meta, ShareMismatch> {
    let (
        Meta::Shared {
            provider: pa,
            players: la,
            observers: oa,
            threshold: ta,
        },
        Meta::Shared {
            provider: pb,
            players: lb,
            observers: ob,
            threshold: tb,
        },
    ) = (a, b)
    else {
        return Err(ShareMismatch::Incompatible(variant(a), variant(b)));
    };
    if la != lb {
        return Err(ShareMismatch::Players(la.clone(), lb.clone()));
    }
    if ta != tb {
        return Err(ShareMismatch::Threshold(*ta, *tb));
    }
    let observers = match scheme {
        Scheme::AdditiveShare(_) => {
            if la.len() != *ta as usize {
                return Err(ShareMismatch::NotFullThreshold(la.len(), *ta));
            }
            oa.intersection(ob)
        }
        Scheme::Generic | Scheme::Tfhe => oa.union(ob),
    };
    Ok(Meta::Shared {
        provider: pa.union(pb),
        players: la.clone(),
        observers,
        threshold: *ta,
    })
}

/// Metadata of a gate from its operands' metadata. Plain operands are neutral.
pub fn combine_meta(a: &Meta, b: &Meta, scheme: Scheme) -> Result<Meta, ShareMismatch> {
    match (a, b) {
        (Meta::Plain, m) | (m, Meta::Plain) => Ok(m.clone()),
        (Meta::Enc { provider: pa }, Meta::Enc { provider: pb }) => Ok(Meta::Enc {
            provider: pa.union(pb),
        }),
        (Meta::Shared { .. }, Meta::Shared { .. }) => combine_share_meta(a, b, scheme),
        _ => Err(ShareMismatch::Incompatible(variant(a), variant(b))),
    }
}
