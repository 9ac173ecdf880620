use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque node identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Concealment route `(r_0, r_1, ..., r_l)`: the applicant followed by `l`
/// concealers. All ids distinct, `l >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    applicant: NodeId,
    concealers: Vec<NodeId>,
}

impl Route {
    pub fn new(applicant: NodeId, concealers: Vec<NodeId>) -> Result<Self> {
        if concealers.is_empty() {
            return Err(Error::InvalidRoute(
                "route needs at least one concealer".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for id in std::iter::once(&applicant).chain(&concealers) {
            if !seen.insert(*id) {
                return Err(Error::InvalidRoute(format!("node {id} appears twice")));
            }
        }
        Ok(Route {
            applicant,
            concealers,
        })
    }

    pub fn applicant(&self) -> NodeId {
        self.applicant
    }

    pub fn concealers(&self) -> &[NodeId] {
        &self.concealers
    }

    pub fn len(&self) -> u32 {
        self.concealers.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.concealers.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.applicant == id || self.concealers.contains(&id)
    }
}

/// Who forges the Sybils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attacker {
    Applicant,
    /// 1-based position of the attacking concealer on the route.
    Concealer(usize),
}

/// Edge insertion: `attacker` splices `sybils` into the route and collects
/// their rewards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub attacker: Attacker,
    pub sybils: Vec<NodeId>,
}

impl AttackSpec {
    pub fn new(attacker: Attacker, sybils: Vec<NodeId>) -> Self {
        AttackSpec { attacker, sybils }
    }

    pub fn k(&self) -> u32 {
        self.sybils.len() as u32
    }

    /// Identity of the attacker on `route`.
    pub fn attacker_id(&self, route: &Route) -> Result<NodeId> {
        match self.attacker {
            Attacker::Applicant => Ok(route.applicant()),
            Attacker::Concealer(i) if i >= 1 && i <= route.concealers.len() => {
                Ok(route.concealers[i - 1])
            }
            Attacker::Concealer(i) => Err(Error::InvalidAttack(format!(
                "concealer index {i} outside 1..={}",
                route.len()
            ))),
        }
    }

    /// The bogus route `R'`. A concealer `r_i` places the Sybils right before
    /// itself; the applicant places them right after itself.
    pub fn bogus_route(&self, route: &Route) -> Result<Route> {
        self.attacker_id(route)?;
        let mut seen = BTreeSet::new();
        for s in &self.sybils {
            if route.contains(*s) || !seen.insert(*s) {
                return Err(Error::SybilCollision(s.0));
            }
        }
        let at = match self.attacker {
            Attacker::Applicant => 0,
            Attacker::Concealer(i) => i - 1,
        };
        let mut concealers = route.concealers[..at].to_vec();
        concealers.extend_from_slice(&self.sybils);
        concealers.extend_from_slice(&route.concealers[at..]);
        Ok(Route {
            applicant: route.applicant,
            concealers,
        })
    }
}
