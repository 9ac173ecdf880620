//! JSON shapes read and written by the command-line tool.

use serde::{Deserialize, Serialize};

use crate::domain::{Amount, LengthDistribution, MAInstance, RewardScheme, TabulatedScheme};
use crate::econ_sim::AttackPolicy;
use crate::merge_avoidance::MABounds;

/// A scheme given either parametrically or as explicit tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemeSource {
    Params(Box<RewardScheme>),
    Tables(TabulatedScheme),
}

/// A pmf given bare or wrapped as `{"length_pmf": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PmfFile {
    Bare(LengthDistribution),
    Wrapped { length_pmf: LengthDistribution },
}

impl PmfFile {
    pub fn into_dist(self) -> LengthDistribution {
        match self {
            PmfFile::Bare(d) | PmfFile::Wrapped { length_pmf: d } => d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimFile {
    pub scheme: SchemeSource,
    pub length_pmf: LengthDistribution,
    pub messages: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub attacks: AttackPolicy,
    #[serde(default)]
    pub pool_size: Option<u64>,
}

/// Raw reward table for the zero-sum witness search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardTableFile {
    #[serde(rename = "R")]
    pub r: Vec<Amount>,
    #[serde(rename = "Lmax", default)]
    pub lmax: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleTargetOutput {
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiTargetOutput {
    pub solver: String,
    pub tx_count: usize,
    pub m: Vec<Vec<u64>>,
    pub bounds: (usize, usize),
}

impl MultiTargetOutput {
    pub fn new(solver: &str, m: Vec<Vec<u64>>, tx_count: usize, b: MABounds) -> Self {
        MultiTargetOutput {
            solver: solver.to_string(),
            tx_count,
            m,
            bounds: (b.lower, b.upper),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReduceOutput {
    pub instance: MAInstance,
    pub has_partition: bool,
}

/// Completed scheme plus its tables. Re-reads as a plain scheme config.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignOutput {
    #[serde(flatten)]
    pub scheme: RewardScheme,
    pub expected_drift: Amount,
    pub tables: TabulatedScheme,
}
