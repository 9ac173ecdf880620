//! Ledger-level simulation of route settlements.
//!
//! Each delivery debits the applicant `C(l)` and credits every concealer
//! `R(l)`, so the system total moves by `-T(l)`. Balances may go negative;
//! there is no solvency rule.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{
    Amount, AttackSpec, Attacker, LengthDistribution, NodeId, Route, TabulatedScheme,
};
use crate::error::{Error, Result};
use crate::mixing_scheme::{advantage_report, AdvantageReport};

/// Name recorded in every [`SimReport`].
pub const RNG_NAME: &str = "ChaCha8Rng/seed_from_u64";

pub const DEFAULT_POOL_SIZE: u64 = 100;

/// Upper bound on supply-trace points.
pub const TRACE_POINTS: u64 = 1000;

/// Per-node credit balances with a cached total.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ledger {
    balances: BTreeMap<NodeId, Amount>,
    total: Amount,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn balance(&self, id: NodeId) -> Amount {
        self.balances.get(&id).cloned().unwrap_or_else(Amount::zero)
    }

    pub fn total(&self) -> &Amount {
        &self.total
    }

    pub fn balances(&self) -> &BTreeMap<NodeId, Amount> {
        &self.balances
    }

    pub fn credit(&mut self, id: NodeId, amount: &Amount) {
        *self.balances.entry(id).or_default() += amount;
        self.total += amount;
    }

    pub fn debit(&mut self, id: NodeId, amount: &Amount) {
        *self.balances.entry(id).or_default() -= amount;
        self.total -= amount;
    }

    /// Recomputes the total from scratch.
    pub fn audit(&self) -> bool {
        self.balances.values().sum::<Amount>() == self.total
    }
}

/// Honest settlement of `route`.
pub fn apply_delivery(ledger: &mut Ledger, route: &Route, t: &TabulatedScheme) -> Result<()> {
    let l = route.len();
    let reward = t.reward(l)?.clone();
    let cost = t.cost(l)?;
    ledger.debit(route.applicant(), &cost);
    for &c in route.concealers() {
        ledger.credit(c, &reward);
    }
    Ok(())
}

/// Settles the bogus route produced by `atk`. Every Sybil's reward lands on
/// the attacker's balance; honest concealers get `R(l+k)`.
pub fn apply_attack(
    ledger: &mut Ledger,
    route: &Route,
    atk: &AttackSpec,
    t: &TabulatedScheme,
) -> Result<AdvantageReport> {
    let bogus = atk.bogus_route(route)?;
    let attacker = atk.attacker_id(route)?;
    let report = advantage_report(t, route.len(), atk.k())?;

    let lb = bogus.len();
    let reward = t.reward(lb)?.clone();
    let cost = t.cost(lb)?;
    ledger.debit(bogus.applicant(), &cost);
    for c in bogus.concealers() {
        let payee = if atk.sybils.contains(c) { attacker } else { *c };
        ledger.credit(payee, &reward);
    }
    Ok(report)
}

/// Expected change of the system total per message, `-E[T(L)]`.
pub fn expected_drift(t: &TabulatedScheme, dist: &LengthDistribution) -> Result<Amount> {
    Ok(-dist.expect(|l| t.tax(l).cloned())?)
}

/// `Var[T(L)]`, exactly.
pub fn tax_variance(t: &TabulatedScheme, dist: &LengthDistribution) -> Result<Amount> {
    let mean = dist.expect(|l| t.tax(l).cloned())?;
    dist.expect(|l| {
        let d = t.tax(l)? - &mean;
        Ok(&d * &d)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    #[default]
    None,
    /// A random concealer on every route inserts `k` Sybils.
    Concealer,
    /// The applicant of every route inserts `k` Sybils.
    Applicant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct AttackPolicy {
    pub policy: PolicyKind,
    #[serde(default)]
    pub k: u32,
}

impl AttackPolicy {
    pub fn honest() -> Self {
        Self::default()
    }

    fn extra_len(&self) -> u32 {
        match self.policy {
            PolicyKind::None => 0,
            _ => self.k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub scheme: TabulatedScheme,
    pub dist: LengthDistribution,
    pub messages: u64,
    pub attack: AttackPolicy,
    pub seed: u64,
    pub pool_size: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.messages == 0 {
            return Err(Error::InvalidConfig("messages must be >= 1".into()));
        }
        let max_len = self.dist.max_len();
        let settled = max_len + self.attack.extra_len();
        if settled > self.scheme.len() {
            return Err(Error::InvalidConfig(format!(
                "routes of length {settled} exceed the scheme table ({})",
                self.scheme.len()
            )));
        }
        if self.pool_size < u64::from(max_len) + 1 {
            return Err(Error::InvalidConfig(format!(
                "node pool of {} cannot staff a route of length {max_len}",
                self.pool_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePoint {
    pub message_index: u64,
    pub total: Amount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimReport {
    pub rng: String,
    pub seed: u64,
    pub messages: u64,
    pub initial_total: Amount,
    pub final_total: Amount,
    pub drift_per_message: Amount,
    pub supply_trace: Vec<TracePoint>,
    pub per_node: BTreeMap<NodeId, Amount>,
}

/// Exact sampler for a rational pmf: integer weights over a common
/// denominator.
struct LengthSampler {
    lengths: Vec<u32>,
    cumulative: Vec<u64>,
    denom: u64,
}

impl LengthSampler {
    fn new(dist: &LengthDistribution) -> Result<Self> {
        let denom = dist
            .entries()
            .iter()
            .fold(BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()));
        let too_fine = || Error::InvalidConfig("pmf denominators too large to sample".into());
        let denom_u64 = denom.to_u64().ok_or_else(too_fine)?;
        let mut lengths = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0u64;
        for (l, p) in dist.entries() {
            let w = (p.numer() * (&denom / p.denom()))
                .to_u64()
                .ok_or_else(too_fine)?;
            acc += w;
            lengths.push(*l);
            cumulative.push(acc);
        }
        Ok(LengthSampler {
            lengths,
            cumulative,
            denom: denom_u64,
        })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        let x = rng.gen_range(0..self.denom);
        let i = self.cumulative.partition_point(|&c| c <= x);
        self.lengths[i]
    }
}

/// Runs `messages` settlements. Route lengths come from `dist`, nodes from
/// `0..pool_size`, Sybil ids from `pool_size..`. Same config, same report.
pub fn simulate(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sampler = LengthSampler::new(&config.dist)?;
    let sybils: Vec<NodeId> = (0..u64::from(config.attack.k))
        .map(|i| NodeId(config.pool_size + i))
        .collect();

    let mut ledger = Ledger::new();
    let initial_total = ledger.total().clone();
    let step = config.messages.div_ceil(TRACE_POINTS);
    let mut supply_trace = vec![TracePoint {
        message_index: 0,
        total: initial_total.clone(),
    }];

    for i in 1..=config.messages {
        let l = sampler.sample(&mut rng);
        let picked = index::sample(&mut rng, config.pool_size as usize, l as usize + 1);
        let mut ids = picked.iter().map(|x| NodeId(x as u64));
        let applicant = ids.next().expect("sampled l + 1 ids");
        let route = Route::new(applicant, ids.collect())?;

        match config.attack.policy {
            PolicyKind::None => apply_delivery(&mut ledger, &route, &config.scheme)?,
            PolicyKind::Concealer => {
                let pos = rng.gen_range(1..=l as usize);
                let atk = AttackSpec::new(Attacker::Concealer(pos), sybils.clone());
                apply_attack(&mut ledger, &route, &atk, &config.scheme)?;
            }
            PolicyKind::Applicant => {
                let atk = AttackSpec::new(Attacker::Applicant, sybils.clone());
                apply_attack(&mut ledger, &route, &atk, &config.scheme)?;
            }
        }

        if i % step == 0 || i == config.messages {
            supply_trace.push(TracePoint {
                message_index: i,
                total: ledger.total().clone(),
            });
        }
    }

    let final_total = ledger.total().clone();
    let drift_per_message = (&final_total - &initial_total) / Amount::from(config.messages);
    Ok(SimReport {
        rng: RNG_NAME.to_string(),
        seed: config.seed,
        messages: config.messages,
        initial_total,
        final_total,
        drift_per_message,
        supply_trace,
        per_node: ledger.balances,
    })
}
