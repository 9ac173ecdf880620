//! Reward-and-tax schemes for concealment routes.
//!
//! A [`RewardScheme`] is the parametric form `(R0, T0, rho, tau)`; it is turned
//! into explicit per-length tables by [`materialize`]. Most of the analysis
//! (verification, witness search, the ledger) works on a [`TabulatedScheme`],
//! which can also be built directly from arbitrary tables.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::domain::Amount;
use crate::error::{Error, Result};
use crate::mixing_scheme::s_closed;

pub const DEFAULT_LMAX: u32 = 32;
pub const DEFAULT_KMAX: u32 = 32;

/// A function from route length (l >= 1) to an amount.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FnSpec {
    /// `value` for every l.
    Const { value: Amount },
    /// `c * base^(l-1)`.
    ExpDecay { c: Amount, base: Amount },
    /// Piecewise constant: `steps` holds `(from_l, value)` pairs with strictly
    /// increasing `from_l`, the first one at 1.
    Step { steps: Vec<(u32, Amount)> },
    /// `values[l-1]`; lengths past the end repeat the last entry.
    Table { values: Vec<Amount> },
}

impl FnSpec {
    pub fn constant(value: impl Into<Amount>) -> Self {
        FnSpec::Const {
            value: value.into(),
        }
    }

    pub fn table(values: Vec<Amount>) -> Self {
        FnSpec::Table { values }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FnSpec::Const { .. } => Ok(()),
            FnSpec::ExpDecay { base, .. } => {
                if base.is_negative() {
                    Err(Error::InvalidConfig(format!(
                        "negative exp_decay base {base}"
                    )))
                } else {
                    Ok(())
                }
            }
            FnSpec::Step { steps } => {
                match steps.first() {
                    Some((1, _)) => {}
                    _ => return Err(Error::InvalidConfig("step table must start at l=1".into())),
                }
                if steps.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::InvalidConfig(
                        "step breakpoints must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            FnSpec::Table { values } => {
                if values.is_empty() {
                    Err(Error::InvalidConfig("empty table".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Value at length `l` (>= 1). Assumes [`FnSpec::validate`] passed.
    pub fn eval(&self, l: u32) -> Amount {
        debug_assert!(l >= 1);
        match self {
            FnSpec::Const { value } => value.clone(),
            FnSpec::ExpDecay { c, base } => {
                let mut v = c.clone();
                for _ in 1..l {
                    v = v * base;
                }
                v
            }
            FnSpec::Step { steps } => steps
                .iter()
                .take_while(|(from, _)| *from <= l)
                .last()
                .map(|(_, v)| v.clone())
                .unwrap_or_else(Amount::zero),
            FnSpec::Table { values } => {
                let idx = (l as usize - 1).min(values.len().saturating_sub(1));
                values.get(idx).cloned().unwrap_or_else(Amount::zero)
            }
        }
    }
}

/// Parametric scheme: `R(l) = R0 * 2^(1-l) * rho(l)` and
/// `T(l) = T0 + R0 * S(l) + sum_{i<l} [rho(i) - rho(l)] + tau(l)`.
///
/// `lmax` bounds the route lengths the scheme is meant for; `kmax` bounds the
/// number of Sybils checked. Tables are materialized up to `lmax + kmax`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardScheme {
    #[serde(rename = "R0")]
    pub r0: Amount,
    #[serde(rename = "T0", default)]
    pub t0: Amount,
    pub rho: FnSpec,
    pub tau: FnSpec,
    #[serde(rename = "Lmax", default = "default_lmax")]
    pub lmax: u32,
    #[serde(rename = "Kmax", default = "default_kmax")]
    pub kmax: u32,
}

fn default_lmax() -> u32 {
    DEFAULT_LMAX
}

fn default_kmax() -> u32 {
    DEFAULT_KMAX
}

impl RewardScheme {
    /// `rho == 1`, `tau == 0`: the tight halving family.
    pub fn halving(r0: impl Into<Amount>, t0: impl Into<Amount>) -> Self {
        RewardScheme {
            r0: r0.into(),
            t0: t0.into(),
            rho: FnSpec::constant(1i64),
            tau: FnSpec::constant(0i64),
            lmax: DEFAULT_LMAX,
            kmax: DEFAULT_KMAX,
        }
    }

    pub fn capacity(&self) -> u32 {
        self.lmax.saturating_add(self.kmax)
    }

    /// Checks the scheme's own invariants on `[1, lmax]`.
    pub fn validate(&self) -> Result<()> {
        self.check_params_on(self.lmax)
    }

    fn check_params_on(&self, upto: u32) -> Result<()> {
        if !self.r0.is_positive() {
            return Err(Error::InvalidConfig(format!(
                "R0 must be positive, got {}",
                self.r0
            )));
        }
        if self.lmax == 0 || self.kmax == 0 {
            return Err(Error::InvalidConfig("Lmax and Kmax must be >= 1".into()));
        }
        self.rho.validate()?;
        self.tau.validate()?;
        let mut prev_rho: Option<Amount> = None;
        let mut prev_tau: Option<Amount> = None;
        for l in 1..=upto {
            let rho = self.rho.eval(l);
            let tau = self.tau.eval(l);
            if !rho.is_positive() {
                return Err(Error::NonPositiveReward(l));
            }
            if tau.is_negative() {
                return Err(Error::NegativeValue { func: "tau", at: l });
            }
            if prev_rho.as_ref().is_some_and(|p| &rho > p) {
                return Err(Error::MonotonicityViolation {
                    func: "rho increases",
                    at: l,
                });
            }
            if prev_tau.as_ref().is_some_and(|p| &tau < p) {
                return Err(Error::MonotonicityViolation {
                    func: "tau decreases",
                    at: l,
                });
            }
            prev_rho = Some(rho);
            prev_tau = Some(tau);
        }
        Ok(())
    }
}

/// Builds the exact `R`/`T` tables for lengths `1..=upto`.
///
/// The tax formula is evaluated literally, including the unweighted
/// `sum_{i<l} [rho(i) - rho(l)]` term. Whether the result actually resists
/// edge insertion is for [`crate::mixing_scheme::verify`] to decide; for
/// `rho` constant above 1 it does not.
pub fn materialize(scheme: &RewardScheme, upto: u32) -> Result<TabulatedScheme> {
    if upto == 0 || upto > scheme.capacity() {
        return Err(Error::OutOfDomain {
            l: upto,
            max: scheme.capacity(),
        });
    }
    scheme.check_params_on(upto.max(scheme.lmax))?;

    let mut r = Vec::with_capacity(upto as usize);
    let mut t = Vec::with_capacity(upto as usize);
    // running sum of rho(1..l-1)
    let mut rho_prefix = Amount::zero();
    for l in 1..=upto {
        let rho = scheme.rho.eval(l);
        let tau = scheme.tau.eval(l);
        r.push(&scheme.r0 * Amount::pow2(1 - l as i32) * &rho);
        let spread = &rho_prefix - Amount::from(l - 1) * &rho;
        t.push(&scheme.t0 + &scheme.r0 * s_closed(l) + spread + tau);
        rho_prefix += rho;
    }
    TabulatedScheme::new(r, t)
}

/// Explicit reward and tax tables indexed by route length `1..=len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTables")]
pub struct TabulatedScheme {
    #[serde(rename = "R")]
    r: Vec<Amount>,
    #[serde(rename = "T")]
    t: Vec<Amount>,
}

#[derive(Deserialize)]
struct RawTables {
    #[serde(rename = "R")]
    r: Vec<Amount>,
    #[serde(rename = "T", default)]
    t: Option<Vec<Amount>>,
}

impl TryFrom<RawTables> for TabulatedScheme {
    type Error = Error;

    fn try_from(raw: RawTables) -> Result<Self> {
        match raw.t {
            Some(t) => TabulatedScheme::new(raw.r, t),
            None => TabulatedScheme::zero_tax(raw.r),
        }
    }
}

impl TabulatedScheme {
    pub fn new(r: Vec<Amount>, t: Vec<Amount>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::Empty("reward table"));
        }
        if r.len() != t.len() {
            return Err(Error::InvalidConfig(format!(
                "R has {} entries but T has {}",
                r.len(),
                t.len()
            )));
        }
        if let Some(i) = r.iter().position(|x| !x.is_positive()) {
            return Err(Error::NonPositiveReward(i as u32 + 1));
        }
        Ok(TabulatedScheme { r, t })
    }

    /// Zero-sum scheme: `T == 0`.
    pub fn zero_tax(r: Vec<Amount>) -> Result<Self> {
        let t = vec![Amount::zero(); r.len()];
        Self::new(r, t)
    }

    /// Largest tabulated length.
    pub fn len(&self) -> u32 {
        self.r.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn rewards(&self) -> &[Amount] {
        &self.r
    }

    pub fn taxes(&self) -> &[Amount] {
        &self.t
    }

    pub fn is_zero_sum(&self) -> bool {
        self.t.iter().all(Amount::is_zero)
    }

    fn index(&self, l: u32) -> Result<usize> {
        if l == 0 || l > self.len() {
            Err(Error::OutOfDomain { l, max: self.len() })
        } else {
            Ok(l as usize - 1)
        }
    }

    /// Per-concealer reward `R(l)`.
    pub fn reward(&self, l: u32) -> Result<&Amount> {
        self.index(l).map(|i| &self.r[i])
    }

    /// Extra applicant charge `T(l)` on top of the rewards.
    pub fn tax(&self, l: u32) -> Result<&Amount> {
        self.index(l).map(|i| &self.t[i])
    }

    /// `C(l) = l * R(l) + T(l)`.
    pub fn cost(&self, l: u32) -> Result<Amount> {
        let i = self.index(l)?;
        Ok(Amount::from(l) * &self.r[i] + &self.t[i])
    }

    /// Same rewards, every tax shifted by `delta`.
    pub fn shift_tax(&self, delta: &Amount) -> TabulatedScheme {
        TabulatedScheme {
            r: self.r.clone(),
            t: self.t.iter().map(|x| x + delta).collect(),
        }
    }
}

/// Exact probability mass function over route lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u32, Amount)>", into = "Vec<(u32, Amount)>")]
pub struct LengthDistribution {
    pmf: Vec<(u32, Amount)>,
}

impl TryFrom<Vec<(u32, Amount)>> for LengthDistribution {
    type Error = Error;

    fn try_from(pmf: Vec<(u32, Amount)>) -> Result<Self> {
        LengthDistribution::new(pmf)
    }
}

impl From<LengthDistribution> for Vec<(u32, Amount)> {
    fn from(d: LengthDistribution) -> Self {
        d.pmf
    }
}

impl LengthDistribution {
    pub fn new(pmf: Vec<(u32, Amount)>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::InvalidPmf("empty".into()));
        }
        let mut seen = BTreeSet::new();
        for (l, p) in &pmf {
            if *l == 0 {
                return Err(Error::InvalidPmf("length 0".into()));
            }
            if !seen.insert(*l) {
                return Err(Error::InvalidPmf(format!("length {l} listed twice")));
            }
            if p.is_negative() {
                return Err(Error::InvalidPmf(format!(
                    "negative probability {p} at l={l}"
                )));
            }
        }
        let total: Amount = pmf.iter().map(|(_, p)| p).sum();
        if total != Amount::one() {
            return Err(Error::InvalidPmf(format!("probabilities sum to {total}")));
        }
        Ok(LengthDistribution { pmf })
    }

    pub fn degenerate(l: u32) -> Result<Self> {
        Self::new(vec![(l, Amount::one())])
    }

    /// Equal mass on every listed length.
    pub fn uniform(lengths: &[u32]) -> Result<Self> {
        let n = lengths.len() as i64;
        if n == 0 {
            return Err(Error::InvalidPmf("empty".into()));
        }
        Self::new(lengths.iter().map(|&l| (l, Amount::ratio(1, n))).collect())
    }

    pub fn entries(&self) -> &[(u32, Amount)] {
        &self.pmf
    }

    pub fn max_len(&self) -> u32 {
        self.pmf.iter().map(|(l, _)| *l).max().unwrap_or(0)
    }

    /// `E[f(L)]`, exactly.
    pub fn expect<F>(&self, mut f: F) -> Result<Amount>
    where
        F: FnMut(u32) -> Result<Amount>,
    {
        let mut acc = Amount::zero();
        for (l, p) in &self.pmf {
            acc += p * f(*l)?;
        }
        Ok(acc)
    }
}
