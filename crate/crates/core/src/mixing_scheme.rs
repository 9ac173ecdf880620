//! Incentive analysis for concealment-route reward schemes.
//!
//! An attacker who splices `k` Sybils into a route of length `l` turns it into
//! a route of length `l + k`. A scheme resists the attack when neither side
//! gains by it:
//!
//! * concealer: `(k+1) * R(l+k) <= R(l)`
//! * applicant: `l * R(l+k) + T(l+k) >= l * R(l) + T(l)`
//!
//! These are checked exactly over a finite grid `1..=lmax` x `1..=kmax`. The
//! grid is a parameter: a `Pass` says nothing about lengths beyond it.
//!
//! With zero tax (`T == 0`) the two conditions already contradict each other
//! at `(l, k) = (1, 1)`, so [`impossibility_witness`] always finds a violation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Amount, LengthDistribution, RewardScheme, TabulatedScheme};
use crate::error::{Error, Result};

/// `S(l) = sum_{j=1}^{l-1} j 2^-j`, closed form `2 - (l+1) 2^(1-l)`.
pub fn s_closed(l: u32) -> Amount {
    assert!(l >= 1, "S(l) is defined for l >= 1");
    Amount::from_int(2) - Amount::from(l + 1) * Amount::pow2(1 - l as i32)
}

/// Term-by-term twin of [`s_closed`].
pub fn s_sum(l: u32) -> Amount {
    assert!(l >= 1, "S(l) is defined for l >= 1");
    (1..l)
        .map(|j| Amount::from(j) * Amount::pow2(-(j as i32)))
        .sum()
}

fn check_len(l: u32) -> Result<()> {
    if l == 0 {
        Err(Error::OutOfDomain { l, max: 0 })
    } else {
        Ok(())
    }
}

/// What an attacking concealer collects: `(k+1) * R(l+k)`.
pub fn advantage_concealer(t: &TabulatedScheme, l: u32, k: u32) -> Result<Amount> {
    check_len(l)?;
    Ok(Amount::from(k + 1) * t.reward(l + k)?)
}

/// What an attacking applicant effectively pays: `l * R(l+k) + T(l+k)`, i.e.
/// `C(l+k)` minus the `k` Sybil rewards it pockets.
pub fn advantage_applicant(t: &TabulatedScheme, l: u32, k: u32) -> Result<Amount> {
    check_len(l)?;
    Ok(Amount::from(l) * t.reward(l + k)? + t.tax(l + k)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub l: u32,
    pub k: u32,
    pub concealer_adv: Amount,
    pub applicant_cost: Amount,
}

pub fn advantage_report(t: &TabulatedScheme, l: u32, k: u32) -> Result<AdvantageReport> {
    Ok(AdvantageReport {
        l,
        k,
        concealer_adv: advantage_concealer(t, l, k)?,
        applicant_cost: advantage_applicant(t, l, k)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `lhs = (k+1) R(l+k)` exceeds `rhs = R(l)`.
    Concealer,
    /// `lhs = l R(l+k) + T(l+k)` falls below `rhs = l R(l) + T(l)`.
    Applicant,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::Concealer => "concealer",
            ViolationKind::Applicant => "applicant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub l: u32,
    pub k: u32,
    pub lhs: Amount,
    pub rhs: Amount,
}

impl Violation {
    /// Recomputes both sides from `t` and confirms the inequality fails.
    pub fn confirm(&self, t: &TabulatedScheme) -> Result<bool> {
        match self.kind {
            ViolationKind::Concealer => {
                let lhs = advantage_concealer(t, self.l, self.k)?;
                let rhs = t.reward(self.l)?.clone();
                Ok(lhs == self.lhs && rhs == self.rhs && lhs > rhs)
            }
            ViolationKind::Applicant => {
                let lhs = advantage_applicant(t, self.l, self.k)?;
                let rhs = t.cost(self.l)?;
                Ok(lhs == self.lhs && rhs == self.rhs && lhs < rhs)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Violation(Violation),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Pass => None,
            Verdict::Violation(v) => Some(v),
        }
    }
}

/// Checks both conditions on `1..=lmax` x `1..=kmax`. Reports the
/// lexicographically smallest failing `(l, k)`; if both conditions fail there,
/// the concealer one.
pub fn verify(t: &TabulatedScheme, lmax: u32, kmax: u32) -> Result<Verdict> {
    let needed = lmax + kmax;
    if needed > t.len() {
        return Err(Error::OutOfDomain {
            l: needed,
            max: t.len(),
        });
    }
    for l in 1..=lmax {
        let reward = t.reward(l)?;
        let cost = t.cost(l)?;
        for k in 1..=kmax {
            let hoard = advantage_concealer(t, l, k)?;
            if &hoard > reward {
                return Ok(Verdict::Violation(Violation {
                    kind: ViolationKind::Concealer,
                    l,
                    k,
                    lhs: hoard,
                    rhs: reward.clone(),
                }));
            }
            let pay = advantage_applicant(t, l, k)?;
            if pay < cost {
                return Ok(Verdict::Violation(Violation {
                    kind: ViolationKind::Applicant,
                    l,
                    k,
                    lhs: pay,
                    rhs: cost,
                }));
            }
        }
    }
    Ok(Verdict::Pass)
}

/// [`verify`] restricted to a single Sybil.
pub fn verify_base_case(t: &TabulatedScheme, lmax: u32) -> Result<Verdict> {
    verify(t, lmax, 1)
}

/// Searches a zero-tax scheme with rewards `r_table` for a profitable edge
/// insertion. One always exists when the table covers lengths 1 and 2.
pub fn impossibility_witness(r_table: &[Amount], lmax: u32) -> Result<Verdict> {
    if lmax == 0 {
        return Err(Error::InvalidConfig("Lmax must be >= 1".into()));
    }
    let needed = lmax as usize + 1;
    if r_table.len() < needed {
        return Err(Error::OutOfDomain {
            l: needed as u32,
            max: r_table.len() as u32,
        });
    }
    let t = TabulatedScheme::zero_tax(r_table[..needed].to_vec())?;
    verify(&t, lmax, 1)
}

/// Empirical test of k=1 sufficiency: given that the single-Sybil conditions
/// hold wherever the full grid needs them, the full grid must pass.
pub fn lemma_check(t: &TabulatedScheme, lmax: u32, kmax: u32) -> Result<bool> {
    if lmax == 0 || kmax == 0 {
        return Err(Error::InvalidConfig("Lmax and Kmax must be >= 1".into()));
    }
    if let Verdict::Violation(v) = verify_base_case(t, lmax + kmax - 1)? {
        return Err(Error::BaseCaseFails {
            kind: v.kind.as_str(),
            l: v.l,
            lhs: Box::new(v.lhs),
            rhs: Box::new(v.rhs),
        });
    }
    Ok(verify(t, lmax, kmax)?.is_pass())
}

/// Builds a table satisfying both k=1 conditions with equality slack chosen by
/// the caller: `R(l+1) = R(l)/2 * shrink[l-1]` and
/// `T(l+1) = T(l) + l (R(l) - R(l+1)) + slack[l-1]`, starting from `T(1) = 0`.
///
/// `shrink` entries must lie in `(0, 1]` and `slack` entries must be `>= 0`;
/// both must have the same length, one less than the table.
pub fn base_case_scheme(
    r1: Amount,
    shrink: &[Amount],
    slack: &[Amount],
) -> Result<TabulatedScheme> {
    if shrink.len() != slack.len() {
        return Err(Error::InvalidConfig(
            "shrink and slack lengths differ".into(),
        ));
    }
    if shrink
        .iter()
        .any(|u| !u.is_positive() || u > &Amount::one())
    {
        return Err(Error::InvalidConfig(
            "shrink factors must lie in (0, 1]".into(),
        ));
    }
    if slack.iter().any(Amount::is_negative) {
        return Err(Error::InvalidConfig("slack must be non-negative".into()));
    }
    let half = Amount::ratio(1, 2);
    let mut r = vec![r1];
    let mut t = vec![Amount::zero()];
    for (i, (u, s)) in shrink.iter().zip(slack).enumerate() {
        let l = Amount::from(i as u64 + 1);
        let next_r = &r[i] * &half * u;
        let next_t = &t[i] + l * (&r[i] - &next_r) + s;
        r.push(next_r);
        t.push(next_t);
    }
    TabulatedScheme::new(r, t)
}

/// Random scheme on `1..=lmax` (at least one entry) that passes
/// `verify_base_case(_, lmax - 1)` by construction. Deterministic in `seed`.
pub fn gen_base_case_scheme(seed: u64, lmax: u32) -> TabulatedScheme {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = lmax.max(1) as usize - 1;
    let r1 = Amount::ratio(rng.gen_range(1..=64), rng.gen_range(1..=8));
    let shrink: Vec<Amount> = (0..n)
        .map(|_| {
            let den = rng.gen_range(1..=8);
            Amount::ratio(rng.gen_range(1..=den), den)
        })
        .collect();
    let slack: Vec<Amount> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Amount::zero()
            } else {
                Amount::ratio(rng.gen_range(0..=16), rng.gen_range(1..=8))
            }
        })
        .collect();
    base_case_scheme(r1, &shrink, &slack).expect("generated parameters are in range")
}

/// The `T0` that makes the expected tax zero under `dist`, so that on average
/// no credits enter or leave the system. `scheme.t0` is ignored.
pub fn neutral_t0(scheme: &RewardScheme, dist: &LengthDistribution) -> Result<Amount> {
    let max = dist.max_len();
    if max > scheme.lmax {
        return Err(Error::InvalidPmf(format!(
            "length {max} exceeds Lmax {}",
            scheme.lmax
        )));
    }
    let mut base = scheme.clone();
    base.t0 = Amount::zero();
    let t = crate::domain::materialize(&base, max.max(1))?;
    let expected = dist.expect(|l| t.tax(l).cloned())?;
    Ok(-expected)
}
