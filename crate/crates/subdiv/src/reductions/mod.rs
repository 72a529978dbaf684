//! Digit-level reductions for G_{1,2d}: each rule rewrites an index into a
//! smaller one with the same SG value, or decides that the value is 0.
//!
//! Indices are normalized first (same value, lowest digit R in {0, 1}) and
//! written n = R + c1 B + c2 B^2 + ... with B = 2d.

mod kernel;
mod rules;
mod verify;

pub use kernel::{build_dfao, kernel_report, Dfao, KernelReport};
pub use rules::{Reading, RuleId, RuleKind};
pub use verify::{verify_rules, LiteralReport, RuleReport, RuleStats, SubCheck};

use serde::Serialize;

use crate::engine::{build_table, GameSpec};
use crate::error::{Error, Result};

/// (3 - v) mod 3: fixes 0 and swaps 1 and 2.
pub fn sg_star(v: u8) -> u8 {
    (3 - v % 3) % 3
}

/// Same-valued representative of n with lowest base-2d digit 0 or 1. Valid
/// from the second block on.
pub fn normalize(n: u64, d: u64) -> u64 {
    let b = 2 * d;
    let r0 = n % b;
    if r0 % 2 == 1 {
        n - r0 + 1
    } else if r0 == 0 {
        n
    } else {
        n - r0 + b
    }
}

/// Case 1..4 from (R, parity of c1) of the normalized index.
pub fn classify_case(n: u64, d: u64) -> u8 {
    let m = normalize(n, d);
    let b = 2 * d;
    let (r, c1) = (m % b, (m / b) % b);
    match (r, c1 % 2) {
        (1, 1) => 1,
        (1, _) => 2,
        (_, 1) => 3,
        _ => 4,
    }
}

/// Smallest index the rules are applied to. Below it a rule can reach back
/// into the first block, where the alternation the rules rely on fails, so
/// those indices are looked up instead.
pub fn terminal_floor(d: u64) -> u64 {
    let b = 2 * d;
    let window = b + b * b + b * b * b + b * b * b * b;
    (b + (b - 2) * window).max(2 * b + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    /// Below the floor: resolved by table lookup.
    Terminal,
    /// The value is 0.
    Zero(RuleId),
    /// SG(n) = SG(to), losing `shift` base-2d digits.
    Reduce { rule: RuleId, to: u64, shift: u32 },
}

fn check_args(n: u64, d: u64) -> Result<()> {
    if d == 0 {
        return Err(Error::Config("d must be at least 1".into()));
    }
    if n == 0 || n > u64::MAX / 4 || d > 1 << 20 {
        return Err(Error::Config(format!("index {n} with d = {d} is out of the supported range")));
    }
    Ok(())
}

/// The rule that fires at n (first match in table order) and its result.
pub fn applicable_rule(n: u64, d: u64) -> Result<Step> {
    applicable_rule_with(n, d, Reading::DERIVED)
}

pub fn applicable_rule_with(n: u64, d: u64, reading: Reading) -> Result<Step> {
    check_args(n, d)?;
    if n < terminal_floor(d) && !reading.ignore_floor {
        return Ok(Step::Terminal);
    }
    let view = rules::View::new(normalize(n, d), d);
    let rule = RuleId::all()
        .into_iter()
        .find(|&r| view.guard(r, reading))
        .ok_or_else(|| Error::Internal(format!("no reduction rule matches n = {n}, d = {d}")))?;
    Ok(view.apply(rule, reading))
}

/// Whether the explicit guard of `rule` holds at n.
pub fn guard_matches(rule: RuleId, n: u64, d: u64, reading: Reading) -> bool {
    if check_args(n, d).is_err() || (n < terminal_floor(d) && !reading.ignore_floor) {
        return false;
    }
    rules::View::new(normalize(n, d), d).guard(rule, reading)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub rule: RuleId,
    pub from: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub n: u64,
    pub d: u64,
    pub steps: Vec<ChainStep>,
    /// Index looked up below the floor, if the chain ended there.
    pub terminal: Option<u64>,
    pub value: u8,
}

/// Applies rules until the index drops below the floor or a rule decides 0.
pub fn reduce_to_base(n: u64, d: u64) -> Result<Chain> {
    check_args(n, d)?;
    let mut steps = Vec::new();
    let mut cur = n;
    loop {
        match applicable_rule(cur, d)? {
            Step::Terminal => {
                let table = build_table(&GameSpec::new(1, 2 * d)?, cur)?;
                return Ok(Chain { n, d, steps, terminal: Some(cur), value: table.at(cur) });
            }
            Step::Zero(rule) => {
                steps.push(ChainStep { rule, from: cur, to: None });
                return Ok(Chain { n, d, steps, terminal: None, value: 0 });
            }
            Step::Reduce { rule, to, .. } => {
                if to >= cur {
                    return Err(Error::Internal(format!("rule {rule} does not descend at {cur}")));
                }
                steps.push(ChainStep { rule, from: cur, to: Some(to) });
                cur = to;
            }
        }
    }
}

/// Number of base-b digits of n.
pub(crate) fn digit_len(mut n: u64, b: u64) -> u32 {
    let mut k = 0;
    while n > 0 {
        n /= b;
        k += 1;
    }
    k
}
