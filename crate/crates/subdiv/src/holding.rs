//! Holding: runs of equal SG values over aligned blocks of fixed length.

use num_integer::Integer;
use serde::Serialize;

use crate::engine::SgTable;
use crate::error::{Error, Result};

/// Largest divisor of `a` sharing no prime factor with `b`.
pub fn coprime_part(a: u64, b: u64) -> u64 {
    let mut a = a;
    loop {
        let g = a.gcd(&b);
        if g <= 1 {
            return a;
        }
        a /= g;
    }
}

/// The chain g_i = gcd(a / (g_1 ... g_{i-1}), b), stopped at the first 1.
pub fn g_sequence(a: u64, b: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = a;
    loop {
        let g = rest.gcd(&b);
        if g <= 1 {
            return out;
        }
        out.push(g);
        rest /= g;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoldingBound {
    /// Step bound from the run-length analysis; `None` for odd b or on
    /// overflow.
    pub exact: Option<u128>,
    /// a * b^a, saturating.
    pub rough: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Bounds on the index where holding of full length sets in.
///
/// exact = (4d^2 + 2d + 2) * sum_j T_j with T_j = (2d)^j g_1...g_j, except
/// that the (k-1)-th term is (2d g_1)^(k-1) g_1...g_(k-1) when k >= 3.
pub fn holding_bound(a: u64, b: u64) -> HoldingBound {
    let rough = (b as u128)
        .checked_pow(a.min(u32::MAX as u64) as u32)
        .and_then(|p| p.checked_mul(a as u128))
        .unwrap_or(u128::MAX);
    if !b.is_multiple_of(2) {
        return HoldingBound {
            exact: None,
            rough,
            warning: Some(format!("b = {b} is odd; only the rough bound a*b^a is available")),
        };
    }
    let exact = exact_bound(b as u128 / 2, &g_sequence(a, b));
    let warning = exact.is_none().then(|| "exact bound overflows 128 bits".to_string());
    HoldingBound { exact, rough, warning }
}

fn exact_bound(d: u128, g: &[u64]) -> Option<u128> {
    let k = g.len();
    let mut sum: u128 = 0;
    let mut prod: u128 = 1;
    for j in 0..=k {
        if j > 0 {
            prod = prod.checked_mul(g[j - 1] as u128)?;
        }
        let base = if k >= 3 && j == k - 1 { (2 * d).checked_mul(g[0] as u128)? } else { 2 * d };
        let term = base.checked_pow(j as u32)?.checked_mul(prod)?;
        sum = sum.checked_add(term)?;
    }
    (4 * d * d + 2 * d + 2).checked_mul(sum)
}

fn block_constant(table: &SgTable, k: u64, s: u64) -> bool {
    let v = table.values();
    let block = &v[((k - 1) * s) as usize..(k * s) as usize];
    block.iter().all(|&x| x == block[0])
}

/// Start of the tail of complete blocks {ks-s+1..ks} that are all constant.
/// At least min(10, K/2) constant blocks must confirm it, K being the number
/// of complete blocks in the table.
pub fn detect_holding(table: &SgTable, s: u64) -> Result<Option<u64>> {
    if s == 0 {
        return Err(Error::Config("block length must be at least 1".into()));
    }
    let need = s.saturating_mul(3).saturating_mul(table.spec().b);
    if table.n_max() < need {
        return Err(Error::TableTooShort { need, have: table.n_max() });
    }
    let blocks = table.n_max() / s;
    let last_bad = (1..=blocks).rev().find(|&k| !block_constant(table, k, s)).unwrap_or(0);
    if blocks - last_bad < 10.min(blocks / 2) || last_bad == blocks {
        return Ok(None);
    }
    Ok(Some(last_bad * s + 1))
}

/// Largest block length up to `max_len` for which holding is detected.
/// Lengths whose precondition the table cannot meet are skipped.
pub fn detected_length(table: &SgTable, max_len: u64) -> Result<Option<u64>> {
    for len in (1..=max_len).rev() {
        match detect_holding(table, len) {
            Ok(Some(_)) => return Ok(Some(len)),
            Ok(None) | Err(Error::TableTooShort { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PersistenceReport {
    pub holds: bool,
    pub constant_blocks: u64,
    /// End index kg of the first constant block whose shift by a is not
    /// constant.
    pub counterexample: Option<u64>,
}

/// Checks that each constant block {kg-g+1..kg} stays constant when shifted
/// by a, wherever the shifted block is in range.
pub fn verify_persistence(table: &SgTable, g: u64) -> Result<PersistenceReport> {
    let a = table.spec().a;
    if g == 0 || !a.is_multiple_of(g) {
        return Err(Error::Precondition(format!("g = {g} must divide a = {a}")));
    }
    let shift = a / g;
    let blocks = table.n_max() / g;
    let mut constant_blocks = 0;
    for k in 1..=blocks.saturating_sub(shift) {
        if !block_constant(table, k, g) {
            continue;
        }
        constant_blocks += 1;
        if !block_constant(table, k + shift, g) {
            return Ok(PersistenceReport { holds: false, constant_blocks, counterexample: Some(k * g) });
        }
    }
    Ok(PersistenceReport { holds: true, constant_blocks, counterexample: None })
}

/// SG(a n) for n = 1, 2, ... within the table.
pub fn block_values(table: &SgTable, a: u64) -> Vec<u8> {
    let a = a.max(1);
    (1..=table.n_max() / a).map(|n| table.at(a * n)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoldingProfile {
    pub a: u64,
    pub b: u64,
    pub g_sequence: Vec<u64>,
    pub a_prime: u64,
    /// Predicted holding length a / a'.
    pub s: u64,
    pub rough_bound: u128,
    pub exact_bound: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub n_max: u64,
    pub onset_observed: Option<u64>,
}

pub fn holding_profile(table: &SgTable) -> Result<HoldingProfile> {
    let (a, b) = (table.spec().a, table.spec().b);
    let a_prime = coprime_part(a, b);
    let s = a / a_prime;
    let bound = holding_bound(a, b);
    Ok(HoldingProfile {
        a,
        b,
        g_sequence: g_sequence(a, b),
        a_prime,
        s,
        rough_bound: bound.rough,
        exact_bound: bound.exact,
        warning: bound.warning,
        n_max: table.n_max(),
        onset_observed: detect_holding(table, s)?,
    })
}
