//! Sprague-Grundy values of the game G_{a,b}: from n > 1 a player moves to
//! n - a or to ceil(n / b); the position 1 is terminal.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What the subtraction move contributes when n - a < 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// A phantom child with this SG value joins the mex set.
    VirtualValue(u8),
    /// The move is simply unavailable.
    SubtractDisallowed,
}

impl Default for Boundary {
    fn default() -> Self {
        Boundary::VirtualValue(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub a: u64,
    pub b: u64,
    pub boundary: Boundary,
    /// Fixed values that replace the recursion at their own indices.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub overrides: BTreeMap<u64, u8>,
}

impl GameSpec {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a < 1 {
            return Err(Error::Config(format!("a must be at least 1, got {a}")));
        }
        if b < 2 {
            return Err(Error::Config(format!("b must be at least 2, got {b}")));
        }
        Ok(GameSpec { a, b, boundary: Boundary::default(), overrides: BTreeMap::new() })
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_overrides(mut self, overrides: BTreeMap<u64, u8>) -> Result<Self> {
        for (&i, &v) in &overrides {
            if i == 0 {
                return Err(Error::Config("override index 0 (indices start at 1)".into()));
            }
            if v > 2 {
                return Err(Error::Config(format!("override value {v} at index {i} is not in {{0,1,2}}")));
            }
        }
        self.overrides = overrides;
        Ok(self)
    }

    /// Largest overridden index, or 0 without overrides.
    pub fn override_end(&self) -> u64 {
        self.overrides.keys().next_back().copied().unwrap_or(0)
    }

    fn validate(&self) -> Result<()> {
        GameSpec::new(self.a, self.b)?;
        if let Boundary::VirtualValue(v) = self.boundary {
            if v > 2 {
                return Err(Error::Config(format!("virtual boundary value {v} is not in {{0,1,2}}")));
            }
        }
        self.clone().with_overrides(self.overrides.clone()).map(|_| ())
    }
}

/// Dense table of SG values for indices 1..=n_max.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SgTable {
    spec: GameSpec,
    values: Vec<u8>,
}

impl SgTable {
    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn n_max(&self) -> u64 {
        self.values.len() as u64
    }

    /// Values for indices 1..=n_max; slot i holds SG(i + 1).
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn get(&self, n: u64) -> Option<u8> {
        if n == 0 {
            return None;
        }
        self.values.get((n - 1) as usize).copied()
    }

    /// Unchecked-range lookup for hot loops; panics outside 1..=n_max.
    #[inline]
    pub fn at(&self, n: u64) -> u8 {
        self.values[(n - 1) as usize]
    }
}

/// Smallest non-negative integer not in `s`.
pub fn mex<I: IntoIterator<Item = u8>>(s: I) -> u8 {
    let mut seen = 0u64;
    let mut big = Vec::new();
    for v in s {
        if v < 64 {
            seen |= 1 << v;
        } else {
            big.push(v);
        }
    }
    let m = (!seen).trailing_zeros() as u8;
    if m < 64 {
        return m;
    }
    (64u8..=u8::MAX).find(|v| !big.contains(v)).unwrap_or(u8::MAX)
}

pub fn build_table(spec: &GameSpec, n_max: u64) -> Result<SgTable> {
    spec.validate()?;
    if n_max < 1 {
        return Err(Error::Config("n_max must be at least 1".into()));
    }
    if spec.override_end() > n_max {
        return Err(Error::Config(format!("override index {} exceeds n_max {n_max}", spec.override_end())));
    }
    let (a, b) = (spec.a, spec.b);
    let mut values = vec![0u8; n_max as usize];
    for n in 1..=n_max {
        let v = if let Some(&v) = spec.overrides.get(&n) {
            v
        } else if n == 1 {
            0
        } else {
            let div = values[(n.div_ceil(b) - 1) as usize];
            if n > a {
                mex([values[(n - a - 1) as usize], div])
            } else {
                match spec.boundary {
                    Boundary::VirtualValue(v) => mex([v, div]),
                    Boundary::SubtractDisallowed => mex([div]),
                }
            }
        };
        values[(n - 1) as usize] = v;
    }
    Ok(SgTable { spec: spec.clone(), values })
}

pub fn sg_value(table: &SgTable, n: u64) -> Result<u8> {
    table.get(n).ok_or(Error::OutOfRange { index: n, n_max: table.n_max() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    FirstPlayerWin,
    FirstPlayerLoss,
}

pub fn outcome(table: &SgTable, n: u64) -> Result<Outcome> {
    Ok(if sg_value(table, n)? != 0 { Outcome::FirstPlayerWin } else { Outcome::FirstPlayerLoss })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    Subtract { to: u64 },
    Divide { to: u64 },
}

impl Move {
    pub fn target(&self) -> u64 {
        match *self {
            Move::Subtract { to } | Move::Divide { to } => to,
        }
    }
}

/// A move to a zero position, preferring subtraction. `None` for losing
/// positions, for the terminal position, and when the only zero child is a
/// virtual boundary value.
pub fn best_move(table: &SgTable, n: u64) -> Result<Option<Move>> {
    if sg_value(table, n)? == 0 || n == 1 {
        return Ok(None);
    }
    let (a, b) = (table.spec.a, table.spec.b);
    if n > a && table.at(n - a) == 0 {
        return Ok(Some(Move::Subtract { to: n - a }));
    }
    let to = n.div_ceil(b);
    if table.at(to) == 0 {
        return Ok(Some(Move::Divide { to }));
    }
    Ok(None)
}
