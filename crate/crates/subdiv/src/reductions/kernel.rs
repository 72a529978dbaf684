//! Kernel counts and a digit automaton for t(n) = SG(a n).

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::engine::{build_table, GameSpec};
use crate::error::{Error, Result};
use crate::holding::coprime_part;

/// Stand-in for t(0), which is not a game position.
const SENTINEL: u8 = u8::MAX;
/// Longest sequence materialized while looking for the kernel.
const MAX_LEN: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub a: u64,
    pub b: u64,
    pub e_max: u32,
    pub prefix_len: u64,
    /// Distinct length-L prefixes among n -> t(b^e n + r) over all depths
    /// up to e, for e = 0..=e_max.
    pub counts: Vec<usize>,
    /// The last two counts agree.
    pub stabilized: bool,
}

fn check_spec(spec: &GameSpec) -> Result<()> {
    if !spec.b.is_multiple_of(2) {
        return Err(Error::Precondition(format!("b = {} must be even", spec.b)));
    }
    if spec.a > 1 && coprime_part(spec.a, spec.b) != 1 {
        return Err(Error::Rejected(format!("a = {} has a prime factor not dividing b = {}", spec.a, spec.b)));
    }
    Ok(())
}

/// t(0) = SENTINEL, t(n) = SG(a n) for 1 <= n < len.
fn sequence(spec: &GameSpec, len: u64) -> Result<Vec<u8>> {
    if len > MAX_LEN {
        return Err(Error::Config(format!("kernel needs {len} terms, more than the limit {MAX_LEN}")));
    }
    let a = spec.a;
    let table = build_table(spec, a * len.max(2))?;
    let mut t = Vec::with_capacity(len as usize);
    t.push(SENTINEL);
    t.extend((1..len).map(|n| table.at(a * n)));
    Ok(t)
}

fn prefix(t: &[u8], k: u64, e: u32, r: u64, l: u64) -> Vec<u8> {
    let step = k.pow(e);
    (0..l).map(|m| t[(step * m + r) as usize]).collect()
}

pub fn kernel_report(spec: &GameSpec, e_max: u32, prefix_len: u64) -> Result<KernelReport> {
    check_spec(spec)?;
    if prefix_len == 0 {
        return Err(Error::Config("prefix length must be positive".into()));
    }
    let k = spec.b;
    let len = k
        .checked_pow(e_max)
        .and_then(|p| p.checked_mul(prefix_len))
        .ok_or_else(|| Error::Config("kernel depth too large".into()))?;
    let t = sequence(spec, len)?;
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut counts = Vec::new();
    for e in 0..=e_max {
        for r in 0..k.pow(e) {
            seen.insert(prefix(&t, k, e, r, prefix_len));
        }
        counts.push(seen.len());
    }
    let stabilized = counts.len() >= 2 && counts[counts.len() - 1] == counts[counts.len() - 2];
    Ok(KernelReport { a: spec.a, b: spec.b, e_max, prefix_len, counts, stabilized })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dfao {
    pub a: u64,
    pub b: u64,
    pub prefix_len: u64,
    pub states: usize,
    /// transitions[q][digit]
    pub transitions: Vec<Vec<usize>>,
    /// Output per state; the start state's is t(0), which is undefined.
    pub outputs: Vec<Option<u8>>,
    pub digit_order: &'static str,
    /// Deepest kernel element a state stands for.
    pub max_depth: u32,
    pub validated_to: u64,
}

impl Dfao {
    pub fn state_count(&self) -> usize {
        self.states
    }

    /// First n in 1..=bound where the automaton and SG(a n) disagree.
    pub fn first_mismatch(&self, spec: &GameSpec, bound: u64) -> Result<Option<u64>> {
        if bound == 0 {
            return Ok(None);
        }
        let top = spec.a.checked_mul(bound).ok_or_else(|| Error::Config(format!("bound {bound} too large")))?;
        let table = build_table(spec, top)?;
        Ok((1..=bound).find(|&n| self.eval(n) != Some(table.at(spec.a * n))))
    }

    /// Reads the base-b digits of n, least significant first.
    pub fn eval(&self, mut n: u64) -> Option<u8> {
        let mut q = 0;
        while n > 0 {
            q = self.transitions[q][(n % self.b) as usize];
            n /= self.b;
        }
        self.outputs[q]
    }
}

/// Builds the automaton whose states are kernel elements told apart by
/// their length-L prefixes, then checks it against t(n) for 1 <= n <= bound.
pub fn build_dfao(spec: &GameSpec, bound: u64, prefix_len: u64) -> Result<Dfao> {
    check_spec(spec)?;
    if prefix_len == 0 {
        return Err(Error::Config("prefix length must be positive".into()));
    }
    let k = spec.b;
    let mut depth = 6u32;
    let mut t = sequence(spec, k.pow(depth) * prefix_len)?;
    let mut ids: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut reps: Vec<(u32, u64)> = vec![(0, 0)];
    ids.insert(prefix(&t, k, 0, 0, prefix_len), 0);
    let mut transitions: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < reps.len() {
        let (e, r) = reps[i];
        while e + 1 > depth {
            depth += 2;
            let len = k
                .checked_pow(depth)
                .and_then(|p| p.checked_mul(prefix_len))
                .filter(|&l| l <= MAX_LEN)
                .ok_or_else(|| Error::Rejected(format!("kernel did not close by depth {e}")))?;
            t = sequence(spec, len)?;
        }
        let mut row = Vec::with_capacity(k as usize);
        for digit in 0..k {
            let child = (e + 1, r + digit * k.pow(e));
            let key = prefix(&t, k, child.0, child.1, prefix_len);
            let next = reps.len();
            let id = *ids.entry(key).or_insert(next);
            if id == next {
                reps.push(child);
            }
            row.push(id);
        }
        transitions.push(row);
        i += 1;
    }
    let outputs: Vec<Option<u8>> = reps.iter().map(|&(_, r)| Some(t[r as usize]).filter(|&v| v != SENTINEL)).collect();
    let max_depth = reps.iter().map(|&(e, _)| e).max().unwrap_or(0);
    let dfao = Dfao {
        a: spec.a,
        b: spec.b,
        prefix_len,
        states: reps.len(),
        transitions,
        outputs,
        digit_order: "lsd",
        max_depth,
        validated_to: bound,
    };
    if let Some(n) = dfao.first_mismatch(spec, bound)? {
        return Err(Error::Rejected(format!("automaton disagrees with the table at n = {n}")));
    }
    Ok(dfao)
}
