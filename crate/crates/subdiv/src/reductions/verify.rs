//! Exhaustive check of every rule and of the identities behind them.

use std::collections::BTreeMap;

use serde::Serialize;

use super::rules::View;
use super::{digit_len, normalize, sg_star, terminal_floor, Reading, RuleId, RuleKind, Step};
use crate::engine::{build_table, mex, GameSpec, SgTable};
use crate::error::{Error, Result};
use crate::sweep;

/// Failures listed per rule.
const EXAMPLES: usize = 10;
/// Declared shifts are compared only when the index has this many digits, so
/// that the top digit lies above every guard.
const SHIFT_MIN_DIGITS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleStats {
    pub id: String,
    pub case: u8,
    pub kind: RuleKind,
    pub declared_shift: Option<u32>,
    pub fires: u64,
    pub failures: u64,
    pub first_failures: Vec<u64>,
    pub shift_checked: u64,
    pub shift_mismatches: u64,
    /// Some index fires the rule in this base.
    pub satisfiable: bool,
    /// Smallest firing index with c_1..c_8 drawn from {0, 1, 2, 3}.
    pub witness: Option<u64>,
    pub witness_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubCheck {
    pub name: &'static str,
    pub checked: u64,
    pub failures: u64,
    pub first_failures: Vec<u64>,
}

/// Fire and failure counts of the rules a literal reading changes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiteralReport {
    pub name: &'static str,
    pub rules: Vec<String>,
    pub fires: u64,
    pub failures: u64,
    pub first_failures: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleReport {
    pub d: u64,
    pub n_max: u64,
    pub floor: u64,
    /// Indices at or above the floor.
    pub checked: u64,
    pub terminal: u64,
    /// Indices where no guard holds.
    pub uncovered: u64,
    /// Indices where more than one guard holds.
    pub ambiguous: u64,
    pub descent_failures: u64,
    pub shift_min_digits: u32,
    pub rules: Vec<RuleStats>,
    pub sub_checks: Vec<SubCheck>,
    pub literal_readings: Vec<LiteralReport>,
    pub passed: bool,
}

const SUB_CHECKS: [&str; 5] = ["rule5_star", "zero_prop", "constructions", "case4_carry", "sg_star_law"];

#[derive(Default)]
struct Counter {
    checked: u64,
    failures: u64,
    first: Vec<u64>,
}

impl Counter {
    fn record(&mut self, n: u64, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first.len() < EXAMPLES {
                self.first.push(n);
            }
        }
    }

    fn merge(&mut self, o: Counter) {
        self.checked += o.checked;
        self.failures += o.failures;
        let room = EXAMPLES - self.first.len();
        self.first.extend(o.first.into_iter().take(room));
    }
}

#[derive(Default)]
struct PerRule {
    fires: Counter,
    shift: Counter,
}

#[derive(Default)]
struct Partial {
    checked: u64,
    terminal: u64,
    uncovered: u64,
    ambiguous: u64,
    descent: u64,
    rules: BTreeMap<RuleId, PerRule>,
    subs: [Counter; 5],
    literal: [Counter; 2],
}

fn literal_readings() -> [(&'static str, Reading, Vec<RuleId>); 2] {
    [
        ("row7_literal", Reading { row7_literal: true, ..Reading::DERIVED }, vec![RuleId::C3(7), RuleId::C4(9)]),
        (
            "case4_c2_literal",
            Reading { case4_c2_literal: true, ..Reading::DERIVED },
            (11..=15).map(RuleId::C4).collect(),
        ),
    ]
}

/// Runs every rule over n <= n_max against the engine, with the sub-checks
/// and satisfiability witnesses.
pub fn verify_rules(d: u64, n_max: u64, workers: usize) -> Result<RuleReport> {
    if d == 0 || d > 64 {
        return Err(Error::Config(format!("d = {d} is out of the supported range 1..=64")));
    }
    let b = 2 * d;
    let floor = terminal_floor(d);
    let spec = GameSpec::new(1, b)?;
    let table = build_table(&spec, n_max.max(1) + 2 * b)?;
    let all = RuleId::all();
    let literal = literal_readings();

    let parts = sweep::map_ranges(1, n_max, workers, |lo, hi| {
        let mut p = Partial::default();
        for n in lo..=hi {
            if n < floor {
                p.terminal += 1;
                continue;
            }
            p.checked += 1;
            let m = normalize(n, d);
            let view = View::new(m, d);
            let hits: Vec<RuleId> = all.iter().copied().filter(|&r| view.guard(r, Reading::DERIVED)).collect();
            match hits.len() {
                0 => {
                    p.uncovered += 1;
                    continue;
                }
                1 => {}
                _ => p.ambiguous += 1,
            }
            let rule = hits[0];
            let entry = p.rules.entry(rule).or_default();
            let sg = table.at(n);
            match view.apply(rule, Reading::DERIVED) {
                Step::Zero(_) => entry.fires.record(n, sg == 0),
                Step::Reduce { to, shift, .. } => {
                    if to >= n {
                        p.descent += 1;
                    }
                    entry.fires.record(n, to < n && table.at(to) == sg);
                    let len = digit_len(m, b);
                    if len >= SHIFT_MIN_DIGITS {
                        entry.shift.record(n, len - digit_len(to, b) == shift);
                    }
                }
                Step::Terminal => unreachable!(),
            }
            for (k, (_, reading, rows)) in literal.iter().enumerate() {
                if let Some(&r) = all.iter().find(|&&r| view.guard(r, *reading)) {
                    if rows.contains(&r) {
                        if let Step::Reduce { to, .. } = view.apply(r, *reading) {
                            p.literal[k].record(n, to < n && table.at(to) == sg);
                        }
                    }
                }
            }
            sub_checks(&table, &view, n, m, d, &mut p.subs);
        }
        p
    });

    let mut total = Partial::default();
    for p in parts {
        total.checked += p.checked;
        total.terminal += p.terminal;
        total.uncovered += p.uncovered;
        total.ambiguous += p.ambiguous;
        total.descent += p.descent;
        for (r, s) in p.rules {
            let e = total.rules.entry(r).or_default();
            e.fires.merge(s.fires);
            e.shift.merge(s.shift);
        }
        for (t, s) in total.subs.iter_mut().zip(p.subs) {
            t.merge(s);
        }
        for (t, s) in total.literal.iter_mut().zip(p.literal) {
            t.merge(s);
        }
    }

    let witnesses = find_witnesses(d, floor);
    let need = witnesses.values().copied().max().unwrap_or(0);
    let big;
    let wtable = if need > table.n_max() {
        big = build_table(&spec, need)?;
        &big
    } else {
        &table
    };

    let mut rules = Vec::new();
    for r in all.iter().copied() {
        let s = total.rules.remove(&r).unwrap_or_default();
        let witness = witnesses.get(&r).copied();
        let witness_ok = witness.map(|w| witness_holds(wtable, w, d, r));
        rules.push(RuleStats {
            id: r.to_string(),
            case: r.case(),
            kind: r.kind(),
            declared_shift: r.shift(),
            fires: s.fires.checked,
            failures: s.fires.failures,
            first_failures: s.fires.first,
            shift_checked: s.shift.checked,
            shift_mismatches: s.shift.failures,
            satisfiable: witness.is_some(),
            witness,
            witness_ok,
        });
    }
    let sub_checks: Vec<SubCheck> = SUB_CHECKS
        .iter()
        .zip(total.subs)
        .map(|(name, c)| SubCheck { name, checked: c.checked, failures: c.failures, first_failures: c.first })
        .collect();
    let literal_readings: Vec<LiteralReport> = literal
        .iter()
        .zip(total.literal)
        .map(|((name, _, rows), c)| LiteralReport {
            name,
            rules: rows.iter().map(|r| r.to_string()).collect(),
            fires: c.checked,
            failures: c.failures,
            first_failures: c.first,
        })
        .collect();
    let passed = total.uncovered == 0
        && total.ambiguous == 0
        && total.descent == 0
        && rules.iter().all(|s| {
            s.failures == 0
                && s.shift_mismatches == 0
                && s.witness_ok != Some(false)
                && (!s.satisfiable || s.fires > 0 || s.witness_ok == Some(true))
        })
        && sub_checks.iter().all(|c| c.failures == 0);
    Ok(RuleReport {
        d,
        n_max,
        floor,
        checked: total.checked,
        terminal: total.terminal,
        uncovered: total.uncovered,
        ambiguous: total.ambiguous,
        descent_failures: total.descent,
        shift_min_digits: SHIFT_MIN_DIGITS,
        rules,
        sub_checks,
        literal_readings,
        passed,
    })
}

fn witness_holds(table: &SgTable, w: u64, d: u64, rule: RuleId) -> bool {
    let view = View::new(normalize(w, d), d);
    match view.apply(rule, Reading::DERIVED) {
        Step::Zero(_) => table.at(w) == 0,
        Step::Reduce { to, .. } => to < w && table.at(to) == table.at(w),
        Step::Terminal => false,
    }
}

/// Smallest firing index per rule among R in {0, 1} and c_1..c_8 in
/// {0, 1, 2, 3} (restricted to digits of base 2d), at or above the floor.
fn find_witnesses(d: u64, floor: u64) -> BTreeMap<RuleId, u64> {
    let b = 2 * d;
    let reps: Vec<u64> = (0..4).filter(|&x| x < b).collect();
    let all = RuleId::all();
    let mut out: BTreeMap<RuleId, u64> = BTreeMap::new();
    let mut digits = [0usize; 8];
    loop {
        let high: u64 = digits.iter().rev().fold(0, |acc, &i| acc * b + reps[i]);
        for r0 in 0..2u64 {
            let n = r0 + b * high;
            if n >= floor {
                let view = View::new(n, d);
                if let Some(&r) = all.iter().find(|&&r| view.guard(r, Reading::DERIVED)) {
                    let e = out.entry(r).or_insert(n);
                    *e = (*e).min(n);
                }
            }
        }
        // Next assignment, odometer style.
        let mut i = 0;
        loop {
            if i == digits.len() {
                return out;
            }
            digits[i] += 1;
            if digits[i] < reps.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Applies R4 / Rule 5 steps to the index 1 + B e_1 + B^2 e_2 + ... while
/// four leading coefficients are even. Returns (steps, starred) after each
/// step, starting with (0, false).
fn star_chain(e: &[u64]) -> Vec<(usize, bool)> {
    let mut out = vec![(0, false)];
    let mut starred = false;
    let mut at = 0;
    while out.len() <= 6 && at + 4 <= e.len() && e[at..at + 4].iter().all(|x| x % 2 == 0) {
        if e[at] != 0 {
            starred = !starred;
        }
        at += 2;
        out.push((out.len(), starred));
    }
    out
}

fn sub_checks(table: &SgTable, view: &View, n: u64, m: u64, d: u64, subs: &mut [Counter; 5]) {
    let b = 2 * d;
    let b128 = b as u128;
    let sg = table.at(n);
    let width = super::rules::WIDTH;
    let c = |i: usize| view.ci(i);
    let all_even_from = |i: usize| (i..width).all(|j| c(j) % 2 == 0);

    // Rule 5: R = 1, c1 even and nonzero, c2..c4 even.
    if view.r() == 1 && c(1) % 2 == 0 && c(1) != 0 && (2..=4).all(|i| c(i) % 2 == 0) {
        let r = (1 + b128 * view.tail(3)) as u64;
        subs[0].record(n, sg == sg_star(table.at(r)));
    }

    if view.r() == 0 && c(1) % 2 == 1 {
        // The first odd coefficient after c1 decides which move reaches 0.
        if let Some(i) = (2..width).find(|&i| c(i) % 2 == 1) {
            let lhs = table.at(m - 1);
            let rhs = table.at(m / b);
            subs[1].record(n, (lhs == 0) == (i % 2 == 1) && (rhs == 0) == (i % 2 == 0));
        } else if all_even_from(2) {
            // Both moves reduce by R4 / Rule 5 until their shifts differ by
            // one; the index built from that point has the same value.
            let mut lhs_e = vec![c(1) - 1];
            lhs_e.extend((2..width).map(c));
            let rhs_e: Vec<u64> = (2..width).map(c).collect();
            let lc = star_chain(&lhs_e);
            let rc = star_chain(&rhs_e);
            let mut best: Option<(usize, bool)> = None;
            for &(kl, sl) in &lc {
                for &(kr, sr) in &rc {
                    let (il, ir) = (1 + 2 * kl, 2 + 2 * kr);
                    if sl == sr && il.abs_diff(ir) == 1 && (kl > 0 || kr > 0) {
                        let i = il.min(ir);
                        if best.is_none_or(|(bi, _)| i < bi) {
                            best = Some((i, sl));
                        }
                    }
                }
            }
            if let Some((i, starred)) = best {
                let ci = c(i) as u128;
                let r3 = if starred {
                    b128 * b128 * (ci + 1) + b128 * b128 * b128 * view.tail(i + 1)
                } else {
                    b128 * (ci + 1) + b128 * b128 * view.tail(i + 1)
                };
                let ok = r3 < m as u128 && table.at(r3 as u64) == sg;
                subs[2].record(n, ok);
            }
        }
    }

    // Case 4 carry: the division move lands on c1 + B c2 + ..., which
    // alternation moves to B (c2 + 1) + B^2 c3 + ... when c1 != 0.
    if view.r() == 0 && c(1) % 2 == 0 && c(1) != 0 {
        let q = m / b;
        let carried = (b128 * (view.tail(2) + 1)) as u64;
        subs[3].record(n, normalize(q, d) == carried && table.at(q) == table.at(carried));
    }

    if m.is_multiple_of(2) && table.at(m) != 0 {
        let v = table.at(m);
        subs[4].record(n, mex([0, v]) == sg_star(v));
    }
}
