//! Win/loss oracles that read a verdict off the base-2d digits of an index,
//! and sweeps that check them against computed tables.

use serde::Serialize;

use crate::digits::{first_even_block_length, to_digits, DigitString};
use crate::engine::{build_table, GameSpec, SgTable};
use crate::error::{Error, Result};
use crate::holding::coprime_part;
use crate::sweep;

/// Largest number of individual mismatches kept in a report.
pub const MISMATCH_CAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Zero,
    NonZero,
    Unknown,
}

impl Verdict {
    fn flipped_if(self, odd: bool) -> Verdict {
        match (self, odd) {
            (Verdict::Zero, true) => Verdict::NonZero,
            (Verdict::NonZero, true) => Verdict::Zero,
            (v, _) => v,
        }
    }

    fn from_sg(v: u8) -> Verdict {
        if v == 0 {
            Verdict::Zero
        } else {
            Verdict::NonZero
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroVerdict {
    pub verdict: Verdict,
    /// Which branch decided the verdict.
    pub rule: &'static str,
    /// Number of second-digit removals performed.
    pub steps: u32,
    /// The index reached after the removals, when any were attempted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced: Option<u64>,
}

impl ZeroVerdict {
    fn plain(verdict: Verdict, rule: &'static str) -> Self {
        ZeroVerdict { verdict, rule, steps: 0, reduced: None }
    }
}

fn check_d(d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::Config("d must be at least 1".into()));
    }
    d.checked_mul(2).ok_or_else(|| Error::Config("d too large".into()))
}

fn residue_class(n: u64, d: u64) -> Verdict {
    let l = n % (4 * d);
    if l.is_multiple_of(2) {
        Verdict::NonZero
    } else if l > 2 * d {
        Verdict::Zero
    } else {
        Verdict::Unknown
    }
}

/// Verdict from n mod 4d alone: even residues are never zero, odd residues
/// above 2d always are.
pub fn residue_rule(n: u64, d: u64) -> ZeroVerdict {
    match residue_class(n, d) {
        Verdict::NonZero => ZeroVerdict::plain(Verdict::NonZero, "residue-even"),
        Verdict::Zero => ZeroVerdict::plain(Verdict::Zero, "residue-odd-high"),
        Verdict::Unknown => ZeroVerdict::plain(Verdict::Unknown, "residue-odd-low"),
    }
}

/// Complete zero test for G_{1,2d}. With k the length of the even run after
/// an odd leading digit: SG(n) = 0 iff k is even, except when the run reaches
/// the top digit (no odd digit closes it), where the parity is reversed
/// because the chain ends on a first-block value other than 1.
pub fn characterize_1_2d(n: u64, d: u64) -> ZeroVerdict {
    let ds = to_digits(n, 2 * d).expect("base 2d >= 2");
    if n == 0 || ds.digit(0).is_multiple_of(2) {
        return ZeroVerdict::plain(Verdict::NonZero, "leading-digit-even");
    }
    if n == 1 {
        return ZeroVerdict::plain(Verdict::Zero, "terminal");
    }
    let k = first_even_block_length(&ds).expect("leading digit is odd");
    let closed = 1 + k < ds.len();
    let zero = if closed { k.is_multiple_of(2) } else { k % 2 == 1 };
    ZeroVerdict {
        verdict: if zero { Verdict::Zero } else { Verdict::NonZero },
        rule: if closed { "even-block" } else { "even-block-to-top" },
        steps: k as u32,
        reduced: None,
    }
}

fn scale_up(x: u64, f: f64) -> u64 {
    let v = (x as f64 * f).ceil();
    if v <= 0.0 {
        0
    } else if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v as u64
    }
}

/// Index thresholds for sequences whose first N - 1 values were fixed
/// arbitrarily.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PerturbedThresholds {
    /// Even residues are nonzero from here on (2dN).
    pub nonzero: u64,
    /// Odd residues above 2d are zero from here on (4d^2 N - 2d + 1).
    pub zero: u64,
    /// Second-digit removal starts here (4dN + 1).
    pub removal: u64,
    /// Removal never goes below this (2dN + 1).
    pub floor: u64,
    /// Table length the oracle needs (4d^2 N).
    pub table: u64,
}

impl PerturbedThresholds {
    pub fn literal(d: u64, big_n: u64) -> Self {
        PerturbedThresholds {
            nonzero: 2 * d * big_n,
            zero: 4 * d * d * big_n - 2 * d + 1,
            removal: 4 * d * big_n + 1,
            floor: 2 * d * big_n + 1,
            table: 4 * d * d * big_n,
        }
    }

    /// Every threshold multiplied by `f` (rounded up); the table length is
    /// kept so lookups stay covered.
    pub fn scaled(self, f: f64) -> Self {
        PerturbedThresholds {
            nonzero: scale_up(self.nonzero, f),
            zero: scale_up(self.zero, f),
            removal: scale_up(self.removal, f),
            floor: scale_up(self.floor, f),
            table: self.table,
        }
    }
}

fn lookup(table: &SgTable, n: u64) -> Result<u8> {
    table.get(n).ok_or(Error::TableTooShort { need: n, have: table.n_max() })
}

fn check_prefix(table: &SgTable, a: u64, b: u64) -> Result<()> {
    let s = table.spec();
    if s.a != a || s.b != b {
        return Err(Error::Config(format!("prefix table is for G_{{{},{}}}, expected G_{{{a},{b}}}", s.a, s.b)));
    }
    Ok(())
}

pub fn characterize_perturbed(n: u64, d: u64, big_n: u64, prefix: &SgTable) -> Result<ZeroVerdict> {
    check_d(d)?;
    characterize_perturbed_with(n, d, &PerturbedThresholds::literal(d, big_n.max(1)), prefix)
}

pub fn characterize_perturbed_with(n: u64, d: u64, th: &PerturbedThresholds, prefix: &SgTable) -> Result<ZeroVerdict> {
    let b = check_d(d)?;
    check_prefix(prefix, 1, b)?;
    if prefix.n_max() < th.table {
        return Err(Error::TableTooShort { need: th.table, have: prefix.n_max() });
    }
    match residue_class(n, d) {
        Verdict::NonZero if n >= th.nonzero => {
            return Ok(ZeroVerdict::plain(Verdict::NonZero, "residue-even"));
        }
        Verdict::Zero if n >= th.zero => return Ok(ZeroVerdict::plain(Verdict::Zero, "residue-odd-high")),
        Verdict::Unknown if n >= th.removal => {}
        _ => return Ok(ZeroVerdict::plain(Verdict::Unknown, "below-threshold")),
    }
    let mut ds = to_digits(n, b)?;
    let mut k = 0u32;
    while let Some(next) = removal_step(&ds) {
        if next.value() < th.floor {
            break;
        }
        ds = next;
        k += 1;
    }
    let reduced = ds.value();
    let base =
        if odd_pair(&ds) && reduced >= th.zero { Verdict::Zero } else { Verdict::from_sg(lookup(prefix, reduced)?) };
    Ok(ZeroVerdict {
        verdict: base.flipped_if(k % 2 == 1),
        rule: "second-digit-removal",
        steps: k,
        reduced: Some(reduced),
    })
}

/// The digit string with position 1 deleted, if that digit is even.
fn removal_step(ds: &DigitString) -> Option<DigitString> {
    if ds.len() >= 2 && ds.digit(0) % 2 == 1 && ds.digit(1).is_multiple_of(2) {
        crate::digits::remove_second_digit(ds).ok()
    } else {
        None
    }
}

fn odd_pair(ds: &DigitString) -> bool {
    ds.len() >= 2 && ds.digit(0) % 2 == 1 && ds.digit(1) % 2 == 1
}

/// Thresholds for the block-value oracle of G_{a,2d} (a with no prime
/// factor outside 2d). Indices up to `holding` are left undecided; block
/// values n = ceil(i / a) are decided from their digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZeroesThresholds {
    pub a: u64,
    /// Holding of length a is assumed only past this index (a (2d)^a).
    pub holding: u64,
    /// Leading even digit gives a nonzero block value from here on.
    pub even: u64,
    /// Pattern `oo` gives a zero block value from here on.
    pub odd_pair: u64,
    /// Second-digit removal stops once the value drops below this.
    pub floor: u64,
}

impl ZeroesThresholds {
    /// The bounds as stated: (2d)^(a+1), (2d)^(a+2) and a (2d)^(a+2).
    pub fn literal(a: u64, d: u64) -> Self {
        let b = 2 * d;
        ZeroesThresholds {
            a,
            holding: sat_mul(a, sat_pow(b, a)),
            even: sat_pow(b, a + 1),
            odd_pair: sat_pow(b, a + 2),
            floor: sat_mul(a, sat_pow(b, a + 2)),
        }
    }

    /// Literal bounds with the `even` and `odd_pair` thresholds multiplied
    /// by a. The literal ones admit wrong verdicts for a = 2, b = 2.
    pub fn corrected(a: u64, d: u64) -> Self {
        Self::literal(a, d).scaled(a as f64)
    }

    /// `even` and `odd_pair` multiplied by `f`; the holding bound and the
    /// removal floor are kept.
    pub fn scaled(self, f: f64) -> Self {
        ZeroesThresholds { even: scale_up(self.even, f), odd_pair: scale_up(self.odd_pair, f), ..self }
    }

    /// Table length needed for the lookups.
    pub fn prefix_len(&self) -> u64 {
        sat_mul(self.a, self.floor.max(self.odd_pair).max(self.even)).saturating_add(self.a)
    }
}

fn sat_pow(b: u64, e: u64) -> u64 {
    b.checked_pow(e.min(u32::MAX as u64) as u32).unwrap_or(u64::MAX)
}

fn sat_mul(x: u64, y: u64) -> u64 {
    x.saturating_mul(y)
}

pub fn characterize_a_2d(index: u64, a: u64, d: u64, prefix: &SgTable) -> Result<ZeroVerdict> {
    check_d(d)?;
    characterize_a_2d_with(index, a, d, &ZeroesThresholds::corrected(a, d), prefix)
}

pub fn characterize_a_2d_with(
    index: u64,
    a: u64,
    d: u64,
    th: &ZeroesThresholds,
    prefix: &SgTable,
) -> Result<ZeroVerdict> {
    let b = check_d(d)?;
    if a == 0 || coprime_part(a, b) != 1 {
        return Err(Error::Rejected(format!("a = {a} has a prime factor not dividing {b}")));
    }
    check_prefix(prefix, a, b)?;
    if index <= th.holding {
        return Ok(ZeroVerdict::plain(Verdict::Unknown, "below-holding-bound"));
    }
    let n = index.div_ceil(a);
    let mut ds = to_digits(n, b)?;
    if ds.digit(0) % 2 == 0 {
        let v = if n >= th.even { Verdict::NonZero } else { Verdict::Unknown };
        return Ok(ZeroVerdict::plain(v, "block-leading-even"));
    }
    if odd_pair(&ds) {
        let v = if n >= th.odd_pair { Verdict::Zero } else { Verdict::Unknown };
        return Ok(ZeroVerdict::plain(v, "block-odd-pair"));
    }
    let mut k = 0u32;
    while ds.value() >= th.floor {
        match removal_step(&ds) {
            Some(next) => {
                ds = next;
                k += 1;
            }
            None => break,
        }
    }
    let reduced = ds.value();
    let base = if odd_pair(&ds) && reduced >= th.odd_pair {
        Verdict::Zero
    } else {
        Verdict::from_sg(lookup(prefix, a * reduced)?)
    };
    Ok(ZeroVerdict {
        verdict: base.flipped_if(k % 2 == 1),
        rule: "block-second-digit-removal",
        steps: k,
        reduced: Some(reduced),
    })
}

/// Which oracle a sweep runs.
#[derive(Debug, Clone, PartialEq)]
pub enum Oracle {
    Residue,
    Theorem1,
    /// Perturbed-prefix oracle; N is one past the last override. `scale`
    /// multiplies the thresholds (default 1).
    Perturbed {
        scale: Option<f64>,
    },
    /// Block-value oracle for a > 1. Without `scale` the corrected
    /// thresholds are used; `Some(f)` means literal thresholds times f.
    Zeroes {
        scale: Option<f64>,
    },
}

impl Oracle {
    pub fn name(&self) -> &'static str {
        match self {
            Oracle::Residue => "residue",
            Oracle::Theorem1 => "theorem1",
            Oracle::Perturbed { .. } => "perturbed",
            Oracle::Zeroes { .. } => "zeroes",
        }
    }

    pub fn parse(name: &str, scale: Option<f64>) -> Result<Oracle> {
        match name {
            "residue" => Ok(Oracle::Residue),
            "theorem1" => Ok(Oracle::Theorem1),
            "perturbed" => Ok(Oracle::Perturbed { scale }),
            "zeroes" => Ok(Oracle::Zeroes { scale }),
            other => Err(Error::Config(format!(
                "unknown oracle {other:?} (expected residue, theorem1, perturbed or zeroes)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub n: u64,
    pub verdict: Verdict,
    pub sg: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MismatchReport {
    pub oracle: &'static str,
    pub checked: u64,
    pub unknown_count: u64,
    pub mismatch_count: u64,
    /// The first mismatches in index order, at most [`MISMATCH_CAP`].
    pub mismatches: Vec<Mismatch>,
}

/// A prepared oracle: everything except the index is fixed.
pub struct PreparedOracle {
    kind: Oracle,
    d: u64,
    a: u64,
    prefix: Option<SgTable>,
    perturbed: Option<PerturbedThresholds>,
    zeroes: Option<ZeroesThresholds>,
}

impl PreparedOracle {
    pub fn new(spec: &GameSpec, oracle: &Oracle) -> Result<Self> {
        if !spec.b.is_multiple_of(2) {
            return Err(Error::Config(format!("oracles need an even b, got {}", spec.b)));
        }
        let d = spec.b / 2;
        let mut p = PreparedOracle { kind: oracle.clone(), d, a: spec.a, prefix: None, perturbed: None, zeroes: None };
        match oracle {
            Oracle::Residue | Oracle::Theorem1 => {
                if spec.a != 1 {
                    return Err(Error::Config(format!("{} oracle needs a = 1", oracle.name())));
                }
                if matches!(oracle, Oracle::Theorem1) && !spec.overrides.is_empty() {
                    return Err(Error::Config("theorem1 oracle assumes no overrides".into()));
                }
            }
            Oracle::Perturbed { scale } => {
                if spec.a != 1 {
                    return Err(Error::Config("perturbed oracle needs a = 1".into()));
                }
                let big_n = spec.override_end() + 1;
                let th = PerturbedThresholds::literal(d, big_n).scaled(scale.unwrap_or(1.0));
                p.prefix = Some(build_table(spec, th.table)?);
                p.perturbed = Some(th);
            }
            Oracle::Zeroes { scale } => {
                if spec.a < 2 || coprime_part(spec.a, spec.b) != 1 {
                    return Err(Error::Rejected(format!(
                        "zeroes oracle needs a > 1 with every prime factor dividing b (a = {}, b = {})",
                        spec.a, spec.b
                    )));
                }
                let th = match scale {
                    None => ZeroesThresholds::corrected(spec.a, d),
                    Some(f) => ZeroesThresholds::literal(spec.a, d).scaled(*f),
                };
                p.prefix = Some(build_table(spec, th.prefix_len())?);
                p.zeroes = Some(th);
            }
        }
        Ok(p)
    }

    pub fn verdict(&self, n: u64) -> Result<ZeroVerdict> {
        match self.kind {
            Oracle::Residue => Ok(residue_rule(n, self.d)),
            Oracle::Theorem1 => Ok(characterize_1_2d(n, self.d)),
            Oracle::Perturbed { .. } => characterize_perturbed_with(
                n,
                self.d,
                self.perturbed.as_ref().expect("prepared"),
                self.prefix.as_ref().expect("prepared"),
            ),
            Oracle::Zeroes { .. } => characterize_a_2d_with(
                n,
                self.a,
                self.d,
                self.zeroes.as_ref().expect("prepared"),
                self.prefix.as_ref().expect("prepared"),
            ),
        }
    }

    pub fn prefix(&self) -> Option<&SgTable> {
        self.prefix.as_ref()
    }
}

/// Compares the oracle against a table of `spec` for every n <= n_max.
pub fn verify_characterization(spec: &GameSpec, n_max: u64, oracle: &Oracle, workers: usize) -> Result<MismatchReport> {
    let table = build_table(spec, n_max)?;
    verify_against(&table, oracle, workers)
}

pub fn verify_against(table: &SgTable, oracle: &Oracle, workers: usize) -> Result<MismatchReport> {
    let prepared = PreparedOracle::new(table.spec(), oracle)?;
    let parts = sweep::map_ranges(1, table.n_max(), workers, |lo, hi| -> Result<MismatchReport> {
        let mut r = MismatchReport {
            oracle: oracle.name(),
            checked: 0,
            unknown_count: 0,
            mismatch_count: 0,
            mismatches: Vec::new(),
        };
        for n in lo..=hi {
            let v = prepared.verdict(n)?.verdict;
            let sg = table.at(n);
            r.checked += 1;
            let ok = match v {
                Verdict::Unknown => {
                    r.unknown_count += 1;
                    true
                }
                Verdict::Zero => sg == 0,
                Verdict::NonZero => sg != 0,
            };
            if !ok {
                r.mismatch_count += 1;
                if r.mismatches.len() < MISMATCH_CAP {
                    r.mismatches.push(Mismatch { n, verdict: v, sg });
                }
            }
        }
        Ok(r)
    });
    let mut out = MismatchReport {
        oracle: oracle.name(),
        checked: 0,
        unknown_count: 0,
        mismatch_count: 0,
        mismatches: Vec::new(),
    };
    for p in parts {
        let p = p?;
        out.checked += p.checked;
        out.unknown_count += p.unknown_count;
        out.mismatch_count += p.mismatch_count;
        let room = MISMATCH_CAP - out.mismatches.len();
        out.mismatches.extend(p.mismatches.into_iter().take(room));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlternatingReport {
    pub d: u64,
    pub blocks_checked: u64,
    /// Blocks k whose same-parity values differ (index 1 excluded).
    pub violations: Vec<u64>,
    /// Set when the literal first-block comparison fails only because of
    /// the terminal value SG(1): the pair of indices compared.
    pub first_block_terminal_exception: Option<(u64, u64)>,
}

/// Checks that every complete block {2dk - 2d + 1, ..., 2dk} has equal values
/// at its even offsets and equal values at its odd offsets. Index 1 is the
/// terminal position, not a recursive value, and is left out.
pub fn alternating_check(table: &SgTable, d: u64) -> Result<AlternatingReport> {
    let b = check_d(d)?;
    let blocks = table.n_max() / b;
    let mut violations = Vec::new();
    let mut exception = None;
    for k in 1..=blocks {
        let top = b * k;
        let evens = (0..d).map(|j| top - 2 * j);
        let odds = (0..d).map(|j| top - 2 * j - 1);
        let same = |it: &mut dyn Iterator<Item = u64>| {
            let v: Vec<u8> = it.filter(|&n| n != 1).map(|n| table.at(n)).collect();
            v.windows(2).all(|w| w[0] == w[1])
        };
        if !same(&mut evens.clone()) || !same(&mut odds.clone()) {
            violations.push(k);
        } else if k == 1 && d >= 2 && table.at(1) != table.at(3) {
            exception = Some((1, 3));
        }
    }
    Ok(AlternatingReport { d, blocks_checked: blocks, violations, first_block_terminal_exception: exception })
}
