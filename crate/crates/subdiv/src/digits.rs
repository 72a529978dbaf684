//! Base-b digit strings stored least significant digit first.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigitString {
    base: u64,
    digits: Vec<u64>,
}

impl DigitString {
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digit at position `i`, zero past the end.
    pub fn digit(&self, i: usize) -> u64 {
        self.digits.get(i).copied().unwrap_or(0)
    }

    /// The represented value. Canonical strings built by [`to_digits`] always
    /// fit in a u64.
    pub fn value(&self) -> u64 {
        from_digits(&self.digits, self.base).expect("canonical digit string fits in u64")
    }

    /// Digits most significant first, for display.
    pub fn msd_first(&self) -> Vec<u64> {
        self.digits.iter().rev().copied().collect()
    }
}

pub fn to_digits(mut n: u64, base: u64) -> Result<DigitString> {
    if base < 2 {
        return Err(Error::Config(format!("base must be at least 2, got {base}")));
    }
    let mut digits = Vec::new();
    while n > 0 {
        digits.push(n % base);
        n /= base;
    }
    Ok(DigitString { base, digits })
}

pub fn from_digits(digits: &[u64], base: u64) -> Result<u64> {
    if base < 2 {
        return Err(Error::Config(format!("base must be at least 2, got {base}")));
    }
    let mut v: u64 = 0;
    for &d in digits.iter().rev() {
        if d >= base {
            return Err(Error::Precondition(format!("digit {d} out of range for base {base}")));
        }
        v = v
            .checked_mul(base)
            .and_then(|v| v.checked_add(d))
            .ok_or_else(|| Error::Precondition("digit string exceeds u64".into()))?;
    }
    Ok(v)
}

/// One `e` or `o` per digit, least significant first.
pub fn parity_pattern(ds: &DigitString) -> String {
    ds.digits.iter().map(|d| if d % 2 == 0 { 'e' } else { 'o' }).collect()
}

/// Parity pattern with a `|` after the first even block when the leading
/// digit is odd, e.g. `oee|o`.
pub fn marked_pattern(ds: &DigitString) -> String {
    let p = parity_pattern(ds);
    match first_even_block_length(ds) {
        Ok(k) if 1 + k < p.len() => format!("{}|{}", &p[..1 + k], &p[1 + k..]),
        Ok(_) => p,
        Err(_) => p,
    }
}

/// Deletes the digit at position 1. Requires an odd first digit and an even
/// second digit other than b - 1.
pub fn remove_second_digit(ds: &DigitString) -> Result<DigitString> {
    if ds.len() < 2 {
        return Err(Error::Precondition("need at least two digits".into()));
    }
    if ds.digits[0].is_multiple_of(2) {
        return Err(Error::Precondition("first digit must be odd".into()));
    }
    let second = ds.digits[1];
    if !second.is_multiple_of(2) {
        return Err(Error::Precondition("second digit must be even".into()));
    }
    if second == ds.base - 1 {
        return Err(Error::Precondition("second digit is b - 1; divide directly instead".into()));
    }
    let mut digits = ds.digits.clone();
    digits.remove(1);
    Ok(DigitString { base: ds.base, digits })
}

/// Length of the run of even digits starting at position 1.
pub fn first_even_block_length(ds: &DigitString) -> Result<usize> {
    match ds.digits.first() {
        Some(d) if d % 2 == 1 => Ok(ds.digits[1..].iter().take_while(|&&d| d % 2 == 0).count()),
        _ => Err(Error::Precondition("first digit must be odd".into())),
    }
}
