//! Rule identifiers, explicit guards and index transforms.

use std::fmt;

use serde::{Serialize, Serializer};

use super::Step;

/// Case 3 shifts by row; Case 4 rows 3..=15 reuse them.
const CASE3_SHIFT: [u32; 13] = [0, 1, 0, 1, 1, 2, 2, 3, 1, 1, 3, 3, 2];

/// Coefficients kept for guards and tails (covers any u64 in base 2).
pub(crate) const WIDTH: usize = 72;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    /// R = 1, c1 odd: the value is 0.
    C1,
    R1,
    R2,
    R3,
    R4,
    R5_1,
    R5_2,
    R5_3,
    R5_4,
    /// Case 3 row 1..=13.
    C3(u8),
    /// Case 4 row 1..=15; rows 3..=15 are Case 3 rows 1..=13 applied one
    /// digit up.
    C4(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    ToSg,
    ToZero,
}

impl RuleId {
    /// Every rule in table order.
    pub fn all() -> Vec<RuleId> {
        let mut v = vec![
            RuleId::C1,
            RuleId::R1,
            RuleId::R2,
            RuleId::R3,
            RuleId::R4,
            RuleId::R5_1,
            RuleId::R5_2,
            RuleId::R5_3,
            RuleId::R5_4,
        ];
        v.extend((1..=13).map(RuleId::C3));
        v.extend((1..=15).map(RuleId::C4));
        v
    }

    pub fn case(self) -> u8 {
        match self {
            RuleId::C1 => 1,
            RuleId::C3(_) => 3,
            RuleId::C4(_) => 4,
            _ => 2,
        }
    }

    pub fn kind(self) -> RuleKind {
        match self {
            RuleId::C1 | RuleId::R2 | RuleId::R5_1 => RuleKind::ToZero,
            _ => RuleKind::ToSg,
        }
    }

    /// Declared number of base-2d digits lost.
    pub fn shift(self) -> Option<u32> {
        match self {
            RuleId::C1 | RuleId::R2 | RuleId::R5_1 => None,
            RuleId::R1 | RuleId::R3 => Some(1),
            RuleId::R4 | RuleId::R5_2 | RuleId::R5_3 => Some(2),
            RuleId::R5_4 => Some(4),
            RuleId::C3(row) => Some(CASE3_SHIFT[row as usize - 1]),
            RuleId::C4(1) | RuleId::C4(2) => Some(2),
            RuleId::C4(row) => Some(CASE3_SHIFT[row as usize - 3]),
        }
    }

    fn shift_in(self, reading: Reading) -> u32 {
        match self {
            RuleId::C3(7) | RuleId::C4(9) if reading.row7_literal => 1,
            _ => self.shift().unwrap_or(0),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::C1 => write!(f, "C1"),
            RuleId::R1 => write!(f, "R1"),
            RuleId::R2 => write!(f, "R2"),
            RuleId::R3 => write!(f, "R3"),
            RuleId::R4 => write!(f, "R4"),
            RuleId::R5_1 => write!(f, "R5.1"),
            RuleId::R5_2 => write!(f, "R5.2"),
            RuleId::R5_3 => write!(f, "R5.3"),
            RuleId::R5_4 => write!(f, "R5.4"),
            RuleId::C3(r) => write!(f, "C3-row{r}"),
            RuleId::C4(r) => write!(f, "C4-row{r}"),
        }
    }
}

impl Serialize for RuleId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// How to read the two table entries whose literal form does not hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Reading {
    /// Case 3 row 7 as printed: 4d^2 c3 + 8d^3 c4 + ..., shift 1. The
    /// default drops c3 as well (4d^2 c4 + ..., shift 2).
    pub row7_literal: bool,
    /// Case 4 rows 11..=15 tested on c2 as printed instead of c2'.
    pub case4_c2_literal: bool,
    /// Apply rules below the terminal floor too.
    pub ignore_floor: bool,
}

impl Reading {
    pub const DERIVED: Reading = Reading { row7_literal: false, case4_c2_literal: false, ignore_floor: false };
}

fn odd(x: u64) -> bool {
    x % 2 == 1
}

/// Coefficients of a normalized index: `c[0]` is R, `c[i]` is c_i.
pub(crate) struct View {
    pub(crate) b: u64,
    pub(crate) c: [u64; WIDTH],
}

impl View {
    pub(crate) fn new(m: u64, d: u64) -> View {
        let b = 2 * d;
        let mut c = [0u64; WIDTH];
        let mut x = m;
        let mut i = 0;
        while x > 0 {
            c[i] = x % b;
            x /= b;
            i += 1;
        }
        View { b, c }
    }

    /// Coefficients as a Case 3 view one digit up: c2' = c2 + [c1 != 0],
    /// then c3, c4, ...
    fn shifted(&self) -> View {
        let mut c = [0u64; WIDTH];
        c[1] = self.c[2] + u64::from(self.c[1] != 0);
        c[2..WIDTH - 1].copy_from_slice(&self.c[3..WIDTH]);
        View { b: self.b, c }
    }

    pub(crate) fn r(&self) -> u64 {
        self.c[0]
    }

    pub(crate) fn ci(&self, i: usize) -> u64 {
        self.c[i]
    }

    /// c_j + B c_{j+1} + B^2 c_{j+2} + ...
    pub(crate) fn tail(&self, j: usize) -> u128 {
        let b = self.b as u128;
        self.c[j..].iter().rev().fold(0u128, |acc, &x| acc * b + x as u128)
    }

    fn even(&self, lo: usize, hi: usize) -> bool {
        self.c[lo..=hi].iter().all(|&x| x % 2 == 0)
    }

    fn case2(&self) -> bool {
        self.r() == 1 && !odd(self.c[1])
    }

    fn case3(&self) -> bool {
        self.r() == 0 && odd(self.c[1])
    }

    fn case4(&self) -> bool {
        self.r() == 0 && !odd(self.c[1])
    }

    /// Guard of a Case 3 row, with everything earlier rows exclude spelled
    /// out. `g1` is the value tested by the c1 = 1 conditions of rows 9..=13.
    fn case3_guard(&self, row: u8, g1: u64) -> bool {
        let c = &self.c;
        match row {
            1 => odd(c[2]),
            2 => self.even(2, 2) && odd(c[3]),
            3 => self.even(2, 3) && odd(c[4]),
            4 => self.even(2, 4) && odd(c[5]),
            5 => self.even(2, 5) && odd(c[6]) && c[1] != 1,
            6 => self.even(2, 5) && odd(c[6]) && c[1] == 1,
            7 => self.even(2, 6) && odd(c[7]) && c[2] != 0,
            8 => self.even(2, 6) && odd(c[7]) && c[2] == 0,
            9 => self.even(2, 7) && g1 == 1,
            10 => self.even(2, 7) && g1 != 1 && c[2] != 0,
            11 => self.even(2, 7) && g1 != 1 && c[2] == 0 && c[3] != 0,
            12 => self.even(2, 7) && g1 != 1 && c[2] == 0 && c[3] == 0 && c[4] != 0,
            13 => self.even(2, 7) && g1 != 1 && c[2] == 0 && c[3] == 0 && c[4] == 0,
            _ => false,
        }
    }

    pub(crate) fn guard(&self, rule: RuleId, reading: Reading) -> bool {
        let c = &self.c;
        match rule {
            RuleId::C1 => self.r() == 1 && odd(c[1]),
            RuleId::R1 => self.case2() && odd(c[2]),
            RuleId::R2 => self.case2() && self.even(2, 2) && odd(c[3]),
            RuleId::R3 => self.case2() && self.even(2, 3) && odd(c[4]),
            RuleId::R4 => self.case2() && c[1] == 0 && self.even(2, 4),
            RuleId::R5_1 => self.case2() && c[1] != 0 && self.even(2, 4) && odd(c[5]),
            RuleId::R5_2 => self.case2() && c[1] != 0 && self.even(2, 5) && odd(c[6]),
            RuleId::R5_3 => self.case2() && c[1] != 0 && self.even(2, 6) && c[3] == 0,
            RuleId::R5_4 => self.case2() && c[1] != 0 && self.even(2, 6) && c[3] != 0,
            RuleId::C3(row) => self.case3() && self.case3_guard(row, c[1]),
            RuleId::C4(1) => self.case4() && c[1] != 0 && odd(c[2]),
            RuleId::C4(2) => self.case4() && c[1] == 0 && !odd(c[2]),
            RuleId::C4(row) => {
                let into_case3 = (c[1] != 0 && !odd(c[2])) || (c[1] == 0 && odd(c[2]));
                if !self.case4() || !into_case3 {
                    return false;
                }
                let v = self.shifted();
                let g1 = if reading.case4_c2_literal { c[2] } else { v.c[1] };
                v.case3_guard(row - 2, g1)
            }
        }
    }

    /// Reduced index of a Case 3 row.
    fn case3_target(&self, row: u8, reading: Reading) -> u128 {
        let b = self.b as u128;
        let c = |i: usize| self.c[i] as u128;
        let t = |j: usize| self.tail(j);
        match row {
            1 | 3 => b * (c(1) - 1) + b * b * t(2),
            2 | 4 => b * t(2),
            5 => b * b * t(3),
            6 => b * t(3),
            7 if reading.row7_literal => b * b * t(3),
            7 => b * b * t(4),
            8 => b * t(4),
            9 => b * (c(2) + 1) + b * b * t(3),
            10 => b * b * (c(3) + 1) + b * b * b * t(4),
            11 => b * (c(4) + 1) + b * b * t(5),
            12 => b * b * (c(5) + 1) + b * b * b * t(6),
            _ => b * c(1) + b * b * b * t(5),
        }
    }

    /// Result of a rule whose guard holds.
    pub(crate) fn apply(&self, rule: RuleId, reading: Reading) -> Step {
        let b = self.b as u128;
        let c = |i: usize| self.c[i] as u128;
        let t = |j: usize| self.tail(j);
        let to = match rule {
            RuleId::C1 | RuleId::R2 | RuleId::R5_1 => return Step::Zero(rule),
            RuleId::R1 | RuleId::R3 => t(1),
            RuleId::R4 => 1 + b * t(3),
            RuleId::R5_2 => b * t(3),
            RuleId::R5_3 => 1 + b * c(1) + b * b * c(2) + b * b * b * t(5),
            RuleId::R5_4 => 1 + b * t(5),
            RuleId::C3(row) => self.case3_target(row, reading),
            RuleId::C4(1) => t(2) + 1,
            RuleId::C4(2) => t(2),
            RuleId::C4(row) => b * self.shifted().case3_target(row - 2, reading),
        };
        Step::Reduce { rule, to: to as u64, shift: rule.shift_in(reading) }
    }
}
