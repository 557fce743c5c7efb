//! Chip amounts in integer cents. Hand histories quote dollars with optional
//! thousands separators and cents ("$2,214.25"); everything downstream works
//! on exact integers so pots always balance.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoneyError {
    #[error("invalid money literal {0:?}")]
    InvalidLiteral(String),
}

/// A chip amount in cents.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Cents(pub u64);

impl Cents {
    pub const ZERO: Cents = Cents(0);

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn saturating_sub(self, rhs: Cents) -> Cents {
        Cents(self.0.saturating_sub(rhs.0))
    }

    pub fn checked_sub(self, rhs: Cents) -> Option<Cents> {
        self.0.checked_sub(rhs.0).map(Cents)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl Add for Cents {
    type Output = Cents;
    fn add(self, rhs: Cents) -> Cents {
        Cents(self.0 + rhs.0)
    }
}

impl AddAssign for Cents {
    fn add_assign(&mut self, rhs: Cents) {
        self.0 += rhs.0;
    }
}

impl Sub for Cents {
    type Output = Cents;
    fn sub(self, rhs: Cents) -> Cents {
        Cents(self.0 - rhs.0)
    }
}

/// Integer division, e.g. splitting a pot; the caller keeps the remainder.
impl Div<u64> for Cents {
    type Output = Cents;
    fn div(self, rhs: u64) -> Cents {
        Cents(self.0 / rhs)
    }
}

impl Mul<u64> for Cents {
    type Output = Cents;
    fn mul(self, rhs: u64) -> Cents {
        Cents(self.0 * rhs)
    }
}

impl SubAssign for Cents {
    fn sub_assign(&mut self, rhs: Cents) {
        self.0 -= rhs.0;
    }
}

impl Sum for Cents {
    fn sum<I: Iterator<Item = Cents>>(iter: I) -> Cents {
        Cents(iter.map(|c| c.0).sum())
    }
}

impl fmt::Display for Cents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_dollars(*self))
    }
}

/// Parses a dollar literal such as `$6`, `$1,179` or `$2,214.25` into cents.
/// The leading `$` is optional; commas are ignored; cents, when present, must
/// be exactly two digits.
pub fn parse_dollars(text: &str) -> Result<Cents, MoneyError> {
    let err = || MoneyError::InvalidLiteral(text.to_string());
    let body = text.trim().strip_prefix('$').unwrap_or(text.trim());
    if body.is_empty() {
        return Err(err());
    }
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, Some(f)),
        None => (body, None),
    };
    let digits: String = whole.chars().filter(|&c| c != ',').collect();
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let dollars: u64 = digits.parse().map_err(|_| err())?;
    let cents = match frac {
        Some(f) if f.len() == 2 && f.chars().all(|c| c.is_ascii_digit()) => {
            f.parse::<u64>().map_err(|_| err())?
        }
        Some(_) => return Err(err()),
        None => 0,
    };
    Ok(Cents(dollars * 100 + cents))
}

/// Formats cents the way hand histories print them: thousands separators,
/// cents only when non-zero.
pub fn format_dollars(amount: Cents) -> String {
    let dollars = amount.0 / 100;
    let cents = amount.0 % 100;
    let mut whole = String::new();
    let digits = dollars.to_string();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            whole.push(',');
        }
        whole.push(ch);
    }
    if cents == 0 {
        format!("${whole}")
    } else {
        format!("${whole}.{cents:02}")
    }
}
