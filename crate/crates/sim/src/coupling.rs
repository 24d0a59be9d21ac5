//! Rank coupling of reserve prices to a value metric.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Serialize, Serializer};
use wdmarket::rng::Rng;

/// Correlation scenario between reserve prices and a value metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rho {
    Negative,
    Independent,
    Positive,
}

impl Rho {
    pub const ALL: [Rho; 3] = [Rho::Negative, Rho::Independent, Rho::Positive];

    pub fn value(self) -> i8 {
        match self {
            Rho::Negative => -1,
            Rho::Independent => 0,
            Rho::Positive => 1,
        }
    }

    /// Filename-safe tag: `m1`, `0`, `p1`.
    pub fn tag(self) -> &'static str {
        match self {
            Rho::Negative => "m1",
            Rho::Independent => "0",
            Rho::Positive => "p1",
        }
    }
}

impl fmt::Display for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl FromStr for Rho {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim() {
            "-1" => Ok(Rho::Negative),
            "0" => Ok(Rho::Independent),
            "1" | "+1" => Ok(Rho::Positive),
            _ => Err(()),
        }
    }
}

impl Serialize for Rho {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

/// Reorders `draws` so their ranks follow `values` (`Positive`), run
/// against them (`Negative`), or stay as drawn (`Independent`). The multiset
/// of draws is untouched, so the marginal is whatever produced them.
///
/// Ties in `values` are broken by index.
pub fn couple_ranks(values: &[f64], draws: &[f64], rho: Rho) -> Vec<f64> {
    assert_eq!(values.len(), draws.len(), "one draw per value");
    if rho == Rho::Independent {
        return draws.to_vec();
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    if rho == Rho::Negative {
        sorted.reverse();
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = sorted[rank];
    }
    out
}

/// `N` draws from `U(0, upper)` coupled to `values`.
pub fn couple_correlation(values: &[f64], upper: f64, rho: Rho, rng: &mut Rng) -> Vec<f64> {
    let draws: Vec<f64> = values.iter().map(|_| upper * rng.random::<f64>()).collect();
    couple_ranks(values, &draws, rho)
}
