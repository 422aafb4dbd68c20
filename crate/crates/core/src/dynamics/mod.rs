//! Parallel-update sorting dynamics.
//!
//! A [`TriString`] is a configuration over `{0, 1, 2}` and a [`BiString`]
//! one over `{0, 2}`. Both are stored one byte per symbol holding the value
//! `0`, `1` or `2` (not the ASCII digit) and serialize as ASCII digits with
//! no separators.
//!
//! [`step_three`] and [`step_two`] are direct full-scan implementations of
//! the step maps and serve as the reference. Stabilization runs on the
//! [`Stepper`], whose work per step is proportional to the number of swaps.
//! [`stabilization_time_two`] and [`excess_fast`] compute the same
//! quantities without stepping the whole string.

mod fast;
mod stepper;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fast::{excess_fast, fast_times, stabilization_time_two, FastTimes};
pub use stepper::Stepper;

macro_rules! symbol_string {
    ($name:ident, $allowed:expr) => {
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Vec<u8>);

        impl $name {
            /// Builds a string from symbol values (not ASCII digits).
            pub fn new(symbols: Vec<u8>) -> Result<Self> {
                if symbols.is_empty() {
                    return Err(Error::Empty);
                }
                if let Some((position, &s)) = symbols
                    .iter()
                    .enumerate()
                    .find(|(_, s)| !$allowed.contains(*s))
                {
                    return Err(Error::InvalidSymbol {
                        symbol: char::from_digit(s as u32, 36).unwrap_or('?'),
                        position,
                    });
                }
                Ok(Self(symbols))
            }

            /// Parses ASCII digits, e.g. `"0122102"`.
            pub fn parse(text: &str) -> Result<Self> {
                let symbols = text
                    .chars()
                    .enumerate()
                    .map(|(position, c)| match c.to_digit(10) {
                        Some(d) if $allowed.contains(&(d as u8)) => Ok(d as u8),
                        _ => Err(Error::InvalidSymbol {
                            symbol: c,
                            position,
                        }),
                    })
                    .collect::<Result<Vec<u8>>>()?;
                Self::new(symbols)
            }

            pub fn symbols(&self) -> &[u8] {
                &self.0
            }

            pub fn into_symbols(self) -> Vec<u8> {
                self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            /// Always false; strings have length at least one.
            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn count(&self, symbol: u8) -> usize {
                self.0.iter().filter(|&&s| s == symbol).count()
            }

            pub fn is_sorted_nonincreasing(&self) -> bool {
                is_sorted_nonincreasing(&self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let text: String = self.0.iter().map(|&s| char::from(b'0' + s)).collect();
                f.write_str(&text)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), self)
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                Self::parse(s)
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(
                &self,
                s: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(
                d: D,
            ) -> std::result::Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                Self::parse(&text).map_err(serde::de::Error::custom)
            }
        }
    };
}

symbol_string!(TriString, [0u8, 1, 2]);
symbol_string!(BiString, [0u8, 2]);

impl TriString {
    /// 1-based position of the second class particle when there is exactly
    /// one, `None` when there is none.
    pub fn second_class_position(&self) -> Result<Option<usize>> {
        let mut found = None;
        let mut count = 0;
        for (i, &s) in self.0.iter().enumerate() {
            if s == 1 {
                count += 1;
                found = Some(i + 1);
            }
        }
        match count {
            0 | 1 => Ok(found),
            _ => Err(Error::SecondClassCount {
                expected: "at most one",
                found: count,
            }),
        }
    }

    /// Like [`second_class_position`](Self::second_class_position) but
    /// requires exactly one `1`.
    pub fn unique_second_class(&self) -> Result<usize> {
        self.second_class_position()?
            .ok_or(Error::SecondClassCount {
                expected: "exactly one",
                found: 0,
            })
    }
}

impl From<BiString> for TriString {
    fn from(b: BiString) -> Self {
        TriString(b.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Projection {
    /// `0, 1 -> 0` and `2 -> 2`.
    First,
    /// `0 -> 0` and `1, 2 -> 2`.
    Second,
}

pub fn project(t: &TriString, which: Projection) -> BiString {
    let map = match which {
        Projection::First => [0u8, 0, 2],
        Projection::Second => [0u8, 2, 2],
    };
    BiString(t.0.iter().map(|&s| map[s as usize]).collect())
}

pub fn is_sorted_nonincreasing(symbols: &[u8]) -> bool {
    symbols.windows(2).all(|w| w[0] >= w[1])
}

/// One step of the two-type dynamics: every `02` becomes `20`.
pub fn step_two(b: &BiString) -> BiString {
    let w = &b.0;
    let mut out = w.clone();
    let mut i = 0;
    while i + 1 < w.len() {
        if w[i] == 0 && w[i + 1] == 2 {
            out[i] = 2;
            out[i + 1] = 0;
            i += 2;
        } else {
            i += 1;
        }
    }
    BiString(out)
}

/// One step of the three-type dynamics.
///
/// Each `012` becomes `021`. Every other increasing pair `w[i] < w[i+1]`
/// with `w[i-1] >= w[i]` and `w[i+1] >= w[i+2]` is swapped, where the
/// comparisons against the positions outside the string always hold. All
/// decisions read the input string only.
pub fn step_three(t: &TriString) -> TriString {
    let w = &t.0;
    let n = w.len();
    let mut out = w.clone();
    for i in 0..n.saturating_sub(2) {
        if w[i] == 0 && w[i + 1] == 1 && w[i + 2] == 2 {
            out[i + 1] = 2;
            out[i + 2] = 1;
        }
    }
    for i in 0..n.saturating_sub(1) {
        let (a, b) = (w[i], w[i + 1]);
        let left = i == 0 || w[i - 1] >= a;
        let right = i + 2 >= n || b >= w[i + 2];
        if a < b && left && right {
            out[i] = b;
            out[i + 1] = a;
        }
    }
    TriString(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationOutcome<S> {
    #[serde(rename = "final")]
    pub final_config: S,
    pub steps: usize,
    /// `steps + 1` configurations from the input to the fixed point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<S>>,
}

fn stabilize_symbols(symbols: &[u8], record: bool) -> (Vec<u8>, usize, Option<Vec<Vec<u8>>>) {
    let mut stepper = Stepper::new(symbols);
    let mut trajectory = record.then(|| vec![symbols.to_vec()]);
    let mut steps = 0;
    while stepper.step() > 0 {
        steps += 1;
        if let Some(t) = trajectory.as_mut() {
            t.push(stepper.cells().to_vec());
        }
    }
    (stepper.into_cells(), steps, trajectory)
}

pub fn stabilize_two(b: &BiString, record_trajectory: bool) -> StabilizationOutcome<BiString> {
    let (cells, steps, trajectory) = stabilize_symbols(&b.0, record_trajectory);
    StabilizationOutcome {
        final_config: BiString(cells),
        steps,
        trajectory: trajectory.map(|t| t.into_iter().map(BiString).collect()),
    }
}

pub fn stabilize_three(t: &TriString, record_trajectory: bool) -> StabilizationOutcome<TriString> {
    let (cells, steps, trajectory) = stabilize_symbols(&t.0, record_trajectory);
    StabilizationOutcome {
        final_config: TriString(cells),
        steps,
        trajectory: trajectory.map(|t| t.into_iter().map(TriString).collect()),
    }
}

/// Extra steps the three-type string needs beyond its first projection.
pub fn excess(t: &TriString) -> usize {
    let three = stabilize_three(t, false).steps;
    let two = stabilize_two(&project(t, Projection::First), false).steps;
    debug_assert!(three >= two);
    three - two
}

/// Reference stabilization by repeated full scans with [`step_three`].
pub fn stabilize_three_naive(t: &TriString) -> (TriString, usize) {
    let mut current = t.clone();
    let mut steps = 0;
    loop {
        let next = step_three(&current);
        if next == current {
            return (current, steps);
        }
        current = next;
        steps += 1;
    }
}

/// Reference stabilization by repeated full scans with [`step_two`].
pub fn stabilize_two_naive(b: &BiString) -> (BiString, usize) {
    let mut current = b.clone();
    let mut steps = 0;
    loop {
        let next = step_two(&current);
        if next == current {
            return (current, steps);
        }
        current = next;
        steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(s: &str) -> TriString {
        s.parse().unwrap()
    }

    fn bi(s: &str) -> BiString {
        s.parse().unwrap()
    }

    #[test]
    fn projections() {
        assert_eq!(
            project(&tri("0122102"), Projection::First).to_string(),
            "0022002"
        );
        assert_eq!(
            project(&tri("0122102"), Projection::Second).to_string(),
            "0222202"
        );
        assert_eq!(project(&tri("012"), Projection::Second).to_string(), "022");
    }

    #[test]
    fn two_type_steps() {
        assert_eq!(step_two(&bi("02")).to_string(), "20");
        assert_eq!(step_two(&bi("0202")).to_string(), "2020");
        assert_eq!(step_two(&bi("0022002")).to_string(), "0202020");
        // One step of the stabilization oracle agrees.
        let out = stabilize_two(&bi("0022002"), true);
        assert_eq!(out.trajectory.unwrap()[1].to_string(), "0202020");
    }

    #[test]
    fn three_type_steps() {
        assert_eq!(step_three(&tri("0122102")).to_string(), "0212120");
        assert_eq!(step_three(&tri("2021210")).to_string(), "2202110");
        assert_eq!(step_three(&tri("012")).to_string(), "021");
    }

    #[test]
    fn stabilization_examples() {
        let s = stabilize_two(&bi("20"), false);
        assert_eq!((s.final_config.to_string(), s.steps), ("20".into(), 0));
        let s = stabilize_two(&bi("0022002"), false);
        assert_eq!((s.final_config.to_string(), s.steps), ("2220000".into(), 4));
        let s = stabilize_two(&bi("02"), false);
        assert_eq!((s.final_config.to_string(), s.steps), ("20".into(), 1));

        let s = stabilize_three(&tri("0122102"), false);
        assert_eq!((s.final_config.to_string(), s.steps), ("2221100".into(), 6));
        let s = stabilize_three(&tri("210"), false);
        assert_eq!((s.final_config.to_string(), s.steps), ("210".into(), 0));
        let s = stabilize_three(&tri("012"), true);
        assert_eq!(s.steps, 3);
        let path: Vec<String> = s
            .trajectory
            .unwrap()
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert_eq!(path, ["012", "021", "201", "210"]);
    }

    #[test]
    fn excess_examples() {
        assert_eq!(excess(&tri("102")), 0);
        assert_eq!(excess(&tri("012")), 1);
        assert_eq!(excess(&tri("2010")), 1);
    }

    #[test]
    fn sortedness() {
        assert!(tri("2210").is_sorted_nonincreasing());
        assert!(!tri("0122102").is_sorted_nonincreasing());
        assert!(tri("2").is_sorted_nonincreasing());
    }

    #[test]
    fn second_projection_does_not_intertwine() {
        let t = tri("012");
        let lhs = project(&step_three(&t), Projection::Second);
        let rhs = step_two(&project(&t, Projection::Second));
        assert_eq!(lhs.to_string(), "022");
        assert_eq!(rhs.to_string(), "202");
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            TriString::parse("0132"),
            Err(Error::InvalidSymbol {
                symbol: '3',
                position: 2
            })
        );
        assert!(matches!(
            BiString::parse("021"),
            Err(Error::InvalidSymbol { position: 2, .. })
        ));
        assert_eq!(TriString::parse(""), Err(Error::Empty));
        assert!(tri("0110").second_class_position().is_err());
        assert_eq!(tri("0210").second_class_position(), Ok(Some(3)));
        assert!(tri("0220").unique_second_class().is_err());
    }
}
