//! Exact membership degrees and max-min (⊙) composition.
//!
//! Degrees are stored as scaled decimals (`units / 10^scale`), normalized so
//! that structural equality coincides with numeric equality. Minimum, maximum
//! and products of degrees are exact, which lets reports compare values such as
//! `0.7 × 0.5` against `0.35` without tolerances.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest number of decimal digits a degree may carry.
const MAX_SCALE: u32 = 36;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DegreeError {
    #[error("`{0}` is not a decimal literal")]
    Syntax(String),
    #[error("`{0}` lies outside [0,1]")]
    OutOfRange(String),
    #[error("`{0}` has more than {MAX_SCALE} fractional digits")]
    TooPrecise(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShapeError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
}

/// A membership grade in `[0,1]`.
#[derive(Copy, Clone, PartialEq, Eq, Hash)]
pub struct Degree {
    units: u128,
    scale: u32,
}

fn pow10(exp: u32) -> u128 {
    10u128.pow(exp)
}

impl Degree {
    pub const ZERO: Degree = Degree { units: 0, scale: 0 };
    pub const ONE: Degree = Degree { units: 1, scale: 0 };

    fn normalized(mut units: u128, mut scale: u32) -> Degree {
        if units == 0 {
            return Degree::ZERO;
        }
        while scale > 0 && units.is_multiple_of(10) {
            units /= 10;
            scale -= 1;
        }
        Degree { units, scale }
    }

    /// Builds `units / 10^scale`. Panics if the value exceeds one.
    pub fn from_decimal(units: u128, scale: u32) -> Degree {
        assert!(scale <= MAX_SCALE, "degree scale {scale} too large");
        assert!(units <= pow10(scale), "degree {units}e-{scale} exceeds 1");
        Degree::normalized(units, scale)
    }

    pub fn parse(text: &str) -> Result<Degree, DegreeError> {
        let s = text.trim();
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        let digits_ok = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if (int.is_empty() && frac.is_empty()) || !digits_ok(int) || !digits_ok(frac) {
            return Err(DegreeError::Syntax(text.to_string()));
        }
        let frac = frac.trim_end_matches('0');
        let int = int.trim_start_matches('0');
        if frac.len() as u32 > MAX_SCALE {
            return Err(DegreeError::TooPrecise(text.to_string()));
        }
        let scale = frac.len() as u32;
        let int_val: u128 = match int {
            "" => 0,
            "1" => 1,
            _ => return Err(DegreeError::OutOfRange(text.to_string())),
        };
        let frac_val: u128 = if frac.is_empty() { 0 } else { frac.parse().unwrap() };
        let units = int_val * pow10(scale) + frac_val;
        if units > pow10(scale) {
            return Err(DegreeError::OutOfRange(text.to_string()));
        }
        Ok(Degree::normalized(units, scale))
    }

    pub fn is_zero(self) -> bool {
        self.units == 0
    }

    /// `1 - self`, used for the derived controllable / unobservable grades.
    pub fn complement(self) -> Degree {
        Degree::normalized(pow10(self.scale) - self.units, self.scale)
    }

    /// Exact ordinary product.
    pub fn product(self, other: Degree) -> Degree {
        let scale = self.scale + other.scale;
        assert!(scale <= 2 * MAX_SCALE);
        let units = self.units * other.units;
        let (units, scale) = if scale > MAX_SCALE {
            // Only reachable for pathological chains of products; keep exactness
            // whenever the trailing digits are zeros.
            let drop = scale - MAX_SCALE;
            assert!(
                units.is_multiple_of(pow10(drop)),
                "product exceeds {MAX_SCALE} decimal digits"
            );
            (units / pow10(drop), MAX_SCALE)
        } else {
            (units, scale)
        };
        Degree::normalized(units, scale)
    }

    pub fn to_f64(self) -> f64 {
        self.units as f64 / pow10(self.scale) as f64
    }
}

impl Ord for Degree {
    fn cmp(&self, other: &Degree) -> Ordering {
        let s = self.scale.max(other.scale);
        let a = self.units * pow10(s - self.scale);
        let b = other.units * pow10(s - other.scale);
        a.cmp(&b)
    }
}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Degree) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Degree {
    fn default() -> Degree {
        Degree::ZERO
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.units);
        }
        let base = pow10(self.scale);
        write!(
            f,
            "{}.{:0width$}",
            self.units / base,
            self.units % base,
            width = self.scale as usize
        )
    }
}

impl fmt::Debug for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Degree {
    type Err = DegreeError;
    fn from_str(s: &str) -> Result<Degree, DegreeError> {
        Degree::parse(s)
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Degree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Degree, D::Error> {
        let s = String::deserialize(deserializer)?;
        Degree::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A fuzzy state: a possibility distribution over the crisp states.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVector(Vec<Degree>);

impl StateVector {
    pub fn new(entries: Vec<Degree>) -> StateVector {
        StateVector(entries)
    }

    pub fn zeros(n: usize) -> StateVector {
        StateVector(vec![Degree::ZERO; n])
    }

    pub fn ones(n: usize) -> StateVector {
        StateVector(vec![Degree::ONE; n])
    }

    /// Unit vector with a one at `index`.
    pub fn unit(n: usize, index: usize) -> StateVector {
        let mut v = StateVector::zeros(n);
        v.0[index] = Degree::ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Degree] {
        &self.0
    }

    /// Largest entry; zero for the empty vector.
    pub fn height(&self) -> Degree {
        self.0.iter().copied().max().unwrap_or(Degree::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|d| d.is_zero())
    }

    /// `max_i min(self[i], other[i])`, i.e. `self ⊙ otherᵀ`.
    pub fn meet_height(&self, other: &StateVector) -> Degree {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| *a.min(b))
            .max()
            .unwrap_or(Degree::ZERO)
    }

    pub fn maxmin(&self, m: &EventMatrix) -> Result<StateVector, ShapeError> {
        if self.dim() != m.dim() {
            return Err(ShapeError::DimensionMismatch {
                left: self.dim(),
                right: m.dim(),
            });
        }
        Ok(self.step(m))
    }

    /// Unchecked `self ⊙ m`; callers guarantee matching dimensions.
    pub(crate) fn step(&self, m: &EventMatrix) -> StateVector {
        debug_assert_eq!(self.dim(), m.dim());
        let n = m.dim();
        let out = (0..n)
            .map(|j| {
                (0..n)
                    .map(|l| self.0[l].min(m.get(l, j)))
                    .max()
                    .unwrap_or(Degree::ZERO)
            })
            .collect();
        StateVector(out)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A fuzzy event: square transition-possibility matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EventMatrix {
    n: usize,
    entries: Vec<Degree>,
}

impl EventMatrix {
    pub fn from_rows(rows: Vec<Vec<Degree>>) -> Result<EventMatrix, ShapeError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(ShapeError::Ragged {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
            entries.extend(r);
        }
        Ok(EventMatrix { n, entries })
    }

    pub fn identity(n: usize) -> EventMatrix {
        let mut m = EventMatrix::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = Degree::ONE;
        }
        m
    }

    pub fn zero(n: usize) -> EventMatrix {
        EventMatrix {
            n,
            entries: vec![Degree::ZERO; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Degree {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Degree]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    pub fn maxmin(&self, other: &EventMatrix) -> Result<EventMatrix, ShapeError> {
        if self.n != other.n {
            return Err(ShapeError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let c = (0..n)
                    .map(|l| self.get(i, l).min(other.get(l, j)))
                    .max()
                    .unwrap_or(Degree::ZERO);
                entries.push(c);
            }
        }
        Ok(EventMatrix { n, entries })
    }
}

impl fmt::Debug for EventMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows().map(|r| StateVector(r.to_vec())))
            .finish()
    }
}

pub fn maxmin_vec_mat(v: &StateVector, m: &EventMatrix) -> Result<StateVector, ShapeError> {
    v.maxmin(m)
}

pub fn maxmin_mat_mat(a: &EventMatrix, b: &EventMatrix) -> Result<EventMatrix, ShapeError> {
    a.maxmin(b)
}

pub fn height(v: &StateVector) -> Degree {
    v.height()
}
