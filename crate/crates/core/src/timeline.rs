//! Exact interval algebra over recording time.
//!
//! Times are held as integer ticks of 0.1 ms so that union, intersection and
//! subtraction are exact and associative. Every [`Timeline`] is canonical:
//! sorted, pairwise disjoint and non-adjacent, with half-open intervals.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of ticks in one second.
pub const TICKS_PER_SECOND: i64 = 10_000;

const FRACTION_DIGITS: usize = 4;

/// A point in (or span of) recording time, in units of 0.1 ms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ticks(pub i64);

impl Ticks {
    pub const ZERO: Ticks = Ticks(0);

    pub const fn from_ticks(t: i64) -> Self {
        Ticks(t)
    }

    /// Whole milliseconds.
    pub const fn from_millis(ms: i64) -> Self {
        Ticks(ms * 10)
    }

    pub const fn from_secs(s: i64) -> Self {
        Ticks(s * TICKS_PER_SECOND)
    }

    /// Nearest tick to a float number of seconds.
    pub fn from_secs_f64(s: f64) -> Self {
        Ticks((s * TICKS_PER_SECOND as f64).round() as i64)
    }

    pub const fn ticks(self) -> i64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / TICKS_PER_SECOND as f64
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

impl Add for Ticks {
    type Output = Ticks;
    fn add(self, rhs: Ticks) -> Ticks {
        Ticks(self.0 + rhs.0)
    }
}

impl AddAssign for Ticks {
    fn add_assign(&mut self, rhs: Ticks) {
        self.0 += rhs.0;
    }
}

impl Sub for Ticks {
    type Output = Ticks;
    fn sub(self, rhs: Ticks) -> Ticks {
        Ticks(self.0 - rhs.0)
    }
}

impl SubAssign for Ticks {
    fn sub_assign(&mut self, rhs: Ticks) {
        self.0 -= rhs.0;
    }
}

impl Mul<i64> for Ticks {
    type Output = Ticks;
    fn mul(self, rhs: i64) -> Ticks {
        Ticks(self.0 * rhs)
    }
}

impl std::iter::Sum for Ticks {
    fn sum<I: Iterator<Item = Ticks>>(iter: I) -> Ticks {
        Ticks(iter.map(|t| t.0).sum())
    }
}

/// Fixed-point seconds with exactly four decimals, no exponent.
impl fmt::Display for Ticks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let per = TICKS_PER_SECOND as u64;
        write!(f, "{sign}{}.{:04}", abs / per, abs % per)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid decimal seconds {0:?}")]
pub struct ParseTicksError(pub String);

/// Parses plain decimal seconds (`12`, `130.430000`, `.5`, `-1.25`).
///
/// Digits beyond the fourth decimal are rounded to the nearest tick, halves
/// away from zero. Exponents, `inf` and `nan` are rejected.
impl FromStr for Ticks {
    type Err = ParseTicksError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseTicksError(s.to_string());
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }

        let mut value: i64 = 0;
        for b in int_part.bytes() {
            value = value.checked_mul(10).and_then(|v| v.checked_add(i64::from(b - b'0'))).ok_or_else(err)?;
        }
        value = value.checked_mul(TICKS_PER_SECOND).ok_or_else(err)?;

        let frac = frac_part.as_bytes();
        let mut scale = TICKS_PER_SECOND / 10;
        for &b in frac.iter().take(FRACTION_DIGITS) {
            value += i64::from(b - b'0') * scale;
            scale /= 10;
        }
        if frac.len() > FRACTION_DIGITS && frac[FRACTION_DIGITS] >= b'5' {
            value = value.checked_add(1).ok_or_else(err)?;
        }

        Ok(Ticks(if negative { -value } else { value }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimelineError {
    #[error("degenerate interval [{onset}, {offset}): offset must exceed onset")]
    DegenerateInterval { onset: Ticks, offset: Ticks },
    #[error("negative gap {0}")]
    NegativeGap(Ticks),
}

/// Half-open interval `[onset, offset)` with `offset > onset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    onset: Ticks,
    offset: Ticks,
}

#[derive(Deserialize)]
struct RawInterval {
    onset: Ticks,
    offset: Ticks,
}

impl TryFrom<RawInterval> for Interval {
    type Error = TimelineError;
    fn try_from(raw: RawInterval) -> Result<Self, Self::Error> {
        Interval::new(raw.onset, raw.offset)
    }
}

impl Interval {
    pub fn new(onset: Ticks, offset: Ticks) -> Result<Self, TimelineError> {
        if offset > onset {
            Ok(Interval { onset, offset })
        } else {
            Err(TimelineError::DegenerateInterval { onset, offset })
        }
    }

    /// Convenience constructor from float seconds, rounded to ticks.
    pub fn from_secs(onset: f64, offset: f64) -> Result<Self, TimelineError> {
        Interval::new(Ticks::from_secs_f64(onset), Ticks::from_secs_f64(offset))
    }

    pub fn onset(&self) -> Ticks {
        self.onset
    }

    pub fn offset(&self) -> Ticks {
        self.offset
    }

    pub fn duration(&self) -> Ticks {
        self.offset - self.onset
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.onset, self.offset)
    }
}

/// Canonical set of disjoint, non-adjacent half-open intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct Timeline {
    intervals: Vec<Interval>,
}

impl TryFrom<Vec<Interval>> for Timeline {
    type Error = TimelineError;
    fn try_from(raw: Vec<Interval>) -> Result<Self, Self::Error> {
        Ok(Timeline::from_intervals(raw))
    }
}

impl From<Timeline> for Vec<Interval> {
    fn from(t: Timeline) -> Self {
        t.intervals
    }
}

impl Timeline {
    pub fn empty() -> Self {
        Timeline::default()
    }

    /// Canonicalizes raw `(onset, offset)` pairs; rejects any pair with
    /// `offset <= onset`.
    pub fn normalize<I>(raw: I) -> Result<Self, TimelineError>
    where
        I: IntoIterator<Item = (Ticks, Ticks)>,
    {
        let intervals = raw.into_iter().map(|(on, off)| Interval::new(on, off)).collect::<Result<Vec<_>, _>>()?;
        Ok(Timeline::from_intervals(intervals))
    }

    /// Canonicalizes already-validated intervals (sort, then merge overlapping
    /// or touching neighbours).
    pub fn from_intervals(mut intervals: Vec<Interval>) -> Self {
        intervals.sort_unstable();
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match merged.last_mut() {
                Some(last) if iv.onset <= last.offset => {
                    if iv.offset > last.offset {
                        last.offset = iv.offset;
                    }
                }
                _ => merged.push(iv),
            }
        }
        Timeline { intervals: merged }
    }

    pub fn single(iv: Interval) -> Self {
        Timeline { intervals: vec![iv] }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn duration(&self) -> Ticks {
        self.intervals.iter().map(Interval::duration).sum()
    }

    /// Earliest onset and latest offset, if any.
    pub fn extent(&self) -> Option<Interval> {
        let first = self.intervals.first()?;
        let last = self.intervals.last()?;
        Some(Interval { onset: first.onset, offset: last.offset })
    }

    pub fn intersect(&self, other: &Timeline) -> Timeline {
        let (a, b) = (&self.intervals, &other.intervals);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let onset = a[i].onset.max(b[j].onset);
            let offset = a[i].offset.min(b[j].offset);
            if onset < offset {
                out.push(Interval { onset, offset });
            }
            if a[i].offset < b[j].offset {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces of canonical inputs are already disjoint and non-adjacent.
        Timeline { intervals: out }
    }

    pub fn union(&self, other: &Timeline) -> Timeline {
        let mut all = Vec::with_capacity(self.len() + other.len());
        all.extend_from_slice(&self.intervals);
        all.extend_from_slice(&other.intervals);
        Timeline::from_intervals(all)
    }

    pub fn subtract(&self, other: &Timeline) -> Timeline {
        let b = &other.intervals;
        let mut out = Vec::new();
        let mut j = 0;
        for iv in &self.intervals {
            let mut cursor = iv.onset;
            while j < b.len() && b[j].offset <= cursor {
                j += 1;
            }
            let mut k = j;
            while k < b.len() && b[k].onset < iv.offset {
                if b[k].onset > cursor {
                    out.push(Interval { onset: cursor, offset: b[k].onset });
                }
                cursor = cursor.max(b[k].offset);
                if cursor >= iv.offset {
                    break;
                }
                k += 1;
            }
            if cursor < iv.offset {
                out.push(Interval { onset: cursor, offset: iv.offset });
            }
        }
        Timeline { intervals: out }
    }

    /// Restricts to scoring regions; equivalent to `intersect(regions)`.
    pub fn clip(&self, regions: &Timeline) -> Timeline {
        self.intersect(regions)
    }

    /// Fuses consecutive intervals separated by a gap of at most `max_gap`.
    pub fn bridge_gaps(&self, max_gap: Ticks) -> Result<Timeline, TimelineError> {
        if max_gap.is_negative() {
            return Err(TimelineError::NegativeGap(max_gap));
        }
        let mut out: Vec<Interval> = Vec::with_capacity(self.len());
        for &iv in &self.intervals {
            match out.last_mut() {
                Some(last) if iv.onset - last.offset <= max_gap => last.offset = iv.offset,
                _ => out.push(iv),
            }
        }
        Ok(Timeline { intervals: out })
    }

    /// Checks the canonical-form invariants.
    pub fn is_canonical(&self) -> bool {
        self.intervals.iter().all(|iv| iv.offset > iv.onset)
            && self.intervals.windows(2).all(|w| w[0].offset < w[1].onset)
    }
}
