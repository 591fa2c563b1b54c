//! Admissible break dates under a trimming fraction.
//!
//! A single break `tb` is admissible when `trim*T <= tb <= (1-trim)*T` and
//! `1 <= tb < T`; a pair additionally needs `tb2 - tb1 >= trim*T`. Both
//! bounds are evaluated with a 1e-9 slack so `0.15 * 60` counts as 9.

use crate::error::{Error, Result};

const SLACK: f64 = 1e-9;

pub const MIN_TRIM: f64 = 0.05;
pub const MAX_TRIM: f64 = 0.25;

pub fn validate_trim(t: usize, trim: f64) -> Result<()> {
    if !(MIN_TRIM - SLACK..=MAX_TRIM + SLACK).contains(&trim) {
        return Err(Error::TrimOutOfRange(trim));
    }
    if (t as f64) * trim < 2.0 - SLACK {
        return Err(Error::SeriesTooShort { needed: (2.0 / trim).ceil() as usize, have: t });
    }
    Ok(())
}

fn min_index(t: usize, trim: f64) -> usize {
    ((t as f64 * trim - SLACK).ceil() as usize).max(1)
}

fn max_index(t: usize, trim: f64) -> usize {
    (((1.0 - trim) * t as f64 + SLACK).floor() as usize).min(t - 1)
}

/// Minimum distance between the two dates of a pair.
pub fn min_gap(t: usize, trim: f64) -> usize {
    ((t as f64 * trim - SLACK).ceil() as usize).max(1)
}

/// Candidate single breaks in ascending order.
pub fn single_breaks(t: usize, trim: f64) -> Result<Vec<usize>> {
    validate_trim(t, trim)?;
    let (lo, hi) = (min_index(t, trim), max_index(t, trim));
    if lo > hi {
        return Err(Error::SeriesTooShort { needed: t + 1, have: t });
    }
    Ok((lo..=hi).collect())
}

/// Candidate break pairs in ascending lexicographic order.
pub fn break_pairs(t: usize, trim: f64) -> Result<Vec<(usize, usize)>> {
    let singles = single_breaks(t, trim)?;
    let gap = min_gap(t, trim);
    let pairs: Vec<(usize, usize)> = singles
        .iter()
        .flat_map(|&a| singles.iter().filter(move |&&b| b >= a + gap).map(move |&b| (a, b)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::SeriesTooShort { needed: t + 1, have: t });
    }
    Ok(pairs)
}

/// Index of the smallest value; ties go to the earliest position.
pub fn argmin_first(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        match best {
            Some(b) if values[b] <= *v => {}
            _ => best = Some(i),
        }
    }
    best
}
