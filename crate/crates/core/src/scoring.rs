//! Accusation scores and threshold tracing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{BitVector, Codebook};
use crate::error::{domain, Error, Result};
use crate::params::Variant;
use crate::scalar::Real;

/// Score of one position for a user holding `x` when the pirates output `y`.
///
/// Matching symbols earn `sqrt((1-p)/p)` (for a one) or `sqrt(p/(1-p))`
/// (for a zero); mismatches lose the same amounts. The asymmetric score
/// ignores positions where `y` is zero.
pub fn symbol_score<T: Real>(x: bool, y: bool, p: T, variant: Variant) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(domain("p", p.as_f64()));
    }
    if !y && variant == Variant::Asymmetric {
        return Ok(T::zero());
    }
    let q = ((T::one() - p) / p).sqrt();
    let inv = (p / (T::one() - p)).sqrt();
    let magnitude = if x { q } else { inv };
    Ok(if x == y { magnitude } else { -magnitude })
}

// Leaves of at most this many terms are summed left to right.
const PAIRWISE_LEAF: usize = 32;

/// Pairwise summation; the tree depends only on `terms.len()`.
pub fn pairwise_sum(terms: &[f64]) -> f64 {
    if terms.len() <= PAIRWISE_LEAF {
        return terms.iter().sum();
    }
    let mid = terms.len() / 2;
    pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
}

/// Per-position scores for `x = 1` and `x = 0` under the forgery `y`.
fn score_table(cb: &Codebook, y: &BitVector, variant: Variant) -> Result<Vec<[f64; 2]>> {
    if y.len() != cb.ell() {
        return Err(Error::DimensionMismatch { expected: cb.ell(), got: y.len() });
    }
    cb.biases()
        .iter()
        .zip(y.iter())
        .map(|(&p, yi)| Ok([symbol_score(false, yi, p, variant)?, symbol_score(true, yi, p, variant)?]))
        .collect()
}

fn user_score(cb: &Codebook, table: &[[f64; 2]], user: usize, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    let words = cb.matrix().row_words(user);
    buf.extend(table.iter().enumerate().map(|(i, t)| t[(words[i / 64] >> (i % 64) & 1) as usize]));
    pairwise_sum(buf)
}

/// Total accusation score `S_j` of every user.
pub fn score_all(cb: &Codebook, y: &BitVector, variant: Variant) -> Result<Vec<f64>> {
    let table = score_table(cb, y, variant)?;
    Ok((0..cb.n())
        .into_par_iter()
        .map_init(Vec::new, |buf, user| user_score(cb, &table, user, buf))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccusationReport {
    pub scores: Vec<f64>,
    pub threshold: f64,
    /// Users with `S_j > threshold`, ascending.
    pub accused: Vec<usize>,
    pub variant: Variant,
}

impl AccusationReport {
    pub fn from_scores(scores: Vec<f64>, threshold: f64, variant: Variant) -> Result<Self> {
        if !threshold.is_finite() {
            return Err(domain("threshold", threshold));
        }
        let accused = scores.iter().enumerate().filter(|(_, &s)| s > threshold).map(|(j, _)| j).collect();
        Ok(Self { scores, threshold, accused, variant })
    }

    pub fn is_accused(&self, user: usize) -> bool {
        self.accused.binary_search(&user).is_ok()
    }
}

pub fn accuse(cb: &Codebook, y: &BitVector, z: f64, variant: Variant) -> Result<AccusationReport> {
    if !z.is_finite() {
        return Err(domain("threshold", z));
    }
    AccusationReport::from_scores(score_all(cb, y, variant)?, z, variant)
}

pub(crate) fn check_members(n: usize, members: &[usize]) -> Result<()> {
    if members.is_empty() {
        return Err(Error::EmptyCoalition);
    }
    for &j in members {
        if j >= n {
            return Err(Error::InvalidIndex { index: j, n });
        }
    }
    Ok(())
}

/// Sum of the member scores `S = sum_{j in C} S_j`.
pub fn coalition_score(cb: &Codebook, y: &BitVector, members: &[usize], variant: Variant) -> Result<f64> {
    check_members(cb.n(), members)?;
    let table = score_table(cb, y, variant)?;
    let mut buf = Vec::with_capacity(cb.ell());
    Ok(members.iter().map(|&j| user_score(cb, &table, j, &mut buf)).sum())
}
