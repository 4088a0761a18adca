//! Minimising the codelength constant `d_ell`.
//!
//! For a fixed triple `(r, s, g)` the optimal remaining constants have closed
//! forms ([`candidate_from`]); what is left is a three dimensional search
//! over the triple, done here as a fixed grid followed by Nelder–Mead polish.
//! [`optimize_generic`] solves the same problem for either score variant
//! without the closed forms, by root finding and line search on the slacks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{c1_slack, check_c, check_constraints, check_eta, ParamSet, Variant};
use crate::error::{domain, Error, Result};
use crate::numerics::{bisect, h, h_inv};
use crate::scalar::Real;

const R_GRID: usize = 64;
const S_GRID: usize = 96;
const G_GRID: usize = 96;
const R_OFFSET_RANGE: (f64, f64) = (1e-3, 3.5);
const S_RANGE: (f64, f64) = (0.01, 25.0);
const G_MARGIN: f64 = 1e-3;
const POLISH_STEPS: [f64; 3] = [0.25, 0.05, 0.01];

// coarser grid for the numerical route; each point costs a root find and a line search
const GENERIC_GRID: (usize, usize, usize) = (24, 32, 32);

/// Optimal `(d_delta, d_alpha, d_z, d_ell)` for a fixed `(r, s, g)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate<T> {
    pub d_delta: T,
    pub d_alpha: T,
    pub d_z: T,
    pub d_ell: T,
}

impl<T: Real> Candidate<T> {
    pub fn into_param_set(self, r: T, s: T, g: T, variant: Variant) -> ParamSet<T> {
        ParamSet {
            d_ell: self.d_ell,
            d_z: self.d_z,
            d_delta: self.d_delta,
            d_alpha: self.d_alpha,
            r,
            s,
            g,
            variant,
        }
    }
}

/// Closed-form optimum of the symmetric requirements at fixed `(r, s, g)`.
///
/// `d_delta` makes (C1') tight, `d_alpha` is the larger of the (S1) bound and
/// the minimiser of `d_ell` along (S2), and `d_z`, `d_ell` make (S2) and (C2)
/// tight.
pub fn candidate_from<T: Real>(r: T, s: T, g: T, c: u64, eta: T) -> Result<Candidate<T>> {
    check_c(c)?;
    check_eta(eta)?;
    if !(r > T::lit(0.5)) || !r.is_finite() {
        return Err(domain("r", r.as_f64()));
    }
    if !(s > T::zero()) || !s.is_finite() {
        return Err(domain("s", s.as_f64()));
    }
    if !(g > T::zero() && g < T::FRAC_2_PI()) {
        return Err(domain("g", g.as_f64()));
    }
    let h_r = h(r)?;
    let a_s = h_inv(s)? * s;
    closed_form(r, h_r, s, a_s, g, T::from_count(c), eta)
}

fn closed_form<T: Real>(r: T, h_r: T, s: T, a_s: T, g: T, c: T, eta: T) -> Result<Candidate<T>> {
    let two = T::lit(2.0);
    let sqrt_c = c.sqrt();
    let gap = T::FRAC_2_PI() - g;
    let disc = a_s * a_s / c + T::lit(16.0) * T::FRAC_1_PI() * gap;
    let root_delta = (disc.sqrt() + a_s / sqrt_c) / (two * two * T::FRAC_1_PI() - two * g);
    let d_delta = root_delta * root_delta;
    let spread = (d_delta / (s * s * c)).sqrt();
    let ratio = r / g;
    let s1_bound = root_delta / (h_r * sqrt_c);
    let stationary = ratio + (ratio * ratio + ratio * eta * spread).sqrt();
    let d_alpha = s1_bound.max(stationary);
    let denom = g * d_alpha - r;
    let d_z = (g * d_alpha * d_alpha + r * eta * spread) / denom;
    // (C2) holds with equality; a few ulps of headroom keep it feasible after rounding
    let d_ell = (eta * spread + d_z) / g * (T::one() + T::lit(8.0) * T::epsilon());
    let out = Candidate { d_delta, d_alpha, d_z, d_ell };
    let ok = [d_delta, d_alpha, d_z, d_ell].iter().all(|v| v.is_finite() && *v > T::zero())
        && denom > T::zero()
        && d_delta > T::one();
    if ok {
        Ok(out)
    } else {
        Err(Error::InfeasibleCandidate(format!(
            "r = {r}, s = {s}, g = {g}: d_delta = {d_delta}, d_alpha = {d_alpha}, d_z = {d_z}, d_ell = {d_ell}"
        )))
    }
}

/// Maps unconstrained coordinates onto `r > 1/2`, `s > 0`, `0 < g < g_max`.
#[derive(Debug, Clone, Copy)]
struct Chart<T> {
    g_max: T,
}

impl<T: Real> Chart<T> {
    fn point(&self, v: &[T]) -> (T, T, T) {
        let r = T::lit(0.5) + v[0].exp();
        let s = v[1].exp();
        let g = self.g_max / (T::one() + (-v[2]).exp());
        (r, s, g)
    }

    fn coords(&self, r: T, s: T, g: T) -> [T; 3] {
        let frac = g / self.g_max;
        [(r - T::lit(0.5)).ln(), s.ln(), (frac / (T::one() - frac)).ln()]
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let ratio = (hi / lo).ln();
    (0..n).map(move |i| lo * (ratio * i as f64 / (n - 1) as f64).exp())
}

fn lin_space(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

struct Axes<T> {
    r: Vec<(T, T)>,
    s: Vec<(T, T)>,
    g: Vec<T>,
}

impl<T: Real> Axes<T> {
    fn new(sizes: (usize, usize, usize), g_max: f64) -> Result<Self> {
        let r = log_space(R_OFFSET_RANGE.0, R_OFFSET_RANGE.1, sizes.0)
            .map(|off| {
                let r = T::lit(0.5 + off);
                h(r).map(|hr| (r, hr))
            })
            .collect::<Result<_>>()?;
        let s = log_space(S_RANGE.0, S_RANGE.1, sizes.1)
            .map(|s| {
                let s = T::lit(s);
                h_inv(s).map(|hi| (s, hi * s))
            })
            .collect::<Result<_>>()?;
        let g = lin_space(G_MARGIN, g_max - G_MARGIN, sizes.2).map(T::lit).collect();
        Ok(Self { r, s, g })
    }

    /// Best grid triple under `eval`, which returns `None` where infeasible.
    fn best<F>(&self, eval: F) -> Option<(T, T, T, T)>
    where
        F: Fn(T, T, T, T, T) -> Option<T>,
    {
        let mut best: Option<(T, T, T, T)> = None;
        for &(r, h_r) in &self.r {
            for &(s, a_s) in &self.s {
                for &g in &self.g {
                    if let Some(v) = eval(r, h_r, s, a_s, g) {
                        if best.is_none_or(|b| v < b.0) {
                            best = Some((v, r, s, g));
                        }
                    }
                }
            }
        }
        best
    }
}

/// Minimal `d_ell` septuple for the symmetric score at `(c, eta)`.
pub fn optimize<T: Real>(c: u64, eta: T) -> Result<ParamSet<T>> {
    check_c(c)?;
    check_eta(eta)?;
    let cf = T::from_count(c);
    let axes = Axes::<T>::new((R_GRID, S_GRID, G_GRID), std::f64::consts::FRAC_2_PI)?;
    let (_, r0, s0, g0) = axes
        .best(|r, h_r, s, a_s, g| closed_form(r, h_r, s, a_s, g, cf, eta).ok().map(|cand| cand.d_ell))
        .ok_or_else(|| Error::InfeasibleCandidate("no feasible grid point".into()))?;

    let objective = |r: T, s: T, g: T| -> Option<T> {
        let h_r = h(r).ok()?;
        let a_s = h_inv(s).ok()? * s;
        closed_form(r, h_r, s, a_s, g, cf, eta).ok().map(|cand| cand.d_ell)
    };
    let (r, s, g) = polish(Chart { g_max: T::FRAC_2_PI() }, (r0, s0, g0), objective);
    let cand = candidate_from(r, s, g, c, eta)?;
    Ok(cand.into_param_set(r, s, g, Variant::Symmetric))
}

/// Minimal `d_ell` septuple for either score variant, found numerically from
/// the constraint slacks alone.
///
/// For each `(r, s, g)` the smallest `d_delta` meeting (C1)/(C1') is found
/// by bisection, and `d_alpha` by golden section on the `d_ell` implied by
/// making (S2) and (C2) tight.
pub fn optimize_generic<T: Real>(c: u64, eta: T, variant: Variant) -> Result<ParamSet<T>> {
    check_c(c)?;
    check_eta(eta)?;
    let cf = T::from_count(c);
    let g_max: T = variant.g_max();
    let axes = Axes::<T>::new(GENERIC_GRID, g_max.as_f64())?;
    let (_, r0, s0, g0) = axes
        .best(|r, h_r, s, a_s, g| numeric_candidate(variant, r, h_r, s, a_s, g, cf, eta).map(|cand| cand.d_ell))
        .ok_or_else(|| Error::InfeasibleCandidate("no feasible grid point".into()))?;

    let objective = |r: T, s: T, g: T| -> Option<T> {
        let h_r = h(r).ok()?;
        let a_s = h_inv(s).ok()? * s;
        numeric_candidate(variant, r, h_r, s, a_s, g, cf, eta).map(|cand| cand.d_ell)
    };
    let (r, s, g) = polish(Chart { g_max }, (r0, s0, g0), objective);
    let h_r = h(r)?;
    let a_s = h_inv(s)? * s;
    let cand = numeric_candidate(variant, r, h_r, s, a_s, g, cf, eta)
        .ok_or_else(|| Error::InfeasibleCandidate(format!("polished point r = {r}, s = {s}, g = {g}")))?;
    let p = cand.into_param_set(r, s, g, variant);
    let slack = check_constraints(&p, c, eta)?;
    if !slack.feasible {
        return Err(Error::InfeasibleCandidate(format!("{slack:?}")));
    }
    Ok(p)
}

#[allow(clippy::too_many_arguments)]
fn numeric_candidate<T: Real>(variant: Variant, r: T, h_r: T, s: T, a_s: T, g: T, c: T, eta: T) -> Option<Candidate<T>> {
    let c1 = |d_delta: T| c1_slack(variant, d_delta, a_s, g, c);
    let mut hi = T::lit(2.0);
    while c1(hi) < T::zero() {
        hi = hi * T::lit(2.0);
        if hi > T::lit(1e15) {
            return None;
        }
    }
    let tol = hi * T::epsilon() * T::lit(16.0);
    let mut d_delta = bisect(c1, T::one(), hi, tol).ok()?;
    // step to the feasible side of the bracket
    while c1(d_delta) < T::zero() {
        d_delta = d_delta + tol;
    }

    let spread = (d_delta / (s * s * c)).sqrt();
    let ratio = r / g;
    let floor = (d_delta.sqrt() / (h_r * c.sqrt())).max(ratio * (T::one() + T::lit(1e-9)));
    let d_z_of = |d_alpha: T| (g * d_alpha * d_alpha + r * eta * spread) / (g * d_alpha - r);
    let d_ell_of = |d_alpha: T| (eta * spread + d_z_of(d_alpha)) / g;
    let ceiling = floor + T::lit(4.0) * ratio + eta * spread + T::one();
    let d_alpha = golden_section(d_ell_of, floor, ceiling);
    let d_z = d_z_of(d_alpha);
    let d_ell = d_ell_of(d_alpha);
    let ok = [d_delta, d_alpha, d_z, d_ell].iter().all(|v| v.is_finite() && *v > T::zero());
    ok.then_some(Candidate { d_delta, d_alpha, d_z, d_ell })
}

fn golden_section<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T) -> T {
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if b - a <= T::epsilon() * T::lit(8.0) * (T::one() + a.abs()) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let mid = (a + b) * T::lit(0.5);
    // the minimum may sit on the lower boundary
    if f(lo) <= f(mid) {
        lo
    } else {
        mid
    }
}

fn polish<T, F>(chart: Chart<T>, start: (T, T, T), objective: F) -> (T, T, T)
where
    T: Real,
    F: Fn(T, T, T) -> Option<T>,
{
    let cost = |v: &[T]| {
        let (r, s, g) = chart.point(v);
        objective(r, s, g).unwrap_or(T::infinity())
    };
    let mut x = chart.coords(start.0, start.1, start.2).to_vec();
    let mut fx = cost(&x);
    for step in POLISH_STEPS {
        let nm = NelderMead { step: T::lit(step), ..NelderMead::default() };
        let (y, fy) = nm.minimize(&cost, &x);
        if fy <= fx {
            x = y;
            fx = fy;
        }
    }
    chart.point(&x)
}

/// Derivative-free simplex minimiser.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead<T> {
    /// Initial simplex edge along each axis.
    pub step: T,
    pub max_iter: usize,
    /// Stop once the spread of simplex values falls below this (relative) level...
    pub f_tol: T,
    /// ...and the simplex fits inside a box of this width.
    pub x_tol: T,
}

impl<T: Real> Default for NelderMead<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        Self {
            step: T::lit(0.1),
            max_iter: 4000,
            f_tol: T::lit(1e-15).max(eps * T::lit(4.0)),
            x_tol: T::lit(1e-11).max(eps.sqrt()),
        }
    }
}

impl<T: Real> NelderMead<T> {
    pub fn minimize<F: Fn(&[T]) -> T>(&self, f: F, x0: &[T]) -> (Vec<T>, T) {
        let dim = x0.len();
        let half = T::lit(0.5);
        let mut simplex: Vec<Vec<T>> = Vec::with_capacity(dim + 1);
        simplex.push(x0.to_vec());
        for i in 0..dim {
            let mut v = x0.to_vec();
            v[i] = v[i] + self.step;
            simplex.push(v);
        }
        let mut values: Vec<T> = simplex.iter().map(|v| f(v)).collect();

        for _ in 0..self.max_iter {
            let mut order: Vec<usize> = (0..=dim).collect();
            order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let best = values[0];
            let worst = values[dim];
            let spread = (worst - best).abs();
            let width = (1..=dim)
                .flat_map(|i| (0..dim).map(move |j| (i, j)))
                .map(|(i, j)| (simplex[i][j] - simplex[0][j]).abs())
                .fold(T::zero(), T::max);
            if best.is_finite() && spread <= self.f_tol * (T::one() + best.abs()) && width <= self.x_tol {
                break;
            }

            let mut centroid = vec![T::zero(); dim];
            for v in &simplex[..dim] {
                for (c, &x) in centroid.iter_mut().zip(v) {
                    *c = *c + x;
                }
            }
            let nf = T::from_count(dim as u64);
            centroid.iter_mut().for_each(|c| *c = *c / nf);
            let along = |t: T| -> Vec<T> {
                centroid.iter().zip(&simplex[dim]).map(|(&c, &w)| c + t * (c - w)).collect()
            };

            let reflected = along(T::one());
            let f_r = f(&reflected);
            if f_r < values[0] {
                let expanded = along(T::lit(2.0));
                let f_e = f(&expanded);
                if f_e < f_r {
                    simplex[dim] = expanded;
                    values[dim] = f_e;
                } else {
                    simplex[dim] = reflected;
                    values[dim] = f_r;
                }
                continue;
            }
            if f_r < values[dim - 1] {
                simplex[dim] = reflected;
                values[dim] = f_r;
                continue;
            }
            let (contracted, f_c) = if f_r < values[dim] {
                let v = along(half);
                let fv = f(&v);
                (v, fv)
            } else {
                let v = along(-half);
                let fv = f(&v);
                (v, fv)
            };
            if f_c < values[dim].min(f_r) {
                simplex[dim] = contracted;
                values[dim] = f_c;
                continue;
            }
            // shrink toward the best vertex
            let anchor = simplex[0].clone();
            for i in 1..=dim {
                for (x, &a) in simplex[i].iter_mut().zip(&anchor) {
                    *x = a + half * (*x - a);
                }
                values[i] = f(&simplex[i]);
            }
        }
        let (i, _) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
            .expect("simplex is never empty");
        (simplex[i].clone(), values[i])
    }
}

/// One cell of a `(c, eta)` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow<T> {
    pub c: u64,
    pub eta: T,
    pub d_ell: T,
    pub d_z: T,
    pub d_delta: T,
    pub d_alpha: T,
    pub r: T,
    pub s: T,
    pub g: T,
}

/// Optimal symmetric parameters for every `(c, eta)` pair, rows ordered by
/// `c` then `eta` as given. Cells are optimised in parallel.
pub fn sweep<T: Real>(c_values: &[u64], eta_values: &[T]) -> Result<Vec<SweepRow<T>>> {
    for &c in c_values {
        check_c(c)?;
    }
    for &eta in eta_values {
        check_eta(eta)?;
    }
    let cells: Vec<(u64, T)> = c_values
        .iter()
        .flat_map(|&c| eta_values.iter().map(move |&eta| (c, eta)))
        .collect();
    cells
        .par_iter()
        .map(|&(c, eta)| {
            optimize(c, eta).map(|p| SweepRow {
                c,
                eta,
                d_ell: p.d_ell,
                d_z: p.d_z,
                d_delta: p.d_delta,
                d_alpha: p.d_alpha,
                r: p.r,
                s: p.s,
                g: p.g,
            })
        })
        .collect()
}
