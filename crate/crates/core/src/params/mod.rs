//! Parameter algebra for the Tardos scheme.
//!
//! A [`ParamSet`] is the septuple `(d_ell, d_z, d_delta, d_alpha, r, s, g)`.
//! The scheme for `n` users and coalitions of up to `c` pirates uses
//! codelength `d_ell c^2 k`, accusation threshold `d_z c k` and cutoff
//! `1 / (d_delta c)` with `k = ln(n / eps1)`. Soundness needs (S1) and (S2),
//! completeness needs (C1') for the symmetric score or (C1) for the
//! asymmetric one, plus (C2).

mod asymptotic;
mod optimize;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{h, h_inv};
use crate::scalar::Real;

pub use asymptotic::{asymptotic_params, gamma, AsymptoticParams};
pub use optimize::{
    candidate_from, optimize, optimize_generic, sweep, Candidate, NelderMead, SweepRow,
};

/// Slack below which a constraint is reported violated.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Largest tolerated disagreement between a supplied and a derived eta.
pub const ETA_CONSISTENCY_TOL: f64 = 1e-9;

/// Score function family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Scores every position, flipping the sign where the forgery carries a 0.
    #[default]
    Symmetric,
    /// Scores only positions where the forgery carries a 1.
    Asymmetric,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Symmetric, Variant::Asymmetric];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Symmetric => "symmetric",
            Variant::Asymmetric => "asymmetric",
        }
    }

    /// Exclusive upper bound on `g`: `2/pi` symmetric, `1/pi` asymmetric.
    pub fn g_max<T: Real>(self) -> T {
        match self {
            Variant::Symmetric => T::FRAC_2_PI(),
            Variant::Asymmetric => T::FRAC_1_PI(),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "symmetric" | "sym" => Ok(Variant::Symmetric),
            "asymmetric" | "asym" => Ok(Variant::Asymmetric),
            other => Err(Error::InvalidConfig(format!("unknown variant {other:?}"))),
        }
    }
}

/// The septuple of scheme constants plus the score variant it targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet<T> {
    pub d_ell: T,
    pub d_z: T,
    pub d_delta: T,
    pub d_alpha: T,
    pub r: T,
    pub s: T,
    pub g: T,
    pub variant: Variant,
}

impl<T: Real> ParamSet<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(d_ell: T, d_z: T, d_delta: T, d_alpha: T, r: T, s: T, g: T, variant: Variant) -> Result<Self> {
        let p = Self { d_ell, d_z, d_delta, d_alpha, r, s, g, variant };
        p.validate()?;
        Ok(p)
    }

    /// Checks the type invariants (not the security constraints).
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("d_ell", self.d_ell),
            ("d_z", self.d_z),
            ("d_delta", self.d_delta),
            ("d_alpha", self.d_alpha),
            ("r", self.r),
            ("s", self.s),
            ("g", self.g),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(domain(name, v.as_f64()));
            }
        }
        if !(self.d_ell > T::zero()) {
            return Err(domain("d_ell", self.d_ell.as_f64()));
        }
        if !(self.d_z > T::zero()) {
            return Err(domain("d_z", self.d_z.as_f64()));
        }
        if !(self.d_delta > T::one()) {
            return Err(domain("d_delta", self.d_delta.as_f64()));
        }
        if !(self.d_alpha > T::zero()) {
            return Err(domain("d_alpha", self.d_alpha.as_f64()));
        }
        if !(self.r > T::lit(0.5)) {
            return Err(domain("r", self.r.as_f64()));
        }
        if !(self.s > T::zero()) {
            return Err(domain("s", self.s.as_f64()));
        }
        if !(self.g > T::zero() && self.g < self.variant.g_max()) {
            return Err(domain("g", self.g.as_f64()));
        }
        Ok(())
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }
}

/// Deployment context: population, coalition bound and error targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeContext<T> {
    pub n: u64,
    pub c: u64,
    pub eps1: T,
    pub eps2: T,
    pub eta: T,
    /// `ln(n / eps1)`
    pub k: T,
}

impl<T: Real> SchemeContext<T> {
    /// Context with `eta` derived from both error targets.
    pub fn from_errors(n: u64, c: u64, eps1: T, eps2: T) -> Result<Self> {
        let eta = eta_from(eps1, eps2, n)?;
        Self::build(n, c, eps1, eps2, eta)
    }

    /// Context with `eta` supplied directly; `eps2 = (eps1 / n)^eta`.
    pub fn with_eta(n: u64, c: u64, eps1: T, eta: T) -> Result<Self> {
        check_eps("eps1", eps1)?;
        check_eta(eta)?;
        let eps2 = (eps1 / T::from_count(n.max(1))).powf(eta);
        Self::build(n, c, eps1, eps2, eta)
    }

    /// Accepts `eps2`, `eta` or both; both must agree within [`ETA_CONSISTENCY_TOL`].
    pub fn resolve(n: u64, c: u64, eps1: T, eps2: Option<T>, eta: Option<T>) -> Result<Self> {
        match (eps2, eta) {
            (Some(e2), None) => Self::from_errors(n, c, eps1, e2),
            (None, Some(eta)) => Self::with_eta(n, c, eps1, eta),
            (Some(e2), Some(eta)) => {
                let derived = eta_from(eps1, e2, n)?;
                if (derived - eta).abs() > T::lit(ETA_CONSISTENCY_TOL) {
                    return Err(Error::InconsistentEta { given: eta.as_f64(), derived: derived.as_f64() });
                }
                Self::build(n, c, eps1, e2, derived)
            }
            (None, None) => Err(Error::InvalidConfig("either eps2 or eta is required".into())),
        }
    }

    fn build(n: u64, c: u64, eps1: T, eps2: T, eta: T) -> Result<Self> {
        check_c(c)?;
        if n < c {
            return Err(Error::InvalidConfig(format!("n = {n} must be at least c = {c}")));
        }
        check_eps("eps1", eps1)?;
        check_eps("eps2", eps2)?;
        check_eta(eta)?;
        let k = T::from_count(n).ln() - eps1.ln();
        Ok(Self { n, c, eps1, eps2, eta, k })
    }
}

/// `eta = ln(eps2) / ln(eps1 / n)`, evaluated as `ln(eps2) / (ln(eps1) - ln(n))`.
pub fn eta_from<T: Real>(eps1: T, eps2: T, n: u64) -> Result<T> {
    check_eps("eps1", eps1)?;
    check_eps("eps2", eps2)?;
    if n < 2 {
        return Err(domain("n", n as f64));
    }
    let log_ratio = eps1.ln() - T::from_count(n).ln();
    if !(log_ratio < T::zero()) {
        return Err(domain("eps1 / n", (eps1 / T::from_count(n)).as_f64()));
    }
    Ok(eps2.ln() / log_ratio)
}

fn check_eps<T: Real>(what: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v < T::one() {
        Ok(())
    } else {
        Err(domain(what, v.as_f64()))
    }
}

pub(crate) fn check_c(c: u64) -> Result<()> {
    if c >= 2 {
        Ok(())
    } else {
        Err(domain("c", c as f64))
    }
}

pub(crate) fn check_eta<T: Real>(eta: T) -> Result<()> {
    if eta > T::zero() && eta <= T::one() {
        Ok(())
    } else {
        Err(domain("eta", eta.as_f64()))
    }
}

/// Left-hand side minus right-hand side of each inequality; `>= 0` means satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSlack<T> {
    pub s1: T,
    pub s2: T,
    pub c1: T,
    pub c2: T,
    pub feasible: bool,
}

impl<T: Real> ConstraintSlack<T> {
    fn from_slacks(s1: T, s2: T, c1: T, c2: T) -> Self {
        let mut out = Self { s1, s2, c1, c2, feasible: false };
        out.feasible = out.feasible_within(T::lit(FEASIBILITY_TOL));
        out
    }

    pub fn min_slack(&self) -> T {
        self.s1.min(self.s2).min(self.c1).min(self.c2)
    }

    /// All slacks at least `-tol`.
    pub fn feasible_within(&self, tol: T) -> bool {
        [self.s1, self.s2, self.c1, self.c2].iter().all(|v| !v.is_nan() && *v >= -tol)
    }
}

/// (S1): `d_alpha - sqrt(d_delta) / (h(r) sqrt(c))`.
pub(crate) fn s1_slack<T: Real>(d_alpha: T, d_delta: T, h_r: T, c: T) -> T {
    d_alpha - d_delta.sqrt() / (h_r * c.sqrt())
}

/// (S2): `d_z / d_alpha - r d_ell / d_alpha^2 - 1`.
pub(crate) fn s2_slack<T: Real>(d_ell: T, d_z: T, d_alpha: T, r: T) -> T {
    d_z / d_alpha - r * d_ell / (d_alpha * d_alpha) - T::one()
}

/// (C1') or (C1), with `a_s = h_inv(s) s` precomputed.
pub(crate) fn c1_slack<T: Real>(variant: Variant, d_delta: T, a_s: T, g: T, c: T) -> T {
    let lead = match variant {
        Variant::Symmetric => (T::lit(2.0) - T::lit(4.0) / d_delta) / T::PI(),
        Variant::Asymmetric => (T::one() - T::lit(2.0) / d_delta) / T::PI(),
    };
    lead - a_s / (d_delta * c).sqrt() - g
}

/// (C2): `g d_ell - d_z - eta sqrt(d_delta / (s^2 c))`.
pub(crate) fn c2_slack<T: Real>(d_ell: T, d_z: T, d_delta: T, s: T, g: T, c: T, eta: T) -> T {
    g * d_ell - d_z - eta * (d_delta / (s * s * c)).sqrt()
}

/// Evaluates all four requirements for `p` at coalition bound `c` and ratio `eta`.
pub fn check_constraints<T: Real>(p: &ParamSet<T>, c: u64, eta: T) -> Result<ConstraintSlack<T>> {
    check_c(c)?;
    check_eta(eta)?;
    p.validate()?;
    let cf = T::from_count(c);
    let h_r = h(p.r)?;
    let a_s = h_inv(p.s)? * p.s;
    Ok(ConstraintSlack::from_slacks(
        s1_slack(p.d_alpha, p.d_delta, h_r, cf),
        s2_slack(p.d_ell, p.d_z, p.d_alpha, p.r),
        c1_slack(p.variant, p.d_delta, a_s, p.g, cf),
        c2_slack(p.d_ell, p.d_z, p.d_delta, p.s, p.g, cf, eta),
    ))
}

/// Concrete scheme parameters for one deployment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams<T> {
    /// Integral codelength used by generation.
    pub ell: u64,
    /// Accusation threshold.
    pub z: T,
    pub delta: T,
    pub delta_prime: T,
    /// Real-valued codelength `d_ell c^2 k` before rounding.
    pub ell0: T,
    /// Threshold `d_z c k` before any integral adjustment.
    pub z0: T,
    pub context: SchemeContext<T>,
    pub source: ParamSet<T>,
}

impl<T: Real> SchemeParams<T> {
    /// Exponent `1 / (d_alpha c)` of the soundness moment bound (diagnostic only).
    pub fn alpha(&self) -> T {
        T::one() / (self.source.d_alpha * T::from_count(self.context.c))
    }

    /// Exponent `s sqrt(delta) / c` of the completeness moment bound (diagnostic only).
    pub fn beta(&self) -> T {
        self.source.s * self.delta.sqrt() / T::from_count(self.context.c)
    }

    pub fn variant(&self) -> Variant {
        self.source.variant
    }
}

/// Instantiates `p` for `ctx`: `ell0 = d_ell c^2 k`, `Z0 = d_z c k`,
/// `delta = 1 / (d_delta c)`.
///
/// `ell` is `ceil(ell0)` and `z` is left at `Z0`; use [`integral_adjust`]
/// for a threshold that keeps the guarantees after rounding.
pub fn derive_scheme_params<T: Real>(p: &ParamSet<T>, ctx: &SchemeContext<T>) -> Result<SchemeParams<T>> {
    p.validate()?;
    let c = T::from_count(ctx.c);
    let ell0 = p.d_ell * c * c * ctx.k;
    let z0 = p.d_z * c * ctx.k;
    let delta = T::one() / (p.d_delta * c);
    if !(delta > T::zero() && delta < T::lit(0.5)) {
        return Err(Error::InvalidCutoff(delta.as_f64()));
    }
    let delta_prime = delta.sqrt().asin();
    Ok(SchemeParams {
        ell: ceil_count(ell0)?,
        z: z0,
        delta,
        delta_prime,
        ell0,
        z0,
        context: *ctx,
        source: *p,
    })
}

fn ceil_count<T: Real>(v: T) -> Result<u64> {
    v.ceil()
        .to_u64()
        .filter(|&l| l >= 1)
        .ok_or_else(|| domain("codelength", v.as_f64()))
}

/// Rounds the codelength up to an integer and compensates the threshold so
/// that the septuple describing the rounded scheme still meets every requirement.
///
/// With `omega = d_ell (ceil(ell0) - ell0) / ell0` the adjusted septuple is
/// `d_ell + omega`, `d_z + g omega`, and `d_alpha` at the larger root of (S2).
pub fn integral_adjust<T: Real>(p: &ParamSet<T>, ctx: &SchemeContext<T>) -> Result<(ParamSet<T>, SchemeParams<T>)> {
    let base = derive_scheme_params(p, ctx)?;
    let ell = base.ell;
    let extra = T::from_count(ell) - base.ell0;
    let omega = p.d_ell * extra / base.ell0;
    let d_ell = p.d_ell + omega;
    let d_z = p.d_z + p.g * omega;
    let dz_sq = d_z * d_z;
    let bound = T::lit(4.0) * p.r * d_ell;
    if dz_sq < bound {
        return Err(Error::AdjustmentInfeasible { dz_sq: dz_sq.as_f64(), bound: bound.as_f64() });
    }
    let d_alpha = if omega == T::zero() { p.d_alpha } else { (d_z + (dz_sq - bound).sqrt()) * T::lit(0.5) };
    let adjusted = ParamSet { d_ell, d_z, d_alpha, ..*p };
    let z = base.z0 + p.g / T::from_count(ctx.c) * extra;
    Ok((adjusted, SchemeParams { z, source: adjusted, ..base }))
}
