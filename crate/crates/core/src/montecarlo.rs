//! Empirical error rates and numerical checks of the moment identities
//! behind the security proofs.

use std::ops::Add;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::attacks::{forge, Strategy};
use crate::codec::{BitVector, Codebook, Generator};
use crate::error::{domain, Error, Result};
use crate::numerics::{check_delta, delta_prime, expect_under_f};
use crate::params::{
    check_constraints, integral_adjust, optimize, optimize_generic, ParamSet, SchemeContext, SchemeParams, Variant,
};
use crate::rng::{derive, Tag};
use crate::scoring::{accuse, symbol_score, AccusationReport};

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSource {
    /// Minimal-codelength parameters for the configured variant.
    Optimized,
    Explicit(ParamSet<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n: usize,
    pub c: u64,
    pub eps1: f64,
    pub eps2: Option<f64>,
    pub eta: Option<f64>,
    pub strategy: Strategy,
    pub trials: u64,
    pub base_seed: u64,
    pub variant: Variant,
    pub param_source: ParamSource,
    /// Number of colluders actually attacking; defaults to `c`. Smaller
    /// coalitions are outside the completeness guarantee.
    pub coalition_size: Option<usize>,
    /// Reuse one codebook for every trial instead of drawing a fresh one.
    pub shared_codebook: bool,
}

impl TrialConfig {
    pub fn new(n: usize, c: u64, eps1: f64, eps2: f64, strategy: Strategy, trials: u64, base_seed: u64) -> Self {
        Self {
            n,
            c,
            eps1,
            eps2: Some(eps2),
            eta: None,
            strategy,
            trials,
            base_seed,
            variant: Variant::Symmetric,
            param_source: ParamSource::Optimized,
            coalition_size: None,
            shared_codebook: false,
        }
    }

    pub fn coalition_len(&self) -> usize {
        self.coalition_size.unwrap_or(self.c as usize)
    }

    pub fn context(&self) -> Result<SchemeContext<f64>> {
        SchemeContext::resolve(self.n as u64, self.c, self.eps1, self.eps2, self.eta)
    }

    fn check_run(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        let size = self.coalition_len();
        if size == 0 {
            return Err(Error::EmptyCoalition);
        }
        if size > self.n {
            return Err(Error::InvalidConfig(format!("coalition of {size} exceeds {} users", self.n)));
        }
        Ok(())
    }

    /// Validates the configuration and derives the integral-length scheme.
    pub fn scheme(&self) -> Result<SchemeParams<f64>> {
        self.check_run()?;
        let ctx = self.context()?;
        let params = match &self.param_source {
            ParamSource::Optimized => match self.variant {
                Variant::Symmetric => optimize(self.c, ctx.eta)?,
                Variant::Asymmetric => optimize_generic(self.c, ctx.eta, Variant::Asymmetric)?,
            },
            ParamSource::Explicit(p) if p.variant == self.variant => *p,
            ParamSource::Explicit(p) => {
                return Err(Error::InvalidConfig(format!(
                    "explicit parameters are {} but the run is {}",
                    p.variant, self.variant
                )))
            }
        };
        let slack = check_constraints(&params, self.c, ctx.eta)?;
        if !slack.feasible {
            return Err(Error::InfeasibleParams { c: self.c, eta: ctx.eta, detail: format!("{slack:?}") });
        }
        Ok(integral_adjust(&params, &ctx)?.1)
    }
}

/// Decides whom to accuse from a full score report.
pub trait Tracer: Sync {
    fn accused(&self, report: &AccusationReport) -> Vec<usize>;
}

/// Accuses exactly the users whose score exceeds the threshold.
#[derive(Debug, Clone, Copy, Default)]
pub struct ThresholdTracer;

impl Tracer for ThresholdTracer {
    fn accused(&self, report: &AccusationReport) -> Vec<usize> {
        report.accused.clone()
    }
}

/// Outcome counts over a batch of trials. Addition is commutative, so the
/// order in which trials finish does not matter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialTally {
    pub trials: u64,
    /// Some innocent user accused.
    pub sound_failures: u64,
    /// No colluder accused.
    pub complete_failures: u64,
    /// Either of the above.
    pub failures: u64,
    /// Trials whose coalition score exceeded `|C| Z`.
    pub coalition_above: u64,
    /// Trials with coalition score above `|C| Z` where the threshold rule
    /// accused no colluder; must stay zero.
    pub implication_violations: u64,
}

impl Add for TrialTally {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            sound_failures: self.sound_failures + o.sound_failures,
            complete_failures: self.complete_failures + o.complete_failures,
            failures: self.failures + o.failures,
            coalition_above: self.coalition_above + o.coalition_above,
            implication_violations: self.implication_violations + o.implication_violations,
        }
    }
}

fn trial_codebook(scheme: &SchemeParams<f64>, n: usize, seed: u64) -> Result<Codebook> {
    Generator::for_scheme(n, scheme, seed)?.generate()
}

fn one_trial<Tr: Tracer>(
    scheme: &SchemeParams<f64>,
    cfg: &TrialConfig,
    shared: Option<&Codebook>,
    tracer: &Tr,
    t: u64,
) -> Result<TrialTally> {
    let trial_seed = derive(cfg.base_seed, Tag::Trial, t);
    let fresh;
    let cb = match shared {
        Some(cb) => cb,
        None => {
            fresh = trial_codebook(scheme, cfg.n, derive(trial_seed, Tag::Codebook, 0))?;
            &fresh
        }
    };
    let size = cfg.coalition_len();
    let members: Vec<usize> = (0..size).collect();
    let forgery = forge(cfg.strategy, cb, &members, derive(trial_seed, Tag::AttackSeed, 0))?;
    let report = accuse(cb, &forgery.bits, scheme.z, scheme.variant())?;
    let accused = tracer.accused(&report);

    let sound_fail = accused.iter().any(|&j| j >= size);
    let complete_fail = !accused.iter().any(|&j| j < size);
    let total: f64 = report.scores[..size].iter().sum();
    let above = total > size as f64 * scheme.z;
    let caught = report.accused.iter().any(|&j| j < size);
    Ok(TrialTally {
        trials: 1,
        sound_failures: sound_fail as u64,
        complete_failures: complete_fail as u64,
        failures: (sound_fail || complete_fail) as u64,
        coalition_above: above as u64,
        implication_violations: (above && !caught) as u64,
    })
}

/// Runs `cfg.trials` trials against an already derived scheme. No
/// feasibility check is made, so deliberately weak schemes can be probed.
pub fn run_trials_on<Tr: Tracer>(scheme: &SchemeParams<f64>, cfg: &TrialConfig, tracer: &Tr) -> Result<TrialTally> {
    cfg.check_run()?;
    let shared = if cfg.shared_codebook {
        Some(trial_codebook(scheme, cfg.n, derive(cfg.base_seed, Tag::Codebook, 0))?)
    } else {
        None
    };
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| one_trial(scheme, cfg, shared.as_ref(), tracer, t))
        .try_reduce(TrialTally::default, |a, b| Ok(a + b))
}

pub fn run_trials(cfg: &TrialConfig) -> Result<TrialTally> {
    let scheme = cfg.scheme()?;
    run_trials_on(&scheme, cfg, &ThresholdTracer)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub failures: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// The error bound being tested.
    pub bound: f64,
}

impl ErrorEstimate {
    pub fn new(failures: u64, trials: u64, bound: f64) -> Result<Self> {
        let (ci_low, ci_high) = wilson_interval(failures, trials, DEFAULT_CONFIDENCE)?;
        Ok(Self { failures, trials, rate: failures as f64 / trials as f64, ci_low, ci_high, bound })
    }

    /// The bound is not contradicted: the lower confidence limit stays at or below it.
    pub fn consistent_with_bound(&self) -> bool {
        self.ci_low <= self.bound
    }
}

/// Rate of trials in which an innocent user is accused.
pub fn run_soundness_trials(cfg: &TrialConfig) -> Result<ErrorEstimate> {
    let tally = run_trials(cfg)?;
    ErrorEstimate::new(tally.sound_failures, tally.trials, cfg.eps1)
}

/// Rate of trials in which no colluder is accused. Fails if any trial had
/// a coalition score above `|C| Z` without accusing a colluder.
pub fn run_completeness_trials(cfg: &TrialConfig) -> Result<ErrorEstimate> {
    let tally = run_trials(cfg)?;
    if tally.implication_violations > 0 {
        return Err(Error::ImplicationViolated(tally.implication_violations));
    }
    let eps2 = cfg.context()?.eps2;
    ErrorEstimate::new(tally.complete_failures, tally.trials, eps2)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(failures: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(domain("trials", 0.0));
    }
    if failures > trials {
        return Err(domain("failures", failures as f64));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(domain("confidence", confidence));
    }
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if failures == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if failures == trials { 1.0 } else { (centre + half).min(1.0) };
    Ok((low, high))
}

/// One row of a simulation campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRow {
    pub variant: Variant,
    pub strategy: Strategy,
    pub n: usize,
    pub c: u64,
    /// Colluders per trial. Below `c` the row is observational only.
    pub coalition: usize,
    pub eta: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub d_ell: f64,
    pub ell: u64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub trials: u64,
    pub sound_failures: u64,
    pub complete_failures: u64,
    /// Fraction of trials with any failure, with its Wilson interval.
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

pub fn campaign_row(cfg: &TrialConfig) -> Result<CampaignRow> {
    let scheme = cfg.scheme()?;
    campaign_row_on(&scheme, cfg)
}

pub fn campaign_row_on(scheme: &SchemeParams<f64>, cfg: &TrialConfig) -> Result<CampaignRow> {
    let tally = run_trials_on(scheme, cfg, &ThresholdTracer)?;
    if tally.implication_violations > 0 {
        return Err(Error::ImplicationViolated(tally.implication_violations));
    }
    let est = ErrorEstimate::new(tally.failures, tally.trials, scheme.context.eps1 + scheme.context.eps2)?;
    Ok(CampaignRow {
        variant: scheme.variant(),
        strategy: cfg.strategy,
        n: cfg.n,
        c: cfg.c,
        coalition: cfg.coalition_len(),
        eta: scheme.context.eta,
        eps1: scheme.context.eps1,
        eps2: scheme.context.eps2,
        d_ell: scheme.source.d_ell,
        ell: scheme.ell,
        z: scheme.z,
        trials: tally.trials,
        sound_failures: tally.sound_failures,
        complete_failures: tally.complete_failures,
        rate: est.rate,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        seed: cfg.base_seed,
    })
}

/// Mean and second moment of an innocent user's per-position score,
/// averaged over the bias distribution. Both are exact (0 and 1) for every
/// bias, so the quadrature should reproduce them to rounding.
pub fn innocent_moment_oracle(delta: f64) -> Result<(f64, f64)> {
    check_delta(delta)?;
    let moments = |p: f64| -> (f64, f64) {
        let one = symbol_score(true, true, p, Variant::Symmetric).unwrap_or(f64::NAN);
        let zero = symbol_score(false, true, p, Variant::Symmetric).unwrap_or(f64::NAN);
        (p * one + (1.0 - p) * zero, p * one * one + (1.0 - p) * zero * zero)
    };
    let mean = expect_under_f(|p| moments(p).0, delta)?;
    let second = expect_under_f(|p| moments(p).1, delta)?;
    Ok((mean, second))
}

pub const SUM_F0_TOL: f64 = 1e-8;
pub const SUM_F2_TOL: f64 = 1e-6;
pub const F1_TOL: f64 = 1e-8;

/// Quadrature values of the coalition moments
/// `F_{k,x} = E[p^x (1-p)^(c-x) (x q - (c-x)/q)^k]` for `k = 0, 1, 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixBReport {
    pub c: u32,
    pub delta: f64,
    pub f0: Vec<f64>,
    pub f1: Vec<f64>,
    /// `((1-delta)^x delta^(c-x) - delta^x (1-delta)^(c-x)) / (pi - 4 delta')`
    pub f1_closed: Vec<f64>,
    pub f2: Vec<f64>,
    /// `sum_x C(c, x) F_{0,x}`, which should be 1.
    pub sum_f0: f64,
    /// `sum_x C(c, x) F_{2,x}`, which should be `c`.
    pub sum_f2: f64,
    pub max_f1_error: f64,
    pub holds: bool,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1)) as f64
}

pub fn appendix_b_oracle(c: u32, delta: f64) -> Result<AppendixBReport> {
    if !(2..=12).contains(&c) {
        return Err(domain("c", f64::from(c)));
    }
    check_delta(delta)?;
    let cf = f64::from(c);
    let moment = |x: u32, k: i32| {
        let xf = f64::from(x);
        expect_under_f(
            |p| {
                let q = ((1.0 - p) / p).sqrt();
                p.powi(x as i32) * (1.0 - p).powi((c - x) as i32) * (xf * q - (cf - xf) / q).powi(k)
            },
            delta,
        )
    };
    let norm = std::f64::consts::PI - 4.0 * delta_prime(delta)?;
    let mut f0 = Vec::new();
    let mut f1 = Vec::new();
    let mut f2 = Vec::new();
    let mut f1_closed = Vec::new();
    for x in 0..=c {
        f0.push(moment(x, 0)?);
        f1.push(moment(x, 1)?);
        f2.push(moment(x, 2)?);
        let (xi, rest) = (x as i32, (c - x) as i32);
        f1_closed.push(((1.0 - delta).powi(xi) * delta.powi(rest) - delta.powi(xi) * (1.0 - delta).powi(rest)) / norm);
    }
    let weighted = |v: &[f64]| (0..=c).map(|x| binomial(c, x) * v[x as usize]).sum::<f64>();
    let sum_f0 = weighted(&f0);
    let sum_f2 = weighted(&f2);
    let max_f1_error = f1.iter().zip(&f1_closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let holds = (sum_f0 - 1.0).abs() <= SUM_F0_TOL && (sum_f2 - cf).abs() <= SUM_F2_TOL && max_f1_error <= F1_TOL;
    Ok(AppendixBReport { c, delta, f0, f1, f1_closed, f2, sum_f0, sum_f2, max_f1_error, holds })
}

/// Accusation report for an arbitrary forgery, for callers that bring their own `y`.
pub fn trace(cb: &Codebook, y: &BitVector, scheme: &SchemeParams<f64>) -> Result<AccusationReport> {
    accuse(cb, y, scheme.z, scheme.variant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::delta_prime;
    use statrs::distribution::ChiSquared;

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 0.0370).abs() < 1e-4, "{hi}");
        // textbook value z^2 / (n + z^2) for zero successes
        let z = 1.959963984540054f64;
        assert!((hi - z * z / (100.0 + z * z)).abs() < 1e-12);

        let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
        assert!(lo < 0.5 && hi > 0.5);
        assert!(((lo + hi) / 2.0 - 0.5).abs() < 1e-12);

        assert_eq!(wilson_interval(100, 100, 0.95).unwrap().1, 1.0);
        assert!(wilson_interval(0, 0, 0.95).is_err());
        assert!(wilson_interval(5, 4, 0.95).is_err());
        assert!(wilson_interval(1, 4, 1.0).is_err());
    }

    #[test]
    fn innocent_moments_integrate_to_zero_and_one() {
        for delta in [1e-3, 1e-2, 0.1] {
            let (m, s) = innocent_moment_oracle(delta).unwrap();
            assert!(m.abs() < 1e-10 && (s - 1.0).abs() < 1e-10, "{delta}: {m} {s}");
        }
        let p: f64 = 0.3;
        assert_eq!(p * ((1.0 - p) / p).sqrt() - (1.0 - p) * (p / (1.0 - p)).sqrt(), 0.0);
        assert!(innocent_moment_oracle(0.5).is_err());
    }

    #[test]
    fn appendix_b_identities() {
        for c in [2u32, 3, 5, 8] {
            for delta in [0.01, 0.1] {
                let r = appendix_b_oracle(c, delta).unwrap();
                assert!(r.holds, "{r:?}");
            }
        }
        assert!(appendix_b_oracle(2, 0.017662).unwrap().holds);
        assert!(appendix_b_oracle(1, 0.1).is_err());
        assert!(appendix_b_oracle(13, 0.1).is_err());
    }

    #[test]
    fn f1_is_antisymmetric() {
        let r = appendix_b_oracle(5, 0.05).unwrap();
        for x in 0..=5usize {
            assert!((r.f1[x] + r.f1[5 - x]).abs() < 1e-12);
            assert_eq!(r.f1_closed[x], -r.f1_closed[5 - x]);
        }
    }

    #[test]
    fn f0_by_independent_midpoint_rule() {
        // F_{0,x} written directly as an integral over p with the arcsine density
        let (c, x, delta) = (4i32, 1i32, 0.05f64);
        let norm = std::f64::consts::PI - 4.0 * delta_prime(delta).unwrap();
        let steps = 200_000;
        let (a, b) = (delta.sqrt().asin(), (1.0 - delta).sqrt().asin());
        let h = (b - a) / steps as f64;
        let integral: f64 = (0..steps)
            .map(|k| {
                let p = (a + (k as f64 + 0.5) * h).sin().powi(2);
                2.0 * p.powi(x) * (1.0 - p).powi(c - x)
            })
            .sum::<f64>()
            * h
            / norm;
        let r = appendix_b_oracle(4, delta).unwrap();
        assert!((r.f0[1] - integral).abs() < 1e-9, "{} vs {integral}", r.f0[1]);
    }

    fn small_cfg(strategy: Strategy, trials: u64, seed: u64) -> TrialConfig {
        TrialConfig::new(100, 3, 0.1, 0.1, strategy, trials, seed)
    }

    #[test]
    fn trials_are_deterministic_and_schedule_independent() {
        let cfg = small_cfg(Strategy::Interleave, 60, 7);
        let a = run_trials(&cfg).unwrap();
        let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run_trials(&cfg).unwrap());
        let c = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| run_trials(&cfg).unwrap());
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.trials, 60);
        assert_eq!(a.implication_violations, 0);
    }

    #[test]
    fn estimates_respect_bounds() {
        let sound = run_soundness_trials(&small_cfg(Strategy::Interleave, 200, 1)).unwrap();
        assert!(sound.consistent_with_bound(), "{sound:?}");
        let complete = run_completeness_trials(&small_cfg(Strategy::Majority, 200, 2)).unwrap();
        assert!(complete.consistent_with_bound(), "{complete:?}");
        assert!(sound.ci_low <= sound.rate && sound.rate <= sound.ci_high);
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_cfg(Strategy::Majority, 0, 1);
        assert!(run_trials(&cfg).is_err());
        cfg.trials = 1;
        cfg.coalition_size = Some(101);
        assert!(run_trials(&cfg).is_err());
        cfg.coalition_size = Some(2);
        assert!(run_trials(&cfg).is_ok());

        let mut cfg = small_cfg(Strategy::Majority, 1, 1);
        let weak = ParamSet::new(10.0, 2.0, 5.0, 1.0, 0.6, 1.0, 0.3, Variant::Symmetric).unwrap();
        cfg.param_source = ParamSource::Explicit(weak);
        assert!(matches!(run_trials(&cfg), Err(Error::InfeasibleParams { .. })));
        cfg.variant = Variant::Asymmetric;
        assert!(matches!(run_trials(&cfg), Err(Error::InvalidConfig(_))));
    }

    struct AccuseNobody;

    impl Tracer for AccuseNobody {
        fn accused(&self, _: &AccusationReport) -> Vec<usize> {
            Vec::new()
        }
    }

    #[test]
    fn empty_accusation_is_never_unsound() {
        let cfg = small_cfg(Strategy::Coinflip, 1, 3);
        let scheme = cfg.scheme().unwrap();
        let tally = run_trials_on(&scheme, &cfg, &AccuseNobody).unwrap();
        assert_eq!(tally.sound_failures, 0);
        assert_eq!(tally.complete_failures, 1);
        let est = ErrorEstimate::new(tally.sound_failures, tally.trials, cfg.eps1).unwrap();
        assert_eq!(est.rate, 0.0);
    }

    #[test]
    fn lone_pirate_is_caught_below_self_score() {
        let mut cfg = small_cfg(Strategy::Interleave, 20, 4);
        cfg.coalition_size = Some(1);
        let tally = run_trials(&cfg).unwrap();
        // the forgery is user 0's codeword, whose score is far above Z
        assert_eq!(tally.complete_failures, 0);
    }

    #[test]
    fn shared_codebook_mode() {
        let mut cfg = small_cfg(Strategy::Minority, 30, 5);
        cfg.shared_codebook = true;
        let a = run_trials(&cfg).unwrap();
        assert_eq!(a, run_trials(&cfg).unwrap());
        assert_eq!(a.trials, 30);
    }

    /// A scheme far too short for its coalition, so that failures are common.
    fn weak_scheme() -> SchemeParams<f64> {
        let (ell, z) = (100, 15.0);
        let ctx = SchemeContext::from_errors(40, 3, 0.1, 0.1).unwrap();
        let source = ParamSet::new(1.0, 1.0, 10.0, 1.0, 0.6, 1.0, 0.3, Variant::Symmetric).unwrap();
        SchemeParams {
            ell,
            z,
            delta: 0.05,
            delta_prime: delta_prime(0.05).unwrap(),
            ell0: ell as f64,
            z0: z,
            context: ctx,
            source,
        }
    }

    #[test]
    fn disjoint_seeds_give_homogeneous_failure_counts() {
        let scheme = weak_scheme();
        let groups = 10;
        let per = 300u64;
        let counts: Vec<u64> = (0..groups)
            .map(|g| {
                let cfg = TrialConfig::new(40, 3, 0.1, 0.1, Strategy::Interleave, per, 1000 + g);
                run_trials_on(&scheme, &cfg, &ThresholdTracer).unwrap().failures
            })
            .collect();
        let total: u64 = counts.iter().sum();
        let p = total as f64 / (groups * per) as f64;
        assert!(p > 0.05 && p < 0.95, "failure rate {p} too extreme for the test");
        let stat: f64 = counts
            .iter()
            .map(|&k| (k as f64 - per as f64 * p).powi(2) / (per as f64 * p * (1.0 - p)))
            .sum();
        let p_value = 1.0 - ChiSquared::new((groups - 1) as f64).unwrap().cdf(stat);
        assert!(p_value > 0.01, "chi-square {stat}, p = {p_value}, counts {counts:?}");
    }

    #[test]
    fn campaign_row_fields() {
        let cfg = small_cfg(Strategy::AllOne, 40, 9);
        let row = campaign_row(&cfg).unwrap();
        let scheme = cfg.scheme().unwrap();
        assert_eq!(row.ell, scheme.ell);
        assert_eq!(row.z, scheme.z);
        assert_eq!(row.trials, 40);
        assert_eq!(row.strategy, Strategy::AllOne);
        assert!(row.ci_low <= row.rate && row.rate <= row.ci_high);
        assert!((row.eta - 1.0 / 3.0).abs() < 1e-12);
    }
}
