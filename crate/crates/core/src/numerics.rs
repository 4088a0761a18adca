//! Special functions and quadrature shared by the other modules.
//!
//! `h_inv(x) = (e^x - 1 - x) / x^2` maps `(0, inf)` onto `(1/2, inf)` and `h`
//! is its inverse. Expectations under the truncated arcsine density are taken
//! after substituting `p = sin^2(theta)`, which removes the inverse square
//! root singularities of the density at both endpoints.

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Upper end of the bracket used to invert `h_inv`. `h_inv(64)` is about 1.5e24.
pub const H_BRACKET_HI: f64 = 64.0;
/// Below this argument `h_inv` is evaluated from its Taylor series.
pub const H_INV_SERIES_CUTOFF: f64 = 0.5;
/// Default number of Gauss–Legendre nodes for expectations.
pub const DEFAULT_NODES: usize = 128;
/// Smallest admissible node count for [`QuadratureSpec`].
pub const MIN_NODES: usize = 16;
/// Iteration cap for bisection loops; f64 bisection from width 64 needs ~60.
pub const MAX_BISECTIONS: usize = 400;

/// `(e^x - 1 - x) / x^2` for `x > 0`.
pub fn h_inv<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || x.is_nan() {
        return Err(domain("h_inv argument", x.as_f64()));
    }
    if x < T::lit(H_INV_SERIES_CUTOFF) {
        // sum_{k >= 0} x^k / (k + 2)!
        let mut term = T::lit(0.5);
        let mut sum = term;
        for k in 1..60u32 {
            term = term * x / T::lit(f64::from(k + 2));
            sum = sum + term;
            if term < T::epsilon() * sum {
                break;
            }
        }
        return Ok(sum);
    }
    Ok((x.exp_m1() - x) / (x * x))
}

/// Inverse of [`h_inv`]: the `x > 0` with `h_inv(x) = lambda`, for `lambda > 1/2`.
///
/// Bisection on `(0, 64)` run down to the floating point resolution of `x`.
pub fn h<T: Real>(lambda: T) -> Result<T> {
    let half = T::lit(0.5);
    if !(lambda > half) || !lambda.is_finite() {
        return Err(domain("h argument", lambda.as_f64()));
    }
    let mut lo = T::zero();
    let mut hi = T::lit(H_BRACKET_HI);
    if h_inv(hi)? < lambda {
        return Err(domain("h argument (beyond bracket)", lambda.as_f64()));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        if h_inv(mid)? < lambda {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * half)
}

/// Finds a root of `f` in `[lo, hi]` by bisection; the returned point lies
/// inside a sign-changing interval of width at most `tol`.
pub fn bisect<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !(tol > T::zero()) {
        return Err(domain("bisection tolerance", tol.as_f64()));
    }
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracketing {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: f_lo.as_f64(),
            f_hi: f_hi.as_f64(),
        });
    }
    let lo_negative = f_lo < T::zero();
    let half = T::lit(0.5);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == T::zero() {
            return Ok(mid);
        }
        if (v < T::zero()) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * half)
}

/// Node count for the fixed-order Gauss–Legendre rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    node_count: usize,
}

impl QuadratureSpec {
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count < MIN_NODES {
            return Err(domain("quadrature node count", node_count as f64));
        }
        Ok(Self { node_count })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn rule<T: Real>(&self) -> GaussLegendre<T> {
        GaussLegendre::new(self.node_count)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { node_count: DEFAULT_NODES }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Newton iteration on `P_n` from the Tricomi initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = T::from_count(n as u64);
        let one = T::one();
        let two = T::lit(2.0);
        for i in 0..n.div_ceil(2) {
            let guess = T::PI() * (T::from_count(i as u64) + T::lit(0.75)) / (nf + T::lit(0.5));
            let mut z = guess.cos();
            let mut dp = one;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let step = p / d;
                z = z - step;
                if step.abs() <= T::epsilon() * T::lit(4.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d.is_finite() {
                dp = d;
            }
            let w = two / ((one - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Approximates `int_a^b f(x) dx`.
    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let sum = self
            .nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(mid + half * x));
        sum * half
    }
}

fn legendre_with_derivative<T: Real>(n: usize, z: T) -> (T, T) {
    let mut p1 = T::one();
    let mut p2 = T::zero();
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = T::from_count(j as u64);
        p1 = ((T::lit(2.0) * jf - T::one()) * z * p2 - (jf - T::one()) * p3) / jf;
    }
    let d = T::from_count(n as u64) * (z * p1 - p2) / (z * z - T::one());
    (p1, d)
}

/// `delta' = arcsin(sqrt(delta))`.
pub fn delta_prime<T: Real>(delta: T) -> Result<T> {
    check_delta(delta)?;
    Ok(delta.sqrt().asin())
}

pub(crate) fn check_delta<T: Real>(delta: T) -> Result<()> {
    if delta > T::zero() && delta < T::lit(0.5) {
        Ok(())
    } else {
        Err(domain("cutoff delta", delta.as_f64()))
    }
}

/// `E[phi(p)]` for `p` drawn from the arcsine density truncated to `[delta, 1 - delta]`,
/// using the default 128-node rule.
pub fn expect_under_f<T, F>(phi: F, delta: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    expect_under_f_with(&GaussLegendre::new(DEFAULT_NODES), phi, delta)
}

/// As [`expect_under_f`] with a caller supplied rule.
pub fn expect_under_f_with<T, F>(rule: &GaussLegendre<T>, mut phi: F, delta: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let dp = delta_prime(delta)?;
    let span = T::PI() - T::lit(4.0) * dp;
    let integral = rule.integrate(dp, T::FRAC_PI_2() - dp, |theta| {
        let s = theta.sin();
        phi(s * s)
    });
    Ok(T::lit(2.0) / span * integral)
}
