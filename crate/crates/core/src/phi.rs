//! Solver for the implicit function φ(s) that parametrizes the Bellman
//! surface in both exponent regimes.
//!
//! For 1 < p < 2 the defining equation on s ≥ 0 is
//!
//! ```text
//!     φ (1 + φ)^{p−2} = p^{p−2} s,          φ ≥ 0,
//! ```
//!
//! and for p > 2 it is
//!
//! ```text
//!     p (1 − 1/p)^{p−1} (1 + φ)^{p−2} (φ − p + 2) = s,     φ ≥ p − 2.
//! ```
//!
//! Both left-hand sides are strictly increasing bijections onto [0, ∞), so
//! each equation has a unique root. The solver substitutes u = φ − floor
//! (floor = 0 below p = 2, floor = p − 2 above) and runs a bracketed Newton
//! iteration on w = ln u, where both equations collapse to the same monotone
//! shape
//!
//! ```text
//!     g(w) = w + (p−2) ln(a + e^w) − ln(target),
//! ```
//!
//! with a = 1 (resp. a = p − 1). Working in log coordinates keeps the
//! iteration stable across twelve decades of s, where u itself can range
//! from ~1e−60 to ~1e60. The root is only accepted when the *original*
//! defining equation evaluates to a residual at most `1e-12 * (1 + s)`.

use crate::error::{Error, Result};
use crate::exponent::{Exponent, Regime};

/// Residual certificate: a root is accepted when the defining equation
/// evaluates to at most `RESIDUAL_TOL * (1 + s)` in absolute value.
pub const RESIDUAL_TOL: f64 = 1e-12;

const MAX_ITERATIONS: u32 = 200;

/// A certified root of the implicit equation.
#[derive(Clone, Copy, Debug)]
pub struct PhiValue {
    pub s: f64,
    /// The root φ(s) itself.
    pub phi: f64,
    /// φ minus its regime floor (0 for p < 2, p − 2 for p > 2). This is the
    /// quantity the solver actually resolves; keep it when forming
    /// expressions like φ − p + 2 at small s, where recomputing the
    /// difference from `phi` would cancel catastrophically.
    pub excess: f64,
    /// Signed residual of the defining equation at the returned root.
    pub residual: f64,
    pub iterations: u32,
}

impl PhiValue {
    fn analytic_at_zero(floor: f64) -> Self {
        Self {
            s: 0.0,
            phi: floor,
            excess: 0.0,
            residual: 0.0,
            iterations: 0,
        }
    }
}

/// Regime floor: φ(0).
fn floor_of(exp: &Exponent) -> f64 {
    match exp.regime() {
        Regime::Sub2 => 0.0,
        Regime::Super2 => exp.p() - 2.0,
        Regime::Two => f64::NAN,
    }
}

/// ln(a + e^w), evaluated without overflow for any w.
fn ln_a_plus_exp(a: f64, w: f64) -> f64 {
    let ln_a = a.ln();
    if w > ln_a {
        w + (a * (-w).exp()).ln_1p()
    } else {
        ln_a + (w - ln_a).exp().ln_1p()
    }
}

struct LogEquation {
    /// Additive offset in the log equation: 1 for p < 2, p − 1 for p > 2.
    a: f64,
    /// ln of the right-hand side the log equation must match.
    ln_target: f64,
    p: f64,
}

impl LogEquation {
    fn new(exp: &Exponent, s: f64) -> Self {
        let p = exp.p();
        match exp.regime() {
            Regime::Sub2 => Self {
                a: 1.0,
                ln_target: (p - 2.0) * p.ln() + s.ln(),
                p,
            },
            Regime::Super2 => {
                // c = p (1 − 1/p)^{p−1}
                let ln_c = p.ln() + (p - 1.0) * (1.0 - 1.0 / p).ln();
                Self {
                    a: p - 1.0,
                    ln_target: s.ln() - ln_c,
                    p,
                }
            }
            Regime::Two => unreachable!("checked by caller"),
        }
    }

    fn g(&self, w: f64) -> f64 {
        w + (self.p - 2.0) * ln_a_plus_exp(self.a, w) - self.ln_target
    }

    /// dg/dw = 1 + (p−2) e^w / (a + e^w); bounded between min(1, p−1) and
    /// max(1, p−1), so Newton steps never explode.
    fn g_prime(&self, w: f64) -> f64 {
        let sigma = 1.0 / (1.0 + self.a * (-w).exp());
        1.0 + (self.p - 2.0) * sigma
    }

    /// Starting point from the small- and large-target asymptotics of the
    /// defining equation.
    fn initial_guess(&self) -> f64 {
        if self.p < 2.0 {
            // u ≈ target for small targets, u ≈ target^{1/(p−1)} for large.
            self.ln_target.max(self.ln_target / (self.p - 1.0))
        } else {
            let lin = self.ln_target - (self.p - 2.0) * (self.p - 1.0).ln();
            lin.min(self.ln_target / (self.p - 1.0))
        }
    }
}

/// Signed residual of the *original* defining equation at excess u.
fn defining_residual(exp: &Exponent, s: f64, u: f64) -> f64 {
    let p = exp.p();
    match exp.regime() {
        Regime::Sub2 => u * (1.0 + u).powf(p - 2.0) - p.powf(p - 2.0) * s,
        Regime::Super2 => {
            let c = p * (1.0 - 1.0 / p).powf(p - 1.0);
            c * ((p - 1.0) + u).powf(p - 2.0) * u - s
        }
        Regime::Two => f64::NAN,
    }
}

/// Solve the implicit equation for φ(s).
///
/// Requires p ≠ 2 (the surface has no implicit parametrization at p = 2)
/// and s ≥ 0. s = 0 returns the analytic root without iterating.
pub fn solve_phi(exp: &Exponent, s: f64) -> Result<PhiValue> {
    if exp.regime() == Regime::Two {
        return Err(Error::Domain(
            "the implicit function is defined only for p != 2".into(),
        ));
    }
    if !s.is_finite() || s < 0.0 {
        return Err(Error::Domain(format!("s must be finite and >= 0, got {s}")));
    }
    let floor = floor_of(exp);
    if s == 0.0 {
        return Ok(PhiValue::analytic_at_zero(floor));
    }

    let eq = LogEquation::new(exp, s);
    let mut w = eq.initial_guess();
    let mut iterations = 0u32;

    // Grow a sign-changing bracket around the guess. g is strictly
    // increasing with g(−∞) = −∞ and g(+∞) = +∞, so this always terminates.
    let (mut lo, mut hi);
    let g0 = eq.g(w);
    iterations += 1;
    if g0 == 0.0 {
        lo = w;
        hi = w;
    } else if g0 < 0.0 {
        lo = w;
        let mut step = 1.0;
        hi = w + step;
        while eq.g(hi) < 0.0 {
            iterations += 1;
            lo = hi;
            step *= 2.0;
            hi += step;
        }
    } else {
        hi = w;
        let mut step = 1.0;
        lo = w - step;
        while eq.g(lo) > 0.0 {
            iterations += 1;
            hi = lo;
            step *= 2.0;
            lo -= step;
        }
    }

    // Newton within the bracket, bisection fallback when a step leaves it.
    // |g| is the relative residual of the defining product, so it is driven
    // all the way to machine precision: downstream consumers difference
    // near-equal B values and would amplify any slack left in φ. The floor
    // only covers the evaluation noise of g itself at extreme magnitudes.
    let g_tol = 1e-14 + 4.0 * f64::EPSILON * eq.ln_target.abs();
    let mut g = eq.g(w);
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        if g.abs() <= g_tol + 4.0 * f64::EPSILON * w.abs() {
            break;
        }
        if g < 0.0 {
            lo = w;
        } else {
            hi = w;
        }
        if hi - lo <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
        let newton = w - g / eq.g_prime(w);
        w = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        g = eq.g(w);
    }

    let excess = w.exp();
    if !excess.is_finite() {
        // Happens for p very close to 1 with large s, where the true root
        // is on the order of exp(ln(target)/(p−1)).
        return Err(Error::Domain(format!(
            "root exceeds the representable range: ln(phi) ~= {w:.1}"
        )));
    }
    let residual = defining_residual(exp, s, excess);
    // Negated `<=` so a NaN residual fails the certificate too.
    if !(residual.abs() <= RESIDUAL_TOL * (1.0 + s)) {
        return Err(Error::Solver {
            iterations,
            lo: lo.exp(),
            hi: hi.exp(),
            residual,
        });
    }
    Ok(PhiValue {
        s,
        phi: floor + excess,
        excess,
        residual,
        iterations,
    })
}

/// Closed-form derivative φ′(s) for s > 0:
///
/// ```text
///     p < 2:   φ′ = φ (1 + φ) / ( s (1 + (p−1) φ) )
///     p > 2:   φ′ = (1 + φ)(φ − p + 2) / ( (p−1) s (φ − p + 3) )
/// ```
pub fn phi_prime(exp: &Exponent, s: f64, phi: f64) -> Result<f64> {
    let floor = floor_of(exp);
    if floor.is_nan() {
        return Err(Error::Domain(
            "the implicit function is defined only for p != 2".into(),
        ));
    }
    if !(phi > floor) {
        return Err(Error::Domain(format!(
            "phi must exceed the regime floor {floor}, got {phi}"
        )));
    }
    phi_prime_from_excess(exp, s, phi - floor)
}

/// Same derivative, but taking the cancellation-free excess u = φ − floor.
/// Prefer this over [`phi_prime`] wherever a [`PhiValue`] is in hand: above
/// p = 2 at small s the root hugs its floor and re-deriving u from φ throws
/// away most of its digits.
pub fn phi_prime_from_excess(exp: &Exponent, s: f64, u: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "phi_prime needs finite s > 0, got {s}"
        )));
    }
    let p = exp.p();
    match exp.regime() {
        Regime::Sub2 => Ok(u * (1.0 + u) / (s * (1.0 + (p - 1.0) * u))),
        Regime::Super2 => Ok(((p - 1.0) + u) * u / ((p - 1.0) * s * (1.0 + u))),
        Regime::Two => unreachable!("caught above"),
    }
}

/// True iff φ(s) sits on the correct side of the reference power
/// s^{1/(p−1)}: at or above it for s ≤ s₀, at or below it for s ≥ s₀,
/// where s₀ is [`Exponent::s_threshold`]. The two sides meet exactly at s₀.
pub fn phi_threshold_check(exp: &Exponent, s: f64) -> Result<bool> {
    let value = solve_phi(exp, s)?;
    let reference = s.powf(1.0 / (exp.p() - 1.0));
    let tol = 1e-12 * (1.0 + reference.abs() + value.phi.abs());
    if s <= exp.s_threshold() {
        Ok(value.phi >= reference - tol)
    } else {
        Ok(value.phi <= reference + tol)
    }
}
