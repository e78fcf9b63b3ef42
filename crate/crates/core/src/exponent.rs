use serde::Serialize;

use crate::error::{Error, Result};

/// Which side of p = 2 an exponent falls on. The Bellman function and its
/// implicit equation take different closed forms in each regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// 1 < p < 2
    Sub2,
    /// p = 2 exactly
    Two,
    /// p > 2
    Super2,
}

/// An integrability exponent p ∈ (1, ∞) together with the derived quantities
/// everything downstream needs: the conjugate p′ = p/(p−1), the dominant
/// exponent p* = max(p, p′), and the sharp constant K = (p* − 1)^p.
#[derive(Clone, Copy, Debug)]
pub struct Exponent {
    p: f64,
    conjugate: f64,
    p_star: f64,
    constant: f64,
    regime: Regime,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::Domain(format!(
                "exponent must be finite and > 1, got {p}"
            )));
        }
        let conjugate = p / (p - 1.0);
        let p_star = p.max(conjugate);
        let regime = if p < 2.0 {
            Regime::Sub2
        } else if p == 2.0 {
            Regime::Two
        } else {
            Regime::Super2
        };
        Ok(Self {
            p,
            conjugate,
            p_star,
            constant: (p_star - 1.0).powf(p),
            regime,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Hölder conjugate p′ = p/(p−1).
    pub fn conjugate(&self) -> f64 {
        self.conjugate
    }

    /// p* = max(p, p′).
    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    /// The sharp constant K = (p* − 1)^p. Equals (p−1)^{−p} for p < 2,
    /// 1 at p = 2, and (p−1)^p for p > 2.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// The threshold s₀ where the implicit function φ crosses s^{1/(p−1)} and
    /// where the majorant K x^p/p + z^{p′}/p′ touches the surface: the
    /// equality curve is z = s₀ x^{p−1}. Equals (p−1)^{1−p} for p < 2, 1 at
    /// p = 2, and (p−1)^{p−1} for p > 2.
    pub fn s_threshold(&self) -> f64 {
        match self.regime {
            Regime::Sub2 => (self.p - 1.0).powf(1.0 - self.p),
            Regime::Two => 1.0,
            Regime::Super2 => (self.p - 1.0).powf(self.p - 1.0),
        }
    }
}
