//! Report types shared by every checker, plus the tolerance profiles that
//! turn worst-case slacks into verdicts.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::grid::GridSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Used when a check cannot decide either way (e.g. a quadrature tail
    /// estimate too large to trust the comparison).
    Inconclusive,
}

/// Outcome of one check. `worst_violation` is a signed normalized slack:
/// nonnegative means the condition held everywhere, negative means the
/// worst offender undershot by that amount (scaled).
///
/// Serialized field order is part of the report schema; see README.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub condition: String,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    pub worst_violation: f64,
    /// Coordinates of the worst offender (keys depend on the check).
    pub location: BTreeMap<String, f64>,
    #[serde(rename = "samples")]
    pub samples_checked: u64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerance: f64,
    /// Points the check could not evaluate (solver failures). Any
    /// indeterminate point fails the report: a verifier must not skip.
    pub indeterminate: u64,
    /// Check-specific scalar diagnostics.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn new(
        condition: impl Into<String>,
        p: f64,
        worst_violation: f64,
        tolerance: f64,
        samples_checked: u64,
        indeterminate: u64,
    ) -> Self {
        let verdict = if indeterminate > 0 || !(worst_violation >= -tolerance) {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        Self {
            condition: condition.into(),
            p,
            grid: None,
            worst_violation,
            location: BTreeMap::new(),
            samples_checked,
            verdict,
            seed: None,
            tolerance,
            indeterminate,
            details: BTreeMap::new(),
        }
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_location<I>(mut self, entries: I) -> Self
    where
        I: IntoIterator<Item = (&'static str, f64)>,
    {
        self.location = entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        self
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    /// Downgrade a pass to inconclusive (never upgrades a fail).
    pub fn make_inconclusive(mut self) -> Self {
        if self.verdict == Verdict::Pass {
            self.verdict = Verdict::Inconclusive;
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Tolerances keyed by how a quantity is computed, not by which condition
/// uses it: closed-form grid checks are much tighter than anything that
/// goes through finite differences or quadrature.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ToleranceProfile {
    /// Grid checks of closed-form inequalities (normalized slack).
    pub closed_form: f64,
    /// Two-sided identity checks (discriminant equality, affine match).
    pub identity: f64,
    /// Algebraic identities expected to hold to roundoff.
    pub exact: f64,
    /// Checks that difference the closed-form gradient numerically.
    pub fd: f64,
    /// Monte Carlo over exact finite-support expectations.
    pub mc_exact: f64,
    /// Quadrature-based comparisons (relative).
    pub quadrature: f64,
    /// Empirical-norm slack for simulated inequalities (relative).
    pub statistical: f64,
}

impl ToleranceProfile {
    pub fn standard() -> Self {
        Self {
            closed_form: 1e-9,
            identity: 1e-8,
            exact: 1e-12,
            fd: 1e-4,
            mc_exact: 1e-10,
            quadrature: 0.05,
            statistical: 0.02,
        }
    }

    /// One decade tighter across the board; useful for regression hunting.
    pub fn strict() -> Self {
        Self {
            closed_form: 1e-10,
            identity: 1e-9,
            exact: 1e-13,
            fd: 1e-5,
            mc_exact: 1e-11,
            quadrature: 0.02,
            statistical: 0.01,
        }
    }

    /// One decade looser; for quick smoke runs on coarse grids.
    pub fn relaxed() -> Self {
        Self {
            closed_form: 1e-8,
            identity: 1e-7,
            exact: 1e-11,
            fd: 1e-3,
            mc_exact: 1e-9,
            quadrature: 0.1,
            statistical: 0.05,
        }
    }
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self::standard()
    }
}
