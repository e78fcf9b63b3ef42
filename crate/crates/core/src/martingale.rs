//! Discrete-time martingale experiments.
//!
//! Generates martingale pairs `(f, g)` with `g` differentially subordinate
//! to `f` (optionally carrying a third series `h`), then validates the
//! inequalities the extremal surface certifies: the sharp `L^p` transform
//! bound `‖g‖_p ≤ (p*−1)‖f‖_p`, the dual bracket bound, its Young-form
//! variant, the joint-variation bound, the exact one-step `p = 2`
//! inequality, and the one-step supermartingale property of the zigzag
//! majorant `U`.
//!
//! Everything is reproducible: a path is a pure function of
//! `(root seed, stream tag, path index)`; batches are generated in parallel
//! but collected in index order and reduced sequentially.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bellman::eval_u_radial;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::report::{ToleranceProfile, VerificationReport};

/// Relative slack granted to the empirical-norm comparisons. The
/// inequalities are theorems; the slack only absorbs Monte Carlo noise on
/// the favorable side of the bound, and acceptance runs use fixed seeds.
pub const EPS_STAT: f64 = 0.02;

/// Path dimensions are confined to ℝ^d for small d, matching the rest of
/// the crate's finite-dimensional restriction.
pub const MAX_PATH_DIM: usize = 8;

/// Subordination factors drawn by the generators are capped strictly below
/// one so that the *exact* (no-tolerance) certificate `|dg_n| ≤ |df_n|`
/// survives the rounding of norm computations after rotations.
const RHO_CAP: f64 = 1.0 - 1e-9;

/// Stream tags namespace the per-path RNG streams: subordinate batches use
/// their dimension (1..=8), the remaining generators fixed tags above that.
const TAG_TRANSFORM: u64 = 16;
const TAG_ADVERSARIAL: u64 = 17;
const TAG_TREE: u64 = 18;
const TAG_U_CHECK: u64 = 19;

fn stream_rng(root_seed: u64, tag: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(root_seed);
    rng.set_stream((tag << 48) | (index & 0x0000_ffff_ffff_ffff));
    rng
}

fn slice_norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Uniform direction on the unit sphere of ℝ^dim (±1 when dim = 1).
fn unit_direction(rng: &mut impl Rng, dim: usize, out: &mut [f64]) {
    loop {
        for c in out[..dim].iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let n = slice_norm(&out[..dim]);
        if n > 1e-12 {
            for c in out[..dim].iter_mut() {
                *c /= n;
            }
            return;
        }
    }
}

/// Reflect `v` through the hyperplane orthogonal to the unit vector `u`.
fn reflect(v: &mut [f64], u: &[f64]) {
    let c = 2.0 * dot(v, u);
    for (vi, ui) in v.iter_mut().zip(u) {
        *vi -= c * ui;
    }
}

/// How a path's filtration was realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FiltrationTag {
    DyadicTree,
    RngStream,
}

/// Increment magnitude law for the scalar transform generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueDist {
    /// ±1 fair steps.
    SymmetricTwoPoint,
    /// |N(0,1)| magnitudes with an independent fair sign.
    Gaussian,
}

/// A discrete triple of increment sequences `(df, dg, dh)` in ℝ^dim,
/// stored as flat rows. Row 0 holds the initial values `f₀, g₀, h₀`
/// (zero for every generator here); rows `1..=steps` are the increments.
///
/// Construction enforces the subordination certificate `|dg_n| ≤ |df_n|`
/// for every row — exactly, with no tolerance. The third series `h` is an
/// unconstrained companion martingale used by the bracket checks.
#[derive(Clone, Debug)]
pub struct IncrementPath {
    dim: usize,
    steps: usize,
    df: Vec<f64>,
    dg: Vec<f64>,
    dh: Vec<f64>,
    pub filtration_tag: FiltrationTag,
}

impl IncrementPath {
    pub fn new(
        dim: usize,
        steps: usize,
        df: Vec<f64>,
        dg: Vec<f64>,
        dh: Vec<f64>,
        filtration_tag: FiltrationTag,
    ) -> Result<Self> {
        if dim == 0 || dim > MAX_PATH_DIM {
            return Err(Error::Domain(format!(
                "path dimension must be in 1..={MAX_PATH_DIM}, got {dim}"
            )));
        }
        if steps == 0 {
            return Err(Error::Domain("a path needs at least one step".into()));
        }
        let rows = steps + 1;
        for (name, series) in [("df", &df), ("dg", &dg), ("dh", &dh)] {
            if series.len() != rows * dim {
                return Err(Error::Domain(format!(
                    "{name} must hold {rows} rows of dimension {dim}, got length {}",
                    series.len()
                )));
            }
            if !series.iter().all(|c| c.is_finite()) {
                return Err(Error::Domain(format!("{name} contains non-finite entries")));
            }
        }
        let path = Self {
            dim,
            steps,
            df,
            dg,
            dh,
            filtration_tag,
        };
        let excess = path.certificate_max_excess();
        if excess > 0.0 {
            return Err(Error::Domain(format!(
                "subordination certificate violated: max(|dg| - |df|) = {excess:e}"
            )));
        }
        Ok(path)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn df(&self, n: usize) -> &[f64] {
        &self.df[n * self.dim..(n + 1) * self.dim]
    }

    pub fn dg(&self, n: usize) -> &[f64] {
        &self.dg[n * self.dim..(n + 1) * self.dim]
    }

    pub fn dh(&self, n: usize) -> &[f64] {
        &self.dh[n * self.dim..(n + 1) * self.dim]
    }

    /// `max_n (|dg_n| − |df_n|)`; nonpositive for any constructed path.
    pub fn certificate_max_excess(&self) -> f64 {
        (0..=self.steps)
            .map(|n| slice_norm(self.dg(n)) - slice_norm(self.df(n)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn terminal(&self, series: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim];
        for n in 0..=self.steps {
            for j in 0..self.dim {
                acc[j] += series[n * self.dim + j];
            }
        }
        acc
    }

    pub fn terminal_f_norm(&self) -> f64 {
        slice_norm(&self.terminal(&self.df))
    }

    pub fn terminal_g_norm(&self) -> f64 {
        slice_norm(&self.terminal(&self.dg))
    }

    pub fn terminal_h_norm(&self) -> f64 {
        slice_norm(&self.terminal(&self.dh))
    }

    /// Discrete bracket `Σ_n ⟨dg_n, dh_n⟩` (initial rows included; they are
    /// zero for generated paths).
    pub fn bracket_gh(&self) -> f64 {
        (0..=self.steps)
            .map(|n| dot(self.dg(n), self.dh(n)))
            .sum()
    }

    /// Joint variation `Σ_n |df_n||dh_n|` over the full partition.
    pub fn joint_variation_fh(&self) -> f64 {
        (0..=self.steps)
            .map(|n| slice_norm(self.df(n)) * slice_norm(self.dh(n)))
            .sum()
    }

    fn is_f_null(&self) -> bool {
        self.df.iter().all(|&c| c == 0.0)
    }
}

/// Scalar martingale transform pair: `f` has symmetric increments from
/// `value_dist`, the predictable sign `v_n = −sign(f_{n−1})` (1 at the
/// start) defines `dg_n = v_n·df_n`, and `h` is an independent companion
/// with the same increment law. Sign multiplications are exact, so
/// `|dg_n| = |df_n|` holds with equality.
pub fn gen_transform_pair(
    steps: usize,
    rng_seed: u64,
    value_dist: ValueDist,
) -> Result<IncrementPath> {
    let mut rng = stream_rng(rng_seed, TAG_TRANSFORM, 0);
    gen_transform_from(steps, value_dist, &mut rng)
}

fn gen_transform_from(
    steps: usize,
    value_dist: ValueDist,
    rng: &mut ChaCha12Rng,
) -> Result<IncrementPath> {
    if steps == 0 {
        return Err(Error::Domain("steps must be at least 1".into()));
    }
    let rows = steps + 1;
    let mut df = vec![0.0; rows];
    let mut dg = vec![0.0; rows];
    let mut dh = vec![0.0; rows];
    let mut f_level = 0.0;
    let draw = |rng: &mut ChaCha12Rng| -> f64 {
        let magnitude = match value_dist {
            ValueDist::SymmetricTwoPoint => 1.0,
            ValueDist::Gaussian => rng.sample::<f64, _>(StandardNormal).abs(),
        };
        // Independent fair sign keeps the increment symmetric regardless of
        // how the magnitude was produced.
        if rng.gen::<bool>() {
            magnitude
        } else {
            -magnitude
        }
    };
    for n in 1..=steps {
        // Greedy sign: push g against f's current level; ties go positive.
        let v = if f_level > 0.0 { -1.0 } else { 1.0 };
        let step = draw(rng);
        df[n] = step;
        dg[n] = v * step;
        dh[n] = draw(rng);
        f_level += step;
    }
    IncrementPath::new(1, steps, df, dg, dh, FiltrationTag::RngStream)
}

/// Vector subordinate pair in ℝ^dim: `df_n` is a uniform direction scaled
/// by |N(0,1)| with an independent fair sign flip; `dg_n = ρ_n·R_n(df_n)`
/// where the factor `ρ_n ∈ [0, 1)` and the rotation `R_n` (a composition of
/// two reflections, so norm-preserving and orientation-preserving) are drawn
/// *before* the increment — auxiliary randomness revealed at time n−1, hence
/// predictable. `h` is an independent symmetric companion.
pub fn gen_subordinate_pair(dim: usize, steps: usize, rng_seed: u64) -> Result<IncrementPath> {
    let mut rng = stream_rng(rng_seed, dim as u64, 0);
    gen_subordinate_from(dim, steps, &mut rng)
}

fn gen_subordinate_from(
    dim: usize,
    steps: usize,
    rng: &mut ChaCha12Rng,
) -> Result<IncrementPath> {
    if dim == 0 || dim > MAX_PATH_DIM {
        return Err(Error::Domain(format!(
            "path dimension must be in 1..={MAX_PATH_DIM}, got {dim}"
        )));
    }
    if steps == 0 {
        return Err(Error::Domain("steps must be at least 1".into()));
    }
    let rows = steps + 1;
    let mut df = vec![0.0; rows * dim];
    let mut dg = vec![0.0; rows * dim];
    let mut dh = vec![0.0; rows * dim];
    let mut axis_a = [0.0_f64; MAX_PATH_DIM];
    let mut axis_b = [0.0_f64; MAX_PATH_DIM];
    let mut dir = [0.0_f64; MAX_PATH_DIM];

    for n in 1..=steps {
        // Predictable layer first: subordination factor and rotation axes.
        let rho = rng.gen::<f64>() * RHO_CAP;
        if dim >= 2 {
            unit_direction(rng, dim, &mut axis_a);
            unit_direction(rng, dim, &mut axis_b);
        }

        // The f increment.
        unit_direction(rng, dim, &mut dir);
        let magnitude = rng.sample::<f64, _>(StandardNormal).abs();
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let row = &mut df[n * dim..(n + 1) * dim];
        for (slot, d) in row.iter_mut().zip(&dir[..dim]) {
            *slot = d * magnitude * sign;
        }

        // g increment: rotate, then shrink by ρ.
        let g_row = &mut dg[n * dim..(n + 1) * dim];
        g_row.copy_from_slice(&df[n * dim..(n + 1) * dim]);
        if dim >= 2 {
            reflect(g_row, &axis_a[..dim]);
            reflect(g_row, &axis_b[..dim]);
        }
        for c in g_row.iter_mut() {
            *c *= rho;
        }

        // Independent companion increment for h.
        unit_direction(rng, dim, &mut dir);
        let magnitude = rng.sample::<f64, _>(StandardNormal).abs();
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let row = &mut dh[n * dim..(n + 1) * dim];
        for (slot, d) in row.iter_mut().zip(&dir[..dim]) {
            *slot = d * magnitude * sign;
        }
    }
    IncrementPath::new(dim, steps, df, dg, dh, FiltrationTag::RngStream)
}

/// Generate `paths` subordinate triples in parallel; path `i` uses RNG
/// stream `i` under the root seed, so the batch is independent of thread
/// scheduling.
pub fn gen_subordinate_batch(
    dim: usize,
    steps: usize,
    paths: usize,
    root_seed: u64,
) -> Result<Vec<IncrementPath>> {
    (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(root_seed, dim as u64, i as u64);
            gen_subordinate_from(dim, steps, &mut rng)
        })
        .collect()
}

/// Batch variant of [`gen_transform_pair`].
pub fn gen_transform_batch(
    steps: usize,
    paths: usize,
    root_seed: u64,
    value_dist: ValueDist,
) -> Result<Vec<IncrementPath>> {
    (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(root_seed, TAG_TRANSFORM, i as u64);
            gen_transform_from(steps, value_dist, &mut rng)
        })
        .collect()
}

/// Outcome of one empirical inequality check over a batch. `slack` is
/// `bound·(1 + EPS_STAT) − ratio`; nonnegative means the check held.
#[derive(Clone, Debug, Serialize)]
pub struct BatchStatistics {
    pub check: &'static str,
    pub seed: u64,
    pub p: f64,
    pub dim: usize,
    pub steps: usize,
    pub paths: usize,
    pub excluded: u64,
    pub ratio: f64,
    pub bound: f64,
    pub slack: f64,
}

impl BatchStatistics {
    pub fn holds(&self) -> bool {
        self.slack >= 0.0
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

struct BatchNorms {
    dim: usize,
    steps: usize,
    total: usize,
    excluded: u64,
    f_p: f64,
    g_p: f64,
    h_q: f64,
    mean_abs_bracket: f64,
    mean_joint_variation: f64,
}

/// Empirical `(mean |v|^p)^{1/p}` over the included paths, plus the bracket
/// and variation means, computed once for all the batch checks.
fn batch_norms(paths: &[IncrementPath], exp: &Exponent) -> Result<BatchNorms> {
    let first = paths
        .first()
        .ok_or_else(|| Error::Domain("empty path batch".into()))?;
    let (dim, steps) = (first.dim(), first.steps());
    if paths.iter().any(|pa| pa.dim() != dim || pa.steps() != steps) {
        return Err(Error::Domain(
            "batch must be homogeneous in dim and steps".into(),
        ));
    }
    let p = exp.p();
    let q = exp.conjugate();
    let mut excluded = 0u64;
    let mut sum_f = 0.0;
    let mut sum_g = 0.0;
    let mut sum_h = 0.0;
    let mut sum_bracket = 0.0;
    let mut sum_joint = 0.0;
    let mut included = 0usize;
    for path in paths {
        if path.is_f_null() {
            excluded += 1;
            continue;
        }
        included += 1;
        sum_f += path.terminal_f_norm().powf(p);
        sum_g += path.terminal_g_norm().powf(p);
        sum_h += path.terminal_h_norm().powf(q);
        sum_bracket += path.bracket_gh().abs();
        sum_joint += path.joint_variation_fh();
    }
    if included == 0 {
        return Err(Error::Domain(
            "every path in the batch has identically zero f".into(),
        ));
    }
    let n = included as f64;
    Ok(BatchNorms {
        dim,
        steps,
        total: paths.len(),
        excluded,
        f_p: (sum_f / n).powf(1.0 / p),
        g_p: (sum_g / n).powf(1.0 / p),
        h_q: (sum_h / n).powf(1.0 / q),
        mean_abs_bracket: sum_bracket / n,
        mean_joint_variation: sum_joint / n,
    })
}

/// Sharp transform bound: empirical `‖g‖_p / ‖f‖_p` against `p* − 1`.
///
/// Norms are taken at terminal time: for a fixed finite horizon the
/// terminal p-norm dominates every earlier one (conditional Jensen), which
/// is sanity-checked level-by-level on dyadic trees elsewhere.
pub fn check_lp_bound(paths: &[IncrementPath], exp: &Exponent) -> Result<BatchStatistics> {
    let norms = batch_norms(paths, exp)?;
    if norms.f_p == 0.0 {
        return Err(Error::Domain("empirical ‖f‖_p vanished".into()));
    }
    let ratio = norms.g_p / norms.f_p;
    let bound = exp.p_star() - 1.0;
    Ok(BatchStatistics {
        check: "lp_bound",
        seed: 0,
        p: exp.p(),
        dim: norms.dim,
        steps: norms.steps,
        paths: norms.total,
        excluded: norms.excluded,
        ratio,
        bound,
        slack: bound * (1.0 + EPS_STAT) - ratio,
    })
}

/// Dual bracket bound `E|Σ⟨dg, dh⟩| ≤ (p*−1)‖f‖_p‖h‖_{p′}`, returned
/// together with its Young-form variant `K‖f‖_p^p/p + ‖h‖_{p′}^{p′}/p′`
/// (always the weaker of the two by Young's inequality).
pub fn check_dual_bound(
    paths: &[IncrementPath],
    exp: &Exponent,
) -> Result<[BatchStatistics; 2]> {
    let norms = batch_norms(paths, exp)?;
    let p = exp.p();
    let q = exp.conjugate();
    let ratio = norms.mean_abs_bracket;
    let product_bound = (exp.p_star() - 1.0) * norms.f_p * norms.h_q;
    let young_bound = exp.constant() * norms.f_p.powf(p) / p + norms.h_q.powf(q) / q;
    let base = BatchStatistics {
        check: "dual_bracket",
        seed: 0,
        p,
        dim: norms.dim,
        steps: norms.steps,
        paths: norms.total,
        excluded: norms.excluded,
        ratio,
        bound: product_bound,
        slack: product_bound * (1.0 + EPS_STAT) - ratio,
    };
    let young = BatchStatistics {
        check: "dual_bracket_young",
        bound: young_bound,
        slack: young_bound * (1.0 + EPS_STAT) - ratio,
        ..base.clone()
    };
    Ok([base, young])
}

/// Joint variation bound `E Σ|df||dh| ≤ K^{1/p}‖f‖_p‖h‖_{p′}`.
pub fn check_joint_variation(
    paths: &[IncrementPath],
    exp: &Exponent,
) -> Result<BatchStatistics> {
    let norms = batch_norms(paths, exp)?;
    let ratio = norms.mean_joint_variation;
    let bound = exp.constant().powf(1.0 / exp.p()) * norms.f_p * norms.h_q;
    Ok(BatchStatistics {
        check: "joint_variation",
        seed: 0,
        p: exp.p(),
        dim: norms.dim,
        steps: norms.steps,
        paths: norms.total,
        excluded: norms.excluded,
        ratio,
        bound,
        slack: bound * (1.0 + EPS_STAT) - ratio,
    })
}

/// One atom of a finite-support one-step extension.
#[derive(Clone, Debug)]
pub struct StepAtom {
    pub prob: f64,
    pub df: Vec<f64>,
    pub dh: Vec<f64>,
}

/// Both sides of the exact one-step computation at `p = 2`.
#[derive(Clone, Copy, Debug)]
pub struct StepSlack {
    /// `E½(|f+df|² + |h+dh|²) − ½(|f|² + |h|²) − E|df||dh|`.
    pub slack: f64,
    /// The closed form `½E(|df| − |dh|)²`; equals `slack` whenever both
    /// increment means vanish (or the state is the origin).
    pub closed_form: f64,
}

/// Exact one-step inequality for the quadratic surface: conditioned on the
/// state `(f, h)`, the expectation of `½(|f_n|² + |h_n|²)` grows by at
/// least `E|df||dh|`. Everything is a finite sum — no sampling.
pub fn check_p2_step_inequality(
    state_f: &[f64],
    state_h: &[f64],
    atoms: &[StepAtom],
) -> Result<StepSlack> {
    if state_f.len() != state_h.len() || state_f.is_empty() {
        return Err(Error::Domain(
            "state vectors must share a nonzero dimension".into(),
        ));
    }
    if atoms.is_empty() {
        return Err(Error::Domain("one-step extension needs atoms".into()));
    }
    let dim = state_f.len();
    let mut prob_sum = 0.0;
    for atom in atoms {
        if !(atom.prob > 0.0 && atom.prob.is_finite()) {
            return Err(Error::Domain(format!(
                "atom probability must be positive, got {}",
                atom.prob
            )));
        }
        if atom.df.len() != dim || atom.dh.len() != dim {
            return Err(Error::Domain(
                "atom increments must match the state dimension".into(),
            ));
        }
        prob_sum += atom.prob;
    }
    if (prob_sum - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "atom probabilities sum to {prob_sum}, not 1"
        )));
    }

    let quad = |f: &[f64], h: &[f64]| 0.5 * (dot(f, f) + dot(h, h));
    let before = quad(state_f, state_h);
    let mut after = 0.0;
    let mut cross = 0.0;
    let mut closed = 0.0;
    let mut fx = vec![0.0; dim];
    let mut hx = vec![0.0; dim];
    for atom in atoms {
        for j in 0..dim {
            fx[j] = state_f[j] + atom.df[j];
            hx[j] = state_h[j] + atom.dh[j];
        }
        let ndf = slice_norm(&atom.df);
        let ndh = slice_norm(&atom.dh);
        after += atom.prob * quad(&fx, &hx);
        cross += atom.prob * ndf * ndh;
        closed += atom.prob * 0.5 * (ndf - ndh).powi(2);
    }
    Ok(StepSlack {
        slack: after - before - cross,
        closed_form: closed,
    })
}

/// One-step supermartingale check for the zigzag majorant: at random states
/// `(x, y)` with random finite-support mean-zero extensions `(H, K)`
/// satisfying `|k_i| ≤ |h_i|` atomwise, the exact expectation
/// `E U(x+H, y+K)` must not exceed `U(x, y)`.
///
/// Atom sets have 2–4 atoms; the last `k`-atom is forced by the mean-zero
/// constraint, and draws where it breaks subordination are rejected and
/// redrawn (counted in `details.resampled`).
pub fn check_u_supermartingale(
    exp: &Exponent,
    dim: usize,
    samples: usize,
    rng_seed: u64,
    tol: &ToleranceProfile,
) -> Result<VerificationReport> {
    if dim == 0 || dim > MAX_PATH_DIM {
        return Err(Error::Domain(format!(
            "dimension must be in 1..={MAX_PATH_DIM}, got {dim}"
        )));
    }
    if samples == 0 {
        return Err(Error::Domain("samples must be nonzero".into()));
    }

    struct SampleOutcome {
        slack: f64,
        x_norm: f64,
        y_norm: f64,
        resampled: u64,
        indeterminate: bool,
    }

    let outcomes: Vec<SampleOutcome> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(rng_seed, TAG_U_CHECK, i as u64);
            let mut resampled = 0u64;
            for _ in 0..64 {
                match try_u_sample(exp, dim, &mut rng) {
                    Some((slack, x_norm, y_norm)) => {
                        return SampleOutcome {
                            slack,
                            x_norm,
                            y_norm,
                            resampled,
                            indeterminate: false,
                        };
                    }
                    None => resampled += 1,
                }
            }
            SampleOutcome {
                slack: f64::INFINITY,
                x_norm: 0.0,
                y_norm: 0.0,
                resampled,
                indeterminate: true,
            }
        })
        .collect();

    let mut worst = f64::INFINITY;
    let mut worst_idx = 0usize;
    let mut worst_x = 0.0;
    let mut worst_y = 0.0;
    let mut resampled = 0u64;
    let mut indeterminate = 0u64;
    for (i, o) in outcomes.iter().enumerate() {
        resampled += o.resampled;
        if o.indeterminate {
            indeterminate += 1;
            continue;
        }
        if o.slack < worst {
            worst = o.slack;
            worst_idx = i;
            worst_x = o.x_norm;
            worst_y = o.y_norm;
        }
    }

    Ok(VerificationReport::new(
        "u_supermartingale",
        exp.p(),
        worst,
        tol.mc_exact,
        samples as u64,
        indeterminate,
    )
    .with_seed(rng_seed)
    .with_location([
        ("sample_index", worst_idx as f64),
        ("x_norm", worst_x),
        ("y_norm", worst_y),
    ])
    .with_detail("resampled", resampled as f64))
}

/// One admissible (state, extension) draw and its normalized slack, or None
/// if the forced last atom broke subordination.
fn try_u_sample(exp: &Exponent, dim: usize, rng: &mut ChaCha12Rng) -> Option<(f64, f64, f64)> {
    let mut dir = [0.0_f64; MAX_PATH_DIM];

    let mut draw_vec = |rng: &mut ChaCha12Rng, scale: f64| -> Vec<f64> {
        unit_direction(rng, dim, &mut dir);
        let mag: f64 = rng.sample::<f64, _>(StandardNormal);
        dir[..dim].iter().map(|d| d * mag * scale).collect()
    };

    // State with norms spread over several decades.
    let x_scale = 10.0_f64.powf(rng.gen_range(-2.0..2.0));
    let x: Vec<f64> = draw_vec(rng, x_scale);
    let y_scale = x_scale * 10.0_f64.powf(rng.gen_range(-1.0..1.0));
    let y: Vec<f64> = draw_vec(rng, y_scale);

    let atom_count = rng.gen_range(2..=4usize);
    let mut probs: Vec<f64> = (0..atom_count).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = probs.iter().sum();
    for pr in probs.iter_mut() {
        *pr /= total;
    }

    // h-atoms at the state's scale, centered to conditional mean zero.
    let mut hs: Vec<Vec<f64>> = (0..atom_count).map(|_| draw_vec(rng, x_scale)).collect();
    let mut mean = vec![0.0; dim];
    for (pr, h) in probs.iter().zip(&hs) {
        for j in 0..dim {
            mean[j] += pr * h[j];
        }
    }
    for h in hs.iter_mut() {
        for j in 0..dim {
            h[j] -= mean[j];
        }
    }

    // k-atoms: free subordinate choices except the last, which is forced.
    let mut ks: Vec<Vec<f64>> = Vec::with_capacity(atom_count);
    for h in hs.iter().take(atom_count - 1) {
        let rho = rng.gen::<f64>() * RHO_CAP;
        unit_direction(rng, dim, &mut dir);
        let len = rho * slice_norm(h);
        ks.push(dir[..dim].iter().map(|d| d * len).collect());
    }
    let last_p = probs[atom_count - 1];
    let mut forced = vec![0.0; dim];
    for (pr, k) in probs.iter().zip(&ks) {
        for j in 0..dim {
            forced[j] -= pr * k[j];
        }
    }
    for c in forced.iter_mut() {
        *c /= last_p;
    }
    if slice_norm(&forced) > slice_norm(&hs[atom_count - 1]) {
        return None;
    }
    ks.push(forced);

    let x_norm = slice_norm(&x);
    let y_norm = slice_norm(&y);
    let u0 = eval_u_radial(exp, x_norm, y_norm);
    let mut expected = 0.0;
    let mut scale = 1.0 + u0.abs();
    let mut xh = vec![0.0; dim];
    let mut yk = vec![0.0; dim];
    for ((pr, h), k) in probs.iter().zip(&hs).zip(&ks) {
        for j in 0..dim {
            xh[j] = x[j] + h[j];
            yk[j] = y[j] + k[j];
        }
        let u = eval_u_radial(exp, slice_norm(&xh), slice_norm(&yk));
        expected += pr * u;
        scale += pr * u.abs();
    }
    Some(((u0 - expected) / scale, x_norm, y_norm))
}

/// A finite rooted martingale tree: each node carries `(f, g)` values and
/// children with probabilities; the children of every internal node average
/// back to the node (martingale property) and every edge satisfies
/// `|Δg| ≤ |Δf|`.
#[derive(Clone, Debug)]
pub struct TreeNode {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub children: Vec<(f64, TreeNode)>,
}

#[derive(Clone, Debug)]
pub struct TreeMartingale {
    pub dim: usize,
    pub root: TreeNode,
}

impl TreeMartingale {
    /// Random complete dyadic tree: each internal node branches `±v` in `f`
    /// and `±ρ·v` in `g` with equal probability (exact conditional means).
    pub fn gen_dyadic(dim: usize, depth: usize, seed: u64) -> Result<Self> {
        if dim == 0 || dim > MAX_PATH_DIM {
            return Err(Error::Domain(format!(
                "dimension must be in 1..={MAX_PATH_DIM}, got {dim}"
            )));
        }
        if depth == 0 || depth > 16 {
            return Err(Error::Domain(format!(
                "tree depth must be in 1..=16, got {depth}"
            )));
        }
        let mut rng = stream_rng(seed, TAG_TREE, 0);
        let root = Self::grow(
            vec![0.0; dim],
            vec![0.0; dim],
            dim,
            depth,
            &mut rng,
        );
        Ok(Self { dim, root })
    }

    fn grow(f: Vec<f64>, g: Vec<f64>, dim: usize, remaining: usize, rng: &mut ChaCha12Rng) -> TreeNode {
        if remaining == 0 {
            return TreeNode {
                f,
                g,
                children: Vec::new(),
            };
        }
        let mut dir = [0.0_f64; MAX_PATH_DIM];
        unit_direction(rng, dim, &mut dir);
        let mag: f64 = rng.sample::<f64, _>(StandardNormal);
        let v: Vec<f64> = dir[..dim].iter().map(|d| d * mag).collect();
        // A signed factor in (−1, 1): the transform may flip orientation.
        let rho = (rng.gen::<f64>() * 2.0 - 1.0) * RHO_CAP;
        let w: Vec<f64> = v.iter().map(|c| c * rho).collect();

        let up = |base: &[f64], delta: &[f64], sign: f64| -> Vec<f64> {
            base.iter().zip(delta).map(|(b, d)| b + sign * d).collect()
        };
        let children = vec![
            (
                0.5,
                Self::grow(up(&f, &v, 1.0), up(&g, &w, 1.0), dim, remaining - 1, rng),
            ),
            (
                0.5,
                Self::grow(up(&f, &v, -1.0), up(&g, &w, -1.0), dim, remaining - 1, rng),
            ),
        ];
        TreeNode { f, g, children }
    }

    /// Check the structural invariants: probabilities sum to one, children
    /// average to the parent within float exactness, `|Δg| ≤ |Δf|` on every
    /// edge.
    pub fn validate(&self) -> Result<()> {
        fn walk(node: &TreeNode, dim: usize) -> Result<()> {
            if node.f.len() != dim || node.g.len() != dim {
                return Err(Error::Domain("tree node dimension mismatch".into()));
            }
            if node.children.is_empty() {
                return Ok(());
            }
            let mut prob = 0.0;
            let mut mean_f = vec![0.0; dim];
            for (pr, child) in &node.children {
                if !(*pr > 0.0) {
                    return Err(Error::Domain("child probability must be positive".into()));
                }
                prob += pr;
                for (m, cf) in mean_f.iter_mut().zip(&child.f) {
                    *m += pr * cf;
                }
                let delta_f: Vec<f64> =
                    child.f.iter().zip(&node.f).map(|(c, n)| c - n).collect();
                let delta_g: Vec<f64> =
                    child.g.iter().zip(&node.g).map(|(c, n)| c - n).collect();
                if slice_norm(&delta_g) > slice_norm(&delta_f) {
                    return Err(Error::Domain(
                        "edge violates |Δg| ≤ |Δf| subordination".into(),
                    ));
                }
                walk(child, dim)?;
            }
            if (prob - 1.0).abs() > 1e-14 {
                return Err(Error::Domain(format!(
                    "child probabilities sum to {prob}"
                )));
            }
            for (m, nf) in mean_f.iter().zip(&node.f) {
                if (m - nf).abs() > 1e-14 * (1.0 + nf.abs()) {
                    return Err(Error::Domain(
                        "conditional mean does not reproduce the node value".into(),
                    ));
                }
            }
            Ok(())
        }
        walk(&self.root, self.dim)
    }

    pub fn depth(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            node.children
                .iter()
                .map(|(_, c)| 1 + walk(c))
                .max()
                .unwrap_or(0)
        }
        walk(&self.root)
    }

    fn norm_at_level(&self, p: f64, level: usize, pick_g: bool) -> f64 {
        fn walk(
            node: &TreeNode,
            prob: f64,
            remaining: usize,
            p: f64,
            pick_g: bool,
            acc: &mut f64,
        ) {
            if remaining == 0 || node.children.is_empty() {
                let v = if pick_g { &node.g } else { &node.f };
                *acc += prob * slice_norm(v).powf(p);
                return;
            }
            for (pr, child) in &node.children {
                walk(child, prob * pr, remaining - 1, p, pick_g, acc);
            }
        }
        let mut acc = 0.0;
        walk(&self.root, 1.0, level, p, pick_g, &mut acc);
        acc.powf(1.0 / p)
    }

    /// Exact `E[|f_level|^p]^{1/p}` over the finite probability space
    /// (stopped at leaves shallower than `level`).
    pub fn f_norm_at_level(&self, p: f64, level: usize) -> f64 {
        self.norm_at_level(p, level, false)
    }

    pub fn g_norm_at_level(&self, p: f64, level: usize) -> f64 {
        self.norm_at_level(p, level, true)
    }

    /// `max_n ‖g_n‖_p / ‖f_N‖_p` over deterministic times — an exact
    /// expectation, so the transform bound must hold with no statistical
    /// slack at all.
    pub fn lp_ratio(&self, exp: &Exponent) -> f64 {
        let depth = self.depth();
        let denom = self.f_norm_at_level(exp.p(), depth);
        (0..=depth)
            .map(|n| self.g_norm_at_level(exp.p(), n) / denom)
            .fold(0.0, f64::max)
    }
}

/// Greedy adversarial transform probing the sharpness of `p* − 1`: scalar
/// increments on the exact-mean-zero asymmetric atoms {+2 w.p. 1/3, −1
/// w.p. 2/3}, with the predictable sign `v_n` chosen to maximize the next
/// conditional `p`-th moment of `g`. The resulting ratio is *reported*
/// (no extremal construction exists to compare against); the theorem still
/// caps it at `p* − 1`.
pub fn adversarial_transform_ratio(
    exp: &Exponent,
    steps: usize,
    paths: usize,
    root_seed: u64,
) -> Result<BatchStatistics> {
    if steps == 0 || paths == 0 {
        return Err(Error::Domain("steps and paths must be nonzero".into()));
    }
    let p = exp.p();
    let batch: Vec<IncrementPath> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(root_seed, TAG_ADVERSARIAL, i as u64);
            let rows = steps + 1;
            let mut df = vec![0.0; rows];
            let mut dg = vec![0.0; rows];
            let dh = vec![0.0; rows];
            let mut g_level = 0.0;
            for n in 1..=steps {
                // Pick v from the current g-level before seeing the step.
                let moment = |v: f64| {
                    (1.0 / 3.0) * (g_level + 2.0 * v).abs().powf(p)
                        + (2.0 / 3.0) * (g_level - v).abs().powf(p)
                };
                let v = if moment(1.0) >= moment(-1.0) { 1.0 } else { -1.0 };
                let step = if rng.gen::<f64>() < 1.0 / 3.0 { 2.0 } else { -1.0 };
                df[n] = step;
                dg[n] = v * step;
                g_level += dg[n];
            }
            IncrementPath::new(1, steps, df, dg, dh, FiltrationTag::RngStream)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut stats = check_lp_bound(&batch, exp)?;
    stats.check = "adversarial_transform";
    stats.seed = root_seed;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Exponent;

    fn exp(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    /// Hand-built batch with dg = ±df exactly (the v ≡ ±1 transforms).
    fn unit_transform_batch(sign: f64, paths: usize) -> Vec<IncrementPath> {
        let mut rng = stream_rng(99, 7, 0);
        (0..paths)
            .map(|_| {
                let steps = 20;
                let mut df = vec![0.0; steps + 1];
                let mut dg = vec![0.0; steps + 1];
                let mut dh = vec![0.0; steps + 1];
                for n in 1..=steps {
                    let x: f64 = rng.sample(StandardNormal);
                    df[n] = x;
                    dg[n] = sign * x;
                    dh[n] = -x;
                }
                IncrementPath::new(1, steps, df, dg, dh, FiltrationTag::RngStream).unwrap()
            })
            .collect()
    }

    #[test]
    fn identity_transforms_have_unit_ratio() {
        for sign in [1.0, -1.0] {
            let batch = unit_transform_batch(sign, 64);
            let stats = check_lp_bound(&batch, &exp(3.0)).unwrap();
            assert!((stats.ratio - 1.0).abs() < 1e-12);
            assert!(stats.holds());
        }
    }

    #[test]
    fn construction_rejects_bad_paths() {
        // Wrong row count.
        assert!(IncrementPath::new(
            1,
            2,
            vec![0.0; 2],
            vec![0.0; 3],
            vec![0.0; 3],
            FiltrationTag::RngStream
        )
        .is_err());
        // Certificate violation: |dg| > |df| on row 1.
        let err = IncrementPath::new(
            1,
            1,
            vec![0.0, 1.0],
            vec![0.0, 1.5],
            vec![0.0, 0.0],
            FiltrationTag::RngStream,
        )
        .unwrap_err();
        assert!(err.to_string().contains("subordination"));
    }

    #[test]
    fn generated_paths_carry_exact_certificates() {
        // Construction audit at the documented seed.
        let path = gen_subordinate_pair(3, 100, 2).unwrap();
        assert!(path.certificate_max_excess() <= 0.0);
        assert_eq!(path.dim(), 3);
        assert_eq!(path.steps(), 100);

        let path = gen_transform_pair(50, 1, ValueDist::SymmetricTwoPoint).unwrap();
        assert!(path.certificate_max_excess() <= 0.0);
        // ±1 transform: the certificate is tight.
        assert_eq!(path.certificate_max_excess(), 0.0);
    }

    #[test]
    fn transform_batch_respects_the_sharp_bound() {
        for p in [1.5, 2.0, 3.0] {
            let e = exp(p);
            for dist in [ValueDist::SymmetricTwoPoint, ValueDist::Gaussian] {
                let batch = gen_transform_batch(50, 2000, 1, dist).unwrap();
                let stats = check_lp_bound(&batch, &e).unwrap();
                assert!(
                    stats.holds(),
                    "p = {p}, {dist:?}: ratio {} vs bound {}",
                    stats.ratio,
                    stats.bound
                );
            }
        }
    }

    #[test]
    fn subordinate_batches_pass_all_inequalities() {
        for p in [1.5, 2.0, 3.0] {
            let e = exp(p);
            for dim in [1, 2, 3] {
                let batch = gen_subordinate_batch(dim, 50, 2000, 0).unwrap();
                let lp = check_lp_bound(&batch, &e).unwrap();
                assert!(lp.holds(), "lp p={p} dim={dim}: {lp:?}");
                let [dual, young] = check_dual_bound(&batch, &e).unwrap();
                assert!(dual.holds(), "dual p={p} dim={dim}: {dual:?}");
                assert!(young.holds(), "young p={p} dim={dim}: {young:?}");
                assert!(young.bound >= dual.bound, "Young form is the weaker bound");
                let jv = check_joint_variation(&batch, &e).unwrap();
                assert!(jv.holds(), "joint p={p} dim={dim}: {jv:?}");
            }
        }
    }

    #[test]
    fn joint_variation_is_tight_for_p2_self_pairs() {
        // h := f with f₀ = 0 makes E Σ|df|² equal ‖f_T‖₂² in expectation,
        // and the bound constant K^{1/2} is exactly 1.
        let base = gen_subordinate_batch(2, 50, 4000, 3).unwrap();
        let batch: Vec<IncrementPath> = base
            .iter()
            .map(|pa| {
                let rows = (pa.steps() + 1) * pa.dim();
                let mut df = Vec::with_capacity(rows);
                for n in 0..=pa.steps() {
                    df.extend_from_slice(pa.df(n));
                }
                IncrementPath::new(
                    pa.dim(),
                    pa.steps(),
                    df.clone(),
                    df.clone(),
                    df,
                    FiltrationTag::RngStream,
                )
                .unwrap()
            })
            .collect();
        let stats = check_joint_variation(&batch, &exp(2.0)).unwrap();
        assert!(stats.holds(), "{stats:?}");
        // Near-equality: the statistical slack is what saves it.
        assert!(
            stats.ratio / stats.bound > 0.95,
            "expected a tight ratio, got {} / {}",
            stats.ratio,
            stats.bound
        );
    }

    #[test]
    fn p2_step_slack_is_the_square_of_norm_gaps() {
        // The documented two-atom example at the origin: slack exactly ½.
        let atoms = vec![
            StepAtom {
                prob: 1.0 / 3.0,
                df: vec![2.0],
                dh: vec![1.0],
            },
            StepAtom {
                prob: 2.0 / 3.0,
                df: vec![-1.0],
                dh: vec![-2.0],
            },
        ];
        let out = check_p2_step_inequality(&[0.0], &[0.0], &atoms).unwrap();
        assert!((out.slack - 0.5).abs() <= 1e-15);
        assert!((out.slack - out.closed_form).abs() <= 1e-15);

        // df = dh pointwise (mean-zero) → slack 0; and the two-point
        // df = ±1, dh = ∓1 step has equal norms, so its slack vanishes too.
        let same = vec![
            StepAtom {
                prob: 0.5,
                df: vec![0.7, -0.1],
                dh: vec![0.7, -0.1],
            },
            StepAtom {
                prob: 0.5,
                df: vec![-0.7, 0.1],
                dh: vec![-0.7, 0.1],
            },
        ];
        let out = check_p2_step_inequality(&[1.0, 2.0], &[0.5, -1.0], &same).unwrap();
        assert!(out.slack.abs() <= 1e-15 && out.closed_form == 0.0);
        let flipped = vec![
            StepAtom {
                prob: 0.5,
                df: vec![1.0],
                dh: vec![-1.0],
            },
            StepAtom {
                prob: 0.5,
                df: vec![-1.0],
                dh: vec![1.0],
            },
        ];
        let out = check_p2_step_inequality(&[2.0], &[3.0], &flipped).unwrap();
        assert!(out.slack.abs() <= 1e-15 && out.closed_form == 0.0);

        // Random mean-zero atom clouds: identity to 1e−12.
        let mut rng = stream_rng(8, 20, 0);
        for _ in 0..200 {
            let dim = rng.gen_range(1..=3usize);
            let m = rng.gen_range(2..=4usize);
            let mut probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|pr| *pr /= total);
            let mut dfs: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
                .collect();
            let mut dhs = dfs.clone();
            dhs.iter_mut().flatten().for_each(|c| *c *= 0.3);
            for series in [&mut dfs, &mut dhs] {
                let mut mean = vec![0.0; dim];
                for (pr, v) in probs.iter().zip(series.iter()) {
                    for j in 0..dim {
                        mean[j] += pr * v[j];
                    }
                }
                for v in series.iter_mut() {
                    for j in 0..dim {
                        v[j] -= mean[j];
                    }
                }
            }
            let atoms: Vec<StepAtom> = probs
                .iter()
                .zip(dfs)
                .zip(dhs)
                .map(|((pr, df), dh)| StepAtom {
                    prob: *pr,
                    df,
                    dh,
                })
                .collect();
            let state_f: Vec<f64> =
                (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let state_h: Vec<f64> =
                (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let out = check_p2_step_inequality(&state_f, &state_h, &atoms).unwrap();
            assert!(
                (out.slack - out.closed_form).abs() <= 1e-12 * (1.0 + out.closed_form.abs()),
                "slack {} vs closed {}",
                out.slack,
                out.closed_form
            );
            assert!(out.slack >= -1e-15);
        }
    }

    #[test]
    fn u_is_a_one_step_supermartingale() {
        let tol = ToleranceProfile::standard();
        for p in [1.5, 2.0, 3.0] {
            let report = check_u_supermartingale(&exp(p), 2, 20_000, 11, &tol).unwrap();
            assert!(
                report.passed(),
                "p = {p}: worst {}",
                report.worst_violation
            );
            assert_eq!(report.indeterminate, 0);
        }
    }

    #[test]
    fn u_p2_case_is_the_norm_difference_algebra() {
        // At p = 2, U(x, y) = |y|² − |x|², so the one-step deficit is
        // exactly E|H|² − E|K|² ≥ 0 under atomwise subordination.
        let e = exp(2.0);
        let x = [3.0, 0.0];
        let y = [1.0, 1.0];
        let u0 = eval_u_radial(&e, slice_norm(&x), slice_norm(&y));
        assert!((u0 - (2.0 - 9.0)).abs() <= 1e-12);
        let h = [[1.0, 0.5], [-1.0, -0.5]];
        let k = [[0.5, 0.0], [-0.5, 0.0]];
        let mut expected = 0.0;
        for i in 0..2 {
            let xh = [x[0] + h[i][0], x[1] + h[i][1]];
            let yk = [y[0] + k[i][0], y[1] + k[i][1]];
            expected += 0.5 * eval_u_radial(&e, slice_norm(&xh), slice_norm(&yk));
        }
        let eh2: f64 = 0.5 * (dot(&h[0], &h[0]) + dot(&h[1], &h[1]));
        let ek2: f64 = 0.5 * (dot(&k[0], &k[0]) + dot(&k[1], &k[1]));
        assert!((u0 - expected - (eh2 - ek2)).abs() <= 1e-12);
        assert!(u0 >= expected);
    }

    #[test]
    fn dyadic_trees_validate_and_terminal_norms_dominate() {
        for dim in [1, 2] {
            let tree = TreeMartingale::gen_dyadic(dim, 10, 5).unwrap();
            tree.validate().unwrap();
            assert_eq!(tree.depth(), 10);
            for p in [1.5, 2.0, 3.0] {
                let e = exp(p);
                // Level norms are nondecreasing (conditional Jensen), which
                // justifies evaluating stream batches at terminal time only.
                let mut prev = 0.0;
                for level in 0..=10 {
                    let norm = tree.f_norm_at_level(p, level);
                    assert!(
                        norm >= prev * (1.0 - 1e-12),
                        "level {level}: {norm} < {prev}"
                    );
                    prev = norm;
                }
                let ratio = tree.lp_ratio(&e);
                assert!(
                    ratio <= (e.p_star() - 1.0) * (1.0 + 1e-10),
                    "p = {p}, dim = {dim}: exact tree ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn batches_are_reproducible_and_seed_sensitive() {
        let a = gen_subordinate_batch(2, 30, 100, 42).unwrap();
        let b = gen_subordinate_batch(2, 30, 100, 42).unwrap();
        let e = exp(3.0);
        let sa = check_lp_bound(&a, &e).unwrap();
        let sb = check_lp_bound(&b, &e).unwrap();
        assert_eq!(sa.ratio.to_bits(), sb.ratio.to_bits());
        let c = gen_subordinate_batch(2, 30, 100, 43).unwrap();
        let sc = check_lp_bound(&c, &e).unwrap();
        assert_ne!(sa.ratio.to_bits(), sc.ratio.to_bits());
    }

    #[test]
    fn adversarial_ratio_is_reported_within_the_theorem() {
        for p in [1.5, 3.0] {
            let e = exp(p);
            let stats = adversarial_transform_ratio(&e, 50, 2000, 0).unwrap();
            assert!(stats.ratio.is_finite() && stats.ratio > 0.0);
            // The theorem still applies; only the gap to p*−1 is open.
            assert!(
                stats.ratio <= stats.bound * (1.0 + EPS_STAT),
                "p = {p}: {stats:?}"
            );
        }
    }
}
