//! Certification of the pointwise conditions behind the martingale
//! inequalities.
//!
//! The closed-form conditions (initial, majorization, monotonicity,
//! concavity, discriminant) are swept over rectangular grids; the
//! vector-space conditions (jump control and the Hessian lower bound) are
//! sampled Monte Carlo style with seeded, per-sample random streams so
//! runs are reproducible and parallelism cannot change a result.
//!
//! Every slack reported here is normalized: a raw slack is divided by
//! `1 + Σ|terms|` of the inequality it came from, so one tolerance works
//! across twelve decades of grid. Solver failures at individual points are
//! never skipped silently — they are counted as indeterminate and any
//! indeterminate point fails the report.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bellman::{self, BellmanJet, Point2};
use crate::error::Result;
use crate::exponent::{Exponent, Regime};
use crate::grid::GridSpec;
use crate::report::{ToleranceProfile, VerificationReport};
use crate::vecd::VecD;

/// Running minimum with the location it was attained at. Ties keep the
/// earliest point in grid order, so parallel sweeps reduce deterministically.
#[derive(Clone, Copy, Debug)]
struct Worst {
    slack: f64,
    x: f64,
    z: f64,
}

impl Worst {
    fn new() -> Self {
        Self {
            slack: f64::INFINITY,
            x: f64::NAN,
            z: f64::NAN,
        }
    }

    fn offer(&mut self, slack: f64, x: f64, z: f64) {
        if slack < self.slack {
            *self = Self { slack, x, z };
        }
    }
}

fn normalized(raw: f64, terms: &[f64]) -> f64 {
    raw / (1.0 + terms.iter().map(|t| t.abs()).sum::<f64>())
}

/// Evaluate the jet at every grid point, in row-major grid order.
/// Parallel across x-columns; the collected order is the sequential one.
fn grid_jets(exp: &Exponent, grid: &GridSpec) -> Vec<(f64, f64, Result<BellmanJet>)> {
    let xs = grid.x_points();
    let zs = grid.z_points();
    xs.par_iter()
        .flat_map_iter(|&x| {
            let zs = zs.clone();
            zs.into_iter().map(move |z| {
                let jet = Point2::new(x, z).and_then(|pt| bellman::eval_jet(exp, pt));
                (x, z, jet)
            })
        })
        .collect()
}

/// Condition "B sits above the product": min of B(x,z) − xz over the grid.
pub fn check_initial(
    exp: &Exponent,
    grid: &GridSpec,
    tol: &ToleranceProfile,
) -> VerificationReport {
    let mut worst = Worst::new();
    let mut indeterminate = 0;
    let jets = grid_jets(exp, grid);
    let checked = jets.len() as u64;
    for (x, z, jet) in jets {
        match jet {
            Ok(j) => {
                let slack = normalized(j.value - x * z, &[j.value, x * z]);
                worst.offer(slack, x, z);
            }
            Err(_) => indeterminate += 1,
        }
    }
    VerificationReport::new(
        "initial",
        exp.p(),
        worst.slack,
        tol.closed_form,
        checked,
        indeterminate,
    )
    .with_grid(*grid)
    .with_location([("x", worst.x), ("z", worst.z)])
}

fn power_bound(exp: &Exponent, x: f64, z: f64) -> f64 {
    let (p, q) = (exp.p(), exp.conjugate());
    exp.constant() * x.powf(p) / p + z.powf(q) / q
}

/// Majorization: B ≤ K x^p/p + z^{p'}/p' over the grid, together with an
/// equality sweep along the curve z = s₀ x^{p−1} where the two sides must
/// meet. The report's worst_violation is the more damning of (a) the grid's
/// minimum one-sided slack and (b) minus the curve's maximum two-sided
/// deviation, so a pass certifies both facets at once.
pub fn check_majorization(
    exp: &Exponent,
    grid: &GridSpec,
    tol: &ToleranceProfile,
) -> VerificationReport {
    let mut worst = Worst::new();
    let mut indeterminate = 0;
    let jets = grid_jets(exp, grid);
    let mut checked = jets.len() as u64;
    for (x, z, jet) in jets {
        match jet {
            Ok(j) => {
                let bound = power_bound(exp, x, z);
                worst.offer(normalized(bound - j.value, &[bound, j.value]), x, z);
            }
            Err(_) => indeterminate += 1,
        }
    }

    // Equality sweep, restricted so the curve stays inside the grid window.
    let s0 = exp.s_threshold();
    let pm1 = exp.p() - 1.0;
    let x_lo = grid.x_range.0.max((grid.z_range.0 / s0).powf(1.0 / pm1));
    let x_hi = grid.x_range.1.min((grid.z_range.1 / s0).powf(1.0 / pm1));
    let mut eq_worst = Worst::new();
    let mut eq_points = 0u64;
    if x_lo < x_hi {
        for i in 0..100 {
            let t = i as f64 / 99.0;
            let x = (x_lo.ln() * (1.0 - t) + x_hi.ln() * t).exp();
            let z = s0 * x.powf(pm1);
            let point = Point2::new(x, z).and_then(|pt| bellman::eval_b(exp, pt));
            match point {
                Ok(b) => {
                    let bound = power_bound(exp, x, z);
                    let dev = normalized((b - bound).abs(), &[b, bound]);
                    eq_worst.offer(-dev, x, z);
                    eq_points += 1;
                }
                Err(_) => indeterminate += 1,
            }
        }
        checked += eq_points;
    }

    let mut report = VerificationReport::new(
        "majorization",
        exp.p(),
        worst.slack.min(eq_worst.slack),
        tol.closed_form,
        checked,
        indeterminate,
    )
    .with_grid(*grid)
    .with_detail("grid_worst", worst.slack)
    .with_detail("equality_points", eq_points as f64);
    if eq_points > 0 {
        report = report.with_detail("equality_worst_deviation", -eq_worst.slack);
    }
    let at = if eq_worst.slack < worst.slack {
        eq_worst
    } else {
        worst
    };
    report.with_location([("x", at.x), ("z", at.z)])
}

/// Standalone sweep of the majorization equality curve z = s₀ x^{p−1},
/// unconstrained by any grid window.
pub fn check_equality_locus(
    exp: &Exponent,
    points: usize,
    tol: &ToleranceProfile,
) -> VerificationReport {
    let s0 = exp.s_threshold();
    let mut worst = Worst::new();
    let mut indeterminate = 0;
    for i in 0..points {
        let t = i as f64 / (points - 1).max(1) as f64;
        let x = (0.05f64.ln() * (1.0 - t) + 20f64.ln() * t).exp();
        let z = s0 * x.powf(exp.p() - 1.0);
        match Point2::new(x, z).and_then(|pt| bellman::eval_b(exp, pt)) {
            Ok(b) => {
                let bound = power_bound(exp, x, z);
                worst.offer(-normalized((b - bound).abs(), &[b, bound]), x, z);
            }
            Err(_) => indeterminate += 1,
        }
    }
    VerificationReport::new(
        "equality_locus",
        exp.p(),
        worst.slack,
        tol.closed_form,
        points as u64,
        indeterminate,
    )
    .with_location([("x", worst.x), ("z", worst.z)])
}

/// Monotonicity: B_xx/(|B_xz|+1) ≤ B_x/x and the z-analog. One side of the
/// pair is an exact identity — the z-side below p = 2, the x-side above,
/// both at p = 2 — and its largest absolute slack is reported as
/// `tight_side_max_abs`.
pub fn check_monotonicity(
    exp: &Exponent,
    grid: &GridSpec,
    tol: &ToleranceProfile,
) -> VerificationReport {
    let mut worst = Worst::new();
    let mut x_side = Worst::new();
    let mut z_side = Worst::new();
    let mut tight_max = 0.0f64;
    let mut indeterminate = 0;
    let jets = grid_jets(exp, grid);
    let checked = jets.len() as u64;
    for (x, z, jet) in jets {
        let j = match jet {
            Ok(j) => j,
            Err(_) => {
                indeterminate += 1;
                continue;
            }
        };
        let denom = j.bxz.abs() + 1.0;
        let sx = normalized(j.bx / x - j.bxx / denom, &[j.bx / x, j.bxx / denom]);
        let sz = normalized(j.bz / z - j.bzz / denom, &[j.bz / z, j.bzz / denom]);
        x_side.offer(sx, x, z);
        z_side.offer(sz, x, z);
        worst.offer(sx.min(sz), x, z);
        let tight = match exp.regime() {
            Regime::Sub2 => sz.abs(),
            Regime::Super2 => sx.abs(),
            Regime::Two => sx.abs().max(sz.abs()),
        };
        tight_max = tight_max.max(tight);
    }
    VerificationReport::new(
        "monotonicity",
        exp.p(),
        worst.slack,
        tol.closed_form,
        checked,
        indeterminate,
    )
    .with_grid(*grid)
    .with_location([("x", worst.x), ("z", worst.z)])
    .with_detail("x_side_worst", x_side.slack)
    .with_detail("z_side_worst", z_side.slack)
    .with_detail("tight_side_max_abs", tight_max)
}

/// Concavity: the quadratic form B_xx h² + 2B_xz hk + B_zz k² ≥ 2|h||k|,
/// its reflected variant with −2|B_xz||h||k| in the middle, and the
/// discriminant inequality B_xx B_zz ≥ (|B_xz|+1)², all over the grid with
/// `hk_samples` random directions (h,k) per point.
pub fn check_concavity(
    exp: &Exponent,
    grid: &GridSpec,
    hk_samples: u32,
    seed: u64,
    tol: &ToleranceProfile,
) -> VerificationReport {
    let xs = grid.x_points();
    let zs = grid.z_points();
    // One RNG stream per x-column keeps the sweep reproducible under
    // any parallel schedule.
    let columns: Vec<(Worst, Worst, u64, u64)> = xs
        .par_iter()
        .enumerate()
        .map(|(ci, &x)| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(ci as u64);
            let mut form_worst = Worst::new();
            let mut disc_worst = Worst::new();
            let mut checked = 0u64;
            let mut indeterminate = 0u64;
            for &z in &zs {
                let j = match Point2::new(x, z).and_then(|pt| bellman::eval_jet(exp, pt)) {
                    Ok(j) => j,
                    Err(_) => {
                        indeterminate += 1;
                        continue;
                    }
                };
                let w = j.bxz.abs() + 1.0;
                disc_worst.offer(normalized(j.bxx * j.bzz - w * w, &[j.bxx * j.bzz, w * w]), x, z);
                checked += 1;
                for _ in 0..hk_samples {
                    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                    let (h, k) = (theta.cos(), theta.sin());
                    let cross = 2.0 * (h * k).abs();
                    let plain = j.bxx * h * h + 2.0 * j.bxz * h * k + j.bzz * k * k;
                    let reflected =
                        j.bxx * h * h - 2.0 * j.bxz.abs() * (h * k).abs() + j.bzz * k * k;
                    form_worst.offer(normalized(plain - cross, &[plain, cross]), x, z);
                    form_worst.offer(normalized(reflected - cross, &[reflected, cross]), x, z);
                    checked += 2;
                }
            }
            (form_worst, disc_worst, checked, indeterminate)
        })
        .collect();

    let mut form_worst = Worst::new();
    let mut disc_worst = Worst::new();
    let mut checked = 0;
    let mut indeterminate = 0;
    for (fw, dw, c, i) in columns {
        form_worst.offer(fw.slack, fw.x, fw.z);
        disc_worst.offer(dw.slack, dw.x, dw.z);
        checked += c;
        indeterminate += i;
    }
    let overall = if disc_worst.slack < form_worst.slack {
        disc_worst
    } else {
        form_worst
    };
    VerificationReport::new(
        "concavity",
        exp.p(),
        overall.slack,
        tol.closed_form,
        checked,
        indeterminate,
    )
    .with_grid(*grid)
    .with_seed(seed)
    .with_location([("x", overall.x), ("z", overall.z)])
    .with_detail("forms_worst", form_worst.slack)
    .with_detail("discriminant_worst", disc_worst.slack)
}

/// The discriminant is not merely an inequality here: for this surface
/// B_xx B_zz and (|B_xz|+1)² agree identically. This check measures the
/// largest relative deviation between the two sides over the grid.
pub fn check_discriminant_equality(
    exp: &Exponent,
    grid: &GridSpec,
    tol: &ToleranceProfile,
) -> VerificationReport {
    let mut worst = Worst::new();
    let mut indeterminate = 0;
    let jets = grid_jets(exp, grid);
    let checked = jets.len() as u64;
    for (x, z, jet) in jets {
        match jet {
            Ok(j) => {
                let lhs = j.bxx * j.bzz;
                let rhs = (j.bxz.abs() + 1.0) * (j.bxz.abs() + 1.0);
                // rhs ≥ 1 always, so the ratio below is a true relative error.
                let dev = (lhs - rhs).abs() / lhs.max(rhs);
                worst.offer(-dev, x, z);
            }
            Err(_) => indeterminate += 1,
        }
    }
    VerificationReport::new(
        "discriminant_equality",
        exp.p(),
        worst.slack,
        tol.identity,
        checked,
        indeterminate,
    )
    .with_grid(*grid)
    .with_location([("x", worst.x), ("z", worst.z)])
}

/// Raw (unnormalized) slack of the jump-control inequality
/// 𝔹(x+h, z+k) ≥ 𝔹(x,z) + ⟨𝔹_x,h⟩ + ⟨𝔹_z,k⟩ + |h||k|,
/// together with the scale the caller should normalize by.
pub struct JumpSlack {
    pub raw: f64,
    pub scale: f64,
}

pub fn jump_slack(
    exp: &Exponent,
    x: &VecD,
    z: &VecD,
    h: &VecD,
    k: &VecD,
) -> Result<JumpSlack> {
    let (nx, nz) = (x.norm(), z.norm());
    let jet = bellman::eval_jet(exp, Point2::new(nx, nz)?)?;
    let after = bellman::eval_b_highdim(exp, &x.add(h), &z.add(k))?;
    // ∇𝔹 is radial: B_x(|x|,|z|)·x/|x| and likewise in z.
    let grad_x_h = jet.bx * x.dot(h) / nx;
    let grad_z_k = jet.bz * z.dot(k) / nz;
    let cross = h.norm() * k.norm();
    let raw = after - jet.value - grad_x_h - grad_z_k - cross;
    let scale = 1.0
        + after.abs()
        + jet.value.abs()
        + grad_x_h.abs()
        + grad_z_k.abs()
        + cross;
    Ok(JumpSlack { raw, scale })
}

fn sphere_direction(rng: &mut impl Rng, dim: usize) -> VecD {
    loop {
        let mut coords = [0.0; crate::vecd::MAX_DIM];
        for c in coords.iter_mut().take(dim) {
            *c = rng.sample(StandardNormal);
        }
        let v = VecD::new(&coords[..dim]).expect("normal draws are finite");
        let n = v.norm();
        if n > 0.0 {
            return v.scale(1.0 / n);
        }
    }
}

fn log_uniform(rng: &mut impl Rng, decades: (f64, f64)) -> f64 {
    10f64.powf(rng.gen_range(decades.0..decades.1))
}

/// Jump control, sampled: random quadruples (x, z, h, k) in ℝ^dim with all
/// four norms log-uniform across [1e−3, 1e3].
pub fn check_jump_control(
    exp: &Exponent,
    dim: usize,
    samples: u64,
    seed: u64,
    tol: &ToleranceProfile,
) -> Result<VerificationReport> {
    let results: Vec<(f64, u64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let mut resamples = 0u64;
            loop {
                let x = sphere_direction(&mut rng, dim).scale(log_uniform(&mut rng, (-3.0, 3.0)));
                let z = sphere_direction(&mut rng, dim).scale(log_uniform(&mut rng, (-3.0, 3.0)));
                let h = sphere_direction(&mut rng, dim).scale(log_uniform(&mut rng, (-3.0, 3.0)));
                let k = sphere_direction(&mut rng, dim).scale(log_uniform(&mut rng, (-3.0, 3.0)));
                // The inequality needs the perturbed pair off the origin.
                if x.add(&h).norm() == 0.0 || z.add(&k).norm() == 0.0 {
                    resamples += 1;
                    continue;
                }
                let js = jump_slack(exp, &x, &z, &h, &k)
                    .expect("norms are positive by construction");
                return (js.raw / js.scale, resamples);
            }
        })
        .collect();

    let mut worst = f64::INFINITY;
    let mut worst_index = 0u64;
    let mut resampled = 0u64;
    for (i, (slack, re)) in results.iter().enumerate() {
        if *slack < worst {
            worst = *slack;
            worst_index = i as u64;
        }
        resampled += re;
    }
    Ok(VerificationReport::new(
        "jump_control",
        exp.p(),
        worst,
        tol.closed_form,
        samples,
        0,
    )
    .with_seed(seed)
    .with_location([("sample_index", worst_index as f64), ("dim", dim as f64)])
    .with_detail("resampled", resampled as f64))
}

/// The Hessian lower bound: ⟨D²𝔹(x,z)(h,k),(h,k)⟩, formed by central
/// differences of the closed-form gradient, must dominate
/// (B_xx|h|² + B_zz|k|²)/(|B_xz|+1).
pub fn check_hessian_bound(
    exp: &Exponent,
    dim: usize,
    samples: u64,
    seed: u64,
    tol: &ToleranceProfile,
) -> Result<VerificationReport> {
    let slacks: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let x = sphere_direction(&mut rng, dim).scale(log_uniform(&mut rng, (-3.0, 3.0)));
            let z = sphere_direction(&mut rng, dim).scale(log_uniform(&mut rng, (-3.0, 3.0)));
            // Joint direction (h, k) with |h|² + |k|² = 1; both sides of the
            // bound are quadratic in (h, k), so unit joint norm is general.
            let omega = rng.gen::<f64>() * std::f64::consts::FRAC_PI_2;
            let h = sphere_direction(&mut rng, dim).scale(omega.cos());
            let k = sphere_direction(&mut rng, dim).scale(omega.sin());

            // Step small relative to each block the direction actually moves.
            let ratio = |num: f64, den: f64| if num == 0.0 { f64::INFINITY } else { den / num };
            let eps = 1e-5 * ratio(h.norm(), x.norm()).min(ratio(k.norm(), z.norm()));

            let grad = |x: &VecD, z: &VecD| -> (VecD, VecD) {
                let (nx, nz) = (x.norm(), z.norm());
                let j = bellman::eval_jet(exp, Point2::new(nx, nz).unwrap()).unwrap();
                (x.scale(j.bx / nx), z.scale(j.bz / nz))
            };
            let (gx_p, gz_p) = grad(&x.add(&h.scale(eps)), &z.add(&k.scale(eps)));
            let (gx_m, gz_m) = grad(&x.sub(&h.scale(eps)), &z.sub(&k.scale(eps)));
            let fd = (gx_p.sub(&gx_m).dot(&h) + gz_p.sub(&gz_m).dot(&k)) / (2.0 * eps);

            let j = bellman::eval_jet(exp, Point2::new(x.norm(), z.norm()).unwrap()).unwrap();
            let w = j.bxz.abs() + 1.0;
            let rhs = (j.bxx * h.norm_squared() + j.bzz * k.norm_squared()) / w;
            normalized(fd - rhs, &[fd, rhs])
        })
        .collect();

    let mut worst = f64::INFINITY;
    let mut worst_index = 0u64;
    for (i, slack) in slacks.iter().enumerate() {
        if *slack < worst {
            worst = *slack;
            worst_index = i as u64;
        }
    }
    Ok(VerificationReport::new(
        "hessian_bound",
        exp.p(),
        worst,
        tol.fd,
        samples,
        0,
    )
    .with_seed(seed)
    .with_location([("sample_index", worst_index as f64), ("dim", dim as f64)]))
}

/// Knobs for one full run of the condition suite.
#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub grid: GridSpec,
    pub hk_samples: u32,
    pub locus_points: usize,
    pub jump_dim: usize,
    pub jump_samples: u64,
    pub jump_seed: u64,
    pub hessian_dim: usize,
    pub hessian_samples: u64,
    pub hessian_seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::standard(),
            hk_samples: 8,
            locus_points: 100,
            jump_dim: 3,
            jump_samples: 100_000,
            jump_seed: 42,
            hessian_dim: 2,
            hessian_samples: 10_000,
            hessian_seed: 7,
        }
    }
}

/// Run every condition check for one exponent.
pub fn run_condition_suite(
    exp: &Exponent,
    cfg: &SuiteConfig,
    tol: &ToleranceProfile,
) -> Result<Vec<VerificationReport>> {
    Ok(vec![
        check_initial(exp, &cfg.grid, tol),
        check_majorization(exp, &cfg.grid, tol),
        check_equality_locus(exp, cfg.locus_points, tol),
        check_monotonicity(exp, &cfg.grid, tol),
        check_concavity(exp, &cfg.grid, cfg.hk_samples, cfg.jump_seed, tol),
        check_discriminant_equality(exp, &cfg.grid, tol),
        check_jump_control(exp, cfg.jump_dim, cfg.jump_samples, cfg.jump_seed, tol)?,
        check_hessian_bound(
            exp,
            cfg.hessian_dim,
            cfg.hessian_samples,
            cfg.hessian_seed,
            tol,
        )?,
    ])
}
