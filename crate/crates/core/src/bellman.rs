//! The special functions at the heart of the library.
//!
//! * `eval_b` / `eval_jet`: the two-variable surface B on (0,∞)² together
//!   with its closed-form second-order jet, in all three exponent regimes.
//! * `eval_b_highdim`: the radial extension 𝔹(x,z) = B(|x|,|z|) to vector
//!   arguments.
//! * `eval_u`: Burkholder's zigzag majorant U(x,y).
//! * `eval_ntv`: the four-variable comparison function for p > 2.
//!
//! Everything here is closed-form on top of the implicit function φ; no
//! numerical differentiation is involved.

use crate::error::{Error, Result};
use crate::exponent::{Exponent, Regime};
use crate::phi::{self, PhiValue};
use crate::vecd::VecD;

/// A point of the open quadrant (0,∞)², the domain of B.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2 {
    x: f64,
    z: f64,
}

impl Point2 {
    pub fn new(x: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && z.is_finite() && x > 0.0 && z > 0.0) {
            return Err(Error::Domain(format!(
                "B is defined on the open quadrant only, got ({x}, {z})"
            )));
        }
        Ok(Self { x, z })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn z(&self) -> f64 {
        self.z
    }
}

/// B and its five partial derivatives at a point, plus the surface
/// parameters (s, φ) they were computed from.
#[derive(Clone, Copy, Debug)]
pub struct BellmanJet {
    pub value: f64,
    pub bx: f64,
    pub bz: f64,
    pub bxx: f64,
    pub bxz: f64,
    pub bzz: f64,
    pub s: f64,
    pub phi: f64,
}

/// The scale-invariant ratio s = x^{1−p} z, computed in log space so that
/// twelve-decade grids cannot overflow the power.
pub fn s_ratio(exp: &Exponent, x: f64, z: f64) -> f64 {
    ((1.0 - exp.p()) * x.ln() + z.ln()).exp()
}

fn value_from_phi(exp: &Exponent, x: f64, z: f64, pv: &PhiValue) -> f64 {
    let p = exp.p();
    match exp.regime() {
        Regime::Sub2 => {
            let f = pv.phi;
            x * z
                * ((p - 1.0) / p * f
                    + (2.0 - p) / (p * (p - 1.0))
                    + 1.0 / (p * (p - 1.0) * f))
        }
        Regime::Super2 => {
            // 1/(φ − p + 2) taken from the solver's excess, which stays
            // fully accurate even when φ hugs the floor p − 2.
            (1.0 - 1.0 / p) * x * z * (pv.phi + 1.0 / pv.excess)
        }
        Regime::Two => 0.5 * (x * x + z * z),
    }
}

/// Evaluate B(x, z).
pub fn eval_b(exp: &Exponent, pt: Point2) -> Result<f64> {
    if exp.regime() == Regime::Two {
        return Ok(0.5 * (pt.x * pt.x + pt.z * pt.z));
    }
    let s = s_ratio(exp, pt.x, pt.z);
    let pv = phi::solve_phi(exp, s)?;
    Ok(value_from_phi(exp, pt.x, pt.z, &pv))
}

/// Evaluate B together with its full second-order jet.
pub fn eval_jet(exp: &Exponent, pt: Point2) -> Result<BellmanJet> {
    let (x, z) = (pt.x, pt.z);
    let p = exp.p();
    let s = s_ratio(exp, x, z);
    match exp.regime() {
        Regime::Two => Ok(BellmanJet {
            value: 0.5 * (x * x + z * z),
            bx: x,
            bz: z,
            bxx: 1.0,
            bxz: 0.0,
            bzz: 1.0,
            s,
            // The surface parameter degenerates to s itself at p = 2: with
            // φ = s both regime formulas collapse to the quadratic case.
            phi: s,
        }),
        Regime::Sub2 => {
            let pv = phi::solve_phi(exp, s)?;
            let f = pv.phi;
            let fp = phi::phi_prime(exp, s, f)?;
            Ok(BellmanJet {
                value: value_from_phi(exp, x, z, &pv),
                bx: (2.0 - p) * z / (p - 1.0) + z / ((p - 1.0) * f),
                bz: x * f,
                bxx: x.powf(-p) * z * z * fp / (f * f),
                bxz: (2.0 - p) * f / (1.0 + (p - 1.0) * f),
                bzz: x.powf(2.0 - p) * fp,
                s,
                phi: f,
            })
        }
        Regime::Super2 => {
            let pv = phi::solve_phi(exp, s)?;
            let u = pv.excess; // φ − p + 2
            let fp = phi::phi_prime_from_excess(exp, s, u)?;
            Ok(BellmanJet {
                value: value_from_phi(exp, x, z, &pv),
                bx: (p - 1.0) * z / u,
                bz: x * pv.phi,
                bxx: (p - 1.0).powi(2) * x.powf(-p) * z * z * fp / (u * u),
                bxz: (p - 2.0) / (u + 1.0),
                bzz: x.powf(2.0 - p) * fp,
                s,
                phi: pv.phi,
            })
        }
    }
}

/// 𝔹(x, z) = B(|x|, |z|) for vector arguments with nonzero norms.
pub fn eval_b_highdim(exp: &Exponent, x: &VecD, z: &VecD) -> Result<f64> {
    let (nx, nz) = (x.norm(), z.norm());
    if nx == 0.0 || nz == 0.0 {
        return Err(Error::Domain(
            "the radial extension needs both arguments nonzero".into(),
        ));
    }
    eval_b(exp, Point2::new(nx, nz)?)
}

/// The zigzag majorant, radial form. Norm arguments must be nonnegative.
pub fn eval_u_radial(exp: &Exponent, x_norm: f64, y_norm: f64) -> f64 {
    debug_assert!(x_norm >= 0.0 && y_norm >= 0.0);
    let p = exp.p();
    let ps = exp.p_star();
    p * (1.0 - 1.0 / ps).powf(p - 1.0)
        * (y_norm - (ps - 1.0) * x_norm)
        * (x_norm + y_norm).powf(p - 1.0)
}

/// The zigzag majorant U(x, y): nonpositive when |y| ≤ |x|, and dominating
/// |y|^p − (p*−1)^p |x|^p everywhere.
pub fn eval_u(exp: &Exponent, x: &VecD, y: &VecD) -> f64 {
    eval_u_radial(exp, x.norm(), y.norm())
}

/// The four-variable comparison function for p > 2, radial form.
pub fn eval_ntv_radial(exp: &Exponent, zeta_norm: f64, eta_norm: f64) -> Result<f64> {
    if exp.regime() != Regime::Super2 {
        return Err(Error::Domain(
            "the four-variable comparison function needs p > 2".into(),
        ));
    }
    debug_assert!(zeta_norm >= 0.0 && eta_norm >= 0.0);
    let p = exp.p();
    let q = exp.conjugate();
    let zeta_p = zeta_norm.powf(p);
    let eta_q = eta_norm.powf(q);
    // Both branches agree when |ζ|^p = |η|^q: each extra term reduces to
    // |ζ|^p there.
    let extra = if zeta_p >= eta_q {
        zeta_norm * zeta_norm * eta_norm.powf(2.0 - q)
    } else {
        2.0 / p * zeta_p + (2.0 / q - 1.0) * eta_q
    };
    Ok(zeta_p + eta_q + extra)
}

/// The four-variable comparison function on pairs ζ = (ζ₁, ζ₂),
/// η = (η₁, η₂), using the joint Euclidean norms.
pub fn eval_ntv(
    exp: &Exponent,
    zeta: (&VecD, &VecD),
    eta: (&VecD, &VecD),
) -> Result<f64> {
    let zeta_norm = zeta.0.norm().hypot(zeta.1.norm());
    let eta_norm = eta.0.norm().hypot(eta.1.norm());
    eval_ntv_radial(exp, zeta_norm, eta_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SQRT_2: f64 = std::f64::consts::SQRT_2;

    fn exp(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    fn pt(x: f64, z: f64) -> Point2 {
        Point2::new(x, z).unwrap()
    }

    #[test]
    fn rejects_points_off_the_open_quadrant() {
        assert!(Point2::new(0.0, 1.0).is_err());
        assert!(Point2::new(1.0, -2.0).is_err());
        assert!(Point2::new(f64::NAN, 1.0).is_err());
        assert!(Point2::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn quadratic_case_is_exact() {
        let e = exp(2.0);
        assert_eq!(eval_b(&e, pt(3.0, 4.0)).unwrap(), 12.5);
        let j = eval_jet(&e, pt(3.0, 4.0)).unwrap();
        assert_eq!((j.bx, j.bz), (3.0, 4.0));
        assert_eq!((j.bxx, j.bxz, j.bzz), (1.0, 0.0, 1.0));
        assert_relative_eq!(j.s, 4.0 / 3.0, max_relative = 1e-15);
        assert_eq!(j.phi, j.s);
    }

    #[test]
    fn jet_above_two_at_a_rational_point() {
        // s = 4 here, where φ = 2 and φ′ = 3/16 are exact.
        let j = eval_jet(&exp(3.0), pt(1.0, 4.0)).unwrap();
        assert_relative_eq!(j.value, 8.0, max_relative = 1e-12);
        assert_relative_eq!(j.bx, 8.0, max_relative = 1e-12);
        assert_relative_eq!(j.bz, 2.0, max_relative = 1e-12);
        assert_relative_eq!(j.bxx, 12.0, max_relative = 1e-12);
        assert_relative_eq!(j.bxz, 0.5, max_relative = 1e-12);
        assert_relative_eq!(j.bzz, 3.0 / 16.0, max_relative = 1e-12);
        // Discriminant identity bxx·bzz = (|bxz|+1)², here 9/4 on both sides.
        assert_relative_eq!(j.bxx * j.bzz, 2.25, max_relative = 1e-12);
    }

    #[test]
    fn jet_below_two_at_the_threshold_point() {
        // s = √2 is the threshold for p = 3/2: φ = 2, φ′ = 3/√2.
        let j = eval_jet(&exp(1.5), pt(1.0, SQRT_2)).unwrap();
        assert_relative_eq!(j.value, 2.0 * SQRT_2, max_relative = 1e-12);
        assert_relative_eq!(j.bx, 2.0 * SQRT_2, max_relative = 1e-12);
        assert_relative_eq!(j.bz, 2.0, max_relative = 1e-12);
        assert_relative_eq!(j.bxx, 3.0 / (2.0 * SQRT_2), max_relative = 1e-12);
        assert_relative_eq!(j.bxz, 0.5, max_relative = 1e-12);
        assert_relative_eq!(j.bzz, 3.0 / SQRT_2, max_relative = 1e-12);
        assert_relative_eq!(j.bxx * j.bzz, 2.25, max_relative = 1e-12);
    }

    #[test]
    fn touches_the_power_bound_on_the_equality_curve() {
        // Points with s = s₀ sit on the curve where B equals
        // K x^p/p + z^{p'}/p'.
        for (p, x, z) in [(3.0, 1.0, 4.0), (1.5, 1.0, SQRT_2)] {
            let e = exp(p);
            let b = eval_b(&e, pt(x, z)).unwrap();
            let bound = e.constant() * x.powf(p) / p
                + z.powf(e.conjugate()) / e.conjugate();
            assert_relative_eq!(b, bound, max_relative = 1e-12);
        }
    }

    /// Central differences of eval_b at a benign interior point.
    fn fd_gradient(e: &Exponent, x: f64, z: f64) -> (f64, f64) {
        let (hx, hz) = (1e-5 * x, 1e-5 * z);
        let b = |x, z| eval_b(e, pt(x, z)).unwrap();
        (
            (b(x + hx, z) - b(x - hx, z)) / (2.0 * hx),
            (b(x, z + hz) - b(x, z - hz)) / (2.0 * hz),
        )
    }

    #[test]
    fn closed_form_gradient_matches_finite_differences_of_b() {
        for p in [1.25, 1.9, 2.0, 2.5, 4.0] {
            let e = exp(p);
            for (x, z) in [(0.3, 0.7), (1.0, 1.0), (2.0, 0.4), (5.0, 8.0)] {
                let j = eval_jet(&e, pt(x, z)).unwrap();
                let (fx, fz) = fd_gradient(&e, x, z);
                assert_relative_eq!(j.bx, fx, max_relative = 1e-5);
                assert_relative_eq!(j.bz, fz, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn closed_form_hessian_matches_finite_differences_of_the_gradient() {
        // Differencing the closed-form gradient keeps roundoff far below
        // the truncation error, so the tolerance can be tighter here.
        for p in [1.25, 1.9, 2.5, 4.0] {
            let e = exp(p);
            for (x, z) in [(0.5, 0.9), (1.0, 2.0), (3.0, 0.8)] {
                let j = eval_jet(&e, pt(x, z)).unwrap();
                let (hx, hz) = (1e-5 * x, 1e-5 * z);
                let jet = |x, z| eval_jet(&e, pt(x, z)).unwrap();
                let fxx = (jet(x + hx, z).bx - jet(x - hx, z).bx) / (2.0 * hx);
                let fzz = (jet(x, z + hz).bz - jet(x, z - hz).bz) / (2.0 * hz);
                let fxz = (jet(x, z + hz).bx - jet(x, z - hz).bx) / (2.0 * hz);
                assert_relative_eq!(j.bxx, fxx, max_relative = 1e-6);
                assert_relative_eq!(j.bzz, fzz, max_relative = 1e-6);
                assert_relative_eq!(j.bxz, fxz, max_relative = 1e-6, epsilon = 1e-9);
            }
        }
    }

    /// Householder reflection of w across the hyperplane orthogonal to v.
    fn reflect(v: &VecD, w: &VecD) -> VecD {
        w.sub(&v.scale(2.0 * v.dot(w) / v.norm_squared()))
    }

    #[test]
    fn radial_extension_reduces_and_rotates() {
        let e = exp(3.0);
        let x = VecD::new(&[1.0, 0.0, 0.0]).unwrap();
        let z = VecD::new(&[0.0, 4.0, 0.0]).unwrap();
        assert_relative_eq!(
            eval_b_highdim(&e, &x, &z).unwrap(),
            8.0,
            max_relative = 1e-12
        );

        // Reflections are orthogonal, and each argument may be rotated
        // independently of the other.
        let v1 = VecD::new(&[1.0, 2.0, 3.0]).unwrap();
        let v2 = VecD::new(&[2.0, -1.0, 0.5]).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let e = exp(p);
            let a = VecD::new(&[0.3, -1.2, 0.7]).unwrap();
            let b = VecD::new(&[2.0, 0.1, -0.4]).unwrap();
            let plain = eval_b_highdim(&e, &a, &b).unwrap();
            let rotated =
                eval_b_highdim(&e, &reflect(&v1, &a), &reflect(&v2, &b)).unwrap();
            assert_relative_eq!(plain, rotated, max_relative = 1e-12);
        }

        assert!(eval_b_highdim(&e, &VecD::zero(3).unwrap(), &z).is_err());
    }

    #[test]
    fn zigzag_majorant_spot_values() {
        // |y| = |x| at p = 2 and |y| = (p*−1)|x| at p = 3 both kill the
        // middle factor.
        assert_eq!(eval_u_radial(&exp(2.0), 1.0, 1.0), 0.0);
        assert_eq!(eval_u_radial(&exp(3.0), 1.0, 2.0), 0.0);
        // U(1,3) at p = 3: 3·(2/3)²·(3−2)·(1+3)² = 64/3.
        assert_relative_eq!(
            eval_u_radial(&exp(3.0), 1.0, 3.0),
            64.0 / 3.0,
            max_relative = 1e-15
        );

        let x = VecD::new(&[0.6, 0.8]).unwrap();
        let y = VecD::new(&[3.0, 0.0]).unwrap();
        assert_relative_eq!(
            eval_u(&exp(3.0), &x, &y),
            64.0 / 3.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn zigzag_majorant_sign_and_power_domination() {
        for p in [1.5, 2.0, 3.0] {
            let e = exp(p);
            let k = e.constant();
            for i in 0..40 {
                for j in 0..40 {
                    let nx = 10f64.powf(-2.0 + 4.0 * i as f64 / 39.0);
                    let ny = 10f64.powf(-2.0 + 4.0 * j as f64 / 39.0);
                    let u = eval_u_radial(&e, nx, ny);
                    if ny <= nx {
                        assert!(u <= 0.0, "sign failed at p={p}, ({nx}, {ny})");
                    }
                    let lower = ny.powf(p) - k * nx.powf(p);
                    let scale = 1.0 + ny.powf(p) + k * nx.powf(p);
                    assert!(
                        u - lower >= -1e-9 * scale,
                        "domination failed at p={p}, ({nx}, {ny}): {u} < {lower}"
                    );
                }
            }
        }
    }

    #[test]
    fn four_variable_function_branches_and_boundary() {
        let e = exp(4.0);
        assert_relative_eq!(
            eval_ntv_radial(&e, 1.0, 1.0).unwrap(),
            3.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            eval_ntv_radial(&e, 0.0, 1.0).unwrap(),
            1.5,
            max_relative = 1e-15
        );
        // Continuity across the branch boundary |ζ|^p = |η|^{p'}.
        for p in [2.5, 3.0, 4.0, 8.0] {
            let e = exp(p);
            for m in [1e-3f64, 0.7, 1.0, 42.0, 1e3] {
                let zeta: f64 = m.powf(1.0 / p);
                let eta: f64 = m.powf(1.0 / e.conjugate());
                let lo = eval_ntv_radial(&e, zeta * (1.0 - 1e-12), eta).unwrap();
                let hi = eval_ntv_radial(&e, zeta * (1.0 + 1e-12), eta).unwrap();
                assert_relative_eq!(lo, hi, max_relative = 1e-10);
                // Either branch's extra term equals |ζ|^p right here.
                let at = eval_ntv_radial(&e, zeta, eta).unwrap();
                assert_relative_eq!(at, 2.0 * m + eta.powf(e.conjugate()), max_relative = 1e-12);
            }
        }
        assert!(eval_ntv_radial(&exp(2.0), 1.0, 1.0).is_err());
        assert!(eval_ntv_radial(&exp(1.5), 1.0, 1.0).is_err());

        let a = VecD::new(&[1.0, 0.0]).unwrap();
        let b = VecD::new(&[0.0, 0.0]).unwrap();
        // Pair norms: |ζ| = 1 from (a, b), |η| = 1 from (b, a).
        assert_relative_eq!(
            eval_ntv(&e, (&a, &b), (&b, &a)).unwrap(),
            3.0,
            max_relative = 1e-15
        );
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // B(λ^{1/p} x, λ^{1/p'} z) = λ B(x, z): the surface is
            // homogeneous along the scaling orbits.
            #[test]
            fn scaling_law(
                p in prop_oneof![1.05f64..1.99, Just(2.0), 2.01f64..8.0],
                x in 0.1f64..10.0,
                z in 0.1f64..10.0,
                lambda_exp in -3i32..=3,
            ) {
                let e = exp(p);
                let lambda = 10f64.powi(lambda_exp);
                let base = eval_b(&e, pt(x, z)).unwrap();
                let scaled = eval_b(
                    &e,
                    pt(
                        lambda.powf(1.0 / p) * x,
                        lambda.powf(1.0 / e.conjugate()) * z,
                    ),
                )
                .unwrap();
                prop_assert!(
                    (scaled - lambda * base).abs() <= 1e-10 * (1.0 + lambda * base.abs())
                );
            }

            // 1° in its pointwise form: the surface sits above xz.
            #[test]
            fn dominates_the_product(
                p in prop_oneof![1.05f64..1.99, Just(2.0), 2.01f64..8.0],
                x in 0.01f64..100.0,
                z in 0.01f64..100.0,
            ) {
                let e = exp(p);
                let b = eval_b(&e, pt(x, z)).unwrap();
                prop_assert!(b >= x * z * (1.0 - 1e-12));
            }
        }
    }
}
