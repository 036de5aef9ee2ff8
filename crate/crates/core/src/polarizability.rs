//! Static polarizability of a dielectric ellipsoid.
//!
//! The depolarization factor of axis `s` is
//!
//! ```text
//! m_s = (abc / 2) ∫₀^∞ dζ / ((ζ + s²) R(ζ)),   R(ζ)² = (ζ + a²)(ζ + b²)(ζ + c²)
//! ```
//!
//! evaluated by adaptive Gauss–Kronrod quadrature after mapping ζ ∈ [0, ∞)
//! onto t ∈ [0, 1). The principal polarizabilities follow as
//! `A_ss = abc / (3 [ε/(ε₁ − ε) + m_s])`.

use nalgebra::Vector3;

use crate::error::{invalid, Axis, Error, Result};
use crate::quadrature::integrate_adaptive;

/// Default relative tolerance for the depolarization integrals.
pub const DEFAULT_DEPOLARIZATION_TOL: f64 = 1e-10;
/// Relative tolerance for deciding that A_XX and A_YY coincide.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Semi-axes closer than this (relative) are treated as equal.
pub const AXIS_DEGENERACY_TOL: f64 = 1e-12;

const MAX_INTERVALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Relative permittivity ε of the surrounding medium.
    pub eps_ambient: f64,
    /// Relative permittivity ε₁ of the body.
    pub eps_body: f64,
}

impl Ellipsoid {
    pub fn new(a: f64, b: f64, c: f64, eps_ambient: f64, eps_body: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(
                    name,
                    format!("semi-axis must be positive and finite, got {v}"),
                ));
            }
        }
        if !(eps_ambient.is_finite() && eps_ambient > 0.0) {
            return Err(invalid(
                "eps_ambient",
                format!("must be positive and finite, got {eps_ambient}"),
            ));
        }
        if !eps_body.is_finite() {
            return Err(invalid(
                "eps_body",
                format!("must be finite, got {eps_body}"),
            ));
        }
        Ok(Self {
            a,
            b,
            c,
            eps_ambient,
            eps_body,
        })
    }

    pub fn sphere(radius: f64, eps_ambient: f64, eps_body: f64) -> Result<Self> {
        Self::new(radius, radius, radius, eps_ambient, eps_body)
    }

    pub fn semi_axes(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// Product abc, which has the dimension of a volume.
    pub fn axes_product(&self) -> f64 {
        self.a * self.b * self.c
    }

    pub fn max_semi_axis(&self) -> f64 {
        self.a.max(self.b).max(self.c)
    }

    /// True when a and b agree to within [`AXIS_DEGENERACY_TOL`].
    pub fn is_axisymmetric_about_z(&self) -> bool {
        (self.a - self.b).abs() <= AXIS_DEGENERACY_TOL * self.a.max(self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizationFactors {
    pub m_x: f64,
    pub m_y: f64,
    pub m_z: f64,
}

impl DepolarizationFactors {
    pub fn as_array(&self) -> [f64; 3] {
        [self.m_x, self.m_y, self.m_z]
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.m_x,
            Axis::Y => self.m_y,
            Axis::Z => self.m_z,
        }
    }

    /// `m_x + m_y + m_z - 1`.
    pub fn sum_rule_residual(&self) -> f64 {
        (self.m_x + self.m_y + self.m_z) - 1.0
    }
}

/// Integrand of the depolarization integral after ζ = L²·t/(1−t), with all
/// semi-axes divided by L. Written in terms of w = 1 − t so that nothing
/// overflows as t → 1.
fn mapped_integrand(t: f64, shift: f64, scaled: [f64; 3]) -> f64 {
    let w = 1.0 - t;
    if w <= 0.0 {
        return 0.0;
    }
    let q = |s: f64| t + s * s * w;
    let product = q(scaled[0]) * q(scaled[1]) * q(scaled[2]);
    w.sqrt() / (q(shift) * product.sqrt())
}

/// Depolarization factors of `e` by adaptive quadrature at relative
/// tolerance `tol`.
pub fn depolarization_factors(e: &Ellipsoid, tol: f64) -> Result<DepolarizationFactors> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(invalid("tol", format!("must lie in (0, 1e-3], got {tol}")));
    }
    let scale = e.max_semi_axis();
    let scaled = [e.a / scale, e.b / scale, e.c / scale];
    let prefactor = 0.5 * scaled[0] * scaled[1] * scaled[2];
    let factor = |s: f64| -> Result<f64> {
        let est = integrate_adaptive(
            |t| mapped_integrand(t, s, scaled),
            0.0,
            1.0,
            tol,
            0.0,
            MAX_INTERVALS,
        )?;
        Ok(prefactor * est.value)
    };
    Ok(DepolarizationFactors {
        m_x: factor(scaled[0])?,
        m_y: factor(scaled[1])?,
        m_z: factor(scaled[2])?,
    })
}

/// Closed-form depolarization factors of a spheroid with equatorial
/// semi-axis `equatorial` (= a = b) and polar semi-axis `polar` (= c).
pub fn spheroid_closed_form(equatorial: f64, polar: f64) -> DepolarizationFactors {
    let m_z = if polar > equatorial {
        // prolate: e² = 1 − a²/c²
        let e2 = 1.0 - (equatorial / polar).powi(2);
        let e = e2.sqrt();
        if e < 1e-2 {
            // series of (1−e²)/e³ (atanh e − e) about e = 0
            (1.0 - e2) * (1.0 / 3.0 + e2 / 5.0 + e2 * e2 / 7.0 + e2 * e2 * e2 / 9.0)
        } else {
            (1.0 - e2) / (e2 * e) * (e.atanh() - e)
        }
    } else if polar < equatorial {
        // oblate: g² = a²/c² − 1
        let g2 = (equatorial / polar).powi(2) - 1.0;
        let g = g2.sqrt();
        if g < 1e-2 {
            (1.0 + g2) * (1.0 / 3.0 - g2 / 5.0 + g2 * g2 / 7.0 - g2 * g2 * g2 / 9.0)
        } else {
            (1.0 + g2) / (g2 * g) * (g - g.atan())
        }
    } else {
        1.0 / 3.0
    };
    let m_t = 0.5 * (1.0 - m_z);
    DepolarizationFactors {
        m_x: m_t,
        m_y: m_t,
        m_z,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBeta {
    pub alpha: f64,
    pub beta: f64,
}

/// Principal polarizabilities in the body frame (volume units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizabilityTensor {
    pub a_xx: f64,
    pub a_yy: f64,
    pub a_zz: f64,
    /// Present only when A_XX = A_YY within [`SYMMETRY_TOL`].
    pub alpha_beta: Option<AlphaBeta>,
}

impl PolarizabilityTensor {
    /// Builds a tensor from principal values, populating the α/β split when
    /// the X and Y values coincide.
    pub fn from_principal(a_xx: f64, a_yy: f64, a_zz: f64) -> Self {
        let mut t = Self {
            a_xx,
            a_yy,
            a_zz,
            alpha_beta: None,
        };
        if t.is_axisymmetric() {
            t.alpha_beta = Some(t.split_unchecked());
        }
        t
    }

    pub fn principal(&self) -> [f64; 3] {
        [self.a_xx, self.a_yy, self.a_zz]
    }

    pub fn is_axisymmetric(&self) -> bool {
        let scale = self.a_xx.abs().max(self.a_yy.abs());
        (self.a_xx - self.a_yy).abs() <= SYMMETRY_TOL * scale
    }

    fn split_unchecked(&self) -> AlphaBeta {
        let beta = 0.5 * (self.a_xx + self.a_yy);
        AlphaBeta {
            alpha: self.a_zz - beta,
            beta,
        }
    }
}

/// Principal polarizabilities from precomputed depolarization factors.
///
/// Equal permittivities give the zero tensor. A vanishing denominator
/// `ε + m (ε₁ − ε)` is reported as a resonance on that axis.
pub fn polarizability_tensor(
    e: &Ellipsoid,
    m: &DepolarizationFactors,
) -> Result<PolarizabilityTensor> {
    let contrast = e.eps_body - e.eps_ambient;
    if contrast == 0.0 {
        return Ok(PolarizabilityTensor {
            a_xx: 0.0,
            a_yy: 0.0,
            a_zz: 0.0,
            alpha_beta: Some(AlphaBeta {
                alpha: 0.0,
                beta: 0.0,
            }),
        });
    }
    let volume = e.axes_product();
    let principal = |axis: Axis| -> Result<f64> {
        let mi = m.get(axis);
        // abc / (3 [ε/(ε₁−ε) + m]) multiplied through by (ε₁−ε)
        let denom = e.eps_ambient + mi * contrast;
        if denom.abs() <= 1e-12 * (e.eps_ambient.abs() + (mi * contrast).abs()) {
            return Err(Error::Resonance { axis });
        }
        Ok(volume * contrast / (3.0 * denom))
    };
    let a_xx = principal(Axis::X)?;
    let a_yy = principal(Axis::Y)?;
    let a_zz = principal(Axis::Z)?;
    let mut t = PolarizabilityTensor::from_principal(a_xx, a_yy, a_zz);
    if t.alpha_beta.is_none() && e.is_axisymmetric_about_z() {
        t.alpha_beta = Some(t.split_unchecked());
    }
    Ok(t)
}

/// Response `P = α N (N·E) + β E` of an axisymmetric body whose symmetry
/// axis points along the unit vector N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisymmetricResponse {
    pub axis: Vector3<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl AxisymmetricResponse {
    pub fn apply(&self, field: &Vector3<f64>) -> Vector3<f64> {
        self.axis * (self.alpha * self.axis.dot(field)) + field * self.beta
    }
}

/// Splits an axisymmetric tensor into its anisotropic part along `axis` and
/// its isotropic part.
pub fn alpha_beta_split(
    t: &PolarizabilityTensor,
    axis: Vector3<f64>,
) -> Result<AxisymmetricResponse> {
    let norm = axis.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
        return Err(invalid(
            "axis",
            format!("must be a unit vector, |N| = {norm}"),
        ));
    }
    let split = match t.alpha_beta {
        Some(s) => s,
        None if t.is_axisymmetric() => t.split_unchecked(),
        None => {
            return Err(Error::NotAxisymmetric {
                a_xx: t.a_xx,
                a_yy: t.a_yy,
            })
        }
    };
    Ok(AxisymmetricResponse {
        axis,
        alpha: split.alpha,
        beta: split.beta,
    })
}

/// Depolarization factors at the default tolerance followed by the tensor.
pub fn ellipsoid_polarizability(
    e: &Ellipsoid,
) -> Result<(DepolarizationFactors, PolarizabilityTensor)> {
    let m = depolarization_factors(e, DEFAULT_DEPOLARIZATION_TOL)?;
    let t = polarizability_tensor(e, &m)?;
    Ok((m, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_factors_are_one_third() {
        let e = Ellipsoid::sphere(1.0, 1.0, 3.0).unwrap();
        let m = depolarization_factors(&e, 1e-10).unwrap();
        for v in m.as_array() {
            assert!((v - 1.0 / 3.0).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn sphere_tensor_is_two_fifths() {
        let e = Ellipsoid::sphere(1.0, 1.0, 3.0).unwrap();
        let (_, t) = ellipsoid_polarizability(&e).unwrap();
        for v in t.principal() {
            assert!((v - 0.4).abs() < 1e-12);
        }
        let ab = t.alpha_beta.unwrap();
        assert!(ab.alpha.abs() < 1e-12);
        assert!((ab.beta - 0.4).abs() < 1e-12);
    }

    #[test]
    fn matched_permittivity_gives_zero_tensor() {
        let e = Ellipsoid::new(1.0, 2.0, 3.0, 2.5, 2.5).unwrap();
        let (_, t) = ellipsoid_polarizability(&e).unwrap();
        assert_eq!(t.principal(), [0.0; 3]);
    }

    #[test]
    fn nearly_matched_permittivity_tends_to_zero() {
        let e = Ellipsoid::new(1.0, 2.0, 3.0, 1.0, 1.0 + 1e-14).unwrap();
        let (_, t) = ellipsoid_polarizability(&e).unwrap();
        for v in t.principal() {
            assert!(v.is_finite() && v.abs() < 1e-13);
        }
    }

    #[test]
    fn resonance_is_reported_with_axis() {
        // sphere: ε + (1/3)(ε₁ − ε) = 0 at ε₁ = −2ε
        let e = Ellipsoid::sphere(1.0, 1.0, -2.0).unwrap();
        let m = DepolarizationFactors {
            m_x: 1.0 / 3.0,
            m_y: 1.0 / 3.0,
            m_z: 1.0 / 3.0,
        };
        assert_eq!(
            polarizability_tensor(&e, &m),
            Err(Error::Resonance { axis: Axis::X })
        );
    }

    #[test]
    fn prolate_symmetry_axis_is_more_polarizable() {
        let e = Ellipsoid::new(1.0, 1.0, 2.0, 1.0, 5.0).unwrap();
        let (m, t) = ellipsoid_polarizability(&e).unwrap();
        assert!(m.m_z < m.m_x);
        assert!(t.alpha_beta.unwrap().alpha > 0.0);
    }

    #[test]
    fn split_of_one_one_four() {
        let t = PolarizabilityTensor::from_principal(1.0, 1.0, 4.0);
        let r = alpha_beta_split(&t, Vector3::z()).unwrap();
        assert_eq!((r.alpha, r.beta), (3.0, 1.0));
        let iso = PolarizabilityTensor::from_principal(2.0, 2.0, 2.0);
        let r = alpha_beta_split(&iso, Vector3::x()).unwrap();
        assert_eq!((r.alpha, r.beta), (0.0, 2.0));
    }

    #[test]
    fn split_rejects_triaxial_tensor_and_bad_axis() {
        let t = PolarizabilityTensor::from_principal(1.0, 2.0, 4.0);
        assert!(matches!(
            alpha_beta_split(&t, Vector3::z()),
            Err(Error::NotAxisymmetric { .. })
        ));
        let t = PolarizabilityTensor::from_principal(1.0, 1.0, 4.0);
        assert!(matches!(
            alpha_beta_split(&t, Vector3::new(1.0, 1.0, 0.0)),
            Err(Error::InvalidArgument { name: "axis", .. })
        ));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(Ellipsoid::new(0.0, 1.0, 1.0, 1.0, 2.0).is_err());
        assert!(Ellipsoid::new(1.0, f64::INFINITY, 1.0, 1.0, 2.0).is_err());
        assert!(Ellipsoid::new(1.0, 1.0, 1.0, 0.0, 2.0).is_err());
        let e = Ellipsoid::sphere(1.0, 1.0, 2.0).unwrap();
        assert!(depolarization_factors(&e, 0.0).is_err());
        assert!(depolarization_factors(&e, 1e-2).is_err());
    }

    #[test]
    fn closed_form_series_branch_is_continuous() {
        for (eq, pol) in [(1.0, 1.0 + 1e-7), (1.0, 1.0 - 1e-7)] {
            let m = spheroid_closed_form(eq, pol);
            assert!((m.m_z - 1.0 / 3.0).abs() < 1e-6);
        }
        // both sides of the series/direct switch at e = 1e-2 against quadrature
        for e2 in [0.9999e-4f64, 1.0001e-4] {
            for (eq, pol) in [
                (1.0, 1.0 / (1.0 - e2).sqrt()),
                (1.0 / (1.0 - e2).sqrt(), 1.0),
            ] {
                let closed = spheroid_closed_form(eq, pol);
                let quad =
                    depolarization_factors(&Ellipsoid::new(eq, eq, pol, 1.0, 2.0).unwrap(), 1e-12)
                        .unwrap();
                assert!(
                    (closed.m_z - quad.m_z).abs() < 1e-12,
                    "{} vs {}",
                    closed.m_z,
                    quad.m_z
                );
            }
        }
    }
}
