use std::sync::Arc;

use num_complex::Complex;

use super::{ComplexSeed, FieldError, FnScalar, ScalarField, ScalarJet};
use crate::quat::{DomainError, SphericalPoint, POLE_THRESHOLD};
use crate::scalar::Scalar;

/// Pair of real functions of `(α, β)` used as the angular factor of a
/// product field.
#[derive(Clone)]
pub struct AngularPair<T: Scalar> {
    name: String,
    a: Arc<dyn ScalarField<T>>,
    b: Arc<dyn ScalarField<T>>,
    mercator: bool,
}

impl<T: Scalar> AngularPair<T> {
    /// Arbitrary pair; no Cauchy–Riemann structure is assumed.
    pub fn new(name: impl Into<String>, a: Arc<dyn ScalarField<T>>, b: Arc<dyn ScalarField<T>>) -> Self {
        Self {
            name: name.into(),
            a,
            b,
            mercator: false,
        }
    }

    pub fn constant(c: Complex<T>) -> Self {
        let mut pair = mercator_pair(ComplexSeed::constant(c));
        pair.name = format!("const({}{:+}i)", c.re, c.im);
        pair
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn a(&self) -> &Arc<dyn ScalarField<T>> {
        &self.a
    }

    pub fn b(&self) -> &Arc<dyn ScalarField<T>> {
        &self.b
    }

    /// True for pairs built by [`mercator_pair`], which solve the angular
    /// Cauchy–Riemann system by construction.
    pub fn is_mercator(&self) -> bool {
        self.mercator
    }
}

/// `Re` or `Im` of `g(α + i ln tan(β/2))`.
struct MercatorPart<T: Scalar> {
    g: ComplexSeed<T>,
    imag: bool,
}

impl<T: Scalar> ScalarField<T> for MercatorPart<T> {
    fn jet(&self, p: &SphericalPoint<T>) -> Result<ScalarJet<T>, FieldError> {
        let sb = p.beta.sin();
        if sb.abs() < T::lit(POLE_THRESHOLD) {
            return Err(DomainError::DegenerateFrame {
                beta: p.beta.to_f64().unwrap_or(f64::NAN),
            }
            .into());
        }
        let half = p.beta / T::lit(2.0);
        let w = Complex::new(p.alpha, half.tan().ln());
        let g = self.g.derivative(w, 0)?;
        let dg = self.g.derivative(w, 1)?;
        // d/dβ ln tan(β/2) = 1 / sin β, so ∂_β = i g' / sin β.
        let zero = T::zero();
        Ok(if self.imag {
            ScalarJet {
                value: g.im,
                grad: [zero, zero, dg.im, dg.re / sb],
            }
        } else {
            ScalarJet {
                value: g.re,
                grad: [zero, zero, dg.re, -dg.im / sb],
            }
        })
    }
}

/// `A + iB = g(α + i ln tan(β/2))`, a solution of
/// `A_α / sin β = B_β`, `B_α / sin β = −A_β` for every holomorphic `g`.
pub fn mercator_pair<T: Scalar>(g: ComplexSeed<T>) -> AngularPair<T> {
    use super::SeedKind;
    let short = match g.kind() {
        SeedKind::ExpI(1) => "exp".to_string(),
        SeedKind::ExpI(n) => format!("exp{n}"),
        SeedKind::Power(1) => "w".to_string(),
        _ => g.name(),
    };
    AngularPair {
        name: format!("mercator:{short}"),
        a: Arc::new(MercatorPart { g, imag: false }),
        b: Arc::new(MercatorPart { g, imag: true }),
        mercator: true,
    }
}

fn cos_alpha<T: Scalar>(p: &SphericalPoint<T>) -> ScalarJet<T> {
    let zero = T::zero();
    ScalarJet {
        value: p.alpha.cos(),
        grad: [zero, zero, -p.alpha.sin(), zero],
    }
}

/// `(A, B) = (cos α, 0)`; violates the angular Cauchy–Riemann system.
pub(crate) fn cos_alpha_pair<T: Scalar>() -> AngularPair<T> {
    AngularPair::new(
        "cos(alpha)",
        Arc::new(FnScalar::new(cos_alpha::<T>)),
        super::zero_scalar(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Coord;

    fn cr_residual(pair: &AngularPair<f64>, p: &SphericalPoint<f64>) -> f64 {
        let a = pair.a().jet(p).unwrap();
        let b = pair.b().jet(p).unwrap();
        let s = p.beta.sin();
        let (al, be) = (Coord::Alpha as usize, Coord::Beta as usize);
        let r15 = a.grad[al] / s - b.grad[be];
        let r16 = b.grad[al] / s + a.grad[be];
        r15.abs().max(r16.abs())
    }

    #[test]
    fn exp_iw_closed_form() {
        let pair = mercator_pair(ComplexSeed::<f64>::exp_i(1));
        let p = SphericalPoint::new(0.0, 1.0, 1.0, 1.0);
        let cot_half = 1.0 / (0.5f64).tan();
        assert!((pair.a().eval(&p).unwrap() - 1f64.cos() * cot_half).abs() < 1e-14);
        assert!((pair.b().eval(&p).unwrap() - 1f64.sin() * cot_half).abs() < 1e-14);
        assert!(cr_residual(&pair, &p) < 1e-12);
    }

    #[test]
    fn constant_pair_has_zero_partials() {
        let pair = AngularPair::constant(Complex::new(2.0, -1.0));
        let p = SphericalPoint::new(0.0, 1.0, 0.3, 2.0);
        let a = pair.a().jet(&p).unwrap();
        let b = pair.b().jet(&p).unwrap();
        assert_eq!((a.value, b.value), (2.0, -1.0));
        assert!(a.grad.iter().chain(b.grad.iter()).all(|g| *g == 0.0));
    }

    #[test]
    fn identity_g_gives_mercator_coordinates() {
        let pair = mercator_pair(ComplexSeed::<f64>::power(1));
        let p = SphericalPoint::new(0.0, 1.0, 0.8, 1.3);
        assert!((pair.a().eval(&p).unwrap() - 0.8).abs() < 1e-15);
        assert!((pair.b().eval(&p).unwrap() - (0.65f64).tan().ln()).abs() < 1e-15);
        assert!(cr_residual(&pair, &p) < 1e-14);
    }

    #[test]
    fn cos_alpha_pair_violates_system() {
        let pair = cos_alpha_pair::<f64>();
        let p = SphericalPoint::new(0.0, 1.0, 1.2, 1.0);
        assert!(cr_residual(&pair, &p) > 0.1);
    }

    #[test]
    fn poles_refused() {
        let pair = mercator_pair(ComplexSeed::<f64>::exp_i(1));
        assert!(pair.a().jet(&SphericalPoint::new(0.0, 1.0, 0.0, 0.0)).is_err());
    }
}
