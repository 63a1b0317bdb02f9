use std::sync::Arc;

use rand::Rng;

use super::angular::cos_alpha_pair;
use super::{
    product_field, zero_scalar, ComplexSeed, FieldError, FieldKind, FnScalar, QuaternionField,
    ScalarField, ScalarJet, StructuredField,
};
use crate::quat::{Quaternion, SphericalPoint};
use crate::scalar::Scalar;

fn x_jet<T: Scalar>(p: &SphericalPoint<T>) -> ScalarJet<T> {
    let (sa, ca) = p.alpha.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    ScalarJet {
        value: p.r * ca * sb,
        grad: [T::zero(), ca * sb, -p.r * sa * sb, p.r * ca * cb],
    }
}

fn x_cubed_jet<T: Scalar>(p: &SphericalPoint<T>) -> ScalarJet<T> {
    x_jet(p).cube()
}

fn t_squared_jet<T: Scalar>(p: &SphericalPoint<T>) -> ScalarJet<T> {
    let zero = T::zero();
    ScalarJet {
        value: p.t * p.t,
        grad: [T::lit(2.0) * p.t, zero, zero, zero],
    }
}

fn two_t_jet<T: Scalar>(p: &SphericalPoint<T>) -> ScalarJet<T> {
    let zero = T::zero();
    ScalarJet {
        value: T::lit(2.0) * p.t,
        grad: [T::lit(2.0), zero, zero, zero],
    }
}

fn zero_control<T: Scalar>() -> StructuredField<T> {
    StructuredField::custom("zero", FieldKind::Derived, zero_scalar(), zero_scalar(), true)
}

fn two_t_control<T: Scalar>() -> StructuredField<T> {
    StructuredField::custom(
        "2t",
        FieldKind::Derived,
        Arc::new(FnScalar::new(two_t_jet::<T>)),
        zero_scalar(),
        false,
    )
}

/// Fields engineered to violate the defect condition `D_l f = −2v/r`.
pub fn negative_controls<T: Scalar>() -> Vec<StructuredField<T>> {
    let x: Arc<dyn ScalarField<T>> = Arc::new(FnScalar::new(x_jet::<T>));
    let x3: Arc<dyn ScalarField<T>> = Arc::new(FnScalar::new(x_cubed_jet::<T>));
    let t2: Arc<dyn ScalarField<T>> = Arc::new(FnScalar::new(t_squared_jet::<T>));

    let mut z_cos = product_field(ComplexSeed::power(1), cos_alpha_pair());
    z_cos.name = "control:z*cos(alpha)".into();
    z_cos.kind = FieldKind::Control;
    z_cos.satisfies_condition = false;
    z_cos.must_fail = vec!["condition", "angular_condition", "cr_system"];

    vec![
        StructuredField::custom("control:x", FieldKind::Control, x.clone(), zero_scalar(), false)
            .with_must_fail(&["condition", "holomorphy_tr", "angular_condition", "cr_system"])
            .with_t_derivative(zero_control),
        StructuredField::custom("control:x^3", FieldKind::Control, x3.clone(), zero_scalar(), false)
            .with_must_fail(&[
                "condition",
                "holomorphy_tr",
                "angular_condition",
                "cr_system",
                "theorem",
            ])
            .with_t_derivative(zero_control),
        StructuredField::custom("control:t^2", FieldKind::Control, t2, zero_scalar(), false)
            .with_must_fail(&["condition", "holomorphy_tr"])
            .with_t_derivative(two_t_control),
        StructuredField::custom("control:iota*x^3", FieldKind::Control, zero_scalar(), x3, false)
            .with_must_fail(&[
                "condition",
                "holomorphy_tr",
                "angular_condition",
                "cr_system",
                "harmonic_v_over_r",
            ])
            .with_t_derivative(zero_control),
        z_cos,
    ]
}

/// Real field given in Cartesian coordinates `(t, x, y, z)` together with
/// its Cartesian gradient.
#[derive(Clone, Copy)]
pub struct CartesianScalar<T> {
    name: &'static str,
    f: fn(&Quaternion<T>) -> (T, [T; 4]),
}

impl<T: Scalar> CartesianScalar<T> {
    pub fn new(name: &'static str, f: fn(&Quaternion<T>) -> (T, [T; 4])) -> Self {
        Self { name, f }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// `g = x y`
    pub fn xy() -> Self {
        Self::new("xy", |q| (q.x * q.y, [T::zero(), q.y, q.x, T::zero()]))
    }

    /// `g = t x + y²`
    pub fn tx_plus_y2() -> Self {
        Self::new("tx+y^2", |q| {
            (
                q.w * q.x + q.y * q.y,
                [q.x, q.w, T::lit(2.0) * q.y, T::zero()],
            )
        })
    }

    /// `g = x²`
    pub fn x_squared() -> Self {
        Self::new("x^2", |q| {
            (q.x * q.x, [T::zero(), T::lit(2.0) * q.x, T::zero(), T::zero()])
        })
    }

    /// `g = t² − x²`, harmonic.
    pub fn t2_minus_x2() -> Self {
        Self::new("t^2-x^2", |q| {
            (
                q.w * q.w - q.x * q.x,
                [T::lit(2.0) * q.w, -T::lit(2.0) * q.x, T::zero(), T::zero()],
            )
        })
    }

    /// `g = x`
    pub fn x() -> Self {
        Self::new("x", |q| (q.x, [T::zero(), T::one(), T::zero(), T::zero()]))
    }

    /// `g = 1`
    pub fn one() -> Self {
        Self::new("1", |_| (T::one(), [T::zero(); 4]))
    }
}

impl<T: Scalar> ScalarField<T> for CartesianScalar<T> {
    fn jet(&self, p: &SphericalPoint<T>) -> Result<ScalarJet<T>, FieldError> {
        let (value, grad) = (self.f)(&p.to_quaternion());
        let sph = p.spherical_partials(&grad.map(Quaternion::from_real));
        Ok(ScalarJet {
            value,
            grad: sph.map(|q| q.w),
        })
    }
}

/// Quaternion-valued field in Cartesian coordinates with its Cartesian
/// partials `[∂_t, ∂_x, ∂_y, ∂_z]`.
#[derive(Clone, Copy)]
pub struct CartesianField<T> {
    name: &'static str,
    f: fn(&Quaternion<T>) -> (Quaternion<T>, [Quaternion<T>; 4]),
}

impl<T: Scalar> CartesianField<T> {
    pub fn new(
        name: &'static str,
        f: fn(&Quaternion<T>) -> (Quaternion<T>, [Quaternion<T>; 4]),
    ) -> Self {
        Self { name, f }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// `f = j x`
    pub fn j_times_x() -> Self {
        Self::new("j*x", |q| {
            let z = Quaternion::zero();
            (Quaternion::j().scale(q.x), [z, Quaternion::j(), z, z])
        })
    }

    /// `f = p`, the identity.
    pub fn identity() -> Self {
        Self::new("p", |q| {
            (
                *q,
                [
                    Quaternion::one(),
                    Quaternion::i(),
                    Quaternion::j(),
                    Quaternion::k(),
                ],
            )
        })
    }
}

impl<T: Scalar> QuaternionField<T> for CartesianField<T> {
    fn value(&self, p: &SphericalPoint<T>) -> Result<Quaternion<T>, FieldError> {
        Ok((self.f)(&p.to_quaternion()).0)
    }

    fn has_partials(&self) -> bool {
        true
    }

    fn partials(&self, p: &SphericalPoint<T>) -> Result<[Quaternion<T>; 4], FieldError> {
        let (_, cart) = (self.f)(&p.to_quaternion());
        Ok(p.spherical_partials(&cart))
    }
}

/// `c cos(mα + φ) cos(nβ + ψ) (1 + a t + b r)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm<T> {
    pub coeff: T,
    pub alpha_freq: i32,
    pub beta_freq: i32,
    pub alpha_phase: T,
    pub beta_phase: T,
    pub t_slope: T,
    pub r_slope: T,
}

/// Sum of [`TrigTerm`]s; a smooth scalar with closed-form partials.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial<T> {
    pub terms: Vec<TrigTerm<T>>,
}

impl<T: Scalar> TrigPolynomial<T> {
    /// Random polynomial with `n_terms` terms and frequencies up to
    /// `max_freq`. With `angular_only` the `(t, r)` slopes are zero.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_terms: usize, max_freq: i32, angular_only: bool) -> Self {
        let terms = (0..n_terms)
            .map(|_| {
                let mut u = |a: f64, b: f64| T::lit(rng.random_range(a..b));
                let coeff = u(-1.0, 1.0);
                let alpha_phase = u(0.0, std::f64::consts::TAU);
                let beta_phase = u(0.0, std::f64::consts::TAU);
                let (t_slope, r_slope) = if angular_only {
                    (T::zero(), T::zero())
                } else {
                    (u(-0.5, 0.5), u(-0.5, 0.5))
                };
                TrigTerm {
                    coeff,
                    alpha_freq: rng.random_range(0..=max_freq),
                    beta_freq: rng.random_range(0..=max_freq),
                    alpha_phase,
                    beta_phase,
                    t_slope,
                    r_slope,
                }
            })
            .collect();
        Self { terms }
    }
}

impl<T: Scalar> ScalarField<T> for TrigPolynomial<T> {
    fn jet(&self, p: &SphericalPoint<T>) -> Result<ScalarJet<T>, FieldError> {
        let mut jet = ScalarJet::constant(T::zero());
        for term in &self.terms {
            let m = T::lit(term.alpha_freq as f64);
            let n = T::lit(term.beta_freq as f64);
            let (sa, ca) = (m * p.alpha + term.alpha_phase).sin_cos();
            let (sb, cb) = (n * p.beta + term.beta_phase).sin_cos();
            let lin = T::one() + term.t_slope * p.t + term.r_slope * p.r;
            let c = term.coeff;
            jet = jet.add(&ScalarJet {
                value: c * ca * cb * lin,
                grad: [
                    c * ca * cb * term.t_slope,
                    c * ca * cb * term.r_slope,
                    -c * m * sa * cb * lin,
                    -c * n * ca * sb * lin,
                ],
            });
        }
        Ok(jet)
    }
}

/// Quaternion field whose four components are trigonometric polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomQuaternionField<T> {
    pub components: [TrigPolynomial<T>; 4],
}

impl<T: Scalar> RandomQuaternionField<T> {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_terms: usize, max_freq: i32) -> Self {
        Self {
            components: std::array::from_fn(|_| TrigPolynomial::random(rng, n_terms, max_freq, false)),
        }
    }

    fn jets(&self, p: &SphericalPoint<T>) -> Result<[ScalarJet<T>; 4], FieldError> {
        let mut out = [ScalarJet::constant(T::zero()); 4];
        for (o, c) in out.iter_mut().zip(self.components.iter()) {
            *o = c.jet(p)?;
        }
        Ok(out)
    }
}

impl<T: Scalar> QuaternionField<T> for RandomQuaternionField<T> {
    fn value(&self, p: &SphericalPoint<T>) -> Result<Quaternion<T>, FieldError> {
        let [w, x, y, z] = self.jets(p)?;
        Ok(Quaternion::new(w.value, x.value, y.value, z.value))
    }

    fn has_partials(&self) -> bool {
        true
    }

    fn partials(&self, p: &SphericalPoint<T>) -> Result<[Quaternion<T>; 4], FieldError> {
        let [w, x, y, z] = self.jets(p)?;
        Ok(std::array::from_fn(|c| {
            Quaternion::new(w.grad[c], x.grad[c], y.grad[c], z.grad[c])
        }))
    }
}

/// `ι · f`, with partials by the product rule.
pub struct IotaTimes<'a, F: ?Sized> {
    inner: &'a F,
}

impl<'a, F: ?Sized> IotaTimes<'a, F> {
    pub fn new(inner: &'a F) -> Self {
        Self { inner }
    }
}

impl<T: Scalar, F: QuaternionField<T> + ?Sized> QuaternionField<T> for IotaTimes<'_, F> {
    fn value(&self, p: &SphericalPoint<T>) -> Result<Quaternion<T>, FieldError> {
        Ok(p.iota() * self.inner.value(p)?)
    }

    fn has_partials(&self) -> bool {
        self.inner.has_partials()
    }

    fn partials(&self, p: &SphericalPoint<T>) -> Result<[Quaternion<T>; 4], FieldError> {
        let f = self.inner.value(p)?;
        let d = self.inner.partials(p)?;
        let (sa, ca) = p.alpha.sin_cos();
        let (sb, cb) = p.beta.sin_cos();
        let iota = p.iota();
        let iota_alpha = Quaternion::pure(-sa * sb, ca * sb, T::zero());
        let iota_beta = Quaternion::pure(ca * cb, sa * cb, -sb);
        Ok([
            iota * d[0],
            iota * d[1],
            iota_alpha * f + iota * d[2],
            iota_beta * f + iota * d[3],
        ])
    }
}

/// `factor · v / r` for a scalar `v`.
pub struct RadialQuotient<S> {
    inner: S,
    factor: f64,
}

impl<S> RadialQuotient<S> {
    pub fn new(inner: S, factor: f64) -> Self {
        Self { inner, factor }
    }
}

impl<T: Scalar, S: ScalarField<T>> ScalarField<T> for RadialQuotient<S> {
    fn jet(&self, p: &SphericalPoint<T>) -> Result<ScalarJet<T>, FieldError> {
        let v = self.inner.jet(p)?;
        let k = T::lit(self.factor);
        let r = p.r;
        Ok(ScalarJet {
            value: k * v.value / r,
            grad: [
                k * v.grad[0] / r,
                k * (v.grad[1] - v.value / r) / r,
                k * v.grad[2] / r,
                k * v.grad[3] / r,
            ],
        })
    }
}

super::real_quaternion_field! {
    impl[T: Scalar] for CartesianScalar<T>;
    impl[T: Scalar] for TrigPolynomial<T>;
    impl[T: Scalar, S: ScalarField<T>] for RadialQuotient<S>;
}
