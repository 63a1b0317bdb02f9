//! Fueter operators, their conjugates, the Laplacian and the angular
//! operator `ι_α⁻¹ ∂_α + ι_β⁻¹ ∂_β`, evaluated pointwise over a pluggable
//! derivative backend.
//!
//! Cartesian partials are always obtained from spherical ones through the
//! exact Jacobian. Second derivatives come either from differencing analytic
//! first partials (analytic backend) or from pure second-difference stencils
//! (finite-difference backends). Third-order quantities such as `D_l Δf`
//! difference a second-order quantity once more with [`DerivativeEngine::outer`],
//! so no stencil is nested more than twice.

pub mod stencil;

use serde::Serialize;
use thiserror::Error;

use crate::fields::{FieldError, QuaternionField, StructuredField};
use crate::quat::{frame_at, to_spherical, Coord, DomainError, Quaternion, SphericalPoint};
use crate::scalar::Scalar;
use stencil::StencilOrder;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("analytic backend needs analytic partials")]
    AnalyticUnavailable,
    #[error("operator produced a non-finite value")]
    NonFinite,
    #[error("field {0} is not declared to satisfy the defect condition")]
    HypothesisNotMet(String),
}

impl From<DomainError> for OperatorError {
    fn from(e: DomainError) -> Self {
        OperatorError::Field(e.into())
    }
}

impl From<OperatorError> for FieldError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::Field(f) => f,
            OperatorError::AnalyticUnavailable => FieldError::NoAnalyticPartials("operator".into()),
            OperatorError::NonFinite => FieldError::NonFinite,
            OperatorError::HypothesisNotMet(n) => FieldError::Unsupported(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Analytic,
    Fd2,
    Fd4,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Analytic => "analytic",
            Backend::Fd2 => "fd2",
            Backend::Fd4 => "fd4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(Backend::Analytic),
            "fd2" => Some(Backend::Fd2),
            "fd4" => Some(Backend::Fd4),
            _ => None,
        }
    }
}

/// Step of the outer stencil used for third-order quantities. The outer
/// stencil is fourth order with Richardson extrapolation (sixth order): at
/// `1e-2` a plain fourth-order stencil leaves ~1e-2 truncation error on the
/// larger product fields.
pub const OUTER_STEP: f64 = 3e-3;
/// Default inner step for differencing analytic first partials.
pub const ANALYTIC_INNER_STEP: f64 = 2e-3;
/// Default step of the second-order stencil backend.
pub const FD2_STEP: f64 = 1e-3;
/// Default step of the fourth-order stencil backend.
pub const FD4_STEP: f64 = 2e-3;

/// How derivatives are obtained.
///
/// * `Analytic`: first partials come from the field; `h` is the step used
///   to difference them when second derivatives are needed (fourth-order
///   stencil, always with Richardson, so sixth order).
/// * `Fd2` / `Fd4`: central stencils of nominal order 2 / 4 on field values
///   in `(t, r, α, β)`, step `h`.
///
/// `richardson` combines steps `h` and `h/2` to raise the order by two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEngine<T> {
    pub backend: Backend,
    pub h: T,
    pub richardson: bool,
}

impl<T: Scalar> DerivativeEngine<T> {
    pub fn analytic() -> Self {
        Self::new(Backend::Analytic, T::lit(ANALYTIC_INNER_STEP))
    }

    pub fn fd2() -> Self {
        Self::new(Backend::Fd2, T::lit(FD2_STEP))
    }

    pub fn fd4() -> Self {
        Self::new(Backend::Fd4, T::lit(FD4_STEP))
    }

    /// Engine applied on top of an inner second-order quantity.
    pub fn outer() -> Self {
        Self::new(Backend::Fd4, T::lit(OUTER_STEP)).with_richardson(true)
    }

    pub fn new(backend: Backend, h: T) -> Self {
        Self {
            backend,
            h,
            richardson: false,
        }
    }

    /// Backend with its default step.
    pub fn for_backend(backend: Backend) -> Self {
        match backend {
            Backend::Analytic => Self::analytic(),
            Backend::Fd2 => Self::fd2(),
            Backend::Fd4 => Self::fd4(),
        }
    }

    pub fn with_h(mut self, h: T) -> Self {
        self.h = h;
        self
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    /// Stable short name, e.g. `fd4` or `fd2+richardson`.
    pub fn descriptor(&self) -> String {
        if self.richardson && self.backend != Backend::Analytic {
            format!("{}+richardson", self.backend.as_str())
        } else {
            self.backend.as_str().to_string()
        }
    }

    fn extrapolate(&self) -> bool {
        self.richardson || self.backend == Backend::Analytic
    }

    fn stencil(&self) -> StencilOrder {
        match self.backend {
            Backend::Fd2 => StencilOrder::Two,
            Backend::Analytic | Backend::Fd4 => StencilOrder::Four,
        }
    }

    /// First derivative of a one-parameter family at 0.
    fn d1<G>(&self, g: G) -> Result<Quaternion<T>, OperatorError>
    where
        G: Fn(T) -> Result<Quaternion<T>, OperatorError>,
    {
        let order = self.stencil();
        if self.extrapolate() {
            stencil::richardson(|h| stencil::first(&g, h, order), self.h, order.order())
        } else {
            stencil::first(&g, self.h, order)
        }
    }

    /// Pure second derivative of a one-parameter family at 0.
    fn d2<G>(&self, g: G, g0: Quaternion<T>) -> Result<Quaternion<T>, OperatorError>
    where
        G: Fn(T) -> Result<Quaternion<T>, OperatorError>,
    {
        let order = self.stencil();
        if self.extrapolate() {
            stencil::richardson(|h| stencil::second(&g, g0, h, order), self.h, order.order())
        } else {
            stencil::second(&g, g0, self.h, order)
        }
    }
}

fn finite<T: Scalar>(q: Quaternion<T>) -> Result<Quaternion<T>, OperatorError> {
    if q.is_finite() {
        Ok(q)
    } else {
        Err(OperatorError::NonFinite)
    }
}

fn analytic_partials<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
) -> Result<[Quaternion<T>; 4], OperatorError> {
    if !f.has_partials() {
        return Err(OperatorError::AnalyticUnavailable);
    }
    Ok(f.partials(p)?)
}

/// `[∂_t, ∂_r, ∂_α, ∂_β] f` at `p`.
pub fn spherical_gradient<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<[Quaternion<T>; 4], OperatorError> {
    if engine.backend == Backend::Analytic {
        return analytic_partials(f, p);
    }
    let mut out = [Quaternion::zero(); 4];
    for c in Coord::ALL {
        out[c as usize] = engine.d1(|d| Ok(f.value(&p.shifted(c, d))?))?;
    }
    Ok(out)
}

/// `[∂_t, ∂_x, ∂_y, ∂_z] f` at `p`.
pub fn cartesian_gradient<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<[Quaternion<T>; 4], OperatorError> {
    let sph = spherical_gradient(f, p, engine)?;
    Ok(p.cartesian_partials(&sph)?)
}

fn units<T: Scalar>() -> [Quaternion<T>; 3] {
    [Quaternion::i(), Quaternion::j(), Quaternion::k()]
}

/// `D_l f = ∂_t f + i ∂_x f + j ∂_y f + k ∂_z f`, units acting from the left.
pub fn fueter_left<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<Quaternion<T>, OperatorError> {
    let g = cartesian_gradient(f, p, engine)?;
    let e = units();
    finite(g[0] + e[0] * g[1] + e[1] * g[2] + e[2] * g[3])
}

/// `D_r f = ∂_t f + (∂_x f) i + (∂_y f) j + (∂_z f) k`, units acting from the right.
pub fn fueter_right<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<Quaternion<T>, OperatorError> {
    let g = cartesian_gradient(f, p, engine)?;
    let e = units();
    finite(g[0] + g[1] * e[0] + g[2] * e[1] + g[3] * e[2])
}

/// `D̄_l f = ∂_t f − i ∂_x f − j ∂_y f − k ∂_z f`.
pub fn fueter_conj_left<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<Quaternion<T>, OperatorError> {
    let g = cartesian_gradient(f, p, engine)?;
    let e = units();
    finite(g[0] - e[0] * g[1] - e[1] * g[2] - e[2] * g[3])
}

/// `D̄_r f = ∂_t f − (∂_x f) i − (∂_y f) j − (∂_z f) k`.
pub fn fueter_conj_right<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<Quaternion<T>, OperatorError> {
    let g = cartesian_gradient(f, p, engine)?;
    let e = units();
    finite(g[0] - g[1] * e[0] - g[2] * e[1] - g[3] * e[2])
}

/// Moves `p` by `d` along Cartesian axis `axis` (0 = t, 1..=3 = x, y, z).
fn cartesian_shift<T: Scalar>(
    p: &SphericalPoint<T>,
    axis: usize,
    d: T,
) -> Result<SphericalPoint<T>, OperatorError> {
    if axis == 0 {
        return Ok(p.shifted(Coord::T, d));
    }
    let mut q = p.to_quaternion();
    match axis {
        1 => q.x = q.x + d,
        2 => q.y = q.y + d,
        _ => q.z = q.z + d,
    }
    Ok(to_spherical(&q)?)
}

/// Four-variable Laplacian `f_tt + f_xx + f_yy + f_zz`.
pub fn laplacian<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<Quaternion<T>, OperatorError> {
    let mut sum = Quaternion::zero();
    if engine.backend == Backend::Analytic {
        if !f.has_partials() {
            return Err(OperatorError::AnalyticUnavailable);
        }
        for axis in 0..4 {
            sum += engine.d1(|d| {
                let q = cartesian_shift(p, axis, d)?;
                let cart = q.cartesian_partials(&f.partials(&q)?)?;
                Ok(cart[axis])
            })?;
        }
    } else {
        let f0 = f.value(p)?;
        for axis in 0..4 {
            sum += engine.d2(|d| Ok(f.value(&cartesian_shift(p, axis, d)?)?), f0)?;
        }
    }
    finite(sum)
}

/// Angular operator `ι_α⁻¹ ∂_α f + ι_β⁻¹ ∂_β f`; frame inverses multiply
/// from the left.
pub fn angular_derivative<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<Quaternion<T>, OperatorError> {
    let frame = frame_at(p.alpha, p.beta)?;
    let g = spherical_gradient(f, p, engine)?;
    finite(frame.angular(g[2], g[3]))
}

/// `∂_a ∂_b f` in spherical coordinates: the analytic `b`-partial
/// differenced along `a`, or pure stencils on values.
pub fn second_partial<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
    a: Coord,
    b: Coord,
    engine: &DerivativeEngine<T>,
) -> Result<Quaternion<T>, OperatorError> {
    if engine.backend == Backend::Analytic {
        if !f.has_partials() {
            return Err(OperatorError::AnalyticUnavailable);
        }
        return engine.d1(|d| Ok(f.partials(&p.shifted(a, d))?[b as usize]));
    }
    if a == b {
        let f0 = f.value(p)?;
        engine.d2(|d| Ok(f.value(&p.shifted(a, d))?), f0)
    } else {
        engine.d1(|da| {
            let q = p.shifted(a, da);
            engine.d1(|db| Ok(f.value(&q.shifted(b, db))?))
        })
    }
}

/// Second application of the angular operator, expanded with the closed-form
/// frame derivatives:
///
/// ```text
/// ι_α⁻¹ [ (ι_α⁻¹)_α f_α + ι_α⁻¹ f_αα + (ι_β⁻¹)_α f_β + ι_β⁻¹ f_αβ ]
/// + ι_β⁻¹ [ (ι_α⁻¹)_β f_α + ι_α⁻¹ f_βα + (ι_β⁻¹)_β f_β + ι_β⁻¹ f_ββ ]
/// ```
///
/// `f_αβ = ∂_α(f_β)` and `f_βα = ∂_β(f_α)` are computed separately, so any
/// cancellation between the mixed terms happens numerically.
pub fn angular_second<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<Quaternion<T>, OperatorError> {
    let frame = frame_at(p.alpha, p.beta)?;
    let dd = frame.inverse_derivatives();
    let g = spherical_gradient(f, p, engine)?;
    let (fa, fb) = (g[2], g[3]);
    let faa = second_partial(f, p, Coord::Alpha, Coord::Alpha, engine)?;
    let fab = second_partial(f, p, Coord::Alpha, Coord::Beta, engine)?;
    let fba = second_partial(f, p, Coord::Beta, Coord::Alpha, engine)?;
    let fbb = second_partial(f, p, Coord::Beta, Coord::Beta, engine)?;
    let (ia, ib) = (frame.inv_iota_alpha, frame.inv_iota_beta);
    let along_alpha = dd.inv_alpha_d_alpha * fa + ia * faa + dd.inv_beta_d_alpha * fb + ib * fab;
    let along_beta = dd.inv_alpha_d_beta * fa + ia * fba + dd.inv_beta_d_beta * fb + ib * fbb;
    finite(ia * along_alpha + ib * along_beta)
}

/// `(∂_t + ι ∂_r) f − (1/r) (ι_α⁻¹ ∂_α + ι_β⁻¹ ∂_β) f`.
pub fn fueter_left_spherical<T: Scalar, F: QuaternionField<T> + ?Sized>(
    f: &F,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<Quaternion<T>, OperatorError> {
    let frame = frame_at(p.alpha, p.beta)?;
    let g = spherical_gradient(f, p, engine)?;
    let angular = frame.angular(g[2], g[3]);
    finite(g[0] + frame.iota * g[1] - angular / p.r)
}

/// Laplacian of a field satisfying `D_l f = −2v/r` from first derivatives
/// only:
///
/// ```text
/// Δf = −2 [ −(ι/r) ∂_t f + (ι/r²) v + (1/r²) (ι_α⁻¹ v_α + ι_β⁻¹ v_β) ]
/// ```
///
/// Refuses fields not declared to satisfy the condition, for which the
/// formula does not give the Laplacian.
pub fn laplacian_via_dbar<T: Scalar>(
    f: &StructuredField<T>,
    p: &SphericalPoint<T>,
) -> Result<Quaternion<T>, OperatorError> {
    if !f.satisfies_condition() {
        return Err(OperatorError::HypothesisNotMet(f.name().to_string()));
    }
    laplacian_via_dbar_unchecked(f, p)
}

/// [`laplacian_via_dbar`] without the hypothesis guard.
pub fn laplacian_via_dbar_unchecked<T: Scalar>(
    f: &StructuredField<T>,
    p: &SphericalPoint<T>,
) -> Result<Quaternion<T>, OperatorError> {
    laplacian_via_dbar_with(f, p, &DerivativeEngine::analytic())
}

/// The same formula with first derivatives taken by `engine`. No
/// hypothesis guard.
pub fn laplacian_via_dbar_with<T: Scalar>(
    f: &StructuredField<T>,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<Quaternion<T>, OperatorError> {
    let frame = frame_at(p.alpha, p.beta)?;
    let v = f.v().eval(p)?;
    let f_t = spherical_gradient(f, p, engine)?[0];
    let dv = spherical_gradient(f.v(), p, engine)?;
    let r = p.r;
    let iota = frame.iota;
    let angular_v = frame.angular(dv[2], dv[3]);
    let inner = -(iota * f_t) / r + iota.scale(v / (r * r)) + angular_v / (r * r);
    finite(inner.scale(T::lit(-2.0)))
}

/// Operators addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    FueterLeft,
    FueterRight,
    FueterConjLeft,
    FueterConjRight,
    Laplacian,
    Angular,
    FueterLeftSpherical,
}

/// An operator value together with where and how it was computed.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorValue<T> {
    pub value: Quaternion<T>,
    pub point: SphericalPoint<T>,
    pub engine: String,
}

pub fn evaluate<T: Scalar, F: QuaternionField<T> + ?Sized>(
    op: Operator,
    f: &F,
    p: &SphericalPoint<T>,
    engine: &DerivativeEngine<T>,
) -> Result<OperatorValue<T>, OperatorError> {
    let value = match op {
        Operator::FueterLeft => fueter_left(f, p, engine),
        Operator::FueterRight => fueter_right(f, p, engine),
        Operator::FueterConjLeft => fueter_conj_left(f, p, engine),
        Operator::FueterConjRight => fueter_conj_right(f, p, engine),
        Operator::Laplacian => laplacian(f, p, engine),
        Operator::Angular => angular_derivative(f, p, engine),
        Operator::FueterLeftSpherical => fueter_left_spherical(f, p, engine),
    }?;
    Ok(OperatorValue {
        value,
        point: *p,
        engine: engine.descriptor(),
    })
}

/// The field `p ↦ op(f)(p)`, without analytic partials; feed it to another
/// operator with an FD engine to compose.
pub struct OperatorField<'a, T, F: ?Sized> {
    op: Operator,
    inner: &'a F,
    engine: DerivativeEngine<T>,
}

impl<'a, T: Scalar, F: QuaternionField<T> + ?Sized> OperatorField<'a, T, F> {
    pub fn new(op: Operator, inner: &'a F, engine: DerivativeEngine<T>) -> Self {
        Self { op, inner, engine }
    }
}

impl<T: Scalar, F: QuaternionField<T> + ?Sized> QuaternionField<T> for OperatorField<'_, T, F> {
    fn value(&self, p: &SphericalPoint<T>) -> Result<Quaternion<T>, FieldError> {
        Ok(evaluate(self.op, self.inner, p, &self.engine)?.value)
    }
}

/// `p ↦ Δf(p)` by the first-derivative formula of [`laplacian_via_dbar`],
/// derivatives taken by `engine`. Meaningful only for fields satisfying the
/// defect condition; construction refuses the others.
pub struct DbarLaplacianField<'a, T: Scalar> {
    inner: &'a StructuredField<T>,
    engine: DerivativeEngine<T>,
}

impl<'a, T: Scalar> DbarLaplacianField<'a, T> {
    pub fn new(inner: &'a StructuredField<T>, engine: DerivativeEngine<T>) -> Result<Self, OperatorError> {
        if !inner.satisfies_condition() {
            return Err(OperatorError::HypothesisNotMet(inner.name().to_string()));
        }
        Ok(Self { inner, engine })
    }
}

impl<T: Scalar> QuaternionField<T> for DbarLaplacianField<'_, T> {
    fn value(&self, p: &SphericalPoint<T>) -> Result<Quaternion<T>, FieldError> {
        Ok(laplacian_via_dbar_with(self.inner, p, &self.engine)?)
    }
}
