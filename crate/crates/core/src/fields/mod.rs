//! Test fields `f = u + ι v` built from holomorphic seeds, non-axial product
//! fields, negative controls and auxiliary fixtures.
//!
//! Every scalar field exposes analytic first partials in `(t, r, α, β)`.
//! Higher derivatives are left to the operators module.

mod angular;
mod fixtures;
mod seed;

use std::sync::Arc;

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::quat::{Coord, DomainError, Quaternion, SphericalPoint};
use crate::scalar::Scalar;

pub use angular::{mercator_pair, AngularPair};
pub use fixtures::{
    negative_controls, CartesianField, CartesianScalar, IotaTimes, RadialQuotient,
    RandomQuaternionField, TrigPolynomial, TrigTerm,
};
pub use seed::{seed_catalog, ComplexSeed, SeedKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("seed {seed} is singular at {re}{im:+}i")]
    Pole { seed: String, re: f64, im: f64 },
    #[error("field {0} exposes no analytic partials")]
    NoAnalyticPartials(String),
    #[error("field {0} has no t-derivative construction")]
    NoTDerivative(String),
    #[error("non-finite value")]
    NonFinite,
    #[error("{0}")]
    Unsupported(String),
}

/// Value and analytic gradient `[∂_t, ∂_r, ∂_α, ∂_β]` of a real field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarJet<T> {
    pub value: T,
    pub grad: [T; 4],
}

impl<T: Scalar> ScalarJet<T> {
    pub fn constant(value: T) -> Self {
        Self {
            value,
            grad: [T::zero(); 4],
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut grad = [T::zero(); 4];
        for (g, (a, b)) in grad.iter_mut().zip(self.grad.iter().zip(o.grad.iter())) {
            *g = *a * o.value + self.value * *b;
        }
        Self {
            value: self.value * o.value,
            grad,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut grad = self.grad;
        for (g, b) in grad.iter_mut().zip(o.grad.iter()) {
            *g = *g - *b;
        }
        Self {
            value: self.value - o.value,
            grad,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut grad = self.grad;
        for (g, b) in grad.iter_mut().zip(o.grad.iter()) {
            *g = *g + *b;
        }
        Self {
            value: self.value + o.value,
            grad,
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            value: self.value * s,
            grad: self.grad.map(|g| g * s),
        }
    }

    /// Cube via the chain rule.
    pub fn cube(&self) -> Self {
        let three_sq = T::lit(3.0) * self.value * self.value;
        Self {
            value: self.value * self.value * self.value,
            grad: self.grad.map(|g| g * three_sq),
        }
    }
}

/// Real-valued field on `(t, r, α, β)` with analytic first partials.
pub trait ScalarField<T: Scalar>: Send + Sync {
    fn jet(&self, p: &SphericalPoint<T>) -> Result<ScalarJet<T>, FieldError>;

    fn eval(&self, p: &SphericalPoint<T>) -> Result<T, FieldError> {
        Ok(self.jet(p)?.value)
    }

    fn partial(&self, p: &SphericalPoint<T>, var: Coord) -> Result<T, FieldError> {
        Ok(self.jet(p)?.grad[var as usize])
    }
}

impl<T: Scalar, S: ScalarField<T> + ?Sized> ScalarField<T> for Arc<S> {
    fn jet(&self, p: &SphericalPoint<T>) -> Result<ScalarJet<T>, FieldError> {
        (**self).jet(p)
    }
}

/// Quaternion-valued field. Partials, when available, are with respect to
/// `[t, r, α, β]`.
pub trait QuaternionField<T: Scalar>: Send + Sync {
    fn value(&self, p: &SphericalPoint<T>) -> Result<Quaternion<T>, FieldError>;

    fn has_partials(&self) -> bool {
        false
    }

    fn partials(&self, _p: &SphericalPoint<T>) -> Result<[Quaternion<T>; 4], FieldError> {
        Err(FieldError::NoAnalyticPartials("anonymous field".into()))
    }
}

/// Real fields embed as quaternion fields with zero imaginary part.
///
/// Implemented per type rather than as a blanket impl, which would collide
/// with the quaternion-valued fixtures.
macro_rules! real_quaternion_field {
    ($(impl[$($g:tt)*] for $ty:ty;)*) => {$(
        impl<$($g)*> $crate::fields::QuaternionField<T> for $ty {
            fn value(
                &self,
                p: &$crate::quat::SphericalPoint<T>,
            ) -> Result<$crate::quat::Quaternion<T>, $crate::fields::FieldError> {
                Ok($crate::quat::Quaternion::from_real(
                    $crate::fields::ScalarField::eval(self, p)?,
                ))
            }

            fn has_partials(&self) -> bool {
                true
            }

            fn partials(
                &self,
                p: &$crate::quat::SphericalPoint<T>,
            ) -> Result<[$crate::quat::Quaternion<T>; 4], $crate::fields::FieldError> {
                Ok($crate::fields::ScalarField::jet(self, p)?
                    .grad
                    .map($crate::quat::Quaternion::from_real))
            }
        }
    )*};
}
pub(crate) use real_quaternion_field;

real_quaternion_field! {
    impl[T: Scalar] for dyn ScalarField<T>;
    impl[T: Scalar] for Arc<dyn ScalarField<T>>;
    impl[T: Scalar] for FnScalar<T>;
}

/// Scalar field defined by a plain function of the point.
#[derive(Clone, Copy)]
pub struct FnScalar<T> {
    f: fn(&SphericalPoint<T>) -> ScalarJet<T>,
}

impl<T: Scalar> FnScalar<T> {
    pub fn new(f: fn(&SphericalPoint<T>) -> ScalarJet<T>) -> Self {
        Self { f }
    }
}

impl<T: Scalar> ScalarField<T> for FnScalar<T> {
    fn jet(&self, p: &SphericalPoint<T>) -> Result<ScalarJet<T>, FieldError> {
        Ok((self.f)(p))
    }
}

fn zero_jet<T: Scalar>(_: &SphericalPoint<T>) -> ScalarJet<T> {
    ScalarJet::constant(T::zero())
}

pub(crate) fn zero_scalar<T: Scalar>() -> Arc<dyn ScalarField<T>> {
    Arc::new(FnScalar::new(zero_jet::<T>))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Fueter,
    Product,
    Control,
    /// Derived fields (t-derivatives, Laplacians) built on demand.
    Derived,
}

#[derive(Clone)]
enum Construction<T: Scalar> {
    Fueter(ComplexSeed<T>),
    Product(ComplexSeed<T>, AngularPair<T>),
    Custom {
        t_derivative: Option<fn() -> StructuredField<T>>,
    },
}

/// `f = u + ι v` with real `u, v`.
#[derive(Clone)]
pub struct StructuredField<T: Scalar> {
    name: String,
    kind: FieldKind,
    u: Arc<dyn ScalarField<T>>,
    v: Arc<dyn ScalarField<T>>,
    singular_loci: String,
    satisfies_condition: bool,
    must_fail: Vec<&'static str>,
    construction: Construction<T>,
}

impl<T: Scalar> std::fmt::Debug for StructuredField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StructuredField")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("satisfies_condition", &self.satisfies_condition)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> StructuredField<T> {
    /// A control or derived field from arbitrary `u, v`.
    pub fn custom(
        name: impl Into<String>,
        kind: FieldKind,
        u: Arc<dyn ScalarField<T>>,
        v: Arc<dyn ScalarField<T>>,
        satisfies_condition: bool,
    ) -> Self {
        Self {
            name: name.into(),
            kind,
            u,
            v,
            singular_loci: "r=0; sin(beta)=0".into(),
            satisfies_condition,
            must_fail: Vec::new(),
            construction: Construction::Custom { t_derivative: None },
        }
    }

    /// Names of checks this field is built to violate.
    pub fn with_must_fail(mut self, checks: &[&'static str]) -> Self {
        self.must_fail = checks.to_vec();
        self
    }

    pub fn with_t_derivative(mut self, build: fn() -> StructuredField<T>) -> Self {
        self.construction = Construction::Custom {
            t_derivative: Some(build),
        };
        self
    }

    pub fn with_singular_loci(mut self, loci: impl Into<String>) -> Self {
        self.singular_loci = loci.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn u(&self) -> &Arc<dyn ScalarField<T>> {
        &self.u
    }

    pub fn v(&self) -> &Arc<dyn ScalarField<T>> {
        &self.v
    }

    pub fn singular_loci(&self) -> &str {
        &self.singular_loci
    }

    pub fn satisfies_condition(&self) -> bool {
        self.satisfies_condition
    }

    pub fn must_fail(&self) -> &[&'static str] {
        &self.must_fail
    }

    /// True when `u, v` depend on `(t, r)` only.
    pub fn is_axial(&self) -> bool {
        matches!(self.construction, Construction::Fueter(_))
    }

    /// The holomorphic seed behind a Fueter-mapped field.
    pub fn fueter_seed(&self) -> Option<&ComplexSeed<T>> {
        match &self.construction {
            Construction::Fueter(s) => Some(s),
            _ => None,
        }
    }

    /// Poles of the seed in the `t + i r` plane.
    pub fn seed_poles(&self) -> Vec<Complex<T>> {
        match &self.construction {
            Construction::Fueter(s) | Construction::Product(s, _) => s.poles(),
            Construction::Custom { .. } => Vec::new(),
        }
    }

    pub fn jets(&self, p: &SphericalPoint<T>) -> Result<(ScalarJet<T>, ScalarJet<T>), FieldError> {
        check_regular_point(p)?;
        Ok((self.u.jet(p)?, self.v.jet(p)?))
    }

    /// `u(p) + ι(p) v(p)`.
    pub fn eval(&self, p: &SphericalPoint<T>) -> Result<Quaternion<T>, FieldError> {
        eval_structured(self, p)
    }

    /// `∂f/∂t` as a field with analytic partials.
    pub fn t_derivative(&self) -> Result<StructuredField<T>, FieldError> {
        let mut field = match &self.construction {
            Construction::Fueter(seed) => fueter_map(seed.differentiated()),
            Construction::Product(seed, pair) => product_field(seed.differentiated(), pair.clone()),
            Construction::Custom {
                t_derivative: Some(build),
            } => build(),
            Construction::Custom { t_derivative: None } => {
                return Err(FieldError::NoTDerivative(self.name.clone()))
            }
        };
        field.name = format!("d/dt {}", self.name);
        field.kind = FieldKind::Derived;
        field.satisfies_condition = self.satisfies_condition;
        Ok(field)
    }
}

fn check_regular_point<T: Scalar>(p: &SphericalPoint<T>) -> Result<(), DomainError> {
    if p.r <= T::zero() {
        return Err(DomainError::RealAxis);
    }
    if p.is_degenerate() {
        return Err(DomainError::DegenerateFrame {
            beta: p.beta.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// `f(p) = u(p) + ι(p) v(p)`; refuses `r = 0` and the poles `sin β = 0`.
pub fn eval_structured<T: Scalar>(
    f: &StructuredField<T>,
    p: &SphericalPoint<T>,
) -> Result<Quaternion<T>, FieldError> {
    check_regular_point(p)?;
    let u = f.u.eval(p)?;
    let v = f.v.eval(p)?;
    Ok(Quaternion::from_real(u) + p.iota() * Quaternion::from_real(v))
}

impl<T: Scalar> QuaternionField<T> for StructuredField<T> {
    fn value(&self, p: &SphericalPoint<T>) -> Result<Quaternion<T>, FieldError> {
        eval_structured(self, p)
    }

    fn has_partials(&self) -> bool {
        true
    }

    fn partials(&self, p: &SphericalPoint<T>) -> Result<[Quaternion<T>; 4], FieldError> {
        let (u, v) = self.jets(p)?;
        let (sa, ca) = p.alpha.sin_cos();
        let (sb, cb) = p.beta.sin_cos();
        let iota = Quaternion::pure(ca * sb, sa * sb, cb);
        let iota_alpha = Quaternion::pure(-sa * sb, ca * sb, T::zero());
        let iota_beta = Quaternion::pure(ca * cb, sa * cb, -sb);
        let re = Quaternion::from_real;
        let g = |c: usize| re(u.grad[c]) + iota * v.grad[c];
        Ok([
            g(0),
            g(1),
            g(2) + iota_alpha * v.value,
            g(3) + iota_beta * v.value,
        ])
    }
}

/// `Re` or `Im` of `seed(t + i r)`.
struct SeedPart<T: Scalar> {
    seed: ComplexSeed<T>,
    imag: bool,
}

impl<T: Scalar> SeedPart<T> {
    /// Jets of `U + iV = seed(t + ir)`; `∂_t = S'`, `∂_r = i S'`.
    fn jets(seed: &ComplexSeed<T>, p: &SphericalPoint<T>) -> Result<[ScalarJet<T>; 2], FieldError> {
        let z = Complex::new(p.t, p.r);
        let s = seed.derivative(z, 0)?;
        let ds = seed.derivative(z, 1)?;
        let zero = T::zero();
        Ok([
            ScalarJet {
                value: s.re,
                grad: [ds.re, -ds.im, zero, zero],
            },
            ScalarJet {
                value: s.im,
                grad: [ds.im, ds.re, zero, zero],
            },
        ])
    }
}

impl<T: Scalar> ScalarField<T> for SeedPart<T> {
    fn jet(&self, p: &SphericalPoint<T>) -> Result<ScalarJet<T>, FieldError> {
        let [u, v] = Self::jets(&self.seed, p)?;
        Ok(if self.imag { v } else { u })
    }
}

fn seed_loci<T: Scalar>(seed: &ComplexSeed<T>) -> String {
    let mut loci = "r=0; sin(beta)=0".to_string();
    if !seed.poles().is_empty() {
        loci.push_str(&format!("; pole of {} at t+ir=0", seed.name()));
    }
    loci
}

/// Axial field `u(t,r) + ι v(t,r)` with `u + iv = seed(t + ir)`.
pub fn fueter_map<T: Scalar>(seed: ComplexSeed<T>) -> StructuredField<T> {
    StructuredField {
        name: format!("fueter:{}", seed.name()),
        kind: FieldKind::Fueter,
        u: Arc::new(SeedPart { seed, imag: false }),
        v: Arc::new(SeedPart { seed, imag: true }),
        singular_loci: seed_loci(&seed),
        satisfies_condition: true,
        must_fail: Vec::new(),
        construction: Construction::Fueter(seed),
    }
}

/// `u + iv = (U + iV)(A + iB)` with `U + iV = seed(t + ir)`.
struct ProductPart<T: Scalar> {
    seed: ComplexSeed<T>,
    pair: AngularPair<T>,
    imag: bool,
}

impl<T: Scalar> ScalarField<T> for ProductPart<T> {
    fn jet(&self, p: &SphericalPoint<T>) -> Result<ScalarJet<T>, FieldError> {
        let [su, sv] = SeedPart::jets(&self.seed, p)?;
        let a = self.pair.a().jet(p)?;
        let b = self.pair.b().jet(p)?;
        Ok(if self.imag {
            su.mul(&b).add(&sv.mul(&a))
        } else {
            su.mul(&a).sub(&sv.mul(&b))
        })
    }
}

/// Non-axial field from a seed and an angular pair. Satisfies the defect
/// condition whenever the pair solves the angular Cauchy–Riemann system.
pub fn product_field<T: Scalar>(seed: ComplexSeed<T>, pair: AngularPair<T>) -> StructuredField<T> {
    let mut loci = seed_loci(&seed);
    if pair.is_mercator() {
        loci.push_str("; mercator variable singular at sin(beta)=0");
    }
    let name = match pair.name().strip_prefix("mercator:") {
        Some(_) => format!("product:{}*{}", seed.name(), pair.name()),
        None => format!("product:{}*({})", seed.name(), pair.name()),
    };
    StructuredField {
        name,
        kind: FieldKind::Product,
        u: Arc::new(ProductPart {
            seed,
            pair: pair.clone(),
            imag: false,
        }),
        v: Arc::new(ProductPart {
            seed,
            pair: pair.clone(),
            imag: true,
        }),
        singular_loci: loci,
        satisfies_condition: pair.is_mercator(),
        must_fail: Vec::new(),
        construction: Construction::Product(seed, pair),
    }
}

/// `Re/Im` of `2/r · (ι f_t) − 2ι v / r²` for an axial seed field, i.e. the
/// Laplacian of the Fueter-mapped seed. Built in closed form from the jet
/// `(S, S', S'')`:
///
/// ```text
/// ũ = −2 Im S' / r
/// ṽ = 2 Re S' / r − 2 Im S / r²
/// ```
struct FueterLaplacianPart<T: Scalar> {
    seed: ComplexSeed<T>,
    imag: bool,
}

impl<T: Scalar> ScalarField<T> for FueterLaplacianPart<T> {
    fn jet(&self, p: &SphericalPoint<T>) -> Result<ScalarJet<T>, FieldError> {
        let z = Complex::new(p.t, p.r);
        let s = self.seed.derivative(z, 0)?;
        let d1 = self.seed.derivative(z, 1)?;
        let d2 = self.seed.derivative(z, 2)?;
        let (r, two, zero) = (p.r, T::lit(2.0), T::zero());
        let (pp, qq, p2, q2, v) = (d1.re, d1.im, d2.re, d2.im, s.im);
        let r2 = r * r;
        Ok(if self.imag {
            ScalarJet {
                value: two * pp / r - two * v / r2,
                grad: [
                    two * p2 / r - two * qq / r2,
                    -two * q2 / r - T::lit(4.0) * pp / r2 + T::lit(4.0) * v / (r2 * r),
                    zero,
                    zero,
                ],
            }
        } else {
            ScalarJet {
                value: -two * qq / r,
                grad: [-two * q2 / r, -two * p2 / r + two * qq / r2, zero, zero],
            }
        })
    }
}

/// Closed-form Laplacian of `fueter_map(seed)`: an axial field that is
/// left-regular.
pub fn fueter_laplacian<T: Scalar>(seed: ComplexSeed<T>) -> StructuredField<T> {
    StructuredField {
        name: format!("laplacian:fueter:{}", seed.name()),
        kind: FieldKind::Derived,
        u: Arc::new(FueterLaplacianPart { seed, imag: false }),
        v: Arc::new(FueterLaplacianPart { seed, imag: true }),
        singular_loci: seed_loci(&seed),
        satisfies_condition: false,
        must_fail: Vec::new(),
        construction: Construction::Custom { t_derivative: None },
    }
}

/// Condition-satisfying fields: Fueter-mapped seeds and Mercator products.
pub fn positive_catalog<T: Scalar>() -> Vec<StructuredField<T>> {
    let mut fields: Vec<_> = seed_catalog().into_iter().map(fueter_map).collect();
    fields.push(product_field(
        ComplexSeed::power(2),
        mercator_pair(ComplexSeed::exp_i(1)),
    ));
    fields.push(product_field(
        ComplexSeed::exp(),
        mercator_pair(ComplexSeed::exp_i(1)),
    ));
    fields.push(product_field(
        ComplexSeed::power(3),
        mercator_pair(ComplexSeed::exp_i(1)),
    ));
    fields
}

/// Positive catalog followed by the negative controls.
pub fn field_catalog<T: Scalar>() -> Vec<StructuredField<T>> {
    let mut fields = positive_catalog();
    fields.extend(negative_controls());
    fields
}

/// One entry of the catalog listing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: FieldKind,
    pub singular_loci: String,
    pub satisfies_condition: bool,
}

pub fn catalog_listing<T: Scalar>(fields: &[StructuredField<T>]) -> Vec<CatalogEntry> {
    fields
        .iter()
        .map(|f| CatalogEntry {
            name: f.name.clone(),
            kind: f.kind,
            singular_loci: f.singular_loci.clone(),
            satisfies_condition: f.satisfies_condition,
        })
        .collect()
}
