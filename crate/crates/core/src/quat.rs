//! Quaternion algebra, the `(t, r, α, β)` parametrization of quaternions and the
//! moving frame `ι, ι_α, ι_β` on the unit sphere of pure imaginary quaternions.
//!
//! Multiplication follows the right-handed Hamilton table `ij = k`, `jk = i`,
//! `ki = j`, `i² = j² = k² = −1`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// `|sin β|` below this value marks a pole of the parametrization.
pub const POLE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DomainError {
    #[error("zero quaternion has no inverse")]
    ZeroQuaternion,
    #[error("imaginary unit of the zero vector is undefined")]
    ZeroVector,
    #[error("spherical coordinates undefined on the real axis (r = 0)")]
    RealAxis,
    #[error("frame is degenerate at the pole (beta = {beta})")]
    DegenerateFrame { beta: f64 },
}

/// `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Quaternion<T> {
    #[inline]
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::from_real(T::zero())
    }

    #[inline]
    pub fn one() -> Self {
        Self::from_real(T::one())
    }

    #[inline]
    pub fn i() -> Self {
        Self::pure(T::one(), T::zero(), T::zero())
    }

    #[inline]
    pub fn j() -> Self {
        Self::pure(T::zero(), T::one(), T::zero())
    }

    #[inline]
    pub fn k() -> Self {
        Self::pure(T::zero(), T::zero(), T::one())
    }

    #[inline]
    pub fn from_real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn pure(x: T, y: T, z: T) -> Self {
        Self::new(T::zero(), x, y, z)
    }

    /// Imaginary part as a triple.
    #[inline]
    pub fn vector(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn conj(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(&self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Euclidean norm, computed without intermediate overflow.
    #[inline]
    pub fn norm(&self) -> T {
        self.w.hypot(self.x).hypot(self.y.hypot(self.z))
    }

    /// `conj(q) / |q|²`.
    pub fn inv(&self) -> Result<Self, DomainError> {
        let n2 = self.norm_sqr();
        if n2 == T::zero() {
            return Err(DomainError::ZeroQuaternion);
        }
        Ok(self.conj() / n2)
    }

    #[inline]
    pub fn scale(&self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Integer power by repeated Hamilton products.
    pub fn powu(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc * *self)
    }

    /// `a b − b a`.
    #[inline]
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl<T: Scalar> Add for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Quaternion<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> SubAssign for Quaternion<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> Neg for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl<T: Scalar> Mul for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl<T: Scalar> Mul<T> for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Scalar> Div<T> for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl<T: Scalar> std::iter::Sum for Quaternion<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<T: Scalar> fmt::Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i + {}j + {}k", self.w, self.x, self.y, self.z)
    }
}

/// Hamilton product as a free function.
#[inline]
pub fn q_mul<T: Scalar>(a: Quaternion<T>, b: Quaternion<T>) -> Quaternion<T> {
    a * b
}

#[inline]
pub fn q_inv<T: Scalar>(a: Quaternion<T>) -> Result<Quaternion<T>, DomainError> {
    a.inv()
}

/// Radial imaginary unit `(x i + y j + z k) / sqrt(x² + y² + z²)`.
pub fn iota_from_cartesian<T: Scalar>(x: T, y: T, z: T) -> Result<Quaternion<T>, DomainError> {
    let r = x.hypot(y).hypot(z);
    if r == T::zero() {
        return Err(DomainError::ZeroVector);
    }
    Ok(Quaternion::pure(x / r, y / r, z / r))
}

/// Point `t + r ι(α, β)` with `ι = (cos α sin β, sin α sin β, cos β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalPoint<T> {
    pub t: T,
    pub r: T,
    pub alpha: T,
    pub beta: T,
}

/// Coordinate index into `[t, r, α, β]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coord {
    T = 0,
    R = 1,
    Alpha = 2,
    Beta = 3,
}

impl Coord {
    pub const ALL: [Coord; 4] = [Coord::T, Coord::R, Coord::Alpha, Coord::Beta];
}

impl<T: Scalar> SphericalPoint<T> {
    pub fn new(t: T, r: T, alpha: T, beta: T) -> Self {
        Self { t, r, alpha, beta }
    }

    /// True on the poles `sin β = 0`, where the frame is refused.
    pub fn is_degenerate(&self) -> bool {
        self.beta.sin().abs() < T::lit(POLE_THRESHOLD)
    }

    pub fn to_quaternion(&self) -> Quaternion<T> {
        from_spherical(self)
    }

    /// `ι` at this point's angles.
    pub fn iota(&self) -> Quaternion<T> {
        iota_at(self.alpha, self.beta)
    }

    pub fn coord(&self, c: Coord) -> T {
        match c {
            Coord::T => self.t,
            Coord::R => self.r,
            Coord::Alpha => self.alpha,
            Coord::Beta => self.beta,
        }
    }

    /// Copy of the point with one coordinate moved by `delta`.
    pub fn shifted(&self, c: Coord, delta: T) -> Self {
        let mut p = *self;
        match c {
            Coord::T => p.t = p.t + delta,
            Coord::R => p.r = p.r + delta,
            Coord::Alpha => p.alpha = p.alpha + delta,
            Coord::Beta => p.beta = p.beta + delta,
        }
        p
    }

    /// Converts spherical partials `[∂_t, ∂_r, ∂_α, ∂_β]` into Cartesian
    /// partials `[∂_t, ∂_x, ∂_y, ∂_z]` through the exact inverse Jacobian:
    ///
    /// ```text
    /// ∂_{x_m} = ι_m ∂_r + (ι_α)_m / (r sin²β) ∂_α + (ι_β)_m / r ∂_β
    /// ```
    pub fn cartesian_partials(
        &self,
        sph: &[Quaternion<T>; 4],
    ) -> Result<[Quaternion<T>; 4], DomainError> {
        if self.r <= T::zero() {
            return Err(DomainError::RealAxis);
        }
        if self.is_degenerate() {
            return Err(DomainError::DegenerateFrame {
                beta: self.beta.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        let r = self.r;
        let iota = [ca * sb, sa * sb, cb];
        let iota_a = [-sa * sb, ca * sb, T::zero()];
        let iota_b = [ca * cb, sa * cb, -sb];
        let ka = T::one() / (r * sb * sb);
        let kb = T::one() / r;
        let mut out = [sph[0]; 4];
        for m in 0..3 {
            out[m + 1] = sph[1] * iota[m] + sph[2] * (iota_a[m] * ka) + sph[3] * (iota_b[m] * kb);
        }
        Ok(out)
    }

    /// Inverse of [`cartesian_partials`](Self::cartesian_partials):
    /// `∂_r = ι·∇`, `∂_α = r ι_α·∇`, `∂_β = r ι_β·∇`.
    pub fn spherical_partials(&self, cart: &[Quaternion<T>; 4]) -> [Quaternion<T>; 4] {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        let r = self.r;
        let dot = |v: [T; 3]| cart[1] * v[0] + cart[2] * v[1] + cart[3] * v[2];
        [
            cart[0],
            dot([ca * sb, sa * sb, cb]),
            dot([-sa * sb, ca * sb, T::zero()]) * r,
            dot([ca * cb, sa * cb, -sb]) * r,
        ]
    }
}

/// Spherical coordinates of `q`. Angles: `α ∈ [0, 2π)`, `β ∈ [0, π]`.
/// On the poles (`x = y = 0`) `α` is set to 0; check
/// [`SphericalPoint::is_degenerate`] before building a frame there.
pub fn to_spherical<T: Scalar>(q: &Quaternion<T>) -> Result<SphericalPoint<T>, DomainError> {
    let r = q.x.hypot(q.y).hypot(q.z);
    if r == T::zero() {
        return Err(DomainError::RealAxis);
    }
    let rho = q.x.hypot(q.y);
    let beta = rho.atan2(q.z);
    let alpha = if rho == T::zero() {
        T::zero()
    } else {
        let a = q.y.atan2(q.x);
        if a < T::zero() {
            a + T::TAU()
        } else {
            a
        }
    };
    Ok(SphericalPoint {
        t: q.w,
        r,
        alpha,
        beta,
    })
}

pub fn from_spherical<T: Scalar>(sp: &SphericalPoint<T>) -> Quaternion<T> {
    Quaternion::from_real(sp.t) + sp.iota().scale(sp.r)
}

/// `ι(α, β)`; defined everywhere, including the poles.
pub fn iota_at<T: Scalar>(alpha: T, beta: T) -> Quaternion<T> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    Quaternion::pure(ca * sb, sa * sb, cb)
}

/// The moving frame at `(α, β)` together with the quaternionic inverses of
/// the tangent vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame<T> {
    pub alpha: T,
    pub beta: T,
    pub iota: Quaternion<T>,
    pub iota_alpha: Quaternion<T>,
    pub iota_beta: Quaternion<T>,
    pub inv_iota_alpha: Quaternion<T>,
    pub inv_iota_beta: Quaternion<T>,
}

/// Closed-form angular derivatives of the inverse tangent vectors.
///
/// From `ι_α⁻¹ = −ι_α / sin²β` and `ι_β⁻¹ = −ι_β`:
///
/// ```text
/// (ι_α⁻¹)_α = −ι_αα / sin²β
/// (ι_α⁻¹)_β = −ι_αβ / sin²β + 2 cos β ι_α / sin³β
/// (ι_β⁻¹)_α = −ι_βα
/// (ι_β⁻¹)_β = −ι_ββ = ι
/// ```
///
/// with `ι_αα = (−cos α sin β, −sin α sin β, 0)`,
/// `ι_αβ = ι_βα = (−sin α cos β, cos α cos β, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseFrameDerivatives<T> {
    pub inv_alpha_d_alpha: Quaternion<T>,
    pub inv_alpha_d_beta: Quaternion<T>,
    pub inv_beta_d_alpha: Quaternion<T>,
    pub inv_beta_d_beta: Quaternion<T>,
}

/// Builds the frame at `(α, β)`. Fails with [`DomainError::DegenerateFrame`]
/// when `|sin β| < 1e-12`.
pub fn frame_at<T: Scalar>(alpha: T, beta: T) -> Result<Frame<T>, DomainError> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    if sb.abs() < T::lit(POLE_THRESHOLD) {
        return Err(DomainError::DegenerateFrame {
            beta: beta.to_f64().unwrap_or(f64::NAN),
        });
    }
    let iota = Quaternion::pure(ca * sb, sa * sb, cb);
    let iota_alpha = Quaternion::pure(-sa * sb, ca * sb, T::zero());
    let iota_beta = Quaternion::pure(ca * cb, sa * cb, -sb);
    Ok(Frame {
        alpha,
        beta,
        iota,
        iota_alpha,
        iota_beta,
        inv_iota_alpha: iota_alpha.inv()?,
        inv_iota_beta: iota_beta.inv()?,
    })
}

impl<T: Scalar> Frame<T> {
    pub fn inverse_derivatives(&self) -> InverseFrameDerivatives<T> {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        let sb2 = sb * sb;
        let iota_aa = Quaternion::pure(-ca * sb, -sa * sb, T::zero());
        let iota_ab = Quaternion::pure(-sa * cb, ca * cb, T::zero());
        let two = T::lit(2.0);
        InverseFrameDerivatives {
            inv_alpha_d_alpha: -iota_aa / sb2,
            inv_alpha_d_beta: -iota_ab / sb2 + self.iota_alpha * (two * cb / (sb2 * sb)),
            inv_beta_d_alpha: -iota_ab,
            inv_beta_d_beta: self.iota,
        }
    }

    /// Left angular operator applied to given angular partials:
    /// `ι_α⁻¹ ∂_α f + ι_β⁻¹ ∂_β f`.
    #[inline]
    pub fn angular(&self, d_alpha: Quaternion<T>, d_beta: Quaternion<T>) -> Quaternion<T> {
        self.inv_iota_alpha * d_alpha + self.inv_iota_beta * d_beta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    type Q = Quaternion<f64>;

    fn close(a: Q, b: Q, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn unit_table() {
        assert_eq!(Q::i() * Q::j(), Q::k());
        assert_eq!(Q::j() * Q::k(), Q::i());
        assert_eq!(Q::k() * Q::i(), Q::j());
        assert_eq!(Q::j() * Q::i(), -Q::k());
        for u in [Q::i(), Q::j(), Q::k()] {
            assert_eq!(u * u, -Q::one());
        }
    }

    #[test]
    fn distributive_example() {
        let a = Q::new(1.0, 1.0, 0.0, 0.0);
        let b = Q::new(1.0, 0.0, 1.0, 0.0);
        assert_eq!(a * b, Q::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn inverse_examples() {
        let q = Q::new(2.0, 1.0, 0.0, -3.0);
        assert!(close(q * q.inv().unwrap(), Q::one(), 1e-15));
        assert_eq!(Q::i().inv().unwrap(), -Q::i());
        assert_eq!(Q::from_real(2.0).inv().unwrap(), Q::from_real(0.5));
        let q = Q::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(q.inv().unwrap(), Q::new(0.25, -0.25, -0.25, -0.25));
        assert_eq!(Q::zero().inv(), Err(DomainError::ZeroQuaternion));
    }

    #[test]
    fn iota_examples() {
        assert_eq!(iota_from_cartesian(1.0, 0.0, 0.0).unwrap(), Q::i());
        let q = iota_from_cartesian(0.0, 3.0, 4.0).unwrap();
        assert!(close(q, Q::pure(0.0, 0.6, 0.8), 1e-16));
        assert!(close(q * q, -Q::one(), 1e-15));
        assert_eq!(
            iota_from_cartesian(0.0, 0.0, 0.0),
            Err(DomainError::ZeroVector)
        );
    }

    #[test]
    fn spherical_examples() {
        let sp = to_spherical(&Q::new(1.0, 2.0, 0.0, 0.0)).unwrap();
        assert_eq!((sp.t, sp.r, sp.alpha), (1.0, 2.0, 0.0));
        assert!((sp.beta - FRAC_PI_2).abs() < 1e-15);
        assert!(!sp.is_degenerate());

        let q = from_spherical(&SphericalPoint::new(0.0, 1.0, FRAC_PI_2, FRAC_PI_2));
        assert!(close(q, Q::j(), 1e-15));

        let sp = to_spherical(&Q::new(3.0, 0.0, 0.0, 4.0)).unwrap();
        assert_eq!((sp.t, sp.r, sp.alpha, sp.beta), (3.0, 4.0, 0.0, 0.0));
        assert!(sp.is_degenerate());

        assert_eq!(to_spherical(&Q::from_real(5.0)), Err(DomainError::RealAxis));
    }

    #[test]
    fn frame_axis_examples() {
        let f = frame_at(0.0, FRAC_PI_2).unwrap();
        assert!(close(f.iota, Q::i(), 1e-15));
        assert!(close(f.iota_alpha, Q::j(), 1e-15));
        assert!(close(f.iota_beta, -Q::k(), 1e-15));
        assert!(close(f.inv_iota_alpha, -Q::j(), 1e-15));
        assert!(close(f.inv_iota_beta, Q::k(), 1e-15));

        let f = frame_at(FRAC_PI_2, FRAC_PI_2).unwrap();
        assert!(close(f.iota, Q::j(), 1e-15));
        assert!(close(f.iota_alpha, -Q::i(), 1e-15));
    }

    #[test]
    fn frame_refused_at_poles() {
        assert!(matches!(
            frame_at(0.3, 0.0),
            Err(DomainError::DegenerateFrame { .. })
        ));
        assert!(matches!(
            frame_at(0.3, PI),
            Err(DomainError::DegenerateFrame { .. })
        ));
    }

    #[test]
    fn frame_pointwise_identities() {
        let f = frame_at(0.7, 1.1).unwrap();
        assert!(close(f.iota * f.iota, -Q::one(), 1e-15));
        assert!(close(f.inv_iota_beta * f.inv_iota_beta, -Q::one(), 1e-14));
        let s2 = 1.1f64.sin().powi(2);
        assert!(close(
            f.inv_iota_alpha * f.inv_iota_alpha,
            Q::from_real(-1.0 / s2),
            1e-14
        ));
        assert!(close(
            f.iota_alpha * f.iota_beta + f.iota_beta * f.iota_alpha,
            Q::zero(),
            1e-15
        ));
    }

    #[test]
    fn jacobian_round_trip() {
        let p = SphericalPoint::new(0.3, 1.7, 2.2, 0.9);
        let sph = [
            Q::new(1.0, 2.0, 3.0, 4.0),
            Q::new(-1.0, 0.5, 0.0, 2.0),
            Q::new(0.1, 0.2, 0.3, 0.4),
            Q::new(3.0, -2.0, 1.0, 0.0),
        ];
        let cart = p.cartesian_partials(&sph).unwrap();
        let back = p.spherical_partials(&cart);
        for (a, b) in sph.iter().zip(back.iter()) {
            assert!(close(*a, *b, 1e-13));
        }
    }

    #[test]
    fn works_in_single_precision() {
        let a = Quaternion::<f32>::new(1.0, 2.0, -0.5, 0.25);
        let prod = a * a.inv().unwrap();
        assert!((prod - Quaternion::one()).norm() < 1e-6);
        let f = frame_at(0.7f32, 1.1f32).unwrap();
        assert!((f.iota * f.iota + Quaternion::one()).norm() < 1e-6);
    }
}
