//! Central difference stencils on quaternion-valued samples.

use crate::quat::Quaternion;
use crate::scalar::Scalar;

/// Nominal accuracy order of a central stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilOrder {
    Two,
    Four,
}

impl StencilOrder {
    pub fn order(self) -> i32 {
        match self {
            StencilOrder::Two => 2,
            StencilOrder::Four => 4,
        }
    }
}

/// First derivative at 0 of `g`, sampled at multiples of `h`.
pub fn first<T, E, G>(g: &G, h: T, order: StencilOrder) -> Result<Quaternion<T>, E>
where
    T: Scalar,
    G: Fn(T) -> Result<Quaternion<T>, E>,
{
    match order {
        StencilOrder::Two => Ok((g(h)? - g(-h)?) / (T::lit(2.0) * h)),
        StencilOrder::Four => {
            let two_h = T::lit(2.0) * h;
            let num = (g(h)? - g(-h)?).scale(T::lit(8.0)) - (g(two_h)? - g(-two_h)?);
            Ok(num / (T::lit(12.0) * h))
        }
    }
}

/// Second derivative at 0 of `g`; `g0` is the centre sample.
pub fn second<T, E, G>(g: &G, g0: Quaternion<T>, h: T, order: StencilOrder) -> Result<Quaternion<T>, E>
where
    T: Scalar,
    G: Fn(T) -> Result<Quaternion<T>, E>,
{
    match order {
        StencilOrder::Two => Ok((g(h)? + g(-h)? - g0.scale(T::lit(2.0))) / (h * h)),
        StencilOrder::Four => {
            let two_h = T::lit(2.0) * h;
            let num = (g(h)? + g(-h)?).scale(T::lit(16.0))
                - (g(two_h)? + g(-two_h)?)
                - g0.scale(T::lit(30.0));
            Ok(num / (T::lit(12.0) * h * h))
        }
    }
}

/// Richardson combination of estimates at `h` and `h/2` for a method of
/// order `p`: `(2^p D(h/2) − D(h)) / (2^p − 1)`.
pub fn richardson<T, E, D>(estimate: D, h: T, p: i32) -> Result<Quaternion<T>, E>
where
    T: Scalar,
    D: Fn(T) -> Result<Quaternion<T>, E>,
{
    let coarse = estimate(h)?;
    let fine = estimate(h / T::lit(2.0))?;
    let w = T::lit(2f64.powi(p));
    Ok((fine.scale(w) - coarse) / (w - T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Quaternion<f64>;

    fn sin_at(x0: f64) -> impl Fn(f64) -> Result<Q, ()> {
        move |d| Ok(Q::from_real((x0 + d).sin()))
    }

    #[test]
    fn first_derivative_orders() {
        let g = sin_at(0.7);
        let exact = 0.7f64.cos();
        let err = |h: f64, o| (first(&g, h, o).unwrap().w - exact).abs();
        let ratio2 = err(0.1, StencilOrder::Two) / err(0.05, StencilOrder::Two);
        let ratio4 = err(0.1, StencilOrder::Four) / err(0.05, StencilOrder::Four);
        assert!((ratio2.log2() - 2.0).abs() < 0.05, "{ratio2}");
        assert!((ratio4.log2() - 4.0).abs() < 0.1, "{ratio4}");
    }

    #[test]
    fn second_derivative_orders() {
        let g = sin_at(0.7);
        let g0 = Q::from_real(0.7f64.sin());
        let exact = -0.7f64.sin();
        let err = |h: f64, o| (second(&g, g0, h, o).unwrap().w - exact).abs();
        assert!((err(0.1, StencilOrder::Two) / err(0.05, StencilOrder::Two)).log2() > 1.9);
        assert!((err(0.1, StencilOrder::Four) / err(0.05, StencilOrder::Four)).log2() > 3.8);
    }

    #[test]
    fn richardson_lifts_second_order_to_fourth() {
        let g = sin_at(0.3);
        let exact = 0.3f64.cos();
        let est = |h: f64| first(&g, h, StencilOrder::Two);
        let e1 = (richardson(est, 0.1, 2).unwrap().w - exact).abs();
        let e2 = (richardson(est, 0.05, 2).unwrap().w - exact).abs();
        assert!((e1 / e2).log2() > 3.7);
    }

    #[test]
    fn quadratics_are_exact() {
        let g = |d: f64| -> Result<Q, ()> { Ok(Q::new(3.0 * d * d + d, 0.0, d * d, 0.0)) };
        let d1 = first(&g, 0.1, StencilOrder::Two).unwrap();
        assert!((d1 - Q::from_real(1.0)).norm() < 1e-14);
        let d2 = second(&g, Q::zero(), 0.1, StencilOrder::Four).unwrap();
        assert!((d2 - Q::new(6.0, 0.0, 2.0, 0.0)).norm() < 1e-12);
    }
}
