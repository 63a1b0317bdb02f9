use num_complex::Complex;

use super::FieldError;
use crate::scalar::Scalar;

/// Closed-form holomorphic functions used as seeds of the Fueter map and of
/// the Mercator construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedKind<T> {
    /// `z^n`
    Power(u32),
    Exp,
    /// `1/z`
    Recip,
    /// Principal branch of `log z`.
    Log,
    Constant(Complex<T>),
    /// `exp(i n w)`
    ExpI(u32),
}

/// A holomorphic seed, possibly differentiated `shift` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSeed<T> {
    kind: SeedKind<T>,
    shift: u32,
}

impl<T: Scalar> ComplexSeed<T> {
    pub fn new(kind: SeedKind<T>) -> Self {
        Self { kind, shift: 0 }
    }

    pub fn power(n: u32) -> Self {
        Self::new(SeedKind::Power(n))
    }

    pub fn exp() -> Self {
        Self::new(SeedKind::Exp)
    }

    pub fn recip() -> Self {
        Self::new(SeedKind::Recip)
    }

    pub fn log() -> Self {
        Self::new(SeedKind::Log)
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(SeedKind::Constant(c))
    }

    pub fn exp_i(n: u32) -> Self {
        Self::new(SeedKind::ExpI(n))
    }

    pub fn kind(&self) -> SeedKind<T> {
        self.kind
    }

    /// The seed's derivative, as a seed.
    pub fn differentiated(&self) -> Self {
        Self {
            kind: self.kind,
            shift: self.shift + 1,
        }
    }

    pub fn name(&self) -> String {
        let base = match self.kind {
            SeedKind::Power(0) => "1".to_string(),
            SeedKind::Power(1) => "z".to_string(),
            SeedKind::Power(n) => format!("z^{n}"),
            SeedKind::Exp => "exp".to_string(),
            SeedKind::Recip => "1/z".to_string(),
            SeedKind::Log => "log".to_string(),
            SeedKind::Constant(c) => format!("const({}{:+}i)", c.re, c.im),
            SeedKind::ExpI(1) => "exp(iw)".to_string(),
            SeedKind::ExpI(n) => format!("exp({n}iw)"),
        };
        if self.shift == 0 {
            base
        } else {
            format!("({base}){}", "'".repeat(self.shift as usize))
        }
    }

    /// Points where the seed is not holomorphic.
    pub fn poles(&self) -> Vec<Complex<T>> {
        match self.kind {
            SeedKind::Recip | SeedKind::Log => vec![Complex::new(T::zero(), T::zero())],
            _ => Vec::new(),
        }
    }

    /// `k`-th complex derivative at `z`.
    pub fn derivative(&self, z: Complex<T>, k: u32) -> Result<Complex<T>, FieldError> {
        let k = k + self.shift;
        let zero = Complex::new(T::zero(), T::zero());
        let pole = || FieldError::Pole {
            seed: self.name(),
            re: z.re.to_f64().unwrap_or(f64::NAN),
            im: z.im.to_f64().unwrap_or(f64::NAN),
        };
        let value = match self.kind {
            SeedKind::Power(n) => {
                if k > n {
                    zero
                } else {
                    let falling = (n - k + 1..=n).fold(T::one(), |acc, m| acc * T::lit(m as f64));
                    z.powu(n - k) * falling
                }
            }
            SeedKind::Exp => z.exp(),
            SeedKind::Recip => {
                if z == zero {
                    return Err(pole());
                }
                let sign = if k % 2 == 0 { T::one() } else { -T::one() };
                z.powi(-(k as i32) - 1) * (sign * factorial::<T>(k))
            }
            SeedKind::Log => {
                if z == zero {
                    return Err(pole());
                }
                if k == 0 {
                    z.ln()
                } else {
                    let sign = if k % 2 == 1 { T::one() } else { -T::one() };
                    z.powi(-(k as i32)) * (sign * factorial::<T>(k - 1))
                }
            }
            SeedKind::Constant(c) => {
                if k == 0 {
                    c
                } else {
                    zero
                }
            }
            SeedKind::ExpI(n) => {
                let factor = Complex::new(T::zero(), T::lit(n as f64));
                (z * factor).exp() * factor.powu(k)
            }
        };
        Ok(value)
    }

    /// Jet `(f, f', …, f^(order))` at `z`; `order` is at most 3.
    pub fn eval(&self, z: Complex<T>, order: usize) -> Result<Vec<Complex<T>>, FieldError> {
        (0..=order.min(3) as u32)
            .map(|k| self.derivative(z, k))
            .collect()
    }
}

fn factorial<T: Scalar>(k: u32) -> T {
    (1..=k).fold(T::one(), |acc, m| acc * T::lit(m as f64))
}

/// `z, z², z³, exp z, 1/z, log z`.
pub fn seed_catalog<T: Scalar>() -> Vec<ComplexSeed<T>> {
    vec![
        ComplexSeed::power(1),
        ComplexSeed::power(2),
        ComplexSeed::power(3),
        ComplexSeed::exp(),
        ComplexSeed::recip(),
        ComplexSeed::log(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn square_jet() {
        let jet = ComplexSeed::<f64>::power(2).eval(C::new(1.0, 2.0), 2).unwrap();
        assert_eq!(jet, vec![C::new(-3.0, 4.0), C::new(2.0, 4.0), C::new(2.0, 0.0)]);
    }

    #[test]
    fn exp_at_i_pi() {
        let jet = ComplexSeed::<f64>::exp().eval(C::new(0.0, PI), 2).unwrap();
        for v in jet {
            assert!(close(v, C::new(-1.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn recip_and_log_poles() {
        let z = C::new(0.0, 0.0);
        assert!(matches!(
            ComplexSeed::<f64>::recip().eval(z, 0),
            Err(FieldError::Pole { .. })
        ));
        assert!(matches!(
            ComplexSeed::<f64>::log().derivative(z, 2),
            Err(FieldError::Pole { .. })
        ));
    }

    #[test]
    fn closed_form_derivatives() {
        let z = C::new(0.4, 1.3);
        let r = ComplexSeed::<f64>::recip();
        assert!(close(r.derivative(z, 3).unwrap(), -6.0 / z.powi(4), 1e-14));
        let l = ComplexSeed::<f64>::log();
        assert!(close(l.derivative(z, 1).unwrap(), 1.0 / z, 1e-15));
        assert!(close(l.derivative(z, 3).unwrap(), 2.0 / z.powi(3), 1e-14));
        let e = ComplexSeed::<f64>::exp_i(2);
        let w = (C::i() * 2.0 * z).exp();
        assert!(close(e.derivative(z, 2).unwrap(), w * -4.0, 1e-13));
        let p = ComplexSeed::<f64>::power(3);
        assert_eq!(p.derivative(z, 4).unwrap(), C::new(0.0, 0.0));
        assert!(close(p.differentiated().derivative(z, 0).unwrap(), 3.0 * z * z, 1e-14));
    }

    #[test]
    fn jet_matches_central_differences() {
        let z = C::new(0.3, 0.9);
        let h = 1e-5;
        for seed in seed_catalog::<f64>() {
            for k in 0..3 {
                let fd = (seed.derivative(z + h, k).unwrap() - seed.derivative(z - h, k).unwrap())
                    / (2.0 * h);
                let exact = seed.derivative(z, k + 1).unwrap();
                assert!(
                    (fd - exact).norm() < 1e-7 * (1.0 + exact.norm()),
                    "{} order {k}",
                    seed.name()
                );
            }
        }
    }

    #[test]
    fn names() {
        let names: Vec<String> = seed_catalog::<f64>().iter().map(|s| s.name()).collect();
        assert_eq!(names, ["z", "z^2", "z^3", "exp", "1/z", "log"]);
        assert_eq!(ComplexSeed::<f64>::power(3).differentiated().name(), "(z^3)'");
    }
}
