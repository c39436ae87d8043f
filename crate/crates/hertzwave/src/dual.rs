//! Forward-mode dual numbers for exact directional derivatives.
//!
//! A [`Dual`] carries a value and the derivative of that value along one
//! direction in parameter space. Arithmetic propagates both parts, so any
//! expression evaluated on duals yields its directional derivative to
//! machine precision — no finite-difference step-size trade-off. The
//! conservation-law checker uses this to apply the total-derivative
//! operators `D_t` and `D_x` to flux expressions by seeding the jet
//! coordinates with the appropriate shifted derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value `re` plus infinitesimal part `eps` (the directional derivative).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    /// A constant: derivative zero along the seeded direction.
    pub const fn constant(re: f64) -> Self {
        Dual { re, eps: 0.0 }
    }

    /// A seeded variable with the given directional derivative.
    pub const fn seeded(re: f64, eps: f64) -> Self {
        Dual { re, eps }
    }

    /// `self^p` for a constant real exponent, via `d(x^p) = p x^(p-1) dx`.
    /// Requires `re > 0` for non-integer exponents, matching the strain
    /// positivity domain of the model.
    pub fn powf(self, p: f64) -> Self {
        let v = self.re.powf(p);
        Dual {
            re: v,
            eps: p * self.re.powf(p - 1.0) * self.eps,
        }
    }

    pub fn powi(self, p: i32) -> Self {
        let v = self.re.powi(p);
        Dual {
            re: v,
            eps: f64::from(p) * self.re.powi(p - 1) * self.eps,
        }
    }

    pub fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        Dual {
            re: r,
            eps: 0.5 * self.eps / r,
        }
    }
}

impl From<f64> for Dual {
    fn from(re: f64) -> Self {
        Dual::constant(re)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual {
            re: self.re + rhs.re,
            eps: self.eps + rhs.eps,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual {
            re: self.re - rhs.re,
            eps: self.eps - rhs.eps,
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual {
            re: self.re * rhs.re,
            eps: self.re * rhs.eps + self.eps * rhs.re,
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let inv = 1.0 / rhs.re;
        Dual {
            re: self.re * inv,
            eps: (self.eps - self.re * rhs.eps * inv) * inv,
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            re: -self.re,
            eps: -self.eps,
        }
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    fn add(self, rhs: f64) -> Dual {
        Dual {
            re: self.re + rhs,
            eps: self.eps,
        }
    }
}

impl Sub<f64> for Dual {
    type Output = Dual;
    fn sub(self, rhs: f64) -> Dual {
        Dual {
            re: self.re - rhs,
            eps: self.eps,
        }
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, rhs: f64) -> Dual {
        Dual {
            re: self.re * rhs,
            eps: self.eps * rhs,
        }
    }
}

impl Div<f64> for Dual {
    type Output = Dual;
    fn div(self, rhs: f64) -> Dual {
        Dual {
            re: self.re / rhs,
            eps: self.eps / rhs,
        }
    }
}

impl Mul<Dual> for f64 {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual {
            re: self * rhs.re,
            eps: self * rhs.eps,
        }
    }
}

/// Shared scalar interface so flux expressions can be written once and
/// evaluated on plain floats or on duals.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + From<f64>
{
    fn powf(self, p: f64) -> Self;
    fn value(self) -> f64;
}

impl Scalar for f64 {
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn value(self) -> f64 {
        self
    }
}

impl Scalar for Dual {
    fn powf(self, p: f64) -> Self {
        Dual::powf(self, p)
    }
    fn value(self) -> f64 {
        self.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(re: f64, eps: f64) -> Dual {
        Dual::seeded(re, eps)
    }

    #[test]
    fn arithmetic_propagates_derivatives() {
        // f(x) = x² · (x + 3) / (x − 1) at x = 2, f' by hand.
        let x = d(2.0, 1.0);
        let f = x * x * (x + 3.0) / (x - 1.0);
        assert_eq!(f.re, 20.0);
        // f = (x³ + 3x²)/(x−1); f' = (2x³ − 15x²... ) — check numerically.
        let h = 1e-6;
        let fval = |x: f64| x * x * (x + 3.0) / (x - 1.0);
        let fd = (fval(2.0 + h) - fval(2.0 - h)) / (2.0 * h);
        assert!((f.eps - fd).abs() < 1e-8, "{} vs {}", f.eps, fd);
    }

    #[test]
    fn powf_chain_rule() {
        let x = d(1.7, 1.0);
        let f = x.powf(2.5);
        assert!((f.re - 1.7f64.powf(2.5)).abs() < 1e-15);
        assert!((f.eps - 2.5 * 1.7f64.powf(1.5)).abs() < 1e-14);

        // Chained seed: derivative along a direction where dx = 0.3.
        let x = d(1.7, 0.3);
        let f = x.powf(2.5);
        assert!((f.eps - 0.3 * 2.5 * 1.7f64.powf(1.5)).abs() < 1e-14);
    }

    #[test]
    fn sqrt_and_powi_agree_with_powf() {
        let x = d(2.3, 0.7);
        let a = x.sqrt();
        let b = x.powf(0.5);
        assert!((a.re - b.re).abs() < 1e-15);
        assert!((a.eps - b.eps).abs() < 1e-15);
        let a = x.powi(3);
        let b = x.powf(3.0);
        assert!((a.re - b.re).abs() < 1e-12);
        assert!((a.eps - b.eps).abs() < 1e-12);
    }

    #[test]
    fn constants_have_zero_derivative() {
        let c = Dual::constant(4.2);
        let x = d(1.0, 1.0);
        let f = c * x + c;
        assert_eq!(f.re, 8.4);
        assert_eq!(f.eps, 4.2);
    }
}
