//! Second-order jets in two parameters.
//!
//! A [`Jet`] carries a scalar together with its first and second partial
//! derivatives with respect to the parameter coordinates `(x, y)`. Charts are
//! written once over `Jet` and yield exact analytic derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dxy: f64,
    pub dyy: f64,
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        Jet { v, dx: 0.0, dy: 0.0, dxx: 0.0, dxy: 0.0, dyy: 0.0 }
    }

    pub const fn var_x(x: f64) -> Self {
        Jet { v: x, dx: 1.0, dy: 0.0, dxx: 0.0, dxy: 0.0, dyy: 0.0 }
    }

    pub const fn var_y(y: f64) -> Self {
        Jet { v: y, dx: 0.0, dy: 1.0, dxx: 0.0, dxy: 0.0, dyy: 0.0 }
    }

    /// Applies a scalar function given its value and first two derivatives.
    fn chain(self, f: f64, f1: f64, f2: f64) -> Self {
        Jet {
            v: f,
            dx: f1 * self.dx,
            dy: f1 * self.dy,
            dxx: f2 * self.dx * self.dx + f1 * self.dxx,
            dxy: f2 * self.dx * self.dy + f1 * self.dxy,
            dyy: f2 * self.dy * self.dy + f1 * self.dyy,
        }
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn powi(self, n: i32) -> Self {
        let nf = n as f64;
        self.chain(
            self.v.powi(n),
            nf * self.v.powi(n - 1),
            nf * (nf - 1.0) * self.v.powi(n - 2),
        )
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn scale(self, a: f64) -> Self {
        Jet {
            v: a * self.v,
            dx: a * self.dx,
            dy: a * self.dy,
            dxx: a * self.dxx,
            dxy: a * self.dxy,
            dyy: a * self.dyy,
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
            dxx: self.dxx + o.dxx,
            dxy: self.dxy + o.dxy,
            dyy: self.dyy + o.dyy,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            dx: self.dx * o.v + self.v * o.dx,
            dy: self.dy * o.v + self.v * o.dy,
            dxx: self.dxx * o.v + 2.0 * self.dx * o.dx + self.v * o.dxx,
            dxy: self.dxy * o.v + self.dx * o.dy + self.dy * o.dx + self.v * o.dxy,
            dyy: self.dyy * o.v + 2.0 * self.dy * o.dy + self.v * o.dyy,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, a: f64) -> Jet {
        self.v += a;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, a: f64) -> Jet {
        self.v -= a;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, a: f64) -> Jet {
        self.scale(a)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn(Jet, Jet) -> Jet, x: f64, y: f64) {
        let j = f(Jet::var_x(x), Jet::var_y(y));
        let g = |a: f64, b: f64| f(Jet::constant(a), Jet::constant(b)).v;
        let h = 1e-4;
        let dx = (g(x + h, y) - g(x - h, y)) / (2.0 * h);
        let dy = (g(x, y + h) - g(x, y - h)) / (2.0 * h);
        let dxx = (g(x + h, y) - 2.0 * g(x, y) + g(x - h, y)) / (h * h);
        let dyy = (g(x, y + h) - 2.0 * g(x, y) + g(x, y - h)) / (h * h);
        let dxy = (g(x + h, y + h) - g(x + h, y - h) - g(x - h, y + h) + g(x - h, y - h))
            / (4.0 * h * h);
        assert!((j.dx - dx).abs() < 1e-7, "dx {} vs {}", j.dx, dx);
        assert!((j.dy - dy).abs() < 1e-7);
        assert!((j.dxx - dxx).abs() < 1e-5, "dxx {} vs {}", j.dxx, dxx);
        assert!((j.dxy - dxy).abs() < 1e-5);
        assert!((j.dyy - dyy).abs() < 1e-5);
    }

    #[test]
    fn composite_expressions_match_finite_differences() {
        fd_check(|x, y| (x * y + 1.0).sqrt() * x.sin(), 0.3, 0.7);
        fd_check(|x, y| (x * x + y * y + 1.0).recip() * y.exp(), -0.4, 0.2);
        fd_check(|x, y| (x * x + y * y).ln() / (y + 2.0), 0.5, 0.1);
        fd_check(|x, y| x.powi(3) - y.cos() * 2.0, 0.9, -0.3);
    }
}
