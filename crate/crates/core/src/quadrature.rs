//! One-dimensional quadrature rules and compensated summation.

use std::f64::consts::PI;

/// Neumaier-compensated accumulator. Reductions in this crate traverse
/// nodes in a fixed order through this type so results are reproducible.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn ksum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// Legendre polynomials `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

fn legendre_deriv(n: usize, x: f64) -> f64 {
    let (pn, pm) = legendre_pair(n, x);
    n as f64 * (x * pn - pm) / (x * x - 1.0)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = -(PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, _) = legendre_pair(n, x);
            let dp = legendre_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre_deriv(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Gauss–Radau nodes on `[-1, 1]` with the node at `+1` fixed, ascending.
pub fn gauss_radau_right(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    // Left-fixed rule: roots of P_{n-1} + P_n, mirrored afterwards.
    let mut nodes = vec![-1.0; n];
    let mut weights = vec![2.0 / (n * n) as f64; n];
    let nf = n as f64;
    for j in 1..n {
        let mut x = -(2.0 * PI * j as f64 / (2.0 * nf - 1.0)).cos();
        for _ in 0..200 {
            let (pn, pm) = legendre_pair(n, x);
            let q = pn + pm;
            let dq = legendre_deriv(n, x) + legendre_deriv(n - 1, x);
            let dx = q / dq;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, pm) = legendre_pair(n, x);
        nodes[j] = x;
        weights[j] = (1.0 - x) / (nf * nf * pm * pm);
    }
    let mut pairs: Vec<(f64, f64)> = nodes.iter().zip(&weights).map(|(x, w)| (-x, *w)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Gauss–Lobatto nodes on `[-1, 1]` (both endpoints), ascending.
pub fn gauss_lobatto(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let m = n - 1;
    let mf = m as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for j in 0..n {
        let mut x = -(PI * j as f64 / mf).cos();
        if j > 0 && j < m {
            for _ in 0..200 {
                // Roots of P'_m: Newton on P'_m with P''_m from the Legendre ODE.
                let dp = legendre_deriv(m, x);
                let (p, _) = legendre_pair(m, x);
                let d2p = (2.0 * x * dp - mf * (mf + 1.0) * p) / (1.0 - x * x);
                let dx = dp / d2p;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
        }
        let (p, _) = legendre_pair(m, x);
        nodes[j] = x;
        weights[j] = 2.0 / (mf * (mf + 1.0) * p * p);
    }
    (nodes, weights)
}
