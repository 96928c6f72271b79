//! Compressed sparse rows and a banded LDLᵀ factorization.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Accumulates `(row, col, value)` entries; duplicates are summed.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    n: usize,
    entries: BTreeMap<(usize, usize), f64>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        TripletBuilder { n, entries: BTreeMap::new() }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        *self.entries.entry((i, j)).or_insert(0.0) += v;
    }

    pub fn build(self) -> CsrMatrix {
        let mut indptr = vec![0usize; self.n + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut data = Vec::with_capacity(self.entries.len());
        for (&(i, j), &v) in &self.entries {
            indptr[i + 1] += 1;
            indices.push(j);
            data.push(v);
        }
        for i in 0..self.n {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix { n: self.n, indptr, indices, data }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<f64>,
}

impl CsrMatrix {
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[i]..self.indptr[i + 1]).map(move |k| (self.indices[k], self.data[k]))
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map(|(_, v)| v).unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |S_ij − S_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn bandwidth(&self) -> usize {
        (0..self.n).flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j))).max().unwrap_or(0)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &CsrMatrix, b: f64) -> CsrMatrix {
        let mut t = TripletBuilder::new(self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                t.add(i, j, a * v);
            }
            for (j, v) in other.row(i) {
                t.add(i, j, b * v);
            }
        }
        t.build()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Coordinate-triplet text: a header line `n nnz`, then one
    /// `row col value` line per stored entry (0-based).
    pub fn write_triplets<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.n, self.nnz())?;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(out, "{i} {j} {v:.17e}")?;
            }
        }
        Ok(())
    }
}

/// `A = L D Lᵀ` for a symmetric banded matrix, without pivoting.
#[derive(Debug, Clone)]
pub struct BandLdlt {
    n: usize,
    b: usize,
    /// Row `i` holds `L[i][i-b..i]` at offsets `0..b`.
    l: Vec<f64>,
    pub d: Vec<f64>,
}

impl BandLdlt {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n;
        let b = a.bandwidth().max(1);
        let mut l = vec![0.0; n * b];
        let mut d = vec![0.0; n];
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let idx = |i: usize, j: usize| i * b + (j + b - i);
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j < i {
                    l[idx(i, j)] = v;
                } else if j == i {
                    d[i] = v;
                }
            }
        }
        for i in 0..n {
            let lo = i.saturating_sub(b);
            for j in lo..i {
                let klo = lo.max(j.saturating_sub(b));
                let mut s = l[idx(i, j)];
                for k in klo..j {
                    s -= l[idx(i, k)] * l[idx(j, k)] * d[k];
                }
                l[idx(i, j)] = s / d[j];
            }
            let mut s = d[i];
            for k in lo..i {
                let lik = l[idx(i, k)];
                s -= lik * lik * d[k];
            }
            if s.abs() <= 1e-14 * scale || !s.is_finite() {
                return Err(Error::Factorization(format!("zero pivot {s:.3e} at row {i}")));
            }
            d[i] = s;
        }
        Ok(BandLdlt { n, b, l, d })
    }

    /// Number of negative pivots, equal to the number of negative
    /// eigenvalues by Sylvester's law of inertia.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, b) = (self.n, self.b);
        let idx = |i: usize, j: usize| i * b + (j + b - i);
        let mut x = rhs.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(b)..i {
                s -= self.l[idx(i, k)] * x[k];
            }
            x[i] = s;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..(i + b + 1).min(n) {
                s -= self.l[idx(k, i)] * x[k];
            }
            x[i] = s;
        }
        x
    }
}

pub fn dvec(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize, shift: f64) -> CsrMatrix {
        let mut t = TripletBuilder::new(n);
        for i in 0..n {
            t.add(i, i, 2.0 + shift);
            if i + 1 < n {
                t.add(i, i + 1, -1.0);
                t.add(i + 1, i, -1.0);
            }
        }
        t.build()
    }

    #[test]
    fn ldlt_solves_and_counts() {
        let a = laplace_1d(50, 0.0);
        let f = BandLdlt::factor(&a).unwrap();
        let x: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let y = f.solve(&a.mul_vec(&x));
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-9);
        }
        assert_eq!(f.negative_count(), 0);
        // eigenvalues 2 − 2cos(kπ/51) − 0.5 are negative for the lowest few
        let shifted = BandLdlt::factor(&laplace_1d(50, -0.5)).unwrap();
        let expected = (1..=50)
            .filter(|k| 2.0 - 2.0 * (*k as f64 * std::f64::consts::PI / 51.0).cos() - 0.5 < 0.0)
            .count();
        assert_eq!(shifted.negative_count(), expected);
    }

    #[test]
    fn triplets_sum_duplicates() {
        let mut t = TripletBuilder::new(2);
        t.add(0, 1, 1.0);
        t.add(0, 1, 2.0);
        t.add(1, 0, 3.0);
        let m = t.build();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.asymmetry(), 0.0);
        let mut buf = Vec::new();
        m.write_triplets(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("2 2\n0 1 3"));
    }
}
