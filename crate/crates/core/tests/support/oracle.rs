//! Independent reference values for displacement-operator matrix elements.
//!
//! `D(beta) = exp(beta a† - beta a)` for real `beta`, exponentiated densely in a
//! truncated oscillator space by scaling and squaring of a Taylor series.

#![allow(dead_code)]

pub struct Dense {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Dense {
    fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    fn mul(&self, other: &Dense) -> Dense {
        let n = self.dim;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    fn add(&mut self, other: &Dense) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .map(|x| x.abs())
                    .sum()
            })
            .fold(0.0, f64::max)
    }
}

/// `<m|D(beta)|n>` table for real `beta` in a `dim`-state oscillator.
pub fn displacement_matrix(beta: f64, dim: usize) -> Dense {
    // generator beta (a† - a)
    let mut gen = Dense::zeros(dim);
    for n in 0..dim - 1 {
        let s = ((n + 1) as f64).sqrt() * beta;
        gen.data[(n + 1) * dim + n] = s;
        gen.data[n * dim + n + 1] = -s;
    }
    let norm = gen.inf_norm();
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.25 {
        squarings += 1;
    }
    gen.scale(1.0 / 2f64.powi(squarings as i32));

    let mut result = Dense::identity(dim);
    let mut term = Dense::identity(dim);
    for k in 1..=30 {
        term = term.mul(&gen);
        term.scale(1.0 / k as f64);
        result.add(&term);
        if term.inf_norm() < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    result
}
