//! Independent reference arithmetic: plain row-major complex matrices and a
//! scaling-and-squaring Taylor exponential. Nothing here calls into the
//! library's gate constructors.

#![allow(dead_code)]

use exchange_teleport::{StateVector, UnitaryMatrix};
use num_complex::Complex64;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub dim: usize,
    pub data: Vec<C>,
}

impl Dense {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![c(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[C]]) -> Self {
        let dim = rows.len();
        Self { dim, data: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> C {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let n = self.dim;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                for j in 0..n {
                    out.data[i * n + j] += a * o.at(k, j);
                }
            }
        }
        out
    }

    pub fn kron(&self, o: &Dense) -> Dense {
        let n = self.dim * o.dim;
        let mut out = Dense::zeros(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..o.dim {
                    for l in 0..o.dim {
                        out.data[(i * o.dim + k) * n + j * o.dim + l] = self.at(i, j) * o.at(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, k: C) -> Dense {
        Dense { dim: self.dim, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn add(&self, o: &Dense) -> Dense {
        Dense { dim: self.dim, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn dagger(&self) -> Dense {
        let mut out = Dense::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.data[j * self.dim + i] = self.at(i, j).conj();
            }
        }
        out
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.at(i, j) * v[j]).sum()).collect()
    }

    fn norm1(&self) -> f64 {
        (0..self.dim).map(|j| (0..self.dim).map(|i| self.at(i, j).norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, o: &Dense) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `min_θ max |self − e^{iθ} o|`, with θ aligned on the largest entry.
    pub fn phase_diff(&self, o: &Dense) -> f64 {
        let k = (0..o.data.len()).max_by(|&a, &b| o.data[a].norm().total_cmp(&o.data[b].norm())).unwrap();
        let phase = self.data[k] / o.data[k];
        self.max_diff(&o.scale(phase / phase.norm()))
    }
}

/// `e^{M}` by scaling and squaring a 20-term Taylor series.
pub fn expm(m: &Dense) -> Dense {
    let squarings = m.norm1().log2().ceil().max(0.0) as u32 + 1;
    let a = m.scale(c(0.5f64.powi(squarings as i32), 0.0));
    let mut term = Dense::identity(m.dim);
    let mut sum = Dense::identity(m.dim);
    for k in 1..=20 {
        term = term.mul(&a).scale(c(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum
}

/// `e^{−iθH}`.
pub fn evolve(h: &Dense, theta: f64) -> Dense {
    expm(&h.scale(c(0.0, -theta)))
}

pub fn pauli(k: usize) -> Dense {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match k {
        0 => Dense::from_rows(&[&[o, z], &[z, o]]),
        1 => Dense::from_rows(&[&[z, o], &[o, z]]),
        2 => Dense::from_rows(&[&[z, -i], &[i, z]]),
        3 => Dense::from_rows(&[&[o, z], &[z, -o]]),
        _ => panic!("pauli index {k}"),
    }
}

/// Tensor product of Paulis, first index on qubit 0 (most significant).
pub fn pauli_string(ks: &[usize]) -> Dense {
    ks.iter().skip(1).fold(pauli(ks[0]), |acc, &k| acc.kron(&pauli(k)))
}

pub fn from_lib(u: &UnitaryMatrix) -> Dense {
    let m = u.matrix();
    let dim = u.dim();
    let mut out = Dense::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            out.data[i * dim + j] = m[(i, j)];
        }
    }
    out
}

/// `exp(i(π/4)σ)` from the series, without the library's `R` constructor.
pub fn r_oracle(sigma: usize, dagger: bool) -> Dense {
    evolve(&pauli(sigma), if dagger { std::f64::consts::FRAC_PI_4 } else { -std::f64::consts::FRAC_PI_4 })
}

pub fn amps(s: &StateVector) -> Vec<C> {
    s.amplitudes().to_vec()
}

pub fn max_vec_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `1 − |⟨a|b⟩|` for normalized vectors.
pub fn phase_distance(a: &[C], b: &[C]) -> f64 {
    1.0 - a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C>().norm()
}

pub fn kron_vec(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}
