//! Overlaps between the two spin-conditioned displaced Fock bases.
//!
//! The excited-spin amplitudes live in the basis `|n>_A = D(g)^† |n>` and the
//! ground-spin amplitudes in `|n>_B = D(-g)^† |n>`. Their overlaps reduce to a
//! single real array
//!
//! ```text
//! D_mn = exp(-2 g^2) * sum_i (-1)^i sqrt(m! n!) (2g)^(m+n-2i) / ((m-i)! (n-i)! i!)
//! ```
//!
//! with `_A<m|n>_B = (-1)^n D_mn` and `_B<m|n>_A = (-1)^m D_mn`.
//!
//! Two evaluation kernels are provided. [`SeriesKernel`] sums the alternating
//! series above in double-double precision starting from the last term, which
//! keeps ten or more correct digits even when the largest term is `1e20`
//! times the result. [`LaguerreKernel`] goes through `<m|D(2g)|n>` and the
//! three-term associated-Laguerre recurrence.

use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

use crate::dd::DoubleDouble;

/// Largest basis index accepted by the overlap kernels.
pub const MAX_INDEX: usize = 400;
/// Largest `|g|` accepted by the overlap kernels.
pub const MAX_ABS_G: f64 = 1.5;

/// Worst-case absolute error above which a series evaluation is refused.
const SERIES_ERROR_BUDGET: f64 = 1e-8;
/// Per-step relative rounding of the double-double recurrence (4 * 2^-104).
const DD_UNIT: f64 = 2.0e-31;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OverlapError {
    #[error("overlap index ({m}, {n}) or coupling g = {g} outside the supported domain")]
    OutOfDomain { m: usize, n: usize, g: f64 },
    #[error("overlap D_({m},{n}) at g = {g} overflowed")]
    Overflow { m: usize, n: usize, g: f64 },
    #[error("series for D_({m},{n}) at g = {g} cancels beyond working precision (error bound {bound:e})")]
    PrecisionLoss {
        m: usize,
        n: usize,
        g: f64,
        bound: f64,
    },
}

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Neumaier-compensated running sum of ln k.
        let size = 2 * MAX_INDEX + 2;
        let mut table = Vec::with_capacity(size);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        table.push(0.0);
        for k in 1..size {
            let term = (k as f64).ln();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            table.push(sum + comp);
        }
        table
    })
}

/// `ln(n!)`.
pub fn log_factorial(n: usize) -> f64 {
    let table = log_factorial_table();
    if n < table.len() {
        return table[n];
    }
    // Stirling series; the table covers every index the kernels use.
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// Evaluation strategy for `D_mn`.
pub trait OverlapKernel: Send + Sync {
    fn name(&self) -> &'static str;
    fn overlap_d(&self, m: usize, n: usize, g: f64) -> Result<f64, OverlapError>;
}

fn check_domain(m: usize, n: usize, g: f64) -> Result<(), OverlapError> {
    if m > MAX_INDEX || n > MAX_INDEX || !g.is_finite() || g.abs() > MAX_ABS_G {
        return Err(OverlapError::OutOfDomain { m, n, g });
    }
    Ok(())
}

#[inline]
fn minus_one_pow(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Closed-form series, summed in double-double from the `i = min(m, n)` end.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeriesKernel;

impl OverlapKernel for SeriesKernel {
    fn name(&self) -> &'static str {
        "series"
    }

    fn overlap_d(&self, m: usize, n: usize, g: f64) -> Result<f64, OverlapError> {
        check_domain(m, n, g)?;
        if g == 0.0 {
            return Ok(if m == n { minus_one_pow(m) } else { 0.0 });
        }
        let (big, small) = if m >= n { (m, n) } else { (n, m) };
        let two_g = 2.0 * g.abs();
        let four_g2 = DoubleDouble::square_of(two_g);

        // Anchor term i = small, where (m-i)!(n-i)! = (big-small)!.
        let k = big - small;
        let log_anchor = 0.5 * (log_factorial(m) + log_factorial(n)) + k as f64 * two_g.ln()
            - log_factorial(k)
            - log_factorial(small)
            - 2.0 * g * g;

        // Terms relative to the anchor, walking i = small, small-1, ..., 0:
        // t_{i-1} / t_i = -(2g)^2 i / ((m-i+1)(n-i+1)).
        let mut rel = DoubleDouble::ONE;
        let mut sum = DoubleDouble::ONE;
        let mut max_rel = 1.0f64;
        for i in (1..=small).rev() {
            let denom = ((m - i + 1) as f64) * ((n - i + 1) as f64);
            rel = -rel.mul(four_g2).mul_f64(i as f64).div_f64(denom);
            sum += rel;
            max_rel = max_rel.max(rel.hi.abs());
            if !rel.hi.is_finite() {
                return Err(OverlapError::Overflow { m, n, g });
            }
        }

        let scale = log_anchor.exp();
        if !scale.is_finite() {
            return Err(OverlapError::Overflow { m, n, g });
        }
        let bound = scale * max_rel * DD_UNIT * (small as f64 + 1.0);
        if bound > SERIES_ERROR_BUDGET {
            return Err(OverlapError::PrecisionLoss { m, n, g, bound });
        }
        // (-1)^small from the anchor; the odd powers of g carry sign(g)^(m+n).
        let mut sign = minus_one_pow(small);
        if g < 0.0 && (m + n) % 2 == 1 {
            sign = -sign;
        }
        Ok(sign * scale * sum.to_f64())
    }
}

/// `D_mn = (-1)^n <m| D(2g) |n>` through the Laguerre closed form.
#[derive(Debug, Clone, Copy, Default)]
pub struct LaguerreKernel;

impl OverlapKernel for LaguerreKernel {
    fn name(&self) -> &'static str {
        "laguerre"
    }

    fn overlap_d(&self, m: usize, n: usize, g: f64) -> Result<f64, OverlapError> {
        check_domain(m, n, g)?;
        let value = minus_one_pow(n) * real_displacement_element(2.0 * g, m, n);
        if !value.is_finite() {
            return Err(OverlapError::Overflow { m, n, g });
        }
        Ok(value)
    }
}

/// Associated Laguerre polynomial `L_n^(alpha)(x)` by forward recurrence.
pub fn assoc_laguerre(n: usize, alpha: usize, x: f64) -> f64 {
    let a = alpha as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Magnitude part `sqrt(s!/(s+k)!) |beta|^k exp(-|beta|^2/2) L_s^(k)(|beta|^2)`
/// shared by the real and complex displacement elements.
fn displacement_core(abs_beta: f64, m: usize, n: usize) -> f64 {
    if abs_beta == 0.0 {
        return if m == n { 1.0 } else { 0.0 };
    }
    let (small, k) = if m >= n { (n, m - n) } else { (m, n - m) };
    let x = abs_beta * abs_beta;
    let lag = assoc_laguerre(small, k, x);
    if lag == 0.0 {
        return 0.0;
    }
    let log_mag = 0.5 * (log_factorial(small) - log_factorial(small + k))
        + k as f64 * abs_beta.ln()
        - 0.5 * x
        + lag.abs().ln();
    lag.signum() * log_mag.exp()
}

/// `<m| exp(beta a^† - beta a) |n>` for real `beta`.
pub fn real_displacement_element(beta: f64, m: usize, n: usize) -> f64 {
    let core = displacement_core(beta.abs(), m, n);
    // unit^(m-n) for m >= n, (-unit)^(n-m) otherwise, with unit = sign(beta).
    let k = m.abs_diff(n);
    let unit_negative = beta < 0.0;
    let flip = if m >= n {
        unit_negative
    } else {
        !unit_negative
    };
    if flip && k % 2 == 1 {
        -core
    } else {
        core
    }
}

/// `<m| exp(beta a^† - conj(beta) a) |n>` through the associated-Laguerre
/// closed form.
pub fn displacement_element(beta: Complex64, m: usize, n: usize) -> Complex64 {
    let abs_beta = beta.norm();
    let core = displacement_core(abs_beta, m, n);
    if abs_beta == 0.0 || core == 0.0 {
        return Complex64::new(core, 0.0);
    }
    let k = m.abs_diff(n) as u32;
    let unit = beta / abs_beta;
    let phase = if m >= n {
        unit.powu(k)
    } else {
        (-unit.conj()).powu(k)
    };
    phase * core
}

/// `D_mn` with the default series kernel.
pub fn displaced_overlap_d(m: usize, n: usize, g: f64) -> Result<f64, OverlapError> {
    SeriesKernel.overlap_d(m, n, g)
}

/// `_A<m|n>_B = (-1)^n D_mn`.
pub fn overlap_ab(m: usize, n: usize, g: f64) -> Result<f64, OverlapError> {
    Ok(minus_one_pow(n) * displaced_overlap_d(m, n, g)?)
}

/// `_B<m|n>_A = (-1)^m D_mn`.
pub fn overlap_ba(m: usize, n: usize, g: f64) -> Result<f64, OverlapError> {
    Ok(minus_one_pow(m) * displaced_overlap_d(m, n, g)?)
}

/// Dense `(n+1) x (n+1)` array of `D_mk` for one coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    g: f64,
    n: usize,
    d: Vec<f64>,
}

impl OverlapMatrix {
    pub fn g(&self) -> f64 {
        self.g
    }

    /// Highest basis index.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn get(&self, m: usize, k: usize) -> f64 {
        self.d[m * (self.n + 1) + k]
    }

    /// `_A<m|k>_B`.
    pub fn ab(&self, m: usize, k: usize) -> f64 {
        minus_one_pow(k) * self.get(m, k)
    }

    /// `_B<m|k>_A`.
    pub fn ba(&self, m: usize, k: usize) -> f64 {
        minus_one_pow(m) * self.get(m, k)
    }
}

pub fn overlap_matrix(n: usize, g: f64) -> Result<OverlapMatrix, OverlapError> {
    overlap_matrix_with(&SeriesKernel, n, g)
}

/// Fills the upper triangle with `kernel` and mirrors it, so the array is
/// bitwise symmetric.
pub fn overlap_matrix_with(
    kernel: &dyn OverlapKernel,
    n: usize,
    g: f64,
) -> Result<OverlapMatrix, OverlapError> {
    let dim = n + 1;
    let mut d = vec![0.0; dim * dim];
    for m in 0..dim {
        for k in m..dim {
            let v = kernel.overlap_d(m, k, g)?;
            d[m * dim + k] = v;
            d[k * dim + m] = v;
        }
    }
    Ok(OverlapMatrix { g, n, d })
}
