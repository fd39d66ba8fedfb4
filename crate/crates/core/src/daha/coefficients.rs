//! Closed-form representation coefficients `a_n`, `α_n`, `r_n`, `ρ_n` and the
//! gauge sequence `z_n`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{ParameterSet, SINGULAR_TOL};

fn nonzero(x: f64, what: &str) -> Result<f64> {
    if x.abs() < SINGULAR_TOL {
        Err(Error::Singularity(format!("{what} vanishes")))
    } else {
        Ok(x)
    }
}

/// Closed form shared by both families; `beta` is either β or β̃ (same `g`).
///
/// ```text
/// a_{2m}   = 1 − 2β₁(1 − β₂β₄qᵐ)(1 − β₃β₄qᵐ) / ((β₁ − β₄)(1 − g q^{2m}))
/// a_{2m−1} = 1 − 2(1 − g q^{m−1})(1 − β₁β₄qᵐ) / ((1 − β₁β₄)(1 − g q^{2m−1}))
/// ```
pub fn closed_form(n: i64, beta: [f64; 4], q: f64) -> Result<f64> {
    if n < -1 {
        return Err(Error::Domain(format!("coefficient index {n} < −1")));
    }
    if n == -1 {
        return Ok(-1.0);
    }
    let [b1, b2, b3, b4] = beta;
    let g = b1 * b2 * b3 * b4;
    if n % 2 == 0 {
        let m = (n / 2) as i32;
        let qm = q.powi(m);
        let den = nonzero(b1 - b4, "β₁ − β₄")? * nonzero(1.0 - g * q.powi(2 * m), "1 − g q^(2n)")?;
        Ok(1.0 - 2.0 * b1 * (1.0 - b2 * b4 * qm) * (1.0 - b3 * b4 * qm) / den)
    } else {
        let m = ((n + 1) / 2) as i32;
        let den = nonzero(1.0 - b1 * b4, "1 − β₁β₄")?
            * nonzero(1.0 - g * q.powi(2 * m - 1), "1 − g q^(2n−1)")?;
        Ok(1.0 - 2.0 * (1.0 - g * q.powi(m - 1)) * (1.0 - b1 * b4 * q.powi(m)) / den)
    }
}

/// `a_n` for `n ≥ −1`.
pub fn coeff_a(n: i64, p: &ParameterSet) -> Result<f64> {
    closed_form(n, p.beta, p.q)
}

/// `α_n` for `n ≥ −1` (the `a_n` formula at β̃).
pub fn coeff_alpha(n: i64, p: &ParameterSet) -> Result<f64> {
    closed_form(n, p.tilde_beta, p.q)
}

/// Nonnegative square root of `1 − x²`, clamped at zero for `|x|` within
/// rounding of one.
pub fn co(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).sqrt()
}

/// Tabulated coefficients for `−1 ≤ n ≤ n_max`.
#[derive(Debug, Clone, Serialize)]
pub struct RepCoefficients {
    pub n_max: usize,
    /// `a[k] = a_{k−1}`.
    a: Vec<f64>,
    alpha: Vec<f64>,
    /// `z[k] = z_k` for `0 ≤ k ≤ n_max + 1`.
    z: Vec<f64>,
    pub xi0: f64,
    pub xi1: f64,
    pub gamma0: Complex64,
    pub gamma1: Complex64,
}

impl RepCoefficients {
    pub fn compute(p: &ParameterSet, n_max: usize) -> Result<Self> {
        let mut a = Vec::with_capacity(n_max + 2);
        let mut alpha = Vec::with_capacity(n_max + 2);
        // The free point has a_n = α_n = 0 exactly; the closed form leaves
        // rounding residue that the growing gauge would amplify.
        let free = p.is_free();
        for n in -1..=(n_max as i64) {
            let exact_zero = free && n >= 0;
            a.push(if exact_zero { 0.0 } else { coeff_a(n, p)? });
            alpha.push(if exact_zero { 0.0 } else { coeff_alpha(n, p)? });
        }
        let [t1, t2, t3, t4] = p.t;
        let big_q = p.big_q;
        let xi0 = 1.0;
        // t₂t₃ is real in both regimes.
        let xi1 = (-(big_q * xi0) / (t2 * t3)).re;
        let gamma0 = -(t2 * t3 * t4 * (1.0 - t1 * t1)) / (big_q * xi0 * xi0 * t1 * (1.0 - t4 * t4));
        let gamma1 = -(xi0 * xi0 * (1.0 - t2 * t2)) / (t2 * t2 * (1.0 - t3 * t3));
        let z = (0..=n_max + 1)
            .map(|k| {
                let m = (k / 2) as i32;
                if k % 2 == 1 {
                    xi1 * big_q.powi(m)
                } else {
                    xi0 * big_q.powi(-m)
                }
            })
            .collect();
        Ok(RepCoefficients {
            n_max,
            a,
            alpha,
            z,
            xi0,
            xi1,
            gamma0,
            gamma1,
        })
    }

    fn idx(&self, n: i64) -> usize {
        assert!(
            n >= -1 && n <= self.n_max as i64,
            "coefficient index {n} outside [−1, {}]",
            self.n_max
        );
        (n + 1) as usize
    }

    pub fn a(&self, n: i64) -> f64 {
        self.a[self.idx(n)]
    }

    pub fn alpha(&self, n: i64) -> f64 {
        self.alpha[self.idx(n)]
    }

    pub fn r(&self, n: i64) -> f64 {
        co(self.a(n))
    }

    pub fn rho(&self, n: i64) -> f64 {
        co(self.alpha(n))
    }

    /// `z_n` for `0 ≤ n ≤ n_max + 1`.
    pub fn z(&self, n: usize) -> f64 {
        self.z[n]
    }

    /// `ζ_n = z_{n+1}/z_n`.
    pub fn zeta(&self, n: usize) -> f64 {
        self.z[n + 1] / self.z[n]
    }

    /// `a_0..=a_{n_max}`.
    pub fn a_values(&self) -> &[f64] {
        &self.a[1..]
    }

    pub fn alpha_values(&self) -> &[f64] {
        &self.alpha[1..]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_parameters, Mode};

    fn generic() -> ParameterSet {
        derive_parameters([0.6, 0.5, -0.5, -0.4], 0.7, Mode::Infinite).unwrap()
    }

    #[test]
    fn a0_by_hand() {
        let v = coeff_a(0, &generic()).unwrap();
        let expect = 1.0 - 2.0 * 0.6 * 1.2 * 0.8 / (1.0 * (1.0 - 0.06));
        assert!((v - expect).abs() < 1e-15);
        assert!((v + 0.22553).abs() < 1e-5);
    }

    #[test]
    fn initial_values() {
        let p = generic();
        assert_eq!(coeff_a(-1, &p).unwrap(), -1.0);
        assert_eq!(coeff_alpha(-1, &p).unwrap(), -1.0);
    }

    #[test]
    fn alpha_is_a_at_tilde_beta() {
        let p = generic();
        let tb = p.tilde_beta;
        // Oracle: re-derive the odd branch at n = 1 (m = 1) by hand.
        let g: f64 = tb.iter().product();
        let q = 0.7;
        let oracle = 1.0 - 2.0 * (1.0 - g) * (1.0 - tb[0] * tb[3] * q) / ((1.0 - tb[0] * tb[3]) * (1.0 - g * q));
        assert!((coeff_alpha(1, &p).unwrap() - oracle).abs() < 1e-15);
    }

    #[test]
    fn free_case_vanishes() {
        let p = ParameterSet::free(0.64).unwrap();
        for n in 0..40 {
            assert!(coeff_a(n, &p).unwrap().abs() < 1e-14);
            assert!(coeff_alpha(n, &p).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn generic_in_open_interval() {
        let c = RepCoefficients::compute(&generic(), 200).unwrap();
        for n in 0..=200 {
            assert!(c.a(n).abs() < 1.0 && c.alpha(n).abs() < 1.0);
            assert!((c.r(n).powi(2) + c.a(n).powi(2) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gauge_sequence() {
        let p = generic();
        let c = RepCoefficients::compute(&p, 40).unwrap();
        for n in 0..20usize {
            assert!((c.z(2 * n + 1) - c.xi1 * p.big_q.powi(n as i32)).abs() < 1e-14 * c.z(2 * n + 1).abs());
            assert!((c.z(2 * n) - p.big_q.powi(-(n as i32))).abs() < 1e-15);
            assert!((c.zeta(2 * n) - c.z(2 * n + 1) / c.z(2 * n)).abs() < 1e-14 * c.zeta(2 * n).abs());
        }
        // Free case: ξ₁ = Q.
        let f = ParameterSet::free(0.64).unwrap();
        let cf = RepCoefficients::compute(&f, 4).unwrap();
        assert!((cf.xi1 - f.big_q).abs() < 1e-14);
    }

    #[test]
    fn singular_denominator() {
        // β₁ = β₄ is not admissible in infinite mode; use finite mode.
        let p = derive_parameters([2.0, 0.5, 0.3, 2.0], 0.8, Mode::Finite).unwrap();
        assert!(matches!(coeff_a(0, &p), Err(Error::Singularity(_))));
    }
}
