//! Terminating `₄φ₃` series, monic Askey–Wilson polynomials and their
//! identification with the even–odd split families.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

type Big = dashu_float::FBig<dashu_float::round::mode::HalfEven>;

/// Working precision of the series accumulation, in bits.
const SERIES_PRECISION: usize = 192;

fn big(x: f64) -> Big {
    Big::try_from(x).expect("finite input").with_precision(SERIES_PRECISION).value()
}

use crate::error::{Error, Result};
use crate::interval::{even_odd_split, ThreeTermRecurrence};
use crate::opuc::{Family, VerblunskySource};
use crate::params::{ParameterSet, SINGULAR_TOL};

/// `(a; q)_n = ∏_{k<n} (1 − a q^k)`.
pub fn q_pochhammer(a: f64, q: f64, n: usize) -> f64 {
    let mut acc = 1.0;
    let mut aq = a;
    for _ in 0..n {
        acc *= 1.0 - aq;
        aq *= q;
    }
    acc
}

/// Series parameters of one identified family together with the affine map
/// `y ↦ σy + τ`, which always comes from the unshifted `β`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AWParameters {
    pub beta: [f64; 4],
    pub q: f64,
    pub g: f64,
    pub sigma_scale: f64,
    pub tau_shift: f64,
    /// `(x₁, x₂) = ((1 − τ)/σ, −(1 + τ)/σ)`.
    pub support: (f64, f64),
}

impl AWParameters {
    pub fn new(series: [f64; 4], base: [f64; 4], q: f64) -> Result<Self> {
        let (b1, b4) = (base[0], base[3]);
        if b1 == 0.0 || b4 == 0.0 {
            return Err(Error::Domain("β₁ and β₄ must be nonzero".into()));
        }
        let sigma = (b4 + 1.0 / b4 - b1 - 1.0 / b1) / 2.0;
        let tau = (b1 + 1.0 / b1) / 2.0;
        if sigma.abs() < SINGULAR_TOL {
            return Err(Error::Singularity("σ = 0".into()));
        }
        Ok(AWParameters {
            beta: series,
            q,
            g: series.iter().product(),
            sigma_scale: sigma,
            tau_shift: tau,
            support: ((1.0 - tau) / sigma, -(1.0 + tau) / sigma),
        })
    }

    pub fn for_family(which: AwFamily, p: &ParameterSet) -> Result<Self> {
        let b = p.beta;
        let q = p.q;
        let series = match which {
            AwFamily::P1 => b,
            AwFamily::Q1 => [q * b[0], b[1], b[2], b[3]],
            AwFamily::P2 => [b[0], b[1], b[2], q * b[3]],
            AwFamily::Q2 => [q * b[0], b[1], b[2], q * b[3]],
        };
        Self::new(series, b, q)
    }

    /// `₄φ₃(q^(−n), g q^(n−1), β₁z, β₁/z; β₁β₂, β₁β₃, β₁β₄; q, q)`.
    pub fn phi43(&self, n: usize, z: Complex64) -> Result<Complex64> {
        let [b1, b2, b3, b4] = self.beta;
        let q = self.q;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        let mut qk = 1.0;
        for _ in 0..=n {
            sum += term;
            let den = (1.0 - b1 * b2 * qk) * (1.0 - b1 * b3 * qk) * (1.0 - b1 * b4 * qk) * (1.0 - q * qk);
            if den.abs() < SINGULAR_TOL {
                return Err(Error::Singularity("vanishing ₄φ₃ denominator".into()));
            }
            let num = (1.0 - qk / q.powi(n as i32)) * (1.0 - self.g * q.powi(n as i32 - 1) * qk);
            term *= (1.0 - b1 * z * qk) * (1.0 - b1 * qk / z) * (num * q / den);
            qk *= q;
        }
        Ok(sum)
    }

    /// Coefficient of `xⁿ` in the `₄φ₃` as a polynomial in `x = (z + 1/z)/2`.
    pub fn leading_coefficient(&self, n: usize) -> Result<f64> {
        let [b1, b2, b3, b4] = self.beta;
        let q = self.q;
        let den = q_pochhammer(b1 * b2, q, n)
            * q_pochhammer(b1 * b3, q, n)
            * q_pochhammer(b1 * b4, q, n)
            * q_pochhammer(q, q, n);
        if den.abs() < SINGULAR_TOL {
            return Err(Error::Singularity("vanishing ₄φ₃ denominator".into()));
        }
        let mut lead = q_pochhammer(q.powi(-(n as i32)), q, n)
            * q_pochhammer(self.g * q.powi(n as i32 - 1), q, n)
            * q.powi(n as i32);
        for k in 0..n {
            lead *= -2.0 * b1 * q.powi(k as i32);
        }
        if lead.abs() < f64::MIN_POSITIVE {
            return Err(Error::Singularity(format!("leading coefficient of degree {n} vanishes")));
        }
        Ok(lead / den)
    }

    /// `₄φ₃` at `z + 1/z = 2x`, symmetrized over `z ↔ 1/z`; plain `f64`.
    pub fn phi43_symmetrized(&self, n: usize, x: f64) -> Result<f64> {
        let z = x_to_z(x);
        Ok(((self.phi43(n, z)? + self.phi43(n, 1.0 / z)?) / 2.0).re)
    }

    /// Unnormalized `₄φ₃` at real `x`, using
    /// `(1 − β₁zq^k)(1 − β₁q^k/z) = 1 − 2β₁q^k x + β₁²q^(2k)`.
    ///
    /// The terms grow like `q^(−n²/2)` while the sum stays `O(1)`, so the
    /// accumulation runs in extended precision.
    pub fn phi43_at(&self, n: usize, x: f64) -> Result<f64> {
        let one = big(1.0);
        let [b1, b2, b3, b4] = self.beta.map(big);
        let q = big(self.q);
        let x = big(x);
        let mut q_n = one.clone();
        for _ in 0..n {
            q_n = &q_n * &q;
        }
        let gq = &b1 * &b2 * &b3 * &b4 * &q_n / &q;
        let (b12, b13, b14) = (&b1 * &b2, &b1 * &b3, &b1 * &b4);
        let mut sum = big(0.0);
        let mut term = one.clone();
        let mut qk = one.clone();
        for _ in 0..=n {
            sum += &term;
            let den = (&one - &b12 * &qk) * (&one - &b13 * &qk) * (&one - &b14 * &qk) * (&one - &q * &qk);
            if den.to_f64().value().abs() < SINGULAR_TOL {
                return Err(Error::Singularity("vanishing ₄φ₃ denominator".into()));
            }
            let b1qk = &b1 * &qk;
            let num = (&one - &qk / &q_n)
                * (&one - &gq * &qk)
                * (&one - big(2.0) * &b1qk * &x + &b1qk * &b1qk);
            term = term * num * &q / den;
            qk *= &q;
        }
        Ok(sum.to_f64().value())
    }

    /// Monic `V_n(x)`.
    pub fn monic(&self, n: usize, x: f64) -> Result<f64> {
        if n == 0 {
            return Ok(1.0);
        }
        Ok(self.phi43_at(n, x)? / self.leading_coefficient(n)?)
    }

    /// `σ^(−n) V_n(σy + τ)`, the interval-side normalization.
    pub fn interval_value(&self, n: usize, y: f64) -> Result<f64> {
        Ok(self.monic(n, self.sigma_scale * y + self.tau_shift)? / self.sigma_scale.powi(n as i32))
    }
}

/// Principal `z = x + √(x² − 1)`; unimodular for `|x| ≤ 1`.
pub fn x_to_z(x: f64) -> Complex64 {
    let x = Complex64::new(x, 0.0);
    x + (x * x - 1.0).sqrt()
}

pub fn aw_monic(n: usize, x: f64, aw: &AWParameters) -> Result<f64> {
    aw.monic(n, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AwFamily {
    P1,
    Q1,
    P2,
    Q2,
}

impl AwFamily {
    pub const ALL: [AwFamily; 4] = [AwFamily::P1, AwFamily::Q1, AwFamily::P2, AwFamily::Q2];

    /// Recurrence of the split family on the interval side.
    pub fn recurrence(self, src: &VerblunskySource, len: usize) -> Result<ThreeTermRecurrence> {
        let (fam, odd) = match self {
            AwFamily::P1 => (1, false),
            AwFamily::Q1 => (1, true),
            AwFamily::P2 => (2, false),
            AwFamily::Q2 => (2, true),
        };
        let (p, q) = even_odd_split(fam, src, len)?;
        Ok(if odd { q } else { p })
    }
}

impl FromStr for AwFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p1" => Ok(AwFamily::P1),
            "q1" => Ok(AwFamily::Q1),
            "p2" => Ok(AwFamily::P2),
            "q2" => Ok(AwFamily::Q2),
            _ => Err(Error::Domain(format!("unknown family `{s}` (expected p1|q1|p2|q2)"))),
        }
    }
}

impl fmt::Display for AwFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AwFamily::P1 => "p1",
            AwFamily::Q1 => "q1",
            AwFamily::P2 => "p2",
            AwFamily::Q2 => "q2",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub family: AwFamily,
    pub n_max: usize,
    pub samples: Vec<f64>,
    pub max_residual: f64,
    /// Worst residual per degree.
    pub per_degree: Vec<f64>,
}

/// Compares a recurrence against `σ^(−n)V_n(σy + τ)` at the given points,
/// with residual `|lhs − rhs| / max(1, |lhs|)`.
pub fn identity_residuals(rec: &ThreeTermRecurrence, aw: &AWParameters, n_max: usize, ys: &[f64]) -> Result<Vec<f64>> {
    let mut per = vec![0.0f64; n_max + 1];
    for &y in ys {
        let lhs = rec.eval_all(n_max, y);
        for (n, l) in lhs.iter().enumerate() {
            let r = aw.interval_value(n, y)?;
            per[n] = per[n].max((l - r).abs() / l.abs().max(1.0));
        }
    }
    Ok(per)
}

/// Sample points drawn uniformly from the open support `(x₁, x₂)`.
pub fn support_samples(aw: &AWParameters, samples: usize, seed: u64) -> Vec<f64> {
    let (lo, hi) = aw.support;
    let (lo, hi) = (lo.min(hi), lo.max(hi));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| lo + (hi - lo) * rng.gen_range(0.02..0.98)).collect()
}

pub fn verify_circle_identity(
    which: AwFamily,
    n_max: usize,
    samples: usize,
    p: &ParameterSet,
    seed: u64,
) -> Result<IdentityReport> {
    let src = VerblunskySource::from_params(Family::A, p, 2 * n_max + 4)?;
    let rec = which.recurrence(&src, n_max + 1)?;
    let aw = AWParameters::for_family(which, p)?;
    let ys = support_samples(&aw, samples, seed);
    let per_degree = identity_residuals(&rec, &aw, n_max, &ys)?;
    Ok(IdentityReport {
        family: which,
        n_max,
        samples: ys,
        max_residual: per_degree.iter().cloned().fold(0.0, f64::max),
        per_degree,
    })
}

/// `y₀ = 2`, `y_{2m−1} = y_{2m} = 2 + 4(1 − q^m)(q^(−m) − g/q) / ((1 − β₁β₄)(1 − β₂β₃/q))`.
pub fn aw_spectrum(n: usize, p: &ParameterSet) -> Result<f64> {
    if n == 0 {
        return Ok(2.0);
    }
    let [b1, b2, b3, b4] = p.beta;
    let q = p.q;
    let den = (1.0 - b1 * b4) * (1.0 - b2 * b3 / q);
    if den.abs() < SINGULAR_TOL {
        return Err(Error::Singularity("(1 − β₁β₄)(1 − β₂β₃/q) = 0".into()));
    }
    let m = n.div_ceil(2) as i32;
    Ok(2.0 + 4.0 * (1.0 - q.powi(m)) * (q.powi(-m) - p.g / q) / den)
}
