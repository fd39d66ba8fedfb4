//! Parameter family `(β₁, β₂, β₃, β₄, q)` and the derived Hecke scalars.
//!
//! The Hecke parameters are
//!
//! ```text
//! t₁ = i√(−β₄/β₁)   t₂ = i√(−β₁β₄)   t₃ = iQ√(−β₂β₃)   t₄ = i√(−β₃/β₂)
//! ```
//!
//! with `Q = q^(−1/2)`, and `σ = (t + 1/t)/2`, `δ = (t − 1/t)/2`. In the
//! infinite-dimensional regime every radicand is positive and the `t_i` are
//! purely imaginary; in the finite regime the radicands are negative and the
//! `t_i` become real.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of powers `g·q^k` scanned for singularities at construction.
pub const DEFAULT_SCAN_DEPTH: usize = 1024;

/// Tolerance used to detect a vanishing denominator.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Strict sign conditions; imaginary `t_i`.
    Infinite,
    /// Real `t_i`; used together with a truncation condition.
    Finite,
    /// Closed-interval variant of `Infinite` that admits `|β₁| = 1`, `|β₄| = 1`.
    FreeBoundary,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "infinite" => Ok(Mode::Infinite),
            "finite" => Ok(Mode::Finite),
            "free" | "free-boundary" => Ok(Mode::FreeBoundary),
            other => Err(Error::Domain(format!(
                "unknown mode `{other}` (expected infinite|finite|free)"
            ))),
        }
    }
}

/// Immutable parameter set with every derived scalar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterSet {
    pub beta: [f64; 4],
    pub q: f64,
    /// `Q = q^(−1/2)`.
    pub big_q: f64,
    pub t: [Complex64; 4],
    pub sigma: [Complex64; 4],
    pub delta: [Complex64; 4],
    /// `g = β₁β₂β₃β₄`.
    pub g: f64,
    /// `(β₂q^(−1/2), β₁q^(1/2), β₄q^(1/2), β₃q^(−1/2))`.
    pub tilde_beta: [f64; 4],
    pub mode: Mode,
}

/// Square root of a real number as a complex number, principal branch with
/// `√(−x) = +i√x`.
pub fn csqrt_real(x: f64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

/// The β̃ map used by the adjacent (α) family.
pub fn tilde(beta: [f64; 4], q: f64) -> [f64; 4] {
    let s = q.sqrt();
    [beta[1] / s, beta[0] * s, beta[3] * s, beta[2] / s]
}

fn validate(beta: [f64; 4], q: f64, mode: Mode) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} must lie in (0, 1)")));
    }
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::Domain("β values must be finite".into()));
    }
    let [b1, b2, b3, b4] = beta;
    match mode {
        Mode::Infinite => {
            let ok = 0.0 < b1 && b1 < 1.0 && 0.0 < b2 && b2 < 1.0 && -1.0 < b3 && b3 < 0.0
                && -1.0 < b4
                && b4 < 0.0;
            if !ok {
                return Err(Error::Domain(format!(
                    "infinite mode needs 0<β₁<1, 0<β₂<1, −1<β₃<0, −1<β₄<0; got {beta:?}"
                )));
            }
        }
        Mode::FreeBoundary => {
            let ok = 0.0 < b1 && b1 <= 1.0 && 0.0 < b2 && b2 <= 1.0 && (-1.0..0.0).contains(&b3)
                && (-1.0..0.0).contains(&b4);
            if !ok {
                return Err(Error::Domain(format!(
                    "free-boundary mode needs 0<β₁≤1, 0<β₂≤1, −1≤β₃<0, −1≤β₄<0; got {beta:?}"
                )));
            }
        }
        Mode::Finite => {
            if beta.contains(&0.0) {
                return Err(Error::Domain("finite mode needs nonzero β".into()));
            }
            // Real t_i need β₄/β₁ > 0, β₁β₄ > 0, β₂β₃ > 0 and β₃/β₂ > 0.
            if b1 * b4 <= 0.0 || b2 * b3 <= 0.0 {
                return Err(Error::Domain(format!(
                    "finite mode needs β₁β₄ > 0 and β₂β₃ > 0 (real t_i); got {beta:?}"
                )));
            }
        }
    }
    Ok(())
}

/// Builds a [`ParameterSet`], scanning `g·q^k` for `−1 ≤ k ≤ 2·DEFAULT_SCAN_DEPTH`.
pub fn derive_parameters(beta: [f64; 4], q: f64, mode: Mode) -> Result<ParameterSet> {
    derive_parameters_with_depth(beta, q, mode, DEFAULT_SCAN_DEPTH)
}

/// As [`derive_parameters`] with an explicit singularity scan depth.
pub fn derive_parameters_with_depth(
    beta: [f64; 4],
    q: f64,
    mode: Mode,
    depth: usize,
) -> Result<ParameterSet> {
    validate(beta, q, mode)?;
    let [b1, b2, b3, b4] = beta;
    let big_q = 1.0 / q.sqrt();
    let i = Complex64::i();
    let t = [
        i * csqrt_real(-b4 / b1),
        i * csqrt_real(-b1 * b4),
        i * big_q * csqrt_real(-b2 * b3),
        i * csqrt_real(-b3 / b2),
    ];
    if t.iter().any(|ti| ti.norm() == 0.0) {
        return Err(Error::Domain("some t_i vanishes".into()));
    }
    let sigma = t.map(|ti| (ti + ti.inv()) * 0.5);
    let delta = t.map(|ti| (ti - ti.inv()) * 0.5);
    let p = ParameterSet {
        beta,
        q,
        big_q,
        t,
        sigma,
        delta,
        g: b1 * b2 * b3 * b4,
        tilde_beta: tilde(beta, q),
        mode,
    };
    // The infinite regimes have 0 < |g| < 1 so the scan only matters when finite.
    p.check_depth(depth)?;
    Ok(p)
}

impl ParameterSet {
    /// Fails if some denominator `1 − g·q^k` vanishes for `−1 ≤ k ≤ 2·depth`.
    pub fn check_depth(&self, depth: usize) -> Result<()> {
        if self.mode == Mode::Finite {
            let mut gk = self.g / self.q;
            for k in -1..=(2 * depth as i64) {
                if (1.0 - gk).abs() < SINGULAR_TOL {
                    return Err(Error::Singularity(format!("g·q^{k} = 1")));
                }
                gk *= self.q;
            }
        }
        Ok(())
    }

    /// The free point `β = (1, √q, −√q, −1)` where every `t_i = i`.
    pub fn free(q: f64) -> Result<Self> {
        let s = q.sqrt();
        derive_parameters([1.0, s, -s, -1.0], q, Mode::FreeBoundary)
    }

    /// True when every Verblunsky coefficient vanishes (all `t_i = i`).
    pub fn is_free(&self) -> bool {
        self.t
            .iter()
            .all(|t| (t - Complex64::i()).norm() < 1e-12)
    }
}
