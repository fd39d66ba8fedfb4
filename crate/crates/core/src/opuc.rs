//! Orthogonal polynomials on the unit circle with real Verblunsky parameters,
//! the Laurent basis, the Schur pencil `L − zM` and the CMV operator `U = ML`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::daha::{symmetrize, BuildOptions, Reflection, Representation};
use crate::daha::coefficients::co;
use crate::error::{Error, Result};
use crate::operator::{max_abs_window, BandedOperator};
use crate::params::ParameterSet;

/// Highest degree supported by the evaluation routines.
pub const DEGREE_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `a_n`, from the pencil `R₁ − zR₂`.
    A,
    /// `α_n`, from the pencil `R₄ − zR₃` with the gauge removed.
    Alpha,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Family::A),
            "alpha" => Ok(Family::Alpha),
            _ => Err(Error::Domain(format!("unknown family `{s}` (expected a|alpha)"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::A => "a",
            Family::Alpha => "alpha",
        })
    }
}

/// Finite table of real Verblunsky parameters `value(0..len)` with the
/// conventions `value(−1) = −1` and `value(−2) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerblunskySource {
    pub family: Family,
    values: Vec<f64>,
}

impl VerblunskySource {
    pub fn from_values(family: Family, values: Vec<f64>) -> Self {
        VerblunskySource { family, values }
    }

    /// Tabulates `len` coefficients from the closed forms.
    pub fn from_params(family: Family, p: &ParameterSet, len: usize) -> Result<Self> {
        p.check_depth(len)?;
        let f = match family {
            Family::A => crate::daha::coeff_a,
            Family::Alpha => crate::daha::coeff_alpha,
        };
        // At the free point every coefficient vanishes identically; the
        // closed form reproduces that only up to rounding.
        if p.is_free() {
            return Ok(VerblunskySource { family, values: vec![0.0; len] });
        }
        let values = (0..len as i64).map(|n| f(n, p)).collect::<Result<_>>()?;
        Ok(VerblunskySource { family, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, n: i64) -> f64 {
        match n {
            -1 => -1.0,
            -2 => 0.0,
            _ if n < -2 => panic!("Verblunsky index {n} < −2"),
            _ => *self
                .values
                .get(n as usize)
                .unwrap_or_else(|| panic!("Verblunsky index {n} beyond table of {}", self.values.len())),
        }
    }

    /// `√(1 − value(n)²)`.
    pub fn co(&self, n: i64) -> f64 {
        co(self.value(n))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn require(&self, n: usize) -> Result<()> {
        if n > self.values.len() {
            Err(Error::Domain(format!(
                "{n} Verblunsky parameters needed, {} available",
                self.values.len()
            )))
        } else {
            Ok(())
        }
    }
}

/// Monic `Φ_n` with real coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonicOPUC {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl MonicOPUC {
    /// Coefficients of `Φ*_n(z) = zⁿ Φ_n(1/z)`.
    pub fn reversed(&self) -> Vec<f64> {
        self.coeffs.iter().rev().copied().collect()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z)
    }

    pub fn eval_star(&self, z: Complex64) -> Complex64 {
        horner(&self.reversed(), z)
    }

    /// Sup norm of the coefficient vector.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

pub fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * z + ck)
}

/// `Φ_0, …, Φ_n` from `Φ_{k+1}(z) = zΦ_k(z) − a_k Φ*_k(z)`.
pub fn szego_family(n: usize, src: &VerblunskySource) -> Result<Vec<MonicOPUC>> {
    if n > DEGREE_CAP {
        return Err(Error::Domain(format!("degree {n} above cap {DEGREE_CAP}")));
    }
    src.require(n)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = vec![1.0];
    out.push(MonicOPUC {
        degree: 0,
        coeffs: cur.clone(),
    });
    for k in 0..n {
        let a = src.value(k as i64);
        let mut next = vec![0.0; k + 2];
        for (j, &c) in cur.iter().enumerate() {
            next[j + 1] += c;
            // Φ*_k has coefficients reversed.
            next[j] -= a * cur[k - j];
        }
        cur = next;
        out.push(MonicOPUC {
            degree: k + 1,
            coeffs: cur.clone(),
        });
    }
    Ok(out)
}

pub fn szego_polynomial(n: usize, src: &VerblunskySource) -> Result<MonicOPUC> {
    Ok(szego_family(n, src)?.pop().expect("family is nonempty"))
}

/// `(Φ_k(z), Φ*_k(z))` for `k = 0..=n`, by the pointwise recursion.
pub fn szego_values(n: usize, z: Complex64, src: &VerblunskySource) -> Result<Vec<(Complex64, Complex64)>> {
    src.require(n)?;
    let mut out = Vec::with_capacity(n + 1);
    let (mut p, mut ps) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    out.push((p, ps));
    for k in 0..n {
        let a = src.value(k as i64);
        let np = z * p - ps * a;
        let nps = ps - z * p * a;
        p = np;
        ps = nps;
        out.push((p, ps));
    }
    Ok(out)
}

/// `φ_0(z), …, φ_n(z)` with `φ_{2m}(z) = zᵐ Φ_{2m}(1/z)` and
/// `φ_{2m+1}(z) = z^(−m) Φ_{2m+1}(z)`.
pub fn laurent_values(n: usize, z: Complex64, src: &VerblunskySource) -> Result<Vec<Complex64>> {
    if z.norm() == 0.0 {
        return Err(Error::Domain("Laurent basis undefined at z = 0".into()));
    }
    let vals = szego_values(n, z, src)?;
    Ok(vals
        .iter()
        .enumerate()
        .map(|(k, &(p, ps))| {
            let m = (k / 2) as i32;
            if k % 2 == 0 {
                // zᵐ Φ_{2m}(1/z) = z^(−m) Φ*_{2m}(z) for real coefficients.
                ps * z.powi(-m)
            } else {
                p * z.powi(-m)
            }
        })
        .collect())
}

pub fn laurent_basis(n: usize, z: Complex64, src: &VerblunskySource) -> Result<Complex64> {
    Ok(*laurent_values(n, z, src)?.last().expect("nonempty"))
}

/// Symmetric CMV factors of size `n` from a Verblunsky table:
/// `L = ⊕ Θ_{2k}`, `M = [1] ⊕ Θ_{2k+1}` with `Θ_j = [[a_j, r_j], [r_j, −a_j]]`.
/// Overflowing trailing blocks become the boundary scalar `±1`.
pub fn cmv_factors(n: usize, src: &VerblunskySource) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    src.require(n)?;
    let mut l = DMatrix::<f64>::zeros(n, n);
    let mut m = DMatrix::<f64>::zeros(n, n);
    m[(0, 0)] = 1.0;
    for k in 0..n {
        let target = if k % 2 == 0 { &mut l } else { &mut m };
        let a = src.value(k as i64);
        if k + 1 < n {
            let r = co(a);
            target[(k, k)] = a;
            target[(k, k + 1)] = r;
            target[(k + 1, k)] = r;
            target[(k + 1, k + 1)] = -a;
        } else {
            target[(k, k)] = if a < 0.0 { -1.0 } else { 1.0 };
        }
    }
    Ok((l, m))
}

#[derive(Debug, Clone)]
pub struct CMVOperator {
    pub u: BandedOperator<f64>,
    pub l: BandedOperator<f64>,
    pub m: BandedOperator<f64>,
    /// `max |UUᵀ − I|` over the trusted window.
    pub orthogonality_residual: f64,
}

impl CMVOperator {
    pub fn from_factors(l: BandedOperator<f64>, m: BandedOperator<f64>) -> Self {
        let u = &m.entries * &l.entries;
        let n = u.nrows();
        let margin = l.interior_margin.max(m.interior_margin) + 2;
        let orth = &u * u.transpose() - DMatrix::<f64>::identity(n, n);
        let u = BandedOperator::new(u, 2, margin.min(n));
        let w = u.window();
        CMVOperator {
            orthogonality_residual: max_abs_window(&orth, w),
            u,
            l,
            m,
        }
    }
}

/// Pencil factors of size `n` taken from the representation: `(R₁, R₂)` for
/// the a-family, the gauge-free `(R₄, R₃)` for the α-family.
pub fn pencil_factors(n: usize, family: Family, p: &ParameterSet) -> Result<(BandedOperator<f64>, BandedOperator<f64>)> {
    let opts = BuildOptions {
        allow_partial_block: true,
    };
    let rep = Representation::build(p, n, opts, 1)?;
    Ok(match family {
        Family::A => (rep.get(Reflection::R1).clone(), rep.get(Reflection::R2).clone()),
        Family::Alpha => (
            symmetrize(rep.get(Reflection::R4), &rep.coeffs),
            symmetrize(rep.get(Reflection::R3), &rep.coeffs),
        ),
    })
}

pub fn build_cmv(n: usize, family: Family, p: &ParameterSet) -> Result<CMVOperator> {
    let (l, m) = pencil_factors(n, family, p)?;
    Ok(CMVOperator::from_factors(l, m))
}

/// CMV operator straight from a Verblunsky table.
pub fn cmv_from_source(n: usize, src: &VerblunskySource) -> Result<CMVOperator> {
    let (l, m) = cmv_factors(n, src)?;
    Ok(CMVOperator::from_factors(
        BandedOperator::new(l, 1, 1),
        BandedOperator::new(m, 1, 1),
    ))
}

/// `v_k = φ_k(z) / ∏_{j<k} r_j`, the eigenvector of the pencil.
pub fn pencil_vector(n: usize, z: Complex64, src: &VerblunskySource) -> Result<Vec<Complex64>> {
    let phi = laurent_values(n, z, src)?;
    let mut norm = 1.0;
    Ok(phi
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            if k > 0 {
                norm *= src.co(k as i64 - 1);
            }
            v / norm
        })
        .collect())
}

/// `max_{row ≤ N−3} |((L − zM)v)_row| / max(1, |v|_max)` with `L, M` of size
/// `N + 1` and `v = (φ₀(z), …, φ_N(z))` normalized.
pub fn pencil_residual(z: Complex64, n: usize, family: Family, p: &ParameterSet) -> Result<f64> {
    if z.norm() == 0.0 {
        return Err(Error::Domain("pencil undefined at z = 0".into()));
    }
    if n < 4 {
        return Err(Error::Window(format!("N = {n} leaves no trusted pencil rows")));
    }
    let src = VerblunskySource::from_params(family, p, n + 1)?;
    let (l, m) = pencil_factors(n + 1, family, p)?;
    let v = pencil_vector(n, z, &src)?;
    let vmax = v.iter().fold(0.0f64, |acc, x| acc.max(x.norm()));
    let mut worst: f64 = 0.0;
    for row in 0..=(n - 3) {
        let mut s = Complex64::new(0.0, 0.0);
        for col in row.saturating_sub(1)..=(row + 1).min(n) {
            s += (z * -m.entries[(row, col)] + l.entries[(row, col)]) * v[col];
        }
        worst = worst.max(s.norm());
    }
    Ok(worst / vmax.max(1.0))
}
