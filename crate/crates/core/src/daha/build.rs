//! Reflections `R₁..R₄` and Hecke generators `T_i = σ_i I + δ_i R_i`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::coefficients::RepCoefficients;
use crate::error::{Error, Result};
use crate::operator::{complexify, BandedOperator};
use crate::params::ParameterSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reflection {
    R1,
    R2,
    R3,
    R4,
}

impl Reflection {
    pub const ALL: [Reflection; 4] = [Reflection::R1, Reflection::R2, Reflection::R3, Reflection::R4];

    pub fn index(self) -> usize {
        match self {
            Reflection::R1 => 0,
            Reflection::R2 => 1,
            Reflection::R3 => 2,
            Reflection::R4 => 3,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Reflection::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::Domain(format!("reflection index {} out of 1..4", i + 1)))
    }
}

impl fmt::Display for Reflection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.index() + 1)
    }
}

impl FromStr for Reflection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R1" | "r1" => Ok(Reflection::R1),
            "R2" | "r2" => Ok(Reflection::R2),
            "R3" | "r3" => Ok(Reflection::R3),
            "R4" | "r4" => Ok(Reflection::R4),
            _ => Err(Error::Domain(format!("unknown reflection `{s}`"))),
        }
    }
}

/// Whether a trailing 1×1 block may be created (odd `N`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    pub allow_partial_block: bool,
}

fn check_size(n: usize, opts: BuildOptions) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("matrix size {n} < 2")));
    }
    if n % 2 == 1 && !opts.allow_partial_block {
        return Err(Error::Domain(format!(
            "odd size {n} splits a 2×2 block; pass --allow-partial-block to pad it"
        )));
    }
    Ok(())
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Places the block `[[c, up], [down, −c]]` at `(k, k)`. A block that would
/// overflow is replaced by the boundary scalar `±1`; returns whether that
/// happened.
fn put_block(m: &mut DMatrix<f64>, k: usize, c: f64, up: f64, down: f64) -> bool {
    let n = m.nrows();
    if k + 1 < n {
        m[(k, k)] = c;
        m[(k, k + 1)] = up;
        m[(k + 1, k)] = down;
        m[(k + 1, k + 1)] = -c;
        false
    } else {
        m[(k, k)] = sign(c);
        true
    }
}

/// `N×N` section of `R_i` from tabulated coefficients (`coeffs.n_max ≥ N − 1`).
pub fn reflection_from(which: Reflection, n: usize, c: &RepCoefficients) -> BandedOperator<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut padded = false;
    let start = match which {
        Reflection::R1 | Reflection::R4 => 0,
        Reflection::R2 | Reflection::R3 => {
            m[(0, 0)] = 1.0;
            1
        }
    };
    for k in (start..n).step_by(2) {
        let ki = k as i64;
        padded |= match which {
            Reflection::R1 | Reflection::R2 => put_block(&mut m, k, c.a(ki), c.r(ki), c.r(ki)),
            Reflection::R3 | Reflection::R4 => {
                let (al, rho) = (c.alpha(ki), c.rho(ki));
                let zeta = if k + 1 < n { c.zeta(k) } else { 1.0 };
                put_block(&mut m, k, al, rho * zeta, rho / zeta)
            }
        };
    }
    BandedOperator::new(m, 1, usize::from(padded))
}

/// `N×N` section of `R_i`; odd `N` is rejected unless explicitly allowed.
pub fn build_reflection_opts(
    which: Reflection,
    n: usize,
    p: &ParameterSet,
    opts: BuildOptions,
) -> Result<BandedOperator<f64>> {
    check_size(n, opts)?;
    p.check_depth(n)?;
    let c = RepCoefficients::compute(p, n)?;
    Ok(reflection_from(which, n, &c))
}

pub fn build_reflection(which: Reflection, n: usize, p: &ParameterSet) -> Result<BandedOperator<f64>> {
    build_reflection_opts(which, n, p, BuildOptions::default())
}

/// Removes the `ζ` gauge: `S·R·S⁻¹` with `S = diag(z₀, z₁, …)`.
pub fn symmetrize(op: &BandedOperator<f64>, c: &RepCoefficients) -> BandedOperator<f64> {
    let n = op.size();
    let m = DMatrix::from_fn(n, n, |i, j| op.entries[(i, j)] * c.z(i) / c.z(j));
    BandedOperator::new(m, op.bandwidth, op.interior_margin)
}

/// `T_i` and `T_i⁻¹ = σ_i I − δ_i R_i`.
#[derive(Debug, Clone)]
pub struct HeckeGenerator {
    pub which: usize,
    pub t: BandedOperator<Complex64>,
    pub inverse: BandedOperator<Complex64>,
}

pub fn hecke_from(i: usize, r: &BandedOperator<f64>, p: &ParameterSet) -> HeckeGenerator {
    let n = r.size();
    let rc = complexify(&r.entries);
    let id = DMatrix::<Complex64>::identity(n, n);
    let (s, d) = (p.sigma[i], p.delta[i]);
    let t = &id * s + &rc * d;
    let inv = &id * s - &rc * d;
    HeckeGenerator {
        which: i + 1,
        t: BandedOperator::new(t, 1, r.interior_margin),
        inverse: BandedOperator::new(inv, 1, r.interior_margin),
    }
}

/// `T_i` for `i ∈ 1..=4`.
pub fn build_t(i: usize, n: usize, p: &ParameterSet) -> Result<HeckeGenerator> {
    build_t_opts(i, n, p, BuildOptions::default())
}

pub fn build_t_opts(i: usize, n: usize, p: &ParameterSet, opts: BuildOptions) -> Result<HeckeGenerator> {
    if !(1..=4).contains(&i) {
        return Err(Error::Domain(format!("T index {i} outside 1..4")));
    }
    let r = build_reflection_opts(Reflection::from_index(i - 1)?, n, p, opts)?;
    Ok(hecke_from(i - 1, &r, p))
}

/// All four reflections of one size together with their coefficients.
#[derive(Debug, Clone)]
pub struct Representation {
    pub params: ParameterSet,
    pub coeffs: RepCoefficients,
    pub n: usize,
    pub r: [BandedOperator<f64>; 4],
}

impl Representation {
    /// `extra` additional coefficient indices are tabulated beyond `N`.
    pub fn build(p: &ParameterSet, n: usize, opts: BuildOptions, extra: usize) -> Result<Self> {
        check_size(n, opts)?;
        p.check_depth(n + extra)?;
        let c = RepCoefficients::compute(p, n + extra)?;
        let r = Reflection::ALL.map(|w| reflection_from(w, n, &c));
        Ok(Representation {
            params: p.clone(),
            coeffs: c,
            n,
            r,
        })
    }

    pub fn get(&self, w: Reflection) -> &BandedOperator<f64> {
        &self.r[w.index()]
    }

    pub fn hecke(&self, i: usize) -> HeckeGenerator {
        hecke_from(i, &self.r[i], &self.params)
    }
}
