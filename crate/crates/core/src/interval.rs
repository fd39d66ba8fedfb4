//! Interval polynomials obtained from a real Verblunsky sequence: the
//! symmetric families `S⁽¹⁾`, `S⁽²⁾`, the non-symmetric `S⁽³⁾`, the even–odd
//! splits `P`, `Q`, the Christoffel data linking them, and discrete spectral
//! measures from Jacobi matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::daha::{BuildOptions, Representation};
use crate::error::{Error, Result};
use crate::operator::BandedOperator;
use crate::opuc::{szego_values, VerblunskySource};
use crate::params::ParameterSet;

/// Monic recurrence `p_{n+1} = (x − b_n)p_n − u_n p_{n−1}`, `p_0 = 1`.
///
/// `sub[0]` is unused and stored as zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeTermRecurrence {
    pub diag: Vec<f64>,
    pub sub: Vec<f64>,
    pub monic: bool,
}

impl ThreeTermRecurrence {
    pub fn from_fn(len: usize, b: impl Fn(usize) -> f64, u: impl Fn(usize) -> f64) -> Self {
        ThreeTermRecurrence {
            diag: (0..len).map(&b).collect(),
            sub: (0..len).map(|n| if n == 0 { 0.0 } else { u(n) }).collect(),
            monic: true,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `p_0(x), …, p_n(x)`; needs `n ≤ len`.
    pub fn eval_all(&self, n: usize, x: f64) -> Vec<f64> {
        assert!(n <= self.len(), "degree {n} beyond recurrence length {}", self.len());
        let mut out = Vec::with_capacity(n + 1);
        let (mut prev, mut cur) = (0.0, 1.0);
        out.push(cur);
        for k in 0..n {
            let next = (x - self.diag[k]) * cur - if k >= 1 { self.sub[k] * prev } else { 0.0 };
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    pub fn eval(&self, n: usize, x: f64) -> f64 {
        *self.eval_all(n, x).last().expect("nonempty")
    }

    /// Fails unless `u_k > 0` for `1 ≤ k < n`.
    pub fn check_positive(&self, n: usize) -> Result<()> {
        for k in 1..n.min(self.len()) {
            if !(self.sub[k] > 0.0) {
                return Err(Error::Positivity(format!("u_{k} = {} is not positive", self.sub[k])));
            }
        }
        Ok(())
    }

    /// Symmetric `n×n` Jacobi matrix (`b_k` on the diagonal, `√u_k` beside it).
    pub fn jacobi(&self, n: usize) -> Result<DMatrix<f64>> {
        if n > self.len() {
            return Err(Error::Domain(format!("Jacobi size {n} beyond recurrence length {}", self.len())));
        }
        self.check_positive(n)?;
        let mut j = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            j[(k, k)] = self.diag[k];
            if k + 1 < n {
                let s = self.sub[k + 1].sqrt();
                j[(k, k + 1)] = s;
                j[(k + 1, k)] = s;
            }
        }
        Ok(j)
    }
}

/// Interval families reachable from a Verblunsky table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalFamily {
    S1,
    S2,
    S3,
    P1,
    P2,
    Q1,
    Q2,
}

impl FromStr for IntervalFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "s1" => IntervalFamily::S1,
            "s2" => IntervalFamily::S2,
            "s3" => IntervalFamily::S3,
            "p1" => IntervalFamily::P1,
            "p2" => IntervalFamily::P2,
            "q1" => IntervalFamily::Q1,
            "q2" => IntervalFamily::Q2,
            _ => return Err(Error::Domain(format!("unknown interval family `{s}`"))),
        })
    }
}

impl fmt::Display for IntervalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IntervalFamily::S1 => "s1",
            IntervalFamily::S2 => "s2",
            IntervalFamily::S3 => "s3",
            IntervalFamily::P1 => "p1",
            IntervalFamily::P2 => "p2",
            IntervalFamily::Q1 => "q1",
            IntervalFamily::Q2 => "q2",
        };
        f.write_str(s)
    }
}

fn require(src: &VerblunskySource, n: usize) -> Result<()> {
    if src.len() < n {
        Err(Error::Domain(format!(
            "{n} Verblunsky parameters needed, {} available",
            src.len()
        )))
    } else {
        Ok(())
    }
}

/// `v⁽¹⁾_n = (1 + a_{n−1})(1 − a_{n−2})/4`; `v⁽¹⁾_0 = 0`.
pub fn v1(src: &VerblunskySource, n: usize) -> f64 {
    let n = n as i64;
    (1.0 + src.value(n - 1)) * (1.0 - src.value(n - 2)) / 4.0
}

/// `v⁽²⁾_n = (1 + a_{n−1})(1 − a_n)/4`; `v⁽²⁾_0 = 0`.
pub fn v2(src: &VerblunskySource, n: usize) -> f64 {
    let n = n as i64;
    (1.0 + src.value(n - 1)) * (1.0 - src.value(n)) / 4.0
}

pub fn s1_recurrence(src: &VerblunskySource, len: usize) -> Result<ThreeTermRecurrence> {
    require(src, len)?;
    Ok(ThreeTermRecurrence::from_fn(len, |_| 0.0, |n| v1(src, n)))
}

pub fn s2_recurrence(src: &VerblunskySource, len: usize) -> Result<ThreeTermRecurrence> {
    require(src, len)?;
    Ok(ThreeTermRecurrence::from_fn(len, |_| 0.0, |n| v2(src, n)))
}

/// `b_n = (a_n − a_{n−1})/2`, `u_n = (1 − a²_{n−1})/4`.
pub fn s3_recurrence(src: &VerblunskySource, len: usize) -> Result<ThreeTermRecurrence> {
    require(src, len)?;
    Ok(ThreeTermRecurrence::from_fn(
        len,
        |n| (src.value(n as i64) - src.value(n as i64 - 1)) / 2.0,
        |n| (1.0 - src.value(n as i64 - 1).powi(2)) / 4.0,
    ))
}

/// `(P, Q)` with `S_{2n}(x) = P_n(x²)` and `S_{2n+1}(x) = x·Q_n(x²)`.
///
/// `P`: `B_n = v_{2n} + v_{2n+1}`, `U_n = v_{2n}v_{2n−1}`;
/// `Q`: `C_n = v_{2n+1} + v_{2n+2}`, `V_n = v_{2n}v_{2n+1}`.
pub fn even_odd_split(
    family: u8,
    src: &VerblunskySource,
    len: usize,
) -> Result<(ThreeTermRecurrence, ThreeTermRecurrence)> {
    let v: fn(&VerblunskySource, usize) -> f64 = match family {
        1 => v1,
        2 => v2,
        _ => return Err(Error::Domain(format!("split family {family} not in {{1, 2}}"))),
    };
    require(src, 2 * len + 2)?;
    let p = ThreeTermRecurrence::from_fn(
        len,
        |n| v(src, 2 * n) + v(src, 2 * n + 1),
        |n| v(src, 2 * n) * v(src, 2 * n - 1),
    );
    let q = ThreeTermRecurrence::from_fn(
        len,
        |n| v(src, 2 * n + 1) + v(src, 2 * n + 2),
        |n| v(src, 2 * n) * v(src, 2 * n + 1),
    );
    Ok((p, q))
}

/// Recurrence of the requested family with `len` coefficients.
pub fn family_recurrence(f: IntervalFamily, src: &VerblunskySource, len: usize) -> Result<ThreeTermRecurrence> {
    Ok(match f {
        IntervalFamily::S1 => s1_recurrence(src, len)?,
        IntervalFamily::S2 => s2_recurrence(src, len)?,
        IntervalFamily::S3 => s3_recurrence(src, len)?,
        IntervalFamily::P1 => even_odd_split(1, src, len)?.0,
        IntervalFamily::Q1 => even_odd_split(1, src, len)?.1,
        IntervalFamily::P2 => even_odd_split(2, src, len)?.0,
        IntervalFamily::Q2 => even_odd_split(2, src, len)?.1,
    })
}

/// Christoffel data relating `S⁽¹⁾` to `S⁽²⁾` (double, at ±1) and `S⁽³⁾`
/// (single, at −1).
#[derive(Debug, Clone)]
pub struct ChristoffelData<'a> {
    src: &'a VerblunskySource,
}

impl<'a> ChristoffelData<'a> {
    pub fn new(src: &'a VerblunskySource) -> Self {
        ChristoffelData { src }
    }

    /// `L_n = (a_{n−1} − 1)/2 = S⁽¹⁾_{n+1}(−1)/S⁽¹⁾_n(−1)`.
    pub fn l(&self, n: usize) -> f64 {
        (self.src.value(n as i64 - 1) - 1.0) / 2.0
    }

    /// `K_n = (1 − a_n)(1 − a_{n−1})/4 = S⁽¹⁾_{n+2}(1)/S⁽¹⁾_n(1)`.
    pub fn k(&self, n: usize) -> f64 {
        let n = n as i64;
        (1.0 - self.src.value(n)) * (1.0 - self.src.value(n - 1)) / 4.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    /// `S⁽²⁾_n = (S⁽¹⁾_{n+2} − K_n S⁽¹⁾_n)/(x² − 1)`.
    SsCt,
    /// `S⁽³⁾_n = (S⁽¹⁾_{n+1} − L_n S⁽¹⁾_n)/(x + 1)`.
    S3Ct,
    /// `S⁽¹,²⁾_{2n}(x) = P_n(x²)`, `S⁽¹,²⁾_{2n+1}(x) = x Q_n(x²)`.
    Split,
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ss-ct" => Ok(Identity::SsCt),
            "s3-ct" => Ok(Identity::S3Ct),
            "split" => Ok(Identity::Split),
            _ => Err(Error::Domain(format!("unknown identity `{s}` (expected ss-ct|s3-ct|split)"))),
        }
    }
}

/// Max pointwise defect of an identity over the given points, degrees `≤ n_max`.
pub fn check_identity(id: Identity, src: &VerblunskySource, n_max: usize, xs: &[f64]) -> Result<f64> {
    let len = 2 * n_max + 4;
    let s1 = s1_recurrence(src, len)?;
    let cd = ChristoffelData::new(src);
    let mut worst: f64 = 0.0;
    for &x in xs {
        let p1 = s1.eval_all(n_max + 2, x);
        match id {
            Identity::SsCt => {
                let p2 = s2_recurrence(src, len)?.eval_all(n_max, x);
                for n in 0..=n_max {
                    let rhs = (p1[n + 2] - cd.k(n) * p1[n]) / (x * x - 1.0);
                    worst = worst.max((p2[n] - rhs).abs() / p2[n].abs().max(1.0));
                }
            }
            Identity::S3Ct => {
                let p3 = s3_recurrence(src, len)?.eval_all(n_max, x);
                for n in 0..=n_max {
                    let rhs = (p1[n + 1] - cd.l(n) * p1[n]) / (x + 1.0);
                    worst = worst.max((p3[n] - rhs).abs() / p3[n].abs().max(1.0));
                }
            }
            Identity::Split => {
                for fam in [1u8, 2] {
                    let s = if fam == 1 { s1.clone() } else { s2_recurrence(src, len)? };
                    let (p, q) = even_odd_split(fam, src, n_max + 1)?;
                    let sv = s.eval_all(2 * n_max + 1, x);
                    let pv = p.eval_all(n_max, x * x);
                    let qv = q.eval_all(n_max, x * x);
                    for n in 0..=n_max {
                        worst = worst.max((sv[2 * n] - pv[n]).abs() / pv[n].abs().max(1.0));
                        worst = worst.max((sv[2 * n + 1] - x * qv[n]).abs() / qv[n].abs().max(1.0));
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// `w` on the upper unit half circle with `x = (w + 1/w)/2`.
fn circle_point(x: f64) -> Result<Complex64> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::Domain(format!("x = {x} must lie in (−1, 1)")));
    }
    Ok(Complex64::new(x, (1.0 - x * x).sqrt()))
}

/// `S⁽¹⁾_n(x) = 2^(−n) w^(−n) (Φ_n(z) + Φ*_n(z)) / (1 − a_{n−1})`, `z = w²`.
pub fn delsarte_genin_s1(n: usize, x: f64, src: &VerblunskySource) -> Result<f64> {
    let w = circle_point(x)?;
    let z = w * w;
    let (p, ps) = szego_values(n, z, src)?[n];
    let v = (p + ps) / (1.0 - src.value(n as i64 - 1)) * w.powi(-(n as i32)) * 2f64.powi(-(n as i32));
    Ok(v.re)
}

/// `S⁽²⁾_n(x) = 2^(−n) w^(−n) (zΦ_n(z) − Φ*_n(z)) / (z − 1)`, `z = w²`.
pub fn delsarte_genin_s2(n: usize, x: f64, src: &VerblunskySource) -> Result<f64> {
    let w = circle_point(x)?;
    let z = w * w;
    let (p, ps) = szego_values(n, z, src)?[n];
    let v = (z * p - ps) / (z - 1.0) * w.powi(-(n as i32)) * 2f64.powi(-(n as i32));
    Ok(v.re)
}

/// `J = R₁ + R₂`, tridiagonal with diagonal `a_n − a_{n−1}` and off-diagonal `r_n`.
pub fn jacobi_from_reflections(n: usize, p: &ParameterSet) -> Result<BandedOperator<f64>> {
    let rep = Representation::build(p, n, BuildOptions::default(), 0)?;
    Ok(BandedOperator::new(
        &rep.r[0].entries + &rep.r[1].entries,
        1,
        rep.r[1].interior_margin.max(rep.r[0].interior_margin),
    ))
}

/// Values at `x` of the formal eigenvector of a tridiagonal `J` for
/// eigenvalue `λ`, normalized by `p_0 = 1`.
pub fn tridiagonal_eigenvector(j: &DMatrix<f64>, lambda: f64, n: usize) -> Vec<f64> {
    let mut p = vec![1.0];
    for k in 0..n {
        let prev = if k > 0 { j[(k, k - 1)] * p[k - 1] } else { 0.0 };
        p.push(((lambda - j[(k, k)]) * p[k] - prev) / j[(k, k + 1)]);
    }
    p
}

/// Gauss rule of a recurrence.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `max_{m≠n ≤ deg} |G_mn| / √(G_mm G_nn)` for `G_mn = Σ w_s p_m p_n`.
    pub fn orthogonality_residual(&self, rec: &ThreeTermRecurrence, deg: usize) -> f64 {
        let vals: Vec<Vec<f64>> = self.nodes.iter().map(|&x| rec.eval_all(deg, x)).collect();
        gram_residual(&vals, &self.weights, deg)
    }
}

/// Normalized off-diagonal maximum of the Gram matrix of sampled polynomials.
pub fn gram_residual(vals: &[Vec<f64>], weights: &[f64], deg: usize) -> f64 {
    let g = |m: usize, n: usize| -> f64 {
        vals.iter()
            .zip(weights)
            .map(|(v, w)| w * v[m] * v[n])
            .sum()
    };
    let diag: Vec<f64> = (0..=deg).map(|k| g(k, k)).collect();
    let mut worst: f64 = 0.0;
    for m in 0..=deg {
        for n in 0..m {
            worst = worst.max(g(m, n).abs() / (diag[m] * diag[n]).sqrt());
        }
    }
    worst
}

/// Nodes are the eigenvalues of the `n×n` Jacobi matrix, weights the squared
/// first components of its normalized eigenvectors (total mass 1).
pub fn spectral_measure(rec: &ThreeTermRecurrence, n: usize) -> Result<DiscreteMeasure> {
    let j = rec.jacobi(n)?;
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(DiscreteMeasure {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opuc::Family;
    use crate::params::{derive_parameters, Mode};

    fn generic() -> ParameterSet {
        derive_parameters([0.6, 0.5, -0.5, -0.4], 0.7, Mode::Infinite).unwrap()
    }

    fn src(p: &ParameterSet, len: usize) -> VerblunskySource {
        VerblunskySource::from_params(Family::A, p, len).unwrap()
    }

    #[test]
    fn free_s1_s2_coefficients() {
        let f = ParameterSet::free(0.64).unwrap();
        let s = src(&f, 40);
        let r1 = s1_recurrence(&s, 20).unwrap();
        let r2 = s2_recurrence(&s, 20).unwrap();
        assert!((r1.sub[1] - 0.5).abs() < 1e-15);
        for n in 2..20 {
            assert!((r1.sub[n] - 0.25).abs() < 1e-15);
        }
        for n in 1..20 {
            assert!((r2.sub[n] - 0.25).abs() < 1e-15);
        }
        // S₂⁽¹⁾(x) = x² − 1/2.
        for x in [-0.7, 0.1, 0.9] {
            assert!((r1.eval(2, x) - (x * x - 0.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn free_chebyshev_values() {
        let f = ParameterSet::free(0.64).unwrap();
        let s = src(&f, 40);
        let r1 = s1_recurrence(&s, 20).unwrap();
        let r2 = s2_recurrence(&s, 20).unwrap();
        for k in 0..20 {
            let x = -0.95 + 0.1 * k as f64;
            let th = x.acos();
            for n in 1..15 {
                let t = (n as f64 * th).cos() * 2f64.powi(1 - n as i32);
                let u = ((n + 1) as f64 * th).sin() / th.sin() * 2f64.powi(-(n as i32));
                assert!((r1.eval(n, x) - t).abs() < 1e-12);
                assert!((r2.eval(n, x) - u).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generic_coefficients_by_formula() {
        let p = generic();
        let s = src(&p, 20);
        let a = |k: i64| crate::daha::coeff_a(k, &p).unwrap();
        let r2 = s2_recurrence(&s, 10).unwrap();
        assert!((r2.sub[1] - (1.0 + a(0)) * (1.0 - a(1)) / 4.0).abs() < 1e-16);
        let r1 = s1_recurrence(&s, 10).unwrap();
        assert!((r1.sub[3] - (1.0 + a(2)) * (1.0 - a(1)) / 4.0).abs() < 1e-16);
        let (_, q2) = even_odd_split(2, &s, 6).unwrap();
        for n in 1..6i64 {
            let want = (1.0 - a(2 * n + 1)) * (1.0 - a(2 * n).powi(2)) * (1.0 + a(2 * n - 1)) / 16.0;
            assert!((q2.sub[n as usize] - want).abs() < 1e-16);
        }
    }

    #[test]
    fn free_split_first_coefficient() {
        let f = ParameterSet::free(0.64).unwrap();
        let (p1, _) = even_odd_split(1, &src(&f, 40), 8).unwrap();
        assert!((p1.diag[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn christoffel_and_split_identities() {
        for p in [generic(), ParameterSet::free(0.64).unwrap()] {
            let s = src(&p, 40);
            let xs: Vec<f64> = (0..20).map(|k| -0.9 + 0.09 * k as f64 + 0.003).collect();
            assert!(check_identity(Identity::SsCt, &s, 12, &xs).unwrap() < 1e-10);
            assert!(check_identity(Identity::S3Ct, &s, 12, &xs).unwrap() < 1e-10);
            assert!(check_identity(Identity::Split, &s, 12, &xs).unwrap() < 1e-11);
        }
    }

    #[test]
    fn christoffel_ratios() {
        let p = generic();
        let s = src(&p, 40);
        let r1 = s1_recurrence(&s, 20).unwrap();
        let cd = ChristoffelData::new(&s);
        let at1 = r1.eval_all(16, 1.0);
        let atm1 = r1.eval_all(16, -1.0);
        for n in 0..12 {
            assert!((at1[n + 2] / at1[n] - cd.k(n)).abs() < 1e-10);
            assert!((atm1[n + 1] / atm1[n] - cd.l(n)).abs() < 1e-10);
            assert!(cd.l(n) < 0.0 && cd.k(n) >= 0.0);
        }
    }

    #[test]
    fn delsarte_genin_maps() {
        let p = generic();
        let s = src(&p, 40);
        let r1 = s1_recurrence(&s, 20).unwrap();
        let r2 = s2_recurrence(&s, 20).unwrap();
        for x in [-0.8, -0.2, 0.35, 0.77] {
            for n in 0..14 {
                assert!((delsarte_genin_s1(n, x, &s).unwrap() - r1.eval(n, x)).abs() < 1e-12);
                assert!((delsarte_genin_s2(n, x, &s).unwrap() - r2.eval(n, x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_from_reflections_is_s3() {
        for p in [generic(), ParameterSet::free(0.64).unwrap()] {
            let j = jacobi_from_reflections(32, &p).unwrap();
            assert_eq!(j.entries, j.entries.transpose());
            let s = src(&p, 40);
            let s3 = s3_recurrence(&s, 30).unwrap();
            for n in 0..30 {
                let a = |k: i64| s.value(k);
                assert!((j.entries[(n, n)] - (a(n as i64) - a(n as i64 - 1))).abs() < 1e-15);
                assert!((j.entries[(n, n + 1)] - s.co(n as i64)).abs() < 1e-15);
            }
            for k in 0..10 {
                let x = -0.9 + 0.19 * k as f64;
                let ev = tridiagonal_eigenvector(&j.entries, 2.0 * x, 20);
                let mut scale = 1.0;
                for n in 0..=20 {
                    let want = s3.eval(n, x);
                    assert!((ev[n] * scale - want).abs() < 1e-9 * want.abs().max(1.0));
                    if n < 20 {
                        scale *= j.entries[(n, n + 1)] / 2.0;
                    }
                }
            }
        }
        // Free case: diagonal 1 at the origin only.
        let j = jacobi_from_reflections(8, &ParameterSet::free(0.64).unwrap()).unwrap();
        assert!((j.entries[(0, 0)] - 1.0).abs() < 1e-15);
        assert!(j.entries[(3, 3)].abs() < 1e-15);
        assert!((j.entries[(0, 1)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_rule_orthogonality() {
        let f = ParameterSet::free(0.64).unwrap();
        let s = src(&f, 40);
        let r1 = s1_recurrence(&s, 20).unwrap();
        let m = spectral_measure(&r1, 8).unwrap();
        assert!((m.total_mass() - 1.0).abs() < 1e-14);
        assert!(m.orthogonality_residual(&r1, 7) < 1e-12);

        let p = generic();
        let s = src(&p, 80);
        for fam in [
            IntervalFamily::S1,
            IntervalFamily::S2,
            IntervalFamily::S3,
            IntervalFamily::P1,
            IntervalFamily::Q1,
            IntervalFamily::P2,
            IntervalFamily::Q2,
        ] {
            let rec = family_recurrence(fam, &s, 32).unwrap();
            let m = spectral_measure(&rec, 32).unwrap();
            assert!(m.orthogonality_residual(&rec, 16) < 1e-11, "{fam}");
        }
    }

    #[test]
    fn positivity_error() {
        let bad = ThreeTermRecurrence::from_fn(4, |_| 0.0, |n| if n == 2 { -0.1 } else { 0.2 });
        assert!(matches!(spectral_measure(&bad, 4), Err(Error::Positivity(_))));
    }
}
