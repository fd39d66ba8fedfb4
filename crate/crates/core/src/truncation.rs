//! Finite-dimensional reductions: truncation conditions on `β`, the finite
//! involutions `L`, `M`, the spectrum of `U = ML` and finite orthogonality.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::Serialize;

use crate::daha::coefficients::closed_form;
use crate::error::{Error, Result};
use crate::operator::{complexify, max_abs};
use crate::opuc::{cmv_factors, szego_family, szego_values, Family, VerblunskySource};
use crate::params::{derive_parameters, tilde, Mode, ParameterSet};

/// Tolerance for the boundary coefficient `|a_N| = 1`.
pub const BOUNDARY_TOL: f64 = 1e-10;
/// Minimal angular separation of the finite spectrum.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Interior coefficients must satisfy `|a_n| < 1 − INTERIOR_GAP`.
pub const INTERIOR_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationKind {
    /// `β₁β₄ = q^(−N−1)`, boundary at `2N + 1`.
    B1B4,
    /// `β₂β₃ = q^(−N)`, boundary at `2N + 1`.
    B2B3,
    /// `β_iβ_k = q^(−M)` (1-based, `i < k`), boundary at `2M`.
    Even(usize, usize),
    /// `g = q^(−N)`; rejected.
    Forbidden,
}

impl FromStr for TruncationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b1b4" => return Ok(TruncationKind::B1B4),
            "b2b3" => return Ok(TruncationKind::B2B3),
            "forbidden" => return Ok(TruncationKind::Forbidden),
            _ => {}
        }
        let bad = || Error::Domain(format!("unknown truncation kind `{s}` (expected b1b4|b2b3|even:i,k|forbidden)"));
        let pair = s.strip_prefix("even:").ok_or_else(bad)?;
        let (i, k) = pair.split_once(',').ok_or_else(bad)?;
        let (i, k): (usize, usize) = (i.trim().parse().map_err(|_| bad())?, k.trim().parse().map_err(|_| bad())?);
        if i == k || !(1..=4).contains(&i) || !(1..=4).contains(&k) {
            return Err(Error::Domain(format!("invalid index pair ({i},{k})")));
        }
        Ok(TruncationKind::Even(i.min(k), i.max(k)))
    }
}

impl fmt::Display for TruncationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruncationKind::B1B4 => f.write_str("b1b4"),
            TruncationKind::B2B3 => f.write_str("b2b3"),
            TruncationKind::Even(i, k) => write!(f, "even:{i},{k}"),
            TruncationKind::Forbidden => f.write_str("forbidden"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TruncationCondition {
    pub kind: TruncationKind,
    pub order: usize,
}

impl TruncationCondition {
    pub fn new(kind: TruncationKind, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("truncation order must be at least 1".into()));
        }
        Ok(TruncationCondition { kind, order })
    }

    /// Index `N` at which `|a_N| = 1`.
    pub fn index(&self) -> usize {
        match self.kind {
            TruncationKind::Even(..) => 2 * self.order,
            _ => 2 * self.order + 1,
        }
    }

    /// Zero-based `(i, k)` of the constrained pair; `β_k` is solved for.
    fn pair(&self) -> Result<(usize, usize)> {
        match self.kind {
            TruncationKind::B1B4 => Ok((0, 3)),
            TruncationKind::B2B3 => Ok((1, 2)),
            TruncationKind::Even(i, k) => Ok((i - 1, k - 1)),
            TruncationKind::Forbidden => Err(forbidden()),
        }
    }

    /// Required value of `β_iβ_k`.
    pub fn product(&self, q: f64) -> f64 {
        let m = self.order as i32;
        match self.kind {
            TruncationKind::B1B4 => q.powi(-m - 1),
            _ => q.powi(-m),
        }
    }
}

fn forbidden() -> Error {
    Error::ForbiddenCondition(
        "g = q^(−N) leads to the para q-Racah regime, which is not implemented".into(),
    )
}

/// Checks a candidate: real `t_i`, interior `|a_n|, |α_n| < 1` and `|a_N| = 1`.
/// Returns the boundary value `a_N`.
fn admissible(beta: [f64; 4], q: f64, idx: usize) -> Result<f64> {
    if !(beta[0] * beta[3] > 0.0 && beta[1] * beta[2] > 0.0) {
        return Err(Error::Domain("finite mode needs β₁β₄ > 0 and β₂β₃ > 0".into()));
    }
    let tb = tilde(beta, q);
    for n in 0..idx as i64 {
        let a = closed_form(n, beta, q)?;
        let al = closed_form(n, tb, q)?;
        if !(a.abs() < 1.0 - INTERIOR_GAP && al.abs() < 1.0 - INTERIOR_GAP) {
            return Err(Error::Domain(format!(
                "r²_{n} or ρ²_{n} not positive (a = {a}, α = {al})"
            )));
        }
    }
    let an = closed_form(idx as i64, beta, q)?;
    if (an.abs() - 1.0).abs() > BOUNDARY_TOL {
        return Err(Error::Truncation(format!("|a_{idx}| = {} ≠ 1", an.abs())));
    }
    Ok(an)
}

/// Closed-form default for `β₁β₄ = q^(−N−1)`:
/// `s = q^(−(N+1)/2)`, `c = 2q^(−N/2)`, `β = (cs, β₂, √q, s/c)` with
/// `β₂ = ½·min(1/(cs), c/s, q^(N+1)/√q)`.
pub fn default_b1b4(order: usize, q: f64) -> [f64; 4] {
    let n = order as f64;
    let s = q.powf(-(n + 1.0) / 2.0);
    let c = 2.0 * q.powf(-n / 2.0);
    let b3 = q.sqrt();
    let b2 = 0.5 * (1.0 / (c * s)).min(c / s).min(q.powf(n + 1.0) / b3);
    [c * s, b2, b3, s / c]
}

fn search_grid() -> Vec<f64> {
    let (lo, hi, k) = (0.05f64.ln(), 20f64.ln(), 25);
    let pos: Vec<f64> = (0..k).map(|j| (lo + (hi - lo) * j as f64 / (k - 1) as f64).exp()).collect();
    pos.iter().copied().chain(pos.iter().map(|v| -v)).collect()
}

/// Deterministic log-grid search over the three unconstrained `β`'s.
fn grid_default(cond: &TruncationCondition, q: f64) -> Result<[f64; 4]> {
    let (i, k) = cond.pair()?;
    let free: Vec<usize> = (0..4).filter(|&j| j != k).collect();
    let grid = search_grid();
    let prod = cond.product(q);
    for &x in &grid {
        for &y in &grid {
            for &z in &grid {
                let mut b = [0.0; 4];
                b[free[0]] = x;
                b[free[1]] = y;
                b[free[2]] = z;
                b[k] = prod / b[i];
                if admissible(b, q, cond.index()).is_ok() {
                    return Ok(b);
                }
            }
        }
    }
    Err(Error::Domain(format!(
        "no admissible parameters found for {} of order {}",
        cond.kind, cond.order
    )))
}

/// Solves the truncation condition for `β_k` and validates the result.
///
/// `free_betas` are the three remaining `β`'s in ascending index order; when
/// absent a default satisfying all positivity requirements is used.
pub fn solve_truncation(cond: &TruncationCondition, free_betas: Option<[f64; 3]>, q: f64) -> Result<ParameterSet> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} outside (0, 1)")));
    }
    let (i, k) = cond.pair()?;
    let prod = cond.product(q);
    let mut beta = match free_betas {
        Some(f) => {
            let mut b = [0.0; 4];
            for (slot, v) in (0..4).filter(|&j| j != k).zip(f) {
                b[slot] = v;
            }
            if b[i] == 0.0 {
                return Err(Error::Domain(format!("β_{} must be nonzero", i + 1)));
            }
            b
        }
        None => match cond.kind {
            TruncationKind::B1B4 => default_b1b4(cond.order, q),
            TruncationKind::B2B3 => tilde(default_b1b4(cond.order, q), q),
            _ => grid_default(cond, q)?,
        },
    };
    beta[k] = prod / beta[i];
    let g: f64 = beta.iter().product();
    let idx = cond.index();
    for m in 0..=(2 * idx as i32 + 2) {
        if (g * q.powi(m) - 1.0).abs() < 1e-12 {
            return Err(forbidden());
        }
    }
    admissible(beta, q, idx)?;
    derive_parameters(beta, q, Mode::Finite)
}

/// Verblunsky table `a_0..=a_N` with the boundary value snapped to `±1`.
pub fn finite_source(p: &ParameterSet, nt: usize) -> Result<VerblunskySource> {
    let mut vals = VerblunskySource::from_params(Family::A, p, nt + 1)?.values().to_vec();
    let an = vals[nt];
    if (an.abs() - 1.0).abs() > BOUNDARY_TOL {
        return Err(Error::Truncation(format!("|a_{nt}| = {} ≠ 1", an.abs())));
    }
    for (n, v) in vals[..nt].iter().enumerate() {
        if v.abs() >= 1.0 {
            return Err(Error::Truncation(format!("|a_{n}| = {} ≥ 1 before the boundary", v.abs())));
        }
    }
    vals[nt] = an.signum();
    Ok(VerblunskySource::from_values(Family::A, vals))
}

/// `(N+1)×(N+1)` involutions `L`, `M`; the terminating block is the scalar `a_N = ±1`.
pub fn build_finite_lm(nt: usize, p: &ParameterSet) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let src = finite_source(p, nt)?;
    cmv_factors(nt + 1, &src)
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteSpectrum {
    pub eigenvalues: Vec<Complex64>,
    /// `θ_s ∈ [0, 2π)`, ascending.
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
    /// `max |U*U − I|`.
    pub unitarity: f64,
    /// `max | |λ_s| − 1 |`.
    pub modulus: f64,
    pub min_gap: f64,
    /// Distance from each `conj(λ_s)` to the nearest eigenvalue.
    pub conjugation: f64,
    /// Weight difference across conjugate pairs.
    pub weight_pairing: f64,
}

/// Eigen-decomposition of `U = ML`; weights are `|v_s[0]|²`.
pub fn finite_spectrum(l: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<FiniteSpectrum> {
    let n = l.nrows();
    let u = m * l;
    let unitarity = max_abs(&(u.transpose() * &u - DMatrix::<f64>::identity(n, n)));
    let (qm, t) = Schur::new(complexify(&u)).unpack();
    let mut pairs: Vec<(f64, Complex64, f64)> = (0..n)
        .map(|s| {
            let lam = t[(s, s)];
            let mut th = lam.arg();
            if th < 0.0 {
                th += 2.0 * std::f64::consts::PI;
            }
            let col = qm.column(s);
            (th, lam, col[0].norm_sqr() / col.norm_squared())
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut min_gap = f64::INFINITY;
    for s in 0..n {
        for r in 0..s {
            min_gap = min_gap.min((pairs[s].1 - pairs[r].1).norm());
        }
    }
    if n > 1 && min_gap < DEGENERACY_TOL {
        return Err(Error::Degeneracy(format!("eigenvalues within {min_gap:e} of each other")));
    }
    let mut conj: f64 = 0.0;
    let mut wp: f64 = 0.0;
    for s in 0..n {
        let target = pairs[s].1.conj();
        let (r, d) = (0..n)
            .map(|r| (r, (pairs[r].1 - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        conj = conj.max(d);
        wp = wp.max((pairs[s].2 - pairs[r].2).abs());
    }
    Ok(FiniteSpectrum {
        modulus: pairs.iter().map(|p| (p.1.norm() - 1.0).abs()).fold(0.0, f64::max),
        eigenvalues: pairs.iter().map(|p| p.1).collect(),
        angles: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.2).collect(),
        unitarity,
        min_gap,
        conjugation: conj,
        weight_pairing: wp,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityReport {
    pub n: usize,
    /// `max_{m≠n} |G_mn| / √(G_mm G_nn)`.
    pub offdiag: f64,
    /// `max |G_nn − h_n| / h_n` with `h_n = ∏_{k<n}(1 − a_k²)`.
    pub diagonal: f64,
    pub norms: Vec<f64>,
    pub total_mass: f64,
    /// `max_s |Φ_{N+1}(λ_s)| / Σ|coefficients|`.
    pub root_residual: f64,
}

/// `G_mn = Σ_s ρ_s Φ_m(λ_s) conj(Φ_n(λ_s))` for `m, n ≤ N`.
pub fn finite_orthogonality(spec: &FiniteSpectrum, src: &VerblunskySource, nt: usize) -> Result<OrthogonalityReport> {
    let vals: Vec<Vec<Complex64>> = spec
        .eigenvalues
        .iter()
        .map(|&z| szego_values(nt, z, src).map(|v| v.into_iter().map(|p| p.0).collect()))
        .collect::<Result<_>>()?;
    let g = |a: usize, b: usize| -> Complex64 {
        vals.iter()
            .zip(&spec.weights)
            .map(|(v, w)| v[a] * v[b].conj() * *w)
            .sum()
    };
    let mut norms = Vec::with_capacity(nt + 1);
    let mut h = 1.0;
    for k in 0..=nt {
        norms.push(h);
        h *= 1.0 - src.value(k as i64).powi(2);
    }
    let diag: Vec<f64> = (0..=nt).map(|k| g(k, k).re).collect();
    let mut off: f64 = 0.0;
    let mut dg: f64 = 0.0;
    for a in 0..=nt {
        dg = dg.max((diag[a] - norms[a]).abs() / norms[a]);
        for b in 0..a {
            off = off.max(g(a, b).norm() / (diag[a] * diag[b]).sqrt());
        }
    }
    if let Some(k) = norms.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Positivity(format!("h_{k} = {} is not positive", norms[k])));
    }
    let top = szego_family(nt + 1, src)?.pop().expect("nonempty");
    let scale: f64 = top.coeffs.iter().map(|c| c.abs()).sum();
    let root = spec
        .eigenvalues
        .iter()
        .map(|&z| top.eval(z).norm() / scale)
        .fold(0.0, f64::max);
    Ok(OrthogonalityReport {
        n: nt,
        offdiag: off,
        diagonal: dg,
        norms,
        total_mass: spec.weights.iter().sum(),
        root_residual: root,
    })
}

/// Everything about one truncation in a single report.
#[derive(Debug, Clone, Serialize)]
pub struct TruncationReport {
    pub condition: TruncationCondition,
    pub params: ParameterSet,
    pub index: usize,
    pub boundary: f64,
    pub involution: f64,
    pub t_imaginary: f64,
    pub spectrum: FiniteSpectrum,
    pub orthogonality: OrthogonalityReport,
}

pub fn analyze_truncation(cond: &TruncationCondition, free_betas: Option<[f64; 3]>, q: f64) -> Result<TruncationReport> {
    let p = solve_truncation(cond, free_betas, q)?;
    let nt = cond.index();
    let boundary = closed_form(nt as i64, p.beta, q)?;
    let (l, m) = build_finite_lm(nt, &p)?;
    let id = DMatrix::<f64>::identity(nt + 1, nt + 1);
    let involution = max_abs(&(&l * &l - &id)).max(max_abs(&(&m * &m - &id)));
    let spectrum = finite_spectrum(&l, &m)?;
    let src = finite_source(&p, nt)?;
    let orthogonality = finite_orthogonality(&spectrum, &src, nt)?;
    Ok(TruncationReport {
        condition: *cond,
        index: nt,
        boundary,
        involution,
        t_imaginary: p.t.iter().map(|t| t.im.abs()).fold(0.0, f64::max),
        params: p,
        spectrum,
        orthogonality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_kinds() {
        assert_eq!("b1b4".parse::<TruncationKind>().unwrap(), TruncationKind::B1B4);
        assert_eq!("even:3,1".parse::<TruncationKind>().unwrap(), TruncationKind::Even(1, 3));
        assert!("even:2,2".parse::<TruncationKind>().is_err());
        assert!("odd".parse::<TruncationKind>().is_err());
    }

    #[test]
    fn b1b4_boundary_factor_vanishes() {
        // The odd closed form carries (1 − β₁β₄q^(N+1)), which is zero here.
        for q in [0.5, 0.7, 0.8, 0.9] {
            for n in 1..=8 {
                let c = TruncationCondition::new(TruncationKind::B1B4, n).unwrap();
                let p = solve_truncation(&c, None, q).unwrap();
                let [b1, _, _, b4] = p.beta;
                assert!((1.0 - b1 * b4 * q.powi(n as i32 + 1)).abs() < 1e-14);
                let a = closed_form(c.index() as i64, p.beta, q).unwrap();
                assert!((a - 1.0).abs() < 1e-10, "q={q} N={n}: {a}");
                assert!(p.t.iter().all(|t| t.im.abs() < 1e-14));
            }
        }
    }

    #[test]
    fn all_kinds_reach_the_boundary() {
        for q in [0.5, 0.7, 0.9] {
            let mut kinds = vec![TruncationKind::B2B3];
            kinds.extend([(1, 2), (1, 3), (2, 4), (3, 4)].map(|(i, k)| TruncationKind::Even(i, k)));
            for kind in kinds {
                for m in [1, 2, 4] {
                    let c = TruncationCondition::new(kind, m).unwrap();
                    let p = solve_truncation(&c, None, q).unwrap_or_else(|e| panic!("{kind} {m} {q}: {e}"));
                    let a = closed_form(c.index() as i64, p.beta, q).unwrap();
                    assert!((a.abs() - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn b2b3_default_signs() {
        let c = TruncationCondition::new(TruncationKind::B2B3, 3).unwrap();
        let p = solve_truncation(&c, None, 0.8).unwrap();
        assert!((p.beta[1] * p.beta[2] - 0.8f64.powi(-3)).abs() < 1e-12 * 0.8f64.powi(-3));
        assert!((closed_form(7, p.beta, 0.8).unwrap() + 1.0).abs() < 1e-10);
    }

    #[test]
    fn forbidden_and_bad_input() {
        let c = TruncationCondition::new(TruncationKind::Forbidden, 2).unwrap();
        assert!(matches!(solve_truncation(&c, None, 0.7), Err(Error::ForbiddenCondition(_))));
        let c = TruncationCondition::new(TruncationKind::B1B4, 2).unwrap();
        // Negative β₂β₃ gives imaginary t.
        assert!(matches!(solve_truncation(&c, Some([2.0, 0.5, -0.5]), 0.7), Err(Error::Domain(_))));
    }

    #[test]
    fn finite_lm_shape() {
        let q = 0.8;
        let c = TruncationCondition::new(TruncationKind::B1B4, 3).unwrap();
        let p = solve_truncation(&c, None, q).unwrap();
        let (l, m) = build_finite_lm(7, &p).unwrap();
        assert_eq!(l.nrows(), 8);
        // N odd: L has complete blocks, M ends with the scalar a₇ = 1.
        assert_eq!(m[(7, 7)], 1.0);
        assert_eq!(m[(6, 7)], 0.0);
        let id = DMatrix::<f64>::identity(8, 8);
        assert!(max_abs(&(&l * &l - &id)) < 1e-13 && max_abs(&(&m * &m - &id)) < 1e-13);
        assert_eq!(l, l.transpose());
        // Even boundary: the scalar sits in L.
        let c = TruncationCondition::new(TruncationKind::Even(1, 2), 3).unwrap();
        let p = solve_truncation(&c, None, q).unwrap();
        let (l, _) = build_finite_lm(6, &p).unwrap();
        assert_eq!(l[(6, 6)].abs(), 1.0);
        assert_eq!(l[(5, 6)], 0.0);
        assert!(matches!(build_finite_lm(5, &p), Err(Error::Truncation(_))));
    }

    #[test]
    fn spectrum_and_orthogonality() {
        for q in [0.7, 0.8] {
            for n in [2, 3, 5] {
                let c = TruncationCondition::new(TruncationKind::B1B4, n).unwrap();
                let r = analyze_truncation(&c, None, q).unwrap();
                let s = &r.spectrum;
                assert_eq!(s.eigenvalues.len(), 2 * n + 2);
                assert!(s.unitarity < 1e-12 && s.modulus < 1e-10, "{s:?}");
                assert!(s.conjugation < 1e-10 && s.weight_pairing < 1e-10, "{s:?}");
                let o = &r.orthogonality;
                assert!((o.total_mass - 1.0).abs() < 1e-12);
                assert!(o.offdiag < 1e-9 && o.diagonal < 1e-9, "{o:?}");
                assert!(o.root_residual < 1e-8);
                assert!(o.norms.iter().all(|&h| h > 0.0));
            }
        }
    }

    #[test]
    fn every_kind_has_finite_orthogonality() {
        let q = 0.7;
        for kind in [TruncationKind::B2B3, TruncationKind::Even(1, 3), TruncationKind::Even(3, 4)] {
            let c = TruncationCondition::new(kind, 2).unwrap();
            let r = analyze_truncation(&c, None, q).unwrap();
            assert!(r.orthogonality.offdiag < 1e-9, "{kind}: {:?}", r.orthogonality);
        }
    }
}
