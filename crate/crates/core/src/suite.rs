//! End-to-end regression presets: every module check bundled into one
//! deterministic, serializable report.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{affine_comparison, build_xy, casimir, central_extension, check_xy, split_sectors};
use crate::askey_wilson::{verify_circle_identity, AwFamily};
use crate::daha::{coeff_a, coeff_alpha, verify_derivation_system, verify_involutions, verify_product_relation, BuildOptions};
use crate::error::{Error, Result};
use crate::interval::{check_identity, s1_recurrence, s2_recurrence, v1, v2, ChristoffelData, Identity};
use crate::opuc::{pencil_residual, szego_family, Family, VerblunskySource};
use crate::params::{derive_parameters, Mode, ParameterSet};
use crate::truncation::{analyze_truncation, TruncationCondition, TruncationKind};
use crate::VERSION;

/// Version of the JSON layout of every report.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Free,
    Generic,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(Preset::Free),
            "generic" => Ok(Preset::Generic),
            _ => Err(Error::Domain(format!("unknown preset `{s}` (expected free|generic)"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Free => "free",
            Preset::Generic => "generic",
        })
    }
}

/// Default tolerances, keyed by check name.
pub fn default_tolerances() -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("involution", 1e-13),
        ("quadratic", 1e-12),
        ("product", 1e-10),
        ("product-free", 1e-13),
        ("derivation", 1e-11),
        ("free-coefficients", 1e-14),
        ("free-szego", 0.0),
        ("free-v", 1e-14),
        ("free-chebyshev", 1e-12),
        ("free-sectors", 1e-12),
        ("aw-identity", 1e-9),
        ("spectrum", 1e-11),
        ("spectrum-pairing", 1e-11),
        ("aw3-fit", 1e-8),
        ("aw3-free-constants", 1e-9),
        ("central-extension", 1e-8),
        ("casimir", 1e-9),
        ("affine", 1e-9),
        ("christoffel", 1e-10),
        ("christoffel-ratios", 1e-10),
        ("pencil", 1e-10),
        ("trunc-boundary", 1e-10),
        ("trunc-unitary", 1e-12),
        ("trunc-spectrum", 1e-10),
        ("trunc-orthogonality", 1e-9),
        ("trunc-real-t", 1e-14),
    ])
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub preset: Preset,
    pub params: ParameterSet,
    pub n: usize,
    pub seed: u64,
    /// Random infinite-mode draws for the relation checks.
    pub draws: usize,
    /// Random draws added to the Askey–Wilson identification.
    pub aw_draws: usize,
    pub tolerances: BTreeMap<String, f64>,
}

impl SuiteConfig {
    pub fn new(preset: Preset, params: ParameterSet, n: usize, seed: u64) -> Self {
        SuiteConfig {
            preset,
            params,
            n,
            seed,
            draws: 100,
            aw_draws: 10,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances
            .get(name)
            .copied()
            .or_else(|| default_tolerances().get(name).copied())
            .unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub version: &'static str,
    pub preset: Preset,
    pub seed: u64,
    pub n: usize,
    pub params: ParameterSet,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// `β₁, β₂ ∈ (0.05, 0.95)`, `β₃, β₄ ∈ (−0.95, −0.05)` and `q ∈ [0.7, 0.95)`.
///
/// Smaller `q` makes the `ζ` gauge grow like `q^(−N/2)`, and the product
/// relation is then limited by `ε·max ζ` rather than by the construction.
pub fn random_infinite(rng: &mut impl Rng) -> Result<ParameterSet> {
    let mut b = || rng.gen_range(0.05..0.95);
    let beta = [b(), b(), -b(), -b()];
    let q = rng.gen_range(0.7..0.95);
    derive_parameters(beta, q, Mode::Infinite)
}

/// `n` seeded draws of [`random_infinite`].
pub fn random_draws(n: usize, seed: u64) -> Result<Vec<ParameterSet>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_infinite(&mut rng)).collect()
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn uniform_points(rng: &mut ChaCha8Rng, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..k).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Componentwise `(R_i² − I, (T_i − t_i)(T_i − t_i⁻¹), interior product)` residuals.
pub fn relation_residuals(n: usize, p: &ParameterSet) -> Result<(f64, f64, f64)> {
    let inv = verify_involutions(n, p, BuildOptions::default())?;
    let prod = verify_product_relation(n, p)?;
    Ok((inv.max_square_scaled(), inv.max_quadratic_scaled(), prod.scaled_max()))
}

/// Worst Askey–Wilson identification residual over the four families.
pub fn aw_identity(p: &ParameterSet, n_max: usize, samples: usize, seed: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for fam in AwFamily::ALL {
        worst = worst.max(verify_circle_identity(fam, n_max, samples, p, seed)?.max_residual);
    }
    Ok(worst)
}

/// Largest `|ỹ_{2m−1} − ỹ_{2m}|` (relative) on the window.
pub fn spectrum_pairing(y: &nalgebra::DMatrix<f64>, w: usize) -> f64 {
    max_of((1..w.saturating_sub(1)).step_by(2).map(|k| {
        let (a, b) = (y[(k, k)], y[(k + 1, k + 1)]);
        (a - b).abs() / a.abs().max(1.0)
    }))
}

/// `K_n` and `L_n` against evaluated ratios of `S⁽¹⁾` at `±1`, `n ≤ n_max`.
pub fn christoffel_ratios(src: &VerblunskySource, n_max: usize) -> Result<f64> {
    let s1 = s1_recurrence(src, 2 * n_max + 4)?;
    let cd = ChristoffelData::new(src);
    let (at1, atm1) = (s1.eval_all(n_max + 2, 1.0), s1.eval_all(n_max + 2, -1.0));
    let mut worst: f64 = 0.0;
    for n in 0..=n_max {
        let k = cd.k(n);
        worst = worst.max((at1[n + 2] / at1[n] - k).abs() / k.abs().max(1.0));
        worst = worst.max((atm1[n + 2] / atm1[n] - k).abs() / k.abs().max(1.0));
        let l = cd.l(n);
        worst = worst.max((atm1[n + 1] / atm1[n] - l).abs() / l.abs().max(1.0));
    }
    Ok(worst)
}

/// Pencil eigenrelation residual at `k` seeded unimodular points, both families.
pub fn pencil_check(n: usize, p: &ParameterSet, k: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let z = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
        for fam in [Family::A, Family::Alpha] {
            worst = worst.max(pencil_residual(z, n, fam, p)?);
        }
    }
    Ok(worst)
}

/// Worst of the truncation metrics over `N ∈ orders` for the `β₁β₄` branch.
pub struct TruncationMetrics {
    pub boundary: f64,
    pub unitary: f64,
    pub spectrum: f64,
    pub orthogonality: f64,
    pub real_t: f64,
}

pub fn truncation_metrics(orders: &[usize], q: f64) -> Result<TruncationMetrics> {
    let mut m = TruncationMetrics {
        boundary: 0.0,
        unitary: 0.0,
        spectrum: 0.0,
        orthogonality: 0.0,
        real_t: 0.0,
    };
    for &order in orders {
        let c = TruncationCondition::new(TruncationKind::B1B4, order)?;
        let r = analyze_truncation(&c, None, q)?;
        let s = &r.spectrum;
        m.boundary = m.boundary.max((r.boundary - 1.0).abs());
        m.unitary = m.unitary.max(s.unitarity);
        m.spectrum = m.spectrum.max(max_of([s.modulus, s.conjugation, s.weight_pairing]));
        m.orthogonality = m.orthogonality.max(r.orthogonality.offdiag);
        m.real_t = m.real_t.max(r.t_imaginary);
    }
    Ok(m)
}

/// Free-case checks on the circle and interval side: coefficients, Szegő
/// polynomials, `v`'s and the Chebyshev values at `k` seeded points.
pub struct FreeMetrics {
    pub coefficients: f64,
    pub szego: f64,
    pub v: f64,
    pub chebyshev: f64,
}

pub fn free_metrics(p: &ParameterSet, n: usize, deg: usize, k: usize, seed: u64) -> Result<FreeMetrics> {
    // Through the closed forms, not the tabulated values (exact at this point).
    let mut coefficients: f64 = 0.0;
    for k in 0..n as i64 {
        coefficients = coefficients.max(coeff_a(k, p)?.abs()).max(coeff_alpha(k, p)?.abs());
    }
    let src = VerblunskySource::from_params(Family::A, p, n)?;
    let szego = max_of(szego_family(deg, &src)?.iter().flat_map(|ph| {
        ph.coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| (c - if j == ph.degree { 1.0 } else { 0.0 }).abs())
            .collect::<Vec<_>>()
    }));
    // The first nonzero coefficient of S⁽¹⁾ is v₁ = 1/2, all others are 1/4.
    let mut v = (v1(&src, 1) - 0.5).abs();
    for j in 1..deg {
        if j >= 2 {
            v = v.max((v1(&src, j) - 0.25).abs());
        }
        v = v.max((v2(&src, j) - 0.25).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (r1, r2) = (s1_recurrence(&src, deg + 1)?, s2_recurrence(&src, deg + 1)?);
    let mut cheb: f64 = 0.0;
    for x in uniform_points(&mut rng, k, -0.99, 0.99) {
        let th = x.acos();
        let (e1, e2) = (r1.eval_all(deg, x), r2.eval_all(deg, x));
        for j in 0..=deg {
            let t = if j == 0 { 1.0 } else { 2f64.powi(1 - j as i32) * (j as f64 * th).cos() };
            let u = 2f64.powi(-(j as i32)) * ((j + 1) as f64 * th).sin() / th.sin();
            cheb = cheb.max((e1[j] - t).abs()).max((e2[j] - u).abs());
        }
    }
    Ok(FreeMetrics {
        coefficients,
        szego,
        v,
        chebyshev: cheb,
    })
}

/// Sector eigen-polynomials against `2ⁿT_n(x/2) = 2cos nφ` and
/// `2ⁿU_n(x/2) = sin((n+1)φ)/sin φ`, `x = 2cos φ`, relative to `max(1, |value|)`.
pub fn free_sector_check(xy: &crate::algebra::XYPair, deg: usize, k: usize, seed: u64) -> Result<f64> {
    let (e, o) = split_sectors(xy)?;
    let deg = deg.min(e.window - 1).min(o.window - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for x in uniform_points(&mut rng, k, -1.98, 1.98) {
        let ph = (x / 2.0).acos();
        let (pe, po) = (e.recurrence.eval_all(deg, x), o.recurrence.eval_all(deg, x));
        for j in 0..=deg {
            let t = if j == 0 { 1.0 } else { 2.0 * (j as f64 * ph).cos() };
            let u = ((j + 1) as f64 * ph).sin() / ph.sin();
            worst = worst.max((pe[j] - t).abs() / t.abs().max(1.0));
            worst = worst.max((po[j] - u).abs() / u.abs().max(1.0));
        }
    }
    Ok(worst)
}

struct Collector<'a> {
    cfg: &'a SuiteConfig,
    checks: Vec<CheckResult>,
}

impl Collector<'_> {
    fn push(&mut self, name: &str, value: Result<f64>) {
        let tolerance = self.cfg.tolerance(name);
        let (value, error) = match value {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(format!("{}: {e}", e.kind()))),
        };
        let passed = if tolerance == 0.0 { value == 0.0 } else { value < tolerance };
        self.checks.push(CheckResult {
            name: name.to_string(),
            value,
            tolerance,
            passed,
            error,
        });
    }
}

/// Degrees used by the interval and Askey–Wilson checks.
const DEGREE: usize = 12;
const AW_DEGREE: usize = 10;
const SAMPLES: usize = 20;
const TRUNCATION_ORDERS: [usize; 3] = [2, 3, 5];

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.n < 24 {
        return Err(Error::Window(format!("suite needs N ≥ 24, got {}", cfg.n)));
    }
    if cfg.tolerances.values().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain("tolerances must be positive".into()));
    }
    if cfg.preset == Preset::Free && !cfg.params.is_free() {
        return Err(Error::Domain("the free preset needs the free parameter point".into()));
    }
    let p = &cfg.params;
    let n = cfg.n;
    let seed = cfg.seed;
    let mut c = Collector { cfg, checks: Vec::new() };

    // Relations at the configured point and over random draws.
    let draws = random_draws(cfg.draws, seed)?;
    let rel: Result<Vec<(f64, f64, f64)>> = std::iter::once(p)
        .chain(draws.iter())
        .map(|d| relation_residuals(n, d))
        .collect();
    match rel {
        Ok(r) => {
            c.push("involution", Ok(max_of(r.iter().map(|t| t.0))));
            c.push("quadratic", Ok(max_of(r.iter().map(|t| t.1))));
            c.push("product", Ok(max_of(r.iter().map(|t| t.2))));
        }
        Err(e) => {
            for k in ["involution", "quadratic", "product"] {
                c.push(k, Err(e.clone()));
            }
        }
    }
    if cfg.preset == Preset::Free {
        c.push(
            "product-free",
            verify_product_relation(n, p).map(|r| r.scaled.free_residual.unwrap_or(f64::NAN)),
        );
    }
    c.push("derivation", verify_derivation_system(n, p).map(|r| r.max_core()));

    if cfg.preset == Preset::Free {
        match free_metrics(p, n, DEGREE + 1, SAMPLES, seed) {
            Ok(m) => {
                c.push("free-coefficients", Ok(m.coefficients));
                c.push("free-szego", Ok(m.szego));
                c.push("free-v", Ok(m.v));
                c.push("free-chebyshev", Ok(m.chebyshev));
            }
            Err(e) => c.push("free-coefficients", Err(e)),
        }
    }

    // Askey–Wilson identification: the configured point plus random draws.
    let aw_points: Vec<ParameterSet> = std::iter::once(p.clone())
        .chain(random_draws(cfg.aw_draws, seed.wrapping_add(1))?)
        .collect();
    let aw: Result<f64> = aw_points
        .iter()
        .map(|d| aw_identity(d, AW_DEGREE, SAMPLES, seed))
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)));
    c.push("aw-identity", aw);

    // The XY pair: spectrum, AW(3) fits, central extension, affine map.
    match build_xy(n, p) {
        Ok(xy) => {
            let w = xy.window();
            c.push("spectrum", check_xy(&xy).map(|r| r.spectrum));
            c.push("spectrum-pairing", Ok(spectrum_pairing(&xy.y.entries, w)));
            match central_extension(&xy) {
                Ok(r) => {
                    c.push("aw3-fit", Ok(r.even.residual.max(r.odd.residual)));
                    c.push("central-extension", Ok(r.max_residual()));
                    if cfg.preset == Preset::Free {
                        let target = -(p.q - 1.0 / p.q).powi(2);
                        let dev = max_of([&r.even, &r.odd].iter().flat_map(|s| {
                            s.c.iter()
                                .enumerate()
                                .map(|(k, &v)| if k == 3 || k == 5 { (v - target).abs() } else { v.abs() })
                                .collect::<Vec<_>>()
                        }));
                        c.push("aw3-free-constants", Ok(dev));
                    }
                }
                Err(e) => c.push("aw3-fit", Err(e)),
            }
            c.push("affine", affine_comparison(&xy).map(|a| a.even_residual.max(a.odd_residual)));
            if cfg.preset == Preset::Free {
                c.push("casimir", casimir(&xy).map(|r| r.scalar_error));
                c.push("free-sectors", free_sector_check(&xy, DEGREE + 1, SAMPLES, seed));
            }
        }
        Err(e) => c.push("spectrum", Err(e)),
    }

    // Interval side: Christoffel transforms and ratio formulas.
    let src = VerblunskySource::from_params(Family::A, p, 2 * DEGREE + 8)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let xs = uniform_points(&mut rng, SAMPLES, -0.99, 0.99);
    let chr: Result<f64> = [Identity::SsCt, Identity::S3Ct, Identity::Split]
        .iter()
        .map(|&id| check_identity(id, &src, DEGREE, &xs))
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)));
    c.push("christoffel", chr);
    c.push("christoffel-ratios", christoffel_ratios(&src, DEGREE));

    c.push("pencil", pencil_check(n, p, SAMPLES, seed.wrapping_add(3)));

    match truncation_metrics(&TRUNCATION_ORDERS, p.q) {
        Ok(m) => {
            c.push("trunc-boundary", Ok(m.boundary));
            c.push("trunc-unitary", Ok(m.unitary));
            c.push("trunc-spectrum", Ok(m.spectrum));
            c.push("trunc-orthogonality", Ok(m.orthogonality));
            c.push("trunc-real-t", Ok(m.real_t));
        }
        Err(e) => c.push("trunc-boundary", Err(e)),
    }

    let passed = c.checks.iter().all(|k| k.passed);
    Ok(SuiteReport {
        schema: SCHEMA,
        version: VERSION,
        preset: cfg.preset,
        seed,
        n,
        params: p.clone(),
        checks: c.checks,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(r: &SuiteReport) -> String {
        r.checks
            .iter()
            .map(|c| format!("{} {:e} < {:e} {}", c.name, c.value, c.tolerance, c.passed))
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn free_preset_passes() {
        let cfg = SuiteConfig {
            draws: 5,
            aw_draws: 2,
            ..SuiteConfig::new(Preset::Free, ParameterSet::free(0.64).unwrap(), 64, 7)
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.passed, "{}", show(&r));
    }

    #[test]
    fn generic_preset_passes() {
        let p = derive_parameters([0.6, 0.5, -0.5, -0.4], 0.7, Mode::Infinite).unwrap();
        let cfg = SuiteConfig {
            draws: 5,
            aw_draws: 2,
            ..SuiteConfig::new(Preset::Generic, p, 64, 7)
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.passed, "{}", show(&r));
    }

    #[test]
    fn draws_are_reproducible() {
        let a = random_draws(4, 11).unwrap();
        let b = random_draws(4, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.t.iter().all(|t| t.re == 0.0)));
    }

    #[test]
    fn preset_mismatch() {
        let p = derive_parameters([0.6, 0.5, -0.5, -0.4], 0.7, Mode::Infinite).unwrap();
        assert!(run_suite(&SuiteConfig::new(Preset::Free, p, 64, 1)).is_err());
    }
}
