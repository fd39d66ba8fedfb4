//! The operators `X = R₁R₂ + R₂R₁` and `Y = R₂R₃ + R₃R₂` in the basis that
//! diagonalizes `R₂`, their parity sectors, the AW(3) relations they satisfy,
//! and the free-case Casimir.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::askey_wilson::aw_spectrum;
use crate::daha::verify::{require_window, MARGIN_TRIPLE};
use crate::daha::{BuildOptions, RepCoefficients, Representation};
use crate::error::{Error, Result};
use crate::interval::{even_odd_split, ThreeTermRecurrence};
use crate::operator::{max_abs_window, BandedOperator};
use crate::opuc::{Family, VerblunskySource};
use crate::params::ParameterSet;

/// Off-diagonal size above which the sector split is rejected.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Relative singular-value floor of the regression matrix.
pub const RANK_TOL: f64 = 1e-12;

/// `S = [1] ⊕ [[−μ_i, ν_i], [ν_i, μ_i]]` over odd `i`, with
/// `μ_i = √((1 − a_i)/2)` and `ν_i = √((1 + a_i)/2)`.
#[derive(Debug, Clone)]
pub struct Diagonalizer {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub s: DMatrix<f64>,
}

pub fn build_diagonalizer(n: usize, c: &RepCoefficients) -> Result<Diagonalizer> {
    let mut s = DMatrix::<f64>::zeros(n, n);
    let (mut mu, mut nu) = (Vec::new(), Vec::new());
    if n > 0 {
        s[(0, 0)] = 1.0;
    }
    let mut i = 1;
    while i < n {
        if i + 1 == n {
            // Unpaired trailing index.
            s[(i, i)] = 1.0;
            break;
        }
        let a = c.a(i as i64);
        if a.abs() > 1.0 {
            return Err(Error::Domain(format!("|a_{i}| = {} > 1", a.abs())));
        }
        let (m, v) = (((1.0 - a) / 2.0).sqrt(), ((1.0 + a) / 2.0).sqrt());
        s[(i, i)] = -m;
        s[(i, i + 1)] = v;
        s[(i + 1, i)] = v;
        s[(i + 1, i + 1)] = m;
        mu.push(m);
        nu.push(v);
        i += 2;
    }
    Ok(Diagonalizer { mu, nu, s })
}

/// `X̃ = SXS`, `Ỹ = SYS` and `R̃₂ = SR₂S`, with `R₃` in the gauge of the
/// representation.
#[derive(Debug, Clone)]
pub struct XYPair {
    pub params: ParameterSet,
    pub n: usize,
    pub x: BandedOperator<f64>,
    pub y: BandedOperator<f64>,
    pub r2: BandedOperator<f64>,
    pub diagonalizer: Diagonalizer,
    pub coeffs: RepCoefficients,
}

impl XYPair {
    /// Trusted window for triple products.
    pub fn window(&self) -> usize {
        self.n.saturating_sub(MARGIN_TRIPLE)
    }

    /// `P_e = (I + R̃₂)/2`.
    pub fn p_even(&self) -> DMatrix<f64> {
        (DMatrix::identity(self.n, self.n) + &self.r2.entries) / 2.0
    }

    /// `P_o = (I − R̃₂)/2`.
    pub fn p_odd(&self) -> DMatrix<f64> {
        (DMatrix::identity(self.n, self.n) - &self.r2.entries) / 2.0
    }
}

pub fn build_xy(n: usize, p: &ParameterSet) -> Result<XYPair> {
    require_window(n, MARGIN_TRIPLE)?;
    let rep = Representation::build(p, n, BuildOptions { allow_partial_block: true }, 2)?;
    let d = build_diagonalizer(n, &rep.coeffs)?;
    let [r1, r2, r3, _] = &rep.r;
    let x = &r1.entries * &r2.entries + &r2.entries * &r1.entries;
    let y = &r2.entries * &r3.entries + &r3.entries * &r2.entries;
    let s = &d.s;
    Ok(XYPair {
        params: p.clone(),
        n,
        x: BandedOperator::new(s * x * s, 2, 4),
        y: BandedOperator::new(s * y * s, 0, 4),
        r2: BandedOperator::new(s * &r2.entries * s, 0, 2),
        diagonalizer: d,
        coeffs: rep.coeffs,
    })
}

/// `A_n`: `√((1 + a_{n−1})(1 − a²_{n−2})(1 − a_{n−3}))` for even `n`,
/// `√((1 − a_n)(1 − a²_{n−1})(1 + a_{n−2}))` for odd `n`.
pub fn closed_a_entry(n: usize, src: &VerblunskySource) -> f64 {
    let a = |k: i64| src.value(k);
    let n = n as i64;
    let v = if n % 2 == 0 {
        (1.0 + a(n - 1)) * (1.0 - a(n - 2).powi(2)) * (1.0 - a(n - 3))
    } else {
        (1.0 - a(n)) * (1.0 - a(n - 1).powi(2)) * (1.0 + a(n - 2))
    };
    v.max(0.0).sqrt()
}

/// `B_n`: `a_n(1 − a_{n−1}) − a_{n−2}(1 + a_{n−1})` for even `n`,
/// `a_{n−1}(1 − a_n) − a_{n+1}(1 + a_n)` for odd `n`.
pub fn closed_b_entry(n: usize, src: &VerblunskySource) -> f64 {
    let a = |k: i64| src.value(k);
    let n = n as i64;
    if n % 2 == 0 {
        a(n) * (1.0 - a(n - 1)) - a(n - 2) * (1.0 + a(n - 1))
    } else {
        a(n - 1) * (1.0 - a(n)) - a(n + 1) * (1.0 + a(n))
    }
}

/// Structural checks of an [`XYPair`] on its trusted window.
#[derive(Debug, Clone, Serialize)]
pub struct XYReport {
    pub n: usize,
    pub window: usize,
    pub s_involution: f64,
    pub s_symmetry: f64,
    /// Off-diagonal part of `R̃₂`.
    pub r2_offdiag: f64,
    /// Deviation of `diag R̃₂` from `(1, −1, 1, …)`.
    pub r2_alternation: f64,
    pub x_first_offdiag: f64,
    pub x_outside_band: f64,
    pub y_offdiag: f64,
    pub commutator_x: f64,
    pub commutator_y: f64,
    /// `X̃` against the closed `A_n`, `B_n`.
    pub closed_form: f64,
    /// `diag Ỹ` against the Askey–Wilson grid.
    pub spectrum: f64,
}

pub fn check_xy(xy: &XYPair) -> Result<XYReport> {
    let n = xy.n;
    let w = xy.window();
    let s = &xy.diagonalizer.s;
    let id = DMatrix::<f64>::identity(n, n);
    let offdiag = |m: &DMatrix<f64>| {
        let mut d = m.clone();
        d.fill_diagonal(0.0);
        max_abs_window(&d, w)
    };
    let (x, y, r2) = (&xy.x.entries, &xy.y.entries, &xy.r2.entries);
    let mut x_first: f64 = 0.0;
    let mut x_band: f64 = 0.0;
    let mut alt: f64 = 0.0;
    for i in 0..w {
        alt = alt.max((r2[(i, i)] - if i % 2 == 0 { 1.0 } else { -1.0 }).abs());
        for j in 0..w {
            match i.abs_diff(j) {
                1 => x_first = x_first.max(x[(i, j)].abs()),
                d if d > 2 => x_band = x_band.max(x[(i, j)].abs()),
                _ => {}
            }
        }
    }
    let src = VerblunskySource::from_params(Family::A, &xy.params, n + 2)?;
    let mut closed: f64 = 0.0;
    let mut spec: f64 = 0.0;
    for k in 0..w {
        closed = closed.max((x[(k, k)] - closed_b_entry(k, &src)).abs());
        if k >= 2 {
            closed = closed.max((x[(k - 2, k)] - closed_a_entry(k, &src)).abs());
        }
        let yk = aw_spectrum(k, &xy.params)?;
        spec = spec.max((y[(k, k)] - yk).abs() / yk.abs().max(1.0));
    }
    Ok(XYReport {
        n,
        window: w,
        s_involution: crate::operator::max_abs(&(s * s - &id)),
        s_symmetry: crate::operator::max_abs(&(s - s.transpose())),
        r2_offdiag: offdiag(r2),
        r2_alternation: alt,
        x_first_offdiag: x_first,
        x_outside_band: x_band,
        y_offdiag: offdiag(y),
        commutator_x: max_abs_window(&(x * r2 - r2 * x), w),
        commutator_y: max_abs_window(&(y * r2 - r2 * y), w),
        closed_form: closed,
        spectrum: spec,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Even,
    Odd,
}

impl Sector {
    pub fn offset(self) -> usize {
        match self {
            Sector::Even => 0,
            Sector::Odd => 1,
        }
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Sector::Even),
            "odd" => Ok(Sector::Odd),
            _ => Err(Error::Domain(format!("unknown sector `{s}` (expected even|odd)"))),
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
        })
    }
}

/// Restriction of `X̃`, `Ỹ` to one parity, together with the monic
/// recurrence of its eigen-polynomials.
#[derive(Debug, Clone)]
pub struct SectorOperators {
    pub sector: Sector,
    /// Tridiagonal `Z₁`.
    pub z1: DMatrix<f64>,
    /// Diagonal `Z₂`.
    pub z2: DMatrix<f64>,
    /// Number of sector indices whose full index lies in the trusted window.
    pub window: usize,
    pub recurrence: ThreeTermRecurrence,
}

fn sector_of(xy: &XYPair, sector: Sector) -> SectorOperators {
    let idx: Vec<usize> = (sector.offset()..xy.n).step_by(2).collect();
    let m = idx.len();
    let z1 = DMatrix::from_fn(m, m, |i, j| xy.x.entries[(idx[i], idx[j])]);
    let z2 = DMatrix::from_fn(m, m, |i, j| xy.y.entries[(idx[i], idx[j])]);
    let window = idx.iter().filter(|&&k| k < xy.window()).count();
    let recurrence = ThreeTermRecurrence::from_fn(
        window,
        |k| z1[(k, k)],
        |k| z1[(k - 1, k)] * z1[(k, k - 1)],
    );
    SectorOperators {
        sector,
        z1,
        z2,
        window,
        recurrence,
    }
}

/// Splits `X̃ = X⁽ᵉ⁾ ⊕ X⁽ᵒ⁾`, `Ỹ = Y⁽ᵉ⁾ ⊕ Y⁽ᵒ⁾`; fails if the odd
/// off-diagonals of `X̃` or any off-diagonal of `Ỹ` exceed [`STRUCTURE_TOL`].
pub fn split_sectors(xy: &XYPair) -> Result<(SectorOperators, SectorOperators)> {
    let w = xy.window();
    for i in 0..w {
        for j in 0..w {
            let xv = xy.x.entries[(i, j)].abs();
            let yv = xy.y.entries[(i, j)].abs();
            if (i + j) % 2 == 1 && xv > STRUCTURE_TOL * (1.0 + xy.x.entries[(i, i)].abs()) {
                return Err(Error::Structure(format!("X̃[{i},{j}] = {xv:e} couples the parity sectors")));
            }
            if i != j && yv > STRUCTURE_TOL * (1.0 + xy.y.entries[(i, i)].abs()) {
                return Err(Error::Structure(format!("Ỹ[{i},{j}] = {yv:e} is not diagonal")));
            }
        }
    }
    Ok((sector_of(xy, Sector::Even), sector_of(xy, Sector::Odd)))
}

/// Coefficients of one AW(3) relation together with its defect.
#[derive(Debug, Clone, Serialize)]
pub struct RelationFit {
    /// Coefficients of the basis `[Z_i², {Z₁,Z₂}, Z_i, Z_j, I]`.
    pub coefficients: [f64; 5],
    pub residual: f64,
    pub rows: usize,
}

/// The seven constants of
///
/// ```text
/// Z₁²Z₂ + Z₂Z₁² − (q+q⁻¹)Z₁Z₂Z₁ = a₁Z₁² + a₂{Z₁,Z₂} + a₃Z₁ + a₄Z₂ + a₅
/// Z₂²Z₁ + Z₁Z₂² − (q+q⁻¹)Z₂Z₁Z₂ = a₂Z₂² + a₁{Z₁,Z₂} + a₃Z₂ + a₆Z₁ + a₇
/// ```
///
/// with both relations fitted independently (five unknowns each).
#[derive(Debug, Clone, Serialize)]
pub struct StructureConstants {
    pub sector: Sector,
    pub c: [f64; 7],
    pub relation1: RelationFit,
    pub relation2: RelationFit,
    /// Largest mismatch of the constants shared between the two relations.
    pub shared_mismatch: f64,
    /// Largest defect of either relation.
    pub residual: f64,
}

fn abs_m(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.abs()
}

/// `max(rowmax_i, colmax_j)` of an entrywise magnitude matrix: the size of
/// the terms meeting in row `i` and column `j`.
///
/// Entries that vanish by parity or bandwidth only carry rounding noise of
/// their neighbours, so an entry-local scale would be meaningless there.
pub fn local_scale(mag: &DMatrix<f64>) -> DMatrix<f64> {
    let n = mag.nrows();
    let rows: Vec<f64> = (0..n).map(|i| mag.row(i).max()).collect();
    let cols: Vec<f64> = (0..n).map(|j| mag.column(j).max()).collect();
    DMatrix::from_fn(n, n, |i, j| rows[i].max(cols[j]))
}

/// `max |d_ij| / scale_ij` over the leading `w×w` block, skipping zero scales.
pub fn scaled_defect(d: &DMatrix<f64>, scale: &DMatrix<f64>, w: usize) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..w {
        for j in 0..w {
            if scale[(i, j)] > 0.0 {
                r = r.max(d[(i, j)].abs() / scale[(i, j)]);
            }
        }
    }
    r
}

/// Least squares for `lhs ≈ Σ c_k basis_k` over the leading `w×w` block,
/// each equation weighted by the local magnitude of its terms.
fn fit_relation(lhs: &DMatrix<f64>, lhs_mag: &DMatrix<f64>, basis: &[DMatrix<f64>], w: usize) -> Result<RelationFit> {
    let k = basis.len();
    let babs: Vec<DMatrix<f64>> = basis.iter().map(abs_m).collect();
    let weight = local_scale(&babs.iter().fold(lhs_mag.clone(), |acc, b| acc + b));
    let mut rows = Vec::new();
    for i in 0..w {
        for j in 0..w {
            if weight[(i, j)] > 0.0 {
                rows.push((i, j, weight[(i, j)]));
            }
        }
    }
    let m = DMatrix::from_fn(rows.len(), k, |r, c| {
        let (i, j, sc) = rows[r];
        basis[c][(i, j)] / sc
    });
    let rhs = DVector::from_fn(rows.len(), |r, _| {
        let (i, j, sc) = rows[r];
        lhs[(i, j)] / sc
    });
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > RANK_TOL * smax) {
        return Err(Error::Rank(format!(
            "regression matrix is rank deficient (σ_min/σ_max = {:e})",
            smin / smax
        )));
    }
    let sol = svd
        .solve(&rhs, RANK_TOL * smax)
        .map_err(|e| Error::Rank(e.to_string()))?;
    let mut coefficients = [0.0; 5];
    for (c, s) in coefficients.iter_mut().zip(sol.iter()) {
        *c = *s;
    }
    let mut fitted = DMatrix::<f64>::zeros(lhs.nrows(), lhs.ncols());
    let mut mag = lhs_mag.clone();
    for c in 0..k {
        fitted += &basis[c] * sol[c];
        mag += &babs[c] * sol[c].abs();
    }
    Ok(RelationFit {
        coefficients,
        residual: scaled_defect(&(lhs - fitted), &local_scale(&mag), w),
        rows: rows.len(),
    })
}

/// `(L, |L|)` for `L = A²B + BA² − ωABA`, with `|L|` built from
/// entrywise absolute values.
fn aw_lhs(a: &DMatrix<f64>, b: &DMatrix<f64>, omega: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let lhs = a * a * b + b * a * a - omega * (a * b * a);
    let (aa, ba) = (abs_m(a), abs_m(b));
    let scale = &aa * &aa * &ba + &ba * &aa * &aa + omega.abs() * (&aa * &ba * &aa);
    (lhs, scale)
}

pub fn fit_structure_constants(s: &SectorOperators, q: f64) -> Result<StructureConstants> {
    let omega = q + 1.0 / q;
    let (z1, z2) = (&s.z1, &s.z2);
    let m = z1.nrows();
    // Triple products reach two sector steps beyond the fitted block.
    let w = s.window.min(m.saturating_sub(3));
    if w < 4 {
        return Err(Error::Window(format!("sector window {w} too small for the fit")));
    }
    let id = DMatrix::<f64>::identity(m, m);
    let anti = z1 * z2 + z2 * z1;
    let (l1, s1) = aw_lhs(z1, z2, omega);
    let (l2, s2) = aw_lhs(z2, z1, omega);
    let r1 = fit_relation(&l1, &s1, &[z1 * z1, anti.clone(), z1.clone(), z2.clone(), id.clone()], w)?;
    let r2 = fit_relation(&l2, &s2, &[z2 * z2, anti, z2.clone(), z1.clone(), id], w)?;
    let [a1, a2, a3, a4, a5] = r1.coefficients;
    let [b2, b1, b3, a6, a7] = r2.coefficients;
    let shared = (a1 - b1).abs().max((a2 - b2).abs()).max((a3 - b3).abs());
    Ok(StructureConstants {
        sector: s.sector,
        c: [a1, a2, a3, a4, a5, a6, a7],
        residual: r1.residual.max(r2.residual),
        relation1: r1,
        relation2: r2,
        shared_mismatch: shared,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralExtensionReport {
    pub n: usize,
    pub window: usize,
    pub even: StructureConstants,
    pub odd: StructureConstants,
    /// Defect of the two combined relations with `a_k P_e + b_k P_o` coefficients.
    pub residual: [f64; 2],
}

impl CentralExtensionReport {
    pub fn max_residual(&self) -> f64 {
        self.residual[0].max(self.residual[1])
    }
}

/// Fits both sectors and checks the combined relations on the full space.
pub fn central_extension(xy: &XYPair) -> Result<CentralExtensionReport> {
    let q = xy.params.q;
    let omega = q + 1.0 / q;
    let (se, so) = split_sectors(xy)?;
    let even = fit_structure_constants(&se, q)?;
    let odd = fit_structure_constants(&so, q)?;
    let (x, y) = (&xy.x.entries, &xy.y.entries);
    let n = xy.n;
    let (pe, po) = (xy.p_even(), xy.p_odd());
    let id = DMatrix::<f64>::identity(n, n);
    let anti = x * y + y * x;
    let w = xy.window();
    let mut residual = [0.0f64; 2];
    let rels = [
        (aw_lhs(x, y, omega), [x * x, anti.clone(), x.clone(), y.clone(), id.clone()], &even.relation1, &odd.relation1),
        (aw_lhs(y, x, omega), [y * y, anti, y.clone(), x.clone(), id], &even.relation2, &odd.relation2),
    ];
    for (r, ((lhs, scale), basis, fe, fo)) in rels.into_iter().enumerate() {
        let mut rhs = DMatrix::<f64>::zeros(n, n);
        let mut mag = scale;
        for (k, b) in basis.iter().enumerate() {
            let coef = &pe * fe.coefficients[k] + &po * fo.coefficients[k];
            rhs += &coef * b;
            mag += coef.abs() * b.abs();
        }
        residual[r] = scaled_defect(&(lhs - rhs), &local_scale(&mag), w);
    }
    Ok(CentralExtensionReport {
        n,
        window: w,
        even,
        odd,
        residual,
    })
}

/// `2(q² − q⁻²)(q − q⁻¹)`.
pub fn casimir_scalar(q: f64) -> f64 {
    2.0 * (q * q - 1.0 / (q * q)) * (q - 1.0 / q)
}

#[derive(Debug, Clone, Serialize)]
pub struct CasimirReport {
    pub n: usize,
    pub window: usize,
    pub is_scalar: bool,
    /// Leading diagonal entry, where the cancelling terms are smallest.
    pub scalar: f64,
    pub expected: f64,
    /// `|scalar − expected| / |expected|`.
    pub scalar_error: f64,
    /// Defect of `Q − expected·I` on the window, relative to the local
    /// magnitude of the terms (the entries of `Ỹ` grow like `q^(−n/2)`).
    pub residual: f64,
    /// Largest absolute off-diagonal entry among the first `window/2` indices.
    pub offdiag: f64,
}

/// Tolerance of [`CasimirReport::is_scalar`] on the scaled defect.
pub const CASIMIR_TOL: f64 = 1e-12;

/// `(XY)² + (YX)² − ½(q+q⁻¹)(XY²X + YX²Y) + ½(q²−q⁻²)(q−q⁻¹)(X² + Y²)`,
/// defined for the free point only.
pub fn casimir(xy: &XYPair) -> Result<CasimirReport> {
    if !xy.params.is_free() {
        return Err(Error::Domain("the Casimir is only available at the free point".into()));
    }
    let q = xy.params.q;
    let (c1, c2) = (0.5 * (q + 1.0 / q), 0.5 * (q * q - 1.0 / (q * q)) * (q - 1.0 / q));
    let (x, y) = (&xy.x.entries, &xy.y.entries);
    let (xy_, yx) = (x * y, y * x);
    let c = &xy_ * &xy_ + &yx * &yx - c1 * (&xy_ * &yx + &yx * &xy_) + c2 * (x * x + y * y);
    let (ax, ay) = (x.abs(), y.abs());
    let (axy, ayx) = (&ax * &ay, &ay * &ax);
    let expected = casimir_scalar(q);
    let id = DMatrix::<f64>::identity(xy.n, xy.n);
    let mag = &axy * &axy + &ayx * &ayx + c1.abs() * (&axy * &ayx + &ayx * &axy)
        + c2.abs() * (&ax * &ax + &ay * &ay)
        + &id * expected.abs();
    let w = xy.window();
    let residual = scaled_defect(&(&c - &id * expected), &local_scale(&mag), w);
    let mut off = c.clone();
    off.fill_diagonal(0.0);
    let scalar = c[(0, 0)];
    let scalar_error = (scalar - expected).abs() / expected.abs();
    Ok(CasimirReport {
        n: xy.n,
        window: w,
        is_scalar: residual < CASIMIR_TOL && scalar_error < CASIMIR_TOL,
        scalar,
        expected,
        scalar_error,
        residual,
        offdiag: max_abs_window(&off, w / 2),
    })
}

/// Affine map between the sector recurrences and the interval families:
/// `B_k = κ₁B⁽¹⁾_k + κ₀`, `u_k = κ₁²U⁽¹⁾_k` (even) and the same with
/// `(C⁽²⁾, V⁽²⁾)` (odd).
#[derive(Debug, Clone, Serialize)]
pub struct AffineReport {
    /// `(κ₁, κ₀)` fitted from the first two even coefficient pairs.
    pub fitted: (f64, f64),
    /// The analytic map `(4, −2)`.
    pub analytic: (f64, f64),
    pub even_residual: f64,
    pub odd_residual: f64,
    pub terms: usize,
}

pub fn affine_comparison(xy: &XYPair) -> Result<AffineReport> {
    let (se, so) = split_sectors(xy)?;
    let len = se.window.min(so.window);
    let src = VerblunskySource::from_params(Family::A, &xy.params, 2 * len + 4)?;
    let (p1, _) = even_odd_split(1, &src, len)?;
    let (_, q2) = even_odd_split(2, &src, len)?;
    let (e, o) = (&se.recurrence, &so.recurrence);
    // Least squares on the first two coefficient pairs: κ₁² from u, then κ₀ from b.
    let k1 = ((e.sub[1] * p1.sub[1] + e.sub[2] * p1.sub[2]) / (p1.sub[1].powi(2) + p1.sub[2].powi(2))).sqrt();
    let k0 = (e.diag[0] + e.diag[1] - k1 * (p1.diag[0] + p1.diag[1])) / 2.0;
    let (k1a, k0a) = (4.0, -2.0);
    let cmp = |s: &ThreeTermRecurrence, t: &ThreeTermRecurrence| {
        let mut r: f64 = 0.0;
        for k in 0..len {
            let b = k1a * t.diag[k] + k0a;
            r = r.max((s.diag[k] - b).abs() / b.abs().max(1.0));
            if k >= 1 {
                let u = k1a * k1a * t.sub[k];
                r = r.max((s.sub[k] - u).abs() / u.abs().max(1.0));
            }
        }
        r
    };
    Ok(AffineReport {
        fitted: (k1, k0),
        analytic: (k1a, k0a),
        even_residual: cmp(e, &p1),
        odd_residual: cmp(o, &q2),
        terms: len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_parameters, Mode};

    fn generic() -> ParameterSet {
        derive_parameters([0.6, 0.5, -0.5, -0.4], 0.7, Mode::Infinite).unwrap()
    }

    #[test]
    fn free_diagonalizer_blocks() {
        let f = ParameterSet::free(0.64).unwrap();
        let c = RepCoefficients::compute(&f, 10).unwrap();
        let d = build_diagonalizer(9, &c).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in (1..9).step_by(2) {
            assert!((d.s[(i, i)] + h).abs() < 1e-15);
            assert!((d.s[(i, i + 1)] - h).abs() < 1e-15);
            assert!((d.s[(i + 1, i)] - h).abs() < 1e-15);
            assert!((d.s[(i + 1, i + 1)] - h).abs() < 1e-15);
        }
    }

    #[test]
    fn structure_generic_and_free() {
        for p in [generic(), ParameterSet::free(0.64).unwrap()] {
            for n in [32, 33, 64] {
                let xy = build_xy(n, &p).unwrap();
                let r = check_xy(&xy).unwrap();
                assert!(r.s_involution < 1e-14 && r.s_symmetry == 0.0, "{r:?}");
                assert!(r.r2_offdiag < 1e-13 && r.r2_alternation < 1e-13, "{r:?}");
                assert!(r.x_first_offdiag < 1e-13 && r.x_outside_band < 1e-13, "{r:?}");
                assert!(r.y_offdiag < 1e-11, "{r:?}");
                assert!(r.commutator_x < 1e-12 && r.commutator_y < 1e-12 * (1.0 + xy.y.entries[(r.window, r.window)].abs()), "{r:?}");
                assert!(r.closed_form < 1e-12, "{r:?}");
                assert!(r.spectrum < 1e-11, "{r:?}");
            }
        }
    }

    #[test]
    fn free_x_entries() {
        let xy = build_xy(24, &ParameterSet::free(0.64).unwrap()).unwrap();
        let x = &xy.x.entries;
        assert!((x[(0, 2)] - 2f64.sqrt()).abs() < 1e-14);
        for k in 1..6 {
            assert!((x[(k, k + 2)] - 1.0).abs() < 1e-14, "{k}");
            assert!(x[(k, k)].abs() < 1e-14);
        }
        assert!(x[(0, 0)].abs() < 1e-14);
    }

    #[test]
    fn free_sectors_are_chebyshev() {
        let xy = build_xy(40, &ParameterSet::free(0.64).unwrap()).unwrap();
        let (e, o) = split_sectors(&xy).unwrap();
        assert!((e.recurrence.sub[1] - 2.0).abs() < 1e-13);
        for k in 2..e.window {
            assert!((e.recurrence.sub[k] - 1.0).abs() < 1e-13);
        }
        for k in 1..o.window {
            assert!((o.recurrence.sub[k] - 1.0).abs() < 1e-13);
        }
        for x in [-1.7, -0.3, 0.8, 1.9] {
            let th = (x / 2.0f64).acos();
            for n in 1..12 {
                let t = 2.0 * (n as f64 * th).cos();
                let u = ((n + 1) as f64 * th).sin() / th.sin();
                assert!((e.recurrence.eval(n, x) - t).abs() < 1e-11);
                assert!((o.recurrence.eval(n, x) - u).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn free_aw_relations() {
        let q = 0.64;
        let xy = build_xy(64, &ParameterSet::free(q).unwrap()).unwrap();
        let r = central_extension(&xy).unwrap();
        let target = -(q - 1.0 / q).powi(2);
        for s in [&r.even, &r.odd] {
            let [a1, a2, a3, a4, a5, a6, a7] = s.c;
            for v in [a1, a2, a3, a5, a7] {
                assert!(v.abs() < 1e-9, "{:?}", s.c);
            }
            assert!((a4 - target).abs() < 1e-9 && (a6 - target).abs() < 1e-9);
            assert!(s.residual < 1e-9);
        }
        assert!(r.max_residual() < 1e-8);
    }

    #[test]
    fn generic_aw_relations() {
        let xy = build_xy(64, &generic()).unwrap();
        let r = central_extension(&xy).unwrap();
        assert!(r.even.residual < 1e-8 && r.odd.residual < 1e-8, "{r:?}");
        assert!(r.even.shared_mismatch < 1e-6 && r.odd.shared_mismatch < 1e-6, "{r:?}");
        assert!(r.max_residual() < 1e-8, "{:?}", r.residual);
    }

    #[test]
    fn casimir_free() {
        let q = 0.64;
        let xy = build_xy(64, &ParameterSet::free(q).unwrap()).unwrap();
        let c = casimir(&xy).unwrap();
        assert!(c.is_scalar && c.scalar_error < 1e-9 && c.offdiag < 1e-10, "{c:?}");
        assert!(casimir(&build_xy(32, &generic()).unwrap()).is_err());
        for q in [0.8, 0.5] {
            assert!((casimir_scalar(q) - casimir_scalar(1.0 / q)).abs() < 1e-12 * casimir_scalar(q).abs());
        }
    }

    #[test]
    fn affine_map_to_interval() {
        for p in [generic(), ParameterSet::free(0.64).unwrap()] {
            let xy = build_xy(64, &p).unwrap();
            let a = affine_comparison(&xy).unwrap();
            assert!((a.fitted.0 - 4.0).abs() < 1e-9 && (a.fitted.1 + 2.0).abs() < 1e-9, "{a:?}");
            assert!(a.even_residual < 1e-9 && a.odd_residual < 1e-9, "{a:?}");
        }
    }

    #[test]
    fn sector_positivity() {
        let xy = build_xy(64, &generic()).unwrap();
        let (e, o) = split_sectors(&xy).unwrap();
        for s in [&e, &o] {
            for k in 1..s.window {
                assert!(s.recurrence.sub[k] > 0.0);
            }
        }
    }

    #[test]
    fn window_error() {
        assert!(matches!(build_xy(16, &generic()), Err(Error::Window(_))));
    }
}
