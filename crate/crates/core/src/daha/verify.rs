//! Checks of the defining relations and of the intermediate equation system
//! that the closed forms solve.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::build::{BuildOptions, Representation};
use crate::error::{Error, Result};
use crate::operator::{abs_entries, complexify, componentwise, max_abs, max_abs_window};
use crate::params::ParameterSet;

/// Margin for products of two banded factors.
pub const MARGIN_TWO: usize = 8;
/// Margin for products of four banded factors.
pub const MARGIN_FOUR: usize = 10;
/// Margin for triple products of pentadiagonal operators.
pub const MARGIN_TRIPLE: usize = 12;

/// `|l − r| / max(1, |l|, |r|)`.
pub fn rel_residual(l: Complex64, r: Complex64) -> f64 {
    (l - r).norm() / 1f64.max(l.norm()).max(r.norm())
}

/// `|l − r| / max(1, scale)`.
pub fn scaled_residual(l: Complex64, r: Complex64, scale: f64) -> f64 {
    (l - r).norm() / scale.max(1.0)
}

pub fn require_window(n: usize, margin: usize) -> Result<()> {
    if n < 2 * margin {
        Err(Error::Window(format!(
            "N = {n} is smaller than twice the interior margin {margin}"
        )))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductReport {
    pub n: usize,
    pub window: usize,
    /// `max |K|` with `K = T₁T₂ − Q·T₄⁻¹T₃⁻¹`.
    pub max_residual: f64,
    /// `max |T₁T₂T₃T₄ − Q·I|`.
    pub product_residual: f64,
    /// `max |R₁R₂ − q^(−1/2)R₄R₃|`, reported at the free point only.
    pub free_residual: Option<f64>,
    /// Componentwise versions of the three residuals above, relative to the
    /// magnitude of the summed terms (see [`componentwise`]).
    pub scaled: ScaledProduct,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaledProduct {
    pub max_residual: f64,
    pub product_residual: f64,
    pub free_residual: Option<f64>,
}

impl ProductReport {
    /// Worst componentwise residual of the relation (`K` and the product).
    pub fn scaled_max(&self) -> f64 {
        self.scaled.max_residual.max(self.scaled.product_residual)
    }
}

pub fn verify_product_relation(n: usize, p: &ParameterSet) -> Result<ProductReport> {
    require_window(n, MARGIN_FOUR)?;
    let rep = Representation::build(p, n, BuildOptions::default(), 0)?;
    let t: Vec<_> = (0..4).map(|i| rep.hecke(i)).collect();
    let w = n - MARGIN_FOUR;
    let big_q = Complex64::new(p.big_q, 0.0);
    let k = &t[0].t.entries * &t[1].t.entries - (&t[3].inverse.entries * &t[2].inverse.entries) * big_q;
    let prod = &t[0].t.entries * &t[1].t.entries * &t[2].t.entries * &t[3].t.entries
        - DMatrix::<Complex64>::identity(n, n) * big_q;
    let at: Vec<_> = t.iter().map(|h| abs_entries(&h.t.entries)).collect();
    let ai: Vec<_> = t.iter().map(|h| abs_entries(&h.inverse.entries)).collect();
    let id = DMatrix::<f64>::identity(n, n);
    let k_scale = &at[0] * &at[1] + (&ai[3] * &ai[2]) * p.big_q;
    let prod_scale = &at[0] * &at[1] * &at[2] * &at[3] + &id * p.big_q;
    let free = p.is_free().then(|| {
        let lhs = &rep.r[0].entries * &rep.r[1].entries;
        let rhs = (&rep.r[3].entries * &rep.r[2].entries) * p.q.powf(-0.5);
        let ar: Vec<_> = rep.r.iter().map(|r| r.entries.abs()).collect();
        let scale = &ar[0] * &ar[1] + (&ar[3] * &ar[2]) * p.q.powf(-0.5);
        let d = lhs - rhs;
        (max_abs_window(&d, w), componentwise(&d, &scale, w))
    });
    Ok(ProductReport {
        n,
        window: w,
        max_residual: max_abs_window(&k, w),
        product_residual: max_abs_window(&prod, w),
        free_residual: free.map(|f| f.0),
        scaled: ScaledProduct {
            max_residual: componentwise(&k, &k_scale, w),
            product_residual: componentwise(&prod, &prod_scale, w),
            free_residual: free.map(|f| f.1),
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivationReport {
    /// Equations were substituted for `0 ≤ n ≤ n_max`.
    pub n_max: usize,
    /// Relative residual per equation family.
    pub residuals: BTreeMap<String, f64>,
}

impl DerivationReport {
    /// Max over the eight families of the outer, inner and main diagonals.
    pub fn max_core(&self) -> f64 {
        ["out_1", "out_2", "int_1", "int_2", "int_3", "int_4", "dc_1", "dc_2"]
            .iter()
            .map(|k| self.residuals[*k])
            .fold(0.0, f64::max)
    }

    pub fn max_all(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }
}

/// Substitutes the closed forms into the diagonal-by-diagonal equations of
/// `K = 0` for `n ≤ N/2`.
pub fn verify_derivation_system(n: usize, p: &ParameterSet) -> Result<DerivationReport> {
    let n_max = n / 2;
    let c = super::coefficients::RepCoefficients::compute(p, 2 * n_max + 2)?;
    let [s1, s2, s3, s4] = p.sigma;
    let [d1, d2, d3, d4] = p.delta;
    let q = Complex64::new(p.big_q, 0.0);
    let (g0, g1) = (c.gamma0, c.gamma1);
    let re = |x: f64| Complex64::new(x, 0.0);
    let a = |k: i64| re(c.a(k));
    let al = |k: i64| re(c.alpha(k));
    let r = |k: i64| re(c.r(k));
    let rho = |k: i64| re(c.rho(k));
    let z = |k: i64| re(c.z(k as usize));

    let mut res: BTreeMap<String, f64> = BTreeMap::new();
    let mut put = |key: &str, v: f64| {
        let e = res.entry(key.to_string()).or_insert(0.0);
        *e = e.max(v);
    };
    for m in 0..=n_max as i64 {
        let (e, o) = (2 * m, 2 * m + 1);
        put(
            "out_1",
            rel_residual(d1 * d2 * r(e) * r(o), q * d3 * d4 * rho(e) * rho(o) * z(e + 2) / z(e)),
        );
        if m >= 1 {
            put(
                "out_2",
                rel_residual(
                    d1 * d2 * r(e) * r(e - 1),
                    q * d3 * d4 * rho(e) * rho(e - 1) * z(e - 1) / z(e + 1),
                ),
            );
            put("rho_r", rel_residual(rho(e - 1), g1 * r(e - 1) / (z(e) * z(e - 1))));
            put("rr_1", rel_residual(re((d3 * rho(e - 1)).norm()), re((d2 * r(e - 1)).norm())));
        }
        put("rho_r", rel_residual(rho(e), g0 * r(e) * z(e) * z(o)));
        put("rr_2", rel_residual(re((d4 * rho(e)).norm()), re((d1 * r(e)).norm())));

        let i1 = (d1 * (d2 * a(o) + s2), q * d4 * g0 * z(o) * z(o) * (d3 * al(o) - s3));
        let i2 = (d2 * (d1 * a(e) - s1), q * d3 * g1 / (z(o) * z(o)) * (d4 * al(e) + s4));
        let i3 = (d1 * (d2 * a(e - 1) - s2), q * d4 * g0 * z(e) * z(e) * (d3 * al(e - 1) + s3));
        let i4 = (d2 * (d1 * a(e) + s1), q * d3 * g1 / (z(e) * z(e)) * (d4 * al(e) - s4));
        // The right-hand sides carry z_n^(±2); an O(ε) error in a bounded
        // coefficient is amplified by that prefactor, so it sets the scale.
        let sc1 = (d1.norm() * (d2.norm() + s2.norm()))
            .max((q * d4 * g0 * z(o) * z(o)).norm() * (d3.norm() + s3.norm()));
        let sc2 = (d2.norm() * (d1.norm() + s1.norm()))
            .max((q * d3 * g1 / (z(o) * z(o))).norm() * (d4.norm() + s4.norm()));
        let sc3 = (d1.norm() * (d2.norm() + s2.norm()))
            .max((q * d4 * g0 * z(e) * z(e)).norm() * (d3.norm() + s3.norm()));
        let sc4 = (d2.norm() * (d1.norm() + s1.norm()))
            .max((q * d3 * g1 / (z(e) * z(e))).norm() * (d4.norm() + s4.norm()));
        put("int_1", scaled_residual(i1.0, i1.1, sc1));
        put("int_2", scaled_residual(i2.0, i2.1, sc2));
        put("int_3", scaled_residual(i3.0, i3.1, sc3));
        put("int_4", scaled_residual(i4.0, i4.1, sc4));

        let dc1 = (
            (-d1 * a(e) + s1) * (d2 * a(o) + s2),
            q * (d4 * al(e) + s4) * (-d3 * al(o) + s3),
        );
        let dc2 = (
            (d1 * a(e) + s1) * (-d2 * a(e - 1) + s2),
            q * (-d4 * al(e) + s4) * (d3 * al(e - 1) + s3),
        );
        put("dc_1", rel_residual(dc1.0, dc1.1));
        put("dc_2", rel_residual(dc2.0, dc2.1));

        // Products of the inner-diagonal equations reproduce the main diagonal.
        let d12 = d1 * d2;
        put(
            "dc_product",
            rel_residual(-(i1.0 * i2.0) / d12, dc1.0).max(rel_residual(-(i1.1 * i2.1) / d12, dc1.1)),
        );
        put(
            "dc_product",
            rel_residual(-(i3.0 * i4.0) / d12, dc2.0).max(rel_residual(-(i3.1 * i4.1) / d12, dc2.1)),
        );
    }
    res.insert("res_gd".into(), rel_residual(d1 * d2, q * g0 * g1 * d3 * d4));
    Ok(DerivationReport {
        n_max,
        residuals: res,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InvolutionReport {
    pub n: usize,
    /// `max |R_i² − I|`.
    pub reflection_square: [f64; 4],
    /// `max |(T_i − t_i)(T_i − t_i⁻¹)|`.
    pub quadratic: [f64; 4],
    /// `max |T_i T_i⁻¹ − I|`.
    pub inverse: [f64; 4],
    /// Componentwise `|R_i² − I| / max(1, |R_i|²)`.
    pub reflection_square_scaled: [f64; 4],
    /// Componentwise `|(T_i − t_i)(T_i − t_i⁻¹)| / max(1, |T_i − t_i||T_i − t_i⁻¹|)`.
    pub quadratic_scaled: [f64; 4],
    pub r1_r2_symmetric: bool,
}

impl InvolutionReport {
    pub fn max_square(&self) -> f64 {
        self.reflection_square.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_quadratic(&self) -> f64 {
        self.quadratic.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_square_scaled(&self) -> f64 {
        self.reflection_square_scaled.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_quadratic_scaled(&self) -> f64 {
        self.quadratic_scaled.iter().copied().fold(0.0, f64::max)
    }
}

pub fn verify_involutions(n: usize, p: &ParameterSet, opts: BuildOptions) -> Result<InvolutionReport> {
    let rep = Representation::build(p, n, opts, 0)?;
    let id = DMatrix::<f64>::identity(n, n);
    let cid = complexify(&id);
    let mut sq = [0.0; 4];
    let mut quad = [0.0; 4];
    let mut inv = [0.0; 4];
    let mut sq_s = [0.0; 4];
    let mut quad_s = [0.0; 4];
    for i in 0..4 {
        let r = &rep.r[i].entries;
        let d = r * r - &id;
        sq[i] = max_abs(&d);
        sq_s[i] = componentwise(&d, &(r.abs() * r.abs()), n);
        let h = rep.hecke(i);
        let t = p.t[i];
        let (f1, f2) = (&h.t.entries - &cid * t, &h.t.entries - &cid * t.inv());
        let d = &f1 * &f2;
        quad[i] = max_abs(&d);
        quad_s[i] = componentwise(&d, &(abs_entries(&f1) * abs_entries(&f2)), n);
        inv[i] = max_abs(&(&h.t.entries * &h.inverse.entries - &cid));
    }
    let sym = |m: &DMatrix<f64>| m == &m.transpose();
    Ok(InvolutionReport {
        n,
        reflection_square: sq,
        quadratic: quad,
        inverse: inv,
        reflection_square_scaled: sq_s,
        quadratic_scaled: quad_s,
        r1_r2_symmetric: sym(&rep.r[0].entries) && sym(&rep.r[1].entries),
    })
}
