//! Dispatch of the parsed command line onto the library.

use std::collections::BTreeMap;

use daha_opuc::algebra::{build_xy, casimir, central_extension, check_xy, fit_structure_constants, split_sectors, Sector};
use daha_opuc::askey_wilson::{aw_spectrum, verify_circle_identity, AWParameters};
use daha_opuc::daha::{
    build_t_opts, verify_derivation_system, verify_involutions, verify_product_relation, BuildOptions, Reflection,
    Representation,
};
use daha_opuc::interval::{check_identity, family_recurrence, spectral_measure};
use daha_opuc::opuc::{build_cmv, szego_family, szego_values, Family, VerblunskySource};
use daha_opuc::suite::{default_tolerances, run_suite, Preset, SuiteConfig};
use daha_opuc::truncation::{analyze_truncation, solve_truncation, TruncationCondition};
use daha_opuc::{derive_parameters, Error, Mode, ParameterSet};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{destination, num, render, write_atomic, Artifact, Context, Table};
use crate::{AlgebraCmd, AwCmd, Cli, Command, DahaCheck, DahaCmd, IntervalCmd, OpucCmd, PlotWhat, TruncArgs, TruncCmd};
use daha_opuc::interval::IntervalFamily;
use daha_opuc::truncation::TruncationKind;

const GENERIC_BETA: [f64; 4] = [0.6, 0.5, -0.5, -0.4];
const GENERIC_Q: f64 = 0.7;
/// Sampled points for the pointwise identity checks.
const SAMPLES: usize = 20;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDoc {
    beta: Option<[f64; 4]>,
    q: Option<f64>,
    mode: Option<String>,
}

fn load_params(cli: &Cli) -> Result<ParameterSet, String> {
    let g = &cli.global;
    let doc = match &g.params {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str::<ParamsDoc>(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ParamsDoc {
            beta: None,
            q: None,
            mode: None,
        },
    };
    let mode = match (g.mode, doc.mode) {
        (Some(m), _) => m,
        (None, Some(s)) => s.parse::<Mode>().map_err(|e| e.to_string())?,
        (None, None) => Mode::Infinite,
    };
    let q = g.q.or(doc.q).unwrap_or(GENERIC_Q);
    let beta = g.beta.or(doc.beta);
    let p = match (mode, beta) {
        (Mode::FreeBoundary, None) => ParameterSet::free(q),
        (_, b) => derive_parameters(b.unwrap_or(GENERIC_BETA), q, mode),
    };
    p.map_err(|e| e.to_string())
}

fn tolerances(cli: &Cli) -> BTreeMap<String, f64> {
    cli.global.tol.iter().cloned().collect()
}

/// Tolerance for `name`: the command line, else the library default.
fn tol(cli: &Cli, name: &str) -> f64 {
    tolerances(cli)
        .get(name)
        .copied()
        .or_else(|| default_tolerances().get(name).copied())
        .expect("known tolerance name")
}

fn lib(e: Error) -> String {
    format!("{}: {e}", e.kind())
}

/// One `check,value,tolerance,passed` row per check.
struct Checks {
    table: Table,
    passed: bool,
}

impl Checks {
    fn new() -> Self {
        Checks {
            table: Table::new(&["check", "value", "tolerance", "passed"]),
            passed: true,
        }
    }

    fn add(&mut self, name: &str, value: f64, tol: f64) -> bool {
        let ok = value < tol;
        self.passed &= ok;
        self.table.push(vec![name.into(), num(value), num(tol), ok.to_string()]);
        ok
    }
}

fn window_check(n: usize) -> Result<(), String> {
    if n < 4 {
        Err(format!("--n {n}: the matrix size must be at least 4"))
    } else {
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<bool, String> {
    let g = &cli.global;
    window_check(g.n)?;
    for (k, _) in &g.tol {
        if !default_tolerances().contains_key(k.as_str()) {
            let names: Vec<_> = default_tolerances().keys().copied().collect();
            return Err(format!("--tol {k}: unknown check (expected one of {})", names.join("|")));
        }
    }
    let (name, params, artifact) = match &cli.command {
        Command::Daha(c) => {
            let p = load_params(cli)?;
            let a = daha(cli, c, &p)?;
            (daha_name(c), Some(p), a)
        }
        Command::Opuc(c) => {
            let p = load_params(cli)?;
            let a = opuc(cli, c, &p)?;
            (
                match c {
                    OpucCmd::Phi { .. } => "opuc phi",
                    OpucCmd::Cmv { .. } => "opuc cmv",
                },
                Some(p),
                a,
            )
        }
        Command::Interval(c) => {
            let p = load_params(cli)?;
            let a = interval(cli, c, &p)?;
            (
                match c {
                    IntervalCmd::Rec { .. } => "interval rec",
                    IntervalCmd::Check { .. } => "interval check",
                    IntervalCmd::Nodes { .. } => "interval nodes",
                },
                Some(p),
                a,
            )
        }
        Command::Aw(c) => {
            let p = load_params(cli)?;
            let a = aw(cli, c, &p)?;
            (
                match c {
                    AwCmd::Eval { .. } => "aw eval",
                    AwCmd::Identify { .. } => "aw identify",
                    AwCmd::Spectrum => "aw spectrum",
                },
                Some(p),
                a,
            )
        }
        Command::Algebra(c) => {
            let p = load_params(cli)?;
            let a = algebra(cli, c, &p)?;
            (
                match c {
                    AlgebraCmd::Xy => "algebra xy",
                    AlgebraCmd::Fit { .. } => "algebra fit",
                    AlgebraCmd::Casimir => "algebra casimir",
                    AlgebraCmd::Central => "algebra central",
                },
                Some(p),
                a,
            )
        }
        Command::Trunc(c) => {
            let (p, a) = trunc(cli, c)?;
            (
                match c {
                    TruncCmd::Solve(_) => "trunc solve",
                    TruncCmd::Spectrum(_) => "trunc spectrum",
                    TruncCmd::Orth(_) => "trunc orth",
                },
                Some(p),
                a,
            )
        }
        Command::Plot { what, family, kind, m } => {
            let (p, a) = plot(cli, *what, *family, *kind, *m)?;
            ("plot", Some(p), a)
        }
        Command::Suite {
            preset,
            draws,
            aw_draws,
        } => {
            let p = match preset {
                Preset::Free => ParameterSet::free(g.q.unwrap_or(0.64)).map_err(lib)?,
                Preset::Generic => load_params(cli)?,
            };
            let cfg = SuiteConfig {
                draws: *draws,
                aw_draws: *aw_draws,
                tolerances: tolerances(cli),
                ..SuiteConfig::new(*preset, p.clone(), g.n, g.seed)
            };
            let r = run_suite(&cfg).map_err(lib)?;
            let mut t = Table::new(&["check", "value", "tolerance", "passed"]);
            for c in &r.checks {
                t.push(vec![c.name.clone(), num(c.value), num(c.tolerance), c.passed.to_string()]);
            }
            let passed = r.passed;
            ("suite", Some(p), Artifact::new(&r.checks, t, passed))
        }
    };
    let ctx = Context {
        command: name,
        seed: g.seed,
        n: g.n,
        params: params.as_ref(),
    };
    let bytes = render(&artifact, &ctx, g.format)?;
    match destination(g.out.as_deref(), name, g.format) {
        Some(path) => write_atomic(&path, &bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())?;
        }
    }
    Ok(artifact.passed)
}

fn daha_name(c: &DahaCmd) -> &'static str {
    match c {
        DahaCmd::Build { .. } => "daha build",
        DahaCmd::Verify { .. } => "daha verify",
        DahaCmd::Coeffs => "daha coeffs",
    }
}

fn build_options(cli: &Cli) -> BuildOptions {
    BuildOptions {
        allow_partial_block: cli.global.allow_partial_block,
    }
}

fn daha(cli: &Cli, c: &DahaCmd, p: &ParameterSet) -> Result<Artifact, String> {
    let n = cli.global.n;
    match c {
        DahaCmd::Build { which } => {
            let bad = || format!("--which {which}: expected R1..R4 or T1..T4");
            let (kind, idx) = which.split_at(1.min(which.len()));
            let i: usize = idx.parse().map_err(|_| bad())?;
            if !(1..=4).contains(&i) {
                return Err(bad());
            }
            let dump = match kind {
                "R" | "r" => {
                    let rep = Representation::build(p, n, build_options(cli), 0).map_err(lib)?;
                    rep.get(Reflection::from_index(i - 1).map_err(lib)?).dump()
                }
                "T" | "t" => build_t_opts(i - 1, n, p, build_options(cli)).map_err(lib)?.t.dump(),
                _ => return Err(bad()),
            };
            let mut t = Table::new(&["row", "col", "re", "im"]);
            for (k, e) in dump.entries.iter().enumerate() {
                if e[0] != 0.0 || e[1] != 0.0 {
                    t.push(vec![(k / n).to_string(), (k % n).to_string(), num(e[0]), num(e[1])]);
                }
            }
            Ok(Artifact::new(dump, t, true))
        }
        DahaCmd::Verify { check } => {
            let mut ch = Checks::new();
            let value = match check {
                DahaCheck::Product => {
                    let r = verify_product_relation(n, p).map_err(lib)?;
                    ch.add("product", r.scaled_max(), tol(cli, "product"));
                    if let Some(f) = r.scaled.free_residual {
                        ch.add("product-free", f, tol(cli, "product-free"));
                    }
                    serde_json::to_value(r)
                }
                DahaCheck::Derivation => {
                    let r = verify_derivation_system(n, p).map_err(lib)?;
                    ch.add("derivation", r.max_core(), tol(cli, "derivation"));
                    serde_json::to_value(r)
                }
                DahaCheck::Involution => {
                    let r = verify_involutions(n, p, build_options(cli)).map_err(lib)?;
                    ch.add("involution", r.max_square_scaled(), tol(cli, "involution"));
                    ch.add("quadratic", r.max_quadratic_scaled(), tol(cli, "quadratic"));
                    serde_json::to_value(r)
                }
            }
            .map_err(|e| e.to_string())?;
            Ok(Artifact::new(value, ch.table, ch.passed))
        }
        DahaCmd::Coeffs => {
            let c = daha_opuc::daha::RepCoefficients::compute(p, n).map_err(lib)?;
            let mut t = Table::new(&["n", "a_n", "r_n", "alpha_n", "rho_n", "z_n"]);
            let mut rows = Vec::new();
            for k in 0..n {
                let ki = k as i64;
                let row = [c.a(ki), c.r(ki), c.alpha(ki), c.rho(ki), c.z(k)];
                t.push(std::iter::once(k.to_string()).chain(row.iter().map(|&v| num(v))).collect());
                rows.push(row);
            }
            Ok(Artifact::new(json!({ "columns": ["a_n", "r_n", "alpha_n", "rho_n", "z_n"], "rows": rows }), t, true))
        }
    }
}

fn opuc(cli: &Cli, c: &OpucCmd, p: &ParameterSet) -> Result<Artifact, String> {
    let n = cli.global.n;
    match c {
        OpucCmd::Phi { family, at } => {
            let src = VerblunskySource::from_params(*family, p, n).map_err(lib)?;
            match at {
                Some((re, im)) => {
                    let z = Complex64::new(*re, *im);
                    let vals = szego_values(n, z, &src).map_err(lib)?;
                    let mut t = Table::new(&["n", "re_phi", "im_phi", "re_phi_star", "im_phi_star"]);
                    for (k, (a, b)) in vals.iter().enumerate() {
                        t.push(vec![k.to_string(), num(a.re), num(a.im), num(b.re), num(b.im)]);
                    }
                    Ok(Artifact::new(json!({ "z": [re, im], "values": vals }), t, true))
                }
                None => {
                    let fam = szego_family(n, &src).map_err(lib)?;
                    let mut header = vec!["degree".to_string()];
                    header.extend((0..=n).map(|k| format!("c{k}")));
                    let mut t = Table {
                        header,
                        rows: Vec::new(),
                    };
                    for ph in &fam {
                        let mut row = vec![ph.degree.to_string()];
                        row.extend((0..=n).map(|k| ph.coeffs.get(k).map(|&v| num(v)).unwrap_or_default()));
                        t.push(row);
                    }
                    let coeffs: Vec<_> = fam.iter().map(|ph| &ph.coeffs).collect();
                    Ok(Artifact::new(json!({ "family": family.to_string(), "coefficients": coeffs }), t, true))
                }
            }
        }
        OpucCmd::Cmv { family, check } => {
            let cmv = build_cmv(n, *family, p).map_err(lib)?;
            let mut ch = Checks::new();
            let (l, m) = (&cmv.l.entries, &cmv.m.entries);
            let id = nalgebra::DMatrix::<f64>::identity(n, n);
            let w = cmv.u.window();
            let inv = daha_opuc::operator::max_abs_window(&(l * l - &id), w)
                .max(daha_opuc::operator::max_abs_window(&(m * m - &id), w));
            let passed = if *check {
                ch.add("cmv-orthogonality", cmv.orthogonality_residual, tol(cli, "pencil"));
                ch.add("cmv-involutions", inv, tol(cli, "involution"));
                ch.passed
            } else {
                true
            };
            let report = json!({
                "family": family.to_string(),
                "window": w,
                "orthogonality_residual": cmv.orthogonality_residual,
                "involution_residual": inv,
                "u": cmv.u.dump(),
            });
            Ok(Artifact::new(report, ch.table, passed))
        }
    }
}

fn sample_points(seed: u64, lo: f64, hi: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..SAMPLES).map(|_| rng.gen_range(lo..hi)).collect()
}

fn interval(cli: &Cli, c: &IntervalCmd, p: &ParameterSet) -> Result<Artifact, String> {
    let n = cli.global.n;
    let src = VerblunskySource::from_params(Family::A, p, 2 * n + 4).map_err(lib)?;
    match c {
        IntervalCmd::Rec { family } => {
            let rec = family_recurrence(*family, &src, n).map_err(lib)?;
            let mut t = Table::new(&["n", "b_n", "u_n"]);
            for k in 0..rec.len() {
                t.push(vec![k.to_string(), num(rec.diag[k]), num(rec.sub[k])]);
            }
            Ok(Artifact::new(json!({ "family": family.to_string(), "b": rec.diag, "u": rec.sub }), t, true))
        }
        IntervalCmd::Check { identity } => {
            let xs = sample_points(cli.global.seed, -0.9, 0.9);
            let n_max = n.min(64);
            let r = check_identity(*identity, &src, n_max, &xs).map_err(lib)?;
            let mut ch = Checks::new();
            ch.add(&format!("{identity:?}").to_lowercase(), r, tol(cli, "christoffel"));
            Ok(Artifact::new(json!({ "identity": identity, "n_max": n_max, "samples": xs, "residual": r }), ch.table, ch.passed))
        }
        IntervalCmd::Nodes { family } => {
            let rec = family_recurrence(*family, &src, n).map_err(lib)?;
            let m = spectral_measure(&rec, n).map_err(lib)?;
            let mut t = Table::new(&["k", "x_k", "w_k"]);
            for (k, (x, w)) in m.nodes.iter().zip(&m.weights).enumerate() {
                t.push(vec![k.to_string(), num(*x), num(*w)]);
            }
            Ok(Artifact::new(json!({ "family": family.to_string(), "nodes": m.nodes, "weights": m.weights }), t, true))
        }
    }
}

fn aw(cli: &Cli, c: &AwCmd, p: &ParameterSet) -> Result<Artifact, String> {
    let n = cli.global.n;
    match c {
        AwCmd::Eval { family, x } => {
            let a = AWParameters::for_family(*family, p).map_err(lib)?;
            let src = VerblunskySource::from_params(Family::A, p, 2 * n + 4).map_err(lib)?;
            let rec = family.recurrence(&src, n + 1).map_err(lib)?;
            // x is the Askey–Wilson variable; y the interval variable.
            let y = (x - a.tau_shift) / a.sigma_scale;
            let rv = rec.eval_all(n, y);
            let mut t = Table::new(&["n", "V_n(x)", "sigma^-n V_n", "recurrence"]);
            let mut rows = Vec::new();
            for k in 0..=n {
                let v = a.monic(k, *x).map_err(lib)?;
                let s = v / a.sigma_scale.powi(k as i32);
                t.push(vec![k.to_string(), num(v), num(s), num(rv[k])]);
                rows.push([v, s, rv[k]]);
            }
            Ok(Artifact::new(json!({ "family": family.to_string(), "x": x, "y": y, "aw": a, "rows": rows }), t, true))
        }
        AwCmd::Identify { family, nmax, samples } => {
            let r = verify_circle_identity(*family, *nmax, *samples, p, cli.global.seed).map_err(lib)?;
            let mut t = Table::new(&["n", "residual"]);
            for (k, v) in r.per_degree.iter().enumerate() {
                t.push(vec![k.to_string(), num(*v)]);
            }
            let passed = r.max_residual < tol(cli, "aw-identity");
            Ok(Artifact::new(r, t, passed))
        }
        AwCmd::Spectrum => {
            let mut t = Table::new(&["n", "y_n"]);
            let mut ys = Vec::new();
            for k in 0..=n {
                let y = aw_spectrum(k, p).map_err(lib)?;
                t.push(vec![k.to_string(), num(y)]);
                ys.push(y);
            }
            Ok(Artifact::new(json!({ "y": ys }), t, true))
        }
    }
}

fn algebra(cli: &Cli, c: &AlgebraCmd, p: &ParameterSet) -> Result<Artifact, String> {
    let xy = build_xy(cli.global.n, p).map_err(lib)?;
    let mut ch = Checks::new();
    let value = match c {
        AlgebraCmd::Xy => {
            let r = check_xy(&xy).map_err(lib)?;
            let s = daha_opuc::algebra::STRUCTURE_TOL;
            ch.add("x-first-offdiag", r.x_first_offdiag, s);
            ch.add("x-outside-band", r.x_outside_band, s);
            ch.add("y-offdiag", r.y_offdiag, s);
            ch.add("closed-form", r.closed_form, s);
            ch.add("spectrum", r.spectrum, tol(cli, "spectrum"));
            serde_json::to_value(r)
        }
        AlgebraCmd::Fit { sector } => {
            let (e, o) = split_sectors(&xy).map_err(lib)?;
            let s = if *sector == Sector::Even { e } else { o };
            let r = fit_structure_constants(&s, p.q).map_err(lib)?;
            ch.add("aw3-fit", r.residual, tol(cli, "aw3-fit"));
            serde_json::to_value(r)
        }
        AlgebraCmd::Casimir => {
            let r = casimir(&xy).map_err(lib)?;
            ch.add("casimir", r.scalar_error, tol(cli, "casimir"));
            serde_json::to_value(r)
        }
        AlgebraCmd::Central => {
            let r = central_extension(&xy).map_err(lib)?;
            ch.add("aw3-fit", r.even.residual.max(r.odd.residual), tol(cli, "aw3-fit"));
            ch.add("central-extension", r.max_residual(), tol(cli, "central-extension"));
            serde_json::to_value(r)
        }
    }
    .map_err(|e| e.to_string())?;
    Ok(Artifact::new(value, ch.table, ch.passed))
}

#[derive(Serialize)]
struct Solved<'a> {
    condition: TruncationCondition,
    index: usize,
    boundary: f64,
    params: &'a ParameterSet,
}

fn trunc(cli: &Cli, c: &TruncCmd) -> Result<(ParameterSet, Artifact), String> {
    let q = cli.global.q.unwrap_or(GENERIC_Q);
    let args: &TruncArgs = match c {
        TruncCmd::Solve(a) | TruncCmd::Spectrum(a) | TruncCmd::Orth(a) => a,
    };
    let cond = TruncationCondition::new(args.kind, args.m).map_err(lib)?;
    match c {
        TruncCmd::Solve(_) => {
            let p = solve_truncation(&cond, args.free_betas, q).map_err(lib)?;
            let boundary = daha_opuc::daha::coeff_a(cond.index() as i64, &p).map_err(lib)?;
            let mut ch = Checks::new();
            ch.add("trunc-boundary", (boundary.abs() - 1.0).abs(), tol(cli, "trunc-boundary"));
            let s = Solved {
                condition: cond,
                index: cond.index(),
                boundary,
                params: &p,
            };
            let a = Artifact::new(&s, ch.table, ch.passed);
            Ok((p, a))
        }
        TruncCmd::Spectrum(_) => {
            let r = analyze_truncation(&cond, args.free_betas, q).map_err(lib)?;
            let s = &r.spectrum;
            let mut t = Table::new(&["s", "theta_s", "rho_s"]);
            for (k, (th, w)) in s.angles.iter().zip(&s.weights).enumerate() {
                t.push(vec![k.to_string(), num(*th), num(*w)]);
            }
            let passed = s.unitarity < tol(cli, "trunc-unitary")
                && s.modulus.max(s.conjugation).max(s.weight_pairing) < tol(cli, "trunc-spectrum");
            let a = Artifact::new(&r.spectrum, t, passed);
            Ok((r.params, a))
        }
        TruncCmd::Orth(_) => {
            let r = analyze_truncation(&cond, args.free_betas, q).map_err(lib)?;
            let mut ch = Checks::new();
            ch.add("trunc-orthogonality", r.orthogonality.offdiag, tol(cli, "trunc-orthogonality"));
            ch.add("trunc-diagonal", r.orthogonality.diagonal, tol(cli, "trunc-orthogonality"));
            let a = Artifact::new(&r.orthogonality, ch.table, ch.passed);
            Ok((r.params, a))
        }
    }
}

fn plot(
    cli: &Cli,
    what: PlotWhat,
    family: IntervalFamily,
    kind: TruncationKind,
    m: usize,
) -> Result<(ParameterSet, Artifact), String> {
    let n = cli.global.n;
    match what {
        PlotWhat::Coefficients => {
            let p = load_params(cli)?;
            let c = daha_opuc::daha::RepCoefficients::compute(&p, n).map_err(lib)?;
            let mut t = Table::new(&["n", "a_n", "alpha_n"]);
            for k in 0..n as i64 {
                t.push(vec![k.to_string(), num(c.a(k)), num(c.alpha(k))]);
            }
            Ok((p, Artifact::new(json!({ "what": "coefficients" }), t, true)))
        }
        PlotWhat::Spectrum => {
            let cond = TruncationCondition::new(kind, m).map_err(lib)?;
            let r = analyze_truncation(&cond, None, cli.global.q.unwrap_or(GENERIC_Q)).map_err(lib)?;
            let mut t = Table::new(&["s", "theta_s", "rho_s"]);
            for (k, (th, w)) in r.spectrum.angles.iter().zip(&r.spectrum.weights).enumerate() {
                t.push(vec![k.to_string(), num(*th), num(*w)]);
            }
            Ok((r.params, Artifact::new(json!({ "what": "spectrum", "condition": cond }), t, true)))
        }
        PlotWhat::Nodes => {
            let p = load_params(cli)?;
            let src = VerblunskySource::from_params(Family::A, &p, 2 * n + 4).map_err(lib)?;
            let rec = family_recurrence(family, &src, n).map_err(lib)?;
            let meas = spectral_measure(&rec, n).map_err(lib)?;
            let mut t = Table::new(&["k", "x_k", "w_k"]);
            for (k, (x, w)) in meas.nodes.iter().zip(&meas.weights).enumerate() {
                t.push(vec![k.to_string(), num(*x), num(*w)]);
            }
            Ok((p, Artifact::new(json!({ "what": "nodes", "family": family.to_string() }), t, true)))
        }
    }
}
