use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use annulus_dilation::spectral::{ArClassification, MisraCheck, VonNeumannReport};
use annulus_dilation::*;
use serde_json::{json, Value};

use crate::config::{JobConfig, SCHEMA};
use crate::failure::Failure;
use crate::io::{self, pair, DirichletInput, MatrixInput, TupleInput};

/// Slack allowed by the maximum-modulus check on sampled grids.
const MAX_MOD_SLACK: f64 = 1e-8;
/// Dilations with more atoms than this are summarized unless a bundle path is given.
const INLINE_BUNDLE_ATOMS: usize = 4096;
const TABLE_ROW_CAP: usize = 1 << 20;

pub const SINGULAR_WITNESS: &str = "spectrum contains 0";

/// A finished job: the report to emit and the exit status it carries.
pub struct Outcome {
    pub report: Value,
    pub code: i32,
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self {
            report,
            code: 0,
            diagnostic: None,
        }
    }
}

fn header(command: &str, cfg: &JobConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    m
}

fn params(cfg: &JobConfig) -> Result<AnnulusParams64, Failure> {
    Ok(AnnulusParams::new(cfg.r)?)
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Yes => "yes",
        Verdict::No => "no",
        Verdict::Undetermined => "undetermined",
    }
}

fn misra_json(m: &MisraCheck) -> Value {
    json!({
        "verdict": verdict(m.verdict),
        "c_abs": m.c_abs,
        "lower": m.lower,
        "upper": m.upper,
        "margin": m.margin,
        "k_hat": m.kernel.k_hat,
        "truncation_error": m.kernel.truncation_error,
    })
}

fn von_neumann_json(v: &VonNeumannReport) -> Value {
    json!({ "functions": v.entries.len(), "max_ratio": v.max_ratio })
}

fn classification_json(c: &ArClassification) -> Value {
    json!({
        "normal": c.is_normal,
        "ar_contraction": verdict(c.is_ar_contraction),
        "ar_unitary": c.is_ar_unitary,
        "witnesses": c.witnesses.iter().map(|(w, v)| json!({ "what": w, "value": v })).collect::<Vec<_>>(),
        "misra": c.misra.as_ref().map(misra_json),
        "von_neumann": c.von_neumann.as_ref().map(von_neumann_json),
    })
}

fn classify_config(cfg: &JobConfig) -> ClassifyConfig {
    ClassifyConfig {
        misra_terms: cfg.misra_terms,
        vn_box: cfg.vn_box,
        vn_grid: cfg.vn_grid,
        ..ClassifyConfig::default()
    }
}

pub fn check(cfg: &mut JobConfig) -> Result<Outcome, Failure> {
    let input: MatrixInput = io::read_input(cfg.input.as_deref())?;
    let t = io::square_matrix(&input.matrix)?;
    cfg.m = Some(1);
    let p = params(cfg)?;
    let cls = classify_ar(&p, &t, &classify_config(cfg))?;
    if cls.witnesses.iter().any(|(w, _)| w.starts_with(SINGULAR_WITNESS)) {
        return Err(Failure::Precondition(SINGULAR_WITNESS.into()));
    }
    let mut report = header("check", cfg);
    report.insert("size".into(), json!(t.nrows()));
    if let Value::Object(fields) = classification_json(&cls) {
        report.extend(fields);
    }
    Ok(Outcome::ok(Value::Object(report)))
}

fn infer_per_axis(len: usize, dim: usize) -> Option<usize> {
    let guess = (len as f64).powf(1.0 / dim as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&p| p > 0 && p.checked_pow(dim as u32) == Some(len))
}

pub fn dirichlet(cfg: &mut JobConfig, table: Option<&Path>) -> Result<Outcome, Failure> {
    let input: DirichletInput = io::read_input(cfg.input.as_deref())?;
    let dim = input.dim;
    if dim == 0 || dim > 16 {
        return Err(Failure::Usage(format!("dim must be between 1 and 16, got {dim}")));
    }
    cfg.m = Some(dim);
    let faces = 1usize << dim;
    if input.faces.len() != faces {
        return Err(Failure::Usage(format!("face shape mismatch: {} faces for dim {dim}, expected {faces}", input.faces.len())));
    }
    let len = input.faces[0].len();
    let per_axis = match infer_per_axis(len, dim) {
        Some(p) if input.faces.iter().all(|f| f.len() == len) => p,
        _ => return Err(Failure::Usage(format!("face shape mismatch: every face needs P^{dim} samples"))),
    };
    let order = input.order.unwrap_or_else(|| cfg.freq_n.min(per_axis.saturating_sub(1) / 2));
    let samples: Vec<Vec<Complex<f64>>> = input.faces.iter().map(|f| f.iter().map(io::complex).collect()).collect();
    let p = params(cfg)?;
    let data = BoundaryDataMD::from_face_samples(dim, order, per_axis, &samples)?;
    let u = solve_dirichlet_md(&p, &data)?;
    let sup = sup_norm_report(&u, cfg.eval_grid.max(4))?;

    let g = cfg.eval_grid;
    let rows = g.checked_pow(2 * dim as u32).filter(|&n| n <= TABLE_ROW_CAP).ok_or_else(|| {
        Failure::Usage(format!("evaluation table of {g}^{} rows is too large; lower --eval-grid", 2 * dim))
    })?;
    let radii: Vec<f64> = (0..g)
        .map(|a| if g == 1 { p.sqrt_r() } else { cfg.r.powf(a as f64 / (g - 1) as f64) })
        .collect();
    let angles: Vec<f64> = (0..g).map(|b| TAU * b as f64 / g as f64).collect();
    let mut columns: Vec<String> = (1..=dim).map(|j| format!("rho_{j}")).collect();
    columns.extend((1..=dim).map(|j| format!("theta_{j}")));
    columns.extend(["re".to_string(), "im".to_string()]);

    let mut table_rows: Vec<Vec<f64>> = Vec::with_capacity(rows);
    let mut z = vec![Complex::new(0.0, 0.0); dim];
    for mut flat in 0..rows {
        let mut idx = vec![0usize; 2 * dim];
        for slot in idx.iter_mut().rev() {
            *slot = flat % g;
            flat /= g;
        }
        let mut row: Vec<f64> = idx[..dim].iter().map(|&a| radii[a]).collect();
        row.extend(idx[dim..].iter().map(|&b| angles[b]));
        for j in 0..dim {
            z[j] = Complex::from_polar(row[j], row[dim + j]);
        }
        let v = u.eval_coords(&z);
        row.extend([v.re, v.im]);
        table_rows.push(row);
    }

    let mut report = header("dirichlet", cfg);
    report.insert("dim".into(), json!(dim));
    report.insert("order".into(), json!(order));
    report.insert("samples_per_axis".into(), json!(per_axis));
    report.insert(
        "coefficients".into(),
        json!(u.face_coeffs().iter().map(|f| f.iter().map(|&c| pair(c)).collect::<Vec<_>>()).collect::<Vec<_>>()),
    );
    report.insert(
        "sup_norm".into(),
        json!({
            "interior_max": sup.interior_max,
            "boundary_max": sup.boundary_max,
            "interior_points": sup.interior_points,
            "boundary_points": sup.boundary_points,
        }),
    );
    report.insert("max_mod_ok".into(), json!(sup.max_mod_ok(MAX_MOD_SLACK)));
    report.insert("table_columns".into(), json!(columns));
    match table {
        Some(path) => {
            write_csv(path, &columns, &table_rows)?;
            report.insert("table".into(), json!(path));
        }
        None => {
            report.insert("table".into(), json!(table_rows));
        }
    }
    Ok(Outcome::ok(Value::Object(report)))
}

fn write_csv(path: &Path, columns: &[String], rows: &[Vec<f64>]) -> Result<(), Failure> {
    let io_err = |e: csv::Error| Failure::Internal(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(columns).map_err(io_err)?;
    for row in rows {
        w.write_record(row.iter().map(|x| x.to_string())).map_err(io_err)?;
    }
    w.flush().map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))
}

fn verification_json(rep: &VerificationReport) -> Value {
    json!({
        "box_order": rep.box_order,
        "max_residual": rep.max_residual,
        "isometry_defect": rep.isometry_defect,
        "clipped_mass": rep.clipped_mass,
        "dilation_dim": rep.dilation_dim,
        "atoms": rep.atoms,
        "grid": rep.grid,
        "freq_order": rep.freq_order,
        "residuals": rep.residuals.iter().map(|(k, v)| json!({ "k": k, "residual": v })).collect::<Vec<_>>(),
    })
}

fn atom_json(dil: &Dilation64, a: usize) -> Value {
    let block = dil.block(a);
    let u: Vec<_> = (0..dil.ovm().dim()).map(|j| dil.unitary_blocks(j).map(|b| pair(b[a]))).collect();
    json!({
        "z": dil.ovm().atom(a).into_iter().map(pair).collect::<Vec<_>>(),
        "rows": [block.start, block.end],
        "u": u,
        "v": io::matrix_rows(&dil.v_block(a)),
    })
}

fn bundle_json(dil: &Dilation64) -> Value {
    let atoms: Vec<Value> = (0..dil.atoms()).map(|a| atom_json(dil, a)).collect();
    json!({ "atoms": atoms, "dilation_dim": dil.dilation_dim(), "size": dil.size() })
}

/// Streams the bundle atom by atom; large dilations do not fit in a `Value`.
fn write_bundle(dil: &Dilation64, path: &Path) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure::Internal(format!("cannot write {}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(fail)?);
    write!(w, "{{\"atoms\":[").map_err(fail)?;
    for a in 0..dil.atoms() {
        if a > 0 {
            w.write_all(b",").map_err(fail)?;
        }
        serde_json::to_writer(&mut w, &atom_json(dil, a)).map_err(|e| fail(e.into()))?;
    }
    writeln!(w, "],\"dilation_dim\":{},\"size\":{}}}", dil.dilation_dim(), dil.size()).map_err(fail)?;
    w.flush().map_err(fail)
}

pub fn dilate(cfg: &mut JobConfig, bundle: Option<&Path>) -> Result<Outcome, Failure> {
    let input: TupleInput = io::read_input(cfg.input.as_deref())?;
    if input.tuple.is_empty() {
        return Err(Failure::Usage("tuple must contain at least one matrix".into()));
    }
    let mats = input.tuple.iter().map(io::square_matrix).collect::<Result<Vec<_>, _>>()?;
    if mats.iter().any(|m| m.nrows() != mats[0].nrows()) {
        return Err(Failure::Usage("tuple members must have the same size".into()));
    }
    cfg.m = Some(mats.len());
    let p = params(cfg)?;
    let dcfg = DilationConfig {
        measure: HarmonicMeasureConfig::new(cfg.grid_m, cfg.freq_n),
        box_order: cfg.box_k,
        seed: cfg.seed,
        ..DilationConfig::default()
    };
    let mut report = header("dilate", cfg);

    let normal = mats.iter().all(|m| is_normal(m, cfg.commute_tol));
    let tuple = if normal { MatrixTuple::new(mats.clone()).ok() } else { None };
    let (dil, ver, path) = match tuple {
        Some(t) => {
            let (dil, ver) = dilate_normal_tuple(&t, &p, &dcfg)?;
            (dil, ver, "normal")
        }
        None => match dilate_dc2(&mats, &p, &dcfg, cfg.commute_tol) {
            Ok(Dc2Outcome::Dilated(dil, ver)) => (*dil, ver, "dc2"),
            Ok(Dc2Outcome::NotConstructive { certificate, note }) => {
                report.insert("path".into(), json!("dc2"));
                report.insert("certificate".into(), classification_json(&certificate));
                report.insert("note".into(), json!(note));
                return Ok(Outcome {
                    report: Value::Object(report),
                    code: 4,
                    diagnostic: Some(format!("no constructive path: {note}")),
                });
            }
            Err(e @ (Error::NotDoublyCommuting { .. } | Error::Inconsistent(_))) => {
                report.insert("path".into(), json!("none"));
                report.insert("witness".into(), json!(e.to_string()));
                return Ok(Outcome {
                    report: Value::Object(report),
                    code: 4,
                    diagnostic: Some(format!("no constructive path: {e}")),
                });
            }
            Err(e) => return Err(e.into()),
        },
    };

    let passed = ver.max_residual <= cfg.tol;
    report.insert("path".into(), json!(path));
    report.insert("passed".into(), json!(passed));
    report.insert("verification".into(), verification_json(&ver));
    match bundle {
        Some(file) => {
            write_bundle(&dil, file)?;
            report.insert("bundle".into(), json!(file));
        }
        None if dil.atoms() <= INLINE_BUNDLE_ATOMS => {
            report.insert("bundle".into(), bundle_json(&dil));
        }
        None => {
            report.insert("bundle".into(), Value::Null);
            report.insert(
                "bundle_note".into(),
                json!(format!("{} atoms; pass --bundle PATH to write V and U_j", dil.atoms())),
            );
        }
    }
    let diagnostic = (!passed).then(|| format!("max residual {:e} exceeds tolerance {:e}", ver.max_residual, cfg.tol));
    Ok(Outcome {
        report: Value::Object(report),
        code: if passed { 0 } else { 5 },
        diagnostic,
    })
}

pub fn kernel(cfg: &mut JobConfig, w: Complex<f64>) -> Result<Outcome, Failure> {
    cfg.m = Some(1);
    let p = params(cfg)?;
    let kb = misra_bound(&p, w, cfg.misra_terms)?;
    let (r2, w2) = (cfg.r * cfg.r, w.norm_sqr());
    let comparison = (1.0 - r2) / ((1.0 - w2) * (w2 - r2));
    let symmetric = (w2 - cfg.r).abs() <= 1e-12;
    let truncation_large = kb.truncation_error > 1e-6 * kb.k_hat;
    let mut notes = Vec::new();
    if truncation_large {
        notes.push("truncation error is large; raise --misra-terms".to_string());
    }
    if symmetric {
        notes.push("|w|^2 = r: the positive and negative partial sums coincide".to_string());
    }
    let mut report = header("kernel", cfg);
    report.insert("w".into(), json!(pair(w)));
    report.insert("k_hat".into(), json!(kb.k_hat));
    report.insert("bound".into(), json!(kb.bound));
    report.insert("truncation_error".into(), json!(kb.truncation_error));
    report.insert("comparison".into(), json!(comparison));
    report.insert("margin".into(), json!(comparison - kb.k_hat));
    report.insert("within_comparison".into(), json!(kb.k_hat <= comparison));
    report.insert("truncation_large".into(), json!(truncation_large));
    report.insert("symmetric".into(), json!(symmetric));
    report.insert("notes".into(), json!(notes));
    Ok(Outcome::ok(Value::Object(report)))
}
