//! JSON and CSV file formats.
//!
//! Complex numbers are `[re, im]` pairs. A `"group"` field holds either an
//! inline group object or a path, resolved relative to the referring file.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::GroupFunction;
use crate::cocycle::{validate_cocycle, CoboundaryWitness, Cocycle};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupFile};
use crate::norms::{
    AmenabilityReport, FourierStieltjesCertificate, LittlewoodCertificate, MultiplierCertificate,
};
use crate::optim::linalg::CMatrix;

pub type Pair = [f64; 2];

pub fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn unpair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Row-major `[re, im]` array.
pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<Pair>]) -> Result<CMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|row| row.len() != c) {
        return Err(Error::DimensionMismatch {
            expected: c,
            found: bad.len(),
        });
    }
    Ok(CMatrix::from_fn(r, c, |i, j| unpair(rows[i][j])))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Path(String),
    Inline(GroupFile),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleFile {
    pub group: GroupRef,
    pub m: u32,
    pub exponents: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupRef>,
    pub values: Vec<Pair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessFile {
    pub m: u32,
    pub xi: Vec<u32>,
}

/// Prefixes an I/O error with the path it concerns.
pub fn with_path(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(with_path(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).map_err(with_path(path))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn resolve_group(r: &GroupRef, base: &Path) -> Result<Arc<FiniteGroup>> {
    match r {
        GroupRef::Inline(file) => Ok(Arc::new(FiniteGroup::try_from(file.clone())?)),
        GroupRef::Path(p) => load_group(&base.join(p)),
    }
}

/// Loads and validates a group file.
pub fn load_group(path: &Path) -> Result<Arc<FiniteGroup>> {
    let file: GroupFile = serde_json::from_str(&read(path)?)?;
    Ok(Arc::new(FiniteGroup::try_from(file)?))
}

pub fn save_group(path: &Path, g: &FiniteGroup) -> Result<()> {
    write_json(path, &GroupFile::from(g))
}

fn reconcile(
    found: Arc<FiniteGroup>,
    expected: Option<&Arc<FiniteGroup>>,
) -> Result<Arc<FiniteGroup>> {
    match expected {
        Some(e) if !e.same_as(&found) => Err(Error::GroupMismatch),
        Some(e) => Ok(e.clone()),
        None => Ok(found),
    }
}

/// Loads a cocycle file, or builds the trivial cocycle for the literal
/// `"trivial"` (which needs `group`).
pub fn load_cocycle(spec: &str, group: Option<&Arc<FiniteGroup>>) -> Result<Cocycle> {
    if spec == "trivial" {
        let g = group.ok_or_else(|| {
            Error::InvalidArgument("the trivial cocycle needs a group (pass --group)".into())
        })?;
        return Ok(Cocycle::trivial(g.clone()));
    }
    let path = Path::new(spec);
    let file: CocycleFile = serde_json::from_str(&read(path)?)?;
    let g = reconcile(resolve_group(&file.group, &base_dir(path))?, group)?;
    validate_cocycle(&file.exponents, file.m, g)
}

pub fn cocycle_file(sigma: &Cocycle) -> CocycleFile {
    CocycleFile {
        group: GroupRef::Inline(GroupFile::from(&**sigma.group())),
        m: sigma.root_order(),
        exponents: sigma.exponent_table(),
    }
}

pub fn save_cocycle(path: &Path, sigma: &Cocycle) -> Result<()> {
    write_json(path, &cocycle_file(sigma))
}

pub fn witness_file(xi: &CoboundaryWitness) -> WitnessFile {
    WitnessFile {
        m: xi.root_order(),
        xi: xi.exponents().to_vec(),
    }
}

/// Loads a function; a file without a group uses `group`.
pub fn load_function(path: &Path, group: Option<&Arc<FiniteGroup>>) -> Result<GroupFunction> {
    let file: FunctionFile = serde_json::from_str(&read(path)?)?;
    let g = match &file.group {
        Some(r) => reconcile(resolve_group(r, &base_dir(path))?, group)?,
        None => group.cloned().ok_or_else(|| {
            Error::InvalidArgument("function file has no group (pass --group)".into())
        })?,
    };
    GroupFunction::new(g, file.values.into_iter().map(unpair).collect())
}

pub fn function_file(f: &GroupFunction) -> FunctionFile {
    FunctionFile {
        group: Some(GroupRef::Inline(GroupFile::from(&**f.group()))),
        values: f.values().iter().copied().map(pair).collect(),
    }
}

pub fn save_function(path: &Path, f: &GroupFunction) -> Result<()> {
    write_json(path, &function_file(f))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourierFile {
    pub kind: String,
    pub method: String,
    pub label: String,
    pub value: f64,
    pub singular_values: Vec<f64>,
    pub dual_coefficients: Vec<Pair>,
    pub repaired: Pair,
    pub contraction_norm: f64,
    pub wall_time_ms: f64,
}

impl FourierFile {
    pub fn new(cert: &FourierStieltjesCertificate, wall_time_ms: f64) -> Self {
        FourierFile {
            kind: "fourier-stieltjes".into(),
            method: FourierStieltjesCertificate::METHOD.into(),
            label: "A=B (finite group)".into(),
            value: cert.value,
            singular_values: cert.singular_values.clone(),
            dual_coefficients: cert
                .dual_element
                .coeffs()
                .unwrap_or_default()
                .iter()
                .copied()
                .map(pair)
                .collect(),
            repaired: pair(cert.repaired),
            contraction_norm: cert.contraction_norm,
            wall_time_ms,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplierFile {
    pub kind: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub value: Option<f64>,
    pub dual_bound: Option<f64>,
    pub gap: Option<f64>,
    pub iterations: Option<usize>,
    pub ill_conditioned: Option<bool>,
    pub reconstruction_error: Option<f64>,
    pub xi: Vec<Vec<Pair>>,
    pub eta: Vec<Vec<Pair>>,
    pub wall_time_ms: f64,
}

impl MultiplierFile {
    pub fn new(cert: &MultiplierCertificate, wall_time_ms: f64) -> Self {
        MultiplierFile {
            kind: "cb-multiplier".into(),
            status: "ok".into(),
            error: None,
            value: Some(cert.value),
            dual_bound: Some(cert.dual_bound),
            gap: Some(cert.gap),
            iterations: Some(cert.iterations),
            ill_conditioned: Some(cert.ill_conditioned),
            reconstruction_error: Some(cert.reconstruction_error),
            xi: matrix_rows(&cert.xi),
            eta: matrix_rows(&cert.eta),
            wall_time_ms,
        }
    }

    pub fn failed(kind: &str, error: &Error, wall_time_ms: f64) -> Self {
        MultiplierFile {
            kind: kind.into(),
            status: "solver_failure".into(),
            error: Some(error.to_string()),
            value: None,
            dual_bound: None,
            gap: None,
            iterations: None,
            ill_conditioned: None,
            reconstruction_error: None,
            xi: Vec::new(),
            eta: Vec::new(),
            wall_time_ms,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LittlewoodFile {
    pub kind: String,
    pub value: f64,
    pub dual_bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub budget_exhausted: bool,
    pub psi1: Vec<Vec<Pair>>,
    pub psi2: Vec<Vec<Pair>>,
    pub wall_time_ms: f64,
}

impl LittlewoodFile {
    pub fn new(cert: &LittlewoodCertificate, wall_time_ms: f64) -> Self {
        LittlewoodFile {
            kind: "littlewood-t2".into(),
            value: cert.value,
            dual_bound: cert.dual_bound,
            gap: cert.gap,
            iterations: cert.iterations,
            budget_exhausted: cert.budget_exhausted,
            psi1: matrix_rows(&cert.psi1),
            psi2: matrix_rows(&cert.psi2),
            wall_time_ms,
        }
    }
}

pub const REPORT_COLUMNS: [&str; 7] = [
    "sample_id",
    "seed",
    "b_norm",
    "cb_norm",
    "rel_gap",
    "sdp_gap",
    "wall_time_ms",
];

/// One row per successful sample; failed samples are kept in the JSON form.
pub fn write_report_csv<W: std::io::Write>(out: W, report: &AmenabilityReport) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for r in &report.samples {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
