//! Versioned JSON documents. Complex numbers are `[re, im]`, matrices are
//! arrays of rows, and `eri` is a flat row-major array of length `ν⁴`.

use hfcert::integrals::{Eri, IntegralSet, Nucleus};
use hfcert::matnorm::WeightSet;
use hfcert::scalar::CMat;
use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const INTEGRALSET: &str = "integralset.v1";
pub const GRAM: &str = "gram.v1";
pub const WEIGHTS: &str = "weights.v1";
pub const VALIDATION: &str = "validation.v1";
pub const CONDITIONS: &str = "conditions.v1";
pub const CERTIFICATE: &str = "certificate.v1";
pub const TRACE: &str = "trace.v1";
pub const ORTHO: &str = "ortho.v1";
pub const REPORT: &str = "report.v1";

pub type Cx = [f64; 2];
pub type CMatDoc = Vec<Vec<Cx>>;
pub type RMatDoc = Vec<Vec<f64>>;

pub fn cmat_to_doc(m: &CMat<f64>) -> CMatDoc {
    (0..m.nrows())
        .map(|j| (0..m.ncols()).map(|k| [m[(j, k)].re, m[(j, k)].im]).collect())
        .collect()
}

pub fn rmat_to_doc(m: &DMatrix<f64>) -> RMatDoc {
    (0..m.nrows())
        .map(|j| (0..m.ncols()).map(|k| m[(j, k)]).collect())
        .collect()
}

fn check_rows<X>(rows: &[Vec<X>], nrows: usize, ncols: usize, what: &str) -> Result<(), CliError> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::Input(format!("`{what}` must be a {nrows}x{ncols} matrix")));
    }
    Ok(())
}

pub fn cmat_from_doc(rows: &CMatDoc, n: usize, what: &str) -> Result<CMat<f64>, CliError> {
    check_rows(rows, n, n, what)?;
    Ok(CMat::from_fn(n, n, |j, k| Complex::new(rows[j][k][0], rows[j][k][1])))
}

pub fn rmat_from_doc(rows: &RMatDoc, n: usize, what: &str) -> Result<DMatrix<f64>, CliError> {
    check_rows(rows, n, n, what)?;
    Ok(DMatrix::from_fn(n, n, |j, k| rows[j][k]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegralSetDoc {
    pub schema: String,
    pub nu: usize,
    pub n_elec: usize,
    pub charges: Vec<f64>,
    pub positions: Vec<[f64; 3]>,
    #[serde(rename = "h")]
    pub core_hamiltonian: CMatDoc,
    pub kinetic: CMatDoc,
    pub attraction: Vec<CMatDoc>,
    pub eri: Vec<Cx>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<RMatDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 3]>>,
}

impl IntegralSetDoc {
    pub fn from_set(set: &IntegralSet<f64>, weights: Option<&WeightSet<f64>>) -> Self {
        Self {
            schema: INTEGRALSET.into(),
            nu: set.nu(),
            n_elec: set.n_elec(),
            charges: set.nuclei().iter().map(|n| n.charge).collect(),
            positions: set.nuclei().iter().map(|n| n.position).collect(),
            core_hamiltonian: cmat_to_doc(set.core_hamiltonian()),
            kinetic: cmat_to_doc(set.kinetic()),
            attraction: set.attraction().iter().map(cmat_to_doc).collect(),
            eri: set.eri().as_flat().iter().map(|z| [z.re, z.im]).collect(),
            weights: weights.map(|w| rmat_to_doc(&w.matrix)),
            points: weights.and_then(|w| w.points.clone()),
        }
    }

    /// Integrals checked for shape and finiteness only, plus any embedded
    /// weight matrix.
    pub fn into_parts(self) -> Result<(IntegralSet<f64>, Option<WeightSet<f64>>), CliError> {
        let nu = self.nu;
        if self.charges.len() != self.positions.len() {
            return Err(CliError::Input("`charges` and `positions` differ in length".into()));
        }
        let h = cmat_from_doc(&self.core_hamiltonian, nu, "h")?;
        let kinetic = cmat_from_doc(&self.kinetic, nu, "kinetic")?;
        let attraction = self
            .attraction
            .iter()
            .enumerate()
            .map(|(i, a)| cmat_from_doc(a, nu, &format!("attraction[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let eri = Eri::from_flat(nu, self.eri.iter().map(|z| Complex::new(z[0], z[1])).collect())?;
        let nuclei = self
            .charges
            .iter()
            .zip(&self.positions)
            .map(|(&charge, &position)| Nucleus { charge, position })
            .collect();
        let set = IntegralSet::new_unvalidated(self.n_elec, h, kinetic, attraction, eri, nuclei)?;
        let weights = match self.weights {
            Some(w) => {
                let mut ws = WeightSet::new(rmat_from_doc(&w, nu, "weights")?)?;
                ws.points = self.points;
                Some(ws)
            }
            None => None,
        };
        Ok((set, weights))
    }

    pub fn points(&self) -> Option<&[[f64; 3]]> {
        self.points.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GramDoc {
    pub schema: String,
    pub nu: usize,
    pub gram: CMatDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsDoc {
    pub schema: String,
    pub nu: usize,
    #[serde(rename = "w")]
    pub matrix: RMatDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 3]>>,
}

fn schema_of(v: &Value) -> Result<&str, CliError> {
    v.get("schema")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Input("document has no `schema` field".into()))
}

fn parse_value(text: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))
}

fn decode<D: for<'de> Deserialize<'de>>(v: Value, schema: &str) -> Result<D, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Input(format!("{schema}: {e}")))
}

/// Accepts an `integralset.v1` document or the `ortho.v1` output wrapping one.
pub fn parse_integrals(text: &str) -> Result<IntegralSetDoc, CliError> {
    let mut v = parse_value(text)?;
    let v = match schema_of(&v)? {
        INTEGRALSET => v,
        ORTHO => v
            .get_mut("integrals")
            .map(Value::take)
            .ok_or_else(|| CliError::Input("ortho.v1 document has no `integrals`".into()))?,
        other => {
            return Err(CliError::Input(format!(
                "unsupported schema `{other}`, expected {INTEGRALSET}"
            )))
        }
    };
    if schema_of(&v)? != INTEGRALSET {
        return Err(CliError::Input(format!("embedded integrals are not {INTEGRALSET}")));
    }
    decode(v, INTEGRALSET)
}

pub fn parse_gram(text: &str) -> Result<CMat<f64>, CliError> {
    let v = parse_value(text)?;
    match schema_of(&v)? {
        GRAM => {
            let doc: GramDoc = decode(v, GRAM)?;
            cmat_from_doc(&doc.gram, doc.nu, "gram")
        }
        other => Err(CliError::Input(format!(
            "unsupported schema `{other}`, expected {GRAM}"
        ))),
    }
}

pub fn parse_weights(text: &str) -> Result<WeightSet<f64>, CliError> {
    let v = parse_value(text)?;
    match schema_of(&v)? {
        WEIGHTS => {
            let doc: WeightsDoc = decode(v, WEIGHTS)?;
            let mut ws = WeightSet::new(rmat_from_doc(&doc.matrix, doc.nu, "w")?)?;
            ws.points = doc.points;
            Ok(ws)
        }
        other => Err(CliError::Input(format!(
            "unsupported schema `{other}`, expected {WEIGHTS}"
        ))),
    }
}

// Output documents. Field order is the serialization order.

#[derive(Debug, Clone, Serialize)]
pub struct IssueDoc {
    pub kind: &'static str,
    pub witness: Vec<usize>,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightViolationDoc {
    pub clause: &'static str,
    pub witness: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightCheckDoc {
    pub valid: bool,
    pub source: &'static str,
    pub max_row_sum: f64,
    pub violations: Vec<WeightViolationDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationDoc {
    pub schema: &'static str,
    pub valid: bool,
    pub nu: usize,
    pub n_elec: usize,
    pub integral_issues: Vec<IssueDoc>,
    pub weights: Option<WeightCheckDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClauseDoc {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LmoDoc {
    pub eps_tilde: f64,
    pub c_tilde: f64,
    pub c_hat: f64,
    pub c_check: f64,
    pub v_inv: RMatDoc,
    pub u_inv: RMatDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct OiDoc {
    pub eps: f64,
    pub delta: f64,
    pub gamma: f64,
    pub gamma_at: [usize; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct NiDoc {
    pub c_breve: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundViolationDoc {
    pub clause: String,
    pub witness: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionDoc {
    pub trials: usize,
    pub seed: u64,
    pub holds: bool,
    pub max_ratio: [f64; 3],
    pub violations: Vec<BoundViolationDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionsDoc {
    pub schema: &'static str,
    pub feasible: bool,
    pub clauses: Vec<ClauseDoc>,
    pub lmo: LmoDoc,
    pub oi: OiDoc,
    pub ni: NiDoc,
    pub contraction: ContractionDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateDoc {
    pub name: &'static str,
    pub pass: bool,
    /// Positive when the gate passes; absent when its inputs are undefined.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzDoc {
    pub big_c: f64,
    pub big_d: f64,
    pub big_l: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateDoc {
    pub schema: &'static str,
    pub valid: bool,
    pub gates: Vec<GateDoc>,
    pub failed_gates: Vec<GateDoc>,
    pub eps: f64,
    pub eps_hat: f64,
    pub c_star: Option<f64>,
    pub lipschitz: LipschitzDoc,
    pub theta: Option<f64>,
    pub tau_star: Option<f64>,
    pub tau_star_alt: Option<f64>,
    pub tau_star_star: Option<f64>,
    pub radius: Option<f64>,
    pub displacement_bound: Option<f64>,
    pub ball_within_eps_hat: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterateDoc {
    pub index: usize,
    pub gradient_norm: f64,
    pub step_norm: Option<f64>,
    pub coords: CMatDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyDoc {
    pub total: f64,
    pub kinetic: f64,
    pub nuclear: f64,
    pub coulomb: f64,
    pub exchange: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionDoc {
    pub density: CMatDoc,
    pub energy: EnergyDoc,
    pub commutator_residual: f64,
    pub projection_residual: f64,
    /// `‖P∞ − P⁰‖₁,∞`
    pub displacement: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceDoc {
    pub schema: &'static str,
    pub converged: bool,
    pub recenter: bool,
    pub tol: f64,
    pub max_iter: usize,
    pub iterations: Vec<IterateDoc>,
    pub quadratic_ratios: Vec<f64>,
    pub solution: SolutionDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthoResultDoc {
    #[serde(rename = "c")]
    pub transform: CMatDoc,
    #[serde(rename = "s")]
    pub correction: CMatDoc,
    pub norms: Vec<f64>,
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
    pub s_weighted_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthoDoc {
    pub schema: &'static str,
    pub result: OrthoResultDoc,
    pub integrals: IntegralSetDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct DisplacementDoc {
    pub measured: f64,
    pub bound: Option<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDoc {
    pub schema: &'static str,
    pub source: String,
    pub validation: ValidationDoc,
    pub conditions: Option<ConditionsDoc>,
    pub certificate: Option<CertificateDoc>,
    pub trace: Option<TraceDoc>,
    pub displacement: Option<DisplacementDoc>,
    pub orthogonalization: Option<OrthoResultDoc>,
    pub errors: Vec<String>,
}
