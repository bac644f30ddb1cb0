use std::path::PathBuf;

use hfcert::conditions::{contraction_bound_check, measure_conditions, ConditionReport, ContractionReport};
use hfcert::grassmann::GrassmannPoint;
use hfcert::hf::{commutator_residual, HartreeFock};
use hfcert::integrals::{generate_synthetic, IntegralSet, SyntheticParams};
use hfcert::kantorovich::{
    certify, displacement_check, newton_solve, Certificate, EpsHatPolicy, NewtonOptions, NewtonTrace,
};
use hfcert::matnorm::{one_inf, weights_from_points, WeightSet, WeightViolation};
use hfcert::ortho::{orthogonalize_pipeline, OrthoResult};
use serde::Serialize;

use crate::error::{CliError, Status};
use crate::schema::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Conditions,
    Certify,
    Solve,
    Orthogonalize,
    Report,
    Generate,
}

/// Shape and parameters of the synthetic instance used when no input file
/// is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticShape {
    pub nu: usize,
    pub n_elec: usize,
    pub params: SyntheticParams,
}

impl Default for SyntheticShape {
    fn default() -> Self {
        Self {
            nu: 6,
            n_elec: 2,
            params: SyntheticParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub tol: f64,
    pub max_iter: usize,
    pub recenter: bool,
    pub seed: u64,
    pub weights: Option<PathBuf>,
    pub gram: Option<PathBuf>,
    /// Exponent for weights derived from orbital centres.
    pub weight_exponent: f64,
    pub contraction_trials: usize,
    pub synthetic: SyntheticShape,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input: None,
            tol: 1e-10,
            max_iter: 50,
            recenter: false,
            seed: 0,
            weights: None,
            gram: None,
            weight_exponent: 2.0,
            contraction_trials: 100,
            synthetic: SyntheticShape::default(),
        }
    }

    fn check(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(CliError::Input(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(CliError::Input("--max-iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    /// Pretty-printed JSON, newline terminated.
    pub document: String,
}

fn to_json<D: Serialize>(doc: &D) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(doc).map_err(|e| CliError::Input(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

struct Loaded {
    set: IntegralSet<f64>,
    weights: Option<(WeightSet<f64>, &'static str)>,
    source: String,
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn synthetic(cfg: &RunConfig) -> Result<(IntegralSet<f64>, WeightSet<f64>), CliError> {
    let s = &cfg.synthetic;
    Ok(generate_synthetic(cfg.seed, s.nu, s.n_elec, &s.params)?)
}

fn load(cfg: &RunConfig) -> Result<Loaded, CliError> {
    let (set, mut weights, source) = match &cfg.input {
        Some(path) => {
            let doc = parse_integrals(&read(path)?)?;
            let points = doc.points().map(<[_]>::to_vec);
            let (set, embedded) = doc.into_parts()?;
            let weights = match (embedded, points) {
                (Some(w), _) => Some((w, "embedded")),
                (None, Some(p)) => Some((weights_from_points(&p, cfg.weight_exponent)?, "points")),
                (None, None) => None,
            };
            (set, weights, "file".to_string())
        }
        None => {
            let (set, w) = synthetic(cfg)?;
            let s = &cfg.synthetic;
            (
                set,
                Some((w, "synthetic")),
                format!("synthetic seed={} nu={} n_elec={}", cfg.seed, s.nu, s.n_elec),
            )
        }
    };
    if let Some(path) = &cfg.weights {
        weights = Some((parse_weights(&read(path)?)?, "file"));
    }
    if let Some((w, _)) = &weights {
        if w.dim() != set.nu() {
            return Err(CliError::Input(format!(
                "weights are {0}x{0}, integrals have nu={1}",
                w.dim(),
                set.nu()
            )));
        }
    }
    Ok(Loaded { set, weights, source })
}

fn validation_doc(set: &IntegralSet<f64>, weights: Option<&(WeightSet<f64>, &'static str)>) -> ValidationDoc {
    let report = set.validate();
    let integral_issues: Vec<IssueDoc> = report
        .issues
        .iter()
        .map(|i| IssueDoc {
            kind: i.kind.name(),
            witness: i.witness.clone(),
            magnitude: i.magnitude,
        })
        .collect();
    let weights = weights.map(|(w, source)| {
        let r = w.validate();
        WeightCheckDoc {
            valid: r.is_valid(),
            source,
            max_row_sum: r.max_row_sum,
            violations: r.violations.iter().map(|v| weight_violation_doc(w, v)).collect(),
        }
    });
    let valid = integral_issues.is_empty() && weights.as_ref().map_or(true, |w| w.valid);
    ValidationDoc {
        schema: VALIDATION,
        valid,
        nu: set.nu(),
        n_elec: set.n_elec(),
        integral_issues,
        weights,
    }
}

fn weight_violation_doc(w: &WeightSet<f64>, v: &WeightViolation<f64>) -> WeightViolationDoc {
    match *v {
        WeightViolation::NotSymmetric { j, k } => WeightViolationDoc {
            clause: "symmetric",
            witness: vec![j, k],
            value: (w.matrix[(j, k)] - w.matrix[(k, j)]).abs(),
        },
        WeightViolation::BelowOne { j, k, value } => WeightViolationDoc {
            clause: "at_least_one",
            witness: vec![j, k],
            value,
        },
        WeightViolation::RowSum { j, sum } => WeightViolationDoc {
            clause: "inverse_row_sum",
            witness: vec![j],
            value: sum,
        },
        WeightViolation::Submultiplicative { j, k, l, excess } => WeightViolationDoc {
            clause: "submultiplicative",
            witness: vec![j, k, l],
            value: excess,
        },
    }
}

/// Signed distance to failure of the weight axioms.
fn weight_margin(w: &WeightSet<f64>) -> f64 {
    let r = w.validate();
    r.violations.iter().fold(1.0 - r.max_row_sum, |m, v| {
        let x = match *v {
            WeightViolation::NotSymmetric { j, k } => -(w.matrix[(j, k)] - w.matrix[(k, j)]).abs(),
            WeightViolation::BelowOne { value, .. } => value - 1.0,
            WeightViolation::RowSum { sum, .. } => 1.0 - sum,
            WeightViolation::Submultiplicative { excess, .. } => -excess,
        };
        m.min(x)
    })
}

fn require_valid(set: &IntegralSet<f64>) -> Result<(), CliError> {
    match set.validate().issues.first() {
        Some(i) => Err(CliError::Input(format!(
            "{} violated at {:?} by {:e}",
            i.kind.name(),
            i.witness,
            i.magnitude
        ))),
        None => Ok(()),
    }
}

fn require_weights(loaded: &Loaded) -> Result<&WeightSet<f64>, CliError> {
    loaded
        .weights
        .as_ref()
        .map(|(w, _)| w)
        .ok_or_else(|| CliError::Input("no weights: pass --weights or embed `weights` or `points` in the input".into()))
}

fn conditions_doc(report: &ConditionReport<f64>, contraction: &ContractionReport, seed: u64) -> ConditionsDoc {
    ConditionsDoc {
        schema: CONDITIONS,
        feasible: report.feasible(),
        clauses: report
            .clauses
            .iter()
            .map(|c| ClauseDoc {
                name: c.name,
                holds: c.holds,
                detail: c.detail.clone(),
            })
            .collect(),
        lmo: LmoDoc {
            eps_tilde: report.lmo.eps_tilde,
            c_tilde: report.lmo.c_tilde,
            c_hat: report.lmo.c_hat,
            c_check: report.lmo.c_check,
            v_inv: rmat_to_doc(&report.lmo.v_inv),
            u_inv: rmat_to_doc(&report.lmo.u_inv),
        },
        oi: OiDoc {
            eps: report.oi.eps,
            delta: report.oi.delta,
            gamma: report.oi.gamma,
            gamma_at: [report.oi.gamma_at.0, report.oi.gamma_at.1],
        },
        ni: NiDoc {
            c_breve: report.ni.c_breve,
        },
        contraction: ContractionDoc {
            trials: contraction.trials,
            seed,
            holds: contraction.holds(),
            max_ratio: contraction.max_ratio,
            violations: contraction
                .violations
                .iter()
                .map(|v| BoundViolationDoc {
                    clause: v.clause.clone(),
                    witness: v.witness.clone(),
                    lhs: v.lhs,
                    rhs: v.rhs,
                })
                .collect(),
        },
    }
}

fn certificate_doc(report: &ConditionReport<f64>, w: &WeightSet<f64>, cert: &Certificate<f64>) -> CertificateDoc {
    let oi = &report.oi;
    let hypotheses_margin = [1.0 - oi.eps, 1.0 - report.lmo.eps_tilde, oi.gamma, weight_margin(w)]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let gates = vec![
        GateDoc {
            name: "hypotheses",
            pass: cert.gates.hypotheses,
            margin: Some(hypotheses_margin),
        },
        GateDoc {
            name: "positivity",
            pass: cert.gates.positivity,
            margin: Some(oi.gamma / 2.0 - oi.delta - 2.0 * report.lmo.eps_tilde),
        },
        GateDoc {
            name: "theta_below_half",
            pass: cert.gates.theta_below_half,
            margin: cert.theta.map(|t| 0.5 - t),
        },
        GateDoc {
            name: "eps_hat_above_tau",
            pass: cert.gates.eps_hat_above_tau,
            margin: cert.tau_star_alt.map(|t| cert.eps_hat - t),
        },
    ];
    let failed_gates = gates.iter().filter(|g| !g.pass).cloned().collect();
    CertificateDoc {
        schema: CERTIFICATE,
        valid: cert.valid(),
        gates,
        failed_gates,
        eps: cert.eps,
        eps_hat: cert.eps_hat,
        c_star: cert.c_star,
        lipschitz: LipschitzDoc {
            big_c: cert.lipschitz.big_c,
            big_d: cert.lipschitz.big_d,
            big_l: cert.lipschitz.big_l,
        },
        theta: cert.theta,
        tau_star: cert.tau_star,
        tau_star_alt: cert.tau_star_alt,
        tau_star_star: cert.tau_star_star,
        radius: cert.radius,
        displacement_bound: cert.displacement_bound,
        ball_within_eps_hat: cert.ball_within_eps_hat,
    }
}

fn trace_doc(set: &IntegralSet<f64>, trace: &NewtonTrace<f64>, opts: &NewtonOptions) -> Result<TraceDoc, CliError> {
    let hf = HartreeFock::new(set);
    let e = hf.energy(&trace.point)?;
    let p0 = GrassmannPoint::<f64>::canonical(set.n_elec(), set.nu())?;
    Ok(TraceDoc {
        schema: TRACE,
        converged: trace.converged,
        recenter: trace.recenter,
        tol: opts.tol,
        max_iter: opts.max_iter,
        iterations: trace
            .iterates
            .iter()
            .enumerate()
            .map(|(index, it)| IterateDoc {
                index,
                gradient_norm: it.gradient_norm,
                step_norm: it.step_norm,
                coords: cmat_to_doc(&it.coords.entries),
            })
            .collect(),
        quadratic_ratios: trace.quadratic_ratios(opts.tol.sqrt()),
        solution: SolutionDoc {
            density: cmat_to_doc(trace.point.projector()),
            energy: EnergyDoc {
                total: e.total,
                kinetic: e.kinetic,
                nuclear: e.nuclear,
                coulomb: e.coulomb,
                exchange: e.exchange,
            },
            commutator_residual: commutator_residual(&hf, &trace.point)?,
            projection_residual: trace.point.residuals().max(),
            displacement: one_inf(&(trace.point.projector() - p0.projector())),
        },
    })
}

fn ortho_result_doc(r: &OrthoResult<f64>) -> OrthoResultDoc {
    OrthoResultDoc {
        transform: cmat_to_doc(&r.transform),
        correction: cmat_to_doc(&r.correction),
        norms: r.norms.clone(),
        eps0: r.chain.eps0,
        eps1: r.chain.eps1,
        eps2: r.chain.eps2,
        eps3: r.chain.eps3,
        eps4: r.chain.eps4,
        s_weighted_norm: r.s_weighted,
    }
}

fn measure(
    cfg: &RunConfig,
    set: &IntegralSet<f64>,
    w: &WeightSet<f64>,
) -> Result<(ConditionReport<f64>, ConditionsDoc), CliError> {
    let report = measure_conditions(set, w)?;
    let contraction = contraction_bound_check(set, w, &report.lmo, cfg.contraction_trials, cfg.seed)?;
    let doc = conditions_doc(&report, &contraction, cfg.seed);
    Ok((report, doc))
}

fn solve(cfg: &RunConfig, set: &IntegralSet<f64>) -> Result<(NewtonTrace<f64>, TraceDoc), CliError> {
    let opts = NewtonOptions {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        recenter: cfg.recenter,
    };
    let trace = newton_solve(set, &opts).map_err(|e| CliError::Solver(e.to_string()))?;
    let doc = trace_doc(set, &trace, &opts)?;
    Ok((trace, doc))
}

fn orthogonalize(cfg: &RunConfig, set: &IntegralSet<f64>, w: &WeightSet<f64>) -> Result<OrthoDoc, CliError> {
    let path = cfg
        .gram
        .as_ref()
        .ok_or_else(|| CliError::Input("orthogonalize needs --gram".into()))?;
    let gram = parse_gram(&read(path)?)?;
    let (out, res) = orthogonalize_pipeline(set, &gram, w)?;
    Ok(OrthoDoc {
        schema: ORTHO,
        result: ortho_result_doc(&res),
        integrals: IntegralSetDoc::from_set(&out, Some(w)),
    })
}

fn gate_status(pass: bool) -> Status {
    if pass {
        Status::Ok
    } else {
        Status::GatesFailed
    }
}

/// Executes one command and renders its document.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.check()?;
    if cfg.command == Command::Generate {
        let (set, w) = synthetic(cfg)?;
        return Ok(Outcome {
            status: Status::Ok,
            document: to_json(&IntegralSetDoc::from_set(&set, Some(&w)))?,
        });
    }
    let loaded = load(cfg)?;
    let set = &loaded.set;
    match cfg.command {
        Command::Validate => {
            let doc = validation_doc(set, loaded.weights.as_ref());
            let status = if doc.valid { Status::Ok } else { Status::InvalidInput };
            Ok(Outcome {
                status,
                document: to_json(&doc)?,
            })
        }
        Command::Conditions => {
            require_valid(set)?;
            let (report, doc) = measure(cfg, set, require_weights(&loaded)?)?;
            let status = gate_status(report.feasible() && doc.contraction.holds);
            Ok(Outcome {
                status,
                document: to_json(&doc)?,
            })
        }
        Command::Certify => {
            require_valid(set)?;
            let w = require_weights(&loaded)?;
            let report = measure_conditions(set, w)?;
            let cert = certify(&report, EpsHatPolicy::Search)?;
            let doc = certificate_doc(&report, w, &cert);
            Ok(Outcome {
                status: gate_status(doc.valid),
                document: to_json(&doc)?,
            })
        }
        Command::Solve => {
            require_valid(set)?;
            let (trace, doc) = solve(cfg, set)?;
            let status = if trace.converged {
                Status::Ok
            } else {
                Status::SolverFailure
            };
            Ok(Outcome {
                status,
                document: to_json(&doc)?,
            })
        }
        Command::Orthogonalize => {
            require_valid(set)?;
            let doc = orthogonalize(cfg, set, require_weights(&loaded)?)?;
            Ok(Outcome {
                status: Status::Ok,
                document: to_json(&doc)?,
            })
        }
        Command::Report => report(cfg, &loaded),
        Command::Generate => unreachable!("handled above"),
    }
}

fn note(status: &mut Status, doc: &mut ReportDoc, e: CliError) {
    *status = status.worst(e.status());
    doc.errors.push(e.to_string());
}

fn report(cfg: &RunConfig, loaded: &Loaded) -> Result<Outcome, CliError> {
    let set = &loaded.set;
    let validation = validation_doc(set, loaded.weights.as_ref());
    let mut doc = ReportDoc {
        schema: REPORT,
        source: loaded.source.clone(),
        validation,
        conditions: None,
        certificate: None,
        trace: None,
        displacement: None,
        orthogonalization: None,
        errors: Vec::new(),
    };
    if !doc.validation.valid {
        doc.errors.push("input failed validation".into());
        return Ok(Outcome {
            status: Status::InvalidInput,
            document: to_json(&doc)?,
        });
    }
    let mut status = Status::Ok;

    let mut cert = None;
    match require_weights(loaded) {
        Ok(w) => match measure(cfg, set, w) {
            Ok((report, cdoc)) => {
                let c = certify(&report, EpsHatPolicy::Search)?;
                let certdoc = certificate_doc(&report, w, &c);
                status = status.worst(gate_status(cdoc.feasible && cdoc.contraction.holds && certdoc.valid));
                doc.conditions = Some(cdoc);
                doc.certificate = Some(certdoc);
                cert = Some(c);
            }
            Err(e) => note(&mut status, &mut doc, e),
        },
        Err(e) => note(&mut status, &mut doc, e),
    }

    match solve(cfg, set) {
        Ok((trace, tdoc)) => {
            if !trace.converged {
                note(
                    &mut status,
                    &mut doc,
                    CliError::Solver(format!("no convergence within {} iterations", cfg.max_iter)),
                );
            }
            if let Some(c) = &cert {
                let d = displacement_check(&trace.point, c)?;
                doc.displacement = Some(DisplacementDoc {
                    measured: d.measured,
                    bound: d.bound,
                    holds: d.holds,
                });
            }
            doc.trace = Some(tdoc);
        }
        Err(e) => note(&mut status, &mut doc, e),
    }

    if cfg.gram.is_some() {
        match require_weights(loaded).and_then(|w| orthogonalize(cfg, set, w)) {
            Ok(o) => doc.orthogonalization = Some(o.result),
            Err(e) => note(&mut status, &mut doc, e),
        }
    }
    Ok(Outcome {
        status,
        document: to_json(&doc)?,
    })
}
