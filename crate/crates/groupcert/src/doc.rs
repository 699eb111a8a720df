//! JSON document formats: candidate functions on disk, certification and
//! oracle reports, and plot data.
//!
//! Rationals cross the file boundary as strings in lowest terms ("-3/4",
//! "2"), never as floats, so serialization is canonical, two runs emit
//! identical bytes, and the digest a report records for its input is a
//! meaningful commitment. Reports carry every number needed to re-verify the
//! verdict without repeating any search; `verify_report` replays one against
//! the original input bytes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::certify::{
    self, AnchorSet, Certificate, DirectionSet, DirectionWitness, HypothesisReport, SystemOutcome,
    SystemReport, Verdict,
};
use crate::minimality::{CheckMode, MinimalityReport, ViolationKind, ViolationWitness};
use crate::oracle::{GridMinimalityReport, OracleReport, Perturbation};
use crate::plf::{PeriodicPLF, RawCell, RawFunction, ValidationError};
use crate::rational::{format_rat, format_vec, parse_rat, Rat, RatParseError};

pub const FORMAT_VERSION: u32 = 1;

pub fn tool_version() -> String {
    format!("groupcert {}", env!("CARGO_PKG_VERSION"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Error)]
pub enum DocError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported document format {0}, this tool reads format {FORMAT_VERSION}")]
    Format(u32),
    #[error(transparent)]
    Rational(#[from] RatParseError),
    #[error("unknown verdict {0:?}")]
    UnknownVerdict(String),
    #[error("unknown pipeline stage {0:?}")]
    UnknownStage(String),
    #[error("unknown violation kind {0:?}")]
    UnknownKind(String),
}

fn parse_vec(v: &[String]) -> Result<Vec<Rat>, RatParseError> {
    v.iter().map(|s| parse_rat(s)).collect()
}

fn parse_mat(m: &[Vec<String>]) -> Result<Vec<Vec<Rat>>, RatParseError> {
    m.iter().map(|v| parse_vec(v)).collect()
}

fn format_mat(m: &[Vec<Rat>]) -> Vec<Vec<String>> {
    m.iter().map(|v| format_vec(v)).collect()
}

/// Serializes any document to its canonical byte form: pretty JSON in struct
/// field order with a trailing newline.
pub fn to_canonical_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document types serialize");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// function documents

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDocument {
    pub format: u32,
    pub k: usize,
    pub f: Vec<String>,
    pub cells: Vec<CellDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDocument {
    pub vertices: Vec<Vec<String>>,
    pub gradient: Vec<String>,
    pub offset: String,
}

impl FunctionDocument {
    pub fn from_function(phi: &PeriodicPLF) -> Self {
        FunctionDocument {
            format: FORMAT_VERSION,
            k: phi.k(),
            f: format_vec(phi.f()),
            cells: phi
                .cells()
                .iter()
                .map(|c| CellDocument {
                    vertices: format_mat(c.simplex.vertices()),
                    gradient: format_vec(&c.gradient),
                    offset: format_rat(&c.offset),
                })
                .collect(),
        }
    }

    pub fn to_raw(&self) -> Result<RawFunction, DocError> {
        if self.format != FORMAT_VERSION {
            return Err(DocError::Format(self.format));
        }
        let cells = self
            .cells
            .iter()
            .map(|c| {
                Ok(RawCell {
                    vertices: parse_mat(&c.vertices)?,
                    gradient: parse_vec(&c.gradient)?,
                    offset: parse_rat(&c.offset)?,
                })
            })
            .collect::<Result<Vec<_>, RatParseError>>()?;
        Ok(RawFunction {
            k: self.k,
            f: parse_vec(&self.f)?,
            cells,
        })
    }
}

/// Parses document bytes down to an unvalidated `RawFunction`. Failures here
/// mean the document itself is malformed; validity of the function it
/// describes is a separate question for `PeriodicPLF::validate`.
pub fn parse_function(bytes: &[u8]) -> Result<RawFunction, DocError> {
    let doc: FunctionDocument = serde_json::from_slice(bytes)?;
    doc.to_raw()
}

// ---------------------------------------------------------------------------
// witnesses and minimality, shared by several documents

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDocument {
    pub kind: String,
    pub points: Vec<Vec<String>>,
    pub lhs: String,
    pub rhs: String,
}

fn kind_str(kind: ViolationKind) -> &'static str {
    match kind {
        ViolationKind::Negativity => "negativity",
        ViolationKind::Origin => "origin",
        ViolationKind::Symmetry => "symmetry",
        ViolationKind::Subadditivity => "subadditivity",
    }
}

impl WitnessDocument {
    fn from_witness(w: &ViolationWitness) -> Self {
        WitnessDocument {
            kind: kind_str(w.kind).to_string(),
            points: format_mat(&w.points),
            lhs: format_rat(&w.lhs),
            rhs: format_rat(&w.rhs),
        }
    }

    fn to_witness(&self) -> Result<ViolationWitness, DocError> {
        let kind = match self.kind.as_str() {
            "negativity" => ViolationKind::Negativity,
            "origin" => ViolationKind::Origin,
            "symmetry" => ViolationKind::Symmetry,
            "subadditivity" => ViolationKind::Subadditivity,
            other => return Err(DocError::UnknownKind(other.to_string())),
        };
        Ok(ViolationWitness {
            kind,
            points: parse_mat(&self.points)?,
            lhs: parse_rat(&self.lhs)?,
            rhs: parse_rat(&self.rhs)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimalityDocument {
    /// `None` when every check ran exactly; `Some(q)` when symmetry and
    /// subadditivity were only verified on the (1/q)-grid.
    pub grid_verified_at: Option<u64>,
    pub minimal: bool,
    pub nonnegativity: Option<WitnessDocument>,
    pub origin: Option<WitnessDocument>,
    pub symmetry: Option<WitnessDocument>,
    pub subadditivity: Option<WitnessDocument>,
}

impl MinimalityDocument {
    fn from_report(r: &MinimalityReport) -> Self {
        MinimalityDocument {
            grid_verified_at: match r.mode {
                CheckMode::Exact => None,
                CheckMode::GridVerified { q } => Some(q),
            },
            minimal: r.is_minimal(),
            nonnegativity: r.nonnegativity.as_ref().map(WitnessDocument::from_witness),
            origin: r.origin.as_ref().map(WitnessDocument::from_witness),
            symmetry: r.symmetry.as_ref().map(WitnessDocument::from_witness),
            subadditivity: r.subadditivity.as_ref().map(WitnessDocument::from_witness),
        }
    }

    fn from_grid_report(r: &GridMinimalityReport) -> Self {
        MinimalityDocument {
            grid_verified_at: Some(r.q),
            minimal: r.is_minimal(),
            nonnegativity: r.nonnegativity.as_ref().map(WitnessDocument::from_witness),
            origin: r.origin.as_ref().map(WitnessDocument::from_witness),
            symmetry: r.symmetry.as_ref().map(WitnessDocument::from_witness),
            subadditivity: r.subadditivity.as_ref().map(WitnessDocument::from_witness),
        }
    }

    fn to_report(&self) -> Result<MinimalityReport, DocError> {
        let opt = |w: &Option<WitnessDocument>| w.as_ref().map(|w| w.to_witness()).transpose();
        Ok(MinimalityReport {
            mode: match self.grid_verified_at {
                None => CheckMode::Exact,
                Some(q) => CheckMode::GridVerified { q },
            },
            nonnegativity: opt(&self.nonnegativity)?,
            origin: opt(&self.origin)?,
            symmetry: opt(&self.symmetry)?,
            subadditivity: opt(&self.subadditivity)?,
        })
    }
}

// ---------------------------------------------------------------------------
// certification reports

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub format: u32,
    pub tool: String,
    pub input_sha256: String,
    pub k: usize,
    pub f: Vec<String>,
    pub verdict: String,
    pub failure_stage: Option<String>,
    pub notes: Vec<String>,
    pub minimality: MinimalityDocument,
    pub slope_count: usize,
    pub slope_bound: usize,
    pub gradient_rank: usize,
    pub genuinely_k_dimensional: bool,
    pub origin_incidence: Vec<bool>,
    pub class_gradients: Vec<Vec<String>>,
    pub directions: Option<DirectionsDocument>,
    pub anchors: Option<Vec<Vec<String>>>,
    pub system: Option<SystemDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionsDocument {
    pub epsilon: String,
    pub vectors: Vec<Vec<String>>,
    pub witnesses: Vec<Vec<DirectionWitnessDocument>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionWitnessDocument {
    pub class: usize,
    pub cell: usize,
    pub corner: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub unknowns: usize,
    pub rows: usize,
    pub rank: usize,
    /// Row i holds the segment masses of anchor i, one column per class.
    pub mu: Vec<Vec<String>>,
    pub solution: SystemSolutionDocument,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSolutionDocument {
    Unique { gradients: Vec<Vec<String>> },
    Degenerate { nullspace: Vec<Vec<String>> },
}

pub fn report_from_certificate(cert: &Certificate, input: &[u8]) -> ReportDocument {
    ReportDocument {
        format: FORMAT_VERSION,
        tool: tool_version(),
        input_sha256: sha256_hex(input),
        k: cert.k,
        f: format_vec(&cert.f),
        verdict: cert.verdict.as_str().to_string(),
        failure_stage: cert.failure_stage.map(str::to_string),
        notes: cert.notes.clone(),
        minimality: MinimalityDocument::from_report(&cert.hypotheses.minimality),
        slope_count: cert.hypotheses.slope_count,
        slope_bound: cert.hypotheses.slope_bound,
        gradient_rank: cert.hypotheses.gradient_rank,
        genuinely_k_dimensional: cert.hypotheses.genuinely_k_dimensional,
        origin_incidence: cert.hypotheses.origin_incidence.clone(),
        class_gradients: format_mat(&cert.class_gradients),
        directions: cert.directions.as_ref().map(|d| DirectionsDocument {
            epsilon: format_rat(&d.epsilon),
            vectors: format_mat(&d.directions),
            witnesses: d
                .witnesses
                .iter()
                .map(|ws| {
                    ws.iter()
                        .map(|w| DirectionWitnessDocument {
                            class: w.class,
                            cell: w.cell,
                            corner: format_vec(&w.corner),
                        })
                        .collect()
                })
                .collect(),
        }),
        anchors: cert.anchors.as_ref().map(|a| format_mat(&a.anchors)),
        system: cert.system.as_ref().map(|s| SystemDocument {
            unknowns: s.unknowns,
            rows: s.rows,
            rank: s.rank,
            mu: s.mu.chunks(cert.k + 1).map(format_vec).collect(),
            solution: match &s.outcome {
                SystemOutcome::Unique { gradients } => SystemSolutionDocument::Unique {
                    gradients: format_mat(gradients),
                },
                SystemOutcome::Degenerate { nullspace } => SystemSolutionDocument::Degenerate {
                    nullspace: format_mat(nullspace),
                },
            },
        }),
    }
}

impl ReportDocument {
    pub fn to_certificate(&self) -> Result<Certificate, DocError> {
        let verdict = match self.verdict.as_str() {
            "facet-certified" => Verdict::FacetCertified,
            "hypothesis-failed" => Verdict::HypothesisFailed,
            "system-degenerate" => Verdict::SystemDegenerate,
            "inconclusive" => Verdict::Inconclusive,
            other => return Err(DocError::UnknownVerdict(other.to_string())),
        };
        let failure_stage = self
            .failure_stage
            .as_ref()
            .map(|s| {
                certify::STAGES
                    .iter()
                    .copied()
                    .find(|t| *t == s.as_str())
                    .ok_or_else(|| DocError::UnknownStage(s.clone()))
            })
            .transpose()?;
        let directions = self
            .directions
            .as_ref()
            .map(|d| -> Result<DirectionSet, DocError> {
                Ok(DirectionSet {
                    directions: parse_mat(&d.vectors)?,
                    epsilon: parse_rat(&d.epsilon)?,
                    witnesses: d
                        .witnesses
                        .iter()
                        .map(|ws| {
                            ws.iter()
                                .map(|w| {
                                    Ok(DirectionWitness {
                                        class: w.class,
                                        cell: w.cell,
                                        corner: parse_vec(&w.corner)?,
                                    })
                                })
                                .collect::<Result<Vec<_>, RatParseError>>()
                        })
                        .collect::<Result<Vec<_>, RatParseError>>()?,
                })
            })
            .transpose()?;
        let anchors = self
            .anchors
            .as_ref()
            .map(|a| parse_mat(a).map(|anchors| AnchorSet { anchors }))
            .transpose()?;
        let system = self
            .system
            .as_ref()
            .map(|s| -> Result<SystemReport, DocError> {
                Ok(SystemReport {
                    unknowns: s.unknowns,
                    rows: s.rows,
                    rank: s.rank,
                    mu: parse_mat(&s.mu)?.concat(),
                    outcome: match &s.solution {
                        SystemSolutionDocument::Unique { gradients } => SystemOutcome::Unique {
                            gradients: parse_mat(gradients)?,
                        },
                        SystemSolutionDocument::Degenerate { nullspace } => {
                            SystemOutcome::Degenerate {
                                nullspace: parse_mat(nullspace)?,
                            }
                        }
                    },
                })
            })
            .transpose()?;
        Ok(Certificate {
            k: self.k,
            f: parse_vec(&self.f)?,
            verdict,
            failure_stage,
            notes: self.notes.clone(),
            hypotheses: HypothesisReport {
                minimality: self.minimality.to_report()?,
                slope_count: self.slope_count,
                slope_bound: self.slope_bound,
                gradient_rank: self.gradient_rank,
                genuinely_k_dimensional: self.genuinely_k_dimensional,
                origin_incidence: self.origin_incidence.clone(),
            },
            class_gradients: parse_mat(&self.class_gradients)?,
            directions,
            anchors,
            system,
        })
    }
}

#[derive(Debug, Error)]
pub enum ReportCheckError {
    #[error("report was made for sha256 {report}, input bytes hash to {input}")]
    DigestMismatch { report: String, input: String },
    #[error(transparent)]
    Doc(#[from] DocError),
    #[error("input does not describe a valid function: {0}")]
    Invalid(#[from] ValidationError),
    #[error(transparent)]
    Replay(#[from] certify::ReplayError),
}

/// Re-verifies a report against the exact input bytes it claims to describe:
/// the digest must match, the input must parse and validate, and the
/// embedded certificate must replay cleanly under `verify_certificate`.
pub fn verify_report(
    function_bytes: &[u8],
    report: &ReportDocument,
) -> Result<(), ReportCheckError> {
    let input = sha256_hex(function_bytes);
    if input != report.input_sha256 {
        return Err(ReportCheckError::DigestMismatch {
            report: report.input_sha256.clone(),
            input,
        });
    }
    let phi = PeriodicPLF::validate(parse_function(function_bytes)?)?;
    let cert = report.to_certificate()?;
    certify::verify_certificate(&phi, &cert)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// oracle reports

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleDocument {
    pub format: u32,
    pub tool: String,
    pub input_sha256: String,
    pub q: u64,
    pub unknowns: usize,
    pub rows: usize,
    pub rank: usize,
    pub verdict: String,
    pub minimality: MinimalityDocument,
    pub nullspace: Vec<Vec<String>>,
    pub perturbation: Option<PerturbationDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationDocument {
    pub epsilon: String,
    pub delta: Vec<String>,
}

pub fn oracle_document(report: &OracleReport, input: &[u8]) -> OracleDocument {
    OracleDocument {
        format: FORMAT_VERSION,
        tool: tool_version(),
        input_sha256: sha256_hex(input),
        q: report.q,
        unknowns: report.unknowns,
        rows: report.rows,
        rank: report.rank,
        verdict: report.verdict.as_str().to_string(),
        minimality: MinimalityDocument::from_grid_report(&report.minimality),
        nullspace: format_mat(&report.nullspace),
        perturbation: report
            .perturbation
            .as_ref()
            .map(|p: &Perturbation| PerturbationDocument {
                epsilon: format_rat(&p.epsilon),
                delta: format_vec(&p.delta),
            }),
    }
}

// ---------------------------------------------------------------------------
// validation reports and plot data

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationDocument {
    pub format: u32,
    pub tool: String,
    pub input_sha256: String,
    pub valid: bool,
    pub error: Option<String>,
    pub k: Option<usize>,
    pub f: Option<Vec<String>>,
    pub cell_count: Option<usize>,
    pub slope_count: Option<usize>,
}

impl ValidationDocument {
    pub fn passed(phi: &PeriodicPLF, input: &[u8]) -> Self {
        ValidationDocument {
            format: FORMAT_VERSION,
            tool: tool_version(),
            input_sha256: sha256_hex(input),
            valid: true,
            error: None,
            k: Some(phi.k()),
            f: Some(format_vec(phi.f())),
            cell_count: Some(phi.cells().len()),
            slope_count: Some(phi.slope_partition().classes.len()),
        }
    }

    pub fn failed(error: &ValidationError, input: &[u8]) -> Self {
        ValidationDocument {
            format: FORMAT_VERSION,
            tool: tool_version(),
            input_sha256: sha256_hex(input),
            valid: false,
            error: Some(error.to_string()),
            k: None,
            f: None,
            cell_count: None,
            slope_count: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotDocument {
    pub format: u32,
    pub k: usize,
    pub f: Vec<String>,
    /// Distinct gradients in slope-partition order; `cells[i].class` indexes
    /// into this list.
    pub class_gradients: Vec<Vec<String>>,
    pub cells: Vec<PlotCellDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotCellDocument {
    pub class: usize,
    pub vertices: Vec<Vec<String>>,
}

/// Cells in document order with their slope class, enough to draw the
/// complex with one color per class. Rendering itself is out of scope.
pub fn plot_document(phi: &PeriodicPLF) -> PlotDocument {
    let partition = phi.slope_partition();
    PlotDocument {
        format: FORMAT_VERSION,
        k: phi.k(),
        f: format_vec(phi.f()),
        class_gradients: format_mat(&partition.gradients()),
        cells: phi
            .cells()
            .iter()
            .enumerate()
            .map(|(i, c)| PlotCellDocument {
                class: partition.class_of_cell(i),
                vertices: format_mat(c.simplex.vertices()),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::certify::certify_facet;
    use crate::oracle::{oracle_extremality, restrict_to_grid};
    use crate::rational::rat;

    fn gmi_bytes() -> Vec<u8> {
        let phi = catalog::gmi(&rat(2, 5)).unwrap();
        to_canonical_json(&FunctionDocument::from_function(&phi)).into_bytes()
    }

    #[test]
    fn function_documents_round_trip_and_are_deterministic() {
        let phi = catalog::gmi(&rat(2, 5)).unwrap();
        let bytes = gmi_bytes();
        assert_eq!(bytes, gmi_bytes());

        let raw = parse_function(&bytes).unwrap();
        let reparsed = PeriodicPLF::validate(raw).unwrap();
        assert_eq!(reparsed.f(), phi.f());
        for x in [rat(0, 1), rat(1, 5), rat(3, 5), rat(9, 10)] {
            assert_eq!(
                reparsed.evaluate(std::slice::from_ref(&x)),
                phi.evaluate(&[x])
            );
        }
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(matches!(
            parse_function(b"{ truncated"),
            Err(DocError::Json(_))
        ));
        let bad_rat = br#"{"format":1,"k":1,"f":["2//5"],"cells":[]}"#;
        assert!(matches!(
            parse_function(bad_rat),
            Err(DocError::Rational(_))
        ));
        let bad_version = br#"{"format":2,"k":1,"f":["2/5"],"cells":[]}"#;
        assert!(matches!(
            parse_function(bad_version),
            Err(DocError::Format(2))
        ));
        let unknown_field = br#"{"format":1,"k":1,"f":["2/5"],"cells":[],"extra":0}"#;
        assert!(matches!(
            parse_function(unknown_field),
            Err(DocError::Json(_))
        ));
    }

    #[test]
    fn reports_replay_through_serialization() {
        let bytes = gmi_bytes();
        let phi = PeriodicPLF::validate(parse_function(&bytes).unwrap()).unwrap();
        let cert = certify_facet(&phi).unwrap();
        let report = report_from_certificate(&cert, &bytes);

        let json = to_canonical_json(&report);
        let parsed: ReportDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.verdict, "facet-certified");
        assert_eq!(parsed.class_gradients, vec![vec!["5/3"], vec!["-5/2"]]);
        verify_report(&bytes, &parsed).unwrap();

        // replay must reject both a touched input and a touched report
        let mut other = bytes.clone();
        other.push(b'\n');
        assert!(matches!(
            verify_report(&other, &parsed),
            Err(ReportCheckError::DigestMismatch { .. })
        ));
        let mut tampered = parsed.clone();
        tampered.system.as_mut().unwrap().mu[0][0] = "2/3".to_string();
        assert!(matches!(
            verify_report(&bytes, &tampered),
            Err(ReportCheckError::Replay(_))
        ));
    }

    #[test]
    fn failed_certificates_serialize_their_witnesses() {
        let phi = catalog::spike().unwrap();
        let bytes = to_canonical_json(&FunctionDocument::from_function(&phi)).into_bytes();
        let cert = certify_facet(&phi).unwrap();
        let report = report_from_certificate(&cert, &bytes);
        assert_eq!(report.verdict, "hypothesis-failed");
        assert_eq!(report.failure_stage.as_deref(), Some("minimality"));
        let w = report.minimality.subadditivity.as_ref().unwrap();
        assert_eq!(w.points, vec![vec!["1/4"], vec!["1/4"]]);

        // a failed report still reconstructs, and replay refuses it
        let cert2 = report.to_certificate().unwrap();
        assert!(certify::verify_certificate(&phi, &cert2).is_err());
    }

    #[test]
    fn oracle_documents_carry_the_perturbation() {
        let phi = catalog::three_slope_nonextreme().unwrap();
        let bytes = to_canonical_json(&FunctionDocument::from_function(&phi)).into_bytes();
        let report = oracle_extremality(&restrict_to_grid(&phi, 12).unwrap());
        let doc = oracle_document(&report, &bytes);
        assert_eq!(doc.verdict, "degenerate");
        assert_eq!(doc.rank, 8);
        let p = doc.perturbation.unwrap();
        assert_eq!(p.epsilon, "1/8");
        assert_eq!(p.delta[2], "-1");
        assert_eq!(p.delta[4], "1");
    }

    #[test]
    fn plot_data_lists_cells_with_their_classes() {
        let phi = catalog::gmi(&rat(2, 5)).unwrap();
        let plot = plot_document(&phi);
        assert_eq!(plot.k, 1);
        assert_eq!(plot.class_gradients, vec![vec!["5/3"], vec!["-5/2"]]);
        assert_eq!(plot.cells.len(), 2);
        assert_eq!(plot.cells[0].class, 0);
        assert_eq!(plot.cells[1].class, 1);
        assert_eq!(plot.cells[0].vertices, vec![vec!["0"], vec!["3/5"]]);

        let triangle = catalog::triangle_lifting().unwrap();
        let plot = plot_document(&triangle);
        assert_eq!(plot.class_gradients.len(), 3);
        for cell in &plot.cells {
            assert!(cell.class < 3);
            assert_eq!(cell.vertices.len(), 3);
        }
    }
}
