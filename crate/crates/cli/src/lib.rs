//! Report builders and exporters behind the `gtails` binary. Every command
//! produces a deterministic human-readable report or, with `--json`, a
//! versioned machine report.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use gtails_core::kgraph::KSystem;
use gtails_core::oracle;
use gtails_core::periodicity::{ConvergenceOutcome, ConvergenceQuery, Rat};
use gtails_core::spectrum::{PointKind, PrimComponent};
use gtails_core::sysspec::{SpecFormat, SystemSpec};
use gtails_core::tails::{SingularCase, TailTag};
use gtails_core::{Error, Result, SelfSimilarSystem, VertexId};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Exit code classification: 1 for validation failures, 2 for precondition
/// failures with a witness.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NotPseudoFree { .. }
        | Error::EssentialCentralityViolated { .. }
        | Error::NotATail { .. }
        | Error::NotSingular { .. }
        | Error::MalformedSequence(_)
        | Error::Unsupported(_) => 2,
        _ => 1,
    }
}

pub fn load_spec(path: &Path) -> Result<SystemSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    let format = match path.extension().and_then(|s| s.to_str()) {
        Some("toml") => SpecFormat::Toml,
        _ => SpecFormat::Json,
    };
    SystemSpec::parse(&text, format)
}

fn names(sys: &SelfSimilarSystem, set: &BTreeSet<VertexId>) -> Vec<String> {
    set.iter()
        .map(|&v| sys.graph.vertex_name(v).to_string())
        .collect()
}

fn knames(sys: &KSystem, set: &BTreeSet<VertexId>) -> Vec<String> {
    set.iter()
        .map(|&v| sys.skeleton.vertex_name(v).to_string())
        .collect()
}

fn set_label(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

// ---------------------------------------------------------------------------
// tails / classify

#[derive(Debug, Serialize)]
pub struct TailEntry {
    pub vertices: Vec<String>,
    pub tag: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", rename = "witnessVertex")]
    pub witness_vertex: Option<String>,
    pub minimal: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct TailsReport {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub tails: Vec<TailEntry>,
}

pub fn tails_report(spec: &SystemSpec) -> Result<TailsReport> {
    if spec.rank == 1 {
        let sys = spec.build_rank1()?;
        let tails = sys
            .enumerate_maximal_g_tails()
            .into_iter()
            .map(|t| {
                let (period, circuit, witness_vertex) = match &t.tag {
                    TailTag::Circuit { period, witness } => (
                        Some(*period),
                        Some(format!(
                            "({}, {})",
                            sys.group.name(witness.twist),
                            witness.path.display(&sys.graph)
                        )),
                        None,
                    ),
                    TailTag::Finite { witness } => {
                        (None, None, Some(sys.graph.vertex_name(*witness).to_string()))
                    }
                    TailTag::Aperiodic => (None, None, None),
                };
                TailEntry {
                    vertices: names(&sys, &t.vertices),
                    tag: t.tag.short().to_string(),
                    period,
                    circuit,
                    witness_vertex,
                    minimal: names(&sys, &t.minimal_vertices),
                }
            })
            .collect();
        Ok(TailsReport {
            schema_version: REPORT_SCHEMA_VERSION,
            tails,
        })
    } else {
        let sys = spec.build_kgraph()?;
        let tails = sys
            .maximal_g_tails()
            .into_iter()
            .map(|m| TailEntry {
                vertices: knames(&sys, &m),
                tag: "tail".into(),
                period: None,
                circuit: None,
                witness_vertex: None,
                minimal: Vec::new(),
            })
            .collect();
        Ok(TailsReport {
            schema_version: REPORT_SCHEMA_VERSION,
            tails,
        })
    }
}

pub fn render_tails(report: &TailsReport) -> String {
    let mut out = String::new();
    writeln!(out, "maximal G-tails: {}", report.tails.len()).unwrap();
    for t in &report.tails {
        let mut line = format!("  {} [{}]", set_label(&t.vertices), t.tag);
        if let Some(n) = t.period {
            write!(line, " n={n}").unwrap();
        }
        if let Some(c) = &t.circuit {
            write!(line, " circuit {c}").unwrap();
        }
        if let Some(v) = &t.witness_vertex {
            write!(line, " witness {v}").unwrap();
        }
        writeln!(out, "{line}").unwrap();
    }
    out
}

#[derive(Debug, Serialize)]
pub struct SingularEntry {
    pub vertex: String,
    pub case: u8,
    pub breaking: bool,
}

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub tails: Vec<TailEntry>,
    pub singular: Vec<SingularEntry>,
    #[serde(rename = "pseudoFree")]
    pub pseudo_free: bool,
    /// The action is minimal iff the only maximal G-tail is the whole vertex
    /// set.
    pub minimal: bool,
    #[serde(rename = "stabilizerSizes")]
    pub stabilizer_sizes: Vec<(String, usize)>,
}

pub fn classify_report(spec: &SystemSpec) -> Result<ClassifyReport> {
    let sys = spec.build_rank1()?;
    let tails = tails_report(spec)?.tails;
    let bv = sys.breaking_vertices();
    let singular = sys
        .graph
        .singular_vertices()
        .into_iter()
        .map(|v| {
            let case = match sys.classify_singular_vertex(v).expect("singular") {
                SingularCase::NoEntry => 1,
                SingularCase::InfiniteFromTail => 2,
                SingularCase::BreakingCircuit => 3,
                SingularCase::BreakingAperiodic => 4,
            };
            SingularEntry {
                vertex: sys.graph.vertex_name(v).to_string(),
                case,
                breaking: bv.contains(&v),
            }
        })
        .collect();
    let stabilizer_sizes = sys
        .graph
        .vertex_ids()
        .map(|v| {
            (
                sys.graph.vertex_name(v).to_string(),
                sys.vertex_stabilizer(v).len(),
            )
        })
        .collect();
    Ok(ClassifyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tails,
        singular,
        pseudo_free: sys.is_pseudo_free(),
        minimal: sys.is_minimal(),
        stabilizer_sizes,
    })
}

pub fn render_classify(report: &ClassifyReport) -> String {
    let mut out = render_tails(&TailsReport {
        schema_version: report.schema_version,
        tails: report
            .tails
            .iter()
            .map(|t| TailEntry {
                vertices: t.vertices.clone(),
                tag: t.tag.clone(),
                period: t.period,
                circuit: t.circuit.clone(),
                witness_vertex: t.witness_vertex.clone(),
                minimal: t.minimal.clone(),
            })
            .collect(),
    });
    writeln!(out, "pseudo-free: {}", report.pseudo_free).unwrap();
    writeln!(out, "minimal: {}", report.minimal).unwrap();
    if report.singular.is_empty() {
        writeln!(out, "singular vertices: none").unwrap();
    } else {
        writeln!(out, "singular vertices:").unwrap();
        for s in &report.singular {
            writeln!(
                out,
                "  {} case {}{}",
                s.vertex,
                s.case,
                if s.breaking { " (breaking)" } else { "" }
            )
            .unwrap();
        }
    }
    let finite = report
        .stabilizer_sizes
        .iter()
        .map(|(v, n)| format!("{v}:{n}"))
        .collect::<Vec<_>>()
        .join(" ");
    writeln!(out, "vertex stabilizer sizes (all finite, hence amenable): {finite}").unwrap();
    out
}

// ---------------------------------------------------------------------------
// spectrum

#[derive(Debug, Serialize)]
pub struct SpectrumPointEntry {
    pub label: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    pub tail: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub points: Vec<SpectrumPointEntry>,
    /// Strict specialization pairs `a < b` (a in the closure of b).
    pub order: Vec<[String; 2]>,
}

pub fn spectrum_report_rank1(spec: &SystemSpec) -> Result<SpectrumReport> {
    let sys = spec.build_rank1()?;
    let ps = sys.prim_spectrum()?;
    let mut points = Vec::new();
    for (p, c) in ps.quasi.points.iter().zip(&ps.components) {
        let (kind, period) = match c {
            PrimComponent::ClosedPoint => ("point".to_string(), None),
            PrimComponent::Circle { period } => ("circle".to_string(), Some(*period)),
        };
        let label = match &p.kind {
            PointKind::Tail => format!("{kind}[{}]", sys.graph.format_vertex_set(&p.tail)),
            PointKind::BreakingOrbit(orbit) => {
                format!("{kind}[bv {}]", sys.graph.format_vertex_set(orbit))
            }
        };
        points.push(SpectrumPointEntry {
            label,
            kind,
            period,
            tail: names(&sys, &p.tail),
        });
    }
    let mut order = Vec::new();
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i != j && ps.quasi.leq[i][j] {
                order.push([points[i].label.clone(), points[j].label.clone()]);
            }
        }
    }
    Ok(SpectrumReport {
        schema_version: REPORT_SCHEMA_VERSION,
        points,
        order,
    })
}

#[derive(Debug, Serialize)]
pub struct KComponentEntry {
    pub tail: Vec<String>,
    #[serde(rename = "perBasis")]
    pub per_basis: Vec<Vec<i64>>,
    pub per: String,
    #[serde(rename = "certifiedBox")]
    pub certified_box: u32,
}

#[derive(Debug, Serialize)]
pub struct KSpectrumReport {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub components: Vec<KComponentEntry>,
    pub order: Vec<[usize; 2]>,
}

pub fn spectrum_report_kgraph(spec: &SystemSpec, box_bound: u32) -> Result<KSpectrumReport> {
    let sys = spec.build_kgraph()?;
    let ks = sys.spectrum_components(box_bound)?;
    let components = ks
        .components
        .iter()
        .map(|c| KComponentEntry {
            tail: knames(&sys, &c.tail),
            per_basis: c.per.basis().to_vec(),
            per: c.per.to_string(),
            certified_box: c.certificate.box_bound,
        })
        .collect();
    let mut order = Vec::new();
    for i in 0..ks.components.len() {
        for j in 0..ks.components.len() {
            if i != j && ks.leq[i][j] {
                order.push([i, j]);
            }
        }
    }
    Ok(KSpectrumReport {
        schema_version: REPORT_SCHEMA_VERSION,
        components,
        order,
    })
}

pub fn render_spectrum(report: &SpectrumReport) -> String {
    let mut out = String::new();
    let comps: Vec<String> = report
        .points
        .iter()
        .map(|p| match p.period {
            Some(n) => format!("{} n={n}", p.label),
            None => p.label.clone(),
        })
        .collect();
    writeln!(out, "components: {}", comps.join(", ")).unwrap();
    if report.order.is_empty() {
        writeln!(out, "order: discrete").unwrap();
    } else {
        let rel: Vec<String> = report
            .order
            .iter()
            .map(|[a, b]| format!("{a} < {b}"))
            .collect();
        writeln!(out, "order: {}", rel.join("; ")).unwrap();
    }
    writeln!(
        out,
        "closure rule: a circle component closes within itself by w = z^n and attracts every component below it"
    )
    .unwrap();
    out
}

pub fn render_kspectrum(report: &KSpectrumReport) -> String {
    let mut out = String::new();
    writeln!(out, "components: {}", report.components.len()).unwrap();
    for c in &report.components {
        writeln!(
            out,
            "  tail {} character group of Per = {} (certified up to box {})",
            set_label(&c.tail),
            c.per,
            c.certified_box
        )
        .unwrap();
    }
    for [i, j] in &report.order {
        writeln!(
            out,
            "  component {} specializes under component {}",
            set_label(&report.components[*i].tail),
            set_label(&report.components[*j].tail)
        )
        .unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// simplicity

#[derive(Debug, Serialize)]
pub struct SimplicityReport {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub simple: bool,
    pub failures: Vec<String>,
}

pub fn simplicity_report(spec: &SystemSpec) -> Result<SimplicityReport> {
    if spec.rank != 1 {
        return Err(Error::Unsupported(
            "simplicity verdicts are provided for rank-one systems only".into(),
        ));
    }
    let sys = spec.build_rank1()?;
    let v = sys.is_simple()?;
    let failures = v
        .failures
        .iter()
        .map(|f| match f {
            gtails_core::spectrum::SimplicityFailure::NotMinimal { tail } => format!(
                "clause (i): maximal G-tail {} differs from the whole vertex set",
                sys.graph.format_vertex_set(tail)
            ),
            gtails_core::spectrum::SimplicityFailure::NoEntryCircuit { circuit } => format!(
                "clause (ii): no-entry G-circuit ({}, {})",
                sys.group.name(circuit.twist),
                circuit.path.display(&sys.graph)
            ),
            gtails_core::spectrum::SimplicityFailure::TriviallyActing { elem, vertex } => format!(
                "clause (iii): {} acts trivially on {}E*",
                sys.group.name(*elem),
                sys.graph.vertex_name(*vertex)
            ),
        })
        .collect();
    Ok(SimplicityReport {
        schema_version: REPORT_SCHEMA_VERSION,
        simple: v.simple,
        failures,
    })
}

pub fn render_simplicity(report: &SimplicityReport) -> String {
    let mut out = String::new();
    writeln!(out, "simple: {}", report.simple).unwrap();
    for f in &report.failures {
        writeln!(out, "  {f}").unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// per / mperg

#[derive(Debug, Serialize)]
pub struct PerEntry {
    pub tail: Vec<String>,
    pub per: String,
    #[serde(rename = "perBasis")]
    pub per_basis: Vec<Vec<i64>>,
    #[serde(rename = "certifiedBox")]
    pub certified_box: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mperg: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct PerReport {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub entries: Vec<PerEntry>,
}

pub fn per_report(spec: &SystemSpec, box_bound: u32, with_mperg: bool) -> Result<PerReport> {
    if spec.rank == 1 && spec.has_omega_edges() {
        return Err(Error::Unsupported(
            "periodicity analysis needs a row-finite graph without ω-edges".into(),
        ));
    }
    let sys = spec.build_kgraph()?;
    let entries = sys
        .maximal_g_tails()
        .into_iter()
        .map(|m| {
            let (per, cert) = sys.periodicity_group(&m, box_bound);
            let mperg = with_mperg.then(|| knames(&sys, &sys.m_perg(&m, box_bound)));
            PerEntry {
                tail: knames(&sys, &m),
                per: per.to_string(),
                per_basis: per.basis().to_vec(),
                certified_box: cert.box_bound,
                mperg,
            }
        })
        .collect();
    Ok(PerReport {
        schema_version: REPORT_SCHEMA_VERSION,
        entries,
    })
}

pub fn render_per(report: &PerReport) -> String {
    let mut out = String::new();
    for e in &report.entries {
        writeln!(
            out,
            "tail {}: Per = {} (certified up to box {})",
            set_label(&e.tail),
            e.per,
            e.certified_box
        )
        .unwrap();
        if let Some(m) = &e.mperg {
            writeln!(out, "  M_Per = {}", set_label(m)).unwrap();
        }
    }
    out
}

// ---------------------------------------------------------------------------
// converge

#[derive(Debug, Deserialize)]
pub struct ConvergeQueryFile {
    pub target: ConvergePoint,
    pub sequence: Vec<ConvergePoint>,
    #[serde(default = "default_path_len", rename = "pathLen")]
    pub path_len: u32,
    #[serde(default = "default_char_box", rename = "charBox")]
    pub char_box: u32,
}

fn default_path_len() -> u32 {
    2
}
fn default_char_box() -> u32 {
    3
}

#[derive(Debug, Deserialize)]
pub struct ConvergePoint {
    pub tail: Vec<String>,
    /// Rational coordinates like `"1/3"`; the character is `l ↦ e^{2πi⟨t,l⟩}`.
    pub char: Vec<String>,
}

fn parse_rat(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Error::MalformedSequence(format!("bad rational `{s}`")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let d = parse_int(den)?;
            if d == 0 {
                return Err(Error::MalformedSequence(format!("bad rational `{s}`")));
            }
            Ok(Rat::new(parse_int(num)?, d))
        }
        None => Ok(Rat::new(parse_int(s)?, 1)),
    }
}

#[derive(Debug, Serialize)]
pub struct ConvergeReport {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

pub fn converge_report(spec: &SystemSpec, query: &ConvergeQueryFile) -> Result<ConvergeReport> {
    let sys = spec.build_kgraph()?;
    let vertex_set = |tail: &[String]| -> Result<BTreeSet<VertexId>> {
        tail.iter()
            .map(|n| {
                sys.skeleton
                    .vertex_by_name(n)
                    .ok_or_else(|| Error::MalformedSequence(format!("unknown vertex `{n}`")))
            })
            .collect()
    };
    let chars = |c: &[String]| -> Result<Vec<Rat>> { c.iter().map(|s| parse_rat(s)).collect() };
    let q = ConvergenceQuery {
        target_tail: vertex_set(&query.target.tail)?,
        target_char: chars(&query.target.char)?,
        sequence: query
            .sequence
            .iter()
            .map(|p| Ok((vertex_set(&p.tail)?, chars(&p.char)?)))
            .collect::<Result<Vec<_>>>()?,
        path_len: query.path_len,
        char_box: query.char_box,
    };
    let outcome = sys.convergence_certificate(&q)?;
    Ok(match outcome {
        ConvergenceOutcome::Verified => ConvergeReport {
            schema_version: REPORT_SCHEMA_VERSION,
            outcome: "Verified".into(),
            epsilon: None,
            l: None,
            lambda: None,
            reason: None,
        },
        ConvergenceOutcome::Refuted { epsilon, l, lambda } => ConvergeReport {
            schema_version: REPORT_SCHEMA_VERSION,
            outcome: "Refuted".into(),
            epsilon: Some(epsilon),
            l: Some(l),
            lambda: Some(lambda),
            reason: None,
        },
        ConvergenceOutcome::Inconclusive { reason } => ConvergeReport {
            schema_version: REPORT_SCHEMA_VERSION,
            outcome: "Inconclusive".into(),
            epsilon: None,
            l: None,
            lambda: None,
            reason: Some(reason),
        },
    })
}

pub fn render_converge(report: &ConvergeReport) -> String {
    let mut out = String::new();
    writeln!(out, "outcome: {}", report.outcome).unwrap();
    if let (Some(eps), Some(l), Some(lambda)) = (&report.epsilon, &report.l, &report.lambda) {
        writeln!(
            out,
            "counterexample: epsilon={eps} l={l:?} lambda={lambda}"
        )
        .unwrap();
    }
    if let Some(r) = &report.reason {
        writeln!(out, "reason: {r}").unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// oracle

#[derive(Debug, Serialize)]
pub struct OracleReport {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub depth: usize,
    pub window: u32,
    #[serde(rename = "tailsAgree")]
    pub tails_agree: bool,
    #[serde(rename = "orderAgree")]
    pub order_agree: bool,
    #[serde(rename = "pseudoFreeAgree")]
    pub pseudo_free_agree: bool,
}

pub fn oracle_report(spec: &SystemSpec, depth: usize, window: u32) -> Result<OracleReport> {
    if spec.rank != 1 {
        return Err(Error::Unsupported(
            "the oracle subcommand works on rank-one systems".into(),
        ));
    }
    let sys = spec.build_rank1()?;
    let main_tails: Vec<BTreeSet<VertexId>> = sys
        .enumerate_maximal_g_tails()
        .into_iter()
        .map(|t| t.vertices)
        .collect();
    let brute = oracle::maximal_tails_bruteforce(&sys);
    let tails_agree = main_tails == brute;
    let q = sys.quasi_orbit_space();
    let order_agree = oracle::oracle_quasi_order(&sys, &q, depth, window) == q.leq;
    let brute_pf = oracle::pseudo_free_bruteforce(&sys, 10).is_none();
    let pseudo_free_agree = brute_pf == sys.is_pseudo_free();
    Ok(OracleReport {
        schema_version: REPORT_SCHEMA_VERSION,
        depth,
        window,
        tails_agree,
        order_agree,
        pseudo_free_agree,
    })
}

pub fn render_oracle(report: &OracleReport) -> String {
    format!(
        "oracle depth {} window {}\n  tails: {}\n  quasi-orbit order: {}\n  pseudo-freeness: {}\n",
        report.depth,
        report.window,
        if report.tails_agree { "agree" } else { "DISAGREE" },
        if report.order_agree { "agree" } else { "DISAGREE" },
        if report.pseudo_free_agree { "agree" } else { "DISAGREE" },
    )
}

// ---------------------------------------------------------------------------
// export

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DotTarget {
    Quasi,
    Spectrum,
}

/// DOT digraph of the specialization order (transitively reduced). Arrows
/// point from a point to the points in its closure; circle components are
/// annotated `T (n=·)` and higher-rank components carry their Per lattice.
pub fn export_dot(spec: &SystemSpec, target: DotTarget) -> Result<String> {
    let (points, leq): (Vec<(String, Option<String>)>, Vec<Vec<bool>>) = if spec.rank == 1 {
        let sys = spec.build_rank1()?;
        match target {
            DotTarget::Quasi => {
                let q = sys.quasi_orbit_space();
                (
                    q.points.iter().map(|p| (p.label.clone(), None)).collect(),
                    q.leq,
                )
            }
            DotTarget::Spectrum => {
                let s = sys.prim_spectrum()?;
                (
                    s.quasi
                        .points
                        .iter()
                        .zip(&s.components)
                        .map(|(p, c)| {
                            let annotation = match c {
                                PrimComponent::Circle { period } => Some(format!("T (n={period})")),
                                PrimComponent::ClosedPoint => None,
                            };
                            (p.label.clone(), annotation)
                        })
                        .collect(),
                    s.quasi.leq,
                )
            }
        }
    } else {
        let sys = spec.build_kgraph()?;
        match target {
            DotTarget::Quasi => {
                let tails = sys.maximal_g_tails();
                let n = tails.len();
                let mut leq = vec![vec![false; n]; n];
                for i in 0..n {
                    for j in 0..n {
                        leq[i][j] = tails[i].is_subset(&tails[j]);
                    }
                }
                (
                    tails
                        .iter()
                        .map(|t| (sys.skeleton.format_vertex_set(t), None))
                        .collect(),
                    leq,
                )
            }
            DotTarget::Spectrum => {
                let ks = sys.spectrum_components(spec.options.per_box)?;
                (
                    ks.components
                        .iter()
                        .map(|c| {
                            (
                                sys.skeleton.format_vertex_set(&c.tail),
                                Some(format!("Per = {}", c.per)),
                            )
                        })
                        .collect(),
                    ks.leq,
                )
            }
        }
    };
    let n = points.len();
    // Transitive reduction of the strict order.
    let strict = |i: usize, j: usize| i != j && leq[i][j];
    let mut out = String::from("digraph specialization {\n  rankdir=BT;\n");
    for (i, (label, annotation)) in points.iter().enumerate() {
        let text = match annotation {
            Some(a) => format!("{label} {a}"),
            None => label.clone(),
        };
        writeln!(out, "  p{i} [label=\"{text}\"];").unwrap();
    }
    for j in 0..n {
        for i in 0..n {
            if !strict(i, j) {
                continue;
            }
            let covered = (0..n).any(|k| strict(i, k) && strict(k, j));
            if !covered {
                // i lies in the closure of j
                writeln!(out, "  p{j} -> p{i};").unwrap();
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rat("1/3").unwrap(), Rat::new(1, 3));
        assert_eq!(parse_rat("-2/6").unwrap(), Rat::new(-1, 3));
        assert_eq!(parse_rat("2").unwrap(), Rat::new(2, 1));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }
}
