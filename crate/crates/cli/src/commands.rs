use std::io::Write;
use std::path::Path;

use orbitcoh::involution::CandidateVerdict;
use orbitcoh::spectral::SimpleCoefficients;
use orbitcoh::{
    analyze_all, classify, present_orbit_ring, verify_presentation, BorelFiber, CandidateFate, CaseVerdict,
    OrbitPresentation, Outcome, SeriesMismatch,
};
use serde::Serialize;

use crate::config::{read_presentation, JobConfig, OutputFormat};
use crate::{CliError, Status};

/// Every verdict for a fiber, plus the rebuilt ring of each survivor.
pub struct Analysis {
    pub fiber: BorelFiber,
    pub verdicts: Vec<CaseVerdict>,
    pub rings: Vec<SurvivorRing>,
}

pub struct SurvivorRing {
    /// Index into `verdicts`.
    pub case: usize,
    pub ring: OrbitPresentation,
    pub check: Result<(), SeriesMismatch>,
}

impl Analysis {
    pub fn ring_for(&self, case: usize) -> Option<&SurvivorRing> {
        self.rings.iter().find(|r| r.case == case)
    }

    pub fn survivors(&self) -> impl Iterator<Item = &CaseVerdict> {
        self.verdicts.iter().filter(|v| v.survives())
    }

    /// `Tot(E∞)` over the degrees inspected by the vanishing check.
    pub fn tot_dims(&self, v: &CaseVerdict) -> Option<Vec<usize>> {
        let top = self.fiber.dim_x() + self.fiber.fiber_top();
        v.e_infinity().map(|e| e.total_dimensions(top))
    }
}

pub fn analyze(cfg: &JobConfig) -> Result<Analysis, CliError> {
    let fiber = cfg.borel_fiber()?;
    let verdicts = analyze_all(&fiber)?;
    let mut rings = Vec::new();
    for (case, v) in verdicts.iter().enumerate() {
        if !v.survives() {
            continue;
        }
        let e_inf = v.e_infinity().expect("survivors carry pages");
        let ring = present_orbit_ring(&fiber, e_inf, cfg.strict_extensions)?;
        let check = verify_presentation(&ring.presentation, &e_inf.total_dimensions(fiber.dim_x()));
        rings.push(SurvivorRing { case, ring, check });
    }
    Ok(Analysis {
        fiber,
        verdicts,
        rings,
    })
}

#[derive(Serialize)]
struct Header<'a> {
    record: &'static str,
    command: &'a str,
    fiber: String,
    dim_x: u32,
    fiber_top: Option<u32>,
    p_window: Option<u32>,
    assume_trivial_action: bool,
    hypothesis: &'static str,
    strict_extensions: bool,
}

fn header<'a>(cfg: &JobConfig, command: &'a str, fiber: Option<&BorelFiber>) -> Header<'a> {
    Header {
        record: "header",
        command,
        fiber: cfg.fiber.describe(),
        dim_x: cfg.dim_x,
        fiber_top: cfg.presentation.top_degree(),
        p_window: fiber.map(BorelFiber::p_window),
        assume_trivial_action: cfg.assume_trivial_action,
        hypothesis: match fiber.map(BorelFiber::hypothesis) {
            Some(SimpleCoefficients::Assumed) => "assumed",
            Some(SimpleCoefficients::Forced) => "forced",
            None => "not used",
        },
        strict_extensions: cfg.strict_extensions,
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, record: &T) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn join_dims(dims: &[usize]) -> String {
    dims.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn text_header(cfg: &JobConfig, fiber: &BorelFiber, out: &mut dyn Write) -> Result<(), CliError> {
    writeln!(
        out,
        "fiber {}: dim X = {}, fiber top degree {}, columns 0..={}",
        cfg.fiber.describe(),
        fiber.dim_x(),
        fiber.fiber_top(),
        fiber.p_window()
    )?;
    let hyp = match fiber.hypothesis() {
        SimpleCoefficients::Assumed => "assumed (trivial action on mod 2 cohomology)",
        SimpleCoefficients::Forced => "forced (no nontrivial involutive automorphism)",
    };
    writeln!(out, "simple coefficients: {hyp}")?;
    if cfg.strict_extensions {
        writeln!(out, "extension problems: strict")?;
    }
    Ok(())
}

// ---- actions ----------------------------------------------------------------

#[derive(Serialize)]
struct CandidateRecord {
    record: &'static str,
    action: String,
    fate: &'static str,
    detail: Option<String>,
    witness_class: Option<String>,
    witness_product: Option<String>,
}

fn fate_kind(f: &CandidateFate) -> &'static str {
    match f {
        CandidateFate::NotEliminated => "not_eliminated",
        CandidateFate::NotAutomorphism(_) => "not_automorphism",
        CandidateFate::NotInvolutive { .. } => "not_involutive",
        CandidateFate::Bredon(_) => "bredon",
    }
}

fn fate_detail(cfg: &JobConfig, v: &CandidateVerdict) -> Option<String> {
    let p = &cfg.presentation;
    match &v.fate {
        CandidateFate::NotEliminated => None,
        CandidateFate::NotAutomorphism(r) => Some(r.to_string()),
        CandidateFate::NotInvolutive {
            generator,
            image_of_image,
        } => Some(format!(
            "T*(T*({})) = {}",
            p.generators()[*generator].name,
            p.fmt_element(image_of_image)
        )),
        CandidateFate::Bredon(w) => Some(format!(
            "a = {} in degree {}, a*T*(a) = {} != 0",
            p.fmt_element(&w.middle_class),
            w.degree,
            p.fmt_element(&w.product)
        )),
    }
}

pub fn cmd_actions(cfg: &JobConfig, out: &mut dyn Write) -> Result<Status, CliError> {
    let p = &cfg.presentation;
    let report = classify(p)?;
    let survivors: Vec<String> = report.survivors().map(|c| c.describe(p)).collect();
    let forced = survivors.len() == 1;
    match cfg.output {
        OutputFormat::Structured => {
            emit(out, &header(cfg, "actions", None))?;
            for v in &report.verdicts {
                let (witness_class, witness_product) = match &v.fate {
                    CandidateFate::Bredon(w) => (Some(p.fmt_element(&w.middle_class)), Some(p.fmt_element(&w.product))),
                    _ => (None, None),
                };
                emit(
                    out,
                    &CandidateRecord {
                        record: "candidate",
                        action: v.candidate.describe(p),
                        fate: fate_kind(&v.fate),
                        detail: fate_detail(cfg, v),
                        witness_class,
                        witness_product,
                    },
                )?;
            }
            #[derive(Serialize)]
            struct Summary {
                record: &'static str,
                candidates: usize,
                not_eliminated: Vec<String>,
                bredon_degree: u32,
                bredon_note: Option<String>,
                trivial_action_forced: bool,
            }
            emit(
                out,
                &Summary {
                    record: "summary",
                    candidates: report.raw_count,
                    not_eliminated: survivors,
                    bredon_degree: report.bredon_degree,
                    bredon_note: report.bredon_note.clone(),
                    trivial_action_forced: forced,
                },
            )?;
        }
        OutputFormat::Text => {
            writeln!(
                out,
                "fiber {}: top degree {}, fixed-point test in degree {}",
                cfg.fiber.describe(),
                p.top_degree().unwrap_or(0),
                report.bredon_degree
            )?;
            if let Some(note) = &report.bredon_note {
                writeln!(out, "fixed-point test unavailable: {note}")?;
            }
            writeln!(out, "{} candidate actions", report.raw_count)?;
            writeln!(out)?;
            let width = report
                .verdicts
                .iter()
                .map(|v| v.candidate.describe(p).len())
                .max()
                .unwrap_or(0)
                .max(6);
            writeln!(out, "{:<width$}  fate", "action")?;
            for v in &report.verdicts {
                let fate = match fate_detail(cfg, v) {
                    None => "not eliminated".to_string(),
                    Some(d) => format!("{}: {d}", fate_kind(&v.fate).replace('_', " ")),
                };
                writeln!(out, "{:<width$}  {fate}", v.candidate.describe(p))?;
            }
            writeln!(out)?;
            writeln!(out, "not eliminated: {}", survivors.join("; "))?;
            if forced {
                writeln!(out, "the induced action on mod 2 cohomology is trivial")?;
            } else {
                writeln!(
                    out,
                    "unresolved: {} nontrivial candidates remain; `analyze` needs --assume-trivial-action",
                    survivors.len() - 1
                )?;
            }
        }
    }
    Ok(Status::Success)
}

// ---- analyze ----------------------------------------------------------------

#[derive(Serialize)]
struct GeneratorRecord {
    name: String,
    degree: u32,
    p: u32,
    q: u32,
    provenance: &'static str,
    representative: String,
}

#[derive(Serialize)]
struct VerdictRecord {
    record: &'static str,
    case_id: String,
    assignment: String,
    outcome: &'static str,
    reason: Option<&'static str>,
    detail: Option<String>,
    tot_dims: Option<Vec<usize>>,
    generators: Vec<GeneratorRecord>,
    relations: Vec<String>,
    extension_sensitive: Vec<String>,
    presentation: Option<String>,
    verification: Option<String>,
}

fn check_text(check: &Result<(), SeriesMismatch>) -> String {
    match check {
        Ok(()) => "pass".into(),
        Err(e) => format!("fail: {e}"),
    }
}

fn verdict_record(a: &Analysis, i: usize) -> VerdictRecord {
    let v = &a.verdicts[i];
    let p = a.fiber.presentation();
    let (outcome, reason, detail) = match &v.outcome {
        Outcome::Survives => ("survives", None, None),
        Outcome::Eliminated(r) => ("eliminated", Some(r.kind()), Some(r.detail(p))),
    };
    let mut rec = VerdictRecord {
        record: "verdict",
        case_id: v.case_id.clone(),
        assignment: v.assignment.describe(p),
        outcome,
        reason,
        detail,
        tot_dims: a.tot_dims(v),
        generators: Vec::new(),
        relations: Vec::new(),
        extension_sensitive: Vec::new(),
        presentation: None,
        verification: None,
    };
    if let Some(sr) = a.ring_for(i) {
        let ring = &sr.ring;
        rec.generators = ring
            .generators
            .iter()
            .map(|g| GeneratorRecord {
                name: g.name.clone(),
                degree: g.degree(),
                p: g.p,
                q: g.q,
                provenance: g.provenance.as_str(),
                representative: g.representative.fmt_with(p),
            })
            .collect();
        let rels = ring.relation_strings();
        rec.extension_sensitive = ring.extension_sensitive.iter().map(|&k| rels[k].clone()).collect();
        rec.relations = rels;
        rec.presentation = Some(ring.presentation.to_text());
        rec.verification = Some(check_text(&sr.check));
    }
    rec
}

pub fn cmd_analyze(cfg: &JobConfig, out: &mut dyn Write) -> Result<Status, CliError> {
    let a = analyze(cfg)?;
    let records: Vec<VerdictRecord> = (0..a.verdicts.len()).map(|i| verdict_record(&a, i)).collect();
    let surviving = a.survivors().count();
    match cfg.output {
        OutputFormat::Structured => {
            emit(out, &header(cfg, "analyze", Some(&a.fiber)))?;
            for r in &records {
                emit(out, r)?;
            }
            #[derive(Serialize)]
            struct Summary {
                record: &'static str,
                cases: usize,
                surviving: Vec<String>,
            }
            emit(
                out,
                &Summary {
                    record: "summary",
                    cases: records.len(),
                    surviving: a.survivors().map(|v| v.case_id.clone()).collect(),
                },
            )?;
        }
        OutputFormat::Text => {
            text_header(cfg, &a.fiber, out)?;
            writeln!(out, "{} cases, {} surviving", records.len(), surviving)?;
            writeln!(out)?;
            let id_w = records.iter().map(|r| r.case_id.len()).max().unwrap_or(4).max(4);
            writeln!(out, "{:<id_w$}  {:<10}  {:<20}  assignment", "case", "outcome", "reason")?;
            for r in &records {
                writeln!(
                    out,
                    "{:<id_w$}  {:<10}  {:<20}  {}",
                    r.case_id,
                    r.outcome,
                    r.reason.unwrap_or("-"),
                    r.assignment
                )?;
            }
            writeln!(out)?;
            writeln!(out, "Tot(E_inf) in degrees 0..={}", a.fiber.dim_x() + a.fiber.fiber_top())?;
            for r in &records {
                let dims = r.tot_dims.as_deref().map_or("-".into(), join_dims);
                writeln!(out, "  {:<id_w$}  {dims}", r.case_id)?;
            }
            writeln!(out)?;
            writeln!(out, "eliminations")?;
            for r in records.iter().filter(|r| r.outcome == "eliminated") {
                writeln!(out, "  {}: {}", r.case_id, r.detail.as_deref().unwrap_or(""))?;
            }
            for r in records.iter().filter(|r| r.outcome == "survives") {
                writeln!(out)?;
                writeln!(out, "survivor {}", r.case_id)?;
                writeln!(out, "  generators")?;
                for g in &r.generators {
                    writeln!(
                        out,
                        "    {:<8} degree {:<3} E_inf^{{{},{}}}  {:<8}  {}",
                        g.name, g.degree, g.p, g.q, g.provenance, g.representative
                    )?;
                }
                writeln!(out, "  relations")?;
                for rel in &r.relations {
                    writeln!(out, "    {rel}")?;
                }
                if !r.extension_sensitive.is_empty() {
                    writeln!(
                        out,
                        "  read in the associated graded only: {}",
                        r.extension_sensitive.join(", ")
                    )?;
                }
                writeln!(out, "  presentation")?;
                for line in r.presentation.as_deref().unwrap_or("").lines() {
                    writeln!(out, "    {line}")?;
                }
                writeln!(out, "  Poincare series check: {}", r.verification.as_deref().unwrap_or("-"))?;
            }
        }
    }
    Ok(Status::Success)
}

// ---- pages ------------------------------------------------------------------

pub fn cmd_pages(cfg: &JobConfig, case_id: &str, r: u32, out: &mut dyn Write) -> Result<Status, CliError> {
    if r < 2 {
        return Err(CliError::Usage("pages start at r = 2".into()));
    }
    let fiber = cfg.borel_fiber()?;
    let p = fiber.presentation();
    let assignment = orbitcoh::enumerate_assignments(p)?
        .into_iter()
        .find(|a| {
            orbitcoh::spectral::wall_case_label(p, a).as_deref() == Some(case_id) || a.short_id(p) == case_id
        })
        .ok_or_else(|| CliError::UnknownCase(case_id.to_string()))?;
    let verdict = orbitcoh::run_case(&fiber, &assignment)?;
    let run = verdict.run.as_ref().ok_or_else(|| CliError::NoPages(verdict.case_id.clone()))?;
    let page = run.page_or_limit(r).expect("r >= 2");
    let is_limit = r > page.r();
    match cfg.output {
        OutputFormat::Structured => {
            emit(out, &header(cfg, "pages", Some(&fiber)))?;
            #[derive(Serialize)]
            struct PageRecord {
                record: &'static str,
                case_id: String,
                r: u32,
                computed_page: u32,
                stable_total_degree: u32,
                dims: Vec<Vec<usize>>,
            }
            emit(
                out,
                &PageRecord {
                    record: "page",
                    case_id: verdict.case_id.clone(),
                    r,
                    computed_page: page.r(),
                    stable_total_degree: page.stable_total_degree(),
                    dims: (0..=page.p_window())
                        .map(|pp| (0..=page.fiber_top()).map(|q| page.dim(pp, q)).collect())
                        .collect(),
                },
            )?;
        }
        OutputFormat::Text => {
            text_header(cfg, &fiber, out)?;
            writeln!(out, "case {}: {}", verdict.case_id, verdict.assignment.describe(p))?;
            if is_limit {
                writeln!(out, "E_{r} = E_{} = E_inf", page.r())?;
            }
            out.write_all(page.render().as_bytes())?;
        }
    }
    Ok(Status::Success)
}

// ---- verify -----------------------------------------------------------------

pub fn cmd_verify(cfg: &JobConfig, file: &Path, out: &mut dyn Write) -> Result<Status, CliError> {
    let candidate = read_presentation(&file.to_path_buf())?;
    let a = analyze(cfg)?;
    let survivors: Vec<&CaseVerdict> = a.survivors().collect();
    let [survivor] = survivors.as_slice() else {
        return Err(CliError::NoUniqueSurvivor(survivors.len()));
    };
    let tot = survivor
        .e_infinity()
        .expect("survivors carry pages")
        .total_dimensions(a.fiber.dim_x());
    let check = verify_presentation(&candidate, &tot);
    match cfg.output {
        OutputFormat::Structured => {
            emit(out, &header(cfg, "verify", Some(&a.fiber)))?;
            #[derive(Serialize)]
            struct VerifyRecord {
                record: &'static str,
                case_id: String,
                presentation: String,
                tot_dims: Vec<usize>,
                result: &'static str,
                degree: Option<u32>,
                expected: Option<usize>,
                found: Option<usize>,
            }
            let (result, degree, expected, found) = match &check {
                Ok(()) => ("pass", None, None, None),
                Err(e) => ("fail", Some(e.degree), Some(e.expected), Some(e.found)),
            };
            emit(
                out,
                &VerifyRecord {
                    record: "verify",
                    case_id: survivor.case_id.clone(),
                    presentation: file.display().to_string(),
                    tot_dims: tot.clone(),
                    result,
                    degree,
                    expected,
                    found,
                },
            )?;
        }
        OutputFormat::Text => {
            text_header(cfg, &a.fiber, out)?;
            writeln!(out, "survivor {}: Tot(E_inf) = {}", survivor.case_id, join_dims(&tot))?;
            writeln!(out, "{}: {}", file.display(), check_text(&check))?;
        }
    }
    Ok(if check.is_ok() {
        Status::Success
    } else {
        Status::CheckFailed
    })
}
