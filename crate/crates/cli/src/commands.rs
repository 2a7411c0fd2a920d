use std::path::Path;

use hrsft::dynamics::{action_entropy_estimate, bowen_entropy_estimate};
use hrsft::matrices::{entropy_exact_report, validate_family, word_count, FamilyFile, SizeGuard};
use hrsft::nclemma::verify_lemma;
use hrsft::numfmt::fmt12;
use hrsft::pressure::{pressure_estimate_with, pressure_oracle_vertex, Potential, SumMethod};
use hrsft::search::{exhaustive_search, random_search, records_to_csv, ExhaustiveConfig, RandomConfig};
use hrsft::words::{count_oracle_check, enumerate_words, EnumBudget};
use hrsft::{Exec, MatrixFamily, Shape};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, EntropyMode, Format, GlobalArgs, Method};
use crate::output::{document, to_csv_text, to_json_text};
use crate::CliError;

/// What a command produced, before formatting.
pub struct Outcome {
    pub json: Value,
    pub csv: Option<String>,
    /// `false` turns a completed run into exit code 1 (e.g. an invalid family).
    pub ok: bool,
}

pub struct Ctx<'a> {
    pub global: &'a GlobalArgs,
    pub exec: Exec,
    pub config: &'a Value,
}

impl Ctx<'_> {
    fn budget(&self) -> EnumBudget {
        EnumBudget { max_ln_words: self.global.max_words.ln() }
    }

    fn guard(&self) -> SizeGuard {
        SizeGuard { max_digits: self.global.max_digits }
    }

    /// Converts a log value from nats to the display base.
    fn log(&self, x: f64) -> f64 {
        x / self.global.log_base.ln()
    }

    fn logs(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.log(x)).collect()
    }

    fn outcome<T: Serialize>(&self, result: &T, csv: Option<String>, ok: bool) -> Outcome {
        Outcome { json: document(result, self.config), csv, ok }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Domain(hrsft::Error::Io(e)))
}

fn load_family(path: &Path) -> Result<MatrixFamily, CliError> {
    Ok(MatrixFamily::from_json(&read(path)?)?)
}

fn shape_arg(flag: &str, s: &str, rank: usize) -> Result<Shape, CliError> {
    Shape::parse(s, rank).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn letter_arg(family: &MatrixFamily, s: &str) -> Result<usize, CliError> {
    if let Some(i) = family.alphabet().index_of(s) {
        return Ok(i);
    }
    match s.parse::<usize>() {
        Ok(i) if i < family.letters() => Ok(i),
        _ => Err(CliError::Usage(format!("--origin: no letter {s:?} in the alphabet"))),
    }
}

pub fn run(cmd: &Command, ctx: &Ctx) -> Result<Outcome, CliError> {
    match cmd {
        Command::Validate { family } => {
            let file = FamilyFile::from_json(&read(&family.family)?)?;
            let report = validate_family(&file);
            let rows: Vec<Vec<String>> = report.violations.iter().map(|v| vec![v.code.clone(), v.witness.to_string()]).collect();
            let csv = to_csv_text(&["code", "witness"], &rows);
            Ok(ctx.outcome(&report, Some(csv), report.is_valid()))
        }
        Command::Words { family, shape, origin, limit } => {
            let fam = load_family(&family.family)?;
            fam.require_valid()?;
            let m = shape_arg("shape", shape, fam.rank())?;
            let origin = origin.as_deref().map(|o| letter_arg(&fam, o)).transpose()?;
            let total = word_count(&fam, &m)?;
            let take = limit.unwrap_or(usize::MAX);
            if limit.is_none() {
                ctx.budget().check(&fam, &m)?;
            }
            let words: Vec<_> = enumerate_words(&fam, &m, origin)?.take(take).collect();
            let letters = fam.alphabet().letters();
            let rows: Vec<Vec<String>> = words
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let ls: Vec<&str> = w.labels().iter().map(|&a| letters[a as usize].as_str()).collect();
                    vec![i.to_string(), w.shape().to_string(), letters[w.origin()].clone(), letters[w.terminal()].clone(), ls.join(" ")]
                })
                .collect();
            let csv = to_csv_text(&["index", "shape", "origin", "terminal", "letters"], &rows);
            let result = json!({
                "shape": m,
                "origin": origin,
                "count_all_origins": total.to_string(),
                "emitted": words.len(),
                "words": words,
            });
            Ok(ctx.outcome(&result, Some(csv), true))
        }
        Command::CountCheck { family, max_shape } => {
            let fam = load_family(&family.family)?;
            let m = shape_arg("max-shape", max_shape, fam.rank())?;
            let rep = count_oracle_check(&fam, &m, ctx.budget(), ctx.exec)?;
            let rows: Vec<Vec<String>> =
                rep.rows.iter().map(|r| vec![r.shape.to_string(), r.enumerated.clone(), r.formula.clone(), r.equal.to_string()]).collect();
            let csv = to_csv_text(&["shape", "enumerated", "formula", "equal"], &rows);
            Ok(ctx.outcome(&rep, Some(csv), rep.all_equal))
        }
        Command::Entropy { family, p, k, n_max, mode } => {
            let fam = load_family(&family.family)?;
            let p = shape_arg("p", p, fam.rank())?;
            let exact = match mode {
                EntropyMode::Bowen => None,
                _ => Some(entropy_exact_report(&fam, &p, ctx.guard())?),
            };
            let bowen = match mode {
                EntropyMode::Exact => None,
                _ => Some(bowen_entropy_estimate(&fam, &p, *k, *n_max)?),
            };
            let mut result = json!({"p": p, "k": k, "n_max": n_max, "unit": ctx.global.log_base});
            let mut csv_rows = Vec::new();
            if let Some(b) = &bowen {
                result["sequence"] = json!(ctx.logs(&b.sequence));
                result["diffs"] = json!(ctx.logs(&b.diffs));
                result["estimate"] = json!(ctx.log(b.estimate));
                for (i, a) in b.sequence.iter().enumerate() {
                    let diff = b.diffs.get(i).map(|&d| fmt12(ctx.log(d))).unwrap_or_default();
                    csv_rows.push(vec![(i + 1).to_string(), fmt12(ctx.log(*a)), diff]);
                }
            }
            if let Some(e) = &exact {
                result["exact"] = json!(ctx.log(e.nats));
                result["exact_method"] = json!(e.method);
            }
            if let (Some(b), Some(e)) = (&bowen, &exact) {
                result["abs_error"] = json!(ctx.log((b.estimate - e.nats).abs()));
            }
            let csv = match (&bowen, &exact) {
                (Some(_), _) => to_csv_text(&["n", "sequence", "diff"], &csv_rows),
                (None, Some(e)) => to_csv_text(&["p", "exact"], &[vec![p.to_string(), fmt12(ctx.log(e.nats))]]),
                (None, None) => unreachable!("mode selects at least one"),
            };
            Ok(ctx.outcome(&result, Some(csv), true))
        }
        Command::ActionEntropy { family, k, n } => {
            let fam = load_family(&family.family)?;
            let mut values = Vec::new();
            for &side in n {
                values.push(json!({"n": side, "value": ctx.log(action_entropy_estimate(&fam, *k, side)?)}));
            }
            let rows: Vec<Vec<String>> =
                values.iter().map(|v| vec![v["n"].to_string(), fmt12(v["value"].as_f64().unwrap_or(f64::NAN))]).collect();
            let csv = to_csv_text(&["n", "value"], &rows);
            let result = json!({"k": k, "unit": ctx.global.log_base, "values": values});
            Ok(ctx.outcome(&result, Some(csv), true))
        }
        Command::Pressure { family, p, k, n_max, potential, g, constant, oracle, method } => {
            let fam = load_family(&family.family)?;
            let p = shape_arg("p", p, fam.rank())?;
            let (f, vertex_g) = match (potential, g, constant) {
                (Some(path), _, _) => {
                    let f = Potential::from_json(&fam, &read(path)?)?;
                    let g = (f.window() == 0).then(|| (0..fam.letters() as u32).map(|a| f.eval_window(&[a])).collect::<Vec<_>>());
                    (f, g)
                }
                (None, Some(g), _) => {
                    if g.len() != fam.letters() {
                        return Err(CliError::Usage(format!("--g: {} values for {} letters", g.len(), fam.letters())));
                    }
                    (Potential::vertex(fam.rank(), g), Some(g.clone()))
                }
                (None, None, Some(c)) => (Potential::constant(fam.rank(), *c), Some(vec![*c; fam.letters()])),
                (None, None, None) => (Potential::constant(fam.rank(), 0.0), Some(vec![0.0; fam.letters()])),
            };
            let method = match method {
                Method::Transfer => SumMethod::Transfer,
                Method::Enumerate => SumMethod::Enumerate,
            };
            let est = pressure_estimate_with(&fam, &f, &p, *k, *n_max, method, ctx.budget(), ctx.exec)?;
            let mut result = json!({
                "p": p, "k": k, "n_max": n_max, "unit": ctx.global.log_base, "method": method,
                "potential": f.to_file(),
                "sequence": ctx.logs(&est.sequence),
                "diffs": ctx.logs(&est.diffs),
                "estimate": ctx.log(est.estimate),
            });
            if *oracle {
                let g =
                    vertex_g.ok_or_else(|| CliError::Usage("--oracle needs a vertex potential (window 0, --g or --constant)".into()))?;
                let o = pressure_oracle_vertex(&fam, &g, &p)?;
                result["oracle"] = json!(ctx.log(o));
                result["abs_error"] = json!(ctx.log((est.estimate - o).abs()));
            }
            let rows: Vec<Vec<String>> = est
                .sequence
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    vec![(i + 1).to_string(), fmt12(ctx.log(*a)), est.diffs.get(i).map(|&d| fmt12(ctx.log(d))).unwrap_or_default()]
                })
                .collect();
            let csv = to_csv_text(&["n", "sequence", "diff"], &rows);
            Ok(ctx.outcome(&result, Some(csv), true))
        }
        Command::LemmaCheck { family, p, max_shape, m, all_reports } => {
            let fam = load_family(&family.family)?;
            let p = shape_arg("p", p, fam.rank())?;
            let max_shape = shape_arg("max-shape", max_shape, fam.rank())?;
            let m = m.as_deref().map(|s| shape_arg("m", s, fam.rank())).transpose()?;
            let mut rep = verify_lemma(&fam, &p, &max_shape, m.as_ref(), ctx.exec)?;
            let rows: Vec<Vec<String>> = rep
                .reports
                .iter()
                .map(|r| {
                    vec![
                        r.u.as_string(),
                        r.w.as_string(),
                        r.m.to_string(),
                        r.nonempty_patterns.to_string(),
                        r.cells.to_string(),
                        r.failures.len().to_string(),
                    ]
                })
                .collect();
            let csv = to_csv_text(&["u", "w", "m", "patterns", "cells", "failures"], &rows);
            if !all_reports {
                rep.reports.retain(|r| !r.all_partial_isometries);
            }
            let ok = rep.all_pass;
            Ok(ctx.outcome(&rep, Some(csv), ok))
        }
        Command::SearchGap { exhaustive, size, rank, seed, density, trials, controls, canonicalize, timings, max_candidates, .. } => {
            let out = if *exhaustive {
                let cfg = ExhaustiveConfig { size: *size, rank: *rank, canonicalize: *canonicalize, max_candidates: *max_candidates };
                exhaustive_search(cfg, ctx.exec)?
            } else {
                let cfg = RandomConfig {
                    size: *size,
                    rank: *rank,
                    density: *density,
                    trials: *trials,
                    seed: *seed,
                    controls: *controls,
                    canonicalize: *canonicalize,
                };
                random_search(cfg, ctx.exec).map_err(|e| match e {
                    hrsft::Error::Parse(msg) => CliError::Usage(msg),
                    other => CliError::Domain(other),
                })?
            };
            let csv = records_to_csv(&out.records)?;
            let mut v = serde_json::to_value(&out).expect("outcome serializes");
            let unit = ctx.global.log_base.ln();
            if let Some(recs) = v["records"].as_array_mut() {
                for r in recs {
                    let obj = r.as_object_mut().expect("record object");
                    if !timings {
                        obj.remove("runtime_ns");
                    }
                    if let Some(gap) = obj.get("gap").and_then(Value::as_f64) {
                        obj.insert("gap".into(), json!(gap / unit));
                    }
                }
            }
            for key in ["min_gap", "max_gap"] {
                if let Some(x) = v["summary"][key].as_f64() {
                    v["summary"][key] = json!(x / unit);
                }
            }
            v["unit"] = json!(ctx.global.log_base);
            Ok(ctx.outcome(&v, Some(csv), true))
        }
    }
}

/// Renders an outcome in the requested format.
pub fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => to_json_text(&outcome.json),
        Format::Csv => outcome.csv.clone().unwrap_or_else(|| to_json_text(&outcome.json)),
    }
}
