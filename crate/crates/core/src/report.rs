//! Running a grid against the oracle and tabulating the outcome.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::agw;
use crate::error::{Error, Result};
use crate::families::{instantiate_grid, FamilyId, GridEntry, GridOptions, GridSpec, InstanceSpec, SCHEMA_VERSION};
use crate::oracle::check_iff;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Checked {
        predicted: bool,
        observed: bool,
        agree: bool,
        /// Present for permutations.
        cycle_type: Option<String>,
        /// First colliding pair in enumeration order, for non-permutations.
        collision: Option<(String, String)>,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub family: FamilyId,
    pub field: String,
    pub params: Vec<(String, String)>,
    pub outcome: Outcome,
    #[serde(skip)]
    pub spec: Option<InstanceSpec>,
}

impl Row {
    pub fn label(&self) -> String {
        crate::families::label(self.family, &self.field, &self.params)
    }

    pub fn agrees(&self) -> Option<bool> {
        match self.outcome {
            Outcome::Checked { agree, .. } => Some(agree),
            Outcome::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    pub label: String,
    pub predicted: bool,
    pub observed: bool,
    /// Feed back to `verify` to reproduce.
    pub spec: InstanceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skip {
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub family: FamilyId,
    pub fields: Vec<String>,
    pub grid_size: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
    pub skipped: Vec<Skip>,
    pub wall_time_secs: f64,
    #[serde(skip)]
    pub rows: Vec<Row>,
}

impl RunReport {
    pub fn all_agree(&self) -> bool {
        self.disagreements.is_empty()
    }

    /// Agreement rate over checked (non-skipped) instances.
    pub fn agreement_rate(&self) -> f64 {
        let checked = self.agreements + self.disagreements.len();
        if checked == 0 {
            1.0
        } else {
            self.agreements as f64 / checked as f64
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn check_entry(entry: &GridEntry, cap: u64) -> Row {
    match entry {
        GridEntry::Skipped { family, field, params, reason } => Row {
            family: *family,
            field: field.clone(),
            params: params.clone(),
            outcome: Outcome::Skipped { reason: reason.clone() },
            spec: None,
        },
        GridEntry::Instance(inst) => {
            let ctx = &inst.ctx;
            let outcome = match check_iff(inst, cap) {
                Ok(a) => Outcome::Checked {
                    predicted: a.predicted,
                    observed: a.observed,
                    agree: a.agree,
                    cycle_type: a.verdict.cycle_type.map(|c| c.to_string()),
                    collision: a.verdict.collision.map(|(x, y)| (ctx.format_elem(x), ctx.format_elem(y))),
                },
                Err(e) => Outcome::Skipped { reason: e.to_string() },
            };
            Row {
                family: inst.family,
                field: ctx.spec().to_string(),
                params: inst.param_texts(),
                outcome,
                spec: Some(inst.spec()),
            }
        }
    }
}

/// Checks every instance of the grid against the oracle, in parallel on the
/// current rayon pool. Rows keep grid order.
pub fn run_grid(spec: &GridSpec, opts: &GridOptions, cap: u64) -> Result<RunReport> {
    let start = Instant::now();
    let entries = instantiate_grid(spec, opts)?;
    let rows: Vec<Row> = entries.par_iter().map(|e| check_entry(e, cap)).collect();
    let mut agreements = 0;
    let mut disagreements = Vec::new();
    let mut skipped = Vec::new();
    for row in &rows {
        match &row.outcome {
            Outcome::Checked { agree: true, .. } => agreements += 1,
            Outcome::Checked { predicted, observed, .. } => disagreements.push(Disagreement {
                label: row.label(),
                predicted: *predicted,
                observed: *observed,
                spec: row.spec.clone().expect("checked rows carry a spec"),
            }),
            Outcome::Skipped { reason } => skipped.push(Skip { label: row.label(), reason: reason.clone() }),
        }
    }
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        family: spec.family,
        fields: spec.fields.clone(),
        grid_size: rows.len(),
        agreements,
        disagreements,
        skipped,
        wall_time_secs: start.elapsed().as_secs_f64(),
        rows,
    })
}

/// `family, field, <params in schema order>, predicted, observed, agree, cycle_type, note`.
pub fn csv_header(family: FamilyId) -> Vec<String> {
    let mut h: Vec<String> = vec!["family".into(), "field".into()];
    h.extend(family.schema().iter().map(|(n, _)| n.to_string()));
    h.extend(["predicted", "observed", "agree", "cycle_type", "note"].map(String::from));
    h
}

pub fn write_csv<W: Write>(family: FamilyId, rows: &[Row], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(family)).map_err(io)?;
    for row in rows {
        let mut rec: Vec<String> = vec![row.family.to_string(), row.field.clone()];
        for (name, _) in family.schema() {
            rec.push(row.params.iter().find(|(k, _)| k == name).map(|(_, v)| v.clone()).unwrap_or_default());
        }
        match &row.outcome {
            Outcome::Checked { predicted, observed, agree, cycle_type, collision } => {
                rec.extend([predicted.to_string(), observed.to_string(), agree.to_string()]);
                rec.push(cycle_type.clone().unwrap_or_default());
                rec.push(collision.as_ref().map(|(x, y)| format!("collision {x} {y}")).unwrap_or_default());
            }
            Outcome::Skipped { reason } => {
                rec.extend([String::new(), String::new(), String::new(), String::new()]);
                rec.push(format!("skipped: {reason}"));
            }
        }
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn csv_string(family: FamilyId, rows: &[Row]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(family, rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Outcome of the diagram checks on one grid entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgwRow {
    pub label: String,
    pub diagram: Option<&'static str>,
    /// `None` when the entry was skipped or the diagram is unusable.
    pub lemma_holds: Option<bool>,
    pub main_theorem_holds: Option<bool>,
    pub matches_prediction: Option<bool>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AgwRunReport {
    pub schema_version: u32,
    pub family: FamilyId,
    pub checked: usize,
    pub counterexamples: Vec<String>,
    pub inapplicable: Vec<AgwRow>,
    pub skipped: usize,
    pub wall_time_secs: f64,
    #[serde(skip)]
    pub rows: Vec<AgwRow>,
}

/// Runs the diagram lemma (and main theorem when the family splits) on
/// every instance. A counterexample is an instance whose diagram is valid
/// yet the lemma's equivalence fails; an invalid diagram is reported as
/// inapplicable.
pub fn run_agw(spec: &GridSpec, opts: &GridOptions) -> Result<AgwRunReport> {
    let start = Instant::now();
    let entries = instantiate_grid(spec, opts)?;
    let rows: Vec<AgwRow> = entries
        .par_iter()
        .map(|e| {
            let label = e.label();
            let none = |note: String| AgwRow {
                label: label.clone(),
                diagram: None,
                lemma_holds: None,
                main_theorem_holds: None,
                matches_prediction: None,
                note,
            };
            match e {
                GridEntry::Skipped { reason, .. } => none(format!("skipped: {reason}")),
                GridEntry::Instance(inst) => match agw::check_instance(inst) {
                    Ok(r) => AgwRow {
                        label,
                        diagram: Some(r.diagram),
                        lemma_holds: Some(r.lemma.equivalence_holds),
                        main_theorem_holds: r.main_theorem.as_ref().map(|m| m.equivalent),
                        matches_prediction: Some(r.matches_prediction),
                        note: format!("|S| = {}", r.s_size),
                    },
                    Err(e) => AgwRow { diagram: Some(inst.diagram.name), ..none(e.to_string()) },
                },
            }
        })
        .collect();
    let mut checked = 0;
    let mut skipped = 0;
    let mut counterexamples = Vec::new();
    let mut inapplicable = Vec::new();
    for r in &rows {
        match (r.diagram, r.lemma_holds) {
            (None, _) => skipped += 1,
            (Some(_), None) => inapplicable.push(r.clone()),
            (Some(_), Some(lemma)) => {
                checked += 1;
                if !lemma || r.main_theorem_holds == Some(false) {
                    counterexamples.push(r.label.clone());
                }
            }
        }
    }
    Ok(AgwRunReport {
        schema_version: SCHEMA_VERSION,
        family: spec.family,
        checked,
        counterexamples,
        inapplicable,
        skipped,
        wall_time_secs: start.elapsed().as_secs_f64(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::default_grid;

    #[test]
    fn counts_add_up_to_grid_size() {
        for f in [FamilyId::AdditiveG, FamilyId::EvenT, FamilyId::Linearized] {
            let r = run_grid(&default_grid(f), &GridOptions::default(), crate::oracle::DEFAULT_CAP).unwrap();
            assert_eq!(r.agreements + r.disagreements.len() + r.skipped.len(), r.grid_size);
            assert_eq!(r.rows.len(), r.grid_size);
            assert!(r.all_agree());
        }
    }

    #[test]
    fn csv_columns_follow_the_schema() {
        assert_eq!(
            csv_header(FamilyId::N4k),
            ["family", "field", "variant", "a", "delta", "predicted", "observed", "agree", "cycle_type", "note"]
        );
        let mut g = default_grid(FamilyId::EvenT);
        g.params.insert("t".into(), serde_json::json!([3]));
        let r = run_grid(&g, &GridOptions::default(), crate::oracle::DEFAULT_CAP).unwrap();
        let text = csv_string(FamilyId::EvenT, &r.rows).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert!(row.starts_with("even_t,3^1:2,3,"), "{row}");
        assert!(row.ends_with(",,,,,skipped: hypothesis unsatisfied: t even"), "{row}");
    }

    #[test]
    fn too_small_a_cap_skips() {
        let r = run_grid(&default_grid(FamilyId::Linearized), &GridOptions::default(), 8).unwrap();
        assert_eq!(r.skipped.len(), r.grid_size);
    }
}
