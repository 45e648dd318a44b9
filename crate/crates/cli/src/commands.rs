use std::fmt::Write as _;
use std::path::Path;

use mtstab_core::io::{TreeBundle, TreeDump, TreePairFile};
use mtstab_core::perturb::{check_minimal, classify_change, decompose_perturbation, enumerate_minimal_perturbations};
use mtstab_core::stability::{counterexample, run_finite_stability, run_stability_suite, CounterexampleFamily, SuiteConfig};
use mtstab_core::{AbstractMergeTree, Guards, MetricId};
use serde::Serialize;

use crate::matrix::{load_members, MatrixResult};
use crate::{load_field, to_json, CliError, CliResult};

pub fn build_tree(path: &Path) -> CliResult<String> {
    let f = load_field(path)?;
    let t = AbstractMergeTree::from_field(&f)?;
    Ok(to_json(&TreeBundle::new(&t)))
}

pub fn matrix(dir: &Path, metric: MetricId, guards: &Guards) -> CliResult<MatrixResult> {
    let (names, trees) = load_members(dir)?;
    MatrixResult::from_trees(metric, names, &trees, guards)
}

/// Class name on the first line, then the shape evidence.
pub fn classify(a: &Path, b: &Path, json: bool) -> CliResult<String> {
    let (f, g) = (load_field(a)?, load_field(b)?);
    let c = classify_change(&f, &g)?;
    if json {
        return Ok(to_json(&c));
    }
    let s = &c.shape;
    let mut out = format!("{}\n", c.class);
    match c.perturbation {
        Some(p) => {
            let _ = write!(out, "vertex {}: {} -> {}", p.vertex, p.old_value, p.new_value);
            if let Some(y) = p.swap_partner {
                let _ = write!(out, ", passes vertex {y}");
            }
            out.push('\n');
        }
        None => out.push_str("fields are identical\n"),
    }
    let _ = writeln!(out, "tree included: {}", c.tree_included);
    let _ = writeln!(out, "ordered bdt included: {}", c.obdt_included);
    let _ = writeln!(out, "bdt included: {}", c.bdt_included);
    let _ = writeln!(out, "tree nodes: {} -> {}", s.nodes.0, s.nodes.1);
    let _ = writeln!(out, "bdt nodes: {} -> {}", s.bdt_nodes.0, s.bdt_nodes.1);
    let _ = writeln!(out, "same structure: {}, changed lengths: {}", s.same_structure, s.changed_lengths);
    let _ = writeln!(out, "pair are leaves: {}, adjacent saddles: {}", s.pair_leaves, s.pair_adjacent_saddles);
    let _ = writeln!(out, "shape consistent with class: {}", s.consistent);
    Ok(out)
}

pub enum PerturbMode<'a> {
    /// All minimal perturbations of one vertex.
    List(usize),
    /// Move one vertex; the result must be a minimal perturbation.
    Apply(usize, f64),
    /// Steps from the field to a target field.
    Decompose(&'a Path),
}

pub fn perturb(path: &Path, mode: PerturbMode<'_>) -> CliResult<String> {
    let f = load_field(path)?;
    match mode {
        PerturbMode::List(v) => {
            if v >= f.len() {
                return Err(mtstab_core::Error::UnknownVertex(v).into());
            }
            Ok(to_json(&enumerate_minimal_perturbations(&f, v)))
        }
        PerturbMode::Apply(v, to) => {
            let g = f.apply_value_change(v, to)?;
            if check_minimal(&f, &g)?.is_none() && f != g {
                return Err(CliError::Validation("not a minimal perturbation".into()));
            }
            Ok(mtstab_core::io::field_to_json(&g))
        }
        PerturbMode::Decompose(target) => {
            let g = load_field(target)?;
            Ok(to_json(&decompose_perturbation(&f, &g)?))
        }
    }
}

#[derive(Serialize)]
struct StabilityOutput {
    suite: mtstab_core::stability::SuiteReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    finite: Option<mtstab_core::stability::FiniteReport>,
}

/// JSON report and a human summary.
pub fn stability_run(cfg: &SuiteConfig, eps: Option<f64>) -> CliResult<(String, String)> {
    let suite = run_stability_suite(cfg)?;
    let finite = eps.map(|e| run_finite_stability(cfg, e)).transpose()?;
    let mut summary = format!("{}\n", suite.note);
    let _ = writeln!(summary, "classes: {:?}", suite.class_counts);
    summary.push_str(&suite.summary_table());
    let _ = writeln!(summary, "claimed-cell violations: {}", suite.failure_count);
    if let Some(r) = &finite {
        let _ = writeln!(summary, "finite perturbations, eps {}:", r.eps);
        for s in &r.stats {
            let _ = writeln!(
                summary,
                "{:<6}{:>5}/{:<5} guard skipped {}",
                s.metric.to_string(),
                s.passed,
                s.applicable,
                s.guard_skipped
            );
        }
    }
    Ok((to_json(&StabilityOutput { suite, finite }), summary))
}

pub fn counterexample_pair(family: CounterexampleFamily, x: f64, eps: f64) -> CliResult<String> {
    let (t1, t2) = counterexample(family, x, eps)?;
    Ok(to_json(&TreePairFile {
        t1: TreeDump::from_tree(&t1),
        t2: TreeDump::from_tree(&t2),
    }))
}
