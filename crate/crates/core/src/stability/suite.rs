use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{bound_report, claimed, Witness, CLAIM_NOTE};
use crate::distances::{distance, MetricId};
use crate::editcore::{check_deform_sequence, deform_brute_force, deform_witness_to_sequence, Guards};
use crate::error::{Error, Result};
use crate::field::{build_grid_domain, ScalarField};
use crate::io::FieldFile;
use crate::mergetree::{build_bdt, AbstractMergeTree};
use crate::perturb::{
    classify_change, decompose_perturbation, enumerate_minimal_perturbations, ChangeClass,
};
use crate::TAU;

const MAX_DRAWS: usize = 10_000;
/// Failures kept with full witnesses; the rest are only counted.
const MAX_WITNESSES: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    /// Side length of the square triangulated grid.
    pub grid: usize,
    pub metrics: Vec<MetricId>,
    /// Random fields are redrawn until their tree has at most this many
    /// edges.
    pub max_edges: usize,
    pub guards: Guards,
}

impl SuiteConfig {
    pub fn new(seed: u64, trials: usize, grid: usize, metrics: Vec<MetricId>) -> Self {
        Self {
            seed,
            trials,
            grid,
            metrics,
            max_edges: 8,
            guards: Guards {
                branch_edges: 10,
                ..Guards::default()
            },
        }
    }
}

/// Uniform random values on a `grid x grid` triangulated grid whose merge
/// tree has at most `max_edges` edges.
pub fn random_grid_field(rng: &mut impl Rng, grid: usize, max_edges: usize) -> Result<ScalarField> {
    let domain = std::sync::Arc::new(build_grid_domain(grid, grid)?);
    let n = domain.vertex_count();
    for _ in 0..MAX_DRAWS {
        let values: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let Ok(f) = ScalarField::new(domain.clone(), values) else {
            continue;
        };
        match AbstractMergeTree::from_field(&f) {
            Ok(t) if t.edge_count() <= max_edges => return Ok(f),
            _ => continue,
        }
    }
    Err(Error::Parameter(format!(
        "no random {grid}x{grid} field with at most {max_edges} tree edges found"
    )))
}

/// Random abstract merge tree with at most `max_nodes` nodes: the root has
/// one child, every other inner node at least two, and edge lengths are
/// uniform in `[0.1, 3)`. Vertex ids are node ids.
pub fn random_merge_tree(rng: &mut impl Rng, max_nodes: usize) -> AbstractMergeTree {
    assert!(max_nodes >= 2, "a merge tree has at least two nodes");
    loop {
        let n = rng.random_range(2..=max_nodes);
        let mut parent = vec![0usize; n];
        for (i, p) in parent.iter_mut().enumerate().skip(2) {
            *p = rng.random_range(1..i);
        }
        let mut kids = vec![0usize; n];
        for &p in &parent[1..] {
            kids[p] += 1;
        }
        if (1..n).any(|v| kids[v] == 1) {
            continue;
        }
        let mut value = vec![0.0; n];
        for i in 1..n {
            value[i] = value[parent[i]] + rng.random_range(0.1..3.0);
        }
        let nodes: Vec<(usize, f64)> = value.iter().copied().enumerate().collect();
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i, parent[i])).collect();
        if let Ok(t) = AbstractMergeTree::from_edges(&nodes, &edges) {
            return t;
        }
    }
}

fn sub_seeds(seed: u64, trials: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| rng.random()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub vertex: usize,
    pub swap_partner: Option<usize>,
    pub class: ChangeClass,
    pub eps: f64,
    pub deg: usize,
    /// `None` when the metric hit a size guard.
    pub distances: Vec<(MetricId, Option<f64>)>,
    pub shape_consistent: bool,
    /// Non-trivial operations of the reconstructed deformation sequence and
    /// the largest single cost, when `e` is among the metrics.
    pub witness_ops: Option<(usize, f64)>,
}

impl TrialRecord {
    /// At most `deg` operations, each costing at most `eps`.
    pub fn witness_ok(&self) -> Option<bool> {
        self.witness_ops
            .map(|(k, c)| k <= self.deg && c <= self.eps + TAU)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRecord {
    pub trial: usize,
    pub metric: MetricId,
    pub class: ChangeClass,
    pub distance: f64,
    pub bound: f64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStats {
    pub metric: MetricId,
    pub class: ChangeClass,
    pub claimed: bool,
    pub trials: usize,
    pub within_bound: usize,
    pub guard_skipped: usize,
    /// Largest `distance / bound` seen (`distance` when the bound is zero).
    pub worst_ratio: f64,
}

impl CellStats {
    pub fn all_pass(&self) -> bool {
        self.within_bound == self.trials
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub note: String,
    pub config: SuiteConfig,
    pub class_counts: BTreeMap<ChangeClass, usize>,
    pub cells: Vec<CellStats>,
    pub shape_failures: Vec<usize>,
    pub witness_sequence_failures: Vec<usize>,
    pub failure_count: usize,
    pub failures: Vec<FailureRecord>,
    pub records: Vec<TrialRecord>,
}

impl SuiteReport {
    /// Every claimed cell of the given metrics stayed within its bound.
    pub fn claimed_pass(&self, metrics: &[MetricId]) -> bool {
        self.cells
            .iter()
            .filter(|c| c.claimed && metrics.contains(&c.metric))
            .all(CellStats::all_pass)
    }

    pub fn claimed_pass_on(&self, metric: MetricId, classes: &[ChangeClass]) -> bool {
        self.cells
            .iter()
            .filter(|c| c.metric == metric && classes.contains(&c.class))
            .all(CellStats::all_pass)
    }

    pub fn cell(&self, metric: MetricId, class: ChangeClass) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.metric == metric && c.class == class)
    }

    /// Metric by class table; claimed cells are starred.
    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:<6}", "metric");
        for c in ChangeClass::ALL {
            let _ = write!(s, "{:>12}", c.short());
        }
        s.push('\n');
        for &m in &self.config.metrics {
            let _ = write!(s, "{:<6}", m.to_string());
            for c in ChangeClass::ALL {
                let cell = self.cell(m, c).expect("every cell is listed");
                let txt = if cell.trials == 0 {
                    "-".to_string()
                } else {
                    format!("{}{}/{}", if cell.claimed { "*" } else { "" }, cell.within_bound, cell.trials)
                };
                let _ = write!(s, "{txt:>12}");
            }
            s.push('\n');
        }
        s
    }
}

struct TrialOutcome {
    record: TrialRecord,
    reports: Vec<super::BoundReport>,
}

fn stability_trial(cfg: &SuiteConfig, trial: usize, seed: u64) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (f, f2, p, t1, t2) = loop {
        let f = random_grid_field(&mut rng, cfg.grid, cfg.max_edges)?;
        // half of the moves start at a critical vertex, where the tree changes
        let t1 = AbstractMergeTree::from_field(&f)?;
        let v = if rng.random_bool(0.5) {
            t1.vertex(rng.random_range(0..t1.len()))
        } else {
            rng.random_range(0..f.len())
        };
        let cands = enumerate_minimal_perturbations(&f, v);
        let p = cands[rng.random_range(0..cands.len())];
        let Ok(f2) = p.apply(&f) else { continue };
        let Ok(t2) = AbstractMergeTree::from_field(&f2) else {
            continue;
        };
        break (f, f2, p, t1, t2);
    };
    let c = classify_change(&f, &f2)?;
    let eps = p.extent();
    let mut reports = Vec::new();
    let mut distances = Vec::new();
    for &m in &cfg.metrics {
        match bound_report(m, c.class, eps, &t1, &t2, Some((&f, &f2)), &cfg.guards) {
            Ok(r) => {
                distances.push((m, Some(r.distance)));
                reports.push(r);
            }
            Err(e) if e.is_guard() => distances.push((m, None)),
            Err(e) => return Err(e),
        }
    }
    let witness_ops = if cfg.metrics.contains(&MetricId::E) {
        match deform_brute_force(&t1, &t2, false, &cfg.guards) {
            Ok(w) => {
                let seq = deform_witness_to_sequence(&t1, &t2, &w)?;
                check_deform_sequence(&t1, &seq)?;
                let costs: Vec<f64> = seq.ops.iter().map(|o| o.cost()).filter(|&c| c > TAU).collect();
                Some((costs.len(), costs.iter().copied().fold(0.0, f64::max)))
            }
            Err(e) if e.is_guard() => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(TrialOutcome {
        record: TrialRecord {
            trial,
            vertex: p.vertex,
            swap_partner: p.swap_partner,
            class: c.class,
            eps,
            deg: t1.deg(),
            distances,
            shape_consistent: c.shape.consistent,
            witness_ops,
        },
        reports,
    })
}

/// Random minimal perturbations of random grid fields, each checked against
/// `deg(T_f) * eps` for every metric.
pub fn run_stability_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let seeds = sub_seeds(cfg.seed, cfg.trials);
    let outcomes: Vec<TrialOutcome> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| stability_trial(cfg, i, s))
        .collect::<Result<_>>()?;

    let mut cells: Vec<CellStats> = cfg
        .metrics
        .iter()
        .flat_map(|&metric| {
            ChangeClass::ALL.into_iter().map(move |class| CellStats {
                metric,
                class,
                claimed: claimed(metric, class),
                trials: 0,
                within_bound: 0,
                guard_skipped: 0,
                worst_ratio: 0.0,
            })
        })
        .collect();
    let mut class_counts = BTreeMap::new();
    let mut failures = Vec::new();
    let mut failure_count = 0;
    let mut shape_failures = Vec::new();
    let mut witness_sequence_failures = Vec::new();
    for o in &outcomes {
        let rec = &o.record;
        *class_counts.entry(rec.class).or_insert(0) += 1;
        if !rec.shape_consistent {
            shape_failures.push(rec.trial);
        }
        if rec.witness_ok() == Some(false) {
            witness_sequence_failures.push(rec.trial);
        }
        for &(m, d) in &rec.distances {
            let cell = cells
                .iter_mut()
                .find(|c| c.metric == m && c.class == rec.class)
                .unwrap();
            if d.is_none() {
                cell.guard_skipped += 1;
            }
        }
        for r in &o.reports {
            let cell = cells
                .iter_mut()
                .find(|c| c.metric == r.metric && c.class == r.class)
                .unwrap();
            cell.trials += 1;
            cell.within_bound += usize::from(r.pass);
            let ratio = if r.bound > 0.0 { r.distance / r.bound } else { r.distance };
            cell.worst_ratio = cell.worst_ratio.max(ratio);
            if r.claimed && !r.pass {
                failure_count += 1;
                if failures.len() < MAX_WITNESSES {
                    failures.push(FailureRecord {
                        trial: rec.trial,
                        metric: r.metric,
                        class: r.class,
                        distance: r.distance,
                        bound: r.bound,
                        witness: r.witness.clone(),
                    });
                }
            }
        }
    }
    Ok(SuiteReport {
        note: CLAIM_NOTE.to_string(),
        config: cfg.clone(),
        class_counts,
        cells,
        shape_failures,
        witness_sequence_failures,
        failure_count,
        failures,
        records: outcomes.into_iter().map(|o| o.record).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteCheck {
    pub metric: MetricId,
    /// `None` when a size guard was hit.
    pub distance: Option<f64>,
    pub bound: f64,
    /// The step classes satisfy the metric's precondition.
    pub applies: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteTrial {
    pub trial: usize,
    pub steps: usize,
    pub classes: Vec<ChangeClass>,
    pub nodes: (usize, usize),
    pub bdt_nodes: (usize, usize),
    pub checks: Vec<FiniteCheck>,
    pub f: FieldFile,
    pub f2: FieldFile,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteStats {
    pub metric: MetricId,
    pub applicable: usize,
    pub passed: usize,
    pub guard_skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteReport {
    pub config: SuiteConfig,
    pub eps: f64,
    pub stats: Vec<FiniteStats>,
    pub trials: Vec<FiniteTrial>,
}

impl FiniteReport {
    pub fn stats(&self, metric: MetricId) -> Option<&FiniteStats> {
        self.stats.iter().find(|s| s.metric == metric)
    }

    pub fn all_pass(&self) -> bool {
        self.stats.iter().all(|s| s.passed == s.applicable)
    }
}

/// Whether the finite bound for `metric` applies to a sequence made of
/// steps of the given classes. `s` and `b` have no finite bound.
fn finite_applies(metric: MetricId, classes: &[ChangeClass]) -> bool {
    use ChangeClass::*;
    let only = |ok: &[ChangeClass]| classes.iter().all(|c| ok.contains(c));
    match metric {
        MetricId::E => true,
        MetricId::P => !classes.iter().any(ChangeClass::is_horizontal),
        MetricId::G => !classes.contains(&EdgeSplit),
        MetricId::L => only(&[SimpleChange, VerticalSwap]),
        MetricId::W | MetricId::X => only(&[SimpleChange, EdgeSplit]),
        MetricId::S | MetricId::B => false,
    }
}

fn jittered(rng: &mut ChaCha8Rng, f: &ScalarField, eps: f64) -> Option<ScalarField> {
    let values: Vec<f64> = f
        .values()
        .iter()
        .map(|&v| if eps > 0.0 { v + rng.random_range(-eps..=eps) } else { v })
        .collect();
    f.with_values(values).ok()
}

fn finite_trial(cfg: &SuiteConfig, eps: f64, trial: usize, seed: u64) -> Result<FiniteTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'draw: loop {
        let f = random_grid_field(&mut rng, cfg.grid, cfg.max_edges)?;
        for _ in 0..100 {
            // ties and intermediate collisions are redrawn
            let Some(f2) = jittered(&mut rng, &f, eps) else { continue };
            let Ok(t2) = AbstractMergeTree::from_field(&f2) else {
                continue;
            };
            let Ok(seq) = decompose_perturbation(&f, &f2) else {
                continue;
            };
            let mut classes = Vec::new();
            for w in seq.fields.windows(2) {
                match classify_change(&w[0], &w[1]) {
                    Ok(c) => classes.push(c.class),
                    Err(_) => continue 'draw,
                }
            }
            classes.sort();
            classes.dedup();
            let t1 = AbstractMergeTree::from_field(&f)?;
            let (v1, v2) = (t1.len(), t2.len());
            let (b1, b2) = (build_bdt(&t1).len(), build_bdt(&t2).len());
            let mut checks = Vec::new();
            for &m in &cfg.metrics {
                let size = match m {
                    MetricId::W | MetricId::X => b1 + b2,
                    _ => v1 + v2,
                };
                let bound = size as f64 * 2.0 * eps;
                let d = match distance(m, &t1, &t2, &cfg.guards) {
                    Ok(d) => Some(d),
                    Err(e) if e.is_guard() => None,
                    Err(e) => return Err(e),
                };
                checks.push(FiniteCheck {
                    metric: m,
                    distance: d,
                    bound,
                    applies: finite_applies(m, &classes),
                    pass: d.is_some_and(|d| d <= bound + TAU),
                });
            }
            return Ok(FiniteTrial {
                trial,
                steps: seq.len(),
                classes,
                nodes: (v1, v2),
                bdt_nodes: (b1, b2),
                checks,
                f: FieldFile::from_field(&f),
                f2: FieldFile::from_field(&f2),
            });
        }
    }
}

/// Random fields against random `eps`-jittered copies. Each metric's size
/// bound is checked when the classes of the decomposed steps allow it.
pub fn run_finite_stability(cfg: &SuiteConfig, eps: f64) -> Result<FiniteReport> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Parameter(format!("eps must be a finite non-negative number, got {eps}")));
    }
    let seeds = sub_seeds(cfg.seed, cfg.trials);
    let trials: Vec<FiniteTrial> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| finite_trial(cfg, eps, i, s))
        .collect::<Result<_>>()?;
    let stats = cfg
        .metrics
        .iter()
        .map(|&metric| {
            let checks = trials
                .iter()
                .flat_map(|t| t.checks.iter().filter(|c| c.metric == metric));
            let mut s = FiniteStats {
                metric,
                applicable: 0,
                passed: 0,
                guard_skipped: 0,
            };
            for c in checks {
                if c.distance.is_none() {
                    s.guard_skipped += 1;
                } else if c.applies {
                    s.applicable += 1;
                    s.passed += usize::from(c.pass);
                }
            }
            s
        })
        .collect();
    Ok(FiniteReport {
        config: cfg.clone(),
        eps,
        stats,
        trials,
    })
}
