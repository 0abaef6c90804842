//! Loss-constrained search for nonlinear phase shifts.
//!
//! Each restart draws a random pulse sequence from its own ChaCha8 substream
//! (`seed`, stream = restart index), then runs Nelder-Mead on
//! `-|phi_NL| + mu * max(0, loss - budget)^2` with `mu` stepped by 10x from
//! 1e2 to 1e8. Every objective evaluation is screened for feasibility and the
//! best feasible point seen is kept. Restarts may run in parallel; results are
//! reduced in restart-index order, so output does not depend on thread count.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{PulseSegment, PulseSequence, DEFAULT_COUPLING_BOUND};
use crate::error::{Error, Result};
use crate::observables::{ProbeSet, Variant};
use crate::sector::DickeModel;
use crate::simplex::NelderMead;

/// Name of the generator recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9), stream = substream index";

pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;
pub const DEFAULT_NOGO_PHASE_TOL: f64 = 1e-5;

/// Generator for substream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizationTask {
    pub model: DickeModel,
    pub variant: Variant,
    #[serde(default = "defaults::n_segments")]
    pub n_segments: usize,
    #[serde(default = "defaults::coupling_bound")]
    pub coupling_bound: f64,
    #[serde(default = "defaults::duration_bound")]
    pub duration_bound: f64,
    pub loss_budget: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::restarts")]
    pub restarts: usize,
    /// Slack allowed on top of `loss_budget` when judging feasibility.
    #[serde(default = "defaults::feasibility_tol")]
    pub feasibility_tol: f64,
    /// Objective evaluations per penalty stage.
    #[serde(default = "defaults::evals_per_stage")]
    pub evals_per_stage: usize,
    /// Also search the drive phases `phase1`, `phase2` of every segment.
    #[serde(default)]
    pub drive_phases: bool,
}

mod defaults {
    pub fn n_segments() -> usize {
        8
    }
    pub fn coupling_bound() -> f64 {
        super::DEFAULT_COUPLING_BOUND
    }
    pub fn duration_bound() -> f64 {
        2.0 * std::f64::consts::PI
    }
    pub fn restarts() -> usize {
        64
    }
    pub fn feasibility_tol() -> f64 {
        super::DEFAULT_FEASIBILITY_TOL
    }
    pub fn evals_per_stage() -> usize {
        600
    }
}

impl OptimizationTask {
    pub fn new(model: DickeModel, variant: Variant, loss_budget: f64) -> Self {
        OptimizationTask {
            model,
            variant,
            n_segments: defaults::n_segments(),
            coupling_bound: defaults::coupling_bound(),
            duration_bound: defaults::duration_bound(),
            loss_budget,
            seed: 0,
            restarts: defaults::restarts(),
            feasibility_tol: defaults::feasibility_tol(),
            evals_per_stage: defaults::evals_per_stage(),
            drive_phases: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidTask(msg.to_string()));
        if self.n_segments == 0 {
            return bad("n_segments must be positive");
        }
        if self.restarts == 0 {
            return bad("restarts must be positive");
        }
        if !(self.loss_budget >= 0.0 && self.loss_budget.is_finite()) {
            return bad("loss_budget must be finite and non-negative");
        }
        if !(self.coupling_bound > 0.0 && self.coupling_bound.is_finite()) {
            return bad("coupling_bound must be positive");
        }
        if !(self.duration_bound > 0.0 && self.duration_bound.is_finite()) {
            return bad("duration_bound must be positive");
        }
        if self.feasibility_tol.is_nan() || self.feasibility_tol < 0.0 {
            return bad("feasibility_tol must be non-negative");
        }
        if self.evals_per_stage == 0 {
            return bad("evals_per_stage must be positive");
        }
        Ok(())
    }

    /// Every segment carries `g1, g2, t`, plus `phase1, phase2` when drive
    /// phases are searched. The one-mode variant still drives mode 2: with
    /// mode 1 alone all segments commute.
    fn params_per_segment(&self) -> usize {
        if self.drive_phases {
            5
        } else {
            3
        }
    }

    /// Smooth bounded map from unconstrained parameters:
    /// `g = B sin(x)`, `t = T sin(y)^2`; phases are used as given.
    fn decode(&self, x: &[f64]) -> PulseSequence {
        let b = self.coupling_bound;
        let tmax = self.duration_bound;
        let segments = x
            .chunks_exact(self.params_per_segment())
            .map(|c| {
                let seg = PulseSegment::new(b * c[0].sin(), b * c[1].sin(), tmax * c[2].sin().powi(2));
                if self.drive_phases {
                    seg.with_phases(c[3], c[4])
                } else {
                    seg
                }
            })
            .collect();
        PulseSequence::new(segments)
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let per = self.params_per_segment();
        (0..self.n_segments * per)
            .map(|i| match i % per {
                0 | 1 => rng.random_range(-PI / 2.0..PI / 2.0),
                2 => rng.random_range(0.0..PI / 2.0),
                _ => rng.random_range(-PI..PI),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub budget: f64,
    pub best_phi_nl_abs: f64,
    pub achieved_loss: f64,
    pub witness_sequence: PulseSequence,
    pub seed: u64,
}

#[derive(Debug, Clone)]
struct Candidate {
    phi_abs: f64,
    loss: f64,
    seq: PulseSequence,
}

#[derive(Debug, Clone)]
struct RestartOutcome {
    feasible: Option<Candidate>,
    least_excess: (f64, PulseSequence),
}

struct Tracker<'a> {
    task: &'a OptimizationTask,
    probes: &'a ProbeSet,
    best: Option<Candidate>,
    least_excess: (f64, PulseSequence),
}

impl<'a> Tracker<'a> {
    /// Returns `(|phi|, composite loss excess, summed-loss excess)` and records the point.
    fn evaluate(&mut self, x: &[f64]) -> (f64, f64, f64) {
        let seq = self.task.decode(x);
        let (losses, phi) = self.probes.losses_and_phase(&seq);
        let loss = losses.iter().copied().fold(0.0, f64::max);
        let total: f64 = losses.iter().sum();
        let phi_abs = phi.map_or(0.0, f64::abs);
        let budget = self.task.loss_budget;
        let excess = (loss - budget).max(0.0);
        if loss <= budget + self.task.feasibility_tol {
            let better = self.best.as_ref().is_none_or(|b| phi_abs > b.phi_abs);
            if better {
                self.best = Some(Candidate { phi_abs, loss, seq });
            }
        } else if excess < self.least_excess.0 {
            self.least_excess = (excess, seq);
        }
        (phi_abs, excess, (total - budget).max(0.0))
    }
}

/// Quadratic-penalty weights, escalated geometrically.
pub const PENALTY_STAGES: [f64; 7] = [1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8];

/// Maximizes `gain` subject to `excess = 0` by Nelder-Mead on
/// `-gain + mu * excess^2` for each `mu` in [`PENALTY_STAGES`], warm-starting
/// each stage from the previous optimum. `eval` returns `(gain, excess)`.
pub fn penalty_descent<F>(nm: &NelderMead, x0: Vec<f64>, mut eval: F) -> Vec<f64>
where
    F: FnMut(&[f64]) -> (f64, f64),
{
    let mut x = x0;
    let mut step = 0.3;
    for mu in PENALTY_STAGES {
        let result = nm.minimize(
            |p| {
                let (gain, excess) = eval(p);
                -gain + mu * excess * excess
            },
            &x,
            step,
        );
        x = result.x;
        step = (step * 0.5).max(0.02);
    }
    x
}

fn run_restart(task: &OptimizationTask, probes: &ProbeSet, index: usize) -> RestartOutcome {
    let mut rng = substream(task.seed, index as u64);
    let mut x = task.random_start(&mut rng);
    let mut tracker = Tracker {
        task,
        probes,
        best: None,
        least_excess: (f64::INFINITY, PulseSequence::default()),
    };
    let nm = NelderMead {
        max_evals: task.evals_per_stage,
        f_tol: 1e-15,
        x_tol: 1e-12,
        f_target: f64::NEG_INFINITY,
    };
    x = penalty_descent(&nm, x, |p| {
        let (phi_abs, excess, _) = tracker.evaluate(p);
        (phi_abs, excess)
    });
    let final_excess = tracker.evaluate(&x).1;
    if final_excess > task.feasibility_tol {
        // Restoration from where the penalty stages ended. The summed probe
        // loss bounds the composite (max) loss and is smooth at zero.
        let restore = NelderMead {
            max_evals: task.evals_per_stage,
            f_tol: 0.0,
            x_tol: 1e-14,
            f_target: 0.0,
        };
        let mut step = 1e-2;
        for _ in 0..4 {
            let result = restore.minimize(|p| tracker.evaluate(p).2, &x, step);
            x = result.x;
            if tracker.evaluate(&x).1 <= task.feasibility_tol {
                break;
            }
            step *= 0.1;
        }
    }
    RestartOutcome {
        feasible: tracker.best,
        least_excess: tracker.least_excess,
    }
}

/// Maximizes `|phi_NL|` subject to `composite_loss <= loss_budget`.
pub fn optimize_phase(task: &OptimizationTask) -> Result<TradeoffPoint> {
    task.validate()?;
    let probes = ProbeSet::new(&task.model, task.variant);
    let outcomes: Vec<RestartOutcome> = (0..task.restarts)
        .into_par_iter()
        .map(|i| run_restart(task, &probes, i))
        .collect();

    let mut best: Option<Candidate> = None;
    let mut least: Option<(f64, PulseSequence)> = None;
    for outcome in outcomes {
        if let Some(c) = outcome.feasible {
            if best.as_ref().is_none_or(|b| c.phi_abs > b.phi_abs) {
                best = Some(c);
            }
        }
        if least.as_ref().is_none_or(|l| outcome.least_excess.0 < l.0) {
            least = Some(outcome.least_excess);
        }
    }
    match best {
        Some(c) => Ok(TradeoffPoint {
            budget: task.loss_budget,
            best_phi_nl_abs: c.phi_abs,
            achieved_loss: c.loss,
            witness_sequence: c.seq,
            seed: task.seed,
        }),
        None => {
            let (excess, seq) = least.expect("at least one restart");
            Err(Error::Infeasible {
                excess,
                least_infeasible: Box::new(seq),
            })
        }
    }
}

/// One optimization per budget, all with the template's seed. Budgets must be
/// ascending. A point that would fall below its predecessor inherits the
/// predecessor's witness, which stays feasible under the larger budget.
pub fn tradeoff_curve(template: &OptimizationTask, budgets: &[f64]) -> Result<Vec<TradeoffPoint>> {
    if budgets.iter().any(|b| b.is_nan()) || budgets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidTask("budgets must be sorted ascending".into()));
    }
    let mut points: Vec<TradeoffPoint> = Vec::with_capacity(budgets.len());
    for &budget in budgets {
        let task = OptimizationTask {
            loss_budget: budget,
            ..template.clone()
        };
        let mut point = optimize_phase(&task)?;
        if let Some(prev) = points.last() {
            if prev.best_phi_nl_abs > point.best_phi_nl_abs {
                point = TradeoffPoint {
                    budget,
                    ..prev.clone()
                };
            }
        }
        points.push(point);
    }
    Ok(points)
}

/// Least-squares slope of `ln |phi|` against `ln budget`.
pub fn log_log_slope(points: &[TradeoffPoint]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.budget > 0.0 && p.best_phi_nl_abs > 0.0)
        .map(|p| (p.budget.ln(), p.best_phi_nl_abs.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Uniform sampling box for random pulse sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingBounds {
    pub n_segments: usize,
    pub coupling_bound: f64,
    pub duration_bound: f64,
    /// Draw drive phases uniformly from `[-pi, pi)` instead of zero.
    #[serde(default)]
    pub drive_phases: bool,
}

impl Default for SamplingBounds {
    fn default() -> Self {
        SamplingBounds {
            n_segments: defaults::n_segments(),
            coupling_bound: defaults::coupling_bound(),
            duration_bound: defaults::duration_bound(),
            drive_phases: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSample {
    pub composite_loss: f64,
    /// `None` when a probe was fully lost.
    pub phi_nl_abs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub samples: Vec<EnsembleSample>,
    /// Samples with loss below `loss_threshold` but `|phi|` at or above `phase_threshold`.
    pub violations: usize,
    pub undefined_phase: usize,
    pub loss_threshold: f64,
    pub phase_threshold: f64,
    /// `histogram[i][j]`: loss bin `i` of `[0, 1]`, phase bin `j` of `[0, pi]`.
    pub histogram: Vec<Vec<usize>>,
}

pub const HISTOGRAM_BINS: usize = 10;

/// Draws `n` sequences uniformly within `bounds`, sample `i` from substream `i`.
pub fn sample_random_sequences(
    n: usize,
    model: &DickeModel,
    variant: Variant,
    bounds: SamplingBounds,
    seed: u64,
) -> EnsembleStats {
    let probes = ProbeSet::new(model, variant);
    let draw = |rng: &mut ChaCha8Rng, bound: f64| {
        if bound > 0.0 {
            rng.random_range(-bound..=bound)
        } else {
            0.0
        }
    };
    let samples: Vec<EnsembleSample> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let segments = (0..bounds.n_segments)
                .map(|_| {
                    let g1 = draw(&mut rng, bounds.coupling_bound);
                    let g2 = draw(&mut rng, bounds.coupling_bound);
                    let t = if bounds.duration_bound > 0.0 {
                        rng.random_range(0.0..=bounds.duration_bound)
                    } else {
                        0.0
                    };
                    let seg = PulseSegment::new(g1, g2, t);
                    if bounds.drive_phases {
                        seg.with_phases(rng.random_range(-PI..PI), rng.random_range(-PI..PI))
                    } else {
                        seg
                    }
                })
                .collect();
            let (loss, phi) = probes.loss_and_phase(&PulseSequence::new(segments));
            EnsembleSample {
                composite_loss: loss,
                phi_nl_abs: phi.map(f64::abs),
            }
        })
        .collect();

    let loss_threshold = 1e-10;
    let phase_threshold = DEFAULT_NOGO_PHASE_TOL;
    let mut histogram = vec![vec![0usize; HISTOGRAM_BINS]; HISTOGRAM_BINS];
    let mut violations = 0;
    let mut undefined_phase = 0;
    let bin = |v: f64, top: f64| (((v / top) * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
    for s in &samples {
        match s.phi_nl_abs {
            Some(phi) => {
                histogram[bin(s.composite_loss, 1.0)][bin(phi, PI)] += 1;
                if s.composite_loss < loss_threshold && phi >= phase_threshold {
                    violations += 1;
                }
            }
            None => undefined_phase += 1,
        }
    }
    EnsembleStats {
        samples,
        violations,
        undefined_phase,
        loss_threshold,
        phase_threshold,
        histogram,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationEntry {
    pub model: DickeModel,
    pub variant: Variant,
    pub best_phi_nl_abs: f64,
    pub achieved_loss: f64,
    pub phase_tol: f64,
    pub pass: bool,
}

/// Runs `template` at its loss budget for every model and variant and checks
/// `|phi_NL| <= phase_tol`.
pub fn certify_no_go(
    template: &OptimizationTask,
    models: &[DickeModel],
    variants: &[Variant],
    phase_tol: f64,
) -> Result<Vec<CertificationEntry>> {
    let mut entries = Vec::new();
    for model in models {
        for &variant in variants {
            let task = OptimizationTask {
                model: model.clone(),
                variant,
                ..template.clone()
            };
            let point = optimize_phase(&task)?;
            entries.push(CertificationEntry {
                model: model.clone(),
                variant,
                best_phi_nl_abs: point.best_phi_nl_abs,
                achieved_loss: point.achieved_loss,
                phase_tol,
                pass: point.best_phi_nl_abs <= phase_tol,
            });
        }
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(model: DickeModel, variant: Variant, budget: f64) -> OptimizationTask {
        OptimizationTask {
            restarts: 4,
            n_segments: 2,
            evals_per_stage: 200,
            ..OptimizationTask::new(model, variant, budget)
        }
    }

    #[test]
    fn decode_respects_bounds() {
        let task = OptimizationTask::new(DickeModel::finite(2), Variant::TwoMode, 0.0);
        let mut rng = substream(3, 0);
        for _ in 0..100 {
            let x: Vec<f64> = (0..24).map(|_| rng.random_range(-50.0..50.0)).collect();
            let seq = task.decode(&x);
            assert_eq!(seq.len(), 8);
            seq.validate(task.coupling_bound).unwrap();
            assert!(seq.segments.iter().all(|s| s.duration <= task.duration_bound));
        }
    }

    #[test]
    fn invalid_tasks_rejected() {
        let mut t = quick(DickeModel::finite(2), Variant::OneMode, 0.1);
        t.restarts = 0;
        assert!(matches!(optimize_phase(&t), Err(Error::InvalidTask(_))));
        let t = quick(DickeModel::finite(2), Variant::OneMode, -1.0);
        assert!(optimize_phase(&t).is_err());
    }

    #[test]
    fn substreams_differ() {
        let a: u64 = substream(7, 0).random();
        let b: u64 = substream(7, 1).random();
        let c: u64 = substream(7, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn deterministic_given_seed() {
        let t = quick(DickeModel::finite(2), Variant::OneMode, 0.05);
        assert_eq!(optimize_phase(&t).unwrap(), optimize_phase(&t).unwrap());
    }

    #[test]
    fn witness_is_feasible() {
        let t = quick(DickeModel::finite(3), Variant::TwoMode, 0.02);
        let p = optimize_phase(&t).unwrap();
        assert!(p.achieved_loss <= 0.02 + 1e-9);
        let (loss, phi) = ProbeSet::new(&t.model, t.variant).loss_and_phase(&p.witness_sequence);
        assert_eq!(loss, p.achieved_loss);
        assert_eq!(phi.unwrap().abs(), p.best_phi_nl_abs);
    }

    #[test]
    fn unsorted_budgets_rejected() {
        let t = quick(DickeModel::finite(2), Variant::OneMode, 0.0);
        assert!(tradeoff_curve(&t, &[0.1, 0.01]).is_err());
    }

    #[test]
    fn zero_box_samples_origin() {
        let bounds = SamplingBounds {
            n_segments: 3,
            coupling_bound: 0.0,
            duration_bound: 1.0,
            drive_phases: false,
        };
        let stats = sample_random_sequences(1, &DickeModel::finite(2), Variant::TwoMode, bounds, 1);
        assert_eq!(
            stats.samples,
            vec![EnsembleSample {
                composite_loss: 0.0,
                phi_nl_abs: Some(0.0)
            }]
        );
    }

    #[test]
    fn slope_of_linear_data() {
        let pts: Vec<TradeoffPoint> = [1e-3, 1e-2, 1e-1]
            .iter()
            .map(|&b| TradeoffPoint {
                budget: b,
                best_phi_nl_abs: 0.7 * b,
                achieved_loss: b,
                witness_sequence: PulseSequence::default(),
                seed: 0,
            })
            .collect();
        assert!((log_log_slope(&pts).unwrap() - 1.0).abs() < 1e-12);
    }
}
