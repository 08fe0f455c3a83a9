//! Objective abstraction and per-lap bookkeeping shared by every optimiser.

use std::time::{Duration, Instant};

/// Episodic reward of a weight vector. Higher is better; failed episodes
/// report zero rather than an error.
pub trait Objective: Sync {
    fn evaluate(&self, weights: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn evaluate(&self, weights: &[f64]) -> f64 {
        self(weights)
    }
}

/// Best weights and reward observed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Incumbent {
    pub weights: Vec<f64>,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LapRecord {
    /// 1-based evaluation index.
    pub lap: usize,
    pub weights: Vec<f64>,
    pub reward: f64,
    pub incumbent_reward: f64,
    /// Acquisition evaluations spent proposing this lap's weights.
    pub af_evals: usize,
    /// Time spent choosing the weights (model updates and acquisition search).
    pub proposal_time: Duration,
    /// Time spent inside the objective.
    pub objective_time: Duration,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub incumbent: Incumbent,
    pub trace: Vec<LapRecord>,
}

impl RunOutcome {
    pub fn incumbent_curve(&self) -> Vec<f64> {
        self.trace.iter().map(|r| r.incumbent_reward).collect()
    }

    pub fn total_proposal_time(&self) -> Duration {
        self.trace.iter().map(|r| r.proposal_time).sum()
    }

    pub fn total_objective_time(&self) -> Duration {
        self.trace.iter().map(|r| r.objective_time).sum()
    }
}

/// Evaluates laps, keeps the incumbent (strict improvement only, so the first
/// achiever of a tie is kept) and records the trace.
pub(crate) struct Tracker<'a> {
    objective: &'a dyn Objective,
    incumbent: Option<Incumbent>,
    trace: Vec<LapRecord>,
}

impl<'a> Tracker<'a> {
    pub fn new(objective: &'a dyn Objective, capacity: usize) -> Self {
        Self {
            objective,
            incumbent: None,
            trace: Vec::with_capacity(capacity),
        }
    }

    /// Runs one episode and returns its reward.
    pub fn evaluate(&mut self, weights: Vec<f64>, af_evals: usize, proposal_time: Duration) -> f64 {
        let start = Instant::now();
        let reward = self.objective.evaluate(&weights);
        let objective_time = start.elapsed();
        let improved = self.incumbent.as_ref().is_none_or(|inc| reward > inc.reward);
        if improved {
            self.incumbent = Some(Incumbent {
                weights: weights.clone(),
                reward,
            });
        }
        let incumbent_reward = self.incumbent.as_ref().map(|i| i.reward).unwrap_or(reward);
        self.trace.push(LapRecord {
            lap: self.trace.len() + 1,
            weights,
            reward,
            incumbent_reward,
            af_evals,
            proposal_time,
            objective_time,
        });
        reward
    }

    pub fn finish(self) -> RunOutcome {
        RunOutcome {
            incumbent: self.incumbent.expect("at least one lap was evaluated"),
            trace: self.trace,
        }
    }
}
