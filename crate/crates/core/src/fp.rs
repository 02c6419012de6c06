//! Fictitious play on a 2x2 game.
//!
//! Each player keeps a tally of the opponent's past strategies and plays a best
//! response to the unnormalized tally. Ties, including the empty history, are
//! broken uniformly at random.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::game::{BimatrixGame, Strategy};
use crate::nash::MixedProfile;
use crate::{rng_from_seed, SimRng};

/// Relative tolerance under which two expected utilities count as tied.
pub const TIE_REL_TOL: f64 = 1e-9;

/// Strategy tallies for one game.
///
/// `h_s*` count the secondary's strategies (kept by the jammer); `h_m*` count
/// the jammer's strategies (kept by the secondary).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct HistoryCounters {
    pub h_s1: u64,
    pub h_s2: u64,
    pub h_m1: u64,
    pub h_m2: u64,
}

impl HistoryCounters {
    pub fn new(h_s1: u64, h_s2: u64, h_m1: u64, h_m2: u64) -> Self {
        Self {
            h_s1,
            h_s2,
            h_m1,
            h_m2,
        }
    }

    pub fn record_secondary(&mut self, s: Strategy) {
        match s {
            Strategy::First => self.h_s1 += 1,
            Strategy::Second => self.h_s2 += 1,
        }
    }

    pub fn record_malicious(&mut self, s: Strategy) {
        match s {
            Strategy::First => self.h_m1 += 1,
            Strategy::Second => self.h_m2 += 1,
        }
    }

    /// Observations of the secondary's play (held by the jammer).
    pub fn secondary_total(&self) -> u64 {
        self.h_s1 + self.h_s2
    }

    /// Observations of the jammer's play (held by the secondary).
    pub fn malicious_total(&self) -> u64 {
        self.h_m1 + self.h_m2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpExpectedUtilities {
    pub u_s1_ex: f64,
    pub u_s2_ex: f64,
    pub u_m1_ex: f64,
    pub u_m2_ex: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalFrequencies {
    pub p_star: f64,
    pub q_star: f64,
}

/// Expected utilities against the opponent's raw counts.
pub fn fp_expected_utilities(
    game: &BimatrixGame,
    history: &HistoryCounters,
) -> FpExpectedUtilities {
    let (hs1, hs2) = (history.h_s1 as f64, history.h_s2 as f64);
    let (hm1, hm2) = (history.h_m1 as f64, history.h_m2 as f64);
    FpExpectedUtilities {
        u_s1_ex: game.a() * hm1 + game.b() * hm2,
        u_s2_ex: game.c() * hm1 + game.d() * hm2,
        u_m1_ex: game.e() * hs1 + game.g() * hs2,
        u_m2_ex: game.f() * hs1 + game.h() * hs2,
    }
}

pub fn is_tie(first: f64, second: f64) -> bool {
    (first - second).abs() <= TIE_REL_TOL * 1.0_f64.max(first.abs()).max(second.abs())
}

/// Picks the strategy with the larger utility, or a fair coin flip on a tie.
///
/// The rng is consumed only on ties.
pub fn best_response<R: Rng + ?Sized>(first: f64, second: f64, rng: &mut R) -> Strategy {
    if is_tie(first, second) {
        if rng.gen_bool(0.5) {
            Strategy::First
        } else {
            Strategy::Second
        }
    } else if first > second {
        Strategy::First
    } else {
        Strategy::Second
    }
}

/// One simultaneous round: both players best-respond to the history so far and
/// both realized strategies are appended to it.
///
/// The secondary's tie-break is drawn before the jammer's.
pub fn fp_step<R: Rng + ?Sized>(
    game: &BimatrixGame,
    history: &HistoryCounters,
    rng: &mut R,
) -> ((Strategy, Strategy), HistoryCounters) {
    let ex = fp_expected_utilities(game, history);
    let secondary = best_response(ex.u_s1_ex, ex.u_s2_ex, rng);
    let malicious = best_response(ex.u_m1_ex, ex.u_m2_ex, rng);
    let mut next = *history;
    next.record_secondary(secondary);
    next.record_malicious(malicious);
    ((secondary, malicious), next)
}

pub fn empirical_frequencies(history: &HistoryCounters) -> Result<EmpiricalFrequencies> {
    if history.secondary_total() == 0 {
        return Err(Error::EmptyHistory("secondary"));
    }
    if history.malicious_total() == 0 {
        return Err(Error::EmptyHistory("malicious"));
    }
    Ok(EmpiricalFrequencies {
        p_star: history.h_s1 as f64 / history.secondary_total() as f64,
        q_star: history.h_m1 as f64 / history.malicious_total() as f64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FpRecord {
    /// 1-based.
    pub iteration: u64,
    pub actions: (Strategy, Strategy),
    pub history: HistoryCounters,
    pub frequencies: EmpiricalFrequencies,
    /// Stage payoffs `(secondary, malicious)` of the realized pure profile.
    pub payoffs: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FpTrace {
    pub records: Vec<FpRecord>,
}

impl FpTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&FpRecord> {
        self.records.last()
    }

    pub fn final_frequencies(&self) -> Option<EmpiricalFrequencies> {
        self.last().map(|r| r.frequencies)
    }
}

/// Stops a run once `p*` and `q*` each moved less than `epsilon` over the last
/// `window` iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceDetector {
    pub window: usize,
    pub epsilon: f64,
}

impl Default for ConvergenceDetector {
    fn default() -> Self {
        Self {
            window: 500,
            epsilon: 0.005,
        }
    }
}

impl ConvergenceDetector {
    pub fn has_converged(&self, trace: &FpTrace) -> bool {
        let n = trace.records.len();
        if self.window == 0 || n <= self.window {
            return false;
        }
        let now = trace.records[n - 1].frequencies;
        let then = trace.records[n - 1 - self.window].frequencies;
        (now.p_star - then.p_star).abs() < self.epsilon
            && (now.q_star - then.q_star).abs() < self.epsilon
    }
}

fn drive(
    game: &BimatrixGame,
    max_iterations: u64,
    seed: u64,
    mut stop: impl FnMut(&FpTrace) -> bool,
) -> FpTrace {
    let mut rng: SimRng = rng_from_seed(seed);
    let mut history = HistoryCounters::default();
    let mut trace = FpTrace {
        records: Vec::with_capacity(max_iterations.min(1 << 20) as usize),
    };
    for iteration in 1..=max_iterations {
        let (actions, next) = fp_step(game, &history, &mut rng);
        history = next;
        let frequencies =
            empirical_frequencies(&history).expect("both players have played at least once");
        trace.records.push(FpRecord {
            iteration,
            actions,
            history,
            frequencies,
            payoffs: (
                game.secondary_payoff(actions.0, actions.1),
                game.malicious_payoff(actions.0, actions.1),
            ),
        });
        if stop(&trace) {
            break;
        }
    }
    trace
}

/// Plays `iterations` rounds from an empty history.
pub fn run_fp(game: &BimatrixGame, iterations: u64, seed: u64) -> Result<FpTrace> {
    if iterations == 0 {
        return Err(Error::Precondition("iterations must be at least 1".into()));
    }
    Ok(drive(game, iterations, seed, |_| false))
}

/// Like [`run_fp`] but stops early once `detector` reports convergence.
pub fn run_fp_until_converged(
    game: &BimatrixGame,
    max_iterations: u64,
    seed: u64,
    detector: ConvergenceDetector,
) -> Result<FpTrace> {
    if max_iterations == 0 {
        return Err(Error::Precondition("iterations must be at least 1".into()));
    }
    Ok(drive(game, max_iterations, seed, |t| {
        detector.has_converged(t)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub iteration: u64,
    pub err_p: f64,
    pub err_q: f64,
}

impl ConvergenceRow {
    pub fn max_err(&self) -> f64 {
        self.err_p.max(self.err_q)
    }
}

/// Distance of the empirical frequencies from `reference` after every iteration.
pub fn convergence_error(trace: &FpTrace, reference: &MixedProfile) -> Vec<ConvergenceRow> {
    trace
        .records
        .iter()
        .map(|r| ConvergenceRow {
            iteration: r.iteration,
            err_p: (r.frequencies.p_star - reference.p_secondary_first).abs(),
            err_q: (r.frequencies.q_star - reference.q_malicious_first).abs(),
        })
        .collect()
}

/// Convergence errors of independent runs, one per seed, sampled at `checkpoints`.
///
/// Each run lasts as long as the largest checkpoint; checkpoints beyond the run
/// length are skipped. Output order follows `seeds` regardless of `exec`.
pub fn errors_at_checkpoints(
    game: &BimatrixGame,
    reference: &MixedProfile,
    seeds: Vec<u64>,
    checkpoints: &[u64],
    exec: Execution,
) -> Result<Vec<Vec<ConvergenceRow>>> {
    let iterations = checkpoints.iter().copied().max().unwrap_or(0);
    if iterations == 0 {
        return Err(Error::Precondition(
            "need at least one positive checkpoint".into(),
        ));
    }
    let runs = exec.map(seeds, |seed| {
        let trace = run_fp(game, iterations, seed)?;
        let rows = convergence_error(&trace, reference);
        Ok(checkpoints
            .iter()
            .filter_map(|&c| c.checked_sub(1).and_then(|i| rows.get(i as usize)).copied())
            .collect())
    });
    runs.into_iter().collect()
}
