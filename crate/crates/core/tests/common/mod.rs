//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the solver or simulator code paths it is used to check:
//! payoffs are read straight from the game table and expectations are formed
//! by explicit sums over the four pure profiles.

#![allow(dead_code)]

use crn_jamgame::{BimatrixGame, NetworkConfig, Strategy};
use rand::seq::index;
use rand::Rng;

pub const GRID: u32 = 1000;

fn weights(x: f64) -> [f64; 2] {
    [x, 1.0 - x]
}

fn entry(game: &BimatrixGame, secondary: bool, r: usize, c: usize) -> f64 {
    let s = |i| Strategy::BOTH[i];
    if secondary {
        game.secondary_payoff(s(r), s(c))
    } else {
        game.malicious_payoff(s(r), s(c))
    }
}

/// Largest gain from a unilateral deviation to a pure strategy, by explicit sums.
#[allow(clippy::needless_range_loop)]
pub fn deviation_gain(game: &BimatrixGame, p: f64, q: f64) -> f64 {
    let (x, y) = (weights(p), weights(q));
    let mut expected_s = 0.0;
    let mut expected_m = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            expected_s += x[r] * y[c] * entry(game, true, r, c);
            expected_m += x[r] * y[c] * entry(game, false, r, c);
        }
    }
    let best_s = (0..2)
        .map(|r| (0..2).map(|c| y[c] * entry(game, true, r, c)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let best_m = (0..2)
        .map(|c| (0..2).map(|r| x[r] * entry(game, false, r, c)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    (best_s - expected_s).max(best_m - expected_m)
}

/// Lipschitz constants of [`deviation_gain`] in p and in q.
fn lipschitz(game: &BimatrixGame) -> (f64, f64) {
    let row_diff = |secondary| {
        (0..2)
            .map(|c| (entry(game, secondary, 0, c) - entry(game, secondary, 1, c)).abs())
            .fold(0.0, f64::max)
    };
    let col_diff = |secondary| {
        (0..2)
            .map(|r| (entry(game, secondary, r, 0) - entry(game, secondary, r, 1)).abs())
            .fold(0.0, f64::max)
    };
    let lp = row_diff(true).max(2.0 * row_diff(false));
    let lq = (2.0 * col_diff(true)).max(col_diff(false));
    (lp, lq)
}

/// Grid points `(i, j)` (for `p = i / 1000`, `q = j / 1000`) with deviation gain below `eps`.
///
/// Exhaustive over the 1001 x 1001 grid.
pub fn grid_equilibria_full(game: &BimatrixGame, eps: f64) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for i in 0..=GRID {
        for j in 0..=GRID {
            if deviation_gain(game, i as f64 / GRID as f64, j as f64 / GRID as f64) < eps {
                out.push((i, j));
            }
        }
    }
    out
}

/// Same set as [`grid_equilibria_full`], found by scanning a 101 x 101 coarse grid
/// and refining only cells whose coarse gain is within the Lipschitz bound of `eps`.
pub fn grid_equilibria(game: &BimatrixGame, eps: f64) -> Vec<(u32, u32)> {
    const STEP: u32 = 10;
    let (lp, lq) = lipschitz(game);
    let slack = (lp + lq) * (STEP as f64 / 2.0) / GRID as f64;
    let mut out = Vec::new();
    for ci in (0..=GRID).step_by(STEP as usize) {
        for cj in (0..=GRID).step_by(STEP as usize) {
            let coarse = deviation_gain(game, ci as f64 / GRID as f64, cj as f64 / GRID as f64);
            if coarse >= eps + slack {
                continue;
            }
            // Every fine point is within STEP / 2 of its nearest coarse point.
            let (ilo, ihi) = (ci.saturating_sub(STEP / 2), (ci + STEP / 2).min(GRID));
            let (jlo, jhi) = (cj.saturating_sub(STEP / 2), (cj + STEP / 2).min(GRID));
            for i in ilo..=ihi {
                for j in jlo..=jhi {
                    if deviation_gain(game, i as f64 / GRID as f64, j as f64 / GRID as f64) < eps {
                        out.push((i, j));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Whether some accepted grid point lies within one grid step of `(p, q)`.
pub fn near_accepted(accepted: &[(u32, u32)], p: f64, q: f64) -> bool {
    let step = 1.0 / GRID as f64;
    accepted.iter().any(|&(i, j)| {
        (i as f64 * step - p).abs() <= step + 1e-12 && (j as f64 * step - q).abs() <= step + 1e-12
    })
}

/// Random game with entries uniform in `[-1, 1]`.
pub fn random_game<R: Rng>(rng: &mut R) -> BimatrixGame {
    let mut v = [0.0; 8];
    for x in &mut v {
        *x = rng.gen_range(-1.0..=1.0);
    }
    BimatrixGame::from_entries(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]).unwrap()
}

/// Monte Carlo frequencies of "band free of primaries and jammer" and
/// "band free of primaries, jammer present" for a band the secondary switches to.
///
/// The secondary starts in band 0 and switches to a uniformly random other band;
/// the jammer independently lands on a uniformly random band other than 0;
/// `n_primary` primaries occupy distinct uniform bands.
pub fn monte_carlo_occupancy<R: Rng>(
    config: &NetworkConfig,
    draws: u64,
    rng: &mut R,
) -> (f64, f64) {
    let n = config.n_bands;
    let (mut just_secondary, mut with_jammer) = (0u64, 0u64);
    for _ in 0..draws {
        let target = rng.gen_range(1..n);
        let jammer = rng.gen_range(1..n);
        let primaries = index::sample(rng, n, config.n_primary);
        if primaries.iter().any(|b| b == target) {
            continue;
        }
        if jammer == target {
            with_jammer += 1;
        } else {
            just_secondary += 1;
        }
    }
    (
        just_secondary as f64 / draws as f64,
        with_jammer as f64 / draws as f64,
    )
}

/// Expected table entry by direct enumeration of the physical outcomes.
///
/// Returns the (secondary, jammer) payoff expectations of a pure move pair in a
/// jammed slot (category A), with primaries re-placed uniformly, by summing over
/// every secondary target, jammer target and primary presence on the
/// secondary's final band.
pub fn enumerate_category_a(
    config: &NetworkConfig,
    secondary_switch: bool,
    jammer_switch: bool,
) -> (f64, f64) {
    let n = config.n_bands;
    let free = 1.0 - config.n_primary as f64 / n as f64;
    let start = 0usize;
    let s_targets: Vec<usize> = if secondary_switch {
        (1..n).collect()
    } else {
        vec![start]
    };
    let m_targets: Vec<usize> = if jammer_switch {
        (1..n).collect()
    } else {
        vec![start]
    };
    let mut es = 0.0;
    let mut em = 0.0;
    let w = 1.0 / (s_targets.len() * m_targets.len()) as f64;
    for &s in &s_targets {
        for &m in &m_targets {
            let mut ps = if secondary_switch {
                -config.cost_secondary_switch
            } else {
                0.0
            };
            let mut pm = if jammer_switch {
                -config.cost_malicious_switch
            } else {
                0.0
            };
            // With probability `free` the secondary's band has no primary.
            if s == m {
                ps += free * -config.loss_secondary;
                pm += free * config.gain_malicious;
            } else {
                ps += free * config.gain_secondary;
            }
            es += w * ps;
            em += w * pm;
        }
    }
    (es, em)
}
