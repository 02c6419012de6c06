//! Nash equilibria of 2x2 bimatrix games.

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, Strategy};

/// Denominators of the indifference formulas below this magnitude are treated as zero.
pub const DENOMINATOR_EPS: f64 = 1e-12;
/// Indifference residual tolerance, relative to the game's payoff scale.
pub const INDIFFERENCE_TOL: f64 = 1e-9;
/// Default tolerance for [`verify_equilibrium`].
pub const VERIFY_TOL: f64 = 1e-6;

/// Probabilities with which each player picks its first strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedProfile {
    pub p_secondary_first: f64,
    pub q_malicious_first: f64,
}

impl MixedProfile {
    pub fn new(p_secondary_first: f64, q_malicious_first: f64) -> Result<Self> {
        for (name, value) in [("p", p_secondary_first), ("q", q_malicious_first)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ProbabilityOutOfRange { name, value });
            }
        }
        Ok(Self {
            p_secondary_first,
            q_malicious_first,
        })
    }

    /// The degenerate mixture that puts all weight on the given pure profile.
    pub fn pure(row: Strategy, col: Strategy) -> Self {
        let weight = |s: Strategy| if s == Strategy::First { 1.0 } else { 0.0 };
        Self {
            p_secondary_first: weight(row),
            q_malicious_first: weight(col),
        }
    }
}

/// Expected payoff of each pure strategy against the opponent's mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyUtilities {
    pub u_s1: f64,
    pub u_s2: f64,
    pub u_m1: f64,
    pub u_m2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    /// Indifference point, when it exists and lies in the unit square.
    pub mixed: Option<MixedProfile>,
    /// Pure profiles without a profitable unilateral deviation, in row-major order.
    pub pure: Vec<(Strategy, Strategy)>,
    /// `(|u_s1 - u_s2|, |u_m1 - u_m2|)` at the mixed profile.
    pub indifference_residuals: Option<(f64, f64)>,
    /// Set when the indifference construction fails.
    pub degenerate: bool,
}

impl EquilibriumReport {
    /// True when the report carries neither a mixed nor a pure equilibrium.
    pub fn is_empty(&self) -> bool {
        self.mixed.is_none() && self.pure.is_empty()
    }
}

/// Outcome of a best-response deviation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub is_equilibrium: bool,
    /// Largest gain either player obtains by deviating to a pure strategy.
    pub max_deviation_gain: f64,
}

pub fn strategy_utilities(game: &BimatrixGame, profile: &MixedProfile) -> StrategyUtilities {
    let p = profile.p_secondary_first;
    let q = profile.q_malicious_first;
    StrategyUtilities {
        u_s1: game.a() * q + game.b() * (1.0 - q),
        u_s2: game.c() * q + game.d() * (1.0 - q),
        u_m1: game.e() * p + game.g() * (1.0 - p),
        u_m2: game.f() * p + game.h() * (1.0 - p),
    }
}

/// Pure profiles at which neither player gains by switching strategy.
pub fn pure_equilibria(game: &BimatrixGame) -> Vec<(Strategy, Strategy)> {
    let other = |s: Strategy| match s {
        Strategy::First => Strategy::Second,
        Strategy::Second => Strategy::First,
    };
    let mut found = Vec::new();
    for row in Strategy::BOTH {
        for col in Strategy::BOTH {
            let row_ok = game.secondary_payoff(row, col) >= game.secondary_payoff(other(row), col);
            let col_ok = game.malicious_payoff(row, col) >= game.malicious_payoff(row, other(col));
            if row_ok && col_ok {
                found.push((row, col));
            }
        }
    }
    found
}

/// Solves both indifference conditions and enumerates the pure equilibria.
///
/// The jammer's mixture `q` makes the secondary indifferent,
/// `q = (d - b) / (a - c + d - b)`, and the secondary's mixture `p` makes the
/// jammer indifferent, `p = (h - g) / (e - f + h - g)`. A vanishing denominator
/// or a solution outside `[0, 1]` marks the report degenerate.
pub fn mixed_equilibrium(game: &BimatrixGame) -> EquilibriumReport {
    let pure = pure_equilibria(game);
    let den_q = game.a() - game.c() + game.d() - game.b();
    let den_p = game.e() - game.f() + game.h() - game.g();

    let mixed = if den_q.abs() < DENOMINATOR_EPS || den_p.abs() < DENOMINATOR_EPS {
        None
    } else {
        let q = (game.d() - game.b()) / den_q;
        let p = (game.h() - game.g()) / den_p;
        MixedProfile::new(p, q).ok()
    };

    let with_residuals = mixed.and_then(|profile| {
        let u = strategy_utilities(game, &profile);
        let residuals = ((u.u_s1 - u.u_s2).abs(), (u.u_m1 - u.u_m2).abs());
        let tol = INDIFFERENCE_TOL * game.scale();
        (residuals.0 <= tol && residuals.1 <= tol).then_some((profile, residuals))
    });

    EquilibriumReport {
        mixed: with_residuals.map(|(m, _)| m),
        pure,
        indifference_residuals: with_residuals.map(|(_, r)| r),
        degenerate: with_residuals.is_none(),
    }
}

/// Checks that no unilateral deviation to a pure strategy gains more than `tolerance`.
pub fn verify_equilibrium(
    game: &BimatrixGame,
    profile: &MixedProfile,
    tolerance: f64,
) -> Verification {
    let u = strategy_utilities(game, profile);
    let p = profile.p_secondary_first;
    let q = profile.q_malicious_first;
    let secondary_gain = u.u_s1.max(u.u_s2) - (p * u.u_s1 + (1.0 - p) * u.u_s2);
    let malicious_gain = u.u_m1.max(u.u_m2) - (q * u.u_m1 + (1.0 - q) * u.u_m2);
    let max_deviation_gain = secondary_gain.max(malicious_gain).max(0.0);
    Verification {
        is_equilibrium: max_deviation_gain <= tolerance,
        max_deviation_gain,
    }
}
