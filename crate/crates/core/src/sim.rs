//! Slotted simulation of one secondary user, one jammer and `n_primary` primaries.
//!
//! Every slot the state is classified (A: jammed, B: transmitting and tracked by
//! the jammer, C: silenced by a primary), both players pick a move, primaries are
//! re-placed uniformly, moves are executed and payoffs are realized from the
//! resulting band positions. Observed actions feed per-category fictitious-play
//! histories.
//!
//! Random draws within a slot happen in a fixed order: action draws (secondary,
//! then jammer), then primary placement, the secondary's target band and the
//! jammer's target band.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{chunk_sizes, derive_seed, Execution};
use crate::fp::{
    best_response, empirical_frequencies, fp_expected_utilities, EmpiricalFrequencies,
    HistoryCounters,
};
use crate::game::{build_game, BimatrixGame, Category, NetworkConfig, Strategy};
use crate::nash::{mixed_equilibrium, MixedProfile};
use crate::{rng_from_seed, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Stay,
    Switch,
}

impl Move {
    pub fn as_str(self) -> &'static str {
        match self {
            Move::Stay => "stay",
            Move::Switch => "switch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Actions {
    pub secondary: Move,
    pub malicious: Move,
}

impl Actions {
    pub const STAY: Actions = Actions {
        secondary: Move::Stay,
        malicious: Move::Stay,
    };

    pub fn new(secondary: Move, malicious: Move) -> Self {
        Self {
            secondary,
            malicious,
        }
    }
}

/// Physical move behind the secondary's strategy (same in A and B).
pub fn secondary_move(strategy: Strategy) -> Move {
    match strategy {
        Strategy::First => Move::Switch,
        Strategy::Second => Move::Stay,
    }
}

/// Physical move behind the jammer's strategy in the given category.
///
/// In B the jammer's first strategy is to stay and its second to move onto the
/// secondary's band.
pub fn malicious_move(category: Category, strategy: Strategy) -> Move {
    match (category, strategy) {
        (Category::B, Strategy::First) => Move::Stay,
        (Category::B, Strategy::Second) => Move::Switch,
        (_, Strategy::First) => Move::Switch,
        (_, Strategy::Second) => Move::Stay,
    }
}

fn secondary_strategy(mv: Move) -> Strategy {
    match mv {
        Move::Switch => Strategy::First,
        Move::Stay => Strategy::Second,
    }
}

fn malicious_strategy(category: Category, mv: Move) -> Strategy {
    Strategy::BOTH
        .into_iter()
        .find(|s| malicious_move(category, *s) == mv)
        .expect("every move maps to a strategy")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkState {
    pub secondary_band: usize,
    pub malicious_band: usize,
    /// Sorted, distinct.
    pub primary_bands: Vec<usize>,
    pub malicious_knows_secondary_band: bool,
    pub slot_index: u64,
}

impl NetworkState {
    pub fn has_primary(&self, band: usize) -> bool {
        self.primary_bands.binary_search(&band).is_ok()
    }

    /// Whether the secondary's band is free of primaries, so it transmits.
    pub fn secondary_transmits(&self) -> bool {
        !self.has_primary(self.secondary_band)
    }
}

/// Samples `n_primary` distinct bands uniformly, returned sorted.
pub fn place_primaries<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> Result<Vec<usize>> {
    if config.n_primary > config.n_bands {
        return Err(Error::config(
            "n_primary",
            format!("must not exceed n_bands ({})", config.n_bands),
        ));
    }
    let mut bands = index::sample(rng, config.n_bands, config.n_primary).into_vec();
    bands.sort_unstable();
    Ok(bands)
}

pub fn classify_state(state: &NetworkState) -> Category {
    if !state.secondary_transmits() {
        Category::C
    } else if state.malicious_band == state.secondary_band {
        Category::A
    } else {
        Category::B
    }
}

/// How one player picks its strategy in categories A and B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    /// Plays its first strategy with this probability.
    Fixed(f64),
    /// Plays the category's equilibrium mixture.
    Nash,
    /// Best-responds to its per-category history.
    FictitiousPlay,
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "nash" => Ok(Policy::Nash),
            "fp" => Ok(Policy::FictitiousPlay),
            _ => {
                let value = s.strip_prefix("fixed:").ok_or_else(|| {
                    Error::config("policy", format!("expected fixed:P, nash or fp, got {s:?}"))
                })?;
                let p: f64 = value
                    .parse()
                    .map_err(|_| Error::config("policy", format!("bad probability {value:?}")))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::config(
                        "policy",
                        format!("probability {p} outside [0, 1]"),
                    ));
                }
                Ok(Policy::Fixed(p))
            }
        }
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Policy::Fixed(p) => write!(f, "fixed:{p}"),
            Policy::Nash => f.write_str("nash"),
            Policy::FictitiousPlay => f.write_str("fp"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicySpec {
    pub secondary: Policy,
    pub malicious: Policy,
}

impl PolicySpec {
    pub const FICTITIOUS_PLAY: PolicySpec = PolicySpec {
        secondary: Policy::FictitiousPlay,
        malicious: Policy::FictitiousPlay,
    };
    pub const NASH: PolicySpec = PolicySpec {
        secondary: Policy::Nash,
        malicious: Policy::Nash,
    };

    pub fn validate(&self) -> Result<()> {
        for p in [self.secondary, self.malicious] {
            if let Policy::Fixed(v) = p {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::ProbabilityOutOfRange {
                        name: "fixed policy",
                        value: v,
                    });
                }
            }
        }
        Ok(())
    }
}

/// History counters of the two game categories.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CategoryHistories {
    pub a: HistoryCounters,
    pub b: HistoryCounters,
}

impl CategoryHistories {
    pub fn get(&self, category: Category) -> Option<&HistoryCounters> {
        match category {
            Category::A => Some(&self.a),
            Category::B => Some(&self.b),
            Category::C => None,
        }
    }

    fn get_mut(&mut self, category: Category) -> Option<&mut HistoryCounters> {
        match category {
            Category::A => Some(&mut self.a),
            Category::B => Some(&mut self.b),
            Category::C => None,
        }
    }

    /// Observations of the secondary's actions held by the jammer, over A and B.
    pub fn malicious_observations(&self) -> u64 {
        self.a.secondary_total() + self.b.secondary_total()
    }

    /// Observations of the jammer's actions held by the secondary, over A and B.
    pub fn secondary_observations(&self) -> u64 {
        self.a.malicious_total() + self.b.malicious_total()
    }
}

/// Games of categories A and B with their equilibrium mixtures.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryGames {
    pub a: BimatrixGame,
    pub b: BimatrixGame,
    pub nash_a: MixedProfile,
    pub nash_b: MixedProfile,
}

impl CategoryGames {
    pub fn new(config: &NetworkConfig) -> Result<Self> {
        let a = build_game(config, Category::A)?;
        let b = build_game(config, Category::B)?;
        Ok(Self {
            nash_a: playable_equilibrium(&a),
            nash_b: playable_equilibrium(&b),
            a,
            b,
        })
    }

    pub fn game(&self, category: Category) -> Option<&BimatrixGame> {
        match category {
            Category::A => Some(&self.a),
            Category::B => Some(&self.b),
            Category::C => None,
        }
    }

    pub fn nash(&self, category: Category) -> Option<&MixedProfile> {
        match category {
            Category::A => Some(&self.nash_a),
            Category::B => Some(&self.nash_b),
            Category::C => None,
        }
    }
}

/// The mixed equilibrium, else the first pure one, else uniform play.
fn playable_equilibrium(game: &BimatrixGame) -> MixedProfile {
    let report = mixed_equilibrium(game);
    report
        .mixed
        .or_else(|| report.pure.first().map(|&(r, c)| MixedProfile::pure(r, c)))
        .unwrap_or(MixedProfile {
            p_secondary_first: 0.5,
            q_malicious_first: 0.5,
        })
}

fn draw_first<R: Rng + ?Sized>(probability: f64, rng: &mut R) -> Strategy {
    if rng.gen_bool(probability) {
        Strategy::First
    } else {
        Strategy::Second
    }
}

/// Picks both players' moves for a slot of the given category.
///
/// Category C is fixed at (stay, stay) and consumes no randomness.
pub fn choose_actions<R: Rng + ?Sized>(
    category: Category,
    policies: &PolicySpec,
    games: &CategoryGames,
    histories: &CategoryHistories,
    rng: &mut R,
) -> Actions {
    let (Some(game), Some(history), Some(nash)) = (
        games.game(category),
        histories.get(category),
        games.nash(category),
    ) else {
        return Actions::STAY;
    };
    let ex = fp_expected_utilities(game, history);

    let secondary = match policies.secondary {
        Policy::Fixed(p) => draw_first(p, rng),
        Policy::Nash => draw_first(nash.p_secondary_first, rng),
        Policy::FictitiousPlay => best_response(ex.u_s1_ex, ex.u_s2_ex, rng),
    };
    let malicious = match policies.malicious {
        Policy::Fixed(q) => draw_first(q, rng),
        Policy::Nash => draw_first(nash.q_malicious_first, rng),
        Policy::FictitiousPlay => best_response(ex.u_m1_ex, ex.u_m2_ex, rng),
    };
    Actions::new(
        secondary_move(secondary),
        malicious_move(category, malicious),
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Payoffs {
    pub secondary: f64,
    pub malicious: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settlement {
    pub payoffs: Payoffs,
    pub jam_occurred: bool,
    pub next: NetworkState,
}

fn other_band<R: Rng + ?Sized>(n_bands: usize, current: usize, rng: &mut R) -> usize {
    let r = rng.gen_range(0..n_bands - 1);
    if r >= current {
        r + 1
    } else {
        r
    }
}

/// Executes the moves and realizes both payoffs from the resulting positions.
///
/// A switching secondary lands on a uniformly random other band. A switching
/// jammer moves onto the secondary's current band in category B and onto a
/// uniformly random other band otherwise. The secondary transmits when its new
/// band has no primary and is jammed when the jammer shares that band.
pub fn settle_slot<R: Rng + ?Sized>(
    state: &NetworkState,
    actions: Actions,
    config: &NetworkConfig,
    rng: &mut R,
) -> Result<Settlement> {
    config.validate()?;
    let category = classify_state(state);
    let primary_bands = place_primaries(config, rng)?;

    let secondary_band = match actions.secondary {
        Move::Stay => state.secondary_band,
        Move::Switch => other_band(config.n_bands, state.secondary_band, rng),
    };
    let malicious_band = match (actions.malicious, category) {
        (Move::Stay, _) => state.malicious_band,
        (Move::Switch, Category::B) => state.secondary_band,
        (Move::Switch, _) => other_band(config.n_bands, state.malicious_band, rng),
    };

    let mut next = NetworkState {
        secondary_band,
        malicious_band,
        primary_bands,
        malicious_knows_secondary_band: false,
        slot_index: state.slot_index + 1,
    };
    let transmits = next.secondary_transmits();
    let jam_occurred = transmits && malicious_band == secondary_band;
    next.malicious_knows_secondary_band = classify_state(&next) != Category::C;

    let mut payoffs = Payoffs::default();
    if actions.secondary == Move::Switch {
        payoffs.secondary -= config.cost_secondary_switch;
    }
    if actions.malicious == Move::Switch {
        payoffs.malicious -= config.cost_malicious_switch;
    }
    if jam_occurred {
        payoffs.secondary -= config.loss_secondary;
        payoffs.malicious += config.gain_malicious;
    } else if transmits {
        payoffs.secondary += config.gain_secondary;
    }

    Ok(Settlement {
        payoffs,
        jam_occurred,
        next,
    })
}

/// Records what each player observed of the rival's move.
///
/// Nothing is recorded when the move was made in C or the network lands in C.
/// Otherwise the jammer, sensing every band, sees the secondary's move, and the
/// secondary sees the jammer's move only if it stayed. Observations go to the
/// history of the category in which the moves were chosen.
pub fn update_histories(
    prev_category: Category,
    actions: Actions,
    next_category: Category,
    mut histories: CategoryHistories,
) -> CategoryHistories {
    if next_category == Category::C {
        return histories;
    }
    let Some(bucket) = histories.get_mut(prev_category) else {
        return histories;
    };
    bucket.record_secondary(secondary_strategy(actions.secondary));
    if actions.secondary == Move::Stay {
        bucket.record_malicious(malicious_strategy(prev_category, actions.malicious));
    }
    histories
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotRecord {
    pub slot_index: u64,
    pub category: Category,
    /// State that was classified at the start of the slot.
    pub state: NetworkState,
    pub actions: Actions,
    /// Outcome of `actions`, realized once the moves are executed.
    pub payoffs: Payoffs,
    pub jam_occurred: bool,
    pub histories_after: CategoryHistories,
    pub state_after: NetworkState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub slots: u64,
    pub cumulative_payoffs: Payoffs,
    /// Slots spent in A, B and C.
    pub dwell_counts: [u64; 3],
    pub jams: u64,
    pub final_histories: CategoryHistories,
    pub final_frequencies_a: Option<EmpiricalFrequencies>,
    pub final_frequencies_b: Option<EmpiricalFrequencies>,
}

impl SimulationSummary {
    pub fn dwell_fraction(&self, category: Category) -> f64 {
        self.dwell_counts[category as usize] as f64 / self.slots as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub records: Vec<SlotRecord>,
    pub summary: SimulationSummary,
}

/// Uniformly random start: primaries, then the secondary's band, then the jammer's.
pub fn initial_state<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> Result<NetworkState> {
    config.validate()?;
    let primary_bands = place_primaries(config, rng)?;
    let secondary_band = rng.gen_range(0..config.n_bands);
    let malicious_band = rng.gen_range(0..config.n_bands);
    let mut state = NetworkState {
        secondary_band,
        malicious_band,
        primary_bands,
        malicious_knows_secondary_band: false,
        slot_index: 0,
    };
    state.malicious_knows_secondary_band = classify_state(&state) != Category::C;
    Ok(state)
}

pub fn run_simulation(
    config: &NetworkConfig,
    policies: &PolicySpec,
    slots: u64,
    seed: u64,
) -> Result<SimulationRun> {
    if slots == 0 {
        return Err(Error::Precondition("slots must be at least 1".into()));
    }
    config.validate()?;
    policies.validate()?;
    let games = CategoryGames::new(config)?;
    let mut rng: SimRng = rng_from_seed(seed);
    let mut state = initial_state(config, &mut rng)?;
    let mut histories = CategoryHistories::default();
    let mut records = Vec::with_capacity(slots.min(1 << 24) as usize);
    let mut summary = SimulationSummary {
        slots,
        cumulative_payoffs: Payoffs::default(),
        dwell_counts: [0; 3],
        jams: 0,
        final_histories: histories,
        final_frequencies_a: None,
        final_frequencies_b: None,
    };

    for _ in 0..slots {
        let category = classify_state(&state);
        let actions = choose_actions(category, policies, &games, &histories, &mut rng);
        let settlement = settle_slot(&state, actions, config, &mut rng)?;
        histories = update_histories(
            category,
            actions,
            classify_state(&settlement.next),
            histories,
        );

        summary.dwell_counts[category as usize] += 1;
        summary.jams += settlement.jam_occurred as u64;
        summary.cumulative_payoffs.secondary += settlement.payoffs.secondary;
        summary.cumulative_payoffs.malicious += settlement.payoffs.malicious;

        let next = settlement.next.clone();
        records.push(SlotRecord {
            slot_index: state.slot_index,
            category,
            state,
            actions,
            payoffs: settlement.payoffs,
            jam_occurred: settlement.jam_occurred,
            histories_after: histories,
            state_after: settlement.next,
        });
        state = next;
    }

    summary.final_histories = histories;
    summary.final_frequencies_a = empirical_frequencies(&histories.a).ok();
    summary.final_frequencies_b = empirical_frequencies(&histories.b).ok();
    Ok(SimulationRun { records, summary })
}

/// Mean length of the maximal runs of consecutive slots spent in `category`.
pub fn mean_dwell(records: &[SlotRecord], category: Category) -> Option<f64> {
    let mut runs = 0u64;
    let mut slots = 0u64;
    let mut inside = false;
    for r in records {
        let now = r.category == category;
        if now {
            slots += 1;
            if !inside {
                runs += 1;
            }
        }
        inside = now;
    }
    (runs > 0).then(|| slots as f64 / runs as f64)
}

/// Draws a uniformly random state of the requested category.
pub fn random_state_in<R: Rng + ?Sized>(
    config: &NetworkConfig,
    category: Category,
    rng: &mut R,
) -> Result<NetworkState> {
    config.validate()?;
    let n = config.n_bands;
    let secondary_band = rng.gen_range(0..n);
    let shift = |b: usize| if b >= secondary_band { b + 1 } else { b };
    let (primary_bands, malicious_band) = match category {
        Category::A | Category::B => {
            if config.n_primary >= n {
                return Err(Error::Precondition(format!(
                    "category {category} needs a primary-free band"
                )));
            }
            let mut primaries: Vec<usize> = index::sample(rng, n - 1, config.n_primary)
                .into_iter()
                .map(shift)
                .collect();
            primaries.sort_unstable();
            let malicious = if category == Category::A {
                secondary_band
            } else {
                other_band(n, secondary_band, rng)
            };
            (primaries, malicious)
        }
        Category::C => {
            if config.n_primary == 0 {
                return Err(Error::Precondition(
                    "category C needs at least one primary".into(),
                ));
            }
            let mut primaries: Vec<usize> = index::sample(rng, n - 1, config.n_primary - 1)
                .into_iter()
                .map(shift)
                .collect();
            primaries.push(secondary_band);
            primaries.sort_unstable();
            (primaries, rng.gen_range(0..n))
        }
    };
    let state = NetworkState {
        secondary_band,
        malicious_band,
        primary_bands,
        malicious_knows_secondary_band: category != Category::C,
        slot_index: 0,
    };
    debug_assert_eq!(classify_state(&state), category);
    Ok(state)
}

/// Sample mean and variance accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    pub n: u64,
    sum: f64,
    sum_sq: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(mut self, other: RunningStats) -> Self {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffEstimate {
    pub secondary: RunningStats,
    pub malicious: RunningStats,
}

const MONTE_CARLO_CHUNK: u64 = 10_000;

/// Monte Carlo average of realized payoffs for fixed moves from random states of `category`.
///
/// Samples are split into fixed-size chunks with seeds derived from `seed`, so
/// the estimate does not depend on `exec`.
pub fn estimate_payoffs(
    config: &NetworkConfig,
    category: Category,
    actions: Actions,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<PayoffEstimate> {
    config.validate()?;
    random_state_in(config, category, &mut rng_from_seed(seed))?;
    let jobs: Vec<(u64, u64)> = chunk_sizes(samples, MONTE_CARLO_CHUNK)
        .into_iter()
        .enumerate()
        .map(|(i, n)| (derive_seed(seed, i as u64), n))
        .collect();
    let parts = exec.map(jobs, |(chunk_seed, n)| -> Result<PayoffEstimate> {
        let mut rng = rng_from_seed(chunk_seed);
        let mut est = PayoffEstimate {
            secondary: RunningStats::default(),
            malicious: RunningStats::default(),
        };
        for _ in 0..n {
            let state = random_state_in(config, category, &mut rng)?;
            let s = settle_slot(&state, actions, config, &mut rng)?;
            est.secondary.push(s.payoffs.secondary);
            est.malicious.push(s.payoffs.malicious);
        }
        Ok(est)
    });
    parts.into_iter().try_fold(
        PayoffEstimate {
            secondary: RunningStats::default(),
            malicious: RunningStats::default(),
        },
        |acc, part| {
            let part = part?;
            Ok(PayoffEstimate {
                secondary: acc.secondary.merge(part.secondary),
                malicious: acc.malicious.merge(part.malicious),
            })
        },
    )
}

/// Moves that realize the pure profile `(row, col)` of the category's game.
pub fn actions_for(category: Category, row: Strategy, col: Strategy) -> Actions {
    Actions::new(secondary_move(row), malicious_move(category, col))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(s: usize, m: usize, primaries: &[usize]) -> NetworkState {
        NetworkState {
            secondary_band: s,
            malicious_band: m,
            primary_bands: primaries.to_vec(),
            malicious_knows_secondary_band: true,
            slot_index: 0,
        }
    }

    #[test]
    fn primaries_edge_cases() {
        let mut rng = rng_from_seed(1);
        let none = NetworkConfig {
            n_primary: 0,
            ..Default::default()
        };
        assert!(place_primaries(&none, &mut rng).unwrap().is_empty());
        let full = NetworkConfig {
            n_primary: 10,
            ..Default::default()
        };
        assert_eq!(
            place_primaries(&full, &mut rng).unwrap(),
            (0..10).collect::<Vec<_>>()
        );
        let over = NetworkConfig {
            n_primary: 11,
            ..Default::default()
        };
        assert!(place_primaries(&over, &mut rng).is_err());
    }

    #[test]
    fn primaries_are_distinct_and_sorted() {
        let mut rng = rng_from_seed(2);
        for _ in 0..100 {
            let p = place_primaries(&NetworkConfig::default(), &mut rng).unwrap();
            assert_eq!(p.len(), 5);
            assert!(p.windows(2).all(|w| w[0] < w[1]));
            assert!(p.iter().all(|b| *b < 10));
        }
    }

    #[test]
    fn classification() {
        assert_eq!(classify_state(&state(3, 3, &[0, 1, 2, 4, 5])), Category::A);
        assert_eq!(classify_state(&state(3, 7, &[3, 4, 5, 6, 8])), Category::C);
        assert_eq!(classify_state(&state(3, 7, &[0, 1, 2, 4, 5])), Category::B);
        // A primary on the shared band silences the secondary.
        assert_eq!(classify_state(&state(3, 3, &[3])), Category::C);
    }

    #[test]
    fn move_mapping() {
        assert_eq!(malicious_move(Category::A, Strategy::First), Move::Switch);
        assert_eq!(malicious_move(Category::B, Strategy::First), Move::Stay);
        assert_eq!(malicious_move(Category::B, Strategy::Second), Move::Switch);
        for c in Category::GAMES {
            for s in Strategy::BOTH {
                assert_eq!(malicious_strategy(c, malicious_move(c, s)), s);
            }
        }
    }

    #[test]
    fn category_c_always_stays() {
        let games = CategoryGames::new(&NetworkConfig::default()).unwrap();
        let mut rng = rng_from_seed(3);
        let policies = PolicySpec {
            secondary: Policy::Fixed(1.0),
            malicious: Policy::Fixed(1.0),
        };
        let a = choose_actions(
            Category::C,
            &policies,
            &games,
            &CategoryHistories::default(),
            &mut rng,
        );
        assert_eq!(a, Actions::STAY);
    }

    #[test]
    fn fixed_pure_policy() {
        let games = CategoryGames::new(&NetworkConfig::default()).unwrap();
        let policies = PolicySpec {
            secondary: Policy::Fixed(1.0),
            malicious: Policy::Fixed(0.0),
        };
        for seed in 0..20 {
            let a = choose_actions(
                Category::A,
                &policies,
                &games,
                &CategoryHistories::default(),
                &mut rng_from_seed(seed),
            );
            assert_eq!(a, Actions::new(Move::Switch, Move::Stay));
        }
    }

    #[test]
    fn empty_history_fp_is_uniform() {
        let games = CategoryGames::new(&NetworkConfig::default()).unwrap();
        let mut counts = std::collections::HashMap::new();
        for seed in 0..10_000 {
            let a = choose_actions(
                Category::A,
                &PolicySpec::FICTITIOUS_PLAY,
                &games,
                &CategoryHistories::default(),
                &mut rng_from_seed(seed),
            );
            *counts.entry(a).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 4);
        for (pair, n) in counts {
            let f = n as f64 / 10_000.0;
            assert!((f - 0.25).abs() <= 0.015, "{pair:?} {f}");
        }
    }

    #[test]
    fn settle_stay_stay_jams_without_primary() {
        let cfg = NetworkConfig::default();
        let s = state(4, 4, &[0, 1, 2, 3, 5]);
        let mut seen = 0;
        for seed in 0..200 {
            let out = settle_slot(&s, Actions::STAY, &cfg, &mut rng_from_seed(seed)).unwrap();
            if !out.next.has_primary(4) {
                seen += 1;
                assert!(out.jam_occurred);
                assert_eq!(
                    out.payoffs,
                    Payoffs {
                        secondary: -100.0,
                        malicious: 75.0
                    }
                );
            } else {
                assert_eq!(out.payoffs, Payoffs::default());
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn settle_stay_switch_in_a() {
        let cfg = NetworkConfig::default();
        let s = state(4, 4, &[0, 1, 2, 3, 5]);
        for seed in 0..200 {
            let out = settle_slot(
                &s,
                Actions::new(Move::Stay, Move::Switch),
                &cfg,
                &mut rng_from_seed(seed),
            )
            .unwrap();
            assert_ne!(out.next.malicious_band, 4);
            if !out.next.has_primary(4) {
                assert_eq!(
                    out.payoffs,
                    Payoffs {
                        secondary: 50.0,
                        malicious: -2.0
                    }
                );
            }
        }
    }

    #[test]
    fn jammer_in_b_moves_onto_secondary() {
        let cfg = NetworkConfig::default();
        let s = state(2, 8, &[0, 1, 3, 4, 5]);
        let out = settle_slot(
            &s,
            Actions::new(Move::Stay, Move::Switch),
            &cfg,
            &mut rng_from_seed(0),
        )
        .unwrap();
        assert_eq!(out.next.malicious_band, 2);
    }

    #[test]
    fn jam_implies_shared_free_band() {
        let cfg = NetworkConfig::default();
        let run = run_simulation(&cfg, &PolicySpec::FICTITIOUS_PLAY, 5_000, 4).unwrap();
        for r in &run.records {
            if r.jam_occurred {
                assert_eq!(r.state_after.secondary_band, r.state_after.malicious_band);
                assert!(r.state_after.secondary_transmits());
                assert_eq!(classify_state(&r.state_after), Category::A);
            }
            if r.category == Category::C {
                assert_eq!(r.actions, Actions::STAY);
            }
        }
    }

    #[test]
    fn history_rules() {
        let h = CategoryHistories::default();
        let both_stay = Actions::STAY;
        assert_eq!(update_histories(Category::C, both_stay, Category::A, h), h);

        let after = update_histories(Category::A, both_stay, Category::A, h);
        assert_eq!(after.a, HistoryCounters::new(0, 1, 0, 1));
        assert_eq!(after.b, HistoryCounters::default());

        let switched = Actions::new(Move::Switch, Move::Switch);
        let after = update_histories(Category::A, switched, Category::B, h);
        assert_eq!(after.a, HistoryCounters::new(1, 0, 0, 0));

        let into_c = update_histories(Category::B, both_stay, Category::C, h);
        assert_eq!(into_c, h);

        // In B the jammer's "switch" is its second strategy.
        let after = update_histories(
            Category::B,
            Actions::new(Move::Stay, Move::Switch),
            Category::A,
            h,
        );
        assert_eq!(after.b, HistoryCounters::new(0, 1, 0, 1));
    }

    #[test]
    fn saturated_spectrum_is_all_c() {
        let cfg = NetworkConfig {
            n_primary: 10,
            ..Default::default()
        };
        let run = run_simulation(&cfg, &PolicySpec::FICTITIOUS_PLAY, 500, 1).unwrap();
        assert!(run.records.iter().all(|r| r.category == Category::C));
        assert_eq!(run.summary.cumulative_payoffs, Payoffs::default());
        assert_eq!(run.summary.final_histories, CategoryHistories::default());
    }

    #[test]
    fn single_slot() {
        let run = run_simulation(
            &NetworkConfig::default(),
            &PolicySpec::FICTITIOUS_PLAY,
            1,
            9,
        )
        .unwrap();
        assert_eq!(run.records.len(), 1);
        assert!(
            run.summary.final_histories.a.secondary_total()
                + run.summary.final_histories.b.secondary_total()
                <= 1
        );
        assert!(run_simulation(&NetworkConfig::default(), &PolicySpec::NASH, 0, 9).is_err());
    }

    #[test]
    fn random_states_have_requested_category() {
        let cfg = NetworkConfig::default();
        let mut rng = rng_from_seed(8);
        for c in [Category::A, Category::B, Category::C] {
            for _ in 0..200 {
                let s = random_state_in(&cfg, c, &mut rng).unwrap();
                assert_eq!(classify_state(&s), c);
                assert_eq!(s.primary_bands.len(), 5);
            }
        }
    }

    #[test]
    fn dwell_runs() {
        let run = run_simulation(&NetworkConfig::default(), &PolicySpec::NASH, 2_000, 5).unwrap();
        let d = mean_dwell(&run.records, Category::C).unwrap();
        assert!(d >= 1.0);
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("fp".parse::<Policy>().unwrap(), Policy::FictitiousPlay);
        assert_eq!("nash".parse::<Policy>().unwrap(), Policy::Nash);
        assert_eq!("fixed:0.25".parse::<Policy>().unwrap(), Policy::Fixed(0.25));
        assert!("fixed:1.5".parse::<Policy>().is_err());
        assert!("greedy".parse::<Policy>().is_err());
    }

    #[test]
    fn estimate_is_mode_independent() {
        let cfg = NetworkConfig::default();
        let actions = actions_for(Category::A, Strategy::First, Strategy::First);
        let seq =
            estimate_payoffs(&cfg, Category::A, actions, 25_000, 3, Execution::Sequential).unwrap();
        let par =
            estimate_payoffs(&cfg, Category::A, actions, 25_000, 3, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.secondary.n, 25_000);
    }
}
