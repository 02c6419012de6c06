//! Network parameters, occupancy probabilities and the per-category payoff tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Static parameters of the network and the players' utility constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n_bands: usize,
    pub n_primary: usize,
    pub cost_secondary_switch: f64,
    pub cost_malicious_switch: f64,
    pub gain_secondary: f64,
    pub gain_malicious: f64,
    pub loss_secondary: f64,
}

impl Default for NetworkConfig {
    /// Ten bands, five primaries and the reference utility constants.
    fn default() -> Self {
        Self {
            n_bands: 10,
            n_primary: 5,
            cost_secondary_switch: 5.0,
            cost_malicious_switch: 2.0,
            gain_secondary: 50.0,
            gain_malicious: 75.0,
            loss_secondary: 100.0,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_bands < 2 {
            return Err(Error::config(
                "n_bands",
                format!("must be at least 2, got {}", self.n_bands),
            ));
        }
        if self.n_primary > self.n_bands {
            return Err(Error::config(
                "n_primary",
                format!(
                    "must not exceed n_bands ({}), got {}",
                    self.n_bands, self.n_primary
                ),
            ));
        }
        for (field, value) in self.utility_fields() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::config(
                    field,
                    format!("must be finite and non-negative, got {value}"),
                ));
            }
        }
        Ok(())
    }

    fn utility_fields(&self) -> [(&'static str, f64); 5] {
        [
            ("cost_secondary_switch", self.cost_secondary_switch),
            ("cost_malicious_switch", self.cost_malicious_switch),
            ("gain_secondary", self.gain_secondary),
            ("gain_malicious", self.gain_malicious),
            ("loss_secondary", self.loss_secondary),
        ]
    }
}

/// Occupancy probabilities seen by a player that does not know where the primaries are.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedProbabilities {
    /// A given band holds a primary user.
    pub p_primary: f64,
    /// A band other than the current one is free of primaries and of a switching jammer.
    pub p_just_secondary: f64,
    /// A band other than the current one is free of primaries but holds the switching jammer.
    pub p_secondary_and_malicious: f64,
}

pub fn derived_probabilities(config: &NetworkConfig) -> Result<DerivedProbabilities> {
    config.validate()?;
    let p_primary = config.n_primary as f64 / config.n_bands as f64;
    let other = 1.0 / (config.n_bands - 1) as f64;
    Ok(DerivedProbabilities {
        p_primary,
        p_just_secondary: 1.0 - (other + p_primary - p_primary * other),
        p_secondary_and_malicious: other * (1.0 - p_primary),
    })
}

/// Information regime of a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    /// Jammed: both players know the rival's band.
    A,
    /// Transmitting unjammed: only the jammer knows the secondary's band.
    B,
    /// Secondary silenced by a primary: neither player knows the rival's band.
    C,
}

impl Category {
    pub const GAMES: [Category; 2] = [Category::A, Category::B];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::A => "A",
            Category::B => "B",
            Category::C => "C",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Category::A),
            "B" | "b" => Ok(Category::B),
            "C" | "c" => Ok(Category::C),
            other => Err(Error::config(
                "category",
                format!("expected A, B or C, got {other:?}"),
            )),
        }
    }
}

/// One of a player's two pure strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    First,
    Second,
}

impl Strategy {
    pub const BOTH: [Strategy; 2] = [Strategy::First, Strategy::Second];

    /// 1-based index used in reports and CSV output.
    pub fn number(self) -> u8 {
        match self {
            Strategy::First => 1,
            Strategy::Second => 2,
        }
    }

    pub(crate) fn idx(self) -> usize {
        self.number() as usize - 1
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// A 2x2 game with the secondary user as row player and the jammer as column player.
///
/// Entry layout: `(row 1, col 1) = (a, e)`, `(1, 2) = (b, f)`, `(2, 1) = (c, g)`,
/// `(2, 2) = (d, h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BimatrixGame {
    secondary: [[f64; 2]; 2],
    malicious: [[f64; 2]; 2],
    pub secondary_labels: [&'static str; 2],
    pub malicious_labels: [&'static str; 2],
}

impl BimatrixGame {
    #[allow(clippy::too_many_arguments)]
    pub fn from_entries(
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        e: f64,
        f: f64,
        g: f64,
        h: f64,
    ) -> Result<Self> {
        let game = Self {
            secondary: [[a, b], [c, d]],
            malicious: [[e, f], [g, h]],
            secondary_labels: ["first", "second"],
            malicious_labels: ["first", "second"],
        };
        if let Some(bad) = game.entries().iter().find(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!(
                "payoff entries must be finite, got {bad}"
            )));
        }
        Ok(game)
    }

    pub fn with_labels(
        mut self,
        secondary: [&'static str; 2],
        malicious: [&'static str; 2],
    ) -> Self {
        self.secondary_labels = secondary;
        self.malicious_labels = malicious;
        self
    }

    /// Secondary user's payoff for the given pure profile.
    pub fn secondary_payoff(&self, row: Strategy, col: Strategy) -> f64 {
        self.secondary[row.idx()][col.idx()]
    }

    /// Jammer's payoff for the given pure profile.
    pub fn malicious_payoff(&self, row: Strategy, col: Strategy) -> f64 {
        self.malicious[row.idx()][col.idx()]
    }

    pub fn a(&self) -> f64 {
        self.secondary[0][0]
    }
    pub fn b(&self) -> f64 {
        self.secondary[0][1]
    }
    pub fn c(&self) -> f64 {
        self.secondary[1][0]
    }
    pub fn d(&self) -> f64 {
        self.secondary[1][1]
    }
    pub fn e(&self) -> f64 {
        self.malicious[0][0]
    }
    pub fn f(&self) -> f64 {
        self.malicious[0][1]
    }
    pub fn g(&self) -> f64 {
        self.malicious[1][0]
    }
    pub fn h(&self) -> f64 {
        self.malicious[1][1]
    }

    /// `[a, b, c, d, e, f, g, h]`.
    pub fn entries(&self) -> [f64; 8] {
        [
            self.a(),
            self.b(),
            self.c(),
            self.d(),
            self.e(),
            self.f(),
            self.g(),
            self.h(),
        ]
    }

    /// Largest absolute payoff, at least 1.
    pub fn scale(&self) -> f64 {
        self.entries().iter().fold(1.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Builds the payoff table of category A or B.
///
/// Category A: both players choose between switching to a uniformly random other
/// band (strategy 1) and staying (strategy 2).
///
/// Category B: the secondary chooses between switching (1) and staying (2); the
/// jammer between staying in its own band (1) and moving onto the secondary's
/// band (2). The secondary's entry for (switch, move-onto-secondary) carries no
/// switching cost; this mirrors the published table and is what yields the
/// reference equilibrium, even though a switching secondary pays `C_s` in the
/// simulator.
pub fn build_game(config: &NetworkConfig, category: Category) -> Result<BimatrixGame> {
    let probs = derived_probabilities(config)?;
    let free = 1.0 - probs.p_primary;
    let NetworkConfig {
        cost_secondary_switch: cs,
        cost_malicious_switch: cm,
        gain_secondary: gs,
        gain_malicious: gm,
        loss_secondary: ls,
        ..
    } = *config;
    let switch_into_unknown =
        -cs + gs * probs.p_just_secondary - ls * probs.p_secondary_and_malicious;

    match category {
        Category::A => Ok(BimatrixGame::from_entries(
            switch_into_unknown,
            -cs + gs * free,
            gs * free,
            -ls * free,
            -cm + gm * probs.p_secondary_and_malicious,
            0.0,
            -cm,
            gm * free,
        )?
        .with_labels(["switch", "stay"], ["switch", "stay"])),
        Category::B => Ok(BimatrixGame::from_entries(
            switch_into_unknown,
            gs * free,
            gs * free,
            -ls * free,
            gm * probs.p_secondary_and_malicious,
            -cm,
            0.0,
            gm * free - cm,
        )?
        .with_labels(["switch", "stay"], ["stay", "switch-to-secondary"])),
        Category::C => Err(Error::NoGameForCategory(Category::C)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn reference_config_probabilities() {
        let p = derived_probabilities(&NetworkConfig::default()).unwrap();
        assert_eq!(p.p_primary, 0.5);
        assert!(close(p.p_just_secondary, 4.0 / 9.0, 1e-12));
        assert!(close(p.p_secondary_and_malicious, 1.0 / 18.0, 1e-12));
    }

    #[test]
    fn no_primaries() {
        let cfg = NetworkConfig {
            n_primary: 0,
            ..Default::default()
        };
        let p = derived_probabilities(&cfg).unwrap();
        assert_eq!(p.p_primary, 0.0);
        assert!(close(p.p_just_secondary, 8.0 / 9.0, 1e-12));
        assert!(close(p.p_secondary_and_malicious, 1.0 / 9.0, 1e-12));
    }

    #[test]
    fn rejects_single_band() {
        let cfg = NetworkConfig {
            n_bands: 1,
            n_primary: 0,
            ..Default::default()
        };
        match derived_probabilities(&cfg) {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "n_bands"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_fields() {
        let too_many = NetworkConfig {
            n_primary: 11,
            ..Default::default()
        };
        assert!(matches!(
            too_many.validate(),
            Err(Error::InvalidConfig {
                field: "n_primary",
                ..
            })
        ));
        let negative = NetworkConfig {
            loss_secondary: -1.0,
            ..Default::default()
        };
        assert!(matches!(
            negative.validate(),
            Err(Error::InvalidConfig {
                field: "loss_secondary",
                ..
            })
        ));
        let nan = NetworkConfig {
            gain_malicious: f64::NAN,
            ..Default::default()
        };
        assert!(nan.validate().is_err());
    }

    #[test]
    fn category_a_reference_entries() {
        let g = build_game(&NetworkConfig::default(), Category::A).unwrap();
        let expected = [35.0 / 3.0, 20.0, 25.0, -50.0, 13.0 / 6.0, 0.0, -2.0, 37.5];
        for (got, want) in g.entries().iter().zip(expected) {
            assert!(close(*got, want, 1e-9), "{got} vs {want}");
        }
        assert_eq!(g.secondary_labels, ["switch", "stay"]);
    }

    #[test]
    fn category_b_reference_entries() {
        let g = build_game(&NetworkConfig::default(), Category::B).unwrap();
        let expected = [35.0 / 3.0, 25.0, 25.0, -50.0, 25.0 / 6.0, -2.0, 0.0, 35.5];
        for (got, want) in g.entries().iter().zip(expected) {
            assert!(close(*got, want, 1e-9), "{got} vs {want}");
        }
        assert_eq!(g.malicious_labels, ["stay", "switch-to-secondary"]);
    }

    #[test]
    fn zero_utilities_give_zero_game() {
        let cfg = NetworkConfig {
            cost_secondary_switch: 0.0,
            cost_malicious_switch: 0.0,
            gain_secondary: 0.0,
            gain_malicious: 0.0,
            loss_secondary: 0.0,
            ..Default::default()
        };
        let g = build_game(&cfg, Category::A).unwrap();
        assert!(g.entries().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn category_c_has_no_game() {
        assert_eq!(
            build_game(&NetworkConfig::default(), Category::C),
            Err(Error::NoGameForCategory(Category::C))
        );
    }

    #[test]
    fn entry_layout() {
        let g = BimatrixGame::from_entries(1., 2., 3., 4., 5., 6., 7., 8.).unwrap();
        use Strategy::*;
        assert_eq!(g.secondary_payoff(First, Second), 2.0);
        assert_eq!(g.secondary_payoff(Second, First), 3.0);
        assert_eq!(g.malicious_payoff(First, Second), 6.0);
        assert_eq!(g.malicious_payoff(Second, Second), 8.0);
        assert!(BimatrixGame::from_entries(f64::INFINITY, 0., 0., 0., 0., 0., 0., 0.).is_err());
    }

    #[test]
    fn category_parse() {
        assert_eq!("A".parse::<Category>().unwrap(), Category::A);
        assert_eq!("b".parse::<Category>().unwrap(), Category::B);
        assert!("D".parse::<Category>().is_err());
    }
}
