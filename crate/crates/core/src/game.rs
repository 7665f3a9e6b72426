//! The first-stage 2x2 price/quantity contract game under a uniform
//! certification standard.
//!
//! `Literal` participation prices every cell at the both-certified
//! payoffs for the given standard. `Aware` participation adds an inner
//! certification stage per cell: each firm certifies only when doing so
//! pays given the rival's participation choice, with one-sided profiles
//! solved by the numeric oracle since they have no closed form.

use serde::{Deserialize, Serialize};

use crate::closed_form::{solve_scenario, ScenarioKey, SolveError};
use crate::model::{CertProfile, ModelParams, Regime};
use crate::oracle::OracleConfig;

/// A firm's first-stage contract choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractChoice {
    Price,
    Quantity,
}

impl ContractChoice {
    pub const BOTH: [ContractChoice; 2] = [ContractChoice::Price, ContractChoice::Quantity];

    pub fn other(self) -> ContractChoice {
        match self {
            ContractChoice::Price => ContractChoice::Quantity,
            ContractChoice::Quantity => ContractChoice::Price,
        }
    }

    fn idx(self) -> usize {
        match self {
            ContractChoice::Price => 0,
            ContractChoice::Quantity => 1,
        }
    }
}

/// The regime induced by a pair of contract choices.
pub fn regime_of(c1: ContractChoice, c2: ContractChoice) -> Regime {
    use ContractChoice::{Price, Quantity};
    match (c1, c2) {
        (Price, Price) => Regime::Pp,
        (Price, Quantity) => Regime::Pq,
        (Quantity, Price) => Regime::Qp,
        (Quantity, Quantity) => Regime::Qq,
    }
}

/// How cell payoffs treat the firms' certification decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Participation {
    /// Both firms certified in every cell, whatever the standard costs them.
    Literal,
    /// Firms certify per cell only when it is individually rational.
    Aware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellFlag {
    /// The inner participation game has no pure equilibrium; the no-cert
    /// profile is used as a deterministic fallback.
    NoPureParticipationEquilibrium,
    /// Multiple inner equilibria with no Pareto-dominant one; the first in
    /// the fixed profile order is used.
    AmbiguousParticipation,
}

/// One cell of the contract game: the payoff pair plus the scenario and
/// solver that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameCell {
    pub pi1: f64,
    pub pi2: f64,
    pub scenario: ScenarioKey,
    pub solver: SolverKind,
    pub flag: Option<CellFlag>,
}

/// The 2x2 contract game at a uniform standard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameMatrix {
    pub s: f64,
    pub participation: Participation,
    /// Indexed `[firm 1 choice][firm 2 choice]` with price = 0, quantity = 1.
    pub cells: [[GameCell; 2]; 2],
}

impl GameMatrix {
    pub fn cell(&self, c1: ContractChoice, c2: ContractChoice) -> &GameCell {
        &self.cells[c1.idx()][c2.idx()]
    }

    pub fn payoffs(&self, c1: ContractChoice, c2: ContractChoice) -> (f64, f64) {
        let cell = self.cell(c1, c2);
        (cell.pi1, cell.pi2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NashProfile {
    pub firm1: ContractChoice,
    pub firm2: ContractChoice,
    /// Some unilateral deviation is within the tie tolerance of indifference.
    pub weak: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NashResult {
    pub equilibria: Vec<NashProfile>,
    pub dominant_firm1: Option<ContractChoice>,
    pub dominant_firm2: Option<ContractChoice>,
    pub tie_tolerance: f64,
}

/// Which first-stage outcome pattern the equilibrium set forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpnePattern {
    /// Unique equilibrium {quantity, quantity}.
    UniqueQuantityQuantity,
    /// Exactly the two mixed profiles {price, quantity} and {quantity, price}.
    MixedContractPair,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpneOutcome {
    pub matrix: GameMatrix,
    pub nash: NashResult,
    pub pattern: SpnePattern,
}

/// Fixed evaluation order for inner participation profiles: more
/// certification first, firm 1 before firm 2. Selection fallbacks walk
/// this order, keeping matrix construction deterministic.
const PROFILE_ORDER: [(bool, bool); 4] = [(true, true), (true, false), (false, true), (false, false)];

/// Outcome of the per-cell certification stage.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticipationOutcome {
    /// Profit pairs indexed `[e1][e2]`.
    pub profits: [[(f64, f64); 2]; 2],
    /// Pure equilibria of the inner 2x2 game, more certification first,
    /// firm 1 before firm 2.
    pub equilibria: Vec<(bool, bool)>,
    /// The profile the cell is priced at.
    pub selected: (bool, bool),
    pub flag: Option<CellFlag>,
}

/// Solve the inner certification stage for a regime at standard `s`:
/// each firm certifies only if that pays given the rival's choice. With
/// several pure equilibria the Pareto-dominant one (for the firms) is
/// selected; with none, the no-cert profile is the fallback and the cell
/// is flagged.
pub fn participation_equilibrium(
    regime: Regime,
    s: f64,
    params: &ModelParams,
    cfg: &OracleConfig,
    tie_tolerance: f64,
) -> Result<ParticipationOutcome, SolveError> {
    let cert_for = |e1: bool, e2: bool| -> CertProfile {
        if !e1 && !e2 {
            CertProfile::none()
        } else {
            CertProfile::new(e1, e2, s).expect("s >= 0")
        }
    };
    let mut profits = [[(0.0f64, 0.0f64); 2]; 2];
    for (e1, e2) in PROFILE_ORDER {
        let eq = solve_scenario(regime, &cert_for(e1, e2), params, cfg)?;
        profits[e1 as usize][e2 as usize] = (eq.pi1, eq.pi2);
    }
    let pi = |e1: bool, e2: bool| profits[e1 as usize][e2 as usize];

    let is_nash = |e1: bool, e2: bool| {
        pi(e1, e2).0 >= pi(!e1, e2).0 - tie_tolerance
            && pi(e1, e2).1 >= pi(e1, !e2).1 - tie_tolerance
    };
    let equilibria: Vec<(bool, bool)> = PROFILE_ORDER
        .iter()
        .copied()
        .filter(|&(e1, e2)| is_nash(e1, e2))
        .collect();

    let (selected, flag) = match equilibria.len() {
        0 => ((false, false), Some(CellFlag::NoPureParticipationEquilibrium)),
        1 => (equilibria[0], None),
        _ => {
            let dominant = equilibria.iter().copied().find(|&(e1, e2)| {
                equilibria.iter().all(|&(o1, o2)| {
                    pi(e1, e2).0 >= pi(o1, o2).0 - tie_tolerance
                        && pi(e1, e2).1 >= pi(o1, o2).1 - tie_tolerance
                })
            });
            match dominant {
                Some(e) => (e, None),
                None => (equilibria[0], Some(CellFlag::AmbiguousParticipation)),
            }
        }
    };

    Ok(ParticipationOutcome { profits, equilibria, selected, flag })
}

fn inner_participation(
    regime: Regime,
    s: f64,
    params: &ModelParams,
    cfg: &OracleConfig,
    tie_tolerance: f64,
) -> Result<GameCell, SolveError> {
    let outcome = participation_equilibrium(regime, s, params, cfg, tie_tolerance)?;
    let (e1, e2) = outcome.selected;
    let cert = if !e1 && !e2 {
        CertProfile::none()
    } else {
        CertProfile::new(e1, e2, s).expect("s >= 0")
    };
    let (pi1, pi2) = outcome.profits[e1 as usize][e2 as usize];
    Ok(GameCell {
        pi1,
        pi2,
        scenario: ScenarioKey::new(regime, &cert),
        solver: if cert.symmetric() { SolverKind::ClosedForm } else { SolverKind::Oracle },
        flag: outcome.flag,
    })
}

/// Build the contract game at a uniform standard `s`.
pub fn payoff_matrix(
    s: f64,
    params: &ModelParams,
    participation: Participation,
    cfg: &OracleConfig,
    tie_tolerance: f64,
) -> Result<GameMatrix, SolveError> {
    let mut cells = Vec::with_capacity(4);
    for c1 in ContractChoice::BOTH {
        for c2 in ContractChoice::BOTH {
            let regime = regime_of(c1, c2);
            let cell = match participation {
                Participation::Literal => {
                    let cert = CertProfile::both(s).expect("s >= 0");
                    let eq = solve_scenario(regime, &cert, params, cfg)?;
                    GameCell {
                        pi1: eq.pi1,
                        pi2: eq.pi2,
                        scenario: ScenarioKey::new(regime, &cert),
                        solver: SolverKind::ClosedForm,
                        flag: None,
                    }
                }
                Participation::Aware => inner_participation(regime, s, params, cfg, tie_tolerance)?,
            };
            cells.push(cell);
        }
    }
    Ok(GameMatrix {
        s,
        participation,
        cells: [[cells[0], cells[1]], [cells[2], cells[3]]],
    })
}

/// Enumerate the pure-strategy Nash equilibria of the contract game.
///
/// A profile is an equilibrium when neither firm gains more than
/// `tie_tolerance` by a unilateral deviation; profiles with a deviation
/// inside the tolerance are kept but flagged weak. Strict dominant
/// strategies are reported when they exist.
pub fn pure_nash(matrix: &GameMatrix, tie_tolerance: f64) -> NashResult {
    let pay = |c1: ContractChoice, c2: ContractChoice| matrix.payoffs(c1, c2);

    let mut equilibria = Vec::new();
    for c1 in ContractChoice::BOTH {
        for c2 in ContractChoice::BOTH {
            let gain1 = pay(c1.other(), c2).0 - pay(c1, c2).0;
            let gain2 = pay(c1, c2.other()).1 - pay(c1, c2).1;
            if gain1 <= tie_tolerance && gain2 <= tie_tolerance {
                equilibria.push(NashProfile {
                    firm1: c1,
                    firm2: c2,
                    weak: gain1.abs() <= tie_tolerance || gain2.abs() <= tie_tolerance,
                });
            }
        }
    }

    let dominant_firm1 = ContractChoice::BOTH.into_iter().find(|&c| {
        ContractChoice::BOTH
            .into_iter()
            .all(|c2| pay(c, c2).0 > pay(c.other(), c2).0 + tie_tolerance)
    });
    let dominant_firm2 = ContractChoice::BOTH.into_iter().find(|&c| {
        ContractChoice::BOTH
            .into_iter()
            .all(|c1| pay(c1, c).1 > pay(c1, c.other()).1 + tie_tolerance)
    });

    NashResult { equilibria, dominant_firm1, dominant_firm2, tie_tolerance }
}

/// Compose [`payoff_matrix`] and [`pure_nash`] and classify the outcome.
pub fn spne_under_uniform_standard(
    s: f64,
    params: &ModelParams,
    participation: Participation,
    cfg: &OracleConfig,
    tie_tolerance: f64,
) -> Result<SpneOutcome, SolveError> {
    let matrix = payoff_matrix(s, params, participation, cfg, tie_tolerance)?;
    let nash = pure_nash(&matrix, tie_tolerance);

    use ContractChoice::{Price, Quantity};
    let profiles: Vec<(ContractChoice, ContractChoice)> =
        nash.equilibria.iter().map(|e| (e.firm1, e.firm2)).collect();
    let pattern = if profiles == [(Quantity, Quantity)] {
        SpnePattern::UniqueQuantityQuantity
    } else if profiles.len() == 2
        && profiles.contains(&(Price, Quantity))
        && profiles.contains(&(Quantity, Price))
    {
        SpnePattern::MixedContractPair
    } else {
        SpnePattern::Other
    };

    Ok(SpneOutcome { matrix, nash, pattern })
}
