//! Certification standards: feasibility bounds, adoption thresholds,
//! the certifier's optimal and participation-constrained standards, and
//! the two ranking checks.
//!
//! Every adoption threshold is carried in two modes. `PaperLiteral`
//! evaluates the reference closed-form expression verbatim; `Derived`
//! re-derives the threshold as the positive root of the profit difference
//! via [`oracle::profit_threshold`]. The modes provably coincide for the
//! symmetric regimes. For the mixed game they do not: the literal firm-1
//! threshold is algebraically the feasibility bound (where certified
//! output equals the standard), not the profit-indifference root, and the
//! literal firm-2 threshold does not match the profit difference implied
//! by the mixed-game equilibrium. Neither mode is silently preferred;
//! both are first-class and every comparison downstream is computed under
//! each.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Firm, ModelParams, Regime};
use crate::oracle::{self, OracleConfig, OracleError};

/// Tolerance under which ranking comparisons count as ties and threshold
/// indifference counts as adoption.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// How certification-related quantities are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// The reference closed-form expressions, taken verbatim.
    PaperLiteral,
    /// Re-derived numerically from the model primitives.
    Derived,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::PaperLiteral, Mode::Derived];
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::PaperLiteral => "paper_literal",
            Mode::Derived => "derived",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper_literal" | "paper-literal" | "literal" => Ok(Mode::PaperLiteral),
            "derived" => Ok(Mode::Derived),
            other => Err(format!("unknown mode: {other}")),
        }
    }
}

/// A value computed under both evaluation modes, side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModePair<T> {
    pub paper_literal: T,
    pub derived: T,
}

impl<T: Copy> ModePair<T> {
    pub fn get(&self, mode: Mode) -> T {
        match mode {
            Mode::PaperLiteral => self.paper_literal,
            Mode::Derived => self.derived,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StandardsError {
    #[error("infeasible parameterization: {what} denominator {denom} is not positive")]
    NonPositiveDenominator { what: &'static str, denom: f64 },
    #[error("formula pole: {what} denominator {denom} is within 1e-6 of zero")]
    Pole { what: &'static str, denom: f64 },
    #[error("optimal standard for {regime} undefined: d = {d} does not exceed the damage bound {bound}")]
    BelowDamageBound { regime: Regime, d: f64, bound: f64 },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

fn guard_denominator(what: &'static str, denom: f64) -> Result<f64, StandardsError> {
    if denom <= 0.0 {
        Err(StandardsError::NonPositiveDenominator { what, denom })
    } else {
        Ok(denom)
    }
}

/// The standard at which a firm's certified output equals its spending
/// (`q_i^C(s) = s`); beyond it the firm's net emissions would go negative.
pub fn feasibility_bound(
    regime: Regime,
    firm: Firm,
    params: &ModelParams,
) -> Result<f64, StandardsError> {
    let (a, al, g) = (params.a(), params.alpha(), params.gamma());
    match (regime, firm) {
        (Regime::Pp, _) => {
            let denom = guard_denominator("feas_pp", 2.0 - al + g - g * g)?;
            Ok(a / denom)
        }
        (Regime::Qq, _) => {
            let denom = guard_denominator("feas_qq", 2.0 - al + g)?;
            Ok(a / denom)
        }
        (Regime::Pq, Firm::One) | (Regime::Qp, Firm::Two) => {
            let denom =
                guard_denominator("feas_pq1", 4.0 - 2.0 * al + al * g - 3.0 * g * g + al * g * g)?;
            Ok(a * (2.0 - g - g * g) / denom)
        }
        (Regime::Pq, Firm::Two) | (Regime::Qp, Firm::One) => {
            let denom = guard_denominator("feas_pq2", 4.0 - 2.0 * al + al * g - 3.0 * g * g)?;
            Ok(a * (2.0 - g) / denom)
        }
    }
}

fn literal_threshold(
    regime: Regime,
    firm: Firm,
    params: &ModelParams,
) -> Result<f64, StandardsError> {
    let (a, al, g) = (params.a(), params.alpha(), params.gamma());
    match (regime, firm) {
        (Regime::Pp, _) => {
            let denom = guard_denominator(
                "u_pp",
                4.0 - al * al + al * al * g - 3.0 * g * g + g * g * g,
            )?;
            Ok(2.0 * a * al * (1.0 - g) / denom)
        }
        (Regime::Qq, _) => {
            let denom = guard_denominator("u_qq", 4.0 - al * al + 4.0 * g + g * g)?;
            Ok(2.0 * a * al / denom)
        }
        // printed firm-1 bound: identical to the feasibility bound
        (Regime::Pq, Firm::One) | (Regime::Qp, Firm::Two) => {
            feasibility_bound(Regime::Pq, Firm::One, params)
        }
        (Regime::Pq, Firm::Two) | (Regime::Qp, Firm::One) => {
            let c1 = 2.0 - g - g * g;
            let big_d = 4.0 - 3.0 * g * g;
            let denom = guard_denominator("u_pq2", big_d * big_d - al * al * c1 * c1)?;
            Ok(a * al * c1 * c1 / denom)
        }
    }
}

/// The standard at which a firm is indifferent between certifying and not.
///
/// `PaperLiteral` returns the printed formulas verbatim; `Derived` returns
/// the bisection root of the exact profit difference. The two agree for
/// the symmetric regimes and disagree for the mixed game; the disagreement
/// is surfaced, never hidden.
pub fn adoption_threshold(
    regime: Regime,
    firm: Firm,
    params: &ModelParams,
    mode: Mode,
) -> Result<f64, StandardsError> {
    match mode {
        Mode::PaperLiteral => literal_threshold(regime, firm, params),
        Mode::Derived => {
            Ok(oracle::profit_threshold(regime, firm, params, &OracleConfig::default())?)
        }
    }
}

/// Lower bound on the damage parameter under which the optimal standard
/// is positive (equivalently, under which NCS is concave in `s`).
pub fn d_positivity_threshold(regime: Regime, params: &ModelParams) -> f64 {
    let (al, g) = (params.alpha(), params.gamma());
    match regime {
        Regime::Pp => {
            let b = al - (2.0 - g) * (1.0 + g);
            al * al * (1.0 + g) / (2.0 * b * b)
        }
        Regime::Qq => {
            let c = 2.0 - al + g;
            al * al * (1.0 + g) / (2.0 * c * c)
        }
        Regime::Pq | Regime::Qp => {
            let poly = 8.0 - 10.0 * g * g + 3.0 * g.powi(4);
            let w = 8.0 - 6.0 * g * g + al * (-4.0 + g * (2.0 + g));
            al * al * poly / (w * w)
        }
    }
}

/// The unconstrained maximizer of NCS over the standard, from the printed
/// closed form. Defined only when `d` exceeds the positivity bound and the
/// denominator is bounded away from zero.
pub fn optimal_standard(regime: Regime, params: &ModelParams) -> Result<f64, StandardsError> {
    let bound = d_positivity_threshold(regime, params);
    let (a, al, g, d) = (params.a(), params.alpha(), params.gamma(), params.d());
    if d <= bound {
        return Err(StandardsError::BelowDamageBound { regime, d, bound });
    }
    let (what, numer, denom): (&'static str, f64, f64) = match regime {
        Regime::Pp => {
            let b = al - (2.0 - g) * (1.0 + g);
            (
                "opt_pp",
                a * (al + al * g - 2.0 * d * b),
                2.0 * d * b * b - al * al * (1.0 + g),
            )
        }
        Regime::Qq => {
            let c = 2.0 - al + g;
            (
                "opt_qq",
                a * (al + al * g + 2.0 * d * c),
                2.0 * d * c * c - al * al * (1.0 + g),
            )
        }
        Regime::Pq | Regime::Qp => {
            let poly = 8.0 - 10.0 * g * g + 3.0 * g.powi(4);
            let m = -4.0 + g * (2.0 + g);
            let w = 8.0 - 6.0 * g * g + al * m;
            (
                "opt_pq",
                a * (al * poly - d * m * w),
                -al * al * poly + d * w * w,
            )
        }
    };
    if denom.abs() < 1e-6 {
        return Err(StandardsError::Pole { what, denom });
    }
    Ok(numer / denom)
}

/// Result of adopting a candidate uniform standard: who certifies at it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardCandidate {
    pub value: f64,
    pub firm1_adopts: bool,
    pub firm2_adopts: bool,
}

/// The certifier's participation-constrained standard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertifierStandard {
    /// Symmetric regimes: `min(optimal standard, adoption threshold)`.
    Bound { value: f64, threshold_binds: bool },
    /// Mixed game: both candidate standards, one at each firm's threshold,
    /// with the participation each induces.
    Candidates {
        at_firm1_threshold: StandardCandidate,
        at_firm2_threshold: StandardCandidate,
    },
}

/// The standard the certifier actually sets once participation matters.
pub fn equilibrium_standard(
    regime: Regime,
    params: &ModelParams,
    mode: Mode,
) -> Result<CertifierStandard, StandardsError> {
    let bound = d_positivity_threshold(regime, params);
    if params.d() <= bound {
        return Err(StandardsError::BelowDamageBound { regime, d: params.d(), bound });
    }
    match regime {
        Regime::Pp | Regime::Qq => {
            let opt = optimal_standard(regime, params)?;
            let u = adoption_threshold(regime, Firm::One, params, mode)?;
            Ok(CertifierStandard::Bound { value: opt.min(u), threshold_binds: u <= opt })
        }
        Regime::Pq | Regime::Qp => {
            let u1 = adoption_threshold(regime, Firm::One, params, mode)?;
            let u2 = adoption_threshold(regime, Firm::Two, params, mode)?;
            let candidate = |value: f64| StandardCandidate {
                value,
                firm1_adopts: u1 >= value - TIE_TOLERANCE,
                firm2_adopts: u2 >= value - TIE_TOLERANCE,
            };
            Ok(CertifierStandard::Candidates {
                at_firm1_threshold: candidate(u1),
                at_firm2_threshold: candidate(u2),
            })
        }
    }
}

/// A descending ordering of standards with the verdict on the expected
/// ranking. `ties` flags adjacent values within [`TIE_TOLERANCE`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankedOptimal {
    pub order: Vec<(Regime, f64)>,
    pub matches_expected: bool,
    pub ties: bool,
}

/// Optimal standards sorted across regimes; expected ranking PP > PQ > QQ.
pub fn rank_optimal_standards(params: &ModelParams) -> Result<RankedOptimal, StandardsError> {
    let pp = optimal_standard(Regime::Pp, params)?;
    let pq = optimal_standard(Regime::Pq, params)?;
    let qq = optimal_standard(Regime::Qq, params)?;
    let mut order = vec![(Regime::Pp, pp), (Regime::Pq, pq), (Regime::Qq, qq)];
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let ties = order.windows(2).any(|w| (w[0].1 - w[1].1).abs() <= TIE_TOLERANCE);
    Ok(RankedOptimal { matches_expected: pp > pq && pq > qq, ties, order })
}

/// Which adoption threshold a ranked entry refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdKind {
    PqFirm1,
    Qq,
    Pp,
    PqFirm2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankedThresholds {
    pub order: Vec<(ThresholdKind, f64)>,
    pub matches_expected: bool,
    pub ties: bool,
}

/// Adoption thresholds sorted across regimes; expected ranking
/// PQ firm 1 > QQ > PP > PQ firm 2.
pub fn rank_equilibrium_standards(
    params: &ModelParams,
    mode: Mode,
) -> Result<RankedThresholds, StandardsError> {
    let pq1 = adoption_threshold(Regime::Pq, Firm::One, params, mode)?;
    let qq = adoption_threshold(Regime::Qq, Firm::One, params, mode)?;
    let pp = adoption_threshold(Regime::Pp, Firm::One, params, mode)?;
    let pq2 = adoption_threshold(Regime::Pq, Firm::Two, params, mode)?;
    let mut order = vec![
        (ThresholdKind::PqFirm1, pq1),
        (ThresholdKind::Qq, qq),
        (ThresholdKind::Pp, pp),
        (ThresholdKind::PqFirm2, pq2),
    ];
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let ties = order.windows(2).any(|w| (w[0].1 - w[1].1).abs() <= TIE_TOLERANCE);
    Ok(RankedThresholds {
        matches_expected: pq1 > qq && qq > pp && pp > pq2,
        ties,
        order,
    })
}

/// Everything certification-related for one economy, in both modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardsBundle {
    pub params: ModelParams,
    pub feas_pp: f64,
    pub feas_qq: f64,
    pub feas_pq1: f64,
    pub feas_pq2: f64,
    pub u_pp: ModePair<f64>,
    pub u_qq: ModePair<f64>,
    pub u_pq1: ModePair<f64>,
    pub u_pq2: ModePair<f64>,
    pub opt_pp: Option<f64>,
    pub opt_qq: Option<f64>,
    pub opt_pq: Option<f64>,
    pub d_min_pp: f64,
    pub d_min_qq: f64,
    pub d_min_pq: f64,
    pub eq_pp: ModePair<Option<CertifierStandard>>,
    pub eq_qq: ModePair<Option<CertifierStandard>>,
    pub eq_pq: ModePair<Option<CertifierStandard>>,
    pub rank_optimal: Option<RankedOptimal>,
    pub rank_equilibrium: ModePair<RankedThresholds>,
    pub warnings: Vec<String>,
}

impl StandardsBundle {
    pub fn compute(params: &ModelParams) -> Result<Self, StandardsError> {
        let mut warnings = Vec::new();

        let threshold_pair = |regime, firm| -> Result<ModePair<f64>, StandardsError> {
            Ok(ModePair {
                paper_literal: adoption_threshold(regime, firm, params, Mode::PaperLiteral)?,
                derived: adoption_threshold(regime, firm, params, Mode::Derived)?,
            })
        };

        let mut optional = |label: &str, r: Result<f64, StandardsError>| match r {
            Ok(v) => Some(v),
            Err(e) => {
                warnings.push(format!("{label}: {e}"));
                None
            }
        };
        let opt_pp = optional("opt_pp", optimal_standard(Regime::Pp, params));
        let opt_qq = optional("opt_qq", optimal_standard(Regime::Qq, params));
        let opt_pq = optional("opt_pq", optimal_standard(Regime::Pq, params));

        let mut eq_std = |label: &str, regime, mode| match equilibrium_standard(regime, params, mode)
        {
            Ok(v) => Some(v),
            Err(e) => {
                warnings.push(format!("{label} ({mode}): {e}"));
                None
            }
        };
        let eq_pp = ModePair {
            paper_literal: eq_std("eq_pp", Regime::Pp, Mode::PaperLiteral),
            derived: eq_std("eq_pp", Regime::Pp, Mode::Derived),
        };
        let eq_qq = ModePair {
            paper_literal: eq_std("eq_qq", Regime::Qq, Mode::PaperLiteral),
            derived: eq_std("eq_qq", Regime::Qq, Mode::Derived),
        };
        let eq_pq = ModePair {
            paper_literal: eq_std("eq_pq", Regime::Pq, Mode::PaperLiteral),
            derived: eq_std("eq_pq", Regime::Pq, Mode::Derived),
        };

        let rank_optimal = match rank_optimal_standards(params) {
            Ok(r) => Some(r),
            Err(e) => {
                warnings.push(format!("rank_optimal: {e}"));
                None
            }
        };

        Ok(StandardsBundle {
            params: *params,
            feas_pp: feasibility_bound(Regime::Pp, Firm::One, params)?,
            feas_qq: feasibility_bound(Regime::Qq, Firm::One, params)?,
            feas_pq1: feasibility_bound(Regime::Pq, Firm::One, params)?,
            feas_pq2: feasibility_bound(Regime::Pq, Firm::Two, params)?,
            u_pp: threshold_pair(Regime::Pp, Firm::One)?,
            u_qq: threshold_pair(Regime::Qq, Firm::One)?,
            u_pq1: threshold_pair(Regime::Pq, Firm::One)?,
            u_pq2: threshold_pair(Regime::Pq, Firm::Two)?,
            opt_pp,
            opt_qq,
            opt_pq,
            d_min_pp: d_positivity_threshold(Regime::Pp, params),
            d_min_qq: d_positivity_threshold(Regime::Qq, params),
            d_min_pq: d_positivity_threshold(Regime::Pq, params),
            eq_pp,
            eq_qq,
            eq_pq,
            rank_optimal,
            rank_equilibrium: ModePair {
                paper_literal: rank_equilibrium_standards(params, Mode::PaperLiteral)?,
                derived: rank_equilibrium_standards(params, Mode::Derived)?,
            },
            warnings,
        })
    }
}
