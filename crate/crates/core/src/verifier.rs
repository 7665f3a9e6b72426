//! Grid scans that confirm or refute each numbered claim of the model,
//! producing machine-readable validity reports.
//!
//! A claim's defining inequalities are always evaluated on outcomes
//! recomputed from the model primitives; the evaluation mode only selects
//! which standard values (literal formulas or derived roots) are plugged
//! in. Claims whose statement carries a damage-parameter hypothesis are
//! tested on the qualifying sub-grid, and separately on its complement to
//! map behavior below the bound.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closed_form::solve_pq;
use crate::game::{self, Participation, SpnePattern};
use crate::model::{CertProfile, Firm, ModelError, ModelParams, Regime};
use crate::oracle::OracleConfig;
use crate::standards::{
    self, adoption_threshold, d_positivity_threshold, feasibility_bound, optimal_standard, Mode,
};

#[derive(Debug, Error, PartialEq, Clone)]
pub enum VerifyError {
    #[error("empty grid")]
    EmptyGrid,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A rectangular parameter grid; `a` is held fixed across points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamGrid {
    #[serde(rename = "A")]
    pub a: f64,
    pub alphas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub ds: Vec<f64>,
}

impl Default for ParamGrid {
    /// The default audit grid: `A = 1`, `alpha` 0.1..0.9 step 0.1,
    /// `gamma` 0.05..0.95 step 0.05, `d` 0.1..3.0 step 0.1.
    fn default() -> Self {
        Self {
            a: 1.0,
            alphas: (1..=9).map(|i| i as f64 / 10.0).collect(),
            gammas: (1..=19).map(|i| i as f64 * 0.05).collect(),
            ds: (1..=30).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

impl ParamGrid {
    pub fn len(&self) -> usize {
        self.alphas.len() * self.gammas.len() * self.ds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points, ordered by (alpha, gamma, d) ascending in generation
    /// order. Construction validates every point.
    pub fn points(&self) -> Result<Vec<ModelParams>, VerifyError> {
        if self.is_empty() {
            return Err(VerifyError::EmptyGrid);
        }
        let mut points = Vec::with_capacity(self.len());
        for &alpha in &self.alphas {
            for &gamma in &self.gammas {
                for &d in &self.ds {
                    points.push(ModelParams::new(self.a, alpha, gamma, d)?);
                }
            }
        }
        Ok(points)
    }
}

/// The claim catalog. Each variant names one numbered claim or inline
/// universal assertion of the model; `describe` states the inequality the
/// verifier actually evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClaimId {
    /// In the mixed game the price setter's adoption threshold exceeds the
    /// quantity setter's.
    #[serde(rename = "lemma1")]
    Lemma1,
    /// Without certification, quantity contracts are strictly dominant and
    /// {Q,Q} is the unique equilibrium.
    #[serde(rename = "lemma2")]
    Lemma2,
    /// In the symmetric regimes the certifier's optimum exceeds the
    /// adoption threshold, so the threshold binds.
    #[serde(rename = "prop1")]
    Prop1,
    /// In the mixed game the certifier's optimum exceeds both adoption
    /// thresholds.
    #[serde(rename = "prop2a")]
    Prop2a,
    /// At the firm-1 threshold standard, only the price setter certifies.
    #[serde(rename = "prop2b")]
    Prop2b,
    /// At the firm-2 threshold standard, both firms certify and both firms
    /// and consumers gain.
    #[serde(rename = "prop2c")]
    Prop2c,
    /// Optimal standards rank PP > PQ > QQ.
    #[serde(rename = "prop3")]
    Prop3,
    /// Adoption thresholds rank PQ1 > QQ > PP > PQ2.
    #[serde(rename = "prop4")]
    Prop4,
    /// At each of the three lower uniform standards the contract game has
    /// the unique equilibrium {Q,Q}.
    #[serde(rename = "prop5a")]
    Prop5a,
    /// At the highest uniform standard the contract game has exactly the
    /// two mixed equilibria.
    #[serde(rename = "prop5b")]
    Prop5b,
    /// Bertrand: the standard is set below the optimum and it benefits
    /// firms and consumers.
    #[serde(rename = "propa1")]
    PropA1,
    /// Cournot analog of `PropA1`.
    #[serde(rename = "propa2")]
    PropA2,
    /// The quantity setter out-produces the price setter in the mixed game.
    #[serde(rename = "pq-quantity-advantage")]
    PqQuantityAdvantage,
    /// The quantity setter out-earns the price setter in the mixed game.
    #[serde(rename = "pq-profit-advantage")]
    PqProfitAdvantage,
}

impl ClaimId {
    pub const ALL: [ClaimId; 14] = [
        ClaimId::Lemma1,
        ClaimId::Lemma2,
        ClaimId::Prop1,
        ClaimId::Prop2a,
        ClaimId::Prop2b,
        ClaimId::Prop2c,
        ClaimId::Prop3,
        ClaimId::Prop4,
        ClaimId::Prop5a,
        ClaimId::Prop5b,
        ClaimId::PropA1,
        ClaimId::PropA2,
        ClaimId::PqQuantityAdvantage,
        ClaimId::PqProfitAdvantage,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            ClaimId::Lemma1 => "lemma1",
            ClaimId::Lemma2 => "lemma2",
            ClaimId::Prop1 => "prop1",
            ClaimId::Prop2a => "prop2a",
            ClaimId::Prop2b => "prop2b",
            ClaimId::Prop2c => "prop2c",
            ClaimId::Prop3 => "prop3",
            ClaimId::Prop4 => "prop4",
            ClaimId::Prop5a => "prop5a",
            ClaimId::Prop5b => "prop5b",
            ClaimId::PropA1 => "propa1",
            ClaimId::PropA2 => "propa2",
            ClaimId::PqQuantityAdvantage => "pq-quantity-advantage",
            ClaimId::PqProfitAdvantage => "pq-profit-advantage",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            ClaimId::Lemma1 => "mixed game: firm-1 adoption threshold > firm-2 adoption threshold",
            ClaimId::Lemma2 => "no certification: {Q,Q} unique with strict dominance",
            ClaimId::Prop1 => "PP and QQ: optimal standard exceeds the adoption threshold",
            ClaimId::Prop2a => "PQ: optimal standard exceeds both adoption thresholds",
            ClaimId::Prop2b => "PQ at firm-1 threshold: only firm 1 certifies",
            ClaimId::Prop2c => "PQ at firm-2 threshold: both certify, firms and consumers gain",
            ClaimId::Prop3 => "optimal standards rank PP > PQ > QQ",
            ClaimId::Prop4 => "adoption thresholds rank PQ1 > QQ > PP > PQ2",
            ClaimId::Prop5a => "three lower uniform standards each give unique {Q,Q}",
            ClaimId::Prop5b => "highest uniform standard gives the two mixed equilibria",
            ClaimId::PropA1 => "PP: threshold binds below optimum and benefits firms and consumers",
            ClaimId::PropA2 => "QQ: threshold binds below optimum and benefits firms and consumers",
            ClaimId::PqQuantityAdvantage => "mixed game: q2 > q1, certified or not",
            ClaimId::PqProfitAdvantage => "mixed game: pi2 > pi1, certified or not",
        }
    }

    /// Lower bound on `d` hypothesized by the claim's statement, when any.
    pub fn d_condition(&self, params: &ModelParams) -> Option<f64> {
        let pp = || d_positivity_threshold(Regime::Pp, params);
        let qq = || d_positivity_threshold(Regime::Qq, params);
        let pq = || d_positivity_threshold(Regime::Pq, params);
        match self {
            ClaimId::Prop1 => Some(pp().max(qq())),
            ClaimId::Prop2a | ClaimId::Prop2b | ClaimId::Prop2c => Some(pq()),
            ClaimId::Prop3 => Some(pp().max(qq()).max(pq())),
            ClaimId::PropA1 => Some(pp()),
            ClaimId::PropA2 => Some(qq()),
            _ => None,
        }
    }
}

impl std::str::FromStr for ClaimId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ClaimId::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| format!("unknown claim: {s}"))
    }
}

impl std::fmt::Display for ClaimId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Which part of the grid a report covers relative to the claim's
/// d-hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subset {
    #[serde(rename = "full")]
    Full,
    #[serde(rename = "d-above-bound")]
    DAboveBound,
    #[serde(rename = "d-below-bound")]
    DBelowBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClaimStatus {
    #[serde(rename = "holds-everywhere")]
    HoldsEverywhere,
    #[serde(rename = "holds-on-region")]
    HoldsOnRegion,
    #[serde(rename = "fails-everywhere")]
    FailsEverywhere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counterexample {
    pub params: ModelParams,
    pub values: BTreeMap<String, f64>,
}

/// Axis-aligned bounding box of the failing points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureRegion {
    pub alpha: (f64, f64),
    pub gamma: (f64, f64),
    pub d: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimReport {
    pub claim: ClaimId,
    pub mode: Mode,
    pub subset: Subset,
    pub grid_points_tested: usize,
    pub excluded_count: usize,
    pub pass_count: usize,
    pub error_count: usize,
    pub pass_fraction: f64,
    pub status: Option<ClaimStatus>,
    pub counterexamples: Vec<Counterexample>,
    pub failure_region: Option<FailureRegion>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Cap on recorded counterexamples (and recorded per-point errors).
    pub max_counterexamples: usize,
    pub tie_tolerance: f64,
    pub oracle: OracleConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_counterexamples: 10,
            tie_tolerance: 1e-9,
            oracle: OracleConfig::default(),
        }
    }
}

/// Result of evaluating one claim at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub enum PointOutcome {
    Pass,
    Fail(BTreeMap<String, f64>),
    Error(String),
}

fn vals<const N: usize>(entries: [(&str, f64); N]) -> BTreeMap<String, f64> {
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

macro_rules! try_point {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return PointOutcome::Error(err.to_string()),
        }
    };
}

/// Evaluate one claim at one parameter point under one mode. The
/// d-hypothesis is not applied here; grid drivers filter by it.
pub fn evaluate_claim_at(
    claim: ClaimId,
    mode: Mode,
    params: &ModelParams,
    cfg: &VerifyConfig,
) -> PointOutcome {
    let tol = cfg.tie_tolerance;
    let thr = |regime, firm| adoption_threshold(regime, firm, params, mode);
    match claim {
        ClaimId::Lemma1 => {
            let u1 = try_point!(thr(Regime::Pq, Firm::One));
            let u2 = try_point!(thr(Regime::Pq, Firm::Two));
            if u1 > u2 {
                PointOutcome::Pass
            } else {
                PointOutcome::Fail(vals([("u_pq1", u1), ("u_pq2", u2)]))
            }
        }
        ClaimId::Lemma2 => {
            let out = try_point!(game::spne_under_uniform_standard(
                0.0,
                params,
                Participation::Literal,
                &cfg.oracle,
                tol
            ));
            let strict = out.nash.dominant_firm1 == Some(game::ContractChoice::Quantity)
                && out.nash.dominant_firm2 == Some(game::ContractChoice::Quantity);
            if out.pattern == SpnePattern::UniqueQuantityQuantity && strict {
                PointOutcome::Pass
            } else {
                PointOutcome::Fail(payoff_values(&out.matrix))
            }
        }
        ClaimId::Prop1 => {
            let opt_pp = try_point!(optimal_standard(Regime::Pp, params));
            let opt_qq = try_point!(optimal_standard(Regime::Qq, params));
            let u_pp = try_point!(thr(Regime::Pp, Firm::One));
            let u_qq = try_point!(thr(Regime::Qq, Firm::One));
            if opt_pp > u_pp && opt_qq > u_qq {
                PointOutcome::Pass
            } else {
                PointOutcome::Fail(vals([
                    ("opt_pp", opt_pp),
                    ("u_pp", u_pp),
                    ("opt_qq", opt_qq),
                    ("u_qq", u_qq),
                ]))
            }
        }
        ClaimId::Prop2a => {
            let opt_pq = try_point!(optimal_standard(Regime::Pq, params));
            let u1 = try_point!(thr(Regime::Pq, Firm::One));
            let u2 = try_point!(thr(Regime::Pq, Firm::Two));
            if opt_pq > u1 && opt_pq > u2 {
                PointOutcome::Pass
            } else {
                PointOutcome::Fail(vals([("opt_pq", opt_pq), ("u_pq1", u1), ("u_pq2", u2)]))
            }
        }
        ClaimId::Prop2b => {
            let s = try_point!(thr(Regime::Pq, Firm::One));
            let out = try_point!(game::participation_equilibrium(
                Regime::Pq, s, params, &cfg.oracle, tol
            ));
            if out.equilibria == vec![(true, false)] {
                PointOutcome::Pass
            } else {
                let mut v = participation_values(&out);
                v.insert("s".to_string(), s);
                PointOutcome::Fail(v)
            }
        }
        ClaimId::Prop2c => {
            let s = try_point!(thr(Regime::Pq, Firm::Two));
            let out = try_point!(game::participation_equilibrium(
                Regime::Pq, s, params, &cfg.oracle, tol
            ));
            let eq_n = try_point!(solve_pq(&CertProfile::none(), params));
            let eq_c = try_point!(solve_pq(&try_point!(CertProfile::both(s)), params));
            let both_certify = out.equilibria == vec![(true, true)];
            let firms_gain =
                eq_c.pi1 >= eq_n.pi1 - tol && eq_c.pi2 >= eq_n.pi2 - tol;
            let consumers_gain = eq_c.ncs > eq_n.ncs;
            if both_certify && firms_gain && consumers_gain {
                PointOutcome::Pass
            } else {
                PointOutcome::Fail(vals([
                    ("s", s),
                    ("pi1_pqc", eq_c.pi1),
                    ("pi1_pqn", eq_n.pi1),
                    ("pi2_pqc", eq_c.pi2),
                    ("pi2_pqn", eq_n.pi2),
                    ("ncs_pqc", eq_c.ncs),
                    ("ncs_pqn", eq_n.ncs),
                ]))
            }
        }
        ClaimId::Prop3 => {
            let ranking = try_point!(standards::rank_optimal_standards(params));
            if ranking.matches_expected {
                PointOutcome::Pass
            } else {
                PointOutcome::Fail(
                    ranking
                        .order
                        .iter()
                        .map(|(r, v)| (format!("opt_{}", r.to_string().to_lowercase()), *v))
                        .collect(),
                )
            }
        }
        ClaimId::Prop4 => {
            let ranking = try_point!(standards::rank_equilibrium_standards(params, mode));
            if ranking.matches_expected {
                PointOutcome::Pass
            } else {
                PointOutcome::Fail(
                    ranking
                        .order
                        .iter()
                        .enumerate()
                        .map(|(i, (k, v))| (format!("rank{}_{:?}", i + 1, k), *v))
                        .collect(),
                )
            }
        }
        ClaimId::Prop5a => {
            let standards_set = [
                ("u_pq2", try_point!(thr(Regime::Pq, Firm::Two))),
                ("u_pp", try_point!(thr(Regime::Pp, Firm::One))),
                ("u_qq", try_point!(thr(Regime::Qq, Firm::One))),
            ];
            for (name, s) in standards_set {
                let out = try_point!(game::spne_under_uniform_standard(
                    s,
                    params,
                    Participation::Literal,
                    &cfg.oracle,
                    tol
                ));
                // the claim's proof route is strict quantity dominance for
                // both firms, which also pins the equilibrium set
                let dominant = out.nash.dominant_firm1 == Some(game::ContractChoice::Quantity)
                    && out.nash.dominant_firm2 == Some(game::ContractChoice::Quantity);
                if out.pattern != SpnePattern::UniqueQuantityQuantity || !dominant {
                    let mut v = payoff_values(&out.matrix);
                    v.insert(format!("s({name})"), s);
                    return PointOutcome::Fail(v);
                }
            }
            PointOutcome::Pass
        }
        ClaimId::Prop5b => {
            let s = try_point!(thr(Regime::Pq, Firm::One));
            let out = try_point!(game::spne_under_uniform_standard(
                s,
                params,
                Participation::Literal,
                &cfg.oracle,
                tol
            ));
            if out.pattern == SpnePattern::MixedContractPair {
                PointOutcome::Pass
            } else {
                use game::ContractChoice::{Price, Quantity};
                PointOutcome::Fail(vals([
                    ("s", s),
                    ("pi1_qqc", out.matrix.payoffs(Quantity, Quantity).0),
                    ("pi1_pqc", out.matrix.payoffs(Price, Quantity).0),
                    ("pi2_qqc", out.matrix.payoffs(Quantity, Quantity).1),
                    ("pi2_qpc", out.matrix.payoffs(Quantity, Price).1),
                ]))
            }
        }
        ClaimId::PropA1 => benefit_claim(Regime::Pp, params, mode, tol),
        ClaimId::PropA2 => benefit_claim(Regime::Qq, params, mode, tol),
        ClaimId::PqQuantityAdvantage => pq_advantage(params, |eq| (eq.q1, eq.q2), "q"),
        ClaimId::PqProfitAdvantage => pq_advantage(params, |eq| (eq.pi1, eq.pi2), "pi"),
    }
}

/// Shared body of the two symmetric-regime benefit claims: the optimum
/// exceeds the threshold, and at the threshold standard both firms and
/// consumers weakly gain (strictly, for consumers).
fn benefit_claim(regime: Regime, params: &ModelParams, mode: Mode, tol: f64) -> PointOutcome {
    let opt = try_point!(optimal_standard(regime, params));
    let u = try_point!(adoption_threshold(regime, Firm::One, params, mode));
    let eq_n = try_point!(crate::closed_form::solve_symmetric(
        regime,
        &CertProfile::none(),
        params
    ));
    let eq_c = try_point!(crate::closed_form::solve_symmetric(
        regime,
        &try_point!(CertProfile::both(u)),
        params
    ));
    let ok = opt > u && eq_c.ncs > eq_n.ncs && eq_c.pi1 >= eq_n.pi1 - tol;
    if ok {
        PointOutcome::Pass
    } else {
        PointOutcome::Fail(vals([
            ("opt", opt),
            ("u", u),
            ("ncs_c", eq_c.ncs),
            ("ncs_n", eq_n.ncs),
            ("pi_c", eq_c.pi1),
            ("pi_n", eq_n.pi1),
        ]))
    }
}

/// Shared body of the two mixed-game advantage claims, checked with and
/// without certification (at half the binding feasibility bound).
fn pq_advantage(
    params: &ModelParams,
    field: impl Fn(&crate::model::Equilibrium) -> (f64, f64),
    label: &str,
) -> PointOutcome {
    let feas1 = try_point!(feasibility_bound(Regime::Pq, Firm::One, params));
    let feas2 = try_point!(feasibility_bound(Regime::Pq, Firm::Two, params));
    let s_mid = 0.5 * feas1.min(feas2);
    let eq_n = try_point!(solve_pq(&CertProfile::none(), params));
    let eq_c = try_point!(solve_pq(&try_point!(CertProfile::both(s_mid)), params));
    let (n1, n2) = field(&eq_n);
    let (c1, c2) = field(&eq_c);
    if n2 > n1 && c2 > c1 {
        PointOutcome::Pass
    } else {
        PointOutcome::Fail(vals([
            ("s", s_mid),
            (&format!("{label}1_n") as &str, n1),
            (&format!("{label}2_n") as &str, n2),
            (&format!("{label}1_c") as &str, c1),
            (&format!("{label}2_c") as &str, c2),
        ]))
    }
}

fn payoff_values(matrix: &game::GameMatrix) -> BTreeMap<String, f64> {
    use game::ContractChoice::{Price, Quantity};
    vals([
        ("pi1_pp", matrix.payoffs(Price, Price).0),
        ("pi2_pp", matrix.payoffs(Price, Price).1),
        ("pi1_pq", matrix.payoffs(Price, Quantity).0),
        ("pi2_pq", matrix.payoffs(Price, Quantity).1),
        ("pi1_qp", matrix.payoffs(Quantity, Price).0),
        ("pi2_qp", matrix.payoffs(Quantity, Price).1),
        ("pi1_qq", matrix.payoffs(Quantity, Quantity).0),
        ("pi2_qq", matrix.payoffs(Quantity, Quantity).1),
    ])
}

fn participation_values(out: &game::ParticipationOutcome) -> BTreeMap<String, f64> {
    let mut v = BTreeMap::new();
    for (e1, e2) in [(false, false), (true, false), (false, true), (true, true)] {
        let (pi1, pi2) = out.profits[e1 as usize][e2 as usize];
        v.insert(format!("pi1_e{}{}", e1 as u8, e2 as u8), pi1);
        v.insert(format!("pi2_e{}{}", e1 as u8, e2 as u8), pi2);
    }
    v.insert("n_equilibria".to_string(), out.equilibria.len() as f64);
    v
}

fn assemble_report(
    claim: ClaimId,
    mode: Mode,
    subset: Subset,
    excluded_count: usize,
    evaluated: Vec<(ModelParams, PointOutcome)>,
    cfg: &VerifyConfig,
) -> ClaimReport {
    let tested = evaluated.len();
    let mut pass_count = 0;
    let mut error_count = 0;
    let mut counterexamples = Vec::new();
    let mut errors = Vec::new();
    let mut region: Option<FailureRegion> = None;

    for (params, outcome) in evaluated {
        match outcome {
            PointOutcome::Pass => pass_count += 1,
            PointOutcome::Error(msg) => {
                error_count += 1;
                if errors.len() < cfg.max_counterexamples {
                    errors.push(format!(
                        "alpha={}, gamma={}, d={}: {msg}",
                        params.alpha(),
                        params.gamma(),
                        params.d()
                    ));
                }
            }
            PointOutcome::Fail(values) => {
                let r = region.get_or_insert(FailureRegion {
                    alpha: (params.alpha(), params.alpha()),
                    gamma: (params.gamma(), params.gamma()),
                    d: (params.d(), params.d()),
                });
                r.alpha = (r.alpha.0.min(params.alpha()), r.alpha.1.max(params.alpha()));
                r.gamma = (r.gamma.0.min(params.gamma()), r.gamma.1.max(params.gamma()));
                r.d = (r.d.0.min(params.d()), r.d.1.max(params.d()));
                if counterexamples.len() < cfg.max_counterexamples {
                    counterexamples.push(Counterexample { params, values });
                }
            }
        }
    }

    let pass_fraction = if tested == 0 { 0.0 } else { pass_count as f64 / tested as f64 };
    let status = if tested == 0 {
        None
    } else if pass_count == tested {
        Some(ClaimStatus::HoldsEverywhere)
    } else if pass_count == 0 {
        Some(ClaimStatus::FailsEverywhere)
    } else {
        Some(ClaimStatus::HoldsOnRegion)
    };

    ClaimReport {
        claim,
        mode,
        subset,
        grid_points_tested: tested,
        excluded_count,
        pass_count,
        error_count,
        pass_fraction,
        status,
        counterexamples,
        failure_region: region,
        errors,
    }
}

fn run_subset(
    claim: ClaimId,
    points: &[ModelParams],
    mode: Mode,
    cfg: &VerifyConfig,
    below_bound: bool,
) -> ClaimReport {
    let qualifies = |p: &ModelParams| match claim.d_condition(p) {
        Some(bound) => (p.d() <= bound) == below_bound,
        None => !below_bound,
    };
    let (selected, excluded): (Vec<ModelParams>, Vec<ModelParams>) =
        points.iter().partition(|p| qualifies(p));
    let evaluated: Vec<(ModelParams, PointOutcome)> = selected
        .par_iter()
        .map(|p| (*p, evaluate_claim_at(claim, mode, p, cfg)))
        .collect();
    let subset = if claim.d_condition(&points[0]).is_some() {
        if below_bound {
            Subset::DBelowBound
        } else {
            Subset::DAboveBound
        }
    } else {
        Subset::Full
    };
    assemble_report(claim, mode, subset, excluded.len(), evaluated, cfg)
}

/// Scan the grid for one claim under one mode, on the sub-grid satisfying
/// the claim's d-hypothesis (the whole grid for unconditioned claims).
pub fn verify_claim(
    claim: ClaimId,
    grid: &ParamGrid,
    mode: Mode,
    cfg: &VerifyConfig,
) -> Result<ClaimReport, VerifyError> {
    let points = grid.points()?;
    Ok(run_subset(claim, &points, mode, cfg, false))
}

/// Run every claim in every requested mode. Conditioned claims also get a
/// complementary report mapping behavior below the d-bound (omitted when
/// that complement is empty). Output ordering is deterministic: claim,
/// then mode, then subset.
pub fn full_report(
    grid: &ParamGrid,
    modes: &[Mode],
    cfg: &VerifyConfig,
) -> Result<Vec<ClaimReport>, VerifyError> {
    full_report_for(&ClaimId::ALL, grid, modes, cfg)
}

/// [`full_report`] restricted to a claim subset.
pub fn full_report_for(
    claims: &[ClaimId],
    grid: &ParamGrid,
    modes: &[Mode],
    cfg: &VerifyConfig,
) -> Result<Vec<ClaimReport>, VerifyError> {
    let points = grid.points()?;
    let mut reports = Vec::new();
    for &claim in claims {
        for &mode in modes {
            reports.push(run_subset(claim, &points, mode, cfg, false));
            let conditioned = points.iter().any(|p| claim.d_condition(p).is_some());
            if conditioned {
                let complement = run_subset(claim, &points, mode, cfg, true);
                if complement.grid_points_tested > 0 {
                    reports.push(complement);
                }
            }
        }
    }
    Ok(reports)
}
