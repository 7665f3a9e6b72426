//! Model primitives for a differentiated duopoly with certified
//! environmental spending.
//!
//! Two firms sell substitute goods to a representative consumer whose
//! willingness to pay for firm `i`'s good rises by `alpha * s` when the
//! firm holds the certification. Production is costless and one unit of
//! output emits one unit of pollution; certified spending `s` abates
//! emissions one-for-one and costs the firm `s^2`. The certifier's
//! objective is net consumer surplus: consumer surplus minus quadratic
//! environmental damage.
//!
//! Everything downstream (closed forms, the numeric oracle, standards,
//! the contract game) is built on the functions in this module.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for equality assertions on quantities scaled by
/// `A = O(1)`. Callers should normalize `A` near 1 for best conditioning.
pub const EQ_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum ModelError {
    #[error("A out of (0, inf): {0}")]
    InterceptOutOfRange(f64),
    #[error("alpha out of (0,1): {0}")]
    AlphaOutOfRange(f64),
    #[error("gamma out of (0,1): {0}")]
    GammaOutOfRange(f64),
    #[error("d out of (0, inf): {0}")]
    DamageOutOfRange(f64),
    #[error("negative quantity: {0}")]
    NegativeQuantity(f64),
    #[error("negative price: {0}")]
    NegativePrice(f64),
    #[error("certification standard out of [0, inf): {0}")]
    StandardOutOfRange(f64),
}

/// The exogenous quadruple defining one economy.
///
/// `a` is the demand intercept, `alpha` the consumer's taste for certified
/// spending, `gamma` the degree of substitutability between the two goods,
/// and `d` the marginal environmental damage from net emissions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    #[serde(rename = "A")]
    a: f64,
    alpha: f64,
    gamma: f64,
    d: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(rename = "A")]
    a: f64,
    alpha: f64,
    gamma: f64,
    d: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = ModelError;
    fn try_from(raw: RawParams) -> Result<Self, ModelError> {
        ModelParams::new(raw.a, raw.alpha, raw.gamma, raw.d)
    }
}

impl ModelParams {
    pub fn new(a: f64, alpha: f64, gamma: f64, d: f64) -> Result<Self, ModelError> {
        if !(a.is_finite() && a > 0.0) {
            return Err(ModelError::InterceptOutOfRange(a));
        }
        if !(alpha.is_finite() && 0.0 < alpha && alpha < 1.0) {
            return Err(ModelError::AlphaOutOfRange(alpha));
        }
        if !(gamma.is_finite() && 0.0 < gamma && gamma < 1.0) {
            return Err(ModelError::GammaOutOfRange(gamma));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(ModelError::DamageOutOfRange(d));
        }
        Ok(Self { a, alpha, gamma, d })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn d(&self) -> f64 {
        self.d
    }
}

/// One of the two firms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Firm {
    One,
    Two,
}

impl Firm {
    pub fn other(self) -> Firm {
        match self {
            Firm::One => Firm::Two,
            Firm::Two => Firm::One,
        }
    }
}

/// Which variable a firm commits to in the product market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyVar {
    Price,
    Quantity,
}

/// The pair of strategic variables: firm 1's then firm 2's.
///
/// `Pp` is Bertrand, `Qq` is Cournot, `Pq`/`Qp` are the mixed games. `Qp`
/// outcomes equal `Pq` outcomes with the firm indices swapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "PP")]
    Pp,
    #[serde(rename = "QQ")]
    Qq,
    #[serde(rename = "PQ")]
    Pq,
    #[serde(rename = "QP")]
    Qp,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::Pp, Regime::Qq, Regime::Pq, Regime::Qp];

    pub fn var(self, firm: Firm) -> StrategyVar {
        use StrategyVar::{Price, Quantity};
        match (self, firm) {
            (Regime::Pp, _) => Price,
            (Regime::Qq, _) => Quantity,
            (Regime::Pq, Firm::One) | (Regime::Qp, Firm::Two) => Price,
            (Regime::Pq, Firm::Two) | (Regime::Qp, Firm::One) => Quantity,
        }
    }

    /// The regime seen when the firm labels are exchanged.
    pub fn mirrored(self) -> Regime {
        match self {
            Regime::Pq => Regime::Qp,
            Regime::Qp => Regime::Pq,
            sym => sym,
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Pp => "PP",
            Regime::Qq => "QQ",
            Regime::Pq => "PQ",
            Regime::Qp => "QP",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Regime {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "PP" => Ok(Regime::Pp),
            "QQ" => Ok(Regime::Qq),
            "PQ" => Ok(Regime::Pq),
            "QP" => Ok(Regime::Qp),
            other => Err(format!("unknown regime: {other}")),
        }
    }
}

/// Which firms hold the certification, and the standard they must meet.
///
/// When neither firm is certified, `s` is ignored by every downstream
/// formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertProfile {
    pub e1: bool,
    pub e2: bool,
    pub s: f64,
}

impl CertProfile {
    pub fn new(e1: bool, e2: bool, s: f64) -> Result<Self, ModelError> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(ModelError::StandardOutOfRange(s));
        }
        Ok(Self { e1, e2, s })
    }

    pub fn none() -> Self {
        Self { e1: false, e2: false, s: 0.0 }
    }

    pub fn both(s: f64) -> Result<Self, ModelError> {
        Self::new(true, true, s)
    }

    pub fn only(firm: Firm, s: f64) -> Result<Self, ModelError> {
        match firm {
            Firm::One => Self::new(true, false, s),
            Firm::Two => Self::new(false, true, s),
        }
    }

    pub fn certified(&self, firm: Firm) -> bool {
        match firm {
            Firm::One => self.e1,
            Firm::Two => self.e2,
        }
    }

    /// Indicator as a number: 1.0 when the firm is certified, else 0.0.
    pub fn e(&self, firm: Firm) -> f64 {
        if self.certified(firm) {
            1.0
        } else {
            0.0
        }
    }

    pub fn symmetric(&self) -> bool {
        self.e1 == self.e2
    }

    /// Effective demand intercept for the firm: `A + alpha * s` when
    /// certified, plain `A` otherwise.
    pub fn intercept(&self, firm: Firm, params: &ModelParams) -> f64 {
        params.a() + params.alpha() * self.s * self.e(firm)
    }

    /// A firm's fixed certification cost, `s^2` when certified.
    pub fn fixed_cost(&self, firm: Firm) -> f64 {
        self.e(firm) * self.s * self.s
    }

    /// The profile with the firm labels exchanged.
    pub fn swapped(&self) -> CertProfile {
        CertProfile { e1: self.e2, e2: self.e1, s: self.s }
    }
}

/// A third-stage market outcome with all derived aggregates filled in.
///
/// `emissions` is the net level `q1 + q2 - e1*s - e2*s`; `ncs` is consumer
/// surplus net of the quadratic damage `d * emissions^2 / 2`. `admissible`
/// records whether the outcome is interior (all quantities and prices
/// strictly positive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Equilibrium {
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
    pub pi1: f64,
    pub pi2: f64,
    pub cs: f64,
    pub emissions: f64,
    pub ncs: f64,
    pub admissible: bool,
}

impl Equilibrium {
    pub fn quantity(&self, firm: Firm) -> f64 {
        match firm {
            Firm::One => self.q1,
            Firm::Two => self.q2,
        }
    }

    pub fn price(&self, firm: Firm) -> f64 {
        match firm {
            Firm::One => self.p1,
            Firm::Two => self.p2,
        }
    }

    pub fn profit(&self, firm: Firm) -> f64 {
        match firm {
            Firm::One => self.pi1,
            Firm::Two => self.pi2,
        }
    }

    /// Largest absolute difference across all numeric fields.
    pub fn max_abs_diff(&self, other: &Equilibrium) -> f64 {
        [
            self.q1 - other.q1,
            self.q2 - other.q2,
            self.p1 - other.p1,
            self.p2 - other.p2,
            self.pi1 - other.pi1,
            self.pi2 - other.pi2,
            self.cs - other.cs,
            self.emissions - other.emissions,
            self.ncs - other.ncs,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()))
    }

    /// The same outcome with the firm labels exchanged.
    pub fn swapped(&self) -> Equilibrium {
        Equilibrium {
            q1: self.q2,
            q2: self.q1,
            p1: self.p2,
            p2: self.p1,
            pi1: self.pi2,
            pi2: self.pi1,
            ..*self
        }
    }
}

/// Representative-consumer utility at a quantity bundle.
///
/// `U = (A + e1*alpha*s) q1 + (A + e2*alpha*s) q2 - (q1^2 + 2 gamma q1 q2 + q2^2) / 2`
pub fn utility(
    q1: f64,
    q2: f64,
    cert: &CertProfile,
    params: &ModelParams,
) -> Result<f64, ModelError> {
    if q1 < 0.0 {
        return Err(ModelError::NegativeQuantity(q1));
    }
    if q2 < 0.0 {
        return Err(ModelError::NegativeQuantity(q2));
    }
    let a1 = cert.intercept(Firm::One, params);
    let a2 = cert.intercept(Firm::Two, params);
    let quad = q1 * q1 + 2.0 * params.gamma() * q1 * q2 + q2 * q2;
    Ok(a1 * q1 + a2 * q2 - quad / 2.0)
}

/// Demand at a price pair.
///
/// `q_i = (A(1-gamma) - p_i + gamma p_j + alpha e_i s - alpha gamma e_j s) / (1 - gamma^2)`
///
/// May return negative quantities; the caller decides admissibility.
pub fn demand_from_prices(
    p1: f64,
    p2: f64,
    cert: &CertProfile,
    params: &ModelParams,
) -> (f64, f64) {
    let g = params.gamma();
    let a1 = cert.intercept(Firm::One, params);
    let a2 = cert.intercept(Firm::Two, params);
    let denom = 1.0 - g * g;
    let q1 = (a1 - g * a2 - p1 + g * p2) / denom;
    let q2 = (a2 - g * a1 - p2 + g * p1) / denom;
    (q1, q2)
}

/// Inverse demand at a quantity bundle: `p_i = A - q_i - gamma q_j + alpha e_i s`.
///
/// Prices may be negative for very large quantities; the caller checks.
pub fn inverse_demand(
    q1: f64,
    q2: f64,
    cert: &CertProfile,
    params: &ModelParams,
) -> (f64, f64) {
    let g = params.gamma();
    let p1 = cert.intercept(Firm::One, params) - q1 - g * q2;
    let p2 = cert.intercept(Firm::Two, params) - q2 - g * q1;
    (p1, p2)
}

/// Consumer surplus at a quantity bundle.
pub fn consumer_surplus(q1: f64, q2: f64, params: &ModelParams) -> f64 {
    (q1 * q1 + 2.0 * params.gamma() * q1 * q2 + q2 * q2) / 2.0
}

/// Fill in profits, consumer surplus, net emissions and net consumer
/// surplus for a market point. Rejects negative quantities or prices;
/// solvers that must score infeasible points use [`outcome_unchecked`].
pub fn evaluate_outcome(
    q1: f64,
    q2: f64,
    p1: f64,
    p2: f64,
    cert: &CertProfile,
    params: &ModelParams,
) -> Result<Equilibrium, ModelError> {
    for q in [q1, q2] {
        if q < 0.0 {
            return Err(ModelError::NegativeQuantity(q));
        }
    }
    for p in [p1, p2] {
        if p < 0.0 {
            return Err(ModelError::NegativePrice(p));
        }
    }
    Ok(outcome_unchecked(q1, q2, p1, p2, cert, params))
}

/// [`evaluate_outcome`] without the sign checks. Oracles need unclamped
/// objectives, and grid sweeps flag rather than abort on infeasible points.
pub fn outcome_unchecked(
    q1: f64,
    q2: f64,
    p1: f64,
    p2: f64,
    cert: &CertProfile,
    params: &ModelParams,
) -> Equilibrium {
    let cs = consumer_surplus(q1, q2, params);
    let emissions = q1 + q2 - (cert.e(Firm::One) + cert.e(Firm::Two)) * cert.s;
    let ncs = cs - params.d() * emissions * emissions / 2.0;
    Equilibrium {
        q1,
        q2,
        p1,
        p2,
        pi1: p1 * q1 - cert.fixed_cost(Firm::One),
        pi2: p2 * q2 - cert.fixed_cost(Firm::Two),
        cs,
        emissions,
        ncs,
        admissible: q1 > 0.0 && q2 > 0.0 && p1 > 0.0 && p2 > 0.0,
    }
}

/// Market clearing when each firm commits to one strategic variable.
///
/// Returns `(q1, q2, p1, p2)`. When both choose prices this is
/// [`demand_from_prices`]; when both choose quantities, [`inverse_demand`].
/// In the mixed cases the price setter's quantity comes from its own
/// inverse-demand line given the rival's quantity, and the remaining price
/// clears the other good.
pub fn clear_market(
    var1: StrategyVar,
    x1: f64,
    var2: StrategyVar,
    x2: f64,
    cert: &CertProfile,
    params: &ModelParams,
) -> (f64, f64, f64, f64) {
    use StrategyVar::{Price, Quantity};
    let g = params.gamma();
    match (var1, var2) {
        (Price, Price) => {
            let (q1, q2) = demand_from_prices(x1, x2, cert, params);
            (q1, q2, x1, x2)
        }
        (Quantity, Quantity) => {
            let (p1, p2) = inverse_demand(x1, x2, cert, params);
            (x1, x2, p1, p2)
        }
        (Price, Quantity) => {
            let (p1, q2) = (x1, x2);
            let q1 = cert.intercept(Firm::One, params) - g * q2 - p1;
            let p2 = cert.intercept(Firm::Two, params) - q2 - g * q1;
            (q1, q2, p1, p2)
        }
        (Quantity, Price) => {
            let (q1, p2) = (x1, x2);
            let q2 = cert.intercept(Firm::Two, params) - g * q1 - p2;
            let p1 = cert.intercept(Firm::One, params) - q1 - g * q2;
            (q1, q2, p1, p2)
        }
    }
}
