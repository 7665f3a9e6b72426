//! Closed-form third-stage equilibria for every regime.
//!
//! Quantities and prices come from the exact solution of each game's
//! first-order conditions; profits and net consumer surplus are always
//! recomputed from the market point via the model primitives rather than
//! from transcribed aggregate expressions. Symmetric certification is
//! required here; one-sided profiles have no closed form and are solved
//! numerically through [`solve_scenario`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{outcome_unchecked, CertProfile, Equilibrium, ModelParams, Regime};
use crate::oracle::{self, OracleConfig, OracleError};

#[derive(Debug, Error, PartialEq, Clone)]
pub enum ClosedFormError {
    #[error("no closed form for one-sided certification in {regime}; use solve_scenario")]
    MixedCertification { regime: Regime },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A regime together with the certification profile it is solved under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioKey {
    pub regime: Regime,
    pub e1: bool,
    pub e2: bool,
    pub s: f64,
}

impl ScenarioKey {
    pub fn new(regime: Regime, cert: &CertProfile) -> Self {
        Self { regime, e1: cert.e1, e2: cert.e2, s: cert.s }
    }
}

impl std::fmt::Display for ScenarioKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match (self.e1, self.e2) {
            (false, false) => "N".to_string(),
            (true, true) => "C".to_string(),
            (true, false) => "C1".to_string(),
            (false, true) => "C2".to_string(),
        };
        write!(f, "{}{}", self.regime, tag)?;
        if self.e1 || self.e2 {
            write!(f, "(s={})", self.s)?;
        }
        Ok(())
    }
}

fn require_symmetric(regime: Regime, cert: &CertProfile) -> Result<(), ClosedFormError> {
    if cert.symmetric() {
        Ok(())
    } else {
        Err(ClosedFormError::MixedCertification { regime })
    }
}

/// Effective intercept: `A + alpha s` when both firms certify, else `A`.
fn effective_a(cert: &CertProfile, params: &ModelParams) -> f64 {
    if cert.e1 {
        params.a() + params.alpha() * cert.s
    } else {
        params.a()
    }
}

/// Bertrand equilibrium (both firms set prices).
///
/// `q_i = A'/(2 + g - g^2)`, `p_i = (1 - g) A'/(2 - g)` with `A' = A + alpha s`
/// under certification.
pub fn solve_pp(cert: &CertProfile, params: &ModelParams) -> Result<Equilibrium, ClosedFormError> {
    require_symmetric(Regime::Pp, cert)?;
    let g = params.gamma();
    let a = effective_a(cert, params);
    let q = a / (2.0 + g - g * g);
    let p = (1.0 - g) * a / (2.0 - g);
    Ok(outcome_unchecked(q, q, p, p, cert, params))
}

/// Cournot equilibrium (both firms set quantities): `q_i = p_i = A'/(2 + g)`.
pub fn solve_qq(cert: &CertProfile, params: &ModelParams) -> Result<Equilibrium, ClosedFormError> {
    require_symmetric(Regime::Qq, cert)?;
    let g = params.gamma();
    let a = effective_a(cert, params);
    let q = a / (2.0 + g);
    Ok(outcome_unchecked(q, q, p_eq_q(q), p_eq_q(q), cert, params))
}

fn p_eq_q(q: f64) -> f64 {
    q
}

/// Mixed game: firm 1 sets its price, firm 2 its quantity.
///
/// With `c1 = 2 - g - g^2`, `c2 = 2 - g` and `D = 4 - 3 g^2`:
/// `q1 = p1 = c1 A'/D`, `q2 = c2 A'/D`, `p2 = c2 (1 - g^2) A'/D`.
pub fn solve_pq(cert: &CertProfile, params: &ModelParams) -> Result<Equilibrium, ClosedFormError> {
    require_symmetric(Regime::Pq, cert)?;
    let g = params.gamma();
    let a = effective_a(cert, params);
    let c1 = 2.0 - g - g * g;
    let c2 = 2.0 - g;
    let d = 4.0 - 3.0 * g * g;
    let q1 = c1 * a / d;
    let q2 = c2 * a / d;
    let p1 = q1;
    let p2 = c2 * (1.0 - g * g) * a / d;
    Ok(outcome_unchecked(q1, q2, p1, p2, cert, params))
}

/// Mirror of [`solve_pq`] with the firm indices exchanged.
pub fn solve_qp(cert: &CertProfile, params: &ModelParams) -> Result<Equilibrium, ClosedFormError> {
    require_symmetric(Regime::Qp, cert)?;
    let mirrored = solve_pq(&cert.swapped(), params)
        .map_err(|_| ClosedFormError::MixedCertification { regime: Regime::Qp })?;
    Ok(mirrored.swapped())
}

/// Closed form for any regime under a symmetric certification profile.
pub fn solve_symmetric(
    regime: Regime,
    cert: &CertProfile,
    params: &ModelParams,
) -> Result<Equilibrium, ClosedFormError> {
    match regime {
        Regime::Pp => solve_pp(cert, params),
        Regime::Qq => solve_qq(cert, params),
        Regime::Pq => solve_pq(cert, params),
        Regime::Qp => solve_qp(cert, params),
    }
}

/// One interface over all certification profiles: closed forms where they
/// exist (symmetric certification), the numeric fixed point otherwise.
pub fn solve_scenario(
    regime: Regime,
    cert: &CertProfile,
    params: &ModelParams,
    cfg: &OracleConfig,
) -> Result<Equilibrium, SolveError> {
    if cert.symmetric() {
        Ok(solve_symmetric(regime, cert, params)?)
    } else {
        Ok(oracle::nash_fixed_point(regime, cert, params, cfg)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn canonical() -> ModelParams {
        ModelParams::new(1.0, 0.5, 0.5, 1.0).unwrap()
    }

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn pp_no_cert_canonical() {
        let eq = solve_pp(&CertProfile::none(), &canonical()).unwrap();
        assert!(close(eq.q1, 4.0 / 9.0, 1e-12));
        assert!(close(eq.p1, 1.0 / 3.0, 1e-12));
        assert!(close(eq.pi1, 4.0 / 27.0, 1e-12));
        assert!(close(eq.ncs, -0.5 / 5.0625, 1e-12));
        assert!(eq.admissible);
    }

    #[test]
    fn pp_certified_canonical() {
        let cert = CertProfile::both(0.1).unwrap();
        let eq = solve_pp(&cert, &canonical()).unwrap();
        assert!(close(eq.q1, 1.05 / 2.25, 1e-12));
        assert!(close(eq.p1, 0.35, 1e-12));
        assert!(close(eq.pi1, 0.35 * 1.05 / 2.25 - 0.01, 1e-12));
        assert!(close(eq.pi1, 0.153333333333, 1e-9));
    }

    #[test]
    fn pp_gamma_to_zero_is_independent_monopolies() {
        let p = ModelParams::new(1.0, 0.5, 1e-9, 1.0).unwrap();
        let eq = solve_pp(&CertProfile::none(), &p).unwrap();
        assert!(close(eq.q1, 0.5, 1e-8));
        assert!(close(eq.p1, 0.5, 1e-8));
    }

    #[test]
    fn qq_no_cert_canonical() {
        let eq = solve_qq(&CertProfile::none(), &canonical()).unwrap();
        assert!(close(eq.q1, 0.4, 1e-12));
        assert!(close(eq.p1, 0.4, 1e-12));
        assert!(close(eq.pi1, 0.16, 1e-12));
        assert!(close(eq.ncs, -0.08, 1e-12));
    }

    #[test]
    fn qq_certified_canonical() {
        let cert = CertProfile::both(0.1).unwrap();
        let eq = solve_qq(&cert, &canonical()).unwrap();
        assert!(close(eq.q1, 0.42, 1e-12));
        assert!(close(eq.p1, 0.42, 1e-12));
        assert!(close(eq.pi1, 0.1664, 1e-12));
        assert!(close(eq.ncs, 0.0598, 1e-12));
    }

    #[test]
    fn zero_standard_degenerates_to_no_cert() {
        let p = canonical();
        let cert0 = CertProfile::both(0.0).unwrap();
        for regime in Regime::ALL {
            let c = solve_symmetric(regime, &cert0, &p).unwrap();
            let n = solve_symmetric(regime, &CertProfile::none(), &p).unwrap();
            assert!(c.max_abs_diff(&n) < 1e-14, "{regime}");
        }
    }

    #[test]
    fn pq_no_cert_canonical() {
        let eq = solve_pq(&CertProfile::none(), &canonical()).unwrap();
        assert!(close(eq.q1, 1.25 / 3.25, 1e-12));
        assert!(close(eq.q2, 1.5 / 3.25, 1e-12));
        assert!(close(eq.p1, 1.25 / 3.25, 1e-12));
        assert!(close(eq.p2, 1.125 / 3.25, 1e-12));
        assert!(close(eq.pi1, 25.0 / 169.0, 1e-12));
        assert!(close(eq.pi2, 27.0 / 169.0, 1e-12));
    }

    #[test]
    fn pq_certified_canonical() {
        let cert = CertProfile::both(0.1).unwrap();
        let eq = solve_pq(&cert, &canonical()).unwrap();
        assert!(close(eq.q1, 0.403846153846, 1e-9));
        assert!(close(eq.q2, 0.484615384615, 1e-9));
        assert!(close(eq.p2, 0.363461538462, 1e-9));
        assert!(close(eq.pi1, 0.153091715976, 1e-9));
        assert!(close(eq.pi2, 0.166139053254, 1e-9));
    }

    #[test]
    fn qp_mirrors_pq_canonical() {
        let p = canonical();
        let eq = solve_qp(&CertProfile::none(), &p).unwrap();
        assert!(close(eq.pi1, 27.0 / 169.0, 1e-12));
        assert!(close(eq.pi2, 25.0 / 169.0, 1e-12));
        let cert = CertProfile::both(0.1).unwrap();
        let eq = solve_qp(&cert, &p).unwrap();
        assert!(close(eq.pi1, 0.166139053254, 1e-9));
        assert!(close(eq.pi2, 0.153091715976, 1e-9));
    }

    #[test]
    fn mixed_cert_is_rejected_by_closed_forms() {
        let p = canonical();
        let one = CertProfile::only(crate::model::Firm::One, 0.1).unwrap();
        assert!(solve_pp(&one, &p).is_err());
        assert!(solve_qq(&one, &p).is_err());
        assert!(solve_pq(&one, &p).is_err());
        assert!(solve_qp(&one, &p).is_err());
    }

    fn arb_params() -> impl Strategy<Value = ModelParams> {
        (0.5f64..2.0, 0.05f64..0.95, 0.05f64..0.95, 0.1f64..3.0)
            .prop_map(|(a, alpha, gamma, d)| ModelParams::new(a, alpha, gamma, d).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        // the quantity setter out-produces and out-earns the price setter
        // in the mixed game, certified or not
        #[test]
        fn pq_quantity_setter_advantage(params in arb_params(), frac in 0.0f64..0.9) {
            let s = frac * params.a() / 4.0;
            let cert = if s > 0.0 { CertProfile::both(s).unwrap() } else { CertProfile::none() };
            let eq = solve_pq(&cert, &params).unwrap();
            prop_assert!(eq.q2 > eq.q1);
            prop_assert!(eq.pi2 > eq.pi1);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        // mirror identity between the two mixed games
        #[test]
        fn qp_is_pq_mirrored(params in arb_params(), frac in 0.0f64..0.9) {
            let s = frac * params.a() / 4.0;
            let cert = if s > 0.0 { CertProfile::both(s).unwrap() } else { CertProfile::none() };
            let pq = solve_pq(&cert.swapped(), &params).unwrap();
            let qp = solve_qp(&cert, &params).unwrap();
            prop_assert!(qp.max_abs_diff(&pq.swapped()) < 1e-14);
        }

        // symmetric regimes give symmetric outcomes, exactly
        #[test]
        fn symmetric_regimes_are_symmetric(params in arb_params(), frac in 0.0f64..0.9) {
            let s = frac * params.a() / 4.0;
            let cert = if s > 0.0 { CertProfile::both(s).unwrap() } else { CertProfile::none() };
            for solver in [solve_pp, solve_qq] {
                let eq = solver(&cert, &params).unwrap();
                prop_assert_eq!(eq.q1, eq.q2);
                prop_assert_eq!(eq.p1, eq.p2);
                prop_assert_eq!(eq.pi1, eq.pi2);
            }
        }
    }
}
