//! Capacity, dispersion, normal approximations, the achievability planner
//! and the converse chain.
//!
//! All information quantities are in bits. Double-exponential message
//! counts are carried as [`LogLayered`] values and never materialized.

use std::f64::consts::{LN_2, LOG2_E};

use serde::{Deserialize, Serialize};

use crate::channel::ChannelSpec;
use crate::error::{domain, Result};
use crate::numerics::{q, q_inverse, Layer, LogLayered};

/// Tag for the additive remainder the normal approximation leaves out.
pub const LOG_N_RESIDUAL: &str = "O(log n)";

/// Above this many bits an integer count is no longer exact in `f64`.
const EXACT_INT_BITS: f64 = 52.0;

/// `C(P) = log2(1+P) / 2`.
pub fn capacity(power: f64) -> Result<f64> {
    if !(power >= 0.0) {
        return domain(format!("capacity needs P >= 0, got {power}"));
    }
    Ok(0.5 * power.ln_1p() * LOG2_E)
}

/// `V(P) = (log2 e)^2 P(P+2) / (2 (P+1)^2)` in bits squared.
pub fn dispersion(power: f64) -> Result<f64> {
    if !(power >= 0.0) {
        return domain(format!("dispersion needs P >= 0, got {power}"));
    }
    let p1 = power + 1.0;
    Ok(LOG2_E * LOG2_E * power * (power + 2.0) / (2.0 * p1 * p1))
}

/// `nC - sqrt(nV) Q^{-1}(eps)`, split into its two terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderEstimate {
    pub n: usize,
    pub power: f64,
    pub eps: f64,
    /// `log2 log2 N` for identification, `log2 M` for transmission.
    pub value: f64,
    pub first_term: f64,
    pub second_term: f64,
    pub layer: Layer,
    pub residual_model: String,
}

impl SecondOrderEstimate {
    /// The approximated code size as a layered quantity.
    pub fn code_size(&self) -> LogLayered {
        LogLayered { layer: self.layer, value: self.value }
    }
}

fn second_order(spec: &ChannelSpec, eps: f64, layer: Layer) -> Result<SecondOrderEstimate> {
    let z = q_inverse(eps)?;
    let n = spec.n() as f64;
    let first_term = n * capacity(spec.power())?;
    let second_term = -(n * dispersion(spec.power())?).sqrt() * z;
    Ok(SecondOrderEstimate {
        n: spec.n(),
        power: spec.power(),
        eps,
        value: first_term + second_term,
        first_term,
        second_term,
        layer,
        residual_model: LOG_N_RESIDUAL.to_string(),
    })
}

/// Normal approximation of `log2 log2 N*(eps, delta)` as `delta -> 0`.
pub fn id_second_order(spec: &ChannelSpec, eps: f64) -> Result<SecondOrderEstimate> {
    second_order(spec, eps, Layer::LogLog)
}

/// Normal approximation of `log2 M*_T(eps)` for transmission.
pub fn transmission_second_order(spec: &ChannelSpec, eps: f64) -> Result<SecondOrderEstimate> {
    second_order(spec, eps, Layer::Log)
}

/// Free parameters of the randomized-identification existence lemma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExistenceParams {
    pub c: f64,
    pub c_prime: f64,
    pub d: f64,
    pub d_prime: f64,
    pub tau: f64,
    pub zeta: f64,
}

/// One checked side condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl ConstraintCheck {
    fn less(name: &str, lhs: f64, rhs: f64) -> Self {
        ConstraintCheck { name: name.into(), holds: lhs < rhs, lhs, rhs }
    }

    fn greater(name: &str, lhs: f64, rhs: f64) -> Self {
        ConstraintCheck { name: name.into(), holds: lhs > rhs, lhs, rhs }
    }
}

impl ExistenceParams {
    /// The choice `c = d = 1 + 2/n`, `c' = d' = n + 2`, `tau = 1/(n+2)`,
    /// `zeta = (1 + log2 2) / log2 n`.
    pub fn for_blocklength(n: usize) -> Self {
        let n = n as f64;
        ExistenceParams {
            c: 1.0 + 2.0 / n,
            c_prime: n + 2.0,
            d: 1.0 + 2.0 / n,
            d_prime: n + 2.0,
            tau: 1.0 / (n + 2.0),
            zeta: 2.0 / n.log2(),
        }
    }

    /// `f = 1 - 1/d - 1/d'`.
    pub fn f(&self) -> f64 {
        1.0 - 1.0 / self.d - 1.0 / self.d_prime
    }

    /// The four standing conditions of the lemma.
    pub fn constraints(&self) -> Vec<ConstraintCheck> {
        let mut out = vec![
            ConstraintCheck::greater(
                "zeta_log_condition",
                self.zeta * (1.0 / self.tau - 1.0).log2(),
                2.0,
            ),
            ConstraintCheck::less("tau_below_one_third", self.tau, 1.0 / 3.0),
            ConstraintCheck::greater("tau_positive", self.tau, 0.0),
            ConstraintCheck::less("zeta_below_one", self.zeta, 1.0),
            ConstraintCheck::greater("zeta_positive", self.zeta, 0.0),
            ConstraintCheck::less("inverse_c_sum_below_one", 1.0 / self.c + 1.0 / self.c_prime, 1.0),
            ConstraintCheck::greater("f_positive", self.f(), 0.0),
        ];
        for (name, v) in [("c", self.c), ("c_prime", self.c_prime), ("d", self.d), ("d_prime", self.d_prime)] {
            out.push(ConstraintCheck::greater(&format!("{name}_positive"), v, 0.0));
        }
        out
    }

    /// `log2 (c' d' ceil(M/f) / K)`, the second summand of the type-II bound.
    pub fn log2_type2_term(&self, m: LogLayered, log2_k: f64) -> Result<f64> {
        let f = self.f();
        let log2_ceil = match m.layer {
            Layer::Linear => (m.value / f).ceil().log2(),
            _ => {
                let log2_m = m.log2()?;
                if log2_m - f.log2() < EXACT_INT_BITS {
                    (log2_m.exp2() / f).ceil().log2()
                } else {
                    log2_m - f.log2()
                }
            }
        };
        Ok((self.c_prime * self.d_prime).log2() + log2_ceil - log2_k)
    }
}

/// `N = floor(e^{tau M} / (M e))` for a codebook size given by its log2.
///
/// Small counts come back on the linear layer with the floor applied;
/// counts beyond 2^52 come back as `log2 log2 N`, where the floor is below
/// `f64` resolution. `None` means `N = 0`.
pub fn existence_message_count(log2_m: f64, tau: f64) -> Option<LogLayered> {
    // ln N = tau M - ln M - 1, natural units throughout
    let ln_m = log2_m * LN_2;
    let ln_tau_m = tau.ln() + ln_m;
    if ln_tau_m < 700.0 {
        let ln_n = ln_tau_m.exp() - ln_m - 1.0;
        if ln_n < EXACT_INT_BITS * LN_2 {
            let count = ln_n.exp().floor();
            return (count >= 1.0).then(|| LogLayered::linear(count));
        }
        return Some(LogLayered::from_loglog2(ln_n.log2() - LN_2.log2()));
    }
    // tau M dominates: ln N = tau M (1 - r), r = (ln M + 1) / (tau M)
    let r = ((ln_m + 1.0).ln() - ln_tau_m).exp();
    let log2_ln_n = ln_tau_m * LOG2_E + (-r).ln_1p() * LOG2_E;
    Some(LogLayered::from_loglog2(log2_ln_n - LN_2.log2()))
}

/// Direct linear evaluation of `floor(e^{tau M} / (M e))`; overflows for
/// large `tau M`.
pub fn existence_message_count_direct(m: f64, tau: f64) -> f64 {
    ((tau * m).exp() / (m * std::f64::consts::E)).floor()
}

/// The full achievability parameter bundle at one blocklength.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AchievabilityPlan {
    pub n: usize,
    pub power: f64,
    pub eps: f64,
    pub berry_esseen_b: f64,
    pub params: ExistenceParams,
    pub f: f64,
    /// `(1+2/n)^{-2} eps - B/sqrt(n)`; must lie in (0,1).
    pub kappa_argument: f64,
    pub kappa: Option<f64>,
    pub log2_k: Option<f64>,
    /// Codebook size `ceil(K/(n+2)^4)`.
    pub m: Option<LogLayered>,
    /// Message count `floor(e^{tau M}/(M e))`.
    pub n_messages: Option<LogLayered>,
    /// `cd * min(1, Q(kappa) + B/sqrt(n))`.
    pub eps_bound: Option<f64>,
    /// `zeta + 2/(n+2)`, valid whenever `K >= (n+2)^4`.
    pub delta_bound: f64,
    /// `zeta + c'd' ceil(M/f) / K` evaluated exactly.
    pub delta_bound_lemma: Option<f64>,
    /// Left side of the feasibility condition, `< 1` required.
    pub feasibility_lhs: Option<f64>,
    pub constraints: Vec<ConstraintCheck>,
    pub feasible: bool,
    pub violated: Vec<String>,
}

impl AchievabilityPlan {
    /// `log2 log2 N`, when `N > 1`.
    pub fn loglog2_n(&self) -> Option<f64> {
        self.n_messages.and_then(|n| n.loglog2().ok())
    }
}

/// Instantiates the existence lemma with the blocklength-dependent parameter
/// choice, using the normal approximation `Q(kappa) + B/sqrt(n)` for
/// `Pr(i(X;Y) <= log K)`.
pub fn plan_achievability(spec: &ChannelSpec, eps: f64, berry_esseen_b: f64) -> Result<AchievabilityPlan> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("eps must lie in (0,1), got {eps}"));
    }
    if !(berry_esseen_b >= 0.0 && berry_esseen_b.is_finite()) {
        return domain(format!("Berry-Esseen constant must be non-negative, got {berry_esseen_b}"));
    }
    let n = spec.n();
    let nf = n as f64;
    let params = ExistenceParams::for_blocklength(n);
    let mut constraints = params.constraints();
    let delta_bound = params.zeta + 2.0 / (nf + 2.0);

    let kappa_argument = eps / (1.0 + 2.0 / nf).powi(2) - berry_esseen_b / nf.sqrt();
    let kappa_ok = kappa_argument > 0.0 && kappa_argument < 1.0;
    constraints.push(ConstraintCheck {
        name: "kappa_argument_in_unit_interval".into(),
        holds: kappa_ok,
        lhs: kappa_argument,
        rhs: 0.0,
    });

    let mut plan = AchievabilityPlan {
        n,
        power: spec.power(),
        eps,
        berry_esseen_b,
        params,
        f: params.f(),
        kappa_argument,
        kappa: None,
        log2_k: None,
        m: None,
        n_messages: None,
        eps_bound: None,
        delta_bound,
        delta_bound_lemma: None,
        feasibility_lhs: None,
        constraints: Vec::new(),
        feasible: false,
        violated: Vec::new(),
    };

    if kappa_ok {
        let kappa = q_inverse(kappa_argument)?;
        let log2_k = nf * capacity(spec.power())? - kappa * (nf * dispersion(spec.power())?).sqrt();
        let log2_m_real = log2_k - 4.0 * (nf + 2.0).log2();
        let m = if log2_m_real <= 0.0 {
            LogLayered::linear(1.0)
        } else if log2_m_real < EXACT_INT_BITS {
            LogLayered::linear(log2_m_real.exp2().ceil())
        } else {
            LogLayered::from_log2(log2_m_real)
        };
        let log2_m = m.log2()?;
        let n_messages = existence_message_count(log2_m, params.tau);
        let prob_proxy = (q(kappa) + berry_esseen_b / nf.sqrt()).min(1.0);
        let eps_bound = params.c * params.d * prob_proxy;
        let type2 = params.log2_type2_term(m, log2_k)?.exp2();
        let lhs = eps_bound + type2;

        constraints.push(ConstraintCheck::less("error_sum_below_one", lhs, 1.0));
        constraints.push(ConstraintCheck::greater(
            "at_least_two_messages",
            n_messages.map_or(0.0, |c| c.to_linear().unwrap_or(f64::INFINITY)),
            1.0,
        ));

        plan.kappa = Some(kappa);
        plan.log2_k = Some(log2_k);
        plan.m = Some(m);
        plan.n_messages = n_messages;
        plan.eps_bound = Some(eps_bound);
        plan.delta_bound_lemma = Some(params.zeta + type2);
        plan.feasibility_lhs = Some(lhs);
    }

    plan.violated = constraints.iter().filter(|c| !c.holds).map(|c| c.name.clone()).collect();
    plan.feasible = kappa_ok && plan.violated.is_empty();
    plan.constraints = constraints;
    Ok(plan)
}

/// The converse chain: shell quantization slack, resolvability level and the
/// resulting upper bound on `log2 log2 N*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConverseChain {
    pub n: usize,
    pub power: f64,
    pub eps: f64,
    pub delta: f64,
    /// `sqrt(P) n^{3/2} e^{-n}`, the quantization TV slack.
    pub quantization_slack: f64,
    /// `1 - eps - delta - slack`.
    pub xi: f64,
    /// `nC + sqrt(nV) Q^{-1}(1 - eps - slack)`.
    pub via_resolvability: f64,
    /// `nC - sqrt(nV) Q^{-1}(eps + slack)`.
    pub value: f64,
    /// `nC - sqrt(nV) Q^{-1}(eps)`.
    pub approximation: f64,
    pub residual_model: String,
}

/// `sqrt(P) n^{3/2} e^{-n}`.
pub fn quantization_slack(n: usize, power: f64) -> f64 {
    let n = n as f64;
    (0.5 * power.ln() + 1.5 * n.ln() - n).exp()
}

pub fn converse_bound(spec: &ChannelSpec, eps: f64, delta: f64) -> Result<ConverseChain> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("eps must lie in (0,1), got {eps}"));
    }
    if !(delta >= 0.0 && delta < 1.0) {
        return domain(format!("delta must lie in [0,1), got {delta}"));
    }
    let slack = quantization_slack(spec.n(), spec.power());
    if eps + delta + slack >= 1.0 {
        return domain(format!(
            "converse needs eps + delta + sqrt(P) n^1.5 e^-n < 1, got {eps} + {delta} + {slack}"
        ));
    }
    let n = spec.n() as f64;
    let first = n * capacity(spec.power())?;
    let root = (n * dispersion(spec.power())?).sqrt();
    Ok(ConverseChain {
        n: spec.n(),
        power: spec.power(),
        eps,
        delta,
        quantization_slack: slack,
        xi: 1.0 - eps - delta - slack,
        via_resolvability: first + root * q_inverse(1.0 - eps - slack)?,
        value: first - root * q_inverse(eps + slack)?,
        approximation: first - root * q_inverse(eps)?,
        residual_model: LOG_N_RESIDUAL.to_string(),
    })
}

/// One blocklength of the achievability / approximation / converse table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichRow {
    pub n: usize,
    /// `log2 log2 N` delivered by the achievability plan.
    pub achievability: Option<f64>,
    pub approximation: Option<f64>,
    /// Converse value at `delta = 0`.
    pub converse: Option<f64>,
    /// `(approximation - achievability) / log2 n`.
    pub approximation_gap: Option<f64>,
    /// `(converse - achievability) / log2 n`.
    pub converse_gap: Option<f64>,
    pub feasible: bool,
    pub error: Option<String>,
}

fn sandwich_row(n: usize, power: f64, eps: f64, berry_esseen_b: f64) -> Result<SandwichRow> {
    let spec = ChannelSpec::new(n, power)?;
    let approx = id_second_order(&spec, eps)?.value;
    let conv = converse_bound(&spec, eps, 0.0)?.value;
    let plan = plan_achievability(&spec, eps, berry_esseen_b)?;
    let ach = if plan.feasible { plan.loglog2_n() } else { None };
    let log_n = (n as f64).log2();
    Ok(SandwichRow {
        n,
        achievability: ach,
        approximation: Some(approx),
        converse: Some(conv),
        approximation_gap: ach.map(|a| (approx - a) / log_n),
        converse_gap: ach.map(|a| (conv - a) / log_n),
        feasible: plan.feasible,
        error: (!plan.feasible).then(|| format!("plan infeasible: {}", plan.violated.join(", "))),
    })
}

/// Evaluates the three columns for each blocklength; errors are kept per row.
pub fn sandwich_report(ns: &[usize], power: f64, eps: f64, berry_esseen_b: f64) -> Vec<SandwichRow> {
    ns.iter()
        .map(|&n| {
            sandwich_row(n, power, eps, berry_esseen_b).unwrap_or_else(|e| SandwichRow {
                n,
                achievability: None,
                approximation: None,
                converse: None,
                approximation_gap: None,
                converse_gap: None,
                feasible: false,
                error: Some(e.to_string()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, p: f64) -> ChannelSpec {
        ChannelSpec::new(n, p).unwrap()
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity(0.0).unwrap(), 0.0);
        assert_eq!(capacity(1.0).unwrap(), 0.5);
        assert_eq!(capacity(3.0).unwrap(), 1.0);
        assert!(capacity(-0.1).is_err());
    }

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion(0.0).unwrap(), 0.0);
        let v1 = LOG2_E * LOG2_E * 3.0 / 8.0;
        assert!((dispersion(1.0).unwrap() - v1).abs() < 1e-15);
        assert!((dispersion(1.0).unwrap() - 0.780_513).abs() < 1e-6);
        let lim = LOG2_E * LOG2_E / 2.0;
        assert!((lim - 1.040_684).abs() < 1e-6);
        assert!((dispersion(1e6).unwrap() - lim).abs() < 1e-5);
        assert!(dispersion(-1.0).is_err());
    }

    #[test]
    fn monotone_in_power() {
        let mut prev = (0.0, 0.0);
        for i in 0..=600 {
            let p = 10f64.powf(-6.0 + i as f64 * 0.02);
            let cur = (capacity(p).unwrap(), dispersion(p).unwrap());
            assert!(cur.0 >= prev.0 && cur.1 >= prev.1, "P={p}");
            prev = cur;
        }
    }

    #[test]
    fn id_second_order_examples() {
        for &n in &[10, 100, 1000] {
            let s = spec(n, 1.0);
            let e = id_second_order(&s, 0.5).unwrap();
            assert_eq!(e.value, n as f64 * 0.5);
            assert_eq!(e.layer, Layer::LogLog);
        }
        let e = id_second_order(&spec(100, 1.0), 0.01).unwrap();
        assert!((e.first_term - 50.0).abs() < 1e-12);
        assert!((e.second_term + 20.553).abs() < 1e-3, "{}", e.second_term);
        assert!((e.value - 29.447).abs() < 1e-3);
        let flipped = id_second_order(&spec(100, 1.0), 0.99).unwrap();
        assert!((flipped.second_term + e.second_term).abs() < 1e-7);
        assert_eq!(flipped.first_term, e.first_term);
        assert!(id_second_order(&spec(100, 1.0), 1.0).is_err());
    }

    #[test]
    fn transmission_shares_formula() {
        let s = spec(100, 1.0);
        let t = transmission_second_order(&s, 0.01).unwrap();
        let i = id_second_order(&s, 0.01).unwrap();
        assert_eq!(t.value, i.value);
        assert_eq!(t.layer, Layer::Log);
        assert_eq!(t.code_size(), LogLayered::from_log2(t.value));
        assert_eq!(transmission_second_order(&s, 0.5).unwrap().value, 50.0);
    }

    #[test]
    fn id_second_order_non_decreasing_in_eps() {
        // a larger tolerated missed-detection rate admits more messages
        let s = spec(64, 2.0);
        let mut prev = f64::NEG_INFINITY;
        for i in 1..200 {
            let v = id_second_order(&s, i as f64 / 200.0).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn message_count_small_example() {
        // e^10 / (100 e) = 81.03...
        assert_eq!(existence_message_count_direct(100.0, 0.1), 81.0);
        let n = existence_message_count(100f64.log2(), 0.1).unwrap();
        assert_eq!(n, LogLayered::linear(81.0));
        assert!(existence_message_count(0.0, 0.1).is_none());
    }

    #[test]
    fn message_count_log_domain_matches_direct_where_both_fit() {
        for &(m, tau) in &[(300.0_f64, 0.1), (2000.0, 0.05), (5000.0, 0.1)] {
            let direct = (tau * m - m.ln() - 1.0) / LN_2; // log2 N
            let layered = existence_message_count(f64::log2(m), tau).unwrap();
            let got = layered.log2().unwrap();
            assert!((got - direct).abs() < 1e-9 * direct.max(1.0), "{m} {tau}: {got} {direct}");
        }
        // huge M stays finite
        let huge = existence_message_count(5e5, 1e-6).unwrap();
        assert_eq!(huge.layer, Layer::LogLog);
        assert!(huge.value.is_finite());
        assert!((huge.value - (5e5 + (1e-6f64).log2() - LN_2.log2())).abs() < 1e-6);
    }

    #[test]
    fn proof_parameters() {
        let p = ExistenceParams::for_blocklength(100);
        assert!((p.f() - 1.0 / 102.0).abs() < 1e-15);
        assert!((p.zeta - 2.0 / 100f64.log2()).abs() < 1e-15);
        assert!(p.constraints().iter().all(|c| c.holds));
        let p4 = ExistenceParams::for_blocklength(4);
        let failed: Vec<_> = p4.constraints().into_iter().filter(|c| !c.holds).map(|c| c.name).collect();
        assert_eq!(failed, vec!["zeta_below_one".to_string()]);
    }

    #[test]
    fn smallest_blocklength_for_zeta_condition() {
        // scan n = 3..10^4 for the zeta/tau log condition alone
        let n0 = (3..=10_000)
            .find(|&n| {
                let nf = n as f64;
                let zeta = 2.0 / nf.log2();
                let tau = 1.0 / (nf + 2.0);
                zeta * (1.0 / tau - 1.0).log2() > 2.0
            })
            .unwrap();
        assert_eq!(n0, 3);
        // the whole bundle first holds at n = 5 (zeta < 1 needs log2 n > 2)
        let all = (3..=10_000)
            .find(|&n| ExistenceParams::for_blocklength(n).constraints().iter().all(|c| c.holds))
            .unwrap();
        assert_eq!(all, 5);
    }

    #[test]
    fn plan_delta_bound_matches_display() {
        let s = spec(10_000, 1.0);
        let plan = plan_achievability(&s, 0.1, 1.0).unwrap();
        let display = 2.0 / 10_000f64.log2() + 2.0 / 10_002.0;
        assert!((plan.delta_bound - display).abs() < 1e-12);
        assert!(plan.feasible, "{:?}", plan.violated);
        assert!(plan.delta_bound_lemma.unwrap() <= plan.delta_bound);
        assert!((plan.eps_bound.unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn plan_reports_kappa_infeasibility() {
        let s = spec(100, 1.0);
        let plan = plan_achievability(&s, 0.1, 1.0).unwrap();
        assert!(!plan.feasible);
        assert_eq!(plan.violated, vec!["kappa_argument_in_unit_interval".to_string()]);
        assert!(plan.kappa.is_none());
        let display = 2.0 / 100f64.log2() + 2.0 / 102.0;
        assert!((plan.delta_bound - display).abs() < 1e-15);
    }

    #[test]
    fn plan_never_overflows() {
        for &n in &[1_000usize, 100_000, 1_000_000] {
            let plan = plan_achievability(&spec(n, 1.0), 0.3, 1.0).unwrap();
            assert!(plan.feasible);
            let ll = plan.loglog2_n().unwrap();
            assert!(ll.is_finite() && ll > 0.0);
            let n_msgs = plan.n_messages.unwrap();
            assert!(matches!(n_msgs.to_linear(), Err(crate::Error::Overflow(_))));
        }
    }

    #[test]
    fn converse_examples() {
        let c = converse_bound(&spec(10, 1.0), 0.3, 0.1).unwrap();
        assert!((c.xi - 0.598_564).abs() < 1e-6, "{}", c.xi);
        assert!((c.via_resolvability - c.value).abs() < 1e-9);

        let err = converse_bound(&spec(5, 4.0), 0.5, 0.499).unwrap_err();
        assert!(err.to_string().contains("eps + delta"));
        assert!((quantization_slack(5, 4.0) - 0.1507).abs() < 1e-4);

        let c = converse_bound(&spec(200, 1.0), 0.1, 0.0).unwrap();
        assert!((c.value - id_second_order(&spec(200, 1.0), 0.1).unwrap().value).abs() < 1e-9);
    }

    #[test]
    fn converse_gap_shrinks() {
        let mut prev = f64::INFINITY;
        for n in 50..400 {
            let c = converse_bound(&spec(n, 1.0), 0.1, 0.0).unwrap();
            let gap = (c.value - c.approximation).abs();
            assert!(gap <= prev, "n={n}");
            prev = gap;
        }
    }
}
