//! CSV rendering of trajectories and sweeps.

use qslcorr::qsl::{QslResult, ScenarioRun};

pub const TRAJECTORY_HEADER: &str =
    "t,concurrence,E_bures,D_bures,F_P,K_op,K_tr,K_hs,tau_op,tau_tr,tau_hs,tau_unified";
pub const SWEEP_HEADER: &str = "sweep_value,delta_Q,tau_unified,tau_op,tau_tr,tau_hs";

const SIGNIFICANT: usize = 12;

/// C `%.12g` formatting.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIGNIFICANT as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn emit_trajectory_csv(run: &ScenarioRun) -> String {
    let mut out = String::with_capacity(160 * (run.nodes.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for n in &run.nodes {
        let r = &n.result;
        let fields = [
            fmt_g(n.t),
            fmt_g(n.concurrence),
            fmt_g(n.e_bures),
            n.d_bures.map(fmt_g).unwrap_or_default(),
            fmt_g(n.f_p),
            fmt_g(r.k.op),
            fmt_g(r.k.tr),
            fmt_g(r.k.hs),
            fmt_g(r.tau_op),
            fmt_g(r.tau_tr),
            fmt_g(r.tau_hs),
            fmt_g(r.tau_unified),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// One sweep point: the swept value and the bound at the full driving time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub result: QslResult,
}

pub fn emit_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let r = &row.result;
        let fields = [
            fmt_g(row.value),
            fmt_g(r.amount.change),
            fmt_g(r.tau_unified),
            fmt_g(r.tau_op),
            fmt_g(r.tau_tr),
            fmt_g(r.tau_hs),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
