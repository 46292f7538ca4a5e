//! Number formatting and the three output encodings.

use cfgain::counterfactual::{GainSummary, OutcomeReport};
use serde::Serialize;

/// Significant digits in JSON and CSV.
pub const MACHINE_DIGITS: usize = 12;

/// Significant digits in tables.
pub const TABLE_DIGITS: usize = 4;

/// Magnitudes below this are rounding residue of exact zeros and are
/// printed as zero.
pub const ZERO_SNAP: f64 = 1e-15;

/// Rounds to `digits` significant digits. Negative zero becomes zero so
/// the printed form does not depend on the sign of a rounding residue.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("formatted float")
}

/// Value as written to JSON and CSV.
pub fn r12(x: f64) -> f64 {
    if x.abs() < ZERO_SNAP {
        0.0
    } else {
        round_sig(x, MACHINE_DIGITS)
    }
}

/// Table cell with four significant digits.
pub fn cell(x: f64) -> String {
    let x = round_sig(x, TABLE_DIGITS);
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{:.*e}", TABLE_DIGITS - 1, x);
    }
    let decimals = (TABLE_DIGITS as i32 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn round_outcome(o: &OutcomeReport) -> OutcomeReport {
    OutcomeReport {
        label: o.label.clone(),
        p_m: r12(o.p_m),
        p_m_given_block: r12(o.p_m_given_block),
        kd: r12(o.kd),
        ev: r12(o.ev),
        chi_b: r12(o.chi_b),
        chi_b_share: r12(o.chi_b_share),
        removal: r12(o.removal),
        gain_contribution: r12(o.gain_contribution),
        contributes: o.contributes,
    }
}

pub fn round_summary(s: &GainSummary) -> GainSummary {
    GainSummary {
        p_a: r12(s.p_a),
        delta_a: r12(s.delta_a),
        gain: r12(s.gain),
        p_error: r12(s.p_error),
        outcomes: s.outcomes.iter().map(round_outcome).collect(),
        probes: s.probes.iter().map(round_outcome).collect(),
    }
}

/// Plain text table, first column left aligned, the rest right aligned.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut width: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&width)
                .enumerate()
                .map(|(k, (c, w))| {
                    if k == 0 {
                        format!("{c:<w$}")
                    } else {
                        format!("{c:>w$}")
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_owned() + "\n"
        };
        let mut out = line(&self.header);
        let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
        out += &line(&rule);
        for r in &self.rows {
            out += &line(r);
        }
        out
    }
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

pub fn csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("serializable row");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}
