use std::fmt::Write as _;

use qprob::rational::format_rational;
use qprob::Rational;
use sha2::{Digest, Sha256};

/// Significant digits for every float in a report.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` with 12 significant digits. Plain decimal notation for moderate magnitudes,
/// scientific otherwise. Negative zero prints as `0`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific notation");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-3..12).contains(&exponent) {
        return format!("{}e{exponent}", trim_zeros(mantissa));
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent).max(0) as usize;
    let fixed = format!("{:.*}", decimals, x);
    let fixed = trim_zeros(&fixed);
    if fixed == "-0" {
        "0".into()
    } else {
        fixed
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Header plus `key: value` lines.
#[derive(Debug, Clone)]
pub struct RunReport {
    command: String,
    digest: String,
    seed: Option<u64>,
    lines: Vec<(String, String)>,
}

impl RunReport {
    pub fn new(command: String, inputs: &[u8], seed: Option<u64>) -> Self {
        RunReport {
            command,
            digest: hex::encode(Sha256::digest(inputs)),
            seed,
            lines: Vec::new(),
        }
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.lines.push((key.into(), value.into()));
    }

    pub fn exact(&mut self, key: impl Into<String>, value: &Rational) {
        self.text(key, format_rational(value));
    }

    pub fn float(&mut self, key: impl Into<String>, value: f64) {
        self.text(key, format_float(value));
    }

    pub fn flag(&mut self, key: impl Into<String>, value: bool) {
        self.text(key, value.to_string());
    }

    pub fn count(&mut self, key: impl Into<String>, value: impl ToString) {
        self.text(key, value.to_string());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command).unwrap();
        writeln!(out, "inputs-sha256: {}", self.digest).unwrap();
        match self.seed {
            Some(s) => writeln!(out, "seed: {s}").unwrap(),
            None => writeln!(out, "seed: none").unwrap(),
        }
        out.push_str("---\n");
        for (k, v) in &self.lines {
            writeln!(out, "{k}: {v}").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_twelve_significant_digits() {
        assert_eq!(format_float(5f64.sqrt()), "2.2360679775");
        assert_eq!(format_float(2.0 * 2f64.sqrt()), "2.82842712475");
        assert_eq!(format_float(std::f64::consts::PI * 1000.0), "3141.59265359");
        assert_eq!(format_float(2.0), "2");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(1.5e-13), "1.5e-13");
        assert_eq!(format_float(-3.944271909999), "-3.94427191");
        assert_eq!(format_float(0.00123456789012345), "0.00123456789012");
        assert_eq!(format_float(0.000123456789012345), "1.23456789012e-4");
    }

    #[test]
    fn rendering_is_stable() {
        let mut r = RunReport::new("qprob x".into(), b"abc", Some(3));
        r.float("v", 0.1 + 0.2);
        let a = r.render();
        assert_eq!(a, r.clone().render());
        assert!(a.starts_with(
            "command: qprob x\ninputs-sha256: ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad\nseed: 3\n---\n"
        ));
        assert!(a.ends_with("v: 0.3\n"));
    }
}
