//! Number formatting and the experiment CSV.

use std::io::Write;

use shallowcode::codec::MessageEstimate;
use shallowcode::CodeInstance;

pub const CSV_HEADER: [&str; 14] = [
    "seed", "n", "k", "q", "rate", "eps", "gamma", "trials", "failures", "estimate", "stderr",
    "wires", "depth", "verified",
];

/// `x` with 12 significant digits, like C's `%.12g`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-5..12).contains(&exp) {
        trim_zeros(format!("{:.*}", (11 - exp) as usize, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub struct ExperimentCsv<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> ExperimentCsv<W> {
    pub fn new(w: W) -> Result<Self, csv::Error> {
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(CSV_HEADER)?;
        Ok(ExperimentCsv { inner })
    }

    pub fn row(
        &mut self,
        seed: u64,
        inst: &CodeInstance,
        eps: f64,
        est: &MessageEstimate,
    ) -> Result<(), csv::Error> {
        let verified = inst
            .meta
            .mother
            .as_ref()
            .map(|m| serde_json::to_value(m.verified).expect("verification serializes"))
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_else(|| "none".into());
        self.inner.write_record([
            seed.to_string(),
            inst.n().to_string(),
            inst.k().to_string(),
            inst.field().order().to_string(),
            sig12(inst.meta.rate_bits),
            sig12(eps),
            sig12(inst.meta.gamma),
            est.trials.to_string(),
            est.failures.to_string(),
            sig12(est.estimate),
            sig12(est.stderr),
            inst.meta.wires.to_string(),
            inst.meta.depth.to_string(),
            verified,
        ])
    }

    pub fn finish(mut self) -> Result<(), csv::Error> {
        self.inner.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_examples() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(0.25), "0.25");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(123456789012345.0), "1.23456789012e14");
        assert_eq!(sig12(1.5e-7), "1.5e-7");
        assert_eq!(sig12(-0.0001), "-0.0001");
        assert_eq!(sig12(999999999999.7), "1e12");
        assert_eq!(sig12(99999999999.95), "99999999999.9");
        assert_eq!(sig12(48.0), "48");
    }
}
