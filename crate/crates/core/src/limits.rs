//! Brute-force size caps.
//!
//! Every exhaustive routine refuses inputs above its cap with a `TooLarge`
//! error. The defaults can be raised through the `SHALLOWCODE_LIMITS`
//! environment variable, a comma-separated list of `key=value` pairs:
//!
//! ```text
//! SHALLOWCODE_LIMITS="range=1e8,disperser=5e7,decode=2^26"
//! ```
//!
//! Keys: `range`, `disperser`, `typical`, `decode`, `exact`, `generator`,
//! `uniformity`, `codebook`, `samples`. Values accept plain integers,
//! scientific notation (`1e8`) and powers of two (`2^26`).

use std::sync::OnceLock;

pub const ENV_VAR: &str = "SHALLOWCODE_LIMITS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Inputs enumerated by the range-detector verifier.
    pub range: u64,
    /// Minimal subsets enumerated by the disperser verifier.
    pub disperser: u64,
    /// Vectors enumerated by `enumerate_typical`.
    pub typical: u64,
    /// Messages enumerated by the typical-set decoder.
    pub decode: u64,
    /// Channel outputs enumerated by exact failure probability / mass.
    pub exact: u64,
    /// Circuit inputs accepted by `to_generator_matrix`.
    pub generator: u64,
    /// Coefficient assignments enumerated by the uniformity check.
    pub uniformity: u64,
    /// Symbols held by a precomputed codebook.
    pub codebook: u64,
    /// Random inputs used when a verifier falls back to sampling.
    pub samples: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            range: 10_000_000,
            disperser: 10_000_000,
            typical: 1 << 22,
            decode: 1 << 24,
            exact: 1 << 20,
            generator: 1 << 12,
            uniformity: 1 << 24,
            codebook: 1 << 27,
            samples: 10_000,
        }
    }
}

impl Limits {
    /// Process-wide limits: defaults overridden by `SHALLOWCODE_LIMITS`.
    pub fn global() -> &'static Limits {
        static CELL: OnceLock<Limits> = OnceLock::new();
        CELL.get_or_init(|| match std::env::var(ENV_VAR) {
            Ok(spec) => Limits::parse(&spec).unwrap_or_else(|e| {
                eprintln!("warning: ignoring {ENV_VAR}: {e}");
                Limits::default()
            }),
            Err(_) => Limits::default(),
        })
    }

    pub fn parse(spec: &str) -> Result<Limits, String> {
        let mut limits = Limits::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{item}`"))?;
            let value = parse_count(value.trim())?;
            let slot = match key.trim() {
                "range" => &mut limits.range,
                "disperser" => &mut limits.disperser,
                "typical" => &mut limits.typical,
                "decode" => &mut limits.decode,
                "exact" => &mut limits.exact,
                "generator" => &mut limits.generator,
                "uniformity" => &mut limits.uniformity,
                "codebook" => &mut limits.codebook,
                "samples" => &mut limits.samples,
                other => return Err(format!("unknown limit `{other}`")),
            };
            *slot = value;
        }
        Ok(limits)
    }
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Some((base, exp)) = s.split_once('^') {
        let base: u64 = base.parse().map_err(|_| format!("bad base in `{s}`"))?;
        let exp: u32 = exp.parse().map_err(|_| format!("bad exponent in `{s}`"))?;
        return base
            .checked_pow(exp)
            .ok_or_else(|| format!("`{s}` overflows"));
    }
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("bad count `{s}`"))?;
    if !(0.0..=u64::MAX as f64).contains(&v) {
        return Err(format!("`{s}` out of range"));
    }
    Ok(v as u64)
}

/// `base^exp` saturating at `u64::MAX`.
pub fn saturating_pow(base: u64, exp: u64) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc == u64::MAX {
            break;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides() {
        let l = Limits::parse("range=1e8, decode=2^26,samples=500").unwrap();
        assert_eq!(l.range, 100_000_000);
        assert_eq!(l.decode, 1 << 26);
        assert_eq!(l.samples, 500);
        assert_eq!(l.typical, Limits::default().typical);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(Limits::parse("bogus=3").is_err());
        assert!(Limits::parse("range").is_err());
    }

    #[test]
    fn saturating_pow_caps() {
        assert_eq!(saturating_pow(3, 4), 81);
        assert_eq!(saturating_pow(2, 70), u64::MAX);
    }
}
