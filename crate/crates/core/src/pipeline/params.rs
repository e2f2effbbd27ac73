use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::params::{Caps, Mode, Tolerances};

/// Iteration count of the strict schedule for degree `d`: `⌊log₂ d⌋ − 18`, floored at 0.
pub fn strict_iterations(d: usize) -> usize {
    if d == 0 {
        return 0;
    }
    (d.ilog2() as usize).saturating_sub(18)
}

/// All knobs of a decomposition run. Every field has a default, so a JSON
/// config may override any subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineParams {
    pub mode: Mode,
    pub rho: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Practical mode iterates until both remainders have max degree at most this.
    pub stop_degree: usize,
    /// Number of cleanup bipartitions per side in practical mode (`None`: derived from Δ).
    pub cleanup_k: Option<usize>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub caps: Caps,
    /// Practical mode reruns a failed attempt on a fresh RNG stream up to this many times in total.
    pub max_attempts: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self::practical(1)
    }
}

impl PipelineParams {
    pub fn strict(seed: u64) -> Self {
        PipelineParams {
            mode: Mode::Strict,
            rho: 1.0 / 200.0,
            alpha: 1.0 / 200.0,
            gamma: 1.0 / 30.0,
            stop_degree: 0,
            cleanup_k: None,
            seed,
            tolerances: Tolerances::default(),
            caps: Caps::default(),
            max_attempts: 1,
        }
    }

    /// Desk-scale profile. `rho = 0` makes the added degree `C` zero, so each
    /// merged piece has degree exactly `Δ(hx ∪ hy)`.
    pub fn practical(seed: u64) -> Self {
        PipelineParams {
            mode: Mode::Practical,
            rho: 0.0,
            alpha: 1.0 / 200.0,
            gamma: 1.0 / 30.0,
            stop_degree: 4,
            cleanup_k: None,
            seed,
            tolerances: Tolerances {
                slack: 0.5,
                concentration: 1.0,
                goodness: 0.5,
            },
            caps: Caps::practical(),
            max_attempts: 16,
        }
    }

    pub fn for_mode(mode: Mode, seed: u64) -> Self {
        match mode {
            Mode::Strict => Self::strict(seed),
            Mode::Practical => Self::practical(seed),
        }
    }

    /// Defaults of the mode, refined key by key by the JSON object `overlay`
    /// (nested objects such as `caps` merge recursively). The mode is `mode`
    /// if given, else the overlay's `mode`, else practical.
    pub fn from_overrides(mode: Option<Mode>, overlay: &Value) -> Result<Self, String> {
        if !overlay.is_object() {
            return Err("config must be a JSON object".into());
        }
        let mode = match (mode, overlay.get("mode")) {
            (Some(m), _) => m,
            (None, Some(m)) => serde_json::from_value(m.clone()).map_err(|e| format!("mode: {e}"))?,
            (None, None) => Mode::Practical,
        };
        let mut merged = serde_json::to_value(Self::for_mode(mode, 1)).map_err(|e| e.to_string())?;
        merge(&mut merged, overlay);
        let mut params: Self = serde_json::from_value(merged).map_err(|e| e.to_string())?;
        params.mode = mode;
        Ok(params)
    }

    /// Goodness multiplier whose practical threshold `floor(m · d / 5)`
    /// equals `ceil(d / 5)`, the integer form of the strict requirement.
    pub fn exact_goodness(d: usize) -> f64 {
        if d == 0 {
            return 1.0;
        }
        let t = (d as f64 / 5.0).ceil();
        (t + 0.5) * 5.0 / d as f64
    }

    /// Initial-bisection slack: `d^(2/3)` strict, `max(slack · d^(2/3), 1)` practical.
    pub fn slack(&self, d: usize) -> f64 {
        let base = (d as f64).powf(2.0 / 3.0);
        match self.mode {
            Mode::Strict => base,
            Mode::Practical => (self.tolerances.slack * base).max(1.0),
        }
    }
}

fn merge(base: &mut Value, overlay: &Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, o) => *b = o.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_iteration_count() {
        assert_eq!(strict_iterations(64), 0);
        assert_eq!(strict_iterations(1 << 19), 1);
        assert_eq!(strict_iterations((1 << 25) + 5), 7);
    }

    #[test]
    fn exact_goodness_threshold() {
        for d in [5, 10, 32, 64, 256, 1000] {
            let m = PipelineParams::exact_goodness(d);
            assert_eq!((m * d as f64 / 5.0).floor(), (d as f64 / 5.0).ceil(), "d = {d}");
        }
    }

    #[test]
    fn config_overrides_subset() {
        let p: PipelineParams = serde_json::from_str(r#"{"stop_degree": 6, "seed": 9}"#).unwrap();
        assert_eq!(p.stop_degree, 6);
        assert_eq!(p.seed, 9);
        assert_eq!(p.mode, Mode::Practical);
        assert!(serde_json::from_str::<PipelineParams>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn overrides_merge_nested_keys() {
        let v: Value = serde_json::from_str(r#"{"caps": {"max_resamples": 7}, "stop_degree": 6}"#).unwrap();
        let p = PipelineParams::from_overrides(None, &v).unwrap();
        assert_eq!(p.caps.max_resamples, 7);
        assert_eq!(p.caps.narrowing, PipelineParams::practical(1).caps.narrowing);
        assert_eq!(p.stop_degree, 6);
        let strict: Value = serde_json::from_str(r#"{"mode": "strict"}"#).unwrap();
        assert_eq!(PipelineParams::from_overrides(None, &strict).unwrap(), PipelineParams::strict(1));
        assert_eq!(PipelineParams::from_overrides(Some(Mode::Practical), &strict).unwrap().mode, Mode::Practical);
        assert!(PipelineParams::from_overrides(None, &serde_json::json!({"nope": 1})).is_err());
        assert!(PipelineParams::from_overrides(None, &serde_json::json!([1])).is_err());
    }
}
