//! Suite reports and seeded instance selection.

use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

/// Failures beyond this many are counted but not listed.
pub const MAX_LISTED_FAILURES: usize = 100;

/// Outcome of one verification suite. Everything except `timings_ms` is a
/// deterministic function of the inputs and the seed.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: Value,
    pub instances_checked: u64,
    pub failure_count: u64,
    pub failures: Vec<Value>,
    pub results: serde_json::Map<String, Value>,
    pub notes: Vec<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub timings_ms: serde_json::Map<String, Value>,
}

impl SuiteReport {
    pub fn new(suite: &str, params: Value) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            params,
            instances_checked: 0,
            failure_count: 0,
            failures: Vec::new(),
            results: serde_json::Map::new(),
            notes: Vec::new(),
            passed: true,
            timings_ms: serde_json::Map::new(),
        }
    }

    pub fn fail(&mut self, detail: Value) {
        self.failure_count += 1;
        self.passed = false;
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(detail);
        }
    }

    /// Records a hard error (overflow, bad input) as a failure.
    pub fn error(&mut self, what: &str, err: &crate::Error) {
        self.fail(serde_json::json!({"error": what, "message": err.to_string()}));
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn time(&mut self, key: &str, start: Instant) {
        self.timings_ms.insert(key.to_string(), Value::from(start.elapsed().as_millis() as u64));
    }

    /// Folds a sub-report in: counts add up, failures are tagged with the
    /// sub-suite name.
    pub fn absorb(&mut self, sub: SuiteReport) {
        self.instances_checked += sub.instances_checked;
        self.failure_count += sub.failure_count;
        if !sub.passed {
            self.passed = false;
        }
        for f in sub.failures {
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(serde_json::json!({"suite": sub.suite, "failure": f}));
            }
        }
        for (k, v) in sub.timings_ms {
            self.timings_ms.insert(format!("{}.{}", sub.suite, k), v);
        }
        self.results.insert(
            sub.suite.clone(),
            serde_json::json!({
                "instances_checked": sub.instances_checked,
                "failure_count": sub.failure_count,
                "results": sub.results,
                "notes": sub.notes,
                "passed": sub.passed,
            }),
        );
    }

    /// JSON with the timing field removed.
    pub fn deterministic_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        strip_timings(&mut v);
        v
    }
}

pub fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("timings_ms");
            for x in map.values_mut() {
                strip_timings(x);
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

/// Exhaustive when the instance count is at most `cap`, otherwise `samples`
/// seeded draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Sampling {
    pub cap: u64,
    pub samples: u64,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Sampling {
        Sampling { cap: 1_000_000, samples: 100_000, seed: 0 }
    }
}

impl Sampling {
    pub fn exhaustive() -> Sampling {
        Sampling { cap: u64::MAX, samples: 0, seed: 0 }
    }

    pub fn sampled(samples: u64, seed: u64) -> Sampling {
        Sampling { cap: 0, samples, seed }
    }

    pub fn with_seed(self, seed: u64) -> Sampling {
        Sampling { seed, ..self }
    }

    pub fn is_exhaustive_for(&self, count: u128) -> bool {
        count <= self.cap as u128
    }

    /// Instance indices to check, in increasing order. `salt` separates the
    /// random streams of different families under one seed.
    pub fn select(&self, count: u128, salt: u64) -> Vec<u128> {
        if self.is_exhaustive_for(count) {
            return (0..count).collect();
        }
        let mut rng = self.rng(salt);
        let mut out: Vec<u128> = if count <= usize::MAX as u128 && (self.samples as u128) < count {
            index::sample(&mut rng, count as usize, self.samples as usize).into_iter().map(|k| k as u128).collect()
        } else if (self.samples as u128) >= count {
            (0..count).collect()
        } else {
            (0..self.samples).map(|_| rng.gen_range(0..count)).collect()
        };
        out.sort_unstable();
        out
    }

    pub fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_modes() {
        let s = Sampling { cap: 10, samples: 5, seed: 3 };
        assert_eq!(s.select(8, 0), (0..8).collect::<Vec<_>>());
        let picked = s.select(1000, 0);
        assert_eq!(picked.len(), 5);
        assert!(picked.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(picked, s.select(1000, 0));
        assert_ne!(picked, s.select(1000, 1));
    }

    #[test]
    fn failures_are_capped_and_counted() {
        let mut r = SuiteReport::new("x", Value::Null);
        for k in 0..(MAX_LISTED_FAILURES + 5) {
            r.fail(Value::from(k));
        }
        assert!(!r.passed);
        assert_eq!(r.failure_count as usize, MAX_LISTED_FAILURES + 5);
        assert_eq!(r.failures.len(), MAX_LISTED_FAILURES);
    }

    #[test]
    fn timings_are_stripped() {
        let mut r = SuiteReport::new("x", Value::Null);
        r.timings_ms.insert("t".into(), Value::from(5));
        assert!(r.deterministic_json().get("timings_ms").is_none());
    }
}
