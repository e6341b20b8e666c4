//! Chance co-occurrence model for two strangers eating in the same canteen.
//!
//! Two students land at the same window with probability `1/n` and in the same
//! time slice with probability `Σ q_i²`, where `q_i` is the mass of the meal-time
//! normal density inside slice `i`. Over `b` meals the number of coincidences is
//! binomial, and scaling its tail by the number of student pairs gives the
//! expected count of stranger pairs that would look like friends.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CooccurrenceModel {
    /// Student population `m`.
    pub students: u64,
    /// Number of canteen windows `n`.
    pub windows: u64,
    /// Meals per student in the period, `b`.
    pub meals: u32,
    /// Number of slice boundaries `N`; the meal span holds `N - 1` slices.
    pub slices: u32,
    /// Slice width in minutes.
    pub slice_minutes: f64,
    /// Standard deviation of the meal time in minutes.
    pub sigma_minutes: f64,
    /// Offset of the meal-time mean from the span centre, in minutes.
    #[serde(default)]
    pub mean_offset_minutes: f64,
}

impl Default for CooccurrenceModel {
    fn default() -> Self {
        Self::reference_campus()
    }
}

impl CooccurrenceModel {
    /// 30 000 students, 160 windows, 90 meals a month, a one-hour span cut
    /// into 2-minute slices and a 20-minute meal-time spread.
    pub fn reference_campus() -> Self {
        CooccurrenceModel {
            students: 30_000,
            windows: 160,
            meals: 90,
            slices: 60,
            slice_minutes: 2.0,
            sigma_minutes: 20.0,
            mean_offset_minutes: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.students < 2 {
            return Err(invalid("population must be at least 2"));
        }
        if self.windows < 1 {
            return Err(invalid("at least one canteen window is required"));
        }
        if self.meals < 1 {
            return Err(invalid("at least one meal is required"));
        }
        if self.slices < 2 {
            return Err(invalid("at least two slice boundaries are required"));
        }
        if !(self.slice_minutes > 0.0 && self.slice_minutes.is_finite()) {
            return Err(invalid("slice width must be positive"));
        }
        if !(self.sigma_minutes > 0.0 && self.sigma_minutes.is_finite()) {
            return Err(invalid("meal-time spread must be positive"));
        }
        if !self.mean_offset_minutes.is_finite() {
            return Err(invalid("mean offset must be finite"));
        }
        Ok(())
    }

    /// Probability that two students pick the same window: exactly `1/n`.
    pub fn window_collision_prob(&self) -> f64 {
        1.0 / self.windows as f64
    }

    /// Normal mass inside each of the `N - 1` slices.
    pub fn slice_masses(&self) -> Vec<f64> {
        let count = self.slices as usize - 1;
        let half_span = count as f64 * self.slice_minutes / 2.0;
        let scale = self.sigma_minutes * std::f64::consts::SQRT_2;
        (0..count)
            .map(|i| {
                let lo = -half_span + i as f64 * self.slice_minutes - self.mean_offset_minutes;
                let hi = lo + self.slice_minutes;
                normal_interval_mass(lo / scale, hi / scale)
            })
            .collect()
    }

    /// Probability that two independent meal times fall in the same slice.
    pub fn time_collision_prob(&self) -> f64 {
        self.slice_masses().iter().map(|q| q * q).sum()
    }

    /// Per-meal coincidence probability `p = p1 · p2`.
    pub fn collision_prob(&self) -> f64 {
        self.window_collision_prob() * self.time_collision_prob()
    }

    pub fn encounter_tail(&self) -> Result<EncounterTail> {
        self.validate()?;
        EncounterTail::new(self.students, self.meals, self.collision_prob())
    }

    pub fn cooccurrence_tail(&self, min_encounters: u32) -> Result<TailValue> {
        self.encounter_tail()?.tail(min_encounters)
    }

    pub fn critical_frequency(&self, expectation_ceiling: f64) -> Result<u32> {
        self.encounter_tail()?
            .critical_frequency(expectation_ceiling)
    }
}

/// Mass of the standard normal between `lo·√2` and `hi·√2` (arguments already
/// divided by `σ√2`), evaluated on the tail that keeps precision.
fn normal_interval_mass(lo: f64, hi: f64) -> f64 {
    if lo >= 0.0 {
        0.5 * (libm::erfc(lo) - libm::erfc(hi))
    } else if hi <= 0.0 {
        0.5 * (libm::erfc(-hi) - libm::erfc(-lo))
    } else {
        0.5 * (libm::erf(hi) - libm::erf(lo))
    }
}

/// Binomial tail of coincidences over `meals` trials, scaled to all student pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncounterTail {
    /// `C(m, 2)`.
    pub pairs: f64,
    pub meals: u32,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailValue {
    pub min_encounters: u32,
    /// `P(x ≥ a)` for one pair.
    pub probability: f64,
    /// `C(m, 2) · P(x ≥ a)`.
    pub expected_pairs: f64,
}

impl EncounterTail {
    pub fn new(students: u64, meals: u32, p: f64) -> Result<Self> {
        if students < 2 {
            return Err(invalid("population must be at least 2"));
        }
        if meals < 1 {
            return Err(invalid("at least one meal is required"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("probability {p} outside [0, 1]")));
        }
        let m = students as f64;
        Ok(EncounterTail {
            pairs: m * (m - 1.0) / 2.0,
            meals,
            p,
        })
    }

    /// `P(x = k)` for `k` in `0..=meals`, via log-space terms.
    pub fn pmf(&self, k: u32) -> f64 {
        if k > self.meals {
            return 0.0;
        }
        if self.p == 0.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        if self.p == 1.0 {
            return if k == self.meals { 1.0 } else { 0.0 };
        }
        (ln_choose(self.meals, k)
            + k as f64 * self.p.ln()
            + (self.meals - k) as f64 * (-self.p).ln_1p())
        .exp()
    }

    pub fn tail(&self, min_encounters: u32) -> Result<TailValue> {
        if min_encounters < 1 || min_encounters > self.meals {
            return Err(invalid(format!(
                "encounter threshold {min_encounters} outside 1..={}",
                self.meals
            )));
        }
        // Far tail first so the smallest terms are accumulated before the large ones.
        let probability: f64 = (min_encounters..=self.meals)
            .rev()
            .map(|k| self.pmf(k))
            .sum::<f64>()
            .min(1.0);
        Ok(TailValue {
            min_encounters,
            probability,
            expected_pairs: self.pairs * probability,
        })
    }

    /// Tail values for thresholds `1..=max_a` (capped at the meal count).
    pub fn table(&self, max_a: u32) -> Vec<TailValue> {
        (1..=max_a.min(self.meals))
            .map(|a| self.tail(a).expect("threshold in range"))
            .collect()
    }

    /// Smallest threshold whose expected stranger-pair count drops below
    /// `expectation_ceiling`; `meals + 1` when no threshold within range does.
    pub fn critical_frequency(&self, expectation_ceiling: f64) -> Result<u32> {
        if expectation_ceiling.is_nan() || expectation_ceiling <= 0.0 {
            return Err(invalid("expectation ceiling must be positive"));
        }
        for a in 1..=self.meals {
            if self.tail(a)?.expected_pairs < expectation_ceiling {
                return Ok(a);
            }
        }
        Ok(self.meals + 1)
    }
}

fn ln_choose(n: u32, k: u32) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}
