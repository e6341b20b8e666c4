//! Synthetic campus with planted friend ties, meal habits, library habits and
//! homophilous attributes.
//!
//! Students belong to one community each and befriend members of their own
//! community through a Chung–Lu random graph with heavy-tailed weights. At
//! every meal a student either eats alone, picking a window uniformly and a
//! time from their habit, or joins a dining chain of friends. Chain neighbours
//! sit within the co-occurrence radius of each other and nobody else in the
//! chain does, so friends of friends are not made to meet. Library visit
//! counts are Poisson with heavy-tailed rates and visit days are chosen by
//! preferential repeat.
//!
//! Every random draw comes from a ChaCha stream keyed by (purpose, index), so
//! output depends only on the configuration, never on the thread count.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::FriendshipNetwork;
use crate::par::par_range_map;
use crate::peer::UnionFind;
use crate::records::{
    write_events, EventFormat, EventRecord, StudentTable, TimeWindow, LIBRARY_LOCATION,
};
use crate::ties::{CooccurrenceModel, EdgeList, DEFAULT_WINDOW_SECONDS};

const FIRST_MEAL_MINUTE: f64 = 7.0 * 60.0 + 15.0;
const LAST_MEAL_MINUTE: f64 = 19.0 * 60.0 + 15.0;
const LIBRARY_OPEN_SECONDS: i64 = 8 * 3600;
const LIBRARY_SLOTS: usize = 14 * 30;
const MAX_LIBRARY_VISITS_PER_DAY: usize = 4;
/// Scale of the Pareto law of monthly library-visit rates.
const LIBRARY_RATE_MIN: f64 = 2.0;
/// Gap between neighbours in a dining chain, in seconds (inclusive range).
const CHAIN_GAP: (i64, i64) = (61, 120);
const MAX_PARTY: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub students: usize,
    /// Canteen windows across campus.
    pub windows: u32,
    pub windows_per_canteen: u32,
    /// Simulated days per month.
    pub days: u32,
    pub meals_per_day: u32,
    pub months: u32,
    /// First simulated month, `YYYY-MM`.
    pub start_month: String,
    /// Community sizes follow `P(s) ∝ s^-exponent` on `[group_size_min, group_size_max]`.
    pub group_size_exponent: f64,
    pub group_size_min: usize,
    pub group_size_max: usize,
    /// Friendship weights are Pareto with tail `P(w) ∝ w^-exponent`, clipped to
    /// `[degree_min, degree_max]`.
    pub degree_exponent: f64,
    pub degree_min: f64,
    pub degree_max: f64,
    pub friend_meal_prob: f64,
    /// Meal-time σ of the most orderly students; orderly spreads range up to twice this.
    pub sigma_minutes: f64,
    /// Widest half-width of the uniform meal-time span of disorderly students;
    /// the least disorderly use half of it.
    pub disorder_span_minutes: f64,
    /// Within-community correlation of the latent attribute scores.
    pub homophily: f64,
    /// Probability that a friend tie ends at each month boundary.
    pub tie_decay: f64,
    /// Tail exponent of the library-visit count distribution.
    pub diligence_exponent: f64,
    pub gpa_noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            students: 2_000,
            windows: 40,
            windows_per_canteen: 10,
            days: 30,
            meals_per_day: 3,
            months: 1,
            start_month: "2019-03".into(),
            group_size_exponent: 1.5,
            group_size_min: 50,
            group_size_max: 1000,
            degree_exponent: 2.35,
            degree_min: 1.5,
            degree_max: 15.0,
            friend_meal_prob: 0.3,
            sigma_minutes: 20.0,
            disorder_span_minutes: 120.0,
            homophily: 0.5,
            tie_decay: 0.0,
            diligence_exponent: 2.5,
            gpa_noise: 0.15,
            seed: 0,
        }
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1], got {p}")))
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {x}")))
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.students < 2 {
            return Err(invalid("at least two students are required"));
        }
        for (name, v) in [
            ("windows", self.windows),
            ("windows_per_canteen", self.windows_per_canteen),
            ("days", self.days),
            ("meals_per_day", self.meals_per_day),
            ("months", self.months),
        ] {
            if v == 0 {
                return Err(invalid(format!("{name} must be at least 1")));
            }
        }
        if self.meals_per_day > 12 {
            return Err(invalid("at most 12 meals per day are supported"));
        }
        if self.group_size_min < 2 || self.group_size_max < self.group_size_min {
            return Err(invalid("group sizes need 2 ≤ min ≤ max"));
        }
        check_positive("group_size_exponent", self.group_size_exponent)?;
        if !(self.degree_exponent > 1.0 && self.degree_exponent.is_finite()) {
            return Err(invalid("degree_exponent must exceed 1"));
        }
        check_positive("degree_min", self.degree_min)?;
        if !(self.degree_max >= self.degree_min && self.degree_max.is_finite()) {
            return Err(invalid("degree_max must be at least degree_min"));
        }
        if !(self.diligence_exponent > 1.0 && self.diligence_exponent.is_finite()) {
            return Err(invalid("diligence_exponent must exceed 1"));
        }
        check_prob("friend_meal_prob", self.friend_meal_prob)?;
        check_prob("homophily", self.homophily)?;
        check_prob("tie_decay", self.tie_decay)?;
        check_positive("sigma_minutes", self.sigma_minutes)?;
        check_positive("disorder_span_minutes", self.disorder_span_minutes)?;
        if !(self.gpa_noise >= 0.0 && self.gpa_noise.is_finite()) {
            return Err(invalid("gpa_noise must be non-negative"));
        }
        let months = self.month_windows()?;
        for w in &months {
            let days_in_month = (w.end - w.start) / 86_400;
            if i64::from(self.days) > days_in_month {
                return Err(invalid(format!(
                    "{} has {days_in_month} days, fewer than days = {}",
                    w.label, self.days
                )));
            }
        }
        Ok(())
    }

    pub fn month_windows(&self) -> Result<Vec<TimeWindow>> {
        TimeWindow::consecutive_months(&self.start_month, self.months as usize)
    }

    pub fn meals_per_month(&self) -> u32 {
        self.days * self.meals_per_day
    }

    /// Chance co-occurrence model matching one simulated month. The time slice
    /// is the width of the co-occurrence radius on both sides, so the slice
    /// collision probability approximates `P(|t1 − t2| ≤ radius)` for two
    /// of the most orderly strangers. Every other student spreads wider and
    /// collides less often, so the model's expectation bounds the generator's.
    pub fn cooccurrence_model(&self, window_seconds: i64) -> CooccurrenceModel {
        CooccurrenceModel {
            students: self.students as u64,
            windows: u64::from(self.windows),
            meals: self.meals_per_month(),
            slices: 60,
            slice_minutes: 2.0 * window_seconds as f64 / 60.0,
            sigma_minutes: self.sigma_minutes,
            mean_offset_minutes: 0.0,
        }
    }

    fn id_width(&self) -> usize {
        (self.students.saturating_sub(1)).to_string().len().max(5)
    }

    pub fn student_id(&self, index: usize) -> String {
        format!("S{index:0width$}", width = self.id_width())
    }

    fn location(&self, window: u32) -> String {
        format!(
            "C{}.W{}",
            window / self.windows_per_canteen + 1,
            window % self.windows_per_canteen + 1
        )
    }

    /// Minute of day at which meal `j` is centred.
    fn meal_centre(&self, j: u32) -> f64 {
        if self.meals_per_day == 1 {
            return 12.0 * 60.0 + 15.0;
        }
        let gap = (LAST_MEAL_MINUTE - FIRST_MEAL_MINUTE) / f64::from(self.meals_per_day - 1);
        FIRST_MEAL_MINUTE + gap * f64::from(j)
    }

    /// Largest distance from a meal centre that stays clear of neighbouring meals.
    fn meal_half_gap(&self) -> f64 {
        if self.meals_per_day == 1 {
            return 6.0 * 60.0;
        }
        (LAST_MEAL_MINUTE - FIRST_MEAL_MINUTE) / f64::from(self.meals_per_day - 1) / 2.0 - 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedAttributes {
    pub group: u32,
    pub orderly: bool,
    /// Meal-time spread in minutes: the jitter σ for orderly students, the
    /// uniform half-width for disorderly ones.
    pub meal_spread_minutes: f64,
    /// Expected library visits per month.
    pub diligence_rate: f64,
    pub gpa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Ties planted at the start; the count is the number of months each survives.
    pub friend_edges: EdgeList,
    /// Ties alive in each simulated month.
    pub monthly_edges: Vec<EdgeList>,
    pub groups: BTreeMap<String, u32>,
    pub attributes: BTreeMap<String, PlantedAttributes>,
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub config: SynthConfig,
    pub months: Vec<TimeWindow>,
    pub consumption: StudentTable,
    pub library: StudentTable,
    pub gpa: StudentTable,
    pub truth: GroundTruth,
}

// Stream domains.
const GROUPS: u64 = 1;
const STUDENT: u64 = 3;
const GROUP_EDGES: u64 = 4;
const MEAL: u64 = 5;
const OWN_MEALS: u64 = 6;
const LIBRARY: u64 = 7;

fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 56) ^ index);
    rng
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn sample_group_sizes(cfg: &SynthConfig) -> Vec<usize> {
    let mut rng = stream(cfg.seed, GROUPS, 0);
    let sizes: Vec<usize> = (cfg.group_size_min..=cfg.group_size_max).collect();
    let weights = sizes
        .iter()
        .map(|&s| (s as f64).powf(-cfg.group_size_exponent));
    let dist = WeightedIndex::new(weights).expect("positive weights");
    let mut out = Vec::new();
    let mut total = 0;
    while total < cfg.students {
        let s = sizes[dist.sample(&mut rng)].min(cfg.students - total);
        out.push(s);
        total += s;
    }
    // A short final community is folded into the previous one.
    if out.len() > 1 && *out.last().expect("nonempty") < cfg.group_size_min {
        let last = out.pop().expect("nonempty");
        *out.last_mut().expect("nonempty") += last;
    }
    out
}

/// Per-student draws that do not depend on the friendship graph.
struct Draws {
    weight: f64,
    own: [f64; 3],
    gpa_noise: f64,
}

fn sample_draws(cfg: &SynthConfig) -> Vec<Draws> {
    let pareto_shape = cfg.degree_exponent - 1.0;
    par_range_map!(0..cfg.students, |i: usize| {
        let mut rng = stream(cfg.seed, STUDENT, i as u64);
        let n = Normal::new(0.0, 1.0).expect("unit normal");
        let u: f64 = rng.random();
        Draws {
            weight: (cfg.degree_min * (1.0 - u).powf(-1.0 / pareto_shape)).min(cfg.degree_max),
            own: [n.sample(&mut rng), n.sample(&mut rng), n.sample(&mut rng)],
            gpa_noise: n.sample(&mut rng),
        }
    })
}

/// Latent scores mix each student's own noise with the normalized sum of their
/// planted friends' noise, `x = √(1−h)·e + √h·Σ e_j / √d`. Friends share part
/// of their latent while the score stays independent of degree.
fn planted_attributes(
    cfg: &SynthConfig,
    draws: &[Draws],
    group_of: &[u32],
    edges: &[(u32, u32, u32)],
) -> Vec<PlantedAttributes> {
    let mut friends: Vec<Vec<u32>> = vec![Vec::new(); cfg.students];
    for &(u, v, _) in edges {
        friends[u as usize].push(v);
        friends[v as usize].push(u);
    }
    let (own, shared) = ((1.0 - cfg.homophily).sqrt(), cfg.homophily.sqrt());
    let tail = cfg.diligence_exponent - 1.0;
    par_range_map!(0..cfg.students, |i: usize| {
        let f = &friends[i];
        let mut latent = draws[i].own;
        if !f.is_empty() {
            let scale = shared / (f.len() as f64).sqrt();
            for (k, slot) in latent.iter_mut().enumerate() {
                let mixed: f64 = f.iter().map(|&j| draws[j as usize].own[k]).sum();
                *slot = own * *slot + scale * mixed;
            }
        }
        // Regularity is graded inside each class: the most orderly students
        // keep σ, the least orderly use the full disorderly span, and both
        // classes widen towards the class boundary.
        let z = latent[0];
        let orderly = z > 0.0;
        let meal_spread_minutes = if orderly {
            cfg.sigma_minutes * (1.0 + (-z).exp())
        } else {
            cfg.disorder_span_minutes * (1.0 - 0.5 * z.exp())
        };
        // Gaussian copula onto a Pareto law with the configured tail.
        let upper = (1.0 - std_normal_cdf(latent[1])).max(1e-300);
        let diligence_rate = LIBRARY_RATE_MIN * upper.powf(-1.0 / tail);
        let gpa = 2.6
            + 0.2 * f64::from(u8::from(orderly))
            + 0.2 * z
            + 0.3 * latent[1]
            + 0.45 * latent[2]
            + cfg.gpa_noise * draws[i].gpa_noise;
        PlantedAttributes {
            group: group_of[i],
            orderly,
            meal_spread_minutes,
            diligence_rate,
            gpa: (gpa.clamp(0.0, 4.0) * 100.0).round() / 100.0,
        }
    })
}

/// Planted ties as `(u, v, months alive)` with `u < v`, community by community.
fn sample_edges(cfg: &SynthConfig, members: &[Vec<u32>], draws: &[Draws]) -> Vec<(u32, u32, u32)> {
    let per_group: Vec<Vec<(u32, u32, u32)>> = par_range_map!(0..members.len(), |g: usize| {
        let mut rng = stream(cfg.seed, GROUP_EDGES, g as u64);
        let m = &members[g];
        let total: f64 = m.iter().map(|&i| draws[i as usize].weight).sum();
        let mut out = Vec::new();
        for (x, &u) in m.iter().enumerate() {
            for &v in &m[x + 1..] {
                let p = (draws[u as usize].weight * draws[v as usize].weight / total).min(1.0);
                if rng.random::<f64>() < p {
                    let mut alive = 1;
                    while alive < cfg.months && rng.random::<f64>() >= cfg.tie_decay {
                        alive += 1;
                    }
                    out.push((u, v, alive));
                }
            }
        }
        out
    });
    per_group.into_iter().flatten().collect()
}

const NO_PARTNER: u32 = u32::MAX;

/// Seats friends at one meal. Each tie is active with `friend_meal_prob`;
/// active ties are taken in order of fewest meals shared so far this month and
/// join two students into a chain when both still have a free side. Chain
/// neighbours sit 61–120 s apart, so only they fall within the co-occurrence
/// radius of each other.
///
/// Returns `(member, anchor, offset in seconds)` for every member after the
/// first of each chain, and increments `shared` for the seated ties.
fn form_parties(
    cfg: &SynthConfig,
    rng: &mut ChaCha8Rng,
    edges: &[(u32, u32)],
    shared: &mut [u32],
) -> Vec<(u32, u32, i64)> {
    let n = cfg.students;
    let mut active: Vec<(u32, u64, usize)> = Vec::new();
    for (e, &count) in shared.iter().enumerate() {
        if rng.random_bool(cfg.friend_meal_prob) {
            active.push((count, rng.random(), e));
        }
    }
    active.sort_unstable();
    let mut link = vec![[NO_PARTNER; 2]; n];
    let mut chains = UnionFind::new(n);
    for (_, _, e) in active {
        let (u, v) = edges[e];
        let free = |x: u32| link[x as usize].iter().position(|&s| s == NO_PARTNER);
        let (Some(su), Some(sv)) = (free(u), free(v)) else {
            continue;
        };
        if chains.find(u) == chains.find(v)
            || (chains.size_of(u) + chains.size_of(v)) as usize > MAX_PARTY
        {
            continue;
        }
        link[u as usize][su] = v;
        link[v as usize][sv] = u;
        chains.union(u, v);
        shared[e] += 1;
    }

    let mut seated = Vec::new();
    let mut visited = vec![false; n];
    for start in 0..n as u32 {
        let ends = link[start as usize]
            .iter()
            .filter(|&&s| s != NO_PARTNER)
            .count();
        if ends != 1 || visited[start as usize] {
            continue;
        }
        visited[start as usize] = true;
        let (mut prev, mut cur) = (start, start);
        let mut offset = 0;
        while let Some(&next) = link[cur as usize]
            .iter()
            .find(|&&s| s != NO_PARTNER && s != prev)
        {
            offset += rng.random_range(CHAIN_GAP.0..=CHAIN_GAP.1);
            visited[next as usize] = true;
            seated.push((next, start, offset));
            prev = cur;
            cur = next;
        }
    }
    seated
}

/// Each student's solo choice for every meal of a month: `(window, second of day)`.
fn own_meals(
    cfg: &SynthConfig,
    students: &[PlantedAttributes],
    month: u32,
) -> Vec<Vec<(u32, i64)>> {
    let meals = cfg.meals_per_month();
    let half_gap = cfg.meal_half_gap();
    let span = cfg.disorder_span_minutes.min(half_gap);
    par_range_map!(0..cfg.students, |i: usize| {
        let mut rng = stream(cfg.seed, OWN_MEALS, (u64::from(month) << 32) | i as u64);
        let spread = students[i].meal_spread_minutes;
        let jitter = Normal::new(0.0, spread).expect("positive sigma");
        let span = spread.min(span);
        let orderly = students[i].orderly;
        (0..meals)
            .map(|k| {
                let window = rng.random_range(0..cfg.windows);
                let centre = cfg.meal_centre(k % cfg.meals_per_day);
                let offset = if orderly {
                    jitter.sample(&mut rng).clamp(-half_gap, half_gap)
                } else {
                    rng.random_range(-span..=span)
                };
                (window, ((centre + offset) * 60.0).round() as i64)
            })
            .collect()
    })
}

/// Visits in one month: a Poisson count at the student's heavy-tailed rate,
/// so counts inherit its power-law tail. Days are chosen by preferential
/// repeat: a day already visited `k` times is picked with weight `1 + k`, up
/// to four visits per day.
fn library_visits(cfg: &SynthConfig, rate: f64, index: usize, month: u32, start: i64) -> Vec<i64> {
    let mut rng = stream(cfg.seed, LIBRARY, (u64::from(month) << 32) | index as u64);
    let days = cfg.days as usize;
    let capacity = MAX_LIBRARY_VISITS_PER_DAY * days;
    let count = match Poisson::new(rate) {
        Ok(p) => (p.sample(&mut rng) as usize).min(capacity),
        Err(_) => 0,
    };
    let mut per_day = vec![0usize; days];
    for placed in 0..count {
        let open: usize = per_day
            .iter()
            .filter(|&&k| k < MAX_LIBRARY_VISITS_PER_DAY)
            .count();
        let total = (open + placed) as f64;
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = days - 1;
        for (d, &k) in per_day.iter().enumerate() {
            if k >= MAX_LIBRARY_VISITS_PER_DAY {
                continue;
            }
            let w = (1 + k) as f64;
            if pick < w {
                chosen = d;
                break;
            }
            pick -= w;
        }
        if per_day[chosen] >= MAX_LIBRARY_VISITS_PER_DAY {
            chosen = per_day
                .iter()
                .position(|&k| k < MAX_LIBRARY_VISITS_PER_DAY)
                .expect("count is capped by capacity");
        }
        per_day[chosen] += 1;
    }
    let band = LIBRARY_SLOTS / MAX_LIBRARY_VISITS_PER_DAY;
    let mut out = Vec::with_capacity(count);
    for (day, &k) in per_day.iter().enumerate() {
        for b in 0..k {
            // One visit per band, at two-minute slots with sub-minute jitter,
            // so no two visits collapse as duplicate swipes.
            let slot = b * band + rng.random_range(0..band);
            let second = rng.random_range(0..60);
            out.push(
                start + day as i64 * 86_400 + LIBRARY_OPEN_SECONDS + slot as i64 * 120 + second,
            );
        }
    }
    out
}

/// Generates a synthetic campus. Identical configurations give identical data.
pub fn generate(config: &SynthConfig) -> Result<SynthData> {
    config.validate()?;
    let cfg = config;
    let months = cfg.month_windows()?;
    let ids: Vec<String> = (0..cfg.students).map(|i| cfg.student_id(i)).collect();

    let sizes = sample_group_sizes(cfg);
    let mut group_of = Vec::with_capacity(cfg.students);
    let mut members: Vec<Vec<u32>> = Vec::with_capacity(sizes.len());
    for (g, &s) in sizes.iter().enumerate() {
        let start = group_of.len() as u32;
        members.push((start..start + s as u32).collect());
        group_of.extend(std::iter::repeat_n(g as u32, s));
    }
    let draws = sample_draws(cfg);
    let edges = sample_edges(cfg, &members, &draws);
    let students = planted_attributes(cfg, &draws, &group_of, &edges);

    let mut consumption = Vec::new();
    let mut library = Vec::new();
    let meals = cfg.meals_per_month();
    for (month, window) in months.iter().enumerate() {
        let month = month as u32;
        let alive: Vec<(u32, u32)> = edges
            .iter()
            .filter(|e| e.2 > month)
            .map(|&(u, v, _)| (u, v))
            .collect();
        let mut shared = vec![0u32; alive.len()];
        let parties: Vec<Vec<(u32, u32, i64)>> = (0..meals)
            .map(|k| {
                let mut rng = stream(cfg.seed, MEAL, (u64::from(month) << 32) | u64::from(k));
                form_parties(cfg, &mut rng, &alive, &mut shared)
            })
            .collect();
        let solo = own_meals(cfg, &students, month);
        for k in 0..meals as usize {
            let day_start = window.start + (k as i64 / i64::from(cfg.meals_per_day)) * 86_400;
            let mut choice: Vec<(u32, i64)> = solo.iter().map(|s| s[k]).collect();
            for &(member, anchor, offset) in &parties[k] {
                let (w, t) = solo[anchor as usize][k];
                choice[member as usize] = (w, t + offset);
            }
            for (i, (w, t)) in choice.into_iter().enumerate() {
                consumption.push(EventRecord {
                    student_id: ids[i].clone(),
                    location_id: cfg.location(w),
                    timestamp: day_start + t,
                });
            }
        }
        let visits: Vec<Vec<i64>> = par_range_map!(0..cfg.students, |i: usize| {
            library_visits(cfg, students[i].diligence_rate, i, month, window.start)
        });
        for (i, times) in visits.into_iter().enumerate() {
            library.extend(times.into_iter().map(|t| EventRecord {
                student_id: ids[i].clone(),
                location_id: LIBRARY_LOCATION.to_string(),
                timestamp: t,
            }));
        }
    }

    let mut gpa = StudentTable::new();
    for (i, s) in students.iter().enumerate() {
        gpa.set_gpa(&ids[i], s.gpa);
    }
    let friend_edges = EdgeList::from_counts(
        edges
            .iter()
            .map(|&(u, v, alive)| (ids[u as usize].as_str(), ids[v as usize].as_str(), alive)),
    )?;
    let monthly_edges = (0..cfg.months)
        .map(|m| {
            EdgeList::from_pairs(
                edges
                    .iter()
                    .filter(|e| e.2 > m)
                    .map(|&(u, v, _)| (ids[u as usize].as_str(), ids[v as usize].as_str())),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let truth = GroundTruth {
        friend_edges,
        monthly_edges,
        groups: ids.iter().cloned().zip(group_of.iter().copied()).collect(),
        attributes: ids.iter().cloned().zip(students).collect(),
    };
    Ok(SynthData {
        config: cfg.clone(),
        months,
        consumption: StudentTable::from_records(consumption),
        library: StudentTable::from_records(library),
        gpa,
        truth,
    })
}

pub const TRUTH_ATTRS_HEADER: &str =
    "student_id\tgroup\torderly\tmeal_spread_minutes\tdiligence_rate\tgpa";

impl GroundTruth {
    pub fn write_attrs<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{TRUTH_ATTRS_HEADER}")?;
        for (id, a) in &self.attributes {
            writeln!(
                out,
                "{id}\t{}\t{}\t{}\t{}\t{}",
                a.group,
                u8::from(a.orderly),
                a.meal_spread_minutes,
                a.diligence_rate,
                a.gpa
            )?;
        }
        Ok(())
    }
}

/// File names written by [`SynthData::write_to`].
pub const DATASET_FILES: [&str; 5] = [
    "consumption.csv",
    "library.csv",
    "gpa.csv",
    "truth_edges.tsv",
    "truth_attrs.tsv",
];

impl SynthData {
    /// Writes the three event CSVs, the planted ties and the planted
    /// attributes into `dir`, returning the paths written.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        fs::create_dir_all(dir)?;
        let paths: Vec<_> = DATASET_FILES.iter().map(|f| dir.join(f)).collect();
        let open =
            |p: &Path| -> Result<BufWriter<fs::File>> { Ok(BufWriter::new(fs::File::create(p)?)) };
        write_events(
            &self.consumption,
            EventFormat::Consumption,
            open(&paths[0])?,
        )?;
        write_events(&self.library, EventFormat::Library, open(&paths[1])?)?;
        write_events(&self.gpa, EventFormat::Gpa, open(&paths[2])?)?;
        self.truth.friend_edges.write_tsv(open(&paths[3])?)?;
        self.truth.write_attrs(open(&paths[4])?)?;
        Ok(paths)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineScore {
    pub precision: f64,
    pub recall: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

/// Precision and recall of inferred ties against planted ones.
pub fn evaluate_pipeline(truth: &EdgeList, inferred: &FriendshipNetwork) -> Result<PipelineScore> {
    evaluate_edges(truth, &inferred.edge_list())
}

pub fn evaluate_edges(truth: &EdgeList, inferred: &EdgeList) -> Result<PipelineScore> {
    if inferred.is_empty() {
        return Err(Error::Undefined(
            "precision of an empty inferred edge set".into(),
        ));
    }
    if truth.is_empty() {
        return Err(Error::Undefined("recall against an empty truth set".into()));
    }
    let tp = truth.intersection_size(inferred);
    Ok(PipelineScore {
        precision: tp as f64 / inferred.len() as f64,
        recall: tp as f64 / truth.len() as f64,
        true_positives: tp,
        false_positives: inferred.len() - tp,
        false_negatives: truth.len() - tp,
    })
}

/// Co-occurrence radius the generator is designed around.
pub const SYNTH_WINDOW_SECONDS: i64 = DEFAULT_WINDOW_SECONDS;
