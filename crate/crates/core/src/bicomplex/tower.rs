//! Truncation towers `H_d(T_{q_0}) → H_d(T_{q_1}) → …` and their stabilization verdicts.
//!
//! Over a field the rank of `H_d(T_a) → H_d(T_b)` for a subcomplex `T_a ⊂ T_b` is
//! `h_a − (rk ∂^b_{d+1} − rk ∂^{b/a}_{d+1} − rk ∂^a_{d+1})`, where `∂^{b/a}` is the
//! differential of the quotient `T_b / T_a`. Only ranks of blocks of two matrices are needed.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::reduced::ReducedSource;
use super::total::{DirectSource, LabeledMatrix};
use super::BicomplexError;
use crate::exactla::{rank, BaseRing, HomologyGroup};

/// How the tower complexes are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Reduced for full-plane towers of bar modules over prime fields, direct otherwise.
    Auto,
    Direct,
    Reduced,
}

pub(crate) enum TowerSource {
    Direct(DirectSource),
    Reduced(ReducedSource),
}

impl TowerSource {
    fn base(&self) -> BaseRing {
        match self {
            TowerSource::Direct(s) => s.base(),
            TowerSource::Reduced(s) => s.base(),
        }
    }

    fn boundary(&self, d: i64) -> Result<Arc<LabeledMatrix>, BicomplexError> {
        match self {
            TowerSource::Direct(s) => s.boundary(d),
            TowerSource::Reduced(s) => s.boundary(d),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilizationMode {
    /// `h` consecutive tower maps are isomorphisms.
    Isomorphisms,
    /// The image rank `r(a, b)` is constant for `a` in `h` consecutive stages and every `b`
    /// at least `h` stages later within the schedule; classes that die are accounted for.
    PersistentImage,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    Stabilized { q_star: usize, horizon: usize, value: usize, mode: StabilizationMode },
    /// `lower_bound` is the last stage dimension when every observed map is injective; it
    /// bounds the colimit only if the unobserved maps stay injective.
    NotStabilized { lower_bound: Option<usize>, reason: String },
}

impl Verdict {
    pub fn value(&self) -> Option<usize> {
        match self {
            Verdict::Stabilized { value, .. } => Some(*value),
            Verdict::NotStabilized { .. } => None,
        }
    }
    pub fn is_stabilized(&self) -> bool {
        matches!(self, Verdict::Stabilized { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TowerStage {
    pub q_max: usize,
    pub group: HomologyGroup,
    /// Rank of the map to the next stage.
    pub rank_to_next: Option<usize>,
    pub injective_to_next: Option<bool>,
    pub iso_to_next: Option<bool>,
}

/// Classes born at a stage and the first later stages where some / all of them vanish.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassDeath {
    pub born_q: usize,
    pub classes: usize,
    pub first_loss_q: Option<usize>,
    pub all_dead_q: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizationReport {
    pub degree: i64,
    pub schedule: Vec<usize>,
    pub horizon: usize,
    pub tower: Vec<TowerStage>,
    /// `image_ranks[a][b]` = rank of `H(T_a) → H(T_b)` for `b ≥ a`.
    pub image_ranks: Vec<Vec<usize>>,
    pub verdict: Verdict,
    pub deaths: Vec<ClassDeath>,
    /// Stages whose map to the next stage is not injective.
    pub non_injective: Vec<usize>,
}

pub(crate) fn check_schedule(schedule: &[usize], h: usize) -> Result<(), BicomplexError> {
    if schedule.is_empty() {
        return Err(BicomplexError::BadSchedule("empty".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BicomplexError::BadSchedule(format!("{schedule:?} is not strictly increasing")));
    }
    if h < 2 {
        return Err(BicomplexError::BadSchedule(format!("persistence {h} must be at least 2")));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Job {
    /// rank of ∂_k restricted to rows ≤ q
    Full(i64, usize),
    /// rank of ∂_k restricted to lo < q ≤ hi
    Band(i64, usize, usize),
}

/// Tower reports for several degrees, sharing boundary matrices and rank jobs.
pub(crate) fn tower_reports(
    src: &TowerSource,
    degrees: &[i64],
    schedule: &[usize],
    h: usize,
) -> Result<Vec<StabilizationReport>, BicomplexError> {
    check_schedule(schedule, h)?;
    if !src.base().is_field() {
        return Err(BicomplexError::NeedsField("truncation towers"));
    }
    let mut jobs = Vec::new();
    for &d in degrees {
        for (a, &qa) in schedule.iter().enumerate() {
            jobs.push(Job::Full(d, qa));
            jobs.push(Job::Full(d + 1, qa));
            for &qb in &schedule[a + 1..] {
                jobs.push(Job::Band(d + 1, qa, qb));
            }
        }
    }
    jobs.sort_by_key(|j| match j {
        Job::Full(k, q) => (*k, 0, *q, 0),
        Job::Band(k, a, b) => (*k, 1, *a, *b),
    });
    jobs.dedup();
    let mut mats: HashMap<i64, Arc<LabeledMatrix>> = HashMap::new();
    for j in &jobs {
        let k = match j {
            Job::Full(k, _) | Job::Band(k, _, _) => *k,
        };
        if let std::collections::hash_map::Entry::Vacant(e) = mats.entry(k) {
            e.insert(src.boundary(k)?);
        }
    }
    let ranks: HashMap<Job, (usize, usize)> = jobs
        .par_iter()
        .map(|&j| {
            let (m, n) = match j {
                Job::Full(k, q) => (mats[&k].band(None, q), mats[&k].source_count(None, q)),
                Job::Band(k, a, b) => (mats[&k].band(Some(a), b), mats[&k].source_count(Some(a), b)),
            };
            (j, (rank(&m), n))
        })
        .collect();
    let base = src.base();
    Ok(degrees
        .iter()
        .map(|&d| {
            let dims: Vec<usize> = schedule
                .iter()
                .map(|&q| ranks[&Job::Full(d, q)].1 - ranks[&Job::Full(d, q)].0 - ranks[&Job::Full(d + 1, q)].0)
                .collect();
            let s = schedule.len();
            let mut image = vec![vec![0; s]; s];
            for a in 0..s {
                image[a][a] = dims[a];
                for b in a + 1..s {
                    let (qa, qb) = (schedule[a], schedule[b]);
                    let killed = ranks[&Job::Full(d + 1, qb)].0
                        - ranks[&Job::Band(d + 1, qa, qb)].0
                        - ranks[&Job::Full(d + 1, qa)].0;
                    image[a][b] = dims[a] - killed;
                }
            }
            assemble(base, d, schedule, h, dims, image)
        })
        .collect())
}

fn assemble(base: BaseRing, d: i64, schedule: &[usize], h: usize, dims: Vec<usize>, image: Vec<Vec<usize>>) -> StabilizationReport {
    let s = schedule.len();
    let tower: Vec<TowerStage> = (0..s)
        .map(|a| {
            let next = (a + 1 < s).then(|| image[a][a + 1]);
            TowerStage {
                q_max: schedule[a],
                group: HomologyGroup::field(base, dims[a]),
                rank_to_next: next,
                injective_to_next: next.map(|r| r == dims[a]),
                iso_to_next: next.map(|r| r == dims[a] && r == dims[a + 1]),
            }
        })
        .collect();
    let non_injective: Vec<usize> =
        tower.iter().filter(|t| t.injective_to_next == Some(false)).map(|t| t.q_max).collect();
    if !non_injective.is_empty() {
        log::debug!("degree {d}: non-injective tower maps out of q_max {non_injective:?}");
    }
    let deaths = (0..s)
        .filter(|&a| dims[a] > 0)
        .map(|a| ClassDeath {
            born_q: schedule[a],
            classes: dims[a],
            first_loss_q: (a + 1..s).find(|&b| image[a][b] < dims[a]).map(|b| schedule[b]),
            all_dead_q: (a + 1..s).find(|&b| image[a][b] == 0).map(|b| schedule[b]),
        })
        .collect();
    let verdict = decide(schedule, h, &dims, &image, &tower);
    StabilizationReport { degree: d, schedule: schedule.to_vec(), horizon: h, tower, image_ranks: image, verdict, deaths, non_injective }
}

fn decide(schedule: &[usize], h: usize, dims: &[usize], image: &[Vec<usize>], tower: &[TowerStage]) -> Verdict {
    let s = schedule.len();
    for a in 0..s.saturating_sub(h) {
        if (a..a + h).all(|i| tower[i].iso_to_next == Some(true)) {
            return Verdict::Stabilized { q_star: schedule[a], horizon: h, value: dims[a], mode: StabilizationMode::Isomorphisms };
        }
    }
    for a in 0..s {
        let last = a + 2 * h - 1;
        if last >= s {
            break;
        }
        let v = image[a][a + h];
        if (a..a + h).all(|i| (i + h..=last).all(|b| image[i][b] == v)) {
            return Verdict::Stabilized { q_star: schedule[a], horizon: h, value: v, mode: StabilizationMode::PersistentImage };
        }
    }
    let all_injective = tower.iter().all(|t| t.injective_to_next != Some(false));
    Verdict::NotStabilized {
        lower_bound: all_injective.then(|| dims[s - 1]),
        reason: format!("no {h} consecutive isomorphisms and no persistent image rank within q_max {schedule:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(dims: &[usize], image: Vec<Vec<usize>>, h: usize) -> Verdict {
        let schedule: Vec<usize> = (0..dims.len()).map(|i| 4 * (i + 1)).collect();
        assemble(BaseRing::PrimeField(3), 0, &schedule, h, dims.to_vec(), image).verdict
    }

    #[test]
    fn isomorphisms_stabilize() {
        let v = verdict(&[1, 1, 1, 1], vec![vec![1, 1, 1, 1], vec![0, 1, 1, 1], vec![0, 0, 1, 1], vec![0, 0, 0, 1]], 3);
        assert_eq!(v, Verdict::Stabilized { q_star: 4, horizon: 3, value: 1, mode: StabilizationMode::Isomorphisms });
    }

    #[test]
    fn dying_classes_stabilize_to_zero() {
        // a class in every stage, killed by every second map
        let s = 6;
        let image: Vec<Vec<usize>> =
            (0..s).map(|a| (0..s).map(|b| usize::from(b == a || (b == a + 1 && a % 2 == 0))).collect()).collect();
        let v = verdict(&[1; 6], image, 3);
        assert_eq!(v.value(), Some(0));
    }

    #[test]
    fn growth_is_not_stabilized() {
        let s = 5;
        let dims: Vec<usize> = (1..=s).collect();
        let image: Vec<Vec<usize>> = (0..s).map(|a| (0..s).map(|b| if b >= a { dims[a] } else { 0 }).collect()).collect();
        match verdict(&dims, image, 3) {
            Verdict::NotStabilized { lower_bound, .. } => assert_eq!(lower_bound, Some(5)),
            v => panic!("unexpected {v:?}"),
        }
    }
}
