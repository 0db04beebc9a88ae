//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls the timeline algebra or the
//! assignment solver under test.

#![allow(dead_code)]

use std::collections::BTreeMap;

use diarscore::formats::Turn;
use diarscore::timeline::Ticks;
use rand::Rng;

/// Grid cell width: 1 ms = 10 ticks.
pub const CELL: i64 = 10;
/// Instance coordinates: multiples of 10 ms = 100 ticks.
pub const STEP: i64 = 100;
/// Recording length used by random instances.
pub const HORIZON: i64 = 60 * 10_000;
/// Extent of every grid.
pub const GRID_END: i64 = 2 * HORIZON;

/// Boolean activity over `[0, GRID_END)` at 1 ms resolution.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Grid(pub Vec<bool>);

impl Grid {
    pub fn empty() -> Self {
        Grid(vec![false; (GRID_END / CELL) as usize])
    }

    pub fn from_spans(spans: &[(i64, i64)]) -> Self {
        let mut g = Grid::empty();
        for &(a, b) in spans {
            for c in (a / CELL)..(b / CELL) {
                g.0[c as usize] = true;
            }
        }
        g
    }

    pub fn and(&self, o: &Grid) -> Grid {
        Grid(self.0.iter().zip(&o.0).map(|(a, b)| *a && *b).collect())
    }

    pub fn or(&self, o: &Grid) -> Grid {
        Grid(self.0.iter().zip(&o.0).map(|(a, b)| *a || *b).collect())
    }

    pub fn minus(&self, o: &Grid) -> Grid {
        Grid(self.0.iter().zip(&o.0).map(|(a, b)| *a && !*b).collect())
    }

    /// Active time in ticks.
    pub fn ticks(&self) -> i64 {
        self.0.iter().filter(|b| **b).count() as i64 * CELL
    }

    /// Maximal runs as (onset, offset) tick pairs.
    pub fn spans(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, &on) in self.0.iter().chain(std::iter::once(&false)).enumerate() {
            match (on, start) {
                (true, None) => start = Some(i as i64 * CELL),
                (false, Some(s)) => {
                    out.push((s, i as i64 * CELL));
                    start = None;
                }
                _ => {}
            }
        }
        out
    }
}

/// Exhaustive search over every partial one-to-one pairing.
///
/// Returns the best objective and the chosen row->column vector under the
/// tie rule: rows in order each prefer the smallest column, with
/// "unassigned" ranked after every column. Zero-weight pairs count as
/// unassigned.
pub fn brute_force_mapping(w: &[Vec<i64>]) -> (i64, Vec<Option<usize>>) {
    let rows = w.len();
    let cols = w.first().map_or(0, Vec::len);
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut current = vec![usize::MAX; rows];
    let mut used = vec![false; cols];

    fn rec(
        i: usize,
        w: &[Vec<i64>],
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        best: &mut Option<(i64, Vec<usize>)>,
    ) {
        if i == w.len() {
            let mut key = current.clone();
            let mut total = 0;
            for (r, c) in key.iter_mut().enumerate() {
                if *c != usize::MAX {
                    if w[r][*c] == 0 {
                        *c = usize::MAX;
                    } else {
                        total += w[r][*c];
                    }
                }
            }
            let better = match best {
                None => true,
                Some((bt, bk)) => total > *bt || (total == *bt && key < *bk),
            };
            if better {
                *best = Some((total, key));
            }
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                current[i] = c;
                rec(i + 1, w, current, used, best);
                used[c] = false;
            }
        }
        current[i] = usize::MAX;
        rec(i + 1, w, current, used, best);
    }

    rec(0, w, &mut current, &mut used, &mut best);
    let (total, key) = best.unwrap_or((0, Vec::new()));
    (total, key.into_iter().map(|c| (c != usize::MAX).then_some(c)).collect())
}

/// One random scoring instance on the 10 ms grid.
#[derive(Clone, Debug)]
pub struct Instance {
    pub reference: Vec<Turn>,
    pub system: Vec<Turn>,
    /// Scoring regions as tick spans (disjoint, sorted).
    pub regions: Vec<(i64, i64)>,
}

pub const FILE: &str = "rec";

fn random_turns<R: Rng>(rng: &mut R, prefix: &str, n_speakers: usize) -> Vec<Turn> {
    let mut out = Vec::new();
    for s in 0..n_speakers {
        let name = format!("{prefix}{s}");
        for _ in 0..rng.gen_range(1..=5) {
            let onset = rng.gen_range(0..HORIZON / STEP - 1) * STEP;
            let max_len = ((HORIZON - onset) / STEP).min(1_000);
            let len = rng.gen_range(1..=max_len) * STEP;
            out.push(Turn::new(FILE, Ticks(onset), Ticks(len), name.clone()));
        }
    }
    out
}

/// Full-horizon region with up to `max_holes` random holes.
pub fn random_regions<R: Rng>(rng: &mut R, max_holes: usize) -> Vec<(i64, i64)> {
    let mut cuts: Vec<(i64, i64)> = (0..rng.gen_range(0..=max_holes))
        .map(|_| {
            let a = rng.gen_range(0..HORIZON / STEP) * STEP;
            let b = (a + rng.gen_range(1..=500) * STEP).min(HORIZON);
            (a, b)
        })
        .collect();
    cuts.sort();
    let hole_grid = Grid::from_spans(&cuts);
    Grid::from_spans(&[(0, HORIZON)]).minus(&hole_grid).spans()
}

/// ≤4 reference and ≤4 system speakers, random holes, with non-empty scored
/// reference time.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    loop {
        let (n_ref, n_sys) = (rng.gen_range(1..=4), rng.gen_range(0..=4));
        let reference = random_turns(rng, "ref", n_ref);
        let system = random_turns(rng, "sys", n_sys);
        let regions = random_regions(rng, 3);
        if regions.is_empty() {
            continue;
        }
        let scored = speaker_grids(&reference, &Grid::from_spans(&regions));
        if scored.values().any(|g| g.ticks() > 0) {
            return Instance { reference, system, regions };
        }
    }
}

/// Per-speaker activity, restricted to `mask`.
pub fn speaker_grids(turns: &[Turn], mask: &Grid) -> BTreeMap<String, Grid> {
    let mut out: BTreeMap<String, Grid> = BTreeMap::new();
    for t in turns {
        let g = out.entry(t.speaker.clone()).or_insert_with(Grid::empty);
        for c in (t.onset.ticks() / CELL)..(t.offset().ticks() / CELL) {
            g.0[c as usize] = true;
        }
    }
    for g in out.values_mut() {
        *g = g.and(mask);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleScore {
    pub false_alarm: i64,
    pub miss: i64,
    pub confusion: i64,
    pub total: i64,
    pub der: f64,
    pub speaker_jer: Vec<f64>,
    pub jer: f64,
    pub objective: i64,
}

/// DER and JER by cell-by-cell counting with a brute-force mapping.
pub fn grid_score(reference: &[Turn], system: &[Turn], regions: &[(i64, i64)]) -> OracleScore {
    let mask = Grid::from_spans(regions);
    let r = speaker_grids(reference, &mask);
    let s = speaker_grids(system, &mask);
    let r: Vec<&Grid> = r.values().collect();
    let s: Vec<&Grid> = s.values().collect();

    let w: Vec<Vec<i64>> = r.iter().map(|rg| s.iter().map(|sg| rg.and(sg).ticks()).collect()).collect();
    let (objective, assignment) = brute_force_mapping(&w);

    let (mut fa, mut miss, mut conf, mut total) = (0i64, 0i64, 0i64, 0i64);
    for c in 0..mask.0.len() {
        let n_ref = r.iter().filter(|g| g.0[c]).count() as i64;
        let n_sys = s.iter().filter(|g| g.0[c]).count() as i64;
        let n_correct =
            assignment.iter().enumerate().filter(|(i, a)| a.is_some_and(|j| r[*i].0[c] && s[j].0[c])).count() as i64;
        miss += CELL * (n_ref - n_sys).max(0);
        fa += CELL * (n_sys - n_ref).max(0);
        conf += CELL * (n_ref.min(n_sys) - n_correct);
        total += CELL * n_ref;
    }

    let speaker_jer: Vec<f64> = r
        .iter()
        .zip(&assignment)
        .map(|(rg, a)| match a {
            Some(j) => {
                let union = rg.or(s[*j]).ticks();
                let err = s[*j].minus(rg).ticks() + rg.minus(s[*j]).ticks();
                100.0 * err as f64 / union as f64
            }
            None if rg.ticks() > 0 => 100.0,
            None => 0.0,
        })
        .collect();
    let jer = speaker_jer.iter().sum::<f64>() / speaker_jer.len() as f64;

    OracleScore {
        false_alarm: fa,
        miss,
        confusion: conf,
        total,
        der: 100.0 * (fa + miss + conf) as f64 / total as f64,
        speaker_jer,
        jer,
        objective,
    }
}
