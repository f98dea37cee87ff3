//! Integration over the unit square: seeded stratified Monte Carlo and an
//! adaptive tensor grid.
//!
//! Both are deterministic functions of `(integrand, config)`; thread count
//! never changes a result because rows are sampled from per-row RNG streams
//! and summed pairwise in row order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MonteCarlo,
    AdaptiveGrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub seed: u64,
    pub method: Method,
    /// Stop once `standard_error <= target_rel_se * |value|`.
    pub target_rel_se: f64,
    /// Strata per side at the first Monte Carlo level.
    pub initial_side: usize,
    /// Sample (or cell) budget.
    pub max_samples: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            method: Method::MonteCarlo,
            target_rel_se: 1e-3,
            initial_side: 64,
            max_samples: 1 << 23,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples_or_cells: u64,
    pub method: Method,
    /// False when the budget ran out before the target error was reached.
    pub converged: bool,
}

impl VolumeEstimate {
    pub fn zero(method: Method) -> Self {
        Self {
            value: 0.0,
            standard_error: 0.0,
            samples_or_cells: 0,
            method,
            converged: true,
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.standard_error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.standard_error / self.value.abs()
        }
    }

    fn meets(&self, target: f64) -> bool {
        self.standard_error <= target * self.value.abs()
    }
}

/// Pairwise summation of a slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn integrate_unit_square<F>(f: F, config: &SamplingConfig) -> VolumeEstimate
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    match config.method {
        Method::MonteCarlo => stratified(&f, config),
        Method::AdaptiveGrid => adaptive_grid(&f, config),
    }
}

fn level_rng(seed: u64, level: u32, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(level) << 56));
    rng.set_stream(row as u64);
    rng
}

fn stratified_level<F>(f: &F, side: usize, seed: u64, level: u32) -> (f64, f64)
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let h = 1.0 / side as f64;
    let rows: Vec<(f64, f64)> = (0..side)
        .into_par_iter()
        .map(|r| {
            let mut rng = level_rng(seed, level, r);
            let mut sum = 0.0;
            let mut var = 0.0;
            for c in 0..side {
                let mut draw = || {
                    let u = (c as f64 + rng.gen::<f64>()) * h;
                    let v = (r as f64 + rng.gen::<f64>()) * h;
                    f(u, v)
                };
                let a = draw();
                let b = draw();
                sum += 0.5 * (a + b);
                var += 0.25 * (a - b) * (a - b);
            }
            (sum, var)
        })
        .collect();
    let n = (side * side) as f64;
    let sums: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let vars: Vec<f64> = rows.iter().map(|r| r.1).collect();
    (pairwise_sum(&sums) / n, pairwise_sum(&vars).sqrt() / n)
}

fn stratified<F>(f: &F, config: &SamplingConfig) -> VolumeEstimate
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let mut side = config.initial_side.max(2);
    let mut level = 0;
    loop {
        let (value, se) = stratified_level(f, side, config.seed, level);
        let est = VolumeEstimate {
            value,
            standard_error: se,
            samples_or_cells: 2 * (side * side) as u64,
            method: Method::MonteCarlo,
            converged: true,
        };
        if est.meets(config.target_rel_se) {
            return est;
        }
        if 8 * (side * side) as u64 > config.max_samples {
            return VolumeEstimate {
                converged: false,
                ..est
            };
        }
        side *= 2;
        level += 1;
    }
}

// 2-point Gauss-Legendre nodes on [0, 1].
const GL2: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

#[derive(Clone, Copy, Debug)]
struct Cell {
    x: f64,
    y: f64,
    w: f64,
    fine: f64,
    err: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then(other.x.total_cmp(&self.x))
            .then(other.y.total_cmp(&self.y))
    }
}

fn gauss<F: Fn(f64, f64) -> f64>(f: &F, x: f64, y: f64, w: f64) -> f64 {
    let mut s = 0.0;
    for a in GL2 {
        for b in GL2 {
            s += f(x + a * w, y + b * w);
        }
    }
    s * w * w / 4.0
}

fn make_cell<F: Fn(f64, f64) -> f64>(f: &F, x: f64, y: f64, w: f64) -> Cell {
    let coarse = gauss(f, x, y, w);
    let h = w / 2.0;
    let fine = gauss(f, x, y, h) + gauss(f, x + h, y, h) + gauss(f, x, y + h, h) + gauss(f, x + h, y + h, h);
    Cell {
        x,
        y,
        w,
        fine,
        err: (fine - coarse).abs(),
    }
}

fn adaptive_grid<F>(f: &F, config: &SamplingConfig) -> VolumeEstimate
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let side = config.initial_side.clamp(1, 256);
    let w = 1.0 / side as f64;
    let initial: Vec<Cell> = (0..side * side)
        .into_par_iter()
        .map(|k| make_cell(f, (k % side) as f64 * w, (k / side) as f64 * w, w))
        .collect();
    let mut heap: BinaryHeap<Cell> = initial.into_iter().collect();
    let max_cells = (config.max_samples / 20).max(heap.len() as u64) as usize;
    let totals = |heap: &BinaryHeap<Cell>| {
        let mut cells: Vec<&Cell> = heap.iter().collect();
        cells.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        let v: Vec<f64> = cells.iter().map(|c| c.fine).collect();
        let e: Vec<f64> = cells.iter().map(|c| c.err).collect();
        (pairwise_sum(&v), pairwise_sum(&e))
    };
    let mut check_every = heap.len();
    let mut since = check_every;
    loop {
        since += 1;
        if since >= check_every || heap.len() + 3 > max_cells {
            since = 0;
            check_every = heap.len() / 4 + 1;
            let (value, err) = totals(&heap);
            let done = err <= config.target_rel_se * value.abs();
            if done || heap.len() + 3 > max_cells {
                return VolumeEstimate {
                    value,
                    standard_error: err,
                    samples_or_cells: heap.len() as u64,
                    method: Method::AdaptiveGrid,
                    converged: done,
                };
            }
        }
        let cell = heap.pop().expect("nonempty grid");
        let h = cell.w / 2.0;
        for (dx, dy) in [(0.0, 0.0), (h, 0.0), (0.0, h), (h, h)] {
            heap.push(make_cell(f, cell.x + dx, cell.y + dy, h));
        }
    }
}
