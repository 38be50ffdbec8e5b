//! Reactance sweeps and capacity-optimal load selection.
//!
//! Each grid cell terminates the passive ports with (jx1, jx2), solves both
//! mirrored switch states, builds the basis, and estimates ergodic BPSK
//! capacity. Every cell at one frequency shares one derived seed (common
//! random numbers), so cell-to-cell comparisons, swap symmetry, and argmax
//! dominance are exact rather than statistical. Sub-band quantization picks k
//! contiguous segments and one load pair per segment, maximizing the
//! band-wide minimum capacity over candidates drawn from the per-frequency
//! optima.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{ergodic_capacity, tx_correlation, ChannelConfig};
use crate::error::{Error, Result};
use crate::network::{reduce_loaded, return_loss_db, LoadState, PortNetwork};
use crate::pattern::{basis_from_states, imbalance_db};
use crate::rng::derive_seed;

const FREQ_SALT: u64 = 0x4652_4551;

#[derive(Debug, Clone, PartialEq)]
pub struct ReactanceGrid {
    pub x1_values: Vec<f64>,
    pub x2_values: Vec<f64>,
}

impl ReactanceGrid {
    pub fn new(x1_values: Vec<f64>, x2_values: Vec<f64>) -> Result<Self> {
        for vals in [&x1_values, &x2_values] {
            if vals.len() < 2 {
                return Err(Error::InvalidParameter(
                    "reactance grid needs at least 2 samples per axis".into(),
                ));
            }
            if !vals.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidParameter(
                    "reactance samples must be strictly increasing".into(),
                ));
            }
        }
        Ok(ReactanceGrid {
            x1_values,
            x2_values,
        })
    }

    pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(hi > lo) || n < 2 {
            return Err(Error::InvalidParameter(format!(
                "bad linspace [{lo}, {hi}] x {n}"
            )));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
        ReactanceGrid::new(vals.clone(), vals)
    }

    /// X in [-400, +400] ohm, 41 x 41; the span covers the measured diode
    /// reactances (+17 and -407 ohm sit inside or at its edges).
    pub fn default_grid() -> Self {
        ReactanceGrid::linspace(-400.0, 400.0, 41).expect("static grid is valid")
    }

    pub fn is_swap_symmetric(&self) -> bool {
        self.x1_values == self.x2_values
    }

    pub fn cell_count(&self) -> usize {
        self.x1_values.len() * self.x2_values.len()
    }
}

/// Per-cell evaluation: capacity with its Monte Carlo error, driven-port
/// return loss of the first switch state, and basis imbalance (None when the
/// basis is degenerate, which happens on the x1 = x2 diagonal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellEval {
    pub capacity: f64,
    pub std_error: f64,
    pub rl_db: f64,
    pub imbalance_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestCell {
    pub i1: usize,
    pub i2: usize,
    pub x1: f64,
    pub x2: f64,
    pub eval: CellEval,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub frequency: f64,
    pub grid: ReactanceGrid,
    /// Row-major over (x1 index, x2 index); None marks a resonant-load
    /// degeneracy masked out of the map.
    pub cells: Vec<Option<CellEval>>,
    pub best: BestCell,
}

impl SweepResult {
    pub fn cell(&self, i1: usize, i2: usize) -> &Option<CellEval> {
        &self.cells[i1 * self.grid.x2_values.len() + i2]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub active_port: usize,
    /// Optional uniform series resistance on both loads, to emulate
    /// realizable varactor/MEMS implementations. Zero is the purely-reactive
    /// idealization.
    pub series_resistance: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            active_port: 0,
            series_resistance: 0.0,
        }
    }
}

/// Seed shared by every evaluation at one frequency: common random numbers
/// keyed on the frequency value itself.
pub fn frequency_seed(base: u64, f: f64) -> u64 {
    derive_seed(base, &[FREQ_SALT, f.to_bits()])
}

/// Evaluate one load state (plus its swap) at one frequency: both mirrored
/// solutions, basis, transmit correlation, ergodic capacity.
pub fn evaluate_loads(
    net: &PortNetwork,
    f: f64,
    state_a: &LoadState,
    cfg: &ChannelConfig,
    opts: &SweepOptions,
) -> Result<CellEval> {
    let state_b = state_a.swapped();
    let sol_a = reduce_loaded(net, f, state_a, opts.active_port)?;
    let sol_b = reduce_loaded(net, f, &state_b, opts.active_port)?;
    let basis = basis_from_states(&sol_a.pattern, &sol_b.pattern)?;
    let r_tx = tx_correlation(&basis);
    let cell_cfg = ChannelConfig {
        seed: frequency_seed(cfg.seed, f),
        ..cfg.clone()
    };
    let est = ergodic_capacity(&r_tx, &cell_cfg)?;
    Ok(CellEval {
        capacity: est.bits_per_symbol,
        std_error: est.std_error,
        rl_db: return_loss_db(&sol_a),
        imbalance_db: imbalance_db(&basis).ok(),
    })
}

fn reactive_state(x1: f64, x2: f64, series_resistance: f64) -> Result<LoadState> {
    if series_resistance == 0.0 {
        Ok(LoadState::reactive(x1, x2))
    } else {
        LoadState::reactive_with_series(x1, x2, series_resistance)
    }
}

/// Argmax ordering: strictly higher capacity wins, ties go to the higher
/// return loss, remaining ties keep the earlier (row-major) cell.
fn improves(cand: &CellEval, best: &CellEval) -> bool {
    if cand.capacity != best.capacity {
        return cand.capacity > best.capacity;
    }
    cand.rl_db > best.rl_db
}

/// Full 2-D reactance sweep at one frequency.
pub fn sweep(
    net: &PortNetwork,
    f: f64,
    grid: &ReactanceGrid,
    cfg: &ChannelConfig,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    cfg.validate()?;
    let n2 = grid.x2_values.len();
    let cells: Vec<Option<CellEval>> = (0..grid.cell_count())
        .into_par_iter()
        .map(|idx| {
            let x1 = grid.x1_values[idx / n2];
            let x2 = grid.x2_values[idx % n2];
            let state = reactive_state(x1, x2, opts.series_resistance)?;
            match evaluate_loads(net, f, &state, cfg, opts) {
                Ok(cell) => Ok(Some(cell)),
                // resonant degeneracies are masked, not fatal
                Err(Error::ResonantLoadDegeneracy { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<BestCell> = None;
    for (idx, cell) in cells.iter().enumerate() {
        let Some(eval) = cell else { continue };
        let cand = BestCell {
            i1: idx / n2,
            i2: idx % n2,
            x1: grid.x1_values[idx / n2],
            x2: grid.x2_values[idx % n2],
            eval: *eval,
        };
        match &best {
            None => best = Some(cand),
            Some(b) if improves(eval, &b.eval) => best = Some(cand),
            _ => {}
        }
    }
    let best = best.ok_or_else(|| {
        Error::InvalidParameter(format!("every cell of the sweep at {f} Hz is degenerate"))
    })?;
    Ok(SweepResult {
        frequency: f,
        grid: grid.clone(),
        cells,
        best,
    })
}

/// Per-frequency sweeps over a band; the per-frequency optima are the
/// maximum-capacity load curves with their return loss and imbalance.
pub fn optimize_band(
    net: &PortNetwork,
    f_list: &[f64],
    grid: &ReactanceGrid,
    cfg: &ChannelConfig,
    opts: &SweepOptions,
) -> Result<Vec<SweepResult>> {
    if f_list.is_empty() {
        return Err(Error::EmptyInput("optimize_band needs frequencies"));
    }
    f_list
        .iter()
        .map(|&f| sweep(net, f, grid, cfg, opts))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SubBandSegment {
    pub f_low: f64,
    pub f_high: f64,
    pub x1: f64,
    pub x2: f64,
    pub worst_case_capacity: f64,
}

/// Contiguous cover of the swept band by k fixed load pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SubBandPlan {
    pub segments: Vec<SubBandSegment>,
}

impl SubBandPlan {
    pub fn worst_case_capacity(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.worst_case_capacity)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Quantize the band into k contiguous sub-bands, one fixed load pair each.
///
/// Candidates are the union of per-frequency optimum cells; the dynamic
/// program maximizes the band-wide minimum capacity over contiguous
/// k-segmentations. Within a segment, the optima of the member frequencies
/// are tried first, so a k = n_frequencies plan reproduces the per-frequency
/// optima even under capacity ties.
pub fn subband_quantize(results: &[SweepResult], k: usize) -> Result<SubBandPlan> {
    let n = results.len();
    if n == 0 {
        return Err(Error::EmptyInput("subband_quantize needs sweep results"));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::TooManySubBands { k, n });
    }
    if !results.windows(2).all(|w| w[0].frequency < w[1].frequency) {
        return Err(Error::InvalidParameter(
            "sweep results must be sorted by frequency".into(),
        ));
    }
    for r in results {
        if r.grid != results[0].grid {
            return Err(Error::InvalidParameter(
                "sub-band quantization requires one shared reactance grid".into(),
            ));
        }
    }

    // candidate cells: per-frequency optima in frequency order, deduplicated
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for r in results {
        let cell = (r.best.i1, r.best.i2);
        if !candidates.contains(&cell) {
            candidates.push(cell);
        }
    }
    // capacity of candidate c at frequency index fi (masked cells -> -inf)
    let value = |fi: usize, c: (usize, usize)| -> f64 {
        results[fi]
            .cell(c.0, c.1)
            .map(|e| e.capacity)
            .unwrap_or(f64::NEG_INFINITY)
    };

    // best achievable minimum over [i, j], preferring in-segment optima
    let seg_best = |i: usize, j: usize| -> (f64, (usize, usize)) {
        let mut order: Vec<(usize, usize)> = Vec::with_capacity(candidates.len());
        for r in &results[i..=j] {
            let cell = (r.best.i1, r.best.i2);
            if !order.contains(&cell) {
                order.push(cell);
            }
        }
        for &c in &candidates {
            if !order.contains(&c) {
                order.push(c);
            }
        }
        let mut best = (f64::NEG_INFINITY, order[0]);
        for c in order {
            let mut lo = f64::INFINITY;
            for fi in i..=j {
                lo = lo.min(value(fi, c));
            }
            if lo > best.0 {
                best = (lo, c);
            }
        }
        best
    };

    // seg[i][j], then dp over (segments used, last frequency index)
    let mut seg = vec![vec![(f64::NEG_INFINITY, (0usize, 0usize)); n]; n];
    for i in 0..n {
        for j in i..n {
            seg[i][j] = seg_best(i, j);
        }
    }
    let neg = f64::NEG_INFINITY;
    let mut dp = vec![vec![neg; n]; k + 1];
    let mut cut = vec![vec![usize::MAX; n]; k + 1];
    for j in 0..n {
        dp[1][j] = seg[0][j].0;
        cut[1][j] = 0;
    }
    for m in 2..=k {
        for j in (m - 1)..n {
            for i in (m - 1)..=j {
                let cand = dp[m - 1][i - 1].min(seg[i][j].0);
                if cand > dp[m][j] {
                    dp[m][j] = cand;
                    cut[m][j] = i;
                }
            }
        }
    }

    let mut segments = Vec::with_capacity(k);
    let mut j = n - 1;
    let mut m = k;
    while m >= 1 {
        let i = cut[m][j];
        let (worst, cell) = seg[i][j];
        segments.push(SubBandSegment {
            f_low: results[i].frequency,
            f_high: results[j].frequency,
            x1: results[0].grid.x1_values[cell.0],
            x2: results[0].grid.x2_values[cell.1],
            worst_case_capacity: worst,
        });
        if i == 0 {
            break;
        }
        j = i - 1;
        m -= 1;
    }
    segments.reverse();
    Ok(SubBandPlan { segments })
}

/// Plot-ready contour rows plus the plateau metric: the fraction of unmasked
/// cells within 5% of the maximum capacity.
#[derive(Debug, Clone)]
pub struct ContourTable {
    /// (x1, x2, capacity) for every unmasked cell, row-major.
    pub rows: Vec<(f64, f64, f64)>,
    pub plateau_fraction: f64,
}

pub fn export_contour(result: &SweepResult) -> ContourTable {
    let n2 = result.grid.x2_values.len();
    let mut rows = Vec::new();
    for (idx, cell) in result.cells.iter().enumerate() {
        if let Some(eval) = cell {
            rows.push((
                result.grid.x1_values[idx / n2],
                result.grid.x2_values[idx % n2],
                eval.capacity,
            ));
        }
    }
    let max = rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let within = rows.iter().filter(|r| r.2 >= 0.95 * max).count();
    let plateau_fraction = if rows.is_empty() {
        0.0
    } else {
        within as f64 / rows.len() as f64
    };
    ContourTable {
        rows,
        plateau_fraction,
    }
}
