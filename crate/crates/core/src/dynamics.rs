//! Flows of model Hamiltonians: integration, chord search and bracket estimates.

use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{poisson_bracket, HamiltonianModel};
use crate::quadruple::{AdmissibleQuadruple, FloatRegion, Region};

/// How many times a step may be halved before it is accepted as is.
pub const MAX_HALVINGS: u32 = 6;

/// Starts sampled per component of `X₀` unless configured otherwise.
pub const DEFAULT_SAMPLES: usize = 4096;

/// Allowed energy drift over a horizon `t`.
pub fn energy_tolerance(h0: f64, t: f64) -> f64 {
    1e-6 * h0.abs().max(1.0) * t
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub energies: Vec<f64>,
    /// Finest step used.
    pub dt: f64,
    pub halvings: u32,
    /// Set when the run drifted past the energy tolerance.
    pub flagged: bool,
}

impl Trajectory {
    pub fn end(&self) -> Option<&[f64]> {
        self.points.last().map(Vec::as_slice)
    }

    pub fn max_drift(&self) -> f64 {
        let h0 = self.energies.first().copied().unwrap_or(0.0);
        self.energies.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max)
    }
}

/// Integrator diagnostics for one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct RunDiagnostics {
    pub dt: f64,
    pub halvings: u32,
    pub steps: usize,
    pub max_drift: f64,
    /// Some step still missed its share of the tolerance after the last halving.
    pub clipped: bool,
    /// The whole run drifted past the energy tolerance.
    pub flagged: bool,
}

struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(dim: usize) -> Self {
        Rk4 {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
        }
    }

    fn step(&mut self, h: &HamiltonianModel, z: &[f64], dt: f64, out: &mut [f64]) {
        let [k1, k2, k3, k4] = &mut self.k;
        h.sgrad(z, k1);
        for i in 0..z.len() {
            self.tmp[i] = z[i] + 0.5 * dt * k1[i];
        }
        h.sgrad(&self.tmp, k2);
        for i in 0..z.len() {
            self.tmp[i] = z[i] + 0.5 * dt * k2[i];
        }
        h.sgrad(&self.tmp, k3);
        for i in 0..z.len() {
            self.tmp[i] = z[i] + dt * k3[i];
        }
        h.sgrad(&self.tmp, k4);
        for i in 0..z.len() {
            out[i] = z[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// Receives each accepted step; `start` is called once before the first.
trait Observer {
    fn start(&mut self);
    fn step(&mut self, t0: f64, z0: &[f64], t1: f64, z1: &[f64]) -> ControlFlow<()>;
}

enum Outcome {
    Finished(RunDiagnostics),
    Escaped { diagnostics: RunDiagnostics, t: f64 },
}

/// Advances `z` by `dt`, splitting the step in halves (at most `depth` times)
/// whenever the energy moves by more than `budget` per unit time.
/// Returns the finest step used and whether the finest level still missed the budget.
fn adaptive_step(
    h: &HamiltonianModel,
    stepper: &mut Rk4,
    z: &[f64],
    dt: f64,
    budget: f64,
    depth: u32,
    out: &mut [f64],
) -> (u32, bool) {
    stepper.step(h, z, dt, out);
    let e0 = h.value(z);
    if depth == 0 || (h.value(out) - e0).abs() <= budget * dt {
        let missed = (h.value(out) - e0).abs() > budget * dt;
        return (0, missed);
    }
    let mut mid = vec![0.0; z.len()];
    let (d1, m1) = adaptive_step(h, stepper, z, dt / 2.0, budget, depth - 1, &mut mid);
    let (d2, m2) = adaptive_step(h, stepper, &mid, dt / 2.0, budget, depth - 1, out);
    (1 + d1.max(d2), m1 || m2)
}

fn run(h: &HamiltonianModel, z0: &[f64], horizon: f64, dt: f64, obs: &mut impl Observer) -> Outcome {
    let h0 = h.value(z0);
    let tol = energy_tolerance(h0, horizon);
    // Each step may spend its share of the total tolerance.
    let budget = tol / horizon;
    let mut stepper = Rk4::new(z0.len());
    obs.start();
    let mut z = z0.to_vec();
    let mut next = z0.to_vec();
    let mut t = 0.0;
    let mut diagnostics = RunDiagnostics {
        dt,
        ..RunDiagnostics::default()
    };
    while t < horizon - 1e-12 * horizon.max(1.0) {
        let dt_here = dt.min(horizon - t);
        let (halvings, missed) = adaptive_step(h, &mut stepper, &z, dt_here, budget, MAX_HALVINGS, &mut next);
        let t1 = t + dt_here;
        diagnostics.steps += 1;
        diagnostics.halvings = diagnostics.halvings.max(halvings);
        diagnostics.clipped |= missed;
        if !h.domain.contains(&next) {
            diagnostics.dt = dt / f64::from(1u32 << diagnostics.halvings);
            return Outcome::Escaped { diagnostics, t: t1 };
        }
        diagnostics.max_drift = diagnostics.max_drift.max((h.value(&next) - h0).abs());
        let flow = obs.step(t, &z, t1, &next);
        std::mem::swap(&mut z, &mut next);
        t = t1;
        if flow.is_break() {
            break;
        }
    }
    diagnostics.dt = dt / f64::from(1u32 << diagnostics.halvings);
    diagnostics.flagged |= diagnostics.max_drift > tol;
    Outcome::Finished(diagnostics)
}

struct Recorder<'a> {
    h: &'a HamiltonianModel,
    z0: Vec<f64>,
    traj: Trajectory,
}

impl Observer for Recorder<'_> {
    fn start(&mut self) {
        self.traj.times = vec![0.0];
        self.traj.points = vec![self.z0.clone()];
        self.traj.energies = vec![self.h.value(&self.z0)];
    }

    fn step(&mut self, _t0: f64, _z0: &[f64], t1: f64, z1: &[f64]) -> ControlFlow<()> {
        self.traj.times.push(t1);
        self.traj.points.push(z1.to_vec());
        self.traj.energies.push(self.h.value(z1));
        ControlFlow::Continue(())
    }
}

fn check_start(h: &HamiltonianModel, z0: &[f64], horizon: f64, dt: f64) -> Result<()> {
    if z0.len() != h.chart.dim {
        return Err(Error::DimensionError {
            expected: h.chart.dim,
            found: z0.len(),
        });
    }
    if !h.domain.contains(z0) {
        return Err(Error::OutsideDomain(format!("start {z0:?} is outside the model domain")));
    }
    if !(horizon > 0.0 && dt > 0.0) {
        return Err(Error::InvalidModel("horizon and step must be positive".into()));
    }
    Ok(())
}

/// Fixed-step RK4 flow of `sgrad H` from `z0` for time `horizon`, every step recorded.
///
/// ```
/// use lagflux_core::dynamics::integrate;
/// use lagflux_core::models::HamiltonianModel;
/// let h = HamiltonianModel::harmonic();
/// let tr = integrate(&h, &[1.0, 0.0], 1.0, 1e-3).unwrap();
/// let end = tr.end().unwrap();
/// assert!((end[0] - 1.0).abs() < 1e-4 && end[1].abs() < 1e-4);
/// ```
pub fn integrate(h: &HamiltonianModel, z0: &[f64], horizon: f64, dt: f64) -> Result<Trajectory> {
    check_start(h, z0, horizon, dt)?;
    let mut rec = Recorder {
        h,
        z0: z0.to_vec(),
        traj: Trajectory::default(),
    };
    let outcome = run(h, z0, horizon, dt, &mut rec);
    let mut traj = rec.traj;
    let (Outcome::Finished(d) | Outcome::Escaped { diagnostics: d, .. }) = &outcome;
    traj.dt = d.dt;
    traj.halvings = d.halvings;
    traj.flagged = d.flagged;
    match outcome {
        Outcome::Finished(_) => Ok(traj),
        Outcome::Escaped { .. } => Err(Error::DomainEscape(Box::new(traj))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChordReport {
    pub start: Vec<f64>,
    /// First entry time into `X₁`, if reached before the horizon.
    pub hit: Option<f64>,
    pub diagnostics: RunDiagnostics,
    /// Integrator failure for this start; other starts are unaffected.
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChordConfig {
    /// Starts per component of `X₀`.
    pub samples: usize,
    pub horizon: f64,
    pub dt: f64,
}

impl Default for ChordConfig {
    fn default() -> Self {
        ChordConfig {
            samples: DEFAULT_SAMPLES,
            horizon: 3.0,
            dt: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChordSearch {
    pub config: ChordConfig,
    pub reports: Vec<ChordReport>,
}

impl ChordSearch {
    pub fn chords(&self) -> usize {
        self.reports.iter().filter(|r| r.hit.is_some()).count()
    }

    pub fn failures(&self) -> usize {
        self.reports.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn flagged(&self) -> usize {
        self.reports.iter().filter(|r| r.diagnostics.flagged).count()
    }

    /// Shortest observed chord.
    pub fn min_time(&self) -> Option<f64> {
        self.reports.iter().filter_map(|r| r.hit).min_by(f64::total_cmp)
    }

    /// Horizon free of chords: the shortest chord, or the horizon if none was seen.
    pub fn chord_free_horizon(&self) -> f64 {
        self.min_time().unwrap_or(self.config.horizon)
    }
}

struct HitDetector<'a> {
    h: &'a HamiltonianModel,
    target: &'a FloatRegion,
    dt: f64,
    hit: Option<f64>,
    velocity: Vec<f64>,
}

impl Observer for HitDetector<'_> {
    fn start(&mut self) {
        self.hit = None;
    }

    fn step(&mut self, t0: f64, z0: &[f64], t1: f64, z1: &[f64]) -> ControlFlow<()> {
        self.h.sgrad(z1, &mut self.velocity);
        let speed = self.velocity.iter().map(|v| v * v).sum::<f64>().sqrt();
        // Closed regions plus a tolerance of one step at the current speed.
        let tol = self.dt * speed + 1e-12;
        let len = z0.iter().zip(z1).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let (d0, d1) = (self.target.distance(z0), self.target.distance(z1));
        // Distance is 1-Lipschitz, so no point of the segment is closer than this.
        if (d0 + d1 - len) / 2.0 > tol {
            return ControlFlow::Continue(());
        }
        let (d, s) = self.target.segment_distance(z0, z1);
        if d > tol {
            return ControlFlow::Continue(());
        }
        let mut t = t0 + s * (t1 - t0);
        if d > 1e-9 && speed > 0.0 {
            // Approaching but not yet inside: extrapolate the remaining gap.
            t += d / speed;
        }
        self.hit = Some(t);
        ControlFlow::Break(())
    }
}

/// First entry into `target` of the flow from `start`, up to `config.horizon`.
pub fn first_hit(h: &HamiltonianModel, start: &[f64], target: &Region, config: &ChordConfig) -> ChordReport {
    first_hit_compiled(h, start, &target.compile(), config)
}

fn first_hit_compiled(h: &HamiltonianModel, start: &[f64], target: &FloatRegion, config: &ChordConfig) -> ChordReport {
    let mut det = HitDetector {
        h,
        target,
        dt: config.dt,
        hit: None,
        velocity: vec![0.0; h.chart.dim],
    };
    let base = ChordReport {
        start: start.to_vec(),
        hit: None,
        diagnostics: RunDiagnostics::default(),
        error: None,
    };
    if let Err(e) = check_start(h, start, config.horizon, config.dt) {
        return ChordReport {
            error: Some(e.to_string()),
            ..base
        };
    }
    h.sgrad(start, &mut det.velocity);
    if det.velocity.iter().all(|v| *v == 0.0) {
        // A zero of the field is a fixed point of the flow.
        return base;
    }
    match run(h, start, config.horizon, config.dt, &mut det) {
        Outcome::Finished(diagnostics) => ChordReport {
            hit: det.hit,
            diagnostics,
            ..base
        },
        Outcome::Escaped { diagnostics, t } => ChordReport {
            diagnostics,
            error: Some(format!("trajectory left the domain at t = {t}")),
            ..base
        },
    }
}

/// Flows every sampled start of `X₀` and records its first entry into `X₁`.
///
/// Starts are deterministic (Halton points per component); runs are
/// parallel and merged in start order.
pub fn find_chords(h: &HamiltonianModel, q: &AdmissibleQuadruple, config: ChordConfig) -> ChordSearch {
    let starts = q.x0.samples(config.samples);
    let target = q.x1.compile();
    let reports = starts.par_iter().map(|z| first_hit_compiled(h, z, &target, &config)).collect();
    ChordSearch { config, reports }
}

/// `min_{Y₁} H − max_{Y₀} H` over sampled points.
pub fn delta_h(h: &HamiltonianModel, q: &AdmissibleQuadruple, samples: usize) -> Result<f64> {
    if q.y0.is_empty() || q.y1.is_empty() || samples == 0 {
        return Err(Error::InvalidModel("cannot sample an empty Y region".into()));
    }
    let max_y0 = q.y0.samples(samples).iter().map(|z| h.value(z)).fold(f64::NEG_INFINITY, f64::max);
    let min_y1 = q.y1.samples(samples).iter().map(|z| h.value(z)).fold(f64::INFINITY, f64::min);
    Ok(min_y1 - max_y0)
}

/// Upper estimate of the bracket invariant from one admissible pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PbEstimate {
    /// `max {F, G}` over the grid.
    pub max_bracket: f64,
    pub points: usize,
    /// `1/max`, or `+∞` when the bracket never exceeds the noise floor.
    pub certificate: f64,
}

/// Bracket values below this count as zero.
pub const BRACKET_FLOOR: f64 = 1e-8;

fn check_pair(f: &HamiltonianModel, g: &HamiltonianModel, q: &AdmissibleQuadruple) -> Result<()> {
    const TOL: f64 = 1e-12;
    let checks: [(&Region, &HamiltonianModel, bool, &str); 4] = [
        (&q.x0, f, false, "F ≤ 0 on X₀"),
        (&q.x1, f, true, "F ≥ 1 on X₁"),
        (&q.y0, g, false, "G ≤ 0 on Y₀"),
        (&q.y1, g, true, "G ≥ 1 on Y₁"),
    ];
    for (region, m, at_least_one, what) in checks {
        for z in region.samples(256) {
            let v = m.value(&z);
            let ok = if at_least_one { v >= 1.0 - TOL } else { v <= TOL };
            if !ok {
                return Err(Error::InvalidPair(format!("{what} fails at {z:?} (value {v})")));
            }
        }
    }
    Ok(())
}

/// Grid maximum of `{F, G}` for a pair satisfying the quadruple constraints.
///
/// The grid is `grid × grid` cell centres in two dimensions and `grid²`
/// Halton points otherwise, over the domain box; unbounded coordinates use
/// the extent of the quadruple widened by one.
pub fn estimate_pb_upper(f: &HamiltonianModel, g: &HamiltonianModel, q: &AdmissibleQuadruple, grid: usize) -> Result<PbEstimate> {
    if f.chart != g.chart {
        return Err(Error::InvalidPair("the two models use different charts".into()));
    }
    if grid == 0 {
        return Err(Error::InvalidModel("grid must be positive".into()));
    }
    check_pair(f, g, q)?;
    let dim = f.chart.dim;
    let pts: Vec<Vec<f64>> = [&q.x0, &q.x1, &q.y0, &q.y1].iter().flat_map(|r| r.samples(16)).collect();
    let window: Vec<(f64, f64)> = (0..dim)
        .map(|i| {
            let own = f.domain.bounds[i].or(g.domain.bounds[i]);
            own.unwrap_or_else(|| {
                let lo = pts.iter().map(|z| z[i]).fold(f64::INFINITY, f64::min);
                let hi = pts.iter().map(|z| z[i]).fold(f64::NEG_INFINITY, f64::max);
                (lo - 1.0, hi + 1.0)
            })
        })
        .collect();
    let at = |u: &[f64]| -> Vec<f64> { window.iter().zip(u).map(|((lo, hi), t)| lo + t * (hi - lo)).collect() };
    let count = grid * grid;
    let cells: Vec<Vec<f64>> = if dim == 2 {
        (0..count)
            .map(|i| {
                let (a, b) = (i / grid, i % grid);
                at(&[(a as f64 + 0.5) / grid as f64, (b as f64 + 0.5) / grid as f64])
            })
            .collect()
    } else {
        (0..count).map(|i| at(&crate::quadruple::halton(i, dim))).collect()
    };
    let h = 1e-5 * window.iter().map(|(lo, hi)| hi - lo).fold(0.0, f64::max).max(1.0);
    let values: Vec<f64> = cells
        .par_iter()
        .filter(|z| f.domain.contains(z) && g.domain.contains(z))
        .map(|z| poisson_bracket(f, g, z, h))
        .collect::<Result<_>>()?;
    let max_bracket = values.iter().copied().fold(0.0, f64::max);
    Ok(PbEstimate {
        max_bracket,
        points: values.len(),
        certificate: if max_bracket <= BRACKET_FLOOR {
            f64::INFINITY
        } else {
            max_bracket.recip()
        },
    })
}

/// Distance from the box `target` of the projection to `coords` of the
/// time-`t` images of `starts`; positive means every image left the box.
pub fn projected_displacement(
    h: &HamiltonianModel,
    starts: &[Vec<f64>],
    t: f64,
    dt: f64,
    coords: (usize, usize),
    target: [(f64, f64); 2],
) -> Result<f64> {
    let ends: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|z| integrate(h, z, t, dt).map(|tr| tr.end().map(<[f64]>::to_vec).unwrap_or_default()))
        .collect::<Result<_>>()?;
    Ok(ends
        .iter()
        .map(|z| {
            let gap = |v: f64, (lo, hi): (f64, f64)| (lo - v).max(v - hi).max(0.0);
            gap(z[coords.0], target[0]).hypot(gap(z[coords.1], target[1]))
        })
        .fold(f64::INFINITY, f64::min))
}

/// Whether a claimed lower bound for the invariant is compatible with an
/// observed chord-free horizon: `claimed ≤ horizon·Δ_H + margin`.
pub fn consistent_with_horizon(claimed: f64, horizon: f64, delta_h: f64, margin: f64) -> bool {
    claimed <= horizon * delta_h + margin
}

/// Size of the thread pool requested through `LAGFLUX_THREADS`, if set and positive.
pub fn requested_threads() -> Option<usize> {
    std::env::var("LAGFLUX_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}
