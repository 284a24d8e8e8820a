//! Explicit Hamiltonians with analytic gradients.
//!
//! Sign convention: with `ω = Σ dpᵢ ∧ dqᵢ` and `i_X ω = −dH`, the field is
//! `ṗᵢ = −∂H/∂qᵢ`, `q̇ᵢ = ∂H/∂pᵢ`, and `{F, G} = Σ ∂F/∂qᵢ ∂G/∂pᵢ − ∂F/∂pᵢ ∂G/∂qᵢ`.
//! In particular `{p₁, q₁} = −1`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::lattice::{int, to_f64, Rational};
use crate::quadruple::{rotate, AdmissibleQuadruple, Label, StripPartition};

/// Darboux pairs `(p-index, q-index)` of a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub dim: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl Chart {
    /// `(p₁, …, pₙ, q₁, …, qₙ)`.
    pub fn standard(n: usize) -> Self {
        Chart {
            dim: 2 * n,
            pairs: (0..n).map(|i| (i, n + i)).collect(),
        }
    }

    /// `(x, y, θ, p)` with `ω = dx ∧ dy + dp ∧ dθ`.
    pub fn disk_cotangent() -> Self {
        Chart {
            dim: 4,
            pairs: vec![(0, 1), (3, 2)],
        }
    }

    /// The symplectic gradient from an ordinary gradient.
    pub fn sgrad(&self, grad: &[f64], out: &mut [f64]) {
        for &(p, q) in &self.pairs {
            out[p] = -grad[q];
            out[q] = grad[p];
        }
    }
}

/// A closed coordinate box, optionally intersected with a disk in two coordinates.
/// Unbounded or periodic coordinates carry no bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub bounds: Vec<Option<(f64, f64)>>,
    pub disk: Option<(usize, usize, f64)>,
}

impl Domain {
    pub fn everywhere(dim: usize) -> Self {
        Domain {
            bounds: vec![None; dim],
            disk: None,
        }
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        let in_box = self
            .bounds
            .iter()
            .zip(z)
            .all(|(b, v)| v.is_finite() && b.is_none_or(|(lo, hi)| *v >= lo && *v <= hi));
        let in_disk = self.disk.is_none_or(|(i, j, r)| z[i].hypot(z[j]) <= r);
        in_box && in_disk
    }
}

pub trait Field: Send + Sync + fmt::Debug {
    fn value(&self, z: &[f64]) -> f64;
    fn gradient(&self, z: &[f64], out: &mut [f64]);
}

/// An evaluable Hamiltonian with its chart, domain and declared constants.
#[derive(Clone)]
pub struct HamiltonianModel {
    pub name: String,
    pub chart: Chart,
    pub domain: Domain,
    pub delta: f64,
    /// Declared constants, printed exactly.
    pub constants: BTreeMap<String, String>,
    /// Declared `max_{Y₀} H` and `min_{Y₁} H` on the bound quadruple.
    pub declared: Option<(f64, f64)>,
    field: Arc<dyn Field>,
}

impl fmt::Debug for HamiltonianModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianModel")
            .field("name", &self.name)
            .field("chart", &self.chart)
            .field("delta", &self.delta)
            .field("constants", &self.constants)
            .field("declared", &self.declared)
            .finish()
    }
}

impl HamiltonianModel {
    pub fn new(name: &str, chart: Chart, domain: Domain, field: impl Field + 'static) -> Self {
        HamiltonianModel {
            name: name.to_string(),
            chart,
            domain,
            delta: 0.0,
            constants: BTreeMap::new(),
            declared: None,
            field: Arc::new(field),
        }
    }

    /// A model from a closure; the gradient is a central difference with step `1e-6`.
    pub fn from_fn(name: &str, chart: Chart, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        let domain = Domain::everywhere(chart.dim);
        Self::new(name, chart, domain, FnField(Box::new(f)))
    }

    /// `H = Σ cᵢ zᵢ` on the whole chart.
    pub fn linear(chart: Chart, coeffs: &[f64]) -> Self {
        let domain = Domain::everywhere(chart.dim);
        Self::new("linear", chart, domain, Linear(coeffs.to_vec()))
    }

    /// `H = π(p² + q²)` on the plane; every orbit has period 1.
    pub fn harmonic() -> Self {
        Self::new("harmonic", Chart::standard(1), Domain::everywhere(2), Harmonic)
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        self.field.value(z)
    }

    pub fn gradient(&self, z: &[f64], out: &mut [f64]) {
        self.field.gradient(z, out)
    }

    /// The Hamiltonian vector field at `z`.
    pub fn sgrad(&self, z: &[f64], out: &mut [f64]) {
        let mut g = vec![0.0; self.chart.dim];
        self.field.gradient(z, &mut g);
        self.chart.sgrad(&g, out);
    }

    fn declare(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.constants.insert(key.to_string(), value.to_string());
        self
    }
}

struct FnField(Box<dyn Fn(&[f64]) -> f64 + Send + Sync>);

impl fmt::Debug for FnField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnField")
    }
}

impl Field for FnField {
    fn value(&self, z: &[f64]) -> f64 {
        (self.0)(z)
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        let h = 1e-6;
        let mut w = z.to_vec();
        for i in 0..z.len() {
            w[i] = z[i] + h;
            let a = (self.0)(&w);
            w[i] = z[i] - h;
            let b = (self.0)(&w);
            w[i] = z[i];
            out[i] = (a - b) / (2.0 * h);
        }
    }
}

#[derive(Debug)]
struct Linear(Vec<f64>);

impl Field for Linear {
    fn value(&self, z: &[f64]) -> f64 {
        self.0.iter().zip(z).map(|(c, v)| c * v).sum()
    }
    fn gradient(&self, _z: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.0);
    }
}

#[derive(Debug)]
struct Harmonic;

impl Field for Harmonic {
    fn value(&self, z: &[f64]) -> f64 {
        PI * (z[0] * z[0] + z[1] * z[1])
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        out[0] = TAU * z[0];
        out[1] = TAU * z[1];
    }
}

/// Antiderivative of the biweight CDF: the smoothed `max(t, 0)` on `[−1, 1]`.
fn smooth_ramp(t: f64) -> (f64, f64) {
    if t <= -1.0 {
        (0.0, 0.0)
    } else if t >= 1.0 {
        (t, 1.0)
    } else {
        let t2 = t * t;
        let ramp = 15.0 / 16.0 * (t2 / 2.0 - t2 * t2 / 6.0 + t2 * t2 * t2 / 30.0) + t / 2.0 + 5.0 / 32.0;
        let cdf = 15.0 / 16.0 * (t - 2.0 * t2 * t / 3.0 + t2 * t2 * t / 5.0) + 0.5;
        (ramp, cdf)
    }
}

/// A piecewise-linear function of one variable, constant outside its knots,
/// convolved with a biweight bump of half-width `delta`.
///
/// The smoothing leaves the function untouched farther than `delta` from every knot.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    knots: Vec<(f64, f64)>,
    delta: f64,
    /// Slope jumps at each knot.
    jumps: Vec<f64>,
}

impl Profile {
    pub fn new(knots: Vec<(f64, f64)>, delta: f64) -> Self {
        assert!(!knots.is_empty(), "profile needs a knot");
        assert!(knots.windows(2).all(|w| w[0].0 < w[1].0), "knots must increase");
        let slopes: Vec<f64> = knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        let jumps = (0..knots.len())
            .map(|j| {
                let after = slopes.get(j).copied().unwrap_or(0.0);
                let before = if j == 0 { 0.0 } else { slopes[j - 1] };
                after - before
            })
            .collect();
        Profile { knots, delta, jumps }
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Profile::new(self.knots.clone(), delta)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The unsmoothed generator and its slope (right-continuous at knots).
    fn linear_eval(&self, x: f64) -> (f64, f64) {
        let k = &self.knots;
        let i = k.partition_point(|(kx, _)| *kx <= x);
        if i == 0 {
            (k[0].1, 0.0)
        } else if i == k.len() {
            (k[i - 1].1, 0.0)
        } else {
            let ((x0, v0), (x1, v1)) = (k[i - 1], k[i]);
            if v0 == v1 {
                return (v0, 0.0);
            }
            let slope = (v1 - v0) / (x1 - x0);
            (v0 + (x - x0) * slope, slope)
        }
    }

    pub fn linear_value(&self, x: f64) -> f64 {
        self.linear_eval(x).0
    }

    /// Value and derivative. Away from the knots this is the generator itself,
    /// so plateau values are exact.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let (mut v, mut d) = self.linear_eval(x);
        if self.delta <= 0.0 {
            return (v, d);
        }
        for ((k, _), c) in self.knots.iter().zip(&self.jumps) {
            let t = (x - k) / self.delta;
            if t.abs() < 1.0 {
                let (r, cdf) = smooth_ramp(t);
                v += c * self.delta * (r - t.max(0.0));
                d += c * (cdf - if t >= 0.0 { 1.0 } else { 0.0 });
            }
        }
        (v, d)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).0
    }
}

/// Knots of the strip profile: rises across `X₁`, falls across `X₀`, flat on `Y` intervals.
fn strip_knots(p: &StripPartition, delta: f64, height: f64) -> Vec<(f64, f64)> {
    let mut knots = Vec::new();
    for (l, r, label) in p.intervals.iter().rev() {
        let (l, r) = (to_f64(l), to_f64(r));
        match label {
            Label::X1 => {
                knots.push((l + 2.0 * delta, 0.0));
                knots.push((r - 2.0 * delta, height));
            }
            Label::X0 => {
                knots.push((l + 2.0 * delta, height));
                knots.push((r - 2.0 * delta, 0.0));
            }
            _ => {}
        }
    }
    knots
}

#[derive(Debug)]
struct StripField {
    g: Profile,
    cutoff: Profile,
}

impl Field for StripField {
    fn value(&self, z: &[f64]) -> f64 {
        self.g.value(z[0]) * self.cutoff.value(z[1])
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        let (g, dg) = self.g.eval(z[0]);
        let (c, dc) = self.cutoff.eval(z[1]);
        out[0] = dg * c;
        out[1] = g * dc;
    }
}

/// The surface-model Hamiltonian on `Q_ε(A) = [−ε, A+ε] × [−ε, 1+ε]`, chart `(x, y)`.
///
/// `G = g(x)·χ(y)` with `g` the smoothed strip profile and `χ` a cutoff equal
/// to 1 on `[−ε/4, 1 + ε/4]`. Returns the model and its profile `g`.
pub fn build_surface_g(a: &Rational, k: u32, eps: &Rational, delta: &Rational) -> Result<(HamiltonianModel, Profile)> {
    if k == 0 || !a.is_positive() || !eps.is_positive() || !delta.is_positive() {
        return Err(Error::InvalidModel("A, k, ε, δ must be positive".into()));
    }
    let margin = a / int(k as i64) - int(4) * eps;
    if !margin.is_positive() {
        return Err(Error::InvalidModel(format!("A/k − 4ε = {margin} is not positive")));
    }
    if delta >= &(eps / int(4)) {
        return Err(Error::InvalidModel(format!("δ = {delta} must be below ε/4")));
    }
    let p = StripPartition::new(a, k, eps).map_err(|e| Error::InvalidModel(e.to_string()))?;
    let (af, ef, df) = (to_f64(a), to_f64(eps), to_f64(delta));
    let mut knots = strip_knots(&p, df, 1.0);
    knots.push((af + 2.0 * df, 1.0));
    knots.push((af + ef / 2.0, 0.0));
    let g = Profile::new(knots, df);
    let cutoff = Profile::new(
        vec![(-0.75 * ef, 0.0), (-0.5 * ef, 1.0), (1.0 + 0.5 * ef, 1.0), (1.0 + 0.75 * ef, 0.0)],
        df,
    );
    let domain = Domain {
        bounds: vec![Some((-ef, af + ef)), Some((-ef, 1.0 + ef))],
        disk: None,
    };
    let mut m = HamiltonianModel::new("surface", Chart::standard(1), domain, StripField { g: g.clone(), cutoff })
        .declare("A", a)
        .declare("k", k)
        .declare("eps", eps)
        .declare("delta", delta)
        .declare("slope_bound", (a / int(k as i64) - int(4) * eps).recip());
    m.delta = df;
    m.declared = Some((0.0, 1.0));
    Ok((m, g))
}

/// Largest slope of `g` over the `X₁` intervals of the partition, sampled on a fine grid.
pub fn max_slope_on(g: &Profile, intervals: &[(Rational, Rational)]) -> f64 {
    let mut best = 0.0f64;
    for (l, r) in intervals {
        let (l, r) = (to_f64(l), to_f64(r));
        for i in 0..=2000 {
            let x = l + (r - l) * i as f64 / 2000.0;
            best = best.max(g.eval(x).1);
        }
    }
    best
}

#[derive(Debug)]
struct SplitField {
    g: Profile,
}

impl Field for SplitField {
    fn value(&self, z: &[f64]) -> f64 {
        z[0] + self.g.value(z[1])
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[0] = 1.0;
        out[1] = self.g.eval(z[1]).1;
    }
}

/// Whether `C` satisfies `(xₙ/k − 4ε)/√x₁ > C > √x₁`, decided exactly.
pub fn split_constant_feasible(x1: &Rational, xn: &Rational, k: u32, eps: &Rational, c: &Rational) -> bool {
    let l = xn / int(k as i64) - int(4) * eps;
    c.is_positive() && l.is_positive() && c * c > *x1 && &l * &l > c * c * x1
}

/// The open interval of admissible constants `C`, in floating point.
pub fn split_constant_range(x1: &Rational, xn: &Rational, k: u32, eps: &Rational) -> Option<(f64, f64)> {
    let s = to_f64(x1).sqrt();
    let l = to_f64(&(xn / int(k as i64) - int(4) * eps));
    (l / s > s).then_some((s, l / s))
}

/// Exact square root of a rational that is a perfect square.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Rational::new(n, d))
}

/// `H = p₁ + G(p₂)` on `ℝ⁴` with chart `(p₁, p₂, q₁, q₂)`; `G` is the strip profile of height `C` on `[0, xₙ]`.
pub fn build_split_h(x1: &Rational, xn: &Rational, k: u32, eps: &Rational, c: &Rational, delta: &Rational) -> Result<HamiltonianModel> {
    if k == 0 || !x1.is_positive() || !xn.is_positive() || !eps.is_positive() || !delta.is_positive() {
        return Err(Error::InvalidModel("x₁, xₙ, k, ε, δ must be positive".into()));
    }
    if !split_constant_feasible(x1, xn, k, eps, c) {
        return Err(Error::InvalidModel(match split_constant_range(x1, xn, k, eps) {
            Some((lo, hi)) => format!("C = {c} is outside the admissible range ({lo}, {hi})"),
            None => "no admissible constant C exists".to_string(),
        }));
    }
    if delta >= &(eps / int(4)) {
        return Err(Error::InvalidModel(format!("δ = {delta} must be below ε/4")));
    }
    let p = StripPartition::new(xn, k, eps).map_err(|e| Error::InvalidModel(e.to_string()))?;
    let g = Profile::new(strip_knots(&p, to_f64(delta), to_f64(c)), to_f64(delta));
    let mut m = HamiltonianModel::new("split", Chart::standard(2), Domain::everywhere(4), SplitField { g })
        .declare("x1", x1)
        .declare("xn", xn)
        .declare("k", k)
        .declare("eps", eps)
        .declare("C", c)
        .declare("delta", delta);
    m.delta = to_f64(delta);
    m.declared = Some((to_f64(x1).sqrt(), to_f64(c)));
    Ok(m)
}

fn smoothstep(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0)
    } else {
        (t * t * (3.0 - 2.0 * t), 6.0 * t * (1.0 - t))
    }
}

/// The sector function of the rotating model, in area–angle coordinates.
///
/// With `s = π(x² + y²)` and `ξ` the angle in turns, `dx ∧ dy = ds ∧ dξ`.
/// Each sector of angular width `1/m` is centred at the `Y₁` arc; `w` is the
/// angular offset from that centre and `d = a − s` the depth below the circle.
/// Level sets `{G = c}` are superellipse arcs that enter through the `X₀` arc
/// and leave through the `X₁` arc. Deep down their half-width shrinks
/// linearly to that of `Y₁` while the depth is chosen so that width times
/// depth is linear in `c`; the enclosed area is then nearly linear in `c` and
/// every chord takes nearly `a/m`. Near the circle a funnel narrows them to
/// meet the arcs.
#[derive(Clone, Debug)]
pub struct SectorShape {
    pub a: f64,
    pub m: u32,
    /// Half-width of a sector, `1/(2m)` turns.
    pub half_width: f64,
    /// Angular margin kept free at the sides of a sector.
    pub side_margin: f64,
    /// Area kept free around the origin.
    pub core: f64,
    /// Depth over which level sets widen from their edge to their deep width.
    pub funnel: f64,
    /// Width of the cutoff outside the circle.
    pub outer: f64,
    pub exponent: i32,
}

impl SectorShape {
    fn edge_width(&self, c: f64) -> (f64, f64) {
        let w = self.half_width;
        (0.75 * w - 0.5 * c * w, -0.5 * w)
    }

    /// Half-width deep inside: from `W − ℓ` at level 0 down to the `Y₁` half-width `W/4` at level 1.
    fn deep_width(&self, c: f64) -> (f64, f64) {
        let w = self.half_width;
        let slope = 0.75 * w - self.side_margin;
        (w - self.side_margin - c * slope, -slope)
    }

    /// Half-width `F(c, d)` and its partials `(F, F_c, F_d)`.
    fn width(&self, c: f64, d: f64) -> (f64, f64, f64) {
        let (fe, fe_c) = self.edge_width(c);
        let (fd, fd_c) = self.deep_width(c);
        let (t, dt) = smoothstep(d / self.funnel);
        (fe + (fd - fe) * t, fe_c + (fd_c - fe_c) * t, (fd - fe) * dt / self.funnel)
    }

    /// Depth `g(c)` of the level set and `g′(c)`; deep width times depth is linear in `c`.
    fn depth(&self, c: f64) -> (f64, f64) {
        let k = (self.a - self.core) * (self.half_width - self.side_margin);
        let (fd, fd_c) = self.deep_width(c);
        (k * (1.0 - c) / fd, k * (-fd - (1.0 - c) * fd_c) / (fd * fd))
    }

    /// `Φ(w, d, c)` and `∂Φ/∂c`; the level `c` solves `Φ = 0`.
    fn phi(&self, w: f64, d: f64, c: f64) -> (f64, f64) {
        let q = self.exponent;
        let (f, f_c, _) = self.width(c, d);
        let (g, g_c) = self.depth(c);
        let a = (w.abs() / f).powi(q);
        let b = if d <= 0.0 { 0.0 } else { (d / g).powi(q) };
        let qf = q as f64;
        (a + b - 1.0, qf * a * (-f_c / f) + qf * b * (-g_c / g))
    }

    /// Edge profile `e(w)` on the circle and `e′(w)`.
    fn edge(&self, w: f64) -> (f64, f64) {
        let hw = self.half_width;
        let raw = (0.75 * hw - w.abs()) / (0.5 * hw);
        if raw >= 1.0 {
            (1.0, 0.0)
        } else if raw <= 0.0 {
            (0.0, 0.0)
        } else {
            (raw, -w.signum() / (0.5 * hw))
        }
    }

    /// `(G, G_w, G_d)` at offset `w` and depth `d`.
    pub fn eval(&self, w: f64, d: f64) -> (f64, f64, f64) {
        if d <= 0.0 {
            let (e, de) = self.edge(w);
            let (t, dt) = smoothstep(-d / self.outer);
            let chi = 1.0 - t;
            // d/dd χ(−d/outer) = +dt/outer
            return (e * chi, de * chi, e * dt / self.outer);
        }
        if d >= self.a - self.core {
            return (0.0, 0.0, 0.0);
        }
        let (phi0, _) = self.phi(w, d, 0.0);
        if phi0 >= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let c = self.solve_level(w, d);
        let q = self.exponent;
        let qf = q as f64;
        let (f, _, f_d) = self.width(c, d);
        let (g, _) = self.depth(c);
        let (_, phi_c) = self.phi(w, d, c);
        let a = (w.abs() / f).powi(q);
        let phi_w = if w == 0.0 { 0.0 } else { qf * a / w };
        let phi_d = qf * a * (-f_d / f) + qf * (d / g).powi(q) / d;
        (c, -phi_w / phi_c, -phi_d / phi_c)
    }

    fn solve_level(&self, w: f64, d: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..6 {
            let mid = 0.5 * (lo + hi);
            if self.phi(w, d, mid).0 < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut c = 0.5 * (lo + hi);
        for _ in 0..60 {
            let (v, dv) = self.phi(w, d, c);
            if v < 0.0 {
                lo = c;
            } else {
                hi = c;
            }
            let mut next = c - v / dv;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - c).abs() < 1e-15 || hi - lo < 1e-15 {
                return next;
            }
            c = next;
        }
        c
    }

    /// Area of `{G ≥ c}` in one sector, by quadrature (used as an oracle for chord times).
    pub fn level_area(&self, c: f64) -> f64 {
        let (g, _) = self.depth(c);
        let n = 4000;
        let q = self.exponent as f64;
        let h = g / n as f64;
        // Simpson's rule in d.
        (0..=n)
            .map(|i| {
                let d = i as f64 * h;
                let (f, _, _) = self.width(c, d);
                let wgt = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                wgt * 2.0 * f * (1.0 - (d / g).powf(q)).max(0.0).powf(1.0 / q)
            })
            .sum::<f64>()
            * h
            / 3.0
    }

    /// Offset from the sector centre for an angle `ξ` in turns.
    pub fn offset(&self, xi: f64) -> f64 {
        let period = 2.0 * self.half_width;
        let centre = 0.75 * self.half_width;
        (xi - centre + self.half_width).rem_euclid(period) - self.half_width
    }
}

#[derive(Debug)]
struct ChekanovField {
    shape: SectorShape,
    twist: f64,
    cutoff: Profile,
}

impl ChekanovField {
    /// `(G, ∂G/∂x, ∂G/∂y, ∂G/∂ξ)` at a planar point.
    fn planar(&self, x: f64, y: f64) -> (f64, f64, f64, f64) {
        let r2 = x * x + y * y;
        if r2 == 0.0 {
            return (0.0, 0.0, 0.0, 0.0);
        }
        let s = PI * r2;
        let xi = y.atan2(x) / TAU;
        let w = self.shape.offset(xi);
        let (g, g_w, g_d) = self.shape.eval(w, self.shape.a - s);
        // ξ_x = −y/(2π r²), ξ_y = x/(2π r²); d_x = −2πx, d_y = −2πy.
        let gx = g_w * (-y / (TAU * r2)) + g_d * (-TAU * x);
        let gy = g_w * (x / (TAU * r2)) + g_d * (-TAU * y);
        (g, gx, gy, g_w)
    }
}

impl Field for ChekanovField {
    fn value(&self, z: &[f64]) -> f64 {
        let (u, v) = rotate(z[0], z[1], -self.twist * z[2]);
        self.planar(u, v).0 * self.cutoff.value(z[3])
    }

    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        let (u, v) = rotate(z[0], z[1], -self.twist * z[2]);
        let (g, gu, gv, g_xi) = self.planar(u, v);
        let (b, db) = self.cutoff.eval(z[3]);
        // The chart gradient of G(R(−nθ)z) is R(nθ)∇G; turning θ turns the argument backwards.
        let (gx, gy) = rotate(gu, gv, self.twist * z[2]);
        out[0] = gx * b;
        out[1] = gy * b;
        out[2] = -self.twist * g_xi * b;
        out[3] = g * db;
    }
}

/// The rotating-model Hamiltonian `H(x, y, θ, p) = G(R(−nθ)(x, y))·β(p)` on `D(k) × T*_k S¹`.
///
/// The rotation undoes the one in [`crate::quadruple::chekanov_quadruple`], whose regions
/// sit at `R(nθ)` of fixed arcs. Returns the model and the sector shape of `G`.
pub fn build_chekanov_h(a: &Rational, m: u32, n: i64, k: &Rational, eps: &Rational, delta: &Rational) -> Result<(HamiltonianModel, SectorShape)> {
    if !a.is_positive() || m == 0 || !eps.is_positive() || !delta.is_positive() {
        return Err(Error::InvalidModel("a, m, ε, δ must be positive".into()));
    }
    if k <= a || *k <= int(4) * a * int(n.abs()) {
        return Err(Error::InvalidModel(format!("k = {k} must exceed both a and 4a|n|")));
    }
    let c_big = std::cmp::max(int(4) * a * int(n.abs()), int(1));
    if c_big >= *k {
        return Err(Error::InvalidModel(format!("cutoff level C = {c_big} must be below k = {k}")));
    }
    let (af, ef, mf) = (to_f64(a), to_f64(eps), m as f64);
    let half_width = 1.0 / (2.0 * mf);
    if ef >= af / (4.0 * mf) {
        return Err(Error::InvalidModel(format!("ε = {eps} must be below a/(4m)")));
    }
    let shape = SectorShape {
        a: af,
        m,
        half_width,
        side_margin: (ef / (8.0 * af)).min(half_width / 8.0),
        core: (ef * mf / 4.0).min(af / 8.0),
        funnel: (ef * mf).min(af / 4.0).max(to_f64(delta)),
        outer: (af / 8.0).min((to_f64(k) - af) / 2.0),
        exponent: 16,
    };
    let cf = to_f64(&c_big);
    let h = (to_f64(k) - cf) / 2.0;
    let cutoff = Profile::new(
        vec![(-cf - 0.75 * h, 0.0), (-cf - 0.25 * h, 1.0), (cf + 0.25 * h, 1.0), (cf + 0.75 * h, 0.0)],
        0.25 * h,
    );
    let domain = Domain {
        bounds: vec![None, None, None, Some((-to_f64(k), to_f64(k)))],
        disk: Some((0, 1, (to_f64(k) / PI).sqrt())),
    };
    let field = ChekanovField {
        shape: shape.clone(),
        twist: n as f64,
        cutoff,
    };
    let mut model = HamiltonianModel::new("chekanov", Chart::disk_cotangent(), domain, field)
        .declare("a", a)
        .declare("m", m)
        .declare("n", n)
        .declare("k", k)
        .declare("eps", eps)
        .declare("delta", delta)
        .declare("C", &c_big);
    model.delta = to_f64(delta);
    model.declared = Some((0.0, 1.0));
    Ok((model, shape))
}

/// The cutoff level `C = max(4a|n|, 1)` below which `β ≡ 1`.
pub fn chekanov_cutoff_level(a: &Rational, n: i64) -> Rational {
    std::cmp::max(int(4) * a * int(n.abs()), int(1))
}

#[derive(Debug)]
struct XOnly(Profile);

impl Field for XOnly {
    fn value(&self, z: &[f64]) -> f64 {
        self.0.value(z[0])
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        out[0] = self.0.eval(z[0]).1;
        out[1] = 0.0;
    }
}

/// Knots for a profile pinned to `value(label)` on each labelled interval and
/// interpolating across the others; `ends` pins the value just outside both ends.
fn pinned_knots(
    intervals: &[(f64, f64, Label)],
    delta: f64,
    value: impl Fn(Label) -> Option<f64>,
    ends: Option<f64>,
) -> Vec<(f64, f64)> {
    let pins: Vec<Option<f64>> = intervals.iter().map(|(_, _, l)| value(*l)).collect();
    let mut knots = Vec::new();
    for (i, (l, r, _)) in intervals.iter().enumerate() {
        if pins[i].is_some() {
            continue;
        }
        let before = pins[..i].iter().rev().flatten().next().copied().or(ends);
        let after = pins[i + 1..].iter().flatten().next().copied().or(ends);
        let (before, after) = match (before, after) {
            (Some(b), Some(a)) => (b, a),
            (Some(v), None) | (None, Some(v)) => (v, v),
            (None, None) => continue,
        };
        if before != after || knots.is_empty() {
            knots.push((l + 2.0 * delta, before));
            knots.push((r - 2.0 * delta, after));
        }
    }
    knots
}

/// A commuting pair `(F, G)` on the annulus `(−ε, ε) × ℝ/2ℤ`, both functions of `x` alone.
///
/// `F` is 0 on `X₀` and 1 on `X₁`, changing across the `Y` intervals; `G` is
/// 0 on `Y₀` and 1 on `Y₁`, changing across the `X` intervals, and vanishes
/// near `x = ±ε`.
pub fn build_annulus_fg(eps: &Rational, k: u32) -> Result<(HamiltonianModel, HamiltonianModel)> {
    if !eps.is_positive() || k == 0 {
        return Err(Error::InvalidModel("ε and k must be positive".into()));
    }
    let count = 4 * k as usize + 1;
    let e = to_f64(eps);
    let len = 2.0 * e / count as f64;
    let delta = len / 8.0;
    let intervals: Vec<(f64, f64, Label)> = (0..count)
        .map(|i| (-e + len * i as f64, -e + len * (i + 1) as f64, Label::for_index(i + 1)))
        .collect();
    let f_knots = pinned_knots(
        &intervals,
        delta,
        |l| match l {
            Label::X0 => Some(0.0),
            Label::X1 => Some(1.0),
            _ => None,
        },
        None,
    );
    let g_knots = pinned_knots(
        &intervals,
        delta,
        |l| match l {
            Label::Y0 => Some(0.0),
            Label::Y1 => Some(1.0),
            _ => None,
        },
        Some(0.0),
    );
    let domain = Domain {
        bounds: vec![Some((-e, e)), None],
        disk: None,
    };
    let mk = |name: &str, knots: Vec<(f64, f64)>| {
        let mut m = HamiltonianModel::new(name, Chart::standard(1), domain.clone(), XOnly(Profile::new(knots, delta)))
            .declare("eps", eps)
            .declare("k", k);
        m.delta = delta;
        m
    };
    let f = mk("annulus-F", f_knots);
    let mut g = mk("annulus-G", g_knots);
    g.declared = Some((0.0, 1.0));
    Ok((f, g))
}

/// `F = s(p)` and `G = s(1 − q)` for a smoothed unit ramp `s`; an admissible pair for
/// [`crate::quadruple::unit_box_quadruple`].
pub fn unit_box_pair() -> (HamiltonianModel, HamiltonianModel) {
    let ramp = Profile::new(vec![(0.1, 0.0), (0.9, 1.0)], 0.05);
    let domain = Domain {
        bounds: vec![Some((-0.5, 1.5)), Some((-0.5, 1.5))],
        disk: None,
    };
    let r2 = ramp.clone();
    let f = HamiltonianModel::new("box-F", Chart::standard(1), domain.clone(), XOnly(ramp));
    let g = HamiltonianModel::new("box-G", Chart::standard(1), domain, Flipped(r2));
    (f, g)
}

#[derive(Debug)]
struct Flipped(Profile);

impl Field for Flipped {
    fn value(&self, z: &[f64]) -> f64 {
        self.0.value(1.0 - z[1])
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = -self.0.eval(1.0 - z[1]).1;
    }
}

/// `{F, G}(z)` by central differences of step `h`.
pub fn poisson_bracket(f: &HamiltonianModel, g: &HamiltonianModel, z: &[f64], h: f64) -> Result<f64> {
    if !f.domain.contains(z) || !g.domain.contains(z) {
        return Err(Error::OutsideDomain(format!("{z:?} is outside a model domain")));
    }
    if f.chart != g.chart {
        return Err(Error::InvalidPair("the two models use different charts".into()));
    }
    let mut w = z.to_vec();
    let mut partial = |m: &HamiltonianModel, i: usize| {
        w[i] = z[i] + h;
        let a = m.value(&w);
        w[i] = z[i] - h;
        let b = m.value(&w);
        w[i] = z[i];
        (a - b) / (2.0 * h)
    };
    let mut total = 0.0;
    for &(p, q) in &f.chart.pairs {
        let (fq, fp) = (partial(f, q), partial(f, p));
        let (gq, gp) = (partial(g, q), partial(g, p));
        total += fq * gp - fp * gq;
    }
    Ok(total)
}

/// Extremes of a model over sampled quadruple regions.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueCertificate {
    pub max_y0: f64,
    pub min_y1: f64,
    pub declared: Option<(f64, f64)>,
}

impl ValueCertificate {
    /// Whether the sampled extremes match the declarations within `tol`.
    pub fn matches(&self, tol: f64) -> bool {
        self.declared
            .is_some_and(|(y0, y1)| (self.max_y0 - y0).abs() <= tol && (self.min_y1 - y1).abs() <= tol)
    }
}

pub fn certify_values(h: &HamiltonianModel, q: &AdmissibleQuadruple, samples: usize) -> ValueCertificate {
    let max_y0 = q.y0.samples(samples).iter().map(|z| h.value(z)).fold(f64::NEG_INFINITY, f64::max);
    let min_y1 = q.y1.samples(samples).iter().map(|z| h.value(z)).fold(f64::INFINITY, f64::min);
    ValueCertificate {
        max_y0,
        min_y1,
        declared: h.declared,
    }
}
