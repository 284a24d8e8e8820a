//! Problem files, command dispatch, reports and region diagrams.
//!
//! Problem files are TOML: a `family` key, a table of parameters named after
//! the family, and an optional `[dynamics]` table. Rationals are written as
//! `"p/q"` strings (plain integers are accepted too), `+∞` as `"inf"`.
//!
//! ```
//! use lagflux_core::engine::Provenance;
//! use lagflux_core::io::{parse_problem, run, Command};
//! let p = parse_problem("family = \"split\"\n[split]\nx = [\"1\", \"3\"]\nclass = [1, 2]\n").unwrap();
//! let report = run(Command::Bound, &p).unwrap();
//! let tag = Provenance::PlaneDiskCount.tag();
//! assert_eq!(report.bound.unwrap().upper.tag.as_deref(), Some(tag));
//! ```

use std::fmt::{self, Write as _};
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dynamics::{
    consistent_with_horizon, delta_h, estimate_pb_upper, find_chords, integrate, projected_displacement, ChordConfig,
    ChordSearch,
};
use crate::engine::{
    chekanov_bound, cpn_fiber_bound, disk_count_upper, region_diagram, s2s2_fiber_bound, split_torus_bound,
    surface_bound, toric_fiber_bound, weakly_exact_upper, AmbientMode, CaseLabel, InvariantBound, Provenance,
    RegionDiagram, RelativePeriodData, Side, Window,
};
use crate::error::{Error, Result};
use crate::lattice::{int, parse_rational, rat, to_f64, Extended, LatticeClass, Rational, RationalVector};
use crate::models::{
    build_annulus_fg, build_chekanov_h, build_split_h, build_surface_g, chekanov_cutoff_level, split_constant_range,
    unit_box_pair,
};
use crate::polytope::{Halfspace, RationalPolytope};
use crate::quadruple::{
    annulus_quadruple, chekanov_quadruple, split_quadruple, surface_model_partition, unit_box_quadruple, Region,
};

/// A rational that serializes as `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Literal {
    Int(i64),
    Text(String),
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Literal::deserialize(d)? {
            Literal::Int(i) => Ok(Q(int(i))),
            Literal::Text(s) => parse_rational(&s).map(Q).map_err(serde::de::Error::custom),
        }
    }
}

/// A rational or `+∞`, serialized as `"p/q"` or `"inf"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ext(pub Extended);

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Literal::deserialize(d)? {
            Literal::Int(i) => Ok(Ext(Extended::Finite(int(i)))),
            Literal::Text(s) => s.parse().map(Ext).map_err(serde::de::Error::custom),
        }
    }
}

fn vector(v: &[Q]) -> Result<RationalVector> {
    RationalVector::new(v.iter().map(|q| q.0.clone()).collect())
}

fn bigs(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&e| BigInt::from(e)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfspaceSpec {
    pub normal: Vec<i64>,
    pub offset: Q,
}

/// A named polytope or an explicit list of halfspaces `⟨normal, y⟩ ≤ offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolytopeSpec {
    Named(String),
    Halfspaces(Vec<HalfspaceSpec>),
}

impl PolytopeSpec {
    pub fn build(&self, dim: usize) -> Result<RationalPolytope> {
        match self {
            PolytopeSpec::Named(name) => match name.as_str() {
                "orthant" => Ok(RationalPolytope::orthant(dim)),
                "simplex" => Ok(RationalPolytope::simplex(dim)),
                "cube" => Ok(RationalPolytope::cube(dim, int(0), int(1))),
                other => Err(Error::InvalidModel(format!(
                    "unknown polytope {other:?}; expected orthant, simplex, cube or a halfspace list"
                ))),
            },
            PolytopeSpec::Halfspaces(hs) => RationalPolytope::new(
                dim,
                hs.iter().map(|h| Halfspace::new(&h.normal, h.offset.0.clone())).collect(),
            ),
        }
    }
}

/// Periods of a Lagrangian on a basis of relative second homology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodSpec {
    pub dimension: usize,
    pub omega: Vec<Q>,
    pub alpha: Vec<Q>,
    pub maslov: Vec<i64>,
    /// Whether the distinguished disk class has a nonvanishing count.
    #[serde(default)]
    pub disk_count: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToricParams {
    pub polytope: PolytopeSpec,
    pub x: Vec<Q>,
    pub class: Vec<i64>,
    #[serde(default = "default_mode")]
    pub mode: AmbientMode,
}

fn default_mode() -> AmbientMode {
    AmbientMode::FullAmbient
}

/// A point of the moment image and a class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberParams {
    pub x: Vec<Q>,
    pub class: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChekanovParams {
    pub a: Q,
    pub m: i64,
    pub n: i64,
    /// Size of the ambient model; only used by `verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceParams {
    pub a_plus: Ext,
    pub a_minus: Ext,
    pub separating: bool,
    pub k: i64,
}

/// A Lagrangian given by its periods, and/or a built-in function pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<PeriodSpec>,
    /// `annulus` or `unit-box`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Toric(ToricParams),
    Split(FiberParams),
    Chekanov(ChekanovParams),
    Surface(SurfaceParams),
    Cpn(FiberParams),
    S2s2(FiberParams),
    CustomModel(CustomParams),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Toric(_) => "toric",
            Family::Split(_) => "split",
            Family::Chekanov(_) => "chekanov",
            Family::Surface(_) => "surface",
            Family::Cpn(_) => "cpn",
            Family::S2s2(_) => "s2s2",
            Family::CustomModel(_) => "custom-model",
        }
    }
}

/// Simulation settings; unset fields take per-family defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub family: Family,
    pub dynamics: Option<DynamicsSpec>,
}

impl ProblemFile {
    pub fn new(family: Family) -> Self {
        ProblemFile { family, dynamics: None }
    }

    fn dynamics(&self) -> DynamicsSpec {
        self.dynamics.clone().unwrap_or_default()
    }
}

/// On-disk layout: the family tag, one table of parameters named after it,
/// and an optional `[dynamics]` table.
#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct Document {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    toric: Option<ToricParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<FiberParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chekanov: Option<ChekanovParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    surface: Option<SurfaceParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cpn: Option<FiberParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s2s2: Option<FiberParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    custom_model: Option<CustomParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dynamics: Option<DynamicsSpec>,
}

impl Document {
    fn into_problem(self) -> Result<ProblemFile> {
        let mut found = Vec::new();
        if let Some(p) = self.toric {
            found.push(Family::Toric(p));
        }
        if let Some(p) = self.split {
            found.push(Family::Split(p));
        }
        if let Some(p) = self.chekanov {
            found.push(Family::Chekanov(p));
        }
        if let Some(p) = self.surface {
            found.push(Family::Surface(p));
        }
        if let Some(p) = self.cpn {
            found.push(Family::Cpn(p));
        }
        if let Some(p) = self.s2s2 {
            found.push(Family::S2s2(p));
        }
        if let Some(p) = self.custom_model {
            found.push(Family::CustomModel(p));
        }
        let family = match found.len() {
            1 => found.pop().expect("one family"),
            // A custom model may consist of a pair name alone.
            0 if self.family == "custom-model" => Family::CustomModel(CustomParams::default()),
            0 => return Err(Error::FamilyMismatch(format!("no [{}] table", self.family))),
            _ => {
                let names: Vec<&str> = found.iter().map(Family::name).collect();
                return Err(Error::FamilyMismatch(format!("several family tables: {}", names.join(", "))));
            }
        };
        if family.name() != self.family {
            return Err(Error::FamilyMismatch(format!(
                "family = {:?} but the parameters are a [{}] table",
                self.family,
                family.name()
            )));
        }
        Ok(ProblemFile {
            family,
            dynamics: self.dynamics,
        })
    }

    fn from_problem(p: &ProblemFile) -> Self {
        let mut d = Document {
            family: p.family.name().to_string(),
            dynamics: p.dynamics.clone(),
            ..Document::default()
        };
        match p.family.clone() {
            Family::Toric(f) => d.toric = Some(f),
            Family::Split(f) => d.split = Some(f),
            Family::Chekanov(f) => d.chekanov = Some(f),
            Family::Surface(f) => d.surface = Some(f),
            Family::Cpn(f) => d.cpn = Some(f),
            Family::S2s2(f) => d.s2s2 = Some(f),
            Family::CustomModel(f) => d.custom_model = Some(f),
        }
        d
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses a problem file; errors carry the line and column of the offending value.
pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let doc: Document = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    doc.into_problem()
}

pub fn render_problem(p: &ProblemFile) -> String {
    toml::to_string(&Document::from_problem(p)).expect("problem files always serialize")
}

pub fn read_problem(path: &Path) -> Result<ProblemFile> {
    parse_problem(&std::fs::read_to_string(path)?)
}

/// A value coming from a published result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremValue {
    /// `"p/q"`, `"inf"` or `"unknown"`.
    pub value: String,
    pub tag: Option<String>,
}

impl TheoremValue {
    fn from_side(s: &Side) -> Self {
        TheoremValue {
            value: s.value().map_or_else(|| "unknown".to_string(), ToString::to_string),
            tag: s.source().map(|p| p.tag().to_string()),
        }
    }
}

impl Serialize for TheoremValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TheoremValue", 3)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("source", "theorem")?;
        st.serialize_field("tag", &self.tag)?;
        st.end()
    }
}

impl fmt::Display for TheoremValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.tag {
            Some(t) => write!(f, "{} [{t}]", self.value),
            None => f.write_str(&self.value),
        }
    }
}

/// A value measured by simulation. Never a theorem value.
#[derive(Clone, Debug, PartialEq)]
pub struct Measured {
    pub name: String,
    pub value: f64,
}

impl Measured {
    fn new(name: &str, value: f64) -> Self {
        Measured {
            name: name.to_string(),
            value,
        }
    }
}

impl Serialize for Measured {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Measured", 3)?;
        st.serialize_field("name", &self.name)?;
        // JSON has no infinity.
        if self.value.is_finite() {
            st.serialize_field("value", &self.value)?;
        } else {
            st.serialize_field("value", &self.value.to_string())?;
        }
        st.serialize_field("source", "simulation")?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub lower: TheoremValue,
    pub upper: TheoremValue,
    pub exact: bool,
}

impl From<&InvariantBound> for BoundReport {
    fn from(b: &InvariantBound) -> Self {
        BoundReport {
            lower: TheoremValue::from_side(b.lower()),
            upper: TheoremValue::from_side(b.upper()),
            exact: b.is_exact(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// Outcome of a simulation run against a built model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub model: String,
    pub quantities: Vec<Measured>,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities.iter().find(|q| q.name == name).map(|q| q.value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Bound,
    Verify,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultReport {
    pub family: String,
    pub bound: Option<BoundReport>,
    pub certificate: Option<Certificate>,
    pub notes: Vec<String>,
}

impl ResultReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

impl fmt::Display for ResultReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "family: {}", self.family)?;
        if let Some(b) = &self.bound {
            if b.exact {
                writeln!(f, "bound: exact {}", b.upper)?;
            } else {
                writeln!(f, "bound: lower {}, upper {}", b.lower, b.upper)?;
            }
        }
        if let Some(c) = &self.certificate {
            writeln!(f, "certificate ({}, simulated):", c.model)?;
            for q in &c.quantities {
                writeln!(f, "  {} = {}", q.name, q.value)?;
            }
            for ch in &c.checks {
                writeln!(f, "  [{}] {}", if ch.passed { "ok" } else { "FAILED" }, ch.name)?;
            }
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// The engine's bound for the family in a problem file.
pub fn bound(p: &ProblemFile) -> Result<InvariantBound> {
    match &p.family {
        Family::Toric(ToricParams { polytope, x, class, mode }) => {
            let x = vector(x)?;
            toric_fiber_bound(&polytope.build(x.dim())?, &x, &LatticeClass::from_ints(class)?, *mode)
        }
        Family::Split(FiberParams { x, class }) => split_torus_bound(&vector(x)?, &bigs(class)),
        Family::Chekanov(ChekanovParams { a, m, n, .. }) => chekanov_bound(&a.0, *m, *n),
        Family::Surface(SurfaceParams {
            a_plus,
            a_minus,
            separating,
            k,
        }) => surface_bound(&a_plus.0, &a_minus.0, *separating, *k),
        Family::Cpn(FiberParams { x, class }) => cpn_fiber_bound(x.len(), &vector(x)?, &bigs(class)),
        Family::S2s2(FiberParams { x, class }) => s2s2_fiber_bound(&vector(x)?, &bigs(class)),
        Family::CustomModel(CustomParams { periods: Some(ps), .. }) => {
            let d = RelativePeriodData::new(
                ps.omega.iter().map(|q| q.0.clone()).collect(),
                ps.alpha.iter().map(|q| q.0.clone()).collect(),
                ps.maslov.clone(),
            )?;
            let candidates = [
                weakly_exact_upper(&d).map(|c| (c, Provenance::WeaklyExact)),
                disk_count_upper(ps.dimension, &d, ps.disk_count).map(|c| {
                    let src = if ps.dimension == 2 { Provenance::DiskCountPlane } else { Provenance::DiskCountSpace };
                    (c, src)
                }),
            ];
            let upper = candidates
                .into_iter()
                .flatten()
                .min_by(|a, b| a.0.cmp(&b.0))
                .map_or(Side::Unknown, |(c, src)| Side::known(Extended::Finite(c), src));
            Ok(InvariantBound::new(Side::Unknown, upper))
        }
        Family::CustomModel(CustomParams { periods: None, .. }) => Err(Error::FamilyMismatch(
            "bound for custom-model needs a [custom-model.periods] table".into(),
        )),
    }
}

const ONE_SIDED: &str = "simulation tests one constructed Hamiltonian; it certifies, but does not prove, the absence of shorter chords";

/// Runs a command on a problem file.
pub fn run(command: Command, p: &ProblemFile) -> Result<ResultReport> {
    let mut report = ResultReport {
        family: p.family.name().to_string(),
        bound: None,
        certificate: None,
        notes: Vec::new(),
    };
    match command {
        Command::Bound => report.bound = Some(BoundReport::from(&bound(p)?)),
        Command::Verify => {
            if !matches!(p.family, Family::CustomModel(_)) {
                report.bound = Some(BoundReport::from(&bound(p)?));
            }
            report.certificate = Some(verify(p)?);
            report.notes.push(ONE_SIDED.to_string());
        }
    }
    Ok(report)
}

fn check(name: impl Into<String>, passed: bool) -> Check {
    Check {
        name: name.into(),
        passed,
    }
}

fn search_quantities(search: &ChordSearch) -> Vec<Measured> {
    vec![
        Measured::new("starts", search.reports.len() as f64),
        Measured::new("chords", search.chords() as f64),
        Measured::new("failed runs", search.failures() as f64),
        Measured::new("flagged runs", search.flagged() as f64),
        Measured::new("min chord", search.min_time().unwrap_or(f64::INFINITY)),
        Measured::new("chord-free horizon", search.chord_free_horizon()),
    ]
}

/// Builds the family's witness Hamiltonian and simulates it.
pub fn verify(p: &ProblemFile) -> Result<Certificate> {
    let dyn_spec = p.dynamics();
    let dt = dyn_spec.dt.unwrap_or(1e-3);
    let samples = dyn_spec.samples.unwrap_or(crate::dynamics::DEFAULT_SAMPLES);
    if !(dt > 0.0) || samples == 0 {
        return Err(Error::InvalidModel("dt and samples must be positive".into()));
    }
    match &p.family {
        Family::Surface(SurfaceParams {
            a_plus,
            a_minus,
            separating,
            k,
        }) => {
            let area = if *k > 0 { &a_plus.0 } else { &a_minus.0 };
            let a = match (separating, area) {
                (true, Extended::Finite(a)) => a.clone(),
                _ => {
                    return Err(Error::FamilyMismatch(
                        "the strip model needs a separating curve with finite area on the side of the class".into(),
                    ))
                }
            };
            let kk = u32::try_from(k.unsigned_abs()).map_err(|_| Error::InvalidModel("k too large".into()))?;
            let eps = dyn_spec.eps.map_or(rat(1, 20), |q| q.0);
            let delta = dyn_spec.delta.map_or_else(|| &eps / int(10), |q| q.0);
            let per = &a / int(i64::from(kk));
            let horizon = dyn_spec.t_max.unwrap_or(2.0 * to_f64(&per));
            let (g, _) = build_surface_g(&a, kk, &eps, &delta)?;
            let (_, q) = surface_model_partition(&a, kk, &eps)?;
            let dh = delta_h(&g, &q, samples)?;
            let search = find_chords(&g, &q, ChordConfig { samples, horizon, dt });
            let min = search.min_time().unwrap_or(f64::INFINITY);
            let threshold = to_f64(&(per - int(5) * &eps));
            let claimed = surface_bound(&a_plus.0, &a_minus.0, *separating, *k)?;
            let claimed = claimed.exact_value().map_or(f64::NAN, Extended::to_f64);
            let margin = 4.0 * to_f64(&eps) + 4.0 * to_f64(&delta) + dt;
            let mut quantities = vec![Measured::new("Δ_H", dh)];
            quantities.extend(search_quantities(&search));
            quantities.push(Measured::new("margin", margin));
            Ok(Certificate {
                model: "surface strip".into(),
                quantities,
                checks: vec![
                    check("Δ_H = 1", (dh - 1.0).abs() <= 1e-9),
                    check(format!("min chord ≥ A/k − 5ε = {threshold}"), min >= threshold),
                    check(
                        "claimed bound ≤ min chord · Δ_H + margin",
                        consistent_with_horizon(claimed, min.min(horizon), dh, margin),
                    ),
                    check("no failed runs", search.failures() == 0),
                ],
            })
        }
        Family::Split(FiberParams { x, class }) => {
            let (i, k) = match class.iter().enumerate().filter(|(_, &e)| e != 0).collect::<Vec<_>>()[..] {
                [(i, &k)] if k > 0 => (i, k),
                _ => {
                    return Err(Error::FamilyMismatch(
                        "the split model needs a class k·eᵢ with k > 0".into(),
                    ))
                }
            };
            if x.len() < 2 {
                return Err(Error::FamilyMismatch("the split model needs at least two coordinates".into()));
            }
            let xn = x[i].0.clone();
            let x1 = x
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| q.0.clone())
                .min()
                .expect("at least two coordinates");
            let kk = u32::try_from(k).map_err(|_| Error::InvalidModel("k too large".into()))?;
            let per = &xn / int(k);
            if per <= x1 {
                return Err(Error::InvalidModel(format!(
                    "the split model needs x_i/k = {per} above the smallest other coordinate {x1}"
                )));
            }
            let eps = dyn_spec
                .eps
                .map_or_else(|| rat(1, 10).min((&per - &x1) / int(8)), |q| q.0);
            let delta = dyn_spec.delta.map_or(rat(1, 200).min(&eps / int(20)), |q| q.0);
            let (lo, hi) = split_constant_range(&x1, &xn, kk, &eps)
                .ok_or_else(|| Error::InvalidModel(format!("no admissible constant for ε = {eps}")))?;
            let c = rational_between(lo, hi);
            let horizon = dyn_spec.t_max.unwrap_or(3.0);
            let h = build_split_h(&x1, &xn, kk, &eps, &c, &delta)?;
            let (_, q) = split_quadruple(&x1, &xn, kk, &eps)?;
            let dh = delta_h(&h, &q, samples.min(1024))?;
            let search = find_chords(&h, &q, ChordConfig { samples, horizon, dt });
            let starts: Vec<Vec<f64>> = [&q.x0, &q.x1, &q.y0, &q.y1].iter().flat_map(|r| r.samples(64)).collect();
            let side = to_f64(&x1).sqrt();
            let t = side + 10.0 * dt;
            let gap = projected_displacement(&h, &starts, t, dt, (0, 2), [(0.0, side), (0.0, side)])?;
            let mut quantities = vec![Measured::new("Δ_H", dh), Measured::new("C", to_f64(&c))];
            quantities.extend(search_quantities(&search));
            quantities.push(Measured::new("Π₁ gap", gap));
            Ok(Certificate {
                model: "split".into(),
                quantities,
                checks: vec![
                    check("Δ_H > 0", dh > 0.0),
                    check(format!("no chords up to T = {horizon}"), search.chords() == 0),
                    check(format!("Π₁ shadow displaced after T = {t}"), gap > 0.0),
                    check("no failed runs", search.failures() == 0),
                ],
            })
        }
        Family::Chekanov(ChekanovParams { a, m, n, k }) => {
            let a = a.0.clone();
            let m = u32::try_from(*m)
                .ok()
                .filter(|&m| m > 0)
                .ok_or_else(|| Error::FamilyMismatch("the rotating model needs m > 0".into()))?;
            let k = k.as_ref().map_or_else(|| &a * int(4 * (n.abs() + 1) + 1), |q| q.0.clone());
            let eps = dyn_spec.eps.map_or_else(|| rat(1, 20).min(&a / int(8 * i64::from(m))), |q| q.0);
            let delta = dyn_spec.delta.map_or_else(|| &eps / int(10), |q| q.0);
            let (h, _) = build_chekanov_h(&a, m, *n, &k, &eps, &delta)?;
            let q = chekanov_quadruple(&a, m, *n, &k)?;
            let cutoff = to_f64(&chekanov_cutoff_level(&a, *n));
            let t_end = to_f64(&a) / f64::from(m);
            let circle = Region::RotatedArcs {
                area: a.clone(),
                twist: *n,
                arcs: vec![(int(0), int(1))],
            };
            let mut worst_p = 0.0f64;
            let mut escaped = 0usize;
            for z in circle.samples(512) {
                match integrate(&h, &z, t_end, dt) {
                    Ok(tr) => worst_p = tr.points.iter().map(|p| p[3].abs()).fold(worst_p, f64::max),
                    Err(_) => escaped += 1,
                }
            }
            let horizon = dyn_spec.t_max.unwrap_or(2.0 * t_end);
            let search = find_chords(&h, &q, ChordConfig { samples, horizon, dt });
            let min = search.min_time().unwrap_or(f64::INFINITY);
            let threshold = t_end - 2.0 * to_f64(&eps);
            let mut quantities = vec![Measured::new("max |p|", worst_p)];
            quantities.extend(search_quantities(&search));
            Ok(Certificate {
                model: "rotating sector".into(),
                quantities,
                checks: vec![
                    check(format!("|p| ≤ C = {cutoff} on [0, a/m]"), worst_p <= cutoff && escaped == 0),
                    check(format!("min chord ≥ a/m − 2ε = {threshold}"), min >= threshold),
                    check("no failed runs", search.failures() == 0),
                ],
            })
        }
        Family::CustomModel(CustomParams { pair: Some(name), .. }) => {
            let (f, g, q) = match name.as_str() {
                "annulus" => {
                    let eps = dyn_spec.eps.map_or(rat(1, 2), |q| q.0);
                    let (f, g) = build_annulus_fg(&eps, 1)?;
                    let (_, q) = annulus_quadruple(&eps, 1)?;
                    (f, g, q)
                }
                "unit-box" => {
                    let (f, g) = unit_box_pair();
                    (f, g, unit_box_quadruple())
                }
                other => {
                    return Err(Error::InvalidModel(format!(
                        "unknown pair {other:?}; expected annulus or unit-box"
                    )))
                }
            };
            let est = estimate_pb_upper(&f, &g, &q, 200)?;
            Ok(Certificate {
                model: format!("{name} pair"),
                quantities: vec![
                    Measured::new("max {F, G}", est.max_bracket),
                    Measured::new("grid points", est.points as f64),
                    Measured::new("1/max", est.certificate),
                ],
                checks: vec![check("pair meets the quadruple constraints on samples", true)],
            })
        }
        other => Err(Error::FamilyMismatch(format!(
            "verify has no witness Hamiltonian for family {}",
            other.name()
        ))),
    }
}

/// The simplest dyadic rational strictly inside `(lo, hi)`.
fn rational_between(lo: f64, hi: f64) -> Rational {
    let mut den = 1i64;
    loop {
        let num = (lo * den as f64).floor() as i64 + 1;
        if (num as f64) < hi * den as f64 {
            return rat(num, den);
        }
        den *= 2;
    }
}

/// Fill colour and legend text for each case label.
pub const PALETTE: [(CaseLabel, &str, &str); 8] = [
    (CaseLabel::A, "#4e79a7", "A: no positive entry, +∞"),
    (CaseLabel::B, "#59a14f", "B: axis class, +∞"),
    (CaseLabel::C, "#f28e2b", "C: lower bound via x₁"),
    (CaseLabel::D, "#edc948", "D: lower bound via x₂"),
    (CaseLabel::E, "#e15759", "E: disk count, exact"),
    (CaseLabel::Exact, "#b07aa1", "exact (other)"),
    (CaseLabel::LowerOnly, "#bab0ac", "lower bound only"),
    (CaseLabel::Unknown, "#ffffff", "unknown"),
];

fn colour(label: CaseLabel) -> &'static str {
    PALETTE.iter().find(|(l, _, _)| *l == label).map_or("#000000", |p| p.1)
}

const CELL: i64 = 28;
const MARGIN: i64 = 40;

/// Renders a case diagram as SVG. Output depends only on the diagram.
pub fn region_svg(d: &RegionDiagram) -> String {
    let w = &d.window;
    let cols = w.m_max - w.m_min + 1;
    let rows = w.n_max - w.n_min + 1;
    let legend_x = 2 * MARGIN + cols * CELL;
    let width = legend_x + 230;
    let height = (2 * MARGIN + rows * CELL).max(MARGIN + 20 * PALETTE.len() as i64 + MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r##"<rect width="{width}" height="{height}" fill="#ffffff"/>"##);
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="20">x = {}</text>"#, d.x);
    for c in &d.cells {
        let px = MARGIN + (c.m - w.m_min) * CELL;
        let py = MARGIN + (w.n_max - c.n) * CELL;
        let _ = writeln!(
            s,
            r##"<rect x="{px}" y="{py}" width="{CELL}" height="{CELL}" fill="{}" stroke="#333333" stroke-width="0.5"><title>({}, {}): {} — {}</title></rect>"##,
            colour(c.label),
            c.m,
            c.n,
            c.label,
            c.bound
        );
    }
    // Axis labels for m along the bottom and n down the left.
    for m in w.m_min..=w.m_max {
        let px = MARGIN + (m - w.m_min) * CELL + CELL / 2;
        let _ = writeln!(s, r#"<text x="{px}" y="{}" text-anchor="middle">{m}</text>"#, MARGIN + rows * CELL + 14);
    }
    for n in w.n_min..=w.n_max {
        let py = MARGIN + (w.n_max - n) * CELL + CELL / 2 + 4;
        let _ = writeln!(s, r#"<text x="{}" y="{py}" text-anchor="end">{n}</text>"#, MARGIN - 6);
    }
    for (i, (_, fill, text)) in PALETTE.iter().enumerate() {
        let y = MARGIN + 20 * i as i64;
        let _ = writeln!(
            s,
            r##"<rect x="{legend_x}" y="{y}" width="14" height="14" fill="{fill}" stroke="#333333" stroke-width="0.5"/>"##
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{text}</text>"#, legend_x + 20, y + 11);
    }
    s.push_str("</svg>\n");
    s
}

/// Evaluates the case table over `window` and writes the diagram to `path`.
pub fn render_region_svg(x: &RationalVector, window: Window, path: &Path) -> Result<RegionDiagram> {
    let d = region_diagram(x, window)?;
    std::fs::write(path, region_svg(&d))?;
    Ok(d)
}
