//! Equilibrium analysis of a random access channel with retransmissions.
//!
//! A population of `M` users is split into `N_B` backlogged users, retrying a
//! failed packet, and `M - N_B` users with fresh traffic. With memoryless
//! policies the offered loads are
//!
//! ```text
//! G_tx(N_B)   = (M - N_B) * p_tx
//! G_retx(N_B) = N_B * p_retx
//! G(N_B)      = G_tx + G_retx
//! ```
//!
//! and the channel answers with throughput `T(G(N_B))`, taken from an
//! open-loop throughput curve. The expected backlog is constant where new
//! traffic equals throughput, `G_tx(N_B*) = T(N_B*)`. Such a point is stable
//! when it acts as a sink (`G_tx > T` just below it, `G_tx < T` just above)
//! and unstable when it acts as a source. A channel with exactly one
//! equilibrium that is stable is globally stable.

use std::io::Read;

use thiserror::Error;

/// Every reported equilibrium satisfies `|G_tx - T| <= ROOT_TOLERANCE`.
pub const ROOT_TOLERANCE: f64 = 1e-6;

/// Grid resolution used when none is given.
pub const DEFAULT_GRID_POINTS: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("invalid population model: {0}")]
    InvalidModel(String),
    #[error("backlog {n_b} outside [0, {max}]")]
    BacklogOutOfRange { n_b: f64, max: f64 },
    #[error("invalid throughput curve: {0}")]
    InvalidCurve(String),
    #[error("throughput curve covers G in [{min}, {max}] but the channel needs G = {needed}")]
    Coverage { needed: f64, min: f64, max: f64 },
    #[error("epsilon must be > 0, got {0}")]
    InvalidEpsilon(f64),
    #[error("grid needs at least one interval")]
    EmptyGrid,
    #[error("cannot read throughput curve: {0}")]
    Input(String),
}

/// Finite user population with stationary per-slot access probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationModel {
    pub users: u32,
    pub p_tx: f64,
    pub p_retx: f64,
}

/// Loads offered to the channel at a given backlog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfferedLoads {
    pub new_traffic: f64,
    pub retransmissions: f64,
    pub total: f64,
}

impl PopulationModel {
    pub fn new(users: u32, p_tx: f64, p_retx: f64) -> Result<Self, StabilityError> {
        if users == 0 {
            return Err(StabilityError::InvalidModel("population must have at least one user".into()));
        }
        for (name, p) in [("p_tx", p_tx), ("p_retx", p_retx)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(StabilityError::InvalidModel(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(Self { users, p_tx, p_retx })
    }

    pub fn max_backlog(&self) -> f64 {
        f64::from(self.users)
    }

    pub fn offered_loads(&self, n_b: f64) -> Result<OfferedLoads, StabilityError> {
        let max = self.max_backlog();
        if !(0.0..=max).contains(&n_b) {
            return Err(StabilityError::BacklogOutOfRange { n_b, max });
        }
        Ok(self.loads_unchecked(n_b))
    }

    fn loads_unchecked(&self, n_b: f64) -> OfferedLoads {
        let new_traffic = (self.max_backlog() - n_b) * self.p_tx;
        let retransmissions = n_b * self.p_retx;
        OfferedLoads { new_traffic, retransmissions, total: new_traffic + retransmissions }
    }
}

/// Open-loop throughput as a piecewise-linear function of the offered load.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputCurve {
    points: Vec<(f64, f64)>,
}

impl ThroughputCurve {
    /// Builds a curve from `(G, T)` samples sorted by strictly increasing `G`.
    ///
    /// `T(0) = 0` holds for every scheme, so the origin is added when the
    /// samples start above `G = 0`.
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self, StabilityError> {
        if points.is_empty() {
            return Err(StabilityError::InvalidCurve("no samples".into()));
        }
        for &(g, t) in &points {
            if !(g.is_finite() && t.is_finite() && g >= 0.0 && t >= 0.0) {
                return Err(StabilityError::InvalidCurve(format!("bad sample ({g}, {t})")));
            }
            if t > g * (1.0 + 1e-9) {
                return Err(StabilityError::InvalidCurve(format!("throughput {t} exceeds load {g}")));
            }
        }
        if let Some(w) = points.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(StabilityError::InvalidCurve(format!(
                "loads must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
        if points[0].0 > 0.0 {
            points.insert(0, (0.0, 0.0));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn min_load(&self) -> f64 {
        self.points[0].0
    }

    pub fn max_load(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Linear interpolation; loads outside the sampled range are an error.
    pub fn eval(&self, g: f64) -> Result<f64, StabilityError> {
        let (min, max) = (self.min_load(), self.max_load());
        if !(g >= min && g <= max) {
            return Err(StabilityError::Coverage { needed: g, min, max });
        }
        let i = self.points.partition_point(|&(x, _)| x < g);
        if i == 0 {
            return Ok(self.points[0].1);
        }
        let (g0, t0) = self.points[i - 1];
        let (g1, t1) = self.points[i];
        Ok(t0 + (t1 - t0) * (g - g0) / (g1 - g0))
    }

    /// Reads the `G` and `throughput` columns of a sweep CSV.
    ///
    /// Rows can be restricted to one scheme and distribution; the rows left
    /// must all belong to one series. Repeated loads of that series (one row
    /// per SNR) must agree and are merged.
    pub fn from_csv<R: Read>(reader: R, selector: &CurveSelector) -> Result<Self, StabilityError> {
        let input = |e: csv::Error| StabilityError::Input(e.to_string());
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers().map_err(input)?.clone();
        let column = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| StabilityError::Input(format!("missing column {name:?}")))
        };
        let g_col = column("G")?;
        let t_col = column("throughput")?;
        let scheme_col = headers.iter().position(|h| h == "scheme");
        let dist_col = headers.iter().position(|h| h == "dist");

        let mut samples: Vec<(f64, f64, String)> = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(input)?;
            let field = |i: usize| record.get(i).unwrap_or("");
            let matches = |want: &Option<String>, col: Option<usize>| match (want, col) {
                (Some(w), Some(c)) => field(c) == w,
                (Some(_), None) => false,
                (None, _) => true,
            };
            if !matches(&selector.scheme, scheme_col) || !matches(&selector.dist, dist_col) {
                continue;
            }
            let number = |i: usize| {
                field(i)
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| StabilityError::Input(format!("bad number {:?}", field(i))))
            };
            let series = format!(
                "{}/{}",
                scheme_col.map(field).unwrap_or(""),
                dist_col.map(field).unwrap_or("")
            );
            samples.push((number(g_col)?, number(t_col)?, series));
        }
        if samples.is_empty() {
            return Err(StabilityError::Input("no matching rows".into()));
        }
        let mut series: Vec<&str> = samples.iter().map(|s| s.2.as_str()).collect();
        series.sort_unstable();
        series.dedup();
        if series.len() > 1 {
            return Err(StabilityError::Input(format!(
                "rows from several series ({}); select one scheme and distribution",
                series.join(", ")
            )));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
        for &(g, t, _) in &samples {
            match points.last() {
                Some(&(pg, pt)) if pg == g => {
                    if (pt - t).abs() > 1e-12 {
                        return Err(StabilityError::Input(format!(
                            "conflicting throughput values at G = {g}"
                        )));
                    }
                }
                _ => points.push((g, t)),
            }
        }
        Self::new(points)
    }
}

/// Row filter for [`ThroughputCurve::from_csv`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CurveSelector {
    pub scheme: Option<String>,
    pub dist: Option<String>,
}

/// A channel seen as a function of the backlog.
pub trait BacklogChannel {
    /// Backlog ranges over `[0, max_backlog()]`.
    fn max_backlog(&self) -> f64;
    fn loads(&self, n_b: f64) -> OfferedLoads;
    fn throughput(&self, n_b: f64) -> f64;

    /// `G_tx - T`, positive when the backlog tends to grow.
    fn drift(&self, n_b: f64) -> f64 {
        self.loads(n_b).new_traffic - self.throughput(n_b)
    }
}

/// Relative overshoot of the curve's load range tolerated as rounding.
const COVERAGE_SLACK: f64 = 1e-9;

/// A population model answered by an open-loop throughput curve.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    model: PopulationModel,
    curve: ThroughputCurve,
}

impl ClosedLoop {
    /// Fails when the curve does not cover every load the model can offer.
    pub fn new(model: PopulationModel, curve: ThroughputCurve) -> Result<Self, StabilityError> {
        // Total load is linear in the backlog, so the endpoints bound it.
        // Loads past the ends by rounding only are clamped on evaluation.
        let slack = COVERAGE_SLACK * curve.max_load().max(1.0);
        for n_b in [0.0, model.max_backlog()] {
            let g = model.loads_unchecked(n_b).total;
            if g < curve.min_load() - slack || g > curve.max_load() + slack {
                curve.eval(g)?;
            }
        }
        Ok(Self { model, curve })
    }

    pub fn model(&self) -> &PopulationModel {
        &self.model
    }

    pub fn curve(&self) -> &ThroughputCurve {
        &self.curve
    }
}

impl BacklogChannel for ClosedLoop {
    fn max_backlog(&self) -> f64 {
        self.model.max_backlog()
    }

    fn loads(&self, n_b: f64) -> OfferedLoads {
        self.model.loads_unchecked(n_b.clamp(0.0, self.max_backlog()))
    }

    fn throughput(&self, n_b: f64) -> f64 {
        let g = self.loads(n_b).total;
        // Coverage was checked at construction; clamp away rounding at the ends.
        self.curve
            .eval(g.clamp(self.curve.min_load(), self.curve.max_load()))
            .expect("load within curve range")
    }
}

/// A channel given directly by `G_tx(N_B)` and `T(N_B)`.
///
/// There is no retransmission split, so the reported total load equals the
/// new traffic load.
pub struct FnChannel<F, G> {
    pub max_backlog: f64,
    pub new_traffic: F,
    pub throughput: G,
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> BacklogChannel for FnChannel<F, G> {
    fn max_backlog(&self) -> f64 {
        self.max_backlog
    }

    fn loads(&self, n_b: f64) -> OfferedLoads {
        let g = (self.new_traffic)(n_b);
        OfferedLoads { new_traffic: g, retransmissions: 0.0, total: g }
    }

    fn throughput(&self, n_b: f64) -> f64 {
        (self.throughput)(n_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    /// A sink: the backlog returns here after small perturbations.
    Stable,
    /// A source, or a tangency that is neither sink nor source.
    Unstable,
}

impl EquilibriumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stable => "stable",
            Self::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub kind: EquilibriumKind,
    /// Neither a sink nor a source; reported as unstable.
    pub tangent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPoint {
    pub n_b: f64,
    pub loads: OfferedLoads,
    pub throughput: f64,
    pub kind: EquilibriumKind,
    pub tangent: bool,
}

impl EquilibriumPoint {
    /// Integer backlogs around `n_b`.
    pub fn integer_bracket(&self) -> (u64, u64) {
        (self.n_b.floor() as u64, self.n_b.ceil() as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    pub points: Vec<EquilibriumPoint>,
    pub globally_stable: bool,
}

/// Classifies an equilibrium by the sign of `G_tx - T` at `n_b* ± epsilon`.
///
/// Near the ends of `[0, M]` only the side inside the range is examined.
pub fn classify_equilibrium<C: BacklogChannel + ?Sized>(
    channel: &C,
    n_b_star: f64,
    epsilon: f64,
) -> Result<Classification, StabilityError> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(StabilityError::InvalidEpsilon(epsilon));
    }
    let max = channel.max_backlog();
    let left = (n_b_star - epsilon >= 0.0).then(|| channel.drift(n_b_star - epsilon));
    let right = (n_b_star + epsilon <= max).then(|| channel.drift(n_b_star + epsilon));
    let sink = left.is_none_or(|d| d > 0.0) && right.is_none_or(|d| d < 0.0);
    let source = left.is_none_or(|d| d < 0.0) && right.is_none_or(|d| d > 0.0);
    let one_side = left.is_some() || right.is_some();
    Ok(match (sink && one_side, source && one_side) {
        (true, _) => Classification { kind: EquilibriumKind::Stable, tangent: false },
        (false, true) => Classification { kind: EquilibriumKind::Unstable, tangent: false },
        _ => Classification { kind: EquilibriumKind::Unstable, tangent: true },
    })
}

/// Single stable equilibrium.
pub fn global_stability(points: &[EquilibriumPoint]) -> bool {
    matches!(points, [p] if p.kind == EquilibriumKind::Stable)
}

fn grid(max: f64, intervals: usize) -> Result<Vec<f64>, StabilityError> {
    if intervals == 0 {
        return Err(StabilityError::EmptyGrid);
    }
    Ok((0..=intervals).map(|i| max * i as f64 / intervals as f64).collect())
}

/// Shrinks a bracket `[lo, hi]` with `f(lo)` and `f(hi)` of opposite signs.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 || mid <= lo || mid >= hi {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// All backlogs where new traffic equals throughput, located by a sign
/// change scan over `grid_intervals` equal intervals of `[0, M]` followed by
/// bisection. Each point is classified with `epsilon` a tenth of the grid
/// step.
pub fn find_equilibria<C: BacklogChannel + ?Sized>(
    channel: &C,
    grid_intervals: usize,
) -> Result<EquilibriumSet, StabilityError> {
    let xs = grid(channel.max_backlog(), grid_intervals)?;
    let epsilon = (xs[1] - xs[0]) / 10.0;
    let drift = |x: f64| channel.drift(x);
    let values: Vec<f64> = xs.iter().map(|&x| drift(x)).collect();

    let mut roots = Vec::new();
    for i in 0..xs.len() {
        if values[i] == 0.0 {
            // A run of exact zeros is one equilibrium.
            if i == 0 || values[i - 1] != 0.0 {
                roots.push(xs[i]);
            }
        } else if i + 1 < xs.len()
            && values[i + 1] != 0.0
            && (values[i] > 0.0) != (values[i + 1] > 0.0)
        {
            roots.push(bisect(drift, xs[i], xs[i + 1]));
        }
    }

    let mut points = Vec::with_capacity(roots.len());
    for n_b in roots {
        let c = classify_equilibrium(channel, n_b, epsilon)?;
        points.push(EquilibriumPoint {
            n_b,
            loads: channel.loads(n_b),
            throughput: channel.throughput(n_b),
            kind: c.kind,
            tangent: c.tangent,
        });
    }
    let globally_stable = global_stability(&points);
    Ok(EquilibriumSet { points, globally_stable })
}

/// One row of the equilibrium contour table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourRow {
    pub n_b: f64,
    pub loads: OfferedLoads,
    pub throughput: f64,
}

/// Throughput and new-traffic load tabulated over `grid_intervals` equal
/// steps of the backlog.
pub fn equilibrium_contour<C: BacklogChannel + ?Sized>(
    channel: &C,
    grid_intervals: usize,
) -> Result<Vec<ContourRow>, StabilityError> {
    Ok(grid(channel.max_backlog(), grid_intervals)?
        .into_iter()
        .map(|n_b| ContourRow { n_b, loads: channel.loads(n_b), throughput: channel.throughput(n_b) })
        .collect())
}
