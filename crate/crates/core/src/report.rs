//! Single-point analysis records, grid sweeps and ellipsoid point clouds.
//!
//! Output is deterministic: fixed iteration order, fixed float formatting.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::correlations::{self, CorrelationReport};
use crate::error::{Error, Result};
use crate::linalg::Qubit;
use crate::states::{check_unit_interval, pauli_decompose};
use crate::steering::{self, CriticalRadiusMethod, SteeringEllipsoid};
use crate::unruh::{alice_rob_state, check_r};

/// A float that serializes `+∞` as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaybeInfinite(pub f64);

impl Serialize for MaybeInfinite {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    pub with_oracles: bool,
    pub oracle_grid: usize,
    pub oracle_refine: usize,
    pub quadrature_nodes: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            with_oracles: false,
            oracle_grid: 64,
            oracle_refine: 40,
            quadrature_nodes: 64,
        }
    }
}

/// Every quantity for one `(p, r)` point, flattened for JSON.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisRecord {
    pub p: f64,
    pub r: f64,
    /// `r / (π/4)`
    pub r_frac: f64,
    #[serde(flatten)]
    pub correlations: CorrelationReport,
    pub concurrence_x_closed_form: f64,
    /// Published closed form minus Wootters concurrence.
    #[serde(rename = "eq17_gap")]
    pub literature_gap: f64,
    pub sep_threshold: f64,
    pub bell_threshold: f64,
    pub steer_threshold: f64,
    pub ellipsoid_first_center: [f64; 3],
    pub ellipsoid_first_semiaxes: [f64; 3],
    pub ellipsoid_second_center: [f64; 3],
    pub ellipsoid_second_semiaxes: [f64; 3],
    /// Steered coherence of the inertial qubit (measurements on the accelerated one).
    pub msc: f64,
    pub msc_second: f64,
    pub msc_method: &'static str,
    pub r_c: MaybeInfinite,
    pub r_c_method: CriticalRadiusMethod,
    pub unsteerable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub msc_oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub msc_second_oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_c_quadrature: Option<MaybeInfinite>,
    /// Shape of the first-qubit ellipsoid, kept for the text header of exports.
    #[serde(skip)]
    pub ellipsoid_first: Option<SteeringEllipsoid>,
}

fn arr(v: &Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn check_point(p: f64, r: f64) -> Result<()> {
    check_unit_interval("p", p)?;
    check_r(r)
}

pub fn analyze(p: f64, r: f64, opts: &AnalysisOptions) -> Result<AnalysisRecord> {
    check_point(p, r)?;
    let state = alice_rob_state(p, r)?;
    let correlations = CorrelationReport::alice_rob(p, r)?;
    let first = steering::steering_ellipsoid(&state, Qubit::First)?;
    let second = steering::steering_ellipsoid(&state, Qubit::Second)?;
    let rc = steering::critical_radius_analytic(p, r)?;

    let (msc_oracle, msc_second_oracle, r_c_quadrature) = if opts.with_oracles {
        let t = pauli_decompose(&state).t;
        let quad = if p == 0.0 {
            MaybeInfinite(f64::INFINITY)
        } else {
            MaybeInfinite(steering::critical_radius_quadrature(&t, opts.quadrature_nodes)?.value)
        };
        (
            Some(steering::msc_oracle(
                &state,
                Qubit::First,
                opts.oracle_grid,
                opts.oracle_refine,
            )?),
            Some(steering::msc_oracle(
                &state,
                Qubit::Second,
                opts.oracle_grid,
                opts.oracle_refine,
            )?),
            Some(quad),
        )
    } else {
        (None, None, None)
    };

    Ok(AnalysisRecord {
        p,
        r,
        r_frac: r / FRAC_PI_4,
        correlations,
        concurrence_x_closed_form: correlations::concurrence_x_closed_form(&state)?,
        literature_gap: correlations.literature_gap(),
        sep_threshold: correlations::separability_threshold(r)?,
        bell_threshold: correlations::bell_threshold(r)?,
        steer_threshold: steering::steerability_threshold(r)?,
        ellipsoid_first_center: arr(&first.center),
        ellipsoid_first_semiaxes: arr(&first.semiaxes),
        ellipsoid_second_center: arr(&second.center),
        ellipsoid_second_semiaxes: arr(&second.semiaxes),
        msc: steering::msc_closed_form(&state, Qubit::First)?,
        msc_second: steering::msc_closed_form(&state, Qubit::Second)?,
        msc_method: "closed_form",
        r_c: MaybeInfinite(rc.value),
        r_c_method: rc.method,
        unsteerable: rc.unsteerable,
        msc_oracle,
        msc_second_oracle,
        r_c_quadrature,
        ellipsoid_first: Some(first),
    })
}

pub fn analysis_json(record: &AnalysisRecord) -> String {
    serde_json::to_string_pretty(record).expect("record serializes")
}

/// Column groups a sweep can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Quantity {
    Concurrence,
    ConcurrenceLiterature,
    ChshM,
    Msc,
    RC,
    Thresholds,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::Concurrence,
        Quantity::ConcurrenceLiterature,
        Quantity::ChshM,
        Quantity::Msc,
        Quantity::RC,
        Quantity::Thresholds,
    ];

    fn columns(self) -> &'static [&'static str] {
        match self {
            Quantity::Concurrence => &["concurrence"],
            Quantity::ConcurrenceLiterature => &["concurrence_eq17"],
            Quantity::ChshM => &["chsh_M", "b_max"],
            Quantity::Msc => &["msc"],
            Quantity::RC => &["r_c"],
            Quantity::Thresholds => &["sep_threshold", "bell_threshold", "steer_threshold"],
        }
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "concurrence" => Ok(Quantity::Concurrence),
            "concurrence_eq17" => Ok(Quantity::ConcurrenceLiterature),
            "chsh_M" | "chsh_m" => Ok(Quantity::ChshM),
            "msc" => Ok(Quantity::Msc),
            "r_c" => Ok(Quantity::RC),
            "thresholds" => Ok(Quantity::Thresholds),
            other => Err(format!(
                "unknown quantity `{other}` (expected concurrence, concurrence_eq17, chsh_M, msc, r_c, thresholds)"
            )),
        }
    }
}

/// A rectangular `(p, r)` grid, `p` outer and `r` inner.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub p_min: f64,
    pub p_max: f64,
    pub p_steps: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub r_steps: usize,
    pub quantities: Vec<Quantity>,
    pub with_oracles: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            p_min: 0.0,
            p_max: 1.0,
            p_steps: 11,
            r_min: 0.0,
            r_max: FRAC_PI_4,
            r_steps: 9,
            quantities: Quantity::ALL.to_vec(),
            with_oracles: false,
        }
    }
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|k| {
            if k == steps - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        check_unit_interval("p_min", self.p_min)?;
        check_unit_interval("p_max", self.p_max)?;
        check_r(self.r_min)?;
        check_r(self.r_max)?;
        if self.p_min > self.p_max || self.r_min > self.r_max {
            return Err(Error::InvalidParameter {
                name: "range",
                value: if self.p_min > self.p_max {
                    self.p_min
                } else {
                    self.r_min
                },
                reason: "minimum exceeds maximum",
            });
        }
        for (name, steps) in [("p_steps", self.p_steps), ("r_steps", self.r_steps)] {
            if steps == 0 {
                return Err(Error::InvalidParameter {
                    name,
                    value: 0.0,
                    reason: "must be at least 1",
                });
            }
        }
        Ok(())
    }

    pub fn p_values(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.p_steps)
    }

    pub fn r_values(&self) -> Vec<f64> {
        linspace(self.r_min, self.r_max, self.r_steps)
    }

    fn selected(&self) -> Vec<Quantity> {
        let mut q = self.quantities.clone();
        q.sort();
        q.dedup();
        q
    }

    pub fn header(&self) -> Vec<&'static str> {
        let mut cols = vec!["p", "r"];
        for q in self.selected() {
            cols.extend_from_slice(q.columns());
        }
        if self.with_oracles {
            cols.extend_from_slice(&["msc_oracle", "r_c_quadrature"]);
        }
        cols
    }
}

const SWEEP_ORACLE_GRID: usize = 64;
const SWEEP_ORACLE_REFINE: usize = 40;
const SWEEP_QUADRATURE_NODES: usize = 64;

fn sweep_row(spec: &SweepSpec, quantities: &[Quantity], p: f64, r: f64) -> Result<String> {
    let state = alice_rob_state(p, r)?;
    let mut fields = vec![format_sig9(p), format_sig9(r)];
    for q in quantities {
        match q {
            Quantity::Concurrence => fields.push(format_sig9(correlations::concurrence(&state)?)),
            Quantity::ConcurrenceLiterature => {
                fields.push(format_sig9(correlations::concurrence_literature_formula(p, r)))
            }
            Quantity::ChshM => {
                let m = correlations::chsh_m(&state)?;
                fields.push(format_sig9(m));
                fields.push(format_sig9(correlations::b_max(m)));
            }
            Quantity::Msc => fields.push(format_sig9(steering::msc_closed_form(&state, Qubit::First)?)),
            Quantity::RC => fields.push(format_sig9(steering::critical_radius_analytic(p, r)?.value)),
            Quantity::Thresholds => {
                fields.push(format_sig9(correlations::separability_threshold(r)?));
                fields.push(format_sig9(correlations::bell_threshold(r)?));
                fields.push(format_sig9(steering::steerability_threshold(r)?));
            }
        }
    }
    if spec.with_oracles {
        fields.push(format_sig9(steering::msc_oracle(
            &state,
            Qubit::First,
            SWEEP_ORACLE_GRID,
            SWEEP_ORACLE_REFINE,
        )?));
        let quad = if p == 0.0 {
            f64::INFINITY
        } else {
            steering::critical_radius_quadrature(&pauli_decompose(&state).t, SWEEP_QUADRATURE_NODES)?.value
        };
        fields.push(format_sig9(quad));
    }
    Ok(fields.join(","))
}

/// Renders the sweep as CSV text. Cells are evaluated in parallel and
/// emitted in row-major `(p, r)` order.
pub fn sweep_csv(spec: &SweepSpec) -> Result<String> {
    spec.validate()?;
    let quantities = spec.selected();
    let cells: Vec<(f64, f64)> = spec
        .p_values()
        .into_iter()
        .flat_map(|p| spec.r_values().into_iter().map(move |r| (p, r)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(p, r)| sweep_row(spec, &quantities, p, r))
        .collect::<Result<Vec<String>>>()?;
    let mut out = spec.header().join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

/// `n` nearly uniform points on the unit sphere (Fibonacci lattice).
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rad = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            Vector3::new(rad * phi.cos(), rad * phi.sin(), z)
        })
        .collect()
}

pub const MIN_ELLIPSOID_SAMPLES: usize = 8;

/// Surface point cloud of one qubit's steering ellipsoid as `x,y,z` CSV with
/// a single `#` comment line describing the shape.
pub fn ellipsoid_csv(p: f64, r: f64, steered: Qubit, samples: usize) -> Result<String> {
    check_point(p, r)?;
    if samples < MIN_ELLIPSOID_SAMPLES {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples as f64,
            reason: "must be at least 8",
        });
    }
    let state = alice_rob_state(p, r)?;
    let e = steering::steering_ellipsoid(&state, steered)?;
    let fmt3 = |v: &Vector3<f64>| format!("{} {} {}", format_sig9(v.x), format_sig9(v.y), format_sig9(v.z));
    let mut out = String::new();
    writeln!(
        out,
        "# p={} r={} steered={} center={} semiaxes={}",
        format_sig9(p),
        format_sig9(r),
        steered,
        fmt3(&e.center),
        fmt3(&e.semiaxes)
    )
    .unwrap();
    out.push_str("x,y,z\n");
    for x in fibonacci_sphere(samples) {
        let v = e.surface_point(&x);
        writeln!(out, "{},{},{}", format_sig9(v.x), format_sig9(v.y), format_sig9(v.z)).unwrap();
    }
    Ok(out)
}

/// `%.9g`-style formatting; `inf` for infinity.
pub fn format_sig9(x: f64) -> String {
    format_sig(x, 9)
}

pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
