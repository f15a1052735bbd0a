use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use super::GeometryError;
use crate::expr::{parse, Expr};

/// Mutual orthogonality bound for a user chart's frame.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;
/// Smallest metric coefficient accepted as non-degenerate.
pub const DEGENERATE_METRIC: f64 = 1e-12;
/// Frame invariants enforced at every evaluated point.
pub const FRAME_TOL: f64 = 1e-10;

/// An orthogonal curvilinear coordinate system.
///
/// Map, metric and domain expressions are stored over the canonical
/// coordinates `q1..q3`; `coord_names` are only for parsing and display.
#[derive(Debug, Clone)]
pub struct Chart {
    name: String,
    coord_names: [String; 3],
    maps: [Expr; 3],
    /// `jacobian[k][i] = d(map_k)/d(q_i)`.
    jacobian: [[Expr; 3]; 3],
    jacobian_metric: [Expr; 3],
    metric_override: Option<[Expr; 3]>,
    domain: Vec<Expr>,
    domain_text: Vec<String>,
    region: [(f64, f64); 3],
    validated: bool,
}

/// Local orthonormal frame at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FramePoint {
    pub p: [f64; 3],
    pub h: [f64; 3],
    /// `u[i]` is the Cartesian unit vector along coordinate `i`.
    pub u: [[f64; 3]; 3],
    pub xyz: [f64; 3],
}

impl FramePoint {
    /// `det[u1 u2 u3]`; +1 for a right-handed frame.
    pub fn orientation(&self) -> f64 {
        let [a, b, c] = self.u;
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
    }

    /// Expresses frame components `v_i` along `u_i` in the Cartesian basis.
    pub fn frame_to_cartesian<T>(&self, v: [T; 3]) -> [T; 3]
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        [0, 1, 2].map(|k| v[0] * self.u[0][k] + v[1] * self.u[1][k] + v[2] * self.u[2][k])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthogonalityReport {
    pub samples: usize,
    pub max_off_diagonal: f64,
    pub min_metric: f64,
    pub pass: bool,
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Coordinate names and expression texts for building a chart.
#[derive(Debug, Clone)]
pub struct ChartSpec<'a> {
    pub name: &'a str,
    pub coords: [&'a str; 3],
    pub maps: [&'a str; 3],
    pub metric: Option<[&'a str; 3]>,
    /// Each expression must be strictly positive inside the domain.
    pub domain: &'a [&'a str],
    pub region: [(f64, f64); 3],
}

pub const BUILTIN_CHARTS: [&str; 3] = ["cartesian", "spherical", "cylindrical"];

fn builtin_spec(name: &str) -> Option<ChartSpec<'static>> {
    let two_pi = 2.0 * PI;
    match name {
        "cartesian" => Some(ChartSpec {
            name: "cartesian",
            coords: ["x", "y", "z"],
            maps: ["x", "y", "z"],
            metric: Some(["1", "1", "1"]),
            domain: &[],
            region: [(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
        }),
        "spherical" => Some(ChartSpec {
            name: "spherical",
            coords: ["r", "theta", "psi"],
            maps: ["r*sin(theta)*cos(psi)", "r*sin(theta)*sin(psi)", "r*cos(theta)"],
            metric: Some(["1", "r", "r*sin(theta)"]),
            domain: &["r", "theta", "pi - theta"],
            region: [(0.5, 3.0), (0.3, PI - 0.3), (0.0, two_pi)],
        }),
        "cylindrical" => Some(ChartSpec {
            name: "cylindrical",
            coords: ["rho", "phi", "z"],
            maps: ["rho*cos(phi)", "rho*sin(phi)", "z"],
            metric: Some(["1", "rho", "1"]),
            domain: &["rho"],
            region: [(0.5, 3.0), (0.0, two_pi), (-2.0, 2.0)],
        }),
        _ => None,
    }
}

/// One of `cartesian`, `spherical`, `cylindrical`.
pub fn builtin_chart(name: &str) -> Result<Chart, GeometryError> {
    let spec = builtin_spec(name).ok_or_else(|| GeometryError::UnknownChart(name.to_string()))?;
    let mut chart = Chart::from_spec(&spec)?;
    chart.validated = true;
    Ok(chart)
}

impl Chart {
    /// Builds an unvalidated chart. Call [`Chart::validated`] before handing
    /// it to operators.
    pub fn from_spec(spec: &ChartSpec<'_>) -> Result<Chart, GeometryError> {
        let coords = spec.coords;
        for (i, c) in coords.iter().enumerate() {
            if c.is_empty() || coords[..i].contains(c) || *c == "pi" {
                return Err(GeometryError::Definition(format!(
                    "invalid or duplicate coordinate name `{c}`"
                )));
            }
        }
        let load = |what: &str, src: &str| -> Result<Expr, GeometryError> {
            let e = parse(src)
                .map_err(|e| GeometryError::Definition(format!("{what}: {e}")))?
                .bind_coords(&coords);
            e.check_bound(&[])
                .map_err(|e| GeometryError::Definition(format!("{what}: {e}")))?;
            Ok(e)
        };
        let maps = [
            load("map x", spec.maps[0])?,
            load("map y", spec.maps[1])?,
            load("map z", spec.maps[2])?,
        ];
        let metric_override = match spec.metric {
            Some(m) => Some([
                load("metric h1", m[0])?,
                load("metric h2", m[1])?,
                load("metric h3", m[2])?,
            ]),
            None => None,
        };
        let domain = spec
            .domain
            .iter()
            .map(|d| load("domain", d))
            .collect::<Result<Vec<_>, _>>()?;
        for (lo, hi) in spec.region {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(GeometryError::Definition(format!(
                    "invalid sampling interval [{lo}, {hi}]"
                )));
            }
        }
        let jacobian = [0, 1, 2].map(|k| [0, 1, 2].map(|i| maps[k].diff_coord(i)));
        let jacobian_metric = [0, 1, 2].map(|i| {
            let sq = |k: usize| jacobian[k][i].powf(2.0);
            sq(0).add(&sq(1)).add(&sq(2)).sqrt()
        });
        Ok(Chart {
            name: spec.name.to_string(),
            coord_names: coords.map(str::to_string),
            maps,
            jacobian,
            jacobian_metric,
            metric_override,
            domain,
            domain_text: spec.domain.iter().map(|d| d.to_string()).collect(),
            region: spec.region,
            validated: false,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coord_names(&self) -> [&str; 3] {
        [0, 1, 2].map(|i| self.coord_names[i].as_str())
    }

    pub fn maps(&self) -> &[Expr; 3] {
        &self.maps
    }

    /// Metric coefficients as expressions: the analytic override when
    /// present, else `|dr/dq_i|`.
    pub fn metric_exprs(&self) -> &[Expr; 3] {
        self.metric_override.as_ref().unwrap_or(&self.jacobian_metric)
    }

    /// Metric coefficients always derived from the Jacobian of the maps.
    pub fn jacobian_metric_exprs(&self) -> &[Expr; 3] {
        &self.jacobian_metric
    }

    pub fn has_analytic_metric(&self) -> bool {
        self.metric_override.is_some()
    }

    /// Frame vectors as expressions: `u[i][k] = (d map_k / d q_i) / h_i`.
    pub fn frame_exprs(&self) -> [[Expr; 3]; 3] {
        let h = self.metric_exprs();
        [0, 1, 2].map(|i| [0, 1, 2].map(|k| self.jacobian[k][i].div(&h[i])))
    }

    pub fn domain_exprs(&self) -> &[Expr] {
        &self.domain
    }

    pub fn domain_description(&self) -> Vec<String> {
        self.domain_text.iter().map(|d| format!("{d} > 0")).collect()
    }

    /// Box in coordinate space used for sampling; kept away from singular sets.
    pub fn region(&self) -> [(f64, f64); 3] {
        self.region
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn is_cartesian(&self) -> bool {
        self.name == "cartesian"
    }

    pub fn in_domain(&self, p: &[f64; 3]) -> bool {
        p.iter().all(|x| x.is_finite()) && self.domain.iter().all(|d| matches!(d.eval_at(p), Ok(v) if v > 0.0))
    }

    fn require_domain(&self, p: &[f64; 3]) -> Result<(), GeometryError> {
        if self.in_domain(p) {
            Ok(())
        } else {
            Err(GeometryError::OutOfDomain {
                chart: self.name.clone(),
                point: *p,
            })
        }
    }

    /// Cartesian position of `p`.
    pub fn position(&self, p: &[f64; 3]) -> Result<[f64; 3], GeometryError> {
        self.require_domain(p)?;
        let mut xyz = [0.0; 3];
        for (k, m) in self.maps.iter().enumerate() {
            xyz[k] = m.eval_at(p)?;
        }
        Ok(xyz)
    }

    fn eval_metric(&self, exprs: &[Expr; 3], p: &[f64; 3]) -> Result<[f64; 3], GeometryError> {
        self.require_domain(p)?;
        let mut h = [0.0; 3];
        for i in 0..3 {
            h[i] = exprs[i].eval_at(p)?;
            // negated so NaN counts as degenerate
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(h[i] > DEGENERATE_METRIC) {
                return Err(GeometryError::DegenerateMetric {
                    chart: self.name.clone(),
                    point: *p,
                    index: i,
                    value: h[i],
                });
            }
        }
        Ok(h)
    }

    /// Metric coefficients `h_i` at `p`.
    pub fn metric(&self, p: &[f64; 3]) -> Result<[f64; 3], GeometryError> {
        self.eval_metric(self.metric_exprs(), p)
    }

    /// Metric coefficients from the Jacobian, ignoring any override.
    pub fn jacobian_metric(&self, p: &[f64; 3]) -> Result<[f64; 3], GeometryError> {
        self.eval_metric(&self.jacobian_metric, p)
    }

    /// Frame without the orthonormality check.
    fn raw_frame(&self, p: &[f64; 3]) -> Result<FramePoint, GeometryError> {
        let h = self.metric(p)?;
        let xyz = self.position(p)?;
        let mut u = [[0.0; 3]; 3];
        for i in 0..3 {
            for (k, uk) in u[i].iter_mut().enumerate() {
                *uk = self.jacobian[k][i].eval_at(p)? / h[i];
            }
        }
        Ok(FramePoint { p: *p, h, u, xyz })
    }

    /// Local frame at `p`; the orthonormality invariants are checked.
    pub fn frame(&self, p: &[f64; 3]) -> Result<FramePoint, GeometryError> {
        let fp = self.raw_frame(p)?;
        for i in 0..3 {
            let n = dot(&fp.u[i], &fp.u[i]).sqrt();
            if (n - 1.0).abs() > FRAME_TOL {
                return Err(GeometryError::FrameNotOrthonormal {
                    chart: self.name.clone(),
                    point: *p,
                    detail: format!("|u{}| = {n}", i + 1),
                });
            }
            for j in 0..i {
                let d = dot(&fp.u[i], &fp.u[j]);
                if d.abs() > FRAME_TOL {
                    return Err(GeometryError::FrameNotOrthonormal {
                        chart: self.name.clone(),
                        point: *p,
                        detail: format!("u{}.u{} = {d}", j + 1, i + 1),
                    });
                }
            }
        }
        Ok(fp)
    }

    /// Largest off-diagonal `|u_i . u_j|` and smallest `h_i` over the samples.
    pub fn check_orthogonality(&self, samples: &[[f64; 3]]) -> Result<OrthogonalityReport, GeometryError> {
        if samples.is_empty() {
            return Err(GeometryError::Definition(
                "orthogonality check needs at least one sample".into(),
            ));
        }
        let mut max_off = 0.0f64;
        let mut min_h = f64::INFINITY;
        for p in samples {
            self.require_domain(p)?;
            // evaluate h without the degeneracy cut so the report sees it
            let mut h = [0.0; 3];
            let mut u = [[0.0; 3]; 3];
            for i in 0..3 {
                h[i] = self.metric_exprs()[i].eval_at(p)?;
                for (k, uk) in u[i].iter_mut().enumerate() {
                    *uk = self.jacobian[k][i].eval_at(p)?;
                }
            }
            for i in 0..3 {
                min_h = min_h.min(h[i]);
                for j in 0..i {
                    let d = dot(&u[i], &u[j]) / (dot(&u[i], &u[i]) * dot(&u[j], &u[j])).sqrt();
                    max_off = max_off.max(if d.is_finite() { d.abs() } else { f64::INFINITY });
                }
            }
        }
        Ok(OrthogonalityReport {
            samples: samples.len(),
            max_off_diagonal: max_off,
            min_metric: min_h,
            pass: max_off <= ORTHOGONALITY_TOL && min_h > DEGENERATE_METRIC,
        })
    }

    /// Marks the chart usable by operators if it passes the orthogonality
    /// check on `samples`.
    pub fn validated(mut self, samples: &[[f64; 3]]) -> Result<Chart, GeometryError> {
        let report = self.check_orthogonality(samples)?;
        if !report.pass {
            return Err(GeometryError::NotOrthogonal {
                chart: self.name.clone(),
                report,
            });
        }
        self.validated = true;
        Ok(self)
    }

    pub(crate) fn require_validated(&self) -> Result<(), GeometryError> {
        if self.validated {
            Ok(())
        } else {
            Err(GeometryError::ChartNotValidated(self.name.clone()))
        }
    }

    /// `n^3` grid points strictly inside the sampling region.
    pub fn region_grid(&self, n: usize) -> Vec<[f64; 3]> {
        let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
            (0..n).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64).collect()
        };
        let [a, b, c] = self.region.map(axis);
        let mut out = Vec::with_capacity(n * n * n);
        for x in &a {
            for y in &b {
                for z in &c {
                    out.push([*x, *y, *z]);
                }
            }
        }
        out
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.coord_names();
        let show = |e: &[Expr; 3]| {
            e.iter()
                .map(|x| x.display_with(names).to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        writeln!(f, "{}", self.name)?;
        writeln!(f, "  coords: {}", names.join(", "))?;
        writeln!(f, "  maps: x, y, z = {}", show(&self.maps))?;
        writeln!(f, "  metric: {}", show(self.metric_exprs()))?;
        let domain = self.domain_description();
        if domain.is_empty() {
            write!(f, "  domain: all of R^3")
        } else {
            write!(f, "  domain: {}", domain.join(", "))
        }
    }
}
