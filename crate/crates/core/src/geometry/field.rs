use std::sync::Arc;

use super::{Chart, GeometryError};
use crate::expr::{parse, EvalError, Expr};
use crate::quat::{ComplexScalar, Quaternion};

/// Complex-valued component as a pair of real expressions over `q1..q3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexExpr {
    pub re: Expr,
    pub im: Expr,
}

impl ComplexExpr {
    pub fn new(re: Expr, im: Expr) -> Self {
        Self { re, im }
    }

    pub fn real(re: Expr) -> Self {
        Self { re, im: Expr::zero() }
    }

    pub fn zero() -> Self {
        Self::real(Expr::zero())
    }

    pub fn eval_at(&self, p: &[f64; 3]) -> Result<ComplexScalar, EvalError> {
        let im = if self.im.is_zero() { 0.0 } else { self.im.eval_at(p)? };
        Ok(ComplexScalar::new(self.re.eval_at(p)?, im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_closed(&self) -> bool {
        self.re.is_closed() && self.im.is_closed()
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        Self::new(f(&self.re), f(&self.im))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    /// Multiplies both parts by a real expression.
    pub fn scale(&self, k: &Expr) -> Self {
        self.map(|e| e.mul(k))
    }

    pub fn diff_coord(&self, axis: usize) -> Self {
        self.map(|e| e.diff_coord(axis))
    }
}

/// Component expression texts for a field; `None` means zero.
#[derive(Debug, Clone, Default)]
pub struct FieldSpec<'a> {
    /// Real and imaginary parts of `f0, f1, f2, f3`.
    pub re: [Option<&'a str>; 4],
    pub im: [Option<&'a str>; 4],
}

/// `f = f0 + f1 u1 + f2 u2 + f3 u3` over a chart, components in the local frame.
#[derive(Debug, Clone)]
pub struct QuatField {
    chart: Arc<Chart>,
    f0: ComplexExpr,
    fv: [ComplexExpr; 3],
}

impl QuatField {
    /// Components must reference only the chart's coordinates.
    pub fn new(chart: Arc<Chart>, f0: ComplexExpr, fv: [ComplexExpr; 3]) -> Result<Self, GeometryError> {
        for c in std::iter::once(&f0).chain(fv.iter()) {
            if !c.is_closed() {
                let free: Vec<String> =
                    c.re.variables()
                        .into_iter()
                        .chain(c.im.variables())
                        .filter(|v| matches!(v, crate::expr::Var::Named(_)))
                        .map(|v| v.name())
                        .collect();
                return Err(GeometryError::Definition(format!(
                    "field component references unknown variable(s): {}",
                    free.join(", ")
                )));
            }
        }
        Ok(Self { chart, f0, fv })
    }

    /// Parses component texts written in the chart's coordinate names (or
    /// `q1..q3`); `params` supplies values for any other names.
    pub fn parse(chart: Arc<Chart>, spec: &FieldSpec<'_>, params: &[(&str, f64)]) -> Result<Self, GeometryError> {
        let names = chart.coord_names();
        let load = |src: Option<&str>, what: String| -> Result<Expr, GeometryError> {
            let Some(src) = src else {
                return Ok(Expr::zero());
            };
            let e = parse(src)
                .map_err(|e| GeometryError::Definition(format!("{what}: {e}")))?
                .bind_coords(&names)
                .substitute_named(&|n| params.iter().find(|(k, _)| *k == n).map(|(_, v)| *v));
            e.check_bound(&[])
                .map_err(|e| GeometryError::Definition(format!("{what}: {e}")))?;
            Ok(e)
        };
        let comp = |k: usize| -> Result<ComplexExpr, GeometryError> {
            Ok(ComplexExpr::new(
                load(spec.re[k], format!("f{k}"))?,
                load(spec.im[k], format!("f{k} (imaginary part)"))?,
            ))
        };
        let f0 = comp(0)?;
        let fv = [comp(1)?, comp(2)?, comp(3)?];
        Self::new(chart, f0, fv)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn f0(&self) -> &ComplexExpr {
        &self.f0
    }

    pub fn fv(&self) -> &[ComplexExpr; 3] {
        &self.fv
    }

    /// Component `k` of `(f0, f1, f2, f3)`.
    pub fn component(&self, k: usize) -> &ComplexExpr {
        if k == 0 {
            &self.f0
        } else {
            &self.fv[k - 1]
        }
    }

    /// The pure-vector part `f1 u1 + f2 u2 + f3 u3`.
    pub fn vector_part(&self) -> QuatField {
        Self {
            chart: self.chart.clone(),
            f0: ComplexExpr::zero(),
            fv: self.fv.clone(),
        }
    }

    /// Values in the local frame at `p` (domain checked).
    pub fn eval(&self, p: &[f64; 3]) -> Result<Quaternion, GeometryError> {
        if !self.chart.in_domain(p) {
            return Err(GeometryError::OutOfDomain {
                chart: self.chart.name().to_string(),
                point: *p,
            });
        }
        let s = self.f0.eval_at(p)?;
        let v = [self.fv[0].eval_at(p)?, self.fv[1].eval_at(p)?, self.fv[2].eval_at(p)?];
        Ok(Quaternion::new(s, v))
    }

    /// Re-expresses a field given on the Cartesian chart over `target`:
    /// `f0(q) = g0(x(q))`, `f_i(q) = sum_k g_k(x(q)) u_i^k(q)`.
    pub fn from_cartesian(target: Arc<Chart>, g: &QuatField) -> Result<QuatField, GeometryError> {
        if !g.chart.is_cartesian() {
            return Err(GeometryError::Definition(format!(
                "source field must live on the cartesian chart, not `{}`",
                g.chart.name()
            )));
        }
        let maps = target.maps().clone();
        let pull = |c: &ComplexExpr| c.map(|e| e.substitute_coords(&maps));
        let g0 = pull(&g.f0);
        let gv = [pull(&g.fv[0]), pull(&g.fv[1]), pull(&g.fv[2])];
        let u = target.frame_exprs();
        let fv = [0, 1, 2].map(|i| {
            gv[0]
                .scale(&u[i][0])
                .add(&gv[1].scale(&u[i][1]))
                .add(&gv[2].scale(&u[i][2]))
        });
        QuatField::new(target, g0, fv)
    }
}

/// `f0 + sum f_i(p) u_i(p)` in the Cartesian basis `i1, i2, i3`.
pub fn vector_to_cartesian(field: &QuatField, p: &[f64; 3]) -> Result<Quaternion, GeometryError> {
    let frame = field.chart().frame(p)?;
    let q = field.eval(p)?;
    Ok(frame_quaternion_to_cartesian(&frame, &q))
}

/// Converts a quaternion whose vector part is in the frame at `frame` to
/// Cartesian components.
pub fn frame_quaternion_to_cartesian(frame: &super::FramePoint, q: &Quaternion) -> Quaternion {
    let v = [0, 1, 2].map(|k| q.v[0].scale(frame.u[0][k]) + q.v[1].scale(frame.u[1][k]) + q.v[2].scale(frame.u[2][k]));
    Quaternion::new(q.s, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::builtin_chart;
    use std::f64::consts::PI;

    fn spherical() -> Arc<Chart> {
        Arc::new(builtin_chart("spherical").unwrap())
    }

    fn close(a: &Quaternion, b: &Quaternion, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol
    }

    #[test]
    fn radial_unit_field_in_cartesian() {
        let f = QuatField::parse(
            spherical(),
            &FieldSpec {
                re: [None, Some("1"), None, None],
                ..Default::default()
            },
            &[],
        )
        .unwrap();
        let q = vector_to_cartesian(&f, &[1.0, PI / 2.0, 0.0]).unwrap();
        assert!(close(&q, &Quaternion::basis(1), 1e-15));
    }

    #[test]
    fn scalar_field_unchanged() {
        let c = Arc::new(builtin_chart("cartesian").unwrap());
        let f = QuatField::parse(
            c,
            &FieldSpec {
                re: [Some("x*y + 2"), None, None, None],
                im: [Some("z"), None, None, None],
            },
            &[],
        )
        .unwrap();
        let q = vector_to_cartesian(&f, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(q, Quaternion::scalar(ComplexScalar::new(4.0, 3.0)));
    }

    #[test]
    fn azimuthal_unit_field() {
        let f = QuatField::parse(
            spherical(),
            &FieldSpec {
                re: [None, None, None, Some("1")],
                ..Default::default()
            },
            &[],
        )
        .unwrap();
        // u3 = (-sin psi, cos psi, 0) at psi = pi/2
        let q = vector_to_cartesian(&f, &[1.0, PI / 2.0, PI / 2.0]).unwrap();
        assert!(close(&q, &-Quaternion::basis(1), 1e-15));
    }

    #[test]
    fn unknown_names_rejected_and_params_substituted() {
        let spec = FieldSpec {
            re: [Some("k*r"), None, None, None],
            ..Default::default()
        };
        assert!(QuatField::parse(spherical(), &spec, &[]).is_err());
        let f = QuatField::parse(spherical(), &spec, &[("k", 3.0)]).unwrap();
        assert_eq!(f.eval(&[2.0, 1.0, 0.0]).unwrap().s, ComplexScalar::real(6.0));
    }

    #[test]
    fn eval_checks_domain() {
        let f = QuatField::parse(spherical(), &FieldSpec::default(), &[]).unwrap();
        assert!(matches!(
            f.eval(&[1.0, 0.0, 0.0]),
            Err(GeometryError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn cartesian_field_transfers_to_spherical() {
        let cart = Arc::new(builtin_chart("cartesian").unwrap());
        let g = QuatField::parse(
            cart,
            &FieldSpec {
                re: [Some("x*z"), Some("y"), Some("x^2"), Some("1")],
                im: [None, None, Some("z"), None],
            },
            &[],
        )
        .unwrap();
        let f = QuatField::from_cartesian(spherical(), &g).unwrap();
        let p = [1.3, 0.8, 2.1];
        let xyz = f.chart().position(&p).unwrap();
        let direct = g.eval(&xyz).unwrap();
        let via = vector_to_cartesian(&f, &p).unwrap();
        assert!(close(&direct, &via, 1e-14));
    }
}
