//! Closed-form operator expansions for specific charts, loaded from the
//! fixture file and evaluated on field derivatives.
//!
//! A form is four component expressions (scalar part, then `u1..u3`) in the
//! chart's coordinate names and the symbols `f0..f3`, `dAfK` (first
//! derivative of `fK` in coordinate `A`, 1-based) and `dABfK` with `A <= B`.

use std::sync::OnceLock;

use serde::Deserialize;

use super::HarnessError;
use crate::expr::{parse, EvalEnv, EvalError, Expr};
use crate::geometry::{builtin_chart, QuatField};
use crate::operators::Op;
use crate::quat::{ComplexScalar, Quaternion};

const BUILTIN_FORMS: &str = include_str!("../../fixtures/golden_forms.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GoldenOp {
    Mt,
    Lap0,
    Lapv,
    Bitsv,
}

impl GoldenOp {
    pub const ALL: [GoldenOp; 4] = [GoldenOp::Mt, GoldenOp::Lap0, GoldenOp::Lapv, GoldenOp::Bitsv];

    pub fn name(self) -> &'static str {
        match self {
            GoldenOp::Mt => "mt",
            GoldenOp::Lap0 => "lap0",
            GoldenOp::Lapv => "lapv",
            GoldenOp::Bitsv => "bitsv",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == s)
    }

    /// The generic curvilinear operator the form is an expansion of.
    pub fn generic(self) -> Op {
        match self {
            GoldenOp::Mt => Op::MtLeft,
            GoldenOp::Lap0 => Op::LaplaceScalar,
            GoldenOp::Lapv => Op::LaplaceVector,
            GoldenOp::Bitsv => Op::BitsadzeVector,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GoldenForm {
    pub chart: String,
    pub op: GoldenOp,
    pub sources: [String; 4],
    exprs: [Expr; 4],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormFile {
    #[allow(dead_code)]
    schema_version: u32,
    #[allow(dead_code)]
    symbols: Option<String>,
    forms: Vec<FormDef>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormDef {
    chart: String,
    operator: String,
    components: [String; 4],
}

/// Every symbol a form may reference besides the coordinates.
pub fn field_symbols() -> Vec<String> {
    let mut out = Vec::new();
    for k in 0..4 {
        out.push(format!("f{k}"));
        for a in 1..=3 {
            out.push(format!("d{a}f{k}"));
            for b in a..=3 {
                out.push(format!("d{a}{b}f{k}"));
            }
        }
    }
    out
}

impl GoldenForm {
    pub fn new(chart: &str, op: GoldenOp, sources: [String; 4]) -> Result<Self, HarnessError> {
        let names = builtin_chart(chart)?.coord_names().map(str::to_string);
        let symbols = field_symbols();
        let allowed: Vec<&str> = symbols.iter().map(String::as_str).collect();
        let mut exprs = Vec::with_capacity(4);
        for (i, src) in sources.iter().enumerate() {
            let e = parse(src)
                .map_err(|e| HarnessError::Fixture(format!("{chart}/{}[{i}]: {e}", op.name())))?
                .bind_coords(&names);
            e.check_bound(&allowed)
                .map_err(|e| HarnessError::Fixture(format!("{chart}/{}[{i}]: {e}", op.name())))?;
            exprs.push(e);
        }
        let exprs: [Expr; 4] = exprs.try_into().expect("four components");
        Ok(Self {
            chart: chart.to_string(),
            op,
            sources,
            exprs,
        })
    }

    pub fn exprs(&self) -> &[Expr; 4] {
        &self.exprs
    }

    /// Value at `p` for the field whose derivatives `inputs` holds.
    pub fn eval(&self, inputs: &GoldenInputs, p: &[f64; 3]) -> Result<Quaternion, EvalError> {
        let re = inputs.env(p, Part::Re)?;
        let im = inputs.env(p, Part::Im)?;
        let mut c = [ComplexScalar::ZERO; 4];
        for (k, e) in self.exprs.iter().enumerate() {
            let a = e.eval(&re)?;
            // forms are linear in the field, so the imaginary part goes through alone
            let b = if inputs.has_imaginary { e.eval(&im)? } else { 0.0 };
            c[k] = ComplexScalar::new(a, b);
        }
        Ok(Quaternion::from_components(c))
    }
}

#[derive(Debug, Clone)]
pub struct GoldenTable {
    forms: Vec<GoldenForm>,
}

impl GoldenTable {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let file: FormFile = serde_json::from_str(text).map_err(|e| HarnessError::Fixture(e.to_string()))?;
        let mut forms = Vec::new();
        for def in file.forms {
            let op = GoldenOp::from_name(&def.operator)
                .ok_or_else(|| HarnessError::Fixture(format!("unknown operator `{}`", def.operator)))?;
            forms.push(GoldenForm::new(&def.chart, op, def.components)?);
        }
        Ok(Self { forms })
    }

    /// The table shipped with the crate.
    pub fn builtin() -> &'static GoldenTable {
        static TABLE: OnceLock<GoldenTable> = OnceLock::new();
        TABLE.get_or_init(|| GoldenTable::from_json(BUILTIN_FORMS).expect("bundled golden forms are valid"))
    }

    pub fn forms(&self) -> &[GoldenForm] {
        &self.forms
    }

    pub fn get(&self, chart: &str, op: GoldenOp) -> Option<&GoldenForm> {
        self.forms.iter().find(|f| f.chart == chart && f.op == op)
    }

    pub fn for_chart<'a>(&'a self, chart: &'a str) -> impl Iterator<Item = &'a GoldenForm> + 'a {
        self.forms.iter().filter(move |f| f.chart == chart)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Part {
    Re,
    Im,
}

/// Symbolic derivatives of a field's components up to second order.
#[derive(Debug, Clone)]
pub struct GoldenInputs {
    /// `(symbol, real part, imaginary part)`
    entries: Vec<(String, Expr, Expr)>,
    has_imaginary: bool,
}

impl GoldenInputs {
    pub fn new(field: &QuatField) -> Self {
        let mut entries = Vec::new();
        let mut has_imaginary = false;
        for k in 0..4 {
            let c = field.component(k);
            has_imaginary |= !c.im.is_zero();
            entries.push((format!("f{k}"), c.re.clone(), c.im.clone()));
            for a in 0..3 {
                let d = c.diff_coord(a);
                entries.push((format!("d{}f{k}", a + 1), d.re.clone(), d.im.clone()));
                for b in a..3 {
                    let dd = d.diff_coord(b);
                    entries.push((format!("d{}{}f{k}", a + 1, b + 1), dd.re, dd.im));
                }
            }
        }
        Self { entries, has_imaginary }
    }

    fn env(&self, p: &[f64; 3], part: Part) -> Result<EvalEnv, EvalError> {
        let mut env = EvalEnv::with_coords(*p);
        for (name, re, im) in &self.entries {
            let e = match part {
                Part::Re => re,
                Part::Im => im,
            };
            let v = if e.is_zero() { 0.0 } else { e.eval_at(p)? };
            env.set(name, v);
        }
        Ok(env)
    }
}
