//! Identity and golden-form suites.
//!
//! Suites measure; they never fail on a wrong identity. Each check becomes a
//! [`Record`] and the report's `pass` flag summarizes them.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::corpus::{generate_corpus_on, rng_for, sample_points, FieldCorpus};
use super::golden::{GoldenInputs, GoldenTable};
use super::report::{Diagnostic, Metric, Record, VerificationReport};
use super::HarnessError;
use crate::expr::Expr;
use crate::geometry::{builtin_chart, frame_quaternion_to_cartesian, Chart, ComplexExpr, QuatField};
use crate::operators::{Applied, FdScheme, LameParams, LameRoute, Op, OpError, OperatorConfig, Operators};
use crate::quat::{qconj, ComplexScalar, Quaternion};

/// Which charts an identity is checked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    CartesianOnly,
    SphericalOnly,
    NonCartesian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    CurlGrad,
    DivCurl,
    FactorizationLaplace,
    FactorizationBitsadze,
    ExpandedLaplaceScalar,
    ExpandedLaplaceVector,
    ExpandedBitsadzeVector,
    GradDivMt,
    GradDivMtScalar,
    LameDirectFactorized,
    LameDirectExpanded,
    LameFactorizedScalar,
    MatrixConjugate,
    CartesianDegeneration,
    SphericalCoupling,
    FrameCovariance,
    FdCrossCheck,
}

impl Identity {
    pub const ALL: [Identity; 17] = [
        Identity::CurlGrad,
        Identity::DivCurl,
        Identity::FactorizationLaplace,
        Identity::FactorizationBitsadze,
        Identity::ExpandedLaplaceScalar,
        Identity::ExpandedLaplaceVector,
        Identity::ExpandedBitsadzeVector,
        Identity::GradDivMt,
        Identity::GradDivMtScalar,
        Identity::LameDirectFactorized,
        Identity::LameDirectExpanded,
        Identity::LameFactorizedScalar,
        Identity::MatrixConjugate,
        Identity::CartesianDegeneration,
        Identity::SphericalCoupling,
        Identity::FrameCovariance,
        Identity::FdCrossCheck,
    ];

    fn index(self) -> usize {
        Self::ALL.iter().position(|i| *i == self).expect("listed")
    }

    pub fn id(self) -> &'static str {
        match self {
            Identity::CurlGrad => "curl_grad",
            Identity::DivCurl => "div_curl",
            Identity::FactorizationLaplace => "factorization_laplace",
            Identity::FactorizationBitsadze => "factorization_bitsadze",
            Identity::ExpandedLaplaceScalar => "expanded_laplace_scalar",
            Identity::ExpandedLaplaceVector => "expanded_laplace_vector",
            Identity::ExpandedBitsadzeVector => "expanded_bitsadze_vector",
            Identity::GradDivMt => "graddiv_mt",
            Identity::GradDivMtScalar => "graddiv_mt_scalar",
            Identity::LameDirectFactorized => "lame_direct_factorized",
            Identity::LameDirectExpanded => "lame_direct_expanded",
            Identity::LameFactorizedScalar => "lame_factorized_scalar",
            Identity::MatrixConjugate => "matrix_conjugate",
            Identity::CartesianDegeneration => "cartesian_degeneration",
            Identity::SphericalCoupling => "spherical_u1_coupling",
            Identity::FrameCovariance => "frame_covariance",
            Identity::FdCrossCheck => "fd_cross_check",
        }
    }

    /// What is compared, in words.
    pub fn statement(self) -> &'static str {
        match self {
            Identity::CurlGrad => "curl grad f0 = 0",
            Identity::DivCurl => "div curl f = 0",
            Identity::FactorizationLaplace => "-D D f = Laplacian_H f",
            Identity::FactorizationBitsadze => "-D D^r f = Bitsadze_H f",
            Identity::ExpandedLaplaceScalar => "expanded scalar Laplacian = div grad",
            Identity::ExpandedLaplaceVector => "expanded vector Laplacian = grad div - curl curl",
            Identity::ExpandedBitsadzeVector => "expanded Bitsadze operator = grad div + curl curl",
            Identity::GradDivMt => "grad div f = -(D D + D D^r) f / 2, vector part",
            Identity::GradDivMtScalar => "scalar part of (D D + D D^r) f vanishes",
            Identity::LameDirectFactorized => "Lame direct = -(alpha D D^r + beta D D)",
            Identity::LameDirectExpanded => "Lame direct = expanded curvilinear Lame",
            Identity::LameFactorizedScalar => "scalar part of the factorized Lame operator vanishes",
            Identity::MatrixConjugate => "(div f, grad f0 + curl f) = -conj(D f)",
            Identity::CartesianDegeneration => "Cartesian vector Laplacian acts componentwise",
            Identity::SphericalCoupling => "spherical u1: |Laplacian(u1)_1 - Laplacian_0(1)| = 2/r^2",
            Identity::FrameCovariance => "D f agrees with the Cartesian chart after frame conversion",
            Identity::FdCrossCheck => "symbolic results agree with central and Richardson finite differences",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Identity::LameDirectFactorized | Identity::LameDirectExpanded | Identity::FrameCovariance => 1e-8,
            Identity::GradDivMtScalar
            | Identity::LameFactorizedScalar
            | Identity::MatrixConjugate
            | Identity::CartesianDegeneration
            | Identity::SphericalCoupling => 1e-10,
            Identity::FdCrossCheck => 1e-4,
            _ => 1e-9,
        }
    }

    pub fn metric(self) -> Metric {
        match self {
            Identity::FdCrossCheck | Identity::SphericalCoupling => Metric::Absolute,
            _ => Metric::Scaled,
        }
    }

    pub fn scope(self) -> Scope {
        match self {
            Identity::CartesianDegeneration => Scope::CartesianOnly,
            Identity::SphericalCoupling => Scope::SphericalOnly,
            Identity::FrameCovariance => Scope::NonCartesian,
            _ => Scope::All,
        }
    }

    pub fn applies_to(self, chart: &Chart) -> bool {
        match self.scope() {
            Scope::All => true,
            Scope::CartesianOnly => chart.is_cartesian(),
            Scope::SphericalOnly => chart.name() == "spherical",
            Scope::NonCartesian => !chart.is_cartesian(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub operator: OperatorConfig,
    /// Sample points drawn per corpus field.
    pub points_per_field: usize,
    /// Replaces every record's tolerance when set.
    pub tolerance: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            operator: OperatorConfig::default(),
            points_per_field: 4,
            tolerance: None,
        }
    }
}

impl SuiteConfig {
    fn tolerance_for(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }
}

/// Running maximum of one comparison.
#[derive(Debug, Clone, Default)]
struct Acc {
    samples: usize,
    max_err: f64,
    max_abs: f64,
    error: Option<String>,
}

fn scaled_error(metric: Metric, a: &Quaternion, b: &Quaternion, reference: f64) -> (f64, f64) {
    let abs = (*a - *b).max_abs();
    let err = match metric {
        Metric::Absolute => abs,
        Metric::Scaled => abs / (1.0 + a.max_abs().max(b.max_abs()).max(reference)),
    };
    (err, abs)
}

impl Acc {
    fn fail(&mut self, msg: impl Into<String>) {
        if self.error.is_none() {
            self.error = Some(msg.into());
        }
    }

    fn observe(
        &mut self,
        metric: Metric,
        a: Result<Quaternion, OpError>,
        b: Result<Quaternion, OpError>,
        reference: f64,
    ) {
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let (err, abs) = scaled_error(metric, &a, &b, reference);
                if !err.is_finite() {
                    self.fail("non-finite result");
                    return;
                }
                self.samples += 1;
                self.max_err = self.max_err.max(err);
                self.max_abs = self.max_abs.max(abs);
            }
            (Err(e), _) | (_, Err(e)) => self.fail(e.to_string()),
        }
    }

    fn merge(&mut self, o: Acc) {
        self.samples += o.samples;
        self.max_err = self.max_err.max(o.max_err);
        self.max_abs = self.max_abs.max(o.max_abs);
        if let Some(e) = o.error {
            self.fail(e);
        }
    }

    fn into_record(self, id: &str, chart: &str, tolerance: f64, metric: Metric) -> Record {
        let ok = self.error.is_none() && self.samples > 0;
        let error = match (&self.error, self.samples) {
            (Some(e), _) => Some(e.clone()),
            (None, 0) => Some("no samples evaluated".to_string()),
            _ => None,
        };
        Record {
            id: id.to_string(),
            chart: chart.to_string(),
            samples: self.samples,
            max_error: ok.then_some(self.max_err),
            max_abs_error: ok.then_some(self.max_abs),
            tolerance,
            metric,
            pass: ok && self.max_err <= tolerance,
            error,
        }
    }
}

const STREAM_POINTS: u64 = 1000;
const STREAM_LAME: u64 = 1_000_000;

/// Elastic moduli drawn per field, always admissible.
fn lame_for(seed: u64, chart: &str, i: usize) -> LameParams {
    let mut rng = rng_for(seed, chart, STREAM_LAME + i as u64);
    let mu = rng.gen_range(0.5..2.0);
    let lambda = rng.gen_range(-0.6 * mu..2.0);
    LameParams::new(mu, lambda).expect("drawn inside the admissible range")
}

fn field_points(seed: u64, chart: &Chart, i: usize, n: usize) -> Vec<[f64; 3]> {
    sample_points(chart, &mut rng_for(seed, chart.name(), STREAM_POINTS + i as u64), n)
}

/// Finite-difference settings the symbolic results are cross-checked
/// against, independent of the run's own mode. Richardson gets a larger
/// step because its half-step stencils amplify rounding.
pub const CROSS_CHECK_SETTINGS: [(FdScheme, f64); 2] = [(FdScheme::Central2, 1e-4), (FdScheme::Richardson, 1e-3)];

fn cross_check_ops(chart: &Arc<Chart>) -> Result<Vec<(Operators, Operators)>, OpError> {
    let symbolic = Operators::new(chart.clone(), OperatorConfig::symbolic())?;
    CROSS_CHECK_SETTINGS
        .iter()
        .map(|(scheme, step)| {
            let fd = Operators::new(chart.clone(), OperatorConfig::finite_difference(*scheme, *step)?)?;
            Ok((symbolic.clone(), fd))
        })
        .collect()
}

fn scalar_of(c: &ComplexExpr, chart: &Arc<Chart>) -> Result<QuatField, OpError> {
    Ok(QuatField::new(
        chart.clone(),
        c.clone(),
        [ComplexExpr::zero(), ComplexExpr::zero(), ComplexExpr::zero()],
    )?)
}

const FD_CROSS_OPS: [Op; 3] = [Op::MtLeft, Op::LaplaceQuat, Op::BitsadzeQuat];

struct Built {
    curl_grad: Applied,
    div_curl: Applied,
    mt: Applied,
    mt_sq: Applied,
    mt_lr: Applied,
    lap_quat: Applied,
    bits_quat: Applied,
    lap0: Applied,
    lap0c: Applied,
    lapv: Applied,
    lapvc: Applied,
    bitsv: Applied,
    bitsvc: Applied,
    graddiv: Applied,
    graddiv_mt: Applied,
    matrix: Applied,
    lame: [Applied; 3],
    component_lap0: Option<[Applied; 3]>,
    covariance: Option<(QuatField, Applied, Applied)>,
    fd_pairs: Vec<(Applied, Applied)>,
}

struct Ctx<'a> {
    chart: &'a Arc<Chart>,
    ops: Operators,
    cross: Vec<(Operators, Operators)>,
    cartesian: Option<(Operators, &'a FieldCorpus)>,
    seed: u64,
    points_per_field: usize,
}

impl Ctx<'_> {
    fn build(&self, i: usize, f: &QuatField) -> Result<Built, OpError> {
        let ap = |op| self.ops.apply(f, op);
        let lp = lame_for(self.seed, self.chart.name(), i);
        let component_lap0 = if self.chart.is_cartesian() {
            let mut v = Vec::new();
            for c in f.fv() {
                v.push(self.ops.apply(&scalar_of(c, self.chart)?, Op::LaplaceScalar)?);
            }
            Some(v.try_into().expect("three components"))
        } else {
            None
        };
        let covariance = match &self.cartesian {
            Some((cart_ops, corpus)) => {
                let g = &corpus.fields[i % corpus.fields.len()];
                let pulled = QuatField::from_cartesian(self.chart.clone(), g)?;
                Some((
                    g.clone(),
                    cart_ops.apply(g, Op::MtLeft)?,
                    self.ops.apply(&pulled, Op::MtLeft)?,
                ))
            }
            None => None,
        };
        let mut fd_pairs = Vec::new();
        for (symbolic, fd) in &self.cross {
            for op in FD_CROSS_OPS {
                fd_pairs.push((symbolic.apply(f, op)?, fd.apply(f, op)?));
            }
        }
        Ok(Built {
            curl_grad: ap(Op::CurlGrad)?,
            div_curl: ap(Op::DivCurl)?,
            mt: ap(Op::MtLeft)?,
            mt_sq: ap(Op::MtSquared)?,
            mt_lr: ap(Op::MtLeftRight)?,
            lap_quat: ap(Op::LaplaceQuat)?,
            bits_quat: ap(Op::BitsadzeQuat)?,
            lap0: ap(Op::LaplaceScalar)?,
            lap0c: ap(Op::LaplaceScalarComposed)?,
            lapv: ap(Op::LaplaceVector)?,
            lapvc: ap(Op::LaplaceVectorComposed)?,
            bitsv: ap(Op::BitsadzeVector)?,
            bitsvc: ap(Op::BitsadzeVectorComposed)?,
            graddiv: ap(Op::GradDiv)?,
            graddiv_mt: ap(Op::GradDivViaMt)?,
            matrix: ap(Op::MtMatrix)?,
            lame: [
                ap(Op::Lame(lp, LameRoute::Direct))?,
                ap(Op::Lame(lp, LameRoute::Expanded))?,
                ap(Op::Lame(lp, LameRoute::Factorized))?,
            ],
            component_lap0,
            covariance,
            fd_pairs,
        })
    }

    /// One accumulator per identity, plus the comparison against the unsigned Lamé factorization.
    fn check_field(&self, i: usize, f: &QuatField) -> (Vec<Acc>, Acc) {
        let mut acc = vec![Acc::default(); Identity::ALL.len()];
        let mut unsigned_form = Acc::default();
        let b = match self.build(i, f) {
            Ok(b) => b,
            Err(e) => {
                for a in &mut acc {
                    a.fail(e.to_string());
                }
                return (acc, unsigned_form);
            }
        };
        let points = field_points(self.seed, self.chart, i, self.points_per_field);
        for p in &points {
            let reference = match f.eval(p) {
                Ok(q) => q.max_abs(),
                Err(e) => {
                    for a in &mut acc {
                        a.fail(e.to_string());
                    }
                    continue;
                }
            };
            let mut obs = |id: Identity, a, b| acc[id.index()].observe(id.metric(), a, b, reference);
            let zero = || Ok(Quaternion::ZERO);

            obs(Identity::CurlGrad, b.curl_grad.at(p), zero());
            obs(Identity::DivCurl, b.div_curl.at(p), zero());
            obs(
                Identity::FactorizationLaplace,
                b.mt_sq.at(p).map(|q| -q),
                b.lap_quat.at(p),
            );
            obs(
                Identity::FactorizationBitsadze,
                b.mt_lr.at(p).map(|q| -q),
                b.bits_quat.at(p),
            );
            obs(Identity::ExpandedLaplaceScalar, b.lap0.at(p), b.lap0c.at(p));
            obs(Identity::ExpandedLaplaceVector, b.lapv.at(p), b.lapvc.at(p));
            obs(Identity::ExpandedBitsadzeVector, b.bitsv.at(p), b.bitsvc.at(p));

            let gdm = b.graddiv_mt.at(p);
            obs(
                Identity::GradDivMt,
                b.graddiv.at(p),
                gdm.clone().map(|q| q.vector_part()),
            );
            obs(Identity::GradDivMtScalar, gdm.map(|q| q.scalar_part()), zero());

            let direct = b.lame[0].at(p);
            let factorized = b.lame[2].at(p);
            obs(
                Identity::LameDirectFactorized,
                direct.clone(),
                factorized.clone().map(|q| q.vector_part()),
            );
            obs(Identity::LameDirectExpanded, direct.clone(), b.lame[1].at(p));
            obs(
                Identity::LameFactorizedScalar,
                factorized.clone().map(|q| q.scalar_part()),
                zero(),
            );
            unsigned_form.observe(Metric::Scaled, direct, factorized.map(|q| -q.vector_part()), reference);

            obs(
                Identity::MatrixConjugate,
                b.matrix.at(p),
                b.mt.at(p).map(|q| -qconj(&q)),
            );

            if let Some(c) = &b.component_lap0 {
                let each: Result<Vec<ComplexScalar>, OpError> = c.iter().map(|a| a.at(p).map(|q| q.s)).collect();
                let componentwise = each.map(|v| Quaternion::vector([v[0], v[1], v[2]]));
                obs(Identity::CartesianDegeneration, b.lapv.at(p), componentwise);
            }

            if let Some((g, on_cart, on_chart)) = &b.covariance {
                let pair = (|| -> Result<(Quaternion, Quaternion, f64), OpError> {
                    let xyz = self.chart.position(p)?;
                    let frame = self.chart.frame(p)?;
                    let here = frame_quaternion_to_cartesian(&frame, &on_chart.at(p)?);
                    let there = on_cart.at(&xyz)?;
                    Ok((here, there, g.eval(&xyz)?.max_abs()))
                })();
                let idx = Identity::FrameCovariance.index();
                match pair {
                    Ok((a, c, r)) => acc[idx].observe(Metric::Scaled, Ok(a), Ok(c), r),
                    Err(e) => acc[idx].fail(e.to_string()),
                }
            }

            for (mine, theirs) in &b.fd_pairs {
                acc[Identity::FdCrossCheck.index()].observe(Metric::Absolute, mine.at(p), theirs.at(p), reference);
            }
        }
        (acc, unsigned_form)
    }
}

/// Checks `|Laplacian(u1)_1 - Laplacian_0(1)| = 2/r^2` on the spherical chart.
fn spherical_coupling(chart: &Arc<Chart>, config: &SuiteConfig, seed: u64, n: usize) -> Acc {
    let mut acc = Acc::default();
    let run = || -> Result<(Applied, Applied), OpError> {
        let ops = Operators::new(chart.clone(), config.operator)?;
        let one = ComplexExpr::real(Expr::one());
        let zero = ComplexExpr::zero;
        let u1 = QuatField::new(chart.clone(), zero(), [one.clone(), zero(), zero()])?;
        let scalar_one = scalar_of(&one, chart)?;
        Ok((
            ops.apply(&u1, Op::LaplaceVector)?,
            ops.apply(&scalar_one, Op::LaplaceScalar)?,
        ))
    };
    let (lapv, lap0) = match run() {
        Ok(x) => x,
        Err(e) => {
            acc.fail(e.to_string());
            return acc;
        }
    };
    for p in sample_points(chart, &mut rng_for(seed, chart.name(), 77), n) {
        let r = p[0];
        let got = lapv.at(&p).and_then(|v| {
            let s = lap0.at(&p)?.s;
            let d = v.v[0] - s;
            Ok(Quaternion::vector([ComplexScalar::real(d.abs()), v.v[1], v.v[2]]))
        });
        let want = Quaternion::vector([
            ComplexScalar::real(2.0 / (r * r)),
            ComplexScalar::ZERO,
            ComplexScalar::ZERO,
        ]);
        acc.observe(Metric::Absolute, got, Ok(want), 0.0);
    }
    acc
}

/// Runs every identity that applies to the corpus chart.
pub fn identity_suite(corpus: &FieldCorpus, config: &SuiteConfig) -> Result<VerificationReport, HarnessError> {
    let chart = &corpus.chart;
    let ops = Operators::new(chart.clone(), config.operator)?;
    let cross = cross_check_ops(chart)?;
    let cart_corpus;
    let cartesian = if chart.is_cartesian() {
        None
    } else {
        let cart = Arc::new(builtin_chart("cartesian")?);
        cart_corpus = generate_corpus_on(corpus.seed, corpus.count(), cart.clone())?;
        Some((Operators::new(cart, config.operator)?, &cart_corpus))
    };
    let ctx = Ctx {
        chart,
        ops,
        cross,
        cartesian,
        seed: corpus.seed,
        points_per_field: config.points_per_field,
    };
    let per_field: Vec<(Vec<Acc>, Acc)> = corpus
        .fields
        .par_iter()
        .enumerate()
        .map(|(i, f)| ctx.check_field(i, f))
        .collect();
    let mut totals = vec![Acc::default(); Identity::ALL.len()];
    let mut unsigned_form = Acc::default();
    for (accs, ps) in per_field {
        for (t, a) in totals.iter_mut().zip(accs) {
            t.merge(a);
        }
        unsigned_form.merge(ps);
    }
    let coupling_samples = (corpus.count() * config.points_per_field).max(100);
    totals[Identity::SphericalCoupling.index()] = spherical_coupling(chart, config, corpus.seed, coupling_samples);

    let mut report = VerificationReport::new(
        "identity",
        corpus.seed,
        corpus.count(),
        config.points_per_field,
        &config.operator,
        config.tolerance,
    );
    report.charts.push(chart.name().to_string());
    for (id, acc) in Identity::ALL.iter().zip(totals) {
        if id.applies_to(chart) {
            let tol = config.tolerance_for(id.default_tolerance());
            report.push(acc.into_record(id.id(), chart.name(), tol, id.metric()));
        }
    }
    let corrected = report
        .record(Identity::LameDirectFactorized.id(), chart.name())
        .and_then(|r| r.max_error);
    report
        .diagnostics
        .push(lame_sign_diagnostic(chart.name(), corrected, &unsigned_form));
    Ok(report)
}

fn lame_sign_diagnostic(chart: &str, corrected: Option<f64>, unsigned: &Acc) -> Diagnostic {
    let unsigned_err = if unsigned.error.is_none() && unsigned.samples > 0 {
        Some(unsigned.max_err)
    } else {
        None
    };
    let mut values = BTreeMap::new();
    if let Some(c) = corrected {
        values.insert("corrected_sign_max_error".to_string(), c);
    }
    if let Some(p) = unsigned_err {
        values.insert("unsigned_form_max_error".to_string(), p);
    }
    let message = match (corrected, unsigned_err) {
        (Some(c), Some(p)) if c < p => format!(
            "sign mismatch: L = alpha D D^r + beta D D disagrees with the direct Lame operator (max scaled error {p:.3e}); \
             L = -(alpha D D^r + beta D D) agrees (max scaled error {c:.3e}); the corrected sign is used"
        ),
        (Some(c), Some(p)) => format!(
            "no sign mismatch observed: corrected sign error {c:.3e}, uncorrected sign error {p:.3e}"
        ),
        _ => "sign comparison unavailable: evaluation errors".to_string(),
    };
    Diagnostic {
        id: "lame_factorization_sign".to_string(),
        chart: chart.to_string(),
        message,
        values,
    }
}

/// Points at `r = 0.5, 1, 2` for the fixed-field golden checks.
fn radial_points() -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for r in [0.5, 1.0, 2.0] {
        for (theta, psi) in [(0.4, 0.0), (1.0, 0.5), (std::f64::consts::FRAC_PI_2, 3.0), (2.6, 5.5)] {
            out.push([r, theta, psi]);
        }
    }
    out
}

/// Compares the chart's closed forms with the generic routes over the
/// corpus. Works on any chart that has forms in the table.
pub fn golden_suite(corpus: &FieldCorpus, config: &SuiteConfig) -> Result<VerificationReport, HarnessError> {
    let chart = &corpus.chart;
    let table = GoldenTable::builtin();
    let forms: Vec<_> = table.for_chart(chart.name()).collect();
    if forms.is_empty() {
        return Err(HarnessError::Fixture(format!(
            "no golden forms for chart `{}`",
            chart.name()
        )));
    }
    let ops = Operators::new(chart.clone(), config.operator)?;
    let per_field: Vec<Vec<Acc>> = corpus
        .fields
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let inputs = GoldenInputs::new(f);
            let points = field_points(corpus.seed, chart, i, config.points_per_field);
            forms
                .iter()
                .map(|form| {
                    let mut acc = Acc::default();
                    let generic = match ops.apply(f, form.op.generic()) {
                        Ok(a) => a,
                        Err(e) => {
                            acc.fail(e.to_string());
                            return acc;
                        }
                    };
                    for p in &points {
                        let reference = f.eval(p).map(|q| q.max_abs()).unwrap_or(0.0);
                        let closed = form.eval(&inputs, p).map_err(OpError::from);
                        acc.observe(Metric::Scaled, closed, generic.at(p), reference);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut report = VerificationReport::new(
        "golden",
        corpus.seed,
        corpus.count(),
        config.points_per_field,
        &config.operator,
        config.tolerance,
    );
    report.charts.push(chart.name().to_string());
    for (k, form) in forms.iter().enumerate() {
        let mut acc = Acc::default();
        for f in &per_field {
            acc.merge(f[k].clone());
        }
        let tol = config.tolerance_for(1e-9);
        report.push(acc.into_record(&format!("golden_{}", form.op.name()), chart.name(), tol, Metric::Scaled));
    }
    if chart.name() == "spherical" {
        for r in fixed_spherical_records(chart, config)? {
            report.push(r);
        }
    }
    Ok(report)
}

/// The spherical golden suite: closed forms against generic routes over the
/// corpus, plus the fixed fields `u1` and `r^2`.
pub fn golden_spherical_suite(corpus: &FieldCorpus, config: &SuiteConfig) -> Result<VerificationReport, HarnessError> {
    if corpus.chart.name() != "spherical" {
        return Err(HarnessError::Fixture(format!(
            "the spherical golden suite needs a spherical corpus, got `{}`",
            corpus.chart.name()
        )));
    }
    let mut report = golden_suite(corpus, config)?;
    report.suite = "golden_spherical".to_string();
    Ok(report)
}

/// `u1` under D and the vector Laplacian at `r = 0.5, 1, 2`, and the scalar
/// Laplacian of `r^2`, each through both the closed form and the generic
/// route, against exact values.
fn fixed_spherical_records(chart: &Arc<Chart>, config: &SuiteConfig) -> Result<Vec<Record>, HarnessError> {
    let table = GoldenTable::builtin();
    let ops = Operators::new(chart.clone(), config.operator)?;
    let zero = ComplexExpr::zero;
    let one = ComplexExpr::real(Expr::one());
    let u1 = QuatField::new(chart.clone(), zero(), [one, zero(), zero()])?;
    let r2 = QuatField::new(
        chart.clone(),
        ComplexExpr::real(Expr::coord(0).powf(2.0)),
        [zero(), zero(), zero()],
    )?;
    type Exact = fn(f64) -> Quaternion;
    let cases: [(&str, &QuatField, super::golden::GoldenOp, Exact, f64); 3] = [
        (
            "golden_u1_mt",
            &u1,
            super::golden::GoldenOp::Mt,
            |r| Quaternion::real(-2.0 / r, 0.0, 0.0, 0.0),
            1e-12,
        ),
        (
            "golden_u1_lapv",
            &u1,
            super::golden::GoldenOp::Lapv,
            |r| Quaternion::real(0.0, -2.0 / (r * r), 0.0, 0.0),
            1e-12,
        ),
        (
            "golden_r2_lap0",
            &r2,
            super::golden::GoldenOp::Lap0,
            |_| Quaternion::real(6.0, 0.0, 0.0, 0.0),
            1e-10,
        ),
    ];
    let mut out = Vec::new();
    for (id, field, gop, exact, tol) in cases {
        let form = table
            .get("spherical", gop)
            .ok_or_else(|| HarnessError::Fixture(format!("missing spherical {}", gop.name())))?;
        let inputs = GoldenInputs::new(field);
        let generic = ops.apply(field, gop.generic())?;
        let mut acc = Acc::default();
        for p in radial_points() {
            let want = exact(p[0]);
            acc.observe(
                Metric::Absolute,
                form.eval(&inputs, &p).map_err(OpError::from),
                Ok(want),
                0.0,
            );
            acc.observe(Metric::Absolute, generic.at(&p), Ok(want), 0.0);
        }
        out.push(acc.into_record(id, chart.name(), config.tolerance_for(tol), Metric::Absolute));
    }
    Ok(out)
}
