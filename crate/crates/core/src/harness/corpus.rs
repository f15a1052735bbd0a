//! Seeded random field corpora.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;
use crate::expr::Expr;
use crate::geometry::{builtin_chart, Chart, ComplexExpr, QuatField};

/// Region points each generated field must evaluate cleanly at.
pub const SCREENING_SAMPLES: usize = 50;
const MAX_ATTEMPTS: usize = 100;
const MAX_TERMS: usize = 4;
const MAX_DEGREE: u32 = 3;
const MAX_COEFFICIENT: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct FieldCorpus {
    pub seed: u64,
    pub chart: Arc<Chart>,
    pub fields: Vec<QuatField>,
}

impl FieldCorpus {
    pub fn count(&self) -> usize {
        self.fields.len()
    }
}

/// FNV-1a, so each chart gets its own stream from one seed.
fn chart_salt(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Deterministic generator for `(seed, chart, purpose)`.
pub fn rng_for(seed: u64, chart: &str, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ chart_salt(chart));
    rng.set_stream(purpose);
    rng
}

const STREAM_FIELDS: u64 = 1;
const STREAM_SCREEN: u64 = 2;

/// One factor and its polynomial degree (0 for trig factors).
fn factor(rng: &mut ChaCha8Rng) -> (Expr, u32) {
    let axis = rng.gen_range(0..3);
    let q = Expr::coord(axis);
    match rng.gen_range(0..4) {
        0 | 1 => {
            let k = rng.gen_range(1..=MAX_DEGREE);
            (q.powf(k as f64), k)
        }
        2 => (q.sin(), 0),
        _ => (q.cos(), 0),
    }
}

fn term(rng: &mut ChaCha8Rng) -> Expr {
    let body = if rng.gen_bool(0.3) {
        loop {
            let (a, da) = factor(rng);
            let (b, db) = factor(rng);
            if da + db <= MAX_DEGREE {
                break a.mul(&b);
            }
        }
    } else {
        factor(rng).0
    };
    // three decimals keeps printed corpora readable
    let c = (rng.gen_range(-MAX_COEFFICIENT..=MAX_COEFFICIENT) * 1000.0).round() / 1000.0;
    let c = if c == 0.0 { 1.0 } else { c };
    Expr::constant(c).mul(&body)
}

fn component(rng: &mut ChaCha8Rng) -> Expr {
    let n = rng.gen_range(1..=MAX_TERMS);
    (0..n).fold(Expr::zero(), |acc, _| acc.add(&term(rng)))
}

fn complex_component(rng: &mut ChaCha8Rng) -> ComplexExpr {
    let re = component(rng);
    let im = if rng.gen_bool(0.5) {
        component(rng)
    } else {
        Expr::zero()
    };
    ComplexExpr::new(re, im)
}

/// Uniform points in the chart's sampling region that lie in its domain and
/// have a usable metric.
pub fn sample_points(chart: &Chart, rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 3]> {
    let region = chart.region();
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n && tries < 1000 * n.max(1) {
        tries += 1;
        let p = region.map(|(lo, hi)| if hi > lo { rng.gen_range(lo..hi) } else { lo });
        if chart.metric(&p).is_ok() {
            out.push(p);
        }
    }
    out
}

fn screen(field: &QuatField, points: &[[f64; 3]]) -> bool {
    points.iter().all(|p| match field.eval(p) {
        Ok(q) => q.components().iter().all(|c| c.re.is_finite() && c.im.is_finite()),
        Err(_) => false,
    })
}

/// `count` fields on the named built-in chart.
pub fn generate_corpus(seed: u64, count: usize, chart: &str) -> Result<FieldCorpus, HarnessError> {
    let chart = Arc::new(builtin_chart(chart)?);
    generate_corpus_on(seed, count, chart)
}

/// `count` fields on any validated chart. Each component is a sum of up to
/// four terms: a monomial `q_i^k` (`k <= 3`), `sin q_i`, `cos q_i`, or a
/// product of two of these with total degree at most 3, each with a
/// coefficient in `[-2, 2]`.
pub fn generate_corpus_on(seed: u64, count: usize, chart: Arc<Chart>) -> Result<FieldCorpus, HarnessError> {
    if count == 0 {
        return Err(HarnessError::EmptyCorpus);
    }
    let mut rng = rng_for(seed, chart.name(), STREAM_FIELDS);
    let screen_points = sample_points(
        &chart,
        &mut rng_for(seed, chart.name(), STREAM_SCREEN),
        SCREENING_SAMPLES,
    );
    if screen_points.is_empty() {
        return Err(HarnessError::Screening(chart.name().to_string()));
    }
    let mut fields = Vec::with_capacity(count);
    for _ in 0..count {
        let mut accepted = None;
        for _ in 0..MAX_ATTEMPTS {
            let f0 = complex_component(&mut rng);
            let fv = [0, 1, 2].map(|_| complex_component(&mut rng));
            let field = QuatField::new(chart.clone(), f0, fv)?;
            if screen(&field, &screen_points) {
                accepted = Some(field);
                break;
            }
        }
        fields.push(accepted.ok_or_else(|| HarnessError::Screening(chart.name().to_string()))?);
    }
    Ok(FieldCorpus { seed, chart, fields })
}
