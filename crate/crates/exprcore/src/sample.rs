use crate::eval::{evaluate, EvalContext, EvalError};
use crate::expr::Expr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("empty interval [{lo}, {hi}] for `{name}`")]
    EmptyInterval { name: String, lo: f64, hi: f64 },
    #[error("sample count {0} is below the minimum of 8")]
    TooFewSamples(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("only {found} of {needed} sample points were valid (last rejection: {last})")]
    Insufficient { found: usize, needed: usize, last: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Option<Interval> {
        (lo.is_finite() && hi.is_finite() && lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }
}

/// Per-variable sampling box plus zero-test settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDomain {
    default: Interval,
    intervals: BTreeMap<String, Interval>,
    samples: usize,
    tolerance: f64,
    seed: u64,
    retries: usize,
}

impl Default for SampleDomain {
    fn default() -> SampleDomain {
        SampleDomain {
            default: Interval { lo: -2.0, hi: 2.0 },
            intervals: BTreeMap::new(),
            samples: 32,
            tolerance: 1e-9,
            seed: 0,
            retries: 100,
        }
    }
}

impl SampleDomain {
    pub fn new() -> SampleDomain {
        SampleDomain::default()
    }

    pub fn set_interval(&mut self, name: &str, lo: f64, hi: f64) -> Result<(), DomainError> {
        let iv = Interval::new(lo, hi).ok_or_else(|| DomainError::EmptyInterval {
            name: name.to_string(),
            lo,
            hi,
        })?;
        self.intervals.insert(name.to_string(), iv);
        Ok(())
    }

    pub fn with_interval(mut self, name: &str, lo: f64, hi: f64) -> Result<SampleDomain, DomainError> {
        self.set_interval(name, lo, hi)?;
        Ok(self)
    }

    pub fn with_samples(mut self, n: usize) -> Result<SampleDomain, DomainError> {
        if n < 8 {
            return Err(DomainError::TooFewSamples(n));
        }
        self.samples = n;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tol: f64) -> SampleDomain {
        self.tolerance = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> SampleDomain {
        self.seed = seed;
        self
    }

    pub fn with_retries(mut self, retries: usize) -> SampleDomain {
        self.retries = retries;
        self
    }

    pub fn interval(&self, name: &str) -> Interval {
        self.intervals.get(name).copied().unwrap_or(self.default)
    }

    pub fn has_interval(&self, name: &str) -> bool {
        self.intervals.contains_key(name)
    }

    pub fn intervals(&self) -> impl Iterator<Item = (&str, Interval)> {
        self.intervals.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn retries(&self) -> usize {
        self.retries
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.tolerance * (1.0 + a.abs() + b.abs())
    }
}

/// Anything that can produce candidate evaluation points.
pub trait PointSource {
    fn draw(&self, rng: &mut ChaCha8Rng, vars: &BTreeSet<String>) -> Result<EvalContext, EvalError>;
}

impl PointSource for SampleDomain {
    fn draw(&self, rng: &mut ChaCha8Rng, vars: &BTreeSet<String>) -> Result<EvalContext, EvalError> {
        Ok(vars.iter().map(|v| (v.as_str(), self.interval(v).draw(rng))).collect())
    }
}

/// Evaluate `f` at `d.samples()` accepted points drawn from `src`.
/// Domain violations reject the point; unbound variables abort.
pub fn sample_values<P, T, F>(
    src: &P,
    d: &SampleDomain,
    vars: &BTreeSet<String>,
    mut f: F,
) -> Result<Vec<T>, SampleError>
where
    P: PointSource + ?Sized,
    F: FnMut(&EvalContext) -> Result<T, EvalError>,
{
    let mut rng = d.rng();
    let mut out = Vec::with_capacity(d.samples());
    let mut rejected = 0;
    while out.len() < d.samples() {
        let attempt = src.draw(&mut rng, vars).and_then(|ctx| f(&ctx));
        match attempt {
            Ok(v) => out.push(v),
            Err(EvalError::Unbound(name)) => return Err(EvalError::Unbound(name).into()),
            Err(e) => {
                rejected += 1;
                if rejected > d.retries() {
                    return Err(SampleError::Insufficient {
                        found: out.len(),
                        needed: d.samples(),
                        last: e.to_string(),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn vars_of(exprs: &[&Expr]) -> BTreeSet<String> {
    exprs.iter().flat_map(|e| e.free_variables()).collect()
}

/// Randomized equivalence test using points from `src`.
pub fn equivalent_with<P: PointSource + ?Sized>(
    src: &P,
    a: &Expr,
    b: &Expr,
    d: &SampleDomain,
) -> Result<bool, SampleError> {
    if a == b {
        return Ok(true);
    }
    let vars = vars_of(&[a, b]);
    let pairs = sample_values(src, d, &vars, |ctx| Ok((evaluate(a, ctx)?, evaluate(b, ctx)?)))?;
    Ok(pairs.iter().all(|&(x, y)| d.close(x, y)))
}

pub fn equivalent_on_domain(a: &Expr, b: &Expr, d: &SampleDomain) -> Result<bool, SampleError> {
    equivalent_with(d, a, b, d)
}

pub fn is_zero_with<P: PointSource + ?Sized>(src: &P, e: &Expr, d: &SampleDomain) -> Result<bool, SampleError> {
    equivalent_with(src, e, &Expr::zero(), d)
}

/// Largest absolute value over the sample.
pub fn max_abs_with<P: PointSource + ?Sized>(src: &P, e: &Expr, d: &SampleDomain) -> Result<f64, SampleError> {
    let vars = e.free_variables();
    let values = sample_values(src, d, &vars, |ctx| evaluate(e, ctx))?;
    Ok(values.into_iter().fold(0.0, |m, v| m.max(v.abs())))
}

/// How an expression vanishes over a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Vanishing {
    Nowhere,
    Somewhere,
    Everywhere,
}

pub fn vanishing_with<P: PointSource + ?Sized>(
    src: &P,
    e: &Expr,
    d: &SampleDomain,
) -> Result<Vanishing, SampleError> {
    if e.is_zero() {
        return Ok(Vanishing::Everywhere);
    }
    let vars = e.free_variables();
    let values = sample_values(src, d, &vars, |ctx| evaluate(e, ctx))?;
    let zeros = values.iter().filter(|v| d.close(**v, 0.0)).count();
    Ok(if zeros == 0 {
        Vanishing::Nowhere
    } else if zeros == values.len() {
        Vanishing::Everywhere
    } else {
        Vanishing::Somewhere
    })
}
