use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{PadicScalar, PrimeContext};
use crate::plinalg::{determinant, inverse, scaled_centered_norm_sq, smith_cartan, PMatrix};
use crate::polar::{kah_decompose, ClassUsage, SymmetricSpaceContext};

use super::apartment::{distance_to_sigma_apartment, SigmaApartmentRef};
use super::lattice::LatticeClass;

/// Digits drawn for every random unit.
pub const SAMPLE_DIGITS: usize = 16;

pub const CONJUGACY_NOTE: &str = "classes distinct as indices, conjugacy undecided";

/// How random elements of `GL(n, Q_p)` are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleModel {
    /// `k1 diag(p^e_i) k2` with `k1, k2` random in `GL(n, Z_p)` and `e_i`
    /// uniform in `[-V, V]`. Square classes of every parity keep a steady
    /// share of samples as `V` grows.
    #[default]
    Cartan,
    /// Each entry a random unit times `p^e`, `e` uniform in `[-V, V]`.
    Entrywise,
    /// A random element of `GL(n, Z_p)` times `diag(p^e_i)`.
    UnitDiagonal,
    /// A random element of `GL(n, Z_p)`.
    IntegralUnit,
    /// `diag(unit * p^e_i)`.
    Diagonal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub samples: usize,
    pub val_bound: i64,
    pub seed: u64,
    pub model: SampleModel,
    /// Run the exact nearest-apartment search (default for `n <= 2`).
    pub exact: bool,
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn new(n: usize, samples: usize, val_bound: i64, seed: u64) -> Self {
        Self {
            samples,
            val_bound,
            seed,
            model: SampleModel::default(),
            exact: n <= 2,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub class: String,
    /// `displacement(k)`, an upper bound for `d(g^-1 x0, h^-1 A_s x0)`.
    pub bound: f64,
    /// `n * |centred exponents of k|^2`, the exact form of `bound`.
    pub bound_scaled_sq: i128,
    pub exact: Option<f64>,
    pub retries: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub scaled_sq: i128,
    pub distance: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    pub compared: usize,
    pub max_exact: f64,
    pub max_gap: f64,
    pub mean_gap: f64,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub p: u64,
    pub n: usize,
    #[serde(rename = "V")]
    pub val_bound: i64,
    pub samples: usize,
    pub seed: u64,
    pub model: SampleModel,
    pub precision: u32,
    #[serde(rename = "C_emp")]
    pub c_emp: f64,
    pub chamber_vertex_diameter: f64,
    pub per_class: BTreeMap<String, ClassUsage>,
    pub histogram: Vec<HistogramBin>,
    pub gap: Option<GapStats>,
    pub witness_table_size: usize,
    pub total_retries: u64,
    pub note: String,
    #[serde(skip)]
    pub records: Vec<SampleRecord>,
}

impl ExperimentReport {
    /// One row per sample: `index,class,bound,exact`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,class,bound,exact\n");
        for r in &self.records {
            let exact = r.exact.map(|e| format!("{e:.12}")).unwrap_or_default();
            out.push_str(&format!("{},\"{}\",{:.12},{}\n", r.index, r.class, r.bound, exact));
        }
        out
    }
}

/// The `index`-th sample of a run: an independent ChaCha stream per index,
/// so results do not depend on scheduling.
pub fn sample_element(ctx: PrimeContext, n: usize, val_bound: i64, seed: u64, index: usize, model: SampleModel) -> PMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    loop {
        let g = draw(&mut rng, ctx, n, val_bound, model);
        if determinant(&g).is_ok_and(|d| !d.is_zero()) {
            return g;
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, ctx: PrimeContext, valuation: i64) -> PadicScalar {
    let p = ctx.p();
    let mut digits = Vec::with_capacity(SAMPLE_DIGITS);
    digits.push(rng.random_range(1..p));
    digits.extend((1..SAMPLE_DIGITS).map(|_| rng.random_range(0..p)));
    PadicScalar::from_digits(ctx, valuation, &digits).expect("leading digit is non-zero")
}

fn random_integer(rng: &mut ChaCha8Rng, ctx: PrimeContext) -> PadicScalar {
    let p = ctx.p();
    let digits: Vec<u64> = (0..SAMPLE_DIGITS).map(|_| rng.random_range(0..p)).collect();
    match digits.iter().position(|&d| d != 0) {
        None => PadicScalar::zero(ctx),
        Some(v) => PadicScalar::from_digits(ctx, v as i64, &digits[v..]).expect("leading digit is non-zero"),
    }
}

fn random_integral_unit(rng: &mut ChaCha8Rng, ctx: PrimeContext, n: usize) -> PMatrix {
    loop {
        let m = PMatrix::from_fn(ctx, n, n, |_, _| random_integer(rng, ctx));
        if determinant(&m).is_ok_and(|d| d.valuation() == Some(0)) {
            return m;
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, ctx: PrimeContext, n: usize, v: i64, model: SampleModel) -> PMatrix {
    match model {
        SampleModel::Entrywise => PMatrix::from_fn(ctx, n, n, |_, _| {
            let e = rng.random_range(-v..=v);
            random_unit(rng, ctx, e)
        }),
        SampleModel::Cartan => {
            let k1 = random_integral_unit(rng, ctx, n);
            let d: Vec<PadicScalar> = (0..n).map(|_| PadicScalar::p_power(ctx, rng.random_range(-v..=v))).collect();
            let k2 = random_integral_unit(rng, ctx, n);
            k1.mul(&PMatrix::diagonal(ctx, &d)).and_then(|m| m.mul(&k2)).expect("square")
        }
        SampleModel::UnitDiagonal => {
            let u = random_integral_unit(rng, ctx, n);
            let d: Vec<PadicScalar> = (0..n).map(|_| PadicScalar::p_power(ctx, rng.random_range(-v..=v))).collect();
            u.mul(&PMatrix::diagonal(ctx, &d)).expect("square")
        }
        SampleModel::IntegralUnit => random_integral_unit(rng, ctx, n),
        SampleModel::Diagonal => {
            let d: Vec<PadicScalar> = (0..n)
                .map(|_| {
                    let e = rng.random_range(-v..=v);
                    random_unit(rng, ctx, e)
                })
                .collect();
            PMatrix::diagonal(ctx, &d)
        }
    }
}

fn run_sample(index: usize, ssc: &SymmetricSpaceContext, config: &ExperimentConfig) -> Result<SampleRecord> {
    let ctx = ssc.ctx();
    let n = ssc.n();
    let g = sample_element(ctx, n, config.val_bound, config.seed, index, config.model);
    let (w, info) = kah_decompose(&g, ssc)?;
    let exponents = smith_cartan(&w.k)?.exponents;
    let bound_scaled_sq = scaled_centered_norm_sq(&exponents);
    let bound = (bound_scaled_sq as f64 / n as f64).sqrt();
    let exact = if config.exact {
        let work = ctx.with_precision(info.working)?;
        let witness = ssc.witness(&w.s)?;
        let gamma = witness.gamma.with_precision(work.precision())?;
        let gamma_inv = witness.gamma_inv.with_precision(work.precision())?;
        let apt = SigmaApartmentRef {
            conjugator: inverse(&w.h)?.mul(&gamma_inv)?,
            base: gamma,
            class_index: w.s.clone(),
        };
        let x = LatticeClass::from_basis(&inverse(&g.with_precision(work.precision())?)?)?;
        Some(distance_to_sigma_apartment(&x, &apt)?.distance)
    } else {
        None
    };
    Ok(SampleRecord {
        index,
        class: w.class_label(),
        bound,
        bound_scaled_sq,
        exact,
        retries: info.retries,
    })
}

/// Samples `g`, decomposes each as `k a h`, and records how far `g^-1 x0`
/// can be from the witnessed apartment `h^-1 A_s x0`.
pub fn quasi_density_experiment(ssc: &SymmetricSpaceContext, config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.val_bound < 0 {
        return Err(Error::InvalidInput("val_bound must be non-negative".into()));
    }
    let indices: Vec<usize> = (0..config.samples).collect();
    let records: Vec<SampleRecord> = if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        pool.install(|| indices.par_iter().map(|&i| run_sample(i, ssc, config)).collect::<Result<_>>())?
    } else {
        indices.iter().map(|&i| run_sample(i, ssc, config)).collect::<Result<_>>()?
    };
    Ok(summarise(ssc, config, records))
}

fn summarise(ssc: &SymmetricSpaceContext, config: &ExperimentConfig, records: Vec<SampleRecord>) -> ExperimentReport {
    let n = ssc.n();
    let mut per_class: BTreeMap<String, ClassUsage> = BTreeMap::new();
    let mut bins: BTreeMap<i128, usize> = BTreeMap::new();
    for r in &records {
        let usage = per_class.entry(r.class.clone()).or_insert(ClassUsage {
            count: 0,
            max_disp: 0.0,
        });
        usage.count += 1;
        usage.max_disp = usage.max_disp.max(r.bound);
        *bins.entry(r.bound_scaled_sq).or_default() += 1;
    }
    let histogram = bins
        .into_iter()
        .map(|(scaled_sq, count)| HistogramBin {
            scaled_sq,
            distance: (scaled_sq as f64 / n as f64).sqrt(),
            count,
        })
        .collect();
    let compared: Vec<(f64, f64)> = records.iter().filter_map(|r| r.exact.map(|e| (e, r.bound))).collect();
    let gap = (!compared.is_empty()).then(|| GapStats {
        compared: compared.len(),
        max_exact: compared.iter().map(|c| c.0).fold(0.0, f64::max),
        max_gap: compared.iter().map(|c| c.1 - c.0).fold(0.0, f64::max),
        mean_gap: compared.iter().map(|c| c.1 - c.0).sum::<f64>() / compared.len() as f64,
        violations: compared.iter().filter(|c| c.0 > c.1 + 1e-9).count(),
    });
    let k = n / 2;
    ExperimentReport {
        p: ssc.ctx().p(),
        n,
        val_bound: config.val_bound,
        samples: config.samples,
        seed: config.seed,
        model: config.model,
        precision: ssc.ctx().precision(),
        c_emp: records.iter().map(|r| r.bound).fold(0.0, f64::max),
        chamber_vertex_diameter: ((k * (n - k)) as f64 / n as f64).sqrt(),
        per_class,
        histogram,
        gap,
        witness_table_size: ssc.table_len(),
        total_retries: records.iter().map(|r| r.retries as u64).sum(),
        note: CONJUGACY_NOTE.to_string(),
        records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(p: u64, n: usize) -> SymmetricSpaceContext {
        SymmetricSpaceContext::standard(PrimeContext::new(p, 32).unwrap(), n).unwrap()
    }

    #[test]
    fn samples_are_reproducible() {
        let c = PrimeContext::new(5, 32).unwrap();
        let a = sample_element(c, 3, 4, 7, 11, SampleModel::Entrywise);
        let b = sample_element(c, 3, 4, 7, 11, SampleModel::Entrywise);
        assert_eq!(a, b);
        assert_ne!(a, sample_element(c, 3, 4, 7, 12, SampleModel::Entrywise));
    }

    #[test]
    fn integral_samples_have_zero_constant() {
        let ssc = space(5, 2);
        let mut config = ExperimentConfig::new(2, 20, 3, 1);
        config.model = SampleModel::IntegralUnit;
        let report = quasi_density_experiment(&ssc, &config).unwrap();
        assert_eq!(report.c_emp, 0.0);
    }

    #[test]
    fn exact_never_exceeds_bound_and_jobs_agree() {
        let ssc = space(3, 2);
        let config = ExperimentConfig::new(2, 24, 3, 42);
        let serial = quasi_density_experiment(&ssc, &config).unwrap();
        assert_eq!(serial.gap.as_ref().unwrap().violations, 0);
        let parallel = quasi_density_experiment(&ssc, &ExperimentConfig { jobs: 3, ..config }).unwrap();
        assert_eq!(serial.records, parallel.records);
        assert!(serial.to_csv().starts_with("index,class,bound,exact\n0,"));
    }
}
