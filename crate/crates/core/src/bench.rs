//! Time and memory scaling of the double walk `W = S R S R` on random dense
//! graphs, fitted to `metric = A * N^n` on a log-log scale.
//!
//! Memory is the peak of live heap bytes as seen by [`CountingAllocator`],
//! which the calling binary has to install as its global allocator.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::TransitionMatrix;
use crate::operators::{build_psi_matrix, Operator, ReflectionOperator, UnitaryPipeline};
use crate::simulator::{evolve_observed, Readout};
use crate::state::initial_superposition;

/// Sizes below this are left out of fits unless asked for.
pub const ASYMPTOTIC_MIN_SIZE: usize = 1000;

pub const GENERATOR: &str = "entries uniform on (0,1), columns normalized";

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

/// System allocator that tracks live bytes and their high-water mark.
pub struct CountingAllocator;

impl CountingAllocator {
    fn grow(size: usize) {
        let now = CURRENT.fetch_add(size, Ordering::Relaxed) + size;
        PEAK.fetch_max(now, Ordering::Relaxed);
    }

    fn shrink(size: usize) {
        CURRENT.fetch_sub(size, Ordering::Relaxed);
    }
}

unsafe impl GlobalAlloc for CountingAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            Self::grow(layout.size());
        }
        p
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc_zeroed(layout) };
        if !p.is_null() {
            Self::grow(layout.size());
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        Self::shrink(layout.size());
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = unsafe { System.realloc(ptr, layout, new_size) };
        if !p.is_null() {
            if new_size > layout.size() {
                Self::grow(new_size - layout.size());
            } else {
                Self::shrink(layout.size() - new_size);
            }
        }
        p
    }
}

pub fn live_bytes() -> usize {
    CURRENT.load(Ordering::Relaxed)
}

/// Restarts peak tracking from the current live size.
pub fn reset_peak() {
    PEAK.store(CURRENT.load(Ordering::Relaxed), Ordering::Relaxed);
}

pub fn peak_bytes() -> usize {
    PEAK.load(Ordering::Relaxed)
}

/// Whether [`CountingAllocator`] is the active global allocator.
pub fn allocator_installed() -> bool {
    let before = live_bytes();
    let probe = std::hint::black_box(vec![0u8; 1 << 16]);
    let seen = live_bytes() >= before + probe.len();
    drop(probe);
    seen
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Time,
    Memory,
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "time" => Ok(Metric::Time),
            "memory" => Ok(Metric::Memory),
            other => Err(format!("expected time or memory, got `{other}`")),
        }
    }
}

/// `y = A x^n` fitted by least squares on `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    #[serde(rename = "A")]
    pub amplitude: f64,
    #[serde(rename = "n")]
    pub exponent: f64,
    #[serde(rename = "stderr_n")]
    pub stderr: f64,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    let m = xs.len();
    if m < 3 {
        return Err(Error::InsufficientSizes(m));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidConfig(
            "power-law fit needs positive finite data".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / m as f64;
    let my = ly.iter().sum::<f64>() / m as f64;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("fit needs distinct sizes".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(PowerLawFit {
        amplitude: intercept.exp(),
        exponent: slope,
        stderr: (ssr / (m - 2) as f64 / sxx).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub steps: usize,
    pub seed: u64,
    pub include_small: bool,
    /// Runs per size; the fastest counts.
    pub repeats: usize,
}

impl BenchConfig {
    pub fn new(sizes: Vec<usize>, steps: usize, seed: u64) -> Self {
        BenchConfig {
            sizes,
            steps,
            seed,
            include_small: false,
            repeats: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.len() < 3 {
            return Err(Error::InsufficientSizes(self.sizes.len()));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) || self.sizes[0] == 0 {
            return Err(Error::InvalidConfig(
                "sizes must be positive and strictly increasing".into(),
            ));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be at least 1".into()));
        }
        Ok(())
    }

    fn fitted(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .copied()
            .filter(|&n| self.include_small || n >= ASYMPTOTIC_MIN_SIZE)
            .collect()
    }
}

/// One size's measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRecord {
    pub size: usize,
    pub seconds: f64,
    pub peak_bytes: usize,
    pub seed: u64,
}

/// Seed used for the graph of size `n`.
pub fn size_seed(seed: u64, n: usize) -> u64 {
    seed.wrapping_add(n as u64)
}

/// Runs `steps` steps of `W` from the equal superposition on a random graph
/// of size `n`. The graph itself is input and not counted in `peak_bytes`.
pub fn measure_evolve(n: usize, steps: usize, seed: u64) -> Result<BenchRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = TransitionMatrix::random(n, &mut rng);
    reset_peak();
    let baseline = live_bytes();
    let start = Instant::now();
    let psi = Arc::new(build_psi_matrix(&g, None)?);
    let r: Operator = ReflectionOperator::new(psi.clone()).into();
    let w = UnitaryPipeline::new(vec![Operator::Swap, r.clone(), Operator::Swap, r])?;
    let phi = initial_superposition(&psi);
    let last = evolve_observed(phi, &w, steps, Readout::Second, |_, snap| {
        std::hint::black_box(snap);
    })?;
    let seconds = start.elapsed().as_secs_f64();
    let peak = peak_bytes().saturating_sub(baseline);
    drop(last);
    Ok(BenchRecord {
        size: n,
        seconds,
        peak_bytes: peak,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub metric: Metric,
    pub records: Vec<BenchRecord>,
    /// Sizes that entered the fit.
    pub fitted_sizes: Vec<usize>,
    #[serde(flatten)]
    pub fit: PowerLawFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub records: Vec<BenchRecord>,
    pub time: PowerLawFit,
    /// `None` when the counting allocator is not installed.
    pub memory: Option<PowerLawFit>,
}

#[derive(Serialize)]
struct Summary<'a> {
    time: &'a PowerLawFit,
    memory: &'a Option<PowerLawFit>,
    steps: usize,
    pipeline: &'static str,
    generator: &'static str,
    fitted_sizes: Vec<usize>,
}

impl BenchReport {
    /// One JSON object per size, then the fits.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("serializable"));
            out.push('\n');
        }
        let summary = Summary {
            time: &self.time,
            memory: &self.memory,
            steps: self.config.steps,
            pipeline: "S R S R",
            generator: GENERATOR,
            fitted_sizes: self.config.fitted(),
        };
        out.push_str(&serde_json::to_string(&summary).expect("serializable"));
        out.push('\n');
        out
    }

    pub fn scaling_fit(&self, metric: Metric) -> Option<ScalingFit> {
        let fit = match metric {
            Metric::Time => self.time,
            Metric::Memory => self.memory?,
        };
        Some(ScalingFit {
            metric,
            records: self.records.clone(),
            fitted_sizes: self.config.fitted(),
            fit,
        })
    }
}

/// Measures every size in `cfg` and fits both metrics.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let fitted = cfg.fitted();
    if fitted.len() < 3 {
        return Err(Error::InsufficientSizes(fitted.len()));
    }
    let tracked = allocator_installed();
    let mut records = Vec::with_capacity(cfg.sizes.len());
    for &n in &cfg.sizes {
        let seed = size_seed(cfg.seed, n);
        let mut best = measure_evolve(n, cfg.steps, seed)?;
        for _ in 1..cfg.repeats {
            let again = measure_evolve(n, cfg.steps, seed)?;
            best.seconds = best.seconds.min(again.seconds);
        }
        log::info!(
            "N={n}: {:.3} s, peak {} bytes",
            best.seconds,
            best.peak_bytes
        );
        records.push(best);
    }
    let used: Vec<&BenchRecord> = records.iter().filter(|r| fitted.contains(&r.size)).collect();
    let xs: Vec<f64> = used.iter().map(|r| r.size as f64).collect();
    let times: Vec<f64> = used.iter().map(|r| r.seconds).collect();
    let time = fit_power_law(&xs, &times)?;
    let memory = if tracked {
        let peaks: Vec<f64> = used.iter().map(|r| r.peak_bytes as f64).collect();
        Some(fit_power_law(&xs, &peaks)?)
    } else {
        None
    };
    Ok(BenchReport {
        config: cfg.clone(),
        records,
        time,
        memory,
    })
}

pub fn run_scaling_bench(cfg: &BenchConfig, metric: Metric) -> Result<ScalingFit> {
    run_bench(cfg)?.scaling_fit(metric).ok_or_else(|| {
        Error::InvalidConfig("memory metric needs the counting allocator installed".into())
    })
}
