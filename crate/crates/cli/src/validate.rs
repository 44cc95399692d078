//! Randomized check of the exact discrete identities.

use hyperheat::evolution::{check_convolution_theorem, correction_sequence, evolve, spectral_hat};
use hyperheat::transform::{check_dx_identity, check_dxx_identity, forward, inverse};
use hyperheat::{Complex64, GridFunction, GridParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CliError;

pub const MAX_VALIDATE_N: usize = 16;

#[derive(Debug, Clone)]
pub struct ValidationOptions {
    pub seed: u64,
    pub max_n: usize,
    pub samples: usize,
    /// Constant the inversion check expects; only changed to test the harness.
    pub inversion_constant: f64,
}

impl ValidationOptions {
    pub fn new(seed: u64, max_n: usize) -> Self {
        Self {
            seed,
            max_n,
            samples: 20,
            inversion_constant: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub identity: &'static str,
    pub n: usize,
    /// Largest scaled residual over the samples.
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckRow {
    pub fn pass(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub rows: Vec<CheckRow>,
}

impl ValidationReport {
    pub fn first_failure(&self) -> Option<&CheckRow> {
        self.rows.iter().find(|r| !r.pass())
    }

    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }
}

fn random_slice(params: GridParams, rng: &mut ChaCha8Rng) -> GridFunction {
    GridFunction::from_index_fn(params, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn sizes(max_n: usize, cap: usize) -> impl Iterator<Item = usize> {
    [1, 2, 4, 8, 16].into_iter().filter(move |&n| n <= max_n.min(cap))
}

struct Tracker {
    identity: &'static str,
    n: usize,
    tolerance: f64,
    worst: f64,
}

impl Tracker {
    fn new(identity: &'static str, n: usize, tolerance: f64) -> Self {
        Self {
            identity,
            n,
            tolerance,
            worst: 0.0,
        }
    }

    fn see(&mut self, residual: f64) {
        // NaN must register as a failure
        if residual.is_nan() {
            self.worst = f64::INFINITY;
        } else if residual > self.worst {
            self.worst = residual;
        }
    }

    fn row(self) -> CheckRow {
        CheckRow {
            identity: self.identity,
            n: self.n,
            residual: self.worst,
            tolerance: self.tolerance,
        }
    }
}

pub fn run_validate(opts: &ValidationOptions) -> Result<ValidationReport, CliError> {
    if opts.max_n == 0 || opts.max_n > MAX_VALIDATE_N {
        return Err(CliError::Config(format!(
            "validate needs 1 ≤ n ≤ {MAX_VALIDATE_N}, got {}",
            opts.max_n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = ValidationReport::default();

    for n in sizes(opts.max_n, 16) {
        let params = GridParams::new(n)?;
        let mut inv = Tracker::new("inversion", n, 1e-9);
        for _ in 0..opts.samples {
            let f = random_slice(params, &mut rng);
            let scale = 1.0 + f.max_abs();
            let twice = &f * opts.inversion_constant;
            inv.see(inverse(&forward(&f)).max_abs_diff(&twice)? / scale);
            inv.see(forward(&inverse(&f)).max_abs_diff(&twice)? / scale);
        }
        report.rows.push(inv.row());
    }

    for n in sizes(opts.max_n, 16) {
        let params = GridParams::new(n)?;
        let mut fwd = Tracker::new("convolution forward", n, 1e-9);
        let mut bwd = Tracker::new("convolution inverse", n, 1e-9);
        for _ in 0..opts.samples {
            let f = random_slice(params, &mut rng);
            let g = random_slice(params, &mut rng);
            let scale = (1.0 + forward(&f).max_abs()) * (1.0 + forward(&g).max_abs());
            let r = check_convolution_theorem(&f, &g)?;
            fwd.see(r.forward / scale);
            bwd.see(r.inverse / scale);
        }
        report.rows.push(fwd.row());
        report.rows.push(bwd.row());
    }

    for n in sizes(opts.max_n, 8) {
        let params = GridParams::new(n)?;
        let nf = n as f64;
        let mut dx = Tracker::new("d_x transform", n, 1e-9);
        let mut dxx = Tracker::new("d_xx transform", n, 1e-9);
        for _ in 0..opts.samples {
            let f = random_slice(params, &mut rng);
            dx.see(check_dx_identity(&f) / (1.0 + nf * f.max_abs()));
            dxx.see(check_dxx_identity(&f) / (1.0 + nf * nf * f.max_abs()));
        }
        report.rows.push(dx.row());
        report.rows.push(dxx.row());
    }

    for n in sizes(opts.max_n, 4).filter(|&n| n >= 2) {
        let params = GridParams::new(n)?;
        let steps = 6.min(params.time_count() - 1);
        let mut t = Tracker::new("spectral with corrections", n, 1e-8);
        for _ in 0..opts.samples {
            let g = random_slice(params, &mut rng);
            let field = evolve(&g, steps)?;
            let corr = correction_sequence(&field, steps);
            let g_hat = forward(&g);
            for (i, slice) in field.slices().enumerate() {
                let stepped = forward(&slice);
                let closed = spectral_hat(&g_hat, Some(&corr), i)?;
                t.see(closed.max_abs_diff(&stepped)? / (1.0 + stepped.max_abs()));
            }
        }
        report.rows.push(t.row());
    }

    for n in sizes(opts.max_n, 8).filter(|&n| n >= 2) {
        let params = GridParams::new(n)?;
        let n2 = params.n_squared();
        // keeps the support off rows -n², -n²+1, n²-1 for every step
        let steps = (8i64).min((2 * n2 - 5) / 2) as usize;
        let lo = -n2 + 2 + 2 * steps as i64;
        let hi = n2 - 3;
        let mut t = Tracker::new("spectral compact support", n, 1e-8);
        for _ in 0..opts.samples {
            let g = GridFunction::from_index_fn(params, |j| {
                if (lo..=hi).contains(&j) {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let field = evolve(&g, steps)?;
            let g_hat = forward(&g);
            for (i, slice) in field.slices().enumerate() {
                let stepped = forward(&slice);
                let closed = spectral_hat(&g_hat, None, i)?;
                t.see(closed.max_abs_diff(&stepped)? / (1.0 + stepped.max_abs()));
            }
        }
        report.rows.push(t.row());
    }

    Ok(report)
}
