//! The worker pool. All parallel paths produce bit-identical results for
//! any worker count: per-alpha work is pure and collected in canonical
//! order, Monte-Carlo streams are keyed by global sample index, and
//! aggregates are folded serially after the parallel phase.

use rayon::prelude::*;

use strata_core::field::FieldParams;
use strata_core::unifam::{
    image_size_profile, power_table, report_for_alpha, sweep_alpha_codes, SweepFilter,
    SweepResult,
};
use strata_core::wreath::{assemble_mc, mc_successes, McEstimate};
use strata_core::{Rat, TableLimit};

use crate::AppError;

pub fn pool(workers: usize) -> Result<rayon::ThreadPool, AppError> {
    if workers == 0 {
        return Err(AppError::Usage("--workers must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| AppError::Domain(e.to_string()))
}

/// Sweep with per-alpha reports distributed across the pool; entries come
/// back in canonical alpha order regardless of scheduling.
pub fn sweep(
    fp: &FieldParams,
    d: u64,
    n_max: u32,
    filter: SweepFilter,
    limit: TableLimit,
    workers: usize,
) -> Result<SweepResult, AppError> {
    let pow = power_table(fp, d, limit)?;
    let codes = sweep_alpha_codes(fp, filter)?;
    let entries: Result<Vec<_>, strata_core::Error> = pool(workers)?.install(|| {
        codes
            .par_iter()
            .map(|&code| report_for_alpha(fp, &pow, code, limit).map(|r| (code, r)))
            .collect()
    });
    Ok(SweepResult::assemble(fp, d, n_max, filter, entries?))
}

/// Monte-Carlo samples split into index ranges; the success count is a sum,
/// so the partition cannot change the estimate.
pub fn mc(d: u64, n: u32, samples: u64, seed: u64, workers: usize) -> Result<McEstimate, AppError> {
    if samples == 0 {
        return Err(AppError::Usage("--samples must be >= 1".into()));
    }
    let chunk = samples.div_ceil(workers as u64).max(1);
    let ranges: Vec<(u64, u64)> =
        (0..samples).step_by(chunk as usize).map(|s| (s, (s + chunk).min(samples))).collect();
    let successes: u64 = pool(workers)?
        .install(|| ranges.par_iter().map(|&(a, b)| mc_successes(d, n, a, b, seed)).sum());
    Ok(assemble_mc(successes, samples))
}

/// Mean image proportion `|f_alpha^k(F)| / q` over every alpha, for
/// `k = 0..=max_n`, as exact rationals.
pub fn mean_image_profile(
    fp: &FieldParams,
    d: u64,
    max_n: u32,
    limit: TableLimit,
    workers: usize,
) -> Result<Vec<Rat>, AppError> {
    let pow = power_table(fp, d, limit)?;
    let q = fp.q();
    let sums: Vec<u128> = pool(workers)?.install(|| {
        (0..q)
            .into_par_iter()
            .fold(
                || vec![0u128; max_n as usize + 1],
                |mut acc, alpha| {
                    let sizes = image_size_profile(fp, &pow, alpha, max_n);
                    for (slot, s) in acc.iter_mut().zip(&sizes) {
                        *slot += *s as u128;
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u128; max_n as usize + 1],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(&b) {
                        *x += y;
                    }
                    a
                },
            )
    });
    let denom = Rat::from_integer((q as u128 * q as u128).into());
    Ok(sums
        .into_iter()
        .map(|s| Rat::from_integer(s.into()) / denom.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use strata_core::unifam::sweep_family;

    #[test]
    fn parallel_sweep_matches_serial_for_any_worker_count() {
        let fp = FieldParams::new(101, 1).unwrap();
        let limit = TableLimit::default();
        let serial = sweep_family(&fp, 2, 4, SweepFilter::All, limit).unwrap();
        for workers in [1usize, 2, 8] {
            let par = sweep(&fp, 2, 4, SweepFilter::All, limit, workers).unwrap();
            assert_eq!(par, serial);
        }
    }

    #[test]
    fn parallel_mc_matches_serial() {
        let serial = strata_core::wreath::fix_mc(2, 4, 50_000, 31).unwrap();
        for workers in [1usize, 3, 8] {
            let par = mc(2, 4, 50_000, 31, workers).unwrap();
            assert_eq!(par, serial);
        }
    }

    #[test]
    fn mean_profile_matches_sweep_reconstruction() {
        let fp = FieldParams::new(13, 1).unwrap();
        let limit = TableLimit::default();
        let means = mean_image_profile(&fp, 2, 6, limit, 2).unwrap();
        let sweep = sweep_family(&fp, 2, 6, SweepFilter::All, limit).unwrap();
        // mean |f^k|/q = 1 - sum_{j<k} mean w_j
        let mut acc = Rat::from_integer(1.into());
        assert_eq!(means[0], acc);
        for k in 1..=6usize {
            acc -= sweep.mean_w[k - 1].clone();
            assert_eq!(means[k], acc, "k={k}");
        }
    }
}
