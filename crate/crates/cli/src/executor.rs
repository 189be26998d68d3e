use covering_core::minmod::RowExecutor;
use rayon::prelude::*;

use crate::CliError;

/// Runs table rows on a dedicated rayon pool. Each row is written by one
/// task only, so the result is independent of the worker count.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    pub fn new(workers: usize) -> Result<Self, CliError> {
        if workers == 0 {
            return Err(CliError::Invalid("workers must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| CliError::Invalid(format!("thread pool: {}", e)))?;
        Ok(RayonExecutor { pool })
    }
}

impl RowExecutor for RayonExecutor {
    fn run_rows(&self, rows: Vec<&mut [f64]>, task: &(dyn Fn(usize, &mut [f64]) + Sync)) {
        self.pool.install(|| rows.into_par_iter().enumerate().for_each(|(a, row)| task(a, row)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use covering_core::float::Inflation;
    use covering_core::minmod::{SerialExecutor, ThetaTable};

    #[test]
    fn parallel_rows_match_serial() {
        let primes = [2u64, 3, 5, 7, 11, 13, 17, 19];
        let run = |exec: &dyn RowExecutor| {
            let mut t = ThetaTable::initial(5000, 1_000_000).unwrap();
            for &p in &primes {
                t.advance(p, 0.1, Inflation::default(), exec, 3).unwrap();
            }
            t
        };
        let serial = run(&SerialExecutor);
        let parallel = run(&RayonExecutor::new(3).unwrap());
        assert_eq!(serial, parallel);
        assert!(RayonExecutor::new(0).is_err());
    }
}
