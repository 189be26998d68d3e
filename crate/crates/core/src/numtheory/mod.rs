//! Primes, smooth numbers, multiplicative functions and the reciprocal sums
//! the rest of the crate consumes.

mod factored;
mod multiplicative;
mod primes;
mod smooth;
mod sums;

pub use factored::FactoredInt;
pub use multiplicative::{eval_multiplicative, mu_eps, mu_lambda, MultValue, MultiplicativeSpec, NuSchedule};
pub use primes::{dusart_lower, nth_prime_upper_estimate, PrimeSource, PrimeStream, PrimeTable};
pub use smooth::{
    smooth_head_sum, smooth_numbers, smooth_recip_product, smooth_recip_sum, smooth_tail_rankin,
    smooth_values, SmoothTail,
};
pub use sums::{lcm_sum_pairs, mu_interval_constant, mu_sum_interval, MuIntervalSweep};
