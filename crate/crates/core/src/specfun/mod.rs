//! Complex special functions needed by the exact sweep solution.

mod dd;
mod gamma;
mod kummer;
mod weber;

pub use gamma::{complex_gamma, is_gamma_pole, ln_gamma, pochhammer, recip_gamma};
pub use kummer::{
    kummer_m, kummer_m_asymptotic, kummer_m_asymptotic_with, kummer_m_leading, kummer_m_series,
    kummer_m_series_with, kummer_m_with, AsymptoticBranch, KummerArgs, KummerOptions,
    DEFAULT_TRUNCATION,
};
pub use weber::{weber_y, weber_y_prime, weber_y_prime_at_zero, Parity};
