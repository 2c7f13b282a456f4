//! dB conversions. All models compute in linear units; these helpers are the
//! only place decibels enter or leave.

use crate::Real;

#[inline]
pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

#[inline]
pub fn linear_to_db<T: Real>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

/// Watts from dBm.
#[inline]
pub fn dbm_to_watts<T: Real>(dbm: T) -> T {
    db_to_linear(dbm - T::lit(30.0))
}

/// dBm from watts, `10*log10(W*1000)`.
#[inline]
pub fn watts_to_dbm<T: Real>(w: T) -> T {
    linear_to_db(w * T::lit(1000.0))
}
