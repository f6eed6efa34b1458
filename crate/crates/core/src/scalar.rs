use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{CheckedAdd, Float, FromPrimitive, ToPrimitive, Unsigned};

/// Floating-point scalar used by the analytic formulas.
pub trait Real:
    Float + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only for types that cannot hold it.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact unsigned integer used for path counts.
///
/// All arithmetic on path counts goes through [`CheckedAdd`], so a type too
/// narrow for the requested grid reports overflow instead of wrapping.
pub trait PathCount:
    Copy + Unsigned + CheckedAdd + ToPrimitive + FromPrimitive + Ord + Debug + Display + Send + Sync
{
    fn to_real<F: Real>(self) -> F {
        F::from_f64(self.to_f64().expect("unsigned integers convert to f64"))
            .expect("f64 converts to scalar type")
    }
}

impl<T> PathCount for T where
    T: Copy
        + Unsigned
        + CheckedAdd
        + ToPrimitive
        + FromPrimitive
        + Ord
        + Debug
        + Display
        + Send
        + Sync
{
}
