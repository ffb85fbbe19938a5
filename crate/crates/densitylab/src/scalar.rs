use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating scalar used for bracket endpoints and numeric sums.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite conversion")
    }

    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static> Scalar for T {}
