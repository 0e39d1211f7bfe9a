//! Scalar field abstraction.
//!
//! Every algebraic routine in this crate is generic over [`Scalar`]. The exact
//! rational type ([`crate::Rational`]) is what the oracles and the synthesis
//! engine use; `f64`/`f32` are supported for quick exploratory evaluation,
//! where zero tests fall back to a relative tolerance.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// A field element usable as a network weight or transfer-function value.
pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + PartialEq + Send + Sync + 'static {
    /// `true` when arithmetic is exact and zero tests are decisive.
    const EXACT: bool;

    /// Builds `numer / denom`. `denom` must be nonzero.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Zero test used for pivoting and rank decisions.
    fn is_negligible(&self) -> bool;

    /// Magnitude used to rank pivot candidates.
    fn magnitude(&self) -> f64;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_ratio(numer: i64, denom: i64) -> Self {
                numer as $t / denom as $t
            }

            fn is_negligible(&self) -> bool {
                self.abs() <= $tol
            }

            fn magnitude(&self) -> f64 {
                self.abs() as f64
            }
        }
    };
}

float_scalar!(f64, 1e-9);
float_scalar!(f32, 1e-4);
