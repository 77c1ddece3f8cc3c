//! Minimal commutative-ring abstraction shared by scalars, polynomials,
//! rational functions and dual numbers.

use std::fmt::Debug;

pub trait Ring: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn from_int(v: i64) -> Self;
    /// Multiplicative inverse when it exists in the ring.
    fn try_inv(&self) -> Option<Self>;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}
