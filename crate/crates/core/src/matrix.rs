//! Small dense matrices over an arbitrary commutative ring, with adjugate
//! inversion.

use crate::ring::Ring;

#[derive(Clone, PartialEq, Debug)]
pub struct Mat<R> {
    pub n: usize,
    data: Vec<R>,
}

impl<R> Mat<R> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    pub fn at(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut R {
        &mut self.data[i * self.n + j]
    }

    pub fn transpose_generic(&self) -> Mat<R>
    where
        R: Clone,
    {
        Mat::from_fn(self.n, |i, j| self.at(j, i).clone())
    }
}

impl<R: Ring> Mat<R> {
    pub fn zero(n: usize) -> Self {
        Mat { n, data: vec![R::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n);
        for i in 0..n {
            *m.at_mut(i, i) = R::one();
        }
        m
    }

    pub fn add(&self, o: &Mat<R>) -> Mat<R> {
        assert_eq!(self.n, o.n);
        Mat::from_fn(self.n, |i, j| self.at(i, j).add(o.at(i, j)))
    }

    pub fn sub(&self, o: &Mat<R>) -> Mat<R> {
        assert_eq!(self.n, o.n);
        Mat::from_fn(self.n, |i, j| self.at(i, j).sub(o.at(i, j)))
    }

    pub fn neg(&self) -> Mat<R> {
        Mat::from_fn(self.n, |i, j| self.at(i, j).neg())
    }

    pub fn mul(&self, o: &Mat<R>) -> Mat<R> {
        assert_eq!(self.n, o.n);
        Mat::from_fn(self.n, |i, j| {
            let mut s = R::zero();
            for k in 0..self.n {
                s = s.add(&self.at(i, k).mul(o.at(k, j)));
            }
            s
        })
    }

    pub fn scale(&self, c: &R) -> Mat<R> {
        Mat::from_fn(self.n, |i, j| self.at(i, j).mul(c))
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                let mut s = R::zero();
                for k in 0..self.n {
                    s = s.add(&self.at(i, k).mul(&v[k]));
                }
                s
            })
            .collect()
    }

    pub fn transpose(&self) -> Mat<R> {
        Mat::from_fn(self.n, |i, j| self.at(j, i).clone())
    }

    pub fn trace(&self) -> R {
        let mut s = R::zero();
        for i in 0..self.n {
            s = s.add(self.at(i, i));
        }
        s
    }

    fn minor(&self, row: usize, col: usize) -> Mat<R> {
        let n = self.n - 1;
        Mat::from_fn(n, |i, j| {
            let si = if i < row { i } else { i + 1 };
            let sj = if j < col { j } else { j + 1 };
            self.at(si, sj).clone()
        })
    }

    /// Determinant by cofactor expansion; fine at the sizes used here.
    pub fn det(&self) -> R {
        match self.n {
            0 => R::one(),
            1 => self.at(0, 0).clone(),
            2 => self.at(0, 0).mul(self.at(1, 1)).sub(&self.at(0, 1).mul(self.at(1, 0))),
            _ => {
                let mut acc = R::zero();
                for j in 0..self.n {
                    let c = self.at(0, j).mul(&self.minor(0, j).det());
                    acc = if j % 2 == 0 { acc.add(&c) } else { acc.sub(&c) };
                }
                acc
            }
        }
    }

    /// Adjugate-based inverse: `self * inv = inv * self = Id` exactly.
    /// Returns `None` when the determinant is not invertible in `R`.
    pub fn inverse(&self) -> Option<Mat<R>> {
        let det_inv = self.det().try_inv()?;
        let n = self.n;
        let adj = Mat::from_fn(n, |i, j| {
            let m = self.minor(j, i).det();
            if (i + j) % 2 == 0 {
                m
            } else {
                m.neg()
            }
        });
        Some(adj.scale(&det_inv))
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                if i == j {
                    self.at(i, j).sub(&R::one()).is_zero()
                } else {
                    self.at(i, j).is_zero()
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Poly, RationalFn};
    use crate::rng::Rng;
    use crate::scalar::Scalar;
    use crate::sym::Sym;

    #[test]
    fn identity_inverts_to_identity() {
        let id: Mat<RationalFn> = Mat::identity(3);
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn diagonal_rational_inverse() {
        let y11 = RationalFn::from_poly(Poly::var(Sym::Y(1, 1)));
        let y22 = RationalFn::from_poly(Poly::var(Sym::Y(2, 2)));
        let mut m = Mat::zero(2);
        *m.at_mut(0, 0) = y11.clone();
        *m.at_mut(1, 1) = y22.clone();
        let inv = m.inverse().unwrap();
        assert_eq!(*inv.at(0, 0), y11.inv().unwrap());
        assert_eq!(*inv.at(1, 1), y22.inv().unwrap());
        assert!(inv.at(0, 1).is_zero());
    }

    #[test]
    fn random_rational_matrix_multiplies_back_to_identity() {
        let x = Sym::X(1);
        let mut rng = Rng::seeded(3);
        let mut done = 0;
        while done < 10 {
            let m = Mat::from_fn(2, |_, _| {
                let c0 = Scalar::from_int(rng.small());
                let c1 = Scalar::from_int(rng.small());
                RationalFn::from_poly(
                    Poly::constant(c0).add(&Poly::var(x.clone()).scale(&c1)),
                )
            });
            let Some(inv) = m.inverse() else { continue };
            assert!(m.mul(&inv).is_identity());
            assert!(inv.mul(&m).is_identity());
            done += 1;
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let mut m: Mat<RationalFn> = Mat::zero(2);
        *m.at_mut(0, 0) = RationalFn::one();
        *m.at_mut(1, 0) = RationalFn::one();
        assert!(m.inverse().is_none());
    }
}
