//! Functions on `Ω∞` that depend only on the first `D` coordinates.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::groupoid::{check_depth, low_mask, FlipWord, Prefix};

/// A table of `2^depth` values indexed by the prefix bitmask.
#[derive(Clone, PartialEq, Debug)]
pub struct CylinderFunction<T = Complex64> {
    depth: usize,
    values: Vec<T>,
}

pub type RealCylinder = CylinderFunction<f64>;

impl<T: Copy> CylinderFunction<T> {
    pub fn from_values(depth: usize, values: Vec<T>) -> Result<Self> {
        check_depth(depth)?;
        if values.len() != 1usize << depth {
            return Err(Error::Malformed(format!(
                "cylinder table of depth {depth} needs {} values, got {}",
                1usize << depth,
                values.len()
            )));
        }
        Ok(CylinderFunction { depth, values })
    }

    pub fn from_fn(depth: usize, f: impl FnMut(Prefix) -> T) -> Result<Self> {
        check_depth(depth)?;
        let values = Prefix::all(depth).map(f).collect();
        Ok(CylinderFunction { depth, values })
    }

    pub fn constant(depth: usize, c: T) -> Result<Self> {
        check_depth(depth)?;
        Ok(CylinderFunction { depth, values: vec![c; 1 << depth] })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value at any prefix of depth at least `self.depth()`.
    pub fn eval(&self, x: Prefix) -> Result<T> {
        if x.depth() < self.depth {
            return Err(Error::DepthTooSmall { required: self.depth, actual: x.depth() });
        }
        Ok(self.values[(x.bits() & low_mask(self.depth)) as usize])
    }

    /// Entry for a raw bitmask, ignoring bits beyond the table depth.
    #[inline]
    pub fn at(&self, bits: u64) -> T {
        self.values[(bits & low_mask(self.depth)) as usize]
    }

    /// Same function tabulated at a larger depth.
    pub fn lift(&self, depth: usize) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::DepthTooSmall { required: self.depth, actual: depth });
        }
        if depth == self.depth {
            return Ok(self.clone());
        }
        check_depth(depth)?;
        let m = low_mask(self.depth);
        let values = (0..1u64 << depth).map(|b| self.values[(b & m) as usize]).collect();
        Ok(CylinderFunction { depth, values })
    }

    /// `x ↦ f(x ⊕ w)`.
    pub fn shifted(&self, w: FlipWord) -> Result<Self> {
        if w.horizon() > self.depth {
            return self.lift(w.horizon())?.shifted(w);
        }
        let values = (0..1u64 << self.depth).map(|b| self.values[(b ^ w.mask()) as usize]).collect();
        Ok(CylinderFunction { depth: self.depth, values })
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> CylinderFunction<U> {
        CylinderFunction { depth: self.depth, values: self.values.iter().copied().map(f).collect() }
    }

    /// Pointwise combination at the common depth.
    pub fn zip_with<U: Copy, V: Copy>(
        &self,
        other: &CylinderFunction<U>,
        mut f: impl FnMut(T, U) -> V,
    ) -> Result<CylinderFunction<V>> {
        let depth = self.depth.max(other.depth);
        check_depth(depth)?;
        let values = (0..1u64 << depth).map(|b| f(self.at(b), other.at(b))).collect();
        Ok(CylinderFunction { depth, values })
    }
}

impl<T: Copy + Add<Output = T>> CylinderFunction<T> {
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }
}

impl<T: Copy + Mul<Output = T>> CylinderFunction<T> {
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }
}

impl<T: Copy + Zero> CylinderFunction<T> {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }
}

impl RealCylinder {
    pub fn to_complex(&self) -> CylinderFunction<Complex64> {
        self.map(|v| Complex64::new(v, 0.0))
    }
}

/// `ψ_k(x) = +1` if `x_k = 0`, `-1` if `x_k = 1`.
pub fn psi(k: usize) -> RealCylinder {
    assert!(k >= 1, "sites are 1-indexed");
    CylinderFunction::from_fn(k, |x| if x.bit(k) == 0 { 1.0 } else { -1.0 }).expect("psi depth within cap")
}
