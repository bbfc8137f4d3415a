//! Shared scalar/matrix aliases and small numeric helpers.

use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMat3 = nalgebra::Matrix3<C64>;
pub type CMat2 = nalgebra::Matrix2<C64>;
pub type CVec3 = nalgebra::Vector3<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Relative error |a−b| / max(|b|, 1), robust near zero.
pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Nearest integer to x and the distance to it.
pub fn nearest_int(x: f64) -> (i64, f64) {
    let n = x.round();
    (n as i64, (x - n).abs())
}

/// Integer test for a complex number within tolerance `tol`.
pub fn as_int(z: C64, tol: f64) -> Option<i64> {
    if z.im.abs() > tol {
        return None;
    }
    let (n, d) = nearest_int(z.re);
    (d <= tol).then_some(n)
}

/// Deterministic 64-bit generator (SplitMix64) for reproducible test
/// sampling; not a crypto RNG.
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform sample in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0);
        lo + (hi - lo) * u
    }
}

/// Max |entry| of a 3x3 matrix.
pub fn mat_max_abs(m: &CMat3) -> f64 {
    m.iter().map(|e| e.norm()).fold(0.0, f64::max)
}

/// Max |entrywise difference| of two 3x3 matrices.
pub fn mat_max_diff(a: &CMat3, b: &CMat3) -> f64 {
    mat_max_abs(&(a - b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_detection() {
        assert_eq!(as_int(cr(3.0), 1e-9), Some(3));
        assert_eq!(as_int(cr(3.0000001), 1e-9), None);
        assert_eq!(as_int(c(-2.0, 1e-12), 1e-9), Some(-2));
        assert_eq!(as_int(c(1.0, 0.1), 1e-9), None);
    }
}
