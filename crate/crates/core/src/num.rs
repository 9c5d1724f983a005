//! Scalar abstraction: every algorithm in this crate is generic over the
//! floating-point type through [`Real`]. `f32` and `f64` are the two
//! implementations; the crate root exports `f64` aliases for the common types.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point scalar usable by all back-ends and adaptation algorithms.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + std::iter::Sum
    + std::fmt::Display
    + std::fmt::Debug
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal (tolerances, floors, defaults).
    fn c(v: f64) -> Self;

    /// Parse from the decimal text form used by the TSV formats.
    fn parse(s: &str) -> Option<Self>;

    /// One draw from the standard normal distribution.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn c(v: f64) -> Self {
                v as $t
            }
            fn parse(s: &str) -> Option<Self> {
                s.parse().ok()
            }
            fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Dot product of equal-length slices.
pub fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Squared Euclidean norm.
pub fn norm_sq<F: Real>(a: &[F]) -> F {
    dot(a, a)
}

/// Euclidean norm.
pub fn norm<F: Real>(a: &[F]) -> F {
    norm_sq(a).sqrt()
}

/// Squared Euclidean distance.
pub fn dist_sq<F: Real>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum()
}

/// Cosine similarity; callers must guarantee non-zero norms.
pub fn cosine<F: Real>(a: &[F], b: &[F]) -> F {
    dot(a, b) / (norm(a) * norm(b))
}

/// Arithmetic mean of a non-empty collection of equal-length vectors.
pub fn mean_vector<'a, F: Real, I>(vectors: I) -> Vec<F>
where
    I: IntoIterator<Item = &'a [F]>,
{
    let mut iter = vectors.into_iter();
    let first = iter.next().expect("mean of empty collection");
    let mut acc: Vec<F> = first.to_vec();
    let mut count = F::one();
    for v in iter {
        for (a, &x) in acc.iter_mut().zip(v) {
            *a += x;
        }
        count += F::one();
    }
    for a in acc.iter_mut() {
        *a /= count;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_of_two() {
        let a = [1.0f64, 2.0];
        let b = [3.0, 4.0];
        let m = mean_vector([&a[..], &b[..]]);
        assert_eq!(m, vec![2.0, 3.0]);
    }

    #[test]
    fn cosine_orthogonal() {
        assert!((cosine(&[1.0f64, 0.0], &[0.0, 2.0])).abs() < 1e-15);
    }

    #[test]
    fn parse_roundtrip_f32_and_f64() {
        let x: f64 = 0.1234567890123456789;
        assert_eq!(f64::parse(&format!("{x}")), Some(x));
        let y: f32 = 0.12345679;
        assert_eq!(f32::parse(&format!("{y}")), Some(y));
    }
}
