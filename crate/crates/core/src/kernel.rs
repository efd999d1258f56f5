//! Parabolic emission kernel `p(q, x) = max(0, A - sigma |q - x|^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Segment2, Vec2};
use crate::scalar::Scalar;

/// Peak intensity `A` and falloff `sigma` of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams<T> {
    #[serde(rename = "A")]
    peak: T,
    #[serde(rename = "sigma")]
    falloff: T,
}

/// Maximum of the kernel over a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentMax<T> {
    /// Unclamped projection parameter of `x` onto the segment's line.
    pub s_star: T,
    /// Maximizer on the closed segment.
    pub q_star: Point2<T>,
    pub p_star: T,
}

impl<T: Scalar> KernelParams<T> {
    pub fn new(peak: T, falloff: T) -> Result<Self> {
        let k = Self { peak, falloff };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.peak > T::zero() && self.peak.is_finite()) {
            return Err(Error::InvalidKernel("A"));
        }
        if !(self.falloff > T::zero() && self.falloff.is_finite()) {
            return Err(Error::InvalidKernel("sigma"));
        }
        Ok(())
    }

    pub fn peak(&self) -> T {
        self.peak
    }

    pub fn falloff(&self) -> T {
        self.falloff
    }

    /// Radius `sqrt(A / sigma)` outside of which the field vanishes.
    pub fn effective_radius(&self) -> T {
        (self.peak / self.falloff).sqrt()
    }

    /// Parabola `A - sigma |q - x|^2` before clipping at zero; nonnegative
    /// exactly on the closed support disk.
    pub fn parabola(&self, q: Point2<T>, x: Point2<T>) -> T {
        self.peak - self.falloff * (q - x).norm_sq()
    }

    /// Gradient of [`parabola`](Self::parabola) with respect to `x`.
    pub fn parabola_grad_x(&self, q: Point2<T>, x: Point2<T>) -> Vec2<T> {
        (q - x) * (self.falloff + self.falloff)
    }

    pub fn eval(&self, q: Point2<T>, x: Point2<T>) -> T {
        self.parabola(q, x).max(T::zero())
    }

    /// Gradient of `eval` with respect to the agent position `x`.
    ///
    /// Uses the parabolic formula on the closed support disk, zero outside.
    pub fn grad_x(&self, q: Point2<T>, x: Point2<T>) -> Vec2<T> {
        if self.parabola(q, x) >= T::zero() {
            self.parabola_grad_x(q, x)
        } else {
            Vec2::zero()
        }
    }

    /// Closed-form maximizer of `s -> p(q(s), x)` over `s` in `[0, 1]`:
    /// the orthogonal projection of `x` clamped to the segment.
    pub fn argmax_on_segment(&self, seg: &Segment2<T>, x: Point2<T>) -> SegmentMax<T> {
        let d = seg.direction();
        let s_star = (x - seg.start()).dot(d) / d.norm_sq();
        let q_star = if s_star < T::zero() {
            seg.start()
        } else if s_star > T::one() {
            seg.end()
        } else {
            seg.point_at(s_star)
        };
        SegmentMax {
            s_star,
            q_star,
            p_star: self.eval(q_star, x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x1: f64, x2: f64) -> Point2<f64> {
        Vec2::new(x1, x2)
    }

    fn kernel() -> KernelParams<f64> {
        KernelParams::new(0.5, 0.35).unwrap()
    }

    #[test]
    fn eval_examples() {
        let k = kernel();
        assert_eq!(k.eval(p(0.3, 0.2), p(0.3, 0.2)), 0.5);
        let r = k.effective_radius();
        assert!(k.eval(p(r, 0.0), p(0.0, 0.0)).abs() < 1e-15);
        assert!((k.eval(p(1.0, 0.0), p(0.0, 0.0)) - 0.15).abs() < 1e-15);
        assert_eq!(k.eval(p(5.0, 0.0), p(0.0, 0.0)), 0.0);
    }

    #[test]
    fn grad_examples() {
        let k = kernel();
        assert_eq!(k.grad_x(p(1.0, 1.0), p(1.0, 1.0)), Vec2::zero());
        let g = k.grad_x(p(1.0, 0.0), p(0.0, 0.0));
        assert!((g.x1 - 0.7).abs() < 1e-15 && g.x2 == 0.0);
        assert_eq!(k.grad_x(p(3.0, 0.0), p(0.0, 0.0)), Vec2::zero());
    }

    #[test]
    fn rejects_invalid_params() {
        assert_eq!(
            KernelParams::new(0.5, 0.0),
            Err(Error::InvalidKernel("sigma"))
        );
        assert_eq!(KernelParams::new(-1.0, 0.3), Err(Error::InvalidKernel("A")));
        assert_eq!(
            KernelParams::new(f64::NAN, 0.3),
            Err(Error::InvalidKernel("A"))
        );
    }

    #[test]
    fn argmax_examples() {
        let k = kernel();
        let seg = Segment2::new(p(0.0, 0.0), p(2.0, 0.0)).unwrap();
        let m = k.argmax_on_segment(&seg, p(1.0, 1.0));
        assert_eq!(m.s_star, 0.5);
        assert_eq!(m.q_star, p(1.0, 0.0));
        let m = k.argmax_on_segment(&seg, p(-1.0, 0.0));
        assert_eq!(m.s_star, -0.5);
        assert_eq!(m.q_star, p(0.0, 0.0));
        let m = k.argmax_on_segment(&seg, p(3.0, 0.2));
        assert_eq!(m.q_star, p(2.0, 0.0));
    }

    #[test]
    fn argmax_matches_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        const GRID: usize = 100_000;
        for _ in 0..300 {
            let k = KernelParams::new(rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)).unwrap();
            let seg = Segment2::new(
                p(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                p(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            )
            .unwrap();
            let x = p(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let m = k.argmax_on_segment(&seg, x);
            let grid_max = (0..=GRID)
                .map(|i| k.eval(seg.point_at(i as f64 / GRID as f64), x))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(m.p_star >= grid_max - 1e-6);
            assert!((m.p_star - grid_max).abs() <= 1e-6);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn eval_nonnegative_and_zero_outside_support(
            qx in -5.0..5.0f64, qy in -5.0..5.0f64,
            xx in -5.0..5.0f64, xy in -5.0..5.0f64,
            a in 0.05..3.0f64, s in 0.05..3.0f64,
        ) {
            let k = KernelParams::new(a, s).unwrap();
            let (q, x) = (p(qx, qy), p(xx, xy));
            let v = k.eval(q, x);
            prop_assert!(v >= 0.0);
            if q.distance(x) > k.effective_radius() * (1.0 + 1e-12) {
                prop_assert_eq!(v, 0.0);
            }
        }

        #[test]
        fn gradient_matches_central_differences(
            ang in 0.0..std::f64::consts::TAU, frac in 0.0..0.98f64,
            qx in -2.0..2.0f64, qy in -2.0..2.0f64,
        ) {
            let k = kernel();
            let q = p(qx, qy);
            let r = k.effective_radius() * frac;
            let x = q + p(ang.cos(), ang.sin()) * r;
            let h = 1e-6;
            let g = k.grad_x(q, x);
            let d1 = (k.eval(q, x + p(h, 0.0)) - k.eval(q, x - p(h, 0.0))) / (2.0 * h);
            let d2 = (k.eval(q, x + p(0.0, h)) - k.eval(q, x - p(0.0, h))) / (2.0 * h);
            prop_assert!((g.x1 - d1).abs() < 1e-5);
            prop_assert!((g.x2 - d2).abs() < 1e-5);
        }

        #[test]
        fn argmax_dominates_samples(
            a in (-2.0..2.0f64, -2.0..2.0f64), b in (-2.0..2.0f64, -2.0..2.0f64),
            x in (-3.0..3.0f64, -3.0..3.0f64),
            ss in proptest::collection::vec(0.0..=1.0f64, 100),
        ) {
            prop_assume!(a != b);
            let k = kernel();
            let seg = Segment2::new(p(a.0, a.1), p(b.0, b.1)).unwrap();
            let x = p(x.0, x.1);
            let m = k.argmax_on_segment(&seg, x);
            for s in ss {
                prop_assert!(m.p_star >= k.eval(seg.param_point(s).unwrap(), x) - 1e-15);
            }
            if m.s_star <= 0.0 {
                prop_assert_eq!(m.q_star, seg.start());
            } else if m.s_star >= 1.0 {
                prop_assert_eq!(m.q_star, seg.end());
            } else {
                prop_assert_eq!(m.q_star, seg.param_point(m.s_star).unwrap());
            }
        }
    }
}
