//! Cubic Hermite pieces and safeguarded root search for monotone functions.

/// One cubic Hermite piece on `[x0, x1]` with end values and end slopes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitePiece {
    pub x0: f64,
    pub x1: f64,
    pub v0: f64,
    pub v1: f64,
    pub d0: f64,
    pub d1: f64,
}

impl HermitePiece {
    #[inline]
    fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let h = self.width();
        let t = (x - self.x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.v0
            + (t3 - 2.0 * t2 + t) * h * self.d0
            + (-2.0 * t3 + 3.0 * t2) * self.v1
            + (t3 - t2) * h * self.d1
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        let h = self.width();
        let t = (x - self.x0) / h;
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * self.v0 + (-6.0 * t2 + 6.0 * t) * self.v1) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * self.d0
            + (3.0 * t2 - 2.0 * t) * self.d1
    }

    /// Integral of the piece from `x0` to `x`.
    pub fn integral_from_start(&self, x: f64) -> f64 {
        let h = self.width();
        let t = (x - self.x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        h * ((0.5 * t4 - t3 + t) * self.v0
            + (0.25 * t4 - 2.0 * t3 / 3.0 + 0.5 * t2) * h * self.d0
            + (-0.5 * t4 + t3) * self.v1
            + (0.25 * t4 - t3 / 3.0) * h * self.d1)
    }

    pub fn integral(&self) -> f64 {
        let h = self.width();
        h * 0.5 * (self.v0 + self.v1) + h * h * (self.d0 - self.d1) / 12.0
    }

    /// Fritsch–Carlson limiting for a nonincreasing piece.
    pub fn limit_monotone_decreasing(&mut self) {
        let h = self.width();
        let secant = (self.v1 - self.v0) / h;
        if secant >= 0.0 {
            self.d0 = 0.0;
            self.d1 = 0.0;
            return;
        }
        self.d0 = self.d0.min(0.0);
        self.d1 = self.d1.min(0.0);
        let a = self.d0 / secant;
        let b = self.d1 / secant;
        let norm = a * a + b * b;
        if norm > 9.0 {
            let tau = 3.0 / norm.sqrt();
            self.d0 = tau * a * secant;
            self.d1 = tau * b * secant;
        }
    }
}

/// Finds `x ∈ [lo, hi]` with `f(x) = target` for a nonincreasing `f`.
///
/// `f` returns `(value, derivative)`. Newton steps are taken when they stay
/// inside the current bracket, otherwise the bracket is bisected.
pub fn solve_decreasing<F>(f: F, target: f64, mut lo: f64, mut hi: f64, start: Option<f64>) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let mut x = start
        .filter(|s| *s > lo && *s < hi)
        .unwrap_or(0.5 * (lo + hi));
    for _ in 0..300 {
        let (v, dv) = f(x);
        let resid = v - target;
        if resid == 0.0 {
            return x;
        }
        if resid > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(f64::MIN_POSITIVE) {
            return 0.5 * (lo + hi);
        }
        let newton = if dv < 0.0 && dv.is_finite() {
            x - resid / dv
        } else {
            f64::NAN
        };
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() {
            return next;
        }
        x = next;
    }
    x
}

/// Bisection for a nonincreasing `f` without derivative information; returns
/// the infimum of `{x : f(x) ≤ target}` within the bracket.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(f: F, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
