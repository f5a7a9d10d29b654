//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals and on
//! half-lines via the substitution `t = a + c·v/(1−v)`.

/// Kronrod abscissae on [-1, 1] (non-negative half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the embedded 7-point rule (nodes XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_err: f64,
    pub converged: bool,
}

/// Tolerances for the adaptive driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl QuadTol {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 400,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    /// Roundoff floor of `err`; segments at their floor are not split.
    floor: f64,
}

fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (1.0f64).min((200.0 * err / res_asc).powf(1.5));
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    Segment {
        a,
        b,
        value,
        err: err.max(floor),
        floor,
    }
}

/// Integrates `f` over `[a, b]` by global adaptive bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: QuadTol) -> Quadrature {
    if b <= a {
        return Quadrature {
            value: 0.0,
            abs_err: 0.0,
            converged: true,
        };
    }
    let mut segments = vec![qk15(&f, a, b)];
    loop {
        // Fixed summation order keeps results reproducible.
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let total_err: f64 = segments.iter().map(|s| s.err).sum();
        let total_floor: f64 = segments.iter().map(|s| s.floor).sum();
        let target = tol.abs.max(tol.rel * total.abs());
        if total_err <= target || total_err <= total_floor * (1.0 + 1e-12) {
            return Quadrature {
                value: total,
                abs_err: total_err,
                converged: true,
            };
        }
        if segments.len() >= tol.max_intervals {
            return Quadrature {
                value: total,
                abs_err: total_err,
                converged: false,
            };
        }
        let (worst, _) = segments.iter().enumerate().fold((0, -1.0), |acc, (i, s)| {
            let excess = s.err - s.floor;
            if excess > acc.1 {
                (i, excess)
            } else {
                acc
            }
        });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval cannot be split further in floating point.
            segments.push(Segment {
                floor: seg.err,
                ..seg
            });
            continue;
        }
        segments.push(qk15(&f, seg.a, mid));
        segments.push(qk15(&f, mid, seg.b));
    }
}

/// Integrates `f` over `[a, ∞)` using `t = a + scale·v/(1−v)`, `v ∈ [0, 1)`.
///
/// `scale` should be of the order of the integrand's decay length.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    tol: QuadTol,
) -> Quadrature {
    let mapped = |v: f64| {
        let w = 1.0 - v;
        if w <= 0.0 {
            return 0.0;
        }
        let t = a + scale * v / w;
        let val = f(t);
        if val == 0.0 {
            0.0
        } else {
            val * scale / (w * w)
        }
    };
    integrate(mapped, 0.0, 1.0, tol)
}
