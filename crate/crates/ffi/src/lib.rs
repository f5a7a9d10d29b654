//! C ABI over the `ageorder` core.
//!
//! Handles are opaque and owned by the caller once returned; each has a
//! matching `*_free`. Every entry point returns an [`AoStatus`]; on failure
//! the message is available from [`ao_last_error_message`] on the same thread
//! until the next failing call. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ageorder::{
    check_relation, classify_all, lorenz, make_empirical, make_exponential, make_gamma, make_uniform,
    make_weibull, ordering_report, r_transform, r_transform_inv, ttt, DistributionModel, EquilibriumChain,
    Error, NumericSettings, Outcome, Relation,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Numeric = 4,
    Level = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoRelation {
    Ifr = 0,
    Ifra = 1,
    Nbu = 2,
    Nbufr = 3,
    Nbafr = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoOutcome {
    Holds = 0,
    Fails = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoCurve {
    Ttt = 0,
    RInv = 1,
    R = 2,
    Lorenz = 3,
}

/// Numeric settings; obtain defaults from [`ao_settings_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AoSettings {
    pub quad_abs_tol: f64,
    pub tail_survival_cut: f64,
    pub invert_tol: f64,
    pub grid_points: usize,
    pub window_lo: f64,
    pub window_hi: f64,
    pub use_closed_forms: bool,
}

/// Opaque distribution handle.
pub struct AoDistribution(DistributionModel);

/// Opaque ladder handle.
pub struct AoChain(EquilibriumChain);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul bytes were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> AoStatus {
    match err {
        Error::Parameter(_) | Error::Data(_) | Error::Parse(_) | Error::Io(_) => AoStatus::InvalidArgument,
        Error::Domain(_) => AoStatus::Domain,
        Error::Level { .. } => AoStatus::Level,
        _ => AoStatus::Numeric,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard<F: FnOnce() -> Result<(), AoStatus>>(f: F) -> AoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AoStatus::Ok,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            AoStatus::Panic
        }
    }
}

fn lift<T>(r: ageorder::Result<T>) -> Result<T, AoStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null() -> AoStatus {
    set_error("null pointer argument".into());
    AoStatus::NullPointer
}

/// # Safety
/// `p` is null or valid for reads of `T`.
unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, AoStatus> {
    p.as_ref().ok_or_else(null)
}

/// # Safety
/// `p` is null or valid for writes of `T`.
unsafe fn put<T>(p: *mut T, v: T) -> Result<(), AoStatus> {
    if p.is_null() {
        return Err(null());
    }
    p.write(v);
    Ok(())
}

fn relation(r: AoRelation) -> Relation {
    match r {
        AoRelation::Ifr => Relation::Ifr,
        AoRelation::Ifra => Relation::Ifra,
        AoRelation::Nbu => Relation::Nbu,
        AoRelation::Nbufr => Relation::Nbufr,
        AoRelation::Nbafr => Relation::Nbafr,
    }
}

fn outcome(o: Outcome) -> AoOutcome {
    match o {
        Outcome::Holds => AoOutcome::Holds,
        Outcome::Fails => AoOutcome::Fails,
        Outcome::Inconclusive => AoOutcome::Inconclusive,
    }
}

fn into_c_string(s: String, out: *mut *mut c_char) -> Result<(), AoStatus> {
    let c = CString::new(s).map_err(|_| {
        set_error("string contains a nul byte".into());
        AoStatus::Numeric
    })?;
    // SAFETY: caller contract of the exported function.
    unsafe { put(out, c.into_raw()) }
}

/// Message of the last failing call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ao_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn ao_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn ao_settings_default() -> AoSettings {
    let s = NumericSettings::default();
    AoSettings {
        quad_abs_tol: s.quad_abs_tol,
        tail_survival_cut: s.tail_survival_cut,
        invert_tol: s.invert_tol,
        grid_points: s.grid_points,
        window_lo: s.quantile_window.0,
        window_hi: s.quantile_window.1,
        use_closed_forms: s.use_closed_forms,
    }
}

fn box_distribution(d: ageorder::Result<DistributionModel>, out: *mut *mut AoDistribution) -> Result<(), AoStatus> {
    if out.is_null() {
        return Err(null());
    }
    let d = lift(d)?;
    // SAFETY: checked non-null above; caller guarantees validity.
    unsafe { put(out, Box::into_raw(Box::new(AoDistribution(d)))) }
}

/// Parses a distribution spec such as `family=weibull param.shape=2 param.scale=1`.
///
/// # Safety
/// `spec` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_distribution_from_spec(spec: *const c_char, out: *mut *mut AoDistribution) -> AoStatus {
    guard(|| {
        if spec.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(spec).to_str().map_err(|_| {
            set_error("spec is not valid UTF-8".into());
            AoStatus::InvalidArgument
        })?;
        box_distribution(DistributionModel::from_spec(text), out)
    })
}

/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_distribution_exponential(rate: f64, out: *mut *mut AoDistribution) -> AoStatus {
    guard(|| box_distribution(make_exponential(rate), out))
}

/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_distribution_weibull(shape: f64, scale: f64, out: *mut *mut AoDistribution) -> AoStatus {
    guard(|| box_distribution(make_weibull(shape, scale), out))
}

/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_distribution_gamma(shape: f64, rate: f64, out: *mut *mut AoDistribution) -> AoStatus {
    guard(|| box_distribution(make_gamma(shape, rate), out))
}

/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_distribution_uniform(upper: f64, out: *mut *mut AoDistribution) -> AoStatus {
    guard(|| box_distribution(make_uniform(upper), out))
}

/// Empirical law of `len` observations.
///
/// # Safety
/// `values` is readable for `len` doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_distribution_empirical(
    values: *const f64,
    len: usize,
    out: *mut *mut AoDistribution,
) -> AoStatus {
    guard(|| {
        if values.is_null() {
            return Err(null());
        }
        let sample = std::slice::from_raw_parts(values, len);
        box_distribution(make_empirical(sample), out)
    })
}

/// # Safety
/// `d` is null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ao_distribution_free(d: *mut AoDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_distribution_mean(d: *const AoDistribution, out: *mut f64) -> AoStatus {
    guard(|| put(out, get(d)?.0.mean()))
}

/// Builds the ladder of `d` up to `max_level`. `settings` may be null for defaults.
///
/// # Safety
/// `d` is a live handle; `settings` is null or readable; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_chain_build(
    d: *const AoDistribution,
    max_level: usize,
    settings: *const AoSettings,
    out: *mut *mut AoChain,
) -> AoStatus {
    guard(|| {
        let d = get(d)?;
        if out.is_null() {
            return Err(null());
        }
        let s = settings.as_ref().copied().unwrap_or_else(|| ao_settings_default());
        let settings = NumericSettings {
            quad_abs_tol: s.quad_abs_tol,
            tail_survival_cut: s.tail_survival_cut,
            invert_tol: s.invert_tol,
            grid_points: s.grid_points,
            quantile_window: (s.window_lo, s.window_hi),
            use_closed_forms: s.use_closed_forms,
        };
        let chain = lift(EquilibriumChain::build(&d.0, max_level, settings))?;
        put(out, Box::into_raw(Box::new(AoChain(chain))))
    })
}

/// # Safety
/// `c` is null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ao_chain_free(c: *mut AoChain) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` is a live handle; `out` is writable.
unsafe fn chain_scalar(
    c: *const AoChain,
    out: *mut f64,
    f: impl FnOnce(&EquilibriumChain) -> ageorder::Result<f64>,
) -> AoStatus {
    guard(|| put(out, lift(f(&get(c)?.0))?))
}

/// Level-`s` survival at `x`.
///
/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_chain_t_bar(c: *const AoChain, s: usize, x: f64, out: *mut f64) -> AoStatus {
    chain_scalar(c, out, |c| c.t_bar(s, x))
}

/// Level-`s` survival inverse at `x` in (0, 1).
///
/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_chain_t_bar_inverse(c: *const AoChain, s: usize, x: f64, out: *mut f64) -> AoStatus {
    chain_scalar(c, out, |c| c.t_bar_inverse(s, x))
}

/// Level-`s` failure rate at `x`.
///
/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_chain_failure_rate(c: *const AoChain, s: usize, x: f64, out: *mut f64) -> AoStatus {
    chain_scalar(c, out, |c| c.failure_rate(s, x))
}

/// Level-`s` mean residual life at `x`.
///
/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_chain_mrl(c: *const AoChain, s: usize, x: f64, out: *mut f64) -> AoStatus {
    chain_scalar(c, out, |c| c.mrl(s, x))
}

/// Integral of the level-`s` survival over `[x, ∞)`.
///
/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_chain_tail_integral(c: *const AoChain, s: usize, x: f64, out: *mut f64) -> AoStatus {
    chain_scalar(c, out, |c| c.tail_integral(s, x))
}

/// Generalized mean of level `s`.
///
/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_chain_generalized_mean(c: *const AoChain, s: usize, out: *mut f64) -> AoStatus {
    guard(|| put(out, lift(get(c)?.0.generalized_mean(s))?))
}

/// Unit-interval transform `kind` at level `s`, evaluated at `u` in [0, 1].
///
/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_transform(c: *const AoChain, kind: AoCurve, s: usize, u: f64, out: *mut f64) -> AoStatus {
    guard(|| {
        let c = &get(c)?.0;
        let v = match kind {
            AoCurve::Ttt => ttt(c, s, u),
            AoCurve::RInv => r_transform_inv(c, s, u),
            AoCurve::R => r_transform(c, s, u),
            AoCurve::Lorenz => lorenz(c, s, u),
        };
        put(out, lift(v)?)
    })
}

/// Decides `X ≤ Y` in `rel` at level `s`. `margin` may be null.
///
/// # Safety
/// `x`, `y` are live handles built to at least level `s + 1`; `outcome_out`
/// is writable; `margin` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn ao_check_relation(
    x: *const AoChain,
    y: *const AoChain,
    rel: AoRelation,
    s: usize,
    outcome_out: *mut AoOutcome,
    margin: *mut f64,
) -> AoStatus {
    guard(|| {
        let v = lift(check_relation(relation(rel), &get(x)?.0, &get(y)?.0, s))?;
        if !margin.is_null() {
            margin.write(v.primary_form.verdict.margin);
        }
        put(outcome_out, outcome(v.outcome))
    })
}

/// Full ordering matrix for levels 1..=`max_level` as JSON. Free with [`ao_string_free`].
///
/// # Safety
/// `x`, `y` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_ordering_report_json(
    x: *const AoChain,
    y: *const AoChain,
    max_level: usize,
    out: *mut *mut c_char,
) -> AoStatus {
    guard(|| {
        let r = lift(ordering_report(&get(x)?.0, &get(y)?.0, max_level))?;
        into_c_string(serde_json::to_string(&r).expect("reports serialize"), out)
    })
}

/// Ageing classification for levels 1..=`max_level` as JSON. Free with [`ao_string_free`].
///
/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_classify_json(c: *const AoChain, max_level: usize, out: *mut *mut c_char) -> AoStatus {
    guard(|| {
        let r = lift(classify_all(&get(c)?.0, max_level))?;
        into_c_string(serde_json::to_string(&r).expect("classifications serialize"), out)
    })
}

/// # Safety
/// `s` is null or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ao_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
