//! C ABI for `dsgibbs`.
//!
//! Every fallible function returns an `int32_t` status and writes results
//! through out-pointers. Status values match the CLI exit codes where they
//! overlap. After a nonzero status, `dsg_last_error_message` describes the
//! failure on the calling thread.
//!
//! Handles (`DsgChain`, `DsgReport`) are opaque; free them with the matching
//! `*_free` function. Strings returned as `char *` are freed with
//! `dsg_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dsgibbs::beta::BetaParams;
use dsgibbs::chain::{self, ChainParams, ChainState, SimulationReport};
use dsgibbs::counts::{self, BoxModel};
use dsgibbs::geometry::Observations;
use dsgibbs::oracle;
use dsgibbs::rng::SeedSplitter;
use dsgibbs::Error;
use rand_chacha::ChaCha8Rng;

pub const DSG_OK: i32 = 0;
pub const DSG_ERR_IO: i32 = 1;
pub const DSG_ERR_INVALID_ARGUMENT: i32 = 2;
pub const DSG_ERR_NUMERIC: i32 = 3;
pub const DSG_ERR_SAMPLING_BUDGET: i32 = 4;
pub const DSG_ERR_NULL_POINTER: i32 = 5;
pub const DSG_ERR_PANIC: i32 = 6;

pub const DSG_METHOD_CLASSICAL: i32 = 0;
pub const DSG_METHOD_FLAT_PRIOR: i32 = 1;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) | Error::Precondition(_) | Error::Parse { .. } => {
                DSG_ERR_INVALID_ARGUMENT
            }
            Error::Numeric { .. } => DSG_ERR_NUMERIC,
            Error::SamplingBudget { .. } => DSG_ERR_SAMPLING_BUDGET,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => DSG_ERR_IO,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        status: DSG_ERR_INVALID_ARGUMENT,
        message: message.into(),
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `f`, records any failure and converts it to a status code.
fn guard<F>(f: F) -> i32
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DSG_OK,
        Ok(Err(fail)) => {
            set_last_error(fail.message);
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            DSG_ERR_PANIC
        }
    }
}

fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: callers pass either null or a valid, aligned, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| Failure {
        status: DSG_ERR_NULL_POINTER,
        message: format!("{name} is null"),
    })
}

fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: non-null handles come from the matching constructor.
    unsafe { p.as_ref() }.ok_or_else(|| Failure {
        status: DSG_ERR_NULL_POINTER,
        message: format!("{name} is null"),
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dsg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dsg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dsg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// Single trajectory

/// One chain trajectory with its own random stream.
pub struct DsgChain {
    params: ChainParams,
    state: ChainState,
    rng: ChaCha8Rng,
}

/// Starts a trajectory at `z0`, drawing from stream 0 of `seed`.
///
/// # Safety
/// `out_chain` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn dsg_chain_new(
    n1: u32,
    n2: u32,
    z0: f64,
    seed: u64,
    out_chain: *mut *mut DsgChain,
) -> i32 {
    guard(|| {
        let slot = out(out_chain, "out_chain")?;
        let chain = DsgChain {
            params: ChainParams::new(n1, n2)?,
            state: ChainState::new(z0)?,
            rng: SeedSplitter::new(seed).stream(0),
        };
        *slot = Box::into_raw(Box::new(chain));
        Ok(())
    })
}

/// Advances the trajectory by `steps` and optionally reports the new state.
///
/// # Safety
/// `chain` must come from `dsg_chain_new`; `out_z` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn dsg_chain_step(chain: *mut DsgChain, steps: u32, out_z: *mut f64) -> i32 {
    guard(|| {
        let c = out(chain, "chain")?;
        for _ in 0..steps {
            c.state = chain::step(c.params, c.state, &mut c.rng);
        }
        if let Some(z) = out_z.as_mut() {
            *z = c.state.z;
        }
        Ok(())
    })
}

/// Current state and number of steps taken.
///
/// # Safety
/// `chain` must come from `dsg_chain_new`; either out-pointer may be NULL.
#[no_mangle]
pub unsafe extern "C" fn dsg_chain_state(
    chain: *const DsgChain,
    out_z: *mut f64,
    out_t: *mut u64,
) -> i32 {
    guard(|| {
        let c = handle(chain, "chain")?;
        if let Some(z) = out_z.as_mut() {
            *z = c.state.z;
        }
        if let Some(t) = out_t.as_mut() {
            *t = c.state.t;
        }
        Ok(())
    })
}

/// # Safety
/// `chain` must be NULL or come from `dsg_chain_new` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn dsg_chain_free(chain: *mut DsgChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

// ---------------------------------------------------------------------------
// Ensemble report

/// Results of an ensemble run.
pub struct DsgReport {
    inner: SimulationReport,
}

/// One time step of an ensemble report.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DsgStepSummary {
    pub t: u32,
    pub sample_mean: f64,
    pub std_error: f64,
    pub closed_form_mean: f64,
    pub empirical_w1: f64,
    pub w1_lower: f64,
    pub w1_upper: f64,
    pub w1_worst_case: f64,
}

/// Runs `replicates` trajectories for `t_max` steps (see the CLI `chain`
/// subcommand; same seed gives the same numbers).
///
/// # Safety
/// `out_report` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn dsg_report_run(
    n1: u32,
    n2: u32,
    z0: f64,
    t_max: u32,
    replicates: u64,
    seed: u64,
    out_report: *mut *mut DsgReport,
) -> i32 {
    guard(|| {
        let slot = out(out_report, "out_report")?;
        if replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        let params = ChainParams::new(n1, n2)?;
        let inner = chain::run_trajectories(params, z0, t_max, replicates as usize, seed, false)?;
        *slot = Box::into_raw(Box::new(DsgReport { inner }));
        Ok(())
    })
}

/// Number of rows (`t_max + 1`).
///
/// # Safety
/// `report` must come from `dsg_report_run`.
#[no_mangle]
pub unsafe extern "C" fn dsg_report_len(report: *const DsgReport, out_len: *mut usize) -> i32 {
    guard(|| {
        *out(out_len, "out_len")? = handle(report, "report")?.inner.summary.len();
        Ok(())
    })
}

/// Copies row `index` into `out_row`.
///
/// # Safety
/// `report` must come from `dsg_report_run`; `out_row` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dsg_report_row(
    report: *const DsgReport,
    index: usize,
    out_row: *mut DsgStepSummary,
) -> i32 {
    guard(|| {
        let r = handle(report, "report")?;
        let row = out(out_row, "out_row")?;
        let s = r.inner.summary.get(index).ok_or_else(|| {
            invalid(format!(
                "row {index} out of range 0..{}",
                r.inner.summary.len()
            ))
        })?;
        *row = DsgStepSummary {
            t: s.t,
            sample_mean: s.sample_mean,
            std_error: s.std_error,
            closed_form_mean: s.closed_form_mean,
            empirical_w1: s.empirical_w1,
            w1_lower: s.w1_lower,
            w1_upper: s.w1_upper,
            w1_worst_case: s.w1_worst_case,
        };
        Ok(())
    })
}

/// Serializes the report as JSON (the CLI `chain --format json` document).
/// Free the string with `dsg_string_free`.
///
/// # Safety
/// `report` must come from `dsg_report_run`; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dsg_report_to_json(
    report: *const DsgReport,
    out_json: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let r = handle(report, "report")?;
        let slot = out(out_json, "out_json")?;
        let mut buf = Vec::new();
        dsgibbs::report::write_json(&mut buf, &r.inner)?;
        *slot = CString::new(buf)
            .map_err(|_| invalid("JSON contained a NUL byte"))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or come from `dsg_report_run` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn dsg_report_free(report: *mut DsgReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

// ---------------------------------------------------------------------------
// Closed forms

fn write_value<F>(out_value: *mut f64, f: F) -> i32
where
    F: FnOnce() -> Result<f64, Error>,
{
    guard(|| {
        let slot = out(out_value, "out_value")?;
        *slot = f()?;
        Ok(())
    })
}

/// `E[Z_t]` from `z0`.
///
/// # Safety
/// `out_value` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn dsg_expected_value_at(
    n1: u32,
    n2: u32,
    t: u32,
    z0: f64,
    out_value: *mut f64,
) -> i32 {
    write_value(out_value, || {
        chain::expected_value_at(ChainParams::new(n1, n2)?, t, z0)
    })
}

/// Upper bound `rho^t E|Z - z0|` on the Wasserstein-1 distance to stationarity.
///
/// # Safety
/// `out_value` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn dsg_w1_upper_bound(
    n1: u32,
    n2: u32,
    t: u32,
    z0: f64,
    out_value: *mut f64,
) -> i32 {
    write_value(out_value, || {
        chain::w1_upper_bound(ChainParams::new(n1, n2)?, t, z0)
    })
}

/// Lower bound `|z0 - m| rho^t` on the Wasserstein-1 distance to stationarity.
///
/// # Safety
/// `out_value` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn dsg_w1_lower_bound(
    n1: u32,
    n2: u32,
    t: u32,
    z0: f64,
    out_value: *mut f64,
) -> i32 {
    write_value(out_value, || {
        chain::w1_lower_bound(ChainParams::new(n1, n2)?, t, z0)
    })
}

/// Wasserstein-1 bound over all starting points.
///
/// # Safety
/// `out_value` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn dsg_worst_case_w1(n1: u32, n2: u32, t: u32, out_value: *mut f64) -> i32 {
    write_value(out_value, || {
        Ok(chain::worst_case_w1(ChainParams::new(n1, n2)?, t))
    })
}

/// Regularized incomplete beta function `I_x(alpha, beta)`.
///
/// # Safety
/// `out_value` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn dsg_beta_cdf(alpha: f64, beta: f64, x: f64, out_value: *mut f64) -> i32 {
    write_value(out_value, || BetaParams::new(alpha, beta)?.cdf(x))
}

/// `E[X^k]` for `X ~ Beta(alpha, beta)`.
///
/// # Safety
/// `out_value` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn dsg_beta_kth_moment(
    alpha: f64,
    beta: f64,
    k: u32,
    out_value: *mut f64,
) -> i32 {
    write_value(
        out_value,
        || Ok(BetaParams::new(alpha, beta)?.kth_moment(k)),
    )
}

/// `E|X - z|` for `X ~ Beta(alpha, beta)`.
///
/// # Safety
/// `out_value` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn dsg_beta_w1_to_point(
    alpha: f64,
    beta: f64,
    z: f64,
    out_value: *mut f64,
) -> i32 {
    write_value(out_value, || BetaParams::new(alpha, beta)?.w1_to_point(z))
}

// ---------------------------------------------------------------------------
// Rejection oracle

/// Fills `out_values[0..n]` with upper feasible-interval endpoints for `n1`
/// first-category and `n2` second-category observations.
///
/// # Safety
/// `out_values` must point to `n` writable doubles; `out_attempts` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn dsg_oracle_endpoints(
    n1: u32,
    n2: u32,
    n: usize,
    seed: u64,
    max_attempts: u64,
    out_values: *mut f64,
    out_attempts: *mut u64,
) -> i32 {
    guard(|| {
        if out_values.is_null() {
            return Err(Failure {
                status: DSG_ERR_NULL_POINTER,
                message: "out_values is null".into(),
            });
        }
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let obs = Observations::from_counts(&[n1 as usize, n2 as usize])?;
        let draws =
            oracle::stationary_endpoint_samples(&obs, n, &SeedSplitter::new(seed), max_attempts)?;
        std::slice::from_raw_parts_mut(out_values, n).copy_from_slice(&draws.values);
        if let Some(a) = out_attempts.as_mut() {
            *a = draws.attempts;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Birthday and coupon calculators

fn method(code: i32) -> Result<counts::Method, Failure> {
    match code {
        DSG_METHOD_CLASSICAL => Ok(counts::Method::Classical),
        DSG_METHOD_FLAT_PRIOR => Ok(counts::Method::FlatPrior),
        other => Err(invalid(format!("unknown method {other}"))),
    }
}

/// Probability that `n` balls land in distinct boxes out of `k`.
///
/// # Safety
/// `out_value` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn dsg_birthday(
    k: u64,
    n: u64,
    method_code: i32,
    out_value: *mut f64,
) -> i32 {
    guard(|| {
        let slot = out(out_value, "out_value")?;
        let m = BoxModel::new(k, n)?;
        *slot = match method(method_code)? {
            counts::Method::Classical => counts::birthday_prob_classical(m),
            counts::Method::FlatPrior => counts::birthday_prob_uniform_prior(m),
        };
        Ok(())
    })
}

/// Probability that `n` balls leave no box empty. For the flat prior,
/// `replicates == 0` selects the exact formula and any other value the urn
/// simulation with the given seed. `out_std_error` may be NULL and is 0 for
/// exact results.
///
/// # Safety
/// `out_estimate` must be writable; `out_std_error` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn dsg_coupon(
    k: u64,
    n: u64,
    method_code: i32,
    replicates: u64,
    seed: u64,
    out_estimate: *mut f64,
    out_std_error: *mut f64,
) -> i32 {
    guard(|| {
        let slot = out(out_estimate, "out_estimate")?;
        let m = BoxModel::new(k, n)?;
        let (est, se) = match method(method_code)? {
            counts::Method::Classical => (counts::coupon_prob_classical(m), 0.0),
            counts::Method::FlatPrior if replicates == 0 => {
                (counts::coupon_prob_uniform_prior_exact(m), 0.0)
            }
            counts::Method::FlatPrior => {
                let e = counts::coupon_prob_uniform_prior(
                    m,
                    replicates as usize,
                    &SeedSplitter::new(seed),
                )?;
                (e.estimate, e.std_error)
            }
        };
        *slot = est;
        if let Some(s) = out_std_error.as_mut() {
            *s = se;
        }
        Ok(())
    })
}
