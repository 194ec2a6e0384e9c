//! C ABI over the `hfts` library.
//!
//! Objects are opaque handles created by `*_new`/`*_load`/`hfts_backtest` and released
//! with the matching `*_free`. Every fallible call returns an `HftsStatus`; on failure
//! `hfts_last_error_message` describes the error for the calling thread. Output buffers
//! are caller-allocated with the documented lengths.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use hfts::evaluate::{level_report, ErrorReport};
use hfts::io::load_hierarchy;
use hfts::{
    depths, functional_median, rolling_backtest, DepthKind, Error, ErrorCategory, ForecastConfig,
    ForecastMethod, FunctionalSample, Grid, HierarchyData,
};

/// Modified band depth.
pub const HFTS_DEPTH_MBD: u32 = 0;
/// Generalized band depth.
pub const HFTS_DEPTH_GBD: u32 = 1;
/// Sum of children's moving functional medians.
pub const HFTS_METHOD_AGGREGATED_MEDIAN: u32 = 0;
/// Moving mean baseline.
pub const HFTS_METHOD_MOVING_MEAN: u32 = 1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HftsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Malformed configuration, hierarchy or file.
    ConfigError = 3,
    /// Data incompatible with the request (shapes, history length, ...).
    DataError = 4,
    /// Numerical domain failure.
    NumericError = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// A sample of curves on a common grid.
pub struct HftsSample {
    inner: FunctionalSample,
}

/// A loaded hierarchy with one functional time series per node.
pub struct HftsHierarchy {
    inner: HierarchyData,
}

/// Per-level and per-node accuracy of a rolling backtest.
pub struct HftsReport {
    inner: ErrorReport,
    labels: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: HftsStatus,
    message: String,
}

impl Failure {
    fn new(status: HftsStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.category() {
            ErrorCategory::Config => HftsStatus::ConfigError,
            ErrorCategory::Data => HftsStatus::DataError,
            ErrorCategory::Numeric => HftsStatus::NumericError,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HftsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HftsStatus::Ok,
        Ok(Err(failure)) => {
            set_error(&failure.message);
            failure.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            HftsStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(
            HftsStatus::NullPointer,
            format!("`{name}` is null"),
        ))
    } else {
        Ok(())
    }
}

fn depth_kind(kind: u32) -> Result<DepthKind, Failure> {
    match kind {
        HFTS_DEPTH_MBD => Ok(DepthKind::Mbd),
        HFTS_DEPTH_GBD => Ok(DepthKind::Gbd),
        other => Err(Failure::new(
            HftsStatus::InvalidArgument,
            format!("unknown depth kind {other}"),
        )),
    }
}

fn method(m: u32) -> Result<ForecastMethod, Failure> {
    match m {
        HFTS_METHOD_AGGREGATED_MEDIAN => Ok(ForecastMethod::AggregatedMedian),
        HFTS_METHOD_MOVING_MEAN => Ok(ForecastMethod::MovingMean),
        other => Err(Failure::new(
            HftsStatus::InvalidArgument,
            format!("unknown forecast method {other}"),
        )),
    }
}

/// Message of the last failed call on this thread, or NULL after a successful call.
/// The pointer stays valid until the next `hfts_*` call on the same thread.
#[no_mangle]
pub extern "C" fn hfts_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hfts_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a sample from `n_curves * n_points` row-major values. `grid` holds `n_points`
/// strictly increasing points, or is NULL for a uniform grid over [0, 1].
///
/// # Safety
/// `values` must point to `n_curves * n_points` doubles, `grid` (if not NULL) to
/// `n_points` doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hfts_sample_new(
    values: *const f64,
    n_curves: usize,
    n_points: usize,
    grid: *const f64,
    out: *mut *mut HftsSample,
) -> HftsStatus {
    guard(|| {
        non_null(values, "values")?;
        non_null(out, "out")?;
        let len = n_curves
            .checked_mul(n_points)
            .ok_or_else(|| Failure::new(HftsStatus::InvalidArgument, "sample size overflows"))?;
        let data = slice::from_raw_parts(values, len);
        let grid = if grid.is_null() {
            Grid::unit(n_points)?
        } else {
            Grid::new(slice::from_raw_parts(grid, n_points).to_vec())?
        };
        let rows = if n_points == 0 {
            Vec::new()
        } else {
            data.chunks(n_points).map(<[f64]>::to_vec).collect()
        };
        let inner = FunctionalSample::from_rows(grid, rows)?;
        *out = Box::into_raw(Box::new(HftsSample { inner }));
        Ok(())
    })
}

/// # Safety
/// `sample` must come from `hfts_sample_new` and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn hfts_sample_free(sample: *mut HftsSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Depth of every curve with respect to the sample; `out` receives `n_curves` values.
///
/// # Safety
/// `sample` must be a live handle and `out` must have room for `n_curves` doubles.
#[no_mangle]
pub unsafe extern "C" fn hfts_depths(
    sample: *const HftsSample,
    kind: u32,
    out: *mut f64,
) -> HftsStatus {
    guard(|| {
        non_null(sample, "sample")?;
        non_null(out, "out")?;
        let s = &(*sample).inner;
        let d = depths(s, depth_kind(kind)?)?;
        slice::from_raw_parts_mut(out, s.len()).copy_from_slice(d.values());
        Ok(())
    })
}

/// Modified epigraph index of every curve; `out` receives `n_curves` values.
///
/// # Safety
/// As for `hfts_depths`.
#[no_mangle]
pub unsafe extern "C" fn hfts_mei(sample: *const HftsSample, out: *mut f64) -> HftsStatus {
    guard(|| {
        non_null(sample, "sample")?;
        non_null(out, "out")?;
        let s = &(*sample).inner;
        let v = hfts::depth::mei_all(s)?;
        slice::from_raw_parts_mut(out, s.len()).copy_from_slice(&v);
        Ok(())
    })
}

/// Deepest curve (mean of the deepest curves on ties); `out` receives `n_points` values.
///
/// # Safety
/// `sample` must be a live handle and `out` must have room for `n_points` doubles.
#[no_mangle]
pub unsafe extern "C" fn hfts_functional_median(
    sample: *const HftsSample,
    kind: u32,
    out: *mut f64,
) -> HftsStatus {
    guard(|| {
        non_null(sample, "sample")?;
        non_null(out, "out")?;
        let s = &(*sample).inner;
        let med = functional_median(s, depth_kind(kind)?)?;
        slice::from_raw_parts_mut(out, med.len()).copy_from_slice(med.values());
        Ok(())
    })
}

/// Loads a hierarchy from a JSON configuration and its CSV node files.
///
/// # Safety
/// `config_path` must be a NUL-terminated UTF-8 path and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hfts_hierarchy_load(
    config_path: *const c_char,
    out: *mut *mut HftsHierarchy,
) -> HftsStatus {
    guard(|| {
        non_null(config_path, "config_path")?;
        non_null(out, "out")?;
        let path = CStr::from_ptr(config_path)
            .to_str()
            .map_err(|_| Failure::new(HftsStatus::InvalidArgument, "config path is not UTF-8"))?;
        let loaded = load_hierarchy(Path::new(path))?;
        *out = Box::into_raw(Box::new(HftsHierarchy { inner: loaded.data }));
        Ok(())
    })
}

/// Number of nodes, series length and grid size of a hierarchy.
///
/// # Safety
/// `hierarchy` must be a live handle; each output pointer may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hfts_hierarchy_shape(
    hierarchy: *const HftsHierarchy,
    nodes: *mut usize,
    observations: *mut usize,
    points: *mut usize,
) -> HftsStatus {
    guard(|| {
        non_null(hierarchy, "hierarchy")?;
        let h = &(*hierarchy).inner;
        for (p, v) in [
            (nodes, h.spec().len()),
            (observations, h.len()),
            (points, h.grid().len()),
        ] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `hierarchy` must come from `hfts_hierarchy_load` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hfts_hierarchy_free(hierarchy: *mut HftsHierarchy) {
    if !hierarchy.is_null() {
        drop(Box::from_raw(hierarchy));
    }
}

/// Rolling one-step backtest with window `window`.
///
/// # Safety
/// `hierarchy` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hfts_backtest(
    hierarchy: *const HftsHierarchy,
    window: usize,
    kind: u32,
    forecast_method: u32,
    out: *mut *mut HftsReport,
) -> HftsStatus {
    guard(|| {
        non_null(hierarchy, "hierarchy")?;
        non_null(out, "out")?;
        let h = &(*hierarchy).inner;
        let config = ForecastConfig::new(window, depth_kind(kind)?, method(forecast_method)?);
        let bt = rolling_backtest(h, &config)?;
        let inner = level_report(&bt, h.spec())?;
        let labels = inner
            .levels
            .iter()
            .map(|l| CString::new(l.label.clone()).unwrap_or_default())
            .collect();
        *out = Box::into_raw(Box::new(HftsReport { inner, labels }));
        Ok(())
    })
}

/// Number of levels in a report; 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hfts_report_level_count(report: *const HftsReport) -> usize {
    if report.is_null() {
        0
    } else {
        (*report).inner.levels.len()
    }
}

/// Label and mean MAFE of level `index`, counted from the bottom level up. The label
/// pointer is owned by the report.
///
/// # Safety
/// `report` must be a live handle; `label` and `mafe` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hfts_report_level(
    report: *const HftsReport,
    index: usize,
    label: *mut *const c_char,
    mafe: *mut f64,
) -> HftsStatus {
    guard(|| {
        non_null(report, "report")?;
        let r = &*report;
        let level = r.inner.levels.get(index).ok_or_else(|| {
            Failure::new(
                HftsStatus::InvalidArgument,
                format!(
                    "level {index} out of range ({} levels)",
                    r.inner.levels.len()
                ),
            )
        })?;
        if !label.is_null() {
            *label = r.labels[index].as_ptr();
        }
        if !mafe.is_null() {
            *mafe = level.mafe;
        }
        Ok(())
    })
}

/// MAFE and MAD of the integrated errors of node `id`.
///
/// # Safety
/// `report` must be a live handle, `id` NUL-terminated; `mafe` and `mad` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hfts_report_node(
    report: *const HftsReport,
    id: *const c_char,
    mafe: *mut f64,
    mad: *mut f64,
) -> HftsStatus {
    guard(|| {
        non_null(report, "report")?;
        non_null(id, "id")?;
        let id = CStr::from_ptr(id).to_string_lossy();
        let node = (*report).inner.node(&id).ok_or_else(|| {
            Failure::new(HftsStatus::InvalidArgument, format!("unknown node `{id}`"))
        })?;
        if !mafe.is_null() {
            *mafe = node.mafe;
        }
        if !mad.is_null() {
            *mad = node.mad;
        }
        Ok(())
    })
}

/// # Safety
/// `report` must come from `hfts_backtest` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hfts_report_free(report: *mut HftsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
