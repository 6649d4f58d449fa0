//! C ABI for the graph classification toolkit: opaque handles over datasets
//! and trained models, status codes, and a thread-local last-error message.
//!
//! Every function returns an [`OdseStatus`]; on any status other than `Ok`
//! the detail is available from `odse_last_error_message()` until the next
//! call on the same thread. Handles are created and released exclusively
//! through this API.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use odse::classify::evaluate;
use odse::graph::{LabelDissimConfig, LabeledGraph};
use odse::ingest::{generate_synthetic, load_dataset, Dataset, DatasetFormat, SyntheticSpec};
use odse::model::OdseModel;
use odse::optimizer::GaConfig;
use odse::run::train_on;
use odse::twec::{twec, TwecWeights};

/// Status codes returned by every API function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    IoError = 4,
    ParseError = 5,
    Degenerate = 6,
    InternalError = 7,
}

/// Opaque dataset handle (train/validation/test splits plus class labels).
pub struct OdseDataset {
    inner: Dataset,
}

/// Opaque trained-model handle.
pub struct OdseModelHandle {
    inner: OdseModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &odse::OdseError) -> OdseStatus {
    use odse::OdseError::*;
    match err {
        Io { .. } => OdseStatus::IoError,
        Parse { .. } | Json(_) => OdseStatus::ParseError,
        DegenerateRs(_) => OdseStatus::Degenerate,
        Config(_) | LabelKindMismatch { .. } | LabelDimensionMismatch { .. }
        | InvalidGraph { .. } | EmptySample(_) | ColumnOutOfRange { .. }
        | EmbeddingDimensionMismatch { .. } | Dataset(_) | DimensionTooSmall { .. }
        | DegenerateNormalizer(_) => OdseStatus::InvalidArgument,
    }
}

fn fail(err: odse::OdseError) -> OdseStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Runs a fallible body, converting panics into `InternalError`.
fn guarded(body: impl FnOnce() -> OdseStatus) -> OdseStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            OdseStatus::InternalError
        }
    }
}

/// # Safety
/// `ptr` must be a valid NUL-terminated string or the call fails cleanly.
unsafe fn utf8_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, OdseStatus> {
    if ptr.is_null() {
        set_error(&format!("{name} is null"));
        return Err(OdseStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{name} is not valid UTF-8"));
        OdseStatus::InvalidUtf8
    })
}

fn require_out<T>(out: *mut T, name: &str) -> Result<(), OdseStatus> {
    if out.is_null() {
        set_error(&format!("{name} is null"));
        return Err(OdseStatus::NullPointer);
    }
    Ok(())
}

/// Library version string; owned by the library, do not free.
#[no_mangle]
pub extern "C" fn odse_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread. Owned by the
/// library; valid until the next API call on the same thread.
#[no_mangle]
pub extern "C" fn odse_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this API.
///
/// # Safety
/// `s` must have been returned by an odse function and not freed before.
#[no_mangle]
pub unsafe extern "C" fn odse_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a dataset from a master manifest (or dataset directory).
/// `format` is `"gxl-collection"` or `"native"`.
///
/// # Safety
/// `manifest_path` and `format` must be valid NUL-terminated strings;
/// `out_dataset` must be a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn odse_dataset_load(
    manifest_path: *const c_char,
    format: *const c_char,
    out_dataset: *mut *mut OdseDataset,
) -> OdseStatus {
    guarded(|| {
        let path = match utf8_arg(manifest_path, "manifest_path") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let format = match utf8_arg(format, "format") {
            Ok(v) => v,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out_dataset, "out_dataset") {
            return s;
        }
        let format: DatasetFormat = match format.parse() {
            Ok(f) => f,
            Err(e) => return fail(e),
        };
        match load_dataset(Path::new(path), format) {
            Ok(dataset) => {
                *out_dataset = Box::into_raw(Box::new(OdseDataset { inner: dataset }));
                OdseStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Generates a synthetic letter-like dataset (see the `generate` CLI
/// command).
///
/// # Safety
/// `out_dataset` must be a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn odse_dataset_generate(
    classes: usize,
    per_class: usize,
    noise: f64,
    seed: u64,
    out_dataset: *mut *mut OdseDataset,
) -> OdseStatus {
    guarded(|| {
        if let Err(s) = require_out(out_dataset, "out_dataset") {
            return s;
        }
        match generate_synthetic(&SyntheticSpec {
            classes,
            per_class,
            noise,
            seed,
        }) {
            Ok(dataset) => {
                *out_dataset = Box::into_raw(Box::new(OdseDataset { inner: dataset }));
                OdseStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Split sizes and class count of a dataset. Null output pointers are
/// skipped.
///
/// # Safety
/// `dataset` must be a live handle from this API.
#[no_mangle]
pub unsafe extern "C" fn odse_dataset_counts(
    dataset: *const OdseDataset,
    out_train: *mut usize,
    out_validation: *mut usize,
    out_test: *mut usize,
    out_classes: *mut usize,
) -> OdseStatus {
    guarded(|| {
        if dataset.is_null() {
            set_error("dataset is null");
            return OdseStatus::NullPointer;
        }
        let ds = &(*dataset).inner;
        if !out_train.is_null() {
            *out_train = ds.train.len();
        }
        if !out_validation.is_null() {
            *out_validation = ds.validation.len();
        }
        if !out_test.is_null() {
            *out_test = ds.test.len();
        }
        if !out_classes.is_null() {
            *out_classes = ds.class_set.len();
        }
        OdseStatus::Ok
    })
}

/// Releases a dataset handle.
///
/// # Safety
/// `dataset` must be a live handle from this API (or null).
#[no_mangle]
pub unsafe extern "C" fn odse_dataset_free(dataset: *mut OdseDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Synthesizes a model on the dataset. `config_json` holds the optimizer
/// configuration (all fields optional, e.g. `{"variant":"v1-mst","seed":7}`);
/// pass null or `"{}"` for defaults. On success, `out_metrics_json` (when
/// non-null) receives the training metrics; free it with
/// `odse_string_free`.
///
/// # Safety
/// Pointer arguments must be valid as documented above.
#[no_mangle]
pub unsafe extern "C" fn odse_train(
    dataset: *const OdseDataset,
    config_json: *const c_char,
    out_model: *mut *mut OdseModelHandle,
    out_metrics_json: *mut *mut c_char,
) -> OdseStatus {
    guarded(|| {
        if dataset.is_null() {
            set_error("dataset is null");
            return OdseStatus::NullPointer;
        }
        if let Err(s) = require_out(out_model, "out_model") {
            return s;
        }
        let ga: GaConfig = if config_json.is_null() {
            GaConfig::default()
        } else {
            let text = match utf8_arg(config_json, "config_json") {
                Ok(v) => v,
                Err(s) => return s,
            };
            match serde_json::from_str(text) {
                Ok(cfg) => cfg,
                Err(e) => {
                    set_error(&format!("config_json: {e}"));
                    return OdseStatus::ParseError;
                }
            }
        };
        if let Err(e) = ga.validate() {
            return fail(e);
        }
        let ds = &(*dataset).inner;
        if let Err(e) = ds.validate_for_training() {
            return fail(e);
        }
        match train_on(ds, &ga, &mut |_| {}, std::time::Instant::now()) {
            Ok(outcome) => {
                if !out_metrics_json.is_null() {
                    let json = serde_json::to_string(&outcome.metrics).unwrap_or_default();
                    *out_metrics_json = CString::new(json).unwrap_or_default().into_raw();
                }
                *out_model = Box::into_raw(Box::new(OdseModelHandle {
                    inner: outcome.model,
                }));
                OdseStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Persists a model as a self-contained JSON bundle.
///
/// # Safety
/// `model` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn odse_model_save(
    model: *const OdseModelHandle,
    path: *const c_char,
) -> OdseStatus {
    guarded(|| {
        if model.is_null() {
            set_error("model is null");
            return OdseStatus::NullPointer;
        }
        let path = match utf8_arg(path, "path") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match (*model).inner.save_json(Path::new(path)) {
            Ok(()) => OdseStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Loads a persisted model bundle.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out_model` a valid
/// destination pointer.
#[no_mangle]
pub unsafe extern "C" fn odse_model_load(
    path: *const c_char,
    out_model: *mut *mut OdseModelHandle,
) -> OdseStatus {
    guarded(|| {
        let path = match utf8_arg(path, "path") {
            Ok(v) => v,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out_model, "out_model") {
            return s;
        }
        match OdseModel::load_json(Path::new(path)) {
            Ok(model) => {
                *out_model = Box::into_raw(Box::new(OdseModelHandle { inner: model }));
                OdseStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a model handle.
///
/// # Safety
/// `model` must be a live handle from this API (or null).
#[no_mangle]
pub unsafe extern "C" fn odse_model_free(model: *mut OdseModelHandle) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Embedding dimension (prototype count) of a trained model.
///
/// # Safety
/// `model` must be a live handle; `out_size` a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn odse_model_rs_size(
    model: *const OdseModelHandle,
    out_size: *mut usize,
) -> OdseStatus {
    guarded(|| {
        if model.is_null() {
            set_error("model is null");
            return OdseStatus::NullPointer;
        }
        if let Err(s) = require_out(out_size, "out_size") {
            return s;
        }
        *out_size = (*model).inner.prototypes.len();
        OdseStatus::Ok
    })
}

/// Evaluates a model on the test split of a dataset. `out_report_json`
/// (when non-null) receives the accuracy and confusion counts; free it with
/// `odse_string_free`.
///
/// # Safety
/// Pointer arguments must be valid as documented above.
#[no_mangle]
pub unsafe extern "C" fn odse_evaluate(
    model: *const OdseModelHandle,
    dataset: *const OdseDataset,
    out_accuracy: *mut f64,
    out_report_json: *mut *mut c_char,
) -> OdseStatus {
    guarded(|| {
        if model.is_null() || dataset.is_null() {
            set_error("model or dataset is null");
            return OdseStatus::NullPointer;
        }
        if let Err(s) = require_out(out_accuracy, "out_accuracy") {
            return s;
        }
        match evaluate(&(*model).inner, &(*dataset).inner.test) {
            Ok(report) => {
                *out_accuracy = report.accuracy;
                if !out_report_json.is_null() {
                    let json = serde_json::to_string(&report).unwrap_or_default();
                    *out_report_json = CString::new(json).unwrap_or_default().into_raw();
                }
                OdseStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Symmetric TWEC dissimilarity in [0, 2] between two graphs given as
/// native-format JSON objects (`{"id", "vertices", "edges"}`). `weights`
/// must point to six values in [0, 1]: vertex sub/ins/del then edge
/// sub/ins/del. Label measure parameters are both in [0, 1].
///
/// # Safety
/// Pointer arguments must be valid as documented above.
#[no_mangle]
pub unsafe extern "C" fn odse_twec_distance(
    graph_json_a: *const c_char,
    graph_json_b: *const c_char,
    weights: *const f64,
    real_vector_scale: f64,
    symbol_mismatch: f64,
    out_distance: *mut f64,
) -> OdseStatus {
    guarded(|| {
        let a = match utf8_arg(graph_json_a, "graph_json_a") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let b = match utf8_arg(graph_json_b, "graph_json_b") {
            Ok(v) => v,
            Err(s) => return s,
        };
        if weights.is_null() {
            set_error("weights is null");
            return OdseStatus::NullPointer;
        }
        if let Err(s) = require_out(out_distance, "out_distance") {
            return s;
        }
        let parse = |text: &str, name: &str| -> Result<LabeledGraph, OdseStatus> {
            serde_json::from_str(text).map_err(|e| {
                set_error(&format!("{name}: {e}"));
                OdseStatus::ParseError
            })
        };
        let ga = match parse(a, "graph_json_a") {
            Ok(g) => g,
            Err(s) => return s,
        };
        let gb = match parse(b, "graph_json_b") {
            Ok(g) => g,
            Err(s) => return s,
        };
        let w = std::slice::from_raw_parts(weights, 6);
        let weights = TwecWeights {
            w_sub_v: w[0],
            w_ins_v: w[1],
            w_del_v: w[2],
            w_sub_e: w[3],
            w_ins_e: w[4],
            w_del_e: w[5],
        };
        if let Err(e) = weights.validate() {
            return fail(e);
        }
        let cfg = LabelDissimConfig {
            real_vector_scale,
            symbol_mismatch,
            composite_weights: Default::default(),
        };
        if let Err(e) = cfg.validate() {
            return fail(e);
        }
        match twec(&ga, &gb, &weights, &cfg) {
            Ok(d) => {
                *out_distance = d;
                OdseStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
