//! Drives the C ABI the way a foreign binding would: through raw pointers
//! and status codes only.

use std::ffi::{CStr, CString};
use std::ptr;

use odse_capi::*;

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(odse_last_error_message())
            .to_string_lossy()
            .into_owned()
    }
}

fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let s = unsafe { CStr::from_ptr(ptr).to_string_lossy().into_owned() };
    unsafe { odse_string_free(ptr) };
    s
}

#[test]
fn version_is_non_empty() {
    let v = unsafe { CStr::from_ptr(odse_version()) };
    assert!(!v.to_bytes().is_empty());
}

#[test]
fn null_arguments_produce_status_codes_and_messages() {
    let status = unsafe { odse_dataset_load(ptr::null(), ptr::null(), ptr::null_mut()) };
    assert_eq!(status, OdseStatus::NullPointer);
    assert!(last_error().contains("null"));

    let mut out: *mut OdseDataset = ptr::null_mut();
    let path = CString::new("/definitely/not/here.manifest").unwrap();
    let format = CString::new("native").unwrap();
    let status = unsafe { odse_dataset_load(path.as_ptr(), format.as_ptr(), &mut out) };
    assert_eq!(status, OdseStatus::IoError);
    assert!(last_error().contains("not/here"), "{}", last_error());

    let bad_format = CString::new("csv").unwrap();
    let status = unsafe { odse_dataset_load(path.as_ptr(), bad_format.as_ptr(), &mut out) };
    assert_eq!(status, OdseStatus::InvalidArgument);
}

#[test]
fn generate_train_save_load_evaluate_round_trip() {
    unsafe {
        let mut dataset: *mut OdseDataset = ptr::null_mut();
        let status = odse_dataset_generate(2, 5, 0.02, 40, &mut dataset);
        assert_eq!(status, OdseStatus::Ok, "{}", last_error());

        let (mut tr, mut vs, mut ts, mut classes) = (0usize, 0usize, 0usize, 0usize);
        assert_eq!(
            odse_dataset_counts(dataset, &mut tr, &mut vs, &mut ts, &mut classes),
            OdseStatus::Ok
        );
        assert_eq!((tr, vs, ts, classes), (10, 10, 10, 2));

        let config = CString::new(
            r#"{"variant":"v2-qre","population_size":4,"max_generations":3,"stall_generations":3,"seed":8}"#,
        )
        .unwrap();
        let mut model: *mut OdseModelHandle = ptr::null_mut();
        let mut metrics_json: *mut std::ffi::c_char = ptr::null_mut();
        let status = odse_train(dataset, config.as_ptr(), &mut model, &mut metrics_json);
        assert_eq!(status, OdseStatus::Ok, "{}", last_error());
        let metrics = take_string(metrics_json);
        let metrics: serde_json::Value = serde_json::from_str(&metrics).unwrap();
        assert!(metrics["accuracy"].as_f64().unwrap() > 0.8);

        let mut rs_size = 0usize;
        assert_eq!(odse_model_rs_size(model, &mut rs_size), OdseStatus::Ok);
        assert!(rs_size >= 1);

        let dir = tempfile::tempdir().unwrap();
        let model_path = CString::new(
            dir.path().join("model.json").to_string_lossy().into_owned(),
        )
        .unwrap();
        assert_eq!(odse_model_save(model, model_path.as_ptr()), OdseStatus::Ok);

        let mut reloaded: *mut OdseModelHandle = ptr::null_mut();
        assert_eq!(
            odse_model_load(model_path.as_ptr(), &mut reloaded),
            OdseStatus::Ok
        );

        let mut accuracy = 0.0f64;
        let mut report_json: *mut std::ffi::c_char = ptr::null_mut();
        let status = odse_evaluate(reloaded, dataset, &mut accuracy, &mut report_json);
        assert_eq!(status, OdseStatus::Ok, "{}", last_error());
        assert_eq!(accuracy, metrics["accuracy"].as_f64().unwrap());
        let report = take_string(report_json);
        assert!(report.contains("confusion"));

        odse_model_free(model);
        odse_model_free(reloaded);
        odse_dataset_free(dataset);
    }
}

#[test]
fn twec_distance_over_json_graphs() {
    let a = CString::new(
        r#"{"id":"a","vertices":[{"real_vector":[0.0,0.0]},{"real_vector":[1.0,0.0]}],"edges":[{"u":0,"v":1}]}"#,
    )
    .unwrap();
    let b = CString::new(
        r#"{"id":"b","vertices":[{"real_vector":[0.0,0.0]},{"real_vector":[1.0,0.0]}],"edges":[{"u":0,"v":1}]}"#,
    )
    .unwrap();
    let weights = [1.0f64; 6];
    let mut d = -1.0f64;
    let status = unsafe {
        odse_twec_distance(a.as_ptr(), b.as_ptr(), weights.as_ptr(), 1.0, 1.0, &mut d)
    };
    assert_eq!(status, OdseStatus::Ok, "{}", last_error());
    assert_eq!(d, 0.0);

    let c = CString::new(
        r#"{"id":"c","vertices":[{"real_vector":[5.0,5.0]}],"edges":[]}"#,
    )
    .unwrap();
    let status = unsafe {
        odse_twec_distance(a.as_ptr(), c.as_ptr(), weights.as_ptr(), 1.0, 1.0, &mut d)
    };
    assert_eq!(status, OdseStatus::Ok);
    assert!(d > 0.0 && d <= 2.0);

    let malformed = CString::new(r#"{"id":"x","vertices":[],"edges":[]}"#).unwrap();
    let status = unsafe {
        odse_twec_distance(a.as_ptr(), malformed.as_ptr(), weights.as_ptr(), 1.0, 1.0, &mut d)
    };
    assert_eq!(status, OdseStatus::ParseError);
    assert!(last_error().contains("graph_json_b"), "{}", last_error());
}
