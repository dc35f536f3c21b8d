use std::ffi::{CStr, CString};
use std::ptr;

use semiband_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    sb_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(sb_last_error_message()).to_string_lossy().into_owned()
}

const Q: &str = r#"{"norm":{"p":"1"},"matrix":[["1","1/2"],["0","0"]]}"#;

#[test]
fn operator_handle_lifecycle() {
    unsafe {
        let mut op = ptr::null_mut();
        assert_eq!(sb_operator_from_json(c(Q).as_ptr(), &mut op), SbStatus::Ok);
        let mut n = 0usize;
        assert_eq!(sb_operator_dim(op, &mut n), SbStatus::Ok);
        assert_eq!(n, 2);
        let (mut sbp, mut scp, mut proj) = (true, false, false);
        assert_eq!(sb_operator_is_sbp(op, &mut sbp), SbStatus::Ok);
        assert_eq!(sb_operator_is_scp(op, &mut scp), SbStatus::Ok);
        assert_eq!(sb_operator_is_projection(op, &mut proj), SbStatus::Ok);
        assert!(!sbp && scp && proj);
        let mut json = ptr::null_mut();
        assert_eq!(sb_operator_analyze_json(op, 16, &mut json), SbStatus::Ok);
        let text = take(json);
        let expected = semiband::cli::cmd_analyze_text(Q, &semiband::cli::Config::default()).unwrap();
        assert_eq!(text, expected);
        assert_eq!(sb_operator_analyze_json(op, 1, &mut json), SbStatus::Budget);
        assert!(last_error().contains("max-atoms"));
        sb_operator_free(op);
        sb_operator_free(ptr::null_mut());
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut op = ptr::null_mut();
        let status = sb_operator_from_json(c(r#"{"matrix":[["1","2"],["3","1/0"]]}"#).as_ptr(), &mut op);
        assert_eq!(status, SbStatus::Input);
        assert!(op.is_null());
        assert!(last_error().contains("row 2, column 2"));
        assert_eq!(sb_operator_from_json(ptr::null(), &mut op), SbStatus::NullPointer);
        let mut n = 0usize;
        assert_eq!(sb_operator_dim(ptr::null(), &mut n), SbStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(
            sb_operator_from_json(bad.as_ptr().cast(), &mut op),
            SbStatus::InvalidUtf8
        );
        assert_eq!(sb_operator_from_json(c(Q).as_ptr(), &mut op), SbStatus::Ok);
        assert!(sb_last_error_message().is_null());
        sb_operator_free(op);
    }
}

#[test]
fn interval_and_probe() {
    unsafe {
        let projection = r#"{"terms":[
            {"kernel":{"pieces":[{"from":"0","to":"1","coeffs":["4","-6"]}]},"image":{"pieces":[{"from":"0","to":"1","coeffs":["1"]}]}},
            {"kernel":{"pieces":[{"from":"0","to":"1","coeffs":["-6","12"]}]},"image":{"pieces":[{"from":"0","to":"1","coeffs":["0","1"]}]}}]}"#;
        let mut out = ptr::null_mut();
        assert_eq!(sb_interval_analyze_json(c(projection).as_ptr(), &mut out), SbStatus::Ok);
        let r: semiband::report::IntervalReport = serde_json::from_str(&take(out)).unwrap();
        assert!(r.sbp.holds && r.scp.holds);
        assert_eq!(sb_probe_json(c("1").as_ptr(), 2, 2, 50, 1, &mut out), SbStatus::Ok);
        let r: semiband::report::ProbeReportDto = serde_json::from_str(&take(out)).unwrap();
        assert!(!r.findings.is_empty());
        assert_eq!(sb_probe_json(c("inf").as_ptr(), 2, 2, 50, 1, &mut out), SbStatus::Input);
        assert!(last_error().contains("strictly monotone"));
    }
}
