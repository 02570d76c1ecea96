use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use rdi_ffi::*;

const BSC_PAIR: &str = r#"{"axes": [{"name": "X", "size": 2}, {"name": "Y", "size": 2}],
                           "probs": [0.45, 0.05, 0.05, 0.45]}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> Option<String> {
    let p = rdi_last_error_message();
    if p.is_null() {
        return None;
    }
    let msg = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { rdi_string_free(p) };
    Some(msg)
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

struct Pmf(*mut RdiJointPmf);

impl Pmf {
    fn new(json: &str) -> Self {
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { rdi_pmf_from_json(c(json).as_ptr(), &mut h) }, RdiStatus::Ok);
        Pmf(h)
    }
}

impl Drop for Pmf {
    fn drop(&mut self) {
        unsafe { rdi_pmf_free(self.0) };
    }
}

#[test]
fn information_measures() {
    let pmf = Pmf::new(BSC_PAIR);
    let mut v = 0.0;
    unsafe {
        assert_eq!(rdi_entropy(pmf.0, c("X").as_ptr(), ptr::null(), &mut v), RdiStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(rdi_entropy(pmf.0, c("X").as_ptr(), c("Y").as_ptr(), &mut v), RdiStatus::Ok);
        assert!((v - h2(0.1)).abs() < 1e-12);
        assert_eq!(rdi_mutual_information(pmf.0, c("X").as_ptr(), c("Y").as_ptr(), c("").as_ptr(), &mut v), RdiStatus::Ok);
        assert!((v - (1.0 - h2(0.1))).abs() < 1e-12);
        assert_eq!(rdi_binary_entropy(0.5, &mut v), RdiStatus::Ok);
        assert_eq!(v, 1.0);
    }
    assert!(last_error().is_none());
}

#[test]
fn errors_map_to_status_codes() {
    let pmf = Pmf::new(BSC_PAIR);
    let mut v = 0.0;
    unsafe {
        assert_eq!(rdi_entropy(pmf.0, c("Q").as_ptr(), ptr::null(), &mut v), RdiStatus::Usage);
        assert!(last_error().unwrap().contains('Q'));
        assert_eq!(rdi_entropy(ptr::null(), c("X").as_ptr(), ptr::null(), &mut v), RdiStatus::NullPointer);
        assert_eq!(rdi_binary_entropy(0.5, ptr::null_mut()), RdiStatus::NullPointer);
        let mut h = ptr::null_mut();
        assert_eq!(rdi_pmf_from_json(c("{").as_ptr(), &mut h), RdiStatus::Json);
        assert!(h.is_null());
        let bad = r#"{"axes": [{"name": "X", "size": 2}], "probs": [0.7, 0.7]}"#;
        assert_eq!(rdi_pmf_from_json(c(bad).as_ptr(), &mut h), RdiStatus::InvalidPmf);
        let invalid = [0xffu8, 0];
        assert_eq!(rdi_binary_entropy(0.5, &mut v), RdiStatus::Ok);
        assert_eq!(
            rdi_entropy(pmf.0, invalid.as_ptr().cast(), ptr::null(), &mut v),
            RdiStatus::InvalidUtf8
        );
        rdi_pmf_free(ptr::null_mut());
        rdi_string_free(ptr::null_mut());
    }
}

#[test]
fn rate_distortion_through_the_abi() {
    let erased = r#"{"axes": [{"name": "X", "size": 2}, {"name": "Y", "size": 3}],
                     "probs": [0.1, 0.0, 0.4, 0.0, 0.1, 0.4]}"#;
    let pmf = Pmf::new(erased);
    let mut r = 0.0;
    let hamming = c(r#"{"kind": "hamming"}"#);
    unsafe {
        let s = rdi_rd_si_enc(pmf.0, c("X").as_ptr(), c("Y").as_ptr(), hamming.as_ptr(), ptr::null(), 0.2, &mut r);
        assert_eq!(s, RdiStatus::Ok, "{:?}", last_error());
    }
    assert!((r - 0.8 * (1.0 - h2(0.25))).abs() < 1e-4, "{r}");
    let matrix = c(r#"{"kind": "matrix", "matrix": [[0.2, 1.0], [1.0, 0.2]]}"#);
    let s = unsafe { rdi_rd_si_enc(pmf.0, c("X").as_ptr(), ptr::null(), matrix.as_ptr(), ptr::null(), 0.1, &mut r) };
    assert_eq!(s, RdiStatus::Infeasible);
}

#[test]
fn region_points() {
    let mut pt = RdiPoint { r_h: 0.0, r: 0.0, d: 0.0, delta: 0.0 };
    let params = c(r#"{"p_e": 0.8, "q": 0.5}"#);
    unsafe {
        let s = rdi_corollary_region(c("erased-y-hamming").as_ptr(), params.as_ptr(), 0.45, f64::NAN, &mut pt);
        assert_eq!(s, RdiStatus::Ok, "{:?}", last_error());
        assert_eq!(pt.r, 0.0);
        assert!((pt.delta - 0.029049).abs() < 1e-6);
        assert!(pt.r_h.is_nan());
        let s = rdi_corollary_region(c("no-such-case").as_ptr(), params.as_ptr(), 0.1, f64::NAN, &mut pt);
        assert_eq!(s, RdiStatus::Json);
    }
    let unit = c(r#"{"ordering": "W-Z-X-Y", "var_w": 1, "var_a": 1, "var_b": 1, "var_c": 1}"#);
    let mut saturated = true;
    unsafe {
        assert_eq!(rdi_gaussian_region(unit.as_ptr(), 0.5, 0.5, &mut pt, &mut saturated), RdiStatus::Ok);
    }
    assert!((pt.r - 0.5 * 1.5f64.log2()).abs() < 1e-12);
    assert_eq!(pt.r_h, 0.5);
    assert!(!saturated);
}

#[test]
fn pad_wraps_to_the_modulus() {
    let mut out = 0;
    unsafe {
        assert_eq!(rdi_one_time_pad(3, 5, 8, &mut out), RdiStatus::Ok);
        assert_eq!(out, 8);
        assert_eq!(rdi_one_time_pad(0, 1, 8, &mut out), RdiStatus::Usage);
    }
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rdi.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "rdi_pmf_from_json",
        "rdi_pmf_free",
        "rdi_entropy",
        "rdi_mutual_information",
        "rdi_binary_entropy",
        "rdi_rd_si_enc",
        "rdi_corollary_region",
        "rdi_gaussian_region",
        "rdi_one_time_pad",
        "rdi_last_error_message",
        "rdi_string_free",
        "typedef struct RdiJointPmf RdiJointPmf",
        "RDI_STATUS_INFEASIBLE = 6",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    // Syntax check only; skipped when no C compiler is installed.
    let Ok(status) = Command::new("cc").args(["-std=c99", "-fsyntax-only", "-x", "c"]).arg(&header).status() else {
        return;
    };
    assert!(status.success());
}
