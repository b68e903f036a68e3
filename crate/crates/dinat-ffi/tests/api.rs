use std::ffi::{c_char, CStr, CString};
use std::ptr;

use dinat_ffi::*;

fn fixture(name: &str) -> CString {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../dinat/fixtures").join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

struct Handle(*mut DinatTransformation);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { dinat_transformation_free(self.0) }
    }
}

fn load(name: &str) -> Handle {
    let mut out = ptr::null_mut();
    let status = unsafe { dinat_transformation_from_json(fixture(name).as_ptr(), &mut out) };
    assert_eq!(status, DinatStatus::Ok, "{name}: {}", last_error());
    Handle(out)
}

fn last_error() -> String {
    let p = dinat_last_error();
    if p.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }
}

fn take(s: *mut c_char) -> String {
    let text = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { dinat_string_free(s) };
    text
}

#[test]
fn composing_the_copy_pair_matches_the_stored_composite() {
    let (phi, psi) = (load("copy_phi.json"), load("copy_psi.json"));
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { dinat_vcompose(phi.0, psi.0, &mut c) }, DinatStatus::Ok);
    let c = Handle(c);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { dinat_transformation_to_json(c.0, &mut json) }, DinatStatus::Ok);
    let ours: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
    let stored: serde_json::Value = serde_json::from_str(fixture("copy_eval.json").to_str().unwrap()).unwrap();
    assert_eq!(ours, stored);

    let mut check = DinatCheck::default();
    assert_eq!(unsafe { dinat_check(c.0, 1, &mut check) }, DinatStatus::Ok);
    assert_eq!(
        check,
        DinatCheck {
            acyclic: true,
            guaranteed: true
        }
    );

    let mut w = ptr::null_mut();
    assert_eq!(unsafe { dinat_witness_json(c.0, 1, &mut w) }, DinatStatus::Ok);
    let w: serde_json::Value = serde_json::from_str(&take(w)).unwrap();
    assert_eq!(w["steps"].as_array().unwrap().len(), 4);

    assert_eq!(unsafe { dinat_oracle_check(c.0, 2) }, DinatStatus::Ok);
}

#[test]
fn documents_round_trip_through_json() {
    for name in ["delta.json", "eval.json", "church2.json", "copy_eval.json", "loop_cyclic.json"] {
        let a = load(name);
        let mut json = ptr::null_mut();
        assert_eq!(unsafe { dinat_transformation_to_json(a.0, &mut json) }, DinatStatus::Ok);
        let text = CString::new(take(json)).unwrap();
        let mut b = ptr::null_mut();
        assert_eq!(
            unsafe { dinat_transformation_from_json(text.as_ptr(), &mut b) },
            DinatStatus::Ok,
            "{name}: {}",
            last_error()
        );
        let b = Handle(b);
        let mut again = ptr::null_mut();
        assert_eq!(unsafe { dinat_transformation_to_json(b.0, &mut again) }, DinatStatus::Ok);
        assert_eq!(take(again), text.to_str().unwrap());
    }
}

#[test]
fn negative_answers_and_their_messages() {
    let cyclic = load("loop_cyclic.json");
    let mut check = DinatCheck {
        acyclic: true,
        guaranteed: true,
    };
    assert_eq!(unsafe { dinat_check(cyclic.0, 1, &mut check) }, DinatStatus::Ok);
    assert_eq!(
        check,
        DinatCheck {
            acyclic: false,
            guaranteed: false
        }
    );
    let mut delta = true;
    assert_eq!(unsafe { dinat_transformation_delta(cyclic.0, 1, &mut delta) }, DinatStatus::Ok);
    assert!(!delta);

    let mut w = ptr::null_mut();
    assert_eq!(unsafe { dinat_witness_json(cyclic.0, 1, &mut w) }, DinatStatus::Negative);
    assert!(w.is_null());
    assert!(last_error().contains("t1 -> t2 -> t1"), "{}", last_error());

    let corrupted = load("church2_corrupted.json");
    assert_eq!(unsafe { dinat_oracle_check(corrupted.0, 3) }, DinatStatus::Negative);
    assert!(last_error().contains("variable 1"));

    // a successful call clears the message
    let mut vars = 0;
    assert_eq!(unsafe { dinat_transformation_vars(corrupted.0, &mut vars) }, DinatStatus::Ok);
    assert_eq!(vars, 1);
    assert!(dinat_last_error().is_null());
}

#[test]
fn bad_input_is_reported_not_crashed() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dinat_transformation_from_json(ptr::null(), &mut out) }, DinatStatus::NullPointer);
    let bytes = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { dinat_transformation_from_json(bytes.as_ptr().cast(), &mut out) },
        DinatStatus::InvalidUtf8
    );
    let junk = CString::new(r#"{"name": "x"}"#).unwrap();
    assert_eq!(unsafe { dinat_transformation_from_json(junk.as_ptr(), &mut out) }, DinatStatus::InvalidDocument);
    assert!(out.is_null());

    let (delta, eval) = (load("delta.json"), load("eval.json"));
    assert_eq!(unsafe { dinat_vcompose(delta.0, eval.0, &mut out) }, DinatStatus::InvalidArgument);
    assert_eq!(unsafe { dinat_hcompose(delta.0, eval.0, 3, &mut out) }, DinatStatus::InvalidArgument);
    assert!(out.is_null());
    let mut b = false;
    assert_eq!(unsafe { dinat_transformation_delta(eval.0, 3, &mut b) }, DinatStatus::InvalidArgument);
    let mut check = DinatCheck::default();
    assert_eq!(unsafe { dinat_check(eval.0, 0, &mut check) }, DinatStatus::InvalidArgument);
    assert_eq!(unsafe { dinat_check(eval.0, 1, ptr::null_mut()) }, DinatStatus::NullPointer);

    let plain = load("loop_phi.json");
    assert_eq!(unsafe { dinat_oracle_check(plain.0, 2) }, DinatStatus::InvalidArgument);

    unsafe {
        dinat_transformation_free(ptr::null_mut());
        dinat_string_free(ptr::null_mut());
    }
}

#[test]
fn hcompose_and_render() {
    let (delta, eval) = (load("delta.json"), load("eval.json"));
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { dinat_hcompose(delta.0, eval.0, 1, &mut h) }, DinatStatus::Ok);
    let h = Handle(h);
    let mut vars = 0;
    assert_eq!(unsafe { dinat_transformation_vars(h.0, &mut vars) }, DinatStatus::Ok);
    assert_eq!(vars, 2);
    let mut dot = ptr::null_mut();
    assert_eq!(unsafe { dinat_render_dot(h.0, &mut dot) }, DinatStatus::Ok);
    let dot = take(dot);
    assert!(dot.starts_with("digraph "));
    assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 5);
}
