use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use curvecomm::bounds::ser_bounds;
use curvecomm::channel::DecoderKind;
use curvecomm::geometry::{antipodal_geometry, Constellation};
use curvecomm::montecarlo::estimate_ser;
use curvecomm::pairwise::{
    antipodal_pep_matched, matched_pep_for_pair, upper_tail, NoiseParams, DEFAULT_QUAD_ORDER,
};
use curvecomm_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(curvecomm_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn uniform(k: usize, m: usize) -> *mut CurvecommConstellation {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { curvecomm_constellation_new_uniform(k, m, &mut h) },
        CurvecommStatus::Ok
    );
    assert!(!h.is_null());
    h
}

#[test]
fn q_function_and_errors() {
    let mut v = 0.0;
    assert_eq!(
        unsafe { curvecomm_q_function(2.0, &mut v) },
        CurvecommStatus::Ok
    );
    assert_eq!(v, upper_tail(2.0));

    assert_eq!(
        unsafe { curvecomm_q_function(1.0, ptr::null_mut()) },
        CurvecommStatus::NullPointer
    );
    assert!(last_error().contains("null"));

    let before = v;
    assert_eq!(
        unsafe { curvecomm_q_function(f64::NAN, &mut v) },
        CurvecommStatus::InvalidParameter
    );
    assert_eq!(v, before, "out untouched on failure");
}

#[test]
fn handle_lifecycle_matches_core() {
    let h = uniform(3, 8);
    let core = Constellation::uniform(3, 8).unwrap();
    let (mut len, mut dim) = (0usize, 0usize);
    unsafe {
        assert_eq!(
            curvecomm_constellation_len(h, &mut len),
            CurvecommStatus::Ok
        );
        assert_eq!(
            curvecomm_constellation_dim(h, &mut dim),
            CurvecommStatus::Ok
        );
    }
    assert_eq!((len, dim), (8, 6));
    let mut buf = vec![0.0; dim];
    unsafe {
        assert_eq!(
            curvecomm_constellation_point(h, 5, buf.as_mut_ptr(), buf.len()),
            CurvecommStatus::Ok
        );
        assert_eq!(
            curvecomm_constellation_point(h, 8, buf.as_mut_ptr(), buf.len()),
            CurvecommStatus::InvalidParameter
        );
        assert_eq!(
            curvecomm_constellation_point(h, 0, buf.as_mut_ptr(), 2),
            CurvecommStatus::InvalidParameter
        );
    }
    assert_eq!(buf, core.point(5));
    unsafe {
        curvecomm_constellation_free(h);
        curvecomm_constellation_free(ptr::null_mut());
    }
}

#[test]
fn phase_constructor_validates() {
    let mut h = ptr::null_mut();
    let good = [0.0, 1.0, 2.5];
    let bad = [0.0, 2.0, 1.0];
    unsafe {
        assert_eq!(
            curvecomm_constellation_new_phases(2, good.as_ptr(), 3, &mut h),
            CurvecommStatus::Ok
        );
        curvecomm_constellation_free(h);
        h = ptr::null_mut();
        assert_eq!(
            curvecomm_constellation_new_phases(2, bad.as_ptr(), 3, &mut h),
            CurvecommStatus::InvalidParameter
        );
        assert!(h.is_null());
        assert_eq!(
            curvecomm_constellation_new_phases(2, ptr::null(), 3, &mut h),
            CurvecommStatus::NullPointer
        );
    }
}

#[test]
fn pairwise_wrappers_match_core() {
    let h = uniform(20, 12);
    let n = NoiseParams::new(0.5, 0.3).unwrap();
    let mut g = CurvecommPairGeometry::default();
    let mut v = 0.0;
    unsafe {
        assert_eq!(
            curvecomm_pair_geometry(h, 0, 6, 1e-9, &mut g),
            CurvecommStatus::Ok
        );
        assert!(g.phantom);
        assert_eq!(
            curvecomm_matched_pep_for_pair(h, 0, 6, 0.5, 0.3, DEFAULT_QUAD_ORDER, 1e-9, &mut v),
            CurvecommStatus::Ok
        );
    }
    let c = Constellation::uniform(20, 12).unwrap();
    assert_eq!(
        v,
        matched_pep_for_pair(&c, 0, 6, n, DEFAULT_QUAD_ORDER, 1e-9).unwrap()
    );
    let closed = antipodal_pep_matched(20, n, DEFAULT_QUAD_ORDER).unwrap();
    assert!((v - closed).abs() < 1e-12);

    unsafe {
        assert_eq!(
            curvecomm_matched_pep_for_pair(h, 0, 1, 0.5, 0.3, DEFAULT_QUAD_ORDER, 1e-9, &mut v),
            CurvecommStatus::NotPhantom
        );
    }
    assert!(last_error().contains("not phantom"));

    let mut a = CurvecommAntipodalGeometry::default();
    unsafe {
        assert_eq!(
            curvecomm_antipodal_geometry(20, &mut a),
            CurvecommStatus::Ok
        );
    }
    let core = antipodal_geometry(20).unwrap();
    assert_eq!(
        (a.delta, a.gamma, a.rho),
        (core.delta, core.gamma, core.rho)
    );

    unsafe {
        assert_eq!(
            curvecomm_euclidean_pep(2.0, 0.0, 0.5, 0.5, &mut v),
            CurvecommStatus::Ok
        );
    }
    assert_eq!(v, upper_tail(2f64.sqrt()));
    unsafe {
        assert_eq!(
            curvecomm_euclidean_pep(2.0, 0.0, 0.5, 0.0, &mut v),
            CurvecommStatus::SingularModel
        );
        assert_eq!(
            curvecomm_matched_phantom_pep(2.0, -1.0, 0.36, 0.4, 64, &mut v),
            CurvecommStatus::Ok
        );
    }
    assert_eq!(v, upper_tail(2.0));
    unsafe { curvecomm_constellation_free(h) };
}

#[test]
fn bounds_and_estimates_match_core() {
    let n = NoiseParams::new(0.4, 0.3).unwrap();
    let mut b = CurvecommSerBounds::default();
    unsafe {
        assert_eq!(
            curvecomm_ser_bounds(20, 12, 0.4, 0.3, 64, &mut b),
            CurvecommStatus::Ok
        );
    }
    let core = ser_bounds(20, 12, n, 64).unwrap();
    assert_eq!(b.lower, core.lower);
    assert_eq!(b.upper_raw, core.upper_raw);
    assert_eq!(b.matched_lower, core.matched_lower.unwrap());
    let mut p = 0.0;
    unsafe {
        assert_eq!(
            curvecomm_offset_pep(20, 12, 2, 0.4, 0.3, &mut p),
            CurvecommStatus::Ok
        );
        assert_eq!(
            curvecomm_ser_bounds(20, 11, 0.4, 0.3, 64, &mut b),
            CurvecommStatus::InvalidParameter
        );
    }
    assert_eq!(p, core.per_offset[1].1);

    let h = uniform(20, 12);
    let c = Constellation::uniform(20, 12).unwrap();
    let mut e = CurvecommEstimate::default();
    unsafe {
        assert_eq!(
            curvecomm_estimate_ser(
                h,
                CurvecommDecoder::Euclidean as u32,
                0.4,
                0.3,
                3000,
                9,
                2,
                &mut e
            ),
            CurvecommStatus::Ok
        );
    }
    let r = estimate_ser(&c, DecoderKind::Euclidean, n, 3000, 9).unwrap();
    assert_eq!((e.errors, e.trials, e.value), (r.errors, r.trials, r.value));

    unsafe {
        assert_eq!(
            curvecomm_estimate_pairwise_pep(h, 0, 6, 7, 0.4, 0.3, 100, 1, 1, &mut e),
            CurvecommStatus::InvalidParameter
        );
        assert_eq!(
            curvecomm_estimate_pairwise_pep(h, 0, 6, 0, 0.4, 0.3, 0, 1, 1, &mut e),
            CurvecommStatus::InvalidParameter
        );
        assert_eq!(
            curvecomm_estimate_pairwise_pep(ptr::null(), 0, 6, 0, 0.4, 0.3, 10, 1, 1, &mut e),
            CurvecommStatus::NullPointer
        );
        curvecomm_constellation_free(h);
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/curvecomm.h")
}

fn c_compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc)
        .arg("--version")
        .output()
        .ok()?
        .status
        .success()
        .then_some(cc)
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "curvecomm.h"

int main(void) {
    double q = 0.0;
    if (curvecomm_q_function(2.0, &q) != CURVECOMM_STATUS_OK) return 1;
    CurvecommConstellation *c = NULL;
    if (curvecomm_constellation_new_uniform(20, 12, &c) != CURVECOMM_STATUS_OK) return 2;
    double p = 0.0;
    CurvecommStatus s = curvecomm_matched_pep_for_pair(c, 0, 1, 0.5, 0.3, 64, 1e-9, &p);
    if (s != CURVECOMM_STATUS_NOT_PHANTOM) return 3;
    if (curvecomm_last_error_message()[0] == '\0') return 4;
    CurvecommEstimate e;
    if (curvecomm_estimate_pairwise_pep(c, 0, 6, CURVECOMM_DECODER_MATCHED, 0.5, 0.3, 2000, 3, 1, &e)
        != CURVECOMM_STATUS_OK) return 5;
    curvecomm_constellation_free(c);
    printf("%.17g %llu\n", q, (unsigned long long)e.errors);
    return 0;
}
"#;

#[test]
fn header_compiles_as_c() {
    let Some(cc) = c_compiler() else {
        eprintln!("no C compiler found; header check skipped");
        return;
    };
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("ffi_header");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("probe.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = header().parent().unwrap().to_path_buf();
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success(), "header failed to compile");
}

/// Links the probe against the static library when cargo has built it next to
/// the test binary.
#[test]
fn c_program_links_and_runs() {
    let Some(cc) = c_compiler() else {
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libcurvecomm_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; link check skipped", lib.display());
        return;
    }
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("ffi_link");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("probe.c");
    let bin = dir.join("probe");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new(&cc)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "link failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "probe exited with {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    let q: f64 = text.split_whitespace().next().unwrap().parse().unwrap();
    assert_eq!(q, upper_tail(2.0));

    let h = uniform(20, 12);
    let mut e = CurvecommEstimate::default();
    unsafe {
        curvecomm_estimate_pairwise_pep(h, 0, 6, 0, 0.5, 0.3, 2000, 3, 4, &mut e);
        curvecomm_constellation_free(h);
    }
    let errors: u64 = text.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert_eq!(errors, e.errors);
}
