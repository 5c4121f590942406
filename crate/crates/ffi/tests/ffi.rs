use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use orbital_ffi::*;

fn last_error() -> String {
    let len = orbital_last_error_length();
    let mut buf = vec![0 as std::ffi::c_char; len + 1];
    unsafe { orbital_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(orbital_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn ranking_handle_round_trip() {
    let pz = [0.4, 0.3, 0.2, 0.1];
    let mut model = ptr::null_mut();
    let st = unsafe {
        orbital_ranking_model_new(4, 0, OrbitalMetric::Kendall, -0.7, pz.as_ptr(), &mut model)
    };
    assert_eq!(st, OrbitalStatus::Ok);
    let mut total = 0.0;
    let ground: Vec<usize> = (1..=4).collect();
    for p in orbital_core::group::Permutation::all(&ground) {
        let mut v = 0.0;
        assert_eq!(
            unsafe { orbital_ranking_pmf(model, p.images().as_ptr(), 4, &mut v) },
            OrbitalStatus::Ok
        );
        total += v;
    }
    assert!((total - 1.0).abs() < 1e-12);
    let mut draws = vec![0usize; 50 * 4];
    assert_eq!(
        unsafe { orbital_ranking_sample(model, 3, 50, draws.as_mut_ptr()) },
        OrbitalStatus::Ok
    );
    for row in draws.chunks(4) {
        let mut r = row.to_vec();
        r.sort();
        assert_eq!(r, vec![1, 2, 3, 4]);
    }
    unsafe { orbital_ranking_model_free(model) };
    unsafe { orbital_ranking_model_free(ptr::null_mut()) };
}

#[test]
fn ranking_decompose_matches_worked_example() {
    let ranks = [6usize, 3, 5, 1, 4, 2];
    let (mut h, mut t, mut top) = ([0usize; 3], [0usize; 5], 0usize);
    let st = unsafe {
        orbital_ranking_decompose(
            ranks.as_ptr(),
            6,
            3,
            h.as_mut_ptr(),
            t.as_mut_ptr(),
            &mut top,
        )
    };
    assert_eq!(st, OrbitalStatus::Ok);
    assert_eq!(h, [6, 5, 4]);
    assert_eq!(t, [4, 3, 5, 6, 2]);
    assert_eq!(top, 4);
}

#[test]
fn errors_set_status_and_message() {
    let mut model = ptr::null_mut();
    let st = unsafe {
        orbital_ranking_model_new(4, 0, OrbitalMetric::Kendall, -1.0, ptr::null(), &mut model)
    };
    assert_eq!(st, OrbitalStatus::NullPointer);
    assert!(last_error().contains("p_z"));
    let x = [0.0, 0.0];
    let mut star = ptr::null_mut();
    let st = unsafe {
        orbital_star_model_new(
            2,
            OrbitalGauge::L2,
            0.0,
            ptr::null(),
            OrbitalRadial::Gaussian,
            1.0,
            &mut star,
        )
    };
    assert_eq!(st, OrbitalStatus::Ok);
    assert_eq!(orbital_last_error_length(), 0);
    let (mut eps, mut h, mut z) = (0.0, 0.0, [0.0; 2]);
    let st =
        unsafe { orbital_star_decompose(star, x.as_ptr(), 2, &mut eps, &mut h, z.as_mut_ptr()) };
    assert_eq!(st, OrbitalStatus::Domain);
    assert!(!last_error().is_empty());
    unsafe { orbital_star_model_free(star) };

    let w = [1.0, 0.0, 0.0, 1.0];
    let (mut t, mut c, mut l) = ([0.0; 4], [0.0; 4], [0.0; 2]);
    let st = unsafe {
        orbital_wishart_decompose(
            2,
            w.as_ptr(),
            w.as_ptr(),
            t.as_mut_ptr(),
            c.as_mut_ptr(),
            l.as_mut_ptr(),
        )
    };
    assert_eq!(st, OrbitalStatus::Domain);
}

#[test]
fn star_handle_decomposes_and_samples() {
    let a = [1.0, 0.0, 0.0, 4.0];
    let mut star = ptr::null_mut();
    let st = unsafe {
        orbital_star_model_new(
            2,
            OrbitalGauge::Ellipsoid,
            0.0,
            a.as_ptr(),
            OrbitalRadial::Exponential,
            1.5,
            &mut star,
        )
    };
    assert_eq!(st, OrbitalStatus::Ok);
    let x = [0.0, -3.0];
    let (mut eps, mut h, mut z) = (0.0, 0.0, [0.0; 2]);
    assert_eq!(
        unsafe { orbital_star_decompose(star, x.as_ptr(), 2, &mut eps, &mut h, z.as_mut_ptr()) },
        OrbitalStatus::Ok
    );
    assert_eq!(eps, -1.0);
    assert!((h - 6.0).abs() < 1e-12);
    assert!((z[1] - 0.5).abs() < 1e-12);
    let mut d = 0.0;
    assert_eq!(
        unsafe { orbital_star_density(star, x.as_ptr(), 2, &mut d) },
        OrbitalStatus::Ok
    );
    assert!((d - 0.5 * (-6.0f64).exp()).abs() < 1e-15);
    let mut total = 0.0;
    assert_eq!(
        unsafe { orbital_star_normalizing_constant(star, &mut total) },
        OrbitalStatus::Ok
    );
    // c0 = 1 for e^{-h}, p = 2; the ellipse x'Ax <= 1 has area π/2
    assert!((total - std::f64::consts::PI).abs() < 1e-9);
    let mut xs = vec![0.0; 20];
    assert_eq!(
        unsafe { orbital_star_sample(star, 9, 10, xs.as_mut_ptr()) },
        OrbitalStatus::Ok
    );
    assert!(xs.iter().all(|v| v.is_finite()));
    unsafe { orbital_star_model_free(star) };
}

#[test]
fn wishart_sample_then_decompose() {
    let (mut w1, mut w2) = ([0.0; 9], [0.0; 9]);
    let st = unsafe {
        orbital_wishart_sample_pair(
            3,
            5.0,
            7.0,
            ptr::null(),
            1,
            w1.as_mut_ptr(),
            w2.as_mut_ptr(),
        )
    };
    assert_eq!(st, OrbitalStatus::Ok);
    let (mut t, mut c, mut l) = ([0.0; 9], [0.0; 9], [0.0; 3]);
    let st = unsafe {
        orbital_wishart_decompose(
            3,
            w1.as_ptr(),
            w2.as_ptr(),
            t.as_mut_ptr(),
            c.as_mut_ptr(),
            l.as_mut_ptr(),
        )
    };
    assert_eq!(st, OrbitalStatus::Ok);
    assert!(l[0] > l[1] && l[1] > l[2] && l[2] > 0.0 && l[0] < 1.0);
    for i in 0..3 {
        for j in 0..3 {
            let s: f64 = (0..3).map(|k| t[i * 3 + k] * t[j * 3 + k]).sum();
            assert!((s - w1[i * 3 + j] - w2[i * 3 + j]).abs() < 1e-10);
        }
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("liborbital_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let bin = profile_dir.join("orbital_ffi_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("cc runs");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "smoke exited with {:?}",
        out.status.code()
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("theta"));
}
