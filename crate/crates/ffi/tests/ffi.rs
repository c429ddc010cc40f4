use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use rte_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rte_last_error()) }.to_string_lossy().into_owned()
}

const BALLISTIC: &str = "\
[mu_a]
background = 0.4
[source]
background = 0
shape = disc 0.1 0 0.4 1
[forward]
model = ballistic
mesh_h = 0.05
k = 128
n = 64
[recon]
mesh_h = 0.1
m = 1
s = 16
line_points = 40
hilbert_points = 40
pseudo_error = true
";

#[test]
fn mesh_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = cstr(dir.path().join("m.txt").to_str().unwrap());
    unsafe {
        let mut mesh = ptr::null_mut();
        assert_eq!(rte_mesh_generate(cstr("ellipse:0.69:0.92").as_ptr(), 0.1, &mut mesh), RteStatus::Ok);
        assert_eq!(rte_mesh_write(mesh, path.as_ptr()), RteStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(rte_mesh_read(path.as_ptr(), &mut back), RteStatus::Ok);
        let (mut v1, mut t1, mut v2, mut t2) = (0, 0, 0, 0);
        assert_eq!(rte_mesh_size(mesh, &mut v1, &mut t1), RteStatus::Ok);
        assert_eq!(rte_mesh_size(back, &mut v2, &mut t2), RteStatus::Ok);
        assert_eq!((v1, t1), (v2, t2));
        assert!(t1 > 100);
        rte_mesh_free(mesh);
        rte_mesh_free(back);
    }
}

#[test]
fn forward_then_reconstruct() {
    unsafe {
        let mut config = ptr::null_mut();
        assert_eq!(rte_config_parse(cstr(BALLISTIC).as_ptr(), &mut config), RteStatus::Ok, "{}", last_error());
        let mut meas = ptr::null_mut();
        assert_eq!(rte_forward(config, &mut meas), RteStatus::Ok, "{}", last_error());
        let (mut k, mut n) = (0, 0);
        assert_eq!(rte_measurement_dims(meas, &mut k, &mut n), RteStatus::Ok);
        assert_eq!((k, n), (128, 64));
        let mut values = vec![0.0; k * n];
        assert_eq!(rte_measurement_copy_values(meas, values.as_mut_ptr(), values.len()), RteStatus::Ok);
        assert!(values.iter().any(|&v| v > 0.1));
        assert_eq!(rte_measurement_copy_values(meas, values.as_mut_ptr(), 3), RteStatus::InvalidArgument);

        let mut mesh = ptr::null_mut();
        assert_eq!(rte_mesh_generate(cstr("circle:1").as_ptr(), 0.1, &mut mesh), RteStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(rte_reconstruct(config, meas, mesh, -1, &mut report), RteStatus::Ok, "{}", last_error());
        let mut len = 0;
        assert_eq!(rte_report_len(report, &mut len), RteStatus::Ok);
        let (mut re, mut im) = (vec![0.0; len], vec![0.0; len]);
        assert_eq!(rte_report_copy_q(report, re.as_mut_ptr(), im.as_mut_ptr(), len), RteStatus::Ok);
        let peak = re.iter().cloned().fold(f64::MIN, f64::max);
        assert!(peak > 0.5 && peak < 1.5, "{peak}");
        let mut e = -1.0;
        assert_eq!(rte_report_e_imag(report, &mut e), RteStatus::Ok);
        assert!(e >= 0.0);

        rte_report_free(report);
        rte_mesh_free(mesh);
        rte_measurement_free(meas);
        rte_config_free(config);
    }
}

#[test]
fn errors_are_reported_with_codes() {
    unsafe {
        let mut mesh = ptr::null_mut();
        assert_eq!(rte_mesh_generate(ptr::null(), 0.1, &mut mesh), RteStatus::NullPointer);
        assert!(last_error().contains("curve"));
        assert_eq!(rte_mesh_generate(cstr("circle:1").as_ptr(), 0.1, ptr::null_mut()), RteStatus::NullPointer);
        assert_eq!(rte_mesh_generate(cstr("square:1").as_ptr(), 0.1, &mut mesh), RteStatus::InvalidArgument);
        assert!(mesh.is_null());

        let mut config = ptr::null_mut();
        assert_eq!(rte_config_parse(cstr("[recon]\nm = x\n").as_ptr(), &mut config), RteStatus::Config);
        assert!(last_error().contains("line 2"), "{}", last_error());
        assert_eq!(rte_config_preset(cstr("exp7").as_ptr(), &mut config), RteStatus::Config);

        let mut meas = ptr::null_mut();
        assert_eq!(rte_measurement_read(cstr("/nonexistent/data.csv").as_ptr(), &mut meas), RteStatus::Io);

        let stiff = "[mu_s]\nbackground = 5\n[source]\nbackground = 1\n[forward]\nmesh_h = 0.1\nn_dir = 16\nmax_iters = 1\n[recon]\nmesh_h = 0.2\n";
        assert_eq!(rte_config_parse(cstr(stiff).as_ptr(), &mut config), RteStatus::Ok);
        assert_eq!(rte_forward(config, &mut meas), RteStatus::Numeric);
        rte_config_free(config);

        // freeing null is a no-op
        rte_mesh_free(ptr::null_mut());
        rte_report_free(ptr::null_mut());
    }
}

#[test]
fn presets_and_version() {
    unsafe {
        let mut config = ptr::null_mut();
        for name in ["exp1", "exp2", "exp1-desk", "exp2-desk"] {
            assert_eq!(rte_config_preset(cstr(name).as_ptr(), &mut config), RteStatus::Ok);
            rte_config_free(config);
        }
        assert_eq!(CStr::from_ptr(rte_version()).to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn header_declares_the_interface_and_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("rte.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for decl in ["RTE_STATUS_PANIC = 6", "typedef struct RteMesh RteMesh;", "rte_reconstruct(", "rte_last_error(void)"] {
        assert!(text.contains(decl), "missing `{decl}`");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"rte.h\"\nint probe(void) { RteMesh *m = 0; size_t v, t; return (int)rte_mesh_size(m, &v, &t) + RTE_STATUS_OK; }\n",
    )
    .unwrap();
    let Ok(out) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    else {
        eprintln!("no C compiler available; skipped the compile check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
