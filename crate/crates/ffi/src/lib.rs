//! C interface to the reconstruction library.
//!
//! Objects are opaque heap handles released with the matching `*_free`
//! function. Every fallible call returns an [`RteStatus`]; on failure the
//! message is available from [`rte_last_error`] on the same thread. Panics
//! never cross the boundary: they are reported as [`RteStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use rte_core::cli::{build_mesh, run_validation, Preset, RunConfig, ValidateOptions};
use rte_core::forward::{ballistic_measurement, forward_measurement, BoundaryMeasurement};
use rte_core::mesh::{generate_mesh, read_mesh, write_mesh, BoundaryCurve, Triangulation};
use rte_core::recon::{reconstruct, ReconstructionReport};
use rte_core::{Error, ErrorClass};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RteStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Numeric = 3,
    Io = 4,
    InvalidArgument = 5,
    Panic = 6,
}

/// Unstructured triangular mesh.
pub struct RteMesh(Triangulation);

/// Run configuration (domain, medium, source, solver settings).
pub struct RteConfig(RunConfig);

/// Boundary outflow samples, `K` points by `N` directions.
pub struct RteMeasurement(BoundaryMeasurement);

/// Per-triangle reconstruction and its diagnostics.
pub struct RteReport(ReconstructionReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn status_of(err: &Error) -> RteStatus {
    match (err, err.class()) {
        (Error::InvalidParameter(_), _) => RteStatus::InvalidArgument,
        (_, ErrorClass::Config) => RteStatus::Config,
        (_, ErrorClass::Numeric) => RteStatus::Numeric,
        (_, ErrorClass::Io) => RteStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), RteStatus>) -> RteStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RteStatus::Ok,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {msg}"));
            RteStatus::Panic
        }
    }
}

fn fail(err: Error) -> RteStatus {
    set_error(&err.to_string());
    status_of(&err)
}

fn null(what: &str) -> RteStatus {
    set_error(&format!("{what} is null"));
    RteStatus::NullPointer
}

/// # Safety
/// `p` must be null or a valid nul-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, RteStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        RteStatus::InvalidArgument
    })
}

/// # Safety
/// `p` must be null or point to a live handle of type `T`.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, RteStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `out` must be null or valid for one write.
unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), RteStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn rte_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn rte_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Generates a mesh of the domain described by `curve` (e.g. `circle:1`,
/// `ellipse:0.69:0.92`) with target edge length `h`.
///
/// # Safety
/// `curve` must be a nul-terminated string; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rte_mesh_generate(curve: *const c_char, h: f64, out: *mut *mut RteMesh) -> RteStatus {
    guard(|| {
        let curve = BoundaryCurve::parse_descriptor(str_arg(curve, "curve")?).map_err(fail)?;
        let mesh = generate_mesh(&curve, h).map_err(fail)?;
        put(out, Box::into_raw(Box::new(RteMesh(mesh))), "out")
    })
}

/// # Safety
/// `path` must be a nul-terminated string; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rte_mesh_read(path: *const c_char, out: *mut *mut RteMesh) -> RteStatus {
    guard(|| {
        let mesh = read_mesh(str_arg(path, "path")?).map_err(fail)?;
        put(out, Box::into_raw(Box::new(RteMesh(mesh))), "out")
    })
}

/// # Safety
/// `mesh` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rte_mesh_write(mesh: *const RteMesh, path: *const c_char) -> RteStatus {
    guard(|| {
        let mesh = handle(mesh, "mesh")?;
        write_mesh(&mesh.0, str_arg(path, "path")?).map_err(fail)
    })
}

/// # Safety
/// `mesh` must be a live handle; the outputs must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn rte_mesh_size(mesh: *const RteMesh, vertices: *mut usize, triangles: *mut usize) -> RteStatus {
    guard(|| {
        let mesh = handle(mesh, "mesh")?;
        put(vertices, mesh.0.num_vertices(), "vertices")?;
        put(triangles, mesh.0.num_triangles(), "triangles")
    })
}

/// # Safety
/// `mesh` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rte_mesh_free(mesh: *mut RteMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Reads and validates an INI run configuration.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rte_config_read(path: *const c_char, out: *mut *mut RteConfig) -> RteStatus {
    guard(|| {
        let config = RunConfig::read(str_arg(path, "path")?).map_err(fail)?;
        put(out, Box::into_raw(Box::new(RteConfig(config))), "out")
    })
}

/// Parses a configuration held in memory.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rte_config_parse(text: *const c_char, out: *mut *mut RteConfig) -> RteStatus {
    guard(|| {
        let config = RunConfig::parse(str_arg(text, "text")?).map_err(fail)?;
        put(out, Box::into_raw(Box::new(RteConfig(config))), "out")
    })
}

/// One of `exp1`, `exp2`, `exp1-desk`, `exp2-desk`.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rte_config_preset(name: *const c_char, out: *mut *mut RteConfig) -> RteStatus {
    guard(|| {
        let preset = Preset::parse(str_arg(name, "name")?).map_err(|msg| fail(Error::Config { line: 0, msg }))?;
        put(out, Box::into_raw(Box::new(RteConfig(preset.config()))), "out")
    })
}

/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rte_config_free(config: *mut RteConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Synthetic boundary data for the configured medium and source, using the
/// configured forward mesh and model.
///
/// # Safety
/// `config` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rte_forward(config: *const RteConfig, out: *mut *mut RteMeasurement) -> RteStatus {
    guard(|| {
        let c = &handle(config, "config")?.0;
        c.validate().map_err(fail)?;
        let medium = c.medium().map_err(fail)?;
        let params = c.forward_params();
        let meas = match c.forward.model {
            rte_core::cli::ForwardModel::Transport => {
                let mesh = build_mesh(&c.forward.mesh, c).map_err(fail)?;
                forward_measurement(&mesh, &medium, &c.source, &params).map_err(fail)?.1
            }
            rte_core::cli::ForwardModel::Ballistic => {
                ballistic_measurement(&c.curve, &medium, &c.source, params.k_points, params.n_angles, c.forward.ray_points)
                    .map_err(fail)?
            }
        };
        put(out, Box::into_raw(Box::new(RteMeasurement(meas))), "out")
    })
}

/// # Safety
/// `path` must be a nul-terminated string; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rte_measurement_read(path: *const c_char, out: *mut *mut RteMeasurement) -> RteStatus {
    guard(|| {
        let meas = BoundaryMeasurement::read(str_arg(path, "path")?).map_err(fail)?;
        put(out, Box::into_raw(Box::new(RteMeasurement(meas))), "out")
    })
}

/// # Safety
/// `meas` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rte_measurement_write(meas: *const RteMeasurement, path: *const c_char) -> RteStatus {
    guard(|| {
        let meas = handle(meas, "measurement")?;
        meas.0.write(PathBuf::from(str_arg(path, "path")?)).map_err(fail)
    })
}

/// Number of boundary points `K` and directions `N`.
///
/// # Safety
/// `meas` must be a live handle; the outputs must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn rte_measurement_dims(meas: *const RteMeasurement, k: *mut usize, n: *mut usize) -> RteStatus {
    guard(|| {
        let meas = handle(meas, "measurement")?;
        put(k, meas.0.num_points(), "k")?;
        put(n, meas.0.num_angles(), "n")
    })
}

/// Copies the `K·N` samples, point-major, into `buf` of length `len`.
///
/// # Safety
/// `meas` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn rte_measurement_copy_values(meas: *const RteMeasurement, buf: *mut f64, len: usize) -> RteStatus {
    guard(|| {
        let meas = handle(meas, "measurement")?;
        copy_out(&meas.0.values, buf, len)
    })
}

/// # Safety
/// `meas` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rte_measurement_free(meas: *mut RteMeasurement) {
    if !meas.is_null() {
        drop(Box::from_raw(meas));
    }
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), RteStatus> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    if len != src.len() {
        set_error(&format!("buffer holds {len} values, {} required", src.len()));
        return Err(RteStatus::InvalidArgument);
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, len);
    Ok(())
}

/// Reconstructs the source on `mesh` at truncation order `m`; a negative `m`
/// selects the configured order.
///
/// # Safety
/// All handles must be live; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rte_reconstruct(
    config: *const RteConfig,
    meas: *const RteMeasurement,
    mesh: *const RteMesh,
    m: i32,
    out: *mut *mut RteReport,
) -> RteStatus {
    guard(|| {
        let c = &handle(config, "config")?.0;
        let meas = &handle(meas, "measurement")?.0;
        let mesh = &handle(mesh, "mesh")?.0;
        let medium = c.medium().map_err(fail)?;
        let params = c.recon_params(usize::try_from(m).ok());
        let mut report = reconstruct(meas, mesh, &medium, &params).map_err(fail)?;
        if c.recon.pseudo_error {
            report = report.with_ground_truth(mesh, &c.source);
        }
        put(out, Box::into_raw(Box::new(RteReport(report))), "out")
    })
}

/// Number of triangles, i.e. the length of the `q` arrays.
///
/// # Safety
/// `report` must be a live handle; `triangles` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rte_report_len(report: *const RteReport, triangles: *mut usize) -> RteStatus {
    guard(|| put(triangles, handle(report, "report")?.0.q_real.len(), "triangles"))
}

/// Imaginary-part criterion value of the reconstruction.
///
/// # Safety
/// `report` must be a live handle; `value` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rte_report_e_imag(report: *const RteReport, value: *mut f64) -> RteStatus {
    guard(|| put(value, handle(report, "report")?.0.e_imag, "value"))
}

/// Copies the per-triangle real and imaginary parts of `q`; each buffer has length `len`.
///
/// # Safety
/// `report` must be a live handle and both buffers valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn rte_report_copy_q(report: *const RteReport, real: *mut f64, imag: *mut f64, len: usize) -> RteStatus {
    guard(|| {
        let r = &handle(report, "report")?.0;
        copy_out(&r.q_real, real, len)?;
        copy_out(&r.q_imag, imag, len)
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rte_report_free(report: *mut RteReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Runs the built-in oracle suite and reports how many checks passed.
///
/// # Safety
/// The outputs must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn rte_validate(passed: *mut usize, total: *mut usize) -> RteStatus {
    guard(|| {
        let checks = run_validation(ValidateOptions::default()).map_err(fail)?;
        put(passed, checks.iter().filter(|c| c.passed()).count(), "passed")?;
        put(total, checks.len(), "total")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status_codes() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, RteStatus::Panic);
        let msg = unsafe { CStr::from_ptr(rte_last_error()) }.to_str().unwrap().to_owned();
        assert!(msg.contains("boom"), "{msg}");
        assert_eq!(guard(|| Ok(())), RteStatus::Ok);
        assert!(unsafe { CStr::from_ptr(rte_last_error()) }.to_bytes().is_empty());
    }

    #[test]
    fn error_classes_map_to_codes() {
        assert_eq!(status_of(&Error::invalid("x")), RteStatus::InvalidArgument);
        assert_eq!(status_of(&Error::Config { line: 1, msg: "x".into() }), RteStatus::Config);
        assert_eq!(status_of(&Error::NotConverged { iterations: 1, residual: 1.0 }), RteStatus::Numeric);
        assert_eq!(status_of(&Error::DataFormat { line: 1, msg: "x".into() }), RteStatus::Io);
    }
}
