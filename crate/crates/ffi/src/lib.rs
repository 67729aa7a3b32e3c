//! C ABI over `cubetopo`.
//!
//! Every function returns a [`CtStatus`]. On failure the message is kept per
//! thread and can be read with [`ct_last_error_message`]. Objects are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use cubetopo::error::Error;
use cubetopo::fieldgen::{generate_sgs, generate_spectral, SgsParams, SpectralParams};
use cubetopo::grid::{excursion, filtration, normalize, Direction, LevelSchedule, ScalarGrid};
use cubetopo::io::{load_grid, save_grid, GridFormat};
use cubetopo::persistence::{morse_barcode, Barcode};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CtStatus {
    Ok = 0,
    NullPointer = 1,
    Io = 2,
    Parse = 3,
    InvalidArgument = 4,
    /// Input violates a data contract (non-finite values, bodies not nested, ...).
    Data = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CtDirection {
    Leq = 0,
    Geq = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CtFormat {
    /// Loading: detect from the file contents. Saving: raw for a `.raw`
    /// extension, text otherwise.
    Auto = 0,
    Text = 1,
    Raw = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CtBetti {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
    pub chi: i64,
}

/// `death` is `n + 1` and `death_level` is +inf for classes alive at the last level.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CtInterval {
    pub q: u32,
    pub birth: usize,
    pub death: usize,
    pub birth_level: f64,
    pub death_level: f64,
}

/// Scalar grid handle.
pub struct CtGrid(ScalarGrid);

/// Barcode handle.
pub struct CtBarcode(Barcode);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(CtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => CtStatus::Io,
            Error::Parse { .. } => CtStatus::Parse,
            Error::InvalidParams(_)
            | Error::InvalidDims(_)
            | Error::NonMonotoneSchedule { .. }
            | Error::IndexOutOfRange(_)
            | Error::DimsMismatch { .. } => CtStatus::InvalidArgument,
            _ => CtStatus::Data,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CtStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CtStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            CtStatus::Panic
        }
    }
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(CtStatus::InvalidArgument, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

fn direction(d: CtDirection) -> Direction {
    match d {
        CtDirection::Leq => Direction::Leq,
        CtDirection::Geq => Direction::Geq,
    }
}

fn format_for(f: CtFormat, path: &std::path::Path, saving: bool) -> Result<GridFormat, Fail> {
    Ok(match f {
        CtFormat::Auto if saving => match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("raw") => GridFormat::Raw,
            _ => GridFormat::Text,
        },
        CtFormat::Auto => GridFormat::detect(path)?,
        CtFormat::Text => GridFormat::Text,
        CtFormat::Raw => GridFormat::Raw,
    })
}

unsafe fn grid_ref<'a>(g: *const CtGrid) -> Result<&'a ScalarGrid, Fail> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("grid"))
}

unsafe fn put_grid(out: *mut *mut CtGrid, g: ScalarGrid) {
    *out = Box::into_raw(Box::new(CtGrid(g)));
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ct_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn ct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies `nx*ny*nz` values (x fastest) into a new grid.
///
/// # Safety
/// `values` must point to `nx*ny*nz` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_grid_new(
    nx: usize,
    ny: usize,
    nz: usize,
    values: *const f64,
    out: *mut *mut CtGrid,
) -> CtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if values.is_null() {
            return Err(null("values"));
        }
        let n = nx
            .checked_mul(ny)
            .and_then(|v| v.checked_mul(nz))
            .ok_or_else(|| Fail(CtStatus::InvalidArgument, "dims overflow".into()))?;
        let data = std::slice::from_raw_parts(values, n).to_vec();
        put_grid(out, ScalarGrid::new([nx, ny, nz], data)?);
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_grid_load(path: *const c_char, format: CtFormat, out: *mut *mut CtGrid) -> CtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = path_arg(path)?;
        let g = load_grid(&path, format_for(format, &path, false)?)?;
        put_grid(out, g);
        Ok(())
    })
}

/// # Safety
/// `grid` must come from this library and `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ct_grid_save(grid: *const CtGrid, path: *const c_char, format: CtFormat) -> CtStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        let path = path_arg(path)?;
        save_grid(g, &path, format_for(format, &path, true)?)?;
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or come from this library, and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ct_grid_free(grid: *mut CtGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
/// `dims` must point to room for three `size_t`.
#[no_mangle]
pub unsafe extern "C" fn ct_grid_dims(grid: *const CtGrid, dims: *mut usize) -> CtStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        if dims.is_null() {
            return Err(null("dims"));
        }
        std::ptr::copy_nonoverlapping(g.dims().as_ptr(), dims, 3);
        Ok(())
    })
}

/// Copies the values into `buf`, which holds `len` doubles; `len` must be
/// at least the grid size.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ct_grid_values(grid: *const CtGrid, buf: *mut f64, len: usize) -> CtStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < g.len() {
            return Err(Fail(
                CtStatus::InvalidArgument,
                format!("buffer holds {len} values, grid has {}", g.len()),
            ));
        }
        std::ptr::copy_nonoverlapping(g.values().as_ptr(), buf, g.len());
        Ok(())
    })
}

/// New grid rescaled onto [0, 1].
///
/// # Safety
/// `grid` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_grid_normalize(grid: *const CtGrid, out: *mut *mut CtGrid) -> CtStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_grid(out, normalize(g)?);
        Ok(())
    })
}

/// Legendre-series field of order `k_max` with default coefficient spreads.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_generate_spectral(
    nx: usize,
    ny: usize,
    nz: usize,
    k_max: usize,
    seed: u64,
    out: *mut *mut CtGrid,
) -> CtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        put_grid(
            out,
            generate_spectral(&SpectralParams::with_order(k_max), [nx, ny, nz], seed)?,
        );
        Ok(())
    })
}

/// Stationary Gaussian field, mean 0, standard deviation 1, exponential
/// covariance with the given ranges in cells.
///
/// # Safety
/// `ranges` must point to three doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_generate_sgs(
    nx: usize,
    ny: usize,
    nz: usize,
    ranges: *const f64,
    seed: u64,
    out: *mut *mut CtGrid,
) -> CtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if ranges.is_null() {
            return Err(null("ranges"));
        }
        let r = std::slice::from_raw_parts(ranges, 3);
        let p = SgsParams {
            ranges: [r[0], r[1], r[2]],
            ..SgsParams::default()
        };
        put_grid(out, generate_sgs(&p, [nx, ny, nz], seed)?);
        Ok(())
    })
}

/// Betti numbers of one excursion set.
///
/// # Safety
/// `grid` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_betti(grid: *const CtGrid, level: f64, dir: CtDirection, out: *mut CtBetti) -> CtStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !level.is_finite() {
            return Err(Fail(CtStatus::InvalidArgument, "level is not finite".into()));
        }
        let t = cubetopo::chain::body_betti(&excursion(g, level, direction(dir)))?;
        *out = CtBetti {
            b0: t.b0,
            b1: t.b1,
            b2: t.b2,
            chi: t.chi,
        };
        Ok(())
    })
}

/// Barcode of dimension `q` over `n_levels` levels in schedule order.
///
/// # Safety
/// `levels` must point to `n_levels` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_barcode(
    grid: *const CtGrid,
    levels: *const f64,
    n_levels: usize,
    dir: CtDirection,
    q: u32,
    out: *mut *mut CtBarcode,
) -> CtStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if levels.is_null() {
            return Err(null("levels"));
        }
        if q > 2 {
            return Err(Fail(CtStatus::InvalidArgument, format!("q must be 0, 1 or 2, got {q}")));
        }
        let schedule = LevelSchedule::new(std::slice::from_raw_parts(levels, n_levels).to_vec(), direction(dir))?;
        let bodies = filtration(g, &schedule);
        let bc = morse_barcode(&bodies, schedule.levels(), q as usize)?;
        *out = Box::into_raw(Box::new(CtBarcode(bc)));
        Ok(())
    })
}

/// Number of intervals; 0 for a null handle.
///
/// # Safety
/// `bc` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn ct_barcode_len(bc: *const CtBarcode) -> usize {
    bc.as_ref().map_or(0, |b| b.0.len())
}

/// # Safety
/// `bc` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_barcode_get(bc: *const CtBarcode, index: usize, out: *mut CtInterval) -> CtStatus {
    guard(|| {
        let b = &bc.as_ref().ok_or_else(|| null("barcode"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let iv = b.intervals().get(index).ok_or_else(|| {
            Fail(
                CtStatus::InvalidArgument,
                format!("interval {index} out of range for {} intervals", b.len()),
            )
        })?;
        let n = b.levels().len();
        *out = CtInterval {
            q: iv.q as u32,
            birth: iv.birth,
            death: iv.death_index(n),
            birth_level: iv.birth_level,
            death_level: iv.death_level.unwrap_or(f64::INFINITY),
        };
        Ok(())
    })
}

/// # Safety
/// `bc` must be null or come from this library, and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ct_barcode_free(bc: *mut CtBarcode) {
    if !bc.is_null() {
        drop(Box::from_raw(bc));
    }
}
