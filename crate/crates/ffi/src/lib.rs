//! C interface to the `drac` library.
//!
//! Datasets and clustering results are opaque heap handles created by the
//! `*_new`/`*_run` functions and released with the matching `*_free`. Every
//! fallible function returns a [`DracStatus`]; on failure a description is
//! available from [`drac_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use drac::{ClusterState, Dataset, DracParams, Error, Point};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DracStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Degenerate = 5,
    IndexOutOfRange = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// Opaque point set.
pub struct DracDataset {
    inner: Dataset,
}

/// Opaque clustering result.
pub struct DracClustering {
    inner: ClusterState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DracStatus {
    match e {
        Error::Io { .. } => DracStatus::Io,
        Error::MalformedRow { .. } | Error::Labels(_) => DracStatus::Parse,
        Error::DegenerateDataset | Error::DegenerateGame(_) => DracStatus::Degenerate,
        Error::IndexOutOfRange { .. } => DracStatus::IndexOutOfRange,
        Error::EmptyDataset
        | Error::NonFinitePoint { .. }
        | Error::UnknownShape(_)
        | Error::DimensionMismatch { .. }
        | Error::PlayerCount { .. }
        | Error::InvalidParameter { .. }
        | Error::InvalidSimilarity(_) => DracStatus::InvalidArgument,
        Error::Lp(_) | Error::Nucleolus(_) => DracStatus::Internal,
    }
}

fn fail(status: DracStatus, message: impl Into<String>) -> DracStatus {
    set_error(message.into());
    status
}

/// Runs `body`, converting library errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), DracStatus>) -> DracStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DracStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(DracStatus::Internal, "panic inside drac"),
    }
}

fn lib_err(e: Error) -> DracStatus {
    fail(status_of(&e), e.to_string())
}

unsafe fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, DracStatus> {
    p.as_ref()
        .ok_or_else(|| fail(DracStatus::NullPointer, format!("{what} is null")))
}

fn check_out<T>(p: *mut T, what: &str) -> Result<(), DracStatus> {
    if p.is_null() {
        Err(fail(DracStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn check_buffer(len: usize, needed: usize) -> Result<(), DracStatus> {
    if len < needed {
        Err(fail(
            DracStatus::BufferTooSmall,
            format!("buffer holds {len} values, {needed} needed"),
        ))
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn drac_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Builds a dataset from `n` coordinates in `xs` and `ys`.
///
/// # Safety
/// `xs` and `ys` must each point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn drac_dataset_new(
    xs: *const f64,
    ys: *const f64,
    n: usize,
    out: *mut *mut DracDataset,
) -> DracStatus {
    guard(|| {
        check_out(out, "out")?;
        if n > 0 && (xs.is_null() || ys.is_null()) {
            return Err(fail(DracStatus::NullPointer, "coordinate array is null"));
        }
        let points = if n == 0 {
            Vec::new()
        } else {
            let xs = std::slice::from_raw_parts(xs, n);
            let ys = std::slice::from_raw_parts(ys, n);
            xs.iter().zip(ys).map(|(&x, &y)| Point::new(x, y)).collect()
        };
        let inner = Dataset::new(points).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DracDataset { inner }));
        Ok(())
    })
}

/// Reads a two-column CSV file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn drac_dataset_from_csv(
    path: *const c_char,
    has_header: bool,
    out: *mut *mut DracDataset,
) -> DracStatus {
    guard(|| {
        check_out(out, "out")?;
        if path.is_null() {
            return Err(fail(DracStatus::NullPointer, "path is null"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| fail(DracStatus::InvalidArgument, "path is not UTF-8"))?;
        let inner = Dataset::load_csv(Path::new(path), has_header).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DracDataset { inner }));
        Ok(())
    })
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn drac_dataset_len(dataset: *const DracDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.len())
}

/// # Safety
/// `dataset` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn drac_dataset_free(dataset: *mut DracDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Writes the Shapley value of every point into `out[0..len]`.
///
/// # Safety
/// `dataset` must be a live handle; `out` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn drac_shapley(dataset: *const DracDataset, out: *mut f64, len: usize) -> DracStatus {
    guard(|| {
        let d = non_null(dataset, "dataset")?;
        check_out(out, "out")?;
        check_buffer(len, d.inner.len())?;
        let phi = if d.inner.len() == 1 {
            vec![0.0]
        } else {
            drac::ClusteringGame::from_dataset(&d.inner)
                .map_err(lib_err)?
                .shapley()
                .phi
        };
        std::slice::from_raw_parts_mut(out, phi.len()).copy_from_slice(&phi);
        Ok(())
    })
}

/// Clusters `dataset` with threshold `delta` and queue fraction `gamma`.
///
/// # Safety
/// `dataset` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn drac_cluster_run(
    dataset: *const DracDataset,
    delta: f64,
    gamma: f64,
    out: *mut *mut DracClustering,
) -> DracStatus {
    guard(|| {
        let d = non_null(dataset, "dataset")?;
        check_out(out, "out")?;
        let params = DracParams::new(delta, gamma).map_err(lib_err)?;
        let inner = drac::drac_cluster(&d.inner, &params).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DracClustering { inner }));
        Ok(())
    })
}

/// Number of labeled points, or 0 for a null handle.
///
/// # Safety
/// `clustering` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn drac_clustering_len(clustering: *const DracClustering) -> usize {
    clustering.as_ref().map_or(0, |c| c.inner.labels.len())
}

/// Number of clusters (noise excluded), or 0 for a null handle.
///
/// # Safety
/// `clustering` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn drac_clustering_num_clusters(clustering: *const DracClustering) -> usize {
    clustering.as_ref().map_or(0, |c| c.inner.clusters.len())
}

/// Writes each point's cluster id, or -1 for noise, into `out[0..len]`.
///
/// # Safety
/// `clustering` must be a live handle; `out` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn drac_clustering_labels(
    clustering: *const DracClustering,
    out: *mut i64,
    len: usize,
) -> DracStatus {
    guard(|| {
        let c = non_null(clustering, "clustering")?;
        check_out(out, "out")?;
        check_buffer(len, c.inner.labels.len())?;
        let dst = std::slice::from_raw_parts_mut(out, c.inner.labels.len());
        for (d, l) in dst.iter_mut().zip(&c.inner.labels) {
            *d = l.as_i64();
        }
        Ok(())
    })
}

/// Writes the center point index of each cluster into `out[0..len]`.
///
/// # Safety
/// `clustering` must be a live handle; `out` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn drac_clustering_centers(
    clustering: *const DracClustering,
    out: *mut usize,
    len: usize,
) -> DracStatus {
    guard(|| {
        let c = non_null(clustering, "clustering")?;
        check_out(out, "out")?;
        check_buffer(len, c.inner.clusters.len())?;
        let dst = std::slice::from_raw_parts_mut(out, c.inner.clusters.len());
        for (d, cl) in dst.iter_mut().zip(&c.inner.clusters) {
            *d = cl.center;
        }
        Ok(())
    })
}

/// Similarity threshold used by cluster `cluster`.
///
/// # Safety
/// `clustering` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn drac_clustering_beta(
    clustering: *const DracClustering,
    cluster: usize,
    out: *mut f64,
) -> DracStatus {
    guard(|| {
        let c = non_null(clustering, "clustering")?;
        check_out(out, "out")?;
        let cl = c.inner.clusters.get(cluster).ok_or_else(|| {
            fail(
                DracStatus::IndexOutOfRange,
                format!("cluster {cluster} out of range for {} clusters", c.inner.clusters.len()),
            )
        })?;
        *out = cl.beta;
        Ok(())
    })
}

/// # Safety
/// `clustering` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn drac_clustering_free(clustering: *mut DracClustering) {
    if !clustering.is_null() {
        drop(Box::from_raw(clustering));
    }
}
