//! C interface to `orbital-core`.
//!
//! Every function returns an [`OrbitalStatus`]. On failure the message is kept
//! per thread and read with [`orbital_last_error_message`]. Models are opaque
//! handles created by `*_new` and released by the matching `*_free`.
//! Matrices are dense row-major `p * p` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use orbital_core::linalg::Matrix;
use orbital_core::rankings::{
    HierarchicalRankingModel, MallowsModel, Metric, Ranking, RankingFrame, RankingModel,
};
use orbital_core::rng::{stream, STREAM_RANKINGS, STREAM_STAR_RADIUS, STREAM_WISHART};
use orbital_core::starshaped::{Gauge, Radial, SignRule, StarShapedModel};
use orbital_core::wishart::{decompose, sample_pair, SymMatrix, WishartParams};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitalStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The input lies outside the sample space of the operation.
    Domain = 3,
    Numerical = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitalMetric {
    Kendall = 0,
    Cayley = 1,
    Hamming = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitalGauge {
    L2 = 0,
    /// Uses `gauge_param` as `q`.
    Lq = 1,
    /// Uses `gauge_matrix` as `A`.
    Ellipsoid = 2,
    /// Mean of the l2 and l4 norms.
    MixedL2L4 = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitalRadial {
    Gaussian = 0,
    Exponential = 1,
}

/// Opaque ranking model.
pub struct OrbitalRankingModel(RankingModel);

/// Opaque star-shaped model.
pub struct OrbitalStarModel(StarShapedModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(OrbitalStatus, String);

impl Failure {
    fn invalid(msg: impl Into<String>) -> Self {
        Failure(OrbitalStatus::InvalidArgument, msg.into())
    }

    fn null(what: &str) -> Self {
        Failure(OrbitalStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<orbital_core::rankings::RankingError> for Failure {
    fn from(e: orbital_core::rankings::RankingError) -> Self {
        Failure(OrbitalStatus::InvalidArgument, e.to_string())
    }
}

impl From<orbital_core::starshaped::StarError> for Failure {
    fn from(e: orbital_core::starshaped::StarError) -> Self {
        use orbital_core::starshaped::StarError as E;
        let status = match e {
            E::Origin | E::NotOnCrossSection | E::NotDifferentiable(_) => OrbitalStatus::Domain,
            E::Quadrature(_) | E::LowAcceptance(_) => OrbitalStatus::Numerical,
            _ => OrbitalStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<orbital_core::wishart::WishartError> for Failure {
    fn from(e: orbital_core::wishart::WishartError) -> Self {
        use orbital_core::wishart::WishartError as E;
        let status = match e {
            E::NotSpd { .. } | E::EigenGap { .. } | E::LambdaRange { .. } => OrbitalStatus::Domain,
            E::Linalg(_) => OrbitalStatus::Numerical,
            _ => OrbitalStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OrbitalStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            OrbitalStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            OrbitalStatus::Panic
        }
    }
}

unsafe fn input<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if ptr.is_null() {
        return Err(Failure::null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a, T>(ptr: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if ptr.is_null() {
        return Err(Failure::null(what));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

unsafe fn write_out<T>(ptr: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if ptr.is_null() {
        return Err(Failure::null(what));
    }
    ptr.write(value);
    Ok(())
}

fn square(values: &[f64], p: usize) -> Matrix {
    Matrix::from_fn(p, p, |i, j| values[i * p + j])
}

fn store(m: &Matrix, out: &mut [f64]) {
    let p = m.rows();
    for i in 0..p {
        for j in 0..m.cols() {
            out[i * p + j] = m[(i, j)];
        }
    }
}

/// Length in bytes of the last error message on this thread, excluding the
/// terminating nul; 0 when the last call succeeded.
#[no_mangle]
pub extern "C" fn orbital_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |s| s.as_bytes().len()))
}

/// Copies the last error message into `buf` (nul terminated, truncated to
/// `len - 1` bytes) and returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn orbital_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&b""[..], |s| s.as_bytes());
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Nul-terminated library version; static storage.
#[no_mangle]
pub extern "C" fn orbital_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Ranking model on `m` objects. `m_prime = 0` gives the Mallows family,
/// otherwise the hierarchical model of depth `m_prime`. `p_z` holds `m`
/// top-object probabilities.
///
/// # Safety
/// `p_z` must be valid for `m` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn orbital_ranking_model_new(
    m: usize,
    m_prime: usize,
    metric: OrbitalMetric,
    theta: f64,
    p_z: *const f64,
    out: *mut *mut OrbitalRankingModel,
) -> OrbitalStatus {
    guard(|| {
        let p_z = input(p_z, m, "p_z")?.to_vec();
        let metric = match metric {
            OrbitalMetric::Kendall => Metric::Kendall,
            OrbitalMetric::Cayley => Metric::Cayley,
            OrbitalMetric::Hamming => Metric::Hamming,
        };
        let frame = RankingFrame::new(m)?;
        let model = if m_prime == 0 {
            RankingModel::Mallows(MallowsModel::new(frame, metric, theta, p_z)?)
        } else {
            RankingModel::Hierarchical(HierarchicalRankingModel::new(
                frame.with_depth(m_prime)?,
                metric,
                theta,
                p_z,
            )?)
        };
        write_out(
            out,
            Box::into_raw(Box::new(OrbitalRankingModel(model))),
            "out",
        )
    })
}

/// # Safety
/// `model` must be null or a handle from [`orbital_ranking_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn orbital_ranking_model_free(model: *mut OrbitalRankingModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Probability of the ranking `ranks` (`ranks[k]` is the rank of object `k + 1`).
///
/// # Safety
/// `model` must be a live handle, `ranks` valid for `m` reads, `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn orbital_ranking_pmf(
    model: *const OrbitalRankingModel,
    ranks: *const usize,
    m: usize,
    out: *mut f64,
) -> OrbitalStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| Failure::null("model"))?;
        let ranks = input(ranks, m, "ranks")?;
        let p = model.0.pmf(&Ranking::new(ranks)?)?;
        write_out(out, p, "out")
    })
}

/// Writes `n` rankings drawn with `seed` into `out`, `m` ranks per row.
///
/// # Safety
/// `model` must be a live handle and `out` valid for `n * m` writes.
#[no_mangle]
pub unsafe extern "C" fn orbital_ranking_sample(
    model: *const OrbitalRankingModel,
    seed: u64,
    n: usize,
    out: *mut usize,
) -> OrbitalStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| Failure::null("model"))?;
        let m = model.0.frame().m();
        let out = output(out, n * m, "out")?;
        let mut rng = stream(seed, STREAM_RANKINGS);
        for (row, r) in out.chunks_mut(m).zip(model.0.sample(&mut rng, n)?) {
            row.copy_from_slice(r.ranks());
        }
        Ok(())
    })
}

/// `σ = h t s`: writes the images of `h` on ranks `m_prime+1..m`, of `t` on
/// ranks `2..m` and the top object of `σ`.
///
/// # Safety
/// `ranks` must be valid for `m` reads, `out_h` for `m - m_prime` writes,
/// `out_t` for `m - 1` writes and `out_top` for one write.
#[no_mangle]
pub unsafe extern "C" fn orbital_ranking_decompose(
    ranks: *const usize,
    m: usize,
    m_prime: usize,
    out_h: *mut usize,
    out_t: *mut usize,
    out_top: *mut usize,
) -> OrbitalStatus {
    guard(|| {
        let frame = RankingFrame::new(m)?.with_depth(m_prime)?;
        let sigma = Ranking::new(input(ranks, m, "ranks")?)?;
        let (h, t, s) = frame.decompose3(&sigma)?;
        output(out_h, m - m_prime, "out_h")?.copy_from_slice(h.images());
        output(out_t, m - 1, "out_t")?.copy_from_slice(t.images());
        write_out(out_top, s.top_object(), "out_top")
    })
}

/// Star-shaped model in `R^p` with the default sign rule.
///
/// # Safety
/// `gauge_matrix` must be valid for `p * p` reads when `gauge` is
/// `Ellipsoid` (it is ignored otherwise); `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn orbital_star_model_new(
    p: usize,
    gauge: OrbitalGauge,
    gauge_param: f64,
    gauge_matrix: *const f64,
    radial: OrbitalRadial,
    c: f64,
    out: *mut *mut OrbitalStarModel,
) -> OrbitalStatus {
    guard(|| {
        let gauge = match gauge {
            OrbitalGauge::L2 => Gauge::l2(p)?,
            OrbitalGauge::Lq => Gauge::lq(p, gauge_param)?,
            OrbitalGauge::Ellipsoid => {
                Gauge::ellipsoid(square(input(gauge_matrix, p * p, "gauge_matrix")?, p))?
            }
            OrbitalGauge::MixedL2L4 => Gauge::mixed_l2_l4(p)?,
        };
        let radial = match radial {
            OrbitalRadial::Gaussian => Radial::Gaussian,
            OrbitalRadial::Exponential => Radial::Exponential,
        };
        let model = StarShapedModel::new(gauge, SignRule::LastNonzero, radial, c)?;
        write_out(out, Box::into_raw(Box::new(OrbitalStarModel(model))), "out")
    })
}

/// # Safety
/// `model` must be null or a handle from [`orbital_star_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn orbital_star_model_free(model: *mut OrbitalStarModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// `x = ε h z`.
///
/// # Safety
/// `model` must be a live handle; `x` and `out_z` valid for `p` elements;
/// `out_eps` and `out_h` for one write.
#[no_mangle]
pub unsafe extern "C" fn orbital_star_decompose(
    model: *const OrbitalStarModel,
    x: *const f64,
    p: usize,
    out_eps: *mut f64,
    out_h: *mut f64,
    out_z: *mut f64,
) -> OrbitalStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| Failure::null("model"))?;
        let d = model.0.decompose(input(x, p, "x")?)?;
        output(out_z, p, "out_z")?.copy_from_slice(&d.z);
        write_out(out_eps, d.eps, "out_eps")?;
        write_out(out_h, d.h, "out_h")
    })
}

/// Unnormalized density `c(ε(x)) f(ρ(x))`.
///
/// # Safety
/// `model` must be a live handle, `x` valid for `p` reads, `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn orbital_star_density(
    model: *const OrbitalStarModel,
    x: *const f64,
    p: usize,
    out: *mut f64,
) -> OrbitalStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| Failure::null("model"))?;
        let v = model.0.density(input(x, p, "x")?)?;
        write_out(out, v, "out")
    })
}

/// Lebesgue mass of [`orbital_star_density`].
///
/// # Safety
/// `model` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn orbital_star_normalizing_constant(
    model: *const OrbitalStarModel,
    out: *mut f64,
) -> OrbitalStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| Failure::null("model"))?;
        write_out(out, model.0.normalizing_constant()?.total, "out")
    })
}

/// Writes `n` points drawn with `seed`, `p` coordinates per row.
///
/// # Safety
/// `model` must be a live handle and `out` valid for `n * p` writes.
#[no_mangle]
pub unsafe extern "C" fn orbital_star_sample(
    model: *const OrbitalStarModel,
    seed: u64,
    n: usize,
    out: *mut f64,
) -> OrbitalStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| Failure::null("model"))?;
        let p = model.0.p();
        let out = output(out, n * p, "out")?;
        let mut rng = stream(seed, STREAM_STAR_RADIUS);
        for (row, s) in out.chunks_mut(p).zip(model.0.sample(&mut rng, n)?) {
            row.copy_from_slice(&s.x);
        }
        Ok(())
    })
}

/// Draws one pair `W1 ~ W_p(n1, Σ)`, `W2 ~ W_p(n2, Σ)`. `sigma` may be null
/// for the identity.
///
/// # Safety
/// `sigma` must be null or valid for `p * p` reads; `out_w1` and `out_w2`
/// valid for `p * p` writes.
#[no_mangle]
pub unsafe extern "C" fn orbital_wishart_sample_pair(
    p: usize,
    n1: f64,
    n2: f64,
    sigma: *const f64,
    seed: u64,
    out_w1: *mut f64,
    out_w2: *mut f64,
) -> OrbitalStatus {
    guard(|| {
        let sigma = if sigma.is_null() {
            SymMatrix::identity(p)
        } else {
            SymMatrix::from_matrix(&square(input(sigma, p * p, "sigma")?, p))?
        };
        let params = WishartParams::from_df(p, n1, n2, sigma)?;
        let (w1, w2) = sample_pair(&params, &mut stream(seed, STREAM_WISHART))?;
        store(&w1.to_matrix(), output(out_w1, p * p, "out_w1")?);
        store(&w2.to_matrix(), output(out_w2, p * p, "out_w2")?);
        Ok(())
    })
}

/// `(W1, W2) = (T C Λ Cᵀ Tᵀ, T C (I − Λ) Cᵀ Tᵀ)` with `C` in canonical sign
/// form and `λ` descending.
///
/// # Safety
/// `w1`, `w2` must be valid for `p * p` reads; `out_t`, `out_c` for `p * p`
/// writes; `out_lambda` for `p` writes.
#[no_mangle]
pub unsafe extern "C" fn orbital_wishart_decompose(
    p: usize,
    w1: *const f64,
    w2: *const f64,
    out_t: *mut f64,
    out_c: *mut f64,
    out_lambda: *mut f64,
) -> OrbitalStatus {
    guard(|| {
        if p == 0 {
            return Err(Failure::invalid("p must be positive"));
        }
        let w1 = SymMatrix::from_matrix(&square(input(w1, p * p, "w1")?, p))?;
        let w2 = SymMatrix::from_matrix(&square(input(w2, p * p, "w2")?, p))?;
        let d = decompose(&w1, &w2)?;
        store(d.t.matrix(), output(out_t, p * p, "out_t")?);
        store(d.c.matrix(), output(out_c, p * p, "out_c")?);
        output(out_lambda, p, "out_lambda")?.copy_from_slice(&d.lambda);
        Ok(())
    })
}
