//! C ABI over `etquant`.
//!
//! Every fallible function returns an [`EtStatus`] and writes its result
//! through out-pointers. On failure the message is kept in a thread-local
//! buffer readable with [`et_last_error`]. Handles are opaque and must be
//! released with the matching `*_free` function.
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the access implied by their
//! type: handles must come from this library and not yet be freed, strings
//! must be NUL-terminated, and out-pointers must be writable. Null pointers
//! are reported as [`EtStatus::NullPointer`]. A handle must not be used from
//! two threads at once.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use etquant::error::Error;
use etquant::exact::{enumerate, exact_family, EnumerationOptions, SupportTable};
use etquant::geometry::{self, Direction, RayClassification};
use etquant::graph::{self, DensityPoint, Graph};
use etquant::harness::turan_mode_check;
use etquant::mcmc::{self, Init, SamplerConfig, Trajectory};
use etquant::rational::{to_f64, Scalar};
use etquant::variational::{self, ExtremalClass, Limit, Line};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    Domain = 3,
    Feasibility = 4,
    Config = 5,
    Parse = 6,
    Io = 7,
    OutOfRange = 8,
    Panic = 9,
}

/// Opaque graph handle.
pub struct EtGraph(Graph);

/// Opaque `(E, T)` support table handle.
pub struct EtSupportTable(SupportTable);

/// Opaque sampler trajectory handle.
pub struct EtTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(EtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => EtStatus::Domain,
            Error::Feasibility { .. } => EtStatus::Feasibility,
            Error::Config(_) => EtStatus::Config,
            Error::Parse(_) => EtStatus::Parse,
            Error::Io(_) => EtStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: EtStatus, msg: &str) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            EtStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            EtStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().map_or_else(|| fail(EtStatus::NullPointer, "null output pointer"), Ok)
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().map_or_else(|| fail(EtStatus::NullPointer, "null handle"), Ok)
}

unsafe fn handle_mut<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().map_or_else(|| fail(EtStatus::NullPointer, "null handle"), Ok)
}

unsafe fn string<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(EtStatus::NullPointer, "null string");
    }
    CStr::from_ptr(p).to_str().or_else(|_| fail(EtStatus::InvalidString, "string is not UTF-8"))
}

unsafe fn scalar(p: *const c_char) -> Result<Scalar, Failure> {
    Ok(string(p)?.parse::<Scalar>()?)
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library.
#[no_mangle]
pub extern "C" fn et_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Empty graph on `n` nodes.
#[no_mangle]
pub unsafe extern "C" fn et_graph_new(n: usize, out_graph: *mut *mut EtGraph) -> EtStatus {
    guard(|| {
        let slot = out(out_graph)?;
        *slot = Box::into_raw(Box::new(EtGraph(Graph::empty(n)?)));
        Ok(())
    })
}

/// Turán graph `T(n, r)`.
#[no_mangle]
pub unsafe extern "C" fn et_graph_turan(n: usize, r: usize, out_graph: *mut *mut EtGraph) -> EtStatus {
    guard(|| {
        let slot = out(out_graph)?;
        *slot = Box::into_raw(Box::new(EtGraph(graph::turan_graph(n, r)?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn et_graph_free(g: *mut EtGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

#[no_mangle]
pub unsafe extern "C" fn et_graph_node_count(g: *const EtGraph, out_n: *mut usize) -> EtStatus {
    guard(|| {
        *out(out_n)? = handle(g)?.0.node_count();
        Ok(())
    })
}

/// Toggles the pair `{i, j}` and reports the edge and triangle count changes.
#[no_mangle]
pub unsafe extern "C" fn et_graph_flip(g: *mut EtGraph, i: usize, j: usize, out_de: *mut i8, out_dt: *mut i64) -> EtStatus {
    guard(|| {
        let (de, dt) = (out(out_de)?, out(out_dt)?);
        (*de, *dt) = handle_mut(g)?.0.flip_edge(i, j)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn et_graph_counts(g: *const EtGraph, out_edges: *mut u64, out_triangles: *mut u64) -> EtStatus {
    guard(|| {
        let g = &handle(g)?.0;
        *out(out_edges)? = g.edge_count();
        *out(out_triangles)? = g.triangle_count();
        Ok(())
    })
}

/// Edge and triangle homomorphism densities `(2E/n², 6T/n³)`.
#[no_mangle]
pub unsafe extern "C" fn et_graph_densities(g: *const EtGraph, out_e: *mut f64, out_t: *mut f64) -> EtStatus {
    guard(|| {
        let (e, t) = handle(g)?.0.densities().to_f64();
        *out(out_e)? = e;
        *out(out_t)? = t;
        Ok(())
    })
}

/// Unnormalized log-probability `2β1E + 6β2T/n`.
#[no_mangle]
pub unsafe extern "C" fn et_graph_log_weight(g: *const EtGraph, beta1: f64, beta2: f64, out_w: *mut f64) -> EtStatus {
    guard(|| {
        *out(out_w)? = mcmc::log_weight(&handle(g)?.0, (beta1, beta2));
        Ok(())
    })
}

/// The extreme point `v_k = (k/(k+1), k(k-1)/(k+1)²)`.
#[no_mangle]
pub unsafe extern "C" fn et_v_k(k: u64, out_e: *mut f64, out_t: *mut f64) -> EtStatus {
    guard(|| {
        let (e, t) = geometry::v_k(k).to_f64();
        *out(out_e)? = e;
        *out(out_t)? = t;
        Ok(())
    })
}

/// Critical slope `a_k = -k(3k+5)/((k+1)(k+2))`.
#[no_mangle]
pub unsafe extern "C" fn et_a_k(k: u64, out_a: *mut f64) -> EtStatus {
    guard(|| {
        *out(out_a)? = to_f64(&geometry::a_k(k));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn et_razborov_lower(e: f64, out_t: *mut f64) -> EtStatus {
    guard(|| {
        *out(out_t)? = geometry::razborov_lower(e)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn et_kk_upper(e: f64, out_t: *mut f64) -> EtStatus {
    guard(|| {
        *out(out_t)? = geometry::kk_upper(e)?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtRayKind {
    InteriorCone = 0,
    InteriorConeAtOne = 1,
    CriticalRay = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtClassKind {
    Undetermined = 0,
    Empty = 1,
    Complete = 2,
    EmptyOrComplete = 3,
    DilutedBipartite = 4,
    Turan = 5,
    TuranPair = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtExtremalClass {
    pub kind: EtClassKind,
    /// Class counts for `Turan` (first entry) and `TuranPair`.
    pub classes: [u64; 2],
    /// Edge retention for `DilutedBipartite`.
    pub p: f64,
}

impl From<Option<ExtremalClass>> for EtExtremalClass {
    fn from(c: Option<ExtremalClass>) -> Self {
        let mut r = EtExtremalClass { kind: EtClassKind::Undetermined, classes: [0, 0], p: 0.0 };
        match c {
            None => {}
            Some(ExtremalClass::Empty) => r.kind = EtClassKind::Empty,
            Some(ExtremalClass::Complete) => r.kind = EtClassKind::Complete,
            Some(ExtremalClass::EmptyOrComplete) => r.kind = EtClassKind::EmptyOrComplete,
            Some(ExtremalClass::DilutedBipartite { p }) => {
                r.kind = EtClassKind::DilutedBipartite;
                r.p = p;
            }
            Some(ExtremalClass::TuranClass { classes }) => {
                r.kind = EtClassKind::Turan;
                r.classes[0] = classes;
            }
            Some(ExtremalClass::TuranPair { classes }) => {
                r.kind = EtClassKind::TuranPair;
                r.classes = classes;
            }
        }
        r
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtDirectionResult {
    pub ray: EtRayKind,
    /// Cone or critical ray index; unused for `InteriorConeAtOne`.
    pub k: i64,
    pub exact: bool,
    pub has_near_critical: bool,
    pub near_critical: i64,
    pub has_side: bool,
    pub side: i8,
    pub extremal: EtExtremalClass,
}

/// Classifies the direction `(x, y)`, given as decimal or fraction strings.
/// `beta1` and `beta2` may both be null; otherwise they give the base point
/// used to resolve critical rays.
#[no_mangle]
pub unsafe extern "C" fn et_classify_direction(
    x: *const c_char,
    y: *const c_char,
    beta1: *const c_char,
    beta2: *const c_char,
    out_result: *mut EtDirectionResult,
) -> EtStatus {
    guard(|| {
        let slot = out(out_result)?;
        let o = Direction::new(scalar(x)?, scalar(y)?)?;
        let beta = match (beta1.is_null(), beta2.is_null()) {
            (true, true) => None,
            (false, false) => Some((scalar(beta1)?, scalar(beta2)?)),
            _ => return fail(EtStatus::NullPointer, "give both beta components or neither"),
        };
        let d = variational::direction_limit(&o, beta)?;
        let (ray, k) = match d.report.classification {
            RayClassification::InteriorCone(k) => (EtRayKind::InteriorCone, k as i64),
            RayClassification::InteriorConeAtOne => (EtRayKind::InteriorConeAtOne, 0),
            RayClassification::CriticalRay(k) => (EtRayKind::CriticalRay, k),
        };
        *slot = EtDirectionResult {
            ray,
            k,
            exact: d.report.exact,
            has_near_critical: d.report.near_critical.is_some(),
            near_critical: d.report.near_critical.unwrap_or(0),
            has_side: d.side.is_some(),
            side: d.side.unwrap_or(0),
            extremal: d.class.into(),
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtLineResult {
    pub extremal: EtExtremalClass,
    pub near_critical: bool,
    pub nearest_has_k: bool,
    pub nearest_k: u64,
    pub nearest_slope: f64,
    pub nearest_distance: f64,
}

/// Classifies the line `β1 = a β2 + b` as `β2 → +∞` (`limit_sign > 0`) or
/// `β2 → -∞` (`limit_sign < 0`).
#[no_mangle]
pub unsafe extern "C" fn et_classify_line(
    a: *const c_char,
    b: *const c_char,
    limit_sign: i32,
    out_result: *mut EtLineResult,
) -> EtStatus {
    guard(|| {
        let slot = out(out_result)?;
        let limit = match limit_sign {
            s if s > 0 => Limit::PlusInfinity,
            s if s < 0 => Limit::MinusInfinity,
            _ => return fail(EtStatus::Domain, "limit_sign must be nonzero"),
        };
        let r = variational::classify_line(&Line { a: scalar(a)?, b: scalar(b)?, limit })?;
        *slot = EtLineResult {
            extremal: Some(r.class).into(),
            near_critical: r.near_critical,
            nearest_has_k: r.nearest_critical.k.is_some(),
            nearest_k: r.nearest_critical.k.unwrap_or(0),
            nearest_slope: r.nearest_critical.slope,
            nearest_distance: r.nearest_critical.distance,
        };
        Ok(())
    })
}

/// Enumerates all labeled graphs on `n <= 7` nodes (`n = 8` with
/// `allow_long`).
#[no_mangle]
pub unsafe extern "C" fn et_support_enumerate(n: usize, allow_long: bool, out_table: *mut *mut EtSupportTable) -> EtStatus {
    guard(|| {
        let slot = out(out_table)?;
        let en = enumerate(n, EnumerationOptions { allow_long }, None)?;
        *slot = Box::into_raw(Box::new(EtSupportTable(en.table)));
        Ok(())
    })
}

/// Loads a support table written by `etquant enumerate`.
#[no_mangle]
pub unsafe extern "C" fn et_support_read_csv(path: *const c_char, out_table: *mut *mut EtSupportTable) -> EtStatus {
    guard(|| {
        let slot = out(out_table)?;
        let file = std::fs::File::open(string(path)?).map_err(Error::from)?;
        *slot = Box::into_raw(Box::new(EtSupportTable(SupportTable::read_csv(file)?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn et_support_free(t: *mut EtSupportTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of distinct `(E, T)` points.
#[no_mangle]
pub unsafe extern "C" fn et_support_len(t: *const EtSupportTable, out_len: *mut usize) -> EtStatus {
    guard(|| {
        *out(out_len)? = handle(t)?.0.len();
        Ok(())
    })
}

/// The `index`-th support point in `(E, T)` order with its graph count.
#[no_mangle]
pub unsafe extern "C" fn et_support_entry(
    t: *const EtSupportTable,
    index: usize,
    out_edges: *mut u64,
    out_triangles: *mut u64,
    out_count: *mut u64,
) -> EtStatus {
    guard(|| {
        let t = &handle(t)?.0;
        let Some((e, tr, c)) = t.entries().nth(index) else {
            return fail(EtStatus::OutOfRange, "support index out of range");
        };
        *out(out_edges)? = e;
        *out(out_triangles)? = tr;
        *out(out_count)? = c;
        Ok(())
    })
}

/// `P_{n,β}` of the support point with the given counts; zero off the support.
#[no_mangle]
pub unsafe extern "C" fn et_family_prob(
    t: *const EtSupportTable,
    beta1: f64,
    beta2: f64,
    edges: u64,
    triangles: u64,
    out_p: *mut f64,
) -> EtStatus {
    guard(|| {
        let t = &handle(t)?.0;
        let slot = out(out_p)?;
        let fam = exact_family(t, (beta1, beta2))?;
        *slot = fam.distribution.prob(&DensityPoint::from_counts(t.n(), edges, triangles));
        Ok(())
    })
}

/// Log-normalizer `ln Σ ν(x) exp(n²⟨β, x⟩)`.
#[no_mangle]
pub unsafe extern "C" fn et_family_log_normalizer(t: *const EtSupportTable, beta1: f64, beta2: f64, out_z: *mut f64) -> EtStatus {
    guard(|| {
        let t = &handle(t)?.0;
        *out(out_z)? = exact_family(t, (beta1, beta2))?.log_normalizer;
        Ok(())
    })
}

/// Mean of the densities under `P_{n,β}`.
#[no_mangle]
pub unsafe extern "C" fn et_family_mean(
    t: *const EtSupportTable,
    beta1: f64,
    beta2: f64,
    out_e: *mut f64,
    out_t: *mut f64,
) -> EtStatus {
    guard(|| {
        let t = &handle(t)?.0;
        let (e, tt) = exact_family(t, (beta1, beta2))?.mean();
        *out(out_e)? = e;
        *out(out_t)? = tt;
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtSamplerConfig {
    pub n: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub steps: u64,
    pub seed: u64,
    pub thin: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtRecord {
    pub step: u64,
    pub e: f64,
    pub t: f64,
    pub accepted_frac: f64,
}

/// Runs a Metropolis chain. `init` is `empty`, `complete`, `turan:R` or
/// `random:P`.
#[no_mangle]
pub unsafe extern "C" fn et_sample(
    config: *const EtSamplerConfig,
    init: *const c_char,
    out_trajectory: *mut *mut EtTrajectory,
) -> EtStatus {
    guard(|| {
        let c = *handle(config)?;
        let slot = out(out_trajectory)?;
        let init: Init = string(init)?.parse()?;
        let cfg = SamplerConfig { n: c.n, beta: (c.beta1, c.beta2), steps: c.steps, seed: c.seed, init, thin: c.thin };
        *slot = Box::into_raw(Box::new(EtTrajectory(mcmc::run(&cfg)?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn et_trajectory_free(t: *mut EtTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

#[no_mangle]
pub unsafe extern "C" fn et_trajectory_len(t: *const EtTrajectory, out_len: *mut usize) -> EtStatus {
    guard(|| {
        *out(out_len)? = handle(t)?.0.records.len();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn et_trajectory_record(t: *const EtTrajectory, index: usize, out_record: *mut EtRecord) -> EtStatus {
    guard(|| {
        let Some(r) = handle(t)?.0.records.get(index) else {
            return fail(EtStatus::OutOfRange, "record index out of range");
        };
        *out(out_record)? = EtRecord { step: r.step, e: r.e, t: r.t, accepted_frac: r.accepted_frac };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn et_trajectory_acceptance_rate(t: *const EtTrajectory, out_rate: *mut f64) -> EtStatus {
    guard(|| {
        *out(out_rate)? = handle(t)?.0.acceptance_rate;
        Ok(())
    })
}

/// Copy of the chain's final graph, owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn et_trajectory_final_graph(t: *const EtTrajectory, out_graph: *mut *mut EtGraph) -> EtStatus {
    guard(|| {
        let g = handle(t)?.0.final_graph.clone();
        *out(out_graph)? = Box::into_raw(Box::new(EtGraph(g)));
        Ok(())
    })
}

/// Class count `r` maximizing `log_weight(T(n, r)) + ln ν(T(n, r))`.
#[no_mangle]
pub unsafe extern "C" fn et_mode_check(n: usize, beta1: f64, beta2: f64, out_r: *mut usize) -> EtStatus {
    guard(|| {
        let slot = out(out_r)?;
        *slot = turan_mode_check(n, (beta1, beta2))?.r_star;
        Ok(())
    })
}
