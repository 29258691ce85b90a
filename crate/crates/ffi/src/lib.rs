//! C ABI over `prs-core`.
//!
//! Every function returns a [`PrsStatus`]; on failure the message is kept
//! per thread and read with [`prs_last_error`]. Strings handed out must be
//! released with [`prs_string_free`], handles with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use prs_core::atlas::SurfaceFamily;
use prs_core::cech::{presentation, Sheaf, Truncation};
use prs_core::cli::{self, parse, RunConfig};
use prs_core::elliptic::EllipticParams;
use prs_core::exactalg::parse_rat;
use prs_core::poissonco::{poisson_cohomology, verdict, PoissonStructure, Verdict};
use prs_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidParameters = 3,
    OrderOnePole = 4,
    UntrustedWindow = 5,
    IllFormedSection = 6,
    SingularTransition = 7,
    FrameMismatch = 8,
    InconsistentFamily = 9,
    Parse = 10,
    Arity = 11,
    InvalidStructure = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrsVerdict {
    Obstructed = 0,
    Unobstructed = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrsSheaf {
    Theta = 0,
    Wedge2Theta = 1,
}

/// A ruled surface together with its default truncation.
pub struct PrsSurface {
    family: SurfaceFamily,
    tr: Truncation,
}

/// A Poisson structure on a surface.
pub struct PrsPoisson {
    p: PoissonStructure,
    tr: Truncation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PrsStatus {
    match e {
        Error::InvalidParameters(_) => PrsStatus::InvalidParameters,
        Error::OrderOnePole { .. } => PrsStatus::OrderOnePole,
        Error::UntrustedWindow { .. } => PrsStatus::UntrustedWindow,
        Error::IllFormedSection(_) => PrsStatus::IllFormedSection,
        Error::SingularTransition(_) => PrsStatus::SingularTransition,
        Error::FrameMismatch(_) => PrsStatus::FrameMismatch,
        Error::InconsistentFamily(_) => PrsStatus::InconsistentFamily,
        Error::Parse(_) => PrsStatus::Parse,
        Error::Arity(_) => PrsStatus::Arity,
        Error::InvalidStructure(_) => PrsStatus::InvalidStructure,
    }
}

enum Fail {
    Status(PrsStatus, String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> PrsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PrsStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            PrsStatus::Panic
        }
    }
}

unsafe fn opt_str<'a>(p: *const c_char) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| Fail::Status(PrsStatus::InvalidUtf8, "string is not valid UTF-8".into()))
}

unsafe fn req_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    opt_str(p)?.ok_or_else(|| Fail::Status(PrsStatus::NullPointer, format!("{} is null", name)))
}

fn null(name: &str) -> Fail {
    Fail::Status(PrsStatus::NullPointer, format!("{} is null", name))
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul removed").into_raw()
}

/// Message of the last failure on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn prs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn prs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a surface. `family` is one of `s0`, `twisted`, `sn`, `a0`, `am1`;
/// `n` is used by `sn`, `t0` by `twisted`; null `g2`/`g3` select the
/// default curve.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prs_surface_new(
    family: *const c_char,
    n: u32,
    t0: *const c_char,
    g2: *const c_char,
    g3: *const c_char,
    out: *mut *mut PrsSurface,
) -> PrsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let e = match (opt_str(g2)?, opt_str(g3)?) {
            (None, None) => EllipticParams::default(),
            (Some(a), Some(b)) => EllipticParams::new(parse_rat(a)?, parse_rat(b)?)?,
            _ => return Err(Fail::Status(PrsStatus::InvalidParameters, "give both g2 and g3 or neither".into())),
        };
        let family = match req_str(family, "family")? {
            "s0" => SurfaceFamily::s0(e),
            "twisted" => SurfaceFamily::twisted(parse_rat(req_str(t0, "t0")?)?, e)?,
            "sn" => SurfaceFamily::sn(n, e)?,
            "a0" => SurfaceFamily::a0(e),
            "am1" => SurfaceFamily::aminus1(e),
            other => return Err(Fail::Status(PrsStatus::InvalidParameters, format!("unknown family {:?}", other))),
        };
        let tr = Truncation::default_for(&family);
        *out = Box::into_raw(Box::new(PrsSurface { family, tr }));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or come from [`prs_surface_new`].
#[no_mangle]
pub unsafe extern "C" fn prs_surface_free(s: *mut PrsSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// `h0` and `h1` of a sheaf on the surface.
///
/// # Safety
/// `s` must be a live handle; `h0`, `h1` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prs_sheaf_dims(s: *const PrsSurface, sheaf: PrsSheaf, h0: *mut usize, h1: *mut usize) -> PrsStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("surface"))?;
        if h0.is_null() || h1.is_null() {
            return Err(null("h0/h1"));
        }
        let sheaf = match sheaf {
            PrsSheaf::Theta => Sheaf::Theta,
            PrsSheaf::Wedge2Theta => Sheaf::Wedge2Theta,
        };
        let p = presentation(&s.family, sheaf, &s.tr)?;
        *h0 = p.h0_dim();
        *h1 = p.h1_dim();
        Ok(())
    })
}

/// Creates a Poisson structure from a coefficient list such as
/// `A=1,B=0,C=2/3`.
///
/// # Safety
/// `s` must be a live handle, `coeffs` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn prs_poisson_new(s: *const PrsSurface, coeffs: *const c_char, out: *mut *mut PrsPoisson) -> PrsStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("surface"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = parse::parse_coeffs(&s.family, opt_str(coeffs)?.unwrap_or(""))?;
        *out = Box::into_raw(Box::new(PrsPoisson { p, tr: s.tr }));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or come from [`prs_poisson_new`].
#[no_mangle]
pub unsafe extern "C" fn prs_poisson_free(p: *mut PrsPoisson) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes `(HP0, HP1, HP2)` into `hp[0..3]`.
///
/// # Safety
/// `p` must be a live handle and `hp` point to three writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn prs_poisson_cohomology(p: *const PrsPoisson, hp: *mut usize) -> PrsStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("poisson"))?;
        if hp.is_null() {
            return Err(null("hp"));
        }
        let c = poisson_cohomology(&p.p, &p.tr)?;
        std::slice::from_raw_parts_mut(hp, 3).copy_from_slice(&c.hp);
        Ok(())
    })
}

/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn prs_poisson_verdict(p: *const PrsPoisson, out: *mut PrsVerdict) -> PrsStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("poisson"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = match verdict(&p.p, &p.tr)? {
            Verdict::Obstructed => PrsVerdict::Obstructed,
            Verdict::Unobstructed => PrsVerdict::Unobstructed,
            Verdict::Inconclusive => PrsVerdict::Inconclusive,
        };
        Ok(())
    })
}

/// Bracket of two field expressions in chart 0 or 1; with `reduce` the
/// chart-1 class is appended.
///
/// # Safety
/// `s` must be a live handle, strings NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn prs_bracket(
    s: *const PrsSurface,
    lhs: *const c_char,
    rhs: *const c_char,
    chart: u8,
    reduce: bool,
    out: *mut *mut c_char,
) -> PrsStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("surface"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = cli::cmd_bracket(&s.family, req_str(lhs, "lhs")?, req_str(rhs, "rhs")?, chart, reduce, &s.tr)?;
        *out = to_c(text);
        Ok(())
    })
}

/// Reproduces the classification table as JSON; `passed` reports whether
/// every row matched.
///
/// # Safety
/// `out` and `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prs_table_json(n_max: u32, samples: usize, seed: u64, out: *mut *mut c_char, passed: *mut bool) -> PrsStatus {
    guard(|| {
        if out.is_null() || passed.is_null() {
            return Err(null("out/passed"));
        }
        let cfg = RunConfig { n_max, samples, seed, ..RunConfig::default() };
        cfg.validate()?;
        let report = cli::cmd_table(&cfg)?;
        *passed = report.passed();
        *out = to_c(report.to_json());
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn round_trip_through_handles() {
        unsafe {
            let mut s = ptr::null_mut();
            assert_eq!(prs_surface_new(cs("s0").as_ptr(), 0, ptr::null(), ptr::null(), ptr::null(), &mut s), PrsStatus::Ok);
            let (mut h0, mut h1) = (0, 0);
            assert_eq!(prs_sheaf_dims(s, PrsSheaf::Theta, &mut h0, &mut h1), PrsStatus::Ok);
            assert_eq!((h0, h1), (4, 4));
            let mut p = ptr::null_mut();
            assert_eq!(prs_poisson_new(s, cs("A=0,B=0,C=0").as_ptr(), &mut p), PrsStatus::Ok);
            let mut hp = [0usize; 3];
            assert_eq!(prs_poisson_cohomology(p, hp.as_mut_ptr()), PrsStatus::Ok);
            assert_eq!(hp, [4, 7, 3]);
            let mut v = PrsVerdict::Inconclusive;
            assert_eq!(prs_poisson_verdict(p, &mut v), PrsStatus::Ok);
            assert_eq!(v, PrsVerdict::Obstructed);
            let mut text = ptr::null_mut();
            let st = prs_bracket(s, cs("d_xi^d_u").as_ptr(), cs("xi d_xi").as_ptr(), 0, false, &mut text);
            assert_eq!(st, PrsStatus::Ok);
            assert_eq!(CStr::from_ptr(text).to_str().unwrap(), "d_xi^d_u\n");
            prs_string_free(text);
            prs_poisson_free(p);
            prs_surface_free(s);
        }
    }

    #[test]
    fn errors_are_reported() {
        unsafe {
            let mut s = ptr::null_mut();
            assert_eq!(prs_surface_new(cs("sn").as_ptr(), 2, ptr::null(), ptr::null(), ptr::null(), &mut s), PrsStatus::Ok);
            let mut p = ptr::null_mut();
            assert_eq!(prs_poisson_new(s, cs("a0=1").as_ptr(), &mut p), PrsStatus::Arity);
            let msg = CStr::from_ptr(prs_last_error()).to_str().unwrap();
            assert!(msg.contains("a0, c0, c1"), "{}", msg);
            assert_eq!(prs_poisson_cohomology(ptr::null(), ptr::null_mut()), PrsStatus::NullPointer);
            let mut bad = ptr::null_mut();
            let st = prs_surface_new(cs("twisted").as_ptr(), 0, cs("0").as_ptr(), ptr::null(), ptr::null(), &mut bad);
            assert_eq!(st, PrsStatus::InvalidParameters);
            prs_surface_free(s);
        }
    }
}
