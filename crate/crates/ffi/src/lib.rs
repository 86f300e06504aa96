//! C ABI over the `hyperentm` core library.
//!
//! Objects are opaque handles created by `he_*_new`/`he_*_load` style
//! functions and released with the matching `he_*_free`. Every fallible
//! function returns an [`HeStatus`]; on failure a message is available from
//! [`he_last_error`] on the same thread. Panics are caught at the boundary.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use hyperentm::copytask::Battery;
use hyperentm::cppn::{aligned_copy_cppn, locality_seed, Cppn, CppnQuery};
use hyperentm::engine::build_controller;
use hyperentm::entm::{MemoryTape, TmControls};
use hyperentm::neat::{Genome, GenomeKind};
use hyperentm::network::Network;
use hyperentm::{rng, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    InvalidGenome = 4,
    Contract = 5,
    Config = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeGenomeKind {
    Direct = 0,
    Cppn = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeBattery {
    /// 50 episodes, lengths 1..=10.
    Training = 0,
    /// 100 episodes, lengths 1..=10.
    Generalization = 1,
    /// 50 episodes of length 100.
    Long = 2,
}

/// Raw CPPN outputs for one query.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HeCppnResponse {
    pub weight: f64,
    pub leo: f64,
    pub bias: f64,
}

/// Opaque genome handle.
pub struct HeGenome(Genome);
/// Opaque network handle.
pub struct HeNetwork {
    net: Network,
    scratch: Vec<f64>,
}
/// Opaque memory tape handle.
pub struct HeTape(MemoryTape);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(HeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Config(_) => HeStatus::Config,
            Error::Contract(_) => HeStatus::Contract,
            Error::InvalidGenome(_) | Error::Json(_) => HeStatus::InvalidGenome,
            Error::Io { .. } | Error::Csv(_) | Error::Checkpoint(_) => HeStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: HeStatus, msg: &str) -> Result<T, Failure> {
    Err(Failure(status, msg.to_string()))
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HeStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            HeStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().map_or_else(|| fail(HeStatus::NullPointer, "null handle"), Ok)
}

unsafe fn deref_mut<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().map_or_else(|| fail(HeStatus::NullPointer, "null handle"), Ok)
}

unsafe fn slice<'a>(p: *const f64, len: usize) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(HeStatus::NullPointer, "null buffer");
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return fail(HeStatus::NullPointer, "null buffer");
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return fail(HeStatus::NullPointer, "null output pointer");
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn he_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a genome JSON file.
#[no_mangle]
pub unsafe extern "C" fn he_genome_load(path: *const c_char, out: *mut *mut HeGenome) -> HeStatus {
    guard(|| {
        if path.is_null() {
            return fail(HeStatus::NullPointer, "null path");
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure(HeStatus::InvalidArgument, "path is not UTF-8".into()))?;
        let g = Genome::load(Path::new(path))?;
        put(out, Box::into_raw(Box::new(HeGenome(g))))
    })
}

/// Parses a genome from JSON text.
#[no_mangle]
pub unsafe extern "C" fn he_genome_from_json(json: *const c_char, out: *mut *mut HeGenome) -> HeStatus {
    guard(|| {
        if json.is_null() {
            return fail(HeStatus::NullPointer, "null json");
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Failure(HeStatus::InvalidArgument, "json is not UTF-8".into()))?;
        let g = Genome::from_json(text)?;
        put(out, Box::into_raw(Box::new(HeGenome(g))))
    })
}

/// The locality-seed CPPN.
#[no_mangle]
pub unsafe extern "C" fn he_genome_locality_seed(out: *mut *mut HeGenome) -> HeStatus {
    guard(|| put(out, Box::into_raw(Box::new(HeGenome(locality_seed())))))
}

/// A hand-built CPPN that solves the copy task at every bit size.
#[no_mangle]
pub unsafe extern "C" fn he_genome_aligned_copy(out: *mut *mut HeGenome) -> HeStatus {
    guard(|| put(out, Box::into_raw(Box::new(HeGenome(aligned_copy_cppn())))))
}

#[no_mangle]
pub unsafe extern "C" fn he_genome_kind(genome: *const HeGenome, out: *mut HeGenomeKind) -> HeStatus {
    guard(|| {
        let kind = match deref(genome)?.0.kind() {
            GenomeKind::Direct => HeGenomeKind::Direct,
            GenomeKind::Cppn => HeGenomeKind::Cppn,
        };
        put(out, kind)
    })
}

/// Number of connection genes.
#[no_mangle]
pub unsafe extern "C" fn he_genome_complexity(genome: *const HeGenome, out: *mut usize) -> HeStatus {
    guard(|| put(out, deref(genome)?.0.complexity()))
}

/// Serialises a genome; release the string with [`he_string_free`].
#[no_mangle]
pub unsafe extern "C" fn he_genome_to_json(genome: *const HeGenome, out: *mut *mut c_char) -> HeStatus {
    guard(|| {
        let json = CString::new(deref(genome)?.0.to_json()).expect("JSON has no nul bytes");
        put(out, json.into_raw())
    })
}

#[no_mangle]
pub unsafe extern "C" fn he_genome_free(genome: *mut HeGenome) {
    if !genome.is_null() {
        drop(Box::from_raw(genome));
    }
}

#[no_mangle]
pub unsafe extern "C" fn he_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Queries a CPPN genome for the connection from `(x1, y1, z1)` to `(x2, y2, z2)`.
#[no_mangle]
pub unsafe extern "C" fn he_cppn_query(
    genome: *const HeGenome,
    x1: f64,
    y1: f64,
    z1: f64,
    x2: f64,
    y2: f64,
    z2: f64,
    out: *mut HeCppnResponse,
) -> HeStatus {
    guard(|| {
        let cppn = Cppn::new(&deref(genome)?.0)?;
        let r = cppn.query(&CppnQuery::new([x1, y1, z1], [x2, y2, z2]));
        put(
            out,
            HeCppnResponse {
                weight: r.weight_raw,
                leo: r.leo_raw,
                bias: r.bias_raw,
            },
        )
    })
}

/// Builds a copy-task controller for `bits`: a CPPN is synthesised over the
/// substrate, a direct genome is decoded (and must match `bits`).
#[no_mangle]
pub unsafe extern "C" fn he_network_build(
    genome: *const HeGenome,
    bits: usize,
    out: *mut *mut HeNetwork,
) -> HeStatus {
    guard(|| {
        let net = build_controller(&deref(genome)?.0, bits)?;
        put(
            out,
            Box::into_raw(Box::new(HeNetwork {
                net,
                scratch: Vec::new(),
            })),
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn he_network_input_count(net: *const HeNetwork, out: *mut usize) -> HeStatus {
    guard(|| put(out, deref(net)?.net.input_count()))
}

#[no_mangle]
pub unsafe extern "C" fn he_network_output_count(net: *const HeNetwork, out: *mut usize) -> HeStatus {
    guard(|| put(out, deref(net)?.net.output_count()))
}

#[no_mangle]
pub unsafe extern "C" fn he_network_connection_count(net: *const HeNetwork, out: *mut usize) -> HeStatus {
    guard(|| put(out, deref(net)?.net.connection_count()))
}

/// One forward pass. Buffer lengths must equal the network's arity.
#[no_mangle]
pub unsafe extern "C" fn he_network_activate(
    net: *mut HeNetwork,
    inputs: *const f64,
    input_len: usize,
    outputs: *mut f64,
    output_len: usize,
) -> HeStatus {
    guard(|| {
        let n = deref_mut(net)?;
        if input_len != n.net.input_count() || output_len != n.net.output_count() {
            return fail(
                HeStatus::Contract,
                &format!(
                    "network has {} inputs and {} outputs, got buffers of {input_len} and {output_len}",
                    n.net.input_count(),
                    n.net.output_count()
                ),
            );
        }
        let inputs = slice(inputs, input_len)?;
        let outputs = slice_mut(outputs, output_len)?;
        n.net.activate(inputs, &mut n.scratch, outputs);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn he_network_free(net: *mut HeNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// A fresh tape: one zero cell of `width` values, head at 0.
#[no_mangle]
pub unsafe extern "C" fn he_tape_new(width: usize, out: *mut *mut HeTape) -> HeStatus {
    guard(|| {
        if width == 0 {
            return fail(HeStatus::InvalidArgument, "tape width must be at least 1");
        }
        put(out, Box::into_raw(Box::new(HeTape(MemoryTape::new(width)))))
    })
}

/// Write, content jump, shift, then read into `read_out`.
#[no_mangle]
pub unsafe extern "C" fn he_tape_step(
    tape: *mut HeTape,
    write: *const f64,
    width: usize,
    interp: f64,
    jump: f64,
    shift_left: f64,
    shift_stay: f64,
    shift_right: f64,
    read_out: *mut f64,
) -> HeStatus {
    guard(|| {
        let t = deref_mut(tape)?;
        if width != t.0.width() {
            return fail(
                HeStatus::Contract,
                &format!("tape width is {}, got {width}", t.0.width()),
            );
        }
        let controls = TmControls {
            write: slice(write, width)?,
            interp,
            jump,
            shift_left,
            shift_stay,
            shift_right,
        };
        let read = t.0.step(&controls)?;
        slice_mut(read_out, width)?.copy_from_slice(read);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn he_tape_len(tape: *const HeTape, out: *mut usize) -> HeStatus {
    guard(|| put(out, deref(tape)?.0.len()))
}

#[no_mangle]
pub unsafe extern "C" fn he_tape_head(tape: *const HeTape, out: *mut usize) -> HeStatus {
    guard(|| put(out, deref(tape)?.0.head()))
}

#[no_mangle]
pub unsafe extern "C" fn he_tape_free(tape: *mut HeTape) {
    if !tape.is_null() {
        drop(Box::from_raw(tape));
    }
}

/// Mean copy-task score of `net` on a battery whose episodes derive from `seed`.
#[no_mangle]
pub unsafe extern "C" fn he_evaluate_battery(
    net: *const HeNetwork,
    bits: usize,
    battery: HeBattery,
    seed: u64,
    out_score: *mut f64,
) -> HeStatus {
    guard(|| {
        let n = deref(net)?;
        let b = match battery {
            HeBattery::Training => Battery::training(),
            HeBattery::Generalization => Battery::generalization(),
            HeBattery::Long => Battery::long_sequence(),
        };
        let score = b.evaluate(&n.net, bits, &mut rng::stream(seed, &[]))?;
        put(out_score, score)
    })
}
