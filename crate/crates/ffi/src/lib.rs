//! C ABI over `regbip`.
//!
//! Graphs and decompositions are opaque handles created by `regbip_*`
//! constructors and released with the matching `*_free` function. Every
//! call returns a [`RegbipStatus`]; on failure, [`regbip_last_error`] gives
//! a message for the calling thread. Strings returned through out-pointers
//! are owned by the caller and must be released with [`regbip_string_free`].
//! Panics never cross the boundary; they are reported as
//! `REGBIP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use regbip::generators::GeneratorSpec;
use regbip::graph::{parse_edge_list, write_edge_list, Graph, Side};
use regbip::pipeline::{decompose, verify, Decomposed, DecompositionJson, PipelineParams};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegbipStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed graph, spec, config or JSON.
    InvalidInput = 3,
    /// A pipeline stage failed; the message names the stage.
    StageFailed = 4,
    /// A decomposition did not pass verification.
    VerificationFailed = 5,
    /// An index or buffer length was out of range.
    OutOfRange = 6,
    /// Internal panic, caught at the boundary.
    Panic = 7,
}

/// Opaque simple graph.
pub struct RegbipGraph {
    graph: Graph,
}

/// Opaque verified decomposition.
pub struct RegbipDecomposition {
    dec: Decomposed,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(RegbipStatus, String);

type Outcome = Result<(), Failure>;

fn fail<T>(status: RegbipStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn set_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).expect("interior NULs removed"));
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `body`, records its error message and turns panics into a status.
fn guard(body: impl FnOnce() -> Outcome) -> RegbipStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(None);
            RegbipStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(Some(format!("panic: {msg}")));
            RegbipStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return fail(RegbipStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(RegbipStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(RegbipStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Outcome {
    if out.is_null() {
        return fail(RegbipStatus::NullPointer, format!("{what} is null"));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(RegbipStatus::InvalidInput, "string contains NUL".into()))
}

fn new_graph(graph: Graph) -> *mut RegbipGraph {
    Box::into_raw(Box::new(RegbipGraph { graph }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn regbip_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn regbip_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn regbip_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses the edge-list text format (`n m` header, then `m` lines `u v`).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_graph_parse(text_ptr: *const c_char, out: *mut *mut RegbipGraph) -> RegbipStatus {
    guard(|| {
        let t = text(text_ptr, "text")?;
        let g = parse_edge_list(t).map_err(|e| Failure(RegbipStatus::InvalidInput, e.to_string()))?;
        put(out, new_graph(g), "out")
    })
}

/// Builds a graph from a generator spec such as
/// `random_regular:n=200,d=32,seed=7` or `complete:n=64`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_graph_generate(spec: *const c_char, out: *mut *mut RegbipGraph) -> RegbipStatus {
    guard(|| {
        let spec: GeneratorSpec = text(spec, "spec")?
            .parse()
            .map_err(|e: regbip::generators::GeneratorError| Failure(RegbipStatus::InvalidInput, e.to_string()))?;
        let g = spec.generate().map_err(|e| Failure(RegbipStatus::InvalidInput, e.to_string()))?;
        put(out, new_graph(g), "out")
    })
}

/// Builds a graph on `n` vertices from `edge_count` pairs stored flat in
/// `edges` (`2 * edge_count` entries).
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values (it may be null
/// when `edge_count` is 0), and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_graph_from_edges(
    n: usize,
    edges: *const usize,
    edge_count: usize,
    out: *mut *mut RegbipGraph,
) -> RegbipStatus {
    guard(|| {
        let flat: &[usize] = if edge_count == 0 {
            &[]
        } else if edges.is_null() {
            return fail(RegbipStatus::NullPointer, "edges is null");
        } else {
            std::slice::from_raw_parts(edges, 2 * edge_count)
        };
        let g = Graph::from_edges(n, flat.chunks_exact(2).map(|p| (p[0], p[1])))
            .map_err(|e| Failure(RegbipStatus::InvalidInput, e.to_string()))?;
        put(out, new_graph(g), "out")
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `g` must be null or a graph from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn regbip_graph_free(g: *mut RegbipGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_graph_vertex_count(g: *const RegbipGraph, out: *mut usize) -> RegbipStatus {
    guard(|| put(out, handle(g, "graph")?.graph.n(), "out"))
}

/// # Safety
/// `g` must be a live graph and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_graph_edge_count(g: *const RegbipGraph, out: *mut usize) -> RegbipStatus {
    guard(|| put(out, handle(g, "graph")?.graph.edge_count(), "out"))
}

/// Common degree of a regular graph; `REGBIP_STATUS_INVALID_INPUT` otherwise.
///
/// # Safety
/// `g` must be a live graph and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_graph_regular_degree(g: *const RegbipGraph, out: *mut usize) -> RegbipStatus {
    guard(|| {
        let g = &handle(g, "graph")?.graph;
        match g.regular_degree() {
            Some(d) => put(out, d, "out"),
            None => fail(RegbipStatus::InvalidInput, "graph is not regular"),
        }
    })
}

/// Writes the graph in edge-list format to a new string.
///
/// # Safety
/// `g` must be a live graph and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_graph_to_edge_list(g: *const RegbipGraph, out: *mut *mut c_char) -> RegbipStatus {
    guard(|| {
        let s = owned_string(write_edge_list(&handle(g, "graph")?.graph))?;
        put(out, s, "out")
    })
}

/// Decomposes a regular graph into regular bipartite spanning pieces.
///
/// `config_json` may be null, or a JSON object overriding pipeline
/// parameters with the same keys as the CLI `--config` file. `seed`
/// overrides any seed in the config.
///
/// # Safety
/// `g` must be a live graph, `config_json` null or a NUL-terminated string,
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_decompose(
    g: *const RegbipGraph,
    seed: u64,
    config_json: *const c_char,
    out: *mut *mut RegbipDecomposition,
) -> RegbipStatus {
    guard(|| {
        let g = &handle(g, "graph")?.graph;
        let overlay = if config_json.is_null() {
            serde_json::Value::Object(Default::default())
        } else {
            serde_json::from_str(text(config_json, "config_json")?)
                .map_err(|e| Failure(RegbipStatus::InvalidInput, format!("config: {e}")))?
        };
        let mut params =
            PipelineParams::from_overrides(None, &overlay).map_err(|e| Failure(RegbipStatus::InvalidInput, format!("config: {e}")))?;
        params.seed = seed;
        let dec = decompose(g, &params).map_err(|e| {
            let status = if e.stage == "verify" {
                RegbipStatus::VerificationFailed
            } else {
                RegbipStatus::StageFailed
            };
            Failure(status, e.to_string())
        })?;
        put(out, Box::into_raw(Box::new(RegbipDecomposition { dec })), "out")
    })
}

/// Releases a decomposition. Null is ignored.
///
/// # Safety
/// `d` must be null or a decomposition from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn regbip_decomposition_free(d: *mut RegbipDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live decomposition and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_decomposition_part_count(d: *const RegbipDecomposition, out: *mut usize) -> RegbipStatus {
    guard(|| put(out, handle(d, "decomposition")?.dec.decomposition.pieces.len(), "out"))
}

/// Degree of the last piece, the part of the absorber left after regularization.
///
/// # Safety
/// `d` must be a live decomposition and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_decomposition_leftover_degree(d: *const RegbipDecomposition, out: *mut usize) -> RegbipStatus {
    guard(|| put(out, handle(d, "decomposition")?.dec.leftover_degree, "out"))
}

fn piece(d: &RegbipDecomposition, index: usize) -> Result<&regbip::graph::SpanningBipartitePiece, Failure> {
    let pieces = &d.dec.decomposition.pieces;
    pieces
        .get(index)
        .ok_or_else(|| Failure(RegbipStatus::OutOfRange, format!("part {index} of {}", pieces.len())))
}

/// # Safety
/// `d` must be a live decomposition and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_decomposition_part_degree(d: *const RegbipDecomposition, index: usize, out: *mut usize) -> RegbipStatus {
    guard(|| {
        let d = handle(d, "decomposition")?;
        piece(d, index)?;
        put(out, d.dec.report.piece_degrees[index].unwrap_or(0), "out")
    })
}

/// # Safety
/// `d` must be a live decomposition and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_decomposition_part_edge_count(
    d: *const RegbipDecomposition,
    index: usize,
    out: *mut usize,
) -> RegbipStatus {
    guard(|| put(out, piece(handle(d, "decomposition")?, index)?.edges.len(), "out"))
}

/// Copies the edges of part `index` into `buf` as flat pairs. `buf_len`
/// must be at least twice the part's edge count.
///
/// # Safety
/// `d` must be a live decomposition and `buf` must point to `buf_len`
/// writable values.
#[no_mangle]
pub unsafe extern "C" fn regbip_decomposition_part_edges(
    d: *const RegbipDecomposition,
    index: usize,
    buf: *mut usize,
    buf_len: usize,
) -> RegbipStatus {
    guard(|| {
        let p = piece(handle(d, "decomposition")?, index)?;
        let need = 2 * p.edges.len();
        if buf_len < need {
            return fail(RegbipStatus::OutOfRange, format!("buffer holds {buf_len}, need {need}"));
        }
        if need == 0 {
            return Ok(());
        }
        if buf.is_null() {
            return fail(RegbipStatus::NullPointer, "buf is null");
        }
        let out = std::slice::from_raw_parts_mut(buf, need);
        for (slot, &(u, v)) in out.chunks_exact_mut(2).zip(&p.edges) {
            slot[0] = u;
            slot[1] = v;
        }
        Ok(())
    })
}

/// Writes the side (0 or 1) of every vertex in part `index` to `sides`,
/// which must hold one byte per vertex of the host graph.
///
/// # Safety
/// `d` must be a live decomposition and `sides` must point to `len`
/// writable bytes.
#[no_mangle]
pub unsafe extern "C" fn regbip_decomposition_part_sides(
    d: *const RegbipDecomposition,
    index: usize,
    sides: *mut u8,
    len: usize,
) -> RegbipStatus {
    guard(|| {
        let d = handle(d, "decomposition")?;
        let p = piece(d, index)?;
        let n = d.dec.n;
        if len < n {
            return fail(RegbipStatus::OutOfRange, format!("buffer holds {len}, need {n}"));
        }
        if n == 0 {
            return Ok(());
        }
        if sides.is_null() {
            return fail(RegbipStatus::NullPointer, "sides is null");
        }
        let out = std::slice::from_raw_parts_mut(sides, n);
        for (slot, side) in out.iter_mut().zip(p.bipartition.sides(n)) {
            *slot = u8::from(side == Some(Side::Right));
        }
        Ok(())
    })
}

/// Serializes the decomposition to the JSON document written by the CLI
/// (without a timestamp).
///
/// # Safety
/// `d` must be a live decomposition and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_decomposition_to_json(d: *const RegbipDecomposition, out: *mut *mut c_char) -> RegbipStatus {
    guard(|| {
        let json = serde_json::to_string(&handle(d, "decomposition")?.dec.to_json())
            .map_err(|e| Failure(RegbipStatus::InvalidInput, e.to_string()))?;
        put(out, owned_string(json)?, "out")
    })
}

/// Checks a decomposition JSON document against `g`. Returns
/// `REGBIP_STATUS_OK` with `*verified` set to the outcome; the reasons for a
/// failed check are available from `regbip_last_error`.
///
/// # Safety
/// `g` must be a live graph, `json` a NUL-terminated string and `verified`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn regbip_verify_json(g: *const RegbipGraph, json: *const c_char, verified: *mut bool) -> RegbipStatus {
    let mut problems = None;
    let status = guard(|| {
        let g = &handle(g, "graph")?.graph;
        let doc: DecompositionJson = serde_json::from_str(text(json, "json")?)
            .map_err(|e| Failure(RegbipStatus::InvalidInput, format!("decomposition JSON: {e}")))?;
        let report = verify(g, &doc.to_decomposition());
        if !report.all_green() {
            problems = Some(report.problems.join("; "));
        }
        put(verified, report.all_green(), "verified")
    });
    if problems.is_some() {
        set_error(problems);
    }
    status
}
