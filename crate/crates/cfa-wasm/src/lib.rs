//! wasm exports for the browser demo. Each function takes plain strings and
//! numbers and returns a JSON payload, so the page needs no binding glue
//! beyond `JSON.parse`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use cfa_core::diversity::diversity_matrix;
use cfa_core::fusion::{run_all_with, FuseOptions};
use cfa_core::kemeny::{
    build_bubble_sort_graph, enumerate_weak_orders, kemeny_distance, verify_recursive_structure,
    vertex_connectivity, WeakOrder, MAX_CONNECTIVITY_N, MAX_WEAK_ORDER_N,
};
use cfa_core::scoring::{rank_score_function, ScoreMatrix};
use cfa_core::simulate::{generate, SyntheticSpec};

fn to_js(err: cfa_core::Error) -> JsError {
    JsError::new(&err.to_string())
}

#[derive(Serialize)]
struct Analysis {
    systems: Vec<String>,
    items: Vec<String>,
    /// One normalized non-increasing curve per system.
    rsf: Vec<Vec<f64>>,
    cd: Vec<Vec<f64>>,
    ds: Vec<f64>,
    mean_cd: f64,
}

fn analyze_impl(csv: &str) -> cfa_core::Result<String> {
    let matrix = ScoreMatrix::from_csv(csv)?;
    let rsf = (0..matrix.n_systems())
        .map(|j| Ok(rank_score_function(&matrix.system(j))?.values().to_vec()))
        .collect::<cfa_core::Result<Vec<_>>>()?;
    let dm = diversity_matrix(&matrix)?;
    let analysis = Analysis {
        systems: matrix.system_ids().to_vec(),
        items: matrix.item_ids().map(str::to_string).collect(),
        rsf,
        cd: dm.cd_grid().to_vec(),
        ds: dm.ds_vector().to_vec(),
        mean_cd: dm.mean_pairwise_cd(),
    };
    Ok(serde_json::to_string(&analysis).expect("serializable"))
}

/// Rank-score curves plus the diversity matrix of a score-matrix CSV.
#[wasm_bindgen]
pub fn analyze_matrix(csv: &str) -> Result<String, JsError> {
    analyze_impl(csv).map_err(to_js)
}

#[derive(Serialize)]
struct FusedRow {
    subset: String,
    size: usize,
    method: String,
    top: String,
    value: f64,
    fallback: bool,
    /// Rank of the ground-truth item under this configuration, when known.
    truth_rank: Option<f64>,
}

fn fuse_impl(csv: &str, normalize: bool, truth: Option<&str>) -> cfa_core::Result<String> {
    let matrix = ScoreMatrix::from_csv(csv)?;
    let opts = FuseOptions {
        normalize,
        ..FuseOptions::default()
    };
    let rows: Vec<FusedRow> = run_all_with(&matrix, &opts)?
        .into_iter()
        .map(|r| FusedRow {
            subset: r.config().subset_label(),
            size: r.config().subset.len(),
            method: r.config().method.name().to_string(),
            top: r.top_item().to_string(),
            value: r.fused_of(r.top_item()).unwrap(),
            fallback: r.fell_back(),
            truth_rank: truth.and_then(|t| r.ranking().rank_of(t)),
        })
        .collect();
    Ok(serde_json::to_string(&rows).expect("serializable"))
}

/// Every subset of size >= 2 fused by all four methods.
#[wasm_bindgen]
pub fn fuse_matrix(csv: &str, normalize: bool, truth: Option<String>) -> Result<String, JsError> {
    fuse_impl(csv, normalize, truth.as_deref()).map_err(to_js)
}

#[derive(Serialize)]
struct Synthetic {
    csv: String,
    truth: String,
}

fn synthesize_impl(
    n_items: usize,
    seed: u64,
    noise_scales: &str,
    score_scales: &str,
) -> cfa_core::Result<String> {
    let parse = |text: &str| -> cfa_core::Result<Vec<f64>> {
        text.split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| {
                    cfa_core::Error::InvalidSpec(format!("bad scale `{}`: {e}", f.trim()))
                })
            })
            .collect()
    };
    let noise_scales = parse(noise_scales)?;
    let score_scales = parse(score_scales)?;
    if noise_scales.len() != score_scales.len() {
        return Err(cfa_core::Error::InvalidSpec(format!(
            "{} noise scales but {} score scales",
            noise_scales.len(),
            score_scales.len()
        )));
    }
    let spec = SyntheticSpec {
        n_items,
        k_systems: noise_scales.len(),
        signal_strength: 1.0,
        noise_scales,
        score_scales,
        seed,
    };
    let (matrix, truth) = generate(&spec)?;
    Ok(serde_json::to_string(&Synthetic {
        csv: matrix.to_csv(),
        truth,
    })
    .expect("serializable"))
}

/// Seeded synthetic score matrix; returns its CSV and the ground-truth item.
#[wasm_bindgen]
pub fn synthesize_matrix(
    n_items: usize,
    seed: u64,
    noise_scales: &str,
    score_scales: &str,
) -> Result<String, JsError> {
    synthesize_impl(n_items, seed, noise_scales, score_scales).map_err(to_js)
}

#[derive(Serialize)]
struct GraphView {
    n: usize,
    vertices: Vec<String>,
    edges: Vec<(u32, u32)>,
    degree: usize,
    connected: bool,
    connectivity: Option<usize>,
    recursive: Option<String>,
    weak_orders: Option<usize>,
}

fn graph_impl(n: usize) -> cfa_core::Result<String> {
    let graph = build_bubble_sort_graph(n)?;
    let connectivity = if n <= MAX_CONNECTIVITY_N {
        Some(vertex_connectivity(&graph)?)
    } else {
        None
    };
    let recursive = if n >= 3 {
        Some(verify_recursive_structure(&graph)?.to_string())
    } else {
        None
    };
    let weak_orders = if n <= MAX_WEAK_ORDER_N {
        Some(enumerate_weak_orders(n)?.len())
    } else {
        None
    };
    let view = GraphView {
        n,
        vertices: graph.vertices().iter().map(|p| p.digits()).collect(),
        edges: graph.edges(),
        degree: graph.regular_degree().unwrap_or(0),
        connected: graph.is_connected(),
        connectivity,
        recursive,
        weak_orders,
    };
    Ok(serde_json::to_string(&view).expect("serializable"))
}

/// The bubble-sort Cayley graph with its properties, for 2 <= n <= 6.
#[wasm_bindgen]
pub fn bubble_graph(n: usize) -> Result<String, JsError> {
    graph_impl(n).map_err(to_js)
}

#[derive(Serialize)]
struct Distance {
    display: String,
    decimal: f64,
    n: usize,
}

fn parse_weak_order(text: &str) -> cfa_core::Result<WeakOrder> {
    let ranks: Vec<f64> = text
        .split_whitespace()
        .map(|f| {
            f.parse::<f64>()
                .map_err(|e| cfa_core::Error::Validation(format!("bad rank value `{f}`: {e}")))
        })
        .collect::<cfa_core::Result<_>>()?;
    WeakOrder::from_ranks(&ranks)
}

fn distance_impl(a: &str, b: &str) -> cfa_core::Result<String> {
    let a = parse_weak_order(a)?;
    let b = parse_weak_order(b)?;
    let d = kemeny_distance(&a, &b)?;
    Ok(serde_json::to_string(&Distance {
        display: d.to_string(),
        decimal: *d.numer() as f64 / *d.denom() as f64,
        n: a.n_items(),
    })
    .expect("serializable"))
}

/// Kemeny-Snell distance between two whitespace-separated rank vectors
/// (equal values mean tied items), e.g. "1 2 2 4" vs "2 1 3 4".
#[wasm_bindgen]
pub fn kemeny_between(a: &str, b: &str) -> Result<String, JsError> {
    distance_impl(a, b).map_err(to_js)
}
