#![allow(dead_code)]

use gslep_core::{build_graph, Graph, NodeMetadata, OperatorKind};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random weighted edges over a ring, so the graph is connected.
pub fn random_edges(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((i, (i + 1) % n, rng.random_range(0.5..1.5)));
        for j in i + 2..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, rng.random_range(0.1..3.0)));
            }
        }
    }
    edges.retain(|&(i, j, _)| i != j);
    edges
}

pub fn random_graph(n: usize, p: f64, seed: u64) -> (Graph, Vec<(usize, usize, f64)>) {
    let mut r = rng(seed);
    let edges = random_edges(n, p, &mut r);
    let g = build_graph(edges.clone(), n, NodeMetadata::default()).unwrap();
    (g, edges)
}

/// Nonempty sorted node subset, each node kept with probability `p`.
pub fn random_selection(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut nodes: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < p).collect();
    if nodes.is_empty() {
        nodes.push(rng.random_range(0..n));
    }
    nodes
}

/// Dense operator assembled straight from the edge list.
pub fn dense_oracle(edges: &[(usize, usize, f64)], n: usize, kind: OperatorKind) -> DMatrix<f64> {
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(i, j, w) in edges {
        a[(i, j)] += w;
        a[(j, i)] += w;
    }
    let d: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    match kind {
        OperatorKind::LaplacianCombinatorial => DMatrix::from_diagonal(&d.clone().into()) - a,
        OperatorKind::LaplacianNormalized => {
            let s: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
            DMatrix::from_fn(n, n, |i, j| {
                let l = if i == j { d[i] } else { 0.0 } - a[(i, j)];
                s[i] * l * s[j]
            })
        }
        OperatorKind::Modularity => {
            let two_m: f64 = d.iter().sum();
            DMatrix::from_fn(n, n, |i, j| a[(i, j)] - d[i] * d[j] / two_m)
        }
    }
}

/// Eigenvalues sorted in the operator's natural order.
pub fn oracle_values(m: &DMatrix<f64>, kind: OperatorKind) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    if kind == OperatorKind::Modularity {
        v.reverse();
    }
    v
}
