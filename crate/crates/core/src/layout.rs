//! Fruchterman–Reingold force-directed embedding in 2 or 3 dimensions.
//!
//! Nodes start uniformly in the unit cube (or square). Every iteration all
//! pairs repel with `k²/d`, edges attract with `d²/k`, and each node moves
//! along its net force by at most the current temperature, which falls
//! linearly from `0.1` to `0`. `k = (1/|V|)^(1/dims)`.

use std::io::{self, Write};

use nalgebra::{Matrix3, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::citenet::CitationNetwork;

/// Node count above which repulsion is restricted to nearby grid cells.
pub const GRID_THRESHOLD: usize = 20_000;
const INITIAL_TEMPERATURE: f64 = 0.1;
const MIN_DISTANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("cannot lay out an empty network")]
    EmptyNetwork,
    #[error("dimensions must be 2 or 3, got {0}")]
    BadDimensions(usize),
    #[error("need at least one iteration")]
    NoIterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayoutOptions {
    pub dims: usize,
    pub iterations: usize,
    pub seed: u64,
    /// `None` picks the grid approximation automatically above
    /// [`GRID_THRESHOLD`] nodes.
    pub grid: Option<bool>,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions { dims: 3, iterations: 200, seed: 0, grid: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Layout {
    pub dims: usize,
    /// One `[x, y, z]` per node; `z` is 0 in 2D.
    pub positions: Vec<[f64; 3]>,
    pub iterations: usize,
    pub k: f64,
    pub final_temperature: f64,
    pub grid_approximation: bool,
    /// Largest displacement applied in each iteration.
    #[serde(skip)]
    pub max_step: Vec<f64>,
}

fn temperature(iteration: usize, iterations: usize) -> f64 {
    INITIAL_TEMPERATURE * (1.0 - iteration as f64 / iterations as f64)
}

pub fn layout_network(network: &CitationNetwork, options: LayoutOptions) -> Result<Layout, LayoutError> {
    let n = network.node_count();
    let dims = options.dims;
    if n == 0 {
        return Err(LayoutError::EmptyNetwork);
    }
    if dims != 2 && dims != 3 {
        return Err(LayoutError::BadDimensions(dims));
    }
    if options.iterations == 0 {
        return Err(LayoutError::NoIterations);
    }
    let grid = options.grid.unwrap_or(n > GRID_THRESHOLD);
    let k = (1.0 / n as f64).powf(1.0 / dims as f64);
    let k2 = k * k;

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut pos: Vec<[f64; 3]> = (0..n)
        .map(|_| {
            let mut p = [0.0; 3];
            for c in p.iter_mut().take(dims) {
                *c = rng.random::<f64>();
            }
            p
        })
        .collect();

    let mut max_step = Vec::with_capacity(options.iterations);
    for it in 0..options.iterations {
        let t = temperature(it, options.iterations);
        let cells = grid.then(|| Grid::new(&pos, 2.0 * k, dims));
        let disp: Vec<[f64; 3]> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut d = [0.0; 3];
                let mut repel = |j: usize| {
                    if j == i {
                        return;
                    }
                    let delta = sub(pos[i], pos[j]);
                    let dist = norm(delta).max(MIN_DISTANCE);
                    let f = k2 / dist;
                    for c in 0..3 {
                        d[c] += delta[c] / dist * f;
                    }
                };
                match &cells {
                    Some(g) => g.for_each_near(pos[i], &mut repel),
                    None => (0..n).for_each(repel),
                }
                for &(j, _) in network.neighbors(i) {
                    let delta = sub(pos[i], pos[j]);
                    let dist = norm(delta).max(MIN_DISTANCE);
                    let f = dist * dist / k;
                    for c in 0..3 {
                        d[c] -= delta[c] / dist * f;
                    }
                }
                d
            })
            .collect();

        let mut largest: f64 = 0.0;
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = norm(*d);
            if len > 0.0 {
                let step = len.min(t);
                for c in 0..dims {
                    p[c] += d[c] / len * step;
                }
                largest = largest.max(step);
            }
        }
        max_step.push(largest);
    }

    recenter(&mut pos, dims);
    Ok(Layout {
        dims,
        positions: pos,
        iterations: options.iterations,
        k,
        final_temperature: temperature(options.iterations, options.iterations),
        grid_approximation: grid,
        max_step,
    })
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn centroid(pos: &[[f64; 3]]) -> [f64; 3] {
    let n = pos.len() as f64;
    let mut c = [0.0; 3];
    for p in pos {
        for k in 0..3 {
            c[k] += p[k];
        }
    }
    c.map(|x| x / n)
}

fn recenter(pos: &mut [[f64; 3]], dims: usize) {
    let c = centroid(pos);
    for p in pos.iter_mut() {
        for k in 0..dims {
            p[k] -= c[k];
        }
    }
}

/// Uniform spatial hash used for the cutoff approximation.
struct Grid {
    cell: f64,
    dims: usize,
    buckets: std::collections::HashMap<[i64; 3], Vec<usize>>,
}

impl Grid {
    fn new(pos: &[[f64; 3]], cell: f64, dims: usize) -> Self {
        let mut buckets: std::collections::HashMap<[i64; 3], Vec<usize>> = std::collections::HashMap::new();
        for (i, p) in pos.iter().enumerate() {
            buckets.entry(Self::key(*p, cell)).or_default().push(i);
        }
        Grid { cell, dims, buckets }
    }

    fn key(p: [f64; 3], cell: f64) -> [i64; 3] {
        p.map(|x| (x / cell).floor() as i64)
    }

    /// Visits nodes in the 3^dims cells around `p`, in a fixed order.
    fn for_each_near(&self, p: [f64; 3], f: &mut impl FnMut(usize)) {
        let base = Self::key(p, self.cell);
        let zr = if self.dims == 3 { -1..=1 } else { 0..=0 };
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in zr.clone() {
                    if let Some(b) = self.buckets.get(&[base[0] + dx, base[1] + dy, base[2] + dz]) {
                        b.iter().copied().for_each(&mut *f);
                    }
                }
            }
        }
    }
}

impl Layout {
    pub fn position(&self, node: usize) -> &[f64] {
        &self.positions[node][..self.dims]
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        norm(sub(self.positions[a], self.positions[b]))
    }

    /// Rotates a 3D layout onto its principal axes and drops the axis of
    /// least variance. 2D layouts are returned unchanged.
    pub fn project_to_plane(&self) -> Layout {
        if self.dims == 2 {
            return self.clone();
        }
        let c = centroid(&self.positions);
        let mut cov = Matrix3::<f64>::zeros();
        for p in &self.positions {
            let d = nalgebra::Vector3::new(p[0] - c[0], p[1] - c[1], p[2] - c[2]);
            cov += d * d.transpose();
        }
        let eig = SymmetricEigen::new(cov);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let axes: Vec<nalgebra::Vector3<f64>> = order[..2].iter().map(|&i| eig.eigenvectors.column(i).into()).collect();
        let positions = self
            .positions
            .iter()
            .map(|p| {
                let d = nalgebra::Vector3::new(p[0] - c[0], p[1] - c[1], p[2] - c[2]);
                [axes[0].dot(&d), axes[1].dot(&d), 0.0]
            })
            .collect();
        Layout { dims: 2, positions, ..self.clone() }
    }

    /// Writes `id,x,y[,z],community` rows.
    pub fn write_csv<W: Write>(&self, network: &CitationNetwork, communities: &[usize], out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.dims == 3 {
            w.write_record(["id", "x", "y", "z", "community"])?;
        } else {
            w.write_record(["id", "x", "y", "community"])?;
        }
        for (i, p) in self.positions.iter().enumerate() {
            let mut row = vec![network.id(i).to_string()];
            row.extend(p[..self.dims].iter().map(f64::to_string));
            row.push(communities[i].to_string());
            w.write_record(&row)?;
        }
        w.flush()
    }
}
