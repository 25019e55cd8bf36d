//! Order-1 zero-derivative-principle contours.
//!
//! Along solutions of ż = f(z), d/dt Im z = Im f(z), so the order-1 ZDP
//! set for the imaginary part is the zero contour of g(x, y) = Im f(x+iy).
//! The contour is extracted by marching squares on a node grid and every
//! vertex is Newton-refined along ∇g until |g| falls below `refine_tol`.

use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;

use super::MethodError;
use crate::expr::HolomorphicFunction;
use crate::geom::Rectangle;
use crate::par;

/// Which component's zero set to extract. The imaginary part is the ZDP
/// variable of the method; the real-part mirror is available as an option.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZdpVariable {
    ImaginaryPart,
    RealPart,
}

impl ZdpVariable {
    fn component(self, v: Complex64) -> f64 {
        match self {
            ZdpVariable::ImaginaryPart => v.im,
            ZdpVariable::RealPart => v.re,
        }
    }

    /// ∇g from f': for g = Im f the gradient is (Im f', Re f'); for
    /// g = Re f it is (Re f', −Im f').
    fn gradient(self, f_prime: Complex64) -> (f64, f64) {
        match self {
            ZdpVariable::ImaginaryPart => (f_prime.im, f_prime.re),
            ZdpVariable::RealPart => (f_prime.re, -f_prime.im),
        }
    }
}

/// One refined contour vertex; `residual` is |g| there.
#[derive(Debug, Clone, Copy)]
pub struct ContourPoint {
    pub location: Complex64,
    pub residual: f64,
}

/// A chained contour piece in traversal order.
#[derive(Debug, Clone)]
pub struct ContourPolyline {
    pub points: Vec<ContourPoint>,
}

/// Grid edges carry the crossing points; identified by their lower-left
/// node and direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum EdgeId {
    Horizontal(usize, usize),
    Vertical(usize, usize),
}

/// Zero contour of Im f over the domain: the order-1 ZDP curves.
pub fn zdp_curve(
    f: &HolomorphicFunction,
    domain: &Rectangle,
    grid_n: usize,
    refine_tol: f64,
) -> Result<Vec<ContourPolyline>, MethodError> {
    zdp_curve_component(f, domain, grid_n, refine_tol, ZdpVariable::ImaginaryPart)
}

/// Zero contour of the chosen component of f.
pub fn zdp_curve_component(
    f: &HolomorphicFunction,
    domain: &Rectangle,
    grid_n: usize,
    refine_tol: f64,
    var: ZdpVariable,
) -> Result<Vec<ContourPolyline>, MethodError> {
    assert!(grid_n >= 8, "contour extraction needs at least an 8x8 grid");
    assert!(refine_tol > 0.0);

    // Node values, row-parallel. Evaluation failures become NaN and mask
    // out the incident cells.
    let rows: Vec<Vec<f64>> = par::map_range(grid_n, |j| {
        (0..grid_n)
            .map(|i| {
                f.eval(domain.grid_node(i, j, grid_n))
                    .map_or(f64::NAN, |v| var.component(v))
            })
            .collect()
    });
    let value = |i: usize, j: usize| rows[j][i];

    let cells = grid_n - 1;
    let cell_segments: Vec<Vec<(EdgeId, EdgeId)>> = par::map_range(cells * cells, |idx| {
        let i = idx % cells;
        let j = idx / cells;
        march_cell(f, domain, grid_n, var, &rows, i, j)
    });
    let segments: Vec<(EdgeId, EdgeId)> = cell_segments.into_iter().flatten().collect();
    if segments.is_empty() {
        return Err(MethodError::EmptyContour);
    }

    let chains = assemble_chains(&segments);

    // Refine each distinct crossing once.
    let mut unique: Vec<EdgeId> = chains.iter().flatten().copied().collect();
    unique.sort();
    unique.dedup();
    let fp = f.derivative(1);
    let cell_diag = (domain.width() / cells as f64).hypot(domain.height() / cells as f64);
    let refined: Vec<Option<ContourPoint>> = par::map_slice(&unique, |&edge| {
        let seed = crossing_point(domain, grid_n, &value, edge);
        refine_vertex(f, &fp, var, seed, refine_tol, cell_diag)
    });
    let refined_map: BTreeMap<EdgeId, Option<ContourPoint>> =
        unique.into_iter().zip(refined).collect();

    let mut polylines = Vec::new();
    for chain in chains {
        // Non-convergent vertices are dropped, splitting the chain.
        let mut current: Vec<ContourPoint> = Vec::new();
        for edge in chain {
            match refined_map[&edge] {
                Some(pt) => current.push(pt),
                None => {
                    if current.len() >= 2 {
                        polylines.push(ContourPolyline {
                            points: std::mem::take(&mut current),
                        });
                    } else {
                        current.clear();
                    }
                }
            }
        }
        if current.len() >= 2 {
            polylines.push(ContourPolyline { points: current });
        }
    }
    if polylines.is_empty() {
        return Err(MethodError::EmptyContour);
    }
    polylines.sort_by(|p, q| {
        let a = p.points[0].location;
        let b = q.points[0].location;
        (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap()
    });
    Ok(polylines)
}

/// Segments produced by one cell. Saddle cells (diagonal sign pattern)
/// are disambiguated by the sign at the cell center.
fn march_cell(
    f: &HolomorphicFunction,
    domain: &Rectangle,
    grid_n: usize,
    var: ZdpVariable,
    rows: &[Vec<f64>],
    i: usize,
    j: usize,
) -> Vec<(EdgeId, EdgeId)> {
    let v00 = rows[j][i];
    let v10 = rows[j][i + 1];
    let v01 = rows[j + 1][i];
    let v11 = rows[j + 1][i + 1];
    if !(v00.is_finite() && v10.is_finite() && v01.is_finite() && v11.is_finite()) {
        return Vec::new();
    }
    let n00 = v00 < 0.0;
    let n10 = v10 < 0.0;
    let n01 = v01 < 0.0;
    let n11 = v11 < 0.0;

    let bottom = EdgeId::Horizontal(i, j);
    let top = EdgeId::Horizontal(i, j + 1);
    let left = EdgeId::Vertical(i, j);
    let right = EdgeId::Vertical(i + 1, j);

    let saddle = n00 == n11 && n10 == n01 && n00 != n10;
    if saddle {
        let center = domain.grid_node(i, j, grid_n) + diag_half(domain, grid_n);
        let center_neg = f
            .eval(center)
            .is_ok_and(|v| var.component(v) < 0.0);
        // Pair the crossings so the contour separates the isolated corners.
        return if n00 == center_neg {
            vec![(bottom, right), (left, top)]
        } else {
            vec![(bottom, left), (right, top)]
        };
    }

    let mut crossings = Vec::with_capacity(2);
    if n00 != n10 {
        crossings.push(bottom);
    }
    if n10 != n11 {
        crossings.push(right);
    }
    if n01 != n11 {
        crossings.push(top);
    }
    if n00 != n01 {
        crossings.push(left);
    }
    match crossings.len() {
        2 => vec![(crossings[0], crossings[1])],
        0 => Vec::new(),
        _ => unreachable!("non-saddle cell with {} crossings", crossings.len()),
    }
}

fn diag_half(domain: &Rectangle, grid_n: usize) -> Complex64 {
    let cells = (grid_n - 1) as f64;
    Complex64::new(
        0.5 * domain.width() / cells,
        0.5 * domain.height() / cells,
    )
}

/// Linear interpolation of the zero along one grid edge.
fn crossing_point(
    domain: &Rectangle,
    grid_n: usize,
    value: &impl Fn(usize, usize) -> f64,
    edge: EdgeId,
) -> Complex64 {
    let (pa, pb, va, vb) = match edge {
        EdgeId::Horizontal(i, j) => (
            domain.grid_node(i, j, grid_n),
            domain.grid_node(i + 1, j, grid_n),
            value(i, j),
            value(i + 1, j),
        ),
        EdgeId::Vertical(i, j) => (
            domain.grid_node(i, j, grid_n),
            domain.grid_node(i, j + 1, grid_n),
            value(i, j),
            value(i, j + 1),
        ),
    };
    let t = if va == vb { 0.5 } else { va / (va - vb) };
    pa + t.clamp(0.0, 1.0) * (pb - pa)
}

/// Newton iteration z ← z − g·∇g/|∇g|² with steps capped at one cell
/// diagonal; returns None when |g| cannot get below the tolerance.
///
/// Near the intersections of contour branches the gradient degenerates
/// and |g| alone is a poor distance proxy, so once the tolerance is met
/// the iteration keeps polishing until the step stalls at f64 resolution.
fn refine_vertex(
    f: &HolomorphicFunction,
    fp: &HolomorphicFunction,
    var: ZdpVariable,
    seed: Complex64,
    refine_tol: f64,
    step_cap: f64,
) -> Option<ContourPoint> {
    let mut z = seed;
    let mut best: Option<(Complex64, f64)> = None;
    for _ in 0..100 {
        let g = var.component(f.eval(z).ok()?);
        if best.is_none_or(|(_, b)| g.abs() < b) {
            best = Some((z, g.abs()));
        } else if best.is_some_and(|(_, b)| b <= refine_tol) {
            break; // stopped improving past the tolerance
        }
        let (gx, gy) = var.gradient(fp.eval(z).ok()?);
        let norm_sq = gx * gx + gy * gy;
        if norm_sq < 1e-300 {
            break;
        }
        let mut step = Complex64::new(-g * gx / norm_sq, -g * gy / norm_sq);
        let len = step.norm();
        if len > step_cap {
            step *= step_cap / len;
        }
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            break;
        }
        z += step;
    }
    match best {
        Some((location, residual)) if residual <= refine_tol => Some(ContourPoint {
            location,
            residual,
        }),
        _ => None,
    }
}

/// Joins cell segments into maximal chains over shared grid edges. Open
/// chains start at degree-1 crossings; what remains are closed loops.
fn assemble_chains(segments: &[(EdgeId, EdgeId)]) -> Vec<Vec<EdgeId>> {
    let mut adjacency: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    for &(a, b) in segments {
        adjacency.entry(a).or_default().push(b);
        adjacency.entry(b).or_default().push(a);
    }
    for neighbors in adjacency.values_mut() {
        neighbors.sort();
    }

    let mut used: HashSet<(EdgeId, EdgeId)> = HashSet::with_capacity(segments.len());
    let mark = |a: EdgeId, b: EdgeId, used: &mut HashSet<(EdgeId, EdgeId)>| {
        used.insert(if a <= b { (a, b) } else { (b, a) });
    };
    let is_used =
        |a: EdgeId, b: EdgeId, used: &HashSet<(EdgeId, EdgeId)>| -> bool {
            used.contains(&if a <= b { (a, b) } else { (b, a) })
        };

    let mut chains = Vec::new();
    // Two passes: open chains from odd-degree nodes first, then loops.
    for pass in 0..2 {
        let starts: Vec<EdgeId> = adjacency
            .iter()
            .filter(|(_, n)| pass == 1 || n.len() == 1)
            .map(|(e, _)| *e)
            .collect();
        for start in starts {
            while let Some(&first) = adjacency[&start]
                .iter()
                .find(|&&n| !is_used(start, n, &used))
            {
                let mut chain = vec![start, first];
                mark(start, first, &mut used);
                loop {
                    let here = *chain.last().unwrap();
                    let next = adjacency[&here]
                        .iter()
                        .find(|&&n| !is_used(here, n, &used))
                        .copied();
                    match next {
                        Some(n) => {
                            mark(here, n, &mut used);
                            chain.push(n);
                        }
                        None => break,
                    }
                }
                chains.push(chain);
            }
        }
    }
    chains
}
