//! Second eigenvalues of normalized graph operators, the zig-zag function,
//! and operator norms restricted to a complement.
//!
//! All reported spectra are of the normalized operator, so values land in
//! `[0, 1]` and lambda includes the magnitude of negative eigenvalues.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default tolerance for the dense path.
pub const DENSE_TOL: f64 = 1e-10;
/// Default tolerance for the iterative path.
pub const ITERATIVE_TOL: f64 = 1e-8;
/// Matvec budget for iterative methods.
pub const MAX_MATVECS: usize = 1_000_000;
/// Vertex-count cutoff below which the dense path is used.
pub const DENSE_CUTOFF: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    DenseFull,
    PowerDeflate,
}

/// Result of a second-eigenvalue computation on a normalized operator.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    /// max |non-trivial eigenvalue| of the normalized operator.
    pub lambda: f64,
    pub method: SpectrumMethod,
    /// Achieved numerical residual.
    pub residual: f64,
    /// All eigenvalues, sorted descending (dense path only).
    pub all_eigenvalues: Option<Vec<f64>>,
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, without
/// eigenvectors. `a` is row-major `n x n` and is destroyed. Returns the
/// unsorted eigenvalues and the final off-diagonal Frobenius norm.
pub fn jacobi_eigenvalues(a: &mut [f64], n: usize, tol: f64) -> Result<(Vec<f64>, f64)> {
    jacobi_impl(a, n, tol, None)
}

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
/// Returns `(eigenvalues, vectors)` where column `k` of the row-major
/// `vectors` matrix is the eigenvector for `eigenvalues[k]`.
pub fn jacobi_eigendecompose(a: &mut [f64], n: usize, tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    // accumulate V^T so rotations touch contiguous rows
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let (vals, off) = jacobi_impl(a, n, tol, Some(&mut vt))?;
    let _ = off;
    // transpose back so columns are eigenvectors
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            v[j * n + i] = vt[i * n + j];
        }
    }
    Ok((vals, v))
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            let x = a[p * n + q];
            s += 2.0 * x * x;
        }
    }
    s.sqrt()
}

fn jacobi_impl(
    a: &mut [f64],
    n: usize,
    tol: f64,
    mut vt: Option<&mut [f64]>,
) -> Result<(Vec<f64>, f64)> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Err(Error::Config("empty matrix".into()));
    }
    if n == 1 {
        return Ok((vec![a[0]], 0.0));
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];
    const MAX_SWEEPS: usize = 64;
    for sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(a, n);
        if off <= tol {
            return Ok((d, off));
        }
        // threshold for the early sweeps (Numerical Recipes scheme)
        let thresh = if sweep < 3 {
            0.2 * off * off / ((n * n) as f64)
        } else {
            0.0
        };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                // after a few sweeps, zero out negligibly small elements
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        t = -t;
                    }
                    t
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;
                // rotate the rest of the upper triangle
                for j in 0..p {
                    let g = a[j * n + p];
                    let h = a[j * n + q];
                    a[j * n + p] = g - s * (h + g * tau);
                    a[j * n + q] = h + s * (g - h * tau);
                }
                for j in p + 1..q {
                    let g = a[p * n + j];
                    let h = a[j * n + q];
                    a[p * n + j] = g - s * (h + g * tau);
                    a[j * n + q] = h + s * (g - h * tau);
                }
                let (row_p, row_q) = a.split_at_mut(q * n);
                let row_p = &mut row_p[p * n + q + 1..p * n + n];
                let row_q = &mut row_q[q + 1..n];
                for j in 0..row_p.len() {
                    let g = row_p[j];
                    let h = row_q[j];
                    row_p[j] = g - s * (h + g * tau);
                    row_q[j] = h + s * (g - h * tau);
                }
                if let Some(vt) = vt.as_deref_mut() {
                    let (rows_p, rows_q) = vt.split_at_mut(q * n);
                    let vp = &mut rows_p[p * n..p * n + n];
                    let vq = &mut rows_q[..n];
                    for j in 0..n {
                        let g = vp[j];
                        let h = vq[j];
                        vp[j] = g - s * (h + g * tau);
                        vq[j] = h + s * (g - h * tau);
                    }
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    Err(Error::Numerical {
        what: "jacobi eigensolver".into(),
        residual: off_diagonal_norm(a, n),
    })
}

/// The symmetric normalization `D^{-1/2} A D^{-1/2}`, row-major dense.
/// For a d-regular graph this equals `A / d` entry for entry.
pub fn normalized_adjacency_dense(g: &Graph) -> Result<Vec<f64>> {
    let n = g.vertex_count();
    let mut dinv = vec![0.0; n];
    for u in 0..n {
        let d = g.degree(u as u32);
        if d == 0 {
            return Err(Error::Structural(format!(
                "vertex {u} is isolated; spectral operations need positive degree"
            )));
        }
        dinv[u] = 1.0 / (d as f64).sqrt();
    }
    let mut a = vec![0.0; n * n];
    for u in 0..n {
        for &v in g.neighbors(u as u32) {
            a[u * n + v as usize] += dinv[u] * dinv[v as usize];
        }
    }
    Ok(a)
}

fn spectral_precheck(g: &Graph) -> Result<()> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::Config(
            "second eigenvalue needs at least two vertices".into(),
        ));
    }
    for u in 0..n {
        if g.degree(u as u32) == 0 {
            return Err(Error::Structural(format!("vertex {u} is isolated")));
        }
    }
    if !g.is_connected()? {
        return Err(Error::Structural(
            "graph is disconnected: lambda would be 1".into(),
        ));
    }
    Ok(())
}

/// max |non-trivial eigenvalue| of the normalized operator of `g`.
///
/// Dense full eigendecomposition up to [`DENSE_CUTOFF`] vertices, projected
/// power iteration above. Disconnected input is a structural error.
pub fn second_eigenvalue(g: &Graph, tol: f64) -> Result<SpectrumResult> {
    if g.vertex_count() <= DENSE_CUTOFF {
        second_eigenvalue_dense(g, tol)
    } else {
        // the iterative path cannot usefully go below its default tolerance
        second_eigenvalue_sparse(g, tol.max(ITERATIVE_TOL))
    }
}

pub fn second_eigenvalue_dense(g: &Graph, tol: f64) -> Result<SpectrumResult> {
    spectral_precheck(g)?;
    let n = g.vertex_count();
    let mut a = normalized_adjacency_dense(g)?;
    let (mut vals, off) = jacobi_eigenvalues(&mut a, n, tol)?;
    vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let top = vals[0];
    if (top - 1.0).abs() > 1e-6 {
        return Err(Error::Numerical {
            what: "Perron eigenvalue of normalized operator".into(),
            residual: (top - 1.0).abs(),
        });
    }
    let lambda = vals[1].abs().max(vals[n - 1].abs());
    Ok(SpectrumResult {
        lambda,
        method: SpectrumMethod::DenseFull,
        residual: off,
        all_eigenvalues: Some(vals),
    })
}

/// Apply `D^{-1/2} A D^{-1/2}` without materializing it.
struct NormalizedMatvec<'a> {
    g: &'a Graph,
    dinv_sqrt: Vec<f64>,
    scratch: std::cell::RefCell<Vec<f64>>,
}

impl<'a> NormalizedMatvec<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.vertex_count();
        let dinv_sqrt = (0..n)
            .map(|u| 1.0 / (g.degree(u as u32) as f64).sqrt())
            .collect();
        NormalizedMatvec {
            g,
            dinv_sqrt,
            scratch: std::cell::RefCell::new(vec![0.0; n]),
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let mut tmp = self.scratch.borrow_mut();
        for (i, t) in tmp.iter_mut().enumerate() {
            *t = x[i] * self.dinv_sqrt[i];
        }
        for u in 0..x.len() {
            let mut acc = 0.0;
            for &v in self.g.neighbors(u as u32) {
                acc += tmp[v as usize];
            }
            out[u] = acc * self.dinv_sqrt[u];
        }
    }
}

fn seeded_vector(n: usize, salt: u64) -> Vec<f64> {
    let mut state = salt ^ 0x9E3779B97F4A7C15;
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Power iteration for the dominant eigenvalue of a symmetric PSD-shifted
/// operator, deflating against `deflate` (unit vector) if given.
/// Returns `(eigenvalue, residual, matvecs_used)`.
fn power_iterate(
    apply: &mut dyn FnMut(&[f64], &mut [f64]),
    n: usize,
    deflate: Option<&[f64]>,
    tol: f64,
    max_matvecs: usize,
) -> Result<(f64, f64, usize)> {
    let mut x = seeded_vector(n, 0x5EED);
    let project = |x: &mut [f64]| {
        if let Some(d) = deflate {
            let c = dot(x, d);
            for (xi, di) in x.iter_mut().zip(d) {
                *xi -= c * di;
            }
        }
    };
    project(&mut x);
    let nx = norm2(&x);
    if nx == 0.0 {
        return Err(Error::Numerical {
            what: "power iteration start vector".into(),
            residual: f64::INFINITY,
        });
    }
    for xi in &mut x {
        *xi /= nx;
    }
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut used = 0usize;
    while used < max_matvecs {
        apply(&x, &mut y);
        used += 1;
        project(&mut y);
        let theta = dot(&x, &y);
        let mut r = 0.0;
        for i in 0..n {
            let e = y[i] - theta * x[i];
            r += e * e;
        }
        residual = r.sqrt();
        let ny = norm2(&y);
        if ny == 0.0 {
            // operator annihilates the complement; eigenvalue is 0
            return Ok((0.0, 0.0, used));
        }
        for i in 0..n {
            x[i] = y[i] / ny;
        }
        if residual <= tol {
            return Ok((theta, residual, used));
        }
    }
    Err(Error::Numerical {
        what: "power iteration".into(),
        residual,
    })
}

pub fn second_eigenvalue_sparse(g: &Graph, tol: f64) -> Result<SpectrumResult> {
    spectral_precheck(g)?;
    let n = g.vertex_count();
    let m = NormalizedMatvec::new(g);
    // exact Perron vector of the symmetric normalization: sqrt(deg), normalized
    let mut perron: Vec<f64> = (0..n).map(|u| (g.degree(u as u32) as f64).sqrt()).collect();
    let np = norm2(&perron);
    for p in &mut perron {
        *p /= np;
    }
    // run 1: (S + I)/2 deflated by the Perron vector -> largest signed non-trivial
    let mut budget_used = 0usize;
    let (theta1, res1, used1) = power_iterate(
        &mut |x: &[f64], out: &mut [f64]| {
            m.apply(x, out);
            for i in 0..n {
                out[i] = 0.5 * (out[i] + x[i]);
            }
        },
        n,
        Some(&perron),
        tol / 2.0,
        MAX_MATVECS,
    )?;
    budget_used += used1;
    let lambda_top = 2.0 * theta1 - 1.0;
    // run 2: (I - S)/2, dominant eigenvalue locates the most negative one
    let (theta2, res2, _used2) = power_iterate(
        &mut |x: &[f64], out: &mut [f64]| {
            m.apply(x, out);
            for i in 0..n {
                out[i] = 0.5 * (x[i] - out[i]);
            }
        },
        n,
        None,
        tol / 2.0,
        MAX_MATVECS.saturating_sub(budget_used),
    )?;
    let lambda_bottom = 1.0 - 2.0 * theta2;
    let lambda = lambda_top.abs().max(lambda_bottom.abs());
    Ok(SpectrumResult {
        lambda,
        method: SpectrumMethod::PowerDeflate,
        residual: (2.0 * res1).max(2.0 * res2),
        all_eigenvalues: None,
    })
}

/// The zig-zag function
/// `f(l1, l2) = (1 - l2^2) l1 / 2 + sqrt((1 - l2^2)^2 l1^2 + 4 l2^2) / 2`.
/// Satisfies `f(a, b) <= a + b` and `f < 1` when both arguments are `< 1`.
pub fn zigzag_function(l1: f64, l2: f64) -> Result<f64> {
    for v in [l1, l2] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!(
                "zig-zag function arguments must lie in [0,1], got {v}"
            )));
        }
    }
    let w = 1.0 - l2 * l2;
    Ok(0.5 * w * l1 + 0.5 * (w * w * l1 * l1 + 4.0 * l2 * l2).sqrt())
}

/// `sqrt(1/2 + lambda_zz / 2)`, the walk-graph bound from the zig-zag value.
pub fn main_bound(lambda_zz: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda_zz) {
        return Err(Error::Domain(format!(
            "main bound argument must lie in [0,1], got {lambda_zz}"
        )));
    }
    Ok((0.5 + 0.5 * lambda_zz).sqrt())
}

/// An abstract linear operator on `R^n` with access to its transpose.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply_into(&self, x: &[f64], out: &mut [f64]);
    fn apply_transpose_into(&self, x: &[f64], out: &mut [f64]);
}

/// Spectral norm of `op` restricted to the orthogonal complement of
/// `excluded`. Requires `op` to fix the span of `excluded` and map its
/// complement into itself; violations are structural errors. Computed by
/// power iteration on `M^T M` with the projection re-applied each step.
pub fn operator_norm_on_complement(
    op: &dyn LinearOperator,
    excluded: &[f64],
    tol: f64,
) -> Result<f64> {
    let n = op.dim();
    if excluded.len() != n {
        return Err(Error::Domain("excluded vector dimension mismatch".into()));
    }
    let ne = norm2(excluded);
    if ne == 0.0 {
        return Err(Error::Domain("excluded vector must be non-zero".into()));
    }
    let e: Vec<f64> = excluded.iter().map(|v| v / ne).collect();

    // invariance: op must map span(e) to itself ...
    let mut y = vec![0.0; n];
    op.apply_into(&e, &mut y);
    let c = dot(&y, &e);
    let mut perp = 0.0;
    for i in 0..n {
        let d = y[i] - c * e[i];
        perp += d * d;
    }
    if perp.sqrt() > 100.0 * tol.max(1e-14) {
        return Err(Error::Structural(format!(
            "operator does not fix the excluded span (perp residual {:e})",
            perp.sqrt()
        )));
    }
    // ... and the complement to the complement
    let mut probe = seeded_vector(n, 0x0B5E);
    let cp = dot(&probe, &e);
    for (p, ei) in probe.iter_mut().zip(&e) {
        *p -= cp * ei;
    }
    let npb = norm2(&probe);
    for p in &mut probe {
        *p /= npb;
    }
    op.apply_into(&probe, &mut y);
    if dot(&y, &e).abs() > 100.0 * tol.max(1e-14) {
        return Err(Error::Structural(format!(
            "operator leaks from the complement into the excluded span ({:e})",
            dot(&y, &e).abs()
        )));
    }

    let project = |x: &mut Vec<f64>| {
        let c = dot(x, &e);
        for (xi, ei) in x.iter_mut().zip(&e) {
            *xi -= c * ei;
        }
    };
    let mut tmp = vec![0.0; n];
    let (theta, _res, _used) = power_iterate(
        &mut |x: &[f64], out: &mut [f64]| {
            // out = P op^T P op P x  (x is already in the complement)
            let mut px = x.to_vec();
            project(&mut px);
            op.apply_into(&px, &mut tmp);
            let mut ptmp = tmp.clone();
            project(&mut ptmp);
            op.apply_transpose_into(&ptmp, out);
            let c = dot(out, &e);
            for (oi, ei) in out.iter_mut().zip(&e) {
                *oi -= c * ei;
            }
        },
        n,
        Some(&e),
        tol,
        MAX_MATVECS,
    )?;
    Ok(theta.max(0.0).sqrt())
}
