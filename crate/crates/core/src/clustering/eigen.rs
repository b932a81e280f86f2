//! Newman's leading-eigenvector method: repeated spectral bisection of the
//! (generalized) modularity matrix.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{Assignment, Clusterer, NodeClusterAssignment};
use crate::error::{Error, Result};
use crate::graph::{Graph, Subgraph};

const SPLIT_EPS: f64 = 1e-9;

/// Eigen-decomposition of a dense symmetric matrix by Householder
/// tridiagonalization and implicit QL. Returns eigenvalues in ascending order
/// and the matching eigenvectors as columns (`vectors[row][col]`).
///
/// Fails if the QL sweep needs more than `10 * n` iterations in total.
pub fn symmetric_eigen(matrix: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = matrix.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut v: Vec<Vec<f64>> = matrix.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    ql_implicit(&mut v, &mut d, &mut e, 10 * n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = (0..n)
        .map(|row| order.iter().map(|&col| v[row][col]).collect())
        .collect();
    Ok((values, vectors))
}

#[allow(clippy::needless_range_loop)]
fn tridiagonalize(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    d.copy_from_slice(&v[n - 1]);
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for &dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

fn ql_implicit(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64], max_iter: usize) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let mut iterations = 0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                iterations += 1;
                if iterations > max_iter {
                    return Err(Error::EigenNoConvergence {
                        size: n,
                        iterations: max_iter,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Connected components of the subgraph of `g` induced by `members`.
fn components(g: &Graph, members: &[usize], mark: &mut [usize], stamp: usize) -> Vec<Vec<usize>> {
    for &v in members {
        mark[v] = stamp;
    }
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for &start in members {
        if mark[start] != stamp {
            continue;
        }
        mark[start] = usize::MAX;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &u in g.neighbors(v) {
                if mark[u] == stamp {
                    mark[u] = usize::MAX;
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Tries to bisect `group`; `None` when no split increases modularity.
fn bisect(g: &Graph, group: &[usize], two_m: f64) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let n = group.len();
    if n < 2 {
        return Ok(None);
    }
    let mut b = vec![vec![0.0; n]; n];
    for (x, &i) in group.iter().enumerate() {
        let ki = g.degree(i) as f64;
        for (y, &j) in group.iter().enumerate() {
            let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
            b[x][y] = a - ki * g.degree(j) as f64 / two_m;
        }
    }
    for (x, row) in b.iter_mut().enumerate() {
        let row_sum: f64 = row.iter().sum();
        row[x] -= row_sum;
    }
    let (values, vectors) = symmetric_eigen(&b)?;
    if values[n - 1] <= SPLIT_EPS {
        return Ok(None);
    }
    let s: Vec<f64> = (0..n)
        .map(|x| if vectors[x][n - 1] >= 0.0 { 1.0 } else { -1.0 })
        .collect();
    let quad: f64 = (0..n)
        .map(|x| s[x] * b[x].iter().zip(&s).map(|(bxy, sy)| bxy * sy).sum::<f64>())
        .sum();
    let gain = quad / (2.0 * two_m);
    let (pos, neg): (Vec<usize>, Vec<usize>) = (0..n).partition(|&x| s[x] > 0.0);
    if gain <= SPLIT_EPS || pos.is_empty() || neg.is_empty() {
        return Ok(None);
    }
    Ok(Some((
        pos.into_iter().map(|x| group[x]).collect(),
        neg.into_iter().map(|x| group[x]).collect(),
    )))
}

/// Leading-eigenvector communities. Connected components are split first;
/// each group is then bisected by the sign of the leading eigenvector of its
/// generalized modularity matrix until the leading eigenvalue or the
/// modularity gain is not positive.
pub fn leading_eigenvector(g: &Graph) -> Result<NodeClusterAssignment> {
    if g.n_edges() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let two_m = 2.0 * g.n_edges() as f64;
    let mut mark = vec![usize::MAX; g.n_nodes()];
    let all: Vec<usize> = (0..g.n_nodes()).collect();
    let mut stamp = 0;
    let mut pending: VecDeque<Vec<usize>> = components(g, &all, &mut mark, stamp).into();
    let mut raw = vec![0usize; g.n_nodes()];
    let mut finished = 0;
    while let Some(group) = pending.pop_front() {
        match bisect(g, &group, two_m)? {
            None => {
                for &v in &group {
                    raw[v] = finished;
                }
                finished += 1;
            }
            Some((left, right)) => {
                for part in [left, right] {
                    stamp += 1;
                    pending.extend(components(g, &part, &mut mark, stamp));
                }
            }
        }
    }
    Ok(NodeClusterAssignment::from_raw(
        &raw,
        LeadingEigenvector::NAME,
    ))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LeadingEigenvector;

impl LeadingEigenvector {
    pub const NAME: &'static str = "eigen";
}

impl Clusterer for LeadingEigenvector {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn cluster(&self, infected: &Subgraph) -> Result<Assignment> {
        leading_eigenvector(infected.graph()).map(Assignment::Nodes)
    }
}
