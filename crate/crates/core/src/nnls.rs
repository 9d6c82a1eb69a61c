//! Nonnegative least squares (Lawson–Hanson) for small dense problems.

/// Solution of `min ‖Σ xⱼ colⱼ − b‖` subject to `x ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Nnls {
    pub x: Vec<f64>,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(cols: &[Vec<f64>], x: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (c, &w) in cols.iter().zip(x) {
        if w != 0.0 {
            for (o, v) in out.iter_mut().zip(c) {
                *o += w * v;
            }
        }
    }
    out
}

/// Unconstrained least squares on the selected columns by Householder QR.
/// Returns `None` when the columns are numerically dependent.
fn lstsq(cols: &[&Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let k = cols.len();
    if k > m {
        return None;
    }
    let mut a: Vec<Vec<f64>> = cols.iter().map(|c| c.to_vec()).collect();
    let mut rhs = b.to_vec();
    let scale = a.iter().map(|c| dot(c, c).sqrt()).fold(0.0, f64::max);
    for j in 0..k {
        let norm = a[j][j..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale.max(1.0) {
            return None;
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vv = dot(&v, &v);
        if vv > 0.0 {
            for col in a.iter_mut().skip(j) {
                let f = 2.0 * dot(&v, &col[j..]) / vv;
                for (c, vi) in col[j..].iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
            let f = 2.0 * dot(&v, &rhs[j..]) / vv;
            for (c, vi) in rhs[j..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
    }
    let mut z = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| a[j][i] * z[j]).sum();
        z[i] = (rhs[i] - s) / a[i][i];
    }
    Some(z)
}

pub fn nnls(cols: &[Vec<f64>], b: &[f64]) -> Nnls {
    let dim = b.len();
    let n = cols.len();
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let mut excluded = vec![false; n];
    let bnorm = dot(b, b).sqrt();
    let tol = 1e-13 * bnorm.max(1.0);
    for _ in 0..(3 * n + 10) {
        let r: Vec<f64> = b
            .iter()
            .zip(combine(cols, &x, dim))
            .map(|(bi, ai)| bi - ai)
            .collect();
        let pick = (0..n)
            .filter(|&j| !passive[j] && !excluded[j])
            .map(|j| (j, dot(&cols[j], &r)))
            .filter(|&(_, w)| w > tol)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((j, _)) = pick else { break };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let sel: Vec<&Vec<f64>> = idx.iter().map(|&i| &cols[i]).collect();
            let Some(z) = lstsq(&sel, b) else {
                passive[j] = false;
                excluded[j] = true;
                break;
            };
            if z.iter().all(|&zi| zi > 0.0) {
                for (&i, &zi) in idx.iter().zip(&z) {
                    x[i] = zi;
                }
                break;
            }
            let mut alpha = 1.0;
            for (&i, &zi) in idx.iter().zip(&z) {
                if zi <= 0.0 {
                    alpha = f64::min(alpha, x[i] / (x[i] - zi));
                }
            }
            for (&i, &zi) in idx.iter().zip(&z) {
                x[i] += alpha * (zi - x[i]);
                if x[i] <= 1e-15 {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
        excluded.iter_mut().for_each(|e| *e = false);
    }
    let r = combine(cols, &x, dim);
    let residual = b
        .iter()
        .zip(&r)
        .map(|(bi, ai)| (bi - ai) * (bi - ai))
        .sum::<f64>()
        .sqrt();
    Nnls { x, residual }
}

/// Whether `b` lies in the convex cone generated by `cols`, up to `tol`
/// relative to `max(‖b‖, 1)`.
pub fn in_cone(cols: &[Vec<f64>], b: &[f64], tol: f64) -> bool {
    let bn = dot(b, b).sqrt();
    if bn == 0.0 {
        return true;
    }
    nnls(cols, b).residual <= tol * bn.max(1.0)
}
