//! Small numeric helpers shared across the crate.

/// log(exp(a) + exp(b)) without overflow for arguments far from zero.
///
/// Returns `-inf` when both inputs are `-inf`.
#[inline]
pub fn logsumexp2(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// log Σ exp(x_i), max-shifted for stability. Empty slices and all-`-inf`
/// slices give `-inf`.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - hi).exp()).sum();
    hi + sum.ln()
}

/// Softmax of `xs` written into `out` (same length). Entries that are `-inf`
/// get weight zero. Panics in debug builds if every entry is `-inf`.
pub fn softmax_into(xs: &[f64], out: &mut [f64]) {
    debug_assert_eq!(xs.len(), out.len());
    let lse = logsumexp(xs);
    debug_assert!(lse > f64::NEG_INFINITY, "softmax over all -inf entries");
    for (o, &x) in out.iter_mut().zip(xs) {
        *o = if x == f64::NEG_INFINITY {
            0.0
        } else {
            (x - lse).exp()
        };
    }
}

/// Spectral radius of a nonnegative square matrix via power iteration.
///
/// For nonnegative matrices the dominant eigenvalue is real and nonnegative
/// (Perron-Frobenius), so power iteration from a strictly positive start
/// vector converges to it.
pub fn spectral_radius(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    if n == 0 {
        return 0.0;
    }
    let mut v = vec![1.0_f64; n];
    let mut radius = 0.0;
    for _ in 0..200 {
        let mut next = vec![0.0_f64; n];
        for (i, row) in matrix.iter().enumerate() {
            next[i] = row.iter().zip(&v).map(|(a, x)| a * x).sum();
        }
        let norm: f64 = next.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if norm == 0.0 {
            return 0.0;
        }
        for x in &mut next {
            *x /= norm;
        }
        if (norm - radius).abs() <= 1e-12 * norm.max(1.0) {
            return norm;
        }
        radius = norm;
        v = next;
    }
    radius
}

/// Mean and the half-width of a normal-approximation 95% confidence interval
/// (1.96 sigma / sqrt(n)). Returns `None` for the half-width when fewer than
/// two samples are available.
pub fn mean_ci95(xs: &[f64]) -> (f64, Option<f64>) {
    if xs.is_empty() {
        return (f64::NAN, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some(1.96 * (var / n).sqrt()))
}

/// Slope of the least-squares line through (ln x_i, ln y_i).
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, y)| y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
