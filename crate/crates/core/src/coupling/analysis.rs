//! Structural measures on coupling matrices: delta-likeness, bandwidth,
//! confinement blocks and sign-pattern comparisons.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

/// Uncentered cosine similarity of two complex matrices viewed as real
/// vectors. Insensitive to a global positive scale, sensitive to sign.
pub fn scale_free_correlation(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum();
    let na = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na * nb)
}

pub fn mean_abs_diagonal(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    (0..n).map(|i| a[(i, i)].abs()).sum::<f64>() / n as f64
}

/// `max |off-diagonal| / mean |diagonal|`.
pub fn offdiag_ratio(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut off: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off = off.max(a[(i, j)].abs());
            }
        }
    }
    let d = mean_abs_diagonal(a);
    if d == 0.0 {
        if off == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        off / d
    }
}

/// Number of super-diagonals whose largest magnitude exceeds half the mean
/// absolute diagonal.
pub fn half_max_bandwidth(a: &DMatrix<f64>) -> usize {
    let n = a.nrows();
    let half = 0.5 * mean_abs_diagonal(a);
    (1..n)
        .filter(|&s| (0..n - s).map(|i| a[(i, i + s)].abs()).fold(0.0, f64::max) > half)
        .count()
}

/// Cut across the diagonal through the centre: `a[c + j][c - j]` for the
/// offsets `j` that stay inside the matrix, ordered by `j` ascending.
pub fn diagonal_crossection(a: &DMatrix<f64>) -> Vec<(i64, f64)> {
    let n = a.nrows() as i64;
    let c = (n - 1) / 2;
    (-c..=c)
        .filter(|j| c + j >= 0 && c + j < n && c - j >= 0 && c - j < n)
        .map(|j| (j, a[((c + j) as usize, (c - j) as usize)]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfinementBlock {
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub extent: usize,
    pub peak: usize,
    /// Nearest-neighbour couplings `(n, n+1)` inside the block that are negative.
    pub negative_neighbours: usize,
    pub neighbours: usize,
    /// Sum of the nearest-neighbour couplings inside the block.
    pub neighbour_sum: f64,
    /// All diagonal entries of the block are positive.
    pub positive_diagonal: bool,
}

impl ConfinementBlock {
    /// Block diagonal positive, most nearest-neighbour couplings inside it
    /// negative and their sum negative.
    pub fn is_flanked(&self) -> bool {
        self.positive_diagonal && 2 * self.negative_neighbours > self.neighbours && self.neighbour_sum < 0.0
    }

    /// Every nearest-neighbour coupling inside the block is negative.
    pub fn is_strictly_flanked(&self) -> bool {
        self.positive_diagonal && self.neighbours > 0 && self.negative_neighbours == self.neighbours
    }
}

/// Maximal contiguous run of modes around the largest diagonal entry whose
/// diagonal stays at or above half of that maximum.
pub fn confinement_block(theta: &DMatrix<f64>) -> ConfinementBlock {
    let n = theta.nrows();
    let diag: Vec<f64> = (0..n).map(|i| theta[(i, i)]).collect();
    let (peak, max) = diag
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    let half = 0.5 * max;
    let mut start = peak;
    while start > 0 && diag[start - 1] >= half {
        start -= 1;
    }
    let mut end = peak;
    while end + 1 < n && diag[end + 1] >= half {
        end += 1;
    }
    let neighbours = end - start;
    let negative_neighbours = (start..end).filter(|&i| theta[(i, i + 1)] < 0.0).count();
    let neighbour_sum = (start..end).map(|i| theta[(i, i + 1)]).sum();
    ConfinementBlock {
        start,
        end,
        extent: end - start + 1,
        peak,
        negative_neighbours,
        neighbours,
        neighbour_sum,
        positive_diagonal: diag[start..=end].iter().all(|v| *v > 0.0),
    }
}

/// Fraction of significant entries (`|a| > threshold * max|a|`) whose sign
/// matches in `b`.
pub fn sign_agreement(a: &DMatrix<f64>, b: &DMatrix<f64>, threshold: f64) -> f64 {
    let cut = threshold * a.amax();
    let mut total = 0usize;
    let mut same = 0usize;
    for (x, y) in a.iter().zip(b.iter()) {
        if x.abs() > cut {
            total += 1;
            if x.signum() == y.signum() {
                same += 1;
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        same as f64 / total as f64
    }
}

/// Largest entry modulus.
pub fn max_norm(a: &DMatrix<Complex64>) -> f64 {
    a.iter().fold(0.0, |m, c| m.max(c.norm()))
}

pub fn real_part(a: &DMatrix<Complex64>) -> DMatrix<f64> {
    a.map(|c| c.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth_and_ratio_on_a_tridiagonal() {
        let a = DMatrix::from_fn(5, 5, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.5,
            2 => 0.2,
            _ => 0.0,
        });
        assert_eq!(half_max_bandwidth(&a), 1);
        assert!((offdiag_ratio(&a) - 0.75).abs() < 1e-15);
        let id = DMatrix::<f64>::identity(4, 4);
        assert_eq!(half_max_bandwidth(&id), 0);
        assert_eq!(offdiag_ratio(&id), 0.0);
    }

    #[test]
    fn crossection_runs_across_the_diagonal() {
        let a = DMatrix::from_fn(5, 5, |i, j| (10 * i + j) as f64);
        let c = diagonal_crossection(&a);
        assert_eq!(c, vec![(-2, 4.0), (-1, 13.0), (0, 22.0), (1, 31.0), (2, 40.0)]);
    }

    #[test]
    fn block_detection() {
        let diag = [0.1, 0.6, 0.9, 1.0, 0.7, 0.2];
        let a = DMatrix::from_fn(6, 6, |i, j| if i == j { diag[i] } else if i.abs_diff(j) == 1 { -0.3 } else { 0.05 });
        let b = confinement_block(&a);
        assert_eq!((b.start, b.end, b.extent, b.peak), (1, 4, 4, 3));
        assert!(b.is_flanked() && b.is_strictly_flanked());
        let mut c = a.clone();
        c[(3, 4)] = 0.1;
        let b = confinement_block(&c);
        assert!(b.is_flanked() && !b.is_strictly_flanked());
        c[(2, 3)] = 0.1;
        assert!(!confinement_block(&c).is_flanked());
        assert_eq!(sign_agreement(&a, &a, 0.01), 1.0);
        assert_eq!(sign_agreement(&a, &(-&a), 0.01), 0.0);
    }

    #[test]
    fn correlation_is_scale_free() {
        let a = DMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 - j as f64, 0.3 * (i * j) as f64));
        let b = &a * Complex64::new(4.0, 0.0);
        assert!((scale_free_correlation(&a, &b) - 1.0).abs() < 1e-14);
        assert!((scale_free_correlation(&a, &(-b)) + 1.0).abs() < 1e-14);
    }
}
