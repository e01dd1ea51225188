use nalgebra::{DMatrix, DVector};

/// Dense row-major K×K accumulator for the normal equations `A x = b`.
#[derive(Debug, Clone)]
pub(crate) struct NormalEquations {
    k: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl NormalEquations {
    /// Starts from `scale * base + ridge * I`.
    pub(crate) fn new(k: usize, base: &[f64], scale: f64, ridge: f64) -> Self {
        let mut a: Vec<f64> = base.iter().map(|x| x * scale).collect();
        for d in 0..k {
            a[d * k + d] += ridge;
        }
        NormalEquations {
            k,
            a,
            b: vec![0.0; k],
        }
    }

    /// Adds `weight * v vᵀ` to A.
    pub(crate) fn add_outer(&mut self, v: &[f64], weight: f64) {
        let k = self.k;
        for r in 0..k {
            let wr = weight * v[r];
            if wr == 0.0 {
                continue;
            }
            let row = &mut self.a[r * k..(r + 1) * k];
            for (c, x) in row.iter_mut().enumerate() {
                *x += wr * v[c];
            }
        }
    }

    /// Adds `weight * v` to b.
    pub(crate) fn add_rhs(&mut self, v: &[f64], weight: f64) {
        for (x, y) in self.b.iter_mut().zip(v) {
            *x += weight * y;
        }
    }

    /// Cholesky solve; `None` if A is not positive definite.
    pub(crate) fn solve(self) -> Option<Vec<f64>> {
        let k = self.k;
        let a = DMatrix::from_row_slice(k, k, &self.a);
        let chol = a.cholesky()?;
        let x = chol.solve(&DVector::from_vec(self.b));
        Some(x.iter().copied().collect())
    }
}

/// Σ vᵢ vᵢᵀ over the rows of a row-major `n × k` matrix, as row-major K×K.
pub(crate) fn gram(rows: &[f64], k: usize) -> Vec<f64> {
    let mut g = vec![0.0; k * k];
    for v in rows.chunks_exact(k) {
        for r in 0..k {
            let vr = v[r];
            if vr == 0.0 {
                continue;
            }
            for c in 0..k {
                g[r * k + c] += vr * v[c];
            }
        }
    }
    g
}
