use std::fmt;

/// Storage slot of entry `(i, j)` in the packed upper triangle.
#[inline]
pub const fn tri(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows: 0 → 0,1,2 ; 1 → 3,4 ; 2 → 5
    match i {
        0 => j,
        1 => 2 + j,
        _ => 5,
    }
}

/// Real symmetric matrix of dimension 1, 2 or 3. Only the upper triangle is
/// stored, so symmetry holds by construction.
#[derive(Clone, Copy, PartialEq)]
pub struct SymMatrix {
    n: usize,
    upper: [f64; 6],
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=3).contains(&n), "dimension {n} outside 1..=3");
        Self { n, upper: [0.0; 6] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn scalar(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, s);
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Packed upper triangle in slot order (see [`tri`]).
    pub fn from_packed(n: usize, upper: [f64; 6]) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.upper[tri(i, j)] = upper[tri(i, j)];
            }
        }
        m
    }

    /// Builds from the upper triangle of a row-major square slice.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, rows[i][j]);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[tri(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.upper[tri(i, j)] = v;
    }

    pub fn packed(&self) -> [f64; 6] {
        self.upper
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn det(&self) -> f64 {
        let g = |i, j| self.get(i, j);
        match self.n {
            1 => g(0, 0),
            2 => g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1),
            _ => {
                g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(1, 2))
                    - g(0, 1) * (g(0, 1) * g(2, 2) - g(1, 2) * g(0, 2))
                    + g(0, 2) * (g(0, 1) * g(1, 2) - g(1, 1) * g(0, 2))
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                m = m.max(self.get(i, j).abs());
            }
        }
        m
    }

    /// Frobenius inner product ⟨A, B⟩ = Σᵢⱼ AᵢⱼBᵢⱼ.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> f64 {
        debug_assert_eq!(self.n, other.n);
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.get(i, j) * other.get(i, j);
            }
        }
        s
    }

    pub fn mul_vec(&self, v: &[f64]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            *o = (0..self.n).map(|j| self.get(i, j) * v[j]).sum();
        }
        out
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        self.lincomb(1.0, other, -1.0)
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        let mut m = *self;
        m.upper.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: f64, other: &SymMatrix, b: f64) -> SymMatrix {
        debug_assert_eq!(self.n, other.n);
        let mut m = *self;
        for (v, w) in m.upper.iter_mut().zip(other.upper.iter()) {
            *v = a * *v + b * w;
        }
        m
    }

    /// `Σₖ dₖ qₖ qₖᵀ` for the columns `qₖ` of an orthogonal frame.
    pub fn from_spectral(frame: &[[f64; 3]; 3], values: &[f64]) -> SymMatrix {
        let n = values.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = (0..n).map(|k| values[k] * frame[k][i] * frame[k][j]).sum();
                m.set(i, j, v);
            }
        }
        m
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<f64>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect();
        f.debug_tuple("SymMatrix").field(&rows).finish()
    }
}
