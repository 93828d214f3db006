use super::{BooleanFunction, RangeTag};

/// Fourier coefficients `f̂(S)` indexed by subset mask (bit `i` set iff `i ∈ S`).
#[derive(Debug, Clone, PartialEq)]
pub struct FourierExpansion {
    n: usize,
    coeffs: Vec<f64>,
}

impl FourierExpansion {
    /// Panics if `coeffs.len() != 2^n`.
    pub fn new(n: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), 1 << n, "coefficient table must have 2^n entries");
        Self { n, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    /// `f̂(∅) = E[f]`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0]
    }

    /// `Σ_S f̂(S)^2`, equal to `E[f^2]` by Parseval.
    pub fn total_weight(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Fourier weight at each degree `0..=n`.
    pub fn degree_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n + 1];
        for (s, c) in self.coeffs.iter().enumerate() {
            w[s.count_ones() as usize] += c * c;
        }
        w
    }

    /// Masks sorted by decreasing `|f̂(S)|`, ties by increasing mask.
    pub fn top_by_magnitude(&self, k: usize) -> Vec<(usize, f64)> {
        let mut idx: Vec<usize> = (0..self.coeffs.len()).collect();
        idx.sort_by(|&a, &b| self.coeffs[b].abs().total_cmp(&self.coeffs[a].abs()).then(a.cmp(&b)));
        idx.into_iter().take(k).map(|s| (s, self.coeffs[s])).collect()
    }
}

/// Unnormalized in-place Walsh–Hadamard butterfly:
/// `data[S] <- Σ_b data[b] (-1)^{|b ∧ S|}`.
pub fn wht_in_place(data: &mut [f64]) {
    let len = data.len();
    assert!(
        len.is_power_of_two(),
        "transform length must be a power of two, got {len}"
    );
    let mut h = 1;
    while h < len {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
}

/// `f̂(S) = 2^{-n} Σ_b f(b) (-1)^{|b ∧ S|}`, in `O(n 2^n)`.
pub fn wht(f: &BooleanFunction) -> FourierExpansion {
    let mut coeffs = f.values().to_vec();
    wht_in_place(&mut coeffs);
    let scale = 1.0 / coeffs.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    FourierExpansion { n: f.n(), coeffs }
}

/// `f(b) = Σ_S f̂(S) (-1)^{|b ∧ S|}`; the result is tagged `real`.
pub fn inverse_wht(g: &FourierExpansion) -> BooleanFunction {
    let mut values = g.coeffs.clone();
    wht_in_place(&mut values);
    BooleanFunction::from_parts(g.n, values, RangeTag::Real)
}
