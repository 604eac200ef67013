//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the numerical kernels under test: the transfer
//! oracle is a scalar three-term recursion in double-double arithmetic, and
//! the eigen oracle is nalgebra's dense symmetric solver. Agreement between
//! a kernel and its oracle is therefore evidence, not tautology.

#![allow(dead_code)]

use anderson_spectra::model::TridiagonalHamiltonian;

// ---------------------------------------------------------------------------
// Double-double arithmetic (~31 significant digits), enough that the oracle's
// own rounding error is negligible against the 1e-8 comparison tolerance
// even after 10^4 recursion steps.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // Requires |a| >= |b| (holds where used).
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(Dd {
            hi: -o.hi,
            lo: -o.lo,
        })
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Multiplication by a power of two: exact, no rounding.
    fn scale_pow2(self, k: f64) -> Dd {
        Dd {
            hi: self.hi * k,
            lo: self.lo * k,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.hi
    }
}

/// Scalar solution of `ξ_{j+1} = (E − λ v_j) ξ_j − ξ_{j−1}` with
/// `(ξ_1, ξ_0) = (1, 0)`, carried in double-double precision with exact
/// power-of-two renormalization. Returns the unit vector along
/// `(ξ_{N+1}, ξ_N)` — the image of the first basis vector under the length-N
/// transfer product, up to the positive scale factor.
pub fn recursion_direction(energy: f64, lambda: f64, values: &[i8]) -> (f64, f64) {
    let e = Dd::new(energy);
    let lam = Dd::new(lambda);
    let mut prev = Dd::new(0.0);
    let mut cur = Dd::new(1.0);
    for &v in values {
        let a = e.sub(lam.mul(Dd::new(v as f64)));
        let next = a.mul(cur).sub(prev);
        prev = cur;
        cur = next;
        let m = cur.hi.abs().max(prev.hi.abs());
        if m > 1e120 || (m != 0.0 && m < 1e-120) {
            // Exact rescale keeps the direction untouched.
            let k = (-m.log2().round() as i32).clamp(-1000, 1000);
            let k = 2f64.powi(k);
            cur = cur.scale_pow2(k);
            prev = prev.scale_pow2(k);
        }
    }
    let (x, y) = (cur.to_f64(), prev.to_f64());
    let norm = x.hypot(y);
    assert!(norm > 0.0, "oracle recursion collapsed to zero");
    (x / norm, y / norm)
}

// ---------------------------------------------------------------------------
// Dense symmetric eigensolver oracle.
// ---------------------------------------------------------------------------

/// Full spectrum and orthonormal eigenvectors via nalgebra's dense symmetric
/// solver, ascending, with the same sign convention as the library (largest
/// |entry| positive, earliest such entry on ties).
pub fn dense_eigen(h: &TridiagonalHamiltonian) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = h.size();
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for (i, d) in h.diagonal().iter().enumerate() {
        m[(i, i)] = *d;
    }
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = 1.0;
        m[(i + 1, i)] = 1.0;
    }
    let se = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = se.eigenvectors.column(i).iter().copied().collect();
            let mut best = 0usize;
            for (j, x) in v.iter().enumerate() {
                if x.abs() > v[best].abs() {
                    best = j;
                }
            }
            if v[best] < 0.0 {
                for x in &mut v {
                    *x = -*x;
                }
            }
            v
        })
        .collect();
    (values, vectors)
}

/// Eigenvalues only.
pub fn dense_eigenvalues(h: &TridiagonalHamiltonian) -> Vec<f64> {
    dense_eigen(h).0
}
