//! Dense Hermitian eigendecomposition used to exponentiate gate-error generators.

use num_complex::Complex;

use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi eigendecomposition of a real symmetric `n x n` matrix (row-major).
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvector `k` stored in column `k`.
pub(crate) fn symmetric_eigen<T: Real>(mut a: Vec<T>, n: usize) -> (Vec<T>, Vec<T>) {
    debug_assert_eq!(a.len(), n * n);
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let two = T::one() + T::one();
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .fold(T::zero(), |acc, (p, q)| acc + a[p * n + q] * a[p * n + q]);
        let diag: T = (0..n).fold(T::zero(), |acc, i| acc + a[i * n + i] * a[i * n + i]);
        if off <= T::epsilon() * T::epsilon() * (diag + off) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

/// `exp(-iH)` for a Hermitian `n x n` matrix `h` (row-major).
///
/// `H = A + iB` is embedded as the real symmetric `[[A, -B], [B, A]]`; real
/// functions of `H` map to the same functions of the embedding, so
/// `exp(-iH) = cos H - i sin H` is read back from the blocks of `cos` and `sin`.
pub(crate) fn hermitian_exp_neg_i<T: Real>(h: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let m = 2 * n;
    let mut emb = vec![T::zero(); m * m];
    for r in 0..n {
        for c in 0..n {
            let z = h[r * n + c];
            emb[r * m + c] = z.re;
            emb[(r + n) * m + (c + n)] = z.re;
            emb[r * m + (c + n)] = -z.im;
            emb[(r + n) * m + c] = z.im;
        }
    }
    let (vals, vecs) = symmetric_eigen(emb, m);
    let apply = |f: &dyn Fn(T) -> T| {
        let fv: Vec<T> = vals.iter().map(|&x| f(x)).collect();
        let mut out = vec![T::zero(); m * m];
        for r in 0..m {
            for c in 0..m {
                out[r * m + c] = (0..m).fold(T::zero(), |acc, k| {
                    acc + vecs[r * m + k] * fv[k] * vecs[c * m + k]
                });
            }
        }
        out
    };
    let cos = apply(&|x: T| x.cos());
    let sin = apply(&|x: T| x.sin());
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let (cr, ci) = (cos[r * m + c], cos[(r + n) * m + c]);
            let (sr, si) = (sin[r * m + c], sin[(r + n) * m + c]);
            out.push(Complex::new(cr + si, ci - sr));
        }
    }
    out
}
