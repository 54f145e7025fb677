use super::{CMatrix, C64};
use crate::error::{contract, Result};

/// Polynomial with complex coefficients in ascending power order.
///
/// Trailing (highest-power) exact zeros are trimmed on construction so the
/// last stored coefficient is the nonzero leading one.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coefficients: Vec<C64>,
}

impl ComplexPolynomial {
    pub fn new(mut coefficients: Vec<C64>) -> Result<Self> {
        if coefficients
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(contract("polynomial has non-finite coefficients"));
        }
        while coefficients
            .last()
            .is_some_and(|c| *c == C64::new(0.0, 0.0))
        {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            return Err(contract("zero polynomial has no roots"));
        }
        Ok(Self { coefficients })
    }

    /// Expands `lead · Π (z − rᵢ)`.
    pub fn from_roots(roots: &[C64], lead: C64) -> Self {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        Self {
            coefficients: coeffs,
        }
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coefficients
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coefficients.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }
}

/// All `degree` roots (with multiplicity) of `p`.
///
/// Coefficients are scaled to unit maximum magnitude, the monic companion
/// matrix is diagonally balanced, and its eigenvalues are taken from a
/// complex Schur form. Each root then receives a guarded Newton polish.
pub fn polynomial_roots(p: &ComplexPolynomial) -> Result<Vec<C64>> {
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = p.max_abs_coefficient();
    let scaled = ComplexPolynomial {
        coefficients: p.coefficients.iter().map(|c| c / scale).collect(),
    };
    let lead = scaled.coefficients[n];
    if lead.norm() == 0.0 {
        return Err(contract("leading coefficient vanished after scaling"));
    }

    if n == 1 {
        return Ok(vec![-scaled.coefficients[0] / lead]);
    }

    // Companion matrix: ones on the subdiagonal, −cᵢ/cₙ in the last column.
    let mut companion = CMatrix::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        companion[(i, n - 1)] = -scaled.coefficients[i] / lead;
    }
    balance(&mut companion);

    let schur = nalgebra::Schur::try_new(companion, f64::EPSILON, 100 * n)
        .ok_or(crate::Error::NoConvergence(n))?;
    let (_, t) = schur.unpack();
    let mut roots: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();

    for r in roots.iter_mut() {
        polish(&scaled, r);
    }
    Ok(roots)
}

/// Parlett–Reinsch diagonal similarity scaling by powers of two.
fn balance(a: &mut CMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += a[(j, i)].l1_norm();
                    row += a[(i, j)].l1_norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut g = row / RADIX;
            while col < g {
                f *= RADIX;
                col *= RADIX * RADIX;
            }
            g = row * RADIX;
            while col > g {
                f /= RADIX;
                col /= RADIX * RADIX;
            }
            if (col + row) / f < 0.95 * total {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

fn polish(p: &ComplexPolynomial, root: &mut C64) {
    let mut residual = p.eval(*root).norm();
    for _ in 0..3 {
        if residual == 0.0 {
            return;
        }
        let (value, slope) = p.eval_with_derivative(*root);
        if slope.norm() == 0.0 {
            return;
        }
        let candidate = *root - value / slope;
        let next = p.eval(candidate).norm();
        if !(next < residual) {
            return;
        }
        *root = candidate;
        residual = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    fn assert_roots(got: Vec<C64>, want: &[C64], tol: f64) {
        let mut remaining = want.to_vec();
        for r in got {
            let (idx, dist) = remaining
                .iter()
                .enumerate()
                .map(|(i, w)| (i, (w - r).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(dist < tol, "root {r} off by {dist}");
            remaining.swap_remove(idx);
        }
        assert!(remaining.is_empty());
    }

    #[test]
    fn z_squared_minus_one() {
        let p = ComplexPolynomial::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_roots(
            polynomial_roots(&p).unwrap(),
            &[c(1.0, 0.0), c(-1.0, 0.0)],
            1e-12,
        );
    }

    #[test]
    fn z_squared_plus_one() {
        let p = ComplexPolynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_roots(
            polynomial_roots(&p).unwrap(),
            &[c(0.0, 1.0), c(0.0, -1.0)],
            1e-12,
        );
    }

    #[test]
    fn conjugate_reciprocal_pair() {
        let r1 = C64::from_polar(0.9, PI / 4.0);
        let r2 = 1.0 / C64::from_polar(0.9, -PI / 4.0);
        // (z − r1)(z − r2) = z² − (r1 + r2) z + r1 r2
        let p = ComplexPolynomial::new(vec![r1 * r2, -(r1 + r2), c(1.0, 0.0)]).unwrap();
        assert_roots(polynomial_roots(&p).unwrap(), &[r1, r2], 1e-8);
    }

    #[test]
    fn degree_zero_and_zero_polynomial() {
        let p = ComplexPolynomial::new(vec![c(3.0, 1.0)]).unwrap();
        assert!(polynomial_roots(&p).unwrap().is_empty());
        assert!(ComplexPolynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0)]).is_err());
        assert!(ComplexPolynomial::new(vec![]).is_err());
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = ComplexPolynomial::new(vec![c(-2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(p.degree(), 1);
        assert_roots(polynomial_roots(&p).unwrap(), &[c(2.0, 0.0)], 1e-14);
    }

    #[test]
    fn high_degree_unit_circle_pairs() {
        // Degree-44 polynomial built from 22 conjugate-reciprocal pairs.
        let mut roots = Vec::new();
        for k in 0..22 {
            let angle = -3.0 + 0.27 * k as f64;
            let radius = 0.6 + 0.017 * k as f64;
            let z = C64::from_polar(radius, angle);
            roots.push(z);
            roots.push(1.0 / z.conj());
        }
        let p = ComplexPolynomial::from_roots(&roots, c(0.3, -0.7));
        let got = polynomial_roots(&p).unwrap();
        assert_eq!(got.len(), 44);
        let scale = p.max_abs_coefficient();
        for r in &got {
            assert!(p.eval(*r).norm() / scale <= 1e-6);
        }
        assert_roots(sorted(got), &roots, 1e-6);
    }
}
