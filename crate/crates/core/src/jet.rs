//! Truncated Taylor series in one variable.
//!
//! A jet of order `m` at `x0` stores `c_k = f^(k)(x0) / k!` for `k = 0..=m`.
//! Arithmetic is exact up to the truncation order, which gives derivatives
//! of compositions (arc-length reparametrization, Gram-Schmidt frames)
//! without finite differences.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    /// Builds a jet from plain derivatives `[f, f', f'', ..]`.
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let mut fact = 1.0;
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k > 0 {
                    fact *= k as f64;
                }
                d / fact
            })
            .collect();
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative_at(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeffs.get(k).copied().unwrap_or(0.0) * fact
    }

    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.order()).map(|k| self.derivative_at(k)).collect()
    }

    /// d/dx, one order lower.
    pub fn differentiate(&self) -> Jet {
        if self.order() == 0 {
            return Jet::constant(0.0, 0);
        }
        let coeffs = (1..self.coeffs.len()).map(|k| k as f64 * self.coeffs[k]).collect();
        Jet { coeffs }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    fn common_order(&self, other: &Jet) -> usize {
        self.order().min(other.order())
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(1.0, self.order()).div(self)
    }

    pub fn div(&self, b: &Jet) -> Jet {
        let m = self.common_order(b);
        let mut q = vec![0.0; m + 1];
        for k in 0..=m {
            let mut acc = self.coeffs[k];
            for i in 1..=k {
                acc -= b.coeffs[i] * q[k - i];
            }
            q[k] = acc / b.coeffs[0];
        }
        Jet { coeffs: q }
    }

    pub fn sqrt(&self) -> Jet {
        let m = self.order();
        let mut s = vec![0.0; m + 1];
        s[0] = self.coeffs[0].sqrt();
        for k in 1..=m {
            let mut acc = self.coeffs[k];
            for i in 1..k {
                acc -= s[i] * s[k - i];
            }
            s[k] = acc / (2.0 * s[0]);
        }
        Jet { coeffs: s }
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let m = self.common_order(rhs);
        Jet { coeffs: (0..=m).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let m = self.common_order(rhs);
        Jet { coeffs: (0..=m).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let m = self.common_order(rhs);
        let coeffs = (0..=m)
            .map(|k| (0..=k).map(|i| self.coeffs[i] * rhs.coeffs[k - i]).sum())
            .collect();
        Jet { coeffs }
    }
}

/// A vector whose components are jets in the same variable.
pub type JetVec = Vec<Jet>;

pub fn jet_dot(a: &[Jet], b: &[Jet]) -> Jet {
    assert_eq!(a.len(), b.len());
    let mut acc = &a[0] * &b[0];
    for (x, y) in a.iter().zip(b).skip(1) {
        acc = &acc + &(x * y);
    }
    acc
}

pub fn jet_scale(a: &[Jet], s: &Jet) -> JetVec {
    a.iter().map(|x| x * s).collect()
}

pub fn jet_sub(a: &[Jet], b: &[Jet]) -> JetVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Plain vector of the k-th derivatives of each component.
pub fn jet_vec_derivative(a: &[Jet], k: usize) -> Vec<f64> {
    a.iter().map(|x| x.derivative_at(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn arithmetic_matches_known_series() {
        // f = exp(x) at 0, g = 1 + x
        let f = Jet::from_derivatives(&[1.0; 6]);
        let g = Jet::from_derivatives(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        // (1 + x) e^x: derivatives k + 1
        let p = &f * &g;
        for k in 0..=5 {
            assert!(close(p.derivative_at(k), (k + 1) as f64, 1e-14));
        }
        // e^x / (1 + x) derivatives at 0: 1, 0, 1, -2, 9, -44
        let q = f.div(&g);
        for (k, want) in [1.0, 0.0, 1.0, -2.0, 9.0, -44.0].iter().enumerate() {
            assert!(close(q.derivative_at(k), *want, 1e-13), "k={k}");
        }
    }

    #[test]
    fn sqrt_of_square_roundtrips() {
        let x = Jet::from_derivatives(&[2.0, 0.5, -1.0, 3.0, 0.25]);
        let r = (&x * &x).sqrt();
        for k in 0..=4 {
            assert!(close(r.derivative_at(k), x.derivative_at(k), 1e-13));
        }
        // sqrt(1 + x): 1, 1/2, -1/4, 3/8
        let s = Jet::from_derivatives(&[1.0, 1.0, 0.0, 0.0]).sqrt();
        for (k, want) in [1.0, 0.5, -0.25, 0.375].iter().enumerate() {
            assert!(close(s.derivative_at(k), *want, 1e-14));
        }
    }

    #[test]
    fn differentiate_shifts() {
        let x = Jet::from_derivatives(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(x.differentiate().derivatives(), vec![2.0, 3.0, 4.0]);
    }
}
