//! Scalar functions given as a polynomial plus a finite trigonometric sum,
//! `f(t) = sum_j p_j t^j + sum_m (A_m cos(w_m t) + B_m sin(w_m t))`.
//! Used as coefficient tables for user curves and radius profiles.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: f64,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTrig {
    /// Polynomial coefficients, constant term first.
    #[serde(default)]
    pub poly: Vec<f64>,
    #[serde(default)]
    pub trig: Vec<TrigTerm>,
}

impl PolyTrig {
    pub fn constant(c: f64) -> Self {
        PolyTrig { poly: vec![c], trig: Vec::new() }
    }

    pub fn is_finite(&self) -> bool {
        self.poly.iter().all(|c| c.is_finite())
            && self.trig.iter().all(|t| t.freq.is_finite() && t.cos.is_finite() && t.sin.is_finite())
    }

    /// k-th derivative at `t`.
    pub fn derivative(&self, t: f64, k: usize) -> f64 {
        let mut acc = 0.0;
        // Horner on the k-th derivative polynomial
        if self.poly.len() > k {
            for j in (k..self.poly.len()).rev() {
                let falling: f64 = ((j - k + 1)..=j).map(|m| m as f64).product();
                acc = acc * t + falling * self.poly[j];
            }
        }
        for term in &self.trig {
            let (s, c) = (term.freq * t).sin_cos();
            let wk = term.freq.powi(k as i32);
            // d^k cos = cos, -sin, -cos, sin ; d^k sin = sin, cos, -sin, -cos
            let (dc, ds) = match k % 4 {
                0 => (c, s),
                1 => (-s, c),
                2 => (-c, -s),
                _ => (s, -c),
            };
            acc += wk * (term.cos * dc + term.sin * ds);
        }
        acc
    }

    /// `[f(t), f'(t), .., f^(order)(t)]`
    pub fn derivatives(&self, t: f64, order: usize) -> Vec<f64> {
        (0..=order).map(|k| self.derivative(t, k)).collect()
    }
}
