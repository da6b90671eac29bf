//! Lorentzian metric on S × ℝ assembled from a base model, with the optional
//! 1/n stationary perturbation and K = ∂_t.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::MetricModel;
use crate::tol::{EPS_BETA, EPS_NULL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalCharacter {
    Timelike,
    Lightlike,
    Spacelike,
    Zero,
}

#[derive(Debug, Clone, Copy)]
pub struct SpacetimeModel<'a> {
    pub base: &'a MetricModel,
    /// `Some(n)` lowers ⟨K,K⟩ by 1/n.
    pub perturbation: Option<f64>,
}

impl<'a> SpacetimeModel<'a> {
    pub fn new(base: &'a MetricModel) -> SpacetimeModel<'a> {
        SpacetimeModel {
            base,
            perturbation: None,
        }
    }

    pub fn perturbed(base: &'a MetricModel, n: f64) -> Result<SpacetimeModel<'a>> {
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Precondition(format!(
                "perturbation parameter must be positive, got {n}"
            )));
        }
        Ok(SpacetimeModel {
            base,
            perturbation: Some(n),
        })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Added to β: 1/n under perturbation, else 0.
    pub fn beta_shift(&self) -> f64 {
        self.perturbation.map_or(0.0, |n| 1.0 / n)
    }

    pub fn beta_eff(&self, x: &[f64]) -> Result<f64> {
        Ok(self.base.beta_at(x)? + self.beta_shift())
    }

    /// ⟨ζ, ζ′⟩ for ζ = (ξ, τ), ζ′ = (ξ′, τ′) at base point `x` (t does not enter).
    pub fn lorentz_inner(&self, x: &[f64], xi: &[f64], tau: f64, xi2: &[f64], tau2: f64) -> Result<f64> {
        let g = self.base.metric_at(x)?;
        let delta = self.base.delta_at(x)?;
        let a = DVector::from_column_slice(xi);
        let b = DVector::from_column_slice(xi2);
        let omega = &g * &delta;
        let beta = self.base.beta_at(x)?;
        let unperturbed = a.dot(&(&g * &b)) + omega.dot(&a) * tau2 + omega.dot(&b) * tau - beta * tau * tau2;
        Ok(unperturbed - self.beta_shift() * tau * tau2)
    }

    /// Full (d+1)×(d+1) Gram matrix in the basis (∂_1, …, ∂_d, ∂_t).
    pub fn matrix(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let g = self.base.metric_at(x)?;
        let omega = &g * self.base.delta_at(x)?;
        let mut m = DMatrix::zeros(d + 1, d + 1);
        m.view_mut((0, 0), (d, d)).copy_from(&g);
        for i in 0..d {
            m[(i, d)] = omega[i];
            m[(d, i)] = omega[i];
        }
        m[(d, d)] = -self.beta_eff(x)?;
        Ok(m)
    }

    pub fn causal_character(&self, x: &[f64], xi: &[f64], tau: f64) -> Result<CausalCharacter> {
        if tau == 0.0 && xi.iter().all(|v| *v == 0.0) {
            return Ok(CausalCharacter::Zero);
        }
        let q = self.lorentz_inner(x, xi, tau, xi, tau)?;
        Ok(if q.abs() <= EPS_NULL {
            CausalCharacter::Lightlike
        } else if q < 0.0 {
            CausalCharacter::Timelike
        } else {
            CausalCharacter::Spacelike
        })
    }

    /// ⟨ζ, K⟩ = ⟨δ, ξ⟩ − β_eff τ.
    pub fn killing_pairing(&self, x: &[f64], xi: &[f64], tau: f64) -> Result<f64> {
        let delta = self.base.delta_at(x)?;
        let a = DVector::from_column_slice(xi);
        Ok(self.base.inner(x, delta.as_slice(), a.as_slice())? - self.beta_eff(x)? * tau)
    }

    /// Riemannian metric ⟨ζ,ζ′⟩ − 2⟨ζ,K⟩⟨ζ′,K⟩/⟨K,K⟩, defined where K is timelike.
    pub fn associated_riemannian_inner(
        &self,
        x: &[f64],
        xi: &[f64],
        tau: f64,
        xi2: &[f64],
        tau2: f64,
    ) -> Result<f64> {
        let beta = self.beta_eff(x)?;
        if beta <= EPS_BETA {
            return Err(Error::DegenerateBeta {
                point: x.to_vec(),
                beta,
            });
        }
        let base = self.lorentz_inner(x, xi, tau, xi2, tau2)?;
        let k1 = self.killing_pairing(x, xi, tau)?;
        let k2 = self.killing_pairing(x, xi2, tau2)?;
        Ok(base + 2.0 * k1 * k2 / beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;

    #[test]
    fn inner_examples() {
        let m = catalog::flat(1, "[1]", "0").unwrap();
        let s = SpacetimeModel::new(&m);
        assert_eq!(s.lorentz_inner(&[0.0], &[0.0], 1.0, &[0.0], 1.0).unwrap(), 0.0);
        assert_eq!(s.lorentz_inner(&[0.0], &[1.0], -1.0, &[1.0], -1.0).unwrap(), -1.0);
        let p = SpacetimeModel::perturbed(&m, 2.0).unwrap();
        assert_eq!(p.lorentz_inner(&[0.0], &[0.0], 1.0, &[0.0], 1.0).unwrap(), -0.5);
    }

    #[test]
    fn causal_examples() {
        let m = catalog::flat(1, "[1]", "0").unwrap();
        let s = SpacetimeModel::new(&m);
        assert_eq!(s.causal_character(&[0.0], &[0.0], 1.0).unwrap(), CausalCharacter::Lightlike);
        assert_eq!(s.causal_character(&[0.0], &[1.0], 0.0).unwrap(), CausalCharacter::Spacelike);
        assert_eq!(s.causal_character(&[0.0], &[1.0], -1.0).unwrap(), CausalCharacter::Timelike);
        assert_eq!(s.causal_character(&[0.0], &[0.0], 0.0).unwrap(), CausalCharacter::Zero);
    }

    #[test]
    fn killing_pairing_examples() {
        let m = catalog::flat_default(2).unwrap();
        let s = SpacetimeModel::new(&m);
        assert_eq!(s.killing_pairing(&[0.1, 0.2], &[3.0, 4.0], 7.0).unwrap(), 3.0);
        assert_eq!(s.killing_pairing(&[0.1, 0.2], &[0.0, 0.0], 0.0).unwrap(), 0.0);
        let st = catalog::stationary_flat(2).unwrap();
        let s = SpacetimeModel::new(&st);
        assert_eq!(s.killing_pairing(&[0.1, 0.2], &[5.0, -1.0], 2.0).unwrap(), -2.0);
    }

    #[test]
    fn associated_riemannian_examples() {
        let st = catalog::stationary_flat(1).unwrap();
        let s = SpacetimeModel::new(&st);
        assert_eq!(s.associated_riemannian_inner(&[0.0], &[0.0], 1.0, &[0.0], 1.0).unwrap(), 1.0);
        assert_eq!(s.associated_riemannian_inner(&[0.0], &[1.0], 0.0, &[1.0], 0.0).unwrap(), 1.0);
        let m = catalog::flat(1, "[1]", "0").unwrap();
        let p = SpacetimeModel::perturbed(&m, 4.0).unwrap();
        // K lightlike with δ = 1 adds the δ-term: −1/4 + 2(−1/4)²/(1/4) = 1/4.
        assert_eq!(p.associated_riemannian_inner(&[0.0], &[0.0], 1.0, &[0.0], 1.0).unwrap(), 0.25);
        assert!(matches!(
            SpacetimeModel::new(&m).associated_riemannian_inner(&[0.0], &[0.0], 1.0, &[0.0], 1.0),
            Err(Error::DegenerateBeta { .. })
        ));
    }

    #[test]
    fn matrix_agrees_with_inner() {
        let m = catalog::flat(2, "[-x2, x1]", "x1^2")
            .unwrap()
            .with_metric_sources(&["1 + x1^2", "0.1", "0.1", "2"])
            .unwrap();
        let s = SpacetimeModel::perturbed(&m, 3.0).unwrap();
        let x = [0.4, -0.3];
        let gram = s.matrix(&x).unwrap();
        let a = DVector::from_vec(vec![0.2, -1.0, 0.7]);
        let b = DVector::from_vec(vec![1.5, 0.3, -0.4]);
        let direct = s.lorentz_inner(&x, &[0.2, -1.0], 0.7, &[1.5, 0.3], -0.4).unwrap();
        assert!((a.dot(&(&gram * &b)) - direct).abs() < 1e-14);
    }
}
