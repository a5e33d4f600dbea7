use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    /// `C ε^p`
    Power,
    /// `C √ε |ln ε|`
    SqrtLog,
}

impl std::str::FromStr for RateModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(RateModel::Power),
            "sqrtlog" => Ok(RateModel::SqrtLog),
            _ => Err(Error::InvalidInput(format!("unknown rate model '{s}' (expected power or sqrtlog)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub model: RateModel,
    pub c: f64,
    /// Exponent; fixed at 1/2 for the `√ε|ln ε|` model.
    pub p: f64,
    pub r2: f64,
    pub points: Vec<(f64, f64)>,
}

impl RateFit {
    pub fn predict(&self, eps: f64) -> f64 {
        match self.model {
            RateModel::Power => self.c * eps.powf(self.p),
            RateModel::SqrtLog => self.c * eps.sqrt() * eps.ln().abs(),
        }
    }

    /// Coefficient of determination of `ln error`, recomputed from the points.
    pub fn recompute_r2(&self) -> f64 {
        let ys: Vec<f64> = self.points.iter().map(|p| p.1.ln()).collect();
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
        let ss_res: f64 = self.points.iter().zip(&ys).map(|(p, y)| (y - self.predict(p.0).ln()).powi(2)).sum();
        if ss_tot == 0.0 {
            if ss_res == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            1.0 - ss_res / ss_tot
        }
    }
}

/// Ordinary least squares in log space.
pub fn rate_fit(points: &[(f64, f64)], model: RateModel) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateData(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(e, err)| !(e > 0.0 && e.is_finite() && err > 0.0 && err.is_finite())) {
        return Err(Error::DegenerateData("eps and errors must be positive and finite".into()));
    }
    if model == RateModel::SqrtLog && points.iter().any(|&(e, _)| e == 1.0) {
        return Err(Error::DegenerateData("sqrt(eps)|ln eps| vanishes at eps = 1".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = points.len() as f64;
    let (c, p) = match model {
        RateModel::Power => {
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            if sxx == 0.0 {
                return Err(Error::DegenerateData("all eps values coincide".into()));
            }
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let p = sxy / sxx;
            ((my - p * mx).exp(), p)
        }
        RateModel::SqrtLog => {
            let mean: f64 = points.iter().map(|&(e, err)| err.ln() - (e.sqrt() * e.ln().abs()).ln()).sum::<f64>() / n;
            (mean.exp(), 0.5)
        }
    };
    let mut fit = RateFit { model, c, p, r2: 0.0, points: points.to_vec() };
    fit.r2 = fit.recompute_r2();
    Ok(fit)
}
