//! Gauge functions evaluated on the dyadic scale `t = 2^-n`.
//!
//! All families share the base term `t^s`; they differ in the correction
//! applied to `log2 gauge(2^-n) = -n s - correction(n)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Increasing function `g` for the `psi` family.
#[derive(Clone)]
pub struct MonotoneFn {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl MonotoneFn {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        MonotoneFn {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    /// `g(t) = t^a`.
    pub fn power(a: f64) -> Self {
        MonotoneFn::new(format!("t^{a}"), move |t: f64| t.powf(a))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for MonotoneFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonotoneFn({})", self.label)
    }
}

#[derive(Clone, Debug)]
pub enum Gauge {
    /// `t^s`.
    PureS { s: f64 },
    /// `t^s exp(-c |log t| / (log |log t|)^2)`.
    Phi { s: f64, c: f64 },
    /// `t^s exp(-|log t| / (log |log t|)^theta)`.
    PsiTheta { s: f64, theta: f64 },
    /// `t^s exp(-c |log t| / (log |log t|)^{2 + gamma})`.
    PhiGamma { s: f64, c: f64, gamma: f64 },
    /// `t^s exp(-|log2 t| / g(log2 |log2 t|))`.
    PsiG { s: f64, g: MonotoneFn },
}

/// Serializable summary of a gauge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeDescriptor {
    pub family: String,
    pub s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
}

impl Gauge {
    pub fn s(&self) -> f64 {
        match self {
            Gauge::PureS { s }
            | Gauge::Phi { s, .. }
            | Gauge::PsiTheta { s, .. }
            | Gauge::PhiGamma { s, .. }
            | Gauge::PsiG { s, .. } => *s,
        }
    }

    pub fn descriptor(&self) -> GaugeDescriptor {
        let mut d = GaugeDescriptor {
            family: String::new(),
            s: self.s(),
            c: None,
            theta: None,
            gamma: None,
            g: None,
        };
        match self {
            Gauge::PureS { .. } => d.family = "PURE_S".into(),
            Gauge::Phi { c, .. } => {
                d.family = "PHI".into();
                d.c = Some(*c);
            }
            Gauge::PsiTheta { theta, .. } => {
                d.family = "PSI_THETA".into();
                d.theta = Some(*theta);
            }
            Gauge::PhiGamma { c, gamma, .. } => {
                d.family = "PHI_GAMMA".into();
                d.c = Some(*c);
                d.gamma = Some(*gamma);
            }
            Gauge::PsiG { g, .. } => {
                d.family = "PSI_G".into();
                d.g = Some(g.label().to_string());
            }
        }
        d
    }

    /// `log2 gauge(2^-n)` for any `n >= 2`; used internally where dyadic
    /// scales start at `n = 2`.
    pub(crate) fn log2_at_unchecked(&self, n: f64) -> f64 {
        let l = n.log2();
        let base = -n * self.s();
        match self {
            Gauge::PureS { .. } => base,
            Gauge::Phi { c, .. } => base - c * n / (l * l),
            Gauge::PsiTheta { theta, .. } => base - n / l.powf(*theta),
            Gauge::PhiGamma { c, gamma, .. } => base - c * n / l.powf(2.0 + gamma),
            Gauge::PsiG { g, .. } => base - n / (std::f64::consts::LN_2 * g.eval(l)),
        }
    }
}

/// `log2 gauge(2^-n)`, defined for `n >= 4`.
pub fn gauge_log2(g: &Gauge, n: u64) -> Result<f64> {
    if n < 4 {
        return Err(Error::Domain(format!("gauge scale needs n >= 4, got {n}")));
    }
    Ok(g.log2_at_unchecked(n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: f64 = 0.811_370_462_751_649;

    #[test]
    fn family_values() {
        assert_eq!(gauge_log2(&Gauge::PureS { s: S }, 100).unwrap(), -100.0 * S);
        let v = gauge_log2(&Gauge::PsiTheta { s: S, theta: 1.0 }, 1024).unwrap();
        assert!((v - (-1024.0 * S - 102.4)).abs() < 1e-9);
        let n = 4096u64;
        let c = 0.3;
        let phi = gauge_log2(&Gauge::Phi { s: S, c }, n).unwrap();
        let psi2 = gauge_log2(&Gauge::PsiTheta { s: S, theta: 2.0 }, n).unwrap();
        let l = (n as f64).log2();
        assert!((phi - psi2 - (1.0 - c) * n as f64 / (l * l)).abs() < 1e-9);
        assert!(psi2 < phi);
        let psig = gauge_log2(
            &Gauge::PsiG {
                s: S,
                g: MonotoneFn::power(1.0),
            },
            n,
        )
        .unwrap();
        assert!((psig - (-(n as f64) * S - n as f64 / (std::f64::consts::LN_2 * l))).abs() < 1e-9);
        assert!(gauge_log2(&Gauge::PureS { s: S }, 3).is_err());
    }

    #[test]
    fn strictly_decreasing_and_ordered() {
        let gauges = [
            Gauge::PureS { s: S },
            Gauge::Phi { s: S, c: 0.5 },
            Gauge::PsiTheta { s: S, theta: 1.5 },
            Gauge::PsiTheta { s: S, theta: 1.0 },
            Gauge::PhiGamma {
                s: S,
                c: 0.5,
                gamma: 0.2,
            },
            Gauge::PsiG {
                s: S,
                g: MonotoneFn::power(1.0),
            },
        ];
        for g in &gauges {
            let vals: Vec<f64> = (4..5000).map(|n| gauge_log2(g, n).unwrap()).collect();
            assert!(vals.iter().all(|v| v.is_finite()));
            assert!(vals.windows(2).all(|w| w[1] < w[0]), "{:?}", g.descriptor());
        }
        for n in [1u64 << 10, 1 << 16, 1 << 20] {
            let psi = gauge_log2(&Gauge::PsiTheta { s: S, theta: 1.5 }, n).unwrap();
            let phi = gauge_log2(&Gauge::Phi { s: S, c: 0.5 }, n).unwrap();
            let pure = gauge_log2(&Gauge::PureS { s: S }, n).unwrap();
            assert!(psi <= phi && phi <= pure);
        }
    }
}
