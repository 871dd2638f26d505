use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::ResponseKind;
use crate::error::{Error, Result};
use crate::learners::{AdaConfig, BoostConfig, EnetConfig, LearnerConfig, LearnerKind, SvmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log2,
    Log10,
}

impl Scale {
    pub fn to_scaled(self, v: f64) -> f64 {
        match self {
            Scale::Linear => v,
            Scale::Log2 => v.log2(),
            Scale::Log10 => v.log10(),
        }
    }

    pub fn to_natural(self, s: f64) -> f64 {
        match self {
            Scale::Linear => s,
            Scale::Log2 => s.exp2(),
            Scale::Log10 => 10f64.powf(s),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Linear => "linear",
            Scale::Log2 => "log2",
            Scale::Log10 => "log10",
        })
    }
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Scale::Linear),
            "log2" => Ok(Scale::Log2),
            "log10" => Ok(Scale::Log10),
            other => Err(Error::InvalidArgument(format!("unknown scale '{other}'"))),
        }
    }
}

/// One hyperparameter. Bounds are in natural (model) units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dim {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub scale: Scale,
    pub integral: bool,
}

impl Dim {
    pub fn new(name: &str, lower: f64, upper: f64, scale: Scale, integral: bool) -> Result<Self> {
        let dim = Dim {
            name: name.to_string(),
            lower,
            upper,
            scale,
            integral,
        };
        dim.validate()?;
        Ok(dim)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(Error::InvalidArgument(format!(
                "{}: need finite lower < upper, got [{}, {}]",
                self.name, self.lower, self.upper
            )));
        }
        if self.scale != Scale::Linear && self.lower <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "{}: {} scale needs a positive lower bound",
                self.name, self.scale
            )));
        }
        Ok(())
    }

    /// Bounds in search coordinates.
    pub fn scaled_bounds(&self) -> (f64, f64) {
        (self.scale.to_scaled(self.lower), self.scale.to_scaled(self.upper))
    }

    pub fn width(&self) -> f64 {
        let (lo, hi) = self.scaled_bounds();
        hi - lo
    }

    /// Model value for search coordinate `s`. Integral dims round to the
    /// nearest integer, halves going down.
    pub fn natural(&self, s: f64) -> f64 {
        let v = self.scale.to_natural(s).clamp(self.lower, self.upper);
        if self.integral {
            (v - 0.5).ceil().clamp(self.lower.ceil(), self.upper.floor())
        } else {
            v
        }
    }
}

/// A point in search coordinates, one value per dim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateConfig {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub dims: Vec<Dim>,
}

impl SearchSpace {
    pub fn new(dims: Vec<Dim>) -> Result<Self> {
        for d in &dims {
            d.validate()?;
        }
        Ok(SearchSpace { dims })
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.dims.iter().map(|d| d.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name == name)
    }

    pub fn center(&self) -> CandidateConfig {
        CandidateConfig {
            values: self
                .dims
                .iter()
                .map(|d| {
                    let (lo, hi) = d.scaled_bounds();
                    0.5 * (lo + hi)
                })
                .collect(),
        }
    }

    pub fn clamp(&self, values: &mut [f64]) {
        for (v, d) in values.iter_mut().zip(&self.dims) {
            let (lo, hi) = d.scaled_bounds();
            *v = v.clamp(lo, hi);
        }
    }

    pub fn contains(&self, c: &CandidateConfig) -> bool {
        c.values.len() == self.len()
            && c.values.iter().zip(&self.dims).all(|(v, d)| {
                let (lo, hi) = d.scaled_bounds();
                (lo..=hi).contains(v)
            })
    }

    pub fn natural(&self, c: &CandidateConfig) -> Vec<f64> {
        c.values.iter().zip(&self.dims).map(|(v, d)| d.natural(*v)).collect()
    }

    /// Scaled point for natural values (inverse of [`SearchSpace::natural`]
    /// away from rounding).
    pub fn from_natural(&self, natural: &[f64]) -> Result<CandidateConfig> {
        if natural.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: natural.len(),
            });
        }
        let mut values: Vec<f64> = natural
            .iter()
            .zip(&self.dims)
            .map(|(v, d)| d.scale.to_scaled(*v))
            .collect();
        self.clamp(&mut values);
        Ok(CandidateConfig { values })
    }

    /// Replaces the natural-unit bounds of dim `name`.
    pub fn set_bounds(&mut self, name: &str, lower: f64, upper: f64) -> Result<()> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::InvalidArgument(format!("no hyperparameter named '{name}'")))?;
        let mut d = self.dims[i].clone();
        d.lower = lower;
        d.upper = upper;
        d.validate()?;
        self.dims[i] = d;
        Ok(())
    }

    /// Learner configuration for natural values laid out as in this space.
    pub fn learner_config(&self, learner: LearnerKind, natural: &[f64]) -> Result<LearnerConfig> {
        let get = |name: &str| -> Result<f64> {
            self.index_of(name)
                .and_then(|i| natural.get(i).copied())
                .ok_or_else(|| Error::InvalidArgument(format!("search space lacks '{name}'")))
        };
        let count = |name: &str| get(name).map(|v| v as usize);
        Ok(match learner {
            LearnerKind::Svm => LearnerConfig::Svm(SvmConfig {
                cost: get("cost")?,
                gamma: get("gamma")?,
                epsilon: if self.index_of("epsilon").is_some() { get("epsilon")? } else { 0.0 },
            }),
            LearnerKind::Gbm => LearnerConfig::Gbm(BoostConfig {
                n_trees: count("n_trees")?,
                depth: count("depth")?,
                shrinkage: get("shrinkage")?,
                min_node: count("min_node")?,
            }),
            LearnerKind::Adaboost => LearnerConfig::Adaboost(AdaConfig {
                n_iters: count("n_iters")?,
                depth: count("depth")?,
                shrinkage: get("shrinkage")?,
            }),
            LearnerKind::ElasticNet => LearnerConfig::ElasticNet(EnetConfig {
                alpha: get("alpha")?,
                lambda: get("lambda")?,
            }),
        })
    }
}

pub fn default_space(learner: LearnerKind, response: ResponseKind) -> Result<SearchSpace> {
    learner.check_response(response)?;
    let dims = match learner {
        LearnerKind::Svm => {
            let mut dims = vec![
                Dim::new("cost", 2f64.powi(-5), 2f64.powi(15), Scale::Log2, false)?,
                Dim::new("gamma", 2f64.powi(-15), 2f64.powi(3), Scale::Log2, false)?,
            ];
            if response == ResponseKind::Continuous {
                dims.push(Dim::new("epsilon", 0.0, 0.5, Scale::Linear, false)?);
            }
            dims
        }
        LearnerKind::Gbm => vec![
            Dim::new("n_trees", 50.0, 3000.0, Scale::Linear, true)?,
            Dim::new("depth", 1.0, 10.0, Scale::Linear, true)?,
            Dim::new("shrinkage", 1e-3, 10f64.powf(-0.5), Scale::Log10, false)?,
            Dim::new("min_node", 5.0, 15.0, Scale::Linear, true)?,
        ],
        LearnerKind::Adaboost => vec![
            Dim::new("n_iters", 50.0, 2000.0, Scale::Linear, true)?,
            Dim::new("depth", 1.0, 10.0, Scale::Linear, true)?,
            Dim::new("shrinkage", 0.01, 1.0, Scale::Linear, false)?,
        ],
        LearnerKind::ElasticNet => vec![
            Dim::new("alpha", 0.0, 1.0, Scale::Linear, false)?,
            Dim::new("lambda", 1e-4, 1e2, Scale::Log10, false)?,
        ],
    };
    SearchSpace::new(dims)
}
