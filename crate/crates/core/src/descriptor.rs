//! Serializable density descriptors: the JSON schemas and the CLI
//! mini-grammar (`family:params`) behind which every density in this crate
//! can be named.

use serde::{Deserialize, Serialize};

use crate::cauchy::{CauchyLocationScale, CauchyScale};
use crate::error::{Error, Result};
use crate::expfam::MvnParam;
use crate::oracle::Density;
use crate::wmixture::WMixtureFamily;

/// A density named by family and parameters.
///
/// JSON forms: `{"family":"cauchy","gamma":0.3}`,
/// `{"family":"cauchy_ls","l":0.0,"gamma":0.3}`,
/// `{"family":"normal","mu":0.0,"sigma":1.0}`,
/// `{"family":"mvn","chart":"ordinary","mu":[..],"sigma":[[..]]}` (any
/// chart), `{"family":"categorical","probs":[..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DensityDescriptor {
    Cauchy {
        gamma: f64,
    },
    CauchyLs {
        l: f64,
        gamma: f64,
    },
    /// Scalar Gaussian with standard deviation `sigma` (a d=1 Gaussian).
    Normal {
        mu: f64,
        sigma: f64,
    },
    Mvn {
        #[serde(flatten)]
        param: MvnParam,
    },
    Categorical {
        probs: Vec<f64>,
    },
}

impl DensityDescriptor {
    /// Parses the inline mini-grammar: `cauchy:<gamma>`,
    /// `cauchy_ls:<l>,<gamma>`, `normal:<mu>,<sigma>`,
    /// `categorical:<p0>,<p1>,...`. MVN parameters have no inline form
    /// (pass them as JSON).
    pub fn parse_inline(spec: &str) -> Result<DensityDescriptor> {
        let (family, params) = spec
            .split_once(':')
            .ok_or_else(|| Error::Descriptor(format!("expected family:params, got {spec:?}")))?;
        let nums: Vec<f64> = if params.is_empty() {
            vec![]
        } else {
            params
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Descriptor(format!("bad number {t:?} in {spec:?}")))
                })
                .collect::<Result<_>>()?
        };
        let arity = |n: usize| -> Result<()> {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::Descriptor(format!(
                    "{family} takes {n} parameter(s), got {}",
                    nums.len()
                )))
            }
        };
        match family.trim().to_ascii_lowercase().as_str() {
            "cauchy" => {
                arity(1)?;
                Ok(DensityDescriptor::Cauchy { gamma: nums[0] })
            }
            "cauchy_ls" => {
                arity(2)?;
                Ok(DensityDescriptor::CauchyLs {
                    l: nums[0],
                    gamma: nums[1],
                })
            }
            "normal" => {
                arity(2)?;
                Ok(DensityDescriptor::Normal {
                    mu: nums[0],
                    sigma: nums[1],
                })
            }
            "categorical" => {
                if nums.is_empty() {
                    return Err(Error::Descriptor("categorical needs probabilities".into()));
                }
                Ok(DensityDescriptor::Categorical { probs: nums })
            }
            other => Err(Error::Descriptor(format!("unknown family {other:?}"))),
        }
    }

    /// Parses a JSON object; accepts both the tagged `{"family": ...}` form
    /// and a bare MVN chart object `{"chart": ...}`.
    pub fn from_json(json: &str) -> Result<DensityDescriptor> {
        let value: serde_json::Value = serde_json::from_str(json)
            .map_err(|e| Error::Descriptor(format!("invalid JSON: {e}")))?;
        if value.get("family").is_some() {
            serde_json::from_value(value).map_err(|e| Error::Descriptor(e.to_string()))
        } else if value.get("chart").is_some() {
            let param: MvnParam =
                serde_json::from_value(value).map_err(|e| Error::Descriptor(e.to_string()))?;
            Ok(DensityDescriptor::Mvn { param })
        } else {
            Err(Error::Descriptor(
                "JSON density needs a \"family\" or \"chart\" key".into(),
            ))
        }
    }

    /// Instantiates the evaluable density.
    pub fn build(&self) -> Result<Density> {
        match self {
            DensityDescriptor::Cauchy { gamma } => Ok(CauchyScale::new(*gamma)?.density()),
            DensityDescriptor::CauchyLs { l, gamma } => {
                Ok(CauchyLocationScale::new(*l, *gamma)?.density())
            }
            DensityDescriptor::Normal { mu, sigma } => {
                if !(*sigma > 0.0) {
                    return Err(Error::Descriptor(format!(
                        "normal sigma must be positive, got {sigma}"
                    )));
                }
                MvnParam::ordinary(vec![*mu], vec![vec![sigma * sigma]])?.density()
            }
            DensityDescriptor::Mvn { param } => param.density(),
            DensityDescriptor::Categorical { probs } => Density::categorical(probs),
        }
    }

    /// The MVN parameter when this descriptor names a Gaussian (the
    /// `normal` shorthand included).
    pub fn as_mvn(&self) -> Result<MvnParam> {
        match self {
            DensityDescriptor::Mvn { param } => Ok(param.clone()),
            DensityDescriptor::Normal { mu, sigma } => {
                MvnParam::ordinary(vec![*mu], vec![vec![sigma * sigma]])
            }
            other => Err(Error::Descriptor(format!(
                "{other:?} is not a Gaussian descriptor"
            ))),
        }
    }

    /// The Cauchy scale when this descriptor names a scale Cauchy.
    pub fn as_cauchy_scale(&self) -> Result<CauchyScale> {
        match self {
            DensityDescriptor::Cauchy { gamma } => CauchyScale::new(*gamma),
            other => Err(Error::Descriptor(format!(
                "{other:?} is not a scale Cauchy descriptor"
            ))),
        }
    }
}

/// A w-mixture family plus a member: prescribed component descriptors and a
/// weight vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WMixtureDescriptor {
    pub components: Vec<DensityDescriptor>,
    pub theta: Vec<f64>,
}

impl WMixtureDescriptor {
    pub fn build_family(&self) -> Result<WMixtureFamily> {
        let components = self
            .components
            .iter()
            .map(|c| c.build())
            .collect::<Result<Vec<_>>>()?;
        WMixtureFamily::new(components)
    }

    pub fn build_density(&self) -> Result<Density> {
        self.build_family()?.mixture_density(&self.theta)
    }
}
