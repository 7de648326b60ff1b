use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ConjugacyDiffeo, DisplacementMode, SmoothToralMap, ToralAutomorphism, DEFAULT_KAPPA_MAX};
use crate::Result;

/// Serializable description of a map: integer matrix plus optional displacement modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub matrix: [[i64; 2]; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub displacement: Vec<ModeSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub component: usize,
    pub k: [i64; 2],
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl MapSpec {
    pub fn build(&self) -> Result<SmoothToralMap> {
        let base = ToralAutomorphism::new(self.matrix)?;
        let modes = self
            .displacement
            .iter()
            .map(|m| DisplacementMode {
                component: m.component,
                k: m.k,
                coeff: Complex64::new(m.re, m.im),
            })
            .collect();
        let chart = ConjugacyDiffeo::with_kappa_max(modes, self.kappa_max.unwrap_or(DEFAULT_KAPPA_MAX))?;
        SmoothToralMap::conjugated(base, chart)
    }

    pub fn from_map(map: &SmoothToralMap) -> Self {
        MapSpec {
            matrix: map.base().entries(),
            kappa_max: None,
            displacement: map
                .chart()
                .map(|phi| {
                    phi.modes()
                        .iter()
                        .map(|m| ModeSpec {
                            component: m.component,
                            k: m.k,
                            re: m.coeff.re,
                            im: m.coeff.im,
                        })
                        .collect()
                })
                .unwrap_or_default(),
        }
    }
}
