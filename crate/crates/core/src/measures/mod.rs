//! Finite measures on [0, 1] driving the coalescent: atoms at the endpoints
//! plus an optional density part, with parsing from the compact spec string
//! and from JSON configs.

mod cdi;
mod rates;

pub use cdi::{classify_cdi, fit_alpha, tail_sums, CdiClass, CdiReport, FitAlpha, TailSums};
pub use rates::{
    cg_lower_bound_check, check_consistency, lambda_bk, rate_summary, BlockRates, CgBoundReport,
    ConsistencyReport, MergeWalk, RateTable, QUAD_REL_TOL,
};

use crate::error::{Result, SimError};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// One piece of a piecewise-constant density on (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TablePiece {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
}

/// Density part of a measure on (0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityKind {
    /// Beta(2-beta, beta) density, unit total mass before scaling.
    Beta { beta: f64 },
    /// c * x^{-gamma} on [0, eps], zero elsewhere.
    PowerLaw { c: f64, gamma: f64, eps: f64 },
    /// Piecewise-constant table.
    Table { pieces: Vec<TablePiece> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityComponent {
    #[serde(flatten)]
    pub kind: DensityKind,
    /// Scale factor applied to the component's mass.
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

/// A finite measure Lambda on [0, 1]: atoms at 0 and 1 plus density
/// components on (0, 1). The single parameter of the whole theory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaMeasure {
    pub atom0: f64,
    pub atom1: f64,
    #[serde(default)]
    pub densities: Vec<DensityComponent>,
    #[serde(skip)]
    total_mass: f64,
}

impl LambdaMeasure {
    pub fn new(atom0: f64, atom1: f64, densities: Vec<DensityComponent>) -> Result<Self> {
        let mut m = LambdaMeasure {
            atom0,
            atom1,
            densities,
            total_mass: 0.0,
        };
        m.validate_and_cache()?;
        Ok(m)
    }

    /// Kingman's coalescent: unit atom at 0.
    pub fn delta0(mass: f64) -> Self {
        Self::new(mass, 0.0, vec![]).expect("valid atom mass")
    }

    /// Star coalescent: unit atom at 1.
    pub fn delta1(mass: f64) -> Self {
        Self::new(0.0, mass, vec![]).expect("valid atom mass")
    }

    /// Beta(2-beta, beta) measure, unit mass.
    pub fn beta(beta: f64) -> Result<Self> {
        Self::new(
            0.0,
            0.0,
            vec![DensityComponent {
                kind: DensityKind::Beta { beta },
                weight: 1.0,
            }],
        )
    }

    pub fn powerlaw(c: f64, gamma: f64, eps: f64) -> Result<Self> {
        Self::new(
            0.0,
            0.0,
            vec![DensityComponent {
                kind: DensityKind::PowerLaw { c, gamma, eps },
                weight: 1.0,
            }],
        )
    }

    pub fn zero() -> Self {
        LambdaMeasure {
            atom0: 0.0,
            atom1: 0.0,
            densities: vec![],
            total_mass: 0.0,
        }
    }

    /// Validate parameter domains and cache the total mass. Must be called
    /// after deserialization (serde skips the cache field).
    pub fn validate_and_cache(&mut self) -> Result<()> {
        if !(self.atom0 >= 0.0) || !(self.atom1 >= 0.0) {
            return Err(SimError::Argument("atom masses must be >= 0".into()));
        }
        let mut mass = self.atom0 + self.atom1;
        for comp in &self.densities {
            if !(comp.weight >= 0.0) {
                return Err(SimError::Argument("component weight must be >= 0".into()));
            }
            match &comp.kind {
                DensityKind::Beta { beta } => {
                    if !(*beta > 0.0 && *beta < 2.0) {
                        return Err(SimError::Argument(format!(
                            "beta parameter {beta} outside (0, 2)"
                        )));
                    }
                    mass += comp.weight;
                }
                DensityKind::PowerLaw { c, gamma, eps } => {
                    if !(*c > 0.0) || !(*gamma > 0.0 && *gamma < 1.0) || !(*eps > 0.0 && *eps < 1.0)
                    {
                        return Err(SimError::Argument(format!(
                            "powerlaw parameters (c={c}, gamma={gamma}, eps={eps}) outside domain"
                        )));
                    }
                    mass += comp.weight * c * eps.powf(1.0 - gamma) / (1.0 - gamma);
                }
                DensityKind::Table { pieces } => {
                    if pieces.is_empty() {
                        return Err(SimError::Argument("empty density table".into()));
                    }
                    for p in pieces {
                        if !(0.0 <= p.lo && p.lo < p.hi && p.hi <= 1.0) || !(p.value >= 0.0) {
                            return Err(SimError::Argument(format!(
                                "bad table piece [{}, {}] = {}",
                                p.lo, p.hi, p.value
                            )));
                        }
                        mass += comp.weight * p.value * (p.hi - p.lo);
                    }
                }
            }
        }
        self.total_mass = mass;
        Ok(())
    }

    /// Lambda([0, 1]); equals the pairwise rate lambda_{2,2}.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_zero(&self) -> bool {
        self.total_mass == 0.0
    }

    pub fn has_atom1(&self) -> bool {
        self.atom1 > 0.0
    }

    /// Copy with the atom at 1 removed (the base measure used when
    /// classifying mixtures that carry an atom at 1).
    pub fn without_atom1(&self) -> Self {
        let mut m = self.clone();
        m.atom1 = 0.0;
        m.total_mass = self.total_mass - self.atom1;
        m
    }

    /// Reject measures with an atom at 1; spatial/support analytics require
    /// Lambda({1}) = 0.
    pub fn require_no_atom1(&self) -> Result<()> {
        if self.has_atom1() {
            Err(SimError::UnsupportedMeasure(
                "operation requires a measure with no mass at 1".into(),
            ))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for LambdaMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.atom0 > 0.0 {
            parts.push(format!("delta0={}", self.atom0));
        }
        if self.atom1 > 0.0 {
            parts.push(format!("delta1={}", self.atom1));
        }
        for comp in &self.densities {
            let body = match &comp.kind {
                DensityKind::Beta { beta } => format!("beta={beta}"),
                DensityKind::PowerLaw { c, gamma, eps } => {
                    format!("powerlaw(c={c},gamma={gamma},eps={eps})")
                }
                DensityKind::Table { pieces } => format!("table[{} pieces]", pieces.len()),
            };
            if comp.weight == 1.0 {
                parts.push(body);
            } else {
                parts.push(format!("{body}*{}", comp.weight));
            }
        }
        if parts.is_empty() {
            parts.push("zero".into());
        }
        write!(f, "{}", parts.join("+"))
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| SimError::Config(format!("cannot parse {what} from {s:?}")))
}

/// Parse one component of a measure string, e.g. "delta0=0.3" or "beta=1.5"
/// or "powerlaw:c=1,gamma=0.5,eps=0.5" or "beta=1.5*0.5" (trailing weight).
fn parse_component(s: &str) -> Result<(f64, f64, Option<DensityComponent>)> {
    let s = s.trim();
    let (body, weight) = match s.rsplit_once('*') {
        Some((b, w)) if !b.contains("table") => (b, parse_f64(w, "component weight")?),
        _ => (s, 1.0),
    };
    if let Some(rest) = body
        .strip_prefix("delta0=")
        .or_else(|| body.strip_prefix("delta0:"))
    {
        return Ok((parse_f64(rest, "delta0 mass")? * weight, 0.0, None));
    }
    if let Some(rest) = body
        .strip_prefix("delta1=")
        .or_else(|| body.strip_prefix("delta1:"))
    {
        return Ok((0.0, parse_f64(rest, "delta1 mass")? * weight, None));
    }
    if body == "delta0" {
        return Ok((weight, 0.0, None));
    }
    if body == "delta1" {
        return Ok((0.0, weight, None));
    }
    if let Some(rest) = body
        .strip_prefix("beta=")
        .or_else(|| body.strip_prefix("beta:"))
    {
        return Ok((
            0.0,
            0.0,
            Some(DensityComponent {
                kind: DensityKind::Beta {
                    beta: parse_f64(rest, "beta parameter")?,
                },
                weight,
            }),
        ));
    }
    if let Some(rest) = body
        .strip_prefix("powerlaw:")
        .or_else(|| body.strip_prefix("powerlaw="))
    {
        let mut c = None;
        let mut gamma = None;
        let mut eps = None;
        for kv in rest.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| SimError::Config(format!("powerlaw field {kv:?} is not k=v")))?;
            match k.trim() {
                "c" => c = Some(parse_f64(v, "powerlaw c")?),
                "gamma" => gamma = Some(parse_f64(v, "powerlaw gamma")?),
                "eps" => eps = Some(parse_f64(v, "powerlaw eps")?),
                other => {
                    return Err(SimError::Config(format!("unknown powerlaw field {other:?}")))
                }
            }
        }
        let (c, gamma, eps) = match (c, gamma, eps) {
            (Some(c), Some(g), Some(e)) => (c, g, e),
            _ => {
                return Err(SimError::Config(
                    "powerlaw needs c=, gamma=, eps= fields".into(),
                ))
            }
        };
        return Ok((
            0.0,
            0.0,
            Some(DensityComponent {
                kind: DensityKind::PowerLaw { c, gamma, eps },
                weight,
            }),
        ));
    }
    if let Some(rest) = body
        .strip_prefix("table:")
        .or_else(|| body.strip_prefix("table="))
    {
        let mut pieces = Vec::new();
        for piece in rest.split(',') {
            let fields: Vec<&str> = piece.split(':').collect();
            if fields.len() != 3 {
                return Err(SimError::Config(format!(
                    "table piece {piece:?} is not lo:hi:value"
                )));
            }
            pieces.push(TablePiece {
                lo: parse_f64(fields[0], "table lo")?,
                hi: parse_f64(fields[1], "table hi")?,
                value: parse_f64(fields[2], "table value")?,
            });
        }
        return Ok((
            0.0,
            0.0,
            Some(DensityComponent {
                kind: DensityKind::Table { pieces },
                weight,
            }),
        ));
    }
    Err(SimError::Config(format!("unknown measure component {s:?}")))
}

impl FromStr for LambdaMeasure {
    type Err = SimError;

    /// Compact measure spec: "delta0:1.0", "beta:1.5",
    /// "powerlaw:c=1,gamma=0.5,eps=0.5", "mix:delta0=0.3+beta=1.5", "zero".
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "zero" {
            return Ok(LambdaMeasure::zero());
        }
        let body = s.strip_prefix("mix:").unwrap_or(s);
        let mut atom0 = 0.0;
        let mut atom1 = 0.0;
        let mut densities = Vec::new();
        for comp in body.split('+') {
            let (a0, a1, dens) = parse_component(comp)?;
            atom0 += a0;
            atom1 += a1;
            if let Some(d) = dens {
                densities.push(d);
            }
        }
        LambdaMeasure::new(atom0, atom1, densities)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parse_compact_forms() {
        let m: LambdaMeasure = "delta0:1.0".parse().unwrap();
        assert_eq!(m.atom0, 1.0);
        assert_relative_eq!(m.total_mass(), 1.0);

        let m: LambdaMeasure = "beta:1.5".parse().unwrap();
        assert_relative_eq!(m.total_mass(), 1.0);

        let m: LambdaMeasure = "powerlaw:c=1,gamma=0.5,eps=0.5".parse().unwrap();
        // mass = c eps^{1-gamma} / (1-gamma) = 2 sqrt(0.5)
        assert_relative_eq!(m.total_mass(), 2.0 * 0.5f64.sqrt(), max_relative = 1e-12);

        let m: LambdaMeasure = "mix:delta0=0.3+beta=1.5".parse().unwrap();
        assert_eq!(m.atom0, 0.3);
        assert_relative_eq!(m.total_mass(), 1.3, max_relative = 1e-12);

        let m: LambdaMeasure = "table:0:0.5:2.0,0.5:1:0.5".parse().unwrap();
        assert_relative_eq!(m.total_mass(), 1.25, max_relative = 1e-12);
    }

    #[test]
    fn parse_rejects_bad_domains() {
        assert!("beta:2.5".parse::<LambdaMeasure>().is_err());
        assert!("beta:0".parse::<LambdaMeasure>().is_err());
        assert!("powerlaw:c=1,gamma=1.5,eps=0.5".parse::<LambdaMeasure>().is_err());
        assert!("powerlaw:c=-1,gamma=0.5,eps=0.5".parse::<LambdaMeasure>().is_err());
        assert!("whatever:1".parse::<LambdaMeasure>().is_err());
    }

    #[test]
    fn atom1_guard() {
        let m = LambdaMeasure::delta1(1.0);
        assert!(m.require_no_atom1().is_err());
        assert!(LambdaMeasure::delta0(1.0).require_no_atom1().is_ok());
    }
}
