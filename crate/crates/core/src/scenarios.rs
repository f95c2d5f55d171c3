//! Reproducible constructors for the worked examples and counterexamples.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::analyzer::Verdict;
use crate::error::{Error, Result};
use crate::galerkin::{family_projector, grid_function, grid_points, sine_family, SubspaceFamily};
use crate::hilbert::{make_problem, make_projector, Constraint, CoordinateVector, DenseOperator, ProblemData, ProblemInstance};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioName {
    DiagonalSolvable,
    DiagonalUnsolvable,
    TruncatedShift,
    RankDeficientGamma,
    NilpotentPi,
    FunctionSpaceGalerkin,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 6] = [
        ScenarioName::DiagonalSolvable,
        ScenarioName::DiagonalUnsolvable,
        ScenarioName::TruncatedShift,
        ScenarioName::RankDeficientGamma,
        ScenarioName::NilpotentPi,
        ScenarioName::FunctionSpaceGalerkin,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioName::DiagonalSolvable => "diagonal_solvable",
            ScenarioName::DiagonalUnsolvable => "diagonal_unsolvable",
            ScenarioName::TruncatedShift => "truncated_shift",
            ScenarioName::RankDeficientGamma => "rank_deficient_gamma",
            ScenarioName::NilpotentPi => "nilpotent_pi",
            ScenarioName::FunctionSpaceGalerkin => "function_space_galerkin",
        }
    }

    /// Accepted parameters with their defaults.
    pub fn params(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            ScenarioName::TruncatedShift => &[("N", "6")],
            ScenarioName::RankDeficientGamma => &[("dimU", "1")],
            ScenarioName::FunctionSpaceGalerkin => &[("M", "256"), ("operator", "identity")],
            _ => &[],
        }
    }

    /// Verdict the resolvent criterion reaches with default tolerances.
    pub fn expected_verdict(&self) -> Verdict {
        match self {
            ScenarioName::DiagonalUnsolvable => Verdict::NotSolvable,
            ScenarioName::TruncatedShift => Verdict::Singular,
            _ => Verdict::Solvable,
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            ScenarioName::DiagonalSolvable => "R^2, L = I, P onto e1, h = (1,1)",
            ScenarioName::DiagonalUnsolvable => "R^2, L = e1 column, P onto e1, h = e2; witness e2",
            ScenarioName::TruncatedShift => "R^N, L = e1 column, P onto span{e2..eN}, h = e2; T_alpha singular with kernel e2",
            ScenarioName::RankDeficientGamma => "R^3, Gamma = diag(1,1,0) without L; not of the form L L^T when dimU = 1",
            ScenarioName::NilpotentPi => "R^2, L = I, raw map [[0,1],[0,0]], h = (0,1); y_alpha -> 0 but the constraint fails",
            ScenarioName::FunctionSpaceGalerkin => "L^2(0,1) on M midpoints, h(x) = x, sine family {1, sin 2 pi k x}",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub params: BTreeMap<String, String>,
}

impl ScenarioSpec {
    pub fn new(name: ScenarioName) -> Self {
        Self {
            name,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Parses a name and `K=V` pairs.
    pub fn parse(name: &str, params: &[String]) -> Result<Self> {
        let mut spec = Self::new(name.parse()?);
        for kv in params {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::InvalidParam {
                scenario: name.to_string(),
                message: format!("expected K=V, got `{kv}`"),
            })?;
            spec.params.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(spec)
    }

    fn invalid(&self, message: String) -> Error {
        Error::InvalidParam {
            scenario: self.name.to_string(),
            message,
        }
    }

    fn check_keys(&self) -> Result<()> {
        let allowed = self.name.params();
        for key in self.params.keys() {
            if !allowed.iter().any(|(k, _)| k == key) {
                return Err(self.invalid(format!("unknown parameter `{key}`")));
            }
        }
        Ok(())
    }

    fn raw(&self, key: &str) -> &str {
        self.params.get(key).map(String::as_str).unwrap_or_else(|| {
            self.name
                .params()
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, d)| *d)
                .expect("parameter declared in catalog")
        })
    }

    fn usize_param(&self, key: &str, min: usize) -> Result<usize> {
        let raw = self.raw(key);
        let v: usize = raw
            .parse()
            .map_err(|_| self.invalid(format!("{key} must be a nonnegative integer, got `{raw}`")))?;
        if v < min {
            return Err(self.invalid(format!("{key} must be at least {min}, got {v}")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub problem: ProblemInstance,
    /// Present for function_space_galerkin.
    pub family: Option<SubspaceFamily>,
}

impl Scenario {
    pub fn expected_verdict(&self) -> Verdict {
        self.spec.name.expected_verdict()
    }
}

fn vector(c: &[f64]) -> CoordinateVector {
    CoordinateVector::new(c.to_vec()).expect("finite literal")
}

fn axes_projector(dim: usize, axes: impl IntoIterator<Item = usize>) -> Constraint {
    let basis: Vec<_> = axes.into_iter().map(|i| CoordinateVector::unit(dim, i)).collect();
    Constraint::Projector(make_projector(dim, &basis, Tolerances::default().ortho, false).expect("unit vectors"))
}

fn e1_column(dim: usize) -> DenseOperator {
    let mut d = vec![0.0; dim];
    d[0] = 1.0;
    DenseOperator::from_row_major(dim, 1, &d).expect("finite literal")
}

pub fn build_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.check_keys()?;
    let tolerances = Tolerances::default();
    let mut family = None;
    let data = match spec.name {
        ScenarioName::DiagonalSolvable => ProblemData {
            l: Some(DenseOperator::identity(2)),
            gamma: None,
            constraint: axes_projector(2, [0]),
            h: vector(&[1.0, 1.0]),
            dim_u: None,
            tolerances,
        },
        ScenarioName::DiagonalUnsolvable => ProblemData {
            l: Some(e1_column(2)),
            gamma: None,
            constraint: axes_projector(2, [0]),
            h: vector(&[0.0, 1.0]),
            dim_u: None,
            tolerances,
        },
        ScenarioName::TruncatedShift => {
            let n = spec.usize_param("N", 2)?;
            ProblemData {
                l: Some(e1_column(n)),
                gamma: None,
                constraint: axes_projector(n, 1..n),
                h: CoordinateVector::unit(n, 1),
                dim_u: None,
                tolerances,
            }
        }
        ScenarioName::RankDeficientGamma => ProblemData {
            l: None,
            gamma: Some(DenseOperator::diagonal(&[1.0, 1.0, 0.0])?),
            constraint: axes_projector(3, [0]),
            h: vector(&[1.0, 1.0, 0.0]),
            dim_u: Some(spec.usize_param("dimU", 1)?),
            tolerances,
        },
        // Outside the theorem's hypotheses: the constraint is not idempotent.
        ScenarioName::NilpotentPi => ProblemData {
            l: Some(DenseOperator::identity(2)),
            gamma: None,
            constraint: Constraint::Raw(DenseOperator::from_row_major(2, 2, &[0.0, 1.0, 0.0, 0.0])?),
            h: vector(&[0.0, 1.0]),
            dim_u: None,
            tolerances,
        },
        ScenarioName::FunctionSpaceGalerkin => {
            let m = spec.usize_param("M", 4)?;
            let l = match spec.raw("operator") {
                "identity" => DenseOperator::identity(m),
                "smoothing" => {
                    let w: Vec<f64> = grid_points(m).into_iter().map(|x| 1.0 / (1.0 + x)).collect();
                    DenseOperator::diagonal(&w)?
                }
                other => return Err(spec.invalid(format!("operator must be identity or smoothing, got `{other}`"))),
            };
            let f = sine_family(m)?;
            let target = family_projector(&f, f.max_n())?;
            family = Some(f);
            ProblemData {
                l: Some(l),
                gamma: None,
                constraint: Constraint::Projector(target),
                h: grid_function(m, |x| x),
                dim_u: None,
                tolerances,
            }
        }
    };
    Ok(Scenario {
        spec: spec.clone(),
        problem: make_problem(data)?,
        family,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::{alpha_sweep, decide, AlphaSchedule};
    use crate::resolvent::solve_resolvent;

    #[test]
    fn names_round_trip() {
        for n in ScenarioName::ALL {
            assert_eq!(n.as_str().parse::<ScenarioName>().unwrap(), n);
        }
        assert!(matches!("nope".parse::<ScenarioName>(), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn param_validation() {
        let bad = ScenarioSpec::new(ScenarioName::TruncatedShift).with("N", 1);
        assert!(matches!(build_scenario(&bad), Err(Error::InvalidParam { .. })));
        let bad = ScenarioSpec::new(ScenarioName::TruncatedShift).with("N", "six");
        assert!(build_scenario(&bad).is_err());
        let bad = ScenarioSpec::new(ScenarioName::DiagonalSolvable).with("N", 3);
        assert!(build_scenario(&bad).is_err());
        assert!(ScenarioSpec::parse("truncated_shift", &["N6".into()]).is_err());
        let ok = ScenarioSpec::parse("truncated_shift", &["N=12".into()]).unwrap();
        assert_eq!(build_scenario(&ok).unwrap().problem.dim_h(), 12);
    }

    #[test]
    fn every_scenario_builds_with_defaults() {
        for n in ScenarioName::ALL {
            let s = build_scenario(&ScenarioSpec::new(n)).unwrap();
            assert_eq!(s.family.is_some(), n == ScenarioName::FunctionSpaceGalerkin);
        }
    }

    #[test]
    fn unsolvable_scenario_decides() {
        let s = build_scenario(&ScenarioSpec::new(ScenarioName::DiagonalUnsolvable)).unwrap();
        let d = decide(&alpha_sweep(&s.problem, &AlphaSchedule::default()).unwrap(), 1e-6);
        assert_eq!(d.verdict, Verdict::NotSolvable);
    }

    #[test]
    fn truncated_shift_at_half() {
        let s = build_scenario(&ScenarioSpec::new(ScenarioName::TruncatedShift).with("N", 6)).unwrap();
        let rep = solve_resolvent(0.5, &s.problem).unwrap();
        let k = &rep.singular().unwrap().kernel_vector;
        assert!((k.as_dvector() - CoordinateVector::unit(6, 1).as_dvector()).norm() < 1e-12);
    }

    #[test]
    fn nilpotent_constraint_residual() {
        let s = build_scenario(&ScenarioSpec::new(ScenarioName::NilpotentPi)).unwrap();
        let sol = solve_resolvent(0.1, &s.problem).unwrap().solution().cloned().unwrap();
        assert!((sol.constraint_residual.norm() - 1.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn galerkin_smoothing_operator() {
        let s = build_scenario(
            &ScenarioSpec::new(ScenarioName::FunctionSpaceGalerkin)
                .with("M", 16)
                .with("operator", "smoothing"),
        )
        .unwrap();
        assert!(s.problem.gamma().as_matrix().diagonal().min() >= 0.25 - 1e-15);
        let bad = ScenarioSpec::new(ScenarioName::FunctionSpaceGalerkin).with("operator", "blur");
        assert!(build_scenario(&bad).is_err());
    }
}
