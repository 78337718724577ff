//! Scenario description language.
//!
//! A scenario is a small text file declaring the system space, named states
//! and bases, stage unitaries (or a joint Hamiltonian by its spectrum), the
//! intermediate measurement, and the two selections:
//!
//! ```text
//! scenario "three-box-X" {
//!   space dim = 3 basis = [X, Y, Z]
//!   state A = 1/sqrt(3), 1/sqrt(3), 1/sqrt(3)
//!   state B = 1/sqrt(3), 1/sqrt(3), -1/sqrt(3)
//!   basis pre = [A]
//!   basis post = [B]
//!   measure { blocks = [X] [Y, Z] mode = coarse }
//!   preselect { basis = pre index = 0 }
//!   postselect { basis = post index = 0 }
//!   options { target = 0 }
//! }
//! ```
//!
//! [`parse`] checks both syntax and meaning and reports errors with a line
//! and column. [`render`] writes the canonical form back; the two are
//! inverse on canonical specs.

mod builtin;
mod lexer;
mod parser;
mod render;
mod run;

use std::collections::HashMap;

use crate::apparatus::{identity_matrix, Eigenstructure, IntermediateModel, Matrix, Mode};
use crate::error::{Error, Result};
use crate::linalg::{
    is_unitary, orthonormal_complement, unitary_from_spectrum, AntiunitaryOp, Cx, HilbertSpace, Level,
    Operator, SpectralData, StateVector, DEFAULT_TOL,
};
use crate::ppse::{Experiment, SelectionEvent};
use crate::timesym::ProcessTag;

pub use builtin::{builtin, builtin_names, appendix_a_spec, BUILTINS};
pub use parser::{parse, parse_with_warnings};
pub use render::{render, render_number};
pub use run::{run, run_timesym, timesym_table, EigenRow, OutcomeRow, RunReport, SelectionReport, CROSS_CHECK_TOL};

/// Unitary names accepted by `unitary NAME = [...]`.
pub const UNITARY_NAMES: [&str; 3] = ["ca", "bc", "theta"];

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub basis_labels: Vec<String>,
    pub states: Vec<(String, Vec<Cx>)>,
    pub bases: Vec<(String, Vec<String>)>,
    pub unitaries: Vec<(String, Matrix)>,
    pub hamiltonian: Option<HamiltonianSpec>,
    pub measure: MeasureSpec,
    pub preselect: SelectSpec,
    pub postselect: SelectSpec,
    pub options: OptionsSpec,
}

/// Joint system⊗pointer Hamiltonian by its spectrum. Directions not covered
/// by any listed eigenvector get energy 0.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub levels: Vec<(f64, Vec<String>)>,
    pub duration: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    pub blocks: Vec<Vec<String>>,
    pub values: Option<Vec<f64>>,
    pub mode: Mode,
    /// (block index, d^k) for two-step mode; missing blocks use identity.
    pub d: Vec<(usize, Matrix)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectSpec {
    pub basis: String,
    pub index: usize,
    pub initial: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptionsSpec {
    pub tol: f64,
    pub strict_norm: bool,
    pub strict_d: bool,
    pub processes: Option<Vec<ProcessTag>>,
    pub reset: bool,
    /// Eigenvalue index whose probability is reported as `prob_found`.
    pub target: Option<usize>,
}

impl Default for OptionsSpec {
    fn default() -> Self {
        OptionsSpec { tol: DEFAULT_TOL, strict_norm: false, strict_d: false, processes: None, reset: false, target: None }
    }
}

/// A spec turned into numbers ready to run.
#[derive(Clone, Debug)]
pub struct Built {
    pub experiment: Experiment,
    pub theta: Option<AntiunitaryOp>,
    pub notes: Vec<String>,
}

/// Build failure attributed to a spec section (`state:NAME`, `measure`, …).
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct SectionError {
    pub section: String,
    pub error: Error,
}

fn at(section: impl Into<String>) -> impl FnOnce(Error) -> SectionError {
    let section = section.into();
    move |error| SectionError { section, error }
}

impl ScenarioSpec {
    pub fn state(&self, name: &str) -> Option<&[Cx]> {
        self.states.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn unitary(&self, name: &str) -> Option<&Matrix> {
        self.unitaries.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    /// Resolve names to numbers and validate everything that can be checked
    /// without running the pipeline.
    pub fn build(&self) -> Result<Built> {
        self.build_located().map_err(|e| e.error.at(&e.section))
    }

    pub(crate) fn build_located(&self) -> std::result::Result<Built, SectionError> {
        let tol = self.options.tol;
        let mut notes = Vec::new();
        let sys = HilbertSpace::new(self.basis_labels.clone()).map_err(at("space"))?;
        let n = sys.dim();

        let resolve = |name: &str, section: &str| -> std::result::Result<StateVector, SectionError> {
            if let Some(v) = self.state(name) {
                if v.len() != n {
                    return Err(SectionError {
                        section: format!("state:{name}"),
                        error: Error::DimensionMismatch { left: n, right: v.len() },
                    });
                }
                return StateVector::new(sys.clone(), v.to_vec()).map_err(at(section));
            }
            if sys.index_of(name).is_some() {
                return StateVector::basis_label(sys.clone(), name).map_err(at(section));
            }
            Err(SectionError { section: section.to_string(), error: Error::UnknownLabel(name.to_string()) })
        };

        // intermediate measurement
        let blocks = self
            .measure
            .blocks
            .iter()
            .map(|b| b.iter().map(|name| resolve(name, "measure")).collect())
            .collect::<std::result::Result<Vec<Vec<_>>, _>>()?;
        let values = self.measure.values.clone().unwrap_or_else(|| (0..blocks.len()).map(|k| k as f64).collect());
        let eigen = Eigenstructure::new(sys.clone(), values, blocks, tol).map_err(at("measure"))?;
        let d = match self.measure.mode {
            Mode::TwoStep => {
                let mut d: Vec<Matrix> = eigen.block_sizes().iter().map(|&s| identity_matrix(s)).collect();
                for (k, dk) in &self.measure.d {
                    let slot = d.get_mut(*k).ok_or_else(|| SectionError {
                        section: "measure".into(),
                        error: Error::BadIndex { index: *k, len: eigen.blocks.len() },
                    })?;
                    *slot = dk.clone();
                }
                Some(d)
            }
            _ if !self.measure.d.is_empty() => {
                return Err(SectionError {
                    section: "measure".into(),
                    error: Error::ModeMismatch(format!("d coefficients given for {} mode", self.measure.mode)),
                })
            }
            _ => None,
        };
        let model = IntermediateModel::new(eigen, self.measure.mode, d, self.options.strict_d, tol)
            .map_err(at("measure"))?;

        // selections
        let select = |s: &SelectSpec, section: &str, label: &str| -> std::result::Result<SelectionEvent, SectionError> {
            let names = self
                .bases
                .iter()
                .find(|(b, _)| *b == s.basis)
                .map(|(_, v)| v)
                .ok_or_else(|| SectionError { section: section.into(), error: Error::UnknownLabel(s.basis.clone()) })?;
            if s.index >= names.len() {
                return Err(SectionError {
                    section: section.into(),
                    error: Error::BadIndex { index: s.index, len: names.len() },
                });
            }
            let mut vectors =
                names.iter().map(|nm| resolve(nm, section)).collect::<std::result::Result<Vec<_>, _>>()?;
            // a partial basis is completed; only the chosen vector matters
            // outside the oracle
            let refs: Vec<&StateVector> = vectors.iter().collect();
            crate::linalg::check_orthonormal(&refs, tol)
                .map_err(|e| Error::NonOrthonormalBasis(e.to_string()))
                .map_err(at(format!("basis:{}", s.basis)))?;
            let extra = orthonormal_complement(&sys, &refs, tol).map_err(at(section))?;
            vectors.extend(extra);
            SelectionEvent::new(vectors, s.index, label, tol).map_err(at(section))
        };
        let pre = select(&self.preselect, "preselect", "alpha")?;
        let post = select(&self.postselect, "postselect", "beta")?;
        if self.postselect.initial.is_some() {
            return Err(SectionError {
                section: "postselect".into(),
                error: Error::ModeMismatch("`initial` only applies to preselect".into()),
            });
        }

        // stage unitaries
        let matrix = |name: &str| -> std::result::Result<Option<Operator>, SectionError> {
            let section = format!("unitary:{name}");
            match self.unitary(name) {
                None => Ok(None),
                Some(rows) => {
                    let op = Operator::from_rows(sys.clone(), rows).map_err(at(section.clone()))?;
                    if !is_unitary(&op, tol) {
                        return Err(SectionError { section, error: Error::NotUnitary(name.to_string()) });
                    }
                    Ok(Some(op))
                }
            }
        };
        let u_ca = matrix("ca")?.unwrap_or_else(|| Operator::identity(sys.clone()));
        let u_bc = matrix("bc")?.unwrap_or_else(|| Operator::identity(sys.clone()));
        let theta = matrix("theta")?.map(|t| AntiunitaryOp::new(t, tol)).transpose().map_err(at("unitary:theta"))?;

        let mut exp = Experiment::new(model, pre, post, u_ca, u_bc, tol).map_err(at("postselect"))?;
        if let Some(init) = &self.preselect.initial {
            let psi = resolve(init, "preselect")?;
            exp = exp.with_initial(psi).map_err(at("preselect"))?;
        }

        if let Some(h) = &self.hamiltonian {
            let joint = exp.joint_space();
            let mut levels = Vec::new();
            for (e, names) in &h.levels {
                let vectors = names
                    .iter()
                    .map(|nm| {
                        let v = self.state(nm).ok_or_else(|| SectionError {
                            section: "hamiltonian".into(),
                            error: Error::UnknownLabel(nm.clone()),
                        })?;
                        StateVector::new(joint.clone(), v.to_vec()).map_err(at("hamiltonian"))
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                levels.push(Level { energy: *e, vectors });
            }
            let listed: Vec<&StateVector> = levels.iter().flat_map(|l| l.vectors.iter()).collect();
            let rest = orthonormal_complement(&joint, &listed, tol).map_err(at("hamiltonian"))?;
            if !rest.is_empty() {
                notes.push(format!("{} unlisted Hamiltonian directions set to energy 0", rest.len()));
                match levels.iter_mut().find(|l| l.energy == 0.0) {
                    Some(l) => l.vectors.extend(rest),
                    None => levels.push(Level { energy: 0.0, vectors: rest }),
                }
            }
            let spec = SpectralData::new(joint, levels, tol).map_err(at("hamiltonian"))?;
            exp = exp.with_joint(unitary_from_spectrum(&spec, h.duration)).map_err(at("hamiltonian"))?;
        }

        if let Some(t) = self.options.target {
            if t >= exp.model.eigen.blocks.len() {
                return Err(SectionError {
                    section: "options".into(),
                    error: Error::BadIndex { index: t, len: exp.model.eigen.blocks.len() },
                });
            }
        }
        if let Some(ps) = &self.options.processes {
            if theta.is_none() {
                if let Some(p) = ps.iter().find(|p| p.needs_theta()) {
                    return Err(SectionError {
                        section: "options".into(),
                        error: Error::MissingThetaForProcess(p.to_string()),
                    });
                }
            }
        }
        Ok(Built { experiment: exp, theta, notes })
    }
}

/// Section name → (line, column) recorded while parsing.
pub(crate) type Locations = HashMap<String, (usize, usize)>;
