//! Motion-reversal checks for pre- and post-selected ensembles.
//!
//! All processes work on the system⊗pointer space. The stages before the
//! intermediate reading are P = [U_ca⊗I, W] and the stages after it are
//! Q = [U_bc⊗I]. With A = a⊗ready and B = b⊗Ω the forward amplitude for
//! outcome i is ⟨B|Q Γ_i P|A⟩; the other processes reach the same number by
//! running backwards, by time-reversing the boundary states, or both.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::apparatus::{identity_matrix, Eigenstructure, IntermediateModel, Matrix, Mode};
use crate::error::{Error, Result};
use crate::linalg::{
    adjoint, apply, apply_antiunitary, compose, cx, inner, orthonormal_complement, projector, ray_distance,
    unitary_from_spectrum, AntiunitaryOp, Cx, HilbertSpace, Level, Operator, SpectralData, StateVector,
    DEFAULT_TOL, I, ONE, ZERO,
};
use crate::ppse::{Experiment, SelectionEvent, EMPTY_ENSEMBLE_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessTag {
    /// A → B, forward.
    I,
    /// A ← B, backward from B.
    Ii,
    /// Θ̃B → ΘA, forward through the stages in reverse order.
    Iii,
    /// Θ̃B ← ΘA, backward.
    Iv,
    /// ΘA → ΘB, forward.
    V,
    /// B → A, forward (boundary states interchanged).
    Vi,
    /// ΘA ← ΘB, backward.
    Vii,
    /// B ← A, backward.
    Viii,
}

impl ProcessTag {
    pub const ALL: [ProcessTag; 8] = [
        ProcessTag::I,
        ProcessTag::Ii,
        ProcessTag::Iii,
        ProcessTag::Iv,
        ProcessTag::V,
        ProcessTag::Vi,
        ProcessTag::Vii,
        ProcessTag::Viii,
    ];

    pub fn roman(self) -> &'static str {
        match self {
            ProcessTag::I => "i",
            ProcessTag::Ii => "ii",
            ProcessTag::Iii => "iii",
            ProcessTag::Iv => "iv",
            ProcessTag::V => "v",
            ProcessTag::Vi => "vi",
            ProcessTag::Vii => "vii",
            ProcessTag::Viii => "viii",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.roman() == s)
    }

    pub fn needs_theta(self) -> bool {
        matches!(self, ProcessTag::Iii | ProcessTag::Iv | ProcessTag::V | ProcessTag::Vii)
    }

    /// Processes (i)–(iv) must agree under motion reversal; (v)–(viii) agree
    /// with them only when the boundary states are Θ-invariant.
    pub fn first_row(self) -> bool {
        matches!(self, ProcessTag::I | ProcessTag::Ii | ProcessTag::Iii | ProcessTag::Iv)
    }
}

impl fmt::Display for ProcessTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.roman())
    }
}

/// Θ⁻¹ U Θ = U†, i.e. T†UT = Uᵀ for Θ = T·K.
pub fn check_motion_reversal(u: &Operator, theta: &AntiunitaryOp, tol: f64) -> Result<bool> {
    let t = theta.unitary_part();
    if t.dim() != u.dim() {
        return Err(Error::DimensionMismatch { left: t.dim(), right: u.dim() });
    }
    let lhs = compose(&compose(&adjoint(t), u)?, t)?;
    Ok(lhs.max_abs_diff(&u.transpose()) <= tol)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProcessResult {
    pub process: ProcessTag,
    pub weights: Vec<f64>,
    /// max_i |D_i − D_i(forward)|.
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeSymReport {
    pub forward: Vec<f64>,
    pub processes: Vec<ProcessResult>,
    /// Largest deviation among the processes of the first row.
    pub max_deviation: f64,
    /// Back-propagating the post-selected state and projecting on a⊗ready
    /// gives back the pre-selected state (up to phase).
    pub recovered_initial: bool,
    /// Every stage satisfies motion reversal under the supplied Θ; None
    /// when no Θ was supplied.
    pub motion_reversal: Option<bool>,
}

impl TimeSymReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation <= tol && self.recovered_initial
    }
}

struct Frame {
    p: Vec<Operator>,
    q: Vec<Operator>,
    gamma: Vec<Operator>,
    a: StateVector,
    b: StateVector,
    /// b⊗ready and a⊗Ω: boundary states with the system parts interchanged.
    b_ready: StateVector,
    a_blind: StateVector,
    theta: Option<AntiunitaryOp>,
}

impl Frame {
    fn new(exp: &Experiment, theta: Option<&AntiunitaryOp>) -> Result<Self> {
        let sys = exp.system().clone();
        let joint = exp.joint_space();
        let g = exp.gamma()?;
        let gamma = (0..g.len()).map(|i| g.lifted(i, &sys).relabel(joint.clone())).collect::<Result<_>>()?;
        let theta = match theta {
            Some(t) => {
                if t.space().dim() != sys.dim() {
                    return Err(Error::DimensionMismatch { left: sys.dim(), right: t.space().dim() });
                }
                let ext = t.extend(&exp.model.pointer);
                Some(AntiunitaryOp::new(ext.unitary_part().relabel(joint)?, exp.tol)?)
            }
            None => None,
        };
        Ok(Frame {
            p: exp.pre_stages(),
            q: exp.post_stages(),
            gamma,
            a: exp.a_joint(),
            b: exp.b_blind(),
            b_ready: exp.joint_of(exp.b(), &exp.model.ready_state()),
            a_blind: exp.joint_of(exp.a(), &exp.model.pointer_blind()),
            theta,
        })
    }

    fn theta(&self, process: ProcessTag) -> Result<&AntiunitaryOp> {
        self.theta.as_ref().ok_or_else(|| Error::MissingThetaForProcess(process.to_string()))
    }

    fn th(&self, process: ProcessTag, v: &StateVector) -> Result<StateVector> {
        apply_antiunitary(self.theta(process)?, v)
    }

    fn gamma_tilde(&self, process: ProcessTag, i: usize) -> Result<Operator> {
        self.theta(process)?.conjugate_operator(&self.gamma[i])
    }

    /// Apply operators in the given order.
    fn run(v: &StateVector, ops: impl IntoIterator<Item = Operator>) -> Result<StateVector> {
        let mut v = v.clone();
        for u in ops {
            v = apply(&u, &v)?;
        }
        Ok(v)
    }

    fn fwd(ops: &[Operator]) -> Vec<Operator> {
        ops.to_vec()
    }

    fn rev(ops: &[Operator]) -> Vec<Operator> {
        ops.iter().rev().cloned().collect()
    }

    fn adj_rev(ops: &[Operator]) -> Vec<Operator> {
        ops.iter().rev().map(adjoint).collect()
    }

    fn adj_fwd(ops: &[Operator]) -> Vec<Operator> {
        ops.iter().map(adjoint).collect()
    }

    fn amplitude(&self, process: ProcessTag, i: usize) -> Result<Cx> {
        use ProcessTag::*;
        let g = self.gamma[i].clone();
        // (start, first leg, Γ, second leg, end)
        let (start, leg1, gm, leg2, end) = match process {
            I => (self.a.clone(), Self::fwd(&self.p), g, Self::fwd(&self.q), self.b.clone()),
            Ii => (self.b.clone(), Self::adj_rev(&self.q), g, Self::adj_rev(&self.p), self.a.clone()),
            Iii => (
                self.th(process, &self.b)?,
                Self::rev(&self.q),
                self.gamma_tilde(process, i)?,
                Self::rev(&self.p),
                self.th(process, &self.a)?,
            ),
            Iv => (
                self.th(process, &self.a)?,
                Self::adj_fwd(&self.p),
                self.gamma_tilde(process, i)?,
                Self::adj_fwd(&self.q),
                self.th(process, &self.b)?,
            ),
            V => (
                self.th(process, &self.a)?,
                Self::fwd(&self.p),
                self.gamma_tilde(process, i)?,
                Self::fwd(&self.q),
                self.th(process, &self.b)?,
            ),
            Vi => (self.b_ready.clone(), Self::fwd(&self.p), g, Self::fwd(&self.q), self.a_blind.clone()),
            Vii => (
                self.th(process, &self.b)?,
                Self::adj_rev(&self.q),
                self.gamma_tilde(process, i)?,
                Self::adj_rev(&self.p),
                self.th(process, &self.a)?,
            ),
            Viii => (self.a_blind.clone(), Self::adj_rev(&self.q), g, Self::adj_rev(&self.p), self.b_ready.clone()),
        };
        let v = Self::run(&start, leg1)?;
        let v = apply(&gm, &v)?;
        let v = Self::run(&v, leg2)?;
        inner(&end, &v)
    }

    fn weights(&self, process: ProcessTag) -> Result<Vec<f64>> {
        let raw: Vec<f64> =
            (0..self.gamma.len()).map(|i| self.amplitude(process, i).map(|z| z.norm_sqr())).collect::<Result<_>>()?;
        normalise(raw)
    }
}

fn normalise(raw: Vec<f64>) -> Result<Vec<f64>> {
    let total: f64 = raw.iter().sum();
    if total < EMPTY_ENSEMBLE_TOL {
        return Err(Error::EmptyEnsemble { denominator: total });
    }
    Ok(raw.into_iter().map(|r| r / total).collect())
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Weights for one process, with their deviation from process (i).
pub fn reverse_ppse(exp: &Experiment, theta: Option<&AntiunitaryOp>, process: ProcessTag) -> Result<ProcessResult> {
    let f = Frame::new(exp, theta)?;
    let forward = f.weights(ProcessTag::I)?;
    let weights = f.weights(process)?;
    Ok(ProcessResult { process, deviation: max_dev(&weights, &forward), weights })
}

/// Default process list: everything that can run with what is supplied.
pub fn default_processes(has_theta: bool) -> Vec<ProcessTag> {
    ProcessTag::ALL.into_iter().filter(|p| has_theta || !p.needs_theta()).collect()
}

/// Run the requested processes and check the physical post-selected state
/// propagates back to the pre-selected one.
pub fn time_symmetry(exp: &Experiment, theta: Option<&AntiunitaryOp>, processes: &[ProcessTag]) -> Result<TimeSymReport> {
    let f = Frame::new(exp, theta)?;
    let forward = f.weights(ProcessTag::I)?;
    let mut results = Vec::new();
    for &p in processes {
        let w = f.weights(p)?;
        results.push(ProcessResult { process: p, deviation: max_dev(&w, &forward), weights: w });
    }
    let max_deviation = results.iter().filter(|r| r.process.first_row()).map(|r| r.deviation).fold(0.0, f64::max);
    let motion_reversal = match theta {
        Some(t) => Some(stages_reversible(exp, t)?),
        None => None,
    };
    Ok(TimeSymReport {
        forward,
        processes: results,
        max_deviation,
        recovered_initial: recovers_initial(exp, &f)?,
        motion_reversal,
    })
}

/// Motion reversal for U_ca, U_bc and (with Θ⊗K) the pointer interaction.
pub fn stages_reversible(exp: &Experiment, theta: &AntiunitaryOp) -> Result<bool> {
    let tol = exp.tol.max(DEFAULT_TOL);
    let ext = theta.extend(&exp.model.pointer);
    let ext = AntiunitaryOp::new(ext.unitary_part().relabel(exp.joint_space())?, tol)?;
    let w = exp.interaction().relabel(exp.joint_space())?;
    Ok(check_motion_reversal(&exp.u_ca, theta, tol)?
        && check_motion_reversal(&exp.u_bc, theta, tol)?
        && check_motion_reversal(&w, &ext, tol)?)
}

fn recovers_initial(exp: &Experiment, f: &Frame) -> Result<bool> {
    let b_tb = match exp.pipeline() {
        Ok(s) => s.joint,
        Err(_) => return Ok(false),
    };
    let back = Frame::run(&b_tb, Frame::adj_rev(&f.q).into_iter().chain(Frame::adj_rev(&f.p)))?;
    let pa = projector(&f.a, exp.tol)?;
    let projected = apply(&pa, &back)?;
    if projected.norm() < 1e-12 {
        return Ok(false);
    }
    Ok(ray_distance(&projected, &f.a)? <= 1e-9)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResetReport {
    pub weights: Vec<f64>,
    pub eigen_probs: Vec<f64>,
    pub forward: Vec<f64>,
    pub max_deviation: f64,
}

/// Reverse-time weights with the pointer reset to ready at t_b: start from
/// b⊗ready, run every stage backwards, read the pointer, then select a with
/// a pointer-blind projection.
pub fn reset_variant(exp: &Experiment) -> Result<ResetReport> {
    let f = Frame::new(exp, None)?;
    let back = Frame::run(&f.b_ready, Frame::adj_rev(&f.q).into_iter().chain(Frame::adj_rev(&f.p)))?;
    let raw = f
        .gamma
        .iter()
        .map(|g| Ok(inner(&f.a_blind, &apply(g, &back)?)?.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    let weights = normalise(raw)?;
    let forward = f.weights(ProcessTag::I)?;
    let tags = exp.model.tags.clone();
    let mut eigen_probs = vec![0.0; exp.model.eigen.blocks.len()];
    for (t, w) in tags.iter().zip(&weights) {
        eigen_probs[t.k] += w;
    }
    Ok(ResetReport { max_deviation: max_dev(&weights, &forward), weights, eigen_probs, forward })
}

// ---------------------------------------------------------------------------
// First counterexample: a degenerate two-step record driven by a Hamiltonian.

/// System labels, block structure and the d-matrix of the doubly degenerate block.
pub fn appendix_a_model(d: &Matrix, strict: bool, tol: f64) -> Result<IntermediateModel> {
    let s = HilbertSpace::new(["c00", "c11", "c12"])?;
    let e = Eigenstructure::from_labels(s, &[&["c00"], &["c11", "c12"]])?;
    IntermediateModel::new(e, Mode::TwoStep, Some(vec![identity_matrix(1), d.clone()]), strict, tol)
}

/// Spectral data of the interaction Hamiltonian (g = 1): the two τ states
/// and the complement at E = 0, σ± at E = ±1.
pub fn appendix_a_spectrum(model: &IntermediateModel, tol: f64) -> Result<SpectralData> {
    let joint = model.joint_space();
    let np = model.pointer.dim();
    let d = &model.d[1];
    let ket = |sys: usize, ptr: &str| -> StateVector {
        let mut v = StateVector::zeros(joint.clone());
        let p = model.pointer.index_of(ptr).expect("pointer label");
        let mut amps = v.amps().to_vec();
        amps[sys * np + p] = ONE;
        v = StateVector::new(joint.clone(), amps).expect("finite");
        v
    };
    let lin = |terms: &[(Cx, StateVector)]| -> StateVector {
        terms.iter().fold(StateVector::zeros(joint.clone()), |acc, (c, v)| acc.add(&v.scale(*c)).expect("same"))
    };
    let (c00, c11, c12) = (0, 1, 2);
    let g0 = "k0:l0:m0";
    let (g11, g12, g21, g22) = ("k1:l0:m0", "k1:l0:m1", "k1:l1:m0", "k1:l1:m1");
    let tau1 = lin(&[(-d[0][1].conj(), ket(c11, g11)), (d[0][0].conj(), ket(c12, g12))]);
    let tau2 = lin(&[(d[1][1].conj(), ket(c11, g21)), (-d[1][0].conj(), ket(c12, g22))]);
    let h = cx(FRAC_1_SQRT_2, 0.0);
    let rec0 = ket(c00, g0);
    let rec11 = lin(&[(d[0][0], ket(c11, g11)), (d[0][1], ket(c12, g12))]);
    let rec12 = lin(&[(d[1][0], ket(c11, g21)), (d[1][1], ket(c12, g22))]);
    let sigma = |base: StateVector, rec: &StateVector, sign: f64| lin(&[(h, base), (h * sign, rec.clone())]);
    let plus = vec![
        sigma(ket(c00, "ready"), &rec0, 1.0),
        sigma(ket(c11, "ready"), &rec11, 1.0),
        sigma(ket(c12, "ready"), &rec12, 1.0),
    ];
    let minus = vec![
        sigma(ket(c00, "ready"), &rec0, -1.0),
        sigma(ket(c11, "ready"), &rec11, -1.0),
        sigma(ket(c12, "ready"), &rec12, -1.0),
    ];
    let mut zero = vec![tau1, tau2];
    let listed: Vec<&StateVector> = zero.iter().chain(&plus).chain(&minus).collect();
    let rest = orthonormal_complement(&joint, &listed, tol)?;
    zero.extend(rest);
    SpectralData::new(
        joint,
        vec![
            Level { energy: 0.0, vectors: zero },
            Level { energy: 1.0, vectors: plus },
            Level { energy: -1.0, vectors: minus },
        ],
        tol,
    )
}

/// The first counterexample with its interaction given by the spectrum above,
/// evolved for a quarter period.
pub fn appendix_a_experiment(d: &Matrix, strict: bool, tol: f64) -> Result<Experiment> {
    let model = appendix_a_model(d, strict, tol)?;
    let s = model.system().clone();
    let u = unitary_from_spectrum(&appendix_a_spectrum(&model, tol)?, FRAC_PI_2);
    let a = StateVector::from_real(s.clone(), &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0])?;
    let b = StateVector::from_real(s.clone(), &[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2])?;
    Experiment::new(
        model,
        SelectionEvent::onto(a, "alpha", tol)?,
        SelectionEvent::onto(b, "beta", tol)?,
        Operator::identity(s.clone()),
        Operator::identity(s),
        tol,
    )?
    .with_joint(u)
}

/// −i/√2 (c00⊗γ0 + d11 c11⊗γ11 + d12 c12⊗γ12).
pub fn appendix_a_recorded(model: &IntermediateModel) -> StateVector {
    let np = model.pointer.dim();
    let idx = |sys: usize, ptr: &str| sys * np + model.pointer.index_of(ptr).expect("label");
    let mut amps = vec![ZERO; model.joint_space().dim()];
    let c = -I * FRAC_1_SQRT_2;
    amps[idx(0, "k0:l0:m0")] = c;
    amps[idx(1, "k1:l0:m0")] = c * model.d[1][0][0];
    amps[idx(2, "k1:l0:m1")] = c * model.d[1][0][1];
    StateVector::new(model.joint_space(), amps).expect("finite")
}

/// Row-normalised d with first row (d11, √(1 − d11²)) and second row (0, 1).
pub fn completed_d(d11: f64) -> Matrix {
    let d12 = (1.0 - d11 * d11).max(0.0).sqrt();
    vec![vec![cx(d11, 0.0), cx(d12, 0.0)], vec![ZERO, ONE]]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AppendixAReport {
    pub prob_k1: f64,
    /// Same probability from the closed form and from the oracle.
    pub closed_form_k1: f64,
    pub oracle_k1: f64,
    /// |d11|²/(1+|d11|²) and |d12|²/(1+|d12|²) for comparison.
    pub formula_d11: f64,
    pub formula_d12: f64,
    /// Distance (up to global phase) between the evolved state and the
    /// closed-form record −i/√2(…).
    pub recorded_deviation: f64,
    pub timesym: TimeSymReport,
    pub reset: ResetReport,
}

pub fn appendix_a(d: &Matrix, strict: bool) -> Result<AppendixAReport> {
    let tol = DEFAULT_TOL;
    let exp = appendix_a_experiment(d, strict, tol)?;
    let rho = exp.density()?;
    let probs = rho.eigen_probs(2);
    let oracle = exp.oracle()?;
    let a_tc = exp.a_at_tc()?;
    let recorded = appendix_a_recorded(&exp.model);
    let theta = AntiunitaryOp::conjugation(exp.system().clone());
    let (d11, d12) = (d[0][0].norm_sqr(), d[0][1].norm_sqr());
    Ok(AppendixAReport {
        prob_k1: probs[1],
        closed_form_k1: exp.closed_form(1)?,
        oracle_k1: oracle.eigen_probs(&exp.model.tags, 2)[1],
        formula_d11: d11 / (1.0 + d11),
        formula_d12: d12 / (1.0 + d12),
        recorded_deviation: ray_distance(&a_tc, &recorded)?,
        timesym: time_symmetry(&exp, Some(&theta), &ProcessTag::ALL)?,
        reset: reset_variant(&exp)?,
    })
}

// ---------------------------------------------------------------------------
// Second counterexample: a four-level system with a cyclic permutation.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AppendixBVariant {
    Original,
    Interchanged,
    /// Boundary states interchanged and time-reversed.
    TimeReversed,
}

impl AppendixBVariant {
    pub const ALL: [AppendixBVariant; 3] =
        [AppendixBVariant::Original, AppendixBVariant::Interchanged, AppendixBVariant::TimeReversed];
}

pub fn appendix_b_space() -> Arc<HilbertSpace> {
    HilbertSpace::new(["00", "11", "12", "13"]).expect("distinct labels")
}

/// 00→00, 11→12, 12→13, 13→11.
pub fn appendix_b_unitary() -> Operator {
    Operator::from_real_rows(
        appendix_b_space(),
        &[&[1., 0., 0., 0.], &[0., 0., 0., 1.], &[0., 1., 0., 0.], &[0., 0., 1., 0.]],
    )
    .expect("4×4")
}

/// r = −(1 + i√3)/2.
pub fn appendix_b_r() -> Cx {
    cx(-0.5, -(3f64.sqrt()) / 2.0)
}

pub fn appendix_b_theta() -> AntiunitaryOp {
    let r = appendix_b_r();
    let s3 = cx(3f64.sqrt(), 0.0);
    let rows = vec![
        vec![s3, ZERO, ZERO, ZERO],
        vec![ZERO, ONE, r, ONE],
        vec![ZERO, r, ONE, ONE],
        vec![ZERO, ONE, ONE, r],
    ];
    let t = Operator::from_rows(appendix_b_space(), &rows).expect("4×4").scale(cx(1.0 / 3f64.sqrt(), 0.0));
    AntiunitaryOp::new(t, DEFAULT_TOL).expect("unitary")
}

/// (a, b) for the original selection: (00+11)/√2 and (00+12)/√2.
pub fn appendix_b_states() -> (StateVector, StateVector) {
    let s = appendix_b_space();
    let h = FRAC_1_SQRT_2;
    (
        StateVector::from_real(s.clone(), &[h, h, 0.0, 0.0]).expect("4"),
        StateVector::from_real(s, &[h, 0.0, h, 0.0]).expect("4"),
    )
}

pub fn appendix_b_experiment(variant: AppendixBVariant, tol: f64) -> Result<Experiment> {
    let s = appendix_b_space();
    let (a, b) = appendix_b_states();
    let theta = appendix_b_theta();
    let (pre, post) = match variant {
        AppendixBVariant::Original => (a, b),
        AppendixBVariant::Interchanged => (b, a),
        AppendixBVariant::TimeReversed => (apply_antiunitary(&theta, &b)?, apply_antiunitary(&theta, &a)?),
    };
    let e = Eigenstructure::from_labels(s, &[&["00"], &["11", "12", "13"]])?;
    let model = IntermediateModel::new(e, Mode::Coarse, None, false, tol)?;
    let u = appendix_b_unitary();
    Experiment::new(
        model,
        SelectionEvent::onto(pre, "alpha", tol)?,
        SelectionEvent::onto(post, "beta", tol)?,
        u.clone(),
        u,
        tol,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AppendixBReport {
    pub variant: AppendixBVariant,
    /// Probability per eigenvalue index (k = 0, k = 1).
    pub probs: Vec<f64>,
    pub closed_form: Vec<f64>,
    pub oracle: Vec<f64>,
}

impl AppendixBReport {
    pub fn prob_k1(&self) -> f64 {
        self.probs[1]
    }
}

pub fn appendix_b(variant: AppendixBVariant) -> Result<AppendixBReport> {
    let exp = appendix_b_experiment(variant, DEFAULT_TOL)?;
    let rho = exp.density()?;
    let oracle = exp.oracle()?;
    Ok(AppendixBReport {
        variant,
        probs: rho.eigen_probs(2),
        closed_form: exp.closed_forms()?,
        oracle: oracle.eigen_probs(&exp.model.tags, 2),
    })
}
