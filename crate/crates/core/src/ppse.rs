//! Pre- and post-selected ensembles.
//!
//! Three ways of getting outcome probabilities live here and are meant to be
//! played against each other:
//!
//! * [`ppse_density`] + [`outcome_prob`]: weights D_i from ⟨B;t_c|Γ_i|A;t_c⟩,
//! * [`prob_closed_form`]: per-mode formulas in system amplitudes only,
//! * [`oracle_prob`]: explicit four-factor joint state, Born rule at the end.

use std::sync::Arc;

use serde::Serialize;

use crate::apparatus::{gamma_set, Eigenstructure, GammaSet, IntermediateModel, Matrix, Mode, OutcomeTag};
use crate::error::{Error, Result, StageExt};
use crate::linalg::{
    adjoint, apply, apply_on_factors, check_orthonormal, inner, is_unitary, kron, projector, tensor, Cx,
    HilbertSpace, Operator, StateVector, ONE, ZERO,
};

/// Below this the weight denominator is treated as exactly zero.
pub const EMPTY_ENSEMBLE_TOL: f64 = 1e-20;

/// A projective selection onto one vector of an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionEvent {
    pub basis: Vec<StateVector>,
    pub index: usize,
    /// Name of the apparatus state recording the selected outcome.
    pub label: String,
}

impl SelectionEvent {
    pub fn new(basis: Vec<StateVector>, index: usize, label: impl Into<String>, tol: f64) -> Result<Self> {
        let ev = SelectionEvent { basis, index, label: label.into() };
        ev.validate(tol)?;
        Ok(ev)
    }

    /// Select `state`, completing it to a basis (the completion only matters
    /// to the oracle, which needs every apparatus branch).
    pub fn onto(state: StateVector, label: impl Into<String>, tol: f64) -> Result<Self> {
        let extra = crate::linalg::orthonormal_complement(state.space(), &[&state], tol)?;
        let mut basis = vec![state];
        basis.extend(extra);
        Self::new(basis, 0, label, tol)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.index >= self.basis.len() {
            return Err(Error::BadIndex { index: self.index, len: self.basis.len() });
        }
        let refs: Vec<&StateVector> = self.basis.iter().collect();
        check_orthonormal(&refs, tol)
    }

    pub fn chosen(&self) -> &StateVector {
        &self.basis[self.index]
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        self.chosen().space()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stage {
    /// After pre-selection.
    Ta,
    /// After the intermediate interaction.
    Tc,
    /// After post-selection.
    Tb,
}

/// Joint system⊗pointer vector carried between stages. The vector is kept
/// unnormalised: its squared norm is the cumulative selection probability.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineState {
    pub stage: Stage,
    pub joint: StateVector,
    /// Probability of each selection so far, conditional on the previous ones.
    pub selection_probs: Vec<f64>,
}

impl PipelineState {
    pub fn success(&self) -> f64 {
        self.joint.norm_sqr()
    }

    pub fn normalized(&self) -> Result<StateVector> {
        self.joint.normalized()
    }
}

/// |⟨a_i|ψ⟩|² chance of selecting a_i; the joint state is ⟨a_i|ψ⟩ a_i⊗ready.
pub fn preselect(
    initial: &StateVector,
    ev: &SelectionEvent,
    model: &IntermediateModel,
    tol: f64,
) -> Result<PipelineState> {
    if !initial.is_normalized(tol) {
        return Err(Error::NotNormalized { norm: initial.norm() });
    }
    ev.validate(tol)?;
    let amp = inner(ev.chosen(), initial)?;
    let p = amp.norm_sqr();
    if p < tol {
        return Err(Error::ImpossibleSelection { prob: p });
    }
    let joint = tensor(&ev.chosen().scale(amp), &model.ready_state()).relabel(model.joint_space())?;
    Ok(PipelineState { stage: Stage::Ta, joint, selection_probs: vec![p] })
}

/// Apply the stages between t_a and t_c.
pub fn evolve_to_tc(state: &PipelineState, stages: &[Operator]) -> Result<PipelineState> {
    if state.stage != Stage::Ta {
        return Err(Error::ModeMismatch("evolution to t_c must start at t_a".into()));
    }
    let mut joint = state.joint.clone();
    for u in stages {
        joint = apply(u, &joint)?;
    }
    Ok(PipelineState { stage: Stage::Tc, joint, selection_probs: state.selection_probs.clone() })
}

/// Evolve the system with U_bc and project it onto b_j. The pointer is left
/// alone, so the result stays entangled with the intermediate record.
pub fn postselect(state: &PipelineState, u_bc: &Operator, ev: &SelectionEvent, tol: f64) -> Result<PipelineState> {
    if state.stage != Stage::Tc {
        return Err(Error::ModeMismatch("post-selection must start at t_c".into()));
    }
    if !is_unitary(u_bc, tol) {
        return Err(Error::NotUnitary("U(t_b, t_c)".into()));
    }
    ev.validate(tol)?;
    let sys = u_bc.dim();
    let np = state.joint.dim() / sys;
    let dims = [sys, np];
    let evolved = apply_on_factors(u_bc, &[0], &dims, &state.joint)?;
    let pb = projector(ev.chosen(), tol)?;
    let joint = apply_on_factors(&pb, &[0], &dims, &evolved)?;
    let before = state.joint.norm_sqr();
    let p = if before > 0.0 { joint.norm_sqr() / before } else { 0.0 };
    if p < tol {
        return Err(Error::ImpossiblePostSelection { prob: p });
    }
    let mut selection_probs = state.selection_probs.clone();
    selection_probs.push(p);
    Ok(PipelineState { stage: Stage::Tb, joint, selection_probs })
}

/// ρ(A, Γ, B) = Σ_i D_i Γ_i.
#[derive(Clone, Debug, PartialEq)]
pub struct PPSEDensity {
    pub gamma: GammaSet,
    pub weights: Vec<f64>,
}

impl PPSEDensity {
    pub fn operator(&self) -> Operator {
        let mut rho = Operator::zeros(self.gamma.pointer.clone());
        for ((_, g), w) in self.gamma.elements.iter().zip(&self.weights) {
            rho = rho.add(&g.scale(Cx::new(*w, 0.0))).expect("same space");
        }
        rho
    }

    pub fn tags(&self) -> Vec<OutcomeTag> {
        self.gamma.tags()
    }

    /// Probability per eigenvalue index, 0..n_blocks.
    pub fn eigen_probs(&self, n_blocks: usize) -> Vec<f64> {
        (0..n_blocks).map(|k| outcome_prob(self, &Selector::Eigenvalue(k)).unwrap_or(0.0)).collect()
    }
}

/// D_i ∝ |⟨B;t_c|Γ_i|A;t_c⟩|², with Γ_i acting on the pointer factor.
pub fn ppse_density(a_tc: &StateVector, b_tc: &StateVector, gamma: &GammaSet) -> Result<PPSEDensity> {
    if a_tc.space() != b_tc.space() && a_tc.space().as_ref() != b_tc.space().as_ref() {
        return Err(Error::DimensionMismatch { left: a_tc.dim(), right: b_tc.dim() });
    }
    let np = gamma.pointer.dim();
    if !a_tc.dim().is_multiple_of(np) {
        return Err(Error::DimensionMismatch { left: a_tc.dim(), right: np });
    }
    let dims = [a_tc.dim() / np, np];
    let mut raw = Vec::with_capacity(gamma.len());
    for (_, g) in &gamma.elements {
        let ga = apply_on_factors(g, &[1], &dims, a_tc)?;
        raw.push(inner(b_tc, &ga)?.norm_sqr());
    }
    let total: f64 = raw.iter().sum();
    if total < EMPTY_ENSEMBLE_TOL {
        return Err(Error::EmptyEnsemble { denominator: total });
    }
    Ok(PPSEDensity { gamma: gamma.clone(), weights: raw.into_iter().map(|r| r / total).collect() })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Selector {
    Tag(OutcomeTag),
    Tags(Vec<OutcomeTag>),
    /// Every tag reporting eigenvalue index k.
    Eigenvalue(usize),
    All,
}

/// Σ over selected j of Tr(ρ Γ_j).
pub fn outcome_prob(rho: &PPSEDensity, selector: &Selector) -> Result<f64> {
    let tags = rho.tags();
    let chosen: Vec<usize> = match selector {
        Selector::All => (0..tags.len()).collect(),
        Selector::Eigenvalue(k) => {
            let v: Vec<usize> = (0..tags.len()).filter(|&i| tags[i].k == *k).collect();
            if v.is_empty() {
                return Err(Error::UnknownOutcomeTag(format!("k{k}")));
            }
            v
        }
        Selector::Tag(t) => vec![find_tag(&tags, t)?],
        Selector::Tags(ts) => ts.iter().map(|t| find_tag(&tags, t)).collect::<Result<_>>()?,
    };
    let rho_op = rho.operator();
    let mut p = 0.0;
    for j in chosen {
        let g = &rho.gamma.elements[j].1;
        p += crate::linalg::compose(&rho_op, g)?.trace().re;
    }
    Ok(p.clamp(0.0, 1.0))
}

fn find_tag(tags: &[OutcomeTag], t: &OutcomeTag) -> Result<usize> {
    tags.iter().position(|x| x == t).ok_or_else(|| Error::UnknownOutcomeTag(t.label()))
}

/// Closed-form probability that the intermediate measurement reports
/// eigenvalue index `k`, computed from system amplitudes only.
///
/// With x_kl = ⟨b|U_bc|c_kl⟩⟨c_kl|U_ca|a⟩ the unnormalised weights are
/// |x_k|² (non-degenerate), |Σ_l x_kl|² (coarse), Σ_l |x_kl|² (fine) and
/// Σ_{l,m} |⟨b|U_bc|c_km⟩ d^k_lm ⟨c_kl|U_ca|a⟩|² (two-step).
#[allow(clippy::too_many_arguments)]
pub fn prob_closed_form(
    mode: Mode,
    a: &StateVector,
    b: &StateVector,
    u_ca: &Operator,
    u_bc: &Operator,
    eigen: &Eigenstructure,
    d: &[Matrix],
    k: usize,
) -> Result<f64> {
    let w = closed_form_weights(mode, a, b, u_ca, u_bc, eigen, d)?;
    if k >= w.len() {
        return Err(Error::UnknownOutcomeTag(format!("k{k}")));
    }
    let total: f64 = w.iter().sum();
    if total < EMPTY_ENSEMBLE_TOL {
        return Err(Error::EmptyEnsemble { denominator: total });
    }
    Ok(w[k] / total)
}

/// Unnormalised per-eigenvalue closed-form weights.
pub fn closed_form_weights(
    mode: Mode,
    a: &StateVector,
    b: &StateVector,
    u_ca: &Operator,
    u_bc: &Operator,
    eigen: &Eigenstructure,
    d: &[Matrix],
) -> Result<Vec<f64>> {
    let ua = apply(u_ca, a)?;
    let ub = apply(&adjoint(u_bc), b)?;
    let mut out = Vec::with_capacity(eigen.blocks.len());
    for (k, block) in eigen.blocks.iter().enumerate() {
        // fwd[l] = ⟨c_kl|U_ca|a⟩, back[l] = ⟨b|U_bc|c_kl⟩
        let fwd: Vec<Cx> = block.iter().map(|c| inner(c, &ua)).collect::<Result<_>>()?;
        let back: Vec<Cx> = block.iter().map(|c| inner(c, &ub).map(|z| z.conj())).collect::<Result<_>>()?;
        let w = match mode {
            Mode::NonDegenerate => {
                if block.len() != 1 {
                    return Err(Error::ModeMismatch(format!("block {k} is degenerate")));
                }
                (back[0] * fwd[0]).norm_sqr()
            }
            Mode::Coarse => back.iter().zip(&fwd).map(|(x, y)| x * y).sum::<Cx>().norm_sqr(),
            Mode::Fine => back.iter().zip(&fwd).map(|(x, y)| (x * y).norm_sqr()).sum(),
            Mode::TwoStep => {
                let dk = d.get(k).ok_or_else(|| Error::ModeMismatch(format!("no d for block {k}")))?;
                let n = block.len();
                let mut s = 0.0;
                for l in 0..n {
                    for m in 0..n {
                        s += (back[m] * dk[l][m] * fwd[l]).norm_sqr();
                    }
                }
                s
            }
        };
        out.push(w);
    }
    Ok(out)
}

/// A full experiment: selections, stage unitaries and the apparatus.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub model: IntermediateModel,
    pub pre: SelectionEvent,
    /// State before pre-selection; the selected vector itself when absent.
    pub initial: Option<StateVector>,
    pub post: SelectionEvent,
    pub u_ca: Operator,
    pub u_bc: Operator,
    /// Interaction on system⊗pointer replacing the record unitary W.
    pub joint: Option<Operator>,
    pub tol: f64,
}

impl Experiment {
    pub fn new(
        model: IntermediateModel,
        pre: SelectionEvent,
        post: SelectionEvent,
        u_ca: Operator,
        u_bc: Operator,
        tol: f64,
    ) -> Result<Self> {
        let e = Experiment { model, pre, initial: None, post, u_ca, u_bc, joint: None, tol };
        e.validate()?;
        Ok(e)
    }

    pub fn with_initial(mut self, initial: StateVector) -> Result<Self> {
        self.initial = Some(initial);
        self.validate()?;
        Ok(self)
    }

    pub fn with_joint(mut self, joint: Operator) -> Result<Self> {
        self.joint = Some(joint);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let sys = self.model.system();
        for (what, s) in [("pre-selection basis", self.pre.space()), ("post-selection basis", self.post.space())] {
            if s.as_ref() != sys.as_ref() {
                return Err(Error::DimensionMismatch { left: sys.dim(), right: s.dim() })
                    .stage(what);
            }
        }
        self.pre.validate(self.tol).stage("pre-selection basis")?;
        self.post.validate(self.tol).stage("post-selection basis")?;
        for (name, u) in [("U(t_c, t_a)", &self.u_ca), ("U(t_b, t_c)", &self.u_bc)] {
            if u.dim() != sys.dim() {
                return Err(Error::DimensionMismatch { left: sys.dim(), right: u.dim() }).stage(name);
            }
            if !is_unitary(u, self.tol) {
                return Err(Error::NotUnitary(name.into()));
            }
        }
        if let Some(j) = &self.joint {
            let n = self.model.joint_space().dim();
            if j.dim() != n {
                return Err(Error::DimensionMismatch { left: n, right: j.dim() }).stage("joint interaction");
            }
            if !is_unitary(j, self.tol) {
                return Err(Error::NotUnitary("joint interaction".into()));
            }
        }
        if let Some(psi) = &self.initial {
            if psi.dim() != sys.dim() {
                return Err(Error::DimensionMismatch { left: sys.dim(), right: psi.dim() }).stage("initial state");
            }
        }
        Ok(())
    }

    pub fn system(&self) -> &Arc<HilbertSpace> {
        self.model.system()
    }

    pub fn joint_space(&self) -> Arc<HilbertSpace> {
        self.model.joint_space()
    }

    pub fn a(&self) -> &StateVector {
        self.pre.chosen()
    }

    pub fn b(&self) -> &StateVector {
        self.post.chosen()
    }

    pub fn interaction(&self) -> Operator {
        match &self.joint {
            Some(j) => j.clone(),
            None => self.model.interaction_unitary(),
        }
    }

    /// Joint-space stages between t_a and t_c, in time order.
    pub fn pre_stages(&self) -> Vec<Operator> {
        let lift = self.lift(&self.u_ca);
        vec![lift, self.interaction().relabel(self.joint_space()).expect("same dim")]
    }

    /// Joint-space stages between t_c and t_b, in time order.
    pub fn post_stages(&self) -> Vec<Operator> {
        vec![self.lift(&self.u_bc)]
    }

    /// U ⊗ I on system⊗pointer.
    pub fn lift(&self, u: &Operator) -> Operator {
        kron(u, &Operator::identity(self.model.pointer.clone()))
    }

    /// a ⊗ ready.
    pub fn a_joint(&self) -> StateVector {
        self.joint_of(self.a(), &self.model.ready_state())
    }

    /// b ⊗ Ω, the post-selection seen by a pointer-blind projection.
    pub fn b_blind(&self) -> StateVector {
        self.joint_of(self.b(), &self.model.pointer_blind())
    }

    pub fn joint_of(&self, sys: &StateVector, ptr: &StateVector) -> StateVector {
        tensor(sys, ptr).relabel(self.joint_space()).expect("same dim")
    }

    pub fn a_at_tc(&self) -> Result<StateVector> {
        let mut v = self.a_joint();
        for u in self.pre_stages() {
            v = apply(&u, &v)?;
        }
        Ok(v)
    }

    /// |B;t_c⟩ = U_bc†b ⊗ Ω.
    pub fn b_at_tc(&self) -> Result<StateVector> {
        let ub = apply(&adjoint(&self.u_bc), self.b())?;
        Ok(self.joint_of(&ub, &self.model.pointer_blind()))
    }

    pub fn gamma(&self) -> Result<GammaSet> {
        gamma_set(&self.model, self.tol)
    }

    pub fn density(&self) -> Result<PPSEDensity> {
        ppse_density(&self.a_at_tc()?, &self.b_at_tc()?, &self.gamma()?)
    }

    pub fn closed_form(&self, k: usize) -> Result<f64> {
        prob_closed_form(self.model.mode, self.a(), self.b(), &self.u_ca, &self.u_bc, &self.model.eigen, &self.model.d, k)
    }

    pub fn closed_forms(&self) -> Result<Vec<f64>> {
        (0..self.model.eigen.blocks.len()).map(|k| self.closed_form(k)).collect()
    }

    pub fn oracle(&self) -> Result<OracleResult> {
        oracle_prob(self)
    }

    /// Full forward pipeline through the stage functions.
    pub fn pipeline(&self) -> Result<PipelineState> {
        let initial = self.initial.clone().unwrap_or_else(|| self.a().clone());
        let s = preselect(&initial, &self.pre, &self.model, self.tol).stage("pre-selection")?;
        let s = evolve_to_tc(&s, &self.pre_stages()).stage("intermediate interaction")?;
        postselect(&s, &self.u_bc, &self.post, self.tol).stage("post-selection")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    /// Probability per outcome tag, in Γ-set order.
    pub probs: Vec<f64>,
    pub pre_prob: f64,
    /// Post-selection probability conditional on pre-selection.
    pub post_prob: f64,
}

impl OracleResult {
    pub fn eigen_probs(&self, tags: &[OutcomeTag], n_blocks: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_blocks];
        for (t, p) in tags.iter().zip(&self.probs) {
            out[t.k] += p;
        }
        out
    }
}

/// Brute force: carry system ⊗ pre-apparatus ⊗ pointer ⊗ post-apparatus
/// through every interaction and projection, then read the pointer.
pub fn oracle_prob(exp: &Experiment) -> Result<OracleResult> {
    let tol = exp.tol;
    let sys = exp.system().clone();
    let n = sys.dim();
    let np = exp.model.pointer.dim();
    let alpha = apparatus_space("a", exp.pre.basis.len())?;
    let beta = apparatus_space("b", exp.post.basis.len())?;
    let dims = [n, alpha.dim(), np, beta.dim()];
    let spaces = [sys.clone(), alpha.clone(), exp.model.pointer.clone(), beta.clone()];
    let joint = HilbertSpace::product_of(&spaces);

    let psi = exp.initial.clone().unwrap_or_else(|| exp.a().clone());
    let ready = |s: &Arc<HilbertSpace>| StateVector::basis(s.clone(), 0).expect("ready");
    let mut state = tensor(&tensor(&tensor(&psi, &ready(&alpha)), &ready(&exp.model.pointer)), &ready(&beta))
        .relabel(joint.clone())?;

    // pre-selection: record the A-basis outcome, then project
    state = apply_on_factors(&measurement_unitary(&exp.pre, &alpha, tol)?, &[0, 1], &dims, &state)?;
    let pa = kron(&projector(exp.a(), tol)?, &basis_projector(&alpha, exp.pre.index + 1));
    state = apply_on_factors(&pa, &[0, 1], &dims, &state)?;
    let pre_prob = state.norm_sqr();
    if pre_prob < tol {
        return Err(Error::ImpossibleSelection { prob: pre_prob });
    }

    state = apply_on_factors(&exp.u_ca, &[0], &dims, &state)?;
    let w = exp.interaction().relabel(sys.product(&exp.model.pointer))?;
    state = apply_on_factors(&w, &[0, 2], &dims, &state)?;

    state = apply_on_factors(&exp.u_bc, &[0], &dims, &state)?;
    state = apply_on_factors(&measurement_unitary(&exp.post, &beta, tol)?, &[0, 3], &dims, &state)?;
    let pb = kron(&projector(exp.b(), tol)?, &basis_projector(&beta, exp.post.index + 1));
    state = apply_on_factors(&pb, &[0, 3], &dims, &state)?;
    let post_prob = state.norm_sqr() / pre_prob;
    if post_prob < tol {
        return Err(Error::ImpossiblePostSelection { prob: post_prob });
    }

    // weight of each pointer outcome; ready (index 0) is not an outcome
    let strides = crate::linalg::strides(&dims);
    let mut raw = vec![0.0; np];
    for (idx, z) in state.amps().iter().enumerate() {
        raw[(idx / strides[2]) % np] += z.norm_sqr();
    }
    let outcomes = &raw[1..];
    let total: f64 = outcomes.iter().sum();
    if total < EMPTY_ENSEMBLE_TOL {
        return Err(Error::EmptyEnsemble { denominator: total });
    }
    Ok(OracleResult { probs: outcomes.iter().map(|p| p / total).collect(), pre_prob, post_prob })
}

fn apparatus_space(prefix: &str, n: usize) -> Result<Arc<HilbertSpace>> {
    HilbertSpace::new(std::iter::once("ready".to_string()).chain((0..n).map(|i| format!("{prefix}{i}"))))
}

fn basis_projector(space: &Arc<HilbertSpace>, i: usize) -> Operator {
    let mut diag = vec![ZERO; space.dim()];
    diag[i] = ONE;
    Operator::diagonal(space.clone(), &diag).expect("length matches")
}

/// Σ_n |e_n⟩⟨e_n| ⊗ S_n, where S_n swaps the apparatus ready state with its
/// n-th outcome state.
fn measurement_unitary(ev: &SelectionEvent, app: &Arc<HilbertSpace>, tol: f64) -> Result<Operator> {
    let sys = ev.space().clone();
    let na = app.dim();
    let mut total = Operator::zeros(sys.product(app));
    for (n, e) in ev.basis.iter().enumerate() {
        let mut s = vec![ZERO; na * na];
        for i in 0..na {
            let j = if i == 0 {
                n + 1
            } else if i == n + 1 {
                0
            } else {
                i
            };
            s[j * na + i] = ONE;
        }
        let swap = Operator::new(app.clone(), s)?;
        total = total.add(&kron(&projector(e, tol)?, &swap))?;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Box3 {
    X,
    Y,
    Z,
}

impl Box3 {
    pub const ALL: [Box3; 3] = [Box3::X, Box3::Y, Box3::Z];

    pub fn label(self) -> &'static str {
        match self {
            Box3::X => "X",
            Box3::Y => "Y",
            Box3::Z => "Z",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreeBoxReport {
    #[serde(rename = "box")]
    pub looked_in: Box3,
    pub prob_found: f64,
    pub prob_not_found: f64,
    pub closed_form_found: f64,
    pub oracle_found: f64,
}

/// The three-box experiment: pre-select (X+Y+Z)/√3, post-select (X+Y−Z)/√3,
/// and in between ask only "is it in box P?".
pub fn three_box_experiment(p: Box3, evolution: Option<(Operator, Operator)>, tol: f64) -> Result<Experiment> {
    let s = HilbertSpace::new(["X", "Y", "Z"])?;
    let r = 1.0 / 3f64.sqrt();
    let a = StateVector::from_real(s.clone(), &[r, r, r])?;
    let b = StateVector::from_real(s.clone(), &[r, r, -r])?;
    let others: Vec<&str> = Box3::ALL.iter().filter(|&&q| q != p).map(|q| q.label()).collect();
    let eigen = Eigenstructure::from_labels(s.clone(), &[&[p.label()], &others])?;
    let model = IntermediateModel::new(eigen, Mode::Coarse, None, false, tol)?;
    let (u_ca, u_bc) = evolution.unwrap_or_else(|| (Operator::identity(s.clone()), Operator::identity(s.clone())));
    Experiment::new(
        model,
        SelectionEvent::onto(a, "alpha", tol)?,
        SelectionEvent::onto(b, "beta", tol)?,
        u_ca,
        u_bc,
        tol,
    )
}

pub fn three_box(p: Box3, evolution: Option<(Operator, Operator)>) -> Result<ThreeBoxReport> {
    let tol = crate::linalg::DEFAULT_TOL;
    let exp = three_box_experiment(p, evolution, tol)?;
    let rho = exp.density()?;
    let found = outcome_prob(&rho, &Selector::Eigenvalue(0))?;
    let not_found = outcome_prob(&rho, &Selector::Eigenvalue(1))?;
    let oracle = exp.oracle()?;
    Ok(ThreeBoxReport {
        looked_in: p,
        prob_found: found,
        prob_not_found: not_found,
        closed_form_found: exp.closed_form(0)?,
        oracle_found: oracle.probs[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apparatus::{identity_matrix, real_matrix};
    use crate::linalg::{cx, DEFAULT_TOL};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn qubit_model(mode: Mode) -> IntermediateModel {
        let s = HilbertSpace::new(["c0", "c1"]).unwrap();
        let e = Eigenstructure::from_labels(s, &[&["c0"], &["c1"]]).unwrap();
        IntermediateModel::new(e, mode, None, false, DEFAULT_TOL).unwrap()
    }

    fn basis_event(s: &Arc<HilbertSpace>, index: usize) -> SelectionEvent {
        let basis = (0..s.dim()).map(|i| StateVector::basis(s.clone(), i).unwrap()).collect();
        SelectionEvent::new(basis, index, "app", DEFAULT_TOL).unwrap()
    }

    #[test]
    fn preselect_born_rule() {
        let m = qubit_model(Mode::NonDegenerate);
        let s = m.system().clone();
        let ev = basis_event(&s, 0);
        let st = preselect(&StateVector::basis(s.clone(), 0).unwrap(), &ev, &m, DEFAULT_TOL).unwrap();
        assert!((st.success() - 1.0).abs() < 1e-15);

        let plus = StateVector::from_real(s.clone(), &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let st = preselect(&plus, &ev, &m, DEFAULT_TOL).unwrap();
        assert!((st.success() - 0.5).abs() < 1e-15);
        assert!((st.joint.normalized().unwrap().amp(0) - ONE).norm() < 1e-15);

        let e1 = StateVector::basis(s, 1).unwrap();
        assert!(matches!(preselect(&e1, &ev, &m, DEFAULT_TOL), Err(Error::ImpossibleSelection { .. })));
    }

    #[test]
    fn postselect_success_and_failure() {
        let m = qubit_model(Mode::NonDegenerate);
        let s = m.system().clone();
        let id = Operator::identity(s.clone());
        let e0 = StateVector::basis(s.clone(), 0).unwrap();
        let st = preselect(&e0, &basis_event(&s, 0), &m, DEFAULT_TOL).unwrap();
        let st = evolve_to_tc(&st, &[kron(&id, &Operator::identity(m.pointer.clone()))]).unwrap();
        let done = postselect(&st, &id, &basis_event(&s, 0), DEFAULT_TOL).unwrap();
        assert!((done.selection_probs[1] - 1.0).abs() < 1e-15);
        assert!(matches!(
            postselect(&st, &id, &basis_event(&s, 1), DEFAULT_TOL),
            Err(Error::ImpossiblePostSelection { .. })
        ));
    }

    #[test]
    fn trivial_gamma_gives_weight_one() {
        let s = HilbertSpace::new(["c0", "c1"]).unwrap();
        let e = Eigenstructure::from_labels(s.clone(), &[&["c0", "c1"]]).unwrap();
        let m = IntermediateModel::new(e, Mode::Coarse, None, false, DEFAULT_TOL).unwrap();
        let plus = StateVector::from_real(s.clone(), &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let exp = Experiment::new(
            m,
            SelectionEvent::onto(plus.clone(), "a", DEFAULT_TOL).unwrap(),
            SelectionEvent::onto(StateVector::basis(s.clone(), 0).unwrap(), "b", DEFAULT_TOL).unwrap(),
            Operator::identity(s.clone()),
            Operator::identity(s),
            DEFAULT_TOL,
        )
        .unwrap();
        let rho = exp.density().unwrap();
        assert_eq!(rho.weights.len(), 1);
        assert!((rho.weights[0] - 1.0).abs() < 1e-15);
        assert!((exp.oracle().unwrap().probs[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_box_rows() {
        let x = three_box(Box3::X, None).unwrap();
        assert!((x.prob_found - 1.0).abs() < 1e-12);
        assert!(x.prob_not_found.abs() < 1e-12);
        let y = three_box(Box3::Y, None).unwrap();
        assert!((y.prob_found - 1.0).abs() < 1e-12);
        let z = three_box(Box3::Z, None).unwrap();
        assert!((z.prob_found - 0.2).abs() < 1e-12);
        assert!((z.oracle_found - 0.2).abs() < 1e-12);
        assert!((z.closed_form_found - 0.2).abs() < 1e-12);
    }

    #[test]
    fn three_box_x_weights_are_one_zero() {
        let exp = three_box_experiment(Box3::X, None, DEFAULT_TOL).unwrap();
        let rho = exp.density().unwrap();
        assert!((rho.weights[0] - 1.0).abs() < 1e-12 && rho.weights[1].abs() < 1e-12);
    }

    #[test]
    fn unknown_tag() {
        let exp = three_box_experiment(Box3::X, None, DEFAULT_TOL).unwrap();
        let rho = exp.density().unwrap();
        assert!(matches!(outcome_prob(&rho, &Selector::Eigenvalue(5)), Err(Error::UnknownOutcomeTag(_))));
        assert!(matches!(
            outcome_prob(&rho, &Selector::Tag(OutcomeTag::fine(0, 0))),
            Err(Error::UnknownOutcomeTag(_))
        ));
        assert!((outcome_prob(&rho, &Selector::All).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_ensemble_is_an_error() {
        // a = e0, b = e1, no evolution: every history has zero amplitude
        // except through the post-selection, which fails first; use a
        // projective record that forbids the only connecting path instead.
        let s = HilbertSpace::new(["c0", "c1"]).unwrap();
        let e = Eigenstructure::from_labels(s.clone(), &[&["c0"], &["c1"]]).unwrap();
        let m = IntermediateModel::new(e, Mode::NonDegenerate, None, false, DEFAULT_TOL).unwrap();
        let plus = StateVector::from_real(s.clone(), &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let minus = StateVector::from_real(s.clone(), &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
        // swap the pointer-blind B for one orthogonal to every branch
        let exp = Experiment::new(
            m,
            SelectionEvent::onto(plus, "a", DEFAULT_TOL).unwrap(),
            SelectionEvent::onto(minus, "b", DEFAULT_TOL).unwrap(),
            Operator::identity(s.clone()),
            Operator::identity(s.clone()),
            DEFAULT_TOL,
        )
        .unwrap();
        let a_tc = exp.a_at_tc().unwrap();
        let zero_b = exp.joint_of(&StateVector::basis(s, 0).unwrap(), &exp.model.ready_state());
        assert!(matches!(
            ppse_density(&a_tc, &zero_b, &exp.gamma().unwrap()),
            Err(Error::EmptyEnsemble { .. })
        ));
        // with the real B the ensemble is fine: weights 1/2, 1/2
        let rho = exp.density().unwrap();
        assert!((rho.weights[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn closed_form_coarse_equals_fine_for_singleton_blocks() {
        let s = HilbertSpace::new(["c0", "c1", "c2"]).unwrap();
        let e = Eigenstructure::from_labels(s.clone(), &[&["c0"], &["c1"], &["c2"]]).unwrap();
        let a = StateVector::new(s.clone(), vec![cx(0.6, 0.0), cx(0.0, 0.64), cx(0.48, 0.0)]).unwrap();
        let a = a.normalized().unwrap();
        let b = StateVector::from_real(s.clone(), &[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let id = Operator::identity(s);
        let d: Vec<Matrix> = vec![identity_matrix(1); 3];
        for k in 0..3 {
            let c = prob_closed_form(Mode::Coarse, &a, &b, &id, &id, &e, &d, k).unwrap();
            let f = prob_closed_form(Mode::Fine, &a, &b, &id, &id, &e, &d, k).unwrap();
            let n = prob_closed_form(Mode::NonDegenerate, &a, &b, &id, &id, &e, &d, k).unwrap();
            assert!((c - f).abs() < 1e-15 && (c - n).abs() < 1e-15);
        }
    }

    #[test]
    fn twostep_routes_agree_on_appendix_a_shape() {
        let s = HilbertSpace::new(["c00", "c11", "c12"]).unwrap();
        let e = Eigenstructure::from_labels(s.clone(), &[&["c00"], &["c11", "c12"]]).unwrap();
        let d = real_matrix(&[&[0.6, 0.8], &[0.0, 1.0]]);
        let m = IntermediateModel::new(e, Mode::TwoStep, Some(vec![identity_matrix(1), d]), false, DEFAULT_TOL).unwrap();
        let a = StateVector::from_real(s.clone(), &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).unwrap();
        let b = StateVector::from_real(s.clone(), &[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]).unwrap();
        let exp = Experiment::new(
            m,
            SelectionEvent::onto(a, "a", DEFAULT_TOL).unwrap(),
            SelectionEvent::onto(b, "b", DEFAULT_TOL).unwrap(),
            Operator::identity(s.clone()),
            Operator::identity(s),
            DEFAULT_TOL,
        )
        .unwrap();
        let rho = exp.density().unwrap();
        let p1 = outcome_prob(&rho, &Selector::Eigenvalue(1)).unwrap();
        let expect = 0.64 / 1.64;
        assert!((p1 - expect).abs() < 1e-12);
        assert!((exp.closed_form(1).unwrap() - expect).abs() < 1e-12);
        let o = exp.oracle().unwrap();
        assert!((o.eigen_probs(&rho.tags(), 2)[1] - expect).abs() < 1e-12);
    }

    #[test]
    fn pipeline_probabilities_multiply() {
        let exp = three_box_experiment(Box3::Z, None, DEFAULT_TOL).unwrap();
        let st = exp.pipeline().unwrap();
        let prod: f64 = st.selection_probs.iter().product();
        assert!((prod - st.success()).abs() < 1e-12);
        let o = exp.oracle().unwrap();
        assert!((o.post_prob - st.selection_probs[1]).abs() < 1e-12);
    }
}
