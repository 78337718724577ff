//! The intermediate measuring apparatus: what it measures (an eigenstructure),
//! how finely it records (the mode), and the unitary interaction that writes
//! the record into its pointer.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    check_orthonormal, cx, inner, kron, projector, Cx, HilbertSpace, Operator, StateVector, I, ONE,
    ZERO,
};

/// Label of the pointer's ready state.
pub const READY: &str = "ready";

/// Eigenvalues c_k with orthonormal eigenvectors c_kl grouped by eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenstructure {
    pub space: Arc<HilbertSpace>,
    pub values: Vec<f64>,
    pub blocks: Vec<Vec<StateVector>>,
}

impl Eigenstructure {
    pub fn new(
        space: Arc<HilbertSpace>,
        values: Vec<f64>,
        blocks: Vec<Vec<StateVector>>,
        tol: f64,
    ) -> Result<Self> {
        let e = Eigenstructure { space, values, blocks };
        e.validate(tol)?;
        Ok(e)
    }

    /// Blocks of standard basis vectors named by label, eigenvalues 0, 1, 2, …
    pub fn from_labels(space: Arc<HilbertSpace>, blocks: &[&[&str]]) -> Result<Self> {
        let blocks = blocks
            .iter()
            .map(|b| b.iter().map(|l| StateVector::basis_label(space.clone(), l)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let values = (0..blocks.len()).map(|k| k as f64).collect();
        Self::new(space, values, blocks, crate::linalg::DEFAULT_TOL)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.values.len() != self.blocks.len() {
            return Err(Error::ModeMismatch(format!(
                "{} eigenvalues for {} blocks",
                self.values.len(),
                self.blocks.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        for (i, a) in self.values.iter().enumerate() {
            if self.values[..i].contains(a) {
                return Err(Error::ModeMismatch(format!("eigenvalue {a} listed twice")));
            }
        }
        if self.blocks.iter().any(Vec::is_empty) {
            return Err(Error::ModeMismatch("empty eigenvalue block".into()));
        }
        let all: Vec<&StateVector> = self.blocks.iter().flatten().collect();
        for v in &all {
            if v.space().as_ref() != self.space.as_ref() {
                return Err(Error::DimensionMismatch { left: self.space.dim(), right: v.dim() });
            }
        }
        check_orthonormal(&all, tol).map_err(|e| Error::NonOrthonormalBasis(e.to_string()))?;
        if all.len() != self.space.dim() {
            return Err(Error::IncompleteBasis { vectors: all.len(), dim: self.space.dim() });
        }
        Ok(())
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn vector(&self, k: usize, l: usize) -> &StateVector {
        &self.blocks[k][l]
    }

    /// Σ_l |c_kl⟩⟨c_kl|.
    pub fn block_projector(&self, k: usize) -> Operator {
        let mut p = Operator::zeros(self.space.clone());
        for v in &self.blocks[k] {
            p = p.add(&Operator::outer(v, v).expect("same space")).expect("same space");
        }
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One pointer outcome per eigenvalue; every block must have size 1.
    NonDegenerate,
    /// One pointer outcome per eigenvalue; blocks may be degenerate.
    Coarse,
    /// One pointer outcome per eigenvector c_kl.
    Fine,
    /// One pointer outcome per (k, l, m), with mixing coefficients d^k_lm.
    TwoStep,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::NonDegenerate, Mode::Coarse, Mode::Fine, Mode::TwoStep];

    pub fn keyword(self) -> &'static str {
        match self {
            Mode::NonDegenerate => "nondegenerate",
            Mode::Coarse => "coarse",
            Mode::Fine => "fine",
            Mode::TwoStep => "twostep",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.keyword() == s)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Which distinguishable pointer outcome a Γ element reports. Indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OutcomeTag {
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl OutcomeTag {
    pub fn eigen(k: usize) -> Self {
        OutcomeTag { k, l: None, m: None }
    }

    pub fn fine(k: usize, l: usize) -> Self {
        OutcomeTag { k, l: Some(l), m: None }
    }

    pub fn two_step(k: usize, l: usize, m: usize) -> Self {
        OutcomeTag { k, l: Some(l), m: Some(m) }
    }

    /// Pointer label: `k1`, `k1:l0`, `k1:l0:m1`.
    pub fn label(&self) -> String {
        let mut s = format!("k{}", self.k);
        if let Some(l) = self.l {
            s.push_str(&format!(":l{l}"));
        }
        if let Some(m) = self.m {
            s.push_str(&format!(":m{m}"));
        }
        s
    }

    pub fn parse(label: &str) -> Option<Self> {
        let mut parts = label.split(':');
        let k = parts.next()?.strip_prefix('k')?.parse().ok()?;
        let l = match parts.next() {
            Some(p) => Some(p.strip_prefix('l')?.parse().ok()?),
            None => None,
        };
        let m = match parts.next() {
            Some(p) => Some(p.strip_prefix('m')?.parse().ok()?),
            None => None,
        };
        if parts.next().is_some() || (m.is_some() && l.is_none()) {
            return None;
        }
        Some(OutcomeTag { k, l, m })
    }
}

impl fmt::Display for OutcomeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Square complex matrix as rows; used for the per-block d^k.
pub type Matrix = Vec<Vec<Cx>>;

pub fn identity_matrix(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { ONE } else { ZERO }).collect()).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntermediateModel {
    pub eigen: Eigenstructure,
    pub mode: Mode,
    /// d^k per block. Identity for every mode except TwoStep.
    pub d: Vec<Matrix>,
    /// Require each d^k to be unitary, not just row-normalised.
    pub strict_d: bool,
    /// Ready label at index 0, then one label per outcome tag.
    pub pointer: Arc<HilbertSpace>,
    pub tags: Vec<OutcomeTag>,
}

impl IntermediateModel {
    /// `d` must be given for TwoStep and omitted otherwise.
    pub fn new(eigen: Eigenstructure, mode: Mode, d: Option<Vec<Matrix>>, strict_d: bool, tol: f64) -> Result<Self> {
        let sizes = eigen.block_sizes();
        let d = match (mode, d) {
            (Mode::TwoStep, Some(d)) => d,
            (Mode::TwoStep, None) => {
                return Err(Error::ModeMismatch("twostep mode needs d coefficients".into()))
            }
            (_, Some(_)) => {
                return Err(Error::ModeMismatch(format!("d coefficients given for {mode} mode")))
            }
            (_, None) => sizes.iter().map(|&n| identity_matrix(n)).collect(),
        };
        let tags = outcome_tags(mode, &sizes);
        let pointer = HilbertSpace::new(
            std::iter::once(READY.to_string()).chain(tags.iter().map(OutcomeTag::label)),
        )?;
        let m = IntermediateModel { eigen, mode, d, strict_d, pointer, tags };
        validate_model(&m, tol)?;
        Ok(m)
    }

    pub fn system(&self) -> &Arc<HilbertSpace> {
        &self.eigen.space
    }

    pub fn joint_space(&self) -> Arc<HilbertSpace> {
        self.system().product(&self.pointer)
    }

    pub fn ready_index(&self) -> usize {
        0
    }

    pub fn ready_state(&self) -> StateVector {
        StateVector::basis(self.pointer.clone(), 0).expect("ready label exists")
    }

    /// Pointer index of the outcome that records (k, l, m) in this mode.
    pub fn record_index(&self, k: usize, l: usize, m: usize) -> usize {
        let tag = match self.mode {
            Mode::NonDegenerate | Mode::Coarse => OutcomeTag::eigen(k),
            Mode::Fine => OutcomeTag::fine(k, l),
            Mode::TwoStep => OutcomeTag::two_step(k, l, m),
        };
        self.tag_index(&tag).expect("tag generated from the same structure") + 1
    }

    pub fn tag_index(&self, tag: &OutcomeTag) -> Option<usize> {
        self.tags.iter().position(|t| t == tag)
    }

    /// Sum of all outcome pointer states (unnormalised). Post-selection acts
    /// on the system only, so it is blind to which outcome the pointer shows.
    pub fn pointer_blind(&self) -> StateVector {
        let mut amps = vec![ONE; self.pointer.dim()];
        amps[0] = ZERO;
        StateVector::new(self.pointer.clone(), amps).expect("finite")
    }

    /// Record map V: c_kl⊗ready ↦ Σ_m d^k_lm c_km⊗γ(k,l,m), zero elsewhere.
    pub fn record_map(&self) -> Operator {
        let joint = self.joint_space();
        let np = self.pointer.dim();
        let n = joint.dim();
        let mut entries = vec![ZERO; n * n];
        for (k, block) in self.eigen.blocks.iter().enumerate() {
            for (l, c_kl) in block.iter().enumerate() {
                for (m, c_km) in block.iter().enumerate() {
                    let d = self.d[k][l][m];
                    if d == ZERO {
                        continue;
                    }
                    let g = self.record_index(k, l, m);
                    // d |c_km⟩⟨c_kl| ⊗ |γ_g⟩⟨ready|
                    for (r, a) in c_km.amps().iter().enumerate() {
                        for (c, b) in c_kl.amps().iter().enumerate() {
                            entries[(r * np + g) * n + c * np] += d * a * b.conj();
                        }
                    }
                }
            }
        }
        Operator::new(joint, entries).expect("finite")
    }

    /// Unitary extension of the record map: W = (I − V†V − VV†) − i(V + V†).
    ///
    /// V maps the ready subspace isometrically onto an orthogonal subspace, so
    /// V + V† is a partial reflection and W = exp(−iπ/2 (V + V†)).
    pub fn interaction_unitary(&self) -> Operator {
        let v = self.record_map();
        let vd = crate::linalg::adjoint(&v);
        let id = Operator::identity(v.space().clone());
        let vdv = crate::linalg::compose(&vd, &v).expect("same space");
        let vvd = crate::linalg::compose(&v, &vd).expect("same space");
        let rest = id.sub(&vdv).and_then(|x| x.sub(&vvd)).expect("same space");
        rest.add(&v.add(&vd).expect("same space").scale(-I)).expect("same space")
    }
}

fn outcome_tags(mode: Mode, sizes: &[usize]) -> Vec<OutcomeTag> {
    let mut tags = Vec::new();
    for (k, &n) in sizes.iter().enumerate() {
        match mode {
            Mode::NonDegenerate | Mode::Coarse => tags.push(OutcomeTag::eigen(k)),
            Mode::Fine => tags.extend((0..n).map(|l| OutcomeTag::fine(k, l))),
            Mode::TwoStep => {
                for l in 0..n {
                    tags.extend((0..n).map(|m| OutcomeTag::two_step(k, l, m)));
                }
            }
        }
    }
    tags
}

pub fn validate_model(m: &IntermediateModel, tol: f64) -> Result<()> {
    m.eigen.validate(tol)?;
    let sizes = m.eigen.block_sizes();
    if m.mode == Mode::NonDegenerate {
        if let Some(k) = sizes.iter().position(|&n| n != 1) {
            return Err(Error::ModeMismatch(format!(
                "nondegenerate mode but block {k} has {} vectors",
                sizes[k]
            )));
        }
    }
    if m.d.len() != sizes.len() {
        return Err(Error::ModeMismatch(format!("{} d matrices for {} blocks", m.d.len(), sizes.len())));
    }
    for (k, (dk, &n)) in m.d.iter().zip(&sizes).enumerate() {
        if dk.len() != n || dk.iter().any(|row| row.len() != n) {
            return Err(Error::ModeMismatch(format!("d for block {k} must be {n}×{n}")));
        }
        for (l, row) in dk.iter().enumerate() {
            if row.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            let norm: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            if (norm - 1.0).abs() > tol {
                return Err(Error::BadDCoeffRow { k, l, norm });
            }
        }
        if m.strict_d {
            for a in 0..n {
                for b in (a + 1)..n {
                    let ov: Cx = dk[a].iter().zip(&dk[b]).map(|(x, y)| x.conj() * y).sum();
                    if ov.norm() > tol {
                        return Err(Error::NotUnitary(format!("d for block {k} (rows {a}, {b} overlap)")));
                    }
                }
            }
        }
        if m.mode != Mode::TwoStep && *dk != identity_matrix(n) {
            return Err(Error::ModeMismatch(format!("{} mode requires identity d", m.mode)));
        }
    }
    let expect = outcome_tags(m.mode, &sizes);
    if m.tags != expect {
        return Err(Error::ModeMismatch("pointer outcomes do not match the mode".into()));
    }
    let labels = m.pointer.labels();
    if labels.len() != expect.len() + 1
        || labels[0] != READY
        || labels[1..].iter().zip(&expect).any(|(l, t)| *l != t.label())
    {
        return Err(Error::ModeMismatch("pointer space does not match the outcome tags".into()));
    }
    Ok(())
}

/// Rank-1 projectors on the pointer outcomes. The ready state is not an
/// outcome, so Σ Γ_i = I − |ready⟩⟨ready|.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet {
    pub pointer: Arc<HilbertSpace>,
    pub elements: Vec<(OutcomeTag, Operator)>,
}

impl GammaSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn tags(&self) -> Vec<OutcomeTag> {
        self.elements.iter().map(|(t, _)| *t).collect()
    }

    pub fn sum(&self) -> Operator {
        let mut s = Operator::zeros(self.pointer.clone());
        for (_, g) in &self.elements {
            s = s.add(g).expect("same space");
        }
        s
    }

    /// I_sys ⊗ Γ_i on the joint system⊗pointer space.
    pub fn lifted(&self, i: usize, system: &Arc<HilbertSpace>) -> Operator {
        kron(&Operator::identity(system.clone()), &self.elements[i].1)
    }
}

pub fn gamma_set(m: &IntermediateModel, tol: f64) -> Result<GammaSet> {
    validate_model(m, tol)?;
    let elements = m
        .tags
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let g = StateVector::basis(m.pointer.clone(), i + 1)?;
            Ok((*t, projector(&g, tol)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaSet { pointer: m.pointer.clone(), elements })
}

/// The joint state right after the measurement interaction:
/// Σ_{k,l} ⟨c_kl|U_ca|ψ⟩ Σ_m d^k_lm |c_km⟩⊗|γ(k,l,m)⟩.
pub fn interact(m: &IntermediateModel, sys: &StateVector, u_ca: &Operator, tol: f64) -> Result<StateVector> {
    validate_model(m, tol)?;
    if !sys.is_normalized(tol) {
        return Err(Error::NotNormalized { norm: sys.norm() });
    }
    if !crate::linalg::is_unitary(u_ca, tol) {
        return Err(Error::NotUnitary("U(t_c, t_a)".into()));
    }
    let evolved = crate::linalg::apply(u_ca, sys)?;
    let np = m.pointer.dim();
    let mut out = vec![ZERO; m.system().dim() * np];
    for (k, block) in m.eigen.blocks.iter().enumerate() {
        for (l, c_kl) in block.iter().enumerate() {
            let x = inner(c_kl, &evolved)?;
            for (mm, c_km) in block.iter().enumerate() {
                let coef = x * m.d[k][l][mm];
                let g = m.record_index(k, l, mm);
                for (r, a) in c_km.amps().iter().enumerate() {
                    out[r * np + g] += coef * a;
                }
            }
        }
    }
    StateVector::new(m.joint_space(), out)
}

/// Convenience: real 2×2 d matrix for a single degenerate pair.
pub fn real_matrix(rows: &[&[f64]]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| cx(x, 0.0)).collect()).collect()
}
