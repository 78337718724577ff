//! Dense complex linear algebra over small, labelled Hilbert spaces.
//!
//! Everything here is immutable after construction. Dimensions stay in the
//! tens to low thousands, so plain row-major `Vec<Cx>` storage is enough.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex amplitude.
pub type Cx = Complex64;

pub const ZERO: Cx = Cx::new(0.0, 0.0);
pub const ONE: Cx = Cx::new(1.0, 0.0);
pub const I: Cx = Cx::new(0.0, 1.0);

/// Default tolerance for unitarity, orthonormality and idempotence checks.
pub const DEFAULT_TOL: f64 = 1e-10;

pub fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

/// Finite-dimensional Hilbert space with one distinct label per basis state.
#[derive(Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    labels: Vec<String>,
}

impl HilbertSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidSpace("a space needs at least one basis label".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate basis label `{l}`")));
            }
        }
        Ok(Arc::new(HilbertSpace { labels }))
    }

    /// Space with labels `prefix0 .. prefix{dim-1}`.
    pub fn numbered(prefix: &str, dim: usize) -> Result<Arc<Self>> {
        Self::new((0..dim).map(|i| format!("{prefix}{i}")))
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Product space; labels are joined pairwise in row-major order.
    pub fn product(&self, other: &HilbertSpace) -> Arc<HilbertSpace> {
        let mut labels = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.labels {
            for b in &other.labels {
                labels.push(format!("{a}⊗{b}"));
            }
        }
        Arc::new(HilbertSpace { labels })
    }

    /// Product of several factor spaces, left to right.
    pub fn product_of(spaces: &[Arc<HilbertSpace>]) -> Arc<HilbertSpace> {
        let mut it = spaces.iter();
        let first = it.next().expect("product of zero spaces").clone();
        it.fold(first, |acc, s| acc.product(s))
    }
}

impl fmt::Debug for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim() <= 8 {
            write!(f, "HilbertSpace{:?}", self.labels)
        } else {
            write!(f, "HilbertSpace(dim {})", self.dim())
        }
    }
}

fn same_space(a: &Arc<HilbertSpace>, b: &Arc<HilbertSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() })
    }
}

fn check_finite(values: &[Cx]) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Amplitude vector on a labelled space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: Arc<HilbertSpace>,
    amps: Vec<Cx>,
}

impl StateVector {
    pub fn new(space: Arc<HilbertSpace>, amps: Vec<Cx>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch { left: space.dim(), right: amps.len() });
        }
        check_finite(&amps)?;
        Ok(StateVector { space, amps })
    }

    pub fn from_real(space: Arc<HilbertSpace>, amps: &[f64]) -> Result<Self> {
        Self::new(space, amps.iter().map(|&r| cx(r, 0.0)).collect())
    }

    pub fn zeros(space: Arc<HilbertSpace>) -> Self {
        let n = space.dim();
        StateVector { space, amps: vec![ZERO; n] }
    }

    pub fn basis(space: Arc<HilbertSpace>, index: usize) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::BadIndex { index, len: space.dim() });
        }
        let mut v = Self::zeros(space);
        v.amps[index] = ONE;
        Ok(v)
    }

    pub fn basis_label(space: Arc<HilbertSpace>, label: &str) -> Result<Self> {
        let i = space
            .index_of(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        Self::basis(space, i)
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Cx] {
        &self.amps
    }

    pub fn amp(&self, i: usize) -> Cx {
        self.amps[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn scale(&self, c: Cx) -> Self {
        StateVector { space: self.space.clone(), amps: self.amps.iter().map(|z| z * c).collect() }
    }

    pub fn conj(&self) -> Self {
        StateVector { space: self.space.clone(), amps: self.amps.iter().map(|z| z.conj()).collect() }
    }

    pub fn add(&self, other: &StateVector) -> Result<Self> {
        same_space(&self.space, &other.space)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        Ok(StateVector { space: self.space.clone(), amps })
    }

    pub fn sub(&self, other: &StateVector) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    /// Unit vector in the same direction. Fails on (numerically) zero vectors.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(self.scale(cx(1.0 / n, 0.0)))
    }

    /// Same amplitudes reinterpreted on another space of equal dimension.
    pub fn relabel(&self, space: Arc<HilbertSpace>) -> Result<Self> {
        Self::new(space, self.amps.clone())
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

pub fn tensor(u: &StateVector, v: &StateVector) -> StateVector {
    let space = u.space.product(&v.space);
    let mut amps = Vec::with_capacity(u.dim() * v.dim());
    for a in &u.amps {
        for b in &v.amps {
            amps.push(a * b);
        }
    }
    StateVector { space, amps }
}

/// ⟨u|v⟩, antilinear in the first argument.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<Cx> {
    same_space(&u.space, &v.space)?;
    Ok(inner_raw(&u.amps, &v.amps))
}

pub(crate) fn inner_raw(u: &[Cx], v: &[Cx]) -> Cx {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Phase-insensitive equality of two normalised states: |⟨u|v⟩| ≥ 1 − tol.
pub fn same_ray(u: &StateVector, v: &StateVector, tol: f64) -> Result<bool> {
    let f = inner(&u.normalized()?, &v.normalized()?)?.norm();
    Ok(f >= 1.0 - tol)
}

/// Distance between two rays: min over phases of ‖u − e^{iφ}v‖_max for normalised inputs.
pub fn ray_distance(u: &StateVector, v: &StateVector) -> Result<f64> {
    let u = u.normalized()?;
    let v = v.normalized()?;
    let ov = inner(&v, &u)?;
    let phase = if ov.norm() > 1e-300 { ov / ov.norm() } else { ONE };
    Ok(u.max_abs_diff(&v.scale(phase)))
}

/// Dense square operator, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: Arc<HilbertSpace>,
    entries: Vec<Cx>,
}

impl Operator {
    pub fn new(space: Arc<HilbertSpace>, entries: Vec<Cx>) -> Result<Self> {
        let n = space.dim();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { left: n * n, right: entries.len() });
        }
        check_finite(&entries)?;
        Ok(Operator { space, entries })
    }

    pub fn from_rows(space: Arc<HilbertSpace>, rows: &[Vec<Cx>]) -> Result<Self> {
        let n = space.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                left: n,
                right: rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(rows.len()),
            });
        }
        Self::new(space, rows.concat())
    }

    pub fn from_real_rows(space: Arc<HilbertSpace>, rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Cx>> =
            rows.iter().map(|r| r.iter().map(|&x| cx(x, 0.0)).collect()).collect();
        Self::from_rows(space, &rows)
    }

    pub fn zeros(space: Arc<HilbertSpace>) -> Self {
        let n = space.dim();
        Operator { space, entries: vec![ZERO; n * n] }
    }

    pub fn identity(space: Arc<HilbertSpace>) -> Self {
        let n = space.dim();
        let mut m = Self::zeros(space);
        for i in 0..n {
            m.entries[i * n + i] = ONE;
        }
        m
    }

    pub fn diagonal(space: Arc<HilbertSpace>, diag: &[Cx]) -> Result<Self> {
        let n = space.dim();
        if diag.len() != n {
            return Err(Error::DimensionMismatch { left: n, right: diag.len() });
        }
        let mut m = Self::zeros(space);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * n + i] = *d;
        }
        Ok(m)
    }

    /// |u⟩⟨v| without normalisation requirements.
    pub fn outer(u: &StateVector, v: &StateVector) -> Result<Self> {
        same_space(&u.space, &v.space)?;
        let n = u.dim();
        let mut entries = Vec::with_capacity(n * n);
        for a in &u.amps {
            for b in &v.amps {
                entries.push(a * b.conj());
            }
        }
        Ok(Operator { space: u.space.clone(), entries })
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Cx {
        self.entries[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[Cx] {
        &self.entries
    }

    pub fn column(&self, col: usize) -> StateVector {
        let n = self.dim();
        let amps = (0..n).map(|r| self.entries[r * n + col]).collect();
        StateVector { space: self.space.clone(), amps }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c];
            }
        }
        Operator { space: self.space.clone(), entries }
    }

    pub fn conj(&self) -> Self {
        Operator { space: self.space.clone(), entries: self.entries.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, c: Cx) -> Self {
        Operator { space: self.space.clone(), entries: self.entries.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        same_space(&self.space, &other.space)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Operator { space: self.space.clone(), entries })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn trace(&self) -> Cx {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&adjoint(self)) <= tol
    }

    /// Reinterpret on another space of the same dimension.
    pub fn relabel(&self, space: Arc<HilbertSpace>) -> Result<Self> {
        Self::new(space, self.entries.clone())
    }

    /// Positive semidefinite within `tol`: Cholesky of M + tol·I succeeds.
    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let n = self.dim();
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut d = self.get(j, j).re + tol;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d < 0.0 {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = cx(d, 0.0);
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = if d > 0.0 { s / d } else { ZERO };
            }
        }
        true
    }
}

pub fn projector(v: &StateVector, tol: f64) -> Result<Operator> {
    if !v.is_normalized(tol) {
        return Err(Error::NotNormalized { norm: v.norm() });
    }
    Operator::outer(v, v)
}

pub fn apply(m: &Operator, v: &StateVector) -> Result<StateVector> {
    same_space(&m.space, &v.space)?;
    Ok(StateVector { space: v.space.clone(), amps: matvec(&m.entries, &v.amps) })
}

fn matvec(m: &[Cx], v: &[Cx]) -> Vec<Cx> {
    let n = v.len();
    (0..n).map(|r| m[r * n..(r + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn adjoint(m: &Operator) -> Operator {
    m.transpose().conj()
}

pub fn compose(m: &Operator, n: &Operator) -> Result<Operator> {
    same_space(&m.space, &n.space)?;
    let d = m.dim();
    let mut entries = vec![ZERO; d * d];
    for r in 0..d {
        for k in 0..d {
            let a = m.entries[r * d + k];
            if a == ZERO {
                continue;
            }
            let row = &n.entries[k * d..(k + 1) * d];
            for (c, b) in row.iter().enumerate() {
                entries[r * d + c] += a * b;
            }
        }
    }
    Ok(Operator { space: m.space.clone(), entries })
}

/// ‖M†M − I‖_max ≤ tol.
pub fn is_unitary(m: &Operator, tol: f64) -> bool {
    let mm = compose(&adjoint(m), m).expect("same space");
    mm.max_abs_diff(&Operator::identity(m.space.clone())) <= tol
}

/// Kronecker product A ⊗ B on the product space.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let mut entries = vec![ZERO; n * n];
    for i in 0..na {
        for j in 0..na {
            let x = a.get(i, j);
            if x == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    entries[(i * nb + k) * n + (j * nb + l)] = x * b.get(k, l);
                }
            }
        }
    }
    Operator { space: a.space.product(&b.space), entries }
}

/// Lift `m`, acting on `spaces[factor]`, to I ⊗ … ⊗ M ⊗ … ⊗ I.
pub fn embed(m: &Operator, factor: usize, spaces: &[Arc<HilbertSpace>]) -> Result<Operator> {
    if factor >= spaces.len() {
        return Err(Error::BadFactorIndex { index: factor, factors: spaces.len() });
    }
    same_space(m.space(), &spaces[factor])?;
    let mut acc: Option<Operator> = None;
    for (i, s) in spaces.iter().enumerate() {
        let f = if i == factor { m.clone() } else { Operator::identity(s.clone()) };
        acc = Some(match acc {
            None => f,
            Some(a) => kron(&a, &f),
        });
    }
    Ok(acc.expect("at least one factor"))
}

/// Apply `m` to the factors `factors` (in order, adjacent or not) of a vector
/// laid out over `dims`, without building the lifted operator.
pub fn apply_on_factors(
    m: &Operator,
    factors: &[usize],
    dims: &[usize],
    v: &StateVector,
) -> Result<StateVector> {
    let total: usize = dims.iter().product();
    if v.dim() != total {
        return Err(Error::DimensionMismatch { left: total, right: v.dim() });
    }
    for &f in factors {
        if f >= dims.len() {
            return Err(Error::BadFactorIndex { index: f, factors: dims.len() });
        }
    }
    let sub: usize = factors.iter().map(|&f| dims[f]).product();
    if sub != m.dim() {
        return Err(Error::DimensionMismatch { left: m.dim(), right: sub });
    }
    let strides = strides(dims);
    // offsets of the sub-block basis states relative to a base index
    let mut offsets = vec![0usize; sub];
    for (s, off) in offsets.iter_mut().enumerate() {
        let mut rem = s;
        for &f in factors.iter().rev() {
            *off += (rem % dims[f]) * strides[f];
            rem /= dims[f];
        }
    }
    let mut out = vec![ZERO; total];
    let mut buf = vec![ZERO; sub];
    for base in 0..total {
        // bases are indices whose digits on `factors` are all zero
        if factors.iter().any(|&f| !(base / strides[f]).is_multiple_of(dims[f])) {
            continue;
        }
        for (b, off) in buf.iter_mut().zip(&offsets) {
            *b = v.amps[base + off];
        }
        let res = matvec(&m.entries, &buf);
        for (r, off) in res.into_iter().zip(&offsets) {
            out[base + off] = r;
        }
    }
    Ok(StateVector { space: v.space.clone(), amps: out })
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Antiunitary operator Θ = T·K, acting as v ↦ T·conj(v).
#[derive(Clone, Debug, PartialEq)]
pub struct AntiunitaryOp {
    unitary: Operator,
}

impl AntiunitaryOp {
    pub fn new(unitary: Operator, tol: f64) -> Result<Self> {
        if !is_unitary(&unitary, tol) {
            return Err(Error::NotUnitary("antiunitary operator's matrix part".into()));
        }
        Ok(AntiunitaryOp { unitary })
    }

    /// Plain complex conjugation K in the given basis.
    pub fn conjugation(space: Arc<HilbertSpace>) -> Self {
        AntiunitaryOp { unitary: Operator::identity(space) }
    }

    pub fn unitary_part(&self) -> &Operator {
        &self.unitary
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        self.unitary.space()
    }

    /// Θ ⊗ K on a product with a space whose basis is real.
    pub fn extend(&self, other: &Arc<HilbertSpace>) -> Self {
        AntiunitaryOp { unitary: kron(&self.unitary, &Operator::identity(other.clone())) }
    }

    /// Θ M Θ⁻¹ = T conj(M) T†.
    pub fn conjugate_operator(&self, m: &Operator) -> Result<Operator> {
        compose(&compose(&self.unitary, &m.conj())?, &adjoint(&self.unitary))
    }
}

pub fn apply_antiunitary(theta: &AntiunitaryOp, v: &StateVector) -> Result<StateVector> {
    apply(&theta.unitary, &v.conj())
}

/// One energy level of a Hamiltonian given by its spectral data.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub vectors: Vec<StateVector>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    space: Arc<HilbertSpace>,
    levels: Vec<Level>,
}

impl SpectralData {
    pub fn new(space: Arc<HilbertSpace>, levels: Vec<Level>, tol: f64) -> Result<Self> {
        let vectors: Vec<&StateVector> = levels.iter().flat_map(|l| l.vectors.iter()).collect();
        for v in &vectors {
            same_space(&space, v.space())?;
        }
        if vectors.len() != space.dim() {
            return Err(Error::IncompleteSpectrum { vectors: vectors.len(), dim: space.dim() });
        }
        check_orthonormal(&vectors, tol)?;
        if levels.iter().any(|l| !l.energy.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SpectralData { space, levels })
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }
}

/// Pairwise orthonormality within `tol`; reports the first offending pair.
pub fn check_orthonormal(vectors: &[&StateVector], tol: f64) -> Result<()> {
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate().skip(i) {
            let expect = if i == j { ONE } else { ZERO };
            let got = inner(u, v)?;
            if (got - expect).norm() > tol {
                return Err(Error::NonOrthonormal { i, j, overlap: got.norm() });
            }
        }
    }
    Ok(())
}

/// U = Σ_n exp(−i E_n t) |e_n⟩⟨e_n|.
pub fn unitary_from_spectrum(spec: &SpectralData, duration: f64) -> Operator {
    let mut u = Operator::zeros(spec.space.clone());
    let n = u.dim();
    for level in &spec.levels {
        let phase = Cx::from_polar(1.0, -level.energy * duration);
        for v in &level.vectors {
            for r in 0..n {
                let a = v.amps[r] * phase;
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    u.entries[r * n + c] += a * v.amps[c].conj();
                }
            }
        }
    }
    u
}

/// Extend an orthonormal list to a full basis of `space` by Gram–Schmidt on
/// the standard basis vectors. Returns only the added vectors.
pub fn orthonormal_complement(
    space: &Arc<HilbertSpace>,
    vectors: &[&StateVector],
    tol: f64,
) -> Result<Vec<StateVector>> {
    check_orthonormal(vectors, tol)?;
    let mut basis: Vec<StateVector> = vectors.iter().map(|v| (*v).clone()).collect();
    let mut added = Vec::new();
    for i in 0..space.dim() {
        if basis.len() == space.dim() {
            break;
        }
        let mut w = StateVector::basis(space.clone(), i)?;
        // twice for numerical stability
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w)?;
                w = w.sub(&b.scale(c))?;
            }
        }
        if w.norm() > 1e-8 {
            let w = w.normalized()?;
            basis.push(w.clone());
            added.push(w);
        }
    }
    Ok(added)
}
