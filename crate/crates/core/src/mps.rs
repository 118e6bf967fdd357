//! Translation-invariant MPS tensors: transfer channel, fixed points,
//! right-canonical form, Schmidt spectrum, injectivity and symmetry checks,
//! and two exact finite-chain oracles for the symmetry-resolved reduced state.
//!
//! Conventions: the channel is `T(ρ) = Σ_i A^i ρ A^{i†}` with right fixed
//! point `ρ_R`; its adjoint `T*(ρ) = Σ_i A^{i†} ρ A^i` has left fixed point
//! `ρ_L`. As a matrix on column-major `vec(ρ)`, `T = Σ_i conj(A^i) ⊗ A^i`.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Group, IrrepLabel};
use crate::linalg::{self, CMat, CVec};
use crate::projrep::ProjectiveRep;

pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 100_000;
pub const GAP_TOL: f64 = 1e-6;
pub const SYMMETRY_TOL: f64 = 1e-8;
pub const UNITALITY_TOL: f64 = 1e-9;
pub const MAX_CONDITION: f64 = 1e12;
/// Largest bond dimension for which the `D²×D²` transfer matrix is built.
pub const MAX_EXPLICIT_BOND: usize = 16;
/// Largest state vector the finite-chain oracle will enumerate.
pub const MAX_STATE_LEN: usize = 1 << 20;

/// Power iterations attempted before switching to repeated squaring of the
/// explicit transfer matrix.
const POWER_BUDGET: usize = 2_000;
/// Accepted fixed-point residual `‖T(ρ)/λ − ρ‖` on the squaring path.
const SQUARING_RESIDUAL: f64 = 1e-10;
/// Block size, iteration cap, tolerance and start seed of the subleading
/// eigenvalue search.
const RITZ_BLOCK: usize = 4;
const RITZ_MAX_ITER: usize = 2_000;
const RITZ_TOL: f64 = 1e-3;
const RITZ_SEED: u64 = 0x7a11_0f_0b;

#[derive(Clone, Debug, PartialEq)]
pub struct MpsTensor {
    blocks: Vec<CMat>,
}

#[derive(Serialize, Deserialize)]
struct MpsJson {
    d: usize,
    #[serde(rename = "D")]
    bond: usize,
    blocks: Vec<Vec<[f64; 2]>>,
}

impl MpsTensor {
    pub fn new(blocks: Vec<CMat>) -> Result<Self> {
        let first = blocks.first().ok_or_else(|| Error::Invalid("MPS tensor needs d ≥ 1 blocks".into()))?;
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::Invalid("bond dimension must be at least 1".into()));
        }
        if blocks.iter().any(|b| b.nrows() != dim || b.ncols() != dim) {
            return Err(Error::Dimension(format!("all blocks must be {dim}x{dim}")));
        }
        Ok(MpsTensor { blocks })
    }

    pub fn d(&self) -> usize {
        self.blocks.len()
    }

    pub fn bond_dim(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn scaled(&self, factor: f64) -> MpsTensor {
        MpsTensor { blocks: self.blocks.iter().map(|b| b.scale(factor)).collect() }
    }

    /// Scales block `i` by `weights[i]`.
    pub fn weighted(&self, weights: &[f64]) -> Result<MpsTensor> {
        if weights.len() != self.d() {
            return Err(Error::Dimension(format!("{} weights for d = {}", weights.len(), self.d())));
        }
        Ok(MpsTensor { blocks: self.blocks.iter().zip(weights).map(|(b, &w)| b.scale(w)).collect() })
    }

    /// `A^i → Y A^i Y^{-1}`.
    pub fn gauge(&self, y: &CMat, y_inv: &CMat) -> Result<MpsTensor> {
        MpsTensor::new(self.blocks.iter().map(|b| y * b * y_inv).collect())
    }

    /// Frobenius norm of the stacked tensor.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn transfer(&self, rho: &CMat) -> CMat {
        self.blocks.iter().map(|a| a * rho * a.adjoint()).fold(CMat::zeros(rho.nrows(), rho.ncols()), |s, x| s + x)
    }

    pub fn transfer_adjoint(&self, rho: &CMat) -> CMat {
        self.blocks.iter().map(|a| a.adjoint() * rho * a).fold(CMat::zeros(rho.nrows(), rho.ncols()), |s, x| s + x)
    }

    /// `Σ_i conj(A^i) ⊗ A^i`, acting on column-major `vec(ρ)`.
    pub fn transfer_matrix(&self) -> Result<CMat> {
        let dim = self.bond_dim();
        if dim > MAX_EXPLICIT_BOND {
            return Err(Error::TooLarge(format!("D = {dim} exceeds explicit transfer-matrix limit {MAX_EXPLICIT_BOND}")));
        }
        Ok(self.blocks.iter().fold(CMat::zeros(dim * dim, dim * dim), |s, a| s + a.conjugate().kronecker(a)))
    }

    /// Eigenvalues of the transfer matrix sorted by decreasing modulus.
    pub fn transfer_spectrum(&self) -> Result<Vec<C64>> {
        let mut ev = linalg::eigenvalues(&self.transfer_matrix()?);
        ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        Ok(ev)
    }

    pub fn to_json(&self) -> String {
        let j = MpsJson {
            d: self.d(),
            bond: self.bond_dim(),
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    let n = b.nrows();
                    (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| [b[(r, c)].re, b[(r, c)].im]).collect()
                })
                .collect(),
        };
        serde_json::to_string(&j).expect("MPS serialisation cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: MpsJson = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("MPS JSON: {e}")))?;
        if j.blocks.len() != j.d {
            return Err(Error::Dimension(format!("d = {} but {} blocks", j.d, j.blocks.len())));
        }
        let blocks = j
            .blocks
            .iter()
            .map(|b| {
                if b.len() != j.bond * j.bond {
                    return Err(Error::Dimension(format!("block has {} entries, expected D² = {}", b.len(), j.bond * j.bond)));
                }
                Ok(CMat::from_row_iterator(j.bond, j.bond, b.iter().map(|[re, im]| C64::new(*re, *im))))
            })
            .collect::<Result<Vec<_>>>()?;
        MpsTensor::new(blocks)
    }
}

#[derive(Clone, Debug)]
pub struct FixedPointData {
    pub lambda_max: f64,
    /// Right fixed point, trace 1.
    pub rho_r: CMat,
    /// Left fixed point, trace 1.
    pub rho_l: CMat,
    /// Schmidt spectrum `eig(√ρ_R ρ_L √ρ_R)`, descending, summing to 1.
    pub spectrum: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl FixedPointData {
    /// Fixed points of the tensor scaled by `s`: same `ρ`, `λ → s²λ`.
    pub fn scaled(mut self, s: f64) -> FixedPointData {
        self.lambda_max *= s * s;
        self
    }
}

struct PowerResult {
    rho: CMat,
    iterations: usize,
    residual: f64,
    converged: bool,
}

fn power_iterate(apply: impl Fn(&CMat) -> CMat, dim: usize, tol: f64, budget: usize) -> Result<PowerResult> {
    let mut rho = linalg::identity(dim).unscale(dim as f64);
    let mut diff = f64::INFINITY;
    // errors in ρ are amplified by its condition number in the canonical gauge
    let mut target = tol;
    for k in 1..=budget {
        let t = apply(&rho);
        let tr = linalg::trace(&t).re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::NotInjective(format!("channel annihilated the iterate (trace {tr:.3e})")));
        }
        let next = linalg::hermitian_part(&t).unscale(tr);
        let prev = diff;
        diff = linalg::frobenius(&(&next - &rho));
        rho = next;
        // remaining error of a geometric sequence is diff·r/(1−r)
        let r = if prev.is_finite() && prev > 0.0 { (diff / prev).min(1.0) } else { 1.0 };
        let remaining = if r < 1.0 { diff * r / (1.0 - r) } else { f64::INFINITY };
        if diff < 1e-16 {
            return Ok(PowerResult { rho, iterations: k, residual: diff, converged: true });
        }
        if diff < target && remaining < target {
            let ev = linalg::hermitian_eigenvalues(&rho);
            let cond = ev[ev.len() - 1] / ev[0].max(f64::MIN_POSITIVE);
            let needed = (tol / cond.max(1.0)).max(4e-16);
            if needed >= target * 0.999 {
                return Ok(PowerResult { rho, iterations: k, residual: diff, converged: true });
            }
            target = needed;
        }
    }
    Ok(PowerResult { rho, iterations: budget, residual: diff, converged: false })
}

/// Leading eigenvectors of `T` and `T†` by repeated squaring of the explicit
/// transfer matrix; convergence is `ratio^(2^k)` so small gaps are cheap.
fn squaring_fixed_points(tensor: &MpsTensor) -> Result<(CMat, CMat, usize)> {
    let dim = tensor.bond_dim();
    let mut p = tensor.transfer_matrix()?;
    let n0 = linalg::frobenius(&p);
    p.unscale_mut(n0);
    let id = linalg::vectorize(&linalg::identity(dim));
    let extract = |p: &CMat| -> Option<(CMat, CMat)> {
        let r = linalg::hermitian_part(&linalg::unvectorize(&(p * &id), dim));
        let l = linalg::hermitian_part(&linalg::unvectorize(&(p.adjoint() * &id), dim));
        let (tr, tl) = (linalg::trace(&r).re, linalg::trace(&l).re);
        (tr.abs() > 0.0 && tl.abs() > 0.0 && tr.is_finite() && tl.is_finite()).then(|| (r.unscale(tr), l.unscale(tl)))
    };
    let mut prev: Option<(CMat, CMat)> = None;
    for k in 1..=64 {
        let mut q = &p * &p;
        let nq = linalg::frobenius(&q);
        if nq == 0.0 || !nq.is_finite() {
            return Err(Error::NotInjective("transfer matrix is nilpotent".into()));
        }
        q.unscale_mut(nq);
        p = q;
        if let Some((r, l)) = extract(&p) {
            if let Some((pr, pl)) = &prev {
                if linalg::frobenius(&(&r - pr)) < 1e-15 && linalg::frobenius(&(&l - pl)) < 1e-15 {
                    return Ok((r, l, k));
                }
            }
            prev = Some((r, l));
        }
    }
    match prev {
        Some((r, l)) => Ok((r, l, 64)),
        None => Err(Error::NoConvergence { iterations: 64, residual: f64::INFINITY }),
    }
}

fn fixed_point_residual(apply: impl Fn(&CMat) -> CMat, rho: &CMat) -> (f64, f64) {
    let t = apply(rho);
    let lambda = linalg::trace(&t).re / linalg::trace(rho).re;
    (lambda, linalg::frobenius(&(t.unscale(lambda) - rho)))
}

fn schmidt_spectrum(rho_r: &CMat, rho_l: &CMat) -> Vec<f64> {
    let s = linalg::psd_sqrt(rho_r);
    spectrum_of(&(&s * rho_l * &s))
}

fn spectrum_of(rho: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = linalg::hermitian_eigenvalues(rho).into_iter().map(|x| x.max(0.0)).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v.reverse();
    v
}

/// Leading fixed points of the transfer channel and its adjoint.
///
/// Power iteration from the identity, Hermitian-symmetrised each step; if
/// it has not converged within a fixed budget and `D` is small enough, the
/// explicit transfer matrix is squared repeatedly instead.
pub fn leading_fixed_points(tensor: &MpsTensor, tol: f64, max_iter: usize) -> Result<FixedPointData> {
    if !(tol > 0.0) {
        return Err(Error::Invalid("fixed-point tolerance must be positive".into()));
    }
    let dim = tensor.bond_dim();
    let budget = if dim <= MAX_EXPLICIT_BOND { POWER_BUDGET.min(max_iter) } else { max_iter };
    let right = power_iterate(|r| tensor.transfer(r), dim, tol, budget)?;
    let left = power_iterate(|r| tensor.transfer_adjoint(r), dim, tol, budget)?;
    let (rho_r, rho_l, iterations, residual) = if right.converged && left.converged {
        (right.rho, left.rho, right.iterations.max(left.iterations), right.residual.max(left.residual))
    } else if dim <= MAX_EXPLICIT_BOND {
        let (r, l, k) = squaring_fixed_points(tensor)?;
        let (_, res_r) = fixed_point_residual(|x| tensor.transfer(x), &r);
        let (_, res_l) = fixed_point_residual(|x| tensor.transfer_adjoint(x), &l);
        let residual = res_r.max(res_l);
        if residual > SQUARING_RESIDUAL {
            return Err(Error::NoConvergence { iterations: budget + k, residual });
        }
        (r, l, budget + k, residual)
    } else {
        return Err(Error::NoConvergence { iterations: max_iter, residual: right.residual.max(left.residual) });
    };
    let (lambda_max, _) = fixed_point_residual(|x| tensor.transfer(x), &rho_r);
    let min_eig = linalg::hermitian_eigenvalues(&rho_r)[0];
    if min_eig < -1e-9 {
        return Err(Error::Inconsistent(format!("ρ_R not positive semidefinite (min eigenvalue {min_eig:.3e})")));
    }
    let spectrum = schmidt_spectrum(&rho_r, &rho_l);
    Ok(FixedPointData { lambda_max, rho_r, rho_l, spectrum, iterations, residual })
}

/// `A'^i = X^{-1/2} A^i X^{1/2} / √λ` with `X = ρ_R`, so that `Σ A' A'† = 1`;
/// returns `A'` and `ρ_L' = X^{1/2} ρ_L X^{1/2}` normalised to trace 1.
pub fn right_canonicalize(tensor: &MpsTensor, fp: &FixedPointData) -> Result<(MpsTensor, CMat)> {
    let (s, si) = linalg::sqrt_and_inv_sqrt(&fp.rho_r, MAX_CONDITION)?;
    let a = tensor.scaled(1.0 / fp.lambda_max.sqrt()).gauge(&si, &s)?;
    let dim = a.bond_dim();
    let unital = linalg::frobenius(&(a.transfer(&linalg::identity(dim)) - linalg::identity(dim)));
    if unital > UNITALITY_TOL {
        return Err(Error::Inconsistent(format!("canonical channel not unital (residual {unital:.3e})")));
    }
    let rl = &s * &fp.rho_l * &s;
    let rl = linalg::hermitian_part(&rl);
    let tr = linalg::trace(&rl).re;
    Ok((a, rl.unscale(tr)))
}

/// Single-cut entropy `S` and the periodic two-cut value `E = 2S`, in bits.
pub fn entanglement_entropy(spectrum: &[f64]) -> Result<(f64, f64)> {
    let total: f64 = spectrum.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Invalid(format!("spectrum sums to {total}")));
    }
    if let Some(x) = spectrum.iter().find(|&&x| x < -1e-9) {
        return Err(Error::Invalid(format!("negative spectrum entry {x}")));
    }
    let clipped: Vec<f64> = spectrum.iter().map(|&x| x.max(0.0)).collect();
    let s = linalg::entropy_bits(&clipped);
    Ok((s, 2.0 * s))
}

#[derive(Clone, Debug, Serialize)]
pub struct InjectivityReport {
    pub injective: bool,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `|λ₂|/|λ₁|`.
    pub ratio: f64,
    pub full_rank: bool,
}

/// `|λ₂|/λ₁` by subspace iteration with Rayleigh–Ritz on the channel with
/// the leading pair `ρ_R ⟨ρ_L, ·⟩` deflated.
fn subleading_ratio(tensor: &MpsTensor, fp: &FixedPointData) -> f64 {
    let dim = tensor.bond_dim();
    let n = dim * dim;
    if n == 1 {
        return 0.0;
    }
    let b = RITZ_BLOCK.min(n - 1);
    let overlap = linalg::trace_product(&fp.rho_l, &fp.rho_r);
    let apply = |col: CVec| -> CVec {
        let x = linalg::unvectorize(&col, dim);
        let tx = tensor.transfer(&x).unscale(fp.lambda_max);
        let proj = linalg::trace_product(&fp.rho_l, &x) / overlap;
        linalg::vectorize(&(tx - &fp.rho_r * proj))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(RITZ_SEED);
    let start = CMat::from_fn(n, b, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let mut z = start.qr().q();
    let mut prev = f64::INFINITY;
    let mut theta = 0.0;
    for _ in 0..RITZ_MAX_ITER {
        let mut w = CMat::zeros(n, z.ncols());
        for j in 0..z.ncols() {
            w.set_column(j, &apply(z.column(j).into_owned()));
        }
        if linalg::frobenius(&w) < 1e-300 {
            return 0.0;
        }
        let h = z.adjoint() * &w;
        theta = linalg::eigenvalues(&h).iter().map(|x| x.norm()).fold(0.0, f64::max);
        if (theta - prev).abs() <= RITZ_TOL * theta.max(1e-6) {
            break;
        }
        prev = theta;
        z = w.qr().q();
    }
    theta
}

/// Injectivity: `|λ₂|/|λ₁| < 1 − gap_tol` and `ρ_R` of full rank.
pub fn is_injective(tensor: &MpsTensor, gap_tol: f64) -> Result<InjectivityReport> {
    injectivity_and_fixed_points(tensor, gap_tol).map(|(report, _)| report)
}

/// [`is_injective`] together with the fixed points it computed, when the
/// power iteration converged.
pub fn injectivity_and_fixed_points(
    tensor: &MpsTensor,
    gap_tol: f64,
) -> Result<(InjectivityReport, Option<FixedPointData>)> {
    let fp = match leading_fixed_points(tensor, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER) {
        Ok(fp) => fp,
        Err(Error::NoConvergence { .. }) | Err(Error::NotInjective(_)) => {
            let report = InjectivityReport { injective: false, lambda1: 0.0, lambda2: 0.0, ratio: 1.0, full_rank: false };
            return Ok((report, None));
        }
        Err(e) => return Err(e),
    };
    Ok((injectivity_from(tensor, &fp, gap_tol), Some(fp)))
}

fn injectivity_from(tensor: &MpsTensor, fp: &FixedPointData, gap_tol: f64) -> InjectivityReport {
    let ratio = subleading_ratio(tensor, fp);
    let ev = linalg::hermitian_eigenvalues(&fp.rho_r);
    let full_rank = ev[0] > 1e-12 * ev[ev.len() - 1];
    let injective = ratio < 1.0 - gap_tol && full_rank;
    InjectivityReport { injective, lambda1: fp.lambda_max, lambda2: ratio * fp.lambda_max, ratio, full_rank }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryCheck {
    pub residual: f64,
    /// Fitted `φ(g)` per element, radians.
    pub phases: Vec<f64>,
}

/// For each `g`, fits `e^{iφ(g)}` by overlap and reports
/// `max_g ‖χ_{α(i)}(g) A^i − e^{iφ(g)} V(g) A^i V(g)†‖ / ‖A‖`.
pub fn verify_symmetry(tensor: &MpsTensor, labels: &[IrrepLabel], rep: &ProjectiveRep) -> Result<SymmetryCheck> {
    let group = rep.group();
    if labels.len() != tensor.d() {
        return Err(Error::Dimension(format!("{} physical labels for d = {}", labels.len(), tensor.d())));
    }
    if rep.dim() != tensor.bond_dim() {
        return Err(Error::Dimension(format!("virtual rep dimension {} but D = {}", rep.dim(), tensor.bond_dim())));
    }
    let norm = tensor.norm().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    let mut phases = Vec::with_capacity(group.order());
    for (gi, g) in group.elements().iter().enumerate() {
        let v = &rep.matrices()[gi];
        let lhs: Vec<CMat> = tensor.blocks().iter().zip(labels).map(|(a, l)| a * group.character_value(l, g)).collect();
        let rhs: Vec<CMat> = tensor.blocks().iter().map(|a| v * a * v.adjoint()).collect();
        let overlap: C64 = rhs.iter().zip(&lhs).map(|(r, l)| linalg::trace_product(&r.adjoint(), l)).sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
        phases.push(phase.arg());
        let diff: f64 = lhs.iter().zip(&rhs).map(|(l, r)| (l - r * phase).norm_squared()).sum::<f64>().sqrt();
        worst = worst.max(diff / norm);
    }
    Ok(SymmetryCheck { residual: worst, phases })
}

#[derive(Clone, Debug)]
pub struct Canonical {
    pub tensor: MpsTensor,
    pub rho_l: CMat,
    pub spectrum: Vec<f64>,
    pub fixed_points: FixedPointData,
}

/// An MPS tensor together with its diagonal physical and projective virtual
/// representations of `G`.
#[derive(Debug)]
pub struct SymmetricMps {
    tensor: MpsTensor,
    labels: Vec<IrrepLabel>,
    rep: Arc<ProjectiveRep>,
    canonical: OnceLock<Result<Canonical>>,
}

impl Clone for SymmetricMps {
    fn clone(&self) -> Self {
        SymmetricMps {
            tensor: self.tensor.clone(),
            labels: self.labels.clone(),
            rep: self.rep.clone(),
            canonical: self.canonical.clone(),
        }
    }
}

impl SymmetricMps {
    /// Checks labels and dimensions and requires a symmetry residual below 1e-8.
    pub fn new(tensor: MpsTensor, labels: Vec<IrrepLabel>, rep: Arc<ProjectiveRep>) -> Result<Self> {
        for l in &labels {
            rep.group().validate_label(l)?;
        }
        let check = verify_symmetry(&tensor, &labels, &rep)?;
        if check.residual > SYMMETRY_TOL {
            return Err(Error::Inconsistent(format!("symmetry residual {:.3e} exceeds {SYMMETRY_TOL:.0e}", check.residual)));
        }
        Ok(SymmetricMps { tensor, labels, rep, canonical: OnceLock::new() })
    }

    pub fn tensor(&self) -> &MpsTensor {
        &self.tensor
    }

    pub fn labels(&self) -> &[IrrepLabel] {
        &self.labels
    }

    pub fn rep(&self) -> &ProjectiveRep {
        &self.rep
    }

    pub fn rep_arc(&self) -> &Arc<ProjectiveRep> {
        &self.rep
    }

    pub fn group(&self) -> &Group {
        self.rep.group()
    }

    /// `m_α` per label in lexicographic order; sums to `d`.
    pub fn physical_multiplicities(&self) -> Vec<usize> {
        let g = self.group();
        let mut m = vec![0; g.order()];
        for l in &self.labels {
            m[g.label_index(l)] += 1;
        }
        m
    }

    pub fn with_tensor(&self, tensor: MpsTensor) -> Result<SymmetricMps> {
        SymmetricMps::new(tensor, self.labels.clone(), self.rep.clone())
    }

    pub fn symmetry(&self) -> SymmetryCheck {
        verify_symmetry(&self.tensor, &self.labels, &self.rep).expect("dimensions checked at construction")
    }

    /// Right-canonical data, computed once.
    pub fn canonical(&self) -> Result<&Canonical> {
        self.canonical.get_or_init(|| self.compute_canonical()).as_ref().map_err(Clone::clone)
    }

    /// Like [`SymmetricMps::new`], reusing fixed points already computed for
    /// this tensor.
    pub fn with_fixed_points(
        tensor: MpsTensor,
        labels: Vec<IrrepLabel>,
        rep: Arc<ProjectiveRep>,
        fp: FixedPointData,
    ) -> Result<Self> {
        let state = SymmetricMps::new(tensor, labels, rep)?;
        let _ = state.canonical.set(state.canonical_from(fp));
        Ok(state)
    }

    fn compute_canonical(&self) -> Result<Canonical> {
        self.canonical_from(leading_fixed_points(&self.tensor, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER)?)
    }

    fn canonical_from(&self, fp: FixedPointData) -> Result<Canonical> {
        let scale = linalg::frobenius(&fp.rho_r);
        for v in self.rep.matrices() {
            let c = linalg::frobenius(&(v * &fp.rho_r * v.adjoint() - &fp.rho_r));
            if c > 1e-6 * scale {
                return Err(Error::Inconsistent(format!("ρ_R does not commute with V(g) ({c:.3e})")));
            }
        }
        let (tensor, rho_l) = right_canonicalize(&self.tensor, &fp)?;
        let spectrum = spectrum_of(&rho_l);
        Ok(Canonical { tensor, rho_l, spectrum, fixed_points: fp })
    }
}

/// `ψ[i₁…i_N] = Tr(A^{i₁}⋯A^{i_N})`, first site most significant, unit norm.
pub fn finite_chain_state(tensor: &MpsTensor, n: usize) -> Result<CVec> {
    let d = tensor.d();
    let len = checked_pow(d, n).filter(|&l| l <= MAX_STATE_LEN).ok_or_else(|| {
        Error::TooLarge(format!("d^N = {d}^{n} exceeds {MAX_STATE_LEN}"))
    })?;
    if n == 0 {
        return Err(Error::Invalid("chain length must be at least 1".into()));
    }
    let mut psi = CVec::zeros(len);
    let dim = tensor.bond_dim();
    let mut stack: Vec<CMat> = vec![linalg::identity(dim)];
    fill(tensor, n, &mut stack, 0, &mut psi);
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::Inconsistent("finite-chain state vanishes".into()));
    }
    Ok(psi.unscale(norm))
}

fn fill(tensor: &MpsTensor, n: usize, stack: &mut Vec<CMat>, prefix: usize, psi: &mut CVec) {
    let depth = stack.len() - 1;
    let d = tensor.d();
    for (i, a) in tensor.blocks().iter().enumerate() {
        let idx = prefix * d + i;
        if depth + 1 == n {
            psi[idx] = linalg::trace_product(&stack[depth], a);
        } else {
            let next = &stack[depth] * a;
            stack.push(next);
            fill(tensor, n, stack, idx, psi);
            stack.pop();
        }
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

/// Sector-resolved data of a contiguous block `A` of a finite periodic chain.
#[derive(Clone, Debug, Serialize)]
pub struct SectorAnalysis {
    /// `p_α = Tr(Π_α ρ^A)` in lexicographic label order.
    pub probabilities: Vec<f64>,
    /// Entropy of `ρ_α / p_α` per label (0 for empty sectors).
    pub sector_entropies: Vec<f64>,
    pub e: f64,
    pub e_acc: f64,
    pub e_inacc: f64,
    /// `|(E − E_acc) − H(p)|`.
    pub identity_residual: f64,
}

fn sector_weights(group: &Group, charge: &IrrepLabel) -> Vec<C64> {
    let n = group.order() as f64;
    group
        .labels()
        .iter()
        .map(|alpha| {
            group.elements().iter().map(|g| group.character_value(alpha, g) * group.character_value(charge, g)).sum::<C64>()
                / n
        })
        .collect()
}

/// Total charge (label product) of each basis string of `sites` sites.
fn block_charges(group: &Group, labels: &[IrrepLabel], sites: usize) -> Vec<IrrepLabel> {
    let mut charges = vec![group.trivial_label()];
    for _ in 0..sites {
        charges = charges.iter().flat_map(|c| labels.iter().map(move |l| group.label_product(c, l))).collect();
    }
    charges
}

fn finish_sectors(
    probabilities: Vec<f64>,
    sector_spectra: Vec<Vec<f64>>,
    full_spectrum: Vec<f64>,
) -> SectorAnalysis {
    let sector_entropies: Vec<f64> = sector_spectra
        .iter()
        .zip(&probabilities)
        .map(|(s, &p)| {
            if p <= 1e-14 {
                0.0
            } else {
                linalg::entropy_bits(&s.iter().map(|x| x / p).collect::<Vec<_>>())
            }
        })
        .collect();
    let e = linalg::entropy_bits(&full_spectrum);
    let e_acc: f64 = probabilities.iter().zip(&sector_entropies).map(|(p, s)| p * s).sum();
    let e_inacc = e - e_acc;
    let h = linalg::entropy_bits(&probabilities);
    SectorAnalysis { probabilities, sector_entropies, e, e_acc, e_inacc, identity_residual: (e_inacc - h).abs() }
}

fn clamp_spectrum(v: Vec<f64>, total: f64) -> Vec<f64> {
    v.into_iter().map(|x| (x / total).max(0.0)).collect()
}

/// Brute-force oracle on an explicit state vector: applies
/// `Π_α = (1/|G|) Σ_g χ_α(g) u(g)^{⊗N_A}` to the first `N_A` sites.
pub fn finite_sector_analysis(
    psi: &CVec,
    labels: &[IrrepLabel],
    group: &Group,
    n_sites: usize,
    n_a: usize,
) -> Result<SectorAnalysis> {
    let d = labels.len();
    if n_a == 0 || n_a > n_sites {
        return Err(Error::Invalid(format!("need 1 ≤ N_A ≤ N, got N_A = {n_a}, N = {n_sites}")));
    }
    if checked_pow(d, n_sites) != Some(psi.len()) {
        return Err(Error::Dimension(format!("state length {} is not {d}^{n_sites}", psi.len())));
    }
    let rows = checked_pow(d, n_a).expect("bounded by state length");
    let cols = psi.len() / rows;
    let norm2 = psi.norm_squared();
    // psi index = row * cols + col with row-major site order
    let psi_mat = CMat::from_fn(rows, cols, |r, c| psi[r * cols + c] / norm2.sqrt());

    let charges = block_charges(group, labels, n_a);
    let n_labels = group.order();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_labels];
    for (row, charge) in charges.iter().enumerate() {
        let w = sector_weights(group, charge);
        let total: C64 = w.iter().sum();
        if (total - 1.0).norm() > 1e-10 {
            return Err(Error::Inconsistent(format!("projectors do not resolve the identity ({total})")));
        }
        for (alpha, wa) in w.iter().enumerate() {
            if (wa - 1.0).norm() < 1e-10 {
                members[alpha].push(row);
            } else if wa.norm() > 1e-10 {
                return Err(Error::Inconsistent(format!("projector weight {wa} is not 0 or 1")));
            }
        }
    }

    let blocks: Vec<CMat> = members
        .iter()
        .map(|rows_a| CMat::from_fn(rows_a.len(), cols, |i, c| psi_mat[(rows_a[i], c)]))
        .collect();
    let probabilities: Vec<f64> = blocks.iter().map(|b| b.norm_squared()).collect();
    let mut block_diagonal = true;
    for a in 0..n_labels {
        for b in (a + 1)..n_labels {
            if blocks[a].nrows() > 0 && blocks[b].nrows() > 0 && (&blocks[a] * blocks[b].adjoint()).norm() > 1e-10 {
                block_diagonal = false;
            }
        }
    }
    let sector_spectra: Vec<Vec<f64>> = blocks
        .iter()
        .map(|b| {
            if b.nrows() == 0 {
                Vec::new()
            } else if b.nrows() <= b.ncols() {
                clamp_spectrum(linalg::hermitian_eigenvalues(&(b * b.adjoint())), 1.0)
            } else {
                clamp_spectrum(linalg::hermitian_eigenvalues(&(b.adjoint() * b)), 1.0)
            }
        })
        .collect();
    let full = if block_diagonal {
        sector_spectra.iter().flatten().copied().collect()
    } else {
        let rho = if rows <= cols { &psi_mat * psi_mat.adjoint() } else { psi_mat.adjoint() * &psi_mat };
        clamp_spectrum(linalg::hermitian_eigenvalues(&rho), 1.0)
    };
    Ok(finish_sectors(probabilities, sector_spectra, full))
}

/// `F[(l,l'),(r,r')] = Σ_i w_i conj(A^i_{lr}) A^i_{l'r'}`.
fn weighted_transfer(tensor: &MpsTensor, weights: &[C64]) -> CMat {
    let dim = tensor.bond_dim();
    tensor
        .blocks()
        .iter()
        .zip(weights)
        .fold(CMat::zeros(dim * dim, dim * dim), |s, (a, &w)| s + a.conjugate().kronecker(a) * w)
}

fn mat_pow(m: &CMat, k: usize) -> CMat {
    (1..k).fold(m.clone(), |acc, _| acc * m)
}

/// Reorders `F[(l,l'),(r,r')]` into the Gram matrix `G[(l,r),(l',r')]`.
fn gram_from_transfer(f: &CMat, dim: usize) -> CMat {
    CMat::from_fn(dim * dim, dim * dim, |x, y| {
        let (l, r) = (x / dim, x % dim);
        let (lp, rp) = (y / dim, y % dim);
        f[(l * dim + lp, r * dim + rp)]
    })
}

/// Exact finite-chain oracle that never forms the state vector.
///
/// Writing `|ψ⟩ = Σ_{l,r} |a_{lr}⟩|b_{rl}⟩` for the block split, the
/// reduced state has the nonzero spectrum of `G_A^{1/2} M G_A^{1/2}` with
/// `G_A[x,y] = ⟨a_x|a_y⟩` and `M[x,x'] = ⟨b_{x'}|b_x⟩`. Sector projections
/// replace `G_A` by `(1/|G|) Σ_g χ_α(g) ⟨a_x|u(g)^{⊗N_A}|a_y⟩`, which uses
/// the charged transfer matrix `Σ_i χ_{α(i)}(g) conj(A^i) ⊗ A^i`.
pub fn gram_sector_analysis(
    tensor: &MpsTensor,
    labels: &[IrrepLabel],
    group: &Group,
    n_sites: usize,
    n_a: usize,
) -> Result<SectorAnalysis> {
    if labels.len() != tensor.d() {
        return Err(Error::Dimension(format!("{} labels for d = {}", labels.len(), tensor.d())));
    }
    if n_a == 0 || n_a >= n_sites {
        return Err(Error::Invalid(format!("need 1 ≤ N_A < N, got N_A = {n_a}, N = {n_sites}")));
    }
    let dim = tensor.bond_dim();
    if dim > MAX_EXPLICIT_BOND {
        return Err(Error::TooLarge(format!("D = {dim} exceeds {MAX_EXPLICIT_BOND}")));
    }
    let ones = vec![C64::new(1.0, 0.0); tensor.d()];
    let f1 = weighted_transfer(tensor, &ones);
    let ga = gram_from_transfer(&mat_pow(&f1, n_a), dim);
    let fb = mat_pow(&f1, n_sites - n_a);
    let m = CMat::from_fn(dim * dim, dim * dim, |x, xp| {
        let (l, r) = (x / dim, x % dim);
        let (lp, rp) = (xp / dim, xp % dim);
        fb[(rp * dim + r, lp * dim + l)]
    });
    let m = linalg::hermitian_part(&m);
    let norm = linalg::trace_product(&ga, &m).re;
    if !(norm > 0.0) {
        return Err(Error::Inconsistent("finite-chain state vanishes".into()));
    }

    let spectrum_with = |g: &CMat| -> Vec<f64> {
        let s = linalg::psd_sqrt(&linalg::hermitian_part(g));
        clamp_spectrum(linalg::hermitian_eigenvalues(&(&s * &m * &s)), norm)
    };
    let full = spectrum_with(&ga);

    let charged: Vec<CMat> = group
        .elements()
        .iter()
        .map(|g| {
            let w: Vec<C64> = labels.iter().map(|l| group.character_value(l, g)).collect();
            gram_from_transfer(&mat_pow(&weighted_transfer(tensor, &w), n_a), dim)
        })
        .collect();
    let order = group.order() as f64;
    let mut probabilities = Vec::with_capacity(group.order());
    let mut sector_spectra = Vec::with_capacity(group.order());
    let mut resolved = CMat::zeros(dim * dim, dim * dim);
    for alpha in group.labels() {
        let mut g_alpha = CMat::zeros(dim * dim, dim * dim);
        for (g, c) in group.elements().iter().zip(&charged) {
            g_alpha += c * group.character_value(&alpha, g);
        }
        g_alpha.unscale_mut(order);
        resolved += &g_alpha;
        probabilities.push(linalg::trace_product(&g_alpha, &m).re / norm);
        sector_spectra.push(spectrum_with(&g_alpha));
    }
    let res = linalg::frobenius(&(resolved - &ga)) / linalg::frobenius(&ga).max(f64::MIN_POSITIVE);
    if res > 1e-10 {
        return Err(Error::Inconsistent(format!("projectors do not resolve the identity ({res:.3e})")));
    }
    Ok(finish_sectors(probabilities, sector_spectra, full))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::projrep::{pauli_irrep, pauli_matrices};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cluster_tensor() -> MpsTensor {
        MpsTensor::new(pauli_matrices().iter().map(|p| p.scale(std::f64::consts::FRAC_1_SQRT_2)).collect()).unwrap()
    }

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        CMat::from_fn(n, n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn rejects_ragged_blocks() {
        assert!(MpsTensor::new(vec![]).is_err());
        assert!(MpsTensor::new(vec![CMat::zeros(2, 2), CMat::zeros(3, 3)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = cluster_tensor();
        let back = MpsTensor::from_json(&t.to_json()).unwrap();
        assert_eq!(t, back);
        assert!(MpsTensor::from_json(r#"{"d":1,"D":2,"blocks":[[[1,0]]]}"#).is_err());
    }

    #[test]
    fn json_is_row_major() {
        let t = MpsTensor::from_json(r#"{"d":1,"D":2,"blocks":[[[1,0],[2,0],[3,0],[4,0]]]}"#).unwrap();
        assert_eq!(t.blocks()[0][(0, 1)], C64::new(2.0, 0.0));
    }

    #[test]
    fn transfer_matrix_matches_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = MpsTensor::new((0..3).map(|_| random_matrix(3, &mut rng)).collect()).unwrap();
        let rho = random_matrix(3, &mut rng);
        let lhs = linalg::vectorize(&t.transfer(&rho));
        let rhs = t.transfer_matrix().unwrap() * linalg::vectorize(&rho);
        assert!((lhs - rhs).norm() < 1e-12);
        let lhs = linalg::vectorize(&t.transfer_adjoint(&rho));
        let rhs = t.transfer_matrix().unwrap().adjoint() * linalg::vectorize(&rho);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn channel_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = MpsTensor::new((0..2).map(|_| random_matrix(4, &mut rng)).collect()).unwrap();
        for _ in 0..100 {
            let b = random_matrix(4, &mut rng);
            let rho = &b * b.adjoint();
            assert!(linalg::hermitian_eigenvalues(&t.transfer(&rho))[0] > -1e-12);
        }
    }

    #[test]
    fn cluster_fixed_points() {
        let fp = leading_fixed_points(&cluster_tensor(), FIXED_POINT_TOL, FIXED_POINT_MAX_ITER).unwrap();
        assert!((fp.lambda_max - 2.0).abs() < 1e-12);
        let half = linalg::identity(2).scale(0.5);
        assert!(linalg::frobenius(&(&fp.rho_r - &half)) < 1e-12);
        assert!(linalg::frobenius(&(&fp.rho_l - &half)) < 1e-12);
        assert!((fp.spectrum[0] - 0.5).abs() < 1e-12 && (fp.spectrum[1] - 0.5).abs() < 1e-12);
        // direct 20-step iteration of the normalised channel
        let t = cluster_tensor().scaled(std::f64::consts::FRAC_1_SQRT_2);
        let mut rho = CMat::from_row_slice(2, 2, &[C64::new(0.9, 0.0), C64::new(0.1, 0.2), C64::new(0.1, -0.2), C64::new(0.1, 0.0)]);
        for _ in 0..20 {
            rho = t.transfer(&rho);
        }
        assert!(linalg::frobenius(&(rho - half)) < 1e-12);
    }

    #[test]
    fn scalar_tensor_fixed_points() {
        let t = MpsTensor::new(vec![CMat::identity(1, 1)]).unwrap();
        let fp = leading_fixed_points(&t, FIXED_POINT_TOL, 10).unwrap();
        assert!((fp.lambda_max - 1.0).abs() < 1e-15);
        assert_eq!(fp.spectrum, vec![1.0]);
    }

    #[test]
    fn small_gap_uses_squaring() {
        // two-state chain with |λ₂/λ₁| = 0.9999
        let eps = 1e-4;
        let a0 = CMat::from_row_slice(2, 2, &[C64::new(1.0, 0.0), ZERO, ZERO, C64::new(1.0 - eps, 0.0)]);
        let a1 = CMat::from_row_slice(2, 2, &[ZERO, C64::new(1e-3, 0.0), C64::new(1e-3, 0.0), ZERO]);
        let t = MpsTensor::new(vec![a0, a1]).unwrap();
        let fp = leading_fixed_points(&t, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER).unwrap();
        assert!(fp.iterations > POWER_BUDGET);
        let (lam, res) = fixed_point_residual(|x| t.transfer(x), &fp.rho_r);
        assert!(res < 1e-10);
        assert!((lam - fp.lambda_max).abs() < 1e-12);
    }

    #[test]
    fn canonical_form_is_unital_and_idempotent() {
        let t = cluster_tensor();
        let fp = leading_fixed_points(&t, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER).unwrap();
        let (a, rl) = right_canonicalize(&t, &fp).unwrap();
        let expect = t.scaled(std::f64::consts::FRAC_1_SQRT_2);
        for (x, y) in a.blocks().iter().zip(expect.blocks()) {
            assert!(linalg::frobenius(&(x - y)) < 1e-12);
        }
        assert!((linalg::trace(&rl).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gauge_scrambled_cluster_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y = linalg::identity(2) + random_matrix(2, &mut rng).scale(0.5);
        let yi = y.clone().try_inverse().unwrap();
        let t = cluster_tensor().gauge(&y, &yi).unwrap();
        let fp = leading_fixed_points(&t, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER).unwrap();
        let (a, rl) = right_canonicalize(&t, &fp).unwrap();
        let s = spectrum_of(&rl);
        assert!((s[0] - 0.5).abs() < 1e-10 && (s[1] - 0.5).abs() < 1e-10);
        assert!(linalg::frobenius(&(a.transfer(&linalg::identity(2)) - linalg::identity(2))) < 1e-9);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entanglement_entropy(&[0.5, 0.5]).unwrap(), (1.0, 2.0));
        assert_eq!(entanglement_entropy(&[1.0, 0.0]).unwrap(), (0.0, 0.0));
        let (s, e) = entanglement_entropy(&[0.25; 4]).unwrap();
        assert!((s - 2.0).abs() < 1e-15 && (e - 4.0).abs() < 1e-15);
        assert!(entanglement_entropy(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn injectivity_examples() {
        let r = is_injective(&cluster_tensor(), GAP_TOL).unwrap();
        assert!(r.injective);
        assert!(r.ratio < 1e-12);
        let ghz = MpsTensor::new(vec![
            CMat::from_row_slice(2, 2, &[C64::new(1.0, 0.0), ZERO, ZERO, ZERO]),
            CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, C64::new(1.0, 0.0)]),
        ])
        .unwrap();
        assert!(!is_injective(&ghz, GAP_TOL).unwrap().injective);
        let big = MpsTensor::new(vec![CMat::identity(17, 17)]).unwrap();
        assert!(!is_injective(&big, GAP_TOL).unwrap().injective);
    }

    #[test]
    fn subleading_ratio_matches_full_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for dim in [2, 3, 5] {
            let blocks = (0..3)
                .map(|_| CMat::from_fn(dim, dim, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)))
                .collect();
            let t = MpsTensor::new(blocks).unwrap();
            let ev = t.transfer_spectrum().unwrap();
            let r = is_injective(&t, GAP_TOL).unwrap();
            assert!((r.lambda1 - ev[0].norm()).abs() < 1e-9 * ev[0].norm());
            let exact = ev[1].norm() / ev[0].norm();
            assert!((r.ratio - exact).abs() < 2e-2 * exact, "{} vs {exact}", r.ratio);
        }
    }

    fn cluster_labels() -> Vec<IrrepLabel> {
        [[0, 0], [1, 0], [1, 1], [0, 1]].iter().map(|l| IrrepLabel(l.to_vec())).collect()
    }

    #[test]
    fn cluster_symmetry_and_perturbation() {
        let rep = ProjectiveRep::from_irrep(&pauli_irrep());
        let t = cluster_tensor();
        let check = verify_symmetry(&t, &cluster_labels(), &rep).unwrap();
        assert!(check.residual < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noisy = MpsTensor::new(t.blocks().iter().map(|b| b + random_matrix(2, &mut rng).scale(1e-3)).collect()).unwrap();
        let r = verify_symmetry(&noisy, &cluster_labels(), &rep).unwrap().residual;
        assert!(r > 1e-4 && r < 1e-2, "residual {r}");
        assert!(SymmetricMps::new(noisy, cluster_labels(), Arc::new(rep)).is_err());
    }

    #[test]
    fn product_state_vector() {
        let t = MpsTensor::new(vec![CMat::identity(1, 1), CMat::zeros(1, 1)]).unwrap();
        let psi = finite_chain_state(&t, 5).unwrap();
        assert!((psi[0] - 1.0).norm() < 1e-15);
        assert!(psi.iter().skip(1).all(|z| z.norm() == 0.0));
        let big = MpsTensor::new(vec![CMat::identity(1, 1); 4]).unwrap();
        assert!(matches!(finite_chain_state(&big, 11), Err(Error::TooLarge(_))));
    }

    #[test]
    fn matrix_unit_chain_schmidt_rank() {
        let dim = 3;
        let blocks = (0..dim * dim)
            .map(|k| {
                let mut m = CMat::zeros(dim, dim);
                m[(k / dim, k % dim)] = C64::new(1.0, 0.0);
                m
            })
            .collect();
        let t = MpsTensor::new(blocks).unwrap();
        let psi = finite_chain_state(&t, 2).unwrap();
        let m = CMat::from_fn(9, 9, |r, c| psi[r * 9 + c]);
        let sv = m.singular_values();
        let rank = sv.iter().filter(|&&s| s > 1e-10).count();
        assert_eq!(rank, dim * dim);
    }

    /// Cluster state on qubit pairs: with index `i ↔ (a,b)` and block
    /// `X^a Z^b = (H Z^a)(H Z^b)`, the chain is the cluster state in the
    /// Hadamard-rotated basis, so after `H^{⊗2N}` every qubit triple is
    /// stabilised by `Z X Z`.
    #[test]
    fn cluster_chain_stabilisers() {
        let sites = 4;
        let t = cluster_tensor();
        let psi = finite_chain_state(&t, sites).unwrap();
        let q = 2 * sites;
        // physical index order 1, X, Y, Z maps to qubit pair bits
        let bits = [(0usize, 0usize), (1, 0), (1, 1), (0, 1)];
        let phase = [C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)];
        let mut qubit_state = CVec::zeros(1 << q);
        for (idx, amp) in psi.iter().enumerate() {
            let mut rem = idx;
            let mut digits = vec![0; sites];
            for s in (0..sites).rev() {
                digits[s] = rem % 4;
                rem /= 4;
            }
            let mut basis = 0usize;
            let mut ph = C64::new(1.0, 0.0);
            for &dg in &digits {
                basis = (basis << 2) | (bits[dg].0 << 1) | bits[dg].1;
                ph *= phase[dg];
            }
            qubit_state[basis] += amp * ph;
        }
        let apply_1q = |state: &CVec, qubit: usize, m: [[C64; 2]; 2]| -> CVec {
            let mut out = CVec::zeros(state.len());
            let bit = q - 1 - qubit;
            for i in 0..state.len() {
                let b = (i >> bit) & 1;
                for nb in 0..2 {
                    let j = (i & !(1 << bit)) | (nb << bit);
                    out[j] += m[nb][b] * state[i];
                }
            }
            out
        };
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let had = [[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(h, 0.0), C64::new(-h, 0.0)]];
        let x = [[ZERO, C64::new(1.0, 0.0)], [C64::new(1.0, 0.0), ZERO]];
        let z = [[C64::new(1.0, 0.0), ZERO], [ZERO, C64::new(-1.0, 0.0)]];
        let mut state = qubit_state;
        for k in 0..q {
            state = apply_1q(&state, k, had);
        }
        let state = state.unscale(state.norm());
        for k in 0..q {
            let mut v = apply_1q(&state, (k + q - 1) % q, z);
            v = apply_1q(&v, k, x);
            v = apply_1q(&v, (k + 1) % q, z);
            let expect = state.dotc(&v);
            assert!((expect.norm() - 1.0).abs() < 1e-10, "stabiliser at qubit {k}: {expect}");
        }
    }

    #[test]
    fn cluster_sector_analysis_both_oracles() {
        let g = Group::new(&[2, 2]).unwrap();
        let t = cluster_tensor();
        let psi = finite_chain_state(&t, 8).unwrap();
        let brute = finite_sector_analysis(&psi, &cluster_labels(), &g, 8, 4).unwrap();
        let gram = gram_sector_analysis(&t, &cluster_labels(), &g, 8, 4).unwrap();
        for s in [&brute, &gram] {
            for p in &s.probabilities {
                assert!((p - 0.25).abs() < 1e-10);
            }
            assert!((s.e - 2.0).abs() < 1e-10);
            assert!(s.e_acc.abs() < 1e-10);
            assert!(s.identity_residual < 1e-10);
        }
    }

    #[test]
    fn product_state_sector_analysis() {
        let g = Group::new(&[2]).unwrap();
        let labels = vec![IrrepLabel(vec![0]), IrrepLabel(vec![1])];
        let t = MpsTensor::new(vec![CMat::identity(1, 1), CMat::zeros(1, 1)]).unwrap();
        let psi = finite_chain_state(&t, 6).unwrap();
        let s = finite_sector_analysis(&psi, &labels, &g, 6, 3).unwrap();
        assert!((s.probabilities[0] - 1.0).abs() < 1e-15);
        assert_eq!(s.e, 0.0);
        assert_eq!(s.e_inacc, 0.0);
    }

    #[test]
    fn gram_oracle_matches_state_vector_on_random_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = Group::new(&[3]).unwrap();
        // diagonal virtual rep diag(1, ω, ω²) and labels chosen so A^i maps charges consistently
        let labels: Vec<IrrepLabel> = [0, 1, 2].iter().map(|&a| IrrepLabel(vec![a])).collect();
        let rep = ProjectiveRep::diagonal(&g, &labels).unwrap();
        let mut blocks = Vec::new();
        for l in &labels {
            let mut m = random_matrix(3, &mut rng);
            // keep entries (r,c) with label(r) - label(c) = l
            for r in 0..3 {
                for c in 0..3 {
                    if (r + 3 - c) % 3 != l.0[0] {
                        m[(r, c)] = ZERO;
                    }
                }
            }
            blocks.push(m);
        }
        let t = MpsTensor::new(blocks).unwrap();
        assert!(verify_symmetry(&t, &labels, &rep).unwrap().residual < 1e-12);
        let psi = finite_chain_state(&t, 7).unwrap();
        let brute = finite_sector_analysis(&psi, &labels, &g, 7, 3).unwrap();
        let gram = gram_sector_analysis(&t, &labels, &g, 7, 3).unwrap();
        for (a, b) in brute.probabilities.iter().zip(&gram.probabilities) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((brute.e - gram.e).abs() < 1e-9);
        assert!((brute.e_acc - gram.e_acc).abs() < 1e-9);
    }
}
