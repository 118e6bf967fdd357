//! 2-cocycles of finite Abelian groups and their projective representations.
//!
//! A cohomology class is parameterised by a strictly upper-triangular integer
//! matrix `t`, giving the bicharacter cocycle
//! `ω(g,h) = exp(2πi Σ_{i<j} t_ij g_i h_j / gcd(n_i, n_j))`.
//! Classes are compared through the commutator phase `β(g,h) = ω(g,h)/ω(h,g)`,
//! which is blind to coboundaries.
//!
//! The reference ω-irrep is cut numerically out of the ω-regular
//! representation, so any factor list is handled the same way. All other
//! ω-irreps are twists `μ_a · Ṽ` of the reference by linear characters.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{gcd, root_of_unity, Element, Group, IrrepLabel, Subgroup};
use crate::linalg::{self, CMat, ONE, ZERO};

/// Tolerance on `V(g)V(h) = ω(g,h)V(gh)` and the trace pattern.
pub const REP_TOL: f64 = 1e-10;
/// Eigenspace restriction must be unitary to this level before polar correction.
pub const UNITARITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleSpec {
    pub t: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    group: Group,
    t: Vec<Vec<usize>>,
}

impl Cocycle {
    pub fn new(group: &Group, t: Vec<Vec<usize>>) -> Result<Self> {
        let k = group.rank();
        if t.len() != k || t.iter().any(|row| row.len() != k) {
            return Err(Error::Dimension(format!("cocycle matrix must be {k}x{k}")));
        }
        let f = group.factors();
        for i in 0..k {
            for j in 0..k {
                if j <= i {
                    if t[i][j] != 0 {
                        return Err(Error::Invalid(format!(
                            "cocycle entry t[{i}][{j}] must be zero (strictly upper triangular)"
                        )));
                    }
                } else if t[i][j] >= gcd(f[i], f[j]) {
                    return Err(Error::Invalid(format!(
                        "cocycle entry t[{i}][{j}]={} must be below gcd({},{})={}",
                        t[i][j],
                        f[i],
                        f[j],
                        gcd(f[i], f[j])
                    )));
                }
            }
        }
        Ok(Cocycle { group: group.clone(), t })
    }

    pub fn trivial(group: &Group) -> Self {
        let k = group.rank();
        Cocycle { group: group.clone(), t: vec![vec![0; k]; k] }
    }

    /// Parses the config form; an empty matrix means the trivial class.
    pub fn from_spec(group: &Group, spec: &CocycleSpec) -> Result<Self> {
        if spec.t.is_empty() {
            Ok(Self::trivial(group))
        } else {
            Self::new(group, spec.t.clone())
        }
    }

    pub fn spec(&self) -> CocycleSpec {
        CocycleSpec { t: self.t.clone() }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn params(&self) -> &[Vec<usize>] {
        &self.t
    }

    pub fn is_trivial_params(&self) -> bool {
        self.t.iter().flatten().all(|&x| x == 0)
    }

    /// Compact id of the parameter matrix, upper triangle row-major, e.g. `t[1]`.
    pub fn class_id(&self) -> String {
        let k = self.group.rank();
        let entries: Vec<String> = (0..k)
            .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
            .map(|(i, j)| self.t[i][j].to_string())
            .collect();
        format!("t[{}]", entries.join(","))
    }

    /// Phase of `ω(g,h)` in units of `1/exponent`.
    pub fn omega_phase(&self, g: &Element, h: &Element) -> usize {
        let l = self.group.exponent();
        let f = self.group.factors();
        let k = f.len();
        let mut q = 0usize;
        for i in 0..k {
            for j in (i + 1)..k {
                let t = self.t[i][j];
                if t == 0 {
                    continue;
                }
                let m = gcd(f[i], f[j]);
                q += (t * g.0[i] % m) * h.0[j] % m * (l / m);
            }
        }
        q % l
    }

    pub fn omega(&self, g: &Element, h: &Element) -> C64 {
        root_of_unity(self.omega_phase(g, h), self.group.exponent())
    }

    /// Phase of `β(g,h) = ω(g,h)/ω(h,g)` in units of `1/exponent`.
    pub fn beta_phase(&self, g: &Element, h: &Element) -> usize {
        let l = self.group.exponent();
        (self.omega_phase(g, h) + l - self.omega_phase(h, g)) % l
    }

    pub fn beta(&self, g: &Element, h: &Element) -> C64 {
        root_of_unity(self.beta_phase(g, h), self.group.exponent())
    }

    /// Same cohomology class iff the commutator phases agree everywhere.
    pub fn same_class(&self, other: &Cocycle) -> bool {
        self.group == other.group
            && self.group.elements().iter().all(|g| {
                self.group
                    .elements()
                    .iter()
                    .all(|h| self.beta_phase(g, h) == other.beta_phase(g, h))
            })
    }

    /// The same cocycle restricted to a subgroup, as a phase function on members.
    pub fn restricted_centre(&self, h: &Subgroup) -> Subgroup {
        let members = h
            .members()
            .iter()
            .filter(|s| h.members().iter().all(|g| self.beta_phase(g, s) == 0))
            .cloned();
        Subgroup::from_members(h.parent(), members).expect("centre of a subgroup is a subgroup")
    }
}

/// All parameter matrices of a group (one representative per value of `t`).
pub fn all_cocycles(group: &Group) -> Vec<Cocycle> {
    let f = group.factors();
    let k = f.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| ((i + 1)..k).map(move |j| (i, j))).collect();
    let mut out = vec![Cocycle::trivial(group)];
    for &(i, j) in &pairs {
        let m = gcd(f[i], f[j]);
        let mut next = Vec::new();
        for c in &out {
            for v in 0..m {
                let mut t = c.t.clone();
                t[i][j] = v;
                next.push(Cocycle { group: group.clone(), t });
            }
        }
        out = next;
    }
    out
}

/// `k = { s : β(g,s) = 1 ∀ g }`, by exhaustive scan.
pub fn projective_centre(omega: &Cocycle) -> Subgroup {
    omega.restricted_centre(&Subgroup::whole(omega.group()))
}

/// `D_ω = sqrt(|G|/|k|)`.
pub fn d_omega(omega: &Cocycle) -> Result<usize> {
    let ratio = omega.group().order() / projective_centre(omega).order();
    let root = (ratio as f64).sqrt().round() as usize;
    if root * root != ratio {
        return Err(Error::Inconsistent(format!("|G|/|k| = {ratio} is not a perfect square")));
    }
    Ok(root)
}

/// An irreducible projective representation with cocycle ω.
#[derive(Clone, Debug)]
pub struct OmegaIrrep {
    cocycle: Cocycle,
    matrices: Vec<CMat>,
    twist: IrrepLabel,
}

impl OmegaIrrep {
    /// Wraps explicit matrices (indexed by flat element index) after checking
    /// the cocycle relation, unitarity and the trace pattern on the centre.
    pub fn from_matrices(cocycle: &Cocycle, matrices: Vec<CMat>, twist: IrrepLabel) -> Result<Self> {
        let irrep = OmegaIrrep { cocycle: cocycle.clone(), matrices, twist };
        irrep.verify()?;
        Ok(irrep)
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn matrix(&self, g: &Element) -> &CMat {
        &self.matrices[self.cocycle.group().index_of(g)]
    }

    /// Linear character distinguishing this class from the reference irrep.
    pub fn twist(&self) -> &IrrepLabel {
        &self.twist
    }

    pub fn twisted(&self, mu: &IrrepLabel) -> OmegaIrrep {
        let g = self.cocycle.group();
        let matrices = self
            .matrices
            .iter()
            .enumerate()
            .map(|(i, m)| m * g.character_value(mu, g.element(i)))
            .collect();
        OmegaIrrep { cocycle: self.cocycle.clone(), matrices, twist: g.label_product(&self.twist, mu) }
    }

    pub fn traces(&self) -> Vec<C64> {
        self.matrices.iter().map(linalg::trace).collect()
    }

    pub fn verify(&self) -> Result<()> {
        let residual = cocycle_residual(&self.cocycle, &self.matrices);
        if residual > REP_TOL {
            return Err(Error::Inconsistent(format!("cocycle relation violated by {residual:.3e}")));
        }
        let unit = self.matrices.iter().map(linalg::unitarity_defect).fold(0.0, f64::max);
        if unit > REP_TOL {
            return Err(Error::Inconsistent(format!("non-unitary irrep matrix ({unit:.3e})")));
        }
        let k = projective_centre(&self.cocycle);
        let d = d_omega(&self.cocycle)?;
        if self.dim() != d {
            return Err(Error::Dimension(format!("irrep dimension {} but D_ω = {d}", self.dim())));
        }
        for (g, tr) in self.cocycle.group().elements().iter().zip(self.traces()) {
            let expect = if k.contains(g) { d as f64 } else { 0.0 };
            if (tr.norm() - expect).abs() > REP_TOL {
                return Err(Error::Inconsistent(format!("|Tr V({g})| = {} expected {expect}", tr.norm())));
            }
        }
        Ok(())
    }
}

/// `max_{g,h} ‖V(g)V(h) − ω(g,h)V(gh)‖`, exhaustive for `|G| ≤ 64` and on a
/// deterministic sample of pairs beyond.
pub fn cocycle_residual(omega: &Cocycle, matrices: &[CMat]) -> f64 {
    let g = omega.group();
    let n = g.order();
    let pairs: Box<dyn Iterator<Item = (usize, usize)>> = if n <= 64 {
        Box::new((0..n).flat_map(move |a| (0..n).map(move |b| (a, b))))
    } else {
        Box::new((0..4096usize).map(move |k| ((k * 7919) % n, (k * 104_729 + 13) % n)))
    };
    let mut worst = 0.0f64;
    for (a, b) in pairs {
        let (ga, gb) = (g.element(a), g.element(b));
        let ab = g.index_of(&g.compose(ga, gb));
        let lhs = &matrices[a] * &matrices[b];
        let rhs = &matrices[ab] * omega.omega(ga, gb);
        worst = worst.max(linalg::frobenius(&(lhs - rhs)));
    }
    worst
}

/// Normalised projective character overlap `(1/|G|) Σ_g Tr V_a(g) conj(Tr V_b(g))`,
/// equal to 1 for equivalent ω-irreps and 0 otherwise.
pub fn character_overlap(a: &OmegaIrrep, b: &OmegaIrrep) -> C64 {
    let n = a.cocycle.group().order() as f64;
    a.traces().iter().zip(b.traces()).map(|(x, y)| x * y.conj()).sum::<C64>() / n
}

/// `W(g) e_h = ω(g,h) e_{gh}`.
pub fn regular_representation(omega: &Cocycle) -> Vec<CMat> {
    let g = omega.group();
    let n = g.order();
    g.elements()
        .iter()
        .map(|x| {
            let mut w = CMat::zeros(n, n);
            for (hi, h) in g.elements().iter().enumerate() {
                w[(g.index_of(&g.compose(x, h)), hi)] = omega.omega(x, h);
            }
            w
        })
        .collect()
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(i, j)] = C64::new(re, im);
        }
    }
    linalg::hermitian_part(&m)
}

fn extract_irrep(omega: &Cocycle, seed: u64) -> Result<Vec<CMat>> {
    let g = omega.group();
    let n = g.order();
    let d = d_omega(omega)?;
    let w = regular_representation(omega);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = random_hermitian(n, &mut rng);
    let mut s = CMat::zeros(n, n);
    for wg in &w {
        s += wg * &r * wg.adjoint();
    }
    s /= C64::new(n as f64, 0.0);
    let (vals, vecs) = linalg::hermitian_eigh(&s);
    let scale = vals.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
    let tol = 1e-8 * scale;
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || vals[i] - vals[i - 1] > tol {
            clusters.push((start, i));
            start = i;
        }
    }
    if clusters.iter().any(|(a, b)| b - a != d) {
        return Err(Error::Inconsistent(format!(
            "commutant eigenspaces have dimensions {:?}, expected all {d}",
            clusters.iter().map(|(a, b)| b - a).collect::<Vec<_>>()
        )));
    }
    let (a, b) = clusters[0];
    let basis = vecs.columns(a, b - a).into_owned();
    let mut out = Vec::with_capacity(n);
    for wg in &w {
        let v = basis.adjoint() * wg * &basis;
        let defect = linalg::unitarity_defect(&v);
        if defect > UNITARITY_TOL {
            return Err(Error::Inconsistent(format!("restricted matrix not unitary ({defect:.3e})")));
        }
        out.push(linalg::polar_unitary(&v));
    }
    Ok(out)
}

/// Deterministic representative of the twist class: among the `|k|` twists,
/// the one whose central phases `Tr V(s)/D_ω` (s ∈ k) are lexicographically
/// smallest as angles in `[0, 2π)`.
fn canonical_twist(irrep: OmegaIrrep) -> OmegaIrrep {
    let g = irrep.cocycle.group().clone();
    let k = projective_centre(&irrep.cocycle);
    let d = irrep.dim() as f64;
    let key = |x: &OmegaIrrep| -> Vec<i64> {
        k.members()
            .iter()
            .map(|s| {
                let z = linalg::trace(x.matrix(s)) / d;
                let a = z.arg().rem_euclid(std::f64::consts::TAU);
                let q = (a * 1e6).round() as i64;
                if q >= (std::f64::consts::TAU * 1e6).round() as i64 {
                    0
                } else {
                    q
                }
            })
            .collect()
    };
    let mut best: Option<(Vec<i64>, OmegaIrrep)> = None;
    for mu in twist_labels(&g, &k) {
        let cand = irrep.twisted(&mu);
        let kk = key(&cand);
        if best.as_ref().is_none_or(|(b, _)| kk < *b) {
            best = Some((kk, cand));
        }
    }
    let (_, mut out) = best.expect("centre is non-empty");
    out.twist = g.trivial_label();
    out
}

/// Lexicographically smallest labels with pairwise distinct restrictions to `k`.
pub fn twist_labels(group: &Group, k: &Subgroup) -> Vec<IrrepLabel> {
    let mut seen = BTreeSet::new();
    group.labels().into_iter().filter(|a| seen.insert(k.restriction(a))).collect()
}

/// Numerical reference ω-irrep `Ṽ`, extracted from the ω-regular
/// representation and normalised to a canonical twist.
pub fn reference_irrep(omega: &Cocycle, seed: u64) -> Result<OmegaIrrep> {
    let mats = match extract_irrep(omega, seed) {
        Ok(m) => m,
        Err(_) => extract_irrep(omega, seed ^ 0x9e37_79b9_7f4a_7c15)?,
    };
    let irrep = OmegaIrrep::from_matrices(omega, mats, omega.group().trivial_label())?;
    Ok(canonical_twist(irrep))
}

/// The `|k|` inequivalent ω-irreps `μ_a · Ṽ`, class 0 being the reference.
pub fn enumerate_irrep_classes(omega: &Cocycle, reference: &OmegaIrrep) -> Result<Vec<OmegaIrrep>> {
    if reference.cocycle() != omega {
        return Err(Error::Invalid("reference irrep has a different cocycle".into()));
    }
    let k = projective_centre(omega);
    let classes: Vec<OmegaIrrep> = twist_labels(omega.group(), &k)
        .iter()
        .map(|mu| reference.twisted(mu))
        .collect();
    if classes.len() != k.order() {
        return Err(Error::Inconsistent(format!("found {} twist classes, |k| = {}", classes.len(), k.order())));
    }
    for (a, x) in classes.iter().enumerate() {
        for (b, y) in classes.iter().enumerate() {
            let ov = character_overlap(x, y);
            let expect = if a == b { 1.0 } else { 0.0 };
            if (ov - expect).norm() > REP_TOL {
                return Err(Error::Inconsistent(format!("classes {a},{b} overlap {ov}")));
            }
        }
    }
    Ok(classes)
}

/// Placement of one `(class, copy)` irrep block inside `V(g)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub class: usize,
    pub copy: usize,
    pub offset: usize,
    pub dim: usize,
}

/// `V(g) = ⊕_a 1_{n_a} ⊗ V_a(g) = (⊕_a μ_a(g) 1_{n_a}) ⊗ Ṽ(g)`.
#[derive(Clone, Debug)]
pub struct ProjectiveRep {
    cocycle: Cocycle,
    multiplicities: Vec<usize>,
    twists: Vec<IrrepLabel>,
    reference: Vec<CMat>,
    matrices: Vec<CMat>,
    blocks: Vec<Block>,
}

impl ProjectiveRep {
    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn group(&self) -> &Group {
        self.cocycle.group()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn twists(&self) -> &[IrrepLabel] {
        &self.twists
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn reference_matrices(&self) -> &[CMat] {
        &self.reference
    }

    /// `V(g)` by flat element index.
    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn matrix(&self, g: &Element) -> &CMat {
        &self.matrices[self.group().index_of(g)]
    }

    /// Free parameters of the trivially transforming (junk) factor, `Σ_a n_a²`.
    pub fn junk_parameter_count(&self) -> usize {
        self.multiplicities.iter().map(|n| n * n).sum()
    }

    /// Multiply every `V(g)` by the linear character `μ`; same cocycle.
    pub fn twisted(&self, mu: &IrrepLabel) -> ProjectiveRep {
        let g = self.group().clone();
        let mut out = self.clone();
        for (i, m) in out.matrices.iter_mut().enumerate() {
            *m *= g.character_value(mu, g.element(i));
        }
        for t in out.twists.iter_mut() {
            *t = g.label_product(t, mu);
        }
        out
    }

    /// `1_m ⊗ V(g)`: every class multiplicity scaled by `m`.
    pub fn with_identity_factor(&self, m: usize) -> Result<ProjectiveRep> {
        if m == 0 {
            return Err(Error::Invalid("identity factor must have dimension at least 1".into()));
        }
        let dim = self.dim();
        let eye = CMat::identity(m, m);
        let mut blocks = Vec::with_capacity(self.blocks.len() * m);
        for c in 0..m {
            for b in &self.blocks {
                let copy = c * self.multiplicities[b.class] + b.copy;
                blocks.push(Block { class: b.class, copy, offset: c * dim + b.offset, dim: b.dim });
            }
        }
        Ok(ProjectiveRep {
            cocycle: self.cocycle.clone(),
            multiplicities: self.multiplicities.iter().map(|n| n * m).collect(),
            twists: self.twists.clone(),
            reference: self.reference.clone(),
            matrices: self.matrices.iter().map(|v| eye.kronecker(v)).collect(),
            blocks,
        })
    }

    /// Block-diagonal linear representation `diag(χ_{l_0}(g), χ_{l_1}(g), …)`
    /// for the trivial cocycle.
    pub fn diagonal(group: &Group, labels: &[IrrepLabel]) -> Result<ProjectiveRep> {
        if labels.is_empty() {
            return Err(Error::Invalid("diagonal representation needs at least one label".into()));
        }
        for l in labels {
            group.validate_label(l)?;
        }
        let cocycle = Cocycle::trivial(group);
        let all = group.labels();
        let mut multiplicities = vec![0; all.len()];
        let mut blocks = Vec::with_capacity(labels.len());
        for (offset, l) in labels.iter().enumerate() {
            let class = group.label_index(l);
            blocks.push(Block { class, copy: multiplicities[class], offset, dim: 1 });
            multiplicities[class] += 1;
        }
        let matrices = group
            .elements()
            .iter()
            .map(|g| {
                CMat::from_diagonal(&linalg::CVec::from_iterator(
                    labels.len(),
                    labels.iter().map(|l| group.character_value(l, g)),
                ))
            })
            .collect();
        Ok(ProjectiveRep {
            cocycle,
            multiplicities,
            twists: all,
            reference: vec![CMat::identity(1, 1); group.order()],
            matrices,
            blocks,
        })
    }

    /// A single ω-irrep viewed as a representation with multiplicity `[1]`.
    pub fn from_irrep(irrep: &OmegaIrrep) -> ProjectiveRep {
        assemble_rep(std::slice::from_ref(irrep), &[1]).expect("single irrep assembles")
    }
}

pub fn assemble_rep(classes: &[OmegaIrrep], multiplicities: &[usize]) -> Result<ProjectiveRep> {
    let first = classes.first().ok_or_else(|| Error::Invalid("no ω-irrep classes given".into()))?;
    if multiplicities.len() > classes.len() {
        return Err(Error::Invalid(format!(
            "{} multiplicities given for {} irrep classes",
            multiplicities.len(),
            classes.len()
        )));
    }
    if multiplicities.iter().all(|&n| n == 0) {
        return Err(Error::Invalid("at least one multiplicity must be nonzero".into()));
    }
    let cocycle = first.cocycle().clone();
    if classes.iter().any(|c| c.cocycle() != &cocycle) {
        return Err(Error::Invalid("irrep classes with different cocycles".into()));
    }
    let group = cocycle.group().clone();
    let dw = first.dim();
    let mut n = multiplicities.to_vec();
    n.resize(classes.len(), 0);
    let total: usize = n.iter().sum::<usize>() * dw;

    let mut blocks = Vec::new();
    let mut offset = 0;
    for (a, &na) in n.iter().enumerate() {
        for copy in 0..na {
            blocks.push(Block { class: a, copy, offset, dim: dw });
            offset += dw;
        }
    }

    // Ṽ(g) is the reference: class 0 untwisted by its own twist.
    let ref_twist_inv = group.label_inverse(first.twist());
    let reference: Vec<CMat> = first
        .matrices()
        .iter()
        .enumerate()
        .map(|(i, m)| m * group.character_value(&ref_twist_inv, group.element(i)))
        .collect();

    let matrices: Vec<CMat> = (0..group.order())
        .map(|gi| {
            let mut v = CMat::zeros(total, total);
            for b in &blocks {
                v.view_mut((b.offset, b.offset), (dw, dw)).copy_from(&classes[b.class].matrices()[gi]);
            }
            v
        })
        .collect();

    let residual = cocycle_residual(&cocycle, &matrices);
    if residual > REP_TOL {
        return Err(Error::Inconsistent(format!("assembled representation violates cocycle by {residual:.3e}")));
    }
    let mut twists: Vec<IrrepLabel> = classes.iter().map(|c| c.twist().clone()).collect();
    for t in twists.iter_mut() {
        *t = group.label_product(t, &ref_twist_inv);
    }
    Ok(ProjectiveRep { cocycle, multiplicities: n, twists, reference, matrices, blocks })
}

/// Everything needed to build states in one phase: cocycle, classes, `V(g)`.
#[derive(Clone, Debug)]
pub struct PhaseRep {
    pub cocycle: Cocycle,
    pub centre: Subgroup,
    pub d_omega: usize,
    pub classes: Vec<OmegaIrrep>,
    pub rep: Arc<ProjectiveRep>,
}

impl PhaseRep {
    pub fn build(cocycle: &Cocycle, multiplicities: &[usize], seed: u64) -> Result<Self> {
        let reference = reference_irrep(cocycle, seed)?;
        let classes = enumerate_irrep_classes(cocycle, &reference)?;
        let rep = assemble_rep(&classes, multiplicities)?;
        Ok(PhaseRep {
            cocycle: cocycle.clone(),
            centre: projective_centre(cocycle),
            d_omega: reference.dim(),
            classes,
            rep: Arc::new(rep),
        })
    }
}

fn pauli(which: char) -> CMat {
    let i = C64::i();
    match which {
        'x' => CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        'y' => CMat::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        'z' => CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => CMat::identity(2, 2),
    }
}

pub fn pauli_matrices() -> [CMat; 4] {
    [pauli('1'), pauli('x'), pauli('y'), pauli('z')]
}

/// Closed-form Pauli irrep of `Z2×Z2` with `t = [[0,1],[0,0]]`:
/// `V(a,b) = X^b Z^a`, so that `V(g)V(h) = (-1)^{g_0 h_1} V(gh)`.
pub fn pauli_irrep() -> OmegaIrrep {
    let g = Group::new(&[2, 2]).expect("Z2xZ2");
    let omega = Cocycle::new(&g, vec![vec![0, 1], vec![0, 0]]).expect("valid cocycle");
    let mats = g
        .elements()
        .iter()
        .map(|e| pow(&pauli('x'), e.0[1]) * pow(&pauli('z'), e.0[0]))
        .collect();
    OmegaIrrep::from_matrices(&omega, mats, g.trivial_label()).expect("Pauli irrep is valid")
}

/// Closed-form irrep of `Z4×Z2` with `t = [[0,1],[0,0]]`: `V(x,y) = X^y Z^x`.
pub fn clock_shift_z4z2_irrep() -> OmegaIrrep {
    let g = Group::new(&[4, 2]).expect("Z4xZ2");
    let omega = Cocycle::new(&g, vec![vec![0, 1], vec![0, 0]]).expect("valid cocycle");
    let mats = g
        .elements()
        .iter()
        .map(|e| pow(&pauli('x'), e.0[1]) * pow(&pauli('z'), e.0[0]))
        .collect();
    OmegaIrrep::from_matrices(&omega, mats, g.trivial_label()).expect("clock-shift irrep is valid")
}

fn pow(m: &CMat, k: usize) -> CMat {
    (0..k).fold(CMat::identity(m.nrows(), m.ncols()), |acc, _| acc * m)
}
