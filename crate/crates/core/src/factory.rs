//! State families: the cluster state, symmetrised random tensors for named
//! phase presets, the matrix-unit toy state and filter interpolations.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Group, GroupSpec, IrrepLabel};
use crate::linalg::CMat;
use crate::mps::{self, FixedPointData, MpsTensor, SymmetricMps};
use crate::projrep::{pauli_irrep, pauli_matrices, Cocycle, CocycleSpec, PhaseRep, ProjectiveRep};

/// Seed used to extract reference ω-irreps; the result is twist-canonical,
/// so the value only fixes the unitary basis.
pub const REFERENCE_SEED: u64 = 0x5eed_0f_1e9;
/// Resampling attempts after the first draw before giving up.
pub const MAX_RESAMPLES: u64 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhasePreset {
    pub name: String,
    pub group: GroupSpec,
    pub cocycle: CocycleSpec,
    /// Physical multiplicity `m_α` per label, lexicographic label order.
    pub m: Vec<usize>,
    /// Virtual multiplicity `n_a` per ω-irrep class.
    pub n: Vec<usize>,
}

pub const PRESET_NAMES: [&str; 9] = [
    "triv-z2z2",
    "mnc-z2z2",
    "triv-z4z2",
    "nonmnc-z4z2",
    "nonmnc-z4z2-n[1,1]",
    "nonmnc-z4z2-n[1,5]",
    "nonmnc-z4z2-n[3,3]",
    "mnc-z2z2-squared",
    "mnc-z4z4",
];

fn upper(k: usize, pairs: &[(usize, usize, usize)]) -> CocycleSpec {
    let mut t = vec![vec![0; k]; k];
    for &(i, j, v) in pairs {
        t[i][j] = v;
    }
    CocycleSpec { t }
}

pub fn preset(name: &str) -> Result<PhasePreset> {
    let make = |factors: &[usize], t: CocycleSpec, m: usize, n: Vec<usize>| {
        let order: usize = factors.iter().product();
        PhasePreset { name: name.to_string(), group: GroupSpec { factors: factors.to_vec() }, cocycle: t, m: vec![m; order], n }
    };
    let p = match name {
        "triv-z2z2" => make(&[2, 2], upper(2, &[]), 4, vec![2; 4]),
        "mnc-z2z2" => make(&[2, 2], upper(2, &[(0, 1, 1)]), 4, vec![2]),
        "triv-z4z2" => make(&[4, 2], upper(2, &[]), 2, vec![1; 8]),
        "nonmnc-z4z2" => make(&[4, 2], upper(2, &[(0, 1, 1)]), 1, vec![2, 2]),
        "nonmnc-z4z2-n[1,1]" => make(&[4, 2], upper(2, &[(0, 1, 1)]), 1, vec![1, 1]),
        "nonmnc-z4z2-n[1,5]" => make(&[4, 2], upper(2, &[(0, 1, 1)]), 1, vec![1, 5]),
        "nonmnc-z4z2-n[3,3]" => make(&[4, 2], upper(2, &[(0, 1, 1)]), 1, vec![3, 3]),
        "mnc-z2z2-squared" => make(&[2, 2, 2, 2], upper(4, &[(0, 1, 1), (2, 3, 1)]), 1, vec![1]),
        "mnc-z4z4" => make(&[4, 4], upper(2, &[(0, 1, 1)]), 1, vec![1]),
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok(p)
}

impl PhasePreset {
    pub fn group(&self) -> Result<Group> {
        Group::from_spec(&self.group)
    }

    pub fn cocycle(&self) -> Result<Cocycle> {
        Cocycle::from_spec(&self.group()?, &self.cocycle)
    }

    /// Physical labels, `m_α` copies of each `α` in lexicographic order.
    pub fn physical_labels(&self) -> Result<Vec<IrrepLabel>> {
        let group = self.group()?;
        if self.m.len() != group.order() {
            return Err(Error::Dimension(format!("{} physical multiplicities for |G| = {}", self.m.len(), group.order())));
        }
        if self.m.iter().all(|&x| x == 0) {
            return Err(Error::Invalid("physical dimension d must be at least 1".into()));
        }
        Ok(group.labels().into_iter().zip(&self.m).flat_map(|(l, &k)| std::iter::repeat_n(l, k)).collect())
    }

    pub fn d(&self) -> usize {
        self.m.iter().sum()
    }

    pub fn phase_rep(&self) -> Result<PhaseRep> {
        PhaseRep::build(&self.cocycle()?, &self.n, REFERENCE_SEED)
    }

    pub fn sampler(&self) -> Result<Sampler> {
        Ok(Sampler { labels: self.physical_labels()?, phase: self.phase_rep()? })
    }
}

/// Draws symmetric random states for one fixed `(u, V)` pair.
#[derive(Clone, Debug)]
pub struct Sampler {
    pub labels: Vec<IrrepLabel>,
    pub phase: PhaseRep,
}

impl Sampler {
    pub fn d(&self) -> usize {
        self.labels.len()
    }

    pub fn bond_dim(&self) -> usize {
        self.phase.rep.dim()
    }

    pub fn sample(&self, seed: u64) -> Result<SymmetricMps> {
        symmetrize_random(&self.labels, &self.phase.rep, seed)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-sample seed, independent of evaluation order.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

fn gaussian_matrix(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
    CMat::from_fn(dim, dim, |_, _| C64::new(normal.sample(rng), normal.sample(rng)))
}

/// Rescales so the leading transfer eigenvalue is 1; `None` when the tensor
/// is not injective. Returns the fixed points of the rescaled tensor.
fn normalize(tensor: &MpsTensor) -> Result<Option<(MpsTensor, FixedPointData)>> {
    let (report, fp) = mps::injectivity_and_fixed_points(tensor, mps::GAP_TOL)?;
    match fp {
        Some(fp) if report.injective => {
            let s = 1.0 / fp.lambda_max.sqrt();
            Ok(Some((tensor.scaled(s), fp.scaled(s))))
        }
        _ => Ok(None),
    }
}

/// Group average `A^i = Σ_g conj(χ_{α(i)}(g)) V(g) M^i V(g)†` of a complex
/// Gaussian tensor, so that `χ_{α(i)}(g) A^i = V(g) A^i V(g)†`.
pub fn symmetrize_tensor(labels: &[IrrepLabel], rep: &ProjectiveRep, m: &[CMat]) -> Result<MpsTensor> {
    if m.len() != labels.len() {
        return Err(Error::Dimension(format!("{} matrices for {} labels", m.len(), labels.len())));
    }
    let group = rep.group();
    let blocks = m
        .iter()
        .zip(labels)
        .map(|(mi, l)| {
            group
                .elements()
                .iter()
                .zip(rep.matrices())
                .fold(CMat::zeros(rep.dim(), rep.dim()), |acc, (g, v)| {
                    acc + v * mi * v.adjoint() * group.character_value(l, g).conj()
                })
        })
        .collect();
    MpsTensor::new(blocks)
}

/// Symmetrised random state, resampled with derived seeds until injective.
pub fn symmetrize_random(labels: &[IrrepLabel], rep: &Arc<ProjectiveRep>, seed: u64) -> Result<SymmetricMps> {
    if labels.is_empty() {
        return Err(Error::Invalid("physical dimension d must be at least 1".into()));
    }
    for l in labels {
        rep.group().validate_label(l)?;
    }
    for attempt in 0..=MAX_RESAMPLES {
        let s = if attempt == 0 { seed } else { mix_seed(seed, u64::MAX - attempt) };
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let m: Vec<CMat> = labels.iter().map(|_| gaussian_matrix(rep.dim(), &mut rng)).collect();
        if let Some((tensor, fp)) = normalize(&symmetrize_tensor(labels, rep, &m)?)? {
            return SymmetricMps::with_fixed_points(tensor, labels.to_vec(), rep.clone(), fp);
        }
    }
    Err(Error::NotInjective(format!("no injective sample after {} draws from seed {seed}", MAX_RESAMPLES + 1)))
}

/// Physical labels of the cluster tensor blocks `1, σx, σy, σz`.
pub fn cluster_labels() -> Vec<IrrepLabel> {
    [[0, 0], [1, 0], [1, 1], [0, 1]].iter().map(|l| IrrepLabel(l.to_vec())).collect()
}

/// Cluster state: blocks `σ^i / 2` (leading transfer eigenvalue 1), Pauli `V(g)`.
pub fn cluster_state() -> SymmetricMps {
    let tensor = MpsTensor::new(pauli_matrices().iter().map(|p| p.scale(0.5)).collect()).expect("2x2 blocks");
    let rep = Arc::new(ProjectiveRep::from_irrep(&pauli_irrep()));
    SymmetricMps::new(tensor, cluster_labels(), rep).expect("cluster state is symmetric")
}

/// Matrix-unit state `A^{(ij)} = |i⟩⟨j| / √D` with `V = diag(χ_{l_i})`; the
/// physical label of index `i·D + j` is `l_i − l_j`.
pub fn toy_trivial(group: &Group, virtual_labels: &[IrrepLabel]) -> Result<SymmetricMps> {
    let rep = Arc::new(ProjectiveRep::diagonal(group, virtual_labels)?);
    let dim = virtual_labels.len();
    let scale = 1.0 / (dim as f64).sqrt();
    let mut blocks = Vec::with_capacity(dim * dim);
    let mut labels = Vec::with_capacity(dim * dim);
    for (i, li) in virtual_labels.iter().enumerate() {
        for (j, lj) in virtual_labels.iter().enumerate() {
            let mut m = CMat::zeros(dim, dim);
            m[(i, j)] = C64::new(scale, 0.0);
            blocks.push(m);
            labels.push(group.label_product(li, &group.label_inverse(lj)));
        }
    }
    SymmetricMps::new(MpsTensor::new(blocks)?, labels, rep)
}

/// The `D = 4` toy state built from the four characters of `Z2×Z2`.
pub fn toy_trivial_z2z2() -> SymmetricMps {
    let g = Group::new(&[2, 2]).expect("Z2xZ2");
    toy_trivial(&g, &g.labels()).expect("toy state is symmetric")
}

/// Which physical indices a filter leaves at weight 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Keep {
    /// Every physical index carrying one of these labels.
    Labels(Vec<IrrepLabel>),
    /// Explicit physical indices.
    Indices(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub keep: Keep,
    pub lambda: f64,
}

impl FilterSpec {
    pub fn new(keep: Keep, lambda: f64) -> Result<Self> {
        let empty = match &keep {
            Keep::Labels(l) => l.is_empty(),
            Keep::Indices(i) => i.is_empty(),
        };
        if empty {
            return Err(Error::Invalid("filter keep set must be nonempty".into()));
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::Invalid(format!("filter λ = {lambda} outside (0, 1]")));
        }
        Ok(FilterSpec { keep, lambda })
    }

    pub fn weights(&self, labels: &[IrrepLabel]) -> Result<Vec<f64>> {
        match &self.keep {
            Keep::Labels(keep) => Ok(labels.iter().map(|l| if keep.contains(l) { 1.0 } else { self.lambda }).collect()),
            Keep::Indices(keep) => {
                if let Some(&bad) = keep.iter().find(|&&i| i >= labels.len()) {
                    return Err(Error::Invalid(format!("filter index {bad} out of range for d = {}", labels.len())));
                }
                Ok((0..labels.len()).map(|i| if keep.contains(&i) { 1.0 } else { self.lambda }).collect())
            }
        }
    }
}

/// Scales blocks outside the keep set by `λ` and renormalises.
pub fn apply_filter(state: &SymmetricMps, filter: &FilterSpec) -> Result<SymmetricMps> {
    let weights = filter.weights(state.labels())?;
    let (tensor, fp) = normalize(&state.tensor().weighted(&weights)?)?.ok_or_else(|| {
        Error::NotInjective(format!("filtered tensor at λ = {} is not injective", filter.lambda))
    })?;
    SymmetricMps::with_fixed_points(tensor, state.labels().to_vec(), state.rep_arc().clone(), fp)
}

/// Filter used by the toy interpolation: only the matrix unit `|0⟩⟨0|` is kept.
pub fn toy_filter(lambda: f64) -> Result<FilterSpec> {
    FilterSpec::new(Keep::Indices(vec![0]), lambda)
}

/// `n` logarithmically spaced values from `hi` down to `lo`, endpoints exact.
pub fn log_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![hi],
        _ => (0..n)
            .map(|k| match k {
                0 => hi,
                _ if k == n - 1 => lo,
                _ => hi * (lo / hi).powf(k as f64 / (n - 1) as f64),
            })
            .collect(),
    }
}

pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(20, 0.01, 1.0)
}

/// `A^i → B^i ⊗ A^i` with a junk tensor `B` on which the symmetry acts
/// trivially, so `V(g) → 1 ⊗ V(g)`.
pub fn with_junk(state: &SymmetricMps, junk: &[CMat]) -> Result<SymmetricMps> {
    if junk.len() != state.tensor().d() {
        return Err(Error::Dimension(format!("{} junk blocks for d = {}", junk.len(), state.tensor().d())));
    }
    let blocks: Vec<CMat> = junk.iter().zip(state.tensor().blocks()).map(|(b, a)| b.kronecker(a)).collect();
    let rep = state.rep().with_identity_factor(junk[0].nrows())?;
    let (tensor, fp) = normalize(&MpsTensor::new(blocks)?)?
        .ok_or_else(|| Error::NotInjective("junk product is not injective".into()))?;
    SymmetricMps::with_fixed_points(tensor, state.labels().to_vec(), Arc::new(rep), fp)
}
