//! Symmetry-resolved entanglement from fixed-point data: irrep
//! probabilities, accessible and inaccessible entanglement, string order,
//! the `log(|G|/|k|) ≤ E_inacc ≤ log|G|` bounds and subgroup restriction.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, Group, GroupSpec, IrrepLabel, Subgroup};
use crate::linalg::{self, CMat};
use crate::mps::{self, SymmetricMps};
use crate::projrep::{projective_centre, Cocycle, ProjectiveRep};

/// Tolerance on `Σ p_α = 1` beyond which the probabilities are rejected.
pub const SUM_RULE_TOL: f64 = 1e-6;
/// Slack on the entanglement bounds.
pub const BOUND_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FixedPoint,
    Oracle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::FixedPoint => "fixed-point",
            Method::Oracle => "oracle",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Probabilities {
    /// `p_α` in lexicographic label order, clipped to `[0,1]`.
    pub values: Vec<f64>,
    /// `|Σ p_α − 1|` before renormalisation.
    pub sum_deviation: f64,
    /// Smallest raw value before clipping.
    pub min_raw: f64,
}

fn clean_probabilities(raw: Vec<C64>) -> Result<Probabilities> {
    if let Some(z) = raw.iter().find(|z| z.im.abs() > 1e-9) {
        return Err(Error::Inconsistent(format!("irrep probability has imaginary part {:.3e}", z.im)));
    }
    let re: Vec<f64> = raw.iter().map(|z| z.re).collect();
    let min_raw = re.iter().copied().fold(f64::INFINITY, f64::min);
    if min_raw < -1e-9 {
        return Err(Error::Inconsistent(format!("negative irrep probability {min_raw:.3e}")));
    }
    let total: f64 = re.iter().sum();
    let sum_deviation = (total - 1.0).abs();
    if sum_deviation > SUM_RULE_TOL {
        return Err(Error::Inconsistent(format!("irrep probabilities sum to {total}")));
    }
    let mut values: Vec<f64> = re.iter().map(|x| x.clamp(0.0, 1.0)).collect();
    let clipped: f64 = values.iter().sum();
    values.iter_mut().for_each(|x| *x /= clipped);
    Ok(Probabilities { values, sum_deviation, min_raw })
}

/// `s(g) = Tr(ρ_L V(g)) Tr(ρ_L V(g)†)` for every `g`, by flat element index.
fn identity_string_orders(rho_l: &CMat, rep: &ProjectiveRep) -> Vec<C64> {
    rep.matrices()
        .iter()
        .map(|v| linalg::trace_product(rho_l, v) * linalg::trace_product(rho_l, &v.adjoint()))
        .collect()
}

fn fourier(group: &Group, members: &[Element], labels: &[IrrepLabel], s: impl Fn(&Element) -> C64) -> Vec<C64> {
    let n = members.len() as f64;
    let values: Vec<C64> = members.iter().map(&s).collect();
    labels
        .iter()
        .map(|alpha| members.iter().zip(&values).map(|(g, v)| group.character_value(alpha, g) * v).sum::<C64>() / n)
        .collect()
}

/// `p_α = (1/|G|) Σ_g χ_α(g) Tr(ρ_L V(g)) Tr(ρ_L V(g)†)` with `ρ_L` taken in
/// right-canonical gauge; `p_α` is the weight of the block on total charge `α^{-1}`,
/// matching `Tr(Π_α ρ^A)` with `Π_α = (1/|G|) Σ_g χ_α(g) u(g)^{⊗N_A}`.
pub fn irrep_probabilities(rho_l: &CMat, rep: &ProjectiveRep) -> Result<Probabilities> {
    if rho_l.nrows() != rep.dim() {
        return Err(Error::Dimension(format!("ρ_L is {}x{} but V has dimension {}", rho_l.nrows(), rho_l.ncols(), rep.dim())));
    }
    let group = rep.group();
    let s = identity_string_orders(rho_l, rep);
    clean_probabilities(fourier(group, group.elements(), &group.labels(), |g| s[group.index_of(g)]))
}

pub fn inaccessible_entanglement(p: &[f64]) -> f64 {
    linalg::entropy_bits(p)
}

/// `E_acc = E − E_inacc`, clamping round-off below zero.
pub fn accessible_entanglement(e: f64, e_inacc: f64) -> Result<f64> {
    if e < 0.0 {
        return Err(Error::Invalid(format!("negative entanglement {e}")));
    }
    let acc = e - e_inacc;
    if acc < -1e-8 {
        return Err(Error::Inconsistent(format!("E_inacc = {e_inacc} exceeds E = {e}")));
    }
    Ok(acc.max(0.0))
}

/// `s(g, O_A, O_B) = Tr(ρ_L O_A V(g)) Tr(ρ_L O_B V(g)†)`.
pub fn string_order(rho_l: &CMat, rep: &ProjectiveRep, g: &Element, o_a: &CMat, o_b: &CMat) -> Result<C64> {
    let dim = rep.dim();
    for (name, m) in [("ρ_L", rho_l), ("O_A", o_a), ("O_B", o_b)] {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::Dimension(format!("{name} must be {dim}x{dim}")));
        }
    }
    rep.group().validate_element(g)?;
    let v = rep.matrix(g);
    Ok(linalg::trace(&(rho_l * o_a * v)) * linalg::trace(&(rho_l * o_b * v.adjoint())))
}

/// `p_α` rebuilt as the Fourier transform of `s(g, 1, 1)` via [`string_order`].
pub fn probabilities_from_string_order(rho_l: &CMat, rep: &ProjectiveRep) -> Result<Vec<f64>> {
    let group = rep.group();
    let one = linalg::identity(rep.dim());
    let s = group
        .elements()
        .iter()
        .map(|g| string_order(rho_l, rep, g, &one, &one))
        .collect::<Result<Vec<_>>>()?;
    Ok(fourier(group, group.elements(), &group.labels(), |g| s[group.index_of(g)]).iter().map(|z| z.re).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub lower: f64,
    pub upper: f64,
    pub satisfied: bool,
    /// Distance to the nearer bound; negative when violated.
    pub margin: f64,
}

fn bounds_for(order: usize, centre: usize, e_inacc: f64) -> BoundReport {
    let lower = (order as f64 / centre as f64).log2();
    let upper = (order as f64).log2();
    let margin = (e_inacc - lower).min(upper - e_inacc);
    BoundReport { lower, upper, satisfied: margin >= -BOUND_TOL, margin }
}

pub fn bound_report(omega: &Cocycle, e_inacc: f64) -> BoundReport {
    bounds_for(omega.group().order(), projective_centre(omega).order(), e_inacc)
}

/// Labels grouped by their restriction to `k`; each class has `|G|/|k|` members.
pub fn degeneracy_classes(group: &Group, k: &Subgroup) -> Vec<Vec<IrrepLabel>> {
    let mut classes: Vec<(Vec<usize>, Vec<IrrepLabel>)> = Vec::new();
    for alpha in group.labels() {
        let key = k.restriction(&alpha);
        match classes.iter_mut().find(|(r, _)| *r == key) {
            Some((_, members)) => members.push(alpha),
            None => classes.push((key, vec![alpha])),
        }
    }
    classes.into_iter().map(|(_, m)| m).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residuals {
    pub sum_deviation: f64,
    pub min_p_raw: f64,
    /// `max_α |p_α − FT[s(g,1,1)]_α|`.
    pub fourier: f64,
    /// `|E − E_acc − H(p)|` on the oracle path; zero by construction otherwise.
    pub entropy_identity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SptReport {
    pub group: GroupSpec,
    pub cocycle: String,
    /// Irrep labels in the order of `p` (all of `G`, or representatives for a subgroup).
    pub labels: Vec<IrrepLabel>,
    pub p: Vec<f64>,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E_acc")]
    pub e_acc: f64,
    #[serde(rename = "E_inacc")]
    pub e_inacc: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub bound_satisfied: bool,
    pub degeneracy_classes: Vec<Vec<IrrepLabel>>,
    pub residuals: Residuals,
    pub method: Method,
    pub seed: Option<u64>,
    pub lambda: Option<f64>,
}

impl SptReport {
    pub fn with_meta(mut self, seed: Option<u64>, lambda: Option<f64>) -> Self {
        self.seed = seed;
        self.lambda = lambda;
        self
    }

    pub fn probability(&self, label: &IrrepLabel) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.p[i])
    }
}

/// Full fixed-point analysis of one state.
pub fn analyze(state: &SymmetricMps) -> Result<SptReport> {
    let canon = state.canonical()?;
    let rep = state.rep();
    let group = rep.group();
    let (_, e) = mps::entanglement_entropy(&canon.spectrum)?;
    let probs = irrep_probabilities(&canon.rho_l, rep)?;
    let from_string = probabilities_from_string_order(&canon.rho_l, rep)?;
    let fourier = probs.values.iter().zip(&from_string).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let e_inacc = inaccessible_entanglement(&probs.values);
    let e_acc = accessible_entanglement(e, e_inacc)?;
    let bounds = bound_report(rep.cocycle(), e_inacc);
    Ok(SptReport {
        group: group.spec(),
        cocycle: rep.cocycle().class_id(),
        labels: group.labels(),
        p: probs.values,
        e,
        e_acc,
        e_inacc,
        lower_bound: bounds.lower,
        upper_bound: bounds.upper,
        bound_satisfied: bounds.satisfied,
        degeneracy_classes: degeneracy_classes(group, &projective_centre(rep.cocycle())),
        residuals: Residuals {
            sum_deviation: probs.sum_deviation,
            min_p_raw: probs.min_raw,
            fourier,
            entropy_identity: 0.0,
        },
        method: Method::FixedPoint,
        seed: None,
        lambda: None,
    })
}

/// The same report computed on a finite periodic chain of `n` sites with
/// block `1..n_a`, using the Gram-matrix oracle.
pub fn analyze_oracle(state: &SymmetricMps, n: usize, n_a: usize) -> Result<SptReport> {
    let rep = state.rep();
    let group = rep.group();
    let s = mps::gram_sector_analysis(state.tensor(), state.labels(), group, n, n_a)?;
    let bounds = bound_report(rep.cocycle(), s.e_inacc);
    let min_p_raw = s.probabilities.iter().copied().fold(f64::INFINITY, f64::min);
    let total: f64 = s.probabilities.iter().sum();
    Ok(SptReport {
        group: group.spec(),
        cocycle: rep.cocycle().class_id(),
        labels: group.labels(),
        p: s.probabilities.iter().map(|x| x.clamp(0.0, 1.0)).collect(),
        e: s.e,
        e_acc: s.e_acc,
        e_inacc: s.e_inacc,
        lower_bound: bounds.lower,
        upper_bound: bounds.upper,
        bound_satisfied: bounds.satisfied,
        degeneracy_classes: degeneracy_classes(group, &projective_centre(rep.cocycle())),
        residuals: Residuals {
            sum_deviation: (total - 1.0).abs(),
            min_p_raw,
            fourier: 0.0,
            entropy_identity: s.identity_residual,
        },
        method: Method::Oracle,
        seed: None,
        lambda: None,
    })
}

/// Irrep probabilities over the `|H|` irreps of a subgroup `H`, with bounds
/// from the projective centre of the restricted cocycle inside `H`.
pub fn subgroup_analysis(state: &SymmetricMps, h: &Subgroup) -> Result<SptReport> {
    let rep = state.rep();
    let group = rep.group();
    if h.parent() != group {
        return Err(Error::Invalid("subgroup belongs to a different group".into()));
    }
    let canon = state.canonical()?;
    let (_, e) = mps::entanglement_entropy(&canon.spectrum)?;
    let s = identity_string_orders(&canon.rho_l, rep);
    let labels = h.irrep_labels();
    let probs = clean_probabilities(fourier(group, h.members(), &labels, |g| s[group.index_of(g)]))?;
    let e_inacc = inaccessible_entanglement(&probs.values);
    let e_acc = accessible_entanglement(e, e_inacc)?;
    let k_h = rep.cocycle().restricted_centre(h);
    let bounds = bounds_for(h.order(), k_h.order(), e_inacc);
    let classes: Vec<Vec<IrrepLabel>> = {
        let mut out: Vec<(Vec<usize>, Vec<IrrepLabel>)> = Vec::new();
        for alpha in &labels {
            let key = k_h.restriction(alpha);
            match out.iter_mut().find(|(r, _)| *r == key) {
                Some((_, m)) => m.push(alpha.clone()),
                None => out.push((key, vec![alpha.clone()])),
            }
        }
        out.into_iter().map(|(_, m)| m).collect()
    };
    Ok(SptReport {
        group: group.spec(),
        cocycle: rep.cocycle().class_id(),
        labels,
        p: probs.values,
        e,
        e_acc,
        e_inacc,
        lower_bound: bounds.lower,
        upper_bound: bounds.upper,
        bound_satisfied: bounds.satisfied,
        degeneracy_classes: classes,
        residuals: Residuals { sum_deviation: probs.sum_deviation, min_p_raw: probs.min_raw, fourier: 0.0, entropy_identity: 0.0 },
        method: Method::FixedPoint,
        seed: None,
        lambda: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projrep::{pauli_irrep, Cocycle};

    fn el(v: &[usize]) -> Element {
        Element(v.to_vec())
    }

    #[test]
    fn cluster_like_probabilities_are_uniform() {
        let rep = ProjectiveRep::from_irrep(&pauli_irrep());
        let rho = linalg::identity(2).scale(0.5);
        let p = irrep_probabilities(&rho, &rep).unwrap();
        for x in &p.values {
            assert!((x - 0.25).abs() < 1e-15);
        }
        assert!((inaccessible_entanglement(&p.values) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn trivial_rep_gives_delta() {
        let g = Group::new(&[2, 2]).unwrap();
        let rep = ProjectiveRep::diagonal(&g, &[g.trivial_label()]).unwrap();
        let p = irrep_probabilities(&linalg::identity(1), &rep).unwrap();
        assert_eq!(p.values, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn sum_rule_violation_is_an_error() {
        let rep = ProjectiveRep::from_irrep(&pauli_irrep());
        assert!(irrep_probabilities(&linalg::identity(2), &rep).is_err());
        assert!(irrep_probabilities(&linalg::identity(3), &rep).is_err());
    }

    #[test]
    fn inaccessible_examples() {
        assert!((inaccessible_entanglement(&[0.25; 4]) - 2.0).abs() < 1e-15);
        assert_eq!(inaccessible_entanglement(&[1.0, 0.0, 0.0, 0.0]), 0.0);
        assert!((inaccessible_entanglement(&[0.125; 8]) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn accessible_examples() {
        assert_eq!(accessible_entanglement(2.0, 2.0).unwrap(), 0.0);
        assert_eq!(accessible_entanglement(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(accessible_entanglement(2.0, 2.0 + 5e-9).unwrap(), 0.0);
        assert!(accessible_entanglement(2.0, 2.1).is_err());
        assert!(accessible_entanglement(-1.0, 0.0).is_err());
    }

    #[test]
    fn string_order_examples() {
        let rep = ProjectiveRep::from_irrep(&pauli_irrep());
        let rho = linalg::identity(2).scale(0.5);
        let one = linalg::identity(2);
        let s = string_order(&rho, &rep, &el(&[0, 0]), &one, &one).unwrap();
        assert!((s - 1.0).norm() < 1e-15);
        for g in [el(&[0, 1]), el(&[1, 0]), el(&[1, 1])] {
            assert!(string_order(&rho, &rep, &g, &one, &one).unwrap().norm() < 1e-15);
        }
        assert!(string_order(&rho, &rep, &el(&[0, 0]), &linalg::identity(3), &one).is_err());
    }

    #[test]
    fn bound_examples() {
        let z2z2 = Group::new(&[2, 2]).unwrap();
        let mnc = Cocycle::new(&z2z2, vec![vec![0, 1], vec![0, 0]]).unwrap();
        let b = bound_report(&mnc, 2.0);
        assert_eq!((b.lower, b.upper), (2.0, 2.0));
        assert!(b.satisfied);
        let b = bound_report(&Cocycle::trivial(&z2z2), 1.0);
        assert_eq!((b.lower, b.upper), (0.0, 2.0));
        let z4z2 = Group::new(&[4, 2]).unwrap();
        let non = Cocycle::new(&z4z2, vec![vec![0, 1], vec![0, 0]]).unwrap();
        let b = bound_report(&non, 1.9);
        assert_eq!((b.lower, b.upper), (2.0, 3.0));
        assert!(!b.satisfied);
    }

    #[test]
    fn degeneracy_class_examples() {
        let z4z2 = Group::new(&[4, 2]).unwrap();
        let non = Cocycle::new(&z4z2, vec![vec![0, 1], vec![0, 0]]).unwrap();
        let classes = degeneracy_classes(&z4z2, &projective_centre(&non));
        assert_eq!(classes.len(), 2);
        assert!(classes.iter().all(|c| c.len() == 4));
        // brute force: α and β in the same class iff χ_α(s) = χ_β(s) on k = {(0,0),(2,0)}
        for c in &classes {
            for a in c {
                for b in c {
                    let s = el(&[2, 0]);
                    assert!((z4z2.character_value(a, &s) - z4z2.character_value(b, &s)).norm() < 1e-12);
                }
            }
        }
        let z2z2 = Group::new(&[2, 2]).unwrap();
        let mnc = Cocycle::new(&z2z2, vec![vec![0, 1], vec![0, 0]]).unwrap();
        // k trivial: every label has the same restriction, one class of |G|
        let mnc_classes = degeneracy_classes(&z2z2, &projective_centre(&mnc));
        assert_eq!(mnc_classes.len(), 1);
        assert_eq!(mnc_classes[0].len(), 4);
        // k = G: restrictions are the characters themselves, |G| singletons
        let triv = degeneracy_classes(&z2z2, &projective_centre(&Cocycle::trivial(&z2z2)));
        assert_eq!(triv.len(), 4);
        assert!(triv.iter().all(|c| c.len() == 1));
    }
}
