//! Finite Abelian groups `Z_{n_1} × … × Z_{n_k}`, their characters and
//! subgroups.
//!
//! Elements and irrep labels are residue tuples. Character values are kept
//! as exact integer phases `q` with `χ = exp(2πi q / L)`, where `L` is the
//! lcm of the factors, so equality of restricted characters is decided
//! exactly; the complex value is only formed on demand.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on |G| for explicit enumeration.
pub const MAX_ORDER: usize = 4096;
/// Largest group for which a dense character table is cached.
pub const MAX_TABLE_ORDER: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub Vec<usize>);

/// Label `α` of the linear irrep `χ_α(g) = exp(2πi Σ_j α_j g_j / n_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IrrepLabel(pub Vec<usize>);

fn fmt_tuple(f: &mut fmt::Formatter<'_>, v: &[usize]) -> fmt::Result {
    write!(f, "[")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, "]")
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuple(f, &self.0)
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuple(f, &self.0)
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// `exp(2πi q / modulus)`.
pub fn root_of_unity(q: usize, modulus: usize) -> C64 {
    C64::from_polar(1.0, TAU * (q % modulus) as f64 / modulus as f64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub factors: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Group {
    factors: Vec<usize>,
    exponent: usize,
    elements: Vec<Element>,
    table: Option<Vec<usize>>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl Eq for Group {}

impl Group {
    pub fn new(factors: &[usize]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Invalid("group needs at least one cyclic factor".into()));
        }
        if factors.contains(&0) {
            return Err(Error::Invalid("cyclic factor Z_0 is not finite".into()));
        }
        let order = factors
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n).filter(|&o| o <= MAX_ORDER))
            .ok_or_else(|| Error::TooLarge(format!("|G| exceeds {MAX_ORDER}")))?;
        let exponent = factors.iter().fold(1, |acc, &n| lcm(acc, n));
        let elements = (0..order).map(|i| Element(mixed_radix(factors, i))).collect();
        let mut g = Group { factors: factors.to_vec(), exponent, elements, table: None };
        if order <= MAX_TABLE_ORDER {
            let mut table = Vec::with_capacity(order * order);
            for a in 0..order {
                for x in 0..order {
                    table.push(g.phase_raw(&g.elements[a].0, &g.elements[x].0));
                }
            }
            g.table = Some(table);
        }
        Ok(g)
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        Self::new(&spec.factors)
    }

    pub fn spec(&self) -> GroupSpec {
        GroupSpec { factors: self.factors.clone() }
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// lcm of the factors; all character phases are multiples of `1/exponent`.
    pub fn exponent(&self) -> usize {
        self.exponent
    }

    /// Lexicographic enumeration; index 0 is the identity.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> &Element {
        &self.elements[index]
    }

    /// Irrep labels in the same lexicographic order as the elements.
    pub fn labels(&self) -> Vec<IrrepLabel> {
        self.elements.iter().map(|e| IrrepLabel(e.0.clone())).collect()
    }

    pub fn identity(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    pub fn trivial_label(&self) -> IrrepLabel {
        IrrepLabel(vec![0; self.rank()])
    }

    fn check(&self, v: &[usize], what: &str) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::Dimension(format!(
                "{what} has {} residues, group has {} factors",
                v.len(),
                self.rank()
            )));
        }
        if let Some((r, n)) = v.iter().zip(&self.factors).find(|(r, n)| *r >= *n) {
            return Err(Error::Invalid(format!("{what} residue {r} out of range for Z_{n}")));
        }
        Ok(())
    }

    pub fn validate_element(&self, g: &Element) -> Result<()> {
        self.check(&g.0, "element")
    }

    pub fn validate_label(&self, a: &IrrepLabel) -> Result<()> {
        self.check(&a.0, "irrep label")
    }

    /// Mixed-radix flat index (last factor fastest).
    pub fn index_of(&self, g: &Element) -> usize {
        g.0.iter().zip(&self.factors).fold(0, |acc, (&r, &n)| acc * n + r)
    }

    pub fn label_index(&self, a: &IrrepLabel) -> usize {
        a.0.iter().zip(&self.factors).fold(0, |acc, (&r, &n)| acc * n + r)
    }

    pub fn compose(&self, a: &Element, b: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        )
    }

    pub fn inverse(&self, a: &Element) -> Element {
        Element(a.0.iter().zip(&self.factors).map(|(x, n)| (n - x) % n).collect())
    }

    /// `g^k` written additively.
    pub fn power(&self, a: &Element, k: usize) -> Element {
        Element(a.0.iter().zip(&self.factors).map(|(x, n)| (x * k) % n).collect())
    }

    /// Product of labels, `χ_{a·b} = χ_a χ_b`.
    pub fn label_product(&self, a: &IrrepLabel, b: &IrrepLabel) -> IrrepLabel {
        IrrepLabel(self.compose(&Element(a.0.clone()), &Element(b.0.clone())).0)
    }

    pub fn label_inverse(&self, a: &IrrepLabel) -> IrrepLabel {
        IrrepLabel(self.inverse(&Element(a.0.clone())).0)
    }

    fn phase_raw(&self, alpha: &[usize], g: &[usize]) -> usize {
        let l = self.exponent;
        alpha
            .iter()
            .zip(g)
            .zip(&self.factors)
            .map(|((a, x), n)| (a * x % n) * (l / n))
            .sum::<usize>()
            % l
    }

    /// Integer phase `q` with `χ_α(g) = exp(2πi q / exponent)`.
    pub fn character_phase(&self, alpha: &IrrepLabel, g: &Element) -> usize {
        match &self.table {
            Some(t) => t[self.label_index(alpha) * self.order() + self.index_of(g)],
            None => self.phase_raw(&alpha.0, &g.0),
        }
    }

    /// Character value by flat label/element indices.
    pub fn character_at(&self, alpha: usize, g: usize) -> C64 {
        let q = match &self.table {
            Some(t) => t[alpha * self.order() + g],
            None => self.phase_raw(&self.elements[alpha].0, &self.elements[g].0),
        };
        root_of_unity(q, self.exponent)
    }

    pub fn character_value(&self, alpha: &IrrepLabel, g: &Element) -> C64 {
        root_of_unity(self.character_phase(alpha, g), self.exponent)
    }

    /// Checked character evaluation.
    pub fn character(&self, alpha: &IrrepLabel, g: &Element) -> Result<C64> {
        self.validate_label(alpha)?;
        self.validate_element(g)?;
        Ok(self.character_value(alpha, g))
    }
}

fn mixed_radix(factors: &[usize], mut index: usize) -> Vec<usize> {
    let mut out = vec![0; factors.len()];
    for (slot, &n) in out.iter_mut().zip(factors).rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    parent: Group,
    members: Vec<Element>,
}

impl Subgroup {
    /// Builds a subgroup from an explicit member list; closure is verified.
    pub fn from_members(parent: &Group, members: impl IntoIterator<Item = Element>) -> Result<Self> {
        let set: BTreeSet<Element> = members.into_iter().collect();
        for m in &set {
            parent.validate_element(m)?;
        }
        if !set.contains(&parent.identity()) {
            return Err(Error::Invalid("subgroup must contain the identity".into()));
        }
        for a in &set {
            for b in &set {
                if !set.contains(&parent.compose(a, b)) {
                    return Err(Error::Invalid(format!("member set not closed: {a}+{b}")));
                }
            }
        }
        Ok(Subgroup { parent: parent.clone(), members: set.into_iter().collect() })
    }

    pub fn whole(parent: &Group) -> Self {
        Subgroup { parent: parent.clone(), members: parent.elements().to_vec() }
    }

    pub fn trivial(parent: &Group) -> Self {
        Subgroup { parent: parent.clone(), members: vec![parent.identity()] }
    }

    pub fn parent(&self) -> &Group {
        &self.parent
    }

    /// Sorted members; the identity is first.
    pub fn members(&self) -> &[Element] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.members.binary_search(g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.parent == other.parent && self.members.iter().all(|m| other.contains(m))
    }

    /// Integer phases of `χ_α` on the members, in member order.
    pub fn restriction(&self, alpha: &IrrepLabel) -> Vec<usize> {
        self.members.iter().map(|g| self.parent.character_phase(alpha, g)).collect()
    }

    /// Irreps of the subgroup, represented by the lexicographically smallest
    /// parent label with each distinct restriction. Exactly `|H|` labels.
    pub fn irrep_labels(&self) -> Vec<IrrepLabel> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(self.order());
        for alpha in self.parent.labels() {
            if seen.insert(self.restriction(&alpha)) {
                out.push(alpha);
            }
        }
        out
    }
}

/// Closure of `gens` under composition. An empty generator list gives `{e}`.
pub fn subgroup_from_generators(group: &Group, gens: &[Element]) -> Result<Subgroup> {
    for g in gens {
        group.validate_element(g)?;
    }
    let mut members: BTreeSet<Element> = BTreeSet::new();
    members.insert(group.identity());
    let mut frontier = vec![group.identity()];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = group.compose(&x, g);
            if members.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    Ok(Subgroup { parent: group.clone(), members: members.into_iter().collect() })
}

pub fn make_group(factors: &[usize]) -> Result<Group> {
    Group::new(factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(v: &[usize]) -> Element {
        Element(v.to_vec())
    }

    fn lab(v: &[usize]) -> IrrepLabel {
        IrrepLabel(v.to_vec())
    }

    #[test]
    fn orders_of_named_groups() {
        assert_eq!(Group::new(&[2, 2]).unwrap().order(), 4);
        assert_eq!(Group::new(&[4, 2]).unwrap().order(), 8);
        let triv = Group::new(&[1]).unwrap();
        assert_eq!(triv.order(), 1);
        assert_eq!(triv.element(0), &triv.identity());
    }

    #[test]
    fn rejects_bad_factor_lists() {
        assert!(matches!(Group::new(&[]), Err(Error::Invalid(_))));
        assert!(matches!(Group::new(&[3, 0]), Err(Error::Invalid(_))));
        assert!(matches!(Group::new(&[64, 64, 2]), Err(Error::TooLarge(_))));
    }

    #[test]
    fn enumeration_is_lexicographic_and_indexed() {
        let g = Group::new(&[4, 2]).unwrap();
        let els = g.elements();
        assert_eq!(els[0], el(&[0, 0]));
        assert_eq!(els[1], el(&[0, 1]));
        assert_eq!(els[2], el(&[1, 0]));
        assert!(els.windows(2).all(|w| w[0] < w[1]));
        for (i, e) in els.iter().enumerate() {
            assert_eq!(g.index_of(e), i);
        }
    }

    #[test]
    fn group_axioms_exhaustive() {
        for factors in [vec![2, 2], vec![4, 2], vec![3, 5], vec![4, 4, 2], vec![2, 2, 2, 2]] {
            let g = Group::new(&factors).unwrap();
            let e = g.identity();
            for a in g.elements() {
                assert_eq!(g.compose(a, &e), *a);
                assert_eq!(g.compose(a, &g.inverse(a)), e);
                for b in g.elements() {
                    assert_eq!(g.compose(a, b), g.compose(b, a));
                    for c in g.elements().iter().take(8) {
                        assert_eq!(g.compose(&g.compose(a, b), c), g.compose(a, &g.compose(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn z4z2_character_example() {
        let g = Group::new(&[4, 2]).unwrap();
        let v = g.character(&lab(&[1, 1]), &el(&[1, 1])).unwrap();
        assert!((v - C64::new(0.0, -1.0)).norm() < 1e-15);
        // (i)^{αx} (-1)^{βy}
        for a in g.labels() {
            for x in g.elements() {
                let expect = C64::i().powu((a.0[0] * x.0[0]) as u32) * (-1f64).powi((a.0[1] * x.0[1]) as i32);
                assert!((g.character_value(&a, x) - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn trivial_label_gives_one() {
        let g = Group::new(&[3, 6]).unwrap();
        for x in g.elements() {
            assert!((g.character_value(&g.trivial_label(), x) - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn character_errors_on_shape() {
        let g = Group::new(&[4, 2]).unwrap();
        assert!(matches!(g.character(&lab(&[1]), &el(&[0, 0])), Err(Error::Dimension(_))));
        assert!(matches!(g.character(&lab(&[0, 0]), &el(&[4, 0])), Err(Error::Invalid(_))));
    }

    /// Brute-force oracle: the Klein-four homomorphisms to {±1} are the four
    /// sign assignments on the two generators.
    #[test]
    fn klein_four_table_matches_homomorphism_enumeration() {
        let g = Group::new(&[2, 2]).unwrap();
        let mut homs: Vec<Vec<f64>> = Vec::new();
        for s0 in [1.0, -1.0] {
            for s1 in [1.0, -1.0] {
                let f: Vec<f64> = g
                    .elements()
                    .iter()
                    .map(|x| f64::powi(s0, x.0[0] as i32) * f64::powi(s1, x.0[1] as i32))
                    .collect();
                for a in g.elements() {
                    for b in g.elements() {
                        let ab = g.index_of(&g.compose(a, b));
                        assert_eq!(f[ab], f[g.index_of(a)] * f[g.index_of(b)]);
                    }
                }
                homs.push(f);
            }
        }
        for alpha in g.labels() {
            let row: Vec<C64> = g.elements().iter().map(|x| g.character_value(&alpha, x)).collect();
            assert!(row.iter().all(|z| z.im.abs() < 1e-15));
            let real: Vec<f64> = row.iter().map(|z| z.re.round()).collect();
            assert!(homs.contains(&real), "row {real:?} not a homomorphism");
        }
    }

    #[test]
    fn row_orthogonality_all_small_groups() {
        let mut shapes = vec![vec![1], vec![2, 2], vec![4, 2], vec![4, 4], vec![2, 2, 2, 2], vec![3, 4], vec![64]];
        shapes.push(vec![2, 4, 8]);
        for f in shapes {
            let g = Group::new(&f).unwrap();
            let n = g.order();
            for a in 0..n {
                for b in 0..n {
                    let s: C64 = (0..n).map(|x| g.character_at(a, x) * g.character_at(b, x).conj()).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((s / n as f64 - expect).norm() < 1e-12, "{f:?} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn subgroup_examples() {
        let g = Group::new(&[4, 2]).unwrap();
        let h = subgroup_from_generators(&g, &[el(&[2, 0]), el(&[0, 1])]).unwrap();
        assert_eq!(h.order(), 4);
        assert_eq!(subgroup_from_generators(&g, &[]).unwrap().members(), &[el(&[0, 0])]);
        let c4 = subgroup_from_generators(&g, &[el(&[1, 0])]).unwrap();
        // oracle: repeated composition of the generator
        let mut expect = vec![];
        let mut x = g.identity();
        for _ in 0..4 {
            expect.push(x.clone());
            x = g.compose(&x, &el(&[1, 0]));
        }
        expect.sort();
        assert_eq!(c4.members(), expect.as_slice());
    }

    #[test]
    fn subgroup_irreps_count_and_distinct() {
        let g = Group::new(&[4, 4]).unwrap();
        let squares = subgroup_from_generators(&g, &[el(&[2, 0]), el(&[0, 2])]).unwrap();
        let irreps = squares.irrep_labels();
        assert_eq!(irreps.len(), 4);
        assert_eq!(irreps[0], g.trivial_label());
    }

    #[test]
    fn from_members_rejects_non_subgroup() {
        let g = Group::new(&[4]).unwrap();
        assert!(Subgroup::from_members(&g, [el(&[0]), el(&[1])]).is_err());
        assert!(Subgroup::from_members(&g, [el(&[0]), el(&[2])]).is_ok());
    }

    proptest! {
        #[test]
        fn character_is_homomorphism(
            factors in prop::collection::vec(1usize..9, 1..4),
            seed in any::<u64>(),
        ) {
            let g = Group::new(&factors).unwrap();
            let n = g.order();
            let pick = |k: u64| (seed.wrapping_mul(6364136223846793005).wrapping_add(k) >> 7) as usize % n;
            for t in 0..40u64 {
                let a = &g.labels()[pick(3 * t)];
                let x = g.element(pick(3 * t + 1));
                let y = g.element(pick(3 * t + 2));
                let lhs = g.character_value(a, &g.compose(x, y));
                let rhs = g.character_value(a, x) * g.character_value(a, y);
                prop_assert!((lhs - rhs).norm() < 1e-12);
                prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn lagrange_for_generated_subgroups(
            factors in prop::collection::vec(1usize..7, 1..4),
            picks in prop::collection::vec(any::<usize>(), 0..3),
        ) {
            let g = Group::new(&factors).unwrap();
            let gens: Vec<Element> = picks.iter().map(|p| g.element(p % g.order()).clone()).collect();
            let h = subgroup_from_generators(&g, &gens).unwrap();
            prop_assert_eq!(g.order() % h.order(), 0);
            prop_assert!(h.contains(&g.identity()));
            for a in h.members() {
                prop_assert!(h.contains(&g.inverse(a)));
            }
            prop_assert_eq!(h.irrep_labels().len(), h.order());
        }
    }
}
