//! Finite cyclic and dihedral groups: elements, conjugacy classes,
//! irreducible character tables, the standard planar representation τ, and
//! character arithmetic.
//!
//! Elements are kept in the canonical form `r^a s^b` with `0 ≤ a < m` and
//! `b ∈ {0, 1}` (`b = 0` always for cyclic groups), multiplying by
//! `s r = r⁻¹ s`. The standard representation sends `r` to the rotation by
//! `2π/m` and `s` to the reflection across a configurable axis.

use std::sync::Arc;

use thiserror::Error;

use crate::numerics::{Mat, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic,
    Dihedral,
}

/// `r^rotation s^reflection` in canonical form; the identity is `(0, false)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub rotation: u32,
    pub reflection: bool,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { rotation: 0, reflection: false };

    pub fn is_identity(&self) -> bool {
        self.rotation == 0 && !self.reflection
    }
}

#[derive(Clone, Debug)]
pub struct ConjugacyClass {
    pub representative: GroupElement,
    /// Indices into the group's element list.
    pub members: Vec<usize>,
}

/// A cyclic group ℤ_m or dihedral group D_{2m} with its conjugacy classes.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub kind: GroupKind,
    /// Rotation order: |G| = m for cyclic, 2m for dihedral.
    pub m: u32,
    /// Angle (degrees) of the reflection axis realized by τ(s).
    pub axis_degrees: f64,
    elements: Vec<GroupElement>,
    classes: Vec<ConjugacyClass>,
}

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("group order parameter must be at least 1, got {0}")]
    BadOrder(u32),
    #[error("character multiplicities are not nonnegative integers: {0:?}")]
    NotIntegral(Vec<Scalar>),
}

/// Construct ℤ_m (cyclic) or D_{2m} (dihedral) with the standard conjugacy
/// classes. The reflection axis of τ defaults to the x-axis; use
/// [`build_group_with_axis`] to realize mirrors about another line.
pub fn build_group(kind: GroupKind, m: u32) -> Result<GroupSpec, GroupError> {
    build_group_with_axis(kind, m, 0.0)
}

pub fn build_group_with_axis(
    kind: GroupKind,
    m: u32,
    axis_degrees: f64,
) -> Result<GroupSpec, GroupError> {
    if m < 1 {
        return Err(GroupError::BadOrder(m));
    }
    let mut elements = Vec::new();
    for a in 0..m {
        elements.push(GroupElement { rotation: a, reflection: false });
    }
    if kind == GroupKind::Dihedral {
        for a in 0..m {
            elements.push(GroupElement { rotation: a, reflection: true });
        }
    }

    let index_of = |g: GroupElement| -> usize {
        (if g.reflection { m + g.rotation } else { g.rotation }) as usize
    };
    let mut classes = Vec::new();
    match kind {
        GroupKind::Cyclic => {
            for a in 0..m {
                let g = GroupElement { rotation: a, reflection: false };
                classes.push(ConjugacyClass { representative: g, members: vec![index_of(g)] });
            }
        }
        GroupKind::Dihedral => {
            // Rotation classes {r^k, r^{-k}}; reflection classes split by the
            // parity of the rotation part when m is even.
            classes.push(ConjugacyClass {
                representative: GroupElement::IDENTITY,
                members: vec![0],
            });
            for k in 1..=(m / 2) {
                let g = GroupElement { rotation: k, reflection: false };
                let inverse = GroupElement { rotation: (m - k) % m, reflection: false };
                let mut members = vec![index_of(g)];
                if inverse != g {
                    members.push(index_of(inverse));
                }
                classes.push(ConjugacyClass { representative: g, members });
            }
            if m % 2 == 1 {
                let members = (0..m)
                    .map(|a| index_of(GroupElement { rotation: a, reflection: true }))
                    .collect();
                classes.push(ConjugacyClass {
                    representative: GroupElement { rotation: 0, reflection: true },
                    members,
                });
            } else {
                for parity in 0..2u32 {
                    let members = (0..m)
                        .filter(|a| a % 2 == parity)
                        .map(|a| index_of(GroupElement { rotation: a, reflection: true }))
                        .collect();
                    classes.push(ConjugacyClass {
                        representative: GroupElement { rotation: parity, reflection: true },
                        members,
                    });
                }
            }
        }
    }
    let group = GroupSpec { kind, m, axis_degrees, elements, classes };
    debug_assert_eq!(
        group.classes.iter().map(|c| c.members.len()).sum::<usize>(),
        group.order()
    );
    Ok(group)
}

impl GroupSpec {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn element_index(&self, g: GroupElement) -> usize {
        (if g.reflection { self.m + g.rotation } else { g.rotation }) as usize
    }

    /// Index of the conjugacy class containing `g`.
    pub fn class_of(&self, g: GroupElement) -> usize {
        let idx = self.element_index(g);
        self.classes
            .iter()
            .position(|c| c.members.contains(&idx))
            .expect("every element lies in a class")
    }

    /// Group product in canonical form: `(r^a s^b)(r^c s^d) = r^{a+(-1)^b c} s^{b⊕d}`.
    pub fn multiply(&self, g: GroupElement, h: GroupElement) -> GroupElement {
        let m = self.m as i64;
        let signed = if g.reflection { -(h.rotation as i64) } else { h.rotation as i64 };
        let rotation = (g.rotation as i64 + signed).rem_euclid(m) as u32;
        GroupElement { rotation, reflection: g.reflection ^ h.reflection }
    }

    pub fn inverse(&self, g: GroupElement) -> GroupElement {
        if g.reflection {
            g
        } else {
            GroupElement { rotation: (self.m - g.rotation) % self.m, reflection: false }
        }
    }

    /// Generators in canonical order: `r` (when m > 1) then `s` (dihedral).
    pub fn generators(&self) -> Vec<GroupElement> {
        let mut gens = Vec::new();
        if self.m > 1 {
            gens.push(GroupElement { rotation: 1, reflection: false });
        }
        if self.kind == GroupKind::Dihedral {
            gens.push(GroupElement { rotation: 0, reflection: true });
        }
        gens
    }

    /// Express `g` as a word in the canonical generators.
    pub fn generator_word(&self, g: GroupElement) -> Vec<GroupElement> {
        let mut word = Vec::new();
        for _ in 0..g.rotation {
            word.push(GroupElement { rotation: 1, reflection: false });
        }
        if g.reflection {
            word.push(GroupElement { rotation: 0, reflection: true });
        }
        word
    }
}

/// A class function, stored per conjugacy class.
#[derive(Clone, Debug)]
pub struct Character {
    pub values: Vec<Scalar>,
}

impl Character {
    pub fn degree(&self) -> Scalar {
        self.values[0]
    }
}

/// The irreducible character table of a cyclic or dihedral group, rows in a
/// fixed order with the trivial character first.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub group: Arc<GroupSpec>,
    pub labels: Vec<String>,
    /// Irreducible dimensions n_j.
    pub dims: Vec<usize>,
    pub rows: Vec<Character>,
}

impl CharacterTable {
    pub fn irrep_count(&self) -> usize {
        self.rows.len()
    }

    /// Value of irreducible `j` (0-based) at a group element.
    pub fn value_at(&self, j: usize, g: GroupElement) -> Scalar {
        self.rows[j].values[self.group.class_of(g)]
    }

    /// The primitive root ζ = e^{2πi/m} underlying a cyclic table.
    pub fn primitive_root(&self) -> Option<Scalar> {
        (self.group.kind == GroupKind::Cyclic).then(|| root_of_unity(self.group.m, 1))
    }

    /// Index of the complex-conjugate irreducible (pairs ζ^k with ζ^{-k});
    /// self-paired for real characters.
    pub fn conjugate_partner(&self, j: usize) -> usize {
        (0..self.irrep_count())
            .find(|&t| {
                self.rows[j]
                    .values
                    .iter()
                    .zip(&self.rows[t].values)
                    .all(|(a, b)| (a - b.conj()).norm() <= 1e-12)
            })
            .expect("conjugate of an irreducible character is irreducible")
    }
}

fn root_of_unity(m: u32, power: i64) -> Scalar {
    let angle = 2.0 * std::f64::consts::PI * (power.rem_euclid(m as i64) as f64) / (m as f64);
    Scalar::new(angle.cos(), angle.sin())
}

/// Build the character table. Cyclic groups get the m one-dimensional
/// characters `μ^{(j)}(r^t) = ζ^{t(j-1)}`; dihedral groups the standard real
/// tables, with the Klein group D₄ labeled `(00), (01), (10), (11)`.
/// The table is validated against character orthonormality before returning.
pub fn character_table(group: &Arc<GroupSpec>) -> CharacterTable {
    let m = group.m;
    let mut labels = Vec::new();
    let mut dims = Vec::new();
    let mut rows = Vec::new();
    match group.kind {
        GroupKind::Cyclic => {
            for j in 0..m {
                labels.push(format!("({})", j + 1));
                dims.push(1);
                let values = group
                    .classes()
                    .iter()
                    .map(|c| root_of_unity(m, c.representative.rotation as i64 * j as i64))
                    .collect();
                rows.push(Character { values });
            }
        }
        GroupKind::Dihedral if m == 1 => {
            // D₂ = ℤ₂ generated by one mirror.
            labels = vec!["(1)".into(), "(2)".into()];
            dims = vec![1, 1];
            rows = vec![
                Character { values: vec![Scalar::new(1.0, 0.0); 2] },
                Character { values: vec![Scalar::new(1.0, 0.0), Scalar::new(-1.0, 0.0)] },
            ];
        }
        GroupKind::Dihedral if m == 2 => {
            // Klein four-group: label elements by the bits (t₁, t₂) of the
            // two mirrors s and rs, so that τ = μ^{(10)} ⊕ μ^{(01)}.
            let bits = |g: GroupElement| -> (u32, u32) {
                match (g.rotation, g.reflection) {
                    (0, false) => (0, 0),
                    (0, true) => (1, 0),
                    (1, true) => (0, 1),
                    (1, false) => (1, 1),
                    _ => unreachable!("canonical D4 element"),
                }
            };
            for (j1, j2) in [(0u32, 0u32), (0, 1), (1, 0), (1, 1)] {
                labels.push(format!("({j1}{j2})"));
                dims.push(1);
                let values = group
                    .classes()
                    .iter()
                    .map(|c| {
                        let (t1, t2) = bits(c.representative);
                        Scalar::new(if (j1 * t1 + j2 * t2) % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
                    })
                    .collect();
                rows.push(Character { values });
            }
        }
        GroupKind::Dihedral => {
            let one = |f: &dyn Fn(GroupElement) -> f64| -> Character {
                Character {
                    values: group
                        .classes()
                        .iter()
                        .map(|c| Scalar::new(f(c.representative), 0.0))
                        .collect(),
                }
            };
            labels.push("(1)".into());
            dims.push(1);
            rows.push(one(&|_| 1.0));
            labels.push("(2)".into());
            dims.push(1);
            rows.push(one(&|g| if g.reflection { -1.0 } else { 1.0 }));
            if m.is_multiple_of(2) {
                labels.push("(3)".into());
                dims.push(1);
                rows.push(one(&|g| if g.rotation % 2 == 0 { 1.0 } else { -1.0 }));
                labels.push("(4)".into());
                dims.push(1);
                rows.push(one(&|g| {
                    let sign = if g.rotation % 2 == 0 { 1.0 } else { -1.0 };
                    if g.reflection { -sign } else { sign }
                }));
            }
            let two_dim = if m.is_multiple_of(2) { (m - 2) / 2 } else { (m - 1) / 2 };
            for k in 1..=two_dim {
                labels.push(format!("({})", rows.len() + 1));
                dims.push(2);
                let values = group
                    .classes()
                    .iter()
                    .map(|c| {
                        if c.representative.reflection {
                            Scalar::new(0.0, 0.0)
                        } else {
                            let angle = 2.0 * std::f64::consts::PI * (k as f64)
                                * (c.representative.rotation as f64)
                                / (m as f64);
                            Scalar::new(2.0 * angle.cos(), 0.0)
                        }
                    })
                    .collect();
                rows.push(Character { values });
            }
        }
    }
    let table = CharacterTable { group: group.clone(), labels, dims, rows };
    debug_assert!(gram_defect(&table) <= 1e-10, "character rows are orthonormal");
    debug_assert_eq!(
        table.dims.iter().map(|n| n * n).sum::<usize>(),
        group.order(),
        "sum of squared dimensions equals the group order"
    );
    table
}

/// Worst deviation of the table's Gram matrix from the identity.
pub fn gram_defect(table: &CharacterTable) -> f64 {
    let mut defect = 0.0f64;
    for j in 0..table.irrep_count() {
        for t in 0..table.irrep_count() {
            let target = if j == t { 1.0 } else { 0.0 };
            let p = inner_product(&table.group, &table.rows[j], &table.rows[t]);
            defect = defect.max((p - Scalar::new(target, 0.0)).norm());
        }
    }
    defect
}

/// Character inner product `⟨χ₀, χ₁⟩ = (1/|G|) Σ_g χ₀(g) conj(χ₁(g))`,
/// computed classwise with class sizes.
pub fn inner_product(group: &GroupSpec, chi0: &Character, chi1: &Character) -> Scalar {
    let mut acc = Scalar::new(0.0, 0.0);
    for (c, class) in group.classes().iter().enumerate() {
        acc += Scalar::new(class.members.len() as f64, 0.0) * chi0.values[c] * chi1.values[c].conj();
    }
    acc / Scalar::new(group.order() as f64, 0.0)
}

/// Multiplicities of the irreducibles inside a genuine character; fails when
/// any inner product strays from a nonnegative integer by more than 1e-8.
pub fn decompose_character(
    table: &CharacterTable,
    chi: &Character,
) -> Result<Vec<u32>, GroupError> {
    let raw: Vec<Scalar> = table
        .rows
        .iter()
        .map(|row| inner_product(&table.group, chi, row))
        .collect();
    let mut out = Vec::with_capacity(raw.len());
    for value in &raw {
        let rounded = value.re.round();
        if (value.re - rounded).abs() > 1e-8 || value.im.abs() > 1e-8 || rounded < 0.0 {
            return Err(GroupError::NotIntegral(raw));
        }
        out.push(rounded as u32);
    }
    Ok(out)
}

/// The standard planar representation: `τ(r^a s^b)` rotates by `2πa/m` after
/// optionally reflecting across the configured axis.
#[derive(Clone, Debug)]
pub struct StandardRep {
    pub group: Arc<GroupSpec>,
    mats: Vec<Mat>,
}

pub fn tau(group: &Arc<GroupSpec>) -> StandardRep {
    let theta0 = group.axis_degrees.to_radians();
    let mats = group
        .elements()
        .iter()
        .map(|g| {
            let angle = 2.0 * std::f64::consts::PI * (g.rotation as f64) / (group.m as f64);
            let (s, c) = angle.sin_cos();
            let rotation = [[c, -s], [s, c]];
            let entries = if g.reflection {
                // Reflection across the line at angle θ₀, then the rotation.
                let (s2, c2) = (2.0 * theta0).sin_cos();
                let reflection = [[c2, s2], [s2, -c2]];
                mat2_mul(rotation, reflection)
            } else {
                rotation
            };
            crate::numerics::real_mat(
                2,
                2,
                &[entries[0][0], entries[1][0], entries[0][1], entries[1][1]],
            )
        })
        .collect();
    StandardRep { group: group.clone(), mats }
}

fn mat2_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

impl StandardRep {
    pub fn matrix(&self, g: GroupElement) -> &Mat {
        &self.mats[self.group.element_index(g)]
    }

    /// Apply τ(g) to a real point.
    pub fn apply(&self, g: GroupElement, p: [f64; 2]) -> [f64; 2] {
        let m = self.matrix(g);
        [
            m[(0, 0)].re * p[0] + m[(0, 1)].re * p[1],
            m[(1, 0)].re * p[0] + m[(1, 1)].re * p[1],
        ]
    }

    /// Trace character of τ, stored per class.
    pub fn character(&self) -> Character {
        Character {
            values: self
                .group
                .classes()
                .iter()
                .map(|c| {
                    let m = self.matrix(c.representative);
                    m[(0, 0)] + m[(1, 1)]
                })
                .collect(),
        }
    }

    /// Worst deviation from τ(g)τ(h) = τ(gh) over all pairs.
    pub fn homomorphism_defect(&self) -> f64 {
        let mut defect = 0.0f64;
        for &g in self.group.elements() {
            for &h in self.group.elements() {
                let product = self.matrix(g) * self.matrix(h);
                let expected = self.matrix(self.group.multiply(g, h));
                defect = defect.max(crate::numerics::max_abs(&(product - expected)));
            }
        }
        defect
    }
}
