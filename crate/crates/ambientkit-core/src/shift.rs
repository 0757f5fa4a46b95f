//! Weighted shift operators and the differentials of the operator-family
//! chain complexes.
//!
//! Each operator family (tridifferential, linear, and the three
//! Ovsienko--Redou style bidifferential families) comes with a small set of
//! shift operators `F_j` acting on coefficient spaces: `F_j` multiplies by an
//! affine function of the multi-index and the weights, and shifts slot `j` up
//! by one. Stacking signed sums of shifts yields the differentials `d_1`,
//! `d_2`, `d_3`; coefficient families of tangential operators are exactly the
//! kernels of `d_1`.

use crate::error::{Error, Result};
use crate::index::{enumerate_compositions, Composition, IndexSet};
use crate::linalg::{compose, ExactMatrix};
use crate::rat::{fmt_rat, rat, rat_int, twice_is_integer, Rat};

/// The five operator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Tridifferential operators; coefficients on five slots.
    Tri,
    /// Linear operators twisted by two scalar invariants; three slots.
    Lin,
    /// Bidifferential with the invariant outside both inputs; three slots.
    OrOuter,
    /// Bidifferential with the invariant inside the second input; four slots.
    OrInner,
    /// Bidifferential with the invariant under the outer Laplacians; four slots.
    OrInner2,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Tri,
        Family::Lin,
        Family::OrOuter,
        Family::OrInner,
        Family::OrInner2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Tri => "TRI",
            Family::Lin => "LIN",
            Family::OrOuter => "OR_OUTER",
            Family::OrInner => "OR_INNER",
            Family::OrInner2 => "OR_INNER2",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        match s {
            "TRI" => Ok(Family::Tri),
            "LIN" => Ok(Family::Lin),
            "OR_OUTER" => Ok(Family::OrOuter),
            "OR_INNER" => Ok(Family::OrInner),
            "OR_INNER2" => Ok(Family::OrInner2),
            _ => Err(Error::Parse(format!(
                "unknown family `{s}` (expected TRI, LIN, OR_OUTER, OR_INNER, or OR_INNER2)"
            ))),
        }
    }

    /// Number of slots in the coefficient multi-indices.
    pub fn slots(&self) -> usize {
        match self {
            Family::Tri => 5,
            Family::Lin | Family::OrOuter => 3,
            Family::OrInner | Family::OrInner2 => 4,
        }
    }

    /// Number of function inputs the induced operator takes.
    pub fn arity(&self) -> usize {
        match self {
            Family::Tri => 3,
            Family::Lin => 1,
            _ => 2,
        }
    }

    /// Number of differentials in the family's chain complex.
    pub fn levels(&self) -> u8 {
        match self {
            Family::Tri => 3,
            Family::Lin => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The shift variants; availability depends on the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftVariant {
    F1,
    F2,
    /// The twisted companion of `F2` appearing in the higher differentials.
    F2Prime,
    F3,
    F4,
    F5,
}

impl ShiftVariant {
    pub fn name(&self) -> &'static str {
        match self {
            ShiftVariant::F1 => "F1",
            ShiftVariant::F2 => "F2",
            ShiftVariant::F2Prime => "F2'",
            ShiftVariant::F3 => "F3",
            ShiftVariant::F4 => "F4",
            ShiftVariant::F5 => "F5",
        }
    }

    /// Which slot the variant shifts (slots numbered from 1).
    pub fn slot(&self) -> usize {
        match self {
            ShiftVariant::F1 => 1,
            ShiftVariant::F2 | ShiftVariant::F2Prime => 2,
            ShiftVariant::F3 => 3,
            ShiftVariant::F4 => 4,
            ShiftVariant::F5 => 5,
        }
    }
}

impl std::fmt::Display for ShiftVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

use ShiftVariant::*;

/// Shift variants available per family.
pub fn variants_for(family: Family) -> &'static [ShiftVariant] {
    match family {
        Family::Tri => &[F1, F2, F2Prime, F3, F4, F5],
        Family::Lin => &[F1, F2, F3],
        Family::OrOuter => &[F1, F2, F3],
        Family::OrInner => &[F1, F2, F3, F4],
        Family::OrInner2 => &[F1, F2, F2Prime, F3, F4],
    }
}

/// Parameters of one operator family instance.
///
/// `n` is the base dimension, `k` the order parameter (the induced operator
/// has order `2k`), and the `l` values are invariant weights: the linear
/// family carries a pair `(l1, l2)`, the bidifferential families a single
/// `l`. The top coefficient space has degree `k` minus the total invariant
/// weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OperatorSpec {
    family: Family,
    n: u32,
    k: u32,
    l1: u32,
    l2: u32,
    hypothesis_override: bool,
}

impl OperatorSpec {
    pub fn tri(n: u32, k: u32) -> Result<Self> {
        Self::build(Family::Tri, n, k, 0, 0, false)
    }

    pub fn lin(n: u32, k: u32, l1: u32, l2: u32) -> Result<Self> {
        Self::build(Family::Lin, n, k, l1, l2, false)
    }

    pub fn or_outer(n: u32, k: u32, l: u32) -> Result<Self> {
        Self::build(Family::OrOuter, n, k, l, 0, false)
    }

    pub fn or_inner(n: u32, k: u32, l: u32) -> Result<Self> {
        Self::build(Family::OrInner, n, k, l, 0, false)
    }

    pub fn or_inner2(n: u32, k: u32, l: u32) -> Result<Self> {
        Self::build(Family::OrInner2, n, k, l, 0, false)
    }

    /// General constructor; `l2` is ignored except for the linear family.
    pub fn new(family: Family, n: u32, k: u32, l1: u32, l2: u32) -> Result<Self> {
        Self::build(family, n, k, l1, l2, false)
    }

    /// Like [`OperatorSpec::new`] but skips the even-dimension hypothesis
    /// `n >= 2k`, for exploratory runs. Results computed from such a spec
    /// should be labelled with [`OperatorSpec::hypothesis_violated`].
    pub fn new_with_override(family: Family, n: u32, k: u32, l1: u32, l2: u32) -> Result<Self> {
        Self::build(family, n, k, l1, l2, true)
    }

    fn build(
        family: Family,
        n: u32,
        k: u32,
        l1: u32,
        l2: u32,
        hypothesis_override: bool,
    ) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSpec(format!("n must be at least 3, got {n}")));
        }
        if family != Family::Lin && l2 != 0 {
            return Err(Error::InvalidSpec(format!(
                "family {family} carries a single invariant weight, got l2={l2}"
            )));
        }
        let spec = OperatorSpec {
            family,
            n,
            k,
            l1,
            l2,
            hypothesis_override,
        };
        if spec.top_degree() < 0 {
            return Err(Error::InvalidSpec(format!(
                "invariant weights exceed the order parameter: k={k}, l={}",
                spec.total_invariant_weight()
            )));
        }
        if !hypothesis_override && spec.hypothesis_violated() {
            return Err(Error::InvalidSpec(format!(
                "even dimension n={n} requires n >= 2k (k={k})"
            )));
        }
        Ok(spec)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l1(&self) -> u32 {
        self.l1
    }

    pub fn l2(&self) -> u32 {
        self.l2
    }

    pub fn total_invariant_weight(&self) -> u32 {
        match self.family {
            Family::Lin => self.l1 + self.l2,
            Family::Tri => 0,
            _ => self.l1,
        }
    }

    pub fn slots(&self) -> usize {
        self.family.slots()
    }

    pub fn arity(&self) -> usize {
        self.family.arity()
    }

    /// Degree of the top coefficient space.
    pub fn top_degree(&self) -> i64 {
        self.k as i64 - self.total_invariant_weight() as i64
    }

    /// True when `n` is even and `n < 2k`, outside the construction
    /// hypotheses.
    pub fn hypothesis_violated(&self) -> bool {
        self.n.is_multiple_of(2) && self.n < 2 * self.k
    }

    pub fn index_set(&self, degree: i64) -> IndexSet {
        enumerate_compositions(degree, self.slots())
    }
}

/// Weights of the input density spaces: one for the linear family, two for
/// the bidifferential families, three for the tridifferential family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightAssignment {
    weights: Vec<Rat>,
}

impl WeightAssignment {
    pub fn new(family: Family, weights: Vec<Rat>) -> Result<Self> {
        if weights.len() != family.arity() {
            return Err(Error::InvalidSpec(format!(
                "family {family} takes {} weight(s), got {}",
                family.arity(),
                weights.len()
            )));
        }
        Ok(WeightAssignment { weights })
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    /// Weight in slot `i`, numbered from 1.
    pub fn w(&self, i: usize) -> &Rat {
        &self.weights[i - 1]
    }

    pub fn total(&self) -> Rat {
        self.weights.iter().sum()
    }

    /// The genericity test: every doubled weight is a non-integer.
    pub fn is_generic(&self) -> bool {
        self.weights.iter().all(|w| !twice_is_integer(w))
    }

    /// Indices (from 1) of weights whose double is an integer.
    pub fn nongeneric_slots(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| twice_is_integer(w))
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn all_integral(&self) -> bool {
        use num_traits::One;
        self.weights.iter().all(|w| w.denom().is_one())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.weights.iter().map(fmt_rat).collect()
    }
}

/// The affine coefficient of shift `variant` at target index `alpha`.
///
/// The value multiplies `A` at `alpha + e_j` when the shifted family is read
/// off at `alpha`; each family has its own coefficient table.
pub fn shift_coefficient(
    spec: &OperatorSpec,
    variant: ShiftVariant,
    alpha: &Composition,
    w: &WeightAssignment,
) -> Result<Rat> {
    if !variants_for(spec.family()).contains(&variant) {
        return Err(Error::VariantUnavailable {
            family: spec.family().name(),
            variant: variant.name(),
        });
    }
    if alpha.slots() != spec.slots() {
        return Err(Error::IndexMismatch(format!(
            "family {} indexes {} slots, composition has {}",
            spec.family(),
            spec.slots(),
            alpha.slots()
        )));
    }
    if w.weights().len() != spec.arity() {
        return Err(Error::InvalidSpec(format!(
            "family {} takes {} weight(s), got {}",
            spec.family(),
            spec.arity(),
            w.weights().len()
        )));
    }
    let half_n = rat(spec.n() as i64, 2);
    let two_k = rat_int(2 * spec.k() as i64);
    let a = |j: usize| rat_int(alpha.part(j) as i64);
    let one = rat_int(1);
    let value = match (spec.family(), variant) {
        // ---- tridifferential ----
        (Family::Tri, F1) => half_n + w.total() - two_k + a(1) + one,
        (Family::Tri, F2) => {
            half_n + w.w(1) + w.w(2) - a(2) - rat_int(2) * (a(3) + a(4)) - one
        }
        (Family::Tri, F2Prime) => {
            half_n + w.w(1) + w.w(2) - a(2) - rat_int(2) * (a(3) + a(4)) - rat_int(3)
        }
        (Family::Tri, F3) => half_n + w.w(1) - a(3) - one,
        (Family::Tri, F4) => half_n + w.w(2) - a(4) - one,
        (Family::Tri, F5) => half_n + w.w(3) - a(5) - one,
        // ---- linear with two invariants ----
        (Family::Lin, F1) => half_n + w.total() - two_k + a(1) + one,
        (Family::Lin, F2) => {
            half_n + w.w(1) - rat_int(2 * spec.l2() as i64) - a(2) - rat_int(2) * a(3) - one
        }
        (Family::Lin, F3) => half_n + w.w(1) - a(3) - one,
        // ---- bidifferential, invariant outside ----
        (Family::OrOuter, F1) => half_n + w.total() - two_k + a(1) + one,
        (Family::OrOuter, F2) => half_n + w.w(1) - a(2) - one,
        (Family::OrOuter, F3) => half_n + w.w(2) - a(3) - one,
        // ---- bidifferential, invariant inside the second input ----
        (Family::OrInner, F1) => half_n + w.total() - two_k + a(1) + one,
        (Family::OrInner, F2) => half_n + w.w(1) - a(2) - one,
        (Family::OrInner, F3) => {
            half_n + w.w(2)
                - rat_int(2 * spec.total_invariant_weight() as i64)
                - a(3)
                - rat_int(2) * a(4)
                - one
        }
        (Family::OrInner, F4) => half_n + w.w(2) - a(4) - one,
        // ---- bidifferential, invariant under the outer Laplacians ----
        (Family::OrInner2, F1) => half_n + w.total() - two_k + a(1) + one,
        (Family::OrInner2, F2) => {
            half_n + w.total() - a(2) - rat_int(2) * (a(3) + a(4)) - one
        }
        (Family::OrInner2, F2Prime) => {
            half_n + w.total() - a(2) - rat_int(2) * (a(3) + a(4)) - rat_int(3)
        }
        (Family::OrInner2, F3) => half_n + w.w(1) - a(3) - one,
        (Family::OrInner2, F4) => half_n + w.w(2) - a(4) - one,
        _ => unreachable!("availability checked above"),
    };
    Ok(value)
}

/// Matrix of the shift `variant` from the coefficient space of degree
/// `source_degree` to the one of degree `source_degree - 1`.
///
/// Row `alpha` of the result has a single nonzero at column
/// `alpha + e_{slot}`.
pub fn build_shift_matrix(
    spec: &OperatorSpec,
    variant: ShiftVariant,
    source_degree: i64,
    w: &WeightAssignment,
) -> Result<ExactMatrix> {
    if !variants_for(spec.family()).contains(&variant) {
        return Err(Error::VariantUnavailable {
            family: spec.family().name(),
            variant: variant.name(),
        });
    }
    let source = spec.index_set(source_degree);
    let target = spec.index_set(source_degree - 1);
    let mut m = ExactMatrix::zero(target.cardinality(), source.cardinality());
    let slot = variant.slot();
    for (row, alpha) in target.iter().enumerate() {
        let col = source.rank(&alpha.bump(slot)?)?;
        m.set(row, col, shift_coefficient(spec, variant, alpha, w)?);
    }
    Ok(m)
}

/// One signed term of a differential block.
type Term = (i8, ShiftVariant);

/// Block layout of each differential: rows of blocks, each block a signed
/// sum of shifts (an empty block is zero).
fn differential_blocks(family: Family, level: u8) -> Result<Vec<Vec<Vec<Term>>>> {
    let unavailable = || Error::LevelUnavailable {
        family: family.name(),
        level,
    };
    let blocks: Vec<Vec<Vec<Term>>> = match (family, level) {
        (Family::Tri, 1) => vec![
            vec![vec![(1, F1), (1, F2), (1, F3)]],
            vec![vec![(1, F1), (1, F2), (1, F4)]],
            vec![vec![(1, F1), (1, F5)]],
        ],
        (Family::Tri, 2) => vec![
            vec![
                vec![(-1, F1), (-1, F5)],
                vec![(1, F1), (1, F5)],
                vec![(1, F3), (-1, F4)],
            ],
            vec![
                vec![(1, F1), (1, F5)],
                vec![],
                vec![(-1, F1), (-1, F2), (-1, F3)],
            ],
            vec![
                vec![(-1, F1), (-1, F2Prime), (-1, F4)],
                vec![(1, F1), (1, F2Prime), (1, F3)],
                vec![],
            ],
        ],
        (Family::Tri, 3) => vec![vec![
            vec![(1, F1), (1, F2Prime), (1, F3)],
            vec![(1, F3), (-1, F4)],
            vec![(-1, F1), (-1, F5)],
        ]],
        (Family::Lin, 1) => vec![vec![vec![(1, F1), (1, F2), (1, F3)]]],
        (Family::OrOuter, 1) => vec![
            vec![vec![(1, F1), (1, F2)]],
            vec![vec![(1, F1), (1, F3)]],
        ],
        (Family::OrOuter, 2) => vec![vec![
            vec![(1, F1), (1, F3)],
            vec![(-1, F1), (-1, F2)],
        ]],
        (Family::OrInner, 1) => vec![
            vec![vec![(1, F1), (1, F2)]],
            vec![vec![(1, F1), (1, F3), (1, F4)]],
        ],
        (Family::OrInner, 2) => vec![vec![
            vec![(1, F1), (1, F3), (1, F4)],
            vec![(-1, F1), (-1, F2)],
        ]],
        (Family::OrInner2, 1) => vec![
            vec![vec![(1, F1), (1, F2), (1, F3)]],
            vec![vec![(1, F1), (1, F2), (1, F4)]],
        ],
        (Family::OrInner2, 2) => vec![vec![
            vec![(1, F1), (1, F2Prime), (1, F4)],
            vec![(-1, F1), (-1, F2Prime), (-1, F3)],
        ]],
        _ => return Err(unavailable()),
    };
    Ok(blocks)
}

/// The differential `d_level` of the family's chain complex, as a block
/// matrix between stacked coefficient spaces. Index sets of negative degree
/// are zero-dimensional, which makes the truncated small-order complexes come
/// out right without special cases.
pub fn build_differential(
    spec: &OperatorSpec,
    level: u8,
    w: &WeightAssignment,
) -> Result<ExactMatrix> {
    let blocks = differential_blocks(spec.family(), level)?;
    let source_degree = spec.top_degree() - (level as i64 - 1);
    let rows_per = crate::index::cardinality(source_degree - 1, spec.slots()) as usize;
    let cols_per = crate::index::cardinality(source_degree, spec.slots()) as usize;
    let block_cols = blocks[0].len();
    let mut out = ExactMatrix::zero(rows_per * blocks.len(), cols_per * block_cols);
    if rows_per == 0 || cols_per == 0 {
        return Ok(out);
    }
    for (bi, block_row) in blocks.iter().enumerate() {
        for (bj, terms) in block_row.iter().enumerate() {
            if terms.is_empty() {
                continue;
            }
            let mut acc = ExactMatrix::zero(rows_per, cols_per);
            for (sign, variant) in terms {
                let m = build_shift_matrix(spec, *variant, source_degree, w)?;
                acc = acc.add(&if *sign < 0 { m.neg() } else { m })?;
            }
            out.paste(bi * rows_per, bj * cols_per, &acc);
        }
    }
    Ok(out)
}

/// One commutation relation between shift variants, with composition read
/// right to left (the right factor acts on the higher-degree space).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationCheck {
    pub lhs: (ShiftVariant, ShiftVariant),
    pub rhs: (ShiftVariant, ShiftVariant),
    pub holds: bool,
}

impl RelationCheck {
    pub fn describe(&self) -> String {
        format!(
            "{}∘{} == {}∘{}",
            self.lhs.0, self.lhs.1, self.rhs.0, self.rhs.1
        )
    }
}

#[derive(Debug, Clone)]
pub struct CommutationReport {
    pub degree: i64,
    pub relations: Vec<RelationCheck>,
    pub all_hold: bool,
}

/// The commutation relations each family's shifts satisfy, as pairs of
/// compositions that must agree.
fn relation_table(family: Family) -> Vec<((ShiftVariant, ShiftVariant), (ShiftVariant, ShiftVariant))> {
    let mut rels = Vec::new();
    let mut commute = |a: ShiftVariant, b: ShiftVariant| {
        rels.push(((a, b), (b, a)));
    };
    match family {
        Family::Tri => {
            let plain = [F1, F3, F4, F5];
            for (i, &a) in plain.iter().enumerate() {
                for &b in &plain[i..] {
                    commute(a, b);
                }
            }
            commute(F1, F2);
            commute(F5, F2);
            rels.push(((F3, F2), (F2Prime, F3)));
            rels.push(((F4, F2), (F2Prime, F4)));
        }
        Family::Lin => {
            commute(F1, F1);
            commute(F1, F2);
            commute(F1, F3);
        }
        Family::OrOuter => {
            for (i, &a) in [F1, F2, F3].iter().enumerate() {
                for &b in &[F1, F2, F3][i..] {
                    commute(a, b);
                }
            }
        }
        Family::OrInner => {
            commute(F1, F1);
            commute(F1, F2);
            commute(F1, F3);
            commute(F1, F4);
            commute(F2, F3);
            commute(F2, F4);
        }
        Family::OrInner2 => {
            let plain = [F1, F3, F4];
            for (i, &a) in plain.iter().enumerate() {
                for &b in &plain[i..] {
                    commute(a, b);
                }
            }
            commute(F1, F2);
            rels.push(((F3, F2), (F2Prime, F3)));
            rels.push(((F4, F2), (F2Prime, F4)));
        }
    }
    rels
}

/// Check the family's stated shift relations at source degree `s` by building
/// both compositions as matrices (outer factor at degree `s - 1`, inner at
/// `s`) and comparing exactly.
pub fn verify_commutation_relations(
    spec: &OperatorSpec,
    w: &WeightAssignment,
    s: i64,
) -> Result<CommutationReport> {
    if s < 2 {
        return Err(Error::PreconditionViolated(format!(
            "two shifts must be composable, need degree >= 2, got {s}"
        )));
    }
    let mut relations = Vec::new();
    for ((l0, l1), (r0, r1)) in relation_table(spec.family()) {
        let lhs = compose(
            &build_shift_matrix(spec, l0, s - 1, w)?,
            &build_shift_matrix(spec, l1, s, w)?,
        )?;
        let rhs = compose(
            &build_shift_matrix(spec, r0, s - 1, w)?,
            &build_shift_matrix(spec, r1, s, w)?,
        )?;
        relations.push(RelationCheck {
            lhs: (l0, l1),
            rhs: (r0, r1),
            holds: lhs == rhs,
        });
    }
    let all_hold = relations.iter().all(|r| r.holds);
    Ok(CommutationReport {
        degree: s,
        relations,
        all_hold,
    })
}

/// The right inverse `G` of the shift `variant` at degree `s`: the unique one
/// supported on indices with a nonzero entry in the shifted slot, so that the
/// shift composed with `G` is the identity on the degree `s - 1` space.
///
/// Fails with [`Error::DegenerateWeight`] at the first index whose shift
/// coefficient vanishes.
pub fn right_inverse_matrix(
    spec: &OperatorSpec,
    variant: ShiftVariant,
    target_degree: i64,
    w: &WeightAssignment,
) -> Result<ExactMatrix> {
    use num_traits::Zero;
    let source = spec.index_set(target_degree - 1);
    let target = spec.index_set(target_degree);
    let slot = variant.slot();
    let mut g = ExactMatrix::zero(target.cardinality(), source.cardinality());
    for (col, alpha) in source.iter().enumerate() {
        let c = shift_coefficient(spec, variant, alpha, w)?;
        if c.is_zero() {
            return Err(Error::DegenerateWeight {
                variant: variant.name(),
                alpha: alpha.parts().to_vec(),
            });
        }
        let row = target.rank(&alpha.bump(slot)?)?;
        g.set(row, col, c.recip());
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::Composition;
    use crate::linalg::rank;
    use crate::rat::parse_rat;
    use num_traits::Zero;

    fn comp(parts: &[u32]) -> Composition {
        Composition::new(parts.to_vec())
    }

    fn weights(family: Family, ws: &[&str]) -> WeightAssignment {
        WeightAssignment::new(family, ws.iter().map(|s| parse_rat(s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(OperatorSpec::tri(5, 2).is_ok());
        assert!(OperatorSpec::tri(2, 0).is_err());
        // even dimension needs n >= 2k
        assert!(OperatorSpec::tri(4, 3).is_err());
        assert!(OperatorSpec::tri(6, 3).is_ok());
        let explored = OperatorSpec::new_with_override(Family::Tri, 4, 3, 0, 0).unwrap();
        assert!(explored.hypothesis_violated());
        // invariant weight cannot exceed k
        assert!(OperatorSpec::or_outer(5, 2, 3).is_err());
        assert!(OperatorSpec::lin(5, 3, 2, 2).is_err());
        assert_eq!(OperatorSpec::lin(5, 3, 1, 2).unwrap().top_degree(), 0);
    }

    #[test]
    fn tri_f1_at_origin() {
        let spec = OperatorSpec::tri(5, 2).unwrap();
        let w = weights(Family::Tri, &["1/3", "1/3", "1/3"]);
        let c = shift_coefficient(&spec, F1, &comp(&[0, 0, 0, 0, 0]), &w).unwrap();
        // n/2 + w - 2k + 1
        assert_eq!(c, parse_rat("5/2").unwrap() + rat_int(1) - rat_int(4) + rat_int(1));
    }

    #[test]
    fn tri_f3_at_symmetric_weights() {
        // at w1 = w2 = w3 = -(n-2k)/4 the third shift coefficient collapses
        // to (n + 2k - 4*alpha3 - 4)/4
        for (n, k) in [(5u32, 2u32), (7, 3), (9, 1)] {
            let spec = OperatorSpec::tri(n, k).unwrap();
            let wq = rat(-((n as i64) - 2 * k as i64), 4);
            let w = WeightAssignment::new(Family::Tri, vec![wq.clone(), wq.clone(), wq]).unwrap();
            for alpha in enumerate_compositions(k as i64 - 1, 5).iter() {
                let c = shift_coefficient(&spec, F3, alpha, &w).unwrap();
                let expect = rat(
                    n as i64 + 2 * k as i64 - 4 * alpha.part(3) as i64 - 4,
                    4,
                );
                assert_eq!(c, expect);
            }
        }
    }

    #[test]
    fn or_outer_f2_at_symmetric_weights() {
        // at w1 = w2 = -(n-2k)/3 the second shift coefficient is
        // (n+4k)/6 - alpha2 - 1
        let (n, k) = (7u32, 2u32);
        let spec = OperatorSpec::or_outer(n, k, 0).unwrap();
        let wq = rat(-((n as i64) - 2 * k as i64), 3);
        let w = WeightAssignment::new(Family::OrOuter, vec![wq.clone(), wq]).unwrap();
        for alpha in enumerate_compositions(1, 3).iter() {
            let c = shift_coefficient(&spec, F2, alpha, &w).unwrap();
            let expect = rat(n as i64 + 4 * k as i64, 6) - rat_int(alpha.part(2) as i64) - rat_int(1);
            assert_eq!(c, expect);
        }
    }

    #[test]
    fn variant_availability() {
        let spec = OperatorSpec::or_outer(5, 2, 0).unwrap();
        let w = weights(Family::OrOuter, &["1/3", "1/3"]);
        assert!(matches!(
            shift_coefficient(&spec, F5, &comp(&[0, 0, 0]), &w),
            Err(Error::VariantUnavailable { .. })
        ));
        assert!(matches!(
            build_shift_matrix(&spec, F2Prime, 1, &w),
            Err(Error::VariantUnavailable { .. })
        ));
    }

    #[test]
    fn shift_matrix_structure() {
        let spec = OperatorSpec::tri(5, 2).unwrap();
        let w = weights(Family::Tri, &["1/3", "1/3", "1/3"]);
        // degree-1 source: single row, nonzero in the bumped column
        let m = build_shift_matrix(&spec, F5, 1, &w).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 5));
        let source = enumerate_compositions(1, 5);
        let col = source.rank(&comp(&[0, 0, 0, 0, 1])).unwrap();
        assert_eq!(m.nnz(), 1);
        assert!(!m.get(0, col).is_zero() || m.nnz() == 0);

        // at most one nonzero per row, and rank equals nonvanishing count
        for variant in variants_for(Family::Tri) {
            let m = build_shift_matrix(&spec, *variant, 2, &w).unwrap();
            let mut per_row = vec![0usize; m.rows()];
            for (r, _, _) in m.iter() {
                per_row[r] += 1;
            }
            assert!(per_row.iter().all(|&c| c <= 1));
            assert_eq!(rank(&m), m.nnz());
        }
    }

    #[test]
    fn shift_matrix_specific_entry() {
        // F1 at n=5, k=2, s=2, w=(1/3,1/3,1/3): row (1,0,0,0,0) has
        // 5/2 + 1 - 4 + 1 + 1 = 3/2 at column (2,0,0,0,0)
        let spec = OperatorSpec::tri(5, 2).unwrap();
        let w = weights(Family::Tri, &["1/3", "1/3", "1/3"]);
        let m = build_shift_matrix(&spec, F1, 2, &w).unwrap();
        let target = enumerate_compositions(1, 5);
        let source = enumerate_compositions(2, 5);
        let r = target.rank(&comp(&[1, 0, 0, 0, 0])).unwrap();
        let c = source.rank(&comp(&[2, 0, 0, 0, 0])).unwrap();
        assert_eq!(m.get(r, c), rat(3, 2));
    }

    #[test]
    fn differential_shapes() {
        let spec = OperatorSpec::tri(5, 1).unwrap();
        let w = weights(Family::Tri, &["1/3", "1/3", "1/3"]);
        let d1 = build_differential(&spec, 1, &w).unwrap();
        assert_eq!((d1.rows(), d1.cols()), (3, 5));
        // truncated tail: d2 maps into empty spaces for k = 1
        let d2 = build_differential(&spec, 2, &w).unwrap();
        assert_eq!((d2.rows(), d2.cols()), (0, 3));
        assert!(matches!(
            build_differential(&spec, 4, &w),
            Err(Error::LevelUnavailable { .. })
        ));
        let lin = OperatorSpec::lin(5, 2, 0, 0).unwrap();
        let wl = weights(Family::Lin, &["1/3"]);
        assert!(matches!(
            build_differential(&lin, 2, &wl),
            Err(Error::LevelUnavailable { .. })
        ));
    }

    #[test]
    fn complex_property_all_levels() {
        let w = weights(Family::Tri, &["1/3", "2/5", "1/7"]);
        for k in 0..=4u32 {
            let spec = OperatorSpec::tri(5, k).unwrap();
            let d1 = build_differential(&spec, 1, &w).unwrap();
            let d2 = build_differential(&spec, 2, &w).unwrap();
            let d3 = build_differential(&spec, 3, &w).unwrap();
            assert!(compose(&d2, &d1).unwrap().is_zero(), "d2 d1 != 0 at k={k}");
            assert!(compose(&d3, &d2).unwrap().is_zero(), "d3 d2 != 0 at k={k}");
        }
    }

    #[test]
    fn inner2_second_differential_uses_twisted_shift() {
        // the twisted F2' blocks differ from plain F2 whenever slot 3 or 4
        // is occupied, so compare the assembled block against both
        let spec = OperatorSpec::or_inner2(5, 2, 0).unwrap();
        let w = weights(Family::OrInner2, &["1/3", "2/5"]);
        let d2 = build_differential(&spec, 2, &w).unwrap();
        let first_block_plain = build_shift_matrix(&spec, F1, 1, &w)
            .unwrap()
            .add(&build_shift_matrix(&spec, F2, 1, &w).unwrap())
            .unwrap()
            .add(&build_shift_matrix(&spec, F4, 1, &w).unwrap())
            .unwrap();
        let first_block_twisted = build_shift_matrix(&spec, F1, 1, &w)
            .unwrap()
            .add(&build_shift_matrix(&spec, F2Prime, 1, &w).unwrap())
            .unwrap()
            .add(&build_shift_matrix(&spec, F4, 1, &w).unwrap())
            .unwrap();
        let rows = first_block_twisted.rows();
        let cols = first_block_twisted.cols();
        let mut got = ExactMatrix::zero(rows, cols);
        for (r, c, v) in d2.iter() {
            if c < cols {
                got.set(r, c, v.clone());
            }
        }
        assert_eq!(got, first_block_twisted);
        assert_ne!(got, first_block_plain);
        // and the complex still closes
        let d1 = build_differential(&spec, 1, &w).unwrap();
        assert!(compose(&d2, &d1).unwrap().is_zero());
    }

    #[test]
    fn commutation_relations_hold() {
        let spec = OperatorSpec::tri(5, 3).unwrap();
        let w = weights(Family::Tri, &["1/3", "2/5", "1/7"]);
        let report = verify_commutation_relations(&spec, &w, 3).unwrap();
        assert!(report.all_hold, "{:?}", report.relations);
        assert!(verify_commutation_relations(&spec, &w, 1).is_err());
    }

    #[test]
    fn untwisted_exchange_fails_generically() {
        // F3 F2 differs from F2 F3; only the twisted exchange holds
        let spec = OperatorSpec::tri(5, 2).unwrap();
        let w = weights(Family::Tri, &["1/3", "2/5", "1/7"]);
        let f3f2 = compose(
            &build_shift_matrix(&spec, F3, 1, &w).unwrap(),
            &build_shift_matrix(&spec, F2, 2, &w).unwrap(),
        )
        .unwrap();
        let f2f3 = compose(
            &build_shift_matrix(&spec, F2, 1, &w).unwrap(),
            &build_shift_matrix(&spec, F3, 2, &w).unwrap(),
        )
        .unwrap();
        assert_ne!(f3f2, f2f3);
        let f2pf3 = compose(
            &build_shift_matrix(&spec, F2Prime, 1, &w).unwrap(),
            &build_shift_matrix(&spec, F3, 2, &w).unwrap(),
        )
        .unwrap();
        assert_eq!(f3f2, f2pf3);
    }

    #[test]
    fn right_inverse_round_trip() {
        let spec = OperatorSpec::tri(5, 2).unwrap();
        let w = weights(Family::Tri, &["1/3", "1/3", "1/3"]);
        for variant in variants_for(Family::Tri) {
            for s in 1..=3i64 {
                let f = build_shift_matrix(&spec, *variant, s, &w).unwrap();
                let g = right_inverse_matrix(&spec, *variant, s, &w).unwrap();
                let prod = compose(&f, &g).unwrap();
                assert_eq!(prod, ExactMatrix::identity(f.rows()), "{variant} at {s}");
                // rows of G indexed by alpha with alpha_slot == 0 vanish
                let target = spec.index_set(s);
                for (row, beta) in target.iter().enumerate() {
                    if beta.part(variant.slot()) == 0 {
                        for (r, _, _) in g.iter() {
                            assert_ne!(r, row);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_weight_detected() {
        // choose w3 with n/2 + w3 - 1 = 0 so the F5 coefficient vanishes at
        // the origin
        let spec = OperatorSpec::tri(5, 2).unwrap();
        let w3 = rat_int(1) - rat(5, 2);
        let w = WeightAssignment::new(Family::Tri, vec![rat(1, 3), rat(1, 3), w3]).unwrap();
        match right_inverse_matrix(&spec, F5, 1, &w) {
            Err(Error::DegenerateWeight { variant, alpha }) => {
                assert_eq!(variant, "F5");
                assert_eq!(alpha, vec![0, 0, 0, 0, 0]);
            }
            other => panic!("expected DegenerateWeight, got {other:?}"),
        }
    }

    #[test]
    fn genericity_flags() {
        let w = weights(Family::Tri, &["1/3", "2/5", "1/7"]);
        assert!(w.is_generic());
        let w = weights(Family::Tri, &["1/2", "1/3", "3"]);
        assert!(!w.is_generic());
        assert_eq!(w.nongeneric_slots(), vec![1, 3]);
    }
}
