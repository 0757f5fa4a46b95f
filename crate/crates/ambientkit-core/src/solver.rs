//! Coefficient families and everything the crate can certify about them:
//! kernel bases of the first differential, recurrence residuals, Euler
//! characteristics, the symmetric-weight specializations and their index
//! permutation symmetries, and the closed-form Ovsienko--Redou coefficients.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::index::{cardinality, Composition, IndexSet};
use crate::linalg::{self, certify_exactness, ExactMatrix, ExactnessReport};
use crate::rat::{fmt_rat, parse_rat, rat, rat_int, rising_product, Rat};
use crate::shift::{build_differential, Family, OperatorSpec, WeightAssignment};

/// An exact-rational-valued function on the top composition index set of an
/// operator family. Zeros are stored explicitly: every composition of the
/// index set has an entry, in enumeration order.
#[derive(Debug, Clone)]
pub struct CoefficientFamily {
    spec: OperatorSpec,
    weights: WeightAssignment,
    index: IndexSet,
    values: Vec<Rat>,
}

impl CoefficientFamily {
    pub fn new(spec: OperatorSpec, weights: WeightAssignment, values: Vec<Rat>) -> Result<Self> {
        let index = spec.index_set(spec.top_degree());
        if values.len() != index.cardinality() {
            return Err(Error::IndexMismatch(format!(
                "family on {} indices, got {} values",
                index.cardinality(),
                values.len()
            )));
        }
        Ok(CoefficientFamily {
            spec,
            weights,
            index,
            values,
        })
    }

    pub fn from_fn(
        spec: OperatorSpec,
        weights: WeightAssignment,
        f: impl Fn(&Composition) -> Rat,
    ) -> Self {
        let index = spec.index_set(spec.top_degree());
        let values = index.iter().map(&f).collect();
        CoefficientFamily {
            spec,
            weights,
            index,
            values,
        }
    }

    pub fn constant(spec: OperatorSpec, weights: WeightAssignment, c: Rat) -> Self {
        Self::from_fn(spec, weights, |_| c.clone())
    }

    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    pub fn weights(&self) -> &WeightAssignment {
        &self.weights
    }

    pub fn index(&self) -> &IndexSet {
        &self.index
    }

    pub fn vector(&self) -> &[Rat] {
        &self.values
    }

    pub fn value(&self, alpha: &Composition) -> Result<&Rat> {
        Ok(&self.values[self.index.rank(alpha)?])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Composition, &Rat)> {
        self.index.iter().zip(self.values.iter())
    }

    /// Copy with one entry replaced; used for mutation tests.
    pub fn with_value(&self, alpha: &Composition, v: Rat) -> Result<Self> {
        let mut out = self.clone();
        let i = out.index.rank(alpha)?;
        out.values[i] = v;
        Ok(out)
    }

    /// Exact membership test in the kernel of the first differential at this
    /// family's weights.
    pub fn is_in_kernel(&self) -> Result<bool> {
        let d1 = build_differential(&self.spec, 1, &self.weights)?;
        Ok(d1.apply(&self.values)?.iter().all(|x| x.is_zero()))
    }

    /// Whether the values agree with themselves under a permutation of the
    /// index slots (given as the source slot for each position, from 1).
    pub fn symmetric_under(&self, source_slots: &[usize]) -> bool {
        self.iter().all(|(alpha, v)| {
            let image = alpha.permuted(source_slots);
            self.value(&image).map(|u| u == v).unwrap_or(false)
        })
    }
}

/// A basis of coefficient families spanning the kernel of `d_1`.
#[derive(Debug, Clone)]
pub struct FamilyBasis {
    pub spec: OperatorSpec,
    pub weights: WeightAssignment,
    pub members: Vec<CoefficientFamily>,
    /// Genericity verdict of the weights; only defined for the
    /// tridifferential family.
    pub generic: Option<bool>,
}

impl FamilyBasis {
    pub fn dimension(&self) -> usize {
        self.members.len()
    }
}

/// Extra equations for the boundary case `n == 2k`, which pin the
/// coefficients at the extreme indices the relaxed hypotheses leave free.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    pub boundary_constraints: bool,
}

/// Compute a deterministic basis of the solution space of the family's
/// recurrence relations: the kernel of `d_1` at the given weights.
pub fn solve_family(spec: &OperatorSpec, w: &WeightAssignment) -> Result<FamilyBasis> {
    solve_family_with_options(spec, w, SolveOptions::default())
}

pub fn solve_family_with_options(
    spec: &OperatorSpec,
    w: &WeightAssignment,
    options: SolveOptions,
) -> Result<FamilyBasis> {
    let mut d1 = build_differential(spec, 1, w)?;
    if options.boundary_constraints {
        d1 = append_boundary_constraints(spec, &d1)?;
    }
    let kernel = linalg::kernel_basis(&d1);
    let members = kernel
        .vectors
        .into_iter()
        .map(|v| CoefficientFamily::new(*spec, w.clone(), v))
        .collect::<Result<Vec<_>>>()?;
    let generic = match spec.family() {
        Family::Tri => Some(w.is_generic()),
        _ => None,
    };
    Ok(FamilyBasis {
        spec: *spec,
        weights: w.clone(),
        members,
        generic,
    })
}

/// Rows equating the extreme coefficients, per the boundary remarks: all
/// three of `A` at `(m,0,0)`, `(0,m,0)`, `(0,0,m)` for the outer
/// bidifferential family, and `A` at `(0,0,m,0)`, `(0,0,0,m)` for the inner
/// one.
fn append_boundary_constraints(spec: &OperatorSpec, d1: &ExactMatrix) -> Result<ExactMatrix> {
    let m = spec.top_degree();
    let top = spec.index_set(m);
    let m = m as u32;
    let pairs: Vec<(Vec<u32>, Vec<u32>)> = match spec.family() {
        Family::OrOuter => vec![
            (vec![m, 0, 0], vec![0, m, 0]),
            (vec![0, m, 0], vec![0, 0, m]),
        ],
        Family::OrInner => vec![(vec![0, 0, m, 0], vec![0, 0, 0, m])],
        other => {
            return Err(Error::PreconditionViolated(format!(
                "boundary constraints are defined for OR_OUTER and OR_INNER, not {other}"
            )))
        }
    };
    let mut out = ExactMatrix::zero(d1.rows() + pairs.len(), d1.cols());
    out.paste(0, 0, d1);
    for (i, (a, b)) in pairs.into_iter().enumerate() {
        let ca = top.rank(&Composition::new(a))?;
        let cb = top.rank(&Composition::new(b))?;
        out.set(d1.rows() + i, ca, Rat::one());
        out.set(d1.rows() + i, cb, -Rat::one());
    }
    Ok(out)
}

/// Alternating sum of the index-set cardinalities of the family's chain
/// complex, from exact binomials. This is the generic kernel dimension and
/// the guaranteed lower bound everywhere.
pub fn euler_characteristic(family: Family, top_degree: i64) -> i64 {
    let l = family.slots();
    let card = |d: i64| cardinality(d, l) as i128;
    let chi: i128 = match family {
        Family::Tri => {
            card(top_degree) - 3 * card(top_degree - 1) + 3 * card(top_degree - 2)
                - card(top_degree - 3)
        }
        Family::Lin => card(top_degree) - card(top_degree - 1),
        Family::OrOuter | Family::OrInner | Family::OrInner2 => {
            card(top_degree) - 2 * card(top_degree - 1) + card(top_degree - 2)
        }
    };
    chi as i64
}

/// The guaranteed lower bound on the kernel dimension; coincides with the
/// Euler characteristic for every family.
pub fn family_lower_bound(spec: &OperatorSpec) -> i64 {
    euler_characteristic(spec.family(), spec.top_degree())
}

/// The unique weights at which formal self-adjointness is possible: all
/// inputs carry `-(n-2k)/r` with `r` the operator rank (inputs plus one).
pub fn fsa_weights(spec: &OperatorSpec) -> WeightAssignment {
    let divisor = match spec.family() {
        Family::Tri => 4,
        Family::Lin => 2,
        _ => 3,
    };
    let w = rat(-(spec.n() as i64 - 2 * spec.k() as i64), divisor);
    WeightAssignment::new(spec.family(), vec![w; spec.arity()])
        .expect("arity matches by construction")
}

/// One residual family of a recurrence check, indexed one degree below the
/// coefficient family.
#[derive(Debug, Clone)]
pub struct ResidualFamily {
    pub label: &'static str,
    pub index: IndexSet,
    pub values: Vec<Rat>,
}

impl ResidualFamily {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn nonzero_positions(&self) -> Vec<Composition> {
        self.index
            .iter()
            .zip(self.values.iter())
            .filter(|(_, v)| !v.is_zero())
            .map(|(a, _)| a.clone())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RecurrenceReport {
    pub residuals: Vec<ResidualFamily>,
    pub all_zero: bool,
}

impl RecurrenceReport {
    pub fn first_failure(&self) -> Option<(&'static str, Composition)> {
        for r in &self.residuals {
            if let Some(alpha) = r.nonzero_positions().into_iter().next() {
                return Some((r.label, alpha));
            }
        }
        None
    }
}

/// Evaluate the family's defining recurrences directly, term by term,
/// independently of the shift-matrix pipeline, and report the residuals.
///
/// A coefficient family defines a tangential operator exactly when every
/// residual vanishes; on kernel members of `d_1` this must come out zero,
/// which cross-validates the two encodings of the same relations.
pub fn verify_recurrences(a: &CoefficientFamily) -> Result<RecurrenceReport> {
    let spec = a.spec();
    let w = a.weights();
    let n2 = rat(spec.n() as i64, 2);
    let k2 = rat_int(2 * spec.k() as i64);
    let one = Rat::one();
    let two = rat_int(2);
    let low = spec.index_set(spec.top_degree() - 1);

    // A at alpha + e_j, and alpha_j as a rational
    let at = |alpha: &Composition, j: usize| -> Result<Rat> {
        Ok(a.value(&alpha.bump(j)?)?.clone())
    };
    let ai = |alpha: &Composition, j: usize| rat_int(alpha.part(j) as i64);

    let mut residuals: Vec<ResidualFamily> = Vec::new();
    let mut push = |label: &'static str, values: Vec<Rat>| {
        residuals.push(ResidualFamily {
            label,
            index: low.clone(),
            values,
        });
    };

    match spec.family() {
        Family::Tri => {
            let (w1, w2, w3) = (w.w(1), w.w(2), w.w(3));
            let wt = w.total();
            let mut b1 = Vec::with_capacity(low.cardinality());
            let mut b2 = Vec::with_capacity(low.cardinality());
            let mut b3 = Vec::with_capacity(low.cardinality());
            for alpha in low.iter() {
                let outer = (&n2 + &wt - &k2 + ai(alpha, 1) + &one) * at(alpha, 1)?;
                let middle = (&n2 + w1 + w2
                    - ai(alpha, 2)
                    - &two * (ai(alpha, 3) + ai(alpha, 4))
                    - &one)
                    * at(alpha, 2)?;
                b1.push((&n2 + w1 - ai(alpha, 3) - &one) * at(alpha, 3)? + &outer + &middle);
                b2.push((&n2 + w2 - ai(alpha, 4) - &one) * at(alpha, 4)? + &outer + &middle);
                b3.push((&n2 + w3 - ai(alpha, 5) - &one) * at(alpha, 5)? + &outer);
            }
            push("commutator residual, slot 1", b1);
            push("commutator residual, slot 2", b2);
            push("commutator residual, slot 3", b3);
        }
        Family::Lin => {
            let wv = w.w(1);
            let l2 = rat_int(2 * spec.l2() as i64);
            let mut b = Vec::with_capacity(low.cardinality());
            for alpha in low.iter() {
                b.push(
                    (&n2 + wv - ai(alpha, 3) - &one) * at(alpha, 3)?
                        + (&n2 + wv - &k2 + ai(alpha, 1) + &one) * at(alpha, 1)?
                        + (&n2 + wv - &l2 - ai(alpha, 2) - &two * ai(alpha, 3) - &one)
                            * at(alpha, 2)?,
                );
            }
            push("commutator residual", b);
        }
        Family::OrOuter => {
            let (w1, w2) = (w.w(1), w.w(2));
            let wt = w.total();
            let mut b1 = Vec::with_capacity(low.cardinality());
            let mut b2 = Vec::with_capacity(low.cardinality());
            for alpha in low.iter() {
                let outer = (&n2 + &wt - &k2 + ai(alpha, 1) + &one) * at(alpha, 1)?;
                b1.push((&n2 + w1 - ai(alpha, 2) - &one) * at(alpha, 2)? + &outer);
                b2.push((&n2 + w2 - ai(alpha, 3) - &one) * at(alpha, 3)? + &outer);
            }
            push("commutator residual, slot 1", b1);
            push("commutator residual, slot 2", b2);
        }
        Family::OrInner => {
            let (w1, w2) = (w.w(1), w.w(2));
            let wt = w.total();
            let l2 = rat_int(2 * spec.total_invariant_weight() as i64);
            let mut b1 = Vec::with_capacity(low.cardinality());
            let mut b2 = Vec::with_capacity(low.cardinality());
            for alpha in low.iter() {
                let outer = (&n2 + &wt - &k2 + ai(alpha, 1) + &one) * at(alpha, 1)?;
                b1.push((&n2 + w1 - ai(alpha, 2) - &one) * at(alpha, 2)? + &outer);
                b2.push(
                    (&n2 + w2 - ai(alpha, 4) - &one) * at(alpha, 4)?
                        + &outer
                        + (&n2 + w2 - &l2 - ai(alpha, 3) - &two * ai(alpha, 4) - &one)
                            * at(alpha, 3)?,
                );
            }
            push("commutator residual, slot 1", b1);
            push("commutator residual, slot 2", b2);
        }
        Family::OrInner2 => {
            let (w1, w2) = (w.w(1), w.w(2));
            let wt = w.total();
            let mut b1 = Vec::with_capacity(low.cardinality());
            let mut b2 = Vec::with_capacity(low.cardinality());
            for alpha in low.iter() {
                let outer = (&n2 + &wt - &k2 + ai(alpha, 1) + &one) * at(alpha, 1)?;
                let middle = (&n2 + &wt
                    - ai(alpha, 2)
                    - &two * (ai(alpha, 3) + ai(alpha, 4))
                    - &one)
                    * at(alpha, 2)?;
                b1.push((&n2 + w1 - ai(alpha, 3) - &one) * at(alpha, 3)? + &outer + &middle);
                b2.push((&n2 + w2 - ai(alpha, 4) - &one) * at(alpha, 4)? + &outer + &middle);
            }
            push("commutator residual, slot 1", b1);
            push("commutator residual, slot 2", b2);
        }
    }

    let all_zero = residuals.iter().all(|r| r.is_zero());
    Ok(RecurrenceReport {
        residuals,
        all_zero,
    })
}

/// Index-permutation symmetries of a tridifferential family at the
/// symmetric weights.
#[derive(Debug, Clone)]
pub struct FsaSymmetryReport {
    /// The symmetric-weight recurrences themselves, checked first.
    pub recurrences_hold: bool,
    /// Invariance under swapping slots 3 and 4.
    pub swap_inner: bool,
    /// Invariance under swapping slots 1 and 5.
    pub swap_outer: bool,
    /// Invariance under the involution `(a3, a2, a1, a5, a4)`.
    pub involution: bool,
}

impl FsaSymmetryReport {
    pub fn all_hold(&self) -> bool {
        self.recurrences_hold && self.swap_inner && self.swap_outer && self.involution
    }
}

pub const SWAP_INNER: [usize; 5] = [1, 2, 4, 3, 5];
pub const SWAP_OUTER: [usize; 5] = [5, 2, 3, 4, 1];
pub const INVOLUTION: [usize; 5] = [3, 2, 1, 5, 4];

/// Check the three index-permutation symmetries of a tridifferential family
/// at weights `-(n-2k)/4` with `n > 2k`.
///
/// The symmetric-weight form of the recurrences is evaluated first, with its
/// own integer coefficients `n + 2k - 4 a_j - 4`, independent of the other
/// two encodings; the permutation checks then compare values exactly under
/// the slot swaps 3<->4 and 1<->5 and the involution.
pub fn verify_fsa_symmetries(a: &CoefficientFamily) -> Result<FsaSymmetryReport> {
    let spec = a.spec();
    if spec.family() != Family::Tri {
        return Err(Error::PreconditionViolated(format!(
            "index-permutation symmetries apply to the TRI family, not {}",
            spec.family()
        )));
    }
    if spec.n() as i64 <= 2 * spec.k() as i64 {
        return Err(Error::PreconditionViolated(format!(
            "need n > 2k, got n={}, k={}",
            spec.n(),
            spec.k()
        )));
    }
    if a.weights() != &fsa_weights(spec) {
        return Err(Error::PreconditionViolated(
            "weights are not the symmetric weights -(n-2k)/4".to_string(),
        ));
    }
    let n = spec.n() as i64;
    let k = spec.k() as i64;
    let coeff = |aj: u32| rat_int(n + 2 * k - 4 * aj as i64 - 4);
    let low = spec.index_set(spec.top_degree() - 1);
    let mut recurrences_hold = true;
    'outer: for alpha in low.iter() {
        let v = |j: usize| -> Result<Rat> { Ok(a.value(&alpha.bump(j)?)?.clone()) };
        let c = |j: usize| coeff(alpha.part(j));
        let drift = rat_int(
            alpha.part(1) as i64 - alpha.part(3) as i64 - alpha.part(4) as i64
                + alpha.part(5) as i64,
        );
        let checks = [
            c(3) * v(3)? - c(4) * v(4)?,
            c(5) * v(5)? - c(1) * v(1)?,
            c(3) * v(3)? - c(1) * v(1)? + rat_int(4) * drift * v(2)?,
        ];
        for r in checks {
            if !r.is_zero() {
                recurrences_hold = false;
                break 'outer;
            }
        }
    }
    Ok(FsaSymmetryReport {
        recurrences_hold,
        swap_inner: a.symmetric_under(&SWAP_INNER),
        swap_outer: a.symmetric_under(&SWAP_OUTER),
        involution: a.symmetric_under(&INVOLUTION),
    })
}

/// The cyclic symmetrization of a tridifferential family at the symmetric
/// weights: three input orderings sharing the same coefficients. Consumed by
/// the ambient oracle's operator evaluation.
#[derive(Debug, Clone)]
pub struct SymmetrizedOperator {
    pub base: CoefficientFamily,
    /// Input slots (from 1) feeding each of the three summands.
    pub orderings: [[usize; 3]; 3],
}

pub fn symmetrize_family(a: &CoefficientFamily) -> Result<SymmetrizedOperator> {
    if a.spec().family() != Family::Tri {
        return Err(Error::PreconditionViolated(
            "symmetrization is defined for the TRI family".to_string(),
        ));
    }
    if a.weights() != &fsa_weights(a.spec()) {
        return Err(Error::PreconditionViolated(
            "symmetrization requires the symmetric weights -(n-2k)/4".to_string(),
        ));
    }
    Ok(SymmetrizedOperator {
        base: a.clone(),
        orderings: [[1, 2, 3], [2, 3, 1], [3, 1, 2]],
    })
}

/// Outcome of the two-slot induction check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoSlotReport {
    pub hypothesis_holds: bool,
    pub symmetric: bool,
}

/// Harness for the elementary induction step behind the permutation
/// symmetries: given values on pairs summing to `degree` (in enumeration
/// order) and a nowhere-zero `f` on `0..=degree`, check the cross relation
/// `f(a1+1) A(a1+1, a2) == f(a2+1) A(a1, a2+1)` and whether `A` is
/// symmetric. Whenever the relation holds, symmetry must follow.
pub fn check_two_slot_symmetry(values: &[Rat], degree: u32, f: &[Rat]) -> Result<TwoSlotReport> {
    if f.len() != degree as usize + 1 {
        return Err(Error::IndexMismatch(format!(
            "need f on 0..={degree}, got {} values",
            f.len()
        )));
    }
    if let Some(i) = f.iter().position(|x| x.is_zero()) {
        return Err(Error::ZeroDenominator(format!("f({i}) = 0")));
    }
    let top = crate::index::enumerate_compositions(degree as i64, 2);
    if values.len() != top.cardinality() {
        return Err(Error::IndexMismatch(format!(
            "need {} values, got {}",
            top.cardinality(),
            values.len()
        )));
    }
    let at = |a1: u32, a2: u32| -> Result<&Rat> {
        Ok(&values[top.rank(&Composition::new(vec![a1, a2]))?])
    };
    let mut hypothesis_holds = true;
    if degree > 0 {
        for alpha in crate::index::enumerate_compositions(degree as i64 - 1, 2).iter() {
            let (a1, a2) = (alpha.part(1), alpha.part(2));
            let lhs = &f[a1 as usize + 1] * at(a1 + 1, a2)?;
            let rhs = &f[a2 as usize + 1] * at(a1, a2 + 1)?;
            if lhs != rhs {
                hypothesis_holds = false;
                break;
            }
        }
    }
    let mut symmetric = true;
    for alpha in top.iter() {
        if at(alpha.part(1), alpha.part(2))? != at(alpha.part(2), alpha.part(1))? {
            symmetric = false;
            break;
        }
    }
    Ok(TwoSlotReport {
        hypothesis_holds,
        symmetric,
    })
}

/// The closed-form Ovsienko--Redou coefficients for the outer bidifferential
/// family with no invariant, at the symmetric weights. The Gamma quotients
/// rationalize through rising products:
///
/// `A(alpha) = prod_i (x)_{k - alpha_i} / ((x)_k)^2` with `x = (n-2k)/6`,
/// normalized so that `A(k, 0, 0) = 1`.
pub fn or_closed_form(n: u32, k: u32) -> Result<CoefficientFamily> {
    if n as i64 <= 2 * k as i64 {
        return Err(Error::PreconditionViolated(format!(
            "the closed form needs n > 2k, got n={n}, k={k}"
        )));
    }
    let spec = OperatorSpec::or_outer(n, k, 0)?;
    let weights = fsa_weights(&spec);
    let x = rat(n as i64 - 2 * k as i64, 6);
    let denom = rising_product(&x, k).pow(2);
    Ok(CoefficientFamily::from_fn(spec, weights, |alpha| {
        let num: Rat = alpha
            .parts()
            .iter()
            .map(|&ai| rising_product(&x, k - ai))
            .product();
        num / &denom
    }))
}

/// Residuals of the symmetric-weight recurrences for the outer
/// bidifferential family: `((n+4k)/6 - a_j - 1) A(alpha + e_j)` must agree
/// across all three slots. Independent of both the general recurrence
/// encoding and the shift matrices.
pub fn verify_or_fsa_recurrences(a: &CoefficientFamily) -> Result<bool> {
    let spec = a.spec();
    if spec.family() != Family::OrOuter {
        return Err(Error::PreconditionViolated(format!(
            "symmetric-weight recurrences target OR_OUTER, not {}",
            spec.family()
        )));
    }
    let top = rat(spec.n() as i64 + 4 * spec.k() as i64, 6);
    let low = spec.index_set(spec.top_degree() - 1);
    for alpha in low.iter() {
        let term = |j: usize| -> Result<Rat> {
            Ok((&top - rat_int(alpha.part(j) as i64) - Rat::one()) * a.value(&alpha.bump(j)?)?)
        };
        let t1 = term(1)?;
        if t1 != term(2)? || t1 != term(3)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Report of the generic-exactness certification of the tridifferential
/// chain complex.
#[derive(Debug, Clone)]
pub struct GenericExactnessReport {
    pub generic: bool,
    /// Weight slots (from 1) failing the genericity test.
    pub nongeneric_slots: Vec<usize>,
    pub junction_first: ExactnessReport,
    pub junction_second: ExactnessReport,
    pub final_map_surjective: bool,
    pub dim_ker_d1: usize,
    pub chi: i64,
}

impl GenericExactnessReport {
    pub fn is_complex(&self) -> bool {
        self.junction_first.is_complex && self.junction_second.is_complex
    }

    pub fn all_exact(&self) -> bool {
        self.junction_first.exact && self.junction_second.exact && self.final_map_surjective
    }

    /// Exactness everywhere forces the kernel dimension to equal the Euler
    /// characteristic.
    pub fn dimension_matches_chi(&self) -> bool {
        self.dim_ker_d1 as i64 == self.chi
    }
}

/// Certify exactness of the tridifferential complex at every junction and
/// surjectivity of the final map, and report the resulting kernel dimension
/// against the Euler characteristic.
///
/// Non-generic weights are reported, not fatal: the checks still run, and
/// failed junctions there only mean the kernel dimension can exceed the
/// Euler characteristic.
pub fn certify_generic_exactness(
    spec: &OperatorSpec,
    w: &WeightAssignment,
) -> Result<GenericExactnessReport> {
    if spec.family() != Family::Tri {
        return Err(Error::PreconditionViolated(format!(
            "generic exactness certification targets the TRI complex, not {}",
            spec.family()
        )));
    }
    let d1 = build_differential(spec, 1, w)?;
    let d2 = build_differential(spec, 2, w)?;
    let d3 = build_differential(spec, 3, w)?;
    let junction_first = certify_exactness(&d1, &d2)?;
    let junction_second = certify_exactness(&d2, &d3)?;
    let final_map_surjective = linalg::rank(&d3) == d3.rows();
    let dim_ker_d1 = d1.cols() - junction_first.rank_in;
    Ok(GenericExactnessReport {
        generic: w.is_generic(),
        nongeneric_slots: w.nongeneric_slots(),
        junction_first,
        junction_second,
        final_map_surjective,
        dim_ker_d1,
        chi: euler_characteristic(Family::Tri, spec.top_degree()),
    })
}

// ---- serialization ----

fn spec_json_fields(spec: &OperatorSpec) -> Vec<(&'static str, Value)> {
    let mut fields = vec![
        ("family", json!(spec.family().name())),
        ("n", json!(spec.n())),
        ("k", json!(spec.k())),
    ];
    match spec.family() {
        Family::Tri => {}
        Family::Lin => {
            fields.push(("l1", json!(spec.l1())));
            fields.push(("l2", json!(spec.l2())));
        }
        _ => fields.push(("l", json!(spec.l1()))),
    }
    fields
}

/// Serialize a family basis to the `family.json` document layout.
pub fn family_basis_to_json(basis: &FamilyBasis) -> Value {
    let mut obj = serde_json::Map::new();
    for (k, v) in spec_json_fields(&basis.spec) {
        obj.insert(k.to_string(), v);
    }
    obj.insert("weights".to_string(), json!(basis.weights.to_strings()));
    obj.insert(
        "generic".to_string(),
        basis.generic.map_or(Value::Null, Value::Bool),
    );
    let members: Vec<Value> = basis
        .members
        .iter()
        .map(|m| {
            let entries: Vec<Value> = m
                .iter()
                .map(|(alpha, v)| {
                    json!({
                        "alpha": alpha.parts(),
                        "value": fmt_rat(v),
                    })
                })
                .collect();
            json!({ "entries": entries })
        })
        .collect();
    obj.insert("basis".to_string(), Value::Array(members));
    Value::Object(obj)
}

fn get_u32(v: &Value, key: &str) -> Result<u32> {
    v.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as u32)
        .ok_or_else(|| Error::Parse(format!("missing or invalid `{key}`")))
}

/// Parse a `family.json` document back into a basis.
pub fn family_basis_from_json(v: &Value) -> Result<FamilyBasis> {
    let family = Family::parse(
        v.get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("missing `family`".to_string()))?,
    )?;
    let n = get_u32(v, "n")?;
    let k = get_u32(v, "k")?;
    let (l1, l2) = match family {
        Family::Tri => (0, 0),
        Family::Lin => (get_u32(v, "l1")?, get_u32(v, "l2")?),
        _ => (get_u32(v, "l")?, 0),
    };
    let spec = OperatorSpec::new(family, n, k, l1, l2)?;
    let weights = WeightAssignment::new(
        family,
        v.get("weights")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing `weights`".to_string()))?
            .iter()
            .map(|s| {
                parse_rat(
                    s.as_str()
                        .ok_or_else(|| Error::Parse("weights must be strings".to_string()))?,
                )
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    let generic = v.get("generic").and_then(Value::as_bool);
    let index = spec.index_set(spec.top_degree());
    let mut members = Vec::new();
    for member in v
        .get("basis")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing `basis`".to_string()))?
    {
        let entries = member
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing `entries`".to_string()))?;
        let mut values = vec![Rat::zero(); index.cardinality()];
        let mut seen = vec![false; index.cardinality()];
        for e in entries {
            let parts: Vec<u32> = e
                .get("alpha")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("entry without `alpha`".to_string()))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|u| u as u32)
                        .ok_or_else(|| Error::Parse("alpha parts must be integers".to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            let pos = index.rank(&Composition::new(parts))?;
            values[pos] = parse_rat(
                e.get("value")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("entry without `value`".to_string()))?,
            )?;
            seen[pos] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Parse(
                "family entries must cover the whole index set".to_string(),
            ));
        }
        members.push(CoefficientFamily::new(spec, weights.clone(), values)?);
    }
    Ok(FamilyBasis {
        spec,
        weights,
        members,
        generic,
    })
}

/// CSV alternative: one row per (member, alpha), quoted alpha and value.
pub fn family_basis_to_csv(basis: &FamilyBasis) -> String {
    let mut out = String::from("member,alpha,value\n");
    for (i, m) in basis.members.iter().enumerate() {
        for (alpha, v) in m.iter() {
            let parts: Vec<String> = alpha.parts().iter().map(u32::to_string).collect();
            out.push_str(&format!(
                "{i},\"[{}]\",\"{}\"\n",
                parts.join(","),
                fmt_rat(v)
            ));
        }
    }
    out
}
