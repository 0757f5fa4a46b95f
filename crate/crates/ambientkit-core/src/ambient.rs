//! Symbolic polynomial calculus on the flat ambient model.
//!
//! The model is `R^{n+2}` with the quadratic form `Q = -x0^2 + x1^2 + ... +
//! x_{n+1}^2` of signature `(n+1, 1)` and the positive-spectrum Laplacian
//! convention `Lap = d0^2 - (d1^2 + ... + d_{n+1}^2)`, so that `Lap Q =
//! -2(n+2)`. Homogeneous polynomials of degree `w` realize density weight
//! `w`, and membership in the ideal generated by `Q` is decided by exact
//! division. This gives an independent, end-to-end check of tangentiality:
//! an operator is tangential precisely when feeding it a multiple of `Q`
//! lands back in the ideal, equivalently when it commutes with
//! multiplication by `Q` across each slot.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::index::{enumerate_compositions, multinomial};
use crate::linalg::{self, ExactMatrix};
use crate::rat::{fmt_rat, parse_rat, rat_int, Rat};
use crate::shift::Family;
use crate::solver::{CoefficientFamily, SymmetrizedOperator};

/// A multivariate polynomial with exact rational coefficients, stored as a
/// map from exponent multi-indices to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPolynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl GradedPolynomial {
    pub fn zero(nvars: usize) -> Self {
        GradedPolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn monomial(exps: Vec<u32>, coef: Rat) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, coef);
        p
    }

    /// The variable `x_i`.
    pub fn variable(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Self::monomial(exps, Rat::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(exps.len(), self.nvars);
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &GradedPolynomial) -> GradedPolynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GradedPolynomial) -> GradedPolynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedPolynomial {
        GradedPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> GradedPolynomial {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        GradedPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &GradedPolynomial) -> GradedPolynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    /// First partial derivative in variable `i`.
    pub fn partial(&self, i: usize) -> GradedPolynomial {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[i] -= 1;
            out.add_term(exps, c * rat_int(e[i] as i64));
        }
        out
    }

    /// Total degree of the highest term, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Homogeneous degree if all terms share one; `None` when mixed or zero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// The zero polynomial counts as homogeneous of any degree.
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Term-list serialization `[{"coef": "p/q", "exps": [...]}, ...]`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| json!({ "exps": e, "coef": fmt_rat(c) }))
                .collect(),
        )
    }

    pub fn from_json(nvars: usize, v: &Value) -> Result<Self> {
        let mut out = Self::zero(nvars);
        for t in v
            .as_array()
            .ok_or_else(|| Error::Parse("polynomial must be a term array".to_string()))?
        {
            let exps: Vec<u32> = t
                .get("exps")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("term without `exps`".to_string()))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|u| u as u32)
                        .ok_or_else(|| Error::Parse("exponents must be integers".to_string()))
                })
                .collect::<Result<_>>()?;
            if exps.len() != nvars {
                return Err(Error::Parse("wrong variable count in term".to_string()));
            }
            let coef = parse_rat(
                t.get("coef")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("term without `coef`".to_string()))?,
            )?;
            out.add_term(exps, coef);
        }
        Ok(out)
    }
}

/// Euler (dilation) operator `X p = sum_i x_i d_i p`; multiplies each
/// homogeneous component by its degree.
pub fn euler_operator(p: &GradedPolynomial) -> GradedPolynomial {
    let mut out = GradedPolynomial::zero(p.nvars);
    for (e, c) in &p.terms {
        let deg: u32 = e.iter().sum();
        out.add_term(e.clone(), c * rat_int(deg as i64));
    }
    out
}

/// The flat ambient model over a base dimension `n`: polynomials in `n + 2`
/// variables with signature one minus, `n + 1` plus (variable 0 carries the
/// minus sign).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatModel {
    n: usize,
}

impl FlatModel {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        FlatModel { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.n + 2
    }

    /// The defining quadratic form `Q = -x0^2 + x1^2 + ... + x_{n+1}^2`.
    pub fn quadratic_form(&self) -> GradedPolynomial {
        let mut q = GradedPolynomial::zero(self.nvars());
        for i in 0..self.nvars() {
            let mut exps = vec![0; self.nvars()];
            exps[i] = 2;
            q.add_term(exps, if i == 0 { rat_int(-1) } else { Rat::one() });
        }
        q
    }

    /// The spatial part `x1^2 + ... + x_{n+1}^2`; reduction modulo `Q`
    /// rewrites `x0^2` into this.
    pub fn spatial_form(&self) -> GradedPolynomial {
        let mut s = GradedPolynomial::zero(self.nvars());
        for i in 1..self.nvars() {
            let mut exps = vec![0; self.nvars()];
            exps[i] = 2;
            s.add_term(exps, Rat::one());
        }
        s
    }

    /// The ambient Laplacian `d0^2 - (d1^2 + ... + d_{n+1}^2)`, signed so
    /// that `Lap Q = -2(n+2)`.
    pub fn laplacian(&self, p: &GradedPolynomial) -> GradedPolynomial {
        let mut out = GradedPolynomial::zero(self.nvars());
        for (e, c) in &p.terms {
            for i in 0..self.nvars() {
                if e[i] < 2 {
                    continue;
                }
                let mut exps = e.clone();
                exps[i] -= 2;
                let factor = rat_int(e[i] as i64 * (e[i] as i64 - 1));
                let signed = if i == 0 { c * factor } else { -(c * factor) };
                out.add_term(exps, signed);
            }
        }
        out
    }

    pub fn laplacian_power(&self, p: &GradedPolynomial, k: u32) -> GradedPolynomial {
        let mut out = p.clone();
        for _ in 0..k {
            out = self.laplacian(&out);
        }
        out
    }

    /// Signature pairing of gradients, `-d0 p d0 q + sum_{i>=1} d_i p d_i q`.
    pub fn gradient_pairing(
        &self,
        p: &GradedPolynomial,
        q: &GradedPolynomial,
    ) -> GradedPolynomial {
        let mut out = GradedPolynomial::zero(self.nvars());
        for i in 0..self.nvars() {
            let prod = p.partial(i).mul(&q.partial(i));
            out = if i == 0 { out.sub(&prod) } else { out.add(&prod) };
        }
        out
    }

    /// Unique remainder of `p` under division by `Q`, treated as a quadratic
    /// in `x0` with invertible leading coefficient; the remainder has
    /// `x0`-degree at most one and `p - remainder` is divisible by `Q`.
    pub fn remainder_mod_q(&self, p: &GradedPolynomial) -> GradedPolynomial {
        let mut work = p.clone();
        loop {
            let Some(d) = work.terms.keys().map(|e| e[0]).max() else {
                return work;
            };
            if d < 2 {
                return work;
            }
            // leading x0-slice, with its x0 power already lowered by 2
            let mut lead = GradedPolynomial::zero(self.nvars());
            for (e, c) in &work.terms {
                if e[0] == d {
                    let mut exps = e.clone();
                    exps[0] = d - 2;
                    lead.add_term(exps, c.clone());
                }
            }
            // Q has leading x0-coefficient -1, so adding lead * Q cancels
            // the degree-d slice and pushes it onto the spatial form
            work = work.add(&lead.mul(&self.quadratic_form()));
        }
    }

    /// Ideal membership: `p` is divisible by `Q` exactly when its remainder
    /// vanishes.
    pub fn divisible_by_q(&self, p: &GradedPolynomial) -> bool {
        self.remainder_mod_q(p).is_zero()
    }
}

/// Verify the operator identity behind tangentiality of Laplacian powers:
/// commuting `Lap^k` past multiplication by `Q` costs exactly
/// `-2k Lap^{k-1} (2X + n + 4 - 2k)`.
pub fn verify_sl2_commutator(model: &FlatModel, k: u32, p: &GradedPolynomial) -> bool {
    assert!(k >= 1);
    let q = model.quadratic_form();
    let lhs = model
        .laplacian_power(&q.mul(p), k)
        .sub(&q.mul(&model.laplacian_power(p, k)));
    let inner = euler_operator(p)
        .scale(&rat_int(2))
        .add(&p.scale(&rat_int(model.n() as i64 + 4 - 2 * k as i64)));
    let rhs = model
        .laplacian_power(&inner, k - 1)
        .scale(&rat_int(-2 * k as i64));
    lhs == rhs
}

/// The three-function Laplacian redistribution identity, for arbitrary
/// polynomials: one Laplacian over the triple product plus the three
/// single-factor terms equals the three pairwise-product terms.
pub fn verify_triple_product_identity(
    model: &FlatModel,
    u1: &GradedPolynomial,
    u2: &GradedPolynomial,
    u3: &GradedPolynomial,
) -> bool {
    let lap = |p: &GradedPolynomial| model.laplacian(p);
    let lhs = lap(&u1.mul(u2).mul(u3))
        .add(&u2.mul(u3).mul(&lap(u1)))
        .add(&u1.mul(u3).mul(&lap(u2)))
        .add(&u1.mul(u2).mul(&lap(u3)));
    let rhs = u1
        .mul(&lap(&u2.mul(u3)))
        .add(&u2.mul(&lap(&u1.mul(u3))))
        .add(&u3.mul(&lap(&u1.mul(u2))));
    lhs == rhs
}

/// Evaluate the operator defined by a coefficient family on concrete
/// polynomial inputs.
///
/// Only the zero-invariant mode is meaningful here: flat space has no
/// nonconstant scalar invariants, so families with positive invariant weight
/// are rejected. Inputs must be homogeneous; the output is homogeneous of
/// the input-degree sum minus `2k`.
pub fn apply_operator(
    model: &FlatModel,
    a: &CoefficientFamily,
    inputs: &[GradedPolynomial],
) -> Result<GradedPolynomial> {
    let spec = a.spec();
    if spec.total_invariant_weight() != 0 {
        return Err(Error::InvariantModeUnsupported {
            l1: spec.l1(),
            l2: spec.l2(),
        });
    }
    if inputs.len() != spec.arity() {
        return Err(Error::PreconditionViolated(format!(
            "family {} takes {} input(s), got {}",
            spec.family(),
            spec.arity(),
            inputs.len()
        )));
    }
    for (i, p) in inputs.iter().enumerate() {
        if !p.is_homogeneous() {
            return Err(Error::NonHomogeneousInput { slot: i + 1 });
        }
        if p.nvars() != model.nvars() {
            return Err(Error::PreconditionViolated(format!(
                "input {} has {} variables, model has {}",
                i + 1,
                p.nvars(),
                model.nvars()
            )));
        }
    }
    let m = spec.top_degree() as u32;
    // Laplacian powers of each input up to the top degree
    let pows: Vec<Vec<GradedPolynomial>> = inputs
        .iter()
        .map(|p| {
            let mut ladder = Vec::with_capacity(m as usize + 1);
            ladder.push(p.clone());
            for j in 1..=m as usize {
                let next = model.laplacian(&ladder[j - 1]);
                ladder.push(next);
            }
            ladder
        })
        .collect();
    let mut out = GradedPolynomial::zero(model.nvars());
    for alpha in enumerate_compositions(m as i64, spec.slots()).iter() {
        let coef = a.value(alpha)?;
        if coef.is_zero() {
            continue;
        }
        let weight = Rat::from(num_bigint::BigInt::from(multinomial(m, alpha)?)) * coef;
        let part = |j: usize| alpha.part(j);
        let term = match spec.family() {
            Family::Tri => {
                let inner = pows[0][part(3) as usize].mul(&pows[1][part(4) as usize]);
                let mid = model
                    .laplacian_power(&inner, part(2))
                    .mul(&pows[2][part(5) as usize]);
                model.laplacian_power(&mid, part(1))
            }
            Family::Lin => {
                let inner = model.laplacian_power(&pows[0][part(3) as usize], part(2));
                model.laplacian_power(&inner, part(1))
            }
            Family::OrOuter => {
                let inner = pows[0][part(2) as usize].mul(&pows[1][part(3) as usize]);
                model.laplacian_power(&inner, part(1))
            }
            Family::OrInner => {
                let inner = pows[0][part(2) as usize]
                    .mul(&model.laplacian_power(&pows[1][part(4) as usize], part(3)));
                model.laplacian_power(&inner, part(1))
            }
            Family::OrInner2 => {
                let inner = pows[0][part(3) as usize].mul(&pows[1][part(4) as usize]);
                model.laplacian_power(&model.laplacian_power(&inner, part(2)), part(1))
            }
        };
        out = out.add(&term.scale(&weight));
    }
    Ok(out)
}

/// Evaluate the cyclic symmetrization: the sum of the base operator over its
/// three input orderings.
pub fn apply_symmetrized(
    model: &FlatModel,
    op: &SymmetrizedOperator,
    inputs: &[GradedPolynomial; 3],
) -> Result<GradedPolynomial> {
    let mut out = GradedPolynomial::zero(model.nvars());
    for ordering in &op.orderings {
        let permuted: Vec<GradedPolynomial> =
            ordering.iter().map(|&j| inputs[j - 1].clone()).collect();
        out = out.add(&apply_operator(model, &op.base, &permuted)?);
    }
    Ok(out)
}

/// Per-trial verdicts of the tangentiality probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeTrial {
    /// Output on a `Q`-multiple input lands back in the ideal.
    pub remainder_zero: bool,
    /// The commutator with multiplication by `Q` vanishes as a polynomial.
    pub commutator_zero: bool,
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub slot: usize,
    pub seed: u64,
    pub trials: Vec<ProbeTrial>,
}

impl ProbeReport {
    pub fn all_pass(&self) -> bool {
        self.trials
            .iter()
            .all(|t| t.remainder_zero && t.commutator_zero)
    }
}

/// Probe tangentiality in one input slot with seeded random polynomials.
///
/// For each trial, the slot receives `Q * v` with `v` random homogeneous of
/// degree `w_slot - 2` and the other slots random homogeneous inputs of
/// their weights; the output must be divisible by `Q`, and independently the
/// commutator identity `D(..., Q v, ...) == Q * D(..., v, ...)` must hold
/// exactly. The family is first checked to solve its recurrences; a family
/// outside the kernel is a caller error (use the `_unchecked` variant to
/// probe one deliberately, e.g. as a negative control).
pub fn tangentiality_probe(
    model: &FlatModel,
    a: &CoefficientFamily,
    slot: usize,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if !a.is_in_kernel()? {
        return Err(Error::PreconditionViolated(
            "family does not solve the recurrence relations at its weights".to_string(),
        ));
    }
    tangentiality_probe_unchecked(model, a, slot, trials, seed)
}

/// The probe without the kernel-membership precondition.
pub fn tangentiality_probe_unchecked(
    model: &FlatModel,
    a: &CoefficientFamily,
    slot: usize,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let spec = a.spec();
    if spec.total_invariant_weight() != 0 {
        return Err(Error::InvariantModeUnsupported {
            l1: spec.l1(),
            l2: spec.l2(),
        });
    }
    if slot == 0 || slot > spec.arity() {
        return Err(Error::SlotOutOfRange {
            slot,
            slots: spec.arity(),
        });
    }
    if !a.weights().all_integral() {
        return Err(Error::PreconditionViolated(
            "the polynomial oracle instantiates integer weights only".to_string(),
        ));
    }
    let degrees: Vec<i64> = a
        .weights()
        .weights()
        .iter()
        .map(|w| w.numer().try_into().unwrap_or(-1))
        .collect();
    if degrees.iter().any(|&d| d < 0) || degrees[slot - 1] < 2 {
        return Err(Error::PreconditionViolated(format!(
            "weights must be nonnegative integers with w_{slot} >= 2, got {:?}",
            a.weights().to_strings()
        )));
    }
    let q = model.quadratic_form();
    let mut sampler = crate::sample::Sampler::new(seed);
    let mut results = Vec::with_capacity(trials);
    for _ in 0..trials {
        let v = sampler.homogeneous_poly(model.nvars(), degrees[slot - 1] as u32 - 2);
        let mut with_q = Vec::with_capacity(degrees.len());
        let mut without_q = Vec::with_capacity(degrees.len());
        for (i, &d) in degrees.iter().enumerate() {
            if i + 1 == slot {
                with_q.push(q.mul(&v));
                without_q.push(v.clone());
            } else {
                let u = sampler.homogeneous_poly(model.nvars(), d as u32);
                with_q.push(u.clone());
                without_q.push(u);
            }
        }
        let out_q = apply_operator(model, a, &with_q)?;
        let remainder_zero = model.divisible_by_q(&out_q);
        let commutator_zero = out_q == q.mul(&apply_operator(model, a, &without_q)?);
        results.push(ProbeTrial {
            remainder_zero,
            commutator_zero,
        });
    }
    Ok(ProbeReport {
        slot,
        seed,
        trials: results,
    })
}

/// Dimension of the span of symmetrized operators, measured by evaluating
/// each on a shared battery of input triples and row-reducing the flattened
/// outputs exactly.
pub fn measure_symmetrized_span(
    model: &FlatModel,
    ops: &[SymmetrizedOperator],
    battery: &[[GradedPolynomial; 3]],
) -> Result<usize> {
    // flattened outputs are keyed by (battery trial, monomial)
    type FlatKey = (usize, Vec<u32>);
    let mut columns: BTreeMap<FlatKey, usize> = BTreeMap::new();
    let mut rows: Vec<Vec<(FlatKey, Rat)>> = Vec::with_capacity(ops.len());
    for op in ops {
        let mut row = Vec::new();
        for (t, triple) in battery.iter().enumerate() {
            let out = apply_symmetrized(model, op, triple)?;
            for (e, c) in out.terms() {
                let key = (t, e.clone());
                let next = columns.len();
                columns.entry(key.clone()).or_insert(next);
                row.push((key, c.clone()));
            }
        }
        rows.push(row);
    }
    let mut m = ExactMatrix::zero(ops.len(), columns.len());
    for (r, row) in rows.into_iter().enumerate() {
        for (key, c) in row {
            m.set(r, columns[&key], c);
        }
    }
    Ok(linalg::rank(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use crate::sample::Sampler;
    use crate::shift::{OperatorSpec, WeightAssignment};
    use crate::solver::{fsa_weights, solve_family, symmetrize_family};

    fn int_weights(family: Family, ws: &[i64]) -> WeightAssignment {
        WeightAssignment::new(family, ws.iter().map(|&x| rat_int(x)).collect()).unwrap()
    }

    /// Independent reduction route: rewrite x0^(2m+r) as S^m x0^r directly.
    fn substitute_x0_squared(model: &FlatModel, p: &GradedPolynomial) -> GradedPolynomial {
        let s = model.spatial_form();
        let mut out = GradedPolynomial::zero(p.nvars());
        for (e, c) in p.terms() {
            let mut base = e.clone();
            base[0] = e[0] % 2;
            let mut term = GradedPolynomial::monomial(base, c.clone());
            for _ in 0..(e[0] / 2) {
                term = term.mul(&s);
            }
            out = out.add(&term);
        }
        out
    }

    #[test]
    fn laplacian_basics() {
        let model = FlatModel::new(3);
        let x0sq = GradedPolynomial::monomial(vec![2, 0, 0, 0, 0], Rat::one());
        assert_eq!(
            model.laplacian(&x0sq),
            GradedPolynomial::constant(5, rat_int(2))
        );
        let c = GradedPolynomial::constant(5, rat(7, 3));
        assert!(model.laplacian(&c).is_zero());
        // Lap Q = -2(n+2)
        assert_eq!(
            model.laplacian(&model.quadratic_form()),
            GradedPolynomial::constant(5, rat_int(-10))
        );
    }

    #[test]
    fn quadratic_form_shape() {
        let model = FlatModel::new(1);
        let q = model.quadratic_form();
        assert_eq!(q.coefficient(&[2, 0, 0]), rat_int(-1));
        assert_eq!(q.coefficient(&[0, 2, 0]), rat_int(1));
        assert_eq!(q.coefficient(&[0, 0, 2]), rat_int(1));
        assert_eq!(q.term_count(), 3);
        assert_eq!(q.homogeneous_degree(), Some(2));
        // the dilation operator doubles it
        assert_eq!(euler_operator(&q), q.scale(&rat_int(2)));
    }

    #[test]
    fn quadratic_form_is_irreducible() {
        // a quadratic form that factors into linear forms has Gram rank at
        // most 2; the defining form always has full rank n + 2 >= 3
        for n in 1..=4usize {
            let model = FlatModel::new(n);
            let q = model.quadratic_form();
            let nv = model.nvars();
            let mut gram = crate::linalg::ExactMatrix::zero(nv, nv);
            for (e, c) in q.terms() {
                let occupied: Vec<usize> =
                    (0..nv).filter(|&i| e[i] > 0).collect();
                match occupied.as_slice() {
                    [i] => gram.set(*i, *i, c.clone()),
                    [i, j] => {
                        gram.set(*i, *j, c / rat_int(2));
                        gram.set(*j, *i, c / rat_int(2));
                    }
                    _ => unreachable!("quadratic form"),
                }
            }
            assert!(crate::linalg::rank(&gram) >= 3);
        }
    }

    #[test]
    fn euler_operator_reads_degree() {
        let model = FlatModel::new(2);
        let mut s = Sampler::new(11);
        let p = s.homogeneous_poly(model.nvars(), 3);
        assert_eq!(euler_operator(&p), p.scale(&rat_int(3)));
        assert!(euler_operator(&GradedPolynomial::constant(4, rat_int(9))).is_zero());
        // product rule against the quadratic form
        let q = model.quadratic_form();
        let lhs = euler_operator(&q.mul(&p));
        let rhs = q.scale(&rat_int(2)).mul(&p).add(&q.mul(&euler_operator(&p)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn laplacian_product_rule() {
        let model = FlatModel::new(3);
        let mut s = Sampler::new(5);
        for _ in 0..10 {
            let p = s.poly_up_to_degree(model.nvars(), 3);
            let q = s.poly_up_to_degree(model.nvars(), 3);
            let lhs = model.laplacian(&p.mul(&q));
            let rhs = model
                .laplacian(&p)
                .mul(&q)
                .add(&p.mul(&model.laplacian(&q)))
                .sub(&model.gradient_pairing(&p, &q).scale(&rat_int(2)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn sl2_commutator_gate() {
        // k = 1 on the constant 1: both sides equal -2(n+2)
        for n in 1..=4 {
            let model = FlatModel::new(n);
            let one = GradedPolynomial::constant(model.nvars(), Rat::one());
            assert!(verify_sl2_commutator(&model, 1, &one));
            let lhs = model.laplacian(&model.quadratic_form());
            assert_eq!(
                lhs,
                GradedPolynomial::constant(model.nvars(), rat_int(-2 * (n as i64 + 2)))
            );
        }
    }

    #[test]
    fn sl2_commutator_on_monomials() {
        for n in 1..=3usize {
            let model = FlatModel::new(n);
            for deg in 0..=4i64 {
                for alpha in enumerate_compositions(deg, model.nvars()).iter() {
                    let p = GradedPolynomial::monomial(alpha.parts().to_vec(), Rat::one());
                    assert!(verify_sl2_commutator(&model, 1, &p));
                }
            }
        }
    }

    #[test]
    fn sl2_commutator_high_order_random() {
        let model = FlatModel::new(3);
        let mut s = Sampler::new(23);
        for _ in 0..50 {
            let deg = s.int_in(0, 6) as u32;
            let p = s.homogeneous_poly(model.nvars(), deg);
            assert!(verify_sl2_commutator(&model, 3, &p));
        }
    }

    #[test]
    fn remainder_examples() {
        let model = FlatModel::new(2);
        let q = model.quadratic_form();
        let x1cubed = GradedPolynomial::monomial(vec![0, 3, 0, 0], Rat::one());
        assert!(model.remainder_mod_q(&q.mul(&x1cubed)).is_zero());

        // x0^2 reduces to the spatial form
        let x0sq = GradedPolynomial::monomial(vec![2, 0, 0, 0], Rat::one());
        assert_eq!(model.remainder_mod_q(&x0sq), model.spatial_form());

        // shifting by a multiple of Q never changes the remainder
        let mut s = Sampler::new(3);
        for _ in 0..10 {
            let p = s.poly_up_to_degree(model.nvars(), 3);
            let r = s.poly_up_to_degree(model.nvars(), 2);
            assert_eq!(
                model.remainder_mod_q(&p.mul(&q).add(&r)),
                model.remainder_mod_q(&r)
            );
        }
    }

    #[test]
    fn remainder_agrees_with_substitution_route() {
        let model = FlatModel::new(3);
        let mut s = Sampler::new(17);
        for _ in 0..20 {
            let p = s.poly_up_to_degree(model.nvars(), 5);
            let rem = model.remainder_mod_q(&p);
            assert!(rem.terms().all(|(e, _)| e[0] <= 1));
            assert_eq!(rem, substitute_x0_squared(&model, &p));
            assert_eq!(
                model.divisible_by_q(&p),
                substitute_x0_squared(&model, &p).is_zero()
            );
        }
    }

    #[test]
    fn order_zero_operator_multiplies() {
        let model = FlatModel::new(3);
        let spec = OperatorSpec::tri(3, 0).unwrap();
        let w = int_weights(Family::Tri, &[2, 2, 2]);
        let a = CoefficientFamily::constant(spec, w, rat(5, 3));
        let mut s = Sampler::new(7);
        let inputs: Vec<GradedPolynomial> = (0..3)
            .map(|_| s.homogeneous_poly(model.nvars(), 2))
            .collect();
        let out = apply_operator(&model, &a, &inputs).unwrap();
        let expect = inputs[0].mul(&inputs[1]).mul(&inputs[2]).scale(&rat(5, 3));
        assert_eq!(out, expect);
    }

    #[test]
    fn output_degree_bookkeeping() {
        let model = FlatModel::new(3);
        let spec = OperatorSpec::tri(3, 1).unwrap();
        let w = int_weights(Family::Tri, &[2, 2, 2]);
        let basis = solve_family(&spec, &w).unwrap();
        let mut s = Sampler::new(9);
        let inputs: Vec<GradedPolynomial> = (0..3)
            .map(|_| s.homogeneous_poly(model.nvars(), 2))
            .collect();
        for m in &basis.members {
            let out = apply_operator(&model, m, &inputs).unwrap();
            if !out.is_zero() {
                assert_eq!(out.homogeneous_degree(), Some(4)); // 6 - 2k
            }
        }
    }

    #[test]
    fn concentrated_family_reproduces_laplacian_power() {
        // all weight on the slot differentiating the first input turns the
        // operator into a pure Laplacian power when the other inputs are 1
        let model = FlatModel::new(3);
        for k in 1..=2u32 {
            let spec = OperatorSpec::tri(3, k).unwrap();
            let w = int_weights(Family::Tri, &[4, 0, 0]);
            let concentrated = CoefficientFamily::from_fn(spec, w, |alpha| {
                if alpha.parts()[2] == k {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            });
            let mut s = Sampler::new(31);
            let u = s.homogeneous_poly(model.nvars(), 4);
            let one = GradedPolynomial::constant(model.nvars(), Rat::one());
            let out =
                apply_operator(&model, &concentrated, &[u.clone(), one.clone(), one]).unwrap();
            assert_eq!(out, model.laplacian_power(&u, k));
        }
    }

    #[test]
    fn invariant_mode_rejected() {
        let model = FlatModel::new(3);
        let spec = OperatorSpec::or_inner(5, 2, 1).unwrap();
        let a =
            CoefficientFamily::constant(spec, int_weights(Family::OrInner, &[2, 2]), Rat::one());
        let mut s = Sampler::new(1);
        let u = s.homogeneous_poly(model.nvars(), 2);
        let v = s.homogeneous_poly(model.nvars(), 2);
        assert!(matches!(
            apply_operator(&model, &a, &[u, v]),
            Err(Error::InvariantModeUnsupported { .. })
        ));
    }

    #[test]
    fn non_homogeneous_inputs_rejected() {
        let model = FlatModel::new(3);
        let spec = OperatorSpec::tri(3, 0).unwrap();
        let a = CoefficientFamily::constant(spec, int_weights(Family::Tri, &[2, 2, 2]), Rat::one());
        let mixed = GradedPolynomial::constant(model.nvars(), Rat::one())
            .add(&GradedPolynomial::variable(model.nvars(), 1));
        let ok = GradedPolynomial::variable(model.nvars(), 2);
        assert!(matches!(
            apply_operator(&model, &a, &[mixed, ok.clone(), ok]),
            Err(Error::NonHomogeneousInput { slot: 1 })
        ));
    }

    #[test]
    fn probe_certifies_kernel_families() {
        let model = FlatModel::new(3);
        let spec = OperatorSpec::tri(3, 1).unwrap();
        let w = int_weights(Family::Tri, &[2, 2, 2]);
        let basis = solve_family(&spec, &w).unwrap();
        for m in &basis.members {
            for slot in 1..=3 {
                let report = tangentiality_probe(&model, m, slot, 4, 42).unwrap();
                assert!(report.all_pass());
            }
        }
    }

    #[test]
    fn probe_detects_mutation() {
        let model = FlatModel::new(3);
        let spec = OperatorSpec::tri(3, 1).unwrap();
        let w = int_weights(Family::Tri, &[2, 2, 2]);
        let basis = solve_family(&spec, &w).unwrap();
        let member = &basis.members[0];
        let alpha = member.index().unrank(0).unwrap().clone();
        let bumped = member.value(&alpha).unwrap() + rat_int(1);
        let mutated = member.with_value(&alpha, bumped).unwrap();
        // the checked entry point refuses to bless it
        assert!(matches!(
            tangentiality_probe(&model, &mutated, 1, 4, 42),
            Err(Error::PreconditionViolated(_))
        ));
        // the unchecked probe detects the failure
        let report = tangentiality_probe_unchecked(&model, &mutated, 1, 4, 42).unwrap();
        assert!(!report.all_pass());
    }

    #[test]
    fn order_zero_probe_trivially_tangential() {
        let model = FlatModel::new(2);
        let spec = OperatorSpec::tri(3, 0).unwrap();
        let a = CoefficientFamily::constant(spec, int_weights(Family::Tri, &[2, 3, 2]), rat(7, 2));
        let report = tangentiality_probe(&model, &a, 1, 3, 5).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn triple_product_identity_cases() {
        let model = FlatModel::new(2);
        let one = GradedPolynomial::constant(model.nvars(), Rat::one());
        assert!(verify_triple_product_identity(&model, &one, &one, &one));
        let x0 = GradedPolynomial::variable(model.nvars(), 0);
        let x1 = GradedPolynomial::variable(model.nvars(), 1);
        let x2 = GradedPolynomial::variable(model.nvars(), 2);
        assert!(verify_triple_product_identity(&model, &x0, &x1, &x2));
        let mut s = Sampler::new(19);
        for _ in 0..10 {
            let u1 = s.poly_up_to_degree(model.nvars(), 3);
            let u2 = s.poly_up_to_degree(model.nvars(), 3);
            let u3 = s.poly_up_to_degree(model.nvars(), 3);
            assert!(verify_triple_product_identity(&model, &u1, &u2, &u3));
        }
    }

    #[test]
    fn symmetrized_descriptor_semantics() {
        let model = FlatModel::new(2);
        // order zero with A = 1: the symmetrization is 3 * (u1 u2 u3)
        let spec = OperatorSpec::tri(4, 0).unwrap();
        let a = CoefficientFamily::constant(spec, fsa_weights(&spec), Rat::one());
        let sym = symmetrize_family(&a).unwrap();
        let mut s = Sampler::new(13);
        let inputs: [GradedPolynomial; 3] = [
            s.homogeneous_poly(model.nvars(), 2),
            s.homogeneous_poly(model.nvars(), 1),
            s.homogeneous_poly(model.nvars(), 2),
        ];
        let out = apply_symmetrized(&model, &sym, &inputs).unwrap();
        let prod = inputs[0].mul(&inputs[1]).mul(&inputs[2]);
        assert_eq!(out, prod.scale(&rat_int(3)));

        // equal inputs collapse to three times the base operator
        let u = s.homogeneous_poly(model.nvars(), 2);
        let equal: [GradedPolynomial; 3] = [u.clone(), u.clone(), u.clone()];
        let out = apply_symmetrized(&model, &sym, &equal).unwrap();
        let base = apply_operator(&model, &a, &equal).unwrap();
        assert_eq!(out, base.scale(&rat_int(3)));

        // invariance under cyclic relabeling of the inputs
        let rotated: [GradedPolynomial; 3] =
            [inputs[1].clone(), inputs[2].clone(), inputs[0].clone()];
        assert_eq!(
            apply_symmetrized(&model, &sym, &inputs).unwrap(),
            apply_symmetrized(&model, &sym, &rotated).unwrap()
        );
    }

    #[test]
    fn polynomial_json_round_trip() {
        let model = FlatModel::new(2);
        let mut s = Sampler::new(29);
        let p = s.poly_up_to_degree(model.nvars(), 3);
        let doc = p.to_json();
        let back = GradedPolynomial::from_json(model.nvars(), &doc).unwrap();
        assert_eq!(p, back);
    }
}
