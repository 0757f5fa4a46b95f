//! The consolidated verification suite.
//!
//! Each criterion is an exact, zero-tolerance check (dimension bounds where
//! stated) with pinned parameter ranges. The suite backs both the dedicated
//! acceptance test target and the CLI `report` command; every criterion
//! returns a structured outcome with one summary line and JSON details.
//!
//! The sign-convention gate (the order-one commutator identity on the
//! constant 1) runs before anything that touches the polynomial oracle; a
//! failing gate aborts the suite, since every oracle verdict would be
//! meaningless under a wrong convention.

use std::time::Instant;

use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::ambient::{
    apply_operator, measure_symmetrized_span, tangentiality_probe, tangentiality_probe_unchecked,
    verify_sl2_commutator, verify_triple_product_identity, FlatModel, GradedPolynomial,
};
use crate::index::enumerate_compositions;
use crate::linalg::{compose, rank};
use crate::rat::{rat, rat_int, Rat};
use crate::sample::Sampler;
use crate::shift::{
    build_differential, build_shift_matrix, right_inverse_matrix, variants_for,
    verify_commutation_relations, Family, OperatorSpec, WeightAssignment,
};
use crate::solver::{
    euler_characteristic, family_lower_bound, fsa_weights, or_closed_form, solve_family,
    symmetrize_family, verify_fsa_symmetries, verify_or_fsa_recurrences, verify_recurrences,
    certify_generic_exactness,
};

/// Default suite seed; any seed must pass.
pub const DEFAULT_SEED: u64 = 20250 * 1000 + 817;

/// Seed of the fixed polynomial battery used by the span measurement.
const BATTERY_SEED: u64 = 0xBA77E21;

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub details: Value,
    pub millis: u128,
}

impl CriterionOutcome {
    pub fn summary_line(&self) -> String {
        format!(
            "criterion {:2} ({}): {} [{} ms]",
            self.id,
            self.title,
            if self.passed { "PASS" } else { "FAIL" },
            self.millis
        )
    }
}

fn outcome(
    id: u8,
    title: &'static str,
    started: Instant,
    passed: bool,
    details: Value,
) -> CriterionOutcome {
    CriterionOutcome {
        id,
        title,
        passed,
        details,
        millis: started.elapsed().as_millis(),
    }
}

/// The convention gate: at order one on the constant function, both sides of
/// the commutator identity must equal `-2(n+2)`.
pub fn convention_gate() -> bool {
    (1..=4).all(|n| {
        let model = FlatModel::new(n);
        let one = GradedPolynomial::constant(model.nvars(), Rat::one());
        let q = model.quadratic_form();
        let direct = model.laplacian(&q);
        direct == GradedPolynomial::constant(model.nvars(), rat_int(-2 * (n as i64 + 2)))
            && verify_sl2_commutator(&model, 1, &one)
    })
}

fn kernel_dimension(spec: &OperatorSpec, w: &WeightAssignment) -> usize {
    let d1 = build_differential(spec, 1, w).expect("level 1 always exists");
    d1.cols() - rank(&d1)
}

/// Criterion 1: the kernel of the first differential of the tridifferential
/// complex is exactly `(k+1)`-dimensional at generic weights and at least
/// that large everywhere, across `n` in {3, 5, 7} for `k <= 6` and `n = 6`
/// for `k <= 3`; the sweep must finish within 60 seconds.
pub fn criterion_01_dimension_theorem(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut combos: Vec<(u32, u32)> = Vec::new();
    for n in [3u32, 5, 7] {
        for k in 0..=6 {
            combos.push((n, k));
        }
    }
    for k in 0..=3 {
        combos.push((6, k));
    }

    struct Job {
        spec: OperatorSpec,
        w: WeightAssignment,
        exact: bool,
    }
    let mut jobs: Vec<Job> = Vec::new();
    for &(n, k) in &combos {
        let spec = OperatorSpec::tri(n, k).expect("combos satisfy the hypotheses");
        let mut sampler = Sampler::new(seed ^ ((n as u64) << 32 | k as u64));
        for _ in 0..20 {
            jobs.push(Job {
                spec,
                w: sampler.weight_assignment(Family::Tri, true),
                exact: true,
            });
        }
        // arbitrary weights: the symmetric ones, zero, integers, a
        // half-integer triple, and random small rationals
        let mut arbitrary: Vec<WeightAssignment> = vec![
            fsa_weights(&spec),
            WeightAssignment::new(Family::Tri, vec![rat_int(0); 3]).unwrap(),
            WeightAssignment::new(Family::Tri, vec![rat_int(2); 3]).unwrap(),
            WeightAssignment::new(Family::Tri, vec![rat(1, 2); 3]).unwrap(),
        ];
        while arbitrary.len() < 20 {
            arbitrary.push(sampler.weight_assignment(Family::Tri, false));
        }
        for w in arbitrary {
            jobs.push(Job { spec, w, exact: false });
        }
    }

    let failures: Vec<Value> = jobs
        .par_iter()
        .filter_map(|job| {
            let dim = kernel_dimension(&job.spec, &job.w);
            let expect = job.spec.k() as usize + 1;
            let ok = if job.exact { dim == expect } else { dim >= expect };
            (!ok).then(|| {
                json!({
                    "n": job.spec.n(),
                    "k": job.spec.k(),
                    "weights": job.w.to_strings(),
                    "generic": job.exact,
                    "observed": dim,
                    "expected": expect,
                })
            })
        })
        .collect();

    let elapsed_ms = started.elapsed().as_millis();
    let within_budget = elapsed_ms < 60_000;
    let details = json!({
        "combos": combos.len(),
        "kernels": jobs.len(),
        "failures": failures,
        "elapsed_ms": elapsed_ms as u64,
        "runtime_budget_ms": 60_000,
    });
    outcome(
        1,
        "kernel dimension theorem",
        started,
        failures.is_empty() && within_budget,
        details,
    )
}

/// Criterion 2: the differentials compose to zero exactly at 100 random
/// rational weight assignments for every family, `k <= 5` (the linear
/// family's two-space complex has nothing to compose; its differential is
/// checked for well-formed shape instead).
pub fn criterion_02_chain_complex(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut failures: Vec<Value> = Vec::new();
    let mut checks = 0usize;
    let ns = [3u32, 5, 7, 9];
    for family in Family::ALL {
        let mut sampler = Sampler::new(seed ^ family.name().len() as u64 ^ 0xC0);
        for trial in 0..100 {
            let n = ns[trial % ns.len()];
            let w = sampler.weight_assignment(family, false);
            for k in 0..=5u32 {
                for l in 0..=(if family == Family::Tri { 0 } else { k.min(1) }) {
                    let spec = match family {
                        Family::Tri => OperatorSpec::tri(n, k),
                        Family::Lin => OperatorSpec::lin(n, k, 0, l),
                        Family::OrOuter => OperatorSpec::or_outer(n, k, l),
                        Family::OrInner => OperatorSpec::or_inner(n, k, l),
                        Family::OrInner2 => OperatorSpec::or_inner2(n, k, l),
                    }
                    .expect("odd n imposes no order bound");
                    let d1 = build_differential(&spec, 1, &w).unwrap();
                    let block_rows = match family {
                        Family::Tri => 3,
                        Family::Lin => 1,
                        _ => 2,
                    };
                    let low = crate::index::cardinality(spec.top_degree() - 1, spec.slots());
                    let top = crate::index::cardinality(spec.top_degree(), spec.slots());
                    let mut ok = d1.rows() == block_rows * low as usize
                        && d1.cols() == top as usize;
                    for level in 2..=family.levels() {
                        let hi = build_differential(&spec, level, &w).unwrap();
                        let lo = build_differential(&spec, level - 1, &w).unwrap();
                        ok &= compose(&hi, &lo).unwrap().is_zero();
                    }
                    checks += 1;
                    if !ok {
                        failures.push(json!({
                            "family": family.name(),
                            "n": n, "k": k, "l": l,
                            "weights": w.to_strings(),
                        }));
                    }
                }
            }
        }
    }
    let details = json!({ "checks": checks, "failures": failures });
    outcome(
        2,
        "chain complex closes",
        started,
        failures.is_empty(),
        details,
    )
}

/// Criterion 3: the alternating cardinality sums match the closed forms
/// (`k+1`, `m+1`, or 1) for every family up to degree 50, via exact
/// binomials.
pub fn criterion_03_euler_characteristic(_seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut failures: Vec<Value> = Vec::new();
    for m in 0..=50i64 {
        let expectations = [
            (Family::Tri, m + 1),
            (Family::Lin, m + 1),
            (Family::OrOuter, 1),
            (Family::OrInner, m + 1),
            (Family::OrInner2, m + 1),
        ];
        for (family, expected) in expectations {
            let got = euler_characteristic(family, m);
            if got != expected {
                failures.push(json!({
                    "family": family.name(),
                    "top_degree": m,
                    "observed": got,
                    "expected": expected,
                }));
            }
        }
    }
    outcome(
        3,
        "Euler characteristics",
        started,
        failures.is_empty(),
        json!({ "degrees": 51, "failures": failures }),
    )
}

/// Criterion 4: the tridifferential complex is exact at every junction, with
/// a surjective final map, for `n` in {3, 5, 7}, `k <= 4`, at 10 generic
/// weight triples each.
pub fn criterion_04_generic_exactness(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut jobs = Vec::new();
    for n in [3u32, 5, 7] {
        for k in 0..=4u32 {
            let spec = OperatorSpec::tri(n, k).unwrap();
            let mut sampler = Sampler::new(seed ^ ((n as u64) << 16 | k as u64) ^ 0xE4);
            for _ in 0..10 {
                jobs.push((spec, sampler.weight_assignment(Family::Tri, true)));
            }
        }
    }
    let failures: Vec<Value> = jobs
        .par_iter()
        .filter_map(|(spec, w)| {
            let report = certify_generic_exactness(spec, w).expect("TRI spec");
            let ok = report.all_exact() && report.dimension_matches_chi();
            (!ok).then(|| {
                json!({
                    "n": spec.n(), "k": spec.k(),
                    "weights": w.to_strings(),
                    "first_junction_exact": report.junction_first.exact,
                    "second_junction_exact": report.junction_second.exact,
                    "final_surjective": report.final_map_surjective,
                    "dim_ker_d1": report.dim_ker_d1,
                })
            })
        })
        .collect();
    outcome(
        4,
        "generic exactness of the complex",
        started,
        failures.is_empty(),
        json!({ "certifications": jobs.len(), "failures": failures }),
    )
}

/// Criterion 5: all stated shift commutation relations hold and every shift
/// composed with its right inverse is the identity, at generic weights, for
/// degrees up to 5.
pub fn criterion_05_commutation_algebra(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut failures: Vec<Value> = Vec::new();
    let mut checks = 0usize;
    for family in Family::ALL {
        let spec = OperatorSpec::new(family, 5, 5, 0, 0).unwrap();
        // fixed weights with every doubled partial sum a non-integer, so all
        // shift coefficients are provably nonzero; plus seeded generic draws
        let fixed = WeightAssignment::new(
            family,
            [rat(1, 3), rat(2, 5), rat(1, 7)][..family.arity()].to_vec(),
        )
        .unwrap();
        let mut sampler = Sampler::new(seed ^ family.slots() as u64 ^ 0x05);
        let mut assignments = vec![fixed.clone()];
        for _ in 0..3 {
            assignments.push(sampler.weight_assignment(family, true));
        }
        for w in &assignments {
            for s in 2..=5i64 {
                let report = verify_commutation_relations(&spec, w, s).unwrap();
                checks += report.relations.len();
                for rel in report.relations.iter().filter(|r| !r.holds) {
                    failures.push(json!({
                        "family": family.name(),
                        "degree": s,
                        "relation": rel.describe(),
                        "weights": w.to_strings(),
                    }));
                }
            }
        }
        // right inverses at the provably nondegenerate weights
        for &variant in variants_for(family) {
            for s in 1..=5i64 {
                checks += 1;
                let f = build_shift_matrix(&spec, variant, s, &fixed).unwrap();
                let ok = match right_inverse_matrix(&spec, variant, s, &fixed) {
                    Ok(g) => {
                        compose(&f, &g).unwrap() == crate::linalg::ExactMatrix::identity(f.rows())
                    }
                    Err(_) => false,
                };
                if !ok {
                    failures.push(json!({
                        "family": family.name(),
                        "variant": variant.name(),
                        "degree": s,
                        "kind": "right inverse",
                    }));
                }
            }
        }
    }
    outcome(
        5,
        "shift commutation algebra and right inverses",
        started,
        failures.is_empty(),
        json!({ "checks": checks, "failures": failures }),
    )
}

/// Criterion 6: at the symmetric weights `-(n-2k)/4` with `n > 2k`, every
/// kernel basis member satisfies the three index-permutation symmetries, for
/// `n <= 9`, `k <= 3`.
pub fn criterion_06_fsa_symmetries(_seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut failures: Vec<Value> = Vec::new();
    let mut members_checked = 0usize;
    for k in 0..=3u32 {
        for n in 3..=9u32 {
            if n as i64 <= 2 * k as i64 {
                continue;
            }
            let spec = OperatorSpec::tri(n, k).unwrap();
            let w = fsa_weights(&spec);
            let basis = solve_family(&spec, &w).unwrap();
            for (i, m) in basis.members.iter().enumerate() {
                members_checked += 1;
                let report = verify_fsa_symmetries(m).unwrap();
                if !report.all_hold() {
                    failures.push(json!({
                        "n": n, "k": k, "member": i,
                        "recurrences": report.recurrences_hold,
                        "swap_inner": report.swap_inner,
                        "swap_outer": report.swap_outer,
                        "involution": report.involution,
                    }));
                }
            }
        }
    }
    outcome(
        6,
        "index-permutation symmetries at symmetric weights",
        started,
        failures.is_empty(),
        json!({ "members": members_checked, "failures": failures }),
    )
}

/// Criterion 7: the closed-form bidifferential coefficients satisfy the
/// symmetric-weight recurrences with zero residual and normalize to one at
/// the extreme index, for `n` in {5, 7, 9, 11}, `k <= 4` (where `n > 2k`).
pub fn criterion_07_or_closed_form(_seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut failures: Vec<Value> = Vec::new();
    let mut cases = 0usize;
    for n in [5u32, 7, 9, 11] {
        for k in 0..=4u32 {
            if n as i64 <= 2 * k as i64 {
                // outside the closed form's domain; constructing it must fail
                cases += 1;
                if or_closed_form(n, k).is_ok() {
                    failures.push(json!({ "n": n, "k": k, "kind": "domain" }));
                }
                continue;
            }
            cases += 1;
            let a = or_closed_form(n, k).unwrap();
            let extreme = crate::index::Composition::new(vec![k, 0, 0]);
            let normalized = a.value(&extreme).map(|v| v.is_one()).unwrap_or(false);
            let fsa_resid = verify_or_fsa_recurrences(&a).unwrap();
            let general_resid = verify_recurrences(&a).unwrap().all_zero;
            let in_kernel = a.is_in_kernel().unwrap();
            if !(normalized && fsa_resid && general_resid && in_kernel) {
                failures.push(json!({
                    "n": n, "k": k,
                    "normalized": normalized,
                    "fsa_recurrences": fsa_resid,
                    "general_recurrences": general_resid,
                    "kernel_member": in_kernel,
                }));
            }
        }
    }
    outcome(
        7,
        "closed-form bidifferential coefficients",
        started,
        failures.is_empty(),
        json!({ "cases": cases, "failures": failures }),
    )
}

/// Criterion 8: the commutator identity for Laplacian powers holds exactly
/// on every monomial of degree up to 5 and on 50 seeded random homogeneous
/// polynomials, for `k <= 3` and base dimensions up to 4; the order-one
/// convention gate must pass first.
pub fn criterion_08_sl2_commutator(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    if !convention_gate() {
        return outcome(
            8,
            "Laplacian power commutator identity",
            started,
            false,
            json!({ "gate": "sign convention check failed" }),
        );
    }
    let mut checks = 0usize;
    let mut failures: Vec<Value> = Vec::new();
    for n in 1..=4usize {
        let model = FlatModel::new(n);
        for k in 1..=3u32 {
            for deg in 0..=5i64 {
                for alpha in enumerate_compositions(deg, model.nvars()).iter() {
                    checks += 1;
                    let p = GradedPolynomial::monomial(alpha.parts().to_vec(), Rat::one());
                    if !verify_sl2_commutator(&model, k, &p) {
                        failures.push(json!({
                            "n": n, "k": k, "monomial": alpha.parts(),
                        }));
                    }
                }
            }
            let mut sampler = Sampler::new(seed ^ ((n as u64) << 8 | k as u64));
            for t in 0..50 {
                checks += 1;
                let deg = sampler.int_in(0, 5) as u32;
                let p = sampler.homogeneous_poly(model.nvars(), deg);
                if !verify_sl2_commutator(&model, k, &p) {
                    failures.push(json!({ "n": n, "k": k, "trial": t, "degree": deg }));
                }
            }
        }
    }
    outcome(
        8,
        "Laplacian power commutator identity",
        started,
        failures.is_empty(),
        json!({ "gate": "passed", "checks": checks, "failures": failures }),
    )
}

/// Criterion 9: end-to-end tangentiality. Solved tridifferential families at
/// integer weights (2,2,2) over base dimension 3 pass the polynomial probe
/// in every slot (25 seeded trials each, both the ideal-membership and the
/// direct commutator route), and a single-entry mutation is detected as
/// non-tangential.
pub fn criterion_09_tangentiality(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    if !convention_gate() {
        return outcome(
            9,
            "end-to-end tangentiality probe",
            started,
            false,
            json!({ "gate": "sign convention check failed" }),
        );
    }
    let model = FlatModel::new(3);
    let w = WeightAssignment::new(Family::Tri, vec![rat_int(2); 3]).unwrap();
    let mut failures: Vec<Value> = Vec::new();
    let mut trials = 0usize;
    let mut mutation_detected = true;
    for k in [1u32, 2] {
        let spec = OperatorSpec::tri(3, k).unwrap();
        let basis = solve_family(&spec, &w).unwrap();
        if (basis.dimension() as i64) < family_lower_bound(&spec) {
            failures.push(json!({ "k": k, "kind": "dimension", "observed": basis.dimension() }));
            continue;
        }
        let probes: Vec<(usize, usize)> = (0..basis.dimension())
            .flat_map(|m| (1..=3usize).map(move |slot| (m, slot)))
            .collect();
        let probe_failures: Vec<Value> = probes
            .par_iter()
            .filter_map(|&(m, slot)| {
                let report =
                    tangentiality_probe(&model, &basis.members[m], slot, 25, seed ^ slot as u64)
                        .expect("kernel member probes cleanly");
                (!report.all_pass()).then(|| {
                    json!({ "k": k, "member": m, "slot": slot, "kind": "probe" })
                })
            })
            .collect();
        trials += probes.len() * 25;
        failures.extend(probe_failures);
        // negative control: one bumped entry must break tangentiality
        let member = &basis.members[0];
        let alpha = member.index().unrank(0).unwrap().clone();
        let bumped = member.value(&alpha).unwrap() + rat_int(1);
        let mutated = member.with_value(&alpha, bumped).unwrap();
        let control = tangentiality_probe_unchecked(&model, &mutated, 1, 25, seed).unwrap();
        if control.all_pass() {
            mutation_detected = false;
            failures.push(json!({ "k": k, "kind": "negative control not detected" }));
        }
    }
    outcome(
        9,
        "end-to-end tangentiality probe",
        started,
        failures.is_empty() && mutation_detected,
        json!({ "probe_trials": trials, "failures": failures }),
    )
}

/// Criterion 10: the triple-product Laplacian identity holds on 100 seeded
/// random polynomial triples over base dimensions up to 3, degrees up to 4.
pub fn criterion_10_triple_product(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let failures: Vec<Value> = (0..100usize)
        .into_par_iter()
        .filter_map(|t| {
            let n = 1 + (t % 3);
            let model = FlatModel::new(n);
            let mut sampler = Sampler::new(seed ^ 0x10 ^ (t as u64) << 1);
            let u1 = sampler.poly_up_to_degree(model.nvars(), 4);
            let u2 = sampler.poly_up_to_degree(model.nvars(), 4);
            let u3 = sampler.poly_up_to_degree(model.nvars(), 4);
            (!verify_triple_product_identity(&model, &u1, &u2, &u3))
                .then(|| json!({ "trial": t, "n": n }))
        })
        .collect();
    outcome(
        10,
        "triple-product Laplacian identity",
        started,
        failures.is_empty(),
        json!({ "trials": 100, "failures": failures }),
    )
}

/// Criterion 11: observed kernel dimensions of the linear and bidifferential
/// families meet the per-family lower bound for `n` in {3, 5, 7}, `k <= 4`,
/// all invariant weights up to `k`, at 10 random weight assignments each;
/// observed dimensions at one generic-looking assignment are recorded.
pub fn criterion_11_family_lower_bounds(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut specs: Vec<OperatorSpec> = Vec::new();
    for n in [3u32, 5, 7] {
        for k in 0..=4u32 {
            for l in 0..=k {
                for l2 in 0..=l {
                    specs.push(OperatorSpec::lin(n, k, l - l2, l2).unwrap());
                }
                specs.push(OperatorSpec::or_outer(n, k, l).unwrap());
                specs.push(OperatorSpec::or_inner(n, k, l).unwrap());
                specs.push(OperatorSpec::or_inner2(n, k, l).unwrap());
            }
        }
    }
    let results: Vec<(Value, Vec<Value>)> = specs
        .par_iter()
        .map(|spec| {
            let mut sampler =
                Sampler::new(seed ^ ((spec.n() as u64) << 24) ^ ((spec.k() as u64) << 16)
                    ^ ((spec.l1() as u64) << 8) ^ spec.l2() as u64 ^ spec.slots() as u64);
            let bound = family_lower_bound(spec);
            let mut fails = Vec::new();
            for _ in 0..10 {
                let w = sampler.weight_assignment(spec.family(), false);
                let dim = kernel_dimension(spec, &w) as i64;
                if dim < bound {
                    fails.push(json!({
                        "family": spec.family().name(),
                        "n": spec.n(), "k": spec.k(),
                        "l1": spec.l1(), "l2": spec.l2(),
                        "weights": w.to_strings(),
                        "observed": dim, "bound": bound,
                    }));
                }
            }
            let generic_w = sampler.weight_assignment(spec.family(), true);
            let observed = kernel_dimension(spec, &generic_w) as i64;
            let record = json!({
                "family": spec.family().name(),
                "n": spec.n(), "k": spec.k(),
                "l1": spec.l1(), "l2": spec.l2(),
                "weights": generic_w.to_strings(),
                "observed_dimension": observed,
                "lower_bound": bound,
            });
            (record, fails)
        })
        .collect();
    let mut observed = Vec::new();
    let mut failures = Vec::new();
    for (record, fails) in results {
        observed.push(record);
        failures.extend(fails);
    }
    outcome(
        11,
        "family dimension lower bounds",
        started,
        failures.is_empty(),
        json!({
            "specs": specs.len(),
            "failures": failures,
            "observed_at_generic_weights": observed,
        }),
    )
}

/// Criterion 12: the symmetrized kernel families at the symmetric weights,
/// evaluated on a fixed 30-triple polynomial battery over base dimension 5,
/// span a space of dimension at most `k + 1` for `k` in {1, 2}; the measured
/// dimension is recorded (one linear relation among the summands is
/// expected, giving `k`, but only reported).
pub fn criterion_12_symmetrized_span(_seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let model = FlatModel::new(5);
    let mut battery_sampler = Sampler::new(BATTERY_SEED);
    let battery = battery_sampler.triple_battery(model.nvars(), 2, 30);
    let mut measured = Vec::new();
    let mut passed = true;
    for k in [1u32, 2] {
        let spec = OperatorSpec::tri(5, k).unwrap();
        let w = fsa_weights(&spec);
        let basis = solve_family(&spec, &w).unwrap();
        let ops: Vec<_> = basis
            .members
            .iter()
            .map(|m| symmetrize_family(m).unwrap())
            .collect();
        let dim = measure_symmetrized_span(&model, &ops, &battery).unwrap();
        passed &= dim <= k as usize + 1;
        measured.push(json!({
            "k": k,
            "basis_dimension": basis.dimension(),
            "symmetrized_span": dim,
            "conjectured": k,
        }));
    }
    outcome(
        12,
        "symmetrized-span measurement",
        started,
        passed,
        json!({ "battery": { "seed": BATTERY_SEED, "triples": 30, "input_degree": 2 },
                "measurements": measured }),
    )
}

/// Run the whole suite in order. The convention gate runs first and aborts
/// everything on failure.
pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    let started = Instant::now();
    if !convention_gate() {
        return vec![outcome(
            0,
            "sign convention gate",
            started,
            false,
            json!({ "aborted": "the order-one commutator identity failed; no oracle verdict is meaningful" }),
        )];
    }
    vec![
        criterion_01_dimension_theorem(seed),
        criterion_02_chain_complex(seed),
        criterion_03_euler_characteristic(seed),
        criterion_04_generic_exactness(seed),
        criterion_05_commutation_algebra(seed),
        criterion_06_fsa_symmetries(seed),
        criterion_07_or_closed_form(seed),
        criterion_08_sl2_commutator(seed),
        criterion_09_tangentiality(seed),
        criterion_10_triple_product(seed),
        criterion_11_family_lower_bounds(seed),
        criterion_12_symmetrized_span(seed),
    ]
}

pub fn all_passed(outcomes: &[CriterionOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

/// Consolidated JSON document for the CLI `report` command.
pub fn report_json(seed: u64, outcomes: &[CriterionOutcome]) -> Value {
    json!({
        "criteria": outcomes.iter().map(|o| json!({
            "id": o.id,
            "title": o.title,
            "passed": o.passed,
            "details": o.details,
        })).collect::<Vec<_>>(),
        "passed": all_passed(outcomes),
        "seed": seed,
        "version": crate::VERSION,
    })
}

/// Apply one kernel family to fixed inputs; exercised here so the oracle
/// path stays linked into the suite's public surface.
#[doc(hidden)]
pub fn smoke_apply(seed: u64) -> bool {
    let model = FlatModel::new(3);
    let spec = OperatorSpec::tri(3, 1).unwrap();
    let w = WeightAssignment::new(Family::Tri, vec![rat_int(2); 3]).unwrap();
    let basis = solve_family(&spec, &w).unwrap();
    let mut s = Sampler::new(seed);
    let inputs: Vec<GradedPolynomial> = (0..3)
        .map(|_| s.homogeneous_poly(model.nvars(), 2))
        .collect();
    basis
        .members
        .iter()
        .all(|m| apply_operator(&model, m, &inputs).is_ok())
}
