//! Seeded pseudo-random weights and polynomials.
//!
//! Everything random in the crate flows through this sampler so that
//! counterexample hunting is reproducible: reports embed the seed, and the
//! same seed regenerates the same weights, inputs, and verdicts. Polynomial
//! coefficients are drawn from `{-3, ..., 3}`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ambient::GradedPolynomial;
use crate::index::enumerate_compositions;
use crate::rat::{rat, Rat};
use crate::shift::{Family, WeightAssignment};

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    /// A small rational `p/q` with `q` up to 9; may be integral.
    pub fn rational(&mut self) -> Rat {
        let q = self.int_in(1, 9);
        let p = self.int_in(-9, 9);
        rat(p, q)
    }

    /// A rational whose double is not an integer.
    pub fn generic_rational(&mut self) -> Rat {
        loop {
            let w = self.rational();
            if !crate::rat::twice_is_integer(&w) {
                return w;
            }
        }
    }

    /// A weight assignment for the family; `generic` forces every doubled
    /// weight to be a non-integer.
    pub fn weight_assignment(&mut self, family: Family, generic: bool) -> WeightAssignment {
        let ws = (0..family.arity())
            .map(|_| {
                if generic {
                    self.generic_rational()
                } else {
                    self.rational()
                }
            })
            .collect();
        WeightAssignment::new(family, ws).expect("arity correct by construction")
    }

    /// A nonzero homogeneous polynomial of the given degree with small
    /// integer coefficients.
    pub fn homogeneous_poly(&mut self, nvars: usize, degree: u32) -> GradedPolynomial {
        loop {
            let mut p = GradedPolynomial::zero(nvars);
            for alpha in enumerate_compositions(degree as i64, nvars).iter() {
                let c = self.int_in(-3, 3);
                if c != 0 {
                    p = p.add(&GradedPolynomial::monomial(
                        alpha.parts().to_vec(),
                        rat(c, 1),
                    ));
                }
            }
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// A nonzero polynomial with terms of every degree up to `max_degree`.
    pub fn poly_up_to_degree(&mut self, nvars: usize, max_degree: u32) -> GradedPolynomial {
        loop {
            let mut p = GradedPolynomial::zero(nvars);
            for d in 0..=max_degree {
                for alpha in enumerate_compositions(d as i64, nvars).iter() {
                    let c = self.int_in(-3, 3);
                    if c != 0 {
                        p = p.add(&GradedPolynomial::monomial(
                            alpha.parts().to_vec(),
                            rat(c, 1),
                        ));
                    }
                }
            }
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// A battery of homogeneous input triples for span measurements.
    pub fn triple_battery(
        &mut self,
        nvars: usize,
        degree: u32,
        count: usize,
    ) -> Vec<[GradedPolynomial; 3]> {
        (0..count)
            .map(|_| {
                [
                    self.homogeneous_poly(nvars, degree),
                    self.homogeneous_poly(nvars, degree),
                    self.homogeneous_poly(nvars, degree),
                ]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinism() {
        let mut a = Sampler::new(99);
        let mut b = Sampler::new(99);
        for _ in 0..10 {
            assert_eq!(a.rational(), b.rational());
        }
        assert_eq!(a.homogeneous_poly(4, 3), b.homogeneous_poly(4, 3));
    }

    #[test]
    fn generic_weights_avoid_half_integers() {
        let mut s = Sampler::new(7);
        for _ in 0..50 {
            let w = s.weight_assignment(Family::Tri, true);
            assert!(w.is_generic());
        }
    }

    #[test]
    fn homogeneous_samples_are_homogeneous() {
        let mut s = Sampler::new(3);
        for deg in 0..5 {
            let p = s.homogeneous_poly(5, deg);
            assert_eq!(p.homogeneous_degree(), Some(deg));
        }
    }
}
