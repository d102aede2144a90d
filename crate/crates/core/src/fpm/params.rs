//! Pair classes, potential parameters, and per-class gain vectors.
//!
//! Every live pair of items is classified by its work-function mode and by
//! how the two items' targets sit relative to each other (the "flavor").
//! Only six mode/flavor combinations can occur; the engine's potential is a
//! sum of per-class weights over all live pairs, and each request's amortized
//! cost decomposes into per-class gains collected in a `CountVector`.

use crate::error::{Error, Result};
use crate::numeric::{rat, Q17};
use crate::pairwf::Mode;

/// Relative placement of the two targets in a pair (E earlier, L later).
///
/// With `t_E`, `t_L` the targets of E and L, the cases are mutually
/// exclusive and exhaustive given the invariant that an item's target never
/// sits behind the item itself:
///
/// * `Disjoint`:    t_E <= E < t_L  (targets separated by E)
/// * `Overlapping`: t_E < t_L <= E
/// * `Equal`:       t_E = t_L
/// * `Nested`:      t_L < t_E <= E
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Disjoint,
    Overlapping,
    Equal,
    Nested,
}

/// The six mode/flavor classes a live pair can inhabit.
///
/// Mode gamma never coexists with flavor `Disjoint` or `Overlapping`, and
/// mode alpha never coexists with `Nested`; the remaining combinations
/// collapse into six classes because the potential does not distinguish
/// `Overlapping` from `Equal` under alpha, nor `Nested` from `Equal` under
/// beta and gamma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairClass {
    AlphaDisjoint,
    BetaDisjoint,
    AlphaOverlapEqual,
    BetaOverlap,
    BetaNestedEqual,
    GammaNestedEqual,
}

impl PairClass {
    /// All classes in canonical order; gain vectors are indexed this way.
    pub const ALL: [PairClass; 6] = [
        PairClass::AlphaDisjoint,
        PairClass::BetaDisjoint,
        PairClass::AlphaOverlapEqual,
        PairClass::BetaOverlap,
        PairClass::BetaNestedEqual,
        PairClass::GammaNestedEqual,
    ];

    /// Position of this class in the canonical order.
    pub fn index(self) -> usize {
        match self {
            PairClass::AlphaDisjoint => 0,
            PairClass::BetaDisjoint => 1,
            PairClass::AlphaOverlapEqual => 2,
            PairClass::BetaOverlap => 3,
            PairClass::BetaNestedEqual => 4,
            PairClass::GammaNestedEqual => 5,
        }
    }

    /// Combine a mode with a flavor, rejecting the impossible pairings.
    pub fn from_parts(mode: Mode, flavor: Flavor) -> Result<PairClass> {
        use Flavor::*;
        use Mode::*;
        match (mode, flavor) {
            (Alpha, Disjoint) => Ok(PairClass::AlphaDisjoint),
            (Beta, Disjoint) => Ok(PairClass::BetaDisjoint),
            (Alpha, Overlapping) | (Alpha, Equal) => Ok(PairClass::AlphaOverlapEqual),
            (Beta, Overlapping) => Ok(PairClass::BetaOverlap),
            (Beta, Nested) | (Beta, Equal) => Ok(PairClass::BetaNestedEqual),
            (Gamma, Nested) | (Gamma, Equal) => Ok(PairClass::GammaNestedEqual),
            (m, f) => Err(Error::InvariantViolation(format!(
                "pair entered impossible class {:?}/{:?}",
                m, f
            ))),
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            PairClass::AlphaDisjoint | PairClass::AlphaOverlapEqual => Mode::Alpha,
            PairClass::BetaDisjoint | PairClass::BetaOverlap | PairClass::BetaNestedEqual => {
                Mode::Beta
            }
            PairClass::GammaNestedEqual => Mode::Gamma,
        }
    }
}

/// Per-class potential weights plus the competitive ratio and mixing
/// coefficient they certify.
///
/// The defaults are the unique solution making the mixed gain vector a
/// scalar multiple of the opponent's: weights in sixteenths of `a + b*s`
/// where `s = sqrt(17)`, ratio `(23 + s) / 8`, mix `(s - 1) / 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PotentialParams {
    pub alpha_disjoint: Q17,
    pub beta_disjoint: Q17,
    pub alpha_overlap_equal: Q17,
    pub beta_overlap: Q17,
    pub beta_nested_equal: Q17,
    pub gamma_nested_equal: Q17,
    /// Competitive ratio the weights are meant to certify.
    pub ratio: Q17,
    /// Weight of the insert-before-target row in the mixed gain vector.
    pub mix: Q17,
}

impl Default for PotentialParams {
    fn default() -> Self {
        PotentialParams {
            alpha_disjoint: Q17::ZERO,
            beta_disjoint: Q17::sixteenth(5, 3),
            alpha_overlap_equal: Q17::from_int(2),
            beta_overlap: Q17::sixteenth(1, 7),
            beta_nested_equal: Q17::sixteenth(9, -1),
            gamma_nested_equal: Q17::from_int(2),
            ratio: Q17::new(rat(23, 8), rat(1, 8)),
            mix: Q17::new(rat(-1, 4), rat(1, 4)),
        }
    }
}

impl PotentialParams {
    /// Weight of one pair in the given class.
    pub fn weight(&self, class: PairClass) -> Q17 {
        match class {
            PairClass::AlphaDisjoint => self.alpha_disjoint,
            PairClass::BetaDisjoint => self.beta_disjoint,
            PairClass::AlphaOverlapEqual => self.alpha_overlap_equal,
            PairClass::BetaOverlap => self.beta_overlap,
            PairClass::BetaNestedEqual => self.beta_nested_equal,
            PairClass::GammaNestedEqual => self.gamma_nested_equal,
        }
    }

    /// Check the ordering constraints the amortized analysis relies on.
    ///
    /// Violations are reported by name so a parameter search can tell which
    /// constraint it tripped.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::ConstraintViolation(msg.to_string()));
        if !self.alpha_disjoint.is_zero() {
            return fail("alpha_disjoint must be 0 (fresh pairs carry no potential)");
        }
        for (name, w) in [
            ("beta_disjoint", self.beta_disjoint),
            ("alpha_overlap_equal", self.alpha_overlap_equal),
            ("beta_overlap", self.beta_overlap),
            ("beta_nested_equal", self.beta_nested_equal),
            ("gamma_nested_equal", self.gamma_nested_equal),
        ] {
            if w.is_negative() {
                return fail(&format!("{name} must be nonnegative"));
            }
        }
        let half_ratio = self.ratio * rat(1, 2);
        if self.alpha_overlap_equal > self.beta_nested_equal + half_ratio {
            return fail("alpha_overlap_equal exceeds beta_nested_equal + ratio/2");
        }
        if self.beta_nested_equal > self.beta_overlap {
            return fail("beta_nested_equal exceeds beta_overlap");
        }
        if self.beta_disjoint.max(self.beta_overlap) > self.gamma_nested_equal + half_ratio {
            return fail("max(beta_disjoint, beta_overlap) exceeds gamma_nested_equal + ratio/2");
        }
        if self.mix.is_negative() || self.mix > Q17::from_int(1) {
            return fail("mix must lie in [0, 1]");
        }
        if self.ratio <= Q17::from_int(1) {
            return fail("ratio must exceed 1");
        }
        Ok(())
    }
}

/// Per-class gains of one request, split by the serving move.
///
/// Component `i` is the worst-case amortized cost contributed by one
/// predecessor pair in class `PairClass::ALL[i]`: the movement cost past (or
/// not past) that predecessor plus the pair's potential change. `opt` is the
/// pair's work-function growth, a lower bound on any schedule's cost share.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GainVectors {
    /// Insert-before-target move (the requested item stops at its target).
    pub pm: [Q17; 6],
    /// Move-to-front move.
    pub fm: [Q17; 6],
    /// Work-function growth per predecessor pair.
    pub opt: [Q17; 6],
}

impl GainVectors {
    /// Build the gain vectors for a validated parameter set.
    pub fn from_params(p: &PotentialParams) -> Result<GainVectors> {
        p.validate()?;
        let one = Q17::from_int(1);
        let two = Q17::from_int(2);
        let half = Q17::rational(rat(1, 2));

        // Base row: movement cost per predecessor. An insert-before-target
        // passes a predecessor only when the target sits at or before it,
        // which is exactly the non-disjoint flavors.
        let pm_base = [one, one, two, two, two, two];
        let fm_base = [two; 6];

        // Correction row: potential change of the predecessor pair. For
        // AlphaOverlapEqual the landing class depends on geometry, so the
        // worst case over the reachable classes is charged.
        let worst_after_alpha_oe = p
            .beta_disjoint
            .max(p.beta_overlap)
            .max(p.beta_nested_equal);
        let pm_corr = [
            p.beta_nested_equal - p.alpha_disjoint,
            p.gamma_nested_equal - p.beta_disjoint,
            worst_after_alpha_oe - p.alpha_overlap_equal,
            p.alpha_overlap_equal - p.beta_overlap,
            p.alpha_disjoint - p.beta_nested_equal,
            p.alpha_disjoint - p.gamma_nested_equal,
        ];
        let fm_corr = [
            p.beta_disjoint - p.alpha_disjoint,
            p.alpha_disjoint - p.beta_disjoint,
            p.beta_disjoint - p.alpha_overlap_equal,
            p.alpha_disjoint - p.beta_overlap,
            p.alpha_disjoint - p.beta_nested_equal,
            p.alpha_disjoint - p.gamma_nested_equal,
        ];

        let mut pm = [Q17::ZERO; 6];
        let mut fm = [Q17::ZERO; 6];
        for i in 0..6 {
            pm[i] = pm_base[i] + pm_corr[i];
            fm[i] = fm_base[i] + fm_corr[i];
        }
        // Work-function growth: half per predecessor pair not already in
        // gamma; gamma pairs are saturated and grow nothing.
        let opt = [half, half, half, half, half, Q17::ZERO];
        Ok(GainVectors { pm, fm, opt })
    }

    /// Componentwise mix `mix * pm + (1 - mix) * fm`.
    pub fn mixed(&self, mix: Q17) -> [Q17; 6] {
        let mut out = [Q17::ZERO; 6];
        let rest = Q17::from_int(1) - mix;
        for i in 0..6 {
            out[i] = self.pm[i] * mix + self.fm[i] * rest;
        }
        out
    }
}

impl GainVectors {
    /// Gain vectors for the default parameters. Infallible by construction.
    pub fn standard() -> GainVectors {
        GainVectors::from_params(&PotentialParams::default())
            .expect("default parameters validate")
    }
}

/// How many predecessor pairs of each class a request saw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountVector(pub [u64; 6]);

impl CountVector {
    pub fn record(&mut self, class: PairClass) {
        self.0[class.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn dot(&self, row: &[Q17; 6]) -> Q17 {
        let mut acc = Q17::ZERO;
        for i in 0..6 {
            if self.0[i] != 0 {
                acc = acc + row[i] * (self.0[i] as i64);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_params_validate() {
        PotentialParams::default().validate().unwrap();
    }

    #[test]
    fn validation_names_the_broken_constraint() {
        let mut p = PotentialParams::default();
        p.beta_nested_equal = p.beta_overlap + Q17::from_int(1);
        match p.validate() {
            Err(Error::ConstraintViolation(msg)) => {
                assert!(msg.contains("beta_nested_equal"), "got: {msg}")
            }
            other => panic!("expected constraint violation, got {other:?}"),
        }

        let mut p = PotentialParams::default();
        p.alpha_disjoint = Q17::from_int(1);
        assert!(p.validate().is_err());
    }

    #[test]
    fn gain_vectors_match_closed_forms() {
        let g = GainVectors::standard();
        let pm = [
            Q17::sixteenth(25, -1),
            Q17::sixteenth(43, -3),
            Q17::sixteenth(1, 7),
            Q17::sixteenth(63, -7),
            Q17::sixteenth(23, 1),
            Q17::ZERO,
        ];
        let fm = [
            Q17::sixteenth(37, 3),
            Q17::sixteenth(27, -3),
            Q17::sixteenth(5, 3),
            Q17::sixteenth(31, -7),
            Q17::sixteenth(23, 1),
            Q17::ZERO,
        ];
        assert_eq!(g.pm, pm);
        assert_eq!(g.fm, fm);
    }

    #[test]
    fn mixed_gain_is_ratio_times_opt() {
        let p = PotentialParams::default();
        let g = GainVectors::from_params(&p).unwrap();
        let mixed = g.mixed(p.mix);
        for i in 0..6 {
            assert_eq!(mixed[i], p.ratio * g.opt[i], "component {i}");
        }
    }

    #[test]
    fn per_class_move_preferences() {
        let g = GainVectors::standard();
        // A lone nested/equal beta predecessor prices both moves the same.
        assert_eq!(g.pm[4], g.fm[4]);
        // A disjoint alpha predecessor favors stopping at the target.
        assert!(g.pm[0] < g.fm[0]);
        // A disjoint beta predecessor favors the front.
        assert!(g.fm[1] < g.pm[1]);
    }

    #[test]
    fn count_vector_dot() {
        let g = GainVectors::standard();
        let mut v = CountVector::default();
        v.record(PairClass::AlphaDisjoint);
        v.record(PairClass::AlphaDisjoint);
        v.record(PairClass::GammaNestedEqual);
        assert_eq!(v.total(), 3);
        assert_eq!(v.dot(&g.pm), g.pm[0] * 2i64);
        assert_eq!(v.dot(&g.opt), Q17::from_int(1));
    }

    #[test]
    fn class_from_parts_rejects_impossible_combinations() {
        assert!(PairClass::from_parts(Mode::Alpha, Flavor::Nested).is_err());
        assert!(PairClass::from_parts(Mode::Gamma, Flavor::Disjoint).is_err());
        assert!(PairClass::from_parts(Mode::Gamma, Flavor::Overlapping).is_err());
        assert_eq!(
            PairClass::from_parts(Mode::Beta, Flavor::Equal).unwrap(),
            PairClass::BetaNestedEqual
        );
    }
}
