//! Closed-form laws for path extrema of binary-outcome probability martingales.
//!
//! Let `p_t` be a probability path that starts at `p0`, is a martingale, and
//! terminates at 0 or 1. Write `M` for its running maximum. On continuous
//! paths the following are exact (and in discrete time they are sharp upper
//! bounds on the tails):
//!
//! - unconditional: `P(M >= x) = p0 / x` on `[p0, 1)`, with an atom of mass
//!   `p0` at 1;
//! - conditional on a terminal loss: `P(M >= x | loss) = (p0/(1-p0)) * ((1-x)/x)`
//!   on `[p0, 1)`, no atom;
//! - two-player loser's peak: piecewise `1 - (1-p0)/x` then `2 - 1/x`, where
//!   `p0` is the favored side's prior;
//! - n-player winner's minimum: `sum_{x >= p0_i} p0_i + (x/(1-x)) *
//!   sum_{x < p0_i} (1 - p0_i)` below the largest prior.
//!
//! Every piece is of the form `a - b/x` or `a + b*x/(1-x)`, so quantiles
//! invert analytically; no numeric root-finding is used anywhere.

use crate::error::{Error, Result};

/// Pre-game (or inception) win probability, constrained to the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prior(f64);

impl Prior {
    pub fn new(p0: f64) -> Result<Self> {
        if p0.is_finite() && p0 > 0.0 && p0 < 1.0 {
            Ok(Prior(p0))
        } else {
            Err(Error::InvalidPrior(p0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The complementary side's prior, `1 - p0`.
    pub fn complement(self) -> Prior {
        Prior(1.0 - self.0)
    }
}

/// Tolerance on the sum of a prior vector before exact renormalization.
const PRIOR_SUM_TOL: f64 = 1e-9;

/// Per-player priors for an n-player event; entries sum to 1.
///
/// Inputs may carry float error up to 1e-9 in the sum and are renormalized
/// exactly on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorVector {
    priors: Vec<f64>,
}

impl PriorVector {
    pub fn new(priors: Vec<f64>) -> Result<Self> {
        if priors.len() < 2 {
            return Err(Error::InvalidPriorVector(format!(
                "need at least 2 players, got {}",
                priors.len()
            )));
        }
        for (i, &p) in priors.iter().enumerate() {
            if !(p.is_finite() && p > 0.0 && p < 1.0) {
                return Err(Error::InvalidPriorVector(format!(
                    "entry {i} = {p} outside (0, 1)"
                )));
            }
        }
        let sum: f64 = priors.iter().sum();
        if (sum - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::InvalidPriorVector(format!(
                "entries sum to {sum}, more than {PRIOR_SUM_TOL} from 1"
            )));
        }
        let priors = priors.into_iter().map(|p| p / sum).collect();
        Ok(PriorVector { priors })
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.priors.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires length >= 2
    }

    pub fn max_prior(&self) -> f64 {
        self.priors.iter().cloned().fold(f64::MIN, f64::max)
    }

    /// Uniform priors `(1/n, ..., 1/n)`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPriorVector(format!(
                "need at least 2 players, got {n}"
            )));
        }
        Ok(PriorVector {
            priors: vec![1.0 / n as f64; n],
        })
    }
}

fn check_unit_interval(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange { name, value: x })
    }
}

/// CDF of the running maximum: 0 below `p0`, `1 - p0/x` on `[p0, 1)`, 1 at 1.
///
/// The left limit at 1 is `1 - p0`, so the law has an atom of mass `p0` at 1
/// (the paths that end in a win).
pub fn max_cdf_unconditional(p0: Prior, x: f64) -> Result<f64> {
    check_unit_interval("x", x)?;
    let p = p0.value();
    Ok(if x < p {
        0.0
    } else if x < 1.0 {
        1.0 - p / x
    } else {
        1.0
    })
}

/// CDF of the running maximum conditional on a terminal loss:
/// `1 - (p0/(1-p0)) * ((1-x)/x)` on `[p0, 1)`.
///
/// This is also the reference law for the peak model-implied win probability
/// of a losing trade, with `p0` the inception probability. No atom at 1: a
/// path that touches 1 cannot end in a loss.
pub fn max_cdf_conditional_loss(p0: Prior, x: f64) -> Result<f64> {
    check_unit_interval("x", x)?;
    let p = p0.value();
    Ok(if x < p {
        0.0
    } else if x < 1.0 {
        1.0 - (p / (1.0 - p)) * ((1.0 - x) / x)
    } else {
        1.0
    })
}

/// Sharp discrete-time upper bound on the tail `P(M >= x)`.
///
/// Returns `p0/x` unconditionally, `(p0/(1-p0)) * ((1-x)/x)` conditional on a
/// terminal loss. For finite update schedules these are inequalities (the
/// empirical tail must not exceed them beyond sampling error); equality holds
/// exactly when level crossings land on the level with no terminal-step
/// crossing.
pub fn discrete_tail_bound(p0: Prior, x: f64, conditional_on_loss: bool) -> Result<f64> {
    let p = p0.value();
    if !x.is_finite() || x < p || x >= 1.0 {
        return Err(Error::ArgumentOutOfRange {
            name: "x",
            value: x,
            range: "[p0, 1)",
        });
    }
    Ok(if conditional_on_loss {
        (p / (1.0 - p)) * ((1.0 - x) / x)
    } else {
        p / x
    })
}

/// CDF of the eventual loser's peak win probability in a two-player game.
///
/// `p0` is the favored side's prior; callers passing `p0 < 1/2` are swapped
/// to `1 - p0` internally (the law is label-symmetric). Pieces:
/// 0 below `1-p0`, `1 - (1-p0)/x` on `[1-p0, p0)`, `2 - 1/x` on `[p0, 1)`,
/// 1 at 1. Continuous on the whole support: the loser never attains 1.
pub fn loser_max_cdf(p0: Prior, x: f64) -> Result<f64> {
    check_unit_interval("x", x)?;
    let p = p0.value().max(1.0 - p0.value());
    let q = 1.0 - p;
    Ok(if x < q {
        0.0
    } else if x < p {
        1.0 - q / x
    } else if x < 1.0 {
        2.0 - 1.0 / x
    } else {
        1.0
    })
}

/// CDF of the eventual winner's minimum win probability in an n-player event.
///
/// Below `max_i p0_i` the value is
/// `sum_{i: x >= p0_i} p0_i + (x/(1-x)) * sum_{i: x < p0_i} (1 - p0_i)`;
/// above it the CDF is 1 (the minimum cannot exceed the winner's own prior).
pub fn winner_min_cdf(priors: &PriorVector, x: f64) -> Result<f64> {
    check_unit_interval("x", x)?;
    let top = priors.max_prior();
    if x >= top {
        return Ok(1.0);
    }
    let mut settled = 0.0;
    let mut pending = 0.0;
    for &p in priors.priors() {
        if x >= p {
            settled += p;
        } else {
            pending += 1.0 - p;
        }
    }
    Ok(settled + (x / (1.0 - x)) * pending)
}

/// The four extrema laws, with their parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Law {
    /// Running maximum of one path; atom of mass `p0` at 1.
    MaxUnconditional { p0: Prior },
    /// Running maximum conditional on a terminal loss.
    MaxConditionalLoss { p0: Prior },
    /// Two-player eventual loser's peak. `favored` holds the bigger prior;
    /// `swapped` records whether construction flipped the caller's labels.
    LoserMax { favored: Prior, swapped: bool },
    /// n-player eventual winner's minimum.
    WinnerMin { priors: PriorVector },
}

/// Discriminant for [`Law`] variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    MaxUnconditional,
    MaxConditionalLoss,
    LoserMax,
    WinnerMin,
}

impl Law {
    pub fn max_unconditional(p0: Prior) -> Law {
        Law::MaxUnconditional { p0 }
    }

    pub fn max_conditional_loss(p0: Prior) -> Law {
        Law::MaxConditionalLoss { p0 }
    }

    /// Loser-peak law. A `p0` below 1/2 is normalized to the favored side;
    /// the swap is recorded so downstream diagnostics stay auditable.
    pub fn loser_max(p0: Prior) -> Law {
        let swapped = p0.value() < 0.5;
        let favored = if swapped { p0.complement() } else { p0 };
        Law::LoserMax { favored, swapped }
    }

    pub fn winner_min(priors: PriorVector) -> Law {
        Law::WinnerMin { priors }
    }

    pub fn kind(&self) -> LawKind {
        match self {
            Law::MaxUnconditional { .. } => LawKind::MaxUnconditional,
            Law::MaxConditionalLoss { .. } => LawKind::MaxConditionalLoss,
            Law::LoserMax { .. } => LawKind::LoserMax,
            Law::WinnerMin { .. } => LawKind::WinnerMin,
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        match self {
            Law::MaxUnconditional { p0 } => max_cdf_unconditional(*p0, x),
            Law::MaxConditionalLoss { p0 } => max_cdf_conditional_loss(*p0, x),
            Law::LoserMax { favored, .. } => loser_max_cdf(*favored, x),
            Law::WinnerMin { priors } => winner_min_cdf(priors, x),
        }
    }

    /// `P(X >= x)`, i.e. `1 - cdf(x-)`: at an atom the mass is included.
    ///
    /// Only the unconditional maximum has an atom (mass `p0` at 1); all other
    /// laws are continuous, so there `survival(x) = 1 - cdf(x)`.
    pub fn survival(&self, x: f64) -> Result<f64> {
        match self {
            Law::MaxUnconditional { p0 } if x == 1.0 => Ok(p0.value()),
            _ => Ok(1.0 - self.cdf(x)?),
        }
    }

    /// Generalized inverse `inf { x : cdf(x) >= u }`, in closed form per piece.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_unit_interval("u", u)?;
        if u == 0.0 {
            // cdf(0) = 0 >= 0 for every law here.
            return Ok(0.0);
        }
        Ok(match self {
            Law::MaxUnconditional { p0 } => {
                // 1 - p0/x >= u  <=>  x >= p0/(1-u); the atom at 1 absorbs
                // all u above the left limit 1 - p0 (u = 1 divides by zero,
                // giving +inf, and the min still lands on 1).
                (p0.value() / (1.0 - u)).min(1.0)
            }
            Law::MaxConditionalLoss { p0 } => {
                let c = p0.value() / (1.0 - p0.value());
                c / (c + 1.0 - u)
            }
            Law::LoserMax { favored, .. } => {
                let p = favored.value();
                let q = 1.0 - p;
                // cdf value where the two pieces meet, F(p) = (2p-1)/p.
                let knee = (2.0 * p - 1.0) / p;
                if u < knee {
                    q / (1.0 - u)
                } else {
                    1.0 / (2.0 - u)
                }
            }
            Law::WinnerMin { priors } => winner_min_quantile(priors, u),
        })
    }
}

fn winner_min_quantile(priors: &PriorVector, u: f64) -> f64 {
    // Piecewise in x with breakpoints at the sorted distinct priors. On the
    // piece starting at breakpoint s, F(x) = a + b*x/(1-x) with
    // a = sum of priors <= s and b = sum of (1-prior) over priors > s.
    let mut brk: Vec<f64> = priors.priors().to_vec();
    brk.sort_by(|a, b| a.partial_cmp(b).unwrap());
    brk.dedup();
    let top = *brk.last().unwrap();

    let mut lo = 0.0;
    for (j, &s) in brk.iter().enumerate() {
        let hi_cdf = if s >= top {
            1.0
        } else {
            piece_eval(priors, lo, s)
        };
        if u <= hi_cdf || j == brk.len() - 1 {
            let (a, b) = piece_coeffs(priors, lo);
            if u >= 1.0 {
                return top;
            }
            let r = (u - a) / b;
            return (r / (1.0 + r)).min(top);
        }
        lo = s;
    }
    top
}

fn piece_coeffs(priors: &PriorVector, piece_start: f64) -> (f64, f64) {
    let mut a = 0.0;
    let mut b = 0.0;
    for &p in priors.priors() {
        if p <= piece_start {
            a += p;
        } else {
            b += 1.0 - p;
        }
    }
    (a, b)
}

fn piece_eval(priors: &PriorVector, piece_start: f64, x: f64) -> f64 {
    let (a, b) = piece_coeffs(priors, piece_start);
    a + b * x / (1.0 - x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn prior(p: f64) -> Prior {
        Prior::new(p).unwrap()
    }

    #[test]
    fn prior_rejects_degenerate_values() {
        for bad in [0.0, 1.0, -0.2, 1.3, f64::NAN, f64::INFINITY] {
            assert!(Prior::new(bad).is_err(), "accepted {bad}");
        }
        assert!(Prior::new(1e-12).is_ok());
    }

    #[test]
    fn prior_vector_tolerance_and_renormalization() {
        let pv = PriorVector::new(vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert_abs_diff_eq!(pv.priors().iter().sum::<f64>(), 1.0, epsilon = 0.0);

        // Off by a hair under the tolerance: accepted and renormalized.
        let pv = PriorVector::new(vec![0.25 + 4e-10, 0.25, 0.25, 0.25]).unwrap();
        assert_abs_diff_eq!(pv.priors().iter().sum::<f64>(), 1.0, epsilon = 1e-15);

        // Off by more than the tolerance: rejected.
        assert!(PriorVector::new(vec![0.25, 0.25, 0.25, 0.2501]).is_err());
        assert!(PriorVector::new(vec![1.0_f64]).is_err());
        assert!(PriorVector::new(vec![0.5, 0.3, 0.3]).is_err());
    }

    #[test]
    fn max_unconditional_examples() {
        let p = prior(0.5);
        assert_eq!(max_cdf_unconditional(p, 0.4).unwrap(), 0.0);
        assert_abs_diff_eq!(
            max_cdf_unconditional(p, 0.8).unwrap(),
            0.375,
            epsilon = 1e-15
        );
        assert_eq!(max_cdf_unconditional(p, 1.0).unwrap(), 1.0);
        let law = Law::max_unconditional(p);
        assert_eq!(law.survival(1.0).unwrap(), 0.5);
        assert!(max_cdf_unconditional(p, 1.2).is_err());
    }

    #[test]
    fn max_conditional_loss_examples() {
        assert_abs_diff_eq!(
            max_cdf_conditional_loss(prior(0.5), 2.0 / 3.0).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            max_cdf_conditional_loss(prior(0.6), 0.75).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            max_cdf_conditional_loss(prior(0.6), 0.9).unwrap(),
            5.0 / 6.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn discrete_tail_bound_examples() {
        assert_abs_diff_eq!(
            discrete_tail_bound(prior(0.5), 0.75, false).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            discrete_tail_bound(prior(0.5), 0.9, true).unwrap(),
            1.0 / 9.0,
            epsilon = 1e-15
        );
        // Saturates at the starting value.
        assert_abs_diff_eq!(
            discrete_tail_bound(prior(0.75), 0.75, true).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert!(discrete_tail_bound(prior(0.5), 0.4, false).is_err());
        assert!(discrete_tail_bound(prior(0.5), 1.0, false).is_err());
    }

    #[test]
    fn loser_max_examples() {
        assert_abs_diff_eq!(
            loser_max_cdf(prior(0.5), 2.0 / 3.0).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(loser_max_cdf(prior(0.75), 0.5).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(
            loser_max_cdf(prior(0.75), 0.9).unwrap(),
            8.0 / 9.0,
            epsilon = 1e-12
        );
        // Labels swap silently for an underdog prior.
        assert_eq!(
            loser_max_cdf(prior(0.25), 0.5).unwrap(),
            loser_max_cdf(prior(0.75), 0.5).unwrap()
        );
        match Law::loser_max(prior(0.25)) {
            Law::LoserMax { favored, swapped } => {
                assert!(swapped);
                assert_abs_diff_eq!(favored.value(), 0.75, epsilon = 1e-15);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn loser_max_is_continuous_at_the_kink() {
        for p in [0.55, 0.6, 0.75, 0.9, 0.99] {
            let q = 1.0 - p;
            let left = 1.0 - q / p;
            let right = 2.0 - 1.0 / p;
            assert_abs_diff_eq!(left, right, epsilon = 1e-12);
            // Right-continuity at the breakpoints themselves.
            assert_abs_diff_eq!(
                loser_max_cdf(prior(p), p).unwrap(),
                right,
                epsilon = 1e-15
            );
            assert_eq!(loser_max_cdf(prior(p), q).unwrap(), 0.0);
        }
    }

    #[test]
    fn winner_min_examples() {
        let sym3 = PriorVector::symmetric(3).unwrap();
        assert_abs_diff_eq!(winner_min_cdf(&sym3, 0.2).unwrap(), 0.5, epsilon = 1e-12);

        let asym = PriorVector::new(vec![1.0 / 6.0, 1.0 / 3.0, 0.5]).unwrap();
        assert_abs_diff_eq!(
            winner_min_cdf(&asym, 0.25).unwrap(),
            5.0 / 9.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            winner_min_cdf(&asym, 0.4).unwrap(),
            5.0 / 6.0,
            epsilon = 1e-12
        );
        assert_eq!(winner_min_cdf(&asym, 0.5).unwrap(), 1.0);
        assert_eq!(winner_min_cdf(&asym, 0.9).unwrap(), 1.0);
    }

    #[test]
    fn winner_min_symmetric_closed_form() {
        // (n-1) x / (1-x) on [0, 1/n).
        for n in [2usize, 3, 5, 8] {
            let pv = PriorVector::symmetric(n).unwrap();
            let upper = 1.0 / n as f64;
            for i in 0..200 {
                let x = upper * (i as f64) / 200.0;
                let expect = (n as f64 - 1.0) * x / (1.0 - x);
                assert_abs_diff_eq!(winner_min_cdf(&pv, x).unwrap(), expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn winner_min_is_continuous_at_breakpoints() {
        let asym = PriorVector::new(vec![1.0 / 6.0, 1.0 / 3.0, 0.5]).unwrap();
        for &b in asym.priors() {
            let eps = 1e-9;
            let below = winner_min_cdf(&asym, b - eps).unwrap();
            let at = winner_min_cdf(&asym, b).unwrap();
            assert_abs_diff_eq!(below, at, epsilon = 1e-7);
        }
    }

    #[test]
    fn quantile_examples() {
        let loser = Law::loser_max(prior(0.5));
        assert_abs_diff_eq!(loser.quantile(0.5).unwrap(), 2.0 / 3.0, epsilon = 1e-12);

        let max = Law::max_unconditional(prior(0.3));
        assert_eq!(max.quantile(1.0).unwrap(), 1.0);
        // Atom: every u above the left limit 1 - p0 maps to 1.
        assert_eq!(max.quantile(0.8).unwrap(), 1.0);

        let sym3 = Law::winner_min(PriorVector::symmetric(3).unwrap());
        assert_abs_diff_eq!(sym3.quantile(0.5).unwrap(), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(sym3.quantile(1.0).unwrap(), 1.0 / 3.0, epsilon = 1e-12);

        let cond = Law::max_conditional_loss(prior(0.6));
        assert_abs_diff_eq!(cond.quantile(0.5).unwrap(), 0.75, epsilon = 1e-12);

        assert_eq!(loser.quantile(0.0).unwrap(), 0.0);
        assert!(loser.quantile(1.5).is_err());
    }

    #[test]
    fn quantile_roundtrip_on_continuity_regions() {
        let laws = [
            Law::max_unconditional(prior(0.37)),
            Law::max_conditional_loss(prior(0.62)),
            Law::loser_max(prior(0.71)),
            Law::winner_min(PriorVector::new(vec![1.0 / 6.0, 1.0 / 3.0, 0.5]).unwrap()),
        ];
        for law in &laws {
            for i in 1..400 {
                let mut u = i as f64 / 400.0;
                if let Law::MaxUnconditional { p0 } = law {
                    // Stay below the atom's share of the range.
                    u *= 1.0 - p0.value() - 1e-9;
                    if u <= 0.0 {
                        continue;
                    }
                }
                let x = law.quantile(u).unwrap();
                assert_abs_diff_eq!(law.cdf(x).unwrap(), u, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn mixture_identity_on_grid() {
        // Loser-peak law is the outcome mixture of the two conditional max laws.
        for p in [0.5, 0.55, 0.68, 0.75, 0.9, 0.31] {
            let p0 = prior(p);
            let fav = p.max(1.0 - p);
            let w_loss = 1.0 - fav;
            for i in 0..=1000 {
                let x = i as f64 / 1000.0;
                let mix = w_loss * max_cdf_conditional_loss(prior(fav), x).unwrap()
                    + fav * max_cdf_conditional_loss(prior(1.0 - fav), x).unwrap();
                assert_abs_diff_eq!(loser_max_cdf(p0, x).unwrap(), mix, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn unconditional_and_conditional_tails_decompose() {
        // p0/x = p0 + (1-p0) * conditional tail on [p0, 1).
        for p in [0.2, 0.5, 0.6, 0.85] {
            let p0 = prior(p);
            for i in 0..500 {
                let x = p + (1.0 - p) * (i as f64 / 500.0);
                if x >= 1.0 {
                    break;
                }
                let lhs = discrete_tail_bound(p0, x, false).unwrap();
                let rhs = p + (1.0 - p) * discrete_tail_bound(p0, x, true).unwrap();
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn atom_masses() {
        for p in [0.1, 0.5, 0.93] {
            let p0 = prior(p);
            assert_eq!(Law::max_unconditional(p0).survival(1.0).unwrap(), p);
            assert_eq!(Law::max_conditional_loss(p0).survival(1.0).unwrap(), 0.0);
            assert_eq!(Law::loser_max(p0).survival(1.0).unwrap(), 0.0);
        }
    }
}
