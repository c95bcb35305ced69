use super::{Decider, MethodError};
use crate::model::DecisionMatrix;
use crate::ranking::RankResult;
use crate::scalar::Scalar;

/// How a tied pairwise comparison is resolved.
///
/// The primary ranking decides first. On a tie the optional fallback
/// decider is evaluated on the same sub-problem; if it also ties and
/// `force_untie` is set, the alternative listed first in the matrix wins.
pub struct TieBreakPolicy<T: Scalar> {
    pub fallback: Option<Box<dyn Decider<T>>>,
    pub force_untie: bool,
}

impl<T: Scalar> Default for TieBreakPolicy<T> {
    fn default() -> Self {
        Self {
            fallback: None,
            force_untie: true,
        }
    }
}

impl<T: Scalar> std::fmt::Debug for TieBreakPolicy<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TieBreakPolicy")
            .field("fallback", &self.fallback.as_ref().map(|d| d.name()))
            .field("force_untie", &self.force_untie)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairOutcome {
    Winner(String),
    Tie,
}

// Missing alternatives rank after every present one.
fn strict_winner<'a>(rank: &RankResult, x: &'a str, y: &'a str) -> Option<&'a str> {
    let rx = rank.rank_of(x).unwrap_or(usize::MAX);
    let ry = rank.rank_of(y).unwrap_or(usize::MAX);
    match rx.cmp(&ry) {
        std::cmp::Ordering::Less => Some(x),
        std::cmp::Ordering::Greater => Some(y),
        std::cmp::Ordering::Equal => None,
    }
}

pub fn break_tie<T: Scalar>(
    pair: (&str, &str),
    primary: &RankResult,
    policy: &TieBreakPolicy<T>,
    sub: &DecisionMatrix<T>,
) -> Result<PairOutcome, MethodError> {
    let (x, y) = pair;
    if let Some(w) = strict_winner(primary, x, y) {
        return Ok(PairOutcome::Winner(w.to_owned()));
    }
    if let Some(fallback) = &policy.fallback {
        match fallback.evaluate(sub) {
            Ok(rank) => {
                if let Some(w) = strict_winner(&rank, x, y) {
                    return Ok(PairOutcome::Winner(w.to_owned()));
                }
            }
            Err(e) if e.is_all_filtered() => {}
            Err(e) => return Err(e),
        }
    }
    if policy.force_untie {
        let pos = |a: &str| sub.position(a).unwrap_or(usize::MAX);
        let w = if pos(x) <= pos(y) { x } else { y };
        return Ok(PairOutcome::Winner(w.to_owned()));
    }
    Ok(PairOutcome::Tie)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::methods::WeightedSum;
    use crate::model::Objective;

    fn symmetric() -> DecisionMatrix<f64> {
        DecisionMatrix::new(
            ["A", "B"],
            ["c1", "c2"],
            vec![vec![1.0, 3.0], vec![3.0, 1.0]],
            vec![Objective::Maximize; 2],
            vec![1.0, 1.0],
        )
        .unwrap()
    }

    fn rr(values: &[usize]) -> RankResult {
        RankResult::new("p", vec!["A".into(), "B".into()], values.to_vec()).unwrap()
    }

    /// Weighted sum with its own weights, ignoring the matrix's.
    struct Reweighted(Vec<f64>);

    impl Decider<f64> for Reweighted {
        fn name(&self) -> String {
            "reweighted".into()
        }

        fn evaluate(&self, dm: &DecisionMatrix<f64>) -> Result<RankResult, MethodError> {
            WeightedSum.evaluate(&dm.with_weights(self.0.clone())?)
        }
    }

    #[test]
    fn primary_decides_without_tie() {
        let p = TieBreakPolicy::<f64>::default();
        assert_eq!(
            break_tie(("A", "B"), &rr(&[1, 2]), &p, &symmetric()).unwrap(),
            PairOutcome::Winner("A".into())
        );
        assert_eq!(
            break_tie(("A", "B"), &rr(&[2, 1]), &p, &symmetric()).unwrap(),
            PairOutcome::Winner("B".into())
        );
    }

    #[test]
    fn lexicographic_under_force() {
        let p = TieBreakPolicy::<f64>::default();
        assert_eq!(
            break_tie(("B", "A"), &rr(&[1, 1]), &p, &symmetric()).unwrap(),
            PairOutcome::Winner("A".into())
        );
        let lenient = TieBreakPolicy::<f64> {
            fallback: None,
            force_untie: false,
        };
        assert_eq!(
            break_tie(("A", "B"), &rr(&[1, 1]), &lenient, &symmetric()).unwrap(),
            PairOutcome::Tie
        );
    }

    #[test]
    fn fallback_discriminates() {
        // weights (0.8, 0.2): A = 1.4, B = 2.6
        let p = TieBreakPolicy {
            fallback: Some(Box::new(Reweighted(vec![0.8, 0.2])) as Box<dyn Decider<f64>>),
            force_untie: true,
        };
        assert_eq!(
            break_tie(("A", "B"), &rr(&[1, 1]), &p, &symmetric()).unwrap(),
            PairOutcome::Winner("B".into())
        );
        // symmetric fallback also ties, so the listing order decides
        let p = TieBreakPolicy {
            fallback: Some(Box::new(WeightedSum) as Box<dyn Decider<f64>>),
            force_untie: true,
        };
        assert_eq!(
            break_tie(("A", "B"), &rr(&[1, 1]), &p, &symmetric()).unwrap(),
            PairOutcome::Winner("A".into())
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn forced_policy_never_ties(v in 0.0..10.0f64, swap in any::<bool>()) {
                let dm = DecisionMatrix::new(
                    ["A", "B"],
                    ["c1"],
                    vec![vec![v], vec![v]],
                    vec![Objective::Maximize],
                    vec![1.0],
                )
                .unwrap();
                let rank = WeightedSum.evaluate(&dm).unwrap();
                prop_assert_eq!(rank.values(), &[1, 1]);
                let pair = if swap { ("B", "A") } else { ("A", "B") };
                let out = break_tie(pair, &rank, &TieBreakPolicy::<f64>::default(), &dm).unwrap();
                prop_assert_eq!(out, PairOutcome::Winner("A".into()));
            }
        }
    }
}
