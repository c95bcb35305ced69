use serde_json::Value;

use super::{Decider, MethodError, Transformer};
use crate::model::DecisionMatrix;
use crate::ranking::RankResult;
use crate::scalar::Scalar;

/// Transformers applied in order, followed by one terminal decider.
pub struct Pipeline<T: Scalar> {
    steps: Vec<Box<dyn Transformer<T>>>,
    decider: Box<dyn Decider<T>>,
}

impl<T: Scalar> Pipeline<T> {
    pub fn new(steps: Vec<Box<dyn Transformer<T>>>, decider: Box<dyn Decider<T>>) -> Self {
        Self { steps, decider }
    }

    pub fn steps(&self) -> &[Box<dyn Transformer<T>>] {
        &self.steps
    }

    pub fn decider(&self) -> &dyn Decider<T> {
        self.decider.as_ref()
    }

    fn step_names(&self) -> Vec<String> {
        self.steps
            .iter()
            .map(|s| s.name())
            .chain(std::iter::once(self.decider.name()))
            .collect()
    }

    /// Runs every stage; errors carry the index of the failing stage.
    pub fn run(&self, dm: &DecisionMatrix<T>) -> Result<RankResult, MethodError> {
        let tag = |index: usize, name: String| {
            move |e: MethodError| MethodError::Stage {
                index,
                name,
                source: Box::new(e),
            }
        };
        let mut current = dm.clone();
        for (i, step) in self.steps.iter().enumerate() {
            current = step.transform(&current).map_err(tag(i, step.name()))?;
        }
        let last = self.steps.len();
        let rank = self
            .decider
            .evaluate(&current)
            .map_err(tag(last, self.decider.name()))?;

        let (_, alternatives, values, mut extra) = rank.into_parts();
        let names = self.step_names();
        extra.insert(
            "pipeline.steps",
            Value::Array(names.iter().cloned().map(Value::from).collect()),
        )?;
        Ok(RankResult::from_parts_unchecked(
            Decider::name(self),
            alternatives,
            values,
            extra,
        ))
    }
}

impl<T: Scalar> Decider<T> for Pipeline<T> {
    fn name(&self) -> String {
        format!("Pipeline[{}]", self.step_names().join(", "))
    }

    fn evaluate(&self, dm: &DecisionMatrix<T>) -> Result<RankResult, MethodError> {
        self.run(dm)
    }
}

impl<T: Scalar> std::fmt::Debug for Pipeline<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("Pipeline").field(&self.step_names()).finish()
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::methods::{topsis, weighted_sum, Stage, Topsis, WeightedSum};
    use crate::model::tests::m1;

    fn boxed(stages: Vec<Stage<f64>>) -> Vec<Box<dyn Transformer<f64>>> {
        stages
            .into_iter()
            .map(|s| Box::new(s) as Box<dyn Transformer<f64>>)
            .collect()
    }

    #[test]
    fn identity_inversion_matches_bare_method() {
        let p = Pipeline::new(boxed(vec![Stage::InvertMinimize]), Box::new(WeightedSum));
        let r = p.run(&m1()).unwrap();
        let bare = weighted_sum(&m1()).unwrap();
        assert_eq!(r.values(), bare.values());
        assert_eq!(r.alternatives(), bare.alternatives());
        assert_eq!(
            r.extra().get("pipeline.steps").unwrap(),
            &serde_json::json!(["invert_minimize", "weighted_sum"])
        );
        assert!(r.extra().contains_key("weighted_sum.scores"));
    }

    #[test]
    fn empty_pipeline_matches_topsis() {
        let p = Pipeline::new(vec![], Box::new(Topsis));
        assert_eq!(
            p.run(&m1()).unwrap().values(),
            topsis(&m1()).unwrap().values()
        );
    }

    #[test]
    fn full_shape_pipeline_filters() {
        let th: BTreeMap<String, f64> = [("c1".to_string(), 6.0)].into();
        let p = Pipeline::new(
            boxed(vec![
                Stage::InvertMinimize,
                Stage::FilterGt { thresholds: th },
                Stage::SumScaler,
                Stage::VectorScaler,
            ]),
            Box::new(Topsis),
        );
        let r = p.run(&m1()).unwrap();
        assert_eq!(r.alternatives(), ["A", "B"]);
        assert_eq!(r.values(), [1, 2]);
    }

    #[test]
    fn stage_errors_are_tagged() {
        let th: BTreeMap<String, f64> = [("zz".to_string(), 6.0)].into();
        let p = Pipeline::new(
            boxed(vec![Stage::SumScaler, Stage::FilterGt { thresholds: th }]),
            Box::new(WeightedSum),
        );
        let err = p.run(&m1()).unwrap_err();
        match err {
            MethodError::Stage {
                index,
                name,
                source,
            } => {
                assert_eq!(index, 1);
                assert_eq!(name, "filter_gt");
                assert_eq!(*source, MethodError::UnknownCriterion("zz".into()));
            }
            other => panic!("unexpected {other:?}"),
        }

        let th: BTreeMap<String, f64> = [("c1".to_string(), 100.0)].into();
        let p = Pipeline::new(
            boxed(vec![Stage::FilterGt { thresholds: th }]),
            Box::new(WeightedSum),
        );
        assert!(p.run(&m1()).unwrap_err().is_all_filtered());
    }

    #[test]
    fn alternative_set_shrinks_monotonically() {
        let th: BTreeMap<String, f64> = [("c2".to_string(), 5.0)].into();
        let stages = vec![
            Stage::FilterGt { thresholds: th },
            Stage::FilterNonDominated,
            Stage::VectorScaler,
        ];
        let mut current = m1();
        let mut sizes = vec![current.n_alternatives()];
        for s in &stages {
            current = s.transform(&current).unwrap();
            sizes.push(current.n_alternatives());
        }
        assert!(sizes.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(sizes, vec![3, 2, 1, 1]);
    }
}
