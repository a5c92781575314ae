use crate::error::{Error, Result};

fn check(predicted: &[usize], actual: &[usize], classes: usize) -> Result<()> {
    if predicted.len() != actual.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} labels",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::EmptySelection("no predictions to score".into()));
    }
    if let Some(&bad) = predicted.iter().chain(actual).find(|&&l| l >= classes) {
        return Err(Error::Value(format!("label {bad} out of range for {classes} classes")));
    }
    Ok(())
}

/// Unweighted mean of per-class F1. A class that appears in neither
/// `predicted` nor `actual` counts as F1 = 0.
pub fn macro_f1(predicted: &[usize], actual: &[usize], classes: usize) -> Result<f64> {
    check(predicted, actual, classes)?;
    let mut tp = vec![0usize; classes];
    let mut fp = vec![0usize; classes];
    let mut fn_ = vec![0usize; classes];
    for (&p, &a) in predicted.iter().zip(actual) {
        if p == a {
            tp[p] += 1;
        } else {
            fp[p] += 1;
            fn_[a] += 1;
        }
    }
    let mut total = 0.0;
    for c in 0..classes {
        let denom = 2 * tp[c] + fp[c] + fn_[c];
        if denom == 0 {
            log::debug!("class {c} absent from predictions and labels; F1 taken as 0");
            continue;
        }
        total += 2.0 * tp[c] as f64 / denom as f64;
    }
    Ok(total / classes as f64)
}

/// Micro-averaged F1, which for single-label data equals accuracy.
pub fn micro_f1(predicted: &[usize], actual: &[usize], classes: usize) -> Result<f64> {
    check(predicted, actual, classes)?;
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    Ok(hits as f64 / predicted.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_and_hopeless() {
        assert_eq!(macro_f1(&[0, 1, 2, 1], &[0, 1, 2, 1], 3).unwrap(), 1.0);
        assert_eq!(macro_f1(&[1, 0, 0], &[0, 1, 1], 2).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_macro() {
        let f = macro_f1(&[0, 0], &[0, 1], 2).unwrap();
        assert!((f - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(micro_f1(&[0, 0], &[0, 1], 2).unwrap(), 0.5);
    }

    #[test]
    fn absent_class_counts_as_zero() {
        assert_eq!(macro_f1(&[0, 0], &[0, 0], 2).unwrap(), 0.5);
    }

    #[test]
    fn out_of_range_label_is_value_error() {
        assert!(matches!(macro_f1(&[2], &[0], 2), Err(Error::Value(_))));
    }

    proptest! {
        #[test]
        fn permutation_invariant(pairs in prop::collection::vec((0usize..4, 0usize..4), 1..40), seed in 0u64..1000) {
            let (p, a): (Vec<usize>, Vec<usize>) = pairs.iter().copied().unzip();
            let mut shuffled = pairs.clone();
            crate::rng::RngState::new(seed).stream("perm", 0).shuffle(&mut shuffled);
            let (sp, sa): (Vec<usize>, Vec<usize>) = shuffled.into_iter().unzip();
            prop_assert_eq!(macro_f1(&p, &a, 4).unwrap(), macro_f1(&sp, &sa, 4).unwrap());
        }
    }
}
