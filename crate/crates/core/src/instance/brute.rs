use thiserror::Error;

use crate::model::{tuple_count, Assignment, Cost, TupleIter, WcspInstance};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("instance has {count} assignments, above the enumeration limit {limit}")]
pub struct EnumerationLimit {
    pub count: u64,
    pub limit: u64,
}

/// Minimum total cost over all feasible assignments, found by enumeration.
/// `Ok(None)` means no assignment is feasible.
pub fn brute_force_optimum(w: &WcspInstance, limit: u64) -> Result<Option<Cost>, EnumerationLimit> {
    let count = tuple_count(&w.domains);
    if count > limit {
        return Err(EnumerationLimit { count, limit });
    }
    let mut best: Option<Cost> = None;
    for values in TupleIter::new(&w.domains) {
        let a = Assignment(values);
        if !w.is_feasible(&a) {
            continue;
        }
        let total = w.offset + w.cost_functions.iter().map(|f| f.cost(&a)).sum::<Cost>();
        if best.map_or(true, |b| total < b) {
            best = Some(total);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostFunction, HardConstraint};

    #[test]
    fn single_assignment() {
        let f = CostFunction::new(vec![0], vec![1], 0, [(vec![0], 1)], 10).unwrap();
        let w = WcspInstance::new("one", vec![1], vec![], vec![f], 10).unwrap();
        assert_eq!(brute_force_optimum(&w, 10), Ok(Some(1)));
    }

    #[test]
    fn all_forbidden() {
        let hc = HardConstraint::new(vec![0, 1], [vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let w = WcspInstance::new("none", vec![2, 2], vec![hc], vec![], 10).unwrap();
        assert_eq!(brute_force_optimum(&w, 10), Ok(None));
    }

    #[test]
    fn limit_exceeded() {
        let w = WcspInstance::new("big", vec![4; 11], vec![], vec![], 10).unwrap();
        assert_eq!(
            brute_force_optimum(&w, 4u64.pow(10)),
            Err(EnumerationLimit {
                count: 4u64.pow(11),
                limit: 4u64.pow(10)
            })
        );
    }
}
