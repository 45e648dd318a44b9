use serde::Serialize;

use super::{check_minimal, MinimalPerturbation};
use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Snapshots `fields[0] = f, ..., fields[k] = f2` where consecutive fields
/// differ by the perturbation `steps[i]`.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbationSequence {
    #[serde(skip)]
    pub fields: Vec<ScalarField>,
    pub steps: Vec<MinimalPerturbation>,
}

impl PerturbationSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> &ScalarField {
        self.fields.last().expect("sequence holds at least the start field")
    }
}

/// Splits `f -> f2` into minimal perturbations. Vertices moving up go first,
/// highest target first, then vertices moving down, lowest target first.
/// Every crossing becomes its own step, landing halfway to the next value on
/// the way, so pairs whose order agrees never swap and the others swap once.
pub fn decompose_perturbation(f: &ScalarField, f2: &ScalarField) -> Result<PerturbationSequence> {
    if !f.same_domain(f2) {
        return Err(Error::DomainMismatch);
    }
    let target = f2.values();
    let mut cur = f.values().to_vec();
    let n = cur.len();
    let mut up: Vec<usize> = (0..n).filter(|&v| target[v] > cur[v]).collect();
    let mut down: Vec<usize> = (0..n).filter(|&v| target[v] < cur[v]).collect();
    up.sort_by(|&a, &b| target[b].total_cmp(&target[a]));
    down.sort_by(|&a, &b| target[a].total_cmp(&target[b]));

    let mut seq = PerturbationSequence {
        fields: vec![f.clone()],
        steps: Vec::new(),
    };
    for v in up.into_iter().chain(down) {
        let (from, to) = (cur[v], target[v]);
        if let Some(u) = (0..n).find(|&u| u != v && cur[u] == to) {
            return Err(Error::IntermediateTie(v, u));
        }
        let (lo, hi) = if from < to { (from, to) } else { (to, from) };
        let mut crossed: Vec<f64> = (0..n)
            .filter(|&u| u != v && cur[u] > lo && cur[u] < hi)
            .map(|u| cur[u])
            .collect();
        crossed.sort_by(f64::total_cmp);
        if to < from {
            crossed.reverse();
        }
        let mut stops: Vec<f64> = crossed
            .iter()
            .enumerate()
            .map(|(i, &c)| (c + crossed.get(i + 1).copied().unwrap_or(to)) / 2.0)
            .collect();
        stops.push(to);
        for s in stops {
            let prev = seq.last();
            let next = prev.apply_value_change(v, s)?;
            let step = check_minimal(prev, &next)?.expect("value changed");
            cur[v] = s;
            seq.steps.push(step);
            seq.fields.push(next);
        }
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_empty() {
        let f = ScalarField::on_path(vec![0.0, 2.0, 1.0]).unwrap();
        let s = decompose_perturbation(&f, &f).unwrap();
        assert_eq!(s.fields.len(), 1);
        assert!(s.is_empty());
    }

    #[test]
    fn rank_exchange_has_one_transposition() {
        let f = ScalarField::on_path(vec![0.0, 2.0, 1.0]).unwrap();
        let g = f.with_values(vec![0.0, 1.2, 1.8]).unwrap();
        let s = decompose_perturbation(&f, &g).unwrap();
        let swaps = s.steps.iter().filter(|p| p.swap_partner.is_some()).count();
        assert_eq!(swaps, 1);
        assert_eq!(s.last().values(), g.values());
    }

    #[test]
    fn tie_with_unmoved_vertex() {
        let f = ScalarField::on_path(vec![0.0, 1.0, 2.0]).unwrap();
        let g = f.with_values(vec![0.0, 3.0, 1.5]).unwrap();
        // vertex 1 moves up first and is fine; vertex 2 then lands on 1.5
        assert!(decompose_perturbation(&f, &g).is_ok());
        let g = f.with_values(vec![0.0, 2.5, 3.0]).unwrap();
        // vertex 2 goes first to 3.0, then vertex 1 to 2.5
        assert!(decompose_perturbation(&f, &g).is_ok());
        let g = f.with_values(vec![2.0, 1.0, 3.0]).unwrap();
        // vertex 2 moves to 3.0, then vertex 0 lands on 2.0, which is free now
        assert!(decompose_perturbation(&f, &g).is_ok());
        let g = f.with_values(vec![0.0, 2.0, 1.0]).unwrap();
        // vertex 1 would land on vertex 2's current value
        assert!(matches!(
            decompose_perturbation(&f, &g),
            Err(Error::IntermediateTie(1, 2))
        ));
    }
}
