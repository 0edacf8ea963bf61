use crate::formulations::{dominates, offspring_feasible, Formulation, Individual};
use crate::instance::Instance;

/// The GSEMO archive: mutually incomparable individuals, at most one per `f2`.
#[derive(Debug, Clone, Default)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    pub fn new(seed: Individual) -> Self {
        Self { members: vec![seed] }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &Individual {
        &self.members[i]
    }

    /// Adds `y` unless some member strictly dominates it; on acceptance every
    /// member weakly dominated by `y` is dropped. Returns whether `y` was kept.
    pub fn offer(&mut self, y: Individual) -> bool {
        if self
            .members
            .iter()
            .any(|z| dominates(&z.value, &y.value).strict)
        {
            return false;
        }
        self.members.retain(|z| !dominates(&y.value, &z.value).weak);
        // keep members ordered by f2 for stable extraction and iteration order
        let at = self.members.partition_point(|z| z.value.f2 < y.value.f2);
        self.members.insert(at, y);
        true
    }

    /// Verifies mutual incomparability, distinct `f2` keys and offspring
    /// feasibility of every member.
    pub fn check_invariants(&self, form: Formulation, inst: &Instance) -> Result<(), String> {
        for (i, a) in self.members.iter().enumerate() {
            if !offspring_feasible(form, &a.subset, inst) {
                return Err(format!("member {:?} is infeasible", a.subset));
            }
            if a.value.f2 != form.f2(a.subset.len()) {
                return Err(format!("member {:?} has a stale f2", a.subset));
            }
            for b in &self.members[i + 1..] {
                if a.value.f2 == b.value.f2 {
                    return Err(format!("two members share f2 = {}", a.value.f2));
                }
                if !dominates(&a.value, &b.value).incomparable {
                    return Err(format!("{:?} and {:?} are comparable", a.subset, b.subset));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::BiObjectiveValue;
    use crate::objectives::Score;
    use crate::subset::Subset;

    fn ind(items: &[usize], f1: f64, f2: i64) -> Individual {
        Individual {
            subset: Subset::from_items(8, items.iter().copied()).unwrap(),
            value: BiObjectiveValue::new(f1, f2),
            perm: None,
        }
    }

    #[test]
    fn update_rule() {
        let mut p = Population::new(ind(&[], 0.0, 0));
        assert!(p.offer(ind(&[1], 1.0, -1)));
        assert_eq!(p.len(), 2);
        // dominated by {1}
        assert!(!p.offer(ind(&[2], 0.5, -1)));
        // weakly equal twin replaces the old one
        assert!(p.offer(ind(&[3], 1.0, -1)));
        assert_eq!(p.len(), 2);
        assert_eq!(p.get(0).subset.to_vec(), vec![3]);
        // dominates everything
        assert!(p.offer(ind(&[], 5.0, 0)));
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn infinite_f1_members() {
        let mut p = Population::new(Individual {
            subset: Subset::empty(8),
            value: BiObjectiveValue { f1: Score::Infinite, f2: 0 },
            perm: None,
        });
        let single = Individual {
            subset: Subset::from_items(8, [4]).unwrap(),
            value: BiObjectiveValue { f1: Score::Infinite, f2: 1 },
            perm: None,
        };
        assert!(p.offer(single));
        assert_eq!(p.len(), 1);
        assert!(!p.offer(ind(&[], 0.0, 0)));
        assert!(p.offer(ind(&[1, 2], 1.0, 2)));
        assert_eq!(p.len(), 2);
    }
}
