use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::dataset::DatasetId;
use crate::error::{Error, Result};
use crate::perturb::is_registered;
use crate::stats::records::{Metric, ScoreRecord};

/// Noise strengths in column order; also the expansion order of `x`.
pub const STRENGTHS: [&str; 4] = ["0", "0.1", "0.15", "0.2"];
/// Rotation tokens in expansion order.
pub const ANGLES: [&str; 5] = ["RO0", "RR30", "RR60", "RL30", "RL60"];

pub const ORIGINAL_LABEL: &str = "Original-QS";

/// A table column: the conditions averaged per image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub label: String,
    pub conditions: Vec<String>,
}

impl GroupSpec {
    pub fn new(label: impl Into<String>, conditions: Vec<String>) -> Result<Self> {
        let label = label.into();
        if conditions.is_empty() {
            return Err(Error::Argument(format!("group {label} has no conditions")));
        }
        if let Some(c) = conditions.iter().find(|c| !is_registered(c)) {
            return Err(Error::Argument(format!(
                "group {label}: `{c}` is not a registered condition"
            )));
        }
        Ok(Self { label, conditions })
    }

    fn expand(label: String, candidates: impl Iterator<Item = String>) -> Self {
        let conditions = candidates.filter(|c| is_registered(c)).collect();
        Self::new(label, conditions).expect("builtin groups are non-empty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableFamily {
    SpGa,
    SpRot,
}

impl TableFamily {
    pub const ALL: [TableFamily; 2] = [TableFamily::SpGa, TableFamily::SpRot];

    /// File-name stem component.
    pub fn slug(self) -> &'static str {
        match self {
            TableFamily::SpGa => "sp_ga",
            TableFamily::SpRot => "sp_rot",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            TableFamily::SpGa => "SP+GA",
            TableFamily::SpRot => "SP+Rotation",
        }
    }
}

impl fmt::Display for TableFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// One results table: its identity and its columns in order.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    pub dataset: DatasetId,
    pub metric: Metric,
    pub family: TableFamily,
    pub groups: Vec<GroupSpec>,
}

impl TableSpec {
    pub fn stem(&self) -> String {
        format!("{}_{}_{}", self.dataset, self.metric, self.family)
    }

    pub fn title(&self) -> String {
        format!(
            "{} scores with {} corruptions on {}",
            self.metric.display_name(),
            self.family.title(),
            self.dataset.display_name()
        )
    }
}

/// The SP+GA and SP+Rotation tables for one dataset and metric. `x` expands
/// over every registered strength or angle, zero included. The clean column
/// exists only for BRISQUE since PSNR is undefined on clean pairs.
pub fn builtin_group_specs(dataset: DatasetId, metric: Metric) -> Vec<TableSpec> {
    TableFamily::ALL
        .into_iter()
        .map(|family| {
            let mut groups = Vec::new();
            if metric == Metric::Brisque {
                groups.push(GroupSpec::new(ORIGINAL_LABEL, vec!["clean".into()]).unwrap());
            }
            for s in STRENGTHS {
                groups.push(match family {
                    TableFamily::SpGa => {
                        GroupSpec::expand(format!("Avg-SP{s}GAx"), STRENGTHS.iter().map(|g| format!("SP{s}GA{g}")))
                    }
                    TableFamily::SpRot => {
                        GroupSpec::expand(format!("Avg-SP{s}ROx"), ANGLES.iter().map(|a| format!("SP{s}{a}")))
                    }
                });
            }
            for s in STRENGTHS {
                groups.push(match family {
                    TableFamily::SpGa => {
                        GroupSpec::expand(format!("Avg-GAxSP{s}"), STRENGTHS.iter().map(|g| format!("GA{g}SP{s}")))
                    }
                    TableFamily::SpRot => {
                        GroupSpec::expand(format!("Avg-ROxSP{s}"), ANGLES.iter().map(|a| format!("{a}SP{s}")))
                    }
                });
            }
            TableSpec {
                dataset,
                metric,
                family,
                groups,
            }
        })
        .collect()
}

/// Per-image group means.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAverage {
    pub label: String,
    pub image_ids: Vec<u64>,
    pub values: Vec<f64>,
    /// NA scores skipped while averaging.
    pub na_excluded: usize,
}

/// Score lookup for one dataset and metric.
#[derive(Debug, Clone)]
pub struct ScoreIndex {
    images: Vec<u64>,
    scores: HashMap<(u64, String), Option<f64>>,
}

impl ScoreIndex {
    /// Images keep their first-appearance order.
    pub fn new(records: &[ScoreRecord]) -> Result<Self> {
        let mut images = Vec::new();
        let mut scores = HashMap::with_capacity(records.len());
        let mut seen = HashSet::new();
        if let Some(first) = records.first() {
            if let Some(r) = records
                .iter()
                .find(|r| r.dataset != first.dataset || r.metric != first.metric)
            {
                return Err(Error::Argument(format!(
                    "records mix {}/{} with {}/{}",
                    first.dataset, first.metric, r.dataset, r.metric
                )));
            }
        }
        for r in records {
            if seen.insert(r.image_id) {
                images.push(r.image_id);
            }
            if scores.insert((r.image_id, r.condition.clone()), r.score).is_some() {
                return Err(Error::Format(format!(
                    "duplicate score for image {} under {}",
                    r.image_id, r.condition
                )));
            }
        }
        Ok(Self { images, scores })
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    /// Images whose scores are all NA for the group are left out.
    pub fn average(&self, g: &GroupSpec) -> Result<GroupAverage> {
        let mut missing = Vec::new();
        let mut out = GroupAverage {
            label: g.label.clone(),
            image_ids: Vec::new(),
            values: Vec::new(),
            na_excluded: 0,
        };
        for &id in &self.images {
            let (mut sum, mut n) = (0.0, 0usize);
            for c in &g.conditions {
                match self.scores.get(&(id, c.clone())) {
                    None => missing.push(format!("({id}, {c})")),
                    Some(None) => out.na_excluded += 1,
                    Some(Some(v)) => {
                        sum += v;
                        n += 1;
                    }
                }
            }
            if n > 0 {
                out.image_ids.push(id);
                out.values.push(sum / n as f64);
            }
        }
        if !missing.is_empty() {
            return Err(Error::IncompleteGroup {
                label: g.label.clone(),
                missing: missing.len(),
                first: missing[0].clone(),
            });
        }
        Ok(out)
    }
}

pub fn group_average(records: &[ScoreRecord], g: &GroupSpec) -> Result<GroupAverage> {
    ScoreIndex::new(records)?.average(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: u64, cond: &str, score: Option<f64>) -> ScoreRecord {
        ScoreRecord {
            dataset: DatasetId::Mnist,
            image_id: id,
            condition: cond.into(),
            metric: Metric::Psnr,
            score,
        }
    }

    fn find<'a>(tables: &'a [TableSpec], label: &str) -> &'a GroupSpec {
        tables
            .iter()
            .flat_map(|t| &t.groups)
            .find(|g| g.label == label)
            .unwrap()
    }

    #[test]
    fn builtin_expansions() {
        let t = builtin_group_specs(DatasetId::Cifar10, Metric::Brisque);
        assert_eq!(find(&t, "Avg-SP0GAx").conditions, ["SP0GA0.1", "SP0GA0.15", "SP0GA0.2"]);
        assert_eq!(
            find(&t, "Avg-SP0.1GAx").conditions,
            ["SP0.1GA0", "SP0.1GA0.1", "SP0.1GA0.15", "SP0.1GA0.2"]
        );
        assert_eq!(
            find(&t, "Avg-SP0.1ROx").conditions,
            ["SP0.1RO0", "SP0.1RR30", "SP0.1RR60", "SP0.1RL30", "SP0.1RL60"]
        );
        assert_eq!(
            find(&t, "Avg-ROxSP0.1").conditions,
            ["RO0SP0.1", "RR30SP0.1", "RR60SP0.1", "RL30SP0.1", "RL60SP0.1"]
        );
        assert_eq!(
            find(&t, "Avg-SP0ROx").conditions,
            ["SP0RR30", "SP0RR60", "SP0RL30", "SP0RL60"]
        );
        assert_eq!(
            find(&t, "Avg-ROxSP0").conditions,
            ["RR30SP0", "RR60SP0", "RL30SP0", "RL60SP0"]
        );
    }

    #[test]
    fn table_headers() {
        let b = builtin_group_specs(DatasetId::Cifar10, Metric::Brisque);
        assert_eq!(b.len(), 2);
        let labels: Vec<&str> = b[0].groups.iter().map(|g| g.label.as_str()).collect();
        assert_eq!(
            labels,
            [
                "Original-QS",
                "Avg-SP0GAx",
                "Avg-SP0.1GAx",
                "Avg-SP0.15GAx",
                "Avg-SP0.2GAx",
                "Avg-GAxSP0",
                "Avg-GAxSP0.1",
                "Avg-GAxSP0.15",
                "Avg-GAxSP0.2"
            ]
        );
        assert_eq!(b[0].stem(), "cifar10_brisque_sp_ga");
        let p = builtin_group_specs(DatasetId::Mnist, Metric::Psnr);
        assert!(p
            .iter()
            .all(|t| t.groups.len() == 8 && t.groups[0].label != ORIGINAL_LABEL));
    }

    #[test]
    fn every_registered_condition_is_used() {
        let mut used = std::collections::HashSet::new();
        for t in builtin_group_specs(DatasetId::Mnist, Metric::Brisque) {
            for g in t.groups {
                used.extend(g.conditions);
            }
        }
        assert_eq!(used.len(), 69);
    }

    #[test]
    fn averaging() {
        let g1 = GroupSpec::new("one", vec!["SP0GA0.1".into()]).unwrap();
        let g2 = GroupSpec::new("two", vec!["SP0GA0.1".into(), "SP0GA0.2".into()]).unwrap();
        let recs = vec![
            rec(3, "SP0GA0.1", Some(10.0)),
            rec(3, "SP0GA0.2", Some(20.0)),
            rec(1, "SP0GA0.1", Some(7.0)),
            rec(1, "SP0GA0.2", Some(9.0)),
        ];
        let a = group_average(&recs, &g1).unwrap();
        assert_eq!((a.image_ids, a.values), (vec![3, 1], vec![10.0, 7.0]));
        assert_eq!(group_average(&recs, &g2).unwrap().values, [15.0, 8.0]);
    }

    #[test]
    fn na_and_missing() {
        let g = GroupSpec::new("g", vec!["clean".into(), "SP0GA0.1".into()]).unwrap();
        let recs = vec![
            rec(1, "clean", None),
            rec(1, "SP0GA0.1", Some(12.0)),
            rec(2, "clean", None),
        ];
        let err = group_average(&recs, &g).unwrap_err();
        assert!(matches!(err, Error::IncompleteGroup { missing: 1, .. }), "{err}");

        let recs = vec![rec(1, "clean", None), rec(1, "SP0GA0.1", Some(12.0))];
        let a = group_average(&recs, &g).unwrap();
        assert_eq!((a.values, a.na_excluded), (vec![12.0], 1));

        let only_clean = GroupSpec::new("c", vec!["clean".into()]).unwrap();
        let a = group_average(&recs, &only_clean).unwrap();
        assert!(a.values.is_empty());
    }

    #[test]
    fn rejects_unknown_conditions_and_mixed_records() {
        assert!(GroupSpec::new("g", vec![]).is_err());
        assert!(GroupSpec::new("g", vec!["SP0.3".into()]).is_err());
        let mut r = rec(1, "clean", None);
        r.metric = Metric::Brisque;
        assert!(ScoreIndex::new(&[rec(1, "clean", None), r]).is_err());
        assert!(ScoreIndex::new(&[rec(1, "clean", None), rec(1, "clean", None)]).is_err());
    }
}
