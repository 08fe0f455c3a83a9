//! Per-lap averaging of incumbent traces.

use super::config::Method;
use super::run::RunRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub lap: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub method: Method,
    pub kernels: usize,
    pub points: Vec<CurvePoint>,
}

impl Curve {
    pub fn name(&self) -> String {
        format!("{}_M{}", self.method.label(), self.kernels)
    }

    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean).collect()
    }

    pub fn final_mean(&self) -> f64 {
        self.points.last().map_or(f64::NAN, |p| p.mean)
    }
}

/// Mean, min and max per lap over equally long columns.
pub fn envelope(columns: &[Vec<f64>]) -> Result<Vec<CurvePoint>> {
    let Some(first) = columns.first() else {
        return Err(Error::Validation("nothing to aggregate".into()));
    };
    let n = first.len();
    if let Some(bad) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::Validation(format!(
            "trace lengths differ ({n} vs {})",
            bad.len()
        )));
    }
    let k = columns.len() as f64;
    Ok((0..n)
        .map(|i| {
            let mut sum = 0.0;
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for c in columns {
                sum += c[i];
                min = min.min(c[i]);
                max = max.max(c[i]);
            }
            CurvePoint {
                lap: i + 1,
                mean: sum / k,
                min,
                max,
            }
        })
        .collect())
}

/// Averaged best-reward curve of records sharing one method and policy size.
pub fn aggregate(records: &[RunRecord]) -> Result<Curve> {
    let Some(first) = records.first() else {
        return Err(Error::Validation("no records to aggregate".into()));
    };
    if records
        .iter()
        .any(|r| r.method != first.method || r.kernels != first.kernels)
    {
        return Err(Error::Validation(
            "records mix methods or kernel counts; use aggregate_all".into(),
        ));
    }
    let columns: Vec<Vec<f64>> = records.iter().map(RunRecord::incumbent_curve).collect();
    Ok(Curve {
        method: first.method,
        kernels: first.kernels,
        points: envelope(&columns)?,
    })
}

/// One curve per (method, kernels) group, in order of first appearance.
pub fn aggregate_all(records: &[RunRecord]) -> Result<Vec<Curve>> {
    let mut keys: Vec<(Method, usize)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.method, r.kernels)) {
            keys.push((r.method, r.kernels));
        }
    }
    keys.into_iter()
        .map(|(m, k)| {
            let group: Vec<RunRecord> = records
                .iter()
                .filter(|r| r.method == m && r.kernels == k)
                .cloned()
                .collect();
            aggregate(&group)
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::harness::run::RunRow;
    use crate::trace::Incumbent;

    pub(crate) fn record(method: Method, seed: u64, curve: &[f64]) -> RunRecord {
        RunRecord {
            method,
            kernels: 3,
            seed,
            rows: curve
                .iter()
                .enumerate()
                .map(|(i, &v)| RunRow {
                    lap: i + 1,
                    reward: v,
                    incumbent_reward: v,
                    af_evals: 0,
                    wall_ms: 1.0,
                    sim_ms: 0.5,
                })
                .collect(),
            incumbent: Incumbent {
                weights: vec![0.0; 3],
                reward: *curve.last().unwrap(),
            },
            runtime_seconds: seed as f64,
            sim_seconds: 0.0,
        }
    }

    #[test]
    fn single_record_is_its_curve() {
        let c = aggregate(&[record(Method::Cdbo, 0, &[1.0, 2.0, 2.0])]).unwrap();
        assert_eq!(c.means(), vec![1.0, 2.0, 2.0]);
        assert_eq!(c.points[2].min, 2.0);
        assert_eq!(c.name(), "cdbo_M3");
    }

    #[test]
    fn constant_records_average() {
        let c = aggregate(&[
            record(Method::Random, 0, &[10.0; 4]),
            record(Method::Random, 1, &[20.0; 4]),
        ])
        .unwrap();
        assert!(c.points.iter().all(|p| p.mean == 15.0 && p.min == 10.0 && p.max == 20.0));
    }

    #[test]
    fn mismatches_fail() {
        assert!(aggregate(&[]).is_err());
        assert!(matches!(
            aggregate(&[record(Method::Cdbo, 0, &[1.0]), record(Method::Cdbo, 1, &[1.0, 2.0])]),
            Err(Error::Validation(_))
        ));
        assert!(aggregate(&[record(Method::Cdbo, 0, &[1.0]), record(Method::Random, 1, &[1.0])]).is_err());
    }

    #[test]
    fn groups_in_order() {
        let curves = aggregate_all(&[
            record(Method::Random, 0, &[1.0]),
            record(Method::Cdbo, 0, &[3.0]),
            record(Method::Random, 1, &[2.0]),
        ])
        .unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[0].method, Method::Random);
        assert_eq!(curves[0].final_mean(), 1.5);
    }
}
