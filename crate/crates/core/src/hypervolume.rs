//! Exact hypervolume of a set of minimization vectors.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HypervolumeError {
    #[error("point {index} has {got} coordinates, reference has {expected}")]
    Dimension {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("point {index} does not dominate the reference point")]
    OutsideReference { index: usize },
    #[error("reference point must be finite")]
    Reference,
}

/// Lebesgue measure of the region dominated by `points` and bounded by
/// `reference`, by recursive slicing along the last objective.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> Result<f64, HypervolumeError> {
    if reference.iter().any(|r| !r.is_finite()) {
        return Err(HypervolumeError::Reference);
    }
    for (index, p) in points.iter().enumerate() {
        if p.len() != reference.len() {
            return Err(HypervolumeError::Dimension {
                index,
                got: p.len(),
                expected: reference.len(),
            });
        }
        if p.iter().zip(reference).any(|(x, r)| !(x <= r)) {
            return Err(HypervolumeError::OutsideReference { index });
        }
    }
    if reference.is_empty() || points.is_empty() {
        return Ok(0.0);
    }
    let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
    Ok(slice_volume(refs, reference))
}

fn slice_volume(mut pts: Vec<&[f64]>, reference: &[f64]) -> f64 {
    let m = reference.len();
    if pts.is_empty() {
        return 0.0;
    }
    match m {
        1 => reference[0] - pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => {
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            let mut area = 0.0;
            let mut y_best = reference[1];
            for p in pts {
                if p[1] < y_best {
                    area += (reference[0] - p[0]) * (y_best - p[1]);
                    y_best = p[1];
                }
            }
            area
        }
        _ => {
            pts.sort_by(|a, b| a[m - 1].total_cmp(&b[m - 1]));
            let sub_ref = &reference[..m - 1];
            let mut total = 0.0;
            for i in 0..pts.len() {
                let top = pts.get(i + 1).map_or(reference[m - 1], |p| p[m - 1]);
                let depth = top - pts[i][m - 1];
                if depth > 0.0 {
                    let layer: Vec<&[f64]> = pts[..=i].iter().map(|p| &p[..m - 1]).collect();
                    total += depth * slice_volume(layer, sub_ref);
                }
            }
            total
        }
    }
}

/// Maps every set into the unit box spanned by the ideal and nadir points of
/// their union. Objectives that are constant across the union map to 0.
pub fn normalize_jointly(sets: &[Vec<Vec<f64>>]) -> Vec<Vec<Vec<f64>>> {
    let m = sets.iter().flatten().next().map_or(0, Vec::len);
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for p in sets.iter().flatten() {
        for k in 0..m {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    sets.iter()
        .map(|set| {
            set.iter()
                .map(|p| {
                    (0..m)
                        .map(|k| {
                            let span = hi[k] - lo[k];
                            if span > 0.0 {
                                (p[k] - lo[k]) / span
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Hypervolume of each set after joint normalization, with the reference
/// at 1.1 times the normalized nadir.
pub fn normalized_hypervolumes(sets: &[Vec<Vec<f64>>]) -> Vec<f64> {
    let normalized = normalize_jointly(sets);
    let m = sets.iter().flatten().next().map_or(0, Vec::len);
    let reference = vec![1.1; m];
    normalized
        .iter()
        .map(|s| hypervolume(s, &reference).expect("normalized points lie inside the box"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_box() {
        assert_eq!(hypervolume(&[vec![0.0, 0.0]], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(hypervolume(&[vec![0.0, 0.0, 0.0]], &[1.0, 2.0, 3.0]).unwrap(), 6.0);
    }

    #[test]
    fn two_point_example() {
        let v = hypervolume(&[vec![0.5, 0.5], vec![0.25, 0.75]], &[1.0, 1.0]).unwrap();
        assert!((v - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn dominated_point_is_ignored() {
        let base = vec![vec![0.2, 0.6, 0.3], vec![0.5, 0.1, 0.7], vec![0.7, 0.5, 0.1]];
        let r = [1.0, 1.0, 1.0];
        let v = hypervolume(&base, &r).unwrap();
        let mut more = base.clone();
        more.push(vec![0.8, 0.9, 0.9]);
        more.push(base[0].clone());
        assert!((hypervolume(&more, &r).unwrap() - v).abs() < 1e-15);
    }

    #[test]
    fn three_d_inclusion_exclusion() {
        // boxes [a,1]^3: 0.5^3 + 0.5^3 - overlap, overlap = 0.5*0.5*0.5 box
        // between (0.5,0.5,0.5) and 1
        let pts = vec![vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.5]];
        let v = hypervolume(&pts, &[1.0, 1.0, 1.0]).unwrap();
        assert!((v - (0.25 + 0.25 - 0.125)).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert_eq!(
            hypervolume(&[vec![1.5, 0.0]], &[1.0, 1.0]),
            Err(HypervolumeError::OutsideReference { index: 0 })
        );
        assert!(matches!(
            hypervolume(&[vec![0.0]], &[1.0, 1.0]),
            Err(HypervolumeError::Dimension { .. })
        ));
        assert_eq!(hypervolume(&[], &[f64::INFINITY]), Err(HypervolumeError::Reference));
        assert_eq!(hypervolume(&[], &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn normalization_puts_union_in_unit_box() {
        let a = vec![vec![10.0, -5.0], vec![20.0, -7.0]];
        let b = vec![vec![15.0, -6.0]];
        let n = normalize_jointly(&[a, b]);
        assert_eq!(n[0], vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(n[1], vec![vec![0.5, 0.5]]);
        let hv = normalized_hypervolumes(&[vec![vec![1.0, 1.0]], vec![vec![1.0, 1.0]]]);
        assert!((hv[0] - 1.21).abs() < 1e-12);
    }

    /// Monte Carlo-free oracle: count grid cells on a coarse integer lattice.
    fn lattice_volume(pts: &[Vec<f64>], r: f64) -> f64 {
        let steps = r as usize;
        let mut count = 0usize;
        for x in 0..steps {
            for y in 0..steps {
                for z in 0..steps {
                    let c = [x as f64 + 0.5, y as f64 + 0.5, z as f64 + 0.5];
                    if pts.iter().any(|p| p.iter().zip(&c).all(|(a, b)| a <= b)) {
                        count += 1;
                    }
                }
            }
        }
        count as f64
    }

    proptest! {
        #[test]
        fn matches_lattice_count(pts in prop::collection::vec((0u8..8, 0u8..8, 0u8..8), 1..12)) {
            let pts: Vec<Vec<f64>> = pts.iter().map(|&(a, b, c)| vec![a as f64, b as f64, c as f64]).collect();
            let v = hypervolume(&pts, &[8.0, 8.0, 8.0]).unwrap();
            prop_assert_eq!(v, lattice_volume(&pts, 8.0));
        }
    }
}
