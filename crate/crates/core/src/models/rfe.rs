use super::linear::{LinearModel, LinearParams};
use super::check_rows;
use crate::error::Result;

/// Recursive feature elimination. Returns one rank per column, 1 being the
/// last column standing. Each round refits on the surviving columns and drops
/// the one with the smallest absolute standardized weight; among equal
/// weights the higher column index goes first.
pub fn rfe_rank(rows: &[Vec<f64>], y: &[bool], params: &LinearParams) -> Result<Vec<usize>> {
    let d = check_rows(rows)?;
    let mut active: Vec<usize> = (0..d).collect();
    let mut eliminated = Vec::with_capacity(d);
    while active.len() > 1 {
        let sub: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| active.iter().map(|&c| r[c]).collect())
            .collect();
        let m = LinearModel::fit(&sub, y, params)?;
        let mut worst = 0;
        for (i, w) in m.weights.iter().enumerate() {
            if w.abs() <= m.weights[worst].abs() {
                worst = i;
            }
        }
        eliminated.push(active.remove(worst));
    }
    if d == 1 {
        LinearModel::fit(rows, y, params)?;
    }
    eliminated.extend(active);
    let mut rank = vec![0; d];
    for (pos, &c) in eliminated.iter().rev().enumerate() {
        rank[c] = pos + 1;
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn single_feature() {
        let rows = vec![vec![0.0], vec![1.0]];
        assert_eq!(rfe_rank(&rows, &[false, true], &LinearParams::default()).unwrap(), vec![1]);
    }

    #[test]
    fn copied_label_ranks_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let y: Vec<bool> = (0..60).map(|i| i % 2 == 0).collect();
        let rows: Vec<Vec<f64>> = y
            .iter()
            .map(|&l| {
                let mut r = vec![f64::from(u8::from(l))];
                r.extend((0..4).map(|_| rng.random::<f64>()));
                r
            })
            .collect();
        let rank = rfe_rank(&rows, &y, &LinearParams::default()).unwrap();
        assert_eq!(rank[0], 1);
        let mut sorted = rank.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 2, 3, 4, 5]);
    }
}
