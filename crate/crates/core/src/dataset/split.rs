use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Dataset, DatasetError, LabeledGraph, Split};
use crate::generator::shuffle;

/// Partitions `records` into train/valid/test by a seeded shuffle.
///
/// The train and valid sizes are `round(len · fraction)`; test takes the rest.
/// Every fraction must be positive and they must sum to 1. Records keep their
/// relative input order inside each split.
pub fn split_dataset(
    records: Vec<LabeledGraph>,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<(Dataset, Dataset, Dataset), DatasetError> {
    let (ft, fv, fs) = fractions;
    if !(ft > 0.0 && fv > 0.0 && fs > 0.0) {
        return Err(DatasetError::InvalidFractions(format!("{fractions:?}: every split needs a positive share")));
    }
    if ((ft + fv + fs) - 1.0).abs() > 1e-9 {
        return Err(DatasetError::InvalidFractions(format!("{fractions:?} does not sum to 1")));
    }
    let order = records.first().ok_or(DatasetError::Empty)?.graph.order();
    let n = records.len();
    let n_train = (n as f64 * ft).round() as usize;
    let n_valid = ((n as f64 * fv).round() as usize).min(n - n_train);

    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffle(&mut idx, &mut rng);
    let mut role = vec![Split::Test; n];
    for &i in &idx[..n_train] {
        role[i] = Split::Train;
    }
    for &i in &idx[n_train..n_train + n_valid] {
        role[i] = Split::Valid;
    }

    let mut parts = (Vec::new(), Vec::new(), Vec::new());
    for (r, split) in records.into_iter().zip(role) {
        match split {
            Split::Train => parts.0.push(r),
            Split::Valid => parts.1.push(r),
            Split::Test => parts.2.push(r),
        }
    }
    Ok((
        Dataset::new(Split::Train, order, seed, parts.0)?,
        Dataset::new(Split::Valid, order, seed, parts.1)?,
        Dataset::new(Split::Test, order, seed, parts.2)?,
    ))
}
