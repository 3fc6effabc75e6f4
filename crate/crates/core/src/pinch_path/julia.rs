//! Julia-set samples by random inverse iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{periodic_points, PointClass};
use crate::rational::RationalMap;
use crate::sphere::{chordal_distance, SpherePoint};

use super::PathError;

/// Backward-orbit steps discarded before recording.
pub const BURN_IN: usize = 50;

/// A finite fixed point on the Julia set to start backward orbits from: the
/// first repelling one, else the first parabolic one.
pub fn seed_point(map: &RationalMap) -> Result<SpherePoint, PathError> {
    let fixed = periodic_points(map, 1)?;
    let pick = |class: PointClass| {
        fixed
            .iter()
            .find(|p| p.class == class && p.location.to_finite().is_some())
            .map(|p| p.location)
    };
    pick(PointClass::Repelling)
        .or_else(|| pick(PointClass::Parabolic))
        .ok_or(PathError::NoRepellingSeedPoint)
}

/// `n` points of a random backward orbit, choosing one of the `d` inverse
/// branches uniformly at each step. Deterministic given `seed`.
pub fn julia_sample(map: &RationalMap, n: usize, seed: u64) -> Result<Vec<SpherePoint>, PathError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(map, n, &mut rng)
}

pub(crate) fn sample_with(map: &RationalMap, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<SpherePoint>, PathError> {
    let mut z = seed_point(map)?;
    let mut out = Vec::with_capacity(n);
    for step in 0..BURN_IN + n {
        let pre = map.preimages(&z)?;
        z = pre[rng.random_range(0..pre.len())];
        if step >= BURN_IN {
            out.push(z);
        }
    }
    Ok(out)
}

/// Backward orbits of `leader` and `follower` driven by one random stream:
/// the leader picks a branch at random and the follower takes its preimage
/// nearest to the leader's choice. For nearby maps this follows the
/// holomorphic motion of the Julia set, so the two clouds are matched point
/// by point instead of being independent samples.
pub fn coupled_samples(
    leader: &RationalMap,
    follower: &RationalMap,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<SpherePoint>, Vec<SpherePoint>), PathError> {
    let mut a = seed_point(leader)?;
    let mut b = seed_point(follower)?;
    let mut out_a = Vec::with_capacity(n);
    let mut out_b = Vec::with_capacity(n);
    for step in 0..BURN_IN + n {
        let pa = leader.preimages(&a)?;
        a = pa[rng.random_range(0..pa.len())];
        let pb = follower.preimages(&b)?;
        b = pb
            .iter()
            .copied()
            .min_by(|x, y| chordal_distance(x, &a).total_cmp(&chordal_distance(y, &a)))
            .expect("a map of positive degree has preimages");
        if step >= BURN_IN {
            out_a.push(a);
            out_b.push(b);
        }
    }
    Ok((out_a, out_b))
}
