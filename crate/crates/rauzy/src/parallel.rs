//! Multi-threaded versions of the point-cloud generators. Work is split by
//! word prefix (or sample stream, or loop position) and the pieces are
//! concatenated in a fixed order, so the output is identical to the
//! single-threaded generators for any thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use rauzy_core::codec::{loop_edge, loop_len, BoundaryParam};
use rauzy_core::numeration::{count_admissible, AdmissibleSampler};
use rauzy_core::render::{
    admissible_prefixes, chunk_sizes, enumerate_points_with_prefix, sample_chunk, CloudMeta,
    Generator, PointCloud,
};
use rauzy_core::{Embedding, Error, Result};

/// Length of the prefixes handed to workers.
const PREFIX_LEN: usize = 6;

/// Same result as [`rauzy_core::render::points_of_r`].
pub fn points_of_r(e: &Embedding, depth: usize, cap: usize, seed: u64) -> Result<PointCloud> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1"));
    }
    let param = e.param();
    let meta = |generator| CloudMeta {
        a: param.a(),
        depth,
        generator,
    };
    if count_admissible(param, depth).is_some_and(|c| c <= cap as u128) {
        let prefixes = admissible_prefixes(param, PREFIX_LEN.min(depth));
        let pieces: Vec<Vec<Complex64>> = prefixes
            .par_iter()
            .map(|prefix| {
                let mut out = Vec::new();
                enumerate_points_with_prefix(e, depth, prefix, &mut out);
                out
            })
            .collect();
        return Ok(PointCloud {
            points: pieces.concat(),
            meta: meta(Generator::Full),
        });
    }
    let sampler = AdmissibleSampler::new(param, depth);
    let pieces: Vec<Vec<Complex64>> = chunk_sizes(cap)
        .into_par_iter()
        .enumerate()
        .map(|(chunk, size)| sample_chunk(e, &sampler, size, seed, chunk as u64))
        .collect();
    Ok(PointCloud {
        points: pieces.concat(),
        meta: meta(Generator::Sampled { samples: cap, seed }),
    })
}

/// Same result as [`rauzy_core::render::boundary_points`].
pub fn boundary_points(bp: &BoundaryParam, samples_per_side: usize, depth: usize) -> Result<PointCloud> {
    let points = (0..loop_len(samples_per_side))
        .into_par_iter()
        .map(|i| Ok(bp.square_edge(&loop_edge(samples_per_side, i), depth)?.point))
        .collect::<Result<Vec<_>>>()?;
    Ok(PointCloud {
        points,
        meta: CloudMeta {
            a: bp.param().a(),
            depth,
            generator: Generator::Boundary { samples_per_side },
        },
    })
}
