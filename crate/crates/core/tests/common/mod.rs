//! Shared generators for randomized integration tests.

use bigmcg::surface::{Exhaustion, GluingOp, SurfaceSig};
use rand::rngs::StdRng;
use rand::Rng;

/// A random genus-one exhaustion: 1–3 base boundaries, 0–2 base punctures,
/// and up to `max_depth` random gluings onto random living boundaries.
/// Generation stops early if a disk caps the last boundary.
pub fn random_genus1_exhaustion(rng: &mut StdRng, max_depth: usize) -> Exhaustion {
    let boundary_count = rng.random_range(1..=3usize);
    let puncture_count = rng.random_range(0..=2usize);
    let base = SurfaceSig::new(
        1,
        (0..puncture_count).map(|i| format!("q{i}")),
        (0..boundary_count).map(|i| format!("e0{}", (b'a' + i as u8) as char)),
    )
    .expect("valid base");

    let mut living = base.boundaries.clone();
    let mut ops = Vec::new();
    for k in 1..=max_depth {
        if living.is_empty() {
            break;
        }
        let target = living[rng.random_range(0..living.len())].clone();
        let pos = living.iter().position(|b| b == &target).expect("present");
        let op = match rng.random_range(0..5u8) {
            0 => {
                living.remove(pos);
                GluingOp::disk(target, format!("p{k}"))
            }
            1 | 2 => {
                let fresh = format!("d{k}");
                living[pos] = fresh.clone();
                GluingOp::annulus(target, format!("p{k}"), fresh)
            }
            _ => {
                let (c0, c1) = (format!("d{k}a"), format!("d{k}b"));
                living.splice(pos..=pos, [c0.clone(), c1.clone()]);
                GluingOp::pants(target, c0, c1)
            }
        };
        ops.push(op);
    }
    Exhaustion { base, ops }
}

/// A genus-one exhaustion with one base boundary that consumes boundaries
/// round-robin (oldest first) with annuli and a few pants, so every living
/// boundary is re-glued within the returned width bound.
pub fn fair_exhaustion(rng: &mut StdRng, depth: usize) -> (Exhaustion, usize) {
    let base = SurfaceSig::new(1, Vec::<String>::new(), ["e0"]).expect("valid base");
    let mut queue = vec!["e0".to_string()];
    let mut ops = Vec::new();
    let mut max_width = 1usize;
    let mut pants_left = 3usize;
    for k in 1..=depth {
        let target = queue.remove(0);
        if pants_left > 0 && rng.random_range(0..6u8) == 0 {
            pants_left -= 1;
            let (c0, c1) = (format!("e{k}"), format!("f{k}"));
            queue.push(c0.clone());
            queue.push(c1.clone());
            ops.push(GluingOp::pants(target, c0, c1));
        } else {
            let fresh = format!("e{k}");
            queue.push(fresh.clone());
            ops.push(GluingOp::annulus(target, format!("p{k}"), fresh));
        }
        max_width = max_width.max(queue.len());
    }
    (Exhaustion { base, ops }, max_width)
}
