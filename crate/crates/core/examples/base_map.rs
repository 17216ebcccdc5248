//! Expansion, distortion and Gibbs constants of the base map, linear and
//! perturbed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use viana::base_map::{distortion_ratio, gibbs_band, gibbs_check, BaseMap, Itinerary};

fn main() -> viana::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (name, map) in [
        ("linear", BaseMap::uniform_linear(16)?),
        ("perturbed", BaseMap::perturbed_linear(16, 4e-3, 8.0)?),
    ] {
        let it = Itinerary::random(&mut rng, 16, 4);
        let cyl = map.cylinder(&it)?;
        let (lo, hi) = gibbs_band(&map);
        println!("{name}: d = {:.4}, K = {:.3e}", map.expansion(), map.renyi());
        println!("  cylinder {:?}: lo = {:.6}, len = {:.3e}", it.0, cyl.lo, cyl.len);
        println!("  distortion {:.6}", distortion_ratio(&map, &it, cyl.at(0.1), cyl.at(0.9))?);
        println!("  gibbs {:.6} in [{lo:.6}, {hi:.6}]", gibbs_check(&map, &it, cyl.midpoint())?);
    }
    Ok(())
}
