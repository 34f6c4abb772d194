//! Seeded generators for randomized campaigns.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::Chain;
use crate::complex::{build_complex, Complex};
use crate::exterior::binomial;
use crate::forms::{Cochain, FormField, PolyForm};
use crate::meshes;
use crate::poly::Poly;

pub type CampaignRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CampaignRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn jitter(rng: &mut CampaignRng, v: &mut [Vec<f64>], lo: f64, hi: f64, amount: f64) {
    for p in v.iter_mut() {
        let interior = p.iter().all(|&x| x > lo + 1e-12 && x < hi - 1e-12);
        if interior {
            for x in p.iter_mut() {
                *x += rng.gen_range(-amount..amount);
            }
        }
    }
}

/// A small perturbed structured mesh of the unit cube in dimension `dim`.
pub fn mesh(rng: &mut CampaignRng, dim: usize) -> Arc<Complex> {
    let mut s = BTreeMap::new();
    match dim {
        1 => {
            let n = rng.gen_range(2..8);
            let mut v: Vec<Vec<f64>> = (0..=n).map(|i| vec![i as f64 / n as f64]).collect();
            jitter(rng, &mut v, 0.0, 1.0, 0.3 / n as f64);
            s.insert(1, (0..n).map(|i| vec![i, i + 1]).collect());
            build_complex(1, &v, &s).expect("valid mesh")
        }
        2 => {
            let (nx, ny) = (rng.gen_range(2..5), rng.gen_range(2..5));
            let (mut v, t) = meshes::grid_data(nx, ny, [0.0, 0.0], [1.0, 1.0]);
            let h = 1.0 / nx.max(ny) as f64;
            jitter(rng, &mut v, 0.0, 1.0, 0.2 * h);
            s.insert(2, t);
            build_complex(2, &v, &s).expect("valid mesh")
        }
        _ => {
            let n = rng.gen_range(1..3);
            let (mut v, t) = meshes::cube_grid_data(n, 1.0);
            jitter(rng, &mut v, 0.0, 1.0, 0.08 / n as f64);
            s.insert(3, t);
            build_complex(3, &v, &s).expect("valid mesh")
        }
    }
}

/// Each k-simplex independently receives a coefficient in [−2, 2] with the
/// given probability.
pub fn chain(rng: &mut CampaignRng, complex: &Arc<Complex>, k: usize, density: f64) -> Chain {
    let coeffs: Vec<(usize, f64)> = (0..complex.count(k))
        .filter_map(|i| {
            if rng.gen_bool(density) {
                Some((i, rng.gen_range(-2.0..2.0)))
            } else {
                None
            }
        })
        .collect();
    Chain::new(complex, k, coeffs).expect("indices in range")
}
/// Cochain with every coefficient uniform in [−1, 1].
pub fn cochain(rng: &mut CampaignRng, complex: &Arc<Complex>, k: usize) -> Cochain {
    let coeffs = (0..complex.count(k)).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Cochain::new(complex, k, coeffs).expect("sizes match")
}

/// Differential form of degree `k` on ℝⁿ with affine coefficients in [−1, 1].
pub fn form(rng: &mut CampaignRng, n: usize, k: usize) -> FormField {
    let comps = (0..binomial(n, k))
        .map(|_| {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Poly::affine(&a, rng.gen_range(-1.0..1.0))
        })
        .collect();
    FormField::Global(PolyForm::from_components(n, k, comps))
}
