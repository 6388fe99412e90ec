#![allow(dead_code)]

use std::sync::Arc;

use covlab_core::jets::Field;
use covlab_core::parametrize::{Configuration, CovarianceField, FiberMetric};
use covlab_core::scenarios::{
    em_plane_wave, kg_plane_wave, pull_back_solution, random_fiber_metric, random_matter,
    random_near_identity, random_null_wave, random_point,
};
use covlab_core::theories::{theory_by_name, FieldTheory, TheoryParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 4;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn em() -> Arc<dyn FieldTheory> {
    theory_by_name("em", &TheoryParams::default()).unwrap()
}

pub fn kg(mass: f64) -> Arc<dyn FieldTheory> {
    theory_by_name("kg_vector", &TheoryParams { mass: Some(mass) }).unwrap()
}

pub fn point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    random_point(rng, &vec![-1.0; n], &vec![1.0; n])
}

pub fn off_shell(rng: &mut ChaCha8Rng, theory: Arc<dyn FieldTheory>, n: usize) -> Configuration {
    let eta = CovarianceField::new(random_near_identity(rng, n, 0.1).into_arc());
    let fiber = random_fiber_metric(rng, n, 0.1);
    let matter = random_matter(rng, n).into_arc();
    Configuration::new(theory, matter, eta, fiber).unwrap()
}

pub const KG_K: [f64; 4] = [0.5, 1.0, 0.5, 0.0];
pub const KG_EPS: [f64; 4] = [1.0, 0.3, -0.2, 0.5];

pub fn on_shell(rng: &mut ChaCha8Rng, theory: Arc<dyn FieldTheory>, n: usize) -> Configuration {
    let eta = CovarianceField::new(random_near_identity(rng, n, 0.1).into_arc());
    let flat: Arc<dyn Field> = match theory.mass() {
        None => {
            let (k, eps) = random_null_wave(rng, n);
            em_plane_wave(&k, &eps, 1.0).unwrap().into_arc()
        }
        Some(m) => kg_plane_wave(&KG_K, &KG_EPS, 1.0, m).unwrap().into_arc(),
    };
    let matter = pull_back_solution(flat, &eta, theory.rank());
    Configuration::new(theory, matter, eta, FiberMetric::minkowski(n)).unwrap()
}
