//! A small corpus of integrands exercised by property tests and the
//! acceptance battery: smooth periodic, compactly supported with corners,
//! infinitely smooth with flat tails, and products thereof. All of them
//! have vanishing tail averages, so every convergence diagnostic in the
//! crate is applicable.

use crate::dirichlet::GridParams;
use crate::function::FunctionSpec;
use rand::Rng;
use std::f64::consts::PI;

pub const SOURCES: [&str; 8] = [
    "sin(t)",
    "cos(2*t)",
    "sin(t) + 0.5*cos(3*t)",
    "piecewise([-1,1]: 1 - t^2; else: 0)",
    "bump(2, 5) + bump(-5, -2)",
    "exp(-t^2/50)",
    "sin(3*t)*exp(-t^2/50)",
    "piecewise([0, 2]: t*(2 - t); else: 0)",
];

/// Parse the corpus, attaching period or support hints where they are
/// exact.
pub fn corpus() -> Vec<FunctionSpec> {
    SOURCES
        .iter()
        .map(|src| {
            let f = FunctionSpec::parse(src).unwrap();
            match *src {
                "sin(t)" | "sin(t) + 0.5*cos(3*t)" => f.with_period(2.0 * PI).unwrap(),
                "cos(2*t)" => f.with_period(PI).unwrap(),
                "piecewise([-1,1]: 1 - t^2; else: 0)" => f.with_support(-1.0, 1.0).unwrap(),
                "bump(2, 5) + bump(-5, -2)" => f.with_support(-5.0, 5.0).unwrap(),
                "piecewise([0, 2]: t*(2 - t); else: 0)" => f.with_support(0.0, 2.0).unwrap(),
                _ => f,
            }
        })
        .collect()
}

pub fn draw_function<R: Rng>(rng: &mut R) -> FunctionSpec {
    let all = corpus();
    let i = rng.gen_range(0..all.len());
    all.into_iter().nth(i).unwrap()
}

/// Grid sized so both summation routes stay affordable.
pub fn draw_route_grid<R: Rng>(rng: &mut R) -> GridParams {
    let l = rng.gen_range(5.0..=30.0);
    let n = rng.gen_range(4u32..=60);
    GridParams::new(l, n).unwrap()
}

/// Grid satisfying `eta < 1 < l`, as the tail decomposition requires.
pub fn draw_tail_split_grid<R: Rng>(rng: &mut R) -> GridParams {
    let l: f64 = rng.gen_range(2.0..=10.0);
    let n_min = l.ceil() as u32 + 1;
    let n = rng.gen_range(n_min..=n_min + 40);
    GridParams::new(l, n).unwrap()
}

/// Evaluation point away from the window edges.
pub fn draw_x<R: Rng>(rng: &mut R, l: f64) -> f64 {
    rng.gen_range(-0.5 * l..=0.5 * l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn corpus_parses_with_hints() {
        let all = corpus();
        assert_eq!(all.len(), SOURCES.len());
        assert_eq!(all[0].period_hint, Some(2.0 * PI));
        assert_eq!(all[1].period_hint, Some(PI));
        assert_eq!(all[3].support_hint, Some((-1.0, 1.0)));
        assert_eq!(all[4].support_hint, Some((-5.0, 5.0)));
        assert!(all[5].period_hint.is_none() && all[5].support_hint.is_none());
    }

    #[test]
    fn draws_are_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let fa = draw_function(&mut a);
            let fb = draw_function(&mut b);
            assert_eq!(fa.source, fb.source);
            let ga = draw_route_grid(&mut a);
            let gb = draw_route_grid(&mut b);
            assert_eq!((ga.l, ga.n), (gb.l, gb.n));
            assert_eq!(draw_x(&mut a, ga.l), draw_x(&mut b, gb.l));
        }
    }

    #[test]
    fn tail_split_grids_satisfy_the_precondition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = draw_tail_split_grid(&mut rng);
            assert!(g.eta() < 1.0 && g.l > 1.0, "l = {}, n = {}", g.l, g.n);
        }
    }
}
