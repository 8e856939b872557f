use rand::Rng;

/// Draws a rank from the truncated geometric distribution on `{1, ..., b}`
/// with `P(i) = C_b / 2^i`, `C_b = 1 / (1 - 2^-b)`.
///
/// Plays the coin game: start at 1 and advance cyclically through
/// `1, ..., b` on every successful fair flip until the first failure.
pub fn sample_rank<R: Rng + ?Sized>(b: u64, rng: &mut R) -> u64 {
    assert!(b >= 1, "rank budget must be positive");
    let mut q = 1;
    while rng.gen::<bool>() {
        q = q % b + 1;
    }
    q
}

/// `P(rank = i)` for budget `b`.
pub fn rank_probability(b: u64, i: u64) -> f64 {
    if i == 0 || i > b {
        return 0.0;
    }
    let c = 1.0 / (1.0 - 0.5f64.powf(b as f64));
    c * 0.5f64.powf(i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn budget_one_always_gives_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..1000).all(|_| sample_rank(1, &mut rng) == 1));
        assert_eq!(rank_probability(1, 1), 1.0);
    }

    #[test]
    fn budget_two_probabilities() {
        assert!((rank_probability(2, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((rank_probability(2, 2) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(rank_probability(2, 3), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 30_000;
        let ones = (0..draws).filter(|_| sample_rank(2, &mut rng) == 1).count();
        let p = ones as f64 / draws as f64;
        let se = (2.0 / 9.0 / draws as f64).sqrt();
        assert!((p - 2.0 / 3.0).abs() < 4.0 * se, "{p}");
    }

    #[test]
    fn ranks_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for b in [1, 2, 3, 7, 100] {
            for _ in 0..2000 {
                let r = sample_rank(b, &mut rng);
                assert!((1..=b).contains(&r));
            }
        }
    }
}
