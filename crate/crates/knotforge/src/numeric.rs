//! Summation helpers shared by the energy sums.
//!
//! The energies must be invariant, bitwise, under relabelings of the vertex
//! list (cyclic shifts and orientation reversal). Plain left-to-right
//! accumulation breaks that at the last few ulps because the term order
//! changes with the labeling, so sums over term multisets go through
//! [`canonical_sum`]: sort by total order, then fold with Neumaier
//! compensation. Identical multisets then produce identical floats.

/// Compensated (Neumaier) accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum in the given order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = Compensated::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Order-independent sum of a term multiset: sorts by `f64::total_cmp`
/// and folds with compensation. Two permutations of the same multiset
/// yield the same float.
pub fn canonical_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    compensated_sum(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_sum_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base: Vec<f64> = (0..257).map(|_| rng.random::<f64>() * 1e3 - 500.0).collect();
        let reference = canonical_sum(base.clone());
        for _ in 0..50 {
            let mut shuffled = base.clone();
            shuffled.shuffle(&mut rng);
            assert_eq!(canonical_sum(shuffled).to_bits(), reference.to_bits());
        }
    }

    #[test]
    fn compensated_beats_naive_on_cancellation() {
        // 1 + 1e-16 repeated: naive drops the small terms entirely.
        let mut terms = vec![1.0];
        terms.extend(std::iter::repeat(1e-16).take(100_000));
        let exact = 1.0 + 1e-16 * 100_000.0;
        assert!((canonical_sum(terms) - exact).abs() < 1e-15);
    }
}
