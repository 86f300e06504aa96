use serde::{Deserialize, Serialize};

/// Per-bit reward `1 - |x - t| / divisor` while `|x - t| < cutoff`, else 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessBand {
    pub cutoff: f64,
    pub divisor: f64,
}

impl FitnessBand {
    /// Continuous band: reward reaches 0 exactly at the cutoff.
    pub const CONTINUOUS: FitnessBand = FitnessBand {
        cutoff: 0.25,
        divisor: 0.25,
    };
    /// Cutoff 0.2 with divisor 0.25, as the formula is literally printed.
    pub const LITERAL: FitnessBand = FitnessBand {
        cutoff: 0.2,
        divisor: 0.25,
    };

    #[inline]
    pub fn score(&self, x: f64, target: f64) -> f64 {
        let d = (x - target).abs();
        if d < self.cutoff {
            1.0 - d / self.divisor
        } else {
            0.0
        }
    }
}

impl Default for FitnessBand {
    fn default() -> Self {
        FitnessBand::CONTINUOUS
    }
}

/// Fitness of one output bit under the default band.
pub fn fitness_bit(x: f64, target: f64) -> f64 {
    FitnessBand::CONTINUOUS.score(x, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn point_values() {
        assert_eq!(fitness_bit(1.0, 1.0), 1.0);
        assert_eq!(fitness_bit(0.0, 0.0), 1.0);
        assert_eq!(fitness_bit(0.125, 0.0), 0.5);
        assert_eq!(fitness_bit(0.875, 1.0), 0.5);
        assert_eq!(fitness_bit(0.25, 0.0), 0.0);
        assert_eq!(fitness_bit(0.3, 0.0), 0.0);
        assert_eq!(fitness_bit(0.7, 1.0), 0.0);
    }

    #[test]
    fn literal_band_cuts_earlier() {
        assert_eq!(FitnessBand::LITERAL.score(0.125, 0.0), 0.5);
        assert_eq!(FitnessBand::LITERAL.score(0.21, 0.0), 0.0);
        assert!(FitnessBand::CONTINUOUS.score(0.21, 0.0) > 0.0);
    }

    proptest! {
        #[test]
        fn monotone_in_error(t in 0u8..2, a in 0.0..1.0f64, b in 0.0..1.0f64) {
            let t = t as f64;
            let (near, far) = if (a - t).abs() <= (b - t).abs() { (a, b) } else { (b, a) };
            prop_assert!(fitness_bit(near, t) >= fitness_bit(far, t));
            prop_assert!((0.0..=1.0).contains(&fitness_bit(a, t)));
        }
    }
}
