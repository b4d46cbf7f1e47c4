//! Shared text-format helpers.

use crate::error::{Error, Result};

/// 17 significant digits; parses back to the identical `f64`.
pub fn fmt17(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        // NaN and infinities in a form `str::parse::<f64>` accepts.
        format!("{value}")
    }
}

pub(crate) fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field.trim().parse().map_err(|_| Error::Parse {
        line,
        reason: format!("expected a number, got {field:?}"),
    })
}

pub(crate) fn parse_usize(field: &str, line: usize) -> Result<usize> {
    field.trim().parse().map_err(|_| Error::Parse {
        line,
        reason: format!("expected a non-negative integer, got {field:?}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn fmt17_round_trips(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back: f64 = fmt17(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
