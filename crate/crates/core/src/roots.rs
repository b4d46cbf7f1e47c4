//! Bracketed root search for monotone scalar functions.

use crate::error::Result;

/// A point of the search and the function value there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub arg: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSearch {
    /// End of the final bracket with `value > 0`.
    pub positive: Probe,
    /// End of the final bracket with `value <= 0`.
    pub nonpositive: Probe,
    /// First probe satisfying the acceptance test, if any.
    pub accepted: Option<Probe>,
    /// Every probe in evaluation order, bracket endpoints included.
    pub trail: Vec<Probe>,
}

/// Illinois-modified regula falsi on a bracket with a sign change.
///
/// `positive` and `nonpositive` must straddle a root of `f`. The search stops
/// at the first probe for which `accept` holds, after `max_steps` probes, or
/// when the bracket can no longer be split.
pub fn illinois(
    mut f: impl FnMut(f64) -> Result<f64>,
    positive: Probe,
    nonpositive: Probe,
    accept: impl Fn(&Probe) -> bool,
    max_steps: u32,
) -> Result<RootSearch> {
    let mut pos = positive;
    let mut neg = nonpositive;
    // Scaled copies of the endpoint values used in the secant step.
    let (mut fp, mut fn_) = (pos.value, neg.value);
    let mut trail = vec![pos, neg];
    let mut last_side = 0i8;
    for _ in 0..max_steps {
        let (a, b) = (pos.arg, neg.arg);
        let mut arg = (a * fn_ - b * fp) / (fn_ - fp);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if !(arg > lo && arg < hi) {
            arg = 0.5 * (lo + hi);
            if !(arg > lo && arg < hi) {
                break;
            }
        }
        let probe = Probe { arg, value: f(arg)? };
        trail.push(probe);
        if accept(&probe) {
            return Ok(RootSearch {
                positive: pos,
                nonpositive: neg,
                accepted: Some(probe),
                trail,
            });
        }
        if probe.value > 0.0 {
            pos = probe;
            fp = probe.value;
            if last_side == 1 {
                fn_ *= 0.5;
            }
            last_side = 1;
        } else {
            neg = probe;
            fn_ = probe.value;
            if last_side == -1 {
                fp *= 0.5;
            }
            last_side = -1;
        }
    }
    Ok(RootSearch {
        positive: pos,
        nonpositive: neg,
        accepted: None,
        trail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let f = |x: f64| Ok(x * x * x - 2.0);
        let search = illinois(
            f,
            Probe { arg: 3.0, value: 25.0 },
            Probe { arg: 0.0, value: -2.0 },
            |p| p.value.abs() < 1e-13,
            100,
        )
        .unwrap();
        let root = search.accepted.unwrap().arg;
        assert!((root - 2f64.cbrt()).abs() < 1e-13);
        assert!(search.trail.len() < 30);
    }

    #[test]
    fn reports_final_bracket_when_not_accepted() {
        let f = |x: f64| Ok(1.0 - x);
        let search = illinois(
            f,
            Probe { arg: 0.0, value: 1.0 },
            Probe { arg: 4.0, value: -3.0 },
            |_| false,
            3,
        )
        .unwrap();
        assert!(search.accepted.is_none());
        assert!(search.positive.value > 0.0 && search.nonpositive.value <= 0.0);
        assert!(search.positive.arg <= 1.0 && search.nonpositive.arg >= 1.0);
    }
}
