//! Scoring and statistics: prediction accuracy, the lying and repetition
//! analysis filters, and the paired t-test with its Student-t p-value.

use crate::game::PlayerRole;
use crate::logio::InteractionLog;
use crate::Error;

/// Fraction of predictions matching the actuals.
pub fn accuracy<T: PartialEq>(predictions: &[T], actuals: &[T]) -> Result<f64, Error> {
    if predictions.len() != actuals.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            actuals: actuals.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::LengthMismatch {
            predictions: 0,
            actuals: 0,
        });
    }
    let matches = predictions
        .iter()
        .zip(actuals.iter())
        .filter(|(p, a)| p == a)
        .count();
    Ok(matches as f64 / predictions.len() as f64)
}

/// Among rounds where the role proposed a plan (which names its own action
/// for that round), the fraction where the played action contradicts the
/// proposal. No proposal rounds means a rate of 0.
pub fn lying_rate(log: &InteractionLog, role: PlayerRole) -> f64 {
    let mut proposal_rounds = 0usize;
    let mut lies = 0usize;
    for round in &log.rounds {
        if let Some(plan) = round.speech_of(role).proposal() {
            proposal_rounds += 1;
            let promised = plan.step(0).action_of(role);
            if round.action_of(role) != promised {
                lies += 1;
            }
        }
    }
    if proposal_rounds == 0 {
        0.0
    } else {
        lies as f64 / proposal_rounds as f64
    }
}

/// Longest run of identical consecutive actions by the role, divided by the
/// number of rounds.
pub fn repetition_fraction(log: &InteractionLog, role: PlayerRole) -> f64 {
    if log.rounds.is_empty() {
        return 0.0;
    }
    let mut longest = 1usize;
    let mut current = 1usize;
    for pair in log.rounds.windows(2) {
        if pair[0].action_of(role) == pair[1].action_of(role) {
            current += 1;
            longest = longest.max(current);
        } else {
            current = 1;
        }
    }
    longest as f64 / log.rounds.len() as f64
}

/// Result of a paired t-test. `infinite_t` marks the degenerate case of a
/// nonzero mean difference with zero variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    pub df: usize,
    pub p_two_tailed: f64,
    pub infinite_t: bool,
}

/// Two-tailed paired t-test on equal-length samples.
pub fn paired_t_test(xs: &[f64], ys: &[f64]) -> Result<TTestResult, Error> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            predictions: xs.len(),
            actuals: ys.len(),
        });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let diffs: Vec<f64> = xs.iter().zip(ys.iter()).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let df = n - 1;

    if var == 0.0 {
        return Ok(if mean == 0.0 {
            TTestResult {
                t: 0.0,
                df,
                p_two_tailed: 1.0,
                infinite_t: false,
            }
        } else {
            TTestResult {
                t: if mean > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                },
                df,
                p_two_tailed: 0.0,
                infinite_t: true,
            }
        });
    }

    let t = mean / (var.sqrt() / (n as f64).sqrt());
    let p = student_t_two_tailed_p(t, df as f64);
    Ok(TTestResult {
        t,
        df,
        p_two_tailed: p,
        infinite_t: false,
    })
}

/// Two-tailed p-value for Student's t: I_x(df/2, 1/2) with x = df/(df+t^2).
pub fn student_t_two_tailed_p(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let x = df / (df + t * t);
    inc_beta(x, df / 2.0, 0.5).clamp(0.0, 1.0)
}

/// ln Gamma(z) for z > 0, by the Lanczos approximation.
pub fn ln_gamma(z: f64) -> f64 {
    const COEFFS: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut sum = 1.000000000190015;
    for (i, &c) in COEFFS.iter().enumerate() {
        sum += c / (z + i as f64 + 1.0);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.5066282746310005 * sum / z).ln()
}

/// Regularized incomplete beta I_x(a, b) by the Lentz continued fraction.
pub fn inc_beta(x: f64, a: f64, b: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "inc_beta requires positive parameters");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // The continued fraction converges fastest below this split.
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - inc_beta(1.0 - x, b, a);
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_gamma(a) - ln_gamma(b) + ln_gamma(a + b);
    let front = ln_front.exp();

    const MAX_ITER: usize = 400;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-30;

    let mut f = 1.0;
    let mut c = 1.0f64;
    let mut d = 0.0f64;
    let step = |numerator: f64, c: &mut f64, d: &mut f64| -> f64 {
        *d = 1.0 + numerator * *d;
        if d.abs() < TINY {
            *d = TINY;
        }
        *d = 1.0 / *d;
        *c = 1.0 + numerator / *c;
        if c.abs() < TINY {
            *c = TINY;
        }
        *c * *d
    };
    for m in 0..MAX_ITER {
        let m_f = m as f64;
        let odd = -(a + m_f) * (a + b + m_f) * x / ((a + 2.0 * m_f) * (a + 2.0 * m_f + 1.0));
        let delta = step(odd, &mut c, &mut d);
        f *= delta;
        let even =
            (m_f + 1.0) * (b - m_f - 1.0) * x / ((a + 2.0 * m_f + 1.0) * (a + 2.0 * m_f + 2.0));
        let delta = step(even, &mut c, &mut d);
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    front / (f * a)
}
