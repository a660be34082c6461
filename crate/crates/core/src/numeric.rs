// Fixed-order reductions. Every sum in the crate runs left to right over
// slice order so results are bit-identical regardless of thread count.

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Mean and sample variance (divisor n - 1) by the two-pass method.
/// Returns `None` for an empty input; the variance is 0 for a single value.
pub(crate) fn mean_var<I>(values: I) -> Option<(f64, f64, usize)>
where
    I: Iterator<Item = f64> + Clone,
{
    let mut n = 0usize;
    let mut sum = 0.0;
    for v in values.clone() {
        sum += v;
        n += 1;
    }
    if n == 0 {
        return None;
    }
    let mean = sum / n as f64;
    if n == 1 {
        return Some((mean, 0.0, 1));
    }
    let mut ss = 0.0;
    for v in values {
        let d = v - mean;
        ss += d * d;
    }
    Some((mean, ss / (n - 1) as f64, n))
}

pub(crate) fn all_equal<I: Iterator<Item = f64>>(mut values: I) -> bool {
    match values.next() {
        None => true,
        Some(first) => values.all(|v| v == first),
    }
}
