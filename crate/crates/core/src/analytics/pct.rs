/// Rounds to `sig` significant figures, ties to even.
pub fn round_sig(x: f64, sig: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = sig as i32 - 1 - magnitude;
    let scale = 10f64.powi(decimals);
    (x * scale).round_ties_even() / scale
}

/// Formats a fraction as a percentage with three significant figures,
/// e.g. 0.40564 -> "40.6%", 0.000918 -> "0.0918%", 1.0 -> "100%".
pub fn format_pct(fraction: f64) -> String {
    let pct = round_sig(fraction * 100.0, 3);
    if pct == 0.0 {
        return "0%".to_string();
    }
    let magnitude = pct.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).max(0) as usize;
    format!("{pct:.decimals$}%")
}

/// Percentage rounded to three significant figures, as a number.
pub fn pct3(fraction: f64) -> f64 {
    round_sig(fraction * 100.0, 3)
}
