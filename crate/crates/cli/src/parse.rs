//! Value syntax shared by the flags and the config file.

use std::path::Path;

use num_complex::Complex64;
use rfeig::pencil::{circle_sample, disk_sample};

/// Accepts `re`, `re+imi`, `re-imi` and `imi`, e.g. `-260+1000i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    t.parse::<Complex64>()
        .map_err(|_| format!("`{s}` is not a complex number"))
}

/// A list of eigenvalues given as
/// - `disk:N:R`, `N` points uniform in `|z| ≤ R`;
/// - `circle:N:R`, `N` equispaced points on `|z| = R` with a random phase;
/// - a path to a file of complex numbers separated by whitespace or commas;
/// - a comma-separated list of complex numbers.
///
/// The empty string is the empty list.
pub fn parse_spectrum(spec: &str, seed: u64) -> Result<Vec<Complex64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(rest) = spec.strip_prefix("disk:") {
        let (n, r) = count_and_radius(rest)?;
        return Ok(disk_sample(n, r, seed));
    }
    if let Some(rest) = spec.strip_prefix("circle:") {
        let (n, r) = count_and_radius(rest)?;
        return Ok(circle_sample(n, r, seed));
    }
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        return text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(parse_complex)
            .collect();
    }
    spec.split(',').map(parse_complex).collect()
}

fn count_and_radius(s: &str) -> Result<(usize, f64), String> {
    let (n, r) = s
        .split_once(':')
        .ok_or_else(|| format!("expected N:R, got `{s}`"))?;
    let n: usize = n.parse().map_err(|_| format!("bad count `{n}`"))?;
    let r: f64 = r.parse().map_err(|_| format!("bad radius `{r}`"))?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(format!("radius {r} must be positive"));
    }
    Ok((n, r))
}
