//! Grid-value parsing for swept parameters: `start:step:stop` ranges
//! (endpoints inclusive within a 1e-12 relative tolerance), comma lists and
//! single scalars.

use anyhow::{bail, Context, Result};

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        bail!("empty grid specification");
    }
    if text.contains(':') {
        return parse_range(text);
    }
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid number {v:?}"))
        })
        .collect()
}

fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("range must be start:step:stop, got {text:?}");
    }
    let start: f64 = parts[0].trim().parse().context("bad range start")?;
    let step: f64 = parts[1].trim().parse().context("bad range step")?;
    let stop: f64 = parts[2].trim().parse().context("bad range stop")?;
    if step == 0.0 || !step.is_finite() {
        bail!("range step must be finite and non-zero");
    }
    if (stop - start) * step < 0.0 {
        bail!("range step points away from stop: {text:?}");
    }
    let raw = (stop - start) / step;
    let tol = 1e-12 * stop.abs().max(step.abs()).max(1.0);
    let rounded = raw.round();
    let k_max = if (start + rounded * step - stop).abs() <= tol {
        rounded as i64
    } else {
        raw.floor() as i64
    };
    Ok((0..=k_max.max(0)).map(|k| start + k as f64 * step).collect())
}

pub fn parse_grid_u32(text: &str) -> Result<Vec<u32>> {
    parse_grid(text)?
        .into_iter()
        .map(|v| {
            let rounded = v.round();
            if (v - rounded).abs() > 1e-9 || rounded < 1.0 {
                bail!("expected positive integer, got {v}");
            }
            Ok(rounded as u32)
        })
        .collect()
}

/// `lo:hi` pair (used for bisection brackets).
pub fn parse_pair(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        bail!("expected lo:hi, got {text:?}");
    }
    Ok((
        parts[0].trim().parse().context("bad pair lo")?,
        parts[1].trim().parse().context("bad pair hi")?,
    ))
}
