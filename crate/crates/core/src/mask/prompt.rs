use serde::{Deserialize, Serialize};

/// Prompt density and minimum region area, both as resolved pixel values and
/// as the fractions they were resolved from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PromptConfig {
    /// Points per side; the grid holds `pps * pps` prompts.
    pub pps: usize,
    /// Minimum mask region area in pixels.
    pub mmra: u64,
    /// Fraction of the image side length.
    pub pps_percent: f64,
    /// Fraction of the image area.
    pub mmra_percent: f64,
}

impl PromptConfig {
    /// `pps = max(1, round(pps_percent * side))`, `mmra = round(mmra_percent * side^2)`.
    pub fn resolve(side: usize, pps_percent: f64, mmra_percent: f64) -> Self {
        let side_f = side as f64;
        Self {
            pps: ((pps_percent * side_f).round() as usize).max(1),
            mmra: (mmra_percent * side_f * side_f).round() as u64,
            pps_percent,
            mmra_percent,
        }
    }

    /// A config given directly in pixels; fractions are recorded as 0.
    pub fn absolute(pps: usize, mmra: u64) -> Self {
        Self {
            pps,
            mmra,
            pps_percent: 0.0,
            mmra_percent: 0.0,
        }
    }

    pub fn prompt_count(&self) -> usize {
        self.pps * self.pps
    }
}

/// Uniform `pps x pps` grid of `(row, col)` points at cell centres of a
/// square image.
pub fn prompt_grid(side: usize, pps: usize) -> Vec<(f64, f64)> {
    prompt_grid_rect(side, side, pps)
}

/// Rectangular variant: rows spaced over `height`, columns over `width`.
/// Points are emitted row-major.
pub fn prompt_grid_rect(height: usize, width: usize, pps: usize) -> Vec<(f64, f64)> {
    let step_r = height as f64 / pps as f64;
    let step_c = width as f64 / pps as f64;
    (0..pps)
        .flat_map(|a| (0..pps).map(move |b| ((a as f64 + 0.5) * step_r, (b as f64 + 0.5) * step_c)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        assert_eq!(prompt_grid(100, 1), vec![(50.0, 50.0)]);
        assert_eq!(
            prompt_grid(100, 2),
            vec![(25.0, 25.0), (25.0, 75.0), (75.0, 25.0), (75.0, 75.0)]
        );
        for n in 1..20 {
            let pts = prompt_grid(37, n);
            assert_eq!(pts.len(), n * n);
            assert!(pts
                .iter()
                .all(|&(r, c)| r > 0.0 && r < 37.0 && c > 0.0 && c < 37.0));
        }
    }

    #[test]
    fn resolution() {
        let c = PromptConfig::resolve(256, 0.01, 0.001);
        assert_eq!(c.pps, 3);
        assert_eq!(c.mmra, 66);
        assert_eq!(PromptConfig::resolve(10, 0.01, 0.0).pps, 1);
        assert_eq!(PromptConfig::resolve(137, 0.08, 0.01).pps, 11);
        assert_eq!(PromptConfig::resolve(137, 0.08, 0.01).mmra, 188);
        assert_eq!(c.prompt_count(), 9);
    }
}
