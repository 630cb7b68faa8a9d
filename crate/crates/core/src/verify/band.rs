use serde::{Deserialize, Serialize};

use crate::scalar::ls_slope;

/// Tolerances of a ratio band check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandConfig {
    /// Largest admissible `max / min` of the ratios.
    pub band: f64,
    /// Largest admissible `|slope|` of `log ratio` against `log param`.
    pub slope_tol: f64,
    /// Members with boundary parameter at most this value enter the slope
    /// fit (all members when fewer than three qualify).
    pub tail_cutoff: f64,
    /// Whether the slope enters the verdict at all.
    pub check_slope: bool,
}

impl Default for BandConfig {
    fn default() -> Self {
        Self {
            band: 20.0,
            slope_tol: 0.1,
            tail_cutoff: 0.1,
            check_slope: true,
        }
    }
}

impl BandConfig {
    pub fn with_band(mut self, band: f64) -> Self {
        self.band = band;
        self
    }

    pub fn without_slope(mut self) -> Self {
        self.check_slope = false;
        self
    }
}

/// The member that broke a band, and how.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub index: usize,
    pub param: f64,
    pub ratio: f64,
    pub reason: String,
}

/// Ratios of two quantities over a family, with their spread and trend.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioBandResult {
    pub ratios: Vec<f64>,
    /// Boundary parameter of each member (e.g. `1 - |a|`).
    pub params: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// `max / min`.
    pub spread: f64,
    /// Slope of `log ratio` against `log param` on the tail members.
    pub slope: f64,
    pub one_sided: bool,
    pub config: BandConfig,
    pub pass: bool,
    pub offending: Option<Offender>,
}

fn tail_slope(ratios: &[f64], params: &[f64], cfg: &BandConfig) -> f64 {
    let mut idx: Vec<usize> = (0..ratios.len()).filter(|&i| params[i] <= cfg.tail_cutoff).collect();
    if idx.len() < 3 {
        idx = (0..ratios.len()).collect();
    }
    let xs: Vec<f64> = idx.iter().map(|&i| params[i].ln()).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| ratios[i].ln()).collect();
    ls_slope(&xs, &ys)
}

fn extremes(ratios: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, &r) in ratios.iter().enumerate() {
        if r < ratios[lo] {
            lo = i;
        }
        if r > ratios[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

fn deepest(params: &[f64]) -> usize {
    let mut k = 0;
    for (i, &p) in params.iter().enumerate() {
        if p < params[k] {
            k = i;
        }
    }
    k
}

fn invalid_member(ratios: &[f64]) -> Option<usize> {
    ratios.iter().position(|r| !(r.is_finite() && *r > 0.0))
}

fn empty(one_sided: bool, cfg: &BandConfig) -> RatioBandResult {
    RatioBandResult {
        ratios: Vec::new(),
        params: Vec::new(),
        min: f64::NAN,
        max: f64::NAN,
        spread: f64::NAN,
        slope: 0.0,
        one_sided,
        config: *cfg,
        pass: false,
        offending: None,
    }
}

/// Two-sided band: passes iff every ratio is finite and positive,
/// `max / min < band` and (when enabled) `|slope| < slope_tol`.
pub fn band_result(ratios: Vec<f64>, params: Vec<f64>, cfg: &BandConfig) -> RatioBandResult {
    assert_eq!(ratios.len(), params.len(), "one parameter per ratio");
    if ratios.is_empty() {
        return empty(false, cfg);
    }
    if let Some(i) = invalid_member(&ratios) {
        return RatioBandResult {
            offending: Some(Offender {
                index: i,
                param: params[i],
                ratio: ratios[i],
                reason: "ratio is not a positive finite number".into(),
            }),
            ..empty(false, cfg)
        };
    }
    let (lo, hi) = extremes(&ratios);
    let (min, max) = (ratios[lo], ratios[hi]);
    let spread = max / min;
    let slope = tail_slope(&ratios, &params, cfg);
    let band_ok = spread < cfg.band;
    let slope_ok = !cfg.check_slope || slope.abs() < cfg.slope_tol;
    let offending = if !band_ok {
        // blame whichever extreme sits closer to the boundary
        let i = if params[hi] <= params[lo] { hi } else { lo };
        Some(Offender {
            index: i,
            param: params[i],
            ratio: ratios[i],
            reason: format!("spread {spread:.4} exceeds band {}", cfg.band),
        })
    } else if !slope_ok {
        let i = deepest(&params);
        Some(Offender {
            index: i,
            param: params[i],
            ratio: ratios[i],
            reason: format!("slope {slope:.4} exceeds tolerance {}", cfg.slope_tol),
        })
    } else {
        None
    };
    RatioBandResult {
        ratios,
        params,
        min,
        max,
        spread,
        slope,
        one_sided: false,
        config: *cfg,
        pass: band_ok && slope_ok,
        offending,
    }
}

/// One-sided band for inclusions `lhs <= C rhs`: passes iff no ratio
/// exceeds `band` times the ratio of the member farthest from the boundary,
/// and (when enabled) the tail slope is above `-slope_tol`, i.e. the ratios
/// do not grow toward the boundary.
pub fn one_sided_band(ratios: Vec<f64>, params: Vec<f64>, cfg: &BandConfig) -> RatioBandResult {
    assert_eq!(ratios.len(), params.len(), "one parameter per ratio");
    if ratios.is_empty() {
        return empty(true, cfg);
    }
    if let Some(i) = invalid_member(&ratios) {
        return RatioBandResult {
            offending: Some(Offender {
                index: i,
                param: params[i],
                ratio: ratios[i],
                reason: "ratio is not a positive finite number".into(),
            }),
            ..empty(true, cfg)
        };
    }
    let (lo, hi) = extremes(&ratios);
    let (min, max) = (ratios[lo], ratios[hi]);
    let mut reference = 0;
    for (i, &p) in params.iter().enumerate() {
        if p > params[reference] {
            reference = i;
        }
    }
    let growth = max / ratios[reference];
    let slope = tail_slope(&ratios, &params, cfg);
    let band_ok = growth < cfg.band;
    let slope_ok = !cfg.check_slope || slope > -cfg.slope_tol;
    let offending = if !band_ok {
        Some(Offender {
            index: hi,
            param: params[hi],
            ratio: max,
            reason: format!("growth {growth:.4} exceeds band {}", cfg.band),
        })
    } else if !slope_ok {
        let i = deepest(&params);
        Some(Offender {
            index: i,
            param: params[i],
            ratio: ratios[i],
            reason: format!("ratios grow toward the boundary (slope {slope:.4})"),
        })
    } else {
        None
    };
    RatioBandResult {
        ratios,
        params,
        min,
        max,
        spread: max / min,
        slope,
        one_sided: true,
        config: *cfg,
        pass: band_ok && slope_ok,
        offending,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_ratios_pass() {
        let r = band_result(vec![2.0; 5], vec![0.5, 0.25, 0.1, 0.01, 0.001], &BandConfig::default());
        assert!(r.pass);
        assert_eq!(r.spread, 1.0);
        assert_eq!(r.slope, 0.0);
        assert!(r.offending.is_none());
    }

    #[test]
    fn power_law_fails_on_slope() {
        let params = vec![0.5, 0.1, 0.05, 0.01, 0.005, 0.001];
        let ratios: Vec<f64> = params.iter().map(|p: &f64| p.powf(-0.3)).collect();
        let r = band_result(ratios.clone(), params.clone(), &BandConfig::default());
        assert!(!r.pass);
        assert!((r.slope + 0.3).abs() < 1e-12);
        assert_eq!(r.offending.unwrap().index, 5);
        assert!(band_result(ratios, params, &BandConfig::default().without_slope()).pass);
    }

    #[test]
    fn wide_spread_fails() {
        let r = band_result(vec![1.0, 30.0], vec![0.5, 0.001], &BandConfig::default());
        assert!(!r.pass);
        assert_eq!(r.offending.unwrap().index, 1);
        let bad = band_result(vec![1.0, f64::NAN], vec![0.5, 0.1], &BandConfig::default());
        assert!(!bad.pass);
    }

    #[test]
    fn one_sided_tolerates_decay_but_not_growth() {
        let params = vec![0.5, 0.1, 0.01, 0.001];
        let decay: Vec<f64> = params.iter().map(|p: &f64| p.sqrt()).collect();
        assert!(one_sided_band(decay, params.clone(), &BandConfig::default()).pass);
        let growth: Vec<f64> = params.iter().map(|p: &f64| p.powf(-0.5)).collect();
        assert!(!one_sided_band(growth, params, &BandConfig::default()).pass);
    }

    #[test]
    fn empty_input_does_not_pass() {
        assert!(!band_result(Vec::new(), Vec::new(), &BandConfig::default()).pass);
    }
}
