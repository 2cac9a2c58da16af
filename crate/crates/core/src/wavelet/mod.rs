//! Analytic mother wavelets given by their Fourier profile `F(ξ)`, `ξ > 0`.
//!
//! Profiles are real-valued and vanish for `ξ ≤ 0`. Fourier convention: kernel `e^{−2πiξt}`.

mod decay;
mod model;
mod transform;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use decay::{decay_condition_report, DecayReport, TailCheck, WeightedL2Check, DEFAULT_DECAY_THRESHOLD};
pub use model::{SignalModel, BINARY_FORMAT};
pub(crate) use transform::phase;
pub use transform::{atom_spectrum, cwt, cwt_direct, cwt_scale_row, parseval_sum, Measure, ParsevalGrid};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveletError {
    #[error("order {order} violates the decay hypothesis: {reason}")]
    HypothesisViolated { order: f64, reason: String },
    #[error("invalid wavelet parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid quadrature grid: {0}")]
    InvalidGrid(String),
    #[error("admissibility integrand does not decay at the grid ends (tail {tail:e}, integral {integral:e})")]
    NonConvergentTail { tail: f64, integral: f64 },
    #[error("admissibility constant must be positive and finite, got {0}")]
    Degenerate(f64),
    #[error("finite-difference derivative unreliable at xi = {xi}: Richardson disagreement {disagreement:e}")]
    DerivativeAccuracy { xi: f64, disagreement: f64 },
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("invalid signal model: {0}")]
    InvalidModel(String),
    #[error("signal models differ: {0} vs {1}")]
    ModelMismatch(usize, usize),
    #[error("malformed signal data: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for WaveletError {
    fn from(e: std::io::Error) -> Self {
        WaveletError::Io(e.to_string())
    }
}

pub type WaveletResult<T> = Result<T, WaveletError>;

/// Largest value of `(ξ−ξ₀)²/(2w²)` at which the Gaussian bump is still evaluated; beyond it the profile is zero.
const GAUSSIAN_CUTOFF_EXPONENT: f64 = 36.0;

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Cauchy { order: f64 },
    Gaussian { center: f64, width: f64 },
    Custom {
        name: String,
        profile: ProfileFn,
        d1: Option<ProfileFn>,
        d2: Option<ProfileFn>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Cauchy,
    Gaussian,
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Cauchy => "cauchy",
            Family::Gaussian => "gaussian",
            Family::Custom => "custom",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyTag {
    pub family: Family,
    pub name: String,
    pub order: Option<f64>,
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub normalization: f64,
}

#[derive(Clone)]
pub struct MotherWavelet {
    kind: Kind,
    scale: f64,
}

impl fmt::Debug for MotherWavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MotherWavelet").field("tag", &self.tag()).finish()
    }
}

impl MotherWavelet {
    /// `ξ^p e^{−ξ}` with unit normalization factor, for any `p > 0`. No decay guard.
    pub fn cauchy_raw(order: f64) -> WaveletResult<Self> {
        if !(order.is_finite() && order > 0.0) {
            return Err(WaveletError::InvalidParameter(format!("cauchy order must be positive, got {order}")));
        }
        Ok(Self { kind: Kind::Cauchy { order }, scale: 1.0 })
    }

    /// `exp(−(ξ−ξ₀)²/(2w²))`, set to zero where it falls below `e^{−36}`.
    pub fn gaussian_raw(center: f64, width: f64) -> WaveletResult<Self> {
        if !(center.is_finite() && width.is_finite() && width > 0.0) {
            return Err(WaveletError::InvalidParameter(format!("gaussian center {center}, width {width}")));
        }
        let reach = width * (2.0 * GAUSSIAN_CUTOFF_EXPONENT).sqrt();
        if center - reach <= 0.0 {
            return Err(WaveletError::InvalidParameter(format!(
                "gaussian support [{}, {}] must lie in (0, inf)",
                center - reach,
                center + reach
            )));
        }
        Ok(Self { kind: Kind::Gaussian { center, width }, scale: 1.0 })
    }

    pub fn custom(name: impl Into<String>, profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            kind: Kind::Custom { name: name.into(), profile: Arc::new(profile), d1: None, d2: None },
            scale: 1.0,
        }
    }

    /// Attaches analytic derivatives to a custom profile.
    pub fn with_derivatives(
        mut self,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        if let Kind::Custom { d1: a, d2: b, .. } = &mut self.kind {
            *a = Some(Arc::new(d1));
            *b = Some(Arc::new(d2));
        }
        self
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale *= factor;
        self
    }

    pub fn normalization(&self) -> f64 {
        self.scale
    }

    pub fn family(&self) -> Family {
        match self.kind {
            Kind::Cauchy { .. } => Family::Cauchy,
            Kind::Gaussian { .. } => Family::Gaussian,
            Kind::Custom { .. } => Family::Custom,
        }
    }

    pub fn tag(&self) -> FamilyTag {
        let (name, order, center, width) = match &self.kind {
            Kind::Cauchy { order } => ("cauchy".to_string(), Some(*order), None, None),
            Kind::Gaussian { center, width } => ("gaussian".to_string(), None, Some(*center), Some(*width)),
            Kind::Custom { name, .. } => (name.clone(), None, None, None),
        };
        FamilyTag { family: self.family(), name, order, center, width, normalization: self.scale }
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        match &self.kind {
            Kind::Custom { d1, d2, .. } => d1.is_some() && d2.is_some(),
            _ => true,
        }
    }

    /// `F(ξ)`; zero for `ξ ≤ 0`.
    pub fn profile(&self, xi: f64) -> f64 {
        if !(xi > 0.0) {
            return 0.0;
        }
        self.scale
            * match &self.kind {
                Kind::Cauchy { order } => (order * xi.ln() - xi).exp(),
                Kind::Gaussian { center, width } => {
                    let e = (xi - center).powi(2) / (2.0 * width * width);
                    if e > GAUSSIAN_CUTOFF_EXPONENT {
                        0.0
                    } else {
                        (-e).exp()
                    }
                }
                Kind::Custom { profile, .. } => profile(xi),
            }
    }

    /// Analytic `F^{(k)}(ξ)` for `k ∈ {0, 1, 2}`, when available.
    pub fn analytic_derivative(&self, k: u8, xi: f64) -> Option<f64> {
        if k == 0 {
            return Some(self.profile(xi));
        }
        if !(xi > 0.0) {
            return Some(0.0);
        }
        let v = match &self.kind {
            Kind::Cauchy { order } => {
                let base = (order * xi.ln() - xi).exp();
                let r = order / xi - 1.0;
                match k {
                    1 => r * base,
                    2 => (r * r - order / (xi * xi)) * base,
                    _ => return None,
                }
            }
            Kind::Gaussian { center, width } => {
                let e = (xi - center).powi(2) / (2.0 * width * width);
                if e > GAUSSIAN_CUTOFF_EXPONENT {
                    return Some(0.0);
                }
                let g = (-e).exp();
                let w2 = width * width;
                match k {
                    1 => -(xi - center) / w2 * g,
                    2 => ((xi - center).powi(2) / (w2 * w2) - 1.0 / w2) * g,
                    _ => return None,
                }
            }
            Kind::Custom { d1, d2, .. } => match k {
                1 => d1.as_ref()?(xi),
                2 => d2.as_ref()?(xi),
                _ => return None,
            },
        };
        Some(self.scale * v)
    }

    /// Richardson-extrapolated central difference for `F^{(k)}`, with the disagreement between two extrapolation levels.
    pub fn richardson_derivative(&self, k: u8, xi: f64) -> (f64, f64) {
        let f = |t: f64| self.profile(t);
        let stencil = |h: f64| match k {
            1 => (f(xi + h) - f(xi - h)) / (2.0 * h),
            2 => (f(xi + h) - 2.0 * f(xi) + f(xi - h)) / (h * h),
            _ => f(xi),
        };
        let h = match k {
            1 => 4e-3 * xi,
            _ => 1.6e-2 * xi,
        };
        let [d0, d1, d2] = [stencil(h), stencil(h / 2.0), stencil(h / 4.0)];
        let coarse = (4.0 * d1 - d0) / 3.0;
        let fine = (4.0 * d2 - d1) / 3.0;
        (fine, (fine - coarse).abs())
    }

    /// Analytic derivative when available, else Richardson's estimate; the second value is the error estimate.
    pub fn derivative(&self, k: u8, xi: f64) -> (f64, f64) {
        match self.analytic_derivative(k, xi) {
            Some(v) => (v, 0.0),
            None => self.richardson_derivative(k, xi),
        }
    }
}

/// Samples `s^{−1/2} F(j/(n s))` on the consecutive bins `first … first + len − 1`.
///
/// The Cauchy family uses `F(u_{j+1})/F(u_j) = ((j+1)/j)^p e^{−1/(n s)}` with the ratio table built once.
pub(crate) struct BinSampler {
    wavelet: MotherWavelet,
    n: usize,
    first: usize,
    len: usize,
    ratios: Option<Vec<f64>>,
}

impl BinSampler {
    pub(crate) fn new(wavelet: &MotherWavelet, n: usize, first: usize, len: usize) -> Self {
        let ratios = match wavelet.kind {
            Kind::Cauchy { order } => Some(
                (first..first + len.saturating_sub(1))
                    .map(|j| ((j as f64 + 1.0) / j as f64).powf(order))
                    .collect(),
            ),
            _ => None,
        };
        Self { wavelet: wavelet.clone(), n, first, len, ratios }
    }

    pub(crate) fn sample(&self, s: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len);
        let amp = s.sqrt().recip();
        let step = 1.0 / (self.n as f64 * s);
        if let Some(ratios) = &self.ratios {
            let mut v = amp * self.wavelet.profile(self.first as f64 * step);
            if v > 1e-250 && v.is_finite() {
                let decay = (-step).exp();
                out[0] = v;
                for (o, r) in out[1..].iter_mut().zip(ratios) {
                    v *= r * decay;
                    *o = v;
                }
                return;
            }
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = amp * self.wavelet.profile((self.first + i) as f64 * step);
        }
    }
}

/// Log-spaced quadrature grid on `[xi_min, xi_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadGrid {
    pub xi_min: f64,
    pub xi_max: f64,
    pub points: usize,
}

impl Default for QuadGrid {
    fn default() -> Self {
        Self { xi_min: 1e-8, xi_max: 1e3, points: 8193 }
    }
}

impl QuadGrid {
    pub fn validate(&self) -> WaveletResult<()> {
        if !(self.xi_min > 0.0 && self.xi_max > self.xi_min * 100.0 && self.xi_max.is_finite()) {
            return Err(WaveletError::InvalidGrid(format!(
                "need 0 < xi_min and xi_max >= 100 xi_min, got [{}, {}]",
                self.xi_min, self.xi_max
            )));
        }
        if self.points < 17 {
            return Err(WaveletError::InvalidGrid(format!("at least 17 points, got {}", self.points)));
        }
        Ok(())
    }

    pub fn log_step(&self) -> f64 {
        (self.xi_max / self.xi_min).ln() / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let (t0, h) = (self.xi_min.ln(), self.log_step());
        (0..self.points).map(|i| (t0 + h * i as f64).exp()).collect()
    }
}

/// Trapezoid rule in `t = ln ξ` for samples `g(e^{t_i})` with uniform step `h`.
fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    pub value: f64,
    /// Integrand (in `ln ξ`) at the grid ends, a proxy for the neglected tails.
    pub truncation_error: f64,
    /// Difference between the full grid and every-other-node trapezoid sums.
    pub discretization_error: f64,
    pub grid: QuadGrid,
}

/// `∫₀^∞ |F(ξ)|² ξ^{−1} dξ`, integrated as `∫ |F(e^t)|² dt`.
pub fn admissibility_constant(w: &MotherWavelet, grid: &QuadGrid) -> WaveletResult<Admissibility> {
    grid.validate()?;
    let values: Vec<f64> = grid.nodes().iter().map(|&xi| w.profile(xi).powi(2)).collect();
    let h = grid.log_step();
    let value = trapezoid(&values, h);
    let coarse: Vec<f64> = values.iter().step_by(2).copied().collect();
    let coarse_h = h * 2.0;
    let discretization_error = if values.len() % 2 == 1 {
        (value - trapezoid(&coarse, coarse_h)).abs()
    } else {
        f64::NAN
    };
    let tail = values[0] + values[values.len() - 1];
    if !value.is_finite() || tail > 1e-9 * value.max(f64::MIN_POSITIVE) {
        return Err(WaveletError::NonConvergentTail { tail, integral: value });
    }
    Ok(Admissibility { value, truncation_error: tail, discretization_error, grid: *grid })
}

/// Rescales the profile so that the admissibility constant on the default grid is one.
pub fn normalize_tight(w: &MotherWavelet) -> WaveletResult<MotherWavelet> {
    let c = admissibility_constant(w, &QuadGrid::default())?.value;
    if !(c.is_finite() && c > 0.0) {
        return Err(WaveletError::Degenerate(c));
    }
    Ok(w.clone().scaled(c.sqrt().recip()))
}

pub const MIN_CAUCHY_ORDER: f64 = 6.0;

/// Tight-normalized `c ξ^p e^{−ξ}`.
pub fn cauchy_wavelet(order: f64) -> WaveletResult<MotherWavelet> {
    if !(order >= MIN_CAUCHY_ORDER) || !order.is_finite() {
        return Err(WaveletError::HypothesisViolated {
            order,
            reason: format!(
                "max(xi^5, xi^-5) * F and the derivative tails must vanish at 0; this family requires order >= {MIN_CAUCHY_ORDER}"
            ),
        });
    }
    normalize_tight(&MotherWavelet::cauchy_raw(order)?)
}

/// Tight-normalized Gaussian bump.
pub fn gaussian_wavelet(center: f64, width: f64) -> WaveletResult<MotherWavelet> {
    normalize_tight(&MotherWavelet::gaussian_raw(center, width)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Tight,
    Raw,
}

/// Serializable description of a built-in wavelet, as flat `key = value` lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletSpec {
    pub family: Family,
    pub order: f64,
    pub center: f64,
    pub width: f64,
    pub normalization: Normalization,
}

impl Default for WaveletSpec {
    fn default() -> Self {
        Self { family: Family::Cauchy, order: 6.0, center: 1.0, width: 0.1, normalization: Normalization::Tight }
    }
}

impl WaveletSpec {
    pub fn build(&self) -> WaveletResult<MotherWavelet> {
        match (self.family, self.normalization) {
            (Family::Cauchy, Normalization::Tight) => cauchy_wavelet(self.order),
            (Family::Cauchy, Normalization::Raw) => MotherWavelet::cauchy_raw(self.order),
            (Family::Gaussian, Normalization::Tight) => gaussian_wavelet(self.center, self.width),
            (Family::Gaussian, Normalization::Raw) => MotherWavelet::gaussian_raw(self.center, self.width),
            (Family::Custom, _) => Err(WaveletError::InvalidParameter("custom profiles cannot be built from a spec".into())),
        }
    }

    pub fn to_kv(&self) -> String {
        let norm = match self.normalization {
            Normalization::Tight => "tight",
            Normalization::Raw => "raw",
        };
        format!(
            "family = {}\norder = {}\ncenter = {}\nwidth = {}\nnormalization = {norm}\n",
            self.family, self.order, self.center, self.width
        )
    }

    pub fn from_kv(text: &str) -> WaveletResult<Self> {
        let mut spec = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| WaveletError::Format(format!("line {}: {msg}", i + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let num = || value.parse::<f64>().map_err(|_| bad("not a number"));
            match key {
                "family" => {
                    spec.family = match value {
                        "cauchy" => Family::Cauchy,
                        "gaussian" => Family::Gaussian,
                        _ => return Err(bad("unknown family")),
                    }
                }
                "order" => spec.order = num()?,
                "center" => spec.center = num()?,
                "width" => spec.width = num()?,
                "normalization" => {
                    spec.normalization = match value {
                        "tight" => Normalization::Tight,
                        "raw" => Normalization::Raw,
                        _ => return Err(bad("unknown normalization")),
                    }
                }
                _ => return Err(bad("unknown key")),
            }
        }
        Ok(spec)
    }
}
