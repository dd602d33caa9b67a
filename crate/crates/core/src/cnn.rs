//! Inference for the small 1D convolutional network that produces the
//! smoothness-indicator multipliers, and its JSON weight-file format.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{Axis, GasModel};
use crate::grid::FieldGrid;
use crate::solver::characteristic_split_line;
use crate::weno::{MultiplierField, SplitSign};

pub const FORMAT_VERSION: u32 = 1;
/// Number of characteristic fields of the 2D Euler system.
pub const CHANNELS: usize = 4;

/// Exponent above which softplus is replaced by the identity.
const SOFTPLUS_LINEAR_CUTOFF: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArchTag {
    A,
    B,
    C,
}

impl std::str::FromStr for ArchTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(ArchTag::A),
            "B" | "b" => Ok(ArchTag::B),
            "C" | "c" => Ok(ArchTag::C),
            other => Err(Error::Config(format!("unknown architecture `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "lowercase")]
pub enum Activation {
    /// `x` for `x > 0`, `alpha (exp(x) - 1)` otherwise.
    #[serde(rename = "aelu")]
    Elu(f64),
    /// `ln(1 + exp(beta x)) / beta`.
    #[serde(rename = "asoftplus")]
    Softplus(f64),
    #[serde(rename = "none")]
    Identity(f64),
}

impl Activation {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Activation::Elu(alpha) => {
                if x > 0.0 {
                    x
                } else {
                    alpha * x.exp_m1()
                }
            }
            Activation::Softplus(beta) => {
                let bx = beta * x;
                if bx > SOFTPLUS_LINEAR_CUTOFF {
                    x
                } else {
                    bx.exp().ln_1p() / beta
                }
            }
            Activation::Identity(_) => x,
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            Activation::Elu(p) | Activation::Softplus(p) | Activation::Identity(p) => p,
        }
    }

    fn is_lower_bounded(&self) -> bool {
        matches!(self, Activation::Softplus(_))
    }
}

pub fn activation(x: f64, spec: &Activation) -> f64 {
    spec.apply(x)
}

/// One valid (unpadded) 1D convolution followed by an activation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvLayer {
    pub out_ch: usize,
    pub in_ch: usize,
    pub width: usize,
    /// Row-major `[out][in][tap]`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl ConvLayer {
    pub fn zeros(in_ch: usize, out_ch: usize, width: usize, activation: Activation) -> Self {
        Self {
            out_ch,
            in_ch,
            width,
            weights: vec![0.0; out_ch * in_ch * width],
            bias: vec![0.0; out_ch],
            activation,
        }
    }

    #[inline]
    pub fn weight(&self, out: usize, inp: usize, tap: usize) -> f64 {
        self.weights[(out * self.in_ch + inp) * self.width + tap]
    }

    fn validate(&self, index: usize) -> Result<()> {
        if self.width % 2 == 0 {
            return Err(Error::Schema(format!("layer {index}: width {} is even", self.width)));
        }
        if self.weights.len() != self.out_ch * self.in_ch * self.width {
            return Err(Error::Schema(format!(
                "layer {index}: expected {} weights, found {}",
                self.out_ch * self.in_ch * self.width,
                self.weights.len()
            )));
        }
        if self.bias.len() != self.out_ch {
            return Err(Error::Schema(format!(
                "layer {index}: expected {} biases, found {}",
                self.out_ch,
                self.bias.len()
            )));
        }
        if self.weights.iter().chain(&self.bias).any(|w| !w.is_finite()) {
            return Err(Error::Schema(format!("layer {index}: non-finite parameter")));
        }
        let p = self.activation.param();
        if !p.is_finite() {
            return Err(Error::Schema(format!("layer {index}: non-finite activation parameter")));
        }
        if matches!(self.activation, Activation::Softplus(b) if b <= 0.0) {
            return Err(Error::Schema(format!("layer {index}: softplus beta must be positive")));
        }
        Ok(())
    }

    /// Channel-major input of length `len`, channel-major output of length
    /// `len - width + 1`.
    fn forward(&self, input: &[f64], len: usize, out: &mut Vec<f64>) {
        let out_len = len + 1 - self.width;
        out.clear();
        out.resize(self.out_ch * out_len, 0.0);
        for o in 0..self.out_ch {
            let dst = &mut out[o * out_len..(o + 1) * out_len];
            dst.fill(self.bias[o]);
            for c in 0..self.in_ch {
                let src = &input[c * len..(c + 1) * len];
                for t in 0..self.width {
                    let w = self.weight(o, c, t);
                    if w == 0.0 {
                        continue;
                    }
                    for (d, s) in dst.iter_mut().zip(&src[t..t + out_len]) {
                        *d += w * s;
                    }
                }
            }
            for d in dst.iter_mut() {
                *d = self.activation.apply(*d);
            }
        }
    }
}

/// Channel counts and kernel widths of a network, without parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchSpec {
    pub tag: ArchTag,
    /// `(out_channels, width)` per layer; the last layer must output 4.
    pub layers: Vec<(usize, usize)>,
}

impl ArchSpec {
    pub fn default_for(tag: ArchTag) -> Self {
        let layers = match tag {
            ArchTag::A => vec![(8, 3), (4, 1)],
            ArchTag::B => vec![(16, 3), (4, 3)],
            ArchTag::C => vec![(16, 3), (16, 1), (4, 1)],
        };
        Self { tag, layers }
    }

    pub fn half_width(&self) -> usize {
        self.layers.iter().map(|&(_, w)| (w - 1) / 2).sum()
    }
}

/// Stack of convolution layers mapping 4 characteristic channels to 4
/// multiplier channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnnModel {
    pub format_version: u32,
    pub arch_tag: ArchTag,
    /// Half-width of the receptive field `2k + 1`.
    pub k: usize,
    pub layers: Vec<ConvLayer>,
}

impl CnnModel {
    pub fn new(arch_tag: ArchTag, layers: Vec<ConvLayer>) -> Result<Self> {
        let k = layers.iter().map(|l| l.width.saturating_sub(1) / 2).sum();
        let model = Self {
            format_version: FORMAT_VERSION,
            arch_tag,
            k,
            layers,
        };
        model.validate()?;
        Ok(model)
    }

    /// All weights and biases zero, so the output is the constant
    /// `softplus(0) = ln 2 / beta`.
    pub fn zeros(arch: &ArchSpec) -> Result<Self> {
        Self::from_arch(arch, |_| 0.0)
    }

    /// Weights and biases drawn uniformly from `[-scale, scale]`.
    pub fn random<R: Rng + ?Sized>(arch: &ArchSpec, rng: &mut R, scale: f64) -> Result<Self> {
        Self::from_arch(arch, |_| rng.random_range(-scale..=scale))
    }

    fn from_arch(arch: &ArchSpec, mut init: impl FnMut(usize) -> f64) -> Result<Self> {
        let mut in_ch = CHANNELS;
        let n = arch.layers.len();
        let mut layers = Vec::with_capacity(n);
        for (idx, &(out_ch, width)) in arch.layers.iter().enumerate() {
            let act = if idx + 1 == n {
                Activation::Softplus(1.0)
            } else {
                Activation::Elu(1.0)
            };
            let mut layer = ConvLayer::zeros(in_ch, out_ch, width, act);
            for (j, w) in layer.weights.iter_mut().chain(layer.bias.iter_mut()).enumerate() {
                *w = init(j);
            }
            layers.push(layer);
            in_ch = out_ch;
        }
        Self::new(arch.tag, layers)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Schema(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let (first, last) = match (self.layers.first(), self.layers.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::Schema("model has no layers".into())),
        };
        if first.in_ch != CHANNELS {
            return Err(Error::ChannelMismatch(format!(
                "first layer takes {} channels, expected {CHANNELS}",
                first.in_ch
            )));
        }
        if last.out_ch != CHANNELS {
            return Err(Error::ChannelMismatch(format!(
                "last layer produces {} channels, expected {CHANNELS}",
                last.out_ch
            )));
        }
        for (idx, pair) in self.layers.windows(2).enumerate() {
            if pair[0].out_ch != pair[1].in_ch {
                return Err(Error::ChannelMismatch(format!(
                    "layer {idx} produces {} channels but layer {} takes {}",
                    pair[0].out_ch,
                    idx + 1,
                    pair[1].in_ch
                )));
            }
        }
        for (idx, layer) in self.layers.iter().enumerate() {
            layer.validate(idx)?;
        }
        if !last.activation.is_lower_bounded() {
            return Err(Error::Schema("last layer must use a softplus activation".into()));
        }
        let k: usize = self.layers.iter().map(|l| (l.width - 1) / 2).sum();
        if k != self.k {
            return Err(Error::Schema(format!(
                "declared k = {} but layers give a receptive field of {}",
                self.k,
                2 * k + 1
            )));
        }
        Ok(())
    }

    pub fn receptive_field(&self) -> usize {
        2 * self.k + 1
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: CnnModel =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    /// Canonical serialization: pretty JSON with shortest round-trip floats.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Evaluate on a padded request; output has the request's interior length.
    pub fn forward(&self, request: &MultiplierRequest) -> Result<[MultiplierField; CHANNELS]> {
        if request.k != self.k {
            return Err(Error::ShapeMismatch(format!(
                "request padded by {} but model needs {}",
                request.k, self.k
            )));
        }
        let mut out = Vec::new();
        self.forward_into(&request.values, &mut out, &mut ForwardScratch::default())?;
        Ok(std::array::from_fn(|c| {
            MultiplierField::new(out.iter().map(|v| v[c]).collect())
        }))
    }

    /// Evaluate on `input` (position-major, 4 channels); writes
    /// `input.len() - 2k` outputs.
    pub fn forward_into(
        &self,
        input: &[[f64; CHANNELS]],
        out: &mut Vec<[f64; CHANNELS]>,
        scratch: &mut ForwardScratch,
    ) -> Result<()> {
        let n = input.len();
        if n < 2 * self.k + 1 {
            return Err(Error::ShapeMismatch(format!(
                "input of length {n} is shorter than the receptive field {}",
                self.receptive_field()
            )));
        }
        let ForwardScratch { a, b } = scratch;
        a.clear();
        a.resize(CHANNELS * n, 0.0);
        for (p, v) in input.iter().enumerate() {
            for c in 0..CHANNELS {
                a[c * n + p] = v[c];
            }
        }
        let mut len = n;
        for layer in &self.layers {
            layer.forward(a, len, b);
            len = len + 1 - layer.width;
            std::mem::swap(a, b);
        }
        out.clear();
        out.extend((0..len).map(|p| std::array::from_fn(|c| a[c * len + p])));
        Ok(())
    }
}

#[derive(Debug, Default)]
pub struct ForwardScratch {
    a: Vec<f64>,
    b: Vec<f64>,
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<CnnModel> {
    let text = fs::read_to_string(path)?;
    CnnModel::from_json(&text)
}

/// A line of split characteristic fluxes, padded by `k` on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierRequest {
    pub k: usize,
    pub values: Vec<[f64; CHANNELS]>,
}

impl MultiplierRequest {
    /// Wrap values that already carry `k` cells of context per side.
    pub fn padded(values: Vec<[f64; CHANNELS]>, k: usize) -> Result<Self> {
        if values.len() < 2 * k + 1 {
            return Err(Error::ShapeMismatch(format!(
                "{} values cannot carry {k} padding cells per side",
                values.len()
            )));
        }
        Ok(Self { k, values })
    }

    /// Pad an unpadded line by replicating its edge values.
    pub fn replicate_edges(line: &[[f64; CHANNELS]], k: usize) -> Result<Self> {
        let (first, last) = match (line.first(), line.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => return Err(Error::ShapeMismatch("empty line".into())),
        };
        let mut values = Vec::with_capacity(line.len() + 2 * k);
        values.extend(std::iter::repeat_n(first, k));
        values.extend_from_slice(line);
        values.extend(std::iter::repeat_n(last, k));
        Ok(Self { k, values })
    }

    pub fn interior_len(&self) -> usize {
        self.values.len() - 2 * self.k
    }
}

/// Multipliers for every line of one sweep direction and split sign.
///
/// Entry `[line][field]` covers line positions `g - 2 ..= g + n + 1` of the
/// ghost-padded line (`g` ghost cells, `n` interior cells), i.e. every
/// substencil center used by the interfaces of that line; use
/// [`multiplier_offset`] to map a padded line position to an index.
pub fn multipliers_for_direction(
    grid: &FieldGrid,
    axis: Axis,
    sign: SplitSign,
    model: &CnnModel,
    gas: &GasModel,
    alpha: f64,
) -> Result<Vec<[MultiplierField; CHANNELS]>> {
    let g = grid.ghost();
    if g < 3 + model.k.saturating_sub(1) {
        return Err(Error::ShapeMismatch(format!(
            "{g} ghost cells cannot feed a receptive field of {}",
            model.receptive_field()
        )));
    }
    let lines = match axis {
        Axis::X => grid.ny(),
        Axis::Y => grid.nx(),
    };
    let mut out = Vec::with_capacity(lines);
    let mut line = Vec::new();
    for l in 0..lines {
        grid.gather_line(axis, l, &mut line);
        let (plus, minus) = characteristic_split_line(&line, gas.gamma, alpha)?;
        let split = match sign {
            SplitSign::Plus => plus,
            SplitSign::Minus => minus,
        };
        let lo = multiplier_offset(g, model.k);
        let hi = line.len() - lo;
        let request = MultiplierRequest::padded(split[lo - model.k..hi + model.k].to_vec(), model.k)?;
        out.push(model.forward(&request)?);
    }
    Ok(out)
}

/// Padded-line position of the first multiplier a sweep needs.
pub fn multiplier_offset(ghost: usize, _k: usize) -> usize {
    ghost - 2
}
