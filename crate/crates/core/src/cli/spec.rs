//! Sweep specifications: fixed fields, swept axes and requested metrics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, ChannelParams};

/// A problem with a sweep specification, naming the offending field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {reason}")]
pub struct SpecError {
    pub field: String,
    pub reason: String,
}

fn spec_err(field: impl Into<String>, reason: impl Into<String>) -> SpecError {
    SpecError {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Quantities a sweep can fix or vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    MX,
    MY,
    OmegaX,
    OmegaY,
    Alpha,
    GammaBar,
    GammaTh,
    Gamma,
}

impl Field {
    pub const ALL: [Field; 8] = [
        Field::MX,
        Field::MY,
        Field::OmegaX,
        Field::OmegaY,
        Field::Alpha,
        Field::GammaBar,
        Field::GammaTh,
        Field::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::MX => "m_x",
            Field::MY => "m_y",
            Field::OmegaX => "omega_x",
            Field::OmegaY => "omega_y",
            Field::Alpha => "alpha",
            Field::GammaBar => "gamma_bar",
            Field::GammaTh => "gamma_th",
            Field::Gamma => "gamma",
        }
    }

    /// Whether the quantity is a power or SNR that may be given in dB.
    pub fn accepts_db(self) -> bool {
        matches!(
            self,
            Field::OmegaX | Field::OmegaY | Field::GammaBar | Field::GammaTh | Field::Gamma
        )
    }
}

/// A field name as written by the user, e.g. `omega_x_db`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRef {
    pub field: Field,
    pub db: bool,
}

impl FieldRef {
    pub fn label(&self) -> String {
        if self.db {
            format!("{}_db", self.field.name())
        } else {
            self.field.name().to_string()
        }
    }

    /// Converts a user value in this field's units to linear scale.
    pub fn to_linear(&self, v: f64) -> f64 {
        if self.db {
            db_to_linear(v)
        } else {
            v
        }
    }
}

impl FromStr for FieldRef {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let (base, db) = match s.strip_suffix("_db") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let field = Field::ALL
            .into_iter()
            .find(|f| f.name() == base)
            .ok_or_else(|| {
                let known: Vec<&str> = Field::ALL.iter().map(|f| f.name()).collect();
                spec_err(s, format!("unknown field; expected one of {}", known.join(", ")))
            })?;
        if db && !field.accepts_db() {
            return Err(spec_err(s, "this field has no dB form"));
        }
        Ok(FieldRef { field, db })
    }
}

impl fmt::Display for FieldRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Spacing of a swept axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Evenly spaced values.
    Linear,
    /// Geometrically spaced values; start and stop must be positive.
    Log,
    /// Evenly spaced in dB, converted to linear scale for evaluation.
    Db,
}

impl FromStr for Scale {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            "db" => Ok(Scale::Db),
            _ => Err(spec_err("scale", format!("`{s}` is not one of linear, log, db"))),
        }
    }
}

/// One swept dimension, written `name:start:stop:count:scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub field: FieldRef,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Axis {
    /// Column label of the axis values, in the units they were given in.
    pub fn label(&self) -> String {
        if self.scale == Scale::Db {
            format!("{}_db", self.field.field.name())
        } else {
            self.field.label()
        }
    }

    /// Axis values in the units they were given in.
    pub fn display_values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if i == n - 1 {
                    return self.stop;
                }
                match self.scale {
                    Scale::Linear | Scale::Db => self.start + (self.stop - self.start) * t,
                    Scale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }

    /// Converts a displayed value to the linear value used in evaluation.
    pub fn to_linear(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Db => db_to_linear(v),
            _ => self.field.to_linear(v),
        }
    }

    fn validate(&self) -> Result<(), SpecError> {
        let name = self.field.label();
        if self.count < 2 {
            return Err(spec_err(name, format!("count {} must be at least 2", self.count)));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(spec_err(name, "start and stop must be finite"));
        }
        match self.scale {
            Scale::Log if self.field.db => Err(spec_err(name, "log spacing of a dB field is ambiguous")),
            Scale::Log if !(self.start > 0.0 && self.stop > 0.0) => {
                Err(spec_err(name, "log spacing needs positive start and stop"))
            }
            Scale::Db if self.field.db => Err(spec_err(
                name,
                "the field is already in dB; use linear spacing or drop the _db suffix",
            )),
            Scale::Db if !self.field.field.accepts_db() => Err(spec_err(name, "this field has no dB form")),
            _ => Ok(()),
        }
    }
}

impl FromStr for Axis {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 5 {
            return Err(spec_err(
                s,
                "expected name:start:stop:count:scale, e.g. gamma_bar:-10:30:41:db",
            ));
        }
        let field: FieldRef = parts[0].parse()?;
        let num = |what: &str, v: &str| {
            v.parse::<f64>()
                .map_err(|_| spec_err(field.label(), format!("{what} `{v}` is not a number")))
        };
        let axis = Axis {
            field,
            start: num("start", parts[1])?,
            stop: num("stop", parts[2])?,
            count: parts[3]
                .parse()
                .map_err(|_| spec_err(field.label(), format!("count `{}` is not an integer", parts[3])))?,
            scale: parts[4].parse()?,
        };
        axis.validate()?;
        Ok(axis)
    }
}

/// A quantity reported per grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Pdf,
    Cdf,
    Pout,
    PoutBounds,
    Moment(f64),
    Aof,
    Cqei,
    /// Average QAM-16 bit-error rate.
    Ber,
    /// The (P_out, average BER) pair of the joint quality-reliability analysis.
    QrCurve,
}

impl Metric {
    /// Column names produced by this metric.
    pub fn columns(&self) -> Vec<String> {
        match self {
            Metric::Pdf => vec!["pdf".into()],
            Metric::Cdf => vec!["cdf".into()],
            Metric::Pout => vec!["pout".into()],
            Metric::PoutBounds => vec!["pout_lower".into(), "pout_exact".into(), "pout_upper".into()],
            Metric::Moment(k) => vec![format!("moment_{k}")],
            Metric::Aof => vec!["aof".into()],
            Metric::Cqei => vec!["cqei".into()],
            Metric::Ber => vec!["ber_qam16".into()],
            Metric::QrCurve => vec!["qr_pout".into(), "qr_ber".into()],
        }
    }

    /// The extra field the metric needs besides the channel parameters.
    pub fn needs(&self) -> Option<Field> {
        match self {
            Metric::Pdf | Metric::Cdf => Some(Field::Gamma),
            Metric::Pout | Metric::PoutBounds | Metric::QrCurve => Some(Field::GammaTh),
            _ => None,
        }
    }
}

impl FromStr for Metric {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let m = match s {
            "pdf" => Metric::Pdf,
            "cdf" => Metric::Cdf,
            "pout" => Metric::Pout,
            "pout_bounds" => Metric::PoutBounds,
            "aof" => Metric::Aof,
            "cqei" => Metric::Cqei,
            "ber" => Metric::Ber,
            "qr_curve" => Metric::QrCurve,
            _ => {
                let k = s
                    .strip_prefix("moment:")
                    .ok_or_else(|| {
                        spec_err(
                            "metric",
                            format!("`{s}` is not one of pdf, cdf, pout, pout_bounds, moment:k, aof, cqei, ber, qr_curve"),
                        )
                    })?
                    .parse::<f64>()
                    .map_err(|_| spec_err("metric", format!("`{s}`: moment order is not a number")))?;
                if !(k > 0.0 && k.is_finite()) {
                    return Err(spec_err("metric", format!("`{s}`: moment order must be positive")));
                }
                Metric::Moment(k)
            }
        };
        Ok(m)
    }
}

/// Parses `name=value`.
pub fn parse_assignment(s: &str) -> Result<(FieldRef, f64), SpecError> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| spec_err(s, "expected name=value"))?;
    let field: FieldRef = name.trim().parse()?;
    let v = value
        .trim()
        .parse::<f64>()
        .map_err(|_| spec_err(field.label(), format!("`{value}` is not a number")))?;
    if v.is_nan() {
        return Err(spec_err(field.label(), "value is NaN"));
    }
    Ok((field, v))
}

/// A grid over zero, one or two fields plus the metrics to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Fixed values keyed by field, in the units of the `FieldRef`.
    pub fixed: Vec<(FieldRef, f64)>,
    pub swept: Vec<Axis>,
    pub metrics: Vec<Metric>,
}

/// One grid point: linear values of every provided field.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub display: Vec<f64>,
    pub values: BTreeMap<Field, f64>,
}

impl GridPoint {
    pub fn params(&self) -> crate::Result<ChannelParams> {
        let get = |f: Field| self.values.get(&f).copied().unwrap_or(f64::NAN);
        ChannelParams::new(
            get(Field::MX),
            get(Field::MY),
            get(Field::OmegaX),
            get(Field::OmegaY),
            get(Field::Alpha),
            get(Field::GammaBar),
        )
    }

    pub fn get(&self, f: Field) -> Option<f64> {
        self.values.get(&f).copied()
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.swept.len() > 2 {
            return Err(spec_err("sweep", format!("{} swept fields given, at most 2 allowed", self.swept.len())));
        }
        if self.metrics.is_empty() {
            return Err(spec_err("metric", "at least one metric is required"));
        }
        let mut seen: BTreeMap<Field, String> = BTreeMap::new();
        let entries = self
            .fixed
            .iter()
            .map(|(f, _)| (f.field, f.label()))
            .chain(self.swept.iter().map(|a| (a.field.field, a.field.label())));
        for (field, label) in entries {
            if let Some(prev) = seen.insert(field, label.clone()) {
                return Err(spec_err(label, format!("given more than once (also as {prev})")));
            }
        }
        for required in [Field::MX, Field::MY, Field::OmegaX, Field::OmegaY, Field::Alpha, Field::GammaBar] {
            if !seen.contains_key(&required) {
                return Err(spec_err(required.name(), "missing; fix it with --set or sweep it"));
            }
        }
        for m in &self.metrics {
            if let Some(f) = m.needs() {
                if !seen.contains_key(&f) {
                    return Err(spec_err(
                        f.name(),
                        format!("required by metric {:?} but not given", m),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Column labels of the swept axes.
    pub fn axis_labels(&self) -> Vec<String> {
        self.swept.iter().map(Axis::label).collect()
    }

    /// Grid points in row-major order (first axis outermost).
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut base = BTreeMap::new();
        for (f, v) in &self.fixed {
            base.insert(f.field, f.to_linear(*v));
        }
        let mut points = vec![GridPoint {
            display: Vec::new(),
            values: base,
        }];
        for axis in &self.swept {
            let vals = axis.display_values();
            points = points
                .into_iter()
                .flat_map(|p| {
                    vals.iter()
                        .map(|&v| {
                            let mut q = p.clone();
                            q.display.push(v);
                            q.values.insert(axis.field.field, axis.to_linear(v));
                            q
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_axes() {
        let a: Axis = "gamma_bar:-10:30:5:db".parse().unwrap();
        assert_eq!(a.display_values(), vec![-10.0, 0.0, 10.0, 20.0, 30.0]);
        assert_eq!(a.label(), "gamma_bar_db");
        assert_eq!(a.to_linear(10.0), 10.0);
        let l: Axis = "m_x:0.1:10:3:log".parse().unwrap();
        let v = l.display_values();
        assert!((v[1] - 1.0).abs() < 1e-15);
        assert!("m_x:1:2:1:linear".parse::<Axis>().is_err());
        assert!("m_x:1:2:3:db".parse::<Axis>().is_err());
        assert!("omega_x_db:1:2:3:db".parse::<Axis>().is_err());
        let err = "bogus:1:2:3:linear".parse::<Axis>().unwrap_err();
        assert_eq!(err.field, "bogus");
    }

    #[test]
    fn parses_metrics() {
        assert_eq!("moment:2.5".parse::<Metric>().unwrap(), Metric::Moment(2.5));
        assert!("moment:-1".parse::<Metric>().is_err());
        assert!("entropy".parse::<Metric>().is_err());
        assert_eq!(Metric::PoutBounds.columns().len(), 3);
    }

    fn base() -> Vec<(FieldRef, f64)> {
        ["m_x=1", "m_y=2", "omega_x_db=0", "omega_y=0.5", "alpha=2"]
            .iter()
            .map(|s| parse_assignment(s).unwrap())
            .collect()
    }

    #[test]
    fn validation_names_the_field() {
        let spec = SweepSpec {
            fixed: base(),
            swept: vec![],
            metrics: vec![Metric::Aof],
        };
        assert_eq!(spec.validate().unwrap_err().field, "gamma_bar");
        let mut fixed = base();
        fixed.push(parse_assignment("gamma_bar_db=10").unwrap());
        let spec = SweepSpec {
            fixed: fixed.clone(),
            swept: vec!["omega_x:1:2:3:linear".parse().unwrap()],
            metrics: vec![Metric::Aof],
        };
        assert_eq!(spec.validate().unwrap_err().field, "omega_x");
        let spec = SweepSpec {
            fixed,
            swept: vec![],
            metrics: vec![Metric::Pout],
        };
        assert_eq!(spec.validate().unwrap_err().field, "gamma_th");
    }

    #[test]
    fn grid_is_row_major() {
        let mut fixed = base();
        fixed.retain(|(f, _)| f.field != Field::Alpha);
        let spec = SweepSpec {
            fixed,
            swept: vec![
                "alpha:1:2:2:linear".parse().unwrap(),
                "gamma_bar_db:0:10:3:linear".parse().unwrap(),
            ],
            metrics: vec![Metric::Aof],
        };
        spec.validate().unwrap();
        let g = spec.grid();
        assert_eq!(g.len(), 6);
        assert_eq!(g[1].display, vec![1.0, 5.0]);
        assert_eq!(g[3].display, vec![2.0, 0.0]);
        assert_eq!(g[2].get(Field::GammaBar), Some(10.0));
        assert_eq!(g[0].params().unwrap().omega_x, 1.0);
    }
}
