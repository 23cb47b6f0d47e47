//! Data behind the named figures `fig2` to `fig7`.
//!
//! Each figure has a fixed parameter set. Some values are defaults chosen
//! here and can be replaced with `--override field=value[,value...]`;
//! `fig3` has no default m_X family and therefore requires
//! `--override m_x=...`.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{Axis, Field, FieldRef, GridPoint, Metric, Scale, SpecError};
use super::sweep::{evaluate_point, Cell};
use super::table::{CurveTable, Meta, Missing};
use super::CliError;
use crate::channel::{db_to_linear, linear_to_db, EvalPolicy};
use crate::mcsim::{estimate_outage, sample_snr, SamplerConfig};

/// Figures that can be reproduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    /// Outage probability with its bounds and a Monte-Carlo column, versus γ̄.
    Fig2,
    /// Outage probability versus α for two m_Y values; needs m_x overrides.
    Fig3,
    /// Outage probability versus Ω_X for small and large m_X.
    Fig4,
    /// Outage probability against CQEI, parametric in γ̄.
    Fig5,
    /// Amount-of-fading map over (m_X, m_Y) with the AoF = 1 contour flagged.
    Fig6,
    /// Joint quality-reliability curves for QAM-16.
    Fig7,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }
}

/// Knobs of [`reproduce_figure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    pub overrides: Vec<String>,
    /// Samples per Monte-Carlo batch of `fig2`; 0 disables the column.
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            overrides: Vec::new(),
            mc_samples: 1_000_000,
            seed: 1,
        }
    }
}

/// Parsed `--override` values in linear units, with usage tracking.
struct Overrides {
    figure: &'static str,
    values: BTreeMap<Field, (String, Vec<f64>)>,
    used: RefCell<BTreeSet<Field>>,
}

impl Overrides {
    fn parse(figure: &'static str, raw: &[String]) -> Result<Self, SpecError> {
        let mut values = BTreeMap::new();
        for item in raw {
            let (name, list) = item.split_once('=').ok_or_else(|| SpecError {
                field: item.clone(),
                reason: "expected field=value[,value...]".into(),
            })?;
            let field: FieldRef = name.trim().parse()?;
            let parsed = list
                .split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| SpecError {
                        field: field.label(),
                        reason: format!("`{v}` is not a number"),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let linear = parsed.into_iter().map(|v| field.to_linear(v)).collect();
            if values.insert(field.field, (field.label(), linear)).is_some() {
                return Err(SpecError {
                    field: field.label(),
                    reason: "overridden more than once".into(),
                });
            }
        }
        Ok(Overrides {
            figure,
            values,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    fn list(&self, field: Field, default: &[f64]) -> Vec<f64> {
        self.used.borrow_mut().insert(field);
        self.values
            .get(&field)
            .map_or_else(|| default.to_vec(), |(_, v)| v.clone())
    }

    fn required_list(&self, field: Field, why: &str) -> Result<Vec<f64>, SpecError> {
        self.used.borrow_mut().insert(field);
        self.values.get(&field).map(|(_, v)| v.clone()).ok_or_else(|| SpecError {
            field: field.name().into(),
            reason: format!("{} needs --override {}=v1[,v2...]: {why}", self.figure, field.name()),
        })
    }

    fn scalar(&self, field: Field, default: f64) -> Result<f64, SpecError> {
        let v = self.list(field, &[default]);
        if v.len() != 1 {
            return Err(SpecError {
                field: field.name().into(),
                reason: format!("{} takes a single value for this field", self.figure),
            });
        }
        Ok(v[0])
    }

    fn finish(self) -> Result<(), SpecError> {
        let used = self.used.into_inner();
        match self.values.iter().find(|(f, _)| !used.contains(f)) {
            Some((_, (label, _))) => Err(SpecError {
                field: label.clone(),
                reason: format!("not adjustable in {}", self.figure),
            }),
            None => Ok(()),
        }
    }
}

/// Compact label for a number inside a column name.
fn short(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

struct Family {
    label: String,
    values: Vec<(Field, f64)>,
}

/// Evaluates `metrics` along `axis` for every family; columns are grouped by family.
fn family_table(
    axis: &Axis,
    base: &[(Field, f64)],
    families: &[Family],
    metrics: &[Metric],
    policy: &EvalPolicy,
    meta: Meta,
) -> CurveTable {
    let xs = axis.display_values();
    let names: Vec<String> = metrics.iter().flat_map(Metric::columns).collect();
    let width = names.len();
    let jobs: Vec<(usize, usize)> = (0..families.len())
        .flat_map(|f| (0..xs.len()).map(move |r| (f, r)))
        .collect();
    let cells: Vec<Vec<Cell>> = jobs
        .par_iter()
        .map(|&(f, r)| {
            let mut values: BTreeMap<Field, f64> = base.iter().copied().collect();
            values.extend(families[f].values.iter().copied());
            values.insert(axis.field.field, axis.to_linear(xs[r]));
            let point = GridPoint {
                display: vec![xs[r]],
                values,
            };
            evaluate_point(&point, metrics, policy, width)
        })
        .collect();

    let mut table = CurveTable::new(meta);
    table.push_column(axis.label(), xs.iter().map(|&x| Some(x)).collect());
    for (f, family) in families.iter().enumerate() {
        for (j, name) in names.iter().enumerate() {
            let column = format!("{name}_{}", family.label);
            let mut values = Vec::with_capacity(xs.len());
            for r in 0..xs.len() {
                match &cells[f * xs.len() + r][j] {
                    Ok(v) => values.push(Some(*v)),
                    Err(reason) => {
                        values.push(None);
                        table.missing.push(Missing {
                            row: r,
                            column: column.clone(),
                            reason: reason.clone(),
                        });
                    }
                }
            }
            table.push_column(column, values);
        }
    }
    table.missing.sort_by_key(|m| m.row);
    table
}

fn db_axis(field: Field, start: f64, stop: f64, count: usize) -> Axis {
    Axis {
        field: FieldRef { field, db: false },
        start,
        stop,
        count,
        scale: Scale::Db,
    }
}

/// Builds the data table of a figure.
///
/// `command` is recorded verbatim in the table's meta block.
pub fn reproduce_figure(
    id: FigureId,
    options: &FigureOptions,
    policy: &EvalPolicy,
    command: serde_json::Value,
) -> Result<CurveTable, CliError> {
    let ov = Overrides::parse(id.name(), &options.overrides)?;
    let table = match id {
        FigureId::Fig2 => fig2(&ov, options, policy, command)?,
        FigureId::Fig3 => fig3(&ov, policy, command)?,
        FigureId::Fig4 => fig4(&ov, policy, command)?,
        FigureId::Fig5 => fig5(&ov, policy, command)?,
        FigureId::Fig6 => fig6(&ov, policy, command)?,
        FigureId::Fig7 => fig7(&ov, policy, command)?,
    };
    ov.finish()?;
    Ok(table)
}

fn resolved(base: &[(Field, f64)], families: &[Family], axis: &Axis) -> serde_json::Value {
    let base: BTreeMap<&str, f64> = base.iter().map(|(f, v)| (f.name(), *v)).collect();
    let families: Vec<serde_json::Value> = families
        .iter()
        .map(|fam| {
            let vals: BTreeMap<&str, f64> = fam.values.iter().map(|(f, v)| (f.name(), *v)).collect();
            serde_json::json!({ "label": fam.label, "values": vals })
        })
        .collect();
    serde_json::json!({ "fixed": base, "families": families, "axis": axis })
}

fn fig2(
    ov: &Overrides,
    options: &FigureOptions,
    policy: &EvalPolicy,
    command: serde_json::Value,
) -> Result<CurveTable, CliError> {
    let base = vec![
        (Field::MX, ov.scalar(Field::MX, 1.5)?),
        (Field::MY, ov.scalar(Field::MY, 2.5)?),
        (Field::OmegaX, ov.scalar(Field::OmegaX, db_to_linear(5.0))?),
        (Field::OmegaY, ov.scalar(Field::OmegaY, db_to_linear(-5.0))?),
        (Field::GammaTh, ov.scalar(Field::GammaTh, db_to_linear(3.0))?),
    ];
    let alphas = ov.list(Field::Alpha, &[2.0, 3.0, 4.0]);
    let families: Vec<Family> = alphas
        .iter()
        .map(|&a| Family {
            label: format!("a{}", short(a)),
            values: vec![(Field::Alpha, a)],
        })
        .collect();
    let axis = db_axis(Field::GammaBar, -10.0, 30.0, 17);
    let mc = options.mc_samples > 0;
    let meta = Meta::new(command, resolved(&base, &families, &axis), mc.then_some(options.seed));
    let mut table = family_table(&axis, &base, &families, &[Metric::PoutBounds], policy, meta);
    if !mc {
        return Ok(table);
    }

    // One batch per α at γ̄ = 1; the batch for mean SNR γ̄ is that batch scaled by γ̄.
    let get = |f: Field| base.iter().find(|(g, _)| *g == f).map(|(_, v)| *v).unwrap_or(f64::NAN);
    let gamma_th = get(Field::GammaTh);
    let xs = axis.display_values();
    for (stream, fam) in families.iter().enumerate() {
        let params = crate::channel::ChannelParams::new(
            get(Field::MX),
            get(Field::MY),
            get(Field::OmegaX),
            get(Field::OmegaY),
            fam.values[0].1,
            1.0,
        )?;
        let config = SamplerConfig::new(params, options.mc_samples, options.seed, stream as u64)?;
        let batch = sample_snr(&config)?;
        let mut est = Vec::with_capacity(xs.len());
        let mut se = Vec::with_capacity(xs.len());
        for &x in &xs {
            let e = estimate_outage(&batch, gamma_th / db_to_linear(x))?;
            est.push(Some(e.estimate));
            se.push(Some(e.stderr));
        }
        table.push_column(format!("pout_mc_{}", fam.label), est);
        table.push_column(format!("pout_mc_stderr_{}", fam.label), se);
    }
    Ok(table)
}

fn fig3(ov: &Overrides, policy: &EvalPolicy, command: serde_json::Value) -> Result<CurveTable, CliError> {
    let m_xs = ov.required_list(Field::MX, "the figure legend does not state the m_X values")?;
    let m_ys = ov.list(Field::MY, &[2.5, 0.5]);
    let base = vec![
        (Field::OmegaX, ov.scalar(Field::OmegaX, db_to_linear(5.0))?),
        (Field::OmegaY, ov.scalar(Field::OmegaY, db_to_linear(-5.0))?),
        (Field::GammaBar, ov.scalar(Field::GammaBar, db_to_linear(10.0))?),
        (Field::GammaTh, ov.scalar(Field::GammaTh, db_to_linear(3.0))?),
    ];
    let families: Vec<Family> = m_ys
        .iter()
        .flat_map(|&my| {
            m_xs.iter().map(move |&mx| Family {
                label: format!("mx{}_my{}", short(mx), short(my)),
                values: vec![(Field::MX, mx), (Field::MY, my)],
            })
        })
        .collect();
    let axis = Axis {
        field: FieldRef {
            field: Field::Alpha,
            db: false,
        },
        start: 1.0,
        stop: 6.0,
        count: 51,
        scale: Scale::Linear,
    };
    let meta = Meta::new(command, resolved(&base, &families, &axis), None);
    Ok(family_table(&axis, &base, &families, &[Metric::Pout], policy, meta))
}

fn fig4(ov: &Overrides, policy: &EvalPolicy, command: serde_json::Value) -> Result<CurveTable, CliError> {
    let m_xs = ov.list(Field::MX, &[0.2, 2.2]);
    let m_ys = ov.list(Field::MY, &[0.5]);
    // Ω_Y defaults to -5 dB, the value used by fig2 and fig3.
    let base = vec![
        (Field::OmegaY, ov.scalar(Field::OmegaY, db_to_linear(-5.0))?),
        (Field::Alpha, ov.scalar(Field::Alpha, 3.5)?),
        (Field::GammaBar, ov.scalar(Field::GammaBar, db_to_linear(10.0))?),
        (Field::GammaTh, ov.scalar(Field::GammaTh, db_to_linear(3.0))?),
    ];
    let families: Vec<Family> = m_ys
        .iter()
        .flat_map(|&my| {
            m_xs.iter().map(move |&mx| Family {
                label: format!("mx{}_my{}", short(mx), short(my)),
                values: vec![(Field::MX, mx), (Field::MY, my)],
            })
        })
        .collect();
    let axis = db_axis(Field::OmegaX, -5.0, 10.0, 31);
    let meta = Meta::new(command, resolved(&base, &families, &axis), None);
    Ok(family_table(&axis, &base, &families, &[Metric::Pout], policy, meta))
}

fn fig5(ov: &Overrides, policy: &EvalPolicy, command: serde_json::Value) -> Result<CurveTable, CliError> {
    let alphas = ov.list(Field::Alpha, &[1.4, 2.0, 2.5, 3.0]);
    let base = vec![(Field::GammaTh, ov.scalar(Field::GammaTh, db_to_linear(10.0))?)];
    let configs = [("m0.5_o0db", 0.5, 0.0), ("m3_o5db", 3.0, 5.0)];
    let mut families = Vec::new();
    for (name, m, omega_db) in configs {
        for &a in &alphas {
            let omega = db_to_linear(omega_db);
            families.push(Family {
                label: format!("{name}_a{}", short(a)),
                values: vec![
                    (Field::MX, m),
                    (Field::MY, m),
                    (Field::OmegaX, omega),
                    (Field::OmegaY, omega),
                    (Field::Alpha, a),
                ],
            });
        }
    }
    let axis = db_axis(Field::GammaBar, 0.0, 40.0, 41);
    let meta = Meta::new(command, resolved(&base, &families, &axis), None);
    Ok(family_table(&axis, &base, &families, &[Metric::Cqei, Metric::Pout], policy, meta))
}

fn fig6(ov: &Overrides, policy: &EvalPolicy, command: serde_json::Value) -> Result<CurveTable, CliError> {
    let alpha = ov.scalar(Field::Alpha, 4.0)?;
    let omega_x = ov.scalar(Field::OmegaX, db_to_linear(5.0))?;
    let omega_y = ov.scalar(Field::OmegaY, db_to_linear(5.0))?;
    let m_ys = ov.list(Field::MY, &[0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0]);
    let default_m_x: Vec<f64> = (1..=60).map(|i| 0.05 * i as f64).collect();
    let m_xs = ov.list(Field::MX, &default_m_x);

    let rows: Vec<(f64, f64)> = m_ys
        .iter()
        .flat_map(|&my| m_xs.iter().map(move |&mx| (mx, my)))
        .collect();
    let cells: Vec<Cell> = rows
        .par_iter()
        .map(|&(mx, my)| {
            let values = BTreeMap::from([
                (Field::MX, mx),
                (Field::MY, my),
                (Field::OmegaX, omega_x),
                (Field::OmegaY, omega_y),
                (Field::Alpha, alpha),
                (Field::GammaBar, 1.0),
            ]);
            let point = GridPoint {
                display: vec![],
                values,
            };
            evaluate_point(&point, &[Metric::Aof], policy, 1).remove(0)
        })
        .collect();

    let resolved = serde_json::json!({
        "alpha": alpha, "omega_x": omega_x, "omega_y": omega_y, "m_x": m_xs, "m_y": m_ys,
    });
    let mut table = CurveTable::new(Meta::new(command, resolved, None));
    let aof: Vec<Option<f64>> = cells.iter().map(|c| c.as_ref().ok().copied()).collect();
    for (row, c) in cells.iter().enumerate() {
        if let Err(reason) = c {
            table.missing.push(Missing {
                row,
                column: "aof".into(),
                reason: reason.clone(),
            });
        }
    }
    // A cell is on the contour when AoF - 1 changes sign between it and its
    // successor in m_X.
    let n = m_xs.len();
    let on_contour: Vec<Option<f64>> = (0..rows.len())
        .map(|i| {
            let here = aof[i]? - 1.0;
            if here == 0.0 {
                return Some(1.0);
            }
            if i % n + 1 == n {
                return Some(0.0);
            }
            let next = aof[i + 1]? - 1.0;
            Some(if here.signum() != next.signum() { 1.0 } else { 0.0 })
        })
        .collect();
    table.push_column("m_x", rows.iter().map(|r| Some(r.0)).collect());
    table.push_column("m_y", rows.iter().map(|r| Some(r.1)).collect());
    table.push_column("aof", aof.clone());
    table.push_column("aof_minus_one", aof.iter().map(|a| a.map(|v| v - 1.0)).collect());
    table.push_column(
        "hyper_rayleigh",
        aof.iter().map(|a| a.map(|v| if v > 1.0 { 1.0 } else { 0.0 })).collect(),
    );
    table.push_column("on_contour", on_contour);
    Ok(table)
}

fn fig7(ov: &Overrides, policy: &EvalPolicy, command: serde_json::Value) -> Result<CurveTable, CliError> {
    // m_X = m_Y = 1 is a default; Ω and γ_th are fixed.
    let base = vec![
        (Field::MX, ov.scalar(Field::MX, 1.0)?),
        (Field::MY, ov.scalar(Field::MY, 1.0)?),
        (Field::OmegaX, ov.scalar(Field::OmegaX, db_to_linear(-5.0))?),
        (Field::OmegaY, ov.scalar(Field::OmegaY, db_to_linear(-5.0))?),
    ];
    let alphas = ov.list(Field::Alpha, &[2.0, 3.0, 4.0]);
    let thresholds = ov.list(Field::GammaTh, &[db_to_linear(-10.0), db_to_linear(10.0)]);
    let mut families = Vec::new();
    for &th in &thresholds {
        for &a in &alphas {
            families.push(Family {
                label: format!("a{}_th{}db", short(a), short(linear_to_db(th))),
                values: vec![(Field::Alpha, a), (Field::GammaTh, th)],
            });
        }
    }
    let axis = db_axis(Field::GammaBar, -10.0, 40.0, 21);
    let meta = Meta::new(command, resolved(&base, &families, &axis), None);
    Ok(family_table(&axis, &base, &families, &[Metric::QrCurve], policy, meta))
}
