//! Evaluation of a [`SweepSpec`] into a [`CurveTable`].

use rayon::prelude::*;

use super::spec::{Field, GridPoint, Metric, SpecError, SweepSpec};
use super::table::{CurveTable, Meta, Missing};
use crate::channel::{qam16_gray_ber, Channel, EvalPolicy};
use crate::error::{Error, Result};

pub(crate) type Cell = std::result::Result<f64, String>;

fn metric_values(ch: &Channel, point: &GridPoint, metric: &Metric) -> Vec<Result<f64>> {
    let need = |f: Field| {
        point
            .get(f)
            .ok_or_else(|| Error::invalid("sweep", format!("{} not set", f.name())))
    };
    match metric {
        Metric::Pdf => vec![need(Field::Gamma).and_then(|g| ch.pdf(g))],
        Metric::Cdf => vec![need(Field::Gamma).and_then(|g| ch.cdf(g))],
        Metric::Pout => vec![need(Field::GammaTh).and_then(|g| ch.outage_probability(g))],
        Metric::PoutBounds => match need(Field::GammaTh).and_then(|g| ch.outage_bounds(g)) {
            Ok(b) => vec![Ok(b.lower), Ok(b.exact), Ok(b.upper)],
            Err(e) => vec![Err(e.clone()), Err(e.clone()), Err(e)],
        },
        Metric::Moment(k) => vec![ch.moment(*k)],
        Metric::Aof => vec![ch.amount_of_fading()],
        Metric::Cqei => vec![ch.cqei()],
        Metric::Ber => vec![ch.average_error_rate(&qam16_gray_ber)],
        Metric::QrCurve => vec![
            need(Field::GammaTh).and_then(|g| ch.outage_probability(g)),
            ch.average_error_rate(&qam16_gray_ber),
        ],
    }
}

pub(crate) fn evaluate_point(point: &GridPoint, metrics: &[Metric], policy: &EvalPolicy, width: usize) -> Vec<Cell> {
    let channel = point.params().and_then(|p| Channel::new(p, *policy));
    match channel {
        Err(e) => vec![Err(e.to_string()); width],
        Ok(ch) => metrics
            .iter()
            .flat_map(|m| metric_values(&ch, point, m))
            .map(|r| r.map_err(|e| e.to_string()))
            .collect(),
    }
}

/// Evaluates every grid point of `spec` on the current rayon pool.
///
/// Failures at single points become missing cells with their reason.
pub fn run_sweep(spec: &SweepSpec, policy: &EvalPolicy, meta: Meta) -> std::result::Result<CurveTable, SpecError> {
    spec.validate()?;
    let grid = spec.grid();
    let metric_columns: Vec<String> = spec.metrics.iter().flat_map(Metric::columns).collect();
    let width = metric_columns.len();
    let cells: Vec<Vec<Cell>> = grid
        .par_iter()
        .map(|p| evaluate_point(p, &spec.metrics, policy, width))
        .collect();

    let mut table = CurveTable::new(meta);
    for (i, label) in spec.axis_labels().into_iter().enumerate() {
        table.push_column(label, grid.iter().map(|p| Some(p.display[i])).collect());
    }
    for (j, name) in metric_columns.iter().enumerate() {
        let mut values = Vec::with_capacity(grid.len());
        for (row, c) in cells.iter().enumerate() {
            match &c[j] {
                Ok(v) => values.push(Some(*v)),
                Err(reason) => {
                    values.push(None);
                    table.missing.push(Missing {
                        row,
                        column: name.clone(),
                        reason: reason.clone(),
                    });
                }
            }
        }
        table.push_column(name.clone(), values);
    }
    table.missing.sort_by_key(|m| m.row);
    Ok(table)
}
