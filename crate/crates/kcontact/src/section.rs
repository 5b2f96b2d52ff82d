use crate::KContactError;
use indexmap::IndexMap;
use std::collections::BTreeMap;
use std::io::{Read, Write};

/// Uniform grid axis `start + j·step`, `j < len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    pub fn new(name: &str, start: f64, step: f64, len: usize) -> Axis {
        Axis {
            name: name.to_string(),
            start,
            step,
            len,
        }
    }

    pub fn point(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }
}

/// Values of every coordinate on a rectangular grid over one or two
/// independent variables, stored row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSection {
    axes: Vec<Axis>,
    values: IndexMap<String, Vec<f64>>,
    /// Parameter values used when evaluating expressions on the section.
    pub params: BTreeMap<String, f64>,
}

impl DiscreteSection {
    pub fn new(axes: Vec<Axis>, values: IndexMap<String, Vec<f64>>) -> Result<DiscreteSection, KContactError> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(KContactError::UnsupportedDimension(axes.len()));
        }
        let size: usize = axes.iter().map(|a| a.len).product();
        for (name, v) in &values {
            if v.len() != size {
                return Err(KContactError::ShapeMismatch {
                    coord: name.clone(),
                    expected: size,
                    found: v.len(),
                });
            }
        }
        Ok(DiscreteSection {
            axes,
            values,
            params: BTreeMap::new(),
        })
    }

    /// Samples `f(t) -> values of coords` at every node.
    pub fn from_fn(
        axes: Vec<Axis>,
        coords: &[&str],
        f: impl Fn(&[f64]) -> Vec<f64>,
    ) -> Result<DiscreteSection, KContactError> {
        let size: usize = axes.iter().map(|a| a.len).product();
        let mut values: IndexMap<String, Vec<f64>> =
            coords.iter().map(|c| (c.to_string(), Vec::with_capacity(size))).collect();
        let mut sec = DiscreteSection::new(axes, IndexMap::new())?;
        for flat in 0..size {
            let t = sec.point(flat);
            let row = f(&t);
            for (slot, v) in values.values_mut().zip(row) {
                slot.push(v);
            }
        }
        for (name, v) in values {
            sec.insert(&name, v)?;
        }
        Ok(sec)
    }

    pub fn with_params(mut self, params: &[(&str, f64)]) -> DiscreteSection {
        self.params.extend(params.iter().map(|(k, v)| (k.to_string(), *v)));
        self
    }

    pub fn insert(&mut self, coord: &str, v: Vec<f64>) -> Result<(), KContactError> {
        if v.len() != self.size() {
            return Err(KContactError::ShapeMismatch {
                coord: coord.to_string(),
                expected: self.size(),
                found: v.len(),
            });
        }
        self.values.insert(coord.to_string(), v);
        Ok(())
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn size(&self) -> usize {
        self.axes.iter().map(|a| a.len).product()
    }

    pub fn coordinates(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn values(&self, coord: &str) -> Option<&[f64]> {
        self.values.get(coord).map(Vec::as_slice)
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.axes).fold(0, |acc, (j, a)| acc * a.len + j)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        for (slot, a) in out.iter_mut().zip(&self.axes).rev() {
            *slot = flat % a.len;
            flat /= a.len;
        }
        out
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).iter().zip(&self.axes).map(|(j, a)| a.point(*j)).collect()
    }

    /// Nodes at least one step away from every boundary.
    pub fn interior(&self) -> Vec<usize> {
        self.inset(1)
    }

    /// Nodes at least `margin` steps away from every boundary.
    pub fn inset(&self, margin: usize) -> Vec<usize> {
        (0..self.size())
            .filter(|flat| {
                self.multi_index(*flat)
                    .iter()
                    .zip(&self.axes)
                    .all(|(j, a)| *j >= margin && *j + margin < a.len)
            })
            .collect()
    }

    /// Second-order derivative of `data` along axis `dim` at every node:
    /// centered inside, one-sided at the ends.
    pub fn derivative(&self, data: &[f64], dim: usize) -> Vec<f64> {
        let axis = &self.axes[dim];
        let h = axis.step;
        (0..self.size())
            .map(|flat| {
                let mut m = self.multi_index(flat);
                let j = m[dim];
                let mut at = |jj: usize| {
                    m[dim] = jj;
                    data[self.index(&m)]
                };
                if j == 0 {
                    (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
                } else if j + 1 == axis.len {
                    (3.0 * at(j) - 4.0 * at(j - 1) + at(j - 2)) / (2.0 * h)
                } else {
                    (at(j + 1) - at(j - 1)) / (2.0 * h)
                }
            })
            .collect()
    }

    pub fn check_grid(&self) -> Result<(), KContactError> {
        for a in &self.axes {
            if a.len < 3 {
                return Err(KContactError::GridTooSmall {
                    axis: a.name.clone(),
                    len: a.len,
                    need: 3,
                });
            }
        }
        Ok(())
    }

    /// CSV with header `t^1[,t^2],coord…`, one row per node.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), KContactError> {
        let mut out = csv::Writer::from_writer(w);
        let header: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).chain(self.coordinates()).collect();
        out.write_record(&header).map_err(csv_error)?;
        for flat in 0..self.size() {
            let row: Vec<String> = self
                .point(flat)
                .into_iter()
                .chain(self.values.values().map(|v| v[flat]))
                .map(|x| format!("{x:e}"))
                .collect();
            out.write_record(&row).map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the CSV layout of [`DiscreteSection::write_csv`]; the first `k`
    /// columns are the independent variables.
    pub fn read_csv<R: Read>(r: R, k: usize) -> Result<DiscreteSection, KContactError> {
        if k == 0 || k > 2 {
            return Err(KContactError::UnsupportedDimension(k));
        }
        let mut rdr = csv::Reader::from_reader(r);
        let header: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(|s| s.trim().to_string()).collect();
        if header.len() <= k {
            return Err(KContactError::Csv("no coordinate columns".into()));
        }
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
        for rec in rdr.records() {
            let rec = rec.map_err(csv_error)?;
            for (c, field) in cols.iter_mut().zip(rec.iter()) {
                let x: f64 = field.trim().parse().map_err(|_| KContactError::Csv(format!("bad number `{field}`")))?;
                c.push(x);
            }
        }
        let axes = (0..k)
            .map(|d| axis_from_column(&header[d], &cols[d]))
            .collect::<Result<Vec<_>, _>>()?;
        let values = header[k..].iter().cloned().zip(cols.drain(k..)).collect();
        let sec = DiscreteSection::new(axes, values)?;
        // the node order must be row-major
        for (flat, t) in (0..sec.size()).map(|f| (f, sec.point(f))) {
            for (d, x) in t.iter().enumerate() {
                if (cols[d][flat] - x).abs() > 1e-9 * (1.0 + x.abs()) {
                    return Err(KContactError::Csv(format!("row {flat} is out of row-major order")));
                }
            }
        }
        Ok(sec)
    }
}

fn csv_error(e: csv::Error) -> KContactError {
    KContactError::Csv(e.to_string())
}

fn axis_from_column(name: &str, col: &[f64]) -> Result<Axis, KContactError> {
    let mut distinct: Vec<f64> = Vec::new();
    for x in col {
        if !distinct.iter().any(|d| (d - x).abs() <= 1e-12 * (1.0 + x.abs())) {
            distinct.push(*x);
        }
    }
    distinct.sort_by(f64::total_cmp);
    if distinct.len() < 2 {
        return Ok(Axis::new(name, distinct.first().copied().unwrap_or(0.0), 1.0, distinct.len()));
    }
    let step = (distinct[distinct.len() - 1] - distinct[0]) / (distinct.len() - 1) as f64;
    Ok(Axis::new(name, distinct[0], step, distinct.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> DiscreteSection {
        let axes = vec![Axis::new("t", 0.0, 0.1, 5), Axis::new("x", 0.0, 0.2, 7)];
        DiscreteSection::from_fn(axes, &["u"], |t| vec![t[0] * t[0] + 3.0 * t[1]]).unwrap()
    }

    #[test]
    fn derivatives_are_exact_on_quadratics() {
        let s = grid();
        let u = s.values("u").unwrap();
        let ut = s.derivative(u, 0);
        let ux = s.derivative(u, 1);
        for flat in 0..s.size() {
            let t = s.point(flat);
            assert!((ut[flat] - 2.0 * t[0]).abs() < 1e-12);
            assert!((ux[flat] - 3.0).abs() < 1e-12);
        }
        assert_eq!(s.interior().len(), 3 * 5);
    }

    #[test]
    fn csv_round_trip() {
        let s = grid();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = DiscreteSection::read_csv(buf.as_slice(), 2).unwrap();
        assert_eq!(back.axes().len(), 2);
        assert_eq!(back.axes()[1].len, 7);
        let (a, b) = (s.values("u").unwrap(), back.values("u").unwrap());
        assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn shapes_are_checked() {
        let axes = vec![Axis::new("t", 0.0, 1.0, 4)];
        let values = [("u".to_string(), vec![0.0; 3])].into_iter().collect();
        assert!(matches!(
            DiscreteSection::new(axes, values),
            Err(KContactError::ShapeMismatch { .. })
        ));
    }
}
