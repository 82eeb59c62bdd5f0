//! CSV and JSON emission with fixed nine-significant-digit formatting, and
//! the matching readers.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::sweeps::{Layer, SweepGrid};

pub const NA: &str = "NA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            _ => Err(Error::invalid(format!("unknown format {s:?} (csv, json, both)"))),
        }
    }
}

pub fn format_number(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn format_cell(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), format_number)
}

/// The value as it reads back from its printed form.
pub fn round_sig(v: f64) -> f64 {
    if v.is_finite() {
        format_number(v).parse().unwrap_or(v)
    } else {
        v
    }
}

/// Rounds every number in a JSON tree to nine significant digits.
pub fn rounded(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let v = round_sig(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::numerical(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&rounded(v)).map_err(|e| Error::numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("CSV: {e}"))
}

/// Comma-separated table with `#` comment lines above a header row.
pub fn table_csv(comments: &[String], header: &[&str], rows: &[Vec<Option<f64>>]) -> Result<String> {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.iter().map(|v| format_cell(*v))).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::numerical(e.to_string()))?;
    out.push_str(&String::from_utf8_lossy(&bytes));
    Ok(out)
}

/// One sweep layer: `# x=<name> y=<name> layer=<name>`, then a row of x
/// values, then one row per y value.
pub fn layer_csv(grid: &SweepGrid, layer: Layer) -> Result<String> {
    let m = grid
        .layer(layer)
        .ok_or_else(|| Error::invalid(format!("sweep has no {layer} layer")))?;
    let mut out = format!("# x={} y={} layer={}\n", grid.x_name, grid.y_name, layer);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["y".to_string()];
    head.extend(grid.x_values.iter().map(|v| format_number(*v)));
    w.write_record(&head).map_err(csv_err)?;
    for (iy, y) in grid.y_values.iter().enumerate() {
        let mut row = vec![format_number(*y)];
        row.extend(m.row(iy).iter().map(|v| format_cell(*v)));
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::numerical(e.to_string()))?;
    out.push_str(&String::from_utf8_lossy(&bytes));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerTable {
    pub x_name: String,
    pub y_name: String,
    pub layer: Layer,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    pub values: Array2<Option<f64>>,
}

fn parse_cell(s: &str) -> Result<Option<f64>> {
    let s = s.trim();
    if s == NA {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::invalid(format!("bad number {s:?}")))
}

pub fn parse_layer_csv(text: &str) -> Result<LayerTable> {
    let first = text.lines().next().unwrap_or_default();
    let meta: BTreeMap<&str, &str> = first
        .trim_start_matches('#')
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .collect();
    let field = |k: &str| {
        meta.get(k)
            .copied()
            .ok_or_else(|| Error::invalid(format!("layer header lacks {k}=")))
    };
    let layer_name = field("layer")?;
    let layer = Layer::from_name(layer_name).ok_or_else(|| Error::invalid(format!("unknown layer {layer_name}")))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let head = records
        .next()
        .ok_or_else(|| Error::invalid("layer CSV has no axis row"))?
        .map_err(csv_err)?;
    let x_values = head
        .iter()
        .skip(1)
        .map(|s| parse_cell(s)?.ok_or_else(|| Error::invalid("NA on the x axis")))
        .collect::<Result<Vec<_>>>()?;
    let mut y_values = Vec::new();
    let mut cells = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != x_values.len() + 1 {
            return Err(Error::invalid("ragged layer CSV row"));
        }
        y_values.push(parse_cell(&rec[0])?.ok_or_else(|| Error::invalid("NA on the y axis"))?);
        for s in rec.iter().skip(1) {
            cells.push(parse_cell(s)?);
        }
    }
    let values = Array2::from_shape_vec((y_values.len(), x_values.len()), cells)
        .map_err(|e| Error::invalid(e.to_string()))?;
    Ok(LayerTable {
        x_name: field("x")?.to_string(),
        y_name: field("y")?.to_string(),
        layer,
        x_values,
        y_values,
        values,
    })
}

/// Single JSON bundle: axes plus every layer as row-major nested arrays.
pub fn sweep_json(grid: &SweepGrid) -> Value {
    let layers: serde_json::Map<String, Value> = grid
        .layers
        .iter()
        .map(|(l, m)| {
            let rows: Vec<Value> = m
                .rows()
                .into_iter()
                .map(|r| Value::Array(r.iter().map(|v| json!(v.map(round_sig))).collect()))
                .collect();
            (l.name().to_string(), Value::Array(rows))
        })
        .collect();
    json!({
        "x": {"name": grid.x_name, "values": grid.x_values.iter().map(|v| round_sig(*v)).collect::<Vec<_>>()},
        "y": {"name": grid.y_name, "values": grid.y_values.iter().map(|v| round_sig(*v)).collect::<Vec<_>>()},
        "layers": layers,
    })
}

pub fn parse_sweep_json(text: &str) -> Result<SweepGrid> {
    #[derive(Deserialize)]
    struct AxisJson {
        name: String,
        values: Vec<f64>,
    }
    #[derive(Deserialize)]
    struct Bundle {
        x: AxisJson,
        y: AxisJson,
        layers: BTreeMap<String, Vec<Vec<Option<f64>>>>,
    }
    let b: Bundle = serde_json::from_str(text).map_err(|e| Error::invalid(format!("sweep JSON: {e}")))?;
    let shape = (b.y.values.len(), b.x.values.len());
    let mut layers = BTreeMap::new();
    for (name, rows) in b.layers {
        let layer = Layer::from_name(&name).ok_or_else(|| Error::invalid(format!("unknown layer {name}")))?;
        if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
            return Err(Error::invalid(format!("layer {name} does not match the axes")));
        }
        let flat: Vec<Option<f64>> = rows.into_iter().flatten().collect();
        let m = Array2::from_shape_vec(shape, flat).map_err(|e| Error::invalid(e.to_string()))?;
        layers.insert(layer, m);
    }
    Ok(SweepGrid {
        x_name: b.x.name,
        x_values: b.x.values,
        y_name: b.y.name,
        y_values: b.y.values,
        layers,
    })
}

/// Writes `<stem>_<layer>.csv` files and/or `<stem>.json` into `dir`.
pub fn write_sweep(grid: &SweepGrid, dir: &Path, stem: &str, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format.csv() {
        for &layer in grid.layers.keys() {
            let path = dir.join(format!("{stem}_{layer}.csv"));
            fs::write(&path, layer_csv(grid, layer)?)?;
            written.push(path);
        }
    }
    if format.json() {
        let path = dir.join(format!("{stem}.json"));
        fs::write(&path, to_json_string(&sweep_json(grid))?)?;
        written.push(path);
    }
    Ok(written)
}

/// Reassembles a sweep from the per-layer CSV files written by [`write_sweep`].
pub fn read_sweep_csv(dir: &Path, stem: &str) -> Result<SweepGrid> {
    let mut grid: Option<SweepGrid> = None;
    for layer in Layer::ALL {
        let path = dir.join(format!("{stem}_{layer}.csv"));
        if !path.exists() {
            continue;
        }
        let t = parse_layer_csv(&fs::read_to_string(&path)?)?;
        let g = grid.get_or_insert_with(|| SweepGrid {
            x_name: t.x_name.clone(),
            x_values: t.x_values.clone(),
            y_name: t.y_name.clone(),
            y_values: t.y_values.clone(),
            layers: BTreeMap::new(),
        });
        if g.x_values != t.x_values || g.y_values != t.y_values {
            return Err(Error::invalid(format!("{} uses different axes", path.display())));
        }
        g.layers.insert(t.layer, t.values);
    }
    grid.ok_or_else(|| Error::invalid(format!("no {stem}_*.csv layers in {}", dir.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepGrid {
        let mut layers = BTreeMap::new();
        layers.insert(
            Layer::Vb,
            Array2::from_shape_vec((2, 3), vec![Some(0.1), None, Some(1.0 / 3.0), Some(-2.5e-7), Some(1.0), Some(0.0)]).unwrap(),
        );
        layers.insert(Layer::Ps, Array2::from_elem((2, 3), Some(std::f64::consts::PI)));
        SweepGrid {
            x_name: "delta_xi".into(),
            x_values: vec![-0.5, 0.0, 0.5],
            y_name: "M_Lambda".into(),
            y_values: vec![0.0, 1.0],
            layers,
        }
    }

    fn rounded_grid(g: &SweepGrid) -> SweepGrid {
        let mut g = g.clone();
        for m in g.layers.values_mut() {
            m.mapv_inplace(|v| v.map(round_sig));
        }
        g
    }

    #[test]
    fn csv_roundtrip() {
        let g = sample();
        let text = layer_csv(&g, Layer::Vb).unwrap();
        assert!(text.starts_with("# x=delta_xi y=M_Lambda layer=V_B\n"));
        assert!(text.contains(",NA,"));
        let t = parse_layer_csv(&text).unwrap();
        assert_eq!(t.layer, Layer::Vb);
        assert_eq!(&t.values, rounded_grid(&g).layer(Layer::Vb).unwrap());
        assert_eq!(t.x_values, g.x_values);
    }

    #[test]
    fn json_roundtrip_and_determinism() {
        let g = sample();
        let a = to_json_string(&sweep_json(&g)).unwrap();
        let b = to_json_string(&sweep_json(&g)).unwrap();
        assert_eq!(a, b);
        let back = parse_sweep_json(&a).unwrap();
        assert_eq!(back, rounded_grid(&g));
    }

    #[test]
    fn directory_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let g = sample();
        let files = write_sweep(&g, dir.path(), "s", OutputFormat::Both).unwrap();
        assert_eq!(files.len(), 3);
        assert_eq!(read_sweep_csv(dir.path(), "s").unwrap(), rounded_grid(&g));
    }

    #[test]
    fn formatting() {
        assert_eq!(format_number(0.5), "5.00000000e-1");
        assert_eq!(format_cell(None), "NA");
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333);
        assert!("xml".parse::<OutputFormat>().is_err());
    }

    #[test]
    fn table_layout() {
        let t = table_csv(&["kind=tau".into()], &["a", "b"], &[vec![Some(1.0), None]]).unwrap();
        assert_eq!(t, "# kind=tau\na,b\n1.00000000e0,NA\n");
    }
}
