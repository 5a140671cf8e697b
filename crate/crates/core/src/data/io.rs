//! CSV dataset files and the column/unit schema that maps them onto SI features.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DataError, Dataset, Feature, OperatingPoint, Provenance, N_FEATURES};

/// Schema key of the measured-flux column.
pub const FLUX_KEY: &str = "jw";

/// Units accepted in dataset schemas. Each converts to the SI storage unit of
/// the feature (concentrations stay in mol/L).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "M", alias = "mol/L")]
    Molar,
    #[serde(rename = "mM")]
    Millimolar,
    #[serde(rename = "mol/m3")]
    MolPerCubicMetre,
    #[serde(rename = "m/s")]
    MetrePerSecond,
    #[serde(rename = "cm/s")]
    CentimetrePerSecond,
    /// Litres per square metre per hour (flux).
    #[serde(rename = "LMH")]
    Lmh,
    #[serde(rename = "m/(Pa*s)")]
    MetrePerPascalSecond,
    #[serde(rename = "LMH/bar")]
    LmhPerBar,
    #[serde(rename = "m")]
    Metre,
    #[serde(rename = "mm")]
    Millimetre,
    #[serde(rename = "um")]
    Micrometre,
    #[serde(rename = "-")]
    Dimensionless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Concentration,
    Velocity,
    Permeability,
    Length,
    None,
}

const SECONDS_PER_HOUR_LITRE: f64 = 3.6e6;
const PA_PER_BAR: f64 = 1e5;

impl Unit {
    fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Molar | Millimolar | MolPerCubicMetre => Dimension::Concentration,
            MetrePerSecond | CentimetrePerSecond | Lmh => Dimension::Velocity,
            MetrePerPascalSecond | LmhPerBar => Dimension::Permeability,
            Metre | Millimetre | Micrometre => Dimension::Length,
            Dimensionless => Dimension::None,
        }
    }

    pub fn to_si(self, v: f64) -> f64 {
        use Unit::*;
        match self {
            Molar | MetrePerSecond | MetrePerPascalSecond | Metre | Dimensionless => v,
            Millimolar | MolPerCubicMetre | Millimetre => v * 1e-3,
            CentimetrePerSecond => v * 1e-2,
            Micrometre => v * 1e-6,
            Lmh => v / SECONDS_PER_HOUR_LITRE,
            LmhPerBar => v / SECONDS_PER_HOUR_LITRE / PA_PER_BAR,
        }
    }

    pub fn from_si(self, v: f64) -> f64 {
        use Unit::*;
        match self {
            Molar | MetrePerSecond | MetrePerPascalSecond | Metre | Dimensionless => v,
            Millimolar | MolPerCubicMetre | Millimetre => v * 1e3,
            CentimetrePerSecond => v * 1e2,
            Micrometre => v * 1e6,
            Lmh => v * SECONDS_PER_HOUR_LITRE,
            LmhPerBar => v * SECONDS_PER_HOUR_LITRE * PA_PER_BAR,
        }
    }
}

fn feature_dimension(f: Feature) -> Dimension {
    match f {
        Feature::CfIn | Feature::CdIn => Dimension::Concentration,
        Feature::UfIn | Feature::UdIn => Dimension::Velocity,
        Feature::A => Dimension::Permeability,
        Feature::EpsPsl | Feature::Tau => Dimension::None,
        Feature::TPsl | Feature::LX | Feature::TC => Dimension::Length,
    }
}

fn si_unit_of(f: Feature) -> Unit {
    match feature_dimension(f) {
        Dimension::Concentration => Unit::Molar,
        Dimension::Velocity => Unit::MetrePerSecond,
        Dimension::Permeability => Unit::MetrePerPascalSecond,
        Dimension::Length => Unit::Metre,
        Dimension::None => Unit::Dimensionless,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    pub column: String,
    pub unit: Unit,
}

/// Mapping from feature names (plus `jw`) to CSV columns and their units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DatasetSchema {
    pub columns: BTreeMap<String, ColumnSpec>,
}

impl Default for DatasetSchema {
    fn default() -> Self {
        let mut columns: BTreeMap<String, ColumnSpec> = Feature::ALL
            .into_iter()
            .map(|f| {
                (
                    f.name().to_string(),
                    ColumnSpec {
                        column: f.name().to_string(),
                        unit: si_unit_of(f),
                    },
                )
            })
            .collect();
        columns.insert(
            FLUX_KEY.into(),
            ColumnSpec {
                column: FLUX_KEY.into(),
                unit: Unit::MetrePerSecond,
            },
        );
        Self { columns }
    }
}

impl DatasetSchema {
    fn spec(&self, key: &str) -> Result<&ColumnSpec, DataError> {
        self.columns
            .get(key)
            .ok_or_else(|| DataError::Schema(format!("no column mapped for '{key}'")))
    }

    pub fn feature(&self, f: Feature) -> Result<&ColumnSpec, DataError> {
        let spec = self.spec(f.name())?;
        if spec.unit.dimension() != feature_dimension(f) {
            return Err(DataError::Schema(format!(
                "unit {:?} is not valid for feature '{}' (SI unit {})",
                spec.unit,
                f,
                f.si_unit()
            )));
        }
        Ok(spec)
    }

    pub fn flux(&self) -> Result<&ColumnSpec, DataError> {
        let spec = self.spec(FLUX_KEY)?;
        if spec.unit.dimension() != Dimension::Velocity {
            return Err(DataError::Schema(format!(
                "unit {:?} is not a flux unit",
                spec.unit
            )));
        }
        Ok(spec)
    }

    /// Checks that every feature (and, if `with_flux`, the flux) is mapped
    /// with a compatible unit and that no unknown keys are present.
    pub fn validate(&self, with_flux: bool) -> Result<(), DataError> {
        for f in Feature::ALL {
            self.feature(f)?;
        }
        if with_flux {
            self.flux()?;
        }
        for key in self.columns.keys() {
            if key != FLUX_KEY && Feature::from_name(key).is_none() {
                return Err(DataError::Schema(format!("unknown schema key '{key}'")));
            }
        }
        Ok(())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> DataError {
    DataError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

struct Table {
    headers: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

fn read_table(path: &Path) -> Result<Table, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| io_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(DataError::Schema(format!(
            "{}: missing header row",
            path.display()
        )));
    }
    let rows = rdr
        .records()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| DataError::Parse {
                row: i,
                column: String::new(),
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table { headers, rows })
}

fn column_index(table: &Table, spec: &ColumnSpec) -> Result<usize, DataError> {
    table
        .headers
        .iter()
        .position(|h| h == &spec.column)
        .ok_or_else(|| DataError::Schema(format!("missing column '{}'", spec.column)))
}

fn cell(row: &csv::StringRecord, idx: usize, r: usize, name: &str) -> Result<f64, DataError> {
    let raw = row.get(idx).unwrap_or("");
    let v: f64 = raw.parse().map_err(|_| DataError::Parse {
        row: r,
        column: name.to_string(),
        message: format!("'{raw}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(DataError::Parse {
            row: r,
            column: name.to_string(),
            message: format!("'{raw}' is not finite"),
        });
    }
    Ok(v)
}

fn parse_points(table: &Table, schema: &DatasetSchema) -> Result<Vec<OperatingPoint>, DataError> {
    let cols = Feature::ALL
        .into_iter()
        .map(|f| {
            let spec = schema.feature(f)?;
            Ok((column_index(table, spec)?, spec))
        })
        .collect::<Result<Vec<_>, DataError>>()?;
    table
        .rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut z = [0.0; N_FEATURES];
            for (k, (idx, spec)) in cols.iter().enumerate() {
                z[k] = spec.unit.to_si(cell(row, *idx, r, &spec.column)?);
            }
            let p = OperatingPoint::from_array(&z);
            p.validate(r)?;
            Ok(p)
        })
        .collect()
}

/// Loads a dataset CSV, converting every mapped column to SI units.
pub fn load_dataset(path: &Path, schema: &DatasetSchema) -> Result<Dataset, DataError> {
    schema.validate(true)?;
    let table = read_table(path)?;
    let points = parse_points(&table, schema)?;
    let flux = schema.flux()?;
    let jw_idx = column_index(&table, flux)?;
    let jw = table
        .rows
        .iter()
        .enumerate()
        .map(|(r, row)| Ok(flux.unit.to_si(cell(row, jw_idx, r, &flux.column)?)))
        .collect::<Result<Vec<_>, DataError>>()?;
    Dataset::new(points, jw, Provenance::Experimental)
}

/// Loads operating points only (no flux column required).
pub fn load_points(path: &Path, schema: &DatasetSchema) -> Result<Vec<OperatingPoint>, DataError> {
    schema.validate(false)?;
    parse_points(&read_table(path)?, schema)
}

/// Formats a float with 17 significant digits.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_rows(
    path: &Path,
    schema: &DatasetSchema,
    points: &[OperatingPoint],
    jw: Option<&[f64]>,
) -> Result<(), DataError> {
    let mut header: Vec<String> = Feature::ALL
        .into_iter()
        .map(|f| schema.feature(f).map(|s| s.column.clone()))
        .collect::<Result<_, _>>()?;
    let flux = match jw {
        Some(_) => {
            let spec = schema.flux()?;
            header.push(spec.column.clone());
            Some(spec)
        }
        None => None,
    };
    let mut out = String::with_capacity(points.len() * 260);
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, p) in points.iter().enumerate() {
        let z = p.to_array();
        let mut cells: Vec<String> = Feature::ALL
            .into_iter()
            .map(|f| fmt_f64(schema.columns[f.name()].unit.from_si(z[f.index()])))
            .collect();
        if let (Some(spec), Some(jw)) = (flux, jw) {
            cells.push(fmt_f64(spec.unit.from_si(jw[i])));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let mut file = File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| io_err(path, e))
}

pub fn write_dataset(
    path: &Path,
    dataset: &Dataset,
    schema: &DatasetSchema,
) -> Result<(), DataError> {
    schema.validate(true)?;
    write_rows(path, schema, dataset.points(), Some(dataset.jw_measured()))
}

pub fn write_points(
    path: &Path,
    points: &[OperatingPoint],
    schema: &DatasetSchema,
) -> Result<(), DataError> {
    schema.validate(false)?;
    write_rows(path, schema, points, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::nominal_point;

    fn lmh_schema() -> DatasetSchema {
        let mut s = DatasetSchema::default();
        s.columns.get_mut(FLUX_KEY).unwrap().unit = Unit::Lmh;
        s
    }

    #[test]
    fn lmh_converts_to_metres_per_second() {
        assert_eq!(Unit::Lmh.to_si(36.0), 1.0e-5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let ds = Dataset::new(
            vec![nominal_point()],
            vec![1.0e-5],
            Provenance::Experimental,
        )
        .unwrap();
        write_dataset(&path, &ds, &lmh_schema()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .ends_with("3.6000000000000000e1"));
        let back = load_dataset(&path, &lmh_schema()).unwrap();
        assert_eq!(back.jw_measured(), &[1.0e-5]);
    }

    #[test]
    fn missing_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "cf_in,cd_in\n0.1,1.0\n").unwrap();
        let err = load_dataset(&path, &DatasetSchema::default()).unwrap_err();
        assert_eq!(err, DataError::Schema("missing column 'uf_in'".into()));
    }

    #[test]
    fn unmapped_feature_is_named() {
        let mut s = DatasetSchema::default();
        s.columns.remove("tau");
        let err = s.validate(true).unwrap_err();
        assert!(err.to_string().contains("'tau'"));
    }

    #[test]
    fn wrong_unit_dimension_rejected() {
        let mut s = DatasetSchema::default();
        s.columns.get_mut("A").unwrap().unit = Unit::Metre;
        assert!(matches!(s.validate(true), Err(DataError::Schema(_))));
    }

    #[test]
    fn bad_cells_report_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let ds = Dataset::new(
            vec![nominal_point(), nominal_point()],
            vec![1e-6, 2e-6],
            Provenance::Experimental,
        )
        .unwrap();
        write_dataset(&path, &ds, &DatasetSchema::default()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();

        let mut nan_row = lines.clone();
        nan_row[2] = nan_row[2].replacen("1.0000000000000000e0", "NaN", 1);
        std::fs::write(&path, nan_row.join("\n")).unwrap();
        let err = load_dataset(&path, &DatasetSchema::default()).unwrap_err();
        assert!(matches!(err, DataError::Parse { row: 1, .. }), "{err:?}");

        lines[1] = lines[1].replacen("5.0000000000000000e-1", "1.2", 1);
        std::fs::write(&path, lines.join("\n")).unwrap();
        let err = load_dataset(&path, &DatasetSchema::default()).unwrap_err();
        assert_eq!(
            err,
            DataError::Validation {
                row: 0,
                feature: Feature::EpsPsl,
                value: 1.2
            }
        );
    }

    #[test]
    fn unit_round_trip() {
        use Unit::*;
        for u in [
            Molar,
            Millimolar,
            MolPerCubicMetre,
            MetrePerSecond,
            CentimetrePerSecond,
            Lmh,
            MetrePerPascalSecond,
            LmhPerBar,
            Metre,
            Millimetre,
            Micrometre,
            Dimensionless,
        ] {
            let v = 1.2345678901234e-3;
            assert!((u.to_si(u.from_si(v)) - v).abs() <= 1e-15 * v, "{u:?}");
        }
        assert!((LmhPerBar.to_si(1.0) - 2.7777777777777777e-12).abs() < 1e-26);
    }
}
