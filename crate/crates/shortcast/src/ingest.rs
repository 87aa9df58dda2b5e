//! Ingestion of long-format agricultural CSV exports into model-ready tables.
//!
//! The expected input is the classic long layout with one measurement per
//! row: `Area, Item, Element, Year, Unit, Value` (header matching is
//! case-insensitive; extra columns are ignored). Preprocessing happens in
//! four explicit steps, each its own function so they can be tested and
//! composed independently:
//!
//! 1. [`parse_csv`] — read records, tolerating malformed numeric cells.
//! 2. [`drop_unwanted_features`] — keep a single geographic area.
//! 3. [`drop_redundant_records`] — remove rows derivable from others
//!    (yield/area/production triples, total-emission rows).
//! 4. [`pivot`] + [`scrape_nan_columns`] — reshape to one column per
//!    item/element pair over a contiguous year range, then drop every
//!    column that has any gap at all. No imputation: a series with holes
//!    is excluded rather than invented.
//!
//! [`assemble_model_table`] then selects the per-product modelling view:
//! every emission column plus exactly one product column.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::diag::Warning;
use crate::error::{Error, Result};

/// Which source dataset a column came from. Emission columns are predictors;
/// production and forestry columns are the products being forecast.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum ColumnKind {
    /// Greenhouse-gas emission series (predictor variables).
    Emission,
    /// Crop production series (forecast targets).
    Production,
    /// Forestry product series (forecast targets).
    Forestry,
}

impl ColumnKind {
    /// Lowercase label for diagnostics.
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Emission => "emission",
            ColumnKind::Production => "production",
            ColumnKind::Forestry => "forestry",
        }
    }
}

/// One row of a long-format export: a single measurement of one element of
/// one item, in one area and year.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    /// Geographic area name, e.g. a country.
    pub area: String,
    /// The thing measured (a crop, a gas, a forest product).
    pub item: String,
    /// Which aspect of the item is measured (e.g. `Yield`, `Direct`).
    pub element: String,
    /// Calendar year of the measurement.
    pub year: i32,
    /// Unit string as exported; not interpreted except for yield synthesis.
    pub unit: String,
    /// The measurement; `None` when the cell was empty or malformed.
    pub value: Option<f64>,
}

/// Result of [`parse_csv`]: the records plus counters for cells and rows
/// that could not be used.
#[derive(Debug, Clone)]
pub struct ParsedCsv {
    /// Successfully parsed records, in file order.
    pub records: Vec<RawRecord>,
    /// Count of `Value` cells that were present but not parseable as a
    /// finite number; the records are kept with an absent value.
    pub malformed_values: usize,
    /// Count of rows skipped entirely (unparseable or out-of-range year,
    /// short row).
    pub skipped_rows: usize,
}

/// A record batch tagged with the dataset it came from, for pivoting.
#[derive(Debug, Clone)]
pub struct TaggedRecords {
    /// Dataset kind applied to every column these records produce.
    pub kind: ColumnKind,
    /// The records themselves.
    pub records: Vec<RawRecord>,
}

/// One column of a pivoted table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    /// Column name, always `"item | element"`.
    pub name: String,
    /// Source dataset of the column.
    pub kind: ColumnKind,
    /// One value per table year; `NaN` marks a gap until scraping removes
    /// the column.
    pub values: Vec<f64>,
}

/// A wide table: one row per year (contiguous), one column per item/element
/// pair. Produced by [`pivot`]; gap-free only after [`scrape_nan_columns`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTable {
    /// Consecutive calendar years, one per row.
    pub years: Vec<i32>,
    /// Columns, ordered by (kind, name) for reproducible output.
    pub columns: Vec<Column>,
}

impl SeriesTable {
    /// Number of rows (years).
    pub fn n_rows(&self) -> usize {
        self.years.len()
    }

    /// Number of columns.
    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// The column named `name`, if present.
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Index of the column named `name`, if present.
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Emission (predictor) columns, in table order.
    pub fn emission_columns(&self) -> impl Iterator<Item = &Column> {
        self.columns
            .iter()
            .filter(|c| c.kind == ColumnKind::Emission)
    }

    /// Product (production or forestry) columns, in table order.
    pub fn product_columns(&self) -> impl Iterator<Item = &Column> {
        self.columns
            .iter()
            .filter(|c| c.kind != ColumnKind::Emission)
    }

    /// Renders the table as CSV with a leading `Year` column.
    pub fn to_csv_string(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["Year".to_string()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        wtr.write_record(&header).expect("in-memory write");
        for (row, year) in self.years.iter().enumerate() {
            let mut fields = vec![year.to_string()];
            for col in &self.columns {
                fields.push(format_value(col.values[row]));
            }
            wtr.write_record(&fields).expect("in-memory write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf8 csv")
    }
}

/// Formats a cell value: empty for gaps, shortest round-trippable decimal
/// otherwise.
fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

/// Parses a long-format CSV export.
///
/// The header must contain `Area`, `Item`, `Element`, `Year`, `Unit`, and
/// `Value` (any casing, any order); extra columns are ignored. Empty `Value`
/// cells become absent values; present-but-malformed ones likewise, counted
/// in [`ParsedCsv::malformed_values`]. Rows whose `Year` is missing,
/// unparseable, or outside 1900..=2100 cannot be placed on the time axis and
/// are skipped, counted in [`ParsedCsv::skipped_rows`].
///
/// # Errors
///
/// [`Error::EmptyFile`] when there is no header row, and
/// [`Error::MissingColumn`] naming the first required column that is absent.
pub fn parse_csv<R: Read>(reader: R) -> Result<ParsedCsv> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyFile);
    }
    let find = |wanted: &str| -> Option<usize> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(wanted))
    };
    let required = ["Area", "Item", "Element", "Year", "Unit", "Value"];
    let mut idx = [0usize; 6];
    for (slot, name) in idx.iter_mut().zip(required) {
        *slot = find(name).ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }
    let [area_i, item_i, element_i, year_i, unit_i, value_i] = idx;

    let mut records = Vec::new();
    let mut malformed_values = 0usize;
    let mut skipped_rows = 0usize;
    for row in rdr.records() {
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let year: i32 = match field(year_i).parse() {
            Ok(y) if (1900..=2100).contains(&y) => y,
            _ => {
                skipped_rows += 1;
                continue;
            }
        };
        let raw_value = field(value_i);
        let value = if raw_value.is_empty() {
            None
        } else {
            match raw_value.parse::<f64>() {
                Ok(v) if v.is_finite() => Some(v),
                _ => {
                    malformed_values += 1;
                    None
                }
            }
        };
        records.push(RawRecord {
            area: field(area_i).to_string(),
            item: field(item_i).to_string(),
            element: field(element_i).to_string(),
            year,
            unit: field(unit_i).to_string(),
            value,
        });
    }
    Ok(ParsedCsv {
        records,
        malformed_values,
        skipped_rows,
    })
}

/// Writes records back out in the same long format [`parse_csv`] reads, so
/// the two functions round-trip.
pub fn write_csv<W: Write>(records: &[RawRecord], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["Area", "Item", "Element", "Year", "Unit", "Value"])?;
    for r in records {
        wtr.write_record([
            r.area.as_str(),
            r.item.as_str(),
            r.element.as_str(),
            &r.year.to_string(),
            r.unit.as_str(),
            &r.value.map(|v| format!("{v}")).unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Convenience wrapper around [`write_csv`] returning a `String`.
pub fn records_to_csv_string(records: &[RawRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("utf8 csv")
}

/// Keeps only the records of one geographic area (case-insensitive,
/// whitespace-trimmed comparison).
///
/// # Errors
///
/// [`Error::AreaNotFound`] when nothing matches — in practice that means a
/// typo in the area name, which should stop the run rather than produce an
/// empty forecast.
pub fn drop_unwanted_features(records: &[RawRecord], area: &str) -> Result<Vec<RawRecord>> {
    let wanted = area.trim();
    let kept: Vec<RawRecord> = records
        .iter()
        .filter(|r| r.area.trim().eq_ignore_ascii_case(wanted))
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::AreaNotFound(area.to_string()));
    }
    Ok(kept)
}

/// Roles an element label can play in the yield/area/production triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TripleRole {
    Yield,
    AreaHarvested,
    Production,
}

fn triple_role(element: &str) -> Option<TripleRole> {
    let el = element.trim();
    if el.eq_ignore_ascii_case("yield") {
        Some(TripleRole::Yield)
    } else if el.eq_ignore_ascii_case("area harvested") {
        Some(TripleRole::AreaHarvested)
    } else if el.eq_ignore_ascii_case("production") {
        Some(TripleRole::Production)
    } else {
        None
    }
}

/// Roles an element label can play among emission components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EmissionRole {
    Direct,
    Indirect,
    Total,
    Other,
}

fn emission_role(item: &str, element: &str) -> EmissionRole {
    let el = element.trim().to_ascii_lowercase();
    // "indirect" must be checked before "direct": the latter is a substring
    // of the former.
    if el.contains("indirect") {
        EmissionRole::Indirect
    } else if el.contains("direct") {
        EmissionRole::Direct
    } else if el.contains("total") || element.trim().eq_ignore_ascii_case(item.trim()) {
        EmissionRole::Total
    } else {
        EmissionRole::Other
    }
}

/// Output of [`drop_redundant_records`].
#[derive(Debug, Clone)]
pub struct RedundancyOutcome {
    /// Surviving records, in input order (synthesized yields take the place
    /// of the first record they were derived from).
    pub records: Vec<RawRecord>,
    /// One warning per unresolvable situation encountered.
    pub warnings: Vec<Warning>,
}

/// Grams-per-hectogram side of the fixed yield conversion: one tonne is
/// 10,000 hectograms, so `Yield [hg/ha] = Production [t] * 10000 / Area [ha]`.
const HG_PER_TONNE: f64 = 10_000.0;

/// Removes records whose value is derivable from other records of the same
/// item and year, keeping the information content intact:
///
/// * Yield triples: when `Yield` is present, the `Production` and
///   `Area harvested` rows it summarizes are dropped. When `Yield` is absent
///   but both components are present (in tonnes and hectares), an equivalent
///   `Yield` row is synthesized in hg/ha and replaces them.
/// * Emission totals: when both `Direct` and `Indirect` component rows exist,
///   rows whose element names a total (the word "total", or the bare gas
///   label) are dropped as derivable.
///
/// Situations the rules cannot resolve (a lone `Production` with nothing to
/// pair it with, unexpected units, missing component values) leave the
/// records untouched and produce a [`Warning`] instead; the set of
/// (item, year) pairs that carry at least one record never shrinks.
pub fn drop_redundant_records(records: &[RawRecord]) -> RedundancyOutcome {
    let mut groups: BTreeMap<(&str, i32), Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        groups.entry((r.item.as_str(), r.year)).or_default().push(i);
    }

    let mut remove = vec![false; records.len()];
    let mut replacement: BTreeMap<usize, RawRecord> = BTreeMap::new();
    let mut warnings = Vec::new();
    // item -> number of years with a lone triple component, aggregated so a
    // forestry item with decades of bare Production rows warns once.
    let mut lone_component_years: BTreeMap<&str, usize> = BTreeMap::new();

    for ((item, year), idxs) in &groups {
        let find_role = |role: TripleRole| {
            idxs.iter()
                .copied()
                .find(|&i| triple_role(&records[i].element) == Some(role))
        };
        let yield_idx = find_role(TripleRole::Yield);
        let prod_idx = find_role(TripleRole::Production);
        let area_idx = find_role(TripleRole::AreaHarvested);

        if yield_idx.is_some() {
            for i in [prod_idx, area_idx].into_iter().flatten() {
                remove[i] = true;
            }
        } else if let (Some(p), Some(a)) = (prod_idx, area_idx) {
            let prod = &records[p];
            let harvested = &records[a];
            let units_ok = prod.unit.trim().eq_ignore_ascii_case("tonnes")
                && harvested.unit.trim().eq_ignore_ascii_case("ha");
            match (units_ok, prod.value, harvested.value) {
                (true, Some(pv), Some(av)) if av != 0.0 => {
                    let synthesized = RawRecord {
                        area: prod.area.clone(),
                        item: prod.item.clone(),
                        element: "Yield".to_string(),
                        year: *year,
                        unit: "hg/ha".to_string(),
                        value: Some(pv * HG_PER_TONNE / av),
                    };
                    remove[p] = true;
                    remove[a] = true;
                    replacement.insert(p.min(a), synthesized);
                }
                (false, _, _) => warnings.push(Warning::new(
                    "ingest",
                    format!("{item} ({year})"),
                    format!(
                        "cannot derive Yield: expected units tonnes/ha, found `{}`/`{}`",
                        prod.unit, harvested.unit
                    ),
                    "records kept as-is; supply Yield directly or fix the units",
                )),
                _ => warnings.push(Warning::new(
                    "ingest",
                    format!("{item} ({year})"),
                    "cannot derive Yield: Production or Area harvested value is missing or zero",
                    "records kept as-is; supply Yield directly",
                )),
            }
        } else if prod_idx.is_some() != area_idx.is_some() {
            *lone_component_years.entry(item).or_default() += 1;
        }

        let has = |role: EmissionRole| {
            idxs.iter()
                .any(|&i| emission_role(item, &records[i].element) == role)
        };
        if has(EmissionRole::Direct) && has(EmissionRole::Indirect) {
            for &i in idxs {
                if emission_role(item, &records[i].element) == EmissionRole::Total {
                    remove[i] = true;
                }
            }
        }
    }

    for (item, years) in lone_component_years {
        warnings.push(Warning::new(
            "ingest",
            item,
            format!(
                "{years} year(s) carry Production or Area harvested without the \
                 counterpart needed to derive Yield"
            ),
            "records kept as-is; the column is modelled in its original unit",
        ));
    }

    let mut out = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if let Some(synthesized) = replacement.remove(&i) {
            out.push(synthesized);
        } else if !remove[i] {
            out.push(r.clone());
        }
    }
    RedundancyOutcome {
        records: out,
        warnings,
    }
}

/// Working state for one pivot column.
struct ColumnBuild {
    kind: ColumnKind,
    values: Vec<f64>,
    written: Vec<bool>,
}

/// Reshapes tagged record batches into a wide [`SeriesTable`].
///
/// The row axis is the contiguous hull `[min year, max year]` over all
/// records; one column per `(item, element)` pair, named `"item | element"`.
/// Years no record covers — and records whose value is absent — leave `NaN`
/// cells, to be removed wholesale by [`scrape_nan_columns`]. Columns are
/// ordered by (kind, name) so downstream output is reproducible.
///
/// # Errors
///
/// [`Error::EmptyInput`] when there are no records at all, and
/// [`Error::DuplicateCell`] when two records land on the same
/// (item, element, year) cell.
pub fn pivot(groups: &[TaggedRecords]) -> Result<SeriesTable> {
    let mut min_year = i32::MAX;
    let mut max_year = i32::MIN;
    let mut any = false;
    for g in groups {
        for r in &g.records {
            any = true;
            min_year = min_year.min(r.year);
            max_year = max_year.max(r.year);
        }
    }
    if !any {
        return Err(Error::EmptyInput);
    }
    let years: Vec<i32> = (min_year..=max_year).collect();
    let n_rows = years.len();

    let mut builds: BTreeMap<String, ColumnBuild> = BTreeMap::new();
    for g in groups {
        for r in &g.records {
            let name = format!("{} | {}", r.item, r.element);
            let build = builds.entry(name).or_insert_with(|| ColumnBuild {
                kind: g.kind,
                values: vec![f64::NAN; n_rows],
                written: vec![false; n_rows],
            });
            let row = (r.year - min_year) as usize;
            if build.written[row] {
                return Err(Error::DuplicateCell {
                    item: r.item.clone(),
                    element: r.element.clone(),
                    year: r.year,
                });
            }
            build.written[row] = true;
            if let Some(v) = r.value {
                build.values[row] = v;
            }
        }
    }

    let mut columns: Vec<Column> = builds
        .into_iter()
        .map(|(name, b)| Column {
            name,
            kind: b.kind,
            values: b.values,
        })
        .collect();
    columns.sort_by(|a, b| a.kind.cmp(&b.kind).then_with(|| a.name.cmp(&b.name)));

    Ok(SeriesTable { years, columns })
}

/// Drops every column that contains at least one gap (`NaN`), leaving a
/// table with complete series only. No imputation is attempted: a value the
/// data does not contain is a value the model does not see.
///
/// # Errors
///
/// [`Error::AllColumnsDropped`] when no column survives.
pub fn scrape_nan_columns(table: &SeriesTable) -> Result<SeriesTable> {
    let columns: Vec<Column> = table
        .columns
        .iter()
        .filter(|c| c.values.iter().all(|v| v.is_finite()))
        .cloned()
        .collect();
    if columns.is_empty() {
        return Err(Error::AllColumnsDropped);
    }
    Ok(SeriesTable {
        years: table.years.clone(),
        columns,
    })
}

/// Selects the modelling view for one product: every emission column plus
/// exactly the named product column (placed last).
///
/// With zero emission columns the result is a one-column table and the
/// downstream model degrades to a univariate autoregression.
///
/// # Errors
///
/// [`Error::UnknownProduct`] when `product` does not name a production or
/// forestry column of `full`.
pub fn assemble_model_table(full: &SeriesTable, product: &str) -> Result<SeriesTable> {
    let product_col = full
        .product_columns()
        .find(|c| c.name == product)
        .ok_or_else(|| Error::UnknownProduct(product.to_string()))?
        .clone();
    let mut columns: Vec<Column> = full.emission_columns().cloned().collect();
    columns.push(product_col);
    Ok(SeriesTable {
        years: full.years.clone(),
        columns,
    })
}
