// Copyright 2026 The Predtrans Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Columnar table storage.
//!
//! A [`Table`] is immutable once built. Filtering never copies data: it
//! produces a [`RowSelection`], a strictly increasing list of surviving row
//! indices, which is threaded through the transfer and join phases.
//! [`materialize`] is the only operation that copies values.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hash;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Int64,
    Utf8,
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnType::Int64 => f.write_str("int64"),
            ColumnType::Utf8 => f.write_str("utf8"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ColumnType,
}

impl Field {
    pub fn new(name: impl Into<String>, ty: ColumnType) -> Self {
        Field {
            name: name.into(),
            ty,
        }
    }
}

/// Ordered list of uniquely named columns. Serialized as the JSON sidecar
/// format `[{"name": ..., "type": "int64" | "utf8"}, ...]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Field>", into = "Vec<Field>")]
pub struct Schema {
    fields: Vec<Field>,
}

impl Schema {
    pub fn new(fields: Vec<Field>) -> Result<Self> {
        let mut seen = HashSet::new();
        for f in &fields {
            if !seen.insert(f.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate column name '{}'",
                    f.name
                )));
            }
        }
        Ok(Schema { fields })
    }

    /// Shorthand for tests and generators: `Schema::of(&[("a", ColumnType::Int64)])`.
    pub fn of(fields: &[(&str, ColumnType)]) -> Result<Self> {
        Schema::new(fields.iter().map(|(n, t)| Field::new(*n, *t)).collect())
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Json {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("schema serializes");
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }
}

impl TryFrom<Vec<Field>> for Schema {
    type Error = Error;

    fn try_from(fields: Vec<Field>) -> Result<Self> {
        Schema::new(fields)
    }
}

impl From<Schema> for Vec<Field> {
    fn from(s: Schema) -> Self {
        s.fields
    }
}

/// A typed scalar. Used for predicate literals and for rendering rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int64(i64),
    Utf8(String),
}

impl Value {
    pub fn column_type(&self) -> ColumnType {
        match self {
            Value::Int64(_) => ColumnType::Int64,
            Value::Utf8(_) => ColumnType::Utf8,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int64(v) => write!(f, "{v}"),
            Value::Utf8(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int64(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Utf8(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Int64(Vec<i64>),
    Utf8(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Int64(v) => v.len(),
            Column::Utf8(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column_type(&self) -> ColumnType {
        match self {
            Column::Int64(_) => ColumnType::Int64,
            Column::Utf8(_) => ColumnType::Utf8,
        }
    }

    pub fn value(&self, row: usize) -> Value {
        match self {
            Column::Int64(v) => Value::Int64(v[row]),
            Column::Utf8(v) => Value::Utf8(v[row].clone()),
        }
    }

    fn empty(ty: ColumnType) -> Self {
        match ty {
            ColumnType::Int64 => Column::Int64(Vec::new()),
            ColumnType::Utf8 => Column::Utf8(Vec::new()),
        }
    }

    /// Copies the given rows, in order.
    pub fn gather(&self, rows: &[u32]) -> Column {
        match self {
            Column::Int64(v) => Column::Int64(rows.iter().map(|&r| v[r as usize]).collect()),
            Column::Utf8(v) => {
                Column::Utf8(rows.iter().map(|&r| v[r as usize].clone()).collect())
            }
        }
    }

    pub(crate) fn keys(&self) -> KeyColumn<'_> {
        match self {
            Column::Int64(v) => KeyColumn::Int64(v),
            Column::Utf8(v) => KeyColumn::Utf8(v),
        }
    }
}

/// Borrowed view of a join-key column.
#[derive(Debug, Clone, Copy)]
pub(crate) enum KeyColumn<'a> {
    Int64(&'a [i64]),
    Utf8(&'a [String]),
}

impl<'a> KeyColumn<'a> {
    /// The 64-bit key a filter sees for this row. Utf8 values go through
    /// [`hash::utf8_key`].
    #[inline]
    pub fn filter_key(&self, row: u32) -> i64 {
        match self {
            KeyColumn::Int64(v) => v[row as usize],
            KeyColumn::Utf8(v) => hash::utf8_key(&v[row as usize]),
        }
    }

    /// The exact key, for hash tables.
    #[inline]
    pub fn atom(&self, row: u32) -> KeyAtom<'a> {
        match *self {
            KeyColumn::Int64(v) => KeyAtom::Int(v[row as usize]),
            KeyColumn::Utf8(v) => KeyAtom::Str(&v[row as usize]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum KeyAtom<'a> {
    Int(i64),
    Str(&'a str),
}

/// An immutable columnar relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    name: String,
    schema: Schema,
    columns: Vec<Column>,
    row_count: usize,
    // Join outputs carry table-qualified column names already.
    qualified: bool,
}

impl Table {
    pub fn new(name: impl Into<String>, schema: Schema, columns: Vec<Column>) -> Result<Self> {
        let name = name.into();
        if schema.len() != columns.len() {
            return Err(Error::InvalidSchema(format!(
                "table '{name}' has {} schema fields but {} columns",
                schema.len(),
                columns.len()
            )));
        }
        let row_count = columns.first().map_or(0, Column::len);
        for (field, col) in schema.fields().iter().zip(&columns) {
            if field.ty != col.column_type() {
                return Err(Error::TypeMismatch(format!(
                    "column '{}' of '{name}' declared {} but holds {}",
                    field.name,
                    field.ty,
                    col.column_type()
                )));
            }
            if col.len() != row_count {
                return Err(Error::InvalidSchema(format!(
                    "column '{}' of '{name}' has {} rows, expected {row_count}",
                    field.name,
                    col.len()
                )));
            }
        }
        if row_count > u32::MAX as usize {
            return Err(Error::InvalidSchema(format!(
                "table '{name}' exceeds {} rows",
                u32::MAX
            )));
        }
        Ok(Table {
            name,
            schema,
            columns,
            row_count,
            qualified: false,
        })
    }

    pub(crate) fn new_qualified(
        name: impl Into<String>,
        schema: Schema,
        columns: Vec<Column>,
    ) -> Result<Self> {
        let mut t = Table::new(name, schema, columns)?;
        t.qualified = true;
        Ok(t)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    /// True for join outputs, whose column names are already `table.column`.
    pub fn is_qualified(&self) -> bool {
        self.qualified
    }

    /// Resolves a column by name. Base tables also accept the qualified
    /// form `table.column`.
    pub fn column_index(&self, name: &str) -> Result<usize> {
        if let Some(i) = self.schema.index_of(name) {
            return Ok(i);
        }
        if !self.qualified {
            if let Some(rest) = name
                .strip_prefix(self.name.as_str())
                .and_then(|r| r.strip_prefix('.'))
            {
                if let Some(i) = self.schema.index_of(rest) {
                    return Ok(i);
                }
            }
        }
        Err(Error::unknown_column(&self.name, name))
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        Ok(&self.columns[self.column_index(name)?])
    }

    pub fn column_type(&self, name: &str) -> Result<ColumnType> {
        Ok(self.schema.fields()[self.column_index(name)?].ty)
    }

    /// Table-qualified name of column `idx`.
    pub fn qualified_name(&self, idx: usize) -> String {
        let field = &self.schema.fields()[idx].name;
        if self.qualified {
            field.clone()
        } else {
            format!("{}.{}", self.name, field)
        }
    }

    pub fn value(&self, column: usize, row: usize) -> Value {
        self.columns[column].value(row)
    }

    pub fn row(&self, row: usize) -> Vec<Value> {
        self.columns.iter().map(|c| c.value(row)).collect()
    }

    pub(crate) fn key_column(&self, name: &str) -> Result<KeyColumn<'_>> {
        Ok(self.column(name)?.keys())
    }

    /// Writes the table as RFC-4180 CSV with a header row.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
        w.write_record(self.schema.fields().iter().map(|f| f.name.as_str()))
            .map_err(|e| csv_io(path, e))?;
        let mut record = Vec::with_capacity(self.columns.len());
        for row in 0..self.row_count {
            record.clear();
            record.extend(self.columns.iter().map(|c| c.value(row).to_string()));
            w.write_record(&record).map_err(|e| csv_io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::SchemaMismatch {
            path: path.display().to_string(),
            row,
            detail: format!("{other:?}"),
        },
    }
}

/// Loads a CSV file whose header must list the schema's columns in order.
pub fn load_table(csv_path: &Path, schema: &Schema, name: &str) -> Result<Table> {
    let file = File::open(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(BufReader::new(file));
    let mismatch = |row: u64, detail: String| Error::SchemaMismatch {
        path: csv_path.display().to_string(),
        row,
        detail,
    };

    let header = reader.headers().map_err(|e| csv_io(csv_path, e))?.clone();
    let expected: Vec<&str> = schema.fields().iter().map(|f| f.name.as_str()).collect();
    let found: Vec<&str> = header.iter().collect();
    if found != expected {
        return Err(mismatch(
            1,
            format!("header {found:?} does not match schema {expected:?}"),
        ));
    }

    let mut columns: Vec<Column> = schema.fields().iter().map(|f| Column::empty(f.ty)).collect();
    for record in reader.records() {
        let record = record.map_err(|e| csv_io(csv_path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != columns.len() {
            return Err(mismatch(
                line,
                format!("expected {} fields, found {}", columns.len(), record.len()),
            ));
        }
        for ((cell, col), field) in record.iter().zip(columns.iter_mut()).zip(schema.fields()) {
            match col {
                Column::Int64(v) => v.push(cell.parse::<i64>().map_err(|_| {
                    mismatch(
                        line,
                        format!("column '{}': '{cell}' is not an int64", field.name),
                    )
                })?),
                Column::Utf8(v) => v.push(cell.to_string()),
            }
        }
    }
    Table::new(name, schema.clone(), columns)
}

/// Strictly increasing row indices of one table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSelection {
    table: String,
    rows: Vec<u32>,
}

impl RowSelection {
    /// Every row of `table`.
    pub fn all(table: &Table) -> Self {
        RowSelection {
            table: table.name.clone(),
            rows: (0..table.row_count as u32).collect(),
        }
    }

    pub fn empty(table: &str) -> Self {
        RowSelection {
            table: table.to_string(),
            rows: Vec::new(),
        }
    }

    /// Validates that `rows` is strictly increasing and in bounds.
    pub fn new(table: &Table, rows: Vec<u32>) -> Result<Self> {
        if rows.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSelection(
                "row indices must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = rows.last() {
            if last as usize >= table.row_count {
                return Err(Error::InvalidSelection(format!(
                    "row {last} out of bounds for '{}' ({} rows)",
                    table.name, table.row_count
                )));
            }
        }
        Ok(RowSelection {
            table: table.name.clone(),
            rows,
        })
    }

    /// Caller guarantees the ordering invariant.
    pub(crate) fn from_sorted(table: &str, rows: Vec<u32>) -> Self {
        debug_assert!(rows.windows(2).all(|w| w[0] < w[1]));
        RowSelection {
            table: table.to_string(),
            rows,
        }
    }

    pub fn table(&self) -> &str {
        &self.table
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn cardinality(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn intersect(&self, other: &RowSelection) -> RowSelection {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.rows.len() && j < other.rows.len() {
            match self.rows[i].cmp(&other.rows[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.rows[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        RowSelection::from_sorted(&self.table, out)
    }

    pub fn is_subset_of(&self, other: &RowSelection) -> bool {
        self.intersect(other).cardinality() == self.cardinality()
    }

    pub(crate) fn check_table(&self, table: &Table) -> Result<()> {
        if self.table != table.name {
            return Err(Error::SelectionMismatch {
                expected: table.name.clone(),
                found: self.table.clone(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparator {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    /// String prefix match; utf8 columns only.
    Prefix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalPredicate {
    pub column: String,
    pub op: Comparator,
    pub value: Value,
}

impl LocalPredicate {
    pub fn new(column: impl Into<String>, op: Comparator, value: impl Into<Value>) -> Self {
        LocalPredicate {
            column: column.into(),
            op,
            value: value.into(),
        }
    }
}

fn compare<T: Ord + ?Sized>(op: Comparator, lhs: &T, rhs: &T) -> bool {
    match op {
        Comparator::Eq => lhs == rhs,
        Comparator::Ne => lhs != rhs,
        Comparator::Lt => lhs < rhs,
        Comparator::Le => lhs <= rhs,
        Comparator::Gt => lhs > rhs,
        Comparator::Ge => lhs >= rhs,
        Comparator::Prefix => unreachable!("prefix is validated as utf8-only"),
    }
}

/// Conjunction of `predicates` over `table`; an empty list selects every row.
pub fn apply_predicates(table: &Table, predicates: &[LocalPredicate]) -> Result<RowSelection> {
    let mut bound = Vec::with_capacity(predicates.len());
    for p in predicates {
        let idx = table.column_index(&p.column)?;
        let ty = table.schema.fields()[idx].ty;
        if p.value.column_type() != ty {
            return Err(Error::TypeMismatch(format!(
                "predicate on {}.{} compares a {ty} column with a {} literal",
                table.name,
                p.column,
                p.value.column_type()
            )));
        }
        if p.op == Comparator::Prefix && ty != ColumnType::Utf8 {
            return Err(Error::TypeMismatch(format!(
                "prefix predicate on int64 column {}.{}",
                table.name, p.column
            )));
        }
        bound.push((idx, p));
    }

    let mut rows: Vec<u32> = (0..table.row_count as u32).collect();
    for (idx, p) in bound {
        match (&table.columns[idx], &p.value) {
            (Column::Int64(v), Value::Int64(lit)) => {
                rows.retain(|&r| compare(p.op, &v[r as usize], lit));
            }
            (Column::Utf8(v), Value::Utf8(lit)) => {
                if p.op == Comparator::Prefix {
                    rows.retain(|&r| v[r as usize].starts_with(lit.as_str()));
                } else {
                    rows.retain(|&r| compare(p.op, v[r as usize].as_str(), lit.as_str()));
                }
            }
            _ => unreachable!("literal type checked above"),
        }
    }
    Ok(RowSelection::from_sorted(&table.name, rows))
}

/// Copies the selected rows of the requested columns into a new table.
pub fn materialize(table: &Table, selection: &RowSelection, columns: &[&str]) -> Result<Table> {
    selection.check_table(table)?;
    let mut fields = Vec::with_capacity(columns.len());
    let mut data = Vec::with_capacity(columns.len());
    for name in columns {
        let idx = table.column_index(name)?;
        fields.push(table.schema.fields()[idx].clone());
        data.push(table.columns[idx].gather(&selection.rows));
    }
    let mut out = Table::new(table.name.clone(), Schema::new(fields)?, data)?;
    out.qualified = table.qualified;
    Ok(out)
}

/// Named collection of base tables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    tables: BTreeMap<String, Table>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, table: Table) {
        self.tables.insert(table.name.clone(), table);
    }

    pub fn get(&self, name: &str) -> Result<&Table> {
        self.tables
            .get(name)
            .ok_or_else(|| Error::UnknownTable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.tables.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Table> {
        self.tables.values()
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn total_rows(&self) -> usize {
        self.tables.values().map(Table::row_count).sum()
    }

    pub fn cardinalities(&self) -> BTreeMap<String, usize> {
        self.tables
            .iter()
            .map(|(k, t)| (k.clone(), t.row_count))
            .collect()
    }
}

impl FromIterator<Table> for Catalog {
    fn from_iter<I: IntoIterator<Item = Table>>(iter: I) -> Self {
        let mut c = Catalog::new();
        for t in iter {
            c.insert(t);
        }
        c
    }
}
