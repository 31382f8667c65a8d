use std::fmt::Display;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A flat output row: one CSV line, or one JSON object.
pub trait Record: Serialize {
    const HEADER: &'static [&'static str];

    fn fields(&self) -> Vec<String>;
}

pub fn render<R: Record>(rows: &[R], format: Format) -> anyhow::Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(R::HEADER)?;
            for row in rows {
                w.write_record(row.fields())?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Json => {
            let mut text = serde_json::to_string_pretty(rows)?;
            text.push('\n');
            Ok(text)
        }
    }
}

pub fn fmt<T: Display>(v: T) -> String {
    v.to_string()
}

pub fn fixed3(v: f64) -> String {
    format!("{v:.3}")
}

pub fn opt<T: Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn join<T: Display>(items: &[T]) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";")
}

/// Serializes an `f64` rounded to three decimals as a JSON number.
pub fn ser_fixed3<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    let rounded: f64 = fixed3(*v).parse().expect("formatted float parses");
    s.serialize_f64(rounded)
}
