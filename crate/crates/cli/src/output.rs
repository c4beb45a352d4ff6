use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::Value;

use crate::exit::{CliError, CliResult};

/// Where a command's CSV report goes, and therefore where its JSON summary
/// goes: the summary takes stdout unless the CSV already does.
pub struct Report {
    pub csv: csv::Writer<Box<dyn Write>>,
    summary_on_stdout: bool,
}

impl Report {
    pub fn open(path: Option<&Path>) -> CliResult<Self> {
        let (sink, summary_on_stdout): (Box<dyn Write>, bool) = match path {
            Some(p) => {
                let f = File::create(p).map_err(|e| CliError::io(format!("cannot create {}: {e}", p.display())))?;
                (Box::new(BufWriter::new(f)), true)
            }
            None => (Box::new(io::stdout().lock()), false),
        };
        Ok(Self {
            csv: csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink),
            summary_on_stdout,
        })
    }

    pub fn finish(mut self, summary: Value) -> CliResult<()> {
        self.csv.flush()?;
        if self.summary_on_stdout {
            print_json(&summary);
        } else {
            eprintln!("{summary}");
        }
        Ok(())
    }
}

pub fn print_json(summary: &Value) {
    println!("{summary}");
}

/// Shortest decimal that reads back to the same double.
pub fn num(x: f64) -> String {
    format!("{x}")
}
