//! CSV tables and the text forms of traces and certificates.

use std::io::Write;

use ergopet_core::pet::ReductionTrace;

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// A vector as `a;b;c`.
pub fn vector(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

/// One line per step, then the final linear family:
/// `step=1 chose=2 h=h1 type_before=(2,1,0) type_after=(1,3)`.
pub fn trace_text(trace: &ReductionTrace) -> String {
    let mut s = String::new();
    for (k, st) in trace.steps.iter().enumerate() {
        s.push_str(&format!(
            "step={} chose={} h={} type_before={} type_after={}\n",
            k + 1,
            st.chosen_index + 1,
            st.shift,
            st.type_before,
            st.type_after
        ));
    }
    let leaders: Vec<String> = trace.leading_coefficients.iter().map(|c| c.to_string()).collect();
    s.push_str(&format!("final k={} leaders={}\n", trace.k, leaders.join("; ")));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 2f64.sqrt(), 123456789.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.5), "0.5");
        assert_eq!(vector(&[1.0, -1.0]), "1;-1");
    }

    #[test]
    fn header_is_always_written() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(t.to_csv_string(), "a,b\n");
    }
}
