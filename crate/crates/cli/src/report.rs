//! JSON and CSV encodings. Complex values are `[re, im]` in JSON and two
//! columns in CSV; infinity is `"inf"`. CSV floats carry 17 significant digits.

use lame_core::{Complex64 as C, ExtComplex, Mat2};
use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

pub fn cx(z: C) -> Value {
    json!([z.re, z.im])
}

pub fn ext(z: ExtComplex) -> Value {
    match z {
        ExtComplex::Infinity => json!("inf"),
        ExtComplex::Finite(z) => cx(z),
    }
}

pub fn mat(m: &Mat2) -> Value {
    json!([[cx(m[(0, 0)]), cx(m[(0, 1)])], [cx(m[(1, 0)]), cx(m[(1, 1)])]])
}

pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A `field,re,im` table for reports that are not naturally tabular.
#[derive(Debug, Default)]
pub struct FieldTable {
    rows: Vec<String>,
}

impl FieldTable {
    pub fn complex(&mut self, name: &str, z: C) -> &mut Self {
        self.rows.push(format!("{name},{},{}", f17(z.re), f17(z.im)));
        self
    }

    pub fn ext(&mut self, name: &str, z: ExtComplex) -> &mut Self {
        match z {
            ExtComplex::Infinity => self.text(name, "inf"),
            ExtComplex::Finite(z) => self.complex(name, z),
        }
    }

    pub fn real(&mut self, name: &str, x: f64) -> &mut Self {
        self.rows.push(format!("{name},{},", f17(x)));
        self
    }

    pub fn text(&mut self, name: &str, s: &str) -> &mut Self {
        self.rows.push(format!("{name},{s},"));
        self
    }

    pub fn mat(&mut self, name: &str, m: &Mat2) -> &mut Self {
        for i in 0..2 {
            for j in 0..2 {
                self.complex(&format!("{name}[{i}{j}]"), m[(i, j)]);
            }
        }
        self
    }

    pub fn finish(&self) -> String {
        let mut s = String::from("field,re,im\n");
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}
