//! Text interchange format for tensors:
//!
//! ```text
//! <design>,<property>,<width>
//! <v0>,<v1>,...,<v(width-1)>
//! ```
//!
//! Values are written in shortest round-trip decimal form, so export followed
//! by import reproduces every bit.

use std::path::Path;

use super::{EmbedError, EmbeddingTensor, Provider};

pub fn render_tensor(t: &EmbeddingTensor) -> String {
    let values: Vec<String> = t.values.iter().map(|v| format!("{v}")).collect();
    format!("{},{},{}\n{}\n", t.design, t.property, t.width(), values.join(","))
}

pub fn parse_tensor(text: &str) -> Result<EmbeddingTensor, EmbedError> {
    let malformed = |m: String| EmbedError::MalformedTensorFile(m);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| malformed("missing header".into()))?;
    let body = lines.next().ok_or_else(|| malformed("missing values line".into()))?;
    if lines.next().is_some() {
        return Err(malformed("unexpected trailing lines".into()));
    }

    // the design id may itself contain commas
    let mut fields = header.trim().rsplitn(3, ',');
    let width = fields.next();
    let property = fields.next();
    let design = fields.next();
    let (Some(design), Some(property), Some(width)) = (design, property, width) else {
        return Err(malformed(format!("bad header {header:?}")));
    };
    let property: usize = property
        .trim()
        .parse()
        .map_err(|_| malformed(format!("bad property ordinal {property:?}")))?;
    let width: usize = width
        .trim()
        .parse()
        .map_err(|_| malformed(format!("bad width {width:?}")))?;
    if width == 0 {
        return Err(malformed("width must be positive".into()));
    }

    let values = body
        .split(',')
        .map(|v| {
            let x: f64 = v.trim().parse().map_err(|_| malformed(format!("bad value {v:?}")))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(malformed(format!("non-finite value {v:?}")))
            }
        })
        .collect::<Result<Vec<f64>, EmbedError>>()?;
    if values.len() != width {
        return Err(malformed(format!("header declares {width} values, found {}", values.len())));
    }
    Ok(EmbeddingTensor {
        design: design.trim().to_string(),
        property,
        values,
        provider: Provider::Imported,
    })
}

pub fn import_tensor(path: &Path) -> Result<EmbeddingTensor, EmbedError> {
    let text = std::fs::read_to_string(path).map_err(|e| EmbedError::Io(format!("{}: {e}", path.display())))?;
    parse_tensor(&text)
}

pub fn export_tensor(t: &EmbeddingTensor, path: &Path) -> Result<(), EmbedError> {
    std::fs::write(path, render_tensor(t)).map_err(|e| EmbedError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(width: usize, n: usize) -> String {
        let vals: Vec<String> = (0..n).map(|i| format!("{}", i as f64 * 0.1)).collect();
        format!("d,3,{width}\n{}\n", vals.join(","))
    }

    #[test]
    fn accepts_declared_width() {
        let t = parse_tensor(&text(128, 128)).unwrap();
        assert_eq!((t.width(), t.property, t.provider), (128, 3, Provider::Imported));
    }

    #[test]
    fn rejects_short_body() {
        assert!(matches!(parse_tensor(&text(128, 127)), Err(EmbedError::MalformedTensorFile(_))));
    }

    #[test]
    fn rejects_non_finite_and_garbage() {
        assert!(parse_tensor("d,0,2\n1,NaN\n").is_err());
        assert!(parse_tensor("d,0,2\n1,x\n").is_err());
        assert!(parse_tensor("d,0\n1\n").is_err());
        assert!(parse_tensor("").is_err());
    }

    #[test]
    fn comma_in_design_id() {
        let t = parse_tensor("a,b,1,1\n0.5\n").unwrap();
        assert_eq!(t.design, "a,b");
        assert_eq!(parse_tensor(&render_tensor(&t)).unwrap(), t);
    }

    #[test]
    fn file_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let t = EmbeddingTensor {
            design: "x".into(),
            property: 1,
            values: vec![0.1 + 0.2, 1.0 / 3.0, -2.5e-300, 0.0],
            provider: Provider::Imported,
        };
        export_tensor(&t, &path).unwrap();
        let back = import_tensor(&path).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back.values), bits(&t.values));
        assert_eq!(render_tensor(&back), render_tensor(&t));
    }
}
