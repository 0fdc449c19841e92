//! Equation files: an `[equation]` table with `a0..a3` and an optional `[map]` table with `f1, f2`.
//!
//! ```text
//! [equation]
//! a0 = "y^2"   # missing coefficients default to 0
//! a3 = "1"
//!
//! [map]
//! f1 = "x + y^2"
//! f2 = "y"
//! ```

use super::{parse_expr, CoeffExpr, Equation};
use crate::error::{Error, Result};
use serde::Deserialize;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    equation: Option<RawEquation>,
    map: Option<RawMap>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquation {
    a0: Option<String>,
    a1: Option<String>,
    a2: Option<String>,
    a3: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    f1: String,
    f2: String,
}

#[derive(Clone, Debug)]
pub struct EquationFile {
    pub equation: Option<Equation>,
    pub map: Option<(CoeffExpr, CoeffExpr)>,
}

fn field(name: &str, text: &str) -> Result<CoeffExpr> {
    parse_expr(text).map_err(|e| match e {
        Error::Parse { offset, message } => Error::Input(format!("{name}: syntax error at offset {offset}: {message}")),
        other => other,
    })
}

pub fn parse_equation_file(text: &str) -> Result<EquationFile> {
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let at = e.span().map(|s| format!(" at offset {}", s.start)).unwrap_or_default();
        Error::Input(format!("malformed equation file{at}: {}", e.message()))
    })?;
    let equation = match raw.equation {
        Some(eq) => {
            let get = |name: &str, v: &Option<String>| field(name, v.as_deref().unwrap_or("0"));
            Some(Equation { a: [get("a0", &eq.a0)?, get("a1", &eq.a1)?, get("a2", &eq.a2)?, get("a3", &eq.a3)?] })
        }
        None => None,
    };
    let map = match raw.map {
        Some(m) => Some((field("f1", &m.f1)?, field("f2", &m.f2)?)),
        None => None,
    };
    Ok(EquationFile { equation, map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn reads_blocks_and_comments() {
        let f =
            parse_equation_file("# demo\n[equation]\na0 = \"y^2\"  # comment\n a3=\"1\"\n[map]\nf1=\"y\"\nf2=\"x\"\n")
                .unwrap();
        let eq = f.equation.unwrap();
        assert_eq!(eq.a[0].eval(&(q(0), q(3))).unwrap(), q(9));
        assert!(eq.a[1].is_zero_const());
        assert!(f.map.is_some());
    }

    #[test]
    fn reports_positions() {
        let e = parse_equation_file("[equation]\na0 = \"x*(y\"\n").unwrap_err();
        assert_eq!(e, Error::Input("a0: syntax error at offset 4: expected ')'".into()));
        assert!(matches!(parse_equation_file("[equation\n"), Err(Error::Input(m)) if m.contains("offset")));
        assert!(parse_equation_file("[equation]\nb0 = \"1\"\n").is_err());
    }
}
