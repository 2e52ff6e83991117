use std::io::Write;

use crate::error::Result;
use crate::logic::{parse_program, Theory};

/// Writes a `% size: N` header (literals, heads included) followed by one
/// clause per line.
pub fn write_theory(w: &mut impl Write, theory: &Theory) -> Result<()> {
    writeln!(w, "% size: {}", theory.size())?;
    write!(w, "{theory}")?;
    Ok(())
}

pub fn render_theory(theory: &Theory) -> String {
    let mut buf = Vec::new();
    write_theory(&mut buf, theory).expect("writing to memory");
    String::from_utf8(buf).expect("clauses render as UTF-8")
}

pub fn parse_theory(text: &str) -> Result<Theory> {
    Ok(Theory::new(parse_program(text)?))
}
