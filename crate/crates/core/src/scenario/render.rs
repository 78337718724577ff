use std::fmt::Write;

use super::ScenarioSpec;
use crate::apparatus::Matrix;
use crate::linalg::Cx;

/// 17 significant digits, enough for an exact round trip.
pub fn render_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_cx(z: Cx) -> String {
    if z.im == 0.0 {
        render_number(z.re)
    } else if z.re == 0.0 {
        format!("{}i", render_number(z.im))
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", render_number(z.re), render_number(z.im.abs()))
    }
}

fn render_row(row: &[Cx]) -> String {
    row.iter().map(|&z| render_cx(z)).collect::<Vec<_>>().join(", ")
}

fn render_matrix(m: &Matrix, indent: &str) -> String {
    let rows: Vec<String> = m.iter().map(|r| format!("{indent}  {}", render_row(r))).collect();
    format!("[\n{}\n{indent}]", rows.join(" ;\n"))
}

fn names(v: &[String]) -> String {
    format!("[{}]", v.join(", "))
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Canonical text form. Sections come in a fixed order and every option is
/// written out.
pub fn render(spec: &ScenarioSpec) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "scenario {} {{", quote(&spec.name));
    let _ = writeln!(w, "  space dim = {} basis = {}", spec.basis_labels.len(), names(&spec.basis_labels));
    for (name, amps) in &spec.states {
        let _ = writeln!(w, "  state {name} = {}", render_row(amps));
    }
    for (name, labels) in &spec.bases {
        let _ = writeln!(w, "  basis {name} = {}", names(labels));
    }
    for (name, m) in &spec.unitaries {
        let _ = writeln!(w, "  unitary {name} = {}", render_matrix(m, "  "));
    }
    if let Some(h) = &spec.hamiltonian {
        let _ = writeln!(w, "  hamiltonian {{");
        for (e, vecs) in &h.levels {
            let _ = writeln!(w, "    level {} : {}", render_number(*e), vecs.join(" "));
        }
        let _ = writeln!(w, "  }} duration = {}", render_number(h.duration));
    }

    let m = &spec.measure;
    let _ = writeln!(w, "  measure {{");
    let blocks: Vec<String> = m.blocks.iter().map(|b| names(b)).collect();
    let _ = writeln!(w, "    blocks = {}", blocks.join(" "));
    if let Some(values) = &m.values {
        let vs: Vec<String> = values.iter().map(|&v| render_number(v)).collect();
        let _ = writeln!(w, "    values = [{}]", vs.join(", "));
    }
    let _ = writeln!(w, "    mode = {}", m.mode.keyword());
    for (k, d) in &m.d {
        let _ = writeln!(w, "    d {k} = {}", render_matrix(d, "    "));
    }
    let _ = writeln!(w, "  }}");

    for (kw, s) in [("preselect", &spec.preselect), ("postselect", &spec.postselect)] {
        let init = s.initial.as_ref().map(|i| format!(" initial = {i}")).unwrap_or_default();
        let _ = writeln!(w, "  {kw} {{ basis = {} index = {}{init} }}", s.basis, s.index);
    }

    let o = &spec.options;
    let _ = writeln!(w, "  options {{");
    let _ = writeln!(w, "    tol = {}", render_number(o.tol));
    let _ = writeln!(w, "    strict_norm = {}", o.strict_norm);
    let _ = writeln!(w, "    strict_d = {}", o.strict_d);
    let _ = writeln!(w, "    reset = {}", o.reset);
    if let Some(t) = o.target {
        let _ = writeln!(w, "    target = {t}");
    }
    if let Some(ps) = &o.processes {
        let ps: Vec<&str> = ps.iter().map(|p| p.roman()).collect();
        let _ = writeln!(w, "    processes = [{}]", ps.join(", "));
    }
    let _ = writeln!(w, "  }}");
    let _ = writeln!(w, "}}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [1.0 / 3.0, -2.5e-300, 1e300, 0.1, std::f64::consts::PI] {
            assert_eq!(render_number(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(render_number(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn complex_forms() {
        assert_eq!(render_cx(Cx::new(0.0, -1.0)), "-1.0000000000000000e0i");
        assert_eq!(render_cx(Cx::new(1.0, -0.5)), "1.0000000000000000e0-5.0000000000000000e-1i");
        assert_eq!(render_cx(Cx::new(-2.0, 0.0)), "-2.0000000000000000e0");
    }
}
