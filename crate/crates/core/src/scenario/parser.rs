use super::lexer::{lex, Tok, Token};
use super::{HamiltonianSpec, Locations, MeasureSpec, OptionsSpec, ScenarioSpec, SelectSpec, UNITARY_NAMES};
use crate::apparatus::{Matrix, Mode};
use crate::error::{Error, Result};
use crate::linalg::Cx;
use crate::timesym::ProcessTag;

/// States further than this from unit norm are rescaled (or rejected under
/// `strict_norm`).
const NORM_SLACK: f64 = 1e-12;

pub fn parse(text: &str) -> Result<ScenarioSpec> {
    parse_with_warnings(text).map(|(s, _)| s)
}

/// Parse and validate; also returns warnings such as auto-normalised states.
pub fn parse_with_warnings(text: &str) -> Result<(ScenarioSpec, Vec<String>)> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, locs: Locations::new() };
    let mut spec = p.scenario()?;
    let mut warnings = Vec::new();

    for (name, amps) in spec.states.iter_mut() {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_SLACK {
            let (line, col) = p.loc(&format!("state:{name}"));
            if spec.options.strict_norm || norm == 0.0 {
                return Err(Error::Semantic { line, col, message: format!("state `{name}` has norm {norm}") });
            }
            for z in amps.iter_mut() {
                *z /= norm;
            }
            warnings.push(format!("state `{name}` normalised (norm was {norm})"));
        }
    }

    if let Err(e) = spec.build_located() {
        let (line, col) = p.loc(&e.section);
        return Err(Error::Semantic { line, col, message: e.error.to_string() });
    }
    Ok((spec, warnings))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    locs: Locations,
}

type Res<T> = Result<T>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn loc(&self, section: &str) -> (usize, usize) {
        self.locs
            .get(section)
            .or_else(|| section.split(':').next().and_then(|s| self.locs.get(s)))
            .copied()
            .unwrap_or((1, 1))
    }

    fn mark(&mut self, section: String) {
        let at = (self.peek().line, self.peek().col);
        self.locs.entry(section).or_insert(at);
    }

    fn error<T>(&self, message: impl Into<String>) -> Res<T> {
        let t = self.peek();
        Err(Error::Parse { line: t.line, col: t.col, message: message.into(), token: t.text.clone() })
    }

    fn semantic<T>(&self, tok: &Token, message: impl Into<String>) -> Res<T> {
        Err(Error::Semantic { line: tok.line, col: tok.col, message: message.into() })
    }

    fn sym(&mut self, c: char) -> Res<()> {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected `{c}`"))
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn kw(&mut self, kw: &str) -> Res<()> {
        if self.is_kw(kw) {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected `{kw}`"))
        }
    }

    /// Identifier; all-digit numbers count as identifiers here.
    fn ident(&mut self) -> Res<String> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            Tok::Num { raw, .. } if raw.chars().all(|c| c.is_ascii_digit()) => {
                let s = raw.clone();
                self.next();
                Ok(s)
            }
            _ => self.error("expected a name"),
        }
    }

    fn integer(&mut self) -> Res<usize> {
        match &self.peek().tok {
            Tok::Num { raw, .. } if raw.chars().all(|c| c.is_ascii_digit()) => {
                let v = raw.parse().map_err(|_| ());
                match v {
                    Ok(v) => {
                        self.next();
                        Ok(v)
                    }
                    Err(()) => self.error("integer too large"),
                }
            }
            _ => self.error("expected a non-negative integer"),
        }
    }

    fn boolean(&mut self) -> Res<bool> {
        if self.is_kw("true") {
            self.next();
            Ok(true)
        } else if self.is_kw("false") {
            self.next();
            Ok(false)
        } else {
            self.error("expected `true` or `false`")
        }
    }

    fn sign(&mut self) -> f64 {
        if self.is_sym('-') {
            self.next();
            -1.0
        } else {
            if self.is_sym('+') {
                self.next();
            }
            1.0
        }
    }

    /// atom := NUMBER | sqrt(term)
    fn atom(&mut self) -> Res<f64> {
        match self.peek().tok.clone() {
            Tok::Num { value, .. } => {
                self.next();
                Ok(value)
            }
            Tok::Ident(s) if s == "sqrt" => {
                self.next();
                self.sym('(')?;
                let t = self.peek().clone();
                let v = self.term()?;
                if v < 0.0 {
                    return self.semantic(&t, "square root of a negative number");
                }
                self.sym(')')?;
                Ok(v.sqrt())
            }
            _ => self.error("expected a number"),
        }
    }

    /// term := atom ['/' atom]
    fn term(&mut self) -> Res<f64> {
        let a = self.atom()?;
        if self.is_sym('/') {
            self.next();
            let t = self.peek().clone();
            let b = self.atom()?;
            if b == 0.0 {
                return self.semantic(&t, "division by zero");
            }
            return Ok(a / b);
        }
        Ok(a)
    }

    fn real(&mut self) -> Res<f64> {
        let s = self.sign();
        let v = self.term()?;
        if self.peek().tok == Tok::Imag {
            return self.error("expected a real number");
        }
        Ok(s * v)
    }

    /// re | im i | re ± im i
    fn complex(&mut self) -> Res<Cx> {
        let s1 = self.sign();
        let t1 = s1 * self.term()?;
        if self.peek().tok == Tok::Imag {
            self.next();
            return Ok(Cx::new(0.0, t1));
        }
        if self.is_sym('+') || self.is_sym('-') {
            let s2 = self.sign();
            let t2 = s2 * self.term()?;
            if self.peek().tok != Tok::Imag {
                return self.error("expected imaginary part ending in `i`");
            }
            self.next();
            return Ok(Cx::new(t1, t2));
        }
        Ok(Cx::new(t1, 0.0))
    }

    fn complex_list(&mut self) -> Res<Vec<Cx>> {
        let mut v = vec![self.complex()?];
        while self.is_sym(',') {
            self.next();
            v.push(self.complex()?);
        }
        Ok(v)
    }

    fn matrix(&mut self) -> Res<Matrix> {
        self.sym('[')?;
        let mut rows = vec![self.complex_list()?];
        while self.is_sym(';') {
            self.next();
            rows.push(self.complex_list()?);
        }
        self.sym(']')?;
        Ok(rows)
    }

    fn name_list(&mut self) -> Res<Vec<String>> {
        self.sym('[')?;
        let mut v = vec![self.ident()?];
        while self.is_sym(',') {
            self.next();
            v.push(self.ident()?);
        }
        self.sym(']')?;
        Ok(v)
    }

    fn real_list(&mut self) -> Res<Vec<f64>> {
        self.sym('[')?;
        let mut v = vec![self.real()?];
        while self.is_sym(',') {
            self.next();
            v.push(self.real()?);
        }
        self.sym(']')?;
        Ok(v)
    }

    fn scenario(&mut self) -> Res<ScenarioSpec> {
        self.kw("scenario")?;
        let name = match self.next().tok {
            Tok::Str(s) => s,
            _ => {
                self.pos -= 1;
                return self.error("expected the scenario name as a string");
            }
        };
        self.sym('{')?;

        let mut space: Option<Vec<String>> = None;
        let mut states: Vec<(String, Vec<Cx>)> = Vec::new();
        let mut bases: Vec<(String, Vec<String>)> = Vec::new();
        let mut unitaries: Vec<(String, Matrix)> = Vec::new();
        let mut hamiltonian = None;
        let mut measure = None;
        let mut pre = None;
        let mut post = None;
        let mut options = None;

        while !self.is_sym('}') {
            let head = self.peek().clone();
            let kw = match &head.tok {
                Tok::Ident(s) => s.clone(),
                Tok::Eof => return self.error("missing `}` at end of scenario"),
                _ => return self.error("expected a section keyword"),
            };
            let dup = |p: &Self, what: &str| p.semantic::<()>(&head, format!("duplicate `{what}` section"));
            match kw.as_str() {
                "space" => {
                    if space.is_some() {
                        dup(self, "space")?;
                    }
                    self.mark("space".into());
                    self.next();
                    self.kw("dim")?;
                    self.sym('=')?;
                    let dim_tok = self.peek().clone();
                    let dim = self.integer()?;
                    self.kw("basis")?;
                    self.sym('=')?;
                    let labels = self.name_list()?;
                    if dim != labels.len() {
                        return self.semantic(&dim_tok, format!("dim = {dim} but {} basis labels", labels.len()));
                    }
                    space = Some(labels);
                }
                "state" => {
                    self.next();
                    let nt = self.peek().clone();
                    let n = self.ident()?;
                    if states.iter().any(|(s, _)| *s == n) {
                        return self.semantic(&nt, format!("state `{n}` declared twice"));
                    }
                    self.locs.insert(format!("state:{n}"), (nt.line, nt.col));
                    self.sym('=')?;
                    states.push((n, self.complex_list()?));
                }
                "basis" => {
                    self.next();
                    let nt = self.peek().clone();
                    let n = self.ident()?;
                    if bases.iter().any(|(s, _)| *s == n) {
                        return self.semantic(&nt, format!("basis `{n}` declared twice"));
                    }
                    self.locs.insert(format!("basis:{n}"), (nt.line, nt.col));
                    self.sym('=')?;
                    bases.push((n, self.name_list()?));
                }
                "unitary" => {
                    self.next();
                    let nt = self.peek().clone();
                    let n = self.ident()?;
                    if !UNITARY_NAMES.contains(&n.as_str()) {
                        return self.semantic(&nt, format!("unknown unitary `{n}` (expected ca, bc or theta)"));
                    }
                    if unitaries.iter().any(|(s, _)| *s == n) {
                        return self.semantic(&nt, format!("unitary `{n}` declared twice"));
                    }
                    self.locs.insert(format!("unitary:{n}"), (nt.line, nt.col));
                    self.sym('=')?;
                    unitaries.push((n, self.matrix()?));
                }
                "hamiltonian" => {
                    if hamiltonian.is_some() {
                        dup(self, "hamiltonian")?;
                    }
                    self.mark("hamiltonian".into());
                    self.next();
                    hamiltonian = Some(self.hamiltonian()?);
                }
                "measure" => {
                    if measure.is_some() {
                        dup(self, "measure")?;
                    }
                    self.mark("measure".into());
                    self.next();
                    measure = Some(self.measure()?);
                }
                "preselect" | "postselect" => {
                    let slot = if kw == "preselect" { &pre } else { &post };
                    if slot.is_some() {
                        dup(self, &kw)?;
                    }
                    self.mark(kw.clone());
                    self.next();
                    let s = self.select()?;
                    if kw == "preselect" {
                        pre = Some(s);
                    } else {
                        post = Some(s);
                    }
                }
                "options" => {
                    if options.is_some() {
                        dup(self, "options")?;
                    }
                    self.mark("options".into());
                    self.next();
                    options = Some(self.options()?);
                }
                other => return self.error(format!("unknown section `{other}`")),
            }
        }
        let close = self.peek().clone();
        self.sym('}')?;
        if self.peek().tok != Tok::Eof {
            return self.error("unexpected text after the scenario");
        }
        let missing = |what: &str| Error::Semantic { line: close.line, col: close.col, message: format!("missing `{what}` section") };
        Ok(ScenarioSpec {
            name,
            basis_labels: space.ok_or_else(|| missing("space"))?,
            states,
            bases,
            unitaries,
            hamiltonian,
            measure: measure.ok_or_else(|| missing("measure"))?,
            preselect: pre.ok_or_else(|| missing("preselect"))?,
            postselect: post.ok_or_else(|| missing("postselect"))?,
            options: options.unwrap_or_default(),
        })
    }

    fn hamiltonian(&mut self) -> Res<HamiltonianSpec> {
        self.sym('{')?;
        let mut levels = Vec::new();
        while self.is_kw("level") {
            self.next();
            let e = self.real()?;
            self.sym(':')?;
            let mut names = vec![self.ident()?];
            while !self.is_kw("level") && !self.is_sym('}') {
                names.push(self.ident()?);
            }
            levels.push((e, names));
        }
        if levels.is_empty() {
            return self.error("expected `level`");
        }
        self.sym('}')?;
        self.kw("duration")?;
        self.sym('=')?;
        let duration = self.real()?;
        Ok(HamiltonianSpec { levels, duration })
    }

    fn measure(&mut self) -> Res<MeasureSpec> {
        self.sym('{')?;
        self.kw("blocks")?;
        self.sym('=')?;
        let mut blocks = vec![self.name_list()?];
        while self.is_sym('[') {
            blocks.push(self.name_list()?);
        }
        let mut values = None;
        if self.is_kw("values") {
            self.next();
            self.sym('=')?;
            values = Some(self.real_list()?);
        }
        self.kw("mode")?;
        self.sym('=')?;
        let mt = self.peek().clone();
        let m = self.ident()?;
        let mode = match Mode::from_keyword(&m) {
            Some(m) => m,
            None => {
                return Err(Error::Parse {
                    line: mt.line,
                    col: mt.col,
                    message: "unknown mode (expected nondegenerate, coarse, fine or twostep)".into(),
                    token: m,
                })
            }
        };
        let mut d = Vec::new();
        while self.is_kw("d") {
            self.next();
            let kt = self.peek().clone();
            let k = self.integer()?;
            if d.iter().any(|(j, _)| *j == k) {
                return self.semantic(&kt, format!("d {k} given twice"));
            }
            self.sym('=')?;
            d.push((k, self.matrix()?));
        }
        self.sym('}')?;
        Ok(MeasureSpec { blocks, values, mode, d })
    }

    fn select(&mut self) -> Res<SelectSpec> {
        self.sym('{')?;
        self.kw("basis")?;
        self.sym('=')?;
        let basis = self.ident()?;
        self.kw("index")?;
        self.sym('=')?;
        let index = self.integer()?;
        let mut initial = None;
        if self.is_kw("initial") {
            self.next();
            self.sym('=')?;
            initial = Some(self.ident()?);
        }
        self.sym('}')?;
        Ok(SelectSpec { basis, index, initial })
    }

    fn options(&mut self) -> Res<OptionsSpec> {
        self.sym('{')?;
        let mut o = OptionsSpec::default();
        let mut seen: Vec<String> = Vec::new();
        while !self.is_sym('}') {
            let kt = self.peek().clone();
            let key = self.ident()?;
            if seen.contains(&key) {
                return self.semantic(&kt, format!("option `{key}` given twice"));
            }
            seen.push(key.clone());
            self.sym('=')?;
            match key.as_str() {
                "tol" => {
                    let vt = self.peek().clone();
                    o.tol = self.real()?;
                    if !(o.tol > 0.0 && o.tol < 1.0) {
                        return self.semantic(&vt, "tol must lie in (0, 1)");
                    }
                }
                "strict_norm" => o.strict_norm = self.boolean()?,
                "strict_d" => o.strict_d = self.boolean()?,
                "reset" => o.reset = self.boolean()?,
                "target" => o.target = Some(self.integer()?),
                "processes" => {
                    self.sym('[')?;
                    let mut ps = Vec::new();
                    loop {
                        let pt = self.peek().clone();
                        let name = self.ident()?;
                        match ProcessTag::parse(&name) {
                            Some(p) if !ps.contains(&p) => ps.push(p),
                            Some(_) => return self.semantic(&pt, format!("process `{name}` listed twice")),
                            None => return self.semantic(&pt, format!("unknown process `{name}`")),
                        }
                        if self.is_sym(',') {
                            self.next();
                        } else {
                            break;
                        }
                    }
                    self.sym(']')?;
                    o.processes = Some(ps);
                }
                _ => return self.semantic(&kt, format!("unknown option `{key}`")),
            }
        }
        self.sym('}')?;
        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
scenario "min" {
  space dim = 3 basis = [x, y, z]
  state a = 1, 1, 1
  basis pre = [a]
  basis post = [x]
  measure { blocks = [x] [y] [z] mode = nondegenerate }
  preselect { basis = pre index = 0 }
  postselect { basis = post index = 0 }
}
"#;

    #[test]
    fn minimal_parses_and_normalises() {
        let (spec, warnings) = parse_with_warnings(MINIMAL).unwrap();
        assert_eq!(spec.basis_labels.len(), 3);
        assert_eq!(warnings.len(), 1);
        let a = spec.state("a").unwrap();
        assert!((a[0].re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn strict_norm_rejects() {
        let text = MINIMAL.replace("postselect { basis = post index = 0 }", "postselect { basis = post index = 0 }\n  options { strict_norm = true }");
        let e = parse(&text).unwrap_err();
        assert_eq!(e.location(), Some((4, 9)));
    }

    #[test]
    fn folded_literals() {
        let text = MINIMAL.replace("state a = 1, 1, 1", "state a = 1/sqrt(3), -1/sqrt(3)i, sqrt(1/3)");
        let spec = parse(&text).unwrap();
        let a = spec.state("a").unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((a[1] - Cx::new(0.0, -r)).norm() < 1e-15);
        assert!((a[2] - Cx::new(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_with_both_parts() {
        let text = MINIMAL.replace("state a = 1, 1, 1", "state a = 0.5+0.5i, 0.5-0.5i, 0");
        let a = parse(&text).unwrap().state("a").unwrap().to_vec();
        assert_eq!(a[1], Cx::new(0.5, -0.5));
    }
}
