use mucalc_formula::{is_ident_char, is_ident_start};

use crate::model::{BuildError, Builder, Model, ModelKind};
use crate::valuation::Valuation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Model { line: usize, source: BuildError },
    #[error("missing `{0}` line")]
    Missing(&'static str),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Trans,
    Tick,
    Delays,
}

fn syntax(line: usize, msg: impl Into<String>) -> LoadError {
    LoadError::Syntax { line, msg: msg.into() }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap().trim()
}

/// Parses the line-oriented model format:
///
/// ```text
/// model: lts | tts
/// states: s0 s1 ...
/// alphabet: a b ...        (optional)
/// trans:
///   <src> <action> <dst>
/// tick:                    (tts only)
///   <src> <dst>
/// ```
///
/// A `delays:` section with `<src> <delta> <dst>` rows attaches a raw delay
/// table, read only by the axiom validator.
pub fn load_model(text: &str) -> Result<Model, LoadError> {
    let mut kind = None;
    let mut builder: Option<Builder> = None;
    let mut section = Section::None;
    let mut raw: Option<Vec<(usize, usize, usize)>> = None;
    let mut pending_alphabet = false;
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw_line);
        if line.is_empty() {
            continue;
        }
        let model_err = |source| LoadError::Model { line: line_no, source };
        if let Some((key, rest)) = line.split_once(':') {
            let key = key.trim();
            let words: Vec<&str> = rest.split_whitespace().collect();
            match key {
                "model" => {
                    if kind.is_some() {
                        return Err(syntax(line_no, "duplicate `model` line"));
                    }
                    kind = Some(match words.as_slice() {
                        ["lts"] => ModelKind::Lts,
                        ["tts"] => ModelKind::Tts,
                        _ => return Err(syntax(line_no, "expected `lts` or `tts`")),
                    });
                    section = Section::None;
                }
                "states" => {
                    let k = kind.ok_or_else(|| syntax(line_no, "`states` before `model`"))?;
                    if builder.is_some() {
                        return Err(syntax(line_no, "duplicate `states` line"));
                    }
                    let mut b = Builder::new(k);
                    for w in words {
                        check_name(line_no, w)?;
                        b.state(w).map_err(model_err)?;
                    }
                    builder = Some(b);
                    pending_alphabet = true;
                    section = Section::None;
                }
                "alphabet" => {
                    let b = builder.as_mut().ok_or_else(|| syntax(line_no, "`alphabet` before `states`"))?;
                    if !pending_alphabet {
                        return Err(syntax(line_no, "`alphabet` must directly follow `states`"));
                    }
                    for w in words {
                        check_name(line_no, w)?;
                        b.action(w).map_err(model_err)?;
                    }
                    b.closed_alphabet = true;
                    section = Section::None;
                }
                "trans" | "tick" | "delays" => {
                    if !words.is_empty() {
                        return Err(syntax(line_no, format!("`{key}:` takes no arguments")));
                    }
                    if builder.is_none() {
                        return Err(syntax(line_no, format!("`{key}` before `states`")));
                    }
                    section = match key {
                        "trans" => Section::Trans,
                        "tick" => Section::Tick,
                        _ => {
                            if kind != Some(ModelKind::Tts) {
                                return Err(syntax(line_no, "`delays` is only allowed in tts models"));
                            }
                            raw.get_or_insert_with(Vec::new);
                            Section::Delays
                        }
                    };
                }
                _ => return Err(syntax(line_no, format!("unknown key `{key}`"))),
            }
            if key != "states" {
                pending_alphabet = false;
            }
            continue;
        }
        pending_alphabet = false;
        let b = builder.as_mut().ok_or_else(|| syntax(line_no, "row before `states`"))?;
        let words: Vec<&str> = line.split_whitespace().collect();
        match (section, words.as_slice()) {
            (Section::Trans, [s, a, t]) => {
                check_name(line_no, a)?;
                b.transition(s, a, t).map_err(model_err)?
            }
            (Section::Tick, [s, t]) => b.tick(s, t).map_err(model_err)?,
            (Section::Delays, [s, d, t]) => {
                let d: usize = d.parse().map_err(|_| syntax(line_no, format!("bad delay `{d}`")))?;
                let (s, t) = (b.state_id(s).map_err(model_err)?, b.state_id(t).map_err(model_err)?);
                raw.as_mut().unwrap().push((s, d, t));
            }
            (Section::None, _) => return Err(syntax(line_no, "row outside a section")),
            (Section::Trans, _) => return Err(syntax(line_no, "expected `<src> <action> <dst>`")),
            (Section::Tick, _) => return Err(syntax(line_no, "expected `<src> <dst>`")),
            (Section::Delays, _) => return Err(syntax(line_no, "expected `<src> <delta> <dst>`")),
        }
    }
    kind.ok_or(LoadError::Missing("model"))?;
    let mut model = builder.ok_or(LoadError::Missing("states"))?.finish();
    if let Some(rows) = raw {
        model.set_raw_delays(rows);
    }
    Ok(model)
}

fn check_name(line: usize, w: &str) -> Result<(), LoadError> {
    let mut chars = w.chars();
    let ok = chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char);
    if ok {
        Ok(())
    } else {
        Err(syntax(line, format!("bad name `{w}`")))
    }
}

/// Parses valuation lines `<Var>: s0 s1 ...`.
pub fn load_valuation(text: &str, model: &Model) -> Result<Valuation, LoadError> {
    let mut v = Valuation::empty(model);
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw_line);
        if line.is_empty() {
            continue;
        }
        let (z, rest) = line.split_once(':').ok_or_else(|| syntax(line_no, "expected `<Var>: states`"))?;
        let z = z.trim();
        check_name(line_no, z)?;
        if z.contains('#') {
            return Err(syntax(line_no, format!("`{z}` is a reserved name")));
        }
        if v.is_bound(z) {
            return Err(syntax(line_no, format!("duplicate variable `{z}`")));
        }
        let mut s = model.no_states();
        for w in rest.split_whitespace() {
            s.insert(
                model
                    .state_id(w)
                    .ok_or_else(|| LoadError::Model { line: line_no, source: BuildError::UndeclaredState(w.into()) })?,
            );
        }
        v.set(z, s);
    }
    Ok(v)
}
