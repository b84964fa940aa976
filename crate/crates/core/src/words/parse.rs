//! Rule-file parser and serializer.
//!
//! Plain text, one declaration per line, `#` starts a comment:
//!
//! ```text
//! alphabet a b c
//! target 0 1
//! start a
//! rule a -> a b
//! rule b -> b a
//! code a -> 0
//! code b -> 1
//! ```
//!
//! Tokens are whitespace-separated. `target` and `code` lines are optional;
//! the default coding is the identity with `target = alphabet`. A rule or
//! code line with nothing after the arrow declares the empty image. Duplicate
//! rules and undeclared symbols are rejected with line-numbered errors.

use super::{Alphabet, Letter, Morphism, MorphicSystem, Word};
use crate::error::{Error, Result};

/// Parsed rule file plus corpus metadata found in comment pragmas
/// (`# expect: UR|notUR`, `# note: ...`).
#[derive(Debug, Clone)]
pub struct RuleFile {
    pub system: MorphicSystem,
    pub expect: Option<String>,
    pub note: Option<String>,
}

pub fn parse_rule_file(text: &str) -> Result<RuleFile> {
    let mut alphabet_tokens: Option<(usize, Vec<String>)> = None;
    let mut target_tokens: Option<Vec<String>> = None;
    let mut start_token: Option<(usize, String)> = None;
    let mut rules: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut codes: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut expect = None;
    let mut note = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("expect:") {
                expect = Some(v.trim().to_string());
            } else if let Some(v) = comment.strip_prefix("note:") {
                note = Some(v.trim().to_string());
            }
            continue;
        }
        let line = match line.find('#') {
            Some(p) => line[..p].trim(),
            None => line,
        };
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let rest: Vec<String> = tokens.map(str::to_string).collect();
        match head {
            "alphabet" => {
                if alphabet_tokens.is_some() {
                    return err(line_no, "duplicate alphabet declaration");
                }
                alphabet_tokens = Some((line_no, rest));
            }
            "target" => {
                if target_tokens.is_some() {
                    return err(line_no, "duplicate target declaration");
                }
                target_tokens = Some(rest);
            }
            "start" => {
                if start_token.is_some() {
                    return err(line_no, "duplicate start declaration");
                }
                if rest.len() != 1 {
                    return err(line_no, "start takes exactly one symbol");
                }
                start_token = Some((line_no, rest[0].clone()));
            }
            "rule" | "code" => {
                if rest.is_empty() {
                    return err(line_no, "missing symbol before '->'");
                }
                let lhs = rest[0].clone();
                if rest.get(1).map(String::as_str) != Some("->") {
                    return err(line_no, "expected '->' after the symbol");
                }
                let rhs = rest[2..].to_vec();
                if head == "rule" {
                    rules.push((line_no, lhs, rhs));
                } else {
                    codes.push((line_no, lhs, rhs));
                }
            }
            other => return err(line_no, &format!("unknown declaration {other:?}")),
        }
    }

    let (alpha_line, alphabet_tokens) =
        alphabet_tokens.ok_or_else(|| Error::Parse { line: 0, msg: "missing alphabet".into() })?;
    let alphabet = Alphabet::new(alphabet_tokens).map_err(|e| Error::Parse {
        line: alpha_line,
        msg: e.to_string(),
    })?;
    let target = match &target_tokens {
        Some(toks) => Alphabet::new(toks.clone()).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("target: {e}"),
        })?,
        None => alphabet.clone(),
    };
    let (start_line, start_token) =
        start_token.ok_or_else(|| Error::Parse { line: 0, msg: "missing start".into() })?;
    let start = alphabet.get(&start_token).ok_or_else(|| Error::Parse {
        line: start_line,
        msg: format!("start symbol {start_token:?} not in alphabet"),
    })?;

    let phi = build_morphism(&alphabet, &alphabet, &rules, "rule", true)?;
    let psi = if codes.is_empty() {
        if target_tokens.is_some() && target != alphabet {
            return Err(Error::Parse {
                line: 0,
                msg: "target declared but no code lines given".into(),
            });
        }
        Morphism::identity(&alphabet)
    } else {
        build_morphism(&alphabet, &target, &codes, "code", false)?
    };

    let system = MorphicSystem::new(alphabet, target, start, phi, psi)?;
    Ok(RuleFile {
        system,
        expect,
        note,
    })
}

fn build_morphism(
    source: &Alphabet,
    target: &Alphabet,
    decls: &[(usize, String, Vec<String>)],
    kind: &str,
    require_all: bool,
) -> Result<Morphism> {
    let mut images: Vec<Option<(usize, Word)>> = vec![None; source.len()];
    for (line, lhs, rhs) in decls {
        let l = source.get(lhs).ok_or_else(|| Error::Parse {
            line: *line,
            msg: format!("{kind} symbol {lhs:?} not in alphabet"),
        })?;
        if images[l as usize].is_some() {
            return err(*line, &format!("duplicate {kind} for {lhs:?}"));
        }
        let mut word = Vec::with_capacity(rhs.len());
        for t in rhs {
            let b = target.get(t).ok_or_else(|| Error::Parse {
                line: *line,
                msg: format!("symbol {t:?} not declared"),
            })?;
            word.push(b);
        }
        images[l as usize] = Some((*line, Word(word)));
    }
    let mut out = Vec::with_capacity(source.len());
    for (i, slot) in images.into_iter().enumerate() {
        match slot {
            Some((_, w)) => out.push(w),
            None if require_all => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("missing rule for {:?}", source.token(i as Letter)),
                })
            }
            // letters without a code line map to themselves when target = A;
            // otherwise a full code table is required
            None => {
                if let Some(b) = target.get(source.token(i as Letter)) {
                    out.push(Word(vec![b]));
                } else {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("missing code for {:?}", source.token(i as Letter)),
                    });
                }
            }
        }
    }
    Morphism::new(source.clone(), target.clone(), out)
}

fn err<T>(line: usize, msg: &str) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.to_string(),
    })
}

/// Serialize a system back to the rule-file format (round-trippable).
pub fn render_rule_file(sys: &MorphicSystem, header: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        for line in h.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out.push_str("alphabet");
    for t in sys.alphabet.tokens() {
        out.push(' ');
        out.push_str(t);
    }
    out.push('\n');
    let identity_coding = sys.target == sys.alphabet
        && sys
            .alphabet
            .letters()
            .all(|l| sys.psi.image(l).0 == vec![l]);
    if !identity_coding {
        out.push_str("target");
        for t in sys.target.tokens() {
            out.push(' ');
            out.push_str(t);
        }
        out.push('\n');
    }
    out.push_str(&format!("start {}\n", sys.alphabet.token(sys.start)));
    for l in sys.alphabet.letters() {
        out.push_str(&format!("rule {} ->", sys.alphabet.token(l)));
        for &b in sys.phi.image(l).iter() {
            out.push(' ');
            out.push_str(sys.alphabet.token(b));
        }
        out.push('\n');
    }
    if !identity_coding {
        for l in sys.alphabet.letters() {
            out.push_str(&format!("code {} ->", sys.alphabet.token(l)));
            for &b in sys.psi.image(l).iter() {
                out.push(' ');
                out.push_str(sys.target.token(b));
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TM: &str = "\
# expect: UR
alphabet a b
start a
rule a -> a b
rule b -> b a
";

    #[test]
    fn parses_thue_morse() {
        let rf = parse_rule_file(TM).unwrap();
        assert_eq!(rf.expect.as_deref(), Some("UR"));
        assert_eq!(rf.system.alphabet.len(), 2);
        assert!(rf.system.psi.is_coding());
    }

    #[test]
    fn rejects_duplicate_rule() {
        let text = "alphabet a\nstart a\nrule a -> a\nrule a -> a a\n";
        let e = parse_rule_file(text).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
    }

    #[test]
    fn rejects_undeclared_symbol() {
        let text = "alphabet a\nstart a\nrule a -> a z\n";
        let e = parse_rule_file(text).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
    }

    #[test]
    fn empty_image_allowed() {
        let text = "alphabet a b\nstart a\nrule a -> a b\nrule b ->\n";
        let rf = parse_rule_file(text).unwrap();
        assert!(rf.system.phi.image(1).is_empty());
    }

    #[test]
    fn code_lines_and_target() {
        let text = "alphabet a b\ntarget 0 1\nstart a\nrule a -> a a b\nrule b -> b\ncode a -> 0\ncode b -> 1 1\n";
        let rf = parse_rule_file(text).unwrap();
        assert_eq!(rf.system.psi.image(1).len(), 2);
    }

    #[test]
    fn round_trip() {
        let rf = parse_rule_file(TM).unwrap();
        let text = render_rule_file(&rf.system, None);
        let rf2 = parse_rule_file(&text).unwrap();
        assert_eq!(rf2.system.alphabet, rf.system.alphabet);
        assert_eq!(rf2.system.phi, rf.system.phi);
        assert_eq!(rf2.system.psi, rf.system.psi);
    }
}
