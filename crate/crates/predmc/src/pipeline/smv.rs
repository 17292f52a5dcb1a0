//! SMV model export for cross-checking pairs with external tools.
//!
//! The module writes one enumerated state variable with initial state 0, the
//! transition relation as a disjunctive next-state case, one boolean define
//! per atom, and an LTLSPEC line. Output is byte-deterministic for equal
//! inputs. `parse_smv_transitions` reads the transition block back for
//! structural fidelity checks.

use super::PipelineError;
use crate::kripke::KripkeStructure;
use crate::ltl::LtlFormula;
use std::fmt::Write;

/// Render a complete SMV model for one (structure, formula) pair.
pub fn export_smv(k: &KripkeStructure, f: &LtlFormula) -> Result<String, PipelineError> {
    if k.n_states() > 10 || k.n_props() > 3 {
        return Err(PipelineError::SmvUnsupported {
            n_states: k.n_states(),
            n_props: k.n_props(),
        });
    }
    let succ = k.successors_sorted();
    let mut out = String::new();
    out.push_str("MODULE main\n");
    out.push_str("VAR\n");
    let _ = writeln!(out, "  s : 0..{};", k.n_states() - 1);
    out.push_str("ASSIGN\n");
    out.push_str("  init(s) := 0;\n");
    out.push_str("  next(s) := case\n");
    for (state, targets) in succ.iter().enumerate() {
        let list = targets
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "    s = {state} : {{{list}}};");
    }
    out.push_str("  esac;\n");
    out.push_str("DEFINE\n");
    for prop in 0..k.n_props() {
        let name = (b'p' + prop) as char;
        let holders: Vec<String> = (0..k.n_states())
            .filter(|&s| k.label(s) >> prop & 1 == 1)
            .map(|s| format!("s = {s}"))
            .collect();
        let body = if holders.is_empty() {
            "FALSE".to_string()
        } else if holders.len() == k.n_states() as usize {
            "TRUE".to_string()
        } else {
            holders.join(" | ")
        };
        let _ = writeln!(out, "  {name} := {body};");
    }
    let _ = writeln!(out, "LTLSPEC {}", smv_formula(f));
    Ok(out)
}

/// Canonical formula rendering in SMV spelling (`TRUE` for the constant).
fn smv_formula(f: &LtlFormula) -> String {
    match f {
        LtlFormula::True => "TRUE".to_string(),
        LtlFormula::Atom(i) => ((b'p' + i) as char).to_string(),
        LtlFormula::Not(g) => format!("!{}", smv_formula(g)),
        LtlFormula::Next(g) => format!("X{}", smv_formula(g)),
        LtlFormula::Finally(g) => format!("F{}", smv_formula(g)),
        LtlFormula::Globally(g) => format!("G{}", smv_formula(g)),
        LtlFormula::And(a, b) => format!("({}&{})", smv_formula(a), smv_formula(b)),
        LtlFormula::Or(a, b) => format!("({}|{})", smv_formula(a), smv_formula(b)),
        LtlFormula::Until(a, b) => format!("({} U {})", smv_formula(a), smv_formula(b)),
    }
}

/// Recover the transition set from an exported model's `next(s)` case block.
pub fn parse_smv_transitions(text: &str) -> Result<Vec<(u16, u16)>, PipelineError> {
    let fail = |m: &str| PipelineError::SmvParse(m.to_string());
    let start = text
        .find("next(s) := case")
        .ok_or_else(|| fail("missing next(s) case block"))?;
    let block = &text[start..];
    let end = block.find("esac;").ok_or_else(|| fail("missing esac"))?;
    let mut transitions = Vec::new();
    for line in block[..end].lines().skip(1) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line
            .split_once(':')
            .ok_or_else(|| fail("case arm without ':'"))?;
        let from: u16 = lhs
            .trim()
            .strip_prefix("s =")
            .ok_or_else(|| fail("case arm must test 's = <n>'"))?
            .trim()
            .parse()
            .map_err(|_| fail("bad source state"))?;
        let rhs = rhs.trim().trim_end_matches(';');
        let inner = rhs
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| fail("targets must be a {..} set"))?;
        for part in inner.split(',') {
            let to: u16 = part.trim().parse().map_err(|_| fail("bad target state"))?;
            transitions.push((from, to));
        }
    }
    Ok(transitions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::decode_kripke;
    use crate::ltl::parse_ltl;
    use std::collections::HashSet;

    const K0: &str = "0000100100101110110122124303243";

    #[test]
    fn reference_export_is_exact() {
        let k = decode_kripke(K0, 5, 3).unwrap();
        let f = parse_ltl("Gq").unwrap();
        let text = export_smv(&k, &f).unwrap();
        let expect = "\
MODULE main
VAR
  s : 0..4;
ASSIGN
  init(s) := 0;
  next(s) := case
    s = 0 : {1};
    s = 1 : {0, 2};
    s = 2 : {1, 4};
    s = 3 : {0, 2};
    s = 4 : {3};
  esac;
DEFINE
  p := s = 4;
  q := s = 1 | s = 2 | s = 3 | s = 4;
  r := s = 4;
LTLSPEC Gq
";
        assert_eq!(text, expect);
    }

    #[test]
    fn export_is_deterministic() {
        let k = decode_kripke(K0, 5, 3).unwrap();
        let f = parse_ltl("(pUq)&Fr").unwrap();
        assert_eq!(export_smv(&k, &f).unwrap(), export_smv(&k, &f).unwrap());
    }

    #[test]
    fn single_state_model() {
        let k = decode_kripke("10000", 1, 3).unwrap();
        let text = export_smv(&k, &parse_ltl("Gp").unwrap()).unwrap();
        assert!(text.contains("s : 0..0;"));
        assert!(text.contains("s = 0 : {0};"));
        assert!(text.contains("p := TRUE;"));
        assert!(text.contains("q := FALSE;"));
        assert!(text.contains("LTLSPEC Gp"));
    }

    #[test]
    fn reparsed_transitions_equal_the_structure() {
        let k = decode_kripke(K0, 5, 3).unwrap();
        let text = export_smv(&k, &parse_ltl("p").unwrap()).unwrap();
        let got: HashSet<(u16, u16)> = parse_smv_transitions(&text).unwrap().into_iter().collect();
        let want: HashSet<(u16, u16)> = k.transitions().iter().copied().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn until_spelled_with_spaces() {
        // SMV needs whitespace around the binary U
        let f = parse_ltl("pUq").unwrap();
        assert_eq!(smv_formula(&f), "(p U q)");
        assert_eq!(smv_formula(&parse_ltl("true").unwrap()), "TRUE");
    }
}
