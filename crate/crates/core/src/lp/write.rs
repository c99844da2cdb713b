use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use super::{IlpModel, Sense, VarKind};
use crate::num::{format_rational, to_f64, Rational};

const TERMS_PER_LINE: usize = 6;

fn number(value: &Rational) -> String {
    let exact = format_rational(value);
    if exact.contains('/') {
        format!("{}", to_f64(value))
    } else {
        exact
    }
}

fn expression(out: &mut String, model: &IlpModel, terms: &[(usize, Rational)]) {
    if terms.is_empty() {
        out.push_str(" 0");
    }
    for (n, (k, coeff)) in terms.iter().enumerate() {
        if n > 0 && n % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let sign = if coeff.is_negative() { "-" } else if n == 0 { "" } else { "+" };
        let sep = if sign.is_empty() { "" } else { " " };
        let _ = write!(out, " {sign}{sep}{} {}", number(&coeff.abs()), model.variables[*k].name);
    }
}

/// CPLEX LP text: Minimize / Subject To / Bounds / Generals / Binaries / End.
/// Variables are listed by name; constraints keep their build order.
pub fn write_lp_file(model: &IlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ replica placement: policy {}, profile {}, relaxation {}",
        model.policy, model.profile, model.mode
    );
    out.push_str("Minimize\n obj:");
    let mut objective = model.objective.clone();
    objective.sort_by(|a, b| model.variables[a.0].name.cmp(&model.variables[b.0].name));
    expression(&mut out, model, &objective);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        expression(&mut out, model, &c.terms);
        let sense = match c.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {sense} {}", number(&c.rhs));
    }
    let mut order: Vec<usize> = (0..model.variables.len()).collect();
    order.sort_by(|&a, &b| model.variables[a].name.cmp(&model.variables[b].name));
    if !order.is_empty() {
        out.push_str("Bounds\n");
    }
    for &k in &order {
        let v = &model.variables[k];
        let lower = if v.lower.is_zero() { "0".to_string() } else { number(&v.lower) };
        let _ = writeln!(out, " {lower} <= {} <= {}", v.name, number(&v.upper));
    }
    for (title, kind) in [("Generals", VarKind::Integer), ("Binaries", VarKind::Binary)] {
        let names: Vec<&str> =
            order.iter().map(|&k| &model.variables[k]).filter(|v| v.kind == kind).map(|v| v.name.as_str()).collect();
        if !names.is_empty() {
            let _ = writeln!(out, "{title}");
            for name in names {
                let _ = writeln!(out, " {name}");
            }
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::lp::{apply_relaxation, build_ilp, RelaxationMode};
    use crate::validate::{ConstraintProfile, Policy};

    #[test]
    fn fig1a_multiple_text() {
        let m = build_ilp(&fixtures::fig1a(), Policy::Multiple, ConstraintProfile::NONE);
        let expected = "\\ replica placement: policy multiple, profile none, relaxation exact
Minimize
 obj: 1 x_s1 + 1 x_s2
Subject To
 asg_c1: 1 y_c1_s1 + 1 y_c1_s2 = 1
 leaf_c1: 1 z_c1_c1 = 1
 flow_c1_c1: 1 y_c1_s1 - 1 z_c1_c1 + 1 z_c1_s1 = 0
 cap_s2: - 1 x_s2 + 1 y_c1_s2 <= 0
 cap_s1: - 1 x_s1 + 1 y_c1_s1 <= 0
Bounds
 0 <= x_s1 <= 1
 0 <= x_s2 <= 1
 0 <= y_c1_s1 <= 1
 0 <= y_c1_s2 <= 1
 0 <= z_c1_c1 <= 1
 0 <= z_c1_s1 <= 1
Generals
 y_c1_s1
 y_c1_s2
 z_c1_c1
 z_c1_s1
Binaries
 x_s1
 x_s2
End
";
        assert_eq!(write_lp_file(&m), expected);
    }

    #[test]
    fn relaxed_sections() {
        let m = build_ilp(&fixtures::fig1c(), Policy::Multiple, ConstraintProfile::NONE);
        let text = write_lp_file(&apply_relaxation(&m, RelaxationMode::FullyRational));
        assert!(!text.contains("Generals") && !text.contains("Binaries"));
        let text = write_lp_file(&apply_relaxation(&m, RelaxationMode::RefinedXInteger));
        assert!(!text.contains("Generals") && text.contains("Binaries\n x_s1\n x_s2\n"));
    }

    #[test]
    fn long_rows_are_wrapped() {
        let m = build_ilp(&fixtures::fig2(4), Policy::Multiple, ConstraintProfile::NONE);
        let text = write_lp_file(&m);
        assert!(text.lines().all(|l| l.len() < 255));
    }

    #[test]
    fn smallest_model() {
        let tree: crate::DistributionTree =
            "node r 3 1\nclient c requests 0 qos inf parent r comm 1 bw inf".parse().unwrap();
        let m = build_ilp(&tree, Policy::Multiple, ConstraintProfile::NONE);
        let expected = "\\ replica placement: policy multiple, profile none, relaxation exact
Minimize
 obj: 1 x_r
Subject To
 cap_r: - 3 x_r <= 0
Bounds
 0 <= x_r <= 1
Binaries
 x_r
End
";
        assert_eq!(write_lp_file(&m), expected);
    }

    /// Rows and columns recovered from the written sections.
    fn section_counts(text: &str) -> (usize, usize) {
        let mut section = "";
        let (mut rows, mut columns) = (0, 0);
        for line in text.lines() {
            if !line.starts_with(' ') {
                section = line;
                continue;
            }
            match section {
                "Subject To" if line.contains(':') => rows += 1,
                "Bounds" => columns += 1,
                _ => {}
            }
        }
        (rows, columns)
    }

    #[test]
    fn written_sections_keep_the_counts() {
        for policy in Policy::ALL {
            let m = build_ilp(&fixtures::fig3(2), policy, ConstraintProfile::NONE);
            assert_eq!(section_counts(&write_lp_file(&m)), (m.constraints.len(), m.variables.len()), "{policy}");
        }
    }
}
