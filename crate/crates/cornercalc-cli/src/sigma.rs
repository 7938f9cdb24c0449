//! Grammar for rational monomial combinations and blow-up centers.
//!
//! A combination is a product of atoms `r<label>`, each with an optional
//! integer power `^e`, joined by `*`; a single optional `/` starts the
//! denominator, whose powers are negated. Commas separate combinations:
//!
//! ```text
//! r1/r2, ra^2*rb/rc*rd^3
//! ```
//!
//! A center list uses `,` between centers, `*` between the generators of
//! one center, and `+` between the labels summed in one generator:
//!
//! ```text
//! h2*h3, h1*h2+h3
//! ```

use anyhow::{bail, ensure, Result};
use cornercalc::monoid_fan::MonoidVector;
use cornercalc::Label;

fn valid_label(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || "_.()-".contains(c))
}

fn parse_atom(s: &str) -> Result<(Label, i64)> {
    let s = s.trim();
    let Some(rest) = s.strip_prefix('r') else {
        bail!("atom {s:?} does not start with 'r'");
    };
    let (label, exponent) = match rest.split_once('^') {
        Some((l, e)) => {
            let e: i64 = e
                .trim()
                .parse()
                .map_err(|_| anyhow::anyhow!("invalid exponent in atom {s:?}"))?;
            (l, e)
        }
        None => (rest, 1),
    };
    ensure!(valid_label(label), "invalid label in atom {s:?}");
    Ok((Label::new(label), exponent))
}

fn parse_side(s: &str, sign: i64, terms: &mut Vec<(Label, i64)>) -> Result<()> {
    for atom in s.split('*') {
        let (label, exponent) = parse_atom(atom)?;
        terms.push((label, sign * exponent));
    }
    Ok(())
}

fn parse_combination(s: &str) -> Result<MonoidVector> {
    let s = s.trim();
    ensure!(!s.is_empty(), "empty combination");
    let mut parts = s.split('/');
    let numerator = parts.next().expect("split yields at least one part");
    let denominator = parts.next();
    ensure!(parts.next().is_none(), "more than one '/' in {s:?}");
    let mut terms = Vec::new();
    parse_side(numerator, 1, &mut terms)?;
    if let Some(denominator) = denominator {
        parse_side(denominator, -1, &mut terms)?;
    }
    Ok(MonoidVector::from_pairs(terms))
}

/// Parses a comma-separated list of rational monomial combinations.
pub fn parse_sigmas(input: &str) -> Result<Vec<MonoidVector>> {
    input.split(',').map(parse_combination).collect()
}

fn parse_generator(s: &str) -> Result<MonoidVector> {
    let mut terms = Vec::new();
    for label in s.split('+') {
        let label = label.trim();
        ensure!(valid_label(label), "invalid label {label:?} in center generator");
        terms.push((Label::new(label), 1));
    }
    Ok(MonoidVector::from_pairs(terms))
}

fn parse_center(s: &str) -> Result<Vec<MonoidVector>> {
    let s = s.trim();
    ensure!(!s.is_empty(), "empty blow-up center");
    s.split('*').map(parse_generator).collect()
}

/// Parses a comma-separated list of blow-up centers.
pub fn parse_centers(input: &str) -> Result<Vec<Vec<MonoidVector>>> {
    input.split(',').map(parse_center).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(pairs: &[(&str, i64)]) -> MonoidVector {
        MonoidVector::from_pairs(pairs.iter().map(|(l, c)| (Label::new(*l), *c)))
    }

    #[test]
    fn single_quotient_parses() {
        let sigmas = parse_sigmas("r1/r2").expect("parses");
        assert_eq!(sigmas, vec![vector(&[("1", 1), ("2", -1)])]);
    }

    #[test]
    fn powers_products_and_commas_parse() {
        let sigmas = parse_sigmas("ra^2*rb / rc*rd^3, re").expect("parses");
        assert_eq!(
            sigmas,
            vec![
                vector(&[("a", 2), ("b", 1), ("c", -1), ("d", -3)]),
                vector(&[("e", 1)]),
            ]
        );
    }

    #[test]
    fn negative_powers_parse() {
        let sigmas = parse_sigmas("ra^-2").expect("parses");
        assert_eq!(sigmas, vec![vector(&[("a", -2)])]);
    }

    #[test]
    fn malformed_combinations_are_rejected() {
        for bad in ["", "x1", "r1//r2", "r", "r1^", "r1^x", "r a"] {
            assert!(parse_sigmas(bad).is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn centers_parse_sums_and_lists() {
        let centers = parse_centers("h2*h3, h1*h2+h3").expect("parses");
        assert_eq!(
            centers,
            vec![
                vec![vector(&[("h2", 1)]), vector(&[("h3", 1)])],
                vec![vector(&[("h1", 1)]), vector(&[("h2", 1), ("h3", 1)])],
            ]
        );
    }

    #[test]
    fn malformed_centers_are_rejected() {
        for bad in ["", " , ", "h1**h2", "h1+ +h2"] {
            assert!(parse_centers(bad).is_err(), "{bad:?} should be rejected");
        }
    }
}
