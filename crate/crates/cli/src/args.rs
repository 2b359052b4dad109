use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};

/// `a..b` with `a <= b`; either end may be negative.
pub fn parse_range(text: &str) -> Result<(i64, i64)> {
    let (lo, hi) = text.split_once("..").ok_or_else(|| anyhow!("expected a range `a..b`, found `{text}`"))?;
    let lo: i64 = lo.trim().parse().with_context(|| format!("bad lower bound in `{text}`"))?;
    let hi: i64 = hi.trim().parse().with_context(|| format!("bad upper bound in `{text}`"))?;
    if lo > hi {
        bail!("empty range `{text}`");
    }
    Ok((lo, hi))
}

/// `var=a..b,var=a..b`
pub fn parse_bounds(text: &str) -> Result<BTreeMap<String, (i64, i64)>> {
    let mut out = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (var, range) =
            part.split_once('=').ok_or_else(|| anyhow!("expected `var=a..b`, found `{part}`"))?;
        let var = var.trim();
        if out.insert(var.to_string(), parse_range(range)?).is_some() {
            bail!("bounds for `{var}` given twice");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-3..8").unwrap(), (-3, 8));
        assert_eq!(parse_range(" -5 .. -1 ").unwrap(), (-5, -1));
        assert!(parse_range("3..1").is_err());
        assert!(parse_range("3").is_err());
    }

    #[test]
    fn bounds() {
        let b = parse_bounds("w=-3..8, x=0..2").unwrap();
        assert_eq!(b["w"], (-3, 8));
        assert_eq!(b["x"], (0, 2));
        assert!(parse_bounds("w=0..1,w=0..2").is_err());
        assert!(parse_bounds("w").is_err());
        assert!(parse_bounds("").unwrap().is_empty());
    }
}
