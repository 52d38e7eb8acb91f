//! Parsers for the compact command-line forms of grids, families and spaces.

use rearrange_core::envelopes::standard_nodes;
use rearrange_core::generators::{Family, GeneratorSpec};
use rearrange_core::{MFunction, SpaceSpec};

/// A parsed comma list, kept whole so clap treats it as one value.
#[derive(Debug, Clone, PartialEq)]
pub struct Floats(pub Vec<f64>);

/// `"a,b,c"` or `"dyadic:k"` (`2^-k, …, 2^-1`).
pub fn tau_grid(s: &str) -> Result<Floats, String> {
    let taus: Vec<f64> = if let Some(k) = s.strip_prefix("dyadic:") {
        let k: i32 = k.parse().map_err(|_| format!("bad dyadic depth {k:?}"))?;
        if !(1..=60).contains(&k) {
            return Err(format!("dyadic depth {k} outside 1..=60"));
        }
        (1..=k).rev().map(|j| 0.5f64.powi(j)).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad tau {t:?}")))
            .collect::<Result<_, _>>()?
    };
    if taus.is_empty() || taus.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(format!("tau grid {s:?} must be non-empty inside [0,1]"));
    }
    Ok(Floats(taus))
}

pub fn float_list(s: &str) -> Result<Floats, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}")))
        .collect::<Result<_, _>>()
        .map(Floats)
}

fn fields<'a>(s: &'a str, name: &str, n: usize) -> Result<Vec<&'a str>, String> {
    let parts: Vec<&str> = s.split(':').skip(1).collect();
    if parts.len() != n {
        return Err(format!("{name} expects {n} ':'-separated parameters, got {s:?}"));
    }
    Ok(parts)
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("bad parameter {s:?}"))
}

/// `rademacher:n`, `stable:p:n[:seed]`, `weighted:p:r:n`, `blocks:n`,
/// `nested-tail:n`, `indicator:tau`, or a JSON generator spec without `n_cells`.
pub fn family(s: &str) -> Result<Family, String> {
    if s.trim_start().starts_with('{') {
        let mut v: serde_json::Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
        v["n_cells"] = serde_json::json!(1);
        let spec: GeneratorSpec = serde_json::from_value(v).map_err(|e| e.to_string())?;
        return Ok(spec.family);
    }
    let kind = s.split(':').next().unwrap_or_default();
    Ok(match kind {
        "rademacher" => Family::Rademacher { n: num(fields(s, kind, 1)?[0])? },
        "stable" => {
            let parts: Vec<&str> = s.split(':').skip(1).collect();
            match parts.as_slice() {
                [p, n] => Family::StableFamily { p: num(p)?, n: num(n)?, seed: 0 },
                [p, n, seed] => Family::StableFamily { p: num(p)?, n: num(n)?, seed: num(seed)? },
                _ => return Err(format!("stable expects p:n[:seed], got {s:?}")),
            }
        }
        "weighted" => {
            let f = fields(s, kind, 3)?;
            Family::WeightedRademacher { p: num(f[0])?, r: num(f[1])?, n: num(f[2])? }
        }
        "blocks" => Family::DisjointBlocks { n: num(fields(s, kind, 1)?[0])? },
        "nested-tail" => Family::NestedTail { n: num(fields(s, kind, 1)?[0])? },
        "indicator" => Family::Indicator { tau: num(fields(s, kind, 1)?[0])? },
        _ => return Err(format!("unknown family {s:?}")),
    })
}

/// `l1`, `linf`, `lp:p`, `lorentz:a`, `marcinkiewicz:a[:ac]` (weight `t^a` on the
/// grid nodes), `orlicz[:ac]`, or a JSON space spec.
pub fn space(s: &str, n_cells: usize) -> Result<SpaceSpec, String> {
    if s.trim_start().starts_with('{') {
        let spec: SpaceSpec = serde_json::from_str(s).map_err(|e| e.to_string())?;
        spec.validate().map_err(|e| e.to_string())?;
        return Ok(spec);
    }
    let parts: Vec<&str> = s.split(':').collect();
    let power = |a: &str| -> Result<MFunction, String> {
        MFunction::power(&standard_nodes(0, n_cells), num(a)?).map_err(|e| e.to_string())
    };
    let spec = match parts.as_slice() {
        ["l1"] => SpaceSpec::l1(),
        ["linf"] => SpaceSpec::linf(),
        ["lp", p] => SpaceSpec::lp(num(p)?).map_err(|e| e.to_string())?,
        ["lorentz", a] => SpaceSpec::lorentz(power(a)?).map_err(|e| e.to_string())?,
        ["marcinkiewicz", a] => SpaceSpec::marcinkiewicz(power(a)?, false),
        ["marcinkiewicz", a, "ac"] => SpaceSpec::marcinkiewicz(power(a)?, true),
        ["orlicz"] => SpaceSpec::orlicz_exp_square(false),
        ["orlicz", "ac"] => SpaceSpec::orlicz_exp_square(true),
        _ => return Err(format!("unknown space {s:?}")),
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_grids() {
        assert_eq!(tau_grid("dyadic:3").unwrap().0, vec![0.125, 0.25, 0.5]);
        assert_eq!(tau_grid("0.5, 0.25").unwrap().0, vec![0.5, 0.25]);
        assert!(tau_grid("dyadic:0").is_err());
        assert!(tau_grid("2").is_err());
        assert!(tau_grid("a").is_err());
    }

    #[test]
    fn families() {
        assert_eq!(family("rademacher:3").unwrap(), Family::Rademacher { n: 3 });
        assert_eq!(family("stable:1.5:2").unwrap(), Family::StableFamily { p: 1.5, n: 2, seed: 0 });
        assert_eq!(
            family(r#"{"kind":"disjoint_blocks","n":4}"#).unwrap(),
            Family::DisjointBlocks { n: 4 }
        );
        assert!(family("weighted:1.2").is_err());
        assert!(family("spiral:2").is_err());
    }

    #[test]
    fn spaces() {
        assert_eq!(space("lp:2", 8).unwrap(), SpaceSpec::lp(2.0).unwrap());
        assert!(space("marcinkiewicz:0.5:ac", 8).unwrap().is_order_continuous());
        assert!(space("lp:0.5", 8).is_err());
        assert!(space("lorentz:2", 8).is_err());
    }
}
