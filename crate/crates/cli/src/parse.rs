use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Context};

/// `start:stop:step` over `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            bail!("grid `{s}` is not start:stop:step");
        };
        let num = |t: &str| t.trim().parse::<f64>().with_context(|| format!("bad number `{t}` in grid"));
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if !(step > 0.0) || !(start <= stop) {
            bail!("grid needs start <= stop and step > 0");
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok(Grid(
            (0..count)
                .map(|i| round12(start + i as f64 * step))
                .collect(),
        ))
    }
}

/// Removes the representation noise of `i * step`.
pub fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// A branching sequence such as `2x2x3`, `2,2,3` or `{2,2,3}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branching(pub Vec<usize>);

impl FromStr for Branching {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let levels = inner
            .split(['x', ',', ' '])
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().with_context(|| format!("bad radix `{t}`")))
            .collect::<anyhow::Result<Vec<_>>>()?;
        if levels.is_empty() {
            bail!("empty branching sequence");
        }
        if levels.iter().any(|&r| r < 2) {
            bail!("every radix must be at least 2");
        }
        Ok(Branching(levels))
    }
}

impl fmt::Display for Branching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_cardinality() {
        let g: Grid = "0:1:0.1".parse().unwrap();
        assert_eq!(g.0.len(), 11);
        assert_eq!(g.0[3], 0.3);
        assert_eq!(*g.0.last().unwrap(), 1.0);
        assert_eq!("0.5:0.5:1".parse::<Grid>().unwrap().0, vec![0.5]);
        assert_eq!("0:1:0.01".parse::<Grid>().unwrap().0.len(), 101);
    }

    #[test]
    fn bad_grids() {
        for s in ["1:0:0.1", "0:1:0", "0:1", "a:1:0.1", "0:1:-1"] {
            assert!(s.parse::<Grid>().is_err(), "{s}");
        }
    }

    #[test]
    fn branching_forms() {
        for s in ["2x2x3", "2,2,3", "{2,2,3}", "{2, 2, 3}"] {
            assert_eq!(s.parse::<Branching>().unwrap().0, vec![2, 2, 3]);
        }
        assert_eq!(Branching(vec![2, 5]).to_string(), "2x5");
        assert!("1x4".parse::<Branching>().is_err());
        assert!("{}".parse::<Branching>().is_err());
    }
}
