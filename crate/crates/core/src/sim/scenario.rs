use std::fmt::Write as _;

use super::rng;
use crate::model::{Instance, RequestId};

/// A set of revealed requests.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scenario {
    revealed: Vec<bool>,
    /// Seed the scenario was drawn from, if sampled.
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn empty(request_count: usize) -> Self {
        Self {
            revealed: vec![false; request_count],
            seed: None,
        }
    }

    pub fn from_ids(request_count: usize, ids: impl IntoIterator<Item = RequestId>) -> Self {
        let mut s = Self::empty(request_count);
        for r in ids {
            s.revealed[r] = true;
        }
        s
    }

    pub fn from_mask(revealed: Vec<bool>) -> Self {
        Self { revealed, seed: None }
    }

    #[inline]
    pub fn is_revealed(&self, r: RequestId) -> bool {
        self.revealed[r]
    }

    pub fn mask(&self) -> &[bool] {
        &self.revealed
    }

    pub fn ids(&self) -> impl Iterator<Item = RequestId> + '_ {
        self.revealed.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.revealed.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `# seed <s>` header (or `# seed none`), then one request id per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self.seed {
            Some(s) => writeln!(out, "# seed {s}").unwrap(),
            None => writeln!(out, "# seed none").unwrap(),
        }
        for r in self.ids() {
            writeln!(out, "{r}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str, request_count: usize) -> Result<Self, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty scenario file")?;
        let seed = match header.strip_prefix("# seed ").map(str::trim) {
            Some("none") => None,
            Some(s) => Some(s.parse::<u64>().map_err(|e| format!("bad seed: {e}"))?),
            None => return Err("missing '# seed' header".into()),
        };
        let mut scenario = Self::empty(request_count);
        scenario.seed = seed;
        for line in lines.map(str::trim).filter(|l| !l.is_empty()) {
            let r: usize = line.parse().map_err(|e| format!("bad request id '{line}': {e}"))?;
            if r >= request_count {
                return Err(format!("request id {r} out of range"));
            }
            scenario.revealed[r] = true;
        }
        Ok(scenario)
    }
}

/// Scenario number `index` of the stream identified by `seed`: request `r`
/// is revealed iff its uniform draw is below `p_r`.
pub fn sample_indexed(instance: &Instance, seed: u64, index: u64) -> Scenario {
    let key = rng::scenario_key(seed, index);
    let revealed = instance
        .requests()
        .iter()
        .map(|r| rng::uniform(key, r.id as u64) < r.probability)
        .collect();
    Scenario {
        revealed,
        seed: Some(seed),
    }
}

/// First scenario of the stream identified by `seed`.
pub fn sample_scenario(instance: &Instance, seed: u64) -> Scenario {
    sample_indexed(instance, seed, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut s = Scenario::from_ids(5, [1, 4]);
        s.seed = Some(9);
        let text = s.to_text();
        assert_eq!(text, "# seed 9\n1\n4\n");
        assert_eq!(Scenario::from_text(&text, 5).unwrap(), s);
        assert!(Scenario::from_text("1\n", 5).is_err());
        assert!(Scenario::from_text("# seed none\n7\n", 5).is_err());
    }
}
