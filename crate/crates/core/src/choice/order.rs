//! Strict linear orders, profiles, and their text forms.

use std::fmt;

use crate::choice::ChoiceError;

/// The declared alternative universe; index order is the canonical order used
/// for formula construction and scan tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alternatives {
    names: Vec<String>,
}

impl Alternatives {
    pub fn new(names: Vec<String>) -> Result<Alternatives, ChoiceError> {
        if names.is_empty() {
            return Err(ChoiceError::InvalidRule("no alternatives declared".into()));
        }
        if names.len() > u8::MAX as usize {
            return Err(ChoiceError::InvalidRule("too many alternatives".into()));
        }
        for name in &names {
            let mut chars = name.chars();
            let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
            let tail_ok = chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !head_ok || !tail_ok {
                return Err(ChoiceError::InvalidRule(format!("bad alternative name `{name}`")));
            }
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(ChoiceError::InvalidRule("duplicate alternative name".into()));
        }
        Ok(Alternatives { names })
    }

    pub fn from_strs(names: &[&str]) -> Alternatives {
        Alternatives::new(names.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, idx: u8) -> &str {
        &self.names[idx as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<u8, ChoiceError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as u8)
            .ok_or_else(|| ChoiceError::UnknownAlternative(name.to_string()))
    }
}

/// A strict linear order over the alternatives, best first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearOrder {
    ranking: Vec<u8>,
}

impl LinearOrder {
    pub fn new(ranking: Vec<u8>, m: usize) -> Result<LinearOrder, ChoiceError> {
        let mut seen = vec![false; m];
        if ranking.len() != m {
            return Err(ChoiceError::InvalidOrder(format!(
                "ranking covers {} of {m} alternatives",
                ranking.len()
            )));
        }
        for &x in &ranking {
            if x as usize >= m || seen[x as usize] {
                return Err(ChoiceError::InvalidOrder("not a permutation".into()));
            }
            seen[x as usize] = true;
        }
        Ok(LinearOrder { ranking })
    }

    pub fn ranking(&self) -> &[u8] {
        &self.ranking
    }

    /// Best alternative.
    pub fn top(&self) -> u8 {
        self.ranking[0]
    }

    /// Strict preference `x` over `y`.
    pub fn prefers(&self, x: u8, y: u8) -> bool {
        self.position(x) < self.position(y)
    }

    pub fn position(&self, x: u8) -> usize {
        self.ranking.iter().position(|&a| a == x).expect("alternative in ranking")
    }

    pub fn parse(text: &str, alts: &Alternatives) -> Result<LinearOrder, ChoiceError> {
        let names: Vec<&str> = text.split('>').map(str::trim).collect();
        let mut ranking = Vec::with_capacity(names.len());
        for name in names {
            ranking.push(alts.index_of(name)?);
        }
        LinearOrder::new(ranking, alts.len())
    }

    /// Spaced display form, e.g. `b > a > c`.
    pub fn display(&self, alts: &Alternatives) -> String {
        self.ranking.iter().map(|&x| alts.name(x)).collect::<Vec<_>>().join(" > ")
    }

    /// Compact single-token form, e.g. `b>a>c`.
    pub fn compact(&self, alts: &Alternatives) -> String {
        self.ranking.iter().map(|&x| alts.name(x)).collect::<Vec<_>>().join(">")
    }
}

/// One linear order per agent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Profile {
    orders: Vec<LinearOrder>,
}

impl Profile {
    pub fn new(orders: Vec<LinearOrder>) -> Profile {
        Profile { orders }
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn order(&self, agent: usize) -> &LinearOrder {
        &self.orders[agent - 1]
    }

    pub fn orders(&self) -> &[LinearOrder] {
        &self.orders
    }

    /// Copy with the given 1-based agent's order replaced.
    pub fn with_order(&self, agent: usize, order: LinearOrder) -> Profile {
        let mut orders = self.orders.clone();
        orders[agent - 1] = order;
        Profile { orders }
    }

    /// Agents on which the two profiles differ, as a coalition.
    pub fn diff(&self, other: &Profile) -> crate::Coalition {
        let members =
            (1..=self.orders.len()).filter(|&i| self.order(i) != other.order(i));
        crate::Coalition::from_members(members, self.orders.len()).expect("diff fits n")
    }

    /// Agreement outside the coalition: `self == other` on every j not in c.
    pub fn agrees_outside(&self, other: &Profile, c: crate::Coalition) -> bool {
        self.len() == other.len() && self.diff(other).is_subset(c)
    }

    pub fn parse(text: &str, alts: &Alternatives) -> Result<Profile, ChoiceError> {
        let orders = text
            .split(';')
            .map(|part| LinearOrder::parse(part, alts))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Profile { orders })
    }

    pub fn display(&self, alts: &Alternatives) -> String {
        self.orders.iter().map(|o| o.display(alts)).collect::<Vec<_>>().join("; ")
    }

    pub fn compact(&self, alts: &Alternatives) -> String {
        self.orders.iter().map(|o| o.compact(alts)).collect::<Vec<_>>().join(";")
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let raw: Vec<String> = self
            .orders
            .iter()
            .map(|o| {
                o.ranking.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(">")
            })
            .collect();
        write!(f, "{}", raw.join(";"))
    }
}

/// All strict linear orders over `m` alternatives in lexicographic ranking
/// order; the position in this list is the order's index.
pub fn all_orders(m: usize) -> Vec<LinearOrder> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    let mut used = vec![false; m];
    fn rec(
        m: usize,
        current: &mut Vec<u8>,
        used: &mut Vec<bool>,
        out: &mut Vec<LinearOrder>,
    ) {
        if current.len() == m {
            out.push(LinearOrder { ranking: current.clone() });
            return;
        }
        for x in 0..m as u8 {
            if !used[x as usize] {
                used[x as usize] = true;
                current.push(x);
                rec(m, current, used, out);
                current.pop();
                used[x as usize] = false;
            }
        }
    }
    rec(m, &mut current, &mut used, &mut out);
    out
}

/// Parses an axis literal `a < b < c < d` into alternative indices.
pub fn parse_axis(text: &str, alts: &Alternatives) -> Result<Vec<u8>, ChoiceError> {
    let names: Vec<&str> = text.split('<').map(str::trim).collect();
    let mut axis = Vec::with_capacity(names.len());
    for name in names {
        axis.push(alts.index_of(name)?);
    }
    LinearOrder::new(axis.clone(), alts.len())?;
    Ok(axis)
}

pub fn display_axis(axis: &[u8], alts: &Alternatives) -> String {
    axis.iter().map(|&x| alts.name(x)).collect::<Vec<_>>().join(" < ")
}
