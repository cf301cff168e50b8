//! True- and report-domain descriptions with deterministic generators.

use crate::choice::order::{all_orders, Alternatives, LinearOrder, Profile};
use crate::choice::ChoiceError;

/// Enumeration guard for domain-wide scans.
pub const ENUMERATION_BUDGET: u128 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// All strict linear orders for every agent.
    Universal,
    /// Orders single-peaked with respect to a fixed axis, for every agent.
    SinglePeaked { axis: Vec<u8> },
    /// An explicit list of admissible profiles, in declared order.
    ProfileList { rows: Vec<Profile> },
    /// Per-agent report sets combined as a product.
    PerAgentProduct { sets: Vec<Vec<LinearOrder>> },
}

/// Generates all single-peaked orders on the axis, indexed by the
/// `(m-1)`-bit endpoint-deletion string in lexicographic bit order: bit 0
/// removes the left axis endpoint as the next-worst alternative.
pub fn generate_single_peaked(axis: &[u8]) -> Vec<LinearOrder> {
    let m = axis.len();
    assert!(m >= 1, "axis must be non-empty");
    let count = 1usize << (m - 1);
    let mut out = Vec::with_capacity(count);
    for bits in 0..count {
        let mut left = 0usize;
        let mut right = m - 1;
        let mut worst_to_best = Vec::with_capacity(m);
        for t in 0..m - 1 {
            // Most significant bit first, so index order is bit-string order.
            let take_right = bits >> (m - 2 - t) & 1 == 1;
            if take_right {
                worst_to_best.push(axis[right]);
                right -= 1;
            } else {
                worst_to_best.push(axis[left]);
                left += 1;
            }
        }
        worst_to_best.push(axis[left]);
        worst_to_best.reverse();
        out.push(LinearOrder::new(worst_to_best, m).expect("generated order is a permutation"));
    }
    out
}

/// Single-peakedness: every best-first prefix is an axis interval.
pub fn is_single_peaked(order: &LinearOrder, axis: &[u8]) -> bool {
    let m = axis.len();
    let mut pos = vec![0usize; m];
    for (i, &x) in axis.iter().enumerate() {
        pos[x as usize] = i;
    }
    let mut lo = usize::MAX;
    let mut hi = 0usize;
    for (k, &x) in order.ranking().iter().enumerate() {
        let p = pos[x as usize];
        lo = lo.min(p);
        hi = hi.max(p);
        if hi - lo != k {
            return false;
        }
    }
    true
}

impl Domain {
    /// Per-agent report generator for product-shaped domains; `None` for a
    /// listed profile set, whose deviations are filtered from the list.
    pub fn agent_reports(&self, agent: usize, m: usize) -> Option<Vec<LinearOrder>> {
        match self {
            Domain::Universal => Some(all_orders(m)),
            Domain::SinglePeaked { axis } => Some(generate_single_peaked(axis)),
            Domain::ProfileList { .. } => None,
            Domain::PerAgentProduct { sets } => sets.get(agent - 1).cloned(),
        }
    }

    pub fn contains(&self, p: &Profile, m: usize) -> bool {
        match self {
            Domain::Universal => true,
            Domain::SinglePeaked { axis } => {
                p.orders().iter().all(|o| is_single_peaked(o, axis))
            }
            Domain::ProfileList { rows } => rows.contains(p),
            Domain::PerAgentProduct { sets } => {
                let _ = m;
                p.len() == sets.len()
                    && p.orders().iter().zip(sets).all(|(o, set)| set.contains(o))
            }
        }
    }

    pub fn row_count(&self, n: usize, m: usize) -> u128 {
        match self {
            Domain::Universal => {
                let l = all_orders(m).len() as u128;
                l.pow(n as u32)
            }
            Domain::SinglePeaked { axis } => {
                (1u128 << (axis.len() - 1)).pow(n as u32)
            }
            Domain::ProfileList { rows } => rows.len() as u128,
            Domain::PerAgentProduct { sets } => {
                sets.iter().map(|s| s.len() as u128).product()
            }
        }
    }

    /// Materializes the profile rows in scan order: listed domains keep their
    /// declared order, product domains run agent 1 as the most significant
    /// digit over the per-agent generator order.
    pub fn enumerate(&self, n: usize, m: usize) -> Result<Vec<Profile>, ChoiceError> {
        let count = self.row_count(n, m);
        if count > ENUMERATION_BUDGET {
            return Err(ChoiceError::StateBudgetExceeded {
                needed: count,
                budget: ENUMERATION_BUDGET,
            });
        }
        match self {
            Domain::ProfileList { rows } => {
                if let Some(bad) = rows.iter().find(|r| r.len() != n) {
                    return Err(ChoiceError::InvalidDomain(format!(
                        "listed profile `{bad}` has {} orders, expected {n}",
                        bad.len()
                    )));
                }
                Ok(rows.clone())
            }
            _ => {
                let per_agent: Vec<Vec<LinearOrder>> = (1..=n)
                    .map(|i| {
                        self.agent_reports(i, m).ok_or_else(|| {
                            ChoiceError::InvalidDomain(format!("no report set for agent {i}"))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                if per_agent.iter().any(|s| s.is_empty()) {
                    return Err(ChoiceError::InvalidDomain(
                        "empty per-agent report set".into(),
                    ));
                }
                let mut rows = Vec::with_capacity(count as usize);
                let mut idx = vec![0usize; n];
                loop {
                    rows.push(Profile::new(
                        (0..n).map(|i| per_agent[i][idx[i]].clone()).collect(),
                    ));
                    let mut k = n;
                    loop {
                        if k == 0 {
                            return Ok(rows);
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < per_agent[k].len() {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
            }
        }
    }

    /// Best-effort subset test used to validate that truthful reporting is
    /// admissible; falls back to enumeration within the budget.
    pub fn subset_of(&self, other: &Domain, n: usize, m: usize) -> Result<bool, ChoiceError> {
        match (self, other) {
            (_, Domain::Universal) => Ok(true),
            (Domain::SinglePeaked { axis: a }, Domain::SinglePeaked { axis: b }) if a == b => {
                Ok(true)
            }
            (Domain::ProfileList { rows }, _) => {
                Ok(rows.iter().all(|r| other.contains(r, m)))
            }
            _ => {
                let rows = self.enumerate(n, m)?;
                Ok(rows.iter().all(|r| other.contains(r, m)))
            }
        }
    }

    /// Short descriptor used in audit report columns.
    pub fn descriptor(&self, alts: &Alternatives) -> String {
        match self {
            Domain::Universal => "universal".to_string(),
            Domain::SinglePeaked { axis } => {
                let names: Vec<&str> = axis.iter().map(|&x| alts.name(x)).collect();
                format!("singlepeaked:{}", names.join("<"))
            }
            Domain::ProfileList { rows } => format!("list:{}", rows.len()),
            Domain::PerAgentProduct { sets } => {
                let sizes: Vec<String> = sets.iter().map(|s| s.len().to_string()).collect();
                format!("product:{}", sizes.join("x"))
            }
        }
    }

    /// Generator descriptor for audit report columns.
    pub fn generator(&self) -> &'static str {
        match self {
            Domain::Universal => "permutations",
            Domain::SinglePeaked { .. } => "endpoint-bits",
            Domain::ProfileList { .. } => "listed",
            Domain::PerAgentProduct { .. } => "per-agent-sets",
        }
    }
}
