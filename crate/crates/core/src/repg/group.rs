//! Finite groups given by Cayley tables, identity at index 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::Tolerance;
use crate::report::Report;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupJson", into = "GroupJson")]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    order: usize,
    table: Vec<Vec<usize>>,
}

impl TryFrom<GroupJson> for FiniteGroup {
    type Error = Error;
    fn try_from(g: GroupJson) -> Result<Self> {
        if g.table.len() != g.order {
            return Err(Error::Parse(format!(
                "group order {} but table has {} rows",
                g.order,
                g.table.len()
            )));
        }
        FiniteGroup::from_table(g.table)
    }
}

impl From<FiniteGroup> for GroupJson {
    fn from(g: FiniteGroup) -> Self {
        GroupJson {
            order: g.order(),
            table: g.table,
        }
    }
}

fn check_shape(table: &[Vec<usize>]) -> Result<()> {
    let n = table.len();
    if n == 0 {
        return Err(Error::structural("empty group table"));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::structural(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        if let Some(&bad) = row.iter().find(|&&x| x >= n) {
            return Err(Error::structural(format!("row {i} holds out-of-range element {bad}")));
        }
    }
    Ok(())
}

/// Check the group axioms of a Cayley table by brute force.
///
/// Failing checks name a witness: the first triple violating associativity in
/// lexicographic order, or the element without an inverse.
pub fn verify_group(table: &[Vec<usize>]) -> Result<Report> {
    check_shape(table)?;
    let n = table.len();
    let mut report = Report::new("verify_group", Tolerance::default());

    let identity_bad = (0..n).find(|&a| table[0][a] != a || table[a][0] != a);
    report.flag(
        "identity",
        identity_bad.map(|a| format!("element {a}")),
        identity_bad.is_none(),
    );

    let mut assoc_bad = None;
    'outer: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    assoc_bad = Some((a, b, c));
                    break 'outer;
                }
            }
        }
    }
    report.flag(
        "associativity",
        assoc_bad.map(|(a, b, c)| format!("triple ({a},{b},{c})")),
        assoc_bad.is_none(),
    );

    let inv_bad = (0..n).find(|&a| !(0..n).any(|b| table[a][b] == 0 && table[b][a] == 0));
    report.flag("inverses", inv_bad.map(|a| format!("element {a}")), inv_bad.is_none());
    Ok(report)
}

impl FiniteGroup {
    /// Validated constructor.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let report = verify_group(&table)?;
        if let Some(c) = report.first_failure() {
            return Err(Error::structural(format!(
                "not a group: {} fails at {}",
                c.name,
                c.witness.as_deref().unwrap_or("?")
            )));
        }
        let n = table.len();
        let inverse = (0..n)
            .map(|a| (0..n).find(|&b| table[a][b] == 0).expect("inverse exists"))
            .collect();
        Ok(FiniteGroup { table, inverse })
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0);
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_table(table).expect("cyclic table is a group")
    }

    /// `G × H` with element `(g, h)` at index `g * |H| + h`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (ng, nh) = (g.order(), h.order());
        let n = ng * nh;
        let table = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| g.mul(a / nh, b / nh) * nh + h.mul(a % nh, b % nh))
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(table).expect("product of groups is a group")
    }

    /// Z2 × Z2, element `(g1, g2)` at index `2 g1 + g2`.
    pub fn klein() -> Self {
        FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2))
    }

    /// S3 as permutations of {0,1,2} in lexicographic order.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        FiniteGroup::from_table(table).expect("S3 table is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_groups_verify() {
        assert!(verify_group(FiniteGroup::cyclic(2).table()).unwrap().passed());
        assert!(verify_group(FiniteGroup::klein().table()).unwrap().passed());
        assert!(verify_group(FiniteGroup::symmetric3().table()).unwrap().passed());
        assert!(!FiniteGroup::symmetric3().is_abelian());
    }

    #[test]
    fn klein_indexing_is_xor() {
        let k = FiniteGroup::klein();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(k.mul(a, b), a ^ b);
            }
        }
    }

    #[test]
    fn transposed_entry_breaks_associativity() {
        let mut t = FiniteGroup::cyclic(3).table().to_vec();
        // swap two entries in one row: row 1 becomes [1, 0, 2]
        t[1].swap(0, 1);
        let r = verify_group(&t).unwrap();
        assert!(!r.passed());
        let failing: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
        assert!(failing.contains(&"associativity"));
        assert!(r
            .get("associativity")
            .unwrap()
            .witness
            .as_deref()
            .unwrap()
            .starts_with("triple"));
    }

    #[test]
    fn malformed_tables_are_structural() {
        assert!(matches!(verify_group(&[vec![0, 1]]), Err(Error::Structural(_))));
        assert!(matches!(verify_group(&[vec![3]]), Err(Error::Structural(_))));
    }

    #[test]
    fn json_roundtrip() {
        let g = FiniteGroup::klein();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"order\":4"));
        let back: FiniteGroup = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
