use crate::error::{Error, Result};
use crate::size::Size;

/// An agent id with the size it is packed at.
pub type Item = (usize, Size);

/// Linear grouping of items sorted by non-increasing size.
///
/// Groups of `g` items; the first group is returned as is, every later item is raised to
/// the largest size of its group.
pub fn linear_grouping(items: &[Item], g: usize) -> Result<(Vec<Item>, Vec<Item>)> {
    if items.is_empty() {
        return Err(Error::Invalid("linear grouping of an empty list".into()));
    }
    if g == 0 {
        return Err(Error::Invalid("group size must be positive".into()));
    }
    let mut chunks = items.chunks(g);
    let top = chunks.next().unwrap().to_vec();
    let mut rest = Vec::new();
    for c in chunks {
        let max = c.iter().map(|x| x.1).max().unwrap();
        rest.extend(c.iter().map(|&(a, _)| (a, max)));
    }
    Ok((top, rest))
}

#[derive(Clone, Debug)]
pub struct GeometricGrouping {
    pub groups: Vec<Vec<Item>>,
    pub u_prime: Vec<Item>,
    pub u_double: Vec<Item>,
}

/// Alternative geometric grouping of items sorted by non-increasing size.
///
/// Groups are filled greedily until their total reaches `g * capacity`. The first group
/// and the `l_i - l_{i-1}` smallest items of each later group form `U'`; the rest of every
/// later group is raised to that group's largest size.
pub fn alt_geometric_grouping(items: &[Item], g: usize, capacity: Size) -> Result<GeometricGrouping> {
    if items.is_empty() {
        return Err(Error::Invalid("grouping of an empty list".into()));
    }
    if g < 2 {
        return Err(Error::Invalid("group factor must exceed 1".into()));
    }
    let target = capacity.micros() as u128 * g as u128;
    let mut groups: Vec<Vec<Item>> = vec![Vec::new()];
    let mut sum: u128 = 0;
    for &it in items {
        if sum >= target {
            groups.push(Vec::new());
            sum = 0;
        }
        groups.last_mut().unwrap().push(it);
        sum += it.1.micros() as u128;
    }
    let mut u_prime = groups[0].clone();
    let mut u_double = Vec::new();
    for i in 1..groups.len() {
        let gi = &groups[i];
        let drop = gi.len().saturating_sub(groups[i - 1].len());
        let keep = gi.len() - drop;
        let max = gi[0].1;
        u_double.extend(gi[..keep].iter().map(|&(a, _)| (a, max)));
        u_prime.extend_from_slice(&gi[keep..]);
    }
    Ok(GeometricGrouping { groups, u_prime, u_double })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(v: &[u64]) -> Vec<Item> {
        v.iter().enumerate().map(|(i, &s)| (i, Size::from_units(s))).collect()
    }

    fn sizes(v: &[Item]) -> Vec<u64> {
        v.iter().map(|x| x.1.micros() / 1_000_000).collect()
    }

    #[test]
    fn linear() {
        let (a, b) = linear_grouping(&items(&[9, 8, 7, 6, 5, 4]), 2).unwrap();
        assert_eq!(sizes(&a), vec![9, 8]);
        assert_eq!(sizes(&b), vec![7, 7, 5, 5]);
        let (a, b) = linear_grouping(&items(&[3, 2]), 5).unwrap();
        assert_eq!(a.len(), 2);
        assert!(b.is_empty());
        let (a, b) = linear_grouping(&items(&[5, 5, 5]), 1).unwrap();
        assert_eq!((sizes(&a), sizes(&b)), (vec![5], vec![5, 5]));
        assert!(linear_grouping(&[], 1).is_err());
    }

    #[test]
    fn geometric() {
        let v: Vec<Item> = (0..4).map(|i| (i, Size(600_000))).collect();
        let gg = alt_geometric_grouping(&v, 2, Size::from_units(1)).unwrap();
        assert_eq!(gg.groups.len(), 1);
        assert_eq!(gg.groups[0].len(), 4);

        // 12 items of 0.5: groups of 4 reach 2.0
        let v: Vec<Item> = (0..12).map(|i| (i, Size(500_000))).collect();
        let gg = alt_geometric_grouping(&v, 2, Size::from_units(1)).unwrap();
        assert_eq!(gg.groups.len(), 3);

        let gg = alt_geometric_grouping(&items(&[1]), 2, Size::from_units(1)).unwrap();
        assert_eq!(gg.u_prime.len(), 1);
        assert!(gg.u_double.is_empty());
    }
}
