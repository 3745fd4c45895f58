//! Labeled isomorphism of cell sets, the finite stand-in for "same orbit
//! under the group action".
//!
//! Cells are compared by word positions, not slot numbers, so two copies
//! of a relator polygon with different rotations agree. The canonical form
//! is the minimum over all relabelings of cells that keep the (group,
//! relator) key sorted; tiles have at most six cells, so this is at most
//! 720 permutations.

use std::collections::{BTreeMap, BTreeSet};

use super::{CellId, PatchComplex};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    keys: Vec<(usize, usize)>,
    edges: Vec<Vec<(usize, usize, bool)>>,
    vertices: Vec<Vec<(usize, usize)>>,
}

fn corner_position(patch: &PatchComplex, c: CellId, corner: usize) -> usize {
    let spec = patch.cell(c);
    let ell = patch.ell();
    if spec.inverted {
        (spec.rotation + ell - corner % ell) % ell
    } else {
        (spec.rotation + corner) % ell
    }
}

fn signature_for(patch: &PatchComplex, order: &[CellId], keys: &[(usize, usize)]) -> Signature {
    let index: BTreeMap<CellId, usize> = order.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut edges = BTreeMap::new();
    let mut vertices: BTreeMap<_, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, &c) in order.iter().enumerate() {
        for s in 0..patch.ell() {
            let e = patch.slot_edge(c, s);
            edges.entry(e).or_insert_with(|| {
                let mut class: Vec<(usize, usize, bool)> = patch
                    .edge_slots(e)
                    .iter()
                    .filter_map(|&(d, t)| {
                        let j = *index.get(&d)?;
                        let (pos, _) = patch.cell(d).slot_position(t, patch.ell());
                        Some((j, pos, patch.slot_forward(d, t) != patch.cell(d).inverted))
                    })
                    .collect();
                class.sort();
                let mut flipped: Vec<_> = class.iter().map(|&(j, p, f)| (j, p, !f)).collect();
                flipped.sort();
                class.min(flipped)
            });
            vertices.entry(patch.corner_vertex(c, s)).or_default().push((i, corner_position(patch, c, s)));
        }
    }
    let mut edges: Vec<_> = edges.into_values().collect();
    edges.sort();
    let mut vertices: Vec<_> = vertices
        .into_values()
        .map(|mut v| {
            v.sort();
            v.dedup();
            v
        })
        .collect();
    vertices.sort();
    Signature { keys: keys.to_vec(), edges, vertices }
}

fn permutations_within_groups(groups: &[Vec<CellId>]) -> Vec<Vec<CellId>> {
    let mut out = vec![Vec::new()];
    for g in groups {
        let mut perms = Vec::new();
        permute(&mut g.clone(), 0, &mut perms);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                perms.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.extend(p.iter().copied());
                    v
                })
            })
            .collect();
    }
    out
}

fn permute(items: &mut Vec<CellId>, k: usize, out: &mut Vec<Vec<CellId>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Canonical signature of the union of `parts`, remembering which part each
/// cell came from.
pub fn canonical_signature(patch: &PatchComplex, parts: &[&BTreeSet<CellId>]) -> Signature {
    let mut keyed: Vec<((usize, usize), CellId)> = Vec::new();
    for (g, part) in parts.iter().enumerate() {
        for &c in part.iter() {
            keyed.push(((g, patch.cell(c).relator), c));
        }
    }
    keyed.sort();
    let keys: Vec<(usize, usize)> = keyed.iter().map(|&(k, _)| k).collect();
    let mut groups: Vec<Vec<CellId>> = Vec::new();
    for (i, &(k, c)) in keyed.iter().enumerate() {
        if i > 0 && keyed[i - 1].0 == k {
            groups.last_mut().expect("group started").push(c);
        } else {
            groups.push(vec![c]);
        }
    }
    permutations_within_groups(&groups)
        .iter()
        .map(|order| signature_for(patch, order, &keys))
        .min()
        .expect("at least one ordering")
}

/// True when the two cell sets are labeled-isomorphic.
pub fn orbit_isomorphic(patch: &PatchComplex, a: &BTreeSet<CellId>, b: &BTreeSet<CellId>) -> bool {
    a.len() == b.len() && canonical_signature(patch, &[a]) == canonical_signature(patch, &[b])
}

/// True when `(a, a2)` and `(b, b2)` are labeled-isomorphic as ordered pairs.
pub fn pair_isomorphic(
    patch: &PatchComplex,
    a: (&BTreeSet<CellId>, &BTreeSet<CellId>),
    b: (&BTreeSet<CellId>, &BTreeSet<CellId>),
) -> bool {
    a.0.len() == b.0.len()
        && a.1.len() == b.1.len()
        && canonical_signature(patch, &[a.0, a.1]) == canonical_signature(patch, &[b.0, b.1])
}

#[cfg(test)]
mod tests {
    use super::super::{CellSpec, Gluing};
    use super::*;

    fn set(ids: &[u32]) -> BTreeSet<CellId> {
        ids.iter().map(|&i| CellId(i)).collect()
    }

    #[test]
    fn rotated_copies_are_isomorphic() {
        // Cells 0,1 use relators 0,1 glued along 3; cells 2,3 are the same
        // pair with different rotations and slot numbering.
        let cells = vec![
            CellSpec::plain(0, 0),
            CellSpec::plain(1, 1),
            CellSpec { id: 2, relator: 0, rotation: 2, inverted: false },
            CellSpec { id: 3, relator: 1, rotation: 5, inverted: false },
        ];
        let gluings = vec![
            Gluing { cell_a: 0, start_a: 0, cell_b: 1, start_b: 0, length: 3, reversed: true },
            // cell 2 slot s reads position s+2, so position 0 is slot 6
            Gluing { cell_a: 2, start_a: 6, cell_b: 3, start_b: 3, length: 3, reversed: true },
        ];
        let p = PatchComplex::new(8, cells, gluings).unwrap();
        assert!(orbit_isomorphic(&p, &set(&[0, 1]), &set(&[2, 3])));
        assert!(orbit_isomorphic(&p, &set(&[0]), &set(&[2])));
        assert!(!orbit_isomorphic(&p, &set(&[0]), &set(&[1])));
        assert!(pair_isomorphic(&p, (&set(&[0]), &set(&[1])), (&set(&[2]), &set(&[3]))));
        assert!(!pair_isomorphic(&p, (&set(&[0]), &set(&[1])), (&set(&[3]), &set(&[2]))));
    }

    #[test]
    fn different_overlap_is_not_isomorphic() {
        let cells = (0..4).map(|i| CellSpec::plain(i, (i % 2) as usize)).collect();
        let gluings = vec![
            Gluing { cell_a: 0, start_a: 0, cell_b: 1, start_b: 0, length: 3, reversed: true },
            Gluing { cell_a: 2, start_a: 0, cell_b: 3, start_b: 0, length: 2, reversed: true },
        ];
        let p = PatchComplex::new(8, cells, gluings).unwrap();
        assert!(!orbit_isomorphic(&p, &set(&[0, 1]), &set(&[2, 3])));
    }
}
