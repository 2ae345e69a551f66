//! Degree-`m` homomorphisms of sheaves as an equalizer over the cones.

use num_traits::Zero;

use super::{CoSheafTcf, SheafOfModules};
use crate::error::{Error, Result};
use crate::graded_modules::{vadd, vsub};
use crate::lattice_fan::LatticeVector;
use crate::linalg::{QMatrix, Q};

/// Dimension of the space of maps `F → G` raising degrees by `m`.
///
/// One unknown per generator of each stalk of `F` (an element of the
/// matching piece of `G`), subject to the relations of `F` and to
/// compatibility with restrictions along every facet pair.
pub fn hom_pieces(f: &SheafOfModules, g: &SheafOfModules, m: &LatticeVector) -> Result<usize> {
    if !std::sync::Arc::ptr_eq(f.fan(), g.fan()) && f.fan().rays() != g.fan().rays() {
        return Err(Error::ConeMismatch);
    }
    if f.flavor() != g.flavor() {
        return Err(Error::ConeMismatch);
    }
    if m.rank() != f.fan().rank() {
        return Err(Error::RankMismatch { expected: f.fan().rank(), got: m.rank() });
    }
    let fan = f.fan();

    // Variable blocks: (cone, generator) -> (offset, piece dim).
    let mut offsets: Vec<Vec<(usize, usize)>> = Vec::with_capacity(fan.num_cones());
    let mut nvars = 0;
    for c in fan.cone_ids() {
        let s = f.native(c, m);
        let blocks = f
            .stalk(c)
            .gens()
            .iter()
            .map(|d| {
                let dim = g.stalk(c).piece_dim(&vadd(d, &s));
                let b = (nvars, dim);
                nvars += dim;
                b
            })
            .collect();
        offsets.push(blocks);
    }
    if nvars == 0 {
        return Ok(0);
    }

    let mut rows: Vec<Vec<Q>> = Vec::new();
    let push_block = |rows: &mut Vec<Vec<Q>>, parts: &[(usize, QMatrix)]| {
        let height = parts.first().map(|(_, a)| a.nrows()).unwrap_or(0);
        for r in 0..height {
            let mut row = vec![Q::zero(); nvars];
            for (off, a) in parts {
                for c in 0..a.ncols() {
                    row[off + c] += a.get(r, c);
                }
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    };

    for c in fan.cone_ids() {
        let (fs, gs) = (f.stalk(c), g.stalk(c));
        let s = f.native(c, m);
        // Relations of F_σ must map to zero.
        for (k, col) in fs.relations.columns().into_iter().enumerate() {
            let cdeg = &fs.relations.col_degrees[k];
            let parts: Vec<(usize, QMatrix)> = col
                .iter()
                .map(|(j, a)| {
                    let fj = &fs.gens()[*j];
                    let cm = gs.character_map(&vadd(fj, &s), &vsub(cdeg, fj)).scale(a);
                    (offsets[c][*j].0, cm)
                })
                .collect();
            push_block(&mut rows, &parts);
        }
        // Compatibility with restrictions to each facet.
        for &t in fan.facets(c) {
            let rf = f.restriction_ref(c, t).expect("restriction");
            let rg = g.restriction_ref(c, t).expect("restriction");
            let st = f.native(t, m);
            let ft = f.stalk(t);
            for (j, fj) in fs.gens().iter().enumerate() {
                let mut parts = vec![(offsets[c][j].0, rg.evaluate(&vadd(fj, &s)))];
                let moved = fs.frame.transport(&ft.frame, fj);
                for (&(i, jj), a) in &rf.matrix {
                    if jj != j {
                        continue;
                    }
                    let fi = &ft.gens()[i];
                    let cm = g.stalk(t).character_map(&vadd(fi, &st), &vsub(&moved, fi)).scale(&-a.clone());
                    parts.push((offsets[t][i].0, cm));
                }
                push_block(&mut rows, &parts);
            }
        }
    }
    if rows.is_empty() {
        return Ok(nvars);
    }
    let a = QMatrix::from_rows(rows.len(), nvars, rows.into_iter().flatten().collect());
    Ok(nvars - a.rank())
}

/// Maps of cosheaves `C → D` raising degrees by `m`; the graded dual turns
/// them into maps `D∨ → C∨` of the same degree.
pub fn cosheaf_hom_pieces(c: &CoSheafTcf, d: &CoSheafTcf, m: &LatticeVector) -> Result<usize> {
    hom_pieces(d.underlying(), c.underlying(), m)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::lattice_fan::{builtin_fan, Fan, ZERO_CONE};
    use crate::sheaf_modules::{standard_open, standard_point};
    use crate::stalk_algebras::{piece_dim_a, Flavor};

    fn fan(name: &str) -> Arc<Fan> {
        Arc::new(builtin_fan(name).unwrap())
    }

    #[test]
    fn projective_hom_is_stalk_piece() {
        let f = fan("p2");
        for s in f.cone_ids() {
            let p = standard_open(&f, s, Flavor::A, &[1, -1]).unwrap();
            for t in f.cone_ids() {
                let g = standard_open(&f, t, Flavor::A, &[0, 0]).unwrap();
                for a in -2..=2 {
                    for b in -2..=2 {
                        let m = LatticeVector(vec![a, b]);
                        let want = g.stalk(s).piece_dim(&[1 + a, -1 + b]);
                        assert_eq!(hom_pieces(&p, &g, &m).unwrap(), want, "{s} {t} {m:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn open_to_point_vanishes_off_diagonal() {
        let f = fan("a2");
        for t in f.cone_ids() {
            for x in f.cone_ids() {
                let src = standard_open(&f, t, Flavor::A, &[0, 0]).unwrap();
                let tgt = standard_point(&f, x, Flavor::A, &[1, 0]).unwrap();
                for a in -2..=2 {
                    let m = LatticeVector(vec![a, 0]);
                    let want = if t == x { piece_dim_a(&f, t, &LatticeVector(vec![a - 1, 0])).unwrap() } else { 0 };
                    assert_eq!(hom_pieces(&src, &tgt, &m).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn point_into_open_vanishes() {
        let f = fan("a2");
        let s = f.cone_id(&[0, 1]).unwrap();
        let p = standard_point(&f, s, Flavor::A, &[0, 0]).unwrap();
        let o = standard_open(&f, s, Flavor::A, &[0, 0]).unwrap();
        // A map from the point sheaf must vanish after restriction, which
        // kills everything since the restrictions of 𝒜_{[σ]} are injective.
        assert_eq!(hom_pieces(&p, &o, &LatticeVector(vec![0, 0])).unwrap(), 0);
        assert_eq!(hom_pieces(&p, &p, &LatticeVector(vec![1, 0])).unwrap(), 1);
        let z = standard_open(&f, ZERO_CONE, Flavor::A, &[0, 0]).unwrap();
        assert_eq!(hom_pieces(&z, &z, &LatticeVector(vec![3, -4])).unwrap(), 1);
    }
}
