//! Kernels of homogeneous maps. Computations run in `M_σ` coordinates,
//! where the algebra is a polynomial ring with its fine grading and every
//! minimal syzygy sits at a join of column degrees.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::{Degree, FgGradedModule, ModuleMorphism};
use crate::error::{Error, Result};
use crate::linalg::{QMatrix, Q};

fn leq(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn join(a: &[i64], b: &[i64]) -> Degree {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn join_closure(degrees: &[Degree]) -> Vec<Degree> {
    let mut closure: BTreeSet<Degree> = BTreeSet::new();
    for c in degrees {
        let joined: Vec<Degree> = closure.iter().map(|x| join(x, c)).collect();
        closure.insert(c.clone());
        closure.extend(joined);
    }
    let mut out: Vec<Degree> = closure.into_iter().collect();
    out.sort_by_key(|d| (d.iter().sum::<i64>(), d.clone()));
    out
}

/// Generators of the projection onto the first `keep` columns of the
/// syzygy module of a monomial matrix (columns given sparsely, fine
/// `Z^d` grading). Each generator is returned with its degree, as a
/// coefficient vector of length `keep`; no generator lies in the span of
/// the lower ones.
pub fn syzygy_generators(
    col_degrees: &[Degree],
    columns: &[Vec<(usize, Q)>],
    nrows: usize,
    keep: usize,
) -> Vec<(Degree, Vec<Q>)> {
    let mut chosen: Vec<(Degree, Vec<Q>)> = Vec::new();
    for g in join_closure(col_degrees) {
        let active: Vec<usize> = (0..col_degrees.len()).filter(|&j| leq(&col_degrees[j], &g)).collect();
        let mut a = QMatrix::zeros(nrows, active.len());
        for (c, &j) in active.iter().enumerate() {
            for (r, v) in &columns[j] {
                a.set(*r, c, v.clone());
            }
        }
        let mut span: Vec<Vec<Q>> = chosen.iter().filter(|(d, _)| leq(d, &g)).map(|(_, v)| v.clone()).collect();
        let mut rank = rank_of(&span, keep);
        for k in a.kernel_basis() {
            let mut v = vec![Q::zero(); keep];
            for (c, &j) in active.iter().enumerate() {
                if j < keep {
                    v[j] = k[c].clone();
                }
            }
            if v.iter().all(|x| x.is_zero()) {
                continue;
            }
            span.push(v.clone());
            let r = rank_of(&span, keep);
            if r > rank {
                rank = r;
                chosen.push((g.clone(), v));
            } else {
                span.pop();
            }
        }
    }
    chosen
}

fn rank_of(rows: &[Vec<Q>], width: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    QMatrix::from_rows(rows.len(), width, rows.iter().flatten().cloned().collect()).rank()
}

/// A presentation of `ker φ` with its inclusion into the source.
pub fn kernel_presentation(phi: &ModuleMorphism) -> Result<(FgGradedModule, ModuleMorphism)> {
    let (f, g) = (&phi.source, &phi.target);
    if f.frame != g.frame {
        return Err(Error::ConeMismatch);
    }
    if !phi.is_degree_zero() {
        return Err(Error::BadMorphism("kernel needs a degree-zero morphism".into()));
    }
    let frame = &f.frame;
    let nf = f.num_gens();

    // Elements of the free cover of F whose image lies in G's relations.
    let mut degrees: Vec<Degree> = f.gens().iter().map(|d| frame.bdeg(d)).collect();
    let mut columns: Vec<Vec<(usize, Q)>> = vec![Vec::new(); nf];
    for (&(i, j), c) in &phi.matrix {
        columns[j].push((i, c.clone()));
    }
    degrees.extend(g.relations.col_degrees.iter().map(|d| frame.bdeg(d)));
    columns.extend(g.relations.columns());
    let mut gens: Vec<Degree> = Vec::new();
    let mut cover: Vec<Vec<Q>> = Vec::new();
    for (b, v) in syzygy_generators(&degrees, &columns, g.num_gens(), nf) {
        let anchor = v.iter().position(|x| !x.is_zero()).expect("zero generator");
        let d = frame.lift(&f.gens()[anchor], &b);
        // Drop generators that vanish in F.
        let piece = f.piece(&d);
        let amb: Vec<Q> = piece.gens.iter().map(|&j| v[j].clone()).collect();
        if piece.quotient.projection.mul_vec(&amb).iter().all(|x| x.is_zero()) {
            continue;
        }
        gens.push(d);
        cover.push(v);
    }

    // Relations among the chosen generators modulo F's relations.
    let nk = gens.len();
    let mut degrees: Vec<Degree> = gens.iter().map(|d| frame.bdeg(d)).collect();
    let mut columns: Vec<Vec<(usize, Q)>> = cover
        .iter()
        .map(|v| v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.clone())).collect())
        .collect();
    degrees.extend(f.relations.col_degrees.iter().map(|d| frame.bdeg(d)));
    columns.extend(f.relations.columns());
    let mut relations = Vec::new();
    for (b, v) in syzygy_generators(&degrees, &columns, nf, nk) {
        let anchor = v.iter().position(|x| !x.is_zero()).expect("zero generator");
        let d = frame.lift(&gens[anchor], &b);
        let entries = v.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        relations.push((d, entries));
    }
    let kernel = FgGradedModule::new(frame.clone(), gens, relations)?;
    let entries: Vec<((usize, usize), Q)> = cover
        .iter()
        .enumerate()
        .flat_map(|(k, v)| v.iter().enumerate().map(move |(j, x)| ((j, k), x.clone())))
        .collect();
    let inclusion = ModuleMorphism::new(kernel.clone(), f.clone(), entries, vec![0; frame.degree_len()])?;
    Ok((kernel, inclusion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_modules::ConeFrame;
    use crate::lattice_fan::builtin_fan;
    use crate::linalg::q;
    use crate::stalk_algebras::Flavor;

    fn check_kernel(phi: &ModuleMorphism, radius: i64) {
        let (k, inc) = kernel_presentation(phi).unwrap();
        let n = phi.source.frame.degree_len();
        let mut stack = vec![vec![]];
        for _ in 0..n {
            stack = stack
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (-radius..=radius).map(move |x| {
                        let mut p = p.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        for m in stack {
            let e = phi.evaluate(&m);
            let ker_dim = e.ncols() - e.rank();
            assert_eq!(k.piece_dim(&m), ker_dim, "degree {m:?}");
            let i = inc.evaluate(&m);
            assert_eq!(i.rank(), ker_dim);
            assert!(e.mul(&i).is_zero());
        }
    }

    #[test]
    fn koszul_syzygy_in_degree_one_one() {
        let f = builtin_fan("a2").unwrap();
        let s = f.cone_id(&[0, 1]).unwrap();
        let fr = ConeFrame::new(&f, s, Flavor::A);
        let src = FgGradedModule::free(fr.clone(), vec![vec![1, 0], vec![0, 1]]).unwrap();
        let tgt = FgGradedModule::free(fr, vec![vec![0, 0]]).unwrap();
        let phi = ModuleMorphism::new(src, tgt, [((0, 0), q(1)), ((0, 1), q(1))], vec![0, 0]).unwrap();
        let (k, _) = kernel_presentation(&phi).unwrap();
        assert_eq!(k.gens(), &[vec![1, 1]]);
        assert!(k.is_free());
        check_kernel(&phi, 3);
    }

    #[test]
    fn kernel_of_zero_map_is_source() {
        let f = builtin_fan("p2").unwrap();
        let s = f.cone_id(&[1]).unwrap();
        let fr = ConeFrame::new(&f, s, Flavor::A);
        let src = FgGradedModule::new(fr.clone(), vec![vec![0, 0], vec![1, -1]], vec![(vec![1, 1], vec![(0, q(2))])])
            .unwrap();
        let tgt = FgGradedModule::free(fr, vec![vec![0, 0]]).unwrap();
        let phi = ModuleMorphism::new(src.clone(), tgt, [], vec![0, 0]).unwrap();
        let (k, _) = kernel_presentation(&phi).unwrap();
        let mut got = k.gens().to_vec();
        got.sort();
        assert_eq!(got, src.gens());
        check_kernel(&phi, 3);
    }

    #[test]
    fn kernel_into_quotient() {
        let f = builtin_fan("a3").unwrap();
        let s = f.cone_id(&[0, 1, 2]).unwrap();
        let fr = ConeFrame::new(&f, s, Flavor::A);
        let src = FgGradedModule::free(fr.clone(), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let tgt = FgGradedModule::new(fr, vec![vec![0, 0, 0]], vec![(vec![1, 1, 0], vec![(0, q(1))])]).unwrap();
        let phi = ModuleMorphism::new(src, tgt, [((0, 0), q(1)), ((0, 1), q(2)), ((0, 2), q(-1))], vec![0, 0, 0])
            .unwrap();
        check_kernel(&phi, 2);
    }
}
