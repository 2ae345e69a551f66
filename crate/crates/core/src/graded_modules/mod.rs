//! Finitely presented graded modules over a stalk algebra. Every matrix
//! entry is a scalar times a character, so a presentation is a list of
//! generator degrees plus a sparse scalar matrix whose column degrees fix
//! the characters.

mod syzygy;

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice_fan::{dual_basis, ConeId, Fan, LatticeVector};
use crate::linalg::{QMatrix, QuotientBasis, Q};
use crate::stalk_algebras::Flavor;

pub use syzygy::{kernel_presentation, syzygy_generators};

/// A degree in the native coordinates of a module: `M` for flavor A,
/// `Z^dim σ` for flavor B.
pub type Degree = Vec<i64>;

pub fn vadd(a: &[i64], b: &[i64]) -> Degree {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vsub(a: &[i64], b: &[i64]) -> Degree {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vneg(a: &[i64]) -> Degree {
    a.iter().map(|x| -x).collect()
}

/// The cone a module lives over, with enough data to test semigroup
/// membership without the fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeFrame {
    pub cone: ConeId,
    pub flavor: Flavor,
    pub rank: usize,
    pub rays: Vec<LatticeVector>,
}

impl ConeFrame {
    pub fn new(fan: &Fan, cone: ConeId, flavor: Flavor) -> Self {
        ConeFrame {
            cone,
            flavor,
            rank: fan.rank(),
            rays: fan.ray_vectors(cone).into_iter().cloned().collect(),
        }
    }

    pub fn degree_len(&self) -> usize {
        match self.flavor {
            Flavor::A => self.rank,
            Flavor::B => self.rays.len(),
        }
    }

    /// Coordinates in `M_σ`: pairings for A, identity for B.
    pub fn bdeg(&self, d: &[i64]) -> Degree {
        match self.flavor {
            Flavor::A => self.rays.iter().map(|r| r.0.iter().zip(d).map(|(a, b)| a * b).sum()).collect(),
            Flavor::B => d.to_vec(),
        }
    }

    pub fn in_semigroup(&self, d: &[i64]) -> bool {
        self.bdeg(d).iter().all(|&x| x >= 0)
    }

    /// Positions of `face`'s rays among ours, if `face` is a face.
    pub fn face_positions(&self, face: &ConeFrame) -> Option<Vec<usize>> {
        face.rays.iter().map(|r| self.rays.iter().position(|x| x == r)).collect()
    }

    /// Degree transport to a face frame (identity on `M` for A, coordinate
    /// projection for B).
    pub fn transport(&self, face: &ConeFrame, d: &[i64]) -> Degree {
        match self.flavor {
            Flavor::A => d.to_vec(),
            Flavor::B => {
                let pos = self.face_positions(face).expect("not a face");
                pos.iter().map(|&p| d[p]).collect()
            }
        }
    }

    /// A degree with the given `M_σ` coordinates: the anchor plus a section
    /// of the difference (flavor A); the coordinates themselves for B.
    pub fn lift(&self, anchor: &[i64], b: &[i64]) -> Degree {
        match self.flavor {
            Flavor::B => b.to_vec(),
            Flavor::A => {
                let diff = vsub(b, &self.bdeg(anchor));
                let mut out = anchor.to_vec();
                for (u, k) in dual_basis(&self.rays, self.rank).iter().zip(&diff) {
                    for (o, x) in out.iter_mut().zip(&u.0) {
                        *o += k * x;
                    }
                }
                out
            }
        }
    }

    fn check_degree(&self, d: &[i64]) -> Result<()> {
        if d.len() != self.degree_len() {
            return Err(Error::LengthMismatch { expected: self.degree_len(), got: d.len() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledCharacter {
    pub coeff: Q,
    pub degree: Degree,
}

/// A map between sums of twisted free modules: entry `(i, j)` is
/// `coeff · χ^{col_degrees[j] − row_degrees[i]}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HomogeneousMatrix {
    pub row_degrees: Vec<Degree>,
    pub col_degrees: Vec<Degree>,
    pub entries: BTreeMap<(usize, usize), Q>,
}

impl HomogeneousMatrix {
    pub fn entry(&self, i: usize, j: usize) -> Option<ScaledCharacter> {
        self.entries.get(&(i, j)).map(|c| ScaledCharacter {
            coeff: c.clone(),
            degree: vsub(&self.col_degrees[j], &self.row_degrees[i]),
        })
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, &Q)> + '_ {
        self.entries.iter().filter(move |((_, c), _)| *c == j).map(|((r, _), v)| (*r, v))
    }

    pub fn columns(&self) -> Vec<Vec<(usize, Q)>> {
        let mut cols = vec![Vec::new(); self.col_degrees.len()];
        for (&(r, c), v) in &self.entries {
            cols[c].push((r, v.clone()));
        }
        cols
    }
}

/// `⊕ 𝒜(gens[i]) / (image of relations)` over the frame's stalk algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgGradedModule {
    pub frame: ConeFrame,
    pub relations: HomogeneousMatrix,
}

/// A graded piece: the active generators and a basis of the quotient of
/// their span by the active relation columns.
#[derive(Clone, Debug)]
pub struct Piece {
    pub gens: Vec<usize>,
    pub quotient: QuotientBasis,
}

impl Piece {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn position(&self, gen: usize) -> Option<usize> {
        self.gens.iter().position(|&g| g == gen)
    }
}

impl FgGradedModule {
    /// Builds a presentation. `relations` lists, per relation column, its
    /// degree and its nonzero entries `(generator, coefficient)`.
    pub fn new(frame: ConeFrame, gens: Vec<Degree>, relations: Vec<(Degree, Vec<(usize, Q)>)>) -> Result<Self> {
        for g in &gens {
            frame.check_degree(g)?;
        }
        let mut m = HomogeneousMatrix { row_degrees: gens, ..Default::default() };
        for (j, (deg, entries)) in relations.into_iter().enumerate() {
            frame.check_degree(&deg)?;
            for (i, c) in entries {
                if i >= m.row_degrees.len() {
                    return Err(Error::BadMorphism(format!("relation entry row {i} out of range")));
                }
                if c.is_zero() {
                    continue;
                }
                if !frame.in_semigroup(&vsub(&deg, &m.row_degrees[i])) {
                    return Err(Error::DegreeOutsideSemigroup { row: i, col: j });
                }
                m.entries.insert((i, j), c);
            }
            m.col_degrees.push(deg);
        }
        Ok(FgGradedModule { frame, relations: m })
    }

    pub fn free(frame: ConeFrame, gens: Vec<Degree>) -> Result<Self> {
        Self::new(frame, gens, Vec::new())
    }

    pub fn zero(frame: ConeFrame) -> Self {
        FgGradedModule { frame, relations: HomogeneousMatrix::default() }
    }

    pub fn cone(&self) -> ConeId {
        self.frame.cone
    }

    pub fn flavor(&self) -> Flavor {
        self.frame.flavor
    }

    pub fn gens(&self) -> &[Degree] {
        &self.relations.row_degrees
    }

    pub fn num_gens(&self) -> usize {
        self.relations.row_degrees.len()
    }

    pub fn is_free(&self) -> bool {
        self.relations.col_degrees.is_empty()
    }

    pub fn piece(&self, m: &[i64]) -> Piece {
        let gens: Vec<usize> =
            (0..self.num_gens()).filter(|&i| self.frame.in_semigroup(&vsub(m, &self.gens()[i]))).collect();
        let mut rels = Vec::new();
        for (j, col) in self.relations.columns().into_iter().enumerate() {
            if col.is_empty() || !self.frame.in_semigroup(&vsub(m, &self.relations.col_degrees[j])) {
                continue;
            }
            let mut v = vec![Q::zero(); gens.len()];
            for (i, c) in col {
                let p = gens.iter().position(|&g| g == i).expect("active column with inactive row");
                v[p] = c;
            }
            rels.push(v);
        }
        Piece { quotient: QuotientBasis::new(gens.len(), &rels), gens }
    }

    pub fn piece_dim(&self, m: &[i64]) -> usize {
        self.piece(m).dim()
    }

    /// Multiplication by `χ^u` from the piece at `m` to the piece at `m + u`.
    pub fn character_map(&self, m: &[i64], u: &[i64]) -> QMatrix {
        let src = self.piece(m);
        let tgt = self.piece(&vadd(m, u));
        let mut amb = QMatrix::zeros(tgt.gens.len(), src.gens.len());
        if self.frame.in_semigroup(u) {
            for (c, g) in src.gens.iter().enumerate() {
                if let Some(r) = tgt.position(*g) {
                    amb.set(r, c, Q::from_integer(1.into()));
                }
            }
        }
        tgt.quotient.projection.mul(&amb).mul(&src.quotient.section)
    }

    /// Shift of grading: `F(u)` has its generators in degrees `g + u`.
    pub fn twist(&self, u: &[i64]) -> Self {
        let mut r = self.relations.clone();
        for d in r.row_degrees.iter_mut().chain(r.col_degrees.iter_mut()) {
            *d = vadd(d, u);
        }
        FgGradedModule { frame: self.frame.clone(), relations: r }
    }

    pub fn direct_sum(parts: &[&FgGradedModule], frame: ConeFrame) -> Self {
        let mut r = HomogeneousMatrix::default();
        for p in parts {
            let (ro, co) = (r.row_degrees.len(), r.col_degrees.len());
            r.row_degrees.extend(p.relations.row_degrees.iter().cloned());
            r.col_degrees.extend(p.relations.col_degrees.iter().cloned());
            for (&(i, j), v) in &p.relations.entries {
                r.entries.insert((i + ro, j + co), v.clone());
            }
        }
        FgGradedModule { frame, relations: r }
    }

    /// Extension of scalars to a face: the same presentation over the
    /// larger algebra of `face`.
    pub fn base_change(&self, face: &ConeFrame) -> Self {
        let mut r = self.relations.clone();
        for d in r.row_degrees.iter_mut().chain(r.col_degrees.iter_mut()) {
            *d = self.frame.transport(face, d);
        }
        FgGradedModule { frame: face.clone(), relations: r }
    }

    /// Regrading along `M → M_σ`: a flavor A module becomes a flavor B module.
    pub fn delta_extension(&self) -> Result<Self> {
        if self.flavor() != Flavor::A {
            return Err(Error::FlavorMismatch { expected: "A" });
        }
        let mut frame = self.frame.clone();
        frame.flavor = Flavor::B;
        let mut r = self.relations.clone();
        for d in r.row_degrees.iter_mut().chain(r.col_degrees.iter_mut()) {
            *d = self.frame.bdeg(d);
        }
        Ok(FgGradedModule { frame, relations: r })
    }

    pub fn identity(&self) -> ModuleMorphism {
        let entries = (0..self.num_gens()).map(|i| ((i, i), Q::from_integer(1.into()))).collect();
        ModuleMorphism {
            source: self.clone(),
            target: self.clone(),
            matrix: entries,
            shift: vec![0; self.frame.degree_len()],
        }
    }
}

/// A homogeneous map `source → target(shift)`. Entry `(i, j)` is the
/// coefficient of target generator `i` in the image of source generator
/// `j`; the character is forced by the degrees. The target may live over a
/// face of the source cone (restriction maps).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMorphism {
    pub source: FgGradedModule,
    pub target: FgGradedModule,
    pub matrix: BTreeMap<(usize, usize), Q>,
    pub shift: Degree,
}

impl ModuleMorphism {
    pub fn new(
        source: FgGradedModule,
        target: FgGradedModule,
        entries: impl IntoIterator<Item = ((usize, usize), Q)>,
        shift: Degree,
    ) -> Result<Self> {
        if source.flavor() != target.flavor() {
            return Err(Error::ConeMismatch);
        }
        if source.frame.face_positions(&target.frame).is_none() || target.frame.rank != source.frame.rank {
            return Err(Error::ConeMismatch);
        }
        target.frame.check_degree(&shift)?;
        let mut matrix = BTreeMap::new();
        for ((i, j), c) in entries {
            if i >= target.num_gens() || j >= source.num_gens() {
                return Err(Error::BadMorphism(format!("entry ({i},{j}) out of range")));
            }
            if c.is_zero() {
                continue;
            }
            matrix.insert((i, j), c);
        }
        let f = ModuleMorphism { source, target, matrix, shift };
        for (&(i, j), _) in &f.matrix {
            if !f.target.frame.in_semigroup(&f.character(i, j)) {
                return Err(Error::DegreeOutsideSemigroup { row: i, col: j });
            }
        }
        f.check_relations()?;
        Ok(f)
    }

    /// Skips validation; callers guarantee the degree and relation laws.
    pub(crate) fn new_unchecked(
        source: FgGradedModule,
        target: FgGradedModule,
        matrix: BTreeMap<(usize, usize), Q>,
        shift: Degree,
    ) -> Self {
        debug_assert!(matrix.values().all(|c| !c.is_zero()));
        ModuleMorphism { source, target, matrix, shift }
    }

    /// Same source, target and shift, and equal on every generator: the
    /// morphisms agree as maps.
    pub fn same_map(&self, other: &ModuleMorphism) -> bool {
        self.shift == other.shift
            && self.source.gens().iter().all(|g| self.evaluate(g) == other.evaluate(g))
    }

    /// Degree of the character in entry `(i, j)`.
    pub fn character(&self, i: usize, j: usize) -> Degree {
        let moved = self.source.frame.transport(&self.target.frame, &self.source.gens()[j]);
        vsub(&vadd(&moved, &self.shift), &self.target.gens()[i])
    }

    /// Target degree of a source degree.
    pub fn image_degree(&self, m: &[i64]) -> Degree {
        vadd(&self.source.frame.transport(&self.target.frame, m), &self.shift)
    }

    fn check_relations(&self) -> Result<()> {
        for (k, col) in self.source.relations.columns().into_iter().enumerate() {
            let deg = &self.source.relations.col_degrees[k];
            let tgt_deg = self.image_degree(deg);
            let piece = self.target.piece(&tgt_deg);
            let mut v = vec![Q::zero(); piece.gens.len()];
            for (j, c) in &col {
                for (&(i, jj), e) in &self.matrix {
                    if jj != *j {
                        continue;
                    }
                    let p = piece.position(i).expect("inactive target generator");
                    v[p] += c * e;
                }
            }
            if piece.quotient.projection.mul_vec(&v).iter().any(|x| !x.is_zero()) {
                return Err(Error::BadMorphism(format!("relation {k} does not map into relations")));
            }
        }
        Ok(())
    }

    /// Matrix of the induced map from the source piece at `m` to the target
    /// piece at `image_degree(m)`, in the bases of [`FgGradedModule::piece`].
    pub fn evaluate(&self, m: &[i64]) -> QMatrix {
        let src = self.source.piece(m);
        let tgt = self.target.piece(&self.image_degree(m));
        let mut amb = QMatrix::zeros(tgt.gens.len(), src.gens.len());
        for (&(i, j), c) in &self.matrix {
            if let (Some(r), Some(col)) = (tgt.position(i), src.position(j)) {
                amb.set(r, col, c.clone());
            }
        }
        tgt.quotient.projection.mul(&amb).mul(&src.quotient.section)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleMorphism) -> Result<ModuleMorphism> {
        if self.target.relations != other.source.relations || self.target.frame != other.source.frame {
            return Err(Error::ConeMismatch);
        }
        let mut entries: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for (&(k, i), b) in &other.matrix {
            for (&(ii, j), a) in &self.matrix {
                if ii == i {
                    *entries.entry((k, j)).or_insert_with(Q::zero) += b * a;
                }
            }
        }
        let shift = vadd(&self.target.frame.transport(&other.target.frame, &self.shift), &other.shift);
        ModuleMorphism::new(self.source.clone(), other.target.clone(), entries, shift)
    }

    pub fn is_degree_zero(&self) -> bool {
        self.shift.iter().all(|&x| x == 0)
    }

    /// Regrades a same-cone flavor A morphism to flavor B.
    pub fn delta_extension(&self) -> Result<ModuleMorphism> {
        let shift = match self.source.flavor() {
            Flavor::A => self.target.frame.bdeg(&self.shift),
            Flavor::B => return Err(Error::FlavorMismatch { expected: "A" }),
        };
        ModuleMorphism::new(
            self.source.delta_extension()?,
            self.target.delta_extension()?,
            self.matrix.clone(),
            shift,
        )
    }
}

/// The graded dual of a finitely presented module, kept formal: its piece
/// at `m` is the dual of the underlying piece at `−m`, so `(F(u))∨ = F∨(−u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDualModule {
    pub underlying: FgGradedModule,
}

pub fn graded_dual(module: &FgGradedModule) -> GradedDualModule {
    GradedDualModule { underlying: module.clone() }
}

impl GradedDualModule {
    pub fn dual_piece(&self, m: &[i64]) -> usize {
        self.underlying.piece_dim(&vneg(m))
    }

    pub fn dual(&self) -> &FgGradedModule {
        &self.underlying
    }
}

/// The dual of `f: F → G` sends `G∨` to `F∨`. Its matrix into `F∨` at `m`
/// is the transpose of `f` at `−m`.
pub fn dual_morphism_at(f: &ModuleMorphism, m: &[i64]) -> QMatrix {
    f.evaluate(&vneg(m)).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_fan::builtin_fan;
    use crate::linalg::q;

    fn a2_top() -> (Fan, ConeFrame) {
        let f = builtin_fan("a2").unwrap();
        let s = f.cone_id(&[0, 1]).unwrap();
        let fr = ConeFrame::new(&f, s, Flavor::A);
        (f, fr)
    }

    #[test]
    fn free_piece_matches_algebra() {
        let (_, fr) = a2_top();
        let m = FgGradedModule::free(fr, vec![vec![1, -1]]).unwrap();
        assert_eq!(m.piece_dim(&[1, -1]), 1);
        assert_eq!(m.piece_dim(&[3, 0]), 1);
        assert_eq!(m.piece_dim(&[0, 0]), 0);
    }

    #[test]
    fn cyclic_quotient_pieces() {
        let (_, fr) = a2_top();
        let m = FgGradedModule::new(fr.clone(), vec![vec![0, 0]], vec![(vec![1, 0], vec![(0, q(1))])]).unwrap();
        assert_eq!(m.piece_dim(&[0, 0]), 1);
        assert_eq!(m.piece_dim(&[1, 0]), 0);
        assert_eq!(m.piece_dim(&[0, 5]), 1);
        let c = FgGradedModule::new(fr, vec![vec![0, 0]], vec![(vec![1, 1], vec![(0, q(2))])]).unwrap();
        assert_eq!(c.piece_dim(&[1, 1]), 0);
        assert_eq!(c.piece_dim(&[1, 0]), 1);
    }

    #[test]
    fn relation_outside_semigroup_rejected() {
        let (_, fr) = a2_top();
        let err = FgGradedModule::new(fr, vec![vec![0, 0]], vec![(vec![-1, 0], vec![(0, q(1))])]).unwrap_err();
        assert_eq!(err, Error::DegreeOutsideSemigroup { row: 0, col: 0 });
    }

    #[test]
    fn morphism_evaluation_and_composition() {
        let (_, fr) = a2_top();
        let a = FgGradedModule::free(fr.clone(), vec![vec![0, 0]]).unwrap();
        let b = FgGradedModule::free(fr.clone(), vec![vec![-1, 0]]).unwrap();
        // multiplication by x: A → A(1,0) written with target generator at (−1,0)
        let f = ModuleMorphism::new(a.clone(), b.clone(), [((0, 0), q(1))], vec![0, 0]).unwrap();
        assert_eq!(f.evaluate(&[0, 0]).shape(), (1, 1));
        assert_eq!(f.evaluate(&[-1, 0]).shape(), (1, 0));
        let id = a.identity();
        let g = id.then(&f).unwrap();
        for x in -2..=2 {
            for y in -2..=2 {
                assert_eq!(g.evaluate(&[x, y]), f.evaluate(&[x, y]));
            }
        }
        assert!(ModuleMorphism::new(b, a, [((0, 0), q(1))], vec![0, 0]).is_err());
    }

    #[test]
    fn morphism_must_respect_relations() {
        let (_, fr) = a2_top();
        let quot = FgGradedModule::new(fr.clone(), vec![vec![0, 0]], vec![(vec![1, 0], vec![(0, q(1))])]).unwrap();
        let free = FgGradedModule::free(fr, vec![vec![0, 0]]).unwrap();
        assert!(ModuleMorphism::new(free.clone(), quot.clone(), [((0, 0), q(1))], vec![0, 0]).is_ok());
        assert!(ModuleMorphism::new(quot, free, [((0, 0), q(1))], vec![0, 0]).is_err());
    }

    #[test]
    fn dual_and_twist_conventions() {
        let (_, fr) = a2_top();
        let m0 = vec![2, -1];
        let a = FgGradedModule::free(fr.clone(), vec![vec![0, 0]]).unwrap();
        let d = graded_dual(&a.twist(&m0));
        let dt = graded_dual(&a);
        for x in -3..=3 {
            for y in -3..=3 {
                let m = vec![x, y];
                assert_eq!(d.dual_piece(&m), dt.dual_piece(&vadd(&m, &m0)));
                assert_eq!(graded_dual(d.dual()).dual_piece(&m), d.dual_piece(&m));
            }
        }
    }

    #[test]
    fn delta_extension_preserves_pieces() {
        let f = builtin_fan("p1xp1").unwrap();
        let e = f.cone_id(&[0]).unwrap();
        let fr = ConeFrame::new(&f, e, Flavor::A);
        let m = FgGradedModule::new(fr, vec![vec![0, 3], vec![1, 0]], vec![(vec![2, 1], vec![(0, q(1)), (1, q(-3))])])
            .unwrap();
        let b = m.delta_extension().unwrap();
        for x in -3..=3 {
            for y in -3..=3 {
                let d = vec![x, y];
                assert_eq!(m.piece_dim(&d), b.piece_dim(&m.frame.bdeg(&d)));
            }
        }
    }

    #[test]
    fn lift_has_requested_coordinates() {
        let f = builtin_fan("hirzebruch1").unwrap();
        for s in f.cone_ids() {
            let fr = ConeFrame::new(&f, s, Flavor::A);
            let b = vec![3; fr.rays.len()];
            let l = fr.lift(&[1, -2], &b);
            assert_eq!(fr.bdeg(&l), b);
        }
    }
}
