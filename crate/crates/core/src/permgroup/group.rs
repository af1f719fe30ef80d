//! Generator-defined permutation groups: base/strong-generating-set
//! construction, membership sifting, exact order, canonical enumeration,
//! and exactly uniform sampling.

use std::collections::BTreeMap;

use num::bigint::BigUint;
use num::traits::One;
use thiserror::Error;

use crate::permgroup::perm::{PermError, Permutation, Point};
use crate::rng::BitSource;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("group order {order} exceeds cap {cap}")]
    OrderExceedsCap { order: BigUint, cap: u64 },
}

/// A list of same-degree generators; the empty list denotes the trivial
/// group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    degree: usize,
    generators: Vec<Permutation>,
}

impl GeneratorSet {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self, GroupError> {
        if degree == 0 {
            return Err(PermError::BadDegree(0).into());
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch(g.degree(), degree).into());
            }
        }
        Ok(Self { degree, generators })
    }

    pub fn trivial(degree: usize) -> Self {
        Self {
            degree,
            generators: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Group text form: `degree <m>` then one generator per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("degree {}\n", self.degree);
        for g in &self.generators {
            out.push_str(&g.to_text());
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, GroupError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| PermError::Parse("empty group text".into()))?;
        let degree = parse_degree_header(header)?;
        let mut generators = Vec::new();
        for line in lines {
            generators.push(Permutation::parse_text(line, Some(degree))?);
        }
        GeneratorSet::new(degree, generators)
    }
}

pub(crate) fn parse_degree_header(line: &str) -> Result<usize, PermError> {
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some("degree"), Some(m), None) => m
            .parse::<usize>()
            .ok()
            .filter(|&m| m >= 1)
            .ok_or_else(|| PermError::Parse(format!("bad degree header: {line}"))),
        _ => Err(PermError::Parse(format!("expected 'degree <m>', got: {line}"))),
    }
}

/// One stabilizer level: the base point and the transversal of its orbit,
/// sorted by orbit point. Each representative `u` satisfies
/// `u(base) = point` and fixes all earlier base points.
#[derive(Debug, Clone)]
pub struct TransversalLevel {
    pub base: Point,
    pub transversal: Vec<(Point, Permutation)>,
}

impl TransversalLevel {
    pub fn representative(&self, point: Point) -> Option<&Permutation> {
        self.transversal
            .binary_search_by_key(&point, |(p, _)| *p)
            .ok()
            .map(|i| &self.transversal[i].1)
    }
}

/// Base and strong generating set with transversals.
#[derive(Debug, Clone)]
pub struct Bsgs {
    degree: usize,
    base: Vec<Point>,
    strong_generators: Vec<Permutation>,
    levels: Vec<TransversalLevel>,
    order: BigUint,
}

impl Bsgs {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &[Point] {
        &self.base
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong_generators
    }

    pub fn levels(&self) -> &[TransversalLevel] {
        &self.levels
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_fits(&self, cap: u64) -> bool {
        self.order <= BigUint::from(cap)
    }

    /// Factor `p` through the transversals; membership holds iff the
    /// residue is the identity.
    pub fn sift(&self, p: &Permutation) -> Permutation {
        let mut cur = p.clone();
        for level in &self.levels {
            let image = cur.apply(level.base);
            match level.representative(image) {
                Some(rep) => cur = &rep.inverse() * &cur,
                None => return cur,
            }
        }
        cur
    }

    /// Membership test (polynomial-time sifting).
    pub fn contains(&self, p: &Permutation) -> Result<bool, GroupError> {
        if p.degree() != self.degree {
            return Err(PermError::DegreeMismatch(p.degree(), self.degree).into());
        }
        Ok(self.sift(p).is_identity())
    }

    /// Exactly uniform group element: one independent uniform transversal
    /// pick per level, multiplied in level order. Each group element is
    /// produced by exactly one tuple of picks.
    pub fn uniform_sample<B: BitSource + ?Sized>(&self, src: &mut B) -> Permutation {
        let mut acc = Permutation::identity(self.degree);
        for level in &self.levels {
            let idx = src.draw_index(level.transversal.len());
            acc = &acc * &level.transversal[idx].1;
        }
        acc
    }

    /// Bit widths drawn per level by `uniform_sample`, when those widths
    /// are fixed (every transversal size a power of two, so the modulo
    /// rejection never triggers). Exact enumerators need this.
    pub fn fixed_sample_widths(&self) -> Option<Vec<u32>> {
        self.levels
            .iter()
            .map(|level| {
                let n = level.transversal.len();
                if n.is_power_of_two() {
                    Some(if n == 1 { 0 } else { n.trailing_zeros() })
                } else {
                    None
                }
            })
            .collect()
    }

    /// All group elements in lexicographic image-array order.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<Permutation>, GroupError> {
        if !self.order_fits(cap) {
            return Err(GroupError::OrderExceedsCap {
                order: self.order.clone(),
                cap,
            });
        }
        let mut elements = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(elements.len() * level.transversal.len());
            for (_, rep) in &level.transversal {
                for tail in &elements {
                    next.push(rep * tail);
                }
            }
            elements = next;
        }
        elements.sort_unstable();
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        Ok(elements)
    }

    /// Structural invariants: order is the transversal-size product, every
    /// representative maps its base correctly and fixes earlier bases, and
    /// every strong generator sifts to the identity.
    pub fn validate(&self) -> Result<(), String> {
        let mut product = BigUint::one();
        for (l, level) in self.levels.iter().enumerate() {
            product *= BigUint::from(level.transversal.len());
            for (point, rep) in &level.transversal {
                if rep.apply(level.base) != *point {
                    return Err(format!("level {l}: representative misses its point"));
                }
                for earlier in &self.levels[..l] {
                    if rep.apply(earlier.base) != earlier.base {
                        return Err(format!("level {l}: representative moves an earlier base"));
                    }
                }
            }
        }
        if product != self.order {
            return Err("order differs from transversal-size product".into());
        }
        for g in &self.strong_generators {
            if !self.sift(g).is_identity() {
                return Err("strong generator does not sift to identity".into());
            }
        }
        Ok(())
    }
}

/// Deterministic Schreier–Sims. Base points are chosen as the smallest
/// point not fixed by the generator being inserted, so the structure,
/// the enumeration order, and everything derived from them are
/// reproducible functions of the input generator list.
pub fn schreier_sims(gens: &GeneratorSet) -> Bsgs {
    let mut builder = Builder {
        degree: gens.degree(),
        levels: Vec::new(),
    };
    for g in gens.generators() {
        builder.insert(g.clone());
    }
    builder.close();
    builder.finish()
}

struct BuildLevel {
    base: Point,
    /// Generators assigned here fix all earlier base points. A generator
    /// assigned at level `j` participates in the orbits of levels `0..=j`,
    /// so the strong set at level `l` is the union over levels `>= l`.
    gens: Vec<Permutation>,
    orbit: BTreeMap<Point, Permutation>,
}

struct Builder {
    degree: usize,
    levels: Vec<BuildLevel>,
}

impl Builder {
    /// Deepest level whose base prefix `g` fixes.
    fn assignment_level(&self, g: &Permutation) -> usize {
        let mut level = 0;
        while level < self.levels.len() && g.apply(self.levels[level].base) == self.levels[level].base
        {
            level += 1;
        }
        level
    }

    /// Assign a non-identity element as a strong generator. Returns the
    /// level it was assigned to.
    fn insert(&mut self, g: Permutation) -> Option<usize> {
        if g.is_identity() {
            return None;
        }
        let level = self.assignment_level(&g);
        if level == self.levels.len() {
            let base = g.min_moved_point().expect("non-identity");
            self.levels.push(BuildLevel {
                base,
                gens: Vec::new(),
                orbit: BTreeMap::new(),
            });
        }
        self.levels[level].gens.push(g);
        Some(level)
    }

    /// Generators participating at `level`, in deterministic order.
    fn strong_at(&self, level: usize) -> Vec<Permutation> {
        self.levels[level..]
            .iter()
            .flat_map(|l| l.gens.iter().cloned())
            .collect()
    }

    fn recompute_orbit(&mut self, level: usize) {
        let gens = self.strong_at(level);
        let base = self.levels[level].base;
        let mut orbit = BTreeMap::new();
        orbit.insert(base, Permutation::identity(self.degree));
        let mut queue = std::collections::VecDeque::from([base]);
        while let Some(point) = queue.pop_front() {
            let rep = orbit[&point].clone();
            for g in &gens {
                let image = g.apply(point);
                if let std::collections::btree_map::Entry::Vacant(slot) = orbit.entry(image) {
                    slot.insert(g * &rep);
                    queue.push_back(image);
                }
            }
        }
        self.levels[level].orbit = orbit;
    }

    fn sift_from(&self, start: usize, p: Permutation) -> (Permutation, usize) {
        let mut cur = p;
        for (offset, level) in self.levels[start..].iter().enumerate() {
            let image = cur.apply(level.base);
            match level.orbit.get(&image) {
                Some(rep) => cur = &rep.inverse() * &cur,
                None => return (cur, start + offset),
            }
        }
        (cur, self.levels.len())
    }

    /// Schreier check for one level. On finding a residue that the deeper
    /// structure cannot absorb, assigns it and reports the level touched.
    fn verify_level(&mut self, level: usize) -> Option<usize> {
        self.recompute_orbit(level);
        let gens = self.strong_at(level);
        let orbit: Vec<(Point, Permutation)> = self.levels[level]
            .orbit
            .iter()
            .map(|(p, u)| (*p, u.clone()))
            .collect();
        for (point, u_point) in &orbit {
            for g in &gens {
                let image = g.apply(*point);
                let u_image = self.levels[level].orbit[&image].clone();
                let schreier = &(&u_image.inverse() * g) * u_point;
                if schreier.is_identity() {
                    continue;
                }
                let (residue, _) = self.sift_from(level + 1, schreier);
                if !residue.is_identity() {
                    return self.insert(residue);
                }
            }
        }
        None
    }

    fn close(&mut self) {
        for l in 0..self.levels.len() {
            self.recompute_orbit(l);
        }
        let mut level = self.levels.len() as isize - 1;
        while level >= 0 {
            match self.verify_level(level as usize) {
                // New strong generator landed deeper; re-verify from there.
                Some(touched) => level = touched as isize,
                None => level -= 1,
            }
        }
        for l in 0..self.levels.len() {
            self.recompute_orbit(l);
        }
    }

    fn finish(self) -> Bsgs {
        let mut order = BigUint::one();
        let mut strong_generators = Vec::new();
        let mut base = Vec::new();
        let mut levels = Vec::new();
        for build in &self.levels {
            order *= BigUint::from(build.orbit.len());
            base.push(build.base);
            strong_generators.extend(build.gens.iter().cloned());
            levels.push(TransversalLevel {
                base: build.base,
                transversal: build.orbit.iter().map(|(p, u)| (*p, u.clone())).collect(),
            });
        }
        Bsgs {
            degree: self.degree,
            base,
            strong_generators,
            levels,
            order,
        }
    }
}

/// Generators of `G ∩ H`, by enumerating the smaller group and filtering
/// by membership in the other. The returned set lists every element of
/// the intersection.
pub fn intersect_bruteforce(g: &Bsgs, h: &Bsgs, cap: u64) -> Result<GeneratorSet, GroupError> {
    if g.degree() != h.degree() {
        return Err(PermError::DegreeMismatch(g.degree(), h.degree()).into());
    }
    let (small, large) = if g.order() <= h.order() { (g, h) } else { (h, g) };
    let elements = small.enumerate(cap)?;
    let mut intersection = Vec::new();
    for e in elements {
        if large.contains(&e)? {
            intersection.push(e);
        }
    }
    GeneratorSet::new(g.degree(), intersection)
}
