//! Double-coset membership instances, the 4-tuple-to-3-tuple
//! normalization, the desk-scale decision/factorization oracle, and the
//! representation-set machinery behind the protocol's counting facts.

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::permgroup::{
    parse_degree_header, schreier_sims, Bsgs, GeneratorSet, GroupError, PermError, Permutation,
};

/// Default enumeration cap for the brute-force oracle.
pub const DEFAULT_CAP: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DcmError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("s is not in the double coset GH")]
    NotInDoubleCoset,
    #[error("cannot parse instance: {0}")]
    Parse(String),
}

impl From<PermError> for DcmError {
    fn from(e: PermError) -> Self {
        DcmError::Group(GroupError::Perm(e))
    }
}

impl DcmError {
    /// True when the failure is a resource refusal rather than a
    /// semantic NO; the protocol layer must never confuse the two.
    pub fn is_resource_refusal(&self) -> bool {
        matches!(self, DcmError::Group(GroupError::OrderExceedsCap { .. }))
    }
}

/// An instance `(s, G, H)` of the membership question `s ∈ GH`.
#[derive(Debug, Clone, PartialEq)]
pub struct DcmInstance {
    pub s: Permutation,
    pub g_group: GeneratorSet,
    pub h_group: GeneratorSet,
}

impl DcmInstance {
    pub fn new(
        s: Permutation,
        g_group: GeneratorSet,
        h_group: GeneratorSet,
    ) -> Result<Self, DcmError> {
        if s.degree() != g_group.degree() {
            return Err(PermError::DegreeMismatch(s.degree(), g_group.degree()).into());
        }
        if s.degree() != h_group.degree() {
            return Err(PermError::DegreeMismatch(s.degree(), h_group.degree()).into());
        }
        Ok(Self {
            s,
            g_group,
            h_group,
        })
    }

    pub fn degree(&self) -> usize {
        self.s.degree()
    }

    /// Canonical instance file form. The digest of an instance is the
    /// SHA-256 of exactly these bytes.
    pub fn to_text(&self) -> String {
        let mut out = format!("degree {}\n", self.degree());
        out.push_str(&format!("s: {}\n", self.s.to_text()));
        out.push_str("G:\n");
        for g in self.g_group.generators() {
            out.push_str(&g.to_text());
            out.push('\n');
        }
        out.push_str("H:\n");
        for h in self.h_group.generators() {
            out.push_str(&h.to_text());
            out.push('\n');
        }
        out
    }

    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(self.to_text().as_bytes()).into()
    }

    /// Parse the instance file format. A `tau:` line switches to the
    /// 4-tuple form `(σ, τ, G, H)`, which is normalized on load.
    pub fn parse_text(text: &str) -> Result<Self, DcmError> {
        let mut degree = None;
        let mut sigma = None;
        let mut tau = None;
        let mut g_gens: Vec<Permutation> = Vec::new();
        let mut h_gens: Vec<Permutation> = Vec::new();
        let mut block: Option<char> = None;
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() {
                if block == Some('H') {
                    break; // blank line terminates the instance
                }
                continue;
            }
            if line.starts_with("degree") {
                degree = Some(parse_degree_header(line)?);
            } else if let Some(rest) = line.strip_prefix("s:") {
                sigma = Some(Permutation::parse_text(rest, degree)?);
            } else if let Some(rest) = line.strip_prefix("tau:") {
                tau = Some(Permutation::parse_text(rest, degree)?);
            } else if line == "G:" {
                block = Some('G');
            } else if line == "H:" {
                block = Some('H');
            } else {
                let p = Permutation::parse_text(line, degree)?;
                match block {
                    Some('G') => g_gens.push(p),
                    Some('H') => h_gens.push(p),
                    _ => return Err(DcmError::Parse(format!("line outside G:/H: blocks: {line}"))),
                }
            }
        }
        let degree = degree.ok_or_else(|| DcmError::Parse("missing degree line".into()))?;
        let sigma = sigma.ok_or_else(|| DcmError::Parse("missing s: line".into()))?;
        let g_group = GeneratorSet::new(degree, g_gens)?;
        let h_group = GeneratorSet::new(degree, h_gens)?;
        match tau {
            Some(tau) => normalize(&sigma, &tau, &g_group, &h_group),
            None => DcmInstance::new(sigma, g_group, h_group),
        }
    }
}

/// Reduce the 4-tuple question `σ ∈ GτH` to the 3-tuple form: the result
/// `(τ⁻¹σ, τ⁻¹Gτ, H)` is a YES instance iff `σ ∈ GτH`.
pub fn normalize(
    sigma: &Permutation,
    tau: &Permutation,
    g_group: &GeneratorSet,
    h_group: &GeneratorSet,
) -> Result<DcmInstance, DcmError> {
    let degree = g_group.degree();
    for (d, name) in [(sigma.degree(), "sigma"), (tau.degree(), "tau")] {
        if d != degree {
            return Err(DcmError::Parse(format!(
                "{name} degree {d} differs from group degree {degree}"
            )));
        }
    }
    let tau_inv = tau.inverse();
    let s = tau_inv.compose(sigma)?;
    let conjugated: Vec<Permutation> = g_group
        .generators()
        .iter()
        .map(|g| &(&tau_inv * g) * tau)
        .collect();
    DcmInstance::new(s, GeneratorSet::new(degree, conjugated)?, h_group.clone())
}

/// A witness `s = g0 · h0` with `g0 ∈ G`, `h0 ∈ H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub g0: Permutation,
    pub h0: Permutation,
}

/// An instance with its groups' BSGS structures built, ready for
/// membership tests, sampling, and sessions.
#[derive(Debug, Clone)]
pub struct PreparedInstance {
    pub instance: DcmInstance,
    pub g_bsgs: Bsgs,
    pub h_bsgs: Bsgs,
    digest: [u8; 32],
}

impl PreparedInstance {
    pub fn new(instance: DcmInstance) -> Self {
        let g_bsgs = schreier_sims(&instance.g_group);
        let h_bsgs = schreier_sims(&instance.h_group);
        let digest = instance.digest();
        Self {
            instance,
            g_bsgs,
            h_bsgs,
            digest,
        }
    }

    pub fn degree(&self) -> usize {
        self.instance.degree()
    }

    pub fn s(&self) -> &Permutation {
        &self.instance.s
    }

    pub fn digest(&self) -> [u8; 32] {
        self.digest
    }
}

enum OracleSide {
    /// Enumerated G; test `g⁻¹ s ∈ H`.
    G,
    /// Enumerated H; test `s h⁻¹ ∈ G`.
    H,
}

/// Brute-force decision/factorization oracle: enumerates the smaller
/// group once and sifts through the other.
pub struct CosetOracle<'a> {
    prep: &'a PreparedInstance,
    side: OracleSide,
    elements: Vec<Permutation>,
}

impl<'a> CosetOracle<'a> {
    pub fn new(prep: &'a PreparedInstance, cap: u64) -> Result<Self, DcmError> {
        let (side, bsgs) = if prep.g_bsgs.order() <= prep.h_bsgs.order() {
            (OracleSide::G, &prep.g_bsgs)
        } else {
            (OracleSide::H, &prep.h_bsgs)
        };
        let elements = bsgs.enumerate(cap)?;
        Ok(Self {
            prep,
            side,
            elements,
        })
    }

    /// Is `target ∈ GH`?
    pub fn decide(&self, target: &Permutation) -> Result<bool, DcmError> {
        match self.side {
            OracleSide::G => {
                for g in &self.elements {
                    if self.prep.h_bsgs.contains(&(&g.inverse() * target))? {
                        return Ok(true);
                    }
                }
            }
            OracleSide::H => {
                for h in &self.elements {
                    if self.prep.g_bsgs.contains(&(target * &h.inverse()))? {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    /// Deterministic factorization of `target`: the lexicographically
    /// least `g ∈ G` with `g⁻¹ · target ∈ H`, whichever side was
    /// enumerated.
    pub fn factorize(&self, target: &Permutation) -> Result<Factorization, DcmError> {
        let g0 = match self.side {
            OracleSide::G => {
                // Elements are enumerated in lexicographic order already.
                let mut found = None;
                for g in &self.elements {
                    if self.prep.h_bsgs.contains(&(&g.inverse() * target))? {
                        found = Some(g.clone());
                        break;
                    }
                }
                found
            }
            OracleSide::H => {
                let mut best: Option<Permutation> = None;
                for h in &self.elements {
                    let g = target * &h.inverse();
                    if self.prep.g_bsgs.contains(&g)? && best.as_ref().is_none_or(|b| g < *b) {
                        best = Some(g);
                    }
                }
                best
            }
        };
        match g0 {
            Some(g0) => {
                let h0 = &g0.inverse() * target;
                Ok(Factorization { g0, h0 })
            }
            None => Err(DcmError::NotInDoubleCoset),
        }
    }
}

/// Is `s ∈ GH`? Convenience wrapper constructing the oracle once.
pub fn dcm_decide(instance: &DcmInstance, cap: u64) -> Result<bool, DcmError> {
    let prep = PreparedInstance::new(instance.clone());
    CosetOracle::new(&prep, cap)?.decide(prep.s())
}

/// Deterministic factorization of the instance's own `s`.
pub fn dcm_factorize(instance: &DcmInstance, cap: u64) -> Result<Factorization, DcmError> {
    let prep = PreparedInstance::new(instance.clone());
    CosetOracle::new(&prep, cap)?.factorize(prep.s())
}

impl Factorization {
    /// Check validity against an instance: `g0 ∈ G`, `h0 ∈ H`,
    /// `g0 · h0 = s`.
    pub fn is_valid_for(&self, prep: &PreparedInstance) -> bool {
        prep.g_bsgs.contains(&self.g0).unwrap_or(false)
            && prep.h_bsgs.contains(&self.h0).unwrap_or(false)
            && &(&self.g0 * &self.h0) == prep.s()
    }
}

/// The representation sets of a commit value `t`:
/// with `with_s == false`, `R(t) = {(g, h) : g ∈ G, h ∈ H, g·h = t}`;
/// with `with_s == true`, `R_s(t) = {(g, h) : g·s·h = t}`.
/// Exhaustive over the enumeration of `G`, sorted by `g`.
pub fn representations(
    prep: &PreparedInstance,
    t: &Permutation,
    with_s: bool,
    cap: u64,
) -> Result<Vec<(Permutation, Permutation)>, DcmError> {
    if t.degree() != prep.degree() {
        return Err(PermError::DegreeMismatch(t.degree(), prep.degree()).into());
    }
    let mut out = Vec::new();
    for g in prep.g_bsgs.enumerate(cap)? {
        let candidate = if with_s {
            &(&g * prep.s()).inverse() * t
        } else {
            &g.inverse() * t
        };
        if prep.h_bsgs.contains(&candidate)? {
            out.push((g, candidate));
        }
    }
    Ok(out)
}

/// Does `α(g, h) = (g·g0, h0·h)` map `R_s(t)` bijectively onto `R(t)`?
pub fn alpha_bijection_check(
    prep: &PreparedInstance,
    fact: &Factorization,
    t: &Permutation,
    cap: u64,
) -> Result<bool, DcmError> {
    let with_s = representations(prep, t, true, cap)?;
    let without_s: std::collections::BTreeSet<_> =
        representations(prep, t, false, cap)?.into_iter().collect();
    let image: std::collections::BTreeSet<_> = with_s
        .iter()
        .map(|(g, h)| (g * &fact.g0, &fact.h0 * h))
        .collect();
    Ok(image.len() == with_s.len() && image == without_s)
}

/// Exhaustive check that no `t` lies in both `GH` and `GsH`; this is the
/// disjointness that forces a cheating prover to lose one challenge
/// branch on a NO instance. The cap bounds `|G| · |H|`.
pub fn branches_disjoint(prep: &PreparedInstance, cap: u64) -> Result<bool, DcmError> {
    let g_elems = prep.g_bsgs.enumerate(cap)?;
    let h_elems = prep.h_bsgs.enumerate(cap)?;
    let pairs = (g_elems.len() as u64).saturating_mul(h_elems.len() as u64);
    if pairs > cap {
        return Err(DcmError::Group(GroupError::OrderExceedsCap {
            order: pairs.into(),
            cap,
        }));
    }
    let mut products = std::collections::HashSet::new();
    for g in &g_elems {
        for h in &h_elems {
            products.insert(g * h);
        }
    }
    for g in &g_elems {
        let gs = g * prep.s();
        for h in &h_elems {
            if products.contains(&(&gs * h)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
