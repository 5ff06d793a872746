//! Scoring functions and their closed-form gradients.
//!
//! All five families are multilinear in their slots: the score is linear in
//! the subject vector, the relation parameters, and the object vector taken
//! one at a time. Two consequences are used throughout the crate:
//!
//! - `score(s, p, o) = o · grad_object(s, p)` (and similarly for the other
//!   slots), so scoring every candidate of one slot is a single
//!   matrix-vector product against a precomputed context vector;
//! - the probability-weighted mean of candidate embeddings can be
//!   substituted into a slot partial to obtain the expectation of that
//!   partial over candidates, which is what softmax gradients need.
//!
//! ComplEx rows are laid out as `[real | imaginary]` halves. RESCAL stores
//! each relation as a row-major `k × k` matrix flattened into the relation
//! table. TuckER adds a shared three-way core tensor.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::{Error, Result};

/// Model family of the scoring function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    DistMult,
    ComplEx,
    Cp,
    Rescal,
    Tucker,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::DistMult => "distmult",
            Family::ComplEx => "complex",
            Family::Cp => "cp",
            Family::Rescal => "rescal",
            Family::Tucker => "tucker",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        match s {
            "distmult" => Ok(Family::DistMult),
            "complex" => Ok(Family::ComplEx),
            "cp" => Ok(Family::Cp),
            "rescal" => Ok(Family::Rescal),
            "tucker" => Ok(Family::Tucker),
            other => Err(Error::Config {
                key: "model".into(),
                msg: format!("unknown family {other:?}"),
            }),
        }
    }
}

/// Which role an entity plays in a triple. Only CP distinguishes the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityRole {
    Subject,
    Object,
}

/// Dimensional layout of a scoring function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSpec {
    pub family: Family,
    /// Width of an entity row in floats (`K`). For ComplEx this is twice the
    /// complex rank.
    pub entity_dim: usize,
    /// Width of a relation row in floats: `K`, except `K²` for RESCAL and
    /// `k_p` for TuckER.
    pub relation_dim: usize,
    /// TuckER core dimensions `(k_s, k_p, k_o)` with `k_s = k_o = K`.
    pub core_dims: Option<(usize, usize, usize)>,
}

impl ModelSpec {
    pub fn distmult(k: usize) -> Self {
        ModelSpec { family: Family::DistMult, entity_dim: k, relation_dim: k, core_dims: None }
    }

    /// `k` is the total float width; it must be even (`[real | imag]`).
    pub fn complex(k: usize) -> Result<Self> {
        if k % 2 != 0 {
            return Err(Error::Shape(format!("complex embeddings need even dim, got {k}")));
        }
        Ok(ModelSpec { family: Family::ComplEx, entity_dim: k, relation_dim: k, core_dims: None })
    }

    pub fn cp(k: usize) -> Self {
        ModelSpec { family: Family::Cp, entity_dim: k, relation_dim: k, core_dims: None }
    }

    pub fn rescal(k: usize) -> Self {
        ModelSpec { family: Family::Rescal, entity_dim: k, relation_dim: k * k, core_dims: None }
    }

    pub fn tucker(k: usize, k_p: usize) -> Self {
        ModelSpec {
            family: Family::Tucker,
            entity_dim: k,
            relation_dim: k_p,
            core_dims: Some((k, k_p, k)),
        }
    }

    /// Builds a spec from the per-family "embedding size" convention used in
    /// configuration files: for ComplEx `dim` is the complex rank (stored as
    /// `2·dim` floats); for TuckER `relation_dim` must be given separately.
    pub fn from_config(family: Family, dim: usize, relation_dim: Option<usize>) -> Result<Self> {
        match family {
            Family::DistMult => Ok(ModelSpec::distmult(dim)),
            Family::ComplEx => ModelSpec::complex(dim * 2),
            Family::Cp => Ok(ModelSpec::cp(dim)),
            Family::Rescal => Ok(ModelSpec::rescal(dim)),
            Family::Tucker => {
                let kp = relation_dim.ok_or_else(|| Error::Config {
                    key: "relation_dim".into(),
                    msg: "tucker requires a relation dimension".into(),
                })?;
                Ok(ModelSpec::tucker(dim, kp))
            }
        }
    }

    pub fn core_len(&self) -> usize {
        self.core_dims.map(|(a, b, c)| a * b * c).unwrap_or(0)
    }
}

/// Dense row-major matrix of per-symbol vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub rows: usize,
    pub dim: usize,
    pub values: Vec<f64>,
    pub init_scale: f64,
}

impl EmbeddingTable {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        EmbeddingTable { rows, dim, values: vec![0.0; rows * dim], init_scale: 0.0 }
    }

    /// Every entry drawn i.i.d. from `N(0, scale²)`.
    pub fn init_normal<R: Rng>(rows: usize, dim: usize, scale: f64, rng: &mut R) -> Self {
        let mut t = EmbeddingTable::zeros(rows, dim);
        t.init_scale = scale;
        t.redraw(rng);
        t
    }

    /// Redraws all entries from `N(0, init_scale²)` in place.
    pub fn redraw<R: Rng>(&mut self, rng: &mut R) {
        let normal = Normal::new(0.0, self.init_scale).expect("finite scale");
        for v in &mut self.values {
            *v = normal.sample(rng);
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }
}

/// All learnable parameters of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub spec: ModelSpec,
    /// Entity table; subject-role table for CP.
    pub entity: EmbeddingTable,
    /// Object-role entity table (CP only).
    pub entity_obj: Option<EmbeddingTable>,
    pub relation: EmbeddingTable,
    /// TuckER core tensor, row-major `(k_s, k_p, k_o)`.
    pub core: Option<Vec<f64>>,
}

impl ModelParams {
    pub fn init<R: Rng>(
        spec: ModelSpec,
        n_entities: usize,
        n_relations: usize,
        init_scale: f64,
        rng: &mut R,
    ) -> Self {
        let entity = EmbeddingTable::init_normal(n_entities, spec.entity_dim, init_scale, rng);
        let entity_obj = (spec.family == Family::Cp)
            .then(|| EmbeddingTable::init_normal(n_entities, spec.entity_dim, init_scale, rng));
        let relation = EmbeddingTable::init_normal(n_relations, spec.relation_dim, init_scale, rng);
        let core = spec.core_dims.map(|(a, b, c)| {
            let scale = 1.0 / ((a * b * c) as f64).sqrt();
            let normal = Normal::new(0.0, scale).unwrap();
            (0..a * b * c).map(|_| normal.sample(rng)).collect()
        });
        ModelParams { spec, entity, entity_obj, relation, core }
    }

    pub fn n_entities(&self) -> usize {
        self.entity.rows
    }

    pub fn n_relations(&self) -> usize {
        self.relation.rows
    }

    /// Entity table serving the given role.
    pub fn entity_table(&self, role: EntityRole) -> &EmbeddingTable {
        match (self.spec.family, role) {
            (Family::Cp, EntityRole::Object) => self.entity_obj.as_ref().expect("cp object table"),
            _ => &self.entity,
        }
    }

    pub fn subject_row(&self, i: usize) -> &[f64] {
        self.entity_table(EntityRole::Subject).row(i)
    }

    pub fn object_row(&self, i: usize) -> &[f64] {
        self.entity_table(EntityRole::Object).row(i)
    }

    pub fn core_slice(&self) -> Option<&[f64]> {
        self.core.as_deref()
    }

    /// Scores one triple of symbol ids.
    pub fn score(&self, s: usize, p: usize, o: usize) -> Result<f64> {
        if s >= self.n_entities() || o >= self.n_entities() {
            return Err(Error::Index(format!("entity id out of range in ({s}, {p}, {o})")));
        }
        if p >= self.n_relations() {
            return Err(Error::Index(format!("relation id {p} out of range")));
        }
        score_raw(&self.spec, self.subject_row(s), self.relation.row(p), self.object_row(o), self.core_slice())
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for i in 0..x.len() {
        y[i] += alpha * x[i];
    }
}

fn check_equal_len(parts: &[&[f64]]) -> Result<usize> {
    let n = parts[0].len();
    if parts.iter().any(|p| p.len() != n) {
        return Err(Error::Shape(format!(
            "length mismatch: {:?}",
            parts.iter().map(|p| p.len()).collect::<Vec<_>>()
        )));
    }
    Ok(n)
}

/// Trilinear dot product `Σᵢ sᵢ pᵢ oᵢ`.
pub fn score_distmult(s: &[f64], p: &[f64], o: &[f64]) -> Result<f64> {
    let n = check_equal_len(&[s, p, o])?;
    let mut acc = 0.0;
    for i in 0..n {
        acc += s[i] * p[i] * o[i];
    }
    Ok(acc)
}

/// `Re(⟨s, p, conj(o)⟩)` over `[real | imag]` halves.
pub fn score_complex(s: &[f64], p: &[f64], o: &[f64]) -> Result<f64> {
    let n = check_equal_len(&[s, p, o])?;
    if n % 2 != 0 {
        return Err(Error::Shape(format!("complex vectors need even length, got {n}")));
    }
    let d = n / 2;
    let mut acc = 0.0;
    for i in 0..d {
        let (sr, si) = (s[i], s[d + i]);
        let (pr, pi) = (p[i], p[d + i]);
        let (or, oi) = (o[i], o[d + i]);
        acc += pr * sr * or + pr * si * oi + pi * sr * oi - pi * si * or;
    }
    Ok(acc)
}

/// CP scoring: trilinear product with role-specific entity vectors.
pub fn score_cp(s_subj: &[f64], p: &[f64], o_obj: &[f64]) -> Result<f64> {
    score_distmult(s_subj, p, o_obj)
}

/// Bilinear scoring `sᵀ P o` with `P` row-major `k × k`.
pub fn score_rescal(s: &[f64], p_mat: &[f64], o: &[f64]) -> Result<f64> {
    let k = s.len();
    if o.len() != k || p_mat.len() != k * k {
        return Err(Error::Shape(format!(
            "rescal shapes: s={}, P={}, o={}",
            s.len(),
            p_mat.len(),
            o.len()
        )));
    }
    let mut acc = 0.0;
    for i in 0..k {
        acc += s[i] * dot(&p_mat[i * k..(i + 1) * k], o);
    }
    Ok(acc)
}

/// Full contraction `W ×₁ s ×₂ p ×₃ o` with `W` row-major `(k_s, k_p, k_o)`.
pub fn score_tucker(s: &[f64], p: &[f64], o: &[f64], w: &[f64], dims: (usize, usize, usize)) -> Result<f64> {
    let (ks, kp, ko) = dims;
    if s.len() != ks || p.len() != kp || o.len() != ko || w.len() != ks * kp * ko {
        return Err(Error::Shape(format!(
            "tucker shapes: s={}, p={}, o={}, W={} vs dims {dims:?}",
            s.len(),
            p.len(),
            o.len(),
            w.len()
        )));
    }
    let mut acc = 0.0;
    for a in 0..ks {
        let sa = s[a];
        if sa == 0.0 {
            continue;
        }
        for b in 0..kp {
            let spb = sa * p[b];
            let base = (a * kp + b) * ko;
            acc += spb * dot(&w[base..base + ko], o);
        }
    }
    Ok(acc)
}

fn score_raw(spec: &ModelSpec, s: &[f64], p: &[f64], o: &[f64], core: Option<&[f64]>) -> Result<f64> {
    match spec.family {
        Family::DistMult => score_distmult(s, p, o),
        Family::ComplEx => score_complex(s, p, o),
        Family::Cp => score_cp(s, p, o),
        Family::Rescal => score_rescal(s, p, o),
        Family::Tucker => score_tucker(s, p, o, core.expect("tucker core"), spec.core_dims.unwrap()),
    }
}

/// Writes `∂Γ/∂s` for fixed `(p, o)` into `out`.
pub fn grad_subject_into(spec: &ModelSpec, p: &[f64], o: &[f64], core: Option<&[f64]>, out: &mut [f64]) {
    match spec.family {
        Family::DistMult | Family::Cp => {
            for i in 0..out.len() {
                out[i] = p[i] * o[i];
            }
        }
        Family::ComplEx => {
            let d = out.len() / 2;
            for i in 0..d {
                out[i] = p[i] * o[i] + p[d + i] * o[d + i];
                out[d + i] = p[i] * o[d + i] - p[d + i] * o[i];
            }
        }
        Family::Rescal => {
            let k = out.len();
            for i in 0..k {
                out[i] = dot(&p[i * k..(i + 1) * k], o);
            }
        }
        Family::Tucker => {
            let (ks, kp, ko) = spec.core_dims.unwrap();
            let w = core.expect("tucker core");
            for a in 0..ks {
                let mut acc = 0.0;
                for b in 0..kp {
                    let base = (a * kp + b) * ko;
                    acc += p[b] * dot(&w[base..base + ko], o);
                }
                out[a] = acc;
            }
        }
    }
}

/// Writes `∂Γ/∂o` for fixed `(s, p)` into `out`.
pub fn grad_object_into(spec: &ModelSpec, s: &[f64], p: &[f64], core: Option<&[f64]>, out: &mut [f64]) {
    match spec.family {
        Family::DistMult | Family::Cp => {
            for i in 0..out.len() {
                out[i] = s[i] * p[i];
            }
        }
        Family::ComplEx => {
            let d = out.len() / 2;
            for i in 0..d {
                out[i] = p[i] * s[i] - p[d + i] * s[d + i];
                out[d + i] = p[i] * s[d + i] + p[d + i] * s[i];
            }
        }
        Family::Rescal => {
            let k = out.len();
            for j in 0..k {
                let mut acc = 0.0;
                for i in 0..k {
                    acc += s[i] * p[i * k + j];
                }
                out[j] = acc;
            }
        }
        Family::Tucker => {
            let (ks, kp, ko) = spec.core_dims.unwrap();
            let w = core.expect("tucker core");
            out.fill(0.0);
            for a in 0..ks {
                let sa = s[a];
                if sa == 0.0 {
                    continue;
                }
                for b in 0..kp {
                    let spb = sa * p[b];
                    let base = (a * kp + b) * ko;
                    axpy(spb, &w[base..base + ko], out);
                }
            }
        }
    }
}

/// Writes `∂Γ/∂ψ[p]` for fixed `(s, o)` into `out` (length `relation_dim`).
/// For RESCAL this is the flattened outer product `s oᵀ`.
pub fn grad_relation_into(spec: &ModelSpec, s: &[f64], o: &[f64], core: Option<&[f64]>, out: &mut [f64]) {
    match spec.family {
        Family::DistMult | Family::Cp => {
            for i in 0..out.len() {
                out[i] = s[i] * o[i];
            }
        }
        Family::ComplEx => {
            let d = out.len() / 2;
            for i in 0..d {
                out[i] = s[i] * o[i] + s[d + i] * o[d + i];
                out[d + i] = s[i] * o[d + i] - s[d + i] * o[i];
            }
        }
        Family::Rescal => {
            let k = s.len();
            for i in 0..k {
                for j in 0..k {
                    out[i * k + j] = s[i] * o[j];
                }
            }
        }
        Family::Tucker => {
            let (ks, kp, ko) = spec.core_dims.unwrap();
            let w = core.expect("tucker core");
            for b in 0..kp {
                let mut acc = 0.0;
                for a in 0..ks {
                    let sa = s[a];
                    if sa == 0.0 {
                        continue;
                    }
                    let base = (a * kp + b) * ko;
                    acc += sa * dot(&w[base..base + ko], o);
                }
                out[b] = acc;
            }
        }
    }
}

/// Accumulates `coeff · s ⊗ p ⊗ o` into the TuckER core gradient.
pub fn add_core_grad(s: &[f64], p: &[f64], o: &[f64], coeff: f64, out: &mut [f64]) {
    let (ks, kp, ko) = (s.len(), p.len(), o.len());
    debug_assert_eq!(out.len(), ks * kp * ko);
    for a in 0..ks {
        let ca = coeff * s[a];
        if ca == 0.0 {
            continue;
        }
        for b in 0..kp {
            let cab = ca * p[b];
            let base = (a * kp + b) * ko;
            axpy(cab, o, &mut out[base..base + ko]);
        }
    }
}

/// Analytic gradients of the score with respect to each embedding argument.
#[derive(Debug, Clone)]
pub struct ScoreGrad {
    pub d_subject: Vec<f64>,
    pub d_relation: Vec<f64>,
    pub d_object: Vec<f64>,
    /// TuckER-only gradient with respect to the core tensor.
    pub d_core: Option<Vec<f64>>,
}

/// `(∂Γ/∂s, ∂Γ/∂p, ∂Γ/∂o)` at the given embeddings; exact for every family.
pub fn grad_score(
    spec: &ModelSpec,
    s: &[f64],
    p: &[f64],
    o: &[f64],
    core: Option<&[f64]>,
) -> Result<ScoreGrad> {
    if s.len() != spec.entity_dim || o.len() != spec.entity_dim || p.len() != spec.relation_dim {
        return Err(Error::Shape(format!(
            "grad_score shapes: s={}, p={}, o={} vs spec K={}, K_r={}",
            s.len(),
            p.len(),
            o.len(),
            spec.entity_dim,
            spec.relation_dim
        )));
    }
    let mut ds = vec![0.0; spec.entity_dim];
    let mut dp = vec![0.0; spec.relation_dim];
    let mut do_ = vec![0.0; spec.entity_dim];
    grad_subject_into(spec, p, o, core, &mut ds);
    grad_relation_into(spec, s, o, core, &mut dp);
    grad_object_into(spec, s, p, core, &mut do_);
    let d_core = spec.core_dims.map(|_| {
        let mut w = vec![0.0; spec.core_len()];
        add_core_grad(s, p, o, 1.0, &mut w);
        w
    });
    Ok(ScoreGrad { d_subject: ds, d_relation: dp, d_object: do_, d_core })
}

/// Scores of every candidate in `table` against a context vector:
/// `out[i] = table[i] · ctx`.
pub(crate) fn scores_against(table: &EmbeddingTable, ctx: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.reserve(table.rows);
    for i in 0..table.rows {
        out.push(dot(table.row(i), ctx));
    }
}

/// `Γ(s, p, i)` for every entity `i`, as one matrix-vector product.
pub fn score_all_objects(params: &ModelParams, s: usize, p: usize) -> Result<Vec<f64>> {
    if s >= params.n_entities() {
        return Err(Error::Index(format!("entity id {s} out of range")));
    }
    if p >= params.n_relations() {
        return Err(Error::Index(format!("relation id {p} out of range")));
    }
    let mut ctx = vec![0.0; params.spec.entity_dim];
    grad_object_into(&params.spec, params.subject_row(s), params.relation.row(p), params.core_slice(), &mut ctx);
    let mut out = Vec::new();
    scores_against(params.entity_table(EntityRole::Object), &ctx, &mut out);
    Ok(out)
}

/// `Γ(i, p, o)` for every entity `i`.
pub fn score_all_subjects(params: &ModelParams, p: usize, o: usize) -> Result<Vec<f64>> {
    if o >= params.n_entities() {
        return Err(Error::Index(format!("entity id {o} out of range")));
    }
    if p >= params.n_relations() {
        return Err(Error::Index(format!("relation id {p} out of range")));
    }
    let mut ctx = vec![0.0; params.spec.entity_dim];
    grad_subject_into(&params.spec, params.relation.row(p), params.object_row(o), params.core_slice(), &mut ctx);
    let mut out = Vec::new();
    scores_against(params.entity_table(EntityRole::Subject), &ctx, &mut out);
    Ok(out)
}

/// `Γ(s, j, o)` for every relation `j`.
pub fn score_all_relations(params: &ModelParams, s: usize, o: usize) -> Result<Vec<f64>> {
    if s >= params.n_entities() || o >= params.n_entities() {
        return Err(Error::Index(format!("entity id out of range in ({s}, ·, {o})")));
    }
    let mut ctx = vec![0.0; params.spec.relation_dim];
    grad_relation_into(&params.spec, params.subject_row(s), params.object_row(o), params.core_slice(), &mut ctx);
    let mut out = Vec::new();
    scores_against(&params.relation, &ctx, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distmult_examples() {
        assert_eq!(score_distmult(&[1.0, 0.0], &[1.0, 1.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(score_distmult(&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]).unwrap(), 63.0);
        assert!(score_distmult(&[1.0], &[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn distmult_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let v: Vec<f64> = (0..12).map(|_| rng.random::<f64>() - 0.5).collect();
            let (s, p, o) = (&v[0..4], &v[4..8], &v[8..12]);
            assert_relative_eq!(
                score_distmult(s, p, o).unwrap(),
                score_distmult(o, p, s).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn complex_examples() {
        // k = 1 complex dim, stored as [re, im].
        assert_eq!(score_complex(&[1.0, 0.0], &[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        // s = i, p = i, o = 1: Re((i)(i)(conj 1)) = -1; swapping s and o flips it.
        assert_eq!(score_complex(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]).unwrap(), -1.0);
        assert_eq!(score_complex(&[1.0, 0.0], &[0.0, 1.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert!(score_complex(&[1.0, 0.0, 2.0], &[1.0, 0.0, 2.0], &[1.0, 0.0, 2.0]).is_err());
    }

    #[test]
    fn complex_symmetry_depends_on_relation_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let draw = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> {
                (0..n).map(|_| rng.random::<f64>() - 0.5).collect()
            };
            let s = draw(&mut rng, 6);
            let o = draw(&mut rng, 6);
            // Zero imaginary relation part: symmetric in (s, o).
            let mut p = draw(&mut rng, 6);
            p[3..].fill(0.0);
            assert_relative_eq!(
                score_complex(&s, &p, &o).unwrap(),
                score_complex(&o, &p, &s).unwrap(),
                epsilon = 1e-12
            );
            // Zero real relation part: antisymmetric.
            let mut q = draw(&mut rng, 6);
            q[..3].fill(0.0);
            assert_relative_eq!(
                score_complex(&s, &q, &o).unwrap(),
                -score_complex(&o, &q, &s).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn cp_examples() {
        assert_eq!(score_cp(&[1.0, 0.0], &[2.0, 2.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(score_cp(&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]).unwrap(), 2.0);
        // Tied tables collapse to DistMult.
        let (s, p, o) = (&[0.3, -0.7][..], &[1.5, 0.25][..], &[2.0, -1.0][..]);
        assert_eq!(score_cp(s, p, o).unwrap(), score_distmult(s, p, o).unwrap());
    }

    #[test]
    fn rescal_examples() {
        let eye = [1.0, 0.0, 0.0, 1.0];
        let s = [0.5, -2.0];
        let o = [3.0, 0.25];
        assert_relative_eq!(score_rescal(&s, &eye, &o).unwrap(), dot(&s, &o), epsilon = 1e-15);
        let p = [0.0, 1.0, 0.0, 0.0];
        assert_eq!(score_rescal(&[1.0, 0.0], &p, &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(score_rescal(&[0.0, 1.0], &p, &[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn tucker_examples() {
        // Superdiagonal core collapses to DistMult.
        let mut w = vec![0.0; 8];
        w[0] = 1.0; // (0,0,0)
        w[7] = 1.0; // (1,1,1)
        let (s, p, o) = (&[0.4, -1.2][..], &[2.0, 0.5][..], &[1.1, 3.0][..]);
        assert_relative_eq!(
            score_tucker(s, p, o, &w, (2, 2, 2)).unwrap(),
            score_distmult(s, p, o).unwrap(),
            epsilon = 1e-14
        );
        assert_eq!(score_tucker(s, p, o, &[0.0; 8], (2, 2, 2)).unwrap(), 0.0);
        // Basis vectors select a single core entry.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
        let got = score_tucker(&[1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &w, (2, 2, 2)).unwrap();
        assert_eq!(got, w[(0 * 2 + 1) * 2 + 0]);
    }

    fn random_params(spec: ModelSpec, ne: usize, nr: usize, seed: u64) -> ModelParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ModelParams::init(spec, ne, nr, 0.5, &mut rng)
    }

    fn all_specs(k: usize) -> Vec<ModelSpec> {
        vec![
            ModelSpec::distmult(k),
            ModelSpec::complex(k).unwrap(),
            ModelSpec::cp(k),
            ModelSpec::rescal(k),
            ModelSpec::tucker(k, 3),
        ]
    }

    #[test]
    fn score_all_objects_matches_scalar_loop() {
        for spec in all_specs(4) {
            let params = random_params(spec, 7, 3, 42);
            let scores = score_all_objects(&params, 2, 1).unwrap();
            assert_eq!(scores.len(), 7);
            for (i, &got) in scores.iter().enumerate() {
                assert_relative_eq!(got, params.score(2, 1, i).unwrap(), epsilon = 1e-12);
            }
            let subj = score_all_subjects(&params, 1, 3).unwrap();
            for (i, &got) in subj.iter().enumerate() {
                assert_relative_eq!(got, params.score(i, 1, 3).unwrap(), epsilon = 1e-12);
            }
            let rels = score_all_relations(&params, 4, 5).unwrap();
            for (j, &got) in rels.iter().enumerate() {
                assert_relative_eq!(got, params.score(4, j, 5).unwrap(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn one_hot_entities_select_table_columns() {
        let mut params = random_params(ModelSpec::distmult(3), 4, 1, 7);
        params.entity.row_mut(0).copy_from_slice(&[1.0, 0.0, 0.0]);
        params.relation.row_mut(0).copy_from_slice(&[1.0, 1.0, 1.0]);
        let scores = score_all_objects(&params, 0, 0).unwrap();
        for i in 0..4 {
            assert_relative_eq!(scores[i], params.entity.row(i)[0], epsilon = 1e-15);
        }
    }

    /// Central finite differences against the analytic score gradients.
    #[test]
    fn grad_score_matches_finite_differences() {
        let h = 1e-5;
        for spec in all_specs(6) {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..100 {
                let draw = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> {
                    (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
                };
                let s = draw(&mut rng, spec.entity_dim);
                let p = draw(&mut rng, spec.relation_dim);
                let o = draw(&mut rng, spec.entity_dim);
                let core: Option<Vec<f64>> =
                    spec.core_dims.map(|_| draw(&mut rng, spec.core_len()));
                let g = grad_score(&spec, &s, &p, &o, core.as_deref()).unwrap();

                let score = |s: &[f64], p: &[f64], o: &[f64], c: Option<&[f64]>| {
                    score_raw(&spec, s, p, o, c).unwrap()
                };
                let check = |analytic: &[f64], mut bump: Box<dyn FnMut(usize, f64) -> f64>| {
                    for i in 0..analytic.len() {
                        let fd = (bump(i, h) - bump(i, -h)) / (2.0 * h);
                        let denom = analytic[i].abs().max(fd.abs()).max(1e-8);
                        assert!(
                            (analytic[i] - fd).abs() / denom < 1e-6,
                            "{:?} slot grad mismatch: analytic {} vs fd {}",
                            spec.family,
                            analytic[i],
                            fd
                        );
                    }
                };

                let (s2, p2, o2, c2) = (s.clone(), p.clone(), o.clone(), core.clone());
                check(
                    &g.d_subject,
                    Box::new(move |i, eps| {
                        let mut s = s2.clone();
                        s[i] += eps;
                        score(&s, &p2, &o2, c2.as_deref())
                    }),
                );
                let (s2, p2, o2, c2) = (s.clone(), p.clone(), o.clone(), core.clone());
                check(
                    &g.d_relation,
                    Box::new(move |i, eps| {
                        let mut p = p2.clone();
                        p[i] += eps;
                        score(&s2, &p, &o2, c2.as_deref())
                    }),
                );
                let (s2, p2, o2, c2) = (s.clone(), p.clone(), o.clone(), core.clone());
                check(
                    &g.d_object,
                    Box::new(move |i, eps| {
                        let mut o = o2.clone();
                        o[i] += eps;
                        score(&s2, &p2, &o, c2.as_deref())
                    }),
                );
                if let Some(dw) = &g.d_core {
                    let (s2, p2, o2, c2) = (s.clone(), p.clone(), o.clone(), core.clone());
                    check(
                        &dw.clone(),
                        Box::new(move |i, eps| {
                            let mut c = c2.clone().unwrap();
                            c[i] += eps;
                            score(&s2, &p2, &o2, Some(&c))
                        }),
                    );
                }
            }
        }
    }

    #[test]
    fn zero_object_zeroes_subject_grad_for_trilinear_families() {
        for spec in [ModelSpec::distmult(4), ModelSpec::cp(4)] {
            let p = [0.5, -1.0, 2.0, 0.1];
            let o = [0.0; 4];
            let mut out = [1.0; 4];
            grad_subject_into(&spec, &p, &o, None, &mut out);
            assert_eq!(out, [0.0; 4]);
        }
    }

    #[test]
    fn distmult_subject_grad_is_relation_times_object() {
        let spec = ModelSpec::distmult(3);
        let p = [2.0, 3.0, -1.0];
        let o = [1.0, -2.0, 0.5];
        let mut out = [0.0; 3];
        grad_subject_into(&spec, &p, &o, None, &mut out);
        assert_eq!(out, [2.0, -6.0, -0.5]);
    }
}
