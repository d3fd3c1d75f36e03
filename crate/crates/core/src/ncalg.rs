//! Noncommutative *-algebra engine: PBW normal forms for the quantum
//! sphere O(S2_q), the quantum group O(SU_q(2)) and U_q(su(2)), the
//! counit, twist automorphisms and the embedding of the sphere into the
//! quantum group.
//!
//! Elements are finite linear combinations of ordered (PBW) monomials.
//! Normalization is a word rewriting system on generator words; the rule
//! set straightens any word into the ordered basis
//!   sphere:  A^n B^m  and  A^n B*^m
//!   SU_q(2): a^i b^j c^k  and  b^j c^k d^i'
//!   U_q:     F^f K^kappa E^e  (kappa in Z)
//! The reduction result is independent of the order in which rules are
//! applied; the randomized strategy exists so tests can exercise that.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::error::CoreError;
use crate::scalars::{Cplx, Real, ScalarContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgebraId {
    Sphere,
    Suq2,
    Uq,
}

impl fmt::Display for AlgebraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraId::Sphere => write!(f, "O(S2_q)"),
            AlgebraId::Suq2 => write!(f, "O(SU_q(2))"),
            AlgebraId::Uq => write!(f, "U_q(su(2))"),
        }
    }
}

/// Generators of the three algebras. `Bs` is B*, `Qa`..`Qd` are the
/// quantum group generators a, b, c, d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    A,
    B,
    Bs,
    Qa,
    Qb,
    Qc,
    Qd,
    E,
    F,
    K,
    Kinv,
}

impl Gen {
    pub fn algebra(self) -> AlgebraId {
        match self {
            Gen::A | Gen::B | Gen::Bs => AlgebraId::Sphere,
            Gen::Qa | Gen::Qb | Gen::Qc | Gen::Qd => AlgebraId::Suq2,
            Gen::E | Gen::F | Gen::K | Gen::Kinv => AlgebraId::Uq,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gen::A => "A",
            Gen::B => "B",
            Gen::Bs => "Bs",
            Gen::Qa => "a",
            Gen::Qb => "b",
            Gen::Qc => "c",
            Gen::Qd => "d",
            Gen::E => "E",
            Gen::F => "F",
            Gen::K => "K",
            Gen::Kinv => "Kinv",
        }
    }
}

/// A PBW monomial. The exponent slots are interpreted per algebra:
/// sphere `(n, m, m', -)` for A^n B^m B*^m' with m*m' = 0; SU_q(2)
/// `(i, j, k, i')` for a^i b^j c^k d^i' with i*i' = 0; U_q `(f, kappa, e, -)`
/// for F^f K^kappa E^e.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub algebra: AlgebraId,
    pub e: [i64; 4],
}

impl Monomial {
    pub fn unit(algebra: AlgebraId) -> Self {
        Monomial { algebra, e: [0; 4] }
    }

    pub fn sphere(n: i64, m: i64, mp: i64) -> Self {
        debug_assert!(n >= 0 && m >= 0 && mp >= 0 && m * mp == 0);
        Monomial {
            algebra: AlgebraId::Sphere,
            e: [n, m, mp, 0],
        }
    }

    pub fn suq2(i: i64, j: i64, k: i64, ip: i64) -> Self {
        debug_assert!(i >= 0 && j >= 0 && k >= 0 && ip >= 0 && i * ip == 0);
        Monomial {
            algebra: AlgebraId::Suq2,
            e: [i, j, k, ip],
        }
    }

    pub fn uq(f: i64, kappa: i64, e: i64) -> Self {
        debug_assert!(f >= 0 && e >= 0);
        Monomial {
            algebra: AlgebraId::Uq,
            e: [f, kappa, e, 0],
        }
    }

    pub fn is_unit(&self) -> bool {
        self.e == [0; 4]
    }

    pub fn total_degree(&self) -> i64 {
        match self.algebra {
            AlgebraId::Uq => self.e[0] + self.e[1].abs() + self.e[2],
            _ => self.e.iter().sum(),
        }
    }

    /// Expands the monomial into its generator word.
    pub fn word(&self) -> Vec<Gen> {
        let mut w = Vec::new();
        let push = |w: &mut Vec<Gen>, g: Gen, n: i64| {
            for _ in 0..n {
                w.push(g);
            }
        };
        match self.algebra {
            AlgebraId::Sphere => {
                push(&mut w, Gen::A, self.e[0]);
                push(&mut w, Gen::B, self.e[1]);
                push(&mut w, Gen::Bs, self.e[2]);
            }
            AlgebraId::Suq2 => {
                push(&mut w, Gen::Qa, self.e[0]);
                push(&mut w, Gen::Qb, self.e[1]);
                push(&mut w, Gen::Qc, self.e[2]);
                push(&mut w, Gen::Qd, self.e[3]);
            }
            AlgebraId::Uq => {
                push(&mut w, Gen::F, self.e[0]);
                if self.e[1] >= 0 {
                    push(&mut w, Gen::K, self.e[1]);
                } else {
                    push(&mut w, Gen::Kinv, -self.e[1]);
                }
                push(&mut w, Gen::E, self.e[2]);
            }
        }
        w
    }

    /// Checks the PBW exponent constraints.
    pub fn is_normal(&self) -> bool {
        match self.algebra {
            AlgebraId::Sphere => {
                self.e[0] >= 0 && self.e[1] >= 0 && self.e[2] >= 0 && self.e[1] * self.e[2] == 0
            }
            AlgebraId::Suq2 => {
                self.e.iter().all(|&x| x >= 0) && self.e[0] * self.e[3] == 0
            }
            AlgebraId::Uq => self.e[0] >= 0 && self.e[2] >= 0,
        }
    }
}

/// Finite linear combination of PBW monomials with nonzero coefficients.
#[derive(Clone, Debug)]
pub struct AlgebraElement<R: Real> {
    pub algebra: AlgebraId,
    pub terms: BTreeMap<Monomial, Cplx<R>>,
}

/// How the rewrite engine picks among applicable rules.
pub enum Strategy<'a> {
    Leftmost,
    Random(&'a mut dyn rand::RngCore),
}

/// One local rewrite: a pair of adjacent generators is replaced by a
/// linear combination of words.
fn pair_rule<R: Real>(
    g1: Gen,
    g2: Gen,
    ctx: &ScalarContext<R>,
) -> Option<Vec<(Vec<Gen>, Cplx<R>)>> {
    use Gen::*;
    let c = |x: R| Cplx::from_real(x);
    let q2 = ctx.q_powi(2);
    match (g1, g2) {
        // sphere: BA = q^2 AB, AB* = q^2 B*A, B*B = A - A^2, BB* = q^2 A - q^4 A^2
        (B, A) => Some(vec![(vec![A, B], c(q2))]),
        (Bs, A) => Some(vec![(vec![A, Bs], c(ctx.q_powi(-2)))]),
        (Bs, B) => Some(vec![
            (vec![A], Cplx::from_real(ctx.one())),
            (vec![A, A], -Cplx::from_real(ctx.one())),
        ]),
        (B, Bs) => Some(vec![
            (vec![A], c(q2)),
            (vec![A, A], -c(ctx.q_powi(4))),
        ]),
        // SU_q(2): ab = qba, ac = qca, bc = cb, bd = qdb, cd = qdc,
        //          da = 1 + q^-1 bc, ad = 1 + q bc
        (Qb, Qa) => Some(vec![(vec![Qa, Qb], c(ctx.q_powi(-1)))]),
        (Qc, Qa) => Some(vec![(vec![Qa, Qc], c(ctx.q_powi(-1)))]),
        (Qc, Qb) => Some(vec![(vec![Qb, Qc], c(ctx.one()))]),
        (Qd, Qb) => Some(vec![(vec![Qb, Qd], c(ctx.q_powi(-1)))]),
        (Qd, Qc) => Some(vec![(vec![Qc, Qd], c(ctx.q_powi(-1)))]),
        (Qd, Qa) => Some(vec![
            (vec![], c(ctx.one())),
            (vec![Qb, Qc], c(ctx.q_powi(-1))),
        ]),
        (Qa, Qd) => Some(vec![
            (vec![], c(ctx.one())),
            (vec![Qb, Qc], c(ctx.q())),
        ]),
        // U_q: KE = qEK, KF = q^-1 FK, EF - FE = (K^2 - K^-2)/(q - q^-1)
        (E, F) => {
            let den = ctx.q() - ctx.one() / ctx.q();
            let s = ctx.one() / den;
            Some(vec![
                (vec![F, E], c(ctx.one())),
                (vec![K, K], c(s.clone())),
                (vec![Kinv, Kinv], -c(s)),
            ])
        }
        (E, K) => Some(vec![(vec![K, E], c(ctx.q_powi(-1)))]),
        (E, Kinv) => Some(vec![(vec![Kinv, E], c(ctx.q()))]),
        (K, F) => Some(vec![(vec![F, K], c(ctx.q_powi(-1)))]),
        (Kinv, F) => Some(vec![(vec![F, Kinv], c(ctx.q()))]),
        (K, Kinv) | (Kinv, K) => Some(vec![(vec![], c(ctx.one()))]),
        _ => None,
    }
}

fn redex_positions<R: Real>(word: &[Gen], ctx: &ScalarContext<R>) -> Vec<usize> {
    (0..word.len().saturating_sub(1))
        .filter(|&p| pair_rule::<R>(word[p], word[p + 1], ctx).is_some())
        .collect()
}

/// In a fully sorted SU_q(2) word a^i b^j c^k d^i' with i, i' > 0, one
/// `d` is commuted left to meet the rightmost `a` and `ad = 1 + qbc` is
/// applied; moving past b^j c^k contributes q^{j+k}.
fn suq2_bridge<R: Real>(word: &[Gen], ctx: &ScalarContext<R>) -> Option<Vec<(Vec<Gen>, Cplx<R>)>> {
    let i = word.iter().filter(|&&g| g == Gen::Qa).count();
    let ip = word.iter().filter(|&&g| g == Gen::Qd).count();
    if i == 0 || ip == 0 {
        return None;
    }
    let j = word.iter().filter(|&&g| g == Gen::Qb).count() as i64;
    let k = word.iter().filter(|&&g| g == Gen::Qc).count() as i64;
    let build = |dj: i64, dk: i64| {
        let mut w = Vec::new();
        for _ in 0..(i - 1) {
            w.push(Gen::Qa);
        }
        for _ in 0..(j + dj) {
            w.push(Gen::Qb);
        }
        for _ in 0..(k + dk) {
            w.push(Gen::Qc);
        }
        for _ in 0..(ip - 1) {
            w.push(Gen::Qd);
        }
        w
    };
    Some(vec![
        (build(0, 0), Cplx::from_real(ctx.q_powi(j + k))),
        (build(1, 1), Cplx::from_real(ctx.q_powi(j + k + 1))),
    ])
}

fn sorted_word_to_monomial(algebra: AlgebraId, word: &[Gen]) -> Monomial {
    let count = |g: Gen| word.iter().filter(|&&x| x == g).count() as i64;
    match algebra {
        AlgebraId::Sphere => Monomial::sphere(count(Gen::A), count(Gen::B), count(Gen::Bs)),
        AlgebraId::Suq2 => Monomial::suq2(count(Gen::Qa), count(Gen::Qb), count(Gen::Qc), count(Gen::Qd)),
        AlgebraId::Uq => Monomial::uq(count(Gen::F), count(Gen::K) - count(Gen::Kinv), count(Gen::E)),
    }
}

/// Reduces a linear combination of generator words to normal form.
pub fn reduce_words<R: Real>(
    algebra: AlgebraId,
    words: Vec<(Vec<Gen>, Cplx<R>)>,
    ctx: &ScalarContext<R>,
    strategy: &mut Strategy<'_>,
) -> Result<AlgebraElement<R>, CoreError> {
    for (w, _) in &words {
        if let Some(g) = w.iter().find(|g| g.algebra() != algebra) {
            return Err(CoreError::AlgebraMismatch(format!(
                "generator {} does not belong to {}",
                g.name(),
                algebra
            )));
        }
    }
    let mut acc: BTreeMap<Monomial, Cplx<R>> = BTreeMap::new();
    let mut stack = words;
    while let Some((word, coeff)) = stack.pop() {
        let redexes = redex_positions(&word, ctx);
        let chosen = if redexes.is_empty() {
            None
        } else {
            match strategy {
                Strategy::Leftmost => Some(redexes[0]),
                Strategy::Random(rng) => Some(redexes[rng.gen_range(0..redexes.len())]),
            }
        };
        if let Some(p) = chosen {
            let repl = pair_rule(word[p], word[p + 1], ctx).expect("redex has a rule");
            for (seg, c) in repl {
                let mut w = Vec::with_capacity(word.len() + seg.len());
                w.extend_from_slice(&word[..p]);
                w.extend_from_slice(&seg);
                w.extend_from_slice(&word[p + 2..]);
                stack.push((w, coeff.clone() * c));
            }
            continue;
        }
        if algebra == AlgebraId::Suq2 {
            if let Some(repl) = suq2_bridge(&word, ctx) {
                for (w, c) in repl {
                    stack.push((w, coeff.clone() * c));
                }
                continue;
            }
        }
        let mono = sorted_word_to_monomial(algebra, &word);
        debug_assert!(mono.is_normal());
        match acc.get_mut(&mono) {
            Some(c) => *c = c.clone() + coeff,
            None => {
                acc.insert(mono, coeff);
            }
        }
    }
    let mut el = AlgebraElement {
        algebra,
        terms: acc,
    };
    el.prune(ctx);
    Ok(el)
}

/// Normal form of a single weighted word; the empty word is the unit.
pub fn normal_form<R: Real>(
    word: &[Gen],
    coeff: Cplx<R>,
    ctx: &ScalarContext<R>,
) -> Result<AlgebraElement<R>, CoreError> {
    let algebra = match word.first() {
        Some(g) => g.algebra(),
        None => {
            // empty word: unit of an unspecified algebra; default to the sphere
            return Ok(AlgebraElement::unit_with(AlgebraId::Sphere, coeff));
        }
    };
    reduce_words(algebra, vec![(word.to_vec(), coeff)], ctx, &mut Strategy::Leftmost)
}

impl<R: Real> AlgebraElement<R> {
    pub fn zero(algebra: AlgebraId) -> Self {
        AlgebraElement {
            algebra,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(algebra: AlgebraId, ctx: &ScalarContext<R>) -> Self {
        Self::unit_with(algebra, ctx.cone())
    }

    fn unit_with(algebra: AlgebraId, coeff: Cplx<R>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::unit(algebra), coeff);
        AlgebraElement { algebra, terms }
    }

    pub fn generator(g: Gen, ctx: &ScalarContext<R>) -> Self {
        let mut terms = BTreeMap::new();
        let mono = sorted_word_to_monomial(g.algebra(), &[g]);
        terms.insert(mono, ctx.cone());
        AlgebraElement {
            algebra: g.algebra(),
            terms,
        }
    }

    pub fn from_monomial(mono: Monomial, coeff: Cplx<R>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(mono, coeff);
        AlgebraElement {
            algebra: mono.algebra,
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> i64 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Drops coefficients below the context prune threshold.
    pub fn prune(&mut self, ctx: &ScalarContext<R>) {
        let thr = ctx.prune_threshold();
        self.terms.retain(|_, c| c.modulus().to_f64() >= thr);
    }

    pub fn add(&self, other: &Self, ctx: &ScalarContext<R>) -> Result<Self, CoreError> {
        self.check_algebra(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            match terms.get_mut(m) {
                Some(x) => *x = x.clone() + c.clone(),
                None => {
                    terms.insert(*m, c.clone());
                }
            }
        }
        let mut el = AlgebraElement {
            algebra: self.algebra,
            terms,
        };
        el.prune(ctx);
        Ok(el)
    }

    pub fn sub(&self, other: &Self, ctx: &ScalarContext<R>) -> Result<Self, CoreError> {
        self.add(&other.scale(&-ctx.cone()), ctx)
    }

    pub fn scale(&self, s: &Cplx<R>) -> Self {
        AlgebraElement {
            algebra: self.algebra,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, c.clone() * s.clone()))
                .collect(),
        }
    }

    /// Normal form of the product.
    pub fn multiply(&self, other: &Self, ctx: &ScalarContext<R>) -> Result<Self, CoreError> {
        self.check_algebra(other)?;
        let mut words = Vec::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut w = m1.word();
                w.extend(m2.word());
                words.push((w, c1.clone() * c2.clone()));
            }
        }
        reduce_words(self.algebra, words, ctx, &mut Strategy::Leftmost)
    }

    /// Antilinear antimultiplicative involution.
    pub fn star(&self, ctx: &ScalarContext<R>) -> Self {
        let mut words = Vec::new();
        for (m, c) in &self.terms {
            let mut coeff = c.conj();
            let mut w: Vec<Gen> = Vec::new();
            for g in m.word().into_iter().rev() {
                let (sg, factor) = star_gen(g, ctx);
                w.push(sg);
                if let Some(f) = factor {
                    coeff = coeff.scale(&f);
                }
            }
            words.push((w, coeff));
        }
        reduce_words(self.algebra, words, ctx, &mut Strategy::Leftmost)
            .expect("star stays in the algebra")
    }

    /// The counit character: each generator goes to its classical value
    /// (0 for A, B, B*, b, c, E, F; 1 for a, d, K).
    pub fn counit(&self, ctx: &ScalarContext<R>) -> Cplx<R> {
        let mut out = ctx.czero();
        for (m, c) in &self.terms {
            let kills = match m.algebra {
                AlgebraId::Sphere => m.e[0] != 0 || m.e[1] != 0 || m.e[2] != 0,
                AlgebraId::Suq2 => m.e[1] != 0 || m.e[2] != 0,
                AlgebraId::Uq => m.e[0] != 0 || m.e[2] != 0,
            };
            if !kills {
                out = out + c.clone();
            }
        }
        out
    }

    /// The sphere automorphism sigma with A -> A, B -> lambda B,
    /// B* -> lambda^{-1} B*.
    pub fn sigma_twist(&self, lambda: &Cplx<R>, ctx: &ScalarContext<R>) -> Result<Self, CoreError> {
        if self.algebra != AlgebraId::Sphere {
            return Err(CoreError::AlgebraMismatch(
                "sigma twist is defined on the sphere algebra".into(),
            ));
        }
        if ctx.approx_zero(lambda) {
            return Err(CoreError::InvalidArgument("sigma twist with lambda = 0".into()));
        }
        let inv = lambda.inv();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut f = c.clone();
            for _ in 0..m.e[1] {
                f = f * lambda.clone();
            }
            for _ in 0..m.e[2] {
                f = f * inv.clone();
            }
            terms.insert(*m, f);
        }
        let mut el = AlgebraElement {
            algebra: AlgebraId::Sphere,
            terms,
        };
        el.prune(ctx);
        Ok(el)
    }

    /// The algebra homomorphism B -> ac, A -> -q^{-1} bc, B* -> -q^{-1} bd.
    pub fn embed_sphere(&self, ctx: &ScalarContext<R>) -> Result<AlgebraElement<R>, CoreError> {
        if self.algebra != AlgebraId::Sphere {
            return Err(CoreError::AlgebraMismatch(
                "embed_sphere expects a sphere element".into(),
            ));
        }
        let mut words = Vec::new();
        for (m, c) in &self.terms {
            let mut w: Vec<Gen> = Vec::new();
            let mut coeff = c.clone();
            let qinv = ctx.q_powi(-1);
            for _ in 0..m.e[0] {
                // A = -q^-1 bc
                w.push(Gen::Qb);
                w.push(Gen::Qc);
                coeff = coeff.scale(&-qinv.clone());
            }
            for _ in 0..m.e[1] {
                // B = ac
                w.push(Gen::Qa);
                w.push(Gen::Qc);
            }
            for _ in 0..m.e[2] {
                // B* = (ac)* = -q^-1 bd
                w.push(Gen::Qb);
                w.push(Gen::Qd);
                coeff = coeff.scale(&-qinv.clone());
            }
            words.push((w, coeff));
        }
        reduce_words(AlgebraId::Suq2, words, ctx, &mut Strategy::Leftmost)
    }

    /// Inverse of `embed_sphere` on its image. On the PBW basis the
    /// embedding sends A^n B^m to a scalar multiple of a^m b^n c^{n+m}
    /// and A^n B*^m' to a multiple of b^{n+m'} c^n d^{m'}, so the linear
    /// system over the sphere basis is diagonal and solved monomial by
    /// monomial; the candidate is then re-embedded and checked against
    /// the input, which detects any component outside the subalgebra.
    pub fn recognize_in_sphere(
        &self,
        degree_bound: i64,
        ctx: &ScalarContext<R>,
    ) -> Result<AlgebraElement<R>, CoreError> {
        if self.algebra != AlgebraId::Suq2 {
            return Err(CoreError::AlgebraMismatch(
                "recognize_in_sphere expects a quantum group element".into(),
            ));
        }
        let mut candidate = AlgebraElement::zero(AlgebraId::Sphere);
        for (m, c) in &self.terms {
            let [i, j, k, ip] = m.e;
            let target = if ip == 0 && k == i + j {
                // image of A^j B^i
                Monomial::sphere(j, i, 0)
            } else if i == 0 && j == k + ip {
                // image of A^k B*^ip
                Monomial::sphere(k, 0, ip)
            } else {
                return Err(CoreError::NotInSubalgebra(format!(
                    "monomial a^{i} b^{j} c^{k} d^{ip} is not in the image of the sphere"
                )));
            };
            if target.total_degree() > degree_bound {
                return Err(CoreError::DegreeBoundTooSmall(format!(
                    "preimage degree {} exceeds bound {}",
                    target.total_degree(),
                    degree_bound
                )));
            }
            let image = AlgebraElement::from_monomial(target, ctx.cone()).embed_sphere(ctx)?;
            let image_coeff = image
                .terms
                .get(m)
                .cloned()
                .ok_or_else(|| CoreError::NotInSubalgebra("embedding image degenerate".into()))?;
            let sphere_coeff = c.clone() / image_coeff;
            candidate = candidate.add(
                &AlgebraElement::from_monomial(target, sphere_coeff),
                ctx,
            )?;
        }
        // residual check at scalar tolerance
        let back = candidate.embed_sphere(ctx)?;
        let diff = back.sub(self, ctx)?;
        let residual = diff
            .terms
            .values()
            .map(|c| c.modulus().to_f64())
            .fold(0.0, f64::max);
        if residual > ctx.tol() {
            return Err(CoreError::NotInSubalgebra(format!(
                "re-embedding residual {residual} above tolerance"
            )));
        }
        Ok(candidate)
    }

    /// Max coefficient modulus of the difference.
    pub fn max_dev(&self, other: &Self, ctx: &ScalarContext<R>) -> f64 {
        match self.sub(other, ctx) {
            Ok(d) => d
                .terms
                .values()
                .map(|c| c.modulus().to_f64())
                .fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn approx_eq(&self, other: &Self, ctx: &ScalarContext<R>) -> bool {
        self.max_dev(other, ctx) < ctx.tol()
    }

    fn check_algebra(&self, other: &Self) -> Result<(), CoreError> {
        if self.algebra != other.algebra {
            return Err(CoreError::AlgebraMismatch(format!(
                "{} vs {}",
                self.algebra, other.algebra
            )));
        }
        Ok(())
    }
}

fn star_gen<R: Real>(g: Gen, ctx: &ScalarContext<R>) -> (Gen, Option<R>) {
    match g {
        Gen::A => (Gen::A, None),
        Gen::B => (Gen::Bs, None),
        Gen::Bs => (Gen::B, None),
        Gen::Qa => (Gen::Qd, None),
        Gen::Qd => (Gen::Qa, None),
        // c = -q^-1 b*  =>  b* = -q c,  c* = -q^-1 b
        Gen::Qb => (Gen::Qc, Some(-ctx.q())),
        Gen::Qc => (Gen::Qb, Some(-ctx.q_powi(-1))),
        Gen::E => (Gen::F, None),
        Gen::F => (Gen::E, None),
        Gen::K => (Gen::K, None),
        Gen::Kinv => (Gen::Kinv, None),
    }
}

/// Random generator word of the given algebra, for the confluence and
/// property suites.
pub fn random_word<R: Real>(
    algebra: AlgebraId,
    max_len: usize,
    rng: &mut impl Rng,
    _ctx: &ScalarContext<R>,
) -> Vec<Gen> {
    let gens: &[Gen] = match algebra {
        AlgebraId::Sphere => &[Gen::A, Gen::B, Gen::Bs],
        AlgebraId::Suq2 => &[Gen::Qa, Gen::Qb, Gen::Qc, Gen::Qd],
        AlgebraId::Uq => &[Gen::E, Gen::F, Gen::K, Gen::Kinv],
    };
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| gens[rng.gen_range(0..gens.len())]).collect()
}

/// Random element with real coefficients in [-1, 1] on monomials of
/// total degree <= `max_deg`.
pub fn random_element<R: Real>(
    algebra: AlgebraId,
    max_deg: usize,
    terms: usize,
    rng: &mut impl Rng,
    ctx: &ScalarContext<R>,
) -> AlgebraElement<R> {
    let mut el = AlgebraElement::zero(algebra);
    for _ in 0..terms {
        let w = random_word(algebra, max_deg, rng, ctx);
        let c = ctx.cplx(rng.gen_range(-1.0..1.0), 0.0);
        if let Ok(t) = reduce_words(algebra, vec![(w, c)], ctx, &mut Strategy::Leftmost) {
            el = el.add(&t, ctx).expect("same algebra");
        }
    }
    el
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::MpReal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> ScalarContext<f64> {
        ScalarContext::new(0.5, 15, 1e-10).unwrap()
    }

    fn nf(word: &[Gen], c: &ScalarContext<f64>) -> AlgebraElement<f64> {
        normal_form(word, c.cone(), c).unwrap()
    }

    #[test]
    fn sphere_ba_straightens() {
        let c = ctx();
        let el = nf(&[Gen::B, Gen::A], &c);
        let expect = AlgebraElement::from_monomial(Monomial::sphere(1, 1, 0), c.cplx(0.25, 0.0));
        assert!(el.approx_eq(&expect, &c));
    }

    #[test]
    fn sphere_bsb_reduces() {
        let c = ctx();
        let el = nf(&[Gen::Bs, Gen::B], &c);
        // A - A^2
        let mut expect = AlgebraElement::from_monomial(Monomial::sphere(1, 0, 0), c.cone());
        expect = expect
            .add(
                &AlgebraElement::from_monomial(Monomial::sphere(2, 0, 0), -c.cone()),
                &c,
            )
            .unwrap();
        assert!(el.approx_eq(&expect, &c));
    }

    #[test]
    fn empty_word_is_unit() {
        let c = ctx();
        let el = nf(&[], &c);
        assert_eq!(el.terms.len(), 1);
        assert!(el.terms.contains_key(&Monomial::unit(AlgebraId::Sphere)));
    }

    #[test]
    fn uq_commutator_ef() {
        let c = ctx();
        let ef = nf(&[Gen::E, Gen::F], &c);
        let fe = nf(&[Gen::F, Gen::E], &c);
        let diff = ef.sub(&fe, &c).unwrap();
        // (K^2 - K^-2)/(q - q^-1)
        let s = c.cplx(1.0 / (0.5 - 2.0), 0.0);
        let mut expect = AlgebraElement::from_monomial(Monomial::uq(0, 2, 0), s.clone());
        expect = expect
            .add(&AlgebraElement::from_monomial(Monomial::uq(0, -2, 0), -s), &c)
            .unwrap();
        assert!(diff.approx_eq(&expect, &c));
    }

    #[test]
    fn mixed_algebra_word_is_an_error() {
        let c = ctx();
        let r = reduce_words(
            AlgebraId::Sphere,
            vec![(vec![Gen::A, Gen::E], c.cone())],
            &c,
            &mut Strategy::Leftmost,
        );
        assert!(matches!(r, Err(CoreError::AlgebraMismatch(_))));
    }

    #[test]
    fn multiply_examples() {
        let c = ctx();
        let a = AlgebraElement::generator(Gen::A, &c);
        let b = AlgebraElement::generator(Gen::B, &c);
        let bs = AlgebraElement::generator(Gen::Bs, &c);
        let unit = AlgebraElement::unit(AlgebraId::Sphere, &c);
        assert!(a.multiply(&unit, &c).unwrap().approx_eq(&a, &c));
        // B B* = q^2 A - q^4 A^2
        let bbs = b.multiply(&bs, &c).unwrap();
        let mut expect = AlgebraElement::from_monomial(Monomial::sphere(1, 0, 0), c.cplx(0.25, 0.0));
        expect = expect
            .add(
                &AlgebraElement::from_monomial(Monomial::sphere(2, 0, 0), c.cplx(-0.0625, 0.0)),
                &c,
            )
            .unwrap();
        assert!(bbs.approx_eq(&expect, &c));
        // (A + B) B = AB + B^2
        let apb = a.add(&b, &c).unwrap();
        let prod = apb.multiply(&b, &c).unwrap();
        let mut expect2 = AlgebraElement::from_monomial(Monomial::sphere(1, 1, 0), c.cone());
        expect2 = expect2
            .add(&AlgebraElement::from_monomial(Monomial::sphere(0, 2, 0), c.cone()), &c)
            .unwrap();
        assert!(prod.approx_eq(&expect2, &c));
    }

    #[test]
    fn star_examples() {
        let c = ctx();
        let a = AlgebraElement::generator(Gen::A, &c);
        assert!(a.star(&c).approx_eq(&a, &c));
        // (AB)* = B* A = q^-2 A B*
        let ab = nf(&[Gen::A, Gen::B], &c);
        let star = ab.star(&c);
        let expect = AlgebraElement::from_monomial(Monomial::sphere(1, 0, 1), c.cplx(4.0, 0.0));
        assert!(star.approx_eq(&expect, &c));
        // antilinearity on i*1
        let iu = AlgebraElement::unit(AlgebraId::Sphere, &c).scale(&c.i());
        assert!(iu.star(&c).approx_eq(&iu.scale(&c.cplx(-1.0, 0.0)), &c));
    }

    #[test]
    fn star_involutive_antimultiplicative() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for algebra in [AlgebraId::Sphere, AlgebraId::Suq2, AlgebraId::Uq] {
            for _ in 0..20 {
                let x = random_element(algebra, 3, 3, &mut rng, &c);
                let y = random_element(algebra, 3, 3, &mut rng, &c);
                assert!(x.star(&c).star(&c).approx_eq(&x, &c));
                let lhs = x.multiply(&y, &c).unwrap().star(&c);
                let rhs = y.star(&c).multiply(&x.star(&c), &c).unwrap();
                assert!(lhs.approx_eq(&rhs, &c), "star antimultiplicative on {algebra}");
            }
        }
    }

    #[test]
    fn counit_examples() {
        let c = ctx();
        let unit = AlgebraElement::unit(AlgebraId::Sphere, &c);
        assert!(c.approx_eq(&unit.counit(&c), &c.cone()));
        let aab = nf(&[Gen::A, Gen::A, Gen::B], &c);
        assert!(c.approx_zero(&aab.counit(&c)));
        let mix = unit
            .add(&AlgebraElement::generator(Gen::A, &c).scale(&c.cplx(3.0, 0.0)), &c)
            .unwrap();
        assert!(c.approx_eq(&mix.counit(&c), &c.cone()));
    }

    #[test]
    fn counit_is_a_character() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for algebra in [AlgebraId::Sphere, AlgebraId::Suq2, AlgebraId::Uq] {
            for _ in 0..20 {
                let x = random_element(algebra, 3, 3, &mut rng, &c);
                let y = random_element(algebra, 3, 3, &mut rng, &c);
                let lhs = x.multiply(&y, &c).unwrap().counit(&c);
                let rhs = x.counit(&c) * y.counit(&c);
                assert!(c.approx_eq(&lhs, &rhs));
            }
        }
    }

    #[test]
    fn sigma_twist_examples() {
        let c = ctx();
        let a2 = nf(&[Gen::A, Gen::A], &c);
        let lam = c.cplx(0.25, 0.0); // q^2
        assert!(a2.sigma_twist(&lam, &c).unwrap().approx_eq(&a2, &c));
        let b = AlgebraElement::generator(Gen::B, &c);
        assert!(b
            .sigma_twist(&lam, &c)
            .unwrap()
            .approx_eq(&b.scale(&lam), &c));
        // sigma(B*B) = B*B
        let bsb = nf(&[Gen::Bs, Gen::B], &c);
        assert!(bsb.sigma_twist(&lam, &c).unwrap().approx_eq(&bsb, &c));
        assert!(b.sigma_twist(&c.czero(), &c).is_err());
        // sigma preserves the defining relations: check on B A - q^2 A B
        let sb = b.sigma_twist(&lam, &c).unwrap();
        let sa = AlgebraElement::generator(Gen::A, &c);
        let lhs = sb.multiply(&sa, &c).unwrap();
        let rhs = sa.multiply(&sb, &c).unwrap().scale(&c.cplx(0.25, 0.0));
        assert!(lhs.approx_eq(&rhs, &c));
    }

    #[test]
    fn sigma_inverse_composes_to_identity() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lam = c.cplx(0.25, 0.0);
        let inv = lam.inv();
        for _ in 0..20 {
            let x = random_element(AlgebraId::Sphere, 4, 4, &mut rng, &c);
            let y = x
                .sigma_twist(&lam, &c)
                .unwrap()
                .sigma_twist(&inv, &c)
                .unwrap();
            assert!(y.approx_eq(&x, &c));
        }
    }

    #[test]
    fn embed_examples() {
        let c = ctx();
        let b = AlgebraElement::generator(Gen::B, &c).embed_sphere(&c).unwrap();
        let ac = AlgebraElement::from_monomial(Monomial::suq2(1, 0, 1, 0), c.cone());
        assert!(b.approx_eq(&ac, &c));
        let a = AlgebraElement::generator(Gen::A, &c).embed_sphere(&c).unwrap();
        let bc = AlgebraElement::from_monomial(Monomial::suq2(0, 1, 1, 0), c.cplx(-2.0, 0.0));
        assert!(a.approx_eq(&bc, &c));
    }

    #[test]
    fn embed_is_a_homomorphism() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = random_element(AlgebraId::Sphere, 3, 3, &mut rng, &c);
            let y = random_element(AlgebraId::Sphere, 3, 3, &mut rng, &c);
            let lhs = x.multiply(&y, &c).unwrap().embed_sphere(&c).unwrap();
            let rhs = x
                .embed_sphere(&c)
                .unwrap()
                .multiply(&y.embed_sphere(&c).unwrap(), &c)
                .unwrap();
            assert!(lhs.approx_eq(&rhs, &c));
        }
        // B*B maps to the image of A - A^2
        let bsb = nf(&[Gen::Bs, Gen::B], &c).embed_sphere(&c).unwrap();
        let bs = AlgebraElement::generator(Gen::Bs, &c).embed_sphere(&c).unwrap();
        let b = AlgebraElement::generator(Gen::B, &c).embed_sphere(&c).unwrap();
        assert!(bsb.approx_eq(&bs.multiply(&b, &c).unwrap(), &c));
    }

    #[test]
    fn recognize_round_trip_and_failures() {
        let c = ctx();
        let a2b = nf(&[Gen::A, Gen::A, Gen::B], &c);
        let img = a2b.embed_sphere(&c).unwrap();
        let back = img.recognize_in_sphere(8, &c).unwrap();
        assert!(back.approx_eq(&a2b, &c));
        // ac -> B
        let ac = AlgebraElement::from_monomial(Monomial::suq2(1, 0, 1, 0), c.cone());
        let b = ac.recognize_in_sphere(8, &c).unwrap();
        assert!(b.approx_eq(&AlgebraElement::generator(Gen::B, &c), &c));
        // b alone is not invariant
        let lone_b = AlgebraElement::generator(Gen::Qb, &c);
        assert!(matches!(
            lone_b.recognize_in_sphere(8, &c),
            Err(CoreError::NotInSubalgebra(_))
        ));
        // degree bound
        assert!(matches!(
            img.recognize_in_sphere(1, &c),
            Err(CoreError::DegreeBoundTooSmall(_))
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let x = random_element(AlgebraId::Sphere, 3, 3, &mut rng, &c);
            let back = x
                .embed_sphere(&c)
                .unwrap()
                .recognize_in_sphere(9, &c)
                .unwrap();
            assert!(back.approx_eq(&x, &c));
        }
    }

    #[test]
    fn confluence_under_randomized_rule_order() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for algebra in [AlgebraId::Sphere, AlgebraId::Suq2, AlgebraId::Uq] {
            for _ in 0..40 {
                let w = random_word(algebra, 8, &mut rng, &c);
                let base =
                    reduce_words(algebra, vec![(w.clone(), c.cone())], &c, &mut Strategy::Leftmost)
                        .unwrap();
                for _ in 0..3 {
                    let mut r2 = ChaCha8Rng::seed_from_u64(rng.gen());
                    let alt = reduce_words(
                        algebra,
                        vec![(w.clone(), c.cone())],
                        &c,
                        &mut Strategy::Random(&mut r2),
                    )
                    .unwrap();
                    assert!(alt.approx_eq(&base, &c), "confluence failure in {algebra}");
                }
            }
        }
    }

    #[test]
    fn normal_forms_satisfy_exponent_constraints() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for algebra in [AlgebraId::Sphere, AlgebraId::Suq2, AlgebraId::Uq] {
            for _ in 0..50 {
                let w = random_word(algebra, 8, &mut rng, &c);
                let el = reduce_words(algebra, vec![(w, c.cone())], &c, &mut Strategy::Leftmost)
                    .unwrap();
                for m in el.terms.keys() {
                    assert!(m.is_normal());
                }
            }
        }
    }

    /// Criterion-1 style exactness at 50 digits: the defining relations
    /// normalize to zero with coefficient deviation below 1e-40.
    #[test]
    fn relations_hold_to_full_precision() {
        let c: ScalarContext<MpReal> = ScalarContext::new(0.5, 50, 1e-8).unwrap();
        let a = AlgebraElement::generator(Gen::A, &c);
        let b = AlgebraElement::generator(Gen::B, &c);
        let bs = AlgebraElement::generator(Gen::Bs, &c);
        let q2 = Cplx::from_real(c.q_powi(2));
        // BA - q^2 AB
        let lhs = b.multiply(&a, &c).unwrap();
        let rhs = a.multiply(&b, &c).unwrap().scale(&q2);
        assert!(lhs.max_dev(&rhs, &c) < 1e-40);
        // B*B - (A - A^2)
        let lhs = bs.multiply(&b, &c).unwrap();
        let rhs = a
            .sub(&a.multiply(&a, &c).unwrap(), &c)
            .unwrap();
        assert!(lhs.max_dev(&rhs, &c) < 1e-40);
    }
}
