//! Regular subdivisions of the cube induced by a height function: exact
//! face and edge tests, the local certificates on 3- and 4-faces, the full
//! valuated Δ-matroid checker, maximal cells and secondary-cone dimension.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::cube::{self, check_n, ConvexCircuit, CubeFace, Subset};
use crate::delta::{self, BasisFamily, ExchangeViolation};
use crate::exec::Exec;
use crate::hull;
use crate::linalg::{self, AffineChart};
use crate::lp::{self, Constraint, Outcome, Problem, Relation};
use crate::rat::{fmt_rat, rat, ExtRat, Rat};
use crate::{Error, Result};

/// A function `{0,1}^n → Q ∪ {∞}` with at least one finite value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetFunction {
    n: usize,
    values: Vec<ExtRat>,
}

impl SubsetFunction {
    /// Values indexed by subset bitmask.
    pub fn new(n: usize, values: Vec<ExtRat>) -> Result<Self> {
        check_n(n)?;
        if values.len() != 1 << n {
            return Err(Error::WrongDimension { expected: 1 << n, found: values.len() });
        }
        if values.iter().all(ExtRat::is_inf) {
            return Err(Error::InvalidArgument("a subset function needs a finite value".into()));
        }
        Ok(SubsetFunction { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(Subset) -> ExtRat) -> Result<Self> {
        check_n(n)?;
        SubsetFunction::new(n, Subset::all(n).map(f).collect())
    }

    /// Values given by subset size: `by_size[k]` is the value on every `k`-set.
    pub fn by_size(n: usize, by_size: &[ExtRat]) -> Result<Self> {
        if by_size.len() != n + 1 {
            return Err(Error::WrongDimension { expected: n + 1, found: by_size.len() });
        }
        SubsetFunction::from_fn(n, |s| by_size[s.len()].clone())
    }

    /// Zero on the family, `∞` elsewhere.
    pub fn indicator_zero(f: &BasisFamily) -> Self {
        SubsetFunction::from_fn(f.n(), |s| if f.contains(s) { ExtRat::zero() } else { ExtRat::Inf })
            .expect("families are nonempty")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: Subset) -> &ExtRat {
        &self.values[s.bits as usize]
    }

    pub fn values(&self) -> &[ExtRat] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| !v.is_inf())
    }

    /// The effective domain, in bitmask order.
    pub fn dom(&self) -> Vec<Subset> {
        Subset::all(self.n).filter(|s| !self.get(*s).is_inf()).collect()
    }

    pub fn dom_family(&self) -> BasisFamily {
        BasisFamily::new(self.n, self.dom()).expect("domain is nonempty")
    }

    /// Restriction to a face of dimension ≥ 1, in the face's local
    /// coordinates; `None` when the face misses the domain.
    pub fn restrict(&self, face: &CubeFace) -> Option<SubsetFunction> {
        let values: Vec<ExtRat> = face.vertices().into_iter().map(|s| self.get(s).clone()).collect();
        SubsetFunction::new(face.dim(), values).ok()
    }

    /// `(g·p)(g(S)) = p(S)`.
    pub fn act(&self, g: &cube::SignedSymmetry) -> SubsetFunction {
        let mut values = vec![ExtRat::Inf; self.values.len()];
        for s in Subset::all(self.n) {
            values[g.apply(s).bits as usize] = self.get(s).clone();
        }
        SubsetFunction { n: self.n, values }
    }

    /// `c·p + φ·e_S + b` for `c > 0`.
    pub fn transform(&self, c: &Rat, phi: &[Rat], b: &Rat) -> SubsetFunction {
        let values = Subset::all(self.n)
            .map(|s| match self.get(s) {
                ExtRat::Inf => ExtRat::Inf,
                ExtRat::Fin(v) => ExtRat::Fin(c * v + s.elems().map(|i| phi[i].clone()).sum::<Rat>() + b),
            })
            .collect();
        SubsetFunction { n: self.n, values }
    }

    /// Seeded random function with integer values in `0..=max` and each
    /// entry infinite with probability `inf_rate`.
    pub fn random(n: usize, seed: u64, max: i64, inf_rate: f64) -> Result<Self> {
        check_n(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let values: Vec<ExtRat> = (0..1usize << n)
                .map(|_| if rng.gen_bool(inf_rate) { ExtRat::Inf } else { ExtRat::from(rng.gen_range(0..=max)) })
                .collect();
            if let Ok(p) = SubsetFunction::new(n, values) {
                return Ok(p);
            }
        }
    }

    /// `{"n": .., "values": {"": "0", "12": "1/2", "3": "inf"}}`; subsets
    /// missing from `values` are infinite.
    pub fn to_json(&self) -> Value {
        let mut values = Map::new();
        for s in Subset::all(self.n) {
            values.insert(s.to_string(), Value::String(self.get(s).to_string()));
        }
        serde_json::json!({ "n": self.n, "values": values })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("subset function JSON: {m}"));
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing integer field \"n\""))? as usize;
        check_n(n)?;
        let map = v.get("values").and_then(Value::as_object).ok_or_else(|| bad("missing object field \"values\""))?;
        let mut values = vec![ExtRat::Inf; 1 << n];
        for (k, x) in map {
            let s = Subset::parse(k, n)?;
            values[s.bits as usize] = match x {
                Value::String(t) => ExtRat::parse(t)?,
                Value::Number(num) => match num.as_i64() {
                    Some(i) => ExtRat::from(i),
                    None => return Err(bad(&format!("non-integer number at {k:?}; use a string"))),
                },
                Value::Null => ExtRat::Inf,
                _ => return Err(bad(&format!("bad value at {k:?}"))),
            };
        }
        SubsetFunction::new(n, values)
    }
}

/// Certificate that a vertex set is a cell: `φ·e_S + p_S = b` on the set and
/// `≥ b + margin` on the rest of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceWitness {
    pub phi: Vec<Rat>,
    pub b: Rat,
    pub margin: Rat,
}

impl FaceWitness {
    /// Re-checks the witness against `p` and `vertices`.
    pub fn verify(&self, p: &SubsetFunction, vertices: &[Subset]) -> bool {
        if !self.margin.is_positive() {
            return false;
        }
        p.dom().into_iter().all(|u| {
            let h = u.elems().map(|i| self.phi[i].clone()).sum::<Rat>() + p.get(u).finite().unwrap();
            if vertices.contains(&u) {
                h == self.b
            } else {
                h >= &self.b + &self.margin
            }
        })
    }
}

impl Serialize for FaceWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_json::json!({
            "phi": self.phi.iter().map(fmt_rat).collect::<Vec<_>>(),
            "b": fmt_rat(&self.b),
            "margin": fmt_rat(&self.margin),
        })
        .serialize(s)
    }
}

/// A cell of the subdivision.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cell {
    pub vertices: Vec<Subset>,
    pub dim: usize,
}

impl Cell {
    fn new(mut vertices: Vec<Subset>) -> Self {
        vertices.sort();
        let pts: Vec<Vec<Rat>> = vertices.iter().map(|s| s.indicator()).collect();
        let dim = linalg::affine_dim(&pts).unwrap_or(0);
        Cell { vertices, dim }
    }
}

/// Decides whether `vertices` is exactly the vertex set of a cell of the
/// subdivision induced by `p`.
pub fn is_face(p: &SubsetFunction, vertices: &[Subset]) -> Result<Option<FaceWitness>> {
    if vertices.is_empty() {
        return Err(Error::InvalidArgument("empty vertex set".into()));
    }
    if vertices.iter().any(|s| s.n() != p.n) {
        return Err(Error::InvalidArgument("vertex over a different ground set".into()));
    }
    if vertices.iter().any(|s| p.get(*s).is_inf()) {
        return Err(Error::OutsideDomain);
    }
    let n = p.n;
    let row = |s: Subset| -> Vec<Rat> {
        let mut r = s.indicator();
        r.push(-Rat::one());
        r
    };
    let inside: BTreeSet<Subset> = vertices.iter().copied().collect();
    let mut eqs = Vec::new();
    let mut ineqs = Vec::new();
    for u in p.dom() {
        let rhs = -p.get(u).finite().unwrap().clone();
        if inside.contains(&u) {
            eqs.push((row(u), rhs));
        } else {
            ineqs.push((row(u), rhs));
        }
    }
    Ok(lp::strict_feasible(n + 1, &eqs, &ineqs)?.map(|sp| {
        let mut phi = sp.x;
        let b = phi.pop().unwrap();
        FaceWitness { phi, b, margin: sp.margin }
    }))
}

/// Whether the segment `[e_a, e_b]` is an edge of the subdivision. The test
/// runs on the smallest cube face containing both endpoints, whose induced
/// subdivision is the restriction of the global one.
pub fn is_edge(p: &SubsetFunction, a: Subset, b: Subset) -> Result<bool> {
    if a == b {
        return Err(Error::InvalidArgument("edge endpoints coincide".into()));
    }
    if p.get(a).is_inf() || p.get(b).is_inf() {
        return Err(Error::OutsideDomain);
    }
    let face = CubeFace::spanned_by(a, b);
    let local = p.restrict(&face).expect("endpoints are in the domain");
    let m = face.dim();
    let (la, lb) = (Subset::new(face.localize(a), m), Subset::new(face.localize(b), m));
    // In local coordinates `a` and `b` are antipodal, so every other
    // antipodal pair has the same midpoint. A lifting functional that is
    // tight exactly on `{a, b}` forces `p_c + p_c̄ > p_a + p_b` for all of
    // them; a pair violating this rules the edge out without an LP.
    let sum = local.get(la) + local.get(lb);
    let blocked = Subset::all(m).any(|c| c != la && c != lb && local.get(c) + local.get(c.complement()) <= sum);
    if blocked {
        return Ok(false);
    }
    Ok(is_face(&local, &[la, lb])?.is_some())
}

fn long_pairs(p: &SubsetFunction, min_len: usize) -> Vec<(Subset, Subset)> {
    let dom = p.dom();
    let mut pairs = Vec::new();
    for (i, &a) in dom.iter().enumerate() {
        for &b in &dom[i + 1..] {
            if a.hamming(b) >= min_len.max(1) {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// All edges of the subdivision of Hamming length at least `min_len`,
/// ordered by endpoints.
pub fn long_edges(p: &SubsetFunction, min_len: usize) -> Result<Vec<(Subset, Subset)>> {
    long_edges_with(p, min_len, Exec::default())
}

pub fn long_edges_with(p: &SubsetFunction, min_len: usize, exec: Exec) -> Result<Vec<(Subset, Subset)>> {
    let pairs = long_pairs(p, min_len);
    let flags = exec.map(pairs.clone(), |(a, b)| is_edge(p, a, b));
    let mut out = Vec::new();
    for (pair, flag) in pairs.into_iter().zip(flags) {
        if flag? {
            out.push(pair);
        }
    }
    Ok(out)
}

/// The first long edge in canonical order, stopping at the first hit.
pub fn first_long_edge(p: &SubsetFunction, min_len: usize) -> Result<Option<(Subset, Subset)>> {
    for (a, b) in long_pairs(p, min_len) {
        if is_edge(p, a, b)? {
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

/// Outcome of the six-term test on a 3-cube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check3 {
    /// `2p_∅+2p_123, 2p_1+2p_23, 2p_2+2p_13, 2p_3+2p_12,
    ///  p_∅+p_12+p_13+p_23, p_1+p_2+p_3+p_123`.
    pub terms: [ExtRat; 6],
    pub pass: bool,
    /// The unique minimiser when the test fails.
    pub unique_min: Option<usize>,
}

impl Check3 {
    /// For a failure, the antipodal pair (local coordinates) that must be an edge.
    pub fn antipodal_edge(&self) -> Option<(Subset, Subset)> {
        let k = self.unique_min?;
        let a = match k {
            0 => 0b000,
            1 => 0b001,
            2 => 0b010,
            _ => 0b100,
        };
        Some(ordered(Subset::new(a, 3), Subset::new(a ^ 0b111, 3)))
    }
}

fn ordered(a: Subset, b: Subset) -> (Subset, Subset) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Index set of the minimum of `terms` (empty when all are infinite).
fn argmins(terms: &[ExtRat]) -> Vec<usize> {
    let min = terms.iter().min().expect("nonempty");
    if min.is_inf() {
        return Vec::new();
    }
    (0..terms.len()).filter(|&i| &terms[i] == min).collect()
}

pub fn check3(p: &SubsetFunction) -> Result<Check3> {
    if p.n != 3 {
        return Err(Error::WrongDimension { expected: 3, found: p.n });
    }
    let v = |bits: u32| p.values[bits as usize].clone();
    let two = |x: ExtRat| x.clone() + x;
    let terms = [
        two(v(0b000) + v(0b111)),
        two(v(0b001) + v(0b110)),
        two(v(0b010) + v(0b101)),
        two(v(0b100) + v(0b011)),
        v(0b000) + v(0b011) + v(0b101) + v(0b110),
        v(0b001) + v(0b010) + v(0b100) + v(0b111),
    ];
    let mins = argmins(&terms);
    let pass = mins.len() != 1 || mins[0] >= 4;
    let unique_min = if pass { None } else { Some(mins[0]) };
    Ok(Check3 { terms, pass, unique_min })
}

fn circuits4() -> &'static [ConvexCircuit] {
    static CIRCUITS: OnceLock<Vec<ConvexCircuit>> = OnceLock::new();
    CIRCUITS.get_or_init(|| cube::center_circuits(4).expect("n = 4 is supported"))
}

/// `p(x, J) = Σ λ_j p_j` over a circuit.
pub fn circuit_value(p: &SubsetFunction, c: &ConvexCircuit) -> ExtRat {
    let mut total = ExtRat::zero();
    for (s, w) in c.support.iter().zip(&c.weights) {
        total = total + p.get(*s).scale(w);
    }
    total
}

/// Outcome of the 4-cube test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check4 {
    /// Facets (as faces of the local 4-cube) whose six-term test fails.
    pub facet_failures: Vec<(CubeFace, Check3)>,
    pub circuit_min: ExtRat,
    /// Circuits attaining the minimum, as indices into the canonical list.
    pub minimizers: Vec<usize>,
    pub pass: bool,
}

impl Check4 {
    pub fn minimizing_circuits(&self) -> Vec<&'static ConvexCircuit> {
        self.minimizers.iter().map(|&i| &circuits4()[i]).collect()
    }
}

pub fn check4(p: &SubsetFunction) -> Result<Check4> {
    if p.n != 4 {
        return Err(Error::WrongDimension { expected: 4, found: p.n });
    }
    let mut facet_failures = Vec::new();
    for face in cube::enumerate_faces(4, 3)? {
        if let Some(q) = p.restrict(&face) {
            let c = check3(&q)?;
            if !c.pass {
                facet_failures.push((face, c));
            }
        }
    }
    let values: Vec<ExtRat> = circuits4().iter().map(|c| circuit_value(p, c)).collect();
    let minimizers = argmins(&values);
    let circuit_min = values.iter().min().unwrap().clone();
    let pass = facet_failures.is_empty() && minimizers.len() != 1;
    Ok(Check4 { facet_failures, circuit_min, minimizers, pass })
}

/// Why a function is (or is not) a valuated Δ-matroid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Every function on a cube of dimension at most two qualifies.
    SmallGroundSet,
    /// All local tests passed.
    AllFacesPass { faces_checked: usize },
    /// The domain violates the exchange axiom.
    Exchange { a: Subset, b: Subset, element: usize },
    /// A 3-face fails the six-term test; the antipodal pair is a long edge.
    Face3 { face: CubeFace, term: usize, edge: (Subset, Subset) },
    /// A 4-face has a unique circuit minimiser.
    Circuit { face: CubeFace, support: Vec<Subset>, edge: Option<(Subset, Subset)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub valuated: bool,
    pub certificate: Certificate,
}

impl Verdict {
    /// The long edge named by the certificate, if any.
    pub fn edge(&self) -> Option<(Subset, Subset)> {
        match &self.certificate {
            Certificate::Face3 { edge, .. } => Some(*edge),
            Certificate::Circuit { edge, .. } => *edge,
            _ => None,
        }
    }
}

pub fn is_valuated_delta_matroid(p: &SubsetFunction) -> Result<Verdict> {
    is_valuated_delta_matroid_with(p, Exec::default())
}

pub fn is_valuated_delta_matroid_with(p: &SubsetFunction, exec: Exec) -> Result<Verdict> {
    let n = p.n;
    if n <= 2 {
        return Ok(Verdict { valuated: true, certificate: Certificate::SmallGroundSet });
    }
    if n == 3 {
        let c = check3(p)?;
        return Ok(match c.antipodal_edge() {
            None => Verdict { valuated: true, certificate: Certificate::AllFacesPass { faces_checked: 1 } },
            Some(edge) => Verdict {
                valuated: false,
                certificate: Certificate::Face3 { face: CubeFace::whole(3), term: c.unique_min.unwrap(), edge },
            },
        });
    }
    if let Err(ExchangeViolation { a, b, elem }) = delta::is_delta_matroid(&p.dom_family()) {
        return Ok(Verdict { valuated: false, certificate: Certificate::Exchange { a, b, element: elem } });
    }
    let faces = cube::enumerate_faces(n, 4)?;
    let count = faces.len();
    let results = exec.map(faces, |face| -> Result<Option<Certificate>> {
        let Some(q) = p.restrict(&face) else { return Ok(None) };
        let c = check4(&q)?;
        if c.pass {
            return Ok(None);
        }
        let lift = |(a, b): (Subset, Subset)| ordered(face.lift(a.bits), face.lift(b.bits));
        if let Some((facet, c3)) = c.facet_failures.first() {
            let (a, b) = c3.antipodal_edge().unwrap();
            let local = (facet.lift(a.bits), facet.lift(b.bits));
            let global_facet = CubeFace {
                n,
                free_mask: facet.free().iter().fold(0, |m, &i| m | 1 << face.free()[i]),
                fixed_bits: face.lift(facet.fixed_bits).bits,
            };
            return Ok(Some(Certificate::Face3 { face: global_facet, term: c3.unique_min.unwrap(), edge: lift(local) }));
        }
        let circuit = c.minimizing_circuits()[0];
        let support: Vec<Subset> = circuit.support.iter().map(|s| face.lift(s.bits)).collect();
        let edge = if circuit.support.len() == 2 {
            Some(ordered(support[0], support[1]))
        } else {
            first_long_edge(&q, 3)?.map(lift)
        };
        Ok(Some(Certificate::Circuit { face, support, edge }))
    });
    for r in results {
        if let Some(certificate) = r? {
            return Ok(Verdict { valuated: false, certificate });
        }
    }
    Ok(Verdict { valuated: true, certificate: Certificate::AllFacesPass { faces_checked: count } })
}

/// How maximal cells are found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellMode {
    /// Every affinely independent spanning subset of the domain (n ≤ 4).
    Exhaustive,
    /// Wall-crossing search from one cell (n ≤ 6).
    Bfs { budget: usize },
}

pub const DEFAULT_CELL_BUDGET: usize = 100_000;

impl CellMode {
    pub fn bfs() -> Self {
        CellMode::Bfs { budget: DEFAULT_CELL_BUDGET }
    }

    /// Exhaustive up to `n = 4`, wall crossing above.
    pub fn auto(n: usize) -> Self {
        if n <= 4 {
            CellMode::Exhaustive
        } else {
            CellMode::bfs()
        }
    }
}

/// Lifted domain in chart coordinates.
struct Lifted {
    dom: Vec<Subset>,
    pts: Vec<Vec<Rat>>,
    heights: Vec<Rat>,
    dim: usize,
}

impl Lifted {
    fn new(p: &SubsetFunction) -> Self {
        let dom = p.dom();
        let full: Vec<Vec<Rat>> = dom.iter().map(|s| s.indicator()).collect();
        let chart = AffineChart::of(&full);
        let pts = full.iter().map(|x| chart.project(x)).collect();
        let heights = dom.iter().map(|s| p.get(*s).finite().unwrap().clone()).collect();
        Lifted { dom, pts, heights, dim: chart.dim }
    }

    /// Affine function `(a, c)` with `a·x_i + c = h_i` on the given points.
    fn interpolate(&self, idx: &[usize]) -> Option<(Vec<Rat>, Rat)> {
        let rows: Vec<Vec<Rat>> = idx
            .iter()
            .map(|&i| {
                let mut r = self.pts[i].clone();
                r.push(Rat::one());
                r
            })
            .collect();
        let rhs: Vec<Rat> = idx.iter().map(|&i| self.heights[i].clone()).collect();
        let mut sol = linalg::solve(&rows, &rhs)?;
        let c = sol.pop().unwrap();
        Some((sol, c))
    }

    fn eval(&self, (a, c): &(Vec<Rat>, Rat), i: usize) -> Rat {
        linalg::dot(a, &self.pts[i]) + c
    }

    /// Tight set of a lower supporting function, or `None` if it is not lower.
    fn tight(&self, h: &(Vec<Rat>, Rat)) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..self.pts.len() {
            let v = self.eval(h, i);
            if v > self.heights[i] {
                return None;
            }
            if v == self.heights[i] {
                out.push(i);
            }
        }
        Some(out)
    }

    fn cell(&self, idx: &[usize]) -> Cell {
        Cell { vertices: idx.iter().map(|&i| self.dom[i]).collect(), dim: self.dim }
    }
}

/// The inclusion-maximal cells, sorted by vertex list.
pub fn maximal_cells(p: &SubsetFunction, mode: CellMode) -> Result<Vec<Cell>> {
    maximal_cells_with(p, mode, Exec::default())
}

pub fn maximal_cells_with(p: &SubsetFunction, mode: CellMode, exec: Exec) -> Result<Vec<Cell>> {
    let lifted = Lifted::new(p);
    if lifted.dim == 0 {
        return Ok(vec![Cell::new(lifted.dom.clone())]);
    }
    let found: BTreeSet<Vec<usize>> = match mode {
        CellMode::Exhaustive => {
            if p.n > 4 {
                return Err(Error::Precondition(format!("exhaustive cell enumeration needs n <= 4, got {}", p.n)));
            }
            let combos = cube::combinations(lifted.pts.len(), lifted.dim + 1);
            exec.map(combos, |idx| lifted.interpolate(&idx).and_then(|h| lifted.tight(&h)))
                .into_iter()
                .flatten()
                .collect()
        }
        CellMode::Bfs { budget } => {
            if p.n > 6 {
                return Err(Error::Precondition(format!("cell search needs n <= 6, got {}", p.n)));
            }
            bfs_cells(&lifted, budget)?
        }
    };
    Ok(found.into_iter().map(|idx| lifted.cell(&idx)).collect())
}

/// A lower facet from an optimal basis of `min Σ λ_i h_i` subject to
/// `Σ λ_i x_i = centroid`, `Σ λ_i = 1`, `λ ≥ 0`.
fn start_cell(l: &Lifted) -> Result<Vec<usize>> {
    let m = l.pts.len();
    let count = rat(m as i64);
    let mut constraints = Vec::new();
    for k in 0..l.dim {
        let centroid = l.pts.iter().map(|x| x[k].clone()).sum::<Rat>() / &count;
        constraints.push(Constraint { coeffs: l.pts.iter().map(|x| x[k].clone()).collect(), rel: Relation::Eq, rhs: centroid });
    }
    constraints.push(Constraint { coeffs: vec![Rat::one(); m], rel: Relation::Eq, rhs: Rat::one() });
    let problem = Problem {
        num_vars: m,
        objective: l.heights.iter().map(|h| -h).collect(),
        constraints,
        nonneg: vec![true; m],
    };
    let Outcome::Optimal(sol) = lp::solve(&problem)? else {
        return Err(Error::Structure("lower hull program has no optimum".into()));
    };
    let basis: Vec<usize> = sol.basic_vars.iter().copied().filter(|&j| j < m).collect();
    let h = l
        .interpolate(&basis)
        .filter(|_| basis.len() == l.dim + 1)
        .ok_or_else(|| Error::Structure("degenerate optimal basis".into()))?;
    l.tight(&h).ok_or_else(|| Error::Structure("optimal basis does not support the lower hull".into()))
}

fn bfs_cells(l: &Lifted, budget: usize) -> Result<BTreeSet<Vec<usize>>> {
    let start = start_cell(l)?;
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(cell) = queue.pop_front() {
        let basis = affine_basis(&cell.iter().map(|&i| l.pts[i].clone()).collect::<Vec<_>>());
        let idx: Vec<usize> = basis.iter().map(|&k| cell[k]).collect();
        let h = l.interpolate(&idx).expect("affinely independent");
        let local: Vec<Vec<Rat>> = cell.iter().map(|&i| l.pts[i].clone()).collect();
        for facet in hull::facets(&local)? {
            let g = |i: usize| linalg::dot(&facet.normal, &l.pts[i]) - &facet.offset;
            let mut best: Option<Rat> = None;
            for i in 0..l.pts.len() {
                let gi = g(i);
                if gi.is_positive() {
                    let s = (&l.heights[i] - l.eval(&h, i)) / gi;
                    if best.as_ref().map_or(true, |b| &s < b) {
                        best = Some(s);
                    }
                }
            }
            let Some(s) = best else { continue };
            let a: Vec<Rat> = h.0.iter().zip(&facet.normal).map(|(x, y)| x + &s * y).collect();
            let c = &h.1 - &s * &facet.offset;
            let next = l.tight(&(a, c)).ok_or_else(|| Error::Structure("wall crossing left the lower hull".into()))?;
            if seen.insert(next.clone()) {
                if seen.len() > budget {
                    return Err(Error::BudgetExhausted(format!("more than {budget} maximal cells")));
                }
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

/// Indices of a maximal affinely independent subset, chosen greedily.
fn affine_basis(points: &[Vec<Rat>]) -> Vec<usize> {
    let mut basis = vec![0];
    for i in 1..points.len() {
        let mut trial: Vec<Vec<Rat>> = basis.iter().map(|&k| points[k].clone()).collect();
        trial.push(points[i].clone());
        if linalg::affinely_independent(&trial) {
            basis.push(i);
        }
    }
    basis
}

/// Dimension of the space of height functions inducing the same
/// subdivision as `p` (which must be finite everywhere).
pub fn cone_dimension(p: &SubsetFunction) -> Result<usize> {
    cone_dimension_with(p, CellMode::auto(p.n), Exec::default())
}

pub fn cone_dimension_with(p: &SubsetFunction, mode: CellMode, exec: Exec) -> Result<usize> {
    if !p.is_finite() {
        return Err(Error::Precondition("cone dimension needs finite values".into()));
    }
    let cells = maximal_cells_with(p, mode, exec)?;
    let total = 1usize << p.n;
    let mut rows: BTreeMap<Vec<Rat>, ()> = BTreeMap::new();
    for cell in &cells {
        let pts: Vec<Vec<Rat>> = cell.vertices.iter().map(|s| s.indicator()).collect();
        let basis = affine_basis(&pts);
        let basis_pts: Vec<Vec<Rat>> = basis.iter().map(|&k| pts[k].clone()).collect();
        for (k, x) in pts.iter().enumerate() {
            if basis.contains(&k) {
                continue;
            }
            let mu = linalg::affine_coords(&basis_pts, x).expect("point lies in the cell's span");
            let mut row = vec![Rat::zero(); total];
            row[cell.vertices[k].bits as usize] = Rat::one();
            for (&b, m) in basis.iter().zip(mu) {
                row[cell.vertices[b].bits as usize] -= m;
            }
            rows.insert(row, ());
        }
    }
    let rows: Vec<Vec<Rat>> = rows.into_keys().collect();
    Ok(total - linalg::rank(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta::random_delta_matroid;
    use crate::rat::ratio;

    fn by_size(n: usize, v: &[i64]) -> SubsetFunction {
        SubsetFunction::by_size(n, &v.iter().map(|&x| ExtRat::from(x)).collect::<Vec<_>>()).unwrap()
    }

    fn s(n: usize, t: &str) -> Subset {
        Subset::parse(t, n).unwrap()
    }

    /// Zero on ∅, 12, 34, 1234; 100 on odd sets; 1 on the other pairs.
    pub(crate) fn dimdr4() -> SubsetFunction {
        SubsetFunction::from_fn(4, |x| {
            let v = match x.len() {
                1 | 3 => 100,
                2 if x.bits == 0b0011 || x.bits == 0b1100 => 0,
                2 => 1,
                _ => 0,
            };
            ExtRat::from(v)
        })
        .unwrap()
    }

    #[test]
    fn strict_feasibility_of_square_diagonal() {
        let p = by_size(2, &[0, 0, 0]);
        assert!(is_face(&p, &[s(2, ""), s(2, "12")]).unwrap().is_none());
    }

    #[test]
    fn whole_cube_is_a_face_of_zero() {
        let p = by_size(3, &[0, 0, 0, 0]);
        let all: Vec<Subset> = Subset::all(3).collect();
        let w = is_face(&p, &all).unwrap().unwrap();
        assert!(w.phi.iter().all(Zero::is_zero));
        assert!(w.verify(&p, &all));
        assert!(is_face(&p, &[s(3, ""), s(3, "12")]).unwrap().is_none());
    }

    #[test]
    fn counterexample_has_antipodal_edge() {
        let p = by_size(3, &[0, 2, 1, 0]);
        let v = [s(3, ""), s(3, "123")];
        let w = is_face(&p, &v).unwrap().unwrap();
        assert!(w.verify(&p, &v));
        assert!(long_edges(&p, 3).unwrap().contains(&(v[0], v[1])));
        let verdict = is_valuated_delta_matroid(&p).unwrap();
        assert!(!verdict.valuated);
        assert_eq!(verdict.edge(), Some((v[0], v[1])));
    }

    #[test]
    fn outside_domain_is_an_error() {
        let p = SubsetFunction::from_fn(2, |x| if x.len() == 2 { ExtRat::Inf } else { ExtRat::zero() }).unwrap();
        assert_eq!(is_face(&p, &[s(2, "12")]), Err(Error::OutsideDomain));
    }

    #[test]
    fn six_term_examples() {
        let c = check3(&by_size(3, &[0, 1, 0, 1])).unwrap();
        assert!(c.pass);
        assert!(c.terms[..4].iter().all(|t| t == &ExtRat::from(2)));
        let c = check3(&by_size(3, &[0, 2, 1, 0])).unwrap();
        assert_eq!(c.unique_min, Some(0));
        assert_eq!(c.terms[0], ExtRat::zero());
        assert!(check3(&by_size(3, &[0, 0, 0, 0])).unwrap().pass);
        assert!(check3(&by_size(4, &[0, 0, 0, 0, 0])).is_err());
        assert!(long_edges(&by_size(3, &[0, 1, 0, 1]), 3).unwrap().is_empty());
    }

    #[test]
    fn dimdr4_passes_with_two_minimisers() {
        let c = check4(&dimdr4()).unwrap();
        assert!(c.pass);
        assert_eq!(c.circuit_min, ExtRat::zero());
        assert_eq!(c.minimizers.len(), 2);
        assert!(is_valuated_delta_matroid(&dimdr4()).unwrap().valuated);
        assert!(long_edges(&dimdr4(), 3).unwrap().is_empty());
    }

    #[test]
    fn antipodal_pair_of_four_cube_fails() {
        let p = SubsetFunction::from_fn(4, |x| ExtRat::from(if x.len() % 4 == 0 { 0 } else { 100 })).unwrap();
        let c = check4(&p).unwrap();
        assert!(!c.pass);
        assert_eq!(c.minimizers.len(), 1);
        assert_eq!(c.minimizing_circuits()[0].support, vec![s(4, ""), s(4, "1234")]);
        assert!(check4(&by_size(4, &[0, 0, 0, 0, 0])).unwrap().pass);
        let v = is_valuated_delta_matroid(&p).unwrap();
        let edges = long_edges(&p, 3).unwrap();
        assert!(edges.contains(&v.edge().unwrap()));
        assert!(edges.contains(&(s(4, ""), s(4, "1234"))));
    }

    #[test]
    fn small_ground_sets_always_pass() {
        for seed in 0..10 {
            let p = SubsetFunction::random(2, seed, 5, 0.3).unwrap();
            assert!(is_valuated_delta_matroid(&p).unwrap().valuated);
            assert!(long_edges(&p, 3).unwrap().is_empty());
        }
    }

    #[test]
    fn even_zero_odd_positive_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = SubsetFunction::from_fn(6, |x| ExtRat::from(if x.len() % 2 == 0 { 0 } else { 7 })).unwrap();
        assert!(is_valuated_delta_matroid(&p).unwrap().valuated);
        let odd: Vec<i64> = (0..32).map(|_| rng.gen_range(1..9)).collect();
        let q = SubsetFunction::from_fn(5, |x| ExtRat::from(if x.len() % 2 == 0 { 0 } else { odd[x.bits as usize] })).unwrap();
        assert!(is_valuated_delta_matroid(&q).unwrap().valuated);
    }

    #[test]
    fn neg_rank_is_valuated() {
        for seed in 0..12 {
            for n in [3, 4, 5] {
                let f = random_delta_matroid(n, seed).unwrap();
                let p = delta::neg_rank_as_valuation(&f);
                assert!(is_valuated_delta_matroid(&p).unwrap().valuated, "{f:?}");
                let q = SubsetFunction::indicator_zero(&f);
                assert!(is_valuated_delta_matroid(&q).unwrap().valuated, "{f:?}");
            }
        }
    }

    #[test]
    fn exchange_failure_reported() {
        let f = BasisFamily::from_strs(4, &["", "123"]).unwrap();
        let v = is_valuated_delta_matroid(&SubsetFunction::indicator_zero(&f)).unwrap();
        assert!(matches!(v.certificate, Certificate::Exchange { .. }));
    }

    #[test]
    fn checker_matches_edge_oracle() {
        for n in [3, 4] {
            for seed in 0..60 {
                let p = SubsetFunction::random(n, seed, 3, if seed % 3 == 0 { 0.3 } else { 0.0 }).unwrap();
                let v = is_valuated_delta_matroid(&p).unwrap();
                let edges = long_edges(&p, 3).unwrap();
                assert_eq!(v.valuated, edges.is_empty(), "n={n} seed={seed}");
                if let Some(e) = v.edge() {
                    assert!(edges.contains(&e), "n={n} seed={seed} {p:?} {v:?} {edges:?}");
                }
            }
        }
    }

    #[test]
    fn zero_function_has_one_cell() {
        let p = by_size(3, &[0, 0, 0, 0]);
        for mode in [CellMode::Exhaustive, CellMode::bfs()] {
            let cells = maximal_cells(&p, mode).unwrap();
            assert_eq!(cells.len(), 1);
            assert_eq!(cells[0].vertices.len(), 8);
            assert_eq!(cells[0].dim, 3);
        }
        assert_eq!(cone_dimension(&p).unwrap(), 4);
    }

    #[test]
    fn parity_function_has_even_tetrahedron() {
        let p = by_size(3, &[0, 1, 0, 1]);
        let cells = maximal_cells(&p, CellMode::Exhaustive).unwrap();
        let tet = vec![s(3, ""), s(3, "12"), s(3, "13"), s(3, "23")];
        let mut sorted = tet.clone();
        sorted.sort();
        assert!(cells.iter().any(|c| c.vertices == sorted));
        assert_eq!(cells.len(), 5);
        assert_eq!(cells, maximal_cells(&p, CellMode::bfs()).unwrap());
    }

    #[test]
    fn cells_agree_across_modes() {
        for seed in 0..15 {
            for n in [2, 3, 4] {
                let p = SubsetFunction::random(n, seed, 4, if seed % 2 == 0 { 0.2 } else { 0.0 }).unwrap();
                let a = maximal_cells(&p, CellMode::Exhaustive).unwrap();
                let b = maximal_cells(&p, CellMode::bfs()).unwrap();
                assert_eq!(a, b, "n={n} seed={seed}");
                for c in &a {
                    let w = is_face(&p, &c.vertices).unwrap().expect("maximal cells are faces");
                    assert!(w.verify(&p, &c.vertices));
                }
            }
        }
    }

    #[test]
    fn edge_test_matches_global_face_lp() {
        for seed in 0..12 {
            let p = SubsetFunction::random(4, 500 + seed, 3, if seed % 3 == 0 { 0.25 } else { 0.0 }).unwrap();
            let dom = p.dom();
            for (i, &a) in dom.iter().enumerate() {
                for &b in &dom[i + 1..] {
                    let global = is_face(&p, &[a, b]).unwrap().is_some();
                    assert_eq!(is_edge(&p, a, b).unwrap(), global, "seed={seed} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn dimdr4_cells_and_cone() {
        let p = dimdr4();
        let cells = maximal_cells(&p, CellMode::Exhaustive).unwrap();
        let in_cell = |a: &str, b: &str| cells.iter().any(|c| c.vertices.contains(&s(4, a)) && c.vertices.contains(&s(4, b)));
        assert!(in_cell("", "12") && in_cell("", "34"));
        assert!(is_edge(&p, s(4, ""), s(4, "12")).unwrap());
        assert!(is_edge(&p, s(4, ""), s(4, "34")).unwrap());
        assert!(!is_edge(&p, s(4, ""), s(4, "1234")).unwrap());
        assert_eq!(cone_dimension(&p).unwrap(), 15);
    }

    #[test]
    fn generic_heights_give_full_cone() {
        let p = SubsetFunction::from_fn(3, |x| ExtRat::from((x.bits as i64 * x.bits as i64 * 7) % 11)).unwrap();
        let cells = maximal_cells(&p, CellMode::Exhaustive).unwrap();
        if cells.iter().all(|c| c.vertices.len() == 4) {
            assert_eq!(cone_dimension(&p).unwrap(), 8);
        }
    }

    #[test]
    fn scaling_and_linear_shift_preserve_verdict() {
        for seed in 0..20 {
            let p = SubsetFunction::random(4, seed, 3, 0.1).unwrap();
            let q = p.transform(&ratio(5, 3), &[rat(1), rat(-2), ratio(1, 2), rat(0)], &rat(7));
            assert_eq!(is_valuated_delta_matroid(&p).unwrap().valuated, is_valuated_delta_matroid(&q).unwrap().valuated);
            assert_eq!(long_edges(&p, 2).unwrap(), long_edges(&q, 2).unwrap());
        }
    }

    #[test]
    fn json_round_trip() {
        let p = SubsetFunction::from_fn(3, |x| if x.len() == 3 { ExtRat::Inf } else { ExtRat::Fin(ratio(x.len() as i64, 2)) }).unwrap();
        let j = p.to_json();
        assert_eq!(j["values"]["12"], "1");
        assert_eq!(j["values"]["123"], "inf");
        assert_eq!(SubsetFunction::from_json(&j).unwrap(), p);
        let sparse = serde_json::json!({"n": 2, "values": {"": 0, "1": "1/2"}});
        let q = SubsetFunction::from_json(&sparse).unwrap();
        assert!(q.get(s(2, "12")).is_inf());
        assert!(SubsetFunction::from_json(&serde_json::json!({"n": 2})).is_err());
    }
}
