"""
Conditional expectations on finite spaces and the section compatibility of
𝔼_{𝔠⊗𝔅}(f) with the per-section expectations 𝔼^y_𝔠(f^y).

Exceptional sets are never predicted: they are computed as the exact set of
y where an identity fails and then required to be Q-null.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .finspace import FinMeasure, InputError, SigmaAlg, sigma_generate
from .product import (
    Disintegration,
    PreconditionError,
    SkewProduct,
    contained_in_all,
    is_regular_conditional_probability,
    measurability_witness,
)
from .utils import (
    RationalLike,
    format_mask,
    format_rational,
    iter_bits,
    lowest_bit,
    parse_rational,
    union_of,
)


@dataclass(frozen=True)
class RandVar:
    """A function on the ground set that is constant on every atom of ``algebra``."""

    algebra: SigmaAlg
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(parse_rational(v) for v in self.values)
        if len(values) != self.algebra.ground.size:
            raise InputError(
                f"{len(values)} values given for {self.algebra.ground.size} points"
            )
        witness = measurability_witness(self.algebra, values)
        if witness is not None:
            raise InputError(
                f"values differ at points {witness[0]} and {witness[1]} of one atom",
                witness=witness,
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def indicator(cls, algebra: SigmaAlg, mask: int) -> "RandVar":
        return cls(algebra, tuple(Fraction(mask >> p & 1) for p in algebra.ground.points))

    @classmethod
    def constant(cls, algebra: SigmaAlg, value: RationalLike) -> "RandVar":
        return cls(algebra, (parse_rational(value),) * algebra.ground.size)

    @property
    def ground(self):
        return self.algebra.ground

    def __getitem__(self, point: int) -> Fraction:
        return self.values[point]



@dataclass(frozen=True)
class VersionPolicy:
    """
    Value given to a conditional expectation on null atoms: a fixed rational
    (default 0), or with ``inherit`` the value of f at the atom's least member.
    """

    null_atom_value: Fraction = Fraction(0)
    inherit: bool = False

    def value_on(self, atom: int, values: Sequence[Fraction]) -> Fraction:
        if self.inherit:
            return values[lowest_bit(atom)]
        return Fraction(self.null_atom_value)


DEFAULT_POLICY = VersionPolicy()


def block_average(
    values: Sequence[Fraction],
    weights: Sequence[Fraction],
    algebra: SigmaAlg,
    policy: VersionPolicy = DEFAULT_POLICY,
) -> Tuple[Fraction, ...]:
    """Weighted average of ``values`` over each atom, ``policy`` on null atoms."""
    result = [Fraction(0)] * len(values)
    for atom in algebra.atoms:
        mass = sum((weights[p] for p in iter_bits(atom)), Fraction(0))
        if mass > 0:
            value = sum((weights[p] * values[p] for p in iter_bits(atom)), Fraction(0)) / mass
        else:
            value = policy.value_on(atom, values)
        for point in iter_bits(atom):
            result[point] = value
    return tuple(result)


def cond_expect(
    f: RandVar, sub: SigmaAlg, m: FinMeasure, policy: VersionPolicy = DEFAULT_POLICY
) -> RandVar:
    """A version of 𝔼_sub(f) under m."""
    witness = measurability_witness(m.algebra, f.values)
    if witness is not None:
        raise InputError(
            f"f is not measurable: points {witness[0]} and {witness[1]} share an atom",
            witness=witness,
        )
    if not sub.coarsens(m.algebra):
        raise InputError(f"{sub} is not a sub-σ-algebra of {m.algebra}")
    return RandVar(sub, block_average(f.values, m.weights, sub, policy))


@dataclass
class SuccessorStep:
    """Intermediate objects of one step 𝔠_β → σ(𝔠_β ∪ {D})."""

    d: int
    f1: Tuple[Fraction, ...]
    f2: Tuple[Fraction, ...]
    f1y: Dict[int, Tuple[Fraction, ...]]
    f2y: Dict[int, Tuple[Fraction, ...]]
    a_sets: Dict[int, int]
    identities: Dict[str, bool]
    exceptional_y: int
    skipped: bool = False
    precondition: Optional["T1Report"] = None

    @property
    def passed(self) -> bool:
        return self.skipped or all(self.identities.values())


@dataclass
class T1Report:
    """Outcome of a section-compatibility check."""

    exceptional_y: int
    exceptional_mass: Fraction
    disagreement: Dict[int, int]
    counterexamples: List[Tuple[int, int, Fraction]]
    measurable_off_exceptional: bool
    steps: List[SuccessorStep] = field(default_factory=list)
    g: Optional[RandVar] = None

    @property
    def passed(self) -> bool:
        return (
            self.exceptional_mass == 0
            and self.measurable_off_exceptional
            and all(step.passed for step in self.steps)
        )

    def describe(self) -> str:
        lines = [
            f"exceptional_y={format_mask(self.exceptional_y)}",
            f"exceptional_mass={format_rational(self.exceptional_mass)}",
        ]
        for y, mask in sorted(self.disagreement.items()):
            lines.append(f"disagreement[{y}]={format_mask(mask)}")
        for y, c, gap in self.counterexamples:
            lines.append(f"counterexample y={y} C={format_mask(c)} gap={format_rational(gap)}")
        return "\n".join(lines)


def _product_values(r: SkewProduct, f) -> Tuple[Fraction, ...]:
    values = tuple(parse_rational(v) for v in getattr(f, "values", f))
    completed = r.complete().completed
    witness = measurability_witness(completed, values)
    if witness is not None:
        space = r.space
        raise PreconditionError(
            "f is not measurable for the completed product: "
            f"{space.format_point(witness[0])} and {space.format_point(witness[1])} "
            "share an atom",
            witness=witness,
        )
    return values


def section_algebra(dis: Disintegration, c: SigmaAlg, stage: SigmaAlg, y: int) -> SigmaAlg:
    """𝔠_{yγ} = σ(𝔠_γ ∪ 𝔠_{y0}), 𝔠_{y0} the S_y-null sets of 𝔠."""
    null_atoms = [atom for atom in c.atoms if dis[y].is_null(atom)]
    return sigma_generate(c.ground, list(stage.atoms) + null_atoms)


def t1_check(
    r: SkewProduct,
    dis: Disintegration,
    c: SigmaAlg,
    f,
    policy: VersionPolicy = DEFAULT_POLICY,
) -> T1Report:
    """
    Compare g = 𝔼_{𝔠⊗𝔅}(f) with the per-y expectations 𝔼^y_𝔠(f^y) under S_y.
    """
    if not contained_in_all(c, dis):
        raise PreconditionError(f"{c} is not contained in 𝔄 ∩ ⋂_y 𝔄_y")
    space = r.space
    values = _product_values(r, f)
    weights = r.weights
    m_alg = space.tensor(c, space.q.algebra)
    g = RandVar(m_alg, block_average(values, weights, m_alg, policy))

    exceptional = 0
    disagreement: Dict[int, int] = {}
    counterexamples: List[Tuple[int, int, Fraction]] = []
    versions: Dict[int, Tuple[Fraction, ...]] = {}
    for y in range(space.ny):
        s_y = dis[y]
        g_y = [g[space.index(x, y)] for x in range(space.nx)]
        f_y = [values[space.index(x, y)] for x in range(space.nx)]
        failed = False
        for atom in c.atoms:
            gap = s_y.integral(g_y, atom) - s_y.integral(f_y, atom)
            if gap != 0:
                failed = True
                if space.q.weights[y] > 0:
                    counterexamples.append((y, atom, gap))
        if failed:
            exceptional |= 1 << y
            continue
        version = block_average(f_y, s_y.weights, c, policy)
        versions[y] = version
        disagreement[y] = union_of(1 << x for x in range(space.nx) if version[x] != g_y[x])

    for y, mask in disagreement.items():
        if not dis[y].is_null(mask):
            counterexamples.append((y, mask, dis[y].measure(mask)))
            exceptional |= 1 << y

    measurable = True
    for b in space.q.algebra.atoms:
        ys = [y for y in iter_bits(b) if y in versions and space.q.weights[y] > 0]
        for atom in c.atoms:
            cell_values = {versions[y][x] for y in ys for x in iter_bits(atom)}
            if len(cell_values) > 1:
                measurable = False
    return T1Report(
        exceptional_y=exceptional,
        exceptional_mass=space.q.measure(exceptional),
        disagreement=disagreement,
        counterexamples=counterexamples,
        measurable_off_exceptional=measurable,
        g=g,
    )


def t5_check(
    r: SkewProduct,
    dis: Disintegration,
    c: SigmaAlg,
    f,
    policy: VersionPolicy = DEFAULT_POLICY,
) -> T1Report:
    """The regular-conditional-probability case (every 𝔄_y = 𝔄)."""
    if not is_regular_conditional_probability(dis):
        raise PreconditionError("t5_check needs 𝔄_y = 𝔄 for every y")
    return t1_check(r, dis, c, f, policy)


def _split_on(
    algebra: SigmaAlg, values: Sequence[Fraction], pieces: SigmaAlg, part: int
) -> Tuple[Fraction, ...]:
    """
    The ``algebra``-measurable function equal to ``values`` on ``part`` and to
    0 on atoms not meeting ``part``; ``values`` must be ``pieces``-measurable.
    """
    result = [Fraction(0)] * len(values)
    for atom in algebra.atoms:
        inside = atom & part
        if inside:
            value = values[lowest_bit(inside)]
            for point in iter_bits(atom):
                result[point] = value
    return tuple(result)


def _agree_on(a: Sequence[Fraction], b: Sequence[Fraction], support: int) -> bool:
    return all(a[p] == b[p] for p in iter_bits(support))


def successor_step_check(
    r: SkewProduct,
    dis: Disintegration,
    c_beta: SigmaAlg,
    d: int,
    f,
    policy: VersionPolicy = DEFAULT_POLICY,
    c: Optional[SigmaAlg] = None,
) -> T1Report:
    """
    One successor step 𝔠_β → 𝔠_γ = σ(𝔠_β ∪ {D}) of the section-compatibility
    induction: materializes f_1, f_2, f_{1y}, f_{2y} and A_y and checks each
    identity of the step exactly (mod the relevant null sets). The step starts
    from section compatibility on 𝔠_β, which is checked first and kept on the
    step as ``precondition``.

    ``c`` is the algebra whose S_y-null sets enter 𝔠_{yβ}; it defaults to 𝔠_γ.
    """
    space = r.space
    x_ground = space.p.ground
    d = x_ground.check(d, "D")
    if c_beta.is_measurable(d):
        raise PreconditionError(
            f"D={format_mask(d)} is already 𝔠_β-measurable; a successor step needs a new set",
            witness=d,
        )
    if not space.p.algebra.is_measurable(d) or not all(
        alg.is_measurable(d) for alg in dis.algebras
    ):
        raise PreconditionError(f"D={format_mask(d)} is not in 𝔄 ∩ ⋂_y 𝔄_y", witness=d)
    c_gamma = sigma_generate(x_ground, list(c_beta.atoms) + [d])
    if c is None:
        c = c_gamma
    values = _product_values(r, f)
    before = t1_check(r, dis, c_beta, values, policy)
    if not before.passed:
        raise PreconditionError(
            f"section compatibility fails on 𝔠_β, exceptional y={format_mask(before.exceptional_y)}",
            witness=before.exceptional_y,
        )
    weights = r.weights
    m_beta = space.tensor(c_beta, space.q.algebra)
    m_gamma = space.tensor(c_gamma, space.q.algebra)
    d_col = space.rect(d, space.q.ground.full)
    dc_col = space.rect(x_ground.full & ~d, space.q.ground.full)
    positive = r.measure.positive_points

    g_gamma = block_average(values, weights, m_gamma, policy)
    f1 = _split_on(m_beta, g_gamma, m_gamma, d_col)
    f2 = _split_on(m_beta, g_gamma, m_gamma, dc_col)
    chi_d = tuple(Fraction(d_col >> p & 1) for p in range(space.ground.size))
    f_on_d = tuple(v * w for v, w in zip(values, chi_d))

    identities: Dict[str, bool] = {}
    recombined = tuple(a * w + b * (1 - w) for a, b, w in zip(f1, f2, chi_d))
    identities["decomposition"] = _agree_on(g_gamma, recombined, positive)
    d_gamma_lhs = block_average(f_on_d, weights, m_gamma, policy)
    identities["pull_out_d"] = _agree_on(d_gamma_lhs, tuple(a * w for a, w in zip(f1, chi_d)), positive)
    d_beta_lhs = block_average(f_on_d, weights, m_beta, policy)
    d_beta_rhs = tuple(a * b for a, b in zip(f1, block_average(chi_d, weights, m_beta, policy)))
    identities["pull_out_beta"] = _agree_on(d_beta_lhs, d_beta_rhs, positive)

    f1y: Dict[int, Tuple[Fraction, ...]] = {}
    f2y: Dict[int, Tuple[Fraction, ...]] = {}
    a_sets: Dict[int, int] = {}
    exceptional = 0
    x_chi_d = tuple(Fraction(d >> x & 1) for x in range(space.nx))
    for label in ("section_decomposition", "section_pull_out_d", "section_pull_out_beta", "a_null", "f1_on_a", "section"):
        identities[label] = True
    for y in range(space.ny):
        s_y = dis[y]
        support = s_y.positive_points
        alg_beta = section_algebra(dis, c, c_beta, y)
        alg_gamma = section_algebra(dis, c, c_gamma, y)
        f_y = [values[space.index(x, y)] for x in range(space.nx)]
        h_gamma = block_average(f_y, s_y.weights, alg_gamma, policy)
        f1y[y] = _split_on(alg_beta, h_gamma, alg_gamma, d)
        f2y[y] = _split_on(alg_beta, h_gamma, alg_gamma, x_ground.full & ~d)
        recombined_y = tuple(
            a * w + b * (1 - w) for a, b, w in zip(f1y[y], f2y[y], x_chi_d)
        )
        fy_on_d = [v * w for v, w in zip(f_y, x_chi_d)]
        d_gamma_y = block_average(fy_on_d, s_y.weights, alg_gamma, policy)
        d_beta_y = block_average(fy_on_d, s_y.weights, alg_beta, policy)
        expect_d = block_average(x_chi_d, s_y.weights, alg_beta, policy)
        a_sets[y] = union_of(1 << x for x in range(space.nx) if expect_d[x] != 0)
        checks = {
            "section_decomposition": _agree_on(h_gamma, recombined_y, support),
            "section_pull_out_d": _agree_on(d_gamma_y, [a * w for a, w in zip(f1y[y], x_chi_d)], support),
            "section_pull_out_beta": _agree_on(d_beta_y, [a * b for a, b in zip(f1y[y], expect_d)], support),
            "a_null": s_y.measure(d & ~a_sets[y]) == 0,
        }
        for label, ok in checks.items():
            identities[label] = identities[label] and ok
        f1_section = [f1[space.index(x, y)] for x in range(space.nx)]
        g_section = [g_gamma[space.index(x, y)] for x in range(space.nx)]
        if not (
            _agree_on(f1y[y], f1_section, a_sets[y] & support)
            and _agree_on(g_section, h_gamma, support)
        ):
            exceptional |= 1 << y
    if space.q.measure(exceptional) != 0:
        identities["f1_on_a"] = False
        identities["section"] = False

    step = SuccessorStep(
        d=d, f1=f1, f2=f2, f1y=f1y, f2y=f2y, a_sets=a_sets,
        identities=identities, exceptional_y=exceptional, precondition=before,
    )
    report = t1_check(r, dis, c_gamma, values, policy)
    report.steps.append(step)
    return report


def t1_chain_check(
    r: SkewProduct,
    dis: Disintegration,
    c: SigmaAlg,
    gens: Sequence[int],
    f,
    policy: VersionPolicy = DEFAULT_POLICY,
) -> T1Report:
    """
    Run the successor steps along ``gens`` from 𝔠_1 = {∅, X} up to 𝔠,
    skipping generators that are already measurable at their stage.
    """
    x_ground = r.space.p.ground
    if sigma_generate(x_ground, gens) != c:
        raise InputError(f"generators do not generate {c}")
    stage = SigmaAlg.trivial(x_ground)
    base = t1_check(r, dis, stage, f, policy)
    steps: List[SuccessorStep] = []
    exceptional = base.exceptional_y
    for d in gens:
        if stage.is_measurable(d):
            steps.append(SuccessorStep(
                d=d, f1=(), f2=(), f1y={}, f2y={}, a_sets={},
                identities={}, exceptional_y=0, skipped=True,
            ))
            continue
        try:
            step_report = successor_step_check(r, dis, stage, d, f, policy, c=c)
        except PreconditionError as e:
            steps.append(SuccessorStep(
                d=d, f1=(), f2=(), f1y={}, f2y={}, a_sets={},
                identities={"precondition": False}, exceptional_y=e.witness or 0,
            ))
            exceptional |= e.witness or 0
        else:
            steps.extend(step_report.steps)
            exceptional |= step_report.exceptional_y
        stage = sigma_generate(x_ground, list(stage.atoms) + [d])
    final = t1_check(r, dis, c, f, policy)
    final.steps = steps
    final.exceptional_y |= exceptional
    final.exceptional_mass = r.space.q.measure(final.exceptional_y)
    return final


def martingale_path(
    chain: Sequence[SigmaAlg], m: FinMeasure, f: RandVar,
    policy: VersionPolicy = DEFAULT_POLICY,
) -> List[RandVar]:
    """𝔼_{chain[i]}(f) for each stage of an increasing chain."""
    for coarse, fine in zip(chain, chain[1:]):
        if not coarse.coarsens(fine):
            raise InputError(f"chain is not increasing: {coarse} does not coarsen {fine}")
    return [cond_expect(f, alg, m, policy) for alg in chain]


def martingale_limit_check(
    chain: Sequence[SigmaAlg], m: FinMeasure, f: RandVar,
    policy: VersionPolicy = DEFAULT_POLICY,
) -> bool:
    """
    Tower property 𝔼_i(𝔼_j(f)) = 𝔼_i(f) for i ≤ j, and the last stage equals
    𝔼_{chain[-1]}(f) m-a.e.
    """
    if not chain:
        raise InputError("martingale chain is empty")
    path = martingale_path(chain, m, f, policy)
    for i, coarse in enumerate(chain):
        for j in range(i, len(chain)):
            fine_m = m.restrict(chain[j])
            tower = cond_expect(path[j], coarse, fine_m, policy)
            if tower.values != path[i].values:
                return False
    last = cond_expect(f, chain[-1], m, policy)
    return _agree_on(path[-1].values, last.values, m.positive_points)
