"""
Skew products R = P⊙Q on 𝔄⊗𝔅 and their disintegrations {(𝔄_y, S_y)}.

Product points are pairs (x, y) stored at index ``y * |X| + x``, so the
section E^y of a product set is a shift and a mask.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .finspace import (
    CompleteSpace,
    FinMeasure,
    GroundSet,
    InputError,
    SigmaAlg,
    completion,
)
from .schemas import default_config
from .utils import (
    RationalLike,
    bits_of,
    block_unions,
    format_mask,
    format_rational,
    full_mask,
    iter_bits,
    parse_rational,
    small_selections,
    union_of,
)


class PreconditionError(InputError):
    """A function or set handed to a check violates the check's precondition."""


@dataclass(frozen=True)
class ProductSpace:
    """(X, 𝔄, P) × (Y, 𝔅, Q) with the product algebra 𝔄⊗𝔅."""

    p: FinMeasure
    q: FinMeasure
    ground: GroundSet = field(init=False, compare=False)
    algebra: SigmaAlg = field(init=False, compare=False)

    def __post_init__(self):
        cap = default_config().product_cap
        size = self.p.ground.size * self.q.ground.size
        if size > cap:
            raise InputError(f"product of {size} pairs exceeds the cap of {cap}")
        ground = GroundSet(size, cap=cap)
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "algebra", self.tensor(self.p.algebra, self.q.algebra))

    @property
    def nx(self) -> int:
        return self.p.ground.size

    @property
    def ny(self) -> int:
        return self.q.ground.size

    @property
    def full_x(self) -> int:
        return full_mask(self.nx)

    def index(self, x: int, y: int) -> int:
        return y * self.nx + x

    def pair(self, point: int) -> Tuple[int, int]:
        return point % self.nx, point // self.nx

    def rect(self, a: int, b: int) -> int:
        """The rectangle A×B."""
        return union_of(a << (y * self.nx) for y in iter_bits(b))

    def column(self, y: int) -> int:
        return self.full_x << (y * self.nx)

    def section_y(self, e: int, y: int) -> int:
        """E^y = {x : (x, y) ∈ E}."""
        return (e >> (y * self.nx)) & self.full_x

    def section_x(self, e: int, x: int) -> int:
        """E_x = {y : (x, y) ∈ E}."""
        return union_of(1 << y for y in range(self.ny) if e >> self.index(x, y) & 1)

    def from_sections(self, sections: Sequence[int]) -> int:
        return union_of(s << (y * self.nx) for y, s in enumerate(sections))

    def tensor(self, a_alg: SigmaAlg, b_alg: SigmaAlg) -> SigmaAlg:
        """The algebra generated by rectangles of atoms of ``a_alg`` and ``b_alg``."""
        return SigmaAlg(
            self.ground, tuple(self.rect(a, b) for b in b_alg.atoms for a in a_alg.atoms)
        )

    def format_point(self, point: int) -> str:
        x, y = self.pair(point)
        return f"({x},{y})"

    def format_set(self, e: int) -> str:
        return "{" + ",".join(self.format_point(p) for p in iter_bits(e)) + "}"


@dataclass(frozen=True)
class SkewProduct:
    """
    A measure on X×Y given by pair weights. Marginal exactness is reported by
    :func:`marginal_defects` rather than enforced, so corrupted fixtures load.
    """

    space: ProductSpace
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        weights = tuple(parse_rational(w) for w in self.weights)
        if len(weights) != self.space.ground.size:
            raise InputError(
                f"{len(weights)} pair weights given for {self.space.ground.size} pairs"
            )
        for point, weight in enumerate(weights):
            if weight < 0:
                raise InputError(
                    f"weight at {self.space.format_point(point)} is negative", point
                )
        if sum(weights, Fraction(0)) != 1:
            raise InputError("pair weights must sum to 1")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_matrix(
        cls, space: ProductSpace, matrix: Sequence[Sequence[RationalLike]]
    ) -> "SkewProduct":
        """Build from a dense matrix indexed ``[x][y]``."""
        if len(matrix) != space.nx or any(len(row) != space.ny for row in matrix):
            raise InputError(f"skew product matrix must be {space.nx}×{space.ny}")
        weights = [Fraction(0)] * space.ground.size
        for x, row in enumerate(matrix):
            for y, value in enumerate(row):
                weights[space.index(x, y)] = parse_rational(value)
        return cls(space, tuple(weights))

    def matrix(self) -> List[List[Fraction]]:
        return [
            [self.weight(x, y) for y in range(self.space.ny)] for x in range(self.space.nx)
        ]

    def weight(self, x: int, y: int) -> Fraction:
        return self.weights[self.space.index(x, y)]

    @property
    def measure(self) -> FinMeasure:
        return FinMeasure(self.space.algebra, self.weights)

    def complete(self) -> CompleteSpace:
        return completion(self.measure)

    def mass(self, e: int) -> Fraction:
        return sum((self.weights[p] for p in iter_bits(e)), Fraction(0))

    def column_mass(self, y: int) -> Fraction:
        return self.mass(self.space.column(y))


@dataclass(frozen=True)
class Disintegration:
    """Per-y measures S_y on algebras 𝔄_y (``measures[y].algebra``)."""

    skew: SkewProduct
    measures: Tuple[FinMeasure, ...]

    def __post_init__(self):
        space = self.skew.space
        if len(self.measures) != space.ny:
            raise InputError(f"{len(self.measures)} section measures for {space.ny} points of Y")
        for y, measure in enumerate(self.measures):
            if measure.ground.size != space.nx:
                raise InputError(f"S_{y} lives on {measure.ground.size} points, not {space.nx}")
        object.__setattr__(self, "measures", tuple(self.measures))

    def __getitem__(self, y: int) -> FinMeasure:
        return self.measures[y]

    def __len__(self) -> int:
        return len(self.measures)

    @property
    def space(self) -> ProductSpace:
        return self.skew.space

    @property
    def algebras(self) -> Tuple[SigmaAlg, ...]:
        return tuple(m.algebra for m in self.measures)

    def q_positive(self) -> List[int]:
        return [y for y in range(self.space.ny) if self.space.q.weights[y] > 0]


def northwest_corner(
    p_weights: Sequence[Fraction],
    q_weights: Sequence[Fraction],
    x_order: Sequence[int],
    y_order: Sequence[int],
) -> List[List[Fraction]]:
    """
    North-west-corner coupling of two weight vectors visited in the given
    orders. Returns a dense ``[x][y]`` matrix with exact marginals.
    """
    matrix = [[Fraction(0)] * len(q_weights) for _ in p_weights]
    row_left = {x: Fraction(p_weights[x]) for x in x_order}
    col_left = {y: Fraction(q_weights[y]) for y in y_order}
    i = j = 0
    while i < len(x_order) and j < len(y_order):
        x, y = x_order[i], y_order[j]
        amount = min(row_left[x], col_left[y])
        matrix[x][y] += amount
        row_left[x] -= amount
        col_left[y] -= amount
        if row_left[x] == 0:
            i += 1
        else:
            j += 1
    return matrix


def skew_product_generate(
    p: FinMeasure, q: FinMeasure, seed: int, shuffle: bool = True
) -> SkewProduct:
    """
    Seeded coupling of P and Q with exact marginals.

    The north-west-corner mass of each 𝔅-atom b is spread over the points of
    b in proportion to Q, which keeps y ↦ S_y(A) constant on 𝔅-atoms.
    """
    rng = np.random.default_rng(seed)
    x_order = [int(i) for i in rng.permutation(p.ground.size)] if shuffle else list(p.ground.points)
    y_order = [int(i) for i in rng.permutation(q.ground.size)] if shuffle else list(q.ground.points)
    corner = northwest_corner(p.weights, q.weights, x_order, y_order)
    space = ProductSpace(p, q)
    matrix = [[Fraction(0)] * space.ny for _ in range(space.nx)]
    for block in q.algebra.atoms:
        ys = bits_of(block)
        block_mass = q.measure(block)
        if block_mass == 0:
            continue
        for x in range(space.nx):
            spread = sum((corner[x][y] for y in ys), Fraction(0))
            for y in ys:
                matrix[x][y] = q.weights[y] * spread / block_mass
    return SkewProduct.from_matrix(space, matrix)


def disintegrate(r: SkewProduct) -> Disintegration:
    """
    S_y(x) = R(x, y) / R(X×{y}) on columns of positive mass, S_y = P on the
    others; 𝔄_y = 𝔄.
    """
    space = r.space
    measures = []
    for y in range(space.ny):
        mass = r.column_mass(y)
        if mass > 0:
            weights = tuple(r.weight(x, y) / mass for x in range(space.nx))
            measures.append(FinMeasure(space.p.algebra, weights))
        else:
            measures.append(space.p)
    return Disintegration(r, tuple(measures))


def marginal_defects(r: SkewProduct) -> List[str]:
    """Atoms on which a marginal of R differs from P or Q."""
    space = r.space
    defects = []
    for atom in space.p.algebra.atoms:
        got, want = r.mass(space.rect(atom, space.q.ground.full)), space.p.measure(atom)
        if got != want:
            defects.append(
                f"X-marginal on {format_mask(atom)}: {format_rational(got)} != "
                f"{format_rational(want)}"
            )
    for atom in space.q.algebra.atoms:
        got, want = r.mass(space.rect(space.full_x, atom)), space.q.measure(atom)
        if got != want:
            defects.append(
                f"Y-marginal on {format_mask(atom)}: {format_rational(got)} != "
                f"{format_rational(want)}"
            )
    return defects


def check_disintegration(dis: Disintegration) -> List[str]:
    """
    Witnesses of (Dis1) and (Dis2) failures. (Dis2) is additive in A and B,
    so it is checked on pairs of atoms; (Dis1) asks S_y(A) to be constant
    over the Q-positive points of each 𝔅-atom.
    """
    space = dis.space
    q = space.q
    defects = []
    for a in space.p.algebra.atoms:
        for b in q.algebra.atoms:
            lhs = sum((q.weights[y] * dis[y].measure(a) for y in iter_bits(b)), Fraction(0))
            rhs = dis.skew.mass(space.rect(a, b))
            if lhs != rhs:
                defects.append(
                    f"Dis2 A={format_mask(a)} B={format_mask(b)}: "
                    f"{format_rational(lhs)} != {format_rational(rhs)}"
                )
            values = {dis[y].measure(a) for y in iter_bits(b) if q.weights[y] > 0}
            if len(values) > 1:
                defects.append(
                    f"Dis1 A={format_mask(a)} B={format_mask(b)}: S_y(A) takes "
                    + ", ".join(sorted(format_rational(v) for v in values))
                )
    return defects


def is_regular_conditional_probability(dis: Disintegration) -> bool:
    """True when every 𝔄_y is 𝔄 itself."""
    return all(alg == dis.space.p.algebra for alg in dis.algebras)


def _function_values(space: ProductSpace, f) -> Tuple[Fraction, ...]:
    values = getattr(f, "values", f)
    values = tuple(parse_rational(v) for v in values)
    if len(values) != space.ground.size:
        raise InputError(f"function has {len(values)} values for {space.ground.size} pairs")
    return values


def measurability_witness(
    alg: SigmaAlg, values: Sequence[Fraction]
) -> Optional[Tuple[int, int]]:
    """Two points of one atom carrying different values, or None."""
    for atom in alg.atoms:
        points = bits_of(atom)
        for point in points[1:]:
            if values[point] != values[points[0]]:
                return points[0], point
    return None


def fubini_sides(r: SkewProduct, dis: Disintegration, f) -> Tuple[Fraction, Fraction]:
    """∫ f dR and Σ_y Q({y}) Σ_x S_y({x}) f(x, y)."""
    space = r.space
    values = _function_values(space, f)
    lhs = sum((w * v for w, v in zip(r.weights, values)), Fraction(0))
    rhs = Fraction(0)
    for y in range(space.ny):
        inner = sum(
            (dis[y].weights[x] * values[space.index(x, y)] for x in range(space.nx)),
            Fraction(0),
        )
        rhs += space.q.weights[y] * inner
    return lhs, rhs


def fubini_check(r: SkewProduct, dis: Disintegration, f, completed: bool = False) -> bool:
    """
    Check the Fubini identity for ``f``. With ``completed`` the function may
    be measurable for the completion only, and the section statements hold
    too: y ↦ ∫ f^y dS_y is constant on the Q-positive points of each
    𝔅-atom, and an R-a.e. vanishing f has S_y-a.e. vanishing sections for
    Q-almost every y.
    """
    space = r.space
    values = _function_values(space, f)
    alg = r.complete().completed if completed else space.algebra
    witness = measurability_witness(alg, values)
    if witness is not None:
        first, second = witness
        raise PreconditionError(
            f"function is not measurable: {space.format_point(first)} and "
            f"{space.format_point(second)} share an atom but carry "
            f"{format_rational(values[first])} and {format_rational(values[second])}",
            witness=witness,
        )
    lhs, rhs = fubini_sides(r, dis, values)
    if lhs != rhs:
        return False
    if not completed:
        return True
    q = space.q
    for b in q.algebra.atoms:
        integrals = {
            sum(
                (dis[y].weights[x] * values[space.index(x, y)] for x in range(space.nx)),
                Fraction(0),
            )
            for y in iter_bits(b)
            if q.weights[y] > 0
        }
        if len(integrals) > 1:
            return False
    r_null = all(v == 0 for v, w in zip(values, r.weights) if w > 0)
    if r_null:
        bad = union_of(
            1 << y
            for y in range(space.ny)
            if any(
                values[space.index(x, y)] != 0
                for x in iter_bits(dis[y].positive_points)
            )
        )
        if q.measure(bad) != 0:
            return False
    return True


def _merge_null_atoms(null_atoms: List[int], seed: Optional[int]) -> List[int]:
    if not null_atoms:
        return []
    if seed is None:
        return [union_of(null_atoms)]
    rng = np.random.default_rng(seed)
    groups = int(rng.integers(1, len(null_atoms) + 1))
    labels = [int(label) for label in rng.integers(0, groups, size=len(null_atoms))]
    blocks = [
        union_of(atom for atom, label in zip(null_atoms, labels) if label == group)
        for group in range(groups)
    ]
    return [block for block in blocks if block]


def make_inner_regular_subalgebra(
    r: SkewProduct, dis: Disintegration, seed: Optional[int] = None
) -> SigmaAlg:
    """
    𝔠 ⊆ 𝔄 keeping every 𝔄-atom that is positive for P or for some S_y with
    Q({y}) > 0, and merging the remaining all-null atoms into one block (into
    seeded random groups when ``seed`` is given).
    """
    space = r.space
    charged = space.p.positive_points
    for y in dis.q_positive():
        charged |= dis[y].positive_points
    kept = [atom for atom in space.p.algebra.atoms if atom & charged]
    null_atoms = [atom for atom in space.p.algebra.atoms if not atom & charged]
    return SigmaAlg(space.p.ground, tuple(kept + _merge_null_atoms(null_atoms, seed)))


def contained_in_all(c: SigmaAlg, dis: Disintegration) -> bool:
    """𝔠 ⊆ 𝔄 ∩ ⋂_y 𝔄_y."""
    return c.coarsens(dis.space.p.algebra) and all(c.coarsens(alg) for alg in dis.algebras)


def inner_regularity_defects(
    r: SkewProduct, dis: Disintegration, c: SigmaAlg
) -> List[Tuple[int, str]]:
    """
    (A, measure name) pairs for which the largest 𝔠-set D ⊆ A leaves positive
    mass in A∖D. Every 𝔄-set is tried up to the exhaustive cap, a seeded
    sample above it.
    """
    config = default_config()
    space = r.space
    measures = [("P", space.p)] + [(f"S_{y}", dis[y]) for y in range(space.ny)]
    sets, _ = block_unions(
        space.p.algebra.atoms, config.exhaustive_cap, config.sample_count
    )
    defects = []
    for a in sets:
        inside = c.interior(a)
        for name, measure in measures:
            if measure.measure(a & ~inside) != 0:
                defects.append((a, name))
    return defects


def indicator_sets(space: ProductSpace, limit_atoms: int = 3) -> Iterator[int]:
    """Unions of at most ``limit_atoms`` atoms of 𝔄⊗𝔅."""
    return small_selections(space.algebra.atoms, limit_atoms)
