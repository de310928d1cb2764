"""
Real-valued processes Ξ(x, y) = ξ_y(x) on a skew product: equivalence,
measurability for R̂ and for R_∂, and equivalent measurable versions built
with a splitting lifting.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .densities import LowerDensity
from .finspace import InputError
from .prodlift import (
    ConsistencyError,
    NilExtension,
    NilIdeal,
    NilLifting,
    SplitLifting,
    extend_lifting_T4,
)
from .product import Disintegration, ProductSpace, SkewProduct, measurability_witness
from .schemas import default_config
from .utils import (
    RationalLike,
    format_rational,
    iter_bits,
    parse_rational,
    union_of,
)


@dataclass(frozen=True)
class Process:
    """
    Values per (x, y) pair. Sections must be 𝔄-measurable unless ``raw``;
    raw processes only get as far as a no-version verdict.
    """

    space: ProductSpace
    values: Tuple[Fraction, ...]
    raw: bool = False

    def __post_init__(self):
        values = tuple(parse_rational(v) for v in self.values)
        if len(values) != self.space.ground.size:
            raise InputError(
                f"process has {len(values)} values for {self.space.ground.size} pairs"
            )
        object.__setattr__(self, "values", values)
        if not self.raw:
            witness = self.section_witness()
            if witness is not None:
                y, first, second = witness
                raise InputError(
                    f"section ξ_{y} is not 𝔄-measurable: points {first} and {second} "
                    "share an atom but carry different values",
                    witness=witness,
                )

    @classmethod
    def from_sections(
        cls,
        space: ProductSpace,
        sections: Sequence[Sequence[RationalLike]],
        raw: bool = False,
    ) -> "Process":
        """``sections[y][x]`` is ξ_y(x)."""
        if len(sections) != space.ny:
            raise InputError(f"{len(sections)} sections given for {space.ny} points of Y")
        values: List[RationalLike] = [0] * space.ground.size
        for y, row in enumerate(sections):
            if len(row) != space.nx:
                raise InputError(f"section {y} has {len(row)} values for {space.nx} points")
            for x, value in enumerate(row):
                values[space.index(x, y)] = value
        return cls(space, tuple(values), raw)

    @classmethod
    def from_matrix(
        cls, space: ProductSpace, matrix: Sequence[Sequence[RationalLike]], raw: bool = False
    ) -> "Process":
        """``matrix[x][y]``, the layout of skew product files."""
        if len(matrix) != space.nx:
            raise InputError(f"process matrix has {len(matrix)} rows, expected {space.nx}")
        return cls.from_sections(
            space, [[matrix[x][y] for x in range(space.nx)] for y in range(space.ny)], raw
        )

    def matrix(self) -> List[List[str]]:
        return [
            [format_rational(self.values[self.space.index(x, y)]) for y in range(self.space.ny)]
            for x in range(self.space.nx)
        ]

    def section(self, y: int) -> Tuple[Fraction, ...]:
        return tuple(self.values[self.space.index(x, y)] for x in range(self.space.nx))

    def section_witness(self) -> Optional[Tuple[int, int, int]]:
        """(y, x1, x2) with x1, x2 in one 𝔄-atom and ξ_y(x1) ≠ ξ_y(x2)."""
        for y in range(self.space.ny):
            witness = measurability_witness(self.space.p.algebra, self.section(y))
            if witness is not None:
                return (y,) + witness
        return None

    @property
    def levels(self) -> List[Fraction]:
        return sorted(set(self.values))

    def level_set(self, value: Fraction) -> int:
        return union_of(1 << p for p, v in enumerate(self.values) if v == value)

    def restricted(self, omega: int) -> "Process":
        """Ξ·χ_Ω."""
        return Process(
            self.space,
            tuple(v if omega >> p & 1 else Fraction(0) for p, v in enumerate(self.values)),
            raw=True,
        )


def _same_space(first: Process, second: Process) -> None:
    if first.space != second.space:
        raise InputError("processes live on different product spaces")


def equivalent(xi: Process, theta: Process, dis: Disintegration) -> bool:
    """S_y{ξ_y ≠ θ_y} = 0 for every y, Q-null ones included."""
    _same_space(xi, theta)
    for y in range(xi.space.ny):
        differ = union_of(
            1 << x for x, (a, b) in enumerate(zip(xi.section(y), theta.section(y))) if a != b
        )
        if dis[y].measure(differ) != 0:
            return False
    return True


def is_measurable_process(xi: Process, r: SkewProduct) -> bool:
    return measurability_witness(r.complete().completed, xi.values) is None


@dataclass(frozen=True)
class Obstruction:
    """A cell of 𝔄⊗𝔅 whose non-nil points carry different values."""

    cell: int
    values: Tuple[Fraction, ...]
    mismatch: int
    mass: Fraction

    def describe(self, space: ProductSpace) -> str:
        values = ", ".join(format_rational(v) for v in self.values)
        return (
            f"cell {space.format_set(self.cell)} carries values {{{values}}}; "
            f"every constant leaves y-mass ≥ {format_rational(self.mass)} mismatched"
        )


def nil_obstruction(
    xi: Process, r: SkewProduct, dis: Disintegration
) -> Optional[Obstruction]:
    space = r.space
    extension = NilExtension.build(r, dis)
    for cell, charged in zip(extension.cells, extension.charged):
        values = sorted({xi.values[p] for p in iter_bits(charged)})
        if len(values) <= 1:
            continue
        best: Optional[Tuple[int, Fraction]] = None
        for value in values:
            rows = union_of(
                1 << space.pair(p)[1] for p in iter_bits(charged) if xi.values[p] != value
            )
            mass = space.q.measure(rows)
            if best is None or mass < best[1]:
                best = (rows, mass)
        return Obstruction(cell, tuple(values), best[0], best[1])
    return None


def is_nil_measurable(xi: Process, r: SkewProduct, dis: Disintegration) -> bool:
    """
    Measurability for R_∂: on every cell of 𝔄⊗𝔅 the values at points with
    Q(y) > 0 and S_y(x) > 0 coincide. Raw processes with a non-measurable
    section are rejected outright.
    """
    if xi.section_witness() is not None:
        return False
    return nil_obstruction(xi, r, dis) is None


@dataclass(frozen=True)
class SearchVerdict:
    nil_measurable: Optional[bool]
    least_mass: Optional[Fraction]
    tried: int
    exhaustive: bool


def nil_measurability_search(
    xi: Process, r: SkewProduct, dis: Disintegration, limit: Optional[int] = None
) -> SearchVerdict:
    """
    Try every 𝔄⊗𝔅-measurable W with values among those of Ξ and keep the
    least Q-mass of the exceptional rows of {Ξ ≠ W}.
    """
    space = r.space
    limit = limit or default_config().oracle_limit
    cells = space.algebra.atoms
    levels = xi.levels
    if len(levels) ** len(cells) > limit:
        return SearchVerdict(None, None, 0, False)
    ideal = NilIdeal(r, dis)
    least: Optional[Fraction] = None
    tried = 0
    for choice in itertools.product(levels, repeat=len(cells)):
        tried += 1
        w = [Fraction(0)] * space.ground.size
        for cell, value in zip(cells, choice):
            for p in iter_bits(cell):
                w[p] = value
        differ = union_of(1 << p for p, (a, b) in enumerate(zip(xi.values, w)) if a != b)
        mass = space.q.measure(ideal.witness(differ))
        if least is None or mass < least:
            least = mass
    return SearchVerdict(least == 0, least, tried, True)


def lift_function(lifting: LowerDensity, values: Sequence[Fraction]) -> Optional[Tuple[Fraction, ...]]:
    """
    σ(f) for a simple f through the classes: σ(f)(x) is the common value of f
    on x's class. None when f is not constant on some class.
    """
    result = []
    for x in lifting.ground.points:
        seen = {values[s] for s in iter_bits(lifting.class_of(x))}
        if len(seen) != 1:
            return None
        result.append(seen.pop())
    return tuple(result)


def lift_process(xi: Process, lifting: NilLifting) -> Process:
    """π(Ξ) = Σ_v v·χ_{π({Ξ = v})}; the result may have non-𝔄-measurable sections."""
    space = xi.space
    values: List[Optional[Fraction]] = [None] * space.ground.size
    for level in xi.levels:
        for p in iter_bits(lifting(xi.level_set(level))):
            if values[p] is not None:
                raise ConsistencyError(
                    f"lifted level sets overlap at {space.format_point(p)}", witness=p
                )
            values[p] = level
    missing = [p for p, v in enumerate(values) if v is None]
    if missing:
        raise ConsistencyError(
            f"lifted level sets miss {space.format_point(missing[0])}", witness=missing[0]
        )
    return Process(space, tuple(values), raw=True)


def level_set_consistency(
    xi: Process, theta: Process, r: SkewProduct, dis: Disintegration
) -> List[Tuple[Fraction, Fraction]]:
    """Level intervals [a, b] whose preimages under Ξ and Θ differ by a non-nil set."""
    _same_space(xi, theta)
    ideal = NilIdeal(r, dis)
    levels = sorted(set(xi.values) | set(theta.values))
    failures = []
    for i, low in enumerate(levels):
        for high in levels[i:]:
            first = union_of(1 << p for p, v in enumerate(xi.values) if low <= v <= high)
            second = union_of(1 << p for p, v in enumerate(theta.values) if low <= v <= high)
            if not ideal.contains(first ^ second):
                failures.append((low, high))
    return failures


@dataclass
class ModificationReport:
    has_version: bool
    theta: Optional[Process] = None
    obstruction: Optional[Obstruction] = None
    section_witness: Optional[Tuple[int, int, int]] = None
    pieces: Tuple[int, ...] = ()
    exceptional: Tuple[int, ...] = ()
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "has-version" if self.has_version else "no-version"

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def describe(self, space: ProductSpace) -> List[str]:
        lines = [f"verdict={self.verdict}"]
        if self.section_witness is not None:
            y, first, second = self.section_witness
            lines.append(f"section ξ_{y} separates points {first} and {second} of one 𝔄-atom")
        if self.obstruction is not None:
            lines.append(self.obstruction.describe(space))
        for n, (omega, rows) in enumerate(zip(self.pieces, self.exceptional), start=1):
            lines.append(f"Ω_{n}={space.format_set(omega)} N_{n}={rows:b}")
        lines.extend(f"{name}={'pass' if ok else 'fail'}" for name, ok in self.checks.items())
        return lines


def _pieces(xi: Process, split_pieces: int) -> List[int]:
    full = xi.space.ground.full
    if split_pieces == 1:
        return [full]
    if split_pieces != 2:
        raise InputError(f"only 1 or 2 pieces are supported, got {split_pieces}")
    levels = xi.levels
    threshold = levels[(len(levels) - 1) // 2]
    lower = union_of(1 << p for p, v in enumerate(xi.values) if v <= threshold)
    return [lower, full & ~lower]


def measurable_version(
    xi: Process,
    split: SplitLifting,
    r: SkewProduct,
    dis: Disintegration,
    pieces: int = 1,
) -> ModificationReport:
    """
    An R̂-measurable Θ equivalent to Ξ, or the reason none exists. Each
    piece Ω_n gets θ_y := σ_y([π(Ξ_n)]^y) off its exceptional rows N_n and
    θ_y := ξ_y·χ_{[π(Ω_n)]^y} on them; the pieces are glued on π(Ω_n).
    """
    space = xi.space
    if split.space != space or r.space != space or dis.space != space:
        raise InputError("the process, the lifting and the disintegration disagree on X×Y")
    witness = xi.section_witness()
    if witness is not None:
        return ModificationReport(False, section_witness=witness)
    obstruction = nil_obstruction(xi, r, dis)
    if obstruction is not None:
        return ModificationReport(False, obstruction=obstruction)

    lifting = extend_lifting_T4(split, NilExtension.build(r, dis))
    omegas = _pieces(xi, pieces)
    images = [lifting(omega) for omega in omegas]
    rows_by_piece: List[Dict[int, Tuple[Fraction, ...]]] = []
    exceptional = []
    for omega, image in zip(omegas, images):
        part = xi.restricted(omega)
        lifted = lift_process(part, lifting)
        rows: Dict[int, Tuple[Fraction, ...]] = {}
        bad = 0
        for y in range(space.ny):
            upper = lifted.section(y)
            theta_y = None
            if all(upper[x] == part.section(y)[x] for x in iter_bits(dis[y].positive_points)):
                theta_y = lift_function(split.sigmas[y], upper)
            if theta_y is None:
                bad |= 1 << y
                inside = space.section_y(image, y)
                theta_y = tuple(
                    v if inside >> x & 1 else Fraction(0) for x, v in enumerate(xi.section(y))
                )
            rows[y] = theta_y
        rows_by_piece.append(rows)
        exceptional.append(bad)

    all_bad = union_of(exceptional)
    values = []
    for p in space.ground.points:
        x, y = space.pair(p)
        owner = next((n for n, image in enumerate(images) if image >> p & 1), None)
        if all_bad >> y & 1 or owner is None:
            values.append(xi.values[p])
        else:
            values.append(rows_by_piece[owner][y][x])
    theta = Process(space, tuple(values), raw=True)
    checks = {
        "exceptional_null": space.q.measure(all_bad) == 0,
        "sections_measurable": theta.section_witness() is None,
        "measurable": is_measurable_process(theta, r),
        "equivalent": equivalent(xi, theta, dis),
    }
    if checks["sections_measurable"]:
        theta = Process(space, theta.values)
    differ = union_of(1 << p for p, (a, b) in enumerate(zip(xi.values, theta.values)) if a != b)
    checks["difference_nil"] = NilIdeal(r, dis).contains(differ)
    checks["level_sets"] = not level_set_consistency(xi, theta, r, dis)
    return ModificationReport(
        True,
        theta=theta,
        pieces=tuple(omegas),
        exceptional=tuple(exceptional),
        checks=checks,
    )
