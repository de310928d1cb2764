"""
Finite measurable spaces.

A σ-algebra over a finite ground set is stored as its atom partition, a set of
points as an ``int`` bitmask, and a probability measure as one exact rational
weight per point. A set is null exactly when all of its points weigh zero, so
completing a space shatters the zero-weight points into singletons and keeps
the positive part of every other atom.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .schemas import default_config
from .utils import (
    RationalLike,
    bits_of,
    format_mask,
    full_mask,
    iter_bits,
    lowest_bit,
    mask_of,
    parse_rational,
    popcount,
    union_of,
    unions_of_blocks,
)


class InputError(ValueError):
    """Raised when an operation receives data outside its domain."""

    def __init__(self, message: str, witness: object = None):
        super().__init__(message)
        self.witness = witness


ENVELOPE_MODES = ("canonical", "maximal")


@dataclass(frozen=True)
class GroundSet:
    """The points ``0..size-1`` of a finite space."""

    size: int
    cap: Optional[int] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        cap = self.cap if self.cap is not None else default_config().ground_cap
        if self.size < 1:
            raise InputError(f"a ground set needs at least one point, got {self.size}")
        if self.size > cap:
            raise InputError(f"ground set of {self.size} points exceeds the cap of {cap}")

    @property
    def full(self) -> int:
        return full_mask(self.size)

    @property
    def points(self) -> range:
        return range(self.size)

    def check(self, mask: int, what: str = "set") -> int:
        if mask < 0 or mask & ~self.full:
            raise InputError(
                f"{what} {format_mask(mask & ~self.full)} lies outside a ground set "
                f"of {self.size} points",
                witness=mask,
            )
        return mask

    def subset(self, points: Iterable[int]) -> "MSet":
        return MSet(self, mask_of(points))


@dataclass(frozen=True)
class MSet:
    """A subset of a ground set."""

    ground: GroundSet
    mask: int = 0

    def __post_init__(self):
        self.ground.check(self.mask)

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.mask)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __contains__(self, point: object) -> bool:
        return isinstance(point, int) and point >= 0 and bool(self.mask >> point & 1)

    def _other(self, other: "SetLike") -> int:
        return as_mask(self.ground, other)

    def __or__(self, other: "SetLike") -> "MSet":
        return MSet(self.ground, self.mask | self._other(other))

    def __and__(self, other: "SetLike") -> "MSet":
        return MSet(self.ground, self.mask & self._other(other))

    def __sub__(self, other: "SetLike") -> "MSet":
        return MSet(self.ground, self.mask & ~self._other(other))

    def complement(self) -> "MSet":
        return MSet(self.ground, self.ground.full & ~self.mask)

    def issubset(self, other: "SetLike") -> bool:
        return self.mask & ~self._other(other) == 0

    def members(self) -> List[int]:
        return bits_of(self.mask)

    def __str__(self) -> str:
        return format_mask(self.mask)


SetLike = Union[MSet, int, Iterable[int]]


def as_mask(ground: GroundSet, value: SetLike) -> int:
    """Normalize an MSet, a raw mask or an iterable of indices to a mask."""
    if isinstance(value, MSet):
        if value.ground.size != ground.size:
            raise InputError(
                f"set over {value.ground.size} points used in a ground set of "
                f"{ground.size} points"
            )
        return value.mask
    if isinstance(value, bool):
        raise InputError("booleans are not sets")
    if isinstance(value, int):
        return ground.check(value)
    try:
        return ground.check(mask_of(value))
    except ValueError as e:
        raise InputError(str(e))


@dataclass(frozen=True)
class SigmaAlg:
    """
    A σ-algebra given by its atoms. Atoms are kept sorted by least member, so
    two algebras with the same partition compare equal.
    """

    ground: GroundSet
    atoms: Tuple[int, ...]
    _index: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        atoms = tuple(sorted(self.atoms, key=lowest_bit_or_raise))
        seen = 0
        for atom in atoms:
            self.ground.check(atom, "atom")
            if atom & seen:
                raise InputError(
                    f"atoms overlap in {format_mask(atom & seen)}", witness=atom & seen
                )
            seen |= atom
        if seen != self.ground.full:
            missing = self.ground.full & ~seen
            raise InputError(
                f"atoms do not cover the ground set, missing {format_mask(missing)}",
                witness=missing,
            )
        index = [0] * self.ground.size
        for position, atom in enumerate(atoms):
            for point in iter_bits(atom):
                index[point] = position
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_index", tuple(index))

    @classmethod
    def from_blocks(cls, ground: GroundSet, blocks: Iterable[SetLike]) -> "SigmaAlg":
        return cls(ground, tuple(as_mask(ground, block) for block in blocks))

    @classmethod
    def discrete(cls, ground: GroundSet) -> "SigmaAlg":
        return cls(ground, tuple(1 << point for point in ground.points))

    @classmethod
    def trivial(cls, ground: GroundSet) -> "SigmaAlg":
        return cls(ground, (ground.full,))

    def __len__(self) -> int:
        return len(self.atoms)

    def atom_index(self, point: int) -> int:
        return self._index[point]

    def atom_of(self, point: int) -> int:
        return self.atoms[self._index[point]]

    def is_measurable(self, mask: int) -> bool:
        return self.cover(mask) == mask

    def cover(self, mask: int) -> int:
        """Union of the atoms meeting ``mask``."""
        result = 0
        for point in iter_bits(mask):
            if not result >> point & 1:
                result |= self.atom_of(point)
        return result

    def interior(self, mask: int) -> int:
        """Union of the atoms contained in ``mask``."""
        return union_of(atom for atom in self.atoms if atom & ~mask == 0)

    def atoms_within(self, mask: int) -> List[int]:
        return [atom for atom in self.atoms if atom & ~mask == 0]

    def atoms_meeting(self, mask: int) -> List[int]:
        return [atom for atom in self.atoms if atom & mask]

    def coarsens(self, other: "SigmaAlg") -> bool:
        """True when every set of ``self`` is a set of ``other``."""
        return self.ground.size == other.ground.size and all(
            other.is_measurable(atom) for atom in self.atoms
        )

    def join(self, other: "SigmaAlg") -> "SigmaAlg":
        return sigma_generate(self.ground, list(self.atoms) + list(other.atoms))

    def measurable_sets(self) -> Iterator[int]:
        return unions_of_blocks(self.atoms)

    def blocks(self) -> List[List[int]]:
        return [bits_of(atom) for atom in self.atoms]

    def __str__(self) -> str:
        return "{" + ",".join(format_mask(atom) for atom in self.atoms) + "}"


def lowest_bit_or_raise(atom: int) -> int:
    if atom <= 0:
        raise InputError("atoms must be non-empty")
    return lowest_bit(atom)


@dataclass(frozen=True)
class FinMeasure:
    """A probability measure on ``algebra`` given by exact point weights."""

    algebra: SigmaAlg
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        weights = tuple(parse_rational(w) for w in self.weights)
        if len(weights) != self.algebra.ground.size:
            raise InputError(
                f"{len(weights)} weights given for {self.algebra.ground.size} points"
            )
        for point, weight in enumerate(weights):
            if weight < 0:
                raise InputError(f"weight of point {point} is negative: {weight}", point)
        total = sum(weights, Fraction(0))
        if total != 1:
            raise InputError(f"weights sum to {total}, not 1")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_weights(
        cls,
        weights: Sequence[RationalLike],
        algebra: Optional[SigmaAlg] = None,
        cap: Optional[int] = None,
    ) -> "FinMeasure":
        """Measure on the discrete algebra unless ``algebra`` is given."""
        if algebra is None:
            algebra = SigmaAlg.discrete(GroundSet(len(weights), cap))
        return cls(algebra, tuple(parse_rational(w) for w in weights))

    @classmethod
    def uniform(cls, ground: GroundSet, algebra: Optional[SigmaAlg] = None) -> "FinMeasure":
        weight = Fraction(1, ground.size)
        return cls(algebra or SigmaAlg.discrete(ground), (weight,) * ground.size)

    @property
    def ground(self) -> GroundSet:
        return self.algebra.ground

    def measure(self, mask: int) -> Fraction:
        return sum((self.weights[p] for p in iter_bits(mask)), Fraction(0))

    def integral(self, values: Sequence[Fraction], mask: Optional[int] = None) -> Fraction:
        if mask is None:
            mask = self.ground.full
        return sum((self.weights[p] * values[p] for p in iter_bits(mask)), Fraction(0))

    @property
    def positive_points(self) -> int:
        return mask_of(p for p, w in enumerate(self.weights) if w > 0)

    @property
    def null_points(self) -> int:
        return self.ground.full & ~self.positive_points

    def is_null(self, mask: int) -> bool:
        return mask & self.positive_points == 0

    @property
    def positive_atoms(self) -> Tuple[int, ...]:
        return tuple(a for a in self.algebra.atoms if not self.is_null(a))

    @property
    def null_atoms(self) -> Tuple[int, ...]:
        return tuple(a for a in self.algebra.atoms if self.is_null(a))

    def positive_part(self, mask: int) -> int:
        """Union of the positive atoms contained in ``mask``."""
        return union_of(a for a in self.positive_atoms if a & ~mask == 0)

    def restrict(self, sub: SigmaAlg) -> "FinMeasure":
        """The same weights seen on a coarser algebra."""
        if not sub.coarsens(self.algebra):
            raise InputError(f"{sub} is not a sub-σ-algebra of {self.algebra}")
        return FinMeasure(sub, self.weights)

    def null_sigma(self) -> SigmaAlg:
        """σ(null sets): the null atoms plus the union of all positive atoms."""
        blocks = list(self.null_atoms)
        positive = union_of(self.positive_atoms)
        if positive:
            blocks.append(positive)
        return SigmaAlg(self.ground, tuple(blocks))


@dataclass(frozen=True)
class CompleteSpace:
    """A measure together with its completion."""

    base: FinMeasure
    completed: SigmaAlg

    def __post_init__(self):
        if not self.base.algebra.coarsens(self.completed):
            raise InputError("the completed algebra must refine the base algebra")

    @property
    def measure(self) -> FinMeasure:
        return FinMeasure(self.completed, self.base.weights)

    def is_null(self, mask: int) -> bool:
        return self.base.is_null(mask)


def sigma_generate(ground: GroundSet, sets: Iterable[SetLike]) -> SigmaAlg:
    """Coarsest partition under which every set in ``sets`` is measurable."""
    blocks = [ground.full]
    for value in sets:
        mask = as_mask(ground, value)
        refined = []
        for block in blocks:
            inside, outside = block & mask, block & ~mask
            refined.extend(part for part in (inside, outside) if part)
        blocks = refined
    return SigmaAlg(ground, tuple(blocks))


def is_measurable(alg: SigmaAlg, e: SetLike) -> bool:
    return alg.is_measurable(as_mask(alg.ground, e))


def _checked_sub(m: FinMeasure, sub: SigmaAlg) -> None:
    if not sub.coarsens(m.algebra):
        raise InputError(f"{sub} is not a sub-σ-algebra of {m.algebra}")


def inner_measure(m: FinMeasure, sub: SigmaAlg, a: SetLike) -> Fraction:
    _checked_sub(m, sub)
    return m.measure(sub.interior(as_mask(m.ground, a)))


def outer_measure(m: FinMeasure, sub: SigmaAlg, a: SetLike) -> Fraction:
    _checked_sub(m, sub)
    return m.measure(sub.cover(as_mask(m.ground, a)))


def envelope(m: FinMeasure, sub: SigmaAlg, a: SetLike, mode: str = "canonical") -> int:
    """
    A ``sub``-envelope of ``a``. ``canonical`` is the union of the atoms
    meeting ``a``; ``maximal`` also takes in every null atom of ``sub``.
    """
    if mode not in ENVELOPE_MODES:
        raise InputError(f"unknown envelope mode '{mode}', expected one of {ENVELOPE_MODES}")
    _checked_sub(m, sub)
    result = sub.cover(as_mask(m.ground, a))
    if mode == "maximal":
        result |= union_of(atom for atom in sub.atoms if m.is_null(atom))
    return result


def is_envelope(m: FinMeasure, sub: SigmaAlg, a: int, e: int) -> bool:
    """``e`` covers ``a``, is ``sub``-measurable and ``e∖a`` has inner measure 0."""
    return (
        a & ~e == 0
        and sub.is_measurable(e)
        and m.measure(sub.interior(e & ~a)) == 0
    )


def completion(m: FinMeasure) -> CompleteSpace:
    blocks = [atom & m.positive_points for atom in m.positive_atoms]
    blocks.extend(1 << point for point in iter_bits(m.null_points))
    return CompleteSpace(m, SigmaAlg(m.ground, tuple(blocks)))
