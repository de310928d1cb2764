"""
Seeded random instances for the workbench.

The InstanceGenerator draws P and Q with optional zero weights, coarsens 𝔄
and 𝔅 below the power set, couples them into a skew product, and picks the
sub-σ-algebra 𝔠 with a generator list. Every draw comes from one numpy
generator seeded with ``InstanceSpec.seed``, so an instance is reproducible
from its spec alone.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from .densities import EquiAdmissibleFamily, GeneratorSequence, equi_admissible_family
from .finspace import FinMeasure, GroundSet, SigmaAlg
from .process import Process
from .product import (
    Disintegration,
    ProductSpace,
    SkewProduct,
    disintegrate,
    make_inner_regular_subalgebra,
    skew_product_generate,
)
from .schemas import InstanceSpec, WorkbenchConfig, default_config
from .utils import iter_bits, union_of

PROCESS_KINDS = ("cell", "nil", "free", "raw")


@dataclass
class Instance:
    """A skew product with its disintegration, 𝔠 and the generators of 𝔠."""

    skew: SkewProduct
    dis: Disintegration
    c: SigmaAlg
    gens: GeneratorSequence
    spec: Optional[InstanceSpec] = None
    process: Optional[Process] = None
    name: str = "instance"
    _families: Dict[str, EquiAdmissibleFamily] = field(
        default_factory=dict, repr=False, compare=False
    )

    @property
    def space(self) -> ProductSpace:
        return self.skew.space

    def family(self, envelope_mode: str = "canonical") -> EquiAdmissibleFamily:
        if envelope_mode not in self._families:
            self._families[envelope_mode] = equi_admissible_family(
                self.dis, self.c, self.gens, envelope_mode
            )
        return self._families[envelope_mode]


class InstanceGenerator:
    """Builds instances from InstanceSpec parameters."""

    def __init__(self, config: Optional[WorkbenchConfig] = None):
        self.config = config or default_config()

    @staticmethod
    def _weights(rng: np.random.Generator, size: int, null_rate: float) -> Tuple[Fraction, ...]:
        raw = [int(v) for v in rng.integers(1, 6, size=size)]
        zeroed = rng.random(size) < null_rate
        keep = int(rng.integers(0, size))
        for i in range(size):
            if zeroed[i] and i != keep:
                raw[i] = 0
        total = sum(raw)
        return tuple(Fraction(v, total) for v in raw)

    @staticmethod
    def _blocks(
        rng: np.random.Generator,
        size: int,
        rate: float,
        separate: Optional[List[bool]] = None,
    ) -> List[int]:
        """Contiguous blocks; point i joins the block of i-1 with probability ``rate``
        unless ``separate`` marks either of them."""
        blocks = [1]
        for i in range(1, size):
            joined = rng.random() < rate
            if separate is not None and (separate[i] or separate[i - 1]):
                joined = False
            if joined:
                blocks[-1] |= 1 << i
            else:
                blocks.append(1 << i)
        return blocks

    def generate(self, spec: Union[InstanceSpec, Dict[str, Any]]) -> Instance:
        """
        Draw an instance.

        Q-null points of Y stay singleton 𝔅-atoms, so every 𝔅-atom is either
        Q-null or free of Q-null points.
        """
        if isinstance(spec, dict):
            spec = InstanceSpec(**spec)
        rng = np.random.default_rng(spec.seed)
        p_weights = self._weights(rng, spec.size_x, spec.null_rate)
        q_weights = self._weights(rng, spec.size_y, spec.null_rate)
        x_ground = GroundSet(spec.size_x, cap=self.config.ground_cap)
        y_ground = GroundSet(spec.size_y, cap=self.config.ground_cap)
        a_alg = SigmaAlg.from_blocks(
            x_ground, self._blocks(rng, spec.size_x, spec.coarse_a_rate)
        )
        b_alg = SigmaAlg.from_blocks(
            y_ground,
            self._blocks(rng, spec.size_y, spec.coarse_b_rate, [w == 0 for w in q_weights]),
        )
        p = FinMeasure(a_alg, p_weights)
        q = FinMeasure(b_alg, q_weights)
        r = skew_product_generate(p, q, spec.seed)
        dis = disintegrate(r)
        c = make_inner_regular_subalgebra(r, dis, spec.seed)
        gens = self._generators(rng, c, spec.gens_length)
        return Instance(r, dis, c, gens, spec=spec, name=f"seed-{spec.seed}")

    @staticmethod
    def _generators(
        rng: np.random.Generator, c: SigmaAlg, length: Optional[int]
    ) -> GeneratorSequence:
        """``length`` random unions of 𝔠-atoms followed by the atoms themselves."""
        extra = []
        for _ in range(length or 0):
            picks = rng.integers(0, 2, size=len(c.atoms))
            extra.append(union_of(a for a, pick in zip(c.atoms, picks) if pick))
        return GeneratorSequence(tuple(extra) + GeneratorSequence.from_algebra(c).sets)

    def process(self, instance: Instance, kind: str = "cell", seed: int = 0) -> Process:
        """
        A random process on ``instance``.

        ``cell`` is constant on the cells of 𝔄⊗𝔅, ``nil`` changes such a
        process on nil (𝔄-atom, y) blocks, ``free`` draws every (𝔄-atom, y)
        block independently, ``raw`` draws every point.
        """
        if kind not in PROCESS_KINDS:
            raise ValueError(f"unknown process kind '{kind}', expected one of {PROCESS_KINDS}")
        space = instance.space
        rng = np.random.default_rng(seed)
        if kind == "raw":
            values = [int(v) for v in rng.integers(0, 3, size=space.ground.size)]
            return Process(space, tuple(values), raw=True)
        q = space.q
        cell_value = {
            (a, b): int(rng.integers(0, 3))
            for a in space.p.algebra.atoms
            for b in q.algebra.atoms
        }
        values: List[int] = [0] * space.ground.size
        for y in range(space.ny):
            b = q.algebra.atom_of(y)
            for a in space.p.algebra.atoms:
                value = cell_value[(a, b)]
                charged = q.weights[y] > 0 and instance.dis[y].measure(a) > 0
                if kind == "free" or (kind == "nil" and not charged):
                    value = int(rng.integers(0, 3))
                for x in iter_bits(a):
                    values[space.index(x, y)] = value
        return Process(space, tuple(values))
