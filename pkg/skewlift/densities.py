"""
Lower densities and liftings on finite spaces.

A density is stored as one class G_x per point: a union of positive atoms of
the domain algebra, constant on atoms, equal to the point's own atom when that
atom is positive. Then δ(E) = {x : G_x ∖ E is null}, which makes the density
axioms hold by construction; the set-function view is still what the
validators enumerate. A lifting is a density whose classes are single atoms.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import (
    Callable,
    Dict,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from .condexp import block_average
from .finspace import (
    CompleteSpace,
    FinMeasure,
    InputError,
    SetLike,
    MSet,
    SigmaAlg,
    as_mask,
    envelope,
    is_envelope,
    sigma_generate,
)
from .product import Disintegration, contained_in_all
from .utils import bits_of, format_mask, iter_bits, lowest_bit, union_of


class DensityPreconditionError(InputError):
    """Raised when a density construction is applied outside its hypotheses."""


LIFT_MODES = ("lowest", "highest")


@dataclass(frozen=True)
class LowerDensity:
    """A lower density on ``measure.algebra`` in class form."""

    measure: FinMeasure
    classes: Tuple[int, ...]

    def __post_init__(self):
        classes = tuple(self.classes)
        m = self.measure
        if len(classes) != m.ground.size:
            raise InputError(f"{len(classes)} classes given for {m.ground.size} points")
        positive_atoms = set(m.positive_atoms)
        for x, cls in enumerate(classes):
            if cls == 0 or m.positive_part(cls) != cls:
                raise InputError(
                    f"class of point {x} ({format_mask(cls)}) is not a non-empty union "
                    "of positive atoms",
                    witness=x,
                )
        for atom in m.algebra.atoms:
            first = lowest_bit(atom)
            if any(classes[p] != classes[first] for p in iter_bits(atom)):
                raise InputError(
                    f"classes are not constant on the atom {format_mask(atom)}", witness=atom
                )
            if atom in positive_atoms and classes[first] != atom:
                raise InputError(
                    f"positive atom {format_mask(atom)} must be its own class", witness=atom
                )
        object.__setattr__(self, "classes", classes)

    @property
    def algebra(self) -> SigmaAlg:
        return self.measure.algebra

    @property
    def ground(self):
        return self.measure.ground

    def __call__(self, e: int) -> int:
        positive = self.measure.positive_points
        return union_of(
            1 << x for x, cls in enumerate(self.classes) if cls & ~e & positive == 0
        )

    def apply(self, e: SetLike) -> MSet:
        return MSet(self.ground, self(as_mask(self.ground, e)))

    def class_of(self, x: int) -> int:
        return self.classes[x]

    def class_atoms(self, x: int) -> List[int]:
        return self.algebra.atoms_within(self.classes[x])

    @property
    def is_lifting(self) -> bool:
        atoms = set(self.measure.positive_atoms)
        return all(cls in atoms for cls in self.classes)

    @classmethod
    def from_set_function(
        cls, measure: FinMeasure, fn: Callable[[int], int]
    ) -> "LowerDensity":
        """
        Recover the classes of a density given as a set function: G_x is the
        least measurable set E (up to null atoms) with x ∈ fn(E).
        """
        positive_atoms = measure.positive_atoms
        classes = []
        for x in measure.ground.points:
            current = union_of(positive_atoms)
            for atom in positive_atoms:
                if fn(current & ~atom) >> x & 1:
                    current &= ~atom
            classes.append(current)
        return cls(measure, tuple(classes))


@dataclass(frozen=True)
class Lifting(LowerDensity):
    """A density whose every class is a single positive atom."""

    def __post_init__(self):
        super().__post_init__()
        atoms = set(self.measure.positive_atoms)
        for x, cls in enumerate(self.classes):
            if cls not in atoms:
                raise InputError(
                    f"class of point {x} ({format_mask(cls)}) is not a single atom",
                    witness=x,
                )


@dataclass(frozen=True)
class GeneratorSequence:
    """Ordered generators M_1, …, M_k with flags for the ones skipped as redundant."""

    sets: Tuple[int, ...]
    skipped: Tuple[bool, ...] = ()

    def __post_init__(self):
        sets = tuple(self.sets)
        skipped = tuple(self.skipped) or (False,) * len(sets)
        if len(skipped) != len(sets):
            raise InputError("one skip flag per generator is required")
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "skipped", skipped)

    def __iter__(self) -> Iterator[int]:
        return iter(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    @property
    def retained(self) -> List[int]:
        return [s for s, skip in zip(self.sets, self.skipped) if not skip]

    @classmethod
    def of(cls, gens: Union["GeneratorSequence", Sequence[int]]) -> "GeneratorSequence":
        if isinstance(gens, GeneratorSequence):
            return gens
        return cls(tuple(gens))

    @classmethod
    def from_algebra(cls, alg: SigmaAlg) -> "GeneratorSequence":
        """All atoms but the last: the shortest obvious generator list."""
        return cls(tuple(alg.atoms[:-1]))


@dataclass(frozen=True)
class StageRecord:
    """One stage of an admissible construction."""

    index: int
    generator: Optional[int]
    skipped: bool
    density: LowerDensity
    envelopes: Optional[Tuple[int, int]] = None
    changed: Tuple[Tuple[int, int, int], ...] = ()

    @property
    def algebra(self) -> SigmaAlg:
        return self.density.algebra


@dataclass
class ChainState:
    """The full trace of an admissible construction."""

    measure: FinMeasure
    envelope_mode: str
    stages: List[StageRecord] = field(default_factory=list)

    @property
    def index(self) -> int:
        return len(self.stages) - 1

    @property
    def current(self) -> LowerDensity:
        return self.stages[-1].density

    @property
    def algebra(self) -> SigmaAlg:
        return self.current.algebra

    @property
    def generators(self) -> GeneratorSequence:
        records = [s for s in self.stages if s.generator is not None]
        return GeneratorSequence(
            tuple(s.generator for s in records), tuple(s.skipped for s in records)
        )

    def densities(self) -> List[LowerDensity]:
        """Stage densities of the retained steps, stage 0 first."""
        return [s.density for s in self.stages if not s.skipped]

    def trace_lines(self) -> List[str]:
        lines = []
        for stage in self.stages:
            head = f"stage={stage.index}"
            if stage.generator is not None:
                head += f" generator={format_mask(stage.generator)}"
            if stage.skipped:
                lines.append(head + " skipped=redundant")
                continue
            if stage.envelopes is not None:
                head += (
                    f" M1={format_mask(stage.envelopes[0])}"
                    f" M2={format_mask(stage.envelopes[1])}"
                )
            head += f" algebra={stage.algebra}"
            lines.append(head)
            for x, old, new in stage.changed:
                lines.append(f"  G_{x}: {format_mask(old)} -> {format_mask(new)}")
        return lines


def _measure_of(space: Union[FinMeasure, CompleteSpace]) -> FinMeasure:
    return space.measure if isinstance(space, CompleteSpace) else space


def initial_density(space: Union[FinMeasure, CompleteSpace]) -> LowerDensity:
    """τ_0 on σ(null sets): ∅ on null sets, everything on the others."""
    m = _measure_of(space)
    m0 = FinMeasure(m.null_sigma(), m.weights)
    positive = union_of(m0.positive_atoms)
    return LowerDensity(m0, (positive,) * m.ground.size)


def extend_density_L3(delta: LowerDensity, m: int, m1: int, m2: int) -> LowerDensity:
    """
    Extend ``delta`` from 𝔠 to σ(𝔠 ∪ {M}) given 𝔠-envelopes M1 ⊇ M and
    M2 ⊇ M^c. Needs every null atom of σ(𝔠 ∪ {M}) to be an atom of 𝔠.
    """
    t = delta.measure
    c = t.algebra
    ground = t.ground
    m = ground.check(m, "M")
    complement = ground.full & ~m
    d_alg = sigma_generate(ground, list(c.atoms) + [m])
    c_atoms = set(c.atoms)
    for atom in d_alg.atoms:
        if t.is_null(atom) and atom not in c_atoms:
            raise DensityPreconditionError(
                f"the null set {format_mask(atom)} of σ(𝔠 ∪ {{M}}) is not in 𝔠; "
                "without every null set in 𝔠 the formula stops being invariant "
                "under null modifications (a set equal to Z a.e. can be sent to "
                "a strictly smaller set)",
                witness=atom,
            )
    if not is_envelope(t, c, m, m1):
        raise InputError(f"M1={format_mask(m1)} is not a 𝔠-envelope of M={format_mask(m)}")
    if not is_envelope(t, c, complement, m2):
        raise InputError(f"M2={format_mask(m2)} is not a 𝔠-envelope of M^c")
    if c.is_measurable(m):
        return delta
    extended = FinMeasure(d_alg, t.weights)
    classes = []
    for x, g in enumerate(delta.classes):
        if m >> x & 1:
            raw = (g & m) | (g & ~m1)
        else:
            raw = (g & complement) | (g & ~m2)
        classes.append(extended.positive_part(raw))
    return LowerDensity(extended, tuple(classes))


def l3_formula(delta: LowerDensity, m: int, m1: int, m2: int, g: int, h: int) -> int:
    """
    The extension formula evaluated literally for the representation
    (G ∩ M) ∪ (H ∩ M^c) with G, H in the domain of ``delta``.
    """
    full = delta.ground.full
    mc, m1c, m2c = full & ~m, full & ~m1, full & ~m2
    first = m & delta((g & m1) | (h & m1c))
    second = mc & delta((h & m2) | (g & m2c))
    return first | second


def limit_density_e20(
    stages: Sequence[LowerDensity], m: FinMeasure, b: int
) -> int:
    """
    Evaluate the countable-cofinality limit formula over a finite list of
    stage densities. k runs far enough that every level set {𝔼_m(χ_B) >
    1 − 1/k} has stabilised to {𝔼_m(χ_B) = 1}.
    """
    if not stages:
        raise InputError("the limit formula needs at least one stage")
    for coarse, fine in zip(stages, stages[1:]):
        if not coarse.algebra.coarsens(fine.algebra):
            raise InputError(f"stages are not increasing at {coarse.algebra} -> {fine.algebra}")
    for stage in stages:
        if stage.measure.weights != m.weights:
            raise InputError("stage densities must share the weights of m")
    b = m.ground.check(b, "B")
    if not stages[-1].algebra.is_measurable(b):
        raise InputError(f"B={format_mask(b)} is not measurable at the last stage")
    chi = [Fraction(b >> p & 1) for p in m.ground.points]
    expectations = [block_average(chi, m.weights, s.algebra) for s in stages]
    k_max = 1
    for values in expectations:
        for v in values:
            if v < 1:
                k_max = max(k_max, ceil(1 / (1 - v)) + 1)
    result = m.ground.full
    for k in range(1, k_max + 1):
        threshold = 1 - Fraction(1, k)
        union = 0
        for n in range(len(stages)):
            tail = m.ground.full
            for j in range(n, len(stages)):
                level = union_of(
                    1 << p for p, v in enumerate(expectations[j]) if v > threshold
                )
                tail &= stages[j](level)
            union |= tail
        result &= union
    return result


EnvelopeRule = Callable[[int, FinMeasure, int], Tuple[int, int]]


def _mode_rule(mode: str) -> EnvelopeRule:
    def rule(stage: int, stage_measure: FinMeasure, m: int) -> Tuple[int, int]:
        alg = stage_measure.algebra
        complement = stage_measure.ground.full & ~m
        return (
            envelope(stage_measure, alg, m, mode),
            envelope(stage_measure, alg, complement, mode),
        )

    return rule


def _run_chain(
    m: FinMeasure,
    gens: GeneratorSequence,
    rule: EnvelopeRule,
    envelope_mode: str,
    skip_redundant: bool,
) -> ChainState:
    state = ChainState(measure=m, envelope_mode=envelope_mode)
    tau = initial_density(m)
    state.stages.append(StageRecord(index=0, generator=None, skipped=False, density=tau))
    for position, gen in enumerate(gens, start=1):
        if not m.algebra.is_measurable(gen):
            raise InputError(f"generator {format_mask(gen)} is not in the target algebra")
        if skip_redundant and tau.algebra.is_measurable(gen):
            state.stages.append(StageRecord(
                index=position, generator=gen, skipped=True, density=tau
            ))
            continue
        m1, m2 = rule(position, tau.measure, gen)
        extended = extend_density_L3(tau, gen, m1, m2)
        changed = tuple(
            (x, old, new)
            for x, (old, new) in enumerate(zip(tau.classes, extended.classes))
            if old != new
        )
        tau = extended
        state.stages.append(StageRecord(
            index=position, generator=gen, skipped=False, density=tau,
            envelopes=(m1, m2), changed=changed,
        ))
    if tau.algebra != m.algebra:
        raise InputError(
            f"generators reach {tau.algebra}, not the target algebra {m.algebra}"
        )
    return state


def build_admissible(
    space: Union[FinMeasure, CompleteSpace],
    gens: Union[GeneratorSequence, Sequence[int]],
    envelope_mode: str = "canonical",
) -> Tuple[LowerDensity, ChainState]:
    """
    Admissible density on ``space`` along ``gens``: τ_0 on σ(null sets), then
    one L3 extension per generator that is new at its stage. An empty
    generator list returns τ_0.
    """
    m = _measure_of(space)
    sequence = GeneratorSequence.of(gens)
    if len(sequence) == 0:
        tau = initial_density(m)
        state = ChainState(measure=m, envelope_mode=envelope_mode)
        state.stages.append(StageRecord(index=0, generator=None, skipped=False, density=tau))
        return tau, state
    state = _run_chain(m, sequence, _mode_rule(envelope_mode), envelope_mode, True)
    return state.current, state


def lift_from_density(delta: LowerDensity, mode: str = "lowest") -> Lifting:
    """Pick one atom out of every class: the lowest-index one, or the highest."""
    if mode not in LIFT_MODES:
        raise InputError(f"unknown lift mode '{mode}', expected one of {LIFT_MODES}")
    classes = []
    for x in delta.ground.points:
        atoms = delta.class_atoms(x)
        classes.append(atoms[0] if mode == "lowest" else atoms[-1])
    return Lifting(delta.measure, tuple(classes))


def is_admissibly_generated(lifting: LowerDensity, density: LowerDensity) -> bool:
    """δ(A) ⊆ π(A) for every measurable A, i.e. every π-class sits in the δ-class."""
    if lifting.algebra != density.algebra:
        return False
    return all(p & ~d == 0 for p, d in zip(lifting.classes, density.classes))


@dataclass
class EquiAdmissibleFamily(Mapping[int, LowerDensity]):
    """τ_y for every y, built along one generator list of 𝔠."""

    c: SigmaAlg
    gens: GeneratorSequence
    envelope_mode: str
    chains: Tuple[ChainState, ...]
    w_envelopes: Tuple[Tuple[int, int], ...]

    def __getitem__(self, y: int) -> LowerDensity:
        if not isinstance(y, int) or not 0 <= y < len(self.chains):
            raise KeyError(y)
        return self.chains[y].current

    def __iter__(self) -> Iterator[int]:
        return iter(range(len(self.chains)))

    def __len__(self) -> int:
        return len(self.chains)

    def stage(self, y: int, index: int) -> LowerDensity:
        """τ_{y,index}; index 0 is σ(𝔠_{y0})."""
        return self.chains[y].stages[index].density

    @property
    def stage_count(self) -> int:
        return len(self.gens) + 1

    def stage_algebra(self, index: int) -> SigmaAlg:
        """𝔠_index = σ(M_1, …, M_{index}) without null sets."""
        return sigma_generate(self.c.ground, self.gens.sets[:index])


def equi_admissible_family(
    dis: Disintegration,
    c: SigmaAlg,
    gens: Union[GeneratorSequence, Sequence[int]],
    envelope_mode: str = "canonical",
) -> EquiAdmissibleFamily:
    """
    For each y an admissible τ_y on 𝔠 under S_y along the same generators.
    Stage envelopes V_{1y}, V_{2y} are cut down to the sections of the
    product envelopes W_1 = E(M)×Y, W_2 = E(M^c)×Y over 𝔠_β.
    """
    if not contained_in_all(c, dis):
        raise InputError(f"{c} is not contained in 𝔄 ∩ ⋂_y 𝔄_y")
    sequence = GeneratorSequence.of(gens)
    if sigma_generate(c.ground, sequence.sets) != c:
        raise InputError(f"generators do not generate {c}")
    full = c.ground.full
    w_envelopes = []
    for position, gen in enumerate(sequence, start=1):
        stage_alg = sigma_generate(c.ground, sequence.sets[:position - 1])
        w_envelopes.append((stage_alg.cover(gen), stage_alg.cover(full & ~gen)))

    def coupled(position: int, stage_measure: FinMeasure, m: int) -> Tuple[int, int]:
        v1, v2 = _mode_rule(envelope_mode)(position, stage_measure, m)
        w1, w2 = w_envelopes[position - 1]
        return v1 & w1, v2 & w2

    chains = []
    for y in range(len(dis)):
        measure = FinMeasure(c, dis[y].weights)
        if len(sequence) == 0:
            _, state = build_admissible(measure, sequence, envelope_mode)
        else:
            state = _run_chain(measure, sequence, coupled, envelope_mode, False)
        chains.append(state)
    return EquiAdmissibleFamily(
        c=c,
        gens=sequence,
        envelope_mode=envelope_mode,
        chains=tuple(chains),
        w_envelopes=tuple(w_envelopes),
    )


def restriction_defects(
    fine: LowerDensity, coarse: LowerDensity, sets: Optional[Iterator[int]] = None
) -> List[int]:
    """Sets of the coarse domain on which the two densities differ."""
    if sets is None:
        sets = coarse.algebra.measurable_sets()
    return [e for e in sets if fine(e) != coarse(e)]


def density_table(delta: LowerDensity) -> Dict[int, List[int]]:
    """Point → the points of its class, for traces."""
    return {x: bits_of(cls) for x, cls in enumerate(delta.classes)}


def extend_to_completion(delta: LowerDensity, complete: CompleteSpace) -> LowerDensity:
    """
    The unique extension of ``delta`` to a completed space whose measure is
    inner regular with respect to the domain of ``delta``: each class keeps
    its positive part.
    """
    target = complete.measure
    if not delta.algebra.coarsens(target.algebra):
        raise DensityPreconditionError(
            f"{delta.algebra} is not a sub-σ-algebra of {target.algebra}"
        )
    if delta.measure.weights != target.weights:
        raise DensityPreconditionError("the completed space carries different weights")
    classes = tuple(target.positive_part(cls) for cls in delta.classes)
    try:
        return LowerDensity(target, classes)
    except InputError as e:
        raise DensityPreconditionError(
            f"the measure is not inner regular with respect to {delta.algebra}: {e}",
            witness=e.witness,
        )
