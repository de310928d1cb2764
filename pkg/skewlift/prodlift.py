"""
Product densities and liftings.

Builds the ideal 𝔓_0 of null cells, the density φ on the completed product
with τ_y-fixed sections, its saturation ψ, the splitting lifting (π, σ_y),
the section modification of completed sets, nil sets with the nil extension
(𝔄∂𝔅, R_∂), and the lifting π_2 of R_∂. Verification helpers return
witnesses rather than raising, so checks can report every defect.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .densities import (
    DensityPreconditionError,
    EquiAdmissibleFamily,
    LowerDensity,
    Lifting,
    extend_density_L3,
    extend_to_completion,
    lift_from_density,
    restriction_defects,
)
from .finspace import FinMeasure, InputError, SigmaAlg, completion, sigma_generate
from .product import (
    Disintegration,
    PreconditionError,
    ProductSpace,
    SkewProduct,
    contained_in_all,
    inner_regularity_defects,
    is_regular_conditional_probability,
)
from .schemas import default_config
from .utils import (
    bits_of,
    block_unions,
    format_mask,
    iter_bits,
    sample_unions,
    union_of,
)


class InnerRegularityError(InputError):
    """P or some S_y is not inner regular with respect to 𝔠."""


class ConsistencyError(InputError):
    """A construction produced an object violating its own postcondition."""


def _oracle_sets(blocks: Sequence[int], seed: int = 0) -> Tuple[List[int], bool]:
    config = default_config()
    sets, exhaustive = block_unions(
        blocks, config.exhaustive_cap, config.sample_count, seed
    )
    return list(sets), exhaustive


def section_defects(
    space: ProductSpace,
    density: LowerDensity,
    sections: Sequence[LowerDensity],
    sets: Sequence[int],
) -> List[Tuple[int, int]]:
    """(F, y) pairs where [d(F)]^y is not a fixed point of the y-th section density."""
    defects = []
    for f in sets:
        image = density(f)
        for y, tau in enumerate(sections):
            section = space.section_y(image, y)
            if not tau.algebra.is_measurable(section) or tau(section) != section:
                defects.append((f, y))
    return defects


def x_section_defects(
    space: ProductSpace, density: LowerDensity, q_algebra: SigmaAlg, sets: Sequence[int]
) -> List[Tuple[int, int]]:
    """(F, x) pairs where [d(F)]_x is not measurable for ``q_algebra``."""
    defects = []
    for f in sets:
        image = density(f)
        for x in range(space.nx):
            if not q_algebra.is_measurable(space.section_x(image, x)):
                defects.append((f, x))
    return defects


@dataclass(frozen=True)
class PZeroIdeal:
    """
    𝔓_0: R̂-null sets whose y-sections lie in 𝔠 and x-sections in 𝔅.
    Such a set is a union of null cells c × b (c a 𝔠-atom, b a 𝔅-atom).
    """

    skew: SkewProduct
    c: SigmaAlg
    cells: Tuple[int, ...]

    @classmethod
    def build(cls, r: SkewProduct, c: SigmaAlg) -> "PZeroIdeal":
        space = r.space
        cells = tuple(
            space.rect(a, b)
            for b in space.q.algebra.atoms
            for a in c.atoms
            if r.mass(space.rect(a, b)) == 0
        )
        return cls(r, c, cells)

    @property
    def space(self) -> ProductSpace:
        return self.skew.space

    def contains(self, w: int) -> bool:
        """Membership straight from the defining section conditions."""
        space = self.space
        w = space.ground.check(w, "W")
        if self.skew.mass(w) != 0:
            return False
        if any(not self.c.is_measurable(space.section_y(w, y)) for y in range(space.ny)):
            return False
        return all(
            space.q.algebra.is_measurable(space.section_x(w, x)) for x in range(space.nx)
        )

    def members(self, seed: int = 0) -> Tuple[List[int], bool]:
        return _oracle_sets(self.cells, seed)

    def stage_algebra(self, c_stage: SigmaAlg) -> SigmaAlg:
        """σ(𝔠_γ ⊗ 𝔅 ∪ 𝔓_0)."""
        space = self.space
        rectangles = space.tensor(c_stage, space.q.algebra).atoms
        return sigma_generate(space.ground, list(rectangles) + list(self.cells))


@dataclass(frozen=True)
class PhiStage:
    index: int
    generator: Optional[int]
    density: LowerDensity
    recursion_agrees: Optional[bool] = None


@dataclass
class PhiVerification:
    """Witness lists of the checks run on a product density."""

    coherence: List[Tuple[int, int]] = field(default_factory=list)
    stage_sections: List[Tuple[int, int, int]] = field(default_factory=list)
    unfixed_y_sections: List[Tuple[int, int]] = field(default_factory=list)
    unmeasurable_x_sections: List[Tuple[int, int]] = field(default_factory=list)
    in_product_algebra: bool = True
    in_c_codomain: bool = True
    recursion: List[Optional[bool]] = field(default_factory=list)
    exhaustive: bool = True
    checked: int = 0

    @property
    def passed(self) -> bool:
        return (
            not self.coherence
            and not self.stage_sections
            and not self.unfixed_y_sections
            and not self.unmeasurable_x_sections
            and self.in_product_algebra
        )


@dataclass(frozen=True)
class ProductDensity:
    """φ on the R̂-completion together with the stages that built it."""

    skew: SkewProduct
    dis: Disintegration
    family: EquiAdmissibleFamily
    p_zero: PZeroIdeal
    stages: Tuple[PhiStage, ...]
    density: LowerDensity
    sections: Tuple[LowerDensity, ...]

    @property
    def space(self) -> ProductSpace:
        return self.skew.space

    def __call__(self, e: int) -> int:
        return self.density(e)

    def trace_lines(self) -> List[str]:
        space = self.space
        lines = [f"𝔓_0 cells: {[space.format_set(cell) for cell in self.p_zero.cells]}"]
        for stage in self.stages:
            if stage.generator is None:
                lines.append(f"stage {stage.index}: σ(𝔓_0)")
                continue
            agrees = {None: "n/a", True: "yes", False: "no"}[stage.recursion_agrees]
            lines.append(
                f"stage {stage.index}: M={format_mask(stage.generator)}×Y "
                f"atoms={len(stage.density.algebra)} recursion_agrees={agrees}"
            )
        return lines

    def verify(self, seed: int = 0) -> PhiVerification:
        space = self.space
        report = PhiVerification(recursion=[s.recursion_agrees for s in self.stages[1:]])
        for coarse, fine in zip(self.stages, self.stages[1:]):
            sets, _ = _oracle_sets(coarse.density.algebra.atoms, seed)
            report.coherence.extend(
                (fine.index, e) for e in restriction_defects(fine.density, coarse.density, sets)
            )
        for stage in self.stages:
            taus = [self.family.stage(y, stage.index) for y in range(space.ny)]
            sets, _ = _oracle_sets(stage.density.algebra.atoms, seed)
            report.stage_sections.extend(
                (stage.index, f, y) for f, y in section_defects(space, stage.density, taus, sets)
            )
        sets, report.exhaustive = _oracle_sets(self.density.algebra.atoms, seed)
        report.checked = len(sets)
        report.unfixed_y_sections = section_defects(space, self.density, self.sections, sets)
        q_completed = completion(space.q).completed
        report.unmeasurable_x_sections = x_section_defects(space, self.density, q_completed, sets)
        c_codomain = self.stages[-1].density.algebra
        images = [self.density(f) for f in sets]
        report.in_product_algebra = all(space.algebra.is_measurable(i) for i in images)
        report.in_c_codomain = all(c_codomain.is_measurable(i) for i in images)
        return report


def _mixed_b_atom(space: ProductSpace) -> Optional[int]:
    q = space.q
    for b in q.algebra.atoms:
        if b & q.positive_points and b & q.null_points:
            return b
    return None


def _column_extension(
    space: ProductSpace, previous: LowerDensity, family: EquiAdmissibleFamily, index: int
) -> LowerDensity:
    """
    φ̄ for stage ``index``: the extension lemma applied to the previous stage
    and M×Y. The envelopes E(M)×Y and E(M^c)×Y are used when they are
    envelopes for the stage measure, the covers of M×Y and its complement
    in the previous stage otherwise.
    """
    full_y = space.q.ground.full
    m = space.rect(family.gens.sets[index - 1], full_y)
    w1, w2 = family.w_envelopes[index - 1]
    try:
        return extend_density_L3(
            previous, m, space.rect(w1, full_y), space.rect(w2, full_y)
        )
    except DensityPreconditionError:
        raise
    except InputError:
        algebra = previous.algebra
        return extend_density_L3(
            previous, m, algebra.cover(m), algebra.cover(space.ground.full & ~m)
        )


def _stage_density(
    space: ProductSpace,
    measure: FinMeasure,
    family: EquiAdmissibleFamily,
    index: int,
    previous: Optional[LowerDensity] = None,
) -> LowerDensity:
    """
    Null points of a Q-positive column take pos(C × b(y)) with C their
    τ_y class. Null columns follow the recursion: φ̄ from the previous stage,
    then the renormalisation [φ(W)]^y := τ_y([φ̄(W)]^y), so that stage
    ``index`` restricts to stage ``index - 1``.
    """
    q = space.q
    positive = set(measure.positive_atoms)
    bar = None
    if previous is not None and q.null_points:
        bar = _column_extension(space, previous, family, index)
    classes = []
    for point in space.ground.points:
        atom = measure.algebra.atom_of(point)
        if atom in positive:
            classes.append(atom)
            continue
        x, y = space.pair(point)
        tau = family.stage(y, index)
        if q.weights[y] > 0:
            cls = space.rect(tau.class_of(x), q.algebra.atom_of(y))
        elif bar is None:
            cls = space.rect(tau.class_of(x), q.ground.full)
        else:
            support = tau.class_of(x) & tau.measure.positive_points
            cls = union_of(bar.classes[space.index(s, y)] for s in iter_bits(support))
        classes.append(measure.positive_part(cls))
    try:
        return LowerDensity(measure, tuple(classes))
    except InputError as e:
        raise ConsistencyError(f"stage {index} density is invalid: {e}", witness=e.witness)


def _recursion_agrees(
    space: ProductSpace,
    previous: LowerDensity,
    density: LowerDensity,
    family: EquiAdmissibleFamily,
    index: int,
) -> Optional[bool]:
    """
    Rebuild stage ``index`` by the extension lemma on the product followed by
    the section renormalisation [φ(W)]^y := τ_y([φ̄(W)]^y). None when the
    product envelopes are not envelopes for the stage measure.
    """
    full_y = space.q.ground.full
    gen = family.gens.sets[index - 1]
    w1, w2 = family.w_envelopes[index - 1]
    try:
        bar = extend_density_L3(
            previous,
            space.rect(gen, full_y),
            space.rect(w1, full_y),
            space.rect(w2, full_y),
        )
    except InputError:
        return None
    if bar.algebra != density.algebra:
        return False
    for point, cls in enumerate(density.classes):
        x, y = space.pair(point)
        tau = family.stage(y, index)
        support = tau.class_of(x) & tau.measure.positive_points
        expected = union_of(bar.classes[space.index(s, y)] for s in iter_bits(support))
        if expected != cls:
            return False
    return True


def build_phi_T2(
    r: SkewProduct, dis: Disintegration, c: SigmaAlg, family: EquiAdmissibleFamily
) -> ProductDensity:
    """
    Run the stage recursion σ(𝔓_0) = 𝔐_0 ⊆ 𝔐_1 ⊆ … ⊆ 𝔐_κ = σ(𝔠⊗𝔅 ∪ 𝔓_0)
    along the generators of ``family`` and extend the last stage to the
    completion of R.
    """
    space = r.space
    if dis.skew != r:
        raise InputError("the disintegration belongs to another skew product")
    if family.c != c:
        raise InputError(f"the family is built on {family.c}, not on {c}")
    if len(family) != space.ny:
        raise InputError(f"the family has {len(family)} members for {space.ny} points of Y")
    if not contained_in_all(c, dis):
        raise InputError(f"{c} is not contained in 𝔄 ∩ ⋂_y 𝔄_y")
    defects = inner_regularity_defects(r, dis, c)
    if defects:
        a, name = defects[0]
        raise InnerRegularityError(
            f"{name} is not inner regular with respect to {c}: the largest 𝔠-set "
            f"inside {format_mask(a)} misses positive mass",
            witness=a,
        )
    mixed = _mixed_b_atom(space)
    if mixed is not None:
        raise PreconditionError(
            f"the 𝔅-atom {format_mask(mixed)} mixes Q-null and Q-positive points",
            witness=mixed,
        )
    p_zero = PZeroIdeal.build(r, c)
    stages: List[PhiStage] = []
    previous: Optional[LowerDensity] = None
    for index in range(family.stage_count):
        algebra = p_zero.stage_algebra(family.stage_algebra(index))
        density = _stage_density(
            space, FinMeasure(algebra, r.weights), family, index, previous
        )
        if previous is None:
            stages.append(PhiStage(index, None, density))
        else:
            stages.append(PhiStage(
                index,
                family.gens.sets[index - 1],
                density,
                _recursion_agrees(space, previous, density, family, index),
            ))
        previous = density
    final_measure = r.complete().measure
    last = stages[-1].density
    try:
        phi = LowerDensity(
            final_measure, tuple(final_measure.positive_part(cls) for cls in last.classes)
        )
    except InputError as e:
        raise ConsistencyError(f"φ does not extend to the completion: {e}", witness=e.witness)
    sections = tuple(
        extend_to_completion(family[y], completion(dis[y])) for y in range(space.ny)
    )
    return ProductDensity(r, dis, family, p_zero, tuple(stages), phi, sections)


@dataclass(frozen=True)
class SaturationStep:
    y: int
    x: int
    before: int
    kept: int

    def describe(self, space: ProductSpace) -> str:
        return (
            f"y={self.y} x={self.x}: class {space.format_set(self.before)} "
            f"-> {space.format_set(self.kept)} (E={space.format_set(self.kept)})"
        )


@dataclass
class PsiVerification:
    refines_phi: List[int] = field(default_factory=list)
    complement: List[Tuple[int, int]] = field(default_factory=list)
    fixed_sections: List[Tuple[int, int]] = field(default_factory=list)
    x_sections: List[Tuple[int, int]] = field(default_factory=list)
    exhaustive: bool = True
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not (
            self.refines_phi or self.complement or self.fixed_sections or self.x_sections
        )


@dataclass(frozen=True)
class PsiResult:
    phi: ProductDensity
    density: LowerDensity
    steps: Tuple[SaturationStep, ...]

    @property
    def space(self) -> ProductSpace:
        return self.phi.space

    def __call__(self, e: int) -> int:
        return self.density(e)

    def verify(self, seed: int = 0) -> PsiVerification:
        space = self.space
        dis = self.phi.dis
        report = PsiVerification()
        report.refines_phi = [
            p
            for p, (new, old) in enumerate(zip(self.density.classes, self.phi.density.classes))
            if new & ~old
        ]
        sets, report.exhaustive = _oracle_sets(self.density.algebra.atoms, seed)
        report.checked = len(sets)
        full = space.ground.full
        for f in sets:
            inside, outside = self.density(f), self.density(full & ~f)
            for y in range(space.ny):
                covered = space.section_y(inside | outside, y)
                if dis[y].measure(covered) != 1:
                    report.complement.append((f, y))
        report.fixed_sections = section_defects(space, self.density, self.phi.sections, sets)
        q_completed = completion(space.q).completed
        report.x_sections = x_section_defects(space, self.density, q_completed, sets)
        return report


def saturate_psi_p3(phi: ProductDensity) -> PsiResult:
    """
    Shrink φ until every Ŝ_y-positive point of every column has a single
    completed atom as its class: in (y, x) order the class of a deficient
    point and of its whole Ŝ_y-atom becomes the lowest atom of the class,
    then the Ŝ_y-null points of the column are re-derived from τ_y.
    """
    space = phi.space
    completed = phi.density.algebra
    classes = list(phi.density.classes)
    steps = []
    for y, tau in enumerate(phi.sections):
        positive = tau.measure.positive_points
        changed = False
        for x in iter_bits(positive):
            point = space.index(x, y)
            atoms = completed.atoms_within(classes[point])
            if len(atoms) <= 1:
                continue
            kept = atoms[0]
            steps.append(SaturationStep(y, x, classes[point], kept))
            for member in iter_bits(tau.algebra.atom_of(x) & positive):
                classes[space.index(member, y)] = kept
            changed = True
        if not changed:
            continue
        for x in iter_bits(space.full_x & ~positive):
            classes[space.index(x, y)] = union_of(
                classes[space.index(s, y)] for s in iter_bits(tau.class_of(x))
            )
    try:
        density = LowerDensity(phi.density.measure, tuple(classes))
    except InputError as e:
        raise ConsistencyError(f"saturation left an invalid density: {e}", witness=e.witness)
    return PsiResult(phi, density, tuple(steps))


@dataclass(frozen=True)
class SplitLifting:
    """π on the R̂-completion with [π(E)]^y = σ_y([π(E)]^y) for every y."""

    pi: Lifting
    sigmas: Tuple[Lifting, ...]
    psi: PsiResult

    @property
    def space(self) -> ProductSpace:
        return self.psi.space

    def __call__(self, e: int) -> int:
        return self.pi(e)

    def splitting_defects(self, sets: Optional[Sequence[int]] = None) -> List[Tuple[int, int]]:
        if sets is None:
            sets, _ = _oracle_sets(self.pi.algebra.atoms)
        return section_defects(self.space, self.pi, self.sigmas, sets)

    def null_defects(self, sets: Optional[Sequence[int]] = None) -> List[int]:
        """Sets E for which E △ π(E) carries mass."""
        if sets is None:
            sets, _ = _oracle_sets(self.pi.algebra.atoms)
        return [e for e in sets if not self.pi.measure.is_null(e ^ self.pi(e))]

    def to_dict(self) -> Dict[str, object]:
        space = self.space
        pi_atoms = self.pi.algebra.atoms
        return {
            "pi": {
                space.format_point(p): pi_atoms.index(cls)
                for p, cls in enumerate(self.pi.classes)
            },
            "sigma": [
                {x: sigma.algebra.atoms.index(cls) for x, cls in enumerate(sigma.classes)}
                for sigma in self.sigmas
            ],
            "trace": self.psi.phi.trace_lines()
            + [step.describe(space) for step in self.psi.steps],
        }


def build_split_lifting_T3(psi: PsiResult, mode: str = "lowest") -> SplitLifting:
    """σ_y picks one atom of each τ_y class; π(x, y) is the ψ-class of σ_y's choice."""
    space = psi.space
    sigmas = tuple(lift_from_density(tau, mode) for tau in psi.phi.sections)
    completed = psi.density.algebra
    classes = []
    for point in space.ground.points:
        x, y = space.pair(point)
        support = sigmas[y].class_of(x)
        cls = union_of(psi.density.classes[space.index(s, y)] for s in iter_bits(support))
        atoms = completed.atoms_within(cls)
        if len(atoms) != 1:
            raise ConsistencyError(
                f"complement law fails at {space.format_point(point)}: neither "
                f"{space.format_set(atoms[0] if atoms else 0)} nor its complement "
                f"holds the point",
                witness=(atoms[0] if atoms else 0, y),
            )
        classes.append(cls)
    try:
        pi = Lifting(psi.density.measure, tuple(classes))
    except InputError as e:
        raise ConsistencyError(f"π is not a lifting: {e}", witness=e.witness)
    return SplitLifting(pi, sigmas, psi)


@dataclass(frozen=True)
class SectionModification:
    original: int
    modified: int
    exceptional: int
    measurable: bool
    exceptional_mass: Fraction

    @property
    def certified(self) -> bool:
        return self.measurable and self.exceptional_mass == 0


def section_modification_c1(split: SplitLifting, e: int) -> SectionModification:
    """
    Ẽ^y := σ_y(E^y) for every y. The sections at Q-null y need not be
    Ŝ_y-measurable, σ_y is then read off its classes.
    """
    space = split.space
    e = space.ground.check(e, "E")
    if not split.pi.algebra.is_measurable(e):
        raise PreconditionError(
            f"{space.format_set(e)} is not measurable for the completion of R", witness=e
        )
    sections = [split.sigmas[y](space.section_y(e, y)) for y in range(space.ny)]
    modified = space.from_sections(sections)
    image = split.pi(e)
    exceptional = union_of(
        1 << y for y in range(space.ny) if sections[y] != space.section_y(image, y)
    )
    return SectionModification(
        original=e,
        modified=modified,
        exceptional=exceptional,
        measurable=split.pi.algebra.is_measurable(modified),
        exceptional_mass=space.q.measure(exceptional),
    )


@dataclass(frozen=True)
class NilVerdict:
    nil: bool
    witness: int
    mass: Fraction


@dataclass(frozen=True)
class NilIdeal:
    """𝒩: sets whose y-sections are Ŝ_y-null for Q-almost every y."""

    skew: SkewProduct
    dis: Disintegration

    @property
    def space(self) -> ProductSpace:
        return self.skew.space

    @property
    def maximal(self) -> int:
        """The largest nil set; 𝒩 is its power set."""
        space = self.space
        return space.from_sections([
            space.full_x if space.q.weights[y] == 0 else self.dis[y].null_points
            for y in range(space.ny)
        ])

    def witness(self, e: int) -> int:
        space = self.space
        return union_of(
            1 << y
            for y in range(space.ny)
            if space.section_y(e, y) & self.dis[y].positive_points
        )

    def contains(self, e: int) -> bool:
        return self.space.q.measure(self.witness(e)) == 0

    def members(self, count: int, seed: int = 0) -> Iterator[int]:
        return sample_unions([1 << p for p in iter_bits(self.maximal)], count, seed)

    def closure_report(self, count: int = 64, seed: int = 0) -> List[str]:
        """Finite closure checks on sampled members; empty when all pass."""
        failures = []
        members = list(self.members(count, seed))
        null_points = self.skew.measure.null_points
        if not self.contains(null_points):
            failures.append(f"the R-null set {self.space.format_set(null_points)} is not nil")
        for e in members:
            if not self.contains(e):
                failures.append(f"sampled member {self.space.format_set(e)} is not nil")
            for point in iter_bits(e):
                if not self.contains(e & ~(1 << point)):
                    failures.append(f"subset of {self.space.format_set(e)} is not nil")
        for a, b in zip(members, members[1:]):
            if not self.contains(a | b):
                failures.append(
                    f"union of {self.space.format_set(a)} and {self.space.format_set(b)} "
                    "is not nil"
                )
        return failures


def is_nil(r: SkewProduct, dis: Disintegration, e: int) -> NilVerdict:
    ideal = NilIdeal(r, dis)
    witness = ideal.witness(r.space.ground.check(e, "E"))
    mass = r.space.q.measure(witness)
    return NilVerdict(mass == 0, witness, mass)


@dataclass(frozen=True)
class NilExtension:
    """
    𝔄∂𝔅 = {W △ N : W ∈ 𝔄⊗𝔅, N ∈ 𝒩} with R_∂(W △ N) = R(W). A set is in
    𝔄∂𝔅 iff on every cell of 𝔄⊗𝔅 it contains all or none of the cell's
    non-nil points.
    """

    ideal: NilIdeal
    cells: Tuple[int, ...]
    charged: Tuple[int, ...]

    @classmethod
    def build(cls, r: SkewProduct, dis: Disintegration) -> "NilExtension":
        ideal = NilIdeal(r, dis)
        cells = r.space.algebra.atoms
        free = ideal.maximal
        return cls(ideal, cells, tuple(cell & ~free for cell in cells))

    @property
    def skew(self) -> SkewProduct:
        return self.ideal.skew

    @property
    def space(self) -> ProductSpace:
        return self.ideal.space

    @property
    def nil_cells(self) -> List[int]:
        return [cell for cell, part in zip(self.cells, self.charged) if not part]

    def decompose(self, e: int) -> Tuple[int, int]:
        """Canonical (W, N) with E = W △ N; W takes no cell that is nil."""
        space = self.space
        e = space.ground.check(e, "E")
        w = 0
        for cell, part in zip(self.cells, self.charged):
            inside = e & part
            if not part or not inside:
                continue
            if inside != part:
                raise InputError(
                    f"{space.format_set(e)} splits the non-nil part of the cell "
                    f"{space.format_set(cell)}",
                    witness=cell,
                )
            w |= cell
        return w, e ^ w

    def contains(self, e: int) -> bool:
        try:
            self.decompose(e)
        except InputError:
            return False
        return True

    def alternatives(self, e: int, limit: int = 8) -> List[Tuple[int, int]]:
        """Further decompositions, adding unions of nil cells to the canonical W."""
        w, _ = self.decompose(e)
        result = []
        extras, _ = block_unions(
            self.nil_cells, default_config().exhaustive_cap, limit
        )
        for extra in itertools.islice(extras, limit + 1):
            if extra:
                result.append((w | extra, e ^ (w | extra)))
        return result

    def measure(self, e: int) -> Fraction:
        w, _ = self.decompose(e)
        return self.skew.mass(w)

    def members(self, count: int, seed: int = 0) -> List[int]:
        cells = list(sample_unions(self.cells, count, seed))
        nils = list(self.ideal.members(count, seed + 1))
        return [w ^ n for w, n in zip(cells, nils)]

    def completeness_defects(self, sets: Sequence[int]) -> List[int]:
        """R_∂-null members with a one-point-smaller subset outside 𝔄∂𝔅."""
        defects = []
        for e in sets:
            if self.measure(e) != 0:
                continue
            if any(not self.contains(e & ~(1 << p)) for p in iter_bits(e)):
                defects.append(e)
        return defects

    def extension_defects(self, sets: Sequence[int]) -> List[int]:
        """Completed-product sets on which R_∂ is undefined or differs from R̂."""
        return [
            f for f in sets if not self.contains(f) or self.measure(f) != self.skew.mass(f)
        ]


def nil_extension(r: SkewProduct, dis: Disintegration) -> NilExtension:
    return NilExtension.build(r, dis)


@dataclass(frozen=True)
class NilLifting:
    """π_2 on R_∂: π_2(W △ N) := π(W)."""

    split: SplitLifting
    extension: NilExtension

    def __call__(self, e: int) -> int:
        w, _ = self.extension.decompose(e)
        return self.split.pi(w)

    def decomposition_defects(self, e: int, limit: int = 8) -> List[int]:
        """Alternative W' whose lifting disagrees with the canonical one."""
        image = self(e)
        return [
            w for w, _ in self.extension.alternatives(e, limit) if self.split.pi(w) != image
        ]

    def residual_is_nil(self, e: int) -> bool:
        return self.extension.ideal.contains(e ^ self(e))

    def splitting_defects(self, sets: Sequence[int]) -> List[Tuple[int, int]]:
        space = self.split.space
        defects = []
        for e in sets:
            image = self(e)
            for y, sigma in enumerate(self.split.sigmas):
                section = space.section_y(image, y)
                if sigma(section) != section:
                    defects.append((e, y))
        return defects

    def extension_defects(self, sets: Sequence[int]) -> List[int]:
        """Completed-product sets where π_2 and π disagree."""
        return [f for f in sets if self(f) != self.split.pi(f)]


def extend_lifting_T4(
    split: SplitLifting, extension: Optional[NilExtension] = None
) -> NilLifting:
    psi = split.psi
    if not is_regular_conditional_probability(psi.phi.dis):
        raise PreconditionError("the nil extension lifting needs 𝔄_y = 𝔄 for every y")
    if extension is None:
        extension = nil_extension(psi.phi.skew, psi.phi.dis)
    return NilLifting(split, extension)


@dataclass(frozen=True)
class OracleResult:
    exists: Optional[bool]
    constructed_valid: bool
    tried: int
    candidates: int
    exhaustive: bool
    failing_column: Optional[int] = None


def _column_splits(
    space: ProductSpace, y: int, sigma: Lifting, assignment: Dict[int, int]
) -> bool:
    blocks: Dict[int, int] = {}
    for point, atom in assignment.items():
        x, _ = space.pair(point)
        blocks[atom] = blocks.get(atom, 0) | (1 << x)
    return all(sigma(block) == block for block in blocks.values())


def splitting_lifting_oracle(split: SplitLifting, limit: Optional[int] = None) -> OracleResult:
    """
    Try every lifting of R̂ column by column: each null point of a column gets
    one positive completed atom. Columns with more than ``limit`` candidates
    are skipped, which makes the search inexhaustive.
    """
    space = split.space
    measure = split.pi.measure
    atoms = measure.positive_atoms
    limit = limit or default_config().oracle_limit
    exists: Optional[bool] = True
    exhaustive = True
    tried = candidates = 0
    failing = None
    for y, sigma in enumerate(split.sigmas):
        column = space.column(y)
        fixed = {
            p: measure.algebra.atom_of(p) for p in iter_bits(column & measure.positive_points)
        }
        free = bits_of(column & measure.null_points)
        count = len(atoms) ** len(free)
        candidates += count
        if count > limit:
            exhaustive = False
            continue
        found = False
        for choice in itertools.product(atoms, repeat=len(free)):
            tried += 1
            assignment = dict(fixed)
            assignment.update(zip(free, choice))
            if _column_splits(space, y, sigma, assignment):
                found = True
                break
        if not found:
            exists, failing = False, y
            break
    if exists and not exhaustive:
        exists = None
    constructed_valid = all(
        _column_splits(
            space,
            y,
            sigma,
            {p: split.pi.classes[p] for p in iter_bits(space.column(y))},
        )
        for y, sigma in enumerate(split.sigmas)
    )
    return OracleResult(exists, constructed_valid, tried, candidates, exhaustive, failing)
