"""
The named verification checks and the order they run in.

Each check takes a CheckContext, writes details and traces into a
CheckRecord and returns the list of failure witnesses. Checks that need
the product liftings share the objects built by earlier checks through the
context, and a DiGraph of check dependencies decides the run order and
which checks to skip when an upstream one did not pass.

Errors raised by a construction are turned into records: precondition
errors mean the instance lies outside the hypotheses of the check (skip),
any other InputError is a failure carrying the error's witness.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .condexp import (
    RandVar,
    martingale_limit_check,
    t1_chain_check,
    t1_check,
    t5_check,
)
from .densities import (
    DensityPreconditionError,
    EquiAdmissibleFamily,
    LowerDensity,
    build_admissible,
    density_table,
    is_admissibly_generated,
    l3_formula,
    lift_from_density,
    limit_density_e20,
    restriction_defects,
)
from .finspace import FinMeasure, InputError, SigmaAlg
from .generate import Instance, InstanceGenerator
from .prodlift import (
    InnerRegularityError,
    ProductDensity,
    PsiResult,
    SplitLifting,
    build_phi_T2,
    build_split_lifting_T3,
    extend_lifting_T4,
    saturate_psi_p3,
    section_modification_c1,
    splitting_lifting_oracle,
)
from .process import (
    is_nil_measurable,
    measurable_version,
    nil_measurability_search,
)
from .product import (
    PreconditionError,
    check_disintegration,
    fubini_check,
    fubini_sides,
    indicator_sets,
    is_regular_conditional_probability,
    marginal_defects,
)
from .reports import CampaignReport, CheckRecord
from .schemas import InstanceSpec, WorkbenchConfig, default_config
from .utils import block_unions, format_mask, format_rational, iter_bits, lowest_bit
from .validators import DensityAxiomValidator, LiftingAxiomValidator

CHECK_ORDER = ("fubini", "t1", "l3", "e20", "t2", "p3", "t3", "c1", "t4", "process")

DEPENDENCIES: Dict[str, Tuple[str, ...]] = {
    "p3": ("t2",),
    "t3": ("p3",),
    "c1": ("t3",),
    "t4": ("t3",),
    "process": ("t3",),
}

PRECONDITION_ERRORS = (PreconditionError, InnerRegularityError, DensityPreconditionError)

WITNESS_LIMIT = 5
T1_FUNCTIONS = 5
T1_SUBALGEBRAS = 2
E20_CAP = 8
E20_SAMPLES = 256
MODIFICATION_SAMPLES = 256
NIL_MEMBERS = 64
FUBINI_ATOMS = 3
PROCESS_KINDS = ("cell", "nil", "free")


class CheckPlanner:
    """Dependency graph of the checks."""

    def __init__(self, dependencies: Optional[Dict[str, Sequence[str]]] = None):
        dependencies = DEPENDENCIES if dependencies is None else dependencies
        self.graph = nx.DiGraph()
        self.graph.add_nodes_from(CHECK_ORDER)
        for node, deps in dependencies.items():
            for dep in deps:
                self.graph.add_edge(dep, node)

    @staticmethod
    def parse(checks: Optional[Iterable[str]]) -> List[str]:
        """Validate check names; None or "all" selects every check."""
        if checks is None:
            return list(CHECK_ORDER)
        names = [name.strip() for name in checks if name.strip()]
        if names == ["all"]:
            return list(CHECK_ORDER)
        unknown = [name for name in names if name not in CHECK_ORDER]
        if unknown:
            raise ValueError(
                f"unknown checks {unknown}, expected a subset of {list(CHECK_ORDER)}"
            )
        return names

    def upstream(self, name: str) -> List[str]:
        return sorted(nx.ancestors(self.graph, name), key=CHECK_ORDER.index)

    def plan(self, checks: Optional[Iterable[str]] = None) -> List[str]:
        """The requested checks plus everything they depend on, dependencies first."""
        selected = set(self.parse(checks))
        for name in list(selected):
            selected.update(nx.ancestors(self.graph, name))
        try:
            return list(
                nx.lexicographical_topological_sort(
                    self.graph.subgraph(selected), key=CHECK_ORDER.index
                )
            )
        except nx.NetworkXUnfeasible:
            raise ValueError("the check dependencies contain a cycle")


class CheckContext:
    """One instance plus the liftings built for it, shared across checks."""

    def __init__(
        self,
        instance: Instance,
        config: Optional[WorkbenchConfig] = None,
        trace: bool = False,
    ):
        self.instance = instance
        self.config = config or default_config()
        self.trace = trace
        self.seed = instance.spec.seed if instance.spec is not None else 0

    @property
    def r(self):
        return self.instance.skew

    @property
    def dis(self):
        return self.instance.dis

    @property
    def space(self):
        return self.instance.space

    def sets(
        self, blocks: Sequence[int], cap: Optional[int] = None, count: Optional[int] = None
    ) -> Tuple[List[int], bool]:
        sets, exhaustive = block_unions(
            blocks,
            self.config.exhaustive_cap if cap is None else cap,
            self.config.sample_count if count is None else count,
            self.seed,
        )
        return list(dict.fromkeys(sets)), exhaustive

    @cached_property
    def family(self) -> EquiAdmissibleFamily:
        return self.instance.family()

    @cached_property
    def phi(self) -> ProductDensity:
        return build_phi_T2(self.r, self.dis, self.instance.c, self.family)

    @cached_property
    def psi(self) -> PsiResult:
        return saturate_psi_p3(self.phi)

    @cached_property
    def split(self) -> SplitLifting:
        return build_split_lifting_T3(self.psi)


CheckFunction = Callable[[CheckContext, CheckRecord], List[str]]


def _indicator(size: int, e: int) -> Tuple[Fraction, ...]:
    return tuple(Fraction(e >> p & 1) for p in range(size))


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def check_fubini(ctx: CheckContext, record: CheckRecord) -> List[str]:
    """
    Marginals, (Dis1)/(Dis2) and the Fubini identity for indicators. Above the
    exhaustive cap every set made of at most FUBINI_ATOMS atoms joins the sample.
    """
    r, dis, space = ctx.r, ctx.dis, ctx.space
    failures = marginal_defects(r) + check_disintegration(dis)
    sets, exhaustive = ctx.sets(space.algebra.atoms)
    small = 0
    if not exhaustive:
        sampled = set(sets)
        extra = [e for e in indicator_sets(space, FUBINI_ATOMS) if e not in sampled]
        small = len(extra)
        sets += extra
    for e in sets:
        values = _indicator(space.ground.size, e)
        if not fubini_check(r, dis, values):
            lhs, rhs = fubini_sides(r, dis, values)
            failures.append(
                f"E={space.format_set(e)}: R(E)={format_rational(lhs)} but "
                f"Σ_y Q(y)S_y(E^y)={format_rational(rhs)}"
            )
    completed = r.complete().completed
    completed_sets, _ = ctx.sets(completed.atoms, count=MODIFICATION_SAMPLES)
    for e in completed_sets:
        if not fubini_check(r, dis, _indicator(space.ground.size, e), completed=True):
            failures.append(f"completed E={space.format_set(e)}: section integrals disagree")
    record.details["checked"] = str(len(sets) + len(completed_sets))
    record.details["small_sets"] = str(small)
    record.details["exhaustive"] = _yes(exhaustive)
    return failures


def _random_completed_function(ctx: CheckContext, rng: np.random.Generator) -> Tuple[Fraction, ...]:
    completed = ctx.r.complete().completed
    values = [Fraction(0)] * ctx.space.ground.size
    for atom in completed.atoms:
        value = Fraction(int(rng.integers(0, 4)))
        for p in iter_bits(atom):
            values[p] = value
    return tuple(values)


def _coarsening(c: SigmaAlg, rng: np.random.Generator) -> SigmaAlg:
    """A random sub-σ-algebra of ``c``: its atoms merged into random groups."""
    groups: Dict[int, int] = {}
    for atom in c.atoms:
        label = int(rng.integers(0, max(1, len(c.atoms) - 1)))
        groups[label] = groups.get(label, 0) | atom
    return SigmaAlg.from_blocks(c.ground, list(groups.values()))


def check_t1(ctx: CheckContext, record: CheckRecord) -> List[str]:
    """Section compatibility of 𝔼_{𝔠⊗𝔅}(f) along the generators and on coarsenings of 𝔠."""
    r, dis, space = ctx.r, ctx.dis, ctx.space
    c, gens = ctx.instance.c, ctx.instance.gens
    rng = np.random.default_rng(ctx.seed)
    regular = is_regular_conditional_probability(dis)
    family = ctx.family
    chain = [family.stage_algebra(i) for i in range(family.stage_count)]
    failures = []
    steps = exceptional = 0
    for n in range(T1_FUNCTIONS):
        f = _random_completed_function(ctx, rng)
        report = t1_chain_check(r, dis, c, gens, f)
        steps += sum(1 for step in report.steps if not step.skipped)
        exceptional += report.exceptional_y != 0
        if not report.passed:
            failures.append(f"f#{n} along the generators: {report.describe()}")
        subalgebras = [_coarsening(c, rng) for _ in range(T1_SUBALGEBRAS)]
        for sub in subalgebras:
            check = t5_check if regular else t1_check
            sub_report = check(r, dis, sub, f)
            if not sub_report.passed:
                failures.append(f"f#{n} on {sub}: {sub_report.describe()}")
        x_values = tuple(Fraction(int(v)) for v in rng.integers(0, 4, size=space.nx))
        x_values = tuple(
            x_values[lowest_bit(space.p.algebra.atom_of(x))] for x in range(space.nx)
        )
        if not martingale_limit_check(chain, space.p, RandVar(space.p.algebra, x_values)):
            failures.append(f"f#{n}: tower property fails along the generator chain")
        if ctx.trace:
            record.trace.append(f"f#{n} {report.describe()}")
    record.details["functions"] = str(T1_FUNCTIONS)
    record.details["steps"] = str(steps)
    record.details["exceptional_sets"] = str(exceptional)
    record.details["regular"] = _yes(regular)
    return failures


def _representatives(delta: LowerDensity, m: int, part: int, limit: int = 3) -> List[int]:
    """𝔠-sets G with G ∩ M = part ∩ M: the cover of the part plus atoms outside M."""
    alg = delta.algebra
    base = alg.cover(part & m)
    outside = [atom for atom in alg.atoms if not atom & m and not atom & base]
    return [base] + [base | atom for atom in outside[:limit]]


def _representation_defects(
    ctx: CheckContext, delta: LowerDensity, extended: LowerDensity, m: int, m1: int, m2: int
) -> List[int]:
    full = delta.ground.full
    sets, _ = ctx.sets(extended.algebra.atoms, cap=E20_CAP, count=E20_SAMPLES)
    defects = []
    for e in sets:
        want = extended(e)
        for g in _representatives(delta, m, e):
            for h in _representatives(delta, full & ~m, e):
                if l3_formula(delta, m, m1, m2, g, h) != want:
                    defects.append(e)
                    break
            else:
                continue
            break
    return defects


def check_l3(ctx: CheckContext, record: CheckRecord) -> List[str]:
    """Every one-generator extension: axioms, restriction and representation independence."""
    validator = DensityAxiomValidator(ctx.config, ctx.seed)
    lifting_validator = LiftingAxiomValidator(ctx.config, ctx.seed)
    family = ctx.family
    failures = []
    extensions = 0
    for y, chain in enumerate(family.chains):
        for previous, stage in zip(chain.stages, chain.stages[1:]):
            delta, extended = previous.density, stage.density
            if stage.skipped or stage.envelopes is None:
                continue
            if delta.algebra.is_measurable(stage.generator):
                continue
            extensions += 1
            m1, m2 = stage.envelopes
            errors, _ = validator.validate_density(extended.measure, extended)
            failures.extend(f"τ_{y} stage {stage.index}: {error}" for error in errors)
            coarse_sets, _ = ctx.sets(delta.algebra.atoms)
            for e in restriction_defects(extended, delta, coarse_sets):
                failures.append(
                    f"τ_{y} stage {stage.index} does not restrict to stage "
                    f"{previous.index} at {format_mask(e)}"
                )
            for e in _representation_defects(ctx, delta, extended, stage.generator, m1, m2):
                failures.append(
                    f"τ_{y} stage {stage.index}: the extension formula depends on the "
                    f"representation of {format_mask(e)}"
                )
        if ctx.trace:
            record.trace.extend(f"τ_{y} {line}" for line in chain.trace_lines())

    space = ctx.space
    p_measure = FinMeasure(ctx.instance.c, space.p.weights)
    tau, state = build_admissible(p_measure, ctx.instance.gens, family.envelope_mode)
    sigma = lift_from_density(tau)
    errors, _ = lifting_validator.validate_lifting(sigma.measure, sigma)
    failures.extend(f"lifting of the admissible density under P: {error}" for error in errors)
    if not is_admissibly_generated(sigma, tau):
        failures.append("the lifting under P is not generated by its density")
    skipped = sum(1 for s in state.stages if s.skipped)
    record.details["extensions"] = str(extensions)
    record.details["skipped_generators"] = str(skipped)
    return failures


def check_e20(ctx: CheckContext, record: CheckRecord) -> List[str]:
    """The limit formula reproduces the tail density of an eventually constant chain."""
    failures = []
    checked = 0
    for y, chain in enumerate(ctx.family.chains):
        densities = chain.densities()
        stages = densities + [densities[-1]] * max(2, 4 - len(densities))
        last = stages[-1]
        sets, _ = ctx.sets(last.algebra.atoms, cap=E20_CAP, count=E20_SAMPLES)
        for b in sets:
            checked += 1
            got = limit_density_e20(stages, chain.measure, b)
            if got != last(b):
                failures.append(
                    f"y={y} B={format_mask(b)}: limit {format_mask(got)} but tail "
                    f"density {format_mask(last(b))}"
                )
    record.details["checked"] = str(checked)
    return failures


def check_t2(ctx: CheckContext, record: CheckRecord) -> List[str]:
    """φ: stage coherence, the section identities and the density axioms."""
    phi = ctx.phi
    space = ctx.space
    verification = phi.verify(ctx.seed)
    failures = [
        f"stage {index} does not restrict to the previous stage at {space.format_set(e)}"
        for index, e in verification.coherence
    ]
    failures += [
        f"stage {index}: [φ(F)]^{y} is not fixed by τ_{y} for F={space.format_set(f)}"
        for index, f, y in verification.stage_sections
    ]
    failures += [
        f"[φ(F)]^{y} is not fixed by τ_{y}^ext for F={space.format_set(f)}"
        for f, y in verification.unfixed_y_sections
    ]
    failures += [
        f"[φ(F)]_{x} is not Q-measurable for F={space.format_set(f)}"
        for f, x in verification.unmeasurable_x_sections
    ]
    if not verification.in_product_algebra:
        failures.append("φ leaves the product σ-algebra")
    errors, _ = DensityAxiomValidator(ctx.config, ctx.seed).validate_density(
        phi.density.measure, phi.density
    )
    failures.extend(f"φ: {error}" for error in errors)
    agreed = sum(1 for flag in verification.recursion if flag)
    record.details["stages"] = str(len(phi.stages))
    record.details["checked"] = str(verification.checked)
    record.details["exhaustive"] = _yes(verification.exhaustive)
    record.details["recursion_agrees"] = f"{agreed}/{len(verification.recursion)}"
    record.details["c_codomain"] = _yes(verification.in_c_codomain)
    if ctx.trace:
        record.trace.extend(phi.trace_lines())
        record.trace.append(f"φ classes: {density_table(phi.density)}")
    return failures


def check_p3(ctx: CheckContext, record: CheckRecord) -> List[str]:
    """ψ refines φ, covers every section with ψ(F) ∪ ψ(F^c) and keeps the section identities."""
    psi = ctx.psi
    space = ctx.space
    verification = psi.verify(ctx.seed)
    failures = [
        f"ψ enlarges the φ-class of {space.format_point(p)}" for p in verification.refines_phi
    ]
    failures += [
        f"ψ(F) ∪ ψ(F^c) misses S_{y}-mass for F={space.format_set(f)}"
        for f, y in verification.complement
    ]
    failures += [
        f"[ψ(F)]^{y} is not fixed by τ_{y}^ext for F={space.format_set(f)}"
        for f, y in verification.fixed_sections
    ]
    failures += [
        f"[ψ(F)]_{x} is not Q-measurable for F={space.format_set(f)}"
        for f, x in verification.x_sections
    ]
    errors, _ = DensityAxiomValidator(ctx.config, ctx.seed).validate_density(
        psi.density.measure, psi.density
    )
    failures.extend(f"ψ: {error}" for error in errors)
    record.details["saturation_steps"] = str(len(psi.steps))
    record.details["checked"] = str(verification.checked)
    if ctx.trace:
        record.trace.extend(step.describe(space) for step in psi.steps)
    return failures


def check_t3(ctx: CheckContext, record: CheckRecord) -> List[str]:
    """π is a lifting whose sections are fixed by the σ_y; the oracle agrees."""
    split = ctx.split
    space = ctx.space
    validator = LiftingAxiomValidator(ctx.config, ctx.seed)
    sets, exhaustive = ctx.sets(split.pi.algebra.atoms)
    failures = [
        f"[π(E)]^{y} is not fixed by σ_{y} for E={space.format_set(e)}"
        for e, y in split.splitting_defects(sets)
    ]
    failures += [
        f"E △ π(E) carries mass for E={space.format_set(e)}" for e in split.null_defects(sets)
    ]
    errors, _ = validator.validate_lifting(split.pi.measure, split.pi)
    failures.extend(f"π: {error}" for error in errors)
    for y, (sigma, tau) in enumerate(zip(split.sigmas, split.psi.phi.sections)):
        errors, _ = validator.validate_lifting(sigma.measure, sigma)
        failures.extend(f"σ_{y}: {error}" for error in errors)
        if not is_admissibly_generated(sigma, tau):
            failures.append(f"σ_{y} is not generated by τ_{y}^ext")
    oracle = splitting_lifting_oracle(split, ctx.config.oracle_limit)
    if not oracle.constructed_valid:
        failures.append("the oracle rejects the constructed lifting")
    if oracle.exists is False:
        failures.append(f"no splitting lifting exists for column {oracle.failing_column}")
    record.details["checked"] = str(len(sets))
    record.details["exhaustive"] = _yes(exhaustive)
    record.details["oracle"] = {True: "exists", False: "none", None: "unknown"}[oracle.exists]
    record.details["oracle_tried"] = str(oracle.tried)
    return failures


def check_c1(ctx: CheckContext, record: CheckRecord) -> List[str]:
    """Section-wise modification by σ_y yields a measurable set off a Q-null set."""
    split = ctx.split
    space = ctx.space
    sets, _ = ctx.sets(split.pi.algebra.atoms, count=MODIFICATION_SAMPLES)
    failures = []
    logged = 0
    for e in sets:
        modification = section_modification_c1(split, e)
        if not modification.certified:
            failures.append(
                f"E={space.format_set(e)}: modified set {space.format_set(modification.modified)} "
                f"measurable={_yes(modification.measurable)} exceptional mass "
                f"{format_rational(modification.exceptional_mass)}"
            )
        if modification.exceptional:
            logged += 1
            if ctx.trace:
                record.trace.append(
                    f"E={space.format_set(e)} exceptional y={format_mask(modification.exceptional)}"
                )
    record.details["checked"] = str(len(sets))
    record.details["exceptional_logs"] = str(logged)
    return failures


def check_t4(ctx: CheckContext, record: CheckRecord) -> List[str]:
    """π_2 on the nil extension: well defined, splitting and extending π."""
    split = ctx.split
    space = ctx.space
    lifting = extend_lifting_T4(split)
    extension = lifting.extension
    members = extension.members(NIL_MEMBERS, ctx.seed)
    failures = []
    alternatives = 0
    for e in members:
        alternatives += len(extension.alternatives(e, 3))
        for w in lifting.decomposition_defects(e, limit=3):
            failures.append(
                f"E={space.format_set(e)}: W={space.format_set(w)} lifts differently"
            )
        if not lifting.residual_is_nil(e):
            failures.append(f"E △ π_2(E) is not nil for E={space.format_set(e)}")
    failures += [
        f"[π_2(E)]^{y} is not fixed by σ_{y} for E={space.format_set(e)}"
        for e, y in lifting.splitting_defects(members)
    ]
    completed_sets, _ = ctx.sets(split.pi.algebra.atoms, count=MODIFICATION_SAMPLES)
    failures += [
        f"R_∂ is undefined or differs from R̂ at {space.format_set(f)}"
        for f in extension.extension_defects(completed_sets)
    ]
    failures += [
        f"π_2 differs from π at {space.format_set(f)}"
        for f in lifting.extension_defects(completed_sets)
    ]
    failures += [
        f"the R_∂-null set {space.format_set(e)} has a subset outside the extension"
        for e in extension.completeness_defects(members)
    ]
    failures += extension.ideal.closure_report(NIL_MEMBERS, ctx.seed)
    record.details["members"] = str(len(members))
    record.details["alternatives"] = str(alternatives)
    record.details["nil_cells"] = str(len(extension.nil_cells))
    return failures


def check_process(ctx: CheckContext, record: CheckRecord) -> List[str]:
    """measurable_version agrees with the nil-measurability criterion and certifies Θ."""
    r, dis, space = ctx.r, ctx.dis, ctx.space
    split = ctx.split
    if ctx.instance.process is not None:
        processes = [("given", ctx.instance.process)]
    else:
        generator = InstanceGenerator(ctx.config)
        processes = [
            (kind, generator.process(ctx.instance, kind, ctx.seed)) for kind in PROCESS_KINDS
        ]
    failures = []
    for label, xi in processes:
        verdict = is_nil_measurable(xi, r, dis)
        for pieces in (1, 2):
            if pieces == 2 and len(xi.levels) < 2:
                continue
            report = measurable_version(xi, split, r, dis, pieces)
            if report.has_version != verdict:
                failures.append(
                    f"{label} process, {pieces} piece(s): verdict {report.verdict} but "
                    f"nil-measurable={_yes(verdict)}"
                )
            if report.has_version and not report.passed:
                broken = [name for name, ok in report.checks.items() if not ok]
                failures.append(f"{label} process, {pieces} piece(s): Θ fails {broken}")
            if report.obstruction is not None and report.obstruction.mass <= 0:
                failures.append(f"{label} process: obstruction without positive mass")
            if ctx.trace:
                record.trace.extend(
                    f"{label}/{pieces}: {line}" for line in report.describe(space)
                )
        if not xi.raw:
            search = nil_measurability_search(xi, r, dis, ctx.config.oracle_limit)
            if search.exhaustive and search.nil_measurable != verdict:
                failures.append(
                    f"{label} process: exhaustive search says nil-measurable="
                    f"{_yes(bool(search.nil_measurable))}"
                )
        record.details[label] = "has-version" if verdict else "no-version"
    return failures


CHECKS: Dict[str, CheckFunction] = {
    "fubini": check_fubini,
    "t1": check_t1,
    "l3": check_l3,
    "e20": check_e20,
    "t2": check_t2,
    "p3": check_p3,
    "t3": check_t3,
    "c1": check_c1,
    "t4": check_t4,
    "process": check_process,
}


def _describe_error(e: InputError) -> str:
    text = f"{type(e).__name__}: {e}"
    if e.witness is not None:
        text += f" (witness {e.witness})"
    return text


def run_check(name: str, ctx: CheckContext) -> CheckRecord:
    instance = ctx.instance
    record = CheckRecord(
        check=name,
        instance=instance.name,
        status="pass",
        seed=instance.spec.seed if instance.spec is not None else None,
    )
    start = time.perf_counter()
    try:
        failures = CHECKS[name](ctx, record)
    except PRECONDITION_ERRORS as e:
        record.status = "skip"
        record.details["reason"] = _describe_error(e)
    except InputError as e:
        record.status = "fail"
        record.witnesses.append(_describe_error(e))
    else:
        if failures:
            record.status = "fail"
            record.details["failures"] = str(len(failures))
            record.witnesses.extend(failures[:WITNESS_LIMIT])
    record.elapsed = time.perf_counter() - start
    return record


def run_checks(
    instance: Instance,
    checks: Optional[Iterable[str]] = None,
    config: Optional[WorkbenchConfig] = None,
    trace: bool = False,
) -> List[CheckRecord]:
    """
    Run the requested checks and their dependencies on ``instance``. A
    check whose dependency did not pass is recorded as skipped.
    """
    planner = CheckPlanner()
    ctx = CheckContext(instance, config, trace)
    outcomes: Dict[str, str] = {}
    records = []
    for name in planner.plan(checks):
        blocked = [dep for dep in planner.upstream(name) if outcomes.get(dep) != "pass"]
        if blocked:
            record = CheckRecord(
                check=name,
                instance=instance.name,
                status="skip",
                seed=ctx.seed if instance.spec is not None else None,
                details={"reason": f"upstream check {blocked[0]} did not pass"},
            )
        else:
            record = run_check(name, ctx)
        outcomes[name] = record.status
        records.append(record)
    return records


def campaign_specs(base: InstanceSpec, count: int) -> List[InstanceSpec]:
    """``count`` specs with consecutive seeds starting at ``base.seed``."""
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    return [base.model_copy(update={"seed": base.seed + i}) for i in range(count)]


def _campaign_worker(payload: Tuple[Dict[str, Any], Optional[List[str]], bool, Dict[str, Any]]):
    spec_data, checks, trace, config_data = payload
    config = WorkbenchConfig(**config_data)
    instance = InstanceGenerator(config).generate(spec_data)
    return run_checks(instance, checks, config, trace)


def run_campaign(
    specs: Sequence[InstanceSpec],
    checks: Optional[Iterable[str]] = None,
    jobs: int = 1,
    config: Optional[WorkbenchConfig] = None,
    trace: bool = False,
) -> CampaignReport:
    """
    Generate and verify every spec. With ``jobs`` > 1 instances run in a
    process pool; records are collected in spec order either way.
    """
    config = config or default_config()
    selected = CheckPlanner.parse(checks)
    payloads = [(spec.model_dump(), selected, trace, config.model_dump()) for spec in specs]
    report = CampaignReport()
    if jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for records in pool.map(_campaign_worker, payloads):
                report.extend(records)
    else:
        for payload in payloads:
            report.extend(_campaign_worker(payload))
    return report
