"""
Axiom validation for densities and liftings.

Densities are stored in class form, which makes the axioms hold by
construction. These validators instead treat a density as an arbitrary set
function on the measurable sets and enumerate the axioms directly, so they
also catch class tables that were assembled by hand or loaded from a file.

USAGE
=====

    from skewlift.validators import AxiomValidator

    validator = AxiomValidator()
    result = validator.validate(
        densities={"tau_0": (measure, tau)},
        liftings={"sigma_0": (measure, sigma)},
    )
    if not result.is_valid:
        print(result.summary())

AXIOMS CHECKED
==============

For a density δ on (X, Σ, μ) and every A, B ∈ Σ:

1. δ(A) ∈ Σ and μ(A △ δ(A)) = 0
2. μ(A △ B) = 0 implies δ(A) = δ(B)
3. δ(∅) = ∅ and δ(X) = X
4. δ(A ∩ B) = δ(A) ∩ δ(B)

A lifting must further satisfy δ(X ∖ A) = X ∖ δ(A) and
δ(A ∪ B) = δ(A) ∪ δ(B).

Every measurable set is visited up to ``exhaustive_cap`` atoms, a seeded
sample above it; pairs are enumerated when there are at most
``PAIR_CAP`` sets and sampled otherwise. Sampling is reported as a warning.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np

from .finspace import FinMeasure
from .schemas import WorkbenchConfig, default_config
from .utils import block_unions, format_mask

SetFunction = Callable[[int], int]

PAIR_CAP = 256


@dataclass
class ValidationResult:
    """Errors and warnings of one validation run, grouped by subject name.

    Attributes:
        is_valid (bool): Whether validation passed (no errors)
        error_count (int): Total number of errors
        warning_count (int): Total number of warnings
        errors (Dict[str, List[str]]): Errors grouped by subject
        warnings (Dict[str, List[str]]): Warnings grouped by subject
        suggestions (List[str]): Hints for fixing the failures
    """

    is_valid: bool = True
    error_count: int = 0
    warning_count: int = 0
    errors: Dict[str, List[str]] = field(default_factory=dict)
    warnings: Dict[str, List[str]] = field(default_factory=dict)
    suggestions: List[str] = field(default_factory=list)

    def add_error(self, subject: str, error: str):
        self.errors.setdefault(subject, []).append(error)
        self.error_count += 1
        self.is_valid = False

    def add_warning(self, subject: str, warning: str):
        self.warnings.setdefault(subject, []).append(warning)
        self.warning_count += 1

    def add_suggestion(self, suggestion: str):
        if suggestion not in self.suggestions:
            self.suggestions.append(suggestion)

    def summary(self) -> str:
        """Return a formatted summary of validation results."""
        lines = []
        if self.is_valid:
            lines.append("✅ All axioms hold!")
            for subject, warnings in self.warnings.items():
                for warning in warnings:
                    lines.append(f"  ⚠️  {subject}: {warning}")
            return "\n".join(lines)

        lines.append(
            f"❌ AXIOM VALIDATION FAILED ({self.error_count} errors, "
            f"{self.warning_count} warnings):\n"
        )
        for subject, errors in self.errors.items():
            if errors:
                lines.append(f"  {subject}:")
                for error in errors:
                    lines.append(f"    ❌ {error}")
        for subject, warnings in self.warnings.items():
            if warnings:
                lines.append(f"  {subject}:")
                for warning in warnings:
                    lines.append(f"    ⚠️  {warning}")
        if self.suggestions:
            lines.append("\n💡 SUGGESTIONS:")
            for suggestion in self.suggestions:
                lines.append(f"  ✓ {suggestion}")
        return "\n".join(lines)


class DensityAxiomValidator:
    """Enumerates the lower density axioms for a set function."""

    def __init__(self, config: Optional[WorkbenchConfig] = None, seed: int = 0):
        self.config = config or default_config()
        self.seed = seed

    def _sets(self, measure: FinMeasure) -> Tuple[List[int], bool]:
        sets, exhaustive = block_unions(
            measure.algebra.atoms,
            self.config.exhaustive_cap,
            self.config.sample_count,
            self.seed,
        )
        return list(dict.fromkeys(sets)), exhaustive

    def _pairs(self, sets: List[int]) -> Tuple[Iterator[Tuple[int, int]], bool]:
        if len(sets) <= PAIR_CAP:
            return ((a, b) for a in sets for b in sets), True
        rng = np.random.default_rng(self.seed)
        picks = rng.integers(0, len(sets), size=(self.config.sample_count, 2))
        return ((sets[int(i)], sets[int(j)]) for i, j in picks), False

    def validate_density(
        self, measure: FinMeasure, fn: SetFunction
    ) -> Tuple[List[str], List[str]]:
        """
        Check the density axioms of ``fn`` on ``measure``.

        Returns:
            Tuple of (errors, warnings); each error names the offending sets.
        """
        errors: List[str] = []
        warnings: List[str] = []
        sets, exhaustive = self._sets(measure)
        if not exhaustive:
            warnings.append(f"measurable sets sampled ({len(sets)} of them)")
        images = {a: fn(a) for a in sets}
        full = measure.ground.full

        if images.get(0, fn(0)) != 0:
            errors.append("δ(∅) is not ∅")
        if images.get(full, fn(full)) != full:
            errors.append("δ(X) is not X")

        by_class: Dict[int, Tuple[int, int]] = {}
        for a, image in images.items():
            if not measure.algebra.is_measurable(image):
                errors.append(f"δ({format_mask(a)}) = {format_mask(image)} is not measurable")
                continue
            if not measure.is_null(a ^ image):
                errors.append(
                    f"δ({format_mask(a)}) = {format_mask(image)} differs from it on a "
                    "set of positive measure"
                )
            key = a & measure.positive_points
            seen = by_class.setdefault(key, (a, image))
            if seen[1] != image:
                errors.append(
                    f"{format_mask(seen[0])} and {format_mask(a)} are equal a.e. but "
                    "have different images"
                )

        pairs, pairs_exhaustive = self._pairs(sets)
        if not pairs_exhaustive:
            warnings.append(f"pairs sampled ({self.config.sample_count} of them)")
        for a, b in pairs:
            if fn(a & b) != images[a] & images[b]:
                errors.append(
                    f"δ({format_mask(a)} ∩ {format_mask(b)}) is not δ({format_mask(a)}) "
                    f"∩ δ({format_mask(b)})"
                )
                break
        return errors, warnings


class LiftingAxiomValidator(DensityAxiomValidator):
    """The density axioms plus the complement law and finite unions."""

    def validate_lifting(
        self, measure: FinMeasure, fn: SetFunction
    ) -> Tuple[List[str], List[str]]:
        errors, warnings = self.validate_density(measure, fn)
        full = measure.ground.full
        sets, _ = self._sets(measure)
        for a in sets:
            if fn(full & ~a) != full & ~fn(a):
                errors.append(f"complement law fails at {format_mask(a)}")
                break
        pairs, _ = self._pairs(sets)
        for a, b in pairs:
            if fn(a | b) != fn(a) | fn(b):
                errors.append(f"union law fails at {format_mask(a)}, {format_mask(b)}")
                break
        return errors, warnings


class AxiomValidator:
    """Runs the density and lifting validators over named subjects."""

    def __init__(self, config: Optional[WorkbenchConfig] = None, seed: int = 0):
        self.density_validator = DensityAxiomValidator(config, seed)
        self.lifting_validator = LiftingAxiomValidator(config, seed)

    def validate(
        self,
        densities: Optional[Dict[str, Tuple[FinMeasure, SetFunction]]] = None,
        liftings: Optional[Dict[str, Tuple[FinMeasure, SetFunction]]] = None,
        strict: bool = False,
    ) -> ValidationResult:
        """
        Validate every subject. With ``strict`` the sampling warnings count
        as errors.
        """
        result = ValidationResult()
        checks = [(name, pair, False) for name, pair in (densities or {}).items()]
        checks += [(name, pair, True) for name, pair in (liftings or {}).items()]
        for name, (measure, fn), lifting in checks:
            if lifting:
                errors, warnings = self.lifting_validator.validate_lifting(measure, fn)
            else:
                errors, warnings = self.density_validator.validate_density(measure, fn)
            for error in errors:
                result.add_error(name, error)
            for warning in warnings:
                if strict:
                    result.add_error(name, f"(strict) {warning}")
                else:
                    result.add_warning(name, warning)
        if result.error_count:
            result.add_suggestion(
                "Rebuild the object through the class-form constructors, which "
                "enforce the axioms structurally"
            )
        return result
