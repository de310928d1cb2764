"""
Shared fixtures: small hand-built skew products whose constructions are
known in closed form.
"""
from fractions import Fraction

import pytest

from skewlift.densities import GeneratorSequence
from skewlift.finspace import FinMeasure, GroundSet, SigmaAlg
from skewlift.generate import Instance, InstanceGenerator
from skewlift.prodlift import build_phi_T2, build_split_lifting_T3, saturate_psi_p3
from skewlift.product import (
    ProductSpace,
    SkewProduct,
    disintegrate,
    make_inner_regular_subalgebra,
)
from skewlift.schemas import InstanceSpec, default_config

HALF = Fraction(1, 2)


def _instance(p, q, matrix, name):
    space = ProductSpace(p, q)
    r = SkewProduct.from_matrix(space, matrix)
    dis = disintegrate(r)
    c = make_inner_regular_subalgebra(r, dis)
    return Instance(r, dis, c, GeneratorSequence.from_algebra(c), name=name)


@pytest.fixture(autouse=True)
def fresh_config():
    """Make every test see the configuration of its own environment."""
    default_config.cache_clear()
    yield
    default_config.cache_clear()


@pytest.fixture
def diagonal():
    """
    X = {0, 1, 2} with P = (1/2, 1/2, 0), Y = {0, 1} with Q = (1/2, 1/2),
    all algebras discrete, R({(0,0)}) = R({(1,1)}) = 1/2.

    Pair indices: (0,0)=0 (1,0)=1 (2,0)=2 (0,1)=3 (1,1)=4 (2,1)=5.
    """
    p = FinMeasure.from_weights([HALF, HALF, 0])
    q = FinMeasure.from_weights([HALF, HALF])
    return _instance(p, q, [[HALF, 0], [0, HALF], [0, 0]], "diagonal")


@pytest.fixture
def uniform():
    """
    X = {0, 1} discrete and uniform, Y = {0, 1} uniform with 𝔅 trivial and
    R uniform, so S_y is uniform for both y.

    Pair indices: (0,0)=0 (1,0)=1 (0,1)=2 (1,1)=3.
    """
    p = FinMeasure.from_weights([HALF, HALF])
    y_ground = GroundSet(2)
    q = FinMeasure(SigmaAlg.trivial(y_ground), (HALF, HALF))
    quarter = Fraction(1, 4)
    return _instance(p, q, [[quarter, quarter], [quarter, quarter]], "uniform")


def _split(instance):
    phi = build_phi_T2(instance.skew, instance.dis, instance.c, instance.family())
    return build_split_lifting_T3(saturate_psi_p3(phi))


@pytest.fixture
def diagonal_split(diagonal):
    return _split(diagonal)


@pytest.fixture
def uniform_split(uniform):
    return _split(uniform)


@pytest.fixture
def generated():
    """A seeded random instance with null points."""
    return InstanceGenerator().generate(
        InstanceSpec(seed=1, size_x=3, size_y=2, null_rate=0.3)
    )
