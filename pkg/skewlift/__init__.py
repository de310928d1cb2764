"""
skewlift - finite-model workbench for liftings of skew products

Builds lower densities and liftings on finite probability spaces exactly
(rational arithmetic, bitset events) and verifies, instance by instance, the
constructions around skew products: disintegrations, section-compatible
conditional expectations, product densities whose sections are fixed by an
equi-admissible family, splitting liftings, the nil extension and measurable
versions of processes.

BASIC USAGE
===========

    from skewlift import InstanceGenerator, InstanceSpec, run_checks

    instance = InstanceGenerator().generate(
        InstanceSpec(seed=1, size_x=4, size_y=3, null_rate=0.3)
    )
    records = run_checks(instance, ["t2", "p3", "t3"])

    from skewlift import CampaignReport
    print(CampaignReport(records).summary())

STEP BY STEP
============

    from skewlift.prodlift import build_phi_T2, saturate_psi_p3, build_split_lifting_T3

    phi = build_phi_T2(instance.skew, instance.dis, instance.c, instance.family())
    split = build_split_lifting_T3(saturate_psi_p3(phi))
    split.splitting_defects()   # [] : every [π(E)]^y is fixed by σ_y
"""

from .checks import CHECK_ORDER, CheckPlanner, run_campaign, run_checks
from .finspace import CompleteSpace, FinMeasure, GroundSet, InputError, SigmaAlg
from .generate import Instance, InstanceGenerator
from .instance_loader import InstanceLoader
from .prodlift import ConsistencyError, InnerRegularityError
from .product import Disintegration, PreconditionError, ProductSpace, SkewProduct
from .reports import CampaignReport, CheckRecord
from .schemas import InstanceSpec, WorkbenchConfig
from .validators import AxiomValidator, ValidationResult

__all__ = [
    "CHECK_ORDER",
    "CheckPlanner",
    "run_campaign",
    "run_checks",
    "CompleteSpace",
    "FinMeasure",
    "GroundSet",
    "InputError",
    "SigmaAlg",
    "Instance",
    "InstanceGenerator",
    "InstanceLoader",
    "ConsistencyError",
    "InnerRegularityError",
    "Disintegration",
    "PreconditionError",
    "ProductSpace",
    "SkewProduct",
    "CampaignReport",
    "CheckRecord",
    "InstanceSpec",
    "WorkbenchConfig",
    "AxiomValidator",
    "ValidationResult",
]

__version__ = "0.1.0"
__license__ = "MIT"
__description__ = (
    "Exact finite-model workbench for lower densities, liftings, skew products "
    "and measurable versions of processes."
)
