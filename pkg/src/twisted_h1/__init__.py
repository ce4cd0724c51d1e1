"""Nonabelian cohomology H¹(Z/nZ, G) of compact matrix groups via twisted Weyl groups."""
from .automorphism import (
    ANTIHOL,
    HOL,
    LATTICE,
    Automorphism,
    compose,
    conjugation,
    identity_automorphism,
    inner_twist,
    is_one_semisimple,
    make_automorphism,
    order_of,
    power,
)
from .cohomology import (
    COMPLETE,
    INCOMPLETE,
    CohomologyClass,
    CohomologyResult,
    H1Config,
    classify,
    cocycle_norm_check,
    compute_h1,
    decide_cohomologous_Z,
    torus_h1_Z,
)
from .errors import *  # noqa: F401,F403
from .fixed_torus import (
    FixedTorus,
    TorsionPoint,
    fixed_subalgebra,
    maximal_torus_in_fixed,
    torsion_points,
    torus_from_basis,
)
from .group_model import (
    AlgebraElement,
    GroupDescriptor,
    GroupElement,
    contains,
    exp_map,
    make_group,
    project_to_group,
    random_element,
)
from .twisted_conjugacy import (
    CONJUGATE,
    NOT_CONJUGATE,
    UNDECIDED,
    ConjugacyDecision,
    are_sigma_conjugate,
    twisted_conjugate,
    verify_witness,
)
from .twisted_weyl import (
    TwistedWeylGroup,
    WeylGenerator,
    close_and_partition,
    find_weyl_generators,
    is_in_Nsigma,
    is_in_Zsigma,
)
from .verifier import CheckReport, run_suite

__version__ = "0.1.0"
