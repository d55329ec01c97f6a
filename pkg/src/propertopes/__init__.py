"""Colored PROPs, slice constructions, propertopes, and weak-n verification.

The package builds up in layers: colored PROPs and their algebras
(``core``, ``builtins``, ``operads``, ``freeprop``), decorated acyclic port
graphs with layered evaluation and substitution (``graphs``), the slice
construction and the integration/differentiation correspondence
(``slices``), the category of propertopes with face-map chains and the
metagraph codec (``facecat``), and finitely supported propertopic sets with
horn/boundary filling and weak-n checks (``presheaves``).  ``cli`` exposes
the batch command surface and ``formats`` the JSON file schemas.
"""

from .builtins import (
    EndomorphismProp,
    InitialProp,
    TableProp,
    TerminalColoredProp,
    TerminalProp,
    endomorphism_bool,
    make_builtin,
)
from .core import (
    ArityError,
    ColorError,
    CompositionError,
    GradedSet,
    OutOfWindowError,
    OwnershipError,
    PropAlgebra,
    PropElement,
    PropError,
    PropImpl,
    PropMap,
    Report,
    algebra_act,
    profile,
    profile_act,
    profile_ract,
)
from .facecat import (
    FaceMap,
    Metagraph,
    MorphismChain,
    Propertope,
    chain_compose,
    chain_equal,
    decode_metagraph,
    encode_metagraph,
    faces,
    iterated,
    propertope_from_element,
    validate_propertope,
)
from .freeprop import FreeProp, FreeSampler, free_prop
from .graphs import (
    Component,
    DecoratedGraph,
    LevelDecomposition,
    MNGraph,
    canonicalize,
    decorate,
    evaluate,
    level_decompose,
    make_graph,
    single_vertex_component,
    substitute,
    substitute_many,
    validate_decoration,
    validate_mn_graph,
)
from .lawcheck import check_algebra_laws, check_algebra_morphism, check_prop_laws, check_prop_map
from .operads import (
    AssociativeOperad,
    ColoredOperad,
    OperadElement,
    TableOperad,
    TerminalOperad,
    UnitOperad,
    check_operad_laws,
    operad_to_prop,
    prop_to_operad,
)
from .perms import Perm, block_perm, block_sum
from .presheaves import (
    Boundary,
    Horn,
    PropertopicMap,
    PropertopicSet,
    check_weak_n,
    compose_cells,
    em_reflect,
    fillings,
    is_fibration,
    map_propertope,
    phi_extract,
    psi_build,
    pullback,
    special_universe,
    standard_sets,
    underlying_category,
    validate_presheaf,
)
from .slices import (
    PropOverP,
    SliceProp,
    SliceSampler,
    differentiate,
    integrate,
    make_special,
    slice_prop,
    validate_slice_element,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
