"""Finite algebras of partial functions under relative complement and domain restriction.

The package checks the defining axioms, computes atoms and completeness
properties, runs the duality with set quotients in both directions, builds
compatible completions and extends all of it to extra operations.
"""

from .algebra import (
    AbstractAlgebra,
    CompatibilityPoset,
    atoms,
    check_axioms,
    embed_poset_with_compatibility,
    is_atomic,
    is_compatibly_complete,
    is_meet_complete,
    join_of,
    meet_of,
)
from .completion import (
    CompletionWitness,
    check_smallest_largest_extension,
    compatible_completion,
    completion_uniqueness_iso,
    key_embedding,
)
from .duality import (
    CompleteHomomorphism,
    F_morphism,
    F_object,
    G_morphism,
    G_object,
    check_naturality,
    check_triangle_identities,
    counit,
    unit,
)
from .errors import (
    CapExceededError,
    ClosureError,
    DiffRestError,
    ParseError,
    PreconditionError,
    Report,
    VerificationError,
)
from .operators import (
    OperatorTable,
    QuotientRelation,
    SignedAlgebra,
    SignedQuotient,
    F_prime,
    G_prime,
    check_forth_back,
    concrete_operator_catalog,
    is_completely_additive,
    is_compatibility_preserving,
    operation_from_relation,
    relation_from_operation,
)
from .oracle import SearchBudget, algebra_isomorphic, brute_force_representation, enumerate_partial_sections
from .pfun import ConcreteAlgebra, PartialFunction, close_under_ops, domain_restriction, relative_complement
from .setq import QuotientMorphism, SetQuotient, quotients_isomorphic, validate_morphism

__version__ = "0.1.0"
