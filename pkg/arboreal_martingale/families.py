"""
Built-in permutation group families in their natural actions.
"""

import logging
from typing import List, Optional, Tuple

from pydantic import ValidationError
from sympy import primefactors
from sympy.combinatorics.named_groups import AlternatingGroup, CyclicGroup, DihedralGroup, SymmetricGroup

from .exceptions import InvalidParamsError
from .group import FiniteGroup, SubgroupPair, find_index_p_normal_pairs
from .models import CatalogEntry, FamilyName, FamilySpec
from .perm import Perm

logger = logging.getLogger(__name__)

KLEIN_GROUPS = {
    12: ('alternating', 4),
    24: ('symmetric', 4),
    60: ('alternating', 5),
}


def parse_family(text: str) -> FamilySpec:
    """Parse ``name:params`` such as ``dihedral:4`` or ``dihedral:6:rs``."""
    try:
        return FamilySpec.parse(text)
    except ValidationError as e:
        raise InvalidParamsError(f"invalid family {text!r}: {e.errors()[0]['msg']}")


def cyclic(n: int) -> FiniteGroup:
    """C_n generated by (1 2 ... n)."""
    return FiniteGroup.from_sympy(CyclicGroup(n))


def dihedral_generators(m: int) -> Tuple[Perm, Perm]:
    """r = (1 2 ... m) and the reflection s: i -> 2 - i (mod m) fixing vertex 1."""
    r = Perm.from_cycles([tuple(range(1, m + 1))], m)
    s = Perm([((2 - i) % m) or m for i in range(1, m + 1)])
    return r, s


def dihedral(m: int) -> FiniteGroup:
    if m < 3:
        raise InvalidParamsError(f"dihedral groups need m >= 3, got {m}")
    return FiniteGroup.from_sympy(DihedralGroup(m), dihedral_generators(m))


def dihedral_pair(m: int, variant: Optional[str] = None) -> Optional[SubgroupPair]:
    """The index-2 pair of D_m for even m: N1 = <r> (or <r^2, rs>) and N2 = <r^2, s>.

    Odd m has no pair.
    """
    if m % 2:
        return None
    G = dihedral(m)
    r, s = dihedral_generators(m)
    if variant in (None, 'r'):
        n1 = G.subgroup([r])
    elif variant == 'rs':
        n1 = G.subgroup([r ** 2, r * s])
    else:
        raise InvalidParamsError(f"unknown dihedral variant {variant!r}; use 'r' or 'rs'")
    n2 = G.subgroup([r ** 2, s])
    return SubgroupPair.build(G, n1, n2)


def symmetric(n: int) -> FiniteGroup:
    return FiniteGroup.from_sympy(SymmetricGroup(n))


def alternating(n: int) -> FiniteGroup:
    return FiniteGroup.from_sympy(AlternatingGroup(n))


def klein_group(order: int) -> FiniteGroup:
    """A4 (order 12), S4 (order 24) or A5 (order 60) in their natural actions."""
    if order not in KLEIN_GROUPS:
        raise InvalidParamsError(f"klein_catalog takes 12, 24 or 60, got {order}")
    name, degree = KLEIN_GROUPS[order]
    return alternating(degree) if name == 'alternating' else symmetric(degree)


def build_family(spec: FamilySpec) -> Tuple[FiniteGroup, Optional[SubgroupPair]]:
    """Construct the group of a family spec and, for even dihedral groups, its pair.

    Raises:
        InvalidParamsError: If the parameters do not fit the family.
    """
    if len(spec.params) != 1:
        raise InvalidParamsError(f"{spec.name.value} takes exactly one parameter, got {spec.params}")
    (k,) = spec.params
    if spec.variant and spec.name != FamilyName.DIHEDRAL:
        raise InvalidParamsError(f"{spec.name.value} has no variant {spec.variant!r}")

    if spec.name == FamilyName.CYCLIC:
        return cyclic(k), None
    if spec.name == FamilyName.DIHEDRAL:
        G = dihedral(k)
        return G, dihedral_pair(k, spec.variant)
    if spec.name == FamilyName.SYMMETRIC:
        return symmetric(k), None
    if spec.name == FamilyName.ALTERNATING:
        if k < 3:
            raise InvalidParamsError(f"alternating groups need n >= 3, got {k}")
        return alternating(k), None
    return klein_group(k), None


def klein_catalog(max_degree: int) -> List[Tuple[FamilySpec, FiniteGroup]]:
    """Cyclic and dihedral groups up to the given degree, then A4, S4 and A5 as they fit."""
    entries = []
    for n in range(2, max_degree + 1):
        entries.append((FamilySpec(name=FamilyName.CYCLIC, params=[n]), cyclic(n)))
    for m in range(3, max_degree + 1):
        entries.append((FamilySpec(name=FamilyName.DIHEDRAL, params=[m]), dihedral(m)))
    for order, (_, degree) in KLEIN_GROUPS.items():
        if degree <= max_degree:
            entries.append((FamilySpec(name=FamilyName.KLEIN_CATALOG, params=[order]), klein_group(order)))
    return entries


def catalog_entry(spec: FamilySpec, G: FiniteGroup) -> CatalogEntry:
    """Count the (transitive, intransitive) index-p normal pairs for every prime p dividing |G|."""
    pairs = {str(p): len(find_index_p_normal_pairs(G, p)) for p in primefactors(G.order)}
    logger.debug("%s: pairs by prime %s", spec, pairs)
    return CatalogEntry(family=str(spec), degree=G.degree, order=G.order, pairs_by_prime=pairs)
