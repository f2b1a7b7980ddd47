"""Word-problem solvers for the workbench.

Each solver implements the WordSolver interface and produces canonical
element keys.

Included solvers:
- free - free groups, with optional abbreviation letters (c=abAB)
- free-abelian - Z^n with letters mapped to lattice vectors
- direct-product-free - products of free groups through a letter map
- hnn - multiple HNN extensions via Britton's lemma over any of the above

To add your own solver:
1. Create a class inheriting from WordSolver
2. Implement: name, identity, step(), multiply(), inverse()
3. Register a factory in router.py
"""
from .base import (
    ElementKey,
    FullSubgroup,
    SubgroupOracle,
    TrivialSubgroup,
    WordSolver,
    trace_word,
)
from .abelian import FreeAbelianSolver, LatticeCyclicSubgroup, cyclic_membership_lattice
from .free import FreeCyclicSubgroup, FreeSolver, cyclic_membership_free
from .product import DirectProductFreeSolver, eval_stallings
from .britton import (
    Association,
    BrittonSolver,
    CyclicAssociation,
    FullAssociation,
    Pinch,
    PinchDirection,
    make_cyclic_oracle,
)

__all__ = [
    "ElementKey",
    "WordSolver",
    "SubgroupOracle",
    "FullSubgroup",
    "TrivialSubgroup",
    "trace_word",
    "FreeSolver",
    "FreeCyclicSubgroup",
    "cyclic_membership_free",
    "FreeAbelianSolver",
    "LatticeCyclicSubgroup",
    "cyclic_membership_lattice",
    "DirectProductFreeSolver",
    "eval_stallings",
    "Association",
    "CyclicAssociation",
    "FullAssociation",
    "BrittonSolver",
    "Pinch",
    "PinchDirection",
    "make_cyclic_oracle",
]
