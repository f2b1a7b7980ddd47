"""Solver router for automatic word-problem backend selection.

The router maps a presentation's `backend` hint to a solver factory and
provides:
- Construction of HNN solvers on top of a routed base solver
- Registration of extra backends
- A listing of what is available
"""
import logging
from typing import Callable, Optional

from presentation import BackendHint, HnnStructure, Presentation, PresentationError, Structure
from solvers import (
    BrittonSolver,
    CyclicAssociation,
    DirectProductFreeSolver,
    FreeAbelianSolver,
    FreeSolver,
    FullAssociation,
    WordSolver,
)

logger = logging.getLogger(__name__)

SolverFactory = Callable[[Presentation], WordSolver]


def _free(p: Presentation) -> WordSolver:
    return FreeSolver(p.alphabet, p.backend.image_map())


def _free_abelian(p: Presentation) -> WordSolver:
    return FreeAbelianSolver(p.alphabet, p.backend.dim, p.backend.image_map())


def _direct_product(p: Presentation) -> WordSolver:
    return DirectProductFreeSolver(p.alphabet, p.backend.factors)


class SolverRouter:
    """Routes presentations to word-problem solvers by backend hint."""

    def __init__(self, factories: dict[BackendHint, SolverFactory] = None):
        """Initialize router with factories.

        Args:
            factories: Map from backend hint to factory. If None, loads defaults.
        """
        if factories is None:
            factories = self._load_default_factories()
        self.factories: dict[BackendHint, SolverFactory] = dict(factories)

    def _load_default_factories(self) -> dict[BackendHint, SolverFactory]:
        """Load the base-group backends that ship with the workbench."""
        return {
            BackendHint.FREE: _free,
            BackendHint.FREE_ABELIAN: _free_abelian,
            BackendHint.DIRECT_PRODUCT_FREE: _direct_product,
        }

    def register(self, hint: BackendHint, factory: SolverFactory):
        self.factories[hint] = factory

    def get_factory(self, hint: BackendHint) -> Optional[SolverFactory]:
        return self.factories.get(hint)

    def build(self, structure: Structure) -> WordSolver:
        """Construct the solver for a presentation or HNN structure.

        Raises:
            PresentationError: If no factory handles the backend hint.
        """
        if isinstance(structure, HnnStructure):
            return self._build_hnn(structure)
        factory = self.get_factory(structure.backend_hint)
        if factory is None:
            raise PresentationError(f"No solver for backend {structure.backend_hint.value!r}")
        solver = factory(structure)
        logger.debug(f"Routed {structure.name} to {solver.name} solver")
        return solver

    def _build_hnn(self, hnn: HnnStructure) -> BrittonSolver:
        base = self.build(hnn.base)
        associations = {}
        for s in hnn.stable_letters:
            pairs = hnn.pairs[s]
            if s in hnn.full_subgroups:
                associations[s] = FullAssociation(base, s, pairs)
            else:
                (u, v), = pairs
                associations[s] = CyclicAssociation(base, s, u, v)
        logger.debug(
            f"Routed {hnn.name} to hnn solver over {base.name} "
            f"with stable letters {', '.join(hnn.stable_letters)}"
        )
        return BrittonSolver(hnn, base, associations)

    def list_backends(self) -> list[dict]:
        """List all backends with the solver they produce."""
        rows = [
            {"hint": hint.value, "factory": factory.__name__.lstrip("_")}
            for hint, factory in self.factories.items()
        ]
        rows.append({"hint": BackendHint.HNN.value, "factory": "britton"})
        return rows


_default_router = SolverRouter()


def build_solver(structure: Structure) -> WordSolver:
    return _default_router.build(structure)
