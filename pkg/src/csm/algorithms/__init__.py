"""The strategy registry: short names map to strategy factories."""

from .graphflow import Graphflow, gf_catalog, gf_order_for_edge
from .iedyn import IEDyn, LocalIndex
from .incisomatch import IncIsoMatch, extract_dia_subgraph
from .sjtree import IndexMemoryExceeded, SJTree, sj_edge_order
from .swap import IndexSwap, compose_index_swap
from .symbi import SymBi
from .turboflux import TurboFlux, tf_orders

STRATEGIES = {
    "im": IncIsoMatch,
    "gf": Graphflow,
    "sj": SJTree,
    "dyn": IEDyn,
    "tf": TurboFlux,
    "sym": SymBi,
    "o-gf": lambda: IndexSwap("gf"),
    "o-dyn": lambda: IndexSwap("dyn"),
    "o-tf": lambda: IndexSwap("tf"),
}


def make_strategy(name: str, **kwargs):
    try:
        factory = STRATEGIES[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(STRATEGIES)}") from None
    return factory(**kwargs)


__all__ = [
    "Graphflow", "IEDyn", "IncIsoMatch", "IndexMemoryExceeded", "IndexSwap", "LocalIndex",
    "SJTree", "STRATEGIES", "SymBi", "TurboFlux", "compose_index_swap", "extract_dia_subgraph",
    "gf_catalog", "gf_order_for_edge", "make_strategy", "sj_edge_order", "tf_orders",
]
