"""Membrane and mobility controls, and signature builders."""
from __future__ import annotations

from typing import Mapping

from .graph import Control, Signature

M_EXT = Control("m^ext", 0, "active", "polar", "membrane")
M_CYS = Control("m^cys", 0, "active", "apolar", "membrane")

P_C = Control("p^c", 1, "passive", "polar", "mobility")
P_M = Control("p^m", 2, "passive", "apolar", "mobility")
P_D = Control("p^d", 1, "atomic", "polar", "mobility")
F_C = Control("f^c", 1, "passive", "polar", "mobility")
F_M = Control("f^m", 2, "atomic", "apolar", "mobility")
F_D = Control("f^d", 1, "atomic", "polar", "mobility")

MEMBRANE = (M_EXT, M_CYS)
PINCH_TRIPLE = (P_C, P_M, P_D)
FUSE_TRIPLE = (F_C, F_M, F_D)
MOBILITY = PINCH_TRIPLE + FUSE_TRIPLE

# mobility port-pair linkage allowed by the Mobil sorting: (control, port) pairs
MOBILITY_PAIRS = frozenset({
    frozenset({("p^m", 0), ("p^c", 0)}),
    frozenset({("p^m", 1), ("p^d", 0)}),
    frozenset({("f^m", 0), ("f^c", 0)}),
    frozenset({("f^m", 1), ("f^d", 0)}),
})

FREEZING = frozenset({"p^c", "p^m", "f^c"})


def protein(name: str, arity: int, polarity: str = "polar") -> Control:
    return Control(name, arity, "atomic", polarity, "protein")


def protein_signature(arities: Mapping[str, int]) -> Signature:
    """Protein controls only; used for plain protein link graphs."""
    sig = Signature()
    for name, ar in arities.items():
        sig.add(protein(name, ar, "neutral"))
    return sig


def bio_signature(polar: Mapping[str, int] = (), apolar: Mapping[str, int] = ()) -> Signature:
    """Membrane + mobility controls plus the given polar/apolar proteins."""
    sig = Signature()
    for c in MEMBRANE + MOBILITY:
        sig.add(c)
    for name, ar in dict(polar).items():
        sig.add(protein(name, ar, "polar"))
    for name, ar in dict(apolar).items():
        sig.add(protein(name, ar, "apolar"))
    return sig


def is_bio_signature(sig: Signature) -> bool:
    if any(sig.controls.get(c.name) != c for c in MEMBRANE + MOBILITY):
        return False
    return all(c.activity == "atomic" for c in sig.controls.values() if c.kind == "protein")
