"""Executable biological bigraphical reactive systems."""
from .graph import (Bigraph, Control, Interface, Signature, Site, Root, compose, tensor, parallel,
                    prime, support_equiv, discrete_decompose)

__all__ = ["Bigraph", "Control", "Interface", "Signature", "Site", "Root", "compose", "tensor",
           "parallel", "prime", "support_equiv", "discrete_decompose"]
