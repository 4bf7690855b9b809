"""deskhammer: a desk-scale hammer service for first-order article corpora.

Parse and verify by-justified inferences, find proofs with premise
selection over a multi-article library, explain and minimize the premises
used, and serve learned hints.
"""

from .corpus import CorpusSnapshot, Fact, FactRef, load_snapshot
from .prover import ProofObject, ProverConfig, prove
from .service import HammerService

__all__ = [
    "CorpusSnapshot",
    "Fact",
    "FactRef",
    "HammerService",
    "ProofObject",
    "ProverConfig",
    "load_snapshot",
    "prove",
]
