"""Turkish GEC toolkit: synthesize parallel correction corpora from
organic text via spelling-dictionary fixpoint expansion and clean
insertions, and score correction systems with an M2-based span scorer."""

__version__ = "0.1.0"
