"""Fuzzy-rough nearest-neighbour (FRNN-OWA) classification and ensembles for
ordinal emotion-intensity prediction on tweet embeddings."""
__version__ = "0.1.0"
