"""Contradiction-focused claim-pair tooling for biomedical literature.

The package covers the full pipeline: claim corpus ingestion and filtering,
sentence-embedding and polarity machinery, heuristic candidate-pair sampling,
leakage-free graph splits, annotation label logic and agreement statistics,
curriculum planning for staged fine-tuning, sparse-feature NLI baselines,
evaluation metrics, and a contradiction miner that ranks disputed claims
for expert review.
"""

__version__ = "0.1.0"
