"""Context-adaptive wellbeing intervention toolkit.

Per-activity-context Beta-Bernoulli Thompson Sampling with survey-elicited
priors, comparison baselines, a decision-point simulator, a passive-sensing
feature pipeline, receptivity analytics, and a live HTTP decision service.
"""

__version__ = "0.1.0"

from . import analytics, domain, ingest, policies, simulator  # noqa: F401
