"""Entangled versus independent decay-plane correlations in J/psi -> Lambda Lambdabar."""
from .constants import A_LAMBDA, MASSES
from .events import Event, EventTable, read_events, write_events
from .generator import GenConfig, generate
from .models import AlphaPdf, hvt_alpha_pdf, qm_alpha_pdf

__version__ = "0.1.0"

__all__ = [
    "A_LAMBDA",
    "MASSES",
    "AlphaPdf",
    "Event",
    "EventTable",
    "GenConfig",
    "generate",
    "hvt_alpha_pdf",
    "qm_alpha_pdf",
    "read_events",
    "write_events",
]
