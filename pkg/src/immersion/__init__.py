"""Strong immersions of complete graphs in graphs of large minimum degree."""

from .certify import ImmersionCertificate, Verdict, host_digest, lift_certificate, verify_strong_immersion
from .errors import ImmersionError
from .extract import extract, extract_from_eulerian, run_extraction
from .multigraph import DerivationLog, MultiGraph
from .oracle import Exhausted, No, OracleBudget, Yes, decide_immersion

__all__ = [
    "DerivationLog",
    "Exhausted",
    "ImmersionCertificate",
    "ImmersionError",
    "MultiGraph",
    "No",
    "OracleBudget",
    "Verdict",
    "Yes",
    "decide_immersion",
    "extract",
    "extract_from_eulerian",
    "host_digest",
    "lift_certificate",
    "run_extraction",
    "verify_strong_immersion",
]
