"""Campaign drivers: windowed pair searches, coefficient enumeration,
brute-force oracles, record persistence, and f(k) assembly."""

from .params import (
    DCursor,
    SearchParams,
    count_equations,
    derive_params,
    enumerate_coefficients,
)
from .records import (
    Checkpoint,
    IntegrityError,
    RecordStore,
    SmoothWindowRecord,
    parse_record_line,
)
from .drivers import (
    CampaignResult,
    EquationFailure,
    bauer_bennett_search,
    brute_force_windows,
    lehmer_search,
    run_campaign,
)
from .ftable import (
    BruteEvidence,
    CampaignEvidence,
    FValue,
    assemble_f,
    known_f,
    verify_table,
)

__all__ = [
    "DCursor",
    "SearchParams",
    "count_equations",
    "derive_params",
    "enumerate_coefficients",
    "Checkpoint",
    "IntegrityError",
    "RecordStore",
    "SmoothWindowRecord",
    "parse_record_line",
    "CampaignResult",
    "EquationFailure",
    "bauer_bennett_search",
    "brute_force_windows",
    "lehmer_search",
    "run_campaign",
    "BruteEvidence",
    "CampaignEvidence",
    "FValue",
    "assemble_f",
    "known_f",
    "verify_table",
]
