"""Session transcripts: the summary, plus per-round detail for small runs."""

from typing import Any, Dict, Optional

from mdi_qpq.config import simulation_config

from .models import SiftRun


def session_transcript(
    run: SiftRun, summary: Dict[str, Any], round_cap: Optional[int] = None
) -> Dict[str, Any]:
    """Transcript document; rounds are elided when more than round_cap were kept."""
    cap = simulation_config.transcript_round_cap if round_cap is None else round_cap
    transcript: Dict[str, Any] = {"summary": summary}
    if run.retained_count <= cap:
        transcript["rounds"] = [r.to_dict() for r in run.sift_rounds()]
        transcript["rounds_elided"] = False
    else:
        transcript["rounds"] = []
        transcript["rounds_elided"] = True
    return transcript
