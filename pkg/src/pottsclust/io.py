"""Evidence files: JSON lines, a ``{"frame_size": K}`` header then one
``{"focal": [...], "support": s}`` object per piece of evidence."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .evidence import EvidenceError, FrameOfDiscernment, SimpleSupport, members


def dumps_evidence(frame: FrameOfDiscernment, evidence: Iterable[SimpleSupport]) -> str:
    lines = [json.dumps({"frame_size": frame.size})]
    for e in evidence:
        lines.append(json.dumps({"focal": members(e.focal), "support": float(e.support)}))
    return "\n".join(lines) + "\n"


def write_evidence(path: str | Path, frame: FrameOfDiscernment, evidence: Sequence[SimpleSupport]) -> None:
    Path(path).write_text(dumps_evidence(frame, evidence))


def parse_evidence(fh: TextIO | Iterable[str]) -> tuple[FrameOfDiscernment, list[SimpleSupport]]:
    frame = None
    out = []
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EvidenceError(f"line {lineno}: {exc}") from None
        if frame is None:
            if "frame_size" not in obj:
                raise EvidenceError("first line must be a {\"frame_size\": K} header")
            frame = FrameOfDiscernment(int(obj["frame_size"]))
            continue
        try:
            out.append(SimpleSupport.of(frame, obj["focal"], obj["support"]))
        except KeyError as exc:
            raise EvidenceError(f"line {lineno}: missing field {exc}") from None
    if frame is None:
        raise EvidenceError("empty evidence file")
    return frame, out


def read_evidence(path: str | Path) -> tuple[FrameOfDiscernment, list[SimpleSupport]]:
    with open(path) as fh:
        return parse_evidence(fh)
