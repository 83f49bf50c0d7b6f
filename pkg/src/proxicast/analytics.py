"""Offline analysis of session event logs against declared intimacy rankings.

The pipeline: accumulate per-peer dwell time on each distance rank from the
server's JSONL mutation log, take the dominant rank per peer, cross-tabulate
against the subject's declared intimacy order, and report how concentrated
the counts are on the diagonal.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class AnalyticsError(Exception):
    """Base class for analytics errors."""


class EmptyLogError(AnalyticsError):
    pass


class LogFormatError(AnalyticsError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}")


class PeerSetMismatchError(AnalyticsError):
    def __init__(self, subject: str, reason: str):
        self.subject = subject
        super().__init__(f"subject {subject!r}: {reason}")


@dataclass(frozen=True)
class LogEvent:
    t: float
    room: str
    type: str
    payload: dict


@dataclass(frozen=True)
class IntimacyDeclaration:
    """A subject's peers ordered nearest intimacy first."""

    subject: str
    ranking: tuple[str, ...]

    def __post_init__(self) -> None:
        ranking = tuple(self.ranking)
        if not ranking:
            raise AnalyticsError(f"subject {self.subject!r}: ranking must be non-empty")
        if len(set(ranking)) != len(ranking):
            raise AnalyticsError(f"subject {self.subject!r}: ranking repeats a peer")
        if self.subject in ranking:
            raise AnalyticsError(f"subject {self.subject!r}: cannot rank themselves")
        object.__setattr__(self, "ranking", ranking)


def parse_event_log(text: str) -> list[LogEvent]:
    """Parse the server's JSONL mutation log; empty input is an error."""
    events: list[LogEvent] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except ValueError as exc:
            raise LogFormatError(line_no, f"invalid JSON ({exc})") from exc
        if not isinstance(obj, dict):
            raise LogFormatError(line_no, "expected a JSON object")
        t = obj.get("t")
        room = obj.get("room")
        etype = obj.get("type")
        payload = obj.get("payload")
        if not isinstance(t, (int, float)) or isinstance(t, bool):
            raise LogFormatError(line_no, "t must be a number")
        if not isinstance(room, str) or not isinstance(etype, str):
            raise LogFormatError(line_no, "room and type must be strings")
        if not isinstance(payload, dict):
            raise LogFormatError(line_no, "payload must be an object")
        events.append(LogEvent(float(t), room, etype, payload))
    if not events:
        raise EmptyLogError("empty-input: the event log contains no events")
    return events


def load_declarations(text: str) -> list[IntimacyDeclaration]:
    """Parse the declarations file: [{"subject": ..., "ranking": [...]}]."""
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise AnalyticsError(f"declarations are not valid JSON: {exc}") from exc
    if not isinstance(doc, list) or not doc:
        raise AnalyticsError("declarations must be a non-empty list")
    declarations = []
    seen: set[str] = set()
    for idx, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise AnalyticsError(f"declaration #{idx}: must be an object")
        subject = entry.get("subject")
        ranking = entry.get("ranking")
        if not isinstance(subject, str) or not subject:
            raise AnalyticsError(f"declaration #{idx}: subject must be a non-empty string")
        if subject in seen:
            raise AnalyticsError(f"subject {subject!r} declared twice")
        seen.add(subject)
        if not isinstance(ranking, list) or any(not isinstance(p, str) for p in ranking):
            raise AnalyticsError(f"subject {subject!r}: ranking must be a list of peer ids")
        declarations.append(IntimacyDeclaration(subject, tuple(ranking)))
    return declarations


def room_events(events: Iterable[LogEvent], room: str) -> list[LogEvent]:
    return sorted((e for e in events if e.room == room), key=lambda e: e.t)


def viewer_of(evts: Sequence[LogEvent]) -> str | None:
    """The room's designated spatial viewer: its first observer join."""
    for e in evts:
        if e.type == "join" and e.payload.get("observer"):
            pid = e.payload.get("participant")
            if isinstance(pid, str):
                return pid
    return None


def viewer_rooms(events: Iterable[LogEvent]) -> dict[str, str]:
    """Map viewer participant -> room id, for every room that has a viewer."""
    events = list(events)
    result: dict[str, str] = {}
    for room in sorted({e.room for e in events}):
        viewer = viewer_of(room_events(events, room))
        if viewer is None:
            continue
        if viewer in result:
            raise AnalyticsError(
                f"participant {viewer!r} is the viewer of both rooms "
                f"{result[viewer]!r} and {room!r}"
            )
        result[viewer] = room
    return result


def dwell_by_peer(evts: Sequence[LogEvent]) -> dict[str, dict[int, float]]:
    """Seconds each assigned participant spent on each distance rank.

    Dwell accrues between consecutive events according to the layout each
    event left behind; nothing accrues after the final event.
    """
    dwell: dict[str, dict[int, float]] = defaultdict(lambda: defaultdict(float))
    for cur, nxt in zip(evts, evts[1:]):
        layout = cur.payload.get("layout")
        if not isinstance(layout, dict):
            continue
        order = layout.get("slot_order", [])
        ranks = {sid: k for k, sid in enumerate(order)}
        dt = nxt.t - cur.t
        if dt <= 0:
            continue
        for pid, sid in layout.get("assignment", {}).items():
            if sid in ranks:
                dwell[pid][ranks[sid]] += dt
    return {pid: dict(by_rank) for pid, by_rank in dwell.items()}


def dominant_distance_ranking(
    events: Iterable[LogEvent], subject: str
) -> dict[str, int]:
    """Per peer, the distance rank they occupied longest in the subject's room.

    The subject's room is the one where they are the designated spatial
    viewer. Dwell ties break toward the nearer rank.
    """
    events = list(events)
    if not events:
        raise EmptyLogError("empty-input: no events")
    rooms = viewer_rooms(events)
    if subject not in rooms:
        raise AnalyticsError(f"no session room with spatial viewer {subject!r}")
    evts = room_events(events, rooms[subject])
    dwell = dwell_by_peer(evts)
    if not dwell:
        raise AnalyticsError(f"no dwell time recorded in room {rooms[subject]!r}")
    ranking: dict[str, int] = {}
    for peer, by_rank in dwell.items():
        best = max(by_rank.values())
        ranking[peer] = min(r for r, secs in by_rank.items() if secs == best)
    return ranking


@dataclass(frozen=True)
class ConcordanceMatrix:
    """Square cross-tabulation: rows are distance ranks, columns intimacy ranks."""

    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.counts)
        counts = tuple(tuple(int(c) for c in row) for row in self.counts)
        if any(len(row) != n for row in counts) or n == 0:
            raise AnalyticsError("matrix must be square and non-empty")
        if any(c < 0 for row in counts for c in row):
            raise AnalyticsError("matrix entries must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def size(self) -> int:
        return len(self.counts)

    def trace(self) -> int:
        return sum(self.counts[i][i] for i in range(self.size))

    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def as_lists(self) -> list[list[int]]:
        return [list(row) for row in self.counts]


def subject_matrix(
    declaration: IntimacyDeclaration, distance_ranking: Mapping[str, int]
) -> list[list[int]]:
    """One subject's permutation matrix of distance rank vs intimacy rank."""
    peers = set(declaration.ranking)
    if set(distance_ranking) != peers:
        raise PeerSetMismatchError(
            declaration.subject,
            f"declared peers {sorted(peers)} but distance-ranked peers "
            f"{sorted(distance_ranking)}",
        )
    n = len(declaration.ranking)
    if sorted(distance_ranking.values()) != list(range(n)):
        raise AnalyticsError(
            f"subject {declaration.subject!r}: distance ranks must be a "
            f"permutation of 0..{n - 1}"
        )
    m = [[0] * n for _ in range(n)]
    for intimacy_rank, peer in enumerate(declaration.ranking):
        m[distance_ranking[peer]][intimacy_rank] += 1
    return m


def crosstab(
    declarations: Sequence[IntimacyDeclaration],
    rankings: Mapping[str, Mapping[str, int]],
) -> ConcordanceMatrix:
    """Aggregate matrix over subjects: m[d][i] counts (subject, peer) pairs
    whose peer sits at distance rank d and intimacy rank i."""
    if not declarations:
        raise AnalyticsError("no declarations to cross-tabulate")
    n = len(declarations[0].ranking)
    total = [[0] * n for _ in range(n)]
    for dec in declarations:
        if len(dec.ranking) != n:
            raise AnalyticsError(
                f"subject {dec.subject!r}: expected {n} peers, got {len(dec.ranking)}"
            )
        if dec.subject not in rankings:
            raise PeerSetMismatchError(dec.subject, "no distance ranking for subject")
        m = subject_matrix(dec, rankings[dec.subject])
        for d in range(n):
            for i in range(n):
                total[d][i] += m[d][i]
    return ConcordanceMatrix(tuple(tuple(row) for row in total))


def _is_diagonal(matrix: Sequence[Sequence[int]]) -> bool:
    return all(
        c == 0 for d, row in enumerate(matrix) for i, c in enumerate(row) if d != i
    )


def conformity_stats(
    matrix: ConcordanceMatrix, per_subject: Sequence[Sequence[Sequence[int]]]
) -> dict:
    """Diagonal concentration of the aggregate plus per-subject conformity."""
    n = matrix.size
    summed = [[0] * n for _ in range(n)]
    for m in per_subject:
        for d in range(n):
            for i in range(n):
                summed[d][i] += m[d][i]
    if summed != matrix.as_lists():
        raise AnalyticsError("per-subject matrices do not sum to the aggregate matrix")
    diagonal_count = matrix.trace()
    total = matrix.total()
    return {
        "diagonal_count": diagonal_count,
        "total": total,
        "diagonal_ratio": diagonal_count / total if total else 0.0,
        "fully_conforming_subjects": sum(1 for m in per_subject if _is_diagonal(m)),
    }


RANK_LABELS_3 = ("close", "middle", "far")


def analyze(
    events: Iterable[LogEvent], declarations: Sequence[IntimacyDeclaration]
) -> dict:
    """Full pipeline: event log + declarations -> concordance report.

    Declared subjects and viewer rooms in the log must match one-to-one;
    either direction missing is an error naming the subject.
    """
    events = list(events)
    if not events:
        raise EmptyLogError("empty-input: no events")
    rooms = viewer_rooms(events)
    declared = {d.subject for d in declarations}
    for viewer in sorted(rooms):
        if viewer not in declared:
            raise AnalyticsError(
                f"declarations missing subject {viewer!r} "
                f"(viewer of room {rooms[viewer]!r})"
            )
    for subject in sorted(declared):
        if subject not in rooms:
            raise AnalyticsError(f"no session room with spatial viewer {subject!r}")

    rankings = {d.subject: dominant_distance_ranking(events, d.subject) for d in declarations}
    per_subject = {d.subject: subject_matrix(d, rankings[d.subject]) for d in declarations}
    matrix = crosstab(declarations, rankings)
    stats = conformity_stats(matrix, [per_subject[d.subject] for d in declarations])
    return {
        "matrix": matrix.as_lists(),
        **stats,
        "subject_count": len(declarations),
        "per_subject": [
            {
                "subject": d.subject,
                "room": rooms[d.subject],
                "distance_ranking": rankings[d.subject],
                "matrix": per_subject[d.subject],
                "conforming": _is_diagonal(per_subject[d.subject]),
            }
            for d in declarations
        ],
    }


def matrix_csv(matrix: ConcordanceMatrix) -> str:
    """CSV rendering of the matrix with rank labels."""
    n = matrix.size
    labels = RANK_LABELS_3 if n == 3 else tuple(f"rank{k}" for k in range(n))
    lines = ["dist\\intim," + ",".join(labels)]
    for d, row in enumerate(matrix.counts):
        lines.append(labels[d] + "," + ",".join(str(c) for c in row))
    return "\n".join(lines) + "\n"
