"""Collaboration sessions: join/leave, map positions, shot hints, snapshots.

The server is authoritative. Position updates carry a per-user sequence
number and only monotonically newer ones are applied, which makes replays
and reconnects safe without clocks. A SpectatorView snapshot is an immutable,
JSON-ready copy of the whole session at one revision.

Wire form: one UTF-8 JSON object per message (newline-delimited on raw
sockets, one object per frame on WebSockets).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .errors import MalformedMessage, MalformedWire

ROLES = ("expert", "novice")
MESSAGE_TYPES = ("join", "leave", "position", "hint")
HINT_LOG_CAPACITY = 50
MAX_NOTE_LENGTH = 280


class Effect(Enum):
    APPLIED = "applied"
    IGNORED_STALE = "ignored_stale"
    REJECTED_UNKNOWN_USER = "rejected_unknown_user"
    REJECTED_UNKNOWN_RECIPIENT = "rejected_unknown_recipient"


@dataclass(frozen=True)
class CollabMessage:
    type: str
    session: str
    user: str
    role: str | None = None  # join
    map_id: str | None = None  # position
    cell: int | None = None  # position
    seq: int | None = None  # position
    to: str | None = None  # hint (absent = broadcast)
    video_id: str | None = None  # hint
    shot_index: int | None = None  # hint
    note: str | None = None  # hint


# Wire key -> dataclass field, per message type; "to" is the only optional one.
_WIRE_FIELDS: dict[str, dict[str, str]] = {
    "join": {"role": "role"},
    "leave": {},
    "position": {"map": "map_id", "cell": "cell", "seq": "seq"},
    "hint": {"video": "video_id", "shot": "shot_index", "note": "note"},
}
_OPTIONAL_WIRE_FIELDS = {"hint": {"to": "to"}}


def validate_message(msg: CollabMessage) -> None:
    """Check field presence and value ranges exactly per message type."""
    if msg.type not in MESSAGE_TYPES:
        raise MalformedMessage(f"unknown message type {msg.type!r}")
    if not msg.session or not msg.user:
        raise MalformedMessage("session and user must be non-empty")
    required = set(_WIRE_FIELDS[msg.type].values())
    optional = set(_OPTIONAL_WIRE_FIELDS.get(msg.type, {}).values())
    for name in ("role", "map_id", "cell", "seq", "to", "video_id", "shot_index", "note"):
        value = getattr(msg, name)
        if name in required:
            if value is None:
                raise MalformedMessage(f"{msg.type} message is missing {name!r}")
        elif name not in optional and value is not None:
            raise MalformedMessage(f"{msg.type} message must not carry {name!r}")
    if msg.type == "join" and msg.role not in ROLES:
        raise MalformedMessage(f"role must be one of {ROLES}, got {msg.role!r}")
    if msg.type == "position":
        if not isinstance(msg.cell, int) or msg.cell < 0:
            raise MalformedMessage("cell must be an integer >= 0")
        if not isinstance(msg.seq, int) or msg.seq < 1:
            raise MalformedMessage("seq must be an integer >= 1")
    if msg.type == "hint":
        if not isinstance(msg.shot_index, int) or msg.shot_index < 0:
            raise MalformedMessage("shot must be an integer >= 0")
        if not isinstance(msg.note, str) or len(msg.note) > MAX_NOTE_LENGTH:
            raise MalformedMessage(f"note must be a string of at most {MAX_NOTE_LENGTH} chars")


def encode_message(msg: CollabMessage) -> bytes:
    """Encode to one newline-terminated JSON line."""
    validate_message(msg)
    doc: dict = {"type": msg.type, "session": msg.session, "user": msg.user}
    for wire_key, attr in _WIRE_FIELDS[msg.type].items():
        doc[wire_key] = getattr(msg, attr)
    for wire_key, attr in _OPTIONAL_WIRE_FIELDS.get(msg.type, {}).items():
        value = getattr(msg, attr)
        if value is not None:
            doc[wire_key] = value
    return (json.dumps(doc, separators=(",", ":")) + "\n").encode("utf-8")


def message_from_wire_dict(doc) -> CollabMessage:
    if not isinstance(doc, dict):
        raise MalformedWire("wire message must be a JSON object")
    msg_type = doc.get("type")
    if msg_type not in MESSAGE_TYPES:
        raise MalformedWire(f"unknown message type {msg_type!r}")
    spec = _WIRE_FIELDS[msg_type]
    optional = _OPTIONAL_WIRE_FIELDS.get(msg_type, {})
    allowed = {"type", "session", "user", *spec, *optional}
    extra = set(doc) - allowed
    if extra:
        raise MalformedWire(f"{msg_type} message carries unexpected keys {sorted(extra)}")
    kwargs: dict = {}
    for key in ("session", "user"):
        value = doc.get(key)
        if not isinstance(value, str) or not value:
            raise MalformedWire(f"{msg_type} message needs a non-empty {key!r}")
        kwargs[key] = value
    for wire_key, attr in spec.items():
        if wire_key not in doc:
            raise MalformedWire(f"{msg_type} message is missing {wire_key!r}")
        kwargs[attr] = doc[wire_key]
    for wire_key, attr in optional.items():
        if wire_key in doc:
            kwargs[attr] = doc[wire_key]
    msg = CollabMessage(type=msg_type, **kwargs)
    try:
        validate_message(msg)
    except MalformedMessage as exc:
        raise MalformedWire(str(exc)) from None
    return msg


def decode_message(data: bytes) -> CollabMessage:
    """Decode one JSON wire line back into a validated message."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedWire(f"bad wire data: {exc}") from None
    return message_from_wire_dict(doc)


@dataclass
class UserState:
    role: str
    map_id: str | None = None
    cell: int | None = None
    last_seq: int = 0


@dataclass(frozen=True)
class HintRecord:
    user: str
    user_hint_index: int  # per-sender counter, gives hints an order that
    to: str | None  # does not depend on cross-user arrival interleaving
    video_id: str
    shot_index: int
    note: str


class SessionState:
    """Authoritative state of one collaboration session (single writer)."""

    def __init__(self, session_id: str):
        self.session_id = session_id
        self.users: dict[str, UserState] = {}
        self.hints: list[HintRecord] = []
        self.revision = 0
        self._hint_counts: dict[str, int] = {}

    def apply(self, msg: CollabMessage) -> Effect:
        validate_message(msg)
        if msg.type == "join":
            self.users[msg.user] = UserState(role=msg.role)
        elif msg.type == "leave":
            if msg.user not in self.users:
                return Effect.REJECTED_UNKNOWN_USER
            del self.users[msg.user]
        elif msg.type == "position":
            state = self.users.get(msg.user)
            if state is None:
                return Effect.REJECTED_UNKNOWN_USER
            if msg.seq <= state.last_seq:
                return Effect.IGNORED_STALE
            state.map_id = msg.map_id
            state.cell = msg.cell
            state.last_seq = msg.seq
        elif msg.type == "hint":
            if msg.user not in self.users:
                return Effect.REJECTED_UNKNOWN_USER
            if msg.to is not None and msg.to not in self.users:
                return Effect.REJECTED_UNKNOWN_RECIPIENT
            index = self._hint_counts.get(msg.user, 0)
            self._hint_counts[msg.user] = index + 1
            self.hints.append(
                HintRecord(
                    user=msg.user,
                    user_hint_index=index,
                    to=msg.to,
                    video_id=msg.video_id,
                    shot_index=msg.shot_index,
                    note=msg.note,
                )
            )
            if len(self.hints) > HINT_LOG_CAPACITY:
                del self.hints[0]
        self.revision += 1
        return Effect.APPLIED

    def snapshot(self) -> dict:
        """Immutable JSON-ready copy; equal revisions give equal snapshots.

        Hints are listed in (sender, per-sender index) order so that the
        snapshot does not depend on how different users' messages interleaved.
        """
        return {
            "session": self.session_id,
            "revision": self.revision,
            "users": {
                user: {"role": s.role, "map": s.map_id, "cell": s.cell}
                for user, s in sorted(self.users.items())
            },
            "hints": [
                {
                    "user": h.user,
                    "to": h.to,
                    "video": h.video_id,
                    "shot": h.shot_index,
                    "note": h.note,
                }
                for h in sorted(self.hints, key=lambda h: (h.user, h.user_hint_index))
            ],
        }
