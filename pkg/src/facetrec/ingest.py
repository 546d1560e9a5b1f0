"""Loading interaction files and persisting stores with their key dictionaries."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .recommender import RecommenderProfile, recommend
from .store import InteractionStore, ValidationError

logger = logging.getLogger(__name__)

DELIMITERS = {"csv": ",", "tsv": "\t"}
MODES = ("implicit", "explicit")


class IngestError(ValueError):
    pass


class IdMap:
    """Bidirectional mapping between external string keys and dense integer ids."""

    def __init__(self, keys: Iterable[str] = ()):
        self._ids: dict[str, int] = {}
        self._keys: list[str] = []
        for key in keys:
            self.intern(key)

    def intern(self, key: str) -> int:
        idx = self._ids.get(key)
        if idx is None:
            idx = self._ids[key] = len(self._keys)
            self._keys.append(key)
        return idx

    def get(self, key: str) -> Optional[int]:
        return self._ids.get(key)

    def key(self, idx: int) -> str:
        return self._keys[idx]

    def keys(self) -> list[str]:
        return list(self._keys)

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, key: str) -> bool:
        return key in self._ids


@dataclass
class RawInteractionRecord:
    user_key: str
    item_key: str
    weight: Optional[float] = None
    timestamp: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.user_key, str) or not self.user_key:
            raise ValidationError("user_key must be a non-empty string")
        if not isinstance(self.item_key, str) or not self.item_key:
            raise ValidationError("item_key must be a non-empty string")
        if self.weight is not None:
            if isinstance(self.weight, bool):
                raise ValidationError("weight must be a number")
            self.weight = float(self.weight)
            if not math.isfinite(self.weight) or self.weight < 0:
                raise ValidationError("weight must be finite and >= 0")
        if self.timestamp is not None and (
            isinstance(self.timestamp, bool) or not isinstance(self.timestamp, int)
        ):
            raise ValidationError("timestamp must be an integer")

    @classmethod
    def from_fields(cls, fields: list[str], mode: str) -> RawInteractionRecord:
        if len(fields) < 2 or len(fields) > 4:
            raise ValidationError(f"expected 2-4 columns, got {len(fields)}")
        user, item = fields[0].strip(), fields[1].strip()
        weight = timestamp = None
        if len(fields) >= 3 and mode == "explicit":
            try:
                weight = float(fields[2])
            except ValueError:
                raise ValidationError(f"weight is not a number: {fields[2]!r}") from None
        elif mode == "explicit":
            raise ValidationError("explicit mode requires a weight column")
        if len(fields) == 4 and fields[3].strip():
            try:
                timestamp = int(fields[3])
            except ValueError:
                raise ValidationError(f"timestamp is not an integer: {fields[3]!r}") from None
        return cls(user, item, weight, timestamp)


@dataclass
class Dataset:
    """A store plus the dictionaries translating its ids back to external keys."""

    store: InteractionStore
    users: IdMap
    items: IdMap
    mode: str = "implicit"
    rows: int = 0
    malformed: int = 0
    errors: list[str] = field(default_factory=list)

    def add(self, record: RawInteractionRecord) -> None:
        weight = record.weight if self.mode == "explicit" else None
        self.store.add_interaction(self.users.intern(record.user_key), self.items.intern(record.item_key), weight)

    def recommend(self, user_key: str, profile: RecommenderProfile, k: int) -> list[tuple[str, float]]:
        """Recommendations keyed by external ids; unknown users get an empty list."""
        user = self.users.get(user_key)
        if user is None:
            return []
        recs = recommend(self.store.snapshot(), user, profile, k)
        return [(self.items.key(i), score) for i, score in recs]


def ingest(
    path: Union[str, Path],
    format: str = "tsv",
    mode: str = "implicit",
    header: bool = False,
    strict: bool = False,
) -> Dataset:
    """Read an interaction file; malformed rows are tallied, or fatal with ``strict``."""
    if format not in DELIMITERS:
        raise IngestError(f"unknown format {format!r}")
    if mode not in MODES:
        raise IngestError(f"unknown mode {mode!r}")
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    users, items = IdMap(), IdMap()
    rows, malformed, errors = [], 0, []
    with fh:
        reader = csv.reader(fh, delimiter=DELIMITERS[format])
        for lineno, fields in enumerate(reader, start=1):
            if header and lineno == 1:
                continue
            if not fields or (len(fields) == 1 and not fields[0].strip()):
                continue
            try:
                rec = RawInteractionRecord.from_fields(fields, mode)
            except ValidationError as exc:
                malformed += 1
                if len(errors) < 20:
                    errors.append(f"line {lineno}: {exc}")
                continue
            weight = rec.weight if mode == "explicit" else None
            rows.append((users.intern(rec.user_key), items.intern(rec.item_key), weight))
    if malformed:
        logger.warning("%s: %d malformed row(s) skipped", path, malformed)
        if strict:
            raise IngestError(f"{path}: {malformed} malformed row(s); first: {errors[0]}")
    store = InteractionStore()
    store.extend(rows)
    return Dataset(store, users, items, mode, len(rows), malformed, errors)


def save(dataset: Dataset, directory: Union[str, Path]) -> Path:
    """Write the canonical flat files: interactions plus both key dictionaries."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for name, ids in (("users.tsv", dataset.users), ("items.tsv", dataset.items)):
        with open(out / name, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
            for idx, key in enumerate(ids.keys()):
                writer.writerow([idx, key])
    with open(out / "interactions.tsv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        for u, i, w in dataset.store.triples():
            writer.writerow([dataset.users.key(u), dataset.items.key(i), repr(w)])
    meta = {"mode": dataset.mode, "num_interactions": dataset.store.num_interactions}
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return out


def _read_keys(path: Path) -> IdMap:
    ids = IdMap()
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh, delimiter="\t"):
            if int(row[0]) != ids.intern(row[1]):
                raise IngestError(f"{path}: ids are not dense and ascending")
    return ids


def load(directory: Union[str, Path]) -> Dataset:
    src = Path(directory)
    try:
        meta = json.loads((src / "meta.json").read_text(encoding="utf-8"))
        users, items = _read_keys(src / "users.tsv"), _read_keys(src / "items.tsv")
    except (OSError, ValueError, IndexError) as exc:
        raise IngestError(f"cannot load store from {src}: {exc}") from exc
    rows = []
    with open(src / "interactions.tsv", newline="", encoding="utf-8") as fh:
        for user_key, item_key, weight in csv.reader(fh, delimiter="\t"):
            rows.append((users.get(user_key), items.get(item_key), float(weight)))
    if any(u is None or i is None for u, i, _ in rows):
        raise IngestError(f"{src}: interaction references a key missing from the dictionaries")
    store = InteractionStore()
    store.extend(rows)
    return Dataset(store, users, items, meta.get("mode", "implicit"), len(rows))


def open_dataset(
    path: Union[str, Path],
    format: str = "tsv",
    mode: str = "implicit",
    header: bool = False,
    strict: bool = False,
) -> Dataset:
    """Load a saved store directory, or ingest an interaction file."""
    if Path(path).is_dir():
        return load(path)
    return ingest(path, format=format, mode=mode, header=header, strict=strict)
