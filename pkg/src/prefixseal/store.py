"""Untrusting record store: ciphertext records, prefix queries, user material.

The server holds serialized ciphertexts and clear values only, ever; it has
no key material and answers prefix queries by string matching. Persistence
is deliberately plain:

- ``records.jsonl``: one record per line, ``{"id": ..., "fields": {...}}``,
  append-only. Re-ingesting an id appends a new line; replay keeps the last
  occurrence, so the file is also the write-ahead history.
- ``users.json``: per-user KDF salt (clear hex) and check-word ciphertexts,
  rewritten atomically.

An in-memory sorted index per encrypted field is rebuilt at startup and
kept current on ingest; queries are range scans over it, with results
returned in first-ingestion order. One lock serializes writers and gives
readers consistent snapshots; ingest batches validate fully before any
record becomes visible.
"""

from __future__ import annotations

import bisect
import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from . import codec
from .errors import (
    InvalidSalt,
    MalformedCiphertext,
    NotEncryptedField,
    SchemaViolation,
    UnknownField,
    UnknownUser,
)
from .keyring import CHECK_FIELD_ID, SALT_SIZE, CheckWordSet

RECORDS_FILE = "records.jsonl"
USERS_FILE = "users.json"

# Upper bound for the range scan: every character that can follow a token
# prefix in a serialized ciphertext ("." and base64url) sorts below this.
_RANGE_END = "\x7f"


@dataclass(frozen=True)
class FieldSpec:
    encrypted: bool
    pref_len: int | None = None
    token_width: int = codec.DEFAULT_TOKEN_WIDTH


@dataclass(frozen=True)
class StoreSchema:
    """Per-field declaration of encrypted-vs-clear and prefix configuration."""

    fields: dict[str, FieldSpec] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "StoreSchema":
        """Validate the JSON schema shape:
        ``{"fields": {"<id>": {"encrypted": bool, "pref_len": int}}}``.

        ``pref_len`` must be present exactly when the field is encrypted.
        ``token_width`` is an optional per-field extension (default 3); the
        wire format does not carry the width, so the store needs it to
        validate tag sections.
        """
        if not isinstance(raw, dict) or not isinstance(raw.get("fields"), dict):
            raise SchemaViolation("schema must be an object with a 'fields' object")
        specs: dict[str, FieldSpec] = {}
        for field_id, spec in raw["fields"].items():
            if not codec.is_valid_field_id(field_id) or field_id == CHECK_FIELD_ID:
                raise SchemaViolation(f"bad field id {field_id!r}")
            if not isinstance(spec, dict) or not isinstance(spec.get("encrypted"), bool):
                raise SchemaViolation(f"field {field_id!r}: 'encrypted' must be a boolean")
            encrypted = spec["encrypted"]
            extra = set(spec) - {"encrypted", "pref_len", "token_width"}
            if extra:
                raise SchemaViolation(f"field {field_id!r}: unknown keys {sorted(extra)}")
            if encrypted:
                pref_len = spec.get("pref_len")
                if not isinstance(pref_len, int) or not 0 <= pref_len <= codec.MAX_PREF_LEN:
                    raise SchemaViolation(
                        f"field {field_id!r}: encrypted fields need pref_len 0..255"
                    )
                token_width = spec.get("token_width", codec.DEFAULT_TOKEN_WIDTH)
                if (
                    not isinstance(token_width, int)
                    or not codec.MIN_TOKEN_WIDTH <= token_width <= codec.MAX_TOKEN_WIDTH
                ):
                    raise SchemaViolation(f"field {field_id!r}: token_width must be 1..16")
                specs[field_id] = FieldSpec(True, pref_len, token_width)
            else:
                if "pref_len" in spec or "token_width" in spec:
                    raise SchemaViolation(
                        f"field {field_id!r}: pref_len only applies to encrypted fields"
                    )
                specs[field_id] = FieldSpec(False)
        return cls(specs)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "StoreSchema":
        with open(path, encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(f"schema file is not valid JSON: {exc}") from None
        return cls.from_dict(raw)

    def encrypted_fields(self) -> list[str]:
        return [fid for fid, spec in self.fields.items() if spec.encrypted]


def _looks_like_ciphertext(value: str) -> bool:
    return value.startswith(codec.VERSION + codec.SEPARATOR) and value.count(codec.SEPARATOR) == 3


class RecordStore:
    """Desk-scale record store over a directory of JSON files."""

    def __init__(self, root: str | Path, schema: StoreSchema):
        self.root = Path(root)
        self.schema = schema
        self.root.mkdir(parents=True, exist_ok=True)
        self._records_path = self.root / RECORDS_FILE
        self._users_path = self.root / USERS_FILE
        self._lock = threading.RLock()
        self._records: dict[str, dict] = {}  # id -> fields map, first-ingest order
        self._index: dict[str, list[tuple[str, str]]] = {
            fid: [] for fid in schema.encrypted_fields()
        }
        self._users: dict[str, dict] = {}
        self._load()

    # -- persistence -------------------------------------------------------

    def _load(self) -> None:
        if self._records_path.exists():
            with open(self._records_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    self._records[rec["id"]] = rec["fields"]
            for fid in self._index:
                self._rebuild_index(fid)
        if self._users_path.exists():
            with open(self._users_path, encoding="utf-8") as fh:
                self._users = json.load(fh)

    def _rebuild_index(self, field_id: str) -> None:
        entries = [
            (fields[field_id], rid)
            for rid, fields in self._records.items()
            if field_id in fields
        ]
        entries.sort()
        self._index[field_id] = entries

    def _append_records(self, records: list[dict]) -> None:
        with open(self._records_path, "a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _write_users(self) -> None:
        tmp = self._users_path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(self._users, fh, indent=2)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self._users_path)

    # -- records -----------------------------------------------------------

    def _validate_record(self, rec: dict) -> None:
        rid = rec.get("id")
        if not isinstance(rid, str) or not rid:
            raise SchemaViolation("record id must be a non-empty string")
        fields = rec.get("fields")
        if not isinstance(fields, dict):
            raise SchemaViolation(f"record {rid!r}: fields must be an object")
        for fid, value in fields.items():
            spec = self.schema.fields.get(fid)
            if spec is None:
                raise SchemaViolation(f"record {rid!r}: undeclared field {fid!r}")
            if not isinstance(value, str):
                raise SchemaViolation(f"record {rid!r}: field {fid!r} must be a string")
            if spec.encrypted:
                if not _looks_like_ciphertext(value):
                    raise SchemaViolation(
                        f"record {rid!r}: clear value in encrypted field {fid!r}"
                    )
                ct = codec.parse(value, spec.token_width)  # MalformedCiphertext on details
                if ct.declared_pref_len != spec.pref_len:
                    raise SchemaViolation(
                        f"record {rid!r}: field {fid!r} declares prefix length "
                        f"{ct.declared_pref_len}, schema says {spec.pref_len}"
                    )

    def ingest(self, records: list[dict]) -> int:
        """Validate and store a batch. All-or-nothing: nothing becomes
        visible or persistent unless every record passes. Returns the number
        of records processed; re-ingesting an id overwrites in place."""
        for rec in records:
            self._validate_record(rec)
        with self._lock:
            touched: set[str] = set()
            for rec in records:
                self._records[rec["id"]] = rec["fields"]
                touched.update(set(rec["fields"]) & self._index.keys())
            for fid in touched:
                self._rebuild_index(fid)
            self._append_records(records)
        return len(records)

    def query(self, field_id: str, token: str) -> list[dict]:
        """Records whose serialized ciphertext in field_id starts with the
        token, in first-ingestion order. Pure string matching; a token with
        a foreign version header simply matches nothing."""
        spec = self.schema.fields.get(field_id)
        if spec is None:
            raise UnknownField(field_id)
        if not spec.encrypted:
            raise NotEncryptedField(field_id)
        with self._lock:
            entries = self._index[field_id]
            lo = bisect.bisect_left(entries, (token,))
            hi = bisect.bisect_left(entries, (token + _RANGE_END,))
            hit_ids = {rid for _, rid in entries[lo:hi]}
            return [
                {"id": rid, "fields": dict(fields)}
                for rid, fields in self._records.items()
                if rid in hit_ids
            ]

    def record_count(self) -> int:
        with self._lock:
            return len(self._records)

    # -- user material -----------------------------------------------------

    def put_user_salt(self, user: str, salt_hex: str) -> None:
        try:
            salt = bytes.fromhex(salt_hex)
        except ValueError:
            raise InvalidSalt("salt is not hex") from None
        if len(salt) != SALT_SIZE:
            raise InvalidSalt(f"salt must be {SALT_SIZE} bytes, got {len(salt)}")
        with self._lock:
            self._users.setdefault(user, {})["salt"] = salt_hex
            self._write_users()

    def get_user_salt(self, user: str) -> str:
        with self._lock:
            material = self._users.get(user)
            if material is None or "salt" not in material:
                raise UnknownUser(user)
            return material["salt"]

    def put_user_checkwords(self, user: str, words: list[str]) -> None:
        validated = CheckWordSet.from_words(words)  # MalformedCiphertext on bad entries
        with self._lock:
            self._users.setdefault(user, {})["checkwords"] = list(validated.words)
            self._write_users()

    def get_user_checkwords(self, user: str) -> list[str]:
        with self._lock:
            material = self._users.get(user)
            if material is None or "checkwords" not in material:
                raise UnknownUser(user)
            return list(material["checkwords"])
