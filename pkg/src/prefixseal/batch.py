"""Batch encryption pipeline: CSV in, record-store JSONL out.

Every encrypted cell goes through a full encrypt/decrypt/compare cycle
before it is written; a cell that does not round-trip to the normalized
input aborts the whole batch. The output file only appears on success
(written to a temp file, renamed at the end), so a failed run leaves no
partial artifact behind.
"""

from __future__ import annotations

import csv
import json
import os
import time
from pathlib import Path

from . import codec
from .cipher import EncryptionContext, decrypt_text, encrypt_text
from .errors import PrefixSealError, SchemaViolation, ValidationFailed
from .keyring import KeyRing
from .store import StoreSchema

DEFAULT_ID_COLUMN = "id"


def _contexts(schema: StoreSchema, ring: KeyRing) -> dict[str, EncryptionContext]:
    return {
        fid: EncryptionContext(
            ring=ring, field_id=fid, pref_len=spec.pref_len, token_width=spec.token_width
        )
        for fid, spec in schema.fields.items()
        if spec.encrypted
    }


def encrypt_csv(
    input_path: str | Path,
    output_path: str | Path,
    schema: StoreSchema,
    ring: KeyRing,
    id_column: str = DEFAULT_ID_COLUMN,
) -> int:
    """Encrypt a UTF-8 CSV into record-store JSONL, one record per row.

    The header row names the fields; every column except the optional id
    column must be declared in the schema. Rows keep input order. Returns
    the number of records written.

    Raises SchemaViolation for header/row shape problems and
    ValidationFailed(row, field) if any cell fails its validation cycle.
    """
    input_path = Path(input_path)
    output_path = Path(output_path)
    contexts = _contexts(schema, ring)

    with open(input_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaViolation("input CSV is empty") from None
        for name in header:
            if name != id_column and name not in schema.fields:
                raise SchemaViolation(f"CSV column {name!r} is not declared in the schema")
        if len(set(header)) != len(header):
            raise SchemaViolation("duplicate CSV column names")

        tmp_path = output_path.with_suffix(output_path.suffix + ".tmp")
        count = 0
        try:
            with open(tmp_path, "w", encoding="utf-8") as out:
                for row_number, row in enumerate(reader, start=1):
                    if len(row) != len(header):
                        raise SchemaViolation(
                            f"row {row_number}: expected {len(header)} columns, got {len(row)}"
                        )
                    cells = dict(zip(header, row))
                    record_id = cells.pop(id_column, None) or str(row_number)
                    fields: dict[str, str] = {}
                    for fid, value in cells.items():
                        ctx = contexts.get(fid)
                        if ctx is None:
                            fields[fid] = value
                            continue
                        ciphertext = encrypt_text(ctx, value)
                        try:
                            recovered = decrypt_text(ctx, ciphertext)
                        except PrefixSealError as exc:
                            raise ValidationFailed(row_number, fid, str(exc)) from exc
                        if recovered != codec.normalize(value):
                            raise ValidationFailed(row_number, fid, "round-trip mismatch")
                        fields[fid] = ciphertext
                    out.write(
                        json.dumps({"id": record_id, "fields": fields}, separators=(",", ":"))
                        + "\n"
                    )
                    count += 1
            os.replace(tmp_path, output_path)
        except BaseException:
            tmp_path.unlink(missing_ok=True)
            raise
    return count


def run_bench(
    ring: KeyRing, entries: int, pref_len: int, token_width: int = codec.DEFAULT_TOKEN_WIDTH
) -> list[tuple[str, int, float, float]]:
    """Throughput measurement over synthetic entries, KDF excluded.

    Returns rows of (operation, entries, seconds, ops_per_sec) for
    encrypt-only, decrypt-only, and the full encrypt/decrypt/validate
    cycle.
    """
    if entries <= 0:
        return []
    ctx = EncryptionContext(
        ring=ring, field_id="bench", pref_len=pref_len, token_width=token_width
    )
    values = [f"entry-{i:08d}" for i in range(entries)]

    def timed(op):
        start = time.perf_counter()
        op()
        elapsed = time.perf_counter() - start
        return elapsed, (entries / elapsed if elapsed > 0 else float("inf"))

    ciphertexts: list[str] = []

    def do_encrypt():
        ciphertexts.extend(encrypt_text(ctx, value) for value in values)

    def do_decrypt():
        for ciphertext in ciphertexts:
            decrypt_text(ctx, ciphertext)

    def do_cycle():
        for value in values:
            ciphertext = encrypt_text(ctx, value)
            if decrypt_text(ctx, ciphertext) != codec.normalize(value):
                raise ValidationFailed(0, "bench", "round-trip mismatch")

    rows = []
    for name, op in [("encrypt", do_encrypt), ("decrypt", do_decrypt), ("full_cycle", do_cycle)]:
        seconds, rate = timed(op)
        rows.append((name, entries, seconds, rate))
    return rows
