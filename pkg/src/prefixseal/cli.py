"""Operator CLI: provisioning, field crypto, batch pipeline, search, serving.

The password comes from the PREFIXSEAL_PASSWORD environment variable or an
interactive prompt, never from argv; it is never sent to the server and
never written to any output. Server interactions (salt/check-word storage,
ingest, search) are plain HTTP against the record-store API; all
cryptography happens locally.

Exit codes: 0 success, 1 runtime failure, 2 usage or missing password,
3 authentication failure, 4 malformed input.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click
import httpx

from . import batch, codec
from .cipher import EncryptionContext, decrypt_text, encrypt_text, make_query_token
from .errors import (
    AuthenticationFailed,
    EmptyTerm,
    MalformedCiphertext,
    MissingPassword,
    PrefixSealError,
    SchemaViolation,
    ValidationFailed,
)
from .keyring import (
    DEFAULT_MEMORY_COST_KIB,
    DEFAULT_TIME_COST,
    SALT_SIZE,
    CheckWordSet,
    KdfParams,
    KeyRing,
    derive_keyring,
    make_check_words,
    verify_password,
)
from .store import RecordStore, StoreSchema

PASSWORD_ENV = "PREFIXSEAL_PASSWORD"
DEFAULT_PREF_LEN = 3

EXIT_USAGE = 2
EXIT_AUTH = 3
EXIT_MALFORMED = 4


def _fail(code: int, message: str) -> "SystemExit":
    click.echo(f"error: {message}", err=True)
    return SystemExit(code)


def _cli_errors(fn):
    """Map domain errors to the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MissingPassword as exc:
            raise _fail(EXIT_USAGE, str(exc))
        except EmptyTerm as exc:
            raise _fail(EXIT_USAGE, str(exc))
        except AuthenticationFailed as exc:
            raise _fail(EXIT_AUTH, str(exc))
        except (MalformedCiphertext, SchemaViolation) as exc:
            raise _fail(EXIT_MALFORMED, str(exc))
        except ValidationFailed as exc:
            raise _fail(1, str(exc))
        except httpx.HTTPError as exc:
            raise _fail(1, f"server request failed: {exc}")
        except PrefixSealError as exc:
            raise _fail(1, str(exc))

    return wrapper


def _resolve_password(confirm: bool = False) -> str:
    password = os.environ.get(PASSWORD_ENV)
    if password:
        return password
    if sys.stdin.isatty():
        return click.prompt("Password", hide_input=True, confirmation_prompt=confirm)
    raise MissingPassword(f"set {PASSWORD_ENV} or run interactively")


def _client(server: str) -> httpx.Client:
    return httpx.Client(base_url=server, timeout=30.0)


def _raise_for_error(response: httpx.Response) -> None:
    if response.status_code >= 400:
        try:
            code = response.json().get("error", "")
        except ValueError:
            code = ""
        raise httpx.HTTPStatusError(
            f"HTTP {response.status_code} {code}".strip(),
            request=response.request,
            response=response,
        )


class Settings:
    """Group-level options shared by the subcommands."""

    def __init__(self, server, kdf_memory, kdf_time, token_width, kdf_flags_explicit):
        self.server = server
        self.kdf_memory = kdf_memory
        self.kdf_time = kdf_time
        self.token_width = token_width
        self.kdf_flags_explicit = kdf_flags_explicit

    def kdf_params(self, salt: bytes, material_kdf: dict | None = None) -> KdfParams:
        # Material-file parameters win unless the user set flags explicitly;
        # the key is only reproducible with the provisioning-time costs.
        memory, time_cost, parallelism = self.kdf_memory, self.kdf_time, 1
        if material_kdf and not self.kdf_flags_explicit:
            memory = material_kdf.get("memory_cost", memory)
            time_cost = material_kdf.get("time_cost", time_cost)
            parallelism = material_kdf.get("parallelism", parallelism)
        return KdfParams(
            salt=salt, memory_cost=memory, time_cost=time_cost, parallelism=parallelism
        )

    def obtain_ring(self, user, material_path, salt_hex, confirm=False) -> KeyRing:
        """Resolve salt and check-words, derive the ring, verify if possible."""
        checkwords: list[str] | None = None
        material_kdf: dict | None = None
        if salt_hex:
            salt = _parse_salt_hex(salt_hex)
        elif material_path:
            material = json.loads(Path(material_path).read_text(encoding="utf-8"))
            salt = _parse_salt_hex(material["salt"])
            checkwords = material.get("checkwords")
            material_kdf = material.get("kdf")
        elif user and self.server:
            with _client(self.server) as client:
                response = client.get(f"/v1/users/{user}/salt")
                _raise_for_error(response)
                salt = _parse_salt_hex(response.json()["salt"])
                words_response = client.get(f"/v1/users/{user}/checkwords")
                if words_response.status_code == 200:
                    checkwords = words_response.json()["words"]
        else:
            raise _fail(EXIT_USAGE, "need --salt, --material, or --user together with --server")

        password = _resolve_password(confirm)
        ring = derive_keyring(password, self.kdf_params(salt, material_kdf))
        if checkwords:
            if not verify_password(ring, CheckWordSet.from_words(checkwords)):
                raise AuthenticationFailed("password does not match the stored check-words")
        return ring


def _parse_salt_hex(salt_hex: str) -> bytes:
    try:
        salt = bytes.fromhex(salt_hex)
    except ValueError:
        raise _fail(EXIT_USAGE, "salt must be hex")
    if len(salt) != SALT_SIZE:
        raise _fail(EXIT_USAGE, f"salt must be {SALT_SIZE} bytes of hex")
    return salt


def _salt_options(fn):
    fn = click.option("--user", default=None, help="User whose salt is fetched from --server.")(fn)
    fn = click.option(
        "--material",
        default=None,
        type=click.Path(exists=True, dir_okay=False),
        help="Local material file written by init.",
    )(fn)
    fn = click.option("--salt", "salt_hex", default=None, help="KDF salt as 32 hex chars.")(fn)
    return fn


@click.group()
@click.option("--server", default=None, help="Record-store base URL, e.g. http://127.0.0.1:8500")
@click.option("--kdf-memory", default=DEFAULT_MEMORY_COST_KIB, show_default=True,
              help="Argon2id memory cost in KiB.")
@click.option("--kdf-time", default=DEFAULT_TIME_COST, show_default=True,
              help="Argon2id iteration count.")
@click.option("--token-width", default=codec.DEFAULT_TOKEN_WIDTH, show_default=True,
              help="Prefix token width in bytes (1-16).")
@click.pass_context
def main(ctx, server, kdf_memory, kdf_time, token_width):
    """Client-side field encryption with server-searchable prefix tags."""
    explicit = any(
        ctx.get_parameter_source(name) is not click.core.ParameterSource.DEFAULT
        for name in ("kdf_memory", "kdf_time")
    )
    ctx.obj = Settings(server, kdf_memory, kdf_time, token_width, explicit)


@main.command()
@click.argument("user")
@click.option("--out", default=None, type=click.Path(dir_okay=False),
              help="Write material to a local JSON file instead of the server.")
@click.pass_obj
@_cli_errors
def init(settings: Settings, user, out):
    """Provision USER: generate a salt, derive keys, store check-words."""
    if not out and not settings.server:
        raise _fail(EXIT_USAGE, "init needs --out FILE or a --server URL")
    password = _resolve_password(confirm=True)
    params = KdfParams.with_fresh_salt(
        memory_cost=settings.kdf_memory, time_cost=settings.kdf_time
    )
    ring = derive_keyring(password, params)
    checkwords = make_check_words(ring)
    salt_hex = params.salt.hex()

    if out:
        material = {
            "user": user,
            "salt": salt_hex,
            "kdf": {
                "memory_cost": params.memory_cost,
                "time_cost": params.time_cost,
                "parallelism": params.parallelism,
            },
            "checkwords": list(checkwords.words),
        }
        Path(out).write_text(json.dumps(material, indent=2) + "\n", encoding="utf-8")
        target = out
    else:
        with _client(settings.server) as client:
            response = client.put(f"/v1/users/{user}/salt", json={"salt": salt_hex})
            _raise_for_error(response)
            response = client.put(
                f"/v1/users/{user}/checkwords", json={"words": list(checkwords.words)}
            )
            _raise_for_error(response)
            stored = client.get(f"/v1/users/{user}/checkwords")
            _raise_for_error(stored)
            if not verify_password(ring, CheckWordSet.from_words(stored.json()["words"])):
                raise AuthenticationFailed("stored check-words do not verify after init")
        target = settings.server
    click.echo(
        f"provisioned {user}: salt {salt_hex}, {len(checkwords.words)} check-words -> {target}"
    )


@main.command()
@click.argument("field_id", metavar="FIELD")
@click.argument("text")
@click.option("--pref-len", default=DEFAULT_PREF_LEN, show_default=True)
@_salt_options
@click.pass_obj
@_cli_errors
def encrypt(settings: Settings, field_id, text, pref_len, user, material, salt_hex):
    """Encrypt TEXT for FIELD and print the serialized ciphertext."""
    ring = settings.obtain_ring(user, material, salt_hex)
    ctx = EncryptionContext(
        ring=ring, field_id=field_id, pref_len=pref_len, token_width=settings.token_width
    )
    click.echo(encrypt_text(ctx, text))


@main.command()
@click.argument("field_id", metavar="FIELD")
@click.argument("ciphertext")
@_salt_options
@click.pass_obj
@_cli_errors
def decrypt(settings: Settings, field_id, ciphertext, user, material, salt_hex):
    """Decrypt a serialized ciphertext for FIELD and print the plaintext."""
    ring = settings.obtain_ring(user, material, salt_hex)
    ctx = EncryptionContext(
        ring=ring, field_id=field_id, pref_len=0, token_width=settings.token_width
    )
    click.echo(decrypt_text(ctx, ciphertext))


@main.command()
@click.argument("field_id", metavar="FIELD")
@click.argument("term")
@click.option("--pref-len", default=DEFAULT_PREF_LEN, show_default=True)
@_salt_options
@click.pass_obj
@_cli_errors
def token(settings: Settings, field_id, term, pref_len, user, material, salt_hex):
    """Print the query token for TERM on FIELD."""
    ring = settings.obtain_ring(user, material, salt_hex)
    ctx = EncryptionContext(
        ring=ring, field_id=field_id, pref_len=pref_len, token_width=settings.token_width
    )
    click.echo(make_query_token(ctx, term))


@main.command()
@click.argument("field_id", metavar="FIELD")
@click.argument("term")
@click.option("--pref-len", default=DEFAULT_PREF_LEN, show_default=True)
@_salt_options
@click.pass_obj
@_cli_errors
def search(settings: Settings, field_id, term, pref_len, user, material, salt_hex):
    """Search the server for TERM on FIELD; print decrypted matches as JSONL.

    The server only sees the query token. Results are decrypted locally and
    post-filtered when TERM is longer than the field's prefix length.
    """
    if not settings.server:
        raise _fail(EXIT_USAGE, "search needs a --server URL")
    ring = settings.obtain_ring(user, material, salt_hex)
    ctx = EncryptionContext(
        ring=ring, field_id=field_id, pref_len=pref_len, token_width=settings.token_width
    )
    query = make_query_token(ctx, term)
    with _client(settings.server) as client:
        response = client.get("/v1/search", params={"field": field_id, "token": query})
        _raise_for_error(response)
        records = response.json()["records"]

    needle = codec.normalize(term)
    for record in records:
        fields = dict(record["fields"])
        for fid, value in fields.items():
            if value.startswith(codec.VERSION + codec.SEPARATOR):
                field_ctx = EncryptionContext(
                    ring=ring, field_id=fid, pref_len=0, token_width=settings.token_width
                )
                fields[fid] = decrypt_text(field_ctx, value)
        if len(needle) > pref_len and not fields.get(field_id, "").startswith(needle):
            continue
        click.echo(json.dumps({"id": record["id"], "fields": fields}, ensure_ascii=False))


@main.command("encrypt-file")
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--id-column", default=batch.DEFAULT_ID_COLUMN, show_default=True)
@_salt_options
@click.pass_obj
@_cli_errors
def encrypt_file(settings: Settings, schema_path, input_path, output_path, id_column,
                 user, material, salt_hex):
    """Encrypt a CSV into record-store JSONL with a per-row validation cycle."""
    schema = StoreSchema.from_json_file(schema_path)
    ring = settings.obtain_ring(user, material, salt_hex)
    count = batch.encrypt_csv(input_path, output_path, schema, ring, id_column=id_column)
    click.echo(f"wrote {count} records -> {output_path}")


@main.command()
@click.argument("jsonl", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
@_cli_errors
def ingest(settings: Settings, jsonl):
    """POST a JSONL file produced by encrypt-file to the server."""
    if not settings.server:
        raise _fail(EXIT_USAGE, "ingest needs a --server URL")
    records = []
    with open(jsonl, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    with _client(settings.server) as client:
        response = client.post("/v1/records", json={"records": records})
        _raise_for_error(response)
        click.echo(f"ingested {response.json()['ingested']} records")


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(file_okay=False))
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8500, show_default=True)
@_cli_errors
def serve(store_dir, schema_path, host, port):
    """Run the record-store HTTP service."""
    import uvicorn

    from .service import create_app

    schema = StoreSchema.from_json_file(schema_path)
    app = create_app(RecordStore(store_dir, schema))
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.option("--entries", default=10000, show_default=True)
@click.option("--pref-len", default=DEFAULT_PREF_LEN, show_default=True)
@click.pass_obj
@_cli_errors
def bench(settings: Settings, entries, pref_len):
    """Measure encrypt/decrypt/validate throughput (KDF excluded, run once).

    Emits CSV: operation,entries,seconds,ops_per_sec.
    """
    password = os.environ.get(PASSWORD_ENV, "bench-password")
    params = KdfParams(
        salt=b"\x00" * SALT_SIZE,
        memory_cost=settings.kdf_memory,
        time_cost=settings.kdf_time,
    )
    ring = derive_keyring(password, params)
    click.echo("operation,entries,seconds,ops_per_sec")
    for name, count, seconds, rate in batch.run_bench(
        ring, entries, pref_len, settings.token_width
    ):
        click.echo(f"{name},{count},{seconds:.6f},{rate:.1f}")


if __name__ == "__main__":
    main()
