"""HTTP JSON API over a RecordStore.

Endpoints (all under /v1):

    POST /v1/records                 {"records": [{"id", "fields"}]} -> {"ingested": N}
    GET  /v1/search?field=&token=    -> {"records": [...]}
    PUT  /v1/users/{u}/salt          {"salt": "<32 hex>"}   (GET returns same shape)
    PUT  /v1/users/{u}/checkwords    {"words": ["v1.00..", ...]}  (GET same shape)

Domain errors map to {"error": "<code>"} where the code is the exception
class name: 404 for UnknownUser/UnknownField, 400 for the rest. The server
performs no cryptography; it never sees plaintext of encrypted fields or
any key material.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .errors import (
    InvalidSalt,
    MalformedCiphertext,
    NotEncryptedField,
    PrefixSealError,
    SchemaViolation,
    UnknownField,
    UnknownUser,
)
from .store import RecordStore

_NOT_FOUND = (UnknownUser, UnknownField)
_BAD_REQUEST = (SchemaViolation, MalformedCiphertext, NotEncryptedField, InvalidSalt)


class RecordIn(BaseModel):
    id: str
    fields: dict[str, str]


class IngestRequest(BaseModel):
    records: list[RecordIn]


class IngestResponse(BaseModel):
    ingested: int


class SearchResponse(BaseModel):
    records: list[RecordIn]


class SaltBody(BaseModel):
    salt: str


class CheckWordsBody(BaseModel):
    words: list[str]


def _validation_error_code(path: str) -> str:
    if path.endswith("/salt"):
        return "InvalidSalt"
    if path.endswith("/checkwords"):
        return "MalformedCiphertext"
    return "SchemaViolation"


def create_app(store: RecordStore) -> FastAPI:
    app = FastAPI(title="prefixseal record store", version="1.0")
    # the browser demo is served from a different origin; everything on the
    # wire is ciphertext, so an open CORS policy leaks nothing
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(PrefixSealError)
    async def domain_error(request: Request, exc: PrefixSealError):
        status = 404 if isinstance(exc, _NOT_FOUND) else 400
        return JSONResponse(status_code=status, content={"error": type(exc).__name__})

    @app.exception_handler(RequestValidationError)
    async def shape_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"error": _validation_error_code(request.url.path)}
        )

    @app.post("/v1/records", response_model=IngestResponse)
    def ingest(body: IngestRequest):
        count = store.ingest([rec.model_dump() for rec in body.records])
        return IngestResponse(ingested=count)

    @app.get("/v1/search", response_model=SearchResponse)
    def search(field: str, token: str):
        return SearchResponse(records=store.query(field, token))

    @app.put("/v1/users/{user}/salt", response_model=SaltBody)
    def put_salt(user: str, body: SaltBody):
        store.put_user_salt(user, body.salt)
        return body

    @app.get("/v1/users/{user}/salt", response_model=SaltBody)
    def get_salt(user: str):
        return SaltBody(salt=store.get_user_salt(user))

    @app.put("/v1/users/{user}/checkwords", response_model=CheckWordsBody)
    def put_checkwords(user: str, body: CheckWordsBody):
        store.put_user_checkwords(user, body.words)
        return body

    @app.get("/v1/users/{user}/checkwords", response_model=CheckWordsBody)
    def get_checkwords(user: str):
        return CheckWordsBody(words=store.get_user_checkwords(user))

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "records": store.record_count()}

    return app
