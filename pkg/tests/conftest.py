import random
import sys
from pathlib import Path

# Make the sibling `oracles` package importable from every test module.
sys.path.insert(0, str(Path(__file__).resolve().parent))

import pytest

from prefixseal import KdfParams, derive_keyring

VECTOR_DIR = Path(__file__).resolve().parent / "vectors"

# Cheap Argon2id profile for tests whose subject is not the KDF itself.
FAST_KDF = {"memory_cost": 64, "time_cost": 1, "parallelism": 1}


def fast_params(salt: bytes = b"\x01" * 16) -> KdfParams:
    return KdfParams(salt=salt, **FAST_KDF)


@pytest.fixture(scope="session")
def ring():
    return derive_keyring("O&3p5#2", fast_params())


@pytest.fixture(scope="session")
def other_ring():
    return derive_keyring("a-completely-different-password", fast_params())


# Name stems with deliberate prefix collisions; the numeric suffix makes
# every corpus value long and distinctive enough for plaintext scans.
NAME_STEMS = [
    "Maria", "Mario", "Marco", "Marta", "Martina", "Marcella", "Marianne",
    "Rosa", "Rosalind", "Rosanna", "Rossella", "Rossi", "Rosario", "Roberta",
    "Robert", "Roberto", "Robin", "Rocco", "Romano", "Romina",
    "Anna", "Annalisa", "Annamaria", "Andrea", "Angelo", "Angela", "Antonia",
    "Antonio", "Antonella", "Andreas",
    "Luca", "Lucia", "Luciano", "Lucrezia", "Ludovica", "Luigi", "Luisa",
    "Giana", "Gianni", "Gianna", "Giancarlo", "Gianluca", "Giorgia", "Giorgio",
    "Giovanna", "Giovanni", "Giulia", "Giuliano", "Giuseppe",
    "Elena", "Eleonora", "Elisa", "Elisabetta", "Emanuele", "Emilia", "Emilio",
    "Federica", "Federico", "Felice", "Ferdinando", "Filippa", "Filippo",
    "Paola", "Paolo", "Pasquale", "Patrizia", "Pietro",
    "Sara", "Sabrina", "Salvatore", "Samuele", "Sandra", "Sandro", "Santina",
    "Teresa", "Tiziana", "Tiziano", "Tommaso", "Tobia",
    "Valeria", "Valerio", "Valentina", "Valentino", "Vincenza", "Vincenzo",
]


def make_name_corpus(n: int = 500) -> list[tuple[str, str]]:
    """Deterministic (record_id, text) corpus with heavy prefix overlap."""
    rng = random.Random(20260822)
    corpus = []
    for i in range(n):
        stem = NAME_STEMS[i % len(NAME_STEMS)] if i < 4 * len(NAME_STEMS) \
            else rng.choice(NAME_STEMS)
        corpus.append((f"r{i:04d}", f"{stem}-{i:04d}"))
    return corpus


@pytest.fixture(scope="session")
def name_corpus():
    return make_name_corpus(500)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
