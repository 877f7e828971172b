import json
import os
import socket
import subprocess
import sys
import threading
import time

import httpx
import pytest
from click.testing import CliRunner

from prefixseal.cli import main
from prefixseal.service import create_app
from prefixseal.store import RecordStore, StoreSchema

PW = {"PREFIXSEAL_PASSWORD": "O&3p5#2"}
FAST = ["--kdf-memory", "64", "--kdf-time", "1"]

SCHEMA = {
    "fields": {
        "first_name": {"encrypted": True, "pref_len": 3},
        "note": {"encrypted": False},
    }
}


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def material(tmp_path, runner):
    path = tmp_path / "alice.json"
    result = runner.invoke(main, FAST + ["init", "alice", "--out", str(path)], env=PW)
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture(scope="module")
def server(tmp_path_factory):
    root = tmp_path_factory.mktemp("serverstore")
    schema_path = root / "schema.json"
    schema_path.write_text(json.dumps(SCHEMA), encoding="utf-8")
    app = create_app(RecordStore(root, StoreSchema.from_json_file(schema_path)))

    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()

    import uvicorn

    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{port}"
    for _ in range(200):
        try:
            if httpx.get(f"{base}/healthz", timeout=1).status_code == 200:
                break
        except httpx.HTTPError:
            time.sleep(0.05)
    else:
        raise RuntimeError("test server did not start")
    yield base
    server.should_exit = True
    thread.join(timeout=5)


class TestInit:
    def test_material_file_contents(self, tmp_path, runner):
        path = tmp_path / "m.json"
        result = runner.invoke(main, FAST + ["init", "alice", "--out", str(path)], env=PW)
        assert result.exit_code == 0
        assert "provisioned alice" in result.output

        material = json.loads(path.read_text())
        assert len(bytes.fromhex(material["salt"])) == 16
        assert material["kdf"] == {"memory_cost": 64, "time_cost": 1, "parallelism": 1}
        assert len(material["checkwords"]) == 3
        assert all(w.startswith("v1.00..") for w in material["checkwords"])
        # the password never lands in the material or the output
        assert "O&3p5#2" not in path.read_text()
        assert "O&3p5#2" not in result.output

    def test_needs_target(self, runner):
        result = runner.invoke(main, FAST + ["init", "alice"], env=PW)
        assert result.exit_code == 2

    def test_missing_password(self, tmp_path, runner):
        result = runner.invoke(
            main,
            FAST + ["init", "alice", "--out", str(tmp_path / "m.json")],
            env={"PREFIXSEAL_PASSWORD": None},
        )
        assert result.exit_code == 2


class TestEncryptDecrypt:
    def test_round_trip_via_material(self, runner, material):
        result = runner.invoke(
            main,
            FAST + ["encrypt", "first_name", "Rossi", "--pref-len", "3",
                    "--material", str(material)],
            env=PW,
        )
        assert result.exit_code == 0, result.output
        ct = result.output.strip()
        assert ct.startswith("v1.03.")

        result = runner.invoke(
            main,
            FAST + ["decrypt", "first_name", ct, "--material", str(material)],
            env=PW,
        )
        assert result.exit_code == 0
        assert result.output.strip() == "Rossi"

    def test_round_trip_via_salt(self, runner):
        salt = "ab" * 16
        result = runner.invoke(
            main, FAST + ["encrypt", "f", "Mario", "--salt", salt], env=PW
        )
        ct = result.output.strip()
        result = runner.invoke(main, FAST + ["decrypt", "f", ct, "--salt", salt], env=PW)
        assert result.output.strip() == "Mario"

    def test_wrong_password_aead_exit_3(self, runner):
        salt = "ab" * 16
        ct = runner.invoke(
            main, FAST + ["encrypt", "f", "Mario", "--salt", salt], env=PW
        ).output.strip()
        result = runner.invoke(
            main,
            FAST + ["decrypt", "f", ct, "--salt", salt],
            env={"PREFIXSEAL_PASSWORD": "wrong"},
        )
        assert result.exit_code == 3

    def test_wrong_password_checkwords_exit_3(self, runner, material):
        result = runner.invoke(
            main,
            FAST + ["encrypt", "first_name", "X", "--material", str(material)],
            env={"PREFIXSEAL_PASSWORD": "wrong"},
        )
        assert result.exit_code == 3

    def test_garbage_ciphertext_exit_4(self, runner, material):
        result = runner.invoke(
            main,
            FAST + ["decrypt", "first_name", "garbage", "--material", str(material)],
            env=PW,
        )
        assert result.exit_code == 4

    def test_no_salt_source_exit_2(self, runner):
        result = runner.invoke(main, FAST + ["encrypt", "f", "X"], env=PW)
        assert result.exit_code == 2

    def test_bad_salt_exit_2(self, runner):
        result = runner.invoke(
            main, FAST + ["encrypt", "f", "X", "--salt", "xyz"], env=PW
        )
        assert result.exit_code == 2


class TestToken:
    def test_truncation(self, runner, material):
        def token_for(term):
            return runner.invoke(
                main,
                FAST + ["token", "first_name", term, "--material", str(material),
                        "--pref-len", "3"],
                env=PW,
            ).output
        a, b = token_for("Rossini"), token_for("Ros")
        assert a == b
        assert a.startswith("v1.03.")

    def test_empty_term_exit_2(self, runner, material):
        result = runner.invoke(
            main, FAST + ["token", "first_name", "", "--material", str(material)], env=PW
        )
        assert result.exit_code == 2


class TestServerFlow:
    def test_full_flow(self, tmp_path, runner, server):
        schema_path = tmp_path / "schema.json"
        schema_path.write_text(json.dumps(SCHEMA), encoding="utf-8")
        csv_path = tmp_path / "people.csv"
        csv_path.write_text(
            "id,first_name,note\n"
            "p1,Rossini,astronomer\n"
            "p2,Rosa,chemist\n"
            "p3,Bianchi,biologist\n",
            encoding="utf-8",
        )
        material = tmp_path / "carol.json"
        assert runner.invoke(
            main, FAST + ["init", "carol", "--out", str(material)], env=PW
        ).exit_code == 0

        out_path = tmp_path / "people.jsonl"
        result = runner.invoke(
            main,
            FAST + ["encrypt-file", "--schema", str(schema_path), "--input", str(csv_path),
                    "--output", str(out_path), "--material", str(material)],
            env=PW,
        )
        assert result.exit_code == 0, result.output
        assert "3 records" in result.output

        result = runner.invoke(
            main, ["--server", server] + FAST + ["ingest", str(out_path)], env=PW
        )
        assert result.exit_code == 0, result.output
        assert "ingested 3" in result.output

        result = runner.invoke(
            main,
            ["--server", server] + FAST
            + ["search", "first_name", "Ros", "--material", str(material)],
            env=PW,
        )
        assert result.exit_code == 0, result.output
        rows = [json.loads(line) for line in result.output.splitlines()]
        assert {r["id"] for r in rows} == {"p1", "p2"}
        assert rows[0]["fields"]["first_name"] in {"Rossini", "Rosa"}

        # term longer than pref_len: the cohort comes back, the client filters
        result = runner.invoke(
            main,
            ["--server", server] + FAST
            + ["search", "first_name", "Rossini", "--material", str(material)],
            env=PW,
        )
        rows = [json.loads(line) for line in result.output.splitlines()]
        assert [r["id"] for r in rows] == ["p1"]

        # searching a clear field surfaces the server error
        result = runner.invoke(
            main,
            ["--server", server] + FAST
            + ["search", "note", "astro", "--material", str(material)],
            env=PW,
        )
        assert result.exit_code != 0

    def test_init_and_fetch_by_user(self, runner, server):
        assert runner.invoke(
            main, ["--server", server] + FAST + ["init", "dave"], env=PW
        ).exit_code == 0
        result = runner.invoke(
            main,
            ["--server", server] + FAST + ["token", "first_name", "Ro", "--user", "dave"],
            env=PW,
        )
        assert result.exit_code == 0, result.output
        assert result.output.startswith("v1.03.")

    def test_reinit_replaces_material(self, runner, server):
        assert runner.invoke(
            main, ["--server", server] + FAST + ["init", "erin"], env=PW
        ).exit_code == 0
        assert runner.invoke(
            main, ["--server", server] + FAST + ["init", "erin"],
            env={"PREFIXSEAL_PASSWORD": "new-password"},
        ).exit_code == 0
        # the old password no longer verifies against the stored check-words
        result = runner.invoke(
            main,
            ["--server", server] + FAST + ["token", "first_name", "Ro", "--user", "erin"],
            env=PW,
        )
        assert result.exit_code == 3


class TestBench:
    def test_zero_entries_header_only(self, runner):
        result = runner.invoke(main, FAST + ["bench", "--entries", "0"], env=PW)
        assert result.exit_code == 0
        assert result.output.strip() == "operation,entries,seconds,ops_per_sec"

    def test_report_shape(self, runner):
        result = runner.invoke(main, FAST + ["bench", "--entries", "40"], env=PW)
        lines = result.output.strip().splitlines()
        assert lines[0] == "operation,entries,seconds,ops_per_sec"
        assert len(lines) == 4
        for line in lines[1:]:
            op, entries, seconds, rate = line.split(",")
            assert op in {"encrypt", "decrypt", "full_cycle"}
            assert int(entries) == 40
            assert float(seconds) >= 0
            assert float(rate) > 0


class TestSurface:
    def test_registered_subcommands(self):
        expected = {"init", "encrypt", "decrypt", "encrypt-file", "token", "search",
                    "serve", "bench", "ingest"}
        assert expected <= set(main.commands)

    def test_real_process_exit_codes(self, tmp_path):
        env = dict(os.environ, PREFIXSEAL_PASSWORD="O&3p5#2")
        salt = "cd" * 16
        proc = subprocess.run(
            [sys.executable, "-m", "prefixseal.cli", *FAST,
             "encrypt", "f", "Rossi", "--salt", salt],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0, proc.stderr
        ct = proc.stdout.strip()

        proc = subprocess.run(
            [sys.executable, "-m", "prefixseal.cli", *FAST, "decrypt", "f", ct,
             "--salt", salt],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "Rossi"

        env_missing = {k: v for k, v in os.environ.items() if k != "PREFIXSEAL_PASSWORD"}
        proc = subprocess.run(
            [sys.executable, "-m", "prefixseal.cli", *FAST, "encrypt", "f", "X",
             "--salt", salt],
            capture_output=True, text=True, env=env_missing, stdin=subprocess.DEVNULL,
        )
        assert proc.returncode == 2
