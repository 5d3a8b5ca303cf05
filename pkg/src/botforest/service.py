"""HTTP scoring service: per-account scoring with per-class outputs.

Endpoints:
  POST /v1/score        one account (corpus schema minus label) -> score JSON
  POST /v1/score/batch  JSON array of 1..100 accounts -> array of results,
                        per-item errors reported inline with their index
  GET  /v1/model        model digest, class list, registry hash, load time
  GET  /healthz         liveness probe

The model is immutable and shared by all handler threads; scoring is
read-only, so responses for the same account are byte-identical. Scores are
serialized with the same formatter as the CLI, making the decimal forms
bit-exact across both paths.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .accounts import LabeledAccount, format_score, parse_account_obj
from .ensemble import EscModel, ScoreResult, esc_score, load_model, model_digest, monolithic_score_result
from .errors import MalformedJson, SchemaViolation
from .features import default_adjectives, default_lexicon, featurize_account

log = logging.getLogger("botforest.service")

MAX_BODY_BYTES = 1 << 20   # 1 MiB
MAX_BATCH = 100


class ServiceState:
    """Loaded model plus metadata; swapped whole, never mutated."""

    def __init__(self):
        self.model = None
        self.digest = None
        self.loaded_at = None
        self._lock = threading.Lock()
        self.request_count = 0
        self.error_count = 0

    def load(self, model_path: str) -> None:
        from .forest import forest_scores
        import numpy as np

        model = load_model(model_path)
        # warm lazy caches (lexicons, packed trees, jit) before serving
        default_lexicon()
        default_adjectives()
        forests = ([model.rf0] + [rf for _, rf in model.specialists]
                   if isinstance(model, EscModel) else [model.forest])
        probe = np.zeros((1, forests[0].feature_count))
        for rf in forests:
            forest_scores(rf, probe)
        self.digest = model_digest(model)
        self.loaded_at = time.time()
        self.model = model

    def count(self, error: bool) -> None:
        with self._lock:
            self.request_count += 1
            if error:
                self.error_count += 1


def result_to_obj_json(result: ScoreResult) -> str:
    """Service response body; score fields share the CLI's decimal formatter."""
    class_scores = ",".join(
        f'"{name}":{format_score(val)}' for name, val in result.class_scores.items()
    )
    return (
        f'{{"user_id":{json.dumps(result.user_id, ensure_ascii=False)},'
        f'"bot_score":{format_score(result.bot_score)},'
        f'"raw_winner_score":{format_score(result.raw_winner_score)},'
        f'"winning_class":{json.dumps(result.winning_class, ensure_ascii=False)},'
        f'"class_scores":{{{class_scores}}},'
        f'"s0":{format_score(result.s0)}}}'
    )


def score_account_obj(state: ServiceState, obj) -> ScoreResult:
    acc = parse_account_obj(obj)
    raw = acc.account if isinstance(acc, LabeledAccount) else acc
    fv = featurize_account(raw)
    if isinstance(state.model, EscModel):
        return esc_score(state.model, fv, user_id=raw.user_id)
    return monolithic_score_result(state.model, fv, user_id=raw.user_id)


class ScoringHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "botforest"

    @property
    def state(self) -> ServiceState:
        return self.server.state

    def _send(self, status: int, body: bytes, content_type: str = "application/json",
              started: float | None = None) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
        self.state.count(error=status >= 500)
        latency_us = int((time.perf_counter() - started) * 1e6) if started else 0
        log.info('{"path":"%s","status":%d,"latency_us":%d}', self.path, status, latency_us)

    def _send_json(self, status: int, obj, started: float | None = None) -> None:
        self._send(status, json.dumps(obj).encode("utf-8"), started=started)

    def log_message(self, fmt, *args):  # default stderr chatter replaced by log.info above
        pass

    def do_GET(self):
        started = time.perf_counter()
        if self.path == "/healthz":
            self._send(200, b"ok", content_type="text/plain", started=started)
            return
        if self.path == "/v1/model":
            if self.state.model is None:
                self._send_json(503, {"error": "model not loaded"}, started=started)
                return
            model = self.state.model
            classes = model.class_names() if isinstance(model, EscModel) else []
            self._send_json(200, {
                "digest": f"sha256:{self.state.digest}",
                "kind": "esc" if isinstance(model, EscModel) else "monolithic",
                "classes": classes,
                "registry_hash": model.registry_hash,
                "loaded_at": self.state.loaded_at,
                "requests": self.state.request_count,
            }, started=started)
            return
        self._send_json(404, {"error": "not found"}, started=started)

    def _read_body(self, started: float):
        length = int(self.headers.get("Content-Length") or 0)
        if length > MAX_BODY_BYTES:
            # drain the request so the client can finish writing, then reject
            remaining = length
            while remaining > 0:
                chunk = self.rfile.read(min(remaining, 1 << 16))
                if not chunk:
                    break
                remaining -= len(chunk)
            self._send_json(413, {"error": f"body exceeds {MAX_BODY_BYTES} bytes"},
                            started=started)
            return None
        raw = self.rfile.read(length)
        try:
            return json.loads(raw)
        except json.JSONDecodeError as e:
            self._send_json(400, {"error": "MalformedJson", "detail": str(e)}, started=started)
            return None

    def do_POST(self):
        started = time.perf_counter()
        if self.state.model is None:
            self._send_json(503, {"error": "model not loaded"}, started=started)
            return
        if self.path not in ("/v1/score", "/v1/score/batch"):
            self._send_json(404, {"error": "not found"}, started=started)
            return
        body = self._read_body(started)
        if body is None:
            return
        try:
            if self.path == "/v1/score":
                result = score_account_obj(self.state, body)
                self._send(200, result_to_obj_json(result).encode("utf-8"), started=started)
                return
            if not isinstance(body, list) or not (1 <= len(body) <= MAX_BATCH):
                self._send_json(400, {"error": f"batch must be a list of 1..{MAX_BATCH} accounts"},
                                started=started)
                return
            items = []
            for i, obj in enumerate(body):
                try:
                    items.append(result_to_obj_json(score_account_obj(self.state, obj)))
                except SchemaViolation as e:
                    items.append(json.dumps(
                        {"index": i, "error": "SchemaViolation", "field": e.field}
                    ))
            self._send(200, ("[" + ",".join(items) + "]").encode("utf-8"), started=started)
        except SchemaViolation as e:
            self._send_json(400, {"error": "SchemaViolation", "field": e.field}, started=started)
        except MalformedJson as e:
            self._send_json(400, {"error": "MalformedJson", "detail": str(e)}, started=started)
        except Exception:
            log.exception("internal error scoring request")
            self._send_json(500, {"error": "internal"}, started=started)


class ScoringServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, addr, state: ServiceState):
        super().__init__(addr, ScoringHandler)
        self.state = state


def make_server(model_path: str | None, bind: str = "127.0.0.1", port: int = 8080) -> ScoringServer:
    state = ServiceState()
    if model_path is not None:
        state.load(model_path)
    return ScoringServer((bind, port), state)


def serve(model_path: str, bind: str = "127.0.0.1", port: int = 8080) -> None:
    httpd = make_server(model_path, bind, port)
    host, actual_port = httpd.server_address[:2]
    print(f"serving on http://{host}:{actual_port} (model sha256:{httpd.state.digest})")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
