"""Shared test doubles: deterministic scorers and a wire-protocol stub server."""

from __future__ import annotations

import hashlib
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from contramine.classifiers import ScoreDistribution
from contramine.errors import TransportError


def _stable_unit_floats(text: str, n: int = 3) -> list[float]:
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return [int.from_bytes(digest[4 * i : 4 * i + 4], "big") / 2**32 for i in range(n)]


def stub_distribution(premise: str, hypothesis: str) -> ScoreDistribution:
    """A deterministic distribution derived from the pair's text alone."""
    raw = _stable_unit_floats(premise + "\x1f" + hypothesis)
    total = sum(raw) or 1.0
    e, n, c = (v / total for v in raw)
    # nudge onto the simplex exactly
    c = 1.0 - e - n
    return ScoreDistribution(p_entailment=e, p_neutral=n, p_contradiction=c)


class StubScorer:
    """Deterministic hash-based scorer; optionally biased toward contradiction."""

    def __init__(self, contradiction_bias: float = 0.0):
        self.contradiction_bias = contradiction_bias
        self.calls = 0
        self.pairs_seen = 0

    def score_batch(self, pairs):
        self.calls += 1
        self.pairs_seen += len(pairs)
        out = []
        for premise, hypothesis in pairs:
            dist = stub_distribution(premise, hypothesis)
            if self.contradiction_bias > 0:
                e = dist.p_entailment * (1 - self.contradiction_bias)
                n = dist.p_neutral * (1 - self.contradiction_bias)
                out.append(
                    ScoreDistribution(p_entailment=e, p_neutral=n, p_contradiction=1.0 - e - n)
                )
            else:
                out.append(dist)
        return out


class FixedScorer:
    """Always returns one fixed distribution."""

    def __init__(self, entailment: float, neutral: float, contradiction: float):
        self.dist = ScoreDistribution(
            p_entailment=entailment, p_neutral=neutral, p_contradiction=contradiction
        )
        self.calls = 0

    def score_batch(self, pairs):
        self.calls += 1
        return [self.dist for _ in pairs]


class FlakyScorer:
    """Wraps another scorer; raises TransportError on a chosen call number."""

    def __init__(self, inner, fail_on_call: int):
        self.inner = inner
        self.fail_on_call = fail_on_call
        self.calls = 0

    def score_batch(self, pairs):
        self.calls += 1
        if self.calls == self.fail_on_call:
            raise TransportError("injected backend outage", retries=2)
        return self.inner.score_batch(pairs)


class WireStubServer:
    """Tiny HTTP server speaking the scorer wire protocol for client tests.

    mode:
      "echo"      -> deterministic per-pair distributions (stub_distribution)
      "fixed"     -> always (0.2, 0.3, 0.5)
      "bad_sum"   -> probabilities summing to 0.8
      "malformed" -> response missing the 'scores' key
      "short"     -> one score fewer than requested
      "flaky"     -> HTTP 500 for the first `fail_times` requests, then echo
    """

    def __init__(self, mode: str = "echo", fail_times: int = 0, model_id: str = "stub-model"):
        self.mode = mode
        self.model_id = model_id
        self.requests_seen = 0
        self._fail_remaining = fail_times
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    def start(self) -> str:
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _send_json(self, code: int, payload: dict):
                body = json.dumps(payload).encode("utf-8")
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/v1/health":
                    self._send_json(200, {"status": "ok", "model_id": outer.model_id})
                else:
                    self._send_json(404, {"error": "not found"})

            def do_POST(self):
                if self.path != "/v1/score":
                    self._send_json(404, {"error": "not found"})
                    return
                outer.requests_seen += 1
                length = int(self.headers.get("Content-Length", "0"))
                request = json.loads(self.rfile.read(length))
                pairs = request.get("pairs", [])
                if outer.mode == "flaky" and outer._fail_remaining > 0:
                    outer._fail_remaining -= 1
                    self._send_json(500, {"error": "transient"})
                    return
                if outer.mode == "malformed":
                    self._send_json(200, {"nonsense": True})
                    return
                if outer.mode == "bad_sum":
                    scores = [
                        {"entailment": 0.2, "neutral": 0.2, "contradiction": 0.4} for _ in pairs
                    ]
                    self._send_json(200, {"scores": scores})
                    return
                if outer.mode == "short":
                    scores = [
                        {"entailment": 0.2, "neutral": 0.3, "contradiction": 0.5}
                        for _ in pairs[:-1]
                    ]
                    self._send_json(200, {"scores": scores})
                    return
                if outer.mode == "fixed":
                    scores = [
                        {"entailment": 0.2, "neutral": 0.3, "contradiction": 0.5} for _ in pairs
                    ]
                    self._send_json(200, {"scores": scores})
                    return
                scores = []
                for pair in pairs:
                    dist = stub_distribution(pair["premise"], pair["hypothesis"])
                    scores.append(dist.to_wire())
                self._send_json(200, {"scores": scores})

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def stop(self):
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
