"""Minimal JSON-over-HTTP surface for the dashboard and operators.

Routes (documented in README):
  GET  /state                          current hydration snapshot payload
  GET  /history?granularity=week|day|sips
  GET  /events?since=<seq>[&wait=<s>]  incremental event feed (long-poll)
  POST /prefs                          {daily_goal_ml?, preferred_interval_min?,
                                        active_start_min?, active_end_min?}
  POST /interactions/historical        {granularity}

Status codes: 200 OK, 400 bad input, 404 unknown path, 503 engine stopped.
"""

from __future__ import annotations

import json
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ..eventlog import DAY, SIPS, WEEK
from .engine import Engine

_GRANULARITIES = {"week": WEEK, "day": DAY, "sips": SIPS}

MAX_LONG_POLL_S = 25.0


class ApiHandler(BaseHTTPRequestHandler):
    engine: Engine  # set on the server class by make_server

    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, code: int, obj):
        body = json.dumps(obj).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _engine(self) -> Engine | None:
        eng = self.server.engine
        if eng is None or not eng.running:
            self._send(503, {"error": "engine unavailable"})
            return None
        return eng

    def do_GET(self):
        url = urllib.parse.urlparse(self.path)
        qs = urllib.parse.parse_qs(url.query)
        eng = self._engine()
        if eng is None:
            return
        if url.path == "/state":
            self._send(200, eng.state_payload(eng.current_time()))
        elif url.path == "/history":
            gran = qs.get("granularity", ["day"])[0].lower()
            if gran not in _GRANULARITIES:
                self._send(400, {"error": f"unknown granularity {gran!r}"})
                return
            series = eng.history(_GRANULARITIES[gran], eng.current_time())
            self._send(200, {"granularity": gran,
                             "points": [{"label": l, "total_ml": v}
                                        for l, v in series.points]})
        elif url.path == "/events":
            try:
                since = int(qs.get("since", ["-1"])[0])
                wait = min(float(qs.get("wait", ["0"])[0]), MAX_LONG_POLL_S)
            except ValueError:
                self._send(400, {"error": "since/wait must be numeric"})
                return
            events = eng.events_since(since, wait_s=wait)
            self._send(200, {"events": [
                {"seq": ev.seq, "ts": ev.ts, "kind": ev.kind,
                 "payload": dict(ev.payload)} for ev in events
            ]})
        else:
            self._send(404, {"error": "not found"})

    def do_POST(self):
        url = urllib.parse.urlparse(self.path)
        eng = self._engine()
        if eng is None:
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            body = json.loads(self.rfile.read(length) or b"{}")
            if not isinstance(body, dict):
                raise ValueError("body must be an object")
        except (ValueError, json.JSONDecodeError):
            self._send(400, {"error": "malformed JSON body"})
            return

        if url.path == "/prefs":
            allowed = {"daily_goal_ml", "preferred_interval_min",
                       "active_start_min", "active_end_min"}
            unknown = set(body) - allowed
            if unknown:
                self._send(400, {"error": f"unknown fields {sorted(unknown)}"})
                return
            try:
                result = eng.update_prefs(eng.current_time(), **body)
            except (TypeError, ValueError) as exc:
                self._send(400, {"error": str(exc)})
                return
            self._send(200, result)
        elif url.path == "/interactions/historical":
            gran = str(body.get("granularity", "day")).lower()
            if gran not in _GRANULARITIES:
                self._send(400, {"error": f"unknown granularity {gran!r}"})
                return
            eng.record_historical_view(_GRANULARITIES[gran], eng.current_time())
            self._send(200, {"logged": True})
        else:
            self._send(404, {"error": "not found"})


class ApiServer(ThreadingHTTPServer):
    daemon_threads = True
    engine: Engine | None = None


def make_server(engine: Engine, host: str = "127.0.0.1", port: int = 8787) -> ApiServer:
    server = ApiServer((host, port), ApiHandler)
    server.engine = engine
    return server
