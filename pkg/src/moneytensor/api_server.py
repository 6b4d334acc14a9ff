"""Session-oriented JSON-over-HTTP facade for interactive simulations.

Endpoints:
    POST /sessions                create from a named or inline scenario
    POST /sessions/{id}/step      advance one step with interventions
    POST /sessions/{id}/fork      branch a what-if session at a past step
    GET  /sessions/{id}/series    full frame history plus metadata
    GET  /scenarios               shipped scenario listing
    GET  /healthz                 liveness

Sessions live in memory behind an LRU cap; a fork replays the parent's
intervention log from step 0, which both keeps state opaque and
re-checks the simulator's determinism on every branch. Per-session
operations are serialized by a session lock; the registry supports
concurrent lookups with exclusive insert/evict. Every response body is
JSON carrying schema_version "1"; errors use
{"error": {"code", "message"}}.
"""

from __future__ import annotations

import json
import re
import secrets
import threading
from collections import OrderedDict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import scenarios as scenario_registry
from .errors import SchemaError, ValidationError
from .io_formats import frame_to_json_dict, parse_action_json, read_scenario
from .sim import init_state, step, uniform_feedback

SCHEMA_VERSION = "1"
DEFAULT_PORT = 8080
DEFAULT_MAX_SESSIONS = 256


class ApiError(Exception):
    """Maps straight onto an HTTP error response."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class Session:
    """One live simulation: config, state, frame history, intervention log."""

    def __init__(self, session_id, scenario_name, cfg, shocks, schedule, parent=None):
        self.id = session_id
        self.scenario_name = scenario_name
        self.cfg = cfg
        self.shocks = shocks
        self.schedule = schedule
        self.parent = parent  # (session id, at_step) for forks
        self.state = init_state(cfg)
        self.frames = []
        self.log = []  # per step: (caller interventions tuple, gamma or None)
        self.lock = threading.Lock()

    def step_once(self, interventions=(), gamma=None):
        with self.lock:
            return self._step_locked(tuple(interventions), gamma)

    def _step_locked(self, interventions, gamma):
        k = self.state.step
        if k >= self.cfg.steps:
            raise ApiError(
                409, "max_steps", f"session already at configured max of {self.cfg.steps} steps"
            )
        actions = tuple(self.schedule.get(k, ())) + interventions
        feedback = None
        if gamma is not None:
            feedback = uniform_feedback(gamma, (self.cfg.taxonomy.n_sectors,
                                                self.cfg.taxonomy.n_agents))
        active = [s for s in self.shocks if s.active_at(k)]
        self.state, frame = step(self.cfg, self.state, actions, feedback, active)
        self.frames.append(frame)
        self.log.append((interventions, gamma))
        return frame

    def fork(self, new_id, at_step):
        """New session replayed deterministically to at_step of this one."""
        with self.lock:
            if not 0 <= at_step <= len(self.frames):
                raise ApiError(
                    400, "bad_fork_step",
                    f"at_step must be within 0..{len(self.frames)}, got {at_step}",
                )
            log_prefix = list(self.log[:at_step])
        child = Session(
            new_id, self.scenario_name, self.cfg, self.shocks, self.schedule,
            parent=(self.id, at_step),
        )
        for interventions, gamma in log_prefix:
            child._step_locked(interventions, gamma)
        return child

    def summary(self) -> dict:
        tax = self.cfg.taxonomy
        return {
            "id": self.id,
            "scenario": self.scenario_name,
            "step": self.state.step,
            "steps": self.cfg.steps,
            "parent": (
                {"id": self.parent[0], "at_step": self.parent[1]}
                if self.parent
                else None
            ),
            "taxonomy": {
                "sectors": list(tax.sectors),
                "agents": list(tax.agents),
                "periods": list(tax.periods),
                "sector_tags": {s: sorted(t) for s, t in tax.sector_tags.items()},
            },
        }


class SessionStore:
    """LRU-capped in-memory session registry."""

    def __init__(self, capacity: int = DEFAULT_MAX_SESSIONS):
        self.capacity = capacity
        self._sessions: OrderedDict[str, Session] = OrderedDict()
        self._lock = threading.Lock()

    def new_id(self) -> str:
        return secrets.token_hex(8)

    def add(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.id] = session
            self._sessions.move_to_end(session.id)
            while len(self._sessions) > self.capacity:
                self._sessions.popitem(last=False)

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise ApiError(404, "unknown_session", f"no session {session_id!r}")
            self._sessions.move_to_end(session_id)
            return session

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)


class PolicySandbox:
    """Transport-independent request handlers behind the HTTP layer."""

    def __init__(self, max_sessions: int = DEFAULT_MAX_SESSIONS):
        self.store = SessionStore(max_sessions)

    def create_session(self, body: dict) -> dict:
        scenario = _require(body, "scenario")
        if isinstance(scenario, str):
            try:
                raw = scenario_registry.load_scenario_bytes(scenario)
            except KeyError:
                raise ApiError(
                    404, "unknown_scenario", f"no shipped scenario {scenario!r}"
                ) from None
            name = scenario
        elif isinstance(scenario, dict):
            raw = json.dumps(scenario).encode("utf-8")
            name = None
        else:
            raise ApiError(400, "invalid_scenario", "scenario must be a name or an object")
        try:
            cfg, shocks, schedule = read_scenario(raw)
        except (SchemaError, ValidationError) as exc:
            raise ApiError(400, "invalid_scenario", str(exc)) from None
        session = Session(self.store.new_id(), name, cfg, shocks, schedule)
        self.store.add(session)
        return {"schema_version": SCHEMA_VERSION, "session": session.summary()}

    def step_session(self, session_id: str, body: dict) -> dict:
        session = self.store.get(session_id)
        raw_actions = body.get("interventions", [])
        if not isinstance(raw_actions, list):
            raise ApiError(400, "bad_request", "interventions must be a list")
        try:
            actions = tuple(
                parse_action_json(obj, session.cfg.taxonomy, f"interventions[{n}]")
                for n, obj in enumerate(raw_actions)
            )
        except (SchemaError, ValidationError) as exc:
            raise ApiError(400, "bad_action", str(exc)) from None
        gamma = body.get("feedback_gamma")
        if gamma is not None and (isinstance(gamma, bool) or not isinstance(gamma, (int, float))):
            raise ApiError(400, "bad_request", "feedback_gamma must be a number")
        frame = session.step_once(actions, None if gamma is None else float(gamma))
        return {
            "schema_version": SCHEMA_VERSION,
            "frame": frame_to_json_dict(frame),
            "step": session.state.step,
        }

    def fork_session(self, session_id: str, body: dict) -> dict:
        at_step = _require(body, "at_step")
        if isinstance(at_step, bool) or not isinstance(at_step, int):
            raise ApiError(400, "bad_request", "at_step must be an integer")
        parent = self.store.get(session_id)
        child = parent.fork(self.store.new_id(), at_step)
        self.store.add(child)
        return {"schema_version": SCHEMA_VERSION, "session": child.summary()}

    def get_series(self, session_id: str) -> dict:
        session = self.store.get(session_id)
        with session.lock:
            frames = [frame_to_json_dict(f) for f in session.frames]
            summary = session.summary()
        return {
            "schema_version": SCHEMA_VERSION,
            "session": summary,
            "frames": frames,
        }

    def list_scenarios(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "scenarios": scenario_registry.scenario_summaries(),
        }

    def health(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "status": "ok"}


def _require(body: dict, key: str):
    if key not in body:
        raise ApiError(400, "bad_request", f"missing required field {key!r}")
    return body[key]


_ROUTES = [
    ("POST", re.compile(r"^/sessions$"), "create"),
    ("POST", re.compile(r"^/sessions/([0-9a-f]+)/step$"), "step"),
    ("POST", re.compile(r"^/sessions/([0-9a-f]+)/fork$"), "fork"),
    ("GET", re.compile(r"^/sessions/([0-9a-f]+)/series$"), "series"),
    ("GET", re.compile(r"^/scenarios$"), "scenarios"),
    ("GET", re.compile(r"^/healthz$"), "health"),
]


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    sandbox: PolicySandbox = None
    allow_origin: str | None = None
    quiet = True

    def log_message(self, fmt, *args):
        if not self.quiet:
            super().log_message(fmt, *args)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors_headers()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def _dispatch(self, method):
        try:
            payload, status = self._route(method)
        except ApiError as exc:
            payload = {
                "schema_version": SCHEMA_VERSION,
                "error": {"code": exc.code, "message": exc.message},
            }
            status = exc.status
        except Exception as exc:  # pragma: no cover - defensive
            payload = {
                "schema_version": SCHEMA_VERSION,
                "error": {"code": "internal", "message": str(exc)},
            }
            status = 500
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self._cors_headers()
        self.end_headers()
        self.wfile.write(body)

    def _route(self, method):
        path = self.path.split("?", 1)[0]
        for want_method, pattern, name in _ROUTES:
            match = pattern.match(path)
            if not match:
                continue
            if method != want_method:
                raise ApiError(405, "method_not_allowed", f"{method} not allowed here")
            sandbox = self.sandbox
            if name == "create":
                return sandbox.create_session(self._json_body()), 201
            if name == "step":
                return sandbox.step_session(match.group(1), self._json_body()), 200
            if name == "fork":
                return sandbox.fork_session(match.group(1), self._json_body()), 201
            if name == "series":
                return sandbox.get_series(match.group(1)), 200
            if name == "scenarios":
                return sandbox.list_scenarios(), 200
            return sandbox.health(), 200
        raise ApiError(404, "not_found", f"no route for {path}")

    def _json_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            body = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ApiError(400, "bad_request", f"body is not valid JSON: {exc}") from None
        if not isinstance(body, dict):
            raise ApiError(400, "bad_request", "body must be a JSON object")
        return body

    def _cors_headers(self):
        if self.allow_origin:
            self.send_header("Access-Control-Allow-Origin", self.allow_origin)
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")


def make_server(
    host: str = "127.0.0.1",
    port: int = DEFAULT_PORT,
    allow_origin: str | None = None,
    max_sessions: int = DEFAULT_MAX_SESSIONS,
    quiet: bool = True,
) -> ThreadingHTTPServer:
    """Bound but not yet serving; call serve_forever() or use in a thread."""
    handler = type(
        "BoundHandler",
        (_Handler,),
        {
            "sandbox": PolicySandbox(max_sessions),
            "allow_origin": allow_origin,
            "quiet": quiet,
        },
    )
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server


def serve(host="127.0.0.1", port=DEFAULT_PORT, allow_origin=None,
          max_sessions=DEFAULT_MAX_SESSIONS, quiet=False) -> None:
    server = make_server(host, port, allow_origin, max_sessions, quiet)
    try:
        server.serve_forever()
    finally:
        server.server_close()
