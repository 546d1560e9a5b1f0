"""Minimal JSON-over-HTTP front end for a live dataset.

Endpoints::

    GET  /health
    GET  /recommend?user=<key>&profile=<name>&k=<int>
    POST /interactions   {"user_key": ..., "item_key": ..., "weight": ..., "timestamp": ...}
"""

from __future__ import annotations

import json
import logging
import os
import threading
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional, Sequence
from urllib.parse import parse_qs, urlparse

from . import __version__
from .ingest import Dataset, RawInteractionRecord
from .recommender import RecommenderProfile
from .store import ValidationError

logger = logging.getLogger(__name__)

BIND_ENV = "FACETREC_BIND"
DEFAULT_BIND = "127.0.0.1:8080"


def parse_bind(value: Optional[str]) -> tuple[str, int]:
    value = value or os.environ.get(BIND_ENV) or DEFAULT_BIND
    host, sep, port = value.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"bind address must be host:port, got {value!r}")
    return host or "127.0.0.1", int(port)


class RecommenderService:
    """Request handling independent of the HTTP transport."""

    def __init__(self, dataset: Dataset, profiles: Sequence[RecommenderProfile]):
        self.dataset = dataset
        self.profiles = {p.name: p for p in profiles}
        # serializes writers: interning keys and inserting must happen together
        self._write_lock = threading.Lock()

    def health(self) -> tuple[int, dict]:
        store = self.dataset.store
        return HTTPStatus.OK, {
            "status": "ok",
            "version": __version__,
            "profiles": sorted(self.profiles),
            "num_users": store.num_users,
            "num_items": store.num_items,
            "num_interactions": store.num_interactions,
        }

    def recommend(self, query: dict[str, list[str]]) -> tuple[int, object]:
        user = query.get("user", [None])[0]
        name = query.get("profile", [None])[0]
        if not user or not name:
            return HTTPStatus.BAD_REQUEST, {"error": "user and profile parameters are required"}
        profile = self.profiles.get(name)
        if profile is None:
            return HTTPStatus.NOT_FOUND, {"error": f"unknown profile {name!r}"}
        try:
            k = int(query.get("k", ["10"])[0])
            if k < 1:
                raise ValueError
        except ValueError:
            return HTTPStatus.BAD_REQUEST, {"error": "k must be a positive integer"}
        # key maps only grow, so readers never need the writer lock
        recs = self.dataset.recommend(user, profile, k)
        return HTTPStatus.OK, [[item, score] for item, score in recs]

    def add_interaction(self, body: bytes) -> tuple[int, dict]:
        try:
            payload = json.loads(body or b"null")
            if not isinstance(payload, dict):
                raise ValidationError("body must be a JSON object")
            unknown = set(payload) - {"user_key", "item_key", "weight", "timestamp"}
            if unknown:
                raise ValidationError(f"unknown fields: {sorted(unknown)}")
            record = RawInteractionRecord(**{"user_key": None, "item_key": None, **payload})
        except (ValueError, TypeError) as exc:
            return HTTPStatus.BAD_REQUEST, {"error": str(exc)}
        with self._write_lock:
            self.dataset.add(record)
            total = self.dataset.store.num_interactions
        return HTTPStatus.CREATED, {"status": "created", "num_interactions": total}


def _handler_for(service: RecommenderService):
    class Handler(BaseHTTPRequestHandler):
        server_version = f"facetrec/{__version__}"

        def _send(self, status: int, payload) -> None:
            body = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            url = urlparse(self.path)
            if url.path == "/health":
                self._send(*service.health())
            elif url.path == "/recommend":
                self._send(*service.recommend(parse_qs(url.query)))
            else:
                self._send(HTTPStatus.NOT_FOUND, {"error": f"no route {url.path}"})

        def do_POST(self):
            url = urlparse(self.path)
            length = int(self.headers.get("Content-Length") or 0)
            body = self.rfile.read(length)
            if url.path == "/interactions":
                self._send(*service.add_interaction(body))
            else:
                self._send(HTTPStatus.NOT_FOUND, {"error": f"no route {url.path}"})

        def log_message(self, format, *args):
            logger.info("%s - %s", self.address_string(), format % args)

    return Handler


def make_server(
    dataset: Dataset,
    profiles: Sequence[RecommenderProfile],
    bind: Optional[str] = None,
) -> ThreadingHTTPServer:
    host, port = parse_bind(bind)
    server = ThreadingHTTPServer((host, port), _handler_for(RecommenderService(dataset, profiles)))
    server.daemon_threads = True
    return server


def serve(dataset: Dataset, profiles: Sequence[RecommenderProfile], bind: Optional[str] = None) -> None:
    server = make_server(dataset, profiles, bind)
    host, port = server.server_address[:2]
    logger.info("listening on http://%s:%d", host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
