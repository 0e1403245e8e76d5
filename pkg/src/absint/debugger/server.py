"""JSON wire protocol for driving debug sessions from other tools.

Messages are newline-delimited UTF-8 JSON, protocol version
"absintdbg/1".  Requests carry {"seq", "type": "request", "command",
"arguments"}; every request gets a response echoing "request_seq" with
"success" and "body".  Stops surface as spontaneous events
{"type": "event", "event": "stopped", "body": {...}}; the end of the
analysis as {"event": "terminated"}.  One client drives one session.

Transports: stdio (`--serve-stdio`), a local TCP port (`--serve N`),
and, for the browser UI (`--serve N --ui`), an HTTP server carrying the
same messages over a WebSocket at /ws plus the UI's static files.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import socket
import struct
import sys
from typing import Callable, Optional

from ..engine.analyzer import AnalysisOptions
from ..engine.config import build_domain, load_config
from ..parser import parse_file
from .commands import parse_breakpoint
from .session import AlarmBP, DebugError, DebugSession, FunctionBP, KindBP, LocationBP, StopState

PROTOCOL_VERSION = "absintdbg/1"


class ProtocolHandler:
    """Transport-independent request processing.  `send` writes one
    message dict to the client."""

    def __init__(self, send: Callable[[dict], None]):
        self._send = send
        self._seq = 0
        self.session: Optional[DebugSession] = None
        self.alive = True

    # -- message plumbing --

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def _respond(self, request: dict, success: bool, body: Optional[dict] = None, message: str = "") -> None:
        msg = {
            "seq": self._next_seq(),
            "type": "response",
            "request_seq": request.get("seq"),
            "command": request.get("command"),
            "success": success,
        }
        if body is not None:
            msg["body"] = body
        if message:
            msg["message"] = message
        self._send(msg)

    def _event(self, event: str, body: Optional[dict] = None) -> None:
        msg = {"seq": self._next_seq(), "type": "event", "event": event}
        if body is not None:
            msg["body"] = body
        self._send(msg)

    def _stop_body(self, stop: StopState) -> dict:
        body: dict = {"reason": stop.reason, "function": stop.function}
        if stop.loc is not None:
            body.update(file=stop.loc.file, line=stop.loc.line, col=stop.loc.col)
        if stop.iteration is not None:
            body["iteration"] = stop.iteration
        if stop.detail:
            body["detail"] = stop.detail
        if stop.alarm is not None:
            body["alarm"] = stop.alarm.to_dict()
        return body

    def _emit_stop(self, stop: StopState) -> None:
        if stop.reason == "finished":
            self._event("terminated")
        else:
            self._event("stopped", self._stop_body(stop))

    # -- request handling --

    def handle_line(self, raw: str) -> bool:
        """Process one message; returns False when serving should end."""
        raw = raw.strip()
        if not raw:
            return True
        try:
            request = json.loads(raw)
            if not isinstance(request, dict):
                raise ValueError("message must be a JSON object")
        except ValueError as exc:
            self._send(
                {
                    "seq": self._next_seq(),
                    "type": "response",
                    "request_seq": None,
                    "command": None,
                    "success": False,
                    "message": f"malformed message: {exc}",
                }
            )
            return True
        command = request.get("command")
        handler = getattr(self, f"_cmd_{command}", None)
        if request.get("type") != "request" or handler is None:
            self._respond(request, False, message=f"unknown command {command!r}")
            return True
        try:
            return handler(request) is not False
        except DebugError as exc:
            self._respond(request, False, message=str(exc))
            return True

    def _require_session(self, request: dict) -> Optional[DebugSession]:
        if self.session is None:
            self._respond(request, False, message="no session; send launch first")
            return None
        return self.session

    # -- commands --

    def _cmd_initialize(self, request: dict) -> None:
        self._respond(
            request,
            True,
            {
                "protocolVersion": PROTOCOL_VERSION,
                "capabilities": {"supportsAlarmBreakpoint": True},
            },
        )

    def _cmd_launch(self, request: dict) -> None:
        args = request.get("arguments") or {}
        program_path = args.get("program")
        config_path = args.get("config")
        if not program_path or not config_path:
            self._respond(request, False, message="launch needs program and config paths")
            return
        try:
            program = parse_file(program_path)
            config = load_config(config_path)
        except Exception as exc:
            self._respond(request, False, message=str(exc))
            return
        self.session = DebugSession(
            program,
            build_domain(config),
            AnalysisOptions.from_config(config),
            config_name=config.name,
            program_id=program_path,
        )
        self._respond(request, True, {"program": program_path, "config": config.name})
        self._emit_stop(self.session.start())

    def _cmd_setBreakpoints(self, request: dict) -> None:
        session = self._require_session(request)
        if session is None:
            return
        args = request.get("arguments") or {}
        session.clear_breakpoints()
        acks = []
        for line in args.get("lines", []):
            if isinstance(line, dict):
                bp = LocationBP(line.get("file"), int(line.get("line")))
            else:
                bp = LocationBP(None, int(line))
            verified, _ = session.add_breakpoint(bp)
            acks.append({"type": "line", "line": bp.line, "verified": verified})
        for name in args.get("functions", []):
            session.add_breakpoint(FunctionBP(name))
            acks.append({"type": "function", "name": name, "verified": True})
        for kind in args.get("kinds", []):
            session.add_breakpoint(KindBP(kind))
            acks.append({"type": "kind", "kind": kind, "verified": True})
        if args.get("alarm"):
            session.add_breakpoint(AlarmBP())
            acks.append({"type": "alarm", "verified": True})
        for spec in args.get("breakpoints", []):
            bp = parse_breakpoint(spec)
            verified, _ = session.add_breakpoint(bp)
            acks.append({"type": "spec", "spec": spec, "verified": verified})
        self._respond(request, True, {"breakpoints": acks})

    def _resume(self, request: dict, mode: str) -> None:
        session = self._require_session(request)
        if session is None:
            return
        self._respond(request, True, {})
        self._emit_stop(session.resume(mode))

    def _cmd_continue(self, request: dict) -> None:
        self._resume(request, "continue")

    def _cmd_next(self, request: dict) -> None:
        self._resume(request, "next")

    def _cmd_stepIn(self, request: dict) -> None:
        self._resume(request, "step")

    def _cmd_finish(self, request: dict) -> None:
        self._resume(request, "finish")

    def _cmd_stackTrace(self, request: dict) -> None:
        session = self._require_session(request)
        if session is None:
            return
        stop = session.current
        frames = []
        if stop is not None:
            for fn, call_loc in reversed(stop.callstack):
                frame = {"name": fn}
                if call_loc is not None:
                    frame.update(file=call_loc.file, line=call_loc.line, col=call_loc.col)
                frames.append(frame)
            if frames and stop.loc is not None:
                frames[0].update(file=stop.loc.file, line=stop.loc.line, col=stop.loc.col)
        self._respond(request, True, {"stackFrames": frames})

    def _cmd_variables(self, request: dict) -> None:
        session = self._require_session(request)
        if session is None:
            return
        args = request.get("arguments") or {}
        name = args.get("name")
        if name is not None:
            lines = session.render_print(name)
            body = {"variables": [{"name": name, "lines": lines}]}
        else:
            names = list(session._paused_scope)
            body = {
                "variables": [
                    {"name": n, "lines": session.render_print(n)} for n in names
                ],
                "state": session.render_print(None),
            }
        self._respond(request, True, body)

    def _cmd_disconnect(self, request: dict) -> bool:
        if self.session is not None:
            self.session.quit()
        self._respond(request, True, {})
        self.alive = False
        return False


# --- transports -------------------------------------------------------------


def serve_stdio() -> int:
    def send(msg: dict) -> None:
        sys.stdout.write(json.dumps(msg) + "\n")
        sys.stdout.flush()

    handler = ProtocolHandler(send)
    for line in sys.stdin:
        if not handler.handle_line(line):
            break
    if handler.session is not None:
        handler.session.quit()
    return 0


def serve_tcp(port: int, host: str = "127.0.0.1", ready: Optional[Callable[[int], None]] = None) -> int:
    """Serve exactly one client over a local TCP connection."""
    with socket.create_server((host, port)) as server:
        actual_port = server.getsockname()[1]
        if ready is not None:
            ready(actual_port)
        else:
            print(f"listening on {host}:{actual_port}", file=sys.stderr)
        conn, _ = server.accept()
        with conn, conn.makefile("rw", encoding="utf-8", newline="\n") as stream:

            def send(msg: dict) -> None:
                stream.write(json.dumps(msg) + "\n")
                stream.flush()

            handler = ProtocolHandler(send)
            for line in stream:
                if not handler.handle_line(line):
                    break
            if handler.session is not None:
                handler.session.quit()
    return 0


# --- WebSocket bridge (RFC 6455, text frames only) --------------------------

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


def _ws_accept_key(key: str) -> str:
    digest = hashlib.sha1((key + _WS_GUID).encode()).digest()
    return base64.b64encode(digest).decode()


def ws_read_frame(rfile) -> Optional[str]:
    """Read one text frame; None on close or EOF.  Continuation frames
    and binary payloads are not needed by the UI and are rejected."""
    head = rfile.read(2)
    if len(head) < 2:
        return None
    opcode = head[0] & 0x0F
    masked = bool(head[1] & 0x80)
    length = head[1] & 0x7F
    if length == 126:
        length = struct.unpack(">H", rfile.read(2))[0]
    elif length == 127:
        length = struct.unpack(">Q", rfile.read(8))[0]
    mask = rfile.read(4) if masked else b""
    payload = rfile.read(length)
    if opcode == 0x8:  # close
        return None
    if masked:
        payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    if opcode == 0x9:  # ping: reply pong out-of-band via exception-free path
        return ""
    if opcode != 0x1:
        return ""
    return payload.decode("utf-8")


def ws_write_frame(wfile, text: str) -> None:
    payload = text.encode("utf-8")
    header = bytearray([0x81])
    n = len(payload)
    if n < 126:
        header.append(n)
    elif n < 1 << 16:
        header.append(126)
        header.extend(struct.pack(">H", n))
    else:
        header.append(127)
        header.extend(struct.pack(">Q", n))
    wfile.write(bytes(header) + payload)
    wfile.flush()


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".svg": "image/svg+xml",
}


def _serve_static(conn, path: str, ui_root: str) -> None:
    rel = path.lstrip("/") or "index.html"
    full = os.path.normpath(os.path.join(ui_root, rel))
    if not full.startswith(os.path.abspath(ui_root)) or not os.path.isfile(full):
        body = b"not found"
        conn.sendall(
            b"HTTP/1.1 404 Not Found\r\nContent-Length: %d\r\n"
            b"Connection: close\r\n\r\n%s" % (len(body), body)
        )
        return
    with open(full, "rb") as fh:
        body = fh.read()
    ctype = _CONTENT_TYPES.get(os.path.splitext(full)[1], "application/octet-stream")
    head = (
        f"HTTP/1.1 200 OK\r\nContent-Type: {ctype}\r\n"
        f"Content-Length: {len(body)}\r\nConnection: close\r\n\r\n"
    ).encode()
    conn.sendall(head + body)


def _read_http_head(rfile) -> tuple[str, dict[str, str]]:
    request_line = rfile.readline().decode("latin-1").strip()
    headers: dict[str, str] = {}
    while True:
        line = rfile.readline().decode("latin-1").strip()
        if not line:
            break
        key, _, value = line.partition(":")
        headers[key.strip().lower()] = value.strip()
    return request_line, headers


def serve_ui(port: int, ui_root: str, host: str = "127.0.0.1", ready: Optional[Callable[[int], None]] = None) -> int:
    """HTTP server: /ws upgrades to the WebSocket tunnel (one session),
    anything else serves the UI's static files."""
    import threading

    with socket.create_server((host, port)) as server:
        actual_port = server.getsockname()[1]
        if ready is not None:
            ready(actual_port)
        else:
            print(f"UI on http://{host}:{actual_port}/", file=sys.stderr)
        ui_root = os.path.abspath(ui_root)
        while True:
            conn, _ = server.accept()
            rfile = conn.makefile("rb")
            request_line, headers = _read_http_head(rfile)
            if not request_line:
                conn.close()
                continue
            path = request_line.split(" ")[1] if " " in request_line else "/"
            if path == "/ws" and headers.get("upgrade", "").lower() == "websocket":
                accept = _ws_accept_key(headers.get("sec-websocket-key", ""))
                conn.sendall(
                    (
                        "HTTP/1.1 101 Switching Protocols\r\n"
                        "Upgrade: websocket\r\nConnection: Upgrade\r\n"
                        f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
                    ).encode()
                )
                wfile = conn.makefile("wb")
                lock = threading.Lock()

                def send(msg: dict) -> None:
                    with lock:
                        ws_write_frame(wfile, json.dumps(msg))

                handler = ProtocolHandler(send)
                while True:
                    text = ws_read_frame(rfile)
                    if text is None:
                        break
                    if text and not handler.handle_line(text):
                        break
                if handler.session is not None:
                    handler.session.quit()
                conn.close()
                return 0  # one client per session
            else:

                def static_task(c=conn, p=path, rf=rfile):
                    try:
                        _serve_static(c, p, ui_root)
                    finally:
                        rf.close()
                        c.close()

                threading.Thread(target=static_task, daemon=True).start()
