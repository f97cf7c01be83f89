"""Minimal WebSocket (RFC 6455) server/client framing over blocking sockets.

Just enough for the console protocol: HTTP upgrade handshake, unfragmented
text frames, ping/pong, close.  Browser clients connect directly; the
headless test driver uses the client side.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import socket
import struct

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT = 0x0
OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class WsError(Exception):
    pass


class WsClosed(WsError):
    pass


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise WsClosed("connection closed")
        buf.extend(chunk)
    return bytes(buf)


def accept_key(key: str) -> str:
    digest = hashlib.sha1((key + WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def server_handshake(conn: socket.socket) -> str:
    """Perform the upgrade; returns the request path."""
    data = bytearray()
    while b"\r\n\r\n" not in data:
        chunk = conn.recv(4096)
        if not chunk:
            raise WsClosed("connection closed during handshake")
        data.extend(chunk)
        if len(data) > 65536:
            raise WsError("oversized handshake request")
    head = data.split(b"\r\n\r\n", 1)[0].decode("latin-1")
    lines = head.split("\r\n")
    request = lines[0].split(" ")
    if len(request) != 3 or request[0] != "GET":
        raise WsError("not a websocket GET request")
    headers = {}
    for line in lines[1:]:
        name, _, value = line.partition(":")
        headers[name.strip().lower()] = value.strip()
    if "websocket" not in headers.get("upgrade", "").lower():
        raise WsError("missing Upgrade: websocket")
    key = headers.get("sec-websocket-key")
    if not key:
        raise WsError("missing Sec-WebSocket-Key")
    response = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {accept_key(key)}\r\n"
        "\r\n"
    )
    conn.sendall(response.encode("latin-1"))
    return request[1]


def client_handshake(sock: socket.socket, host: str, path: str = "/") -> None:
    key = base64.b64encode(os.urandom(16)).decode("ascii")
    request = (
        f"GET {path} HTTP/1.1\r\n"
        f"Host: {host}\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Key: {key}\r\n"
        "Sec-WebSocket-Version: 13\r\n"
        "\r\n"
    )
    sock.sendall(request.encode("latin-1"))
    data = bytearray()
    while b"\r\n\r\n" not in data:
        chunk = sock.recv(4096)
        if not chunk:
            raise WsClosed("connection closed during handshake")
        data.extend(chunk)
    head = data.split(b"\r\n\r\n", 1)[0].decode("latin-1")
    status = head.split("\r\n")[0]
    if " 101 " not in status:
        raise WsError(f"upgrade refused: {status}")
    for line in head.split("\r\n")[1:]:
        name, _, value = line.partition(":")
        if name.strip().lower() == "sec-websocket-accept":
            if value.strip() != accept_key(key):
                raise WsError("bad Sec-WebSocket-Accept")
            return
    raise WsError("missing Sec-WebSocket-Accept")


def send_frame(sock: socket.socket, opcode: int, payload: bytes, mask: bool) -> None:
    header = bytearray([0x80 | opcode])
    length = len(payload)
    mask_bit = 0x80 if mask else 0
    if length < 126:
        header.append(mask_bit | length)
    elif length < (1 << 16):
        header.append(mask_bit | 126)
        header.extend(struct.pack(">H", length))
    else:
        header.append(mask_bit | 127)
        header.extend(struct.pack(">Q", length))
    if mask:
        key = os.urandom(4)
        header.extend(key)
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    sock.sendall(bytes(header) + payload)


def recv_frame(sock: socket.socket) -> tuple[int, bytes]:
    b0, b1 = _recv_exact(sock, 2)
    if not (b0 & 0x80):
        raise WsError("fragmented frames are not supported")
    opcode = b0 & 0x0F
    masked = bool(b1 & 0x80)
    length = b1 & 0x7F
    if length == 126:
        (length,) = struct.unpack(">H", _recv_exact(sock, 2))
    elif length == 127:
        (length,) = struct.unpack(">Q", _recv_exact(sock, 8))
    key = _recv_exact(sock, 4) if masked else None
    payload = _recv_exact(sock, length) if length else b""
    if key:
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    return opcode, payload


class WsConnection:
    """Message-level wrapper; `mask` is true on the client side."""

    def __init__(self, sock: socket.socket, mask: bool):
        self.sock = sock
        self.mask = mask

    def send_json(self, message: dict) -> None:
        send_frame(self.sock, OP_TEXT, json.dumps(message).encode("utf-8"), self.mask)

    def recv_json(self) -> dict:
        while True:
            opcode, payload = recv_frame(self.sock)
            if opcode == OP_TEXT:
                try:
                    msg = json.loads(payload.decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError) as e:
                    raise WsError(f"bad JSON message: {e}") from e
                if not isinstance(msg, dict):
                    raise WsError("messages must be JSON objects")
                return msg
            if opcode == OP_PING:
                send_frame(self.sock, OP_PONG, payload, self.mask)
                continue
            if opcode == OP_PONG:
                continue
            if opcode == OP_CLOSE:
                try:
                    send_frame(self.sock, OP_CLOSE, b"", self.mask)
                except OSError:
                    pass
                raise WsClosed("peer closed")
            raise WsError(f"unsupported opcode {opcode}")

    def close(self) -> None:
        try:
            send_frame(self.sock, OP_CLOSE, b"", self.mask)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass


def connect(host: str, port: int, timeout: float = 5.0, path: str = "/") -> WsConnection:
    sock = socket.create_connection((host, port), timeout=timeout)
    sock.settimeout(timeout)
    client_handshake(sock, f"{host}:{port}", path)
    return WsConnection(sock, mask=True)
