from .gateway import KEY_RATE, TeleopError, TeleopServer, teleop_serve
from .headless import HeadlessConsole, joints_from_links
from .ws import WsClosed, WsConnection, WsError, connect

__all__ = [
    "TeleopServer",
    "teleop_serve",
    "TeleopError",
    "KEY_RATE",
    "HeadlessConsole",
    "joints_from_links",
    "WsConnection",
    "WsError",
    "WsClosed",
    "connect",
]
