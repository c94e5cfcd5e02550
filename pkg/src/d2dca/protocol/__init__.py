"""Edge and gateway state machines, wire format and enrollment."""

from .common import DeviceId, SessionConfig
from .edge import Edge, EdgePhase
from .enroll import enroll
from .errors import Abort, DuplicateEnrollment, MalformedMessage
from .gateway import Gateway, GatewayPhase, GatewaySession
from .registry import Registry
from .wire import M1, M2, M3, M4, M5, M6, M7, M8, ProtocolMessage, decode, encode

__all__ = [
    "Abort",
    "DeviceId",
    "DuplicateEnrollment",
    "Edge",
    "EdgePhase",
    "Gateway",
    "GatewayPhase",
    "GatewaySession",
    "M1",
    "M2",
    "M3",
    "M4",
    "M5",
    "M6",
    "M7",
    "M8",
    "MalformedMessage",
    "ProtocolMessage",
    "Registry",
    "SessionConfig",
    "decode",
    "encode",
    "enroll",
]
