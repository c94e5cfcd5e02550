"""Protocol failure types.

Every verification failure aborts the session. The exception records the
operation that rejected the message so transcripts and attack verdicts can
name a precise failure point such as ``gw_on_m3:TagMismatch``.
"""

from __future__ import annotations


class ProtocolError(Exception):
    """Base for protocol-layer errors that are not aborts."""


class MalformedMessage(ProtocolError):
    """Unknown type tag or wrong length for the tag."""


class DuplicateEnrollment(ProtocolError):
    pass


class Abort(Exception):
    """A state machine refused a message and dropped its session."""

    error_name: str | None = None

    def __init__(self, op: str, detail: str = "") -> None:
        self.op = op
        self.detail = detail
        super().__init__(self.failure_point + (f" ({detail})" if detail else ""))

    @property
    def error(self) -> str:
        return self.error_name or type(self).__name__

    @property
    def failure_point(self) -> str:
        return f"{self.op}:{self.error}"


class UnknownEdge(Abort):
    pass


class WrongGateway(Abort):
    pass


class TagMismatch(Abort):
    pass


class AeadFailure(Abort):
    pass


class AckZero(Abort):
    pass


class CsiMismatch(Abort):
    pass


class ExponentEchoMismatch(Abort):
    pass


class CounterMismatch(Abort):
    pass


class FunctionMismatch(Abort):
    pass


class BadExponent(Abort):
    pass


class OutOfPhase(Abort):
    pass


class Undecodable(Abort):
    """Wire bytes that failed to decode, surfaced as an abort at ``decode``."""

    error_name = "MalformedMessage"


class HandshakeTimeout(Abort):
    """The expected next message never arrived."""
