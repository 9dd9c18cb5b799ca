"""Exception hierarchy.

Every error carries a stable ``code`` (the class name) which the console and
the wire protocol surface as ``error: <code>``.
"""


class EmlError(Exception):
    """Base class for all errors raised by the package."""

    @property
    def code(self) -> str:
        return type(self).__name__


# -- grammar ---------------------------------------------------------------

class EmlSyntaxError(EmlError, ValueError):
    """A line that is not a valid EML command or acknowledgment."""


class MissingColon(EmlSyntaxError):
    pass


class EmptyCommandName(EmlSyntaxError):
    pass


class MalformedQuote(EmlSyntaxError):
    pass


class UnknownCommand(EmlSyntaxError):
    pass


class UnknownAck(EmlSyntaxError):
    pass


class ArityMismatch(EmlSyntaxError):
    pass


class TypeMismatch(EmlSyntaxError):
    pass


class MalformedPermissionList(EmlSyntaxError):
    pass


class MalformedSapCall(EmlSyntaxError):
    pass


class MalformedXmlPayload(EmlSyntaxError):
    pass


# -- registry / persistence ------------------------------------------------

class NotFound(EmlError, KeyError):
    pass


class DuplicateId(EmlError):
    pass


class UnknownHost(EmlError):
    pass


class IoFailure(EmlError, OSError):
    pass


class CorruptSnapshot(EmlError):
    pass


# -- simulator / SAP -------------------------------------------------------

class DuplicateNode(EmlError):
    pass


class UnknownNode(EmlError):
    pass


class ServiceUnknown(EmlError):
    pass


class ServiceDisabled(EmlError):
    pass


class NoClients(EmlError):
    pass


class UnknownPrinter(EmlError):
    pass


class UnknownSap(EmlError):
    pass


class Infeasible(EmlError):
    pass


# -- reports ---------------------------------------------------------------

class NotWellFormed(EmlError, ValueError):
    pass


# -- transport -------------------------------------------------------------

class BindFailure(EmlError, OSError):
    pass


class ConnectFailure(EmlError, OSError):
    pass
