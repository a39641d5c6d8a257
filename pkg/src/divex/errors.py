"""Exception hierarchy shared by all divex modules."""


class DivexError(Exception):
    """Base class for every error raised by this package."""


# corpus / image loading

class MalformedManifest(DivexError):
    pass


class DanglingReference(DivexError):
    pass


class ImageDecodeError(DivexError):
    pass


class UnsupportedFormat(ImageDecodeError):
    pass


class TruncatedData(ImageDecodeError):
    pass


class EmptyInput(DivexError):
    pass


class DimensionMismatch(DivexError):
    pass


class UnknownVideo(DivexError):
    pass


# color features

class EmptyImage(DivexError):
    pass


class ImageTooSmall(DivexError):
    pass


class MalformedRow(DivexError):
    pass


class ScoreOutOfRange(DivexError):
    pass


class ZeroVector(DivexError):
    pass


# search

class BlankQuery(DivexError):
    pass


class EmptyColorSet(DivexError):
    pass


class UnknownKeyframe(DivexError):
    pass


class EmptySketch(DivexError):
    pass


class BadMinMatch(DivexError):
    pass


# collaboration

class MalformedMessage(DivexError):
    pass


class MalformedWire(DivexError):
    pass


# task server

class MalformedTask(DivexError):
    pass


class InvariantViolation(DivexError):
    pass


class TaskMismatch(DivexError):
    pass


class UnknownTask(DivexError):
    pass


# gateway

class UnknownSession(DivexError):
    pass


class PortUnavailable(DivexError):
    pass
