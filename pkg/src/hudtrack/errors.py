"""Exception types shared across the toolkit.

Every failure mode that callers are expected to branch on gets its own
class; anything else surfaces as a plain ValueError/OSError.
"""


class HudTrackError(Exception):
    """Base class for all toolkit errors."""


# --- frame ingest ---------------------------------------------------------

class InvalidInterval(HudTrackError):
    pass


class FrameMissing(HudTrackError):
    pass


class DecodeError(HudTrackError):
    pass


# --- imaging kernels ------------------------------------------------------

class TileConfigError(HudTrackError):
    pass


class KernelError(HudTrackError):
    pass


class InvalidFactor(HudTrackError):
    pass


# --- ROI handling ---------------------------------------------------------

class OutOfBounds(HudTrackError):
    pass


class ValidationFailed(HudTrackError):
    pass


class LayoutError(HudTrackError):
    pass


# --- recognition / parsing ------------------------------------------------

class EngineTimeout(HudTrackError):
    pass


class ProtocolError(HudTrackError):
    pass


class EngineCrashed(HudTrackError):
    pass


class ParseError(HudTrackError):
    """Base for telemetry text parsing failures; ``code`` is stable."""

    code = "parse_error"


class CharInvalid(ParseError):
    code = "char_invalid"


class RangeInvalid(ParseError):
    code = "range_invalid"


class EmptyText(ParseError):
    code = "empty"


# --- track assembly / filtering / geodesy ---------------------------------

class EmptyTrack(HudTrackError):
    pass


class TooShort(HudTrackError):
    pass


class TimeOrderError(HudTrackError):
    pass


class OutOfZone(HudTrackError):
    pass


# --- analysis / export ----------------------------------------------------

class EmptyInput(HudTrackError):
    pass


class NoAlignment(HudTrackError):
    pass


class NoAltitudeData(HudTrackError):
    pass


class NothingToRender(HudTrackError):
    pass
