"""hudtrack: drone telemetry extraction from FPV HUD video frames."""

__version__ = "0.1.0"
