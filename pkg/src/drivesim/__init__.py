"""drivesim: closed-loop multi-agent driving simulation harness."""

__version__ = "0.1.0"
