"""langpulse: per-language community metrics from GitHub and StackOverflow dumps."""

__version__ = "0.1.0"
