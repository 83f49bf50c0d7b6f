"""Spatial telepresence session engine.

Places each remote member's video at a calibrated physical projection slot,
derives per-member audio gain from projection distance, and rotates the
layout on hand-wave gestures.
"""

__version__ = "0.1.0"
