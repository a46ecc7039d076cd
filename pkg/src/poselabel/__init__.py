"""Map VI-SLAM session logs to a building frame and label sensor and WiFi data."""

__version__ = "0.1.0"
