"""Ping-pong certifier for free products of quasiconvex subgroups."""

__version__ = "0.1.0"
