"""Core certification services."""
