"""Projector towers and soliton surfaces of CP^(N-1) sigma models."""

__version__ = "0.1.0"
