"""Static analysis of block-based robot programs for Codey Rocky and mBot."""

from botlint.analysis import Analysis, analyze, analyze_path
from botlint.ingest import load_container
from botlint.registry import Registry, default_registry
from botlint.tree import build_ast

__version__ = "0.1.0"

__all__ = ["Analysis", "Registry", "analyze", "analyze_path", "build_ast", "default_registry", "load_container"]
