"""HTTP job service wrapping the workbench core."""

from .app import create_app
from .workspace import Workspace

__all__ = ["create_app", "Workspace"]
