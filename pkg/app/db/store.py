"""
JSON document store for scene files.
"""
import json
import logging
import threading
from pathlib import Path
from typing import Any, Dict

from app.core.config import settings
from app.core.exceptions import SceneFileError, SceneParseError

logger = logging.getLogger(__name__)

# Serialises writers within one process
store_lock = threading.Lock()


def resolve_scene_path(path: str | Path) -> Path:
    """Return `path` if it exists, else the same name under SCENES_DIR."""
    candidate = Path(path)
    if candidate.exists():
        return candidate
    fallback = settings.SCENES_DIR / candidate.name
    if fallback.exists():
        logger.info(f"Resolved scene {path} to {fallback}")
        return fallback
    return candidate


class JsonStore:
    """Reads and writes single JSON documents."""

    @staticmethod
    def read_text(path: str | Path) -> str:
        path = resolve_scene_path(path)
        try:
            return path.read_text(encoding="utf-8")
        except OSError as e:
            logger.error(f"Scene file not readable: {path}")
            raise SceneFileError(f"cannot read {path}: {e.strerror or e}")

    @staticmethod
    def loads(text: str) -> Dict[str, Any]:
        """
        Decode a JSON object.

        Raises:
            SceneParseError: invalid JSON or top level is not an object
        """
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise SceneParseError(e.lineno, e.msg)
        if not isinstance(data, dict):
            raise SceneParseError(1, "top level must be a JSON object")
        return data

    @staticmethod
    def write(path: str | Path, data: Dict[str, Any]) -> None:
        with store_lock:
            try:
                with open(path, "w", encoding="utf-8") as f:
                    json.dump(data, f, indent=2)
                    f.write("\n")
            except OSError as e:
                raise SceneFileError(f"cannot write {path}: {e.strerror or e}")
