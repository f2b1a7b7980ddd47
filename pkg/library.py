"""Presentation file discovery.

Discovers presentation files from a directory:
    GROUPS_DIR/
        wise.pres
        stallings.pres
        ...
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from config import GROUPS_DIR
from presentation import PresentationError, Structure, parse_presentation
from zoo import PRESET_NAMES, Preset, load_preset_text, preset

logger = logging.getLogger(__name__)


@dataclass
class LibraryEntry:
    """A discovered presentation file."""

    name: str
    path: Path
    structure: Structure

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "path": str(self.path),
            "backend": self.structure.backend_hint.value,
            "letters": len(self.structure.alphabet),
            "relators": len(self.structure.relators),
        }


class PresentationLibrary:
    """Discovers and loads presentation files.

    Files that fail to parse are skipped with a warning.
    """

    def __init__(self, groups_dir: Path = None):
        self.groups_dir = Path(groups_dir or GROUPS_DIR)
        self._entries: dict[str, LibraryEntry] = {}
        self.refresh()

    def refresh(self) -> int:
        """Scan the groups directory.

        Returns:
            Number of presentations discovered.
        """
        self._entries.clear()

        if not self.groups_dir.exists():
            logger.warning(f"Groups directory not found: {self.groups_dir}")
            return 0

        for path in sorted(self.groups_dir.glob("*.pres")):
            try:
                structure = parse_presentation(path.read_text(encoding="utf-8"))
            except (OSError, PresentationError) as e:
                logger.warning(f"Skipping {path.name}: {e}")
                continue
            self._entries[structure.name] = LibraryEntry(structure.name, path, structure)

        logger.info(f"Discovered {len(self._entries)} presentations in {self.groups_dir}")
        return len(self._entries)

    def get(self, name: str) -> Optional[LibraryEntry]:
        return self._entries.get(name)

    def list_groups(self) -> list[str]:
        return sorted(self._entries.keys())

    def list_groups_detailed(self) -> list[dict]:
        return [e.to_dict() for e in sorted(self._entries.values(), key=lambda x: x.name)]


def resolve_group(group: str, library: Optional[PresentationLibrary] = None) -> Preset:
    """Preset by name, else a library entry, else a presentation file path."""
    if group in PRESET_NAMES:
        return preset(group)
    if library is not None and library.get(group) is not None:
        entry = library.get(group)
        return load_preset_text(entry.path.read_text(encoding="utf-8"))
    path = Path(group)
    if path.suffix == ".pres" or path.exists():
        return load_preset_text(path.read_text(encoding="utf-8"))
    return preset(group)
