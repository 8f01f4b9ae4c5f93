"""On-disk cache of tau levels.

Layout (schema version 1)::

    <root>/alpha<a>/s<D>/           D = s-weight cap, or "all" for no cap
        manifest.json
        level_000.txt ... level_<P>.txt

Each level file holds one polynomial in canonical text.  The manifest records
the schema version, alpha, the cap, the number of levels and a SHA-256 per
file; a manifest that does not match its files is treated as absent.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from .polyring import GradedPoly

__all__ = ["SCHEMA_VERSION", "CACHE_ENV", "default_cache_dir", "TauCache", "CacheError"]

SCHEMA_VERSION = 1
CACHE_ENV = "HIGHERWP_CACHE"


class CacheError(RuntimeError):
    pass


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "higherwp"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class TauCache:
    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def _dir(self, alpha: int, s_cap: int | None) -> Path:
        return self.root / f"alpha{alpha}" / ("sall" if s_cap is None else f"s{s_cap}")

    def manifest(self, alpha: int, s_cap: int | None) -> dict | None:
        path = self._dir(alpha, s_cap) / "manifest.json"
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError):
            return None
        if data.get("schema") != SCHEMA_VERSION or data.get("alpha") != alpha or data.get("s_degree_cap") != s_cap:
            return None
        return data

    def store(self, alpha: int, s_cap: int | None, levels: list[GradedPoly]) -> Path:
        """Write every level, then the manifest; homogeneity is checked first."""
        d = 2 * alpha + 1
        for p, poly in enumerate(levels):
            if not poly.is_homogeneous(d * p):
                raise CacheError(f"refusing to cache non-homogeneous tau level {p} (alpha={alpha})")
        folder = self._dir(alpha, s_cap)
        hashes = []
        for p, poly in enumerate(levels):
            text = poly.to_text() + "\n"
            _atomic_write(folder / f"level_{p:03d}.txt", text)
            hashes.append(_sha(text))
        manifest = {
            "schema": SCHEMA_VERSION,
            "alpha": alpha,
            "s_degree_cap": s_cap,
            "max_level": len(levels) - 1,
            "sha256": hashes,
        }
        _atomic_write(folder / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return folder

    def _load_exact(self, alpha: int, s_cap: int | None, P: int) -> list[GradedPoly] | None:
        man = self.manifest(alpha, s_cap)
        if man is None or man.get("max_level", -1) < P:
            return None
        folder = self._dir(alpha, s_cap)
        out = []
        for p in range(P + 1):
            try:
                text = (folder / f"level_{p:03d}.txt").read_text(encoding="utf-8")
            except OSError:
                return None
            if _sha(text) != man["sha256"][p]:
                return None
            out.append(GradedPoly.from_text(text.strip()))
        return out

    def available(self, alpha: int) -> list[tuple[int | None, int]]:
        """``(s_cap, max_level)`` for every valid manifest under ``alpha``."""
        base = self.root / f"alpha{alpha}"
        found = []
        if not base.is_dir():
            return found
        for sub in sorted(base.iterdir()):
            name = sub.name
            if not name.startswith("s"):
                continue
            cap = None if name == "sall" else int(name[1:]) if name[1:].isdigit() else -1
            if cap == -1:
                continue
            man = self.manifest(alpha, cap)
            if man is not None:
                found.append((cap, man["max_level"]))
        return found

    def load(self, alpha: int, P: int, s_cap: int | None) -> list[GradedPoly] | None:
        """Levels 0..P valid for s-weight cap ``s_cap``, served by any cache with a cap at least as large."""
        options = []
        for cap, top in self.available(alpha):
            if top < P:
                continue
            if s_cap is None and cap is not None:
                continue
            if s_cap is not None and cap is not None and cap < s_cap:
                continue
            options.append(cap)
        # prefer the tightest cap that still covers the request
        options.sort(key=lambda c: float("inf") if c is None else c)
        for cap in options:
            levels = self._load_exact(alpha, cap, P)
            if levels is not None:
                if cap != s_cap:
                    levels = [lv.truncate_s(s_cap) for lv in levels]
                return levels
        return None
