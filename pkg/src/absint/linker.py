"""Project manifests and AST-level linking.

A manifest is a JSON file mapping target names to ordered lists of
MiniImp source files.  Linking merges a target's files into a single
Program whose statements keep their original file in every SourceLoc,
so a linked program can be analyzed, serialized to one merged source
file, and fed to the testcase reducer like any single-file input.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .ast import FuncDef, Program
from .parser import parse_file


class LinkError(Exception):
    pass


@dataclass
class ProjectManifest:
    path: str
    targets: dict[str, list[str]]  # target name -> file paths, manifest-relative

    @classmethod
    def load(cls, path: str) -> "ProjectManifest":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict) or "targets" not in raw:
            raise LinkError(f"{path}: manifest must be an object with a 'targets' key")
        targets: dict[str, list[str]] = {}
        base = os.path.dirname(os.path.abspath(path))
        for name, entry in raw["targets"].items():
            if not isinstance(entry, dict) or not isinstance(entry.get("files"), list):
                raise LinkError(f"{path}: target {name!r} must be {{\"files\": [...]}}")
            files = [
                f if os.path.isabs(f) else os.path.join(base, f) for f in entry["files"]
            ]
            for f in files:
                if not os.path.exists(f):
                    raise LinkError(f"target {name!r}: file not found: {f}")
            targets[name] = files
        return cls(path, targets)


def link(manifest: ProjectManifest, target: str) -> Program:
    """Merge a target's files into one Program.  Function order is file
    order then definition order; duplicate function names across files
    and unresolved calls are LinkErrors."""
    if target not in manifest.targets:
        raise LinkError(
            f"unknown target {target!r}; manifest defines {sorted(manifest.targets)}"
        )
    functions: list[FuncDef] = []
    seen: dict[str, FuncDef] = {}
    for path in manifest.targets[target]:
        try:
            program = parse_file(path)
        except OSError as exc:
            raise LinkError(f"cannot read {path}: {exc}") from exc
        for fn in program.functions:
            if fn.name in seen:
                raise LinkError(
                    f"duplicate function {fn.name!r}: defined at {seen[fn.name].loc} "
                    f"and {fn.loc}"
                )
            seen[fn.name] = fn
            functions.append(fn)
    merged = Program(functions)
    _check_calls_resolve(merged)
    return merged


def _check_calls_resolve(program: Program) -> None:
    from .ast import BUILTINS, Call, iter_stmts

    defined = {fn.name for fn in program.functions}
    for fn in program.functions:
        for stmt in iter_stmts(fn.body):
            if isinstance(stmt, Call) and stmt.name not in defined and stmt.name not in BUILTINS:
                raise LinkError(f"{stmt.loc}: call to undefined function {stmt.name!r}")
