# -*- coding: utf-8 -*-
"""Target-file selection, minified/library detection and line diffs."""

import difflib
import logging
import re
from dataclasses import dataclass, field
from pathlib import PurePosixPath
from typing import Iterable, List, Literal, Optional, Sequence, Set, Tuple

from .errors import UnifiedDiffParseError
from .models import ChangedFile, ExclusionReason

logger = logging.getLogger(__name__)

TARGET_EXTENSIONS = (".js", ".ts")
EXTENDED_EXTENSIONS = TARGET_EXTENSIONS + (".jsx", ".tsx", ".mjs", ".cjs")
LIBRARY_SEGMENTS = frozenset({"node_modules", "vendor", "dist", "build", "bower_components"})
MINIFIED_SUFFIXES = (".min.js", ".min.ts")

MINIFIED_PREFIX_CHARS = 5000
MINIFIED_WHITESPACE_RATIO = 0.12
MINIFIED_MEAN_LINE_LENGTH = 500

# Above this many DP cells the middle section falls back to difflib.
MAX_LCS_CELLS = 4_000_000

HUNK_HEADER = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")

Opcode = Tuple[str, int, int, int, int]


@dataclass
class FileDiff:
    """One changed source file with line sets in before/after coordinates."""

    path: str
    before_content: str
    after_content: str = ""
    deleted_lines: Set[int] = field(default_factory=set)
    added_lines: Set[int] = field(default_factory=set)
    excluded: ExclusionReason = ExclusionReason.NONE
    patch_agrees: Optional[bool] = None

    def __post_init__(self) -> None:
        if self.excluded != ExclusionReason.NONE:
            self.deleted_lines = set()
            self.added_lines = set()


def is_target_path(path: str, extended: bool = False) -> bool:
    extensions = EXTENDED_EXTENSIONS if extended else TARGET_EXTENSIONS
    return PurePosixPath(path).suffix.lower() in extensions


def filter_target_files(paths: Iterable[str], extended: bool = False) -> List[str]:
    """Keep JavaScript/TypeScript paths (plus JSX/TSX/ESM/CJS when extended)."""
    return [path for path in paths if is_target_path(path, extended)]


def detect_library(path: str) -> bool:
    """Check for vendored or built files by path segment or ``.min`` suffix."""
    segments = re.split(r"[\\/]", path)
    if any(segment in LIBRARY_SEGMENTS for segment in segments):
        return True
    return segments[-1].lower().endswith(MINIFIED_SUFFIXES)


def detect_minified(source: str) -> bool:
    """Heuristically detect minified code from the first 5,000 characters.

    Minified when whitespace is under 12% of the prefix or its mean line
    length exceeds 500 characters.
    """
    prefix = source[:MINIFIED_PREFIX_CHARS]
    if not prefix:
        return False
    whitespace = sum(1 for char in prefix if char.isspace())
    if whitespace / len(prefix) < MINIFIED_WHITESPACE_RATIO:
        return True
    newlines = prefix.count("\n")
    mean_line_length = (len(prefix) - newlines) / (newlines + 1)
    return mean_line_length > MINIFIED_MEAN_LINE_LENGTH


def normalize_newlines(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")


def split_lines(text: str) -> List[str]:
    """Split on LF after normalizing line endings; no phantom final line."""
    text = normalize_newlines(text)
    if not text:
        return []
    lines = text.split("\n")
    if text.endswith("\n"):
        lines.pop()
    return lines


def _lcs_opcodes(a: Sequence[str], b: Sequence[str]) -> List[Opcode]:
    """Minimal line edit script from a longest common subsequence table.

    Ties between deleting and inserting are broken by comparing the two
    lines' text, so swapping ``a`` and ``b`` mirrors the script exactly.
    """
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        line, row, below = a[i], table[i], table[i + 1]
        for j in range(m - 1, -1, -1):
            if line == b[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = below[j] if below[j] >= row[j + 1] else row[j + 1]

    steps: List[str] = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j]:
            steps.append("equal")
            i, j = i + 1, j + 1
        elif table[i + 1][j] > table[i][j + 1] or (
            table[i + 1][j] == table[i][j + 1] and a[i] < b[j]
        ):
            steps.append("delete")
            i += 1
        else:
            steps.append("insert")
            j += 1
    steps.extend(["delete"] * (n - i))
    steps.extend(["insert"] * (m - j))

    opcodes: List[Opcode] = []
    i = j = 0
    for step in steps:
        di, dj = (1, 1) if step == "equal" else (1, 0) if step == "delete" else (0, 1)
        if opcodes and opcodes[-1][0] == step:
            tag, i1, i2, j1, j2 = opcodes[-1]
            opcodes[-1] = (tag, i1, i2 + di, j1, j2 + dj)
        else:
            opcodes.append((step, i, i + di, j, j + dj))
        i, j = i + di, j + dj
    return opcodes


def _fallback_opcodes(a: Sequence[str], b: Sequence[str]) -> List[Opcode]:
    opcodes: List[Opcode] = []
    matcher = difflib.SequenceMatcher(None, a, b, autojunk=False)
    for tag, i1, i2, j1, j2 in matcher.get_opcodes():
        if tag == "replace":
            opcodes.append(("delete", i1, i2, j1, j1))
            opcodes.append(("insert", i2, i2, j1, j2))
        else:
            opcodes.append((tag, i1, i2, j1, j2))
    return opcodes


def line_opcodes(before: str, after: str) -> List[Opcode]:
    """Edit script between two texts as (tag, i1, i2, j1, j2) line spans."""
    a, b = split_lines(before), split_lines(after)
    n, m = len(a), len(b)
    head = 0
    while head < min(n, m) and a[head] == b[head]:
        head += 1
    tail = 0
    while tail < min(n, m) - head and a[n - 1 - tail] == b[m - 1 - tail]:
        tail += 1

    middle_a, middle_b = a[head : n - tail], b[head : m - tail]
    if len(middle_a) * len(middle_b) > MAX_LCS_CELLS:
        logger.debug(f"Large diff ({len(middle_a)}x{len(middle_b)} lines); using difflib matcher")
        middle = _fallback_opcodes(middle_a, middle_b)
    else:
        middle = _lcs_opcodes(middle_a, middle_b)

    opcodes: List[Opcode] = []
    if head:
        opcodes.append(("equal", 0, head, 0, head))
    opcodes.extend((tag, i1 + head, i2 + head, j1 + head, j2 + head) for tag, i1, i2, j1, j2 in middle)
    if tail:
        opcodes.append(("equal", n - tail, n, m - tail, m))
    return opcodes


def compute_line_diff(before: str, after: str) -> Tuple[Set[int], Set[int]]:
    """Deleted lines (in ``before``) and added lines (in ``after``), 1-based."""
    deleted: Set[int] = set()
    added: Set[int] = set()
    for tag, i1, i2, j1, j2 in line_opcodes(before, after):
        if tag == "delete":
            deleted.update(range(i1 + 1, i2 + 1))
        elif tag == "insert":
            added.update(range(j1 + 1, j2 + 1))
    return deleted, added


def _group_opcodes(opcodes: List[Opcode], context: int) -> List[List[Opcode]]:
    """Split an edit script into hunks with ``context`` lines around changes."""
    if not any(tag != "equal" for tag, *_ in opcodes):
        return []
    codes = list(opcodes)
    if codes[0][0] == "equal":
        tag, i1, i2, j1, j2 = codes[0]
        codes[0] = (tag, max(i1, i2 - context), i2, max(j1, j2 - context), j2)
    if codes[-1][0] == "equal":
        tag, i1, i2, j1, j2 = codes[-1]
        codes[-1] = (tag, i1, min(i2, i1 + context), j1, min(j2, j1 + context))

    groups: List[List[Opcode]] = []
    group: List[Opcode] = []
    for tag, i1, i2, j1, j2 in codes:
        if tag == "equal" and i2 - i1 > 2 * context:
            group.append((tag, i1, min(i2, i1 + context), j1, min(j2, j1 + context)))
            groups.append(group)
            group = []
            i1, j1 = max(i1, i2 - context), max(j1, j2 - context)
        group.append((tag, i1, i2, j1, j2))
    if group and not (len(group) == 1 and group[0][0] == "equal"):
        groups.append(group)
    return groups


def _format_range(start: int, stop: int) -> str:
    beginning = start + 1
    length = stop - start
    if length == 1:
        return f"{beginning}"
    if not length:
        beginning -= 1
    return f"{beginning},{length}"


def render_unified_diff(before: str, after: str, path: str = "file", context: int = 3) -> str:
    """Render the ``compute_line_diff`` edit script as a GNU unified diff."""
    a, b = split_lines(before), split_lines(after)
    groups = _group_opcodes(line_opcodes(before, after), context)
    if not groups:
        return ""
    out = [f"--- a/{path}", f"+++ b/{path}"]
    for group in groups:
        first, last = group[0], group[-1]
        out.append(f"@@ -{_format_range(first[1], last[2])} +{_format_range(first[3], last[4])} @@")
        for tag, i1, i2, j1, j2 in group:
            if tag == "equal":
                out.extend(" " + line for line in a[i1:i2])
            elif tag == "delete":
                out.extend("-" + line for line in a[i1:i2])
            else:
                out.extend("+" + line for line in b[j1:j2])
    return "\n".join(out) + "\n"


def parse_unified_diff(patch: str) -> Tuple[Set[int], Set[int]]:
    """Recover deleted/added line numbers from unified diff text.

    Raises:
        UnifiedDiffParseError: A hunk header is malformed or a hunk body
            does not match the line counts in its header.
    """
    deleted: Set[int] = set()
    added: Set[int] = set()
    old_left = new_left = 0
    old_line = new_line = 0
    header = ""
    for line in split_lines(patch):
        if old_left == 0 and new_left == 0:
            if line.startswith("@@"):
                match = HUNK_HEADER.match(line)
                if match is None:
                    raise UnifiedDiffParseError("Malformed hunk header", line)
                header = line
                old_line, new_line = int(match.group(1)), int(match.group(3))
                old_left = int(match.group(2)) if match.group(2) is not None else 1
                new_left = int(match.group(4)) if match.group(4) is not None else 1
            continue

        marker = line[:1]
        if marker == "\\":
            continue
        if marker in (" ", ""):
            old_line, new_line = old_line + 1, new_line + 1
            old_left, new_left = old_left - 1, new_left - 1
        elif marker == "-":
            deleted.add(old_line)
            old_line, old_left = old_line + 1, old_left - 1
        elif marker == "+":
            added.add(new_line)
            new_line, new_left = new_line + 1, new_left - 1
        else:
            raise UnifiedDiffParseError(f"Unexpected line {line!r}", header)
        if old_left < 0 or new_left < 0:
            raise UnifiedDiffParseError("Hunk body longer than its header", header)

    if old_left or new_left:
        raise UnifiedDiffParseError("Truncated hunk", header)
    return deleted, added


def _patch_agrees(path: str, deleted: Set[int], patch: str) -> Optional[bool]:
    """Check that the remote patch deletes as many lines as the content diff.

    Only counts are compared: two minimal edit scripts may pick different
    copies of a repeated line.
    """
    try:
        from_patch, _ = parse_unified_diff(patch)
    except UnifiedDiffParseError as e:
        logger.debug(f"Skipping patch cross-check for {path}: {e}")
        return None
    if len(from_patch) != len(deleted):
        logger.debug(f"{path}: content diff deletes {len(deleted)} lines, patch deletes {len(from_patch)}")
        return False
    return True


def build_file_diff(
    changed: ChangedFile,
    extended_extensions: bool = False,
    max_file_bytes: int = 5 * 1024 * 1024,
    diff_source: Literal["auto", "content", "patch"] = "auto",
) -> FileDiff:
    """Apply the exclusion gates to a changed file, then diff it.

    Gates run in order: extension, library path, size, minified content.
    """
    path = changed.filename
    before = normalize_newlines(changed.before_content or "")
    after = normalize_newlines(changed.after_content or "")

    def excluded(reason: ExclusionReason) -> FileDiff:
        logger.info(f"Excluding {path}: {reason.value}")
        return FileDiff(path=path, before_content=before, after_content=after, excluded=reason)

    if not is_target_path(path, extended_extensions):
        return FileDiff(
            path=path,
            before_content=before,
            after_content=after,
            excluded=ExclusionReason.NON_TARGET_EXTENSION,
        )
    if detect_library(path):
        return excluded(ExclusionReason.LIBRARY)
    if max(len(before.encode("utf-8")), len(after.encode("utf-8"))) > max_file_bytes:
        return excluded(ExclusionReason.TOO_LARGE)
    if detect_minified(before):
        return excluded(ExclusionReason.MINIFIED)

    has_content = changed.before_content is not None and (
        changed.after_content is not None or changed.status == "removed"
    )
    use_patch: Optional[bool]
    patch_agrees: Optional[bool] = None
    if diff_source == "content":
        use_patch = False
    elif diff_source == "patch":
        use_patch = True
    else:
        use_patch = not has_content and changed.patch is not None

    if use_patch:
        deleted, added = parse_unified_diff(changed.patch or "")
        line_count = len(split_lines(before))
        if changed.before_content is not None:
            deleted = {line for line in deleted if line <= line_count}
    elif has_content or diff_source == "content":
        deleted, added = compute_line_diff(before, after)
        if diff_source == "auto" and changed.patch:
            patch_agrees = _patch_agrees(path, deleted, changed.patch)
    else:
        logger.warning(f"No contents or patch for {path}; nothing to diff")
        deleted, added = set(), set()
    return FileDiff(
        path=path,
        before_content=before,
        after_content=after,
        deleted_lines=deleted,
        added_lines=added,
        patch_agrees=patch_agrees,
    )
