"""Cross-tool duplicate removal: a kubesec finding whose resolution text is
gestalt-similar (>= threshold) to a trivy finding's resolution is dropped,
first match wins, one removal per source finding."""

from __future__ import annotations

from dataclasses import dataclass, field

from .gestalt import ratio
from .model import Finding, Tool

DEFAULT_THRESHOLD = 0.65


@dataclass(frozen=True)
class DedupeConfig:
    threshold: float = DEFAULT_THRESHOLD
    enabled_pairs: tuple[tuple[Tool, Tool], ...] = ((Tool.TRIVY, Tool.KUBESEC),)

    def __post_init__(self):
        if not 0.0 <= self.threshold:
            raise ValueError("threshold must be non-negative")


def is_duplicate(keeper: Finding, candidate: Finding, threshold: float) -> bool:
    # Empty resolutions never count as duplicates: ratio("", "") is 1.0 and
    # would mass-remove empty-resolution findings.
    if not keeper.resolution or not candidate.resolution:
        return False
    return ratio(keeper.resolution, candidate.resolution) >= threshold


def dedupe_pod(
    reports: dict[Tool, list[Finding]], config: DedupeConfig = DedupeConfig()
) -> dict[Tool, list[Finding]]:
    """Returns a new per-tool map; source lists untouched, each matched
    target candidate removed at most once, surviving order preserved."""
    result = {tool: list(findings) for tool, findings in reports.items()}
    for source_tool, target_tool in config.enabled_pairs:
        sources = result.get(source_tool, [])
        targets = result.get(target_tool)
        if targets is None:
            continue
        for keeper in sources:
            for idx, candidate in enumerate(targets):
                if is_duplicate(keeper, candidate, config.threshold):
                    del targets[idx]
                    break
    return result
