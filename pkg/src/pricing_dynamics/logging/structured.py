"""Structured logging helpers for pricing-dynamics."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict


@dataclass(slots=True)
class StructuredLogger:
    """Emits one JSON object per event at INFO.

    Records propagate to the ``pricing_dynamics`` logger, so the handlers and
    level installed by ``setup_logging`` apply to them.
    """

    name: str
    logger: logging.Logger = field(init=False)

    def __post_init__(self) -> None:
        self.logger = logging.getLogger(self.name)

    def log_event(self, event: str, **context: Any) -> None:
        payload: Dict[str, Any] = {"event": event}
        if context:
            payload.update(context)
        self.logger.info(json.dumps(payload, default=str))

    def log_run(
        self,
        algorithm: str,
        seed: int,
        duration: float,
        success: bool,
        **context: Any,
    ) -> None:
        self.log_event(
            "run_completed",
            algorithm=algorithm,
            seed=seed,
            duration_ms=round(duration * 1000, 2),
            success=success,
            **context,
        )
