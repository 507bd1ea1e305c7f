"""Unified error formatting utilities."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Dict, Optional

from rich.markup import escape

from ..error_handling import exit_code_for
from ..exceptions import PricingError


@dataclass
class ErrorDetails:
    code: Optional[str] = None
    suggestion: Optional[str] = None
    context: Optional[Dict[str, Any]] = None


class UnifiedErrorFormatter:
    """Provides consistent error payloads for the console and for machines."""

    def format_for_cli(self, error: Exception, *, details: ErrorDetails | None = None) -> str:
        base = getattr(error, "message", str(error))
        suggestion = details.suggestion if details else None
        parts = [f"[red]✗[/red] {escape(base)}"]
        if suggestion:
            parts.append(f"[dim]Suggestion: {escape(suggestion)}[/dim]")
        return "\n".join(parts)

    def format_for_machine(self, error: Exception, *, details: ErrorDetails | None = None) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "error": {
                "message": getattr(error, "message", str(error)),
                "type": error.__class__.__name__,
                "exit_code": exit_code_for(error),
            }
        }
        if isinstance(error, PricingError) and error.details:
            payload["error"]["context"] = error.details
        if details:
            if details.code:
                payload["error"]["code"] = details.code
            if details.suggestion:
                payload["error"]["suggestion"] = details.suggestion
            if details.context:
                payload["error"].setdefault("context", {}).update(details.context)
        return payload

    def machine_line(self, error: Exception, *, details: ErrorDetails | None = None) -> str:
        return json.dumps(self.format_for_machine(error, details=details), default=str, sort_keys=True)
