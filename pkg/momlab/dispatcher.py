from typing import Any, Dict, Optional, Sequence

from momlab.exporter import BaseInfo, render
from momlab.handlers import BaseHandler, StreamHandler


class ReportDispatcher:
    """Renders a report once and hands it to every handler."""

    _handlers: Sequence[BaseHandler]
    _output_format: str
    _meta: Optional[Dict[str, Any]]

    def __init__(
            self,
            handlers: Optional[Sequence[BaseHandler]] = None,
            output_format: str = 'json',
            meta: Optional[Dict[str, Any]] = None,
    ) -> None:
        """
        Configure the destinations.

        Args:
            handlers: Destinations of every report; standard output when empty.
            output_format: ``json`` or ``csv``.
            meta: Block prepended to JSON documents.
        """
        if not handlers:
            handlers = (StreamHandler(),)

        self._handlers = handlers
        self._output_format = output_format
        self._meta = meta

    def dispatch(self, report: BaseInfo) -> None:
        """
        Deliver `report` to every handler.

        Every handler is tried; the first failure is raised once all of them ran.
        """
        rendered = render(report, self._output_format, self._meta)
        failures = []
        for handler in self._handlers:
            try:
                handler.handle(report, rendered)
            except Exception as exc:
                failures.append(exc)
        if failures:
            raise failures[0]
