import logging
import os
import sys
import tempfile
from abc import abstractmethod
from pathlib import Path
from typing import Callable, Optional, TextIO

from momlab.exporter import BaseInfo
from momlab.utils import UTF8, get_logger

REPORT_MESSAGE = '%s report: %s'


class BaseHandler:
    """Destination of a rendered report."""

    @abstractmethod
    def handle(self, report: BaseInfo, rendered: str) -> None:
        """
        Deliver one report.

        Args:
            report: The report object.
            rendered: Its rendering in the requested output format.
        """


ReportLogFunc = Callable[..., None]


class LoggingHandler(BaseHandler):
    """Logs every rendered report, meta block included, labelled with its report type."""

    _log: Optional[ReportLogFunc]
    _level: int

    def __init__(self, log: Optional[ReportLogFunc] = None, level: int = logging.DEBUG) -> None:
        """
        Args:
            log: Called as ``log(message, kind, rendered)`` in the %-style of `logging`;
                the package logger at `level` when omitted.
            level: Level of the records written to the package logger.
        """
        self._log = log
        self._level = level

    def handle(self, report: BaseInfo, rendered: str) -> None:
        kind = type(report).__name__
        document = rendered.rstrip('\n')
        if self._log is None:
            get_logger().log(self._level, REPORT_MESSAGE, kind, document)
        else:
            self._log(REPORT_MESSAGE, kind, document)


class StreamHandler(BaseHandler):
    """Writes the rendering to a text stream, standard output by default."""

    _stream: Optional[TextIO]

    def __init__(self, stream: Optional[TextIO] = None) -> None:
        self._stream = stream

    def handle(self, report: BaseInfo, rendered: str) -> None:
        stream = self._stream if self._stream is not None else sys.stdout
        stream.write(rendered)
        stream.flush()


class FileHandler(BaseHandler):
    """Writes the rendering to a file through a temporary file in the same directory and a rename."""

    _path: Path

    def __init__(self, path: Path) -> None:
        self._path = Path(path)

    def handle(self, report: BaseInfo, rendered: str) -> None:
        directory = self._path.parent
        descriptor, temporary = tempfile.mkstemp(prefix=f'.{self._path.name}.', dir=directory)
        try:
            with os.fdopen(descriptor, 'w', encoding=UTF8) as stream:
                stream.write(rendered)
            os.replace(temporary, self._path)
        except BaseException:
            Path(temporary).unlink(missing_ok=True)
            raise
        get_logger().debug('wrote %s', self._path)
