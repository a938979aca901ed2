import asyncio
import datetime

import sqlite_utils

from supercrit.config import RUNS_DB
from supercrit.logging_config import loggers

logger = loggers['storage']

RUN_COLUMNS = {
    "id": int,
    "name": str,
    "mode": str,
    "seed": int,
    "status": str,
    "exit_code": int,
    "started_at": str,
    "wall_clock": float,
    "output_dir": str,
}


class RunStore:
    """Run history in a sqlite database with async support"""

    def __init__(self, path=None):
        self.path = path or RUNS_DB
        self.db = sqlite_utils.Database(self.path)
        self._init_db()
        logger.info(f"Run store initialized at {self.path}")

    def _init_db(self):
        """Initialize database schema"""
        if not self.db["runs"].exists():
            self.db["runs"].create(RUN_COLUMNS, pk="id")

    async def record_run(self, scenario, status, exit_code, wall_clock, output_dir):
        """Save a finished run asynchronously; returns the row id or None"""
        try:
            logger.debug(f"Recording run {scenario.name}: status={status}, exit={exit_code}")
            loop = asyncio.get_event_loop()
            return await loop.run_in_executor(
                None,
                self._record_run_sync,
                scenario.name,
                scenario.mode,
                scenario.seed,
                status,
                exit_code,
                wall_clock,
                str(output_dir),
            )
        except Exception as e:
            logger.error(f"Error recording run: {str(e)}", exc_info=True)
            return None

    def _record_run_sync(self, name, mode, seed, status, exit_code, wall_clock, output_dir):
        """Synchronous insert (to be run in executor)"""
        table = self.db["runs"].insert({
            "name": name,
            "mode": mode,
            "seed": seed,
            "status": status,
            "exit_code": exit_code,
            "started_at": datetime.datetime.now().isoformat(timespec="seconds"),
            "wall_clock": wall_clock,
            "output_dir": output_dir,
        })
        return table.last_pk

    async def get_runs(self, limit=10):
        """Get recent runs asynchronously"""
        try:
            logger.debug(f"Retrieving {limit} recent runs")
            loop = asyncio.get_event_loop()
            return await loop.run_in_executor(None, self._get_runs_sync, limit)
        except Exception as e:
            logger.error(f"Error getting runs: {str(e)}", exc_info=True)
            return []

    def _get_runs_sync(self, limit):
        """Synchronous query (to be run in executor)"""
        return list(self.db["runs"].rows_where(order_by="id desc", limit=limit))
