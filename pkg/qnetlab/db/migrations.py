"""
Database migration utilities
"""
import logging

from .connection import init_db

logger = logging.getLogger(__name__)


async def run_migrations():
    """Run database migrations (create tables)"""
    await init_db()
    logger.info("Database migrations completed successfully")
