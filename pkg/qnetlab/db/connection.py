"""
Run ledger engine and sessions
"""
import os
from typing import AsyncIterator, Optional

from sqlalchemy.ext.asyncio import AsyncEngine, AsyncSession, async_sessionmaker, create_async_engine
from sqlalchemy.pool import NullPool

from .models import Base

DEFAULT_DATABASE_URL = "sqlite+aiosqlite:///./qnetlab_runs.db"

ASYNC_SCHEMES = {
    "postgres://": "postgresql+asyncpg://",
    "postgresql://": "postgresql+asyncpg://",
}


def normalize_url(url: Optional[str]) -> str:
    """Async driver URL; postgres:// (Railway style) becomes postgresql+asyncpg://"""
    if not url:
        return DEFAULT_DATABASE_URL
    for scheme, driver in ASYNC_SCHEMES.items():
        if url.startswith(scheme):
            return driver + url[len(scheme):]
    return url


def create_ledger_engine(url: Optional[str] = None) -> AsyncEngine:
    """
    Engine for the run ledger

    Args:
        url: database URL, normalized to an async driver; falls back to
            DATABASE_URL and then to the local SQLite file
    """
    return create_async_engine(normalize_url(url or os.getenv("DATABASE_URL")), poolclass=NullPool)


engine = create_ledger_engine()

AsyncSessionLocal = async_sessionmaker(engine, class_=AsyncSession, expire_on_commit=False)


async def get_db() -> AsyncIterator[AsyncSession]:
    """Ledger session per request"""
    async with AsyncSessionLocal() as session:
        yield session


async def init_db(bind: Optional[AsyncEngine] = None) -> None:
    """Create the experiment_runs table if it is missing"""
    async with (bind or engine).begin() as conn:
        await conn.run_sync(Base.metadata.create_all)
