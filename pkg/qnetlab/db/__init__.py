"""
Run ledger database for qnetlab
"""
from .models import Base, ExperimentRun
from .connection import AsyncSessionLocal, create_ledger_engine, get_db, init_db, normalize_url
from .migrations import run_migrations

__all__ = [
    "Base",
    "ExperimentRun",
    "create_ledger_engine",
    "get_db",
    "init_db",
    "normalize_url",
    "AsyncSessionLocal",
    "run_migrations",
]
