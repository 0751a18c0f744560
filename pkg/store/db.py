"""
Database connection and session management.

This module provides the run-history database. Any SQLAlchemy URL works;
the default is a SQLite file in the working directory.
"""

from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker, Session
from contextlib import contextmanager
from typing import Iterator, Optional
import os

from store.models import Base

DEFAULT_DATABASE_URL = "sqlite:///./normaltv.db"


def database_url_from_env() -> Optional[str]:
    """URL from NORMALTV_DATABASE_URL, or None when recording is not requested."""
    return os.getenv("NORMALTV_DATABASE_URL") or None


class Database:
    """
    Engine and session factory for one database URL.

    Args:
        url: SQLAlchemy database URL
    """

    def __init__(self, url: str = DEFAULT_DATABASE_URL):
        self.url = url
        self.engine = create_engine(
            url,
            connect_args={"check_same_thread": False} if url.startswith("sqlite") else {},
            echo=False,
        )
        self.SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=self.engine)

    def init_db(self):
        """Create all tables that do not exist yet."""
        Base.metadata.create_all(bind=self.engine)

    @contextmanager
    def get_db_context(self) -> Iterator[Session]:
        """
        Context manager for database sessions.

        Yields:
            Session: SQLAlchemy database session

        Usage:
            with database.get_db_context() as db:
                runs = db.query(SolverRun).all()
        """
        db = self.SessionLocal()
        try:
            yield db
        finally:
            db.close()

    def dispose(self):
        self.engine.dispose()
