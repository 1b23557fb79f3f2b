"""Database configuration and session management for the certificate ledger"""
from contextlib import contextmanager
from functools import lru_cache
from pathlib import Path
from typing import Iterator

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, declarative_base, sessionmaker

Base = declarative_base()


@lru_cache(maxsize=None)
def get_engine(url: str) -> Engine:
    """One engine per ledger URL; sqlite parent directories are created on demand"""
    if url.startswith("sqlite:///"):
        Path(url[len("sqlite:///"):]).parent.mkdir(parents=True, exist_ok=True)
    return create_engine(url, pool_pre_ping=True)


@lru_cache(maxsize=None)
def _session_factory(url: str) -> sessionmaker:
    return sessionmaker(autocommit=False, autoflush=False, bind=get_engine(url))


@contextmanager
def session_scope(url: str) -> Iterator[Session]:
    """Transactional session: commit on success, roll back on error"""
    db = _session_factory(url)()
    try:
        yield db
        db.commit()
    except Exception:
        db.rollback()
        raise
    finally:
        db.close()


def init_db(url: str) -> None:
    """Initialize database tables"""
    from liecert.models import models  # noqa: F401  registers the tables on Base

    Base.metadata.create_all(bind=get_engine(url))
