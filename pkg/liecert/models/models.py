from sqlalchemy import Column, String, Integer, Text, DateTime, JSON, Enum as SQLEnum, ForeignKey
from sqlalchemy.orm import relationship
import uuid
from datetime import datetime
import enum

from liecert.db.database import Base


class Outcome(enum.Enum):
    """Verdict of a single check"""
    CERTIFIED = "CERTIFIED"            # proven: exact, or pinned by a modular rank / lower bound
    PLATEAU = "PLATEAU"                # sampled kernel stopped dropping but never met its bound
    UNRESOLVED = "UNRESOLVED"          # no certificate, or an exact contradiction
    RESOURCE_LIMIT = "RESOURCE_LIMIT"  # memory or time budget exhausted
    REPORT_ONLY = "REPORT_ONLY"        # type outside the statement's scope


class CertificateRecord(Base):
    __tablename__ = "certificates"

    id = Column(String(36), primary_key=True, default=lambda: str(uuid.uuid4()))
    check_name = Column(String, nullable=False)
    type_label = Column(String(1), nullable=False)
    rank = Column(Integer, nullable=False)
    seed = Column(Integer, nullable=False)
    outcome = Column(SQLEnum(Outcome), nullable=False)
    engine_version = Column(String, nullable=False)
    payload = Column(JSON, nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow)

    drifts = relationship("ReplayDrift", back_populates="record", cascade="all, delete-orphan")


class ReplayDrift(Base):
    __tablename__ = "replay_drifts"

    id = Column(String(36), primary_key=True, default=lambda: str(uuid.uuid4()))
    record_id = Column(String(36), ForeignKey("certificates.id"), nullable=False)
    change_type = Column(String, nullable=False)
    field_path = Column(String, nullable=False)
    old_value = Column(Text, nullable=True)
    new_value = Column(Text, nullable=True)
    severity = Column(String, nullable=False)
    detected_at = Column(DateTime, default=datetime.utcnow)

    record = relationship("CertificateRecord", back_populates="drifts")
