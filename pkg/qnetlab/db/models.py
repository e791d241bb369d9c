"""
Database models for the qnetlab run ledger
"""
from datetime import datetime
from sqlalchemy import Column, String, Integer, Float, DateTime, JSON, Index
from sqlalchemy.ext.declarative import declarative_base

Base = declarative_base()


class ExperimentRun(Base):
    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, index=True)
    name = Column(String(255), nullable=False)
    config_digest = Column(String(64), nullable=False, index=True)
    seed = Column(Integer, nullable=False)
    horizon = Column(Integer, nullable=False)
    replications = Column(Integer, nullable=False)
    policy = Column(String(512), nullable=False)
    margin = Column(Float, nullable=True)  # null when the load is zero (unbounded margin)
    verdict = Column(String(50), nullable=False)
    classification = Column(String(50), nullable=False)  # stable, unstable, inconclusive
    summary = Column(JSON, nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow, nullable=False, index=True)

    __table_args__ = (
        Index("idx_run_name_created", "name", "created_at"),
    )

    def to_dict(self, with_summary: bool = False) -> dict:
        out = {
            "id": self.id,
            "name": self.name,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "horizon": self.horizon,
            "replications": self.replications,
            "policy": self.policy,
            "margin": self.margin,
            "verdict": self.verdict,
            "classification": self.classification,
            "created_at": self.created_at.isoformat() if self.created_at else None,
        }
        if with_summary:
            out["summary"] = self.summary
        return out
