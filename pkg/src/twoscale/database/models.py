"""
Registry row models
File: src/twoscale/database/models.py
"""
import json
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional


@dataclass
class RunRecord:
    """One recorded CLI run"""

    id: int
    command: str
    config_hash: str
    seed: int
    version: str
    status: str = "running"
    config_path: Optional[str] = None
    out_dir: Optional[str] = None
    summary: Optional[str] = None
    error: Optional[str] = None
    started_at: Optional[datetime] = None
    finished_at: Optional[datetime] = None
    files: List[str] = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        """Create a RunRecord instance from a dictionary"""
        return cls(
            id=data.get("id"),
            command=data.get("command"),
            config_hash=data.get("config_hash"),
            seed=int(data.get("seed", 0)),
            version=data.get("version"),
            status=data.get("status", "running"),
            config_path=data.get("config_path"),
            out_dir=data.get("out_dir"),
            summary=data.get("summary"),
            error=data.get("error"),
            started_at=data.get("started_at"),
            finished_at=data.get("finished_at"),
            files=list(data.get("files", [])),
        )

    def get_summary(self) -> Dict[str, Any]:
        """Decode the stored JSON run summary"""
        if not self.summary:
            return {}
        return json.loads(self.summary)

    @property
    def short_hash(self) -> str:
        return self.config_hash[:12]
