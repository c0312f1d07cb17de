"""Run registry for twoscale"""

from twoscale.database.connection import RunDatabase
from twoscale.database.models import RunRecord

__all__ = ["RunDatabase", "RunRecord"]
