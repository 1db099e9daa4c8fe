from src.services.gradcheck.gradcheck_service import TINY_MODEL, gradcheck
from src.services.gradcheck.schemas import GradcheckEntry, GradcheckReport

__all__ = ["GradcheckEntry", "GradcheckReport", "TINY_MODEL", "gradcheck"]
