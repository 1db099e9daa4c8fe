from src.services.evaluation.metrics import assign, mae, match_sources
from src.services.evaluation.report import evaluate
from src.services.evaluation.schemas import EvalReport, LayerMass, SourceMatch
from src.services.evaluation.weight_mass import export_weight_mass, off_diagonal_ratio, weight_mass

__all__ = [
    "EvalReport",
    "LayerMass",
    "SourceMatch",
    "assign",
    "evaluate",
    "export_weight_mass",
    "mae",
    "match_sources",
    "off_diagonal_ratio",
    "weight_mass",
]
