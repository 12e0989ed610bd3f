"""Coleman data and Coleman integrals on odd degree hyperelliptic curves
over Q_p, with sqrt(p)-type reduction via interval products of matrix
recurrences."""

from .curve import Curve, InvalidCurve
from .padic import (
    ExcessValuation,
    InexactDivision,
    ModElem,
    NonUnit,
    PadicValue,
    PrimeContext,
)
from .polyring import NotSquarefree
from .redmat import EvalSet, NonWeierstrassRequired
from .recprod import (
    IntervalRequest,
    NonUnitDenominator,
    RecProdConfig,
    count_operations,
    interval_product_naive,
    interval_products,
    interval_products_fast,
    shift_evaluations,
)
from .colemandata import (
    ColemanData,
    PrecisionViolation,
    coleman_data,
    coleman_data_naive,
    make_evalset,
)
from .colemanint import (
    CurvePoint,
    INFINITY,
    IntegralResult,
    InvalidPoint,
    SingularSystem,
    classify_disk,
    coleman_data_for_points,
    integrate,
    integrate_with_data,
    integrals_to_infinity,
    lift_point,
    teichmuller,
    tiny_integrals,
)
from .verify import ZetaCheck, ZetaNumerator, point_count, zeta_consistency

__version__ = "0.1.0"

__all__ = [
    "Curve", "InvalidCurve", "PrimeContext", "ModElem", "PadicValue",
    "NonUnit", "InexactDivision", "ExcessValuation", "NotSquarefree",
    "EvalSet", "NonWeierstrassRequired", "NonUnitDenominator",
    "RecProdConfig", "count_operations", "IntervalRequest",
    "interval_product_naive", "interval_products", "interval_products_fast",
    "shift_evaluations", "ColemanData", "PrecisionViolation",
    "coleman_data", "coleman_data_naive", "make_evalset", "CurvePoint",
    "INFINITY", "IntegralResult", "InvalidPoint", "SingularSystem",
    "classify_disk", "coleman_data_for_points", "integrate",
    "integrate_with_data", "integrals_to_infinity", "lift_point",
    "teichmuller", "tiny_integrals", "ZetaCheck", "ZetaNumerator",
    "point_count", "zeta_consistency",
]
