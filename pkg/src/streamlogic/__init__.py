"""Decision procedure for the first-order theory of formal power series
ordered by an infinitesimal ``X``."""
from .errors import *  # noqa: F401,F403
from .logic import parse, parse_term, prenex, to_text, Sort
from .streams import LaurentRational, TruncSeries, coeffs, parse_stream, eval_stream
from .qe import decide, decide_full, eliminate, Decision
from .expand import expand_all, bisim_formula, sbar

__version__ = "0.1.0"
