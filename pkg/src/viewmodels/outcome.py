from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np
import pandas as pd

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


@dataclass
class RunOutcome:
    """What a command produced; the view writes it into the run directory."""
    documents: Dict[str, Dict[str, Any]] = field(default_factory=dict)   # file name -> JSON body
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)        # file name -> CSV frame
    matrices: Dict[str, np.ndarray] = field(default_factory=dict)        # file name -> headed CSV matrix
    exit_code: int = EXIT_OK
