"""
Кастомные типы для физических величин
"""

from typing import NewType

import numpy as np
from numpy.typing import NDArray

# Семантически различные типы для предотвращения ошибок с единицами
Length = NewType("Length", float)
Angle = NewType("Angle", float)
Frequency = NewType("Frequency", float)
Dimensionless = NewType("Dimensionless", float)
ModeIndex = NewType("ModeIndex", int)

# Массивы
ArrayR = NDArray[np.float64]
