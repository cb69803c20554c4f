"""Random-convolution time series classification that selects its input
representation and pooling operator on the training data."""

__version__ = "0.1.0"

from ._errors import SelfRocketError  # noqa: E402
from .combos import ALL_COMBOS, PPV_MIX, ComboId, Pooling, Representation  # noqa: E402
from .data import TimeSeriesDataset, load_dataset, stratified_resample, znormalize  # noqa: E402
from .pipeline import FittedModel, fit, fit_oracle, load, predict, save  # noqa: E402
from .selection import SelectionConfig, select_features  # noqa: E402

__all__ = [
    "ALL_COMBOS", "PPV_MIX", "ComboId", "Pooling", "Representation", "SelfRocketError",
    "TimeSeriesDataset", "load_dataset", "stratified_resample", "znormalize",
    "FittedModel", "fit", "fit_oracle", "load", "predict", "save",
    "SelectionConfig", "select_features",
]
