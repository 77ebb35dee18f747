"""Event impact, news Granger and lexicon diffusion analysis for online communities."""

from ._core import (
    ArgumentError,
    ConfigurationError,
    Error,
    __version__,
    adf_test,
    analyse_event,
    bh_fdr,
    granger,
    kpss_test,
    ljung_box,
    npmi,
    run,
    select_lag,
    tokenize,
    write_synthetic_dataset,
)

__all__ = [
    "ArgumentError",
    "ConfigurationError",
    "Error",
    "__version__",
    "adf_test",
    "analyse_event",
    "bh_fdr",
    "granger",
    "kpss_test",
    "ljung_box",
    "npmi",
    "run",
    "select_lag",
    "tokenize",
    "write_synthetic_dataset",
]
