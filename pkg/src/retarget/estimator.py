"""sklearn-style wrapper so the engine composes with transformer pipelines."""
from sklearn.base import BaseEstimator, TransformerMixin

from .distortion import DistortionParams
from .pipeline import RetargetConfig, retarget


class Retargeter(BaseEstimator, TransformerMixin):
    """Content-aware retargeting as a stateless transformer.

    transform() accepts a single HxW(xC) array or a list of arrays and
    returns the retargeted raster(s). Plans from the last transform are kept
    on ``plans_`` for inspection.
    """

    def __init__(
        self,
        target_width=None,
        target_height=None,
        factor=None,
        d_threshold=1.0,
        omega0=1.0,
        grid_cols=25,
        grid_rows=25,
        min_cell_fraction=0.15,
        coverage_threshold=0.05,
        allow_scale_fallback=False,
    ):
        self.target_width = target_width
        self.target_height = target_height
        self.factor = factor
        self.d_threshold = d_threshold
        self.omega0 = omega0
        self.grid_cols = grid_cols
        self.grid_rows = grid_rows
        self.min_cell_fraction = min_cell_fraction
        self.coverage_threshold = coverage_threshold
        self.allow_scale_fallback = allow_scale_fallback

    def _config(self) -> RetargetConfig:
        return RetargetConfig(
            target_width=self.target_width,
            target_height=self.target_height,
            factor=self.factor,
            params=DistortionParams(omega0=self.omega0, d_threshold=self.d_threshold),
            grid_cols=self.grid_cols,
            grid_rows=self.grid_rows,
            min_cell_fraction=self.min_cell_fraction,
            coverage_threshold=self.coverage_threshold,
            allow_scale_fallback=self.allow_scale_fallback,
        )

    def fit(self, X=None, y=None):
        # Stateless: nothing to learn, the parameters fully define the warp.
        self._config()
        self.fitted_ = True
        return self

    def transform(self, X):
        config = self._config()
        if isinstance(X, (list, tuple)):
            results = [retarget(img, config) for img in X]
            self.plans_ = [r.plan for r in results]
            return [r.image for r in results]
        result = retarget(X, config)
        self.plans_ = [result.plan]
        return result.image
