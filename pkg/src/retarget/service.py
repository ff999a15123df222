"""Local HTTP preview service backing the interactive client.

Stateless apart from the content-addressed importance cache; uploaded images
are kept in memory keyed by their content hash.
"""
import hashlib
import io
import json
import threading

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request, Response
from PIL import Image

from .cache import ImportanceCache
from .distortion import DistortionParams
from .errors import FeasibilityError, InputError, RetargetError
from .pipeline import RetargetConfig, distortion_curve, precompute_importance, retarget


def _decode(data: bytes) -> np.ndarray:
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except Exception as exc:
        raise InputError(f"cannot decode uploaded image: {exc}") from exc
    if img.mode not in ("L", "RGB"):
        img = img.convert("RGB")
    return np.asarray(img)


def _encode_png(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


class _Store:
    def __init__(self):
        self._lock = threading.Lock()
        self._images: dict[str, tuple[bytes, np.ndarray]] = {}

    def put(self, data: bytes) -> tuple[str, np.ndarray]:
        image_id = hashlib.sha256(data).hexdigest()[:16]
        arr = _decode(data)
        with self._lock:
            self._images[image_id] = (data, arr)
        return image_id, arr

    def get(self, image_id: str) -> tuple[bytes, np.ndarray]:
        with self._lock:
            entry = self._images.get(image_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown image id {image_id}")
        return entry


def create_app(cache_dir=None, ui_dir=None) -> FastAPI:
    app = FastAPI(title="retarget preview service")
    store = _Store()
    cache = ImportanceCache(cache_dir)

    def _config(dt: float, omega0: float, **kwargs) -> RetargetConfig:
        return RetargetConfig(params=DistortionParams(omega0=omega0, d_threshold=dt), **kwargs)

    def _importance_for(image_id: str, dt=1.0, omega0=1.0):
        data, arr = store.get(image_id)
        config = _config(dt, omega0)
        imp, _ = precompute_importance(arr, config, cache, source_bytes=data)
        return arr, imp, config

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/images")
    async def upload(request: Request):
        data = await request.body()
        if not data:
            raise HTTPException(status_code=400, detail="empty upload")
        try:
            image_id, arr = store.put(data)
        except InputError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        h, w = arr.shape[:2]
        return {"id": image_id, "width": w, "height": h}

    @app.get("/images/{image_id}/importance")
    def importance(image_id: str):
        _, imp, _ = _importance_for(image_id)
        gray = np.clip(np.rint(imp.scores * 255), 0, 255).astype(np.uint8)
        return Response(content=_encode_png(gray), media_type="image/png")

    @app.get("/images/{image_id}/retarget")
    def do_retarget(
        image_id: str,
        width: int | None = Query(default=None, gt=0),
        height: int | None = Query(default=None, gt=0),
        dt: float = Query(default=1.0, ge=0),
        omega0: float = Query(default=1.0, ge=0),
        allow_scale_fallback: bool = False,
    ):
        arr, imp, _ = _importance_for(image_id, dt, omega0)
        config = RetargetConfig(
            target_width=width,
            target_height=height,
            params=DistortionParams(omega0=omega0, d_threshold=dt),
            allow_scale_fallback=allow_scale_fallback,
        )
        try:
            result = retarget(arr, config, importance=imp)
        except FeasibilityError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except RetargetError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        headers = {
            "X-Retarget-Plan": json.dumps(result.plan.to_dict()),
            "X-Retarget-Timings": json.dumps(
                {k: round(v * 1000, 3) for k, v in result.timings.items()}
            ),
        }
        return Response(content=_encode_png(result.image), media_type="image/png", headers=headers)

    @app.get("/images/{image_id}/curve")
    def curve(
        image_id: str,
        samples: int = Query(default=11, ge=2),
        factor: float = Query(default=0.5, gt=0, lt=1),
        dt: float = Query(default=1.0, ge=0),
        omega0: float = Query(default=1.0, ge=0),
    ):
        arr, imp, _ = _importance_for(image_id, dt, omega0)
        config = RetargetConfig(
            factor=factor, params=DistortionParams(omega0=omega0, d_threshold=dt)
        )
        try:
            pairs = distortion_curve(arr, config, samples, importance=imp)
        except RetargetError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return [{"factor": f, "d": d} for f, d in pairs]

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
