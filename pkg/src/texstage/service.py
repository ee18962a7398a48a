"""HTTP inference endpoint around a stored model.

``POST /classify`` accepts a multipart image upload and returns the stage
verdict; ``GET /health`` reports readiness plus the model's feature-config
fingerprint.  Malformed requests come back as 400, images whose texture
admits no verdict as 422, and a missing model as 503.
"""

from __future__ import annotations

import argparse

from fastapi import FastAPI, File, Query, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import knn
from .errors import DegenerateInputError, InvalidInputError
from .glcm import image_features
from .imaging import load_gray

DEFAULT_MAX_UPLOAD = 10 * 1024 * 1024


def create_app(model_path=None, *, max_upload_bytes: int = DEFAULT_MAX_UPLOAD) -> FastAPI:
    """Build the application, loading the model eagerly when a path is given."""
    app = FastAPI(title="texstage", docs_url=None, redoc_url=None)
    model = knn.load_model(model_path) if model_path is not None else None
    digest = knn.model_digest(model) if model is not None else None

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request, exc):
        return JSONResponse(status_code=400, content={"error": "invalid request", "detail": exc.errors()})

    @app.get("/health")
    def health():
        if model is None:
            return JSONResponse(status_code=503, content={"status": "unavailable", "error": "no model loaded"})
        return {"status": "ok", "model_version": digest, "fingerprint": model.fingerprint}

    @app.post("/classify")
    async def classify(file: UploadFile = File(...), binary: bool = Query(False)):
        if model is None:
            return JSONResponse(status_code=503, content={"error": "no model loaded"})
        data = await file.read()
        if len(data) > max_upload_bytes:
            return JSONResponse(
                status_code=400,
                content={"error": f"upload exceeds {max_upload_bytes} bytes"},
            )
        try:
            vec = image_features(load_gray(data), model.glcm_config)
            pred = knn.classify(model, vec)
        except DegenerateInputError as exc:
            return JSONResponse(status_code=422, content={"error": str(exc)})
        except InvalidInputError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        body = {
            "stage": pred.label.code,
            "phrase": pred.label.phrase,
            "features": list(vec),
            "model_version": digest,
        }
        if binary:
            body["binary"] = knn.to_binary(pred.label).value
        return body

    return app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="texstage-serve", description="Serve stage classification over HTTP.")
    parser.add_argument("--model", required=True, help="model JSON to load")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--max-upload-bytes", type=int, default=DEFAULT_MAX_UPLOAD)
    args = parser.parse_args(argv)

    import uvicorn

    app = create_app(args.model, max_upload_bytes=args.max_upload_bytes)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
