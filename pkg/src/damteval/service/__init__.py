"""FastAPI application wrapping the scoring and meta-evaluation core."""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import DamtevalError
from .routes import router


def create_app() -> FastAPI:
    app = FastAPI(title="damteval", version=__version__)
    app.include_router(router)

    @app.exception_handler(DamtevalError)
    async def _domain_error(request: Request, exc: DamtevalError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(OSError)
    async def _io_error(request: Request, exc: OSError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "IO", "message": str(exc)}},
        )

    return app


app = create_app()
