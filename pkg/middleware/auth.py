"""API key middleware for the featbench HTTP surface"""
import secrets
from typing import Callable, Optional

from fastapi import Request
from fastapi.responses import JSONResponse
from starlette.middleware.base import BaseHTTPMiddleware

from config.settings import API_KEY


class APIKeyMiddleware(BaseHTTPMiddleware):
    """Require a Bearer token or X-API-Key header on every non-public path."""

    def __init__(self, app, api_key: Optional[str] = None):
        super().__init__(app)
        self.api_key = api_key or API_KEY

        # Public endpoints that don't require auth
        self.public_paths = ["/health", "/", "/docs", "/openapi.json", "/redoc"]

    async def dispatch(self, request: Request, call_next: Callable):
        if request.url.path in self.public_paths or not self.api_key:
            return await call_next(request)

        auth_header = request.headers.get("Authorization")
        api_key_header = request.headers.get("X-API-Key")

        valid = False
        if auth_header and auth_header.startswith("Bearer "):
            valid = secrets.compare_digest(auth_header[7:], self.api_key)
        elif api_key_header:
            valid = secrets.compare_digest(api_key_header, self.api_key)

        if not valid:
            return JSONResponse(
                status_code=401,
                content={"detail": "Invalid or missing API key"},
                headers={"WWW-Authenticate": "Bearer"},
            )
        return await call_next(request)
